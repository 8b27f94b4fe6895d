//! Command-line harness for the verification suites.
//!
//! Exit codes: 0 when every suite passes, 1 on a mathematical failure,
//! 2 on a usage, parse or validation error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hitchin_linf::adjoint::{self, BasePoint};
use hitchin_linf::hitchin::HiggsModel;
use hitchin_linf::kuranishi::compute_hull;
use hitchin_linf::suites::{self, RingSpec, RunReport, Suite, SuiteConfig};
use hitchin_linf::{Error, LieElement, Rational};

#[derive(Parser)]
#[command(name = "hitchin-linf", version, about = "Exact verification suites for L-infinity morphisms inducing the adjoint quotient and the Hitchin map")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite.
    Verify {
        /// Suite id (e.g. `lemma`) or summary anchor (e.g. `Prop.Lie2`).
        suite: String,
        #[command(flatten)]
        opts: SuiteOpts,
    },
    /// Run every suite with the default fixtures.
    RunAll {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated suite ids or anchors to keep.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the splitting `g = Im(ad v) + K` and check the order-by-order normal form.
    Hull {
        #[command(flatten)]
        opts: SuiteOpts,
    },
    /// Checks on Higgs models.
    Hitchin {
        #[command(subcommand)]
        command: HitchinCommand,
    },
    /// List suites, negative controls and built-in models.
    List,
}

#[derive(Subcommand)]
enum HitchinCommand {
    /// Morphism conditions, the deformation identity and the obstruction check for one model.
    Verify {
        #[command(flatten)]
        opts: SuiteOpts,
    },
}

#[derive(Args, Clone, Default)]
struct SuiteOpts {
    /// Built-in algebra (gl<n>, sl<n>) or `spec:<path>`.
    #[arg(long)]
    algebra: Option<String>,
    /// Model file; a missing file named after a built-in model selects that model.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Base point: regular-ss, regular-nilpotent, zero or coeffs:a,b,...
    #[arg(long = "v")]
    base_point: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    kmax: Option<usize>,
    /// Coefficient ring `r,m` meaning Q[t_1..t_r]/(deg >= m).
    #[arg(long)]
    ring: Option<String>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Sabotage flag that must make the suite fail.
    #[arg(long)]
    negctl: Option<String>,
}

impl SuiteOpts {
    fn config(&self, suite: Suite) -> Result<SuiteConfig, Error> {
        let mut cfg = SuiteConfig::new(suite, self.seed);
        cfg.algebra = self.algebra.clone();
        cfg.model = self.model.clone();
        cfg.base_point = self.base_point.as_deref().map(str::parse::<BasePoint>).transpose()?;
        cfg.trials = self.trials;
        cfg.k_max = self.kmax;
        cfg.ring = self.ring.as_deref().map(str::parse::<RingSpec>).transpose()?;
        cfg.negative_control = self.negctl.clone();
        if let Some(m) = &cfg.model {
            // fail early with a location-annotated message
            HiggsModel::load(m)?;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> Result<bool, Error> {
    match command {
        Command::Verify { suite, opts } => {
            let report = suites::run(&opts.config(suite.parse()?)?)?;
            emit(&report, opts.json.as_deref())
        }
        Command::RunAll { seed, only, json } => emit(&suites::run_all(seed, &only)?, json.as_deref()),
        Command::Hull { opts } => hull(&opts),
        Command::Hitchin { command: HitchinCommand::Verify { opts } } => {
            if opts.model.is_none() {
                return Err(Error::InvalidArgument("`hitchin verify` needs --model".into()));
            }
            let mut parts = Vec::new();
            for suite in [Suite::HitchinMorphism, Suite::DefHitchin, Suite::Obstruction] {
                let mut cfg = opts.config(suite)?;
                if suite != Suite::HitchinMorphism {
                    // --kmax bounds the morphism check only
                    cfg.k_max = None;
                }
                if cfg.negative_control.as_ref().is_some_and(|n| !suite.negative_controls().contains(&n.as_str())) {
                    cfg.negative_control = None;
                }
                parts.extend(suites::run(&cfg)?.suites);
            }
            emit(&RunReport::from_suites(opts.seed, parts), opts.json.as_deref())
        }
        Command::List => {
            println!("suites (id, anchor, negative controls):");
            for s in Suite::ALL {
                println!("  {:<17} {:<22} {}", s.id(), s.anchor(), s.negative_controls().join(", "));
            }
            println!("built-in models: {}", HiggsModel::builtin_names().join(", "));
            Ok(true)
        }
    }
}

fn format_vector(alg_labels: &[String], v: &[Rational]) -> String {
    let terms: Vec<String> = v
        .iter()
        .zip(alg_labels)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, l)| if c.is_one() { l.clone() } else { format!("({c})*{l}") })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn hull(opts: &SuiteOpts) -> Result<bool, Error> {
    let cfg = opts.config(Suite::Hull)?;
    let names = match &cfg.algebra {
        Some(a) => vec![a.clone()],
        None => vec!["sl2".to_string(), "sl3".to_string()],
    };
    let points = match &cfg.base_point {
        Some(b) => vec![b.clone()],
        None => vec![BasePoint::RegularSemisimple, BasePoint::RegularNilpotent],
    };
    for name in &names {
        let (alg, _) = adjoint::load_algebra(name, None)?;
        for bp in &points {
            let v: LieElement = bp.resolve(&alg)?;
            let hull = compute_hull(&v)?;
            println!("{} at v = {} ({})", alg.name(), v, bp.name());
            for b in hull.image_basis() {
                println!("  Im(ad v): {}", format_vector(alg.labels(), b));
            }
            for b in hull.complement_basis() {
                println!("  K:        {}", format_vector(alg.labels(), b));
            }
        }
    }
    let report = suites::run(&cfg)?;
    emit(&report, opts.json.as_deref())
}

fn emit(report: &RunReport, json: Option<&Path>) -> Result<bool, Error> {
    print!("{}", report.render());
    if let Some(path) = json {
        std::fs::write(path, report.to_json() + "\n")?;
    }
    Ok(report.passed())
}
