//! Seeded verification suites, their negative controls and the run report.
//!
//! Every suite draws its samples from `sampling::trial_rng(seed, stream, trial)`
//! with a stream name that records the fixture, so a report can be replayed
//! trial by trial. Wall time is kept out of the JSON to make reports
//! byte-identical across runs.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::adjoint::{self, build_adjoint_morphism, verify_def_equals_chi, BasePoint, Generators, ToyHiggsDgla};
use crate::artin::{small_extension_pair, ArtinElement, ArtinRing};
use crate::error::{Error, Result};
use crate::graded::{self, CheckConfig, Dgla, GradedSpace, ScaledMorphism};
use crate::hitchin::{
    build_hitchin_morphism, verify_def_equals_hitchin, verify_hitchin_morphism, verify_obstruction, HiggsModel,
    HitchinSabotage,
};
use crate::invariants::{
    check_factor_lemma, check_lemma_invariance, coordinate_power, funny_sum, polarize_full, polarize_unchecked,
    taylor_sides, AdjointQuotient, FactorReading, InvariantPolynomial, LinearMap, SymmetricForm,
};
use crate::kuranishi::{compute_hull, verify_hull_surjectivity};
use crate::lie::{LieAlgebra, LieElement};
use crate::linalg::Matrix;
use crate::rational::Rational;
use crate::report::{self, SuiteEntry, SCHEMA_VERSION};
use crate::sampling::{self, SuiteRng};

pub const TOOL_NAME: &str = "hitchin-linf";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Algebras used when no `--algebra` is given.
pub const DEFAULT_ALGEBRAS: [&str; 4] = ["gl2", "gl3", "sl2", "sl3"];
/// Highest trace power sampled by the identity suites.
pub const MAX_TRACE_POWER: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Artin,
    Lie,
    Polarisation,
    Taylor,
    Lemma,
    Funny,
    Factor,
    Codifferential,
    AdjointMorphism,
    DefChi,
    Hull,
    HitchinMorphism,
    DefHitchin,
    Obstruction,
}

impl Suite {
    /// Dependency order used by `run_all`.
    pub const ALL: [Suite; 14] = [
        Suite::Artin,
        Suite::Lie,
        Suite::Polarisation,
        Suite::Taylor,
        Suite::Lemma,
        Suite::Funny,
        Suite::Factor,
        Suite::Codifferential,
        Suite::AdjointMorphism,
        Suite::DefChi,
        Suite::Hull,
        Suite::HitchinMorphism,
        Suite::DefHitchin,
        Suite::Obstruction,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::Artin => "artin",
            Suite::Lie => "lie",
            Suite::Polarisation => "polarisation",
            Suite::Taylor => "taylor",
            Suite::Lemma => "lemma",
            Suite::Funny => "funny",
            Suite::Factor => "factor",
            Suite::Codifferential => "codifferential",
            Suite::AdjointMorphism => "adjoint-morphism",
            Suite::DefChi => "def-chi",
            Suite::Hull => "hull",
            Suite::HitchinMorphism => "hitchin-morphism",
            Suite::DefHitchin => "def-hitchin",
            Suite::Obstruction => "obstruction",
        }
    }

    /// Key of the summary table.
    pub fn anchor(self) -> &'static str {
        match self {
            Suite::Artin => "Infra.artin",
            Suite::Lie => "Infra.lie",
            Suite::Polarisation => "Infra.polarisation",
            Suite::Taylor => "Eq.taylor",
            Suite::Lemma => "Lemma.lemma",
            Suite::Funny => "Cor.funny",
            Suite::Factor => "Lemma.factor",
            Suite::Codifferential => "Infra.codifferential",
            Suite::AdjointMorphism => "Prop.Lie1",
            Suite::DefChi => "Prop.Lie2",
            Suite::Hull => "Prop.hull",
            Suite::HitchinMorphism => "Prop.hitchin1",
            Suite::DefHitchin => "Prop.hitchin2",
            Suite::Obstruction => "Cor.obstruct",
        }
    }

    /// Sabotage flags accepted by `--negctl`; each must make the suite fail.
    pub fn negative_controls(self) -> &'static [&'static str] {
        match self {
            Suite::Artin => &["off-by-one-nilpotency"],
            Suite::Lie => &["transpose-ad"],
            Suite::Polarisation => &["drop-factorial"],
            Suite::Taylor => &["drop-factorial"],
            Suite::Lemma => &["non-invariant"],
            Suite::Funny => &["flip-second-sign"],
            Suite::Factor => &["single-slot"],
            Suite::Codifferential => &["perturb-differential"],
            Suite::AdjointMorphism => &["flip-sign"],
            Suite::DefChi => &["drop-factorial"],
            Suite::Hull => &["no-correction"],
            Suite::HitchinMorphism => &["flip-koszul"],
            Suite::DefHitchin => &["drop-factorial"],
            Suite::Obstruction => &["perturb-theta"],
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            Suite::Artin | Suite::Taylor | Suite::Lemma | Suite::Funny => 100,
            Suite::Lie | Suite::Polarisation | Suite::DefChi | Suite::Hull => 50,
            Suite::Factor | Suite::DefHitchin | Suite::Obstruction => 20,
            Suite::AdjointMorphism | Suite::Codifferential | Suite::HitchinMorphism => 10,
        }
    }

    /// `None` means "all arities the fixture allows".
    pub fn default_k_max(self) -> Option<usize> {
        match self {
            Suite::Factor | Suite::HitchinMorphism => Some(3),
            Suite::Codifferential => Some(5),
            _ => None,
        }
    }

    /// Rings `(variables, truncation order)` sampled when no `--ring` is given.
    pub fn default_rings(self) -> &'static [RingSpec] {
        const ARTIN: [RingSpec; 4] = [RingSpec::new(1, 2), RingSpec::new(1, 4), RingSpec::new(2, 3), RingSpec::new(3, 2)];
        const DEF_CHI: [RingSpec; 3] = [RingSpec::new(1, 2), RingSpec::new(1, 4), RingSpec::new(2, 3)];
        const HULL: [RingSpec; 1] = [RingSpec::new(1, 3)];
        const DEF_HITCHIN: [RingSpec; 2] = [RingSpec::new(1, 3), RingSpec::new(2, 3)];
        const LIE: [RingSpec; 1] = [RingSpec::new(1, 3)];
        match self {
            Suite::Artin => &ARTIN,
            Suite::DefChi => &DEF_CHI,
            Suite::Hull => &HULL,
            Suite::DefHitchin => &DEF_HITCHIN,
            Suite::Lie => &LIE,
            _ => &[],
        }
    }

    /// Resolves a suite id or summary anchor.
    pub fn lookup(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.id() == name || s.anchor() == name)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::lookup(s).ok_or_else(|| Error::Parse {
            location: format!("suite `{s}`"),
            message: format!(
                "expected one of {}",
                Suite::ALL.iter().map(|s| s.id()).collect::<Vec<_>>().join(", ")
            ),
        })
    }
}

/// `Q[t_1..t_vars]/(deg >= order)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RingSpec {
    pub vars: usize,
    pub order: u32,
}

impl RingSpec {
    pub const fn new(vars: usize, order: u32) -> Self {
        RingSpec { vars, order }
    }

    pub fn build(self) -> Result<Arc<ArtinRing>> {
        ArtinRing::truncated(self.vars, self.order)
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    /// Accepts `r,m` or `(r, m)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse { location: format!("ring `{s}`"), message: "expected `r,m` with r >= 1, m >= 2".into() };
        let inner: String = s.chars().filter(|c| !matches!(c, '(' | ')' | ' ')).collect();
        let (r, m) = inner.split_once(',').ok_or_else(bad)?;
        let vars: usize = r.parse().map_err(|_| bad())?;
        let order: u32 = m.parse().map_err(|_| bad())?;
        if vars == 0 || order < 2 {
            return Err(bad());
        }
        Ok(RingSpec { vars, order })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub suite: Suite,
    /// Built-in name or `spec:<path>`; `None` selects the default fixtures.
    pub algebra: Option<String>,
    /// Model file (or built-in model stem); `None` selects every built-in model.
    pub model: Option<PathBuf>,
    pub base_point: Option<BasePoint>,
    pub trials: Option<usize>,
    pub seed: u64,
    pub k_max: Option<usize>,
    pub ring: Option<RingSpec>,
    pub negative_control: Option<String>,
}

impl SuiteConfig {
    pub fn new(suite: Suite, seed: u64) -> Self {
        SuiteConfig {
            suite,
            algebra: None,
            model: None,
            base_point: None,
            trials: None,
            seed,
            k_max: None,
            ring: None,
            negative_control: None,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = Some(trials);
        self
    }

    pub fn with_algebra(mut self, algebra: &str) -> Self {
        self.algebra = Some(algebra.to_string());
        self
    }

    pub fn with_model(mut self, model: impl Into<PathBuf>) -> Self {
        self.model = Some(model.into());
        self
    }

    pub fn with_k_max(mut self, k: usize) -> Self {
        self.k_max = Some(k);
        self
    }

    pub fn with_negative_control(mut self, name: &str) -> Self {
        self.negative_control = Some(name.to_string());
        self
    }

    fn trials(&self) -> usize {
        self.trials.unwrap_or_else(|| self.suite.default_trials())
    }

    fn rings(&self) -> Result<Vec<Arc<ArtinRing>>> {
        match self.ring {
            Some(r) => Ok(vec![r.build()?]),
            None => self.suite.default_rings().iter().map(|r| r.build()).collect(),
        }
    }

    fn sabotaged(&self) -> bool {
        self.negative_control.is_some()
    }

    fn validate(&self) -> Result<()> {
        if let Some(n) = &self.negative_control {
            if !self.suite.negative_controls().contains(&n.as_str()) {
                return Err(Error::Parse {
                    location: format!("--negctl {n}"),
                    message: format!(
                        "suite {} accepts {}",
                        self.suite,
                        self.suite.negative_controls().join(", ")
                    ),
                });
            }
        }
        if self.trials == Some(0) {
            return Err(Error::InvalidArgument("--trials must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub anchor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negative_control: Option<String>,
    pub verdict: Verdict,
    pub trials: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_counterexample: Option<String>,
    pub entries: Vec<SuiteEntry>,
    /// Sampled inputs and outputs, for suites that record them.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub replay: Vec<serde_json::Value>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SuiteReport {
    fn from_entries(cfg: &SuiteConfig, entries: Vec<SuiteEntry>, replay: Vec<serde_json::Value>, wall_time: Duration) -> Self {
        let failures = report::failure_count(&entries);
        SuiteReport {
            suite: cfg.suite.id().to_string(),
            anchor: cfg.suite.anchor().to_string(),
            negative_control: cfg.negative_control.clone(),
            verdict: if failures == 0 { Verdict::Pass } else { Verdict::Fail },
            trials: entries.iter().map(|e| e.trials).sum(),
            failures,
            first_counterexample: entries.iter().find_map(|e| {
                e.first_counterexample.as_ref().map(|c| format!("{} [{}]: {c}", e.identity, e.dgla_id))
            }),
            entries,
            replay,
            wall_time,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub rng: String,
    pub seed: u64,
    pub verdict: Verdict,
    pub suites: Vec<SuiteReport>,
}

impl RunReport {
    /// Report over already-run suites; the verdict is the conjunction.
    pub fn from_suites(seed: u64, suites: Vec<SuiteReport>) -> Self {
        let verdict = if suites.iter().all(SuiteReport::passed) { Verdict::Pass } else { Verdict::Fail };
        RunReport {
            schema_version: SCHEMA_VERSION,
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            rng: sampling::RNG_ALGORITHM.to_string(),
            seed,
            verdict,
            suites,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// Human-readable summary, one line per suite plus failing cells.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let negctl = s.negative_control.as_deref().map(|n| format!(" --negctl {n}")).unwrap_or_default();
            out.push_str(&format!(
                "{:<4}  {:<22} {:<17} trials={:<6} failures={:<5} {:>8.2}s{negctl}\n",
                s.verdict.to_string(),
                s.anchor,
                s.suite,
                s.trials,
                s.failures,
                s.wall_time.as_secs_f64()
            ));
            for e in s.entries.iter().filter(|e| !e.passed()).take(5) {
                out.push_str(&format!(
                    "      {} {}{}{}: {}/{} failed\n",
                    e.dgla_id,
                    e.identity,
                    e.k.map(|k| format!(" k={k}")).unwrap_or_default(),
                    e.degree_profile.as_deref().map(|p| format!(" {p}")).unwrap_or_default(),
                    e.failures,
                    e.trials
                ));
            }
            if let Some(c) = &s.first_counterexample {
                out.push_str(&format!("      counterexample: {c}\n"));
            }
        }
        let total: Duration = self.suites.iter().map(|s| s.wall_time).sum();
        out.push_str(&format!("{} ({} suites, seed {}, {:.2}s)\n", self.verdict, self.suites.len(), self.seed, total.as_secs_f64()));
        out
    }
}

/// Runs one suite.
pub fn run(cfg: &SuiteConfig) -> Result<RunReport> {
    Ok(RunReport::from_suites(cfg.seed, vec![run_suite(cfg)?]))
}

/// Runs every suite (or those named in `only`, by id or anchor) with default fixtures.
pub fn run_all(seed: u64, only: &[String]) -> Result<RunReport> {
    let mut selected = Vec::new();
    for name in only {
        selected.push(name.parse::<Suite>()?);
    }
    let mut reports = Vec::new();
    for suite in Suite::ALL {
        if selected.is_empty() || selected.contains(&suite) {
            reports.push(run_suite(&SuiteConfig::new(suite, seed))?);
        }
    }
    Ok(RunReport::from_suites(seed, reports))
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mut replay = Vec::new();
    let entries = match cfg.suite {
        Suite::Artin => artin_suite(cfg)?,
        Suite::Lie => lie_suite(cfg)?,
        Suite::Polarisation => polarisation_suite(cfg)?,
        Suite::Taylor => taylor_suite(cfg)?,
        Suite::Lemma => lemma_suite(cfg)?,
        Suite::Funny => funny_suite(cfg)?,
        Suite::Factor => factor_suite(cfg)?,
        Suite::Codifferential => codifferential_suite(cfg)?,
        Suite::AdjointMorphism => adjoint_morphism_suite(cfg)?,
        Suite::DefChi => def_chi_suite(cfg)?,
        Suite::Hull => hull_suite(cfg, &mut replay)?,
        Suite::HitchinMorphism => hitchin_morphism_suite(cfg)?,
        Suite::DefHitchin => def_hitchin_suite(cfg)?,
        Suite::Obstruction => obstruction_suite(cfg)?,
    };
    Ok(SuiteReport::from_entries(cfg, entries, replay, start.elapsed()))
}

/// An algebra with every polynomial the identity suites sample.
struct AlgebraFixture {
    algebra: Arc<LieAlgebra>,
    polynomials: Vec<InvariantPolynomial>,
    quotients: Vec<AdjointQuotient>,
}

fn algebra_fixtures(cfg: &SuiteConfig, defaults: &[&str]) -> Result<Vec<AlgebraFixture>> {
    let names: Vec<String> = match &cfg.algebra {
        Some(a) => vec![a.clone()],
        None => defaults.iter().map(|s| s.to_string()).collect(),
    };
    names
        .iter()
        .map(|name| {
            let (algebra, declared) = adjoint::load_algebra(name, None)?;
            let mut quotients = Vec::new();
            let mut polynomials = Vec::new();
            if algebra.realization().is_some() {
                polynomials.extend(InvariantPolynomial::char_poly_coefficients(&algebra)?);
                for p in InvariantPolynomial::trace_powers(&algebra, MAX_TRACE_POWER)? {
                    if !polynomials.iter().any(|q| q.polynomial() == p.polynomial()) {
                        polynomials.push(p);
                    }
                }
                quotients.push(adjoint::adjoint_quotient(&algebra, &[], Generators::CharPoly)?);
                quotients.push(adjoint::adjoint_quotient(&algebra, &[], Generators::TracePowers)?);
            }
            if !declared.is_empty() {
                let q = adjoint::adjoint_quotient(&algebra, &declared, Generators::Declared)?;
                polynomials.extend(q.components().iter().cloned());
                quotients.push(q);
            }
            if polynomials.is_empty() {
                return Err(Error::Validation(format!(
                    "{name}: no invariant polynomials (declare [[invariants]] or give a matrix realization)"
                )));
            }
            Ok(AlgebraFixture { algebra, polynomials, quotients })
        })
        .collect()
}

fn model_fixtures(cfg: &SuiteConfig) -> Result<Vec<HiggsModel>> {
    match &cfg.model {
        Some(p) => Ok(vec![HiggsModel::load(p)?]),
        None => HiggsModel::builtin_names().into_iter().map(HiggsModel::builtin).collect(),
    }
}

/// Runs `trial` for `0..trials` in parallel with per-trial streams and folds the outcomes.
fn sampled<F>(cfg: &SuiteConfig, dgla_id: &str, identity: &str, stream: &str, trial: F) -> Result<SuiteEntry>
where
    F: Fn(&mut SuiteRng) -> Result<Option<String>> + Sync,
{
    let stream = format!("{}/{stream}", cfg.suite.id());
    let outcomes: Vec<Option<String>> = (0..cfg.trials() as u64)
        .into_par_iter()
        .map(|t| trial(&mut sampling::trial_rng(cfg.seed, &stream, t)))
        .collect::<Result<_>>()?;
    Ok(SuiteEntry::new(cfg.suite.id(), dgla_id, identity).absorb(outcomes))
}

fn rational_element(rng: &mut SuiteRng, alg: &Arc<LieAlgebra>) -> LieElement {
    sampling::lie_element(rng, alg)
}

fn artin_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteEntry>> {
    let sabotage = cfg.sabotaged();
    let mut entries = Vec::new();
    for ring in cfg.rings()? {
        let id = ring.describe();
        let r = &ring;
        entries.push(sampled(cfg, &id, "ring-axioms", &format!("{id}/axioms"), |rng| {
            let a = sampling::artin_element(rng, r, false);
            let b = sampling::artin_element(rng, r, false);
            let c = sampling::artin_element(rng, r, false);
            let one = ArtinElement::one(r);
            let checks = [
                ("commutativity", &a * &b == &b * &a),
                ("associativity", &(&a * &b) * &c == &a * &(&b * &c)),
                ("distributivity", &a * &(&b + &c) == &(&a * &b) + &(&a * &c)),
                ("unit", &a * &one == a),
            ];
            Ok(checks.iter().find(|(_, ok)| !ok).map(|(name, _)| format!("{name} fails for a = {a}, b = {b}, c = {c}")))
        })?);
        entries.push(sampled(cfg, &id, "nilpotency", &format!("{id}/nilpotency"), |rng| {
            let x = sampling::artin_element(rng, r, true);
            let n = ring.nilpotency_index();
            let e = if sabotage { n - 1 } else { n };
            Ok((!x.pow(e).is_zero()).then(|| format!("x = {x}: x^{e} = {} != 0", x.pow(e))))
        })?);
    }
    for order in 2..=4u32 {
        let ext = small_extension_pair(order)?;
        let id = format!("{} -> {}", ext.total.describe(), ext.quotient.describe());
        let ext = &ext;
        entries.push(sampled(cfg, &id, "small-extension", &format!("small/{order}"), |rng| {
            let k = ext.kernel_generator();
            let m = sampling::artin_element(rng, &ext.total, true);
            let a = sampling::artin_element(rng, &ext.quotient, false);
            if !(&m * &k).is_zero() {
                return Ok(Some(format!("m = {m} does not annihilate the kernel generator {k}")));
            }
            if !ext.project(&k).is_zero() {
                return Ok(Some(format!("kernel generator {k} survives the projection")));
            }
            Ok((ext.project(&ext.lift(&a)) != a).then(|| format!("projecting the lift of {a} does not return it")))
        })?);
    }
    Ok(entries)
}

/// `sum_i c_i M_i` for the realization matrices `M_i`.
fn realize(ms: &[Matrix], x: &LieElement) -> Matrix {
    let n = ms[0].rows();
    let mut out = Matrix::zeros(n, n);
    for (m, c) in ms.iter().zip(x.residue()) {
        for i in 0..n {
            for j in 0..n {
                let v = out.get(i, j) + &(&c * m.get(i, j));
                out.set(i, j, v);
            }
        }
    }
    out
}

fn lie_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteEntry>> {
    let transpose = cfg.sabotaged();
    let rings = cfg.rings()?;
    let mut entries = Vec::new();
    for fx in algebra_fixtures(cfg, &DEFAULT_ALGEBRAS)? {
        let alg = &fx.algebra;
        let id = alg.name().to_string();
        for ring in &rings {
            entries.push(sampled(cfg, &id, "jacobi+antisymmetry", &format!("{id}/{}", ring.describe()), |rng| {
                let x = sampling::lie_element_over(rng, alg, ring, false);
                let y = sampling::lie_element_over(rng, alg, ring, false);
                let z = sampling::lie_element_over(rng, alg, ring, false);
                let jac = x.bracket(&y.bracket(&z)).add(&y.bracket(&z.bracket(&x))).add(&z.bracket(&x.bracket(&y)));
                if !jac.is_zero() {
                    return Ok(Some(format!("Jacobi fails on {x}, {y}, {z}")));
                }
                Ok((!x.bracket(&y).add(&y.bracket(&x)).is_zero()).then(|| format!("[x,y] != -[y,x] for {x}, {y}")))
            })?);
        }
        entries.push(sampled(cfg, &id, "ad-homomorphism", &format!("{id}/ad"), |rng| {
            let x = rational_element(rng, alg);
            let y = rational_element(rng, alg);
            let ad = |e: &LieElement| {
                let m = alg.ad_matrix(&e.residue());
                if transpose {
                    m.transpose()
                } else {
                    m
                }
            };
            let lhs = ad(&x.bracket(&y));
            let rhs = ad(&x).mul(&ad(&y)).sub(&ad(&y).mul(&ad(&x)));
            Ok((lhs != rhs).then(|| format!("ad[x,y] != [ad x, ad y] for x = {x}, y = {y}")))
        })?);
        if let Some(ms) = alg.realization() {
            entries.push(sampled(cfg, &id, "realization", &format!("{id}/matrices"), |rng| {
                let x = rational_element(rng, alg);
                let y = rational_element(rng, alg);
                let (mx, my) = (realize(ms, &x), realize(ms, &y));
                let commutator = mx.mul(&my).sub(&my.mul(&mx));
                let coords = alg.coordinates_of(&commutator)?;
                Ok((coords != x.bracket(&y).residue()).then(|| format!("XY - YX is not [x,y] for x = {x}, y = {y}")))
            })?);
        }
    }
    Ok(entries)
}

fn polarisation_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteEntry>> {
    let drop_factorial = cfg.sabotaged();
    let mut entries = Vec::new();
    for fx in algebra_fixtures(cfg, &DEFAULT_ALGEBRAS)? {
        let alg = &fx.algebra;
        for p in &fx.polynomials {
            let id = format!("{}:{}", alg.name(), p.label());
            let d = p.degree() as usize;
            let k = d.min(3);
            entries.push(sampled(cfg, &id, "symmetric+multilinear", &format!("{id}/shape"), |rng| {
                let v = rational_element(rng, alg);
                let xs: Vec<LieElement> = (0..k).map(|_| rational_element(rng, alg)).collect();
                let perm = sampling::permutation(rng, k);
                let permuted: Vec<LieElement> = perm.iter().map(|&i| xs[i].clone()).collect();
                let base = polarize_unchecked(p, &xs, &v);
                if base != polarize_unchecked(p, &permuted, &v) {
                    return Ok(Some(format!("not symmetric: args {xs:?} permuted by {perm:?} at v = {v}")));
                }
                let y = rational_element(rng, alg);
                let (a, b) = (sampling::small_rational(rng), sampling::small_rational(rng));
                let mut mixed = xs.clone();
                mixed[0] = xs[0].scale_rational(&a).add(&y.scale_rational(&b));
                let mut with_y = xs.clone();
                with_y[0] = y.clone();
                let expected = &base.scale(&a) + &polarize_unchecked(p, &with_y, &v).scale(&b);
                Ok((polarize_unchecked(p, &mixed, &v) != expected).then(|| format!("not linear in the first slot at v = {v}")))
            })?);
            entries.push(sampled(cfg, &id, "routes-agree", &format!("{id}/routes"), |rng| {
                let v = rational_element(rng, alg);
                let xs: Vec<LieElement> = (0..k).map(|_| rational_element(rng, alg)).collect();
                match polarize_full(p, &xs, &v) {
                    Ok(_) => Ok(None),
                    Err(Error::Internal(m)) => Ok(Some(m)),
                    Err(e) => Err(e),
                }
            })?);
            entries.push(sampled(cfg, &id, "diagonal", &format!("{id}/diagonal"), |rng| {
                let v = rational_element(rng, alg);
                let x = rational_element(rng, alg);
                let full = polarize_unchecked(p, &vec![x.clone(); d], &v);
                let scale = if drop_factorial { Rational::one() } else { Rational::factorial(d as u32) };
                let expected = p.eval(&x).scale(&scale);
                Ok((full != expected).then(|| format!("x = {x}: P_dd(x..x) = {full}, expected {expected}")))
            })?);
        }
    }
    Ok(entries)
}

fn taylor_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteEntry>> {
    let factorials = !cfg.sabotaged();
    let mut entries = Vec::new();
    for fx in algebra_fixtures(cfg, &DEFAULT_ALGEBRAS)? {
        for p in &fx.polynomials {
            let id = format!("{}:{}", fx.algebra.name(), p.label());
            entries.push(sampled(cfg, &id, "taylor", &id, |rng| {
                let v = rational_element(rng, &fx.algebra);
                let x = rational_element(rng, &fx.algebra);
                let (ok, lhs, rhs) = taylor_sides(p, &v, &x, factorials)?;
                Ok((!ok).then(|| format!("v = {v}, X = {x}: p(v+X) - p(v) = {lhs}, polarisation sum = {rhs}")))
            })?);
        }
    }
    Ok(entries)
}

fn lemma_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteEntry>> {
    let mut entries = Vec::new();
    for fx in algebra_fixtures(cfg, &DEFAULT_ALGEBRAS)? {
        let polys = if cfg.sabotaged() { vec![coordinate_power(&fx.algebra, 0, 2)?] } else { fx.polynomials.clone() };
        for p in &polys {
            let id = format!("{}:{}", fx.algebra.name(), p.label());
            entries.push(sampled(cfg, &id, "L_[X,v] p(v) = 0", &id, |rng| {
                let v = rational_element(rng, &fx.algebra);
                let x = rational_element(rng, &fx.algebra);
                Ok((!check_lemma_invariance(p, &v, &x)?).then(|| format!("v = {v}, X = {x}")))
            })?);
        }
    }
    Ok(entries)
}

fn funny_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteEntry>> {
    let sign = if cfg.sabotaged() { -Rational::one() } else { Rational::one() };
    let mut entries = Vec::new();
    for fx in algebra_fixtures(cfg, &DEFAULT_ALGEBRAS)? {
        for p in &fx.polynomials {
            let d = p.degree() as usize;
            let k_max = cfg.k_max.map_or(d, |k| k.min(d));
            for k in 2..=k_max {
                let id = format!("{}:{}", fx.algebra.name(), p.label());
                let sign = &sign;
                let entry = sampled(cfg, &id, "funny", &format!("{id}/k{k}"), |rng| {
                    let v = rational_element(rng, &fx.algebra);
                    let y = rational_element(rng, &fx.algebra);
                    let xs: Vec<LieElement> = (0..k - 1).map(|_| rational_element(rng, &fx.algebra)).collect();
                    let total = funny_sum(p, k, &y, &xs, &v, sign)?;
                    Ok((!total.is_zero()).then(|| format!("v = {v}, Y = {y}, X = {xs:?}: sum = {total}")))
                })?;
                entries.push(entry.with_k(k));
            }
        }
    }
    Ok(entries)
}

fn factor_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteEntry>> {
    let reading = if cfg.sabotaged() { FactorReading::SingleSlot } else { FactorReading::Derivation };
    let k_cap = cfg.k_max.or(cfg.suite.default_k_max()).unwrap_or(3);
    let mut entries = Vec::new();
    for fx in algebra_fixtures(cfg, &DEFAULT_ALGEBRAS)? {
        for p in fx.polynomials.iter().filter(|p| p.degree() <= 3) {
            let form = SymmetricForm::full_polarisation(p)?;
            let d = p.degree() as usize;
            for k in 1..=d.min(k_cap) {
                for map_name in ["identity", "ad"] {
                    let id = format!("{}:{}", fx.algebra.name(), p.label());
                    let form = &form;
                    let entry = sampled(cfg, &id, &format!("factor[L={map_name}]"), &format!("{id}/k{k}/{map_name}"), |rng| {
                        let map = if map_name == "identity" {
                            LinearMap::Identity
                        } else {
                            LinearMap::Ad(rational_element(rng, &fx.algebra))
                        };
                        let v = rational_element(rng, &fx.algebra);
                        let xs: Vec<LieElement> = (0..k - 1).map(|_| rational_element(rng, &fx.algebra)).collect();
                        let check = check_factor_lemma(form, &map, &v, &xs, reading)?;
                        Ok((!check.holds())
                            .then(|| format!("v = {v}, X = {xs:?}: oracle {} != formula {}", check.oracle, check.formula)))
                    })?;
                    entries.push(entry.with_k(k));
                }
            }
        }
    }
    Ok(entries)
}

/// Adds `e_target` to the differential of every basis vector of the lowest
/// degree that has a successor, so that sampled words meet the perturbation.
struct PerturbedDgla {
    inner: Arc<dyn Dgla>,
    sources: Vec<usize>,
    target: usize,
    id: String,
}

impl PerturbedDgla {
    fn new(inner: Arc<dyn Dgla>) -> Result<Self> {
        let space = inner.space().clone();
        let pick = space.degrees_present().into_iter().find_map(|d| {
            let from = space.basis_in_degree(d);
            let to = space.basis_in_degree(d + 1);
            (!from.is_empty() && !to.is_empty()).then(|| (from, to[0]))
        });
        let (sources, target) =
            pick.ok_or_else(|| Error::InvalidArgument(format!("{}: no room to perturb the differential", inner.id())))?;
        let id = format!("perturbed[{}]", inner.id());
        Ok(PerturbedDgla { inner, sources, target, id })
    }
}

impl Dgla for PerturbedDgla {
    fn space(&self) -> &Arc<GradedSpace> {
        self.inner.space()
    }

    fn differential_basis(&self, i: usize) -> Vec<(usize, Rational)> {
        let mut d = self.inner.differential_basis(i);
        if self.sources.contains(&i) {
            match d.iter_mut().find(|(j, _)| *j == self.target) {
                Some(slot) => slot.1 += &Rational::one(),
                None => d.push((self.target, Rational::one())),
            }
            d.retain(|(_, c)| !c.is_zero());
        }
        d
    }

    fn bracket_basis(&self, i: usize, j: usize) -> Vec<(usize, Rational)> {
        self.inner.bracket_basis(i, j)
    }

    fn id(&self) -> &str {
        &self.id
    }
}

fn codifferential_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteEntry>> {
    let k_max = cfg.k_max.or(cfg.suite.default_k_max()).unwrap_or(5);
    let check = CheckConfig::new(cfg.suite.id(), k_max, cfg.trials(), cfg.seed);
    let mut dglas: Vec<Arc<dyn Dgla>> = Vec::new();
    if cfg.model.is_none() {
        for fx in algebra_fixtures(cfg, &DEFAULT_ALGEBRAS)? {
            let bp = cfg.base_point.clone().unwrap_or(BasePoint::RegularSemisimple);
            dglas.push(Arc::new(ToyHiggsDgla::new(&bp.resolve(&fx.algebra)?)?));
        }
    }
    if cfg.algebra.is_none() {
        for m in model_fixtures(cfg)? {
            dglas.push(m.dgla()?);
        }
    }
    let mut entries = Vec::new();
    for dgla in dglas {
        let dgla: Arc<dyn Dgla> = if cfg.sabotaged() { Arc::new(PerturbedDgla::new(dgla)?) } else { dgla };
        entries.extend(graded::check_codifferential(dgla.as_ref(), &check, 3));
    }
    Ok(entries)
}

fn base_points(cfg: &SuiteConfig, defaults: &[BasePoint]) -> Vec<BasePoint> {
    match &cfg.base_point {
        Some(b) => vec![b.clone()],
        None => defaults.to_vec(),
    }
}

fn adjoint_morphism_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteEntry>> {
    let mut entries = Vec::new();
    for fx in algebra_fixtures(cfg, &DEFAULT_ALGEBRAS)? {
        for bp in base_points(cfg, &BasePoint::fixtures()) {
            let v = bp.resolve(&fx.algebra)?;
            for q in &fx.quotients {
                let h = Arc::new(build_adjoint_morphism(q, &v)?);
                let k_max = cfg.k_max.unwrap_or(q.max_degree() as usize);
                let check = CheckConfig::new(cfg.suite.id(), k_max, cfg.trials(), cfg.seed);
                let labels: Vec<&str> = q.components().iter().map(|p| p.label()).collect();
                let tag = format!("[{}]", labels.join(","));
                let found = if cfg.sabotaged() {
                    let scaled = ScaledMorphism { inner: h, arity: 2, factor: -Rational::one() };
                    graded::check_linfty_morphism(&scaled, &check, None)
                } else {
                    graded::check_linfty_morphism(h.as_ref(), &check, None)
                };
                entries.extend(found.into_iter().map(|mut e| {
                    e.dgla_id = format!("{}{tag}", e.dgla_id);
                    e
                }));
            }
        }
    }
    Ok(entries)
}

fn def_chi_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteEntry>> {
    let rings = cfg.rings()?;
    let mut entries = Vec::new();
    for fx in algebra_fixtures(cfg, &DEFAULT_ALGEBRAS)? {
        for bp in base_points(cfg, &BasePoint::fixtures()) {
            let v = bp.resolve(&fx.algebra)?;
            let h = build_adjoint_morphism(&fx.quotients[0], &v)?;
            for ring in &rings {
                entries.extend(verify_def_equals_chi(&h, ring, cfg.suite.id(), cfg.trials(), cfg.seed, !cfg.sabotaged())?);
            }
        }
    }
    Ok(entries)
}

fn hull_suite(cfg: &SuiteConfig, replay: &mut Vec<serde_json::Value>) -> Result<Vec<SuiteEntry>> {
    let rings = cfg.rings()?;
    let mut entries = Vec::new();
    for fx in algebra_fixtures(cfg, &["sl2", "sl3"])? {
        for bp in base_points(cfg, &[BasePoint::RegularSemisimple, BasePoint::RegularNilpotent]) {
            let hull = compute_hull(&bp.resolve(&fx.algebra)?)?;
            for ring in &rings {
                let (found, trials) =
                    verify_hull_surjectivity(&hull, ring, cfg.suite.id(), cfg.trials(), cfg.seed, !cfg.sabotaged())?;
                let id = found.first().map(|e| e.dgla_id.clone()).unwrap_or_default();
                for (n, t) in trials.iter().enumerate() {
                    replay.push(serde_json::json!({"fixture": id, "ring": ring.describe(), "trial": n, "sample": t}));
                }
                entries.extend(found);
            }
        }
    }
    Ok(entries)
}

fn hitchin_morphism_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteEntry>> {
    let k_max = cfg.k_max.or(cfg.suite.default_k_max()).unwrap_or(3);
    let sabotage = HitchinSabotage { flip_koszul: cfg.sabotaged(), ..Default::default() };
    let mut entries = Vec::new();
    for m in model_fixtures(cfg)? {
        let h = build_hitchin_morphism(&m, sabotage)?;
        let check = CheckConfig::new(cfg.suite.id(), k_max, cfg.trials(), cfg.seed);
        entries.extend(verify_hitchin_morphism(&h, &check));
    }
    Ok(entries)
}

fn def_hitchin_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteEntry>> {
    let rings = cfg.rings()?;
    let mut entries = Vec::new();
    for m in model_fixtures(cfg)? {
        let h = build_hitchin_morphism(&m, HitchinSabotage::default())?;
        for ring in &rings {
            entries.extend(verify_def_equals_hitchin(&h, ring, cfg.suite.id(), cfg.trials(), cfg.seed, !cfg.sabotaged())?);
        }
    }
    Ok(entries)
}

fn obstruction_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteEntry>> {
    let sabotage = HitchinSabotage { perturb_theta: cfg.sabotaged(), ..Default::default() };
    let mut entries = Vec::new();
    for m in model_fixtures(cfg)? {
        let h = build_hitchin_morphism(&m, sabotage)?;
        entries.extend(verify_obstruction(&h, cfg.suite.id(), cfg.trials(), cfg.seed)?);
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.id().parse::<Suite>().unwrap(), s);
            assert_eq!(s.anchor().parse::<Suite>().unwrap(), s);
            assert!(!s.negative_controls().is_empty());
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn ring_specs_parse() {
        assert_eq!("(2, 3)".parse::<RingSpec>().unwrap(), RingSpec::new(2, 3));
        assert_eq!("1,4".parse::<RingSpec>().unwrap(), RingSpec::new(1, 4));
        assert!("0,3".parse::<RingSpec>().is_err());
        assert!("1,1".parse::<RingSpec>().is_err());
        assert!("x".parse::<RingSpec>().is_err());
    }

    #[test]
    fn unknown_negative_control_is_a_usage_error() {
        let cfg = SuiteConfig::new(Suite::Lemma, 0).with_negative_control("flip-koszul");
        assert!(matches!(run(&cfg), Err(Error::Parse { .. })));
    }

    #[test]
    fn lemma_suite_and_its_control() {
        let cfg = SuiteConfig::new(Suite::Lemma, 1).with_algebra("sl2").with_trials(10);
        assert!(run(&cfg).unwrap().passed());
        assert!(!run(&cfg.clone().with_negative_control("non-invariant")).unwrap().passed());
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = SuiteConfig::new(Suite::Funny, 3).with_algebra("gl2").with_trials(5);
        assert_eq!(run(&cfg).unwrap().to_json(), run(&cfg).unwrap().to_json());
    }

    #[test]
    fn perturbed_differential_breaks_q_squared() {
        let cfg = SuiteConfig::new(Suite::Codifferential, 0).with_algebra("sl2").with_trials(2).with_k_max(3);
        assert!(run(&cfg).unwrap().passed());
        assert!(!run(&cfg.clone().with_negative_control("perturb-differential")).unwrap().passed());
    }
}
