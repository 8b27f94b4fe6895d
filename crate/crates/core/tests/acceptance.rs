//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hitchin_linf::hitchin::HiggsModel;
use hitchin_linf::suites::{run_all, run_suite, Suite, SuiteConfig, SuiteReport};

type Outcome = Result<(bool, String), String>;

fn suite(cfg: SuiteConfig) -> Result<SuiteReport, String> {
    run_suite(&cfg).map_err(|e| e.to_string())
}

fn summary(r: &SuiteReport) -> String {
    let mut s = format!("{} trials, {} failures", r.trials, r.failures);
    if let Some(c) = &r.first_counterexample {
        s.push_str(&format!("; first counterexample: {c}"));
    }
    s
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = f()?;
    let elapsed = start.elapsed();
    let within = elapsed < limit;
    Ok((ok && within, format!("{detail}; {:.2}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs())))
}

/// Passing run plus a failing run under the suite's negative control.
fn with_control(cfg: SuiteConfig, control: &str) -> Outcome {
    let pass = suite(cfg.clone())?;
    let sabotaged = suite(cfg.with_negative_control(control))?;
    Ok((
        pass.passed() && !sabotaged.passed(),
        format!("{}; negative control {control}: {}", summary(&pass), if sabotaged.passed() { "passed (vacuous!)" } else { "fails as required" }),
    ))
}

fn lemma() -> Outcome {
    timed(Duration::from_secs(10), || {
        let r = suite(SuiteConfig::new(Suite::Lemma, 0).with_trials(100))?;
        Ok((r.passed(), summary(&r)))
    })
}

fn funny() -> Outcome {
    timed(Duration::from_secs(60), || {
        let r = suite(SuiteConfig::new(Suite::Funny, 0).with_trials(100))?;
        let covers_k = r.entries.iter().any(|e| e.k == Some(4));
        Ok((r.passed() && covers_k, summary(&r)))
    })
}

fn factor() -> Outcome {
    timed(Duration::from_secs(60), || {
        let r = suite(SuiteConfig::new(Suite::Factor, 0).with_trials(20).with_k_max(3))?;
        let both_maps = ["factor[L=identity]", "factor[L=ad]"].iter().all(|m| r.entries.iter().any(|e| e.identity == *m));
        Ok((r.passed() && both_maps, summary(&r)))
    })
}

fn taylor() -> Outcome {
    let r = suite(SuiteConfig::new(Suite::Taylor, 0).with_trials(100))?;
    Ok((r.passed(), summary(&r)))
}

fn codifferential() -> Outcome {
    let r = suite(SuiteConfig::new(Suite::Codifferential, 0).with_k_max(5))?;
    let toy = r.entries.iter().any(|e| e.dgla_id.starts_with("toy["));
    let model = r.entries.iter().any(|e| e.dgla_id.starts_with("higgs["));
    let longest = r.entries.iter().filter_map(|e| e.k).max() == Some(5);
    Ok((r.passed() && toy && model && longest, summary(&r)))
}

fn lie1() -> Outcome {
    with_control(SuiteConfig::new(Suite::AdjointMorphism, 0), "flip-sign")
}

fn lie2() -> Outcome {
    let r = suite(SuiteConfig::new(Suite::DefChi, 0).with_trials(50))?;
    let rings = ["Q[t1]/(deg>=2)", "Q[t1]/(deg>=4)", "Q[t1,t2]/(deg>=3)"];
    let covered = rings.iter().all(|ring| r.entries.iter().any(|e| e.degree_profile.as_deref() == Some(*ring)));
    let descent = r.entries.iter().any(|e| e.identity == "gauge-descent");
    Ok((r.passed() && covered && descent, summary(&r)))
}

fn hull() -> Outcome {
    let r = suite(SuiteConfig::new(Suite::Hull, 0).with_trials(50))?;
    let tangent = r.entries.iter().filter(|e| e.identity == "tangent-bijection").count() == 4;
    Ok((r.passed() && tangent, summary(&r)))
}

fn hitchin() -> Outcome {
    let morphism = suite(SuiteConfig::new(Suite::HitchinMorphism, 0).with_k_max(3))?;
    let def = suite(SuiteConfig::new(Suite::DefHitchin, 0))?;
    let mut strata_ok = true;
    for name in HiggsModel::builtin_names() {
        for case in ["[case1]", "[case2]"] {
            strata_ok &= morphism
                .entries
                .iter()
                .any(|e| e.dgla_id.contains(&format!("[{name}]")) && e.identity.ends_with(case) && e.trials > 0);
        }
    }
    let remark = morphism.entries.iter().any(|e| e.dgla_id.contains("[remark_gl2]"))
        && def.entries.iter().any(|e| e.dgla_id.contains("[remark_gl2]"));
    let control = suite(SuiteConfig::new(Suite::HitchinMorphism, 0).with_k_max(3).with_negative_control("flip-koszul"))?;
    Ok((
        morphism.passed() && def.passed() && strata_ok && remark && !control.passed(),
        format!("morphism: {}; def=H: {}; flip-koszul fails: {}", summary(&morphism), summary(&def), !control.passed()),
    ))
}

fn obstruct() -> Outcome {
    let r = suite(SuiteConfig::new(Suite::Obstruction, 0).with_trials(20))?;
    let lifts = r.entries.iter().filter(|e| e.identity == "lift-obstruction->exact").all(|e| e.trials == 20);
    Ok((r.passed() && lifts, summary(&r)))
}

fn determinism() -> Outcome {
    timed(Duration::from_secs(600), || {
        let first = run_all(0, &[]).map_err(|e| e.to_string())?;
        let second = run_all(0, &[]).map_err(|e| e.to_string())?;
        let (a, b) = (first.to_json(), second.to_json());
        Ok((first.passed() && a == b, format!("{} suites, {} JSON bytes, identical: {}", first.suites.len(), a.len(), a == b)))
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Lemma.lemma: L_[X,v] p(v) = 0", lemma),
        ("Cor.funny: polarisation identity, 2 <= k <= d", funny),
        ("Lemma.factor: oracle equals formula", factor),
        ("Eq.taylor: Taylor expansion by polarisations", taylor),
        ("Q^2 = 0 on the toy and Higgs model dglas", codifferential),
        ("Prop.Lie1: morphism conditions, flip-sign control fails", lie1),
        ("Prop.Lie2: Def(h) = chi(v+b) - chi(v), gauge descent", lie2),
        ("Prop.hull: normal form in K, tangent bijection", hull),
        ("Prop.hitchin1/hitchin2: Hitchin morphism and Def = H-shift", hitchin),
        ("Cor.obstruct: obstructions map to exact classes", obstruct),
        ("determinism and runtime of run_all", determinism),
    ];
    let mut failed = 0;
    for (n, (title, check)) in criteria.iter().enumerate() {
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!("criterion {:>2} {}: {title} ({detail})", n + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
