//! Acceptance criteria 1–8, one PASS/FAIL line each. Runs without the test
//! harness so the lines come out in order; exits non-zero on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use moduli::area::area_additivity_check;
use moduli::moduli::{modulus, modulus_curve, ModulusConfig, ModulusKind};
use moduli::norm::Norm;
use moduli::verify::{
    default_suite, probe_conjectures, run_suite, select_checks, CheckRecord, ProbeFamily, ProbePlan, Status,
    SuiteConfig, VerificationReport,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn hilbert_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 * 0.05).collect()
}

fn seven_norms() -> Vec<Norm> {
    vec![
        Norm::euclidean(),
        Norm::lp(1.0).unwrap(),
        Norm::lp(1.5).unwrap(),
        Norm::lp(3.0).unwrap(),
        Norm::lp(f64::INFINITY).unwrap(),
        Norm::regular_polygon(6).unwrap(),
        Norm::regular_polygon(8).unwrap(),
    ]
}

fn criterion_1() -> Verdict {
    use ModulusKind::*;
    let start = Instant::now();
    let cfg = ModulusConfig::with_grid(1024, 6);
    let e = Norm::euclidean();
    let lam = |x: f64| 1.0 - (1.0 - x * x).sqrt();
    type ClosedForm = Box<dyn Fn(f64) -> f64>;
    let mut cases: Vec<(ModulusKind, ClosedForm)> = vec![
        (LambdaMinus, Box::new(lam)),
        (LambdaPlus, Box::new(lam)),
        (PhiMinus, Box::new(|x| x * x / 2.0)),
        (PhiPlus, Box::new(|x| x * x / 2.0)),
        (ZetaMinus, Box::new(|x| (1.0 + x * x).sqrt())),
        (ZetaPlus, Box::new(|x| (1.0 + x * x).sqrt())),
        (GammaMinus, Box::new(|x| x * x)),
        (GammaPlus, Box::new(|x| x * x)),
        (DMinus, Box::new(|x| x)),
        (DPlus, Box::new(|x| x)),
    ];
    for t in [0.25, 0.5, 0.75] {
        cases.push((DeltaT(t), Box::new(move |x| 1.0 - (1.0 - t * (1.0 - t) * x * x).sqrt())));
    }
    let mut worst = (0.0f64, String::new());
    for (kind, closed) in &cases {
        let curve = match modulus_curve(&e, *kind, &hilbert_grid(), &cfg) {
            Ok(c) => c,
            Err(err) => return verdict(false, format!("{kind}: {err}")),
        };
        for s in &curve.samples {
            let err = (s.value - closed(s.eps)).abs();
            if err > worst.0 {
                worst = (err, format!("{kind} at eps={}", s.eps));
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst.0 <= 1e-4 && elapsed <= Duration::from_secs(60),
        format!("max abs error {:.2e} ({}), {:.1} s", worst.0, worst.1, elapsed.as_secs_f64()),
    )
}

fn failing(r: &VerificationReport) -> Vec<&CheckRecord> {
    r.checks.iter().filter(|c| c.status == Status::Fail).collect()
}

fn summary(recs: &[&CheckRecord]) -> String {
    recs.iter().map(|c| format!("{} (margin {:.3e})", c.id, c.worst_margin)).collect::<Vec<_>>().join(", ")
}

const MODULUS_CHECKS: &[&str] = &[
    "eq3",
    "eq4",
    "eq5",
    "phi-lambda-sandwich",
    "phi-rho-delta-sandwich",
    "generalized-day-nordlander",
    "phi-day-nordlander",
    "zeta-lambda-sandwich",
    "zeta-day-nordlander",
    "gamma-monotone",
    "gamma-phi-sandwich",
    "triangle-envelopes",
    "monotone-kinds",
    "euclidean-coincidence",
    "phi-plus-le-form",
];

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let specs = select_checks(default_suite(&seven_norms(), 1e-3), MODULUS_CHECKS).expect("known ids");
    let report = match run_suite(&specs, &SuiteConfig::default()) {
        Ok(r) => r,
        Err(e) => return verdict(false, e.to_string()),
    };
    let elapsed = start.elapsed();
    let fails = failing(&report);
    let worst = report.checks.iter().map(|c| c.worst_margin).fold(f64::INFINITY, f64::min);
    verdict(
        fails.is_empty() && elapsed <= Duration::from_secs(600),
        if fails.is_empty() {
            format!("{} checks, worst margin {worst:.3e}, {:.1} s", report.checks.len(), elapsed.as_secs_f64())
        } else {
            format!("failures: {}", summary(&fails))
        },
    )
}

/// Criteria 3, 4 and 8 share a run of the sampled checks.
fn sampled_checks() -> Result<VerificationReport, String> {
    let specs = select_checks(
        default_suite(&seven_norms(), 1e-3),
        &["projection-bound", "cathetus-identity", "lambda-convexity"],
    )
    .map_err(|e| e.to_string())?;
    run_suite(&specs, &SuiteConfig::default()).map_err(|e| e.to_string())
}

fn sampled_criterion(report: &Result<VerificationReport, String>, id: &str, tol: f64) -> Verdict {
    let r = match report {
        Ok(r) => r,
        Err(e) => return verdict(false, e.clone()),
    };
    let c = r.checks.iter().find(|c| c.id == id).expect("selected");
    verdict(
        c.status == Status::Pass && c.worst_margin >= -tol && c.notes.is_empty(),
        format!(
            "worst margin {:.3e} over {} norms{}",
            c.worst_margin,
            r.suite.norms.len(),
            if c.notes.is_empty() { "" } else { ", with rejected samples" }
        ),
    )
}

fn criterion_5() -> Verdict {
    let mut worst = f64::INFINITY;
    for norm in [Norm::euclidean(), Norm::lp(3.0).unwrap()] {
        for eps in [0.25, 0.5, 1.0] {
            let r = match area_additivity_check(&norm, eps, 4096) {
                Ok(r) => r,
                Err(e) => return verdict(false, e.to_string()),
            };
            worst = worst.min(0.005 * r.a1 - r.defect.abs());
            if norm.is_euclidean() {
                let want = (1.0 + eps * eps) * std::f64::consts::PI;
                worst = worst.min(0.005 * want - (r.a3 - want).abs());
            }
        }
    }
    verdict(worst >= 0.0, format!("smallest headroom to the 0.5% bound {worst:.3e}"))
}

fn criterion_6() -> Verdict {
    use ModulusKind::*;
    let cfg = ModulusConfig::default();
    let sq = Norm::lp(f64::INFINITY).unwrap();
    let mut worst = (0.0f64, String::new());
    let mut check = |norm: &Norm, kind: ModulusKind, eps: f64, want: f64| match modulus(norm, kind, eps, &cfg) {
        Ok(s) => {
            let err = (s.value - want).abs();
            if err > worst.0 || err.is_nan() {
                worst = (err, format!("{kind} at eps={eps}"));
            }
        }
        Err(e) => worst = (f64::INFINITY, format!("{kind} at eps={eps}: {e}")),
    };
    for i in 1..=8 {
        let eps = i as f64 / 8.0;
        check(&sq, LambdaMinus, eps, 0.0);
        check(&sq, ZetaMinus, eps, 1.0);
        check(&sq, PhiMinus, eps, 0.0);
    }
    for i in 1..=16 {
        check(&sq, Delta, i as f64 / 8.0, 0.0);
    }
    let e = Norm::euclidean();
    for eps in hilbert_grid() {
        let delta = match modulus(&e, Delta, eps, &cfg) {
            Ok(s) => s.value,
            Err(err) => return verdict(false, err.to_string()),
        };
        check(&e, Banas, eps, delta);
    }
    verdict(
        worst.0 <= 1e-6,
        format!(
            "max deviation {:.2e}{}",
            worst.0,
            if worst.1.is_empty() { String::new() } else { format!(" ({})", worst.1) }
        ),
    )
}

fn criterion_7() -> Verdict {
    let plan = ProbePlan::new(ProbeFamily::Mixed, 50, 42);
    let run = || probe_conjectures(&plan).and_then(|r| r.to_json().map(|j| (r, j)));
    let (first, second) = match (run(), run()) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return verdict(false, e.to_string()),
    };
    let identical = first.1 == second.1;
    let report = first.0;
    let report_only = report.checks.iter().all(|c| c.status == Status::ReportOnly);
    let worst = |stem: &str| {
        report.checks.iter().filter(|c| c.id.starts_with(stem)).map(|c| c.worst_margin).fold(f64::INFINITY, f64::min)
    };
    verdict(
        identical && report_only && report.suite.norms.len() == 60,
        format!(
            "{} norms, byte-identical: {identical}; observed worst margins: gamma {:.2e}, dual distance {:.2e}, milman {:.2e}",
            report.suite.norms.len(),
            worst("gamma-day-nordlander/"),
            worst("dual-distance/"),
            worst("milman-vs-zeta/"),
        ),
    )
}

fn main() -> ExitCode {
    let mut all = true;
    let mut report = |n: usize, v: Verdict| {
        all &= v.pass;
        println!("criterion {n}: {} — {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    };
    report(1, criterion_1());
    report(2, criterion_2());
    let sampled = sampled_checks();
    report(3, sampled_criterion(&sampled, "projection-bound", 1e-9));
    report(4, sampled_criterion(&sampled, "cathetus-identity", 1e-8));
    report(5, criterion_5());
    report(6, criterion_6());
    report(7, criterion_7());
    report(8, sampled_criterion(&sampled, "lambda-convexity", 1e-8));
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
