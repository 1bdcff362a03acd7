//! Report-only probes of the open conjectures over random norm families.
//!
//! Per norm, three records: `γ⁻ ≤ ε² ≤ γ⁺`, `d⁻ ≤ ε ≤ d⁺`, and the
//! coincidence `ζ± − 1 = β±` of the hypotenuse and Milman moduli, the last as
//! a pair of opposite inequalities so the worst margin is `−|ζ± − 1 − β±|`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ModuliError, Result};
use crate::moduli::{ModulusConfig, ModulusKind};
use crate::norm::Norm;
use crate::vector::Vector2;

use super::{
    evaluate_syms, register, summarize, CheckKind, CheckRecord, SuiteMeta, Sym, SymTerm, Table, VerificationReport,
    TOOL_VERSION,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeFamily {
    RandomPolygons,
    Lp,
    /// `count` polygons and `max(1, count / 5)` `l_p` norms.
    Mixed,
}

impl std::str::FromStr for ProbeFamily {
    type Err = ModuliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-polygons" | "polygons" => Ok(Self::RandomPolygons),
            "lp" => Ok(Self::Lp),
            "mixed" => Ok(Self::Mixed),
            _ => Err(ModuliError::Input(format!("unknown family {s:?} (random-polygons, lp, mixed)"))),
        }
    }
}

impl std::fmt::Display for ProbeFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::RandomPolygons => "random-polygons",
            Self::Lp => "lp",
            Self::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbePlan {
    pub family: ProbeFamily,
    pub count: usize,
    pub seed: u64,
    pub eps_grid: Vec<f64>,
    pub modulus: ModulusConfig,
    /// Prepend the Euclidean plane, where every probe is an equality.
    pub include_euclidean: bool,
}

impl ProbePlan {
    /// Eight parameters `0.125, 0.25, …, 1` at a grid of 256 angles.
    pub fn new(family: ProbeFamily, count: usize, seed: u64) -> Self {
        Self {
            family,
            count,
            seed,
            eps_grid: (1..=8).map(|i| i as f64 / 8.0).collect(),
            modulus: ModulusConfig::with_grid(256, 4),
            include_euclidean: false,
        }
    }
}

const POLYGON_ATTEMPTS: usize = 100;

/// Symmetric polygon with `2m` vertices, `m ∈ [3, 12]`: one vertex per
/// stratum of the half turn, radii close enough to 1 that most draws are
/// convex. Non-convex draws are redrawn.
fn random_polygon(rng: &mut impl Rng) -> Norm {
    let m = rng.gen_range(3..=12usize);
    let r_min = 1.0 - 0.5 * (1.0 - (PI / m as f64).cos());
    for attempt in 0..POLYGON_ATTEMPTS {
        let half: Vec<Vector2> = (0..m)
            .map(|i| {
                let a = PI * (i as f64 + rng.gen_range(0.1..0.9)) / m as f64;
                Vector2::from_angle(a) * rng.gen_range(r_min..=1.0)
            })
            .collect();
        let vertices = half.iter().copied().chain(half.iter().map(|&v| -v)).collect();
        match Norm::polygon(vertices) {
            Ok(n) => return n,
            Err(e) => log::debug!("polygon draw {attempt} with m={m} rejected: {e}"),
        }
    }
    log::warn!("no convex draw with m={m}; using the regular {}-gon", 2 * m);
    Norm::regular_polygon(2 * m).expect("regular polygon")
}

fn random_lp(rng: &mut impl Rng) -> Norm {
    let p = (rng.gen_range(1.1..=10.0f64) * 1000.0).round() / 1000.0;
    Norm::lp(p).expect("p in [1.1, 10]")
}

fn sample_norms(plan: &ProbePlan) -> Vec<Norm> {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let (polygons, lps) = match plan.family {
        ProbeFamily::RandomPolygons => (plan.count, 0),
        ProbeFamily::Lp => (0, plan.count),
        ProbeFamily::Mixed => (plan.count, (plan.count / 5).max(1)),
    };
    let mut norms = Vec::with_capacity(polygons + lps + 1);
    if plan.include_euclidean {
        norms.push(Norm::euclidean());
    }
    norms.extend((0..polygons).map(|_| random_polygon(&mut rng)));
    norms.extend((0..lps).map(|_| random_lp(&mut rng)));
    norms
}

fn m(kind: ModulusKind, eps: f64) -> SymTerm {
    SymTerm::M { kind, eps, coef: 1.0 }
}

fn c(value: f64, label: &str) -> SymTerm {
    SymTerm::C { value, label: label.into() }
}

fn sym(relation: &str, eps: f64, lhs: Vec<SymTerm>, rhs: Vec<SymTerm>) -> Sym {
    Sym { relation: relation.into(), eps, lhs, rhs }
}

/// The three probes as (id stem, comparisons).
fn probes(grid: &[f64]) -> [(&'static str, Vec<Sym>); 3] {
    use ModulusKind::*;
    let mut gamma = Vec::new();
    let mut dual = Vec::new();
    let mut milman = Vec::new();
    for &e in grid {
        let sq = c(e * e, "eps^2");
        gamma.push(sym("gamma-minus <= eps^2", e, vec![m(GammaMinus, e)], vec![sq.clone()]));
        gamma.push(sym("eps^2 <= gamma-plus", e, vec![sq], vec![m(GammaPlus, e)]));
        dual.push(sym("d-minus <= eps", e, vec![m(DMinus, e)], vec![c(e, "eps")]));
        dual.push(sym("eps <= d-plus", e, vec![c(e, "eps")], vec![m(DPlus, e)]));
        for (z, b, tag) in [(ZetaMinus, MilmanMinus, "minus"), (ZetaPlus, MilmanPlus, "plus")] {
            let one = || c(1.0, "1");
            milman.push(sym(&format!("zeta-{tag} - 1 <= milman-{tag}"), e, vec![m(z, e)], vec![m(b, e), one()]));
            milman.push(sym(&format!("milman-{tag} <= zeta-{tag} - 1"), e, vec![m(b, e), one()], vec![m(z, e)]));
        }
    }
    [("gamma-day-nordlander", gamma), ("dual-distance", dual), ("milman-vs-zeta", milman)]
}

/// Samples the family and reports the worst conjectured margin per probe
/// and norm. Records are report-only and carry no runtimes, so a fixed plan
/// gives a byte-identical report.
pub fn probe_conjectures(plan: &ProbePlan) -> Result<VerificationReport> {
    if plan.count == 0 {
        return Err(ModuliError::Input("probe count must be at least 1".into()));
    }
    plan.modulus.validate()?;
    if let Some(e) = plan.eps_grid.iter().find(|e| !(e.is_finite() && (0.0..=2.0).contains(*e))) {
        return Err(ModuliError::Domain { kind: "probe".into(), eps: *e, domain: "[0, 2]".into() });
    }
    let norms = sample_norms(plan);
    let probes = probes(&plan.eps_grid);
    let mut needs = BTreeMap::new();
    for i in 0..norms.len() {
        for (_, syms) in &probes {
            register(&mut needs, i, syms);
        }
    }
    let table = Table::build(&norms, needs, &plan.modulus);

    let mut checks: Vec<CheckRecord> = Vec::new();
    for (i, norm) in norms.iter().enumerate() {
        for (stem, syms) in &probes {
            let mut outcomes = Vec::new();
            let mut notes = Vec::new();
            evaluate_syms(&table, i, norm, syms, 0.0, &mut outcomes, &mut notes);
            let id = format!("{stem}/{i:03}-{}", norm.label());
            checks.push(summarize(&id, CheckKind::ConjectureProbe, outcomes, notes, true, None));
        }
    }
    checks.sort_by(|a, b| a.id.cmp(&b.id));

    Ok(VerificationReport {
        suite: SuiteMeta {
            seed: plan.seed,
            grid_n: plan.modulus.grid_n,
            refine_rounds: plan.modulus.refinement.rounds,
            tool_version: TOOL_VERSION.to_owned(),
            norms: norms.iter().map(Norm::label).collect(),
            family: Some(format!(
                "{}:{}{}",
                plan.family,
                plan.count,
                if plan.include_euclidean { "+euclidean" } else { "" }
            )),
            eps_grid: Some(plan.eps_grid.clone()),
        },
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Status;

    #[test]
    fn polygons_are_valid_and_sized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = random_polygon(&mut rng);
            let v = n.polygon_vertices().unwrap().len();
            assert!(v % 2 == 0 && (6..=24).contains(&v), "{v}");
        }
    }

    #[test]
    fn family_sizes() {
        let count = |f| sample_norms(&ProbePlan::new(f, 10, 1)).len();
        assert_eq!(count(ProbeFamily::RandomPolygons), 10);
        assert_eq!(count(ProbeFamily::Lp), 10);
        assert_eq!(count(ProbeFamily::Mixed), 12);
    }

    #[test]
    fn euclidean_probes_are_equalities() {
        let mut plan = ProbePlan::new(ProbeFamily::Lp, 1, 5);
        plan.include_euclidean = true;
        plan.eps_grid = vec![0.25, 0.5, 1.0];
        let r = probe_conjectures(&plan).unwrap();
        assert_eq!(r.checks.len(), 6);
        for rec in &r.checks {
            assert_eq!(rec.status, Status::ReportOnly);
            assert!(rec.witness.is_some());
            if rec.id.contains("euclidean") {
                assert!(rec.worst_margin.abs() < 1e-5, "{} {}", rec.id, rec.worst_margin);
            }
        }
    }

    #[test]
    fn rejects_bad_plans() {
        assert!(probe_conjectures(&ProbePlan::new(ProbeFamily::Lp, 0, 1)).is_err());
        let mut plan = ProbePlan::new(ProbeFamily::Lp, 1, 1);
        plan.eps_grid = vec![2.5];
        assert!(probe_conjectures(&plan).is_err());
    }
}
