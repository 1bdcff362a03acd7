//! The registry of known checks and their default grids.

use std::f64::consts::PI;

use crate::error::{ModuliError, Result};
use crate::moduli::{hilbert_reference, ModulusKind};
use crate::norm::Norm;
use crate::search::{first_reaching, Goal};

use super::sampled::FigureQuantity;
use super::{CheckKind, CheckSpec, Sym, SymTerm};

use ModulusKind::*;

/// Inward nudge of grid endpoints, keeping chords non-degenerate.
const NUDGE: f64 = 1e-6;
const DEFAULT_POINTS: usize = 33;
const WEIGHTS: [f64; 3] = [0.25, 0.5, 0.75];

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Sampled {
    Figure(FigureQuantity),
    Convexity,
    QuasiOrthogonality,
    Area,
}

enum Body {
    Syms(fn(&[f64]) -> Vec<Sym>),
    Euclidean,
    PhiPlusLeForm,
    Sampled(Sampled),
}

pub(crate) struct CheckDef {
    pub id: &'static str,
    pub kind: CheckKind,
    range: (f64, f64),
    points: usize,
    /// Tolerance of pointwise checks, independent of the user's slack.
    fixed_slack: Option<f64>,
    body: Body,
}

pub(crate) enum Plan {
    /// Comparisons and the time spent preparing them.
    Syms(Vec<Sym>, u64),
    Skip(String),
    Sampled(Sampled),
}

impl CheckDef {
    pub fn plan(&self, norm: &Norm, grid: &[f64]) -> Plan {
        match &self.body {
            Body::Syms(f) => Plan::Syms(f(grid), 0),
            Body::Euclidean if !norm.is_euclidean() => {
                Plan::Skip("closed forms apply to the Euclidean norm only".into())
            }
            Body::Euclidean => Plan::Syms(euclidean_coincidence(grid), 0),
            Body::PhiPlusLeForm => {
                let t = std::time::Instant::now();
                let syms = phi_plus_le_form(norm, grid);
                Plan::Syms(syms, t.elapsed().as_millis() as u64)
            }
            Body::Sampled(Sampled::Area) if !norm.is_smooth() => {
                Plan::Skip("area additivity is checked on smooth norms only".into())
            }
            Body::Sampled(s) => Plan::Sampled(*s),
        }
    }
}

fn m(kind: ModulusKind, eps: f64) -> SymTerm {
    SymTerm::M { kind, eps, coef: 1.0 }
}

fn mc(coef: f64, kind: ModulusKind, eps: f64) -> SymTerm {
    SymTerm::M { kind, eps, coef }
}

fn c(value: f64, label: &str) -> SymTerm {
    SymTerm::C { value, label: label.to_owned() }
}

fn le(relation: &str, eps: f64, lhs: Vec<SymTerm>, rhs: Vec<SymTerm>) -> Sym {
    Sym { relation: relation.to_owned(), eps, lhs, rhs }
}

/// `a = b` as the pair `a ≤ b`, `b ≤ a`.
fn eq(relation: &str, eps: f64, a: Vec<SymTerm>, b: Vec<SymTerm>) -> [Sym; 2] {
    [le(relation, eps, a.clone(), b.clone()), le(relation, eps, b, a)]
}

/// NaN outside the kind's domain; such comparisons are skipped.
fn h(kind: ModulusKind, eps: f64) -> f64 {
    hilbert_reference(kind, eps).unwrap_or(f64::NAN)
}

fn eq5(grid: &[f64]) -> Vec<Sym> {
    grid.iter()
        .flat_map(|&e| {
            [
                le("0 <= lambda-minus(eps)", e, vec![], vec![m(LambdaMinus, e)]),
                le("lambda-minus(eps) <= lambda-plus(eps)", e, vec![m(LambdaMinus, e)], vec![m(LambdaPlus, e)]),
                le("lambda-plus(eps) <= eps", e, vec![m(LambdaPlus, e)], vec![c(e, "eps")]),
            ]
        })
        .collect()
}

fn eq3(grid: &[f64]) -> Vec<Sym> {
    grid.iter()
        .flat_map(|&e| {
            [
                le("rho(eps/2) <= lambda-plus(eps)", e, vec![m(Rho, e / 2.0)], vec![m(LambdaPlus, e)]),
                le("lambda-plus(eps) <= rho(2eps)", e, vec![m(LambdaPlus, e)], vec![m(Rho, 2.0 * e)]),
            ]
        })
        .collect()
}

fn eq4(grid: &[f64]) -> Vec<Sym> {
    grid.iter()
        .flat_map(|&e| {
            [
                le("delta(eps) <= lambda-minus(eps)", e, vec![m(Delta, e)], vec![m(LambdaMinus, e)]),
                le("lambda-minus(eps) <= delta(2eps)", e, vec![m(LambdaMinus, e)], vec![m(Delta, 2.0 * e)]),
            ]
        })
        .collect()
}

fn phi_lambda(grid: &[f64]) -> Vec<Sym> {
    grid.iter()
        .flat_map(|&e| {
            [
                le("lambda-minus(eps/2) <= phi-minus(eps)", e, vec![m(LambdaMinus, e / 2.0)], vec![m(PhiMinus, e)]),
                le("phi-minus(eps) <= lambda-minus(2eps)", e, vec![m(PhiMinus, e)], vec![m(LambdaMinus, 2.0 * e)]),
                le("lambda-plus(eps/2) <= phi-plus(eps)", e, vec![m(LambdaPlus, e / 2.0)], vec![m(PhiPlus, e)]),
                le("phi-plus(eps) <= lambda-plus(2eps)", e, vec![m(PhiPlus, e)], vec![m(LambdaPlus, 2.0 * e)]),
            ]
        })
        .collect()
}

fn phi_rho_delta(grid: &[f64]) -> Vec<Sym> {
    grid.iter()
        .flat_map(|&e| {
            [
                le("rho(eps/4) <= phi-plus(eps)", e, vec![m(Rho, e / 4.0)], vec![m(PhiPlus, e)]),
                le("phi-plus(eps) <= rho(4eps)", e, vec![m(PhiPlus, e)], vec![m(Rho, 4.0 * e)]),
                le("delta(eps) <= phi-minus(eps)", e, vec![m(Delta, e)], vec![m(PhiMinus, e)]),
                le("phi-minus(eps) <= delta(4eps)", e, vec![m(PhiMinus, e)], vec![m(Delta, 4.0 * e)]),
            ]
        })
        .collect()
}

fn generalized_day_nordlander(grid: &[f64]) -> Vec<Sym> {
    let mut out = Vec::new();
    for &e in grid {
        for t in WEIGHTS {
            let hv = h(DeltaT(t), e);
            out.push(le(&format!("delta-t:{t}(eps) <= hilbert"), e, vec![m(DeltaT(t), e)], vec![c(hv, "hilbert")]));
            out.push(le(&format!("hilbert <= beta-t:{t}(eps)"), e, vec![c(hv, "hilbert")], vec![m(BetaT(t), e)]));
        }
    }
    out
}

fn phi_day_nordlander(grid: &[f64]) -> Vec<Sym> {
    grid.iter()
        .flat_map(|&e| {
            let hv = e * e / 2.0;
            [
                le("phi-minus(eps) <= eps^2/2", e, vec![m(PhiMinus, e)], vec![c(hv, "eps^2/2")]),
                le("eps^2/2 <= phi-plus(eps)", e, vec![c(hv, "eps^2/2")], vec![m(PhiPlus, e)]),
            ]
        })
        .collect()
}

fn zeta_lambda(grid: &[f64]) -> Vec<Sym> {
    let mut out = Vec::new();
    for &e in grid {
        let shrunk = e / (1.0 + e);
        for (lam, zeta, name) in [(LambdaMinus, ZetaMinus, "minus"), (LambdaPlus, ZetaPlus, "plus")] {
            out.push(le(
                &format!("lambda-{name}(eps/(1+eps)) <= zeta-{name}(eps) - 1"),
                e,
                vec![m(lam, shrunk), c(1.0, "1")],
                vec![m(zeta, e)],
            ));
            out.push(le(
                &format!("zeta-{name}(eps) - 1 <= lambda-{name}(eps)"),
                e,
                vec![m(zeta, e)],
                vec![m(lam, e), c(1.0, "1")],
            ));
        }
    }
    out
}

fn zeta_day_nordlander(grid: &[f64]) -> Vec<Sym> {
    grid.iter()
        .flat_map(|&e| {
            let hv = (1.0 + e * e).sqrt();
            [
                le("zeta-minus(eps) <= sqrt(1+eps^2)", e, vec![m(ZetaMinus, e)], vec![c(hv, "sqrt(1+eps^2)")]),
                le("sqrt(1+eps^2) <= zeta-plus(eps)", e, vec![c(hv, "sqrt(1+eps^2)")], vec![m(ZetaPlus, e)]),
            ]
        })
        .collect()
}

fn nondecreasing(kinds: &[ModulusKind], grid: &[f64], cap: impl Fn(ModulusKind) -> f64) -> Vec<Sym> {
    let mut out = Vec::new();
    for &k in kinds {
        let pts: Vec<f64> = grid.iter().copied().filter(|&e| e <= cap(k)).collect();
        for w in pts.windows(2) {
            out.push(le(&format!("{k}(eps_prev) <= {k}(eps)"), w[1], vec![m(k, w[0])], vec![m(k, w[1])]));
        }
    }
    out
}

fn gamma_monotone(grid: &[f64]) -> Vec<Sym> {
    nondecreasing(&[GammaMinus, GammaPlus], grid, |_| f64::INFINITY)
}

fn monotone_kinds(grid: &[f64]) -> Vec<Sym> {
    let kinds = [Delta, Banas, LambdaMinus, LambdaPlus, PhiMinus, PhiPlus, ZetaMinus, ZetaPlus, GammaMinus, GammaPlus];
    nondecreasing(&kinds, grid, |k| match k {
        LambdaMinus | LambdaPlus | ZetaMinus | ZetaPlus => 1.0,
        _ => f64::INFINITY,
    })
}

fn gamma_phi(grid: &[f64]) -> Vec<Sym> {
    let mut out = Vec::new();
    for &e in grid {
        out.push(le("phi-plus(eps) <= gamma-plus(eps)", e, vec![m(PhiPlus, e)], vec![m(GammaPlus, e)]));
        out.push(le("gamma-plus(eps) <= 2 phi-plus(eps)", e, vec![m(GammaPlus, e)], vec![mc(2.0, PhiPlus, e)]));
        if e <= 1.0 {
            let q = e / 4.0;
            out.push(le(
                "2 phi-minus(eps/4) <= gamma-minus(eps/4)",
                e,
                vec![mc(2.0, PhiMinus, q)],
                vec![m(GammaMinus, q)],
            ));
            out.push(le("gamma-minus(eps/4) <= phi-minus(eps)", e, vec![m(GammaMinus, q)], vec![m(PhiMinus, e)]));
        }
    }
    out
}

fn triangle_envelopes(grid: &[f64]) -> Vec<Sym> {
    grid.iter()
        .flat_map(|&e| {
            [
                le("1 <= zeta-minus(eps)", e, vec![c(1.0, "1")], vec![m(ZetaMinus, e)]),
                le("zeta-plus(eps) <= 1 + eps", e, vec![m(ZetaPlus, e)], vec![c(1.0 + e, "1+eps")]),
                le("gamma-plus(eps) <= 2 eps", e, vec![m(GammaPlus, e)], vec![c(2.0 * e, "2eps")]),
                le("d-plus(eps) <= 2", e, vec![m(DPlus, e)], vec![c(2.0, "2")]),
            ]
        })
        .collect()
}

fn euclidean_coincidence(grid: &[f64]) -> Vec<Sym> {
    let mut kinds = ModulusKind::catalogue();
    kinds.retain(|k| !matches!(k, DeltaT(_) | BetaT(_)));
    kinds.extend(WEIGHTS.iter().flat_map(|&t| [DeltaT(t), BetaT(t)]));
    let mut out = Vec::new();
    for &k in &kinds {
        let cap = match k {
            LambdaMinus | LambdaPlus | ZetaMinus | ZetaPlus => 1.0,
            _ => 2.0,
        };
        for &e in grid.iter().filter(|&&e| e <= cap) {
            out.extend(eq(&format!("{k}(eps) = hilbert"), e, vec![m(k, e)], vec![c(h(k, e), "hilbert")]));
            if let Some(p) = k.partner().filter(|_| k.goal() == Goal::Inf) {
                out.extend(eq(&format!("{k}(eps) = {p}(eps)"), e, vec![m(k, e)], vec![m(p, e)]));
            }
        }
    }
    out
}

const LE_FORM_ANGLES: usize = 64;
const LE_FORM_STEPS: usize = 24;

/// φ⁺ over chords of length at most ε, sampled coarsely and independently
/// of the engine, must not exceed the equality-constrained value.
fn phi_plus_le_form(norm: &Norm, grid: &[f64]) -> Vec<Sym> {
    grid.iter()
        .map(|&e| {
            let mut best = 0.0f64;
            for i in 0..LE_FORM_ANGLES {
                let theta = PI * i as f64 / LE_FORM_ANGLES as f64;
                let x = norm.sphere_point(theta);
                let jx = norm.support_set_unchecked(x);
                for side in [1.0, -1.0] {
                    let z_at = |s: f64| norm.sphere_point(theta + side * s);
                    let reach = first_reaching(|s| norm.eval(x - z_at(s)), e, 0.0, PI, 60);
                    for j in 1..=LE_FORM_STEPS {
                        let z = z_at(reach * j as f64 / LE_FORM_STEPS as f64);
                        if norm.eval(x - z) > e {
                            continue;
                        }
                        for p in jx.endpoints() {
                            best = best.max(p.apply(x - z));
                        }
                    }
                }
            }
            le("sup over ||x-z|| <= eps <= phi-plus(eps)", e, vec![c(best, "coarse <=-form")], vec![m(PhiPlus, e)])
        })
        .collect()
}

static CATALOGUE: &[CheckDef] = &[
    CheckDef {
        id: "eq3-rho-lambda-plus",
        kind: CheckKind::Inequality,
        range: (0.0, 0.5),
        points: DEFAULT_POINTS,
        fixed_slack: None,
        body: Body::Syms(eq3),
    },
    CheckDef {
        id: "eq4-delta-lambda-minus",
        kind: CheckKind::Inequality,
        range: (0.0, 1.0),
        points: DEFAULT_POINTS,
        fixed_slack: None,
        body: Body::Syms(eq4),
    },
    CheckDef {
        id: "eq5-lambda-le-eps",
        kind: CheckKind::Inequality,
        range: (0.0, 1.0),
        points: DEFAULT_POINTS,
        fixed_slack: None,
        body: Body::Syms(eq5),
    },
    CheckDef {
        id: "phi-lambda-sandwich",
        kind: CheckKind::Inequality,
        range: (0.0, 0.5),
        points: DEFAULT_POINTS,
        fixed_slack: None,
        body: Body::Syms(phi_lambda),
    },
    CheckDef {
        id: "phi-rho-delta-sandwich",
        kind: CheckKind::Inequality,
        range: (0.0, 0.5),
        points: DEFAULT_POINTS,
        fixed_slack: None,
        body: Body::Syms(phi_rho_delta),
    },
    CheckDef {
        id: "generalized-day-nordlander",
        kind: CheckKind::Inequality,
        range: (0.0, 2.0),
        points: DEFAULT_POINTS,
        fixed_slack: None,
        body: Body::Syms(generalized_day_nordlander),
    },
    CheckDef {
        id: "phi-day-nordlander",
        kind: CheckKind::Inequality,
        range: (0.0, 2.0),
        points: DEFAULT_POINTS,
        fixed_slack: None,
        body: Body::Syms(phi_day_nordlander),
    },
    CheckDef {
        id: "zeta-lambda-sandwich",
        kind: CheckKind::Inequality,
        range: (0.0, 1.0),
        points: DEFAULT_POINTS,
        fixed_slack: None,
        body: Body::Syms(zeta_lambda),
    },
    CheckDef {
        id: "zeta-day-nordlander",
        kind: CheckKind::Inequality,
        range: (0.0, 1.0),
        points: DEFAULT_POINTS,
        fixed_slack: None,
        body: Body::Syms(zeta_day_nordlander),
    },
    CheckDef {
        id: "gamma-monotone",
        kind: CheckKind::Monotonicity,
        range: (0.0, 2.0),
        points: DEFAULT_POINTS,
        fixed_slack: None,
        body: Body::Syms(gamma_monotone),
    },
    CheckDef {
        id: "gamma-phi-sandwich",
        kind: CheckKind::Inequality,
        range: (0.0, 2.0),
        points: DEFAULT_POINTS,
        fixed_slack: None,
        body: Body::Syms(gamma_phi),
    },
    CheckDef {
        id: "triangle-envelopes",
        kind: CheckKind::Inequality,
        range: (0.0, 2.0),
        points: DEFAULT_POINTS,
        fixed_slack: None,
        body: Body::Syms(triangle_envelopes),
    },
    CheckDef {
        id: "monotone-kinds",
        kind: CheckKind::Monotonicity,
        range: (0.0, 2.0),
        points: DEFAULT_POINTS,
        fixed_slack: None,
        body: Body::Syms(monotone_kinds),
    },
    CheckDef {
        id: "euclidean-coincidence",
        kind: CheckKind::Coincidence,
        range: (0.0, 2.0),
        points: DEFAULT_POINTS,
        fixed_slack: None,
        body: Body::Euclidean,
    },
    CheckDef {
        id: "phi-plus-le-form",
        kind: CheckKind::Inequality,
        range: (0.0, 2.0),
        points: 9,
        fixed_slack: None,
        body: Body::PhiPlusLeForm,
    },
    CheckDef {
        id: "projection-bound",
        kind: CheckKind::Inequality,
        range: (0.0, 0.0),
        points: 0,
        fixed_slack: Some(1e-9),
        body: Body::Sampled(Sampled::Figure(FigureQuantity::ProjectionBound)),
    },
    CheckDef {
        id: "cathetus-identity",
        kind: CheckKind::Coincidence,
        range: (0.0, 0.0),
        points: 0,
        fixed_slack: Some(1e-8),
        body: Body::Sampled(Sampled::Figure(FigureQuantity::CathetusIdentity)),
    },
    CheckDef {
        id: "lambda-range",
        kind: CheckKind::Inequality,
        range: (0.0, 0.0),
        points: 0,
        fixed_slack: Some(1e-9),
        body: Body::Sampled(Sampled::Figure(FigureQuantity::LambdaRange)),
    },
    CheckDef {
        id: "lambda-convexity",
        kind: CheckKind::Inequality,
        range: (0.0, 0.0),
        points: 0,
        fixed_slack: Some(1e-8),
        body: Body::Sampled(Sampled::Convexity),
    },
    CheckDef {
        id: "quasi-orthogonality",
        kind: CheckKind::Coincidence,
        range: (0.0, 0.0),
        points: 0,
        fixed_slack: Some(0.0),
        body: Body::Sampled(Sampled::QuasiOrthogonality),
    },
    CheckDef {
        id: "area-additivity",
        kind: CheckKind::AreaAdditivity,
        range: (0.0, 0.0),
        points: 0,
        fixed_slack: Some(0.0),
        body: Body::Sampled(Sampled::Area),
    },
];

const AREA_EPS: [f64; 3] = [0.25, 0.5, 1.0];

pub fn check_ids() -> Vec<&'static str> {
    CATALOGUE.iter().map(|d| d.id).collect()
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints moved inward by 1e−6.
pub fn default_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo + NUDGE, hi - NUDGE);
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (a + b)],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Every registered check over `norms`; modulus checks get `slack`,
/// pointwise checks their own fixed tolerances.
pub fn default_suite(norms: &[Norm], slack: f64) -> Vec<CheckSpec> {
    CATALOGUE
        .iter()
        .map(|d| CheckSpec {
            id: d.id.to_owned(),
            kind: d.kind,
            norms: norms.to_vec(),
            eps_grid: match d.body {
                Body::Sampled(Sampled::Area) => AREA_EPS.to_vec(),
                _ => default_grid(d.range.0, d.range.1, d.points),
            },
            slack: d.fixed_slack.unwrap_or(slack),
        })
        .collect()
}

/// Keeps the checks named in `names`; a name selects its exact id or every
/// id it prefixes up to a `-` (so `eq4` selects `eq4-delta-lambda-minus`).
pub fn select_checks(specs: Vec<CheckSpec>, names: &[&str]) -> Result<Vec<CheckSpec>> {
    let matches = |name: &str, id: &str| id == name || id.strip_prefix(name).is_some_and(|r| r.starts_with('-'));
    for name in names {
        if !CATALOGUE.iter().any(|d| matches(name, d.id)) {
            return Err(ModuliError::Input(format!("unknown check {name:?}; valid ids: {}", check_ids().join(", "))));
        }
    }
    Ok(specs.into_iter().filter(|s| names.iter().any(|n| matches(n, &s.id))).collect())
}

pub(crate) fn validate(spec: &CheckSpec) -> Result<&'static CheckDef> {
    let def = CATALOGUE.iter().find(|d| d.id == spec.id).ok_or_else(|| {
        ModuliError::Input(format!("unknown check {:?}; valid ids: {}", spec.id, check_ids().join(", ")))
    })?;
    if spec.kind != def.kind {
        return Err(ModuliError::Input(format!("check {} has kind {:?}, not {:?}", spec.id, def.kind, spec.kind)));
    }
    if !(spec.slack.is_finite() && spec.slack >= 0.0) {
        return Err(ModuliError::Input(format!("check {}: slack must be finite and ≥ 0", spec.id)));
    }
    if spec.eps_grid.iter().any(|e| !e.is_finite()) || spec.eps_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ModuliError::Input(format!("check {}: eps grid must be finite and strictly increasing", spec.id)));
    }
    Ok(def)
}
