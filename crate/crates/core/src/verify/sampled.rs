//! Checks over random configurations rather than modulus values.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::area::area_additivity_check;
use crate::error::{ModuliError, Result};
use crate::norm::Norm;
use crate::search::{golden_section, Goal};
use crate::triangle::{build_figure, is_quasi_orthogonal, lambda_point, quasi_normals_unchecked, QUASI_ORTHO_TOL};
use crate::vector::Vector2;

use super::catalogue::Sampled;
use super::{CheckSpec, CheckWitness, Outcome, SuiteConfig};

/// Which property of a random triangle figure is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FigureQuantity {
    /// `2‖y1 − x‖ − ‖x − z‖ ≥ 0`.
    ProjectionBound,
    /// `‖y1 − z‖ = <p, x − z>`.
    CathetusIdentity,
    /// `0 ≤ λ ≤ eps`.
    LambdaRange,
}

/// Random pairs for the agreement test stay this far (radians) from the
/// boundary of the quasi-normal cone, where the two criteria are equally
/// ill-conditioned.
const CONE_MARGIN: f64 = 1e-3;
const AREA_REL_TOL: f64 = 0.005;

/// Stable per-(check, norm) stream so results do not depend on scheduling.
fn stream(seed: u64, id: &str, norm_idx: usize) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h ^ (norm_idx as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Unit `x` and a unit `y ⌐ x`, uniformly over angle and cone parameter.
fn random_pair(norm: &Norm, rng: &mut impl Rng) -> (Vector2, Vector2) {
    let x = norm.sphere_point(rng.gen_range(0.0..TAU));
    let cone = quasi_normals_unchecked(norm, x);
    let y = if cone.is_single() { cone.start } else { cone.direction(norm, rng.gen::<f64>()) };
    (x, if rng.gen::<bool>() { -y } else { y })
}

fn figure_margin(norm: &Norm, q: FigureQuantity, fig: &crate::triangle::TriangleFigure) -> f64 {
    match q {
        FigureQuantity::ProjectionBound => fig.projection_margin(norm),
        FigureQuantity::CathetusIdentity => -fig.cathetus_defect(norm).abs(),
        FigureQuantity::LambdaRange => fig.lambda.min(fig.eps - fig.lambda),
    }
}

fn convexity_margin(norm: &Norm, x: Vector2, y: Vector2, e1: f64, e2: f64, t: f64) -> Result<f64> {
    let mid = lambda_point(norm, x, y, t * e1 + (1.0 - t) * e2)?;
    Ok(t * lambda_point(norm, x, y, e1)? + (1.0 - t) * lambda_point(norm, x, y, e2)? - mid)
}

/// `min_λ ‖x + λy‖ ≥ 1` by convex minimization over a wide bracket.
fn sampled_criterion(norm: &Norm, x: Vector2, y: Vector2) -> bool {
    let (_, v) = golden_section(|l| norm.eval(x + l * y), -2.0, 2.0, Goal::Inf, 120);
    v >= 1.0 - QUASI_ORTHO_TOL
}

fn agreement_margin(norm: &Norm, x: Vector2, y: Vector2) -> Result<f64> {
    let fast = is_quasi_orthogonal(norm, y, x, QUASI_ORTHO_TOL)?;
    Ok(if fast == sampled_criterion(norm, x, y) { 0.0 } else { -1.0 })
}

/// Angular distance of `y` (as an undirected line) from the cone boundary.
fn distance_to_cone_boundary(norm: &Norm, x: Vector2, y: Vector2) -> f64 {
    let cone = quasi_normals_unchecked(norm, x);
    let line_gap = |a: Vector2| {
        let d = (y.angle() - a.angle()).rem_euclid(PI);
        d.min(PI - d)
    };
    line_gap(cone.start).min(line_gap(cone.end))
}

fn area_margin(norm: &Norm, eps: f64, samples: usize, reference: bool) -> Result<(f64, crate::area::AreaCheck)> {
    let r = area_additivity_check(norm, eps, samples)?;
    let m = if reference {
        let want = (1.0 + eps * eps) * PI;
        AREA_REL_TOL * want - (r.a3 - want).abs()
    } else {
        AREA_REL_TOL * r.a1 - r.defect.abs()
    };
    Ok((m, r))
}

pub(crate) fn run(
    what: Sampled,
    norm: &Norm,
    spec: &CheckSpec,
    cfg: &SuiteConfig,
    norm_idx: usize,
    outcomes: &mut Vec<Outcome>,
    notes: &mut Vec<String>,
) {
    let mut rng = stream(cfg.seed, &spec.id, norm_idx);
    let allowance = spec.slack;
    let mut push = |margin: f64, witness: CheckWitness| outcomes.push(Outcome { margin, allowance, witness });
    match what {
        Sampled::Figure(q) => {
            for _ in 0..cfg.figure_samples {
                let (x, y) = random_pair(norm, &mut rng);
                let eps = 1.0 - rng.gen::<f64>();
                match build_figure(norm, x, y, eps) {
                    Ok(figure) => push(
                        figure_margin(norm, q, &figure),
                        CheckWitness::Figure { norm: norm.clone(), quantity: q, figure },
                    ),
                    Err(e) => notes.push(format!("{}: figure at x={x:?}, y={y:?} rejected: {e}", norm.label())),
                }
            }
        }
        Sampled::Convexity => {
            for _ in 0..cfg.convexity_samples {
                let (x, y) = random_pair(norm, &mut rng);
                let (a, b): (f64, f64) = (rng.gen(), rng.gen());
                let (eps1, eps2) = (a.min(b), a.max(b));
                let t = rng.gen_range(0.0..1.0);
                match convexity_margin(norm, x, y, eps1, eps2, t) {
                    Ok(m) => push(m, CheckWitness::Convexity { norm: norm.clone(), x, y, eps1, eps2, t }),
                    Err(e) => notes.push(format!("{}: convexity sample rejected: {e}", norm.label())),
                }
            }
        }
        Sampled::QuasiOrthogonality => {
            for i in 0..cfg.figure_samples {
                let (x, y) = if i % 2 == 0 {
                    random_pair(norm, &mut rng)
                } else {
                    loop {
                        let x = norm.sphere_point(rng.gen_range(0.0..TAU));
                        let y = norm.sphere_point(rng.gen_range(0.0..TAU));
                        if distance_to_cone_boundary(norm, x, y) >= CONE_MARGIN {
                            break (x, y);
                        }
                    }
                };
                match agreement_margin(norm, x, y) {
                    Ok(m) => push(m, CheckWitness::QuasiOrthogonality { norm: norm.clone(), x, y }),
                    Err(e) => notes.push(format!("{}: pair rejected: {e}", norm.label())),
                }
            }
        }
        Sampled::Area => {
            for &eps in &spec.eps_grid {
                let refs: &[bool] = if norm.is_euclidean() { &[false, true] } else { &[false] };
                for &reference in refs {
                    match area_margin(norm, eps, cfg.area_samples, reference) {
                        Ok((m, result)) => push(
                            m,
                            CheckWitness::Area {
                                norm: norm.clone(),
                                eps,
                                samples: cfg.area_samples,
                                reference,
                                result,
                            },
                        ),
                        Err(e) => notes.push(format!("{}: area at eps={eps} skipped: {e}", norm.label())),
                    }
                }
            }
        }
    }
}

pub(crate) fn replay(w: &CheckWitness) -> Result<f64> {
    match w {
        CheckWitness::Figure { norm, quantity, figure } => {
            let rebuilt = build_figure(norm, figure.x, figure.y, figure.eps)?;
            Ok(figure_margin(norm, *quantity, &rebuilt))
        }
        CheckWitness::Convexity { norm, x, y, eps1, eps2, t } => convexity_margin(norm, *x, *y, *eps1, *eps2, *t),
        CheckWitness::QuasiOrthogonality { norm, x, y } => agreement_margin(norm, *x, *y),
        CheckWitness::Area { norm, eps, samples, reference, .. } => {
            Ok(area_margin(norm, *eps, *samples, *reference)?.0)
        }
        CheckWitness::Comparison(_) => Err(ModuliError::Input("comparisons replay through the modulus table".into())),
    }
}
