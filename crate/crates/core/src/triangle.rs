//! Quasi-orthogonality and the right-angled triangle construction.
//!
//! For unit `x` and a unit `y` quasi-orthogonal to `x`, the point
//! `y1 = x + eps·y` lies on a supporting line at `x`. Walking from `y1`
//! towards `-x` direction we first touch the sphere at `z = y1 - λ·x`;
//! `λ = λ(x, y, eps)` is the sagitta that the supporting-convexity moduli
//! extremize.

use serde::{Deserialize, Serialize};

use crate::error::{ModuliError, Result};
use crate::norm::{Norm, SupportSet, SPHERE_TOL};
use crate::search::first_reaching;
use crate::vector::{DualVector2, Vector2};

/// Default tolerance on `|<p, y>|` for quasi-orthogonality.
pub const QUASI_ORTHO_TOL: f64 = 1e-9;

/// `g(0) ≤` this counts as "`y1` already on the sphere".
const ON_SPHERE_TOL: f64 = 1e-12;

const LAMBDA_ITERS: usize = 80;

/// Default number of interior directions sampled from a non-degenerate cone.
pub const CONE_INTERIOR_SAMPLES: usize = 17;

fn ensure_unit(norm: &Norm, v: Vector2, what: &str) -> Result<()> {
    v.ensure_finite(what)?;
    let r = norm.eval(v);
    if (r - 1.0).abs() > SPHERE_TOL {
        return Err(ModuliError::Input(format!("{what} = {v:?} is not a unit vector (‖{what}‖ = {r})")));
    }
    Ok(())
}

#[inline]
pub(crate) fn normalize(norm: &Norm, v: Vector2) -> Vector2 {
    v * (1.0 / norm.eval(v))
}

/// `y ⌐ x`: some functional of `J₁(x/‖x‖)` annihilates `y` (within `tol`).
pub fn is_quasi_orthogonal(norm: &Norm, y: Vector2, x: Vector2, tol: f64) -> Result<bool> {
    x.ensure_finite("x")?;
    y.ensure_finite("y")?;
    let r = norm.eval(x);
    if r == 0.0 {
        return Err(ModuliError::Input("quasi-orthogonality to the zero vector is undefined".into()));
    }
    let s = norm.support_set_unchecked(x * (1.0 / r));
    let a = s.minus.apply(y);
    let b = s.plus.apply(y);
    Ok(a * b <= 0.0 || a.abs().min(b.abs()) <= tol)
}

/// Unit directions quasi-orthogonal to a unit `x`: the kernels of the
/// functionals in `J₁(x)`, swept from `start` (kernel of `J₁`'s first
/// endpoint) to `end`. The set is symmetric; negatives are implied.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiNormalCone {
    pub support: SupportSet,
    pub start: Vector2,
    pub end: Vector2,
}

impl QuasiNormalCone {
    pub fn is_single(&self) -> bool {
        self.support.is_single()
    }

    /// Direction at cone parameter `t ∈ [0, 1]`.
    pub fn direction(&self, norm: &Norm, t: f64) -> Vector2 {
        normalize(norm, self.support.at(t).kernel_direction())
    }

    /// Both boundary directions plus `interior` evenly spaced ones
    /// (just `start` for a degenerate cone). Negatives are not included.
    pub fn samples(&self, norm: &Norm, interior: usize) -> Vec<Vector2> {
        if self.is_single() {
            return vec![self.start];
        }
        let n = interior + 1;
        (0..=n)
            .map(|j| match j {
                0 => self.start,
                j if j == n => self.end,
                j => self.direction(norm, j as f64 / n as f64),
            })
            .collect()
    }
}

pub fn quasi_normals(norm: &Norm, x: Vector2) -> Result<QuasiNormalCone> {
    ensure_unit(norm, x, "x")?;
    Ok(quasi_normals_unchecked(norm, x))
}

pub(crate) fn quasi_normals_unchecked(norm: &Norm, x: Vector2) -> QuasiNormalCone {
    let support = norm.support_set_unchecked(x);
    let start = normalize(norm, support.minus.kernel_direction());
    let end = if support.is_single() { start } else { normalize(norm, support.plus.kernel_direction()) };
    QuasiNormalCone { support, start, end }
}

/// `λ(x, y, eps) = min{λ : ‖x + eps·y − λx‖ = 1}`.
pub fn lambda_point(norm: &Norm, x: Vector2, y: Vector2, eps: f64) -> Result<f64> {
    ensure_unit(norm, x, "x")?;
    ensure_unit(norm, y, "y")?;
    if !(0.0..=1.0).contains(&eps) {
        return Err(ModuliError::Domain { kind: "lambda".into(), eps, domain: "[0, 1]".into() });
    }
    let g0 = norm.eval(x + eps * y) - 1.0;
    if g0 < -QUASI_ORTHO_TOL {
        return Err(ModuliError::Precondition(format!("y is not quasi-orthogonal to x: ‖x + eps·y‖ − 1 = {g0:e} < 0")));
    }
    Ok(lambda_unchecked(norm, x, y, eps))
}

/// `g(λ) = ‖y1 − λx‖ − 1` is convex with `g(0) ≥ 0 ≥ g(1)`, so `{g ≤ 0}` is
/// `[λ*, 1]` and bisection on the sign keeps the left end.
#[inline]
pub(crate) fn lambda_unchecked(norm: &Norm, x: Vector2, y: Vector2, eps: f64) -> f64 {
    let y1 = x + eps * y;
    if norm.eval(y1) - 1.0 <= ON_SPHERE_TOL {
        return 0.0;
    }
    first_reaching(|l| 1.0 - norm.eval(y1 - l * x), 0.0, 0.0, 1.0, LAMBDA_ITERS)
}

/// The point configuration of one right-angled triangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleFigure {
    pub x: Vector2,
    pub y: Vector2,
    pub eps: f64,
    /// `x + eps·y`, on the supporting line at `x`.
    pub y1: Vector2,
    /// First sphere point met from `y1` moving along `−x`.
    pub z: Vector2,
    /// Radial projection of `y1` onto the sphere.
    pub d: Vector2,
    /// Projection of `d` along `x` onto the line `{x + τy}`.
    pub y2: Vector2,
    /// Functional of `J₁(x)` annihilating `y`.
    pub p: DualVector2,
    pub lambda: f64,
}

impl TriangleFigure {
    /// `2‖y1 − x‖ − ‖x − z‖`, nonnegative for every valid figure.
    pub fn projection_margin(&self, norm: &Norm) -> f64 {
        2.0 * norm.eval(self.y1 - self.x) - norm.eval(self.x - self.z)
    }

    /// `‖y1 − z‖ − <p, x − z>`; the two are equal.
    pub fn cathetus_defect(&self, norm: &Norm) -> f64 {
        norm.eval(self.y1 - self.z) - self.p.apply(self.x - self.z)
    }
}

/// Functional of `J₁(x)` vanishing on `y`, breaking ties toward `minus`.
fn annihilating_functional(s: &SupportSet, y: Vector2) -> Result<DualVector2> {
    let a = s.minus.apply(y);
    if a.abs() <= QUASI_ORTHO_TOL {
        return Ok(s.minus);
    }
    let b = s.plus.apply(y);
    if b.abs() <= QUASI_ORTHO_TOL {
        return Ok(s.plus);
    }
    if a * b < 0.0 {
        return Ok(s.at(a / (a - b)));
    }
    Err(ModuliError::Precondition(format!("no functional of J₁(x) annihilates y (<p−,y> = {a:e}, <p+,y> = {b:e})")))
}

pub fn build_figure(norm: &Norm, x: Vector2, y: Vector2, eps: f64) -> Result<TriangleFigure> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(ModuliError::Domain { kind: "triangle figure".into(), eps, domain: "(0, 1]".into() });
    }
    let lambda = lambda_point(norm, x, y, eps)?;
    let p = annihilating_functional(&norm.support_set_unchecked(x), y)?;
    let y1 = x + eps * y;
    let z = y1 - lambda * x;
    let d = normalize(norm, y1);
    // x + τy = d + s·x
    let tau = x.cross(d - x) / x.cross(y);
    let y2 = x + tau * y;
    Ok(TriangleFigure { x, y, eps, y1, z, d, y2, p, lambda })
}

/// Margin of the bound `2‖y1 x‖ ≥ ‖x z‖`.
pub fn check_projection_bound(norm: &Norm, fig: &TriangleFigure) -> f64 {
    fig.projection_margin(norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{golden_section, Goal};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

    fn linf() -> Norm {
        Norm::lp(f64::INFINITY).unwrap()
    }

    fn norms() -> Vec<Norm> {
        vec![
            Norm::euclidean(),
            Norm::lp(1.0).unwrap(),
            Norm::lp(1.5).unwrap(),
            Norm::lp(3.0).unwrap(),
            linf(),
            Norm::regular_polygon(6).unwrap(),
            Norm::regular_polygon(8).unwrap(),
        ]
    }

    const E1: Vector2 = Vector2::new(1.0, 0.0);
    const E2: Vector2 = Vector2::new(0.0, 1.0);

    #[test]
    fn quasi_orthogonality_examples() {
        assert!(is_quasi_orthogonal(&Norm::euclidean(), E2, E1, QUASI_ORTHO_TOL).unwrap());
        assert!(is_quasi_orthogonal(&linf(), E2, Vector2::new(1.0, 1.0), QUASI_ORTHO_TOL).unwrap());
        let diag = Vector2::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        assert!(!is_quasi_orthogonal(&Norm::euclidean(), diag, E1, QUASI_ORTHO_TOL).unwrap());
        assert!(is_quasi_orthogonal(&Norm::euclidean(), E2, Vector2::ZERO, 1e-9).is_err());
    }

    #[test]
    fn quasi_normal_examples() {
        let c = quasi_normals(&Norm::euclidean(), E1).unwrap();
        assert!(c.is_single());
        assert!((c.start - E2).euclidean_len() < 1e-15);
        let c = quasi_normals(&Norm::lp(3.0).unwrap(), E1).unwrap();
        assert!(c.is_single() && (c.start - E2).euclidean_len() < 1e-15);
        let c = quasi_normals(&linf(), Vector2::new(1.0, 1.0)).unwrap();
        assert!((c.start - E2).euclidean_len() < 1e-15);
        assert!((c.end - Vector2::new(-1.0, 0.0)).euclidean_len() < 1e-15);
        assert!(quasi_normals(&linf(), Vector2::new(0.5, 0.0)).is_err());
    }

    /// Independent test oracle: `min_λ ‖x + λy‖` by golden section on the
    /// convex function over `[-4, 4]`.
    fn min_along_line(norm: &Norm, x: Vector2, y: Vector2) -> f64 {
        golden_section(|l| norm.eval(x + l * y), -4.0, 4.0, Goal::Inf, 120).1
    }

    #[test]
    fn linf_vertex_cone_matches_brute_force_sweep() {
        // angular sweep: a direction is quasi-orthogonal iff no λ shortens x
        let norm = linf();
        let x = Vector2::new(1.0, 1.0);
        let cone = quasi_normals(&norm, x).unwrap();
        for k in 0..720 {
            let theta = PI * k as f64 / 720.0;
            let y = norm.sphere_point(theta);
            let sweep = min_along_line(&norm, x, y) >= 1.0 - 1e-12;
            // inside the cone from π/2 to π (mod π: includes θ = 0 via (1,0)·−1)
            let in_cone = theta >= PI / 2.0 - 1e-12 || theta == 0.0;
            assert_eq!(sweep, in_cone, "θ = {theta}");
            assert_eq!(is_quasi_orthogonal(&norm, y, x, QUASI_ORTHO_TOL).unwrap(), sweep);
        }
        for t in [0.0, 0.3, 1.0] {
            assert!(min_along_line(&norm, x, cone.direction(&norm, t)) >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn quasi_orthogonality_agrees_with_line_criterion() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for norm in norms() {
            for i in 0..10_000 {
                let x = norm.sphere_point(rng.gen_range(0.0..TAU));
                let cone = quasi_normals(&norm, x).unwrap();
                let base = cone.direction(&norm, rng.gen::<f64>());
                // half exact quasi-normals, half rotated well away from the cone
                let y = if i % 2 == 0 {
                    base
                } else {
                    let lo = cone.start.angle();
                    let hi = lo + (cone.end.angle() - lo).rem_euclid(TAU);
                    normalize(&norm, Vector2::from_angle(hi + rng.gen_range(1e-3..(PI - (hi - lo) - 1e-3))))
                };
                let exact = is_quasi_orthogonal(&norm, y, x, QUASI_ORTHO_TOL).unwrap();
                let sampled = min_along_line(&norm, x, y) >= 1.0 - 1e-9;
                assert_eq!(exact, sampled, "{} x={x:?} y={y:?}", norm.label());
                assert_eq!(exact, i % 2 == 0);
            }
        }
    }

    #[test]
    fn lambda_examples() {
        let l = lambda_point(&Norm::euclidean(), E1, E2, 0.6).unwrap();
        assert!((l - 0.2).abs() < 1e-12);
        assert_eq!(lambda_point(&linf(), E1, E2, 0.5).unwrap(), 0.0);
        let l = lambda_point(&Norm::lp(1.0).unwrap(), E1, E2, 0.3).unwrap();
        // (1 − λ) + 0.3 = 1; cross-check with a plain bisection on the residual
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if (1.0 - m).abs() + 0.3 > 1.0 {
                lo = m
            } else {
                hi = m
            }
        }
        assert!((l - 0.3).abs() < 1e-12 && (l - hi).abs() < 1e-12);
    }

    #[test]
    fn lambda_errors() {
        let diag = Vector2::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        assert!(matches!(lambda_point(&Norm::euclidean(), E1, diag, 0.5), Err(ModuliError::Precondition(_))));
        assert!(matches!(lambda_point(&Norm::euclidean(), E1, E2, 1.5), Err(ModuliError::Domain { .. })));
        assert!(lambda_point(&Norm::euclidean(), E1 * 2.0, E2, 0.5).is_err());
    }

    #[test]
    fn figure_examples() {
        let eu = Norm::euclidean();
        let f = build_figure(&eu, E1, E2, 1.0).unwrap();
        assert_eq!(f.y1, Vector2::new(1.0, 1.0));
        assert!((f.d - Vector2::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)).euclidean_len() < 1e-15);
        // tangential root: g(λ) = √((1−λ)² + 1) − 1 only resolves λ to ~√ulp
        assert!((f.z - E2).euclidean_len() < 1e-7);
        assert!((eu.eval(f.y1 - f.z) - 1.0).abs() < 1e-7);
        assert!(f.cathetus_defect(&eu).abs() < 1e-12);

        let f = build_figure(&linf(), E1, E2, 0.5).unwrap();
        assert_eq!(f.z, f.y1);
        assert_eq!(f.lambda, 0.0);

        let f = build_figure(&eu, E1, E2, 0.6).unwrap();
        assert!((eu.eval(f.y1 - f.z) - 0.2).abs() < 1e-12);
        assert!((f.p.apply(f.x - f.z) - 0.2).abs() < 1e-12);
        // d projected along x onto the line x = 1
        assert!((f.y2 - Vector2::new(1.0, 0.6 / 1.36f64.sqrt())).euclidean_len() < 1e-12);

        assert!(matches!(build_figure(&eu, E1, E2, 1.5), Err(ModuliError::Domain { .. })));
        assert!(matches!(build_figure(&eu, E1, E2, 0.0), Err(ModuliError::Domain { .. })));
    }

    #[test]
    fn projection_bound_examples() {
        let eu = Norm::euclidean();
        let f = build_figure(&eu, E1, E2, 0.6).unwrap();
        // z = (0.8, 0.6) in closed form
        let expected = 1.2 - (0.2f64 * 0.2 + 0.6 * 0.6).sqrt();
        assert!((check_projection_bound(&eu, &f) - expected).abs() < 1e-12);
        let f = build_figure(&linf(), E1, E2, 0.5).unwrap();
        assert!((check_projection_bound(&linf(), &f) - 0.5).abs() < 1e-15);
        // tangency: ‖xz‖ / ‖xy1‖ → 1 as eps → 0
        let f = build_figure(&eu, E1, E2, 1e-4).unwrap();
        let ratio = eu.eval(f.x - f.z) / eu.eval(f.y1 - f.x);
        assert!((ratio - 1.0).abs() < 1e-6);
    }

    #[test]
    fn figure_serializes_with_named_points() {
        let f = build_figure(&Norm::euclidean(), E1, E2, 0.6).unwrap();
        let v = serde_json::to_value(f).unwrap();
        for key in ["x", "y", "eps", "y1", "z", "d", "y2", "p"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }

    fn random_pair(norm: &Norm, rng: &mut impl Rng) -> (Vector2, Vector2) {
        let x = norm.sphere_point(rng.gen_range(0.0..TAU));
        let cone = quasi_normals_unchecked(norm, x);
        let y = cone.direction(norm, rng.gen::<f64>());
        (x, if rng.gen::<bool>() { y } else { -y })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]
        #[test]
        fn figure_invariants(idx in 0usize..7, seed in any::<u64>(), eps in 1e-6f64..=1.0) {
            let norm = &norms()[idx];
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (x, y) = random_pair(norm, &mut rng);
            let f = build_figure(norm, x, y, eps).unwrap();
            prop_assert!(f.lambda >= 0.0 && f.lambda <= eps + 1e-15);
            prop_assert!((norm.eval(f.z) - 1.0).abs() < 1e-9);
            prop_assert!((norm.eval(f.d) - 1.0).abs() < 1e-12);
            prop_assert!(f.p.apply(f.y).abs() < 1e-9 && (f.p.apply(f.x) - 1.0).abs() < 1e-9);
            prop_assert!(f.cathetus_defect(norm).abs() < 1e-8);
            prop_assert!(f.projection_margin(norm) >= -1e-9);
        }

        #[test]
        fn lambda_is_convex_in_eps(idx in 0usize..7, seed in any::<u64>(),
                                   e1 in 0.0f64..=1.0, e2 in 0.0f64..=1.0, t in 0.0f64..=1.0) {
            let norm = &norms()[idx];
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (x, y) = random_pair(norm, &mut rng);
            let l = |e: f64| lambda_point(norm, x, y, e).unwrap();
            let mid = l(t * e1 + (1.0 - t) * e2);
            prop_assert!(mid <= t * l(e1) + (1.0 - t) * l(e2) + 1e-8);
        }
    }
}
