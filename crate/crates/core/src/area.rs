//! Area additivity of the sphere and its ε-scaled tangent indicatrix.
//!
//! With `f¹(τ)` the unit sphere and `f²(τ) = ε·t(τ)`, where `t(τ)` is the unit
//! direction of the supporting line at `f¹(τ)` (turned counterclockwise from
//! the support functional), the curve `f¹ + f²` encloses the sum of the two
//! areas. Only smooth norms have a well-defined tangent at every point.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{ModuliError, Result};
use crate::norm::Norm;
use crate::triangle::normalize;
use crate::vector::Vector2;

pub const MIN_AREA_SAMPLES: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaCheck {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    /// `a3 − (a1 + a2)`.
    pub defect: f64,
}

/// Signed area of a closed polygon (counterclockwise positive).
pub fn shoelace(points: &[Vector2]) -> f64 {
    let n = points.len();
    0.5 * (0..n).map(|i| points[i].cross(points[(i + 1) % n])).sum::<f64>()
}

pub fn area_additivity_check(norm: &Norm, eps: f64, samples: usize) -> Result<AreaCheck> {
    if !norm.is_smooth() {
        return Err(ModuliError::Unsupported(format!(
            "area additivity needs a smooth norm, {} has corners",
            norm.label()
        )));
    }
    if samples < MIN_AREA_SAMPLES {
        return Err(ModuliError::Input(format!("need at least {MIN_AREA_SAMPLES} samples, got {samples}")));
    }
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(ModuliError::Domain { kind: "area".into(), eps, domain: "[0, ∞)".into() });
    }
    let mut f1 = Vec::with_capacity(samples);
    let mut f2 = Vec::with_capacity(samples);
    for i in 0..samples {
        let x = norm.sphere_point(TAU * i as f64 / samples as f64);
        let tangent = normalize(norm, norm.support_set_unchecked(x).minus.kernel_direction());
        f1.push(x);
        f2.push(tangent * eps);
    }
    let f3: Vec<Vector2> = f1.iter().zip(&f2).map(|(a, b)| *a + *b).collect();
    let (a1, a2, a3) = (shoelace(&f1), shoelace(&f2), shoelace(&f3));
    Ok(AreaCheck { a1, a2, a3, defect: a3 - (a1 + a2) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_square_area() {
        let sq = [Vector2::new(0.0, 0.0), Vector2::new(1.0, 0.0), Vector2::new(1.0, 1.0), Vector2::new(0.0, 1.0)];
        assert_eq!(shoelace(&sq), 1.0);
    }

    #[test]
    fn euclidean_circles() {
        let r = area_additivity_check(&Norm::euclidean(), 0.5, 4096).unwrap();
        assert!((r.a1 - PI).abs() < 0.005 * PI);
        assert!((r.a2 - PI / 4.0).abs() < 0.005 * PI);
        assert!((r.a3 - 1.25 * PI).abs() < 0.005 * 1.25 * PI);
        assert!(r.defect.abs() <= 0.005 * r.a1);
    }

    #[test]
    fn lp3_is_additive_and_homothetic() {
        let r = area_additivity_check(&Norm::lp(3.0).unwrap(), 0.5, 4096).unwrap();
        assert!(r.defect.abs() <= 0.005 * r.a1, "{r:?}");
        assert!((r.a2 - 0.25 * r.a1).abs() <= 1e-3 * r.a1, "{r:?}");
    }

    #[test]
    fn zero_eps_is_exact() {
        let r = area_additivity_check(&Norm::lp(1.7).unwrap(), 0.0, 2048).unwrap();
        assert_eq!(r.a2, 0.0);
        assert_eq!(r.defect, 0.0);
    }

    #[test]
    fn rejects_polygons_and_coarse_sampling() {
        let hex = Norm::regular_polygon(6).unwrap();
        assert!(matches!(area_additivity_check(&hex, 0.5, 4096), Err(ModuliError::Unsupported(_))));
        assert!(matches!(area_additivity_check(&Norm::euclidean(), 0.5, 100), Err(ModuliError::Input(_))));
    }
}
