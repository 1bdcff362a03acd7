//! Deterministic grid-and-refine extremization plus the one-dimensional
//! helpers (bracketed bisection, golden section) used by the moduli.
//!
//! [`extremize`] scans a tensor grid over a box of parameters, keeps the best
//! `keep` grid points, and refines each by re-gridding a shrinking cell
//! around it (`factor` subdivisions per axis per round). The result carries a
//! discretization estimate: final cell diameter times the local slope seen
//! next to the optimum.

use serde::{Deserialize, Serialize};

use crate::error::{ModuliError, Result};

/// Direction of optimization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Goal {
    Inf,
    Sup,
}

impl Goal {
    /// `a` is strictly better than `b`.
    #[inline]
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Goal::Inf => a < b,
            Goal::Sup => a > b,
        }
    }

    #[inline]
    pub fn pick(self, a: f64, b: f64) -> f64 {
        if self.better(b, a) {
            b
        } else {
            a
        }
    }

    /// Identity element of [`Goal::pick`].
    #[inline]
    pub fn worst(self) -> f64 {
        match self {
            Goal::Inf => f64::INFINITY,
            Goal::Sup => f64::NEG_INFINITY,
        }
    }

    pub fn flip(self) -> Goal {
        match self {
            Goal::Inf => Goal::Sup,
            Goal::Sup => Goal::Inf,
        }
    }
}

/// One parameter of the search box.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    /// Uniform grid points on this axis.
    pub points: usize,
    /// Periodic axes wrap (`hi` is identified with `lo`) and are never clamped.
    pub periodic: bool,
    /// Extra grid values, e.g. angles of polygon corners.
    pub seeds: Vec<f64>,
}

impl Axis {
    pub fn periodic(lo: f64, hi: f64, points: usize) -> Self {
        Self { lo, hi, points, periodic: true, seeds: Vec::new() }
    }

    pub fn closed(lo: f64, hi: f64, points: usize) -> Self {
        Self { lo, hi, points, periodic: false, seeds: Vec::new() }
    }

    pub fn with_seeds(mut self, seeds: impl IntoIterator<Item = f64>) -> Self {
        self.seeds.extend(seeds);
        self
    }

    fn spacing(&self) -> f64 {
        let span = self.hi - self.lo;
        match (self.periodic, self.points) {
            (true, n) => span / n as f64,
            (false, 0 | 1) => span,
            (false, n) => span / (n - 1) as f64,
        }
    }

    fn grid(&self) -> Vec<f64> {
        let span = self.hi - self.lo;
        let n = self.points.max(1);
        let mut g: Vec<f64> = if self.periodic {
            (0..n).map(|i| self.lo + span * i as f64 / n as f64).collect()
        } else if n == 1 {
            vec![0.5 * (self.lo + self.hi)]
        } else {
            (0..n).map(|i| self.lo + span * i as f64 / (n - 1) as f64).collect()
        };
        for &s in &self.seeds {
            let s = if self.periodic && span > 0.0 { self.lo + (s - self.lo).rem_euclid(span) } else { s };
            if s >= self.lo && s <= self.hi && s.is_finite() {
                g.push(s);
            }
        }
        g.sort_by(f64::total_cmp);
        g.dedup();
        g
    }

    fn admits(&self, v: f64) -> bool {
        self.periodic || (v >= self.lo && v <= self.hi)
    }
}

/// Refinement schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refinement {
    pub rounds: usize,
    /// Cells retained between rounds.
    pub keep: usize,
    /// Subdivision factor per axis per round.
    pub factor: usize,
}

impl Default for Refinement {
    fn default() -> Self {
        Self { rounds: 6, keep: 8, factor: 4 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub argument: Vec<f64>,
    /// Final cell diameter × local Lipschitz estimate.
    pub tol_estimate: f64,
    pub evaluations: usize,
}

/// Best-`k` pool; ties keep the earlier entry so results never depend on
/// anything but evaluation order.
struct Pool {
    goal: Goal,
    cap: usize,
    items: Vec<(f64, Vec<f64>)>,
}

impl Pool {
    fn new(goal: Goal, cap: usize) -> Self {
        Self { goal, cap: cap.max(1), items: Vec::with_capacity(cap + 1) }
    }

    fn offer(&mut self, value: f64, point: &[f64]) {
        if value.is_nan() {
            return;
        }
        if self.items.len() == self.cap && !self.goal.better(value, self.items[self.cap - 1].0) {
            return;
        }
        if self.items.iter().any(|(_, p)| p.as_slice() == point) {
            return;
        }
        let pos = self.items.iter().position(|(v, _)| self.goal.better(value, *v)).unwrap_or(self.items.len());
        self.items.insert(pos, (value, point.to_vec()));
        self.items.truncate(self.cap);
    }
}

/// Grid scan plus recursive cell refinement. `objective` returns `None` at
/// infeasible parameters.
pub fn extremize<F>(objective: F, axes: &[Axis], goal: Goal, refinement: &Refinement) -> Result<Extremum>
where
    F: Fn(&[f64]) -> Option<f64>,
{
    if axes.is_empty() {
        return objective(&[])
            .map(|value| Extremum { value, argument: Vec::new(), tol_estimate: 0.0, evaluations: 1 })
            .ok_or_else(|| ModuliError::Infeasible("objective undefined on the empty box".into()));
    }
    let dims = axes.len();
    let grids: Vec<Vec<f64>> = axes.iter().map(Axis::grid).collect();
    let mut widths: Vec<f64> = axes.iter().map(Axis::spacing).collect();
    let mut evaluations = 0usize;
    let mut pool = Pool::new(goal, refinement.keep);

    let mut idx = vec![0usize; dims];
    let mut point: Vec<f64> = grids.iter().map(|g| g[0]).collect();
    'scan: loop {
        evaluations += 1;
        if let Some(v) = objective(&point) {
            pool.offer(v, &point);
        }
        // odometer increment
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < grids[d].len() {
                point[d] = grids[d][idx[d]];
                break;
            }
            idx[d] = 0;
            point[d] = grids[d][0];
            d += 1;
            if d == dims {
                break 'scan;
            }
        }
    }
    if pool.items.is_empty() {
        return Err(ModuliError::Infeasible("no feasible grid point".into()));
    }

    let factor = refinement.factor.max(2);
    let half = (factor / 2) as i64;
    let stencil = (2 * half + 1) as usize;
    for _ in 0..refinement.rounds {
        let steps: Vec<f64> = widths.iter().map(|w| w / factor as f64).collect();
        let centers: Vec<Vec<f64>> = pool.items.iter().map(|(_, p)| p.clone()).collect();
        for c in &centers {
            let total = stencil.pow(dims as u32);
            for code in 0..total {
                let mut rem = code;
                let mut at_center = true;
                let mut ok = true;
                for d in 0..dims {
                    let j = (rem % stencil) as i64 - half;
                    rem /= stencil;
                    at_center &= j == 0;
                    point[d] = c[d] + j as f64 * steps[d];
                    ok &= axes[d].admits(point[d]);
                }
                if at_center || !ok {
                    continue;
                }
                evaluations += 1;
                if let Some(v) = objective(&point) {
                    pool.offer(v, &point);
                }
            }
        }
        widths = steps;
    }

    let (mut value, mut argument) = pool.items[0].clone();
    // Local slope next to the optimum. A side whose difference does not
    // shrink when the probe distance is halved is a jump, not a slope: the
    // extremum there is attained and no discretization error comes from it.
    let mut slope: f64 = 0.0;
    let mut probe = argument.clone();
    let mut improved: Option<(f64, Vec<f64>)> = None;
    for d in 0..dims {
        if widths[d] == 0.0 {
            continue;
        }
        for sign in [-1.0, 1.0] {
            let mut diff = |frac: f64, evaluations: &mut usize| {
                probe.copy_from_slice(&argument);
                probe[d] += sign * frac * widths[d];
                if !axes[d].admits(probe[d]) {
                    return None;
                }
                *evaluations += 1;
                let v = objective(&probe)?;
                let current = improved.as_ref().map_or(value, |(bv, _)| *bv);
                if goal.better(v, current) {
                    improved = Some((v, probe.clone()));
                }
                Some((v - value).abs())
            };
            let Some(full) = diff(1.0, &mut evaluations) else { continue };
            let Some(half) = diff(0.5, &mut evaluations) else { continue };
            if full > JUMP_FLOOR && half > JUMP_RATIO * full {
                continue;
            }
            slope = slope.max(full / widths[d]);
        }
    }
    if let Some((v, p)) = improved {
        value = v;
        argument = p;
    }
    let diameter = widths.iter().map(|w| w * w).sum::<f64>().sqrt();
    Ok(Extremum { value, argument, tol_estimate: slope * diameter, evaluations })
}

/// Smallest `s ∈ [lo, hi]` with `f(s) ≥ target`, for nondecreasing `f`.
///
/// Keeps `f(lo) < target ≤ f(hi)` and returns `hi`; if the bracket is
/// already violated at an end, that end is returned.
pub fn first_reaching<F: Fn(f64) -> f64>(f: F, target: f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    if f(lo) >= target {
        return lo;
    }
    if f(hi) < target {
        return hi;
    }
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Largest `s ∈ [lo, hi]` with `f(s) ≤ target`, for nondecreasing `f`.
pub fn last_within<F: Fn(f64) -> f64>(f: F, target: f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    if f(hi) <= target {
        return hi;
    }
    if f(lo) > target {
        return lo;
    }
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `|f(c ± w/2) − f(c)| / |f(c ± w) − f(c)|` above this marks a jump.
const JUMP_RATIO: f64 = 0.75;
/// Differences below this are rounding noise, never jumps.
const JUMP_FLOOR: f64 = 1e-9;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a unimodal `f` on `[a, b]`; the endpoints are
/// always compared as well. Returns `(argument, value)`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, goal: Goal, iters: usize) -> (f64, f64) {
    let fa = f(a);
    let fb = f(b);
    let (mut best_x, mut best_v) = if goal.better(fb, fa) { (b, fb) } else { (a, fa) };
    if b <= a {
        return (best_x, best_v);
    }
    // minimize g = ±f
    let sign = if goal == Goal::Inf { 1.0 } else { -1.0 };
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if sign * f1 <= sign * f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if goal.better(v, best_v) {
            best_x = x;
            best_v = v;
        }
    }
    (best_x, best_v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn constant_objective_has_zero_tolerance() {
        let e = extremize(|_| Some(3.5), &[Axis::periodic(0.0, TAU, 64)], Goal::Sup, &Refinement::default()).unwrap();
        assert_eq!(e.value, 3.5);
        assert_eq!(e.tol_estimate, 0.0);
    }

    #[test]
    fn finds_smooth_maximum() {
        let f = |p: &[f64]| Some((p[0] - 1.234).cos());
        let e = extremize(f, &[Axis::periodic(0.0, TAU, 64)], Goal::Sup, &Refinement::default()).unwrap();
        assert!((e.argument[0] - 1.234).abs() < 1e-4);
        assert!((e.value - 1.0).abs() < 1e-9);
        assert!(e.tol_estimate < 1e-4);
    }

    #[test]
    fn finds_kink_minimum_in_two_dims() {
        let f = |p: &[f64]| Some((p[0] - 0.3).abs() + 2.0 * (p[1] + 0.7).abs());
        let axes = [Axis::closed(-1.0, 1.0, 65), Axis::closed(-1.0, 1.0, 65)];
        let e = extremize(f, &axes, Goal::Inf, &Refinement::default()).unwrap();
        assert!(e.value < 1e-4, "{e:?}");
        assert!(e.tol_estimate >= e.value);
    }

    #[test]
    fn isolated_attained_spike_does_not_inflate_tolerance() {
        let f = |p: &[f64]| Some(if p[0] == 0.3 { 2.0 } else { p[0] });
        let axis = Axis::closed(0.0, 1.0, 64).with_seeds([0.3]);
        let e = extremize(f, &[axis], Goal::Sup, &Refinement::default()).unwrap();
        assert_eq!(e.value, 2.0);
        assert!(e.tol_estimate < 1e-3, "{e:?}");
    }

    #[test]
    fn infeasible_everywhere_is_an_error() {
        let r = extremize(|_| None, &[Axis::closed(0.0, 1.0, 64)], Goal::Inf, &Refinement::default());
        assert!(matches!(r, Err(ModuliError::Infeasible(_))));
    }

    #[test]
    fn seeds_hit_narrow_spikes() {
        let f = |p: &[f64]| Some(if (p[0] - 0.123456).abs() < 1e-12 { 1.0 } else { 0.0 });
        let axis = Axis::closed(0.0, 1.0, 64).with_seeds([0.123456]);
        let e = extremize(f, &[axis], Goal::Sup, &Refinement::default()).unwrap();
        assert_eq!(e.value, 1.0);
    }

    #[test]
    fn deterministic() {
        let f = |p: &[f64]| Some((3.0 * p[0]).sin() * p[1].cos());
        let axes = [Axis::periodic(0.0, PI, 64), Axis::periodic(0.0, PI, 64)];
        let a = extremize(f, &axes, Goal::Sup, &Refinement::default()).unwrap();
        let b = extremize(f, &axes, Goal::Sup, &Refinement::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bisection_brackets() {
        // flat piece on [1, 2] at level 1
        let f = |s: f64| {
            if s < 1.0 {
                s
            } else if s <= 2.0 {
                1.0
            } else {
                s - 1.0
            }
        };
        let a = first_reaching(f, 1.0, 0.0, 3.0, 80);
        let b = last_within(f, 1.0, 0.0, 3.0, 80);
        assert!((a - 1.0).abs() < 1e-12);
        assert!((b - 2.0).abs() < 1e-12);
        assert_eq!(first_reaching(f, -1.0, 0.0, 3.0, 80), 0.0);
        assert_eq!(last_within(f, 5.0, 0.0, 3.0, 80), 3.0);
    }

    #[test]
    fn golden_section_unimodal() {
        let (x, v) = golden_section(|t| (t - 0.7).powi(2), 0.0, 1.0, Goal::Inf, 80);
        assert!((x - 0.7).abs() < 1e-7 && v < 1e-14);
        let (x, _) = golden_section(|t| t, 0.0, 1.0, Goal::Sup, 80);
        assert_eq!(x, 1.0);
    }
}
