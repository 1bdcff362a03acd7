//! Per-kind objectives over the angle parametrization of the unit sphere.
//!
//! Every objective is invariant under `(x, z) ↦ (−x, −z)` (support sets flip
//! sign with their point), so the base point only ranges over `θ ∈ [0, π)`
//! while partners are searched on both sides.

use std::f64::consts::PI;

use crate::norm::{half_turn, Norm, SupportSet};
use crate::search::{extremize, first_reaching, golden_section, last_within, Axis, Goal, Refinement};
use crate::triangle::{lambda_unchecked, quasi_normals_unchecked};
use crate::vector::{DualVector2, Vector2};

use super::{Configuration, ModulusConfig, ModulusKind};

const CHORD_ITERS: usize = 60;
const ARC_ITERS: usize = 60;
const FLAT_ARC: f64 = 1e-12;
const FLAT_CHORD_TOL: f64 = 1e-12;
const SEGMENT_ITERS: usize = 80;

pub(crate) struct Objective<'a> {
    pub norm: &'a Norm,
    pub kind: ModulusKind,
    pub eps: f64,
    pub cfg: &'a ModulusConfig,
}

impl<'a> Objective<'a> {
    pub fn goal(&self) -> Goal {
        self.kind.goal()
    }

    /// Search box: one base angle, plus the direction of `y` for `ρ`.
    pub fn axes(&self) -> Vec<Axis> {
        let corners = self.norm.corner_angles();
        let mut seeds: Vec<f64> = corners.iter().copied().map(half_turn).collect();
        if self.is_chord_kind() {
            seeds.extend(self.corner_partner_angles(&corners));
        }
        let primary = Axis::periodic(0.0, PI, self.cfg.primary_points()).with_seeds(seeds);
        match self.kind {
            ModulusKind::Rho => {
                let corner_seeds = corners.into_iter().map(half_turn);
                vec![primary, Axis::periodic(0.0, PI, self.cfg.secondary_points()).with_seeds(corner_seeds)]
            }
            _ => vec![primary],
        }
    }

    fn is_chord_kind(&self) -> bool {
        use ModulusKind::*;
        !matches!(self.kind, Rho | LambdaMinus | LambdaPlus | ZetaMinus | ZetaPlus | MilmanMinus | MilmanPlus)
    }

    /// Base angles whose chord partners are corners: extremal chords of a
    /// polygon often end at a corner while the base point is generic.
    fn corner_partner_angles(&self, corners: &[f64]) -> Vec<f64> {
        let mut out = Vec::new();
        for &c in corners {
            let x = self.norm.sphere_point(c);
            for side in [1.0, -1.0] {
                if let Some((lo, hi)) = self.chord_arc(x, c, side) {
                    out.push(half_turn(c + side * lo));
                    out.push(half_turn(c + side * hi));
                }
            }
        }
        out
    }

    pub fn eval(&self, params: &[f64]) -> Option<(f64, Configuration)> {
        use ModulusKind::*;
        let theta = *params.first()?;
        let x = self.norm.sphere_point(theta);
        match self.kind {
            Rho => {
                let y = self.norm.sphere_point(*params.get(1)?) * self.eps;
                let v = 0.5 * (self.norm.eval(x + y) + self.norm.eval(x - y)) - 1.0;
                Some((v, Configuration::pair(x, y)))
            }
            LambdaMinus | LambdaPlus | ZetaMinus | ZetaPlus => Some(self.cone(x)),
            MilmanMinus | MilmanPlus => self.milman(x),
            _ => self.chord(theta, x),
        }
    }

    /// λ± and ζ±: `y` over the sampled quasi-normal cone, both signs.
    fn cone(&self, x: Vector2) -> (f64, Configuration) {
        let goal = self.goal();
        let cone = quasi_normals_unchecked(self.norm, x);
        let dirs = cone.samples(self.norm, self.cfg.cone_samples);
        let n = dirs.len();
        let mut best: Option<(f64, Configuration)> = None;
        for (j, y0) in dirs.into_iter().enumerate() {
            let t = if n > 1 { j as f64 / (n - 1) as f64 } else { 0.0 };
            let p = cone.support.at(t);
            for y in [y0, -y0] {
                let v = match self.kind {
                    ModulusKind::LambdaMinus | ModulusKind::LambdaPlus => lambda_unchecked(self.norm, x, y, self.eps),
                    _ => self.norm.eval(x + self.eps * y),
                };
                if best.as_ref().is_none_or(|(b, _)| goal.better(v, *b)) {
                    best = Some((v, Configuration { p: Some(p), ..Configuration::pair(x, y) }));
                }
            }
        }
        best.expect("cone samples are never empty")
    }

    fn milman(&self, x: Vector2) -> Option<(f64, Configuration)> {
        let goal = self.goal();
        let eps = self.eps;
        let value = |y: Vector2| {
            let (a, b) = (self.norm.eval(x + eps * y), self.norm.eval(x - eps * y));
            match goal {
                Goal::Inf => a.max(b) - 1.0,
                Goal::Sup => a.min(b) - 1.0,
            }
        };
        let seeds: Vec<f64> = self.norm.corner_angles().into_iter().map(half_turn).collect();
        let axis = Axis::periodic(0.0, PI, self.cfg.secondary_points()).with_seeds(seeds);
        let inner =
            extremize(|q| Some(value(self.norm.sphere_point(q[0]))), &[axis], goal, &self.cfg.inner_refinement())
                .ok()?;
        let y = self.norm.sphere_point(inner.argument[0]);
        Some((inner.value, Configuration::pair(x, y)))
    }

    /// Parameter range `[lo, hi]` of partners `z = S(θ + side·s)` with
    /// `‖x − z‖ = ε`. Chord length is nondecreasing in `s ∈ [0, π]`, so the
    /// range is an interval, degenerate unless the sphere has a flat piece.
    fn chord_arc(&self, x: Vector2, theta: f64, side: f64) -> Option<(f64, f64)> {
        let chord = |s: f64| self.norm.eval(x - self.norm.sphere_point(theta + side * s));
        if chord(PI) < self.eps - 1e-12 {
            return None;
        }
        if self.norm.is_strictly_convex() {
            let s = first_reaching(chord, self.eps, 0.0, PI, CHORD_ITERS);
            return Some((s, s));
        }
        // on a flat piece the chord equals ε only up to rounding
        let slack = FLAT_CHORD_TOL * self.eps.max(1.0);
        let lo = first_reaching(chord, self.eps - slack, 0.0, PI, CHORD_ITERS);
        let hi = last_within(chord, self.eps + slack, lo, PI, CHORD_ITERS).max(lo);
        Some((lo, hi))
    }

    /// Two-point kinds: partner `z` on the sphere at distance `ε`, both sides.
    fn chord(&self, theta: f64, x: Vector2) -> Option<(f64, Configuration)> {
        let goal = self.goal();
        let jx = self.norm.support_set_unchecked(x);
        let mut best: Option<(f64, Configuration)> = None;
        for side in [1.0, -1.0] {
            let Some((lo, hi)) = self.chord_arc(x, theta, side) else { continue };
            let at = |s: f64| self.pair(x, &jx, self.norm.sphere_point(theta + side * s));
            let s = if hi - lo <= FLAT_ARC { lo } else { golden_section(|s| at(s).0, lo, hi, goal, ARC_ITERS).0 };
            let cand = at(s);
            if best.as_ref().is_none_or(|(b, _)| goal.better(cand.0, *b)) {
                best = Some(cand);
            }
        }
        best
    }

    fn pair(&self, x: Vector2, jx: &SupportSet, z: Vector2) -> (f64, Configuration) {
        use ModulusKind::*;
        let goal = self.goal();
        let base = Configuration::pair(x, z);
        match self.kind {
            Delta | Banas => (1.0 - 0.5 * self.norm.eval(x + z), base),
            DeltaT(t) | BetaT(t) => (1.0 - self.norm.eval(t * x + (1.0 - t) * z), base),
            PhiMinus | PhiPlus => {
                let (v, p) = jx
                    .endpoints()
                    .map(|p| (p.apply(x - z), p))
                    .reduce(|a, b| if goal.better(b.0, a.0) { b } else { a })
                    .expect("support set has endpoints");
                (v, Configuration { p: Some(p), ..base })
            }
            GammaMinus | GammaPlus | DPlus => {
                let jz = self.norm.support_set_unchecked(z);
                let mut best: Option<(f64, DualVector2, DualVector2)> = None;
                for p in jx.endpoints() {
                    for q in jz.endpoints() {
                        let v = if self.kind == DPlus { self.norm.dual_eval(p - q) } else { (p - q).apply(x - z) };
                        if best.is_none_or(|(b, _, _)| goal.better(v, b)) {
                            best = Some((v, p, q));
                        }
                    }
                }
                let (v, p, q) = best.expect("support sets have endpoints");
                (v, Configuration { p: Some(p), q: Some(q), ..base })
            }
            DMinus => {
                let jz = self.norm.support_set_unchecked(z);
                let (v, p, q) = self.dual_distance_inf(jx, &jz);
                (v, Configuration { p: Some(p), q: Some(q), ..base })
            }
            _ => unreachable!("{} is not a two-point modulus", self.kind),
        }
    }

    /// `inf ‖p − q‖_*` over `p ∈ jx`, `q ∈ jz`; convex in the segment
    /// parameters.
    fn dual_distance_inf(&self, jx: &SupportSet, jz: &SupportSet) -> (f64, DualVector2, DualVector2) {
        let dist = |s: f64, t: f64| self.norm.dual_eval(jx.at(s) - jz.at(t));
        match (jx.is_single(), jz.is_single()) {
            (true, true) => (dist(0.0, 0.0), jx.minus, jz.minus),
            (false, true) => {
                let (s, v) = golden_section(|s| dist(s, 0.0), 0.0, 1.0, Goal::Inf, SEGMENT_ITERS);
                (v, jx.at(s), jz.minus)
            }
            (true, false) => {
                let (t, v) = golden_section(|t| dist(0.0, t), 0.0, 1.0, Goal::Inf, SEGMENT_ITERS);
                (v, jx.minus, jz.at(t))
            }
            (false, false) => {
                let box2 = [Axis::closed(0.0, 1.0, self.cfg.inner_grid), Axis::closed(0.0, 1.0, self.cfg.inner_grid)];
                let refine = Refinement { rounds: self.cfg.inner_rounds, ..self.cfg.refinement };
                let e = extremize(|st| Some(dist(st[0], st[1])), &box2, Goal::Inf, &refine)
                    .expect("a closed box is always feasible");
                (e.value, jx.at(e.argument[0]), jz.at(e.argument[1]))
            }
        }
    }
}
