//! Moduli of a normed plane, computed by grid-and-refine extremization over
//! angle-parametrized sphere configurations.

mod kind;
mod objective;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ModuliError, Result};
use crate::norm::Norm;
use crate::search::{extremize, Refinement};
use crate::triangle::{lambda_unchecked, CONE_INTERIOR_SAMPLES};
use crate::vector::{DualVector2, Vector2};

pub use kind::{EpsDomain, ModulusKind};
use objective::Objective;

/// Smallest admissible `grid_n`.
pub const MIN_GRID: usize = 64;

/// Resolution knobs. `grid_n` counts points per full turn of an angle, so the
/// base angle (searched over a half turn) gets `grid_n / 2` points and nested
/// or second angles `grid_n / 8`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusConfig {
    pub grid_n: usize,
    pub refinement: Refinement,
    /// Interior directions sampled in a non-degenerate quasi-normal cone.
    pub cone_samples: usize,
    /// Grid per support-segment parameter in the `d⁻` inner search.
    pub inner_grid: usize,
    pub inner_rounds: usize,
}

impl Default for ModulusConfig {
    fn default() -> Self {
        Self {
            grid_n: 1024,
            refinement: Refinement::default(),
            cone_samples: CONE_INTERIOR_SAMPLES,
            inner_grid: 33,
            inner_rounds: 3,
        }
    }
}

impl ModulusConfig {
    pub fn with_grid(grid_n: usize, rounds: usize) -> Self {
        Self { grid_n, refinement: Refinement { rounds, ..Refinement::default() }, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_n < MIN_GRID {
            return Err(ModuliError::Input(format!("grid_n must be at least {MIN_GRID}, got {}", self.grid_n)));
        }
        if self.refinement.keep == 0 || self.refinement.factor < 2 {
            return Err(ModuliError::Input("refinement needs keep ≥ 1 and factor ≥ 2".into()));
        }
        if self.inner_grid < 2 {
            return Err(ModuliError::Input("inner_grid must be at least 2".into()));
        }
        Ok(())
    }

    pub(crate) fn primary_points(&self) -> usize {
        self.grid_n / 2
    }

    pub(crate) fn secondary_points(&self) -> usize {
        (self.grid_n / 8).max(16)
    }

    pub(crate) fn inner_refinement(&self) -> Refinement {
        self.refinement
    }
}

/// The vectors realizing a reported extremum.
///
/// `partner` is the second sphere point for chord moduli, the direction `y`
/// for λ±, ζ± and Milman moduli, and the scaled `y` (norm `τ`) for ρ. `p`, `q`
/// are the support functionals at `x` and at `partner` where relevant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub x: Vector2,
    pub partner: Vector2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<DualVector2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<DualVector2>,
}

impl Configuration {
    pub(crate) fn pair(x: Vector2, partner: Vector2) -> Self {
        Self { x, partner, p: None, q: None }
    }

    /// The modulus objective evaluated directly on these vectors, without any
    /// search. Agrees with the reported value up to root-finding accuracy.
    pub fn objective(&self, norm: &Norm, kind: ModulusKind, eps: f64) -> Result<f64> {
        use ModulusKind::*;
        let (x, y) = (self.x, self.partner);
        let need = |f: Option<DualVector2>, name: &str| {
            f.ok_or_else(|| ModuliError::Input(format!("{kind} witness lacks functional {name}")))
        };
        Ok(match kind {
            Delta | Banas => 1.0 - 0.5 * norm.eval(x + y),
            DeltaT(t) | BetaT(t) => 1.0 - norm.eval(t * x + (1.0 - t) * y),
            Rho => 0.5 * (norm.eval(x + y) + norm.eval(x - y)) - 1.0,
            LambdaMinus | LambdaPlus => lambda_unchecked(norm, x, y, eps),
            ZetaMinus | ZetaPlus => norm.eval(x + eps * y),
            PhiMinus | PhiPlus => need(self.p, "p")?.apply(x - y),
            GammaMinus | GammaPlus => (need(self.p, "p")? - need(self.q, "q")?).apply(x - y),
            DMinus | DPlus => norm.dual_eval(need(self.p, "p")? - need(self.q, "q")?),
            MilmanMinus => norm.eval(x + eps * y).max(norm.eval(x - eps * y)) - 1.0,
            MilmanPlus => norm.eval(x + eps * y).min(norm.eval(x - eps * y)) - 1.0,
        })
    }
}

/// Search parameters and the configuration they produce.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Base angle (and `y` angle for ρ); empty at `eps = 0`.
    pub params: Vec<f64>,
    pub config: Configuration,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub eps: f64,
    pub value: f64,
    pub grid_n: usize,
    pub refine_tol: f64,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusCurve {
    pub kind: ModulusKind,
    pub norm: Norm,
    pub samples: Vec<CurveSample>,
}

impl ModulusCurve {
    pub fn eps(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.eps)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.value)
    }

    pub fn max_refine_tol(&self) -> f64 {
        self.samples.iter().map(|s| s.refine_tol).fold(0.0, f64::max)
    }
}

pub fn modulus(norm: &Norm, kind: ModulusKind, eps: f64, cfg: &ModulusConfig) -> Result<CurveSample> {
    kind.check_eps(eps)?;
    cfg.validate()?;
    if eps == 0.0 {
        return Ok(CurveSample {
            eps,
            value: kind.value_at_zero(),
            grid_n: cfg.grid_n,
            refine_tol: 0.0,
            witness: Witness::default(),
        });
    }
    let obj = Objective { norm, kind, eps, cfg };
    let found = extremize(|p| obj.eval(p).map(|(v, _)| v), &obj.axes(), obj.goal(), &cfg.refinement)?;
    let (value, config) = obj
        .eval(&found.argument)
        .ok_or_else(|| ModuliError::Infeasible(format!("{kind} at eps = {eps}: witness became infeasible")))?;
    if !value.is_finite() {
        return Err(ModuliError::Infeasible(format!("{kind} at eps = {eps}: non-finite value")));
    }
    log::trace!("{kind} eps={eps} value={value} evals={}", found.evaluations);
    Ok(CurveSample {
        eps,
        value,
        grid_n: cfg.grid_n,
        refine_tol: found.tol_estimate,
        witness: Witness { params: found.argument, config },
    })
}

/// Recompute the objective at a witness's search parameters.
pub fn replay_witness(norm: &Norm, kind: ModulusKind, eps: f64, witness: &Witness, cfg: &ModulusConfig) -> Result<f64> {
    kind.check_eps(eps)?;
    if eps == 0.0 || witness.params.is_empty() {
        return Ok(kind.value_at_zero());
    }
    Objective { norm, kind, eps, cfg }
        .eval(&witness.params)
        .map(|(v, _)| v)
        .ok_or_else(|| ModuliError::Infeasible(format!("{kind} at eps = {eps}: witness is infeasible")))
}

/// Pointwise [`modulus`] over a strictly increasing grid, evaluated in
/// parallel; the result does not depend on scheduling.
pub fn modulus_curve(norm: &Norm, kind: ModulusKind, grid: &[f64], cfg: &ModulusConfig) -> Result<ModulusCurve> {
    for e in grid {
        kind.check_eps(*e)?;
    }
    if let Some(w) = grid.windows(2).find(|w| w[0] >= w[1]) {
        return Err(ModuliError::Input(format!("eps grid must be strictly increasing ({} then {})", w[0], w[1])));
    }
    cfg.validate()?;
    let samples = grid.par_iter().map(|&e| modulus(norm, kind, e, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(ModulusCurve { kind, norm: norm.clone(), samples })
}

/// Value of the modulus in the Euclidean plane.
pub fn hilbert_reference(kind: ModulusKind, eps: f64) -> Result<f64> {
    use ModulusKind::*;
    kind.check_eps(eps)?;
    let e2 = eps * eps;
    Ok(match kind {
        Delta | Banas => 1.0 - (1.0 - e2 / 4.0).max(0.0).sqrt(),
        Rho | MilmanMinus | MilmanPlus => (1.0 + e2).sqrt() - 1.0,
        LambdaMinus | LambdaPlus => 1.0 - (1.0 - e2).max(0.0).sqrt(),
        PhiMinus | PhiPlus => e2 / 2.0,
        ZetaMinus | ZetaPlus => (1.0 + e2).sqrt(),
        GammaMinus | GammaPlus => e2,
        DMinus | DPlus => eps,
        DeltaT(t) | BetaT(t) => 1.0 - (1.0 - t * (1.0 - t) * e2).max(0.0).sqrt(),
    })
}
