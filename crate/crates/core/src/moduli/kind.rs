use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ModuliError, Result};
use crate::search::Goal;

/// Which modulus to compute.
///
/// `DeltaT`/`BetaT` carry the weight `t ∈ (0, 1)` of the generalized
/// convexity and Banaś moduli `inf/sup {1 − ‖t x + (1 − t) y‖ : ‖x − y‖ = ε}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ModulusKind {
    Delta,
    Rho,
    Banas,
    LambdaMinus,
    LambdaPlus,
    PhiMinus,
    PhiPlus,
    ZetaMinus,
    ZetaPlus,
    GammaMinus,
    GammaPlus,
    DMinus,
    DPlus,
    MilmanMinus,
    MilmanPlus,
    DeltaT(f64),
    BetaT(f64),
}

/// Legal parameter range of a modulus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsDomain {
    pub lo: f64,
    /// `None`: unbounded above.
    pub hi: Option<f64>,
}

impl EpsDomain {
    pub fn contains(&self, eps: f64) -> bool {
        eps.is_finite() && eps >= self.lo && self.hi.is_none_or(|h| eps <= h)
    }
}

impl fmt::Display for EpsDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(h) => write!(f, "[{}, {}]", self.lo, h),
            None => write!(f, "[{}, ∞)", self.lo),
        }
    }
}

use ModulusKind::*;

impl ModulusKind {
    /// Every kind with a fixed default weight for the parametrized ones.
    pub fn catalogue() -> Vec<ModulusKind> {
        vec![
            Delta,
            Rho,
            Banas,
            LambdaMinus,
            LambdaPlus,
            PhiMinus,
            PhiPlus,
            ZetaMinus,
            ZetaPlus,
            GammaMinus,
            GammaPlus,
            DMinus,
            DPlus,
            MilmanMinus,
            MilmanPlus,
            DeltaT(0.5),
            BetaT(0.5),
        ]
    }

    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn goal(&self) -> Goal {
        match self {
            Delta | LambdaMinus | PhiMinus | ZetaMinus | GammaMinus | DMinus | MilmanMinus | DeltaT(_) => Goal::Inf,
            Rho | Banas | LambdaPlus | PhiPlus | ZetaPlus | GammaPlus | DPlus | MilmanPlus | BetaT(_) => Goal::Sup,
        }
    }

    pub fn domain(&self) -> EpsDomain {
        match self {
            LambdaMinus | LambdaPlus => EpsDomain { lo: 0.0, hi: Some(1.0) },
            ZetaMinus | ZetaPlus | Rho => EpsDomain { lo: 0.0, hi: None },
            _ => EpsDomain { lo: 0.0, hi: Some(2.0) },
        }
    }

    pub fn check_eps(&self, eps: f64) -> Result<()> {
        if self.domain().contains(eps) {
            Ok(())
        } else {
            Err(ModuliError::Domain { kind: self.name(), eps, domain: self.domain().to_string() })
        }
    }

    /// Value at `eps = 0`, returned without optimization.
    pub fn value_at_zero(&self) -> f64 {
        match self {
            ZetaMinus | ZetaPlus => 1.0,
            _ => 0.0,
        }
    }

    /// Nondecreasing in `eps` on its whole domain.
    pub fn is_monotone(&self) -> bool {
        matches!(
            self,
            Delta
                | Banas
                | LambdaMinus
                | LambdaPlus
                | PhiMinus
                | PhiPlus
                | ZetaMinus
                | ZetaPlus
                | GammaMinus
                | GammaPlus
        )
    }

    /// The inf/sup counterpart, if any.
    pub fn partner(&self) -> Option<ModulusKind> {
        Some(match *self {
            LambdaMinus => LambdaPlus,
            LambdaPlus => LambdaMinus,
            PhiMinus => PhiPlus,
            PhiPlus => PhiMinus,
            ZetaMinus => ZetaPlus,
            ZetaPlus => ZetaMinus,
            GammaMinus => GammaPlus,
            GammaPlus => GammaMinus,
            DMinus => DPlus,
            DPlus => DMinus,
            MilmanMinus => MilmanPlus,
            MilmanPlus => MilmanMinus,
            DeltaT(t) => BetaT(t),
            BetaT(t) => DeltaT(t),
            Delta => Banas,
            Banas => Delta,
            Rho => return None,
        })
    }
}

impl fmt::Display for ModulusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Delta => "delta",
            Rho => "rho",
            Banas => "banas",
            LambdaMinus => "lambda-minus",
            LambdaPlus => "lambda-plus",
            PhiMinus => "phi-minus",
            PhiPlus => "phi-plus",
            ZetaMinus => "zeta-minus",
            ZetaPlus => "zeta-plus",
            GammaMinus => "gamma-minus",
            GammaPlus => "gamma-plus",
            DMinus => "d-minus",
            DPlus => "d-plus",
            MilmanMinus => "milman-minus",
            MilmanPlus => "milman-plus",
            DeltaT(t) => return write!(f, "delta-t:{t}"),
            BetaT(t) => return write!(f, "beta-t:{t}"),
        };
        f.write_str(s)
    }
}

impl FromStr for ModulusKind {
    type Err = ModuliError;

    /// Names as printed by `Display`; the weighted kinds also accept
    /// `delta-t(0.25)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let weighted = |rest: &str| -> Result<f64> {
            let t: f64 = rest
                .trim_start_matches([':', '(', '='])
                .trim_end_matches(')')
                .parse()
                .map_err(|_| ModuliError::Parse(format!("bad weight in {s:?}")))?;
            if t > 0.0 && t < 1.0 {
                Ok(t)
            } else {
                Err(ModuliError::Parse(format!("weight t must lie strictly inside (0, 1), got {t}")))
            }
        };
        if let Some(rest) = s.strip_prefix("delta-t") {
            return Ok(DeltaT(weighted(rest)?));
        }
        if let Some(rest) = s.strip_prefix("beta-t") {
            return Ok(BetaT(weighted(rest)?));
        }
        Ok(match s {
            "delta" => Delta,
            "rho" => Rho,
            "banas" => Banas,
            "lambda-minus" => LambdaMinus,
            "lambda-plus" => LambdaPlus,
            "phi-minus" => PhiMinus,
            "phi-plus" => PhiPlus,
            "zeta-minus" => ZetaMinus,
            "zeta-plus" => ZetaPlus,
            "gamma-minus" => GammaMinus,
            "gamma-plus" => GammaPlus,
            "d-minus" => DMinus,
            "d-plus" => DPlus,
            "milman-minus" => MilmanMinus,
            "milman-plus" => MilmanPlus,
            _ => {
                return Err(ModuliError::Parse(format!(
                    "unknown modulus {s:?}; expected one of delta, rho, banas, lambda-±, phi-±, zeta-±, \
                     gamma-±, d-±, milman-± (minus/plus), delta-t:T, beta-t:T"
                )))
            }
        })
    }
}

impl TryFrom<String> for ModulusKind {
    type Error = ModuliError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ModulusKind> for String {
    fn from(k: ModulusKind) -> String {
        k.to_string()
    }
}
