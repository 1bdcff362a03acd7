//! Property checks of the modulus inequalities over norm families, and
//! report-only probes of open conjectures.
//!
//! A modulus check is a list of symbolic comparisons `Σ lhs ≤ Σ rhs`. Every
//! modulus value the suite needs is computed once, in parallel, into an
//! immutable table; comparisons are then evaluated against it. A comparison
//! passes when `margin = Σ rhs − Σ lhs ≥ −(slack + σ)`, where `σ` is twice
//! the summed refinement tolerances of the modulus values involved.

mod catalogue;
mod probe;
mod sampled;

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::area::AreaCheck;
use crate::error::{ModuliError, Result};
use crate::moduli::{modulus, modulus_curve, replay_witness, CurveSample, ModulusConfig, ModulusKind};
use crate::norm::Norm;
use crate::triangle::TriangleFigure;
use crate::vector::Vector2;

pub use catalogue::{check_ids, default_grid, default_suite, select_checks};
pub use probe::{probe_conjectures, ProbeFamily, ProbePlan};
pub use sampled::FigureQuantity;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Inequality,
    Monotonicity,
    Coincidence,
    ConjectureProbe,
    AreaAdditivity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ReportOnly,
    /// Nothing was applicable; the record's notes say why.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub id: String,
    pub kind: CheckKind,
    pub norms: Vec<Norm>,
    /// Base parameter values; sampled checks other than area additivity
    /// ignore it.
    pub eps_grid: Vec<f64>,
    pub slack: f64,
}

/// Resolution and sampling budget shared by all checks of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub modulus: ModulusConfig,
    pub seed: u64,
    pub figure_samples: usize,
    pub convexity_samples: usize,
    pub area_samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            modulus: ModulusConfig::default(),
            seed: 0,
            figure_samples: 10_000,
            convexity_samples: 1_000,
            area_samples: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum TermSource {
    Constant { label: String },
    Modulus { kind: ModulusKind, eps: f64, sample: CurveSample },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    pub value: f64,
    #[serde(flatten)]
    pub source: TermSource,
}

impl Term {
    fn refine_tol(&self) -> f64 {
        match &self.source {
            TermSource::Modulus { sample, .. } => sample.refine_tol,
            TermSource::Constant { .. } => 0.0,
        }
    }
}

/// `Σ coef·value` over `lhs` is claimed not to exceed the same over `rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub norm: Norm,
    pub relation: String,
    pub eps: f64,
    pub lhs: Vec<Term>,
    pub rhs: Vec<Term>,
}

fn weighted_sum(terms: &[Term], value: impl Fn(&Term) -> Result<f64>) -> Result<f64> {
    terms.iter().try_fold(0.0, |acc, t| Ok(acc + t.coef * value(t)?))
}

impl Comparison {
    pub fn margin(&self) -> f64 {
        let sum = |ts: &[Term]| ts.iter().map(|t| t.coef * t.value).sum::<f64>();
        sum(&self.rhs) - sum(&self.lhs)
    }

    /// Discretization allowance `σ`.
    pub fn sigma(&self) -> f64 {
        2.0 * self.lhs.iter().chain(&self.rhs).map(|t| t.coef.abs() * t.refine_tol()).sum::<f64>()
    }

    /// The margin recomputed from the stored witnesses.
    pub fn replay(&self, cfg: &ModulusConfig) -> Result<f64> {
        let value = |t: &Term| match &t.source {
            TermSource::Constant { .. } => Ok(t.value),
            TermSource::Modulus { kind, eps, sample } => replay_witness(&self.norm, *kind, *eps, &sample.witness, cfg),
        };
        Ok(weighted_sum(&self.rhs, value)? - weighted_sum(&self.lhs, value)?)
    }
}

/// Enough data to recompute a check's worst margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CheckWitness {
    Comparison(Comparison),
    Figure { norm: Norm, quantity: FigureQuantity, figure: TriangleFigure },
    Convexity { norm: Norm, x: Vector2, y: Vector2, eps1: f64, eps2: f64, t: f64 },
    QuasiOrthogonality { norm: Norm, x: Vector2, y: Vector2 },
    Area { norm: Norm, eps: f64, samples: usize, reference: bool, result: AreaCheck },
}

impl CheckWitness {
    pub fn replay_margin(&self, cfg: &ModulusConfig) -> Result<f64> {
        match self {
            CheckWitness::Comparison(c) => c.replay(cfg),
            other => sampled::replay(other),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub kind: CheckKind,
    pub status: Status,
    /// Smallest margin relative to its own allowance; `null` when vacuous.
    #[serde(with = "finite_or_null")]
    pub worst_margin: f64,
    /// `slack + σ` at the worst comparison.
    pub allowance: f64,
    pub witness: Option<CheckWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteMeta {
    pub seed: u64,
    pub grid_n: usize,
    pub refine_rounds: usize,
    pub tool_version: String,
    pub norms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_grid: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: SuiteMeta,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn has_failures(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map(|s| s + "\n").map_err(|e| ModuliError::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ModuliError::Parse(format!("report json: {e}")))
    }
}

mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// One evaluated comparison (or sampled test) of a check.
pub(crate) struct Outcome {
    pub margin: f64,
    pub allowance: f64,
    pub witness: CheckWitness,
}

/// Folds outcomes into a record; the worst outcome is the one falling
/// furthest short of its allowance.
pub(crate) fn summarize(
    id: &str,
    kind: CheckKind,
    outcomes: Vec<Outcome>,
    notes: Vec<String>,
    report_only: bool,
    runtime_ms: Option<u64>,
) -> CheckRecord {
    let worst = outcomes.into_iter().reduce(|a, b| if b.margin + b.allowance < a.margin + a.allowance { b } else { a });
    let (status, worst_margin, allowance, witness) = match worst {
        None => (Status::Skipped, f64::INFINITY, 0.0, None),
        Some(w) => {
            let status = if report_only {
                Status::ReportOnly
            } else if w.margin + w.allowance >= 0.0 {
                Status::Pass
            } else {
                Status::Fail
            };
            (status, w.margin, w.allowance, Some(w.witness))
        }
    };
    CheckRecord { id: id.to_owned(), kind, status, worst_margin, allowance, witness, runtime_ms, notes }
}

/// Symbolic comparison term.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum SymTerm {
    M { kind: ModulusKind, eps: f64, coef: f64 },
    C { value: f64, label: String },
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Sym {
    pub relation: String,
    pub eps: f64,
    pub lhs: Vec<SymTerm>,
    pub rhs: Vec<SymTerm>,
}

type Key = (usize, String, u64);

fn key(norm: usize, kind: ModulusKind, eps: f64) -> Key {
    (norm, kind.to_string(), eps.to_bits())
}

/// Modulus values computed once per run.
pub(crate) struct Table {
    values: HashMap<Key, (std::result::Result<CurveSample, String>, u64)>,
}

impl Table {
    fn build(norms: &[Norm], needs: BTreeMap<Key, (usize, ModulusKind, f64)>, cfg: &ModulusConfig) -> Table {
        let list: Vec<_> = needs.into_iter().collect();
        let values = list
            .into_par_iter()
            .map(|(k, (n, kind, eps))| {
                let t = Instant::now();
                let r = modulus(&norms[n], kind, eps, cfg).map_err(|e| e.to_string());
                (k, (r, t.elapsed().as_millis() as u64))
            })
            .collect();
        Table { values }
    }

    /// Resolves a symbolic comparison, or says why it cannot be.
    fn resolve(&self, norm_idx: usize, norm: &Norm, sym: &Sym) -> std::result::Result<(Comparison, u64), String> {
        let mut ms = 0;
        let mut side = |terms: &[SymTerm]| -> std::result::Result<Vec<Term>, String> {
            terms
                .iter()
                .map(|t| match t {
                    SymTerm::C { value, label } if !value.is_finite() => Err(format!("{label} undefined")),
                    SymTerm::C { value, label } => {
                        Ok(Term { coef: 1.0, value: *value, source: TermSource::Constant { label: label.clone() } })
                    }
                    SymTerm::M { kind, eps, coef } => {
                        let (r, t) = self.values.get(&key(norm_idx, *kind, *eps)).expect("requirement registered");
                        ms += t;
                        let sample = r.clone().map_err(|e| format!("{kind}({eps}) unavailable: {e}"))?;
                        Ok(Term {
                            coef: *coef,
                            value: sample.value,
                            source: TermSource::Modulus { kind: *kind, eps: *eps, sample },
                        })
                    }
                })
                .collect()
        };
        let lhs = side(&sym.lhs)?;
        let rhs = side(&sym.rhs)?;
        Ok((Comparison { norm: norm.clone(), relation: sym.relation.clone(), eps: sym.eps, lhs, rhs }, ms))
    }
}

/// Registers every modulus value in `syms` under norm `idx`.
fn register(needs: &mut BTreeMap<Key, (usize, ModulusKind, f64)>, idx: usize, syms: &[Sym]) {
    for s in syms {
        for t in s.lhs.iter().chain(&s.rhs) {
            if let SymTerm::M { kind, eps, .. } = t {
                needs.insert(key(idx, *kind, *eps), (idx, *kind, *eps));
            }
        }
    }
}

/// Evaluates resolved symbolic comparisons into outcomes, skipping
/// unresolvable ones with a note.
pub(crate) fn evaluate_syms(
    table: &Table,
    idx: usize,
    norm: &Norm,
    syms: &[Sym],
    slack: f64,
    outcomes: &mut Vec<Outcome>,
    notes: &mut Vec<String>,
) -> u64 {
    let mut ms = 0;
    for sym in syms {
        match table.resolve(idx, norm, sym) {
            Ok((c, t)) => {
                ms += t;
                outcomes.push(Outcome {
                    margin: c.margin(),
                    allowance: slack + c.sigma(),
                    witness: CheckWitness::Comparison(c),
                });
            }
            Err(why) => notes.push(format!("{}: {} at eps={} skipped: {why}", norm.label(), sym.relation, sym.eps)),
        }
    }
    ms
}

/// Runs the given checks; records come back sorted by id.
pub fn run_suite(specs: &[CheckSpec], cfg: &SuiteConfig) -> Result<VerificationReport> {
    cfg.modulus.validate()?;
    let defs: Vec<&'static catalogue::CheckDef> = specs.iter().map(catalogue::validate).collect::<Result<_>>()?;
    let mut seen = std::collections::HashSet::new();
    for s in specs {
        if !seen.insert(s.id.as_str()) {
            return Err(ModuliError::Input(format!("duplicate check id {:?}", s.id)));
        }
    }

    // distinct norms, by specification
    let mut norms: Vec<Norm> = Vec::new();
    let norm_index: Vec<Vec<usize>> = specs
        .iter()
        .map(|s| {
            s.norms
                .iter()
                .map(|n| match norms.iter().position(|m| m == n) {
                    Some(i) => i,
                    None => {
                        norms.push(n.clone());
                        norms.len() - 1
                    }
                })
                .collect()
        })
        .collect();

    // symbolic comparisons per (check, norm), then one shared table
    let plans: Vec<Vec<catalogue::Plan>> = specs
        .par_iter()
        .zip(&defs)
        .zip(&norm_index)
        .map(|((spec, def), idxs)| idxs.iter().map(|&i| def.plan(&norms[i], &spec.eps_grid)).collect())
        .collect();
    let mut needs = BTreeMap::new();
    for (plan, idxs) in plans.iter().zip(&norm_index) {
        for (p, &i) in plan.iter().zip(idxs) {
            if let catalogue::Plan::Syms(syms, _) = p {
                register(&mut needs, i, syms);
            }
        }
    }
    let table = Table::build(&norms, needs, &cfg.modulus);

    let mut checks: Vec<CheckRecord> = specs
        .par_iter()
        .zip(&defs)
        .zip(plans.par_iter().zip(&norm_index))
        .map(|((spec, def), (plan, idxs))| {
            let start = Instant::now();
            let mut outcomes = Vec::new();
            let mut notes = Vec::new();
            let mut shared_ms = 0;
            for (p, &i) in plan.iter().zip(idxs) {
                let norm = &norms[i];
                match p {
                    catalogue::Plan::Syms(syms, ms) => {
                        shared_ms += ms + evaluate_syms(&table, i, norm, syms, spec.slack, &mut outcomes, &mut notes);
                    }
                    catalogue::Plan::Skip(why) => notes.push(format!("{}: skipped: {why}", norm.label())),
                    catalogue::Plan::Sampled(q) => {
                        sampled::run(*q, norm, spec, cfg, i, &mut outcomes, &mut notes);
                    }
                }
            }
            let ms = start.elapsed().as_millis() as u64 + shared_ms;
            summarize(&spec.id, def.kind, outcomes, notes, false, Some(ms))
        })
        .collect();
    checks.sort_by(|a, b| a.id.cmp(&b.id));

    let mut labels: Vec<String> = norms.iter().map(Norm::label).collect();
    labels.dedup();
    Ok(VerificationReport {
        suite: SuiteMeta {
            seed: cfg.seed,
            grid_n: cfg.modulus.grid_n,
            refine_rounds: cfg.modulus.refinement.rounds,
            tool_version: TOOL_VERSION.to_owned(),
            norms: labels,
            family: None,
            eps_grid: None,
        },
        checks,
    })
}

/// Smallest increment of γ⁻ and of γ⁺ between consecutive grid points;
/// `+∞` when the grid has fewer than two points.
pub fn gamma_monotonicity_check(norm: &Norm, grid: &[f64], cfg: &ModulusConfig) -> Result<f64> {
    if grid.len() < 2 {
        return Ok(f64::INFINITY);
    }
    let mut margin = f64::INFINITY;
    for kind in [ModulusKind::GammaMinus, ModulusKind::GammaPlus] {
        let vals: Vec<f64> = modulus_curve(norm, kind, grid, cfg)?.values().collect();
        for w in vals.windows(2) {
            margin = margin.min(w[1] - w[0]);
        }
    }
    Ok(margin)
}

#[cfg(test)]
mod tests;
