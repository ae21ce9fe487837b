//! Reference answers by minimum cross-entropy updating of the joint table.
//!
//! Given new evidence marginals `P'(E1)`, `P'(E2)` (the conclusion left
//! free), the closest table in directed divergence `Σ q ln(q/p)` has the
//! form `q = p · a^[e1] · b^[e2]`. Interior targets are reached by
//! alternately rescaling the E1 and E2 slices; targets of 0 or 1 are the
//! limit of that family and are handled by exact conditioning. Every
//! odds ratio of the source that stays defined is left unchanged.

use serde::{Deserialize, Serialize};

use crate::engine::check_probability;
use crate::error::{Error, Result};
use crate::table::{EvidenceKind, JointTable, State, Variable, EVIDENCE_STATES, INDEPENDENCE_TOLERANCE};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_ITERATION_CAP: usize = 10_000;

/// New probabilities for the two evidence nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct EvidenceUpdate {
    e1: f64,
    e2: f64,
}

impl EvidenceUpdate {
    pub fn new(e1: f64, e2: f64) -> Result<Self> {
        check_probability("P'(E1)", e1)?;
        check_probability("P'(E2)", e2)?;
        Ok(EvidenceUpdate { e1, e2 })
    }

    pub fn e1(&self) -> f64 {
        self.e1
    }

    pub fn e2(&self) -> f64 {
        self.e2
    }

    /// Updated probability of an evidence state under independent weights.
    pub fn weight(&self, e1: bool, e2: bool) -> f64 {
        let w1 = if e1 { self.e1 } else { 1.0 - self.e1 };
        let w2 = if e2 { self.e2 } else { 1.0 - self.e2 };
        w1 * w2
    }
}

impl TryFrom<(f64, f64)> for EvidenceUpdate {
    type Error = Error;

    fn try_from((e1, e2): (f64, f64)) -> Result<Self> {
        EvidenceUpdate::new(e1, e2)
    }
}

impl From<EvidenceUpdate> for (f64, f64) {
    fn from(u: EvidenceUpdate) -> Self {
        (u.e1, u.e2)
    }
}

/// Solver settings for [`mce_update`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub tolerance: f64,
    pub iteration_cap: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tolerance: DEFAULT_TOLERANCE,
            iteration_cap: DEFAULT_ITERATION_CAP,
        }
    }
}

/// Output of [`mce_update`].
#[derive(Clone, Debug, PartialEq)]
pub struct UpdatedTable {
    pub table: JointTable,
    /// `|P(E_i) - P'(E_i)|` achieved for each evidence node.
    pub deviation: [f64; 2],
    /// Full E1/E2 rescaling sweeps performed.
    pub iterations: usize,
}

impl UpdatedTable {
    pub fn posterior(&self) -> f64 {
        self.table.probability(|s| s.c)
    }
}

/// `Σ q ln(q/p)`, with `0 ln 0 = 0` and `+∞` where `q > 0 = p`.
pub fn cross_entropy(q: &[f64; 8], p: &[f64; 8]) -> f64 {
    q.iter()
        .zip(p)
        .map(|(&qi, &pi)| {
            if qi == 0.0 {
                0.0
            } else if pi == 0.0 {
                f64::INFINITY
            } else {
                qi * (qi / pi).ln()
            }
        })
        .sum()
}

fn evidence_of(s: State, i: usize) -> bool {
    Variable::evidence(i).value(s)
}

fn side_mass(q: &[f64; 8], i: usize, value: bool) -> f64 {
    State::all()
        .filter(|&s| evidence_of(s, i) == value)
        .map(|s| q[s.index()])
        .sum()
}

/// Rescales evidence `i` so that its true-side mass equals `target`.
fn scale_evidence(q: &mut [f64; 8], i: usize, target: f64) {
    let m_true = side_mass(q, i, true);
    let m_false = side_mass(q, i, false);
    let f_true = target / m_true;
    let f_false = (1.0 - target) / m_false;
    for s in State::all() {
        q[s.index()] *= if evidence_of(s, i) { f_true } else { f_false };
    }
}

/// Minimum cross-entropy table with the prescribed evidence marginals.
pub fn mce_update(table: &JointTable, update: &EvidenceUpdate, settings: SolverSettings) -> Result<UpdatedTable> {
    let targets = [update.e1, update.e2];
    let mut q = *table.cells();

    // Boundary targets: condition on the required evidence state.
    for (i, &t) in targets.iter().enumerate() {
        if t == 0.0 || t == 1.0 {
            let keep = t == 1.0;
            if side_mass(&q, i, keep) <= 0.0 {
                return Err(Error::Infeasible(format!(
                    "P'(E{}) = {t} but the table gives E{} = {keep} no mass",
                    i + 1,
                    i + 1
                )));
            }
            for s in State::all() {
                if evidence_of(s, i) != keep {
                    q[s.index()] = 0.0;
                }
            }
            let sum: f64 = q.iter().sum();
            q.iter_mut().for_each(|x| *x /= sum);
        }
    }

    let interior: Vec<usize> = (0..2).filter(|&i| targets[i] > 0.0 && targets[i] < 1.0).collect();
    for &i in &interior {
        for value in [true, false] {
            if side_mass(&q, i, value) <= 0.0 {
                return Err(Error::Infeasible(format!(
                    "P'(E{}) = {} requires mass on both states of E{}, but E{} = {value} has none",
                    i + 1,
                    targets[i],
                    i + 1,
                    i + 1
                )));
            }
        }
    }

    let deviation_of = |q: &[f64; 8]| [0, 1].map(|i| (side_mass(q, i, true) - targets[i]).abs());
    let max_dev = |d: [f64; 2]| d[0].max(d[1]);

    let mut iterations = 0;
    let mut deviation = deviation_of(&q);
    while max_dev(deviation) > settings.tolerance {
        if iterations >= settings.iteration_cap {
            return Err(Error::NoConvergence {
                iterations,
                deviation: max_dev(deviation),
            });
        }
        for &i in &interior {
            scale_evidence(&mut q, i, targets[i]);
        }
        iterations += 1;
        deviation = deviation_of(&q);
    }

    let table = JointTable::new(q, EvidenceKind::Unspecified)?;
    Ok(UpdatedTable {
        table,
        deviation,
        iterations,
    })
}

/// Posterior `P'(C)` of the minimum cross-entropy update, with default solver settings.
pub fn correct_posterior(table: &JointTable, update: &EvidenceUpdate) -> Result<f64> {
    mce_update(table, update, SolverSettings::default()).map(|u| u.posterior())
}

/// Closed-form correct answer for independent evidence: the conditional
/// profile mixed with independent updated evidence-state weights.
pub fn independent_closed_form(table: &JointTable, update: &EvidenceUpdate) -> Result<f64> {
    let rates = table.base_rates();
    let mut deviation: f64 = 0.0;
    for (e1, e2) in EVIDENCE_STATES {
        let w1 = if e1 { rates.e1 } else { 1.0 - rates.e1 };
        let w2 = if e2 { rates.e2 } else { 1.0 - rates.e2 };
        deviation = deviation.max((table.evidence_marginal(e1, e2) - w1 * w2).abs());
    }
    if deviation > INDEPENDENCE_TOLERANCE {
        return Err(Error::NotIndependent { deviation });
    }
    let profile = table.conditional_profile()?;
    Ok(EVIDENCE_STATES
        .iter()
        .map(|&(e1, e2)| profile.get(e1, e2) * update.weight(e1, e2))
        .sum())
}
