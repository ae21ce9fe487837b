//! Random network generation.
//!
//! Associated-evidence tables start from eight uniform cells and are fitted
//! by iterative proportional fitting to independently drawn base rates, so
//! base rates and associations vary independently of each other.
//! Independent-evidence tables take their evidence-pair marginals from the
//! product of the evidence base rates and split each marginal between its
//! two conclusion cells at a uniform fraction.
//!
//! Each network draws from its own ChaCha stream keyed by the seed, the
//! network index and the attempt number, so output does not depend on the
//! order or parallelism of generation.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{EvidenceKind, JointTable, Provenance, State, Variable, EVIDENCE_STATES};

pub const DEFAULT_BASE_RATE_GUARD: f64 = 1e-3;
pub const DEFAULT_IPF_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_IPF_ITERATION_CAP: usize = 10_000;
pub const MAX_ATTEMPTS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub count: usize,
    pub seed: u64,
    pub kind: EvidenceKind,
    /// Base rates are drawn from `(guard, 1 - guard)`.
    pub base_rate_guard: f64,
    pub ipf_tolerance: f64,
    pub ipf_iteration_cap: usize,
}

impl GenerationConfig {
    pub fn new(kind: EvidenceKind, count: usize, seed: u64) -> Self {
        GenerationConfig {
            count,
            seed,
            kind,
            base_rate_guard: DEFAULT_BASE_RATE_GUARD,
            ipf_tolerance: DEFAULT_IPF_TOLERANCE,
            ipf_iteration_cap: DEFAULT_IPF_ITERATION_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidConfig("count must be positive".into()));
        }
        if self.kind == EvidenceKind::Unspecified {
            return Err(Error::InvalidConfig("kind must be independent or associated".into()));
        }
        if !(self.base_rate_guard > 0.0 && self.base_rate_guard < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "base-rate guard {} outside (0, 0.5)",
                self.base_rate_guard
            )));
        }
        if self.ipf_tolerance.is_nan() || self.ipf_tolerance <= 0.0 {
            return Err(Error::InvalidConfig("IPF tolerance must be positive".into()));
        }
        if self.ipf_iteration_cap == 0 {
            return Err(Error::InvalidConfig("IPF iteration cap must be positive".into()));
        }
        Ok(())
    }
}

/// Target one-dimensional marginals for [`ipf_fit`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginTargets {
    pub e1: f64,
    pub e2: f64,
    pub c: f64,
}

impl MarginTargets {
    pub fn new(e1: f64, e2: f64, c: f64) -> Result<Self> {
        for (what, v) in [("target P(E1)", e1), ("target P(E2)", e2), ("target P(C)", c)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidProbability { what, value: v });
            }
        }
        Ok(MarginTargets { e1, e2, c })
    }

    pub fn get(&self, var: Variable) -> f64 {
        match var {
            Variable::E1 => self.e1,
            Variable::E2 => self.e2,
            Variable::C => self.c,
        }
    }

    fn max_deviation(&self, q: &[f64; 8]) -> f64 {
        Variable::ALL
            .iter()
            .map(|&v| (true_mass(q, v) - self.get(v)).abs())
            .fold(0.0, f64::max)
    }
}

fn true_mass(q: &[f64; 8], var: Variable) -> f64 {
    State::all().filter(|&s| var.value(s)).map(|s| q[s.index()]).sum()
}

fn scale_variable(q: &mut [f64; 8], var: Variable, target: f64) {
    let m_true = true_mass(q, var);
    let m_false: f64 = q.iter().sum::<f64>() - m_true;
    let f_true = target / m_true;
    let f_false = (1.0 - target) / m_false;
    for s in State::all() {
        q[s.index()] *= if var.value(s) { f_true } else { f_false };
    }
}

/// Iterative proportional fitting of the three one-dimensional margins,
/// adjusted in the order E1, E2, C.
pub fn ipf_fit(
    table: &JointTable,
    targets: &MarginTargets,
    tolerance: f64,
    iteration_cap: usize,
) -> Result<JointTable> {
    ipf_fit_ordered(
        table,
        targets,
        [Variable::E1, Variable::E2, Variable::C],
        tolerance,
        iteration_cap,
    )
}

/// [`ipf_fit`] with an explicit adjustment order.
pub fn ipf_fit_ordered(
    table: &JointTable,
    targets: &MarginTargets,
    order: [Variable; 3],
    tolerance: f64,
    iteration_cap: usize,
) -> Result<JointTable> {
    if let Some(i) = table.cells().iter().position(|&c| c <= 0.0) {
        return Err(Error::InvalidTable(format!(
            "IPF needs strictly positive cells; cell {i} is not"
        )));
    }
    let mut q = *table.cells();
    let mut iterations = 0;
    let mut deviation = targets.max_deviation(&q);
    while deviation > tolerance {
        if iterations >= iteration_cap {
            return Err(Error::NoConvergence { iterations, deviation });
        }
        for var in order {
            scale_variable(&mut q, var, targets.get(var));
        }
        iterations += 1;
        deviation = targets.max_deviation(&q);
    }
    // Margin fitting does not preserve evidence independence in general.
    let kind = match table.kind() {
        EvidenceKind::Independent => EvidenceKind::Unspecified,
        k => k,
    };
    JointTable::new(q, kind).map(|t| t.with_provenance(table.provenance()))
}

/// Random stream for one attempt at one network.
pub fn network_rng(seed: u64, index: usize, attempt: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(attempt as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index as u64);
    rng
}

fn guarded_uniform(rng: &mut impl Rng, guard: f64) -> f64 {
    let u: f64 = rng.sample(Open01);
    guard + (1.0 - 2.0 * guard) * u
}

/// Builds an independent-evidence table from its evidence base rates and
/// the C-true share of each evidence-pair marginal (canonical order).
pub fn independent_from_draws(p_e1: f64, p_e2: f64, c_shares: [f64; 4]) -> Result<JointTable> {
    let mut cells = [0.0; 8];
    for (k, (e1, e2)) in EVIDENCE_STATES.into_iter().enumerate() {
        let m = if e1 { p_e1 } else { 1.0 - p_e1 } * if e2 { p_e2 } else { 1.0 - p_e2 };
        let on = m * c_shares[k];
        cells[State { e1, e2, c: true }.index()] = on;
        cells[State { e1, e2, c: false }.index()] = m - on;
    }
    JointTable::new(cells, EvidenceKind::Independent)
}

fn draw_associated(config: &GenerationConfig, rng: &mut impl Rng) -> Result<JointTable> {
    let g = config.base_rate_guard;
    let targets = MarginTargets::new(
        guarded_uniform(rng, g),
        guarded_uniform(rng, g),
        guarded_uniform(rng, g),
    )?;
    let mut raw = [0.0; 8];
    for c in raw.iter_mut() {
        *c = rng.sample(Open01);
    }
    let start = JointTable::normalized(raw, EvidenceKind::Associated)?;
    ipf_fit(&start, &targets, config.ipf_tolerance, config.ipf_iteration_cap)
}

fn draw_independent(config: &GenerationConfig, rng: &mut impl Rng) -> Result<JointTable> {
    let g = config.base_rate_guard;
    let p_e1 = guarded_uniform(rng, g);
    let p_e2 = guarded_uniform(rng, g);
    let mut shares = [0.0; 4];
    for s in shares.iter_mut() {
        *s = rng.sample(Open01);
    }
    independent_from_draws(p_e1, p_e2, shares)
}

/// Generates network `index` of a batch, redrawing on fitting failure.
pub fn generate_one(config: &GenerationConfig, index: usize) -> Result<JointTable> {
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = network_rng(config.seed, index, attempt);
        let drawn = match config.kind {
            EvidenceKind::Associated => draw_associated(config, &mut rng),
            EvidenceKind::Independent => draw_independent(config, &mut rng),
            EvidenceKind::Unspecified => return Err(Error::InvalidConfig("unspecified kind".into())),
        };
        match drawn {
            Ok(table) => {
                let provenance = Provenance {
                    seed: config.seed,
                    index,
                    resamples: attempt,
                };
                return Ok(table.with_provenance(Some(provenance)));
            }
            Err(e) => last = Some(e),
        }
    }
    Err(Error::GenerationFailed {
        index,
        attempts: MAX_ATTEMPTS,
        source: Box::new(last.expect("at least one attempt")),
    })
}

/// Generates `config.count` networks of `config.kind`, in index order.
pub fn generate(config: &GenerationConfig) -> Result<Vec<JointTable>> {
    config.validate()?;
    (0..config.count)
        .into_par_iter()
        .map(|i| generate_one(config, i))
        .collect()
}

pub fn generate_associated(config: &GenerationConfig) -> Result<Vec<JointTable>> {
    generate(&GenerationConfig {
        kind: EvidenceKind::Associated,
        ..*config
    })
}

pub fn generate_independent(config: &GenerationConfig) -> Result<Vec<JointTable>> {
    generate(&GenerationConfig {
        kind: EvidenceKind::Independent,
        ..*config
    })
}
