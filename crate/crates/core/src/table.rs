//! Contingency-table representation of a two-evidence, one-conclusion network.
//!
//! A [`JointTable`] holds the eight joint probabilities over `(E1, E2, C)`.
//! Cells are stored with `E1` varying slowest and `C` fastest, so the flat
//! index of a cell is `4·e1 + 2·e2 + c` with `false = 0` and `true = 1`.
//! Every file format in this crate uses that order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::LinkParams;
use crate::error::{Error, Result};

/// Maximum allowed drift of the cell sum from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;
/// Maximum allowed `|P(e1 & e2) - P(e1)P(e2)|` for tables tagged independent.
pub const INDEPENDENCE_TOLERANCE: f64 = 1e-9;
/// Evidence-state marginals below this are reported as degenerate.
pub const DEGENERATE_MARGINAL: f64 = 1e-9;

/// Flat cell index for a joint state.
#[inline]
pub const fn cell_index(e1: bool, e2: bool, c: bool) -> usize {
    4 * (e1 as usize) + 2 * (e2 as usize) + (c as usize)
}

/// Joint state of the three binary variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub e1: bool,
    pub e2: bool,
    pub c: bool,
}

impl State {
    pub const fn from_index(index: usize) -> Self {
        State {
            e1: index & 4 != 0,
            e2: index & 2 != 0,
            c: index & 1 != 0,
        }
    }

    pub const fn index(self) -> usize {
        cell_index(self.e1, self.e2, self.c)
    }

    pub fn all() -> impl Iterator<Item = State> {
        (0..8).map(State::from_index)
    }
}

/// One of the three binary variables of a network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    E1,
    E2,
    C,
}

impl Variable {
    pub const ALL: [Variable; 3] = [Variable::E1, Variable::E2, Variable::C];

    pub const fn evidence(i: usize) -> Variable {
        if i == 0 {
            Variable::E1
        } else {
            Variable::E2
        }
    }

    pub const fn value(self, s: State) -> bool {
        match self {
            Variable::E1 => s.e1,
            Variable::E2 => s.e2,
            Variable::C => s.c,
        }
    }
}

/// The four evidence states in canonical order: (F,F), (F,T), (T,F), (T,T).
pub const EVIDENCE_STATES: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];

/// How the evidence variables of a table relate to each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EvidenceKind {
    Independent,
    Associated,
    #[default]
    Unspecified,
}

impl fmt::Display for EvidenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvidenceKind::Independent => "independent",
            EvidenceKind::Associated => "associated",
            EvidenceKind::Unspecified => "unspecified",
        })
    }
}

/// Where a generated table came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub index: usize,
    /// Number of times the network was redrawn after a fitting failure.
    pub resamples: usize,
}

/// Base rates of the three variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseRates {
    pub e1: f64,
    pub e2: f64,
    pub c: f64,
}

/// `P(C | e1, e2)` for each evidence state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalProfile {
    pub ff: f64,
    pub ft: f64,
    pub tf: f64,
    pub tt: f64,
}

impl ConditionalProfile {
    pub fn new(ff: f64, ft: f64, tf: f64, tt: f64) -> Self {
        ConditionalProfile { ff, ft, tf, tt }
    }

    pub fn get(&self, e1: bool, e2: bool) -> f64 {
        match (e1, e2) {
            (false, false) => self.ff,
            (false, true) => self.ft,
            (true, false) => self.tf,
            (true, true) => self.tt,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.ff, self.ft, self.tf, self.tt]
    }
}

/// PROSPECTOR's view of a table: the conclusion prior, one link per
/// evidence node, and the compound links PROSPECTOR uses for its
/// conjunctive and disjunctive rules.
///
/// The compound links treat `E1 & E2` (resp. `E1 | E2`) as a single node
/// whose base rate is computed as if the evidence were independent, which
/// is how PROSPECTOR approximates the three non-selected conditionals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkView {
    pub p_c: f64,
    pub links: [LinkParams; 2],
    pub conjunction: LinkParams,
    pub disjunction: LinkParams,
}

impl NetworkView {
    pub fn p_e(&self, evidence: usize) -> f64 {
        self.links[evidence].p_e
    }

    pub fn p_c_given_e(&self, evidence: usize) -> f64 {
        self.links[evidence].p_c_given_e
    }

    pub fn p_c_given_not_e(&self, evidence: usize) -> f64 {
        self.links[evidence].p_c_given_not_e
    }
}

/// A single invariant violation found by [`validate_cells`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    NonFinite {
        index: usize,
        value: f64,
    },
    Negative {
        index: usize,
        value: f64,
    },
    Normalization {
        sum: f64,
    },
    IndependenceMismatch {
        e1: bool,
        e2: bool,
        joint: f64,
        product: f64,
    },
    DegenerateMarginal {
        e1: bool,
        e2: bool,
        marginal: f64,
    },
}

impl Violation {
    /// Degenerate marginals make a table unusable for conditioning but do not
    /// break the probability-distribution invariants.
    pub fn is_structural(&self) -> bool {
        !matches!(self, Violation::DegenerateMarginal { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite { index, value } => write!(f, "cell {index} is not finite ({value})"),
            Violation::Negative { index, value } => write!(f, "cell {index} is negative ({value:e})"),
            Violation::Normalization { sum } => write!(f, "cells sum to {sum:.17} instead of 1"),
            Violation::IndependenceMismatch { e1, e2, joint, product } => write!(
                f,
                "evidence state ({e1}, {e2}) has joint {joint:e} but product of base rates {product:e}"
            ),
            Violation::DegenerateMarginal { e1, e2, marginal } => {
                write!(f, "evidence state ({e1}, {e2}) has degenerate marginal {marginal:e}")
            }
        }
    }
}

/// Result of [`validate_cells`]; empty when every invariant holds.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_structurally_valid(&self) -> bool {
        !self.violations.iter().any(Violation::is_structural)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every table invariant on raw cells and reports all violations.
pub fn validate_cells(cells: &[f64; 8], kind: EvidenceKind) -> ValidationReport {
    let mut violations = Vec::new();
    for (index, &value) in cells.iter().enumerate() {
        if !value.is_finite() {
            violations.push(Violation::NonFinite { index, value });
        } else if value < 0.0 {
            violations.push(Violation::Negative { index, value });
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }

    let sum: f64 = cells.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        violations.push(Violation::Normalization { sum });
    }

    let pair = |e1: bool, e2: bool| cells[cell_index(e1, e2, false)] + cells[cell_index(e1, e2, true)];
    let p_e1: f64 = pair(true, false) + pair(true, true);
    let p_e2: f64 = pair(false, true) + pair(true, true);

    if kind == EvidenceKind::Independent {
        for (e1, e2) in EVIDENCE_STATES {
            let joint = pair(e1, e2);
            let product = if e1 { p_e1 } else { 1.0 - p_e1 } * if e2 { p_e2 } else { 1.0 - p_e2 };
            if (joint - product).abs() > INDEPENDENCE_TOLERANCE {
                violations.push(Violation::IndependenceMismatch { e1, e2, joint, product });
            }
        }
    }

    for (e1, e2) in EVIDENCE_STATES {
        let marginal = pair(e1, e2);
        if marginal < DEGENERATE_MARGINAL {
            violations.push(Violation::DegenerateMarginal { e1, e2, marginal });
        }
    }

    ValidationReport { violations }
}

/// Joint distribution over `(E1, E2, C)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable")]
pub struct JointTable {
    kind: EvidenceKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
    cells: [f64; 8],
}

#[derive(Deserialize)]
struct RawTable {
    #[serde(default)]
    kind: EvidenceKind,
    #[serde(default)]
    provenance: Option<Provenance>,
    cells: [f64; 8],
}

impl TryFrom<RawTable> for JointTable {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        Ok(JointTable::new(raw.cells, raw.kind)?.with_provenance(raw.provenance))
    }
}

impl JointTable {
    /// Builds a table, rejecting negative or non-finite cells, normalization
    /// drift beyond [`NORMALIZATION_TOLERANCE`], and independence mismatches
    /// for tables tagged [`EvidenceKind::Independent`].
    ///
    /// Degenerate evidence marginals are allowed here; [`JointTable::validate`]
    /// reports them.
    pub fn new(cells: [f64; 8], kind: EvidenceKind) -> Result<Self> {
        let report = validate_cells(&cells, kind);
        if !report.is_structurally_valid() {
            return Err(Error::InvalidTable(report.to_string()));
        }
        Ok(JointTable {
            kind,
            provenance: None,
            cells,
        })
    }

    /// Divides by the cell sum first. For assembling tables from
    /// unnormalized weights; not a way around the normalization check.
    pub fn normalized(mut cells: [f64; 8], kind: EvidenceKind) -> Result<Self> {
        let sum: f64 = cells.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::InvalidTable(format!("cannot normalize cells with sum {sum}")));
        }
        cells.iter_mut().for_each(|c| *c /= sum);
        JointTable::new(cells, kind)
    }

    pub fn uniform() -> Self {
        JointTable {
            kind: EvidenceKind::Unspecified,
            provenance: None,
            cells: [0.125; 8],
        }
    }

    /// Rebuilds cells from evidence-state marginals (canonical order) and
    /// the conditional profile.
    pub fn from_profile(
        evidence_marginals: [f64; 4],
        profile: &ConditionalProfile,
        kind: EvidenceKind,
    ) -> Result<Self> {
        let mut cells = [0.0; 8];
        for (k, (e1, e2)) in EVIDENCE_STATES.into_iter().enumerate() {
            let q = profile.get(e1, e2);
            cells[cell_index(e1, e2, true)] = evidence_marginals[k] * q;
            cells[cell_index(e1, e2, false)] = evidence_marginals[k] * (1.0 - q);
        }
        JointTable::new(cells, kind)
    }

    pub fn with_provenance(mut self, provenance: Option<Provenance>) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn with_kind(self, kind: EvidenceKind) -> Result<Self> {
        JointTable::new(self.cells, kind).map(|t| t.with_provenance(self.provenance))
    }

    pub fn cells(&self) -> &[f64; 8] {
        &self.cells
    }

    pub fn kind(&self) -> EvidenceKind {
        self.kind
    }

    pub fn provenance(&self) -> Option<Provenance> {
        self.provenance
    }

    pub fn cell(&self, e1: bool, e2: bool, c: bool) -> f64 {
        self.cells[cell_index(e1, e2, c)]
    }

    /// Total probability of the states matching `event`.
    pub fn probability(&self, event: impl Fn(State) -> bool) -> f64 {
        State::all().filter(|&s| event(s)).map(|s| self.cells[s.index()]).sum()
    }

    /// Probability that `var` is true.
    pub fn marginal(&self, var: Variable) -> f64 {
        self.probability(|s| var.value(s))
    }

    /// `P(e1, e2)`, summing out the conclusion.
    pub fn evidence_marginal(&self, e1: bool, e2: bool) -> f64 {
        self.cell(e1, e2, false) + self.cell(e1, e2, true)
    }

    pub fn evidence_marginals(&self) -> [f64; 4] {
        EVIDENCE_STATES.map(|(e1, e2)| self.evidence_marginal(e1, e2))
    }

    pub fn base_rates(&self) -> BaseRates {
        BaseRates {
            e1: self.probability(|s| s.e1),
            e2: self.probability(|s| s.e2),
            c: self.probability(|s| s.c),
        }
    }

    pub fn conditional_profile(&self) -> Result<ConditionalProfile> {
        let mut q = [0.0; 4];
        for (k, (e1, e2)) in EVIDENCE_STATES.into_iter().enumerate() {
            let m = self.evidence_marginal(e1, e2);
            if m <= 0.0 {
                return Err(Error::ZeroMarginal { e1, e2 });
            }
            q[k] = self.cell(e1, e2, true) / m;
        }
        Ok(ConditionalProfile::new(q[0], q[1], q[2], q[3]))
    }

    /// Derives PROSPECTOR's link parameters from the table.
    pub fn network_view(&self) -> Result<NetworkView> {
        let rates = self.base_rates();
        let p_c = rates.c;
        let mut links = [LinkParams::default(); 2];
        for (i, p_e) in [rates.e1, rates.e2].into_iter().enumerate() {
            if !(p_e > 0.0 && p_e < 1.0) {
                return Err(Error::DegenerateBaseRate {
                    evidence: i + 1,
                    base_rate: p_e,
                });
            }
            let is_e = |s: State| if i == 0 { s.e1 } else { s.e2 };
            let c_and_e = self.probability(|s| s.c && is_e(s));
            let c_and_not_e = self.probability(|s| s.c && !is_e(s));
            links[i] = LinkParams {
                p_c,
                p_e,
                p_c_given_e: c_and_e / p_e,
                p_c_given_not_e: c_and_not_e / (1.0 - p_e),
            };
        }
        let profile = self.conditional_profile()?;

        let conj_p_e = rates.e1 * rates.e2;
        let conj_rest = self.cell(false, false, true) + self.cell(false, true, true) + self.cell(true, false, true);
        let conjunction = LinkParams {
            p_c,
            p_e: conj_p_e,
            p_c_given_e: profile.tt,
            p_c_given_not_e: (conj_rest / (1.0 - conj_p_e)).clamp(0.0, 1.0),
        };

        let disj_p_not_e = (1.0 - rates.e1) * (1.0 - rates.e2);
        let disj_rest = self.cell(false, true, true) + self.cell(true, false, true) + self.cell(true, true, true);
        let disjunction = LinkParams {
            p_c,
            p_e: 1.0 - disj_p_not_e,
            p_c_given_e: (disj_rest / (1.0 - disj_p_not_e)).clamp(0.0, 1.0),
            p_c_given_not_e: profile.ff,
        };

        Ok(NetworkView {
            p_c,
            links,
            conjunction,
            disjunction,
        })
    }

    pub fn validate(&self) -> ValidationReport {
        validate_cells(&self.cells, self.kind)
    }
}
