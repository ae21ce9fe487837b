//! The accuracy study: filter networks, sweep evidence updates, compare
//! PROSPECTOR's answers with the minimum cross-entropy answers, and
//! aggregate the errors per network and per evidence-relation class.
//!
//! Errors are signed as `correct - prospector` throughout.

mod stats;
mod surface;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use stats::{average_ranks, pearson, spearman};
pub use surface::{error_surface, error_surface_with, lattice, SurfacePoint};

use crate::engine::{infer_with, LogicalLinks, RuleSet};
use crate::error::{Error, Result};
use crate::netgen::{generate, GenerationConfig};
use crate::oracle::{mce_update, EvidenceUpdate, SolverSettings};
use crate::table::{ConditionalProfile, EvidenceKind, JointTable, Provenance};

/// Evidence probabilities each node takes in the default grid.
pub const DEFAULT_GRID_VALUES: [f64; 5] = [0.0, 0.2, 0.5, 0.8, 1.0];
/// Seed of the shipped study configuration.
pub const DEFAULT_SEED: u64 = 1986;
/// Networks generated per evidence-relation class in the shipped configuration.
pub const DEFAULT_COUNT: usize = 400;

/// One value per rule set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PerRule<T> {
    pub conjunctive: T,
    pub disjunctive: T,
    pub independent: T,
}

impl<T: Copy> PerRule<T> {
    pub fn from_fn(mut f: impl FnMut(RuleSet) -> T) -> Self {
        PerRule {
            conjunctive: f(RuleSet::Conjunctive),
            disjunctive: f(RuleSet::Disjunctive),
            independent: f(RuleSet::Independent),
        }
    }

    pub fn get(&self, rule: RuleSet) -> T {
        match rule {
            RuleSet::Conjunctive => self.conjunctive,
            RuleSet::Disjunctive => self.disjunctive,
            RuleSet::Independent => self.independent,
        }
    }

    pub fn get_mut(&mut self, rule: RuleSet) -> &mut T {
        match rule {
            RuleSet::Conjunctive => &mut self.conjunctive,
            RuleSet::Disjunctive => &mut self.disjunctive,
            RuleSet::Independent => &mut self.independent,
        }
    }
}

/// Which monotone ordering of the conditional profile a network follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonotonicityPattern {
    /// Conclusion probability nonincreasing in the evidence.
    Pattern1,
    /// Conclusion probability nondecreasing in the evidence.
    Pattern2,
    Rejected,
}

impl MonotonicityPattern {
    pub fn name(self) -> &'static str {
        match self {
            MonotonicityPattern::Pattern1 => "pattern1",
            MonotonicityPattern::Pattern2 => "pattern2",
            MonotonicityPattern::Rejected => "rejected",
        }
    }
}

/// How many orderings the monotonicity filter checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterMode {
    /// Monotone in both E1 and E2 (four comparisons per pattern).
    #[default]
    Full,
    /// Monotone in E2 at each level of E1 (two comparisons per pattern).
    Literal,
}

/// Classifies a profile; equalities satisfy either pattern, and a profile
/// meeting both is reported as [`MonotonicityPattern::Pattern1`].
pub fn monotonicity_pattern(profile: &ConditionalProfile) -> MonotonicityPattern {
    monotonicity_pattern_with(profile, FilterMode::Full)
}

pub fn monotonicity_pattern_with(q: &ConditionalProfile, mode: FilterMode) -> MonotonicityPattern {
    let mut pairs = vec![(q.ff, q.ft), (q.tf, q.tt)];
    if mode == FilterMode::Full {
        pairs.extend([(q.ff, q.tf), (q.ft, q.tt)]);
    }
    if pairs.iter().all(|&(lo, hi)| lo >= hi) {
        MonotonicityPattern::Pattern1
    } else if pairs.iter().all(|&(lo, hi)| lo <= hi) {
        MonotonicityPattern::Pattern2
    } else {
        MonotonicityPattern::Rejected
    }
}

/// Options shared by every network evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationConfig {
    pub grid: Vec<EvidenceUpdate>,
    /// `None` evaluates every network.
    pub filter: Option<FilterMode>,
    pub logical_links: LogicalLinks,
    pub solver: SolverSettings,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            grid: default_grid(),
            filter: Some(FilterMode::Full),
            logical_links: LogicalLinks::default(),
            solver: SolverSettings::default(),
        }
    }
}

/// Every pairing of the values for E1 (outer) and E2 (inner).
pub fn crossed_grid(values: &[f64]) -> Result<Vec<EvidenceUpdate>> {
    if values.is_empty() {
        return Err(Error::InvalidConfig("evidence grid is empty".into()));
    }
    let mut grid = Vec::with_capacity(values.len() * values.len());
    for &e1 in values {
        for &e2 in values {
            grid.push(EvidenceUpdate::new(e1, e2)?);
        }
    }
    Ok(grid)
}

/// The 25-update grid over {0, .2, .5, .8, 1}².
pub fn default_grid() -> Vec<EvidenceUpdate> {
    crossed_grid(&DEFAULT_GRID_VALUES).expect("default grid is valid")
}

/// Answers for one update.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordOutcome {
    pub prospector: PerRule<f64>,
    pub correct: f64,
}

impl RecordOutcome {
    pub fn signed_error(&self, rule: RuleSet) -> f64 {
        self.correct - self.prospector.get(rule)
    }

    pub fn absolute_error(&self, rule: RuleSet) -> f64 {
        self.signed_error(rule).abs()
    }
}

/// One network solved for one evidence update.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationRecord {
    pub network: String,
    pub kind: EvidenceKind,
    pub pattern: MonotonicityPattern,
    pub update: EvidenceUpdate,
    /// A failure message when the engine or oracle could not answer.
    pub outcome: std::result::Result<RecordOutcome, String>,
}

/// A network with the identifier used in records and reports.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedNetwork {
    pub id: String,
    pub table: JointTable,
}

impl NamedNetwork {
    pub fn new(id: impl Into<String>, table: JointTable) -> Self {
        NamedNetwork { id: id.into(), table }
    }

    /// Names a network by its provenance, or by its position in a list.
    pub fn from_position(table: JointTable, position: usize) -> Self {
        let id = match table.provenance() {
            Some(p) => format!("{}-{}-{:04}", table.kind(), p.seed, p.index),
            None => format!("network-{position:04}"),
        };
        NamedNetwork { id, table }
    }
}

/// Solves a network for every update in `grid`.
///
/// Network-level problems (no PROSPECTOR view) are errors; per-update
/// oracle failures are recorded in the affected record.
pub fn evaluate_network(
    id: &str,
    table: &JointTable,
    grid: &[EvidenceUpdate],
    config: &EvaluationConfig,
) -> Result<Vec<EvaluationRecord>> {
    let view = table.network_view()?;
    let pattern = monotonicity_pattern_with(&table.conditional_profile()?, config.filter.unwrap_or_default());
    let records = grid
        .iter()
        .map(|update| {
            let outcome = (|| -> Result<RecordOutcome> {
                let correct = mce_update(table, update, config.solver)?.posterior();
                let mut prospector = PerRule::default();
                for rule in RuleSet::ALL {
                    *prospector.get_mut(rule) = infer_with(&view, rule, update, config.logical_links)?.0;
                }
                Ok(RecordOutcome { prospector, correct })
            })()
            .map_err(|e| e.to_string());
            EvaluationRecord {
                network: id.to_string(),
                kind: table.kind(),
                pattern,
                update: *update,
                outcome,
            }
        })
        .collect();
    Ok(records)
}

/// Mean signed, mean absolute and maximum absolute error of one rule set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleStats {
    pub average_signed: f64,
    pub average_absolute: f64,
    pub maximum_absolute: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkErrorSummary {
    pub network: String,
    pub updates: usize,
    pub rules: PerRule<RuleStats>,
    /// Rule set with the smallest average absolute error.
    pub best: RuleSet,
    /// Another rule set attained the same average absolute error.
    pub tie: bool,
}

impl NetworkErrorSummary {
    pub fn best_stats(&self) -> RuleStats {
        self.rules.get(self.best)
    }
}

/// Tie-break preference for the best rule set.
pub const TIE_BREAK_ORDER: [RuleSet; 3] = [RuleSet::Independent, RuleSet::Conjunctive, RuleSet::Disjunctive];

/// Aggregates one network's records.
pub fn summarize(records: &[EvaluationRecord]) -> Result<NetworkErrorSummary> {
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidConfig("no records to summarize".into()))?;
    let mut outcomes = Vec::with_capacity(records.len());
    for r in records {
        match &r.outcome {
            Ok(o) => outcomes.push(*o),
            Err(message) => {
                return Err(Error::NetworkFailed {
                    network: r.network.clone(),
                    message: message.clone(),
                })
            }
        }
    }
    let n = outcomes.len() as f64;
    let rules = PerRule::from_fn(|rule| {
        let mut s = RuleStats::default();
        for o in &outcomes {
            let e = o.signed_error(rule);
            s.average_signed += e;
            s.average_absolute += e.abs();
            s.maximum_absolute = s.maximum_absolute.max(e.abs());
        }
        s.average_signed /= n;
        s.average_absolute /= n;
        s
    });
    let best_value = TIE_BREAK_ORDER
        .iter()
        .map(|&r| rules.get(r).average_absolute)
        .fold(f64::INFINITY, f64::min);
    let winners: Vec<RuleSet> = TIE_BREAK_ORDER
        .iter()
        .copied()
        .filter(|&r| rules.get(r).average_absolute == best_value)
        .collect();
    Ok(NetworkErrorSummary {
        network: first.network.clone(),
        updates: outcomes.len(),
        rules,
        best: winners[0],
        tie: winners.len() > 1,
    })
}

/// Conditional-probability structure behind the rule-set errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// PROSPECTOR's single stand-in for P(C|~E1~E2), P(C|~E1E2), P(C|E1~E2).
    pub conjunctive_approximation: f64,
    pub conjunctive_spread: f64,
    /// |P(C|E1E2) - mean of the other three conditionals|.
    pub conjunctive_gap: f64,
    /// PROSPECTOR's single stand-in for P(C|~E1E2), P(C|E1~E2), P(C|E1E2).
    pub disjunctive_approximation: f64,
    pub disjunctive_spread: f64,
    /// |P(C|~E1~E2) - mean of the other three conditionals|.
    pub disjunctive_gap: f64,
    /// |P(C|E1~E2) - P(C|E1E2)|.
    pub associative_strength: f64,
}

fn spread(values: [f64; 3]) -> f64 {
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    max - min
}

pub fn diagnostics(table: &JointTable) -> Result<Diagnostics> {
    let q = table.conditional_profile()?;
    let view = table.network_view()?;
    Ok(Diagnostics {
        conjunctive_approximation: view.conjunction.p_c_given_not_e,
        conjunctive_spread: spread([q.ff, q.ft, q.tf]),
        conjunctive_gap: (q.tt - (q.ff + q.ft + q.tf) / 3.0).abs(),
        disjunctive_approximation: view.disjunction.p_c_given_e,
        disjunctive_spread: spread([q.ft, q.tf, q.tt]),
        disjunctive_gap: (q.ff - (q.ft + q.tf + q.tt) / 3.0).abs(),
        associative_strength: (q.tf - q.tt).abs(),
    })
}

/// Per-network entry of a [`StudyReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetworkEntry {
    pub id: String,
    pub kind: EvidenceKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub pattern: MonotonicityPattern,
    /// Passed the filter (or the filter was off).
    pub evaluated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<NetworkErrorSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

/// One row of the Table-1 block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassSummary {
    pub kind: EvidenceKind,
    pub generated: usize,
    pub evaluated: usize,
    pub best_counts: PerRule<usize>,
    /// Mean over networks of the best rule set's average absolute error.
    pub overall_average_error: f64,
    /// Mean over networks of the best rule set's maximum absolute error.
    pub overall_maximum_error: f64,
}

impl ClassSummary {
    pub fn best_share(&self, rule: RuleSet) -> f64 {
        if self.evaluated == 0 {
            0.0
        } else {
            self.best_counts.get(rule) as f64 / self.evaluated as f64
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StrengthErrorPoint {
    pub associative_strength: f64,
    pub best_average_absolute_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StudyReport {
    pub filter: Option<FilterMode>,
    pub logical_links: LogicalLinks,
    pub grid_size: usize,
    pub table_one: Vec<ClassSummary>,
    /// Spearman correlation of the strength/error pairs.
    pub strength_error_correlation: Option<f64>,
    pub strength_error: Vec<StrengthErrorPoint>,
    pub networks: Vec<NetworkEntry>,
}

impl StudyReport {
    pub fn class(&self, kind: EvidenceKind) -> Option<&ClassSummary> {
        self.table_one.iter().find(|c| c.kind == kind)
    }

    pub fn evaluated_count(&self) -> usize {
        self.networks.iter().filter(|n| n.evaluated).count()
    }

    /// The Table-1 block as aligned text, six significant digits.
    pub fn table_one_text(&self) -> String {
        let mut out = String::new();
        out.push_str("Most accurate PROSPECTOR rule set\n");
        out.push_str(&format!(
            "{:<12} {:>9} {:>9} {:>11} {:>11} {:>11} {:>14} {:>14}\n",
            "relation",
            "generated",
            "evaluated",
            "conjunctive",
            "disjunctive",
            "independent",
            "overall avg",
            "overall max"
        ));
        for c in &self.table_one {
            out.push_str(&format!(
                "{:<12} {:>9} {:>9} {:>11} {:>11} {:>11} {:>14} {:>14}\n",
                c.kind.to_string(),
                c.generated,
                c.evaluated,
                c.best_counts.conjunctive,
                c.best_counts.disjunctive,
                c.best_counts.independent,
                sig6(c.overall_average_error),
                sig6(c.overall_maximum_error),
            ));
        }
        out
    }
}

/// Six significant digits for console output.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = (5 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.digits$}")
}

/// Records and report of one study run.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyRun {
    pub report: StudyReport,
    pub records: Vec<EvaluationRecord>,
}

/// Filters, evaluates and aggregates a list of networks.
///
/// Class rows appear for every evidence kind present, independent first.
/// Any engine or oracle failure aborts with the network's id.
pub fn evaluate_networks(networks: &[NamedNetwork], config: &EvaluationConfig) -> Result<StudyRun> {
    if config.grid.is_empty() {
        return Err(Error::InvalidConfig("evidence grid is empty".into()));
    }
    let fail = |id: &str, e: Error| Error::NetworkFailed {
        network: id.to_string(),
        message: e.to_string(),
    };

    let evaluated: Vec<(NetworkEntry, Vec<EvaluationRecord>)> = networks
        .par_iter()
        .map(|net| {
            let profile = net.table.conditional_profile().map_err(|e| fail(&net.id, e))?;
            let pattern = monotonicity_pattern_with(&profile, config.filter.unwrap_or_default());
            let passes = config.filter.is_none() || pattern != MonotonicityPattern::Rejected;
            let mut entry = NetworkEntry {
                id: net.id.clone(),
                kind: net.table.kind(),
                provenance: net.table.provenance(),
                pattern,
                evaluated: passes,
                summary: None,
                diagnostics: None,
            };
            if !passes {
                return Ok((entry, Vec::new()));
            }
            let records = evaluate_network(&net.id, &net.table, &config.grid, config).map_err(|e| fail(&net.id, e))?;
            entry.summary = Some(summarize(&records)?);
            entry.diagnostics = Some(diagnostics(&net.table).map_err(|e| fail(&net.id, e))?);
            Ok((entry, records))
        })
        .collect::<Result<_>>()?;

    let mut entries = Vec::with_capacity(evaluated.len());
    let mut records = Vec::new();
    for (entry, recs) in evaluated {
        entries.push(entry);
        records.extend(recs);
    }

    let mut table_one = Vec::new();
    for kind in [
        EvidenceKind::Independent,
        EvidenceKind::Associated,
        EvidenceKind::Unspecified,
    ] {
        let members: Vec<&NetworkEntry> = entries.iter().filter(|e| e.kind == kind).collect();
        if members.is_empty() {
            continue;
        }
        let summaries: Vec<&NetworkErrorSummary> = members.iter().filter_map(|e| e.summary.as_ref()).collect();
        let mut best_counts = PerRule::<usize>::default();
        for s in &summaries {
            *best_counts.get_mut(s.best) += 1;
        }
        let mean = |f: &dyn Fn(&NetworkErrorSummary) -> f64| {
            if summaries.is_empty() {
                0.0
            } else {
                summaries.iter().map(|s| f(s)).sum::<f64>() / summaries.len() as f64
            }
        };
        table_one.push(ClassSummary {
            kind,
            generated: members.len(),
            evaluated: summaries.len(),
            best_counts,
            overall_average_error: mean(&|s| s.best_stats().average_absolute),
            overall_maximum_error: mean(&|s| s.best_stats().maximum_absolute),
        });
    }

    let strength_error: Vec<StrengthErrorPoint> = entries
        .iter()
        .filter_map(|e| match (&e.summary, &e.diagnostics) {
            (Some(s), Some(d)) => Some(StrengthErrorPoint {
                associative_strength: d.associative_strength,
                best_average_absolute_error: s.best_stats().average_absolute,
            }),
            _ => None,
        })
        .collect();
    let xs: Vec<f64> = strength_error.iter().map(|p| p.associative_strength).collect();
    let ys: Vec<f64> = strength_error.iter().map(|p| p.best_average_absolute_error).collect();

    let report = StudyReport {
        filter: config.filter,
        logical_links: config.logical_links,
        grid_size: config.grid.len(),
        table_one,
        strength_error_correlation: spearman(&xs, &ys),
        strength_error,
        networks: entries,
    };
    Ok(StudyRun { report, records })
}

/// Generation settings for both classes plus evaluation options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub independent: GenerationConfig,
    pub associated: GenerationConfig,
    pub evaluation: EvaluationConfig,
}

impl StudyConfig {
    /// `count` networks per class; the associated class uses `seed + 1`.
    pub fn with_seed(seed: u64, count: usize) -> Self {
        StudyConfig {
            independent: GenerationConfig::new(EvidenceKind::Independent, count, seed),
            associated: GenerationConfig::new(EvidenceKind::Associated, count, seed.wrapping_add(1)),
            evaluation: EvaluationConfig::default(),
        }
    }
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig::with_seed(DEFAULT_SEED, DEFAULT_COUNT)
    }
}

/// Generates both network classes and evaluates them.
pub fn run_study(config: &StudyConfig) -> Result<StudyRun> {
    let mut networks = Vec::new();
    for gen in [&config.independent, &config.associated] {
        let tables = generate(gen)?;
        networks.extend(
            tables
                .into_iter()
                .enumerate()
                .map(|(i, t)| NamedNetwork::from_position(t, i)),
        );
    }
    evaluate_networks(&networks, &config.evaluation)
}
