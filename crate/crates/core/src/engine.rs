//! PROSPECTOR's propagation formula and its three evidence-combination rules.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::EvidenceUpdate;
use crate::table::NetworkView;

/// Probabilities are clamped to `[ODDS_CLAMP, 1 - ODDS_CLAMP]` before
/// conversion to odds.
pub const ODDS_CLAMP: f64 = 1e-12;
/// Tolerance for the law-of-total-probability check on a link.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-9;

/// Parameters of one evidence → conclusion link.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    pub p_c: f64,
    pub p_e: f64,
    pub p_c_given_e: f64,
    pub p_c_given_not_e: f64,
}

impl LinkParams {
    /// Checks ranges only. Links that violate the law of total probability
    /// are accepted; see [`LinkParams::is_consistent`].
    pub fn new(p_c: f64, p_e: f64, p_c_given_e: f64, p_c_given_not_e: f64) -> Result<Self> {
        for (what, value) in [
            ("p_c", p_c),
            ("p_c_given_e", p_c_given_e),
            ("p_c_given_not_e", p_c_given_not_e),
        ] {
            check_probability(what, value)?;
        }
        if !(p_e > 0.0 && p_e < 1.0) {
            return Err(Error::InvalidProbability {
                what: "p_e (must lie strictly inside (0, 1))",
                value: p_e,
            });
        }
        Ok(LinkParams {
            p_c,
            p_e,
            p_c_given_e,
            p_c_given_not_e,
        })
    }

    /// `P(C) - [P(C|E)P(E) + P(C|~E)(1 - P(E))]`.
    pub fn consistency_gap(&self) -> f64 {
        self.p_c - (self.p_c_given_e * self.p_e + self.p_c_given_not_e * (1.0 - self.p_e))
    }

    pub fn is_consistent(&self) -> bool {
        self.consistency_gap().abs() <= CONSISTENCY_TOLERANCE
    }
}

pub(crate) fn check_probability(what: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidProbability { what, value })
    }
}

/// How evidence probabilities are combined before (or after) propagation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum RuleSet {
    Conjunctive,
    Disjunctive,
    Independent,
}

impl RuleSet {
    pub const ALL: [RuleSet; 3] = [RuleSet::Conjunctive, RuleSet::Disjunctive, RuleSet::Independent];

    pub fn name(self) -> &'static str {
        match self {
            RuleSet::Conjunctive => "conjunctive",
            RuleSet::Disjunctive => "disjunctive",
            RuleSet::Independent => "independent",
        }
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleSet {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "conjunctive" | "and" => Ok(RuleSet::Conjunctive),
            "disjunctive" | "or" => Ok(RuleSet::Disjunctive),
            "independent" => Ok(RuleSet::Independent),
            _ => Err(format!("unknown rule set `{s}`")),
        }
    }
}

/// Which link the conjunctive and disjunctive rules propagate through.
///
/// `Compound` treats the conjunction (disjunction) as one node with its own
/// link parameters, as derived in [`NetworkView`]. `SelectedEvidence`
/// propagates through the link of whichever evidence node supplied the
/// MIN (MAX), with ties going to E1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogicalLinks {
    Compound,
    #[default]
    SelectedEvidence,
}

/// Which link a trace step went through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkRole {
    /// Zero-based evidence index.
    Evidence(usize),
    Conjunction,
    Disjunction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvidenceStep {
    pub link: LinkRole,
    /// New evidence probability fed into the link, if known.
    pub p_new_e: Option<f64>,
    /// Propagated posterior `P'(C|E_i)` before clamping.
    pub posterior: f64,
    /// `O'(C|E_i)`, computed from the clamped posterior.
    pub odds: f64,
    /// `L'_i = O'(C|E_i) / O(C)`.
    pub likelihood_ratio: f64,
}

/// Intermediate quantities of one inference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InferenceTrace {
    pub rule: RuleSet,
    pub steps: Vec<EvidenceStep>,
    /// `P'(E)` after MIN/MAX combination.
    pub combined_evidence: Option<f64>,
    /// Set when MIN/MAX saw tied new evidence probabilities.
    pub tie: bool,
    pub prior_odds: f64,
    pub combined_odds: f64,
    pub probability: f64,
    /// Some probability hit the odds clamp.
    pub clamped: bool,
    /// Some link used violated the law of total probability.
    pub inconsistent_link: bool,
}

fn clamp_for_odds(p: f64) -> (f64, bool) {
    let c = p.clamp(ODDS_CLAMP, 1.0 - ODDS_CLAMP);
    (c, c != p)
}

/// Odds of a probability, after clamping.
pub fn odds(p: f64) -> f64 {
    let (p, _) = clamp_for_odds(p);
    p / (1.0 - p)
}

pub fn probability_from_odds(odds: f64) -> f64 {
    odds / (1.0 + odds)
}

/// Piecewise-linear interpolation through `(0, P(C|~E))`, `(P(E), P(C))`
/// and `(1, P(C|E))`, clamped to `[0, 1]`.
pub fn propagate(link: &LinkParams, p_new_e: f64) -> f64 {
    let p = if p_new_e <= link.p_e {
        link.p_c_given_not_e + (link.p_c - link.p_c_given_not_e) * p_new_e / link.p_e
    } else {
        link.p_c + (link.p_c_given_e - link.p_c) * (p_new_e - link.p_e) / (1.0 - link.p_e)
    };
    p.clamp(0.0, 1.0)
}

/// Conjunctive combination: `P'(E) = MIN P'(E_i)`.
pub fn combine_and(new_evidence: &[f64]) -> Result<f64> {
    select(new_evidence, |a, b| a < b).map(|(_, p, _)| p)
}

/// Disjunctive combination: `P'(E) = MAX P'(E_i)`.
pub fn combine_or(new_evidence: &[f64]) -> Result<f64> {
    select(new_evidence, |a, b| a > b).map(|(_, p, _)| p)
}

/// Returns (index, value, tied) of the first extreme element under `better`.
fn select(values: &[f64], better: impl Fn(f64, f64) -> bool) -> Result<(usize, f64, bool)> {
    let (&first, rest) = values.split_first().ok_or(Error::EmptyEvidence)?;
    let mut best = (0, first);
    for (i, &v) in rest.iter().enumerate() {
        if better(v, best.1) {
            best = (i + 1, v);
        }
    }
    let tied = values.iter().filter(|&&v| v == best.1).count() > 1;
    Ok((best.0, best.1, tied))
}

/// Independence rule: posteriors become effective likelihood ratios that
/// are multiplied into the prior odds.
pub fn combine_independent(posteriors: &[f64], p_c: f64) -> (f64, InferenceTrace) {
    let (prior, mut clamped) = clamp_for_odds(p_c);
    let prior_odds = prior / (1.0 - prior);
    let mut combined_odds = prior_odds;
    let mut steps = Vec::with_capacity(posteriors.len());
    for (i, &posterior) in posteriors.iter().enumerate() {
        let (p, hit) = clamp_for_odds(posterior);
        clamped |= hit;
        let odds = p / (1.0 - p);
        let likelihood_ratio = odds / prior_odds;
        combined_odds *= likelihood_ratio;
        steps.push(EvidenceStep {
            link: LinkRole::Evidence(i),
            p_new_e: None,
            posterior,
            odds,
            likelihood_ratio,
        });
    }
    let probability = probability_from_odds(combined_odds);
    let trace = InferenceTrace {
        rule: RuleSet::Independent,
        steps,
        combined_evidence: None,
        tie: false,
        prior_odds,
        combined_odds,
        probability,
        clamped,
        inconsistent_link: false,
    };
    (probability, trace)
}

fn check_inputs(links: &[LinkParams], p_new: &[f64]) -> Result<()> {
    if links.is_empty() {
        return Err(Error::EmptyEvidence);
    }
    if links.len() != p_new.len() {
        return Err(Error::InvalidConfig(format!(
            "{} links but {} new evidence probabilities",
            links.len(),
            p_new.len()
        )));
    }
    for &p in p_new {
        check_probability("new evidence probability", p)?;
    }
    Ok(())
}

/// Single-link trace for the MIN/MAX rules.
fn logical_trace(rule: RuleSet, link: &LinkParams, role: LinkRole, p_new_e: f64, tie: bool) -> (f64, InferenceTrace) {
    let posterior = propagate(link, p_new_e);
    let (prior, c1) = clamp_for_odds(link.p_c);
    let (post, c2) = clamp_for_odds(posterior);
    let prior_odds = prior / (1.0 - prior);
    let odds = post / (1.0 - post);
    let likelihood_ratio = odds / prior_odds;
    let trace = InferenceTrace {
        rule,
        steps: vec![EvidenceStep {
            link: role,
            p_new_e: Some(p_new_e),
            posterior,
            odds,
            likelihood_ratio,
        }],
        combined_evidence: Some(p_new_e),
        tie,
        prior_odds,
        combined_odds: prior_odds * likelihood_ratio,
        probability: posterior,
        clamped: c1 || c2,
        inconsistent_link: !link.is_consistent(),
    };
    (posterior, trace)
}

/// Inference over `k ≥ 1` individual evidence links.
///
/// MIN/MAX rules propagate through the link of the selected evidence node
/// (first one on ties); the independence rule propagates every link and
/// combines likelihood ratios.
pub fn infer_links(links: &[LinkParams], rule: RuleSet, p_new: &[f64]) -> Result<(f64, InferenceTrace)> {
    check_inputs(links, p_new)?;
    let inconsistent = links.iter().any(|l| !l.is_consistent());
    match rule {
        RuleSet::Conjunctive | RuleSet::Disjunctive => {
            let (index, value, tie) = if rule == RuleSet::Conjunctive {
                select(p_new, |a, b| a < b)?
            } else {
                select(p_new, |a, b| a > b)?
            };
            let (p, mut trace) = logical_trace(rule, &links[index], LinkRole::Evidence(index), value, tie);
            trace.inconsistent_link = inconsistent;
            Ok((p, trace))
        }
        RuleSet::Independent => {
            let p_c = links[0].p_c;
            let posteriors: Vec<f64> = links.iter().zip(p_new).map(|(l, &p)| propagate(l, p)).collect();
            let (p, mut trace) = combine_independent(&posteriors, p_c);
            for (step, &p) in trace.steps.iter_mut().zip(p_new) {
                step.p_new_e = Some(p);
            }
            trace.inconsistent_link = inconsistent;
            Ok((p, trace))
        }
    }
}

/// MIN/MAX inference through a single compound link.
pub fn infer_compound(link: &LinkParams, rule: RuleSet, p_new: &[f64]) -> Result<(f64, InferenceTrace)> {
    for &p in p_new {
        check_probability("new evidence probability", p)?;
    }
    let (value, tie, role) = match rule {
        RuleSet::Conjunctive => {
            let (_, v, t) = select(p_new, |a, b| a < b)?;
            (v, t, LinkRole::Conjunction)
        }
        RuleSet::Disjunctive => {
            let (_, v, t) = select(p_new, |a, b| a > b)?;
            (v, t, LinkRole::Disjunction)
        }
        RuleSet::Independent => {
            return Err(Error::InvalidConfig(
                "the independence rule has no compound link".into(),
            ));
        }
    };
    Ok(logical_trace(rule, link, role, value, tie))
}

/// Inference for a two-evidence network with the default
/// [`LogicalLinks::SelectedEvidence`] treatment of MIN/MAX rules.
pub fn infer(view: &NetworkView, rule: RuleSet, update: &EvidenceUpdate) -> Result<(f64, InferenceTrace)> {
    infer_with(view, rule, update, LogicalLinks::SelectedEvidence)
}

pub fn infer_with(
    view: &NetworkView,
    rule: RuleSet,
    update: &EvidenceUpdate,
    mode: LogicalLinks,
) -> Result<(f64, InferenceTrace)> {
    let p_new = [update.e1(), update.e2()];
    match (rule, mode) {
        (RuleSet::Independent, _) | (_, LogicalLinks::SelectedEvidence) => infer_links(&view.links, rule, &p_new),
        (RuleSet::Conjunctive, LogicalLinks::Compound) => infer_compound(&view.conjunction, rule, &p_new),
        (RuleSet::Disjunctive, LogicalLinks::Compound) => infer_compound(&view.disjunction, rule, &p_new),
    }
}
