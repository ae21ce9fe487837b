//! The two worked networks, rebuilt from their defining constraints.

use crate::constraints::{solve_table, LinearConstraint};
use crate::table::{EvidenceKind, JointTable};

/// Equal base rates of .5, independent evidence, and conclusion
/// probabilities .10 / .50 / .50 / .90 across the evidence states.
pub fn case_study_one_constraints() -> Vec<LinearConstraint> {
    vec![
        LinearConstraint::total(),
        LinearConstraint::probability(|s| s.e1, 0.5),
        LinearConstraint::probability(|s| s.e2, 0.5),
        LinearConstraint::probability(|s| s.e1 && s.e2, 0.25),
        LinearConstraint::conditional(|s| s.c, |s| !s.e1 && !s.e2, 0.10),
        LinearConstraint::conditional(|s| s.c, |s| !s.e1 && s.e2, 0.50),
        LinearConstraint::conditional(|s| s.c, |s| s.e1 && !s.e2, 0.50),
        LinearConstraint::conditional(|s| s.c, |s| s.e1 && s.e2, 0.90),
    ]
}

/// Rare independent evidence strongly suggesting a rare conclusion:
/// P(E1) = .01, P(E2) = .02, P(C) = .05, P(C|E1) = .60, P(C|E2) = .70,
/// P(C|E1 & E2) = .95.
pub fn case_study_two_constraints() -> Vec<LinearConstraint> {
    vec![
        LinearConstraint::total(),
        LinearConstraint::probability(|s| s.e1, 0.01),
        LinearConstraint::probability(|s| s.e2, 0.02),
        LinearConstraint::probability(|s| s.e1 && s.e2, 0.01 * 0.02),
        LinearConstraint::probability(|s| s.c, 0.05),
        LinearConstraint::conditional(|s| s.c, |s| s.e1, 0.60),
        LinearConstraint::conditional(|s| s.c, |s| s.e2, 0.70),
        LinearConstraint::conditional(|s| s.c, |s| s.e1 && s.e2, 0.95),
    ]
}

pub fn case_study_one() -> JointTable {
    solve_table(&case_study_one_constraints(), EvidenceKind::Independent)
        .expect("case study 1 constraints determine a valid table")
}

pub fn case_study_two() -> JointTable {
    solve_table(&case_study_two_constraints(), EvidenceKind::Independent)
        .expect("case study 2 constraints determine a valid table")
}

/// Looks up a built-in network by number (1 or 2).
pub fn case_study(id: u8) -> Option<JointTable> {
    match id {
        1 => Some(case_study_one()),
        2 => Some(case_study_two()),
        _ => None,
    }
}
