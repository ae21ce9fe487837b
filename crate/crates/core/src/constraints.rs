//! Builds joint tables from linear constraints on their cells.
//!
//! Marginal and conditional statements about `(E1, E2, C)` are all linear
//! in the eight cells: `P(A) = v` sums the matching cells, and
//! `P(A | B) = v` becomes `P(A & B) - v·P(B) = 0`. Eight independent
//! statements pin down a table exactly.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};
use crate::table::{EvidenceKind, JointTable, State};

/// Cells this far below zero are treated as rounding noise.
const NEGATIVE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraint {
    pub coefficients: [f64; 8],
    pub rhs: f64,
}

impl LinearConstraint {
    /// Cells sum to one.
    pub fn total() -> Self {
        LinearConstraint {
            coefficients: [1.0; 8],
            rhs: 1.0,
        }
    }

    /// `P(event) = value`.
    pub fn probability(event: impl Fn(State) -> bool, value: f64) -> Self {
        let mut coefficients = [0.0; 8];
        for s in State::all().filter(|&s| event(s)) {
            coefficients[s.index()] = 1.0;
        }
        LinearConstraint {
            coefficients,
            rhs: value,
        }
    }

    /// `P(event | given) = value`.
    pub fn conditional(event: impl Fn(State) -> bool, given: impl Fn(State) -> bool, value: f64) -> Self {
        let mut coefficients = [0.0; 8];
        for s in State::all().filter(|&s| given(s)) {
            coefficients[s.index()] = if event(s) { 1.0 - value } else { -value };
        }
        LinearConstraint { coefficients, rhs: 0.0 }
    }

    /// Residual of the constraint on a table's cells.
    pub fn residual(&self, cells: &[f64; 8]) -> f64 {
        self.coefficients.iter().zip(cells).map(|(a, x)| a * x).sum::<f64>() - self.rhs
    }
}

/// Solves exactly eight independent constraints for the unique table
/// satisfying them.
pub fn solve_table(constraints: &[LinearConstraint], kind: EvidenceKind) -> Result<JointTable> {
    if constraints.len() != 8 {
        return Err(Error::SingularConstraints);
    }
    let a = SMatrix::<f64, 8, 8>::from_fn(|r, c| constraints[r].coefficients[c]);
    let b = SVector::<f64, 8>::from_fn(|r, _| constraints[r].rhs);
    let x = a.full_piv_lu().solve(&b).ok_or(Error::SingularConstraints)?;

    let mut cells = [0.0; 8];
    for (cell, &v) in cells.iter_mut().zip(x.iter()) {
        if v < -NEGATIVE_SLACK {
            return Err(Error::InvalidTable(format!(
                "constraints imply a negative cell ({v:e})"
            )));
        }
        *cell = v.max(0.0);
    }
    JointTable::new(cells, kind)
}
