use serde::Serialize;

use crate::engine::{infer_with, LogicalLinks, RuleSet};
use crate::error::{Error, Result};
use crate::oracle::{mce_update, EvidenceUpdate, SolverSettings};
use crate::table::JointTable;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub e1: f64,
    pub e2: f64,
    /// `correct - prospector`.
    pub signed_error: f64,
}

/// `{0, step, 2·step, …, 1}`. When `1/step` is a whole number the points
/// are computed as `k/n` so that grid values such as .5 come out exact.
pub fn lattice(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidConfig(format!("surface step {step} outside (0, 0.5]")));
    }
    let n = (1.0 / step).round();
    if ((1.0 / step) - n).abs() < 1e-9 {
        let n = n as usize;
        return Ok((0..=n).map(|k| k as f64 / n as f64).collect());
    }
    let mut points: Vec<f64> = (0..).map(|k| k as f64 * step).take_while(|&x| x < 1.0).collect();
    points.push(1.0);
    Ok(points)
}

/// Signed error over the lattice, E1 outer and E2 inner.
pub fn error_surface(table: &JointTable, rule: RuleSet, step: f64) -> Result<Vec<SurfacePoint>> {
    error_surface_with(table, rule, step, LogicalLinks::default(), SolverSettings::default())
}

pub fn error_surface_with(
    table: &JointTable,
    rule: RuleSet,
    step: f64,
    links: LogicalLinks,
    solver: SolverSettings,
) -> Result<Vec<SurfacePoint>> {
    let values = lattice(step)?;
    let view = table.network_view()?;
    let mut points = Vec::with_capacity(values.len() * values.len());
    for &e1 in &values {
        for &e2 in &values {
            let update = EvidenceUpdate::new(e1, e2)?;
            let correct = mce_update(table, &update, solver)?.posterior();
            let (answer, _) = infer_with(&view, rule, &update, links)?;
            points.push(SurfacePoint {
                e1,
                e2,
                signed_error: correct - answer,
            });
        }
    }
    Ok(points)
}
