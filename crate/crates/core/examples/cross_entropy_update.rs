// Minimum cross-entropy updating of a joint table to new evidence
// probabilities, and how it compares with the independent-evidence
// mixture formula.

use prospector_eval::case_study::case_study_one;
use prospector_eval::oracle::{cross_entropy, independent_closed_form, mce_update, SolverSettings};
use prospector_eval::study::sig6;
use prospector_eval::table::Variable;
use prospector_eval::EvidenceUpdate;

pub fn run_example() -> prospector_eval::Result<f64> {
    let table = case_study_one();
    let update = EvidenceUpdate::new(0.8, 0.2)?;
    let updated = mce_update(&table, &update, SolverSettings::default())?;
    println!("iterations: {}", updated.iterations);
    println!(
        "P'(E1) = {}, P'(E2) = {}",
        sig6(updated.table.marginal(Variable::E1)),
        sig6(updated.table.marginal(Variable::E2))
    );
    println!(
        "divergence from the prior table: {}",
        sig6(cross_entropy(updated.table.cells(), table.cells()))
    );

    let before = table.conditional_profile()?;
    let after = updated.table.conditional_profile()?;
    println!("P(C|E1E2) before {} after {}", sig6(before.tt), sig6(after.tt));

    let closed = independent_closed_form(&table, &update)?;
    println!(
        "P'(C): iterative {}, mixture {}",
        sig6(updated.posterior()),
        sig6(closed)
    );
    Ok(updated.posterior())
}

fn main() -> prospector_eval::Result<()> {
    run_example().map(|_| ())
}
