// Low base rates with strong evidence: the independence rule badly
// understates the conclusion when both pieces of evidence are certain.

use prospector_eval::case_study::{case_study_one, case_study_two};
use prospector_eval::engine::{infer, RuleSet};
use prospector_eval::oracle::correct_posterior;
use prospector_eval::study::{error_surface, sig6};
use prospector_eval::EvidenceUpdate;

/// Returns the largest absolute surface error of case studies one and two.
pub fn run_example() -> prospector_eval::Result<(f64, f64)> {
    let table = case_study_two();
    let r = table.base_rates();
    let q = table.conditional_profile()?;
    println!("P(E1) = {}, P(E2) = {}, P(C) = {}", sig6(r.e1), sig6(r.e2), sig6(r.c));
    println!(
        "P(C|e1,e2): ff {} ft {} tf {} tt {}",
        sig6(q.ff),
        sig6(q.ft),
        sig6(q.tf),
        sig6(q.tt)
    );

    let both = EvidenceUpdate::new(1.0, 1.0)?;
    let (estimate, trace) = infer(&table.network_view()?, RuleSet::Independent, &both)?;
    println!(
        "both certain: correct {}, independence rule {} (likelihood ratios {} and {})",
        sig6(correct_posterior(&table, &both)?),
        sig6(estimate),
        sig6(trace.steps[0].likelihood_ratio),
        sig6(trace.steps[1].likelihood_ratio)
    );

    let worst = |t| -> prospector_eval::Result<f64> {
        let s = error_surface(t, RuleSet::Independent, 0.05)?;
        Ok(s.iter().map(|p| p.signed_error.abs()).fold(0.0, f64::max))
    };
    let (one, two) = (worst(&case_study_one())?, worst(&table)?);
    println!(
        "largest error on a .05 surface: case study 1 {}, case study 2 {}",
        sig6(one),
        sig6(two)
    );
    Ok((one, two))
}

fn main() -> prospector_eval::Result<()> {
    run_example().map(|_| ())
}
