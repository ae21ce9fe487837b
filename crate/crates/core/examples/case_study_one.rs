// Symmetric network with independent evidence: the independence rule is
// exact on average but wrong by about .055 at the corners.
//
// ```text
// cargo run --example case_study_one
// ```

use prospector_eval::case_study::case_study_one;
use prospector_eval::study::{default_grid, evaluate_network, sig6, summarize, EvaluationConfig, RuleStats};

pub fn run_example() -> prospector_eval::Result<RuleStats> {
    let table = case_study_one();
    let q = table.conditional_profile()?;
    println!("cells (index 4*e1 + 2*e2 + c): {:?}", table.cells());
    println!(
        "P(C|e1,e2): ff {} ft {} tf {} tt {}",
        sig6(q.ff),
        sig6(q.ft),
        sig6(q.tf),
        sig6(q.tt)
    );

    let records = evaluate_network("case-study-1", &table, &default_grid(), &EvaluationConfig::default())?;
    for r in &records {
        let o = r.outcome.as_ref().expect("the oracle solves every grid point");
        println!(
            "P'(E1) = {:.1}  P'(E2) = {:.1}  correct {}  independence rule {}",
            r.update.e1(),
            r.update.e2(),
            sig6(o.correct),
            sig6(o.prospector.independent)
        );
    }
    let stats = summarize(&records)?.rules.independent;
    println!("average signed error   {}", sig6(stats.average_signed));
    println!("average absolute error {}", sig6(stats.average_absolute));
    println!("maximum absolute error {}", sig6(stats.maximum_absolute));
    Ok(stats)
}

fn main() -> prospector_eval::Result<()> {
    run_example().map(|_| ())
}
