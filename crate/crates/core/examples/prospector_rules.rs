// The three PROSPECTOR rule sets on one network, with their traces.

use prospector_eval::case_study::case_study_two;
use prospector_eval::engine::{infer, propagate, RuleSet};
use prospector_eval::study::sig6;
use prospector_eval::EvidenceUpdate;

pub fn run_example() -> prospector_eval::Result<Vec<(RuleSet, f64)>> {
    let view = case_study_two().network_view()?;
    for (i, link) in view.links.iter().enumerate() {
        println!(
            "E{}: P(E) {} P(C|E) {} P(C|~E) {}  at P'(E) = .5 -> {}",
            i + 1,
            sig6(link.p_e),
            sig6(link.p_c_given_e),
            sig6(link.p_c_given_not_e),
            sig6(propagate(link, 0.5))
        );
    }
    let update = EvidenceUpdate::new(0.9, 0.3)?;
    let mut answers = Vec::new();
    for rule in RuleSet::ALL {
        let (p, trace) = infer(&view, rule, &update)?;
        println!("{rule:<12} P'(C) = {}", sig6(p));
        for step in &trace.steps {
            println!(
                "    {:?}: posterior {} likelihood ratio {}",
                step.link,
                sig6(step.posterior),
                sig6(step.likelihood_ratio)
            );
        }
        answers.push((rule, p));
    }
    Ok(answers)
}

fn main() -> prospector_eval::Result<()> {
    run_example().map(|_| ())
}
