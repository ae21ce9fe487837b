// A scaled-down version of the full study: both network classes,
// monotonicity filter, best rule per network.
//
// The full-size run is `prospector-eval report`.

use prospector_eval::study::{run_study, sig6, StudyConfig, StudyReport};

pub fn run_example() -> prospector_eval::Result<StudyReport> {
    let run = run_study(&StudyConfig::with_seed(7, 100))?;
    print!("{}", run.report.table_one_text());
    if let Some(rho) = run.report.strength_error_correlation {
        println!("strength/error Spearman correlation: {}", sig6(rho));
    }
    Ok(run.report)
}

fn main() -> prospector_eval::Result<()> {
    run_example().map(|_| ())
}
