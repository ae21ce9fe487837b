// Signed error surface of the independence rule as a coarse text plot.

use prospector_eval::case_study::case_study_two;
use prospector_eval::engine::RuleSet;
use prospector_eval::study::{error_surface, lattice, SurfacePoint};

pub fn run_example() -> prospector_eval::Result<Vec<SurfacePoint>> {
    let step = 0.1;
    let surface = error_surface(&case_study_two(), RuleSet::Independent, step)?;
    let n = lattice(step)?.len();
    println!("rows: P'(E1) from 1 down to 0; columns: P'(E2) from 0 to 1; values x100");
    for row in surface.chunks(n).rev() {
        let line: Vec<String> = row.iter().map(|p| format!("{:6.1}", 100.0 * p.signed_error)).collect();
        println!("{:.1} {}", row[0].e1, line.join(""));
    }
    Ok(surface)
}

fn main() -> prospector_eval::Result<()> {
    run_example().map(|_| ())
}
