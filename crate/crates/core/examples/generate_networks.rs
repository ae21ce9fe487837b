// Draws a few networks of each evidence relation and writes them in the
// network file format.

use prospector_eval::io::to_json_string;
use prospector_eval::netgen::{generate, GenerationConfig};
use prospector_eval::study::sig6;
use prospector_eval::{EvidenceKind, JointTable};

pub fn run_example() -> Result<Vec<JointTable>, Box<dyn std::error::Error>> {
    let mut all = Vec::new();
    for kind in [EvidenceKind::Independent, EvidenceKind::Associated] {
        let nets = generate(&GenerationConfig::new(kind, 3, 42))?;
        for n in &nets {
            let r = n.base_rates();
            let q = n.conditional_profile()?;
            println!(
                "{kind:<11} P(E1) {:<9} P(E2) {:<9} P(C) {:<9} P(C|E1E2) {:<9} P(C|~E1~E2) {}",
                sig6(r.e1),
                sig6(r.e2),
                sig6(r.c),
                sig6(q.tt),
                sig6(q.ff)
            );
        }
        all.extend(nets);
    }
    println!("{}", to_json_string(&all[..1])?);
    Ok(all)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
