use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use prospector_eval::case_study;
use prospector_eval::engine::{LogicalLinks, RuleSet};
use prospector_eval::io::{self as files, FileError};
use prospector_eval::netgen::{generate, GenerationConfig};
use prospector_eval::oracle::{mce_update, EvidenceUpdate, SolverSettings};
use prospector_eval::parallel::{with_workers, WORKERS_ENV};
use prospector_eval::study::{
    crossed_grid, default_grid, error_surface_with, evaluate_network, evaluate_networks, run_study, sig6, summarize,
    EvaluationConfig, FilterMode, NamedNetwork, StudyConfig, StudyRun, DEFAULT_COUNT, DEFAULT_GRID_VALUES,
    DEFAULT_SEED,
};
use prospector_eval::table::{EvidenceKind, JointTable};

#[derive(Parser)]
#[command(
    name = "prospector-eval",
    version,
    about = "Evaluate PROSPECTOR's inference rules against minimum cross-entropy updating"
)]
struct Cli {
    /// Worker threads (output does not depend on this).
    #[arg(long, global = true, env = WORKERS_ENV, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random networks into a network file.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate networks from files and write results and report.
    Evaluate {
        /// Network files (repeatable).
        #[arg(long = "networks", required = true)]
        networks: Vec<PathBuf>,
        #[command(flatten)]
        eval: EvalFlags,
    },
    /// Generate both network classes from a seed and evaluate them.
    Report {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Networks per evidence-relation class.
        #[arg(long, default_value_t = DEFAULT_COUNT as u64, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[command(flatten)]
        eval: EvalFlags,
    },
    /// Reproduce one of the two built-in case studies.
    CaseStudy {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        id: u8,
        /// Error surface output.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.05, value_parser = parse_step)]
        step: f64,
    },
    /// Write the signed-error surface of one network.
    Surface {
        #[command(flatten)]
        network: NetworkSelection,
        #[arg(long, value_enum, default_value_t = Rule::Independent)]
        rule: Rule,
        #[arg(long, value_parser = parse_step)]
        step: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Links::Selected)]
        logical_links: Links,
    },
    /// Print the minimum cross-entropy posterior for one update.
    Oracle {
        #[command(flatten)]
        network: NetworkSelection,
        #[arg(long, value_parser = parse_probability)]
        e1: f64,
        #[arg(long, value_parser = parse_probability)]
        e2: f64,
    },
}

#[derive(Args)]
struct EvalFlags {
    /// Results CSV (one row per network and update).
    #[arg(long)]
    results: Option<PathBuf>,
    /// Report JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Comma-separated evidence probabilities, crossed for E1 and E2.
    #[arg(long, value_delimiter = ',', value_parser = parse_probability)]
    grid: Option<Vec<f64>>,
    /// Evaluate every network, including non-monotone ones.
    #[arg(long, conflicts_with = "literal_filter")]
    no_filter: bool,
    /// Only require monotonicity in E2 at each level of E1.
    #[arg(long)]
    literal_filter: bool,
    #[arg(long, value_enum, default_value_t = Links::Selected)]
    logical_links: Links,
}

#[derive(Args)]
struct NetworkSelection {
    /// Built-in case study (1 or 2).
    #[arg(
        long,
        value_parser = clap::value_parser!(u8).range(1..=2),
        conflicts_with = "networks",
        required_unless_present = "networks"
    )]
    case_study: Option<u8>,
    /// Network file.
    #[arg(long)]
    networks: Option<PathBuf>,
    /// Zero-based position in the network file.
    #[arg(long, default_value_t = 0)]
    index: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Independent,
    Associated,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Conjunctive,
    Disjunctive,
    Independent,
}

#[derive(Clone, Copy, ValueEnum)]
enum Links {
    Compound,
    Selected,
}

impl From<Rule> for RuleSet {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Conjunctive => RuleSet::Conjunctive,
            Rule::Disjunctive => RuleSet::Disjunctive,
            Rule::Independent => RuleSet::Independent,
        }
    }
}

impl From<Links> for LogicalLinks {
    fn from(l: Links) -> Self {
        match l {
            Links::Compound => LogicalLinks::Compound,
            Links::Selected => LogicalLinks::SelectedEvidence,
        }
    }
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is not a probability"))
    }
}

fn parse_step(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v <= 0.5 {
        Ok(v)
    } else {
        Err(format!("step {v} must lie in (0, 0.5]"))
    }
}

/// Failure with the exit code it maps to.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<prospector_eval::Error> for Failure {
    fn from(e: prospector_eval::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", path.display())))
}

fn evaluation_config(flags: &EvalFlags) -> Result<EvaluationConfig, Failure> {
    let grid = match &flags.grid {
        Some(values) => crossed_grid(values).map_err(|e| Failure::Usage(e.to_string()))?,
        None => default_grid(),
    };
    let filter = match (flags.no_filter, flags.literal_filter) {
        (true, _) => None,
        (false, true) => Some(FilterMode::Literal),
        (false, false) => Some(FilterMode::Full),
    };
    Ok(EvaluationConfig {
        grid,
        filter,
        logical_links: flags.logical_links.into(),
        solver: SolverSettings::default(),
    })
}

fn emit_run(run: &StudyRun, flags: &EvalFlags) -> Result<(), Failure> {
    if let Some(path) = &flags.results {
        let mut w = create(path)?;
        files::write_results(&mut w, &run.records)?;
        w.flush()?;
    }
    if let Some(path) = &flags.report {
        let mut w = create(path)?;
        files::write_report(&mut w, &run.report)?;
        w.flush()?;
    }
    print!("{}", run.report.table_one_text());
    if let Some(rho) = run.report.strength_error_correlation {
        println!("strength/error Spearman correlation: {}", sig6(rho));
    }
    Ok(())
}

fn select_network(sel: &NetworkSelection) -> Result<JointTable, Failure> {
    if let Some(id) = sel.case_study {
        return case_study::case_study(id).ok_or_else(|| Failure::Usage(format!("no case study {id}")));
    }
    let path = sel
        .networks
        .as_ref()
        .ok_or_else(|| Failure::Usage("no network selected".into()))?;
    let nets = files::load_networks(path)?;
    let count = nets.len();
    nets.into_iter()
        .nth(sel.index)
        .ok_or_else(|| Failure::Usage(format!("index {} out of range ({count} networks)", sel.index)))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate { kind, count, seed, out } => {
            let kind = match kind {
                Kind::Independent => EvidenceKind::Independent,
                Kind::Associated => EvidenceKind::Associated,
            };
            let nets = generate(&GenerationConfig::new(kind, count as usize, seed))?;
            let mut w = create(&out)?;
            files::write_networks(&mut w, &nets)?;
            w.flush()?;
            let resampled = nets
                .iter()
                .filter(|n| n.provenance().is_some_and(|p| p.resamples > 0))
                .count();
            eprintln!(
                "wrote {} {kind} networks to {} ({resampled} resampled)",
                nets.len(),
                out.display()
            );
        }
        Command::Evaluate { networks, eval } => {
            let config = evaluation_config(&eval)?;
            let mut named = Vec::new();
            for path in &networks {
                for table in files::load_networks(path)? {
                    let position = named.len();
                    named.push(NamedNetwork::from_position(table, position));
                }
            }
            if named.is_empty() {
                return Err(Failure::Usage("network files contain no networks".into()));
            }
            let run = evaluate_networks(&named, &config)?;
            emit_run(&run, &eval)?;
        }
        Command::Report { seed, count, eval } => {
            let mut config = StudyConfig::with_seed(seed, count as usize);
            config.evaluation = evaluation_config(&eval)?;
            let run = run_study(&config)?;
            emit_run(&run, &eval)?;
        }
        Command::CaseStudy { id, out, step } => {
            let table = case_study::case_study(id).ok_or_else(|| Failure::Usage(format!("no case study {id}")))?;
            let q = table.conditional_profile()?;
            let r = table.base_rates();
            println!("case study {id}");
            println!(
                "base rates: P(E1) = {}, P(E2) = {}, P(C) = {}",
                sig6(r.e1),
                sig6(r.e2),
                sig6(r.c)
            );
            println!(
                "P(C|~E1~E2) = {}, P(C|~E1E2) = {}, P(C|E1~E2) = {}, P(C|E1E2) = {}",
                sig6(q.ff),
                sig6(q.ft),
                sig6(q.tf),
                sig6(q.tt)
            );
            let config = EvaluationConfig::default();
            let records = evaluate_network(&format!("case-study-{id}"), &table, &config.grid, &config)?;
            let s = summarize(&records)?.rules.independent;
            println!(
                "independence rule over the {}-update grid {:?}:",
                records.len(),
                DEFAULT_GRID_VALUES
            );
            println!("  average signed error   {}", sig6(s.average_signed));
            println!("  average absolute error {}", sig6(s.average_absolute));
            println!("  maximum absolute error {}", sig6(s.maximum_absolute));
            let surface = error_surface_with(
                &table,
                RuleSet::Independent,
                step,
                LogicalLinks::default(),
                SolverSettings::default(),
            )?;
            let n = surface.len() as f64;
            let avg = surface.iter().map(|p| p.signed_error.abs()).sum::<f64>() / n;
            let max = surface.iter().map(|p| p.signed_error.abs()).fold(0.0, f64::max);
            println!(
                "surface (step {step}, {} points): average absolute {}, maximum absolute {}",
                surface.len(),
                sig6(avg),
                sig6(max)
            );
            let mut w = create(&out)?;
            files::write_surface(&mut w, &surface)?;
            w.flush()?;
        }
        Command::Surface {
            network,
            rule,
            step,
            out,
            logical_links,
        } => {
            let table = select_network(&network)?;
            let surface = error_surface_with(
                &table,
                rule.into(),
                step,
                logical_links.into(),
                SolverSettings::default(),
            )?;
            let mut w = create(&out)?;
            files::write_surface(&mut w, &surface)?;
            w.flush()?;
        }
        Command::Oracle { network, e1, e2 } => {
            let table = select_network(&network)?;
            let update = EvidenceUpdate::new(e1, e2)?;
            let updated = mce_update(&table, &update, SolverSettings::default())?;
            println!("{}", sig6(updated.posterior()));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers.map(|w| w as usize);
    match with_workers(workers, move || run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
