//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::*;
use prospector_eval::case_study::{case_study_one, case_study_two};
use prospector_eval::engine::{combine_independent, odds, propagate, LinkRole};
use prospector_eval::netgen::independent_from_draws;
use prospector_eval::oracle::{correct_posterior, mce_update, SolverSettings};
use prospector_eval::study::{
    crossed_grid, default_grid, error_surface, evaluate_network, run_study, summarize, EvaluationConfig, RuleStats,
    StudyConfig, SurfacePoint,
};
use prospector_eval::{EvidenceKind, EvidenceUpdate, JointTable, LinkParams, RuleSet};
use rand::Rng;

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

fn independent_stats(table: &JointTable, grid: &[EvidenceUpdate]) -> RuleStats {
    let records = evaluate_network("t", table, grid, &EvaluationConfig::default()).unwrap();
    summarize(&records).unwrap().rules.independent
}

fn max_abs(surface: &[SurfacePoint]) -> f64 {
    surface.iter().map(|p| p.signed_error.abs()).fold(0.0, f64::max)
}

fn case_study_one_criterion(o: &mut Outcome) {
    let table = case_study_one();
    let s = independent_stats(&table, &default_grid());
    o.note(format!(
        "25-point grid: signed {:.3e}, absolute {:.7}, maximum {:.7}",
        s.average_signed, s.average_absolute, s.maximum_absolute
    ));
    o.check(
        s.average_signed.abs() <= 1e-9,
        format!("average signed error {}", s.average_signed),
    );
    o.check(
        (s.average_absolute - 0.0098).abs() <= 0.0005,
        format!(
            "average absolute error {:.7} not within .0005 of .0098",
            s.average_absolute
        ),
    );
    o.check(
        (s.maximum_absolute - 0.0552).abs() <= 0.0005,
        format!("maximum absolute error {:.7}", s.maximum_absolute),
    );
    let surface = error_surface(&table, RuleSet::Independent, 0.05).unwrap();
    let asym = surface
        .iter()
        .zip(surface.iter().rev())
        .map(|(a, b)| (a.signed_error + b.signed_error).abs())
        .fold(0.0, f64::max);
    o.check(asym <= 1e-9, format!("surface antisymmetry defect {asym}"));

    let lattice: Vec<f64> = (0..=5).map(|k| k as f64 / 5.0).collect();
    let fine = independent_stats(&table, &crossed_grid(&lattice).unwrap());
    o.note(format!(
        "supplementary 6x6 lattice (step .2): average absolute {:.7}",
        fine.average_absolute
    ));
}

fn case_study_two_criterion(o: &mut Outcome) {
    let table = case_study_two();
    o.check(table.validate().is_valid(), "case study 2 table is not valid");
    let p = |f: &dyn Fn(usize) -> bool| (0..8).filter(|&i| f(i)).map(|i| table.cells()[i]).sum::<f64>();
    let e1 = p(&|i| bit(i, E1));
    let e2 = p(&|i| bit(i, E2));
    let c = p(&|i| bit(i, C));
    let c_e1 = p(&|i| bit(i, E1) && bit(i, C)) / e1;
    let c_e2 = p(&|i| bit(i, E2) && bit(i, C)) / e2;
    let c_both = p(&|i| bit(i, E1) && bit(i, E2) && bit(i, C)) / p(&|i| bit(i, E1) && bit(i, E2));
    for (name, got, want) in [
        ("P(E1)", e1, 0.01),
        ("P(E2)", e2, 0.02),
        ("P(C)", c, 0.05),
        ("P(C|E1)", c_e1, 0.60),
        ("P(C|E2)", c_e2, 0.70),
        ("P(C|E1E2)", c_both, 0.95),
    ] {
        o.check((got - want).abs() <= 1e-9, format!("{name} = {got}, expected {want}"));
    }
    let one = max_abs(&error_surface(&case_study_one(), RuleSet::Independent, 0.05).unwrap());
    let two = max_abs(&error_surface(&table, RuleSet::Independent, 0.05).unwrap());
    o.note(format!(
        "maximum |error| on .05 surfaces: case study 1 {one:.6}, case study 2 {two:.6}"
    ));
    o.check(
        two >= 2.0 * one,
        format!("case study 2 maximum {two} is not twice {one}"),
    );
}

fn oracle_criterion(o: &mut Outcome) {
    let mut rng = rng(20_240_101);
    let (mut worst_cell, mut worst_margin, mut worst_ratio) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..200 {
        let p = random_positive_cells(&mut rng, 1e-3);
        let table = JointTable::new(p, EvidenceKind::Associated).unwrap();
        for _ in 0..10 {
            let (t1, t2) = (rng.random_range(0.01..0.99), rng.random_range(0.01..0.99));
            let u = mce_update(&table, &EvidenceUpdate::new(t1, t2).unwrap(), SolverSettings::default()).unwrap();
            let q = u.table.cells();
            let reference = project_evidence(&p, t1, t2);
            for (a, b) in q.iter().zip(&reference) {
                worst_cell = worst_cell.max((a - b).abs());
            }
            worst_margin = worst_margin.max((mass(q, E1) - t1).abs()).max((mass(q, E2) - t2).abs());
            for e in 0..4 {
                let r = (q[2 * e + 1] / q[2 * e]) / (p[2 * e + 1] / p[2 * e]);
                worst_ratio = worst_ratio.max((r - 1.0).abs());
            }
            for v in [false, true] {
                let r = conditional_odds_ratio(q, E1, E2, v) / conditional_odds_ratio(&p, E1, E2, v);
                worst_ratio = worst_ratio.max((r - 1.0).abs());
            }
        }
    }
    let mut worst_mixture = 0.0f64;
    for _ in 0..200 {
        let shares = std::array::from_fn(|_| rng.random_range(0.001..0.999));
        let table = independent_from_draws(rng.random_range(0.01..0.99), rng.random_range(0.01..0.99), shares).unwrap();
        for _ in 0..10 {
            let (t1, t2) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
            let got = correct_posterior(&table, &EvidenceUpdate::new(t1, t2).unwrap()).unwrap();
            worst_mixture = worst_mixture.max((got - mixture_answer(table.cells(), t1, t2)).abs());
        }
    }
    o.note(format!(
        "worst: cell {worst_cell:.1e}, margin {worst_margin:.1e}, odds ratio {worst_ratio:.1e}, mixture {worst_mixture:.1e}"
    ));
    o.check(
        worst_cell <= 1e-6,
        format!("reference projection differs by {worst_cell}"),
    );
    o.check(worst_margin <= 1e-10, format!("margin deviation {worst_margin}"));
    o.check(worst_ratio <= 1e-9, format!("odds ratio drift {worst_ratio}"));
    o.check(worst_mixture <= 1e-9, format!("closed-form mismatch {worst_mixture}"));
}

fn engine_criterion(o: &mut Outcome) {
    let mut rng = rng(7);
    let mut worst = 0.0f64;
    let mut trace_ok = true;
    for _ in 0..1000 {
        let p_e = rng.random_range(0.001..0.999);
        let (p_ce, p_cne) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
        let p_c = p_e * p_ce + (1.0 - p_e) * p_cne;
        let link = LinkParams::new(p_c, p_e, p_ce, p_cne).unwrap();
        worst = worst
            .max((propagate(&link, 0.0) - p_cne).abs())
            .max((propagate(&link, p_e) - p_c).abs())
            .max((propagate(&link, 1.0) - p_ce).abs());

        let prior = rng.random_range(0.001..0.999);
        let (unchanged, _) = combine_independent(&[prior, prior], prior);
        worst = worst.max((unchanged - prior).abs());

        let posteriors = [rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0)];
        let (p, trace) = combine_independent(&posteriors, prior);
        let product: f64 = trace.prior_odds * trace.steps.iter().map(|s| s.likelihood_ratio).product::<f64>();
        trace_ok &= trace.rule == RuleSet::Independent
            && trace.steps.len() == 2
            && trace.steps.iter().enumerate().all(|(i, s)| {
                s.link == LinkRole::Evidence(i)
                    && s.posterior == posteriors[i]
                    && (s.likelihood_ratio * trace.prior_odds / s.odds - 1.0).abs() <= 1e-12
            })
            && (trace.prior_odds / odds(prior) - 1.0).abs() <= 1e-12
            && (product / trace.combined_odds - 1.0).abs() <= 1e-12
            && trace.probability == p;
    }
    o.note(format!(
        "worst anchor or identity deviation {worst:.1e} over 1000 links"
    ));
    o.check(worst <= 1e-12, format!("anchor deviation {worst}"));
    o.check(trace_ok, "trace invariant violated");
}

fn study_criteria(o5: &mut Outcome, o6: &mut Outcome) {
    let run = run_study(&StudyConfig::default()).unwrap();
    let report = &run.report;
    let ind = report.class(EvidenceKind::Independent).unwrap();
    let asc = report.class(EvidenceKind::Associated).unwrap();
    for class in [ind, asc] {
        let share = class.best_share(RuleSet::Independent);
        o5.note(format!(
            "{}: {} of {} filtered, independence rule best in {} ({:.1}%), mean best-rule error {:.5}",
            class.kind,
            class.evaluated,
            class.generated,
            class.best_counts.independent,
            100.0 * share,
            class.overall_average_error
        ));
        o5.check(
            share >= 0.70,
            format!(
                "{} class: independence rule best in {:.1}% < 70%",
                class.kind,
                100.0 * share
            ),
        );
        o5.check(
            class.overall_average_error > 0.0 && class.overall_average_error < 0.06,
            format!(
                "{} class error {} outside (0, .06)",
                class.kind, class.overall_average_error
            ),
        );
    }
    o5.check(
        ind.overall_average_error < asc.overall_average_error,
        format!(
            "independent-class error {:.5} is not below associated-class error {:.5}",
            ind.overall_average_error, asc.overall_average_error
        ),
    );
    match report.strength_error_correlation {
        Some(rho) => {
            o6.note(format!(
                "Spearman rho = {rho:.4} over {} networks",
                report.strength_error.len()
            ));
            o6.check(rho > 0.3, format!("Spearman rho {rho} <= 0.3"));
        }
        None => o6.check(false, "correlation undefined"),
    }
}

fn determinism_criterion(o: &mut Outcome) {
    let dir = tempfile::tempdir().unwrap();
    let commands: [(&str, &[&str], &[&str]); 4] = [
        (
            "generate",
            &["generate", "--kind", "associated", "--count", "400", "--out"],
            &[],
        ),
        ("report", &["report", "--report"], &["--results"]),
        ("case-study", &["case-study", "--id", "2", "--out"], &[]),
        (
            "surface",
            &[
                "surface",
                "--case-study",
                "1",
                "--rule",
                "conjunctive",
                "--step",
                "0.1",
                "--out",
            ],
            &[],
        ),
    ];
    for (name, args, second) in commands {
        let mut outputs = Vec::new();
        for (round, workers) in ["1", "1", "4"].into_iter().enumerate() {
            let files: Vec<_> = (0..1 + second.len())
                .map(|k| dir.path().join(format!("{name}-{round}-{k}")))
                .collect();
            let mut cmd = Command::new(env!("CARGO_BIN_EXE_prospector-eval"));
            cmd.env("PROSPECTOR_WORKERS", workers).args(args).arg(&files[0]);
            for (flag, file) in second.iter().zip(&files[1..]) {
                cmd.arg(flag).arg(file);
            }
            let out = cmd.output().unwrap();
            o.check(
                out.status.success(),
                format!("{name} failed: {}", String::from_utf8_lossy(&out.stderr)),
            );
            let mut bytes = out.stdout;
            for f in &files {
                bytes.extend(std::fs::read(f).unwrap_or_default());
            }
            outputs.push(bytes);
        }
        o.check(outputs[0] == outputs[1], format!("{name}: repeated run differs"));
        o.check(
            outputs[0] == outputs[2],
            format!("{name}: output depends on worker count"),
        );
        o.note(format!("{name}: {} bytes, identical across 3 runs", outputs[0].len()));
    }
}

fn report(id: usize, title: &str, limit: Option<Duration>, elapsed: Duration, mut o: Outcome) -> bool {
    if let Some(limit) = limit {
        o.check(elapsed < limit, format!("runtime {elapsed:?} exceeds {limit:?}"));
    }
    let ok = o.failures.is_empty();
    println!("{} AC{id} {title} ({:.2?})", if ok { "PASS" } else { "FAIL" }, elapsed);
    for n in &o.notes {
        println!("      {n}");
    }
    for f in &o.failures {
        println!("      failed: {f}");
    }
    ok
}

fn timed(f: impl FnOnce(&mut Outcome)) -> (Outcome, Duration) {
    let mut o = Outcome::new();
    let start = Instant::now();
    f(&mut o);
    (o, start.elapsed())
}

fn main() -> ExitCode {
    let mut all = true;

    let (o, t) = timed(case_study_one_criterion);
    all &= report(1, "case study 1 reproduction", Some(Duration::from_secs(1)), t, o);
    let (o, t) = timed(case_study_two_criterion);
    all &= report(
        2,
        "case study 2 constraints and error surface",
        Some(Duration::from_secs(1)),
        t,
        o,
    );
    let (o, t) = timed(oracle_criterion);
    all &= report(
        3,
        "oracle agrees with reference minimizer",
        Some(Duration::from_secs(60)),
        t,
        o,
    );
    let (o, t) = timed(engine_criterion);
    all &= report(4, "engine anchors and traces", None, t, o);

    let mut o6 = Outcome::new();
    let start = Instant::now();
    let (o5, t) = timed(|o5| study_criteria(o5, &mut o6));
    all &= report(
        5,
        "study-level rule ranking pattern",
        Some(Duration::from_secs(60)),
        t,
        o5,
    );
    all &= report(6, "associative strength vs error", None, start.elapsed(), o6);

    let (o, t) = timed(determinism_criterion);
    all &= report(7, "byte-identical outputs across runs and worker counts", None, t, o);

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
