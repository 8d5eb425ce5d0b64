//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line and enforcing its runtime budget. All value comparisons are exact.
//!
//! Criterion 4 note: the trivial-curve free energies pass; the pinned sign
//! of the two-Casimir closed-form value is jointly unsatisfiable with
//! criterion 2 (free energies are invariant under y → -y, so their sign is
//! intrinsic; the two printed closed forms disagree, and exhaustive
//! closed-surface gluing counts side with criterion 2). The check is kept
//! as stated and fails honestly there.

use std::time::{Duration, Instant};
use toprec::suites::{run_suite, SuiteReport};

fn run(name: &str) -> SuiteReport {
    run_suite(name, 1).expect("known suite").remove(0)
}

fn report(criterion: &str, reports: &[(&SuiteReport, &[&str])], budget: Duration) {
    let mut pass = true;
    let mut failures = vec![];
    let mut elapsed = Duration::ZERO;
    for (rep, prefixes) in reports {
        for c in &rep.checks {
            if !prefixes.is_empty() && !prefixes.iter().any(|p| c.id.starts_with(p)) {
                continue;
            }
            elapsed += c.elapsed;
            if !c.pass {
                pass = false;
                failures.push(format!(
                    "{}.{}: expected {} got {}",
                    rep.name, c.id, c.expected, c.got
                ));
            }
        }
    }
    println!(
        "CRITERION {criterion}: {} ({} ms, budget {} ms)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_millis(),
        budget.as_millis()
    );
    assert!(
        elapsed <= budget,
        "criterion {criterion} exceeded its runtime budget: {elapsed:?} > {budget:?}"
    );
    assert!(pass, "criterion {criterion} failed:\n{}", failures.join("\n"));
}

#[test]
fn criterion_01_airy_baseline() {
    let rep = run("kontsevich");
    report(
        "1 (airy baseline)",
        &[(&rep, &["airy."])],
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_02_kontsevich_printed_formulas() {
    let rep = run("kontsevich");
    report(
        "2 (printed listings + F2)",
        &[(&rep, &["tuple", "even-times", "f2-at-t9"])],
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_03_map_counts() {
    let rep = run("maps");
    report(
        "3 (map counts)",
        &[(
            &rep,
            &["planar", "genus1", "annulus", "pants"],
        )],
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_04_plancherel() {
    let rep = run("plancherel");
    eprintln!(
        "note: the t2.f2 closed-form sign cannot hold together with \
         criterion 2 (free energies are y-flip invariant, and the two \
         published values pin opposite orientations); the engine follows \
         the orientation confirmed by brute-force surface counts. See \
         README \"Known verification note\"."
    );
    report(
        "4 (partition-curve free energies)",
        &[(&rep, &["trivial.", "t2."])],
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_05_weil_petersson() {
    let rep = run("weil-petersson");
    report(
        "5 (volume dictionary)",
        &[(&rep, &[])],
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_06_invariance_suite() {
    let rep = run("invariants");
    report(
        "6 (invariance suite)",
        &[(&rep, &[])],
        Duration::from_secs(300),
    );
}

#[test]
fn criterion_07_diagram_oracle() {
    let rep = run("diagrams");
    report(
        "7 (diagrammatic oracle)",
        &[(&rep, &[])],
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_08_loop_equations() {
    let rep = run("maps");
    report(
        "8 (loop equations)",
        &[(&rep, &["loop-"])],
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_09_kernel() {
    let rep = run("kernel");
    report("9 (kernel)", &[(&rep, &[])], Duration::from_secs(10));
}

#[test]
fn criterion_10_mirror_identity() {
    let rep = run("plancherel");
    report(
        "10 (mirror identity)",
        &[(&rep, &["mirror."])],
        Duration::from_secs(1),
    );
}
