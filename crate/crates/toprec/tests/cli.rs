//! End-to-end checks of the command-line surface: subcommand semantics,
//! exit codes, JSON round trips and byte-determinism across --jobs.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toprec"))
}

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("examples/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

#[test]
fn fg_of_the_airy_curve_is_zero() {
    let out = bin()
        .args(["fg", "--curve", &data("airy.json"), "--g", "2"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0");
}

#[test]
fn quadrangulation_counts_match_the_closed_form() {
    let out = bin()
        .args([
            "counts",
            "--family",
            "quadrangulation",
            "--t4",
            "1",
            "--order",
            "4",
            "--genus",
            "0",
            "--perimeters",
            "4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "[2, 9, 54, 378]"
    );
}

#[test]
fn diagram_count_subcommand() {
    let out = bin()
        .args(["diagrams", "--g", "2", "--k", "0", "--count-only"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "5");
}

#[test]
fn omega_json_round_trips_and_is_jobs_deterministic() {
    let run = |jobs: &str| {
        let out = bin()
            .args([
                "omega",
                "--curve",
                &data("kontsevich.json"),
                "--g",
                "1",
                "--n",
                "2",
                "--format",
                "json",
                "--jobs",
                jobs,
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{out:?}");
        out.stdout
    };
    let a = run("1");
    let b = run("3");
    assert_eq!(a, b, "output differs across --jobs settings");
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    let form = toprec::forms::poleform_from_json(toprec::field::FieldTag::Q, &v).unwrap();
    assert_eq!(form.g(), 1);
    assert_eq!(form.n(), 2);
    assert!(form.is_symmetric());
    assert_eq!(serde_json::to_string(&toprec::forms::poleform_to_json(&form)).unwrap() + "\n",
        String::from_utf8_lossy(&a));
}

#[test]
fn paper9_convention_flips_odd_forms() {
    let engine = bin()
        .args(["omega", "--curve", &data("airy.json"), "--g", "1", "--n", "1", "--format", "json"])
        .output()
        .unwrap();
    let paper = bin()
        .args([
            "omega", "--curve", &data("airy.json"), "--g", "1", "--n", "1", "--format", "json",
            "--convention", "paper9",
        ])
        .output()
        .unwrap();
    let tag = toprec::field::FieldTag::Q;
    let e: serde_json::Value = serde_json::from_slice(&engine.stdout).unwrap();
    let p: serde_json::Value = serde_json::from_slice(&paper.stdout).unwrap();
    let e = toprec::forms::poleform_from_json(tag, &e).unwrap();
    let p = toprec::forms::poleform_from_json(tag, &p).unwrap();
    assert_eq!(p, e.scale(&toprec::field::FieldElem::from_int(tag, -1)));
}

#[test]
fn exit_codes() {
    // Usage errors exit 2.
    let out = bin().args(["omega", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Unknown suite exits 2.
    let out = bin().args(["verify", "--suite", "bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Computation errors exit 1 with a structured JSON error on stderr.
    let out = bin()
        .args(["fg", "--curve", "/nonexistent.json", "--g", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value =
        serde_json::from_slice(&out.stderr).expect("structured error on stderr");
    assert!(err.get("error").is_some());
    assert!(err.get("kind").is_some());
}

#[test]
fn curve_show_reports_derived_parameters() {
    let out = bin()
        .args(["curve-show", "--curve", &data("quadrangulation.json")])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("field: Qu"), "{text}");
    assert!(text.contains("derived t"), "{text}");
    assert!(text.contains("branchpoint"), "{text}");
}

#[test]
fn kernel_subcommand_prints_corrections() {
    let out = bin()
        .args(["kernel", "--curve", &data("airy.json"), "--order", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("prime form"), "{text}");
    assert!(text.contains("correction"), "{text}");
}
