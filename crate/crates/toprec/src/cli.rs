//! Command-line surface: parse curve documents, run computations, emit
//! pretty or JSON output, and drive the built-in verification suites.
//!
//! Exit codes: 0 success, 1 computation failure (with a structured JSON
//! error on stderr), 2 usage errors. Identical inputs produce byte-identical
//! output across runs and `--jobs` settings; timings are opt-in.

use crate::catalog::{quadrangulation_counts, curve_or_family_from_json, CatalogOutput};
use crate::curve::{curve_to_json, SpectralCurve};
use crate::diagrams::{enumerate_graphs, graph_weight};
use crate::engine::{kernel_h_expansion, OmegaTable};
use crate::error::{Error, Result};
use crate::field::Rational;
use crate::forms::{poleform_to_json, PoleForm, UnstableForm};
use crate::suites::run_suite;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "toprec",
    about = "Exact topological recursion on genus-zero spectral curves",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Pretty,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Convention {
    /// ω_1^(0) = -y dx with the -1/2 kernel prefactor.
    Engine,
    /// The opposite y-orientation used by common printed tables of
    /// intersection-number correlators: (-1)^n per form.
    Paper9,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, validate and display a curve (or family) document.
    CurveShow {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Pretty)]
        format: Format,
    },
    /// Compute a correlator form ω_n^(g).
    Omega {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Format::Pretty)]
        format: Format,
        #[arg(long, value_enum, default_value_t = Convention::Engine)]
        convention: Convention,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Compute a free energy F_g (g ≥ 2).
    Fg {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        g: u32,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Extract enumerative counts through the residue pipeline.
    Counts {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "1/1")]
        t4: String,
        /// Largest number of faces reported.
        #[arg(long)]
        order: u32,
        #[arg(long)]
        genus: u32,
        /// Comma-separated boundary perimeters, e.g. "4" or "4,4".
        #[arg(long, value_delimiter = ',')]
        perimeters: Vec<u32>,
        #[arg(long, value_enum, default_value_t = Format::Pretty)]
        format: Format,
    },
    /// Enumerate recursion graphs; optionally evaluate their weights.
    Diagrams {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        k: usize,
        #[arg(long, conflicts_with = "weights")]
        count_only: bool,
        /// Evaluate each graph's weight on the given curve.
        #[arg(long, requires = "curve")]
        weights: bool,
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Expand the determinantal kernel to the requested subleading order.
    Kernel {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 1)]
        order: u8,
    },
    /// Run a verification suite (or all of them).
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        timings: bool,
    },
}

/// Entry point; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            let kind = format!("{e:?}");
            let kind = kind.split(['(', ' ', '{']).next().unwrap_or("Error");
            eprintln!(
                "{}",
                serde_json::json!({ "error": e.to_string(), "kind": kind })
            );
            1
        }
    }
}

fn load_curve(path: &PathBuf) -> Result<(SpectralCurve, Vec<(String, String)>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
    let result = curve_or_family_from_json(&value)?;
    match result.output {
        CatalogOutput::Curve(c) => Ok((c, result.derived)),
        CatalogOutput::Mirror(..) => Err(Error::Parse(
            "this family yields a mirror pair; use curve-show to inspect it".into(),
        )),
        CatalogOutput::Template(t) => match t.curve {
            Some(c) => Ok((c, result.derived)),
            None => Err(Error::BranchpointNotInField {
                unfactored_degree: t.root_report.unfactored_degree,
            }),
        },
    }
}

fn print_form_pretty(f: &PoleForm, points: &[crate::field::FieldElem], name: &str) {
    if f.is_zero() {
        println!("0");
        return;
    }
    for (key, c) in &f.terms().0 {
        let mut line = format!("  ({})", c.display_with(name));
        for (slot, &(bp, k)) in key.iter().enumerate() {
            let a = points[bp].display_with(name);
            if a == "0" {
                line.push_str(&format!(" dz{}/z{}^{}", slot + 1, slot + 1, k));
            } else if let Some(pos) = a.strip_prefix('-') {
                line.push_str(&format!(" dz{}/(z{} + {})^{}", slot + 1, slot + 1, pos, k));
            } else {
                line.push_str(&format!(" dz{}/(z{} - {})^{}", slot + 1, slot + 1, a, k));
            }
        }
        println!("{line}");
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::CurveShow { curve, format } => {
            let text = std::fs::read_to_string(&curve)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", curve.display())))?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
            let result = curve_or_family_from_json(&value)?;
            match result.output {
                CatalogOutput::Curve(c) => match format {
                    Format::Json => println!("{}", curve_to_json(&c)),
                    Format::Pretty => {
                        let name = c.param_name().to_string();
                        println!("field: {}", c.tag().name());
                        println!("x = {}", c.x());
                        match c.ydata() {
                            crate::curve::YData::Rational(y) => println!("y = {y}"),
                            crate::curve::YData::Log { dy, log_terms } => {
                                println!("dy = {dy}");
                                for (coeff, arg) in log_terms {
                                    println!(
                                        "  log term: {} * ln({arg})",
                                        coeff.display_with(&name)
                                    );
                                }
                            }
                        }
                        for (k, v) in &result.derived {
                            println!("derived {k} = {v}");
                        }
                        for (i, b) in c.branchpoints().iter().enumerate() {
                            println!(
                                "branchpoint {i}: a = {}, x''(a)/2 = {}, y'(a)^2 = {}",
                                b.a.display_with(&name),
                                b.xpp_half.display_with(&name),
                                b.y_prime_sq.display_with(&name)
                            );
                        }
                    }
                },
                CatalogOutput::Mirror(pair, report) => {
                    println!("mirror pair at c = {}", pair.c);
                    println!("x = {}", pair.x_a);
                    println!("exp(xt) = c*x: {}", report.exp_xb_is_c_times_x);
                    println!("x*y = yt:      {}", report.x_times_y_is_yb);
                    for (k, v) in &result.derived {
                        println!("derived {k} = {v}");
                    }
                }
                CatalogOutput::Template(t) => {
                    println!("curve template (branchpoints may lie outside the field)");
                    println!("x = {}", t.x);
                    println!("y = {}", t.y);
                    println!(
                        "in-field branchpoints: {}, unfactored degree {}",
                        t.root_report.roots.len(),
                        t.root_report.unfactored_degree
                    );
                    if let Some(c) = &t.curve {
                        println!("validated with {} branchpoints", c.branchpoints().len());
                    }
                }
            }
            Ok(0)
        }
        Command::Omega {
            curve,
            g,
            n,
            format,
            convention,
            jobs,
        } => {
            let (c, _) = load_curve(&curve)?;
            let table = OmegaTable::with_jobs(&c, jobs);
            match table.omega(g, n)? {
                crate::engine::Omega::Unstable(UnstableForm::OneZero) => {
                    println!("-y dx (unstable (0,1) marker)");
                }
                crate::engine::Omega::Unstable(UnstableForm::Bergman) => {
                    println!("dz1 dz2/(z1 - z2)^2 (unstable (0,2) marker)");
                }
                crate::engine::Omega::Stable(f) => {
                    let f = match convention {
                        Convention::Engine => (*f).clone(),
                        Convention::Paper9 => {
                            let sign = if n % 2 == 0 { 1 } else { -1 };
                            f.scale(&crate::field::FieldElem::from_int(c.tag(), sign))
                        }
                    };
                    match format {
                        Format::Json => println!("{}", poleform_to_json(&f)),
                        Format::Pretty => {
                            print_form_pretty(&f, &c.branchpoint_values(), c.param_name())
                        }
                    }
                }
            }
            Ok(0)
        }
        Command::Fg { curve, g, jobs } => {
            let (c, _) = load_curve(&curve)?;
            let table = OmegaTable::with_jobs(&c, jobs);
            println!("{}", table.fg(g)?.display_with(c.param_name()));
            Ok(0)
        }
        Command::Counts {
            family,
            t4,
            order,
            genus,
            perimeters,
            format,
        } => {
            if family != "quadrangulation" {
                return Err(Error::Parse(format!(
                    "counts supports the quadrangulation family, got {family:?}"
                )));
            }
            if perimeters.is_empty() {
                return Err(Error::Parse("at least one perimeter required".into()));
            }
            let t4 = Rational::parse(&t4)?;
            let table = quadrangulation_counts(&t4, genus, &perimeters, order)?;
            match format {
                Format::Pretty => {
                    let vals: Vec<String> =
                        table.counts.iter().map(|(_, c)| c.to_string()).collect();
                    println!("[{}]", vals.join(", "));
                }
                Format::Json => {
                    let counts: Vec<serde_json::Value> = table
                        .counts
                        .iter()
                        .map(|(f, c)| {
                            serde_json::json!({
                                "faces": f,
                                "count": if c.is_integer() {
                                    serde_json::json!(c.to_string().parse::<i64>().ok())
                                } else {
                                    serde_json::json!(c.to_literal())
                                },
                            })
                        })
                        .collect();
                    println!(
                        "{}",
                        serde_json::json!({
                            "family": table.family,
                            "genus": table.genus,
                            "perimeters": table.perimeters,
                            "provenance": table.provenance,
                            "counts": counts,
                        })
                    );
                }
            }
            Ok(0)
        }
        Command::Diagrams {
            g,
            k,
            count_only,
            weights,
            curve,
        } => {
            let graphs = enumerate_graphs(g, k);
            if count_only {
                println!("{}", graphs.len());
                return Ok(0);
            }
            if weights {
                let (c, _) = load_curve(&curve.expect("clap enforces --curve"))?;
                for graph in &graphs {
                    println!("{}", graph.notation());
                    let w = graph_weight(&c, graph)?;
                    print_form_pretty(&w, &c.branchpoint_values(), c.param_name());
                }
            } else {
                for graph in &graphs {
                    println!("{}", graph.notation());
                }
            }
            Ok(0)
        }
        Command::Kernel { curve, order } => {
            if order > 1 {
                return Err(Error::Parse("kernel expansion implemented to order 1".into()));
            }
            let (c, _) = load_curve(&curve)?;
            let k = kernel_h_expansion(&c, order)?;
            println!("prefactor: {}", k.prefactor);
            println!("prime form denominator: {}", k.prime_form_denominator);
            for (label, correction) in &k.corrections {
                println!("correction {label}: {correction}");
            }
            Ok(0)
        }
        Command::Verify {
            suite,
            jobs,
            timings,
        } => {
            let reports = match run_suite(&suite, jobs) {
                Ok(r) => r,
                Err(Error::UnknownSuite(s)) => {
                    eprintln!(
                        "{}",
                        serde_json::json!({ "error": format!("unknown suite: {s}"), "kind": "UnknownSuite" })
                    );
                    return Ok(2);
                }
                Err(e) => return Err(e),
            };
            let mut all_pass = true;
            for report in &reports {
                for line in report.lines(timings) {
                    println!("{line}");
                }
                all_pass &= report.passed();
            }
            Ok(if all_pass { 0 } else { 1 })
        }
    }
}
