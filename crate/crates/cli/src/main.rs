//! Command line front end for the invariant library.

mod report;

use clap::{Args, Parser, Subcommand};
use report::{exit, exit_code, RunReport};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use uqinv::diagrams::{check_admissibility, lens_alpha, lens_space, parse_diagram, AdmissibilityClass, BichromeDiagram};
use uqinv::invariant_engine::{CutChoice, Engine, KirbySuiteConfig};
use uqinv::scalars::{format_rational, format_sig, parse_rational, rat};
use uqinv::suites::{hopf_suite, integral_suite, modified_integral_suite, r_matrix_suite};
use uqinv::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "uqinv", version, about = "Graded and modified Hennings invariants at roots of unity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Write the JSON report here and print a summary instead of the report.
    #[arg(long, value_name = "OUT")]
    json: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hopf, R-matrix, twist, integral and normalization checks.
    CheckAxioms {
        #[arg(long, default_value_t = 3)]
        ell: u32,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Integral identities, plus the modified integral at ell = 3.
    CheckIntegrals {
        #[arg(long, default_value_t = 3)]
        ell: u32,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate H, and H' when admissible, on a diagram file.
    Invariant {
        #[arg(long)]
        diagram: PathBuf,
        /// Must agree with the diagram's own ell when given.
        #[arg(long)]
        ell: Option<u32>,
        /// Meridian values `component=p/q`; repeat or separate with commas.
        #[arg(long, value_delimiter = ',')]
        omega: Vec<String>,
        /// Require the modified invariant.
        #[arg(long)]
        modified: bool,
        /// Edge to open for the modified invariant.
        #[arg(long)]
        cut: Option<usize>,
        /// Also evaluate the Kirby-colored oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Randomized Kirby move invariance of H and H'.
    KirbyTest {
        #[arg(long, default_value_t = 3)]
        ell: u32,
        /// Comparisons per move type and invariant.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Negative control: apply the signature correction with the wrong sign.
        #[arg(long)]
        flip_signature_sign: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Compare H' with the Kirby-colored oracle on a diagram, or on lens spaces.
    OracleCompare {
        #[arg(long, default_value_t = 3)]
        ell: u32,
        #[arg(long)]
        diagram: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut report = RunReport::new(std::env::args().skip(1).collect());
    let start = Instant::now();
    let (result, out) = match &cli.command {
        Command::CheckAxioms { ell, tol, seed, out } => (check_axioms(&mut report, *ell, *tol, *seed), out),
        Command::CheckIntegrals { ell, tol, seed, out } => (check_integrals(&mut report, *ell, *tol, *seed), out),
        Command::Invariant { diagram, ell, omega, modified, cut, oracle, tol, out } => {
            let opts = InvariantOptions { ell: *ell, omega, modified: *modified, cut: *cut, oracle: *oracle, tol: *tol };
            (invariant(&mut report, diagram, &opts), out)
        }
        Command::KirbyTest { ell, trials, seed, tol, flip_signature_sign, out } => {
            let cfg = KirbySuiteConfig {
                seed: *seed,
                pairs_per_move: *trials,
                tol: *tol,
                flip_signature_sign: *flip_signature_sign,
                ..Default::default()
            };
            (kirby_test(&mut report, *ell, &cfg), out)
        }
        Command::OracleCompare { ell, diagram, tol, out } => (oracle_compare(&mut report, *ell, diagram.as_deref(), *tol), out),
    };
    report.timing("total", start.elapsed().as_secs_f64() * 1e3);
    let code = match &result {
        Ok(()) if report.passed => exit::OK,
        Ok(()) => exit::NUMERIC,
        Err(e) => {
            report.fail_with(e);
            exit_code(e)
        }
    };
    if let Err(e) = emit(&report, out) {
        eprintln!("uqinv: cannot write report: {e}");
        return ExitCode::from(exit::PARSE);
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if let Err(e) = &result {
        eprintln!("error: {e}");
    } else if !report.passed {
        eprintln!("failing checks: {}", report.failing_checks().join("; "));
    }
    ExitCode::from(code)
}

fn emit(report: &RunReport, out: &Output) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    match &out.json {
        None => println!("{text}"),
        Some(path) => {
            std::fs::write(path, text + "\n")?;
            let failed = report.failing_checks().len();
            println!(
                "{}: {} checks, {} failing",
                if report.passed { "PASS" } else { "FAIL" },
                report.checks.len(),
                failed
            );
            for (k, v) in &report.values {
                match v.im.strip_prefix('-') {
                    Some(im) => println!("{k} = {} - {im}i", v.re),
                    None => println!("{k} = {} + {}i", v.re, v.im),
                }
            }
        }
    }
    Ok(())
}

fn engine(report: &mut RunReport, ell: u32) -> Result<Engine> {
    report.config("ell", ell);
    let t = Instant::now();
    let e = Engine::new(ell)?;
    report.timing("setup", t.elapsed().as_secs_f64() * 1e3);
    Ok(e)
}

fn check_axioms(report: &mut RunReport, ell: u32, tol: f64, seed: u64) -> Result<()> {
    report.config("tol", format_sig(tol));
    report.config("seed", seed);
    let e = engine(report, ell)?;
    let t = Instant::now();
    report.suite(&hopf_suite(&e.alg, tol));
    report.suite(&r_matrix_suite(&e.alg, tol));
    report.suite(&integral_suite(&e.alg, &e.gi_closed_form, tol, seed)?);
    let xi_inv = e.alg.cfg.xi().inv();
    let (d, db) = e.gi_closed_form.deltas(&e.alg)?;
    report.check("normalization: delta = xi^-1 (closed-form integral)", (d - xi_inv).norm() <= tol, (d - xi_inv).norm(), tol);
    let one = (e.delta * e.delta_bar - 1.0).norm();
    report.check("normalization: delta delta-bar = 1 (rescaled integral)", one <= tol, one, tol);
    let closed = (d * db - 1.0).norm();
    if closed > tol {
        report.warnings.push(format!(
            "the closed-form integral has |delta delta-bar - 1| = {}; invariants use the rescaled integral",
            format_sig(closed)
        ));
    }
    report.value("delta", e.delta);
    report.value("delta_bar", e.delta_bar);
    report.timing("checks", t.elapsed().as_secs_f64() * 1e3);
    Ok(())
}

fn check_integrals(report: &mut RunReport, ell: u32, tol: f64, seed: u64) -> Result<()> {
    report.config("tol", format_sig(tol));
    report.config("seed", seed);
    let e = engine(report, ell)?;
    let t = Instant::now();
    report.suite(&integral_suite(&e.alg, &e.gi_closed_form, tol, seed)?);
    if ell == 3 {
        report.suite(&modified_integral_suite(&e.alg, &e.gi, tol.max(1e-8), 20, seed)?);
    } else {
        report.warnings.push("the modified integral suite runs at ell = 3 only".into());
    }
    report.timing("checks", t.elapsed().as_secs_f64() * 1e3);
    Ok(())
}

struct InvariantOptions<'a> {
    ell: Option<u32>,
    omega: &'a [String],
    modified: bool,
    cut: Option<usize>,
    oracle: bool,
    tol: f64,
}

fn load_diagram(path: &Path) -> Result<BichromeDiagram> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse { row: 0, col: 0, msg: format!("{}: {e}", path.display()) })?;
    parse_diagram(&text)
}

fn apply_omega(d: &mut BichromeDiagram, args: &[String]) -> Result<()> {
    for a in args {
        let bad = || Error::Parse { row: 0, col: 0, msg: format!("--omega expects component=p/q, got {a:?}") };
        let (k, v) = a.split_once('=').ok_or_else(bad)?;
        let k: usize = k.trim().parse().map_err(|_| bad())?;
        let v = parse_rational(v).ok_or_else(bad)?;
        if k >= d.num_edges() || !d.colors[k].is_red() {
            return Err(Error::Parse { row: 0, col: 0, msg: format!("--omega: edge {k} is not a red edge") });
        }
        d.omega.insert(k, v);
    }
    Ok(())
}

fn cut_choice(d: &BichromeDiagram, cut: Option<usize>) -> Result<Option<CutChoice>> {
    let Some(e) = cut else { return Ok(None) };
    match d.colors.get(e) {
        None => Err(Error::Parse { row: 0, col: 0, msg: format!("--cut: no edge {e}") }),
        Some(c) if c.is_red() => Ok(Some(CutChoice::Red(e))),
        Some(_) => Ok(Some(CutChoice::Blue(e))),
    }
}

fn invariant(report: &mut RunReport, path: &Path, opts: &InvariantOptions) -> Result<()> {
    let mut d = load_diagram(path)?;
    report.config("diagram", path.display());
    if let Some(ell) = opts.ell {
        if ell != d.ell {
            return Err(Error::InvalidConfig(format!("--ell {ell} but the diagram is at ell = {}", d.ell)));
        }
    }
    apply_omega(&mut d, opts.omega)?;
    for (k, v) in &d.omega {
        report.config(&format!("omega.{k}"), format_rational(*v));
    }
    let cut = cut_choice(&d, opts.cut)?;
    let e = engine(report, d.ell)?;
    let t = Instant::now();
    let h = e.hennings_invariant(&d)?;
    report.timing("H", t.elapsed().as_secs_f64() * 1e3);
    report.value("H", h.value);
    report.detail("signature", h.signature);
    report.residues("residues", &h.residues);
    let class = check_admissibility(&d)?.class;
    let mut modified_value = None;
    report.detail("admissibility", format!("{class:?}"));
    if opts.modified || cut.is_some() || class != AdmissibilityClass::None {
        let t = Instant::now();
        match e.modified_invariant(&d, cut) {
            Ok(m) => {
                report.value("H_prime", m.value);
                modified_value = Some(m.value);
                report.detail("path", m.path.name());
                if let Some(c) = m.cut_edge {
                    report.detail("cut_edge", c);
                }
                if let Some(r) = m.centrality_residual {
                    report.check("centrality of the cut element", r <= 1e-9, r, 1e-9);
                }
            }
            Err(err @ (Error::NotAdmissible(_) | Error::NotSemisimpleDegree { .. })) if !opts.modified && cut.is_none() => {
                report.warnings.push(format!("H' skipped: {err}"));
            }
            Err(err) => return Err(err),
        }
        report.timing("H_prime", t.elapsed().as_secs_f64() * 1e3);
    } else if opts.modified {
        return Err(Error::NotAdmissible("diagram has no admissible cut".into()));
    }
    if opts.oracle {
        let t = Instant::now();
        match e.cgp_oracle(&d, opts.cut) {
            Ok(o) => {
                report.value("oracle", o.value);
                report.detail("oracle_colorings", o.colorings);
                if let Some(hp) = modified_value {
                    let diff = (hp - o.value).norm();
                    report.check("H' agrees with the oracle", diff <= opts.tol, diff, opts.tol);
                }
            }
            Err(err @ (Error::NotAdmissible(_) | Error::NotSemisimpleDegree { .. })) => {
                report.warnings.push(format!("oracle skipped: {err}"));
            }
            Err(err) => return Err(err),
        }
        report.timing("oracle", t.elapsed().as_secs_f64() * 1e3);
    }
    Ok(())
}

fn kirby_test(report: &mut RunReport, ell: u32, cfg: &KirbySuiteConfig) -> Result<()> {
    report.config("tol", format_sig(cfg.tol));
    report.config("seed", cfg.seed);
    report.config("trials", cfg.pairs_per_move);
    if cfg.flip_signature_sign {
        report.config("negative_control", "flip_signature_sign");
    }
    if cfg.pairs_per_move == 0 {
        report.warnings.push("trials = 0: nothing is compared and the run passes vacuously".into());
    }
    let e = engine(report, ell)?;
    let t = Instant::now();
    let r = e.kirby_suite(cfg)?;
    for s in &r.stats {
        let name = format!("{} under {}", s.invariant.name(), s.kind.name());
        let ok = s.failures == 0 && s.pairs >= cfg.pairs_per_move;
        report.check(name.clone(), ok, s.max_difference, cfg.tol);
        report.detail(&format!("{name}: pairs"), s.pairs);
        report.detail(&format!("{name}: nonzero"), s.nonzero);
        report.detail(&format!("{name}: failures"), s.failures);
        report.detail(&format!("{name}: skipped"), s.skipped);
    }
    report.detail("diagrams", r.diagrams);
    report.timing("suite", t.elapsed().as_secs_f64() * 1e3);
    Ok(())
}

fn oracle_compare(report: &mut RunReport, ell: u32, diagram: Option<&Path>, tol: f64) -> Result<()> {
    report.config("tol", format_sig(tol));
    let cases: Vec<(String, BichromeDiagram)> = match diagram {
        Some(p) => {
            report.config("diagram", p.display());
            let d = load_diagram(p)?;
            if d.ell != ell {
                return Err(Error::InvalidConfig(format!("--ell {ell} but the diagram is at ell = {}", d.ell)));
            }
            vec![("diagram".into(), d)]
        }
        None => {
            let mut v = Vec::new();
            for beta in [rat(1, 7), rat(2, 11), rat(3, 13)] {
                for p in 1..=5 {
                    let d = lens_space(ell, p, lens_alpha(p, beta, 1), Some(beta))?;
                    v.push((format!("L({p},1) at {}", format_rational(beta)), d));
                }
            }
            v
        }
    };
    let e = engine(report, ell)?;
    let t = Instant::now();
    for (name, d) in &cases {
        let h = e.modified_invariant(d, None)?.value;
        let o = e.cgp_oracle(d, None)?.value;
        let diff = (h - o).norm();
        report.check(format!("{name}: H' = oracle"), diff <= tol, diff, tol);
        report.value(&format!("{name}: H'"), h);
        report.value(&format!("{name}: oracle"), o);
    }
    report.timing("compare", t.elapsed().as_secs_f64() * 1e3);
    Ok(())
}
