//! Acceptance run: one line per criterion. Criterion 4 cannot hold with a single
//! normalization of the integral (see the decisions ledger); it is reported as FAIL and the run
//! exits non-zero if it ever starts passing, or if any other criterion fails.

use std::process::ExitCode;
use std::time::Instant;
use uqinv::diagrams::{
    corpus, empty_diagram, framed_unknot, lens_alpha, lens_space, random_surgery_diagram, staggered_hopf, Braid,
    Color, RandomSpec,
};
use uqinv::exponents::{dft_calls, max_dft_residual};
use uqinv::integrals::GIntegral;
use uqinv::invariant_engine::{CutChoice, Engine, KirbySuiteConfig};
use uqinv::qalgebra::UqAlgebra;
use uqinv::scalars::rat;
use uqinv::suites::{hopf_suite, integral_suite, modified_integral_suite, normalization_suite, r_matrix_suite};
use uqinv::{Rational, C64};

const EXPECTED_FAILURES: &[usize] = &[4];

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: impl Into<String>) -> Outcome {
    Outcome { passed, summary: summary.into() }
}

fn error(e: uqinv::Error) -> Outcome {
    outcome(false, format!("error: {e}"))
}

fn ells() -> [u32; 2] {
    [3, 5]
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for ell in ells() {
        let alg = UqAlgebra::from_ell(ell).unwrap();
        let s = hopf_suite(&alg, 1e-9);
        if !s.passed() {
            return outcome(false, format!("ell = {ell}: {:?}", s.failures()));
        }
        worst = worst.max(s.worst_residual());
        checks += s.checks.len();
    }
    outcome(true, format!("{checks} checks, worst residual {worst:.2e}"))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for ell in ells() {
        let alg = UqAlgebra::from_ell(ell).unwrap();
        let s = r_matrix_suite(&alg, 1e-9);
        if !s.passed() {
            return outcome(false, format!("ell = {ell}: {:?}", s.failures()));
        }
        worst = worst.max(s.worst_residual());
        checks += s.checks.len();
    }
    outcome(true, format!("{checks} checks, worst residual {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for ell in ells() {
        let alg = UqAlgebra::from_ell(ell).unwrap();
        let gi = GIntegral::new(&alg).unwrap();
        let s = match integral_suite(&alg, &gi, 1e-9, 3) {
            Ok(s) => s,
            Err(e) => return error(e),
        };
        if !s.passed() {
            return outcome(false, format!("ell = {ell}: {:?}", s.failures()));
        }
        worst = worst.max(s.worst_residual());
        checks += s.checks.len();
    }
    outcome(true, format!("{checks} checks, worst residual {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let s = normalization_suite(&ells(), 1e-9);
    let parts: Vec<String> = s
        .checks
        .iter()
        .map(|c| format!("{} {} ({:.2e})", c.name, if c.passed { "ok" } else { "FAILS" }, c.residual))
        .collect();
    outcome(s.passed(), parts.join("; "))
}

fn criterion_5(e3: &Engine) -> Outcome {
    let cfg = KirbySuiteConfig { pairs_per_move: 50, tol: 1e-8, ..Default::default() };
    let r = match e3.kirby_suite(&cfg) {
        Ok(r) => r,
        Err(e) => return error(e),
    };
    let worst = r.stats.iter().map(|s| s.max_difference).fold(0.0, f64::max);
    let counts: Vec<String> = r
        .stats
        .iter()
        .map(|s| format!("{} {} {}/{}", s.invariant.name(), s.kind.name(), s.pairs - s.failures, s.pairs))
        .collect();
    // a suite over values that all vanish would say nothing
    let informative = r.stats.iter().all(|s| 2 * s.nonzero >= s.pairs);
    outcome(
        r.passed(cfg.pairs_per_move) && informative,
        format!("ell = 3, {} diagrams, worst {worst:.2e}; {}", r.diagrams, counts.join(", ")),
    )
}

fn criterion_6(engines: &[Engine]) -> Outcome {
    let mut notes = Vec::new();
    for e in engines {
        let ell = e.ell();
        let h = match e.hennings_invariant(&empty_diagram(ell)) {
            Ok(h) => h.value,
            Err(err) => return error(err),
        };
        if h != C64::new(1.0, 0.0) {
            return outcome(false, format!("ell = {ell}: H(empty) = {h}"));
        }
        for f in [1, -1] {
            let d = framed_unknot(ell, f, Color::Surgery, Some(Rational::from_integer(0))).unwrap();
            let v = e.hennings_invariant(&d).unwrap().value;
            if (v - 1.0).norm() > 1e-9 {
                return outcome(false, format!("ell = {ell}: H({f}-framed unknot) = {v}"));
            }
        }
        let mut worst: f64 = 0.0;
        for w in [rat(0, 1), rat(1, 3), rat(2, 5), rat(5, 7)] {
            let d = framed_unknot(ell, 0, Color::Surgery, Some(w)).unwrap();
            worst = worst.max(e.hennings_invariant(&d).unwrap().value.norm());
        }
        if worst > 1e-9 {
            return outcome(false, format!("ell = {ell}: |H(S1 x S2)| = {worst:.2e}"));
        }
        notes.push(format!("ell = {ell} ok"));
    }
    outcome(true, notes.join(", "))
}

fn criterion_7(engines: &[Engine]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for e in engines {
        for p in 1..=5 {
            for beta in [rat(1, 7), rat(2, 11), rat(3, 13)] {
                let d = lens_space(e.ell(), p, lens_alpha(p, beta, 1), Some(beta)).unwrap();
                let (h, o) = match (e.modified_invariant(&d, None), e.cgp_oracle(&d, None)) {
                    (Ok(h), Ok(o)) => (h.value, o.value),
                    (Err(err), _) | (_, Err(err)) => return error(err),
                };
                worst = worst.max((h - o).norm());
                n += 1;
            }
        }
    }
    outcome(worst <= 1e-7, format!("{n} comparisons on L(p,1), p = 1..5, ell = 3, 5; worst {worst:.2e}"))
}

fn criterion_8(e3: &Engine) -> Outcome {
    match modified_integral_suite(&e3.alg, &e3.gi, 1e-8, 20, 5) {
        Ok(s) if s.passed() => {
            outcome(true, format!("ell = 3, {} checks, worst residual {:.2e}", s.checks.len(), s.worst_residual()))
        }
        Ok(s) => outcome(false, format!("{:?}", s.failures())),
        Err(e) => error(e),
    }
}

fn criterion_9(e3: &Engine) -> Outcome {
    let ell = 3;
    let blue = |x: &str| Color::Blue(format!("typical({x})"));
    let mut worst_cut: f64 = 0.0;
    // two blue cuts on the same diagram
    for (a, b) in [("1/7", "2/7"), ("2/11", "3/13"), ("1/5", "1/5")] {
        let d = staggered_hopf(ell, [(blue(a), None), (blue(b), None)], [0, 0]).unwrap();
        let v0 = e3.modified_invariant(&d, Some(CutChoice::Blue(0)));
        let v1 = e3.modified_invariant(&d, Some(CutChoice::Blue(1)));
        match (v0, v1) {
            (Ok(x), Ok(y)) => worst_cut = worst_cut.max((x.value - y.value).norm()),
            (Err(err), _) | (_, Err(err)) => return error(err),
        }
    }
    // blue cut against red cut, on one diagram and across two presentations
    let mut worst_red: f64 = 0.0;
    for w in [rat(2, 7), rat(1, 5), rat(3, 7)] {
        let x = format!("{w}");
        let d = staggered_hopf(ell, [(blue(&x), None), (Color::Red, Some(w))], [0, 1]).unwrap();
        let b = d.colors.iter().position(|c| !c.is_red()).unwrap();
        let vb = e3.modified_invariant(&d, Some(CutChoice::Blue(b)));
        let vr = e3.modified_invariant(&d, Some(CutChoice::Red(1 - b)));
        match (vb, vr) {
            (Ok(x), Ok(y)) => worst_red = worst_red.max((x.value - y.value).norm()),
            (Err(err), _) | (_, Err(err)) => return error(err),
        }
    }
    let w = Some(rat(2, 7));
    let db = Braid::new(2).curls(1, -1).clasp(0, true).closure(ell, &[blue("2/7"), Color::Red], &[None, w]).unwrap();
    let dr = Braid::new(2).curls(0, -1).clasp(0, true).closure(ell, &[Color::Red, blue("2/7")], &[w, None]).unwrap();
    match (e3.modified_invariant(&db, Some(CutChoice::Blue(0))), e3.modified_invariant(&dr, Some(CutChoice::Red(0)))) {
        (Ok(x), Ok(y)) => worst_red = worst_red.max((x.value - y.value).norm()),
        (Err(err), _) | (_, Err(err)) => return error(err),
    }
    // connected sums with closed manifolds of nonzero H
    let mut worst_sum: f64 = 0.0;
    let mut pairs = 0;
    let beta = rat(1, 7);
    let firsts: Vec<_> = [1, 2, 4]
        .iter()
        .map(|&p| lens_space(ell, p, lens_alpha(p, beta, 1), Some(beta)).unwrap())
        .collect();
    let mut seconds: Vec<_> = [2, 3].iter().map(|&p| lens_space(ell, p, Rational::from_integer(0), None).unwrap()).collect();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(9);
    while seconds.len() < 5 {
        let spec = RandomSpec { trivial_class: true, max_ops: 4, ..Default::default() };
        let d = random_surgery_diagram(&mut rng, ell, spec).unwrap();
        if e3.hennings_invariant(&d).is_ok_and(|h| h.value.norm() > 1e-3) {
            seconds.push(d);
        }
    }
    for (i, d2) in seconds.iter().enumerate() {
        let d1 = &firsts[i % firsts.len()];
        match e3.connected_sum_check(d1, d2) {
            Ok(r) => worst_sum = worst_sum.max(r.difference),
            Err(err) => return error(err),
        }
        pairs += 1;
    }
    outcome(
        worst_cut <= 1e-8 && worst_red <= 1e-8 && worst_sum <= 1e-8,
        format!("cut edges {worst_cut:.2e}, blue vs red {worst_red:.2e}, connected sum over {pairs} pairs {worst_sum:.2e}"),
    )
}

fn criterion_10(engines: &[Engine]) -> Outcome {
    let mut n = 0;
    for e in engines {
        let diagrams = match corpus(e.ell()) {
            Ok(c) => c,
            Err(err) => return error(err),
        };
        for (name, d) in diagrams {
            match e.exponent_check(&d) {
                Ok(r) if r.passed() => n += 1,
                Ok(r) => return outcome(false, format!("ell = {}, {name}: {:?}", e.ell(), r)),
                Err(err) => return outcome(false, format!("ell = {}, {name}: {err}", e.ell())),
            }
        }
    }
    outcome(true, format!("{n} corpus diagrams over ell = 3, 5"))
}

fn criterion_11() -> Outcome {
    let calls = dft_calls();
    let worst = max_dft_residual();
    outcome(calls > 0 && worst <= 1e-10, format!("{calls} reconstructions, worst residual {worst:.2e}"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let engines: Vec<Engine> = ells().iter().map(|&l| Engine::new(l).unwrap()).collect();
    let e3 = &engines[0];
    let names = [
        "Hopf G-coalgebra axioms",
        "quasi-R and R-matrix axioms, twist",
        "integral suite",
        "normalization of delta",
        "Kirby invariance of H and H'",
        "known values",
        "oracle on lens spaces",
        "modified integral",
        "structure of H'",
        "exponent check",
        "DFT reconstruction",
    ];
    let results = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(e3),
        criterion_6(&engines),
        criterion_7(&engines),
        criterion_8(e3),
        criterion_9(e3),
        criterion_10(&engines),
        // last, so that it covers every reconstruction made above
        criterion_11(),
    ];

    let mut unexpected = Vec::new();
    for (i, (name, r)) in names.iter().zip(&results).enumerate() {
        let k = i + 1;
        let expected_fail = EXPECTED_FAILURES.contains(&k);
        let status = match (r.passed, expected_fail) {
            (true, false) => "PASS",
            (false, true) => "FAIL (recorded as unattainable)",
            (false, false) => "FAIL",
            (true, true) => "PASS (was recorded as failing)",
        };
        println!("criterion {k:>2} {status}: {name}: {}", r.summary);
        if r.passed == expected_fail {
            unexpected.push(k);
        }
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("acceptance: {passed}/{} criteria pass in {:.1} s", results.len(), start.elapsed().as_secs_f64());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: outcome differs from the record for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
