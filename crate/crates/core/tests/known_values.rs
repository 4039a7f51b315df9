//! Values checked against closed forms, and values frozen after agreeing with the oracle.

use std::f64::consts::PI;
use uqinv::diagrams::{framed_unknot, knot_presentations, lens_alpha, lens_space, Color, KnotType};
use uqinv::invariant_engine::Engine;
use uqinv::scalars::{rat, RootOfUnityConfig};
use uqinv::C64;

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

#[test]
fn gauss_sum_at_three_is_two_plus_xi() {
    let cfg = RootOfUnityConfig::new(3).unwrap();
    let g = cfg.gauss_sum().unwrap();
    assert!(close(g, C64::new(2.0, 0.0) + cfg.xi(), 1e-12), "{g}");
}

/// `sin(2 pi (2a + 1) / l) / (sqrt(l) sin(4 pi a))`.
fn typical_dimension(ell: u32, a: f64) -> f64 {
    let l = ell as f64;
    (2.0 * PI * (2.0 * a + 1.0) / l).sin() / (l.sqrt() * (4.0 * PI * a).sin())
}

#[test]
fn blue_unknot_is_the_closed_form_modified_dimension() {
    for ell in [3, 5] {
        let e = Engine::new(ell).unwrap();
        for (n, m) in [(1, 7), (2, 11), (3, 13), (5, 7)] {
            let d = framed_unknot(ell, 0, Color::Blue(format!("typical({n}/{m})")), None).unwrap();
            let v = e.modified_invariant(&d, None).unwrap().value;
            let want = C64::new(typical_dimension(ell, n as f64 / m as f64), 0.0);
            assert!(close(v, want, 1e-10), "ell = {ell}, a = {n}/{m}: {v} vs {want}");
        }
    }
}

#[test]
fn plain_lens_spaces_count_homology() {
    let e = Engine::new(3).unwrap();
    for p in 1..=4 {
        let d = lens_space(3, p, rat(0, 1), None).unwrap();
        let h = e.hennings_invariant(&d).unwrap().value;
        assert!(close(h, C64::new(p as f64, 0.0), 1e-10), "p = {p}: {h}");
    }
}

#[test]
fn zero_surgery_on_knots_vanishes() {
    let e = Engine::new(3).unwrap();
    for knot in [KnotType::Trefoil, KnotType::FigureEight] {
        let d = knot_presentations(knot)[0].closure(3, &[Color::Surgery], &[Some(rat(0, 1))]).unwrap();
        assert!(e.hennings_invariant(&d).unwrap().value.norm() < 1e-9, "{knot:?}");
    }
}

#[test]
fn lens_space_values_are_frozen() {
    let e = Engine::new(3).unwrap();
    let beta = rat(1, 7);
    let frozen = [
        (1, C64::new(0.113951595357835, 0.230295003521843)),
        (2, C64::new(0.611631792259547, 0.379770888905190)),
        (3, C64::new(0.0, 0.0)),
    ];
    for (p, want) in frozen {
        let d = lens_space(3, p, lens_alpha(p, beta, 1), Some(beta)).unwrap();
        let h = e.modified_invariant(&d, None).unwrap().value;
        let o = e.cgp_oracle(&d, None).unwrap().value;
        assert!((h - want).norm() < 1e-10, "p = {p}: {h}");
        assert!((o - want).norm() < 1e-10, "p = {p}: oracle {o}");
    }
}
