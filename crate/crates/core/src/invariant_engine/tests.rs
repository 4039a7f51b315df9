use super::*;
use crate::diagrams::{empty_diagram, framed_unknot, knot_presentations, lens_alpha, lens_space, Braid, KnotType};
use num_traits::Zero;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

#[test]
fn empty_diagram_is_one() {
    let e = Engine::new(3).unwrap();
    let h = e.hennings_invariant(&empty_diagram(3)).unwrap();
    assert!(close(h.value, C64::new(1.0, 0.0), 1e-12));
}

#[test]
fn plus_minus_one_unknots_are_one() {
    let e = Engine::new(3).unwrap();
    for f in [1, -1] {
        let d = framed_unknot(3, f, Color::Surgery, Some(Rational::zero())).unwrap();
        let h = e.hennings_invariant(&d).unwrap();
        assert_eq!(h.signature, f);
        assert!(close(h.value, C64::new(1.0, 0.0), 1e-9), "framing {f}: {}", h.value);
    }
}

#[test]
fn zero_framed_unknot_vanishes() {
    let e = Engine::new(3).unwrap();
    let d = framed_unknot(3, 0, Color::Surgery, Some(Rational::zero())).unwrap();
    assert!(e.hennings_invariant(&d).unwrap().value.norm() < 1e-9);
}

#[test]
fn blue_unknot_modified_value_is_the_modified_dimension() {
    let e = Engine::new(3).unwrap();
    let b = r(1, 7);
    let d = framed_unknot(3, 0, Color::Blue("typical(1/7)".into()), None).unwrap();
    let h = e.modified_invariant(&d, None).unwrap();
    let v = e.module("typical(1/7)").unwrap();
    let want = e.modified_data(b).unwrap().modified_dim_of(&e.alg, &v).unwrap();
    assert!(close(h.value, want, 1e-9), "{} vs {}", h.value, want);
}

#[test]
fn knot_presentations_agree() {
    let e = Engine::new(3).unwrap();
    for knot in [KnotType::Trefoil, KnotType::FigureEight] {
        let vals: Vec<C64> = knot_presentations(knot)
            .iter()
            .map(|b| {
                let d = b.closure(3, &[Color::Red], &[Some(r(1, 4))]).unwrap();
                e.f_mu(&d).unwrap()
            })
            .collect();
        for v in &vals[1..] {
            assert!(close(*v, vals[0], 1e-8), "{knot:?}: {vals:?}");
        }
    }
}

#[test]
fn base_point_does_not_matter() {
    let e = Engine::new(3).unwrap();
    let b = knot_presentations(KnotType::Trefoil)[0].clone();
    let d = b.closure(3, &[Color::Red], &[Some(r(1, 4))]).unwrap();
    let top = d.topology().unwrap();
    let base = e.f_mu(&d).unwrap();
    for p in top.edges[0].points() {
        let opts = EvalOptions { base_points: [(0, p)].into_iter().collect(), ..Default::default() };
        match e.evaluate(&d, &opts).unwrap() {
            Evaluation::Scalar(x) => assert!(close(x, base, 1e-9), "point {p}: {x} vs {base}"),
            _ => unreachable!(),
        }
    }
}

#[test]
fn lens_spaces_match_the_oracle() {
    let e = Engine::new(3).unwrap();
    let beta = r(1, 7);
    for p in 1..=3 {
        let alpha = lens_alpha(p, beta, 1);
        let d = lens_space(3, p, alpha, Some(beta)).unwrap();
        let h = e.modified_invariant(&d, None).unwrap();
        let o = e.cgp_oracle(&d, None).unwrap();
        assert!(close(h.value, o.value, 1e-7), "p = {p}: {} vs {}", h.value, o.value);
    }
}

#[test]
fn red_cut_matches_blue_cut_on_a_hopf_link() {
    let e = Engine::new(3).unwrap();
    let blue = Color::Blue("typical(2/7)".into());
    let w = Some(r(2, 7));
    // the red framing -1 makes its parallel vanish; the cut component sits on the outer
    // face in each presentation
    let db = Braid::new(2).curls(1, -1).clasp(0, true).closure(3, &[blue.clone(), Color::Red], &[None, w]).unwrap();
    let dr = Braid::new(2).curls(0, -1).clasp(0, true).closure(3, &[Color::Red, blue], &[w, None]).unwrap();
    let hb = e.modified_invariant(&db, Some(CutChoice::Blue(0))).unwrap();
    let hr = e.modified_invariant(&dr, Some(CutChoice::Red(0))).unwrap();
    assert!(hr.centrality_residual.unwrap() < 1e-9);
    assert!(close(hb.value, hr.value, 1e-8), "{} vs {}", hb.value, hr.value);
    assert!(hb.value.norm() > 1e-6);
}

#[test]
fn exponent_sweep_matches_linking_form() {
    let e = Engine::new(3).unwrap();
    let b = knot_presentations(KnotType::FigureEight)[1].clone();
    let d = b.closure(3, &[Color::Red], &[Some(r(1, 4))]).unwrap();
    let rep = e.exponent_check(&d).unwrap();
    assert!(rep.passed(), "{rep:?}");
}
