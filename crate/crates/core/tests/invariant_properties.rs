use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use uqinv::diagrams::{disjoint_union, kirby_move, random_surgery_diagram, BichromeDiagram, KirbyMove, RandomSpec};
use uqinv::invariant_engine::Engine;
use uqinv::{Error, C64};

fn engine() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(|| Engine::new(3).unwrap())
}

fn random(seed: u64, spec: RandomSpec) -> BichromeDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_surgery_diagram(&mut rng, 3, spec).unwrap()
}

fn small(trivial_class: bool, blue: bool) -> RandomSpec {
    RandomSpec { trivial_class, blue, max_ops: 3, ..Default::default() }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn stabilization_keeps_the_modified_invariant(seed in 0u64..100_000, blue in any::<bool>(), plus in any::<bool>()) {
        let e = engine();
        let d = random(seed, small(false, blue));
        let base = match e.modified_invariant(&d, None) {
            Ok(v) => v.value,
            Err(Error::NotAdmissible(_)) | Err(Error::NotSemisimpleDegree { .. }) => return Err(TestCaseError::reject("degenerate")),
            Err(err) => return Err(TestCaseError::fail(err.to_string())),
        };
        let mv = if plus { KirbyMove::KIPlus } else { KirbyMove::KIMinus };
        let moved = kirby_move(&d, mv).unwrap().diagram;
        let after = e.modified_invariant(&moved, None).unwrap().value;
        prop_assert!(rel(base, after) < 1e-8, "{base} vs {after}");
    }

    #[test]
    fn disjoint_union_multiplies_h(s1 in 0u64..100_000, s2 in 0u64..100_000) {
        let e = engine();
        let a = random(s1, small(true, false));
        let b = random(s2, small(true, false));
        let ab = disjoint_union(&a, &b).unwrap();
        let h = |d: &BichromeDiagram| e.hennings_invariant(d).map(|r| r.value);
        let (ha, hb, hab) = match (h(&a), h(&b), h(&ab)) {
            (Ok(x), Ok(y), Ok(z)) => (x, y, z),
            _ => return Err(TestCaseError::reject("not evaluable")),
        };
        prop_assert!(rel(ha * hb, hab) < 1e-8, "{ha} * {hb} vs {hab}");
    }

    #[test]
    fn connected_sum_with_a_closed_manifold_factors(s1 in 0u64..100_000, s2 in 0u64..100_000) {
        let e = engine();
        let a = random(s1, small(false, true));
        let b = random(s2, small(true, false));
        match e.connected_sum_check(&a, &b) {
            Ok(r) => prop_assert!(r.difference < 1e-8, "{r:?}"),
            Err(Error::NotAdmissible(_)) | Err(Error::NotSemisimpleDegree { .. }) => return Err(TestCaseError::reject("degenerate")),
            Err(err) => return Err(TestCaseError::fail(err.to_string())),
        }
    }

    #[test]
    fn exponents_follow_the_linking_form(seed in 0u64..100_000, graph in any::<bool>()) {
        let e = engine();
        let d = random(seed, RandomSpec { red_graph: graph, max_ops: 4, ..Default::default() });
        let rep = e.exponent_check(&d).unwrap();
        prop_assert!(rep.passed(), "{rep:?}");
    }
}
