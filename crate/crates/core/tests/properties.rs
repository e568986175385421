use dynpaths::graph::generators::{gnp, random_updates};
use dynpaths::graph::script::{ScriptEvent, UpdateScript};
use dynpaths::graph::Dist;
use dynpaths::inverse::InverseState;
use dynpaths::polymat::{encode, mat_mul, series_inverse, PolyMatrix};
use dynpaths::ring::{Field, FieldParams, TruncPoly};
use proptest::prelude::*;

fn poly(depth: usize) -> impl Strategy<Value = TruncPoly> {
    prop::collection::vec(any::<u64>(), depth + 1)
        .prop_map(move |c| TruncPoly::from_coeffs(Field::default(), depth, &c))
}

fn small_field_poly(depth: usize) -> impl Strategy<Value = TruncPoly> {
    prop::collection::vec(0u64..97, depth + 1)
        .prop_map(move |c| TruncPoly::from_coeffs(Field::new(97).unwrap(), depth, &c))
}

proptest! {
    #[test]
    fn ring_axioms(a in poly(5), b in poly(5), c in poly(5)) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn units_invert(a in small_field_poly(6)) {
        let one = TruncPoly::one(a.field(), 6);
        match a.inv() {
            Ok(inv) => prop_assert_eq!(a.mul(&inv).unwrap(), one),
            Err(_) => prop_assert_eq!(a.coeff(0), 0),
        }
    }

    #[test]
    fn series_inverse_round_trip(n in 1usize..7, depth in 1usize..6, seed in any::<u64>(), p in 0.0f64..0.6) {
        let g = gnp(n, p, true, seed);
        let a = encode(&g, FieldParams { rng_seed: seed, ..Default::default() }, depth).unwrap().matrix;
        let inv = series_inverse(&a).unwrap();
        let i_minus_a = PolyMatrix::identity(a.field(), depth, n).sub(&a).unwrap();
        prop_assert!(mat_mul(&inv, &i_minus_a).unwrap().is_identity());
        prop_assert!(mat_mul(&i_minus_a, &inv).unwrap().is_identity());
    }

    #[test]
    fn dynamic_inverse_tracks_updates(n in 2usize..7, seed in any::<u64>(), kappa in 0.1f64..1.0) {
        let depth = 4;
        let params = FieldParams { rng_seed: seed, ..Default::default() };
        let g0 = gnp(n, 0.3, true, seed);
        let enc = encode(&g0, params, depth).unwrap();
        let mut st = InverseState::from_encoded(&enc, kappa).unwrap();
        let mut g = g0.clone();
        for ev in random_updates(&g0, 15, 0.5, seed ^ 1) {
            let (i, j) = ev.endpoints();
            let v = enc.entry_for(i, j);
            g.apply(ev).unwrap();
            st.update(i, j, &if ev.is_insert() { v } else { v.neg() }).unwrap();
        }
        let a = encode(&g, params, depth).unwrap().matrix;
        prop_assert_eq!(st.reconstruct(), series_inverse(&a).unwrap());
    }

    #[test]
    fn script_text_round_trip(n in 2usize..20, seed in any::<u64>(), with_phase in any::<bool>()) {
        let g = gnp(n, 0.3, false, seed);
        let mut s = UpdateScript::from_graph(&g);
        s.annotations.push("threshold 1 9".into());
        for ev in random_updates(&g, 10, 0.5, seed) {
            s.push(ev);
        }
        s.push(ScriptEvent::DistQuery { u: 0, v: n - 1, expected: Some(Dist::Finite(3)) });
        s.push(ScriptEvent::DistQuery { u: 1, v: 0, expected: Some(Dist::Inf) });
        s.push(ScriptEvent::PathQuery { u: 0, v: 1 });
        s.push(ScriptEvent::AddTerminal(1));
        s.push(ScriptEvent::RemoveTerminal(1));
        s.push(ScriptEvent::Phase { index: 1, expected_bit: with_phase.then_some(true) });
        let back = UpdateScript::parse(&s.to_text()).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.thresholds(), vec![(1, 9)]);
    }
}
