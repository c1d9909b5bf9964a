use proptest::prelude::*;

use skewfep::group::{from_catalog, members, GroupHom};
use skewfep::linalg::Q;
use skewfep::numfield::{automorphisms, Field, FieldElement, NumberField};
use skewfep::qalg::{reduced_norm_via_matrix, QuatElement, QuaternionAlgebra};

fn quartic() -> Field {
    NumberField::from_ints(&[2, 0, -4, 0, 1], "Q(sqrt(2+sqrt2))").unwrap()
}

fn coords(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-5i64..=5, n)
}

fn quat(alg: &skewfep::qalg::Algebra, v: &[i64]) -> QuatElement {
    let q: Vec<Q> = v.iter().map(|&x| Q::from_integer(x.into())).collect();
    QuatElement::from_q_vec(alg, &q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(a in coords(4), b in coords(4), c in coords(4)) {
        let f = quartic();
        let (x, y, z) = (FieldElement::from_ints(&f, &a), FieldElement::from_ints(&f, &b), FieldElement::from_ints(&f, &c));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        if let Some(xi) = x.inv() {
            prop_assert_eq!(&x * &xi, FieldElement::one(&f));
        } else {
            prop_assert!(x.is_zero());
        }
    }

    #[test]
    fn automorphisms_are_ring_maps(a in coords(4), b in coords(4)) {
        let f = quartic();
        let (x, y) = (FieldElement::from_ints(&f, &a), FieldElement::from_ints(&f, &b));
        for s in automorphisms(&f) {
            prop_assert_eq!(s.apply(&(&x * &y)), &s.apply(&x) * &s.apply(&y));
            prop_assert_eq!(s.apply(&(&x + &y)), &s.apply(&x) + &s.apply(&y));
            prop_assert_eq!(s.inverse().apply(&s.apply(&x)), x.clone());
        }
    }

    #[test]
    fn reduced_norm_is_multiplicative(a in coords(8), b in coords(8)) {
        let f = NumberField::quadratic(2).unwrap();
        let h = QuaternionAlgebra::from_ints(&f, -1, -3).unwrap();
        let (x, y) = (quat(&h, &a), quat(&h, &b));
        prop_assert_eq!((&x * &y).reduced_norm(), &x.reduced_norm() * &y.reduced_norm());
        prop_assert_eq!(&x * &x.conj(), QuatElement::scalar(&h, x.reduced_norm()));
        if !x.is_zero() {
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn reduced_norm_matches_matrix_determinant(a in coords(4)) {
        let h = QuaternionAlgebra::hamilton();
        let x = quat(&h, &a);
        let (det, emb) = reduced_norm_via_matrix(&x).unwrap();
        prop_assert_eq!(emb.apply(&x.reduced_norm()), det);
    }

    #[test]
    fn closures_are_subgroups(name in prop::sample::select(vec!["Q8", "D8", "Z/12", "Z/2 x Z/4", "D12"]), seed in any::<u64>()) {
        let g = from_catalog(name).unwrap();
        let n = g.order();
        let gens: Vec<usize> = (0..3).map(|k| ((seed >> (16 * k)) as usize) % n).collect();
        let s = g.closure(&gens);
        prop_assert!(g.is_subgroup(s));
        prop_assert_eq!(n % s.count_ones() as usize, 0);
        for x in members(s) {
            prop_assert!(gens.iter().all(|&y| members(s).any(|z| z == y)));
            prop_assert_eq!(g.mul(x, g.inv(x)), g.identity());
        }
    }

    #[test]
    fn kernels_are_normal(name in prop::sample::select(vec!["Q8", "D8", "Z/4", "Z/2 x Z/2"])) {
        let g = from_catalog(name).unwrap();
        let z2 = from_catalog("Z/2").unwrap();
        let gens = g.generators();
        for imgs in (0..1usize << gens.len()).map(|m| (0..gens.len()).map(|k| (m >> k) & 1).collect::<Vec<_>>()) {
            if let Some(h) = GroupHom::from_generators(&g, &z2, &gens, &imgs) {
                prop_assert!(g.is_normal(h.kernel()));
                prop_assert_eq!(h.kernel().count_ones() as usize * members(h.image()).count(), g.order());
            }
        }
    }
}
