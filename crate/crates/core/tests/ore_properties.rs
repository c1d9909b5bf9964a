use proptest::prelude::*;

use skewfep::linalg::Q;
use skewfep::ore::{
    left_divide, ore_right_lcm, right_divide, series_expand, Ring, SkewFraction, SkewPoly, SkewRing,
};
use skewfep::qalg::{inner_automorphism, QuatElement, QuaternionAlgebra};

// conjugation by 1 + j has order 2 on (−1,−1/Q)
fn inner_ring() -> Ring {
    let h = QuaternionAlgebra::hamilton();
    let y = QuatElement::from_ints(&h, [1, 0, 1, 0]);
    SkewRing::new(inner_automorphism(&y).unwrap()).unwrap()
}

fn poly(r: &Ring, c: &[[i64; 4]]) -> SkewPoly {
    let alg = r.algebra();
    SkewPoly::new(
        r,
        c.iter()
            .map(|v| QuatElement::from_q_vec(alg, &v.iter().map(|&x| Q::from_integer(x.into())).collect::<Vec<_>>()))
            .collect(),
    )
}

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<[i64; 4]>> {
    prop::collection::vec(prop::array::uniform4(-3i64..=3), 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn associativity_and_divisions(a in coeffs(3), b in coeffs(3), c in coeffs(2)) {
        let r = inner_ring();
        let (a, b, c) = (poly(&r, &a), poly(&r, &b), poly(&r, &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        if !b.is_zero() {
            let (q, rem) = right_divide(&a, &b).unwrap();
            prop_assert_eq!(&(&q * &b) + &rem, a.clone());
            let (q, rem) = left_divide(&a, &b).unwrap();
            prop_assert_eq!(&(&b * &q) + &rem, a.clone());
        }
        if !a.is_zero() && !b.is_zero() {
            let (m, u, v) = ore_right_lcm(&a, &b).unwrap();
            prop_assert_eq!(&a * &u, m.clone());
            prop_assert_eq!(&b * &v, m);
        }
    }

    #[test]
    fn fraction_product_matches_series(a in coeffs(2), b in coeffs(2), c in coeffs(2), d in coeffs(2)) {
        let r = inner_ring();
        let (a, b, c, d) = (poly(&r, &a), poly(&r, &b), poly(&r, &c), poly(&r, &d));
        prop_assume!(!b.is_zero() && !d.is_zero());
        let f = SkewFraction::new(a, b).unwrap();
        let g = SkewFraction::new(c, d).unwrap();
        let fg = f.mul(&g);
        prop_assume!(!fg.is_zero());
        let lhs = series_expand(&fg, 20);
        let rhs = series_expand(&f, 20).mul(&series_expand(&g, 20));
        prop_assert!(lhs.agrees_with(&rhs));
        prop_assert!(f.add(&g).sub(&g).equals(&f));
        let one = SkewFraction::from_poly(SkewPoly::one(&r));
        if !f.is_zero() {
            prop_assert!(f.mul(&f.inv().unwrap()).equals(&one));
        }
    }
}
