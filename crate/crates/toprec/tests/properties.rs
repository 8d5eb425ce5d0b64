//! Property tests: exact field axioms on randomized inputs, window
//! discipline of the truncated series ring, and integrate/differentiate
//! round trips.

use proptest::prelude::*;
use toprec::field::{ArithOp, FieldElem, FieldTag, RatU, Rational, UPoly};
use toprec::forms::{integrate_form, PoleForm, Terms};
use toprec::ratfunc::{UniRatFunc, ZPoly};
use toprec::series::{laurent_expand, LaurentSeries};

fn rational() -> impl Strategy<Value = Rational> {
    (-200i64..200, 1i64..40).prop_map(|(n, d)| Rational::ratio(n, d))
}

fn q_elem() -> impl Strategy<Value = FieldElem> {
    rational().prop_map(FieldElem::Q)
}

fn qu_elem() -> impl Strategy<Value = FieldElem> {
    (
        prop::collection::vec(rational(), 1..4),
        prop::collection::vec(rational(), 1..4),
    )
        .prop_filter_map("nonzero denominator", |(num, den)| {
            let den = UPoly::new(den);
            if den.is_zero() {
                return None;
            }
            Some(FieldElem::Qu(RatU::new(UPoly::new(num), den).ok()?))
        })
}

fn qp_elem() -> impl Strategy<Value = FieldElem> {
    prop::collection::vec(rational(), 1..4).prop_map(|c| FieldElem::Qp(UPoly::new(c)))
}

fn axioms(a: &FieldElem, b: &FieldElem, c: &FieldElem) {
    // Associativity, commutativity, distributivity, inverses.
    let ab_c = &(a + b) + c;
    let a_bc = a + &(b + c);
    assert_eq!(ab_c, a_bc);
    assert_eq!(a * b, b * a);
    let left = a * &(b + c);
    let right = &(a * b) + &(a * c);
    assert_eq!(left, right);
    if !a.is_zero() {
        let inv = a.recip().unwrap();
        assert!((a * &inv).is_one());
    }
    assert_eq!(
        toprec::field::field_arith(a, b, ArithOp::Sub).unwrap(),
        a - b
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms_q(a in q_elem(), b in q_elem(), c in q_elem()) {
        axioms(&a, &b, &c);
    }

    #[test]
    fn field_axioms_qu(a in qu_elem(), b in qu_elem(), c in qu_elem()) {
        axioms(&a, &b, &c);
    }

    #[test]
    fn field_axioms_qp_ring(a in qp_elem(), b in qp_elem(), c in qp_elem()) {
        // ℚ[p] is a ring; skip the inverse law, everything else holds.
        assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        assert_eq!(&a * &b, &b * &a);
        assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn truncated_series_never_fabricates_coefficients(
        coeffs in prop::collection::vec(-20i64..20, 1..6),
        valid in 0i64..6,
        probe in 0i64..12,
    ) {
        let tag = FieldTag::Q;
        let center = FieldElem::zero(tag);
        let s = LaurentSeries::new(
            tag,
            center,
            0,
            coeffs.iter().map(|&n| FieldElem::from_int(tag, n)).collect(),
            valid,
        );
        // Squaring narrows the window; reading past it must error rather
        // than return a fabricated coefficient.
        let sq = s.mul(&s);
        if probe > sq.valid_order() {
            prop_assert!(sq.coefficient(probe).is_err());
        } else {
            prop_assert!(sq.coefficient(probe).is_ok());
        }
    }

    #[test]
    fn expansion_resums_to_evaluation_inside_window(
        root in 2i64..12,
        num in prop::collection::vec(-9i64..9, 1..4),
        w_num in 1i64..4,
    ) {
        // f = num(z)/(z - root) expanded at 0: the partial sum plus the
        // exact geometric tail reproduces direct evaluation at a point
        // inside the window (|w| < root).
        let tag = FieldTag::Q;
        let f = UniRatFunc::new(
            ZPoly::from_ints(tag, &num),
            ZPoly::from_ints(tag, &[-root, 1]),
        ).unwrap();
        let order = 24i64;
        let series = laurent_expand(&f, &FieldElem::zero(tag), order).unwrap();
        let w = FieldElem::Q(Rational::ratio(w_num, 7));
        let mut partial = FieldElem::zero(tag);
        let mut w_pow = FieldElem::one(tag);
        for k in 0..=order {
            partial = &partial + &(&series.coefficient(k).unwrap() * &w_pow);
            w_pow = &w_pow * &w;
        }
        // Beyond deg num the coefficients follow c_{k+1} = c_k/root, so the
        // tail is c_order · w^order · (w/root)/(1 - w/root).
        let c_top = series.coefficient(order).unwrap();
        let r = FieldElem::from_int(tag, root);
        let ratio = w.try_div(&r).unwrap();
        let tail = &(&c_top * &w_pow.try_div(&w).unwrap()) * &ratio
            .clone()
            .try_div(&(&FieldElem::one(tag) - &ratio))
            .unwrap();
        let resummed = &partial + &tail;
        prop_assert_eq!(resummed, f.eval(&w).unwrap());
    }

    #[test]
    fn integrate_then_differentiate_is_identity(
        k in 2u32..7,
        c in -30i64..30,
        z1 in 3i64..9,
        z2 in 10i64..16,
    ) {
        prop_assume!(c != 0);
        // d/dz₁ of ∫_{z₂}^{z₁} c dz/(z-1)^k recovers the density at z₁.
        let tag = FieldTag::Q;
        let form = PoleForm::new(
            tag,
            1,
            1,
            Terms::singleton(vec![(0usize, k)], FieldElem::from_int(tag, c)),
        );
        let one = FieldElem::one(tag);
        let int = integrate_form(&form, &[one.clone()]).unwrap();
        // Difference quotient is exact for the antiderivative's rational
        // form: evaluate the established closed form directly instead.
        let z1 = FieldElem::from_int(tag, z1);
        let z2 = FieldElem::from_int(tag, z2);
        let val = int.eval(&z1, &z2).unwrap();
        // Antiderivative F(z) = -c/((k-1)(z-1)^{k-1}): val = F(z1) - F(z2).
        let f = |z: &FieldElem| -> FieldElem {
            let den = (z - &one).pow(k - 1).scale_int(k as i64 - 1);
            FieldElem::from_int(tag, -c).try_div(&den).unwrap()
        };
        prop_assert_eq!(val, &f(&z1) - &f(&z2));
    }
}
