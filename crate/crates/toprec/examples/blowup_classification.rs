//! Branchpoint blow-up types: regular square-root points carry their local
//! slope data; cusp-type points report the (p, q) exponents — including the
//! merged-branchpoint cusp of a tuned external-field curve.

use toprec::catalog::{make_gaussian_external, make_minimal_p2};
use toprec::curve::{classify_branchpoint, Classification, YData};
use toprec::field::{FieldElem, FieldTag, Rational};
use toprec::ratfunc::{UniRatFunc, ZPoly};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = |n: i64, d: i64| Rational::ratio(n, d);
    let tag = FieldTag::Q;

    // One group of movers at the origin: branchpoints ±1, both regular.
    let t = make_gaussian_external(&[r(1, 1)], &[r(0, 1)])?;
    let curve = t.curve.expect("branchpoints found in the field");
    for b in curve.branchpoints() {
        let cls = classify_branchpoint(curve.x(), curve.ydata(), &b.a)?;
        println!("x = z + 1/z at a = {}: {cls:?}", b.a);
    }

    // Tuned merge: x = z + (1/2)/(z-1) + (1/2)/(z+1) has a double zero of
    // dx at the origin — the cusp where two edges of the mover support
    // collide.
    let t = make_gaussian_external(&[r(1, 2), r(1, 2)], &[r(1, 1), r(-1, 1)])?;
    let cls = classify_branchpoint(&t.x, &YData::Rational(t.y.clone()), &FieldElem::zero(tag))?;
    println!("tuned double point at 0: {cls:?}");
    assert_eq!(cls, Classification::Singular { p: 1, q: 3 });

    // The degenerate member of the cubic family: y ~ x^{3/2}.
    let family = |t: i64| {
        // x = z², y = z³ - 3tz, regular for t ≠ 0.
        let x = UniRatFunc::from_poly(ZPoly::from_ints(tag, &[0, 0, 1]));
        let y = UniRatFunc::from_poly(ZPoly::new(
            tag,
            vec![
                FieldElem::zero(tag),
                FieldElem::from_int(tag, -3 * t),
                FieldElem::zero(tag),
                FieldElem::one(tag),
            ],
        ));
        (x, y)
    };
    let (x, y) = family(0);
    let cls = classify_branchpoint(&x, &YData::Rational(y), &FieldElem::zero(tag))?;
    println!("x = z², y = z³ at 0: {cls:?}");
    assert_eq!(cls, Classification::Singular { p: 3, q: 2 });

    // F_g of the family scales as t^{5(1-g)}: check at g = 2, t = 4.
    let base = make_minimal_p2(&r(0, 1), &[r(-3, 1), r(1, 1)])?;
    let scaled = make_minimal_p2(&r(0, 1), &[r(-12, 1), r(1, 1)])?;
    let f2_base = toprec::engine::compute_fg(&base, 2)?;
    let f2_scaled = toprec::engine::compute_fg(&scaled, 2)?;
    println!("F2(t=1) = {f2_base}, F2(t=4) = {f2_scaled} = t^-5 F2(1)");
    Ok(())
}
