//! Loop-equation verification for the quartic one-cut curve: the residual
//! combination of correlators is a polynomial in x, and its small-t
//! expansion starts as t·V'(x)/x.

use toprec::catalog::{gamma_sq_series, make_quadrangulation_formal, make_quadrangulation_rational};
use toprec::engine::loop_equation_check;
use toprec::field::{FieldElem, FieldTag, Rational};
use toprec::ratfunc::{UniRatFunc, ZPoly};
use toprec::series::series_substitute_even;

fn vprime(t4: &Rational, tag: FieldTag) -> UniRatFunc {
    // V'(x) = x - t4 x^3
    UniRatFunc::from_poly(ZPoly::new(
        tag,
        vec![
            FieldElem::zero(tag),
            FieldElem::one(tag),
            FieldElem::zero(tag),
            FieldElem::from_rational(tag, -t4),
        ],
    ))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t4 = Rational::one();
    let oc = make_quadrangulation_formal(&t4)?;
    let rep = loop_equation_check(&oc.curve, &vprime(&t4, FieldTag::Qu), 0, 0, &[])?;
    println!("P_1^(0)(x) coefficients over Q(gamma):");
    for (i, c) in rep.residual_in_x.iter().enumerate() {
        println!("  x^{i}: {}", c.display_with("gamma"));
    }
    let gsq = gamma_sq_series(&t4, 6);
    let p0 = series_substitute_even(&rep.residual_in_x[0], &gsq, 3)?;
    print!("constant term as a t-series:");
    for e in 1..=3 {
        print!(" t^{e}: {}", p0.coefficient(e)?);
    }
    println!();

    // Higher levels at a sampled rational curve.
    let t4 = Rational::ratio(1, 5);
    let oc = make_quadrangulation_rational(&t4, &Rational::ratio(1, 2))?;
    let sample = [FieldElem::from_int(FieldTag::Q, 3)];
    for (g, n) in [(0u32, 1u32), (1, 1)] {
        let rep = loop_equation_check(&oc.curve, &vprime(&t4, FieldTag::Q), g, n, &sample)?;
        println!(
            "(g,n) = ({g},{n}): polynomial residual with {} coefficients",
            rep.residual_in_x.len()
        );
    }
    Ok(())
}
