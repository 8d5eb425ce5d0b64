//! First-order expansion of the determinantal kernel: the prime-form
//! denominator and the exact interval integrals ∫ω₁^(1) and (1/6)∫∫∫ω₃^(0).

use toprec::catalog::{make_kontsevich, make_minimal_p2};
use toprec::engine::kernel_h_expansion;
use toprec::field::{FieldElem, FieldTag, Rational};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = |n: i64, d: i64| Rational::ratio(n, d);
    let airy = make_kontsevich(&[])?;
    let k = kernel_h_expansion(&airy, 1)?;
    println!("prefactor: {}", k.prefactor);
    println!("prime form: {}", k.prime_form_denominator);
    for (label, c) in &k.corrections {
        println!("{label} = {c}");
    }

    // Evaluate the corrections at (z1, z2) = (2, 1).
    let z1 = FieldElem::from_int(FieldTag::Q, 2);
    let z2 = FieldElem::from_int(FieldTag::Q, 1);
    for (label, c) in &k.corrections {
        println!("{label} at (2,1) = {}", c.eval(&z1, &z2)?);
    }

    // The same expansion on the two-branchpoint pure-gravity curve.
    let pg = make_minimal_p2(&r(1, 1), &[r(-3, 1), r(1, 1)])?;
    let k = kernel_h_expansion(&pg, 1)?;
    println!(
        "pure gravity, (1/6) triple integral at (2,1) = {}",
        k.corrections[1].1.eval(&z1, &z2)?
    );
    Ok(())
}
