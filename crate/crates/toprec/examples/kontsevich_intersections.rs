//! Intersection-number generating data from the x = z² curve with odd
//! times: correlators, the genus-two free energy, and a ψ-class bracket
//! extracted through the dictionary prefactor.

use toprec::catalog::make_kontsevich;
use toprec::engine::OmegaTable;
use toprec::field::{FieldElem, FieldTag, Rational};
use toprec::forms::kappa_psi_bracket;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = |n: i64, d: i64| Rational::ratio(n, d);
    // Odd times t3, t5, t7, t9 (even slots stay zero and drop out).
    let times = vec![
        r(1, 2),
        r(0, 1),
        r(1, 3),
        r(0, 1),
        r(-2, 5),
        r(0, 1),
        r(1, 7),
    ];
    let curve = make_kontsevich(&times)?;
    let table = OmegaTable::new(&curve);

    let o11 = table.omega(1, 1)?;
    println!("omega_1^(1) = {:?}", o11.stable().unwrap());
    println!("F2 = {}", table.fg(2)?);

    // <tau_1> = 1/24 from the zero-times curve: divide the dz/z^4
    // coefficient by 2^{-d}(t3-2)^{2-2g-n}(2d+1)!/d!.
    let airy = make_kontsevich(&[])?;
    let a_table = OmegaTable::new(&airy);
    let a11 = a_table.omega(1, 1)?;
    let tau1 = kappa_psi_bracket(
        a11.stable().unwrap(),
        &FieldElem::zero(FieldTag::Q),
        &[1],
    )?;
    println!("<tau_1> = {tau1}");
    Ok(())
}
