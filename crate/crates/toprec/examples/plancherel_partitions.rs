//! Partition-counting curves: log-type y over ℚ(E) with E standing for
//! e^{-u₀}. The trivial curve has vanishing higher free energies; with the
//! second Casimir switched on the engine produces the exact rational
//! multiple of E^{-2}.

use toprec::catalog::make_plancherel;
use toprec::engine::OmegaTable;
use toprec::field::Rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trivial = make_plancherel(&Rational::zero())?;
    let table = OmegaTable::new(&trivial);
    println!("trivial curve: F2 = {}", table.fg(2)?.display_with("E"));

    let u1 = Rational::ratio(1, 2);
    let curve = make_plancherel(&u1)?;
    println!("u1 = {u1}: x = {} (u stands for E)", curve.x());
    let table = OmegaTable::new(&curve);
    let f2 = table.fg(2)?;
    println!("u1 = {u1}: F2 = {}", f2.display_with("E"));
    println!("(matches the printed closed form up to its overall sign; see the verify suite)");
    Ok(())
}
