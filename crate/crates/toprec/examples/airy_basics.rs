//! The simplest curve end to end: build x = z², y = z, run the recursion,
//! and print the first few correlators and free energies.

use toprec::catalog::make_kontsevich;
use toprec::engine::OmegaTable;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let curve = make_kontsevich(&[])?;
    println!("x = {}", curve.x());
    let b = &curve.branchpoints()[0];
    println!("branchpoint a = {}, involution sigma = {}", b.a, b.sigma);

    let table = OmegaTable::new(&curve);
    for (g, n) in [(0u32, 3u32), (0, 4), (1, 1), (1, 2), (2, 1)] {
        let omega = table.omega(g, n)?;
        println!("omega_{n}^({g}) = {:?}", omega.stable().unwrap());
    }
    println!("F1 log-argument y'(a) = {}", table.f1_log_argument()?);
    for g in [2u32, 3] {
        println!("F_{g} = {}", table.fg(g)?);
    }
    Ok(())
}
