//! Volume polynomials over ℚ[p] (p standing for π²): the one-boundary
//! genus-one volume L²/48 + π²/12 via the Laplace dictionary.

use toprec::catalog::{make_weil_petersson, ttilde_series, weil_petersson_times};
use toprec::engine::OmegaTable;
use toprec::forms::laplace_volume_dictionary;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let times = weil_petersson_times(4);
    for (d, t) in times.iter().enumerate() {
        println!("t{} = {}", 2 * d + 3, t.display_with("p"));
    }
    let tt = ttilde_series(&times, 3)?;
    println!("transformed times: t~1 = {}", tt.coefficient(1)?.display_with("p"));

    let curve = make_weil_petersson(3)?;
    let table = OmegaTable::new(&curve);
    let o11 = table.omega(1, 1)?;
    let xpp = curve.branchpoints()[0].xpp_half.clone();
    let vol = laplace_volume_dictionary(o11.stable().unwrap(), &xpp)?;
    println!("V_(1,1)(L) = {vol}");
    Ok(())
}
