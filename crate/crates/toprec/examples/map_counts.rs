//! Rooted quadrangulation counts through the full pipeline: the one-cut
//! curve with formal γ, boundary-weighted residues at infinity, and the
//! γ²(t) series substitution down to integer counts.

use toprec::catalog::{make_quadrangulation_formal, quadrangulation_counts};
use toprec::engine::OmegaTable;
use toprec::field::Rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t4 = Rational::one();
    let oc = make_quadrangulation_formal(&t4)?;
    println!("derived vertex weight t = {}", oc.t.display_with("gamma"));

    // Closed forms in Q(gamma) before any series substitution.
    let table = OmegaTable::new(&oc.curve);
    let t4_count = table.counts_at_infinity(0, 1, &[4])?;
    println!("T^(0)_4   = {}", t4_count.display_with("gamma"));
    let t44 = table.counts_at_infinity(0, 2, &[4, 4])?;
    println!("T^(0)_4,4 = {}", t44.display_with("gamma"));

    // Integer counts by number of faces.
    for genus in [0u32, 1] {
        let counts = quadrangulation_counts(&t4, genus, &[4], 4)?;
        print!("genus {genus}, rooted, faces 1..: ");
        let vals: Vec<String> = counts.counts.iter().map(|(_, c)| c.to_string()).collect();
        println!("[{}]", vals.join(", "));
    }
    Ok(())
}
