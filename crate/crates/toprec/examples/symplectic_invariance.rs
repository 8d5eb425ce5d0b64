//! Invariance in action: shear y by a rational function of x, move x by a
//! Möbius map, rescale (x, y) — the correlators and free energies do not
//! move. Exchanging x and y changes every ω but fixes the free energies.

use toprec::catalog::make_minimal_p2;
use toprec::curve::TransformSpec;
use toprec::engine::OmegaTable;
use toprec::field::{FieldElem, FieldTag, Rational};
use toprec::ratfunc::{UniRatFunc, ZPoly};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = |n: i64, d: i64| Rational::ratio(n, d);
    let curve = make_minimal_p2(&r(1, 1), &[r(-3, 1), r(1, 1)])?;
    let table = OmegaTable::new(&curve);
    let f2 = table.fg(2)?;
    let omega = table.omega(1, 1)?;
    println!("base curve: F2 = {f2}, omega_1^(1) = {:?}", omega.stable().unwrap());

    let tag = FieldTag::Q;
    let shear = TransformSpec::AddRofX(UniRatFunc::from_poly(ZPoly::new(
        tag,
        vec![FieldElem::zero(tag), FieldElem::from_int(tag, 2)],
    )));
    let transforms: Vec<(&str, TransformSpec)> = vec![
        ("y -> y + 2x", shear),
        (
            "x -> 2x + 1",
            TransformSpec::MobiusX {
                a: FieldElem::from_int(tag, 2),
                b: FieldElem::one(tag),
                c: FieldElem::zero(tag),
                d: FieldElem::one(tag),
            },
        ),
        ("(x, y) -> (x/3, 3y)", TransformSpec::ScaleXY(FieldElem::from_int(tag, 3))),
    ];
    for (label, t) in transforms {
        let moved = curve.apply_transform(&t)?;
        let mt = OmegaTable::new(&moved);
        assert_eq!(mt.fg(2)?, f2);
        assert_eq!(mt.omega(1, 1)?.stable(), omega.stable());
        println!("{label}: F2 and omega_1^(1) unchanged");
    }

    let swapped = curve.apply_transform(&TransformSpec::SwapXY)?;
    let st = OmegaTable::new(&swapped);
    println!(
        "swap x <-> y: branchpoints now at {:?}, F2 = {} (equal), F3 = {} = {}",
        swapped
            .branchpoints()
            .iter()
            .map(|b| b.a.to_string())
            .collect::<Vec<_>>(),
        st.fg(2)?,
        table.fg(3)?,
        st.fg(3)?,
    );
    Ok(())
}
