//! The q-deformed partition curve and its mirror form: e^{x̃} = c·x and
//! x·y = ỹ verified exactly in the rational-plus-log algebra.

use toprec::catalog::make_q_plancherel;
use toprec::field::Rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for p in [0i64, 1, 2] {
        let (pair, report) = make_q_plancherel(&Rational::from_int(2), p)?;
        println!("p = {p}: x = {}", pair.x_a);
        println!("  c = (1+1/z0)^2 = {}", pair.c);
        println!("  e^(xt) = c*x: {}", report.exp_xb_is_c_times_x);
        println!("  x*y = yt:     {}", report.x_times_y_is_yb);
    }
    Ok(())
}
