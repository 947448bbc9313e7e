//! The high-variance two-point family whose local ratio approaches 4/3.
//!
//! ```bash
//! cargo run --example worst_case
//! ```

use pandora::indices::make_worst_case_item;
use pandora::real::{Rational, Real};

fn main() -> pandora::error::Result<()> {
    println!("{:>8} {:>14} {:>14} {:>12}", "delta", "alpha", "closed form", "4/3 - alpha");
    for k in 1..=6u32 {
        let delta = Rational::from_ratio(1, 10i64.pow(k));
        let one = Rational::from_ratio(1, 1);
        let two = Rational::from_ratio(2, 1);
        // u_rsv = 1, mean 2, cost 1 - delta.
        let item = make_worst_case_item(one.clone(), two.clone(), one - delta.clone())?;
        let alpha = item.indices().alpha_local.clone();
        let closed = (two - delta.clone()) / (Rational::from_ratio(3, 2) - delta.clone() / Rational::from_ratio(2, 1));
        assert_eq!(alpha, closed);
        println!(
            "{:>8} {:>14.10} {:>14.10} {:>12.3e}",
            delta.to_f64_lossy(),
            alpha.to_f64_lossy(),
            closed.to_f64_lossy(),
            (Rational::from_ratio(4, 3) - alpha).to_f64_lossy()
        );
    }
    Ok(())
}
