//! The one-item problem: a box against a sure outside option `r`.
//!
//! The optimal value of choosing between the box and `r` is the capped
//! expectation `E[min(W, r)]` of the surrogate price `W`, with or without
//! the option to take the box uninspected.
//!
//! ```bash
//! cargo run --example one_item
//! ```

use pandora::dist::DiscreteDist;
use pandora::indices::{Item, SurrogateKind};
use pandora::real::{Extended, Rational, Real};
use pandora::single::{one_item_optimal_action, one_item_value, Regime};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn main() -> pandora::error::Result<()> {
    let item = Item::new(0, q(1, 1), DiscreteDist::new([(q(0, 1), q(1, 2)), (q(10, 1), q(1, 2))])?)?;
    let ix = item.indices();
    println!("box: {{0, 10}} equally likely, cost 1; u_rsv {}, u_bkp {}\n", ix.u_rsv, ix.u_bkp);
    println!("{:>5}  {:<22} {:>10} {:>10} {:>12} {:>12}", "r", "best action", "OI value", "E[min W^OI]", "NOI value", "E[min W^NOI]");
    for r in [0, 1, 2, 3, 4, 5, 6, 8, 10, 12].map(|r| q(r, 1)) {
        let ext = Extended::Finite(r.clone());
        println!(
            "{:>5}  {:<22} {:>10} {:>11} {:>12} {:>12}",
            r.to_string(),
            format!("{:?}", one_item_optimal_action(&item, &ext)),
            one_item_value(&item, &ext, Regime::Oi).to_string(),
            item.capped_expectation(SurrogateKind::Oi, &r).to_string(),
            one_item_value(&item, &ext, Regime::Noi).to_string(),
            item.capped_expectation(SurrogateKind::Noi, &r).to_string(),
        );
    }
    Ok(())
}
