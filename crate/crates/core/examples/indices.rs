//! Reservation price, backup price, hedging probability and local
//! approximation ratio of a few boxes, in exact arithmetic.
//!
//! ```bash
//! cargo run --example indices
//! ```

use pandora::dist::DiscreteDist;
use pandora::indices::Item;
use pandora::real::{Rational, Real};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn main() -> pandora::error::Result<()> {
    let boxes = [
        ("coin flip {0, 10}, cost 1", q(1, 1), DiscreteDist::new([(q(0, 1), q(1, 2)), (q(10, 1), q(1, 2))])?),
        ("coin flip {0, 10}, cost 2", q(2, 1), DiscreteDist::new([(q(0, 1), q(1, 2)), (q(10, 1), q(1, 2))])?),
        ("three values, cost 1/2", q(1, 2), DiscreteDist::new([(q(1, 1), q(1, 4)), (q(4, 1), q(1, 2)), (q(9, 1), q(1, 4))])?),
        ("expensive inspection", q(3, 1), DiscreteDist::new([(q(2, 1), q(1, 2)), (q(6, 1), q(1, 2))])?),
        ("known price", q(1, 1), DiscreteDist::point_mass(q(7, 1))),
    ];
    for (label, cost, dist) in boxes {
        let item = Item::new(0, cost, dist)?;
        let ix = item.indices();
        println!("{label}");
        println!("  mean {}  u_rsv {}  u_bkp {}", ix.mu, ix.u_rsv, ix.u_bkp);
        if ix.never_inspect {
            println!("  never worth inspecting: select blind at the mean");
        } else {
            // E[(u_rsv - V)^+] and E[(V - u_bkp)^+] both equal the cost.
            println!(
                "  shortfall at u_rsv {}  excess at u_bkp {}",
                item.dist().expected_shortfall(&ix.u_rsv),
                item.dist().expected_excess(&ix.u_bkp)
            );
        }
        println!(
            "  hedge with p = {} ({:.4}), local ratio alpha = {} ({:.4})\n",
            ix.p_hedge,
            ix.p_hedge.to_f64_lossy(),
            ix.alpha_local,
            ix.alpha_local.to_f64_lossy()
        );
    }
    Ok(())
}
