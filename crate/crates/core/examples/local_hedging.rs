//! Weitzman's rule, local hedging and the best committing policy on a
//! two-box instance where inspection is optional.
//!
//! ```bash
//! cargo run --example local_hedging
//! ```

use pandora::dist::DiscreteDist;
use pandora::enumerate::Budget;
use pandora::indices::SurrogateKind;
use pandora::instance::{HedgeCoins, Instance, Realization};
use pandora::oracle::opt_value_single_noi;
use pandora::real::{Rational, Real};
use pandora::single::{evaluate_policy_exact, expected_min_surrogate, local_hedging_policy, Policy};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn main() -> pandora::error::Result<()> {
    // A free box known to hold 5, and a box worth 0 or 10 that costs 2 to open.
    let instance = Instance::from_parts([
        (q(0, 1), DiscreteDist::point_mass(q(5, 1))),
        (q(2, 1), DiscreteDist::new([(q(0, 1), q(1, 2)), (q(10, 1), q(1, 2))])?),
    ])?;
    let budget = Budget::default();

    for policy in Policy::ALL {
        let cost = evaluate_policy_exact(&instance, policy, budget)?;
        println!("{:<14} expected cost {} ({:.6})", policy.name(), cost, cost.to_f64_lossy());
    }

    let lower = expected_min_surrogate(&instance, SurrogateKind::Noi);
    let opt = opt_value_single_noi(&instance, budget)?;
    let lh = evaluate_policy_exact(&instance, Policy::LocalHedging, budget)?;
    println!("\nlower bound E[min W^NOI] = {lower}");
    println!("optimum                  = {opt}");
    println!(
        "local hedging / bound    = {} ({:.4}), guaranteed at most {}",
        lh.clone() / lower.clone(),
        (lh / lower).to_f64_lossy(),
        instance.max_alpha()
    );

    // One run with the second box labelled "take blind".
    let realization = Realization::new(vec![q(5, 1), q(0, 1)]);
    let trace = local_hedging_policy(&instance, &realization, &HedgeCoins::new(vec![true, false]));
    println!("\none run, labels [inspect, blind], box 1 holds 0:");
    println!("  inspected {:?}, selected {:?}, cost {}", trace.inspection_order, trace.selected, trace.total_cost);
    Ok(())
}
