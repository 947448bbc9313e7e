//! Surrogate lower bound, exact optimum and local hedging on random
//! instances: the optimum always sits between the bound and the policy.
//!
//! ```bash
//! cargo run --example oracle_sandwich
//! ```

use pandora::enumerate::Budget;
use pandora::harness::random::{case_rng, random_instance, RandomParams};
use pandora::indices::SurrogateKind;
use pandora::instance::Instance;
use pandora::oracle::opt_value_single_noi;
use pandora::single::{evaluate_policy_exact, expected_min_surrogate, Policy};

fn main() -> pandora::error::Result<()> {
    let params = RandomParams::default().with_items(2, 6);
    let budget = Budget::default();
    println!("{:>4} {:>3} {:>10} {:>10} {:>10} {:>10} {:>8}", "case", "N", "bound", "optimum", "hedging", "weitzman", "ratio");
    let mut worst: f64 = 1.0;
    for i in 0..12 {
        let inst: Instance<f64> = random_instance(&params, &mut case_rng(2024, i));
        let bound = expected_min_surrogate(&inst, SurrogateKind::Noi);
        let opt = opt_value_single_noi(&inst, budget)?;
        let lh = evaluate_policy_exact(&inst, Policy::LocalHedging, budget)?;
        let weitzman = evaluate_policy_exact(&inst, Policy::Weitzman, budget)?;
        assert!(bound <= opt + 1e-12 && opt <= lh + 1e-12);
        let ratio = lh / opt;
        worst = worst.max(ratio);
        println!("{i:>4} {:>3} {bound:>10.4} {opt:>10.4} {lh:>10.4} {weitzman:>10.4} {ratio:>8.4}", inst.len());
    }
    println!("\nworst hedging / optimum: {worst:.4} (never above 4/3)");
    Ok(())
}
