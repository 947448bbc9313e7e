//! Monte Carlo estimates against exact values. Each trial draws from its
//! own counter-based stream, so results do not depend on thread count.
//!
//! ```bash
//! cargo run --release --example monte_carlo
//! ```

use pandora::enumerate::Budget;
use pandora::harness::random::{case_rng, random_instance, RandomParams};
use pandora::instance::Instance;
use pandora::single::{evaluate_policy_exact, evaluate_policy_mc, Policy};

fn main() -> pandora::error::Result<()> {
    let params = RandomParams::default().with_items(4, 5);
    let inst: Instance<f64> = random_instance(&params, &mut case_rng(7, 0));
    println!("{} boxes\n", inst.len());
    for policy in [Policy::Weitzman, Policy::LocalHedging] {
        let exact = evaluate_policy_exact(&inst, policy, Budget::default())?;
        println!("{} (exact {exact:.6})", policy.name());
        for trials in [1_000, 10_000, 100_000, 1_000_000] {
            let est = evaluate_policy_mc(&inst, policy, trials, 1);
            let z = (est.mean - exact) / est.stderr.max(f64::MIN_POSITIVE);
            println!("  {trials:>9} trials: {:.6} ± {:.6}  ({z:+.2} stderr)", est.mean, est.stderr);
        }
    }
    let a = evaluate_policy_mc(&inst, Policy::LocalHedging, 200_000, 99);
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("thread pool")
        .install(|| evaluate_policy_mc(&inst, Policy::LocalHedging, 200_000, 99));
    println!("\nsame seed, default pool vs one thread: identical = {}", a == b);
    Ok(())
}
