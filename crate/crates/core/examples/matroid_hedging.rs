//! Frugal selection and combinatorial local hedging on a spanning-tree
//! problem over a triangle, with exact expectations.
//!
//! ```bash
//! cargo run --example matroid_hedging
//! ```

use pandora::comb::{evaluate_comb_policy_exact, expected_surrogate_cost, CombModel, Family, Terminal};
use pandora::dist::DiscreteDist;
use pandora::enumerate::Budget;
use pandora::indices::SurrogateKind;
use pandora::instance::Instance;
use pandora::oracle::opt_value_comb_noi;
use pandora::real::{Rational, Real};
use pandora::single::Policy;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn main() -> pandora::error::Result<()> {
    // Edges 0-1, 1-2, 0-2; any two of them form a spanning tree.
    let instance = Instance::from_parts([
        (q(1, 2), DiscreteDist::new([(q(1, 1), q(1, 2)), (q(6, 1), q(1, 2))])?),
        (q(1, 1), DiscreteDist::new([(q(0, 1), q(1, 3)), (q(8, 1), q(2, 3))])?),
        (q(0, 1), DiscreteDist::point_mass(q(4, 1))),
    ])?;
    let model = CombModel::new(3, Family::Graphic { edges: vec![(0, 1), (1, 2), (0, 2)] }, Terminal::Zero)?;
    let budget = Budget::default();

    let show = |label: &str, x: &Rational| println!("{label:<28} {x} ({:.6})", x.to_f64_lossy());
    let z_oi = expected_surrogate_cost(&model, &instance, SurrogateKind::Oi, budget)?;
    let z_lh = expected_surrogate_cost(&model, &instance, SurrogateKind::Lh, budget)?;
    let z_noi = expected_surrogate_cost(&model, &instance, SurrogateKind::Noi, budget)?;
    show("frugal policy", &evaluate_comb_policy_exact(&model, &instance, Policy::Weitzman, budget)?);
    show("E[Z^OI]", &z_oi);
    show("local hedging", &evaluate_comb_policy_exact(&model, &instance, Policy::LocalHedging, budget)?);
    show("E[Z^LH]", &z_lh);
    show("lower bound E[Z^NOI]", &z_noi);
    show("optimum (brute force)", &opt_value_comb_noi(&model, &instance, budget)?);
    show("guaranteed ratio", &instance.max_alpha());
    Ok(())
}
