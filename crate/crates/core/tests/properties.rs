mod common;

use std::collections::BTreeSet;

use common::{dist_strategy, instance_strategy, item_strategy, q, reference_opt};
use pandora::comb::{
    evaluate_comb_policy_exact, expected_surrogate_cost, ids_of, surrogate_cost, CombModel, ExplicitFamily,
    Family, Terminal,
};
use pandora::dist::{min_of_independent, parity_gap, DiscreteDist};
use pandora::enumerate::{Budget, CoinMode};
use pandora::harness::file::InstanceFile;
use pandora::harness::random::{case_rng, random_matroid_model};
use pandora::indices::SurrogateKind;
use pandora::oracle::{opt_value_comb_noi, opt_value_single, pi_surrogate_bound, pi_surrogate_bound_exact};
use pandora::real::{max_of, min_of, Extended, Rational};
use pandora::single::{
    evaluate_policy_exact, evaluate_policy_mc, expected_min_surrogate, one_item_value, Policy, Regime,
};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn put_call_parity(d in dist_strategy::<Rational>(4), u in -4i64..=44) {
        prop_assert_eq!(parity_gap(&d, &q(u, 4)), q(0, 1));
    }

    #[test]
    fn shortfall_and_excess_are_monotone(d in dist_strategy::<Rational>(4), a in 0i64..=40, b in 0i64..=40) {
        let (lo, hi) = (q(a.min(b), 4), q(a.max(b), 4));
        prop_assert!(d.expected_shortfall(&lo) <= d.expected_shortfall(&hi));
        prop_assert!(d.expected_excess(&lo) >= d.expected_excess(&hi));
    }

    #[test]
    fn reservation_and_backup_prices_solve_their_equations(item in item_strategy::<Rational>(4)) {
        let ix = item.indices();
        let c = item.cost().clone();
        if c > q(0, 1) {
            prop_assert_eq!(item.dist().expected_shortfall(&ix.u_rsv), c.clone());
            prop_assert_eq!(item.dist().expected_excess(&ix.u_bkp), c);
        }
        prop_assert_eq!(ix.u_rsv < ix.u_bkp, ix.u_rsv < ix.mu);
        prop_assert!(ix.u_rsv >= *item.dist().min_value());
    }

    #[test]
    fn min_of_independent_matches_brute_force(
        ds in prop::collection::vec(dist_strategy::<Rational>(3), 1..=4)
    ) {
        let fast = min_of_independent(&ds).unwrap();
        let radices: Vec<usize> = ds.iter().map(|d| d.len()).collect();
        let mut pairs = Vec::new();
        let total: usize = radices.iter().product();
        for mut index in 0..total {
            let mut prob = q(1, 1);
            let mut min: Option<Rational> = None;
            for (d, &r) in ds.iter().zip(&radices) {
                let a = &d.atoms()[index % r];
                index /= r;
                prob *= a.prob.clone();
                min = Some(match min { None => a.value.clone(), Some(m) => min_of(m, a.value.clone()) });
            }
            pairs.push((min.unwrap(), prob));
        }
        prop_assert_eq!(fast, DiscreteDist::new(pairs).unwrap());
    }

    #[test]
    fn one_item_identities_hold_exactly(item in item_strategy::<Rational>(4)) {
        let ix = item.indices();
        let mut rs = item.dist().breakpoint_sweep();
        rs.extend([ix.u_rsv.clone(), ix.u_bkp.clone(), ix.mu.clone(), q(-1, 1)]);
        for r in rs {
            let ext = Extended::Finite(r.clone());
            prop_assert_eq!(item.capped_expectation(SurrogateKind::Oi, &r), one_item_value(&item, &ext, Regime::Oi));
            prop_assert_eq!(item.capped_expectation(SurrogateKind::Noi, &r), one_item_value(&item, &ext, Regime::Noi));
        }
        prop_assert_eq!(one_item_value(&item, &Extended::Infinity, Regime::Oi), ix.mu.clone() + item.cost().clone());
    }

    #[test]
    fn surrogate_means(item in item_strategy::<Rational>(4)) {
        let ix = item.indices();
        let c = item.cost().clone();
        prop_assert_eq!(item.surrogate_dist(SurrogateKind::Oi).mean(), ix.mu.clone() + c.clone());
        prop_assert_eq!(item.surrogate_dist(SurrogateKind::Noi).mean(), ix.mu.clone());
        prop_assert_eq!(item.surrogate_dist(SurrogateKind::Lh).mean(), ix.mu.clone() + ix.p_hedge.clone() * c);
        prop_assert!(item.surrogate_dist(SurrogateKind::Noi).min_value() >= &q(0, 1));
    }

    #[test]
    fn hedged_surrogate_is_a_local_approximation(item in item_strategy::<Rational>(4)) {
        let ix = item.indices();
        prop_assert!(ix.alpha_local <= q(4, 3));
        prop_assert!(ix.alpha_local >= q(1, 1));
        let lh = item.surrogate_dist(SurrogateKind::Lh);
        let noi = item.surrogate_dist(SurrogateKind::Noi).scaled(&ix.alpha_local);
        let mut rs = lh.breakpoint_sweep();
        rs.extend(noi.breakpoint_sweep());
        for r in rs {
            prop_assert!(lh.min_with_constant_expectation(&r) <= noi.min_with_constant_expectation(&r));
        }
    }

    #[test]
    fn hedging_probability_minimises_alpha(item in item_strategy::<Rational>(4)) {
        let ix = item.indices();
        prop_assume!(!ix.never_inspect && ix.u_rsv > q(0, 1));
        let best = item.alpha_of_p(&ix.p_hedge).unwrap();
        prop_assert_eq!(best.clone(), ix.alpha_local.clone());
        for k in 0..=100 {
            prop_assert!(best <= item.alpha_of_p(&q(k, 100)).unwrap());
        }
    }

    #[test]
    fn compressed_dp_matches_full_observation_dp(inst in instance_strategy::<Rational>(3, 3)) {
        for regime in [Regime::Oi, Regime::Noi] {
            prop_assert_eq!(
                opt_value_single(&inst, regime, Budget::default()).unwrap(),
                reference_opt(&inst, regime)
            );
        }
    }

    #[test]
    fn comb_dp_reduces_to_single_dp(inst in instance_strategy::<Rational>(3, 3)) {
        let m = CombModel::single_item(inst.len());
        prop_assert_eq!(
            opt_value_comb_noi(&m, &inst, Budget::default()).unwrap(),
            opt_value_single(&inst, Regime::Noi, Budget::default()).unwrap()
        );
    }

    #[test]
    fn policy_surrogate_bound_sits_between_noi_bound_and_cost(inst in instance_strategy::<Rational>(3, 3)) {
        for policy in Policy::ALL {
            let coins = policy.coin_mode(&inst);
            let w_pi = pi_surrogate_bound_exact(&inst, policy, &coins, Budget::default()).unwrap();
            let cost = evaluate_policy_exact(&inst, policy, Budget::default()).unwrap();
            prop_assert!(expected_min_surrogate(&inst, SurrogateKind::Noi) <= w_pi);
            prop_assert!(w_pi <= cost);
        }
        let w_oi = pi_surrogate_bound_exact(&inst, Policy::Weitzman, &CoinMode::AllInspect, Budget::default()).unwrap();
        prop_assert!(w_oi <= expected_min_surrogate(&inst, SurrogateKind::Oi));
    }

    #[test]
    fn surrogate_cost_is_monotone_in_prices(
        prices in prop::collection::vec(0i64..=20, 4),
        bump in 0usize..4,
        extra in 1i64..=10,
        k in 1usize..=3,
    ) {
        let m = CombModel::<Rational>::new(4, Family::UniformMatroid { k }, Terminal::Zero).unwrap();
        let p: Vec<Rational> = prices.iter().map(|&x| q(x, 2)).collect();
        let mut raised = p.clone();
        raised[bump] += q(extra, 2);
        prop_assert!(surrogate_cost(&m, &p).unwrap().0 <= surrogate_cost(&m, &raised).unwrap().0);
    }

    #[test]
    fn matroid_shortcuts_agree_with_enumeration(seed in any::<u64>(), prices in prop::collection::vec(0i64..=6, 5)) {
        let mut rng = case_rng(seed, 0);
        let n = rng.gen_range(1..=5);
        let m: CombModel<Rational> = random_matroid_model(n, 3, &mut rng);
        let sets: Vec<Vec<usize>> = (1u32..1 << n)
            .filter(|&mask| m.is_feasible(mask))
            .map(|mask| ids_of(mask).into_iter().collect())
            .collect();
        let explicit = CombModel::new(n, Family::Explicit(ExplicitFamily::new(n, &sets).unwrap()), Terminal::Zero).unwrap();
        let p: Vec<Rational> = prices[..n].iter().map(|&x| q(x, 1)).collect();
        let (fast, fast_set) = surrogate_cost(&m, &p).unwrap();
        let (slow, slow_set) = surrogate_cost(&explicit, &p).unwrap();
        prop_assert_eq!(fast, slow);
        prop_assert_eq!(fast_set, slow_set);
    }

    #[test]
    fn frugal_policy_attains_oi_surrogate_cost(seed in any::<u64>(), inst in instance_strategy::<Rational>(4, 3)) {
        let mut rng = case_rng(seed, 1);
        let m: CombModel<Rational> = random_matroid_model(inst.len(), 3, &mut rng);
        prop_assert_eq!(
            evaluate_comb_policy_exact(&m, &inst, Policy::Weitzman, Budget::default()).unwrap(),
            expected_surrogate_cost(&m, &inst, SurrogateKind::Oi, Budget::default()).unwrap()
        );
        prop_assert_eq!(
            evaluate_comb_policy_exact(&m, &inst, Policy::LocalHedging, Budget::default()).unwrap(),
            expected_surrogate_cost(&m, &inst, SurrogateKind::Lh, Budget::default()).unwrap()
        );
    }

    #[test]
    fn canonical_files_round_trip(inst in instance_strategy::<Rational>(4, 4)) {
        let problem = pandora::harness::file::Problem {
            claimed: vec![None; inst.len()],
            instance: inst,
            model: None,
            metadata: serde_json::Value::Null,
        };
        let file = InstanceFile::from_problem(&problem, None);
        let text = file.to_json();
        let back = InstanceFile::from_json(&text).unwrap();
        prop_assert_eq!(&back.canonical().unwrap(), &file);
        let reparsed: pandora::harness::file::Problem<Rational> = back.to_problem().unwrap();
        prop_assert_eq!(reparsed, problem);
    }
}

#[test]
fn monte_carlo_agrees_with_enumeration() {
    let inst = common::worked::<f64>();
    for policy in Policy::ALL {
        let exact = evaluate_policy_exact(&inst, policy, Budget::default()).unwrap();
        let e = evaluate_policy_mc(&inst, policy, 200_000, 3);
        assert!(
            (e.mean - exact).abs() <= 4.0 * e.stderr + 1e-12,
            "{policy}: {} ± {} vs {exact}",
            e.mean,
            e.stderr
        );
    }
}

#[test]
fn full_inspection_surrogate_bound_estimates_oi_bound() {
    let inst = common::worked::<f64>();
    let e = pi_surrogate_bound(&inst, Policy::Weitzman, 100_000, 5);
    let oi = expected_min_surrogate(&inst, SurrogateKind::Oi);
    assert!((e.mean - oi).abs() <= 3.0 * e.stderr + 1e-12, "{e:?} vs {oi}");
}

#[test]
fn hedged_surrogate_bound_lies_in_its_interval() {
    let inst = common::worked::<f64>();
    let e = pi_surrogate_bound(&inst, Policy::LocalHedging, 100_000, 5);
    assert!(e.mean >= 4.5 - 3.0 * e.stderr);
    assert!(e.mean <= 62.5 / 13.0 + 3.0 * e.stderr);
}

#[test]
fn blind_policy_bound_is_exact() {
    let inst = pandora::instance::Instance::from_parts([
        (3.0, DiscreteDist::new([(0.0, 0.5), (2.0, 0.5)]).unwrap()),
        (3.0, DiscreteDist::new([(1.0, 0.5), (3.0, 0.5)]).unwrap()),
    ])
    .unwrap();
    let e = pi_surrogate_bound(&inst, Policy::LocalHedging, 1000, 1);
    assert_eq!((e.mean, e.stderr), (1.0, 0.0));
}

#[test]
fn uniform_rank_n_forces_every_item() {
    let inst = common::worked::<Rational>();
    let m = CombModel::new(2, Family::UniformMatroid { k: 2 }, Terminal::Zero).unwrap();
    for kind in SurrogateKind::ALL {
        let total: Rational = inst.items().iter().map(|it| it.surrogate_dist(kind).mean()).sum();
        assert_eq!(expected_surrogate_cost(&m, &inst, kind, Budget::default()).unwrap(), total);
    }
    let mu_sum: Rational = inst.items().iter().map(|it| it.indices().mu.clone()).sum();
    assert_eq!(opt_value_comb_noi(&m, &inst, Budget::default()).unwrap(), mu_sum);
}

#[test]
fn surrogate_cost_examples() {
    let m = CombModel::<f64>::new(3, Family::UniformMatroid { k: 2 }, Terminal::Zero).unwrap();
    assert_eq!(surrogate_cost(&m, &[3.0, 1.0, 2.0]).unwrap(), (3.0, BTreeSet::from([1, 2])));
    let f = ExplicitFamily::upward_closure(2, &[vec![0], vec![1]]).unwrap();
    let m = CombModel::<f64>::new(2, Family::Explicit(f), Terminal::Zero).unwrap();
    assert_eq!(surrogate_cost(&m, &[4.0, 6.0]).unwrap(), (4.0, BTreeSet::from([0])));
    let tri = Family::Graphic { edges: vec![(0, 1), (1, 2), (0, 2)] };
    let m = CombModel::<f64>::new(3, tri, Terminal::Zero).unwrap();
    assert_eq!(surrogate_cost(&m, &[1.0, 2.0, 3.0]).unwrap(), (3.0, BTreeSet::from([0, 1])));
}

#[test]
fn alpha_is_bounded_by_its_branches() {
    let item = pandora::indices::make_worst_case_item(1.0, 2.0, 0.9).unwrap();
    let ix = item.indices();
    let blind = 1.0 + (ix.mu - ix.u_rsv) / ix.u_rsv;
    let inspect = 1.0 + item.cost() / ix.mu;
    assert!(ix.alpha_local <= max_of(blind, inspect));
}
