//! Invariant suite run by `pandora verify`.
//!
//! Each check accumulates the number of comparisons, the largest violation
//! (distance between the two sides of an identity, or the excess of an
//! inequality) and the number of comparisons skipped because an exact
//! computation would exceed the enumeration budget.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::comb::{evaluate_comb_policy_exact, expected_surrogate_cost, greedy_rule_for, CombModel};
use crate::enumerate::{Budget, CoinMode};
use crate::error::{Error, Result};
use crate::indices::{Item, SurrogateKind};
use crate::instance::Instance;
use crate::oracle::{opt_value_comb_noi, opt_value_single_noi, opt_value_single_oi};
use crate::real::{max_of, Extended, Real};
use crate::single::{
    best_committing_labels, evaluate_policy_exact, evaluate_with_coins_exact, expected_min_surrogate,
    one_item_value, Policy, Regime,
};

use super::file::Problem;

pub const SURROGATE_MEANS: &str = "surrogate_means";
pub const ONE_ITEM_IDENTITIES: &str = "one_item_identities";
pub const ALPHA_CEILING: &str = "alpha_ceiling";
pub const LOCAL_APPROXIMATION: &str = "local_approximation";
pub const WEITZMAN_EXACT: &str = "weitzman_equals_oi_surrogate";
pub const OI_OPTIMUM: &str = "oi_optimum_equals_oi_surrogate";
pub const LH_EXACT: &str = "lh_equals_lh_surrogate";
pub const LH_RATIO: &str = "lh_within_alpha_of_noi_bound";
pub const LH_FOUR_THIRDS: &str = "lh_within_four_thirds_of_noi_bound";
pub const NOI_SANDWICH: &str = "noi_bound_below_optimum_below_lh";
pub const COMMIT_ENUM: &str = "commit_enum_value";
pub const FRUGAL_EXACT: &str = "frugal_equals_oi_surrogate_cost";
pub const COMB_LH_EXACT: &str = "comb_lh_equals_lh_surrogate_cost";
pub const COMB_LH_RATIO: &str = "comb_lh_within_alpha_of_noi_bound";
pub const COMB_NOI_SANDWICH: &str = "comb_noi_bound_below_optimum";

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub passed: bool,
    pub checked: u64,
    pub skipped: u64,
    pub failures: u64,
    pub max_violation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

/// Accumulated results of many checks.
#[derive(Clone, Debug, Default)]
pub struct Suite {
    checks: BTreeMap<String, CheckSummary>,
}

impl Suite {
    pub fn new() -> Self {
        Suite::default()
    }

    fn entry(&mut self, name: &str) -> &mut CheckSummary {
        self.checks.entry(name.to_string()).or_insert_with(|| CheckSummary {
            name: name.to_string(),
            passed: true,
            ..Default::default()
        })
    }

    /// Records a comparison whose violation is `violation >= 0`.
    pub fn record<T: Real>(&mut self, name: &str, violation: T, context: impl FnOnce() -> String) {
        let v = max_of(violation, T::zero());
        let failed = v > T::tolerance();
        let e = self.entry(name);
        e.checked += 1;
        e.max_violation = e.max_violation.max(v.to_f64_lossy());
        if failed {
            e.failures += 1;
            e.passed = false;
            if e.first_failure.is_none() {
                e.first_failure = Some(context());
            }
        }
    }

    /// `a == b`.
    pub fn identity<T: Real>(&mut self, name: &str, a: &T, b: &T, context: impl FnOnce() -> String) {
        self.record(name, (a.clone() - b.clone()).abs(), context);
    }

    /// `a <= b`.
    pub fn at_most<T: Real>(&mut self, name: &str, a: &T, b: &T, context: impl FnOnce() -> String) {
        self.record(name, a.clone() - b.clone(), context);
    }

    pub fn skip(&mut self, name: &str) {
        self.entry(name).skipped += 1;
    }

    pub fn merge(&mut self, other: Suite) {
        for (name, c) in other.checks {
            let e = self.entry(&name);
            e.checked += c.checked;
            e.skipped += c.skipped;
            e.failures += c.failures;
            e.max_violation = e.max_violation.max(c.max_violation);
            e.passed &= c.passed;
            if e.first_failure.is_none() {
                e.first_failure = c.first_failure;
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.values().all(|c| c.passed)
    }

    pub fn summaries(&self) -> Vec<CheckSummary> {
        self.checks.values().cloned().collect()
    }

    pub fn get(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.get(name)
    }
}

/// Runs `f`, recording a skip on budget exhaustion.
fn budgeted<T>(suite: &mut Suite, names: &[&str], f: impl FnOnce() -> Result<T>) -> Option<T> {
    match f() {
        Ok(v) => Some(v),
        Err(Error::BudgetExceeded { .. }) => {
            for n in names {
                suite.skip(n);
            }
            None
        }
        Err(e) => panic!("verification computation failed: {e}"),
    }
}

/// Hedging probability and local ratio in force for an item: claimed values
/// when the file supplies them, computed ones otherwise.
fn effective_indices<T: Real>(problem: &Problem<T>, item: &Item<T>) -> (T, T) {
    let ix = item.indices();
    let claimed = problem.claimed.get(item.id()).and_then(|c| c.as_ref());
    let p = claimed.and_then(|c| c.p_hedge.clone()).unwrap_or_else(|| ix.p_hedge.clone());
    let a = claimed
        .and_then(|c| c.alpha_local.clone())
        .unwrap_or_else(|| ix.alpha_local.clone());
    (p, a)
}

fn has_claims<T>(problem: &Problem<T>) -> bool {
    problem.claimed.iter().any(Option::is_some)
}

/// Every breakpoint of the one-item value functions of `item`.
fn item_breakpoints<T: Real>(item: &Item<T>) -> Vec<T> {
    let ix = item.indices();
    let mut rs = item.dist().breakpoint_sweep();
    rs.extend([ix.u_rsv.clone(), ix.u_bkp.clone(), ix.mu.clone()]);
    rs
}

/// Surrogate mean identities and the one-item value identities.
pub fn check_item<T: Real>(suite: &mut Suite, item: &Item<T>) {
    let ix = item.indices();
    let id = item.id();
    let c = item.cost().clone();
    suite.identity(
        SURROGATE_MEANS,
        &item.surrogate_dist(SurrogateKind::Oi).mean(),
        &(ix.mu.clone() + c.clone()),
        || format!("item {id}: E[W^OI] != mu + c"),
    );
    suite.identity(
        SURROGATE_MEANS,
        &item.surrogate_dist(SurrogateKind::Noi).mean(),
        &ix.mu,
        || format!("item {id}: E[W^NOI] != mu"),
    );
    suite.identity(
        SURROGATE_MEANS,
        &item.surrogate_dist(SurrogateKind::Lh).mean(),
        &(ix.mu.clone() + ix.p_hedge.clone() * c),
        || format!("item {id}: E[W^LH] != mu + p c"),
    );
    for r in item_breakpoints(item) {
        let ext = Extended::Finite(r.clone());
        for (kind, regime) in [(SurrogateKind::Oi, Regime::Oi), (SurrogateKind::Noi, Regime::Noi)] {
            suite.identity(
                ONE_ITEM_IDENTITIES,
                &item.capped_expectation(kind, &r),
                &one_item_value(item, &ext, regime),
                || format!("item {id}: E[min(W^{}, {r})] differs from the one-item value", kind.name()),
            );
        }
    }
}

/// `E[min{W^LH(p), r}] <= E[min{α W^NOI, r}]` at every breakpoint, and
/// `α <= 4/3`.
pub fn check_local_approximation<T: Real>(suite: &mut Suite, item: &Item<T>, p: &T, alpha: &T) {
    let id = item.id();
    let four_thirds = T::from_ratio(4, 3);
    suite.at_most(ALPHA_CEILING, alpha, &four_thirds, || {
        format!("item {id}: alpha = {alpha} exceeds 4/3")
    });
    if *p < T::zero() || *p > T::one() {
        suite.record(LOCAL_APPROXIMATION, T::one(), || format!("item {id}: p = {p} outside [0, 1]"));
        return;
    }
    let lh = item.lh_surrogate_dist(p);
    let noi = item.surrogate_dist(SurrogateKind::Noi).scaled(alpha);
    let mut rs = lh.breakpoint_sweep();
    rs.extend(noi.breakpoint_sweep());
    for r in rs {
        suite.at_most(
            LOCAL_APPROXIMATION,
            &lh.min_with_constant_expectation(&r),
            &noi.min_with_constant_expectation(&r),
            || format!("item {id}: local approximation fails at r = {r} with p = {p}, alpha = {alpha}"),
        );
    }
}

fn check_single<T: Real>(suite: &mut Suite, problem: &Problem<T>, budget: Budget, label: &str) {
    let inst = &problem.instance;
    let oi_bound = expected_min_surrogate(inst, SurrogateKind::Oi);
    let noi_bound = expected_min_surrogate(inst, SurrogateKind::Noi);
    let (probs, alphas): (Vec<T>, Vec<T>) = inst.items().iter().map(|it| effective_indices(problem, it)).unzip();
    let max_alpha = alphas.iter().cloned().reduce(max_of).expect("nonempty");
    let lh_surrogate = if has_claims(problem) {
        let dists: Vec<_> = inst.items().iter().zip(&probs).map(|(it, p)| it.lh_surrogate_dist(p)).collect();
        crate::dist::min_of_independent(&dists).expect("nonempty").mean()
    } else {
        expected_min_surrogate(inst, SurrogateKind::Lh)
    };

    if let Some(w) = budgeted(suite, &[WEITZMAN_EXACT], || evaluate_policy_exact(inst, Policy::Weitzman, budget)) {
        suite.identity(WEITZMAN_EXACT, &w, &oi_bound, || format!("{label}: Weitzman {w} != E[min W^OI] {oi_bound}"));
    }
    if let Some(o) = budgeted(suite, &[OI_OPTIMUM], || opt_value_single_oi(inst, budget)) {
        suite.identity(OI_OPTIMUM, &o, &oi_bound, || format!("{label}: OI optimum {o} != E[min W^OI] {oi_bound}"));
    }
    let coins = CoinMode::HedgedWith(probs.clone());
    let lh = budgeted(suite, &[LH_EXACT, LH_RATIO, LH_FOUR_THIRDS], || {
        evaluate_with_coins_exact(inst, Policy::LocalHedging, &coins, budget)
    });
    if let Some(lh) = &lh {
        suite.identity(LH_EXACT, lh, &lh_surrogate, || {
            format!("{label}: LH {lh} != E[min W^LH] {lh_surrogate}")
        });
        let ceiling = max_alpha.clone() * noi_bound.clone();
        suite.at_most(LH_RATIO, lh, &ceiling, || {
            format!("{label}: LH {lh} exceeds max alpha {max_alpha} times NOI bound {noi_bound}")
        });
        let four_thirds = T::from_ratio(4, 3) * noi_bound.clone();
        suite.at_most(LH_FOUR_THIRDS, lh, &four_thirds, || {
            format!("{label}: LH {lh} exceeds 4/3 of NOI bound {noi_bound}")
        });
    }
    if let Some(opt) = budgeted(suite, &[NOI_SANDWICH, COMMIT_ENUM], || opt_value_single_noi(inst, budget)) {
        suite.at_most(NOI_SANDWICH, &noi_bound, &opt, || {
            format!("{label}: NOI bound {noi_bound} exceeds NOI optimum {opt}")
        });
        if let Some(lh) = &lh {
            suite.at_most(NOI_SANDWICH, &opt, lh, || format!("{label}: NOI optimum {opt} exceeds LH {lh}"));
        }
        let (_, claimed) = best_committing_labels(inst);
        if let Some(ce) = budgeted(suite, &[COMMIT_ENUM], || evaluate_policy_exact(inst, Policy::CommitEnum, budget)) {
            suite.identity(COMMIT_ENUM, &ce, &claimed, || {
                format!("{label}: commit-enum cost {ce} != its surrogate value {claimed}")
            });
            suite.at_most(COMMIT_ENUM, &opt, &ce, || format!("{label}: NOI optimum {opt} exceeds commit-enum {ce}"));
        }
    }
}

fn check_comb<T: Real>(suite: &mut Suite, problem: &Problem<T>, model: &CombModel<T>, budget: Budget, label: &str) {
    let inst = &problem.instance;
    let Some(z_noi) = budgeted(suite, &[COMB_LH_RATIO, COMB_NOI_SANDWICH], || {
        expected_surrogate_cost(model, inst, SurrogateKind::Noi, budget)
    }) else {
        return;
    };
    if let Some(opt) = budgeted(suite, &[COMB_NOI_SANDWICH], || opt_value_comb_noi(model, inst, budget)) {
        suite.at_most(COMB_NOI_SANDWICH, &z_noi, &opt, || {
            format!("{label}: E[Z^NOI] {z_noi} exceeds the NOI optimum {opt}")
        });
    }
    if greedy_rule_for(model).is_err() {
        return;
    }
    if let (Some(frugal), Some(z_oi)) = (
        budgeted(suite, &[FRUGAL_EXACT], || evaluate_comb_policy_exact(model, inst, Policy::Weitzman, budget)),
        budgeted(suite, &[FRUGAL_EXACT], || expected_surrogate_cost(model, inst, SurrogateKind::Oi, budget)),
    ) {
        suite.identity(FRUGAL_EXACT, &frugal, &z_oi, || {
            format!("{label}: frugal cost {frugal} != E[Z^OI] {z_oi}")
        });
    }
    if let (Some(lh), Some(z_lh)) = (
        budgeted(suite, &[COMB_LH_EXACT, COMB_LH_RATIO], || {
            evaluate_comb_policy_exact(model, inst, Policy::LocalHedging, budget)
        }),
        budgeted(suite, &[COMB_LH_EXACT], || expected_surrogate_cost(model, inst, SurrogateKind::Lh, budget)),
    ) {
        suite.identity(COMB_LH_EXACT, &lh, &z_lh, || format!("{label}: hedged cost {lh} != E[Z^LH] {z_lh}"));
        let max_alpha = inst.max_alpha();
        let ceiling = max_alpha.clone() * z_noi.clone();
        suite.at_most(COMB_LH_RATIO, &lh, &ceiling, || {
            format!("{label}: hedged cost {lh} exceeds max alpha {max_alpha} times E[Z^NOI] {z_noi}")
        });
    }
}

/// Runs the whole suite on one problem.
pub fn verify_problem<T: Real>(problem: &Problem<T>, budget: Budget, label: &str) -> Suite {
    let mut suite = Suite::new();
    for item in problem.instance.items() {
        check_item(&mut suite, item);
        let (p, a) = effective_indices(problem, item);
        check_local_approximation(&mut suite, item, &p, &a);
    }
    match &problem.model {
        None => check_single(&mut suite, problem, budget, label),
        Some(model) => check_comb(&mut suite, problem, model, budget, label),
    }
    suite
}

/// Verification of a list of instances.
pub fn verify_instances<T: Real>(instances: &[Instance<T>], budget: Budget) -> Suite {
    let mut suite = Suite::new();
    for (i, inst) in instances.iter().enumerate() {
        let problem = Problem {
            instance: inst.clone(),
            model: None,
            claimed: vec![None; inst.len()],
            metadata: serde_json::Value::Null,
        };
        suite.merge(verify_problem(&problem, budget, &format!("instance {i}")));
    }
    suite
}
