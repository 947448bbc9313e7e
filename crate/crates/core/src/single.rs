//! Single-item selection: the one-item subproblem, Weitzman's rule under
//! obligatory inspection, and the local-hedging committing policy.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dist::min_of_independent;
use crate::enumerate::{expect_over_outcomes, Budget, CoinMode};
use crate::error::{Error, Result};
use crate::indices::{Item, SurrogateKind};
use crate::instance::{HedgeCoins, Instance, Realization};
use crate::mc::{estimate, sample_coins, sample_realization, Estimate, TrialRng};
use crate::real::{min_of, Extended, Real};

/// One execution of a policy.
///
/// `total_cost` is the realized cash flow: inspection costs paid plus the
/// realized prices of the selected items (plus the terminal cost in
/// combinatorial runs).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolicyTrace<T> {
    pub inspection_order: Vec<usize>,
    pub selected: BTreeSet<usize>,
    pub selected_without_inspection: BTreeSet<usize>,
    /// Hedge labels used, when the policy is a committing policy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<bool>>,
    pub total_cost: T,
}

impl<T: Real> PolicyTrace<T> {
    /// Recomputes the cost from the trace's own records.
    pub fn recomputed_cost(&self, instance: &Instance<T>, realization: &Realization<T>) -> T {
        let inspect: T = crate::real::sum(
            self.inspection_order
                .iter()
                .map(|&n| instance.item(n).cost().clone()),
        );
        let select: T = crate::real::sum(self.selected.iter().map(|&n| realization.price(n).clone()));
        inspect + select
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OneItemAction {
    TakeOutside,
    Inspect,
    SelectUninspected,
}

/// Optimal first action against a deterministic outside option `r`.
pub fn one_item_optimal_action<T: Real>(item: &Item<T>, r: &Extended<T>) -> OneItemAction {
    let ix = item.indices();
    if ix.never_inspect {
        return OneItemAction::SelectUninspected;
    }
    if r.le_finite(&ix.u_rsv) {
        OneItemAction::TakeOutside
    } else if r.ge_finite(&ix.u_bkp) {
        OneItemAction::SelectUninspected
    } else {
        OneItemAction::Inspect
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// Obligatory inspection.
    Oi,
    /// Nonobligatory inspection.
    Noi,
}

/// Optimal expected cost of the one-item subproblem:
/// `min{c + E[min{V, r}], r}` (OI) or `min{c + E[min{V, r}], r, μ}` (NOI).
pub fn one_item_value<T: Real>(item: &Item<T>, r: &Extended<T>, regime: Regime) -> T {
    let inspect = item.cost().clone()
        + match r {
            Extended::Finite(r) => item.dist().min_with_constant_expectation(r),
            Extended::Infinity => item.indices().mu.clone(),
        };
    let best = r.clone().min_finite(inspect);
    match regime {
        Regime::Oi => best,
        Regime::Noi => min_of(best, item.indices().mu.clone()),
    }
}

/// Weitzman's rule: inspect in ascending reservation price (ties by id),
/// stop once the best observed price is at most the smallest remaining
/// reservation price, select the cheapest observed item (ties by id).
pub fn weitzman_policy<T: Real>(instance: &Instance<T>, realization: &Realization<T>) -> PolicyTrace<T> {
    let mut order: Vec<usize> = (0..instance.len()).collect();
    order.sort_by(|&a, &b| {
        let ua = &instance.item(a).indices().u_rsv;
        let ub = &instance.item(b).indices().u_rsv;
        ua.partial_cmp(ub).expect("finite").then(a.cmp(&b))
    });
    let mut cost = T::zero();
    let mut inspected = Vec::new();
    let mut best: Option<(T, usize)> = None;
    for n in order {
        if let Some((v, _)) = &best {
            if *v <= instance.item(n).indices().u_rsv {
                break;
            }
        }
        cost = cost + instance.item(n).cost().clone();
        inspected.push(n);
        let v = realization.price(n).clone();
        let better = match &best {
            None => true,
            Some((bv, bid)) => v < *bv || (v == *bv && n < *bid),
        };
        if better {
            best = Some((v, n));
        }
    }
    let (v, chosen) = best.expect("at least one item is inspected");
    PolicyTrace {
        inspection_order: inspected,
        selected: BTreeSet::from([chosen]),
        selected_without_inspection: BTreeSet::new(),
        labels: None,
        total_cost: cost + v,
    }
}

/// Runs a committing policy with the given labels: non-inspection items
/// become free point masses at their mean and Weitzman's rule runs on the
/// result. The trace charges the realized price of whatever is selected.
pub fn committed_policy<T: Real>(
    instance: &Instance<T>,
    realization: &Realization<T>,
    coins: &HedgeCoins,
) -> PolicyTrace<T> {
    let committed = instance.committed(coins);
    let apparent = Realization::new(
        realization
            .prices
            .iter()
            .zip(&coins.labels)
            .zip(instance.items())
            .map(|((v, &inspect), item)| if inspect { v.clone() } else { item.indices().mu.clone() })
            .collect(),
    );
    let inner = weitzman_policy(&committed, &apparent);
    let inspection_order: Vec<usize> = inner
        .inspection_order
        .iter()
        .copied()
        .filter(|&n| coins.labels[n])
        .collect();
    let selected_without_inspection: BTreeSet<usize> = inner
        .selected
        .iter()
        .copied()
        .filter(|&n| !coins.labels[n])
        .collect();
    let mut trace = PolicyTrace {
        inspection_order,
        selected: inner.selected,
        selected_without_inspection,
        labels: Some(coins.labels.clone()),
        total_cost: T::zero(),
    };
    trace.total_cost = trace.recomputed_cost(instance, realization);
    trace
}

/// Local hedging with externally drawn labels.
pub fn local_hedging_policy<T: Real>(
    instance: &Instance<T>,
    realization: &Realization<T>,
    coins: &HedgeCoins,
) -> PolicyTrace<T> {
    committed_policy(instance, realization, coins)
}

/// Best deterministic committing policy among "inspect everything" and
/// "take item `j` blind, inspect the rest"; ties go to the earlier option.
pub fn best_committing_labels<T: Real>(instance: &Instance<T>) -> (HedgeCoins, T) {
    let n = instance.len();
    let oi: Vec<_> = instance
        .items()
        .iter()
        .map(|it| it.surrogate_dist(SurrogateKind::Oi))
        .collect();
    let value = |blind: Option<usize>| -> T {
        let dists: Vec<_> = (0..n)
            .map(|k| {
                if Some(k) == blind {
                    crate::dist::DiscreteDist::point_mass(instance.item(k).indices().mu.clone())
                } else {
                    oi[k].clone()
                }
            })
            .collect();
        min_of_independent(&dists).expect("nonempty").mean()
    };
    let mut best = (HedgeCoins::all(n, true), value(None));
    for j in 0..n {
        let v = value(Some(j));
        if v < best.1 {
            let mut labels = vec![true; n];
            labels[j] = false;
            best = (HedgeCoins::new(labels), v);
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Policy {
    /// Weitzman's rule (obligatory inspection); the frugal matroid greedy
    /// in combinatorial models.
    #[serde(rename = "weitzman")]
    Weitzman,
    #[serde(rename = "local-hedging")]
    LocalHedging,
    /// Best of the `N + 1` deterministic committing policies.
    #[serde(rename = "commit-enum")]
    CommitEnum,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Weitzman, Policy::LocalHedging, Policy::CommitEnum];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Weitzman => "weitzman",
            Policy::LocalHedging => "local-hedging",
            Policy::CommitEnum => "commit-enum",
        }
    }

    /// Label distribution this policy uses on `instance`.
    pub fn coin_mode<T: Real>(self, instance: &Instance<T>) -> CoinMode<T> {
        match self {
            Policy::Weitzman => CoinMode::AllInspect,
            Policy::LocalHedging => CoinMode::Hedged,
            Policy::CommitEnum => CoinMode::Fixed(best_committing_labels(instance).0),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weitzman" | "frugal" => Ok(Policy::Weitzman),
            "local-hedging" | "lh" => Ok(Policy::LocalHedging),
            "commit-enum" => Ok(Policy::CommitEnum),
            other => Err(Error::UnknownPolicy(other.to_string())),
        }
    }
}

/// Executes `policy` on one realization with the given labels (ignored by
/// Weitzman's rule).
pub fn run_policy<T: Real>(
    instance: &Instance<T>,
    policy: Policy,
    realization: &Realization<T>,
    coins: &HedgeCoins,
) -> PolicyTrace<T> {
    match policy {
        Policy::Weitzman => weitzman_policy(instance, realization),
        Policy::LocalHedging | Policy::CommitEnum => committed_policy(instance, realization, coins),
    }
}

/// Exact expected cost by enumerating every price realization and label
/// vector.
pub fn evaluate_policy_exact<T: Real>(instance: &Instance<T>, policy: Policy, budget: Budget) -> Result<T> {
    evaluate_with_coins_exact(instance, policy, &policy.coin_mode(instance), budget)
}

/// Exact expected cost under an explicit label distribution.
pub fn evaluate_with_coins_exact<T: Real>(
    instance: &Instance<T>,
    policy: Policy,
    coins: &CoinMode<T>,
    budget: Budget,
) -> Result<T> {
    expect_over_outcomes(instance, coins, budget, |realization, labels| {
        run_policy(instance, policy, realization, labels).total_cost
    })
}

/// Monte Carlo estimate; trial `t` draws its prices and labels from
/// `(seed, t, item)` alone.
pub fn evaluate_policy_mc<T: Real>(instance: &Instance<T>, policy: Policy, trials: u64, seed: u64) -> Estimate {
    let probs = policy.coin_mode(instance).inspect_probabilities(instance);
    estimate(trials, |t| {
        let mut rng = TrialRng::new(seed, t);
        let realization = sample_realization(instance, &mut rng);
        let coins = sample_coins(&probs, &mut rng);
        run_policy(instance, policy, &realization, &coins)
            .total_cost
            .to_f64_lossy()
    })
}

/// Draws the realization and labels of trial `t`.
pub fn sample_trial<T: Real>(
    instance: &Instance<T>,
    policy: Policy,
    seed: u64,
    trial: u64,
) -> (Realization<T>, HedgeCoins) {
    let probs = policy.coin_mode(instance).inspect_probabilities(instance);
    let mut rng = TrialRng::new(seed, trial);
    let realization = sample_realization(instance, &mut rng);
    let coins = sample_coins(&probs, &mut rng);
    (realization, coins)
}

/// `E[min_n W_n]` for independent surrogates of the given kind.
pub fn expected_min_surrogate<T: Real>(instance: &Instance<T>, kind: SurrogateKind) -> T {
    let dists: Vec<_> = instance.items().iter().map(|it| it.surrogate_dist(kind)).collect();
    min_of_independent(&dists).expect("nonempty instance").mean()
}
