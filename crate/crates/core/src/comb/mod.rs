//! Combinatorial selection: feasible families, surrogate costs, frugal
//! greedy policies for matroids, and their hedged counterparts.

mod model;

use std::collections::BTreeSet;

pub use model::{
    ids_of, mask_of, CombModel, ExplicitFamily, Family, Mask, Matroid, Terminal, MAX_EXPLICIT_ITEMS,
};

use petgraph::unionfind::UnionFind;

use crate::enumerate::{expect_over_outcomes, sum_over_product, Budget, CoinMode};
use crate::error::{Error, Result};
use crate::indices::SurrogateKind;
use crate::instance::{HedgeCoins, Instance, Realization};
use crate::mc::{estimate, sample_coins, sample_realization, Estimate, TrialRng};
use crate::real::{max_of, sum, Real};
use crate::single::{Policy, PolicyTrace};

/// Largest item count for which surrogate costs are found by enumerating
/// every subset.
pub const MAX_ENUMERATED_ITEMS: usize = 20;

fn by_price_then_id<T: Real>(prices: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..prices.len()).collect();
    order.sort_by(|&a, &b| prices[a].partial_cmp(&prices[b]).expect("finite").then(a.cmp(&b)));
    order
}

/// Tie order between equal-cost sets: fewer items first, then the
/// lexicographically smaller sorted id list. Zero prices make supersets of a
/// basis tie with it; preferring the smaller set keeps the matroid shortcuts
/// and enumeration in agreement.
fn precedes(a: Mask, b: Mask) -> bool {
    let (a, b): (Vec<_>, Vec<_>) = (ids_of(a).into_iter().collect(), ids_of(b).into_iter().collect());
    (a.len(), a) < (b.len(), b)
}

/// `min_{S ∈ F} Σ_{s ∈ S} prices[s] + h(S)` and the minimising set; ties go
/// to the smallest set, then the lexicographically smallest sorted id list.
pub fn surrogate_cost<T: Real>(model: &CombModel<T>, prices: &[T]) -> Result<(T, BTreeSet<usize>)> {
    if prices.len() != model.n() {
        return Err(Error::InvalidModel(format!(
            "{} prices for a model over {} items",
            prices.len(),
            model.n()
        )));
    }
    if model.has_zero_terminal() {
        match model.family() {
            Family::UniformMatroid { k } => {
                let chosen: BTreeSet<usize> = by_price_then_id(prices).into_iter().take(*k).collect();
                let value = sum(chosen.iter().map(|&i| prices[i].clone()));
                return Ok((value, chosen));
            }
            Family::Graphic { edges } => {
                let vertices = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
                let mut uf = UnionFind::<usize>::new(vertices);
                let chosen: BTreeSet<usize> = by_price_then_id(prices)
                    .into_iter()
                    .filter(|&e| uf.union(edges[e].0, edges[e].1))
                    .collect();
                let value = sum(chosen.iter().map(|&i| prices[i].clone()));
                return Ok((value, chosen));
            }
            Family::Explicit(_) => {}
        }
    }
    if model.n() > MAX_ENUMERATED_ITEMS {
        return Err(Error::InvalidModel(format!(
            "subset enumeration supports at most {MAX_ENUMERATED_ITEMS} items"
        )));
    }
    let mut best: Option<(T, Mask)> = None;
    for mask in 1..(1 as Mask) << model.n() {
        if !model.is_feasible(mask) {
            continue;
        }
        let value = sum(ids_of(mask).into_iter().map(|i| prices[i].clone())) + model.terminal_cost(mask);
        let better = match &best {
            None => true,
            Some((bv, bm)) => value < *bv || (value == *bv && precedes(mask, *bm)),
        };
        if better {
            best = Some((value, mask));
        }
    }
    let (value, mask) = best.ok_or(Error::Infeasible)?;
    Ok((value, ids_of(mask)))
}

fn check_model<T: Real>(model: &CombModel<T>, instance: &Instance<T>) -> Result<()> {
    if model.n() != instance.len() {
        return Err(Error::InvalidModel(format!(
            "model has {} items, instance has {}",
            model.n(),
            instance.len()
        )));
    }
    Ok(())
}

/// `E[Z^kind]` by enumerating the joint support of the surrogates.
pub fn expected_surrogate_cost<T: Real>(
    model: &CombModel<T>,
    instance: &Instance<T>,
    kind: SurrogateKind,
    budget: Budget,
) -> Result<T> {
    check_model(model, instance)?;
    let dists: Vec<_> = instance.items().iter().map(|it| it.surrogate_dist(kind)).collect();
    let radices: Vec<usize> = dists.iter().map(|d| d.len()).collect();
    // Surface model errors before the parallel sum.
    surrogate_cost(model, &dists.iter().map(|d| d.min_value().clone()).collect::<Vec<_>>())?;
    sum_over_product(&radices, budget, |digits| {
        let mut weight = T::one();
        let mut prices = Vec::with_capacity(digits.len());
        for (d, &k) in dists.iter().zip(digits) {
            let atom = &d.atoms()[k];
            weight = weight * atom.prob.clone();
            prices.push(atom.value.clone());
        }
        weight * surrogate_cost(model, &prices).expect("validated").0
    })
}

/// Monte Carlo estimate of `E[Z^kind]`, sampling each surrogate directly.
pub fn expected_surrogate_cost_mc<T: Real>(
    model: &CombModel<T>,
    instance: &Instance<T>,
    kind: SurrogateKind,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    check_model(model, instance)?;
    let dists: Vec<_> = instance.items().iter().map(|it| it.surrogate_dist(kind)).collect();
    let cdfs: Vec<Vec<f64>> = dists.iter().map(|d| d.cumulative_f64()).collect();
    surrogate_cost(model, &dists.iter().map(|d| d.min_value().clone()).collect::<Vec<_>>())?;
    Ok(estimate(trials, |t| {
        let mut rng = TrialRng::new(seed, t);
        let prices: Vec<T> = dists
            .iter()
            .zip(&cdfs)
            .enumerate()
            .map(|(n, (d, cdf))| {
                let u = rng.uniform(n, 2);
                let k = cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1);
                d.atoms()[k].value.clone()
            })
            .collect();
        surrogate_cost(model, &prices).expect("validated").0.to_f64_lossy()
    }))
}

/// Greedy selection rule driven by tentative prices.
pub trait GreedyRule<T: Real>: Sync {
    /// Next item to act on, or `None` when the selection is complete.
    fn propose(&self, model: &CombModel<T>, prices: &[T], selected: &[bool]) -> Option<usize>;
}

/// Matroid greedy: the cheapest item (ties by id) that keeps the selection
/// independent.
#[derive(Clone, Debug)]
pub struct MatroidGreedy {
    matroid: Matroid,
}

impl MatroidGreedy {
    pub fn new(matroid: Matroid) -> Self {
        MatroidGreedy { matroid }
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }
}

impl<T: Real> GreedyRule<T> for MatroidGreedy {
    fn propose(&self, _model: &CombModel<T>, prices: &[T], selected: &[bool]) -> Option<usize> {
        let current = mask_of((0..selected.len()).filter(|&i| selected[i]));
        by_price_then_id(prices)
            .into_iter()
            .find(|&n| !selected[n] && self.matroid.independent(current | (1 << n)))
    }
}

/// Greedy rule for models whose family is a recognised matroid and whose
/// terminal cost is zero.
pub fn greedy_rule_for<T: Real>(model: &CombModel<T>) -> Result<MatroidGreedy> {
    if !model.has_zero_terminal() {
        return Err(Error::NoGreedyRule(
            "models with a terminal cost have no greedy rule".into(),
        ));
    }
    model
        .matroid()
        .map(MatroidGreedy::new)
        .ok_or_else(|| Error::NoGreedyRule("the feasible family is not a recognised matroid".into()))
}

/// Frugal policy under obligatory inspection: each item's tentative price
/// starts at its reservation price; the rule is re-asked after every
/// action, an uninspected proposal is inspected (tentative price becomes
/// `max(v, u_rsv)`), an inspected proposal is selected.
pub fn frugal_oi_policy<T: Real, R: GreedyRule<T> + ?Sized>(
    model: &CombModel<T>,
    instance: &Instance<T>,
    realization: &Realization<T>,
    rule: &R,
) -> Result<PolicyTrace<T>> {
    check_model(model, instance)?;
    let n = instance.len();
    let mut tau: Vec<T> = instance.items().iter().map(|it| it.indices().u_rsv.clone()).collect();
    let mut inspected = vec![false; n];
    let mut selected = vec![false; n];
    let mut order = Vec::new();
    let mut cost = T::zero();
    for _ in 0..=2 * n {
        let Some(next) = rule.propose(model, &tau, &selected) else {
            let mask = mask_of((0..n).filter(|&i| selected[i]));
            if !model.is_feasible(mask) {
                return Err(Error::RuleViolation(format!(
                    "rule stopped with infeasible selection {:?}",
                    ids_of(mask)
                )));
            }
            return Ok(PolicyTrace {
                inspection_order: order,
                selected: ids_of(mask),
                selected_without_inspection: BTreeSet::new(),
                labels: None,
                total_cost: cost + model.terminal_cost(mask),
            });
        };
        if next >= n || selected[next] {
            return Err(Error::RuleViolation(format!(
                "rule proposed item {next}, which is not selectable"
            )));
        }
        let item = instance.item(next);
        if inspected[next] {
            selected[next] = true;
            cost = cost + realization.price(next).clone();
        } else {
            inspected[next] = true;
            order.push(next);
            cost = cost + item.cost().clone();
            tau[next] = max_of(realization.price(next).clone(), item.indices().u_rsv.clone());
        }
    }
    Err(Error::RuleViolation("rule did not terminate".into()))
}

/// Hedged greedy: items labelled for non-inspection become free point
/// masses at their mean, the frugal policy runs on the result, and the
/// realized prices of the selected items are charged.
pub fn combinatorial_lh_policy<T: Real, R: GreedyRule<T> + ?Sized>(
    model: &CombModel<T>,
    instance: &Instance<T>,
    realization: &Realization<T>,
    coins: &HedgeCoins,
    rule: &R,
) -> Result<PolicyTrace<T>> {
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
    let inner = frugal_oi_policy(model, &committed, &apparent, rule)?;
    let mut trace = PolicyTrace {
        inspection_order: inner
            .inspection_order
            .into_iter()
            .filter(|&n| coins.labels[n])
            .collect(),
        selected_without_inspection: inner
            .selected
            .iter()
            .copied()
            .filter(|&n| !coins.labels[n])
            .collect(),
        selected: inner.selected,
        labels: Some(coins.labels.clone()),
        total_cost: T::zero(),
    };
    trace.total_cost =
        trace.recomputed_cost(instance, realization) + model.terminal_cost(mask_of(trace.selected.iter().copied()));
    Ok(trace)
}

fn comb_coin_mode<T: Real>(policy: Policy) -> Result<CoinMode<T>> {
    match policy {
        Policy::Weitzman => Ok(CoinMode::AllInspect),
        Policy::LocalHedging => Ok(CoinMode::Hedged),
        Policy::CommitEnum => Err(Error::InvalidModel(
            "commit-enum is defined for single-item selection only".into(),
        )),
    }
}

/// Executes a combinatorial policy on one realization.
pub fn run_comb_policy<T: Real>(
    model: &CombModel<T>,
    instance: &Instance<T>,
    policy: Policy,
    rule: &MatroidGreedy,
    realization: &Realization<T>,
    coins: &HedgeCoins,
) -> Result<PolicyTrace<T>> {
    match policy {
        Policy::Weitzman => frugal_oi_policy(model, instance, realization, rule),
        Policy::LocalHedging => combinatorial_lh_policy(model, instance, realization, coins, rule),
        Policy::CommitEnum => Err(comb_coin_mode::<T>(policy).unwrap_err()),
    }
}

/// Exact expected cost of a combinatorial policy.
pub fn evaluate_comb_policy_exact<T: Real>(
    model: &CombModel<T>,
    instance: &Instance<T>,
    policy: Policy,
    budget: Budget,
) -> Result<T> {
    check_model(model, instance)?;
    let coins = comb_coin_mode(policy)?;
    let rule = greedy_rule_for(model)?;
    // Run once up front so rule violations surface as errors.
    let probe = Realization::from_atom_indices(instance, &vec![0; instance.len()]);
    run_comb_policy(model, instance, policy, &rule, &probe, &HedgeCoins::all(instance.len(), true))?;
    expect_over_outcomes(instance, &coins, budget, |realization, labels| {
        run_comb_policy(model, instance, policy, &rule, realization, labels)
            .expect("validated rule")
            .total_cost
    })
}

/// Monte Carlo estimate of a combinatorial policy's expected cost; trials
/// draw prices and labels exactly as single-item simulation does.
pub fn evaluate_comb_policy_mc<T: Real>(
    model: &CombModel<T>,
    instance: &Instance<T>,
    policy: Policy,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    check_model(model, instance)?;
    let probs = comb_coin_mode(policy)?.inspect_probabilities(instance);
    let rule = greedy_rule_for(model)?;
    let probe = Realization::from_atom_indices(instance, &vec![0; instance.len()]);
    run_comb_policy(model, instance, policy, &rule, &probe, &HedgeCoins::all(instance.len(), true))?;
    Ok(estimate(trials, |t| {
        let mut rng = TrialRng::new(seed, t);
        let realization = sample_realization(instance, &mut rng);
        let coins = sample_coins(&probs, &mut rng);
        run_comb_policy(model, instance, policy, &rule, &realization, &coins)
            .expect("validated rule")
            .total_cost
            .to_f64_lossy()
    }))
}
