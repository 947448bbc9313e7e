//! Exact optimal values by dynamic programming, and the policy-dependent
//! surrogate lower bound.
//!
//! For single-item selection the state is the set of uninspected items plus
//! the best observed price. For combinatorial models the state records, per
//! item, whether it is uninspected, selected, or inspected with a given
//! price.

use std::collections::HashMap;

use crate::comb::{mask_of, CombModel, Mask};
use crate::enumerate::{expect_over_outcomes, Budget, CoinMode};
use crate::error::{Error, Result};
use crate::instance::{HedgeCoins, Instance, Realization};
use crate::mc::{estimate, sample_coins, sample_realization, Estimate, TrialRng};
use crate::real::{max_of, min_of, Real};
use crate::single::{run_policy, Policy, PolicyTrace, Regime};

/// Largest instance accepted by the single-item optimum.
pub const MAX_SINGLE_OPT_ITEMS: usize = 16;

fn better<T: Real>(best: Option<T>, candidate: T) -> Option<T> {
    Some(match best {
        None => candidate,
        Some(b) => min_of(b, candidate),
    })
}

struct SingleDp<'a, T> {
    instance: &'a Instance<T>,
    regime: Regime,
    /// Distinct support values in increasing order.
    grid: Vec<T>,
    /// Grid index of every atom, per item.
    atom_slot: Vec<Vec<usize>>,
    memo: HashMap<(Mask, usize), T>,
}

impl<T: Real> SingleDp<'_, T> {
    /// Optimal cost-to-go with `remaining` uninspected and best observed
    /// grid slot `best` (`grid.len()` when nothing is observed).
    fn value(&mut self, remaining: Mask, best: usize) -> T {
        if let Some(v) = self.memo.get(&(remaining, best)) {
            return v.clone();
        }
        let mut out: Option<T> = None;
        if best < self.grid.len() {
            out = better(out, self.grid[best].clone());
        }
        for n in 0..self.instance.len() {
            if remaining & (1 << n) == 0 {
                continue;
            }
            let item = self.instance.item(n);
            if self.regime == Regime::Noi {
                out = better(out, item.indices().mu.clone());
            }
            let mut go = item.cost().clone();
            for (k, atom) in item.dist().atoms().iter().enumerate() {
                let slot = self.atom_slot[n][k].min(best);
                go = go + atom.prob.clone() * self.value(remaining & !(1 << n), slot);
            }
            out = better(out, go);
        }
        let v = out.expect("a state always has an action");
        self.memo.insert((remaining, best), v.clone());
        v
    }
}

/// Optimal expected cost of single-item selection, with (`Noi`) or without
/// (`Oi`) the option of selecting an item uninspected.
pub fn opt_value_single<T: Real>(instance: &Instance<T>, regime: Regime, budget: Budget) -> Result<T> {
    let n = instance.len();
    if n > MAX_SINGLE_OPT_ITEMS {
        return Err(Error::InvalidInstance(format!(
            "exact optimum supports at most {MAX_SINGLE_OPT_ITEMS} items, got {n}"
        )));
    }
    let mut grid: Vec<T> = instance
        .items()
        .iter()
        .flat_map(|it| it.dist().values().cloned())
        .collect();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    grid.dedup();
    let support: u128 = instance.items().iter().map(|it| it.dist().len() as u128).sum();
    budget.check((1u128 << n) * (grid.len() as u128 + 1) * support.max(1))?;
    let atom_slot = instance
        .items()
        .iter()
        .map(|it| {
            it.dist()
                .values()
                .map(|v| grid.iter().position(|g| g == v).expect("on grid"))
                .collect()
        })
        .collect();
    let best = grid.len();
    let mut dp = SingleDp {
        instance,
        regime,
        grid,
        atom_slot,
        memo: HashMap::new(),
    };
    Ok(dp.value(((1u64 << n) - 1) as Mask, best))
}

/// Optimal expected cost with selection of uninspected items allowed.
pub fn opt_value_single_noi<T: Real>(instance: &Instance<T>, budget: Budget) -> Result<T> {
    opt_value_single(instance, Regime::Noi, budget)
}

/// Optimal expected cost under obligatory inspection.
pub fn opt_value_single_oi<T: Real>(instance: &Instance<T>, budget: Budget) -> Result<T> {
    opt_value_single(instance, Regime::Oi, budget)
}

const UNINSPECTED: usize = 0;
const SELECTED: usize = 1;

struct CombDp<'a, T> {
    model: &'a CombModel<T>,
    instance: &'a Instance<T>,
    regime: Regime,
    radices: Vec<usize>,
    memo: Vec<Option<T>>,
}

impl<T: Real> CombDp<'_, T> {
    fn with_digit(&self, state: usize, item: usize, old: usize, new: usize) -> usize {
        let place: usize = self.radices[..item].iter().product();
        state - old * place + new * place
    }

    fn value(&mut self, state: usize) -> T {
        if let Some(v) = &self.memo[state] {
            return v.clone();
        }
        let n = self.instance.len();
        let mut digits = Vec::with_capacity(n);
        let mut rest = state;
        for &r in &self.radices {
            digits.push(rest % r);
            rest /= r;
        }
        let selected = mask_of((0..n).filter(|&i| digits[i] == SELECTED));
        let mut out: Option<T> = None;
        if self.model.is_feasible(selected) {
            out = better(out, self.model.terminal_cost(selected));
        }
        for (i, &d) in digits.iter().enumerate() {
            let item = self.instance.item(i);
            match d {
                UNINSPECTED => {
                    let mut go = item.cost().clone();
                    for (k, atom) in item.dist().atoms().iter().enumerate() {
                        let next = self.with_digit(state, i, UNINSPECTED, 2 + k);
                        go = go + atom.prob.clone() * self.value(next);
                    }
                    out = better(out, go);
                    if self.regime == Regime::Noi {
                        let next = self.with_digit(state, i, UNINSPECTED, SELECTED);
                        let blind = item.indices().mu.clone() + self.value(next);
                        out = better(out, blind);
                    }
                }
                SELECTED => {}
                inspected => {
                    let next = self.with_digit(state, i, inspected, SELECTED);
                    let v = item.dist().atoms()[inspected - 2].value.clone() + self.value(next);
                    out = better(out, v);
                }
            }
        }
        // The full set is feasible in an upward-closed nonempty family, so
        // every state has at least one action.
        let v = out.expect("some action is available");
        self.memo[state] = Some(v.clone());
        v
    }
}

/// Optimal expected cost of a combinatorial model. Policies may keep
/// acting after reaching a feasible set.
pub fn opt_value_comb<T: Real>(
    model: &CombModel<T>,
    instance: &Instance<T>,
    regime: Regime,
    budget: Budget,
) -> Result<T> {
    if model.n() != instance.len() {
        return Err(Error::InvalidModel(format!(
            "model has {} items, instance has {}",
            model.n(),
            instance.len()
        )));
    }
    if !model.is_feasible(((1u64 << model.n()) - 1) as Mask) {
        return Err(Error::Infeasible);
    }
    let radices: Vec<usize> = instance.items().iter().map(|it| 2 + it.dist().len()).collect();
    let states = crate::enumerate::space_size(&radices);
    let work = states.saturating_mul(radices.iter().map(|&r| r as u128).sum());
    budget.check(work)?;
    let mut dp = CombDp {
        model,
        instance,
        regime,
        memo: vec![None; states as usize],
        radices,
    };
    Ok(dp.value(0))
}

/// Optimal combinatorial cost with selection of uninspected items allowed.
pub fn opt_value_comb_noi<T: Real>(model: &CombModel<T>, instance: &Instance<T>, budget: Budget) -> Result<T> {
    opt_value_comb(model, instance, Regime::Noi, budget)
}

/// `min_n W^π_n` for one run: inspected items contribute
/// `max(v, u_rsv)`, the rest their mean.
pub fn policy_surrogate_min<T: Real>(instance: &Instance<T>, realization: &Realization<T>, trace: &PolicyTrace<T>) -> T {
    let mut inspected = vec![false; instance.len()];
    for &n in &trace.inspection_order {
        inspected[n] = true;
    }
    instance
        .items()
        .iter()
        .map(|it| {
            let ix = it.indices();
            if inspected[it.id()] {
                max_of(realization.price(it.id()).clone(), ix.u_rsv.clone())
            } else {
                ix.mu.clone()
            }
        })
        .reduce(min_of)
        .expect("nonempty instance")
}

/// Monte Carlo estimate of `E[min_n W^π_n]`, using the same trial draws as
/// policy simulation.
pub fn pi_surrogate_bound<T: Real>(instance: &Instance<T>, policy: Policy, trials: u64, seed: u64) -> Estimate {
    let probs = policy.coin_mode(instance).inspect_probabilities(instance);
    estimate(trials, |t| {
        let mut rng = TrialRng::new(seed, t);
        let realization = sample_realization(instance, &mut rng);
        let coins = sample_coins(&probs, &mut rng);
        let trace = run_policy(instance, policy, &realization, &coins);
        policy_surrogate_min(instance, &realization, &trace).to_f64_lossy()
    })
}

/// Exact `E[min_n W^π_n]` under an explicit label distribution.
pub fn pi_surrogate_bound_exact<T: Real>(
    instance: &Instance<T>,
    policy: Policy,
    coins: &CoinMode<T>,
    budget: Budget,
) -> Result<T> {
    expect_over_outcomes(instance, coins, budget, |realization, labels: &HedgeCoins| {
        let trace = run_policy(instance, policy, realization, labels);
        policy_surrogate_min(instance, realization, &trace)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comb::{ExplicitFamily, Family, Terminal};
    use crate::dist::DiscreteDist;
    use crate::indices::SurrogateKind;
    use crate::real::Rational;
    use crate::single::{evaluate_policy_exact, expected_min_surrogate};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn worked() -> Instance<Rational> {
        Instance::from_parts([
            (q(0, 1), DiscreteDist::point_mass(q(5, 1))),
            (q(2, 1), DiscreteDist::new([(q(0, 1), q(1, 2)), (q(10, 1), q(1, 2))]).unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn worked_instance_optima() {
        let inst = worked();
        assert_eq!(opt_value_single_noi(&inst, Budget::default()).unwrap(), q(9, 2));
        assert_eq!(
            opt_value_single_oi(&inst, Budget::default()).unwrap(),
            expected_min_surrogate(&inst, SurrogateKind::Oi)
        );
        assert_eq!(
            opt_value_single_oi(&inst, Budget::default()).unwrap(),
            evaluate_policy_exact(&inst, Policy::Weitzman, Budget::default()).unwrap()
        );
    }

    #[test]
    fn comb_dp_agrees_with_single_dp_on_rank_one() {
        let inst = worked();
        let m = CombModel::single_item(2);
        assert_eq!(opt_value_comb_noi(&m, &inst, Budget::default()).unwrap(), q(9, 2));
        assert_eq!(
            opt_value_comb(&m, &inst, Regime::Oi, Budget::default()).unwrap(),
            opt_value_single_oi(&inst, Budget::default()).unwrap()
        );
    }

    #[test]
    fn comb_dp_pays_terminal_cost() {
        let inst = Instance::from_parts([
            (q(0, 1), DiscreteDist::point_mass(q(1, 1))),
            (q(0, 1), DiscreteDist::point_mass(q(1, 1))),
        ])
        .unwrap();
        let d = vec![vec![q(0, 1), q(5, 1)], vec![q(5, 1), q(0, 1)]];
        let m = CombModel::new(2, Family::UniformMatroid { k: 1 }, Terminal::FacilityLocation { distances: d }).unwrap();
        assert_eq!(opt_value_comb_noi(&m, &inst, Budget::default()).unwrap(), q(2, 1));
    }

    #[test]
    fn comb_dp_on_explicit_family() {
        let inst = worked();
        let f = ExplicitFamily::new(2, &[vec![0, 1]]).unwrap();
        let m = CombModel::new(2, Family::Explicit(f), Terminal::Zero).unwrap();
        // Both items must be bought; buying blind costs the means.
        assert_eq!(opt_value_comb_noi(&m, &inst, Budget::default()).unwrap(), q(10, 1));
        let m = CombModel::new(2, Family::UniformMatroid { k: 1 }, Terminal::Zero).unwrap();
        assert_eq!(opt_value_comb_noi(&m, &inst, Budget::default()).unwrap(), q(9, 2));
    }

    #[test]
    fn surrogate_bound_of_blind_policy_is_min_mean() {
        let inst = Instance::from_parts([
            (3.0, DiscreteDist::new([(0.0, 0.5), (2.0, 0.5)]).unwrap()),
            (3.0, DiscreteDist::new([(1.0, 0.5), (3.0, 0.5)]).unwrap()),
        ])
        .unwrap();
        let e = pi_surrogate_bound(&inst, Policy::LocalHedging, 500, 9);
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn budget_guards_the_dp() {
        let inst = worked();
        assert!(matches!(
            opt_value_single_noi(&inst, Budget(3)),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
