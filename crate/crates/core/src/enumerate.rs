//! Exhaustive expectation over finite product spaces.
//!
//! The index space is split into fixed-size chunks; chunks run in parallel
//! and their partial sums are combined in index order, so the result does
//! not depend on the number of worker threads.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{HedgeCoins, Instance, Realization};
use crate::real::Real;

/// Default cap on enumerated branches.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "PANDORA_BUDGET";

const CHUNK: u64 = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u128);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    /// Budget from `PANDORA_BUDGET`, falling back to the default.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .map(Budget)
            .unwrap_or_default()
    }

    pub fn check(self, needed: u128) -> Result<()> {
        if needed > self.0 {
            Err(Error::BudgetExceeded {
                needed,
                budget: self.0,
            })
        } else {
            Ok(())
        }
    }
}

/// Product of radices, saturating.
pub fn space_size(radices: &[usize]) -> u128 {
    radices
        .iter()
        .fold(1u128, |acc, &r| acc.saturating_mul(r as u128))
}

fn decode(mut index: u64, radices: &[usize], digits: &mut [usize]) {
    for (d, &r) in digits.iter_mut().zip(radices) {
        *d = (index % r as u64) as usize;
        index /= r as u64;
    }
}

/// `Σ_{x ∈ Π [0, radices[i])} f(x)`, where `f` already carries the weight
/// of its branch.
pub fn sum_over_product<T, F>(radices: &[usize], budget: Budget, f: F) -> Result<T>
where
    T: Real,
    F: Fn(&[usize]) -> T + Sync,
{
    let total = space_size(radices);
    budget.check(total)?;
    if radices.contains(&0) {
        return Ok(T::zero());
    }
    let total = total as u64;
    let chunks = total.div_ceil(CHUNK);
    let partials: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut digits = vec![0usize; radices.len()];
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut acc = T::zero();
            for index in start..end {
                decode(index, radices, &mut digits);
                acc = acc + f(&digits);
            }
            acc
        })
        .collect();
    Ok(partials.into_iter().fold(T::zero(), |a, b| a + b))
}

/// How hedge labels are drawn while enumerating or sampling outcomes.
#[derive(Clone, Debug, PartialEq)]
pub enum CoinMode<T> {
    /// Every item labelled obligatory inspection.
    AllInspect,
    /// Independent labels with each item's own hedging probability.
    Hedged,
    /// Independent labels with the given per-item probabilities.
    HedgedWith(Vec<T>),
    /// A fixed labelling.
    Fixed(HedgeCoins),
}

impl<T: Real> CoinMode<T> {
    /// Probability that each item is labelled obligatory inspection.
    pub fn inspect_probabilities(&self, instance: &Instance<T>) -> Vec<T> {
        match self {
            CoinMode::AllInspect => vec![T::one(); instance.len()],
            CoinMode::Hedged => instance
                .items()
                .iter()
                .map(|it| it.indices().p_hedge.clone())
                .collect(),
            CoinMode::HedgedWith(ps) => ps.clone(),
            CoinMode::Fixed(coins) => coins
                .labels
                .iter()
                .map(|&b| if b { T::one() } else { T::zero() })
                .collect(),
        }
    }
}

fn random_label_items<T: Real>(probs: &[T]) -> Vec<usize> {
    probs
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > T::zero() && **p < T::one())
        .map(|(i, _)| i)
        .collect()
}

/// Number of branches [`expect_over_outcomes`] visits.
pub fn outcome_count<T: Real>(instance: &Instance<T>, coins: &CoinMode<T>) -> u128 {
    let random = random_label_items(&coins.inspect_probabilities(instance)).len();
    instance
        .realization_count()
        .saturating_mul(1u128.checked_shl(random as u32).unwrap_or(u128::MAX))
}

/// `E[run(V, labels)]` over all price realizations and all label vectors.
pub fn expect_over_outcomes<T, F>(
    instance: &Instance<T>,
    coins: &CoinMode<T>,
    budget: Budget,
    run: F,
) -> Result<T>
where
    T: Real,
    F: Fn(&Realization<T>, &HedgeCoins) -> T + Sync,
{
    let n = instance.len();
    let probs = coins.inspect_probabilities(instance);
    let random_items = random_label_items(&probs);
    let base_labels: Vec<bool> = probs.iter().map(|p| *p >= T::one()).collect();
    let mut radices: Vec<usize> = instance.items().iter().map(|it| it.dist().len()).collect();
    // Items whose label is random get an extra binary digit.
    radices.extend(std::iter::repeat_n(2, random_items.len()));
    budget.check(space_size(&radices))?;
    sum_over_product(&radices, budget, |digits| {
        let mut weight = T::one();
        for (item, &k) in instance.items().iter().zip(digits) {
            weight = weight * item.dist().atoms()[k].prob.clone();
        }
        let mut labels = base_labels.clone();
        for (j, &id) in random_items.iter().enumerate() {
            let p = probs[id].clone();
            if digits[n + j] == 1 {
                labels[id] = true;
                weight = weight * p;
            } else {
                labels[id] = false;
                weight = weight * (T::one() - p);
            }
        }
        let realization = Realization::from_atom_indices(instance, &digits[..n]);
        weight * run(&realization, &HedgeCoins::new(labels))
    })
}
