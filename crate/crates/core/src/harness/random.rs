//! Reproducible random tiny instances.
//!
//! Values lie on a 0.5 grid in `[0, 10]`, supports have 2 to 4 distinct
//! values with integer weights 1 to 5, costs lie on a 0.25 grid in `[0, 4]`.
//! Instance `i` of seed `s` depends on `(s, i)` only.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::comb::{CombModel, Family, Terminal};
use crate::dist::DiscreteDist;
use crate::indices::Item;
use crate::instance::Instance;
use crate::real::Real;

use super::file::Problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomParams {
    pub min_items: usize,
    pub max_items: usize,
    pub min_support: usize,
    pub max_support: usize,
    /// Largest value in half units.
    pub max_value_halves: i64,
    /// Largest cost in quarter units.
    pub max_cost_quarters: i64,
    pub max_weight: i64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            min_items: 1,
            max_items: 5,
            min_support: 2,
            max_support: 4,
            max_value_halves: 20,
            max_cost_quarters: 16,
            max_weight: 5,
        }
    }
}

impl RandomParams {
    pub fn with_items(mut self, min: usize, max: usize) -> Self {
        self.min_items = min;
        self.max_items = max;
        self
    }

    pub fn with_support(mut self, min: usize, max: usize) -> Self {
        self.min_support = min;
        self.max_support = max;
        self
    }
}

/// Generator for case `index` of `seed`.
pub fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_dist<T: Real, R: Rng>(params: &RandomParams, rng: &mut R) -> DiscreteDist<T> {
    let size = rng.gen_range(params.min_support..=params.max_support);
    let grid: Vec<i64> = (0..=params.max_value_halves).collect();
    let values: Vec<i64> = grid.choose_multiple(rng, size).copied().collect();
    let weights: Vec<i64> = (0..size).map(|_| rng.gen_range(1..=params.max_weight)).collect();
    let total: i64 = weights.iter().sum();
    DiscreteDist::new(
        values
            .into_iter()
            .zip(weights)
            .map(|(v, w)| (T::from_ratio(v, 2), T::from_ratio(w, total))),
    )
    .expect("valid random distribution")
}

pub fn random_item<T: Real, R: Rng>(id: usize, params: &RandomParams, rng: &mut R) -> Item<T> {
    let dist = random_dist(params, rng);
    let cost = T::from_ratio(rng.gen_range(0..=params.max_cost_quarters), 4);
    Item::new(id, cost, dist).expect("valid random item")
}

pub fn random_instance<T: Real, R: Rng>(params: &RandomParams, rng: &mut R) -> Instance<T> {
    let n = rng.gen_range(params.min_items..=params.max_items);
    Instance::new((0..n).map(|id| random_item(id, params, rng)).collect()).expect("valid random instance")
}

/// Uniform matroid of rank at most `max_rank`, or a connected graphic
/// matroid on up to four vertices, with equal odds.
pub fn random_matroid_model<T: Real, R: Rng>(n: usize, max_rank: usize, rng: &mut R) -> CombModel<T> {
    if n == 1 || rng.gen_bool(0.5) {
        let k = rng.gen_range(1..=max_rank.min(n).max(1));
        return CombModel::new(n, Family::UniformMatroid { k }, Terminal::Zero).expect("valid rank");
    }
    let vertices = rng.gen_range(2..=(n + 1).min(4));
    let mut edges: Vec<(usize, usize)> = (1..vertices).map(|v| (rng.gen_range(0..v), v)).collect();
    while edges.len() < n {
        let u = rng.gen_range(0..vertices);
        let mut v = rng.gen_range(0..vertices - 1);
        if v >= u {
            v += 1;
        }
        edges.push((u.min(v), u.max(v)));
    }
    edges.shuffle(rng);
    CombModel::new(n, Family::Graphic { edges }, Terminal::Zero).expect("connected graph")
}

/// Case `index` of the verification corpus for `seed`: a single-item
/// instance, or with probability 1/3 a matroid instance of rank at most 3.
pub fn random_problem<T: Real>(seed: u64, index: u64) -> Problem<T> {
    let mut rng = case_rng(seed, index);
    let instance: Instance<T> = random_instance(&RandomParams::default(), &mut rng);
    let model = rng
        .gen_bool(1.0 / 3.0)
        .then(|| random_matroid_model(instance.len(), 3, &mut rng));
    Problem {
        claimed: vec![None; instance.len()],
        instance,
        model,
        metadata: serde_json::json!({ "generator": { "seed": seed, "index": index } }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Rational;

    #[test]
    fn generation_is_reproducible() {
        let a: Problem<f64> = random_problem(42, 7);
        let b: Problem<f64> = random_problem(42, 7);
        assert_eq!(a, b);
        let c: Problem<f64> = random_problem(42, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn exact_and_float_draws_agree() {
        let a: Problem<f64> = random_problem(1, 3);
        let b: Problem<Rational> = random_problem(1, 3);
        for (x, y) in a.instance.items().iter().zip(b.instance.items()) {
            assert_eq!(x.cost().clone(), y.cost().to_f64_lossy());
            assert_eq!(x.dist().len(), y.dist().len());
        }
    }

    #[test]
    fn random_graphs_are_connected() {
        for i in 0..200 {
            let mut rng = case_rng(5, i);
            let n = rng.gen_range(1..=6);
            let m: CombModel<f64> = random_matroid_model(n, 3, &mut rng);
            assert!(m.is_feasible((1 << n) - 1));
        }
    }
}
