//! Counter-based Monte Carlo sampling.
//!
//! Every random draw is a pure function of `(seed, trial, item, slot)`: the
//! seed keys a ChaCha8 stream, the trial index selects the stream, and the
//! item index positions the keystream. Results are therefore identical for
//! any trial order or thread count.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::instance::{HedgeCoins, Instance, Realization};
use crate::real::Real;

/// 32-bit words reserved per item in a trial's keystream.
const WORDS_PER_ITEM: u128 = 8;

const CHUNK: u64 = 1024;

/// Deterministic per-trial random source.
pub struct TrialRng {
    rng: ChaCha8Rng,
}

impl TrialRng {
    pub fn new(seed: u64, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        TrialRng { rng }
    }

    /// Uniform draw in `[0, 1)` for `(item, slot)`, `slot < 4`.
    pub fn uniform(&mut self, item: usize, slot: u8) -> f64 {
        debug_assert!(slot < 4);
        self.rng
            .set_word_pos(item as u128 * WORDS_PER_ITEM + 2 * slot as u128);
        self.rng.gen::<f64>()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

const PRICE_SLOT: u8 = 0;
const COIN_SLOT: u8 = 1;

/// Samples the hidden prices of a trial.
pub fn sample_realization<T: Real>(instance: &Instance<T>, rng: &mut TrialRng) -> Realization<T> {
    let prices = instance
        .items()
        .iter()
        .map(|item| {
            let u = rng.uniform(item.id(), PRICE_SLOT);
            let cdf = item.dist().cumulative_f64();
            let k = cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1);
            item.dist().atoms()[k].value.clone()
        })
        .collect();
    Realization::new(prices)
}

/// Samples hedge labels; item `n` is labelled obligatory inspection with
/// probability `probs[n]`.
pub fn sample_coins<T: Real>(probs: &[T], rng: &mut TrialRng) -> HedgeCoins {
    HedgeCoins::new(
        probs
            .iter()
            .enumerate()
            .map(|(id, p)| {
                if *p >= T::one() {
                    return true;
                }
                if *p <= T::zero() {
                    return false;
                }
                rng.uniform(id, COIN_SLOT) < p.to_f64_lossy()
            })
            .collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// Mean and standard error of `f(trial)` over `0..trials`.
///
/// Trials are grouped into fixed chunks whose partial results are folded in
/// order, so the floating-point result is schedule independent. A constant
/// sample reports its value exactly with zero standard error.
pub fn estimate<F>(trials: u64, f: F) -> Estimate
where
    F: Fn(u64) -> f64 + Sync,
{
    assert!(trials >= 1, "at least one trial is required");
    let chunks = trials.div_ceil(CHUNK);
    let samples: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(trials);
            (start..end).map(&f).collect()
        })
        .collect();
    let first = samples[0][0];
    if samples.iter().flatten().all(|&x| x == first) {
        return Estimate {
            mean: first,
            stderr: 0.0,
            trials,
        };
    }
    let n = trials as f64;
    let mean = samples.iter().map(|c| c.iter().sum::<f64>()).sum::<f64>() / n;
    let ss: f64 = samples
        .iter()
        .map(|c| c.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>())
        .sum();
    let stderr = if trials > 1 {
        (ss / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    Estimate {
        mean,
        stderr,
        trials,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_addressed_not_sequential() {
        let mut a = TrialRng::new(7, 3);
        let x1 = a.uniform(2, 0);
        let _ = a.uniform(0, 1);
        let x2 = a.uniform(2, 0);
        assert_eq!(x1, x2);
        let mut b = TrialRng::new(7, 3);
        assert_eq!(b.uniform(2, 0), x1);
        let mut c = TrialRng::new(7, 4);
        assert_ne!(c.uniform(2, 0), x1);
    }

    #[test]
    fn estimate_of_constant_has_zero_stderr() {
        let e = estimate(100, |_| 3.5);
        assert_eq!(e.mean, 3.5);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn estimate_is_thread_count_independent() {
        let f = |t: u64| {
            let mut r = TrialRng::new(11, t);
            r.uniform(0, 0)
        };
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| estimate(5000, f));
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| estimate(5000, f));
        assert_eq!(one.mean.to_bits(), four.mean.to_bits());
        assert_eq!(one.stderr.to_bits(), four.stderr.to_bits());
        assert!((one.mean - 0.5).abs() < 0.05);
    }
}
