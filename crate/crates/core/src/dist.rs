//! Finite discrete price distributions.
//!
//! Every expectation here is a finite sum over atoms, and the two root
//! solvers walk the breakpoints of their piecewise-linear defining
//! functions, so results are exact in rational mode and carry no iterative
//! tolerance in floating mode.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::{max_of, min_of, sum, Real};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Atom<T> {
    pub value: T,
    pub prob: T,
}

/// Distribution of a nonnegative hidden price with finitely many atoms.
///
/// Atoms are kept sorted by strictly increasing value with positive weights
/// summing to one (within `T::tolerance()`).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DiscreteDist<T> {
    atoms: Vec<Atom<T>>,
}

impl<T: Real> DiscreteDist<T> {
    /// Builds a validated distribution from `(value, prob)` pairs in any
    /// order; atoms sharing a value are merged.
    pub fn new(pairs: impl IntoIterator<Item = (T, T)>) -> Result<Self> {
        let pairs: Vec<(T, T)> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(Error::InvalidDistribution("at least one atom is required".into()));
        }
        for (i, (v, p)) in pairs.iter().enumerate() {
            if !v.is_finite_value() || !p.is_finite_value() {
                return Err(Error::InvalidDistribution(format!("atom {i} is not finite")));
            }
            if *v < T::zero() {
                return Err(Error::InvalidDistribution(format!(
                    "atom {i} has negative value {v}"
                )));
            }
            if *p <= T::zero() {
                return Err(Error::InvalidDistribution(format!(
                    "atom {i} has nonpositive probability {p}"
                )));
            }
        }
        let total = sum(pairs.iter().map(|(_, p)| p.clone()));
        if (total.clone() - T::one()).abs() > T::tolerance() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self::from_pairs_unchecked(pairs))
    }

    pub fn point_mass(value: T) -> Self {
        DiscreteDist {
            atoms: vec![Atom { value, prob: T::one() }],
        }
    }

    /// Sorts and merges without validating weights; used for derived
    /// distributions whose weights are correct by construction.
    pub(crate) fn from_pairs_unchecked(mut pairs: Vec<(T, T)>) -> Self {
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
        let mut atoms: Vec<Atom<T>> = Vec::with_capacity(pairs.len());
        for (value, prob) in pairs {
            if prob <= T::zero() {
                continue;
            }
            match atoms.last_mut() {
                Some(last) if last.value == value => last.prob = last.prob.clone() + prob,
                _ => atoms.push(Atom { value, prob }),
            }
        }
        DiscreteDist { atoms }
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = &T> + '_ {
        self.atoms.iter().map(|a| &a.value)
    }

    pub fn min_value(&self) -> &T {
        &self.atoms[0].value
    }

    pub fn max_value(&self) -> &T {
        &self.atoms[self.atoms.len() - 1].value
    }

    pub fn is_point_mass(&self) -> bool {
        self.atoms.len() == 1
    }

    pub fn total_probability(&self) -> T {
        sum(self.atoms.iter().map(|a| a.prob.clone()))
    }

    /// `E[V]`.
    pub fn mean(&self) -> T {
        sum(self.atoms.iter().map(|a| a.value.clone() * a.prob.clone()))
    }

    /// `E[(u - V)^+]`.
    pub fn expected_shortfall(&self, u: &T) -> T {
        sum(self
            .atoms
            .iter()
            .filter(|a| a.value < *u)
            .map(|a| a.prob.clone() * (u.clone() - a.value.clone())))
    }

    /// `E[(V - u)^+]`.
    pub fn expected_excess(&self, u: &T) -> T {
        sum(self
            .atoms
            .iter()
            .filter(|a| a.value > *u)
            .map(|a| a.prob.clone() * (a.value.clone() - u.clone())))
    }

    /// `E[min{V, r}]`.
    pub fn min_with_constant_expectation(&self, r: &T) -> T {
        sum(self
            .atoms
            .iter()
            .map(|a| a.prob.clone() * min_of(a.value.clone(), r.clone())))
    }

    /// `sup{u : E[(u - V)^+] <= c}`.
    ///
    /// The shortfall is zero up to the smallest atom and strictly increasing
    /// afterwards, with slope equal to the cumulative mass below `u`.
    pub fn reservation_price(&self, c: &T) -> T {
        if *c <= T::zero() {
            return self.min_value().clone();
        }
        let mut mass = T::zero();
        let mut weighted = T::zero();
        for (k, atom) in self.atoms.iter().enumerate() {
            mass = mass + atom.prob.clone();
            weighted = weighted + atom.prob.clone() * atom.value.clone();
            // On [v_k, v_{k+1}] the shortfall is mass * u - weighted.
            let root = (c.clone() + weighted.clone()) / mass.clone();
            match self.atoms.get(k + 1) {
                Some(next) if root > next.value => continue,
                _ => return root,
            }
        }
        unreachable!("last segment always contains the root")
    }

    /// `inf{u : E[(V - u)^+] <= c}`; negative when `c` exceeds the mean.
    pub fn backup_price(&self, c: &T) -> T {
        if *c <= T::zero() {
            return self.max_value().clone();
        }
        let mut mass = T::zero();
        let mut weighted = T::zero();
        for k in (0..self.atoms.len()).rev() {
            let atom = &self.atoms[k];
            mass = mass + atom.prob.clone();
            weighted = weighted + atom.prob.clone() * atom.value.clone();
            // On [v_{k-1}, v_k] the excess is weighted - mass * u.
            let root = (weighted.clone() - c.clone()) / mass.clone();
            if k > 0 && root < self.atoms[k - 1].value {
                continue;
            }
            return root;
        }
        unreachable!("first segment extends to -infinity")
    }

    /// Distribution of `f(V)`, merging atoms that land on the same value.
    pub fn pushforward(&self, mut f: impl FnMut(&T) -> T) -> Self {
        Self::from_pairs_unchecked(
            self.atoms
                .iter()
                .map(|a| (f(&a.value), a.prob.clone()))
                .collect(),
        )
    }

    /// `weight * self + (1 - weight) * other`.
    pub fn mixture(&self, weight: &T, other: &Self) -> Self {
        let rest = T::one() - weight.clone();
        let pairs = self
            .atoms
            .iter()
            .map(|a| (a.value.clone(), weight.clone() * a.prob.clone()))
            .chain(
                other
                    .atoms
                    .iter()
                    .map(|a| (a.value.clone(), rest.clone() * a.prob.clone())),
            )
            .collect();
        Self::from_pairs_unchecked(pairs)
    }

    /// Distribution of `factor * V` for `factor >= 0`.
    pub fn scaled(&self, factor: &T) -> Self {
        self.pushforward(|v| v.clone() * factor.clone())
    }

    /// Cumulative probabilities in `f64`, for sampling.
    pub fn cumulative_f64(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.atoms
            .iter()
            .map(|a| {
                acc += a.prob.to_f64_lossy();
                acc
            })
            .collect()
    }

    /// Every atom value together with the midpoints between neighbours and
    /// points one unit outside the support.
    pub fn breakpoint_sweep(&self) -> Vec<T> {
        let two = T::one() + T::one();
        let mut out = Vec::with_capacity(2 * self.atoms.len() + 2);
        out.push(self.min_value().clone() - T::one());
        for (k, a) in self.atoms.iter().enumerate() {
            out.push(a.value.clone());
            if let Some(next) = self.atoms.get(k + 1) {
                out.push((a.value.clone() + next.value.clone()) / two.clone());
            }
        }
        out.push(self.max_value().clone() + T::one());
        out
    }

    pub fn map_scalar<S: Real>(&self, mut f: impl FnMut(&T) -> S) -> DiscreteDist<S> {
        DiscreteDist {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    value: f(&a.value),
                    prob: f(&a.prob),
                })
                .collect(),
        }
    }
}

/// Exact distribution of `min_i V_i` for independent `V_i ~ dists[i]`.
///
/// Uses `P(min > x) = prod_i P(V_i > x)` on the merged support grid; the
/// tail masses are sums of atoms strictly above `x`, so a tail that is
/// exactly empty contributes an exact zero.
pub fn min_of_independent<T: Real>(dists: &[DiscreteDist<T>]) -> Result<DiscreteDist<T>> {
    if dists.is_empty() {
        return Err(Error::EmptyList);
    }
    if dists.len() == 1 {
        return Ok(dists[0].clone());
    }
    let mut grid: Vec<T> = dists.iter().flat_map(|d| d.values().cloned()).collect();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    grid.dedup();

    let survival = |x: &T| -> T {
        let mut prod = T::one();
        for d in dists {
            let tail = sum(d.atoms.iter().filter(|a| a.value > *x).map(|a| a.prob.clone()));
            if tail.is_zero() {
                return T::zero();
            }
            prod = prod * tail;
        }
        prod
    };

    let mut prev = T::one();
    let mut pairs = Vec::with_capacity(grid.len());
    for x in grid {
        let s = survival(&x);
        let p = prev.clone() - s.clone();
        if p > T::zero() {
            pairs.push((x, p));
        }
        prev = s;
        if prev.is_zero() {
            break;
        }
    }
    Ok(DiscreteDist::from_pairs_unchecked(pairs))
}

/// `E[min{V, r}]` helper that tolerates an unbounded cap.
pub fn capped_mean<T: Real>(d: &DiscreteDist<T>, r: Option<&T>) -> T {
    match r {
        Some(r) => d.min_with_constant_expectation(r),
        None => d.mean(),
    }
}

/// `max{V, floor}` pushforward.
pub fn floor_at<T: Real>(d: &DiscreteDist<T>, floor: &T) -> DiscreteDist<T> {
    d.pushforward(|v| max_of(v.clone(), floor.clone()))
}

/// `min{V, cap}` pushforward.
pub fn cap_at<T: Real>(d: &DiscreteDist<T>, cap: &T) -> DiscreteDist<T> {
    d.pushforward(|v| min_of(v.clone(), cap.clone()))
}

/// `E[(u - V)^+] - E[(V - u)^+]`, which equals `u - E[V]`.
pub fn parity_gap<T: Real>(d: &DiscreteDist<T>, u: &T) -> T {
    d.expected_shortfall(u) - d.expected_excess(u) - (u.clone() - d.mean())
}
