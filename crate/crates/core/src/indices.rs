//! Per-item indices and surrogate prices.
//!
//! An [`Item`] computes its [`ItemIndices`] once at construction: the mean,
//! the reservation price (where taking an outside option and inspecting are
//! equally good), the backup price (where inspecting and taking the item
//! blind are equally good), and the hedging probability with its local
//! approximation ratio.

use serde::Serialize;

use crate::dist::{cap_at, floor_at, DiscreteDist};
use crate::error::{Error, Result};
use crate::real::{max_of, min_of, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct Item<T> {
    id: usize,
    cost: T,
    dist: DiscreteDist<T>,
    indices: ItemIndices<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ItemIndices<T> {
    pub mu: T,
    pub u_rsv: T,
    pub u_bkp: T,
    pub p_hedge: T,
    pub alpha_local: T,
    /// `u_rsv >= u_bkp`: inspecting is never worthwhile.
    pub never_inspect: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SurrogateKind {
    /// Obligatory inspection: `max{V, u_rsv}`.
    #[serde(rename = "OI")]
    Oi,
    /// Nonobligatory inspection: additionally capped at `u_bkp`, or `μ` when
    /// inspection never pays.
    #[serde(rename = "NOI")]
    Noi,
    /// Local hedging at the item's own hedging probability.
    #[serde(rename = "LH")]
    Lh,
}

impl SurrogateKind {
    pub const ALL: [SurrogateKind; 3] = [SurrogateKind::Oi, SurrogateKind::Noi, SurrogateKind::Lh];

    pub fn name(self) -> &'static str {
        match self {
            SurrogateKind::Oi => "OI",
            SurrogateKind::Noi => "NOI",
            SurrogateKind::Lh => "LH",
        }
    }
}

impl<T: Real> Item<T> {
    pub fn new(id: usize, cost: T, dist: DiscreteDist<T>) -> Result<Self> {
        if !cost.is_finite_value() || cost < T::zero() {
            return Err(Error::InvalidItem {
                item: id,
                message: format!("inspection cost must be a nonnegative number, got {cost}"),
            });
        }
        let indices = compute_indices(&cost, &dist);
        Ok(Item {
            id,
            cost,
            dist,
            indices,
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn cost(&self) -> &T {
        &self.cost
    }

    pub fn dist(&self) -> &DiscreteDist<T> {
        &self.dist
    }

    pub fn indices(&self) -> &ItemIndices<T> {
        &self.indices
    }

    pub fn with_id(mut self, id: usize) -> Self {
        self.id = id;
        self
    }

    /// Same item made free to inspect with a deterministic price equal to
    /// its mean; the obligatory-inspection stand-in for a non-inspection label.
    pub fn as_committed_blind(&self) -> Self {
        let mu = self.indices.mu.clone();
        Item::new(self.id, T::zero(), DiscreteDist::point_mass(mu)).expect("valid point mass")
    }

    /// `α(p) = 1 + max{(1-p)(μ - u_rsv)/u_rsv, p c/μ}`, valid when
    /// `u_rsv < u_bkp`.
    pub fn alpha_of_p(&self, p: &T) -> Result<T> {
        let ix = &self.indices;
        if ix.never_inspect {
            return Err(Error::Hypothesis(format!(
                "item {}: u_rsv = {} is not below u_bkp = {}",
                self.id, ix.u_rsv, ix.u_bkp
            )));
        }
        if *p < T::zero() || *p > T::one() {
            return Err(Error::Hypothesis(format!("p = {p} outside [0, 1]")));
        }
        let one = T::one();
        let loss_blind = if ix.u_rsv.is_zero() {
            if *p < one {
                return Err(Error::DivisionGuard(format!(
                    "item {}: u_rsv = 0 requires p = 1",
                    self.id
                )));
            }
            T::zero()
        } else {
            (one.clone() - p.clone()) * (ix.mu.clone() - ix.u_rsv.clone()) / ix.u_rsv.clone()
        };
        let loss_inspect = p.clone() * self.cost.clone() / ix.mu.clone();
        Ok(one + max_of(loss_blind, loss_inspect))
    }

    /// Realized surrogate price for hidden price `v`; `coin` is the hedge
    /// label (`true` = obligatory inspection) and is required for LH.
    pub fn surrogate_value(&self, kind: SurrogateKind, v: &T, coin: Option<bool>) -> Result<T> {
        let ix = &self.indices;
        let oi = max_of(v.clone(), ix.u_rsv.clone());
        Ok(match kind {
            SurrogateKind::Oi => oi,
            SurrogateKind::Noi => {
                if ix.never_inspect {
                    ix.mu.clone()
                } else {
                    min_of(oi, ix.u_bkp.clone())
                }
            }
            SurrogateKind::Lh => match coin {
                None => return Err(Error::MissingCoin),
                Some(true) => oi,
                Some(false) => ix.mu.clone(),
            },
        })
    }

    /// Exact distribution of the surrogate price.
    pub fn surrogate_dist(&self, kind: SurrogateKind) -> DiscreteDist<T> {
        match kind {
            SurrogateKind::Lh => self.lh_surrogate_dist(&self.indices.p_hedge),
            _ => self.base_surrogate_dist(kind),
        }
    }

    fn base_surrogate_dist(&self, kind: SurrogateKind) -> DiscreteDist<T> {
        let ix = &self.indices;
        let oi = floor_at(&self.dist, &ix.u_rsv);
        match kind {
            SurrogateKind::Oi => oi,
            SurrogateKind::Noi if ix.never_inspect => DiscreteDist::point_mass(ix.mu.clone()),
            SurrogateKind::Noi => cap_at(&oi, &ix.u_bkp),
            SurrogateKind::Lh => unreachable!(),
        }
    }

    /// Local `p`-hedging surrogate: OI surrogate with probability `p`, the
    /// mean otherwise.
    pub fn lh_surrogate_dist(&self, p: &T) -> DiscreteDist<T> {
        let oi = self.base_surrogate_dist(SurrogateKind::Oi);
        let blind = DiscreteDist::point_mass(self.indices.mu.clone());
        if p.is_zero() {
            return blind;
        }
        if p.is_one() {
            return oi;
        }
        oi.mixture(p, &blind)
    }

    /// `E[min{W, r}]` for the surrogate of the given kind.
    pub fn capped_expectation(&self, kind: SurrogateKind, r: &T) -> T {
        self.surrogate_dist(kind).min_with_constant_expectation(r)
    }
}

/// Computes `(μ, u_rsv, u_bkp, p, α)` for an item with inspection cost `cost`.
///
/// When `u_rsv >= μ` (equivalently `u_rsv >= u_bkp`) the item is never worth
/// inspecting: `p = 0`, `α = 1`. Otherwise `p` equalizes the two branches of
/// `α(p)`.
pub fn compute_indices<T: Real>(cost: &T, dist: &DiscreteDist<T>) -> ItemIndices<T> {
    let mu = dist.mean();
    let u_rsv = dist.reservation_price(cost);
    let u_bkp = dist.backup_price(cost);
    let never_inspect = u_rsv >= u_bkp;
    if never_inspect || mu.is_zero() || u_rsv >= mu {
        return ItemIndices {
            mu,
            u_rsv,
            u_bkp,
            p_hedge: T::zero(),
            alpha_local: T::one(),
            never_inspect,
        };
    }
    let gap = mu.clone() - u_rsv.clone();
    let denom = gap.clone() + cost.clone() * u_rsv.clone() / mu.clone();
    let p_hedge = min_of(max_of(gap.clone() / denom.clone(), T::zero()), T::one());
    let alpha_local = max_of((gap + cost.clone()) / denom, T::one());
    ItemIndices {
        mu,
        u_rsv,
        u_bkp,
        p_hedge,
        alpha_local,
        never_inspect,
    }
}

/// Two-point item with reservation price `u_rsv`, mean `mu` and cost `c`:
/// price 0 with probability `c/u_rsv`, else `u_rsv·mu/(u_rsv - c)`.
pub fn make_worst_case_item<T: Real>(u_rsv: T, mu: T, c: T) -> Result<Item<T>> {
    if u_rsv <= T::zero() {
        return Err(Error::Hypothesis(format!("u_rsv = {u_rsv} must be positive")));
    }
    if mu < u_rsv {
        return Err(Error::Hypothesis(format!("mu = {mu} must be at least u_rsv = {u_rsv}")));
    }
    if c <= T::zero() {
        return Err(Error::Hypothesis(format!("c = {c} must be positive")));
    }
    if c >= u_rsv {
        return Err(Error::Hypothesis(format!(
            "c = {c} must be strictly below u_rsv = {u_rsv}"
        )));
    }
    let p_zero = c.clone() / u_rsv.clone();
    let p_high = (u_rsv.clone() - c.clone()) / u_rsv.clone();
    let high = u_rsv.clone() * mu / (u_rsv - c.clone());
    let dist = DiscreteDist::new([(T::zero(), p_zero), (high, p_high)])?;
    Item::new(0, c, dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Rational;

    fn two_point() -> Item<f64> {
        Item::new(0, 2.0, DiscreteDist::new([(0.0, 0.5), (10.0, 0.5)]).unwrap()).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn two_point_exact() -> Item<Rational> {
        Item::new(
            0,
            q(2, 1),
            DiscreteDist::new([(q(0, 1), q(1, 2)), (q(10, 1), q(1, 2))]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn indices_of_two_point_item() {
        let ix = two_point_exact().indices().clone();
        assert_eq!(ix.mu, q(5, 1));
        assert_eq!(ix.u_rsv, q(4, 1));
        assert_eq!(ix.u_bkp, q(6, 1));
        assert_eq!(ix.p_hedge, q(5, 13));
        assert_eq!(ix.alpha_local, q(15, 13));
        assert!(!ix.never_inspect);

        let f = two_point().indices().clone();
        assert!((f.p_hedge - 5.0 / 13.0).abs() < 1e-15);
        assert!((f.alpha_local - 15.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn free_point_mass_is_never_inspected() {
        let item = Item::new(0, 0.0, DiscreteDist::point_mass(5.0)).unwrap();
        let ix = item.indices();
        assert_eq!(ix.u_rsv, 5.0);
        assert_eq!(ix.p_hedge, 0.0);
        assert_eq!(ix.alpha_local, 1.0);
        assert!(ix.never_inspect);
    }

    #[test]
    fn worst_case_family_member() {
        let item = make_worst_case_item(1.0, 2.0, 0.99).unwrap();
        let ix = item.indices();
        assert!((ix.u_rsv - 1.0).abs() < 1e-12);
        assert!((ix.alpha_local - 1.99 / 1.495).abs() < 1e-12);
        assert_eq!(item.dist().atoms()[0].value, 0.0);
        assert!((item.dist().atoms()[1].value - 200.0).abs() < 1e-9);
    }

    #[test]
    fn worst_case_item_matches_two_point() {
        let item = make_worst_case_item(q(4, 1), q(5, 1), q(2, 1)).unwrap();
        assert_eq!(item.dist(), two_point_exact().dist());
        assert_eq!(item.cost(), &q(2, 1));
        assert_eq!(item.indices().u_rsv, q(4, 1));
        assert_eq!(item.indices().mu, q(5, 1));
    }

    #[test]
    fn worst_case_rejects_cost_at_reservation_price() {
        assert!(make_worst_case_item(1.0, 2.0, 1.0).is_err());
        assert!(make_worst_case_item(1.0, 2.0, 1.5).is_err());
    }

    #[test]
    fn alpha_of_p_examples() {
        let item = two_point_exact();
        assert_eq!(item.alpha_of_p(&q(5, 13)).unwrap(), q(15, 13));
        assert_eq!(item.alpha_of_p(&q(1, 1)).unwrap(), q(1, 1) + q(2, 5));
        assert_eq!(item.alpha_of_p(&q(0, 1)).unwrap(), q(5, 4));
    }

    #[test]
    fn alpha_of_p_errors() {
        let never = Item::new(0, 0.0, DiscreteDist::point_mass(5.0)).unwrap();
        assert!(matches!(never.alpha_of_p(&0.5), Err(Error::Hypothesis(_))));
        // c = 0 with an atom at zero: u_rsv = 0 < mu
        let free = Item::new(0, 0.0, DiscreteDist::new([(0.0, 0.5), (4.0, 0.5)]).unwrap()).unwrap();
        assert_eq!(free.indices().u_rsv, 0.0);
        assert!(matches!(free.alpha_of_p(&0.5), Err(Error::DivisionGuard(_))));
        assert_eq!(free.alpha_of_p(&1.0).unwrap(), 1.0);
        assert_eq!(free.indices().p_hedge, 1.0);
        assert_eq!(free.indices().alpha_local, 1.0);
    }

    #[test]
    fn surrogate_values() {
        let item = two_point();
        assert_eq!(item.surrogate_value(SurrogateKind::Oi, &0.0, None).unwrap(), 4.0);
        assert_eq!(item.surrogate_value(SurrogateKind::Oi, &10.0, None).unwrap(), 10.0);
        assert_eq!(item.surrogate_value(SurrogateKind::Noi, &0.0, None).unwrap(), 4.0);
        assert_eq!(item.surrogate_value(SurrogateKind::Noi, &10.0, None).unwrap(), 6.0);
        assert_eq!(item.surrogate_value(SurrogateKind::Lh, &10.0, Some(false)).unwrap(), 5.0);
        assert_eq!(item.surrogate_value(SurrogateKind::Lh, &10.0, Some(true)).unwrap(), 10.0);
        assert_eq!(
            item.surrogate_value(SurrogateKind::Lh, &10.0, None),
            Err(Error::MissingCoin)
        );
    }

    #[test]
    fn surrogate_dists() {
        let item = two_point_exact();
        let pairs = |d: DiscreteDist<Rational>| {
            d.atoms()
                .iter()
                .map(|a| (a.value.clone(), a.prob.clone()))
                .collect::<Vec<_>>()
        };
        assert_eq!(
            pairs(item.surrogate_dist(SurrogateKind::Noi)),
            vec![(q(4, 1), q(1, 2)), (q(6, 1), q(1, 2))]
        );
        assert_eq!(
            pairs(item.surrogate_dist(SurrogateKind::Oi)),
            vec![(q(4, 1), q(1, 2)), (q(10, 1), q(1, 2))]
        );
        assert_eq!(
            pairs(item.surrogate_dist(SurrogateKind::Lh)),
            vec![(q(4, 1), q(5, 26)), (q(5, 1), q(8, 13)), (q(10, 1), q(5, 26))]
        );
    }

    #[test]
    fn capped_expectations() {
        let item = two_point();
        assert_eq!(item.capped_expectation(SurrogateKind::Oi, &5.0), 4.5);
        assert_eq!(item.capped_expectation(SurrogateKind::Noi, &5.0), 4.5);
        for kind in SurrogateKind::ALL {
            assert_eq!(item.capped_expectation(kind, &-1.0), -1.0);
            assert_eq!(item.capped_expectation(kind, &0.0), 0.0);
        }
    }

    #[test]
    fn surrogate_means() {
        let item = two_point_exact();
        let ix = item.indices();
        assert_eq!(item.surrogate_dist(SurrogateKind::Oi).mean(), ix.mu.clone() + q(2, 1));
        assert_eq!(item.surrogate_dist(SurrogateKind::Noi).mean(), ix.mu.clone());
        assert_eq!(
            item.surrogate_dist(SurrogateKind::Lh).mean(),
            ix.mu.clone() + ix.p_hedge.clone() * q(2, 1)
        );
    }

    #[test]
    fn rejects_negative_cost() {
        assert!(Item::new(3, -1.0, DiscreteDist::point_mass(1.0)).is_err());
    }
}
