#![allow(dead_code)]

use std::collections::HashMap;

use pandora::dist::DiscreteDist;
use pandora::indices::Item;
use pandora::instance::Instance;
use pandora::real::{min_of, Rational, Real};
use pandora::single::Regime;
use proptest::prelude::*;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Worked instance: a free point mass at 5 and a two-point box at cost 2.
pub fn worked<T: Real>() -> Instance<T> {
    Instance::from_parts([
        (T::from_ratio(0, 1), DiscreteDist::point_mass(T::from_ratio(5, 1))),
        (
            T::from_ratio(2, 1),
            DiscreteDist::new([
                (T::from_ratio(0, 1), T::from_ratio(1, 2)),
                (T::from_ratio(10, 1), T::from_ratio(1, 2)),
            ])
            .unwrap(),
        ),
    ])
    .unwrap()
}

/// `(value in halves, weight)` pairs; duplicate values merge.
pub fn dist_strategy<T: Real>(max_support: usize) -> impl Strategy<Value = DiscreteDist<T>> {
    prop::collection::vec((0i64..=20, 1i64..=5), 1..=max_support).prop_map(|pairs| {
        let total: i64 = pairs.iter().map(|p| p.1).sum();
        DiscreteDist::new(
            pairs
                .into_iter()
                .map(|(v, w)| (T::from_ratio(v, 2), T::from_ratio(w, total))),
        )
        .unwrap()
    })
}

pub fn item_strategy<T: Real>(max_support: usize) -> impl Strategy<Value = Item<T>> {
    (0i64..=16, dist_strategy::<T>(max_support)).prop_map(|(c, d)| Item::new(0, T::from_ratio(c, 4), d).unwrap())
}

pub fn instance_strategy<T: Real>(max_items: usize, max_support: usize) -> impl Strategy<Value = Instance<T>> {
    prop::collection::vec((0i64..=16, dist_strategy::<T>(max_support)), 1..=max_items)
        .prop_map(|parts| Instance::from_parts(parts.into_iter().map(|(c, d)| (T::from_ratio(c, 4), d))).unwrap())
}

/// Optimal value over the full observation state (every inspected price
/// remembered), for checking the compressed single-item recursion.
pub fn reference_opt<T: Real>(instance: &Instance<T>, regime: Regime) -> T {
    fn go<T: Real>(
        instance: &Instance<T>,
        regime: Regime,
        state: &mut Vec<Option<usize>>,
        uninspected: &mut Vec<bool>,
        memo: &mut HashMap<(Vec<Option<usize>>, Vec<bool>), T>,
    ) -> T {
        let key = (state.clone(), uninspected.clone());
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let mut best: Option<T> = None;
        let consider = |x: T, best: &mut Option<T>| {
            *best = Some(match best.take() {
                None => x,
                Some(b) => min_of(b, x),
            });
        };
        for n in 0..instance.len() {
            let item = instance.item(n);
            if let Some(k) = state[n] {
                consider(item.dist().atoms()[k].value.clone(), &mut best);
            }
            if uninspected[n] {
                if regime == Regime::Noi {
                    consider(item.indices().mu.clone(), &mut best);
                }
                let mut total = item.cost().clone();
                uninspected[n] = false;
                for (k, atom) in item.dist().atoms().iter().enumerate() {
                    state[n] = Some(k);
                    total = total + atom.prob.clone() * go(instance, regime, state, uninspected, memo);
                }
                state[n] = None;
                uninspected[n] = true;
                consider(total, &mut best);
            }
        }
        let v = best.expect("an action exists");
        memo.insert(key, v.clone());
        v
    }
    let n = instance.len();
    go(instance, regime, &mut vec![None; n], &mut vec![true; n], &mut HashMap::new())
}
