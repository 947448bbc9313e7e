use crate::dist::DiscreteDist;
use crate::error::{Error, Result};
use crate::indices::Item;
use crate::real::{max_of, Real};

/// Items with cached indices; ids are `0..N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance<T> {
    items: Vec<Item<T>>,
}

impl<T: Real> Instance<T> {
    pub fn new(items: Vec<Item<T>>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidInstance("an instance needs at least one item".into()));
        }
        for (i, item) in items.iter().enumerate() {
            if item.id() != i {
                return Err(Error::InvalidInstance(format!(
                    "item at position {i} has id {}",
                    item.id()
                )));
            }
        }
        Ok(Instance { items })
    }

    /// Builds items from `(cost, dist)` pairs, numbering them in order.
    pub fn from_parts(parts: impl IntoIterator<Item = (T, DiscreteDist<T>)>) -> Result<Self> {
        let items = parts
            .into_iter()
            .enumerate()
            .map(|(id, (cost, dist))| Item::new(id, cost, dist))
            .collect::<Result<Vec<_>>>()?;
        Self::new(items)
    }

    pub fn items(&self) -> &[Item<T>] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn item(&self, id: usize) -> &Item<T> {
        &self.items[id]
    }

    /// Largest local approximation ratio over all items.
    pub fn max_alpha(&self) -> T {
        self.items
            .iter()
            .map(|it| it.indices().alpha_local.clone())
            .fold(T::one(), max_of)
    }

    /// Instance where every item labelled `false` is replaced by its
    /// free-to-inspect point mass at the mean.
    pub fn committed(&self, coins: &HedgeCoins) -> Self {
        Instance {
            items: self
                .items
                .iter()
                .zip(&coins.labels)
                .map(|(it, &inspect)| if inspect { it.clone() } else { it.as_committed_blind() })
                .collect(),
        }
    }

    /// Number of joint price outcomes.
    pub fn realization_count(&self) -> u128 {
        self.items
            .iter()
            .map(|it| it.dist().len() as u128)
            .fold(1u128, |a, b| a.saturating_mul(b))
    }

    /// Items whose hedge label is genuinely random (`0 < p < 1`).
    pub fn random_label_count(&self) -> usize {
        self.items
            .iter()
            .filter(|it| {
                let p = &it.indices().p_hedge;
                *p > T::zero() && *p < T::one()
            })
            .count()
    }
}

/// One realized hidden price per item.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization<T> {
    pub prices: Vec<T>,
}

impl<T: Real> Realization<T> {
    pub fn new(prices: Vec<T>) -> Self {
        Realization { prices }
    }

    /// Realization picking atom `atom_index[n]` of item `n`.
    pub fn from_atom_indices(instance: &Instance<T>, atom_index: &[usize]) -> Self {
        Realization {
            prices: instance
                .items()
                .iter()
                .zip(atom_index)
                .map(|(it, &k)| it.dist().atoms()[k].value.clone())
                .collect(),
        }
    }

    pub fn price(&self, id: usize) -> &T {
        &self.prices[id]
    }

    pub fn validate(&self, instance: &Instance<T>) -> Result<()> {
        if self.prices.len() != instance.len() {
            return Err(Error::InvalidInstance(format!(
                "realization has {} prices for {} items",
                self.prices.len(),
                instance.len()
            )));
        }
        for (item, v) in instance.items().iter().zip(&self.prices) {
            if !item.dist().values().any(|x| x == v) {
                return Err(Error::InvalidItem {
                    item: item.id(),
                    message: format!("realized price {v} is not in the support"),
                });
            }
        }
        Ok(())
    }
}

/// Hedge labels; `true` marks obligatory inspection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HedgeCoins {
    pub labels: Vec<bool>,
}

impl HedgeCoins {
    pub fn all(n: usize, inspect: bool) -> Self {
        HedgeCoins {
            labels: vec![inspect; n],
        }
    }

    pub fn new(labels: Vec<bool>) -> Self {
        HedgeCoins { labels }
    }
}
