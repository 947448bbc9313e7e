use std::collections::BTreeSet;

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::real::{min_of, sum, Real};

/// Largest item count for which explicit families are stored as bitmaps.
pub const MAX_EXPLICIT_ITEMS: usize = 20;

pub type Mask = u32;

pub fn mask_of(ids: impl IntoIterator<Item = usize>) -> Mask {
    ids.into_iter().fold(0, |m, i| m | (1 << i))
}

pub fn ids_of(mask: Mask) -> BTreeSet<usize> {
    (0..Mask::BITS as usize).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Upward-closed family of feasible item sets, stored as a membership bitmap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitFamily {
    n: usize,
    members: Vec<bool>,
}

impl ExplicitFamily {
    /// Family consisting of exactly `sets`; rejected unless upward closed.
    pub fn new(n: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let members = Self::membership(n, sets)?;
        for mask in 0..members.len() {
            if !members[mask] {
                continue;
            }
            for extra in 0..n {
                let sup = mask | (1 << extra);
                if !members[sup] {
                    return Err(Error::InvalidModel(format!(
                        "explicit family is not upward closed: {:?} is feasible but its superset {:?} is missing",
                        ids_of(mask as Mask),
                        ids_of(sup as Mask)
                    )));
                }
            }
        }
        Ok(ExplicitFamily { n, members })
    }

    /// Upward closure of `generators`.
    pub fn upward_closure(n: usize, generators: &[Vec<usize>]) -> Result<Self> {
        let mut members = Self::membership(n, generators)?;
        // Increasing mask order visits every subset before its supersets.
        for mask in 0..members.len() {
            if members[mask] {
                for extra in 0..n {
                    members[mask | (1 << extra)] = true;
                }
            }
        }
        Ok(ExplicitFamily { n, members })
    }

    fn membership(n: usize, sets: &[Vec<usize>]) -> Result<Vec<bool>> {
        if n > MAX_EXPLICIT_ITEMS {
            return Err(Error::InvalidModel(format!(
                "explicit families support at most {MAX_EXPLICIT_ITEMS} items, got {n}"
            )));
        }
        let mut members = vec![false; 1 << n];
        for set in sets {
            if set.is_empty() {
                return Err(Error::InvalidModel("the empty set cannot be feasible".into()));
            }
            if let Some(&bad) = set.iter().find(|&&i| i >= n) {
                return Err(Error::InvalidModel(format!(
                    "explicit set {set:?} names item {bad}, but there are {n} items"
                )));
            }
            members[mask_of(set.iter().copied()) as usize] = true;
        }
        Ok(members)
    }

    pub fn contains(&self, mask: Mask) -> bool {
        self.members[mask as usize]
    }

    /// Inclusion-minimal feasible sets, in increasing mask order.
    pub fn minimal_sets(&self) -> Vec<BTreeSet<usize>> {
        (0..self.members.len())
            .filter(|&m| {
                self.members[m] && (0..self.n).all(|i| m & (1 << i) == 0 || !self.members[m & !(1 << i)])
            })
            .map(|m| ids_of(m as Mask))
            .collect()
    }

    /// `Some(k)` when the family is exactly the sets of size at least `k`.
    pub fn as_uniform_rank(&self) -> Option<usize> {
        let k = (0..self.members.len())
            .filter(|&m| self.members[m])
            .map(|m| (m as Mask).count_ones() as usize)
            .min()?;
        let uniform = (0..self.members.len())
            .all(|m| self.members[m] == ((m as Mask).count_ones() as usize >= k));
        uniform.then_some(k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Explicit(ExplicitFamily),
    /// Sets of size at least `k`.
    UniformMatroid { k: usize },
    /// Edge sets containing a spanning tree; item `n` is edge `edges[n]`.
    Graphic { edges: Vec<(usize, usize)> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Terminal<T> {
    Zero,
    /// `h(S) = Σ_n min_{s ∈ S} d(n, s)`.
    FacilityLocation { distances: Vec<Vec<T>> },
}

/// Matroid structure recognised for greedy rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Matroid {
    Uniform { k: usize },
    Graphic { edges: Vec<(usize, usize)>, vertices: usize },
}

impl Matroid {
    pub fn independent(&self, mask: Mask) -> bool {
        match self {
            Matroid::Uniform { k } => (mask.count_ones() as usize) <= *k,
            Matroid::Graphic { edges, vertices } => {
                let mut uf = UnionFind::<usize>::new(*vertices);
                ids_of(mask).into_iter().all(|e| uf.union(edges[e].0, edges[e].1))
            }
        }
    }
}

/// Feasible family plus terminal cost over `n` items.
#[derive(Clone, Debug, PartialEq)]
pub struct CombModel<T> {
    n: usize,
    family: Family,
    terminal: Terminal<T>,
}

fn graph_vertices(edges: &[(usize, usize)]) -> usize {
    edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0)
}

impl<T: Real> CombModel<T> {
    pub fn new(n: usize, family: Family, terminal: Terminal<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("a model needs at least one item".into()));
        }
        if n > Mask::BITS as usize {
            return Err(Error::InvalidModel(format!("at most {} items are supported", Mask::BITS)));
        }
        match &family {
            Family::Explicit(f) => {
                if f.n != n {
                    return Err(Error::InvalidModel(format!(
                        "explicit family is over {} items, instance has {n}",
                        f.n
                    )));
                }
                if !f.members.iter().any(|&m| m) {
                    return Err(Error::Infeasible);
                }
            }
            Family::UniformMatroid { k } => {
                if *k == 0 || *k > n {
                    return Err(Error::InvalidModel(format!(
                        "uniform matroid rank must be in 1..={n}, got {k}"
                    )));
                }
            }
            Family::Graphic { edges } => {
                if edges.len() != n {
                    return Err(Error::InvalidModel(format!(
                        "graphic model has {} edges for {n} items",
                        edges.len()
                    )));
                }
                let vertices = graph_vertices(edges);
                let mut uf = UnionFind::<usize>::new(vertices);
                for &(u, v) in edges {
                    uf.union(u, v);
                }
                let root = uf.find(0);
                if (0..vertices).any(|v| uf.find(v) != root) {
                    return Err(Error::Infeasible);
                }
            }
        }
        if let Terminal::FacilityLocation { distances } = &terminal {
            if distances.len() != n || distances.iter().any(|row| row.len() != n) {
                return Err(Error::InvalidModel(format!(
                    "facility-location distances must be a {n}x{n} matrix"
                )));
            }
            if distances.iter().flatten().any(|d| *d < T::zero() || !d.is_finite_value()) {
                return Err(Error::InvalidModel("distances must be finite and nonnegative".into()));
            }
        }
        Ok(CombModel { n, family, terminal })
    }

    /// Single-item selection: every nonempty set is feasible, `h = 0`.
    pub fn single_item(n: usize) -> Self {
        CombModel::new(n, Family::UniformMatroid { k: 1 }, Terminal::Zero).expect("valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn terminal(&self) -> &Terminal<T> {
        &self.terminal
    }

    pub fn is_feasible(&self, mask: Mask) -> bool {
        match &self.family {
            Family::Explicit(f) => f.contains(mask),
            Family::UniformMatroid { k } => mask.count_ones() as usize >= *k,
            Family::Graphic { edges } => {
                let vertices = graph_vertices(edges);
                let mut uf = UnionFind::<usize>::new(vertices);
                for e in ids_of(mask) {
                    uf.union(edges[e].0, edges[e].1);
                }
                let root = uf.find(0);
                (0..vertices).all(|v| uf.find(v) == root)
            }
        }
    }

    pub fn terminal_cost(&self, mask: Mask) -> T {
        match &self.terminal {
            Terminal::Zero => T::zero(),
            Terminal::FacilityLocation { distances } => {
                if mask == 0 {
                    return T::zero();
                }
                sum(distances.iter().map(|row| {
                    ids_of(mask)
                        .into_iter()
                        .map(|s| row[s].clone())
                        .reduce(min_of)
                        .expect("nonempty")
                }))
            }
        }
    }

    pub fn has_zero_terminal(&self) -> bool {
        matches!(self.terminal, Terminal::Zero)
    }

    /// Matroid whose bases are the minimal feasible sets, when recognised.
    pub fn matroid(&self) -> Option<Matroid> {
        match &self.family {
            Family::UniformMatroid { k } => Some(Matroid::Uniform { k: *k }),
            Family::Graphic { edges } => Some(Matroid::Graphic {
                edges: edges.clone(),
                vertices: graph_vertices(edges),
            }),
            Family::Explicit(f) => f.as_uniform_rank().map(|k| Matroid::Uniform { k }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_family_rejects_non_upward_closed() {
        let err = ExplicitFamily::new(2, &[vec![0], vec![1]]).unwrap_err();
        assert!(err.to_string().contains("not upward closed"), "{err}");
        assert!(ExplicitFamily::new(2, &[vec![0], vec![1], vec![0, 1]]).is_ok());
    }

    #[test]
    fn closure_of_singletons_is_rank_one() {
        let f = ExplicitFamily::upward_closure(3, &[vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(f.as_uniform_rank(), Some(1));
        assert_eq!(f.minimal_sets().len(), 3);
        let g = ExplicitFamily::upward_closure(3, &[vec![0, 1]]).unwrap();
        assert_eq!(g.as_uniform_rank(), None);
        assert!(g.contains(0b111));
        assert!(!g.contains(0b101));
    }

    #[test]
    fn explicit_rejects_empty_and_out_of_range() {
        assert!(ExplicitFamily::new(2, &[vec![]]).is_err());
        assert!(ExplicitFamily::new(2, &[vec![2]]).is_err());
    }

    #[test]
    fn graphic_feasibility() {
        let tri = vec![(0, 1), (1, 2), (0, 2)];
        let m = CombModel::<f64>::new(3, Family::Graphic { edges: tri }, Terminal::Zero).unwrap();
        assert!(m.is_feasible(0b011));
        assert!(m.is_feasible(0b111));
        assert!(!m.is_feasible(0b001));
        let mat = m.matroid().unwrap();
        assert!(mat.independent(0b011));
        assert!(!mat.independent(0b111));
    }

    #[test]
    fn disconnected_graph_is_infeasible() {
        let edges = vec![(0, 1), (2, 3)];
        assert_eq!(
            CombModel::<f64>::new(2, Family::Graphic { edges }, Terminal::Zero).unwrap_err(),
            Error::Infeasible
        );
    }

    #[test]
    fn facility_location_cost() {
        let d = vec![vec![0.0, 2.0, 5.0], vec![2.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        let m = CombModel::new(
            3,
            Family::UniformMatroid { k: 1 },
            Terminal::FacilityLocation { distances: d },
        )
        .unwrap();
        assert_eq!(m.terminal_cost(0b001), 7.0);
        assert_eq!(m.terminal_cost(0b010), 3.0);
        assert_eq!(m.terminal_cost(0b011), 1.0);
        assert_eq!(m.terminal_cost(0b111), 0.0);
    }

    #[test]
    fn uniform_rank_bounds() {
        assert!(CombModel::<f64>::new(3, Family::UniformMatroid { k: 0 }, Terminal::Zero).is_err());
        assert!(CombModel::<f64>::new(3, Family::UniformMatroid { k: 4 }, Terminal::Zero).is_err());
    }
}
