//! Problem instance, hypothesis costs and the neighborhood structure used by
//! pricing.

use std::collections::HashMap;

use crate::error::InstanceError;

/// Dense observation index, `0..n_observations`.
pub type ObsId = usize;

/// Observations plus the sparse symmetric table of finite pair costs.
///
/// A pair that is not stored has cost `+inf`: the two observations can never
/// share a hypothesis. Self pairs are never stored and cost zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    n: usize,
    costs: HashMap<(ObsId, ObsId), f64>,
    adjacency: Vec<Vec<(ObsId, f64)>>,
}

impl Instance {
    /// Empty instance with `n` isolated observations.
    pub fn new(n: usize) -> Self {
        Instance {
            n,
            costs: HashMap::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    /// Builds an instance from `(a, b, theta)` triples.
    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<Self, InstanceError>
    where
        I: IntoIterator<Item = (ObsId, ObsId, f64)>,
    {
        let mut inst = Instance::new(n);
        for (a, b, theta) in pairs {
            inst.insert_pair(a, b, theta)?;
        }
        Ok(inst)
    }

    /// Stores `theta` for the unordered pair `{a, b}`.
    pub fn insert_pair(&mut self, a: ObsId, b: ObsId, theta: f64) -> Result<(), InstanceError> {
        if a >= self.n || b >= self.n {
            return Err(InstanceError::UnknownObservation(a.max(b)));
        }
        if a == b {
            return Err(InstanceError::SelfPair(a));
        }
        if !theta.is_finite() {
            return Err(InstanceError::NonFiniteCost { a, b });
        }
        let key = (a.min(b), a.max(b));
        if self.costs.contains_key(&key) {
            return Err(InstanceError::DuplicatePair { a: key.0, b: key.1 });
        }
        self.costs.insert(key, theta);
        for (x, y) in [(a, b), (b, a)] {
            let adj = &mut self.adjacency[x];
            let pos = adj.partition_point(|&(o, _)| o < y);
            adj.insert(pos, (y, theta));
        }
        Ok(())
    }

    pub fn n_observations(&self) -> usize {
        self.n
    }

    pub fn n_pairs(&self) -> usize {
        self.costs.len()
    }

    /// `Some(theta)` for a finite pair, `Some(0.0)` for a self pair, `None`
    /// when the pair is blocked.
    pub fn theta(&self, a: ObsId, b: ObsId) -> Option<f64> {
        if a == b {
            return Some(0.0);
        }
        self.costs.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn is_compatible(&self, a: ObsId, b: ObsId) -> bool {
        self.theta(a, b).is_some()
    }

    /// Finite neighbors of `d` (excluding `d`), sorted by id.
    pub fn neighbors(&self, d: ObsId) -> &[(ObsId, f64)] {
        &self.adjacency[d]
    }

    /// All stored pairs as `(a, b, theta)` with `a < b`, sorted.
    pub fn pairs(&self) -> impl Iterator<Item = (ObsId, ObsId, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(a, adj)| {
            adj.iter()
                .filter(move |&&(b, _)| b > a)
                .map(move |&(b, t)| (a, b, t))
        })
    }

    /// Copy of the instance with `shift` added to every stored cost.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = Instance::new(self.n);
        for (a, b, t) in self.pairs() {
            out.insert_pair(a, b, t + shift)
                .expect("shifting a valid instance keeps it valid");
        }
        out
    }
}

/// Cost of a hypothesis: the sum of `theta` over all ordered member pairs,
/// i.e. twice the sum over unordered pairs. The empty set costs zero.
///
/// Members are evaluated in sorted order so equal sets always produce
/// bit-identical costs.
pub fn hypothesis_cost(instance: &Instance, members: &[ObsId]) -> Result<f64, InstanceError> {
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &d in &sorted {
        if d >= instance.n_observations() {
            return Err(InstanceError::UnknownObservation(d));
        }
    }
    let mut total = 0.0;
    for (i, &a) in sorted.iter().enumerate() {
        for &b in &sorted[i + 1..] {
            match instance.theta(a, b) {
                Some(t) => total += t,
                None => return Err(InstanceError::InfeasiblePair { a, b }),
            }
        }
    }
    Ok(2.0 * total)
}

/// A feasible hypothesis with its cached cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    members: Vec<ObsId>,
    cost: f64,
    /// Per-member removal bounds, aligned with `members`. Filled in when the
    /// column enters a pool.
    pub(crate) xi: Vec<f64>,
}

impl Column {
    pub fn new(instance: &Instance, members: &[ObsId]) -> Result<Self, InstanceError> {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() {
            return Err(InstanceError::EmptyColumn);
        }
        let cost = hypothesis_cost(instance, &sorted)?;
        Ok(Column {
            members: sorted,
            cost,
            xi: Vec::new(),
        })
    }

    pub fn members(&self) -> &[ObsId] {
        &self.members
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, d: ObsId) -> bool {
        self.members.binary_search(&d).is_ok()
    }

    /// Cached removal bound of `d`, zero for non-members or before the column
    /// has been pooled.
    pub fn xi_of(&self, d: ObsId) -> f64 {
        match self.members.binary_search(&d) {
            Ok(i) => self.xi.get(i).copied().unwrap_or(0.0),
            Err(_) => 0.0,
        }
    }

    /// `(member, bound)` pairs; empty until the column has been pooled.
    pub fn xi_by_member(&self) -> impl Iterator<Item = (ObsId, f64)> + '_ {
        self.members.iter().copied().zip(self.xi.iter().copied())
    }
}

/// `D_d`: every observation that may share a hypothesis with `d`, including
/// `d` itself. Sorted by id.
pub fn neighborhood(instance: &Instance, d: ObsId) -> Vec<ObsId> {
    let mut out: Vec<ObsId> = instance.neighbors(d).iter().map(|&(o, _)| o).collect();
    let pos = out.partition_point(|&o| o < d);
    out.insert(pos, d);
    out
}

/// Unique ranks that grow with neighborhood size; ties go to the smaller id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    rank: Vec<usize>,
    order: Vec<ObsId>,
}

impl Ranking {
    pub fn rank_of(&self, d: ObsId) -> usize {
        self.rank[d]
    }

    /// Observations from lowest to highest rank.
    pub fn order(&self) -> &[ObsId] {
        &self.order
    }
}

pub fn rank(instance: &Instance) -> Ranking {
    let n = instance.n_observations();
    let mut order: Vec<ObsId> = (0..n).collect();
    order.sort_by_key(|&d| (instance.neighbors(d).len(), d));
    let mut rank = vec![0; n];
    for (r, &d) in order.iter().enumerate() {
        rank[d] = r;
    }
    Ranking { rank, order }
}

/// `D*_d`: the neighborhood of `d` restricted to observations ranked at
/// least as high as `d`. Sorted by id.
pub fn restricted_neighborhood(instance: &Instance, ranking: &Ranking, d: ObsId) -> Vec<ObsId> {
    let r = ranking.rank_of(d);
    neighborhood(instance, d)
        .into_iter()
        .filter(|&o| ranking.rank_of(o) >= r)
        .collect()
}

/// Restricted neighborhoods that are maximal under strict inclusion,
/// deduplicated, ordered by decreasing size and then by their lowest-ranked
/// observation.
pub fn nondominated_neighborhoods(instance: &Instance, ranking: &Ranking) -> Vec<Vec<ObsId>> {
    let n = instance.n_observations();
    let restricted: Vec<Vec<ObsId>> = (0..n)
        .map(|d| restricted_neighborhood(instance, ranking, d))
        .collect();

    let is_subset = |small: &[ObsId], big: &[ObsId]| {
        small.len() <= big.len() && small.iter().all(|x| big.binary_search(x).is_ok())
    };

    // D*_a ⊆ D*_b requires a ∈ D*_b, so b must be a neighbor of a with a
    // lower rank; only those candidates are checked.
    let mut keep = vec![true; n];
    for a in 0..n {
        let ra = ranking.rank_of(a);
        for &(b, _) in instance.neighbors(a) {
            if ranking.rank_of(b) > ra {
                continue;
            }
            let (sa, sb) = (&restricted[a], &restricted[b]);
            if is_subset(sa, sb) {
                keep[a] = false;
                break;
            }
        }
    }

    let mut out: Vec<(usize, Vec<ObsId>)> = (0..n)
        .filter(|&d| keep[d])
        .map(|d| (ranking.rank_of(d), restricted[d].clone()))
        .collect();
    out.sort_by(|x, y| y.1.len().cmp(&x.1.len()).then(x.0.cmp(&y.0)));
    out.dedup_by(|x, y| x.1 == y.1);
    out.into_iter().map(|(_, s)| s).collect()
}
