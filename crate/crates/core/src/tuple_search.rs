//! Bounded exhaustive search for S-Diophantine m-tuples.
//!
//! The fast path inverts the pair condition: instead of testing all `N^2/2`
//! products, it enumerates the S-smooth `s <= N^2 + 1` and splits each `s - 1`
//! into divisor pairs `a * b` with `a < b <= N`. Those pairs are the edges of a
//! compatibility graph, and m-tuples are its m-cliques. [`brute_force_tuples`]
//! is an independent oracle that never touches the graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::thread;

use num_integer::Roots;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::smooth::{enumerate_smooth, is_smooth, PrimeSet};
use crate::DEFAULT_BUDGET;

/// Largest supported tuple size.
pub const MAX_TUPLE_SIZE: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TupleError {
    #[error("a tuple needs at least two elements, got {0}")]
    TooShort(usize),
    #[error("tuple elements must be positive")]
    ZeroElement,
    #[error("tuple elements must be strictly increasing")]
    NotIncreasing,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("tuple size must be in 2..={MAX_TUPLE_SIZE}, got {0}")]
    TupleSize(usize),
    #[error("max element {max} is smaller than tuple size {size}")]
    BoundTooSmall { max: u64, size: usize },
    #[error("max element {0} exceeds 2^32 - 1")]
    BoundTooLarge(u64),
    #[error("partitions must be at least 1")]
    NoPartitions,
    #[error("search needs {needed} steps, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
}

/// Strictly increasing list of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Tuple(Vec<u64>);

impl Tuple {
    pub fn new(elements: Vec<u64>) -> Result<Self, TupleError> {
        if elements.len() < 2 {
            return Err(TupleError::TooShort(elements.len()));
        }
        if elements[0] == 0 {
            return Err(TupleError::ZeroElement);
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TupleError::NotIncreasing);
        }
        Ok(Self(elements))
    }

    pub fn elements(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_element(&self) -> u64 {
        *self.0.last().expect("tuples are non-empty")
    }

    /// All sub-tuples of size `k`, lexicographic.
    pub fn sub_tuples(&self, k: usize) -> Vec<Tuple> {
        let mut out = Vec::new();
        let mut pick = Vec::with_capacity(k);
        fn rec(src: &[u64], start: usize, k: usize, pick: &mut Vec<u64>, out: &mut Vec<Tuple>) {
            if pick.len() == k {
                out.push(Tuple(pick.clone()));
                return;
            }
            for i in start..src.len() {
                pick.push(src[i]);
                rec(src, i + 1, k, pick, out);
                pick.pop();
            }
        }
        if k >= 2 {
            rec(&self.0, 0, k, &mut pick, &mut out);
        }
        out
    }
}

impl<'de> Deserialize<'de> for Tuple {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        Tuple::new(Vec::deserialize(de)?).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// True iff every `a_i * a_j + 1` (i < j) is S-smooth.
pub fn is_s_diophantine(t: &Tuple, set: &PrimeSet) -> bool {
    let e = t.elements();
    e.iter().enumerate().all(|(i, &a)| {
        e[i + 1..]
            .iter()
            .all(|&b| is_smooth(&(a as u128 * b as u128 + 1), set).expect("a*b+1 is positive"))
    })
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub prime_set: PrimeSet,
    pub max_element: u64,
    pub tuple_size: usize,
    pub partitions: usize,
    /// Ceiling on trial-division steps (graph build) or candidate checks (oracle).
    pub budget: u64,
}

impl SearchConfig {
    pub fn new(prime_set: PrimeSet, max_element: u64, tuple_size: usize) -> Result<Self, SearchError> {
        let cfg = Self { prime_set, max_element, tuple_size, partitions: 1, budget: DEFAULT_BUDGET };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_partitions(mut self, partitions: usize) -> Result<Self, SearchError> {
        self.partitions = partitions;
        self.validate()?;
        Ok(self)
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if !(2..=MAX_TUPLE_SIZE).contains(&self.tuple_size) {
            return Err(SearchError::TupleSize(self.tuple_size));
        }
        if self.max_element < self.tuple_size as u64 {
            return Err(SearchError::BoundTooSmall { max: self.max_element, size: self.tuple_size });
        }
        // keeps N^2 + 1 inside u64
        if self.max_element > u32::MAX as u64 {
            return Err(SearchError::BoundTooLarge(self.max_element));
        }
        if self.partitions == 0 {
            return Err(SearchError::NoPartitions);
        }
        Ok(())
    }
}

/// Graph on `[1, N]` with an edge `{a, b}` iff `a*b + 1` is S-smooth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityGraph {
    bound: u64,
    edges: BTreeSet<(u64, u64)>,
}

impl CompatibilityGraph {
    /// Builds from raw pairs; each pair is stored as `(min, max)`, loops dropped.
    pub fn from_edges(bound: u64, pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let edges = pairs
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        Self { bound, edges }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn edges(&self) -> &BTreeSet<(u64, u64)> {
        &self.edges
    }

    pub fn has_edge(&self, a: u64, b: u64) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// For each vertex, its strictly larger neighbours in ascending order.
    pub fn forward_adjacency(&self) -> BTreeMap<u64, Vec<u64>> {
        let mut adj: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for &(a, b) in &self.edges {
            adj.entry(a).or_default().push(b);
        }
        adj
    }

    /// All m-cliques as ascending tuples, in lexicographic order.
    pub fn cliques(&self, m: usize) -> Vec<Tuple> {
        let adj = self.forward_adjacency();
        let mut out = Vec::new();
        let mut clique = Vec::with_capacity(m);
        for (&v, nbrs) in &adj {
            clique.push(v);
            extend_clique(&adj, &mut clique, nbrs, m, &mut out);
            clique.pop();
        }
        out
    }
}

fn extend_clique(
    adj: &BTreeMap<u64, Vec<u64>>,
    clique: &mut Vec<u64>,
    candidates: &[u64],
    m: usize,
    out: &mut Vec<Tuple>,
) {
    if clique.len() == m {
        out.push(Tuple(clique.clone()));
        return;
    }
    let needed = m - clique.len();
    for (i, &v) in candidates.iter().enumerate() {
        if candidates.len() - i < needed {
            break;
        }
        let next = match adj.get(&v) {
            Some(nbrs) => intersect_sorted(&candidates[i + 1..], nbrs),
            None => Vec::new(),
        };
        clique.push(v);
        extend_clique(adj, clique, &next, m, out);
        clique.pop();
    }
}

fn intersect_sorted(a: &[u64], b: &[u64]) -> Vec<u64> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Smooth `s` with `3 <= s <= N^2 + 1`: the only possible values of `ab + 1`.
fn candidate_products(set: &PrimeSet, n: u64) -> Vec<u64> {
    let limit = n * n + 1;
    enumerate_smooth(set, limit).into_iter().filter(|&s| s >= 3).collect()
}

/// Range of `a` with `a * b = s - 1`, `a < b <= n`: `ceil((s-1)/n) ..= isqrt(s-2)`.
fn divisor_window(s: u64, n: u64) -> (u64, u64) {
    let m = s - 1;
    let lo = m.div_ceil(n).max(1);
    // a < b  <=>  a^2 < m
    let hi = (m - 1).sqrt();
    (lo, hi)
}

fn trial_division_cost(products: &[u64], n: u64) -> u64 {
    products
        .iter()
        .map(|&s| {
            let (lo, hi) = divisor_window(s, n);
            hi.saturating_sub(lo) + u64::from(hi >= lo)
        })
        .fold(0u64, u64::saturating_add)
}

fn divisor_pairs(products: &[u64], n: u64) -> Vec<(u64, u64)> {
    let mut pairs = Vec::new();
    for &s in products {
        let m = s - 1;
        let (lo, hi) = divisor_window(s, n);
        for a in lo..=hi {
            if m % a == 0 {
                pairs.push((a, m / a));
            }
        }
    }
    pairs
}

/// Compatibility graph on `[1, n]`, built smooth-first on one thread.
pub fn build_edges(set: &PrimeSet, n: u64) -> CompatibilityGraph {
    build_edges_partitioned(set, n, 1)
}

/// Same graph as [`build_edges`]; the smooth list is cut into `partitions`
/// contiguous chunks processed concurrently and merged into an ordered set.
pub fn build_edges_partitioned(set: &PrimeSet, n: u64, partitions: usize) -> CompatibilityGraph {
    let products = candidate_products(set, n);
    edges_from_products(&products, n, partitions)
}

fn edges_from_products(products: &[u64], n: u64, partitions: usize) -> CompatibilityGraph {
    let partitions = partitions.max(1);
    if partitions == 1 || products.len() < 2 {
        return CompatibilityGraph::from_edges(n, divisor_pairs(products, n));
    }
    let chunk = products.len().div_ceil(partitions);
    let parts: Vec<Vec<(u64, u64)>> = thread::scope(|scope| {
        let handles: Vec<_> = products
            .chunks(chunk)
            .map(|c| scope.spawn(move || divisor_pairs(c, n)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("edge worker panicked")).collect()
    });
    CompatibilityGraph::from_edges(n, parts.into_iter().flatten())
}

/// All S-Diophantine m-tuples with maximum element at most N, lexicographic.
pub fn find_tuples(cfg: &SearchConfig) -> Result<Vec<Tuple>, SearchError> {
    cfg.validate()?;
    let n = cfg.max_element;
    let products = candidate_products(&cfg.prime_set, n);
    let cost = trial_division_cost(&products, n);
    if cost > cfg.budget {
        return Err(SearchError::BudgetExceeded { needed: cost, budget: cfg.budget });
    }
    let graph = edges_from_products(&products, n, cfg.partitions);
    Ok(graph.cliques(cfg.tuple_size))
}

/// Direct oracle: walks increasing sequences in `[1, N]`, testing each new
/// element against every earlier one with [`is_smooth`]. Subsets sharing a
/// failing pair are rejected together.
pub fn brute_force_tuples(cfg: &SearchConfig) -> Result<Vec<Tuple>, SearchError> {
    cfg.validate()?;
    let mut state = BruteState { cfg, checks: 0, out: Vec::new(), prefix: Vec::new() };
    state.descend(1)?;
    Ok(state.out)
}

struct BruteState<'a> {
    cfg: &'a SearchConfig,
    checks: u64,
    out: Vec<Tuple>,
    prefix: Vec<u64>,
}

impl BruteState<'_> {
    fn descend(&mut self, start: u64) -> Result<(), SearchError> {
        if self.prefix.len() == self.cfg.tuple_size {
            self.out.push(Tuple(self.prefix.clone()));
            return Ok(());
        }
        for x in start..=self.cfg.max_element {
            self.checks += 1;
            if self.checks > self.cfg.budget {
                return Err(SearchError::BudgetExceeded { needed: self.checks, budget: self.cfg.budget });
            }
            let ok = self.prefix.iter().all(|&a| {
                is_smooth(&(a as u128 * x as u128 + 1), &self.cfg.prime_set).expect("positive")
            });
            if ok {
                self.prefix.push(x);
                self.descend(x + 1)?;
                self.prefix.pop();
            }
        }
        Ok(())
    }
}

/// One JSON-lines search result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleRecord {
    pub s: Vec<u64>,
    pub m: usize,
    pub n_max: u64,
    pub tuple: Tuple,
}

impl TupleRecord {
    pub fn new(cfg: &SearchConfig, tuple: Tuple) -> Self {
        Self {
            s: cfg.prime_set.primes().to_vec(),
            m: cfg.tuple_size,
            n_max: cfg.max_element,
            tuple,
        }
    }
}
