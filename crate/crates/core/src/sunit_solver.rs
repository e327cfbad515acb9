//! Height-bounded exhaustive solving of S-unit equations.
//!
//! Solves `a_1 x_1 + ... + a_n x_n = 1` over S-units whose exponents all lie
//! in `[-H, H]` (a box per prime and per variable), and the homogeneous
//! sign-patterned form `sum sigma_i y_i = 0` over positive S-smooth `y_i` up
//! to projective scaling. The first `n - 1` variables range over the window
//! and the last one is solved for exactly, so a scan visits
//! `(2 (2H + 1)^r)^(n-1)` grid points (`(H + 1)^(r (n-1))` in the homogeneous
//! case). Scans larger than the budget are refused up front.

use std::collections::{BTreeMap, BTreeSet};
use std::thread;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::smooth::{ExponentVector, PrimeSet, SUnitValue};
use crate::subsum::has_vanishing_subsum;
use crate::sunit_system::normalize_projective;
use crate::DEFAULT_BUDGET;

pub const MIN_TERMS: usize = 2;
pub const MAX_TERMS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("term count must be in {MIN_TERMS}..={MAX_TERMS}, got {0}")]
    TermCount(usize),
    #[error("coefficients must be nonzero")]
    ZeroCoefficient,
    #[error("signs must be +1 or -1")]
    BadSign,
    #[error("homogeneous equations need at least 3 terms, got {0}")]
    TooFewHomogeneousTerms(usize),
    #[error("scan needs {needed} grid points, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
}

/// `a_1 x_1 + ... + a_n x_n = 1` with nonzero rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitEquation {
    coefficients: Vec<BigRational>,
    prime_set: PrimeSet,
}

impl UnitEquation {
    pub fn new(coefficients: Vec<BigRational>, prime_set: PrimeSet) -> Result<Self, SolverError> {
        if !(MIN_TERMS..=MAX_TERMS).contains(&coefficients.len()) {
            return Err(SolverError::TermCount(coefficients.len()));
        }
        if coefficients.iter().any(Zero::is_zero) {
            return Err(SolverError::ZeroCoefficient);
        }
        Ok(Self { coefficients, prime_set })
    }

    /// Integer-coefficient shorthand.
    pub fn with_integers(coefficients: &[i64], prime_set: PrimeSet) -> Result<Self, SolverError> {
        Self::new(coefficients.iter().map(|&c| BigRational::from_integer(c.into())).collect(), prime_set)
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    pub fn prime_set(&self) -> &PrimeSet {
        &self.prime_set
    }

    pub fn terms(&self) -> usize {
        self.coefficients.len()
    }
}

/// Per-prime, per-variable exponent cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HeightBound(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub x: Vec<SUnitValue>,
    pub degenerate: bool,
}

impl SolutionRecord {
    /// Signed terms `a_i x_i`.
    pub fn terms(&self, eq: &UnitEquation) -> Vec<BigRational> {
        eq.coefficients
            .iter()
            .zip(&self.x)
            .map(|(a, x)| a * x.to_rational(&eq.prime_set))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub budget: u64,
    pub partitions: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, partitions: 1 }
    }
}

/// Every exponent vector in `[lo, hi]^rank`, lexicographic.
fn exponent_box(rank: usize, lo: i64, hi: i64) -> Vec<ExponentVector> {
    let mut out = vec![ExponentVector(Vec::with_capacity(rank))];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (lo..=hi).map(move |e| {
                    let mut v = prefix.0.clone();
                    v.push(e);
                    ExponentVector(v)
                })
            })
            .collect();
    }
    out
}

/// The signed S-units inside the height window, canonical order.
pub fn window_units(set: &PrimeSet, h: HeightBound) -> Vec<SUnitValue> {
    let h = i64::from(h.0);
    let exps = exponent_box(set.rank(), -h, h);
    [-1i8, 1]
        .into_iter()
        .flat_map(|sign| exps.iter().map(move |e| SUnitValue::new(sign, e.clone())))
        .collect()
}

fn grid_size(per_variable: usize, free_vars: usize) -> u128 {
    (0..free_vars).fold(1u128, |acc, _| acc.saturating_mul(per_variable as u128))
}

fn check_budget(needed: u128, budget: u64) -> Result<(), SolverError> {
    if needed > u128::from(budget) {
        return Err(SolverError::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Visits every index tuple in `[0, radix)^len` whose first index lies in `first`.
fn for_each_index(radix: usize, len: usize, first: std::ops::Range<usize>, mut f: impl FnMut(&[usize])) {
    if len == 0 {
        if first.contains(&0) {
            f(&[]);
        }
        return;
    }
    let mut idx = vec![0usize; len];
    for head in first {
        idx[0] = head;
        idx[1..].iter_mut().for_each(|i| *i = 0);
        loop {
            f(&idx);
            let mut pos = len - 1;
            loop {
                if pos == 0 {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < radix {
                    break;
                }
                idx[pos] = 0;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
        }
    }
}

/// Splits `[0, n)` into at most `parts` contiguous ranges and runs `work` on each.
fn run_partitioned<T: Send>(
    n: usize,
    parts: usize,
    work: impl Fn(std::ops::Range<usize>) -> Vec<T> + Sync,
) -> Vec<T> {
    let parts = parts.clamp(1, n.max(1));
    if parts == 1 {
        return work(0..n);
    }
    let step = n.div_ceil(parts);
    thread::scope(|scope| {
        let handles: Vec<_> = (0..parts)
            .map(|i| {
                let r = (i * step).min(n)..((i + 1) * step).min(n);
                let work = &work;
                scope.spawn(move || work(r))
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("solver worker panicked")).collect()
    })
}

pub fn solve_affine(eq: &UnitEquation, h: HeightBound) -> Result<Vec<SolutionRecord>, SolverError> {
    solve_affine_with(eq, h, SolveOptions::default())
}

/// All solutions in the window, each with its exact degeneracy flag, sorted
/// by the `(sign, exponents)` encodings of `x_1, ..., x_n`.
pub fn solve_affine_with(
    eq: &UnitEquation,
    h: HeightBound,
    opts: SolveOptions,
) -> Result<Vec<SolutionRecord>, SolverError> {
    let set = &eq.prime_set;
    let n = eq.terms();
    let units = window_units(set, h);
    check_budget(grid_size(units.len(), n - 1), opts.budget)?;

    let values: Vec<BigRational> = units.iter().map(|u| u.to_rational(set)).collect();
    // a_i * u for every free variable i and window unit u
    let scaled: Vec<Vec<BigRational>> = eq.coefficients[..n - 1]
        .iter()
        .map(|a| values.iter().map(|v| a * v).collect())
        .collect();
    let last = &eq.coefficients[n - 1];
    let one = BigRational::one();
    let cap = u64::from(h.0);

    let first_range = if n > 1 { units.len() } else { 1 };
    let mut records = run_partitioned(first_range, opts.partitions, |range| {
        let mut out = Vec::new();
        for_each_index(units.len(), n - 1, range, |idx| {
            let partial: BigRational = idx.iter().enumerate().map(|(i, &k)| &scaled[i][k]).sum();
            let rest = (&one - &partial) / last;
            let Some(xn) = SUnitValue::from_rational(&rest, set) else {
                return;
            };
            if xn.exponents.max_abs() > cap {
                return;
            }
            let mut terms: Vec<BigRational> = idx.iter().enumerate().map(|(i, &k)| scaled[i][k].clone()).collect();
            terms.push(last * &rest);
            let mut x: Vec<SUnitValue> = idx.iter().map(|&k| units[k].clone()).collect();
            x.push(xn);
            out.push(SolutionRecord { x, degenerate: has_vanishing_subsum(&terms) });
        });
        out
    });
    records.sort();
    Ok(records)
}

/// Totals over a solution list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionCounts {
    pub total: u64,
    pub nondegenerate: u64,
    /// Non-degenerate solutions counted up to the signs of the `x_i`.
    pub nondegenerate_unsigned: u64,
}

pub fn solution_counts(records: &[SolutionRecord]) -> SolutionCounts {
    let nondeg: Vec<_> = records.iter().filter(|r| !r.degenerate).collect();
    let unsigned: BTreeSet<Vec<&ExponentVector>> =
        nondeg.iter().map(|r| r.x.iter().map(|u| &u.exponents).collect()).collect();
    SolutionCounts {
        total: records.len() as u64,
        nondegenerate: nondeg.len() as u64,
        nondegenerate_unsigned: unsigned.len() as u64,
    }
}

/// Number of non-degenerate solutions inside the window.
pub fn count_nondegenerate(eq: &UnitEquation, h: HeightBound) -> Result<u64, SolverError> {
    Ok(solution_counts(&solve_affine(eq, h)?).nondegenerate)
}

/// A projective class of solutions of `sum sigma_i y_i = 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProjectiveSolution {
    /// Coordinates divided by the first one.
    pub normalized: Vec<BigRational>,
    /// The primitive positive-integer representative (gcd 1).
    pub representative: Vec<BigUint>,
    pub degenerate: bool,
}

/// Homogeneous sign-patterned solutions with every `y_i` a positive S-smooth
/// integer whose exponents lie in `[0, H]`, one entry per projective class.
pub fn solve_homogeneous_projective(
    signs: &[i8],
    set: &PrimeSet,
    h: HeightBound,
    opts: SolveOptions,
) -> Result<Vec<ProjectiveSolution>, SolverError> {
    let n = signs.len();
    if n < 3 {
        return Err(SolverError::TooFewHomogeneousTerms(n));
    }
    if n > MAX_TERMS {
        return Err(SolverError::TermCount(n));
    }
    if signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(SolverError::BadSign);
    }
    let exps = exponent_box(set.rank(), 0, i64::from(h.0));
    check_budget(grid_size(exps.len(), n - 1), opts.budget)?;

    let values: Vec<BigInt> =
        exps.iter().map(|e| BigInt::from(e.integer_value(set).expect("non-negative exponents"))).collect();
    let lookup: BTreeMap<&BigInt, usize> = values.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let last_sign = BigInt::from(signs[n - 1]);

    let hits = run_partitioned(values.len(), opts.partitions, |range| {
        let mut out = Vec::new();
        for_each_index(values.len(), n - 1, range, |idx| {
            let partial: BigInt = idx.iter().enumerate().map(|(i, &k)| &values[k] * signs[i]).sum();
            // sigma_n y_n = -partial
            let yn = -partial * &last_sign;
            if let Some(&k) = lookup.get(&yn) {
                let mut full = idx.to_vec();
                full.push(k);
                out.push(full);
            }
        });
        out
    });

    let mut classes: BTreeMap<Vec<BigRational>, ProjectiveSolution> = BTreeMap::new();
    for idx in hits {
        let y: Vec<BigInt> = idx.iter().map(|&k| values[k].clone()).collect();
        let coords: Vec<BigRational> = y.iter().map(|v| BigRational::from_integer(v.clone())).collect();
        let normalized = normalize_projective(&coords).expect("positive coordinates");
        if classes.contains_key(&normalized) {
            continue;
        }
        let g = y.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let representative = y.iter().map(|v| (v / &g).to_biguint().expect("positive")).collect();
        let terms: Vec<BigInt> = y.iter().zip(signs).map(|(v, &s)| v * s).collect();
        let degenerate = has_vanishing_subsum(&terms);
        classes.insert(normalized.clone(), ProjectiveSolution { normalized, representative, degenerate });
    }
    Ok(classes.into_values().collect())
}

/// Parses a coefficient such as `3`, `-2` or `1/2`.
pub fn parse_coefficient(s: &str) -> Option<BigRational> {
    let q: BigRational = s.trim().parse().ok()?;
    (!q.is_zero()).then_some(q)
}
