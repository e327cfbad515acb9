//! The S-unit system attached to a quadruple `a < b < c < d`.
//!
//! With the fixed labeling
//!
//! ```text
//! s1 = ab + 1   s2 = ac + 1   s3 = ad + 1
//! s4 = bc + 1   s5 = bd + 1   s6 = cd + 1
//! ```
//!
//! the product `abcd` equals `(s1-1)(s6-1) = (s2-1)(s5-1) = (s3-1)(s4-1)`,
//! which gives two S-unit equations in the `s_i`. The first one is rewritten
//! as the six-term homogeneous equation `y1 - y2 - y3 - y4 + y5 + y6 = 0` with
//! `y = (s1 s6, s1, s6, s2 s5, s2, s5)`; its vanishing subsums are classified
//! against the four possible three-term splittings.
//!
//! Also here: recovery of the quadruple from a sextuple, projective
//! normalization, and exponent scans for `2^x - p^y = +-1` and
//! `2^a6 p^b6 = 2^a5 p^b5 + 2^a2 p^b2`.

use std::collections::HashMap;
use std::thread;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::smooth::{factor_over, is_prime_u64, ExponentVector, PrimeSet};
use crate::subsum::{mask_indices, vanishing_masks};
use crate::tuple_search::Tuple;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("expected a strictly increasing quadruple")]
    NotAQuadruple,
    #[error("sextuple entries must be positive")]
    NonPositiveEntry,
    #[error("the sextuple does not satisfy the S-unit system")]
    SystemUnsatisfied,
    #[error("projective normalization needs nonzero coordinates")]
    ZeroCoordinate,
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("positivity witness is not positive")]
    NonPositive,
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
}

/// Signs of `y1 - y2 - y3 - y4 + y5 + y6`.
pub const SIX_TERM_SIGNS: [i8; 6] = [1, -1, -1, -1, 1, 1];

/// The six shifted products of a quadruple, optionally with exponent
/// certificates over a prime set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sextuple {
    pub s: [u128; 6],
    pub certificates: Option<Vec<ExponentVector>>,
}

impl Sextuple {
    pub fn new(s: [u128; 6]) -> Result<Self, SystemError> {
        if s.contains(&0) {
            return Err(SystemError::NonPositiveEntry);
        }
        Ok(Self { s, certificates: None })
    }

    /// `s_k` with the usual one-based numbering.
    pub fn get(&self, k: usize) -> u128 {
        self.s[k - 1]
    }

    fn big(&self, k: usize) -> BigInt {
        BigInt::from(self.s[k - 1])
    }

    /// Both chains `s1<s2<s3<s5<s6` and `s1<s2<s4<s5<s6`, and every entry at least 3.
    pub fn satisfies_ordering(&self) -> bool {
        let g = |k| self.get(k);
        self.s.iter().all(|&v| v >= 3)
            && g(1) < g(2)
            && g(2) < g(3)
            && g(3) < g(5)
            && g(2) < g(4)
            && g(4) < g(5)
            && g(5) < g(6)
    }

    /// Attaches exponent certificates when every entry is S-smooth, clears them otherwise.
    pub fn certify(mut self, set: &PrimeSet) -> Self {
        let mut certs = Vec::with_capacity(6);
        for v in self.s {
            match factor_over(&v, set) {
                Ok((e, 1)) => certs.push(e),
                _ => {
                    self.certificates = None;
                    return self;
                }
            }
        }
        self.certificates = Some(certs);
        self
    }

    pub fn from_quadruple(q: &Tuple) -> Result<Self, SystemError> {
        let &[a, b, c, d] = q.elements() else {
            return Err(SystemError::NotAQuadruple);
        };
        let p = |x: u64, y: u64| x as u128 * y as u128 + 1;
        Sextuple::new([p(a, b), p(a, c), p(a, d), p(b, c), p(b, d), p(c, d)])
    }
}

/// Sextuple of `q` with certificates filled when all six entries are S-smooth.
pub fn sextuple_of(q: &Tuple, set: &PrimeSet) -> Result<Sextuple, SystemError> {
    Ok(Sextuple::from_quadruple(q)?.certify(set))
}

/// Builds a sextuple from raw elements, validating the quadruple shape first.
pub fn sextuple_of_elements(elements: &[u64], set: &PrimeSet) -> Result<Sextuple, SystemError> {
    let q = Tuple::new(elements.to_vec()).map_err(|_| SystemError::NotAQuadruple)?;
    sextuple_of(&q, set)
}

/// `s_i s_j - s_i - s_j + 1` for one labeled pair.
fn pair_product(s: &Sextuple, i: usize, j: usize) -> BigInt {
    let (x, y) = (s.big(i), s.big(j));
    &x * &y - &x - &y + 1
}

/// The common value of the three product identities, if they agree.
pub fn check_product_identities(s: &Sextuple) -> Option<BigUint> {
    let p16 = pair_product(s, 1, 6);
    let p25 = pair_product(s, 2, 5);
    let p34 = pair_product(s, 3, 4);
    (p16 == p25 && p25 == p34).then(|| p16.to_biguint()).flatten()
}

fn first_equation(s: &Sextuple) -> BigInt {
    let (s1, s2, s5, s6) = (s.big(1), s.big(2), s.big(5), s.big(6));
    &s1 * &s6 - &s1 - &s6 - &s2 * &s5 + &s2 + &s5
}

fn second_equation(s: &Sextuple) -> BigInt {
    let (s1, s3, s4, s6) = (s.big(1), s.big(3), s.big(4), s.big(6));
    &s1 * &s6 - &s1 - &s6 - &s3 * &s4 + &s3 + &s4
}

/// Both equations of the S-unit system hold exactly.
pub fn check_system(s: &Sextuple) -> bool {
    first_equation(s).is_zero() && second_equation(s).is_zero()
}

/// Positive terms `y1..y6` of the six-term equation; signs are [`SIX_TERM_SIGNS`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionVector {
    pub y: [BigInt; 6],
}

impl SolutionVector {
    pub fn signed_terms(&self) -> Vec<BigInt> {
        self.y.iter().zip(SIX_TERM_SIGNS).map(|(v, sg)| v * sg).collect()
    }

    pub fn signed_sum(&self) -> BigInt {
        self.signed_terms().into_iter().sum()
    }
}

pub fn solution_vector(s: &Sextuple) -> Result<SolutionVector, SystemError> {
    if !first_equation(s).is_zero() {
        return Err(SystemError::SystemUnsatisfied);
    }
    let (s1, s2, s5, s6) = (s.big(1), s.big(2), s.big(5), s.big(6));
    Ok(SolutionVector { y: [&s1 * &s6, s1, s6, &s2 * &s5, s2, s5] })
}

/// Vanishing pattern of the six-term equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "non_degenerate")]
    NonDegenerate,
    /// `s1 s6 - s5 s2 = s1` and `s6 = s5 + s2`
    #[serde(rename = "three_term_case_1")]
    ThreeTermCase1,
    /// `s1 s6 - s5 s2 = s6` and `s1 = s5 + s2`
    #[serde(rename = "three_term_case_2")]
    ThreeTermCase2,
    /// `s1 s6 - s5 s2 = -s2` and `s1 + s6 = s5`
    #[serde(rename = "three_term_case_3")]
    ThreeTermCase3,
    /// `s1 s6 - s5 s2 = -s5` and `s1 + s6 = s2`
    #[serde(rename = "three_term_case_4")]
    ThreeTermCase4,
    #[serde(rename = "other")]
    Other,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::NonDegenerate => "non_degenerate",
            Self::ThreeTermCase1 => "three_term_case_1",
            Self::ThreeTermCase2 => "three_term_case_2",
            Self::ThreeTermCase3 => "three_term_case_3",
            Self::ThreeTermCase4 => "three_term_case_4",
            Self::Other => "other",
        }
    }
}

/// One-based index sets of each three-term case, `y1` side first.
const THREE_TERM_CASES: [([usize; 3], [usize; 3], Classification); 4] = [
    ([1, 2, 4], [3, 5, 6], Classification::ThreeTermCase1),
    ([1, 3, 4], [2, 5, 6], Classification::ThreeTermCase2),
    ([1, 4, 5], [2, 3, 6], Classification::ThreeTermCase3),
    ([1, 4, 6], [2, 3, 5], Classification::ThreeTermCase4),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsumReport {
    /// One-based term indices, size-then-lex order.
    pub vanishing_subsets: Vec<Vec<usize>>,
    pub classification: Classification,
}

pub fn find_vanishing_subsums(v: &SolutionVector) -> SubsumReport {
    let vanishing_subsets: Vec<Vec<usize>> = vanishing_masks(&v.signed_terms())
        .into_iter()
        .map(|m| mask_indices(m).into_iter().map(|i| i + 1).collect())
        .collect();
    let classification = if vanishing_subsets.is_empty() {
        Classification::NonDegenerate
    } else {
        THREE_TERM_CASES
            .iter()
            .find(|(lhs, rhs, _)| vanishing_subsets == [lhs.to_vec(), rhs.to_vec()])
            .map_or(Classification::Other, |&(_, _, c)| c)
    };
    SubsumReport { vanishing_subsets, classification }
}

pub fn classify_degenerate(s: &Sextuple) -> Result<Classification, SystemError> {
    if !check_system(s) {
        return Err(SystemError::SystemUnsatisfied);
    }
    Ok(find_vanishing_subsums(&solution_vector(s)?).classification)
}

/// `sqrt(x * y / z)` when it is a positive integer.
fn exact_root(x: u128, y: u128, z: u128) -> Option<u64> {
    let num = BigUint::from(x) * BigUint::from(y);
    let den = BigUint::from(z);
    if den.is_zero() || !(&num % &den).is_zero() {
        return None;
    }
    let sq = num / den;
    let root = sq.sqrt();
    if &root * &root != sq || root.is_zero() {
        return None;
    }
    root.to_u64()
}

/// Inverts [`Sextuple::from_quadruple`]; `None` unless the recovered
/// quadruple reproduces all six entries.
pub fn recover_quadruple(s: &Sextuple) -> Option<Tuple> {
    if s.s.iter().any(|&v| v < 2) {
        return None;
    }
    let m = |k: usize| s.get(k) - 1;
    let a = exact_root(m(1), m(2), m(4))?;
    let b = exact_root(m(1), m(4), m(2))?;
    let c = exact_root(m(2), m(4), m(1))?;
    let d = exact_root(m(5), m(6), m(4))?;
    let q = Tuple::new(vec![a, b, c, d]).ok()?;
    (Sextuple::from_quadruple(&q).ok()?.s == s.s).then_some(q)
}

/// Divides every coordinate by the first, so the first becomes 1.
pub fn normalize_projective(v: &[BigRational]) -> Result<Vec<BigRational>, SystemError> {
    if v.is_empty() || v.iter().any(Zero::is_zero) {
        return Err(SystemError::ZeroCoordinate);
    }
    let first = v[0].clone();
    Ok(v.iter().map(|x| x / &first).collect())
}

/// The fixed right-hand side `a = s1 s6 - s1 - s6` of `s3 s4 - s3 - s4 = a`.
pub fn positivity_witness(s: &Sextuple) -> Result<BigUint, SystemError> {
    if s.get(1) < 3 {
        return Err(SystemError::Precondition("s1 must be at least 3"));
    }
    let (s1, s6) = (s.big(1), s.big(6));
    let a = &s1 * &s6 - &s1 - &s6;
    if !a.is_positive() {
        return Err(SystemError::NonPositive);
    }
    Ok(a.to_biguint().expect("positive"))
}

/// A solution of `2^x - p^y = sign`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CatalanSolution {
    pub p: u64,
    pub x: u32,
    pub y: u32,
    pub sign: i8,
}

fn require_odd_prime(p: u64) -> Result<(), SystemError> {
    if p % 2 == 0 || !is_prime_u64(p) {
        return Err(SystemError::NotOddPrime(p));
    }
    Ok(())
}

/// Every `(x, y)` in `[1, max_exp]^2` with `2^x - p^y = +-1`, sorted by `(x, y)`.
pub fn catalan_scan(p: u64, max_exp: u32) -> Result<Vec<CatalanSolution>, SystemError> {
    require_odd_prime(p)?;
    let mut out = Vec::new();
    let mut py = BigUint::one();
    for y in 1..=max_exp {
        py *= p;
        let ceiling = &py + 1u32;
        let mut two_x = BigUint::one();
        for x in 1..=max_exp {
            two_x <<= 1;
            if two_x > ceiling {
                break;
            }
            let diff = BigInt::from(two_x.clone()) - BigInt::from(py.clone());
            if diff.abs().is_one() {
                let sign = if diff.is_positive() { 1 } else { -1 };
                out.push(CatalanSolution { p, x, y, sign });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Exponents `(a6, b6, a5, b5, a2, b2)` with `2^a6 p^b6 = 2^a5 p^b5 + 2^a2 p^b2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Eq4Solution(pub [u32; 6]);

impl Eq4Solution {
    /// Reads `2^x - p^y = +-1` off the solution once common powers are divided
    /// out, when the reduced terms are exactly `1`, a pure power of 2 and a
    /// pure power of `p`.
    pub fn as_catalan(&self, p: u64) -> Option<CatalanSolution> {
        let [a6, b6, a5, b5, a2, b2] = self.0;
        let amin = a6.min(a5).min(a2);
        let bmin = b6.min(b5).min(b2);
        let terms = [(a6 - amin, b6 - bmin), (a5 - amin, b5 - bmin), (a2 - amin, b2 - bmin)];
        let one = terms.iter().position(|&t| t == (0, 0))?;
        let two = terms.iter().position(|&(a, b)| a >= 1 && b == 0)?;
        let odd = terms.iter().position(|&(a, b)| a == 0 && b >= 1)?;
        let (x, y) = (terms[two].0, terms[odd].1);
        // the lone left-hand term (index 0) is the largest
        let sign = match (one, two, odd) {
            (0, _, _) => return None,
            (_, 0, _) => 1,
            (_, _, 0) => -1,
            _ => unreachable!("three distinct positions"),
        };
        Some(CatalanSolution { p, x, y, sign })
    }
}

/// All solutions with every exponent in `[0, max_exp]`, sorted.
pub fn equation4_scan(p: u64, max_exp: u32) -> Result<Vec<Eq4Solution>, SystemError> {
    equation4_scan_partitioned(p, max_exp, 1)
}

/// [`equation4_scan`] with the `a5` range split across `partitions` workers.
pub fn equation4_scan_partitioned(p: u64, max_exp: u32, partitions: usize) -> Result<Vec<Eq4Solution>, SystemError> {
    require_odd_prime(p)?;
    let e = max_exp;
    let mut table: HashMap<BigUint, (u32, u32)> = HashMap::new();
    let mut values = vec![vec![BigUint::zero(); e as usize + 1]; e as usize + 1];
    let mut pb = BigUint::one();
    for b in 0..=e {
        for a in 0..=e {
            let v = &pb << a;
            table.insert(v.clone(), (a, b));
            values[a as usize][b as usize] = v;
        }
        pb *= p;
    }
    let scan = |a5_range: std::ops::Range<u32>| {
        let mut out = Vec::new();
        for a5 in a5_range {
            for b5 in 0..=e {
                let left = &values[a5 as usize][b5 as usize];
                for a2 in 0..=e {
                    for b2 in 0..=e {
                        let sum = left + &values[a2 as usize][b2 as usize];
                        if let Some(&(a6, b6)) = table.get(&sum) {
                            out.push(Eq4Solution([a6, b6, a5, b5, a2, b2]));
                        }
                    }
                }
            }
        }
        out
    };
    let partitions = partitions.clamp(1, e as usize + 1) as u32;
    let step = (e + 1).div_ceil(partitions);
    let ranges: Vec<_> = (0..partitions).map(|i| (i * step).min(e + 1)..((i + 1) * step).min(e + 1)).collect();
    let mut out: Vec<Eq4Solution> = if partitions == 1 {
        scan(0..e + 1)
    } else {
        thread::scope(|scope| {
            let handles: Vec<_> = ranges.iter().map(|r| scope.spawn(|| scan(r.clone()))).collect();
            handles.into_iter().flat_map(|h| h.join().expect("scan worker panicked")).collect()
        })
    };
    out.sort();
    Ok(out)
}
