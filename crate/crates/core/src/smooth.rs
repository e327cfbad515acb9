//! Prime sets, factorization over a prime set, and ordered enumeration of
//! S-smooth integers.
//!
//! A [`PrimeSet`] fixes the finite set `S = {p_1 < ... < p_r}`. An integer is
//! S-smooth when every prime divisor lies in `S`; 1 counts as smooth (its
//! prime support is empty). Elements of the multiplicative group generated by
//! `S` and `-1` are carried as [`SUnitValue`]s: a sign plus a signed
//! [`ExponentVector`] in prime-ascending order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmoothError {
    #[error("prime set must not be empty")]
    Empty,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("duplicate prime {0} in prime set")]
    Duplicate(u64),
    #[error("prime candidate {0} exceeds 2^64")]
    UnsupportedPrimeSize(String),
    #[error("input must be a positive integer")]
    NonPositive,
    #[error("cannot parse prime list: {0}")]
    Parse(String),
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime_u64(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            exp >>= 1;
        }
        acc
    };
    'witness: for &a in &WITNESSES {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The finite set of primes `S`, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct PrimeSet {
    primes: Vec<u64>,
}

impl PrimeSet {
    pub fn new(primes: &[u64]) -> Result<Self, SmoothError> {
        if primes.is_empty() {
            return Err(SmoothError::Empty);
        }
        let mut sorted = primes.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(SmoothError::Duplicate(w[0]));
            }
        }
        if let Some(&bad) = sorted.iter().find(|&&p| !is_prime_u64(p)) {
            return Err(SmoothError::NotPrime(bad));
        }
        Ok(Self { primes: sorted })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of primes, `r = |S|`.
    pub fn rank(&self) -> usize {
        self.primes.len()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    pub fn is_subset_of(&self, other: &PrimeSet) -> bool {
        self.primes.iter().all(|&p| other.contains(p))
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.primes.iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Parses a comma-separated list such as `"2,3,5"`.
impl FromStr for PrimeSet {
    type Err = SmoothError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut primes = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let wide: u128 = tok.parse().map_err(|_| SmoothError::Parse(tok.to_string()))?;
            let p = u64::try_from(wide).map_err(|_| SmoothError::UnsupportedPrimeSize(tok.to_string()))?;
            primes.push(p);
        }
        PrimeSet::new(&primes)
    }
}

impl<'de> Deserialize<'de> for PrimeSet {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let primes = Vec::<u64>::deserialize(de)?;
        PrimeSet::new(&primes).map_err(serde::de::Error::custom)
    }
}

/// Exponents over a prime set, in prime-ascending order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<i64>);

impl ExponentVector {
    pub fn zeros(rank: usize) -> Self {
        Self(vec![0; rank])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn max_abs(&self) -> u64 {
        self.0.iter().map(|e| e.unsigned_abs()).max().unwrap_or(0)
    }

    /// Exact value of `prod p_i^{e_i}` as a rational.
    pub fn value(&self, set: &PrimeSet) -> BigRational {
        debug_assert_eq!(self.len(), set.rank());
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for (&p, &e) in set.primes().iter().zip(&self.0) {
            let pow = BigUint::from(p).pow(e.unsigned_abs() as u32);
            if e >= 0 {
                num *= pow;
            } else {
                den *= pow;
            }
        }
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// Value as an integer; `None` when some exponent is negative.
    pub fn integer_value(&self, set: &PrimeSet) -> Option<BigUint> {
        let mut acc = BigUint::one();
        for (&p, &e) in set.primes().iter().zip(&self.0) {
            acc *= BigUint::from(p).pow(u32::try_from(e).ok()?);
        }
        Some(acc)
    }
}

/// A nonzero S-unit: `sign * prod p_i^{e_i}`.
///
/// Field order gives the canonical ordering (sign first, then exponents).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SUnitValue {
    pub sign: i8,
    #[serde(rename = "exp")]
    pub exponents: ExponentVector,
}

impl SUnitValue {
    pub fn new(sign: i8, exponents: ExponentVector) -> Self {
        assert!(sign == 1 || sign == -1, "sign must be +1 or -1");
        Self { sign, exponents }
    }

    pub fn to_rational(&self, set: &PrimeSet) -> BigRational {
        let v = self.exponents.value(set);
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }

    /// Decomposes `q` over `set`; `None` unless `q` is a nonzero S-unit.
    pub fn from_rational(q: &BigRational, set: &PrimeSet) -> Option<Self> {
        if q.is_zero() {
            return None;
        }
        let sign = if q.is_negative() { -1 } else { 1 };
        let (num_exp, num_rest) = factor_over(&q.numer().abs(), set).ok()?;
        let (den_exp, den_rest) = factor_over(&q.denom().abs(), set).ok()?;
        if !num_rest.is_one() || !den_rest.is_one() {
            return None;
        }
        let exps = num_exp.0.iter().zip(&den_exp.0).map(|(a, b)| a - b).collect();
        Some(Self { sign, exponents: ExponentVector(exps) })
    }
}

/// Splits `n = cofactor * prod p_i^{e_i}` with the cofactor coprime to `S`.
pub fn factor_over<T>(n: &T, set: &PrimeSet) -> Result<(ExponentVector, T), SmoothError>
where
    T: Integer + Clone + FromPrimitive,
{
    if *n <= T::zero() {
        return Err(SmoothError::NonPositive);
    }
    let mut rest = n.clone();
    let mut exps = Vec::with_capacity(set.rank());
    for &p in set.primes() {
        let mut e = 0i64;
        // a prime that does not fit in T is larger than n
        if let Some(pt) = T::from_u64(p) {
            loop {
                let (q, r) = rest.div_rem(&pt);
                if !r.is_zero() {
                    break;
                }
                rest = q;
                e += 1;
            }
        }
        exps.push(e);
    }
    Ok((ExponentVector(exps), rest))
}

pub fn is_smooth<T>(n: &T, set: &PrimeSet) -> Result<bool, SmoothError>
where
    T: Integer + Clone + FromPrimitive,
{
    factor_over(n, set).map(|(_, rest)| rest.is_one())
}

/// The S-free part of `n`: its largest divisor coprime to every prime in `S`.
pub fn s_free_part<T>(n: &T, set: &PrimeSet) -> Result<T, SmoothError>
where
    T: Integer + Clone + FromPrimitive,
{
    factor_over(n, set).map(|(_, rest)| rest)
}

/// `BigInt` convenience wrapper, rejecting negative inputs like the generic path.
pub fn factor_over_big(n: &BigInt, set: &PrimeSet) -> Result<(ExponentVector, BigUint), SmoothError> {
    if n.sign() != Sign::Plus {
        return Err(SmoothError::NonPositive);
    }
    let (e, rest) = factor_over(n, set)?;
    Ok((e, rest.to_biguint().expect("cofactor of a positive integer is positive")))
}

/// All S-smooth integers in `[1, limit]`, strictly ascending.
///
/// Min-heap merge seeded with 1. Each value `v` is extended only by primes at
/// least as large as the largest prime used to reach it, so every smooth
/// number is generated exactly once.
pub fn enumerate_smooth(set: &PrimeSet, limit: u64) -> Vec<u64> {
    let primes = set.primes();
    let mut out = Vec::new();
    if limit == 0 {
        return out;
    }
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((1u64, 0usize)));
    while let Some(Reverse((v, from))) = heap.pop() {
        out.push(v);
        for (i, &p) in primes.iter().enumerate().skip(from) {
            match v.checked_mul(p) {
                Some(next) if next <= limit => heap.push(Reverse((next, i))),
                // primes ascend, so larger ones overshoot too
                _ => break,
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(p: &[u64]) -> PrimeSet {
        PrimeSet::new(p).unwrap()
    }

    #[test]
    fn prime_set_construction() {
        let s = set(&[3, 2]);
        assert_eq!(s.primes(), &[2, 3]);
        assert_eq!(s.rank(), 2);
        assert_eq!(PrimeSet::new(&[2, 2]), Err(SmoothError::Duplicate(2)));
        assert_eq!(PrimeSet::new(&[4]), Err(SmoothError::NotPrime(4)));
        assert_eq!(PrimeSet::new(&[]), Err(SmoothError::Empty));
        assert_eq!(PrimeSet::new(&[1]), Err(SmoothError::NotPrime(1)));
    }

    #[test]
    fn prime_set_parsing() {
        assert_eq!("5, 2,3".parse::<PrimeSet>().unwrap().primes(), &[2, 3, 5]);
        assert!(matches!(
            "2,18446744073709551617".parse::<PrimeSet>(),
            Err(SmoothError::UnsupportedPrimeSize(_))
        ));
        assert!(matches!("2,x".parse::<PrimeSet>(), Err(SmoothError::Parse(_))));
    }

    #[test]
    fn miller_rabin_against_trial_division() {
        let naive = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..20_000u64 {
            assert_eq!(is_prime_u64(n), naive(n), "n = {n}");
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        // strong pseudoprime to bases 2..=37 except the full set
        assert!(!is_prime_u64(3_825_123_056_546_413_051));
    }

    #[test]
    fn factor_examples() {
        let (e, c) = factor_over(&40u64, &set(&[2, 5])).unwrap();
        assert_eq!((e.0, c), (vec![3, 1], 1));
        let (e, c) = factor_over(&40u64, &set(&[3])).unwrap();
        assert_eq!((e.0, c), (vec![0], 40));
        let (e, c) = factor_over(&1u64, &set(&[2, 3])).unwrap();
        assert_eq!((e.0, c), (vec![0, 0], 1));
        assert_eq!(factor_over(&0u64, &set(&[2])), Err(SmoothError::NonPositive));
        assert_eq!(factor_over(&BigInt::from(-6), &set(&[2])), Err(SmoothError::NonPositive));
    }

    #[test]
    fn smoothness_examples() {
        assert!(is_smooth(&13u64, &set(&[2, 3, 5, 7, 13])).unwrap());
        assert!(!is_smooth(&13u64, &set(&[2, 3])).unwrap());
        assert!(is_smooth(&288u64, &set(&[2, 3])).unwrap());
        assert!(is_smooth(&1u64, &set(&[2, 3])).unwrap());
        assert_eq!(is_smooth(&0u64, &set(&[2])), Err(SmoothError::NonPositive));
    }

    #[test]
    fn s_free_examples() {
        assert_eq!(s_free_part(&720u64, &set(&[2, 3])).unwrap(), 5);
        assert_eq!(s_free_part(&7u64, &set(&[7])).unwrap(), 1);
        assert_eq!(s_free_part(&1u64, &set(&[2, 3])).unwrap(), 1);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_smooth(&set(&[2, 3]), 20), vec![1, 2, 3, 4, 6, 8, 9, 12, 16, 18]);
        assert_eq!(enumerate_smooth(&set(&[2]), 10), vec![1, 2, 4, 8]);
        assert_eq!(enumerate_smooth(&set(&[2, 3, 5]), 1), vec![1]);
    }

    #[test]
    fn enumerate_near_u64_max_does_not_overflow() {
        let all = enumerate_smooth(&set(&[2]), u64::MAX);
        assert_eq!(all.len(), 64);
        assert_eq!(*all.last().unwrap(), 1 << 63);
    }

    /// Smallest-prime-factor sieve used as an independent smoothness filter.
    fn spf_smooth_filter(primes: &[u64], limit: usize) -> Vec<u64> {
        let mut spf = vec![0usize; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i;
                    }
                    j += i;
                }
            }
        }
        (1..=limit)
            .filter(|&n| {
                let mut m = n;
                while m > 1 {
                    if !primes.contains(&(spf[m] as u64)) {
                        return false;
                    }
                    m /= spf[m];
                }
                true
            })
            .map(|n| n as u64)
            .collect()
    }

    #[test]
    fn enumeration_matches_sieve_filter_up_to_a_million() {
        for primes in [&[2u64, 3, 5, 7][..], &[3, 11], &[2, 3, 5, 7, 11, 13]] {
            let s = set(primes);
            let got = enumerate_smooth(&s, 1_000_000);
            assert_eq!(got, spf_smooth_filter(primes, 1_000_000), "S = {s}");
            assert!(got.iter().all(|n| is_smooth(n, &s).unwrap()));
        }
    }

    #[test]
    fn s_unit_rational_round_trip() {
        let s = set(&[2, 3]);
        let q = BigRational::new(BigInt::from(-9), BigInt::from(8));
        let u = SUnitValue::from_rational(&q, &s).unwrap();
        assert_eq!(u.sign, -1);
        assert_eq!(u.exponents.0, vec![-3, 2]);
        assert_eq!(u.to_rational(&s), q);
        let not_unit = BigRational::new(BigInt::from(5), BigInt::from(2));
        assert!(SUnitValue::from_rational(&not_unit, &s).is_none());
        assert!(SUnitValue::from_rational(&BigRational::zero(), &s).is_none());
    }

    #[test]
    fn exponent_vector_json_is_plain_array() {
        let e = ExponentVector(vec![3, 0, -1]);
        assert_eq!(serde_json::to_string(&e).unwrap(), "[3,0,-1]");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn factor_round_trip_u128(n in 1u128..) {
            let s = set(&[2, 3, 5, 7, 11, 13]);
            let (e, rest) = factor_over(&n, &s).unwrap();
            let rebuilt = e.integer_value(&s).unwrap() * BigUint::from(rest);
            prop_assert_eq!(rebuilt, BigUint::from(n));
            for &p in s.primes() {
                prop_assert!(rest % p as u128 != 0);
            }
        }
    }

    proptest! {
        #[test]
        fn s_free_part_divides_and_is_coprime(n in 1u64..10_000_000) {
            let s = set(&[2, 5, 7]);
            let f = s_free_part(&n, &s).unwrap();
            prop_assert_eq!(n % f, 0);
            prop_assert!(s.primes().iter().all(|p| f % p != 0));
        }

        #[test]
        fn s_free_part_is_multiplicative(a in 1u64..100_000, b in 1u64..100_000) {
            let s = set(&[2, 3]);
            let ab = s_free_part(&(a * b), &s).unwrap();
            prop_assert_eq!(ab, s_free_part(&a, &s).unwrap() * s_free_part(&b, &s).unwrap());
        }

        #[test]
        fn enumeration_strictly_increasing(limit in 1u64..1_000_000_000) {
            let v = enumerate_smooth(&set(&[2, 3, 7]), limit);
            prop_assert_eq!(v[0], 1);
            prop_assert!(v.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(*v.last().unwrap() <= limit);
        }
    }
}
