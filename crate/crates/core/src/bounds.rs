//! Explicit bounds on the number of non-degenerate S-unit solutions and the
//! resulting quadruple counts.
//!
//! Every bound is a product of prime-power-like factors `base^exp`, so it is
//! kept in factored form ([`PowerProduct`]) until evaluation. A [`BoundValue`]
//! pairs the exact integer (when its decimal length fits the digit budget)
//! with its natural logarithm. Logarithms of exact values are read off the
//! leading 64 bits plus the bit length, never from a floating-point power.
//!
//! Formulas, for `n >= 2`, `r >= 1`:
//!
//! ```text
//! A(2, r)        = 3 * 7^(3 + 2r)
//! B(n, r)        = (8n)^(6 n^3 (n + r))
//! A_direct(n, r) = (8n)^(4 n^4 (n + r + 1))
//! A_rec(n, r)    = 2^n * A_rec(n - 1, r) * B(n, r + 1),   A_rec(2, r) = A(2, r)
//! general(r)     = (A_rec(5, r) + A(2, r)^2) * A_rec(3, r)
//! special(r)     = A_rec(5, r) * A_rec(3, r)
//! ```

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

/// Decimal digits an exact value may have before it is dropped.
pub const DEFAULT_DIGIT_BUDGET: u64 = 1_000_000;

/// The printed pair `(c0, c1)` of the closed form `exp(c0 + c1 r)`.
pub const PRINTED_COROLLARY: (f64, f64) = (27398.0, 5126.0);
/// The printed exponent pair for the direct (non-recursive) evaluation.
pub const PRINTED_REMARK: (f64, f64) = (73801.0, 15378.0);
/// Printed majorant of `ln A_rec(3, r)`.
pub const PRINTED_A3: (f64, f64) = (2069.0, 518.8);
/// Printed majorant of `ln A_rec(5, r)`.
pub const PRINTED_A5: (f64, f64) = (25329.0, 4616.3);

const MAX_TERMS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("rank must be at least 1, got {0}")]
    Rank(u32),
    #[error("term count must be in 2..={MAX_TERMS}, got {0}")]
    Terms(u32),
    #[error("fit needs r_max >= 2, got {0}")]
    FitRange(u32),
    #[error("exponent overflow evaluating the bound")]
    Overflow,
    #[error("exact value suppressed: more than {budget} digits")]
    DigitBudgetExceeded { budget: u64 },
}

/// `prod base_i^exp_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerProduct(Vec<(u64, u64)>);

impl PowerProduct {
    pub fn power(base: u64, exp: u64) -> Self {
        Self(vec![(base, exp)])
    }

    pub fn times(mut self, other: &PowerProduct) -> Self {
        self.0.extend_from_slice(&other.0);
        self
    }

    pub fn ln(&self) -> f64 {
        self.0.iter().map(|&(b, e)| e as f64 * (b as f64).ln()).sum()
    }

    pub fn evaluate(&self) -> Result<BigUint, BoundError> {
        let mut acc = BigUint::one();
        for &(b, e) in &self.0 {
            let e = u32::try_from(e).map_err(|_| BoundError::Overflow)?;
            acc *= BigUint::from(b).pow(e);
        }
        Ok(acc)
    }
}

/// Natural log of a positive big integer from its bit length and top 64 bits.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let top = (n >> shift).to_u64().expect("at most 64 bits remain");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

fn digits_for_ln(ln: f64) -> u64 {
    (ln / std::f64::consts::LN_10).floor() as u64 + 1
}

fn relative_log_error(ln: f64) -> f64 {
    64.0 * f64::EPSILON * ln.abs().max(1.0)
}

/// An exact bound (when it fits the digit budget) with its natural log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    #[serde(serialize_with = "exact_as_string")]
    pub exact: Option<BigUint>,
    pub log_e: f64,
    /// Absolute error bound on `log_e`.
    #[serde(skip)]
    pub log_error: f64,
}

fn exact_as_string<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(n) => s.serialize_str(&n.to_str_radix(10)),
        None => s.serialize_none(),
    }
}

impl BoundValue {
    fn from_exact(n: BigUint) -> Self {
        let log_e = ln_biguint(&n);
        Self { exact: Some(n), log_e, log_error: relative_log_error(log_e) }
    }

    fn from_log(log_e: f64) -> Self {
        Self { exact: None, log_e, log_error: relative_log_error(log_e) }
    }

    /// The exact integer, or `DigitBudgetExceeded` when it was suppressed.
    pub fn require_exact(&self, budget: u64) -> Result<&BigUint, BoundError> {
        self.exact.as_ref().ok_or(BoundError::DigitBudgetExceeded { budget })
    }
}

/// Evaluates every bound under a fixed digit budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundCalculator {
    pub digit_budget: u64,
}

impl Default for BoundCalculator {
    fn default() -> Self {
        Self { digit_budget: DEFAULT_DIGIT_BUDGET }
    }
}

fn check_rank(r: u32) -> Result<(), BoundError> {
    if r == 0 {
        return Err(BoundError::Rank(r));
    }
    Ok(())
}

fn check_terms(n: u32) -> Result<(), BoundError> {
    if !(2..=MAX_TERMS).contains(&n) {
        return Err(BoundError::Terms(n));
    }
    Ok(())
}

fn checked_exponent(parts: &[u64]) -> Result<u64, BoundError> {
    parts.iter().try_fold(1u64, |acc, &p| acc.checked_mul(p)).ok_or(BoundError::Overflow)
}

impl BoundCalculator {
    pub fn with_digit_budget(digit_budget: u64) -> Self {
        Self { digit_budget }
    }

    fn value_of(&self, p: &PowerProduct) -> Result<BoundValue, BoundError> {
        let ln = p.ln();
        if digits_for_ln(ln) > self.digit_budget {
            return Ok(BoundValue::from_log(ln));
        }
        Ok(BoundValue::from_exact(p.evaluate()?))
    }

    fn product(&self, a: &BoundValue, b: &BoundValue) -> BoundValue {
        let ln = a.log_e + b.log_e;
        match (&a.exact, &b.exact) {
            (Some(x), Some(y)) if digits_for_ln(ln) <= self.digit_budget => BoundValue::from_exact(x * y),
            _ => BoundValue::from_log(ln),
        }
    }

    fn sum(&self, a: &BoundValue, b: &BoundValue) -> BoundValue {
        match (&a.exact, &b.exact) {
            (Some(x), Some(y)) => BoundValue::from_exact(x + y),
            _ => {
                let (hi, lo) = if a.log_e >= b.log_e { (a.log_e, b.log_e) } else { (b.log_e, a.log_e) };
                BoundValue::from_log(hi + (lo - hi).exp().ln_1p())
            }
        }
    }

    pub fn a2_factors(r: u32) -> Result<PowerProduct, BoundError> {
        check_rank(r)?;
        Ok(PowerProduct::power(3, 1).times(&PowerProduct::power(7, 3 + 2 * u64::from(r))))
    }

    pub fn b_factors(n: u32, r: u32) -> Result<PowerProduct, BoundError> {
        check_terms(n)?;
        check_rank(r)?;
        let n64 = u64::from(n);
        let exp = checked_exponent(&[6, n64, n64, n64, n64 + u64::from(r)])?;
        Ok(PowerProduct::power(8 * n64, exp))
    }

    pub fn a_direct_factors(n: u32, r: u32) -> Result<PowerProduct, BoundError> {
        check_terms(n)?;
        check_rank(r)?;
        let n64 = u64::from(n);
        let exp = checked_exponent(&[4, n64, n64, n64, n64, n64 + u64::from(r) + 1])?;
        Ok(PowerProduct::power(8 * n64, exp))
    }

    pub fn a_recursive_factors(n: u32, r: u32) -> Result<PowerProduct, BoundError> {
        check_terms(n)?;
        check_rank(r)?;
        let mut acc = Self::a2_factors(r)?;
        for k in 3..=n {
            acc = acc.times(&PowerProduct::power(2, u64::from(k))).times(&Self::b_factors(k, r + 1)?);
        }
        Ok(acc)
    }

    /// `A(2, r) = 3 * 7^(3 + 2r)`.
    pub fn a2(&self, r: u32) -> Result<BoundValue, BoundError> {
        self.value_of(&Self::a2_factors(r)?)
    }

    /// `B(n, r) = (8n)^(6 n^3 (n + r))`.
    pub fn b(&self, n: u32, r: u32) -> Result<BoundValue, BoundError> {
        self.value_of(&Self::b_factors(n, r)?)
    }

    /// `A(n, r) = (8n)^(4 n^4 (n + r + 1))`.
    pub fn a_direct(&self, n: u32, r: u32) -> Result<BoundValue, BoundError> {
        self.value_of(&Self::a_direct_factors(n, r)?)
    }

    /// `A(n, r)` unrolled through `2^n A(n-1, r) B(n, r+1)` down to `A(2, r)`.
    pub fn a_recursive(&self, n: u32, r: u32) -> Result<BoundValue, BoundError> {
        self.value_of(&Self::a_recursive_factors(n, r)?)
    }

    /// Quadruple count bound: `(A(5,r) + A(2,r)^2) A(3,r)`, or `A(5,r) A(3,r)`
    /// when `special` (two primes, or 2 not in S).
    pub fn theorem_bound(&self, r: u32, special: bool) -> Result<BoundValue, BoundError> {
        let a3 = self.a_recursive(3, r)?;
        let a5 = self.a_recursive(5, r)?;
        let first = if special {
            a5
        } else {
            let a2 = self.a2(r)?;
            self.sum(&a5, &self.product(&a2, &a2))
        };
        Ok(self.product(&first, &a3))
    }

    /// `(A_direct(5, r) + A(2, r)^2) A_direct(3, r)` next to the printed exponent.
    pub fn remark_direct_bound(&self, r: u32) -> Result<RemarkBound, BoundError> {
        let a2 = self.a2(r)?;
        let first = self.sum(&self.a_direct(5, r)?, &self.product(&a2, &a2));
        let value = self.product(&first, &self.a_direct(3, r)?);
        let printed_exponent = PRINTED_REMARK.0 + PRINTED_REMARK.1 * f64::from(r);
        Ok(RemarkBound { r, gap: value.log_e - printed_exponent, value, printed_exponent })
    }

    /// Smallest `c0 + c1 r` (both rounded up to one decimal) dominating
    /// `ln theorem_bound(r, false)` on `1..=r_max`, compared with the printed pair.
    pub fn fitted_corollary_constants(&self, r_max: u32) -> Result<CorollaryFit, BoundError> {
        if r_max < 2 {
            return Err(BoundError::FitRange(r_max));
        }
        let logs: Vec<f64> = (1..=r_max)
            .map(|r| self.theorem_bound(r, false).map(|v| v.log_e))
            .collect::<Result<_, _>>()?;
        let slopes: Vec<f64> = logs.windows(2).map(|w| w[1] - w[0]).collect();
        let max_slope = slopes.iter().copied().fold(f64::MIN, f64::max);
        let min_slope = slopes.iter().copied().fold(f64::MAX, f64::min);
        let round_up = |x: f64| (x * 10.0).ceil() / 10.0;
        let c1 = round_up(max_slope);
        let c0 = round_up(
            logs.iter().enumerate().map(|(i, l)| l - c1 * (i as f64 + 1.0)).fold(f64::MIN, f64::max),
        );
        let rows = logs
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let r = i as u32 + 1;
                CorollaryRow {
                    r,
                    log_theorem: l,
                    fitted_exponent: c0 + c1 * f64::from(r),
                    printed_exponent: PRINTED_COROLLARY.0 + PRINTED_COROLLARY.1 * f64::from(r),
                }
            })
            .collect();
        let slope_gap = c1 - PRINTED_COROLLARY.1;
        Ok(CorollaryFit {
            c0,
            c1,
            min_slope,
            max_slope,
            printed: PRINTED_COROLLARY,
            slope_gap,
            slope_deviates: slope_gap.abs() > 0.5,
            rows,
        })
    }

    /// Everything for one rank, ready to serialize.
    pub fn report(&self, r: u32) -> Result<BoundReport, BoundError> {
        let fit = self.fitted_corollary_constants(r.max(10))?;
        Ok(BoundReport {
            r,
            a2: self.a2(r)?,
            a3_recursive: self.a_recursive(3, r)?,
            a5_recursive: self.a_recursive(5, r)?,
            theorem_general: self.theorem_bound(r, false)?,
            theorem_special: self.theorem_bound(r, true)?,
            corollary_exponent_pair: CorollaryPair {
                fitted: (fit.c0, fit.c1),
                printed: fit.printed,
                slope_gap: fit.slope_gap,
                slope_deviates: fit.slope_deviates,
                fitted_over: (1, r.max(10)),
            },
            remark_direct: self.remark_direct_bound(r)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemarkBound {
    pub r: u32,
    pub value: BoundValue,
    pub printed_exponent: f64,
    /// `ln value - printed_exponent`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryRow {
    pub r: u32,
    pub log_theorem: f64,
    pub fitted_exponent: f64,
    pub printed_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryFit {
    pub c0: f64,
    pub c1: f64,
    pub min_slope: f64,
    pub max_slope: f64,
    pub printed: (f64, f64),
    /// `c1` minus the printed slope.
    pub slope_gap: f64,
    pub slope_deviates: bool,
    pub rows: Vec<CorollaryRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryPair {
    pub fitted: (f64, f64),
    pub printed: (f64, f64),
    pub slope_gap: f64,
    pub slope_deviates: bool,
    pub fitted_over: (u32, u32),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub r: u32,
    pub a2: BoundValue,
    pub a3_recursive: BoundValue,
    pub a5_recursive: BoundValue,
    pub theorem_general: BoundValue,
    pub theorem_special: BoundValue,
    pub corollary_exponent_pair: CorollaryPair,
    pub remark_direct: RemarkBound,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn calc() -> BoundCalculator {
        BoundCalculator::default()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn a2_examples() {
        assert_eq!(calc().a2(1).unwrap().exact, Some(50421u32.into()));
        assert_eq!(calc().a2(2).unwrap().exact, Some(2470629u32.into()));
        assert_eq!(calc().a2(0), Err(BoundError::Rank(0)));
    }

    #[test]
    fn b_examples() {
        let v = calc().b(3, 2).unwrap();
        assert_eq!(v.exact, Some(BigUint::from(24u32).pow(810)));
        assert!(close(v.log_e, 810.0 * 24f64.ln(), 1e-9));
        assert!(close(v.log_e, 2574.2236, 1e-3));
        let v = calc().b(2, 1).unwrap();
        assert_eq!(v.exact, Some(BigUint::from(16u32).pow(144)));
        assert!(close(v.log_e, 399.2528, 1e-3));
        assert!(close(calc().b(5, 3).unwrap().log_e, 22133.2767, 1e-3));
        assert_eq!(calc().b(1, 3), Err(BoundError::Terms(1)));
    }

    #[test]
    fn a_direct_examples() {
        assert_eq!(calc().a_direct(2, 1).unwrap().exact, Some(BigUint::from(16u32).pow(256)));
        assert!(close(calc().a_direct(3, 1).unwrap().log_e, 5148.4472, 1e-3));
        assert!(close(calc().a_direct(5, 1).unwrap().log_e, 64555.3904, 1e-3));
    }

    #[test]
    fn a_recursive_matches_displayed_product() {
        for r in 1..=20 {
            let lhs = calc().a_recursive(3, r).unwrap().exact.unwrap();
            let rhs = BigUint::from(8u32)
                * calc().a2(r).unwrap().exact.unwrap()
                * calc().b(3, r + 1).unwrap().exact.unwrap();
            assert_eq!(lhs, rhs, "r = {r}");
            // 8 * 3 * 7^(3+2r) * 24^(162 (4+r))
            let displayed = BigUint::from(24u32)
                * BigUint::from(7u32).pow(3 + 2 * r)
                * BigUint::from(24u32).pow(162 * (4 + r));
            assert_eq!(lhs, displayed);
        }
    }

    #[test]
    fn a_recursive_logs() {
        assert!(close(calc().a_recursive(3, 1).unwrap().log_e, 2587.1312, 1e-3));
        assert!(close(calc().a_recursive(5, 1).unwrap().log_e, 29945.0422, 1e-3));
        assert_eq!(calc().a_recursive(2, 4).unwrap(), calc().a2(4).unwrap());
    }

    #[test]
    fn log_from_exact_agrees_with_factored_log() {
        for (n, r) in [(2, 1), (3, 1), (3, 7), (4, 2), (5, 1), (5, 9)] {
            let f = BoundCalculator::a_recursive_factors(n, r).unwrap();
            let v = calc().a_recursive(n, r).unwrap();
            assert!(v.exact.is_some());
            assert!(close(v.log_e, f.ln(), 1e-6), "n={n} r={r}: {} vs {}", v.log_e, f.ln());
            assert!(v.log_error < 1e-6);
        }
    }

    #[test]
    fn ln_biguint_small_values() {
        for n in [1u64, 2, 3, 10, 50421, u64::MAX] {
            assert!(close(ln_biguint(&BigUint::from(n)), (n as f64).ln(), 1e-12));
        }
        let big = BigUint::from(3u32).pow(5000);
        assert!(close(ln_biguint(&big), 5000.0 * 3f64.ln(), 1e-8));
    }

    #[test]
    fn digit_budget_suppresses_exact_but_keeps_log() {
        let tight = BoundCalculator::with_digit_budget(1000);
        let v = tight.a_recursive(5, 1).unwrap();
        assert!(v.exact.is_none());
        assert!(close(v.log_e, calc().a_recursive(5, 1).unwrap().log_e, 1e-6));
        assert_eq!(v.require_exact(1000), Err(BoundError::DigitBudgetExceeded { budget: 1000 }));
        let t = tight.theorem_bound(1, false).unwrap();
        assert!(t.exact.is_none());
        assert!(close(t.log_e, calc().theorem_bound(1, false).unwrap().log_e, 1e-6));
    }

    #[test]
    fn default_budget_covers_rank_fifty() {
        let v = calc().a_recursive(5, 50).unwrap();
        assert!(v.exact.is_some());
    }

    #[test]
    fn theorem_examples() {
        let g1 = calc().theorem_bound(1, false).unwrap();
        assert!(close(g1.log_e, 32532.1734, 1e-3));
        let s2 = calc().theorem_bound(2, true).unwrap();
        assert!(close(s2.log_e, 37667.1487, 1e-3));
        let a5 = calc().a_recursive(5, 2).unwrap().log_e;
        let a3 = calc().a_recursive(3, 2).unwrap().log_e;
        assert!(close(s2.log_e, a5 + a3, 1e-5 * s2.log_e));
        for r in 1..=10 {
            let g = calc().theorem_bound(r, false).unwrap();
            let s = calc().theorem_bound(r, true).unwrap();
            assert!(g.exact.as_ref().unwrap() > s.exact.as_ref().unwrap());
            assert!(g.log_e >= s.log_e);
        }
    }

    #[test]
    fn corollary_fit() {
        let fit = calc().fitted_corollary_constants(10).unwrap();
        assert!(close(fit.min_slope, 5134.9753, 1e-3) && close(fit.max_slope, 5134.9753, 1e-3));
        assert_eq!(fit.c1, 5135.0);
        assert!(close(fit.c0, 27397.2, 1e-9));
        assert!(fit.slope_deviates);
        assert!(fit.rows.iter().all(|row| row.log_theorem <= row.fitted_exponent));
        assert_eq!(calc().fitted_corollary_constants(1), Err(BoundError::FitRange(1)));
    }

    #[test]
    fn remark_examples() {
        let r1 = calc().remark_direct_bound(1).unwrap();
        assert!(close(r1.value.log_e, 69703.8377, 1e-3));
        assert_eq!(r1.printed_exponent, 89179.0);
        let r2 = calc().remark_direct_bound(2).unwrap();
        assert!(close(r2.value.log_e, 79955.7257, 1e-3));
    }

    #[test]
    fn report_json_shape() {
        let report = calc().report(1).unwrap();
        let json: serde_json::Value = serde_json::to_value(&report).unwrap();
        assert_eq!(json["r"], 1);
        assert_eq!(json["a2"]["exact"], "50421");
        assert!((json["a2"]["log_e"].as_f64().unwrap() - 10.828).abs() < 1e-3);
        assert_eq!(json["corollary_exponent_pair"]["printed"][1], 5126.0);
        let tight = BoundCalculator::with_digit_budget(10).report(1).unwrap();
        assert!(serde_json::to_value(&tight).unwrap()["a5_recursive"]["exact"].is_null());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn exact_product_independent_of_grouping(
            factors in prop::collection::vec((2u64..50, 1u64..400), 2..7),
            split in 1usize..6,
        ) {
            let split = split.min(factors.len() - 1);
            let whole = PowerProduct(factors.clone()).evaluate().unwrap();
            let left = PowerProduct(factors[..split].to_vec()).evaluate().unwrap();
            let right = PowerProduct(factors[split..].to_vec()).evaluate().unwrap();
            prop_assert_eq!(&whole, &(&right * &left));
            let c = calc();
            let l = BoundValue::from_exact(left);
            let r = BoundValue::from_exact(right);
            let p = c.product(&l, &r);
            prop_assert!((p.log_e - (l.log_e + r.log_e)).abs() <= 1e-5 * p.log_e.max(1.0));
        }

        #[test]
        fn printed_majorants_hold(r in 1u32..=20) {
            let a3 = calc().a_recursive(3, r).unwrap().log_e;
            let a5 = calc().a_recursive(5, r).unwrap().log_e;
            prop_assert!(a3 <= PRINTED_A3.0 + PRINTED_A3.1 * f64::from(r));
            prop_assert!(a5 <= PRINTED_A5.0 + PRINTED_A5.1 * f64::from(r));
        }
    }
}
