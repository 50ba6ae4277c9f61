//! Exact evaluation of linear recurrence sequences u_n = Σ a_i(n)·α_i^n
//! with rational roots and polynomial coefficients, zero detection, and
//! counting of the n whose term height stays below a bound.
//!
//! Non-degeneracy over Q reduces to a finite check: the only rational roots
//! of unity are ±1, so a spec is valid exactly when no root ratio α_i/α_j
//! equals ±1. The term count is compared against log X/log H where
//! H = H(α₁, …, α_k).

use crate::census::ln_f64;
use crate::heights::{height_scalar, height_vector, Rational};
use crate::multgroup::pow_rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::fmt;

/// Scan slack: the bound N_max = ⌈(1+δ)·log X/log H⌉ + M.
pub const DEFAULT_SLACK_DELTA: f64 = 0.5;
pub const DEFAULT_SCAN_MARGIN: u64 = 64;
const MAX_DOUBLINGS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum RecurrenceError {
    /// A spec needs at least one root.
    EmptySpec,
    /// Root and coefficient lists must have equal length.
    LengthMismatch { roots: usize, polys: usize },
    /// Root α_i is zero (1-based index).
    ZeroRoot(usize),
    /// Coefficient polynomial a_i is identically zero (1-based index).
    ZeroPolynomial(usize),
    /// Counting against log X/log H requires H > 1.
    HeightOne,
    /// The height bound must satisfy X ≥ 1.
    InvalidBound,
    /// Terms beyond the scan bound still fell under the height bound after
    /// repeated doubling.
    TailUnstable { scanned: u64 },
}

impl fmt::Display for RecurrenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecurrenceError::EmptySpec => write!(f, "recurrence needs at least one root"),
            RecurrenceError::LengthMismatch { roots, polys } => {
                write!(f, "{roots} roots but {polys} coefficient polynomials")
            }
            RecurrenceError::ZeroRoot(i) => write!(f, "root {i} is zero"),
            RecurrenceError::ZeroPolynomial(i) => {
                write!(f, "coefficient polynomial {i} is identically zero")
            }
            RecurrenceError::HeightOne => {
                write!(f, "root height is 1, so log X/log H is undefined")
            }
            RecurrenceError::InvalidBound => write!(f, "height bound must be >= 1"),
            RecurrenceError::TailUnstable { scanned } => {
                write!(f, "tail check failed after scanning {scanned} terms")
            }
        }
    }
}

impl std::error::Error for RecurrenceError {}

/// Polynomial over Q, coefficients stored constant term first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    /// Build from coefficients (constant term first); trailing zeros are
    /// trimmed, so the zero polynomial has no coefficients.
    pub fn new(mut coeffs: Vec<Rational>) -> Polynomial {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: Rational) -> Polynomial {
        Polynomial::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Exact evaluation by Horner's rule.
    pub fn evaluate(&self, n: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c;
        }
        acc
    }
}

/// u_n = Σ a_i(n)·α_i^n with the root height cached.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceSpec {
    roots: Vec<Rational>,
    coeff_polys: Vec<Polynomial>,
    height: Rational,
}

impl RecurrenceSpec {
    pub fn new(
        roots: Vec<Rational>,
        coeff_polys: Vec<Polynomial>,
    ) -> Result<RecurrenceSpec, RecurrenceError> {
        if roots.is_empty() {
            return Err(RecurrenceError::EmptySpec);
        }
        if roots.len() != coeff_polys.len() {
            return Err(RecurrenceError::LengthMismatch {
                roots: roots.len(),
                polys: coeff_polys.len(),
            });
        }
        if let Some(i) = roots.iter().position(Zero::is_zero) {
            return Err(RecurrenceError::ZeroRoot(i + 1));
        }
        if let Some(i) = coeff_polys.iter().position(Polynomial::is_zero) {
            return Err(RecurrenceError::ZeroPolynomial(i + 1));
        }
        let height = height_vector(&roots).expect("roots are non-zero");
        Ok(RecurrenceSpec {
            roots,
            coeff_polys,
            height,
        })
    }

    pub fn k(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[Rational] {
        &self.roots
    }

    pub fn coeff_polys(&self) -> &[Polynomial] {
        &self.coeff_polys
    }

    /// H(α₁, …, α_k).
    pub fn height(&self) -> &Rational {
        &self.height
    }
}

/// A root-ratio degeneracy: α_i/α_j ∈ {+1, −1} (1-based pair, i < j).
#[derive(Debug, Clone, PartialEq)]
pub struct RatioViolation {
    pub i: usize,
    pub j: usize,
    pub ratio: Rational,
}

impl fmt::Display for RatioViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "roots {} and {} have ratio {}",
            self.i, self.j, self.ratio
        )
    }
}

/// Spec that passed the root-ratio check.
#[derive(Debug, Clone)]
pub struct ValidatedRecurrence {
    spec: RecurrenceSpec,
}

impl ValidatedRecurrence {
    pub fn spec(&self) -> &RecurrenceSpec {
        &self.spec
    }

    pub fn height(&self) -> &Rational {
        &self.spec.height
    }

    pub fn height_exceeds_one(&self) -> bool {
        self.spec.height > Rational::one()
    }
}

/// Accept iff no root ratio lies in {+1, −1}; violating pairs are returned
/// as data.
pub fn validate_recurrence(
    spec: RecurrenceSpec,
) -> Result<ValidatedRecurrence, Vec<RatioViolation>> {
    let mut violations = Vec::new();
    for i in 0..spec.roots.len() {
        for j in (i + 1)..spec.roots.len() {
            let ratio = &spec.roots[i] / &spec.roots[j];
            if ratio == Rational::one() || ratio == -Rational::one() {
                violations.push(RatioViolation {
                    i: i + 1,
                    j: j + 1,
                    ratio,
                });
            }
        }
    }
    if violations.is_empty() {
        Ok(ValidatedRecurrence { spec })
    } else {
        Err(violations)
    }
}

/// Exact u_n.
pub fn term_value(spec: &RecurrenceSpec, n: u64) -> Rational {
    let n_rat = Rational::from_integer(BigInt::from(n));
    spec.roots
        .iter()
        .zip(&spec.coeff_polys)
        .map(|(root, poly)| poly.evaluate(&n_rat) * pow_rational(root, n as i64))
        .sum()
}

/// All n ≤ bound with u_n = 0, by exact evaluation.
pub fn zeros_up_to(spec: &ValidatedRecurrence, bound: u64) -> Vec<u64> {
    (0..=bound)
        .into_par_iter()
        .filter(|&n| term_value(spec.spec(), n).is_zero())
        .collect()
}

/// Result of counting n with H(u_n) ≤ X.
#[derive(Debug, Clone, PartialEq)]
pub struct TermCountReport {
    pub count: u64,
    pub scan_bound: u64,
    /// count·log H/log X; absent when log X = 0.
    pub normalized_ratio: Option<f64>,
    pub doublings: usize,
}

pub fn count_bounded_terms(
    spec: &ValidatedRecurrence,
    x_bound: &Rational,
) -> Result<TermCountReport, RecurrenceError> {
    count_bounded_terms_with(spec, x_bound, DEFAULT_SLACK_DELTA, DEFAULT_SCAN_MARGIN)
}

/// Count n ≥ 0 with H(u_n) ≤ X by scanning n ≤ N_max with
/// N_max = ⌈(1+δ)·log X/log H⌉ + M. Dominant growth H^n over polynomial
/// factors justifies the cutoff; the last M terms must all exceed the bound
/// or the scan re-runs with N_max doubled (up to four times).
pub fn count_bounded_terms_with(
    spec: &ValidatedRecurrence,
    x_bound: &Rational,
    delta: f64,
    margin: u64,
) -> Result<TermCountReport, RecurrenceError> {
    if !spec.height_exceeds_one() {
        return Err(RecurrenceError::HeightOne);
    }
    if *x_bound < Rational::one() {
        return Err(RecurrenceError::InvalidBound);
    }
    let ln_x = ln_f64(x_bound).max(0.0);
    let ln_h = ln_f64(spec.height());
    let mut scan_bound = ((1.0 + delta) * ln_x / ln_h).ceil() as u64 + margin;

    for doublings in 0..=MAX_DOUBLINGS {
        let within: Vec<bool> = (0..=scan_bound)
            .into_par_iter()
            .map(|n| height_scalar(&term_value(spec.spec(), n)) <= *x_bound)
            .collect();
        let tail_start = within.len() - margin.min(scan_bound) as usize;
        if within[tail_start..].iter().any(|&w| w) {
            if doublings == MAX_DOUBLINGS {
                return Err(RecurrenceError::TailUnstable {
                    scanned: scan_bound,
                });
            }
            scan_bound *= 2;
            continue;
        }
        let count = within.iter().filter(|&&w| w).count() as u64;
        let normalized_ratio = (ln_x > 0.0).then(|| count as f64 * ln_h / ln_x);
        return Ok(TermCountReport {
            count,
            scan_bound,
            normalized_ratio,
            doublings,
        });
    }
    unreachable!("loop returns or errors on the final doubling")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn poly(coeffs: &[&str]) -> Polynomial {
        Polynomial::new(coeffs.iter().map(|s| q(s)).collect())
    }

    fn spec(roots: &[&str], polys: &[&[&str]]) -> RecurrenceSpec {
        RecurrenceSpec::new(
            roots.iter().map(|s| q(s)).collect(),
            polys.iter().map(|p| poly(p)).collect(),
        )
        .unwrap()
    }

    fn validated(roots: &[&str], polys: &[&[&str]]) -> ValidatedRecurrence {
        validate_recurrence(spec(roots, polys)).unwrap()
    }

    #[test]
    fn polynomial_basics() {
        let p = poly(&["-3", "1"]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(p.evaluate(&q("3")), q("0"));
        assert_eq!(p.evaluate(&q("5")), q("2"));
        assert!(poly(&["0", "0"]).is_zero());
        assert_eq!(poly(&["2", "1", "0"]).degree(), Some(1));
    }

    #[test]
    fn validation_examples() {
        let v = validate_recurrence(spec(&["2", "3"], &[&["1"], &["1"]])).unwrap();
        assert_eq!(*v.height(), q("3"));
        assert!(v.height_exceeds_one());

        let err = validate_recurrence(spec(&["2", "-2"], &[&["1"], &["1"]])).unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!((err[0].i, err[0].j), (1, 2));
        assert_eq!(err[0].ratio, q("-1"));

        let err = validate_recurrence(spec(&["2", "2"], &[&["1"], &["1"]])).unwrap_err();
        assert_eq!(err[0].ratio, q("1"));
    }

    #[test]
    fn spec_construction_rejects_degenerate_input() {
        assert!(matches!(
            RecurrenceSpec::new(vec![], vec![]),
            Err(RecurrenceError::EmptySpec)
        ));
        assert!(matches!(
            RecurrenceSpec::new(vec![q("0")], vec![poly(&["1"])]),
            Err(RecurrenceError::ZeroRoot(1))
        ));
        assert!(matches!(
            RecurrenceSpec::new(vec![q("2")], vec![poly(&["0"])]),
            Err(RecurrenceError::ZeroPolynomial(1))
        ));
        assert!(matches!(
            RecurrenceSpec::new(vec![q("2")], vec![]),
            Err(RecurrenceError::LengthMismatch { roots: 1, polys: 0 })
        ));
    }

    #[test]
    fn term_value_examples() {
        let s = spec(&["2", "3"], &[&["1"], &["1"]]);
        assert_eq!(term_value(&s, 4), q("97"));
        let s = spec(&["2", "1"], &[&["0", "1"], &["1"]]);
        assert_eq!(term_value(&s, 3), q("25"));
        let s = spec(&["2", "1"], &[&["1"], &["-4"]]);
        assert_eq!(term_value(&s, 2), q("0"));
    }

    #[test]
    fn zeros_examples() {
        let s = validated(&["2", "1"], &[&["1"], &["-4"]]);
        assert_eq!(zeros_up_to(&s, 50), vec![2]);
        let s = validated(&["2", "3"], &[&["1"], &["1"]]);
        assert!(zeros_up_to(&s, 50).is_empty());
        let s = validated(&["2"], &[&["-3", "1"]]);
        assert_eq!(zeros_up_to(&s, 10), vec![3]);
    }

    #[test]
    fn zeros_match_exhaustive_scan() {
        let s = validated(&["2", "1"], &[&["1"], &["-4"]]);
        let naive: Vec<u64> = (0..=50)
            .filter(|&n| term_value(s.spec(), n).is_zero())
            .collect();
        assert_eq!(zeros_up_to(&s, 50), naive);
    }

    #[test]
    fn count_examples() {
        let s = validated(&["2", "3"], &[&["1"], &["1"]]);
        let report = count_bounded_terms(&s, &q("1000")).unwrap();
        assert_eq!(report.count, 7);
        assert_eq!(report.doublings, 0);

        let s = validated(&["2", "1"], &[&["0", "1"], &["1"]]);
        assert_eq!(count_bounded_terms(&s, &q("1000")).unwrap().count, 8);
    }

    /// Boundary case H(u_n) = X: u_1 = 2 + (−1) = 1 has height exactly 1.
    #[test]
    fn count_at_bound_one() {
        let s = validated(&["2", "-1"], &[&["1"], &["1"]]);
        let report = count_bounded_terms(&s, &q("1")).unwrap();
        // oracle: scan n ≤ 64 directly
        let oracle = (0..=64u64)
            .filter(|&n| height_scalar(&term_value(s.spec(), n)) <= q("1"))
            .count() as u64;
        assert_eq!(oracle, 1);
        assert_eq!(report.count, 1);
        assert_eq!(report.normalized_ratio, None);
    }

    #[test]
    fn count_monotone_in_bound() {
        let s = validated(&["2", "3"], &[&["1"], &["1"]]);
        let mut prev = 0;
        for x in ["1", "10", "100", "1000", "100000"] {
            let c = count_bounded_terms(&s, &q(x)).unwrap().count;
            assert!(c >= prev, "monotone at X={x}");
            prev = c;
        }
    }

    /// For X = H^m the count should track m within m/2, tightening as m
    /// grows.
    #[test]
    fn count_tracks_log_ratio_at_scale() {
        let s = validated(&["2", "3"], &[&["1"], &["1"]]);
        let mut rel_errors = Vec::new();
        for m in [10u32, 20, 40] {
            let x = Rational::from_integer(BigInt::from(3).pow(m));
            let report = count_bounded_terms(&s, &x).unwrap();
            let diff = (report.count as i64 - m as i64).unsigned_abs();
            assert!(diff <= (m as u64) / 2, "m={m} count={}", report.count);
            rel_errors.push(diff as f64 / m as f64);
        }
        assert!(rel_errors[2] <= rel_errors[0]);
        assert!(rel_errors[2] <= 0.25);
        let ratio = count_bounded_terms(&s, &Rational::from_integer(BigInt::from(3).pow(40u32)))
            .unwrap()
            .normalized_ratio
            .unwrap();
        assert!((ratio - 1.0).abs() <= 0.25, "normalized ratio {ratio}");
    }

    /// k=1 with constant coefficient c > 0 and root 2: H(c·2^n) = c·2^n for
    /// integer c, so the count has a closed form.
    #[test]
    fn single_root_closed_form() {
        let s = validated(&["2"], &[&["3"]]);
        for t in [0u64, 1, 5, 12] {
            let x = q("3") * pow_rational(&q("2"), t as i64);
            let report = count_bounded_terms(&s, &x).unwrap();
            assert_eq!(report.count, t + 1, "X = 3·2^{t}");
        }
        let s = validated(&["2"], &[&["1"]]);
        let report = count_bounded_terms(&s, &q("1024")).unwrap();
        assert_eq!(report.count, 11);
    }

    #[test]
    fn count_rejects_height_one() {
        let s = validated(&["2", "-1"], &[&["1"], &["1"]]);
        assert!(s.height_exceeds_one());
        let torsion_only = validated(&["-1"], &[&["1"]]);
        assert!(matches!(
            count_bounded_terms(&torsion_only, &q("10")),
            Err(RecurrenceError::HeightOne)
        ));
    }
}
