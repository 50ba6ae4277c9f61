//! Places of Q, normalized absolute values, and exact Weil heights.
//!
//! Everything here is exact: the field is fixed to Q (degree 1), so every
//! normalized absolute value ‖x‖_v and every height H(x) is itself a
//! rational number. The place set of a rational is recovered by trial
//! division with a deterministic Miller-Rabin check on the cofactor.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Exact rational scalar; always lowest terms, positive denominator.
pub type Rational = num_rational::BigRational;

/// Default trial-division bound for factoring numerators and denominators.
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

/// A place of Q: the archimedean absolute value or one p-adic value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    /// The ordinary absolute value.
    Archimedean,
    /// The p-adic place for a prime p.
    Finite(u64),
}

impl Place {
    /// Construct the finite place at `p`, checking primality.
    pub fn finite(p: u64) -> Result<Self, HeightError> {
        if is_prime_u64(p) {
            Ok(Place::Finite(p))
        } else {
            Err(HeightError::NotPrime(p))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Archimedean => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeightError {
    /// Operation requires a non-zero rational.
    ZeroArgument,
    /// The given modulus is not prime.
    NotPrime(u64),
    /// A factor survived trial division and is neither 1 nor a prime below 2^64.
    FactorizationIncomplete(BigUint),
    /// String did not parse as "a" or "a/b".
    Parse(String),
}

impl fmt::Display for HeightError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeightError::ZeroArgument => write!(f, "operation requires a non-zero rational"),
            HeightError::NotPrime(p) => write!(f, "{p} is not prime"),
            HeightError::FactorizationIncomplete(c) => {
                write!(
                    f,
                    "cofactor {c} exceeds the trial-division bound and is not prime"
                )
            }
            HeightError::Parse(s) => write!(f, "malformed rational {s:?}"),
        }
    }
}

impl std::error::Error for HeightError {}

/// Parse "a" or "a/b" in decimal digits with optional leading '-' (ASCII or U+2212).
pub fn parse_rational(s: &str) -> Result<Rational, HeightError> {
    let norm: String = s.trim().replace('\u{2212}', "-");
    let err = || HeightError::Parse(s.to_string());
    let mut parts = norm.split('/');
    let numer = parts.next().ok_or_else(err)?;
    let numer = BigInt::from_str(numer.trim()).map_err(|_| err())?;
    let denom = match parts.next() {
        None => BigInt::one(),
        Some(d) => BigInt::from_str(d.trim()).map_err(|_| err())?,
    };
    if parts.next().is_some() || denom.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(numer, denom))
}

/// Deterministic Miller-Rabin for u64 (the 12-base witness set).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Factor a positive integer into prime powers.
///
/// Trial division up to `bound`, then a deterministic primality check on the
/// cofactor; a composite (or oversized) cofactor is an error rather than a
/// silent wrong answer.
pub fn factor_magnitude(n: &BigUint, bound: u64) -> Result<BTreeMap<u64, i64>, HeightError> {
    let mut out = BTreeMap::new();
    if n.is_zero() {
        return Err(HeightError::ZeroArgument);
    }
    let mut rest = n.clone();
    let one = BigUint::one();
    let mut d = 2u64;
    while rest > one {
        let dd = BigUint::from(d);
        if &dd * &dd > rest {
            break;
        }
        if d > bound {
            break;
        }
        while (&rest % &dd).is_zero() {
            *out.entry(d).or_insert(0) += 1;
            rest /= &dd;
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if rest > one {
        match rest.to_u64() {
            Some(r) if is_prime_u64(r) => {
                *out.entry(r).or_insert(0) += 1;
            }
            _ => return Err(HeightError::FactorizationIncomplete(rest)),
        }
    }
    Ok(out)
}

/// Signed prime factorization of a non-zero rational: exponents of the
/// numerator minus exponents of the denominator.
pub fn factor_rational(x: &Rational, bound: u64) -> Result<BTreeMap<u64, i64>, HeightError> {
    if x.is_zero() {
        return Err(HeightError::ZeroArgument);
    }
    let mut map = factor_magnitude(x.numer().magnitude(), bound)?;
    for (p, e) in factor_magnitude(x.denom().magnitude(), bound)? {
        *map.entry(p).or_insert(0) -= e;
    }
    map.retain(|_, e| *e != 0);
    Ok(map)
}

/// Exponent of the prime `p` in the factorization of a non-zero rational.
pub fn ord_at(x: &Rational, p: u64) -> Result<i64, HeightError> {
    if x.is_zero() {
        return Err(HeightError::ZeroArgument);
    }
    if !is_prime_u64(p) {
        return Err(HeightError::NotPrime(p));
    }
    let pb = BigInt::from(p);
    let count = |mut n: BigInt| -> i64 {
        let mut c = 0;
        while !n.is_zero() {
            let (q, r) = n.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            n = q;
            c += 1;
        }
        c
    };
    Ok(count(x.numer().clone()) - count(x.denom().clone()))
}

/// Normalized absolute value ‖x‖_v; ‖0‖_v = 0 by convention.
pub fn abs_value(x: &Rational, v: Place) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    match v {
        Place::Archimedean => x.abs(),
        Place::Finite(p) => {
            let e = ord_at(x, p).expect("non-zero checked above");
            rational_prime_power(p, -e)
        }
    }
}

/// p^e as an exact rational, e of either sign.
pub fn rational_prime_power(p: u64, e: i64) -> Rational {
    let mag = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(mag)
    } else {
        Rational::new(BigInt::one(), mag)
    }
}

/// Exact Weil height of a rational: H(a/b) = max(|a|, |b|) in lowest terms.
///
/// This agrees with the place product ∏_v max(1, ‖x‖_v); H(0) = 1.
pub fn height_scalar(x: &Rational) -> Rational {
    let n = x.numer().abs();
    let d = x.denom().abs();
    Rational::from_integer(n.max(d))
}

/// Exact Weil height of a tuple: ∏_v max(1, ‖x_1‖_v, …, ‖x_k‖_v).
///
/// Factors every coordinate, so intended for desk-scale inputs; the census
/// hot path uses [`height_vector_on_support`] with known support instead.
pub fn height_vector(xs: &[Rational]) -> Result<Rational, HeightError> {
    let mut primes: Vec<u64> = Vec::new();
    for x in xs {
        if !x.is_zero() {
            for (p, _) in factor_rational(x, DEFAULT_FACTOR_BOUND)? {
                if !primes.contains(&p) {
                    primes.push(p);
                }
            }
        }
    }
    Ok(height_vector_on_support(xs, &primes))
}

/// Tuple height assuming every coordinate is supported on `primes`.
pub fn height_vector_on_support(xs: &[Rational], primes: &[u64]) -> Rational {
    let one = Rational::one();
    let mut h = one.clone();
    // archimedean factor
    let mut arch = one.clone();
    for x in xs {
        let a = abs_value(x, Place::Archimedean);
        if a > arch {
            arch = a;
        }
    }
    h *= arch;
    for &p in primes {
        let mut best = one.clone();
        for x in xs {
            if x.is_zero() {
                continue;
            }
            let a = abs_value(x, Place::Finite(p));
            if a > best {
                best = a;
            }
        }
        h *= best;
    }
    h
}

/// The finite support of a non-zero rational: primes with ord_p(x) != 0.
pub fn support_primes(x: &Rational) -> Result<Vec<u64>, HeightError> {
    Ok(factor_rational(x, DEFAULT_FACTOR_BOUND)?
        .into_keys()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    /// Place-product oracle for scalar heights: factor the argument and take
    /// ∏ max(1, ‖x‖_v) over its support and the archimedean place.
    fn height_scalar_oracle(x: &Rational) -> Rational {
        if x.is_zero() {
            return Rational::one();
        }
        let mut h = abs_value(x, Place::Archimedean).max(Rational::one());
        for p in support_primes(x).unwrap() {
            h *= abs_value(x, Place::Finite(p)).max(Rational::one());
        }
        h
    }

    #[test]
    fn ord_examples() {
        assert_eq!(ord_at(&q("12"), 2).unwrap(), 2);
        assert_eq!(ord_at(&q("3/8"), 2).unwrap(), -3);
        assert_eq!(ord_at(&q("7/5"), 3).unwrap(), 0);
        assert_eq!(ord_at(&Rational::zero(), 2), Err(HeightError::ZeroArgument));
        assert_eq!(ord_at(&q("12"), 4), Err(HeightError::NotPrime(4)));
    }

    #[test]
    fn abs_value_examples() {
        assert_eq!(abs_value(&q("12"), Place::Finite(2)), q("1/4"));
        assert_eq!(abs_value(&q("-3/2"), Place::Archimedean), q("3/2"));
        assert_eq!(
            abs_value(&Rational::zero(), Place::Finite(5)),
            Rational::zero()
        );
    }

    #[test]
    fn height_scalar_examples() {
        assert_eq!(height_scalar(&q("3/2")), q("3"));
        assert_eq!(height_scalar(&q("1")), q("1"));
        assert_eq!(height_scalar(&q("-6/5")), q("6"));
        assert_eq!(height_scalar(&Rational::zero()), q("1"));
    }

    #[test]
    fn height_scalar_matches_place_product() {
        for s in ["3/2", "-6/5", "1", "240/77", "-1024", "1/1024", "17/19"] {
            let x = q(s);
            assert_eq!(height_scalar(&x), height_scalar_oracle(&x), "H({s})");
        }
    }

    #[test]
    fn height_vector_examples() {
        assert_eq!(height_vector(&[q("2"), q("1/2")]).unwrap(), q("4"));
        assert_eq!(height_vector(&[q("1"), q("1")]).unwrap(), q("1"));
        assert_eq!(height_vector(&[q("2"), q("3")]).unwrap(), q("3"));
    }

    #[test]
    fn product_formula_on_support() {
        for s in ["3/2", "-6/5", "240/77", "-1/1024", "12345/678"] {
            let x = q(s);
            let mut prod = abs_value(&x, Place::Archimedean);
            for p in support_primes(&x).unwrap() {
                prod *= abs_value(&x, Place::Finite(p));
            }
            assert_eq!(prod, Rational::one(), "product formula for {s}");
        }
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!(parse_rational("2//3").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("a/b").is_err());
        assert_eq!(parse_rational("\u{2212}6/5").unwrap(), q("-6/5"));
    }

    #[test]
    fn factorization_bound_and_cofactor() {
        // 2^61 - 1 is prime and beyond any sensible trial bound
        let m61 = BigUint::from((1u128 << 61) as u64 - 1);
        let f = factor_magnitude(&m61, 1000).unwrap();
        assert_eq!(f.get(&(2305843009213693951u64)), Some(&1));
        // product of two large primes is rejected rather than misfactored
        let c = BigUint::from(1_000_000_007u64) * BigUint::from(1_000_000_009u64);
        assert!(matches!(
            factor_magnitude(&c, 1000),
            Err(HeightError::FactorizationIncomplete(_))
        ));
    }

    #[test]
    fn prime_check_small_and_large() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(561)); // Carmichael
        assert!(is_prime_u64(2305843009213693951)); // 2^61 - 1
        assert!(!is_prime_u64(2305843009213693951 - 2));
    }
}
