//! Directed-rounding fixed-point enclosures of natural logarithms.
//!
//! Values are scaled integers: a pair (lo, hi) at scale_bits b encloses the
//! real value x as lo ≤ x·2^b ≤ hi. Logarithms of integers are computed via
//! ln x = 2·atanh((x−2^e)/(x+2^e)) + e·ln 2 with the atanh series summed in
//! exact integer arithmetic, flooring each term and adding a proven tail
//! bound, so the enclosure is guaranteed rather than heuristic.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

/// Enclosure of atanh(a/b)·2^scale_bits for 0 ≤ a and 3a ≤ b.
fn atanh_bounds(a: &BigInt, b: &BigInt, scale_bits: u32) -> (BigInt, BigInt) {
    if a.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let a2 = a * a;
    let b2 = b * b;
    // num/den tracks S·a^(2j+1) / b^(2j+1)
    let mut num: BigInt = (BigInt::one() << scale_bits) * a;
    let mut den = b.clone();
    let mut j: u64 = 0;
    let mut sum = BigInt::zero();
    let mut terms: u64 = 0;
    loop {
        let term = &num / (&den * BigInt::from(2 * j + 1));
        let done = term.is_zero();
        sum += term;
        terms += 1;
        num *= &a2;
        den *= &b2;
        j += 1;
        if done {
            // remaining tail ≤ t^(2j+1)/(2j+1) · 1/(1−t²) ≤ (9/8)·t^(2j+1)/(2j+1)
            let tail = (&num * BigInt::from(9u8)) / (&den * BigInt::from(8 * (2 * j + 1))) + 1;
            let hi = &sum + BigInt::from(terms) + tail;
            return (sum, hi);
        }
    }
}

/// Enclosure of ln(2)·2^scale_bits.
pub fn ln2_bounds(scale_bits: u32) -> (BigInt, BigInt) {
    let (lo, hi) = atanh_bounds(&BigInt::one(), &BigInt::from(3u8), scale_bits);
    (lo << 1, hi << 1)
}

/// Enclosure of ln(n)·2^scale_bits for an integer n ≥ 1.
pub fn ln_bounds(n: &BigUint, scale_bits: u32) -> (BigInt, BigInt) {
    assert!(!n.is_zero(), "logarithm of a positive integer only");
    let e = n.bits() - 1;
    let pow = BigUint::one() << e;
    let a = BigInt::from(n - &pow);
    let b = BigInt::from(n + &pow);
    let (at_lo, at_hi) = atanh_bounds(&a, &b, scale_bits);
    if e == 0 {
        return (at_lo << 1, at_hi << 1);
    }
    let (l2_lo, l2_hi) = ln2_bounds(scale_bits);
    let e = BigInt::from(e);
    ((at_lo << 1) + &e * l2_lo, (at_hi << 1) + &e * l2_hi)
}

/// Enclosure of ln(p)·2^scale_bits for a u64.
pub fn ln_bounds_u64(p: u64, scale_bits: u32) -> (BigInt, BigInt) {
    ln_bounds(&BigUint::from(p), scale_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn to_float(x: &BigInt, scale_bits: u32) -> f64 {
        x.to_f64().unwrap() / (scale_bits as f64).exp2()
    }

    #[test]
    fn encloses_f64_ln() {
        for n in [2u64, 3, 5, 7, 97, 65537, 1_000_003] {
            let (lo, hi) = ln_bounds_u64(n, 96);
            assert!(lo <= hi);
            let f = (n as f64).ln();
            assert!(to_float(&lo, 96) <= f + 1e-12, "lo bound for ln {n}");
            assert!(to_float(&hi, 96) >= f - 1e-12, "hi bound for ln {n}");
            assert!(to_float(&(hi - lo), 96) < 1e-20, "width for ln {n}");
        }
    }

    #[test]
    fn ln_one_is_exact_zero() {
        let (lo, hi) = ln_bounds(&BigUint::one(), 128);
        assert!(lo.is_zero() && hi.is_zero());
    }

    #[test]
    fn powers_of_two_use_ln2() {
        let (l2_lo, l2_hi) = ln2_bounds(128);
        let (lo, hi) = ln_bounds_u64(1 << 10, 128);
        assert_eq!(lo, &l2_lo * 10);
        assert_eq!(hi, &l2_hi * 10);
    }

    /// Integer-power comparison oracle: sign(a·ln b − c·ln d) equals the
    /// exact comparison of b^a against d^c.
    #[test]
    fn sign_matches_integer_power_oracle() {
        let cases: [(u64, u32, u64, u32); 5] = [
            (3, 2, 2, 3),
            (2, 3, 3, 2),
            (2, 10, 10, 3),
            (5, 3, 11, 2),
            (7, 5, 13, 4),
        ];
        for (b, a, d, c) in cases {
            let expected = BigUint::from(b).pow(a).cmp(&BigUint::from(d).pow(c));
            let (b_lo, b_hi) = ln_bounds_u64(b, 160);
            let (d_lo, d_hi) = ln_bounds_u64(d, 160);
            let lo = &b_lo * a - &d_hi * c;
            let hi = &b_hi * a - &d_lo * c;
            let got = if lo > BigInt::zero() {
                std::cmp::Ordering::Greater
            } else if hi < BigInt::zero() {
                std::cmp::Ordering::Less
            } else {
                panic!("interval at 160 bits failed to separate {a}·ln{b} vs {c}·ln{d}");
            };
            assert_eq!(got, expected, "{a}·ln{b} vs {c}·ln{d}");
        }
    }

    #[test]
    fn tightens_with_precision() {
        let (lo64, hi64) = ln_bounds_u64(3, 64);
        let (lo256, hi256) = ln_bounds_u64(3, 256);
        let w64 = to_float(&(hi64 - lo64), 64);
        let w256 = to_float(&(hi256 - lo256), 256);
        assert!(w256 < w64 * 1e-30);
    }
}
