//! Exact linear algebra over {log p}, height forms, and polytope constants.
//!
//! A [`LogNumber`] is an integer combination Σ c_p·log p. Unique
//! factorization makes the prime logarithms linearly independent over Q, so
//! such a value is zero exactly when every coefficient is zero; this is the
//! soundness cornerstone of the module. Non-zero signs are decided two ways:
//! interval arithmetic at escalating precision (the production route) and
//! exact integer power comparison (the oracle route, also used to evaluate
//! maxima exactly).
//!
//! On top of that sit the height form ℓ_vj of a group, the polytope
//! C(Γ) = {ξ : Σ_v max(0, ℓ_v1(ξ),…,ℓ_vk(ξ)) ≤ 1}, its volume and the
//! constant c(Γ) = |Γ_tors|·μ^r(C(Γ)), the S-regulator, and the closed-form
//! family volumes with exact side channels.

pub mod interval;
pub mod polytope;

use crate::heights::{
    factor_rational, is_prime_u64, HeightError, Place, Rational, DEFAULT_FACTOR_BOUND,
};
use crate::multgroup::{GroupDescriptor, MultGroupError};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use polytope::{Cell, MaxPlusSpec, PolytopeError};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Starting precision for interval sign determination.
pub const SIGN_START_BITS: u32 = 128;
/// Precision ceiling; reaching it on a non-zero value is an error.
pub const SIGN_MAX_BITS: u32 = 4096;
/// Sample count for the Monte Carlo volume cross-check.
pub const MC_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LogSpaceError {
    /// Interval evaluation hit the precision ceiling without excluding zero.
    PrecisionExhausted,
    /// Operation requires rank ≥ 1.
    RankZero,
    /// The prime list for a regulator or unit-group volume is empty.
    EmptyPrimeList,
    /// Vertex enumeration could not certify the decomposition.
    NumericallyDegenerate(String),
    /// Triangulated volume and Monte Carlo estimate disagree.
    CrossCheckFailed {
        triangulated: f64,
        monte_carlo: f64,
        tolerance: f64,
    },
    Height(HeightError),
    MultGroup(MultGroupError),
}

impl fmt::Display for LogSpaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogSpaceError::PrecisionExhausted => {
                write!(f, "sign undecided at maximum interval precision")
            }
            LogSpaceError::RankZero => write!(f, "group has rank 0"),
            LogSpaceError::EmptyPrimeList => write!(f, "prime list must be non-empty"),
            LogSpaceError::NumericallyDegenerate(msg) => {
                write!(f, "numerically degenerate decomposition: {msg}")
            }
            LogSpaceError::CrossCheckFailed {
                triangulated,
                monte_carlo,
                tolerance,
            } => write!(
                f,
                "volume cross-check failed: triangulation {triangulated} vs monte carlo \
                 {monte_carlo} (tolerance {tolerance})"
            ),
            LogSpaceError::Height(e) => write!(f, "{e}"),
            LogSpaceError::MultGroup(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LogSpaceError {}

impl From<HeightError> for LogSpaceError {
    fn from(e: HeightError) -> Self {
        LogSpaceError::Height(e)
    }
}

impl From<MultGroupError> for LogSpaceError {
    fn from(e: MultGroupError) -> Self {
        LogSpaceError::MultGroup(e)
    }
}

impl From<PolytopeError> for LogSpaceError {
    fn from(e: PolytopeError) -> Self {
        LogSpaceError::NumericallyDegenerate(e.to_string())
    }
}

/// Exact value Σ c_p·log p with integer coefficients and finite support.
#[derive(Debug, Clone, PartialEq, Eq, Default, PartialOrd, Ord)]
pub struct LogNumber {
    coeffs: BTreeMap<u64, BigInt>,
}

impl LogNumber {
    pub fn zero() -> Self {
        LogNumber::default()
    }

    /// log p for a prime p.
    pub fn log_prime(p: u64) -> Result<Self, LogSpaceError> {
        if !is_prime_u64(p) {
            return Err(LogSpaceError::Height(HeightError::NotPrime(p)));
        }
        let mut coeffs = BTreeMap::new();
        coeffs.insert(p, BigInt::one());
        Ok(LogNumber { coeffs })
    }

    /// log |x| for a non-zero rational, via factorization.
    pub fn log_abs(x: &Rational) -> Result<Self, LogSpaceError> {
        let mut coeffs = BTreeMap::new();
        for (p, e) in factor_rational(x, DEFAULT_FACTOR_BOUND)? {
            coeffs.insert(p, BigInt::from(e));
        }
        Ok(LogNumber { coeffs })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &BTreeMap<u64, BigInt> {
        &self.coeffs
    }

    fn insert_scaled(&mut self, other: &LogNumber, scale: &BigInt) {
        if scale.is_zero() {
            return;
        }
        for (p, c) in &other.coeffs {
            let entry = self.coeffs.entry(*p).or_insert_with(BigInt::zero);
            *entry += c * scale;
            if entry.is_zero() {
                self.coeffs.remove(p);
            }
        }
    }

    pub fn add(&self, other: &LogNumber) -> LogNumber {
        let mut out = self.clone();
        out.insert_scaled(other, &BigInt::one());
        out
    }

    pub fn sub(&self, other: &LogNumber) -> LogNumber {
        let mut out = self.clone();
        out.insert_scaled(other, &BigInt::from(-1));
        out
    }

    pub fn scaled(&self, c: i64) -> LogNumber {
        let mut out = LogNumber::zero();
        out.insert_scaled(self, &BigInt::from(c));
        out
    }

    pub fn neg(&self) -> LogNumber {
        self.scaled(-1)
    }

    /// Floating-point value, for geometry only.
    pub fn to_f64(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(p, c)| c.to_f64().unwrap_or(f64::NAN) * (*p as f64).ln())
            .sum()
    }

    /// The exact exponential ∏ p^{c_p} as a positive rational.
    pub fn exp_value(&self) -> Rational {
        let mut numer = BigInt::one();
        let mut denom = BigInt::one();
        for (p, c) in &self.coeffs {
            let e = c.magnitude().to_u32().expect("desk-scale exponent");
            let pw = BigInt::from(*p).pow(e);
            if c.is_negative() {
                denom *= pw;
            } else {
                numer *= pw;
            }
        }
        Rational::new(numer, denom)
    }

    /// Exact sign by integer power comparison: the oracle route.
    pub fn sign_exact(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let v = self.exp_value();
        match v.numer().magnitude().cmp(v.denom().magnitude()) {
            Ordering::Greater => 1,
            Ordering::Less => -1,
            Ordering::Equal => 0,
        }
    }

    /// Sign via interval evaluation at escalating precision: the production
    /// route. Exact zero is decided structurally from the coefficients.
    pub fn sign(&self) -> Result<i8, LogSpaceError> {
        if self.is_zero() {
            return Ok(0);
        }
        let mut bits = SIGN_START_BITS;
        loop {
            let mut lo = BigInt::zero();
            let mut hi = BigInt::zero();
            for (p, c) in &self.coeffs {
                let (p_lo, p_hi) = interval::ln_bounds_u64(*p, bits);
                if c.is_negative() {
                    lo += c * p_hi;
                    hi += c * p_lo;
                } else {
                    lo += c * p_lo;
                    hi += c * p_hi;
                }
            }
            if lo.is_positive() {
                return Ok(1);
            }
            if hi.is_negative() {
                return Ok(-1);
            }
            if bits >= SIGN_MAX_BITS {
                return Err(LogSpaceError::PrecisionExhausted);
            }
            bits *= 2;
        }
    }
}

impl fmt::Display for LogNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, c) in &self.coeffs {
            if first {
                write!(f, "{c}*log({p})")?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {}*log({p})", -c)?;
            } else {
                write!(f, " + {c}*log({p})")?;
            }
        }
        Ok(())
    }
}

/// Sign of an exact log-linear value; 0 only for the identically zero value.
pub fn sign_of(x: &LogNumber) -> Result<i8, LogSpaceError> {
    x.sign()
}

/// The forms ℓ_vj(z) = Σ_i z_i·log‖u_ij‖_v of a rank-r group, for v in the
/// support and j in 1..=k (ℓ_v0 ≡ 0 by convention).
#[derive(Debug, Clone)]
pub struct HeightForm {
    k: usize,
    r: usize,
    places: Vec<Place>,
    /// coeffs[v][j][i]: coefficient of z_{i+1} in ℓ_{v, j+1}
    coeffs: Vec<Vec<Vec<LogNumber>>>,
}

impl HeightForm {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    /// The r coefficients of ℓ_{v,j} for 1-based coordinate j.
    pub fn ell(&self, place_idx: usize, j: usize) -> &[LogNumber] {
        &self.coeffs[place_idx][j - 1]
    }

    /// ℓ_{v,j}(z) exactly.
    pub fn evaluate_ell(&self, place_idx: usize, j: usize, z: &[i64]) -> LogNumber {
        let mut acc = LogNumber::zero();
        for (c, &zi) in self.coeffs[place_idx][j - 1].iter().zip(z) {
            acc = acc.add(&c.scaled(zi));
        }
        acc
    }

    /// h(z) = Σ_v max(0, ℓ_v1(z),…,ℓ_vk(z)), maxima decided exactly.
    pub fn h_value(&self, z: &[i64]) -> LogNumber {
        let mut total = LogNumber::zero();
        for v in 0..self.places.len() {
            let mut best = LogNumber::zero();
            for j in 1..=self.k {
                let cand = self.evaluate_ell(v, j, z);
                if cand.sub(&best).sign_exact() > 0 {
                    best = cand;
                }
            }
            total = total.add(&best);
        }
        total
    }

    /// Floating-point geometry: per place, the distinct forms (zero form
    /// included) as coefficient rows over z.
    pub fn to_max_plus_spec(&self) -> MaxPlusSpec {
        let mut groups = Vec::with_capacity(self.places.len());
        for v in 0..self.places.len() {
            let mut seen: Vec<Vec<LogNumber>> = vec![vec![LogNumber::zero(); self.r]];
            for j in 1..=self.k {
                let form = self.coeffs[v][j - 1].clone();
                if !seen.contains(&form) {
                    seen.push(form);
                }
            }
            groups.push(
                seen.iter()
                    .map(|form| form.iter().map(LogNumber::to_f64).collect())
                    .collect(),
            );
        }
        MaxPlusSpec {
            dim: self.r,
            groups,
        }
    }
}

/// Build the height form of a rank ≥ 1 group.
pub fn height_form(desc: &GroupDescriptor) -> Result<HeightForm, LogSpaceError> {
    if desc.rank() == 0 {
        return Err(LogSpaceError::RankZero);
    }
    let places = desc.support();
    let k = desc.k();
    let r = desc.rank();
    let mut coeffs = Vec::with_capacity(places.len());
    for &v in &places {
        let mut per_place = Vec::with_capacity(k);
        for j in 0..k {
            let mut per_coord = Vec::with_capacity(r);
            for u in desc.basis() {
                let c = match v {
                    Place::Archimedean => LogNumber::log_abs(&u[j])?,
                    Place::Finite(p) => {
                        let e = crate::heights::ord_at(&u[j], p)?;
                        LogNumber::log_prime(p)?.scaled(-e)
                    }
                };
                per_coord.push(c);
            }
            per_place.push(per_coord);
        }
        coeffs.push(per_place);
    }
    // product formula, coefficient-wise: Σ_v ℓ_vj ≡ 0 for each j
    for j in 0..k {
        for i in 0..r {
            let mut sum = LogNumber::zero();
            for per_place in &coeffs {
                sum = sum.add(&per_place[j][i]);
            }
            assert!(sum.is_zero(), "product formula violated at (j={j}, i={i})");
        }
    }
    Ok(HeightForm {
        k,
        r,
        places,
        coeffs,
    })
}

/// How a volume value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeMethod {
    CellTriangulation,
    MonteCarlo,
    ClosedForm,
}

impl fmt::Display for VolumeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VolumeMethod::CellTriangulation => write!(f, "triangulation"),
            VolumeMethod::MonteCarlo => write!(f, "monte_carlo"),
            VolumeMethod::ClosedForm => write!(f, "closed_form"),
        }
    }
}

/// An exact constant of the shape rational·∏ (log p)^e.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactConstant {
    pub rational: Rational,
    pub log_powers: BTreeMap<u64, i32>,
}

impl ExactConstant {
    pub fn value_f64(&self) -> f64 {
        let mut v = self.rational.to_f64().unwrap_or(f64::NAN);
        for (&p, &e) in &self.log_powers {
            v *= (p as f64).ln().powi(e);
        }
        v
    }
}

impl fmt::Display for ExactConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rational)?;
        for (&p, &e) in &self.log_powers {
            write!(f, "·log({p})^{e}")?;
        }
        Ok(())
    }
}

/// A volume (or volume-derived constant) with its error estimate and,
/// for closed forms, an exact side channel.
#[derive(Debug, Clone)]
pub struct VolumeResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub method: VolumeMethod,
    pub cells_used: usize,
    pub exact: Option<ExactConstant>,
}

impl VolumeResult {
    fn closed_form(exact: ExactConstant) -> Self {
        VolumeResult {
            value: exact.value_f64(),
            abs_error_estimate: 0.0,
            method: VolumeMethod::ClosedForm,
            cells_used: 0,
            exact: Some(exact),
        }
    }
}

fn checked_primes(primes: &[u64]) -> Result<Vec<u64>, LogSpaceError> {
    if primes.is_empty() {
        return Err(LogSpaceError::EmptyPrimeList);
    }
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &p in &sorted {
        if !is_prime_u64(p) {
            return Err(LogSpaceError::Height(HeightError::NotPrime(p)));
        }
    }
    Ok(sorted)
}

/// S-regulator for S = {∞} ∪ primes: over Q the primes themselves are a
/// fundamental system of S-units, so R_S = ∏ log p.
pub fn regulator_s(primes: &[u64]) -> Result<VolumeResult, LogSpaceError> {
    let primes = checked_primes(primes)?;
    let log_powers = primes.iter().map(|&p| (p, 1)).collect();
    Ok(VolumeResult::closed_form(ExactConstant {
        rational: Rational::one(),
        log_powers,
    }))
}

/// Exact volume ((k+1)s)!/((ks)!·(s!)^{k+1}) of the normalized polytope E_{s,k}.
pub fn everest_volume(s: usize, k: usize) -> Rational {
    assert!(s >= 1 && k >= 1, "E_{{s,k}} needs s, k >= 1");
    let fact = |n: usize| -> BigInt {
        (1..=n)
            .map(BigInt::from)
            .product::<BigInt>()
            .max(BigInt::one())
    };
    let numer = fact((k + 1) * s);
    let denom = fact(k * s) * fact(s).pow(k as u32 + 1);
    Rational::new(numer, denom)
}

/// The polytope E_{s,k} itself, in s·k variables z_{i,j} (prime i ∈ 0..s,
/// coordinate j ∈ 0..k): each finite place contributes max(0, −z_{i,1}, …,
/// −z_{i,k}) and the archimedean place max(0, Σ_i z_{i,1}, …, Σ_i z_{i,k}).
pub fn everest_spec(s: usize, k: usize) -> MaxPlusSpec {
    assert!(s >= 1 && k >= 1);
    let dim = s * k;
    let var = |i: usize, j: usize| i * k + j;
    let mut groups = Vec::with_capacity(s + 1);
    for i in 0..s {
        let mut forms = vec![vec![0.0; dim]];
        for j in 0..k {
            let mut f = vec![0.0; dim];
            f[var(i, j)] = -1.0;
            forms.push(f);
        }
        groups.push(forms);
    }
    let mut arch = vec![vec![0.0; dim]];
    for j in 0..k {
        let mut f = vec![0.0; dim];
        for i in 0..s {
            f[var(i, j)] = 1.0;
        }
        arch.push(f);
    }
    groups.push(arch);
    MaxPlusSpec { dim, groups }
}

/// Closed form c(U_S^k) = 2^k/R_S^k · vol(E_{s,k}) with s = |primes|.
pub fn c_usk_closed(primes: &[u64], k: usize) -> Result<VolumeResult, LogSpaceError> {
    let primes = checked_primes(primes)?;
    let s = primes.len();
    let rational = Rational::from_integer(BigInt::from(2).pow(k as u32)) * everest_volume(s, k);
    let log_powers = primes.iter().map(|&p| (p, -(k as i32))).collect();
    Ok(VolumeResult::closed_form(ExactConstant {
        rational,
        log_powers,
    }))
}

/// Selector cells of C(Γ), full-dimensional only, with vertices and volumes.
pub fn cell_decomposition(desc: &GroupDescriptor) -> Result<Vec<Cell>, LogSpaceError> {
    let spec = height_form(desc)?.to_max_plus_spec();
    Ok(polytope::decompose_cells(&spec)?)
}

/// μ^r(C(Γ)) and c(Γ) = |Γ_tors|·μ^r(C(Γ)), with a seeded Monte Carlo
/// cross-check that must agree within the combined error estimates.
pub fn volume_c_gamma(
    desc: &GroupDescriptor,
) -> Result<(VolumeResult, VolumeResult), LogSpaceError> {
    volume_c_gamma_seeded(desc, polytope::DEFAULT_MC_SEED)
}

/// Like [`volume_c_gamma`], with an explicit seed for the Monte Carlo
/// cross-check sampler.
pub fn volume_c_gamma_seeded(
    desc: &GroupDescriptor,
    seed: u64,
) -> Result<(VolumeResult, VolumeResult), LogSpaceError> {
    let spec = height_form(desc)?.to_max_plus_spec();
    let cells = polytope::decompose_cells(&spec)?;
    let mu: f64 = cells.iter().map(|c| c.volume).sum();
    let tri_err = 1e-9 * mu.abs() + 1e-12;

    let bbox = polytope::bounding_box(&cells, spec.dim);
    let (mc, mc_err) = polytope::monte_carlo_volume(&spec, &bbox, MC_SAMPLES, seed);
    if (mu - mc).abs() > tri_err + mc_err {
        return Err(LogSpaceError::CrossCheckFailed {
            triangulated: mu,
            monte_carlo: mc,
            tolerance: tri_err + mc_err,
        });
    }

    let torsion = desc.torsion_order() as f64;
    let mu_result = VolumeResult {
        value: mu,
        abs_error_estimate: tri_err,
        method: VolumeMethod::CellTriangulation,
        cells_used: cells.len(),
        exact: None,
    };
    let c_result = VolumeResult {
        value: torsion * mu,
        abs_error_estimate: torsion * tri_err,
        method: VolumeMethod::CellTriangulation,
        cells_used: cells.len(),
        exact: None,
    };
    Ok((mu_result, c_result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::{height_vector, parse_rational};
    use crate::multgroup::{analyze_group, compose_element, unit_group_descriptor};

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn group(k: usize, gens: &[&[&str]]) -> GroupDescriptor {
        let gens: Vec<Vec<Rational>> = gens
            .iter()
            .map(|g| g.iter().map(|s| q(s)).collect())
            .collect();
        analyze_group(k, &gens).unwrap()
    }

    fn ln(p: u64) -> f64 {
        (p as f64).ln()
    }

    #[test]
    fn sign_examples() {
        let eight = LogNumber::log_abs(&q("8")).unwrap();
        let two = LogNumber::log_prime(2).unwrap();
        let three = LogNumber::log_prime(3).unwrap();
        assert_eq!(sign_of(&two.scaled(3).sub(&eight)).unwrap(), 0);
        assert_eq!(sign_of(&three.scaled(2).sub(&two.scaled(3))).unwrap(), 1);
        assert_eq!(sign_of(&two.sub(&three)).unwrap(), -1);
    }

    #[test]
    fn interval_sign_matches_exact_oracle() {
        let primes = [2u64, 3, 5, 7];
        for a in -4i64..=4 {
            for b in -3i64..=3 {
                for c in -2i64..=2 {
                    for d in -2i64..=2 {
                        let mut x = LogNumber::zero();
                        for (p, e) in primes.iter().zip([a, b, c, d]) {
                            x = x.add(&LogNumber::log_prime(*p).unwrap().scaled(e));
                        }
                        assert_eq!(
                            x.sign().unwrap(),
                            x.sign_exact(),
                            "sign of {a}·ln2 + {b}·ln3 + {c}·ln5 + {d}·ln7"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn exp_value_round_trips() {
        let x = LogNumber::log_abs(&q("40/27")).unwrap();
        assert_eq!(x.exp_value(), q("40/27"));
        assert_eq!(LogNumber::zero().exp_value(), q("1"));
    }

    #[test]
    fn height_form_rank_one() {
        let g = group(2, &[&["2", "1/2"]]);
        let hf = height_form(&g).unwrap();
        assert_eq!(hf.places(), &[Place::Archimedean, Place::Finite(2)]);
        let two = LogNumber::log_prime(2).unwrap();
        assert_eq!(hf.ell(0, 1), std::slice::from_ref(&two));
        assert_eq!(hf.ell(0, 2), &[two.neg()]);
        assert_eq!(hf.ell(1, 1), &[two.neg()]);
        assert_eq!(hf.ell(1, 2), std::slice::from_ref(&two));
    }

    #[test]
    fn height_form_rank_zero_rejected() {
        let g = group(2, &[&["-1", "1"]]);
        assert!(matches!(height_form(&g), Err(LogSpaceError::RankZero)));
    }

    #[test]
    fn h_value_matches_exact_height() {
        for desc in [
            group(2, &[&["2", "1/2"]]),
            unit_group_descriptor(&[2], 2).unwrap(),
            group(2, &[&["2", "3"]]),
            group(1, &[&["2/3"]]),
        ] {
            let hf = height_form(&desc).unwrap();
            let r = desc.rank();
            let mut z = vec![-3i64; r];
            loop {
                for zeta in 0..desc.torsion_order() {
                    let x = compose_element(&desc, zeta, &z).unwrap();
                    let h = height_vector(&x).unwrap();
                    assert_eq!(hf.h_value(&z).exp_value(), h, "h at {z:?}");
                }
                let mut i = 0;
                loop {
                    if i == r {
                        break;
                    }
                    z[i] += 1;
                    if z[i] <= 3 {
                        break;
                    }
                    z[i] = -3;
                    i += 1;
                }
                if i == r {
                    break;
                }
            }
        }
    }

    #[test]
    fn regulator_examples() {
        let r = regulator_s(&[2]).unwrap();
        assert!((r.value - ln(2)).abs() < 1e-12);
        assert_eq!(r.method, VolumeMethod::ClosedForm);
        let r = regulator_s(&[2, 3]).unwrap();
        assert!((r.value - ln(2) * ln(3)).abs() < 1e-12);
        assert!(matches!(
            regulator_s(&[]),
            Err(LogSpaceError::EmptyPrimeList)
        ));
        assert!(matches!(
            regulator_s(&[6]),
            Err(LogSpaceError::Height(HeightError::NotPrime(6)))
        ));
    }

    #[test]
    fn everest_closed_forms() {
        assert_eq!(everest_volume(1, 1), q("2"));
        assert_eq!(everest_volume(1, 2), q("3"));
        assert_eq!(everest_volume(2, 1), q("3"));
        assert_eq!(everest_volume(1, 3), q("4"));
        assert_eq!(everest_volume(2, 2), q("15/4"));
    }

    #[test]
    fn everest_triangulation_matches_formula() {
        for (s, k) in [(1usize, 1usize), (1, 2), (2, 1), (1, 3), (2, 2)] {
            let spec = everest_spec(s, k);
            let cells = polytope::decompose_cells(&spec).unwrap();
            let vol: f64 = cells.iter().map(|c| c.volume).sum();
            let expected = everest_volume(s, k).to_f64().unwrap();
            assert!(
                ((vol - expected) / expected).abs() < 1e-6,
                "E_({s},{k}): triangulated {vol} vs exact {expected}"
            );
        }
    }

    #[test]
    fn c_usk_examples() {
        let c = c_usk_closed(&[2], 2).unwrap();
        assert!((c.value - 12.0 / (ln(2) * ln(2))).abs() < 1e-9);
        assert!((c.value - 24.976).abs() < 1e-2);
        let c = c_usk_closed(&[2], 1).unwrap();
        assert!((c.value - 4.0 / ln(2)).abs() < 1e-9);
        let c = c_usk_closed(&[2, 3], 1).unwrap();
        assert!((c.value - 6.0 / (ln(2) * ln(3))).abs() < 1e-9);
        let exact = c.exact.unwrap();
        assert_eq!(exact.rational, q("6"));
    }

    #[test]
    fn cell_decomposition_rank_one() {
        let g = group(2, &[&["2", "1/2"]]);
        let cells = cell_decomposition(&g).unwrap();
        assert_eq!(cells.len(), 2);
        let half = 1.0 / (2.0 * ln(2));
        let mut vols: Vec<f64> = cells.iter().map(|c| c.volume).collect();
        vols.sort_by(f64::total_cmp);
        for v in vols {
            assert!((v - half).abs() < 1e-12);
        }
    }

    #[test]
    fn volume_rank_one_group() {
        let g = group(2, &[&["2", "1/2"]]);
        let (mu, c) = volume_c_gamma(&g).unwrap();
        assert!((mu.value - 1.0 / ln(2)).abs() < 1e-9);
        assert_eq!(c.value, mu.value);
        assert_eq!(mu.cells_used, 2);
    }

    #[test]
    fn volume_unit_group_matches_closed_form() {
        let g = unit_group_descriptor(&[2], 2).unwrap();
        let (mu, c) = volume_c_gamma(&g).unwrap();
        assert!((mu.value - 3.0 / (ln(2) * ln(2))).abs() < 1e-6);
        let closed = c_usk_closed(&[2], 2).unwrap();
        assert!(((c.value - closed.value) / closed.value).abs() < 1e-6);
        assert_eq!(c.cells_used, 6);
    }

    #[test]
    fn volume_rank_zero_rejected() {
        let g = group(2, &[&["-1", "1"]]);
        assert!(matches!(volume_c_gamma(&g), Err(LogSpaceError::RankZero)));
    }

    #[test]
    fn volume_results_are_deterministic() {
        let g = unit_group_descriptor(&[2], 2).unwrap();
        let (mu1, c1) = volume_c_gamma(&g).unwrap();
        let (mu2, c2) = volume_c_gamma(&g).unwrap();
        assert_eq!(mu1.value.to_bits(), mu2.value.to_bits());
        assert_eq!(c1.value.to_bits(), c2.value.to_bits());
    }

    #[test]
    fn identical_coordinate_forms_share_cells() {
        // both coordinates carry the same form, so selectors collapse
        let g = group(2, &[&["2", "2"]]);
        let cells = cell_decomposition(&g).unwrap();
        let total: f64 = cells.iter().map(|c| c.volume).sum();
        // h(z) = max(0, z·log2) + max(0, −z·log2) = |z|·log2
        assert!((total - 2.0 / ln(2)).abs() < 1e-9);
        let (mu, _) = volume_c_gamma(&g).unwrap();
        assert!((mu.value - 2.0 / ln(2)).abs() < 1e-9);
    }
}
