//! Exact censuses of group elements and linear-combination values of
//! bounded height.
//!
//! Enumeration always runs over an integer exponent box derived from the
//! scaled polytope cells (floats enter only there, and the box is enlarged
//! by a margin); every membership decision inside the box is an exact
//! big-rational comparison. Counts over disjoint sub-boxes are additive, so
//! the box is chunked across threads without affecting results.
//!
//! Counting the value set V_{Γ,a}(X) has no effective enumeration bound, so
//! its domain is heuristic: H(x) ≤ C_box·X^(1+δ), re-run with growing δ
//! until the count stabilizes, with the outcome recorded in a completeness
//! flag rather than silently trusted.

use crate::heights::{height_vector_on_support, Rational};
use crate::logspace::polytope::Cell;
use crate::logspace::{self, LogSpaceError, VolumeResult};
use crate::multgroup::{compose_element, GroupDescriptor, MultGroupError};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::fmt;

/// Domain constant for the heuristic enumeration bound.
pub const C_BOX: u64 = 1 << 10;

#[derive(Debug, Clone, PartialEq)]
pub enum CensusError {
    /// Counting requires rank ≥ 1.
    RankZero,
    /// Operation requires k ≥ 2.
    DimensionTooSmall,
    /// A coefficient a_i is zero.
    DegenerateCoefficient,
    /// All functional coefficients are zero.
    ZeroFunctional,
    /// The height bound must satisfy X ≥ 1.
    InvalidBound,
    /// A wrong-length tuple was supplied.
    WrongLength {
        expected: usize,
        got: usize,
    },
    /// Fit reports need at least three rows with increasing X.
    InsufficientData,
    /// The exponent box exceeds the supported enumeration size.
    EnumerationTooLarge {
        points: u128,
    },
    LogSpace(LogSpaceError),
    MultGroup(MultGroupError),
}

impl fmt::Display for CensusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CensusError::RankZero => write!(f, "group has rank 0"),
            CensusError::DimensionTooSmall => write!(f, "operation requires k >= 2"),
            CensusError::DegenerateCoefficient => write!(f, "coefficients must all be non-zero"),
            CensusError::ZeroFunctional => write!(f, "functional must not be identically zero"),
            CensusError::InvalidBound => write!(f, "height bound must be >= 1"),
            CensusError::WrongLength { expected, got } => {
                write!(f, "expected tuple of length {expected}, got {got}")
            }
            CensusError::InsufficientData => {
                write!(f, "need at least three rows with increasing X")
            }
            CensusError::EnumerationTooLarge { points } => {
                write!(f, "enumeration box has {points} points, beyond desk scale")
            }
            CensusError::LogSpace(e) => write!(f, "{e}"),
            CensusError::MultGroup(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CensusError {}

impl From<LogSpaceError> for CensusError {
    fn from(e: LogSpaceError) -> Self {
        CensusError::LogSpace(e)
    }
}

impl From<MultGroupError> for CensusError {
    fn from(e: MultGroupError) -> Self {
        CensusError::MultGroup(e)
    }
}

/// Knobs for the heuristic enumeration domain and parallel execution.
/// Results are independent of `parallel_chunks`.
#[derive(Debug, Clone)]
pub struct CensusConfig {
    pub slack_delta: f64,
    pub box_margin: i64,
    pub stability_rounds: usize,
    pub parallel_chunks: usize,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            slack_delta: 0.25,
            box_margin: 4,
            stability_rounds: 2,
            parallel_chunks: 8,
        }
    }
}

/// One census result at a height bound X.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusRow {
    pub x: Rational,
    pub count: u64,
    pub degenerate_count: u64,
    pub complete: bool,
}

/// Trend comparison of counts against c·(log X)^r.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub ratios: Vec<f64>,
    pub slope: f64,
    pub final_ratio: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// ln of a positive rational in f64, safe for values beyond f64 range.
pub fn ln_f64(x: &Rational) -> f64 {
    let f = x.to_f64().unwrap_or(f64::INFINITY);
    if f.is_finite() && f > 0.0 {
        f.ln()
    } else {
        let numer_bits = x.numer().magnitude().bits() as f64;
        let denom_bits = x.denom().magnitude().bits() as f64;
        (numer_bits - denom_bits + 1.0) * std::f64::consts::LN_2
    }
}

fn validate_bound(x: &Rational) -> Result<(), CensusError> {
    if *x < Rational::one() {
        return Err(CensusError::InvalidBound);
    }
    Ok(())
}

/// Symmetric exponent box covering the cells scaled to height bound X.
pub(crate) fn scaled_z_box(cells: &[Cell], r: usize, ln_x: f64, margin: i64) -> Vec<(i64, i64)> {
    let mut extent = vec![0.0f64; r];
    for cell in cells {
        for v in &cell.vertices {
            for (e, c) in extent.iter_mut().zip(v) {
                *e = e.max(c.abs());
            }
        }
    }
    extent
        .iter()
        .map(|e| {
            let m = (e * ln_x.max(0.0) * (1.0 + 1e-9)).ceil() as i64 + margin;
            (-m, m)
        })
        .collect()
}

/// Fold `visit` over every exponent vector in the box. Chunks run in
/// parallel; `merge` must be commutative and associative so the outcome is
/// independent of the chunking.
pub(crate) fn par_fold_box<T: Send>(
    bounds: &[(i64, i64)],
    chunks: usize,
    make: impl Fn() -> T + Sync,
    visit: impl Fn(&[i64], &mut T) + Sync,
    merge: impl Fn(T, T) -> T + Sync,
) -> Result<T, CensusError> {
    let sizes: Vec<u64> = bounds
        .iter()
        .map(|&(lo, hi)| (hi - lo + 1) as u64)
        .collect();
    let total_wide: u128 = sizes.iter().map(|&s| s as u128).product();
    if total_wide > 1 << 40 {
        return Err(CensusError::EnumerationTooLarge { points: total_wide });
    }
    let total = total_wide as u64;
    let chunk = total.div_ceil(chunks.max(1) as u64).max(1);
    let starts: Vec<u64> = (0..)
        .map(|c| c * chunk)
        .take_while(|&s| s < total)
        .collect();
    let merged = starts
        .par_iter()
        .map(|&start| {
            let end = (start + chunk).min(total);
            let mut z: Vec<i64> = Vec::with_capacity(bounds.len());
            let mut rem = start;
            for (&(lo, _), &s) in bounds.iter().zip(&sizes) {
                z.push(lo + (rem % s) as i64);
                rem /= s;
            }
            let mut acc = make();
            for _ in start..end {
                visit(&z, &mut acc);
                for (zi, &(lo, hi)) in z.iter_mut().zip(bounds) {
                    *zi += 1;
                    if *zi <= hi {
                        break;
                    }
                    *zi = lo;
                }
            }
            acc
        })
        .reduce(&make, &merge);
    Ok(merged)
}

/// Fold `visit` over the box, accumulating `width` counters.
fn scan_box(
    bounds: &[(i64, i64)],
    chunks: usize,
    width: usize,
    visit: impl Fn(&[i64], &mut [u64]) + Sync,
) -> Result<Vec<u64>, CensusError> {
    par_fold_box(
        bounds,
        chunks,
        || vec![0u64; width],
        |z, acc| visit(z, acc),
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    )
}

/// Exact |{x ∈ Γ : H(x) ≤ X}|.
///
/// Sign flips leave every ‖·‖_v over Q unchanged, so the lattice part is
/// counted once and multiplied by the torsion order.
pub fn count_height_ball(desc: &GroupDescriptor, x_bound: &Rational) -> Result<u64, CensusError> {
    count_height_ball_cfg(desc, x_bound, &CensusConfig::default())
}

pub fn count_height_ball_cfg(
    desc: &GroupDescriptor,
    x_bound: &Rational,
    cfg: &CensusConfig,
) -> Result<u64, CensusError> {
    if desc.rank() == 0 {
        return Err(CensusError::RankZero);
    }
    validate_bound(x_bound)?;
    let cells = logspace::cell_decomposition(desc)?;
    let bounds = scaled_z_box(&cells, desc.rank(), ln_f64(x_bound), cfg.box_margin);
    let primes = desc.support_primes();
    let counts = scan_box(&bounds, cfg.parallel_chunks, 1, |z, acc| {
        let x = compose_element(desc, 0, z).expect("box vector has rank length");
        if height_vector_on_support(&x, primes) <= *x_bound {
            acc[0] += 1;
        }
    })?;
    Ok(counts[0] * desc.torsion_order() as u64)
}

/// Whether every non-empty subsum of Σ a_i·x_i is non-zero.
fn all_subsums_nonzero(terms: &[Rational]) -> bool {
    let k = terms.len();
    for mask in 1u32..(1 << k) {
        let mut sum = Rational::zero();
        for (i, t) in terms.iter().enumerate() {
            if mask >> i & 1 == 1 {
                sum += t;
            }
        }
        if sum.is_zero() {
            return false;
        }
    }
    true
}

/// Count x ∈ Γ with H(a₁x₁ + ⋯ + a_k x_k) ≤ X and no vanishing subsum;
/// points passing the height test but with a vanishing subsum are reported
/// in `degenerate_count`. Torsion elements are enumerated explicitly since
/// sign changes alter the sums.
pub fn census_nondegenerate(
    desc: &GroupDescriptor,
    a: &[Rational],
    x_bound: &Rational,
    cfg: &CensusConfig,
) -> Result<CensusRow, CensusError> {
    if desc.rank() == 0 {
        return Err(CensusError::RankZero);
    }
    if desc.k() < 2 {
        return Err(CensusError::DimensionTooSmall);
    }
    if a.len() != desc.k() {
        return Err(CensusError::WrongLength {
            expected: desc.k(),
            got: a.len(),
        });
    }
    if a.iter().any(Zero::is_zero) {
        return Err(CensusError::DegenerateCoefficient);
    }
    validate_bound(x_bound)?;

    // domain ladder Y_j = C_box·X^(1+(j+1)δ); enumerate once over the
    // largest rung, bucketing each point by its own height
    let rungs = cfg.stability_rounds + 1;
    let domains = domain_ladder(x_bound, cfg);
    let cells = logspace::cell_decomposition(desc)?;
    let bounds = scaled_z_box(
        &cells,
        desc.rank(),
        ln_f64(domains.last().expect("at least one rung")),
        cfg.box_margin,
    );
    let primes = desc.support_primes();
    let torsion = desc.torsion_order();

    // per rung: [0] kept count, [1] degenerate count
    let counters = scan_box(&bounds, cfg.parallel_chunks, 2 * rungs, |z, acc| {
        let base = compose_element(desc, 0, z).expect("box vector has rank length");
        let h_domain = height_vector_on_support(&base, primes);
        let first_rung = domains.iter().position(|y| h_domain <= *y);
        let Some(first_rung) = first_rung else {
            return;
        };
        for zeta in 0..torsion {
            let x = if zeta == 0 {
                base.clone()
            } else {
                desc.torsion()[zeta]
                    .iter()
                    .zip(&base)
                    .map(|(s, b)| s * b)
                    .collect()
            };
            let terms: Vec<Rational> = a.iter().zip(&x).map(|(ai, xi)| ai * xi).collect();
            let value: Rational = terms.iter().sum();
            let h_value = crate::heights::height_scalar(&value);
            if h_value > *x_bound {
                continue;
            }
            let slot = if all_subsums_nonzero(&terms) { 0 } else { 1 };
            for rung in first_rung..rungs {
                acc[2 * rung + slot] += 1;
            }
        }
    })?;

    let last = rungs - 1;
    let complete = (0..rungs.saturating_sub(1)).all(|j| {
        counters[2 * j] == counters[2 * last] && counters[2 * j + 1] == counters[2 * last + 1]
    });
    Ok(CensusRow {
        x: x_bound.clone(),
        count: counters[2 * last],
        degenerate_count: counters[2 * last + 1],
        complete,
    })
}

/// C_box·X^(1+δ) rounded up to an integer.
pub(crate) fn domain_bound(x_bound: &Rational, delta: f64) -> Rational {
    let ln_y = (C_BOX as f64).ln() + (1.0 + delta) * ln_f64(x_bound);
    let bits = (ln_y / std::f64::consts::LN_2).ceil().max(0.0) as u64;
    Rational::from_integer(BigInt::one() << bits)
}

/// Nested heuristic domains Y_j = C_box·X^(1+(j+1)δ), one per rung.
pub(crate) fn domain_ladder(x_bound: &Rational, cfg: &CensusConfig) -> Vec<Rational> {
    (0..=cfg.stability_rounds)
        .map(|j| domain_bound(x_bound, cfg.slack_delta * (j + 1) as f64))
        .collect()
}

/// Exact |{x ∈ Γ : H(x) ≤ X, Σ b_i x_i = 0}| for a functional b ≠ 0
/// (zero entries allowed).
pub fn count_in_subspace(
    desc: &GroupDescriptor,
    b: &[Rational],
    x_bound: &Rational,
) -> Result<u64, CensusError> {
    count_in_subspace_cfg(desc, b, x_bound, &CensusConfig::default())
}

pub fn count_in_subspace_cfg(
    desc: &GroupDescriptor,
    b: &[Rational],
    x_bound: &Rational,
    cfg: &CensusConfig,
) -> Result<u64, CensusError> {
    if desc.rank() == 0 {
        return Err(CensusError::RankZero);
    }
    if b.len() != desc.k() {
        return Err(CensusError::WrongLength {
            expected: desc.k(),
            got: b.len(),
        });
    }
    if b.iter().all(Zero::is_zero) {
        return Err(CensusError::ZeroFunctional);
    }
    validate_bound(x_bound)?;
    let cells = logspace::cell_decomposition(desc)?;
    let bounds = scaled_z_box(&cells, desc.rank(), ln_f64(x_bound), cfg.box_margin);
    let primes = desc.support_primes();
    let torsion = desc.torsion_order();
    let counts = scan_box(&bounds, cfg.parallel_chunks, 1, |z, acc| {
        let base = compose_element(desc, 0, z).expect("box vector has rank length");
        if height_vector_on_support(&base, primes) > *x_bound {
            return;
        }
        for zeta in 0..torsion {
            let vanished = desc.torsion()[zeta]
                .iter()
                .zip(&base)
                .zip(b)
                .map(|((s, xb), bi)| bi * s * xb)
                .sum::<Rational>()
                .is_zero();
            if vanished {
                acc[0] += 1;
            }
        }
    })?;
    Ok(counts[0])
}

/// Diagnostic count of x ∈ Γ with H(x) ≤ X whose absolute-value ratio
/// ‖x_i‖_v/‖x_j‖_v lies in [lo, hi] (1-based coordinates).
pub fn count_ratio_band(
    desc: &GroupDescriptor,
    v: crate::heights::Place,
    i: usize,
    j: usize,
    lo: &Rational,
    hi: &Rational,
    x_bound: &Rational,
) -> Result<u64, CensusError> {
    let k = desc.k();
    if desc.rank() == 0 {
        return Err(CensusError::RankZero);
    }
    if i == 0 || j == 0 || i > k || j > k {
        return Err(CensusError::WrongLength {
            expected: k,
            got: i.max(j),
        });
    }
    validate_bound(x_bound)?;
    let cfg = CensusConfig::default();
    let cells = logspace::cell_decomposition(desc)?;
    let bounds = scaled_z_box(&cells, desc.rank(), ln_f64(x_bound), cfg.box_margin);
    let primes = desc.support_primes();
    let counts = scan_box(&bounds, cfg.parallel_chunks, 1, |z, acc| {
        let x = compose_element(desc, 0, z).expect("box vector has rank length");
        if height_vector_on_support(&x, primes) > *x_bound {
            return;
        }
        let ratio =
            crate::heights::abs_value(&x[i - 1], v) / crate::heights::abs_value(&x[j - 1], v);
        if ratio >= *lo && ratio <= *hi {
            acc[0] += 1;
        }
    })?;
    Ok(counts[0] * desc.torsion_order() as u64)
}

/// Compare census rows against the prediction c·(log X)^r.
///
/// Passes when the final ratio is within the tolerance of 1 and the last
/// three rungs approach 1 monotonically in |ratio − 1|.
pub fn asymptotic_report(
    rows: &[CensusRow],
    r: usize,
    c: &VolumeResult,
    tolerance: f64,
) -> Result<FitReport, CensusError> {
    if rows.len() < 3 || rows.windows(2).any(|w| w[0].x >= w[1].x) {
        return Err(CensusError::InsufficientData);
    }
    let ratios: Vec<f64> = rows
        .iter()
        .map(|row| row.count as f64 / (c.value * ln_f64(&row.x).powi(r as i32)))
        .collect();

    // least-squares slope of log(count) against log(log X)
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|row| row.count > 0)
        .map(|row| (ln_f64(&row.x).ln(), (row.count as f64).ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let var: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        if var > 0.0 {
            cov / var
        } else {
            0.0
        }
    } else {
        0.0
    };

    let final_ratio = *ratios.last().expect("three rows minimum");
    let tail = &ratios[ratios.len() - 3..];
    let monotone = (tail[2] - 1.0).abs() <= (tail[1] - 1.0).abs() + 1e-12
        && (tail[1] - 1.0).abs() <= (tail[0] - 1.0).abs() + 1e-12;
    let pass = (final_ratio - 1.0).abs() <= tolerance && monotone;
    Ok(FitReport {
        ratios,
        slope,
        final_ratio,
        tolerance,
        pass,
    })
}
