//! Structure of finitely generated subgroups Γ ⊆ (Q*)^k.
//!
//! A group is described by generators; analysis factors every coordinate
//! into sign and prime exponents, reduces the exponent rows to Hermite
//! normal form for a deterministic basis of Γ/Γ_tors, and recovers the
//! torsion subgroup Γ ∩ {±1}^k from the relation lattice. Elements then
//! decompose uniquely as ζ·u₁^{z₁}⋯u_r^{z_r}.

pub mod hnf;

use crate::heights::{
    abs_value, factor_rational, HeightError, Place, Rational, DEFAULT_FACTOR_BOUND,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MultGroupError {
    /// A tuple had the wrong length or a zero entry.
    InvalidTuple {
        index: usize,
        reason: String,
    },
    /// Torsion index or exponent vector length out of range.
    IndexOutOfRange,
    /// The element does not lie in the group.
    NotInGroup,
    /// Operation requires rank ≥ 1.
    RankZero,
    /// Operation requires k ≥ 2.
    DimensionTooSmall,
    /// Operation requires a scalar group (k = 1).
    NotScalarGroup,
    /// An exponent left the supported integer range.
    ExponentOverflow,
    Height(HeightError),
}

impl fmt::Display for MultGroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultGroupError::InvalidTuple { index, reason } => {
                write!(f, "invalid tuple at index {index}: {reason}")
            }
            MultGroupError::IndexOutOfRange => write!(f, "index out of range"),
            MultGroupError::NotInGroup => write!(f, "element is not in the group"),
            MultGroupError::RankZero => write!(f, "group has rank 0"),
            MultGroupError::DimensionTooSmall => write!(f, "operation requires k >= 2"),
            MultGroupError::NotScalarGroup => write!(f, "operation requires k = 1"),
            MultGroupError::ExponentOverflow => write!(f, "exponent out of supported range"),
            MultGroupError::Height(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for MultGroupError {}

impl From<HeightError> for MultGroupError {
    fn from(e: HeightError) -> Self {
        MultGroupError::Height(e)
    }
}

/// A finitely generated subgroup of (Q*)^k with its computed structure.
///
/// `basis` spans Γ/Γ_tors freely; `torsion` lists Γ ∩ {±1}^k in full with
/// the identity first. The exponent layout used throughout is prime-major:
/// column p·k + j holds ord of coordinate j at the p-th support prime.
#[derive(Debug, Clone)]
pub struct GroupDescriptor {
    k: usize,
    generators: Vec<Vec<Rational>>,
    basis: Vec<Vec<Rational>>,
    torsion: Vec<Vec<Rational>>,
    support_primes: Vec<u64>,
    exponent_lattice: Vec<Vec<BigInt>>,
    basis_exponents: Vec<Vec<BigInt>>,
    pivot_cols: Vec<usize>,
    rank: usize,
}

impl GroupDescriptor {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Vec<Rational>] {
        &self.generators
    }

    /// Basis tuples u_1,…,u_r of the free part.
    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    /// All torsion elements; entry 0 is the identity tuple.
    pub fn torsion(&self) -> &[Vec<Rational>] {
        &self.torsion
    }

    pub fn torsion_order(&self) -> usize {
        self.torsion.len()
    }

    /// Finite support primes in ascending order.
    pub fn support_primes(&self) -> &[u64] {
        &self.support_primes
    }

    /// The support S: the archimedean place followed by the finite places.
    pub fn support(&self) -> Vec<Place> {
        std::iter::once(Place::Archimedean)
            .chain(self.support_primes.iter().map(|&p| Place::Finite(p)))
            .collect()
    }

    /// Per generator: k sign bits, then its prime-exponent row.
    pub fn exponent_lattice(&self) -> &[Vec<BigInt>] {
        &self.exponent_lattice
    }

    /// Prime-exponent rows of the basis tuples (Hermite normal form rows).
    pub fn basis_exponents(&self) -> &[Vec<BigInt>] {
        &self.basis_exponents
    }

    /// Index of a ±1 tuple in the torsion list.
    pub fn torsion_index(&self, zeta: &[Rational]) -> Option<usize> {
        self.torsion.iter().position(|t| t == zeta)
    }
}

/// x^e for a non-zero rational and a signed exponent.
pub fn pow_rational(x: &Rational, e: i64) -> Rational {
    let mag = e.unsigned_abs();
    debug_assert!(mag <= u32::MAX as u64, "exponent within desk scale");
    let powed = Rational::new(x.numer().pow(mag as u32), x.denom().pow(mag as u32));
    if e >= 0 {
        powed
    } else {
        powed.recip()
    }
}

fn validate_tuple(k: usize, index: usize, t: &[Rational]) -> Result<(), MultGroupError> {
    if t.len() != k {
        return Err(MultGroupError::InvalidTuple {
            index,
            reason: format!("expected length {k}, got {}", t.len()),
        });
    }
    if t.iter().any(Zero::is_zero) {
        return Err(MultGroupError::InvalidTuple {
            index,
            reason: "zero entry".into(),
        });
    }
    Ok(())
}

/// Prime-exponent row of a tuple over a fixed ascending prime list.
/// Returns None when some coordinate involves a prime outside the list.
fn exponent_row(t: &[Rational], primes: &[u64]) -> Result<Option<Vec<BigInt>>, MultGroupError> {
    let k = t.len();
    let mut row = vec![BigInt::zero(); primes.len() * k];
    for (j, x) in t.iter().enumerate() {
        for (p, e) in factor_rational(x, DEFAULT_FACTOR_BOUND)? {
            match primes.binary_search(&p) {
                Ok(pi) => row[pi * k + j] = BigInt::from(e),
                Err(_) => return Ok(None),
            }
        }
    }
    Ok(Some(row))
}

fn sign_mask(t: &[Rational]) -> u64 {
    t.iter().enumerate().fold(
        0u64,
        |m, (j, x)| if x.is_negative() { m | 1 << j } else { m },
    )
}

/// Analyze the group generated by `gens` inside (Q*)^k.
pub fn analyze_group(k: usize, gens: &[Vec<Rational>]) -> Result<GroupDescriptor, MultGroupError> {
    if k == 0 || k > 63 {
        return Err(MultGroupError::InvalidTuple {
            index: 0,
            reason: format!("unsupported k = {k}"),
        });
    }
    for (i, g) in gens.iter().enumerate() {
        validate_tuple(k, i, g)?;
    }

    let mut prime_set = BTreeSet::new();
    for g in gens {
        for x in g {
            for (p, _) in factor_rational(x, DEFAULT_FACTOR_BOUND)? {
                prime_set.insert(p);
            }
        }
    }
    let support_primes: Vec<u64> = prime_set.into_iter().collect();

    let mut exp_rows = Vec::with_capacity(gens.len());
    for g in gens {
        let row = exponent_row(g, &support_primes)?.expect("support covers all generators");
        exp_rows.push(row);
    }

    let reduction = hnf::hnf_with_transform(&exp_rows);
    let rank = reduction.rank;

    let mut basis = Vec::with_capacity(rank);
    for urow in &reduction.transform[..rank] {
        let mut u = vec![Rational::one(); k];
        for (g, c) in gens.iter().zip(urow) {
            let e = c.to_i64().ok_or(MultGroupError::ExponentOverflow)?;
            if e == 0 {
                continue;
            }
            for (uj, gj) in u.iter_mut().zip(g) {
                *uj *= pow_rational(gj, e);
            }
        }
        basis.push(u);
    }

    // Torsion is the sign image of the relation lattice: z with Σ z_i·e_i = 0
    // composes to a ±1 tuple whose sign mask is the mod-2 combination of
    // generator sign masks.
    let gen_masks: Vec<u64> = gens.iter().map(|g| sign_mask(g)).collect();
    let mut f2_basis: Vec<u64> = Vec::new();
    for krow in reduction.kernel_rows() {
        let mut mask = 0u64;
        for (c, &gm) in krow.iter().zip(&gen_masks) {
            if c.is_odd() {
                mask ^= gm;
            }
        }
        // reduce against the accumulated F_2 basis
        for &b in &f2_basis {
            let top = 63 - b.leading_zeros();
            if mask >> top & 1 == 1 {
                mask ^= b;
            }
        }
        if mask != 0 {
            f2_basis.push(mask);
            f2_basis.sort_by_key(|b| std::cmp::Reverse(*b));
        }
    }
    let mut masks: Vec<u64> = vec![0];
    for &b in &f2_basis {
        let ext: Vec<u64> = masks.iter().map(|m| m ^ b).collect();
        masks.extend(ext);
    }
    masks.sort_unstable();
    masks.dedup();
    let torsion: Vec<Vec<Rational>> = masks
        .iter()
        .map(|&m| {
            (0..k)
                .map(|j| {
                    if m >> j & 1 == 1 {
                        -Rational::one()
                    } else {
                        Rational::one()
                    }
                })
                .collect()
        })
        .collect();

    let exponent_lattice = gens
        .iter()
        .zip(&exp_rows)
        .map(|(g, row)| {
            let mut full: Vec<BigInt> = (0..k)
                .map(|j| BigInt::from((sign_mask(g) >> j & 1) as u8))
                .collect();
            full.extend(row.iter().cloned());
            full
        })
        .collect();

    Ok(GroupDescriptor {
        k,
        generators: gens.to_vec(),
        basis,
        torsion,
        support_primes,
        exponent_lattice,
        basis_exponents: reduction.basis_rows().to_vec(),
        pivot_cols: reduction.pivot_cols,
        rank,
    })
}

/// The element ζ·u₁^{z₁}⋯u_r^{z_r} for a torsion index and exponent vector.
pub fn compose_element(
    desc: &GroupDescriptor,
    zeta: usize,
    z: &[i64],
) -> Result<Vec<Rational>, MultGroupError> {
    if zeta >= desc.torsion.len() || z.len() != desc.rank {
        return Err(MultGroupError::IndexOutOfRange);
    }
    let mut x = desc.torsion[zeta].clone();
    for (u, &zi) in desc.basis.iter().zip(z) {
        if zi == 0 {
            continue;
        }
        for (xj, uj) in x.iter_mut().zip(u) {
            *xj *= pow_rational(uj, zi);
        }
    }
    Ok(x)
}

/// Decompose x uniquely as (torsion index, exponent vector).
pub fn decompose_element(
    desc: &GroupDescriptor,
    x: &[Rational],
) -> Result<(usize, Vec<i64>), MultGroupError> {
    validate_tuple(desc.k, 0, x)?;
    let row = exponent_row(x, &desc.support_primes)?.ok_or(MultGroupError::NotInGroup)?;
    let z_big = hnf::solve_hnf_system(&desc.basis_exponents, &desc.pivot_cols, &row)
        .ok_or(MultGroupError::NotInGroup)?;
    let mut z = Vec::with_capacity(z_big.len());
    for c in &z_big {
        z.push(c.to_i64().ok_or(MultGroupError::ExponentOverflow)?);
    }
    let free_part = compose_element(desc, 0, &z)?;
    let zeta: Vec<Rational> = x.iter().zip(&free_part).map(|(a, b)| a / b).collect();
    if zeta.iter().any(|c| c.abs() != Rational::one()) {
        return Err(MultGroupError::NotInGroup);
    }
    let idx = desc
        .torsion_index(&zeta)
        .ok_or(MultGroupError::NotInGroup)?;
    Ok((idx, z))
}

/// Whether x lies in the group.
pub fn is_in_group(desc: &GroupDescriptor, x: &[Rational]) -> bool {
    decompose_element(desc, x).is_ok()
}

/// For each ordered coordinate pair (i, j), i ≠ j, 1-based: whether some
/// x ∈ Γ has x_i/x_j outside {+1, −1}. Over Q those are the only roots of
/// unity, so this decides the ratio hypothesis on coordinates.
pub fn check_ratio_condition(
    desc: &GroupDescriptor,
) -> Result<BTreeMap<(usize, usize), bool>, MultGroupError> {
    if desc.k < 2 {
        return Err(MultGroupError::DimensionTooSmall);
    }
    let mut out = BTreeMap::new();
    for i in 1..=desc.k {
        for j in 1..=desc.k {
            if i == j {
                continue;
            }
            let witness = desc.basis.iter().any(|u| u[i - 1].abs() != u[j - 1].abs());
            out.insert((i, j), witness);
        }
    }
    Ok(out)
}

/// For each place v ∈ S and ordered pair i ≠ j in {0,…,k} (index 0 denotes
/// the constant coordinate x₀ = 1): whether some x ∈ Γ has ‖x_i‖_v ≠ ‖x_j‖_v.
pub fn check_place_separation(
    desc: &GroupDescriptor,
) -> Result<BTreeMap<(Place, usize, usize), bool>, MultGroupError> {
    if desc.rank == 0 {
        return Err(MultGroupError::RankZero);
    }
    let coord_abs = |u: &[Rational], i: usize, v: Place| -> Rational {
        if i == 0 {
            Rational::one()
        } else {
            abs_value(&u[i - 1], v)
        }
    };
    let mut out = BTreeMap::new();
    for v in desc.support() {
        for i in 0..=desc.k {
            for j in 0..=desc.k {
                if i == j {
                    continue;
                }
                let witness = desc
                    .basis
                    .iter()
                    .any(|u| coord_abs(u, i, v) != coord_abs(u, j, v));
                out.insert((v, i, j), witness);
            }
        }
    }
    Ok(out)
}

/// The full S-unit group U_S^k for S = {∞} ∪ primes: generated by each
/// prime placed in each coordinate plus −1 in each coordinate.
pub fn unit_group_descriptor(primes: &[u64], k: usize) -> Result<GroupDescriptor, MultGroupError> {
    for &p in primes {
        if !crate::heights::is_prime_u64(p) {
            return Err(MultGroupError::Height(HeightError::NotPrime(p)));
        }
    }
    let mut gens = Vec::new();
    for &p in primes {
        for pos in 0..k {
            let mut t = vec![Rational::one(); k];
            t[pos] = Rational::from_integer(BigInt::from(p));
            gens.push(t);
        }
    }
    for pos in 0..k {
        let mut t = vec![Rational::one(); k];
        t[pos] = -Rational::one();
        gens.push(t);
    }
    analyze_group(k, &gens)
}

/// The k-fold product Γ₁^k ⊆ (Q*)^k of a scalar group Γ₁ ⊆ Q*.
pub fn power_descriptor(
    scalar: &GroupDescriptor,
    k: usize,
) -> Result<GroupDescriptor, MultGroupError> {
    if scalar.k != 1 {
        return Err(MultGroupError::NotScalarGroup);
    }
    let mut gens = Vec::with_capacity(scalar.generators.len() * k);
    for g in &scalar.generators {
        for pos in 0..k {
            let mut t = vec![Rational::one(); k];
            t[pos] = g[0].clone();
            gens.push(t);
        }
    }
    analyze_group(k, &gens)
}
