//! Values representable as a₁x₁ + ⋯ + a_k x_k with x ∈ Γ₁^k for a scalar
//! group Γ₁ ⊆ Q* and a finite coefficient family A.
//!
//! A family is admissible when within each tuple distinct entries never
//! differ by a factor in Γ₁, distinct tuples never differ by a factor in
//! Γ₁^k, and the family is closed under coordinate permutations; those
//! three conditions make the predicted constant |A|·c(Γ₁^k)/k! correct.
//! Unlike the non-degenerate census, vanishing subsums are allowed here;
//! only the total value must be non-zero. Counting is over the deduplicated
//! set of exact values, with the same heuristic enumeration domain and
//! completeness flag as the census.

use crate::census::{domain_ladder, ln_f64, par_fold_box, scaled_z_box, CensusConfig, CensusError};
use crate::heights::{height_scalar, height_vector_on_support, Rational};
use crate::logspace::{self, LogSpaceError, VolumeResult};
use crate::multgroup::{
    compose_element, is_in_group, power_descriptor, GroupDescriptor, MultGroupError,
};
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use std::fmt;

/// Permutation enumeration caps the arity at 8 (8! = 40320 images).
pub const MAX_ARITY: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum RepresentError {
    EmptyFamily,
    /// Tuple lengths must all equal the family arity.
    WrongArity {
        expected: usize,
        got: usize,
    },
    ArityTooLarge(usize),
    /// Coefficient entries must be non-zero (1-based positions).
    ZeroEntry {
        tuple: usize,
        coordinate: usize,
    },
    DuplicateTuple(usize),
    /// The family failed admissibility; each violation carries a witness.
    FamilyViolations(Vec<FamilyViolation>),
    /// Γ₁ must be a subgroup of Q* (k = 1).
    ScalarGroupRequired,
    RankZero,
    /// The height bound must satisfy X ≥ 1.
    InvalidBound,
    Census(CensusError),
    MultGroup(MultGroupError),
    LogSpace(LogSpaceError),
}

impl fmt::Display for RepresentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepresentError::EmptyFamily => write!(f, "coefficient family is empty"),
            RepresentError::WrongArity { expected, got } => {
                write!(f, "expected tuples of length {expected}, got {got}")
            }
            RepresentError::ArityTooLarge(k) => {
                write!(f, "arity {k} exceeds the supported maximum {MAX_ARITY}")
            }
            RepresentError::ZeroEntry { tuple, coordinate } => {
                write!(
                    f,
                    "tuple {tuple} has a zero entry at coordinate {coordinate}"
                )
            }
            RepresentError::DuplicateTuple(i) => write!(f, "tuple {i} is a duplicate"),
            RepresentError::FamilyViolations(v) => {
                write!(
                    f,
                    "family fails admissibility with {} violation(s)",
                    v.len()
                )
            }
            RepresentError::ScalarGroupRequired => {
                write!(f, "the coefficient group must have dimension 1")
            }
            RepresentError::RankZero => write!(f, "group has rank 0"),
            RepresentError::InvalidBound => write!(f, "height bound must be >= 1"),
            RepresentError::Census(e) => write!(f, "{e}"),
            RepresentError::MultGroup(e) => write!(f, "{e}"),
            RepresentError::LogSpace(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RepresentError {}

impl From<CensusError> for RepresentError {
    fn from(e: CensusError) -> Self {
        RepresentError::Census(e)
    }
}

impl From<MultGroupError> for RepresentError {
    fn from(e: MultGroupError) -> Self {
        RepresentError::MultGroup(e)
    }
}

impl From<LogSpaceError> for RepresentError {
    fn from(e: LogSpaceError) -> Self {
        RepresentError::LogSpace(e)
    }
}

/// One admissibility failure with its witness (all indices 1-based).
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyViolation {
    /// Within one tuple, a_i ≠ a_j but a_i/a_j ∈ Γ₁.
    EntryRatioInGroup {
        tuple: usize,
        i: usize,
        j: usize,
        ratio: Rational,
    },
    /// Two distinct tuples differ coordinate-wise by factors in Γ₁.
    TupleRatioInGroup {
        first: usize,
        second: usize,
        ratio: Vec<Rational>,
    },
    /// A coordinate permutation of a member is missing from the family.
    MissingPermutation {
        tuple: usize,
        missing: Vec<Rational>,
    },
}

fn write_tuple(f: &mut fmt::Formatter<'_>, tuple: &[Rational]) -> fmt::Result {
    write!(f, "(")?;
    for (i, v) in tuple.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{v}")?;
    }
    write!(f, ")")
}

impl fmt::Display for FamilyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyViolation::EntryRatioInGroup { tuple, i, j, ratio } => write!(
                f,
                "tuple {tuple}: entries {i} and {j} differ by the group element {ratio}"
            ),
            FamilyViolation::TupleRatioInGroup {
                first,
                second,
                ratio,
            } => {
                write!(f, "tuples {first} and {second} differ by the group tuple ")?;
                write_tuple(f, ratio)
            }
            FamilyViolation::MissingPermutation { tuple, missing } => {
                write!(f, "tuple {tuple}: missing permutation ")?;
                write_tuple(f, missing)
            }
        }
    }
}

/// Finite set of coefficient tuples with non-zero entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFamily {
    k: usize,
    tuples: Vec<Vec<Rational>>,
}

impl CoefficientFamily {
    /// Build a family, rejecting empty input, ragged or oversized arities,
    /// zero entries, and duplicates. Tuples are stored sorted.
    pub fn new(tuples: Vec<Vec<Rational>>) -> Result<CoefficientFamily, RepresentError> {
        let k = tuples.first().ok_or(RepresentError::EmptyFamily)?.len();
        if k == 0 {
            return Err(RepresentError::WrongArity {
                expected: 1,
                got: 0,
            });
        }
        if k > MAX_ARITY {
            return Err(RepresentError::ArityTooLarge(k));
        }
        for (t, tuple) in tuples.iter().enumerate() {
            if tuple.len() != k {
                return Err(RepresentError::WrongArity {
                    expected: k,
                    got: tuple.len(),
                });
            }
            if let Some(c) = tuple.iter().position(Zero::is_zero) {
                return Err(RepresentError::ZeroEntry {
                    tuple: t + 1,
                    coordinate: c + 1,
                });
            }
        }
        let mut seen = BTreeSet::new();
        for (t, tuple) in tuples.iter().enumerate() {
            if !seen.insert(tuple.clone()) {
                return Err(RepresentError::DuplicateTuple(t + 1));
            }
        }
        Ok(CoefficientFamily {
            k,
            tuples: seen.into_iter().collect(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Vec<Rational>] {
        &self.tuples
    }

    pub fn contains(&self, tuple: &[Rational]) -> bool {
        self.tuples
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .is_ok()
    }
}

/// All k! index permutations in lexicographic order.
fn permutations_of(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::with_capacity(k);
    let mut used = vec![false; k];
    fn rec(k: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in 0..k {
            if !used[i] {
                used[i] = true;
                current.push(i);
                rec(k, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    rec(k, &mut current, &mut used, &mut out);
    out
}

fn apply_permutation(tuple: &[Rational], perm: &[usize]) -> Vec<Rational> {
    perm.iter().map(|&i| tuple[i].clone()).collect()
}

/// Orbit of a tuple under coordinate permutations and the order of its
/// stabilizer; |orbit|·stabilizer_order = k!.
pub fn permutation_orbit(tuple: &[Rational]) -> (Vec<Vec<Rational>>, usize) {
    let k = tuple.len();
    let mut orbit = BTreeSet::new();
    let mut stabilizer_order = 0;
    for perm in permutations_of(k) {
        let image = apply_permutation(tuple, &perm);
        if image == tuple {
            stabilizer_order += 1;
        }
        orbit.insert(image);
    }
    (orbit.into_iter().collect(), stabilizer_order)
}

/// Smallest permutation-closed family containing the input.
pub fn close_under_permutations(
    family: &CoefficientFamily,
) -> Result<CoefficientFamily, RepresentError> {
    let mut closed = BTreeSet::new();
    for tuple in family.tuples() {
        for perm in permutations_of(family.k()) {
            closed.insert(apply_permutation(tuple, &perm));
        }
    }
    CoefficientFamily::new(closed.into_iter().collect())
}

/// Family that passed admissibility against a specific scalar group.
#[derive(Debug, Clone)]
pub struct ValidatedFamily {
    family: CoefficientFamily,
}

impl ValidatedFamily {
    pub fn family(&self) -> &CoefficientFamily {
        &self.family
    }
}

/// Check the three admissibility conditions against Γ₁: entry ratios within
/// a tuple stay outside Γ₁ unless the entries are equal, tuple ratios stay
/// outside Γ₁^k, and the family is permutation-closed.
pub fn validate_family(
    family: CoefficientFamily,
    gamma1: &GroupDescriptor,
) -> Result<ValidatedFamily, RepresentError> {
    if gamma1.k() != 1 {
        return Err(RepresentError::ScalarGroupRequired);
    }
    let mut violations = Vec::new();
    let in_gamma1 = |x: &Rational| is_in_group(gamma1, std::slice::from_ref(x));

    for (t, tuple) in family.tuples().iter().enumerate() {
        for i in 0..family.k() {
            for j in (i + 1)..family.k() {
                if tuple[i] == tuple[j] {
                    continue;
                }
                let ratio = &tuple[i] / &tuple[j];
                if in_gamma1(&ratio) {
                    violations.push(FamilyViolation::EntryRatioInGroup {
                        tuple: t + 1,
                        i: i + 1,
                        j: j + 1,
                        ratio,
                    });
                }
            }
        }
    }

    for (s, first) in family.tuples().iter().enumerate() {
        for (t, second) in family.tuples().iter().enumerate().skip(s + 1) {
            let ratio: Vec<Rational> = first.iter().zip(second).map(|(a, b)| a / b).collect();
            if ratio.iter().all(&in_gamma1) {
                violations.push(FamilyViolation::TupleRatioInGroup {
                    first: s + 1,
                    second: t + 1,
                    ratio,
                });
            }
        }
    }

    for (t, tuple) in family.tuples().iter().enumerate() {
        for perm in permutations_of(family.k()) {
            let image = apply_permutation(tuple, &perm);
            if !family.contains(&image) {
                violations.push(FamilyViolation::MissingPermutation {
                    tuple: t + 1,
                    missing: image,
                });
            }
        }
    }

    if violations.is_empty() {
        Ok(ValidatedFamily { family })
    } else {
        Err(RepresentError::FamilyViolations(violations))
    }
}

/// Exact count of distinct non-zero values a₁x₁ + ⋯ + a_k x_k with a ∈ A,
/// x ∈ Γ₁^k, and H(value) ≤ X. Vanishing subsums are allowed. Enumeration
/// runs over the heuristic domain ladder; the flag reports whether the
/// count was stable across all rungs.
pub fn count_representable(
    gamma1: &GroupDescriptor,
    family: &ValidatedFamily,
    x_bound: &Rational,
    cfg: &CensusConfig,
) -> Result<(u64, bool), RepresentError> {
    if gamma1.k() != 1 {
        return Err(RepresentError::ScalarGroupRequired);
    }
    if gamma1.rank() == 0 {
        return Err(RepresentError::RankZero);
    }
    if *x_bound < Rational::one() {
        return Err(RepresentError::InvalidBound);
    }
    let k = family.family().k();
    let product = power_descriptor(gamma1, k)?;
    let domains = domain_ladder(x_bound, cfg);
    let rungs = domains.len();
    let cells = logspace::cell_decomposition(&product)?;
    let bounds = scaled_z_box(
        &cells,
        product.rank(),
        ln_f64(domains.last().expect("at least one rung")),
        cfg.box_margin,
    );
    let primes = product.support_primes();
    let torsion = product.torsion_order();
    let tuples = family.family().tuples();

    let value_sets: Vec<BTreeSet<Rational>> = par_fold_box(
        &bounds,
        cfg.parallel_chunks,
        || vec![BTreeSet::new(); rungs],
        |z, sets: &mut Vec<BTreeSet<Rational>>| {
            let base = compose_element(&product, 0, z).expect("box vector has rank length");
            let h_domain = height_vector_on_support(&base, primes);
            let Some(first_rung) = domains.iter().position(|y| h_domain <= *y) else {
                return;
            };
            for zeta in 0..torsion {
                let x: Vec<Rational> = product.torsion()[zeta]
                    .iter()
                    .zip(&base)
                    .map(|(s, b)| s * b)
                    .collect();
                for tuple in tuples {
                    let value: Rational = tuple.iter().zip(&x).map(|(ai, xi)| ai * xi).sum();
                    if value.is_zero() || height_scalar(&value) > *x_bound {
                        continue;
                    }
                    for set in sets.iter_mut().skip(first_rung) {
                        set.insert(value.clone());
                    }
                }
            }
        },
        |mut a, b| {
            for (sa, sb) in a.iter_mut().zip(b) {
                sa.extend(sb);
            }
            a
        },
    )?;

    let count = value_sets[rungs - 1].len() as u64;
    let complete = value_sets.iter().all(|s| s.len() as u64 == count);
    Ok((count, complete))
}

/// The predicted leading constant |A|·c(Γ₁^k)/k!, with the special-case
/// forms when they apply.
#[derive(Debug, Clone)]
pub struct PredictedConstant {
    /// |A|·c(Γ₁^k)/k!.
    pub combined: VolumeResult,
    /// c(Γ₁^k), unscaled.
    pub c_gamma_k: VolumeResult,
    pub family_size: usize,
    pub k_factorial: u64,
    /// c/|G(a)| when A is a single permutation orbit.
    pub single_orbit: Option<f64>,
    /// |B|^k·c/k! when A = B^k for a set B of scalars.
    pub power_family: Option<f64>,
}

pub fn predicted_constant(
    gamma1: &GroupDescriptor,
    family: &ValidatedFamily,
) -> Result<PredictedConstant, RepresentError> {
    if gamma1.k() != 1 {
        return Err(RepresentError::ScalarGroupRequired);
    }
    let k = family.family().k();
    let product = power_descriptor(gamma1, k)?;
    let (_, c) = logspace::volume_c_gamma(&product)?;
    let k_factorial: u64 = (1..=k as u64).product();
    let family_size = family.family().len();
    let scale = family_size as f64 / k_factorial as f64;

    let exact = c.exact.clone().map(|mut e| {
        e.rational *= Rational::new(family_size.into(), k_factorial.into());
        e
    });
    let combined = VolumeResult {
        value: c.value * scale,
        abs_error_estimate: c.abs_error_estimate * scale,
        method: c.method,
        cells_used: c.cells_used,
        exact,
    };

    let single_orbit = {
        let (orbit, stabilizer) = permutation_orbit(&family.family().tuples()[0]);
        (orbit.len() == family_size && orbit.iter().all(|t| family.family().contains(t)))
            .then(|| c.value / stabilizer as f64)
    };

    let power_family = {
        let entries: BTreeSet<&Rational> = family
            .family()
            .tuples()
            .iter()
            .flat_map(|t| t.iter())
            .collect();
        let b = entries.len() as u64;
        (b.pow(k as u32) == family_size as u64)
            .then(|| b.pow(k as u32) as f64 * c.value / k_factorial as f64)
    };

    Ok(PredictedConstant {
        combined,
        c_gamma_k: c,
        family_size,
        k_factorial,
        single_orbit,
        power_family,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::parse_rational;
    use crate::multgroup::analyze_group;
    use num_bigint::BigInt;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn tuples(rows: &[&[&str]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|s| q(s)).collect())
            .collect()
    }

    fn gamma_two() -> GroupDescriptor {
        analyze_group(1, &[vec![q("2")]]).unwrap()
    }

    fn family(rows: &[&[&str]]) -> CoefficientFamily {
        CoefficientFamily::new(tuples(rows)).unwrap()
    }

    fn validated(rows: &[&[&str]], gamma1: &GroupDescriptor) -> ValidatedFamily {
        validate_family(family(rows), gamma1).unwrap()
    }

    #[test]
    fn family_construction_rejects_bad_input() {
        assert!(matches!(
            CoefficientFamily::new(vec![]),
            Err(RepresentError::EmptyFamily)
        ));
        assert!(matches!(
            CoefficientFamily::new(tuples(&[&["1", "0"]])),
            Err(RepresentError::ZeroEntry {
                tuple: 1,
                coordinate: 2
            })
        ));
        assert!(matches!(
            CoefficientFamily::new(tuples(&[&["1", "2"], &["1"]])),
            Err(RepresentError::WrongArity {
                expected: 2,
                got: 1
            })
        ));
        assert!(matches!(
            CoefficientFamily::new(tuples(&[&["1", "2"], &["1", "2"]])),
            Err(RepresentError::DuplicateTuple(2))
        ));
    }

    #[test]
    fn validation_examples() {
        let g = gamma_two();
        let err = validate_family(family(&[&["1", "2"]]), &g).unwrap_err();
        let RepresentError::FamilyViolations(v) = err else {
            panic!("expected violations");
        };
        assert!(v.iter().any(|f| matches!(
            f,
            FamilyViolation::EntryRatioInGroup {
                tuple: 1,
                i: 1,
                j: 2,
                ..
            }
        )));

        assert!(validate_family(family(&[&["1", "3"], &["3", "1"]]), &g).is_ok());

        let err = validate_family(family(&[&["2", "6"], &["1", "3"]]), &g).unwrap_err();
        let RepresentError::FamilyViolations(v) = err else {
            panic!("expected violations");
        };
        assert!(v
            .iter()
            .any(|f| matches!(f, FamilyViolation::TupleRatioInGroup { .. })));

        let err = validate_family(family(&[&["1", "3"]]), &g).unwrap_err();
        let RepresentError::FamilyViolations(v) = err else {
            panic!("expected violations");
        };
        assert!(v
            .iter()
            .any(|f| matches!(f, FamilyViolation::MissingPermutation { tuple: 1, .. })));
    }

    #[test]
    fn permutation_orbit_examples() {
        let (orbit, stab) = permutation_orbit(&[q("1"), q("1")]);
        assert_eq!((orbit.len(), stab), (1, 2));
        let (orbit, stab) = permutation_orbit(&[q("1"), q("3")]);
        assert_eq!((orbit.len(), stab), (2, 1));
        let (orbit, stab) = permutation_orbit(&[q("1"), q("1"), q("2")]);
        assert_eq!((orbit.len(), stab), (3, 2));
        for t in [
            vec![q("1"), q("1")],
            vec![q("1"), q("3")],
            vec![q("1"), q("1"), q("2")],
            vec![q("5"), q("7"), q("5"), q("7")],
        ] {
            let k_factorial: usize = (1..=t.len()).product();
            let (orbit, stab) = permutation_orbit(&t);
            assert_eq!(orbit.len() * stab, k_factorial);
        }
    }

    #[test]
    fn permutation_closure() {
        let closed = close_under_permutations(&family(&[&["1", "3"]])).unwrap();
        assert_eq!(closed.len(), 2);
        assert!(closed.contains(&[q("3"), q("1")]));
        let g = gamma_two();
        assert!(validate_family(closed, &g).is_ok());
    }

    #[test]
    fn representable_count_examples() {
        let g = gamma_two();
        let cfg = CensusConfig::default();
        let fam = validated(&[&["1", "1"]], &g);
        let (count, complete) = count_representable(&g, &fam, &q("5"), &cfg).unwrap();
        assert_eq!(count, 11);
        assert!(complete);

        let (count, _) = count_representable(&g, &fam, &q("1"), &cfg).unwrap();
        assert_eq!(count, 1);
    }

    /// Oracle scan over exponents in [−8, 8]² for A = {(1,3),(3,1)}, X = 2.
    #[test]
    fn representable_count_matches_oracle() {
        let g = gamma_two();
        let cfg = CensusConfig::default();

        let mut oracle = BTreeSet::new();
        for (c1, c2) in [(q("1"), q("3")), (q("3"), q("1"))] {
            for a in -8i64..=8 {
                for b in -8i64..=8 {
                    let value = &c1 * crate::multgroup::pow_rational(&q("2"), a)
                        + &c2 * crate::multgroup::pow_rational(&q("2"), b);
                    if !value.is_zero() && height_scalar(&value) <= q("2") {
                        oracle.insert(value);
                    }
                }
            }
        }
        assert_eq!(oracle.len(), 3);
        assert_eq!(oracle, BTreeSet::from([q("1/2"), q("1"), q("2")]));

        let fam = validated(&[&["1", "3"], &["3", "1"]], &g);
        let (count, complete) = count_representable(&g, &fam, &q("2"), &cfg).unwrap();
        assert_eq!(count, 3);
        assert!(complete);
    }

    /// The eleven values at X = 5 from the naive double loop.
    #[test]
    fn eleven_values_at_five() {
        let mut oracle = BTreeSet::new();
        for a in -8i64..=8 {
            for b in -8i64..=8 {
                let value = crate::multgroup::pow_rational(&q("2"), a)
                    + crate::multgroup::pow_rational(&q("2"), b);
                if height_scalar(&value) <= q("5") {
                    oracle.insert(value);
                }
            }
        }
        let expected: BTreeSet<Rational> = [
            "1/4", "1/2", "3/4", "1", "5/4", "3/2", "2", "5/2", "3", "4", "5",
        ]
        .iter()
        .map(|s| q(s))
        .collect();
        assert_eq!(oracle, expected);
    }

    #[test]
    fn count_invariant_under_family_ordering() {
        let g = gamma_two();
        let cfg = CensusConfig::default();
        let a = validated(&[&["1", "3"], &["3", "1"]], &g);
        let b = validated(&[&["3", "1"], &["1", "3"]], &g);
        let x = q("16");
        assert_eq!(
            count_representable(&g, &a, &x, &cfg).unwrap(),
            count_representable(&g, &b, &x, &cfg).unwrap()
        );
    }

    #[test]
    fn predicted_constant_examples() {
        let g = gamma_two();
        let fam = validated(&[&["1", "1"]], &g);
        let p = predicted_constant(&g, &fam).unwrap();
        let ln2 = std::f64::consts::LN_2;
        assert!((p.c_gamma_k.value - 3.0 / (ln2 * ln2)).abs() < 1e-6);
        assert!((p.combined.value - 1.5 / (ln2 * ln2)).abs() < 1e-6);
        assert!((p.combined.value - 3.122).abs() < 1e-3);
        assert_eq!(p.single_orbit, Some(p.c_gamma_k.value / 2.0));
        assert!((p.single_orbit.unwrap() - p.combined.value).abs() < 1e-12);
        assert_eq!(p.power_family, Some(p.combined.value));

        let fam = validated(&[&["1", "3"], &["3", "1"]], &g);
        let p = predicted_constant(&g, &fam).unwrap();
        assert!((p.combined.value - 3.0 / (ln2 * ln2)).abs() < 1e-6);
        assert_eq!(p.single_orbit, Some(p.c_gamma_k.value));
        assert_eq!(p.power_family, None);
    }

    #[test]
    fn ratio_trend_toward_prediction() {
        let g = gamma_two();
        let cfg = CensusConfig::default();
        let fam = validated(&[&["1", "1"]], &g);
        let p = predicted_constant(&g, &fam).unwrap();
        let mut ratios = Vec::new();
        for e in [8u64, 16, 32] {
            let x = Rational::from_integer(BigInt::from(1) << e);
            let (count, complete) = count_representable(&g, &fam, &x, &cfg).unwrap();
            assert!(complete, "incomplete at 2^{e}");
            let ratio = count as f64 / (p.combined.value * ln_f64(&x).powi(2));
            ratios.push(ratio);
        }
        assert!(
            (ratios[2] - 1.0).abs() <= (ratios[1] - 1.0).abs(),
            "ratios {ratios:?}"
        );
        assert!((ratios[2] - 1.0).abs() <= 0.3, "ratios {ratios:?}");
    }

    #[test]
    fn scalar_group_required() {
        let u2 = crate::multgroup::unit_group_descriptor(&[2], 2).unwrap();
        assert!(matches!(
            validate_family(family(&[&["1", "1"]]), &u2),
            Err(RepresentError::ScalarGroupRequired)
        ));
    }
}
