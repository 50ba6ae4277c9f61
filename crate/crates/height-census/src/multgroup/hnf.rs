//! Integer row Hermite normal form with transform tracking.
//!
//! Used to extract a deterministic lattice basis from generator exponent
//! rows, a basis of the integer relation (kernel) lattice, and to solve
//! membership systems z·H = t over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Row Hermite normal form H = U·A for a unimodular U.
#[derive(Debug, Clone)]
pub struct HnfResult {
    /// The HNF rows, same shape as the input; zero rows sit at the bottom.
    pub rows: Vec<Vec<BigInt>>,
    /// Unimodular transform: `transform[i]` expresses `rows[i]` in input rows.
    pub transform: Vec<Vec<BigInt>>,
    /// Number of non-zero rows of `rows`.
    pub rank: usize,
    /// Pivot column of each non-zero row, strictly increasing.
    pub pivot_cols: Vec<usize>,
}

impl HnfResult {
    /// The non-zero HNF rows (a basis of the row lattice).
    pub fn basis_rows(&self) -> &[Vec<BigInt>] {
        &self.rows[..self.rank]
    }

    /// Transform rows mapping to zero HNF rows: a basis of the left kernel
    /// lattice {z : z·A = 0}.
    pub fn kernel_rows(&self) -> &[Vec<BigInt>] {
        &self.transform[self.rank..]
    }
}

/// Extended Euclid: returns (g, x, y) with g = gcd(a,b) ≥ 0 and x·a + y·b = g.
fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut x0, mut x1) = (BigInt::one(), BigInt::zero());
    let (mut y0, mut y1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let x2 = &x0 - &q * &x1;
        x0 = std::mem::replace(&mut x1, x2);
        let y2 = &y0 - &q * &y1;
        y0 = std::mem::replace(&mut y1, y2);
    }
    if r0.is_negative() {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// Disjoint mutable borrows of rows `a` and `b`, requiring a < b.
fn two_rows<T>(rows: &mut [Vec<T>], a: usize, b: usize) -> (&mut [T], &mut [T]) {
    let (head, tail) = rows.split_at_mut(b);
    (&mut head[a], &mut tail[0])
}

/// Replace (ra, rb) by (s·ra + t·rb, p·rb − q·ra) elementwise.
fn combine_rows(
    ra: &mut [BigInt],
    rb: &mut [BigInt],
    s: &BigInt,
    t: &BigInt,
    p: &BigInt,
    q: &BigInt,
) {
    for (a, b) in ra.iter_mut().zip(rb.iter_mut()) {
        let top = s * &*a + t * &*b;
        let bot = &*a * (-q) + &*b * p;
        *a = top;
        *b = bot;
    }
}

/// Compute the row HNF of `a` together with the unimodular transform.
///
/// Pivots are positive and entries above each pivot are reduced into
/// [0, pivot), so the result is canonical for a given row lattice.
pub fn hnf_with_transform(a: &[Vec<BigInt>]) -> HnfResult {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut h: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut row = 0usize;
    let mut pivot_cols = Vec::new();

    for col in 0..n {
        if row == m {
            break;
        }
        let Some(first) = (row..m).find(|&i| !h[i][col].is_zero()) else {
            continue;
        };
        h.swap(row, first);
        u.swap(row, first);
        for i in (row + 1)..m {
            if h[i][col].is_zero() {
                continue;
            }
            let (g, s, t) = xgcd(&h[row][col], &h[i][col]);
            let p = &h[row][col] / &g;
            let q = &h[i][col] / &g;
            let (hr, hi) = two_rows(&mut h, row, i);
            combine_rows(hr, hi, &s, &t, &p, &q);
            let (ur, ui) = two_rows(&mut u, row, i);
            combine_rows(ur, ui, &s, &t, &p, &q);
        }
        if h[row][col].is_negative() {
            for x in h[row].iter_mut().chain(u[row].iter_mut()) {
                *x = -std::mem::take(x);
            }
        }
        let pivot = h[row][col].clone();
        for i in 0..row {
            let q = h[i][col].div_floor(&pivot);
            if q.is_zero() {
                continue;
            }
            let (hi, hr) = two_rows(&mut h, i, row);
            for (d, b) in hi.iter_mut().zip(hr.iter()) {
                *d -= &q * b;
            }
            let (ui, ur) = two_rows(&mut u, i, row);
            for (d, b) in ui.iter_mut().zip(ur.iter()) {
                *d -= &q * b;
            }
        }
        pivot_cols.push(col);
        row += 1;
    }

    HnfResult {
        rows: h,
        transform: u,
        rank: row,
        pivot_cols,
    }
}

/// Solve z·basis = target over Z, where `basis` holds the non-zero rows of
/// an HNF with pivot columns `pivot_cols`. Returns None when no integer
/// solution exists.
pub fn solve_hnf_system(
    basis: &[Vec<BigInt>],
    pivot_cols: &[usize],
    target: &[BigInt],
) -> Option<Vec<BigInt>> {
    let mut residual = target.to_vec();
    let mut z = Vec::with_capacity(basis.len());
    for (row, &pc) in basis.iter().zip(pivot_cols) {
        let pivot = &row[pc];
        let (q, r) = residual[pc].div_rem(pivot);
        if !r.is_zero() {
            return None;
        }
        for (res, b) in residual.iter_mut().zip(row) {
            *res -= &q * b;
        }
        z.push(q);
    }
    if residual.iter().all(Zero::is_zero) {
        Some(z)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        let n = b[0].len();
        a.iter()
            .map(|row| {
                (0..n)
                    .map(|c| row.iter().zip(b).map(|(x, br)| x * &br[c]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn transform_reproduces_hnf() {
        let a = mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let r = hnf_with_transform(&a);
        assert_eq!(mat_mul(&r.transform, &a), r.rows);
        assert_eq!(r.rank, 3);
        for (i, &pc) in r.pivot_cols.iter().enumerate() {
            assert!(r.rows[i][pc] > BigInt::zero());
            for j in 0..i {
                assert!(r.rows[j][pc] >= BigInt::zero() && r.rows[j][pc] < r.rows[i][pc]);
            }
        }
    }

    #[test]
    fn kernel_rows_annihilate_input() {
        let a = mat(&[&[1, -1], &[2, -2], &[0, 0], &[3, 1]]);
        let r = hnf_with_transform(&a);
        assert_eq!(r.rank, 2);
        assert_eq!(r.kernel_rows().len(), 2);
        for krow in r.kernel_rows() {
            let prod: Vec<BigInt> = (0..2)
                .map(|c| krow.iter().zip(&a).map(|(z, ar)| z * &ar[c]).sum())
                .collect();
            assert!(prod.iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn solve_recovers_combinations() {
        let a = mat(&[&[1, -1, 0], &[0, 2, 1]]);
        let r = hnf_with_transform(&a);
        let basis = r.basis_rows();
        // target = 2·b0 + 3·b1
        let target: Vec<BigInt> = (0..3)
            .map(|c| BigInt::from(2) * &basis[0][c] + BigInt::from(3) * &basis[1][c])
            .collect();
        let z = solve_hnf_system(basis, &r.pivot_cols, &target).unwrap();
        assert_eq!(z, vec![BigInt::from(2), BigInt::from(3)]);
        // off-lattice target
        let bad = vec![BigInt::one(), BigInt::zero(), BigInt::zero()];
        let sol = solve_hnf_system(basis, &r.pivot_cols, &bad);
        if let Some(z) = sol {
            let back: Vec<BigInt> = (0..3)
                .map(|c| z.iter().zip(basis).map(|(zi, br)| zi * &br[c]).sum())
                .collect();
            assert_eq!(back, bad);
        }
    }

    #[test]
    fn canonical_for_row_equivalent_inputs() {
        let a = mat(&[&[1, 2, 3], &[4, 5, 6]]);
        let b = mat(&[&[5, 7, 9], &[1, 2, 3], &[4, 5, 6]]);
        let ra = hnf_with_transform(&a);
        let rb = hnf_with_transform(&b);
        assert_eq!(ra.basis_rows(), rb.basis_rows());
    }
}
