//! Polyhedral geometry for sublevel sets of max-plus sums.
//!
//! A [`MaxPlusSpec`] describes the function h(ξ) = Σ_g max over the linear
//! forms of group g, and the body {ξ : h(ξ) ≤ 1}. Choosing one maximizing
//! form per group decomposes the body into convex cells; every cell contains
//! the origin, so cells are never empty, only possibly lower-dimensional.
//! Volumes come from vertex enumeration plus a recursive facet-cone formula;
//! a seeded Monte Carlo estimate serves as an independent cross-check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Relative tolerance for rank, containment, and activity decisions.
pub const REL_TOL: f64 = 1e-9;

/// Default seed for the Monte Carlo cross-check.
pub const DEFAULT_MC_SEED: u64 = 0xE5EED;

/// h(ξ) = Σ over groups of max over that group's forms of form·ξ.
///
/// Constructors must list each group's distinct forms only and include the
/// zero form, so the group maximum is the intended max(0, ℓ_1, …, ℓ_k).
#[derive(Debug, Clone)]
pub struct MaxPlusSpec {
    pub dim: usize,
    pub groups: Vec<Vec<Vec<f64>>>,
}

impl MaxPlusSpec {
    /// h(ξ), evaluated directly from the definition.
    pub fn evaluate(&self, xi: &[f64]) -> f64 {
        self.groups
            .iter()
            .map(|g| {
                g.iter()
                    .map(|f| dot(f, xi))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum()
    }
}

/// One selector cell: the chosen form index per group, the cell's
/// half-space description, its vertices, and its dim-volume.
#[derive(Debug, Clone)]
pub struct Cell {
    pub selector: Vec<usize>,
    pub constraints: Vec<(Vec<f64>, f64)>,
    pub vertices: Vec<Vec<f64>>,
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    /// A cell admits a recession direction: the body is not bounded.
    Unbounded { selector: Vec<usize> },
    /// Vertex enumeration could not certify the cell within tolerance.
    CannotCertify {
        selector: Vec<usize>,
        reason: String,
    },
}

impl fmt::Display for PolytopeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolytopeError::Unbounded { selector } => {
                write!(f, "unbounded cell for selector {selector:?}")
            }
            PolytopeError::CannotCertify { selector, reason } => {
                write!(f, "cannot certify cell {selector:?}: {reason}")
            }
        }
    }
}

impl std::error::Error for PolytopeError {}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Visit all k-subsets of 0..n in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Solve the square system given by the selected constraint rows.
fn solve_active(rows: &[(Vec<f64>, f64)], pick: &[usize], dim: usize) -> Option<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = pick.iter().map(|&i| rows[i].0.clone()).collect();
    let mut rhs: Vec<f64> = pick.iter().map(|&i| rows[i].1).collect();
    for col in 0..dim {
        let (best, mag) = (col..dim)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if mag < REL_TOL {
            return None;
        }
        m.swap(col, best);
        rhs.swap(col, best);
        let pivot_row = m[col].clone();
        let pivot_rhs = rhs[col];
        for r in 0..dim {
            if r == col {
                continue;
            }
            let factor = m[r][col] / pivot_row[col];
            if factor == 0.0 {
                continue;
            }
            for (x, p) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= factor * p;
            }
            rhs[r] -= factor * pivot_rhs;
        }
    }
    Some((0..dim).map(|i| rhs[i] / m[i][i]).collect())
}

/// Basis of the (approximate) nullspace of the given rows.
fn nullspace(rows: &[&[f64]], dim: usize) -> Vec<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    let scale = m
        .iter()
        .flat_map(|r| r.iter().map(|x| x.abs()))
        .fold(1.0f64, f64::max);
    let tol = REL_TOL * scale;
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..dim {
        let Some((best, mag)) = (row..m.len())
            .map(|r| (r, m[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            break;
        };
        if mag <= tol {
            continue;
        }
        m.swap(row, best);
        let pivot_row = m[row].clone();
        for (r, mrow) in m.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = mrow[col] / pivot_row[col];
            if factor == 0.0 {
                continue;
            }
            for (x, p) in mrow.iter_mut().zip(&pivot_row) {
                *x -= factor * p;
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let mut basis = Vec::new();
    for free in (0..dim).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![0.0; dim];
        v[free] = 1.0;
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[r][free] / m[r][pc];
        }
        basis.push(v);
    }
    basis
}

/// Number of dimensions spanned by the points around their first element.
fn affine_rank(points: &[Vec<f64>], dim: usize) -> usize {
    let Some(origin) = points.first() else {
        return 0;
    };
    let diffs: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(origin).map(|(a, b)| a - b).collect())
        .collect();
    let refs: Vec<&[f64]> = diffs.iter().map(Vec::as_slice).collect();
    dim - nullspace(&refs, dim).len()
}

/// All vertices of {A ξ ≤ b}: feasible solutions of dim-subsets of tight rows.
pub fn enumerate_vertices(constraints: &[(Vec<f64>, f64)], dim: usize) -> Vec<Vec<f64>> {
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for_each_combination(constraints.len(), dim, |pick| {
        let Some(x) = solve_active(constraints, pick, dim) else {
            return;
        };
        let xscale = x.iter().map(|c| c.abs()).fold(1.0, f64::max);
        let feasible = constraints
            .iter()
            .all(|(a, b)| dot(a, &x) <= b + REL_TOL * (b.abs() + norm(a) * xscale + 1.0));
        if !feasible {
            return;
        }
        let dup = vertices.iter().any(|v| {
            v.iter()
                .zip(&x)
                .all(|(p, q)| (p - q).abs() <= 1e-7 * (1.0 + p.abs().max(q.abs())))
        });
        if !dup {
            vertices.push(x);
        }
    });
    vertices
}

/// A direction d ≠ 0 with A d ≤ 0, if one exists (witness of unboundedness
/// for a polyhedron containing the origin).
pub fn recession_direction(constraints: &[(Vec<f64>, f64)], dim: usize) -> Option<Vec<f64>> {
    let rows: Vec<&[f64]> = constraints.iter().map(|(a, _)| a.as_slice()).collect();
    let admits = |d: &[f64]| {
        let scale = d.iter().map(|c| c.abs()).fold(0.0, f64::max);
        scale > 0.5 && rows.iter().all(|a| dot(a, d) <= REL_TOL * norm(a) * scale)
    };
    // lineality: nullspace of the whole matrix
    if let Some(d) = nullspace(&rows, dim).into_iter().next() {
        return Some(d);
    }
    // extreme rays are active on dim−1 independent rows
    let mut found = None;
    for_each_combination(rows.len(), dim.saturating_sub(1), |pick| {
        if found.is_some() {
            return;
        }
        let sub: Vec<&[f64]> = pick.iter().map(|&i| rows[i]).collect();
        let ns = nullspace(&sub, dim);
        if ns.len() != 1 {
            return;
        }
        let d = ns.into_iter().next().unwrap();
        if admits(&d) {
            found = Some(d);
        } else {
            let neg: Vec<f64> = d.iter().map(|c| -c).collect();
            if admits(&neg) {
                found = Some(neg);
            }
        }
    });
    found
}

/// Volume of a bounded polytope given its vertices and half-space rows,
/// by the facet-cone formula from the centroid.
pub fn hull_volume(vertices: &[Vec<f64>], constraints: &[(Vec<f64>, f64)], dim: usize) -> f64 {
    if vertices.len() <= dim {
        return 0.0;
    }
    if dim == 1 {
        let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
        let hi = vertices
            .iter()
            .map(|v| v[0])
            .fold(f64::NEG_INFINITY, f64::max);
        return (hi - lo).max(0.0);
    }
    let n = vertices.len() as f64;
    let centroid: Vec<f64> = (0..dim)
        .map(|c| vertices.iter().map(|v| v[c]).sum::<f64>() / n)
        .collect();
    let vscale = vertices
        .iter()
        .flat_map(|v| v.iter().map(|c| c.abs()))
        .fold(1.0f64, f64::max);

    let mut total = 0.0;
    for (fi, (a, b)) in constraints.iter().enumerate() {
        let an = norm(a);
        if an < REL_TOL {
            continue;
        }
        let tol = 1e-7 * (b.abs() + an * vscale + 1.0);
        let face: Vec<&Vec<f64>> = vertices
            .iter()
            .filter(|v| (dot(a, v) - b).abs() <= tol)
            .collect();
        if face.len() < dim {
            continue;
        }
        let height = (b - dot(a, &centroid)) / an;
        if height <= REL_TOL {
            continue;
        }
        // orthonormal basis of the facet hyperplane
        let unit: Vec<f64> = a.iter().map(|c| c / an).collect();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim - 1);
        for axis in 0..dim {
            let mut v = vec![0.0; dim];
            v[axis] = 1.0;
            let proj = dot(&v, &unit);
            for (vc, uc) in v.iter_mut().zip(&unit) {
                *vc -= proj * uc;
            }
            for bvec in &basis {
                let proj = dot(&v, bvec);
                for (vc, bc) in v.iter_mut().zip(bvec) {
                    *vc -= proj * bc;
                }
            }
            let vn = norm(&v);
            if vn > 1e-6 {
                basis.push(v.iter().map(|c| c / vn).collect());
                if basis.len() == dim - 1 {
                    break;
                }
            }
        }
        if basis.len() < dim - 1 {
            continue;
        }
        let origin = face[0];
        let project = |p: &[f64]| -> Vec<f64> {
            basis
                .iter()
                .map(|bvec| {
                    p.iter()
                        .zip(origin.iter())
                        .zip(bvec)
                        .map(|((pc, oc), bc)| (pc - oc) * bc)
                        .sum()
                })
                .collect()
        };
        let face_pts: Vec<Vec<f64>> = face.iter().map(|p| project(p)).collect();
        let face_rows: Vec<(Vec<f64>, f64)> = constraints
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != fi)
            .map(|(_, (aj, bj))| {
                let arow: Vec<f64> = basis.iter().map(|bvec| dot(aj, bvec)).collect();
                (arow, bj - dot(aj, origin))
            })
            .filter(|(arow, _)| norm(arow) > REL_TOL)
            .collect();
        total += height * hull_volume(&face_pts, &face_rows, dim - 1) / dim as f64;
    }
    total
}

/// Normalize rows to unit normals, dropping trivial rows and duplicates.
fn normalized_rows(raw: Vec<(Vec<f64>, f64)>) -> Vec<(Vec<f64>, f64)> {
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for (a, b) in raw {
        let an = norm(&a);
        if an < REL_TOL {
            continue;
        }
        let unit: Vec<f64> = a.iter().map(|c| c / an).collect();
        let rhs = b / an;
        let dup = rows.iter().any(|(u, r)| {
            (rhs - r).abs() <= 1e-9 && unit.iter().zip(u).all(|(x, y)| (x - y).abs() <= 1e-9)
        });
        if !dup {
            rows.push((unit, rhs));
        }
    }
    rows
}

/// Decompose {h ≤ 1} into selector cells with vertices and volumes.
///
/// Returned cells are full-dimensional with pairwise disjoint interiors and
/// cover the body; lower-dimensional selector cells are dropped (they carry
/// no volume). Any recession direction in any cell is reported as Unbounded.
pub fn decompose_cells(spec: &MaxPlusSpec) -> Result<Vec<Cell>, PolytopeError> {
    let dim = spec.dim;
    let mut cells = Vec::new();
    let mut selector = vec![0usize; spec.groups.len()];
    loop {
        let mut raw: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut budget = vec![0.0; dim];
        for (g, &pick) in spec.groups.iter().zip(&selector) {
            let chosen = &g[pick];
            for (bc, cc) in budget.iter_mut().zip(chosen) {
                *bc += cc;
            }
            for (fi, form) in g.iter().enumerate() {
                if fi == pick {
                    continue;
                }
                let row: Vec<f64> = form.iter().zip(chosen).map(|(f, c)| f - c).collect();
                raw.push((row, 0.0));
            }
        }
        raw.push((budget, 1.0));
        let rows = normalized_rows(raw);

        if recession_direction(&rows, dim).is_some() {
            return Err(PolytopeError::Unbounded {
                selector: selector.clone(),
            });
        }
        let vertices = enumerate_vertices(&rows, dim);
        if vertices.len() > dim && affine_rank(&vertices, dim) == dim {
            let volume = hull_volume(&vertices, &rows, dim);
            if !volume.is_finite() {
                return Err(PolytopeError::CannotCertify {
                    selector: selector.clone(),
                    reason: "non-finite cell volume".into(),
                });
            }
            cells.push(Cell {
                selector: selector.clone(),
                constraints: rows,
                vertices,
                volume,
            });
        }

        let mut i = 0;
        loop {
            if i == selector.len() {
                return Ok(cells);
            }
            selector[i] += 1;
            if selector[i] < spec.groups[i].len() {
                break;
            }
            selector[i] = 0;
            i += 1;
        }
    }
}

/// Axis-aligned box covering all cell vertices, padded.
pub fn bounding_box(cells: &[Cell], dim: usize) -> Vec<(f64, f64)> {
    let mut bbox = vec![(f64::INFINITY, f64::NEG_INFINITY); dim];
    for cell in cells {
        for v in &cell.vertices {
            for (c, (lo, hi)) in v.iter().zip(bbox.iter_mut()) {
                *lo = lo.min(*c);
                *hi = hi.max(*c);
            }
        }
    }
    bbox.iter()
        .map(|&(lo, hi)| {
            let pad = 1e-6 * (1.0 + lo.abs().max(hi.abs()));
            (lo - pad, hi + pad)
        })
        .collect()
}

/// Monte Carlo estimate of vol{h ≤ 1} by rejection inside `bbox`.
/// Returns (estimate, three-sigma error bound).
pub fn monte_carlo_volume(
    spec: &MaxPlusSpec,
    bbox: &[(f64, f64)],
    samples: u64,
    seed: u64,
) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let box_vol: f64 = bbox.iter().map(|(lo, hi)| hi - lo).product();
    let mut hits = 0u64;
    let mut point = vec![0.0; spec.dim];
    for _ in 0..samples {
        for (c, &(lo, hi)) in point.iter_mut().zip(bbox) {
            *c = rng.gen_range(lo..hi);
        }
        if spec.evaluate(&point) <= 1.0 {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let sigma = box_vol * (p * (1.0 - p) / samples as f64).sqrt();
    (box_vol * p, 3.0 * sigma + 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cross_polytope_spec(dim: usize) -> MaxPlusSpec {
        // h = Σ_i max(0, ξ_i, −ξ_i) = Σ |ξ_i|
        let groups = (0..dim)
            .map(|i| {
                let mut plus = vec![0.0; dim];
                plus[i] = 1.0;
                let mut minus = vec![0.0; dim];
                minus[i] = -1.0;
                vec![vec![0.0; dim], plus, minus]
            })
            .collect();
        MaxPlusSpec { dim, groups }
    }

    #[test]
    fn vertices_of_a_box() {
        let mut rows = Vec::new();
        for i in 0..3 {
            let mut a = vec![0.0; 3];
            a[i] = 1.0;
            rows.push((a.clone(), 2.0));
            let neg: Vec<f64> = a.iter().map(|c| -c).collect();
            rows.push((neg, 1.0));
        }
        let v = enumerate_vertices(&rows, 3);
        assert_eq!(v.len(), 8);
        let vol = hull_volume(&v, &rows, 3);
        assert!((vol - 27.0).abs() < 1e-9, "box volume {vol}");
    }

    #[test]
    fn simplex_volume() {
        // ξ_i ≥ 0, Σ ξ_i ≤ 1 in 4 dims: volume 1/24
        let mut rows = Vec::new();
        for i in 0..4 {
            let mut a = vec![0.0; 4];
            a[i] = -1.0;
            rows.push((a, 0.0));
        }
        rows.push((vec![1.0; 4], 1.0));
        let v = enumerate_vertices(&rows, 4);
        assert_eq!(v.len(), 5);
        let vol = hull_volume(&v, &rows, 4);
        assert!((vol - 1.0 / 24.0).abs() < 1e-12, "simplex volume {vol}");
    }

    #[test]
    fn unbounded_is_detected() {
        // half-strip: 0 ≤ ξ_2 ≤ 1, ξ_1 ≥ 0
        let rows = vec![
            (vec![0.0, 1.0], 1.0),
            (vec![0.0, -1.0], 0.0),
            (vec![-1.0, 0.0], 0.0),
        ];
        assert!(recession_direction(&rows, 2).is_some());
        // triangle: bounded
        let tri = vec![
            (vec![-1.0, 0.0], 0.0),
            (vec![0.0, -1.0], 0.0),
            (vec![1.0, 1.0], 1.0),
        ];
        assert!(recession_direction(&tri, 2).is_none());
    }

    #[test]
    fn cross_polytope_cells_and_volume() {
        for dim in 1..=3 {
            let spec = cross_polytope_spec(dim);
            let cells = decompose_cells(&spec).unwrap();
            let total: f64 = cells.iter().map(|c| c.volume).sum();
            // vol{Σ|ξ_i| ≤ 1} = 2^d/d!
            let expected = (2.0f64).powi(dim as i32) / (1..=dim).map(|i| i as f64).product::<f64>();
            assert!(
                (total - expected).abs() < 1e-9,
                "cross polytope dim {dim}: {total} vs {expected}"
            );
            assert_eq!(cells.len(), 2usize.pow(dim as u32));
        }
    }

    #[test]
    fn monte_carlo_agrees_with_cells() {
        let spec = cross_polytope_spec(2);
        let cells = decompose_cells(&spec).unwrap();
        let total: f64 = cells.iter().map(|c| c.volume).sum();
        let bbox = bounding_box(&cells, 2);
        let (mc, err) = monte_carlo_volume(&spec, &bbox, 200_000, DEFAULT_MC_SEED);
        assert!(
            (mc - total).abs() <= err + 1e-9,
            "mc {mc} vs exact {total} (err {err})"
        );
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let spec = cross_polytope_spec(3);
        let cells = decompose_cells(&spec).unwrap();
        let bbox = bounding_box(&cells, 3);
        let a = monte_carlo_volume(&spec, &bbox, 50_000, 7);
        let b = monte_carlo_volume(&spec, &bbox, 50_000, 7);
        assert_eq!(a, b);
    }

    #[test]
    fn unbounded_spec_reports_error() {
        // h = max(0, ξ_1 − ξ_2): the sublevel set is an unbounded slab
        let spec = MaxPlusSpec {
            dim: 2,
            groups: vec![vec![vec![0.0, 0.0], vec![1.0, -1.0]]],
        };
        assert!(matches!(
            decompose_cells(&spec),
            Err(PolytopeError::Unbounded { .. })
        ));
    }
}
