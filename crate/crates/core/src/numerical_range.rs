//! Numerical range of normal matrices.
//!
//! For a normal `W` the set `{⟨φ|W|φ⟩ : ‖φ‖ = 1}` is the convex hull of its
//! eigenvalues, so `min_φ |⟨φ|W|φ⟩|` is the Euclidean distance from the
//! origin to a convex polygon in the complex plane.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::circuit::Matrix;

/// Off-diagonal magnitudes at or below this are treated as structural zeros
/// when splitting a matrix into independent blocks.
const BLOCK_ZERO: f64 = 1e-12;
/// Eigenvalues of the Hermitian probe closer than this are resolved again.
const CLUSTER_GAP: f64 = 1e-8;
/// Points closer than this are merged before building the hull.
const SNAP: f64 = 1e-12;

/// Eigenvalues of a normal matrix (multiset, unordered).
pub fn normal_eigenvalues(w: &Matrix) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(w.nrows());
    for block in diagonal_blocks(w) {
        if block.len() == 1 {
            out.push(w[(block[0], block[0])]);
        } else {
            let sub = DMatrix::from_fn(block.len(), block.len(), |i, j| w[(block[i], block[j])]);
            out.extend(resolve(&sub, 0));
        }
    }
    out
}

// Index sets of the connected components of W's sparsity pattern.
fn diagonal_blocks(w: &Matrix) -> Vec<Vec<usize>> {
    let n = w.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for j in 0..n {
        for i in 0..n {
            if i != j && w[(i, j)].norm() > BLOCK_ZERO {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

// Diagonalize the Hermitian part of e^{-iα}W for an irrational-ish α. Its
// eigenvectors are eigenvectors of W except inside near-degenerate clusters,
// which are compressed onto their subspace and resolved with another angle.
fn resolve(w: &Matrix, depth: usize) -> Vec<Complex64> {
    let m = w.nrows();
    if m == 1 {
        return vec![w[(0, 0)]];
    }
    let mean = w.trace() / m as f64;
    let spread = (w - Matrix::identity(m, m) * mean).norm();
    if spread <= 1e-13 * (m as f64).sqrt() {
        return vec![mean; m];
    }

    let alpha = 0.618_033_988_749_894_9 * (depth as f64 + 1.0) + 0.3;
    let rot = Complex64::from_polar(1.0, -alpha);
    let probe = (w * rot + w.adjoint() * rot.conj()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(probe);

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut out = Vec::with_capacity(m);
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] < CLUSTER_GAP {
            end += 1;
        }
        let cols = &order[start..end];
        let basis = DMatrix::from_fn(m, cols.len(), |i, j| eig.eigenvectors[(i, cols[j])]);
        let compressed = basis.adjoint() * w * &basis;
        if cols.len() == 1 || depth >= 6 {
            // Rayleigh quotients always lie inside the true hull
            out.extend((0..cols.len()).map(|i| compressed[(i, i)]));
        } else {
            out.extend(resolve(&compressed, depth + 1));
        }
        start = end;
    }
    out
}

/// Convex hull (counter-clockwise, no repeated points, collinear points
/// dropped) of `points` in the complex plane.
pub fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut snapped: Vec<Complex64> = Vec::with_capacity(pts.len());
    for p in pts {
        if !snapped.iter().rev().take(8).any(|q| (q - p).norm() < SNAP) {
            snapped.push(p);
        }
    }
    if snapped.len() <= 2 {
        return snapped;
    }
    let cross = |o: Complex64, a: Complex64, b: Complex64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * snapped.len());
    for pass in 0..2 {
        let lower_len = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> = if pass == 0 {
            Box::new(snapped.iter())
        } else {
            Box::new(snapped.iter().rev())
        };
        for &p in iter {
            while hull.len() >= lower_len + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn segment_distance(a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a.norm();
    }
    // projection of the origin onto the segment
    let t = (-(a.re * d.re + a.im * d.im) / len2).clamp(0.0, 1.0);
    (a + d * t).norm()
}

/// Distance from the origin to the convex hull of `points` (0 if inside or on it).
pub fn origin_distance(points: &[Complex64]) -> f64 {
    let hull = convex_hull(points);
    match hull.len() {
        0 => f64::NAN,
        1 => hull[0].norm(),
        2 => segment_distance(hull[0], hull[1]),
        k => {
            let inside = (0..k).all(|i| {
                let (a, b) = (hull[i], hull[(i + 1) % k]);
                // origin left of (or on) every counter-clockwise edge
                (b - a).re * (-a).im - (b - a).im * (-a).re >= 0.0
            });
            if inside {
                0.0
            } else {
                (0..k)
                    .map(|i| segment_distance(hull[i], hull[(i + 1) % k]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// `min_φ |⟨φ|W|φ⟩|` for normal `W`.
pub fn min_numerical_radius(w: &Matrix) -> f64 {
    origin_distance(&normal_eigenvalues(w))
}
