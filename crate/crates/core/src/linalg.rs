//! Symmetric tridiagonal eigensolvers.
//!
//! Eigenvalues come from the implicit QL iteration. Eigenvectors of large
//! matrices are obtained by inverse iteration on a pivoted tridiagonal LU
//! factorization, with modified Gram–Schmidt inside clusters of close
//! eigenvalues; small matrices can carry the QL rotations instead.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;
const INVERSE_ITERATIONS: usize = 3;
/// Eigenvalues closer than this fraction of the matrix norm are treated as a cluster.
const CLUSTER_FRACTION: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples entries `i` and `i + 1`.
    pub off: Vec<f64>,
}

/// Eigenpairs with eigenvectors stored node-major: `vectors[i * modes + j]`
/// is component `i` of eigenvector `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub modes: usize,
}

impl EigenPairs {
    pub fn component(&self, node: usize, mode: usize) -> f64 {
        self.vectors[node * self.modes + mode]
    }

    pub fn row(&self, node: usize) -> &[f64] {
        &self.vectors[node * self.modes..(node + 1) * self.modes]
    }
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Precondition("empty tridiagonal matrix".into()));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::Precondition(format!(
                "off-diagonal length {} does not match dimension {}",
                off.len(),
                diag.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        tql(&mut d, &mut e, None)?;
        d.sort_by(f64::total_cmp);
        Ok(d)
    }

    /// All eigenpairs by QL with accumulated rotations. `O(n^3)`; meant for
    /// small matrices.
    pub fn eigenpairs_dense(&self) -> Result<EigenPairs> {
        let n = self.len();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        tql(&mut d, &mut e, Some(&mut z))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
        let values = order.iter().map(|&j| d[j]).collect();
        let mut vectors = vec![0.0; n * n];
        for i in 0..n {
            for (jj, &j) in order.iter().enumerate() {
                vectors[i * n + jj] = z[i * n + j];
            }
        }
        Ok(EigenPairs { values, vectors, modes: n })
    }

    /// The lowest `modes` eigenpairs (all when `modes == 0`): QL eigenvalues
    /// followed by inverse iteration for the vectors.
    pub fn eigenpairs(&self, modes: usize) -> Result<EigenPairs> {
        let n = self.len();
        let all = self.eigenvalues()?;
        let modes = if modes == 0 { n } else { modes.min(n) };
        let values = all[..modes].to_vec();
        let vectors = self.inverse_iteration(&values);
        Ok(EigenPairs { values, vectors, modes })
    }

    /// Eigenvectors for the given ascending eigenvalues, node-major.
    pub fn inverse_iteration(&self, values: &[f64]) -> Vec<f64> {
        let n = self.len();
        let modes = values.len();
        let mut out = vec![0.0; n * modes];
        let scale = self.norm_bound().max(f64::MIN_POSITIVE);
        let window = CLUSTER_FRACTION * scale;
        let tiny = f64::EPSILON * scale;
        let mut cluster: Vec<Vec<f64>> = Vec::new();
        let mut x = vec![0.0; n];
        for (j, &lambda) in values.iter().enumerate() {
            if j > 0 && lambda - values[j - 1] > window {
                cluster.clear();
            }
            let lu = TridiagonalLu::factor(&self.off, &self.diag, lambda, tiny);
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = start_component(i, j);
            }
            normalize(&mut x);
            for _ in 0..INVERSE_ITERATIONS {
                lu.solve(&mut x);
                orthogonalize(&mut x, &cluster);
                if !normalize(&mut x) {
                    for (i, xi) in x.iter_mut().enumerate() {
                        *xi = start_component(i, j + modes);
                    }
                    orthogonalize(&mut x, &cluster);
                    normalize(&mut x);
                }
            }
            // deterministic sign: largest component positive
            let (imax, _) = x
                .iter()
                .enumerate()
                .fold((0, 0.0), |acc, (i, &v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
            if x[imax] < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
            for i in 0..n {
                out[i * modes + j] = x[i];
            }
            cluster.push(x.clone());
        }
        out
    }

    /// Solves `(T - sigma I) x = rhs` in place.
    pub fn solve_shifted(&self, sigma: f64, rhs: &mut [f64]) {
        let tiny = f64::EPSILON * self.norm_bound().max(f64::MIN_POSITIVE);
        TridiagonalLu::factor(&self.off, &self.diag, sigma, tiny).solve(rhs);
    }

    /// Number of eigenvalues strictly below `sigma` (Sturm count).
    pub fn count_below(&self, sigma: f64) -> usize {
        let tiny = f64::EPSILON * self.norm_bound().max(f64::MIN_POSITIVE);
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let coupling = if i > 0 { self.off[i - 1] * self.off[i - 1] / q } else { 0.0 };
            q = self.diag[i] - sigma - coupling;
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Eigenvalues strictly below `sigma` in ascending order, by bisection on
    /// the Sturm count.
    pub fn eigenvalues_below(&self, sigma: f64) -> Vec<f64> {
        let total = self.count_below(sigma);
        let bound = self.norm_bound();
        let mut out = Vec::with_capacity(total);
        for k in 0..total {
            let (mut lo, mut hi) = (-bound - 1.0, sigma);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.count_below(mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        out
    }
}

fn start_component(i: usize, j: usize) -> f64 {
    // splitmix64 of (i, j) mapped to [-1, 1)
    let mut z = (i as u64)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((j as u64).wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

fn normalize(x: &mut [f64]) -> bool {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return false;
    }
    let norm = x.iter().map(|v| (v / scale) * (v / scale)).sum::<f64>().sqrt() * scale;
    x.iter_mut().for_each(|v| *v /= norm);
    true
}

fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for q in basis {
        let dot: f64 = q.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        x.iter_mut().zip(q).for_each(|(xi, qi)| *xi -= dot * qi);
    }
}

/// LU factorization of `T - sigma I` with partial pivoting.
struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(off: &[f64], diag: &[f64], sigma: f64, tiny: f64) -> Self {
        let n = diag.len();
        let mut dl = off.to_vec();
        let mut du = off.to_vec();
        let mut d: Vec<f64> = diag.iter().map(|v| v - sigma).collect();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        for v in d.iter_mut() {
            if v.abs() < tiny {
                *v = if *v < 0.0 { -tiny } else { tiny };
            }
        }
        Self { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

/// Implicit QL with Wilkinson shifts. `e[i]` couples `i` and `i + 1`;
/// `e[n - 1]` is scratch. When `z` is given (row-major `n x n`) the rotations
/// are accumulated into its columns.
fn tql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::NoConvergence(format!("QL iteration stalled at index {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_matches_ql() {
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|i| 2.0 - 0.1 * i as f64).collect();
        let t = SymTridiagonal::new(diag, vec![-1.0; n - 1]).unwrap();
        let all = t.eigenvalues().unwrap();
        let below = t.eigenvalues_below(0.5);
        assert_eq!(below.len(), all.iter().filter(|&&v| v < 0.5).count());
        for (a, b) in below.iter().zip(&all) {
            assert!((a - b).abs() < 1e-13, "{a} {b}");
        }
    }
    use core::f64::consts::PI;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn dirichlet_laplacian_spectrum() {
        let n = 50;
        let ev = laplacian(n).eigenvalues().unwrap();
        for (k, v) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * (PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-12, "{k}: {v} vs {exact}");
        }
    }

    fn check_pairs(t: &SymTridiagonal, pairs: &EigenPairs) {
        let n = t.len();
        for j in 0..pairs.modes {
            let v: Vec<f64> = (0..n).map(|i| pairs.component(i, j)).collect();
            let tv = t.mul_vec(&v);
            let res = tv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - pairs.values[j] * b).abs())
                .fold(0.0, f64::max);
            assert!(res < 1e-10 * t.norm_bound(), "residual {res} for mode {j}");
            for k in 0..=j {
                let dot: f64 = (0..n).map(|i| pairs.component(i, j) * pairs.component(i, k)).sum();
                let target = if j == k { 1.0 } else { 0.0 };
                assert!((dot - target).abs() < 1e-10, "orthonormality {j},{k}: {dot}");
            }
        }
    }

    #[test]
    fn inverse_iteration_is_orthonormal() {
        let n = 300;
        // varying coefficients with a weight jump
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + if i > 150 { 1.5 } else { 0.0 } + 0.01 * i as f64).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| if i > 150 { -1.5 } else { -1.0 }).collect();
        let t = SymTridiagonal::new(diag, off).unwrap();
        let pairs = t.eigenpairs(0).unwrap();
        check_pairs(&t, &pairs);
    }

    #[test]
    fn near_degenerate_pairs_are_separated() {
        // two weakly coupled identical blocks
        let n = 80;
        let mut off = vec![-1.0; n - 1];
        off[n / 2 - 1] = -1e-9;
        let t = SymTridiagonal::new(vec![2.0; n], off).unwrap();
        let pairs = t.eigenpairs(0).unwrap();
        check_pairs(&t, &pairs);
    }

    #[test]
    fn dense_pairs_match() {
        let t = laplacian(20);
        let dense = t.eigenpairs_dense().unwrap();
        check_pairs(&t, &dense);
        let iter = t.eigenpairs(5).unwrap();
        for j in 0..5 {
            assert!((dense.values[j] - iter.values[j]).abs() < 1e-13);
        }
    }

    #[test]
    fn sturm_count_matches_spectrum() {
        let t = laplacian(40);
        let ev = t.eigenvalues().unwrap();
        for sigma in [0.0, 0.5, 1.0, 2.0, 3.9, 5.0] {
            let expect = ev.iter().filter(|&&v| v < sigma).count();
            assert_eq!(t.count_below(sigma), expect);
        }
    }

    #[test]
    fn one_by_one() {
        let t = SymTridiagonal::new(vec![3.0], vec![]).unwrap();
        let p = t.eigenpairs(0).unwrap();
        assert_eq!(p.values, vec![3.0]);
        assert_eq!(p.vectors, vec![1.0]);
    }
}
