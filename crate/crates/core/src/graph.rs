//! Direct discretization of a truncated tree as a metric graph.
//!
//! Every edge is cut into grid cells, the Laplacian is assembled from the
//! quadratic form `Σ (u_a - u_b)^2 / Δ` with arclength masses, so continuity
//! and Kirchhoff balance at vertices come out of the variational form and the
//! root carries the natural condition. Edges of the last kept generation run
//! to the cut `R`, where the function vanishes. Kernels are computed by
//! Lanczos with full reorthogonalization started from a point mass; negative
//! eigenvalues by inertia counts of the tree-structured operator.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kernel::paths_of_generation;
use crate::linalg::SymTridiagonal;
use crate::radial::{dispersion_inverse, SolverConfig, BAND_LIMIT_EXPONENT};
use crate::tree::{PointAddress, TreeSpec};

/// Largest graph for which kernel columns are computed; the Lanczos basis
/// is dense.
pub const NODE_BUDGET: usize = 20_000;
/// Largest graph that is assembled at all (spectra only need `O(n)` memory).
pub const ASSEMBLY_BUDGET: usize = 1_000_000;
const LANCZOS_CHECK_EVERY: usize = 20;
const LANCZOS_TOLERANCE: f64 = 1e-13;
const LANCZOS_MAX_STEPS: usize = 3000;

#[derive(Debug, Clone)]
struct EdgeNodes {
    /// Node indices from the start vertex to the end; `None` marks the
    /// absorbing end at the cut.
    nodes: Vec<Option<usize>>,
    radii: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FullGraph {
    radii: Vec<f64>,
    masses: Vec<f64>,
    diag: Vec<f64>,
    /// Off-diagonal entries of the symmetrized operator.
    adjacency: Vec<Vec<(usize, f64)>>,
    /// Parent in breadth-first order (always a smaller index).
    parent: Vec<Option<usize>>,
    edges: Vec<EdgeNodes>,
    uniform_step: Option<f64>,
    has_potential: bool,
    max_generation: usize,
    dispersion_correction: bool,
}

impl FullGraph {
    /// Tree truncated after generation `max_generation`, discretized with the
    /// grid density and cut of `cfg`. `potential(edge_id, r)` is subtracted;
    /// at a vertex the values from the incident edges are averaged.
    pub fn build(
        spec: &TreeSpec,
        max_generation: usize,
        cfg: &SolverConfig,
        potential: Option<&dyn Fn(usize, f64) -> f64>,
    ) -> Result<Self> {
        cfg.validate()?;
        if max_generation > spec.horizon() {
            return Err(Error::GenerationOutOfRange {
                generation: max_generation,
                horizon: spec.horizon(),
            });
        }
        let cut = cfg.domain_cut;
        if cut > spec.extent() {
            return Err(Error::HorizonExceeded {
                radius: cut,
                horizon: spec.extent(),
            });
        }
        let ppu = cfg.points_per_unit as f64;
        let mut radii = vec![0.0];
        let mut edges: Vec<EdgeNodes> = Vec::new();
        // (node a, node b or None, cell length, edge id)
        let mut cells: Vec<(usize, Option<usize>, f64, usize)> = Vec::new();
        for j in 0..=max_generation {
            let start = spec.radii()[j];
            if start >= cut {
                break;
            }
            let end = if j == max_generation {
                cut
            } else {
                spec.radii()[j + 1].min(cut)
            };
            for path in paths_of_generation(spec, j)? {
                let id = edges.len();
                let first = if j == 0 {
                    0
                } else {
                    let parent = spec.edge_id(&path[..j - 1])?;
                    // parents end below the cut since r_j < R
                    edges[parent].nodes.last().copied().flatten().expect("parent vertex is free")
                };
                let mut knots = vec![start];
                knots.extend(spec.radii().iter().copied().filter(|&r| r > start && r < end));
                knots.push(end);
                let mut nodes = vec![Some(first)];
                let mut pos = vec![start];
                for w in knots.windows(2) {
                    let len = w[1] - w[0];
                    let n = ((len * ppu) - 1e-9).ceil().max(1.0) as usize;
                    for k in 1..=n {
                        let r = if k == n { w[1] } else { w[0] + len * k as f64 / n as f64 };
                        pos.push(r);
                        let absorbing = k == n && w[1] == cut;
                        if absorbing {
                            nodes.push(None);
                        } else {
                            radii.push(r);
                            nodes.push(Some(radii.len() - 1));
                        }
                    }
                }
                if radii.len() > ASSEMBLY_BUDGET {
                    return Err(Error::NodeBudget {
                        nodes: radii.len(),
                        budget: ASSEMBLY_BUDGET,
                    });
                }
                for k in 0..nodes.len() - 1 {
                    let a = nodes[k].expect("only the last node can be absorbing");
                    cells.push((a, nodes[k + 1], pos[k + 1] - pos[k], id));
                }
                edges.push(EdgeNodes { nodes, radii: pos });
            }
        }
        let n = radii.len();
        let mut masses = vec![0.0; n];
        let mut stiff = vec![0.0; n];
        let mut parent = vec![None; n];
        let mut pot_sum = vec![0.0; n];
        let mut pot_count = vec![0usize; n];
        let h0 = cells[0].2;
        let mut uniform = true;
        for &(a, b, len, id) in &cells {
            uniform &= (len - h0).abs() <= 1e-9 * h0;
            masses[a] += 0.5 * len;
            stiff[a] += 1.0 / len;
            if let Some(b) = b {
                masses[b] += 0.5 * len;
                stiff[b] += 1.0 / len;
                parent[b] = Some(a);
            }
            if let Some(v) = potential {
                pot_sum[a] += v(id, radii[a]);
                pot_count[a] += 1;
                if let Some(b) = b {
                    pot_sum[b] += v(id, radii[b]);
                    pot_count[b] += 1;
                }
            }
        }
        let mut diag = vec![0.0; n];
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            let v = if pot_count[i] > 0 { pot_sum[i] / pot_count[i] as f64 } else { 0.0 };
            diag[i] = stiff[i] / masses[i] - v;
        }
        for &(a, b, len, _) in &cells {
            if let Some(b) = b {
                let w = -1.0 / len / (masses[a] * masses[b]).sqrt();
                adjacency[a].push((b, w));
                adjacency[b].push((a, w));
            }
        }
        Ok(Self {
            radii,
            masses,
            diag,
            adjacency,
            parent,
            edges,
            uniform_step: uniform.then_some(h0),
            has_potential: potential.is_some(),
            max_generation,
            dispersion_correction: cfg.dispersion_correction,
        })
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn node_radius(&self, i: usize) -> f64 {
        self.radii[i]
    }

    /// Nearest node to `x` on its edge (`None` at the absorbing cut).
    pub fn node_of(&self, spec: &TreeSpec, x: &PointAddress) -> Result<Option<usize>> {
        if x.generation() > self.max_generation {
            return Err(Error::InvalidAddress(format!(
                "point of generation {} beyond the kept generation {}",
                x.generation(),
                self.max_generation
            )));
        }
        let id = spec.edge_id(x.path())?;
        let edge = self.edges.get(id).ok_or_else(|| Error::InvalidAddress("edge beyond the cut".into()))?;
        let r = x.radial();
        let (lo, hi) = (edge.radii[0], *edge.radii.last().expect("nonempty"));
        if r < lo - 1e-12 || r > hi + 1e-12 {
            return Err(Error::OutOfDomain { radius: r, lo, hi });
        }
        let k = edge.radii.partition_point(|&p| p < r).min(edge.radii.len() - 1);
        let k = if k > 0 && r - edge.radii[k - 1] <= edge.radii[k] - r { k - 1 } else { k };
        Ok(edge.nodes[k])
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..x.len() {
            let mut s = self.diag[i] * x[i];
            for &(j, w) in &self.adjacency[i] {
                s += w * x[j];
            }
            out[i] = s;
        }
    }

    fn norm_bound(&self) -> f64 {
        (0..self.len())
            .map(|i| self.diag[i].abs() + self.adjacency[i].iter().map(|(_, w)| w.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn spectral_map(&self, t: f64) -> Option<f64> {
        match self.uniform_step {
            Some(h)
                if self.dispersion_correction
                    && !self.has_potential
                    && t * (core::f64::consts::PI / h).powi(2) >= BAND_LIMIT_EXPONENT =>
            {
                Some(h)
            }
            _ => None,
        }
    }

    /// `k(x_i, y, t)` for every node `x_i` and every time in `ts`
    /// (outer index: time).
    pub fn kernel_columns(&self, y: usize, ts: &[f64]) -> Result<Vec<Vec<f64>>> {
        let n = self.len();
        if n > NODE_BUDGET {
            return Err(Error::NodeBudget {
                nodes: n,
                budget: NODE_BUDGET,
            });
        }
        if y >= n {
            return Err(Error::InvalidAddress(format!("node {y} out of range")));
        }
        if let Some(&t) = ts.iter().find(|&&t| !(t > 0.0)) {
            return Err(Error::InvalidTime { t, t_max: f64::INFINITY });
        }
        let norm = self.norm_bound();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut q = vec![0.0; n];
        q[y] = 1.0;
        let mut w = vec![0.0; n];
        let mut previous: Option<Vec<Vec<f64>>> = None;
        let mut next_check = LANCZOS_CHECK_EVERY;
        loop {
            self.apply(&q, &mut w);
            if let (Some(prev), Some(&b)) = (basis.last(), beta.last()) {
                w.iter_mut().zip(prev).for_each(|(wi, pi)| *wi -= b * pi);
            }
            let a: f64 = w.iter().zip(&q).map(|(u, v)| u * v).sum();
            w.iter_mut().zip(&q).for_each(|(wi, qi)| *wi -= a * qi);
            basis.push(q.clone());
            alpha.push(a);
            for _ in 0..2 {
                for v in &basis {
                    let d: f64 = w.iter().zip(v).map(|(a, b)| a * b).sum();
                    w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= d * vi);
                }
            }
            let b = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            let m = basis.len();
            let exhausted = b <= 1e-14 * norm || m == n;
            if exhausted || m >= next_check {
                // checks spaced geometrically keep the dense solves cheap
                next_check = m + (m / 4).max(LANCZOS_CHECK_EVERY);
                let current = self.lanczos_coefficients(&alpha, &beta, ts)?;
                let done = exhausted
                    || previous.as_ref().is_some_and(|prev: &Vec<Vec<f64>>| {
                        current.iter().zip(prev).all(|(c, p)| {
                            let norm: f64 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                            let diff: f64 = c
                                .iter()
                                .zip(p.iter().chain(core::iter::repeat(&0.0)))
                                .map(|(a, b)| (a - b) * (a - b))
                                .sum::<f64>()
                                .sqrt();
                            diff <= LANCZOS_TOLERANCE * norm
                        })
                    });
                if done {
                    return Ok(self.assemble_columns(&basis, &current, y));
                }
                if m >= LANCZOS_MAX_STEPS {
                    return Err(Error::NoConvergence(format!("Lanczos did not converge in {m} steps")));
                }
                previous = Some(current);
            }
            beta.push(b);
            q = w.iter().map(|v| v / b).collect();
        }
    }

    /// Krylov coefficients of `e^{-tT} e_y` for each time, from the
    /// tridiagonal projection.
    fn lanczos_coefficients(&self, alpha: &[f64], beta: &[f64], ts: &[f64]) -> Result<Vec<Vec<f64>>> {
        let m = alpha.len();
        let small = SymTridiagonal::new(alpha.to_vec(), beta[..m - 1].to_vec())?;
        let pairs = small.eigenpairs_dense()?;
        let first = pairs.row(0);
        let mut out = Vec::with_capacity(ts.len());
        for &t in ts {
            let h = self.spectral_map(t);
            let mut coef = vec![0.0; m];
            for (j, &theta) in pairs.values.iter().enumerate() {
                let lam = match h {
                    Some(h) => dispersion_inverse(theta, h),
                    None => theta,
                };
                let e = (-lam * t).exp() * first[j];
                for (k, c) in coef.iter_mut().enumerate() {
                    *c += pairs.component(k, j) * e;
                }
            }
            out.push(coef);
        }
        Ok(out)
    }

    fn assemble_columns(&self, basis: &[Vec<f64>], coefs: &[Vec<f64>], y: usize) -> Vec<Vec<f64>> {
        let n = self.len();
        let my = self.masses[y].sqrt();
        coefs
            .iter()
            .map(|coef| {
                let mut col = vec![0.0; n];
                for (v, &c) in basis.iter().zip(coef) {
                    col.iter_mut().zip(v).for_each(|(o, vi)| *o += c * vi);
                }
                for (i, o) in col.iter_mut().enumerate() {
                    *o /= self.masses[i].sqrt() * my;
                }
                col
            })
            .collect()
    }

    /// Number of eigenvalues below `sigma`, from the inertia of the
    /// leaves-first `LDLᵀ` factorization of `T - sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let n = self.len();
        let tiny = f64::EPSILON * self.norm_bound().max(f64::MIN_POSITIVE);
        let mut acc = vec![0.0; n];
        let mut count = 0;
        for i in (0..n).rev() {
            let mut d = self.diag[i] - sigma - acc[i];
            if d == 0.0 {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
            if let Some(p) = self.parent[i] {
                let w = self.adjacency[i].iter().find(|(j, _)| *j == p).map_or(0.0, |x| x.1);
                acc[p] += w * w / d;
            }
        }
        count
    }

    /// All eigenvalues below `sigma`, ascending, by bisection on inertia counts.
    pub fn eigenvalues_below(&self, sigma: f64) -> Vec<f64> {
        let total = self.count_below(sigma);
        let lo0 = -self.norm_bound() - 1.0;
        let mut out = Vec::with_capacity(total);
        for k in 0..total {
            let (mut lo, mut hi) = (lo0, sigma);
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

/// `k(x, y, t)` of the truncated tree by direct discretization.
pub fn full_graph_oracle(
    spec: &TreeSpec,
    max_generation: usize,
    cfg: &SolverConfig,
    x: &PointAddress,
    y: &PointAddress,
    t: f64,
) -> Result<f64> {
    let graph = FullGraph::build(spec, max_generation, cfg, None)?;
    let (Some(i), Some(k)) = (graph.node_of(spec, x)?, graph.node_of(spec, y)?) else {
        return Ok(0.0);
    };
    Ok(graph.kernel_columns(k, &[t])?[0][i])
}
