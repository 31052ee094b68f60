//! Finite-difference discretization of the weighted half-line operators
//! `A_l u = -(g_l u')' / g_l` and their heat kernels.
//!
//! The channel of generation `l` lives on `[r_l, R]` with weight `g_l`. The
//! quadratic form `Σ w_{i+1/2} (u_{i+1} - u_i)^2 / Δ_i` uses midpoint cell
//! weights and lumped nodal masses `M_i`, so the generalized problem
//! `K u = λ M u` is symmetrized by `M^{1/2}` into a tridiagonal eigenproblem.
//! Every vertex radius is a grid node, so weight jumps are resolved exactly.
//!
//! On uniform grids without potential the discrete eigenfunctions sample
//! continuous ones exactly and the discrete eigenvalue `λ_h` relates to the
//! continuous one by `λ_h = 4 sin²(h√λ / 2) / h²`. Inverting this map
//! ("dispersion correction") removes the grid error from the spectrum.
//! The corrected spectrum is band-limited at `k = π/h`, so it is only used
//! for times at which `e^{-(π/h)^2 t}` is below roundoff; earlier times use
//! the discrete spectrum, whose kernel is exactly positive.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{EigenPairs, SymTridiagonal};
use crate::tree::TreeSpec;

/// Distance (in units of `√t`) kept between an evaluation point and the
/// absorbing cut.
pub const TRUNCATION_WIDTH: f64 = 6.0;
/// `λ t_min` above which eigenpairs are dropped.
pub const SPECTRAL_CUTOFF: f64 = 40.0;
/// `(π/h)^2 t` above which the band-limited corrected spectrum is used.
pub const BAND_LIMIT_EXPONENT: f64 = 36.0;
/// Negative kernel values smaller than this fraction of the diagonal scale
/// are clamped to zero.
pub const CLAMP_FRACTION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Radius `R` of the absorbing cut.
    pub domain_cut: f64,
    pub points_per_unit: usize,
    /// Eigenpairs kept, 0 for all.
    pub n_modes: usize,
    pub t_max: f64,
    /// Smallest evaluation time. When positive, eigenpairs with
    /// `e^{-λ t_min}` below `e^{-40}` are dropped.
    pub t_min: f64,
    /// Map discrete eigenvalues back through the exact dispersion relation
    /// whenever the grid is uniform and there is no potential.
    pub dispersion_correction: bool,
}

impl SolverConfig {
    pub fn new(domain_cut: f64, points_per_unit: usize, t_max: f64) -> Result<Self> {
        let cfg = Self {
            domain_cut,
            points_per_unit,
            n_modes: 0,
            t_max,
            t_min: 0.0,
            dispersion_correction: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.domain_cut > 0.0) || !self.domain_cut.is_finite() {
            return Err(Error::InvalidConfig(format!("domain cut must be positive, got {}", self.domain_cut)));
        }
        if self.points_per_unit < 8 {
            return Err(Error::InvalidConfig(format!(
                "points_per_unit must be at least 8, got {}",
                self.points_per_unit
            )));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(Error::InvalidConfig(format!("t_max must be positive, got {}", self.t_max)));
        }
        if !(self.t_min >= 0.0) || self.t_min > self.t_max {
            return Err(Error::InvalidConfig(format!(
                "t_min must lie in [0, t_max], got {}",
                self.t_min
            )));
        }
        Ok(())
    }

    /// Same configuration with a smallest evaluation time.
    pub fn with_min_time(&self, t_min: f64) -> Self {
        Self { t_min, ..*self }
    }

    /// Same configuration with `points_per_unit` multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            points_per_unit: self.points_per_unit * factor.max(1),
            ..*self
        }
    }

    /// Smallest cut that supports evaluation at radius `x` up to `t_max`.
    pub fn required_cut(&self, x: f64) -> f64 {
        x + TRUNCATION_WIDTH * self.t_max.sqrt()
    }

    /// Checks `R >= x + 6 √t_max`.
    pub fn check_truncation(&self, x: f64) -> Result<()> {
        let needed = self.required_cut(x);
        if self.domain_cut < needed {
            return Err(Error::TruncationInsufficient {
                needed,
                cut: self.domain_cut,
            });
        }
        Ok(())
    }
}

/// Discretized channel operator with its eigenpairs.
#[derive(Debug, Clone)]
pub struct RadialSystem {
    l: usize,
    /// All grid nodes on `[start, R]`, including Dirichlet ends.
    grid: Vec<f64>,
    /// Cell weights `g_l` at midpoints, one per cell.
    weights: Vec<f64>,
    /// Lumped masses per grid node (zero on Dirichlet nodes).
    masses: Vec<f64>,
    potential: Option<Vec<f64>>,
    /// Index of the first unknown in `grid` (1 when the left end is Dirichlet).
    first: usize,
    operator: SymTridiagonal,
    uniform_step: Option<f64>,
    corrected: bool,
    discrete_eigenvalues: Vec<f64>,
    eigenvalues: Vec<f64>,
    pairs: EigenPairs,
    t_max: f64,
    t_min: f64,
}

/// A kernel value at snapped grid nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    /// Value before clamping.
    pub raw: f64,
    pub r_node: f64,
    pub s_node: f64,
    pub clamped: bool,
}

fn grid_for(start: f64, end: f64, breaks: &[f64], ppu: usize) -> Vec<f64> {
    let mut knots = vec![start];
    knots.extend(breaks.iter().copied().filter(|&b| b > start && b < end));
    knots.push(end);
    let mut grid = vec![start];
    for w in knots.windows(2) {
        let len = w[1] - w[0];
        let n = ((len * ppu as f64) - 1e-9).ceil().max(1.0) as usize;
        for k in 1..n {
            grid.push(w[0] + len * k as f64 / n as f64);
        }
        grid.push(w[1]);
    }
    grid
}

fn uniform_step(grid: &[f64]) -> Option<f64> {
    let h = grid[1] - grid[0];
    grid.windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
        .then_some(h)
}

/// Inverse of `λ_h = 4 sin²(h√λ/2)/h²`.
pub fn dispersion_inverse(lambda_h: f64, h: f64) -> f64 {
    if lambda_h <= 0.0 {
        return lambda_h;
    }
    let x = (0.5 * h * lambda_h.sqrt()).min(1.0);
    let k = 2.0 / h * x.asin();
    k * k
}

fn assemble(
    spec: &TreeSpec,
    l: usize,
    cfg: &SolverConfig,
    potential: Option<&dyn Fn(f64) -> f64>,
) -> Result<Assembled> {
    cfg.validate()?;
    let start = spec.radius(l)?;
    let cut = cfg.domain_cut;
    if cut <= start {
        return Err(Error::InvalidConfig(format!(
            "domain cut {cut} does not exceed the channel start {start}"
        )));
    }
    if cut > spec.extent() {
        return Err(Error::HorizonExceeded {
            radius: cut,
            horizon: spec.extent(),
        });
    }
    let grid = grid_for(start, cut, spec.radii(), cfg.points_per_unit);
    let cells = grid.len() - 1;
    let norm = if l == 0 { 1.0 } else { spec.g0_right(start)? };
    let weights: Vec<f64> = grid
        .windows(2)
        .map(|w| spec.g0(0.5 * (w[0] + w[1])).map(|g| g / norm))
        .collect::<Result<_>>()?;
    let first = if l == 0 { 0 } else { 1 };
    let last = grid.len() - 2;
    if last < first {
        return Err(Error::InvalidConfig("grid has no interior unknowns".into()));
    }
    let mut masses = vec![0.0; grid.len()];
    let mut stiff_diag = vec![0.0; grid.len()];
    for c in 0..cells {
        let dx = grid[c + 1] - grid[c];
        masses[c] += 0.5 * weights[c] * dx;
        masses[c + 1] += 0.5 * weights[c] * dx;
        stiff_diag[c] += weights[c] / dx;
        stiff_diag[c + 1] += weights[c] / dx;
    }
    masses[grid.len() - 1] = 0.0;
    if first == 1 {
        masses[0] = 0.0;
    }
    let pot: Option<Vec<f64>> = potential.map(|v| grid.iter().map(|&r| v(r)).collect());
    let n = last - first + 1;
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in first..=last {
        let v = pot.as_ref().map_or(0.0, |p| p[i]);
        diag.push(stiff_diag[i] / masses[i] - v);
        if i < last {
            let k = -weights[i] / (grid[i + 1] - grid[i]);
            off.push(k / (masses[i] * masses[i + 1]).sqrt());
        }
    }
    let operator = SymTridiagonal::new(diag, off)?;
    Ok(Assembled {
        grid,
        weights,
        masses,
        potential: pot,
        first,
        operator,
    })
}

struct Assembled {
    grid: Vec<f64>,
    weights: Vec<f64>,
    masses: Vec<f64>,
    potential: Option<Vec<f64>>,
    first: usize,
    operator: SymTridiagonal,
}

/// The symmetric matrix `M^{-1/2} K M^{-1/2} - V` of channel `l` without any
/// eigensolve; same grid and boundary conditions as [`discretize_radial`].
pub fn radial_operator(
    spec: &TreeSpec,
    l: usize,
    cfg: &SolverConfig,
    potential: Option<&dyn Fn(f64) -> f64>,
) -> Result<SymTridiagonal> {
    Ok(assemble(spec, l, cfg, potential)?.operator)
}

/// Discretizes `A_l - V` on `[r_l, R]` (`[0, R]` with a natural condition at
/// the root when `l = 0`; zero at `r_l` otherwise; zero at `R` always).
pub fn discretize_radial(
    spec: &TreeSpec,
    l: usize,
    cfg: &SolverConfig,
    potential: Option<&dyn Fn(f64) -> f64>,
) -> Result<RadialSystem> {
    let Assembled {
        grid,
        weights,
        masses,
        potential: pot,
        first,
        operator,
    } = assemble(spec, l, cfg, potential)?;
    let n = operator.len();
    if cfg.n_modes > n {
        return Err(Error::TooManyModes {
            requested: cfg.n_modes,
            available: n,
        });
    }
    let mut modes = cfg.n_modes;
    if cfg.t_min > 0.0 {
        let needed = operator.count_below(SPECTRAL_CUTOFF / cfg.t_min).max(1);
        modes = if modes == 0 { needed } else { modes.min(needed) };
    }
    let pairs = operator.eigenpairs(modes)?;
    let step = uniform_step(&grid);
    let corrected = cfg.dispersion_correction && pot.is_none() && step.is_some();
    let discrete_eigenvalues = pairs.values.clone();
    let eigenvalues = match (corrected, step) {
        (true, Some(h)) => discrete_eigenvalues.iter().map(|&v| dispersion_inverse(v, h)).collect(),
        _ => discrete_eigenvalues.clone(),
    };
    Ok(RadialSystem {
        l,
        grid,
        weights,
        masses,
        potential: pot,
        first,
        operator,
        uniform_step: step,
        corrected,
        discrete_eigenvalues,
        eigenvalues,
        pairs,
        t_max: cfg.t_max,
        t_min: cfg.t_min,
    })
}

impl RadialSystem {
    pub fn generation(&self) -> usize {
        self.l
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn cell_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn potential(&self) -> Option<&[f64]> {
        self.potential.as_deref()
    }

    pub fn operator(&self) -> &SymTridiagonal {
        &self.operator
    }

    /// Eigenvalues used by the kernel (after dispersion correction if applied).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvalues of the discrete operator itself.
    pub fn discrete_eigenvalues(&self) -> &[f64] {
        &self.discrete_eigenvalues
    }

    pub fn dispersion_corrected(&self) -> bool {
        self.corrected
    }

    pub fn uniform_step(&self) -> Option<f64> {
        self.uniform_step
    }

    pub fn modes(&self) -> usize {
        self.pairs.modes
    }

    pub fn start(&self) -> f64 {
        self.grid[0]
    }

    pub fn cut(&self) -> f64 {
        *self.grid.last().expect("nonempty grid")
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    /// Whether node `i` carries an unknown.
    pub fn is_free(&self, i: usize) -> bool {
        i >= self.first && i + 1 < self.grid.len()
    }

    /// Eigenfunction `j` at grid node `i`, normalized in `L_2(g_l dr)`.
    pub fn eigenfunction(&self, i: usize, j: usize) -> f64 {
        if !self.is_free(i) {
            return 0.0;
        }
        self.pairs.component(i - self.first, j) / self.masses[i].sqrt()
    }

    /// Nearest grid node to `r`.
    pub fn nearest_node(&self, r: f64) -> Result<usize> {
        let (lo, hi) = (self.start(), self.cut());
        if !(r >= lo - 1e-12 && r <= hi + 1e-12) {
            return Err(Error::OutOfDomain { radius: r, lo, hi });
        }
        let k = self.grid.partition_point(|&x| x < r);
        if k == 0 {
            return Ok(0);
        }
        if k == self.grid.len() {
            return Ok(k - 1);
        }
        Ok(if r - self.grid[k - 1] <= self.grid[k] - r { k - 1 } else { k })
    }

    /// Whether the kernel at time `t` uses the corrected spectrum.
    pub fn uses_correction(&self, t: f64) -> bool {
        match (self.corrected, self.uniform_step) {
            (true, Some(h)) => t * (core::f64::consts::PI / h).powi(2) >= BAND_LIMIT_EXPONENT,
            _ => false,
        }
    }

    /// `Σ_j e^{-λ_j t} φ_j(i) φ_j(k)` at grid nodes.
    pub fn kernel_nodes(&self, i: usize, k: usize, t: f64) -> f64 {
        if !self.is_free(i) || !self.is_free(k) {
            return 0.0;
        }
        let values = if self.uses_correction(t) {
            &self.eigenvalues
        } else {
            &self.discrete_eigenvalues
        };
        let a = self.pairs.row(i - self.first);
        let b = self.pairs.row(k - self.first);
        let scale = 1.0 / (self.masses[i] * self.masses[k]).sqrt();
        let mut acc = 0.0;
        for j in 0..self.pairs.modes {
            let e = (-values[j] * t).exp();
            if e == 0.0 {
                break;
            }
            acc += e * (a[j] * b[j]);
        }
        acc * scale
    }

    /// Heat kernel values `k_l(·, s_k, t)` on every grid node.
    pub fn kernel_column(&self, k: usize, t: f64) -> Vec<f64> {
        (0..self.grid.len()).map(|i| self.kernel_nodes(i, k, t)).collect()
    }

    /// Rows `(index, eigenvalue)` starting at 1.
    pub fn eigen_rows(&self) -> Vec<(usize, f64)> {
        self.eigenvalues.iter().enumerate().map(|(j, &v)| (j + 1, v)).collect()
    }

    /// Largest weighted orthonormality defect `|Σ_i φ_j φ_k M_i - δ_jk|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let m = self.pairs.modes;
        let mut worst = 0.0f64;
        for j in 0..m {
            for k in j..m {
                let mut s = 0.0;
                for i in 0..self.grid.len() {
                    s += self.eigenfunction(i, j) * self.eigenfunction(i, k) * self.masses[i];
                }
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// `k_l(·, s, t)` by implicit time stepping of the discrete operator
    /// (Crank–Nicolson after four backward Euler half steps). Independent of
    /// the eigensolver; uses the undistorted discrete operator.
    pub fn time_stepped_column(&self, k: usize, t: f64, steps: usize) -> Result<Vec<f64>> {
        if !(t > 0.0) {
            return Err(Error::InvalidTime { t, t_max: self.t_max });
        }
        let n = self.operator.len();
        let mut z = vec![0.0; n];
        if self.is_free(k) {
            z[k - self.first] = 1.0 / self.masses[k].sqrt();
        }
        let steps = steps.max(4);
        let dt = t / steps as f64;
        // backward Euler on the first two steps in half-step increments
        let half = 0.5 * dt;
        for _ in 0..4 {
            // (I + half T) z' = z  <=>  (T + I/half) z' = z/half
            z.iter_mut().for_each(|v| *v /= half);
            self.operator.solve_shifted(-1.0 / half, &mut z);
        }
        for _ in 2..steps {
            let tz = self.operator.mul_vec(&z);
            let mut rhs: Vec<f64> = z.iter().zip(&tz).map(|(a, b)| a - 0.5 * dt * b).collect();
            let c = 2.0 / dt;
            rhs.iter_mut().for_each(|v| *v *= c);
            self.operator.solve_shifted(-c, &mut rhs);
            z = rhs;
        }
        let mut out = vec![0.0; self.grid.len()];
        for i in self.first..self.first + n {
            out[i] = z[i - self.first] / self.masses[i].sqrt();
        }
        Ok(out)
    }
}

/// `k_l(r, s, t)` with respect to `g_l ds`, with `r` and `s` snapped to the
/// nearest grid nodes.
pub fn heat_kernel_1d(sys: &RadialSystem, r: f64, s: f64, t: f64) -> Result<KernelValue> {
    if !(t > 0.0) || t > sys.t_max * (1.0 + 1e-12) || t < sys.t_min * (1.0 - 1e-12) {
        return Err(Error::InvalidTime { t, t_max: sys.t_max });
    }
    let i = sys.nearest_node(r)?;
    let k = sys.nearest_node(s)?;
    let raw = sys.kernel_nodes(i, k, t);
    let mut value = raw;
    let mut clamped = false;
    if raw < 0.0 {
        let scale = (sys.kernel_nodes(i, i, t) * sys.kernel_nodes(k, k, t)).abs().sqrt();
        if -raw <= CLAMP_FRACTION * scale.max(f64::MIN_POSITIVE) || raw.abs() < f64::MIN_POSITIVE {
            value = 0.0;
            clamped = true;
        }
    }
    Ok(KernelValue {
        value,
        raw,
        r_node: sys.grid[i],
        s_node: sys.grid[k],
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn half_line_cfg(cut: f64, ppu: usize, t_max: f64) -> SolverConfig {
        SolverConfig::new(cut, ppu, t_max).unwrap()
    }

    fn closed_form_diag(x: f64, t: f64) -> f64 {
        (4.0 * PI * t).powf(-0.5) * (1.0 + (-x * x / t).exp())
    }

    #[test]
    fn half_line_ground_state() {
        // uncorrected eigenvalue converges at second order
        let mut errs = Vec::new();
        for ppu in [8usize, 16, 32] {
            let mut cfg = half_line_cfg(10.0, ppu, 1.0);
            cfg.dispersion_correction = false;
            let sys = discretize_radial(&TreeSpec::half_line(), 0, &cfg, None).unwrap();
            let exact = (PI / 20.0).powi(2);
            errs.push((sys.eigenvalues()[0] - exact).abs() / exact);
        }
        assert!(errs[0] / errs[1] > 3.5 && errs[1] / errs[2] > 3.5, "{errs:?}");
        let cfg = half_line_cfg(10.0, 16, 1.0);
        let sys = discretize_radial(&TreeSpec::half_line(), 0, &cfg, None).unwrap();
        assert!(sys.dispersion_corrected());
        assert!((sys.eigenvalues()[0] - 0.024_674_011_002_723_4).abs() < 1e-12);
        for j in 0..20 {
            let exact = (PI * (j as f64 + 0.5) / 10.0).powi(2);
            assert!((sys.eigenvalues()[j] - exact).abs() < 1e-9 * exact.max(1.0), "mode {j}");
        }
    }

    #[test]
    fn dirichlet_channel_is_positive() {
        let spec = TreeSpec::explicit(vec![0.0, 1.0, 2.5], vec![1, 2, 3]).unwrap();
        let cfg = half_line_cfg(8.0, 16, 1.0);
        let sys = discretize_radial(&spec, 1, &cfg, None).unwrap();
        assert!(sys.eigenvalues()[0] > 0.0);
        assert_eq!(sys.grid()[0], 1.0);
        assert!(sys.grid().contains(&2.5));
        assert_eq!(sys.cell_weights()[0], 1.0);
        assert_eq!(*sys.cell_weights().last().unwrap(), 3.0);
        assert!(sys.orthonormality_residual() <= 1e-10);
    }

    #[test]
    fn half_line_kernel_closed_form() {
        let cfg = half_line_cfg(20.0, 32, 4.0);
        let sys = discretize_radial(&TreeSpec::half_line(), 0, &cfg, None).unwrap();
        for &x in &[0.0, 1.0, 2.0] {
            for &t in &[0.05, 0.25, 1.0, 4.0] {
                let k = heat_kernel_1d(&sys, x, x, t).unwrap();
                let exact = closed_form_diag(x, t);
                assert!((k.value - exact).abs() / exact < 1e-6, "x={x} t={t} {} {exact}", k.value);
            }
        }
        let k = heat_kernel_1d(&sys, 0.0, 0.0, 1.0).unwrap();
        assert!((k.value - PI.powf(-0.5)).abs() < 1e-6);
    }

    #[test]
    fn semigroup_property() {
        let spec = TreeSpec::explicit(vec![0.0, 1.0], vec![1, 2]).unwrap();
        let cfg = half_line_cfg(12.0, 16, 2.0);
        let sys = discretize_radial(&spec, 0, &cfg, None).unwrap();
        let (r, s) = (sys.nearest_node(0.5).unwrap(), sys.nearest_node(1.75).unwrap());
        let mut acc = 0.0;
        for u in 0..sys.grid().len() {
            acc += sys.kernel_nodes(r, u, 0.5) * sys.kernel_nodes(u, s, 0.5) * sys.masses()[u];
        }
        let direct = sys.kernel_nodes(r, s, 1.0);
        assert!((acc - direct).abs() < 1e-6 * direct.max(1e-3), "{acc} {direct}");
    }

    #[test]
    fn time_stepping_agrees_with_eigenexpansion() {
        let spec = TreeSpec::explicit(vec![0.0, 1.0, 2.0], vec![1, 2, 2]).unwrap();
        let mut cfg = half_line_cfg(8.0, 16, 1.0);
        cfg.dispersion_correction = false;
        let sys = discretize_radial(&spec, 0, &cfg, None).unwrap();
        let k = sys.nearest_node(1.5).unwrap();
        let stepped = sys.time_stepped_column(k, 1.0, 4000).unwrap();
        let eigen = sys.kernel_column(k, 1.0);
        let peak = eigen.iter().fold(0.0f64, |m, v| m.max(*v));
        for (a, b) in stepped.iter().zip(&eigen) {
            assert!((a - b).abs() < 1e-5 * peak, "{a} {b}");
        }
    }

    #[test]
    fn dirichlet_monotonicity_in_cut() {
        let spec = TreeSpec::explicit(vec![0.0, 1.0, 2.0], vec![1, 2, 3]).unwrap();
        let small = discretize_radial(&spec, 1, &half_line_cfg(6.0, 16, 4.0), None).unwrap();
        let large = discretize_radial(&spec, 1, &half_line_cfg(9.0, 16, 4.0), None).unwrap();
        for &(r, s) in &[(1.5, 1.5), (1.5, 3.0), (2.5, 4.0)] {
            for &t in &[0.1, 1.0, 4.0] {
                let a = heat_kernel_1d(&small, r, s, t).unwrap().value;
                let b = heat_kernel_1d(&large, r, s, t).unwrap().value;
                assert!(b >= a - 1e-12, "{r} {s} {t}: {a} > {b}");
            }
        }
    }

    #[test]
    fn channel_comparison() {
        let spec = TreeSpec::explicit(vec![0.0, 1.0, 2.0], vec![1, 2, 3]).unwrap();
        let cfg = half_line_cfg(10.0, 16, 4.0);
        let k0 = discretize_radial(&spec, 0, &cfg, None).unwrap();
        for l in 1..=2 {
            let kl = discretize_radial(&spec, l, &cfg, None).unwrap();
            let factor = spec.branchings()[..=l].iter().product::<u32>() as f64;
            for &r in &[2.25, 3.0, 4.0] {
                for &t in &[0.1, 1.0, 4.0] {
                    let a = heat_kernel_1d(&kl, r, r, t).unwrap().value;
                    let b = heat_kernel_1d(&k0, r, r, t).unwrap().value;
                    assert!(a <= factor * b * (1.0 + 1e-9), "l={l} r={r} t={t}");
                }
            }
        }
    }

    #[test]
    fn universal_bound_on_channel_zero() {
        let spec = TreeSpec::explicit(vec![0.0, 1.0, 2.0], vec![1, 2, 2]).unwrap();
        let cfg = half_line_cfg(12.0, 16, 2.0);
        let sys = discretize_radial(&spec, 0, &cfg, None).unwrap();
        for i in 0..sys.grid().len() {
            for &t in &[0.05, 0.5, 2.0] {
                assert!(sys.kernel_nodes(i, i, t) * (PI * t).sqrt() <= 1.0 + 1e-3);
            }
        }
    }

    #[test]
    fn errors() {
        let spec = TreeSpec::explicit(vec![0.0, 1.0], vec![1, 2]).unwrap();
        let cfg = half_line_cfg(5.0, 8, 1.0);
        let sys = discretize_radial(&spec, 1, &cfg, None).unwrap();
        assert!(matches!(heat_kernel_1d(&sys, 0.5, 2.0, 0.5), Err(Error::OutOfDomain { .. })));
        assert!(matches!(heat_kernel_1d(&sys, 2.0, 2.0, 0.0), Err(Error::InvalidTime { .. })));
        assert!(matches!(heat_kernel_1d(&sys, 2.0, 2.0, 2.0), Err(Error::InvalidTime { .. })));
        let bad = half_line_cfg(0.5, 8, 1.0);
        assert!(discretize_radial(&spec, 1, &bad, None).is_err());
        assert!(SolverConfig::new(5.0, 4, 1.0).is_err());
        let mut many = cfg;
        many.n_modes = 10_000;
        assert!(matches!(discretize_radial(&spec, 1, &many, None), Err(Error::TooManyModes { .. })));
        let short = half_line_cfg(5.0, 8, 0.25);
        assert!(short.check_truncation(2.0).is_ok());
        assert!(matches!(short.check_truncation(2.5), Err(Error::TruncationInsufficient { .. })));
    }

    #[test]
    fn spectral_cutoff_keeps_kernel() {
        let spec = TreeSpec::explicit(vec![0.0, 1.0, 2.0], vec![1, 2, 2]).unwrap();
        let cfg = half_line_cfg(12.0, 16, 4.0);
        let all = discretize_radial(&spec, 0, &cfg, None).unwrap();
        let cut = discretize_radial(&spec, 0, &cfg.with_min_time(0.5), None).unwrap();
        assert!(cut.modes() < all.modes() / 4);
        for &r in &[0.0, 1.5, 3.0] {
            for &t in &[0.5, 1.0, 4.0] {
                let a = heat_kernel_1d(&all, r, r, t).unwrap().value;
                let b = heat_kernel_1d(&cut, r, r, t).unwrap().value;
                assert!((a - b).abs() <= 1e-15 * a.max(1.0));
            }
        }
        assert!(matches!(heat_kernel_1d(&cut, 1.0, 1.0, 0.25), Err(Error::InvalidTime { .. })));
    }

    proptest::proptest! {
        #[test]
        fn kernel_is_symmetric(r in 0.0f64..6.0, s in 0.0f64..6.0, t in 0.01f64..2.0) {
            let spec = TreeSpec::explicit(vec![0.0, 1.0, 2.0], vec![1, 2, 3]).unwrap();
            let cfg = SolverConfig::new(8.0, 8, 2.0).unwrap();
            let sys = discretize_radial(&spec, 0, &cfg, None).unwrap();
            let a = heat_kernel_1d(&sys, r, s, t).unwrap();
            let b = heat_kernel_1d(&sys, s, r, t).unwrap();
            proptest::prop_assert_eq!(a.raw, b.raw);
            proptest::prop_assert!(a.value >= 0.0);
        }
    }
}
