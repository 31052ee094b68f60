//! Heat kernel of the whole tree, synthesized from the radial channels.
//!
//! A channel `(l, v, σ)` is spanned by the functions
//! `Y_{l,v,σ}(x) = (b_l g_l(|x|))^{-1/2} Σ_m ω_l^{mσ} χ_{v,m}(x)` with
//! `ω_l = e^{2πi/b_l}`, where `χ_{v,m}` is the indicator of the `m`-th forward
//! subtree of the generation-`l` vertex `v`. The kernel is
//! `k(x,y,t) = Σ √(g_l(|x|) g_l(|y|)) Y(x) conj(Y(y)) k_l(|x|,|y|,t)`, and only
//! vertices `v` that are common ancestors of `x` and `y` contribute.

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::radial::{discretize_radial, heat_kernel_1d, RadialSystem, SolverConfig, TRUNCATION_WIDTH};
use crate::tree::{PointAddress, TreeSpec};

const IMAGINARY_TOLERANCE: f64 = 1e-12;

/// A channel `(l, v, σ)`. The vertex `v` of generation `l >= 1` is addressed
/// by its branch choices at generations `1..l` (so `l - 1` entries); the
/// root channel is `l = 0`, empty vertex, `σ = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelIndex {
    pub l: usize,
    pub vertex: Vec<u32>,
    pub sigma: u32,
}

impl ChannelIndex {
    pub fn root() -> Self {
        Self {
            l: 0,
            vertex: Vec::new(),
            sigma: 1,
        }
    }

    pub fn validate(&self, spec: &TreeSpec) -> Result<()> {
        if self.l == 0 {
            if !self.vertex.is_empty() || self.sigma != 1 {
                return Err(Error::InvalidChannel("the root channel has an empty vertex and sigma 1".into()));
            }
            return Ok(());
        }
        let b = spec.branching(self.l).map_err(|_| {
            Error::InvalidChannel(format!("generation {} beyond horizon {}", self.l, spec.horizon()))
        })?;
        if self.vertex.len() != self.l - 1 {
            return Err(Error::InvalidChannel(format!(
                "a generation-{} vertex needs {} branch choices, got {}",
                self.l,
                self.l - 1,
                self.vertex.len()
            )));
        }
        for (i, &m) in self.vertex.iter().enumerate() {
            let bi = spec.branchings()[i + 1];
            if m < 1 || m > bi {
                return Err(Error::InvalidChannel(format!("choice {m} at generation {} outside 1..={bi}", i + 1)));
            }
        }
        if self.sigma < 1 || self.sigma >= b {
            return Err(Error::InvalidChannel(format!("sigma {} outside 1..{b}", self.sigma)));
        }
        Ok(())
    }
}

/// `Y_{l,v,σ}(x)`.
pub fn y_eval(spec: &TreeSpec, ch: &ChannelIndex, x: &PointAddress) -> Result<Complex64> {
    ch.validate(spec)?;
    let r = x.radial();
    if ch.l == 0 {
        return Ok(Complex64::new(spec.g0(r)?.powf(-0.5), 0.0));
    }
    if !x.in_subtree(&ch.vertex) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let b = spec.branchings()[ch.l];
    let g = spec.branching_function(ch.l, r)?;
    let m = x.path()[ch.l - 1];
    let phase = 2.0 * core::f64::consts::PI * ((m as u64 * ch.sigma as u64) % b as u64) as f64 / b as f64;
    Ok(Complex64::from_polar((b as f64 * g).powf(-0.5), phase))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSample {
    pub x: PointAddress,
    pub y: PointAddress,
    pub t: f64,
    pub value: f64,
    /// Number of generations contributing (the root channel included).
    pub channels_used: usize,
    /// Heuristic size of the error caused by the absorbing cut.
    pub truncation_error_bound: f64,
    pub clamped: bool,
}

/// Channel systems of one tree, reusable across points and times.
#[derive(Debug, Clone)]
pub struct TreeKernel {
    spec: TreeSpec,
    cfg: SolverConfig,
    systems: Vec<RadialSystem>,
}

impl TreeKernel {
    /// Builds every channel `l <= max_generation` with `r_l` below the cut.
    pub fn new(spec: &TreeSpec, cfg: &SolverConfig, max_generation: usize) -> Result<Self> {
        let top = max_generation.min(spec.horizon());
        let mut systems = Vec::new();
        for l in 0..=top {
            if spec.radii()[l] >= cfg.domain_cut {
                break;
            }
            systems.push(discretize_radial(spec, l, cfg, None)?);
        }
        Ok(Self {
            spec: spec.clone(),
            cfg: *cfg,
            systems,
        })
    }

    /// All channels below the cut.
    pub fn full(spec: &TreeSpec, cfg: &SolverConfig) -> Result<Self> {
        Self::new(spec, cfg, spec.horizon())
    }

    pub fn spec(&self) -> &TreeSpec {
        &self.spec
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn system(&self, l: usize) -> Result<&RadialSystem> {
        self.systems.get(l).ok_or(Error::GenerationOutOfRange {
            generation: l,
            horizon: self.systems.len().saturating_sub(1),
        })
    }

    fn check_point(&self, r: f64, t: f64) -> Result<()> {
        let needed = r + TRUNCATION_WIDTH * t.sqrt();
        if needed > self.cfg.domain_cut {
            return Err(Error::TruncationInsufficient {
                needed,
                cut: self.cfg.domain_cut,
            });
        }
        Ok(())
    }

    fn truncation_bound(&self, rx: f64, ry: f64, t: f64) -> Result<f64> {
        let gap = self.cfg.domain_cut - rx.max(ry);
        let g = self.spec.g0(rx)?.max(self.spec.g0(ry)?);
        Ok(g * (4.0 * core::f64::consts::PI * t).powf(-0.5) * (-gap * gap / t).exp())
    }

    /// `k(x, y, t)` by the channel sum.
    pub fn evaluate(&self, x: &PointAddress, y: &PointAddress, t: f64) -> Result<KernelSample> {
        let (rx, ry) = (x.radial(), y.radial());
        self.check_point(rx, t)?;
        self.check_point(ry, t)?;
        let mut total = Complex64::new(0.0, 0.0);
        let mut magnitude = 0.0;
        let root = ChannelIndex::root();
        let k0 = heat_kernel_1d(self.system(0)?, rx, ry, t)?.value;
        let w0 = (self.spec.g0(rx)? * self.spec.g0(ry)?).sqrt();
        let term = y_eval(&self.spec, &root, x)? * y_eval(&self.spec, &root, y)?.conj() * (w0 * k0);
        total += term;
        magnitude += term.norm();
        let mut channels_used = 1;
        let deepest = x.generation().min(y.generation()).min(x.common_prefix(y) + 1);
        for l in 1..=deepest {
            let vertex = x.path()[..l - 1].to_vec();
            let sys = self.system(l)?;
            let kl = heat_kernel_1d(sys, rx, ry, t)?.value;
            let wl = (self.spec.branching_function(l, rx)? * self.spec.branching_function(l, ry)?).sqrt();
            let b = self.spec.branchings()[l];
            let mut acc = Complex64::new(0.0, 0.0);
            for sigma in 1..b {
                let ch = ChannelIndex {
                    l,
                    vertex: vertex.clone(),
                    sigma,
                };
                acc += y_eval(&self.spec, &ch, x)? * y_eval(&self.spec, &ch, y)?.conj();
            }
            let term = acc * (wl * kl);
            total += term;
            magnitude += term.norm();
            channels_used += 1;
        }
        if total.im.abs() > IMAGINARY_TOLERANCE * magnitude.max(f64::MIN_POSITIVE) {
            return Err(Error::Precondition(format!(
                "channel sum has imaginary residue {} (magnitude {magnitude})",
                total.im
            )));
        }
        let mut value = total.re;
        let mut clamped = false;
        if value < 0.0 {
            if -value > crate::radial::CLAMP_FRACTION * magnitude.max(f64::MIN_POSITIVE) {
                return Err(Error::Precondition(format!("negative kernel value {value}")));
            }
            value = 0.0;
            clamped = true;
        }
        Ok(KernelSample {
            x: x.clone(),
            y: y.clone(),
            t,
            value,
            channels_used,
            truncation_error_bound: self.truncation_bound(rx, ry, t)?,
            clamped,
        })
    }

    /// `k(x, x, t)`; depends on `|x|` only.
    pub fn diagonal(&self, x: &PointAddress, t: f64) -> Result<KernelSample> {
        self.evaluate(x, x, t)
    }

    /// `k_0(r,r,t) + Σ_{r_l < r} (b_l - 1)/b_l k_l(r,r,t)`, evaluated directly
    /// from the radial channels.
    pub fn radial_diagonal(&self, r: f64, t: f64) -> Result<f64> {
        self.check_point(r, t)?;
        let mut acc = heat_kernel_1d(self.system(0)?, r, r, t)?.value;
        for l in 1..=self.spec.horizon() {
            if self.spec.radii()[l] >= r {
                break;
            }
            let b = self.spec.branchings()[l] as f64;
            acc += (b - 1.0) / b * heat_kernel_1d(self.system(l)?, r, r, t)?.value;
        }
        Ok(acc)
    }
}

/// `k(x, x, t)` with channel systems built for the generations of `x`.
pub fn diagonal_kernel(spec: &TreeSpec, cfg: &SolverConfig, x: &PointAddress, t: f64) -> Result<KernelSample> {
    TreeKernel::new(spec, cfg, x.generation())?.diagonal(x, t)
}

/// `k(x, y, t)` with channel systems built for the common ancestors.
pub fn full_kernel(
    spec: &TreeSpec,
    cfg: &SolverConfig,
    x: &PointAddress,
    y: &PointAddress,
    t: f64,
) -> Result<KernelSample> {
    let depth = x.generation().min(y.generation()).min(x.common_prefix(y) + 1);
    TreeKernel::new(spec, cfg, depth)?.evaluate(x, y, t)
}

/// Every branch path of length `j`, in edge-id order.
pub fn paths_of_generation(spec: &TreeSpec, j: usize) -> Result<Vec<Vec<u32>>> {
    let mut offset = 0usize;
    for l in 0..j {
        offset += spec.edges_in_generation(l)? as usize;
    }
    let count = spec.edges_in_generation(j)? as usize;
    (0..count).map(|i| spec.edge_path(offset + i)).collect()
}

/// Every channel `(l, v, σ)` with `l <= max_generation`.
pub fn channels_up_to(spec: &TreeSpec, max_generation: usize) -> Result<Vec<ChannelIndex>> {
    let mut out = alloc::vec![ChannelIndex::root()];
    for l in 1..=max_generation.min(spec.horizon()) {
        let b = spec.branchings()[l];
        for vertex in paths_of_generation(spec, l - 1)? {
            for sigma in 1..b {
                out.push(ChannelIndex {
                    l,
                    vertex: vertex.clone(),
                    sigma,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tree12() -> TreeSpec {
        TreeSpec::explicit(vec![0.0, 1.0, 2.0, 3.0], vec![1, 2, 2, 2]).unwrap()
    }

    fn tree123() -> TreeSpec {
        TreeSpec::explicit(vec![0.0, 1.0, 2.0, 3.0], vec![1, 2, 3, 3]).unwrap()
    }

    #[test]
    fn y_eval_examples() {
        let spec = tree12();
        let x = PointAddress::new(&spec, vec![1, 2, 1], 3.5).unwrap();
        // g_0 = 8 there
        let y = y_eval(&spec, &ChannelIndex::root(), &x).unwrap();
        assert!((y.re - 8f64.powf(-0.5)).abs() < 1e-15 && y.im == 0.0);
        let ch = ChannelIndex {
            l: 2,
            vertex: vec![2],
            sigma: 1,
        };
        assert_eq!(y_eval(&spec, &ch, &x).unwrap(), Complex64::new(0.0, 0.0));
        let bad = ChannelIndex {
            l: 2,
            vertex: vec![],
            sigma: 1,
        };
        assert!(matches!(y_eval(&spec, &bad, &x), Err(Error::InvalidChannel(_))));
        let bad_sigma = ChannelIndex {
            l: 1,
            vertex: vec![],
            sigma: 2,
        };
        assert!(bad_sigma.validate(&spec).is_err());
    }

    #[test]
    fn channels_are_orthonormal_on_spheres() {
        for spec in [tree12(), tree123()] {
            for &r in &[0.5, 1.5, 2.25, 3.7] {
                let j = spec.generation_at(r);
                let points: Vec<PointAddress> = paths_of_generation(&spec, j)
                    .unwrap()
                    .into_iter()
                    .map(|p| PointAddress::new(&spec, p, r).unwrap())
                    .collect();
                let chans = channels_up_to(&spec, j).unwrap();
                assert_eq!(chans.len(), points.len());
                let vals: Vec<Vec<Complex64>> = chans
                    .iter()
                    .map(|c| points.iter().map(|x| y_eval(&spec, c, x).unwrap()).collect())
                    .collect();
                for a in 0..chans.len() {
                    for b in 0..chans.len() {
                        let s: Complex64 = vals[a].iter().zip(&vals[b]).map(|(u, v)| u * v.conj()).sum();
                        let target = if a == b { 1.0 } else { 0.0 };
                        assert!((s - target).norm() <= 1e-12, "r={r} {:?} {:?}", chans[a], chans[b]);
                    }
                }
                // completeness: Σ_c Y_c(x) conj(Y_c(x')) = δ_{x,x'}
                for (p, x) in points.iter().enumerate() {
                    for (q, y) in points.iter().enumerate() {
                        let s: Complex64 = vals.iter().map(|v| v[p] * v[q].conj()).sum();
                        let target = if p == q { 1.0 } else { 0.0 };
                        assert!((s - target).norm() <= 1e-12, "{x:?} {y:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn root_edge_is_channel_zero() {
        let spec = tree12();
        let cfg = SolverConfig::new(10.0, 16, 1.0).unwrap();
        let kern = TreeKernel::full(&spec, &cfg).unwrap();
        let x = PointAddress::on_first_branch(&spec, 0.6).unwrap();
        let s = kern.diagonal(&x, 0.5).unwrap();
        let k0 = heat_kernel_1d(kern.system(0).unwrap(), 0.6, 0.6, 0.5).unwrap().value;
        assert_eq!(s.value, k0);
        assert_eq!(s.channels_used, 1);
    }

    #[test]
    fn diagonal_matches_closed_weights_and_envelope() {
        let spec = tree123();
        let cfg = SolverConfig::new(12.0, 16, 1.0).unwrap();
        let kern = TreeKernel::full(&spec, &cfg).unwrap();
        for &r in &[0.5, 1.0, 1.5, 2.0, 2.5, 3.5, 4.0] {
            for &t in &[0.1, 0.5, 1.0] {
                let x = PointAddress::along_branch(&spec, r, 2).unwrap();
                let s = kern.diagonal(&x, t).unwrap();
                let direct = kern.radial_diagonal(r, t).unwrap();
                assert!((s.value - direct).abs() <= 1e-13 * direct, "{r} {t}");
                let k0 = heat_kernel_1d(kern.system(0).unwrap(), r, r, t).unwrap().value;
                assert!(s.value <= k0 * spec.g0(r).unwrap() * (1.0 + 1e-12));
                let expected = 1 + spec.radii()[1..].iter().filter(|&&rl| rl < r).count();
                assert_eq!(s.channels_used, expected);
            }
        }
    }

    #[test]
    fn kernel_symmetry_and_consistency() {
        let spec = tree123();
        let cfg = SolverConfig::new(12.0, 16, 1.0).unwrap();
        let kern = TreeKernel::full(&spec, &cfg).unwrap();
        let pts = [
            PointAddress::new(&spec, vec![1, 2], 2.5).unwrap(),
            PointAddress::new(&spec, vec![1, 3], 2.75).unwrap(),
            PointAddress::new(&spec, vec![2, 1, 1], 3.5).unwrap(),
            PointAddress::new(&spec, vec![1, 2, 3], 3.25).unwrap(),
            PointAddress::new(&spec, vec![], 0.5).unwrap(),
        ];
        for x in &pts {
            for y in &pts {
                let a = kern.evaluate(x, y, 0.7).unwrap();
                let b = kern.evaluate(y, x, 0.7).unwrap();
                assert!((a.value - b.value).abs() <= 1e-12 * a.value.max(1e-300));
                assert!(a.value >= 0.0);
            }
            let d = kern.diagonal(x, 0.7).unwrap();
            assert_eq!(d.value, kern.evaluate(x, x, 0.7).unwrap().value);
        }
        let free = full_kernel(&spec, &cfg, &pts[0], &pts[1], 0.7).unwrap();
        assert!((free.value - kern.evaluate(&pts[0], &pts[1], 0.7).unwrap().value).abs() < 1e-15);
    }

    #[test]
    fn truncation_is_enforced() {
        let spec = tree12();
        let cfg = SolverConfig::new(6.0, 8, 1.0).unwrap();
        let x = PointAddress::on_first_branch(&spec, 3.5).unwrap();
        assert!(matches!(
            diagonal_kernel(&spec, &cfg, &x, 1.0),
            Err(Error::TruncationInsufficient { .. })
        ));
        assert!(diagonal_kernel(&spec, &cfg, &x, 0.1).is_ok());
    }
}
