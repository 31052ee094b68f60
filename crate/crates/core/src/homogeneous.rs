//! Spectral gap and generalized ground state of homogeneous trees with unit
//! edges.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{sobolev_constant, SampledWeight};
use crate::radial::SolverConfig;

const RK4_SUBSTEPS: usize = 4;

/// `(λ_b, R_b)` with `R_b = (√b + 1/√b)/2` and `λ_b = arccos(1/R_b)^2`.
pub fn lambda_closed_form(b: u32) -> Result<(f64, f64)> {
    if b < 2 {
        return Err(Error::Domain(format!("branching must be at least 2, got {b}")));
    }
    let sb = (b as f64).sqrt();
    let r_b = 0.5 * (sb + 1.0 / sb);
    let theta = (1.0 / r_b).acos();
    Ok((theta * theta, r_b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousData {
    pub b: u32,
    pub lambda_b: f64,
    pub r_b: f64,
    /// Grid nodes on `[0, ⌈R⌉]`; every integer radius is a node.
    pub nodes: Vec<f64>,
    /// `ω_b` at the nodes, `ω_b(0) = 1`.
    pub omega: Vec<f64>,
    pub s_b: f64,
    pub s_tilde_b: f64,
    /// Smallest `c` with `c^{-1} e(r) <= ω_b(r) <= c e(r)` on the grid,
    /// `e(r) = (1 + r)/√g_b(r)`, both one-sided values of `g_b` at vertices.
    pub c_b: f64,
}

impl HomogeneousData {
    /// `ω_b` at the nearest node.
    pub fn omega_at(&self, r: f64) -> f64 {
        let k = self.nodes.partition_point(|&x| x < r).min(self.nodes.len() - 1);
        let k = if k > 0 && r - self.nodes[k - 1] < self.nodes[k] - r { k - 1 } else { k };
        self.omega[k]
    }

    /// Explicit envelope `(3/(2 S̃_b))^{3/2} e^{-λ_b t} t^{-3/2} ω_b(r)^2` for
    /// the radial kernel `k_0(r, r, t)`.
    pub fn radial_envelope(&self, r: f64, t: f64) -> f64 {
        let w = self.omega_at(r);
        (1.5 / self.s_tilde_b).powf(1.5) * (-self.lambda_b * t).exp() * t.powf(-1.5) * w * w
    }
}

fn g_b(b: f64, r: f64) -> f64 {
    // b^j on (j, j+1]
    let j = if r <= 0.0 { 0.0 } else { r.ceil() - 1.0 };
    b.powf(j)
}

/// Integrates `-(g_b ω')' = λ_b g_b ω` edge by edge from `ω(0) = 1`,
/// `ω'(0) = 0`, with continuity of `ω` and `ω'(j-) = b ω'(j+)` at every
/// integer `j`, then evaluates `S_b`, `S̃_b = (3/4)^{4/3} S_b` and `c_b`.
pub fn ground_state_homogeneous(b: u32, cfg: &SolverConfig) -> Result<HomogeneousData> {
    cfg.validate()?;
    let (lambda_b, r_b) = lambda_closed_form(b)?;
    let bf = b as f64;
    let cut = cfg.domain_cut;
    let per_edge = cfg.points_per_unit;
    let edges = (cut - 1e-9).ceil().max(1.0) as usize;
    let h = 1.0 / per_edge as f64;
    let sub = h / RK4_SUBSTEPS as f64;
    let rhs = |w: f64, p: f64| (p, -lambda_b * w);
    let mut nodes = Vec::new();
    let mut omega = Vec::new();
    let mut mid = Vec::new();
    let (mut w, mut p) = (1.0f64, 0.0f64);
    nodes.push(0.0);
    omega.push(w);
    for j in 0..edges {
        for k in 0..per_edge {
            for s in 0..RK4_SUBSTEPS {
                let (k1w, k1p) = rhs(w, p);
                let (k2w, k2p) = rhs(w + 0.5 * sub * k1w, p + 0.5 * sub * k1p);
                let (k3w, k3p) = rhs(w + 0.5 * sub * k2w, p + 0.5 * sub * k2p);
                let (k4w, k4p) = rhs(w + sub * k3w, p + sub * k3p);
                w += sub / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
                p += sub / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
                if s + 1 == RK4_SUBSTEPS / 2 {
                    mid.push(w);
                }
            }
            let r = j as f64 + (k + 1) as f64 * h;
            if !(w > 0.0) {
                return Err(Error::NonPositiveGroundState(r));
            }
            nodes.push(r);
            omega.push(w);
        }
        p /= bf;
    }
    let cells: Vec<f64> = nodes
        .windows(2)
        .zip(&mid)
        .map(|(x, &m)| m * m * g_b(bf, 0.5 * (x[0] + x[1])))
        .collect();
    // ω²g ≈ (1 + r)^2 times a profile of period 1: average over the last edge
    let last = *nodes.last().expect("nonempty");
    let (mut mass_coef, mut inverse_coef) = (0.0, 0.0);
    for (x, &c) in nodes.windows(2).zip(&cells) {
        if x[0] >= last - 1.0 - 1e-12 {
            let q = (1.0 + 0.5 * (x[0] + x[1])).powi(2);
            mass_coef += (x[1] - x[0]) * c / q;
            inverse_coef += (x[1] - x[0]) * q / c;
        }
    }
    let weight = SampledWeight::with_tail_coefficients(nodes.clone(), cells, 3.0, mass_coef, inverse_coef)?;
    let sob = sobolev_constant(&weight, 3.0, last, nodes.len().max(2))?;
    let s_b = sob.s;
    let s_tilde_b = (0.75f64).powf(4.0 / 3.0) * s_b;
    let mut c_b = 1.0f64;
    for (&r, &w) in nodes.iter().zip(&omega) {
        let mut gs = alloc::vec![g_b(bf, r)];
        if r > 0.0 && (r - r.round()).abs() < 1e-12 {
            gs.push(g_b(bf, r + 0.5 * h));
        }
        for g in gs {
            let e = (1.0 + r) / g.sqrt();
            c_b = c_b.max(w / e).max(e / w);
        }
    }
    Ok(HomogeneousData {
        b,
        lambda_b,
        r_b,
        nodes,
        omega,
        s_b,
        s_tilde_b,
        c_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::discretize_radial;
    use crate::tree::TreeSpec;

    #[test]
    fn closed_form_values() {
        let (l2, r2) = lambda_closed_form(2).unwrap();
        assert!((r2 - 1.060_660_171_779_821_3).abs() < 1e-15);
        // mpmath, 30 digits
        assert!((l2 - 0.115_489_125_027_329_07).abs() < 1e-15, "{l2}");
        let (l4, r4) = lambda_closed_form(4).unwrap();
        assert_eq!(r4, 1.25);
        assert!((l4 - 0.414_093_677_018_186_43).abs() < 1e-15, "{l4}");
        let (l3, _) = lambda_closed_form(3).unwrap();
        assert!((l3 - 0.274_155_677_808_037_74).abs() < 1e-15);
        assert!(lambda_closed_form(1).is_err());
        let mut prev = 0.0;
        for b in 2..=64 {
            let (l, _) = lambda_closed_form(b).unwrap();
            assert!(l > prev && l < (core::f64::consts::PI / 2.0).powi(2));
            prev = l;
        }
    }

    #[test]
    fn first_edge_is_cosine() {
        let cfg = SolverConfig::new(12.0, 16, 1.0).unwrap();
        let data = ground_state_homogeneous(2, &cfg).unwrap();
        let k = data.lambda_b.sqrt();
        for (&r, &w) in data.nodes.iter().zip(&data.omega).take_while(|(r, _)| **r <= 1.0) {
            assert!((w - (k * r).cos()).abs() < 1e-10);
        }
        assert!((data.omega_at(1.0) - 1.0 / data.r_b).abs() < 1e-10);
    }

    #[test]
    fn envelope_and_constants() {
        let cfg = SolverConfig::new(30.0, 16, 1.0).unwrap();
        for b in [2u32, 3, 4] {
            let data = ground_state_homogeneous(b, &cfg).unwrap();
            assert!(data.omega.iter().all(|&w| w > 0.0));
            assert!(data.c_b.is_finite() && data.c_b >= 1.0);
            assert!(data.s_b > 0.0);
            assert!((data.s_tilde_b / data.s_b - 0.75f64.powf(4.0 / 3.0)).abs() < 1e-15);
            let finer = ground_state_homogeneous(b, &cfg.refined(2)).unwrap();
            assert!((finer.c_b - data.c_b).abs() < 1e-3 * data.c_b);
            assert!((finer.s_b - data.s_b).abs() < 1e-2 * data.s_b);
        }
    }

    #[test]
    fn discretized_gap_approaches_closed_form() {
        let spec = TreeSpec::homogeneous(2, 1.0, 40).unwrap();
        let (lb, _) = lambda_closed_form(2).unwrap();
        let mut prev = f64::INFINITY;
        for cut in [8.0, 16.0, 32.0] {
            let cfg = SolverConfig::new(cut, 16, 1.0).unwrap();
            let sys = discretize_radial(&spec, 0, &cfg, None).unwrap();
            let l1 = sys.eigenvalues()[0];
            assert!(l1 > lb && l1 < prev);
            prev = l1;
        }
    }
}
