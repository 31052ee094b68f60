//! Executable versions of the diagonal heat kernel bounds: both sides are
//! evaluated over a sweep of radii and times, implicit constants are fitted
//! and their stability under grid refinement is reported.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::geometry_scan;
use crate::homogeneous::{ground_state_homogeneous, lambda_closed_form};
use crate::kernel::TreeKernel;
use crate::radial::{heat_kernel_1d, SolverConfig, BAND_LIMIT_EXPONENT, TRUNCATION_WIDTH};
use crate::tree::TreeSpec;

/// Smallest tolerance used in any comparison.
pub const BASE_TOLERANCE: f64 = 1e-9;
/// Lower bounds are only checked for `t >= LOWER_BOUND_STEPS * h^2`.
pub const LOWER_BOUND_STEPS: f64 = 100.0;
/// Smallest time of default sweeps on fine grids.
pub const DEFAULT_MIN_TIME: f64 = 1e-2;
/// Relative band for fitted constants between two refinement levels.
pub const STABILITY_BAND: f64 = 0.10;
/// Wider band for the homogeneous constant, whose fit sits near the cut.
pub const HOMOGENEOUS_STABILITY_BAND: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundKind {
    Universal,
    TwoSided,
    DimBound,
    NoVd,
    Homogeneous,
    K0TwoSided,
    VolumeDoubling,
    Poincare,
    Nash,
    LogSobolev,
}

impl BoundKind {
    pub const ALL: [BoundKind; 10] = [
        BoundKind::Universal,
        BoundKind::TwoSided,
        BoundKind::DimBound,
        BoundKind::NoVd,
        BoundKind::Homogeneous,
        BoundKind::K0TwoSided,
        BoundKind::VolumeDoubling,
        BoundKind::Poincare,
        BoundKind::Nash,
        BoundKind::LogSobolev,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Universal => "universal",
            BoundKind::TwoSided => "two_sided",
            BoundKind::DimBound => "dim_bound",
            BoundKind::NoVd => "no_vd",
            BoundKind::Homogeneous => "homogeneous",
            BoundKind::K0TwoSided => "k0_two_sided",
            BoundKind::VolumeDoubling => "volume_doubling",
            BoundKind::Poincare => "poincare",
            BoundKind::Nash => "nash",
            BoundKind::LogSobolev => "log_sobolev",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == s)
    }

    /// Checked by quadrature over test functions rather than kernel sweeps.
    pub fn is_functional(self) -> bool {
        matches!(
            self,
            BoundKind::VolumeDoubling | BoundKind::Poincare | BoundKind::Nash | BoundKind::LogSobolev
        )
    }

    /// The constant is fitted rather than given in closed form.
    pub fn is_fitted(self) -> bool {
        matches!(
            self,
            BoundKind::TwoSided | BoundKind::DimBound | BoundKind::Homogeneous | BoundKind::K0TwoSided
        )
    }
}

/// Which side of a two-sided estimate a sample row checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Upper => "upper",
            Side::Lower => "lower",
        }
    }
}

/// One comparison. `margin` is normalized by the larger side and is negative
/// when the inequality fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRow {
    pub r: f64,
    pub t: f64,
    pub side: Side,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub samples: usize,
    pub worst_margin: f64,
    pub tolerance: f64,
    /// Fitted upper constant on the coarse grid.
    pub empirical_constant: Option<f64>,
    /// Same fit on the refined grid.
    pub refined_constant: Option<f64>,
    pub lower_constant: Option<f64>,
    pub refined_lower_constant: Option<f64>,
    /// Largest relative change of a fitted constant between the two grids.
    pub stability: Option<f64>,
    pub stability_band: Option<f64>,
    /// Closed-form constant used by explicit kinds.
    pub explicit_constant: Option<f64>,
    pub violated: bool,
    pub config_digest: String,
    /// Time range skipped by the lower-bound check.
    pub excluded_times: Option<(f64, f64)>,
    pub notes: Vec<String>,
    pub rows: Vec<SampleRow>,
}

impl BoundReport {
    pub(crate) fn assemble(kind: BoundKind, rows: Vec<SampleRow>, tolerance: f64, config_digest: String) -> Self {
        let worst_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
        let worst_margin = if rows.is_empty() { 0.0 } else { worst_margin };
        Self {
            kind,
            samples: rows.len(),
            worst_margin,
            tolerance,
            empirical_constant: None,
            refined_constant: None,
            lower_constant: None,
            refined_lower_constant: None,
            stability: None,
            stability_band: None,
            explicit_constant: None,
            violated: worst_margin < -tolerance,
            config_digest,
            excluded_times: None,
            notes: Vec::new(),
            rows,
        }
    }

    pub fn verdict(&self) -> &'static str {
        if self.violated {
            "violated"
        } else {
            "holds"
        }
    }

    /// Fitted constants are finite, positive and inside their band.
    pub fn is_stable(&self) -> bool {
        let ok = |c: Option<f64>| c.is_none_or(|c| c.is_finite() && c > 0.0);
        ok(self.empirical_constant)
            && ok(self.refined_constant)
            && ok(self.lower_constant)
            && ok(self.refined_lower_constant)
            && match (self.stability, self.stability_band) {
                (Some(s), Some(b)) => s <= b,
                _ => true,
            }
    }
}

/// Sample set for diagonal bounds; the diagonal depends on `|x|` only.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    radii: Vec<f64>,
    times: Vec<f64>,
}

impl Sweep {
    pub fn new(radii: Vec<f64>, times: Vec<f64>) -> Result<Self> {
        if radii.is_empty() || times.is_empty() {
            return Err(Error::Domain("sweep needs at least one radius and one time".into()));
        }
        if radii.iter().any(|&r| !(r >= 0.0) || !r.is_finite()) {
            return Err(Error::Domain("sweep radii must be finite and nonnegative".into()));
        }
        if times.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
            return Err(Error::Domain("sweep times must be finite and positive".into()));
        }
        Ok(Self { radii, times })
    }

    /// `n` log-spaced times on `[lo, hi]`.
    pub fn log_times(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
        if !(lo > 0.0) || !(hi >= lo) || n == 0 {
            return Err(Error::Domain(format!("bad time grid [{lo}, {hi}] with {n} points")));
        }
        if n == 1 {
            return Ok(alloc::vec![lo]);
        }
        let (a, b) = (lo.ln(), hi.ln());
        Ok((0..n)
            .map(|i| {
                if i == 0 {
                    lo
                } else if i + 1 == n {
                    hi
                } else {
                    (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                }
            })
            .collect())
    }

    /// Log time grid on `[t_lo, t_max]` and radii at edge midpoints and
    /// `edge/16` inside each end, kept where `r + 6√t_max` fits below the cut.
    ///
    /// `t_lo` is `1e-2` or the smallest time the grid resolves,
    /// `t (π/h)^2 >= 36`, whichever is larger.
    pub fn default_for(spec: &TreeSpec, cfg: &SolverConfig, n_times: usize) -> Result<Self> {
        cfg.validate()?;
        let h = 1.0 / cfg.points_per_unit as f64;
        let resolved = BAND_LIMIT_EXPONENT * (h / core::f64::consts::PI).powi(2) * (1.0 + 1e-12);
        let t_lo = DEFAULT_MIN_TIME.max(resolved).min(cfg.t_max);
        let times = Self::log_times(t_lo, cfg.t_max, n_times)?;
        let x_max = cfg.domain_cut - TRUNCATION_WIDTH * cfg.t_max.sqrt();
        if !(x_max > 0.0) {
            return Err(Error::TruncationInsufficient {
                needed: TRUNCATION_WIDTH * cfg.t_max.sqrt(),
                cut: cfg.domain_cut,
            });
        }
        let mut radii = Vec::new();
        let n = spec.radii().len();
        for l in 0..n {
            let a = spec.radii()[l];
            if a >= x_max {
                break;
            }
            let b = spec.radii().get(l + 1).copied().unwrap_or(spec.extent());
            let b = if b.is_finite() { b } else { x_max };
            let e = b - a;
            for r in [a + e / 16.0, a + e / 2.0, b - e / 16.0] {
                if r <= x_max {
                    radii.push(r);
                }
            }
        }
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        Self::new(radii, times)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn max_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    fn min_time(&self) -> f64 {
        self.times.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn max_time(&self) -> f64 {
        self.times.iter().copied().fold(0.0, f64::max)
    }
}

/// Exponents used by the dimension-dependent kinds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    /// Global dimension `d` for `dim_bound`.
    pub dimension: f64,
    /// `δ > 2` for `no_vd`.
    pub delta: f64,
    /// Grid count for the geometry scans behind preconditions.
    pub n_scan: usize,
}

impl Default for BoundParams {
    fn default() -> Self {
        Self {
            dimension: 2.0,
            delta: 3.0,
            n_scan: 2000,
        }
    }
}

fn upper_margin(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        (rhs - lhs) / rhs
    } else if lhs > 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn relative_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Diagonal values on one grid level, `[radius][time]`.
fn diagonal_table(spec: &TreeSpec, cfg: &SolverConfig, sweep: &Sweep, channel_zero_only: bool) -> Result<Vec<Vec<f64>>> {
    let top = if channel_zero_only {
        0
    } else {
        spec.generation_at(sweep.max_radius())
    };
    let kernel = TreeKernel::new(spec, cfg, top)?;
    let sys0 = kernel.system(0)?;
    let mut out = Vec::with_capacity(sweep.radii.len());
    for &r in &sweep.radii {
        let mut row = Vec::with_capacity(sweep.times.len());
        for &t in &sweep.times {
            let needed = r + TRUNCATION_WIDTH * t.sqrt();
            if needed > cfg.domain_cut {
                return Err(Error::TruncationInsufficient {
                    needed,
                    cut: cfg.domain_cut,
                });
            }
            let v = if channel_zero_only {
                heat_kernel_1d(sys0, r, r, t)?.value
            } else {
                kernel.radial_diagonal(r, t)?
            };
            row.push(v);
        }
        out.push(row);
    }
    Ok(out)
}

/// `sup g(2r)/g(r)` keeps growing with the scan range: doubling fails.
fn check_doubling(spec: &TreeSpec, r_max: f64, n_scan: usize) -> Result<f64> {
    let r_max = r_max.min(spec.extent());
    let full = geometry_scan(spec, 1.0, 3.0, r_max, n_scan)?;
    let half = geometry_scan(spec, 1.0, 3.0, 0.5 * r_max, n_scan)?;
    if full.doubling_constant > half.doubling_constant * (1.0 + 1e-9) {
        return Err(Error::Precondition(format!(
            "doubling condition g0(2r) <= C0 g0(r) not satisfied on scan range [0, {r_max}]: \
             ratio grows from {} to {}",
            half.doubling_constant, full.doubling_constant
        )));
    }
    Ok(full.doubling_constant)
}

fn digest(cfg: &SolverConfig, sweep: &Sweep, extra: &str) -> String {
    format!(
        "cut={};ppu={},{};t={}..{};dispersion={};radii={};times={}{}",
        cfg.domain_cut,
        cfg.points_per_unit,
        2 * cfg.points_per_unit,
        sweep.min_time(),
        sweep.max_time(),
        cfg.dispersion_correction,
        sweep.radii.len(),
        sweep.times.len(),
        extra
    )
}

/// Computes both sides of the diagonal bound `kind` over `sweep` on the grid
/// of `cfg` and on a grid twice as fine.
///
/// Implicit constants are fitted on the coarse grid and checked on the fine
/// one; the tolerance is the larger of [`BASE_TOLERANCE`] and the largest
/// relative change of a kernel value between the grids.
pub fn verify_bound(
    kind: BoundKind,
    spec: &TreeSpec,
    cfg: &SolverConfig,
    sweep: &Sweep,
    params: &BoundParams,
) -> Result<BoundReport> {
    if kind.is_functional() {
        return Err(Error::Domain(format!(
            "{} is checked by functional_inequality_check",
            kind.name()
        )));
    }
    if sweep.max_time() > cfg.t_max * (1.0 + 1e-12) {
        return Err(Error::InvalidTime {
            t: sweep.max_time(),
            t_max: cfg.t_max,
        });
    }
    let coarse_cfg = cfg.with_min_time(sweep.min_time());
    let fine_cfg = coarse_cfg.refined(2);
    let mut extra = String::new();

    // preconditions and closed-form ingredients
    let mut explicit = None;
    let mut homogeneous = None;
    let mut notes = Vec::new();
    match kind {
        BoundKind::TwoSided | BoundKind::K0TwoSided => {
            let c0 = check_doubling(spec, cfg.domain_cut, params.n_scan)?;
            notes.push(format!("doubling constant on scan range: {c0}"));
        }
        BoundKind::DimBound => {
            let rep = geometry_scan(spec, params.dimension, params.delta, cfg.domain_cut.min(spec.extent()), params.n_scan)?;
            if !rep.has_dimension() {
                return Err(Error::Precondition(format!(
                    "g0 is not comparable to (1+r)^(d-1) with d = {} on the scan range",
                    params.dimension
                )));
            }
            extra = format!(";d={}", params.dimension);
        }
        BoundKind::NoVd => {
            let r_max = if spec.extent().is_finite() { spec.extent() } else { cfg.domain_cut };
            let rep = geometry_scan(spec, 1.0, params.delta, r_max, params.n_scan)?;
            if rep.sobolev_divergent || !(rep.sobolev_s_tilde > 0.0) {
                return Err(Error::Precondition(format!(
                    "S(delta) is not finite and positive for delta = {}",
                    params.delta
                )));
            }
            let d = params.delta;
            explicit = Some((d / (2.0 * rep.sobolev_s_tilde)).powf(0.5 * d));
            extra = format!(";delta={d};S_tilde={}", rep.sobolev_s_tilde);
        }
        BoundKind::Homogeneous => {
            let b = spec
                .is_homogeneous()
                .ok_or_else(|| Error::Precondition("homogeneous bound requires a homogeneous tree with unit edges".into()))?;
            let (lambda, _) = lambda_closed_form(b)?;
            homogeneous = Some((b, lambda));
            extra = format!(";b={b};lambda={lambda}");
        }
        BoundKind::Universal => {
            explicit = Some(1.0);
        }
        _ => {}
    }

    let zero_only = kind == BoundKind::K0TwoSided;
    let coarse = diagonal_table(spec, &coarse_cfg, sweep, zero_only)?;
    let fine = diagonal_table(spec, &fine_cfg, sweep, zero_only)?;
    let mut delta = 0.0f64;
    for (rc, rf) in coarse.iter().zip(&fine) {
        for (&a, &b) in rc.iter().zip(rf) {
            delta = delta.max(relative_change(a, b));
        }
    }
    let tolerance = BASE_TOLERANCE.max(delta);
    let h = 1.0 / cfg.points_per_unit as f64;
    let lower_from = LOWER_BOUND_STEPS * h * h;

    // shape functions: upper bound = C * up(r, t), lower bound = low(r, t) / c
    let g0 = |r: f64| spec.g0(r);
    let up = |r: f64, t: f64| -> Result<f64> {
        Ok(match kind {
            BoundKind::Universal => (core::f64::consts::PI * t).powf(-0.5),
            BoundKind::TwoSided => g0(r)? / (t.sqrt() * g0(r + t.sqrt())?),
            BoundKind::K0TwoSided => 1.0 / (t.sqrt() * g0(r + t.sqrt())?),
            BoundKind::DimBound => t.powf(-0.5 * params.dimension) * g0(r)?,
            BoundKind::NoVd => t.powf(-0.5 * params.delta) * g0(r)?,
            BoundKind::Homogeneous => {
                let (_, lambda) = homogeneous.expect("set above");
                (-lambda * t).exp() * t.powf(-1.5) * (1.0 + r) * (1.0 + r)
            }
            _ => unreachable!("functional kinds rejected above"),
        })
    };
    let has_lower = matches!(kind, BoundKind::TwoSided | BoundKind::K0TwoSided);
    let low = |r: f64, t: f64| -> Result<f64> { Ok(1.0 / (t.sqrt() * g0(r + t.sqrt())?)) };

    let fit = |table: &[Vec<f64>]| -> Result<(f64, Option<f64>)> {
        let (mut c_up, mut c_low) = (0.0f64, 0.0f64);
        for (i, &r) in sweep.radii.iter().enumerate() {
            for (j, &t) in sweep.times.iter().enumerate() {
                let k = table[i][j];
                c_up = c_up.max(k / up(r, t)?);
                if has_lower && t >= lower_from {
                    c_low = c_low.max(low(r, t)? / k);
                }
            }
        }
        Ok((c_up, has_lower.then_some(c_low)))
    };

    let (c_up, c_low, c_up_f, c_low_f) = if kind.is_fitted() {
        let (a, b) = fit(&coarse)?;
        let (c, d) = fit(&fine)?;
        (a, b, Some(c), d)
    } else {
        (explicit.expect("explicit kinds set a constant"), None, None, None)
    };

    let mut rows = Vec::new();
    let levels: &[&Vec<Vec<f64>>] = if kind.is_fitted() { &[&fine] } else { &[&coarse, &fine] };
    for table in levels {
        for (i, &r) in sweep.radii.iter().enumerate() {
            for (j, &t) in sweep.times.iter().enumerate() {
                let k = table[i][j];
                let rhs = c_up * up(r, t)?;
                rows.push(SampleRow {
                    r,
                    t,
                    side: Side::Upper,
                    lhs: k,
                    rhs,
                    margin: upper_margin(k, rhs),
                });
                if let Some(cl) = c_low {
                    if t >= lower_from {
                        let bound = low(r, t)? / cl;
                        rows.push(SampleRow {
                            r,
                            t,
                            side: Side::Lower,
                            lhs: k,
                            rhs: bound,
                            margin: if k > 0.0 { (k - bound) / k } else { -1.0 },
                        });
                    }
                }
            }
        }
    }

    let mut report = BoundReport::assemble(kind, rows, tolerance, digest(cfg, sweep, &extra));
    report.notes = notes;
    if kind.is_fitted() {
        report.empirical_constant = Some(c_up);
        report.refined_constant = c_up_f;
        report.lower_constant = c_low;
        report.refined_lower_constant = c_low_f;
        let mut stability = relative_change(c_up, c_up_f.expect("fitted"));
        if let (Some(a), Some(b)) = (c_low, c_low_f) {
            stability = stability.max(relative_change(a, b));
        }
        report.stability = Some(stability);
        report.stability_band = Some(if kind == BoundKind::Homogeneous {
            HOMOGENEOUS_STABILITY_BAND
        } else {
            STABILITY_BAND
        });
    } else {
        report.explicit_constant = Some(c_up);
    }
    if has_lower && sweep.min_time() < lower_from {
        report.excluded_times = Some((sweep.min_time(), lower_from));
        report
            .notes
            .push(format!("lower bound not checked for t < {lower_from} (100 grid steps squared)"));
    }
    if let Some((b, _)) = homogeneous {
        // explicit radial envelope with ω_b and S̃_b, checked against k_0
        let gs_cfg = SolverConfig::new(cfg.domain_cut, cfg.points_per_unit, cfg.t_max)?;
        let data = ground_state_homogeneous(b, &gs_cfg)?;
        let k0 = diagonal_table(spec, &fine_cfg, sweep, true)?;
        let mut worst = f64::INFINITY;
        for (i, &r) in sweep.radii.iter().enumerate() {
            for (j, &t) in sweep.times.iter().enumerate() {
                worst = worst.min(upper_margin(k0[i][j], data.radial_envelope(r, t)));
            }
        }
        report.notes.push(format!(
            "radial envelope (3/(2 S_tilde_b))^(3/2) e^(-lambda t) t^(-3/2) omega^2 on k_0: worst margin {worst}, \
             S_b = {}, c_b = {}",
            data.s_b, data.c_b
        ));
    }
    Ok(report)
}

/// Least-squares slope of `log k(r, r, t)` against `log t` on `n` log-spaced
/// times in `[t_lo, t_hi]`.
pub fn decay_slope(kernel: &TreeKernel, r: f64, t_lo: f64, t_hi: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain("slope fit needs at least two times".into()));
    }
    let times = Sweep::log_times(t_lo, t_hi, n)?;
    let mut pts = Vec::with_capacity(n);
    for &t in &times {
        let k = kernel.radial_diagonal(r, t)?;
        if !(k > 0.0) {
            return Err(Error::Domain(format!("nonpositive kernel value at t = {t}")));
        }
        pts.push((t.ln(), k.ln()));
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn half_line_setup() -> (TreeSpec, SolverConfig) {
        (TreeSpec::half_line(), SolverConfig::new(20.0, 16, 4.0).unwrap())
    }

    #[test]
    fn names_round_trip() {
        for k in BoundKind::ALL {
            assert_eq!(BoundKind::parse(k.name()), Some(k));
        }
        assert_eq!(BoundKind::parse("bogus"), None);
    }

    #[test]
    fn universal_saturates_at_origin() {
        let (spec, cfg) = half_line_setup();
        let sweep = Sweep::new(vec![0.0], Sweep::log_times(0.05, 4.0, 9).unwrap()).unwrap();
        let rep = verify_bound(BoundKind::Universal, &spec, &cfg, &sweep, &BoundParams::default()).unwrap();
        assert!(!rep.violated);
        assert!(rep.worst_margin.abs() < 1e-3, "{}", rep.worst_margin);
        assert_eq!(rep.samples, 18);
    }

    #[test]
    fn universal_holds_on_branching_tree() {
        let spec = TreeSpec::explicit(vec![0.0, 1.0, 2.0], vec![1, 2, 3]).unwrap();
        let cfg = SolverConfig::new(16.0, 16, 2.0).unwrap();
        let sweep = Sweep::default_for(&spec, &cfg, 6).unwrap();
        let rep = verify_bound(BoundKind::Universal, &spec, &cfg, &sweep, &BoundParams::default()).unwrap();
        assert!(!rep.violated, "{}", rep.worst_margin);
        assert!(rep.worst_margin > -1e-3);
    }

    #[test]
    fn default_sweep_respects_truncation() {
        let spec = TreeSpec::dyadic(2.0, 6).unwrap();
        let cfg = SolverConfig::new(30.0, 16, 4.0).unwrap();
        let sweep = Sweep::default_for(&spec, &cfg, 5).unwrap();
        assert!(sweep.radii().iter().all(|&r| r + 12.0 <= 30.0));
        assert!(sweep.radii().contains(&0.5));
        assert!(sweep.radii().contains(&(1.0 + 2.0 / 16.0)));
        // 36 h^2/π^2 with h = 1/16
        let t_lo = sweep.times()[0];
        assert!((t_lo - 36.0 / (256.0 * core::f64::consts::PI.powi(2))).abs() < 1e-13);
        assert!(t_lo * (16.0 * core::f64::consts::PI).powi(2) >= 36.0);
        assert_eq!(*sweep.times().last().unwrap(), 4.0);
        let fine = Sweep::default_for(&spec, &SolverConfig::new(30.0, 64, 4.0).unwrap(), 5).unwrap();
        assert_eq!(fine.times()[0], DEFAULT_MIN_TIME);
        let tight = SolverConfig::new(5.0, 16, 1.0).unwrap();
        assert!(Sweep::default_for(&spec, &tight, 5).is_err());
    }

    #[test]
    fn two_sided_fits_are_ordered_and_stable() {
        let spec = TreeSpec::dyadic(2.0, 5).unwrap();
        let cfg = SolverConfig::new(30.0, 16, 4.0).unwrap();
        let sweep = Sweep::default_for(&spec, &cfg, 6).unwrap();
        let rep = verify_bound(BoundKind::TwoSided, &spec, &cfg, &sweep, &BoundParams::default()).unwrap();
        assert!(!rep.violated);
        let (up, low) = (rep.empirical_constant.unwrap(), rep.lower_constant.unwrap());
        assert!(up > 0.0 && low > 0.0);
        // one constant c serves both sides
        assert!(up.max(low) >= 1.0);
        assert!(rep.is_stable(), "{:?}", rep.stability);
        assert!(rep.excluded_times.is_some());
        assert!(rep.rows.iter().any(|r| r.side == Side::Lower));
        assert!(rep.rows.iter().filter(|r| r.side == Side::Lower).all(|r| r.t >= 100.0 / 256.0));
    }

    #[test]
    fn preconditions() {
        let homog = TreeSpec::homogeneous(2, 1.0, 30).unwrap();
        let cfg = SolverConfig::new(20.0, 8, 1.0).unwrap();
        let sweep = Sweep::new(vec![0.5], vec![0.5]).unwrap();
        let p = BoundParams::default();
        assert!(matches!(
            verify_bound(BoundKind::TwoSided, &homog, &cfg, &sweep, &p),
            Err(Error::Precondition(_))
        ));
        let half = TreeSpec::half_line();
        assert!(matches!(
            verify_bound(BoundKind::NoVd, &half, &cfg, &sweep, &p),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            verify_bound(BoundKind::Homogeneous, &half, &cfg, &sweep, &p),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            verify_bound(BoundKind::Poincare, &half, &cfg, &sweep, &p),
            Err(Error::Domain(_))
        ));
        let late = Sweep::new(vec![0.5], vec![2.0]).unwrap();
        assert!(matches!(
            verify_bound(BoundKind::Universal, &half, &cfg, &late, &p),
            Err(Error::InvalidTime { .. })
        ));
    }

    #[test]
    fn shrinking_sweep_never_worsens_margin() {
        let spec = TreeSpec::explicit(vec![0.0, 1.0], vec![1, 2]).unwrap();
        let cfg = SolverConfig::new(14.0, 16, 2.0).unwrap();
        let full = Sweep::default_for(&spec, &cfg, 5).unwrap();
        let part = Sweep::new(full.radii()[..2].to_vec(), full.times()[1..3].to_vec()).unwrap();
        let p = BoundParams::default();
        let a = verify_bound(BoundKind::Universal, &spec, &cfg, &full, &p).unwrap();
        let b = verify_bound(BoundKind::Universal, &spec, &cfg, &part, &p).unwrap();
        assert!(b.worst_margin >= a.worst_margin);
    }

    #[test]
    fn half_line_slope_is_one_half() {
        let (spec, _) = half_line_setup();
        let cfg = SolverConfig::new(40.0, 8, 25.0).unwrap().with_min_time(4.0);
        let kernel = TreeKernel::new(&spec, &cfg, 0).unwrap();
        let s = decay_slope(&kernel, 0.0, 4.0, 25.0, 8).unwrap();
        assert!((s + 0.5).abs() < 1e-4, "{s}");
    }
}
