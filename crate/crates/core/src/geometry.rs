//! Growth constants of radial weights: doubling, global dimension and the
//! Sobolev-type constant `S(δ)`.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::golden_section_min;
use crate::tree::TreeSpec;

/// A nonnegative weight on `[0, ∞)` with exact antiderivatives.
pub trait RadialWeight {
    /// Value under the half-open convention (left-continuous at breakpoints).
    fn value(&self, r: f64) -> f64;
    /// Right limit at `r`.
    fn value_right(&self, r: f64) -> f64;
    /// Jump locations in `(0, r_max]`.
    fn breakpoints(&self, r_max: f64) -> Vec<f64>;
    /// `∫_0^r w`.
    fn mass(&self, r: f64) -> f64;
    /// `∫_r^∞ 1/w`, possibly infinite.
    fn inverse_tail(&self, r: f64) -> f64;
}

impl RadialWeight for TreeSpec {
    fn value(&self, r: f64) -> f64 {
        self.g0_extended(r)
    }

    fn value_right(&self, r: f64) -> f64 {
        self.g0_right(r).unwrap_or_else(|_| self.g0_extended(r))
    }

    fn breakpoints(&self, r_max: f64) -> Vec<f64> {
        self.radii().iter().skip(1).copied().filter(|&r| r <= r_max).collect()
    }

    fn mass(&self, r: f64) -> f64 {
        self.cumulative_mass(r)
    }

    fn inverse_tail(&self, r: f64) -> f64 {
        TreeSpec::inverse_tail(self, r)
    }
}

/// Smooth weight `(1 + s)^(d - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerWeight {
    pub dimension: f64,
}

impl RadialWeight for PowerWeight {
    fn value(&self, r: f64) -> f64 {
        (1.0 + r).powf(self.dimension - 1.0)
    }

    fn value_right(&self, r: f64) -> f64 {
        self.value(r)
    }

    fn breakpoints(&self, _r_max: f64) -> Vec<f64> {
        Vec::new()
    }

    fn mass(&self, r: f64) -> f64 {
        let d = self.dimension;
        ((1.0 + r).powf(d) - 1.0) / d
    }

    fn inverse_tail(&self, r: f64) -> f64 {
        let k = self.dimension - 1.0;
        if k <= 1.0 {
            f64::INFINITY
        } else {
            (1.0 + r).powf(1.0 - k) / (k - 1.0)
        }
    }
}

/// Piecewise-constant weight on cells `(x_i, x_{i+1}]`, continued beyond the
/// last node `e` by `A (1 + r)^(d - 1)`. The reciprocal tail uses its own
/// coefficient, `1/w ≈ B (1 + r)^(1 - d)`, so that weights with a periodic
/// modulation on top of the power law can carry the arithmetic and harmonic
/// averages separately. By default `A = w_last / (1 + e)^(d - 1)`, `B = 1/A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWeight {
    nodes: Vec<f64>,
    cells: Vec<f64>,
    tail_dimension: f64,
    tail_mass_coef: f64,
    tail_inverse_coef: f64,
    mass_prefix: Vec<f64>,
    inverse_suffix: Vec<f64>,
}

impl SampledWeight {
    pub fn new(nodes: Vec<f64>, cells: Vec<f64>, tail_dimension: f64) -> Result<Self> {
        let (e, w) = match (nodes.last(), cells.last()) {
            (Some(&e), Some(&w)) => (e, w),
            _ => return Err(Error::Precondition("empty sampled weight".into())),
        };
        let a = w / (1.0 + e).powf(tail_dimension - 1.0);
        Self::with_tail_coefficients(nodes, cells, tail_dimension, a, 1.0 / a)
    }

    pub fn with_tail_coefficients(
        nodes: Vec<f64>,
        cells: Vec<f64>,
        tail_dimension: f64,
        mass_coef: f64,
        inverse_coef: f64,
    ) -> Result<Self> {
        if nodes.len() < 2 || cells.len() + 1 != nodes.len() {
            return Err(Error::Precondition(format!(
                "{} nodes need {} cell values, got {}",
                nodes.len(),
                nodes.len().saturating_sub(1),
                cells.len()
            )));
        }
        if nodes[0] != 0.0 || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition("nodes must start at 0 and increase".into()));
        }
        if cells.iter().any(|&c| !(c > 0.0)) || !(mass_coef > 0.0) || !(inverse_coef > 0.0) {
            return Err(Error::Precondition("weights must be positive".into()));
        }
        let n = cells.len();
        let mut mass_prefix = alloc::vec![0.0; n + 1];
        for i in 0..n {
            mass_prefix[i + 1] = mass_prefix[i] + cells[i] * (nodes[i + 1] - nodes[i]);
        }
        let mut s = Self {
            nodes,
            cells,
            tail_dimension,
            tail_mass_coef: mass_coef,
            tail_inverse_coef: inverse_coef,
            mass_prefix,
            inverse_suffix: Vec::new(),
        };
        let mut inverse_suffix = alloc::vec![0.0; n + 1];
        inverse_suffix[n] = s.tail_inverse(s.nodes[n]);
        for i in (0..n).rev() {
            inverse_suffix[i] = inverse_suffix[i + 1] + (s.nodes[i + 1] - s.nodes[i]) / s.cells[i];
        }
        s.inverse_suffix = inverse_suffix;
        Ok(s)
    }

    fn end(&self) -> f64 {
        *self.nodes.last().expect("nonempty")
    }

    fn cell(&self, r: f64) -> usize {
        self.nodes.partition_point(|&x| x < r).saturating_sub(1).min(self.cells.len() - 1)
    }

    fn tail_value(&self, r: f64) -> f64 {
        self.tail_mass_coef * (1.0 + r).powf(self.tail_dimension - 1.0)
    }

    fn tail_inverse(&self, r: f64) -> f64 {
        let k = self.tail_dimension - 1.0;
        if k <= 1.0 {
            return f64::INFINITY;
        }
        self.tail_inverse_coef * (1.0 + r).powf(1.0 - k) / (k - 1.0)
    }
}

impl RadialWeight for SampledWeight {
    fn value(&self, r: f64) -> f64 {
        if r > self.end() {
            return self.tail_value(r);
        }
        self.cells[self.cell(r)]
    }

    fn value_right(&self, r: f64) -> f64 {
        if r >= self.end() {
            return self.tail_value(r);
        }
        let i = self.nodes.partition_point(|&x| x <= r).saturating_sub(1);
        self.cells[i.min(self.cells.len() - 1)]
    }

    fn breakpoints(&self, r_max: f64) -> Vec<f64> {
        self.nodes[1..].iter().copied().filter(|&r| r <= r_max).collect()
    }

    fn mass(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let e = self.end();
        if r > e {
            let d = self.tail_dimension;
            return self.mass_prefix[self.cells.len()]
                + self.tail_mass_coef * ((1.0 + r).powf(d) - (1.0 + e).powf(d)) / d;
        }
        let i = self.cell(r);
        self.mass_prefix[i] + self.cells[i] * (r - self.nodes[i])
    }

    fn inverse_tail(&self, r: f64) -> f64 {
        let e = self.end();
        if r >= e {
            return self.tail_inverse(r);
        }
        let r = r.max(0.0);
        let i = self.cell(r);
        self.inverse_suffix[i + 1] + (self.nodes[i + 1] - r) / self.cells[i]
    }
}

/// Factor `((δ-2)^(δ-2) δ^δ / (2(δ-1))^(2(δ-1)))^(1/δ)` relating `S` and `S̃`.
pub fn sobolev_tilde_factor(delta: f64) -> f64 {
    let a = delta - 2.0;
    let pa = if a == 0.0 { 1.0 } else { a.powf(a) };
    let inner = pa * delta.powf(delta) / (2.0 * (delta - 1.0)).powf(2.0 * (delta - 1.0));
    inner.powf(1.0 / delta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevEstimate {
    /// `S(δ)`, zero when the tail integral diverges.
    pub s: f64,
    pub s_tilde: f64,
    pub divergent: bool,
    /// Radius where the supremum was attained (infinite if approached in the limit).
    pub argmax: f64,
}

/// `S(δ)^{-1} = sup_r (∫_0^r w)^{(δ-2)/δ} ∫_r^∞ 1/w`, evaluated on a grid
/// refined at breakpoints, continued geometrically beyond `r_max`, and
/// polished by golden-section search around the best candidate.
pub fn sobolev_constant(weight: &dyn RadialWeight, delta: f64, r_max: f64, n_scan: usize) -> Result<SobolevEstimate> {
    if !(delta > 2.0) {
        return Err(Error::Domain(format!("delta must exceed 2, got {delta}")));
    }
    if !(r_max > 0.0) || n_scan < 2 {
        return Err(Error::Domain("scan range and grid count must be positive".into()));
    }
    let factor = sobolev_tilde_factor(delta);
    if weight.inverse_tail(r_max).is_infinite() {
        return Ok(SobolevEstimate {
            s: 0.0,
            s_tilde: 0.0,
            divergent: true,
            argmax: f64::INFINITY,
        });
    }
    let expo = (delta - 2.0) / delta;
    let f = |r: f64| weight.mass(r).powf(expo) * weight.inverse_tail(r);
    let mut candidates: Vec<f64> = (1..=n_scan).map(|i| r_max * i as f64 / n_scan as f64).collect();
    candidates.extend(weight.breakpoints(r_max));
    let mut far = r_max;
    for _ in 0..40 {
        far *= 2.0;
        candidates.push(far);
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for (i, &r) in candidates.iter().enumerate() {
        let v = f(r);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = if best_i == 0 { 0.0 } else { candidates[best_i - 1] };
    let hi = candidates.get(best_i + 1).copied().unwrap_or(candidates[best_i]);
    let (x, v) = golden_section_min(lo, hi, 1e-12 * hi.max(1.0), |r| -f(r));
    let (argmax, sup) = if -v > best { (x, -v) } else { (candidates[best_i], best) };
    let argmax = if best_i + 1 == candidates.len() { f64::INFINITY } else { argmax };
    let s = 1.0 / sup;
    Ok(SobolevEstimate {
        s,
        s_tilde: factor * s,
        divergent: false,
        argmax,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryReport {
    pub dimension: f64,
    pub delta: f64,
    /// Estimate of the smallest `C_0` with `g(2r) <= C_0 g(r)` on `(0, r_max/2]`.
    pub doubling_constant: f64,
    /// The half-open convention alone gives a different doubling estimate than
    /// the one-sided limits.
    pub doubling_breakpoint_discrepancy: bool,
    pub dim_inf: f64,
    pub dim_sup: f64,
    /// The ratio keeps growing across the scan (non-polynomial growth).
    pub dim_sup_unbounded: bool,
    /// The ratio keeps shrinking across the scan.
    pub dim_inf_vanishing: bool,
    pub sobolev_s: f64,
    pub sobolev_s_tilde: f64,
    pub sobolev_divergent: bool,
    pub scan_range: (f64, f64),
    pub grid_step: f64,
}

impl GeometryReport {
    /// Rows `(quantity, name, value)` in a fixed order.
    pub fn rows(&self) -> Vec<(&'static str, &'static str, f64)> {
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        alloc::vec![
            ("parameter", "d", self.dimension),
            ("parameter", "delta", self.delta),
            ("parameter", "scan_start", self.scan_range.0),
            ("parameter", "scan_end", self.scan_range.1),
            ("doubling", "doubling_constant", self.doubling_constant),
            ("doubling", "breakpoint_discrepancy", flag(self.doubling_breakpoint_discrepancy)),
            ("dimension", "dim_inf", self.dim_inf),
            ("dimension", "dim_sup", self.dim_sup),
            ("dimension", "dim_sup_unbounded", flag(self.dim_sup_unbounded)),
            ("dimension", "dim_inf_vanishing", flag(self.dim_inf_vanishing)),
            ("sobolev", "S", self.sobolev_s),
            ("sobolev", "S_tilde", self.sobolev_s_tilde),
            ("sobolev", "divergent", flag(self.sobolev_divergent)),
        ]
    }

    /// Whether the scan supports a global dimension `d` (finite positive
    /// ratio bounds that neither blow up nor vanish).
    pub fn has_dimension(&self) -> bool {
        self.dim_inf > 0.0 && self.dim_sup.is_finite() && !self.dim_sup_unbounded && !self.dim_inf_vanishing
    }
}

/// Geometry of the weight `g_0` of `spec` on `[0, r_max]`.
pub fn geometry_scan(spec: &TreeSpec, d: f64, delta: f64, r_max: f64, n_scan: usize) -> Result<GeometryReport> {
    if r_max > spec.extent() {
        return Err(Error::HorizonExceeded {
            radius: r_max,
            horizon: spec.extent(),
        });
    }
    scan_weight(spec, d, delta, r_max, n_scan)
}

/// Same scan for an arbitrary weight.
pub fn scan_weight(weight: &dyn RadialWeight, d: f64, delta: f64, r_max: f64, n_scan: usize) -> Result<GeometryReport> {
    if !(d >= 1.0) {
        return Err(Error::Domain(format!("dimension must be at least 1, got {d}")));
    }
    if !(delta > 2.0) {
        return Err(Error::Domain(format!("delta must exceed 2, got {delta}")));
    }
    if n_scan < 100 {
        return Err(Error::Domain(format!("n_scan must be at least 100, got {n_scan}")));
    }
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::Domain(format!("scan radius must be positive and finite, got {r_max}")));
    }
    let step = r_max / n_scan as f64;
    let breaks = weight.breakpoints(r_max);

    // doubling on (0, r_max/2]
    let half = 0.5 * r_max;
    let mut pts: Vec<f64> = (1..=n_scan).map(|i| half * i as f64 / n_scan as f64).collect();
    for &b in &breaks {
        if b <= half {
            pts.push(b);
        }
        if 0.5 * b <= half {
            pts.push(0.5 * b);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut doubling_open = 0.0f64;
    let mut doubling_right = 0.0f64;
    for &r in &pts {
        doubling_open = doubling_open.max(weight.value(2.0 * r) / weight.value(r));
        if r < half {
            doubling_right = doubling_right.max(weight.value_right(2.0 * r) / weight.value_right(r));
        }
    }
    let doubling_constant = doubling_open.max(doubling_right);
    let doubling_breakpoint_discrepancy = doubling_open != doubling_right && doubling_right > 0.0;

    // dimension ratios on [0, r_max]
    let ratio = |g: f64, r: f64| g / (1.0 + r).powf(d - 1.0);
    let mut pts: Vec<f64> = (0..=n_scan).map(|i| step * i as f64).collect();
    pts.extend(breaks.iter().copied());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let (mut inf_lo, mut sup_lo) = (f64::INFINITY, 0.0f64);
    let (mut inf_hi, mut sup_hi) = (f64::INFINITY, 0.0f64);
    for &r in &pts {
        let mut vals = alloc::vec![ratio(weight.value(r), r)];
        if r < r_max {
            vals.push(ratio(weight.value_right(r), r));
        }
        for v in vals {
            if r <= half {
                inf_lo = inf_lo.min(v);
                sup_lo = sup_lo.max(v);
            } else {
                inf_hi = inf_hi.min(v);
                sup_hi = sup_hi.max(v);
            }
        }
    }
    let dim_inf = inf_lo.min(inf_hi);
    let dim_sup = sup_lo.max(sup_hi);
    let dim_sup_unbounded = sup_hi > 2.0 * sup_lo;
    let dim_inf_vanishing = inf_hi < 0.5 * inf_lo;

    let sob = sobolev_constant(weight, delta, r_max, n_scan)?;
    Ok(GeometryReport {
        dimension: d,
        delta,
        doubling_constant,
        doubling_breakpoint_discrepancy,
        dim_inf,
        dim_sup,
        dim_sup_unbounded,
        dim_inf_vanishing,
        sobolev_s: sob.s,
        sobolev_s_tilde: sob.s_tilde,
        sobolev_divergent: sob.divergent,
        scan_range: (0.0, r_max),
        grid_step: step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force ratio scan on a fine uniform grid, independent of the
    /// breakpoint handling.
    fn brute_ratio(spec: &TreeSpec, d: f64, r_max: f64, n: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..=n {
            let r = r_max * i as f64 / n as f64;
            let v = spec.g0(r).unwrap() / (1.0 + r).powf(d - 1.0);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    #[test]
    fn dyadic_d2_dimension_ratios() {
        let spec = TreeSpec::dyadic(2.0, 12).unwrap();
        let rep = geometry_scan(&spec, 2.0, 3.0, 4000.0, 1000).unwrap();
        let (lo, hi) = brute_ratio(&spec, 2.0, 4000.0, 400_000);
        assert!(rep.dim_inf <= lo + 1e-12);
        assert!(rep.dim_sup >= hi - 1e-12);
        assert!((rep.dim_inf - 0.5).abs() < 1e-3, "{}", rep.dim_inf);
        assert!((rep.dim_sup - 1.0).abs() < 1e-12, "{}", rep.dim_sup);
        assert!(rep.has_dimension());
        assert!((rep.doubling_constant - 2.0).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_growth_is_flagged() {
        let spec = TreeSpec::homogeneous(2, 1.0, 40).unwrap();
        let rep = geometry_scan(&spec, 2.0, 3.0, 30.0, 300).unwrap();
        assert!(rep.dim_sup_unbounded);
        assert!(!rep.has_dimension());
        assert!(!rep.sobolev_divergent);
    }

    #[test]
    fn power_weight_sobolev_limit() {
        let rep = scan_weight(&PowerWeight { dimension: 3.0 }, 3.0, 3.0, 100.0, 1000).unwrap();
        assert!((rep.sobolev_s - 3f64.powf(1.0 / 3.0)).abs() < 1e-9, "{}", rep.sobolev_s);
        let factor = sobolev_tilde_factor(3.0);
        assert!((rep.sobolev_s_tilde - factor * rep.sobolev_s).abs() < 1e-15);
    }

    #[test]
    fn tilde_factor_closed_form() {
        // δ = 3: (1 * 27 / 4^4)^(1/3)
        assert!((sobolev_tilde_factor(3.0) - (27.0f64 / 256.0).powf(1.0 / 3.0)).abs() < 1e-15);
        // δ = 4: (4 * 256 / 6^6)^(1/4)
        assert!((sobolev_tilde_factor(4.0) - (1024.0f64 / 46656.0).powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn bounded_weight_diverges() {
        let spec = TreeSpec::explicit(alloc::vec![0.0, 1.0], alloc::vec![1, 2]).unwrap();
        let rep = geometry_scan(&spec, 1.0, 3.0, 10.0, 100).unwrap();
        assert!(rep.sobolev_divergent);
        assert_eq!(rep.sobolev_s, 0.0);
    }

    #[test]
    fn parameter_errors() {
        let spec = TreeSpec::half_line();
        assert!(matches!(geometry_scan(&spec, 1.0, 2.0, 10.0, 100), Err(Error::Domain(_))));
        assert!(matches!(geometry_scan(&spec, 1.0, 3.0, 10.0, 50), Err(Error::Domain(_))));
        let d = TreeSpec::dyadic(2.0, 3).unwrap();
        assert!(matches!(geometry_scan(&d, 2.0, 3.0, 100.0, 100), Err(Error::HorizonExceeded { .. })));
    }

    #[test]
    fn sobolev_against_brute_force() {
        // fine-grid supremum without breakpoints or refinement
        let spec = TreeSpec::dyadic(3.0, 20).unwrap();
        let est = sobolev_constant(&spec, 3.0, 500.0, 2000).unwrap();
        let mut sup = 0.0f64;
        for i in 1..=400_000 {
            let r = 1e-3 * 1e9f64.powf(i as f64 / 400_000.0);
            let v = spec.cumulative_mass(r).powf(1.0 / 3.0) * (spec.cumulative_inverse(f64::INFINITY) - spec.cumulative_inverse(r));
            sup = sup.max(v);
        }
        assert!(1.0 / est.s >= sup * (1.0 - 1e-9));
        assert!(1.0 / est.s <= sup * (1.0 + 1e-3));
    }

    #[test]
    fn sampled_weight_consistency() {
        let nodes: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let cells: Vec<f64> = (0..10).map(|i| (1.0 + i as f64 + 0.5).powi(2)).collect();
        let w = SampledWeight::new(nodes, cells, 3.0).unwrap();
        assert_eq!(w.value(0.5), w.value(1.0));
        assert!(w.value_right(1.0) > w.value(1.0));
        let total = w.inverse_tail(0.0);
        assert!((w.inverse_tail(3.0) - (total - (1.0 / 2.25 + 1.0 / 6.25 + 1.0 / 12.25))).abs() < 1e-12);
        assert!((w.mass(2.0) - (2.25 + 6.25)).abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn refinement_is_monotone(n in 100usize..400) {
            let spec = TreeSpec::dyadic(2.0, 10).unwrap();
            let a = geometry_scan(&spec, 2.0, 3.0, 1000.0, n).unwrap();
            let b = geometry_scan(&spec, 2.0, 3.0, 1000.0, 2 * n).unwrap();
            proptest::prop_assert!(b.doubling_constant >= a.doubling_constant);
            proptest::prop_assert!(b.dim_sup >= a.dim_sup);
            proptest::prop_assert!(b.dim_inf <= a.dim_inf);
        }
    }
}
