//! Functional inequalities of the weighted half-line `([0, ∞), g_0 dr)`:
//! volume doubling, Poincaré on balls, Nash and logarithmic Sobolev,
//! evaluated over a fixed family of test functions.
//!
//! Integrals are split at every vertex radius and every kink of the test
//! function, so each panel integrates a smooth function against a constant
//! weight; Gauss-Legendre panels then make the quadrature exact up to
//! rounding for the polynomial members.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bounds::{BoundKind, BoundReport, SampleRow, Side, BASE_TOLERANCE};
use crate::error::{Error, Result};
use crate::geometry::{geometry_scan, sobolev_constant};
use crate::special::gauss_legendre;
use crate::tree::TreeSpec;

/// Bumped whenever a member of [`test_family`] or [`ball_family`] changes.
pub const TEST_FAMILY_VERSION: u32 = 1;
/// Widest Gauss-Legendre panel on the coarse level.
pub const PANEL_WIDTH: f64 = 0.125;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    /// `slope * s`.
    Linear { slope: f64 },
    /// `(s - center)^2`.
    Quadratic { center: f64 },
    /// `sin(2π s / period)`.
    Sine { period: f64 },
    /// `cos(2π s / period)`.
    Cosine { period: f64 },
    /// `max(0, 1 - |s - center| / half_width)`.
    Hat { center: f64, half_width: f64 },
    /// `cos^2(π (s - center) / (2 half_width))` on `|s - center| <= half_width`.
    CosineBump { center: f64, half_width: f64 },
    /// `exp(-(s - center)^2 / (2 width^2))`.
    Gaussian { center: f64, width: f64 },
}

impl TestFunction {
    pub fn value(&self, s: f64) -> f64 {
        use core::f64::consts::PI;
        match *self {
            TestFunction::Linear { slope } => slope * s,
            TestFunction::Quadratic { center } => (s - center) * (s - center),
            TestFunction::Sine { period } => (2.0 * PI * s / period).sin(),
            TestFunction::Cosine { period } => (2.0 * PI * s / period).cos(),
            TestFunction::Hat { center, half_width } => (1.0 - (s - center).abs() / half_width).max(0.0),
            TestFunction::CosineBump { center, half_width } => {
                let u = (s - center) / half_width;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    let c = (0.5 * PI * u).cos();
                    c * c
                }
            }
            TestFunction::Gaussian { center, width } => {
                let u = (s - center) / width;
                (-0.5 * u * u).exp()
            }
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        use core::f64::consts::PI;
        match *self {
            TestFunction::Linear { slope } => slope,
            TestFunction::Quadratic { center } => 2.0 * (s - center),
            TestFunction::Sine { period } => 2.0 * PI / period * (2.0 * PI * s / period).cos(),
            TestFunction::Cosine { period } => -2.0 * PI / period * (2.0 * PI * s / period).sin(),
            TestFunction::Hat { center, half_width } => {
                let d = s - center;
                if d.abs() >= half_width {
                    0.0
                } else {
                    -d.signum() / half_width
                }
            }
            TestFunction::CosineBump { center, half_width } => {
                let u = (s - center) / half_width;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    -0.5 * PI / half_width * (PI * u).sin()
                }
            }
            TestFunction::Gaussian { center, width } => {
                let u = (s - center) / width;
                -u / width * (-0.5 * u * u).exp()
            }
        }
    }

    /// Points where the derivative jumps.
    pub fn kinks(&self) -> Vec<f64> {
        match *self {
            TestFunction::Hat { center, half_width } => alloc::vec![center - half_width, center, center + half_width],
            TestFunction::CosineBump { center, half_width } => alloc::vec![center - half_width, center + half_width],
            _ => Vec::new(),
        }
    }

    /// Interval outside which the function vanishes (to double precision for
    /// the Gaussian), or `None` for the non-decaying members.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            TestFunction::Hat { center, half_width } | TestFunction::CosineBump { center, half_width } => {
                Some(((center - half_width).max(0.0), center + half_width))
            }
            TestFunction::Gaussian { center, width } => Some(((center - 12.0 * width).max(0.0), center + 12.0 * width)),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            TestFunction::Linear { slope } => format!("linear({slope})"),
            TestFunction::Quadratic { center } => format!("quadratic({center})"),
            TestFunction::Sine { period } => format!("sine({period})"),
            TestFunction::Cosine { period } => format!("cosine({period})"),
            TestFunction::Hat { center, half_width } => format!("hat({center},{half_width})"),
            TestFunction::CosineBump { center, half_width } => format!("cosine_bump({center},{half_width})"),
            TestFunction::Gaussian { center, width } => format!("gaussian({center},{width})"),
        }
    }
}

/// Versioned test functions scaled to the radius `scale`; decaying members
/// have support inside `[0, scale]`.
pub fn test_family(scale: f64) -> Result<Vec<TestFunction>> {
    if !(scale >= 1.0) || !scale.is_finite() {
        return Err(Error::Domain(format!("family scale must be finite and at least 1, got {scale}")));
    }
    let mut out = alloc::vec![
        TestFunction::Linear { slope: 1.0 },
        TestFunction::Quadratic { center: 0.0 },
        TestFunction::Quadratic { center: 0.5 * scale },
        TestFunction::Sine { period: scale },
        TestFunction::Cosine { period: 0.5 * scale },
        TestFunction::Cosine { period: 2.0 },
    ];
    for frac in [0.0, 0.25, 0.5] {
        let c = frac * scale;
        out.push(TestFunction::Hat {
            center: c,
            half_width: 0.25 * scale,
        });
        out.push(TestFunction::CosineBump {
            center: c,
            half_width: 0.25 * scale,
        });
    }
    for width in [0.25, 1.0] {
        let w = width.min(scale / 24.0);
        out.push(TestFunction::Gaussian { center: 0.0, width: w });
        out.push(TestFunction::Gaussian {
            center: 0.5 * scale,
            width: w,
        });
    }
    Ok(out)
}

/// Balls `(z, r)` with `z + r <= r_max`: centers at the origin, at vertices
/// and at edge midpoints, radii from 1/4 up by doubling.
pub fn ball_family(spec: &TreeSpec, r_max: f64) -> Result<Vec<(f64, f64)>> {
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::Domain(format!("ball family radius must be positive and finite, got {r_max}")));
    }
    let mut centers = alloc::vec![0.0];
    let radii = spec.radii();
    for (l, &a) in radii.iter().enumerate() {
        let b = radii.get(l + 1).copied().unwrap_or(r_max);
        let b = b.min(r_max);
        if a >= r_max {
            break;
        }
        centers.push(a);
        centers.push(0.5 * (a + b));
    }
    centers.sort_by(f64::total_cmp);
    centers.dedup();
    let mut out = Vec::new();
    for &z in &centers {
        let mut r = 0.25;
        while z + r <= r_max {
            out.push((z, r));
            r *= 2.0;
        }
    }
    Ok(out)
}

/// Everything a functional check runs over.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalFamily {
    pub functions: Vec<TestFunction>,
    pub balls: Vec<(f64, f64)>,
    /// Values of `a` in the logarithmic Sobolev inequality.
    pub log_sobolev_a: Vec<f64>,
    /// `δ` for the Nash inequality.
    pub delta: f64,
}

impl FunctionalFamily {
    /// Versioned default on `[0, r_max]`.
    pub fn standard(spec: &TreeSpec, r_max: f64) -> Result<Self> {
        Ok(Self {
            functions: test_family(r_max)?,
            balls: ball_family(spec, r_max)?,
            log_sobolev_a: alloc::vec![0.5, 1.0, 2.0],
            delta: 3.0,
        })
    }
}

/// `∫_a^b F(s) g_0(s) ds` with panels split at vertices and `kinks`.
fn weighted_integral<F: FnMut(f64) -> f64>(spec: &TreeSpec, a: f64, b: f64, kinks: &[f64], panel: f64, mut f: F) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let mut cuts: Vec<f64> = spec
        .radii()
        .iter()
        .chain(kinks)
        .copied()
        .filter(|&c| c > a && c < b)
        .collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let g = spec.g0_extended(0.5 * (lo + hi));
        let n = ((hi - lo) / panel).ceil().max(1.0) as usize;
        let step = (hi - lo) / n as f64;
        for i in 0..n {
            let x0 = lo + step * i as f64;
            let x1 = if i + 1 == n { hi } else { x0 + step };
            acc += g * gauss_legendre(x0, x1, &mut f);
        }
    }
    acc
}

/// `(∫|f - ξ|^2 g_0, 4 r^2 ∫|f'|^2 g_0)` on `B(z, r)` with the optimal `ξ`.
pub fn poincare_sides(spec: &TreeSpec, f: &TestFunction, z: f64, r: f64, panel: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("degenerate ball with radius {r}")));
    }
    let (a, b) = ((z - r).max(0.0), z + r);
    let vol = spec.ball_volume(z, r)?;
    let kinks = f.kinks();
    let xi = weighted_integral(spec, a, b, &kinks, panel, |s| f.value(s)) / vol;
    let lhs = weighted_integral(spec, a, b, &kinks, panel, |s| {
        let d = f.value(s) - xi;
        d * d
    });
    let energy = weighted_integral(spec, a, b, &kinks, panel, |s| {
        let d = f.derivative(s);
        d * d
    });
    Ok((lhs, 4.0 * r * r * energy))
}

/// `(V(z, r), V(z, r/2))`.
pub fn doubling_sides(spec: &TreeSpec, z: f64, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("degenerate ball with radius {r}")));
    }
    Ok((spec.ball_volume(z, r)?, spec.ball_volume(z, 0.5 * r)?))
}

/// `(∫f'^2 g_0)^{1/2} (∫|f| g_0)^{2/δ}` and `S̃^{1/2} (∫f^2 g_0)^{(δ+2)/(2δ)}`.
pub fn nash_sides(spec: &TreeSpec, f: &TestFunction, delta: f64, s_tilde: f64, panel: f64) -> Result<(f64, f64)> {
    let (a, b) = f
        .support()
        .ok_or_else(|| Error::Domain(format!("{} is not integrable", f.label())))?;
    let kinks = f.kinks();
    let energy = weighted_integral(spec, a, b, &kinks, panel, |s| f.derivative(s).powi(2));
    let l1 = weighted_integral(spec, a, b, &kinks, panel, |s| f.value(s).abs());
    let l2 = weighted_integral(spec, a, b, &kinks, panel, |s| f.value(s).powi(2));
    Ok((
        energy.sqrt() * l1.powf(2.0 / delta),
        s_tilde.sqrt() * l2.powf((delta + 2.0) / (2.0 * delta)),
    ))
}

/// `a^2/π ∫|u'|^2` and `∫|u|^2 ln(|u|^2/‖u‖^2) + (1 + ln(a/2)) ‖u‖^2`, all
/// integrals against `g_0`.
pub fn log_sobolev_sides(spec: &TreeSpec, u: &TestFunction, a: f64, panel: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("a must be positive, got {a}")));
    }
    let (lo, hi) = u
        .support()
        .ok_or_else(|| Error::Domain(format!("{} is not square integrable", u.label())))?;
    let kinks = u.kinks();
    let energy = weighted_integral(spec, lo, hi, &kinks, panel, |s| u.derivative(s).powi(2));
    let norm = weighted_integral(spec, lo, hi, &kinks, panel, |s| u.value(s).powi(2));
    let entropy = weighted_integral(spec, lo, hi, &kinks, panel, |s| {
        let v = u.value(s).powi(2);
        if v > 0.0 {
            v * (v / norm).ln()
        } else {
            0.0
        }
    });
    Ok((
        a * a / core::f64::consts::PI * energy,
        entropy + (1.0 + (0.5 * a).ln()) * norm,
    ))
}

fn margin_le(small: f64, big: f64) -> f64 {
    let scale = small.abs().max(big.abs());
    if scale == 0.0 {
        0.0
    } else {
        (big - small) / scale
    }
}

/// Evaluates `kind` over every member of `family` with panels of width
/// [`PANEL_WIDTH`] and half that; the tolerance covers the difference.
///
/// Rows record `r` as the ball radius (or the parameter `a` for the
/// logarithmic Sobolev inequality) and `t` as the ball center or member
/// index; `lhs <= rhs` is the checked direction.
pub fn functional_inequality_check(kind: BoundKind, spec: &TreeSpec, family: &FunctionalFamily) -> Result<BoundReport> {
    if !kind.is_functional() {
        return Err(Error::Domain(format!("{} is not a functional inequality", kind.name())));
    }
    let needs_balls = matches!(kind, BoundKind::VolumeDoubling | BoundKind::Poincare);
    if needs_balls && family.balls.is_empty() {
        return Err(Error::Domain("ball family is empty".into()));
    }
    if kind != BoundKind::VolumeDoubling && family.functions.is_empty() {
        return Err(Error::Domain("test-function family is empty".into()));
    }
    let mut rows = Vec::new();
    let mut delta_q = 0.0f64;
    let mut constant = None;
    let mut explicit = None;
    let mut notes = Vec::new();
    let mut push = |rows: &mut Vec<SampleRow>, r: f64, t: f64, coarse: (f64, f64), fine: (f64, f64)| {
        let change = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        delta_q = delta_q.max(change(coarse.0, fine.0)).max(change(coarse.1, fine.1));
        rows.push(SampleRow {
            r,
            t,
            side: Side::Upper,
            lhs: fine.0,
            rhs: fine.1,
            margin: margin_le(fine.0, fine.1),
        });
    };
    match kind {
        BoundKind::VolumeDoubling => {
            let r_max = family.balls.iter().map(|&(z, r)| z + r).fold(0.0, f64::max);
            let c0 = geometry_scan(spec, 1.0, 3.0, r_max, 1000)?.doubling_constant;
            let mut worst = 0.0f64;
            for &(z, r) in &family.balls {
                let (big, small) = doubling_sides(spec, z, r)?;
                worst = worst.max(big / small);
                push(&mut rows, r, z, (big, 2.0 * c0 * small), (big, 2.0 * c0 * small));
            }
            constant = Some(worst);
            explicit = Some(2.0 * c0);
            notes.push(format!("C0 = {c0} from the doubling scan on [0, {r_max}]"));
        }
        BoundKind::Poincare => {
            let mut worst = 0.0f64;
            let mut constant_on_ball = 0usize;
            for f in &family.functions {
                for &(z, r) in &family.balls {
                    let c = poincare_sides(spec, f, z, r, PANEL_WIDTH)?;
                    let fi = poincare_sides(spec, f, z, r, 0.5 * PANEL_WIDTH)?;
                    // f' = 0 on the ball: f is constant there and both sides vanish
                    if c.1 == 0.0 && fi.1 == 0.0 {
                        constant_on_ball += 1;
                        continue;
                    }
                    worst = worst.max(fi.0 / fi.1);
                    push(&mut rows, r, z, c, fi);
                }
            }
            constant = Some(4.0 * worst);
            explicit = Some(4.0);
            notes.push(format!("{constant_on_ball} pairs skipped: function constant on the ball"));
        }
        BoundKind::Nash => {
            let r_max = if spec.extent().is_finite() {
                spec.extent()
            } else {
                family
                    .functions
                    .iter()
                    .filter_map(|f| f.support())
                    .map(|s| s.1)
                    .fold(1.0, f64::max)
            };
            let sob = sobolev_constant(spec, family.delta, r_max, 2000)?;
            if sob.divergent || !(sob.s_tilde > 0.0) {
                return Err(Error::Precondition(format!(
                    "S(delta) is not finite and positive for delta = {}",
                    family.delta
                )));
            }
            explicit = Some(sob.s_tilde);
            let mut best = f64::INFINITY;
            for (i, f) in family.functions.iter().enumerate() {
                if f.support().is_none() {
                    continue;
                }
                let c = nash_sides(spec, f, family.delta, sob.s_tilde, PANEL_WIDTH)?;
                let fi = nash_sides(spec, f, family.delta, sob.s_tilde, 0.5 * PANEL_WIDTH)?;
                best = best.min(fi.0 / fi.1);
                // rhs <= lhs is the checked direction
                push(&mut rows, family.delta, i as f64, (c.1, c.0), (fi.1, fi.0));
            }
            constant = Some(best * best * sob.s_tilde);
            notes.push(format!("S_tilde({}) = {}", family.delta, sob.s_tilde));
        }
        BoundKind::LogSobolev => {
            for (i, u) in family.functions.iter().enumerate() {
                if u.support().is_none() {
                    continue;
                }
                for &a in &family.log_sobolev_a {
                    let c = log_sobolev_sides(spec, u, a, PANEL_WIDTH)?;
                    let fi = log_sobolev_sides(spec, u, a, 0.5 * PANEL_WIDTH)?;
                    push(&mut rows, a, i as f64, (c.1, c.0), (fi.1, fi.0));
                }
            }
        }
        _ => unreachable!("checked above"),
    }
    if rows.is_empty() {
        return Err(Error::Domain(format!("no family member applies to {}", kind.name())));
    }
    let tolerance = BASE_TOLERANCE.max(delta_q);
    let digest = format!(
        "family=v{TEST_FAMILY_VERSION};functions={};balls={};panel={}",
        family.functions.len(),
        family.balls.len(),
        PANEL_WIDTH
    );
    let mut report = BoundReport::assemble(kind, rows, tolerance, digest);
    report.empirical_constant = constant;
    report.explicit_constant = explicit;
    report.notes = notes;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn trees() -> Vec<TreeSpec> {
        vec![
            TreeSpec::half_line(),
            TreeSpec::explicit(vec![0.0, 1.0], vec![1, 2]).unwrap(),
            TreeSpec::explicit(vec![0.0, 1.0, 2.0], vec![1, 2, 3]).unwrap(),
            TreeSpec::dyadic(2.0, 6).unwrap(),
            TreeSpec::dyadic(3.0, 8).unwrap(),
            TreeSpec::homogeneous(2, 1.0, 20).unwrap(),
        ]
    }

    #[test]
    fn derivatives_match_differences() {
        for f in test_family(8.0).unwrap() {
            for &s in &[0.3, 1.7, 2.9, 4.4, 7.1] {
                if f.kinks().iter().any(|k| (k - s).abs() < 1e-3) {
                    continue;
                }
                let h = 1e-6;
                let fd = (f.value(s + h) - f.value(s - h)) / (2.0 * h);
                assert!((fd - f.derivative(s)).abs() < 1e-6, "{} at {s}", f.label());
            }
        }
    }

    #[test]
    fn family_is_versioned_and_fixed() {
        assert_eq!(TEST_FAMILY_VERSION, 1);
        let fam = test_family(8.0).unwrap();
        assert_eq!(fam.len(), 16);
        assert_eq!(fam[6], TestFunction::Hat { center: 0.0, half_width: 2.0 });
        for f in &fam {
            if let Some((a, b)) = f.support() {
                assert!(a >= 0.0 && b <= 8.0 + 1e-12, "{}", f.label());
            }
        }
        assert!(test_family(0.5).is_err());
    }

    #[test]
    fn poincare_linear_ratio_is_one_twelfth() {
        let spec = TreeSpec::half_line();
        let f = TestFunction::Linear { slope: 1.0 };
        for &(z, r) in &[(5.0, 2.0), (3.0, 0.5), (10.0, 7.0)] {
            let (lhs, rhs) = poincare_sides(&spec, &f, z, r, PANEL_WIDTH).unwrap();
            assert!((lhs - 2.0 * r * r * r / 3.0).abs() < 1e-12 * rhs);
            assert!((rhs - 8.0 * r * r * r).abs() < 1e-12 * rhs);
            assert!((lhs / rhs - 1.0 / 12.0).abs() < 1e-12);
        }
        assert!(poincare_sides(&spec, &f, 1.0, 0.0, PANEL_WIDTH).is_err());
    }

    #[test]
    fn volume_doubling_within_twice_c0() {
        let spec = TreeSpec::dyadic(2.0, 8).unwrap();
        let fam = FunctionalFamily::standard(&spec, 100.0).unwrap();
        let rep = functional_inequality_check(BoundKind::VolumeDoubling, &spec, &fam).unwrap();
        assert!(!rep.violated);
        assert!(rep.empirical_constant.unwrap() <= rep.explicit_constant.unwrap());
        assert!((rep.explicit_constant.unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn half_line_doubling_saturates() {
        let spec = TreeSpec::half_line();
        let fam = FunctionalFamily::standard(&spec, 16.0).unwrap();
        let rep = functional_inequality_check(BoundKind::VolumeDoubling, &spec, &fam).unwrap();
        assert!(!rep.violated);
        assert_eq!(rep.worst_margin, 0.0);
    }

    #[test]
    fn log_sobolev_gaussian_on_half_line() {
        let spec = TreeSpec::half_line();
        let fam = FunctionalFamily {
            functions: vec![TestFunction::Gaussian { center: 0.0, width: 1.0 }],
            balls: vec![],
            log_sobolev_a: vec![0.5, 1.0, 2.0],
            delta: 3.0,
        };
        let rep = functional_inequality_check(BoundKind::LogSobolev, &spec, &fam).unwrap();
        assert_eq!(rep.samples, 3);
        assert!(rep.worst_margin > 0.0, "{}", rep.worst_margin);
    }

    #[test]
    fn log_sobolev_equality_for_matched_gaussian() {
        // the Gaussian of width a/√π is an optimizer
        let spec = TreeSpec::half_line();
        let a = 1.3;
        let u = TestFunction::Gaussian {
            center: 0.0,
            width: a / core::f64::consts::PI.sqrt(),
        };
        let (lhs, rhs) = log_sobolev_sides(&spec, &u, a, 0.01).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs(), "{lhs} {rhs}");
    }

    #[test]
    fn all_checks_hold_on_test_trees() {
        for spec in trees() {
            let r_max = if spec.extent().is_finite() { spec.extent().min(24.0) } else { 24.0 };
            let fam = FunctionalFamily::standard(&spec, r_max).unwrap();
            for kind in [BoundKind::VolumeDoubling, BoundKind::Poincare, BoundKind::LogSobolev] {
                let rep = functional_inequality_check(kind, &spec, &fam).unwrap();
                assert!(!rep.violated, "{} {:?}", kind.name(), spec.radii());
                assert!(rep.worst_margin >= 0.0);
            }
        }
    }

    #[test]
    fn poincare_skips_functions_constant_on_the_ball() {
        let spec = TreeSpec::half_line();
        let fam = FunctionalFamily {
            functions: vec![TestFunction::Hat { center: 0.0, half_width: 2.0 }],
            balls: vec![(1.0, 0.5), (10.0, 1.0)],
            log_sobolev_a: vec![],
            delta: 3.0,
        };
        let rep = functional_inequality_check(BoundKind::Poincare, &spec, &fam).unwrap();
        assert_eq!(rep.samples, 1);
        assert!(rep.worst_margin > 0.0);
        assert_eq!(rep.notes[0], "1 pairs skipped: function constant on the ball");
    }

    #[test]
    fn nash_needs_finite_sobolev_constant() {
        let half = TreeSpec::half_line();
        let fam = FunctionalFamily::standard(&half, 10.0).unwrap();
        assert!(matches!(
            functional_inequality_check(BoundKind::Nash, &half, &fam),
            Err(Error::Precondition(_))
        ));
        let spec = TreeSpec::dyadic(3.0, 8).unwrap();
        let fam = FunctionalFamily::standard(&spec, spec.extent()).unwrap();
        let rep = functional_inequality_check(BoundKind::Nash, &spec, &fam).unwrap();
        assert!(!rep.violated);
        assert!(rep.worst_margin > 0.0);
        assert!(rep.empirical_constant.unwrap() >= rep.explicit_constant.unwrap());
    }

    #[test]
    fn rejects_kernel_kinds_and_empty_families() {
        let spec = TreeSpec::half_line();
        let empty = FunctionalFamily {
            functions: vec![],
            balls: vec![],
            log_sobolev_a: vec![1.0],
            delta: 3.0,
        };
        assert!(functional_inequality_check(BoundKind::Universal, &spec, &empty).is_err());
        assert!(functional_inequality_check(BoundKind::Poincare, &spec, &empty).is_err());
        assert!(functional_inequality_check(BoundKind::LogSobolev, &spec, &empty).is_err());
    }
}
