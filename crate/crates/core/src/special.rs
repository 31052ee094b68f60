//! Special functions and small quadrature helpers.

// reference values keep every published digit
#![allow(clippy::excessive_precision)]

#[allow(unused_imports)]
use num_traits::Float;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `e^x E_2(x)` for `x > 1` by the continued fraction for `E_n`.
fn scaled_e2_fraction(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 2.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let a = -((i * (i + 1)) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// `E_2(x) = e^{-x} - x E_1(x)` for `x > 0`, without cancellation for
/// large `x`.
pub fn exp_integral_e2(x: f64) -> f64 {
    assert!(x > 0.0, "E_2 is only defined for positive arguments");
    if x <= 1.0 {
        (-x).exp() - x * exp_integral_e1(x)
    } else {
        scaled_e2_fraction(x) * (-x).exp()
    }
}

/// Exponential integral `E_1(x) = ∫_x^∞ e^{-s}/s ds` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E_1 is only defined for positive arguments");
    if x <= 1.0 {
        // power series, alternating but well conditioned on (0, 1]
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            let kf = k as f64;
            term *= -x / kf;
            let add = term / kf;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        // modified Lentz on the continued fraction
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Euler Beta function `B(a, b)` for positive arguments.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Eight-point Gauss–Legendre rule on `[-1, 1]` (exact through degree 15).
pub const GAUSS_LEGENDRE_8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// Gauss–Legendre integral of `f` over `[a, b]`.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GAUSS_LEGENDRE_8
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
/// Returns `(argmin, min)`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(
    mut a: f64,
    mut b: f64,
    tol: f64,
    mut f: F,
) -> (f64, f64) {
    let inv_phi = 0.618_033_988_749_894_9;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    let mut best = (x, fx);
    for (p, v) in [(c, fc), (d, fd)] {
        if v < best.1 {
            best = (p, v);
        }
    }
    best
}

/// Minimizes `f` over `[lo, hi]` on a logarithmic scale: coarse scan followed by
/// golden-section refinement around the best scan point.
pub fn log_scan_min<F: FnMut(f64) -> f64>(lo: f64, hi: f64, n: usize, mut f: F) -> (f64, f64) {
    let (llo, lhi) = (lo.ln(), hi.ln());
    let step = (lhi - llo) / (n - 1) as f64;
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let v = f((llo + step * i as f64).exp());
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let a = llo + step * best_i.saturating_sub(1) as f64;
    let b = llo + step * (best_i + 1).min(n - 1) as f64;
    let (x, v) = golden_section_min(a, b, 1e-10, |s| f(s.exp()));
    if v < best {
        (x.exp(), v)
    } else {
        ((llo + step * best_i as f64).exp(), best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1_by_quadrature(x: f64) -> f64 {
        // s = x + u/(1-u) maps (0,1) onto (x, inf); composite Gauss–Legendre
        let n = 4000;
        let mut acc = 0.0;
        for i in 0..n {
            let a = i as f64 / n as f64;
            let b = (i + 1) as f64 / n as f64;
            acc += gauss_legendre(a, b, |u| {
                let s = x + u / (1.0 - u);
                (-s).exp() / s / ((1.0 - u) * (1.0 - u))
            });
        }
        acc
    }

    #[test]
    fn e2_reference_values() {
        // mpmath expint(2, x)
        for &(x, want) in &[
            (1e-6, 0.999_985_761_704_606_9),
            (1.0, 0.148_495_506_775_922_05),
            (50.0, 3.711_783_318_868_827_4e-24),
            (700.0, 1.404_518_012_154_039_7e-307),
        ] {
            let got = exp_integral_e2(x);
            assert!((got - want).abs() < 1e-13 * want, "{x}: {got} vs {want}");
        }
    }

    #[test]
    fn e1_matches_quadrature() {
        for &x in &[0.5, 1.0, 1.5, 3.0, 10.0, 40.0] {
            let a = exp_integral_e1(x);
            let b = e1_by_quadrature(x);
            assert!(((a - b) / b).abs() < 1e-10, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn e1_reference_values() {
        // 30-digit reference values
        let table = [
            (1e-6, 13.238_295_893_062_491),
            (0.01, 4.037_929_576_538_114),
            (0.5, 0.559_773_594_776_160_8),
            (1.0, 0.219_383_934_395_520_27),
            (1.5, 0.100_019_582_406_632_65),
            (3.0, 0.013_048_381_094_197_037),
            (10.0, 4.156_968_929_685_324e-6),
            (40.0, 1.036_773_261_451_657e-19),
        ];
        for (x, v) in table {
            let got = exp_integral_e1(x);
            assert!(((got - v) / v).abs() < 1e-13, "x={x}: {got} vs {v}");
        }
    }

    #[test]
    fn beta_identities() {
        assert!((beta(1.0, 1.0) - 1.0).abs() < 1e-14);
        assert!((beta(0.5, 0.5) - core::f64::consts::PI).abs() < 1e-12);
        assert!((beta(2.0, 3.0) - 1.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, v) = golden_section_min(-3.0, 5.0, 1e-10, |x| (x - 1.25) * (x - 1.25) + 2.0);
        assert!((x - 1.25).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-14);
    }
}
