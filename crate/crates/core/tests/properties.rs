//! Invariants over randomly generated trees, points and potentials.

use proptest::prelude::*;
use treeheat_core::bounds::Sweep;
use treeheat_core::schrodinger::{m_constant, riesz_crosscheck};
use treeheat_core::{negative_moments, PointAddress, PotentialSpec, SolverConfig, TreeKernel, TreeSpec};

/// Explicit tree with edge lengths on the 1/8 grid.
fn small_tree() -> impl Strategy<Value = TreeSpec> {
    (prop::collection::vec(4u32..=12, 2..=3), prop::collection::vec(2u32..=3, 2..=3)).prop_map(|(lens, bs)| {
        let n = lens.len().min(bs.len());
        let mut radii = vec![0.0];
        for l in &lens[..n - 1] {
            radii.push(radii.last().unwrap() + *l as f64 / 8.0);
        }
        let mut branchings = vec![1];
        branchings.extend_from_slice(&bs[1..n]);
        TreeSpec::explicit(radii, branchings).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kernel_is_symmetric_and_nonnegative(
        spec in small_tree(),
        rx in 0.0f64..2.5,
        ry in 0.0f64..2.5,
        t in 0.05f64..1.0,
    ) {
        let cfg = SolverConfig::new(9.0, 16, 1.0).unwrap();
        let kernel = TreeKernel::full(&spec, &cfg).unwrap();
        let x = PointAddress::along_branch(&spec, rx, 1).unwrap();
        let y = PointAddress::along_branch(&spec, ry, 2).unwrap();
        let kxy = kernel.evaluate(&x, &y, t).unwrap().value;
        let kyx = kernel.evaluate(&y, &x, t).unwrap().value;
        let scale = kernel.evaluate(&x, &x, t).unwrap().value.max(kernel.evaluate(&y, &y, t).unwrap().value);
        prop_assert!(kxy >= -1e-10 * scale, "{kxy}");
        prop_assert!((kxy - kyx).abs() <= 1e-10 * scale, "{kxy} {kyx}");
    }

    #[test]
    fn diagonal_obeys_universal_bound(spec in small_tree(), r in 0.0f64..2.5, t in 0.02f64..1.0) {
        let cfg = SolverConfig::new(9.0, 32, 1.0).unwrap();
        let kernel = TreeKernel::new(&spec, &cfg, spec.generation_at(r)).unwrap();
        let k = kernel.radial_diagonal(r, t).unwrap();
        prop_assert!(k > 0.0);
        prop_assert!(k * (std::f64::consts::PI * t).sqrt() <= 1.0 + 1e-3, "{}", k * (std::f64::consts::PI * t).sqrt());
    }

    #[test]
    fn moments_grow_with_coupling(
        v0 in 0.5f64..4.0,
        p in 2.0f64..3.0,
        factor in 1.0f64..3.0,
        gamma in prop::sample::select(vec![0.0, 0.5, 1.0, 1.5]),
        dyadic in any::<bool>(),
    ) {
        let spec = if dyadic { TreeSpec::dyadic(2.0, 6).unwrap() } else { TreeSpec::half_line() };
        let cfg = SolverConfig::new(20.0, 16, 1.0).unwrap();
        let weak = PotentialSpec::radial_power(v0, p).unwrap();
        let strong = weak.scaled(factor).unwrap();
        let (mw, sw) = negative_moments(&spec, &weak, gamma, &cfg).unwrap();
        let (ms, ss) = negative_moments(&spec, &strong, gamma, &cfg).unwrap();
        prop_assert!(ms.inclusive >= mw.inclusive * (1.0 - 1e-12));
        prop_assert!(ss.count() >= sw.count());
        prop_assert!(sw.eigenvalues.iter().all(|e| e.0 < 0.0));
    }

    #[test]
    fn riesz_identity_on_arbitrary_lists(
        eig in prop::collection::vec(-50.0f64..5.0, 0..40),
        gamma in 0.1f64..3.0,
    ) {
        prop_assert!(riesz_crosscheck(&eig, gamma).unwrap() <= 1e-9);
    }
}

proptest! {
    #[test]
    fn log_times_are_increasing_with_exact_ends(lo in 1e-3f64..1.0, span in 1.0f64..1e3, n in 2usize..40) {
        let hi = lo * span;
        let ts = Sweep::log_times(lo, hi, n).unwrap();
        prop_assert_eq!(ts.len(), n);
        prop_assert_eq!(ts[0], lo);
        prop_assert_eq!(*ts.last().unwrap(), hi);
        prop_assert!(ts.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn m_constant_increases_with_beta(b1 in 0.01f64..20.0, db in 0.0f64..20.0, gamma in 0.0f64..3.0) {
        let lo = m_constant(b1, gamma).unwrap();
        let hi = m_constant(b1 + db, gamma).unwrap();
        prop_assert!(lo.is_finite() && lo > 0.0);
        prop_assert!(hi >= lo * (1.0 - 1e-12));
    }
}
