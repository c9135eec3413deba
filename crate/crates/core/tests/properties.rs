use std::f64::consts::{PI, TAU};

use nodal_core::collar::{hyperbolic_density, theta};
use nodal_core::differentials::{band_sup, is_band_bounded};
use nodal_core::divisor::winding_count;
use nodal_core::extension::{
    extend, extend_least_squares, min_scale, nodal_restriction, ScatteredFamilySamples,
};
use nodal_core::laurent::{coefficients_from_samples, decompose};
use nodal_core::nodal::{fiber_annulus, pair, wedge};
use nodal_core::random;
use nodal_core::sheaf::{
    gauge_invariance_check, poincare_residue, relative_to_canonical, residue_wedge_defect,
};
use nodal_core::{
    AnnulusKDifferential, Band, BandGrid, BandSpec, Branch, ChartPoint, Complex64,
    CotangentElement, FamilySamples, GaugeFunction, LaurentSeries, NodalFamilySpec, PowerSeries,
    RelativeSection, TangentElement,
};
use proptest::prelude::*;

fn coeffs(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

/// Laurent polynomial with support inside `[-bound, bound]`.
fn laurent(bound: i32) -> impl Strategy<Value = LaurentSeries> {
    (-bound..=bound, 0..=2 * bound as usize)
        .prop_flat_map(move |(lo, len)| {
            let len = len.min((bound - lo) as usize) + 1;
            (Just(lo), coeffs(len))
        })
        .prop_map(|(lo, c)| LaurentSeries::from_dense(lo, c))
}

fn unit_family() -> NodalFamilySpec {
    NodalFamilySpec::unit()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samples_round_trip(s in laurent(16), extra in 0usize..8) {
        let n = 2 * 16 + 1 + extra;
        let got = coefficients_from_samples(&s.sample(1.0, n).unwrap(), s.n_min(), s.n_max()).unwrap();
        prop_assert!(got.max_coeff_diff(&s) <= 1e-12);
    }

    #[test]
    fn recovery_independent_of_radius(s in laurent(8)) {
        let at = |r: f64| coefficients_from_samples(&s.sample(r, 64).unwrap(), -8, 8).unwrap();
        let base = at(1.0);
        prop_assert!(at(0.5).max_coeff_diff(&base) <= 1e-10);
        prop_assert!(at(2.0).max_coeff_diff(&base) <= 1e-10);
    }

    #[test]
    fn decomposition_parts_are_disjoint(s in laurent(12)) {
        let d = decompose(&s);
        prop_assert!(d.plus.terms().all(|(n, c)| n >= 1 || c == Complex64::new(0.0, 0.0)));
        prop_assert!(d.minus.terms().all(|(n, c)| n <= -1 || c == Complex64::new(0.0, 0.0)));
        prop_assert_eq!(d.f0, s.coeff(0));
        prop_assert_eq!(d.reconstruct().max_coeff_diff(&s), 0.0);
    }

    #[test]
    fn inner_band_is_outer_band_in_w(s in laurent(6), t_abs in 1e-4f64..1e-2, arg in 0.0..TAU) {
        // On the w-branch the inner band of the ζ-annulus is the outer band.
        let t = Complex64::from_polar(t_abs, arg);
        let family = unit_family();
        let annulus = fiber_annulus(&family, t).unwrap();
        let b = BandSpec::new(0.5, 0.9, 1.0, family, t).unwrap();
        let grid = BandGrid::default();
        let d = AnnulusKDifferential::new(1, s.clone(), annulus).unwrap();
        let dw = AnnulusKDifferential::new(1, s.substitute_reciprocal(t), annulus).unwrap();
        let inner = band_sup(&d, &b, Band::Inner, &grid).unwrap();
        let outer_w = band_sup(&dw, &b, Band::Outer, &grid).unwrap();
        prop_assert!((inner - outer_w).abs() <= 1e-12 * inner.max(1.0), "{inner} vs {outer_w}");
    }

    #[test]
    fn band_boundedness_is_monotone_in_bound(s in laurent(4), bound in 0.1f64..10.0, more in 1.0f64..4.0) {
        let t = Complex64::new(1e-3, 0.0);
        let family = unit_family();
        let d = AnnulusKDifferential::new(2, s, fiber_annulus(&family, t).unwrap()).unwrap();
        let b = BandSpec::new(0.5, 0.9, bound, family, t).unwrap();
        let grid = BandGrid::default();
        if is_band_bounded(&d, &b, &grid).unwrap() {
            prop_assert!(is_band_bounded(&d, &b.with_bound(bound * more).unwrap(), &grid).unwrap());
        }
    }

    #[test]
    fn winding_is_additive_and_rotation_invariant(
        f in laurent(4), g in laurent(4), r in 0.5f64..2.0, phi in 0.0..TAU,
    ) {
        let ef = |z: Complex64| f.eval(z).unwrap();
        let eg = |z: Complex64| g.eval(z).unwrap();
        let (wf, wg, wfg) = (
            winding_count(ef, r, 1024),
            winding_count(eg, r, 1024),
            winding_count(|z| ef(z) * eg(z), r, 1024),
        );
        // contours through a zero are rejected, not miscounted
        if let (Ok(wf), Ok(wg), Ok(wfg)) = (wf, wg, wfg) {
            prop_assert_eq!(wfg.winding, wf.winding + wg.winding);
            let rot = Complex64::from_polar(1.0, phi);
            if let Ok(wr) = winding_count(|z| ef(z * rot), r, 1024) {
                prop_assert_eq!(wr.winding, wf.winding);
            }
        }
    }

    #[test]
    fn theta_sides_sum_to_pi(t_abs in 1e-12f64..0.5, frac in 0.001f64..0.999, arg in 0.0..TAU) {
        let t = Complex64::from_polar(t_abs, arg);
        let z = (t_abs.ln() * frac).exp();
        let s = theta(z, t).unwrap() + theta(t_abs / z, t).unwrap();
        prop_assert!((s - PI).abs() <= 1e-12);
    }

    #[test]
    fn density_positive_and_blows_up_at_ends(t_abs in 1e-8f64..0.1, frac in 0.01f64..0.99) {
        let t = Complex64::new(t_abs, 0.0);
        let r = (t_abs.ln() * frac).exp();
        let lam = hyperbolic_density(Complex64::new(r, 0.0), t).unwrap();
        prop_assert!(lam > 0.0 && lam.is_finite());
        let near_outer = hyperbolic_density(Complex64::new(1.0 - 1e-9, 0.0), t).unwrap();
        let near_inner = hyperbolic_density(Complex64::new(t_abs * (1.0 + 1e-9), 0.0), t).unwrap();
        // λ ≈ 1/(1 − r) at the outer edge and ≈ 1/(|t|·δ) at relative distance δ from the inner one
        prop_assert!(near_outer > 1e8 && near_inner > 1e8 / t_abs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extension_round_trip(seed in any::<u64>(), m_deg in 0usize..=8, n_deg in 0usize..=8, k in 1u32..4) {
        let mut rng = random::seeded(seed);
        let truth = random::two_var(&mut rng, m_deg, n_deg, 1.0);
        let fs = FamilySamples::from_series(&truth, k, &unit_family(), 0.5, 0.1, 16, 64).unwrap();
        let got = extend(&fs, m_deg, n_deg).unwrap();
        // Coefficient (m, n) enters the data scaled by r^(m−n) ρⁿ; errors
        // grow like ε‖a‖₁ over the smallest such scale.
        let l1: f64 = truth.grid().iter().flatten().map(|c| c.norm()).sum();
        let tol = 1e-8f64.max(1e-15 * l1 / min_scale(&fs, m_deg, n_deg));
        prop_assert!(got.max_coeff_diff(&truth) <= tol, "{} > {}", got.max_coeff_diff(&truth), tol);
    }

    #[test]
    fn extension_unique_across_radii(seed in any::<u64>()) {
        let mut rng = random::seeded(seed);
        let truth = random::two_var(&mut rng, 5, 5, 1.0);
        let a = extend(&FamilySamples::from_series(&truth, 1, &unit_family(), 0.5, 0.1, 16, 64).unwrap(), 5, 5).unwrap();
        let b = extend(&FamilySamples::from_series(&truth, 1, &unit_family(), 0.6, 0.05, 12, 48).unwrap(), 5, 5).unwrap();
        prop_assert!(a.max_coeff_diff(&b) <= 1e-7);
    }

    #[test]
    fn nodal_restrictions_match_axes(seed in any::<u64>(), k in 1u32..5) {
        let mut rng = random::seeded(seed);
        let truth = random::two_var(&mut rng, 6, 6, 1.0);
        let got = extend(&FamilySamples::from_series(&truth, k, &unit_family(), 0.5, 0.1, 16, 64).unwrap(), 6, 6).unwrap();
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let fz = nodal_restriction(&got, Branch::Z, k).unwrap();
        let gw = nodal_restriction(&got, Branch::W, k).unwrap();
        prop_assert!(fz.max_coeff_diff(&truth.z_axis()) <= 1e-8);
        prop_assert!(gw.max_coeff_diff(&truth.w_axis().scale(Complex64::new(sign, 0.0))) <= 1e-8);
    }

    #[test]
    fn least_squares_matches_truth_on_scattered_t(seed in any::<u64>()) {
        let mut rng = random::seeded(seed);
        let truth = random::two_var(&mut rng, 4, 4, 1.0);
        let t_values: Vec<Complex64> = (0..12).map(|_| random::in_ring(&mut rng, 0.05, 0.1)).collect();
        let values = t_values
            .iter()
            .map(|&t| (0..32).map(|l| {
                let z = Complex64::from_polar(0.5, TAU * l as f64 / 32.0);
                truth.fiber_value(z, t)
            }).collect())
            .collect();
        let fs = ScatteredFamilySamples { r_zeta: 0.5, t_values, values };
        let got = extend_least_squares(&fs, 4, 4).unwrap();
        prop_assert!(got.max_coeff_diff(&truth) <= 1e-6);
    }

    #[test]
    fn alpha_identities_on_fibers(seed in any::<u64>()) {
        let mut rng = random::seeded(seed);
        for _ in 0..50 {
            let (p, _) = random::fiber_point(&mut rng, 1e-8, 0.9);
            let alpha = CotangentElement::alpha(p);
            prop_assert!((pair(&alpha, &TangentElement::vertical(p)).unwrap() - 2.0).norm() <= 1e-14);
            prop_assert!((wedge(&alpha, &CotangentElement::dpi(p)).unwrap() - 2.0).norm() <= 1e-14);
            prop_assert!(pair(&CotangentElement::dpi(p), &TangentElement::vertical(p)).unwrap().norm() <= 1e-15);
        }
    }

    #[test]
    fn gauge_change_is_invisible(seed in any::<u64>(), k in 1u32..4) {
        let mut rng = random::seeded(seed);
        let psi = RelativeSection { k, f: random::two_var(&mut rng, 3, 3, 1.0) };
        let gauge = GaugeFunction::new(
            random::two_var(&mut rng, 2, 2, 0.5),
            PowerSeries::new(vec![Complex64::new(1.5, -0.5), random::in_disc(&mut rng, 0.2)]),
        );
        let points: Vec<ChartPoint> = (0..16).map(|_| random::bidisc_point(&mut rng, 1e-2)).collect();
        prop_assert!(gauge_invariance_check(&psi, &gauge, &points).unwrap() <= 1e-10);
    }

    #[test]
    fn residue_solves_wedge_equation(seed in any::<u64>()) {
        let mut rng = random::seeded(seed);
        let form = relative_to_canonical(&RelativeSection { k: 1, f: random::two_var(&mut rng, 4, 4, 1.0) });
        let phi = poincare_residue(&form).unwrap();
        let points: Vec<ChartPoint> = (0..200).map(|_| random::bidisc_point(&mut rng, 1e-3)).collect();
        prop_assert!(residue_wedge_defect(&form, &phi, &points).unwrap() <= 1e-12);
    }
}
