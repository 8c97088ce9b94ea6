use std::sync::Arc;

use orvidx::associated::{omega_m, AssociatedPair};
use orvidx::generators::{gevrey_fn, gevrey_seq, FamilySpec};
use orvidx::indices::{gamma_m, omega_m_index, report, ExtReal};
use orvidx::legendre::{concave_majorant_of, k_beta, largest_convex_minorant, upper_conjugate};
use orvidx::verdict::{bounded_trend, Status};
use orvidx::WeightFunction;
use proptest::prelude::*;

fn power(c: f64, s: f64) -> WeightFunction {
    WeightFunction::from_log(format!("{c}t^{s}"), 0.0, 460.0, move |u| c.ln() + s * u, Some(Arc::new(move |t: f64| c * t.powf(s))))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gevrey_sequence_indices(a in 0.3f64..3.0) {
        let m = gevrey_seq(a, 4096).unwrap();
        prop_assert!((gamma_m(&m).0 - a).abs() <= 0.05);
        prop_assert!((omega_m_index(&m).0 - a).abs() <= 0.05);
    }

    #[test]
    fn power_function_indices(s in 0.1f64..1.0) {
        let r = report(&gevrey_fn(s).unwrap());
        for v in [r.alpha, r.beta, r.mu, r.rho] {
            prop_assert!((v.0 - s).abs() <= 0.05);
        }
        prop_assert!((r.gamma.0 - 1.0 / s).abs() <= 0.1 * (1.0 / s));
    }

    #[test]
    fn conjugation_reverses_order(c1 in 0.5f64..2.0, dc in 0.0f64..2.0, s in 0.01f64..10.0) {
        let lo = upper_conjugate(&power(c1, 0.5)).unwrap().at(s);
        let hi = upper_conjugate(&power(c1 + dc, 0.5)).unwrap().at(s);
        prop_assume!(!lo.censored && !hi.censored);
        prop_assert!(lo.value <= hi.value * (1.0 + 1e-12));
    }

    #[test]
    fn majorant_bounds_and_is_concave(steps in prop::collection::vec(0.0f64..10.0, 3..40)) {
        let ys: Vec<f64> = steps.iter().scan(0.0, |acc, d| { *acc += d; Some(*acc) }).collect();
        let x: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
        let m = concave_majorant_of(x, ys.clone());
        prop_assert!(m.hull.iter().zip(&ys).all(|(h, y)| *h >= *y - 1e-12));
        for w in m.hull.windows(3) {
            prop_assert!(w[1] >= 0.5 * (w[0] + w[2]) - 1e-9);
        }
        prop_assert!(m.max_rel_gap <= 1e-6);
    }

    #[test]
    fn minorant_sits_below(a in 0.2f64..3.0) {
        let m = largest_convex_minorant(move |w| (-a * w).exp(), -5.0, 5.0);
        prop_assert!(m.bounds);
        prop_assert_eq!(m.verdict().status, Status::Holds);
    }

    #[test]
    fn k_beta_in_unit_interval(b in 0.01f64..50.0) {
        let k = k_beta(b);
        prop_assert!(k > 0.0 && k < 1.0);
    }

    #[test]
    fn omega_m_nondecreasing(a in 0.5f64..2.0, t0 in 1.0f64..1e6, f in 1.0f64..100.0) {
        let m = gevrey_seq(a, 4096).unwrap();
        let (w0, w1) = (omega_m(&m, t0).unwrap(), omega_m(&m, t0 * f).unwrap());
        prop_assert!(w1 >= w0);
        let pair = AssociatedPair::new(&m);
        let (n0, n1) = (pair.nu(t0).unwrap(), pair.nu(t0 * f).unwrap());
        prop_assert!(n0.fract() == 0.0 && n1 >= n0);
    }

    #[test]
    fn flat_trends_are_bounded(c in -50.0f64..50.0, eps in prop::collection::vec(-1e-3f64..1e-3, 4)) {
        let s: Vec<f64> = eps.iter().map(|e| c + e).collect();
        prop_assert_eq!(bounded_trend(&s), Status::Holds);
    }

    #[test]
    fn linear_growth_is_unbounded(c in -5.0f64..5.0, d in 0.5f64..20.0) {
        let s: Vec<f64> = (0..4).map(|i| c + d * i as f64).collect();
        prop_assert_eq!(bounded_trend(&s), Status::Fails);
    }

    #[test]
    fn recip_is_an_involution(x in 1e-6f64..1e6) {
        let r = ExtReal(x).recip().recip();
        prop_assert!((r.0 - x).abs() <= 1e-12 * x);
    }

    #[test]
    fn family_spec_round_trip(a in 0.1f64..5.0) {
        let spec = FamilySpec::parse(&format!("gevrey:alpha={a}")).unwrap();
        prop_assert_eq!(FamilySpec::parse(&spec.id()).unwrap(), spec);
    }
}
