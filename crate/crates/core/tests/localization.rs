use std::f64::consts::PI;

use lhy_core::localization::{self as loc, TrigPoly, WindowSpec};
use proptest::prelude::*;

#[test]
fn window_edges() {
    let s = WindowSpec::new(6.0, 1.5, 0.2).unwrap();
    assert_eq!(loc::window_value(0.0, &s), 1.0);
    assert!(loc::window_value(-4.5, &s).abs() < 1e-16);
    assert!(loc::window_value(4.5, &s).abs() < 1e-16);
    assert_eq!(loc::window_value(4.6, &s), 0.0);
    // middle of the ramp: cos(pi/4)
    assert!((loc::window_value(3.0, &s) - (0.5f64).sqrt()).abs() < 1e-15);
}

#[test]
fn constant_and_single_harmonic() {
    let s = WindowSpec::new(9.0, 2.0, 0.5).unwrap();
    let one = loc::periodic_integral_check(&|_| 1.0, None, 1, &s);
    assert!((one.windowed - 9.0).abs() < 1e-12 && (one.period - 9.0).abs() < 1e-12);
    let cos = loc::periodic_integral_check(&|t| (2.0 * PI * t / 9.0).cos(), None, 1, &s);
    assert!(cos.windowed.abs() < 1e-12 && cos.period.abs() < 1e-12);
}

#[test]
fn random_degree_ten_five_seeds() {
    let s = WindowSpec::new(12.0, 3.0, 1.0).unwrap();
    assert!(loc::random_trig_gap(&s, 10, 0..5) <= 1e-10);
}

#[test]
fn dilution_limits_and_errors() {
    let s = WindowSpec::new(100.0, 1e-6, 1e-7).unwrap();
    let d = loc::dilution_bookkeeping(5e5, &s, 1.0).unwrap();
    assert!((d.rho_tilde / (5e5 / 1e6) - 1.0).abs() < 1e-7);
    assert!(loc::dilution_bookkeeping(-1.0, &s, 1.0).is_err());
    assert!(WindowSpec::new(10.0, 1.0, 1.0).is_err());
    assert!(WindowSpec::new(10.0, 11.0, 1.0).is_err());
}

#[test]
fn density_chain_and_overhead_exponent() {
    let (gamma, alpha) = (1.2, 0.3);
    let pts: Vec<_> = (4..=9).map(|e| loc::theorem_chain(10f64.powi(-e), gamma, alpha, 1.0, 1.0, 1.0, 1.0).unwrap()).collect();
    assert!(pts.iter().all(|p| p.rho_tilde >= p.rho));
    let x: Vec<f64> = pts.iter().map(|p| p.rho).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.overhead_ratio).collect();
    let slope = lhy_core::stats::loglog_slope(&x, &y);
    assert!((slope - loc::overhead_exponent(gamma, alpha)).abs() < 0.01, "{slope}");
}

#[test]
fn localize_table_passes() {
    let rows = loc::localize_checks(1.0).unwrap();
    assert!(rows.iter().all(|r| r.pass));
}

fn spec() -> impl Strategy<Value = WindowSpec> {
    (1.0f64..50.0, 0.05f64..0.5, 0.05f64..0.95).prop_map(|(l, f, g)| {
        let ell = f * l;
        WindowSpec::new(l, ell, g * ell).unwrap()
    })
}

proptest! {
    #[test]
    fn window_symmetric_and_bounded(s in spec(), u in -1.5f64..1.5) {
        let t = u * (0.5 * s.l + s.ell);
        let q = loc::window_value(t, &s);
        prop_assert_eq!(q, loc::window_value(-t, &s));
        prop_assert!((0.0..=1.0).contains(&q));
    }

    #[test]
    fn partition_and_square_integral(s in spec()) {
        prop_assert!(loc::partition_gap(&s, 257) < 1e-14);
        prop_assert!((loc::window_sq_integral(&s) - s.l).abs() <= 1e-12 * s.l);
    }

    #[test]
    fn trig_polynomials_up_to_degree_twenty(s in spec(), degree in 0usize..=20, seed in 0u64..1000) {
        let p = TrigPoly::random(s.l, degree, seed);
        let c = loc::periodic_integral_check(&|t| p.eval(t), Some(p.period_integral()), degree, &s);
        prop_assert!(c.gap <= 1e-10, "gap {} at seed {}", c.gap, seed);
    }

    #[test]
    fn continuity_at_seams(s in spec()) {
        for seam in [0.5 * s.l - s.ell, 0.5 * s.l + s.ell] {
            let h = 1e-9 * s.l;
            prop_assert!((loc::window_value(seam - h, &s) - loc::window_value(seam + h, &s)).abs() < 1e-7);
        }
    }
}
