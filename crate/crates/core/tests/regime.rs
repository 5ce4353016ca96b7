use lhy_core::lattice;
use lhy_core::regime::{self, MomentumClass, MomentumSets, RegimeParams};
use proptest::prelude::*;

#[test]
fn n_from_independent_box_volume() {
    // rho = 1e-4, gamma = 1.1: L = 10^4.4, N = rho L^3 = 10^9.2
    let p = RegimeParams::derive(1e-4, 1.1, 0.01, 0.0).unwrap();
    assert!((p.kappa - 0.521_739_130_434_782_6).abs() < 1e-15);
    assert!((p.n - 10f64.powf(9.2)).abs() / p.n < 1e-12);
    assert!((p.l - 10f64.powf(4.4)).abs() / p.l < 1e-12);
}

#[test]
fn temperature_scaling() {
    let p = RegimeParams::derive(1e-4, 1.1, 0.01, 0.5).unwrap().with_scattering_length(0.25);
    assert!((p.t - 0.5 * 1e-4 * 0.25).abs() < 1e-20);
    assert!((p.t_eff / (p.t * p.n.powf(2.0 - 2.0 * p.kappa)) - 1.0).abs() < 1e-12);
}

#[test]
fn smallest_shell_holds_six_points() {
    // N^{kappa/2 - eps} < 2 pi <= N^{kappa/2 + eps} and the next shell 2 pi sqrt 2 outside
    let kappa = 0.52;
    let eps = 0.02;
    let n = (2.0 * std::f64::consts::PI).powf(1.0 / (kappa / 2.0)) ;
    let p = RegimeParams::synthetic(n, kappa, eps, 0.0).unwrap();
    assert!(p.shell_inner() < lattice::TWO_PI && lattice::TWO_PI <= p.shell_outer());
    assert!(p.shell_outer() < lattice::TWO_PI * 2f64.sqrt());
    let sets = MomentumSets::build(&p, p.shell_outer() + 1.0).unwrap();
    assert_eq!(sets.shell.len(), 6);
}

#[test]
fn cap_below_shell_is_rejected() {
    let p = RegimeParams::synthetic(1e4, 0.52, 0.05, 0.0).unwrap();
    assert!(MomentumSets::build(&p, 0.5 * p.shell_outer()).is_err());
}

#[test]
fn classification_is_a_partition() {
    let p = RegimeParams::synthetic(2e4, 0.55, 0.05, 0.0).unwrap();
    let cap = p.default_cap().min(120.0);
    let sets = MomentumSets::build(&p, cap).unwrap();
    for (&n, &c) in sets.points.iter().zip(&sets.classes) {
        let hits = [
            n == [0, 0, 0],
            sets.shell.contains(&n),
            sets.high.contains(&n),
            c == MomentumClass::Low,
            c == MomentumClass::OutsideCap,
        ];
        assert_eq!(hits.iter().filter(|&&h| h).count(), 1, "point {n:?} class {c:?}");
    }
}

proptest! {
    #[test]
    fn derive_round_trips_through_n_and_kappa(log_rho in -9.0f64..-2.0, gamma in 1.01f64..6.0, frac in 0.05f64..0.95) {
        let kappa = regime::kappa_of_gamma(gamma);
        let eps_max = (2.0 - 3.0 * kappa) / 4.0;
        let p = RegimeParams::derive(10f64.powf(log_rho), gamma, frac * eps_max, 0.0).unwrap();
        let rho_back = p.n.powf(-2.0 + 3.0 * p.kappa);
        prop_assert!((rho_back / p.rho - 1.0).abs() < 1e-12);
        prop_assert!((regime::gamma_of_kappa(p.kappa) / gamma - 1.0).abs() < 1e-12);
        prop_assert!((p.n.powf(1.0 - p.kappa) / p.l - 1.0).abs() < 1e-12);
    }
}
