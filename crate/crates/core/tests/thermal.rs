use lhy_core::bogoliubov::{self as bg, Dispersion};
use lhy_core::fockmicro::{ops, FockSpace, Mode, SparseOperator, Tag};
use lhy_core::lattice;
use lhy_core::regime::RegimeParams;
use lhy_core::thermal;
use proptest::prelude::*;

#[test]
fn occupation_edge_values() {
    assert!((thermal::bose_occupation(2f64.ln(), 1.0).unwrap() - 1.0).abs() < 1e-15);
    let n = thermal::bose_occupation(100.0, 1.0).unwrap();
    assert!((n / (-100f64).exp() - 1.0).abs() < 1e-12);
}

#[test]
fn lhy_constant_reproduced() {
    // 4 pi * 128/(15 sqrt pi) = 512 sqrt(pi)/15
    let v = thermal::lhy_integral(1.0).unwrap();
    assert!((v - 60.499_758_112_937_58).abs() < 1e-6 * 60.5);
    assert!((4.0 * std::f64::consts::PI * thermal::lhy_coefficient() - thermal::lhy_closed_form(1.0)).abs() < 1e-12);
}

#[test]
fn lhy_scales_as_five_halves() {
    let base = thermal::lhy_integral(1.0).unwrap();
    for a in [0.25, 4.0] {
        let v = thermal::lhy_integral(a).unwrap();
        assert!((v / a.powf(2.5) / base - 1.0).abs() < 1e-9);
    }
    assert_eq!(thermal::lhy_integral(0.0).unwrap(), 0.0);
}

#[test]
fn thermal_integral_free_gas_and_monotone() {
    let free = thermal::thermal_integral(0.0).unwrap();
    assert!((free - thermal::FREE_GAS_THERMAL).abs() < 1e-9);
    let mut prev = free;
    for g in [0.01, 0.1, 0.5, 1.0, 3.0, 10.0] {
        let v = thermal::thermal_integral(g).unwrap();
        assert!(v < 0.0 && v > prev, "g = {g}: {v} vs {prev}");
        prev = v;
    }
}

#[test]
fn zero_temperature_row_has_no_thermal_term() {
    let r = thermal::free_energy_upper_bound(1e-4, 0.0, 0.238, 0.0, 0.1).unwrap();
    assert_eq!(r.thermal, 0.0);
    assert!((r.total - (r.leading + r.lhy)).abs() < 1e-24);
    assert!(thermal::free_energy_upper_bound(2.0, 0.0, 1.0, 0.0, 0.1).is_err());
}

#[test]
fn shell_number_two_routes() {
    let p = RegimeParams::synthetic(1e5, 0.52, 0.05, 1.0).unwrap().with_scattering_length(0.24);
    let shell = lattice::annulus(p.shell_inner(), p.shell_outer());
    let d = Dispersion::new(0.24, &p);
    let coeffs = bg::shell_branch(0.24, &p, &shell).unwrap();
    let x = thermal::shell_number(&coeffs, &d, p.t_eff).unwrap();
    let y = thermal::shell_number_formula(&shell, &d, p.t_eff).unwrap();
    assert!((x.total / y.total - 1.0).abs() < 1e-12);
}

#[test]
fn second_moment_ratio_tends_to_one() {
    let ratios: Vec<f64> = [1e4, 1e5, 1e6]
        .iter()
        .map(|&n| {
            let p = RegimeParams::synthetic(n, 0.52, 0.1, 1.0).unwrap().with_scattering_length(0.24);
            let shell = lattice::annulus(p.shell_inner(), p.shell_outer());
            let d = Dispersion::new(0.24, &p);
            let c = bg::shell_branch(0.24, &p, &shell).unwrap();
            let m = thermal::shell_number_second_moment(&c, &d, p.t_eff).unwrap();
            m.total / m.square
        })
        .collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
    assert!(ratios[2] - 1.0 < 0.1, "{ratios:?}");
}

/// Dressed Gibbs state on a ±k pair with large caps against the closed
/// shell number and Wick second moment.
#[test]
fn shell_moments_match_exact_fock_traces() {
    let k = [1, 0, 0];
    let cap = 40;
    let sp = FockSpace::new(vec![Mode::new(k, Tag::Shell, cap), Mode::new(lattice::neg(k), Tag::Shell, cap)], 2 * cap as u32).unwrap();
    let b = 12.0;
    let d = Dispersion { a: b / (8.0 * std::f64::consts::PI), b, coupling: 2.0 * b };
    let t_eff = d.e(lattice::p2(k));
    let (tau, g, s) = bg::shell_coeff(lattice::p2(k), b).unwrap();
    let u = ops::quadratic_bogoliubov(&sp, &[(k, tau)]).unwrap();
    let gamma = ops::gibbs_gamma0(&sp, &d, t_eff).unwrap().conjugate(&u);
    let ns = ops::count(&sp, Tag::Shell);
    let coeffs = [k, lattice::neg(k)].map(|p| bg::ShellCoeff { p, tau, gamma: g, sigma: s });
    let first = thermal::shell_number(&coeffs, &d, t_eff).unwrap().total;
    let second = thermal::shell_number_second_moment(&coeffs, &d, t_eff).unwrap().total;
    // low-occupation sector only: truncation at cap 40 leaves e^{-40} weights
    assert!((ns.trace_product(&gamma) - first).abs() < 1e-9, "{} vs {first}", ns.trace_product(&gamma));
    let ns2: SparseOperator = ns.matmul(&ns);
    assert!((ns2.trace_product(&gamma) - second).abs() < 1e-8, "{} vs {second}", ns2.trace_product(&gamma));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn gibbs_two_routes_agree(es in prop::collection::vec(0.01f64..50.0, 1..40), t in 0.05f64..20.0) {
        let f = thermal::gamma0_free_energy_modes(&es, t).unwrap();
        prop_assert!((f.log_partition - f.energy_entropy).abs() <= 1e-10 * f.log_partition.abs().max(1e-300));
        prop_assert!(f.log_partition <= 0.0);
    }
}
