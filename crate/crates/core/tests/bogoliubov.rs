use lhy_core::bogoliubov::{self as bg, Dispersion};
use lhy_core::lattice;
use lhy_core::regime::RegimeParams;
use lhy_core::scattering::{self, Potential};
use proptest::prelude::*;

#[test]
fn trivial_high_branch_inside_shell() {
    let v = Potential::soft_sphere(2.0, 1.0).unwrap();
    let p = RegimeParams::synthetic(2000.0, 0.52, 0.05, 0.0).unwrap();
    let sol = scattering::solve_box_scattering(&v, &p, p.l, 1e-10).unwrap();
    for h in bg::high_branch(&sol, 1900.0, &p) {
        if lattice::p_abs(h.p) <= p.shell_outer() {
            assert_eq!((h.c, h.s), (1.0, 0.0));
        } else {
            assert!((h.c * h.c - h.s * h.s - 1.0).abs() < 1e-12 * h.c * h.c);
        }
    }
}

#[test]
fn tau_equal_scales_oracle() {
    // tanh 2 tau = -1/2  =>  tau = -ln(3)/4
    let (tau, _, _) = bg::shell_coeff(7.0, 7.0).unwrap();
    assert!((tau + 0.274_653_072_167_027_1).abs() < 1e-15);
}

#[test]
fn born_level_constant() {
    let v = Potential::soft_sphere(2.0, 1.0).unwrap();
    let p = RegimeParams::synthetic(1000.0, 0.52, 0.05, 0.0).unwrap();
    let mut sol = scattering::solve_box_scattering(&v, &p, p.l, 1e-10).unwrap();
    sol.phi.iter_mut().for_each(|x| *x = 0.0);
    let n0 = 950.0;
    let d = bg::renormalized_constant_direct(&sol, &v, n0, &p);
    let zero = 0.5 * n0 * n0 * scattering::rescaled_fourier(&v, &p, [0, 0, 0]);
    assert!((d.total - zero).abs() < 1e-12 * zero);
}

#[test]
fn closed_constant_without_depletion_or_shell() {
    let p = RegimeParams::synthetic(1000.0, 0.52, 0.05, 0.0).unwrap();
    let c = bg::renormalized_constant_closed(0.3, p.n, &p, &[]);
    let expect = 4.0 * std::f64::consts::PI * 0.3 * p.n.powf(1.0 + p.kappa);
    assert!((c.total / expect - 1.0).abs() < 1e-14);
    assert_eq!(bg::renormalized_constant_closed(0.0, 900.0, &p, &[[1, 0, 0]]).total, 0.0);
}

#[test]
fn diago_constant_two_routes() {
    let p = RegimeParams::synthetic(1e5, 0.52, 0.05, 0.0).unwrap();
    let shell = lattice::annulus(p.shell_inner(), p.shell_outer());
    let d = Dispersion::new(0.24, &p);
    let (x, y) = (bg::diago_constant(&shell, &d), bg::diago_constant_stable(&shell, &d));
    assert!((x / y - 1.0).abs() < 1e-10);
}

proptest! {
    #[test]
    fn hyperbolic_identities(p2 in 1.0f64..1e6, b in 0.0f64..1e5) {
        let (tau, g, s) = bg::shell_coeff(p2, b).unwrap();
        let d = Dispersion { a: b / (8.0 * std::f64::consts::PI), b, coupling: 2.0 * b };
        let e = d.e(p2);
        prop_assert!((g * g - s * s - 1.0).abs() < 1e-12 * g * g);
        prop_assert!(((g * g + s * s) - d.big_a(p2) / e).abs() < 1e-12 * d.big_a(p2) / e);
        prop_assert!((2.0 * g * s + b / e).abs() < 1e-12 * (1.0 + b / e));
        prop_assert!(tau <= 0.0);
    }

    #[test]
    fn dispersion_identity_on_lattice(n in prop::array::uniform3(-40i32..=40), a in 0.05f64..2.0, log_n in 2.0f64..6.0) {
        prop_assume!(n != [0, 0, 0]);
        let p = RegimeParams::synthetic(10f64.powf(log_n), 0.52, 0.05, 0.0).unwrap();
        let d = Dispersion::new(a, &p);
        let p2 = lattice::p2(n);
        let lhs = d.e_from_ab(p2);
        let rhs = (p2 * p2 + 16.0 * std::f64::consts::PI * a * p.n.powf(p.kappa) * p2).sqrt();
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn high_coeff_is_hyperbolic(phi in -1.0f64..1.0, n0 in 0.0f64..1e4) {
        let (c, s) = bg::high_coeff(phi, n0);
        prop_assert!((c * c - s * s - 1.0).abs() <= 1e-12 * c * c);
    }
}
