use lhy_core::fockmicro::checks::{self, all_pass};
use lhy_core::fockmicro::{default_layout, ops, random_layout, FockSpace, Mode, SparseOperator, Tag};
use lhy_core::lattice;
use lhy_core::Error;
use proptest::prelude::*;

fn occ(space: &FockSpace, set: &[(lattice::Idx, u8)]) -> Vec<u8> {
    let mut o = vec![0u8; space.n_modes()];
    for &(l, n) in set {
        o[space.require_mode(l).unwrap()] = n;
    }
    o
}

#[test]
fn default_layout_dimension_and_suite() {
    let lay = default_layout().unwrap();
    assert_eq!(lay.space.dim(), 3251);
    let rows = checks::lemma_suite(&lay).unwrap();
    assert!(all_pass(&rows), "{}", checks::format_table(&rows));
}

#[test]
fn cutoff_eigenvalues() {
    let lay = default_layout().unwrap();
    let sp = &lay.space;
    let k = [1, 0, 0];
    let r = ops::h_k(sp, k)[0];
    let vac = occ(sp, &[]);
    assert!(ops::theta1(sp, &vac, k) && ops::theta2(sp, &vac, k, r));
    // an existing k-connection (-t, t+k) switches Theta^(1) off
    let t = r;
    let conn = occ(sp, &[(lattice::neg(t), 1), (lattice::add(t, k), 1)]);
    assert!(!ops::theta1(sp, &conn, k));
    // an occupied shell neighbour r + q switches Theta^(2) off, when present
    for q in sp.labels_with(Tag::Shell) {
        let l = lattice::add(r, q);
        if sp.mode_index(l).is_some() {
            assert!(!ops::theta2(sp, &occ(sp, &[(l, 1)]), k, r));
        }
    }
}

#[test]
fn vacuum_generators_vanish() {
    let lay = default_layout().unwrap();
    let sp = &lay.space;
    let k = [1, 0, 0];
    let gen = ops::cubic_generator(sp, k, &lay.phi(), lay.n).unwrap();
    let x2 = ops::xk_squared(&gen).unwrap();
    let v = sp.index_of(&occ(sp, &[])).unwrap();
    assert_eq!(x2[v], 0.0);
    let zero = |_: lattice::Idx| 0.0;
    let tc = ops::t_c(sp, &lay.order, &zero, lay.n).unwrap();
    assert_eq!(tc.max_diff(&SparseOperator::identity(sp.dim())), 0.0);
}

#[test]
fn parity_on_simple_states() {
    let lay = default_layout().unwrap();
    let sp = &lay.space;
    let k = [1, 0, 0];
    let (_, p, q) = ops::parity_ops(sp, k).unwrap();
    let vac = sp.index_of(&occ(sp, &[])).unwrap();
    let one = sp.index_of(&occ(sp, &[(k, 1)])).unwrap();
    assert_eq!(p.get(vac, vac), 1.0);
    assert_eq!(q.get(one, one), 1.0);
}

#[test]
fn trivial_unitaries() {
    let sp = FockSpace::new(vec![Mode::new([0, 0, 0], Tag::Condensate, 6), Mode::new([1, 0, 0], Tag::Shell, 3), Mode::new([-1, 0, 0], Tag::Shell, 3)], 8).unwrap();
    let id = SparseOperator::identity(sp.dim());
    assert!(ops::weyl(&sp, 0.0).unwrap().max_diff(&id) < 1e-15);
    assert!(ops::quadratic_bogoliubov(&sp, &[([1, 0, 0], 0.0)]).unwrap().max_diff(&id) < 1e-15);
    match ops::weyl(&sp, 3.0) {
        Err(Error::Truncation(msg)) => assert!(msg.contains("cap")),
        other => panic!("expected truncation error, got {other:?}"),
    }
}

#[test]
fn zero_temperature_gibbs_is_vacuum() {
    let lay = default_layout().unwrap();
    let g = ops::gibbs_gamma0(&lay.space, &lay.dispersion(), 0.0).unwrap();
    let v = lay.space.index_of(&occ(&lay.space, &[])).unwrap();
    assert_eq!(g.get(v, v), 1.0);
    assert_eq!(g.trace(), 1.0);
}

#[test]
fn corrupted_state_is_rejected() {
    let lay = default_layout().unwrap();
    let row = checks::negative_control(&lay).unwrap();
    assert!(row.pass && row.value > 0.5);
    let sp = &lay.space;
    let h = lay.high()[0];
    let i = sp.index_of(&occ(sp, &[(h, 1)])).unwrap();
    let rho = SparseOperator::from_triplets(sp.dim(), vec![(i, i, 1.0)]);
    let tc = ops::t_c(sp, &lay.order, &lay.phi(), lay.n).unwrap();
    assert!(matches!(checks::monogamy_check(sp, &rho, &tc, h, false), Err(Error::Precondition(_))));
}

#[test]
fn monogamy_for_two_mode_shell_gibbs() {
    // 2 shell modes, 4 high modes, dressed Gibbs state
    let lay = default_layout().unwrap();
    let gamma = checks::dressed_gibbs(&lay).unwrap();
    let tc = ops::t_c(&lay.space, &lay.order, &lay.phi(), lay.n).unwrap();
    for p in lay.high() {
        for tilde in [false, true] {
            assert!(checks::monogamy_check(&lay.space, &gamma, &tc, p, tilde).unwrap() <= 1e-12);
        }
    }
}

#[test]
fn weyl_bogoliubov_and_diagonalization() {
    let mut rows = checks::weyl_checks(0.5, 40, 10).unwrap();
    rows.extend(checks::bogoliubov_checks(0.1, 12).unwrap());
    rows.push(checks::diago_check([1, 0, 0], 10.0, 30, 5).unwrap());
    assert!(all_pass(&rows), "{}", checks::format_table(&rows));
}

#[test]
fn hamiltonian_identities() {
    let rows = lhy_core::fockmicro::hamiltonian::assembly_checks().unwrap();
    assert!(all_pass(&rows), "{}", checks::format_table(&rows));
}

#[test]
fn gibbs_state_structure() {
    let rows = checks::structural_checks(&default_layout().unwrap(), 0.5).unwrap();
    assert!(all_pass(&rows), "{}", checks::format_table(&rows));
}

#[test]
fn exact_trace_matches_closed_free_energy() {
    let (exact, closed) = checks::gibbs_trace_check(&[2.0, 3.5], 1.5, 60).unwrap();
    assert!((exact - closed).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]
    #[test]
    fn random_layouts_pass_lemma_suite(seed in 100u64..10_000) {
        let lay = random_layout(seed).unwrap();
        let rows = checks::lemma_suite(&lay).unwrap();
        prop_assert!(all_pass(&rows), "seed {}:\n{}", seed, checks::format_table(&rows));
    }

    #[test]
    fn sparse_adjoint_is_involutive(entries in prop::collection::vec((0usize..12, 0usize..12, -5.0f64..5.0), 0..40)) {
        let a = SparseOperator::from_triplets(12, entries);
        prop_assert_eq!(a.adjoint().adjoint().max_diff(&a), 0.0);
        let b = a.add(&a.adjoint());
        prop_assert!(b.hermiticity_error() == 0.0);
    }
}
