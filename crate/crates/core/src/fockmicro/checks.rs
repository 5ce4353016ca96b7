//! Matrix-level checks of the operator identities, collected as table rows.

use super::expm;
use super::layout::{self, ToyLayout};
use super::ops::{self, Ladder};
use super::space::{FockSpace, Mode, Tag};
use super::sparse::SparseOperator;
use crate::bogoliubov;
use crate::error::{Error, Result};
use crate::lattice::{self, Idx};
use crate::par;
use crate::thermal;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckRow {
    /// Passes when value ≤ tol.
    pub fn le(name: impl Into<String>, value: f64, tol: f64) -> Self {
        CheckRow { name: name.into(), value, tol, pass: value <= tol }
    }

    /// Passes when value > floor.
    pub fn gt(name: impl Into<String>, value: f64, floor: f64) -> Self {
        CheckRow { name: name.into(), value, tol: floor, pass: value > floor }
    }
}

pub fn all_pass(rows: &[CheckRow]) -> bool {
    rows.iter().all(|r| r.pass)
}

pub fn format_table(rows: &[CheckRow]) -> String {
    let w = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    rows.iter()
        .map(|r| format!("{} {:<w$} {:>12.3e} (tol {:.1e})\n", if r.pass { "PASS" } else { "FAIL" }, r.name, r.value, r.tol))
        .collect()
}

/// The trial state Γ = e^{ℬ₂}Γ₀e^{−ℬ₂} on the layout's shell.
pub fn dressed_gibbs(lay: &ToyLayout) -> Result<SparseOperator> {
    let disp = lay.dispersion();
    let g0 = ops::gibbs_gamma0(&lay.space, &disp, lay.t_eff)?;
    let u = ops::quadratic_bogoliubov(&lay.space, &shell_eta(lay)?)?;
    Ok(g0.conjugate(&u))
}

/// One (k, τ_k) entry per shell pair.
pub fn shell_eta(lay: &ToyLayout) -> Result<Vec<(Idx, f64)>> {
    let mut out: Vec<(Idx, f64)> = Vec::new();
    for k in lay.shell() {
        if out.iter().any(|(p, _)| *p == lattice::neg(k)) {
            continue;
        }
        let (tau, _, _) = bogoliubov::shell_coeff(lattice::p2(k), lay.b)?;
        out.push((k, tau));
    }
    Ok(out)
}

fn support_violation(space: &FockSpace, rho: &SparseOperator) -> f64 {
    (0..space.dim())
        .filter(|&i| !ops::shell_only(space, i))
        .flat_map(|i| rho.row(i).map(|(_, v)| v.abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

/// max |χ_p ρ' χ_p − ρ'| for ρ' = T_cΓT_c*, with Γ checked for support.
pub fn monogamy_check(space: &FockSpace, gamma: &SparseOperator, tc: &SparseOperator, p: Idx, tilde: bool) -> Result<f64> {
    let v = support_violation(space, gamma);
    if v > 0.0 {
        return Err(Error::Precondition(format!("state occupies modes outside the shell (weight {v:e})")));
    }
    monogamy_deviation(space, gamma, tc, p, tilde)
}

/// Same as [`monogamy_check`] without the support precondition.
pub fn monogamy_deviation(space: &FockSpace, gamma: &SparseOperator, tc: &SparseOperator, p: Idx, tilde: bool) -> Result<f64> {
    let rho = gamma.conjugate(tc);
    let chi = ops::chi(space, p, tilde)?;
    Ok(chi.matmul(&rho).matmul(&chi).max_diff(&rho))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub j: u32,
    /// Tr T_c†𝒩_S^jT_cΓ.
    pub dressed: f64,
    /// Tr 𝒩_S^jΓ.
    pub bare: f64,
    /// Smallest eigenvalue of 1(𝒩_S^j − T_c†𝒩_S^jT_c)1 on Ran 1{𝒩_{S^c}=0}.
    pub min_eig: f64,
}

pub fn moment_transport_check(space: &FockSpace, gamma: &SparseOperator, tc: &SparseOperator, j: u32) -> Result<MomentReport> {
    if !(1..=2).contains(&j) {
        return Err(Error::InvalidParameter(format!("moment order must be 1 or 2, got {j}")));
    }
    let v = support_violation(space, gamma);
    if v > 0.0 {
        return Err(Error::Precondition(format!("state occupies modes outside the shell (weight {v:e})")));
    }
    let ns = ops::count(space, Tag::Shell);
    let nsj = if j == 1 { ns.clone() } else { ns.matmul(&ns) };
    let dressed_op = tc.adjoint().matmul(&nsj).matmul(tc);
    let p = ops::shell_support(space);
    let diff = p.matmul(&nsj.sub(&dressed_op)).matmul(&p);
    Ok(MomentReport {
        j,
        dressed: dressed_op.trace_product(gamma),
        bare: nsj.trace_product(gamma),
        min_eig: expm::min_eigenvalue(&diff),
    })
}

/// Words of Q₃^S, Q₃^M and Q₄^{M,1} (creation parts; h.c. is the transpose).
pub fn parity_words(space: &FockSpace) -> Vec<(String, Vec<Ladder>)> {
    let s = space.labels_with(Tag::Shell);
    let h = space.labels_with(Tag::High);
    let in_s = |l: Idx| space.tag_of(l) == Some(Tag::Shell);
    let in_h = |l: Idx| space.tag_of(l) == Some(Tag::High);
    let mut out = Vec::new();
    let cubic = |r: Idx, p: Idx| vec![Ladder::Create(lattice::neg(r)), Ladder::Create(lattice::add(r, p)), Ladder::Annihilate(p)];
    for &r in &s {
        for &p in &s {
            if in_s(lattice::add(r, p)) && in_s(lattice::neg(r)) {
                out.push(("Q3S".to_string(), cubic(r, p)));
            }
        }
    }
    for &r in &h {
        for &p in &h {
            if in_s(lattice::add(r, p)) && in_h(lattice::neg(r)) {
                out.push(("Q3M".to_string(), cubic(r, p)));
            }
        }
    }
    for &r in &s {
        for &p in &h {
            if in_h(lattice::add(r, p)) && in_s(lattice::neg(r)) {
                out.push(("Q3M".to_string(), cubic(r, p)));
            }
        }
    }
    for &p in &s {
        for &pr in &h {
            let r = lattice::sub(pr, p);
            for &q in &h {
                if in_s(lattice::add(q, r)) {
                    out.push((
                        "Q4M1".to_string(),
                        vec![Ladder::Create(pr), Ladder::Create(q), Ladder::Annihilate(lattice::add(q, r)), Ladder::Annihilate(p)],
                    ));
                }
            }
        }
    }
    out
}

/// Largest |Tr W ρ'| over the parity-odd words and their adjoints, with the
/// number of words.
pub fn parity_zero_traces(space: &FockSpace, rho: &SparseOperator) -> Result<(f64, usize)> {
    let words = parity_words(space);
    let vals = par::map(&words, |(_, w)| -> Result<f64> {
        let op = ops::word(space, w)?;
        Ok(op.trace_product(rho).abs().max(op.transpose().trace_product(rho).abs()))
    });
    let mut m = 0.0f64;
    for v in vals {
        m = m.max(v?);
    }
    Ok((m, words.len()))
}

/// The algebra suite on one layout in its configured order.
pub fn lemma_suite(lay: &ToyLayout) -> Result<Vec<CheckRow>> {
    let sp = &lay.space;
    let phi = lay.phi();
    let tag = &lay.name;
    let mut rows = Vec::new();
    let mut sq = 0.0f64;
    let mut x2 = 0.0f64;
    let mut closed = 0.0f64;
    let mut unit = 0.0f64;
    let mut mk_comm = 0.0f64;
    let gens: Vec<_> = lay.order.iter().map(|&k| ops::cubic_generator(sp, k, &phi, lay.n)).collect::<Result<_>>()?;
    for g in &gens {
        sq = sq.max(g.sharp.matmul(&g.sharp).max_abs());
        let formula = ops::xk_squared_formula(sp, g.k, &phi, lay.n)?;
        x2 = x2.max(g.circ.matmul(&g.sharp).sub(&formula).max_abs_on(|i| sp.unsaturated(i)));
        let tk = ops::cubic_unitary(g)?;
        closed = closed.max(tk.max_diff(&ops::cubic_unitary_expm(g)?));
        unit = unit.max(tk.unitarity_error());
        for &k in &lay.order {
            let (m, _, _) = ops::parity_ops(sp, k)?;
            mk_comm = mk_comm.max(g.sharp.commutator(&m).max_abs());
        }
    }
    rows.push(CheckRow::le(format!("{tag}: (B#)^2 = 0"), sq, 0.0));
    rows.push(CheckRow::le(format!("{tag}: B°B# = X_k^2 formula (unsaturated)"), x2, 1e-12));
    rows.push(CheckRow::le(format!("{tag}: closed-form T_k vs expm"), closed, 1e-10));
    rows.push(CheckRow::le(format!("{tag}: T_k unitary"), unit, 1e-12));
    rows.push(CheckRow::le(format!("{tag}: [B#_q, M_k] = 0"), mk_comm, 1e-12));

    let tc = ops::t_c(sp, &lay.order, &phi, lay.n)?;
    rows.push(CheckRow::le(format!("{tag}: T_c unitary"), tc.unitarity_error(), 1e-10));
    let mut pc = 0.0f64;
    for &k in &lay.order {
        let (_, p, _) = ops::parity_ops(sp, k)?;
        pc = pc.max(tc.commutator(&p).max_abs());
    }
    rows.push(CheckRow::le(format!("{tag}: [T_c, P_k] = 0"), pc, 1e-12));

    let inv = ops::shell_plus_half_high(sp);
    rows.push(CheckRow::le(format!("{tag}: T_c*(N_S+N_H/2)T_c invariance"), tc.adjoint().matmul(&inv).matmul(&tc).max_diff(&inv), 1e-12));

    let gamma = dressed_gibbs(lay)?;
    let mut mono = 0.0f64;
    for p in lay.high() {
        for tilde in [false, true] {
            mono = mono.max(monogamy_check(sp, &gamma, &tc, p, tilde)?);
        }
    }
    rows.push(CheckRow::le(format!("{tag}: monogamy chi_p, chi~_p"), mono, 1e-12));

    for j in [1, 2] {
        let m = moment_transport_check(sp, &gamma, &tc, j)?;
        rows.push(CheckRow::le(format!("{tag}: Tr T_c*N_S^{j}T_c G - Tr N_S^{j} G"), m.dressed - m.bare, 1e-12));
        rows.push(CheckRow::le(format!("{tag}: operator bound N_S^{j} (neg. min eig)"), -m.min_eig, 1e-10));
    }
    let rho = gamma.conjugate(&tc);
    let nh = ops::count(sp, Tag::High).trace_product(&rho);
    let ns = ops::count(sp, Tag::Shell).trace_product(&gamma);
    rows.push(CheckRow::gt(format!("{tag}: Tr T_c*N_H T_c G > 0"), nh, 0.0));
    rows.push(CheckRow::le(format!("{tag}: N_H transport ratio (<= 2)"), nh / ns, 2.0 + 1e-12));
    let (zt, count) = parity_zero_traces(sp, &rho)?;
    rows.push(CheckRow::le(format!("{tag}: parity-odd traces ({count} words)"), zt, 1e-12));
    let mut gp = 0.0f64;
    for &k in &lay.order {
        let (_, p, _) = ops::parity_ops(sp, k)?;
        gp = gp.max(gamma.commutator(&p).max_abs());
    }
    rows.push(CheckRow::le(format!("{tag}: [G, P_k] = 0"), gp, 1e-12));
    Ok(rows)
}

/// Fitted constant C in Tr T_c*𝒩_HT_cΓ ≈ C·N‖φ_H‖₂²·Tr 𝒩_SΓ.
pub fn transport_constant(lay: &ToyLayout) -> Result<f64> {
    let tc = ops::t_c(&lay.space, &lay.order, &lay.phi(), lay.n)?;
    let gamma = dressed_gibbs(lay)?;
    let nh = ops::count(&lay.space, Tag::High).trace_product(&gamma.conjugate(&tc));
    let ns = ops::count(&lay.space, Tag::Shell).trace_product(&gamma);
    let phi = lay.phi();
    let norm: f64 = lay.high().iter().map(|&h| phi(h).powi(2)).sum();
    Ok(nh / (lay.n * norm * ns))
}

/// Weyl shift W†a₀W − a₀ − α on the sector n₀ ≤ `sector`, and the
/// Poisson statistics of W|0⟩.
pub fn weyl_checks(amplitude: f64, cap: u8, sector: u8) -> Result<Vec<CheckRow>> {
    let sp = FockSpace::new(vec![Mode::new([0, 0, 0], Tag::Condensate, cap)], cap as u32)?;
    let w = ops::weyl(&sp, amplitude)?;
    let (a, _) = ops::ladder(&sp, [0, 0, 0])?;
    let shifted = a.conjugate(&w.adjoint()).sub(&a).sub(&SparseOperator::identity(sp.dim()).scale(amplitude));
    let low = |i: usize| sp.state(i)[0] <= sector;
    let mut vac = vec![0.0; sp.dim()];
    vac[sp.index_of(&[0]).unwrap()] = 1.0;
    let psi = w.apply(&vac);
    let mean: f64 = (0..sp.dim()).map(|i| sp.state(i)[0] as f64 * psi[i] * psi[i]).sum();
    let mu = amplitude * amplitude;
    let mut pois = 0.0f64;
    let mut term = (-mu).exp();
    for n in 0..sp.dim() {
        if n > 0 {
            term *= mu / n as f64;
        }
        pois = pois.max((psi[sp.index_of(&[n as u8]).unwrap()].powi(2) - term).abs());
    }
    Ok(vec![
        CheckRow::le(format!("weyl({amplitude}): unitary"), w.unitarity_error(), 1e-8),
        CheckRow::le(format!("weyl({amplitude}): shift on n<={sector}"), shifted.max_abs_on(low), 1e-8),
        CheckRow::le(format!("weyl({amplitude}): <n> = amplitude^2"), (mean - mu).abs(), 1e-10),
        CheckRow::le(format!("weyl({amplitude}): Poisson weights"), pois, 1e-10),
    ])
}

/// Least-squares (c, s) with U†a_pU ≈ c·a_p + s·a†_{−p} on the columns
/// whose occupations are all ≤ `sector`.
pub fn extract_cs(space: &FockSpace, u: &SparseOperator, p: Idx, sector: u8) -> Result<(f64, f64, f64)> {
    let (a, _) = ops::ladder(space, p)?;
    let (_, bd) = ops::ladder(space, lattice::neg(p))?;
    let t = a.conjugate(&u.adjoint());
    let cols: Vec<usize> = (0..space.dim()).filter(|&i| space.state(i).iter().all(|&n| n <= sector)).collect();
    let (ta, tb, tt) = (t.transpose(), a.transpose(), bd.transpose());
    let dense_col = |m: &SparseOperator, j: usize| -> Vec<f64> {
        let mut v = vec![0.0; space.dim()];
        for (i, x) in m.row(j) {
            v[i] = x;
        }
        v
    };
    let (mut g11, mut g12, mut g22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut triples = Vec::new();
    for &j in &cols {
        let (y, x1, x2) = (dense_col(&ta, j), dense_col(&tb, j), dense_col(&tt, j));
        for i in 0..space.dim() {
            g11 += x1[i] * x1[i];
            g12 += x1[i] * x2[i];
            g22 += x2[i] * x2[i];
            r1 += x1[i] * y[i];
            r2 += x2[i] * y[i];
        }
        triples.push((y, x1, x2));
    }
    let det = g11 * g22 - g12 * g12;
    if det.abs() < 1e-300 {
        return Err(Error::Numerical("degenerate least-squares system".into()));
    }
    let c = (g22 * r1 - g12 * r2) / det;
    let s = (g11 * r2 - g12 * r1) / det;
    let resid = triples
        .iter()
        .flat_map(|(y, x1, x2)| (0..y.len()).map(move |i| (y[i] - c * x1[i] - s * x2[i]).abs()))
        .fold(0.0, f64::max);
    Ok((c, s, resid))
}

pub fn bogoliubov_checks(eta: f64, cap: u8) -> Result<Vec<CheckRow>> {
    let p = [1, 0, 0];
    let sp = FockSpace::new(vec![Mode::new(p, Tag::High, cap), Mode::new(lattice::neg(p), Tag::High, cap)], 2 * cap as u32)?;
    let u = ops::quadratic_bogoliubov(&sp, &[(p, eta)])?;
    let (c, s, resid) = extract_cs(&sp, &u, p, 3)?;
    Ok(vec![
        CheckRow::le(format!("bogoliubov({eta}): unitary"), u.unitarity_error(), 1e-10),
        CheckRow::le(format!("bogoliubov({eta}): c = cosh eta"), (c - eta.cosh()).abs(), 1e-7),
        CheckRow::le(format!("bogoliubov({eta}): s = sinh eta"), (s - eta.sinh()).abs(), 1e-7),
        CheckRow::le(format!("bogoliubov({eta}): conjugation residual"), resid, 1e-6),
    ])
}

/// The shell diagonalization identity on ±k, compared on the sector where
/// both occupations are ≤ `sector`.
pub fn diago_check(k: Idx, b: f64, cap: u8, sector: u8) -> Result<CheckRow> {
    let mk = lattice::neg(k);
    let sp = FockSpace::new(vec![Mode::new(k, Tag::Shell, cap), Mode::new(mk, Tag::Shell, cap)], 2 * cap as u32)?;
    let disp = layout::toy_dispersion(b);
    let p2 = lattice::p2(k);
    let (tau, _, _) = bogoliubov::shell_coeff(p2, b)?;
    let u = ops::quadratic_bogoliubov(&sp, &[(k, tau)])?;
    let ns = ops::count(&sp, Tag::Shell);
    let pair = ops::word(&sp, &[Ladder::Create(k), Ladder::Create(mk)])?;
    // Σ_{p∈S} over both p and −p doubles the pair term
    let h = ns.scale(p2 + b).add(&pair.add(&pair.transpose()).scale(b));
    let lhs = h.conjugate(&u.adjoint());
    let shells = [k, mk];
    let constant = bogoliubov::diago_constant(&shells, &disp);
    let rhs = SparseOperator::identity(sp.dim()).scale(constant).add(&ns.scale(disp.e(p2)));
    let low = |i: usize| sp.state(i).iter().all(|&n| n <= sector);
    Ok(CheckRow::le("diago identity (2-mode shell)", lhs.sub(&rhs).max_abs_on(low), 1e-6))
}

/// −T log Tr e^{−H/T} on a large-cap shell space vs the closed form.
pub fn gibbs_trace_check(energies: &[f64], t_eff: f64, cap: u8) -> Result<(f64, f64)> {
    let modes: Vec<Mode> = energies.iter().enumerate().map(|(i, _)| Mode::new([i as i32 + 1, 0, 0], Tag::Shell, cap)).collect();
    let sp = FockSpace::new(modes, cap as u32 * energies.len() as u32)?;
    let logs: Vec<f64> = (0..sp.dim())
        .map(|i| -sp.state(i).iter().zip(energies).map(|(&n, e)| n as f64 * e).sum::<f64>() / t_eff)
        .collect();
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z = par::neumaier(logs.iter().map(|l| (l - m).exp()));
    let exact = -t_eff * (m + z.ln());
    let closed = thermal::gamma0_free_energy_modes(energies, t_eff)?.log_partition;
    Ok((exact, closed))
}

/// Ξ commutes with T_c and e^{ℬ₂}; Γ_N has trace 1 and no negative
/// eigenvalue. Needs a condensate mode.
pub fn structural_checks(lay: &ToyLayout, amplitude: f64) -> Result<Vec<CheckRow>> {
    let sp = &lay.space;
    let phi = lay.phi();
    let tc = ops::t_c(sp, &lay.order, &phi, lay.n)?;
    let xi = ops::xi(sp);
    let b2 = ops::quadratic_bogoliubov(sp, &shell_eta(lay)?)?;
    let mut rows = vec![
        CheckRow::le("Xi commutes with T_c", xi.commutator(&tc).max_abs(), 1e-12),
        CheckRow::le("Xi commutes with e^B2", xi.commutator(&b2).max_abs(), 1e-12),
    ];
    let n0 = amplitude * amplitude;
    let high_eta: Vec<(Idx, f64)> = {
        let mut v: Vec<(Idx, f64)> = Vec::new();
        for h in lay.high() {
            if !v.iter().any(|(p, _)| *p == lattice::neg(h)) {
                v.push((h, (n0 * phi(h)).asinh()));
            }
        }
        v
    };
    let b1 = ops::quadratic_bogoliubov(sp, &high_eta)?;
    let w = ops::weyl(sp, amplitude)?;
    let u = w.matmul(&b1).matmul(&tc);
    let gamma = dressed_gibbs(lay)?;
    let gn = gamma.conjugate(&u);
    rows.push(CheckRow::le("Gamma_N trace = 1", (gn.trace() - 1.0).abs(), 1e-12));
    rows.push(CheckRow::le("Gamma_N PSD (neg. min eig)", -expm::min_eigenvalue(&gn), 1e-12));
    rows.push(CheckRow::le("Gamma_N hermitian", gn.hermiticity_error(), 1e-12));
    Ok(rows)
}

/// A state with one particle in a high mode and nothing in its shell
/// neighborhood; the monogamy identity must fail on it.
pub fn negative_control(lay: &ToyLayout) -> Result<CheckRow> {
    let sp = &lay.space;
    let h = lay.high()[0];
    let mut occ = vec![0u8; sp.n_modes()];
    occ[sp.require_mode(h)?] = 1;
    let i = sp.index_of(&occ).ok_or_else(|| Error::Mode("state outside space".into()))?;
    let rho = SparseOperator::from_triplets(sp.dim(), vec![(i, i, 1.0)]);
    let tc = ops::t_c(sp, &lay.order, &lay.phi(), lay.n)?;
    let rejected = matches!(monogamy_check(sp, &rho, &tc, h, false), Err(Error::Precondition(_)));
    let dev = monogamy_deviation(sp, &rho, &tc, h, false)?;
    Ok(CheckRow {
        name: format!("{}: corrupted state rejected and fails monogamy", lay.name),
        value: dev,
        tol: 1e-12,
        pass: rejected && dev > 1e-12,
    })
}

/// Full table: default layout in both orders, five seeded random layouts,
/// Weyl, Bogoliubov, diagonalization, Hamiltonian identities, Ξ and Γ_N.
pub fn fock_demo(seed: u64) -> Result<Vec<CheckRow>> {
    let def = layout::default_layout()?;
    let mut rev = def.order.clone();
    rev.reverse();
    let mut layouts = vec![def.clone(), def.with_order(rev)];
    layouts[1].name = "default(reversed)".into();
    for s in 0..5 {
        layouts.push(layout::random_layout(seed.wrapping_add(s))?);
    }
    let suites = par::map(&layouts, lemma_suite);
    let mut rows = Vec::new();
    for s in suites {
        rows.extend(s?);
    }
    rows.push(negative_control(&def)?);
    rows.extend(weyl_checks(0.5, 40, 10)?);
    rows.extend(bogoliubov_checks(0.1, 12)?);
    rows.push(diago_check([1, 0, 0], 10.0, 30, 5)?);
    rows.extend(super::hamiltonian::assembly_checks()?);
    rows.extend(structural_checks(&def, 0.5)?);
    Ok(rows)
}
