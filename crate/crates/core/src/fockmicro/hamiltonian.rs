//! The toy Hamiltonian restricted to a mode set, its Weyl-shifted form and
//! the quadratic-term identity under a high-momentum Bogoliubov map.

use super::checks::CheckRow;
use super::ops::{self, Ladder};
use super::space::{FockSpace, Mode, Tag};
use super::sparse::SparseOperator;
use crate::error::Result;
use crate::lattice::{self, Idx};
use crate::regime::RegimeParams;
use crate::scattering::{self, Potential};

/// Quartic index triples (p, q, r) with all four momenta in the set, plus
/// the number of triples dropped because q + r falls outside.
pub fn retained_quartic(space: &FockSpace) -> (Vec<(Idx, Idx, Idx)>, usize) {
    let labels: Vec<Idx> = space.modes().iter().map(|m| m.label).collect();
    let mut kept = Vec::new();
    let mut dropped = 0;
    for &p in &labels {
        for &q in &labels {
            for &s in &labels {
                let r = lattice::sub(s, p);
                if space.mode_index(lattice::add(q, r)).is_some() {
                    kept.push((p, q, r));
                } else {
                    dropped += 1;
                }
            }
        }
    }
    (kept, dropped)
}

/// (W†ℋ_NW by substitution a₀ → a₀ + √N₀, assembled right-hand side).
pub fn weyl_routes(
    space: &FockSpace,
    potential: &Potential,
    params: &RegimeParams,
    n0: f64,
) -> Result<(SparseOperator, SparseOperator)> {
    let dim = space.dim();
    let id = SparseOperator::identity(dim);
    let alpha = n0.sqrt();
    let zero = [0, 0, 0];
    let v = |r: Idx| scattering::rescaled_fourier(potential, params, r);
    let shifted = |l: Idx, create: bool| -> Result<SparseOperator> {
        let (a, ad) = ops::ladder(space, l)?;
        let op = if create { ad } else { a };
        Ok(if l == zero { op.add(&id.scale(alpha)) } else { op })
    };
    let labels: Vec<Idx> = space.modes().iter().map(|m| m.label).collect();
    let (quartic, _) = retained_quartic(space);

    let mut lhs = SparseOperator::zero(dim);
    for &p in &labels {
        lhs = lhs.axpy(lattice::p2(p), &shifted(p, true)?.matmul(&shifted(p, false)?));
    }
    for &(p, q, r) in &quartic {
        let t = shifted(lattice::add(p, r), true)?
            .matmul(&shifted(q, true)?)
            .matmul(&shifted(lattice::add(q, r), false)?)
            .matmul(&shifted(p, false)?);
        lhs = lhs.axpy(0.5 * v(r), &t);
    }

    let w = |word: &[Ladder]| ops::word(space, word);
    let v0 = v(zero);
    let mut rhs = id.scale(0.5 * n0 * n0 * v0);
    let (a0, a0d) = ops::ladder(space, zero)?;
    rhs = rhs.axpy(n0.powf(1.5) * v0, &a0.add(&a0d));
    for &p in &labels {
        let mp = lattice::neg(p);
        if space.mode_index(mp).is_some() {
            let pair = w(&[Ladder::Create(p), Ladder::Create(mp)])?;
            rhs = rhs.axpy(0.5 * n0 * v(p), &pair.add(&pair.transpose()));
        }
        let np = w(&[Ladder::Create(p), Ladder::Annihilate(p)])?;
        rhs = rhs.axpy(lattice::p2(p) + n0 * v0 + n0 * v(p), &np);
    }
    for &p in &labels {
        for &r in &labels.iter().map(|&l| lattice::neg(l)).collect::<Vec<_>>() {
            let rp = lattice::add(r, p);
            if space.mode_index(rp).is_none() {
                continue;
            }
            let c = w(&[Ladder::Create(lattice::neg(r)), Ladder::Create(rp), Ladder::Annihilate(p)])?;
            rhs = rhs.axpy(alpha * v(r), &c.add(&c.transpose()));
        }
    }
    for &(p, q, r) in &quartic {
        let t = w(&[Ladder::Create(lattice::add(p, r)), Ladder::Create(q), Ladder::Annihilate(lattice::add(q, r)), Ladder::Annihilate(p)])?;
        rhs = rhs.axpy(0.5 * v(r), &t);
    }
    Ok((lhs, rhs))
}

/// ℋ_N on the retained terms, without the shift.
pub fn hamiltonian(space: &FockSpace, potential: &Potential, params: &RegimeParams) -> Result<SparseOperator> {
    let v = |r: Idx| scattering::rescaled_fourier(potential, params, r);
    let mut h = SparseOperator::zero(space.dim());
    for m in space.modes() {
        h = h.axpy(lattice::p2(m.label), &ops::number(space, m.label)?);
    }
    for (p, q, r) in retained_quartic(space).0 {
        let t = ops::word(
            space,
            &[Ladder::Create(lattice::add(p, r)), Ladder::Create(q), Ladder::Annihilate(lattice::add(q, r)), Ladder::Annihilate(p)],
        )?;
        h = h.axpy(0.5 * v(r), &t);
    }
    Ok(h)
}

/// Q₂ = (N₀/2)Σ V̂(p)(a†_p a†_{−p} + h.c.) with `lower` giving a_p and
/// `raise` giving a†_p.
fn q2_from(
    labels: &[Idx],
    n0: f64,
    v: &dyn Fn(Idx) -> f64,
    lower: &dyn Fn(Idx) -> SparseOperator,
    raise: &dyn Fn(Idx) -> SparseOperator,
    dim: usize,
) -> SparseOperator {
    let mut q = SparseOperator::zero(dim);
    for &p in labels {
        let mp = lattice::neg(p);
        let t = raise(p).matmul(&raise(mp)).add(&lower(mp).matmul(&lower(p)));
        q = q.axpy(0.5 * n0 * v(p), &t);
    }
    q
}

#[derive(Debug, Clone, PartialEq)]
pub struct Q2Identity {
    /// Deviation with the N_p coefficient 2N₀V̂c s.
    pub corrected: f64,
    /// Deviation with the printed coefficient N₀V̂c s.
    pub printed: f64,
}

/// Substitutes a_p → c_p a_p + s_p a†_{−p} into Q₂ and compares with
/// Q₂ + N₀ΣV̂s²(a†a† + h.c.) + 2N₀ΣV̂cs𝒩_p + N₀ΣV̂cs on columns with room
/// for two creations.
pub fn q2_identity(space: &FockSpace, n0: f64, v: &dyn Fn(Idx) -> f64, s: &dyn Fn(Idx) -> f64) -> Result<Q2Identity> {
    let dim = space.dim();
    let labels: Vec<Idx> = space.modes().iter().map(|m| m.label).collect();
    let c = |p: Idx| s(p).hypot(1.0);
    let lad = |p: Idx| ops::ladder(space, p).expect("label in space");
    let b = |p: Idx| {
        let (a, _) = lad(p);
        let (_, ad) = lad(lattice::neg(p));
        a.scale(c(p)).axpy(s(p), &ad)
    };
    let bd = |p: Idx| b(p).transpose();
    let plain = |p: Idx| lad(p).0;
    let plain_d = |p: Idx| lad(p).1;
    let conj = q2_from(&labels, n0, v, &b, &bd, dim);
    let q2 = q2_from(&labels, n0, v, &plain, &plain_d, dim);
    let mut pair_part = SparseOperator::zero(dim);
    let mut num_part = SparseOperator::zero(dim);
    let mut constant = 0.0;
    for &p in &labels {
        let mp = lattice::neg(p);
        let pair = plain_d(p).matmul(&plain_d(mp));
        pair_part = pair_part.axpy(n0 * v(p) * s(p) * s(p), &pair.add(&pair.transpose()));
        num_part = num_part.axpy(n0 * v(p) * c(p) * s(p), &ops::number(space, p)?);
        constant += n0 * v(p) * c(p) * s(p);
    }
    let base = q2.add(&pair_part).add(&SparseOperator::identity(dim).scale(constant));
    let room = |j: usize| space.total(j) + 2 <= space.total_cap() && space.state(j).iter().zip(space.modes()).all(|(&n, m)| n < m.cap);
    let dev = |rhs: &SparseOperator| -> f64 {
        let d = conj.sub(rhs);
        (0..dim).flat_map(|i| d.row(i).filter(|&(j, _)| room(j)).map(|(_, x)| x.abs()).collect::<Vec<_>>()).fold(0.0, f64::max)
    };
    Ok(Q2Identity { corrected: dev(&base.axpy(2.0, &num_part)), printed: dev(&base.add(&num_part)) })
}

pub fn assembly_checks() -> Result<Vec<CheckRow>> {
    let k = [1, 0, 0];
    let mk = lattice::neg(k);
    let pot = Potential::soft_sphere(2.0, 1.0)?;
    let params = RegimeParams::synthetic(64.0, 0.52, 0.05, 1.0)?;
    let mut rows = Vec::new();

    let small = FockSpace::new(
        vec![Mode::new([0, 0, 0], Tag::Condensate, 6), Mode::new(k, Tag::Shell, 4), Mode::new(mk, Tag::Shell, 4)],
        8,
    )?;
    let (_, dropped) = retained_quartic(&small);
    let (lhs, rhs) = weyl_routes(&small, &pot, &params, 2.0)?;
    rows.push(CheckRow::le(format!("Weyl-shifted H_N = assembled Q1..Q4 ({dropped} terms dropped)"), lhs.max_diff(&rhs), 1e-10));
    let (lz, _) = weyl_routes(&small, &Potential::Zero, &params, 2.0)?;
    let mut kin = SparseOperator::zero(small.dim());
    for m in small.modes() {
        kin = kin.axpy(lattice::p2(m.label), &ops::number(&small, m.label)?);
    }
    rows.push(CheckRow::le("Weyl shift with V = 0 leaves the kinetic term", lz.max_diff(&kin), 1e-12));

    // true conjugation on a large condensate cap, compared on n₀ ≤ 4
    let big = FockSpace::new(
        vec![Mode::new([0, 0, 0], Tag::Condensate, 40), Mode::new(k, Tag::Shell, 3), Mode::new(mk, Tag::Shell, 3)],
        46,
    )?;
    let n0: f64 = 2.0;
    let w = ops::weyl(&big, n0.sqrt())?;
    let h = hamiltonian(&big, &pot, &params)?;
    let (_, rhs_big) = weyl_routes(&big, &pot, &params, n0)?;
    let conj = h.conjugate(&w.adjoint());
    let low = |i: usize| big.state(i)[0] <= 4;
    let scale = rhs_big.max_abs_on(low).max(1.0);
    rows.push(CheckRow::le("W*H_N W = assembled form (matrix exponential, n0<=4)", conj.sub(&rhs_big).max_abs_on(low) / scale, 1e-8));

    let p = [2, 1, 0];
    let q = [0, 3, 1];
    let hs = FockSpace::new(
        [p, lattice::neg(p), q, lattice::neg(q)].iter().map(|&l| Mode::new(l, Tag::High, 5)).collect(),
        12,
    )?;
    let v = |r: Idx| scattering::rescaled_fourier(&pot, &params, r);
    let s = |r: Idx| -0.3 / lattice::norm2_idx(r) as f64 * 5.0;
    let id = q2_identity(&hs, n0, &v, &s)?;
    rows.push(CheckRow::le("Q2 conjugation identity (N_p coefficient 2N0 V c s)", id.corrected, 1e-10));
    rows.push(CheckRow::gt("Q2 identity with printed N_p coefficient N0 V c s is off", id.printed, 1e-6));
    Ok(rows)
}
