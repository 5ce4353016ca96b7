//! Matrix realizations of the ladder, Weyl, Bogoliubov and cubic operators.

use super::expm;
use super::space::{FockSpace, Tag};
use super::sparse::SparseOperator;
use crate::bogoliubov::Dispersion;
use crate::error::{Error, Result};
use crate::lattice::{self, Idx};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create(Idx),
    Annihilate(Idx),
}

/// Applies a word of ladder operators, rightmost first, to one basis state.
/// Returns `None` when the result leaves the truncated space or vanishes.
pub fn apply_word_state(space: &FockSpace, occ: &[u8], word: &[(usize, bool)]) -> Option<(Vec<u8>, f64)> {
    let mut v = occ.to_vec();
    let mut total: u32 = v.iter().map(|&n| n as u32).sum();
    let mut amp = 1.0;
    for &(m, create) in word.iter().rev() {
        if create {
            if v[m] >= space.modes()[m].cap || total >= space.total_cap() {
                return None;
            }
            v[m] += 1;
            total += 1;
            amp *= (v[m] as f64).sqrt();
        } else {
            if v[m] == 0 {
                return None;
            }
            amp *= (v[m] as f64).sqrt();
            v[m] -= 1;
            total -= 1;
        }
    }
    Some((v, amp))
}

fn resolve(space: &FockSpace, word: &[Ladder]) -> Result<Vec<(usize, bool)>> {
    word.iter()
        .map(|op| match *op {
            Ladder::Create(l) => space.require_mode(l).map(|m| (m, true)),
            Ladder::Annihilate(l) => space.require_mode(l).map(|m| (m, false)),
        })
        .collect()
}

/// Matrix of a product of ladder operators (written left to right, acting
/// right to left), equal to the product of the truncated factors.
pub fn word(space: &FockSpace, w: &[Ladder]) -> Result<SparseOperator> {
    let w = resolve(space, w)?;
    Ok(op_from_states(space, |occ| apply_word_state(space, occ, &w).map(|(v, a)| vec![(v, a)]).unwrap_or_default()))
}

/// Builds an operator from its action on each basis state: `f(occ)` lists
/// (image occupation, amplitude) pairs.
pub fn op_from_states<F>(space: &FockSpace, f: F) -> SparseOperator
where
    F: Fn(&[u8]) -> Vec<(Vec<u8>, f64)> + Sync + Send,
{
    let cols = par::map_range(space.dim(), |j| {
        f(space.state(j))
            .into_iter()
            .filter_map(|(v, a)| space.index_of(&v).map(|i| (i, j, a)))
            .collect::<Vec<_>>()
    });
    SparseOperator::from_triplets(space.dim(), cols.into_iter().flatten().collect())
}

pub fn diag_op(space: &FockSpace, f: impl Fn(usize) -> f64 + Sync + Send) -> SparseOperator {
    SparseOperator::diagonal(&par::map_range(space.dim(), f))
}

/// (a, a†) for one mode; a† is the transpose of a.
pub fn ladder(space: &FockSpace, label: Idx) -> Result<(SparseOperator, SparseOperator)> {
    let a = word(space, &[Ladder::Annihilate(label)])?;
    let ad = a.transpose();
    Ok((a, ad))
}

pub fn number(space: &FockSpace, label: Idx) -> Result<SparseOperator> {
    let m = space.require_mode(label)?;
    Ok(diag_op(space, |i| space.state(i)[m] as f64))
}

pub fn count(space: &FockSpace, tag: Tag) -> SparseOperator {
    diag_op(space, |i| space.count_tag(i, tag) as f64)
}

/// 𝒩_S + 𝒩_H/2.
pub fn shell_plus_half_high(space: &FockSpace) -> SparseOperator {
    diag_op(space, |i| space.count_tag(i, Tag::Shell) as f64 + 0.5 * space.count_tag(i, Tag::High) as f64)
}

/// 1{𝒩_{S^c} = 0}.
pub fn shell_support(space: &FockSpace) -> SparseOperator {
    diag_op(space, |i| if shell_only(space, i) { 1.0 } else { 0.0 })
}

pub fn shell_only(space: &FockSpace, i: usize) -> bool {
    space.state(i).iter().zip(space.modes()).all(|(&n, m)| n == 0 || m.tag == Tag::Shell)
}

/// Ξ = 1{𝒩_{(S∪H)^c} = 0}·1{𝒩_H even}.
pub fn xi(space: &FockSpace) -> SparseOperator {
    diag_op(space, |i| {
        let outside = space
            .state(i)
            .iter()
            .zip(space.modes())
            .any(|(&n, m)| n > 0 && !matches!(m.tag, Tag::Shell | Tag::High));
        if !outside && space.count_tag(i, Tag::High) % 2 == 0 {
            1.0
        } else {
            0.0
        }
    })
}

/// Smallest condensate cap C with Poisson tail P(n > C) ≤ 1e−10 for mean
/// amplitude².
pub fn weyl_required_cap(amplitude: f64) -> u32 {
    let mu = amplitude * amplitude;
    let mut term = (-mu).exp();
    let mut cdf = term;
    let mut c = 0u32;
    while 1.0 - cdf > 1e-10 && c < 100_000 {
        c += 1;
        term *= mu / c as f64;
        cdf += term;
    }
    c
}

/// W = exp(α(a₀† − a₀)).
pub fn weyl(space: &FockSpace, amplitude: f64) -> Result<SparseOperator> {
    let zero = [0, 0, 0];
    let m = space.require_mode(zero)?;
    if space.modes()[m].tag != Tag::Condensate {
        return Err(Error::Mode("mode 0 is not tagged condensate".into()));
    }
    let need = weyl_required_cap(amplitude.abs());
    let have = (space.modes()[m].cap as u32).min(space.total_cap());
    if need > have {
        return Err(Error::Truncation(format!(
            "amplitude {amplitude} needs condensate cap >= {need}, space allows {have}"
        )));
    }
    let (a, ad) = ladder(space, zero)?;
    let g = ad.sub(&a).scale(amplitude);
    Ok(expm::expm(&g)?.with_flags(false, true))
}

/// e^{ℬ} with ℬ = Σ_pairs η_p(a_p†a_{−p}† − a_p a_{−p}); each pair listed once.
pub fn quadratic_bogoliubov(space: &FockSpace, eta: &[(Idx, f64)]) -> Result<SparseOperator> {
    let g = quadratic_generator(space, eta)?;
    Ok(expm::expm(&g)?.with_flags(false, true))
}

pub fn quadratic_generator(space: &FockSpace, eta: &[(Idx, f64)]) -> Result<SparseOperator> {
    let mut g = SparseOperator::zero(space.dim());
    let mut seen = std::collections::HashSet::new();
    for &(p, e) in eta {
        let mp = lattice::neg(p);
        if p == mp {
            return Err(Error::Mode("the zero mode cannot be paired".into()));
        }
        for l in [p, mp] {
            match space.tag_of(l) {
                None => return Err(Error::Mode(format!("unpaired mode {p:?}: partner {l:?} missing"))),
                Some(Tag::Condensate) => return Err(Error::Mode("condensate mode in pair map".into())),
                _ => {}
            }
        }
        if !seen.insert(p) || !seen.insert(mp) {
            return Err(Error::Mode(format!("pair {p:?} listed twice")));
        }
        let create = word(space, &[Ladder::Create(p), Ladder::Create(mp)])?;
        g = g.axpy(e, &create).axpy(-e, &create.transpose());
    }
    Ok(g)
}

/// Γ₀ = Z⁻¹ 1{𝒩_{S^c}=0} exp(−Σ_S e_p 𝒩_p / T_eff); vacuum projector at T_eff = 0.
pub fn gibbs_gamma0(space: &FockSpace, disp: &Dispersion, t_eff: f64) -> Result<SparseOperator> {
    gibbs_gamma0_with(space, |l| disp.e(lattice::p2(l)), t_eff)
}

pub fn gibbs_gamma0_with(space: &FockSpace, energy: impl Fn(Idx) -> f64, t_eff: f64) -> Result<SparseOperator> {
    if !(t_eff >= 0.0) {
        return Err(Error::InvalidParameter(format!("T_eff must be >= 0, got {t_eff}")));
    }
    let shell: Vec<(usize, f64)> = space
        .modes()
        .iter()
        .enumerate()
        .filter(|(_, m)| m.tag == Tag::Shell)
        .map(|(i, m)| (i, energy(m.label)))
        .collect();
    if shell.is_empty() {
        return Err(Error::Mode("no shell modes".into()));
    }
    let w = par::map_range(space.dim(), |i| {
        if !shell_only(space, i) {
            return 0.0;
        }
        let e: f64 = shell.iter().map(|&(m, e)| e * space.state(i)[m] as f64).sum();
        if t_eff == 0.0 {
            if e == 0.0 { 1.0 } else { 0.0 }
        } else {
            (-e / t_eff).exp()
        }
    });
    let z = par::neumaier(w.iter().copied());
    Ok(SparseOperator::diagonal(&w.iter().map(|v| v / z).collect::<Vec<_>>()))
}

/// H_k = {r ∈ H : r + k ∈ H}.
pub fn h_k(space: &FockSpace, k: Idx) -> Vec<Idx> {
    space
        .labels_with(Tag::High)
        .into_iter()
        .filter(|&r| space.tag_of(lattice::add(r, k)) == Some(Tag::High))
        .collect()
}

fn occ_of(space: &FockSpace, occ: &[u8], label: Idx) -> u8 {
    space.mode_index(label).map_or(0, |m| occ[m])
}

/// Θ⁽¹⁾_k on an occupation vector: no existing k-connection.
pub fn theta1(space: &FockSpace, occ: &[u8], k: Idx) -> bool {
    space
        .labels_with(Tag::High)
        .into_iter()
        .all(|t| !(occ_of(space, occ, lattice::neg(t)) > 0 && occ_of(space, occ, lattice::add(t, k)) > 0))
}

/// Θ⁽²⁾_{k,r}: empty shell-neighborhoods of r and −(k+r).
pub fn theta2(space: &FockSpace, occ: &[u8], k: Idx, r: Idx) -> bool {
    let m = lattice::neg(lattice::add(k, r));
    space
        .labels_with(Tag::Shell)
        .into_iter()
        .all(|q| occ_of(space, occ, lattice::add(r, q)) + occ_of(space, occ, lattice::add(m, q)) == 0)
}

fn check_cubic_labels(space: &FockSpace, k: Idx, r: Idx) -> Result<()> {
    if space.tag_of(k) != Some(Tag::Shell) {
        return Err(Error::Mode(format!("{k:?} is not a shell mode")));
    }
    for l in [r, lattice::add(r, k)] {
        if space.tag_of(l) != Some(Tag::High) {
            return Err(Error::Mode(format!("{l:?} is not a high mode")));
        }
    }
    Ok(())
}

pub fn cutoff_theta(space: &FockSpace, k: Idx, r: Idx) -> Result<SparseOperator> {
    check_cubic_labels(space, k, r)?;
    Ok(diag_op(space, |i| {
        let s = space.state(i);
        if theta1(space, s, k) && theta2(space, s, k, r) { 1.0 } else { 0.0 }
    }))
}

#[derive(Debug, Clone)]
pub struct CubicGenerator {
    pub k: Idx,
    pub h_k: Vec<Idx>,
    pub sharp: SparseOperator,
    pub circ: SparseOperator,
    /// ℬ_k = ℬ♯ − ℬ°.
    pub b: SparseOperator,
}

fn check_high_symmetric(space: &FockSpace) -> Result<()> {
    for h in space.labels_with(Tag::High) {
        if space.tag_of(lattice::neg(h)) != Some(Tag::High) {
            return Err(Error::Mode(format!("high set not symmetric: {h:?} has no partner")));
        }
    }
    Ok(())
}

/// ℬ♯_k = Σ_{r∈H_k} N^{1/2}φ_r a†_{−r}a†_{r+k}a_kΘ_{k,r}.
pub fn cubic_generator(space: &FockSpace, k: Idx, phi: &(dyn Fn(Idx) -> f64 + Sync), n: f64) -> Result<CubicGenerator> {
    check_high_symmetric(space)?;
    let hk = h_k(space, k);
    if hk.is_empty() {
        return Err(Error::Mode(format!("H_k empty for k = {k:?}")));
    }
    let mut words = Vec::new();
    for &r in &hk {
        check_cubic_labels(space, k, r)?;
        let w = resolve(space, &[Ladder::Create(lattice::neg(r)), Ladder::Create(lattice::add(r, k)), Ladder::Annihilate(k)])?;
        words.push((r, w, n.sqrt() * phi(r)));
    }
    let sharp = op_from_states(space, |occ| {
        if !theta1(space, occ, k) {
            return vec![];
        }
        words
            .iter()
            .filter(|(r, _, c)| *c != 0.0 && theta2(space, occ, k, *r))
            .filter_map(|(_, w, c)| apply_word_state(space, occ, w).map(|(v, a)| (v, a * c)))
            .collect()
    });
    let circ = sharp.transpose();
    let b = sharp.sub(&circ);
    Ok(CubicGenerator { k, h_k: hk, sharp, circ, b })
}

/// Σ_{r∈H_k} Nφ_r(φ_r + φ_{r+k}) 𝒩_kΘ_{k,r} as a diagonal.
pub fn xk_squared_formula(space: &FockSpace, k: Idx, phi: &(dyn Fn(Idx) -> f64 + Sync), n: f64) -> Result<SparseOperator> {
    let km = space.require_mode(k)?;
    let hk = h_k(space, k);
    Ok(diag_op(space, |i| {
        let s = space.state(i);
        if s[km] == 0 || !theta1(space, s, k) {
            return 0.0;
        }
        let w: f64 = hk
            .iter()
            .filter(|&&r| theta2(space, s, k, r))
            .map(|&r| n * phi(r) * (phi(r) + phi(lattice::add(r, k))))
            .sum();
        w * s[km] as f64
    }))
}

/// Diagonal of X_k² = ℬ°ℬ♯; errors if the product is not diagonal or has
/// negative entries beyond −1e−12.
pub fn xk_squared(gen: &CubicGenerator) -> Result<Vec<f64>> {
    let x2 = gen.circ.matmul(&gen.sharp);
    let off = x2.off_diagonal_max();
    if off > 1e-12 {
        return Err(Error::Numerical(format!("B°B♯ not diagonal (off-diagonal {off:e})")));
    }
    x2.diag()
        .into_iter()
        .map(|v| {
            if v < -1e-12 {
                Err(Error::Numerical(format!("negative X_k^2 eigenvalue {v:e}")))
            } else {
                Ok(v.max(0.0))
            }
        })
        .collect()
}

/// X_k as the principal square root of the diagonal X_k².
pub fn xk_operator(gen: &CubicGenerator) -> Result<SparseOperator> {
    let x2 = xk_squared(gen)?;
    Ok(SparseOperator::diagonal(&x2.iter().map(|v| v.sqrt()).collect::<Vec<_>>()))
}

/// (cos x, sin x / x, (cos x − 1)/x²) from y = x², by series for small y.
pub fn spectral(y: f64) -> (f64, f64, f64) {
    if y < 1e-8 {
        (1.0 - y / 2.0 + y * y / 24.0, 1.0 - y / 6.0 + y * y / 120.0, -0.5 + y / 24.0 - y * y / 720.0)
    } else {
        let x = y.sqrt();
        (x.cos(), x.sin() / x, (x.cos() - 1.0) / y)
    }
}

/// T_k = cos X + ℬ♯ (sin X/X) − (sin X/X) ℬ° + ℬ♯ ((cos X − 1)/X²) ℬ°.
pub fn cubic_unitary(gen: &CubicGenerator) -> Result<SparseOperator> {
    let x2 = xk_squared(gen)?;
    let f: Vec<(f64, f64, f64)> = x2.iter().map(|&y| spectral(y)).collect();
    let cos = SparseOperator::diagonal(&f.iter().map(|v| v.0).collect::<Vec<_>>());
    let sinc = SparseOperator::diagonal(&f.iter().map(|v| v.1).collect::<Vec<_>>());
    let cm1 = SparseOperator::diagonal(&f.iter().map(|v| v.2).collect::<Vec<_>>());
    let t = cos
        .add(&gen.sharp.matmul(&sinc))
        .sub(&sinc.matmul(&gen.circ))
        .add(&gen.sharp.matmul(&cm1).matmul(&gen.circ));
    Ok(t.with_flags(false, true))
}

pub fn cubic_unitary_expm(gen: &CubicGenerator) -> Result<SparseOperator> {
    Ok(expm::expm(&gen.b)?.with_flags(false, true))
}

/// T_c = T_{k₁}T_{k₂}⋯ in the given order.
pub fn t_c(space: &FockSpace, order: &[Idx], phi: &(dyn Fn(Idx) -> f64 + Sync), n: f64) -> Result<SparseOperator> {
    let mut t = SparseOperator::identity(space.dim());
    for &k in order {
        let g = cubic_generator(space, k, phi, n)?;
        t = t.matmul(&cubic_unitary(&g)?);
    }
    Ok(t.with_flags(false, true))
}

/// 2𝕄_k on a state: 2𝒩_k + Σ_{t∈H_k} 𝒩_{−t}𝒩_{t+k}, an integer.
fn twice_m(space: &FockSpace, occ: &[u8], k: Idx, hk: &[Idx]) -> u32 {
    let conn: u32 = hk
        .iter()
        .map(|&t| occ_of(space, occ, lattice::neg(t)) as u32 * occ_of(space, occ, lattice::add(t, k)) as u32)
        .sum();
    2 * occ_of(space, occ, k) as u32 + conn
}

/// (𝕄_k, ℙ_k, ℚ_k).
pub fn parity_ops(space: &FockSpace, k: Idx) -> Result<(SparseOperator, SparseOperator, SparseOperator)> {
    if space.tag_of(k) != Some(Tag::Shell) {
        return Err(Error::Mode(format!("{k:?} is not a shell mode")));
    }
    let mk = lattice::neg(k);
    let (hk, hmk) = (h_k(space, k), h_k(space, mk));
    let m = diag_op(space, |i| 0.5 * twice_m(space, space.state(i), k, &hk) as f64);
    // 𝕄_k + 𝕄_{−k} is even iff twice it is divisible by 4
    let p = diag_op(space, |i| {
        let s = space.state(i);
        let two = twice_m(space, s, k, &hk) + twice_m(space, s, mk, &hmk);
        if two % 4 == 0 { 1.0 } else { 0.0 }
    });
    let q = SparseOperator::identity(space.dim()).sub(&p);
    Ok((m, p, q))
}

/// χ_p (or χ̃_p with `tilde`) for a high mode p.
pub fn chi(space: &FockSpace, p: Idx, tilde: bool) -> Result<SparseOperator> {
    if space.tag_of(p) != Some(Tag::High) {
        return Err(Error::Mode(format!("{p:?} is not a high mode")));
    }
    let shell = space.labels_with(Tag::Shell);
    let mp = lattice::neg(p);
    Ok(diag_op(space, |i| {
        let s = space.state(i);
        match occ_of(space, s, p) {
            0 => 1.0,
            1 => shell
                .iter()
                .filter(|&&x| occ_of(space, s, lattice::add(mp, x)) == 1)
                .filter(|&&x| {
                    tilde || shell.iter().filter(|&&y| y != x).all(|&y| occ_of(space, s, lattice::add(mp, y)) == 0)
                })
                .count() as f64,
            _ => 0.0,
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockmicro::space::Mode;

    #[test]
    fn single_mode_number_spectrum() {
        let s = FockSpace::new(vec![Mode::new([1, 0, 0], Tag::Shell, 3)], 3).unwrap();
        let (a, ad) = ladder(&s, [1, 0, 0]).unwrap();
        let n = ad.matmul(&a);
        for (k, d) in n.diag().into_iter().enumerate() {
            assert!((d - k as f64).abs() < 1e-15);
        }
        assert!(n.off_diagonal_max() == 0.0);
        let comm = a.matmul(&ad).sub(&n);
        for i in 0..3 {
            assert!((comm.get(i, i) - 1.0).abs() < 1e-15);
        }
        assert!(a.apply(&[1.0, 0.0, 0.0, 0.0]).iter().all(|&v| v == 0.0));
    }
}
