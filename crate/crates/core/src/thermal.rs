//! Gibbs-state sums over the shell, the radial integrals behind the LHY and
//! thermal terms, the condensate-number choice, particle-number accounting
//! and the assembled free-energy upper bound.

use std::f64::consts::PI;

use crate::bogoliubov::{Dispersion, ShellCoeff};
use crate::error::{Error, Result};
use crate::lattice::{self, Idx, TWO_PI};
use crate::par;
use crate::quadrature::{self, Tolerance};
use crate::regime::RegimeParams;
use crate::scattering::ScatteringSolution;
use crate::stats;

/// 1/(exp(e/T) − 1).
pub fn bose_occupation(e: f64, t_eff: f64) -> Result<f64> {
    if !(e > 0.0) {
        return Err(Error::InvalidParameter(format!("occupation needs e > 0, got {e}")));
    }
    if !(t_eff > 0.0) {
        return Err(Error::InvalidParameter(format!("occupation needs T_eff > 0, got {t_eff}")));
    }
    Ok(1.0 / (e / t_eff).exp_m1())
}

/// ⟨N_p²⟩ = 2n² + n for a single Gibbs mode.
pub fn bose_second_moment(n: f64) -> f64 {
    2.0 * n * n + n
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalOccupations {
    pub t_eff: f64,
    pub n: Vec<f64>,
    pub n2: Vec<f64>,
}

/// Occupations of the dispersion e on the shell; T_eff = 0 gives zeros.
pub fn occupations(shell: &[Idx], disp: &Dispersion, t_eff: f64) -> Result<ThermalOccupations> {
    let n = if t_eff == 0.0 {
        vec![0.0; shell.len()]
    } else {
        shell.iter().map(|&p| bose_occupation(disp.e(lattice::p2(p)), t_eff)).collect::<Result<Vec<_>>>()?
    };
    let n2 = n.iter().map(|&x| bose_second_moment(x)).collect();
    Ok(ThermalOccupations { t_eff, n, n2 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellNumber {
    /// Σ (A/e)·n.
    pub thermal: f64,
    /// ½Σ (A/e − 1).
    pub depletion: f64,
    pub total: f64,
}

/// Tr N_SΓ for Γ = e^{B₂}Γ₀e^{−B₂}, from the shell coefficients:
/// Σ (γ² + σ²) n_p + σ_p².
pub fn shell_number(shell: &[ShellCoeff], disp: &Dispersion, t_eff: f64) -> Result<ShellNumber> {
    let pts: Vec<Idx> = shell.iter().map(|c| c.p).collect();
    let occ = occupations(&pts, disp, t_eff)?;
    let thermal = par::sum_by(shell.len(), |i| (shell[i].gamma.powi(2) + shell[i].sigma.powi(2)) * occ.n[i]);
    let depletion = par::sum_by(shell.len(), |i| shell[i].sigma.powi(2));
    Ok(ShellNumber { thermal, depletion, total: thermal + depletion })
}

/// Tr N_SΓ from the closed expressions A/e.
pub fn shell_number_formula(shell: &[Idx], disp: &Dispersion, t_eff: f64) -> Result<ShellNumber> {
    let occ = occupations(shell, disp, t_eff)?;
    let ratio = |i: usize| {
        let p2 = lattice::p2(shell[i]);
        disp.big_a(p2) / disp.e(p2)
    };
    let thermal = par::sum_by(shell.len(), |i| ratio(i) * occ.n[i]);
    // A/e − 1 = (A − e)/e = B²/(e(A + e))
    let depletion = 0.5
        * par::sum_by(shell.len(), |i| {
            let p2 = lattice::p2(shell[i]);
            let (a, e) = (disp.big_a(p2), disp.e(p2));
            disp.b * disp.b / (e * (a + e))
        });
    Ok(ShellNumber { thermal, depletion, total: thermal + depletion })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellSecondMoment {
    /// (Tr N_SΓ)².
    pub square: f64,
    /// p = q and q = −p corrections.
    pub diagonal: f64,
    /// Tr N_S²Γ.
    pub total: f64,
    /// Σ_S Tr N_p²Γ.
    pub sum_np2: f64,
}

/// Exact Tr N_S²Γ by Wick factorization of the quasi-free state Γ:
/// (Σ D_p)² + Σ_p [D_p(D_p + 1) + γ_p²σ_p²(2n_p + 1)²], D_p = Tr a_p*a_pΓ.
pub fn shell_number_second_moment(shell: &[ShellCoeff], disp: &Dispersion, t_eff: f64) -> Result<ShellSecondMoment> {
    let pts: Vec<Idx> = shell.iter().map(|c| c.p).collect();
    let occ = occupations(&pts, disp, t_eff)?;
    let d: Vec<f64> = (0..shell.len())
        .map(|i| {
            let (g, s) = (shell[i].gamma, shell[i].sigma);
            g * g * occ.n[i] + s * s * (occ.n[i] + 1.0)
        })
        .collect();
    let sum_d = par::tree_sum(&d);
    let diagonal = par::sum_by(shell.len(), |i| {
        let gs = shell[i].gamma * shell[i].sigma * (2.0 * occ.n[i] + 1.0);
        d[i] * (d[i] + 1.0) + gs * gs
    });
    let sum_np2 = par::sum_by(shell.len(), |i| 2.0 * d[i] * d[i] + d[i]);
    Ok(ShellSecondMoment { square: sum_d * sum_d, diagonal, total: sum_d * sum_d + diagonal, sum_np2 })
}

/// (1/(2π)³)·½∫_{ℝ³}[√(q⁴+16πaq²) − q² − 8πa + (8πa)²/(2q²)] dq, the
/// continuum limit of the rescaled ½Σ_S diagonalization sum.
pub fn lhy_integral(a: f64) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(Error::InvalidParameter(format!("scattering length must be >= 0, got {a}")));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    let b = 8.0 * PI * a;
    // q²·integrand = B²(s − q² + B)/(2(s + q² + B)), s = q√(q² + 2B)
    let f = |q: f64| {
        let q2 = q * q;
        let s = q * (q2 + 2.0 * b).sqrt();
        let s_minus = 2.0 * b * q2 / (s + q2);
        b * b * (s_minus + b) / (2.0 * (s + q2 + b))
    };
    let tol = Tolerance { rel: 1e-13, abs: 0.0, max_intervals: 4000 };
    let r = quadrature::integrate_to_infinity(f, 0.0, b.sqrt(), tol)?;
    Ok(0.5 * 4.0 * PI * r.value / TWO_PI.powi(3))
}

/// 512√π a^{5/2}/15.
pub fn lhy_closed_form(a: f64) -> f64 {
    512.0 * PI.sqrt() * a.powf(2.5) / 15.0
}

/// log(1 − e^{−x}) for x > 0, accurate at both ends.
pub fn log1m_exp(x: f64) -> f64 {
    if x > std::f64::consts::LN_2 {
        (-(-x).exp()).ln_1p()
    } else {
        (-(-x).exp_m1()).ln()
    }
}

/// ∫_{ℝ³} log(1 − exp(−√(q⁴ + 16πg q²))) dq, g = a/x ≥ 0.
pub fn thermal_integral(g: f64) -> Result<f64> {
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::InvalidParameter(format!("gap parameter must be finite and >= 0, got {g}")));
    }
    let c = 16.0 * PI * g;
    let energy = |q: f64| q * (q * q + c).sqrt();
    let log_term = |q: f64| {
        let e = energy(q);
        if e > 700.0 {
            0.0
        } else {
            log1m_exp(e)
        }
    };
    // e(q_max) = 700
    let qmax = ((-c + (c * c + 4.0 * 490_000.0).sqrt()) / 2.0).sqrt();
    let q0 = qmax.min(1.0);
    let tol = Tolerance { rel: 1e-12, abs: 1e-300, max_intervals: 4000 };
    // q = q0·u² near the origin smooths the q² log q behaviour
    let head = quadrature::integrate(
        |u: f64| {
            if u <= 0.0 {
                0.0
            } else {
                let q = q0 * u * u;
                q * q * log_term(q) * 2.0 * q0 * u
            }
        },
        0.0,
        1.0,
        tol,
    )?;
    let body = quadrature::integrate(|q| q * q * log_term(q), q0, qmax, tol)?;
    Ok(4.0 * PI * (head.value + body.value))
}

/// −π^{3/2}ζ(5/2), the free-gas value of the thermal integral.
pub const FREE_GAS_THERMAL: f64 = -7.469_841_051_943_262;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannGap {
    pub n: f64,
    pub sum: f64,
    pub integral: f64,
    pub gap: f64,
}

/// Lattice sum of a radial integrand over the scaled annulus
/// `inner < |q| <= outer` (q = p/N^{κ/2}), times the cell volume
/// (2π/N^{κ/2})³, against the given integral.
pub fn riemann_gap(
    n: f64,
    kappa: f64,
    (inner, outer): (f64, f64),
    f: impl Fn(f64) -> f64 + Sync + Send,
    integral: f64,
) -> RiemannGap {
    let scale = n.powf(kappa / 2.0);
    let pts = lattice::annulus(inner * scale, outer * scale);
    let h = TWO_PI / scale;
    let sum = h.powi(3) * par::sum_by(pts.len(), |i| f(lattice::p_abs(pts[i]) / scale));
    RiemannGap { n, sum, integral, gap: (sum - integral).abs() }
}

/// Gaps over an N-ladder and the fitted log-log slope of gap against N.
pub fn riemann_gap_ladder(
    ns: &[f64],
    kappa: f64,
    region: (f64, f64),
    f: impl Fn(f64) -> f64 + Sync + Send + Copy,
    integral: f64,
) -> (Vec<RiemannGap>, f64) {
    let gaps: Vec<RiemannGap> = ns.iter().map(|&n| riemann_gap(n, kappa, region, f, integral)).collect();
    let slope = if gaps.iter().all(|g| g.gap > 0.0) {
        stats::loglog_slope(ns, &gaps.iter().map(|g| g.gap).collect::<Vec<_>>())
    } else {
        f64::NEG_INFINITY
    };
    (gaps, slope)
}

#[derive(Debug, Clone, PartialEq)]
pub struct N0Choice {
    pub n0: f64,
    /// N^{3κ/2−(κ−1/2)}.
    pub slack: f64,
    /// (N − N₀)/N^{3κ/2}.
    pub depletion_ratio: f64,
    pub warning: Option<String>,
}

/// N₀ = N − Tr N_SΓ + N^{3κ/2−(κ−1/2)}.
pub fn choose_n0(params: &RegimeParams, shell_number: f64) -> Result<N0Choice> {
    let n = params.n;
    if shell_number >= n {
        return Err(Error::Regime(format!("shell number {shell_number} >= N = {n}")));
    }
    let k = params.kappa;
    let slack = n.powf(1.5 * k - (k - 0.5));
    let n0 = n - shell_number + slack;
    let warning = (n0 > n).then(|| format!("N0 = {n0} exceeds N = {n}: shell number below the slack term"));
    Ok(N0Choice { n0, slack, depletion_ratio: (n - n0) / n.powf(1.5 * k), warning })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleCount {
    /// N₀ + Tr N_SΓ.
    pub lower: f64,
    /// ½Σ_H ⟨N_p⟩, the high particles carried by the dressed N.
    pub high_half: f64,
    /// 2Σ_H N₀²φ_p²⟨N_p⟩.
    pub high_weighted: f64,
    /// Σ_{|p|>N^{κ/2+ε}} N₀²φ_p².
    pub pair_sum: f64,
    pub total: f64,
    /// (total − lower)/N^{3κ/2−ε}.
    pub slack_ratio: f64,
}

/// Tr NΓ_N = N₀ + Tr N_SΓ + ½Σ_H⟨N_p⟩ + 2Σ_H N₀²φ_p²⟨N_p⟩ + Σ_{|p|>N^{κ/2+ε}} N₀²φ_p²,
/// where ⟨N_p⟩ = Tr T_c*N_pT_cΓ on H.
pub fn total_particle_number(
    params: &RegimeParams,
    solution: &ScatteringSolution,
    n0: f64,
    shell_number: f64,
    occupation_high: impl Fn(Idx) -> f64 + Sync + Send,
) -> ParticleCount {
    let pts = &solution.points;
    let phi = &solution.phi;
    let thr_h = params.high_threshold();
    let thr_s = params.shell_outer();
    let is_high = |i: usize| lattice::p_abs(pts[i]) > thr_h;
    let high_half = 0.5 * par::sum_by(pts.len(), |i| if is_high(i) { occupation_high(pts[i]) } else { 0.0 });
    let high_weighted = 2.0
        * n0
        * n0
        * par::sum_by(pts.len(), |i| if is_high(i) { phi[i] * phi[i] * occupation_high(pts[i]) } else { 0.0 });
    let pair_sum = n0
        * n0
        * par::sum_by(pts.len(), |i| if lattice::p_abs(pts[i]) > thr_s { phi[i] * phi[i] } else { 0.0 });
    let lower = n0 + shell_number;
    let total = lower + high_half + high_weighted + pair_sum;
    let k = params.kappa;
    let slack_ratio = (total - lower) / params.n.powf(1.5 * k - params.epsilon);
    ParticleCount { lower, high_half, high_weighted, pair_sum, total, slack_ratio }
}

/// 128/(15√π).
pub fn lhy_coefficient() -> f64 {
    128.0 / (15.0 * PI.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnergyReport {
    pub rho: f64,
    pub t: f64,
    pub a: f64,
    /// 4πaρ².
    pub leading: f64,
    /// 4πaρ²·(128/(15√π))(ρa³)^{1/2}.
    pub lhy: f64,
    /// 4πaρ²·c(ρa³)^{1/2+ε}.
    pub error_allowance: f64,
    /// (T^{5/2}/(2π)³)∫log(1 − e^{−√(q⁴+16π(ρa/T)q²)})dq.
    pub thermal: f64,
    pub total: f64,
}

pub fn free_energy_upper_bound(rho: f64, t: f64, a: f64, c_eps: f64, epsilon: f64) -> Result<FreeEnergyReport> {
    if !(rho > 0.0) || !(a >= 0.0) || !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("need rho > 0, a >= 0, T >= 0 (rho={rho}, a={a}, T={t})")));
    }
    let gas = rho * a.powi(3);
    if gas >= 1.0 {
        return Err(Error::NotDilute(gas));
    }
    let leading = 4.0 * PI * a * rho * rho;
    let lhy = leading * lhy_coefficient() * gas.sqrt();
    let error_allowance = leading * c_eps * gas.powf(0.5 + epsilon);
    let thermal = if t == 0.0 { 0.0 } else { t.powf(2.5) / TWO_PI.powi(3) * thermal_integral(rho * a / t)? };
    let total = leading + lhy + error_allowance + thermal;
    Ok(FreeEnergyReport { rho, t, a, leading, lhy, error_allowance, thermal, total })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma0FreeEnergy {
    /// −T log Z = TΣ log(1 − e^{−e/T}).
    pub log_partition: f64,
    pub energy: f64,
    pub entropy: f64,
    /// energy − T·entropy.
    pub energy_entropy: f64,
}

/// Free energy of the shell Gibbs state by the log-partition function and,
/// independently, from occupations and the mode entropy
/// (1+n)log(1+n) − n log n.
pub fn gamma0_free_energy(shell: &[Idx], disp: &Dispersion, t_eff: f64) -> Result<Gamma0FreeEnergy> {
    if shell.is_empty() {
        return Err(Error::InvalidParameter("empty shell".into()));
    }
    let es: Vec<f64> = shell.iter().map(|&p| disp.e(lattice::p2(p))).collect();
    gamma0_free_energy_modes(&es, t_eff)
}

/// [`gamma0_free_energy`] for explicit mode energies.
pub fn gamma0_free_energy_modes(es: &[f64], t_eff: f64) -> Result<Gamma0FreeEnergy> {
    if t_eff == 0.0 {
        return Ok(Gamma0FreeEnergy { log_partition: 0.0, energy: 0.0, entropy: 0.0, energy_entropy: 0.0 });
    }
    let log_partition = t_eff * par::sum_by(es.len(), |i| log1m_exp(es[i] / t_eff));
    let ns = es.iter().map(|&e| bose_occupation(e, t_eff)).collect::<Result<Vec<_>>>()?;
    let energy = par::sum_by(es.len(), |i| es[i] * ns[i]);
    let entropy = par::sum_by(es.len(), |i| {
        let n = ns[i];
        let nlogn = if n > 0.0 { n * n.ln() } else { 0.0 };
        (1.0 + n) * n.ln_1p() - nlogn
    });
    Ok(Gamma0FreeEnergy { log_partition, energy, entropy, energy_entropy: energy - t_eff * entropy })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn occupation_ln2() {
        let n = bose_occupation(2f64.ln(), 1.0).unwrap();
        assert!((n - 1.0).abs() < 1e-15);
        assert!((bose_second_moment(n) - 3.0).abs() < 1e-14);
        assert!(bose_occupation(0.0, 1.0).is_err());
        let tail = bose_occupation(100.0, 1.0).unwrap();
        assert!((tail / (-100f64).exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lhy_value() {
        let v = lhy_integral(1.0).unwrap();
        assert!((v / lhy_closed_form(1.0) - 1.0).abs() < 1e-9, "{v}");
        assert!((v - 60.4998).abs() < 1e-4);
    }

    #[test]
    fn free_gas_thermal() {
        let v = thermal_integral(0.0).unwrap();
        assert!((v / FREE_GAS_THERMAL - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn one_mode_free_energy() {
        let g = gamma0_free_energy_modes(&[2f64.ln()], 1.0).unwrap();
        assert!((g.log_partition + 2f64.ln()).abs() < 1e-15);
        assert!((g.energy_entropy + 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn slack_exponent() {
        let p = RegimeParams::synthetic(1e6, 0.52, 0.05, 1.0).unwrap();
        let c = choose_n0(&p, 0.0).unwrap();
        assert!((c.slack / 1e6f64.powf(0.76) - 1.0).abs() < 1e-12);
        assert!(c.warning.is_some());
    }
}
