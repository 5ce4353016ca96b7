//! Dirichlet window q_{L,ℓ}, its integral-preservation identity and the
//! density bookkeeping for patching small periodic boxes.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::fockmicro::CheckRow;
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub l: f64,
    pub ell: f64,
    pub r: f64,
}

impl WindowSpec {
    /// Requires 0 < R < ℓ < L and 2ℓ ≤ L.
    pub fn new(l: f64, ell: f64, r: f64) -> Result<Self> {
        if !(0.0 < r && r < ell && ell < l) {
            return Err(Error::InvalidParameter(format!("need 0 < R < ell < L, got R={r}, ell={ell}, L={l}")));
        }
        if 2.0 * ell > l {
            return Err(Error::InvalidParameter(format!("ramps overlap: 2*ell = {} > L = {l}", 2.0 * ell)));
        }
        Ok(WindowSpec { l, ell, r })
    }

    pub fn support(&self) -> (f64, f64) {
        let h = 0.5 * self.l + self.ell;
        (-h, h)
    }
}

/// q_{L,ℓ}(t), evaluated through |t| so that q(t) = q(−t) exactly.
pub fn window_value(t: f64, spec: &WindowSpec) -> f64 {
    let (l, ell) = (spec.l, spec.ell);
    let a = t.abs();
    let inner = 0.5 * l - ell;
    if a <= inner {
        1.0
    } else if a < 0.5 * l + ell {
        // clamped so rounding at the seams cannot leave a hole
        (PI * (a - inner) / (4.0 * ell)).min(FRAC_PI_2).cos()
    } else {
        0.0
    }
}

/// max |q(t)² + q(t+L)² − 1| over `samples` points of [−L/2−ℓ, −L/2+ℓ].
pub fn partition_gap(spec: &WindowSpec, samples: usize) -> f64 {
    let lo = -0.5 * spec.l - spec.ell;
    let n = samples.max(2);
    (0..n)
        .map(|i| {
            let t = lo + 2.0 * spec.ell * i as f64 / (n - 1) as f64;
            (window_value(t, spec).powi(2) + window_value(t + spec.l, spec).powi(2) - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// ∫q² from the exact antiderivative t/2 + sin(2(ωt + φ))/(4ω) on each ramp.
pub fn window_sq_integral(spec: &WindowSpec) -> f64 {
    let w = PI / (4.0 * spec.ell);
    // ramp phase runs from −π/2 to 0 over a length of 2ℓ
    let anti = |theta: f64| theta / (2.0 * w) + (2.0 * theta).sin() / (4.0 * w);
    let ramp = anti(0.0) - anti(-FRAC_PI_2);
    2.0 * ramp + (spec.l - 2.0 * spec.ell)
}

/// Φ(t) = a₀ + Σ_n aₙcos(2πnt/L) + bₙsin(2πnt/L).
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    pub l: f64,
    pub a0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl TrigPoly {
    pub fn random(l: f64, degree: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || rng.random_range(-1.0..1.0);
        let a0 = draw();
        let a = (0..degree).map(|_| draw()).collect();
        let b = (0..degree).map(|_| draw()).collect();
        TrigPoly { l, a0, a, b }
    }

    pub fn degree(&self) -> usize {
        self.a.len()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let w = 2.0 * PI * t / self.l;
        self.a0
            + self
                .a
                .iter()
                .zip(&self.b)
                .enumerate()
                .map(|(n, (a, b))| {
                    let x = (n + 1) as f64 * w;
                    a * x.cos() + b * x.sin()
                })
                .sum::<f64>()
    }

    /// Trigonometric interpolant of `samples` taken at t_j = −L/2 + jL/n.
    pub fn from_samples(l: f64, samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::InvalidParameter("need at least two samples".into()));
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        // undo the −L/2 origin shift: t_j = −L/2 + jL/n picks up (−1)^m
        let coef = |m: usize| buf[m] / n as f64 * if m % 2 == 0 { 1.0 } else { -1.0 };
        let degree = (n - 1) / 2;
        let (mut a, mut b) = (Vec::with_capacity(degree), Vec::with_capacity(degree));
        for m in 1..=degree {
            let c = coef(m);
            a.push(2.0 * c.re);
            b.push(-2.0 * c.im);
        }
        Ok(TrigPoly { l, a0: coef(0).re, a, b })
    }

    /// ∫_{−L/2}^{L/2} Φ = a₀L.
    pub fn period_integral(&self) -> f64 {
        self.a0 * self.l
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralCheck {
    /// ∫_{−L/2−ℓ}^{L/2+ℓ} Φq².
    pub windowed: f64,
    /// ∫_{−L/2}^{L/2} Φ.
    pub period: f64,
    pub gap: f64,
}

const GL_NODES: usize = 20;

fn panels_for(len: f64, wavelength: f64) -> usize {
    ((4.0 * len / wavelength).ceil() as usize).max(4)
}

/// Compares the windowed integral of an L-periodic Φ with its period
/// integral; `period` overrides the quadrature of the right-hand side
/// (exact for trigonometric polynomials). `degree` sets the panel count.
pub fn periodic_integral_check(phi: &dyn Fn(f64) -> f64, period: Option<f64>, degree: usize, spec: &WindowSpec) -> IntegralCheck {
    let rule = quadrature::gauss_legendre(GL_NODES);
    let (l, ell) = (spec.l, spec.ell);
    let wavelength = l / degree.max(1) as f64;
    let f = |t: f64| phi(t) * window_value(t, spec).powi(2);
    let pieces = [(-0.5 * l - ell, -0.5 * l + ell), (-0.5 * l + ell, 0.5 * l - ell), (0.5 * l - ell, 0.5 * l + ell)];
    let windowed: f64 = pieces
        .iter()
        .filter(|(a, b)| b > a)
        .map(|&(a, b)| {
            let wl = wavelength.min(8.0 * ell);
            quadrature::composite_gl(f, a, b, &rule, panels_for(b - a, wl))
        })
        .sum();
    let period = period.unwrap_or_else(|| quadrature::composite_gl(phi, -0.5 * l, 0.5 * l, &rule, panels_for(l, wavelength)));
    IntegralCheck { windowed, period, gap: (windowed - period).abs() }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dilution {
    /// ρ̃ = Tr𝒩/(L + 2ℓ + R)³.
    pub rho_tilde: f64,
    /// cρ̃/(Lℓ).
    pub overhead: f64,
}

pub fn dilution_bookkeeping(tr_n: f64, spec: &WindowSpec, c: f64) -> Result<Dilution> {
    if !(tr_n >= 0.0) {
        return Err(Error::InvalidParameter(format!("Tr N must be >= 0, got {tr_n}")));
    }
    let side = spec.l + 2.0 * spec.ell + spec.r;
    let rho_tilde = tr_n / side.powi(3);
    Ok(Dilution { rho_tilde, overhead: c * rho_tilde / (spec.l * spec.ell) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainPoint {
    pub rho: f64,
    pub l: f64,
    pub ell: f64,
    pub rho_tilde: f64,
    /// overhead / 4πaρ².
    pub overhead_ratio: f64,
}

/// The density chain with L = ρ^{−γ}, ℓ = L^α and Tr𝒩 = (ρ + c₁ρ^{(γ+2)/2})L³.
pub fn theorem_chain(rho: f64, gamma: f64, alpha: f64, c1: f64, r: f64, a: f64, c: f64) -> Result<ChainPoint> {
    let l = rho.powf(-gamma);
    let ell = l.powf(alpha);
    let spec = WindowSpec::new(l, ell, r)?;
    let tr_n = (rho + c1 * rho.powf(0.5 * (gamma + 2.0))) * l.powi(3);
    let d = dilution_bookkeeping(tr_n, &spec, c)?;
    Ok(ChainPoint { rho, l, ell, rho_tilde: d.rho_tilde, overhead_ratio: d.overhead / (4.0 * PI * a * rho * rho) })
}

/// γ + αγ − 1, the exponent of the overhead relative to 4πaρ².
pub fn overhead_exponent(gamma: f64, alpha: f64) -> f64 {
    gamma + alpha * gamma - 1.0
}

/// Largest window gap over `seeds` random trigonometric polynomials.
pub fn random_trig_gap(spec: &WindowSpec, degree: usize, seeds: std::ops::Range<u64>) -> f64 {
    seeds
        .map(|s| {
            let p = TrigPoly::random(spec.l, degree, s);
            periodic_integral_check(&|t| p.eval(t), Some(p.period_integral()), degree, spec).gap
        })
        .fold(0.0, f64::max)
}

/// The table emitted by `localize`.
pub fn localize_checks(c: f64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let specs = [WindowSpec::new(10.0, 2.0, 0.5)?, WindowSpec::new(7.3, 3.65, 1.0)?, WindowSpec::new(100.0, 10.0, 1.0)?];
    let part = specs.iter().map(|s| partition_gap(s, 4001)).fold(0.0, f64::max);
    rows.push(CheckRow::le("window partition q(t)^2 + q(t+L)^2 = 1", part, 1e-10));
    let sym = specs
        .iter()
        .flat_map(|s| (0..2001).map(move |i| (s, -s.support().1 + 2.0 * s.support().1 * i as f64 / 2000.0)))
        .map(|(s, t)| (window_value(t, s) - window_value(-t, s)).abs())
        .fold(0.0, f64::max);
    rows.push(CheckRow::le("window symmetry q(t) = q(-t)", sym, 0.0));
    let sq = specs.iter().map(|s| (window_sq_integral(s) - s.l).abs() / s.l).fold(0.0, f64::max);
    rows.push(CheckRow::le("integral of q^2 equals L (closed form)", sq, 1e-12));
    for degree in [1, 10, 20] {
        let gap = specs.iter().map(|s| random_trig_gap(s, degree, 0..5)).fold(0.0, f64::max);
        rows.push(CheckRow::le(format!("windowed integral of periodic phi, degree {degree}, 5 seeds"), gap, 1e-10));
    }
    let s = &specs[0];
    let samples: Vec<f64> = (0..64).map(|j| (-0.5 * s.l + j as f64 * s.l / 64.0).sin().exp()).collect();
    let table = TrigPoly::from_samples(s.l, &samples)?;
    let chk = periodic_integral_check(&|t| table.eval(t), None, table.degree(), s);
    rows.push(CheckRow::le("windowed integral of a sampled periodic table", chk.gap, 1e-10));

    // density chain with ℓ = L^{1/2−η}
    let (gamma, alpha, c1, r, a) = (1.2, 0.3, 1.0, 1.0, 1.0);
    let ladder: Vec<ChainPoint> = (4..=9).map(|e| theorem_chain(10f64.powi(-e), gamma, alpha, c1, r, a, c)).collect::<Result<_>>()?;
    let deficit = ladder.iter().map(|p| (p.rho - p.rho_tilde) / p.rho).fold(f64::NEG_INFINITY, f64::max);
    rows.push(CheckRow::le("diluted density rho~ >= rho on the rho ladder (relative deficit)", deficit, 0.0));
    let (xs, ys): (Vec<f64>, Vec<f64>) = ladder.iter().map(|p| (p.rho, p.overhead_ratio)).unzip();
    let slope = crate::stats::loglog_slope(&xs, &ys);
    rows.push(CheckRow::le(
        format!("overhead / leading exponent vs gamma + alpha*gamma - 1 = {:.3}", overhead_exponent(gamma, alpha)),
        (slope - overhead_exponent(gamma, alpha)).abs(),
        0.05,
    ));
    let decays = ladder.windows(2).all(|w| w[1].overhead_ratio < w[0].overhead_ratio);
    rows.push(CheckRow::le("overhead / leading decreases as rho -> 0", if decays { 0.0 } else { 1.0 }, 0.0));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_and_centre() {
        let s = WindowSpec::new(10.0, 2.0, 0.5).unwrap();
        assert_eq!(window_value(0.0, &s), 1.0);
        assert!(window_value(-7.0, &s).abs() < 1e-15);
        assert!(window_value(7.0, &s).abs() < 1e-15);
        assert_eq!(window_value(8.0, &s), 0.0);
        assert!((window_sq_integral(&s) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn sample_table_reproduces_polynomial() {
        let p = TrigPoly::random(3.0, 6, 1);
        let samples: Vec<f64> = (0..16).map(|j| p.eval(-1.5 + 3.0 * j as f64 / 16.0)).collect();
        let q = TrigPoly::from_samples(3.0, &samples).unwrap();
        for t in [-1.2, 0.1, 0.77] {
            assert!((p.eval(t) - q.eval(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(WindowSpec::new(10.0, 2.0, 3.0).is_err());
        assert!(WindowSpec::new(10.0, 6.0, 1.0).is_err());
    }
}
