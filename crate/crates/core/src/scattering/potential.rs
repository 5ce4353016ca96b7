use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::regime::RegimeParams;

type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A nonnegative, radial, compactly supported pair potential.
#[derive(Clone)]
pub enum Potential {
    Zero,
    SoftSphere { v0: f64, r: f64 },
    Radial { profile: Profile, r: f64, label: String },
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spec())
    }
}

impl Potential {
    pub fn soft_sphere(v0: f64, r: f64) -> Result<Self> {
        if !(v0 >= 0.0 && v0.is_finite()) || !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("soft sphere needs V0 >= 0 and R > 0, got V0={v0}, R={r}")));
        }
        if v0 == 0.0 {
            return Ok(Potential::Zero);
        }
        Ok(Potential::SoftSphere { v0, r })
    }

    /// A general radial profile on `[0, r]`. Sampled on a grid to reject
    /// negative or non-finite values (a bounded profile is square integrable).
    pub fn radial(profile: impl Fn(f64) -> f64 + Send + Sync + 'static, r: f64, label: &str) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("support radius must be positive, got {r}")));
        }
        for i in 0..=2000 {
            let x = r * i as f64 / 2000.0;
            let v = profile(x);
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("profile not finite at r={x}; V must be in L^2")));
            }
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!("profile negative at r={x}")));
            }
        }
        Ok(Potential::Radial { profile: Arc::new(profile), r, label: label.to_string() })
    }

    /// Parses `soft-sphere:V0=<f>,R=<f>` or `zero`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "zero" {
            return Ok(Potential::Zero);
        }
        let rest = spec
            .strip_prefix("soft-sphere:")
            .ok_or_else(|| Error::Parse(format!("unknown potential spec '{spec}'")))?;
        let (mut v0, mut r) = (None, None);
        for kv in rest.split(',') {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in '{kv}'")))?;
            let x: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("bad number '{v}'")))?;
            match k.trim() {
                "V0" => v0 = Some(x),
                "R" => r = Some(x),
                other => return Err(Error::Parse(format!("unknown soft-sphere key '{other}'"))),
            }
        }
        match (v0, r) {
            (Some(v0), Some(r)) => Self::soft_sphere(v0, r),
            _ => Err(Error::Parse(format!("soft-sphere spec needs V0 and R: '{spec}'"))),
        }
    }

    pub fn spec(&self) -> String {
        match self {
            Potential::Zero => "zero".into(),
            Potential::SoftSphere { v0, r } => format!("soft-sphere:V0={v0:?},R={r:?}"),
            Potential::Radial { label, r, .. } => format!("radial:{label},R={r:?}"),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Potential::Zero)
    }

    pub fn range(&self) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::SoftSphere { r, .. } | Potential::Radial { r, .. } => *r,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::SoftSphere { v0, r } => {
                if x <= *r {
                    *v0
                } else {
                    0.0
                }
            }
            Potential::Radial { profile, r, .. } => {
                if x <= *r {
                    profile(x)
                } else {
                    0.0
                }
            }
        }
    }

    /// V̂(k) = ∫V(x)e^{−ik·x}dx at |k| = k.
    pub fn fourier(&self, k: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::SoftSphere { v0, r } => {
                let x = k * r;
                if x < 1e-2 {
                    let x2 = x * x;
                    4.0 * PI / 3.0 * v0 * r.powi(3) * (1.0 - x2 / 10.0 + x2 * x2 / 280.0 - x2 * x2 * x2 / 15120.0)
                } else {
                    4.0 * PI * v0 * (x.sin() - x * x.cos()) / k.powi(3)
                }
            }
            Potential::Radial { profile, r, .. } => {
                let tol = Tolerance { rel: 1e-12, abs: 1e-15, max_intervals: 2000 };
                let res = if k * r < 1e-8 {
                    quadrature::integrate(|x| x * x * profile(x), 0.0, *r, tol)
                } else {
                    quadrature::integrate(|x| x * profile(x) * (k * x).sin() / k, 0.0, *r, tol)
                };
                4.0 * PI * res.map(|q| q.value).unwrap_or(f64::NAN)
            }
        }
    }

    /// Radial envelope |V̂(k)| <= env(k), where one is known.
    pub fn fourier_envelope(&self, k: f64) -> Option<f64> {
        match self {
            Potential::Zero => Some(0.0),
            Potential::SoftSphere { v0, r } => Some(4.0 * PI * v0 * (1.0 + k * r) / k.powi(3)),
            Potential::Radial { .. } => None,
        }
    }

    /// ∫_{k0}^∞ env(k) dk.
    pub fn envelope_tail_integral(&self, k0: f64) -> Option<f64> {
        match self {
            Potential::Zero => Some(0.0),
            Potential::SoftSphere { v0, r } => Some(4.0 * PI * v0 * (0.5 / (k0 * k0) + r / k0)),
            Potential::Radial { .. } => None,
        }
    }

    /// V̂(0) = ∫V.
    pub fn integral(&self) -> f64 {
        self.fourier(0.0)
    }

    /// V̂_N(p) = N^{−1+κ}·V̂(|p|/N^{1−κ}).
    pub fn rescaled_fourier(&self, params: &RegimeParams, p_abs: f64) -> f64 {
        self.fourier(p_abs / params.l) / params.l
    }
}

/// Full-space scattering length a of −Δ + ½V.
pub fn full_space_scattering_length(potential: &Potential) -> Result<f64> {
    match potential {
        Potential::Zero => Ok(0.0),
        Potential::SoftSphere { v0, r } => {
            let k0 = (v0 / 2.0).sqrt();
            Ok(r - (k0 * r).tanh() / k0)
        }
        Potential::Radial { .. } => ode_scattering_length(potential, 20_000),
    }
}

/// Integrates −u″ + ½V u = 0 with u(0)=0, u′(0)=1 by classical RK4 up to the
/// support radius and reads a from u(r) ∝ r − a beyond it.
pub fn ode_scattering_length(potential: &Potential, steps: usize) -> Result<f64> {
    let r = potential.range();
    if r == 0.0 {
        return Ok(0.0);
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("ODE needs at least one step".into()));
    }
    let h = r / steps as f64;
    let f = |x: f64, u: f64, v: f64| (v, 0.5 * potential.value(x.min(r)) * u);
    let (mut u, mut v) = (0.0f64, 1.0f64);
    for i in 0..steps {
        let x = i as f64 * h;
        // stay inside the closed support so the step at x = R sees V(R)
        let xm = (x + 0.5 * h).min(r);
        let xe = (x + h).min(r);
        let (k1u, k1v) = f(x, u, v);
        let (k2u, k2v) = f(xm, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        let (k3u, k3v) = f(xm, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        let (k4u, k4v) = f(xe, u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    if !(v > 0.0) {
        return Err(Error::Numerical(format!("u'(R) = {v} is not positive")));
    }
    Ok(r - u / v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_sphere_zero_mode() {
        let v = Potential::soft_sphere(2.0, 1.0).unwrap();
        assert!((v.integral() - 8.0 * PI / 3.0).abs() < 1e-14);
        // series and closed form agree across the switch
        let a = v.fourier(0.999e-2);
        let b = v.fourier(1.001e-2);
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn parse_round_trip() {
        let v = Potential::parse("soft-sphere:V0=2,R=1").unwrap();
        let w = Potential::parse(&v.spec()).unwrap();
        assert_eq!(v.spec(), w.spec());
        assert!(Potential::parse("hard-core:R=1").is_err());
        assert!(Potential::parse("soft-sphere:V0=2").is_err());
    }

    #[test]
    fn analytic_value() {
        let v = Potential::soft_sphere(2.0, 1.0).unwrap();
        let a = full_space_scattering_length(&v).unwrap();
        assert!((a - (1.0 - 1f64.tanh())).abs() < 1e-15);
        assert!((a - 0.238406).abs() < 1e-6);
    }

    #[test]
    fn radial_fourier_matches_soft_sphere() {
        let s = Potential::soft_sphere(2.0, 1.0).unwrap();
        let g = Potential::radial(|_| 2.0, 1.0, "flat").unwrap();
        for k in [0.0, 0.3, 1.0, 4.0, 17.0] {
            assert!((s.fourier(k) - g.fourier(k)).abs() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn negative_profile_rejected() {
        assert!(Potential::radial(|x| x - 0.5, 1.0, "bad").is_err());
    }
}
