//! Run configuration and the four pipelines behind the `lhy` binary.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bogoliubov::{self as bg, Dispersion};
use crate::error::{Error, Result};
use crate::fockmicro::{self, CheckRow};
use crate::lattice;
use crate::localization;
use crate::par;
use crate::regime::{self, RegimeParams};
use crate::scattering::{self, Potential};
use crate::stats;
use crate::thermal::{self, FreeEnergyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Scattering,
    FreeEnergy,
    Verify,
    FockDemo,
    Localize,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Scattering => "scattering",
            Command::FreeEnergy => "free-energy",
            Command::Verify => "verify",
            Command::FockDemo => "fock-demo",
            Command::Localize => "localize",
        }
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Command::Scattering, Command::FreeEnergy, Command::Verify, Command::FockDemo, Command::Localize]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown command '{s}'")))
    }
}

/// Scattering length used in shell quantities: the full-space a or the box
/// a_N of the same truncated solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaSource {
    Full,
    Box,
}

impl FromStr for AlphaSource {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(AlphaSource::Full),
            "box" => Ok(AlphaSource::Box),
            _ => Err(Error::Parse(format!("alpha-source must be full or box, got '{s}'"))),
        }
    }
}

impl AlphaSource {
    pub fn name(self) -> &'static str {
        match self {
            AlphaSource::Full => "full",
            AlphaSource::Box => "box",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub potential: String,
    pub rho: Vec<f64>,
    pub gamma: f64,
    pub epsilon: f64,
    pub temp_ratio: Vec<f64>,
    /// Momentum cap of the scattering solve in units of L = N^{1−κ}.
    pub cap_factor: f64,
    pub tol: f64,
    pub seed: u64,
    pub alpha_source: AlphaSource,
    pub out: Option<PathBuf>,
    pub c_eps: f64,
    /// N values of the scattering ladder.
    pub n_ladder: Vec<f64>,
    /// N values of the renormalized-constant ladder.
    pub renorm_ladder: Vec<f64>,
    /// cap_factor used for the renormalized-constant ladder.
    pub renorm_cap_factor: f64,
    /// Constant c of the localization overhead cρ̃/(Lℓ).
    pub c_window: f64,
    pub dump_ops: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Verify,
            potential: "soft-sphere:V0=2,R=1".into(),
            rho: vec![1e-4],
            gamma: regime::gamma_of_kappa(0.52),
            epsilon: 0.1,
            temp_ratio: vec![1.0],
            cap_factor: 4.0,
            tol: 1e-10,
            seed: 7,
            alpha_source: AlphaSource::Box,
            out: None,
            c_eps: 1.0,
            n_ladder: vec![100.0, 300.0, 1000.0, 3000.0],
            renorm_ladder: vec![1000.0, 2000.0, 4000.0, 8000.0, 16000.0],
            renorm_cap_factor: 1.0,
            c_window: 1.0,
            dump_ops: None,
        }
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim().parse().map_err(|_| Error::Parse(format!("{key}: bad number '{v}'")))
}

pub fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let xs = v.split(',').map(|s| parse_f64(key, s)).collect::<Result<Vec<_>>>()?;
    if xs.is_empty() {
        return Err(Error::Parse(format!("{key}: empty list")));
    }
    Ok(xs)
}

impl RunConfig {
    /// Flat `key = value` text, one key per line.
    pub fn to_kv(&self) -> String {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command.name());
        let _ = writeln!(s, "potential = {}", self.potential);
        let _ = writeln!(s, "rho = {}", list(&self.rho));
        let _ = writeln!(s, "gamma = {:?}", self.gamma);
        let _ = writeln!(s, "epsilon = {:?}", self.epsilon);
        let _ = writeln!(s, "temp-ratio = {}", list(&self.temp_ratio));
        let _ = writeln!(s, "cap-factor = {:?}", self.cap_factor);
        let _ = writeln!(s, "tol = {:?}", self.tol);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "alpha-source = {}", self.alpha_source.name());
        let _ = writeln!(s, "out = {}", path(&self.out));
        let _ = writeln!(s, "c-eps = {:?}", self.c_eps);
        let _ = writeln!(s, "n-ladder = {}", list(&self.n_ladder));
        let _ = writeln!(s, "renorm-ladder = {}", list(&self.renorm_ladder));
        let _ = writeln!(s, "renorm-cap-factor = {:?}", self.renorm_cap_factor);
        let _ = writeln!(s, "c-window = {:?}", self.c_window);
        let _ = writeln!(s, "dump-ops = {}", path(&self.dump_ops));
        s
    }

    /// Sets one key; keys are the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let path = |v: &str| (!v.is_empty()).then(|| PathBuf::from(v));
        match key.trim() {
            "command" => self.command = value.parse()?,
            "potential" => self.potential = value.to_string(),
            "rho" => self.rho = parse_list(key, value)?,
            "gamma" => self.gamma = parse_f64(key, value)?,
            "epsilon" => self.epsilon = parse_f64(key, value)?,
            "temp-ratio" => self.temp_ratio = parse_list(key, value)?,
            "cap-factor" => self.cap_factor = parse_f64(key, value)?,
            "tol" => self.tol = parse_f64(key, value)?,
            "seed" => self.seed = value.parse().map_err(|_| Error::Parse(format!("seed: bad integer '{value}'")))?,
            "alpha-source" => self.alpha_source = value.parse()?,
            "out" => self.out = path(value),
            "c-eps" => self.c_eps = parse_f64(key, value)?,
            "n-ladder" => self.n_ladder = parse_list(key, value)?,
            "renorm-ladder" => self.renorm_ladder = parse_list(key, value)?,
            "renorm-cap-factor" => self.renorm_cap_factor = parse_f64(key, value)?,
            "c-window" => self.c_window = parse_f64(key, value)?,
            "dump-ops" => self.dump_ops = path(value),
            other => return Err(Error::Parse(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file on top of `self`; `#` starts a comment.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        c.apply_kv(text)?;
        Ok(c)
    }

    pub fn potential(&self) -> Result<Potential> {
        Potential::parse(&self.potential)
    }

    pub fn kappa(&self) -> f64 {
        regime::kappa_of_gamma(self.gamma)
    }
}

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::InvalidParameter(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let res = (|| -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    res.map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderRow {
    pub n: f64,
    pub l: f64,
    pub cap: f64,
    pub points: usize,
    pub a_n: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringLadder {
    pub a: f64,
    pub rows: Vec<LadderRow>,
    /// Fitted slope of log|a_N − a| against log N.
    pub slope: f64,
}

/// a_N over an N-ladder at fixed κ, with cap = cap_factor·N^{1−κ}.
pub fn scattering_ladder(pot: &Potential, kappa: f64, epsilon: f64, ns: &[f64], cap_factor: f64, tol: f64) -> Result<ScatteringLadder> {
    let a = scattering::full_space_scattering_length(pot)?;
    let rows = ns
        .iter()
        .map(|&n| {
            let p = RegimeParams::synthetic(n, kappa, epsilon, 0.0)?;
            let cap = cap_factor * p.l;
            let sol = scattering::solve_box_scattering(pot, &p, cap, tol)?;
            Ok(LadderRow { n, l: p.l, cap, points: sol.points.len(), a_n: sol.a_n, iterations: sol.iterations, residual: sol.residual })
        })
        .collect::<Result<Vec<_>>>()?;
    let gaps: Vec<f64> = rows.iter().map(|r| (r.a_n - a).abs()).collect();
    let slope = if rows.len() >= 2 && gaps.iter().all(|&g| g > 0.0) { stats::loglog_slope(ns, &gaps) } else { f64::NAN };
    Ok(ScatteringLadder { a, rows, slope })
}

pub fn scattering_csv(l: &ScatteringLadder) -> String {
    let mut s = String::from("N,L,cap,points,a_N,a_N_minus_a,iterations,residual\n");
    for r in &l.rows {
        let _ = writeln!(s, "{:?},{:?},{:?},{},{:?},{:?},{},{:?}", r.n, r.l, r.cap, r.points, r.a_n, r.a_n - l.a, r.iterations, r.residual);
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormRow {
    pub n: f64,
    pub a_used: f64,
    pub direct: f64,
    pub closed: f64,
    /// (direct − closed)/N^{5κ/2}.
    pub rel_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenormLadder {
    pub rows: Vec<RenormRow>,
    pub slope: f64,
    pub monotone: bool,
}

/// Direct vs closed renormalized constant over an N-ladder.
pub fn renorm_ladder(
    pot: &Potential,
    kappa: f64,
    epsilon: f64,
    temp_ratio: f64,
    ns: &[f64],
    cap_factor: f64,
    tol: f64,
    source: AlphaSource,
) -> Result<RenormLadder> {
    let a_full = scattering::full_space_scattering_length(pot)?;
    let rows = ns
        .iter()
        .map(|&n| {
            let p0 = RegimeParams::synthetic(n, kappa, epsilon, temp_ratio)?;
            let sol = scattering::solve_box_scattering(pot, &p0, cap_factor * p0.l, tol)?;
            let a_used = match source {
                AlphaSource::Full => a_full,
                AlphaSource::Box => sol.a_n,
            };
            let p = p0.with_scattering_length(a_used);
            let shell = lattice::annulus(p.shell_inner(), p.shell_outer());
            let disp = Dispersion::new(a_used, &p);
            let coeffs = bg::shell_branch(a_used, &p, &shell)?;
            let sn = thermal::shell_number(&coeffs, &disp, p.t_eff)?;
            let n0 = thermal::choose_n0(&p, sn.total)?.n0;
            let direct = bg::renormalized_constant_direct(&sol, pot, n0, &p).total;
            let closed = bg::renormalized_constant_closed(a_used, n0, &p, &shell).total;
            Ok(RenormRow { n, a_used, direct, closed, rel_gap: (direct - closed).abs() / n.powf(2.5 * kappa) })
        })
        .collect::<Result<Vec<_>>>()?;
    let gaps: Vec<f64> = rows.iter().map(|r| r.rel_gap).collect();
    let slope = if gaps.iter().all(|&g| g > 0.0) && gaps.len() >= 2 { stats::loglog_slope(ns, &gaps) } else { f64::NAN };
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    Ok(RenormLadder { rows, slope, monotone })
}

/// One row per (ρ, temp_ratio), T = temp_ratio·ρ·a. Always uses the
/// full-space a: a box solve at physical ρ would need N = ρ^{1−3γ} modes.
pub fn free_energy_table(cfg: &RunConfig) -> Result<Vec<FreeEnergyReport>> {
    let a = scattering::full_space_scattering_length(&cfg.potential()?)?;
    let grid: Vec<(f64, f64)> = cfg.rho.iter().flat_map(|&r| cfg.temp_ratio.iter().map(move |&t| (r, t))).collect();
    for &(rho, tr) in &grid {
        if !(tr >= 0.0) {
            return Err(Error::InvalidParameter(format!("temp-ratio must be >= 0, got {tr}")));
        }
        RegimeParams::derive(rho, cfg.gamma, cfg.epsilon, tr)?;
    }
    par::map(&grid, |&(rho, tr)| thermal::free_energy_upper_bound(rho, tr * rho * a, a, cfg.c_eps, cfg.epsilon)).into_iter().collect()
}

pub fn free_energy_csv(rows: &[FreeEnergyReport]) -> String {
    let mut s = String::from("rho,T,leading,lhy,thermal,total\n");
    for r in rows {
        let _ = writeln!(s, "{:?},{:?},{:?},{:?},{:?},{:?}", r.rho, r.t, r.leading, r.lhy, r.thermal, r.total);
    }
    s
}

pub fn checks_csv(rows: &[CheckRow]) -> String {
    let mut s = String::from("check,value,tol,pass\n");
    for r in rows {
        let name = if r.name.contains([',', '"']) { format!("\"{}\"", r.name.replace('"', "\"\"")) } else { r.name.clone() };
        let _ = writeln!(s, "{name},{:?},{:?},{}", r.value, r.tol, r.pass);
    }
    s
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

/// max |e − √(A²−B²)|/e over `samples` seeded lattice momenta and
/// couplings B = 8πaN^κ.
pub fn dispersion_identity_gap(seed: u64, samples: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(f64, Dispersion)> = (0..samples)
        .map(|_| {
            let n = loop {
                let n: lattice::Idx = [rng.random_range(-50..=50), rng.random_range(-50..=50), rng.random_range(-50..=50)];
                if n != [0, 0, 0] {
                    break n;
                }
            };
            let big_n = 10f64.powf(rng.random_range(2.0..6.0));
            let kappa = rng.random_range(0.5..0.55);
            let a = rng.random_range(0.1..1.5);
            let b = 8.0 * std::f64::consts::PI * a * big_n.powf(kappa);
            (lattice::p2(n), Dispersion { a, b, coupling: 2.0 * b })
        })
        .collect();
    par::max_by(draws.len(), |i| {
        let (p2, d) = draws[i];
        rel(d.e_from_ab(p2), d.e(p2))
    })
}

/// Log-partition vs energy − T·entropy on seeded shell configurations.
pub fn gibbs_consistency_gap(seed: u64, configs: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..configs {
        let n = 10f64.powf(rng.random_range(3.0..6.0));
        let kappa = rng.random_range(0.51..0.54);
        let tr = rng.random_range(0.1..2.0);
        let a = rng.random_range(0.1..1.5);
        let p = RegimeParams::synthetic(n, kappa, 0.05, tr)?.with_scattering_length(a);
        let shell = lattice::annulus(p.shell_inner(), p.shell_outer());
        if shell.is_empty() {
            continue;
        }
        let f = thermal::gamma0_free_energy(&shell, &Dispersion::new(a, &p), p.t_eff)?;
        worst = worst.max(rel(f.log_partition, f.energy_entropy));
    }
    Ok(worst)
}

/// The `verify` table.
pub fn verify_checks(cfg: &RunConfig) -> Result<Vec<CheckRow>> {
    let pot = cfg.potential()?;
    let kappa = cfg.kappa();
    let mut rows = Vec::new();

    let lhy = thermal::lhy_integral(1.0)?;
    rows.push(CheckRow::le("LHY integral at a=1 vs 512 sqrt(pi)/15", rel(lhy, thermal::lhy_closed_form(1.0)), 1e-6));

    let ladder = scattering_ladder(&pot, kappa, cfg.epsilon, &cfg.n_ladder, cfg.cap_factor, cfg.tol)?;
    if let Potential::SoftSphere { v0, r } = pot {
        let k = (0.5 * v0).sqrt();
        let oracle = r - (k * r).tanh() / k;
        let ode = scattering::ode_scattering_length(&pot, 20_000)?;
        rows.push(CheckRow::le("soft-sphere a from radial ODE vs R - tanh(kR)/k", (ode - oracle).abs(), 1e-6));
    }
    rows.push(CheckRow::le(
        format!("slope of log|a_N - a| vs log N against -(1 - kappa) = {:.3}", -(1.0 - kappa)),
        (ladder.slope + (1.0 - kappa)).abs(),
        0.2,
    ));
    let resid = ladder.rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    rows.push(CheckRow::le("scattering CG relative residual", resid, cfg.tol));

    rows.push(CheckRow::le("dispersion e = sqrt(A^2 - B^2), 1e4 samples (relative)", dispersion_identity_gap(cfg.seed, 10_000), 1e-12));
    rows.push(CheckRow::le("Gibbs -T log Z = E - T S, 20 configurations (relative)", gibbs_consistency_gap(cfg.seed, 20)?, 1e-10));
    let (exact, closed) = fockmicro::checks::gibbs_trace_check(&[3.0, 5.5], 4.0, 60)?;
    rows.push(CheckRow::le("Gibbs closed form vs exact Fock trace, 2-mode shell", (exact - closed).abs(), 1e-10));

    let tr = cfg.temp_ratio.first().copied().unwrap_or(1.0);
    let rl = renorm_ladder(&pot, kappa, cfg.epsilon, tr, &cfg.renorm_ladder, cfg.renorm_cap_factor, cfg.tol, cfg.alpha_source)?;
    rows.push(CheckRow::le(
        format!("renormalized constant gap decreases along the N ladder (alpha-source {})", cfg.alpha_source.name()),
        if rl.monotone { 0.0 } else { 1.0 },
        0.0,
    ));
    rows.push(CheckRow::le(
        format!("renormalized constant gap exponent <= -epsilon/2 = {:?}", -0.5 * cfg.epsilon),
        rl.slope,
        -0.5 * cfg.epsilon,
    ));

    rows.extend(fockmicro::fock_demo(cfg.seed)?);
    rows.extend(localization::localize_checks(cfg.c_window)?);
    Ok(rows)
}

/// Triplet dumps of the default layout's Γ, T_c, 𝒩_S and ℙ_k.
pub fn dump_fock_ops(dir: &Path) -> Result<Vec<PathBuf>> {
    use fockmicro::ops;
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let lay = fockmicro::default_layout()?;
    let gamma = fockmicro::checks::dressed_gibbs(&lay)?;
    let tc = ops::t_c(&lay.space, &lay.order, &lay.phi(), lay.n)?;
    let ns = ops::count(&lay.space, fockmicro::Tag::Shell);
    let (_, pk, _) = ops::parity_ops(&lay.space, lay.order[0])?;
    let mut written = Vec::new();
    for (name, op) in [("gamma", &gamma), ("t_c", &tc), ("n_shell", &ns), ("parity_k", &pk)] {
        let mut buf = Vec::new();
        op.write_triplets(&mut buf)?;
        let path = dir.join(format!("{name}.txt"));
        write_atomic(&path, &String::from_utf8_lossy(&buf))?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    /// Human-readable report for stdout.
    pub report: String,
    /// CSV artifact, also written to `out` when set.
    pub csv: String,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let (pass, report, csv) = match cfg.command {
        Command::Scattering => {
            let pot = cfg.potential()?;
            let kappa = cfg.kappa();
            let l = scattering_ladder(&pot, kappa, cfg.epsilon, &cfg.n_ladder, cfg.cap_factor, cfg.tol)?;
            let mut r = format!("potential {}\na = {:?}\n", pot.spec(), l.a);
            for row in &l.rows {
                let _ = writeln!(r, "N = {:>10.1}  a_N = {:.8}  a_N - a = {:+.3e}", row.n, row.a_n, row.a_n - l.a);
            }
            let _ = writeln!(r, "slope of log|a_N - a| vs log N: {:.4} (expected {:.4})", l.slope, -(1.0 - kappa));
            let pass = l.rows.iter().all(|x| x.residual <= cfg.tol);
            (pass, r, scattering_csv(&l))
        }
        Command::FreeEnergy => {
            let rows = free_energy_table(cfg)?;
            let csv = free_energy_csv(&rows);
            (rows.iter().all(|r| r.total.is_finite()), csv.clone(), csv)
        }
        Command::Verify | Command::FockDemo | Command::Localize => {
            let rows = match cfg.command {
                Command::Verify => verify_checks(cfg)?,
                Command::FockDemo => {
                    if let Some(dir) = &cfg.dump_ops {
                        dump_fock_ops(dir)?;
                    }
                    fockmicro::fock_demo(cfg.seed)?
                }
                _ => localization::localize_checks(cfg.c_window)?,
            };
            (fockmicro::checks::all_pass(&rows), fockmicro::checks::format_table(&rows), checks_csv(&rows))
        }
    };
    if let Some(out) = &cfg.out {
        write_atomic(out, &csv)?;
    }
    Ok(Outcome { pass, report, csv })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_round_trip() {
        let mut c = RunConfig::default();
        c.rho = vec![1e-4, 3.5e-6];
        c.out = Some("x/y.csv".into());
        c.alpha_source = AlphaSource::Full;
        assert_eq!(RunConfig::from_kv(&c.to_kv()).unwrap(), c);
    }
}
