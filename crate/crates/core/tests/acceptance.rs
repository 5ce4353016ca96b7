//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lhy_core::fockmicro::{self, checks};
use lhy_core::pipeline::{self, AlphaSource, Command, RunConfig};
use lhy_core::regime::gamma_of_kappa;
use lhy_core::scattering::Potential;
use lhy_core::{localization as loc, par, thermal};

struct Line {
    pass: bool,
    text: String,
}

fn line(id: u8, title: &str, pass: bool, detail: String) -> Line {
    Line { pass, text: format!("{} {id}. {title}: {detail}", if pass { "PASS" } else { "FAIL" }) }
}

fn rows_fail(rows: &[checks::CheckRow], filter: impl Fn(&str) -> bool) -> Vec<String> {
    rows.iter().filter(|r| filter(&r.name) && !r.pass).map(|r| r.name.clone()).collect()
}

fn lhy_constant() -> Line {
    const TOL: f64 = 1e-6;
    const BUDGET: Duration = Duration::from_secs(1);
    let t = Instant::now();
    let v = thermal::lhy_integral(1.0);
    let dt = t.elapsed();
    let target = 512.0 * std::f64::consts::PI.sqrt() / 15.0;
    match v {
        Ok(v) => {
            let rel = ((v - target) / target).abs();
            line(1, "LHY constant", rel <= TOL && dt < BUDGET, format!("integral {v:.10} vs {target:.10}, rel {rel:.2e} (tol {TOL:e}), {dt:.2?} (budget {BUDGET:?})"))
        }
        Err(e) => line(1, "LHY constant", false, e.to_string()),
    }
}

fn scattering_convergence() -> Line {
    const SLOPE_TOL: f64 = 0.2;
    const BUDGET: Duration = Duration::from_secs(120);
    const ORACLE: f64 = 0.238_405_844_044_234; // 1 - tanh 1
    let pot = Potential::soft_sphere(2.0, 1.0).unwrap();
    let ns = [100.0, 300.0, 1000.0, 3000.0];
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (kappa, eps) in [(0.52, 0.1), (0.55, 0.05)] {
        match pipeline::scattering_ladder(&pot, kappa, eps, &ns, 4.0, 1e-10) {
            Ok(l) => {
                let target = -(1.0 - kappa);
                let pass = (l.slope - target).abs() <= SLOPE_TOL && (l.a - ORACLE).abs() <= 1e-6;
                ok &= pass;
                parts.push(format!("kappa {kappa}: slope {:.3} vs {target:.2} +- {SLOPE_TOL}, a {:.9}", l.slope, l.a));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("kappa {kappa}: {e}"));
            }
        }
    }
    let dt = t.elapsed();
    ok &= dt < BUDGET;
    parts.push(format!("{dt:.1?} (budget {BUDGET:?})"));
    line(2, "scattering convergence", ok, parts.join("; "))
}

fn fock_suite(seed: u64) -> Line {
    const BUDGET: Duration = Duration::from_secs(60);
    let t = Instant::now();
    let rows = fockmicro::fock_demo(seed);
    let dt = t.elapsed();
    match rows {
        Ok(rows) => {
            let failed = rows_fail(&rows, |_| true);
            line(
                3,
                "Fock algebra suite (default layout, reversed order, 5 random layouts)",
                failed.is_empty() && dt < BUDGET,
                format!("{} rows, {} failed {failed:?}, {dt:.2?} (budget {BUDGET:?})", rows.len(), failed.len()),
            )
        }
        Err(e) => line(3, "Fock algebra suite", false, e.to_string()),
    }
}

fn diagonalization(seed: u64) -> Line {
    const MATRIX_TOL: f64 = 1e-6;
    const DISP_TOL: f64 = 1e-12;
    let m = checks::diago_check([1, 0, 0], 10.0, 30, 5).map(|r| r.value).unwrap_or(f64::INFINITY);
    let d = pipeline::dispersion_identity_gap(seed, 10_000);
    line(
        4,
        "diagonalization",
        m <= MATRIX_TOL && d <= DISP_TOL,
        format!("matrix identity {m:.2e} (tol {MATRIX_TOL:e}), dispersion over 1e4 points {d:.2e} (tol {DISP_TOL:e})"),
    )
}

fn gibbs(seed: u64) -> Line {
    const TOL: f64 = 1e-10;
    let g = pipeline::gibbs_consistency_gap(seed, 20).unwrap_or(f64::INFINITY);
    let x = checks::gibbs_trace_check(&[3.0, 5.5], 4.0, 60).map(|(e, c)| (e - c).abs()).unwrap_or(f64::INFINITY);
    line(5, "Gibbs consistency", g <= TOL && x <= TOL, format!("20 configs rel {g:.2e}, exact trace {x:.2e} (tol {TOL:e})"))
}

fn renormalized() -> Line {
    let eps = 0.1;
    let pot = Potential::soft_sphere(2.0, 1.0).unwrap();
    let ns = [1e3, 2e3, 4e3, 8e3, 1.6e4];
    match pipeline::renorm_ladder(&pot, 0.52, eps, 1.0, &ns, 1.0, 1e-10, AlphaSource::Box) {
        Ok(l) => {
            let gaps: Vec<String> = l.rows.iter().map(|r| format!("{:.3}", r.rel_gap)).collect();
            line(
                6,
                "renormalized constant",
                l.monotone && l.slope <= -0.5 * eps,
                format!("gaps [{}] monotone {}, exponent {:.3} (need <= {})", gaps.join(", "), l.monotone, l.slope, -0.5 * eps),
            )
        }
        Err(e) => line(6, "renormalized constant", false, e.to_string()),
    }
}

fn localization() -> Line {
    const TOL: f64 = 1e-10;
    let spec = loc::WindowSpec::new(12.0, 3.0, 1.0).unwrap();
    let part = loc::partition_gap(&spec, 1001);
    let trig = (0..=20).map(|d| loc::random_trig_gap(&spec, d, 0..5)).fold(0.0, f64::max);
    line(7, "localization", part <= TOL && trig <= TOL, format!("partition {part:.2e}, periodic integral degree 0..20 x 5 seeds {trig:.2e} (tol {TOL:e})"))
}

fn determinism() -> Line {
    let verify = RunConfig { command: Command::Verify, ..RunConfig::default() };
    let fe = RunConfig {
        command: Command::FreeEnergy,
        rho: vec![1e-4, 1e-5, 1e-6],
        temp_ratio: vec![0.0, 0.5, 1.0, 2.0],
        gamma: gamma_of_kappa(0.52),
        ..RunConfig::default()
    };
    let csv = |c: &RunConfig| pipeline::run(c).map(|o| o.csv).unwrap_or_default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, cfg) in [("verify", &verify), ("free-energy", &fe)] {
        let a = csv(cfg);
        let b = csv(cfg);
        let c = par::with_threads(1, || csv(cfg));
        let d = par::with_threads(4, || csv(cfg));
        let same = !a.is_empty() && a == b && a == c && a == d;
        ok &= same;
        parts.push(format!("{name} {} bytes identical across repeat/1/4 threads: {same}", a.len()));
    }
    line(8, "determinism", ok, parts.join("; "))
}

fn main() -> ExitCode {
    let seed = RunConfig::default().seed;
    let lines = [
        lhy_constant(),
        scattering_convergence(),
        fock_suite(seed),
        diagonalization(seed),
        gibbs(seed),
        renormalized(),
        localization(),
        determinism(),
    ];
    for l in &lines {
        println!("{}", l.text);
    }
    let failed = lines.iter().filter(|l| !l.pass).count();
    println!("acceptance: {} passed, {failed} failed", lines.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
