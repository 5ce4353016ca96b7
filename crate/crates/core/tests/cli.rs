use std::process::Command;

use lhy_core::pipeline::{self, AlphaSource, RunConfig};
use proptest::prelude::*;

fn lhy() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lhy"))
}

#[test]
fn free_energy_three_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fe.csv");
    let st = lhy().args(["free-energy", "--rho", "1e-4", "--temp-ratio", "0,0.5,1", "--out"]).arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rho,T,leading,lhy,thermal,total");
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[1].split(',').nth(4), Some("0.0"));
}

#[test]
fn scattering_reports_oracle() {
    let o = lhy().args(["scattering", "--potential", "soft-sphere:V0=2,R=1", "--n-ladder", "100,300"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("a = 0.2384058"), "{s}");
    assert_eq!(s.lines().filter(|l| l.starts_with("N =")).count(), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(lhy().args(["free-energy", "--potential", "hard-core"]).status().unwrap().code(), Some(2));
    assert_eq!(lhy().args(["verify", "--alpha-source", "nope"]).status().unwrap().code(), Some(2));
    assert_eq!(lhy().args(["bogus"]).status().unwrap().code(), Some(2));
    assert_eq!(lhy().args(["free-energy", "--rho", "-1"]).status().unwrap().code(), Some(2));
    assert_eq!(lhy().args(["free-energy", "--rho=-1"]).status().unwrap().code(), Some(2));
}

#[test]
fn unwritable_output_is_an_error() {
    let st = lhy().args(["localize", "--out", "/nonexistent-dir/x.csv"]).status().unwrap();
    assert_ne!(st.code(), Some(0));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("fe.csv");
    std::fs::write(&cfg, "# table\nrho = 1e-5\ntemp-ratio = 0,1\n").unwrap();
    let st = lhy().args(["free-energy", "--config"]).arg(&cfg).args(["--temp-ratio", "2", "--out"]).arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("1e-5,"));
}

#[test]
fn fock_demo_dumps_operators() {
    let dir = tempfile::tempdir().unwrap();
    let st = lhy().args(["fock-demo", "--dump-ops"]).arg(dir.path()).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let t = std::fs::read_to_string(dir.path().join("t_c.txt")).unwrap();
    let first: Vec<&str> = t.lines().next().unwrap().split(' ').collect();
    assert_eq!(first.len(), 4);
    assert_eq!(first[3], "0.0");
}

#[test]
fn atomic_write_leaves_no_temp_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.csv");
    pipeline::write_atomic(&p, "x\n").unwrap();
    pipeline::write_atomic(&p, "y\n").unwrap();
    assert_eq!(std::fs::read_to_string(&p).unwrap(), "y\n");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

proptest! {
    #[test]
    fn config_round_trips(
        rho in prop::collection::vec(1e-9f64..1e-2, 1..4),
        tr in prop::collection::vec(0.0f64..5.0, 1..4),
        gamma in 1.01f64..3.0,
        seed in any::<u64>(),
        boxed in any::<bool>(),
        c_eps in 0.0f64..10.0,
    ) {
        let c = RunConfig {
            rho,
            temp_ratio: tr,
            gamma,
            seed,
            c_eps,
            alpha_source: if boxed { AlphaSource::Box } else { AlphaSource::Full },
            out: Some("out/table.csv".into()),
            ..RunConfig::default()
        };
        prop_assert_eq!(RunConfig::from_kv(&c.to_kv()).unwrap(), c);
    }
}
