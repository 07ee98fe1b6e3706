use std::path::Path;
use std::process::{Command, Output};

fn viralcm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_viralcm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("c.toml");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn theory_summary_names_the_predictions() {
    let o = viralcm(&["theory"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for key in ["xi", "influenced_fraction", "pioneer_fraction", "0.601593", "0.796812"] {
        assert!(s.contains(key), "missing {key} in\n{s}");
    }
}

#[test]
fn configuration_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(viralcm(&["theory", "--config", "/nonexistent/x.toml"]).status.code(), Some(1));
    assert_eq!(viralcm(&["simulate", "--epsilon", "1.5"]).status.code(), Some(1));
    assert_eq!(viralcm(&["simulate", "--bogus"]).status.code(), Some(1));
    let cfg = write_config(dir.path(), "n = 10\nepsilon = \"wide\"\n");
    let o = viralcm(&["theory", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(viralcm(&["oracle", "--degrees", "0,1;1"]).status.code(), Some(1));
}

#[test]
fn failed_tolerance_exits_with_two_only_under_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n = 2000\nreplicates = 2\n[tolerances]\nfluid = 1e-9\n");
    assert_eq!(viralcm(&["explore", "--config", &cfg]).status.code(), Some(0));
    assert_eq!(viralcm(&["explore", "--config", &cfg, "--check"]).status.code(), Some(2));
}

#[test]
fn explore_writes_trajectories_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = viralcm(&["explore", "--n", "3000", "--replicates", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let fwd = std::fs::read_to_string(out.join("explore_forward_r001.csv")).unwrap();
    assert_eq!(fwd.lines().next(), Some("t,L,R,S_T,A_T,sleeping"));
    let rev = std::fs::read_to_string(out.join("explore_reverse_r000.csv")).unwrap();
    assert_eq!(rev.lines().next(), Some("t,L,S,A,sleeping"));
    assert!(out.join("report.json").exists() && out.join("summary.txt").exists());
}

#[test]
fn simulate_can_export_edge_lists() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n = 500\nreplicates = 1\nedge_list = true\n");
    let out = dir.path().join("g");
    assert_eq!(viralcm(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]).status.code(), Some(0));
    let edges = std::fs::read_to_string(out.join("graph_r000.txt")).unwrap();
    let first: Vec<u32> = edges.lines().next().unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first.len(), 4);
    assert!(first[2] <= 1 && first[3] <= 1);
}

#[test]
fn oracle_reports_the_star_expectation() {
    let o = viralcm(&["oracle", "--degrees", "0,2;1,0;1,0", "--format", "json", "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["values"]["matchings"], 3.0);
    assert!((v["values"]["expected_forward_size_0"].as_f64().unwrap() - 7.0 / 3.0).abs() < 1e-12);
}

#[test]
fn sweep_flips_at_three_tenths() {
    let o = viralcm(&["sweep", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["values"]["first_supercritical"], 0.3);
    assert_eq!(v["values"]["q=0.2000/supercritical"], 0.0);
}

#[test]
fn subcritical_simulation_passes_its_null_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "n = 20000\nreplicates = 2\n[distribution]\nfamily = \"thinned_poisson\"\nmu = 4.0\nq = 0.2\ncutoff = 30\n",
    );
    let o = viralcm(&["simulate", "--config", &cfg, "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("no_large_source"));
}
