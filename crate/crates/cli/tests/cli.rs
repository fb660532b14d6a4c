use std::process::{Command, Output};

use serde_json::Value;

const SP2_O22: &str = "sp2n_r:n=1/o_pq:p=2,q=2";

fn theta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_theta")).args(args).env_remove("THETA_SEED").output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn list_orbits_of_sp2() {
    let out = theta(&["list-orbits", SP2_O22, "--side", "G"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["orbits"].as_array().unwrap().len(), 3);
    let text = theta(&["list-orbits", SP2_O22, "--format", "text"]);
    assert_eq!(String::from_utf8(text.stdout).unwrap(), "+-\n+/-\n-+\n");
}

#[test]
fn zero_orbit_lifts_to_a_column_of_two() {
    let v = json_of(&theta(&["lift", SP2_O22, "--orbit", "+/-"]));
    assert_eq!(v["lift"], "+-/-+");
    assert_eq!(v["by_moment"], v["lift"]);
    assert_eq!(v["status"], "PASS");
}

#[test]
fn zero_samples_is_a_vacuous_pass() {
    let out = theta(&["verify-moment", SP2_O22, "--samples", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["status"], "PASS");
    assert!(v["orbits"].as_array().unwrap().iter().all(|o| o["fiber"].is_null()));
}

#[test]
fn parse_errors_exit_2() {
    for args in [
        vec!["lift", "sp2n_r:n=1", "--orbit", "+/-"],
        vec!["lift", SP2_O22, "--orbit", "++"],
        vec!["lift-datum", SP2_O22, "--datum", "{orbit: +-}"],
        vec!["lift", SP2_O22],
    ] {
        let out = theta(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn output_is_byte_stable() {
    for args in [
        vec!["verify-moment", SP2_O22, "--samples", "4", "--seed", "9"],
        vec!["check-l3", SP2_O22, "--max-deg", "3", "--seed", "9"],
        vec!["transfer", SP2_O22, "--orbit", "+-", "--max-deg", "3"],
    ] {
        assert_eq!(theta(&args).stdout, theta(&args).stdout, "{args:?}");
    }
}

#[test]
fn seed_comes_from_the_environment() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_theta"))
            .args(["verify-moment", SP2_O22, "--samples", "2"])
            .env("THETA_SEED", seed)
            .output()
            .unwrap()
    };
    assert_eq!(json_of(&run("17"))["seed"], 17);
    assert_eq!(run("x").status.code(), Some(2));
}

#[test]
fn tower_file_runs_the_sp2_o33_sp14_chain() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain.txt");
    std::fs::write(&path, "# zero datum by default\nsp2n_r:n=1/o_pq:p=3,q=3\no_pq:p=3,q=3/sp2n_r:n=7\n").unwrap();
    let out = theta(&["tower", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["steps"].as_array().unwrap().len(), 3);
    assert_eq!(v["steps"][2]["pair"], "o_pq:p=3,q=3/sp2n_r:n=7");
}

/// Every verification report carries a pair, a PASS/FAIL status and a list of rows.
#[test]
fn verification_reports_share_a_shape() {
    let u = "u:n1=1,n2=1/u:p=2,q=2";
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["verify-moment", u, "--samples", "3"], "orbits"),
        (vec!["verify-tangent", u], "reports"),
        (vec!["dims", u], "orbits"),
        (vec!["check-l3", u, "--max-deg", "2"], "orbits"),
        (vec!["check-tf", u, "--max-deg", "2"], "reports"),
        (vec!["check-p4", u, "--orbit", "+-", "--max-deg", "2"], "rows"),
    ];
    for (args, rows) in cases {
        let out = theta(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let v = json_of(&out);
        assert_eq!(v["pair"], u);
        assert_eq!(v["status"], "PASS", "{args:?}");
        assert!(!v[rows].as_array().unwrap().is_empty(), "{args:?}");
    }
}

#[test]
fn series_json_is_ordered_by_degree() {
    let v = json_of(&theta(&["cw-series", SP2_O22, "--max-deg", "2"]));
    let degrees = v["degrees"].as_array().unwrap();
    assert_eq!(degrees.len(), 3);
    for (d, t) in degrees.iter().enumerate() {
        assert_eq!(t["d"], d);
    }
}

#[test]
fn excluded_pair_reports_tf_without_failing() {
    let out = theta(&["check-tf", SP2_O22, "--max-deg", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json_of(&out)["excluded"].as_bool().unwrap());
}
