use std::f64::consts::PI;
use std::fs;
use std::process::{Command, Output};

fn qwire(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwire")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn echo_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix("# ")?.strip_prefix(key)?.strip_prefix('='))
}

#[test]
fn two_site_spectrum() {
    let o = qwire(&["spectrum", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert!((rows[0][1] + PI).abs() < 1e-9);
    assert!((rows[1][1] - PI).abs() < 1e-9);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["spectrum", "--n", "1"][..],
        &["fidelity", "--omega", "inf", "--beta", "1"],
        &["sweep", "--grid", "beta=1:0:3"],
        &["fidelity", "--rates", "list:1,2", "--n", "3"],
        &["fit", "--omega", "4pi"],
        &["nonsense"],
        &["spectrum", "--jobs", "0"],
    ] {
        let o = qwire(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn numerical_failure_exits_two_with_trailer() {
    let o = qwire(&["sweep", "--omega", "0", "--rates", "quadratic", "--grid", "beta=0:100:3,gamma_tau=0:0.01:2"]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert_eq!(data_rows(&text).len(), 2);
    assert!(text.lines().last().unwrap().starts_with("# error:"));
}

#[test]
fn perturbed_spectrum_fails() {
    let o = qwire(&["spectrum", "--n", "5", "--perturb-spectrum", "0.01"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("# error:"));
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for jobs in ["1", "3"] {
        let path = dir.path().join(format!("sweep{jobs}.csv"));
        let o = qwire(&[
            "sweep",
            "--regime",
            "fig5",
            "--grid",
            "beta=0:3:4,gamma_tau=0:0.01:5",
            "--jobs",
            jobs,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        outputs.push(fs::read_to_string(path).unwrap().replace(&format!("# jobs={jobs}\n"), ""));
    }
    assert_eq!(outputs[0], outputs[1]);
    let rows = data_rows(&outputs[0]);
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().filter(|r| r[0] == 0.0).all(|r| r[4] >= -1e-9));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    fs::write(&path, "# test run\nn = 4\ngamma = 0.02\nbeta-prime = 1.5\n").unwrap();
    let o = qwire(&["fidelity", "--config", path.to_str().unwrap(), "--gamma", "0.03", "--engine", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(echo_value(&text, "n"), Some("4"));
    assert_eq!(echo_value(&text, "gamma"), Some("0.03"));
    assert_eq!(echo_value(&text, "beta_prime"), Some("1.5"));

    fs::write(&path, "colour = blue\n").unwrap();
    assert_eq!(qwire(&["spectrum", "--config", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn inverted_modes_are_noted() {
    let o = qwire(&["fidelity", "--omega", "4pi", "--rates", "quadratic", "--beta", "3", "--gamma", "0.001"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("# note: mode 1 has omega+E"));
    assert!(!text.contains("# note: mode 2"));
}

#[test]
fn fidelity_reports_both_schemes() {
    let o = qwire(&["fidelity", "--n", "5", "--gamma", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let fids: Vec<f64> =
        text.lines().filter_map(|l| l.strip_prefix("fidelity=")).map(|v| v.parse().unwrap()).collect();
    assert_eq!(fids.len(), 2);
    assert!(fids.iter().all(|f| (f - 1.0).abs() < 1e-8));
}

#[test]
fn threshold_and_fit_outputs() {
    let o = qwire(&["threshold", "--regime", "fig1", "--grid", "beta=0:2:3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("beta,gamma_tau_threshold_a,gamma_tau_threshold_c"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 3);
    assert!(rows[0][2] > rows[0][1]);

    let o = qwire(&["fit", "--n", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let a1: f64 = echo_value(&stdout(&o), "a1").unwrap().parse().unwrap();
    assert!((1.6..=2.4).contains(&a1));
}
