use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn szego(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_szego"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const FREE: &str = r#"{"a":[],"b":[]}"#;

#[test]
fn geronimus_round_trip_through_pipes() {
    let alpha = r#"{"alpha":[0.3,-0.45,0.2,0.6]}"#;
    for v in ["e", "o", "+", "-"] {
        let fwd = szego(&["geronimus", "--direction", "fwd", "--variant", v], alpha);
        let matrix = String::from_utf8(fwd.stdout).unwrap();
        let inv = json(&szego(&["geronimus", "--direction", "inv", "--variant", v], &matrix));
        let got: Vec<f64> = serde_json::from_value(inv["alpha"].clone()).unwrap();
        for (g, want) in got.iter().zip([0.3, -0.45, 0.2, 0.6]) {
            assert!((g - want).abs() < 1e-10, "variant {v}: {got:?}");
        }
    }
}

#[test]
fn check_exit_codes() {
    let pass = szego(&["check", "--direction", "1to2"], FREE);
    assert_eq!(pass.status.code(), Some(0));
    let report = json(&pass);
    assert_eq!(report["case"], 2);
    assert_eq!(report["variant"], "o");

    let two = szego(&["check", "--direction", "2to1", "--variant", "+"], r#"{"alpha":[0.25,0.1]}"#);
    assert_eq!(two.status.code(), Some(0));

    // an impossible report tolerance turns the weight cross-check red
    let strict = szego(&["--tol-report", "0", "check", "--direction", "2to1", "--variant", "e"], r#"{"alpha":[0.5]}"#);
    assert_eq!(strict.status.code(), Some(1));

    let missing = szego(&["check", "--direction", "2to1"], r#"{"alpha":[0.1]}"#);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn commutation_and_eigenvalues() {
    let added = szego(&["commute", "add", "--E", "-3", "--gamma", "1"], FREE);
    let matrix = String::from_utf8(added.stdout).unwrap();
    let eigs: Vec<f64> = serde_json::from_value(json(&szego(&["eigs"], &matrix))).unwrap();
    assert_eq!(eigs.len(), 1);
    assert!((eigs[0] + 3.0).abs() < 1e-10);
    let removed = json(&szego(&["commute", "remove", "--E", "-3"], &matrix));
    for key in ["a", "b"] {
        for x in removed[key].as_array().unwrap() {
            let want = if key == "a" { 1.0 } else { 0.0 };
            assert!((x.as_f64().unwrap() - want).abs() < 1e-8);
        }
    }
    let bad = szego(&["commute", "remove", "--E", "3"], FREE);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("not an eigenvalue"));
}

#[test]
fn m_function_and_edges() {
    let m = json(&szego(&["m-function", "--at", "3,0"], FREE));
    assert!((m["re"].as_f64().unwrap() - (5f64.sqrt() - 3.0) / 2.0).abs() < 1e-12);
    let cheb = r#"{"a":[1.4142135623730951],"b":[]}"#;
    let m = json(&szego(&["m-function", "--at", "3,0"], cheb));
    assert!((m["re"].as_f64().unwrap() + 1.0 / 5f64.sqrt()).abs() < 1e-12);
    let edges = json(&szego(&["edges"], cheb));
    assert_eq!(edges["minus"]["value"], "infinite");
    assert_eq!(edges["range"], serde_json::json!(["e"]));
}

#[test]
fn asymptotics_csv() {
    let out = szego(&["asymptotics", "--E", "2"], FREE);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rows.headers().unwrap(), vec!["k", "psi_s", "psi_b", "ratio", "residual"]);
    for (i, r) in rows.records().enumerate() {
        let r = r.unwrap();
        let k = (i + 1) as f64;
        assert_eq!(r[0].parse::<f64>().unwrap(), k);
        assert_eq!(r[1].parse::<f64>().unwrap(), 1.0);
        assert_eq!(r[2].parse::<f64>().unwrap(), k);
    }
    let hyper = szego(&["asymptotics", "--E", "-2.5"], FREE);
    let text = String::from_utf8(hyper.stdout).unwrap();
    // beta = -2, so psi_s = (-2)^-k and psi_b = (-2)^k
    let second: Vec<f64> = text.lines().nth(2).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(&second[..3], &[2.0, 0.25, 4.0]);
}

#[test]
fn szego_map_tables() {
    let fwd = szego(&["szego-map", "--variant", "e", "--direction", "fwd", "--grid", "64", "--csv"], r#"{"alpha":[]}"#);
    let text = String::from_utf8(fwd.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,v"));
    for line in lines {
        let (x, v) = line.split_once(',').unwrap();
        let (x, v): (f64, f64) = (x.parse().unwrap(), v.parse().unwrap());
        let arcsine = 1.0 / (std::f64::consts::PI * (4.0 - x * x).sqrt());
        assert!((v - arcsine).abs() < 1e-12 * arcsine);
    }

    let inv = json(&szego(&["szego-map", "--variant", "o", "--direction", "inv", "--grid", "64"], FREE));
    for w in inv["weights"].as_array().unwrap() {
        assert!((w.as_f64().unwrap() - 1.0).abs() < 1e-12);
    }

    let moments = r#"{"moments_re":[1,0.2,0.0],"moments_im":[0,0,0]}"#;
    let out = szego(&["szego-map", "--variant", "+", "--direction", "fwd", "--grid", "64"], moments);
    let nu = json(&out);
    assert_eq!(nu["density"].as_array().unwrap().len(), 32);
}
