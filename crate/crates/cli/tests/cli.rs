use std::process::{Command, Output};

use casimir_core::energies::{dirichlet_energy, drude_energy};
use casimir_core::BOLTZMANN;

fn casimir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and rows of a CSV document.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn concentric_energy() {
    let o = casimir(&[
        "energy",
        "--geometry",
        "concentric",
        "--R1",
        "1",
        "--R2",
        "2",
        "--model",
        "dirichlet",
    ]);
    assert!(o.status.success());
    let (h, rows) = table(&stdout(&o));
    let e: f64 = rows[0][column(&h, "energy")].parse().unwrap();
    assert_eq!(e, dirichlet_energy(0.5, 1e-12).unwrap().value);
}

#[test]
fn sphere_plane_drude_energy() {
    let o = casimir(&[
        "energy",
        "--geometry",
        "sphere-plane",
        "--ell",
        "1",
        "--model",
        "drude",
    ]);
    assert!(o.status.success());
    let (h, rows) = table(&stdout(&o));
    let e: f64 = rows[0][column(&h, "energy")].parse().unwrap();
    let want = drude_energy(2.0 - 3f64.sqrt(), 1e-12).unwrap().value;
    assert!((e - want).abs() < 1e-14);
}

#[test]
fn temperature_adds_joules() {
    let o = casimir(&[
        "energy",
        "--geometry",
        "sphere-plane",
        "--ell",
        "0.5",
        "--temperature-K",
        "300",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let e = v["energy"].as_f64().unwrap();
    let j = v["energy_joule"].as_f64().unwrap();
    assert!((j - e * BOLTZMANN * 300.0).abs() <= 1e-15 * j.abs());
}

#[test]
fn exit_codes() {
    let domain = casimir(&[
        "energy",
        "--geometry",
        "interior",
        "--R1",
        "2",
        "--R2",
        "1",
        "--L",
        "0.1",
    ]);
    assert_eq!(domain.status.code(), Some(3));
    assert!(domain.stdout.is_empty());
    assert!(!domain.stderr.is_empty());
    let missing = casimir(&["energy", "--geometry", "exterior", "--R1", "1", "--L", "1"]);
    assert_eq!(missing.status.code(), Some(2));
    let bad_flag = casimir(&["energy", "--geometry", "cube", "--ell", "1"]);
    assert_eq!(bad_flag.status.code(), Some(2));
    let unsupported = casimir(&[
        "energy",
        "--geometry",
        "exterior",
        "--R1",
        "1",
        "--R2",
        "1",
        "--L",
        "1",
        "--model",
        "drude",
    ]);
    assert_eq!(unsupported.status.code(), Some(3));
    let flagged = casimir(&[
        "energy",
        "--geometry",
        "exterior",
        "--R1",
        "1",
        "--R2",
        "1",
        "--L",
        "1",
        "--model",
        "drude",
        "--experimental-drude-spheres",
    ]);
    assert!(flagged.status.success());
}

#[test]
fn sweep_schema_and_signs() {
    let o = casimir(&[
        "sweep",
        "--ell-min",
        "1e-3",
        "--ell-max",
        "10",
        "--points",
        "200",
    ]);
    assert!(o.status.success());
    let (h, rows) = table(&stdout(&o));
    assert_eq!(
        h,
        [
            "ell",
            "model",
            "E_exact",
            "E_expansion",
            "E_pfa",
            "F_exact",
            "beta",
            "tail_bound",
            "terms_used",
            "status"
        ]
    );
    assert_eq!(rows.len(), 400);
    let (bi, mi) = (column(&h, "beta"), column(&h, "model"));
    for r in &rows {
        let b: f64 = r[bi].parse().unwrap();
        match r[mi].as_str() {
            "dirichlet" => assert!(b > 0.0),
            "drude" => assert!(b < 0.0),
            m => panic!("unexpected model {m}"),
        }
        assert_eq!(r[column(&h, "status")], "ok");
    }
}

#[test]
fn sweep_is_deterministic() {
    let args = [
        "sweep",
        "--ell-min",
        "1e-2",
        "--ell-max",
        "50",
        "--points",
        "17",
    ];
    assert_eq!(casimir(&args).stdout, casimir(&args).stdout);
}

#[test]
fn failed_points_stay_in_stream() {
    let o = casimir(&[
        "sweep",
        "--ell-min",
        "50",
        "--ell-max",
        "100",
        "--points",
        "2",
        "--model",
        "drude",
    ]);
    assert!(o.status.success());
    let (h, rows) = table(&stdout(&o));
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert_eq!(r[column(&h, "E_expansion")], "");
        assert!(r[column(&h, "status")].starts_with("expansion:"));
        assert!(r[column(&h, "E_exact")].parse::<f64>().is_ok());
    }
}

#[test]
fn single_point_sweep_matches_energy() {
    let s = casimir(&[
        "sweep",
        "--ell-min",
        "0.3",
        "--ell-max",
        "0.3",
        "--points",
        "1",
        "--model",
        "drude",
    ]);
    let e = casimir(&[
        "energy",
        "--geometry",
        "sphere-plane",
        "--ell",
        "0.3",
        "--model",
        "drude",
    ]);
    let (hs, rs) = table(&stdout(&s));
    let (he, re) = table(&stdout(&e));
    assert_eq!(rs[0][column(&hs, "E_exact")], re[0][column(&he, "energy")]);
    assert_eq!(
        rs[0][column(&hs, "tail_bound")],
        re[0][column(&he, "tail_bound")]
    );
}

#[test]
fn sweep_json_mirrors_csv_fields() {
    let o = casimir(&[
        "sweep",
        "--ell-min",
        "0.1",
        "--ell-max",
        "1",
        "--points",
        "2",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let keys: Vec<&str> = rows[0]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    for k in [
        "ell",
        "model",
        "E_exact",
        "E_expansion",
        "E_pfa",
        "F_exact",
        "beta",
        "tail_bound",
        "terms_used",
        "status",
    ] {
        assert!(keys.contains(&k), "{k}");
    }
}

#[test]
fn constants_table() {
    let o = casimir(&["constants"]);
    assert!(o.status.success());
    let (h, rows) = table(&stdout(&o));
    let find = |name: &str| rows.iter().find(|r| r[0] == name).unwrap().clone();
    let dev = column(&h, "deviation");
    let g0 = find("gamma0");
    assert!(g0[dev].parse::<f64>().unwrap() <= 5e-6);
    let g1 = find("gamma1");
    assert_eq!(
        g1[column(&h, "published")].parse::<f64>().unwrap(),
        1.270362
    );
    assert!(g1[dev].parse::<f64>().unwrap() <= 1e-3);
    let z3 = find("zeta3");
    assert_eq!(z3[column(&h, "computed")], "1.2020569031595942e0");
}

#[test]
fn verify_quick_passes_and_mutation_fails() {
    let ok = casimir(&["verify", "--quick"]);
    assert!(ok.status.success(), "{}", stdout(&ok));
    let (h, rows) = table(&stdout(&ok));
    assert!(rows.iter().all(|r| r[column(&h, "status")] == "PASS"));
    let bad = casimir(&["verify", "--quick", "--inject-sign-flip"]);
    assert_eq!(bad.status.code(), Some(5));
    assert!(stdout(&bad).contains("FAIL"));
}
