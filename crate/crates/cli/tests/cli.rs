use std::io::Write;
use std::process::{Command, Output};

fn acfreq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acfreq"))
        .args(args)
        .env_remove("ACFREQ_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows as maps from column name to cell, skipping the `#` header block.
fn csv_rows(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let headers = reader.headers().unwrap().clone();
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            headers.iter().map(str::to_owned).zip(r.iter().map(str::to_owned)).collect()
        })
        .collect()
}

fn header_value(text: &str, key: &str) -> Option<String> {
    text.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_owned))
}

#[test]
fn separation_bound_approaches_its_asymptote() {
    let o = acfreq(&["bound", "--kind", "separation", "--omega-r", "0.01", "--t", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    let ratio: f64 = rows[0]["ratio"].parse().unwrap();
    assert!((ratio - 1.0).abs() < 1e-4, "{ratio}");
    assert!(rows[0]["note"].contains("small-separation"));
}

#[test]
fn full_revolution_is_reported_as_zero_information() {
    let o = acfreq(&["bound", "--kind", "single", "--omega", "1", "--t", "6.2832"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0]["status"], "zero-information");
    assert_eq!(rows[0]["bound_value"], "");
}

#[test]
fn centroid_without_separation_matches_single_frequency() {
    let c = csv_rows(&stdout(&acfreq(&["bound", "--kind", "centroid", "--omega-s", "1", "--omega-r", "0", "--t", "0.05"])));
    let s = csv_rows(&stdout(&acfreq(&["bound", "--kind", "single", "--omega", "1", "--t", "0.05"])));
    let a: f64 = c[0]["bound_value"].parse().unwrap();
    let b: f64 = s[0]["bound_value"].parse().unwrap();
    assert!((a - b).abs() <= 1e-12 * b, "{a} vs {b}");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["bound", "--sigma=-1"][..],
        &["bound", "--kind", "sideways"],
        &["frobnicate"],
        &["montecarlo", "--samples", "1000"],
        &["bound", "--sigma", "1,2"],
        &["fig2", "--n-max", "0"],
    ] {
        let o = acfreq(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn tolerance_failure_exits_with_one_and_still_writes_rows() {
    let o = acfreq(&["pulse-verify", "--tolerance", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!csv_rows(&stdout(&o)).is_empty());
    let o = acfreq(&["pulse-verify"]);
    assert_eq!(o.status.code(), Some(0));
    let slope: f64 = header_value(&stdout(&o), "effective_error_slope").unwrap().parse().unwrap();
    assert!((slope - 1.0).abs() < 0.1);
}

#[test]
fn montecarlo_output_is_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("run{i}.csv"))).collect();
    for p in &paths {
        let o = acfreq(&["montecarlo", "--seed", "42", "--samples", "20000", "--k-max", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    let b = std::fs::read(&paths[1]).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(header_value(&text, "seed").as_deref(), Some("42"));
    assert_eq!(header_value(&text, "version").as_deref(), Some(env!("CARGO_PKG_VERSION")));
    let other = stdout(&acfreq(&["montecarlo", "--seed", "43", "--samples", "20000", "--k-max", "3"]));
    assert_ne!(other, text);
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# bound parameters\nkind = single\nomega = 2\nt = 0.1").unwrap();
    let path = file.path().to_str().unwrap();
    let from_file = stdout(&acfreq(&["bound", "--config", path]));
    assert_eq!(header_value(&from_file, "omega").as_deref(), Some("2.0000000000000000e0"));
    let overridden = stdout(&acfreq(&["bound", "--config", path, "--omega", "3"]));
    assert_eq!(header_value(&overridden, "omega").as_deref(), Some("3.0000000000000000e0"));
    assert_eq!(header_value(&overridden, "t").as_deref(), Some("1.0000000000000001e-1"));

    let via_env = Command::new(env!("CARGO_BIN_EXE_acfreq"))
        .arg("bound")
        .env("ACFREQ_CONFIG", path)
        .output()
        .unwrap();
    assert_eq!(header_value(&stdout(&via_env), "omega").as_deref(), Some("2.0000000000000000e0"));

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "omgea = 2").unwrap();
    assert_eq!(acfreq(&["bound", "--config", bad.path().to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn table1_json_reports_all_entries_within_one_percent() {
    let o = acfreq(&["table1"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["header"]["command"], "table1");
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 15);
    for row in rows {
        let dev = row["relative_deviation"].as_f64().unwrap();
        assert!(dev < 1e-2, "{}: {dev}", row["formula_id"]);
    }
}

#[test]
fn fig2_rows_respect_the_bound_and_round_trip_floats() {
    let o = acfreq(&["fig2", "--n-max", "12", "--sigma", "0.5,1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2 * 2 * 12);
    for r in &rows {
        assert_eq!(r["status"], "ok");
        let q: f64 = r["qfi_value"].parse().unwrap();
        let b: f64 = r["bound_value"].parse().unwrap();
        assert!(q <= b * (1.0 + 1e-9));
        assert_eq!(r["qfi_value"].parse::<f64>().unwrap().to_string().parse::<f64>().unwrap(), q);
        if r["state"] == "dicke_superposition" {
            let f: f64 = r["fidelity_qfi"].parse().unwrap();
            assert!((f - q).abs() <= 1e-4 * q);
        }
    }
    let ghz_n1 = rows.iter().find(|r| r["state"] == "ghz" && r["N"] == "1" && r["sigma"].starts_with("1.0")).unwrap();
    let qubit: f64 = ghz_n1["qfi_value"].parse().unwrap();
    assert!(qubit > 0.0);
}

#[test]
fn fig3_json_mirrors_csv() {
    let csv_text = stdout(&acfreq(&["fig3", "--n-max", "3", "--sigma", "1"]));
    let json: serde_json::Value = serde_json::from_slice(&acfreq(&["fig3", "--n-max", "3", "--sigma", "1", "--format", "json"]).stdout).unwrap();
    let rows = csv_rows(&csv_text);
    let jrows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), jrows.len());
    for (c, j) in rows.iter().zip(jrows) {
        let a: f64 = c["qfi_value"].parse().unwrap();
        assert_eq!(a, j["qfi_value"].as_f64().unwrap());
        assert_eq!(c["state"], j["state"].as_str().unwrap());
    }
    assert_eq!(json["header"]["parameters"]["omega_r"], "6.9999999999999996e-1");
}

#[test]
fn probe_qfi_routes_agree() {
    let o = acfreq(&["probe-qfi", "--state", "ghz", "--n-qubits", "3", "--sigma", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &csv_rows(&stdout(&o))[0];
    let sld: f64 = r["sld_qfi"].parse().unwrap();
    let two: f64 = r["two_level_qfi"].parse().unwrap();
    let fid: f64 = r["fidelity_qfi"].parse().unwrap();
    assert!((sld - two).abs() <= 1e-10 * two);
    assert!((fid - two).abs() <= 1e-6 * two);
    let o = acfreq(&["probe-qfi", "--kind", "single", "--t", "6.283185307179586"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_rows(&stdout(&o))[0]["status"], "zero-information");
}

#[test]
fn coherent_single_frequency_is_exact() {
    let o = acfreq(&["coherent", "--kind", "single", "--b-field", "2", "--t", "1.5", "--n-qubits", "4"]);
    let r = &csv_rows(&stdout(&o))[0];
    let v: f64 = r["value"].parse().unwrap();
    let want = 16.0 * 4.0 * 1.5f64.powi(4);
    assert!((v - want).abs() <= 1e-12 * want, "{v} vs {want}");
    let o = acfreq(&["coherent", "--kind", "centroid", "--omega-r", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_rows(&stdout(&o))[0]["status"], "out-of-range");
}
