use std::process::{Command, Output};

use holder_metrics::report::parse_csv;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holder-metrics"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn catalog_lists_domains() {
    let rows: Value = serde_json::from_str(&stdout(&run(&["catalog"]))).unwrap();
    let names: Vec<&str> = rows.as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 9);
    assert!(names.contains(&"koebe") && names.contains(&"strip"));
    let sectors: Value = serde_json::from_str(&stdout(&run(&["catalog", "sector"]))).unwrap();
    assert_eq!(sectors.as_array().unwrap().len(), 7);
}

#[test]
fn catalog_csv_uses_lf() {
    let text = stdout(&run(&["catalog", "--format", "csv"]));
    assert!(!text.contains('\r'));
    assert!(text.starts_with("name,known_alpha,"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(run(&["analyze", "annulus"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "sector:7"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "strip", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "strip", "--mesh", "2"]).status.code(), Some(2));
}

#[test]
fn config_file_then_flags() {
    let dir = std::env::temp_dir().join(format!("holder-metrics-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "# small run\ndepth = 7\nsamples = 2e3\nseed=5\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let a: Value = serde_json::from_str(&stdout(&run(&["analyze", "sector:1.5708", "--config", cfg]))).unwrap();
    assert_eq!(a["params"]["depth"], 7);
    assert_eq!(a["params"]["samples"], 2000);
    assert_eq!(a["params"]["seed"], 5);

    let out = dir.join("report.json");
    let o = run(&["analyze", "sector:1.5708", "--config", cfg, "--depth", "8", "--out", out.to_str().unwrap()]);
    assert!(stdout(&o).is_empty());
    let b: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(b["params"]["depth"], 8);
    assert_eq!(b["params"]["seed"], 5);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn json_and_csv_agree() {
    let base = ["analyze", "sector:2.3562", "--depth", "8", "--samples", "1e3"];
    let json: Value = serde_json::from_str(&stdout(&run(&base))).unwrap();
    let mut args = base.to_vec();
    args.extend(["--format", "csv"]);
    let text = stdout(&run(&args));
    assert!(text.starts_with("check,bin,field,value\n"));
    assert!(!text.contains('\r'));
    let rows = parse_csv(&text).unwrap();
    assert!(rows.len() > 20);
    for row in rows.iter().filter(|r| r.check != "params.format") {
        let mut ptr = format!("/{}", row.check.replace('.', "/"));
        if let Some(b) = row.bin {
            ptr.push_str(&format!("/{b}"));
        }
        if !row.field.is_empty() {
            ptr.push_str(&format!("/{}", row.field.replace('.', "/")));
        }
        let v = json.pointer(&ptr).unwrap_or_else(|| panic!("missing {ptr}"));
        let expect = match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        assert_eq!(expect, row.value, "{ptr}");
    }
}
