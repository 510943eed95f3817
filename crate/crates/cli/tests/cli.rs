use std::path::PathBuf;
use std::process::{Command, Output};

use bautlab::document::parse;
use bautlab::{library, run, Format, Kind, Settings, VariantSpec};

fn bautlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bautlab")).args(args).env("BAUTLAB_THREADS", "2").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bautlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn model_file(name: &str) -> String {
    format!("{}/models/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn every_library_model_validates() {
    for name in library::names() {
        let o = bautlab(&["validate", name]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stdout));
    }
    let o = bautlab(&["validate", &model_file("u1_over_s2_k2.toml")]);
    assert_eq!(code(&o), 0);
}

#[test]
fn degree_zero_generator_is_a_schema_error() {
    let p = scratch("d0.json", r#"{"space":{"name":"X","generators":[{"name":"x","degree":0}]}}"#);
    let o = bautlab(&["validate", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("simply connected requires degree >= 1"));
}

#[test]
fn malformed_input_exits_with_one() {
    let p = scratch("bad.json", r#"{"space": "#);
    assert_eq!(code(&bautlab(&["report", p.to_str().unwrap()])), 1);
    let p = scratch(
        "rat.json",
        r#"{"space":{"name":"X","generators":[{"name":"x","degree":1}]},
        "structure":{"generators":[{"name":"g","degree":1}]},
        "twisting":{"characteristic_classes":[{"name":"c","degree":2,"pairing":{"sx":"one"},"pi_generator":"g"}]}}"#,
    );
    assert_eq!(code(&bautlab(&["validate", p.to_str().unwrap()])), 1);
    assert_eq!(code(&bautlab(&["validate", "/no/such/file.json"])), 1);
}

#[test]
fn non_maurer_cartan_twisting_prints_the_defect() {
    let p = scratch(
        "nonmc.json",
        r#"{"space":{"name":"S2","generators":[{"name":"x","degree":1}]},
            "structure":{"generators":[{"name":"g1","degree":1},{"name":"g2","degree":2}]},
            "twisting":{"explicit":[[["[x,x]"],"g2","1"]]}}"#,
    );
    let o = bautlab(&["validate", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("hom(sx^sx,g2): -1"));
    let o = bautlab(&["report", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Maurer-Cartan"));
}

#[test]
fn headline_report() {
    let o = bautlab(&["report", "s2", "--max-degree", "6"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("rational homotopy: pi_4 = Q\n"), "{out}");
}

#[test]
fn simplified_report_for_the_based_model() {
    let o = bautlab(&["report", "u1_over_s2", "--variant", "simplified"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("rational homotopy: pi_2 = Q\n"));
}

#[test]
fn json_is_deterministic() {
    let a = bautlab(&["report", "u1_over_s2", "--format", "json"]);
    let b = bautlab(&["report", "u1_over_s2", "--format", "json"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["twisting"][0]["coefficient"], "1");
    let single = Command::new(env!("CARGO_BIN_EXE_bautlab"))
        .args(["report", "u1_over_s2", "--format", "json"])
        .env("BAUTLAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(single.stdout, a.stdout);
}

#[test]
fn rationals_are_written_as_fractions() {
    let p = scratch(
        "half.json",
        r#"{"space":{"name":"S2","generators":[{"name":"x","degree":1}]},
            "structure":{"generators":[{"name":"g1","degree":1}]},
            "twisting":{"characteristic_classes":[{"name":"c1","degree":2,"pairing":{"sx":"-2/4"},"pi_generator":"g1"}]}}"#,
    );
    let o = bautlab(&["report", p.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["twisting"][0]["coefficient"], "-1/2");
}

#[test]
fn compare_certifies_the_comparison() {
    let o = bautlab(&["compare", "u1_over_s2"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("dg Lie morphism: yes") && out.contains("quasi-isomorphism: yes"), "{out}");
}

#[test]
fn compare_refuses_explicit_twisting() {
    let p = scratch(
        "explicit.json",
        r#"{"space":{"name":"S2","generators":[{"name":"x","degree":1}]},
            "structure":{"generators":[{"name":"g1","degree":1}]},
            "twisting":{"explicit":[[["x"],"g1","1"]]}}"#,
    );
    assert_eq!(code(&bautlab(&["report", p.to_str().unwrap()])), 0);
    assert_eq!(code(&bautlab(&["compare", p.to_str().unwrap()])), 2);
}

#[test]
fn small_window_exits_with_three() {
    let o = bautlab(&["report", "s2_wedge_s2", "--max-degree", "4", "--trust-margin", "0"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("--trust-margin 1"));
    assert_eq!(code(&bautlab(&["report", "s2_wedge_s2", "--max-degree", "4", "--trust-margin", "+1"])), 0);
}

#[test]
fn simplified_and_unreduced_is_refused() {
    let mut doc = parse(library::get("u1_over_s2").unwrap(), false).unwrap();
    doc.options.reduced = Some(false);
    let settings = Settings { variant: Some(VariantSpec::Simplified), ..Settings::default() };
    let err = run(&doc, Kind::Report, &settings, Format::Text).unwrap_err();
    assert_eq!(err.status() as i32, 1);
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_bautlab"))
        .args(["validate", "s2"])
        .env("BAUTLAB_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn toml_and_json_agree() {
    let json = r#"{"space":{"name":"S2","generators":[{"name":"x","degree":1}]},
        "structure":{"generators":[{"name":"g1","degree":1}]},
        "twisting":{"characteristic_classes":[{"name":"c1","degree":2,"pairing":{"sx":"2"},"pi_generator":"g1"}]},
        "options":{"max_degree":6}}"#;
    let toml = std::fs::read_to_string(model_file("u1_over_s2_k2.toml")).unwrap();
    assert_eq!(parse(json, false).unwrap(), parse(&toml, true).unwrap());
}
