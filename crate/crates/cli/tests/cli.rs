use std::path::Path;
use std::process::{Command, Output};

fn itsnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_itsnet"))
        .args(args)
        .env_remove("ITSNET_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn check_rejects_boundary_profile_with_exit_1() {
    let out = itsnet(&["check", "--spec", "comb:a=3", "--n", "4", "--t", "1", "--profile", "uniform:1/9"]);
    assert_eq!(code(&out), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"]["status"], "not_achievable");
    assert_eq!(v["verdict"]["witness"]["hacked"], serde_json::json!([4]));
    assert_eq!(v["verdict"]["witness"]["r_secrecy"], "1/3");
    assert_eq!(v["config"]["seed"]["seed"], "00000000000000000000000000000000");
}

#[test]
fn check_accepts_interior_profile_with_exit_0() {
    let out = itsnet(&["check", "--spec", "comb:a=3", "--n", "4", "--t", "1", "--profile", "uniform:1/10"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn relaxed_failure_is_undecided_with_exit_2() {
    let out = itsnet(&[
        "check", "--spec", "comb:a=3", "--n", "4", "--t", "1", "--profile", "uniform:1/9", "--method", "relaxed",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn capacity_prints_exact_and_decimal() {
    let out = itsnet(&["capacity", "--n", "4", "--t", "1"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("channel capacity = 1/3 (≈ 0.3333)"));
    let out = itsnet(&["capacity", "--n", "5", "--t", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["channel"], "1/3");
}

#[test]
fn capacity_with_too_many_hacked_nodes_fails() {
    let out = itsnet(&["capacity", "--n", "4", "--t", "3"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn rates_reports_hybrid_numbers() {
    let out = itsnet(&[
        "rates", "--scheme", "hybrid:lambda=1/2:pairwise|comb:a=25", "--n", "100", "--t", "1",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("(≈ 26.53)"), "{text}");
    assert!(text.contains("(≈ 0.09781)"), "{text}");
}

#[test]
fn missing_file_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.bin");
    let out = itsnet(&["check", "--store", p(&missing), "--t", "1", "--profile", "uniform:1/9"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn garbage_keystore_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.bin");
    std::fs::write(&junk, b"not a keystore").unwrap();
    let out = itsnet(&["check", "--store", p(&junk), "--t", "1", "--profile", "uniform:1/9"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn unknown_flag_is_not_a_checker_exit_code() {
    let out = itsnet(&["check", "--frobnicate"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn encrypt_decrypt_roundtrip_of_one_kibibyte() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name);
    let plaintext: Vec<u8> = (0..1024u32).map(|k| (k * 37 % 251) as u8).collect();
    std::fs::write(path("plain"), &plaintext).unwrap();

    let out = itsnet(&["keygen", "--scheme", "comb:a=3", "--n", "4", "--l", "12000", "--seed", "5", "--out", p(&path("ks"))]);
    assert_eq!(code(&out), 0);
    let out = itsnet(&[
        "keygen", "--scheme", "comb:a=3", "--n", "4", "--l", "12000", "--seed", "5", "--node", "3", "--out",
        p(&path("view3")),
    ]);
    assert_eq!(code(&out), 0);

    let out = itsnet(&[
        "encrypt", "--keystore", p(&path("ks")), "--node", "1", "--peer", "3", "--in", p(&path("plain")), "--out",
        p(&path("ct")), "--state", p(&path("s1")), "--seed", "11",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = itsnet(&[
        "decrypt", "--keystore", p(&path("view3")), "--in", p(&path("ct")), "--out", p(&path("back")), "--state",
        p(&path("s3")),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(path("back")).unwrap(), plaintext);

    // The same ciphertext again is a replay.
    let out = itsnet(&[
        "decrypt", "--keystore", p(&path("view3")), "--in", p(&path("ct")), "--out", p(&path("back2")), "--state",
        p(&path("s3")),
    ]);
    assert_ne!(code(&out), 0);

    // A second 1 KiB message would exceed the 12000-bit channel budget.
    let out = itsnet(&[
        "encrypt", "--keystore", p(&path("ks")), "--node", "1", "--peer", "3", "--in", p(&path("plain")), "--out",
        p(&path("ct2")), "--state", p(&path("s1")), "--seed", "11",
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name);
    std::fs::write(path("plain"), vec![0xA5u8; 100]).unwrap();
    for run in ["a", "b"] {
        let ks = path(&format!("ks_{run}"));
        let out = itsnet(&["keygen", "--scheme", "random:p=1/2", "--n", "5", "--l", "2000", "--seed", "3", "--out", p(&ks)]);
        assert_eq!(code(&out), 0);
        let out = itsnet(&[
            "encrypt", "--keystore", p(&ks), "--node", "2", "--peer", "5", "--in", p(&path("plain")), "--out",
            p(&path(&format!("ct_{run}"))), "--state", p(&path(&format!("st_{run}"))), "--seed", "8",
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read(path("ks_a")).unwrap(), std::fs::read(path("ks_b")).unwrap());
    assert_eq!(std::fs::read(path("ct_a")).unwrap(), std::fs::read(path("ct_b")).unwrap());

    let csv = |seed: &str| {
        stdout(&itsnet(&[
            "experiment", "lemma", "--r", "200", "--ratio", "0.5,0.9,1.0", "--trials", "20", "--seed", seed,
        ]))
    };
    let first = csv("4");
    assert_eq!(first, csv("4"));
    assert_eq!(first.lines().count(), 4);
    assert!(first.starts_with("experiment,params,trials,successes,p_hat,ci_low,ci_high,seed"));
}

#[test]
fn seed_is_read_from_environment_and_echoed() {
    let out = Command::new(env!("CARGO_BIN_EXE_itsnet"))
        .args(["capacity", "--n", "4", "--t", "1"])
        .env("ITSNET_SEED", "42")
        .output()
        .unwrap();
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("2a000000000000000000000000000000"), "{err}");
}

#[test]
fn multipath_plans_and_reports_separator() {
    let dir = tempfile::tempdir().unwrap();
    let topo = dir.path().join("path.json");
    std::fs::write(&topo, r#"{"n": 3, "adjacency": {"1": [2], "2": [3]}}"#).unwrap();
    let out = itsnet(&["multipath", "--topology", p(&topo), "--s", "1", "--dst", "3", "--t", "1"]);
    assert_eq!(code(&out), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["infeasible"]["max"], 1);
    assert_eq!(v["infeasible"]["separator"], serde_json::json!([2]));

    let k4 = dir.path().join("k4.json");
    std::fs::write(&k4, r#"{"n": 4, "adjacency": {"1": [2, 3, 4], "2": [3, 4], "3": [4]}}"#).unwrap();
    let out = itsnet(&["multipath", "--topology", p(&k4), "--s", "1", "--dst", "2", "--t", "1", "--m", "100"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["plan"]["paths"].as_array().unwrap().len(), 2);
    // direct edge plus one relay path: three one-time-pad hops
    assert_eq!(v["plan"]["total_bits"], 300);

    let out = itsnet(&[
        "multipath", "--topology", p(&k4), "--s", "1", "--dst", "2", "--t", "2", "--blocked", "1-3",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn simulate_certifies_interior_profile() {
    let out = itsnet(&[
        "simulate", "--spec", "comb:a=3", "--n", "4", "--l", "600", "--t", "1", "--profile", "uniform:1/18", "--d",
        "16", "--seed", "2",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["certified"], true);
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 5);
}

#[test]
fn reference_tables_all_pass() {
    let out = itsnet(&["paper-tables"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(!stdout(&out).contains("FAIL"));
}
