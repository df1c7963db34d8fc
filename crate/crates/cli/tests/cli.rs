use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nilnike(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilnike"))
        .current_dir(dir)
        .env_remove("NILNIKE_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn error_kind(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn heisenberg_exchange_and_attack() {
    let dir = tempfile::tempdir().unwrap();
    let out = nilnike(
        dir.path(),
        &[
            "exchange",
            "--platform",
            "heisenberg",
            "--p",
            "5",
            "--m",
            "1",
            "--seed",
            "7",
            "--transcript",
            "t.json",
            "--test-mode",
        ],
    );
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["consistent"], true);

    let p101 = [
        "exchange",
        "--platform",
        "heisenberg",
        "--p",
        "101",
        "--seed",
        "2",
        "--transcript",
        "h.json",
        "--test-mode",
    ];
    assert!(nilnike(dir.path(), &p101).status.success());
    let out = nilnike(
        dir.path(),
        &[
            "attack",
            "--transcript",
            "h.json",
            "--attacks",
            "generic",
            "--report",
            "r.json",
        ],
    );
    assert!(out.status.success());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report[0]["algorithm"], "generic");
    assert_eq!(report[0]["success"], true);
}

#[test]
fn quaternion_five_users() {
    let dir = tempfile::tempdir().unwrap();
    let out = nilnike(
        dir.path(),
        &[
            "exchange",
            "--platform",
            "quaternion",
            "--p",
            "5",
            "--alpha",
            "2",
            "--n",
            "4",
            "--seed",
            "1",
            "--transcript",
            "q.json",
            "--test-mode",
        ],
    );
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["users"], 5);
    let out = nilnike(dir.path(), &["attack", "--transcript", "q.json", "--attacks", "all"]);
    assert!(out.status.success());
    let algs: Vec<_> = stdout_json(&out)
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["algorithm"].clone())
        .collect();
    assert_eq!(algs, ["generic", "quaternion-linear"]);
}

#[test]
fn heisenberg_rejects_class_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = nilnike(dir.path(), &["exchange", "--platform", "heisenberg", "--n", "3"]);
    assert!(!out.status.success());
    assert_eq!(error_kind(&out), "ClassUnsupported");
}

#[test]
fn truncated_transcript() {
    let dir = tempfile::tempdir().unwrap();
    assert!(
        nilnike(dir.path(), &["exchange", "--p", "101", "--transcript", "t.json"])
            .status
            .success()
    );
    let path = dir.path().join("t.json");
    let mut t: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    t["shares"].as_array_mut().unwrap().remove(0);
    std::fs::write(&path, t.to_string()).unwrap();
    let out = nilnike(dir.path(), &["attack", "--transcript", "t.json"]);
    assert!(!out.status.success());
    assert_eq!(error_kind(&out), "MissingShare");
}

#[test]
fn wrong_key_fails_the_attack() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "exchange",
        "--p",
        "101",
        "--seed",
        "5",
        "--transcript",
        "t.json",
        "--test-mode",
    ];
    assert!(nilnike(dir.path(), &args).status.success());
    let path = dir.path().join("t.json");
    let mut t: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let other = t["generators"][0].clone();
    t["derived_keys"][0] = other;
    std::fs::write(&path, t.to_string()).unwrap();
    let out = nilnike(dir.path(), &["attack", "--transcript", "t.json"]);
    assert!(!out.status.success());
    assert!(stdout_json(&out)
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["success"] == false));
}

#[test]
fn large_prime_linear_only() {
    let dir = tempfile::tempdir().unwrap();
    let p = "2305843009213693951";
    assert!(nilnike(
        dir.path(),
        &[
            "exchange",
            "--p",
            p,
            "--seed",
            "11",
            "--transcript",
            "t.json",
            "--test-mode"
        ]
    )
    .status
    .success());
    let out = nilnike(dir.path(), &["attack", "--transcript", "t.json"]);
    assert!(!out.status.success());
    let reports = stdout_json(&out);
    assert_eq!(reports[0]["refused"], true);
    assert_eq!(reports[1]["success"], true);
    assert!(
        nilnike(dir.path(), &["attack", "--transcript", "t.json", "--attacks", "linear"])
            .status
            .success()
    );
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let t = format!("{name}.json");
        let r = format!("{name}.report");
        let args = [
            "exchange",
            "--platform",
            "cyclic-triple",
            "--alpha",
            "3",
            "--seed",
            "9",
            "--transcript",
            &t,
            "--test-mode",
        ];
        assert!(nilnike(dir.path(), &args).status.success());
        assert!(nilnike(
            dir.path(),
            &["attack", "--transcript", &t, "--report", &r, "--no-timing"]
        )
        .status
        .success());
    }
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("a.json"), read("b.json"));
    assert_eq!(read("a.report"), read("b.report"));
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: Option<&str>, file: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_nilnike"));
        cmd.current_dir(dir.path()).env_remove("NILNIKE_SEED");
        if let Some(s) = seed {
            cmd.env("NILNIKE_SEED", s);
        }
        assert!(cmd
            .args(["exchange", "--transcript", file])
            .output()
            .unwrap()
            .status
            .success());
        std::fs::read_to_string(dir.path().join(file)).unwrap()
    };
    let a = run(Some("42"), "a.json");
    assert_eq!(a, run(Some("42"), "b.json"));
    assert_ne!(a, run(None, "c.json"));
    assert!(a.contains("\"seed\": 42"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.conf"),
        "platform = quaternion\np = 7\nalpha = 2\nn = 2\nseed = 3\n",
    )
    .unwrap();
    let out = nilnike(
        dir.path(),
        &["exchange", "--config", "run.conf", "--p", "5", "--transcript", "t.json"],
    );
    assert!(out.status.success());
    assert!(stdout_json(&out)["platform"]
        .as_str()
        .unwrap()
        .starts_with("quaternion p=5 alpha=2 n=2"));
}

#[test]
fn bench_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = nilnike(dir.path(), &["bench", "--grid", ""]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "platform,p,alpha,n,algorithm,ops,millis,refused\n"
    );

    let args = [
        "bench",
        "--grid",
        "101,401",
        "--seed",
        "4",
        "--no-timing",
        "--workers",
        "2",
        "--out",
        "a.csv",
    ];
    assert!(nilnike(dir.path(), &args).status.success());
    let mut args2 = args;
    args2[9] = "b.csv";
    args2[7] = "1";
    assert!(nilnike(dir.path(), &args2).status.success());
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read_to_string(dir.path().join("b.csv")).unwrap());
    assert_eq!(a.lines().count(), 5);
    assert!(a.lines().nth(1).unwrap().starts_with("heisenberg,101,1,2,generic,"));

    let refused = nilnike(dir.path(), &["bench", "--grid", "2305843009213693951", "--no-timing"]);
    let text = String::from_utf8(refused.stdout).unwrap();
    assert!(text.contains("generic,0.0,0.0,true"));
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let out = nilnike(dir.path(), &["verify"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["passed"].as_array().unwrap().len(), 9);

    let out = nilnike(
        dir.path(),
        &[
            "verify",
            "--platform",
            "quaternion",
            "--p",
            "7",
            "--alpha",
            "2",
            "--suite",
            "quaternion-layer-formula",
        ],
    );
    assert!(out.status.success());

    let out = nilnike(dir.path(), &["verify", "--fixture", "corrupted-sign-table"]);
    assert!(!out.status.success());
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "InvariantFailed");
    assert_eq!(v["error"]["suite"], "quaternion-relations");
}

#[test]
fn bad_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = nilnike(dir.path(), &["exchange", "--platform", "octonion"]);
    assert!(!out.status.success());
    assert_eq!(error_kind(&out), "Config");
    let out = nilnike(dir.path(), &["attack", "--transcript", "absent.json"]);
    assert_eq!(error_kind(&out), "Io");
}
