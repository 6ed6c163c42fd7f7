use std::process::{Command, Output};

fn mupir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mupir"))
        .args(args)
        .env_remove("MUPIR_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(
        mupir(&["simulate", "--scheme", "cia1", "--theta", "1,2"]).status.code(),
        Some(0)
    );
    assert_eq!(mupir(&["audit", "--scheme", "cia1", "--N", "3"]).status.code(), Some(0));
    assert_eq!(mupir(&["audit", "--scheme", "strawman"]).status.code(), Some(2));
    // Equal demands are outside the distinct-demand scheme's domain.
    assert_eq!(
        mupir(&["simulate", "--scheme", "dd1", "--theta", "1,1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        mupir(&["simulate", "--scheme", "cia1", "--N", "1", "--theta", "1,2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(mupir(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        mupir(&["curve", "--set", "fig2a", "--points", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(mupir(&["curve", "--set", "nope"]).status.code(), Some(1));
    assert_eq!(mupir(&["verify-all", "--only", "11"]).status.code(), Some(1));
    assert_eq!(mupir(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "simulate", "--scheme", "pd", "--N", "3", "--theta", "2,1", "--seed", "41",
    ];
    let a = mupir(&args);
    let b = mupir(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = mupir(&[
        "simulate", "--scheme", "pd", "--N", "3", "--theta", "2,1", "--seed", "42",
    ]);
    assert_ne!(a.stdout, c.stdout);

    let t: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(t["load"], "2/3");
    assert_eq!(t["params"]["K"], 2);
}

#[test]
fn seed_from_environment() {
    let args = ["simulate", "--scheme", "cia1", "--N", "3", "--theta", "1,2"];
    let from_env = Command::new(env!("CARGO_BIN_EXE_mupir"))
        .args(args)
        .env("MUPIR_SEED", "9")
        .output()
        .unwrap();
    let explicit = mupir(&[&args[..], &["--seed", "9"]].concat());
    assert_eq!(from_env.stdout, explicit.stdout);
    assert_ne!(from_env.stdout, mupir(&args).stdout);
}

#[test]
fn realization_runs() {
    let o = mupir(&["simulate", "--scheme", "cia1", "--theta", "1,1", "--realization", "15"]);
    assert_eq!(o.status.code(), Some(0));
    let t: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(t["realization"], 15);
    assert_eq!(
        mupir(&["simulate", "--scheme", "cia1", "--theta", "1,1", "--realization", "16"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn curves() {
    let o = mupir(&["curve", "--set", "fig2a"]);
    let csv = stdout(&o);
    assert!(csv.starts_with("M,R,label\n"));
    assert!(csv.contains("0.25,1.5,cia\n"));
    assert!(csv.contains("0,2,pd\n"));
    assert!(csv.contains("distinct_optimal"));

    let csv = stdout(&mupir(&["curve", "--set", "fig3", "--points", "7"]));
    assert!(csv.contains("yu_bound"));
    assert!(csv.contains("1,2.2,yu_bound\n"));

    let json = mupir(&["curve", "--set", "gap", "--K", "6", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["curves"][0]["label"], "pd");
    assert_eq!(v["curves"][1]["label"], "converse_quarter_t0");
}

#[test]
fn audit_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("audit.json");
    let o = mupir(&[
        "audit",
        "--scheme",
        "cia2",
        "--db",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["distance"], "0/1");
}
