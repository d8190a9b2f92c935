use std::path::Path;
use std::process::{Command, Output};

fn run(home: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fusionlab"))
        .arg("--home")
        .arg(home)
        .args(args)
        .env_remove("FUSIONLAB_HOME")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read(home: &Path, rel: &str) -> String {
    std::fs::read_to_string(home.join(rel)).unwrap()
}

#[test]
fn construct_classify_and_match_a1_level_ten() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path();
    let o = run(h, &["construct", "--affine", "A,1,10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(h.join("data/A1k10.json").exists());

    let o = run(h, &["classify-mi", "A1k10"]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_str(&read(h, "invariants/A1k10.json")).unwrap();
    assert_eq!(doc["invariants"].as_array().unwrap().len(), 3);
    assert_eq!(doc["complete"], true);

    let o = run(h, &["nimrep", "A1k10", "--match"]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_str(&read(h, "nimreps/A1k10-match.json")).unwrap();
    let m = &doc["matching"];
    assert!(m["unmatched_invariants"].as_array().unwrap().is_empty());
    let dims: Vec<usize> = doc["nimreps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["matrices"][0].as_array().unwrap().len())
        .collect();
    assert!(dims.contains(&6) && dims.contains(&7) && dims.contains(&11));

    let o = run(h, &["nimrep", "A1k10", "--dim", "6", "--as", "e6"]);
    assert_eq!(code(&o), 0);
    let o = run(h, &["graph", "e6", "--label", "1"]);
    assert_eq!(code(&o), 0);
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("dir=none").count(), 5);
    let out = h.join("e6.dot");
    let o = run(
        h,
        &["graph", "e6", "--label", "1", "--out", out.to_str().unwrap()],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(out).unwrap(), dot);

    let list = stdout(&run(h, &["list"]));
    assert!(list.contains("A1k10") && list.contains("e6"));
}

#[test]
fn stored_documents_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path();
    let steps: [&[&str]; 3] = [
        &["construct", "--group", "symmetric:3", "--name", "s3"],
        &["classify-mi", "s3"],
        &["nimrep", "s3", "--dim", "2"],
    ];
    let files = ["data/s3.json", "invariants/s3.json", "nimreps/s3-dim2.json"];
    let mut first = Vec::new();
    for s in steps {
        assert_eq!(code(&run(h, s)), 0, "{s:?}");
    }
    for f in files {
        first.push(read(h, f));
    }
    for s in steps {
        assert_eq!(code(&run(h, s)), 0);
    }
    for (f, before) in files.iter().zip(&first) {
        assert_eq!(&read(h, f), before, "{f}");
    }
    let inv: serde_json::Value = serde_json::from_str(&first[1]).unwrap();
    assert_eq!(inv["invariants"].as_array().unwrap().len(), 48);
    let log = read(h, "runs.log");
    assert_eq!(log.lines().count(), 6);
    assert!(log.lines().all(|l| l.split('\t').next().unwrap().ends_with("us")));
}

#[test]
fn verify_round_trips_stored_data() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path();
    for args in [
        &["construct", "--lattice", "[[2]]", "--name", "z2"][..],
        &["construct", "--lattice", "E8"],
        &["construct", "--group", "quaternion", "--name", "q8"],
    ] {
        assert_eq!(code(&run(h, args)), 0, "{args:?}");
    }
    for name in ["z2", "lattice-E8", "q8"] {
        let o = run(h, &["verify", name]);
        assert_eq!(code(&o), 0, "{name}: {}", stdout(&o));
        let o = run(h, &["--json", "verify", name]);
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert!(v.is_object());
    }
}

#[test]
fn galois_and_fusion_reports() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path();
    assert_eq!(code(&run(h, &["construct", "--affine", "A,1,2"])), 0);
    let o = run(h, &["fusion", "A1k2", "1", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "1 × 1 = 0 + 2\n");
    let o = run(h, &["galois", "A1k2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("ℓ=3"));
    assert_eq!(code(&run(h, &["fusion", "A1k2", "1", "9"])), 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path();
    // verification failure: not stored
    assert_eq!(code(&run(h, &["construct", "--fixture", "m27"])), 2);
    assert!(!h.join("data/m27.json").exists());
    assert_eq!(
        code(&run(h, &["construct", "--fixture", "m27", "--allow-invalid"])),
        0
    );
    assert_eq!(code(&run(h, &["verify", "m27"])), 2);
    assert_eq!(code(&run(h, &["classify-mi", "m27"])), 2);
    // budget exhausted
    assert_eq!(code(&run(h, &["construct", "--affine", "A,1,10"])), 0);
    let o = run(h, &["classify-mi", "A1k10", "--budget", "1"]);
    assert_eq!(code(&o), 3);
    let doc: serde_json::Value = serde_json::from_str(&read(h, "invariants/A1k10.json")).unwrap();
    assert_eq!(doc["complete"], false);
    // bad input
    assert_eq!(code(&run(h, &["verify", "nothing"])), 4);
    assert_eq!(code(&run(h, &["construct", "--lattice", "[[1]]"])), 4);
    assert_eq!(code(&run(h, &["construct", "--affine", "B,2,1"])), 4);
    assert_eq!(
        code(&run(h, &["construct", "--affine", "A,1,2", "--name", "../x"])),
        4
    );
}
