use std::path::Path;
use std::process::{Command, Output};

fn casemark(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casemark"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "warn")
        .output()
        .expect("running casemark")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn full_flow_through_the_binary() {
    let dir = tempfile::TempDir::new().unwrap();
    let root = dir.path();
    ok(&casemark(&["fixture", "fx", "--verses", "300"], root));
    let cfg = root.join("fx/casemark.toml");
    let cfg = cfg.to_str().unwrap();
    for cmd in ["silver", "extract", "eval", "ablate", "analyze", "project"] {
        let stdout = ok(&casemark(&["--config", cfg, cmd], root));
        assert!(!stdout.trim().is_empty(), "{cmd} listed no files");
        for line in stdout.lines() {
            assert!(Path::new(line).is_file(), "{cmd} reported missing {line}");
        }
    }
    let out = root.join("fx/out");
    let markers = std::fs::read_to_string(out.join("markers/sfx.tsv")).unwrap();
    let grams: Vec<&str> = markers.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(grams, ["ibus$", "um$"]);
    let groups = std::fs::read_to_string(out.join("analysis/groups.tsv")).unwrap();
    assert!(groups.starts_with("group\tsize\teng\tsfx\tiso\tnp_id\t"));
    let nps = std::fs::read_to_string(out.join("parallel_nps.tsv")).unwrap();
    assert!(nps.lines().any(|l| l.split('\t').nth(1) == Some("sfx-a")));
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::TempDir::new().unwrap();
    let root = dir.path();
    ok(&casemark(&["fixture", "fx", "--verses", "200"], root));
    let cfg = root.join("fx/casemark.toml");
    let alt = root.join("alt");
    ok(&casemark(
        &["--config", cfg.to_str().unwrap(), "--out", alt.to_str().unwrap(), "--languages", "iso", "--jobs", "1", "extract"],
        root,
    ));
    assert!(alt.join("markers/iso.tsv").is_file());
    assert!(!alt.join("markers/sfx.tsv").exists());
    let manifest = std::fs::read_to_string(alt.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"iso\""));
}

#[test]
fn errors_exit_nonzero_with_a_message() {
    let dir = tempfile::TempDir::new().unwrap();
    let root = dir.path();

    let missing = casemark(&["--config", "nope.toml", "extract"], root);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.toml"));

    std::fs::write(root.join("bad.toml"), "[corpus]\nalignments = [\"gone.tsv\"]\n").unwrap();
    let bad = casemark(&["--config", "bad.toml", "extract"], root);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("gone.tsv"));

    ok(&casemark(&["fixture", "fx", "--verses", "100"], root));
    let ablate = casemark(&["--config", "fx/casemark.toml", "--ablate", "sideways", "extract"], root);
    assert!(!ablate.status.success());
}
