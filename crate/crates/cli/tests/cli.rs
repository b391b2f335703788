use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn eidolon(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eidolon"))
        .current_dir(dir)
        .env_remove("EIDOLON_SEED")
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn keygen(dir: &Path, seed: &str) {
    let out = eidolon(
        dir,
        &["keygen", "--n", "16", "--k", "3", "--density", "0.5", "--seed", seed, "--out-pk", "pk", "--out-sk", "sk"],
    );
    assert!(out.status.success(), "{out:?}");
}

#[test]
fn keygen_summary() {
    let dir = TempDir::new().unwrap();
    let out = eidolon(
        dir.path(),
        &["keygen", "--n", "16", "--k", "3", "--density", "0.5", "--seed", "7", "--out-pk", "pk", "--out-sk", "sk"],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("sizes=[6,5,5]"), "{text}");
    let m: usize = text
        .split_whitespace()
        .find_map(|f| f.strip_prefix("m="))
        .unwrap()
        .parse()
        .unwrap();
    // 85 allowed pairs at p = 12/17: mean 60, sd about 4.2.
    assert!((40..=80).contains(&m), "m = {m}");
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let mode = fs::metadata(dir.path().join("sk")).unwrap().permissions().mode();
        assert_eq!(mode & 0o077, 0);
    }
}

#[test]
fn usage_and_range_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let missing = eidolon(dir.path(), &["keygen", "--n", "16", "--k", "3", "--out-pk", "pk"]);
    assert_eq!(missing.status.code(), Some(2));
    let range = eidolon(dir.path(), &["keygen", "--n", "2", "--k", "3", "--out-pk", "pk", "--out-sk", "sk"]);
    assert_eq!(range.status.code(), Some(2));
    let unknown = eidolon(dir.path(), &["sizes", "--n", "16", "--t", "8", "--bogus"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn help_for_every_command() {
    let dir = TempDir::new().unwrap();
    for cmd in ["keygen", "sign", "verify", "sizes", "soundness", "attack", "experiment", "export-graph", "generate"] {
        let out = eidolon(dir.path(), &[cmd, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}");
        assert!(stdout(&out).contains("Usage"), "{cmd}");
    }
}

#[test]
fn sign_verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    keygen(d, "7");
    fs::write(d.join("msg"), b"attack at dawn").unwrap();
    fs::write(d.join("other"), b"attack at dusk").unwrap();
    for variant in ["plain", "merkle", "merkle-shared"] {
        let sign = eidolon(
            d,
            &["sign", "--pk", "pk", "--sk", "sk", "--msg-file", "msg", "--t", "16", "--variant", variant, "--seed", "1", "--out", "sig"],
        );
        assert!(sign.status.success(), "{sign:?}");
        let ok = eidolon(d, &["verify", "--pk", "pk", "--msg-file", "msg", "--sig", "sig"]);
        assert_eq!(ok.status.code(), Some(0), "{variant}");
        let bad = eidolon(d, &["verify", "--pk", "pk", "--msg-file", "other", "--sig", "sig"]);
        assert_eq!(bad.status.code(), Some(1), "{variant}");
        assert!(!bad.stderr.is_empty());
        let bytes = fs::read(d.join("sig")).unwrap();
        fs::write(d.join("short"), &bytes[..bytes.len() / 2]).unwrap();
        let short = eidolon(d, &["verify", "--pk", "pk", "--msg-file", "msg", "--sig", "short"]);
        assert_eq!(short.status.code(), Some(2), "{variant}");
    }
}

#[test]
fn message_from_stdin() {
    use std::io::Write;
    use std::process::Stdio;
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    keygen(d, "3");
    fs::write(d.join("msg"), b"piped").unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_eidolon"))
        .current_dir(d)
        .args(["sign", "--pk", "pk", "--sk", "sk", "--msg-file", "-", "--t", "4", "--seed", "2", "--out", "sig"])
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"piped").unwrap();
    assert!(child.wait().unwrap().success());
    let ok = eidolon(d, &["verify", "--pk", "pk", "--msg-file", "msg", "--sig", "sig"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn sizes_table() {
    let dir = TempDir::new().unwrap();
    let big = stdout(&eidolon(dir.path(), &["sizes", "--n", "200", "--t", "256"]));
    assert!(big.contains("1.57 MiB") && big.contains("144.5 KiB"), "{big}");
    let small = stdout(&eidolon(dir.path(), &["sizes", "--n", "16", "--t", "8"]));
    assert!(small.contains("4.27 KiB") && small.contains("2.52 KiB"), "{small}");
    let shared = stdout(&eidolon(
        dir.path(),
        &["sizes", "--n", "200", "--t", "256", "--s-bar", "0.9375", "--variant", "merkle-shared"],
    ));
    assert!(shared.contains("137.0 KiB") && !shared.contains("plain "), "{shared}");
}

#[test]
fn seeded_runs_are_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [a.path(), b.path()] {
        keygen(dir, "11");
        fs::write(dir.join("msg"), b"same").unwrap();
        let sign = eidolon(dir, &["sign", "--pk", "pk", "--sk", "sk", "--msg-file", "msg", "--t", "8", "--seed", "5", "--out", "sig"]);
        assert!(sign.status.success());
        let exp = eidolon(
            dir,
            &["experiment", "--n-min", "10", "--n-max", "12", "--trials", "2", "--seed", "4", "--no-timing", "--csv", "out.csv"],
        );
        assert!(exp.status.success(), "{exp:?}");
    }
    for file in ["pk", "sk", "sig", "out.csv"] {
        assert_eq!(fs::read(a.path().join(file)).unwrap(), fs::read(b.path().join(file)).unwrap(), "{file}");
    }
    let csv = fs::read_to_string(a.path().join("out.csv")).unwrap();
    assert!(csv.starts_with("n,k,density,seed,instance_kind,solver,colors_used,conflicts,recovered,wall_ms,timeout\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2 * 2);
}

#[test]
fn seed_from_environment() {
    let dir = TempDir::new().unwrap();
    let run = |out: &str| {
        Command::new(env!("CARGO_BIN_EXE_eidolon"))
            .current_dir(dir.path())
            .env("EIDOLON_SEED", "99")
            .args(["keygen", "--n", "12", "--k", "3", "--out-pk", out, "--out-sk", &format!("{out}.sk")])
            .output()
            .unwrap()
    };
    assert!(run("a").status.success() && run("b").status.success());
    assert_eq!(fs::read(dir.path().join("a")).unwrap(), fs::read(dir.path().join("b")).unwrap());
}

#[test]
fn export_and_attack() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    keygen(d, "7");
    let export = eidolon(d, &["export-graph", "--pk", "pk", "--out", "g.txt"]);
    assert!(export.status.success());
    let text = fs::read_to_string(d.join("g.txt")).unwrap();
    assert!(text.starts_with("16 ") && text.lines().next().unwrap().ends_with(" 3"));
    let attack = eidolon(
        d,
        &["attack", "--graph", "g.txt", "--solvers", "exact", "--time-limit", "30", "--csv", "a.csv", "--coloring-out", "c.txt"],
    );
    assert_eq!(attack.status.code(), Some(0), "{attack:?}");
    assert_eq!(fs::read_to_string(d.join("c.txt")).unwrap().lines().count(), 16);
    let csv = fs::read_to_string(d.join("a.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains(",external,exact,"));

    // K4 has no 3-coloring: no solver succeeds.
    fs::write(d.join("k4.txt"), "4 6 3\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
    let fail = eidolon(d, &["attack", "--graph", "k4.txt"]);
    assert_eq!(fail.status.code(), Some(1));
    fs::write(d.join("bad.txt"), "4 1 3\n2 1\n").unwrap();
    assert_eq!(eidolon(d, &["attack", "--graph", "bad.txt"]).status.code(), Some(2));
}

#[test]
fn generate_and_soundness() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let gen = eidolon(d, &["generate", "--n", "12", "--k", "4", "--seed", "1", "--out", "g.txt", "--coloring-out", "c.txt"]);
    assert!(gen.status.success());
    assert_eq!(fs::read_to_string(d.join("c.txt")).unwrap().lines().count(), 12);
    let er = eidolon(d, &["generate", "--n", "12", "--k", "4", "--kind", "er", "--seed", "1", "--out", "-"]);
    assert!(stdout(&er).starts_with("12 "));
    let sound = eidolon(
        d,
        &["soundness", "--n", "8", "--k", "3", "--t-bad", "1", "--rounds", "1,4", "--trials", "200", "--seed", "3"],
    );
    assert!(sound.status.success(), "{sound:?}");
    let text = stdout(&sound);
    assert!(text.contains("t_bad=1") && text.lines().count() == 4, "{text}");
}
