use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const CONFIGS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");

fn duts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duts"))
        .args(args)
        .output()
        .expect("cannot run duts")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("duts-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn flagship_certificate(dir: &Path) -> PathBuf {
    let o = duts(&[
        "construct",
        "--config",
        &format!("{CONFIGS}/flagship.toml"),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    dir.join("certificate.txt")
}

#[test]
fn certificate_verifies_and_tampering_is_caught() {
    let dir = scratch("tamper");
    let cert = flagship_certificate(&dir);
    let path = cert.to_str().unwrap();
    assert_eq!(duts(&["verify", path]).status.code(), Some(0));

    // scale the first coefficient of f above mu
    let text = std::fs::read_to_string(&cert).unwrap();
    let mut in_f = false;
    let tampered: Vec<String> = text
        .lines()
        .map(|line| {
            if line == "begin f" {
                in_f = true;
            }
            if in_f && line.starts_with("17 ") {
                let w: Vec<&str> = line.split_whitespace().collect();
                let re: f64 = w[1].parse().unwrap();
                return format!("17 {} {}", re * 1.5 + 1.0, w[2]);
            }
            line.to_string()
        })
        .collect();
    let bad = dir.join("tampered.txt");
    std::fs::write(&bad, tampered.join("\n") + "\n").unwrap();
    let o = duts(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));

    let cut = dir.join("truncated.txt");
    std::fs::write(&cut, &text[..text.len() / 2]).unwrap();
    assert_eq!(duts(&["verify", cut.to_str().unwrap()]).status.code(), Some(1));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn unknown_config_key_names_the_field() {
    let dir = scratch("badkey");
    let base = std::fs::read_to_string(format!("{CONFIGS}/flagship.toml")).unwrap();
    let cfg = dir.join("bad.toml");
    std::fs::write(&cfg, base.replace("epsilon =", "epsilom =")).unwrap();
    let o = duts(&["construct", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilom"));

    std::fs::write(&cfg, base.replace("radius = 0.5", "radius = -0.5")).unwrap();
    let o = duts(&["construct", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("construct.L.set"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn solve_writes_coefficients() {
    let dir = scratch("solve");
    let o = duts(&[
        "solve",
        "--config",
        &format!("{CONFIGS}/solve.toml"),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.starts_with("objective 1.0"), "{stdout}");
    let text = std::fs::read_to_string(dir.join("approximation.txt")).unwrap();
    assert!(text.starts_with("format: 1\ncenter 0.0 0.0\n"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn zero_threads_is_rejected() {
    let o = duts(&["--threads", "0", "selftest", "--count", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_config_file_fails_cleanly() {
    let o = duts(&["construct", "--config", "/nonexistent/duts.toml"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}
