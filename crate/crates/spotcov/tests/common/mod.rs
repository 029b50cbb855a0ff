#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_spotcov")
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Runs `spotcov <command> --config <config> --out <out> [extra...]`.
pub fn run(command: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(bin())
        .arg(command)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .env_remove("SPOTCOV_THREADS")
        .output()
        .expect("spawn spotcov")
}

pub fn run_ok(command: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let o = run(command, config, out, extra);
    assert!(
        o.status.success(),
        "spotcov {command} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

pub fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// File name to contents for every file in `dir`.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut m = BTreeMap::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let e = e.unwrap();
        m.insert(
            e.file_name().to_string_lossy().into_owned(),
            std::fs::read(e.path()).unwrap(),
        );
    }
    m
}

/// Runs `command` from `config`, then reruns it from the echoed
/// configuration at each thread count. Returns the first mismatch, if any.
pub fn rerun_mismatch(command: &str, config: &Path, root: &Path, threads: &[usize]) -> Option<String> {
    let first = root.join(format!("{command}-first"));
    let o = run_ok(command, config, &first, &["--threads", "1"]);
    let echoed = first.join("resolved_config.toml");
    let echo_text = std::fs::read(&echoed).unwrap();
    if o.stdout != echo_text {
        return Some(format!("{command}: stdout echo differs from resolved_config.toml"));
    }
    let reference = snapshot(&first);
    for &t in threads {
        let out = root.join(format!("{command}-t{t}"));
        let ts = t.to_string();
        run_ok(command, &echoed, &out, &["--threads", &ts]);
        let again = snapshot(&out);
        if again.keys().ne(reference.keys()) {
            return Some(format!("{command} at {t} threads: file sets differ"));
        }
        for (name, bytes) in &reference {
            if &again[name] != bytes {
                return Some(format!("{command} at {t} threads: {name} differs"));
            }
        }
    }
    None
}

/// Configurations exercising every command on a small scale.
pub struct Scenario {
    pub command: &'static str,
    pub config: String,
}

pub fn scenarios() -> Vec<Scenario> {
    let prices = fixture("prices.csv");
    let p = prices.display();
    vec![
        Scenario {
            command: "simulate",
            config: "seed = 11\n[simulate]\nmodel = \"bates\"\nhorizon = 1.0\nn = 500\n".into(),
        },
        Scenario {
            command: "estimate",
            config: format!(
                "[estimate]\ninput = \"{p}\"\nkernel = \"beta\"\nestimator = \"tkcv\"\n\
                 bandwidth = \"cv\"\ncv_grid = [0.05, 0.1, 0.2]\neval_points = 21\nbands = true\n"
            ),
        },
        Scenario {
            command: "select-bandwidth",
            config: format!("[estimate]\ninput = \"{p}\"\nkernel = \"onesided\"\n"),
        },
        Scenario {
            command: "mc-study",
            config: "seed = 5\n[mc]\nreps = 24\nfrequencies = [100, 200]\n\
                     kernels = [\"gaussian\", \"uniform\"]\nbandwidth = 0.2\neval_points = 21\n"
                .into(),
        },
        Scenario {
            command: "forecast",
            config: "seed = 3\n[forecast]\ndays = 60\nsteps_per_day = 48\nhorizons = [1, 5]\n".into(),
        },
    ]
}
