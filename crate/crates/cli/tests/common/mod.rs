//! Golden-file runner over `corpus/commands.tsv`.
//!
//! Set `CUSPCOBORD_BLESS=1` to rewrite the goldens instead of comparing.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

pub fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cuspcobord")
}

pub struct Case {
    pub name: String,
    pub args: Vec<String>,
}

pub fn cases() -> Vec<Case> {
    let text = fs::read_to_string(corpus().join("commands.tsv")).expect("commands.tsv");
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (name, args) = l.split_once('\t').expect("name<TAB>args");
            Case { name: name.to_string(), args: args.split_whitespace().map(str::to_string).collect() }
        })
        .collect()
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_in(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(bin()).args(args).current_dir(dir).output().expect("spawn cuspcobord");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

pub fn run(args: &[&str]) -> Run {
    run_in(&corpus(), args)
}

fn transcript(r: &Run) -> String {
    format!("exit: {}\n--- stdout\n{}--- stderr\n{}", r.code, r.stdout, r.stderr)
}

/// Runs one case; returns the list of mismatching artifacts.
pub fn check_case(case: &Case, scratch: &Path) -> Vec<String> {
    let out_dir = scratch.join(&case.name);
    let _ = fs::remove_dir_all(&out_dir);
    fs::create_dir_all(&out_dir).expect("scratch dir");
    let out_str = out_dir.to_string_lossy().into_owned();
    let args: Vec<String> = case.args.iter().map(|a| a.replace("{out}", &out_str)).collect();
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    let r = run(&argv);
    let mut artifacts = vec![(format!("{}.txt", case.name), transcript(&r).into_bytes())];
    let mut produced: Vec<_> = fs::read_dir(&out_dir).expect("scratch").map(|e| e.expect("entry").path()).collect();
    produced.sort();
    for path in produced {
        let name = path.file_name().expect("file name").to_string_lossy().into_owned();
        artifacts.push((name, fs::read(&path).expect("artifact")));
    }
    let golden = corpus().join("golden");
    let bless = std::env::var("CUSPCOBORD_BLESS").is_ok_and(|v| v == "1");
    let mut mismatches = Vec::new();
    for (name, bytes) in artifacts {
        let path = golden.join(&name);
        if bless {
            fs::create_dir_all(&golden).expect("golden dir");
            fs::write(&path, &bytes).expect("write golden");
        } else if fs::read(&path).ok().as_deref() != Some(&bytes[..]) {
            mismatches.push(name);
        }
    }
    mismatches
}
