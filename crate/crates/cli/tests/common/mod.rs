#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Copies `configs/` and `fixtures/` under `dir`, so caches and outputs
/// stay out of the source tree. Returns the copied configs directory.
pub fn sandbox(dir: &Path) -> PathBuf {
    for sub in ["configs", "fixtures"] {
        let to = dir.join(sub);
        fs::create_dir_all(&to).unwrap();
        for entry in fs::read_dir(repo_root().join(sub)).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "toml") {
                fs::copy(&path, to.join(path.file_name().unwrap())).unwrap();
            }
        }
    }
    dir.join("configs")
}

pub fn tiaopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tiaopt"))
        .args(args)
        .output()
        .expect("spawning tiaopt")
}

pub fn run_ok(args: &[&str]) {
    let out = tiaopt(args);
    assert!(
        out.status.success(),
        "tiaopt {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Contents of every CSV file in `dir`, by file name.
pub fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}
