//! Scripted REPL sessions compared byte for byte with recorded transcripts.
//!
//! Set `TSS_BLESS=1` to rewrite the `.out` files from the current binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

fn sessions() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/sessions");
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "tss"))
        .collect();
    v.sort();
    v
}

pub fn transcript(script: &Path) -> Vec<u8> {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tss"))
        .args(["repl", "--echo"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&fs::read(script).unwrap()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success(), "{} exited with {}", script.display(), out.status);
    out.stdout
}

#[test]
fn twenty_sessions_match_their_transcripts() {
    let scripts = sessions();
    assert_eq!(scripts.len(), 20);
    let bless = std::env::var_os("TSS_BLESS").is_some();
    let mut mismatched = Vec::new();
    for script in &scripts {
        let expected_path = script.with_extension("out");
        let actual = transcript(script);
        if bless {
            fs::write(&expected_path, &actual).unwrap();
            continue;
        }
        let expected = fs::read(&expected_path).unwrap_or_default();
        if actual != expected {
            mismatched.push(format!(
                "{}\n--- expected\n{}\n--- actual\n{}",
                script.display(),
                String::from_utf8_lossy(&expected),
                String::from_utf8_lossy(&actual)
            ));
        }
    }
    assert!(mismatched.is_empty(), "{}", mismatched.join("\n"));
}

#[test]
fn sessions_are_stable_across_runs() {
    let script = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/sessions/08-compare.tss");
    assert_eq!(transcript(&script), transcript(&script));
}
