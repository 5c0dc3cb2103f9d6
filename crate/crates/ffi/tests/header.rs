use std::path::{Path, PathBuf};
use std::process::Command;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.ancestors().nth(2).unwrap().to_path_buf()
}

fn compiler() -> String {
    std::env::var("CC").unwrap_or_else(|_| "cc".into())
}

fn run(cmd: &mut Command) -> std::process::Output {
    let out = cmd.output().unwrap_or_else(|e| panic!("{cmd:?}: {e}"));
    assert!(out.status.success(), "{cmd:?}\n{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
    out
}

#[test]
fn header_compiles_as_c_and_cxx() {
    let include = manifest_dir().join("include");
    let header = include.join("dodeca.h");
    assert!(header.exists());
    run(Command::new(compiler()).args(["-std=c11", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"]).arg(&header));
    run(Command::new("c++").args(["-std=c++17", "-Wall", "-Werror", "-fsyntax-only", "-x", "c++"]).arg(&header));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(manifest_dir().join("include/dodeca.h")).unwrap();
    let source = std::fs::read_to_string(manifest_dir().join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() > 10);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

fn link_and_run(lib: &Path) {
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let src = manifest_dir().join("tests/c/smoke.c");
    run(Command::new(compiler())
        .args(["-std=c11", "-Wall", "-Werror", "-I"])
        .arg(manifest_dir().join("include"))
        .arg(&src)
        .arg(lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe));
    let out = run(&mut Command::new(&exe));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(&format!("version={} vertices=", env!("CARGO_PKG_VERSION"))), "{text}");
}

#[test]
fn c_program_links_against_static_library() {
    let lib = artifact_dir().join("libdodeca_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    link_and_run(&lib);
}
