//! Compiles a C program against the generated header and the static library.

use std::path::PathBuf;
use std::process::Command;

#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/c_smoke-… → target/<profile>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libentanglyze_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out_dir = tempfile_dir();
    let exe = out_dir.join("smoke");
    let status = Command::new(&cc)
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
    let _ = std::fs::remove_dir_all(&out_dir);
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc.to_string());
        }
    }
    Err(())
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("entanglyze-ffi-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
