use std::path::{Path, PathBuf};
use std::process::Command;

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_declares_the_api() {
    let header =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/hashpeak.h"))
            .unwrap();
    for name in [
        "typedef struct HpParams HpParams;",
        "typedef struct HpSeries HpSeries;",
        "typedef struct HpTrajectory HpTrajectory;",
        "HP_STATUS_OK = 0",
        "HP_STATUS_PANIC = 7",
        "HpStatus hp_simulate(",
        "HpStatus hp_calibrate(",
        "HpStatus hp_project(",
        "const char *hp_last_error_message(void);",
        "void hp_trajectory_free(HpTrajectory *trajectory);",
    ] {
        assert!(header.contains(name), "header lacks {name:?}");
    }
}

#[test]
fn c_program_links_against_static_library() {
    let dir = target_dir();
    let lib = dir.join("libhashpeak_ffi.a");
    assert!(lib.is_file(), "{} not built", lib.display());
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success(), "compiling the C smoke test failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
