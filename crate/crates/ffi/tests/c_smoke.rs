//! Compiles and runs a small C program against the generated header and
//! the freshly built shared library. Requires a C compiler on PATH.

use std::path::PathBuf;
use std::process::Command;

fn target_dir() -> PathBuf {
    // test binaries live in <target>/<profile>/deps
    let exe = std::env::current_exe().expect("current_exe");
    exe.parent()
        .and_then(|p| p.parent())
        .expect("target profile dir")
        .to_path_buf()
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "truncal.h"

int main(void) {
    TruncalConfig *cfg = NULL;
    if (truncal_config_new(3, 1, &cfg) != TRUNCAL_STATUS_OK) return 1;

    const double w[3] = {1.0, 1.0, 1.0};
    const double x[3] = {10.0, 9.0, -100.0};

    double value = 0.0;
    if (truncal_trunc_inner(cfg, w, x, 3, &value) != TRUNCAL_STATUS_OK) return 2;
    if (value != 9.0) return 3;

    double lo = 0.0, hi = 0.0;
    bool lo_att = false, hi_att = false;
    if (truncal_robust_range(cfg, w, x, 3, &lo, &hi, &lo_att, &hi_att)
            != TRUNCAL_STATUS_OK) return 4;
    if (lo != -100.0 || hi != 10.0 || !lo_att || !hi_att) return 5;

    bool fooled = false;
    if (truncal_robust_misclassified(cfg, w, x, 3, 1, &fooled)
            != TRUNCAL_STATUS_OK) return 6;
    if (!fooled) return 7;

    double witness[3];
    bool found = false;
    if (truncal_worst_case_witness(cfg, w, x, 3, 1, witness, &found)
            != TRUNCAL_STATUS_OK) return 8;
    if (!found) return 9;
    double flipped = 0.0;
    if (truncal_trunc_inner(cfg, w, witness, 3, &flipped) != TRUNCAL_STATUS_OK) return 10;
    if (flipped >= 0.0) return 11;

    TruncalBoundReport report;
    if (truncal_generalization_bound(1000, 4, 1, 0.05, &report) != TRUNCAL_STATUS_OK) return 12;
    if (!(report.total > 1.20 && report.total < 1.21)) return 13;

    /* error path: invalid config populates the thread-local message */
    TruncalConfig *bad = NULL;
    if (truncal_config_new(4, 2, &bad) != TRUNCAL_STATUS_INVALID_ARGUMENT) return 14;
    if (strlen(truncal_last_error_message()) == 0) return 15;

    truncal_config_free(cfg);
    printf("c smoke ok\n");
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        panic!("no C compiler available as `{cc}`; set CC");
    }
    let include_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(
        include_dir.join("truncal.h").exists(),
        "header not generated"
    );
    // `cargo test` may leave the cdylib only under deps/ with a hashed
    // name; stage whichever artifact is newest under a stable name
    let lib_dir = target_dir();
    let mut candidates: Vec<PathBuf> = vec![
        lib_dir.join("libtruncal_ffi.so"),
        lib_dir.join("libtruncal_ffi.dylib"),
    ];
    if let Ok(entries) = std::fs::read_dir(lib_dir.join("deps")) {
        for e in entries.flatten() {
            let name = e.file_name().to_string_lossy().into_owned();
            if name.starts_with("libtruncal_ffi")
                && (name.ends_with(".so") || name.ends_with(".dylib"))
            {
                candidates.push(e.path());
            }
        }
    }
    let newest = candidates
        .into_iter()
        .filter(|p| p.exists())
        .max_by_key(|p| {
            std::fs::metadata(p)
                .and_then(|m| m.modified())
                .unwrap_or(std::time::SystemTime::UNIX_EPOCH)
        })
        .expect("shared library not built");

    let work = tempfile::tempdir().unwrap();
    let staged = work.path().join(if newest.extension().is_some_and(|e| e == "dylib") {
        "libtruncal_ffi.dylib"
    } else {
        "libtruncal_ffi.so"
    });
    std::fs::copy(&newest, &staged).unwrap();
    let lib_dir = work.path().to_path_buf();
    let src = work.path().join("smoke.c");
    let bin = work.path().join("smoke");
    std::fs::write(&src, C_PROGRAM).unwrap();

    let compile = Command::new(&cc)
        .arg(&src)
        .arg("-o")
        .arg(&bin)
        .arg(format!("-I{}", include_dir.display()))
        .arg(format!("-L{}", lib_dir.display()))
        .arg("-ltruncal_ffi")
        .arg("-Wall")
        .arg("-Werror")
        .output()
        .expect("compiler invocation");
    assert!(
        compile.status.success(),
        "cc failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&bin)
        .env("LD_LIBRARY_PATH", &lib_dir)
        .env("DYLD_LIBRARY_PATH", &lib_dir)
        .output()
        .expect("run smoke");
    assert!(
        run.status.success(),
        "smoke exited {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout), "c smoke ok\n");
}
