//! Compiles and runs a small C program against the generated header and the
//! static library. `cargo test` only refreshes the rlib, so the static
//! library is rebuilt here first.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "equimax.h"

int main(void) {
    char *out = NULL;
    if (equimax_key_identity_discrepancy(6, &out) != EQUIMAX_STATUS_OK) return 10;
    if (strcmp(out, "0") != 0) return 11;
    equimax_string_free(out);

    EquimaxModel *model = NULL;
    if (equimax_model_parse("weibull:shape=2,scale=1", &model) != EQUIMAX_STATUS_OK) return 12;
    double pdf = 0, cdf = 0;
    if (equimax_model_evaluate(model, 1.0, &pdf, &cdf) != EQUIMAX_STATUS_OK) return 13;
    equimax_model_free(model);

    if (equimax_model_parse("nope", &model) != EQUIMAX_STATUS_INVALID_MODEL) return 14;
    char *err = equimax_last_error();
    if (err == NULL) return 15;
    equimax_string_free(err);

    printf("%s %.12f\n", equimax_version(), cdf);
    return 0;
}
"#;

fn target_profile_dir() -> PathBuf {
    // tests run from <target>/<profile>/deps/<name>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib_dir = target_profile_dir();
    let status = Command::new(std::env::var("CARGO").unwrap_or_else(|_| "cargo".into()))
        .args(["build", "--quiet", "-p", "equimax-ffi", "--lib", "--target-dir"])
        .arg(lib_dir.parent().unwrap())
        .status()
        .expect("cargo available");
    assert!(status.success(), "building the static library failed");
    let staticlib = lib_dir.join("libequimax_ffi.a");
    assert!(staticlib.exists(), "missing {}", staticlib.display());
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");

    let work = tempfile::tempdir().unwrap();
    let src = work.path().join("smoke.c");
    let bin = work.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();

    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&staticlib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());

    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let stdout = String::from_utf8(run.stdout).unwrap();
    let expected_cdf = 1.0 - (-1.0f64).exp();
    assert!(stdout.starts_with("equimax/"));
    assert!(stdout.trim_end().ends_with(&format!("{expected_cdf:.12}")));
}
