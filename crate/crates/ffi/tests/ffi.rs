use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use mubgeo_ffi::*;

fn last_error() -> Option<String> {
    let p = mubgeo_last_error();
    if p.is_null() {
        return None;
    }
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { mubgeo_string_free(p) };
    Some(s)
}

#[test]
fn geometry_handle_lifecycle() {
    let mut g = ptr::null_mut();
    let st = unsafe { mubgeo_geometry_new(MubgeoGeometryKind::Fpp, 5, &mut g) };
    assert_eq!(st, MubgeoStatus::Ok);
    unsafe {
        assert_eq!(mubgeo_geometry_num_points(g), 31);
        assert_eq!(mubgeo_geometry_num_lines(g), 31);
        let mut ok = false;
        assert_eq!(mubgeo_geometry_check_axioms(g, &mut ok), MubgeoStatus::Ok);
        assert!(ok);
        let mut member = false;
        assert_eq!(
            mubgeo_geometry_is_member(g, 0, 0, &mut member),
            MubgeoStatus::Ok
        );
        assert_eq!(
            mubgeo_geometry_is_member(g, 99, 0, &mut member),
            MubgeoStatus::InvalidArgument
        );
        let json = mubgeo_geometry_to_json(g);
        assert!(CStr::from_ptr(json)
            .to_str()
            .unwrap()
            .starts_with("{\"kind\":\"FPP\""));
        mubgeo_string_free(json);
        mubgeo_geometry_free(g);
        assert_eq!(mubgeo_geometry_num_points(ptr::null()), 0);
    }
}

#[test]
fn non_prime_reports_error() {
    let mut g = ptr::null_mut();
    let st = unsafe { mubgeo_geometry_new(MubgeoGeometryKind::Apg, 4, &mut g) };
    assert_eq!(st, MubgeoStatus::NotOddPrime);
    assert!(g.is_null());
    assert!(last_error().unwrap().contains("d must be an odd prime"));
    assert!(mubgeo_is_odd_prime(7));
    assert!(!mubgeo_is_odd_prime(9));
    let st = unsafe { mubgeo_geometry_new(MubgeoGeometryKind::Apg, 3, ptr::null_mut()) };
    assert_eq!(st, MubgeoStatus::NullPointer);
}

#[test]
fn line_operator_matches_closed_form() {
    let mut buf = vec![0.0; 18];
    let st = unsafe { mubgeo_line_operator(3, 1, 0, 1, 1, buf.as_mut_ptr(), buf.len()) };
    assert_eq!(st, MubgeoStatus::Ok);
    // δ_{n+n′,2} ω^{−(n−n′)}: entries (0,2), (1,1), (2,0)
    let w = |k: i32| {
        let t = 2.0 * std::f64::consts::PI * (k.rem_euclid(3)) as f64 / 3.0;
        (t.cos(), t.sin())
    };
    let expect = [((0, 2), w(2)), ((1, 1), (1.0, 0.0)), ((2, 0), w(-2))];
    for i in 0..3 {
        for j in 0..3 {
            let e = expect
                .iter()
                .find(|(p, _)| *p == (i, j))
                .map_or((0.0, 0.0), |x| x.1);
            assert!((buf[2 * (i * 3 + j)] - e.0).abs() < 1e-12);
            assert!((buf[2 * (i * 3 + j) + 1] - e.1).abs() < 1e-12);
        }
    }
    let mut small = vec![0.0; 4];
    let st = unsafe { mubgeo_line_operator(3, 1, 0, 1, 1, small.as_mut_ptr(), small.len()) };
    assert_eq!(st, MubgeoStatus::BufferTooSmall);
    let st = unsafe { mubgeo_line_operator(3, 0, 0, 1, 1, buf.as_mut_ptr(), buf.len()) };
    assert_eq!(st, MubgeoStatus::InvalidArgument);
}

#[test]
fn projector_and_state() {
    let mut v = vec![0.0; 6];
    assert_eq!(
        unsafe { mubgeo_mub_state(3, 0, 0, v.as_mut_ptr(), v.len()) },
        MubgeoStatus::Ok
    );
    let s = 1.0 / 3f64.sqrt();
    assert!(v
        .chunks(2)
        .all(|c| (c[0] - s).abs() < 1e-12 && c[1].abs() < 1e-12));
    let mut p = vec![0.0; 18];
    assert_eq!(
        unsafe { mubgeo_projector(3, MUBGEO_BASIS_CB, 2, p.as_mut_ptr(), p.len()) },
        MubgeoStatus::Ok
    );
    assert_eq!(p[2 * 8], 1.0);
    assert_eq!(p.iter().map(|x| x.abs()).sum::<f64>(), 1.0);
    assert_eq!(
        unsafe { mubgeo_projector(3, 3, 0, p.as_mut_ptr(), p.len()) },
        MubgeoStatus::InvalidArgument
    );
}

#[test]
fn wigner_and_radon() {
    let d = 5usize;
    let mut rho = vec![0.0; 2 * d * d];
    for i in 0..d {
        rho[2 * (i * d + i)] = 1.0 / d as f64;
    }
    let mut w = vec![0.0; d * d];
    let st = unsafe { mubgeo_wigner(5, rho.as_ptr(), rho.len(), 1e-10, w.as_mut_ptr(), w.len()) };
    assert_eq!(st, MubgeoStatus::Ok);
    assert!(w.iter().all(|x| (x - 1.0 / 25.0).abs() < 1e-12));
    let mut r = vec![0.0; d * (d + 1)];
    let st = unsafe { mubgeo_radon(5, w.as_ptr(), w.len(), r.as_mut_ptr(), r.len()) };
    assert_eq!(st, MubgeoStatus::Ok);
    assert!(r.iter().all(|x| (x - 0.2).abs() < 1e-12));

    rho[0] = 1.0;
    let st = unsafe { mubgeo_wigner(5, rho.as_ptr(), rho.len(), 1e-10, w.as_mut_ptr(), w.len()) };
    assert_eq!(st, MubgeoStatus::InvalidInput);
    assert!(last_error().unwrap().contains("trace"));
    let st = unsafe { mubgeo_wigner(5, ptr::null(), 0, 1e-10, w.as_mut_ptr(), w.len()) };
    assert_eq!(st, MubgeoStatus::NullPointer);
}

#[test]
fn games() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(
            mubgeo_game_new(MubgeoProtocol::MeanKing, 5, &mut g),
            MubgeoStatus::Ok
        );
        let mut s = MubgeoSummary::default();
        assert_eq!(mubgeo_game_run(g, 2000, 9, &mut s), MubgeoStatus::Ok);
        assert_eq!((s.rounds, s.correct, s.undetermined), (2000, 2000, 0));
        let mut again = MubgeoSummary::default();
        mubgeo_game_run(g, 2000, 9, &mut again);
        assert_eq!(s, again);
        assert_eq!(
            mubgeo_game_run(g, 0, 9, &mut s),
            MubgeoStatus::InvalidArgument
        );
        mubgeo_game_free(g);

        let mut g = ptr::null_mut();
        assert_eq!(
            mubgeo_game_new(MubgeoProtocol::Tracking, 3, &mut g),
            MubgeoStatus::Ok
        );
        assert_eq!(mubgeo_game_run(g, 3000, 1, &mut s), MubgeoStatus::Ok);
        assert_eq!(s.correct + s.undetermined, 3000);
        mubgeo_game_free(g);
    }
}

#[test]
fn selftest_through_ffi() {
    let mut ok = false;
    assert_eq!(unsafe { mubgeo_selftest(7, &mut ok) }, MubgeoStatus::Ok);
    assert!(ok);
    assert_eq!(
        unsafe { mubgeo_selftest(9, &mut ok) },
        MubgeoStatus::NotOddPrime
    );
}

#[test]
fn header_declares_exports() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/mubgeo.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "mubgeo_last_error",
        "mubgeo_string_free",
        "mubgeo_geometry_new",
        "mubgeo_line_operator",
        "mubgeo_wigner",
        "mubgeo_radon",
        "mubgeo_game_run",
        "mubgeo_selftest",
        "MUBGEO_STATUS_NOT_ODD_PRIME",
        "MUBGEO_BASIS_CB",
        "typedef struct MubgeoGeometry MubgeoGeometry;",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
}

/// Compiles and runs a C program against the header and the static library.
#[test]
fn c_program_links_against_static_library() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libmubgeo_ffi.a");
    assert!(
        lib.exists(),
        "static library not found at {}",
        lib.display()
    );
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "mubgeo.h"
int main(void) {
    MubgeoGeometry *g = NULL;
    if (mubgeo_geometry_new(MUBGEO_GEOMETRY_KIND_DAPG, 3, &g) != MUBGEO_STATUS_OK) return 1;
    bool ok = false;
    mubgeo_geometry_check_axioms(g, &ok);
    printf("%zu %zu %d\n", mubgeo_geometry_num_points(g), mubgeo_geometry_num_lines(g), ok);
    mubgeo_geometry_free(g);
    if (mubgeo_geometry_new(MUBGEO_GEOMETRY_KIND_DAPG, 4, &g) != MUBGEO_STATUS_NOT_ODD_PRIME) return 2;
    char *msg = mubgeo_last_error();
    printf("%s\n", msg);
    mubgeo_string_free(msg);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("12 9 1"));
    assert!(lines.next().unwrap().contains("d must be an odd prime"));
}
