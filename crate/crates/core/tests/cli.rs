use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mubgeo::incidence::Incidence;
use mubgeo::lineops::LineOperator;
use mubgeo::phasespace::{PhaseTable, RadonTable};
use mubgeo::twoparticle::{Summary, Transcript};

fn mubgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mubgeo"))
        .args(args)
        .env_remove("MUBGEO_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_matrix(
    dir: &Path,
    name: &str,
    d: usize,
    entry: impl Fn(usize, usize) -> (f64, f64),
) -> String {
    let rows: Vec<Vec<[f64; 2]>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let (re, im) = entry(i, j);
                    [re, im]
                })
                .collect()
        })
        .collect();
    let path = dir.join(name);
    fs::write(
        &path,
        serde_json::json!({ "d": d, "matrix": rows }).to_string(),
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn geometry_check_passes() {
    let o = mubgeo(&["geometry", "dapg", "3", "--check"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("12 points, 9 lines"));
    assert!(!s.contains("FAIL"));
}

#[test]
fn geometry_fpp_sizes() {
    let o = mubgeo(&["geometry", "fpp", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let g = Incidence::from_json(stdout(&o).trim()).unwrap();
    assert_eq!(g.points().len(), 31);
    assert_eq!(g.lines().len(), 31);
}

#[test]
fn geometry_rejects_non_prime() {
    let o = mubgeo(&["geometry", "apg", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("d must be an odd prime"));
    assert_eq!(
        mubgeo(&["geometry", "apg", "3", "--format", "csv"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(mubgeo(&["geometry", "hex", "3"]).status.code(), Some(2));
}

#[test]
fn geometry_out_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let o = mubgeo(&[
        "geometry",
        "apg",
        "3",
        "--check",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let g = Incidence::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(g.points().len(), 9);
}

#[test]
fn mub_and_lineops_round_trip() {
    let o = mubgeo(&["mub", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 4);
    for line in s.lines() {
        let (d, _, states) = mubgeo::mub::basis_from_json(line).unwrap();
        assert_eq!((d, states.len()), (3, 3));
    }
    let o = mubgeo(&["mub", "5", "--basis", "CB"]);
    assert_eq!(stdout(&o).lines().count(), 1);

    let o = mubgeo(&["lineops", "3", "--line", "1,1"]);
    assert_eq!(o.status.code(), Some(0));
    let l = LineOperator::from_json(stdout(&o).trim()).unwrap();
    assert_eq!((l.m_ddot, l.m0), (1, 1));
    assert_eq!(stdout(&mubgeo(&["lineops", "5"])).lines().count(), 25);
    assert_eq!(
        mubgeo(&["lineops", "5", "--family", "0,1"]).status.code(),
        Some(2)
    );
}

#[test]
fn lineops_check() {
    let o = mubgeo(&["lineops", "5", "--check"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("parity        holds"));
    let o = mubgeo(&["lineops", "5", "--family", "2,1", "--check"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("parity        fails"));
}

#[test]
fn wigner_maximally_mixed() {
    let dir = tempfile::tempdir().unwrap();
    let rho = write_matrix(dir.path(), "rho.json", 3, |i, j| {
        (if i == j { 1.0 / 3.0 } else { 0.0 }, 0.0)
    });
    let out = dir.path().join("w.csv");
    let o = mubgeo(&["wigner", &rho, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sum_w=1.000000000000"));
    let w = PhaseTable::from_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(w.values.iter().all(|v| (v - 1.0 / 9.0).abs() < 1e-12));
}

#[test]
fn wigner_computational_basis_state_with_radon() {
    let dir = tempfile::tempdir().unwrap();
    let rho = write_matrix(dir.path(), "p.json", 3, |i, j| {
        (if i == 0 && j == 0 { 1.0 } else { 0.0 }, 0.0)
    });
    let out = dir.path().join("w.json");
    let rout = dir.path().join("r.csv");
    let o = mubgeo(&[
        "wigner",
        &rho,
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
        "--radon-out",
        rout.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let w = PhaseTable::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    for a in 0..3 {
        for b in 0..3 {
            let t = if a == 0 { 1.0 / 3.0 } else { 0.0 };
            assert!((w.get(a, b) - t).abs() < 1e-12);
        }
    }
    let r = RadonTable::from_json(&fs::read_to_string(&rout).unwrap()).unwrap();
    assert!((r.get(0, mubgeo::incidence::BasisLabel::Cb) - 1.0).abs() < 1e-12);

    // radon subcommand reproduces the table from the saved Wigner file
    let o = mubgeo(&["radon", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r2 = RadonTable::from_csv(&stdout(&o)).unwrap();
    assert_eq!(r, r2);
}

#[test]
fn wigner_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    assert_eq!(
        mubgeo(&["wigner", bad.to_str().unwrap()]).status.code(),
        Some(3)
    );

    let trace = write_matrix(dir.path(), "t.json", 3, |i, j| {
        (if i == j { 1.0 } else { 0.0 }, 0.0)
    });
    let o = mubgeo(&["wigner", &trace]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("trace"));

    let neg = write_matrix(dir.path(), "n.json", 3, |i, j| match (i, j) {
        (0, 0) => (1.5, 0.0),
        (1, 1) => (-0.5, 0.0),
        _ => (0.0, 0.0),
    });
    let o = mubgeo(&["wigner", &neg]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("positive semidefinite"));

    let herm = write_matrix(dir.path(), "h.json", 3, |i, j| match (i, j) {
        (0, 1) => (0.0, 0.2),
        (i, j) if i == j => (1.0 / 3.0, 0.0),
        _ => (0.0, 0.0),
    });
    let o = mubgeo(&["wigner", &herm]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("Hermitian"));

    assert_eq!(
        mubgeo(&["wigner", "/nonexistent/rho.json"]).status.code(),
        Some(3)
    );
}

#[test]
fn meanking_mkp_all_correct() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.jsonl");
    let o = mubgeo(&[
        "meanking",
        "mkp",
        "5",
        "--rounds",
        "1000",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let summary: Summary = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(summary.correct, 1000);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1000);
    for line in text.lines() {
        let t = Transcript::from_json(line).unwrap();
        assert!(t.correct);
        assert_eq!(t.seed, 7);
    }
}

#[test]
fn meanking_tmk_reports_exact_expectation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.jsonl");
    let o = mubgeo(&[
        "meanking",
        "tmk",
        "3",
        "--rounds",
        "900",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let summary: Summary = serde_json::from_str(s.lines().next().unwrap()).unwrap();
    assert_eq!(summary.rounds, 900);
    assert_eq!(summary.correct + summary.undetermined, 900);
    assert!(s.contains("exact_rate="));
}

#[test]
fn meanking_usage_errors() {
    assert_eq!(
        mubgeo(&["meanking", "mkp", "2", "--rounds", "5", "--seed", "1"])
            .status
            .code(),
        Some(2)
    );
    let o = mubgeo(&["meanking", "mkp", "5", "--rounds", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seed"));
    assert_eq!(
        mubgeo(&["meanking", "mkp", "5", "--rounds", "0", "--seed", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn seed_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_mubgeo"))
        .args(["meanking", "mkp", "3", "--rounds", "3"])
        .env("MUBGEO_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        stdout(&mubgeo(&[
            "meanking", "mkp", "3", "--rounds", "3", "--seed", "5"
        ]))
    );
}

#[test]
fn identical_seeds_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for p in [&a, &b] {
        let o = mubgeo(&[
            "meanking",
            "tmk",
            "5",
            "--rounds",
            "300",
            "--seed",
            "42",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn selftest_exit_codes() {
    let o = mubgeo(&["selftest", "3", "5", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("check"));
    assert!(!stdout(&o).contains("FAIL"));
    assert_eq!(mubgeo(&["selftest", "11"]).status.code(), Some(0));
    assert_eq!(mubgeo(&["selftest", "6"]).status.code(), Some(2));
    assert_eq!(mubgeo(&["selftest", "29"]).status.code(), Some(2));
}
