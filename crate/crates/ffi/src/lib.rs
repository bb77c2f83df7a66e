//! C ABI over `mubgeo`.
//!
//! Every fallible function returns a [`MubgeoStatus`]; on failure the message
//! is available from [`mubgeo_last_error`] on the same thread. Matrices are
//! row-major with interleaved `re, im` doubles. Basis labels are `int32_t`:
//! [`MUBGEO_BASIS_CB`] for the computational basis, otherwise the residue.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mubgeo::incidence::{self, BasisLabel, GeometryKind, Incidence};
use mubgeo::linalg::Matrix;
use mubgeo::phasespace::{self, DensityMatrix, PhaseTable};
use mubgeo::twoparticle::{Game, Protocol, SeededRng};
use mubgeo::{lineops, mub, selftest, Error, Field, C64};

/// Basis label of the computational basis.
pub const MUBGEO_BASIS_CB: i32 = -1;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MubgeoStatus {
    Ok = 0,
    NotOddPrime = 1,
    InvalidArgument = 2,
    InvalidInput = 3,
    InvariantFailure = 4,
    NullPointer = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MubgeoGeometryKind {
    Apg = 0,
    Dapg = 1,
    Fpp = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MubgeoProtocol {
    MeanKing = 0,
    Tracking = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MubgeoSummary {
    pub rounds: u64,
    pub correct: u64,
    pub undetermined: u64,
    pub failure_rate: f64,
}

/// Opaque incidence structure.
pub struct MubgeoGeometry(Incidence);

/// Opaque simulator with precomputed states.
pub struct MubgeoGame(Game);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: MubgeoStatus, msg: impl Into<String>) -> MubgeoStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> MubgeoStatus {
    let status = match e {
        Error::NotOddPrime(_) => MubgeoStatus::NotOddPrime,
        Error::Parse(_) | Error::InvalidDensity(_) | Error::DimensionMismatch { .. } => {
            MubgeoStatus::InvalidInput
        }
        Error::InvalidFamily
        | Error::InvalidParameters(_)
        | Error::NoInverse
        | Error::ModulusMismatch(..) => MubgeoStatus::InvalidArgument,
        _ => MubgeoStatus::InvariantFailure,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), MubgeoStatus>) -> MubgeoStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MubgeoStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(MubgeoStatus::Panic, "internal panic"),
    }
}

fn field(d: u64) -> Result<Field, MubgeoStatus> {
    Field::new(d).map_err(from_error)
}

fn basis(field: &Field, b: i32) -> Result<BasisLabel, MubgeoStatus> {
    match b {
        MUBGEO_BASIS_CB => Ok(BasisLabel::Cb),
        b if b >= 0 && (b as u32) < field.d() => Ok(BasisLabel::Residue(b as u32)),
        _ => Err(fail(
            MubgeoStatus::InvalidArgument,
            format!("basis label {b} out of range"),
        )),
    }
}

fn out_slice<'a, T>(out: *mut T, len: usize, need: usize) -> Result<&'a mut [T], MubgeoStatus> {
    if out.is_null() {
        return Err(fail(MubgeoStatus::NullPointer, "output buffer is null"));
    }
    if len < need {
        return Err(fail(
            MubgeoStatus::BufferTooSmall,
            format!("buffer holds {len}, need {need}"),
        ));
    }
    // SAFETY: caller guarantees `out` points to at least `len` writable elements.
    Ok(unsafe { std::slice::from_raw_parts_mut(out, need) })
}

fn in_slice<'a, T>(p: *const T, len: usize, need: usize) -> Result<&'a [T], MubgeoStatus> {
    if p.is_null() {
        return Err(fail(MubgeoStatus::NullPointer, "input buffer is null"));
    }
    if len < need {
        return Err(fail(
            MubgeoStatus::BufferTooSmall,
            format!("input holds {len}, need {need}"),
        ));
    }
    // SAFETY: caller guarantees `p` points to at least `len` readable elements.
    Ok(unsafe { std::slice::from_raw_parts(p, need) })
}

fn write_matrix(m: &Matrix, out: &mut [f64]) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            out[2 * (i * n + j)] = m[(i, j)].re;
            out[2 * (i * n + j) + 1] = m[(i, j)].im;
        }
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s)
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Message of the last failed call on this thread, or NULL. Free with
/// [`mubgeo_string_free`].
#[no_mangle]
pub extern "C" fn mubgeo_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |c| c.clone().into_raw())
    })
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Whether `d` is an odd prime.
#[no_mangle]
pub extern "C" fn mubgeo_is_odd_prime(d: u64) -> bool {
    mubgeo::modfield::check_odd_prime(d)
}

/// Builds a geometry; free it with [`mubgeo_geometry_free`].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_geometry_new(
    kind: MubgeoGeometryKind,
    d: u64,
    out: *mut *mut MubgeoGeometry,
) -> MubgeoStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(MubgeoStatus::NullPointer, "out is null"));
        }
        let kind = match kind {
            MubgeoGeometryKind::Apg => GeometryKind::Apg,
            MubgeoGeometryKind::Dapg => GeometryKind::Dapg,
            MubgeoGeometryKind::Fpp => GeometryKind::Fpp,
        };
        let g = incidence::build(kind, d).map_err(from_error)?;
        *out = Box::into_raw(Box::new(MubgeoGeometry(g)));
        Ok(())
    })
}

/// # Safety
/// `g` must come from [`mubgeo_geometry_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_geometry_free(g: *mut MubgeoGeometry) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live geometry handle.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_geometry_num_points(g: *const MubgeoGeometry) -> usize {
    g.as_ref().map_or(0, |g| g.0.points().len())
}

/// # Safety
/// `g` must be a live geometry handle.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_geometry_num_lines(g: *const MubgeoGeometry) -> usize {
    g.as_ref().map_or(0, |g| g.0.lines().len())
}

/// # Safety
/// `g` must be a live geometry handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_geometry_is_member(
    g: *const MubgeoGeometry,
    point: usize,
    line: usize,
    out: *mut bool,
) -> MubgeoStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            return Err(fail(MubgeoStatus::NullPointer, "null argument"));
        };
        if point >= g.0.points().len() || line >= g.0.lines().len() {
            return Err(fail(
                MubgeoStatus::InvalidArgument,
                "point or line index out of range",
            ));
        }
        *out = g.0.is_member(point, line);
        Ok(())
    })
}

/// Runs every axiom for the geometry's kind; `out` receives whether all passed.
///
/// # Safety
/// `g` must be a live geometry handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_geometry_check_axioms(
    g: *const MubgeoGeometry,
    out: *mut bool,
) -> MubgeoStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            return Err(fail(MubgeoStatus::NullPointer, "null argument"));
        };
        *out = incidence::check_axioms(&g.0).all_passed();
        Ok(())
    })
}

/// JSON export; free with [`mubgeo_string_free`]. NULL on a null handle.
///
/// # Safety
/// `g` must be a live geometry handle.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_geometry_to_json(g: *const MubgeoGeometry) -> *mut c_char {
    g.as_ref()
        .map_or(ptr::null_mut(), |g| into_c_string(g.0.to_json()))
}

/// MUB vector `|m;b⟩` into `out` (`2d` doubles).
///
/// # Safety
/// `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_mub_state(
    d: u64,
    b: i32,
    m: u32,
    out: *mut f64,
    len: usize,
) -> MubgeoStatus {
    guard(|| {
        let f = field(d)?;
        let b = basis(&f, b)?;
        let v = mub::mub_state(&f, b, m % f.d());
        let out = out_slice(out, len, 2 * f.dim())?;
        for (i, z) in v.iter().enumerate() {
            out[2 * i] = z.re;
            out[2 * i + 1] = z.im;
        }
        Ok(())
    })
}

/// Projector `|m;b⟩⟨m;b|` into `out` (`2d²` doubles).
///
/// # Safety
/// `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_projector(
    d: u64,
    b: i32,
    m: u32,
    out: *mut f64,
    len: usize,
) -> MubgeoStatus {
    guard(|| {
        let f = field(d)?;
        let b = basis(&f, b)?;
        let out = out_slice(out, len, 2 * f.dim() * f.dim())?;
        write_matrix(&mub::projector(&f, b, m % f.d()), out);
        Ok(())
    })
}

/// Line operator `L_(m̈, m₀)` of family `(r, s)` into `out` (`2d²` doubles);
/// `(1, 0)` is the symmetric family.
///
/// # Safety
/// `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_line_operator(
    d: u64,
    r: u32,
    s: u32,
    m_ddot: u32,
    m0: u32,
    out: *mut f64,
    len: usize,
) -> MubgeoStatus {
    guard(|| {
        let f = field(d)?;
        let fam = lineops::Family::new(&f, r, s).map_err(from_error)?;
        let l = lineops::general_family_line(&f, fam, m_ddot % f.d(), m0 % f.d())
            .map_err(from_error)?;
        let out = out_slice(out, len, 2 * f.dim() * f.dim())?;
        write_matrix(&l.matrix, out);
        Ok(())
    })
}

/// Wigner table of the density matrix `rho` (`2d²` doubles) into `out`
/// (`d²` doubles, `m̈` outer). Fails with `InvalidInput` unless `rho` is
/// Hermitian, unit-trace and positive semidefinite within `tol`.
///
/// # Safety
/// `rho` must hold `rho_len` doubles and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_wigner(
    d: u64,
    rho: *const f64,
    rho_len: usize,
    tol: f64,
    out: *mut f64,
    len: usize,
) -> MubgeoStatus {
    guard(|| {
        let f = field(d)?;
        let n = f.dim();
        let input = in_slice(rho, rho_len, 2 * n * n)?;
        let m = Matrix::from_fn(n, n, |i, j| {
            C64::new(input[2 * (i * n + j)], input[2 * (i * n + j) + 1])
        });
        let rho = DensityMatrix::new(m, tol).map_err(from_error)?;
        let w = phasespace::wigner(&f, &rho).map_err(from_error)?;
        out_slice(out, len, n * n)?.copy_from_slice(&w.values);
        Ok(())
    })
}

/// Radon transform of a Wigner table (`d²` doubles) into `out`
/// (`d(d+1)` doubles): `d` values per basis, computational basis first.
///
/// # Safety
/// `w` must hold `w_len` doubles and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_radon(
    d: u64,
    w: *const f64,
    w_len: usize,
    out: *mut f64,
    len: usize,
) -> MubgeoStatus {
    guard(|| {
        let f = field(d)?;
        let n = f.dim();
        let table = PhaseTable {
            d: f.d(),
            values: in_slice(w, w_len, n * n)?.to_vec(),
        };
        let r = phasespace::radon(&f, &table).map_err(from_error)?;
        let out = out_slice(out, len, n * (n + 1))?;
        for (i, v) in r.values.iter().flatten().enumerate() {
            out[i] = *v;
        }
        Ok(())
    })
}

/// Prepares a retrodiction game; free with [`mubgeo_game_free`].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_game_new(
    protocol: MubgeoProtocol,
    d: u64,
    out: *mut *mut MubgeoGame,
) -> MubgeoStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(MubgeoStatus::NullPointer, "out is null"));
        }
        let f = field(d)?;
        let p = match protocol {
            MubgeoProtocol::MeanKing => Protocol::Mkp,
            MubgeoProtocol::Tracking => Protocol::Tmk,
        };
        *out = Box::into_raw(Box::new(MubgeoGame(Game::new(&f, p))));
        Ok(())
    })
}

/// # Safety
/// `g` must come from [`mubgeo_game_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_game_free(g: *mut MubgeoGame) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Plays `rounds` seeded rounds, King basis uniform per round.
///
/// # Safety
/// `g` must be a live game handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_game_run(
    g: *const MubgeoGame,
    rounds: u64,
    seed: u64,
    out: *mut MubgeoSummary,
) -> MubgeoStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            return Err(fail(MubgeoStatus::NullPointer, "null argument"));
        };
        if rounds == 0 {
            return Err(fail(
                MubgeoStatus::InvalidArgument,
                "rounds must be at least 1",
            ));
        }
        let (_, s) = g.0.run(rounds as usize, &mut SeededRng::new(seed));
        *out = MubgeoSummary {
            rounds: s.rounds as u64,
            correct: s.correct as u64,
            undetermined: s.undetermined as u64,
            failure_rate: s.failure_rate,
        };
        Ok(())
    })
}

/// Runs the invariant suite for `d`; `out` receives whether every check passed.
/// On failure the first failing check is reported by [`mubgeo_last_error`].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mubgeo_selftest(d: u64, out: *mut bool) -> MubgeoStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(MubgeoStatus::NullPointer, "out is null"));
        }
        let report = selftest::run(d, selftest::DEFAULT_MAX_D).map_err(from_error)?;
        *out = report.all_passed();
        if let Some(c) = report.first_failure() {
            set_error(format!("{} [{}] {}", c.name, c.reference, c.detail));
        }
        Ok(())
    })
}
