//! The `d + 1` mutually unbiased bases of a single `d`-level system, their
//! projectors and the clock/shift operators.
//!
//! For a residue label `b` the states are
//! `⟨n|m;b⟩ = ω^{(b/2)·n(n−1) − n·m} / √d`; the computational basis (`CB`) is
//! `|m;CB⟩ = |m⟩`. The phase convention fixes the conjugation closure
//! `conj|m;b⟩ = |−m;−b⟩`.

use serde::{Deserialize, Serialize};

use crate::incidence::BasisLabel;
use crate::linalg::{self, Matrix, StateVector};
use crate::modfield::{Field, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MubLabel {
    pub m: u32,
    pub b: BasisLabel,
}

impl MubLabel {
    pub fn new(m: u32, b: BasisLabel) -> Self {
        MubLabel { m, b }
    }

    /// All `d(d+1)` labels, column-major (`CB` column first).
    pub fn all(d: u32) -> Vec<MubLabel> {
        BasisLabel::all(d)
            .into_iter()
            .flat_map(|b| (0..d).map(move |m| MubLabel { m, b }))
            .collect()
    }
}

/// Exponent of `ω` in `⟨n|m;b⟩` for a residue basis, reduced mod d.
pub(crate) fn amplitude_exponent(field: &Field, b: u32, m: u32, n: u32) -> u32 {
    let nn1 = field.mul(n, field.sub(n, 1));
    field.sub(field.mul(field.half(b), nn1), field.mul(n, m))
}

pub fn mub_state(field: &Field, b: BasisLabel, m: u32) -> StateVector {
    let d = field.dim();
    match b {
        BasisLabel::Cb => {
            let mut v = StateVector::zeros(d);
            v[(m % field.d()) as usize] = C64::new(1.0, 0.0);
            v
        }
        BasisLabel::Residue(b) => {
            let norm = 1.0 / (d as f64).sqrt();
            StateVector::from_iterator(
                d,
                field
                    .residues()
                    .map(|n| field.omega(amplitude_exponent(field, b, m, n)) * norm),
            )
        }
    }
}

/// The `d` states of basis `b`, ordered by `m`.
pub fn basis(field: &Field, b: BasisLabel) -> Vec<StateVector> {
    field.residues().map(|m| mub_state(field, b, m)).collect()
}

/// `P(m,b) = |m;b⟩⟨b;m|`
pub fn projector(field: &Field, b: BasisLabel, m: u32) -> Matrix {
    let v = mub_state(field, b, m);
    linalg::outer(&v, &v)
}

/// Maximum over all pairs from distinct bases of `| |⟨u|v⟩|² − 1/d |`,
/// together with the maximum orthonormality defect within each basis.
pub fn unbiasedness_check(field: &Field) -> (f64, f64) {
    let d = field.d();
    let bases: Vec<Vec<StateVector>> = BasisLabel::all(d)
        .into_iter()
        .map(|b| basis(field, b))
        .collect();
    let inv_d = 1.0 / d as f64;
    let mut cross: f64 = 0.0;
    let mut within: f64 = 0.0;
    for (i, bi) in bases.iter().enumerate() {
        for (j, bj) in bases.iter().enumerate() {
            for (a, u) in bi.iter().enumerate() {
                for (c, v) in bj.iter().enumerate() {
                    let ov = linalg::inner(u, v);
                    if i == j {
                        let target = if a == c { 1.0 } else { 0.0 };
                        within = within.max((ov - C64::new(target, 0.0)).norm());
                    } else {
                        cross = cross.max((ov.norm_sqr() - inv_d).abs());
                    }
                }
            }
        }
    }
    (cross, within)
}

/// `Z = diag(ω^n)`
pub fn z_op(field: &Field) -> Matrix {
    let d = field.dim();
    Matrix::from_fn(d, d, |i, j| {
        if i == j {
            field.omega(i as u32)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Cyclic shift `X|n⟩ = |n+1⟩`.
pub fn x_op(field: &Field) -> Matrix {
    let d = field.dim();
    Matrix::from_fn(d, d, |i, j| {
        if i == (j + 1) % d {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `Z^k` for a signed exponent.
pub fn z_pow(field: &Field, k: i64) -> Matrix {
    let d = field.dim();
    let k = field.reduce(k);
    Matrix::from_fn(d, d, |i, j| {
        if i == j {
            field.omega(field.mul(k, i as u32))
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `X^k` for a signed exponent.
pub fn x_pow(field: &Field, k: i64) -> Matrix {
    let d = field.dim();
    let k = field.reduce(k) as usize;
    Matrix::from_fn(d, d, |i, j| {
        if i == (j + k) % d {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Conjugate label: `(m, b) ↦ (−m, −b)` for residue bases, identity on `CB`.
pub fn tilde_map(field: &Field, label: MubLabel) -> MubLabel {
    match label.b {
        BasisLabel::Cb => label,
        BasisLabel::Residue(b) => MubLabel {
            m: field.neg(label.m),
            b: BasisLabel::Residue(field.neg(b)),
        },
    }
}

#[derive(Serialize, Deserialize)]
struct BasisWire {
    d: u32,
    b: BasisLabel,
    states: Vec<Vec<[f64; 2]>>,
}

/// `{"d","b","states":[[[re,im],…],…]}`
pub fn basis_to_json(field: &Field, b: BasisLabel) -> String {
    let wire = BasisWire {
        d: field.d(),
        b,
        states: basis(field, b)
            .iter()
            .map(crate::io::vector_to_pairs)
            .collect(),
    };
    serde_json::to_string(&wire).expect("serializable")
}

/// Parses a basis export back into `(d, b, states)`.
pub fn basis_from_json(s: &str) -> crate::error::Result<(u32, BasisLabel, Vec<StateVector>)> {
    let wire: BasisWire =
        serde_json::from_str(s).map_err(|e| crate::error::Error::Parse(e.to_string()))?;
    let states = wire
        .states
        .iter()
        .map(|v| crate::io::pairs_to_vector(v))
        .collect();
    Ok((wire.d, wire.b, states))
}
