//! Wire formats shared across modules. Complex numbers are always `[re, im]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, StateVector};
use crate::modfield::C64;

pub fn vector_to_pairs(v: &StateVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn pairs_to_vector(p: &[[f64; 2]]) -> StateVector {
    StateVector::from_iterator(p.len(), p.iter().map(|&[re, im]| C64::new(re, im)))
}

/// Row-major nested `[[[re,im],…],…]`.
pub fn matrix_to_pairs(m: &Matrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn pairs_to_matrix(rows: &[Vec<[f64; 2]>]) -> Result<Matrix> {
    let n = rows.len();
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: r.len(),
        });
    }
    Ok(Matrix::from_fn(n, n, |i, j| {
        let [re, im] = rows[i][j];
        C64::new(re, im)
    }))
}

/// `{"d", "matrix":[[[re,im],…],…]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub d: u32,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(d: u32, m: &Matrix) -> Self {
        MatrixFile {
            d,
            matrix: matrix_to_pairs(m),
        }
    }

    pub fn parse(s: &str) -> Result<(u32, Matrix)> {
        let f: MatrixFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let m = pairs_to_matrix(&f.matrix)?;
        if m.nrows() != f.d as usize {
            return Err(Error::DimensionMismatch {
                expected: f.d as usize,
                got: m.nrows(),
            });
        }
        Ok((f.d, m))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}
