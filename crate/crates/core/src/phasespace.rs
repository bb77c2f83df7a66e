//! Finite phase space on the `d × d` grid of lines `(m̈, m₀)`: the Wigner
//! function `W = (1/d)·tr(ρ L)`, the 0/1 incidence kernel `Λ` and the finite
//! Radon transform, which returns the MUB outcome probabilities.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::incidence::{self, BasisLabel};
use crate::linalg::{self, Matrix, StateVector};
use crate::lineops;
use crate::modfield::{Field, C64};
use crate::mub::{self, MubLabel};

/// Imaginary residue tolerated before a table is declared non-real.
pub const REALITY_TOL: f64 = 1e-10;
/// Eigenvalue slack for positive semidefiniteness.
pub const PSD_TOL: f64 = 1e-9;
/// Draw budget for [`negativity_witness`].
pub const WITNESS_BUDGET: usize = 10_000;

/// Hermitian, unit-trace, positive semidefinite `d × d` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Matrix);

impl DensityMatrix {
    pub fn new(m: Matrix, tol: f64) -> Result<DensityMatrix> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidDensity("matrix is not square".into()));
        }
        let herm = linalg::hermiticity_defect(&m);
        if herm > tol {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (defect {herm:e})"
            )));
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol.max(1e-9) {
            return Err(Error::InvalidDensity(format!(
                "trace is {} + {}i, expected 1",
                tr.re, tr.im
            )));
        }
        let min_eig = m.clone().symmetric_eigenvalues().min();
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "not positive semidefinite (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(DensityMatrix(m))
    }

    pub fn pure(v: &StateVector) -> DensityMatrix {
        let v = v.normalize();
        DensityMatrix(linalg::outer(&v, &v))
    }

    pub fn maximally_mixed(d: usize) -> DensityMatrix {
        DensityMatrix(linalg::identity(d) / C64::new(d as f64, 0.0))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// Real `d × d` table indexed by `(m̈, m₀)`, stored row-major with `m̈` outer.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseTable {
    pub d: u32,
    pub values: Vec<f64>,
}

impl PhaseTable {
    pub fn get(&self, m_ddot: u32, m0: u32) -> f64 {
        self.values[(m_ddot * self.d + m0) as usize]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Header `m_ddot,m0,value`, rows with `m̈` outer.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m_ddot,m0,value\n");
        for a in 0..self.d {
            for b in 0..self.d {
                out.push_str(&format!("{a},{b},{}\n", self.get(a, b)));
            }
        }
        out
    }

    /// `{"d", "values":[[…],…]}` with rows indexed by `m̈`.
    pub fn to_json(&self) -> String {
        let rows: Vec<&[f64]> = self.values.chunks(self.d as usize).collect();
        #[derive(Serialize)]
        struct Out<'a> {
            d: u32,
            values: Vec<&'a [f64]>,
        }
        serde_json::to_string(&Out {
            d: self.d,
            values: rows,
        })
        .expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<PhaseTable> {
        #[derive(Deserialize)]
        struct Raw {
            d: u32,
            values: Vec<Vec<f64>>,
        }
        let raw: Raw = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.values.len() != raw.d as usize
            || raw.values.iter().any(|r| r.len() != raw.d as usize)
        {
            return Err(Error::Parse(format!("expected a {0}×{0} table", raw.d)));
        }
        Ok(PhaseTable {
            d: raw.d,
            values: raw.values.concat(),
        })
    }

    pub fn from_csv(s: &str) -> Result<PhaseTable> {
        let rows = parse_csv(s, "m_ddot,m0,value")?;
        let d = (rows.len() as f64).sqrt().round() as u32;
        if (d * d) as usize != rows.len() {
            return Err(Error::Parse(format!("{} rows is not a square", rows.len())));
        }
        let mut values = vec![0.0; rows.len()];
        for (a, b, v) in rows {
            let a: u32 = a
                .parse()
                .map_err(|_| Error::Parse(format!("bad m_ddot {a:?}")))?;
            let b: u32 = b
                .parse()
                .map_err(|_| Error::Parse(format!("bad m0 {b:?}")))?;
            if a >= d || b >= d {
                return Err(Error::Parse(format!("cell ({a},{b}) out of range")));
            }
            values[(a * d + b) as usize] = v;
        }
        Ok(PhaseTable { d, values })
    }
}

/// Complex phase-space function for arbitrary operators.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPhaseTable {
    pub d: u32,
    pub values: Vec<C64>,
}

impl ComplexPhaseTable {
    pub fn get(&self, m_ddot: u32, m0: u32) -> C64 {
        self.values[(m_ddot * self.d + m0) as usize]
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

/// Real table over the `d(d+1)` MUB labels, indexed `[b.index()][m]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadonTable {
    pub d: u32,
    pub values: Vec<Vec<f64>>,
}

impl RadonTable {
    pub fn get(&self, m: u32, b: BasisLabel) -> f64 {
        self.values[b.index()][m as usize]
    }

    pub fn column_sum(&self, b: BasisLabel) -> f64 {
        self.values[b.index()].iter().sum()
    }

    /// Header `m,b,value`; `b` is `CB` or the residue, columns in canonical order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,b,value\n");
        for b in BasisLabel::all(self.d) {
            for m in 0..self.d {
                out.push_str(&format!("{m},{b},{}\n", self.get(m, b)));
            }
        }
        out
    }

    /// `{"d", "columns":[{"b", "values":[…]},…]}` in canonical basis order.
    pub fn to_json(&self) -> String {
        let columns: Vec<RadonColumn> = BasisLabel::all(self.d)
            .into_iter()
            .map(|b| RadonColumn {
                b,
                values: self.values[b.index()].clone(),
            })
            .collect();
        #[derive(Serialize)]
        struct Out {
            d: u32,
            columns: Vec<RadonColumn>,
        }
        serde_json::to_string(&Out { d: self.d, columns }).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<RadonTable> {
        #[derive(Deserialize)]
        struct Raw {
            d: u32,
            columns: Vec<RadonColumn>,
        }
        let raw: Raw = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let d = raw.d as usize;
        let mut values = vec![Vec::new(); d + 1];
        for c in raw.columns {
            if c.b.index() > d || c.values.len() != d {
                return Err(Error::Parse(format!(
                    "bad column {} with {} entries",
                    c.b,
                    c.values.len()
                )));
            }
            values[c.b.index()] = c.values;
        }
        if values.iter().any(|v| v.is_empty()) {
            return Err(Error::Parse("missing basis column".into()));
        }
        Ok(RadonTable { d: raw.d, values })
    }

    pub fn from_csv(s: &str) -> Result<RadonTable> {
        let rows = parse_csv(s, "m,b,value")?;
        let n = rows.len();
        // n = d(d+1)
        let d = ((((4 * n + 1) as f64).sqrt() - 1.0) / 2.0).round() as u32;
        if (d * (d + 1)) as usize != n {
            return Err(Error::Parse(format!("{n} rows is not d(d+1)")));
        }
        let mut values = vec![vec![0.0; d as usize]; d as usize + 1];
        for (m, b, v) in rows {
            let m: u32 = m
                .parse()
                .map_err(|_| Error::Parse(format!("bad m {m:?}")))?;
            let b = BasisLabel::parse(&b, d)?;
            if m >= d {
                return Err(Error::Parse(format!("row m={m} out of range")));
            }
            values[b.index()][m as usize] = v;
        }
        Ok(RadonTable { d, values })
    }
}

#[derive(Serialize, Deserialize)]
struct RadonColumn {
    b: BasisLabel,
    values: Vec<f64>,
}

fn parse_csv(s: &str, header: &str) -> Result<Vec<(String, String, f64)>> {
    let mut lines = s.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == header => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header {header:?}, got {other:?}"
            )))
        }
    }
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 3 {
                return Err(Error::Parse(format!("bad row {l:?}")));
            }
            let v: f64 = f[2]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad value in {l:?}")))?;
            Ok((f[0].trim().to_string(), f[1].trim().to_string(), v))
        })
        .collect()
}

/// `(1/d)·tr(Q L_j)` for every line; no constraints on `Q`.
pub fn general_map(field: &Field, q: &Matrix) -> Result<ComplexPhaseTable> {
    let d = field.dim();
    if q.nrows() != d || q.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: q.nrows(),
        });
    }
    let values = lineops::symmetric_lines(field)
        .iter()
        .map(|l| linalg::trace_product(q, l) / d as f64)
        .collect();
    Ok(ComplexPhaseTable {
        d: field.d(),
        values,
    })
}

/// Finite Wigner function `W(m̈, m₀) = (1/d)·tr(ρ L_{(m̈,m₀)})`.
pub fn wigner(field: &Field, rho: &DensityMatrix) -> Result<PhaseTable> {
    let t = general_map(field, rho.matrix())?;
    let imag = t.max_imag();
    if imag > REALITY_TOL {
        return Err(Error::NotReal(imag));
    }
    Ok(PhaseTable {
        d: t.d,
        values: t.values.iter().map(|z| z.re).collect(),
    })
}

/// `Λ_{α,j} = tr(P_α L_j)` rounded to 0/1; rows are MUB labels in canonical
/// order, columns are lines with `m̈` outer. Also returns the largest rounding
/// residue.
pub fn lambda_kernel(field: &Field) -> (Vec<Vec<u8>>, f64) {
    let lines = lineops::symmetric_lines(field);
    let mut residue: f64 = 0.0;
    let table = MubLabel::all(field.d())
        .iter()
        .map(|lab| {
            let p = mub::projector(field, lab.b, lab.m);
            lines
                .iter()
                .map(|l| {
                    let t = linalg::trace_product(&p, l);
                    let r = t.re.round();
                    residue = residue.max((t - C64::new(r, 0.0)).norm());
                    r as u8
                })
                .collect()
        })
        .collect();
    (table, residue)
}

/// The DAPG membership matrix in the same layout as [`lambda_kernel`].
pub fn incidence_kernel(field: &Field) -> Vec<Vec<u8>> {
    let g = incidence::build_dapg(field.d() as u64).expect("field order is an odd prime");
    g.membership()
        .iter()
        .map(|r| r.iter().map(|&b| b as u8).collect())
        .collect()
}

fn radon_values(d: u32, kernel: &[Vec<u8>], values: &[C64]) -> Vec<Vec<C64>> {
    let mut out = vec![vec![C64::new(0.0, 0.0); d as usize]; d as usize + 1];
    for (alpha, row) in kernel.iter().enumerate() {
        let s: C64 = row
            .iter()
            .zip(values)
            .filter(|(&k, _)| k == 1)
            .map(|(_, &w)| w)
            .sum();
        out[alpha / d as usize][alpha % d as usize] = s;
    }
    out
}

/// `R[W](m, b) = Σ_j W(j)·Λ_{(m,b),j}`.
pub fn radon(field: &Field, w: &PhaseTable) -> Result<RadonTable> {
    if w.d != field.d() {
        return Err(Error::DimensionMismatch {
            expected: field.dim(),
            got: w.d as usize,
        });
    }
    let kernel = incidence_kernel(field);
    let vals: Vec<C64> = w.values.iter().map(|&x| C64::new(x, 0.0)).collect();
    let values = radon_values(field.d(), &kernel, &vals)
        .into_iter()
        .map(|col| col.into_iter().map(|z| z.re).collect())
        .collect();
    Ok(RadonTable {
        d: field.d(),
        values,
    })
}

/// Radon transform of a complex phase-space function, indexed `[b.index()][m]`.
pub fn radon_general(field: &Field, q: &ComplexPhaseTable) -> Vec<Vec<C64>> {
    radon_values(field.d(), &incidence_kernel(field), &q.values)
}

/// Normalized complex Gaussian vector.
pub fn random_pure_state(d: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let v = StateVector::from_fn(d, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    v.normalize()
}

/// Random full-rank density matrix `G G† / tr(G G†)`.
pub fn random_density(d: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = Matrix::from_fn(d, d, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix(m / tr)
}

/// Seeded search for a pure state whose Wigner table has an entry below
/// `−1e-6`. Returns the state and its minimum.
pub fn negativity_witness(field: &Field, seed: u64) -> Result<(StateVector, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..WITNESS_BUDGET {
        let v = random_pure_state(field.dim(), &mut rng);
        let w = wigner(field, &DensityMatrix::pure(&v))?;
        let min = w.min();
        if min < -1e-6 {
            return Ok((v, min));
        }
    }
    Err(Error::SearchExhausted(WITNESS_BUDGET))
}

/// Born probabilities `⟨m;b|ρ|m;b⟩`, same layout as [`RadonTable`].
pub fn born_probabilities(field: &Field, rho: &DensityMatrix) -> RadonTable {
    let values = BasisLabel::all(field.d())
        .into_iter()
        .map(|b| {
            field
                .residues()
                .map(|m| {
                    let v = mub::mub_state(field, b, m);
                    (v.adjoint() * rho.matrix() * &v)[(0, 0)].re
                })
                .collect()
        })
        .collect();
    RadonTable {
        d: field.d(),
        values,
    }
}
