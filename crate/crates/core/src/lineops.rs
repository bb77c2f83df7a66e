//! Line operators: the `d²` operators attached to DAPG lines.
//!
//! For the symmetric family the operator on line `(m̈, m₀)` is
//! `L = Σ_b P(m(b); b) − I`, with closed form
//! `⟨n|L|n′⟩ = δ_{n+n′, 2m̈} · ω^{−(n−n′)·m₀}`, a displaced parity operator.
//! The closed form is the canonical constructor; the projector sum and the
//! parity conjugation are kept as independent validation paths.
//!
//! A general family `(r, s)`, `r ≠ 0`, completes the amputated line with slope
//! parameter `c` by the point `m̈ = r·c + s` in the `CB` column. Lines of every
//! family are keyed by `(m̈, m₀)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::incidence::BasisLabel;
use crate::linalg::{self, Matrix};
use crate::modfield::{Field, C64};
use crate::mub::{self, MubLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Family {
    pub r: u32,
    pub s: u32,
}

impl Family {
    pub const SYMMETRIC: Family = Family { r: 1, s: 0 };

    pub fn new(field: &Field, r: u32, s: u32) -> Result<Family> {
        let (r, s) = (r % field.d(), s % field.d());
        if r == 0 {
            return Err(Error::InvalidFamily);
        }
        Ok(Family { r, s })
    }

    pub fn is_symmetric(self) -> bool {
        self == Family::SYMMETRIC
    }

    /// Slope parameter `c = (m̈ − s)/r` of the amputated line.
    fn slope(self, field: &Field, m_ddot: u32) -> u32 {
        let r_inv = field.inv(self.r).expect("r != 0");
        field.mul(field.sub(m_ddot, self.s), r_inv)
    }

    /// `m(b)` on line `(m̈, m₀)` of this family.
    pub fn row(self, field: &Field, m_ddot: u32, m0: u32, b: BasisLabel) -> u32 {
        match b {
            BasisLabel::Cb => m_ddot % field.d(),
            BasisLabel::Residue(b) => {
                let c = self.slope(field, m_ddot);
                field.sub(field.add(m0, field.mul(b, c)), field.half(b))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LineOperator {
    pub m_ddot: u32,
    pub m0: u32,
    pub family: Family,
    pub matrix: Matrix,
}

#[derive(Serialize, Deserialize)]
struct LineOperatorWire {
    d: u32,
    m_ddot: u32,
    m0: u32,
    family: [u32; 2],
    matrix: Vec<Vec<[f64; 2]>>,
}

impl LineOperator {
    /// `{"d","m_ddot","m0","family":[r,s],"matrix":[[[re,im],…],…]}`
    pub fn to_json(&self) -> String {
        serde_json::to_string(&LineOperatorWire {
            d: self.matrix.nrows() as u32,
            m_ddot: self.m_ddot,
            m0: self.m0,
            family: [self.family.r, self.family.s],
            matrix: crate::io::matrix_to_pairs(&self.matrix),
        })
        .expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<LineOperator> {
        let w: LineOperatorWire =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let matrix = crate::io::pairs_to_matrix(&w.matrix)?;
        if matrix.nrows() != w.d as usize {
            return Err(Error::DimensionMismatch {
                expected: w.d as usize,
                got: matrix.nrows(),
            });
        }
        Ok(LineOperator {
            m_ddot: w.m_ddot,
            m0: w.m0,
            family: Family {
                r: w.family[0],
                s: w.family[1],
            },
            matrix,
        })
    }
}

/// Line index in phase-space order (`m̈` outer).
pub fn line_index(field: &Field, m_ddot: u32, m0: u32) -> usize {
    (m_ddot * field.d() + m0) as usize
}

fn projector_sum(field: &Field, family: Family, m_ddot: u32, m0: u32) -> Matrix {
    let d = field.dim();
    let mut acc = -linalg::identity(d);
    for b in BasisLabel::all(field.d()) {
        acc += mub::projector(field, b, family.row(field, m_ddot, m0, b));
    }
    acc
}

/// `Σ_b P(m(b); b) − I` along the symmetric DAPG line.
pub fn line_operator_sum(field: &Field, m_ddot: u32, m0: u32) -> LineOperator {
    LineOperator {
        m_ddot,
        m0,
        family: Family::SYMMETRIC,
        matrix: projector_sum(field, Family::SYMMETRIC, m_ddot, m0),
    }
}

/// Direct fill of `δ_{n+n′,2m̈} ω^{−(n−n′)m₀}`.
pub fn line_operator_closed(field: &Field, m_ddot: u32, m0: u32) -> LineOperator {
    LineOperator {
        m_ddot,
        m0,
        family: Family::SYMMETRIC,
        matrix: closed_matrix(field, m_ddot, m0),
    }
}

fn closed_matrix(field: &Field, m_ddot: u32, m0: u32) -> Matrix {
    let d = field.dim();
    let two_m = field.add(m_ddot, m_ddot);
    let mut out = linalg::zeros(d);
    for n in field.residues() {
        let np = field.sub(two_m, n);
        let e = field.mul(field.neg(field.sub(n, np)), m0);
        out[(n as usize, np as usize)] = field.omega(e);
    }
    out
}

/// The flip `Σ_s |s⟩⟨−s|`.
pub fn parity(field: &Field) -> Matrix {
    let d = field.dim();
    Matrix::from_fn(d, d, |i, j| {
        if (i + j) % d == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `X^{m̈} Z^{−m₀} Π Z^{m₀} X^{−m̈}` with `Π` the flip.
pub fn displaced_parity(field: &Field, m_ddot: u32, m0: u32) -> Matrix {
    let shift = mub::x_pow(field, m_ddot as i64) * mub::z_pow(field, -(m0 as i64));
    let unshift = mub::z_pow(field, m0 as i64) * mub::x_pow(field, -(m_ddot as i64));
    shift * parity(field) * unshift
}

/// Projector-sum operator for line `(m̈, m₀)` of family `(r, s)`.
pub fn general_family_line(
    field: &Field,
    family: Family,
    m_ddot: u32,
    m0: u32,
) -> Result<LineOperator> {
    let family = Family::new(field, family.r, family.s)?;
    Ok(LineOperator {
        m_ddot,
        m0,
        family,
        matrix: projector_sum(field, family, m_ddot, m0),
    })
}

/// All `d²` symmetric line operators (closed form), indexed by [`line_index`].
pub fn symmetric_lines(field: &Field) -> Vec<Matrix> {
    field
        .residues()
        .flat_map(|a| field.residues().map(move |b| (a, b)))
        .map(|(a, b)| closed_matrix(field, a, b))
        .collect()
}

/// All `d²` line operators of a family, indexed by [`line_index`].
pub fn family_lines(field: &Field, family: Family) -> Result<Vec<Matrix>> {
    let family = Family::new(field, family.r, family.s)?;
    if family.is_symmetric() {
        return Ok(symmetric_lines(field));
    }
    Ok(field
        .residues()
        .flat_map(|a| field.residues().map(move |b| (a, b)))
        .map(|(a, b)| projector_sum(field, family, a, b))
        .collect())
}

/// `‖L² − I‖∞`
pub fn parity_defect(l: &Matrix) -> f64 {
    linalg::max_abs_diff(&(l * l), &linalg::identity(l.nrows()))
}

/// `tr(L_j L_j′)` over all pairs of lines in one family.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalityTable {
    pub size: usize,
    /// Row-major real parts.
    pub values: Vec<f64>,
    /// Largest imaginary part seen.
    pub max_imag: f64,
}

impl OrthogonalityTable {
    pub fn get(&self, j: usize, jp: usize) -> f64 {
        self.values[j * self.size + jp]
    }

    /// Largest deviation from `d · I`.
    pub fn deviation_from(&self, d: f64) -> f64 {
        let mut worst = self.max_imag;
        for j in 0..self.size {
            for jp in 0..self.size {
                let target = if j == jp { d } else { 0.0 };
                worst = worst.max((self.get(j, jp) - target).abs());
            }
        }
        worst
    }
}

pub fn orthogonality_table(field: &Field, family: Family) -> Result<OrthogonalityTable> {
    let lines = family_lines(field, family)?;
    let size = lines.len();
    let mut values = vec![0.0; size * size];
    let mut max_imag: f64 = 0.0;
    for (j, a) in lines.iter().enumerate() {
        for (jp, b) in lines.iter().enumerate() {
            let t = linalg::trace_product(a, b);
            values[j * size + jp] = t.re;
            max_imag = max_imag.max(t.im.abs());
        }
    }
    Ok(OrthogonalityTable {
        size,
        values,
        max_imag,
    })
}

/// Coefficients `c_j = tr(A L_j)` of an operator in the symmetric line basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorExpansion {
    pub d: u32,
    pub coefficients: Vec<C64>,
}

pub fn expand(field: &Field, a: &Matrix) -> Result<OperatorExpansion> {
    let d = field.dim();
    if a.nrows() != d || a.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: a.nrows(),
        });
    }
    let coefficients = symmetric_lines(field)
        .iter()
        .map(|l| linalg::trace_product(a, l))
        .collect();
    Ok(OperatorExpansion {
        d: field.d(),
        coefficients,
    })
}

/// `(1/d) Σ_j c_j L_j`
pub fn reconstruct(field: &Field, e: &OperatorExpansion) -> Result<Matrix> {
    let d = field.dim();
    if e.coefficients.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            got: e.coefficients.len(),
        });
    }
    let mut out = linalg::zeros(d);
    for (c, l) in e.coefficients.iter().zip(symmetric_lines(field)) {
        out += l * *c;
    }
    Ok(out / C64::new(d as f64, 0.0))
}

/// MUB label matched by the APG line `m₀ = r·m̈ + s`: `(m, b) = (s − b/2, −r)`.
pub fn apg_point_label(field: &Field, r: u32, s: u32) -> MubLabel {
    let b = field.neg(r);
    MubLabel {
        m: field.sub(s, field.half(b)),
        b: BasisLabel::Residue(b),
    }
}

/// `(1/d) Σ_{m̈} L_{(m̈, r·m̈ + s)}`
pub fn apg_point_operator(field: &Field, r: u32, s: u32) -> Matrix {
    let d = field.dim();
    let mut out = linalg::zeros(d);
    for m_ddot in field.residues() {
        out += closed_matrix(field, m_ddot, field.add(field.mul(r, m_ddot), s));
    }
    out / C64::new(d as f64, 0.0)
}

/// `(1/d) Σ_{m₀} L_{(s′, m₀)}`
pub fn apg_vertical_operator(field: &Field, s_prime: u32) -> Matrix {
    let d = field.dim();
    let mut out = linalg::zeros(d);
    for m0 in field.residues() {
        out += closed_matrix(field, s_prime, m0);
    }
    out / C64::new(d as f64, 0.0)
}
