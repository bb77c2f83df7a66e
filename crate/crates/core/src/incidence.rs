//! Finite plane geometries of odd prime order `d`: the affine plane (APG), its
//! dual (DAPG) and the projective plane (FPP).
//!
//! Every geometry is stored as a dense point × line membership matrix plus the
//! adjacency lists derived from it. Axiom checks are exhaustive.
//!
//! DAPG points are `(m, b)` with `b` ranging over the `d + 1` basis labels; the
//! line `(m̈, m₀)` contains `(m̈, CB)` and `(m₀ + b·m̈ − b/2, b)` for every
//! residue `b`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::modfield::Field;

/// Column label of the DAPG point array. `Cb` is the computational basis column,
/// which is not a field element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisLabel {
    Cb,
    Residue(u32),
}

impl BasisLabel {
    /// All `d + 1` labels in canonical order: `CB, 0, 1, …, d−1`.
    pub fn all(d: u32) -> Vec<BasisLabel> {
        std::iter::once(BasisLabel::Cb)
            .chain((0..d).map(BasisLabel::Residue))
            .collect()
    }

    /// Position in canonical order.
    pub fn index(self) -> usize {
        match self {
            BasisLabel::Cb => 0,
            BasisLabel::Residue(b) => b as usize + 1,
        }
    }

    pub fn from_index(i: usize) -> BasisLabel {
        if i == 0 {
            BasisLabel::Cb
        } else {
            BasisLabel::Residue(i as u32 - 1)
        }
    }

    pub fn parse(s: &str, d: u32) -> Result<BasisLabel> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("cb") {
            return Ok(BasisLabel::Cb);
        }
        match t.parse::<u32>() {
            Ok(b) if b < d => Ok(BasisLabel::Residue(b)),
            _ => Err(Error::Parse(format!("invalid basis label {t:?} for d={d}"))),
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Cb => write!(f, "CB"),
            BasisLabel::Residue(b) => write!(f, "{b}"),
        }
    }
}

impl Serialize for BasisLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BasisLabel::Cb => s.serialize_str("CB"),
            BasisLabel::Residue(b) => s.serialize_u32(*b),
        }
    }
}

impl<'de> Deserialize<'de> for BasisLabel {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Str(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(b) => Ok(BasisLabel::Residue(b)),
            Raw::Str(s) if s == "CB" => Ok(BasisLabel::Cb),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad basis label {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GeometryKind {
    Apg,
    Dapg,
    Fpp,
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GeometryKind::Apg => "APG",
            GeometryKind::Dapg => "DAPG",
            GeometryKind::Fpp => "FPP",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointId {
    Dapg { m: u32, b: BasisLabel },
    Apg { x: u32, y: u32 },
    Index(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LineId {
    Dapg { m_ddot: u32, m0: u32 },
    Slanted { r: u32, s: u32 },
    Vertical { x: u32 },
    Index(usize),
}

/// `(ν, B, k_L, r_p)`; `k_L`/`r_p` are `None` when not uniform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Parameters {
    pub nu: usize,
    pub b: usize,
    pub k_l: Option<usize>,
    pub r_p: Option<usize>,
}

impl Parameters {
    /// The parameter row every geometry of this kind and order must match.
    pub fn expected(kind: GeometryKind, d: u32) -> Parameters {
        let d = d as usize;
        let (nu, b, k, r) = match kind {
            GeometryKind::Apg => (d * d, d * (d + 1), d, d + 1),
            GeometryKind::Dapg => (d * (d + 1), d * d, d + 1, d),
            GeometryKind::Fpp => (d * d + d + 1, d * d + d + 1, d + 1, d + 1),
        };
        Parameters {
            nu,
            b,
            k_l: Some(k),
            r_p: Some(r),
        }
    }
}

/// Points, lines and their membership relation.
#[derive(Clone, Debug, PartialEq)]
pub struct Incidence {
    kind: GeometryKind,
    d: u32,
    points: Vec<PointId>,
    lines: Vec<LineId>,
    /// `membership[point][line]`
    membership: Vec<Vec<bool>>,
    points_on_line: Vec<Vec<usize>>,
    lines_on_point: Vec<Vec<usize>>,
}

/// `m(b)` on the symmetric DAPG line `(m̈, m₀)`.
pub fn dapg_line_row(field: &Field, m_ddot: u32, m0: u32, b: BasisLabel) -> u32 {
    match b {
        BasisLabel::Cb => m_ddot % field.d(),
        BasisLabel::Residue(b) => {
            let t = field.add(m0, field.mul(b, m_ddot));
            field.sub(t, field.half(b))
        }
    }
}

impl Incidence {
    pub fn from_parts(
        kind: GeometryKind,
        d: u32,
        points: Vec<PointId>,
        lines: Vec<LineId>,
        membership: Vec<Vec<bool>>,
    ) -> Result<Incidence> {
        if membership.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: membership.len(),
            });
        }
        if let Some(row) = membership.iter().find(|r| r.len() != lines.len()) {
            return Err(Error::DimensionMismatch {
                expected: lines.len(),
                got: row.len(),
            });
        }
        let mut points_on_line = vec![Vec::new(); lines.len()];
        let mut lines_on_point = vec![Vec::new(); points.len()];
        for (p, row) in membership.iter().enumerate() {
            for (l, &on) in row.iter().enumerate() {
                if on {
                    points_on_line[l].push(p);
                    lines_on_point[p].push(l);
                }
            }
        }
        Ok(Incidence {
            kind,
            d,
            points,
            lines,
            membership,
            points_on_line,
            lines_on_point,
        })
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn lines(&self) -> &[LineId] {
        &self.lines
    }

    pub fn is_member(&self, point: usize, line: usize) -> bool {
        self.membership[point][line]
    }

    pub fn membership(&self) -> &[Vec<bool>] {
        &self.membership
    }

    pub fn points_on_line(&self, line: usize) -> &[usize] {
        &self.points_on_line[line]
    }

    pub fn lines_on_point(&self, point: usize) -> &[usize] {
        &self.lines_on_point[point]
    }

    pub fn point_index(&self, id: PointId) -> Option<usize> {
        self.points.iter().position(|&p| p == id)
    }

    pub fn line_index(&self, id: LineId) -> Option<usize> {
        self.lines.iter().position(|&l| l == id)
    }

    /// Copy with one membership bit toggled (used for mutation testing of the
    /// axiom checker).
    pub fn with_flipped(&self, point: usize, line: usize) -> Incidence {
        let mut membership = self.membership.clone();
        membership[point][line] = !membership[point][line];
        Incidence::from_parts(
            self.kind,
            self.d,
            self.points.clone(),
            self.lines.clone(),
            membership,
        )
        .expect("shape unchanged")
    }

    pub fn parameters(&self) -> Parameters {
        let uniform = |v: &[Vec<usize>]| {
            let first = v.first().map(|x| x.len())?;
            v.iter().all(|x| x.len() == first).then_some(first)
        };
        Parameters {
            nu: self.points.len(),
            b: self.lines.len(),
            k_l: uniform(&self.points_on_line),
            r_p: uniform(&self.lines_on_point),
        }
    }

    /// Number of lines common to each pair of points.
    fn point_pair_counts(&self) -> Vec<Vec<u32>> {
        let n = self.points.len();
        let mut c = vec![vec![0u32; n]; n];
        for pts in &self.points_on_line {
            for (i, &p) in pts.iter().enumerate() {
                for &q in &pts[i + 1..] {
                    c[p][q] += 1;
                    c[q][p] += 1;
                }
            }
        }
        c
    }

    /// Number of points common to each pair of lines.
    fn line_pair_counts(&self) -> Vec<Vec<u32>> {
        let n = self.lines.len();
        let mut c = vec![vec![0u32; n]; n];
        for ls in &self.lines_on_point {
            for (i, &a) in ls.iter().enumerate() {
                for &b in &ls[i + 1..] {
                    c[a][b] += 1;
                    c[b][a] += 1;
                }
            }
        }
        c
    }
}

fn full_membership(n_points: usize, n_lines: usize) -> Vec<Vec<bool>> {
    vec![vec![false; n_lines]; n_points]
}

/// Affine plane: points `(x, y)`, lines `y = r·x + s` and `x = s'`.
pub fn build_apg(d: u64) -> Result<Incidence> {
    let field = Field::new(d)?;
    let d = field.d();
    let points: Vec<PointId> = (0..d)
        .flat_map(|x| (0..d).map(move |y| PointId::Apg { x, y }))
        .collect();
    let mut lines: Vec<LineId> = (0..d)
        .flat_map(|r| (0..d).map(move |s| LineId::Slanted { r, s }))
        .collect();
    lines.extend((0..d).map(|x| LineId::Vertical { x }));
    let mut membership = full_membership(points.len(), lines.len());
    for (p, point) in points.iter().enumerate() {
        let PointId::Apg { x, y } = *point else {
            unreachable!()
        };
        for (l, line) in lines.iter().enumerate() {
            membership[p][l] = match *line {
                LineId::Slanted { r, s } => y == field.add(field.mul(r, x), s),
                LineId::Vertical { x: xv } => x == xv,
                _ => unreachable!(),
            };
        }
    }
    Incidence::from_parts(GeometryKind::Apg, d, points, lines, membership)
}

/// Dual affine plane: points `(m, b)` column-major, lines `(m̈, m₀)` with `m̈`
/// outer.
pub fn build_dapg(d: u64) -> Result<Incidence> {
    let field = Field::new(d)?;
    let d = field.d();
    let points: Vec<PointId> = BasisLabel::all(d)
        .into_iter()
        .flat_map(|b| (0..d).map(move |m| PointId::Dapg { m, b }))
        .collect();
    let lines: Vec<LineId> = (0..d)
        .flat_map(|m_ddot| (0..d).map(move |m0| LineId::Dapg { m_ddot, m0 }))
        .collect();
    let mut membership = full_membership(points.len(), lines.len());
    for (l, line) in lines.iter().enumerate() {
        let LineId::Dapg { m_ddot, m0 } = *line else {
            unreachable!()
        };
        for b in BasisLabel::all(d) {
            let m = dapg_line_row(&field, m_ddot, m0, b);
            membership[b.index() * d as usize + m as usize][l] = true;
        }
    }
    Incidence::from_parts(GeometryKind::Dapg, d, points, lines, membership)
}

/// Projective plane of order `d`, completed from the affine plane.
pub fn build_fpp(d: u64) -> Result<Incidence> {
    complete_to_fpp(&build_apg(d)?)
}

pub fn build(kind: GeometryKind, d: u64) -> Result<Incidence> {
    match kind {
        GeometryKind::Apg => build_apg(d),
        GeometryKind::Dapg => build_dapg(d),
        GeometryKind::Fpp => build_fpp(d),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    Lambda1,
    Lambda2,
    Parallel,
    DualLambda1,
    DualLambda2,
    DualParallel,
    P1,
    P2,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Lambda1 => "λ1",
            Axiom::Lambda2 => "λ2",
            Axiom::Parallel => "A",
            Axiom::DualLambda1 => "λ̃1",
            Axiom::DualLambda2 => "λ̃2",
            Axiom::DualParallel => "Ã",
            Axiom::P1 => "P1",
            Axiom::P2 => "P2",
        }
    }

    pub fn for_kind(kind: GeometryKind) -> &'static [Axiom] {
        match kind {
            GeometryKind::Apg => &[Axiom::Lambda1, Axiom::Lambda2, Axiom::Parallel],
            GeometryKind::Dapg => &[Axiom::DualLambda1, Axiom::DualLambda2, Axiom::DualParallel],
            GeometryKind::Fpp => &[
                Axiom::Lambda1,
                Axiom::Lambda2,
                Axiom::P1,
                Axiom::P2,
                Axiom::DualLambda1,
                Axiom::DualLambda2,
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub kind: GeometryKind,
    pub entries: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn get(&self, axiom: Axiom) -> Option<&AxiomResult> {
        self.entries.iter().find(|e| e.axiom == axiom)
    }
}

struct AxiomChecker<'a> {
    g: &'a Incidence,
    pp: Vec<Vec<u32>>,
    ll: Vec<Vec<u32>>,
}

type Check = std::result::Result<(), String>;

impl<'a> AxiomChecker<'a> {
    fn new(g: &'a Incidence) -> Self {
        AxiomChecker {
            g,
            pp: g.point_pair_counts(),
            ll: g.line_pair_counts(),
        }
    }

    fn run(&self, axiom: Axiom) -> Check {
        match axiom {
            Axiom::Lambda1 => self.lambda1(),
            Axiom::Lambda2 => self.lambda2(),
            Axiom::Parallel => self.parallel(),
            Axiom::DualLambda1 => self.dual_lambda1(),
            Axiom::DualLambda2 => self.dual_lambda2(),
            Axiom::DualParallel => self.dual_parallel(),
            Axiom::P1 => self.p1(),
            Axiom::P2 => self.p2(),
        }
    }

    fn lambda1(&self) -> Check {
        let n = self.g.points.len();
        for p in 0..n {
            for q in p + 1..n {
                if self.pp[p][q] != 1 {
                    return Err(format!("points {p} and {q} share {} lines", self.pp[p][q]));
                }
            }
            if self.g.lines_on_point[p].len() < 2 {
                return Err(format!("point {p} lies on fewer than two lines"));
            }
        }
        Ok(())
    }

    fn collinear(&self, pts: &[usize]) -> bool {
        (0..self.g.lines.len()).any(|l| pts.iter().all(|&p| self.g.membership[p][l]))
    }

    fn lambda2(&self) -> Check {
        if let Some(l) = (0..self.g.lines.len()).find(|&l| self.g.points_on_line[l].len() < 2) {
            return Err(format!("line {l} has fewer than two points"));
        }
        let n = self.g.points.len();
        for p in 0..n {
            for q in p + 1..n {
                for r in q + 1..n {
                    if !self.collinear(&[p, q, r]) {
                        return Ok(());
                    }
                }
            }
        }
        Err("all triples of points are collinear".into())
    }

    fn parallel(&self) -> Check {
        for l in 0..self.g.lines.len() {
            for p in 0..self.g.points.len() {
                if self.g.membership[p][l] {
                    continue;
                }
                let n = self.g.lines_on_point[p]
                    .iter()
                    .filter(|&&l2| self.ll[l][l2] == 0)
                    .count();
                if n != 1 {
                    return Err(format!("point {p} off line {l} has {n} parallels"));
                }
            }
        }
        Ok(())
    }

    fn dual_lambda1(&self) -> Check {
        let n = self.g.lines.len();
        for a in 0..n {
            for b in a + 1..n {
                if self.ll[a][b] != 1 {
                    return Err(format!("lines {a} and {b} share {} points", self.ll[a][b]));
                }
            }
            if self.g.points_on_line[a].len() < 2 {
                return Err(format!("line {a} has fewer than two points"));
            }
        }
        Ok(())
    }

    fn concurrent(&self, ls: &[usize]) -> bool {
        (0..self.g.points.len()).any(|p| ls.iter().all(|&l| self.g.membership[p][l]))
    }

    fn dual_lambda2(&self) -> Check {
        let n = self.g.lines.len();
        let meeting = (0..n).any(|a| (a + 1..n).any(|b| self.ll[a][b] > 0));
        if !meeting {
            return Err("no two lines share a point".into());
        }
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if !self.concurrent(&[a, b, c]) {
                        return Ok(());
                    }
                }
            }
        }
        Err("every three lines share a point".into())
    }

    fn dual_parallel(&self) -> Check {
        for p in 0..self.g.points.len() {
            for l in 0..self.g.lines.len() {
                if self.g.membership[p][l] {
                    continue;
                }
                let n = self.g.points_on_line[l]
                    .iter()
                    .filter(|&&q| self.pp[p][q] == 0)
                    .count();
                if n != 1 {
                    return Err(format!(
                        "point {p} off line {l}: {n} points of the line unjoined to it"
                    ));
                }
            }
        }
        Ok(())
    }

    fn p1(&self) -> Check {
        let n = self.g.lines.len();
        for a in 0..n {
            for b in a + 1..n {
                if self.ll[a][b] == 0 {
                    return Err(format!("lines {a} and {b} are disjoint"));
                }
            }
        }
        Ok(())
    }

    fn p2(&self) -> Check {
        fn extend(c: &AxiomChecker, chosen: &mut Vec<usize>, start: usize) -> bool {
            if chosen.len() == 4 {
                return true;
            }
            for p in start..c.g.points.len() {
                let ok = (0..chosen.len()).all(|i| {
                    (i + 1..chosen.len()).all(|j| !c.collinear(&[chosen[i], chosen[j], p]))
                });
                if ok {
                    chosen.push(p);
                    if extend(c, chosen, p + 1) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        let mut chosen = Vec::new();
        if extend(self, &mut chosen, 0) {
            Ok(())
        } else {
            Err("no four points with no three collinear".into())
        }
    }
}

/// Exhaustive check of the axiom set belonging to `g.kind()`.
pub fn check_axioms(g: &Incidence) -> AxiomReport {
    let checker = AxiomChecker::new(g);
    let entries = Axiom::for_kind(g.kind)
        .iter()
        .map(|&axiom| match checker.run(axiom) {
            Ok(()) => AxiomResult {
                axiom,
                passed: true,
                witness: None,
            },
            Err(w) => AxiomResult {
                axiom,
                passed: false,
                witness: Some(w),
            },
        })
        .collect();
    AxiomReport {
        kind: g.kind,
        entries,
    }
}

/// `(Σ_j points on j, Σ_α lines on α)`.
pub fn counting_identity(g: &Incidence) -> (usize, usize) {
    let lhs = g.points_on_line.iter().map(Vec::len).sum();
    let rhs = g.lines_on_point.iter().map(Vec::len).sum();
    (lhs, rhs)
}

/// Pencil partition: classes of mutually unjoined points (DAPG) or of
/// mutually parallel lines (APG), in order of their first member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pencils {
    pub classes: Vec<Vec<usize>>,
}

impl Pencils {
    pub fn count(&self) -> usize {
        self.classes.len()
    }

    /// Common class size, if all classes are the same size.
    pub fn class_size(&self) -> Option<usize> {
        let first = self.classes.first()?.len();
        self.classes
            .iter()
            .all(|c| c.len() == first)
            .then_some(first)
    }
}

/// The pencil relation matrix: `related[a][b]` for the objects being partitioned.
fn pencil_relation(g: &Incidence) -> Result<Vec<Vec<bool>>> {
    let counts = match g.kind {
        GeometryKind::Dapg => g.point_pair_counts(),
        GeometryKind::Apg => g.line_pair_counts(),
        GeometryKind::Fpp => return Err(Error::NoPencils),
    };
    Ok(counts
        .iter()
        .enumerate()
        .map(|(a, row)| {
            row.iter()
                .enumerate()
                .map(|(b, &c)| a == b || c == 0)
                .collect()
        })
        .collect())
}

/// Brute-force check that `αΠα′ ∧ αΠα″ ⇒ α′Πα″` over all triples.
pub fn pencil_relation_transitive(g: &Incidence) -> Result<bool> {
    let rel = pencil_relation(g)?;
    let n = rel.len();
    for a in 0..n {
        for b in 0..n {
            if !rel[a][b] {
                continue;
            }
            if rel[a].iter().zip(&rel[b]).any(|(&ac, &bc)| ac && !bc) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn pencils(g: &Incidence) -> Result<Pencils> {
    let rel = pencil_relation(g)?;
    let n = rel.len();
    let mut assigned = vec![false; n];
    let mut classes = Vec::new();
    for a in 0..n {
        if assigned[a] {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&b| rel[a][b]).collect();
        for &b in &class {
            if assigned[b] || rel[b] != rel[a] {
                return Err(Error::AxiomFailure(format!(
                    "pencil relation is not an equivalence at {a},{b}"
                )));
            }
            assigned[b] = true;
        }
        classes.push(class);
    }
    let p = Pencils { classes };
    let d = g.d as usize;
    if p.count() != d + 1 || p.class_size() != Some(d) {
        return Err(Error::AxiomFailure(format!(
            "expected {} pencils of size {d}, found {} (sizes {:?})",
            d + 1,
            p.count(),
            p.classes.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    Ok(p)
}

/// Completes an APG (new point per pencil plus the line at infinity) or a DAPG
/// (new line per pencil plus their common point) to the projective plane.
/// Original objects keep their indices; added ones follow in pencil order.
pub fn complete_to_fpp(g: &Incidence) -> Result<Incidence> {
    let report = check_axioms(g);
    if let Some(bad) = report.entries.iter().find(|e| !e.passed) {
        return Err(Error::AxiomFailure(format!(
            "{} {}",
            bad.axiom.name(),
            bad.witness.clone().unwrap_or_default()
        )));
    }
    let pencils = pencils(g)?;
    let (nu, nb) = (g.points.len(), g.lines.len());
    let extra = pencils.count();
    let (n_points, n_lines) = match g.kind {
        GeometryKind::Apg => (nu + extra, nb + 1),
        GeometryKind::Dapg => (nu + 1, nb + extra),
        GeometryKind::Fpp => return Err(Error::NoPencils),
    };
    let mut membership = full_membership(n_points, n_lines);
    for (p, row) in g.membership.iter().enumerate() {
        membership[p][..nb].copy_from_slice(row);
    }
    match g.kind {
        GeometryKind::Apg => {
            for (k, class) in pencils.classes.iter().enumerate() {
                for &l in class {
                    membership[nu + k][l] = true;
                }
                membership[nu + k][nb] = true;
            }
        }
        GeometryKind::Dapg => {
            for (k, class) in pencils.classes.iter().enumerate() {
                for &p in class {
                    membership[p][nb + k] = true;
                }
                membership[nu][nb + k] = true;
            }
        }
        GeometryKind::Fpp => unreachable!(),
    }
    Incidence::from_parts(
        GeometryKind::Fpp,
        g.d,
        (0..n_points).map(PointId::Index).collect(),
        (0..n_lines).map(LineId::Index).collect(),
        membership,
    )
}

fn restrict(
    g: &Incidence,
    kind: GeometryKind,
    keep_points: &[usize],
    keep_lines: &[usize],
) -> Result<Incidence> {
    let membership = keep_points
        .iter()
        .map(|&p| keep_lines.iter().map(|&l| g.membership[p][l]).collect())
        .collect();
    Incidence::from_parts(
        kind,
        g.d,
        (0..keep_points.len()).map(PointId::Index).collect(),
        (0..keep_lines.len()).map(LineId::Index).collect(),
        membership,
    )
}

/// Deletes one line of a projective plane together with its points, which
/// leaves an affine plane.
pub fn remove_line(fpp: &Incidence, line: usize) -> Result<Incidence> {
    if fpp.kind != GeometryKind::Fpp || line >= fpp.lines.len() {
        return Err(Error::InvalidParameters(
            "remove_line needs an FPP line".into(),
        ));
    }
    let keep_points: Vec<usize> = (0..fpp.points.len())
        .filter(|&p| !fpp.membership[p][line])
        .collect();
    let keep_lines: Vec<usize> = (0..fpp.lines.len()).filter(|&l| l != line).collect();
    restrict(fpp, GeometryKind::Apg, &keep_points, &keep_lines)
}

/// Deletes one point of a projective plane together with the lines through
/// it, which leaves a dual affine plane.
pub fn remove_point(fpp: &Incidence, point: usize) -> Result<Incidence> {
    if fpp.kind != GeometryKind::Fpp || point >= fpp.points.len() {
        return Err(Error::InvalidParameters(
            "remove_point needs an FPP point".into(),
        ));
    }
    let keep_points: Vec<usize> = (0..fpp.points.len()).filter(|&p| p != point).collect();
    let keep_lines: Vec<usize> = (0..fpp.lines.len())
        .filter(|&l| !fpp.membership[point][l])
        .collect();
    restrict(fpp, GeometryKind::Dapg, &keep_points, &keep_lines)
}

/// For a linear space with `ν = d²` points and `k_L = d` points per line,
/// derives `(B, r_p) = (d(d+1), d+1)` by counting: `(d−1)·r = ν−1`, then
/// `r·ν = k_L·B`.
pub fn deduce_parameters(nu: u64, k_l: u64) -> Result<(u64, u64)> {
    if !crate::modfield::check_odd_prime(k_l) || nu != k_l * k_l {
        return Err(Error::InvalidParameters(format!(
            "expected (d², d) with d an odd prime, got ({nu}, {k_l})"
        )));
    }
    let r = (nu - 1) / (k_l - 1);
    if r * (k_l - 1) != nu - 1 || !(r * nu).is_multiple_of(k_l) {
        return Err(Error::InvalidParameters(
            "counting argument does not close".into(),
        ));
    }
    Ok((r * nu / k_l, r))
}

#[derive(Serialize, Deserialize)]
struct IncidenceWire {
    kind: GeometryKind,
    d: u32,
    points: Vec<PointId>,
    lines: Vec<LineId>,
    membership: Vec<Vec<u8>>,
}

impl Incidence {
    /// `{"kind","d","points","lines","membership"}`, membership rows indexed by point.
    pub fn to_json(&self) -> String {
        let wire = IncidenceWire {
            kind: self.kind,
            d: self.d,
            points: self.points.clone(),
            lines: self.lines.clone(),
            membership: self
                .membership
                .iter()
                .map(|r| r.iter().map(|&b| b as u8).collect())
                .collect(),
        };
        serde_json::to_string(&wire).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Incidence> {
        let wire: IncidenceWire =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let membership = wire
            .membership
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&v| match v {
                        0 => Ok(false),
                        1 => Ok(true),
                        _ => Err(Error::Parse(format!("membership entry {v} is not 0/1"))),
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Incidence::from_parts(wire.kind, wire.d, wire.points, wire.lines, membership)
    }
}
