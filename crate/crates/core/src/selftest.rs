//! Invariant suite run per dimension by `mubgeo selftest`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::incidence::{self, BasisLabel, GeometryKind, Parameters};
use crate::linalg;
use crate::lineops::{self, Family};
use crate::modfield::{check_odd_prime, Field, C64};
use crate::mub::{self, MubLabel};
use crate::phasespace;
use crate::twoparticle::{self, Game, Protocol};

/// Largest dimension accepted by default.
pub const DEFAULT_MAX_D: u64 = 23;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// Relation the check verifies.
    pub reference: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub d: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn check(name: &'static str, reference: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        reference,
        passed,
        detail,
    }
}

fn dev_check(name: &'static str, reference: &'static str, dev: f64, tol: f64) -> Check {
    check(
        name,
        reference,
        dev < tol,
        format!("max deviation {dev:.2e}"),
    )
}

/// Validates `d` against the odd-prime requirement and the cap.
pub fn validate(d: u64, max_d: u64) -> Result<Field> {
    if !check_odd_prime(d) {
        return Err(Error::NotOddPrime(d));
    }
    if d > max_d {
        return Err(Error::InvalidParameters(format!(
            "d = {d} exceeds the cap {max_d}"
        )));
    }
    Field::new(d)
}

pub fn run(d: u64, max_d: u64) -> Result<Report> {
    let field = validate(d, max_d)?;
    let mut checks = Vec::new();
    let du = d as u32;
    let dim = d as usize;
    let id = linalg::identity(dim);

    let mut field_ok = true;
    for a in 1..du {
        let inv = field.inv(a)?;
        field_ok &= field.mul(a, inv) == 1;
        field_ok &= field.add(field.half(a), field.half(a)) == a;
    }
    checks.push(check(
        "field",
        "a·a⁻¹ = 1 and 2·(a/2) = a",
        field_ok,
        String::new(),
    ));

    for kind in [GeometryKind::Apg, GeometryKind::Dapg, GeometryKind::Fpp] {
        let g = incidence::build(kind, d)?;
        let params = g.parameters();
        let expected = Parameters::expected(kind, du);
        checks.push(check(
            match kind {
                GeometryKind::Apg => "apg parameters",
                GeometryKind::Dapg => "dapg parameters",
                GeometryKind::Fpp => "fpp parameters",
            },
            "(ν, B, k_L, r_p) table",
            params == expected,
            format!("{params:?}"),
        ));
        let report = incidence::check_axioms(&g);
        let failed: Vec<&str> = report
            .entries
            .iter()
            .filter(|e| !e.passed)
            .map(|e| e.axiom.name())
            .collect();
        checks.push(check(
            match kind {
                GeometryKind::Apg => "apg axioms",
                GeometryKind::Dapg => "dapg axioms",
                GeometryKind::Fpp => "fpp axioms",
            },
            "linear-space axioms",
            failed.is_empty(),
            failed.join(","),
        ));
        let (lhs, rhs) = incidence::counting_identity(&g);
        checks.push(check(
            match kind {
                GeometryKind::Apg => "apg counting",
                GeometryKind::Dapg => "dapg counting",
                GeometryKind::Fpp => "fpp counting",
            },
            "Σ_lines k_L = Σ_points r_p",
            lhs == rhs,
            format!("{lhs} vs {rhs}"),
        ));
    }
    let apg = incidence::build_apg(d)?;
    let p = incidence::pencils(&apg)?;
    checks.push(check(
        "pencils",
        "d+1 parallel classes of d lines",
        p.count() == dim + 1 && p.class_size() == Some(dim),
        format!("{} classes", p.count()),
    ));

    let (cross, within) = mub::unbiasedness_check(&field);
    checks.push(dev_check(
        "mub unbiased",
        "|⟨m;b|m′;b′⟩|² = 1/d, orthonormal within a basis",
        cross.max(within),
        1e-10,
    ));

    let mut agree: f64 = 0.0;
    for a in field.residues() {
        for b in field.residues() {
            let closed = lineops::line_operator_closed(&field, a, b).matrix;
            let sum = lineops::line_operator_sum(&field, a, b).matrix;
            let par = lineops::displaced_parity(&field, a, b);
            agree = agree
                .max(linalg::max_abs_diff(&closed, &sum))
                .max(linalg::max_abs_diff(&closed, &par));
        }
    }
    checks.push(dev_check(
        "line operator forms",
        "Σ_b P − I = closed form = displaced parity",
        agree,
        1e-9,
    ));

    let lines = lineops::symmetric_lines(&field);
    let orth = lineops::orthogonality_table(&field, Family::SYMMETRIC)?;
    checks.push(dev_check(
        "orthogonality",
        "tr L_j L_j′ = d·δ_jj′",
        orth.deviation_from(d as f64),
        1e-9,
    ));
    let parity = lines.iter().map(lineops::parity_defect).fold(0.0, f64::max);
    checks.push(dev_check("parity", "L² = I", parity, 1e-10));

    let mut line_sum = linalg::zeros(dim);
    for l in &lines {
        line_sum += l;
    }
    let mut proj_sum = linalg::zeros(dim);
    for lab in MubLabel::all(du) {
        proj_sum += mub::projector(&field, lab.b, lab.m);
    }
    let universal = linalg::max_abs_diff(&(line_sum / C64::new(d as f64, 0.0)), &id).max(
        linalg::max_abs_diff(&(proj_sum / C64::new(d as f64 + 1.0, 0.0)), &id),
    );
    checks.push(dev_check(
        "universal relation",
        "(1/d)Σ_j L_j = (1/(d+1))Σ_α P_α = I",
        universal,
        1e-9,
    ));

    let mut apg_dev: f64 = 0.0;
    for r in field.residues() {
        for s in field.residues() {
            let lab = lineops::apg_point_label(&field, r, s);
            let p = mub::projector(&field, lab.b, lab.m);
            apg_dev = apg_dev.max(linalg::max_abs_diff(
                &lineops::apg_point_operator(&field, r, s),
                &p,
            ));
        }
        let v = lineops::apg_vertical_operator(&field, r);
        apg_dev = apg_dev.max(linalg::max_abs_diff(
            &v,
            &mub::projector(&field, BasisLabel::Cb, r),
        ));
    }
    checks.push(dev_check(
        "apg correspondence",
        "(1/d)Σ_m̈ L_(m̈, r·m̈+s) = P(s − b/2, −r)",
        apg_dev,
        1e-9,
    ));

    let (kernel, residue) = phasespace::lambda_kernel(&field);
    checks.push(check(
        "radon kernel",
        "tr(P_α L_j) = [α on j]",
        residue < 1e-9 && kernel == phasespace::incidence_kernel(&field),
        format!("rounding residue {residue:.2e}"),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(d);
    let mut w_dev: f64 = 0.0;
    let mut r_dev: f64 = 0.0;
    for _ in 0..5 {
        let rho = phasespace::random_density(dim, &mut rng);
        let w = phasespace::wigner(&field, &rho)?;
        w_dev = w_dev.max((w.sum() - 1.0).abs());
        let r = phasespace::radon(&field, &w)?;
        let born = phasespace::born_probabilities(&field, &rho);
        for (a, b) in r.values.iter().flatten().zip(born.values.iter().flatten()) {
            r_dev = r_dev.max((a - b).abs());
        }
    }
    checks.push(dev_check(
        "wigner normalization",
        "Σ W = tr ρ = 1",
        w_dev,
        1e-9,
    ));
    checks.push(dev_check(
        "radon",
        "Σ_j W_j Λ_αj = ⟨m;b|ρ|m;b⟩",
        r_dev,
        1e-9,
    ));
    let overlap = wigner_overlap_deviation(&field, &mut rng)?;
    checks.push(dev_check(
        "wigner overlap",
        "tr ρσ = d Σ W_ρ W_σ",
        overlap,
        1e-9,
    ));

    let basis = twoparticle::line_basis(&field);
    let gram_dev = linalg::max_abs_diff(&twoparticle::gram(&basis), &linalg::identity(dim * dim));
    checks.push(dev_check(
        "line states",
        "⟨L_j|L_j′⟩ = δ_jj′",
        gram_dev,
        1e-9,
    ));
    let mixed = &id / C64::new(d as f64, 0.0);
    let ent = basis
        .iter()
        .map(|s| linalg::max_abs_diff(&twoparticle::reduced_density(&field, s, 1), &mixed))
        .fold(0.0, f64::max);
    checks.push(dev_check("entanglement", "tr₂ |L⟩⟨L| = I/d", ent, 1e-9));
    let conj = twoparticle::conjugate_basis(&field);
    let mut mub_dev: f64 = 0.0;
    for a in &conj {
        for b in &basis {
            mub_dev = mub_dev.max((linalg::inner(a, b).norm() - 1.0 / d as f64).abs());
        }
    }
    checks.push(dev_check("conjugate basis", "|⟨L̃|L⟩| = 1/d", mub_dev, 1e-9));
    checks.push(check(
        "pencil sums",
        "Σ_m |m;b⟩|m̃;b̃⟩ independent of b",
        twoparticle::pencil_sum_check(&field),
        String::new(),
    ));

    let mkp = Game::new(&field, Protocol::Mkp).exact();
    checks.push(check(
        "mean king",
        "m = m₀′ + b·m̈′ − b/2 on every supported outcome",
        mkp.wrong.is_empty(),
        format!("{} wrong outcomes", mkp.wrong.len()),
    ));
    let tmk = Game::new(&field, Protocol::Tmk).exact();
    checks.push(check(
        "tracking",
        "b = −m₀′/m̈′ on every determined outcome",
        tmk.wrong.is_empty(),
        format!(
            "P(undetermined) = {:.6}",
            tmk.undetermined.first().map_or(0.0, |x| x.1)
        ),
    ));

    Ok(Report { d, checks })
}

fn wigner_overlap_deviation(field: &Field, rng: &mut ChaCha8Rng) -> Result<f64> {
    let dim = field.dim();
    let mut dev: f64 = 0.0;
    for _ in 0..3 {
        let a = phasespace::random_density(dim, rng);
        let b = phasespace::random_density(dim, rng);
        let wa = phasespace::wigner(field, &a)?;
        let wb = phasespace::wigner(field, &b)?;
        let lhs = linalg::trace_product(a.matrix(), b.matrix()).re;
        let rhs: f64 = dim as f64
            * wa.values
                .iter()
                .zip(&wb.values)
                .map(|(x, y)| x * y)
                .sum::<f64>();
        dev = dev.max((lhs - rhs).abs());
    }
    Ok(dev)
}

/// Fixed-width table, one row per check and one column per `d`.
pub fn render(reports: &[Report]) -> String {
    let mut out = format!("{:<22}", "check");
    for r in reports {
        out.push_str(&format!(" {:>6}", format!("d={}", r.d)));
    }
    out.push('\n');
    if let Some(first) = reports.first() {
        for (i, c) in first.checks.iter().enumerate() {
            out.push_str(&format!("{:<22}", c.name));
            for r in reports {
                out.push_str(&format!(
                    " {:>6}",
                    if r.checks[i].passed { "pass" } else { "FAIL" }
                ));
            }
            out.push('\n');
        }
    }
    out
}
