//! Two qudits: collective coordinates, the maximally entangled line-state
//! basis and its conjugate, the universal state, and seeded simulations of the
//! Mean King and tracking retrodiction games.
//!
//! Two-particle vectors have length `d²` with index `n₁·d + n₂`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::incidence::{self, BasisLabel};
use crate::linalg::{self, Matrix, StateVector};
use crate::modfield::{Field, C64};
use crate::mub::{self, MubLabel};

/// Probabilities below this are outside the sampling support.
pub const SUPPORT_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CollectiveIndex {
    pub n_r: u32,
    pub n_c: u32,
}

/// `n_r = (n₁−n₂)/2`, `n_c = (n₁+n₂)/2`.
pub fn collective_map(field: &Field, n1: u32, n2: u32) -> CollectiveIndex {
    CollectiveIndex {
        n_r: field.half(field.sub(n1, n2)),
        n_c: field.half(field.add(n1, n2)),
    }
}

/// `n₁ = n_r + n_c`, `n₂ = n_c − n_r`.
pub fn inverse_map(field: &Field, c: CollectiveIndex) -> (u32, u32) {
    (field.add(c.n_r, c.n_c), field.sub(c.n_c, c.n_r))
}

pub fn pair_index(field: &Field, n1: u32, n2: u32) -> usize {
    (n1 * field.d() + n2) as usize
}

/// `|a⟩₁|b⟩₂`.
pub fn product_state(a: &StateVector, b: &StateVector) -> StateVector {
    a.kronecker(b)
}

/// Builds `|c⟩_c |r⟩_r` in particle coordinates.
pub fn from_collective(field: &Field, c: &StateVector, r: &StateVector) -> StateVector {
    let d = field.dim();
    let mut out = StateVector::zeros(d * d);
    for n_r in field.residues() {
        for n_c in field.residues() {
            let (n1, n2) = inverse_map(field, CollectiveIndex { n_r, n_c });
            out[pair_index(field, n1, n2)] = c[n_c as usize] * r[n_r as usize];
        }
    }
    out
}

/// Normalized line state, amplitude `δ_{n+n′,2m̈}·ω^{−(n−n′)m₀}/√d`.
pub fn line_state(field: &Field, m_ddot: u32, m0: u32) -> StateVector {
    let d = field.dim();
    let norm = 1.0 / (d as f64).sqrt();
    let mut out = StateVector::zeros(d * d);
    for n in field.residues() {
        let np = field.sub(field.add(m_ddot, m_ddot), n);
        let e = field.mul(field.sub(n, np), m0);
        out[pair_index(field, n, np)] = field.omega(field.neg(e)) * norm;
    }
    out
}

/// `|L̃_{m₀;m̈}⟩ = |2m₀;0⟩_c |m̈;CB⟩_r`.
pub fn conjugate_line_state(field: &Field, m0: u32, m_ddot: u32) -> StateVector {
    let c = mub::mub_state(field, BasisLabel::Residue(0), field.add(m0, m0));
    let r = mub::mub_state(field, BasisLabel::Cb, m_ddot);
    from_collective(field, &c, &r)
}

/// All `d²` line states, `m̈` outer.
pub fn line_basis(field: &Field) -> Vec<StateVector> {
    field
        .residues()
        .flat_map(|a| field.residues().map(move |b| (a, b)))
        .map(|(a, b)| line_state(field, a, b))
        .collect()
}

/// All `d²` conjugate states, indexed `m̈·d + m₀` like [`line_basis`].
pub fn conjugate_basis(field: &Field) -> Vec<StateVector> {
    field
        .residues()
        .flat_map(|a| field.residues().map(move |b| (a, b)))
        .map(|(a, b)| conjugate_line_state(field, b, a))
        .collect()
}

/// `|m;b⟩₁ |m̃;b̃⟩₂`.
pub fn point_state(field: &Field, label: MubLabel) -> StateVector {
    let t = mub::tilde_map(field, label);
    product_state(
        &mub::mub_state(field, label.b, label.m),
        &mub::mub_state(field, t.b, t.m),
    )
}

/// `(1/√d)·Σ_m |m;b⟩₁ |m̃;b̃⟩₂`.
pub fn universal_state(field: &Field, b: BasisLabel) -> StateVector {
    let d = field.dim();
    let mut out = StateVector::zeros(d * d);
    for m in field.residues() {
        out += point_state(field, MubLabel::new(m, b));
    }
    out / C64::new((d as f64).sqrt(), 0.0)
}

/// Partial trace keeping particle `1` or `2`.
pub fn reduced_density(field: &Field, psi: &StateVector, keep: u8) -> Matrix {
    let d = field.dim();
    Matrix::from_fn(d, d, |i, j| {
        (0..d)
            .map(|k| {
                let (a, b) = if keep == 1 {
                    (i * d + k, j * d + k)
                } else {
                    (k * d + i, k * d + j)
                };
                psi[a] * psi[b].conj()
            })
            .sum()
    })
}

/// `X_c`: shifts `n_c` by one, i.e. `X ⊗ X`.
pub fn x_c(field: &Field) -> Matrix {
    let x = mub::x_op(field);
    x.kronecker(&x)
}

/// `Z_r^k`: phase `ω^{k·n_r}`.
pub fn z_r_pow(field: &Field, k: i64) -> Matrix {
    let d = field.dim();
    let k = field.reduce(k);
    let mut out = linalg::zeros(d * d);
    for n1 in field.residues() {
        for n2 in field.residues() {
            let i = pair_index(field, n1, n2);
            out[(i, i)] = field.omega(field.mul(k, collective_map(field, n1, n2).n_r));
        }
    }
    out
}

pub fn gram(states: &[StateVector]) -> Matrix {
    let n = states.len();
    Matrix::from_fn(n, n, |i, j| linalg::inner(&states[i], &states[j]))
}

/// `Σ_m |m;b⟩|m̃;b̃⟩` agrees across pencils and `Σ_m P(m,b) = I` for every `b`.
pub fn pencil_sum_check(field: &Field) -> bool {
    pencil_sum_check_with(field, mub::tilde_map)
}

pub fn pencil_sum_check_with(field: &Field, tilde: impl Fn(&Field, MubLabel) -> MubLabel) -> bool {
    let d = field.dim();
    let id = linalg::identity(d);
    let sums: Vec<StateVector> = BasisLabel::all(field.d())
        .into_iter()
        .map(|b| {
            let mut s = StateVector::zeros(d * d);
            let mut p = linalg::zeros(d);
            for m in field.residues() {
                let lab = MubLabel::new(m, b);
                let t = tilde(field, lab);
                s += product_state(
                    &mub::mub_state(field, b, m),
                    &mub::mub_state(field, t.b, t.m),
                );
                p += mub::projector(field, b, m);
            }
            if linalg::max_abs_diff(&p, &id) > 1e-10 {
                s.fill(C64::new(f64::NAN, 0.0));
            }
            s
        })
        .collect();
    sums.iter()
        .all(|s| linalg::max_abs_diff_vec(s, &sums[0]) < 1e-10)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Protocol {
    /// Alice measures the line-state basis and retrodicts the King's outcome.
    Mkp,
    /// Alice measures the conjugate basis and retrodicts the King's basis.
    Tmk,
}

impl Protocol {
    pub fn parse(s: &str) -> Result<Protocol> {
        match s.to_ascii_lowercase().as_str() {
            "mkp" => Ok(Protocol::Mkp),
            "tmk" => Ok(Protocol::Tmk),
            _ => Err(Error::Parse(format!("unknown protocol {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inference {
    Outcome(u32),
    Basis(BasisLabel),
    Undetermined,
}

impl Serialize for Inference {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Inference::Outcome(m) => s.serialize_u32(*m),
            Inference::Basis(b) => b.serialize(s),
            Inference::Undetermined => s.serialize_str("UNDETERMINED"),
        }
    }
}

/// Mean King rule: `m = m̈′` for CB, else `m = m₀′ + b·m̈′ − b/2`.
pub fn mkp_inference(field: &Field, b: BasisLabel, alice: (u32, u32)) -> u32 {
    incidence::dapg_line_row(field, alice.0, alice.1, b)
}

/// Tracking rule: `b = −m₀′/m̈′` if `m̈′ ≠ 0`; CB if only `m₀′ ≠ 0`.
pub fn tmk_inference(field: &Field, alice: (u32, u32)) -> Inference {
    match alice {
        (0, 0) => Inference::Undetermined,
        (0, _) => Inference::Basis(BasisLabel::Cb),
        (a, m0) => {
            let inv = field.inv(a).expect("nonzero");
            Inference::Basis(BasisLabel::Residue(field.neg(field.mul(m0, inv))))
        }
    }
}

/// ChaCha8 stream that can only be created from an explicit seed.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> SeededRng {
        SeededRng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.inner.gen_range(0..n)
    }

    /// Inverse-CDF draw over the entries of `probs` at or above [`SUPPORT_EPS`].
    pub fn sample(&mut self, probs: &[f64]) -> usize {
        let total: f64 = probs.iter().filter(|&&p| p >= SUPPORT_EPS).sum();
        let u = self.inner.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &p) in probs.iter().enumerate() {
            if p < SUPPORT_EPS {
                continue;
            }
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
        last
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transcript {
    pub protocol: Protocol,
    pub d: u32,
    pub seed: u64,
    pub b: BasisLabel,
    pub m: u32,
    pub alice: [u32; 2],
    pub inference: Inference,
    pub correct: bool,
}

#[derive(Deserialize)]
struct RawTranscript {
    protocol: Protocol,
    d: u32,
    seed: u64,
    b: BasisLabel,
    m: u32,
    alice: [u32; 2],
    inference: serde_json::Value,
    correct: bool,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Transcript> {
        let raw: RawTranscript =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let inference = match (&raw.inference, raw.protocol) {
            (serde_json::Value::String(u), _) if u == "UNDETERMINED" => Inference::Undetermined,
            (serde_json::Value::Number(n), Protocol::Mkp) => Inference::Outcome(
                n.as_u64()
                    .ok_or_else(|| Error::Parse(format!("bad inference {n}")))?
                    as u32,
            ),
            (v, Protocol::Tmk) => Inference::Basis(
                serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?,
            ),
            (v, _) => return Err(Error::Parse(format!("bad inference {v}"))),
        };
        Ok(Transcript {
            protocol: raw.protocol,
            d: raw.d,
            seed: raw.seed,
            b: raw.b,
            m: raw.m,
            alice: raw.alice,
            inference,
            correct: raw.correct,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rounds: usize,
    pub correct: usize,
    pub undetermined: usize,
    pub failure_rate: f64,
}

impl Summary {
    pub fn from_transcripts(ts: &[Transcript]) -> Summary {
        let rounds = ts.len();
        let correct = ts.iter().filter(|t| t.correct).count();
        let undetermined = ts
            .iter()
            .filter(|t| t.inference == Inference::Undetermined)
            .count();
        Summary {
            rounds,
            correct,
            undetermined,
            failure_rate: if rounds == 0 {
                0.0
            } else {
                (rounds - correct) as f64 / rounds as f64
            },
        }
    }
}

/// Precomputed states for repeated rounds of one protocol.
#[derive(Clone, Debug)]
pub struct Game {
    field: Field,
    protocol: Protocol,
    universal: StateVector,
    alice_basis: Vec<StateVector>,
}

impl Game {
    pub fn new(field: &Field, protocol: Protocol) -> Game {
        Game {
            field: field.clone(),
            protocol,
            universal: universal_state(field, BasisLabel::Cb),
            alice_basis: match protocol {
                Protocol::Mkp => line_basis(field),
                Protocol::Tmk => conjugate_basis(field),
            },
        }
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    /// `(P(m,b) ⊗ I)|R⟩` before normalization.
    fn projected(&self, b: BasisLabel, m: u32) -> StateVector {
        let p = mub::projector(&self.field, b, m);
        p.kronecker(&linalg::identity(self.field.dim())) * &self.universal
    }

    /// Born probabilities of the King's outcomes in basis `b`.
    pub fn king_distribution(&self, b: BasisLabel) -> Vec<f64> {
        self.field
            .residues()
            .map(|m| self.projected(b, m).norm_squared())
            .collect()
    }

    /// Post-measurement state for King outcome `(m, b)`.
    pub fn collapsed(&self, b: BasisLabel, m: u32) -> StateVector {
        self.projected(b, m).normalize()
    }

    /// `⟨A_j|ψ_{m,b}⟩` over Alice's basis, indexed `m̈′·d + m₀′`.
    pub fn alice_amplitudes(&self, b: BasisLabel, m: u32) -> Vec<C64> {
        let psi = self.collapsed(b, m);
        self.alice_basis
            .iter()
            .map(|a| linalg::inner(a, &psi))
            .collect()
    }

    pub fn alice_distribution(&self, b: BasisLabel, m: u32) -> Vec<f64> {
        self.alice_amplitudes(b, m)
            .iter()
            .map(|z| z.norm_sqr())
            .collect()
    }

    pub fn outcome_label(&self, j: usize) -> (u32, u32) {
        let d = self.field.dim();
        ((j / d) as u32, (j % d) as u32)
    }

    pub fn infer(&self, b: BasisLabel, alice: (u32, u32)) -> (Inference, bool) {
        match self.protocol {
            Protocol::Mkp => {
                let m = mkp_inference(&self.field, b, alice);
                (Inference::Outcome(m), true)
            }
            Protocol::Tmk => {
                let inf = tmk_inference(&self.field, alice);
                (inf, inf == Inference::Basis(b))
            }
        }
    }

    /// One round with King basis `b`; `king` fixes the King's outcome,
    /// otherwise it is sampled.
    pub fn round(&self, b: BasisLabel, king: Option<u32>, rng: &mut SeededRng) -> Transcript {
        let m = king.unwrap_or_else(|| rng.sample(&self.king_distribution(b)) as u32);
        let j = rng.sample(&self.alice_distribution(b, m));
        let alice = self.outcome_label(j);
        let (inference, mut correct) = self.infer(b, alice);
        if self.protocol == Protocol::Mkp {
            correct = inference == Inference::Outcome(m);
        }
        Transcript {
            protocol: self.protocol,
            d: self.field.d(),
            seed: rng.seed(),
            b,
            m,
            alice: [alice.0, alice.1],
            inference,
            correct,
        }
    }

    /// `rounds` rounds, King basis drawn uniformly each round.
    pub fn run(&self, rounds: usize, rng: &mut SeededRng) -> (Vec<Transcript>, Summary) {
        let n_bases = self.field.dim() + 1;
        let ts: Vec<Transcript> = (0..rounds)
            .map(|_| {
                let b = BasisLabel::from_index(rng.below(n_bases));
                self.round(b, None, rng)
            })
            .collect();
        let s = Summary::from_transcripts(&ts);
        (ts, s)
    }

    /// Exact analysis over every King label and every supported Alice outcome.
    pub fn exact(&self) -> ExactReport {
        let mut report = ExactReport::default();
        for lab in MubLabel::all(self.field.d()) {
            let probs = self.alice_distribution(lab.b, lab.m);
            let mut undetermined = 0.0;
            for (j, &p) in probs.iter().enumerate() {
                if p < SUPPORT_EPS {
                    continue;
                }
                let alice = self.outcome_label(j);
                let (inf, correct) = self.infer(lab.b, alice);
                let ok = match self.protocol {
                    Protocol::Mkp => inf == Inference::Outcome(lab.m),
                    Protocol::Tmk => correct || inf == Inference::Undetermined,
                };
                if inf == Inference::Undetermined {
                    undetermined += p;
                }
                if !ok {
                    report.wrong.push((lab, alice));
                }
            }
            report.undetermined.push((lab, undetermined));
        }
        report
    }

    /// Alice's outcome distribution with the King's basis fixed and his
    /// outcome unobserved.
    pub fn marginal(&self, b: BasisLabel) -> Vec<f64> {
        let king = self.king_distribution(b);
        let mut out = vec![0.0; self.alice_basis.len()];
        for (m, pm) in king.iter().enumerate() {
            for (o, p) in out.iter_mut().zip(self.alice_distribution(b, m as u32)) {
                *o += pm * p;
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExactReport {
    /// Exact probability of an undetermined inference per King label.
    pub undetermined: Vec<(MubLabel, f64)>,
    /// Supported outcomes whose inference is wrong.
    pub wrong: Vec<(MubLabel, (u32, u32))>,
}

impl ExactReport {
    pub fn max_undetermined_deviation(&self, target: f64) -> f64 {
        self.undetermined
            .iter()
            .map(|(_, p)| (p - target).abs())
            .fold(0.0, f64::max)
    }
}

pub fn mean_king_round(field: &Field, b: BasisLabel, rng: &mut SeededRng) -> Transcript {
    Game::new(field, Protocol::Mkp).round(b, None, rng)
}

pub fn tracking_round(field: &Field, b: BasisLabel, m: u32, rng: &mut SeededRng) -> Transcript {
    Game::new(field, Protocol::Tmk).round(b, Some(m), rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(d: u64) -> Field {
        Field::new(d).unwrap()
    }

    #[test]
    fn collective_examples() {
        let field = f(7);
        assert_eq!(
            collective_map(&field, 0, 0),
            CollectiveIndex { n_r: 0, n_c: 0 }
        );
        let c = collective_map(&field, 5, 1);
        assert_eq!(c, CollectiveIndex { n_r: 2, n_c: 3 });
        assert_eq!(inverse_map(&field, c), (5, 1));
        for d in [3u64, 5, 7] {
            let field = f(d);
            let mut seen = std::collections::HashSet::new();
            for a in field.residues() {
                for b in field.residues() {
                    let c = collective_map(&field, a, b);
                    assert_eq!(inverse_map(&field, c), (a, b));
                    seen.insert(c);
                }
            }
            assert_eq!(seen.len(), (d * d) as usize);
        }
    }

    proptest! {
        #[test]
        fn collective_round_trip(di in 0usize..5, a in 0u32..1000, b in 0u32..1000) {
            let d = [3u64, 5, 7, 11, 13][di];
            let field = f(d);
            let (a, b) = (a % d as u32, b % d as u32);
            prop_assert_eq!(inverse_map(&field, collective_map(&field, a, b)), (a, b));
        }
    }

    #[test]
    fn origin_line_state() {
        let field = f(5);
        let v = line_state(&field, 0, 0);
        for n in 0..5 {
            for np in 0..5 {
                let e = if (n + np) % 5 == 0 {
                    1.0 / 5f64.sqrt()
                } else {
                    0.0
                };
                assert!((v[pair_index(&field, n, np)] - C64::new(e, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn line_state_factorizes_with_derived_phase() {
        for d in [3u64, 5, 7] {
            let field = f(d);
            for a in field.residues() {
                for b in field.residues() {
                    let direct = line_state(&field, a, b);
                    let c = mub::mub_state(&field, BasisLabel::Cb, a);
                    let r = mub::mub_state(&field, BasisLabel::Residue(0), field.add(b, b));
                    assert!(
                        linalg::max_abs_diff_vec(&direct, &from_collective(&field, &c, &r)) < 1e-12
                    );
                    // ω^{2m̈m₀} Σ_n |n⟩|2m̈−n⟩ ω^{−2m₀n}
                    let mut expanded = StateVector::zeros((d * d) as usize);
                    for n in field.residues() {
                        let np = field.sub(field.add(a, a), n);
                        let ph = field.omega(field.mul(2, field.mul(a, b)))
                            * field.omega_signed(-2 * (b as i64) * (n as i64));
                        expanded[pair_index(&field, n, np)] = ph / (d as f64).sqrt();
                    }
                    assert!(linalg::max_abs_diff_vec(&direct, &expanded) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn shift_generation() {
        let field = f(5);
        let l00 = line_state(&field, 0, 0);
        let xc = x_c(&field);
        for a in field.residues() {
            for b in field.residues() {
                let g = xc.pow(a) * z_r_pow(&field, -2 * b as i64) * &l00;
                assert!(linalg::max_abs_diff_vec(&g, &line_state(&field, a, b)) < 1e-12);
            }
        }
    }

    #[test]
    fn bases_orthonormal_and_maximally_entangled() {
        for d in [3u64, 5, 7] {
            let field = f(d);
            let n = (d * d) as usize;
            let id = linalg::identity(n);
            let mixed = linalg::identity(d as usize) / C64::new(d as f64, 0.0);
            for basis in [line_basis(&field), conjugate_basis(&field)] {
                assert!(linalg::max_abs_diff(&gram(&basis), &id) < 1e-9);
                for s in &basis {
                    for keep in [1, 2] {
                        assert!(
                            linalg::max_abs_diff(&reduced_density(&field, s, keep), &mixed) < 1e-9
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn conjugate_overlaps() {
        for d in [3u64, 5] {
            let field = f(d);
            let df = d as f64;
            for a in field.residues() {
                for b in field.residues() {
                    let lt = conjugate_line_state(&field, b, a);
                    for ap in field.residues() {
                        for bp in field.residues() {
                            let l = line_state(&field, ap, bp);
                            let ov = linalg::inner(&l, &lt);
                            assert!((ov.norm() - 1.0 / df).abs() < 1e-12);
                            // ⟨L_{m̈′,m₀′}|L̃_{m₀;m̈}⟩ = ω^{−2m₀m̈′} ω^{2m₀′m̈} / d
                            let e = field.omega_signed(-2 * (b * ap) as i64)
                                * field.omega_signed(2 * (bp * a) as i64)
                                / df;
                            assert!((ov - e).norm() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn universal_state_is_pencil_independent() {
        for d in [3u64, 5] {
            let field = f(d);
            let n = (d * d) as usize;
            let mut target = StateVector::zeros(n);
            for k in field.residues() {
                target[pair_index(&field, k, k)] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
            }
            for b in BasisLabel::all(d as u32) {
                assert!(linalg::max_abs_diff_vec(&universal_state(&field, b), &target) < 1e-10);
            }
            let mut sum = StateVector::zeros(n);
            for l in line_basis(&field) {
                sum += l;
            }
            assert!(linalg::max_abs_diff_vec(&(sum / C64::new(d as f64, 0.0)), &target) < 1e-10);
        }
    }

    #[test]
    fn pencil_sums() {
        assert!(pencil_sum_check(&f(3)));
        assert!(pencil_sum_check(&f(7)));
        assert!(!pencil_sum_check_with(&f(3), |_, l| l));
    }

    #[test]
    fn inference_rules() {
        let field = f(5);
        assert_eq!(tmk_inference(&field, (0, 0)), Inference::Undetermined);
        assert_eq!(
            tmk_inference(&field, (0, 3)),
            Inference::Basis(BasisLabel::Cb)
        );
        // −m₀/m̈ = −4/2 = 3
        assert_eq!(
            tmk_inference(&field, (2, 4)),
            Inference::Basis(BasisLabel::Residue(3))
        );
        assert_eq!(mkp_inference(&field, BasisLabel::Cb, (3, 1)), 3);
        // 1 + 2·3 − 2/2 = 6 ≡ 1
        assert_eq!(mkp_inference(&field, BasisLabel::Residue(2), (3, 1)), 1);
    }

    #[test]
    fn mean_king_support_is_incidence() {
        for d in [3u64, 5, 7] {
            let field = f(d);
            let g = incidence::build_dapg(d).unwrap();
            let game = Game::new(&field, Protocol::Mkp);
            for (p, lab) in MubLabel::all(d as u32).into_iter().enumerate() {
                let amps = game.alice_amplitudes(lab.b, lab.m);
                for (j, a) in amps.iter().enumerate() {
                    if g.is_member(p, j) {
                        assert!((a.norm() - 1.0 / (d as f64).sqrt()).abs() < 1e-10);
                    } else {
                        assert!(a.norm() < 1e-10);
                    }
                }
            }
            let r = game.exact();
            assert!(r.wrong.is_empty());
            assert!(r.max_undetermined_deviation(0.0) == 0.0);
        }
    }

    #[test]
    fn king_outcomes_uniform_and_collapse_to_point_states() {
        let field = f(5);
        let game = Game::new(&field, Protocol::Mkp);
        for lab in MubLabel::all(5) {
            assert!((game.king_distribution(lab.b)[lab.m as usize] - 0.2).abs() < 1e-12);
            let c = game.collapsed(lab.b, lab.m);
            let ov = linalg::inner(&point_state(&field, lab), &c).norm();
            assert!((ov - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn alice_marginal_uniform() {
        let game = Game::new(&f(5), Protocol::Mkp);
        for b in BasisLabel::all(5) {
            assert!(game
                .marginal(b)
                .iter()
                .all(|p| (p - 1.0 / 25.0).abs() < 1e-12));
        }
    }

    #[test]
    fn tracking_outcomes_ignore_king_outcome() {
        let game = Game::new(&f(5), Protocol::Tmk);
        for b in BasisLabel::all(5) {
            let marginal = game.marginal(b);
            for m in 0..5 {
                let p = game.alice_distribution(b, m);
                assert!(p.iter().zip(&marginal).all(|(x, y)| (x - y).abs() < 1e-12));
            }
            assert_eq!(marginal.iter().filter(|&&p| p > SUPPORT_EPS).count(), 5);
        }
    }

    #[test]
    fn tracking_exact() {
        for d in [3u64, 5] {
            let field = f(d);
            let game = Game::new(&field, Protocol::Tmk);
            let r = game.exact();
            assert!(r.wrong.is_empty());
            // |R⟩ is the conjugate state with m₀ = m̈ = 0, so every King outcome
            // leaves overlap 1/√d with it.
            assert!(r.max_undetermined_deviation(1.0 / d as f64) < 1e-10);
            for lab in MubLabel::all(d as u32) {
                let probs = game.alice_distribution(lab.b, lab.m);
                for (j, &p) in probs.iter().enumerate() {
                    if p < SUPPORT_EPS {
                        continue;
                    }
                    let (a, m0) = game.outcome_label(j);
                    match lab.b {
                        BasisLabel::Cb => assert_eq!(a, 0),
                        BasisLabel::Residue(b) => assert_eq!(m0, field.neg(field.mul(b, a))),
                    }
                    assert!((p - 1.0 / d as f64).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn seeded_runs_reproduce() {
        let field = f(5);
        let game = Game::new(&field, Protocol::Mkp);
        let (a, sa) = game.run(500, &mut SeededRng::new(7));
        let (b, _) = game.run(500, &mut SeededRng::new(7));
        assert_eq!(a, b);
        assert_eq!(sa.correct, 500);
        let (c, _) = game.run(500, &mut SeededRng::new(8));
        assert_ne!(a, c);
    }

    #[test]
    fn single_rounds() {
        let field = f(3);
        let mut rng = SeededRng::new(1);
        for b in BasisLabel::all(3) {
            let t = mean_king_round(&field, b, &mut rng);
            assert!(t.correct);
            let t = tracking_round(&field, b, 2, &mut rng);
            assert_eq!(t.m, 2);
            assert_eq!(t.inference == Inference::Undetermined, t.alice == [0, 0]);
            if t.inference != Inference::Undetermined {
                assert!(t.correct);
            }
        }
    }

    #[test]
    fn sampler_skips_negligible_mass() {
        let mut rng = SeededRng::new(3);
        for _ in 0..1000 {
            assert_ne!(rng.sample(&[0.5, 1e-13, 0.5]), 1);
        }
        let mut counts = [0usize; 3];
        for _ in 0..30000 {
            counts[rng.sample(&[0.2, 0.3, 0.5])] += 1;
        }
        assert!((counts[2] as f64 / 30000.0 - 0.5).abs() < 0.02);
    }

    #[test]
    fn transcript_json() {
        let field = f(5);
        let mut rng = SeededRng::new(11);
        for protocol in [Protocol::Mkp, Protocol::Tmk] {
            let (ts, _) = Game::new(&field, protocol).run(200, &mut rng);
            for t in ts {
                let s = t.to_json();
                assert!(s.starts_with("{\"protocol\":"));
                assert_eq!(Transcript::from_json(&s).unwrap(), t);
            }
        }
        let t = Transcript {
            protocol: Protocol::Tmk,
            d: 3,
            seed: 1,
            b: BasisLabel::Cb,
            m: 0,
            alice: [0, 0],
            inference: Inference::Undetermined,
            correct: false,
        };
        assert_eq!(
            t.to_json(),
            r#"{"protocol":"TMK","d":3,"seed":1,"b":"CB","m":0,"alice":[0,0],"inference":"UNDETERMINED","correct":false}"#
        );
    }
}
