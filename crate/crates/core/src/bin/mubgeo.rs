use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mubgeo::incidence::{self, BasisLabel, GeometryKind};
use mubgeo::io::MatrixFile;
use mubgeo::lineops::{self, Family};
use mubgeo::modfield::check_odd_prime;
use mubgeo::mub;
use mubgeo::phasespace::{self, DensityMatrix, PhaseTable};
use mubgeo::selftest;
use mubgeo::twoparticle::{Game, Protocol, SeededRng};
use mubgeo::{Error, Field};

#[derive(Parser)]
#[command(
    name = "mubgeo",
    version,
    about = "Finite geometry, MUB and phase-space toolkit for odd prime d"
)]
struct Cli {
    /// Seed for simulations.
    #[arg(long, global = true, env = "MUBGEO_SEED")]
    seed: Option<u64>,
    /// Numerical tolerance for input validation and checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Output format (csv only for wigner/radon tables).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Apg,
    Dapg,
    Fpp,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Mkp,
    Tmk,
}

#[derive(Subcommand)]
enum Command {
    /// Build an incidence structure and optionally check its axioms.
    Geometry {
        kind: Kind,
        d: u64,
        #[arg(long)]
        check: bool,
    },
    /// Emit MUB vectors, one JSON object per basis.
    Mub {
        d: u64,
        /// Only this basis (`CB` or a residue).
        #[arg(long)]
        basis: Option<String>,
    },
    /// Emit line operators, one JSON object per line.
    Lineops {
        d: u64,
        /// Line family `r,s`; defaults to the symmetric family `1,0`.
        #[arg(long, value_parser = parse_pair)]
        family: Option<(u32, u32)>,
        /// Only line `m_ddot,m0`.
        #[arg(long, value_parser = parse_pair)]
        line: Option<(u32, u32)>,
        /// Check orthogonality and report L² = I.
        #[arg(long)]
        check: bool,
    },
    /// Wigner table of a density matrix file `{"d","matrix"}`.
    Wigner {
        rho: PathBuf,
        /// Also emit the Radon table.
        #[arg(long)]
        radon: bool,
        /// Destination of the Radon table.
        #[arg(long)]
        radon_out: Option<PathBuf>,
    },
    /// Radon table of a Wigner table (CSV or JSON).
    Radon { table: PathBuf },
    /// Simulate Mean King (mkp) or tracking (tmk) rounds.
    Meanking {
        protocol: ProtocolArg,
        d: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        rounds: u64,
    },
    /// Run the invariant suite for each d.
    Selftest {
        #[arg(required = true)]
        d: Vec<u64>,
        #[arg(long, default_value_t = selftest::DEFAULT_MAX_D)]
        max_d: u64,
    },
}

fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `a,b`, got {s:?}"))?;
    let a = a.trim().parse().map_err(|_| format!("bad integer {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad integer {b:?}"))?;
    Ok((a, b))
}

enum Failure {
    Invariant(String),
    Usage(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invariant(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invariant(m) | Failure::Usage(m) | Failure::Input(m) => m,
        }
    }
}

/// Errors from user-supplied files.
fn input(e: Error) -> Failure {
    Failure::Input(e.to_string())
}

/// Errors from command-line arguments.
fn usage(e: Error) -> Failure {
    match e {
        Error::Parse(_) | Error::InvalidDensity(_) | Error::DimensionMismatch { .. } => {
            Failure::Input(e.to_string())
        }
        Error::NotOddPrime(_) | Error::InvalidFamily | Error::InvalidParameters(_) => {
            Failure::Usage(e.to_string())
        }
        _ => Failure::Invariant(e.to_string()),
    }
}

fn field(d: u64) -> Result<Field, Failure> {
    if !check_odd_prime(d) {
        return Err(Failure::Usage(Error::NotOddPrime(d).to_string()));
    }
    Field::new(d).map_err(usage)
}

fn json_only(format: Option<Format>, what: &str) -> Result<(), Failure> {
    match format {
        Some(Format::Csv) => Err(Failure::Usage(format!(
            "csv output is not available for {what}"
        ))),
        _ => Ok(()),
    }
}

fn write_to(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, content)
            .map_err(|e| Failure::Invariant(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())
                .map_err(|e| Failure::Invariant(format!("cannot write to stdout: {e}")))
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn lines(items: impl IntoIterator<Item = String>) -> String {
    items.into_iter().map(|s| s + "\n").collect()
}

fn run(cli: Cli) -> Result<(), Failure> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Geometry { kind, d, check } => {
            let _ = field(d)?;
            json_only(cli.format, "geometry")?;
            let kind = match kind {
                Kind::Apg => GeometryKind::Apg,
                Kind::Dapg => GeometryKind::Dapg,
                Kind::Fpp => GeometryKind::Fpp,
            };
            let g = incidence::build(kind, d).map_err(usage)?;
            if out.is_some() || !check {
                write_to(out, &(g.to_json() + "\n"))?;
            }
            if check {
                let report = incidence::check_axioms(&g);
                let (lhs, rhs) = incidence::counting_identity(&g);
                let p = g.parameters();
                let mut table = format!(
                    "{:?} d={d}: {} points, {} lines, k_L={:?}, r_p={:?}\n",
                    kind, p.nu, p.b, p.k_l, p.r_p
                );
                for e in &report.entries {
                    let status = if e.passed { "pass" } else { "FAIL" };
                    table.push_str(&format!("{:<10} {status}", e.axiom.name()));
                    if let Some(w) = &e.witness {
                        table.push_str(&format!("  {w}"));
                    }
                    table.push('\n');
                }
                let counting = lhs == rhs;
                table.push_str(&format!(
                    "{:<10} {}  {lhs} = {rhs}\n",
                    "counting",
                    if counting { "pass" } else { "FAIL" }
                ));
                write_to(None, &table)?;
                if !report.all_passed() || !counting {
                    return Err(Failure::Invariant("geometry check failed".into()));
                }
            }
        }
        Command::Mub { d, basis } => {
            let f = field(d)?;
            json_only(cli.format, "mub")?;
            let bases = match basis {
                Some(b) => {
                    vec![BasisLabel::parse(&b, f.d()).map_err(|e| Failure::Usage(e.to_string()))?]
                }
                None => BasisLabel::all(f.d()),
            };
            write_to(
                out,
                &lines(bases.into_iter().map(|b| mub::basis_to_json(&f, b))),
            )?;
        }
        Command::Lineops {
            d,
            family,
            line,
            check,
        } => {
            let f = field(d)?;
            json_only(cli.format, "lineops")?;
            let (r, s) = family.unwrap_or((1, 0));
            let fam = Family::new(&f, r, s).map_err(usage)?;
            let selected: Vec<(u32, u32)> = match line {
                Some((a, b)) => vec![(a % f.d(), b % f.d())],
                None => f
                    .residues()
                    .flat_map(|a| f.residues().map(move |b| (a, b)))
                    .collect(),
            };
            let ops = selected
                .into_iter()
                .map(|(a, b)| lineops::general_family_line(&f, fam, a, b).map(|l| l.to_json()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(usage)?;
            if out.is_some() || !check {
                write_to(out, &lines(ops))?;
            }
            if check {
                let table = lineops::orthogonality_table(&f, fam).map_err(usage)?;
                let orth = table.deviation_from(d as f64);
                let parity = lineops::family_lines(&f, fam)
                    .map_err(usage)?
                    .iter()
                    .map(lineops::parity_defect)
                    .fold(0.0, f64::max);
                let orth_ok = orth < cli.tol.max(1e-9);
                let parity_ok = parity < cli.tol;
                write_to(
                    None,
                    &format!(
                        "orthogonality {}  max deviation {orth:.3e}\nparity        {}  max |L²−I| {parity:.3e}\n",
                        if orth_ok { "pass" } else { "FAIL" },
                        if parity_ok { "holds" } else { "fails" },
                    ),
                )?;
                if !orth_ok || (fam.is_symmetric() && !parity_ok) {
                    return Err(Failure::Invariant("line operator check failed".into()));
                }
            }
        }
        Command::Wigner {
            rho,
            radon,
            radon_out,
        } => {
            let (d, m) = MatrixFile::parse(&read(&rho)?).map_err(input)?;
            if !check_odd_prime(d as u64) {
                return Err(Failure::Input(Error::NotOddPrime(d as u64).to_string()));
            }
            let f = Field::new(d as u64).map_err(input)?;
            let rho = DensityMatrix::new(m, cli.tol).map_err(input)?;
            let w = phasespace::wigner(&f, &rho).map_err(|e| Failure::Invariant(e.to_string()))?;
            let csv = cli.format != Some(Format::Json);
            write_to(out, &if csv { w.to_csv() } else { w.to_json() + "\n" })?;
            if radon || radon_out.is_some() {
                let r = phasespace::radon(&f, &w).map_err(usage)?;
                let text = if csv { r.to_csv() } else { r.to_json() + "\n" };
                if radon_out.is_none() && out.is_none() {
                    write_to(None, "\n")?;
                }
                write_to(radon_out.as_deref(), &text)?;
            }
            write_to(
                None,
                &format!("sum_w={:.12}\nmin_w={:.12}\n", w.sum(), w.min()),
            )?;
        }
        Command::Radon { table } => {
            let text = read(&table)?;
            let w = if text.trim_start().starts_with('{') {
                PhaseTable::from_json(&text)
            } else {
                PhaseTable::from_csv(&text)
            }
            .map_err(input)?;
            if !check_odd_prime(w.d as u64) {
                return Err(Failure::Input(Error::NotOddPrime(w.d as u64).to_string()));
            }
            let f = Field::new(w.d as u64).map_err(input)?;
            let r = phasespace::radon(&f, &w).map_err(input)?;
            let csv = cli.format != Some(Format::Json);
            write_to(out, &if csv { r.to_csv() } else { r.to_json() + "\n" })?;
        }
        Command::Meanking {
            protocol,
            d,
            rounds,
        } => {
            let f = field(d)?;
            json_only(cli.format, "meanking")?;
            let seed = cli.seed.ok_or_else(|| {
                Failure::Usage("a seed is required: pass --seed or set MUBGEO_SEED".into())
            })?;
            let protocol = match protocol {
                ProtocolArg::Mkp => Protocol::Mkp,
                ProtocolArg::Tmk => Protocol::Tmk,
            };
            let game = Game::new(&f, protocol);
            let (ts, summary) = game.run(rounds as usize, &mut SeededRng::new(seed));
            write_to(out, &lines(ts.iter().map(|t| t.to_json())))?;
            let mut report = serde_json::to_string(&summary).expect("serializable") + "\n";
            if protocol == Protocol::Tmk {
                let rate = exact_undetermined_rate(&f, &game);
                report.push_str(&format!(
                    "undetermined={} expected={:.3} exact_rate={rate:.6}\n",
                    summary.undetermined,
                    rate * rounds as f64
                ));
            }
            write_to(None, &report)?;
            if protocol == Protocol::Mkp && summary.correct != summary.rounds {
                return Err(Failure::Invariant(format!(
                    "retrodiction failed in {} rounds",
                    summary.rounds - summary.correct
                )));
            }
        }
        Command::Selftest { d, max_d } => {
            for &x in &d {
                selftest::validate(x, max_d).map_err(usage)?;
            }
            let reports = d
                .iter()
                .map(|&x| selftest::run(x, max_d))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Invariant(e.to_string()))?;
            write_to(out, &selftest::render(&reports))?;
            if let Some((r, c)) = reports
                .iter()
                .find_map(|r| r.first_failure().map(|c| (r, c)))
            {
                return Err(Failure::Invariant(format!(
                    "first failure at d={}: {} [{}] {}",
                    r.d, c.name, c.reference, c.detail
                )));
            }
        }
    }
    Ok(())
}

/// Probability of an undetermined round with the King's basis uniform.
fn exact_undetermined_rate(f: &Field, game: &Game) -> f64 {
    let report = game.exact();
    let nb = (f.d() + 1) as f64;
    report
        .undetermined
        .iter()
        .map(|(lab, p)| p * game.king_distribution(lab.b)[lab.m as usize] / nb)
        .sum()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
