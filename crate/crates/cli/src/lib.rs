//! Command layer for `rp2-triangle`. Every command renders into a writer and
//! returns the process exit status, so the binary is a thin wrapper.

use std::ffi::OsString;
use std::io::Write;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use num_rational::BigRational;
use serde::Serialize;

use rp2_core::blowup::{
    epsilon_supremum, forward_periods, period_inverse, sigma_class, Binding, PeriodVector3,
    PeriodVector4,
};
use rp2_core::cone::{
    audin_scan, ball_form_conditions, decompose_curve_class, positivity_certificate,
    tilde_cone_membership, DecompositionCoefficients, KahlerClass, PositivityVerdict, Summand,
};
use rp2_core::lattice::{enumerate_classes, pontrjagin_square, ClassQuery};
use rp2_core::rational::{display_rational, parse_rational, serde_rational, serde_rational_vec};
use rp2_core::{admits_lagrangian_rp2, BlowupLattice, Certificate, LatticeClass, Verdict};

pub mod batch;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rp2-triangle", version, about = "Exact decision tool for Lagrangian RP² in B₃(μ₁, μ₂, μ₃)")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Print nothing on stdout; the exit status carries the result.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether B₃(μ₁, μ₂, μ₃) admits a Lagrangian RP².
    Decide {
        #[arg(num_args = 3, allow_negative_numbers = true, value_names = ["MU1", "MU2", "MU3"])]
        mu: Vec<String>,
    },
    /// Periods on the rational blow-up for a given ε.
    Transform {
        #[arg(num_args = 3, allow_negative_numbers = true, value_names = ["MU1", "MU2", "MU3"])]
        mu: Vec<String>,
        #[arg(long, allow_negative_numbers = true)]
        eps: String,
    },
    /// Recover (μ₁, μ₂, μ₃) and ε from (μ̃₀, .., μ̃₃), with λ = 1.
    Inverse {
        #[arg(num_args = 4, allow_negative_numbers = true, value_names = ["MU0", "MU1", "MU2", "MU3"])]
        mu_tilde: Vec<String>,
    },
    /// Supremum of the admissible blow-up sizes ε.
    EpsilonMax {
        #[arg(num_args = 3, allow_negative_numbers = true, value_names = ["MU1", "MU2", "MU3"])]
        mu: Vec<String>,
    },
    /// List classes of a given square and c₁-degree.
    Enumerate {
        /// B1, B2, B3 (standard basis H, E1..En) or B4 (H, Ẽ0..Ẽ3).
        #[arg(long)]
        lattice: String,
        #[arg(long, allow_negative_numbers = true)]
        square: i64,
        #[arg(long, allow_negative_numbers = true)]
        c1: i64,
        /// Comma-separated: H, Sigma, C1, E<i>, or a bracketed coefficient list.
        #[arg(long, allow_negative_numbers = true)]
        orth: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        h_degree: Option<i64>,
        #[arg(long)]
        primitive: bool,
    },
    /// Coordinates of a class of B4 in the basis Σ, F, Ẽ'₁, Ẽ'₂, Ẽ'₃.
    Decompose {
        /// Coefficients of H, Ẽ0, Ẽ1, Ẽ2, Ẽ3.
        #[arg(num_args = 5, allow_negative_numbers = true, value_names = ["H", "E0", "E1", "E2", "E3"])]
        class: Vec<String>,
        /// Also certify positive area against periods λ, μ̃₀, .., μ̃₃.
        #[arg(long, num_args = 5, allow_negative_numbers = true, value_names = ["LAMBDA", "MU0", "MU1", "MU2", "MU3"])]
        periods: Option<Vec<String>>,
    },
    /// Test membership of (λ; μ̃₀, .., μ̃₃) in the Kähler cone of B4.
    Kahler {
        #[arg(num_args = 5, allow_negative_numbers = true, value_names = ["LAMBDA", "MU0", "MU1", "MU2", "MU3"])]
        periods: Vec<String>,
    },
    /// Mod-2 classes in span{E₁, .., Eₙ} with Pontrjagin square 1 mod 4.
    Audin {
        #[arg(default_value_t = 3)]
        n: usize,
    },
    /// Re-derive every lattice computation and print a report.
    Verify,
    /// Decide every row of a CSV file with header mu1,mu2,mu3[,id].
    Batch {
        input: std::path::PathBuf,
        /// Output file for the JSON array; stdout when omitted or "-".
        output: Option<std::path::PathBuf>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    execute(&cli, out, err)
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut buf = Vec::new();
    let code = match dispatch(cli, &mut buf) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            return EXIT_ERROR;
        }
    };
    if !cli.quiet {
        let _ = out.write_all(&buf);
    }
    code
}

fn dispatch(cli: &Cli, out: &mut Vec<u8>) -> anyhow::Result<i32> {
    let json = cli.json;
    match &cli.command {
        Command::Decide { mu } => cmd_decide(&parse3(mu)?, json, out),
        Command::Transform { mu, eps } => {
            let eps = parse_rational(eps).with_context(|| format!("--eps {eps:?}"))?;
            cmd_transform(&parse3(mu)?, &eps, json, out)
        }
        Command::Inverse { mu_tilde } => cmd_inverse(&parse4(mu_tilde)?, json, out),
        Command::EpsilonMax { mu } => cmd_epsilon_max(&parse3(mu)?, json, out),
        Command::Enumerate {
            lattice,
            square,
            c1,
            orth,
            h_degree,
            primitive,
        } => {
            let lat = parse_lattice(lattice)?;
            let mut query = ClassQuery::new(lat, *square, *c1).primitive(*primitive);
            if let Some(list) = orth {
                for v in parse_class_list(lat, list)? {
                    query = query.orthogonal_to(v);
                }
            }
            if let Some(a) = h_degree {
                query = query.h_degree(*a);
            }
            cmd_enumerate(&query, json, out)
        }
        Command::Decompose { class, periods } => {
            let c = parse_tilde_class(class)?;
            let w = periods.as_deref().map(parse_kahler).transpose()?;
            cmd_decompose(&c, w.as_ref(), json, out)
        }
        Command::Kahler { periods } => cmd_kahler(&parse_kahler(periods)?, json, out),
        Command::Audin { n } => cmd_audin(*n, json, out),
        Command::Verify => cmd_verify(json, out),
        Command::Batch { input, output } => batch::cmd_batch(input, output.as_deref(), json, out),
    }
}

fn parse_values(raw: &[String]) -> anyhow::Result<Vec<BigRational>> {
    raw.iter()
        .map(|s| parse_rational(s).with_context(|| format!("cannot parse {s:?}")))
        .collect()
}

fn parse3(raw: &[String]) -> anyhow::Result<[BigRational; 3]> {
    parse_values(raw)?
        .try_into()
        .map_err(|v: Vec<_>| anyhow!("expected 3 values, got {}", v.len()))
}

fn parse4(raw: &[String]) -> anyhow::Result<[BigRational; 4]> {
    parse_values(raw)?
        .try_into()
        .map_err(|v: Vec<_>| anyhow!("expected 4 values, got {}", v.len()))
}

fn parse_kahler(raw: &[String]) -> anyhow::Result<KahlerClass> {
    let mut v = parse_values(raw)?;
    if v.len() != 5 {
        bail!("expected λ and four μ̃ values, got {} values", v.len());
    }
    let lambda = v.remove(0);
    let mu: [BigRational; 4] = v.try_into().expect("four values left");
    Ok(KahlerClass::new(lambda, mu))
}

fn parse_tilde_class(raw: &[String]) -> anyhow::Result<LatticeClass> {
    let coeffs = raw
        .iter()
        .map(|s| s.trim().parse::<num_bigint::BigInt>().with_context(|| format!("not an integer: {s:?}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(BlowupLattice::tilde().class(coeffs)?)
}

pub fn parse_lattice(name: &str) -> anyhow::Result<BlowupLattice> {
    match name.trim().to_ascii_uppercase().as_str() {
        "B1" => Ok(BlowupLattice::standard(1)),
        "B2" => Ok(BlowupLattice::standard(2)),
        "B3" => Ok(BlowupLattice::standard(3)),
        "B4" | "B4~" | "TILDE" => Ok(BlowupLattice::tilde()),
        other => bail!("unknown lattice {other:?}; expected B1, B2, B3 or B4"),
    }
}

/// Splits on commas outside brackets, so `H,[0,1,0,0,0]` has two items.
fn split_items(list: &str) -> Vec<String> {
    let mut items = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in list.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            ',' if depth == 0 => items.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    items.push(cur);
    items.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

pub fn parse_class_list(lat: BlowupLattice, list: &str) -> anyhow::Result<Vec<LatticeClass>> {
    split_items(list).iter().map(|item| parse_class_token(lat, item)).collect()
}

fn parse_class_token(lat: BlowupLattice, item: &str) -> anyhow::Result<LatticeClass> {
    if let Some(inner) = item.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        let coeffs = inner
            .split(',')
            .map(|s| s.trim().parse::<num_bigint::BigInt>().with_context(|| format!("not an integer: {s:?}")))
            .collect::<anyhow::Result<Vec<_>>>()?;
        return Ok(lat.class(coeffs)?);
    }
    let upper = item.to_ascii_uppercase();
    match upper.as_str() {
        "H" => return Ok(lat.h()),
        "C1" => return Ok(lat.c1()),
        "SIGMA" | "Σ" => return Ok(sigma_class(lat)?),
        _ => {}
    }
    let index = upper
        .strip_prefix('E')
        .or_else(|| item.strip_prefix("Ẽ"))
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| anyhow!("unknown class {item:?}; use H, Sigma, C1, E<i> or [a,b,..]"))?;
    let range = match lat.basis() {
        rp2_core::lattice::Basis::Standard => 1..=lat.n_exceptional(),
        rp2_core::lattice::Basis::Tilde => 0..=3,
    };
    if !range.contains(&index) {
        bail!("{item} is not a basis class of this lattice");
    }
    Ok(lat.e(index))
}

fn write_json<T: Serialize>(out: &mut Vec<u8>, value: &T) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    out.push(b'\n');
    Ok(())
}

fn joined(values: &[BigRational]) -> String {
    values.iter().map(display_rational).collect::<Vec<_>>().join(", ")
}

pub fn cmd_decide(mu: &[BigRational; 3], json: bool, out: &mut Vec<u8>) -> anyhow::Result<i32> {
    let cert = admits_lagrangian_rp2(mu)?;
    if json {
        write_json(out, &cert)?;
    } else {
        render_certificate(&cert, out)?;
    }
    Ok(match cert.verdict {
        Verdict::Yes => EXIT_OK,
        Verdict::No => EXIT_NO,
    })
}

fn render_certificate(cert: &Certificate, out: &mut Vec<u8>) -> anyhow::Result<()> {
    let verdict = match cert.verdict {
        Verdict::Yes => "YES",
        Verdict::No => "NO",
    };
    writeln!(out, "{verdict}")?;
    writeln!(out, "mu: {}", joined(&cert.mu))?;
    writeln!(out, "epsilon_sup: {} (not attained)", display_rational(&cert.epsilon_sup))?;
    if let Some(w) = &cert.witness {
        writeln!(out, "witness epsilon: {}", display_rational(&w.epsilon))?;
        writeln!(out, "witness mu_tilde: {}", joined(&w.mu_tilde))?;
    }
    if let Some(v) = &cert.violation {
        writeln!(out, "violation: {v}")?;
    }
    writeln!(out, "engine: {}", cert.engine)?;
    Ok(())
}

#[derive(Serialize)]
struct TransformReport {
    #[serde(with = "serde_rational")]
    lambda: BigRational,
    #[serde(with = "serde_rational_vec")]
    mu_tilde: Vec<BigRational>,
    valid: bool,
    failures: Vec<String>,
    #[serde(with = "serde_rational")]
    gap: BigRational,
    #[serde(with = "serde_rational")]
    four_epsilon: BigRational,
}

fn failures_of(q: &PeriodVector4) -> Vec<String> {
    q.failures.iter().map(ToString::to_string).collect()
}

pub fn cmd_transform(
    mu: &[BigRational; 3],
    eps: &BigRational,
    json: bool,
    out: &mut Vec<u8>,
) -> anyhow::Result<i32> {
    let q = forward_periods(mu, eps);
    let four_epsilon = eps * BigRational::from_integer(4.into());
    let report = TransformReport {
        lambda: q.lambda.clone(),
        mu_tilde: q.mu_tilde.to_vec(),
        valid: q.is_valid(),
        failures: failures_of(&q),
        gap: q.gap(),
        four_epsilon,
    };
    if json {
        write_json(out, &report)?;
    } else {
        writeln!(out, "lambda: {}", display_rational(&report.lambda))?;
        writeln!(out, "mu_tilde: {}", joined(&report.mu_tilde))?;
        let check = if report.gap == report.four_epsilon { "ok" } else { "MISMATCH" };
        writeln!(
            out,
            "gap μ̃₀ − Σμ̃ᵢ = {} = 4ε = {} ({check})",
            display_rational(&report.gap),
            display_rational(&report.four_epsilon)
        )?;
        if report.valid {
            writeln!(out, "valid")?;
        } else {
            writeln!(out, "invalid: {}", report.failures.join("; "))?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct InverseReport {
    #[serde(with = "serde_rational_vec")]
    mu: Vec<BigRational>,
    #[serde(with = "serde_rational")]
    epsilon: BigRational,
    epsilon_positive: bool,
    tilde_valid: bool,
    tilde_failures: Vec<String>,
    ball_failures: Vec<String>,
}

pub fn cmd_inverse(mu_tilde: &[BigRational; 4], json: bool, out: &mut Vec<u8>) -> anyhow::Result<i32> {
    let q = PeriodVector4::new(BigRational::from_integer(1.into()), mu_tilde.clone());
    let inv = period_inverse(&q)?;
    let report = InverseReport {
        mu: inv.mu.to_vec(),
        epsilon: inv.epsilon.clone(),
        epsilon_positive: inv.epsilon_is_positive(),
        tilde_valid: q.is_valid(),
        tilde_failures: failures_of(&q),
        ball_failures: ball_form_conditions(&inv.mu)
            .failures
            .iter()
            .map(ToString::to_string)
            .collect(),
    };
    if json {
        write_json(out, &report)?;
    } else {
        writeln!(out, "mu: {}", joined(&report.mu))?;
        writeln!(out, "epsilon: {}", display_rational(&report.epsilon))?;
        if report.tilde_valid {
            writeln!(out, "valid")?;
        } else {
            writeln!(out, "invalid: {}", report.tilde_failures.join("; "))?;
        }
        for f in &report.ball_failures {
            writeln!(out, "ball: {f}")?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct EpsilonReport {
    #[serde(with = "serde_rational_vec")]
    mu: Vec<BigRational>,
    #[serde(with = "serde_rational")]
    epsilon_sup: BigRational,
    attained: bool,
    empty: bool,
    binding: Vec<String>,
}

pub fn cmd_epsilon_max(mu: &[BigRational; 3], json: bool, out: &mut Vec<u8>) -> anyhow::Result<i32> {
    let p = PeriodVector3::new(mu.clone())?;
    let sup = epsilon_supremum(&p)?;
    let report = EpsilonReport {
        mu: mu.to_vec(),
        epsilon_sup: sup.value.clone(),
        attained: sup.attained,
        empty: sup.is_empty(),
        binding: sup.binding.iter().map(describe_binding).collect(),
    };
    if json {
        write_json(out, &report)?;
    } else {
        writeln!(out, "epsilon_sup: {} (not attained)", display_rational(&report.epsilon_sup))?;
        let label = if report.empty { "violated" } else { "binding" };
        writeln!(out, "{label}: {}", report.binding.join("; "))?;
    }
    Ok(if report.empty { EXIT_NO } else { EXIT_OK })
}

fn describe_binding(b: &Binding) -> String {
    match b {
        Binding::Triangle(_) => format!("{b} fails"),
        _ => b.to_string(),
    }
}

pub fn cmd_enumerate(query: &ClassQuery, json: bool, out: &mut Vec<u8>) -> anyhow::Result<i32> {
    let classes = enumerate_classes(query)?;
    if json {
        write_json(out, &classes)?;
    } else {
        for c in &classes {
            writeln!(out, "{c}")?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct DecomposeReport {
    class: LatticeClass,
    coefficients: DecompositionCoefficients,
    #[serde(skip_serializing_if = "Option::is_none")]
    positivity: Option<PositivityJson>,
}

#[derive(Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
enum PositivityJson {
    Sigma {
        #[serde(with = "serde_rational")]
        area: BigRational,
    },
    Fiber {
        component: String,
        #[serde(with = "serde_rational")]
        area: BigRational,
    },
    Decomposed {
        summands: Vec<Summand>,
        #[serde(with = "serde_rational")]
        area: BigRational,
    },
    NotCovered {
        reason: String,
    },
}

impl From<PositivityVerdict> for PositivityJson {
    fn from(v: PositivityVerdict) -> Self {
        match v {
            PositivityVerdict::Sigma { area } => PositivityJson::Sigma { area },
            PositivityVerdict::Fiber { component, area } => PositivityJson::Fiber { component, area },
            PositivityVerdict::Decomposed { summands, area, .. } => {
                PositivityJson::Decomposed { summands, area }
            }
            PositivityVerdict::NotCovered { reason } => PositivityJson::NotCovered { reason },
        }
    }
}

pub fn cmd_decompose(
    c: &LatticeClass,
    w: Option<&KahlerClass>,
    json: bool,
    out: &mut Vec<u8>,
) -> anyhow::Result<i32> {
    let coefficients = decompose_curve_class(c)?;
    let positivity = w.map(|w| positivity_certificate(c, w)).transpose()?.map(PositivityJson::from);
    let report = DecomposeReport {
        class: c.clone(),
        coefficients,
        positivity,
    };
    if json {
        write_json(out, &report)?;
    } else {
        let k = &report.coefficients;
        writeln!(out, "class: {c}")?;
        writeln!(
            out,
            "d = {}, m = {}, n' = ({}, {}, {})",
            k.d, k.m, k.n_prime[0], k.n_prime[1], k.n_prime[2]
        )?;
        match &report.positivity {
            None => {}
            Some(PositivityJson::Sigma { area }) => {
                writeln!(out, "Σ itself: area {}", display_rational(area))?
            }
            Some(PositivityJson::Fiber { component, area }) => {
                writeln!(out, "fiber component {component}: area {}", display_rational(area))?
            }
            Some(PositivityJson::Decomposed { summands, area }) => {
                for s in summands {
                    writeln!(out, "  {:<16} {}", s.label, display_rational(&s.area))?;
                }
                writeln!(out, "area: {}", display_rational(area))?;
            }
            Some(PositivityJson::NotCovered { reason }) => writeln!(out, "not covered: {reason}")?,
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct KahlerReport {
    member: bool,
    failures: Vec<String>,
}

pub fn cmd_kahler(w: &KahlerClass, json: bool, out: &mut Vec<u8>) -> anyhow::Result<i32> {
    let m = tilde_cone_membership(w);
    let report = KahlerReport {
        member: m.is_member(),
        failures: m.failures.iter().map(ToString::to_string).collect(),
    };
    if json {
        write_json(out, &report)?;
    } else if report.member {
        writeln!(out, "member")?;
    } else {
        writeln!(out, "not a member")?;
        for f in &report.failures {
            writeln!(out, "  {f}")?;
        }
    }
    Ok(if report.member { EXIT_OK } else { EXIT_NO })
}

#[derive(Serialize)]
struct AudinEntry {
    class: LatticeClass,
    pontrjagin_square: u8,
}

pub fn cmd_audin(n: usize, json: bool, out: &mut Vec<u8>) -> anyhow::Result<i32> {
    let found: Vec<AudinEntry> = audin_scan(n)?
        .into_iter()
        .map(|m| AudinEntry {
            pontrjagin_square: pontrjagin_square(&m),
            class: m.lift().clone(),
        })
        .collect();
    if json {
        write_json(out, &found)?;
    } else if found.is_empty() {
        writeln!(out, "none (n = {n})")?;
    } else {
        for e in &found {
            writeln!(out, "{}  P = {} mod 4", e.class, e.pontrjagin_square)?;
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(json: bool, out: &mut Vec<u8>) -> anyhow::Result<i32> {
    let report = rp2_core::verify::run_all();
    if json {
        write_json(out, &report)?;
    } else {
        out.extend_from_slice(report.render().as_bytes());
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_NO })
}
