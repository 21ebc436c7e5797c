//! The `eds` command line: argument parsing, check orchestration, text and
//! JSON reporting. Exit codes: 0 all checks pass, 1 a check failed, 2 bad
//! input.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff_ring::{render_rational, Rational, Scalar};
use crate::dsl;
use crate::invariants::{
    classify, h_matrix, minor_det, rank2_locus_check, symmetry_point, verify_discrete_symmetry,
    verify_minor_identities, ClassificationInput, TypeBPipeline,
};
use crate::linalg;
use crate::numerics::{
    self, convergence_factor, fd_closure_check, goursat_numeric, lambert_w, tau_numeric, BranchId,
    Equation, FdReport, ResidualSample,
};
use crate::report::{Outcome, Report};
use crate::structure::{
    builtin, chart_coframing, sigma_coframing, tau_coframing, verify_derived_coframing,
    verify_goursat_identities, Builtin, StructureModel,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Default seed for `eds fuzz` when `--seed` is not given.
pub const SEED_VAR: &str = "EDS_SEED";

#[derive(Debug, Parser)]
#[command(name = "eds", version, about = "Exact checks of structure equations for rank-2 Backlund transformations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify d² = 0 on every structure equation of a model.
    Check {
        /// Builtin model name (typeA1, sigma, tau, chart-goursat, typeB1).
        #[arg(long, conflicts_with = "file")]
        builtin: Option<String>,
        /// Model file in the .eds language.
        #[arg(required_unless_present = "builtin")]
        file: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        eps: Option<i64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Cohomogeneity of a Type A1 point.
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        eps: i64,
        /// H1,H2,H3,H4 as rationals, e.g. 2,2,0,-15/7.
        #[arg(long = "H", short = 'H', allow_negative_numbers = true)]
        h: String,
    },
    /// A minor of the h-matrix, symbolically or at a point.
    Minor {
        #[arg(long, allow_negative_numbers = true)]
        eps: Option<i64>,
        /// 1-based row indices.
        #[arg(long)]
        rows: String,
        /// 1-based column indices.
        #[arg(long)]
        cols: String,
        /// Evaluate at H1,H2,H3,H4.
        #[arg(long, allow_negative_numbers = true)]
        at: Option<String>,
    },
    /// The displayed minor identities of the h-matrix.
    Identities {
        #[arg(long, allow_negative_numbers = true)]
        eps: Option<i64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Constant rank 2 of h on both cohomogeneity-2 branches.
    Rank2 {
        #[arg(long, allow_negative_numbers = true)]
        eps: Option<i64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The discrete symmetry preserves the Type A1 equations.
    Symmetry {
        #[arg(long, allow_negative_numbers = true)]
        eps: Option<i64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The σ coframing satisfies the SIGMA equations.
    Sigma {
        #[arg(long, allow_negative_numbers = true)]
        eps: Option<i64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The τ coframing satisfies the TAU equations, exactly and in the
    /// numeric chart.
    Tau {
        #[arg(long, allow_negative_numbers = true)]
        eps: Option<i64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The Goursat chart, exactly and by finite differences.
    ChartGoursat {
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The Type B1 reduction pipeline.
    Typeb {
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// A real branch of Lambert W.
    Lambert {
        #[arg(long, allow_negative_numbers = true)]
        branch: i64,
        #[arg(allow_negative_numbers = true)]
        x: f64,
    },
    /// Residual of a cohomogeneity-2 equation at a sample or a JSON batch.
    Residual {
        #[arg(value_enum)]
        equation: EquationArg,
        /// x,y,p,q,zxy
        #[arg(long, allow_negative_numbers = true, required_unless_present = "batch")]
        point: Option<String>,
        /// JSON array of samples; the evaluated array goes to stdout.
        #[arg(long, conflicts_with = "point")]
        batch: Option<PathBuf>,
    },
    /// Randomized cross-checks of the classifier and the numeric layer.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EquationArg {
    Goursat,
    Lambertw,
}

impl From<EquationArg> for Equation {
    fn from(e: EquationArg) -> Equation {
        match e {
            EquationArg::Goursat => Equation::Goursat,
            EquationArg::Lambertw => Equation::Lambertw,
        }
    }
}

/// Failure that maps to exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CliResult = Result<i32, InputError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = write!(out, "{e}");
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            let _ = writeln!(out, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Check { builtin, file, eps, json } => check(builtin, file, eps, json, out),
        Command::Classify { eps, h } => {
            let h = parse_point(&h)?;
            let r = classify(&ClassificationInput::new(eps, h))?;
            writeln!(out, "cohomogeneity {} ({})", r.cohomogeneity, serde_json::to_string(&r.branch)?.trim_matches('"'))?;
            Ok(EXIT_PASS)
        }
        Command::Minor { eps, rows, cols, at } => minor(eps, &rows, &cols, at.as_deref(), out),
        Command::Identities { eps, json } => per_eps("identities", "type_a1", eps, json, out, |e| {
            Ok(verify_minor_identities(&type_a1(e)?)?)
        }),
        Command::Rank2 { eps, json } => per_eps("rank2", "type_a1", eps, json, out, rank2_outcomes),
        Command::Symmetry { eps, json } => per_eps("symmetry", "type_a1", eps, json, out, |e| {
            Ok(verify_discrete_symmetry(&type_a1(e)?)?)
        }),
        Command::Sigma { eps, json } => per_eps("sigma", "type_a1", eps, json, out, |e| {
            let sub = branch_one(e)?;
            let target = structure("SIGMA", Some(e))?;
            Ok(verify_derived_coframing(&sub, &sigma_coframing(&sub)?, &target)?)
        }),
        Command::Tau { eps, json } => per_eps("tau", "type_a1", eps, json, out, |e| {
            let sub = branch_one(e)?;
            let target = structure("TAU", None)?;
            let mut outcomes = verify_derived_coframing(&sub, &tau_coframing(&sub)?, &target)?;
            let chart = tau_numeric();
            let pts = chart.sample_points(20, 1);
            outcomes.extend(fd_outcomes(&fd_closure_check(&chart, &target, &pts, 1e-5, 1e-5)?));
            Ok(outcomes)
        }),
        Command::ChartGoursat { json } => {
            let start = Instant::now();
            let outcomes = goursat_outcomes()?;
            let report = Report::new("chart-goursat", Some("chart_goursat".into()), Some(1), outcomes, start.elapsed().as_millis());
            emit(vec![report], json.as_deref(), out)
        }
        Command::Typeb { json } => {
            let start = Instant::now();
            let p = TypeBPipeline::builtin()?;
            let report = Report::new("typeb", Some("type_b1".into()), None, p.outcomes, start.elapsed().as_millis());
            emit(vec![report], json.as_deref(), out)
        }
        Command::Lambert { branch, x } => {
            let b = BranchId::try_from(branch)?;
            writeln!(out, "{}", lambert_w(b, x)?)?;
            Ok(EXIT_PASS)
        }
        Command::Residual { equation, point, batch } => residual(equation.into(), point, batch, out),
        Command::Fuzz { cases, seed, json } => {
            let seed = match seed {
                Some(s) => s,
                None => match std::env::var(SEED_VAR) {
                    Ok(v) => v.trim().parse().map_err(|_| InputError(format!("{SEED_VAR}={v} is not a seed")))?,
                    Err(_) => 0,
                },
            };
            let start = Instant::now();
            let outcomes = fuzz(cases, seed)?;
            let report = Report::new(format!("fuzz --cases {cases} --seed {seed}"), None, None, outcomes, start.elapsed().as_millis());
            emit(vec![report], json.as_deref(), out)
        }
    }
}

fn structure(name: &str, eps: Option<i64>) -> Result<StructureModel, InputError> {
    Ok(builtin(name, eps)?.structure()?)
}

fn type_a1(eps: i64) -> Result<StructureModel, InputError> {
    structure("TYPE_A1", Some(eps))
}

fn bindings(m: &StructureModel, pairs: &[(&str, &str)]) -> Result<BTreeMap<String, Scalar>, InputError> {
    pairs
        .iter()
        .map(|(k, v)| Ok((k.to_string(), dsl::parse_scalar(v, m.ring())?)))
        .collect()
}

/// H₂ = 1, H₃ = −1.
pub const BRANCH_ONE: [(&str, &str); 2] = [("H2", "1"), ("H3", "-1")];
/// H₂ = ε(H₁)², H₄ = −ε.
pub const BRANCH_TWO: [(&str, &str); 2] = [("H2", "eps*H1^2"), ("H4", "-eps")];

fn branch_one(eps: i64) -> Result<StructureModel, InputError> {
    let m = type_a1(eps)?;
    Ok(m.derive_submodel(&bindings(&m, &BRANCH_ONE)?)?)
}

fn rank2_outcomes(eps: i64) -> Result<Vec<Outcome>, InputError> {
    let m = type_a1(eps)?;
    let mut outcomes = Vec::new();
    for (label, b) in [("branch 1", BRANCH_ONE), ("branch 2", BRANCH_TWO)] {
        let r = rank2_locus_check(&m, &bindings(&m, &b)?)?;
        outcomes.extend(r.outcomes.into_iter().map(|mut o| {
            o.identity = format!("{label}: {}", o.identity);
            o
        }));
    }
    Ok(outcomes)
}

fn fd_outcomes(r: &FdReport) -> Vec<Outcome> {
    r.outcomes
        .iter()
        .map(|o| {
            Outcome::verdict(
                format!("{} vs {} (h = {:e}): {}", r.chart, r.target, r.h, o.identity),
                o.passed,
                format!("max error {:e}", o.max_error),
            )
        })
        .collect()
}

/// Exact chart checks plus the numeric-mode closure and convergence checks.
pub fn goursat_outcomes() -> Result<Vec<Outcome>, InputError> {
    let chart = builtin("CHART_GOURSAT", None)?.chart()?;
    let sigma = structure("SIGMA", Some(1))?;
    let mut outcomes = verify_derived_coframing(chart.model(), &chart_coframing(&chart), &sigma)?;
    outcomes.extend(verify_goursat_identities(&chart)?);
    let numeric = goursat_numeric(&chart);
    let pts = numeric.sample_points(20, 1);
    let report = fd_closure_check(&numeric, &sigma, &pts, 1e-5, 1e-6)?;
    outcomes.extend(fd_outcomes(&report));
    let factor = convergence_factor(&numeric, &sigma, &pts, 1e-2)?;
    outcomes.push(Outcome::verdict(
        "second-order convergence (h = 1e-2 vs 5e-3)",
        (3.5..=4.5).contains(&factor),
        format!("error ratio {factor}"),
    ));
    Ok(outcomes)
}

fn check(
    name: Option<String>,
    file: Option<PathBuf>,
    eps: Option<i64>,
    json: Option<PathBuf>,
    out: &mut dyn Write,
) -> CliResult {
    if let Some(e) = eps {
        if e != 1 && e != -1 {
            return Err(InputError(format!("eps must be 1 or -1, got {e}")));
        }
    }
    let epss: Vec<Option<i64>> = match eps {
        Some(e) => vec![Some(e)],
        None => vec![Some(1), Some(-1)],
    };
    let mut reports = Vec::new();
    match (name, file) {
        (Some(name), _) => {
            for e in epss {
                let start = Instant::now();
                let (model, uses_eps, outcomes) = match builtin(&name, e)? {
                    Builtin::Chart(c) => {
                        let mut o = c.model().verify_closure();
                        o.extend(verify_goursat_identities(&c)?);
                        (c.name().to_string(), false, o)
                    }
                    Builtin::Structure(m) => (m.name().to_string(), m.eps().is_some(), m.verify_closure()),
                };
                reports.push(Report::new("check", Some(model), e.filter(|_| uses_eps), outcomes, start.elapsed().as_millis()));
                if !uses_eps {
                    break;
                }
            }
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            let parsed = dsl::parse(&text).map_err(|e| InputError(format!("{}:{e}", path.display())))?;
            for e in epss {
                let start = Instant::now();
                let uses_eps = !parsed.params.is_empty();
                let m = parsed
                    .instantiate_eps(e.filter(|_| uses_eps))
                    .map_err(|err| InputError(format!("{}:{err}", path.display())))?;
                reports.push(Report::new("check", Some(m.name().to_string()), m.eps(), m.verify_closure(), start.elapsed().as_millis()));
                if !uses_eps {
                    break;
                }
            }
        }
        (None, None) => return Err(InputError("give --builtin NAME or a model file".into())),
    }
    emit(reports, json.as_deref(), out)
}

fn per_eps(
    command: &str,
    model: &str,
    eps: Option<i64>,
    json: Option<PathBuf>,
    out: &mut dyn Write,
    f: impl Fn(i64) -> Result<Vec<Outcome>, InputError>,
) -> CliResult {
    let epss = match eps {
        Some(e) if e == 1 || e == -1 => vec![e],
        Some(e) => return Err(InputError(format!("eps must be 1 or -1, got {e}"))),
        None => vec![1, -1],
    };
    let mut reports = Vec::new();
    for e in epss {
        let start = Instant::now();
        let outcomes = f(e)?;
        reports.push(Report::new(command, Some(model.to_string()), Some(e), outcomes, start.elapsed().as_millis()));
    }
    emit(reports, json.as_deref(), out)
}

/// Prints each report, writes them as a JSON array if asked, and returns
/// the exit code.
fn emit(reports: Vec<Report>, json: Option<&Path>, out: &mut dyn Write) -> CliResult {
    for r in &reports {
        for o in &r.outcomes {
            if o.passed() {
                writeln!(out, "  ok    {}", o.identity)?;
            } else {
                writeln!(out, "  FAIL  {}  [{} terms] {}", o.identity, o.residual_terms, o.residual)?;
            }
        }
        let passed = r.outcomes.iter().filter(|o| o.passed()).count();
        let eps = r.eps.map(|e| format!(" eps={e}")).unwrap_or_default();
        let model = r.model.as_deref().map(|m| format!(" {m}")).unwrap_or_default();
        writeln!(
            out,
            "{}{}{}: {}/{} passed in {} ms",
            r.command,
            model,
            eps,
            passed,
            r.outcomes.len(),
            r.wall_time_ms
        )?;
    }
    if let Some(path) = json {
        std::fs::write(path, serde_json::to_string_pretty(&reports)?)
            .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    }
    Ok(if reports.iter().all(|r| r.pass) { EXIT_PASS } else { EXIT_FAIL })
}

fn parse_list(text: &str) -> Vec<&str> {
    text.split(',').map(str::trim).collect()
}

fn parse_rational(text: &str) -> Result<Rational, InputError> {
    text.parse::<Rational>()
        .map_err(|_| InputError(format!("`{text}` is not a rational number")))
}

/// Parses `h1,h2,h3,h4`.
pub fn parse_point(text: &str) -> Result<[Rational; 4], InputError> {
    let v = parse_list(text)
        .into_iter()
        .map(parse_rational)
        .collect::<Result<Vec<_>, _>>()?;
    v.try_into()
        .map_err(|v: Vec<Rational>| InputError(format!("expected 4 values H1,H2,H3,H4, got {}", v.len())))
}

fn parse_indices(text: &str) -> Result<Vec<usize>, InputError> {
    parse_list(text)
        .into_iter()
        .map(|s| s.parse::<usize>().map_err(|_| InputError(format!("`{s}` is not an index"))))
        .collect()
}

fn point_map(h: &[Rational; 4]) -> BTreeMap<String, Rational> {
    ["H1", "H2", "H3", "H4"]
        .iter()
        .zip(h)
        .map(|(n, v)| (n.to_string(), v.clone()))
        .collect()
}

fn minor(eps: Option<i64>, rows: &str, cols: &str, at: Option<&str>, out: &mut dyn Write) -> CliResult {
    let rows = parse_indices(rows)?;
    let cols = parse_indices(cols)?;
    let at = at.map(parse_point).transpose()?;
    let epss = match eps {
        Some(e) => vec![e],
        None => vec![1, -1],
    };
    for e in epss {
        let m = type_a1(e)?;
        let det = minor_det(&h_matrix(&m)?, &rows, &cols)?;
        match &at {
            None => writeln!(out, "eps={e}: {}", det.render())?,
            Some(h) => {
                ClassificationInput::new(e, h.clone()).validate()?;
                let v = det.eval(&point_map(h))?;
                writeln!(out, "eps={e}: {}", render_rational(&v))?;
            }
        }
    }
    Ok(EXIT_PASS)
}

fn residual(eq: Equation, point: Option<String>, batch: Option<PathBuf>, out: &mut dyn Write) -> CliResult {
    if let Some(path) = batch {
        let text = std::fs::read_to_string(&path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        let samples: Vec<ResidualSample> = serde_json::from_str(&text)?;
        let done = numerics::evaluate_batch(eq, &samples)?;
        writeln!(out, "{}", serde_json::to_string_pretty(&done)?)?;
        return Ok(EXIT_PASS);
    }
    let text = point.ok_or_else(|| InputError("give --point or --batch".into()))?;
    let v = parse_list(&text)
        .into_iter()
        .map(|s| s.parse::<f64>().map_err(|_| InputError(format!("`{s}` is not a number"))))
        .collect::<Result<Vec<_>, _>>()?;
    let [x, y, p, q, zxy]: [f64; 5] = v
        .try_into()
        .map_err(|_| InputError("expected x,y,p,q,zxy".into()))?;
    writeln!(out, "{}", numerics::residual(eq, &ResidualSample::new(x, y, p, q, zxy))?)?;
    Ok(EXIT_PASS)
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-12i64..=12).into(), rng.gen_range(1i64..=6).into())
}

/// A random admissible Type A1 point; `kind` selects generic, one of the
/// two cohomogeneity-2 loci, or χ₃ = 0.
fn random_point(rng: &mut ChaCha8Rng, eps: i64, kind: u8) -> Option<[Rational; 4]> {
    let e = Rational::from_integer(eps.into());
    let one = Rational::from_integer(1.into());
    let h1 = small_rational(rng).abs() + Rational::new(1.into(), 7.into());
    let mut h2 = small_rational(rng);
    let mut h3 = small_rational(rng);
    let mut h4 = small_rational(rng);
    match kind {
        1 => {
            h2 = one.clone();
            h3 = -one.clone();
        }
        2 => {
            h2 = &e * &h1 * &h1;
            h4 = -e.clone();
        }
        3 => {
            let c1 = &h2 - &one;
            let c2 = &h1 * &h1 - &e * &h2;
            let k = &e * &h2 + Rational::from_integer(3.into()) * &h1 * &h1;
            if c1.is_zero() || k.is_zero() {
                return None;
            }
            let a = &e * (Rational::from_integer(3.into()) * &h2 * &h3 + &h3 + Rational::from_integer(4.into()) * &h2);
            h4 = -e.clone() - a * c2 / (k * c1);
        }
        _ => {}
    }
    let h = [h1, h2, h3, h4];
    ClassificationInput::new(eps, h.clone()).validate().ok()?;
    Some(h)
}

/// Randomized cross-checks: classification against the exact rank of h,
/// classification invariance under the discrete symmetry, Lambert W round
/// trips and the (x,p) ↔ (y,q) symmetry of the Goursat residual.
pub fn fuzz(cases: usize, seed: u64) -> Result<Vec<Outcome>, InputError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hs = [(1, h_matrix(&type_a1(1)?)?), (-1, h_matrix(&type_a1(-1)?)?)];
    let mut rank_bad = Vec::new();
    let mut sym_bad = Vec::new();
    let mut lambert_bad = Vec::new();
    let mut residual_bad = Vec::new();
    let mut tried = 0;
    for case in 0..cases {
        let (eps, h) = &hs[rng.gen_range(0..2)];
        let kind = (case % 4) as u8;
        let point = loop {
            tried += 1;
            if let Some(p) = random_point(&mut rng, *eps, kind) {
                break p;
            }
        };
        let class = classify(&ClassificationInput::new(*eps, point.clone()))?;
        let rank = linalg::rational_rank(&h.eval(&point_map(&point))?)?;
        if rank != usize::from(class.cohomogeneity) {
            rank_bad.push(format!("eps={eps} H={}", render_point(&point)));
        }
        let image = symmetry_point(*eps, &point)?;
        match classify(&ClassificationInput::new(*eps, image.clone())) {
            Ok(c) if c.cohomogeneity == class.cohomogeneity => {}
            _ => sym_bad.push(format!("eps={eps} H={}", render_point(&point))),
        }

        let x = 10f64.powf(rng.gen_range(-30.0..30.0));
        let w = lambert_w(BranchId::Principal, x)?;
        if (w * w.exp() - x).abs() > 1e-12 * x.max(1.0) {
            lambert_bad.push(format!("W0({x:e})"));
        }
        let x = -rng.gen_range(1e-12..1.0) / std::f64::consts::E;
        for b in [BranchId::Principal, BranchId::Lower] {
            let w = lambert_w(b, x)?;
            if (w * w.exp() - x).abs() > 1e-12 {
                lambert_bad.push(format!("W{}({x:e})", b.value()));
            }
        }

        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let s = ResidualSample::new(
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
            sign * rng.gen_range(0.0..5.0),
            sign * rng.gen_range(0.0..5.0),
            rng.gen_range(-5.0..5.0),
        );
        let a = numerics::residual_goursat(&s)?;
        let b = numerics::residual_goursat(&s.swapped())?;
        if a != b {
            residual_bad.push(format!("{s:?}"));
        }
    }
    let verdict = |name: &str, bad: Vec<String>| {
        Outcome::verdict(
            name,
            bad.is_empty(),
            if bad.is_empty() { "0".to_string() } else { bad.join("; ") },
        )
    };
    Ok(vec![
        verdict(&format!("classification agrees with rank of h ({cases} points, {tried} drawn)"), rank_bad),
        verdict("classification is invariant under the discrete symmetry", sym_bad),
        verdict("Lambert W round trip", lambert_bad),
        verdict("Goursat residual symmetric under (x,p) <-> (y,q)", residual_bad),
    ])
}

fn render_point(h: &[Rational; 4]) -> String {
    h.iter().map(render_rational).collect::<Vec<_>>().join(",")
}
