//! Command-line front end. Exit codes: 0 yes, 1 no, 2 unknown, 3 input or
//! precondition error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use edmc_core::chordal::{chordal_complete, is_chordal, min_fill_in, Chordality, Completion};
use edmc_core::compress::{
    compress_cliquecover, compress_ktt, compress_maxdeg, detect_block_pattern,
    edge_clique_cover_search, CliqueCover, CompressOutcome, Verdict,
};
use edmc_core::embed::realize;
use edmc_core::poly::{
    solve_exact, solve_fillin, NoCertificate, PolyError, SolveOptions, SolveOutcome,
};
use edmc_core::{PartialMatrix, Realization, Tolerances};

use crate::format::{
    load_redacted, parse_cover, save_instance, serialize_instance, FormatError, Instance, Metadata,
};
use crate::generate::{gen_masked_pointcloud, MaskModel};
use crate::oracle::{oracle_solve, OracleOptions, OracleVerdict};
use crate::report::{Answer, Certificate, RunReport};
use crate::saxe::{cycle_edges, default_cycle_weights, gen_saxe};

pub const EXIT_INPUT: i32 = 3;

// stdout writes ignore errors so a closed pipe does not abort the run
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! say_raw {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

const SEARCH_BUDGET: u64 = 20_000_000;

#[derive(Debug, Parser)]
#[command(name = "edmc", version, about = "Euclidean distance matrix completion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether an instance has a completion in R^d.
    Solve(SolveArgs),
    /// Shrink an instance with an irrelevant-vertex compression.
    Compress(CompressArgs),
    /// Write a generated instance.
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Run the numerical cross-check oracle.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Auto,
    Exact,
    Fillin,
    Chordal,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub path: PathBuf,
    /// Target dimension; defaults to the one in the file.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, value_enum, default_value_t = Strategy::Auto)]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 4)]
    pub kmax: usize,
    #[arg(long, default_value_t = 8)]
    pub exact_cap: usize,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    /// Accepted for interface symmetry; the solvers run on one thread.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Separate variables for both orientations of each unspecified pair.
    #[arg(long)]
    pub split_vars: bool,
    /// Check the strategy's precondition first and fail with exit 3 if it does not hold.
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub report: bool,
    /// Write the completed matrix and its points here on yes.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    pub path: PathBuf,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Reduced instance file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub report: bool,
    #[command(subcommand)]
    pub scheme: Scheme,
}

#[derive(Debug, Subcommand)]
pub enum Scheme {
    /// No t-block pattern.
    Ktt {
        #[arg(long)]
        t: usize,
    },
    /// At most delta unspecified entries per row.
    Maxdeg {
        #[arg(long)]
        delta: usize,
    },
    /// Edge clique cover from a file, or searched for with at most k cliques.
    Cover {
        #[arg(long)]
        cover_file: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenerateCommand {
    /// Random points in the unit cube with a masked distance matrix.
    Masked {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: usize,
        /// perrow:D, blockfree:T, chordal, cover:K or edges:1-2,2-3,...
        #[arg(long, value_parser = parse_mask)]
        mask: MaskModel,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dense 2-dimensional instance from a weighted cycle.
    Saxe {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        /// Comma-separated cycle weights in 1..=4.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<u8>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub path: PathBuf,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub report: bool,
}

pub fn parse_mask(s: &str) -> Result<MaskModel, String> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let num = || {
        arg.parse::<usize>()
            .map_err(|_| format!("mask '{s}' needs a numeric argument"))
    };
    match kind {
        "perrow" => Ok(MaskModel::PerRowBudget(num()?)),
        "blockfree" => Ok(MaskModel::BlockFree(num()?)),
        "chordal" => Ok(MaskModel::ChordalGraph),
        "cover" => Ok(MaskModel::CliqueCover(num()?)),
        "edges" => arg
            .split(',')
            .filter(|e| !e.is_empty())
            .map(|e| {
                let (a, b) = e
                    .split_once('-')
                    .ok_or_else(|| format!("edge '{e}' is not u-v"))?;
                let a: usize = a.parse().map_err(|_| format!("bad vertex in '{e}'"))?;
                let b: usize = b.parse().map_err(|_| format!("bad vertex in '{e}'"))?;
                if a == 0 || b == 0 {
                    return Err(format!("vertices are 1-based in '{e}'"));
                }
                Ok((a - 1, b - 1))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(MaskModel::ExplicitGraph),
        _ => Err(format!("unknown mask '{s}'")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub strategy: Strategy,
    pub kmax: usize,
    pub exact_cap: usize,
    pub restarts: usize,
    pub seed: u64,
    pub split_vars: bool,
    pub tol: Tolerances,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            strategy: Strategy::Auto,
            kmax: 4,
            exact_cap: 8,
            restarts: 64,
            seed: 0,
            split_vars: false,
            tol: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub answer: Answer,
    pub certificate: Certificate,
    pub completion: Option<PartialMatrix>,
    /// Which solver produced the answer.
    pub route: &'static str,
    pub note: Option<String>,
}

impl SolveResult {
    fn unknown(route: &'static str, note: impl Into<String>) -> Self {
        SolveResult {
            answer: Answer::Unknown,
            certificate: Certificate::None,
            completion: None,
            route,
            note: Some(note.into()),
        }
    }

    fn no(route: &'static str, certificate: Certificate) -> Self {
        SolveResult {
            answer: Answer::No,
            certificate,
            completion: None,
            route,
            note: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{0}")]
    Solver(String),
}

/// A yes is only reported after the completion is checked against `m`:
/// specified entries bit-for-bit, points within `τ_real`, and the completion
/// itself passing `realize`.
pub fn verify_yes(
    m: &PartialMatrix,
    completion: &PartialMatrix,
    r: &Realization,
    d: usize,
    tol: &Tolerances,
) -> bool {
    let n = m.order();
    if completion.order() != n || !completion.is_complete() || r.dim > d {
        return false;
    }
    for i in 0..n {
        for j in 0..n {
            if let Some(v) = m.get(i, j) {
                if completion.get(i, j).map(f64::to_bits) != Some(v.to_bits()) {
                    return false;
                }
            }
        }
    }
    r.realizes(m, tol) && r.realizes(completion, tol) && realize(completion, d, tol).is_ok()
}

fn yes(
    m: &PartialMatrix,
    completion: PartialMatrix,
    r: Realization,
    d: usize,
    route: &'static str,
    tol: &Tolerances,
) -> SolveResult {
    if verify_yes(m, &completion, &r, d, tol) {
        SolveResult {
            answer: Answer::Yes,
            certificate: Certificate::Realization(r.points),
            completion: Some(completion),
            route,
            note: None,
        }
    } else {
        SolveResult::unknown(route, "candidate completion failed verification")
    }
}

fn from_poly(
    m: &PartialMatrix,
    d: usize,
    out: SolveOutcome,
    route: &'static str,
    tol: &Tolerances,
) -> SolveResult {
    match out {
        SolveOutcome::Yes {
            completion,
            realization,
        } => yes(m, completion, realization, d, route, tol),
        SolveOutcome::No(NoCertificate::CliqueInfeasible(c)) => {
            SolveResult::no(route, Certificate::FailingClique(c))
        }
        SolveOutcome::No(NoCertificate::Refuted) => SolveResult::no(route, Certificate::Refutation),
        SolveOutcome::Unknown => {
            SolveResult::unknown(route, "backend found neither a solution nor a refutation")
        }
    }
}

fn run_chordal(m: &PartialMatrix, d: usize, tol: &Tolerances) -> Result<SolveResult, CliError> {
    match chordal_complete(m, d, tol) {
        Ok(Completion::Complete {
            matrix,
            realization,
        }) => Ok(yes(m, matrix, realization, d, "chordal", tol)),
        Ok(Completion::No { clique }) => Ok(SolveResult::no(
            "chordal",
            Certificate::FailingClique(clique),
        )),
        Err(e) => Err(CliError::Solver(e.to_string())),
    }
}

fn poly_options(cfg: &SolveConfig) -> SolveOptions {
    SolveOptions {
        restarts: cfg.restarts,
        seed: cfg.seed,
        tol: cfg.tol,
        split_vars: cfg.split_vars,
        ..SolveOptions::default()
    }
}

fn run_exact(m: &PartialMatrix, d: usize, cfg: &SolveConfig) -> Result<SolveResult, CliError> {
    let out = solve_exact(m, d, &poly_options(cfg)).map_err(|e| CliError::Solver(e.to_string()))?;
    Ok(from_poly(m, d, out, "exact", &cfg.tol))
}

/// Solves with the configured strategy. `auto` tries the chordal route,
/// then fill-in up to `kmax`, then the basis-guessing algorithm when
/// `n ≤ exact_cap`.
pub fn solve_matrix(
    m: &PartialMatrix,
    d: usize,
    cfg: &SolveConfig,
) -> Result<SolveResult, CliError> {
    let tol = &cfg.tol;
    let chordal = matches!(is_chordal(&m.graph()), Chordality::Chordal(_));
    match cfg.strategy {
        Strategy::Chordal => {
            if !chordal {
                return Err(CliError::Precondition(
                    "graph of specified entries is not chordal".into(),
                ));
            }
            run_chordal(m, d, tol)
        }
        Strategy::Exact => run_exact(m, d, cfg),
        Strategy::Fillin => match solve_fillin(m, d, cfg.kmax, &poly_options(cfg)) {
            Ok(out) => Ok(from_poly(m, d, out, "fillin", tol)),
            Err(e @ (PolyError::FillInTooLarge { .. } | PolyError::BudgetExceeded)) => {
                Ok(SolveResult::unknown("fillin", e.to_string()))
            }
            Err(e) => Err(CliError::Solver(e.to_string())),
        },
        Strategy::Auto => {
            if chordal {
                return run_chordal(m, d, tol);
            }
            let mut reason = match solve_fillin(m, d, cfg.kmax, &poly_options(cfg)) {
                Ok(out) => {
                    let r = from_poly(m, d, out, "fillin", tol);
                    if r.answer != Answer::Unknown {
                        return Ok(r);
                    }
                    r.note.unwrap_or_default()
                }
                Err(e @ (PolyError::FillInTooLarge { .. } | PolyError::BudgetExceeded)) => {
                    e.to_string()
                }
                Err(e) => return Err(CliError::Solver(e.to_string())),
            };
            if m.order() <= cfg.exact_cap {
                let r = run_exact(m, d, cfg)?;
                if r.answer != Answer::Unknown {
                    return Ok(r);
                }
                reason = format!("fill-in: {reason}; exact: {}", r.note.unwrap_or_default());
            } else {
                reason = format!(
                    "fill-in: {reason}; n = {} exceeds --exact-cap {}",
                    m.order(),
                    cfg.exact_cap
                );
            }
            Ok(SolveResult::unknown("auto", reason))
        }
    }
}

fn check_strategy(m: &PartialMatrix, cfg: &SolveConfig) -> Result<(), CliError> {
    let g = m.graph();
    match cfg.strategy {
        Strategy::Chordal => {
            if let Chordality::NotChordal(c) = is_chordal(&g) {
                return Err(CliError::Precondition(format!(
                    "chordless cycle {:?}",
                    one_based(&c)
                )));
            }
        }
        Strategy::Fillin => match min_fill_in(&g, cfg.kmax, SEARCH_BUDGET) {
            Ok(Some(_)) => {}
            Ok(None) => {
                return Err(CliError::Precondition(format!(
                    "minimum fill-in exceeds {}",
                    cfg.kmax
                )))
            }
            Err(e) => return Err(CliError::Precondition(e.to_string())),
        },
        Strategy::Exact => {
            if m.order() > cfg.exact_cap {
                return Err(CliError::Precondition(format!(
                    "n = {} exceeds --exact-cap {}",
                    m.order(),
                    cfg.exact_cap
                )));
            }
        }
        Strategy::Auto => {}
    }
    Ok(())
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

fn instance_name(p: &Path) -> String {
    p.display().to_string()
}

fn load(path: &Path, dim: Option<usize>) -> Result<(PartialMatrix, usize), CliError> {
    let (m, d) = load_redacted(path)?;
    Ok((m, dim.unwrap_or(d)))
}

fn print_certificate(c: &Certificate) {
    match c {
        Certificate::Realization(points) => {
            for (i, p) in points.iter().enumerate() {
                let coords: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                say!("point {} {}", i + 1, coords.join(" "));
            }
        }
        Certificate::FailingClique(c) => say!("failing clique: {:?}", one_based(c)),
        Certificate::Refutation => say!("refuted"),
        Certificate::None => {}
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let (m, d) = load(&a.path, a.dim)?;
    let cfg = SolveConfig {
        strategy: a.strategy,
        kmax: a.kmax,
        exact_cap: a.exact_cap,
        restarts: a.restarts,
        seed: a.seed,
        split_vars: a.split_vars,
        tol: Tolerances::default(),
    };
    if a.verify {
        check_strategy(&m, &cfg)?;
    }
    let res = solve_matrix(&m, d, &cfg)?;
    say!("{}", res.answer.as_str());
    print_certificate(&res.certificate);
    if let Some(n) = &res.note {
        eprintln!("{n}");
    }
    if let (Some(out), Some(c), Certificate::Realization(points)) =
        (&a.out, &res.completion, &res.certificate)
    {
        let inst = Instance {
            matrix: c.clone(),
            d,
            meta: Metadata {
                generator: Some(format!("completion route={}", res.route)),
                points: points.clone(),
                ..Metadata::default()
            },
        };
        save_instance(out, &inst)?;
    }
    if a.report {
        let mut r = RunReport::new(instance_name(&a.path), "solve");
        r.answer = res.answer;
        r.certificate = res.certificate.clone();
        r.note = res.note.clone();
        r.param("dim", d);
        r.param("strategy", format!("{:?}", a.strategy).to_lowercase());
        r.param("route", res.route);
        r.param("kmax", a.kmax);
        r.param("exact_cap", a.exact_cap);
        r.param("restarts", a.restarts);
        r.param("seed", a.seed);
        r.wall_time = start.elapsed();
        say!("{r}");
    }
    Ok(res.answer.exit_code())
}

fn cmd_compress(a: &CompressArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let (m, d) = load(&a.path, a.dim)?;
    let tol = Tolerances::default();
    let mut report = RunReport::new(instance_name(&a.path), "compress");
    report.param("dim", d);
    let outcome = match &a.scheme {
        Scheme::Ktt { t } => {
            report.param("scheme", "ktt");
            report.param("t", t);
            if a.verify {
                match detect_block_pattern(&m, *t, SEARCH_BUDGET) {
                    Ok(None) => {}
                    Ok(Some(w)) => {
                        return Err(CliError::Precondition(format!(
                            "block pattern rows {:?} cols {:?}",
                            one_based(&w.rows),
                            one_based(&w.cols)
                        )))
                    }
                    Err(e) => return Err(CliError::Precondition(e.to_string())),
                }
            }
            compress_ktt(&m, d, *t, &tol)
        }
        Scheme::Maxdeg { delta } => {
            report.param("scheme", "maxdeg");
            report.param("delta", delta);
            compress_maxdeg(&m, d, *delta, &tol)
        }
        Scheme::Cover { cover_file, k } => {
            report.param("scheme", "cover");
            let cover = match (cover_file, k) {
                (Some(f), _) => {
                    let text = std::fs::read_to_string(f)
                        .map_err(|e| FormatError::Io(format!("{}: {e}", f.display())))?;
                    CliqueCover::new(parse_cover(&text, m.order())?)
                }
                (None, Some(k)) => match edge_clique_cover_search(&m.graph(), *k, SEARCH_BUDGET) {
                    Ok(Some(c)) => c,
                    Ok(None) => {
                        return Err(CliError::Precondition(format!(
                            "no edge clique cover with at most {k} cliques"
                        )))
                    }
                    Err(e) => return Err(CliError::Precondition(e.to_string())),
                },
                (None, None) => {
                    return Err(CliError::Precondition(
                        "cover needs --cover-file or --k".into(),
                    ))
                }
            };
            report.param("k", cover.len());
            compress_cliquecover(&m, d, &cover, &tol)
        }
    }
    .map_err(|e| CliError::Precondition(e.to_string()))?;

    report.removed = outcome.removed().to_vec();
    let kept = outcome.kept().to_vec();
    let reduced = match &outcome {
        CompressOutcome::Reduced { instance, .. } => instance.clone(),
        CompressOutcome::Solved { .. } => m.principal(&kept),
    };
    let code = match &outcome {
        CompressOutcome::Solved { verdict, .. } => {
            let (answer, cert) = match verdict {
                Verdict::Yes(r) => (Answer::Yes, Certificate::Realization(r.points.clone())),
                Verdict::No { clique } => (Answer::No, Certificate::FailingClique(clique.clone())),
            };
            say!("Solved({})", answer.as_str());
            report.answer = answer;
            report.certificate = cert;
            answer.exit_code()
        }
        CompressOutcome::Reduced { .. } => {
            say!("Reduced {} -> {} rows", m.order(), reduced.order());
            Answer::Unknown.exit_code()
        }
    };
    say!("removed: {:?}", one_based(&report.removed));
    let inst = Instance {
        matrix: reduced,
        d,
        meta: Metadata {
            extra: vec![
                format!("kept {}", join(&one_based(&kept))),
                format!("removed {}", join(&one_based(&report.removed))),
            ],
            ..Metadata::default()
        },
    };
    match &a.out {
        Some(out) => save_instance(out, &inst)?,
        None => say_raw!("{}", serialize_instance(&inst)),
    }
    if a.report {
        report.wall_time = start.elapsed();
        say!("{report}");
    }
    Ok(code)
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn emit(inst: &Instance, out: &Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(p) => {
            save_instance(p, inst)?;
            say!("wrote {} ({} rows)", p.display(), inst.matrix.order());
        }
        None => say_raw!("{}", serialize_instance(inst)),
    }
    Ok(())
}

fn cmd_generate(g: &GenerateCommand) -> Result<i32, CliError> {
    match g {
        GenerateCommand::Masked {
            n,
            dim,
            mask,
            seed,
            out,
        } => {
            let inst = gen_masked_pointcloud(*n, *dim, mask, *seed)
                .map_err(|e| CliError::Precondition(e.to_string()))?;
            emit(&inst, out)?;
        }
        GenerateCommand::Saxe {
            n,
            eps,
            weights,
            out,
        } => {
            let w = weights.clone().unwrap_or_else(|| default_cycle_weights(*n));
            if w.len() != *n {
                return Err(CliError::Precondition(format!(
                    "{} weights given for a cycle on {n} vertices",
                    w.len()
                )));
            }
            let inst = gen_saxe(*n, &cycle_edges(&w), *eps)
                .map_err(|e| CliError::Precondition(e.to_string()))?;
            emit(&inst, out)?;
        }
    }
    Ok(0)
}

fn cmd_oracle(a: &OracleArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let (m, d) = load(&a.path, a.dim)?;
    let opts = OracleOptions {
        restarts: a.restarts,
        seed: a.seed,
        threads: a.threads,
        ..OracleOptions::default()
    };
    let (answer, cert) = match oracle_solve(&m, d, &opts) {
        OracleVerdict::Yes(p) => (Answer::Yes, Certificate::Realization(p)),
        OracleVerdict::CertifiedNo { clique } => (Answer::No, Certificate::FailingClique(clique)),
        OracleVerdict::Unknown => (Answer::Unknown, Certificate::None),
    };
    say!("{}", answer.as_str());
    print_certificate(&cert);
    if answer == Answer::Unknown {
        eprintln!(
            "all {} restarts failed and no clique is infeasible",
            a.restarts
        );
    }
    if a.report {
        let mut r = RunReport::new(instance_name(&a.path), "oracle");
        r.answer = answer;
        r.certificate = cert;
        r.param("dim", d);
        r.param("restarts", a.restarts);
        r.param("seed", a.seed);
        r.wall_time = start.elapsed();
        say!("{r}");
    }
    Ok(answer.exit_code())
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Compress(a) => cmd_compress(a),
        Command::Generate(g) => cmd_generate(g),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}
