//! regdepth: depth values, maximum-depth fits, contour grids, and axiom
//! suites over CSV data.
//!
//! JSON is the machine interface: fixed key order, floats with 17
//! significant digits, so identical inputs and flags reproduce identical
//! bytes. CSV is used only for contour grids. Wall-clock timing goes to
//! stderr because it is not reproducible.
//!
//! Exit codes: 0 success, 1 failed axiom suite, 2 input or parse error,
//! 3 violated precondition (shape, rank, degenerate scale).

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use regdepth_core::axioms::{default_trials, run_suite, Family, Suite, SuiteOutcome};
use regdepth_core::depth::dc::{
    dc_exact, dc_sampled, hd_location, nd_location_sampled, DEFAULT_ZERO_TOL,
};
use regdepth_core::depth::obj::{obj_depth, Aggregator, Loss, ObjSpec, HUBER_DEFAULT_K};
use regdepth_core::depth::prd::{prd, TSpec};
use regdepth_core::depth::rd::{rd_bai_he, rd_competitor_bound, rd_exact_simple, rd_sampled};
use regdepth_core::estimators::{
    elemental_candidates, fit_deepest_rd, fit_ls, fit_obj, fit_prd_minimax, FitOptions, FitResult,
};
use regdepth_core::io::{read_points_csv, read_regression_csv};
use regdepth_core::{Coef, Dataset, DepthValue, DirectionPlan, Error};
use sha2::{Digest, Sha256};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "regdepth", version, about = "Regression depth toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one depth family at a fixed coefficient
    #[command(allow_negative_numbers = true)]
    Depth(DepthArgs),
    /// Compute a minimum-unfitness or maximum-depth fit
    #[command(allow_negative_numbers = true)]
    Fit(FitArgs),
    /// Export a depth grid over (beta1, beta2) as CSV
    #[command(allow_negative_numbers = true)]
    Contour(ContourArgs),
    /// Run machine-checked property suites for a depth family
    #[command(allow_negative_numbers = true)]
    Axioms(AxiomsArgs),
    /// Halfspace location depth with a sampled competitor cross-check
    #[command(allow_negative_numbers = true)]
    LocationHd(LocationArgs),
}

#[derive(Args)]
struct Globals {
    /// Seed for every randomized evaluator (fallback: REGDEPTH_SEED)
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread cap; results are identical for any value
    #[arg(long)]
    threads: Option<usize>,
    /// Zero-residual tolerance for the on-hyperplane family
    #[arg(long)]
    tol: Option<f64>,
    /// Random directions per plan (data directions are always added)
    #[arg(long)]
    directions: Option<usize>,
    /// Competitor count for sampled evaluators
    #[arg(long)]
    competitors: Option<usize>,
}

impl Globals {
    fn seed(&self) -> u64 {
        self.seed
            .or_else(|| {
                std::env::var("REGDEPTH_SEED").ok().and_then(|s| s.parse().ok())
            })
            .unwrap_or(0)
    }

    fn plan(&self) -> DirectionPlan {
        DirectionPlan::new(self.directions.unwrap_or(256), self.seed(), true)
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum FamilyArg {
    Obj,
    Rd,
    Dc,
    Prd,
}

impl FamilyArg {
    fn label(self) -> &'static str {
        match self {
            FamilyArg::Obj => "obj",
            FamilyArg::Rd => "rd",
            FamilyArg::Dc => "dc",
            FamilyArg::Prd => "prd",
        }
    }

    fn family(self) -> Family {
        match self {
            FamilyArg::Obj => Family::Obj,
            FamilyArg::Rd => Family::Rd,
            FamilyArg::Dc => Family::Dc,
            FamilyArg::Prd => Family::Prd,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum RdMethod {
    Exact,
    Sampled,
    Baihe,
    Competitor,
}

impl RdMethod {
    fn label(self) -> &'static str {
        match self {
            RdMethod::Exact => "exact",
            RdMethod::Sampled => "sampled",
            RdMethod::Baihe => "baihe",
            RdMethod::Competitor => "competitor",
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum LossArg {
    Square,
    Abs,
    Check,
    Huber,
}

#[derive(Copy, Clone, ValueEnum)]
enum AggArg {
    Mean,
    Quantile,
}

#[derive(Copy, Clone, ValueEnum)]
enum TArg {
    Median,
    Mean,
    Quantile,
}

#[derive(Copy, Clone, ValueEnum)]
enum SuiteArg {
    P1,
    P2,
    P3,
    P4,
    Qc,
    All,
}

impl SuiteArg {
    fn suite(self) -> Suite {
        match self {
            SuiteArg::P1 => Suite::P1,
            SuiteArg::P2 => Suite::P2,
            SuiteArg::P3 => Suite::P3,
            SuiteArg::P4 => Suite::P4,
            SuiteArg::Qc => Suite::Qc,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum FitMethod {
    Ls,
    Lad,
    Quantile,
    Lms,
    DeepestRd,
    Prd,
}

impl FitMethod {
    fn label(self) -> &'static str {
        match self {
            FitMethod::Ls => "ls",
            FitMethod::Lad => "lad",
            FitMethod::Quantile => "quantile",
            FitMethod::Lms => "lms",
            FitMethod::DeepestRd => "deepest-rd",
            FitMethod::Prd => "prd",
        }
    }
}

/// Comma-separated float list, used for --beta and --point.
#[derive(Clone)]
struct F64List(Vec<f64>);

fn parse_f64_list(s: &str) -> Result<F64List, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse '{t}' as a number"))
        })
        .collect::<Result<Vec<f64>, String>>()
        .map(F64List)
}

/// Family-specific evaluation flags shared by `depth` and `contour`.
#[derive(Args)]
struct FamilyFlags {
    /// Residual loss for the objective family
    #[arg(long, value_enum, default_value_t = LossArg::Square)]
    loss: LossArg,
    /// Check-loss tau, or quantile-transform tau for --t quantile
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    /// Huber loss threshold
    #[arg(long, default_value_t = HUBER_DEFAULT_K)]
    huber_k: f64,
    /// Aggregator over the loss sample
    #[arg(long, value_enum, default_value_t = AggArg::Mean)]
    agg: AggArg,
    /// Quantile level for --agg quantile
    #[arg(long, default_value_t = 0.5)]
    agg_tau: f64,
    /// Location transform for the projection family
    #[arg(long = "t", value_enum, default_value_t = TArg::Median)]
    transform: TArg,
    /// Evaluator for the count-depth family
    #[arg(long, value_enum, default_value_t = RdMethod::Exact)]
    method: RdMethod,
}

impl FamilyFlags {
    fn obj_spec(&self) -> Result<ObjSpec, Error> {
        let loss = match self.loss {
            LossArg::Square => Loss::Square,
            LossArg::Abs => Loss::Abs,
            LossArg::Check => Loss::Check(self.tau),
            LossArg::Huber => Loss::Huber(self.huber_k),
        };
        let agg = match self.agg {
            AggArg::Mean => Aggregator::Mean,
            AggArg::Quantile => Aggregator::Quantile(self.agg_tau),
        };
        ObjSpec::new(loss, agg)
    }

    fn tspec(&self) -> TSpec {
        match self.transform {
            TArg::Median => TSpec::Median,
            TArg::Mean => TSpec::Mean,
            TArg::Quantile => TSpec::Quantile(self.tau),
        }
    }

    /// Method label recorded in the output, per family.
    fn method_label(&self, family: FamilyArg, sampled_dc: bool) -> String {
        match family {
            FamilyArg::Obj => format!(
                "{}+{}",
                match self.loss {
                    LossArg::Square => "square",
                    LossArg::Abs => "abs",
                    LossArg::Check => "check",
                    LossArg::Huber => "huber",
                },
                match self.agg {
                    AggArg::Mean => "mean",
                    AggArg::Quantile => "quantile",
                }
            ),
            FamilyArg::Rd => self.method.label().to_string(),
            FamilyArg::Dc => if sampled_dc { "sampled" } else { "exact" }.to_string(),
            FamilyArg::Prd => match self.transform {
                TArg::Median => "median".to_string(),
                TArg::Mean => "mean".to_string(),
                TArg::Quantile => "quantile".to_string(),
            },
        }
    }
}

#[derive(Args)]
struct DepthArgs {
    /// Input CSV with a header row
    input: PathBuf,
    /// Depth family to evaluate
    #[arg(long = "depth", value_enum)]
    family: FamilyArg,
    /// Coefficient vector, comma separated
    #[arg(long, value_parser = parse_f64_list)]
    beta: F64List,
    /// Response column name
    #[arg(long, default_value = "y")]
    response: String,
    /// Do not prepend a synthetic intercept column
    #[arg(long)]
    no_intercept: bool,
    #[command(flatten)]
    flags: FamilyFlags,
    #[command(flatten)]
    globals: Globals,
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV with a header row
    input: PathBuf,
    /// Fitting method
    #[arg(long, value_enum)]
    method: FitMethod,
    /// Response column name
    #[arg(long, default_value = "y")]
    response: String,
    /// Do not prepend a synthetic intercept column
    #[arg(long)]
    no_intercept: bool,
    /// Check-loss tau for --method quantile, transform tau for prd
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    /// Quantile level of the LMS-style aggregator
    #[arg(long, default_value_t = 0.5)]
    agg_tau: f64,
    /// Location transform for --method prd
    #[arg(long = "t", value_enum, default_value_t = TArg::Median)]
    transform: TArg,
    #[command(flatten)]
    globals: Globals,
}

#[derive(Args)]
struct ContourArgs {
    /// Input CSV with a header row
    input: PathBuf,
    /// Depth family to grid
    #[arg(long = "depth", value_enum, default_value_t = FamilyArg::Rd)]
    family: FamilyArg,
    /// Grid steps per axis
    #[arg(long)]
    steps: usize,
    /// Grid CSV destination
    #[arg(long)]
    output: PathBuf,
    /// Response column name
    #[arg(long, default_value = "y")]
    response: String,
    /// Do not prepend a synthetic intercept column
    #[arg(long)]
    no_intercept: bool,
    /// Intercept-axis lower bound (default: 3x the elemental range)
    #[arg(long)]
    b1_min: Option<f64>,
    /// Intercept-axis upper bound
    #[arg(long)]
    b1_max: Option<f64>,
    /// Slope-axis lower bound
    #[arg(long)]
    b2_min: Option<f64>,
    /// Slope-axis upper bound
    #[arg(long)]
    b2_max: Option<f64>,
    #[command(flatten)]
    flags: FamilyFlags,
    #[command(flatten)]
    globals: Globals,
}

#[derive(Args)]
struct AxiomsArgs {
    /// Depth family to check
    #[arg(long = "depth", value_enum)]
    family: FamilyArg,
    /// Property suite to run
    #[arg(long, value_enum)]
    suite: SuiteArg,
    /// Trials per suite (default: the suite's pinned count)
    #[arg(long)]
    trials: Option<usize>,
    /// Report destination (default: stdout)
    #[arg(long)]
    json: Option<PathBuf>,
    #[command(flatten)]
    globals: Globals,
}

#[derive(Args)]
struct LocationArgs {
    /// Input CSV where every column is a coordinate
    input: PathBuf,
    /// Evaluation point, comma separated
    #[arg(long, value_parser = parse_f64_list)]
    point: F64List,
    #[command(flatten)]
    globals: Globals,
}

struct CliError {
    code: u8,
    msg: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Csv(_) => 2,
            _ => 3,
        };
        CliError { code, msg: e.to_string() }
    }
}

fn precondition(msg: impl Into<String>) -> CliError {
    CliError { code: 3, msg: msg.into() }
}

fn io_error(msg: impl Into<String>) -> CliError {
    CliError { code: 2, msg: msg.into() }
}

// JSON helpers: fixed key order comes from call sites, floats carry 17
// significant digits so equal values serialize to equal bytes.

fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "\"NaN\"".to_string()
    } else if x > 0.0 {
        "\"Infinity\"".to_string()
    } else {
        "\"-Infinity\"".to_string()
    }
}

fn fmt_f64_array(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| fmt_f64(x)).collect();
    format!("[{}]", parts.join(","))
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn json_str(s: &str) -> String {
    format!("\"{}\"", json_escape(s))
}

/// Hash of the semantic run configuration. Thread count and output
/// destinations are excluded: they must not change results.
fn config_hash(parts: &[(&str, String)]) -> String {
    let mut h = Sha256::new();
    for (k, v) in parts {
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
        h.update(b";");
    }
    format!("{:x}", h.finalize())
}

fn counts_json(d: &DepthValue) -> Option<String> {
    d.counts().map(|(num, den)| format!("[{num},{den}]"))
}

fn read_dataset(input: &PathBuf, response: &str, no_intercept: bool) -> Result<Dataset, CliError> {
    Ok(read_regression_csv(input, response, !no_intercept)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = match &cli.command {
        Command::Depth(a) => a.globals.threads,
        Command::Fit(a) => a.globals.threads,
        Command::Contour(a) => a.globals.threads,
        Command::Axioms(a) => a.globals.threads,
        Command::LocationHd(a) => a.globals.threads,
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| precondition(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Depth(args) => cmd_depth(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Contour(args) => cmd_contour(args),
        Command::Axioms(args) => cmd_axioms(args),
        Command::LocationHd(args) => cmd_location(args),
    }
}

fn cmd_depth(args: DepthArgs) -> Result<(), CliError> {
    let ds = read_dataset(&args.input, &args.response, args.no_intercept)?;
    let beta = Coef::from_slice(&args.beta.0)?;
    let seed = args.globals.seed();
    let sampled_dc = args.globals.competitors.is_some();
    let method = args.flags.method_label(args.family, sampled_dc);

    let t0 = Instant::now();
    let value = match args.family {
        FamilyArg::Obj => obj_depth(&ds, &beta, &args.flags.obj_spec()?)?,
        FamilyArg::Rd => match args.flags.method {
            RdMethod::Exact => rd_exact_simple(&ds, &beta)?,
            RdMethod::Sampled => rd_sampled(&ds, &beta, &args.globals.plan())?,
            RdMethod::Baihe => rd_bai_he(&ds, &beta, &args.globals.plan())?,
            RdMethod::Competitor => {
                rd_competitor_bound(&ds, &beta, args.globals.competitors.unwrap_or(1000), seed)?
            }
        },
        FamilyArg::Dc => match args.globals.competitors {
            Some(n) => dc_sampled(&ds, &beta, n, seed)?,
            None => dc_exact(&ds, &beta, args.globals.tol.unwrap_or(DEFAULT_ZERO_TOL))?,
        },
        FamilyArg::Prd => prd(&ds, &beta, &args.globals.plan(), &args.flags.tspec())?,
    };
    eprintln!("elapsed_ms: {}", t0.elapsed().as_millis());

    let cfg = config_hash(&[
        ("command", "depth".to_string()),
        ("input", args.input.display().to_string()),
        ("response", args.response.clone()),
        ("intercept", (!args.no_intercept).to_string()),
        ("family", args.family.label().to_string()),
        ("method", method.clone()),
        ("beta", fmt_f64_array(&args.beta.0)),
        ("tau", fmt_f64(args.flags.tau)),
        ("huber_k", fmt_f64(args.flags.huber_k)),
        ("agg_tau", fmt_f64(args.flags.agg_tau)),
        ("directions", args.globals.directions.unwrap_or(256).to_string()),
        (
            "competitors",
            args.globals.competitors.map(|n| n.to_string()).unwrap_or_default(),
        ),
        (
            "tol",
            fmt_f64(args.globals.tol.unwrap_or(DEFAULT_ZERO_TOL)),
        ),
        ("seed", seed.to_string()),
    ]);

    let mut out = String::new();
    out.push('{');
    out.push_str(&format!("\"tool_version\":{}", json_str(TOOL_VERSION)));
    out.push_str(",\"command\":\"depth\"");
    out.push_str(&format!(",\"depth_family\":{}", json_str(args.family.label())));
    out.push_str(&format!(",\"method\":{}", json_str(&method)));
    out.push_str(&format!(",\"input\":{}", json_str(&args.input.display().to_string())));
    out.push_str(&format!(",\"n\":{}", ds.n()));
    out.push_str(&format!(",\"p\":{}", ds.p()));
    out.push_str(&format!(",\"beta\":{}", fmt_f64_array(&args.beta.0)));
    out.push_str(&format!(",\"value\":{}", fmt_f64(value.value())));
    if let Some(c) = counts_json(&value) {
        out.push_str(&format!(",\"counts\":{c}"));
    }
    out.push_str(&format!(",\"seed\":{seed}"));
    out.push_str(&format!(",\"config_hash\":{}", json_str(&cfg)));
    out.push('}');
    println!("{out}");
    Ok(())
}

fn cmd_fit(args: FitArgs) -> Result<(), CliError> {
    let ds = read_dataset(&args.input, &args.response, args.no_intercept)?;
    let seed = args.globals.seed();
    let opts = FitOptions { seed, ..FitOptions::default() };
    let tspec = match args.transform {
        TArg::Median => TSpec::Median,
        TArg::Mean => TSpec::Mean,
        TArg::Quantile => TSpec::Quantile(args.tau),
    };

    let t0 = Instant::now();
    let fit: FitResult = match args.method {
        FitMethod::Ls => fit_ls(&ds)?,
        FitMethod::Lad => fit_obj(&ds, &ObjSpec::new(Loss::Abs, Aggregator::Mean)?, &opts)?,
        FitMethod::Quantile => {
            fit_obj(&ds, &ObjSpec::new(Loss::Check(args.tau), Aggregator::Mean)?, &opts)?
        }
        FitMethod::Lms => fit_obj(
            &ds,
            &ObjSpec::new(Loss::Square, Aggregator::Quantile(args.agg_tau))?,
            &opts,
        )?,
        FitMethod::DeepestRd => fit_deepest_rd(&ds, &args.globals.plan(), &opts)?,
        FitMethod::Prd => fit_prd_minimax(&ds, &args.globals.plan(), &tspec, &opts)?,
    };
    eprintln!("elapsed_ms: {}", t0.elapsed().as_millis());

    let coef: Vec<f64> = fit.coef.beta().iter().copied().collect();
    let transform = match args.transform {
        TArg::Median => "median",
        TArg::Mean => "mean",
        TArg::Quantile => "quantile",
    };
    let cfg = config_hash(&[
        ("command", "fit".to_string()),
        ("input", args.input.display().to_string()),
        ("response", args.response.clone()),
        ("intercept", (!args.no_intercept).to_string()),
        ("method", args.method.label().to_string()),
        ("transform", transform.to_string()),
        ("tau", fmt_f64(args.tau)),
        ("agg_tau", fmt_f64(args.agg_tau)),
        ("directions", args.globals.directions.unwrap_or(256).to_string()),
        ("seed", seed.to_string()),
    ]);

    let mut out = String::new();
    out.push('{');
    out.push_str(&format!("\"tool_version\":{}", json_str(TOOL_VERSION)));
    out.push_str(",\"command\":\"fit\"");
    out.push_str(&format!(",\"method\":{}", json_str(args.method.label())));
    out.push_str(&format!(",\"solver\":{}", json_str(&fit.method)));
    out.push_str(&format!(",\"input\":{}", json_str(&args.input.display().to_string())));
    out.push_str(&format!(",\"n\":{}", ds.n()));
    out.push_str(&format!(",\"p\":{}", ds.p()));
    out.push_str(&format!(",\"coef\":{}", fmt_f64_array(&coef)));
    out.push_str(&format!(",\"achieved\":{}", fmt_f64(fit.achieved)));
    if matches!(args.method, FitMethod::Prd) {
        out.push_str(&format!(",\"prd\":{}", fmt_f64(1.0 / (1.0 + fit.achieved))));
    }
    out.push_str(&format!(",\"candidates_evaluated\":{}", fit.candidates_evaluated));
    out.push_str(&format!(",\"seed\":{seed}"));
    out.push_str(&format!(",\"config_hash\":{}", json_str(&cfg)));
    out.push('}');
    println!("{out}");
    Ok(())
}

/// Per-axis grid bounds: 3x the elemental-candidate coefficient range
/// around its center, or the explicit flags when given.
fn contour_bounds(
    ds: &Dataset,
    args: &ContourArgs,
    seed: u64,
) -> Result<((f64, f64), (f64, f64)), CliError> {
    let explicit = [args.b1_min, args.b1_max, args.b2_min, args.b2_max];
    if explicit.iter().all(Option::is_some) {
        return Ok((
            (args.b1_min.unwrap(), args.b1_max.unwrap()),
            (args.b2_min.unwrap(), args.b2_max.unwrap()),
        ));
    }
    let candidates = elemental_candidates(ds, 2000, seed);
    if candidates.is_empty() {
        return Err(precondition(
            "no elemental candidates: cannot derive default grid bounds",
        ));
    }
    let axis = |j: usize| -> (f64, f64) {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for c in &candidates {
            lo = lo.min(c.beta()[j]);
            hi = hi.max(c.beta()[j]);
        }
        let center = 0.5 * (lo + hi);
        let half = (0.5 * (hi - lo)).max(1e-9) * 3.0;
        (center - half, center + half)
    };
    let (b1, b2) = (axis(0), axis(1));
    Ok((
        (args.b1_min.unwrap_or(b1.0), args.b1_max.unwrap_or(b1.1)),
        (args.b2_min.unwrap_or(b2.0), args.b2_max.unwrap_or(b2.1)),
    ))
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..steps)
        .map(|i| lo + (hi - lo) * (i as f64) / ((steps - 1) as f64))
        .collect()
}

fn cmd_contour(args: ContourArgs) -> Result<(), CliError> {
    let ds = read_dataset(&args.input, &args.response, args.no_intercept)?;
    if ds.p() != 2 {
        return Err(precondition(format!(
            "contour requires p = 2 coefficients, dataset has p = {}",
            ds.p()
        )));
    }
    if args.steps == 0 {
        return Err(precondition("contour requires at least one grid step"));
    }
    let seed = args.globals.seed();
    let (b1, b2) = contour_bounds(&ds, &args, seed)?;
    if b1.0 >= b1.1 || b2.0 >= b2.1 {
        return Err(precondition(format!(
            "grid bounds must satisfy min < max, got [{}, {}] x [{}, {}]",
            b1.0, b1.1, b2.0, b2.1
        )));
    }
    let spec = args.flags.obj_spec()?;
    let tspec = args.flags.tspec();
    let plan = args.globals.plan();
    let tol = args.globals.tol.unwrap_or(DEFAULT_ZERO_TOL);

    let t0 = Instant::now();
    let b1s = linspace(b1.0, b1.1, args.steps);
    let b2s = linspace(b2.0, b2.1, args.steps);
    let mut grid = String::from("beta1,beta2,depth\n");
    for &x1 in &b1s {
        for &x2 in &b2s {
            let beta = Coef::from_slice(&[x1, x2])?;
            let v = match args.family {
                FamilyArg::Obj => obj_depth(&ds, &beta, &spec)?,
                FamilyArg::Rd => rd_exact_simple(&ds, &beta)?,
                FamilyArg::Dc => dc_exact(&ds, &beta, tol)?,
                FamilyArg::Prd => prd(&ds, &beta, &plan, &tspec)?,
            };
            grid.push_str(&format!(
                "{},{},{}\n",
                fmt_f64(x1),
                fmt_f64(x2),
                fmt_f64(v.value())
            ));
        }
    }
    eprintln!("elapsed_ms: {}", t0.elapsed().as_millis());

    std::fs::write(&args.output, grid)
        .map_err(|e| io_error(format!("{}: {e}", args.output.display())))?;

    let method = args.flags.method_label(args.family, false);
    let cfg = config_hash(&[
        ("command", "contour".to_string()),
        ("input", args.input.display().to_string()),
        ("response", args.response.clone()),
        ("intercept", (!args.no_intercept).to_string()),
        ("family", args.family.label().to_string()),
        ("method", method.clone()),
        ("steps", args.steps.to_string()),
        ("b1_min", fmt_f64(b1.0)),
        ("b1_max", fmt_f64(b1.1)),
        ("b2_min", fmt_f64(b2.0)),
        ("b2_max", fmt_f64(b2.1)),
        ("directions", args.globals.directions.unwrap_or(256).to_string()),
        ("tol", fmt_f64(tol)),
        ("seed", seed.to_string()),
    ]);

    let mut out = String::new();
    out.push('{');
    out.push_str(&format!("\"tool_version\":{}", json_str(TOOL_VERSION)));
    out.push_str(",\"command\":\"contour\"");
    out.push_str(&format!(",\"depth_family\":{}", json_str(args.family.label())));
    out.push_str(&format!(",\"method\":{}", json_str(&method)));
    out.push_str(&format!(",\"input\":{}", json_str(&args.input.display().to_string())));
    out.push_str(&format!(",\"steps\":{}", args.steps));
    out.push_str(&format!(",\"b1_min\":{}", fmt_f64(b1.0)));
    out.push_str(&format!(",\"b1_max\":{}", fmt_f64(b1.1)));
    out.push_str(&format!(",\"b2_min\":{}", fmt_f64(b2.0)));
    out.push_str(&format!(",\"b2_max\":{}", fmt_f64(b2.1)));
    out.push_str(&format!(",\"cells\":{}", args.steps * args.steps));
    out.push_str(&format!(",\"output\":{}", json_str(&args.output.display().to_string())));
    out.push_str(&format!(",\"seed\":{seed}"));
    out.push_str(&format!(",\"config_hash\":{}", json_str(&cfg)));
    out.push('}');
    println!("{out}");
    Ok(())
}

fn suite_json(outcome: &SuiteOutcome) -> String {
    let mut reports = String::from("[");
    for (i, r) in outcome.reports.iter().enumerate() {
        if i > 0 {
            reports.push(',');
        }
        reports.push('{');
        reports.push_str(&format!("\"axiom\":{}", json_str(&r.axiom)));
        reports.push_str(&format!(",\"n_trials\":{}", r.n_trials));
        reports.push_str(&format!(",\"n_violations\":{}", r.n_violations));
        reports.push_str(&format!(",\"worst_violation\":{}", fmt_f64(r.worst_violation)));
        match &r.witness {
            Some(w) => reports.push_str(&format!(",\"witness\":{}", json_str(w))),
            None => reports.push_str(",\"witness\":null"),
        }
        reports.push_str(&format!(",\"expects_violation\":{}", r.expects_violation));
        reports.push_str(&format!(",\"passed\":{}", r.passed()));
        reports.push('}');
    }
    reports.push(']');
    reports
}

fn cmd_axioms(args: AxiomsArgs) -> Result<(), CliError> {
    let seed = args.globals.seed();
    let suite = args.suite.suite();
    let trials = match suite {
        Suite::All => args.trials.unwrap_or(0),
        s => args.trials.unwrap_or_else(|| default_trials(s)),
    };

    let t0 = Instant::now();
    let outcome = run_suite(args.family.family(), suite, trials, seed);
    eprintln!("elapsed_ms: {}", t0.elapsed().as_millis());

    let suite_label = match args.suite {
        SuiteArg::P1 => "p1",
        SuiteArg::P2 => "p2",
        SuiteArg::P3 => "p3",
        SuiteArg::P4 => "p4",
        SuiteArg::Qc => "qc",
        SuiteArg::All => "all",
    };
    let cfg = config_hash(&[
        ("command", "axioms".to_string()),
        ("family", args.family.label().to_string()),
        ("suite", suite_label.to_string()),
        ("trials", trials.to_string()),
        ("seed", seed.to_string()),
    ]);

    let mut out = String::new();
    out.push('{');
    out.push_str(&format!("\"tool_version\":{}", json_str(TOOL_VERSION)));
    out.push_str(",\"command\":\"axioms\"");
    out.push_str(&format!(",\"depth_family\":{}", json_str(args.family.label())));
    out.push_str(&format!(",\"suite\":{}", json_str(suite_label)));
    out.push_str(&format!(",\"trials\":{trials}"));
    out.push_str(&format!(",\"reports\":{}", suite_json(&outcome)));
    out.push_str(&format!(",\"passed\":{}", outcome.passed));
    out.push_str(&format!(",\"seed\":{seed}"));
    out.push_str(&format!(",\"config_hash\":{}", json_str(&cfg)));
    out.push('}');

    match &args.json {
        Some(path) => {
            std::fs::write(path, format!("{out}\n"))
                .map_err(|e| io_error(format!("{}: {e}", path.display())))?;
        }
        None => println!("{out}"),
    }
    if outcome.passed {
        Ok(())
    } else {
        Err(CliError { code: 1, msg: "one or more axiom reports failed".to_string() })
    }
}

fn cmd_location(args: LocationArgs) -> Result<(), CliError> {
    let points = read_points_csv(&args.input)?;
    let x = nalgebra_vec(&args.point.0);
    let seed = args.globals.seed();
    let competitors = args.globals.competitors.unwrap_or(1000);

    let t0 = Instant::now();
    let hd = hd_location(&points, &x)?;
    let nd = nd_location_sampled(&points, &x, competitors, seed)?;
    eprintln!("elapsed_ms: {}", t0.elapsed().as_millis());

    let cfg = config_hash(&[
        ("command", "location-hd".to_string()),
        ("input", args.input.display().to_string()),
        ("point", fmt_f64_array(&args.point.0)),
        ("competitors", competitors.to_string()),
        ("seed", seed.to_string()),
    ]);

    let mut out = String::new();
    out.push('{');
    out.push_str(&format!("\"tool_version\":{}", json_str(TOOL_VERSION)));
    out.push_str(",\"command\":\"location-hd\"");
    out.push_str(&format!(",\"input\":{}", json_str(&args.input.display().to_string())));
    out.push_str(&format!(",\"n\":{}", points.len()));
    out.push_str(&format!(",\"dim\":{}", points[0].len()));
    out.push_str(&format!(",\"point\":{}", fmt_f64_array(&args.point.0)));
    out.push_str(&format!(",\"hd\":{}", fmt_f64(hd.value())));
    if let Some(c) = counts_json(&hd) {
        out.push_str(&format!(",\"hd_counts\":{c}"));
    }
    out.push_str(&format!(",\"nd\":{}", fmt_f64(nd.value())));
    if let Some(c) = counts_json(&nd) {
        out.push_str(&format!(",\"nd_counts\":{c}"));
    }
    out.push_str(&format!(",\"competitors\":{competitors}"));
    out.push_str(&format!(",\"seed\":{seed}"));
    out.push_str(&format!(",\"config_hash\":{}", json_str(&cfg)));
    out.push('}');
    println!("{out}");
    Ok(())
}

fn nalgebra_vec(xs: &[f64]) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_column_slice(xs)
}
