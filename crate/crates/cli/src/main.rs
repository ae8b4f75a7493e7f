use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cmverify::decimal::{format_float, Decimal};
use cmverify::engine::{check_cm, check_log_cm, convergence_study, search_negative, GridSpec, Spacing, Strategy, Verdict};
use cmverify::functions::{Family, FunctionId};
use cmverify::report::{Convergence, Format, Payload, ReportEnvelope, RunConfig, SCHEMA};
use cmverify::suite::{quick_grid, run_suite, summary_table, write_suite, Scale};
use cmverify::{Error, PrecisionConfig};

const PRECISION_ENV: &str = "CM_VERIFY_PRECISION";

const EXIT_OK: u8 = 0;
const EXIT_VIOLATIONS: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

/// High-precision evaluation and complete-monotonicity checks for
/// polygamma-based functions.
#[derive(Parser, Debug)]
#[command(name = "cm-verify", version, about)]
struct Cli {
    /// Working precision in decimal digits (30..=300). Overrides CM_VERIFY_PRECISION.
    #[arg(long, global = true)]
    digits: Option<u32>,

    /// Print the JSON and CSV output formats and exit.
    #[arg(long)]
    schema: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a function at one point.
    Eval {
        #[command(flatten)]
        fid: FidArgs,
        /// Argument, as a decimal.
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Sign-check the derivatives of a function on a grid.
    CheckCm {
        #[command(flatten)]
        fid: FidArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the full verification suite and write one report per check.
    VerifyPaper {
        /// Coarse grid and low orders.
        #[arg(long)]
        quick: bool,
        /// Output directory.
        #[arg(long, short, default_value = "verify-paper")]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        #[arg(long, default_value_t = 8)]
        nmax: u32,
    },
    /// Distance of f_m(z/m)/m! from s(z) for a list of m.
    Converge {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Comma-separated, strictly increasing.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        m: Vec<u32>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Search H or a g_m kernel for sign-certain negative values.
    Search {
        /// H or g-m.
        #[arg(long = "fn")]
        function: String,
        /// Order for g-m.
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Interval as a:b.
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::CoarseToFine)]
        strategy: StrategyArg,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug)]
struct FidArgs {
    /// phi, phi-scaled, phi-q, phi-q-inv, f-alpha, f-m, g-m, theta-m, theta1, g-n, k1, k2, k3, H or s.
    family: String,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    n: Option<u32>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, default_value_t = 8)]
    nmax: u32,
    #[arg(long, default_value = "0.01")]
    x_min: String,
    #[arg(long, default_value = "1000")]
    x_max: String,
    /// Number of grid points.
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(long, value_enum, default_value_t = SpacingArg::Log)]
    spacing: SpacingArg,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Report file; defaults to <subcommand>.<format> in the current directory.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SpacingArg {
    Log,
    Linear,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum StrategyArg {
    Grid,
    CoarseToFine,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

/// A failure together with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Config(_) => EXIT_PARSE,
            Error::Domain(_) => EXIT_DOMAIN,
            Error::Precision(_) | Error::Quadrature(_) | Error::Extrapolation(_) => EXIT_INCONCLUSIVE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn parse_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_PARSE,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<u8> {
    if cli.schema {
        print!("{SCHEMA}");
        return Ok(EXIT_OK);
    }
    let Some(command) = cli.command else {
        return Err(parse_failure("no subcommand given; see --help"));
    };
    let cfg = precision(cli.digits)?;
    match command {
        Command::Eval { fid, x } => eval(&fid, &x, &cfg),
        Command::CheckCm { fid, run } => check(&fid, &run, &cfg),
        Command::VerifyPaper {
            quick,
            output,
            format,
            nmax,
        } => verify_paper(quick, &output, format.into(), nmax, &cfg),
        Command::Converge { z, m, out } => converge(&z, &m, &out, &cfg),
        Command::Search {
            function,
            m,
            range,
            points,
            strategy,
            out,
        } => search(&function, m, &range, points, strategy, &out, &cfg),
    }
}

fn precision(flag: Option<u32>) -> CliResult<PrecisionConfig> {
    let digits = match flag {
        Some(d) => d,
        None => match std::env::var(PRECISION_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| parse_failure(format!("{PRECISION_ENV} must be an integer, got {v:?}")))?,
            Err(_) => cmverify::precision::DEFAULT_DIGITS,
        },
    };
    PrecisionConfig::with_digits(digits).map_err(|e| parse_failure(e.to_string()))
}

fn function_id(a: &FidArgs) -> CliResult<FunctionId> {
    let (family, alias) = match a.family.as_str() {
        "phi" => (Family::PhiScaled, true),
        name => (
            Family::from_name(name).ok_or_else(|| parse_failure(format!("unknown function family {name:?}")))?,
            false,
        ),
    };
    let dec = |s: &Option<String>, what: &str| -> CliResult<Option<Decimal>> {
        s.as_deref()
            .map(|v| v.parse::<Decimal>().map_err(|_| parse_failure(format!("--{what} is not a decimal: {v:?}"))))
            .transpose()
    };
    let alpha = dec(&a.alpha, "alpha")?;
    let q = dec(&a.q, "q")?;
    if alias && (a.m.unwrap_or(0) != 0 || alpha.as_ref().is_some_and(|d| d.to_f64() != 0.0)) {
        return Err(parse_failure("phi takes no --m or --alpha; use phi-scaled"));
    }
    let m = a.m.unwrap_or(match family {
        Family::Gm | Family::ThetaM => 1,
        _ => 0,
    });
    let n = a.n.unwrap_or(if family == Family::GnAux { 1 } else { 0 });
    Ok(FunctionId::new(family, m, alpha, q, n)?)
}

fn out_path(out: &OutArgs, stem: &str) -> PathBuf {
    let format: Format = out.format.into();
    out.output.clone().unwrap_or_else(|| PathBuf::from(format!("{stem}.{}", format.extension())))
}

fn run_config(cfg: &PrecisionConfig, grid: GridSpec, n_max: u32, path: &Path, format: Format) -> RunConfig {
    RunConfig {
        precision: *cfg,
        grid,
        n_max,
        output_path: path.to_path_buf(),
        format,
    }
}

fn eval(a: &FidArgs, x: &str, cfg: &PrecisionConfig) -> CliResult<u8> {
    let fid = function_id(a)?;
    let xv = cfg.parse(x).map_err(|_| parse_failure(format!("argument is not a decimal: {x:?}")))?;
    let (value, _tail) = fid.eval_with_bound(&xv, cfg)?;
    println!("{}", format_float(&value, cfg.digits));
    Ok(EXIT_OK)
}

fn check(a: &FidArgs, r: &RunArgs, cfg: &PrecisionConfig) -> CliResult<u8> {
    let fid = function_id(a)?;
    let spacing = match r.spacing {
        SpacingArg::Log => Spacing::Logarithmic,
        SpacingArg::Linear => Spacing::Linear,
    };
    let grid = GridSpec::new(&r.x_min, &r.x_max, r.points, spacing)?;
    // log-CM of f_alpha is the statement of interest; it implies CM
    let report = if fid.family == Family::FAlphaLog {
        check_log_cm(fid.alpha.as_ref().expect("f-alpha carries alpha"), &grid, r.nmax, cfg)?
    } else {
        check_cm(&fid, &grid, r.nmax, cfg)?
    };
    let path = out_path(&r.out, "check-cm");
    let format = r.out.format.into();
    println!("{:?} {} {}", report.verdict, report.label, report.min_margin);
    let code = match report.verdict {
        Verdict::AllNonnegative => EXIT_OK,
        Verdict::ViolationsFound => EXIT_VIOLATIONS,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    };
    ReportEnvelope::new(run_config(cfg, grid, r.nmax, &path, format), Payload::Cm(report)).write(&path, format)?;
    Ok(code)
}

fn verify_paper(quick: bool, dir: &Path, format: Format, n_max: u32, cfg: &PrecisionConfig) -> CliResult<u8> {
    let grid = if quick { quick_grid() } else { GridSpec::default() };
    let config = run_config(cfg, grid, n_max, dir, format);
    let items = run_suite(&config, Scale { quick });
    let rows = write_suite(dir, &config, &items)?;
    print!("{}", summary_table(&rows));
    Ok(if rows.iter().any(|r| r.is_failure()) { EXIT_VIOLATIONS } else { EXIT_OK })
}

fn converge(z: &str, ms: &[u32], out: &OutArgs, cfg: &PrecisionConfig) -> CliResult<u8> {
    let zv = cfg.parse(z).map_err(|_| parse_failure(format!("--z is not a decimal: {z:?}")))?;
    if ms.is_empty() {
        return Err(parse_failure("--m needs at least one order"));
    }
    let rows = convergence_study(&zv, ms, cfg)?;
    let payload = Payload::Convergence(Convergence {
        z: Decimal::from_float(&zv, cfg.digits),
        rows,
    });
    emit(payload, out, "converge", cfg)
}

fn search(
    function: &str,
    m: u32,
    range: &str,
    points: usize,
    strategy: StrategyArg,
    out: &OutArgs,
    cfg: &PrecisionConfig,
) -> CliResult<u8> {
    let fid = match function {
        "H" => FunctionId::simple(Family::HLH)?,
        "g-m" => FunctionId::with_m(Family::Gm, m)?,
        other => return Err(parse_failure(format!("--fn must be H or g-m, got {other:?}"))),
    };
    let (a, b) = range
        .split_once(':')
        .ok_or_else(|| parse_failure(format!("--range must look like a:b, got {range:?}")))?;
    let parse = |s: &str| cfg.parse(s).map_err(|_| parse_failure(format!("range bound is not a decimal: {s:?}")));
    let (lo, hi) = (parse(a)?, parse(b)?);
    let strategy = match strategy {
        StrategyArg::Grid => Strategy::Grid,
        StrategyArg::CoarseToFine => Strategy::CoarseToFine,
    };
    let result = search_negative(&fid, &lo, &hi, points, strategy, cfg)?;
    emit(Payload::Search(result), out, "search", cfg)
}

/// Prints the CSV rows and writes the envelope.
fn emit(payload: Payload, out: &OutArgs, stem: &str, cfg: &PrecisionConfig) -> CliResult<u8> {
    let path = out_path(out, stem);
    let format = out.format.into();
    let env = ReportEnvelope::new(run_config(cfg, GridSpec::default(), 0, &path, format), payload);
    print!("{}", env.to_csv()?);
    env.write(&path, format)?;
    Ok(EXIT_OK)
}
