//! Command implementations behind the `bnf` binary.
//!
//! Every command writes its document to `--out` when given, otherwise to
//! stdout. Exit codes: 0 success, 1 verification failure, 2 usage error.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use bnf_core::counterexample::{example_dataset, linear_target_variant, run_verification, EXAMPLE_RAY, EXAMPLE_W0};
use bnf_core::falsifier::{search_fixed, VIOLATION_SLACK};
use bnf_core::objective::gradient_agreement;
use bnf_core::{
    bn_cost, run_full_verification, search, standard_cost, BNParams, CounterexampleReport, Dataset, InstanceSpec,
    SearchConfig, SearchSummary, TargetModel, Verdict,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

/// Largest analytic-vs-finite-difference relative error `gradcheck` accepts.
pub const GRADCHECK_TOL: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(name = "bnf", version, about = "Batch normalization initialization counterexample and falsification search")]
pub struct Cli {
    /// Write the output document here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Output format; csv is only valid for `landscape`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Random seed (falls back to BNF_SEED, then 0).
    #[arg(long, global = true, env = "BNF_SEED", default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify the three-sample counterexample and emit the report.
    Reproduce(ReproduceArgs),
    /// Compare the analytic BN gradient with central finite differences.
    Gradcheck(GradcheckArgs),
    /// Evaluate both costs of the worked example on a (w1, w2) grid.
    Landscape(LandscapeArgs),
    /// Randomized search for instances violating the initialization inequality.
    Search(SearchArgs),
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Replace the targets by exact linear targets <(1,3), x> (exercises the
    /// failure path).
    #[arg(long, hide = true)]
    pub linear_targets: bool,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub w1_min: f64,
    #[arg(long, default_value_t = 6.0, allow_hyphen_values = true)]
    pub w1_max: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub w2_min: f64,
    #[arg(long, default_value_t = 6.0, allow_hyphen_values = true)]
    pub w2_max: f64,
    /// Grid points per axis.
    #[arg(long, default_value_t = 81)]
    pub resolution: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Quadratic,
    LinearNoise,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Input dimension.
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    /// Samples per instance.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub input_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub input_max: f64,
    #[arg(long, value_enum, default_value_t = TargetArg::Quadratic)]
    pub targets: TargetArg,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub step_size: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub grad_tol: f64,
    /// Run on the worked example with W0 = (1, 3) instead of random instances.
    #[arg(long)]
    pub example1: bool,
    /// Worker threads; the output does not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult = Result<(), CliError>;

pub fn run(cli: &Cli) -> CliResult {
    let format = cli.format.unwrap_or(match cli.command {
        Command::Landscape(_) => Format::Csv,
        _ => Format::Json,
    });
    if format == Format::Csv && !matches!(cli.command, Command::Landscape(_)) {
        return Err(CliError::Usage("--format csv is only valid for landscape".into()));
    }
    match &cli.command {
        Command::Reproduce(args) => cmd_reproduce(cli, args),
        Command::Gradcheck(args) => cmd_gradcheck(cli, args),
        Command::Landscape(args) => cmd_landscape(cli, args, format),
        Command::Search(args) => cmd_search(cli, args),
    }
}

fn open_output(cli: &Cli) -> io::Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(path) => Box::new(io::BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(cli: &Cli, value: &T) -> CliResult {
    let mut out = open_output(cli)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn reproduce_report(args: &ReproduceArgs) -> CounterexampleReport {
    if args.linear_targets {
        run_verification(&linear_target_variant(), &EXAMPLE_W0, &EXAMPLE_RAY)
    } else {
        run_full_verification()
    }
}

pub fn cmd_reproduce(cli: &Cli, args: &ReproduceArgs) -> CliResult {
    let report = reproduce_report(args);
    write_json(cli, &report)?;
    match report.verdict {
        Verdict::LemmaViolated => Ok(()),
        Verdict::LemmaNotViolated => Err(CliError::Verification(format!(
            "stage {} failed: {}",
            report.failing_stage.map(|s| s.to_string()).unwrap_or_else(|| "unknown".into()),
            report.failure_detail.as_deref().unwrap_or("")
        ))),
    }
}

#[derive(Debug, Serialize)]
struct GradcheckOutput {
    trials: usize,
    seed: u64,
    max_rel_err: f64,
    tolerance: f64,
    pass: bool,
}

pub fn cmd_gradcheck(cli: &Cli, args: &GradcheckArgs) -> CliResult {
    if args.trials < 1 {
        return Err(CliError::Usage("--trials must be >= 1".into()));
    }
    let result = gradient_agreement(&example_dataset(), &BNParams::unit(1), args.trials, cli.seed)
        .map_err(|e| CliError::Verification(e.to_string()))?;
    let pass = result.max_rel_err <= GRADCHECK_TOL;
    write_json(
        cli,
        &GradcheckOutput {
            trials: result.trials,
            seed: cli.seed,
            max_rel_err: result.max_rel_err,
            tolerance: GRADCHECK_TOL,
            pass,
        },
    )?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "max relative error {:e} exceeds {GRADCHECK_TOL:e}",
            result.max_rel_err
        )))
    }
}

/// One landscape grid point; `cost_bn` is `None` where the batch is
/// degenerate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandscapeRow {
    pub w1: f64,
    pub w2: f64,
    pub cost_standard: f64,
    pub cost_bn: Option<f64>,
}

fn axis(min: f64, max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![min];
    }
    (0..n).map(|i| min + (max - min) * i as f64 / (n - 1) as f64).collect()
}

/// Grid over `[w1_min, w1_max] × [w2_min, w2_max]` in row-major order
/// (`w1` outer, `w2` inner).
pub fn landscape_rows(args: &LandscapeArgs, data: &Dataset) -> Result<Vec<LandscapeRow>, CliError> {
    let bounds = [args.w1_min, args.w1_max, args.w2_min, args.w2_max];
    if !bounds.iter().all(|b| b.is_finite()) {
        return Err(CliError::Usage("grid bounds must be finite".into()));
    }
    if args.w1_min > args.w1_max || args.w2_min > args.w2_max {
        return Err(CliError::Usage("grid ranges need min <= max".into()));
    }
    if args.resolution < 1 {
        return Err(CliError::Usage("--resolution must be >= 1".into()));
    }
    if args.resolution == 1 && (args.w1_min != args.w1_max || args.w2_min != args.w2_max) {
        return Err(CliError::Usage("--resolution 1 needs degenerate ranges".into()));
    }
    let params = BNParams::unit(1);
    let mut rows = Vec::with_capacity(args.resolution * args.resolution);
    for w1 in axis(args.w1_min, args.w1_max, args.resolution) {
        for w2 in axis(args.w2_min, args.w2_max, args.resolution) {
            let w = [w1, w2];
            rows.push(LandscapeRow {
                w1,
                w2,
                cost_standard: standard_cost(&w, data).expect("two-dimensional weights"),
                cost_bn: bn_cost(&w, data, &params).ok(),
            });
        }
    }
    Ok(rows)
}

pub const LANDSCAPE_HEADER: [&str; 4] = ["w1", "w2", "cost_standard", "cost_bn"];

pub fn cmd_landscape(cli: &Cli, args: &LandscapeArgs, format: Format) -> CliResult {
    let rows = landscape_rows(args, &example_dataset())?;
    match format {
        Format::Json => write_json(cli, &rows),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(open_output(cli)?);
            w.write_record(LANDSCAPE_HEADER)?;
            for r in &rows {
                w.write_record([
                    r.w1.to_string(),
                    r.w2.to_string(),
                    r.cost_standard.to_string(),
                    r.cost_bn.map(|c| c.to_string()).unwrap_or_default(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

/// Document written by `search`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutput {
    pub config: SearchConfig,
    /// Generator template; `null` for `--example1`.
    pub instance_template: Option<InstanceSpec>,
    pub violation_slack: f64,
    #[serde(flatten)]
    pub summary: SearchSummary,
}

pub fn search_output(seed: u64, args: &SearchArgs) -> Result<SearchOutput, CliError> {
    let config = SearchConfig {
        trials: args.trials,
        restarts_per_instance: args.restarts,
        step_size: args.step_size,
        max_iters: args.max_iters,
        grad_tol: args.grad_tol,
        master_seed: seed,
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let template = InstanceSpec {
        p: args.p,
        n: args.n,
        input_range: (args.input_min, args.input_max),
        target_model: match args.targets {
            TargetArg::Quadratic => TargetModel::QuadraticOfInputs,
            TargetArg::LinearNoise => TargetModel::LinearPlusNoise,
        },
        noise_scale: args.noise,
        seed: 0,
    };
    if !args.example1 {
        template.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    if args.threads == Some(0) {
        return Err(CliError::Usage("--threads must be >= 1".into()));
    }

    let run = || {
        if args.example1 {
            search_fixed(&config, &example_dataset(), &EXAMPLE_W0)
        } else {
            search(&config, &template)
        }
    };
    let summary = match args.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Io(io::Error::other(e)))?
            .install(run),
        None => run(),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;

    Ok(SearchOutput {
        config,
        instance_template: (!args.example1).then_some(template),
        violation_slack: VIOLATION_SLACK,
        summary,
    })
}

pub fn cmd_search(cli: &Cli, args: &SearchArgs) -> CliResult {
    let output = search_output(cli.seed, args)?;
    write_json(cli, &output)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("bnf").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn csv_is_rejected_outside_landscape() {
        let cli = parse(&["reproduce", "--format", "csv"]);
        assert!(matches!(run(&cli), Err(CliError::Usage(_))));
    }

    #[test]
    fn landscape_grid_shape() {
        let cli = parse(&["landscape", "--w1-min", "1", "--w1-max", "2", "--w2-min", "2", "--w2-max", "4", "--resolution", "3"]);
        let Command::Landscape(args) = &cli.command else { unreachable!() };
        let rows = landscape_rows(args, &example_dataset()).unwrap();
        assert_eq!(rows.len(), 9);
        assert_eq!((rows[0].w1, rows[0].w2), (1.0, 2.0));
        assert_eq!((rows[1].w1, rows[1].w2), (1.0, 3.0));
        assert_eq!(rows[1].cost_standard, 12.0);
        assert_eq!((rows[8].w1, rows[8].w2), (2.0, 4.0));
    }

    #[test]
    fn landscape_marks_degenerate_points() {
        let cli = parse(&["landscape", "--w1-min", "-1", "--w1-max", "1", "--w2-min", "-1", "--w2-max", "1", "--resolution", "3"]);
        let Command::Landscape(args) = &cli.command else { unreachable!() };
        let rows = landscape_rows(args, &example_dataset()).unwrap();
        let origin = rows.iter().find(|r| r.w1 == 0.0 && r.w2 == 0.0).unwrap();
        assert_eq!(origin.cost_bn, None);
        assert_eq!(origin.cost_standard, 198.0);
        assert_eq!(rows.iter().filter(|r| r.cost_bn.is_none()).count(), 1);
    }

    #[test]
    fn landscape_rejects_bad_ranges() {
        for argv in [
            vec!["landscape", "--w1-min", "3", "--w1-max", "1"],
            vec!["landscape", "--resolution", "0"],
            vec!["landscape", "--w2-min", "inf"],
            vec!["landscape", "--resolution", "1"],
        ] {
            let cli = parse(&argv);
            let Command::Landscape(args) = &cli.command else { unreachable!() };
            assert!(matches!(landscape_rows(args, &example_dataset()), Err(CliError::Usage(_))), "{argv:?}");
        }
    }

    #[test]
    fn example1_search() {
        let cli = parse(&["search", "--trials", "1", "--example1"]);
        let Command::Search(args) = &cli.command else { unreachable!() };
        let out = search_output(cli.seed, args).unwrap();
        assert_eq!(out.summary.violated, 1);
        assert_eq!(out.instance_template, None);
        let v = &out.summary.violations[0];
        assert_eq!(v.w0.0, vec![1.0, 3.0]);
        assert!(v.rhs.abs() <= 1e-12);
    }

    #[test]
    fn search_usage_errors() {
        for argv in [vec!["search", "--trials", "0"], vec!["search", "--p", "3", "--n", "3"], vec!["search", "--threads", "0"]] {
            let cli = parse(&argv);
            let Command::Search(args) = &cli.command else { unreachable!() };
            assert!(matches!(search_output(cli.seed, args), Err(CliError::Usage(_))), "{argv:?}");
        }
    }

    #[test]
    fn failure_path_names_the_stage() {
        let report = reproduce_report(&ReproduceArgs { linear_targets: true });
        assert_eq!(report.verdict, Verdict::LemmaNotViolated);
        assert_eq!(report.failing_stage.map(|s| s.to_string()).as_deref(), Some("bn_noncritical"));
    }
}
