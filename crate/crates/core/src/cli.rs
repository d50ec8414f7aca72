//! Command-line surface.
//!
//! Subcommands: `validate`, `static`, `seqdp`, `simudp`, `greedy`, `sweep`,
//! `trace`, `graph-stats`. Exit codes: 0 success, 1 model or validation
//! error (a structured JSON record goes to stderr), 2 usage error. Flags
//! override values from an optional `--config` JSON file, whose keys are the
//! flag names with hyphens replaced by underscores; both override the
//! built-in defaults. Every run echoes the fully resolved configuration,
//! including the derived per-stream seeds, into its output metadata.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::experiments::{
    emit_csv, emit_json, format_sig12, Experiment, ExperimentConfig, GraphSourceConfig,
    Normalization, SweepParameter, STREAM_GRAPH, STREAM_PARAMS,
};
use crate::market_model::{
    build_matrices, demand_margins, validate_model, MarketParams, ModelMatrices,
};
use crate::numerics::DenseMatrix;
use crate::rng::{derive_seed, SplitMix64};
use crate::sequential_pricing::{
    infinite_horizon_revenue, infinite_horizon_welfare, limit_demand, run_sequential,
    DemandTrajectory, OrderPolicy, PriceConvention, VisitOrder,
};
use crate::simultaneous_pricing::{run_greedy, solve_simultaneous};
use crate::social_graph::{load_edge_list, SocialGraph};
use crate::static_pricing::solve_static;

#[derive(Parser, Debug)]
#[command(
    name = "socialmarket",
    version,
    about = "Pricing schemes for a data market with network and congestion effects",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the standing model conditions and report margins
    Validate(ModelArgs),
    /// Solve the one-shot optimal static prices
    Static(ModelArgs),
    /// Run the multi-period sequential pricing scheme
    Seqdp(SeqArgs),
    /// Solve the finite-horizon simultaneous pricing scheme
    Simudp(SimuArgs),
    /// Run the myopic one-period-lookahead scheme
    Greedy(GreedyArgs),
    /// Monte-Carlo sweep over a parameter grid
    Sweep(SweepArgs),
    /// Per-period cumulative revenue and utility trace
    Trace(TraceArgs),
    /// Tie-count summary of a graph
    GraphStats(GraphStatsArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Number of users
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability of the generated graph
    #[arg(long)]
    pe: Option<f64>,
    /// Mean of the linear coefficient draws
    #[arg(long = "mu-a")]
    mu_a: Option<f64>,
    /// Mean of the quadratic coefficient draws
    #[arg(long = "mu-b")]
    mu_b: Option<f64>,
    /// Mean of the tie weight draws
    #[arg(long = "mu-g")]
    mu_g: Option<f64>,
    /// Congestion coefficient
    #[arg(long)]
    c: Option<f64>,
    /// Base seed for all derived random streams
    #[arg(long)]
    seed: Option<u64>,
    /// Edge-list file to sample the graph from
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Explicit symmetric weight-matrix CSV (bypasses sampling)
    #[arg(long = "manual-graph")]
    manual_graph: Option<PathBuf>,
    /// Explicit per-user linear coefficients, comma-separated
    #[arg(long, value_name = "LIST")]
    a: Option<String>,
    /// Explicit per-user quadratic coefficients, comma-separated
    #[arg(long, value_name = "LIST")]
    b: Option<String>,
    /// Force all tie weights to zero
    #[arg(long = "zero-ties")]
    zero_ties: bool,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SeqArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of periods to run
    #[arg(long)]
    periods: Option<usize>,
    /// Visit-order policy
    #[arg(long, value_enum)]
    order: Option<OrderArg>,
    /// Price convention
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
}

#[derive(Args, Debug, Clone)]
struct SimuArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Selling horizon
    #[arg(long)]
    horizon: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct GreedyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of periods to run
    #[arg(long)]
    periods: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Swept parameter
    #[arg(long, value_enum)]
    param: Option<ParamArg>,
    /// Comma-separated grid values
    #[arg(long)]
    grid: Option<String>,
    /// Monte-Carlo runs per grid value
    #[arg(long)]
    runs: Option<u64>,
    /// Sequential periods per run
    #[arg(long)]
    periods: Option<usize>,
    /// Simultaneous horizon per run
    #[arg(long)]
    horizon: Option<usize>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args, Debug, Clone)]
struct TraceArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    periods: Option<usize>,
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args, Debug, Clone)]
struct GraphStatsArgs {
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum OrderArg {
    Fixed,
    Fair,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum ConventionArg {
    Anticipatory,
    Step4,
}

impl From<ConventionArg> for PriceConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Anticipatory => PriceConvention::Anticipatory,
            ConventionArg::Step4 => PriceConvention::Step4,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum ParamArg {
    Pe,
    C,
    N,
    #[value(name = "mu-g", alias = "mu_g")]
    MuG,
}

impl From<ParamArg> for SweepParameter {
    fn from(p: ParamArg) -> Self {
        match p {
            ParamArg::Pe => SweepParameter::EdgeProbability,
            ParamArg::C => SweepParameter::Congestion,
            ParamArg::N => SweepParameter::Users,
            ParamArg::MuG => SweepParameter::TieMean,
        }
    }
}

/// Values accepted in the `--config` JSON file. Keys are the flag names with
/// underscores; unknown keys are usage errors.
#[derive(Debug, Default, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<usize>,
    pe: Option<f64>,
    mu_a: Option<f64>,
    mu_b: Option<f64>,
    mu_g: Option<f64>,
    c: Option<f64>,
    seed: Option<u64>,
    graph: Option<PathBuf>,
    manual_graph: Option<PathBuf>,
    a: Option<String>,
    b: Option<String>,
    zero_ties: Option<bool>,
    periods: Option<usize>,
    horizon: Option<usize>,
    runs: Option<u64>,
    order: Option<String>,
    convention: Option<String>,
    param: Option<String>,
    grid: Option<String>,
    format: Option<String>,
    out: Option<PathBuf>,
}

/// Usage problems exit 2, model problems exit 1.
enum Failure {
    Usage(String),
    Model(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(message.into())
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 0 for --help/--version and 2 for usage errors.
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(message)) => {
            let record = json!({"error": {"category": "usage", "message": message}});
            eprintln!("{record}");
            2
        }
        Err(Failure::Model(error)) => {
            let record = json!({
                "error": {"category": error.category(), "message": error.to_string()}
            });
            eprintln!("{record}");
            1
        }
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Validate(args) => cmd_validate(args),
        Command::Static(args) => cmd_static(args),
        Command::Seqdp(args) => cmd_seqdp(args),
        Command::Simudp(args) => cmd_simudp(args),
        Command::Greedy(args) => cmd_greedy(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Trace(args) => cmd_trace(args),
        Command::GraphStats(args) => cmd_graph_stats(args),
    }
}

// ---------------------------------------------------------------------------
// Config resolution

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
struct Resolved {
    experiment: ExperimentConfig,
    manual_graph: Option<PathBuf>,
    a_values: Option<Vec<f64>>,
    b_values: Option<Vec<f64>>,
    order: OrderArg,
    format: FormatArg,
    out: Option<PathBuf>,
}

fn load_file_config(path: &Option<PathBuf>) -> CliResult<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| usage(format!("cannot read config file {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| usage(format!("invalid config file {}: {e}", p.display())))
        }
    }
}

fn parse_f64_list(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("invalid {what} entry '{tok}'")))
        })
        .collect()
}

fn resolve(
    model: &ModelArgs,
    periods: Option<usize>,
    horizon: Option<usize>,
    runs: Option<u64>,
    order: Option<OrderArg>,
    convention: Option<ConventionArg>,
    format: Option<FormatArg>,
) -> CliResult<Resolved> {
    let file = load_file_config(&model.config)?;
    let defaults = ExperimentConfig::default();

    let graph = model.graph.clone().or(file.graph);
    let manual_graph = model.manual_graph.clone().or(file.manual_graph);
    if graph.is_some() && manual_graph.is_some() {
        return Err(usage("--graph and --manual-graph are mutually exclusive"));
    }
    let graph_source = match graph {
        Some(path) => GraphSourceConfig::EdgeList { path },
        None => GraphSourceConfig::Er,
    };

    let file_order = match file.order.as_deref() {
        None => None,
        Some("fixed") => Some(OrderArg::Fixed),
        Some("fair") => Some(OrderArg::Fair),
        Some(other) => return Err(usage(format!("invalid order '{other}' in config file"))),
    };
    let file_convention = match file.convention.as_deref() {
        None => None,
        Some("anticipatory") => Some(ConventionArg::Anticipatory),
        Some("step4") => Some(ConventionArg::Step4),
        Some(other) => {
            return Err(usage(format!("invalid convention '{other}' in config file")))
        }
    };
    let file_format = match file.format.as_deref() {
        None => None,
        Some("csv") => Some(FormatArg::Csv),
        Some("json") => Some(FormatArg::Json),
        Some(other) => return Err(usage(format!("invalid format '{other}' in config file"))),
    };

    let a_values = match model.a.clone().or(file.a) {
        Some(text) => Some(parse_f64_list(&text, "--a")?),
        None => None,
    };
    let b_values = match model.b.clone().or(file.b) {
        Some(text) => Some(parse_f64_list(&text, "--b")?),
        None => None,
    };

    let experiment = ExperimentConfig {
        n: model.n.or(file.n).unwrap_or(defaults.n),
        p_e: model.pe.or(file.pe).unwrap_or(defaults.p_e),
        mu_a: model.mu_a.or(file.mu_a).unwrap_or(defaults.mu_a),
        mu_b: model.mu_b.or(file.mu_b).unwrap_or(defaults.mu_b),
        mu_g: model.mu_g.or(file.mu_g).unwrap_or(defaults.mu_g),
        c: model.c.or(file.c).unwrap_or(defaults.c),
        periods: periods.or(file.periods).unwrap_or(defaults.periods),
        horizon: horizon.or(file.horizon).unwrap_or(defaults.horizon),
        runs: runs.or(file.runs).unwrap_or(defaults.runs),
        base_seed: model.seed.or(file.seed).unwrap_or(defaults.base_seed),
        graph_source,
        convention: convention
            .or(file_convention)
            .map(PriceConvention::from)
            .unwrap_or(defaults.convention),
        normalization: Normalization::ByStatic,
        zero_ties: model.zero_ties || file.zero_ties.unwrap_or(false),
    };

    Ok(Resolved {
        experiment,
        manual_graph,
        a_values,
        b_values,
        order: order.or(file_order).unwrap_or(OrderArg::Fixed),
        format: format.or(file_format).unwrap_or(FormatArg::Json),
        out: model.out.clone().or(file.out),
    })
}

// ---------------------------------------------------------------------------
// Model construction

/// A concrete market instance plus the seeds that produced it.
struct Instance {
    matrices: ModelMatrices,
    graph: SocialGraph,
    graph_seed: Option<u64>,
    param_seed: Option<u64>,
}

fn load_manual_graph(path: &Path) -> CliResult<SocialGraph> {
    let text = std::fs::read_to_string(path).map_err(Error::Io)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = trimmed
            .split(|ch: char| ch == ',' || ch.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("'{tok}' is not a number"),
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Failure::Model(Error::InvalidConfig(format!(
            "manual graph {} holds no rows",
            path.display()
        ))));
    }
    let n = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Failure::Model(Error::DimensionMismatch(format!(
                "manual graph row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            ))));
        }
    }
    let ties = DenseMatrix::from_fn(n, n, |i, j| rows[i][j]);
    Ok(SocialGraph::from_weight_matrix(ties)?)
}

/// Builds the instance a single-model subcommand operates on: a manual
/// weight matrix taken literally, or the first sampled draw of the
/// configured streams (run 0, attempt 0, no rejection — `validate` must see
/// the raw model).
fn build_instance(resolved: &Resolved) -> CliResult<Instance> {
    let config = &resolved.experiment;
    if let Some(path) = &resolved.manual_graph {
        let graph = load_manual_graph(path)?;
        let n = graph.n();
        let params = explicit_or_sampled_params(resolved, n, None)?;
        let matrices = build_matrices(&params, &graph)?;
        return Ok(Instance {
            matrices,
            graph,
            graph_seed: None,
            param_seed: None,
        });
    }

    let experiment = Experiment::new(config.clone())?;
    let (graph, graph_seed) = experiment.graph_for(0, 0)?;
    let param_seed = derive_seed(config.base_seed, &[0, 0, STREAM_PARAMS]);
    let params = explicit_or_sampled_params(resolved, graph.n(), Some(param_seed))?;
    let matrices = build_matrices(&params, &graph)?;
    Ok(Instance {
        matrices,
        graph,
        graph_seed: Some(graph_seed),
        param_seed: Some(param_seed),
    })
}

/// `--a`/`--b` verbatim when given, otherwise unit-variance draws around the
/// configured means (from `param_seed`, matching the harness streams).
fn explicit_or_sampled_params(
    resolved: &Resolved,
    n: usize,
    param_seed: Option<u64>,
) -> CliResult<MarketParams> {
    let config = &resolved.experiment;
    if resolved.a_values.is_some() != resolved.b_values.is_some() {
        return Err(usage("--a and --b must be given together"));
    }
    let seed = param_seed.unwrap_or_else(|| derive_seed(config.base_seed, &[0, 0, STREAM_PARAMS]));
    let mut rng = SplitMix64::new(seed);
    let sampled_a: Vec<f64> = (0..n)
        .map(|_| rng.next_normal(config.mu_a, 1.0).max(0.01))
        .collect();
    let sampled_b: Vec<f64> = (0..n)
        .map(|_| rng.next_normal(config.mu_b, 1.0).max(0.01))
        .collect();
    let a = match &resolved.a_values {
        Some(list) => {
            if list.len() != n {
                return Err(usage(format!("--a must list exactly {n} values")));
            }
            list.clone()
        }
        None => sampled_a,
    };
    let b = match &resolved.b_values {
        Some(list) => {
            if list.len() != n {
                return Err(usage(format!("--b must list exactly {n} values")));
            }
            list.clone()
        }
        None => sampled_b,
    };
    Ok(MarketParams::new(a, b, config.c)?)
}

// ---------------------------------------------------------------------------
// Output helpers

fn config_echo(resolved: &Resolved, instance: Option<&Instance>) -> Value {
    let mut echo = serde_json::to_value(&resolved.experiment).expect("config serializes");
    if let Some(instance) = instance {
        echo["derived_seeds"] = json!({
            "graph": instance.graph_seed,
            "params": instance.param_seed,
        });
    }
    if let Some(path) = &resolved.manual_graph {
        echo["manual_graph"] = json!(path.display().to_string());
    }
    echo
}

fn write_output(out: &Option<PathBuf>, payload: &str) -> CliResult<()> {
    match out {
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(payload.as_bytes()).map_err(Error::Io)?;
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, payload).map_err(Error::Io)?;
            Ok(())
        }
    }
}

fn emit_value(resolved: &Resolved, value: &Value) -> CliResult<()> {
    let text = format!("{}\n", serde_json::to_string_pretty(value).expect("json"));
    write_output(&resolved.out, &text)
}

fn trajectory_json(traj: &DemandTrajectory) -> Value {
    json!({
        "periods": traj.periods(),
        "per_period_revenue": traj.per_period_revenue(),
        "total_revenue": traj.total_revenue(),
        "final_cumulative_demand": traj.cumulative(traj.periods()),
        "first_period_prices": traj.prices(1),
        "first_period_order": traj.order(1).as_slice(),
        "negative_demand": traj.negative_demand(),
    })
}

fn ensure_bounded(instance: &Instance) -> CliResult<()> {
    let margins = demand_margins(instance.matrices.params(), &instance.graph);
    if margins.iter().any(|m| *m <= 0.0) {
        return Err(Failure::Model(Error::InvalidConfig(
            "demand-boundedness margin violated; see `validate`".into(),
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Subcommands

fn cmd_validate(args: ModelArgs) -> CliResult<()> {
    let resolved = resolve(&args, None, None, None, None, None, None)?;
    let instance = build_instance(&resolved)?;
    let params = instance.matrices.params().clone();
    let mut report = validate_model(&params, &instance.graph);
    if report.invertible {
        let x_hat = instance.matrices.solve_m(params.a());
        report.demand_nonnegative = Some(x_hat.iter().all(|x| *x >= -1e-12));
    }
    let ok = report.ok();
    let payload = json!({
        "command": "validate",
        "config": config_echo(&resolved, Some(&instance)),
        "report": report,
    });
    emit_value(&resolved, &payload)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Model(Error::InvalidConfig(
            "model failed validation".into(),
        )))
    }
}

fn cmd_static(args: ModelArgs) -> CliResult<()> {
    let resolved = resolve(&args, None, None, None, None, None, None)?;
    let instance = build_instance(&resolved)?;
    ensure_bounded(&instance)?;
    let outcome = solve_static(&instance.matrices)?;
    let payload = json!({
        "command": "static",
        "config": config_echo(&resolved, Some(&instance)),
        "result": outcome,
    });
    emit_value(&resolved, &payload)
}

fn cmd_seqdp(args: SeqArgs) -> CliResult<()> {
    let resolved = resolve(
        &args.model,
        args.periods,
        None,
        None,
        args.order,
        args.convention,
        None,
    )?;
    let instance = build_instance(&resolved)?;
    ensure_bounded(&instance)?;
    let policy = match resolved.order {
        OrderArg::Fixed => OrderPolicy::Fixed(VisitOrder::identity(instance.matrices.n())),
        OrderArg::Fair => OrderPolicy::RoundRobinFair,
    };
    let traj = run_sequential(
        &instance.matrices,
        resolved.experiment.periods,
        resolved.experiment.convention,
        &policy,
    )?;
    let payload = json!({
        "command": "seqdp",
        "config": config_echo(&resolved, Some(&instance)),
        "result": trajectory_json(&traj),
        "asymptotes": {
            "revenue": infinite_horizon_revenue(&instance.matrices)?,
            "welfare": infinite_horizon_welfare(&instance.matrices)?,
            "limit_demand": limit_demand(&instance.matrices)?,
        },
    });
    emit_value(&resolved, &payload)
}

fn cmd_simudp(args: SimuArgs) -> CliResult<()> {
    let resolved = resolve(&args.model, None, args.horizon, None, None, None, None)?;
    let instance = build_instance(&resolved)?;
    ensure_bounded(&instance)?;
    let plan = solve_simultaneous(&instance.matrices, resolved.experiment.horizon)?;
    let payload = json!({
        "command": "simudp",
        "config": config_echo(&resolved, Some(&instance)),
        "result": {
            "horizon": plan.horizon,
            "x_star": plan.x_star,
            "prices": plan.prices,
            "xi": plan.xi,
            "phi": plan.phi,
            "revenue": plan.revenue,
            "negative_price_periods": plan.negative_price_periods,
        },
    });
    emit_value(&resolved, &payload)
}

fn cmd_greedy(args: GreedyArgs) -> CliResult<()> {
    let resolved = resolve(&args.model, args.periods, None, None, None, None, None)?;
    let instance = build_instance(&resolved)?;
    ensure_bounded(&instance)?;
    let traj = run_greedy(&instance.matrices, resolved.experiment.periods);
    let payload = json!({
        "command": "greedy",
        "config": config_echo(&resolved, Some(&instance)),
        "result": trajectory_json(&traj),
    });
    emit_value(&resolved, &payload)
}

fn cmd_sweep(args: SweepArgs) -> CliResult<()> {
    let resolved = resolve(
        &args.model,
        args.periods,
        args.horizon,
        args.runs,
        None,
        None,
        args.format,
    )?;
    let file = load_file_config(&args.model.config)?;
    let param: SweepParameter = match args.param {
        Some(p) => p.into(),
        None => match file.param.as_deref() {
            Some(token) => token.parse().map_err(|e: Error| usage(e.to_string()))?,
            None => return Err(usage("--param is required for sweep")),
        },
    };
    let grid_text = match args.grid.or(file.grid) {
        Some(g) => g,
        None => return Err(usage("--grid is required for sweep")),
    };
    let grid = parse_f64_list(&grid_text, "--grid")?;
    if grid.is_empty() {
        return Err(usage("--grid must hold at least one value"));
    }

    let experiment = Experiment::new(resolved.experiment.clone())?;
    let result = experiment.sweep(param, &grid)?;

    match resolved.format {
        FormatArg::Csv => {
            let mut bytes = Vec::new();
            emit_csv(&result, &mut bytes)?;
            // The CSV byte stream stays pure; the config echo goes to stderr.
            eprintln!("{}", json!({"config": config_echo(&resolved, None)}));
            write_output(&resolved.out, &String::from_utf8(bytes).expect("utf8"))
        }
        FormatArg::Json => {
            let mut bytes = Vec::new();
            emit_json(&result, &mut bytes)?;
            let rows: Value = serde_json::from_slice(&bytes).expect("emitter output is json");
            let payload = json!({
                "command": "sweep",
                "config": config_echo(&resolved, None),
                "result": rows,
            });
            emit_value(&resolved, &payload)
        }
    }
}

fn cmd_trace(args: TraceArgs) -> CliResult<()> {
    let resolved = resolve(
        &args.model,
        args.periods,
        None,
        None,
        None,
        args.convention,
        None,
    )?;
    let experiment = Experiment::new(resolved.experiment.clone())?;
    let trace = experiment.convergence_trace()?;
    match resolved.format {
        FormatArg::Csv => {
            let mut text = String::from("period,cumulative_revenue,cumulative_utility\n");
            for p in &trace.points {
                text.push_str(&format!(
                    "{},{},{}\n",
                    p.period,
                    format_sig12(p.cumulative_revenue),
                    format_sig12(p.cumulative_utility)
                ));
            }
            eprintln!("{}", json!({"config": config_echo(&resolved, None)}));
            write_output(&resolved.out, &text)
        }
        FormatArg::Json => {
            let payload = json!({
                "command": "trace",
                "config": config_echo(&resolved, None),
                "result": trace,
            });
            emit_value(&resolved, &payload)
        }
    }
}

fn cmd_graph_stats(args: GraphStatsArgs) -> CliResult<()> {
    let resolved = resolve(&args.model, None, None, None, None, None, None)?;
    let value = match (&resolved.experiment.graph_source, &resolved.manual_graph) {
        (GraphSourceConfig::EdgeList { path }, _) => {
            let file = std::fs::File::open(path).map_err(Error::Io)?;
            let load = load_edge_list(std::io::BufReader::new(file))?;
            json!({
                "command": "graph-stats",
                "source": "edge_list",
                "path": path.display().to_string(),
                "n": load.skeleton.n(),
                "stats": load.skeleton.stats(),
                "self_loops_ignored": load.self_loops_ignored,
            })
        }
        (GraphSourceConfig::Er, Some(path)) => {
            let graph = load_manual_graph(path)?;
            json!({
                "command": "graph-stats",
                "source": "manual",
                "path": path.display().to_string(),
                "n": graph.n(),
                "stats": graph.stats(),
            })
        }
        (GraphSourceConfig::Er, None) => {
            let config = &resolved.experiment;
            let seed = derive_seed(config.base_seed, &[0, 0, STREAM_GRAPH]);
            let graph = crate::social_graph::generate_er(config.n, config.p_e, config.mu_g, seed)?;
            json!({
                "command": "graph-stats",
                "source": "er",
                "n": graph.n(),
                "seed": seed,
                "stats": graph.stats(),
                "clamped_weights": graph.clamped_weights,
            })
        }
    };
    emit_value(&resolved, &value)
}
