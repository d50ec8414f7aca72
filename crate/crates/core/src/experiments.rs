//! Seeded Monte-Carlo comparison harness.
//!
//! An [`Experiment`] samples market instances (graph plus coefficient
//! draws), solves every pricing scheme on each, and aggregates the metrics
//! over runs and parameter grids. All randomness is carved out of
//! `base_seed` with [`derive_seed`]: stream tags keep graph draws, weight
//! draws and coefficient draws independent, and `(run_index, attempt)`
//! enters the derivation so results do not depend on execution order or
//! thread count. Sweeps reuse the same per-run seeds at every grid value,
//! which pairs the comparisons and makes the zero-tie control exactly
//! constant along the grid.
//!
//! Instances whose transition operator is not a contraction (the
//! infinite-horizon sums would diverge) are resampled, like instances that
//! fail the demand-boundedness margin; both rejection kinds are counted.
//! Sign degeneracies — components of the interior solutions coming out
//! negative, which the default coefficient spread produces routinely — are
//! recorded per run and reported in the `warnings` column rather than
//! excluding the run: the closed-form metrics remain finite and are what
//! the comparison curves are built from.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::market_model::{build_matrices, demand_margins, is_contracting, MarketParams, ModelMatrices};
use crate::numerics::dot;
use crate::rng::{derive_seed, SplitMix64};
use crate::sequential_pricing::{
    infinite_horizon_revenue, infinite_horizon_welfare, run_sequential, OrderPolicy,
    PriceConvention, VisitOrder,
};
use crate::simultaneous_pricing::{run_greedy, solve_simultaneous_lenient};
use crate::social_graph::{
    assign_ties, generate_er, load_edge_list, sample_subgraph, GraphSkeleton, SocialGraph,
};

/// Maximum resampling attempts before a run is abandoned.
pub const MAX_ATTEMPTS: u64 = 100;

/// Floor applied to coefficient draws to keep them positive.
pub const COEFFICIENT_FLOOR: f64 = 0.01;

// Stream tags for seed derivation; see the module docs.
pub const STREAM_GRAPH: u64 = 1;
pub const STREAM_PARAMS: u64 = 2;
pub const STREAM_SUBSAMPLE: u64 = 3;
pub const STREAM_TIES: u64 = 4;

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GraphSourceConfig {
    Er,
    EdgeList { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    None,
    ByStatic,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub p_e: f64,
    pub mu_a: f64,
    pub mu_b: f64,
    pub mu_g: f64,
    pub c: f64,
    pub periods: usize,
    pub horizon: usize,
    pub runs: u64,
    pub base_seed: u64,
    pub graph_source: GraphSourceConfig,
    pub convention: PriceConvention,
    pub normalization: Normalization,
    /// Force every tie weight to exactly zero (no-network-effect control).
    pub zero_ties: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 50,
            p_e: 0.8,
            mu_a: 1.0,
            mu_b: 20.0,
            mu_g: 8.0,
            c: 10.0,
            periods: 50,
            horizon: 50,
            runs: 50,
            base_seed: 42,
            graph_source: GraphSourceConfig::Er,
            convention: PriceConvention::Anticipatory,
            normalization: Normalization::ByStatic,
            zero_ties: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p_e) {
            return Err(Error::InvalidProbability(self.p_e));
        }
        if self.periods < 1 || self.horizon < 1 {
            return Err(Error::InvalidConfig(
                "periods and horizon must be at least 1".into(),
            ));
        }
        if self.runs < 1 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        if self.convention == PriceConvention::Greedy {
            return Err(Error::InvalidConfig(
                "greedy is a scheme, not a sequential price convention".into(),
            ));
        }
        Ok(())
    }
}

/// Sweepable parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    EdgeProbability,
    Congestion,
    Users,
    TieMean,
}

impl SweepParameter {
    pub fn token(&self) -> &'static str {
        match self {
            SweepParameter::EdgeProbability => "pe",
            SweepParameter::Congestion => "c",
            SweepParameter::Users => "n",
            SweepParameter::TieMean => "mu_g",
        }
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pe" => Ok(SweepParameter::EdgeProbability),
            "c" => Ok(SweepParameter::Congestion),
            "n" => Ok(SweepParameter::Users),
            "mu_g" | "mu-g" => Ok(SweepParameter::TieMean),
            other => Err(Error::InvalidParameter(format!(
                "unknown sweep parameter '{other}' (expected pe, c, n or mu_g)"
            ))),
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Sign degeneracies observed while solving one instance.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct Degeneracies {
    /// Components of the static interior solution below tolerance.
    pub static_negative_demand: usize,
    /// Negative per-period demand entries across the sequential run.
    pub trajectory_negative_demand: usize,
    /// Components of the simultaneous constant demand below tolerance.
    pub simultaneous_negative_demand: usize,
    /// Negative posted prices across the simultaneous schedule.
    pub negative_prices: usize,
}

impl Degeneracies {
    pub fn any(&self) -> bool {
        self.static_negative_demand > 0
            || self.trajectory_negative_demand > 0
            || self.simultaneous_negative_demand > 0
            || self.negative_prices > 0
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct InstanceMetrics {
    pub pi_s: f64,
    pub u_s: f64,
    pub pi_d: f64,
    pub u_d: f64,
    pub pi_simu: f64,
    pub pi_greedy: f64,
    pub fairness_spread_fixed: f64,
    pub fairness_spread_fair: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct InstanceRecord {
    pub run_index: u64,
    /// Resampling attempts rejected before this instance was accepted.
    pub rejections: u64,
    pub graph_seed: u64,
    pub param_seed: u64,
    pub metrics: InstanceMetrics,
    pub degeneracies: Degeneracies,
}

/// A sampled instance with its operators, before any scheme is solved.
pub struct SampledInstance {
    pub matrices: ModelMatrices,
    pub rejections: u64,
    pub graph_seed: u64,
    pub param_seed: u64,
}

/// Harness over one configuration. Edge-list skeletons are loaded once and
/// shared across runs.
#[derive(Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    skeleton: Option<Arc<GraphSkeleton>>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let skeleton = match &config.graph_source {
            GraphSourceConfig::Er => None,
            GraphSourceConfig::EdgeList { path } => {
                let file = std::fs::File::open(path)?;
                let load = load_edge_list(std::io::BufReader::new(file))?;
                Some(Arc::new(load.skeleton))
            }
        };
        Ok(Experiment { config, skeleton })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    fn with_value(&self, parameter: SweepParameter, value: f64) -> Result<Experiment> {
        let mut config = self.config.clone();
        match parameter {
            SweepParameter::EdgeProbability => config.p_e = value,
            SweepParameter::Congestion => config.c = value,
            SweepParameter::TieMean => config.mu_g = value,
            SweepParameter::Users => {
                if value < 1.0 || (value - value.round()).abs() > 1e-9 {
                    return Err(Error::InvalidParameter(format!(
                        "grid value {value} is not a positive integer user count"
                    )));
                }
                config.n = value.round() as usize;
            }
        }
        config.validate()?;
        Ok(Experiment {
            config,
            skeleton: self.skeleton.clone(),
        })
    }

    /// Regenerates the graph of `(run_index, attempt)`; used by callers that
    /// need the raw graph alongside the operators.
    pub fn graph_for(&self, run_index: u64, attempt: u64) -> Result<(SocialGraph, u64)> {
        self.sample_graph(run_index, attempt)
    }

    fn sample_graph(&self, run_index: u64, attempt: u64) -> Result<(SocialGraph, u64)> {
        let base = self.config.base_seed;
        let graph_seed = derive_seed(base, &[run_index, attempt, STREAM_GRAPH]);
        let graph = match &self.config.graph_source {
            GraphSourceConfig::Er => {
                generate_er(self.config.n, self.config.p_e, self.config.mu_g, graph_seed)?
            }
            GraphSourceConfig::EdgeList { .. } => {
                let skeleton = self.skeleton.as_ref().expect("skeleton loaded in new()");
                let sub_seed = derive_seed(base, &[run_index, attempt, STREAM_SUBSAMPLE]);
                let tie_seed = derive_seed(base, &[run_index, attempt, STREAM_TIES]);
                let sub = sample_subgraph(skeleton, self.config.n, sub_seed)?;
                assign_ties(&sub, self.config.mu_g, tie_seed)
            }
        };
        let graph = if self.config.zero_ties {
            graph.zeroed()
        } else {
            graph
        };
        Ok((graph, graph_seed))
    }

    /// Draws instances until one satisfies the demand-boundedness margin and
    /// the contraction condition, then returns its operators.
    pub fn sample_instance(&self, run_index: u64) -> Result<SampledInstance> {
        let base = self.config.base_seed;
        for attempt in 0..MAX_ATTEMPTS {
            let (graph, graph_seed) = self.sample_graph(run_index, attempt)?;
            let param_seed = derive_seed(base, &[run_index, attempt, STREAM_PARAMS]);
            let mut rng = SplitMix64::new(param_seed);
            let a: Vec<f64> = (0..self.config.n)
                .map(|_| rng.next_normal(self.config.mu_a, 1.0).max(COEFFICIENT_FLOOR))
                .collect();
            let b: Vec<f64> = (0..self.config.n)
                .map(|_| rng.next_normal(self.config.mu_b, 1.0).max(COEFFICIENT_FLOOR))
                .collect();
            let params = MarketParams::new(a, b, self.config.c)?;
            if demand_margins(&params, &graph).iter().any(|m| *m <= 0.0) {
                continue;
            }
            // Exact contraction test before the full operator assembly;
            // divergent instances have no infinite-horizon metrics.
            if !is_contracting(&params, &graph) {
                continue;
            }
            let matrices = match build_matrices(&params, &graph) {
                Ok(m) => m,
                Err(Error::SingularMatrix { .. }) => continue,
                Err(e) => return Err(e),
            };
            return Ok(SampledInstance {
                matrices,
                rejections: attempt,
                graph_seed,
                param_seed,
            });
        }
        Err(Error::Unsatisfiable(MAX_ATTEMPTS as usize))
    }

    /// Solves every scheme on one sampled instance.
    pub fn run_instance(&self, run_index: u64) -> Result<InstanceRecord> {
        let sampled = self.sample_instance(run_index)?;
        let m = &sampled.matrices;
        let params = m.params();
        let mut degeneracies = Degeneracies::default();

        // Static baseline from the closed forms; sign flagged, not fatal.
        let x_hat = m.solve_m(params.a());
        degeneracies.static_negative_demand =
            x_hat.iter().filter(|x| **x < -1e-12).count();
        let gap = m.price_gap_diag();
        let pi_s: f64 = x_hat.iter().zip(&gap).map(|(x, g)| g * x * x).sum();
        let total_x: f64 = x_hat.iter().sum();
        let u_s: f64 = x_hat
            .iter()
            .enumerate()
            .map(|(i, &x)| x * (params.b()[i] * x + 0.5 * params.c() * total_x))
            .sum();

        let pi_d = infinite_horizon_revenue(m)?;
        let u_d = infinite_horizon_welfare(m)?;

        let (plan, simu_negative) = solve_simultaneous_lenient(m, self.config.horizon)?;
        degeneracies.simultaneous_negative_demand = simu_negative;
        degeneracies.negative_prices = plan.negative_price_periods.len();

        let greedy = run_greedy(m, self.config.horizon);

        let order_fixed = OrderPolicy::Fixed(VisitOrder::identity(m.n()));
        let fixed = run_sequential(m, self.config.periods, PriceConvention::Step4, &order_fixed)?;
        let fair = run_sequential(
            m,
            self.config.periods,
            PriceConvention::Step4,
            &OrderPolicy::RoundRobinFair,
        )?;
        degeneracies.trajectory_negative_demand = fixed.negative_demand().len();

        let metrics = InstanceMetrics {
            pi_s,
            u_s,
            pi_d,
            u_d,
            pi_simu: plan.revenue,
            pi_greedy: greedy.total_revenue(),
            fairness_spread_fixed: fixed.utility_spread(self.config.periods, m)?,
            fairness_spread_fair: fair.utility_spread(self.config.periods, m)?,
        };
        Ok(InstanceRecord {
            run_index,
            rejections: sampled.rejections,
            graph_seed: sampled.graph_seed,
            param_seed: sampled.param_seed,
            metrics,
            degeneracies,
        })
    }

    fn run_all(&self) -> Result<Vec<InstanceRecord>> {
        let records: Result<Vec<InstanceRecord>> = (0..self.config.runs)
            .into_par_iter()
            .map(|r| self.run_instance(r))
            .collect();
        let records = records?;
        // Dominance of the multi-period scheme over the static baseline is
        // structural for contracting instances; check it on every run. The
        // welfare side additionally needs the interior regime, so it is
        // checked on sign-clean runs only.
        for rec in &records {
            let m = &rec.metrics;
            if m.pi_d < m.pi_s * (1.0 - 1e-9) {
                return Err(Error::DominanceViolated {
                    run: rec.run_index as usize,
                    what: format!("multi-period revenue {} below static {}", m.pi_d, m.pi_s),
                });
            }
            if !rec.degeneracies.any() && m.u_d < m.u_s * (1.0 - 1e-9) {
                return Err(Error::DominanceViolated {
                    run: rec.run_index as usize,
                    what: format!("multi-period welfare {} below static {}", m.u_d, m.u_s),
                });
            }
        }
        Ok(records)
    }

    /// Runs `runs` instances at every grid value and aggregates.
    pub fn sweep(&self, parameter: SweepParameter, grid: &[f64]) -> Result<SweepResult> {
        let mut cells = Vec::with_capacity(grid.len());
        for &value in grid {
            let patched = self.with_value(parameter, value)?;
            let records = patched.run_all()?;
            cells.push(SweepCell::aggregate(
                value,
                &records,
                self.config.normalization,
            ));
        }
        Ok(SweepResult {
            parameter: parameter.token().to_string(),
            cells,
        })
    }

    /// Per-period cumulative revenue and utility series for the instance at
    /// `run_index` 0, with the closed-form asymptotes.
    pub fn convergence_trace(&self) -> Result<TraceResult> {
        let sampled = self.sample_instance(0)?;
        let m = &sampled.matrices;
        let traj = run_sequential(
            m,
            self.config.periods,
            self.config.convention,
            &OrderPolicy::Fixed(VisitOrder::identity(m.n())),
        )?;
        let mut points = Vec::with_capacity(self.config.periods);
        let mut cumulative_revenue = 0.0;
        let mut payments = 0.0;
        for k in 1..=self.config.periods {
            cumulative_revenue += traj.per_period_revenue()[k - 1];
            payments += dot(traj.prices(k), traj.demand(k));
            let gross = crate::market_model::gross_utility(traj.cumulative(k), m);
            points.push(TracePoint {
                period: k,
                cumulative_revenue,
                cumulative_utility: gross - payments,
            });
        }
        Ok(TraceResult {
            graph_seed: sampled.graph_seed,
            param_seed: sampled.param_seed,
            rejections: sampled.rejections,
            negative_demand_entries: traj.negative_demand().len(),
            revenue_asymptote: infinite_horizon_revenue(m)?,
            welfare_asymptote: infinite_horizon_welfare(m)?,
            points,
        })
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TracePoint {
    pub period: usize,
    pub cumulative_revenue: f64,
    pub cumulative_utility: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TraceResult {
    pub graph_seed: u64,
    pub param_seed: u64,
    pub rejections: u64,
    pub negative_demand_entries: usize,
    pub revenue_asymptote: f64,
    pub welfare_asymptote: f64,
    pub points: Vec<TracePoint>,
}

/// Mean and standard error of one metric over the retained runs.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MetricSummary {
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
}

impl MetricSummary {
    fn over(values: &[f64]) -> MetricSummary {
        match values.len() {
            0 => MetricSummary {
                mean: None,
                stderr: None,
            },
            1 => MetricSummary {
                mean: Some(values[0]),
                stderr: None,
            },
            k => {
                let mean = values.iter().sum::<f64>() / k as f64;
                let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                    / (k as f64 - 1.0);
                MetricSummary {
                    mean: Some(mean),
                    stderr: Some((var / k as f64).sqrt()),
                }
            }
        }
    }
}

/// Aggregates for one grid value: metric name in fixed order -> summary.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepCell {
    pub value: f64,
    /// Runs entering the averages.
    pub runs: usize,
    /// Runs carrying at least one sign degeneracy.
    pub warnings: usize,
    pub metrics: Vec<(String, MetricSummary)>,
}

impl SweepCell {
    fn aggregate(value: f64, records: &[InstanceRecord], normalization: Normalization) -> Self {
        let warnings = records.iter().filter(|r| r.degeneracies.any()).count();
        let pick = |f: &dyn Fn(&InstanceMetrics) -> f64| -> Vec<f64> {
            records.iter().map(|r| f(&r.metrics)).collect()
        };
        let raw: Vec<(&str, Vec<f64>)> = vec![
            ("pi_s", pick(&|m| m.pi_s)),
            ("u_s", pick(&|m| m.u_s)),
            ("pi_d", pick(&|m| m.pi_d)),
            ("u_d", pick(&|m| m.u_d)),
            ("pi_simu", pick(&|m| m.pi_simu)),
            ("pi_greedy", pick(&|m| m.pi_greedy)),
        ];
        let mut metrics: Vec<(String, MetricSummary)> = raw
            .iter()
            .map(|(name, vals)| (name.to_string(), MetricSummary::over(vals)))
            .collect();
        if normalization == Normalization::ByStatic {
            let normalized: Vec<(&str, Vec<f64>)> = vec![
                ("pi_s_norm", pick(&|m| m.pi_s / m.pi_s)),
                ("u_s_norm", pick(&|m| m.u_s / m.u_s)),
                ("pi_d_norm", pick(&|m| m.pi_d / m.pi_s)),
                ("u_d_norm", pick(&|m| m.u_d / m.u_s)),
                ("pi_simu_norm", pick(&|m| m.pi_simu / m.pi_s)),
                ("pi_greedy_norm", pick(&|m| m.pi_greedy / m.pi_s)),
            ];
            metrics.extend(
                normalized
                    .iter()
                    .map(|(name, vals)| (name.to_string(), MetricSummary::over(vals))),
            );
        }
        SweepCell {
            value,
            runs: records.len(),
            warnings,
            metrics,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepResult {
    pub parameter: String,
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    /// Mean of one metric across the grid, in grid order.
    pub fn metric_means(&self, name: &str) -> Vec<Option<f64>> {
        self.cells
            .iter()
            .map(|c| {
                c.metrics
                    .iter()
                    .find(|(n, _)| n == name)
                    .and_then(|(_, s)| s.mean)
            })
            .collect()
    }
}

/// Renders a float with 12 significant digits, stable across platforms.
pub fn format_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

const CSV_HEADER: &str = "parameter,value,metric,mean,stderr,runs,warnings";

/// Writes the fixed-schema CSV (`parameter,value,metric,mean,stderr,runs,warnings`),
/// one row per grid value and metric, in deterministic order. Empty mean or
/// stderr cells stand for null.
pub fn emit_csv(result: &SweepResult, mut sink: impl Write) -> Result<()> {
    writeln!(sink, "{CSV_HEADER}")?;
    for cell in &result.cells {
        for (name, summary) in &cell.metrics {
            let mean = summary.mean.map(format_sig12).unwrap_or_default();
            let stderr = summary.stderr.map(format_sig12).unwrap_or_default();
            writeln!(
                sink,
                "{},{},{},{},{},{},{}",
                result.parameter,
                format_sig12(cell.value),
                name,
                mean,
                stderr,
                cell.runs,
                cell.warnings
            )?;
        }
    }
    Ok(())
}

/// JSON mirror of the CSV schema: an array of row objects under `rows`,
/// numbers rendered with the same 12-significant-digit formatter.
pub fn emit_json(result: &SweepResult, mut sink: impl Write) -> Result<()> {
    let fmt_opt = |v: Option<f64>| v.map(format_sig12).unwrap_or_else(|| "null".to_string());
    writeln!(sink, "{{")?;
    writeln!(sink, "  \"parameter\": \"{}\",", result.parameter)?;
    writeln!(sink, "  \"rows\": [")?;
    let mut first = true;
    for cell in &result.cells {
        for (name, summary) in &cell.metrics {
            if !first {
                writeln!(sink, ",")?;
            }
            first = false;
            write!(
                sink,
                "    {{\"parameter\": \"{}\", \"value\": {}, \"metric\": \"{}\", \"mean\": {}, \"stderr\": {}, \"runs\": {}, \"warnings\": {}}}",
                result.parameter,
                format_sig12(cell.value),
                name,
                fmt_opt(summary.mean),
                fmt_opt(summary.stderr),
                cell.runs,
                cell.warnings
            )?;
        }
    }
    writeln!(sink)?;
    writeln!(sink, "  ]")?;
    writeln!(sink, "}}")?;
    Ok(())
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub parameter: String,
    pub value: f64,
    pub metric: String,
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    pub runs: usize,
    pub warnings: usize,
}

/// Parses CSV produced by [`emit_csv`].
pub fn parse_csv(reader: impl BufRead) -> Result<Vec<CsvRow>> {
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if idx == 0 {
            if line != CSV_HEADER {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("unexpected header '{line}'"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 7 fields, got {}", fields.len()),
            });
        }
        let parse_f64 = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("'{s}' is not a number"),
            })
        };
        let parse_opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse_f64(s).map(Some)
            }
        };
        let parse_usize = |s: &str| -> Result<usize> {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("'{s}' is not a count"),
            })
        };
        rows.push(CsvRow {
            parameter: fields[0].to_string(),
            value: parse_f64(fields[1])?,
            metric: fields[2].to_string(),
            mean: parse_opt(fields[3])?,
            stderr: parse_opt(fields[4])?,
            runs: parse_usize(fields[5])?,
            warnings: parse_usize(fields[6])?,
        });
    }
    Ok(rows)
}
