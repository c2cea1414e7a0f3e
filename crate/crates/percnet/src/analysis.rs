//! Monte Carlo estimation of expected unaffected demand across a rho
//! grid, numeric integration to the reliability index alpha, budget
//! sweeps and sensor criticality.
//!
//! Determinism contract: a report depends only on the network and the
//! [`AnalysisConfig`]. Replicates may run on any number of workers; each
//! replicate's draws are counter-keyed and results are reduced in
//! replicate order, so the output is bit-identical regardless of
//! scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::{draw_sample, EdgeCostModel, RhoResponse};
use crate::file::budget_value;
use crate::network::{BudgetPolicy, DemandMatrix, NetworkError, PairId, SurveillanceNetwork};
use crate::path::{CostAssignment, DemandPlan, PathError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid rho grid: {0}")]
    InvalidGrid(&'static str),
    #[error("replicate count must be at least 1")]
    NoReplicates,
    #[error("budget sweep requires at least one budget")]
    EmptySweep,
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Path(#[from] PathError),
}

/// Everything one analysis run depends on besides the network itself.
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    /// Strictly increasing grid spanning [0, 1] on which E[UD] is
    /// evaluated and integrated.
    pub rho_grid: Vec<f64>,
    pub replicates: u32,
    pub seed: u64,
    pub model: EdgeCostModel,
    pub demand: DemandMatrix,
    pub budgets: BudgetPolicy,
    /// Extra uniform budgets evaluated against the same samples.
    pub budget_sweep: Option<Vec<f64>>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            rho_grid: uniform_grid(101),
            replicates: 200,
            seed: 0,
            model: EdgeCostModel::default(),
            demand: DemandMatrix::default(),
            budgets: BudgetPolicy::default(),
            budget_sweep: None,
        }
    }
}

impl AnalysisConfig {
    pub fn new(model: EdgeCostModel) -> Self {
        Self {
            model,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), AnalysisError> {
        let grid = &self.rho_grid;
        if grid.len() < 2 {
            return Err(AnalysisError::InvalidGrid("need at least two points"));
        }
        if grid[0] != 0.0 {
            return Err(AnalysisError::InvalidGrid("must start at 0"));
        }
        if *grid.last().unwrap() != 1.0 {
            return Err(AnalysisError::InvalidGrid("must end at 1"));
        }
        if grid.iter().any(|v| !v.is_finite()) {
            return Err(AnalysisError::InvalidGrid("must be finite"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AnalysisError::InvalidGrid("must be strictly increasing"));
        }
        if self.replicates == 0 {
            return Err(AnalysisError::NoReplicates);
        }
        Ok(())
    }
}

/// Uniformly spaced grid of `points` values from 0 to 1 inclusive.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2, "a grid needs at least two points");
    (0..points)
        .map(|i| i as f64 / (points - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UdPoint {
    pub rho: f64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetAlpha {
    #[serde(with = "budget_value")]
    pub budget: f64,
    pub alpha: f64,
}

/// Parameters echoed into every report so results stay attributable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub replicates: u32,
    pub rho_points: usize,
    pub model: EdgeCostModel,
    #[serde(with = "budget_value")]
    pub default_budget: f64,
}

/// Outcome of one analysis: the expected-UD curve, its integral alpha,
/// and per-budget alphas when a sweep was requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub alpha: f64,
    pub ud_curve: Vec<UdPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_alphas: Option<Vec<BudgetAlpha>>,
    pub config: ConfigEcho,
}

impl ReliabilityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }

    /// `rho,ud_mean,ud_stderr` rows.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("rho,ud_mean,ud_stderr\n");
        for point in &self.ud_curve {
            out.push_str(&format!("{},{},{}\n", point.rho, point.mean, point.stderr));
        }
        out
    }

    /// `budget,alpha` rows for sweep results.
    pub fn budget_csv(&self) -> Option<String> {
        let rows = self.budget_alphas.as_ref()?;
        let mut out = String::from("budget,alpha\n");
        for row in rows {
            out.push_str(&format!("{},{}\n", row.budget, row.alpha));
        }
        Some(out)
    }
}

/// Change in alpha when one physical link's monitoring is removed. A
/// value near zero flags a sensor the intruder can already route around.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeCriticality {
    pub from: String,
    pub to: String,
    pub monitor_bits: f64,
    pub delta_alpha: f64,
}

/// Runs `f` on a dedicated pool with the given worker count. Reports are
/// identical for any count; this only bounds parallelism.
pub fn run_with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("failed to build worker pool")
        .install(f)
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
        .sum()
}

/// UD per (policy, rho gridpoint) for one replicate.
fn replicate_curves(
    network: &SurveillanceNetwork,
    plan: &DemandPlan,
    model: EdgeCostModel,
    rho_grid: &[f64],
    policies: &[BudgetPolicy],
    seed: u64,
    replicate: u32,
) -> Vec<Vec<f64>> {
    let sample = draw_sample(network, seed, replicate);
    let mut curves = vec![Vec::with_capacity(rho_grid.len()); policies.len()];
    for &rho in rho_grid {
        let assignment = CostAssignment::realize(network, model, rho, &sample);
        let ud = plan.unaffected_demand_multi(network, &assignment, policies);
        for (curve, value) in curves.iter_mut().zip(ud) {
            curve.push(value);
        }
    }
    for curve in &curves {
        assert_replicate_monotonic(curve, model.rho_response());
    }
    curves
}

// Holds exactly per replicate, not just in expectation: raising rho only
// ever closes edges under threshold models and only ever opens them under
// Bernoulli.
fn assert_replicate_monotonic(curve: &[f64], response: RhoResponse) {
    let ok = match response {
        RhoResponse::ClosesEdges => curve.windows(2).all(|w| w[1] <= w[0]),
        RhoResponse::OpensEdges => curve.windows(2).all(|w| w[1] >= w[0]),
    };
    debug_assert!(ok, "per-replicate UD curve violated rho monotonicity");
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

struct SweepOutcome {
    /// [policy][rho] -> (mean, stderr); policy 0 is the primary one.
    policy_curves: Vec<Vec<(f64, f64)>>,
    alphas: Vec<f64>,
}

fn run_engine(
    network: &SurveillanceNetwork,
    config: &AnalysisConfig,
    policies: &[BudgetPolicy],
) -> Result<SweepOutcome, AnalysisError> {
    let plan = DemandPlan::build(network, &config.demand)?;
    let per_replicate: Vec<Vec<Vec<f64>>> = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            replicate_curves(
                network,
                &plan,
                config.model,
                &config.rho_grid,
                policies,
                config.seed,
                r,
            )
        })
        .collect();

    let rho_points = config.rho_grid.len();
    let mut policy_curves = Vec::with_capacity(policies.len());
    let mut alphas = Vec::with_capacity(policies.len());
    for k in 0..policies.len() {
        let curve: Vec<(f64, f64)> = (0..rho_points)
            .map(|i| {
                let values: Vec<f64> = per_replicate.iter().map(|rep| rep[k][i]).collect();
                mean_and_stderr(&values)
            })
            .collect();
        let means: Vec<f64> = curve.iter().map(|&(m, _)| m).collect();
        alphas.push(trapezoid(&config.rho_grid, &means));
        policy_curves.push(curve);
    }
    Ok(SweepOutcome {
        policy_curves,
        alphas,
    })
}

/// Mean and standard error of unaffected demand at one restriction level,
/// over `config.replicates` independent failure samples.
pub fn expected_ud(
    network: &SurveillanceNetwork,
    config: &AnalysisConfig,
    rho: f64,
) -> Result<(f64, f64), AnalysisError> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(AnalysisError::InvalidGrid("rho must lie in [0, 1]"));
    }
    if config.replicates == 0 {
        return Err(AnalysisError::NoReplicates);
    }
    let plan = DemandPlan::build(network, &config.demand)?;
    let policies = [config.budgets.clone()];
    let values: Vec<f64> = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let sample = draw_sample(network, config.seed, r);
            let assignment = CostAssignment::realize(network, config.model, rho, &sample);
            plan.unaffected_demand_multi(network, &assignment, &policies)[0]
        })
        .collect();
    Ok(mean_and_stderr(&values))
}

/// Estimates the reliability index: the trapezoidal integral of the
/// expected-UD curve over the rho grid. With `budget_sweep` set the same
/// samples are also scored under each sweep budget.
pub fn alpha(
    network: &SurveillanceNetwork,
    config: &AnalysisConfig,
) -> Result<ReliabilityReport, AnalysisError> {
    config.validate()?;
    let mut policies = vec![config.budgets.clone()];
    if let Some(sweep) = &config.budget_sweep {
        if sweep.is_empty() {
            return Err(AnalysisError::EmptySweep);
        }
        for &budget in sweep {
            policies.push(BudgetPolicy::uniform(budget)?);
        }
    }

    let outcome = run_engine(network, config, &policies)?;

    let ud_curve = config
        .rho_grid
        .iter()
        .zip(&outcome.policy_curves[0])
        .map(|(&rho, &(mean, stderr))| UdPoint { rho, mean, stderr })
        .collect();
    let budget_alphas = config.budget_sweep.as_ref().map(|sweep| {
        sweep
            .iter()
            .zip(outcome.alphas.iter().skip(1))
            .map(|(&budget, &alpha)| BudgetAlpha { budget, alpha })
            .collect()
    });

    Ok(ReliabilityReport {
        alpha: outcome.alphas[0],
        ud_curve,
        budget_alphas,
        config: ConfigEcho {
            seed: config.seed,
            replicates: config.replicates,
            rho_points: config.rho_grid.len(),
            model: config.model,
            default_budget: config.budgets.default_budget(),
        },
    })
}

/// Alpha per sweep budget, all scored against common failure samples so
/// the sequence is exactly (not just statistically) comparable.
pub fn budget_sweep(
    network: &SurveillanceNetwork,
    config: &AnalysisConfig,
) -> Result<Vec<BudgetAlpha>, AnalysisError> {
    if config.budget_sweep.as_deref().is_none_or(|s| s.is_empty()) {
        return Err(AnalysisError::EmptySweep);
    }
    Ok(alpha(network, config)?
        .budget_alphas
        .expect("sweep was requested"))
}

/// Recomputes alpha with each monitored link's bits removed in turn.
/// `delta_alpha` is alpha-without minus the baseline: how much intruder
/// freedom that sensor is currently buying back. Links with no monitoring
/// are skipped. Any configured sweep is ignored; criticality is scored at
/// the primary budget policy.
pub fn edge_criticality(
    network: &SurveillanceNetwork,
    config: &AnalysisConfig,
) -> Result<Vec<EdgeCriticality>, AnalysisError> {
    let mut config = config.clone();
    config.budget_sweep = None;
    let base = alpha(network, &config)?.alpha;

    let mut rows = Vec::new();
    for pair_index in 0..network.pair_count() {
        let pair = PairId(pair_index);
        let bits = network
            .edges()
            .iter()
            .filter(|e| e.pair == pair)
            .map(|e| e.monitor_bits)
            .fold(0.0, f64::max);
        if bits == 0.0 {
            continue;
        }
        let muted = network.without_monitoring_on(pair);
        let without = alpha(&muted, &config)?.alpha;
        let (from, to) = network.pair_endpoints(pair);
        rows.push(EdgeCriticality {
            from: network.label(from).to_string(),
            to: network.label(to).to_string(),
            monitor_bits: bits,
            delta_alpha: without - base,
        });
    }
    Ok(rows)
}
