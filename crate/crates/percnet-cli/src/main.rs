//! `percnet` CLI: validate and extract twin documents, run reliability
//! analyses, sweep privacy budgets, rank sensors and explain paths.
//!
//! Exit codes: 0 on success, 1 on input/validation failures (with a
//! diagnostic on stderr), 2 on usage errors. Identical invocations
//! produce byte-identical outputs; the seed defaults to 0 rather than to
//! the clock. `RELIABILITY_THREADS` caps the worker count without
//! changing any result.

use std::error::Error;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use percnet::{
    alpha, edge_criticality, extract_network, parse_budget_text, parse_network, parse_twin,
    shortest_path, write_network, AnalysisConfig, BudgetPolicy, Cost, CostAssignment,
    DemandMatrix, EdgeCostModel, ExtractionPolicy, SurveillanceNetwork,
};

type CliResult<T> = Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(
    name = "percnet",
    version,
    about = "Percolation-based reliability analysis for smart surveillance networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a twin or network document without writing anything
    Validate {
        input: PathBuf,
        #[command(flatten)]
        policy: PolicyFlags,
    },
    /// Transform a twin document into a network document
    Extract {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        policy: PolicyFlags,
    },
    /// Estimate the reliability index alpha and the expected-UD curve
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        analysis: AnalysisFlags,
        #[command(flatten)]
        policy: PolicyFlags,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute alpha for a list of budgets sharing one set of samples
    Sweep {
        input: PathBuf,
        /// Comma-separated budgets in bits; `inf` is accepted
        #[arg(long, required = true, value_delimiter = ',')]
        budgets: Vec<String>,
        #[command(flatten)]
        analysis: AnalysisFlags,
        #[command(flatten)]
        policy: PolicyFlags,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rank sensors by how much alpha rises when each one is removed
    Criticality {
        input: PathBuf,
        #[command(flatten)]
        analysis: AnalysisFlags,
        #[command(flatten)]
        policy: PolicyFlags,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Show the cheapest path for one pair under one realization
    Explain {
        input: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Restriction level to evaluate at
        #[arg(long, default_value_t = 0.0)]
        rho: f64,
        /// Budget in bits (`inf` accepted); defaults to the input's policy
        #[arg(long, value_parser = parse_budget)]
        budget: Option<f64>,
        #[arg(long, default_value_t = 0)]
        replicate: u32,
        #[command(flatten)]
        realization: RealizationFlags,
        #[command(flatten)]
        policy: PolicyFlags,
    },
}

/// Just enough to pin one realization.
#[derive(Args)]
struct RealizationFlags {
    /// Cost model: bernoulli, access, monitoring, failure, failure+access-faults
    #[arg(long, value_parser = parse_model, default_value = "failure+access-faults")]
    model: EdgeCostModel,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AnalysisFlags {
    /// Cost model: bernoulli, access, monitoring, failure, failure+access-faults
    #[arg(long, value_parser = parse_model, default_value = "failure+access-faults")]
    model: EdgeCostModel,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    replicates: u32,
    /// Number of uniformly spaced rho gridpoints on [0, 1]
    #[arg(long, default_value_t = 101)]
    rho_points: usize,
    /// Uniform budget in bits applied to every pair (`inf` accepted);
    /// replaces the input file's budget policy
    #[arg(long, value_parser = parse_budget)]
    budget: Option<f64>,
}

/// How doors and sensors of a twin translate into edges.
#[derive(Args)]
struct PolicyFlags {
    /// Do not emit reverse edges for two-way doors
    #[arg(long)]
    no_reverse_traversal: bool,
    /// Apply access restrictions to reverse traversal too
    #[arg(long)]
    reverse_requires_access: bool,
    /// Sensors only watch the forward direction
    #[arg(long)]
    no_bidirectional_sensors: bool,
}

impl PolicyFlags {
    fn to_policy(&self) -> ExtractionPolicy {
        ExtractionPolicy {
            reverse_traversal: !self.no_reverse_traversal,
            reverse_requires_access: self.reverse_requires_access,
            sensors_bidirectional: !self.no_bidirectional_sensors,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

fn parse_model(text: &str) -> Result<EdgeCostModel, String> {
    text.parse().map_err(|e| format!("{e}"))
}

fn parse_budget(text: &str) -> Result<f64, String> {
    match parse_budget_text(text) {
        Some(v) if v > 0.0 => Ok(v),
        Some(v) => Err(format!("budget must be positive, got {v}")),
        None => Err(format!("expected a number or `inf`, got `{text}`")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

/// Analysis inputs resolved from either document kind.
struct Inputs {
    network: SurveillanceNetwork,
    demand: DemandMatrix,
    budgets: BudgetPolicy,
    kind: InputKind,
}

enum InputKind {
    Twin { spaces: usize, doors: usize, assets: usize },
    Network,
}

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()).into())
}

fn detect_twin(text: &str, path: &Path) -> CliResult<bool> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| format!("invalid JSON in {}: {e}", path.display()))?;
    Ok(value.get("spaces").is_some() || value.get("schema").is_some())
}

fn load_inputs(path: &Path, policy: &ExtractionPolicy) -> CliResult<Inputs> {
    let text = read_input(path)?;
    if detect_twin(&text, path)? {
        let twin = parse_twin(&text)?;
        let network = extract_network(&twin, policy)?;
        Ok(Inputs {
            network,
            demand: DemandMatrix::default(),
            budgets: BudgetPolicy::default(),
            kind: InputKind::Twin {
                spaces: twin.spaces.len(),
                doors: twin.doors.len(),
                assets: twin.assets.len(),
            },
        })
    } else {
        let (network, demand, budgets) = parse_network(&text)?;
        Ok(Inputs {
            network,
            demand,
            budgets,
            kind: InputKind::Network,
        })
    }
}

fn build_config(inputs: &Inputs, flags: &AnalysisFlags) -> CliResult<AnalysisConfig> {
    if flags.rho_points < 2 {
        return Err("--rho-points must be at least 2".into());
    }
    let budgets = match flags.budget {
        Some(value) => BudgetPolicy::uniform(value)?,
        None => inputs.budgets.clone(),
    };
    Ok(AnalysisConfig {
        rho_grid: percnet::uniform_grid(flags.rho_points),
        replicates: flags.replicates,
        seed: flags.seed,
        model: flags.model,
        demand: inputs.demand.clone(),
        budgets,
        budget_sweep: None,
    })
}

fn emit(output: Option<&Path>, content: &str) -> CliResult<()> {
    match output {
        Some(path) => {
            fs::write(path, content)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

/// Caps rayon's worker count from the environment; results never depend
/// on it.
fn with_threads<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var("RELIABILITY_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1);
    match threads {
        Some(n) => percnet::run_with_threads(n, f),
        None => f(),
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Validate { input, policy } => {
            let inputs = load_inputs(&input, &policy.to_policy())?;
            match inputs.kind {
                InputKind::Twin { spaces, doors, assets } => println!(
                    "valid twin document: {spaces} spaces, {doors} doors, {assets} assets -> \
                     network with {} nodes, {} edges",
                    inputs.network.node_count(),
                    inputs.network.edge_count()
                ),
                InputKind::Network => println!(
                    "valid network document: {} nodes, {} edges, {} physical links",
                    inputs.network.node_count(),
                    inputs.network.edge_count(),
                    inputs.network.pair_count()
                ),
            }
            Ok(())
        }

        Command::Extract { input, output, policy } => {
            let text = read_input(&input)?;
            if !detect_twin(&text, &input)? {
                return Err("extract expects a twin document".into());
            }
            let twin = parse_twin(&text)?;
            let network = extract_network(&twin, &policy.to_policy())?;
            let json = write_network(&network, &DemandMatrix::default(), &BudgetPolicy::default());
            emit(output.as_deref(), &json)?;
            Ok(())
        }

        Command::Analyze { input, analysis, policy, format, output } => {
            let inputs = load_inputs(&input, &policy.to_policy())?;
            let config = build_config(&inputs, &analysis)?;
            let report = with_threads(|| alpha(&inputs.network, &config))?;
            eprintln!("alpha = {}", report.alpha);
            let content = match format {
                OutputFormat::Json => report.to_json(),
                OutputFormat::Csv => report.curve_csv(),
            };
            emit(output.as_deref(), &content)
        }

        Command::Sweep { input, budgets, analysis, policy, format, output } => {
            let inputs = load_inputs(&input, &policy.to_policy())?;
            let mut config = build_config(&inputs, &analysis)?;
            let sweep: Vec<f64> = budgets
                .iter()
                .map(|b| parse_budget(b).map_err(Box::<dyn Error>::from))
                .collect::<CliResult<_>>()?;
            config.budget_sweep = Some(sweep);
            let report = with_threads(|| alpha(&inputs.network, &config))?;
            let content = match format {
                OutputFormat::Json => report.to_json(),
                OutputFormat::Csv => report
                    .budget_csv()
                    .expect("sweep report always carries budget rows"),
            };
            emit(output.as_deref(), &content)
        }

        Command::Criticality { input, analysis, policy, format, output } => {
            let inputs = load_inputs(&input, &policy.to_policy())?;
            let config = build_config(&inputs, &analysis)?;
            let rows = with_threads(|| edge_criticality(&inputs.network, &config))?;
            let content = match format {
                OutputFormat::Json => {
                    let mut json = serde_json::to_string_pretty(&rows)
                        .expect("criticality serialization cannot fail");
                    json.push('\n');
                    json
                }
                OutputFormat::Csv => {
                    let mut csv = String::from("from,to,monitor_bits,delta_alpha\n");
                    for row in &rows {
                        writeln!(csv, "{},{},{},{}", row.from, row.to, row.monitor_bits, row.delta_alpha)
                            .expect("string writes cannot fail");
                    }
                    csv
                }
            };
            emit(output.as_deref(), &content)
        }

        Command::Explain { input, from, to, rho, budget, replicate, realization, policy } => {
            if !(0.0..=1.0).contains(&rho) {
                return Err("--rho must lie in [0, 1]".into());
            }
            let inputs = load_inputs(&input, &policy.to_policy())?;
            let network = &inputs.network;
            let origin = network
                .node_id(&from)
                .ok_or_else(|| format!("unknown node `{from}`"))?;
            let destination = network
                .node_id(&to)
                .ok_or_else(|| format!("unknown node `{to}`"))?;
            let budget = budget.unwrap_or_else(|| inputs.budgets.budget(origin, destination));

            let sample = percnet::draw_sample(network, realization.seed, replicate);
            let assignment = CostAssignment::realize(network, realization.model, rho, &sample);
            let result = shortest_path(network, &assignment, origin, destination)?;

            println!(
                "cheapest path {from} -> {to} at rho = {rho} ({} model, seed {}, replicate {replicate})",
                realization.model, realization.seed
            );
            match (&result.min_cost, &result.path) {
                (Cost::Finite(total), Some(edges)) => {
                    for &edge_id in edges {
                        let edge = network.edge(edge_id);
                        println!(
                            "  {} -> {}: {} bits",
                            network.label(edge.from),
                            network.label(edge.to),
                            assignment.cost(edge_id)
                        );
                    }
                    let verdict = if percnet::reachability(result.min_cost, budget) {
                        "within budget"
                    } else {
                        "over budget"
                    };
                    println!("total: {total} bits, budget {budget}: {verdict}");
                }
                _ => {
                    println!("no finite-cost path exists for this realization");
                    println!("total: inf, budget {budget}: unreachable");
                }
            }
            Ok(())
        }
    }
}
