//! Command-line interface for reset monitoring experiments.

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use resetmon::harness::{
    run_trials_on_product, MonitorChoice, MonitorSettings, RunConfig, RunError, ScheduleChoice,
};
use resetmon::modelref::{resolve_model, resolve_prop, ModelRefError};
use resetmon::{emit_csv, emit_json};
use resetmon_core::analysis::{
    satisfaction_probability, scc_decompose, structural_params, theoretical_bounds,
};
use resetmon_core::{alpha0, build_product, classify_scc, Verdict};

const EXIT_CONFIG: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_DEGENERATE: u8 = 4;

#[derive(Parser)]
#[command(name = "resetmon", version, about = "Monitor sampled Markov chain runs against omega-regular properties with reset controllers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MonitorArg {
    Cautious,
    Bold,
    BoldGeneral,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScheduleArg {
    Linear,
    Exp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Fig1,
    Fig2,
}

#[derive(Args)]
struct MonitorArgs {
    /// Reset controller to run.
    #[arg(long, value_enum)]
    monitor: MonitorArg,
    /// Boldness parameter (bold monitor).
    #[arg(long)]
    alpha: Option<f64>,
    /// Failure budget for good runs (bold monitors).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Boldness schedule (bold-general monitor).
    #[arg(long, value_enum)]
    schedule: Option<ScheduleArg>,
}

impl MonitorArgs {
    fn settings(&self) -> MonitorSettings {
        MonitorSettings {
            monitor: match self.monitor {
                MonitorArg::Cautious => MonitorChoice::Cautious,
                MonitorArg::Bold => MonitorChoice::Bold,
                MonitorArg::BoldGeneral => MonitorChoice::BoldGeneral,
            },
            alpha: self.alpha,
            epsilon: self.epsilon,
            schedule: self.schedule.map(|s| match s {
                ScheduleArg::Linear => ScheduleChoice::Linear,
                ScheduleArg::Exp => ScheduleChoice::Exp,
            }),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run monitored trials and write an experiment report.
    Run {
        /// Model: file path or builtin:fig1:<n> | fig2:<n> | random:<n>:<seed>.
        #[arg(long)]
        model: String,
        /// Property: HOA file or prop:Fp | Gp | GFp | FGp | GFimpliesFG.
        #[arg(long)]
        prop: String,
        #[command(flatten)]
        monitor: MonitorArgs,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Per-trial step budget.
        #[arg(long, default_value_t = RunConfig::DEFAULT_MAX_STEPS)]
        max_steps: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        /// Include measured wall times in the report (breaks byte-identical
        /// output).
        #[arg(long, default_value_t = false)]
        emit_timing: bool,
    },
    /// Print oracle facts, the BSCC list and theoretical bounds for a model
    /// and property.
    Validate {
        #[arg(long)]
        model: String,
        #[arg(long)]
        prop: String,
        /// Boldness used for the bound report; defaults to alpha0.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
    },
    /// Run a monitor across a family size range and emit the scaling table.
    BenchFamily {
        #[arg(value_enum)]
        family: FamilyArg,
        /// Inclusive size range, e.g. 4..10.
        #[arg(long)]
        n_range: String,
        #[command(flatten)]
        monitor: MonitorArgs,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = RunConfig::DEFAULT_MAX_STEPS)]
        max_steps: u64,
        /// Property to monitor.
        #[arg(long, default_value = "prop:Fp")]
        prop: String,
        /// Optional CSV output path for the table.
        #[arg(long)]
        out: Option<String>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    ModelRef(#[from] ModelRefError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("{0}")]
    Config(String),
    #[error("cannot write `{path}`: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::ModelRef(e) if e.is_parse_error() => EXIT_PARSE,
            CliError::ModelRef(_) => EXIT_CONFIG,
            CliError::Run(RunError::Config(_)) => EXIT_CONFIG,
            CliError::Run(_) => EXIT_CONFIG,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Write { .. } => EXIT_CONFIG,
        }
    }
}

fn write_output(path: Option<&str>, content: &str) -> Result<(), CliError> {
    match path {
        None => {
            print!("{content}");
            std::io::stdout().flush().ok();
            Ok(())
        }
        Some(p) => std::fs::write(p, content)
            .map_err(|source| CliError::Write { path: p.to_string(), source }),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run { model, prop, monitor, trials, seed, max_steps, out, format, emit_timing } => {
            let chain = resolve_model(&model)?;
            let dra = resolve_prop(&prop)?;
            let product = build_product(&chain, &dra).map_err(RunError::Product)?;
            let mut config = RunConfig::new(&model, &prop, monitor.settings(), trials, seed);
            config.max_steps = max_steps;
            config.emit_timing = emit_timing;
            let report = run_trials_on_product(&product, &config)?;
            let content = match format {
                FormatArg::Json => emit_json(&report),
                FormatArg::Csv => emit_csv(&report),
            };
            write_output(out.as_deref(), &content)?;
            if report.aggregates.degenerate {
                eprintln!(
                    "warning: {} of {} trials hit the step budget; report flagged degenerate",
                    report.aggregates.cutoff, report.aggregates.trials
                );
                return Ok(ExitCode::from(EXIT_DEGENERATE));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { model, prop, alpha, epsilon } => {
            let chain = resolve_model(&model)?;
            let dra = resolve_prop(&prop)?;
            let product = build_product(&chain, &dra).map_err(RunError::Product)?;
            let params = structural_params(&product);
            let p_phi = satisfaction_probability(&product).map_err(RunError::Analysis)?;
            let floor = alpha0(params.p_min).map_err(RunError::Config)?;
            println!("model: {model} ({} chain states)", chain.n_states());
            println!("property: {prop} ({} automaton states, {} Rabin pairs)", dra.n_states(), dra.pairs().len());
            println!("product states: {}", params.n_states);
            println!("p_min: {}", params.p_min);
            println!("mxsc: {}", params.mxsc);
            println!("p_phi: {p_phi}");
            println!("alpha0: {floor}");
            let dec = scc_decompose(&product);
            println!("BSCCs:");
            for i in dec.bottom_components() {
                let verdict = match classify_scc(&dec.components[i], &product) {
                    Verdict::Good => "good",
                    Verdict::Bad => "bad",
                };
                println!("  {verdict} {:?}", dec.components[i]);
            }
            let alpha = alpha.unwrap_or(floor);
            match theoretical_bounds(&params, p_phi, alpha, epsilon) {
                Ok(b) => {
                    println!("bounds (alpha={alpha}, epsilon={epsilon}):");
                    println!("  E[R]            <= {}", b.er_bound);
                    println!("  sample cost     <= {}", b.sample_cost_fixed);
                    println!("  E[T] fixed      <= {}", b.et_bound_fixed);
                    println!("  E[T] linear sch <= {}", b.et_bound_general);
                }
                Err(e) => println!("bounds: not applicable ({e})"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::BenchFamily { family, n_range, monitor, trials, seed, max_steps, prop, out } => {
            let (lo, hi) = parse_range(&n_range)?;
            let dra = resolve_prop(&prop)?;
            let settings = monitor.settings();
            let mut csv = String::from("n,product_states,p_phi,mean_r,mean_t,mean_t_over_r,et_bound_fixed\n");
            println!("{:>4} {:>8} {:>8} {:>10} {:>12} {:>12} {:>14}", "n", "states", "p_phi", "mean_R", "mean_T", "mean_T/R", "ET_bound");
            for n in lo..=hi {
                let model_ref = match family {
                    FamilyArg::Fig1 => format!("builtin:fig1:{n}"),
                    FamilyArg::Fig2 => format!("builtin:fig2:{n}"),
                };
                let chain = resolve_model(&model_ref)?;
                let product = build_product(&chain, &dra).map_err(RunError::Product)?;
                let mut config = RunConfig::new(&model_ref, &prop, settings.clone(), trials, seed);
                config.max_steps = max_steps;
                let report = run_trials_on_product(&product, &config)?;
                let bound = report.bounds.as_ref().map(|b| match settings.monitor {
                    MonitorChoice::BoldGeneral => b.et_bound_general,
                    _ => b.et_bound_fixed,
                });
                let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into());
                println!(
                    "{:>4} {:>8} {:>8.4} {:>10.3} {:>12.1} {:>12} {:>14}",
                    n,
                    report.oracle.product_states,
                    report.oracle.p_phi,
                    report.aggregates.mean_r,
                    report.aggregates.mean_t,
                    fmt_opt(report.aggregates.mean_t_over_r),
                    fmt_opt(bound),
                );
                csv.push_str(&format!(
                    "{n},{},{},{},{},{},{}\n",
                    report.oracle.product_states,
                    report.oracle.p_phi,
                    report.aggregates.mean_r,
                    report.aggregates.mean_t,
                    report.aggregates.mean_t_over_r.map(|x| x.to_string()).unwrap_or_else(|| "-".into()),
                    bound.map(|x| x.to_string()).unwrap_or_else(|| "-".into()),
                ));
            }
            if let Some(path) = out {
                write_output(Some(&path), &csv)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_range(range: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::Config(format!("bad range `{range}`, expected `a..b`"));
    let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
    let lo: u32 = lo.parse().map_err(|_| bad())?;
    let hi: u32 = hi.parse().map_err(|_| bad())?;
    if lo < 1 || hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}
