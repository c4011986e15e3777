//! Trial orchestration: sampling the product under a reset controller.
//!
//! A trial samples the product step by step, feeding the tracker and asking
//! the monitor after every extension. A trial terminates `AcceptedGood` when
//! the current candidate is confirmed by the structural oracle to be a good
//! BSCC with strength at least 1 (from that point no reset can ever happen),
//! or `Cutoff` at the step budget. The oracle lives only here; monitors
//! never see it.
//!
//! Per-trial randomness comes from independent streams of a seeded ChaCha
//! generator, so identical configurations reproduce identical reset and
//! step sequences regardless of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use resetmon_core::analysis::{
    satisfaction_probability, scc_decompose, structural_params, theoretical_bounds,
    AnalysisError, StructuralParams, TheoreticalBounds,
};
use resetmon_core::{
    alpha0, build_product, Action, ConfigError, MarkovChain, Monitor, MonitorConfig, MonitorKind,
    ProductChain, ProductError, RabinAutomaton, Schedule, StateId, Tracker,
    Verdict as CandidateVerdict,
};

/// Monitor selection as it appears in configs and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonitorChoice {
    Cautious,
    Bold,
    BoldGeneral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleChoice {
    Linear,
    Exp,
}

/// Monitor parameters; defaults: `alpha = 1`, `epsilon = 0.5`, linear schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorSettings {
    pub monitor: MonitorChoice,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub schedule: Option<ScheduleChoice>,
}

impl MonitorSettings {
    pub fn cautious() -> Self {
        MonitorSettings { monitor: MonitorChoice::Cautious, alpha: None, epsilon: None, schedule: None }
    }

    pub fn bold(alpha: f64, epsilon: f64) -> Self {
        MonitorSettings {
            monitor: MonitorChoice::Bold,
            alpha: Some(alpha),
            epsilon: Some(epsilon),
            schedule: None,
        }
    }

    pub fn bold_general(epsilon: f64, schedule: ScheduleChoice) -> Self {
        MonitorSettings {
            monitor: MonitorChoice::BoldGeneral,
            alpha: None,
            epsilon: Some(epsilon),
            schedule: Some(schedule),
        }
    }

    pub fn to_config(&self) -> Result<MonitorConfig, ConfigError> {
        let epsilon = self.epsilon.unwrap_or(0.5);
        match self.monitor {
            MonitorChoice::Cautious => Ok(MonitorConfig::cautious()),
            MonitorChoice::Bold => MonitorConfig::bold_fixed(self.alpha.unwrap_or(1.0), epsilon),
            MonitorChoice::BoldGeneral => {
                let schedule = match self.schedule.unwrap_or(ScheduleChoice::Linear) {
                    ScheduleChoice::Linear => Schedule::Linear,
                    ScheduleChoice::Exp => Schedule::Exponential,
                };
                MonitorConfig::bold_general(epsilon, schedule)
            }
        }
    }
}

/// Full experiment configuration, echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Model reference (file path or `builtin:...`), echo only.
    pub model: String,
    /// Property reference (file path or `prop:...`), echo only.
    pub prop: String,
    pub monitor: MonitorSettings,
    pub trials: u64,
    pub seed: u64,
    pub max_steps: u64,
    /// Include per-trial wall times in emitted reports. Off by default so
    /// that identical configurations produce byte-identical files.
    #[serde(default)]
    pub emit_timing: bool,
}

impl RunConfig {
    pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;

    pub fn new(model: &str, prop: &str, monitor: MonitorSettings, trials: u64, seed: u64) -> Self {
        RunConfig {
            model: model.to_string(),
            prop: prop.to_string(),
            monitor,
            trials,
            seed,
            max_steps: Self::DEFAULT_MAX_STEPS,
            emit_timing: false,
        }
    }
}

/// How a trial ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The oracle confirmed the current candidate is a good BSCC.
    AcceptedGood,
    /// The step budget ran out first.
    Cutoff,
}

/// Steps of one sample (the segment between consecutive resets), split by
/// whether a candidate was defined after the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct SampleSteps {
    pub total: u64,
    pub no_candidate: u64,
    pub candidate: u64,
}

/// Per-trial record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trial: u64,
    pub resets: u64,
    /// Steps over all samples, including the final accepted one.
    pub total_steps: u64,
    /// Steps spent in aborted samples, i.e. up to the last reset.
    pub steps_to_last_reset: u64,
    pub samples: Vec<SampleSteps>,
    pub verdict: Verdict,
    pub final_candidate_size: u32,
    /// Average length of a restarted run; `None` when there was no reset.
    pub t_over_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_ms: Option<f64>,
}

/// Aggregates over all trials, recomputable from the per-trial rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub trials: u64,
    pub accepted_good: u64,
    pub cutoff: u64,
    pub mean_r: f64,
    pub var_r: f64,
    pub mean_t: f64,
    pub var_t: f64,
    /// Mean of per-trial `t_over_r` over trials with at least one reset.
    pub mean_t_over_r: Option<f64>,
    pub var_t_over_r: Option<f64>,
    /// Set when more than half of the trials hit the step budget.
    pub degenerate: bool,
}

/// Oracle facts and structural parameters echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleInfo {
    pub p_phi: f64,
    pub p_min: f64,
    pub mxsc: u32,
    pub product_states: u32,
    pub alpha0: f64,
}

/// Serializable mirror of the bound calculator output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsInfo {
    pub er_bound: f64,
    pub sample_cost_fixed: f64,
    pub et_bound_fixed: f64,
    pub et_bound_general: f64,
}

impl From<TheoreticalBounds> for BoundsInfo {
    fn from(b: TheoreticalBounds) -> Self {
        BoundsInfo {
            er_bound: b.er_bound,
            sample_cost_fixed: b.sample_cost_fixed,
            et_bound_fixed: b.et_bound_fixed,
            et_bound_general: b.et_bound_general,
        }
    }
}

/// Versioned experiment report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub config: RunConfig,
    pub oracle: OracleInfo,
    /// Bound-calculator output for the configured monitor parameters, when
    /// they satisfy the bound preconditions.
    pub bounds: Option<BoundsInfo>,
    pub trials: Vec<TrialStats>,
    pub aggregates: Aggregates,
}

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("product construction failed: {0}")]
    Product(#[from] ProductError),
    #[error("analysis failed: {0}")]
    Analysis(#[from] AnalysisError),
    #[error("internal protocol violation: {0}")]
    Internal(String),
}

/// Structural ground truth used for the termination rule.
struct BsccOracle {
    /// State -> bottom-component index, when the state lies in one.
    bscc_of: Vec<Option<u32>>,
    good: Vec<bool>,
    size: Vec<u32>,
}

impl BsccOracle {
    fn new(product: &ProductChain) -> Self {
        let dec = scc_decompose(product);
        let mut bscc_of = vec![None; product.n_states() as usize];
        let mut good = Vec::with_capacity(dec.components.len());
        let mut size = Vec::with_capacity(dec.components.len());
        for (i, comp) in dec.components.iter().enumerate() {
            let is_good = dec.is_bottom[i]
                && resetmon_core::classify_scc(comp, product) == CandidateVerdict::Good;
            good.push(is_good);
            size.push(comp.len() as u32);
            if dec.is_bottom[i] {
                for &s in comp {
                    bscc_of[s as usize] = Some(i as u32);
                }
            }
        }
        BsccOracle { bscc_of, good, size }
    }

    /// Is this candidate set exactly a good BSCC?
    fn is_good_bscc(&self, members: &[StateId]) -> bool {
        let Some(b) = self.bscc_of[members[0] as usize] else {
            return false;
        };
        self.good[b as usize]
            && self.size[b as usize] as usize == members.len()
            && members.iter().all(|&s| self.bscc_of[s as usize] == Some(b))
    }
}

fn sample_weighted(rng: &mut ChaCha8Rng, entries: &[(StateId, f64)]) -> StateId {
    let r: f64 = rng.random();
    let mut acc = 0.0;
    for &(s, p) in entries {
        acc += p;
        if r < acc {
            return s;
        }
    }
    entries.last().expect("nonempty distribution").0
}

/// Outcome of a single trial against a prebuilt product and oracle.
fn run_one_trial(
    product: &ProductChain,
    oracle: &BsccOracle,
    config: MonitorConfig,
    base_seed: u64,
    trial: u64,
    max_steps: u64,
) -> Result<TrialStats, RunError> {
    let start = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(trial);

    let mut tracker = Tracker::new(product);
    let mut monitor = Monitor::new(config);
    let mut samples: Vec<SampleSteps> = Vec::new();
    let mut cur = SampleSteps::default();
    let mut resets = 0u64;
    let mut total = 0u64;
    let mut checked_birthday: Option<u64> = None;

    let mut state = sample_weighted(&mut rng, product.initial());
    let (verdict, final_candidate_size) = loop {
        tracker
            .step(state)
            .map_err(|e| RunError::Internal(format!("tracker rejected a sampled edge: {e}")))?;
        total += 1;
        cur.total += 1;
        let obs = tracker.observation();
        if obs.defined {
            cur.candidate += 1;
        } else {
            cur.no_candidate += 1;
        }

        // Oracle termination: an accepted candidate never resets again.
        if obs.defined && obs.verdict == Some(CandidateVerdict::Good) && obs.strength >= 1 {
            let birthday = tracker.birthday();
            if checked_birthday != birthday {
                checked_birthday = birthday;
                let members = tracker.candidate().expect("defined candidate").members;
                if oracle.is_good_bscc(members) {
                    break (Verdict::AcceptedGood, members.len() as u32);
                }
            }
        }
        if total >= max_steps {
            let size = tracker.candidate().map(|c| c.members.len() as u32).unwrap_or(0);
            break (Verdict::Cutoff, size);
        }

        let mv = monitor
            .step(&obs)
            .map_err(|e| RunError::Internal(format!("monitor protocol violation: {e}")))?;
        if mv.action == Action::Reset {
            resets += 1;
            samples.push(cur);
            cur = SampleSteps::default();
            tracker.reset();
            checked_birthday = None;
            state = sample_weighted(&mut rng, product.initial());
        } else {
            state = sample_weighted(&mut rng, product.transitions(state));
        }
    };
    samples.push(cur);

    let steps_to_last_reset = total - cur.total;
    Ok(TrialStats {
        trial,
        resets,
        total_steps: total,
        steps_to_last_reset,
        samples,
        verdict,
        final_candidate_size,
        t_over_r: (resets > 0).then(|| steps_to_last_reset as f64 / resets as f64),
        wall_ms: Some(start.elapsed().as_secs_f64() * 1e3),
    })
}

pub fn aggregate(trials: &[TrialStats]) -> Aggregates {
    let rs: Vec<f64> = trials.iter().map(|t| t.resets as f64).collect();
    let ts: Vec<f64> = trials.iter().map(|t| t.total_steps as f64).collect();
    let ratios: Vec<f64> = trials.iter().filter_map(|t| t.t_over_r).collect();
    let cutoff = trials.iter().filter(|t| t.verdict == Verdict::Cutoff).count() as u64;
    Aggregates {
        trials: trials.len() as u64,
        accepted_good: trials.len() as u64 - cutoff,
        cutoff,
        mean_r: crate::stats::mean(&rs),
        var_r: crate::stats::variance(&rs),
        mean_t: crate::stats::mean(&ts),
        var_t: crate::stats::variance(&ts),
        mean_t_over_r: (!ratios.is_empty()).then(|| crate::stats::mean(&ratios)),
        var_t_over_r: (!ratios.is_empty()).then(|| crate::stats::variance(&ratios)),
        degenerate: 2 * cutoff > trials.len() as u64,
    }
}

/// Runs `config.trials` independent trials of the monitored product.
///
/// Identical `(model, property, config, seed)` produce identical per-trial
/// reset and step sequences; wall times are measured but only emitted when
/// `config.emit_timing` is set.
pub fn run_trials(
    chain: &MarkovChain,
    dra: &RabinAutomaton,
    config: &RunConfig,
) -> Result<ExperimentReport, RunError> {
    let product = build_product(chain, dra)?;
    run_trials_on_product(&product, config)
}

/// [`run_trials`] against a prebuilt product.
pub fn run_trials_on_product(
    product: &ProductChain,
    config: &RunConfig,
) -> Result<ExperimentReport, RunError> {
    let params: StructuralParams = structural_params(product);
    let p_phi = satisfaction_probability(product)?;
    let monitor_config = config.monitor.to_config()?;
    // A fixed boldness below the safe floor is a configuration error; the
    // warning case (unknown p_min) cannot arise here since the model is in
    // hand.
    monitor_config.check_alpha_floor(Some(params.p_min))?;

    let oracle = BsccOracle::new(product);
    let mut trials = Vec::with_capacity(config.trials as usize);
    for trial in 0..config.trials {
        trials.push(run_one_trial(
            product,
            &oracle,
            monitor_config,
            config.seed,
            trial,
            config.max_steps,
        )?);
    }

    let bounds = match monitor_config.kind {
        MonitorKind::Cautious => None,
        _ if p_phi == 0.0 => None,
        _ => theoretical_bounds(&params, p_phi, monitor_config.alpha, monitor_config.epsilon)
            .ok()
            .map(BoundsInfo::from),
    };

    let aggregates = aggregate(&trials);
    Ok(ExperimentReport {
        schema: REPORT_SCHEMA,
        config: config.clone(),
        oracle: OracleInfo {
            p_phi,
            p_min: params.p_min,
            mxsc: params.mxsc,
            product_states: params.n_states,
            alpha0: alpha0(params.p_min).map_err(RunError::Config)?,
        },
        bounds,
        trials,
        aggregates,
    })
}
