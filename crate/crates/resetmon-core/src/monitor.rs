//! Reset controllers: cautious, bold with fixed boldness, and bold with a
//! growing boldness schedule.
//!
//! All controllers are step-driven state machines over tracker
//! observations. The cautious controller resets as soon as the current
//! candidate is bad. The bold controllers tolerate a bad candidate until its
//! strength reaches `alpha * (i - log2 epsilon)` for the i-th candidate
//! since the last reset; the general variant replaces the fixed `alpha` by a
//! schedule value for the current sample. All logarithms are base 2.

use core::fmt;

use crate::product::Verdict;

/// Configuration errors for monitors and bound computations.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    EpsilonOutOfRange { epsilon: f64 },
    AlphaNonPositive { alpha: f64 },
    /// `alpha` is below the safe floor `alpha0(p_min)`.
    AlphaBelowFloor { alpha: f64, floor: f64 },
    PminOutOfRange { p_min: f64 },
    PhiOutOfRange { p_phi: f64 },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::EpsilonOutOfRange { epsilon } => {
                write!(f, "epsilon {epsilon} outside the open interval (0, 1)")
            }
            ConfigError::AlphaNonPositive { alpha } => write!(f, "alpha {alpha} must be positive"),
            ConfigError::AlphaBelowFloor { alpha, floor } => {
                write!(f, "alpha {alpha} below the safe floor alpha0 = {floor}")
            }
            ConfigError::PminOutOfRange { p_min } => {
                write!(f, "p_min {p_min} outside the half-open interval (0, 1]")
            }
            ConfigError::PhiOutOfRange { p_phi } => {
                write!(f, "p_phi {p_phi} outside the half-open interval (0, 1]")
            }
        }
    }
}

impl core::error::Error for ConfigError {}

/// Protocol errors raised by [`Monitor::step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolError {
    /// An observation carried a defined candidate with index 0.
    DefinedWithZeroIndex,
}

impl fmt::Display for ProtocolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolError::DefinedWithZeroIndex => {
                write!(f, "defined candidate observed with index 0")
            }
        }
    }
}

impl core::error::Error for ProtocolError {}

/// Non-fatal configuration advisories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigWarning {
    /// A fixed boldness was configured without a known `p_min`; the
    /// `alpha >= alpha0` floor could not be checked.
    AlphaFloorUnchecked,
}

impl fmt::Display for ConfigWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigWarning::AlphaFloorUnchecked => {
                write!(f, "p_min unknown: cannot check alpha against the safe floor alpha0")
            }
        }
    }
}

/// Minimal safe boldness for a chain with smallest transition probability
/// `p_min`: `max(1, -1 / log2(1 - p_min))`. For `p_min = 1` the second term
/// vanishes and the floor is 1.
pub fn alpha0(p_min: f64) -> Result<f64, ConfigError> {
    if p_min.is_nan() || p_min <= 0.0 || p_min > 1.0 {
        return Err(ConfigError::PminOutOfRange { p_min });
    }
    if p_min == 1.0 {
        return Ok(1.0);
    }
    let term = -1.0 / libm::log2(1.0 - p_min);
    Ok(if term > 1.0 { term } else { 1.0 })
}

/// Reset threshold for the i-th candidate: `alpha * (i - log2 epsilon)`.
pub fn threshold(i: u32, alpha: f64, epsilon: f64) -> f64 {
    alpha * (i as f64 - libm::log2(epsilon))
}

/// Boldness schedule for the general controller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// `alpha_j = j`.
    Linear,
    /// `alpha_j = 2^j`.
    Exponential,
}

/// Schedule value for the 1-based sample number `j`.
pub fn schedule_alpha(schedule: Schedule, j: u32) -> f64 {
    debug_assert!(j >= 1, "sample numbers are 1-based");
    match schedule {
        Schedule::Linear => j as f64,
        Schedule::Exponential => libm::exp2(j as f64),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorKind {
    Cautious,
    BoldFixed,
    BoldGeneral,
}

/// Validated monitor parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorConfig {
    pub kind: MonitorKind,
    /// Fixed boldness (BoldFixed only).
    pub alpha: f64,
    /// Failure budget for good runs (bold variants).
    pub epsilon: f64,
    /// Boldness schedule (BoldGeneral only).
    pub schedule: Schedule,
}

impl MonitorConfig {
    pub fn cautious() -> Self {
        MonitorConfig { kind: MonitorKind::Cautious, alpha: 1.0, epsilon: 0.5, schedule: Schedule::Linear }
    }

    pub fn bold_fixed(alpha: f64, epsilon: f64) -> Result<Self, ConfigError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(ConfigError::EpsilonOutOfRange { epsilon });
        }
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(ConfigError::AlphaNonPositive { alpha });
        }
        Ok(MonitorConfig { kind: MonitorKind::BoldFixed, alpha, epsilon, schedule: Schedule::Linear })
    }

    pub fn bold_general(epsilon: f64, schedule: Schedule) -> Result<Self, ConfigError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(ConfigError::EpsilonOutOfRange { epsilon });
        }
        Ok(MonitorConfig { kind: MonitorKind::BoldGeneral, alpha: 1.0, epsilon, schedule })
    }

    /// Checks `alpha` against the safe floor when `p_min` is known; warns
    /// instead of failing when it is not.
    pub fn check_alpha_floor(
        &self,
        p_min: Option<f64>,
    ) -> Result<Option<ConfigWarning>, ConfigError> {
        if self.kind != MonitorKind::BoldFixed {
            return Ok(None);
        }
        match p_min {
            None => Ok(Some(ConfigWarning::AlphaFloorUnchecked)),
            Some(p) => {
                let floor = alpha0(p)?;
                if self.alpha < floor {
                    Err(ConfigError::AlphaBelowFloor { alpha: self.alpha, floor })
                } else {
                    Ok(None)
                }
            }
        }
    }
}

/// A tracker snapshot handed to the monitor after each extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observation {
    pub defined: bool,
    pub verdict: Option<Verdict>,
    /// 1-based candidate ordinal since the last reset (last born).
    pub index: u32,
    pub strength: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Continue,
    Reset,
}

/// Decision record for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorVerdict {
    pub action: Action,
    pub candidate_index: u32,
    pub strength: u32,
    /// Strength threshold in force, for the bold controllers on a defined
    /// candidate; `None` otherwise.
    pub threshold: Option<f64>,
}

/// Step-driven reset controller.
///
/// Single-owner mutable, paired 1:1 with a tracker. The sample counter `j`
/// survives resets; everything else about the path lives in the tracker.
#[derive(Debug, Clone)]
pub struct Monitor {
    config: MonitorConfig,
    sample: u32,
}

impl Monitor {
    pub fn new(config: MonitorConfig) -> Self {
        Monitor { config, sample: 1 }
    }

    pub fn config(&self) -> &MonitorConfig {
        &self.config
    }

    /// 1-based number of the sample currently being monitored.
    pub fn sample_index(&self) -> u32 {
        self.sample
    }

    /// Decides on one observation; bumps the sample counter on a reset.
    pub fn step(&mut self, obs: &Observation) -> Result<MonitorVerdict, ProtocolError> {
        if obs.defined && obs.index == 0 {
            return Err(ProtocolError::DefinedWithZeroIndex);
        }
        let bad = obs.defined && obs.verdict == Some(Verdict::Bad);
        let (reset, thr) = match self.config.kind {
            MonitorKind::Cautious => (bad, None),
            MonitorKind::BoldFixed => {
                let thr = obs.defined.then(|| threshold(obs.index, self.config.alpha, self.config.epsilon));
                (bad && obs.strength as f64 >= thr.unwrap_or(f64::INFINITY), thr)
            }
            MonitorKind::BoldGeneral => {
                let alpha_j = schedule_alpha(self.config.schedule, self.sample);
                let thr = obs.defined.then(|| threshold(obs.index, alpha_j, self.config.epsilon));
                (bad && obs.strength as f64 >= thr.unwrap_or(f64::INFINITY), thr)
            }
        };
        if reset {
            self.sample += 1;
        }
        Ok(MonitorVerdict {
            action: if reset { Action::Reset } else { Action::Continue },
            candidate_index: obs.index,
            strength: obs.strength,
            threshold: thr,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(verdict: Verdict, index: u32, strength: u32) -> Observation {
        Observation { defined: true, verdict: Some(verdict), index, strength }
    }

    const UNDEFINED: Observation = Observation { defined: false, verdict: None, index: 0, strength: 0 };

    #[test]
    fn alpha0_examples() {
        assert_eq!(alpha0(0.5).unwrap(), 1.0);
        assert_eq!(alpha0(0.75).unwrap(), 1.0); // second term 0.5, floor 1
        assert!((alpha0(0.1).unwrap() - 6.5788).abs() < 1e-3);
        assert_eq!(alpha0(1.0).unwrap(), 1.0);
        assert!(alpha0(0.0).is_err());
        assert!(alpha0(1.5).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold(1, 1.0, 0.5), 2.0);
        assert_eq!(threshold(3, 2.0, 0.5), 8.0);
        assert_eq!(threshold(1, 1.0, 0.25), 3.0);
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(schedule_alpha(Schedule::Linear, 1), 1.0);
        assert_eq!(schedule_alpha(Schedule::Linear, 7), 7.0);
        assert_eq!(schedule_alpha(Schedule::Exponential, 4), 16.0);
    }

    #[test]
    fn cautious_resets_on_any_bad_candidate() {
        let mut m = Monitor::new(MonitorConfig::cautious());
        let v = m.step(&obs(Verdict::Bad, 1, 0)).unwrap();
        assert_eq!(v.action, Action::Reset);
        assert_eq!(v.threshold, None);
    }

    #[test]
    fn bold_fixed_waits_for_the_threshold() {
        let cfg = MonitorConfig::bold_fixed(1.0, 0.5).unwrap();
        let mut m = Monitor::new(cfg);
        // i = 1, threshold 2: strength 1 continues, strength 2 resets.
        assert_eq!(m.step(&obs(Verdict::Bad, 1, 1)).unwrap().action, Action::Continue);
        let v = m.step(&obs(Verdict::Bad, 1, 2)).unwrap();
        assert_eq!(v.action, Action::Reset);
        assert_eq!(v.threshold, Some(2.0));
    }

    #[test]
    fn good_candidates_never_reset() {
        for cfg in [
            MonitorConfig::cautious(),
            MonitorConfig::bold_fixed(1.0, 0.5).unwrap(),
            MonitorConfig::bold_general(0.5, Schedule::Linear).unwrap(),
        ] {
            let mut m = Monitor::new(cfg);
            assert_eq!(m.step(&obs(Verdict::Good, 1, 1000)).unwrap().action, Action::Continue);
            assert_eq!(m.step(&UNDEFINED).unwrap().action, Action::Continue);
        }
    }

    #[test]
    fn bold_general_raises_alpha_per_sample() {
        let cfg = MonitorConfig::bold_general(0.5, Schedule::Linear).unwrap();
        let mut m = Monitor::new(cfg);
        // Sample 1: alpha_1 = 1, threshold(1) = 2 -> reset at strength 2.
        assert_eq!(m.step(&obs(Verdict::Bad, 1, 2)).unwrap().action, Action::Reset);
        assert_eq!(m.sample_index(), 2);
        // Sample 2: alpha_2 = 2, threshold(1) = 4 -> strength 2 continues.
        assert_eq!(m.step(&obs(Verdict::Bad, 1, 2)).unwrap().action, Action::Continue);
        assert_eq!(m.step(&obs(Verdict::Bad, 1, 4)).unwrap().action, Action::Reset);
    }

    #[test]
    fn zero_index_with_defined_candidate_is_a_protocol_error() {
        let mut m = Monitor::new(MonitorConfig::cautious());
        let bad = Observation { defined: true, verdict: Some(Verdict::Bad), index: 0, strength: 0 };
        assert_eq!(m.step(&bad).unwrap_err(), ProtocolError::DefinedWithZeroIndex);
    }

    #[test]
    fn config_validation() {
        assert!(MonitorConfig::bold_fixed(1.0, 0.0).is_err());
        assert!(MonitorConfig::bold_fixed(1.0, 1.0).is_err());
        assert!(MonitorConfig::bold_fixed(0.0, 0.5).is_err());
        assert!(MonitorConfig::bold_general(0.5, Schedule::Exponential).is_ok());

        let cfg = MonitorConfig::bold_fixed(1.0, 0.5).unwrap();
        assert_eq!(cfg.check_alpha_floor(Some(0.5)), Ok(None));
        assert_eq!(cfg.check_alpha_floor(None), Ok(Some(ConfigWarning::AlphaFloorUnchecked)));
        // alpha0(0.1) ~ 6.58 > 1.
        assert!(matches!(
            cfg.check_alpha_floor(Some(0.1)),
            Err(ConfigError::AlphaBelowFloor { .. })
        ));
    }
}
