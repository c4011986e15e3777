//! Finite labelled Markov chains with sparse transition structure.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Absolute tolerance used when validating probability sums.
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// Dense state identifier, shared by chains, automata and products.
pub type StateId = u32;

/// Validation errors raised while assembling a model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// Outgoing probabilities of `state` sum to `sum` instead of 1.
    RowSum { state: StateId, sum: f64 },
    /// A listed transition probability is not strictly positive.
    NonPositiveProbability {
        state: StateId,
        target: StateId,
        prob: f64,
    },
    /// The initial distribution sums to `sum` instead of 1.
    InitialSum { sum: f64 },
    /// A state id exceeds the declared state count.
    StateOutOfRange { state: StateId, n_states: u32 },
    /// The same (source, target) transition is listed twice.
    DuplicateTransition { state: StateId, target: StateId },
    /// A state has no outgoing transitions.
    NoTransitions { state: StateId },
    /// More atomic propositions than the label bitmask supports.
    TooManyPropositions { count: usize },
    /// A chain needs at least one state.
    EmptyChain,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::RowSum { state, sum } => {
                write!(f, "outgoing probabilities of state {state} sum to {sum}, expected 1")
            }
            ModelError::NonPositiveProbability { state, target, prob } => {
                write!(f, "transition {state} -> {target} has non-positive probability {prob}")
            }
            ModelError::InitialSum { sum } => {
                write!(f, "initial distribution sums to {sum}, expected 1")
            }
            ModelError::StateOutOfRange { state, n_states } => {
                write!(f, "state id {state} out of range (chain has {n_states} states)")
            }
            ModelError::DuplicateTransition { state, target } => {
                write!(f, "duplicate transition {state} -> {target}")
            }
            ModelError::NoTransitions { state } => {
                write!(f, "state {state} has no outgoing transitions")
            }
            ModelError::TooManyPropositions { count } => {
                write!(f, "{count} atomic propositions declared, at most 32 supported")
            }
            ModelError::EmptyChain => write!(f, "chain has no states"),
        }
    }
}

impl core::error::Error for ModelError {}

/// A finite labelled Markov chain.
///
/// States are dense `0..n` ids. Transitions are stored as per-state sparse
/// successor lists; every listed probability is strictly positive and each
/// row sums to 1 within [`PROB_SUM_TOLERANCE`]. Labels are bitmasks over the
/// ordered atomic-proposition list `ap`.
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    n_states: u32,
    transitions: Vec<Vec<(StateId, f64)>>,
    initial: Vec<(StateId, f64)>,
    labels: Vec<u32>,
    ap: Vec<String>,
}

impl MarkovChain {
    /// Builds and validates a chain.
    ///
    /// `transitions[s]` lists `(successor, probability)` pairs, `initial` is a
    /// sparse distribution, `labels[s]` is a bitmask over `ap`.
    pub fn new(
        transitions: Vec<Vec<(StateId, f64)>>,
        initial: Vec<(StateId, f64)>,
        labels: Vec<u32>,
        ap: Vec<String>,
    ) -> Result<Self, ModelError> {
        let n = transitions.len();
        if n == 0 {
            return Err(ModelError::EmptyChain);
        }
        if ap.len() > 32 {
            return Err(ModelError::TooManyPropositions { count: ap.len() });
        }
        assert_eq!(labels.len(), n, "one label bitmask per state");
        let n_states = n as u32;

        for (s, row) in transitions.iter().enumerate() {
            let s = s as StateId;
            if row.is_empty() {
                return Err(ModelError::NoTransitions { state: s });
            }
            let mut sum = 0.0;
            for &(t, p) in row {
                if t >= n_states {
                    return Err(ModelError::StateOutOfRange { state: t, n_states });
                }
                if p.is_nan() || p <= 0.0 {
                    return Err(ModelError::NonPositiveProbability { state: s, target: t, prob: p });
                }
                if row.iter().filter(|&&(t2, _)| t2 == t).count() > 1 {
                    return Err(ModelError::DuplicateTransition { state: s, target: t });
                }
                sum += p;
            }
            if libm::fabs(sum - 1.0) > PROB_SUM_TOLERANCE {
                return Err(ModelError::RowSum { state: s, sum });
            }
        }

        let mut init_sum = 0.0;
        for &(s, p) in &initial {
            if s >= n_states {
                return Err(ModelError::StateOutOfRange { state: s, n_states });
            }
            if p.is_nan() || p <= 0.0 {
                return Err(ModelError::NonPositiveProbability { state: s, target: s, prob: p });
            }
            init_sum += p;
        }
        if libm::fabs(init_sum - 1.0) > PROB_SUM_TOLERANCE {
            return Err(ModelError::InitialSum { sum: init_sum });
        }

        Ok(MarkovChain { n_states, transitions, initial, labels, ap })
    }

    pub fn n_states(&self) -> u32 {
        self.n_states
    }

    pub fn transitions(&self, s: StateId) -> &[(StateId, f64)] {
        &self.transitions[s as usize]
    }

    /// Sparse initial distribution, in the order given at construction.
    pub fn initial(&self) -> &[(StateId, f64)] {
        &self.initial
    }

    /// Label bitmask of `s` over the proposition ordering of [`Self::ap`].
    pub fn label(&self, s: StateId) -> u32 {
        self.labels[s as usize]
    }

    /// Ordered atomic-proposition names.
    pub fn ap(&self) -> &[String] {
        &self.ap
    }

    /// Smallest positive transition probability of the chain.
    pub fn p_min(&self) -> f64 {
        let mut min = f64::INFINITY;
        for row in &self.transitions {
            for &(_, p) in row {
                if p < min {
                    min = p;
                }
            }
        }
        min
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn ap_p() -> Vec<String> {
        vec!["p".to_string()]
    }

    #[test]
    fn single_absorbing_state() {
        let c = MarkovChain::new(vec![vec![(0, 1.0)]], vec![(0, 1.0)], vec![0], ap_p()).unwrap();
        assert_eq!(c.n_states(), 1);
        assert_eq!(c.p_min(), 1.0);
    }

    #[test]
    fn p_min_scans_all_rows() {
        let c = MarkovChain::new(
            vec![vec![(0, 0.1), (1, 0.9)], vec![(1, 1.0)]],
            vec![(0, 1.0)],
            vec![0, 1],
            ap_p(),
        )
        .unwrap();
        assert_eq!(c.p_min(), 0.1);
    }

    #[test]
    fn row_sum_is_validated() {
        let err = MarkovChain::new(
            vec![vec![(0, 0.5), (1, 0.4)], vec![(1, 1.0)]],
            vec![(0, 1.0)],
            vec![0, 0],
            ap_p(),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::RowSum { state: 0, .. }));
    }

    #[test]
    fn zero_probability_rejected() {
        let err = MarkovChain::new(
            vec![vec![(0, 0.0), (0, 1.0)]],
            vec![(0, 1.0)],
            vec![0],
            ap_p(),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::NonPositiveProbability { .. }));
    }

    #[test]
    fn duplicate_transition_rejected() {
        let err = MarkovChain::new(
            vec![vec![(0, 0.5), (0, 0.5)]],
            vec![(0, 1.0)],
            vec![0],
            ap_p(),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::DuplicateTransition { state: 0, target: 0 }));
    }

    #[test]
    fn initial_sum_validated() {
        let err = MarkovChain::new(
            vec![vec![(0, 1.0)]],
            vec![(0, 0.5)],
            vec![0],
            ap_p(),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::InitialSum { .. }));
    }

    #[test]
    fn row_sum_tolerates_decimal_palettes() {
        // 0.1 + 0.9 rounds to exactly 1.0; ten 0.1 entries do not, but stay
        // within the 1e-9 validation tolerance.
        let row: Vec<(StateId, f64)> = (0..10).map(|t| (t, 0.1)).collect();
        let rows: Vec<_> = (0..10).map(|_| row.clone()).collect();
        let c = MarkovChain::new(rows, vec![(0, 1.0)], vec![0; 10], ap_p()).unwrap();
        assert_eq!(c.p_min(), 0.1);
    }
}
