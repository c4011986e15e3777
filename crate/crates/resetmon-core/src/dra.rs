//! Deterministic Rabin automata over sets of atomic propositions.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::chain::StateId;

/// A Rabin acceptance pair `(E, F)`.
///
/// A run is accepted iff for some pair the `E`-states are visited finitely
/// often and the `F`-states infinitely often.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RabinPair {
    pub e: Vec<StateId>,
    pub f: Vec<StateId>,
}

/// Errors raised while assembling an automaton.
#[derive(Debug, Clone, PartialEq)]
pub enum AutomatonError {
    /// Transition table length does not match `n_states * 2^|ap|`.
    IncompleteDelta { expected: usize, got: usize },
    /// A state id exceeds the declared state count.
    StateOutOfRange { state: StateId, n_states: u32 },
    TooManyPropositions { count: usize },
    TooManyPairs { count: usize },
    EmptyAutomaton,
}

impl fmt::Display for AutomatonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AutomatonError::IncompleteDelta { expected, got } => {
                write!(f, "transition table has {got} entries, expected {expected}")
            }
            AutomatonError::StateOutOfRange { state, n_states } => {
                write!(f, "state id {state} out of range (automaton has {n_states} states)")
            }
            AutomatonError::TooManyPropositions { count } => {
                write!(f, "{count} atomic propositions declared, at most 16 supported")
            }
            AutomatonError::TooManyPairs { count } => {
                write!(f, "{count} Rabin pairs declared, at most 32 supported")
            }
            AutomatonError::EmptyAutomaton => write!(f, "automaton has no states"),
        }
    }
}

impl core::error::Error for AutomatonError {}

/// A deterministic Rabin automaton with a total transition function.
///
/// The alphabet is `2^ap`; a letter is the bitmask of propositions that hold,
/// using the ordering of `ap`. The transition table is dense, so the
/// automaton is deterministic and total by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RabinAutomaton {
    n_states: u32,
    ap: Vec<String>,
    initial: StateId,
    /// Row-major table: `delta[state * 2^|ap| + letter]`.
    delta: Vec<StateId>,
    pairs: Vec<RabinPair>,
}

impl RabinAutomaton {
    pub fn new(
        ap: Vec<String>,
        n_states: u32,
        initial: StateId,
        delta: Vec<StateId>,
        pairs: Vec<RabinPair>,
    ) -> Result<Self, AutomatonError> {
        if n_states == 0 {
            return Err(AutomatonError::EmptyAutomaton);
        }
        if ap.len() > 16 {
            return Err(AutomatonError::TooManyPropositions { count: ap.len() });
        }
        if pairs.len() > 32 {
            return Err(AutomatonError::TooManyPairs { count: pairs.len() });
        }
        let n_letters = 1usize << ap.len();
        let expected = n_states as usize * n_letters;
        if delta.len() != expected {
            return Err(AutomatonError::IncompleteDelta { expected, got: delta.len() });
        }
        for &q in delta.iter().chain(core::iter::once(&initial)) {
            if q >= n_states {
                return Err(AutomatonError::StateOutOfRange { state: q, n_states });
            }
        }
        for pair in &pairs {
            for &q in pair.e.iter().chain(pair.f.iter()) {
                if q >= n_states {
                    return Err(AutomatonError::StateOutOfRange { state: q, n_states });
                }
            }
        }
        Ok(RabinAutomaton { n_states, ap, initial, delta, pairs })
    }

    pub fn n_states(&self) -> u32 {
        self.n_states
    }

    pub fn ap(&self) -> &[String] {
        &self.ap
    }

    pub fn n_letters(&self) -> u32 {
        1u32 << self.ap.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn pairs(&self) -> &[RabinPair] {
        &self.pairs
    }

    /// Successor of `q` when reading the label bitmask `letter`.
    pub fn step(&self, q: StateId, letter: u32) -> StateId {
        self.delta[q as usize * self.n_letters() as usize + letter as usize]
    }

    /// Runs the automaton over a label sequence starting from the initial state.
    pub fn run<I: IntoIterator<Item = u32>>(&self, letters: I) -> StateId {
        letters.into_iter().fold(self.initial, |q, l| self.step(q, l))
    }
}
