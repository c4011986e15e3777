//! Built-in benchmark families, seeded random chains, and hand-built
//! automata for the standard one-proposition properties.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{MarkovChain, StateId};
use crate::dra::{RabinAutomaton, RabinPair};

/// Default dyadic probability palette for random chains.
///
/// Dyadic entries make row sums exact in binary floating point, which keeps
/// tolerance noise out of differential tests.
pub const DEFAULT_PALETTE: &[f64] = &[0.5, 0.25];

/// Errors raised by the random-chain generator.
#[derive(Debug, Clone, PartialEq)]
pub enum GenError {
    /// Palette entries must lie in (0, 1].
    InvalidPalette { value: f64 },
    /// No combination of palette entries sums to 1.
    PaletteUnsatisfiable,
    /// Size parameter must be at least 1.
    InvalidSize,
    /// The Random family needs a seed.
    MissingSeed,
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::InvalidPalette { value } => {
                write!(f, "palette entry {value} outside (0, 1]")
            }
            GenError::PaletteUnsatisfiable => {
                write!(f, "palette entries cannot be combined into rows summing to 1")
            }
            GenError::InvalidSize => write!(f, "family size parameter must be >= 1"),
            GenError::MissingSeed => write!(f, "random family requires a seed"),
        }
    }
}

impl core::error::Error for GenError {}

/// A benchmark-family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Fig1,
    Fig2,
    Random,
}

/// Parameters of a generated model.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub n: u32,
    pub seed: Option<u64>,
    pub prob_palette: Option<Vec<f64>>,
}

impl FamilySpec {
    pub fn generate(&self) -> Result<MarkovChain, GenError> {
        if self.n < 1 {
            return Err(GenError::InvalidSize);
        }
        match self.family {
            Family::Fig1 => Ok(gen_fig1(self.n)),
            Family::Fig2 => Ok(gen_fig2(self.n)),
            Family::Random => {
                let seed = self.seed.ok_or(GenError::MissingSeed)?;
                let palette = self.prob_palette.as_deref().unwrap_or(DEFAULT_PALETTE);
                gen_random(self.n, seed, palette)
            }
        }
    }
}

/// Ladder chain: `s_0 .. s_n` climb forward or fall back to `s_0`, then
/// `s_n` splits evenly between two absorbing states; only the good one is
/// labelled `p`.
///
/// State ids: `s_i = i`, `s_good = n + 1`, `s_bad = n + 2`.
pub fn gen_fig1(n: u32) -> MarkovChain {
    assert!(n >= 1, "family size parameter must be >= 1");
    let good = n + 1;
    let bad = n + 2;
    let mut transitions: Vec<Vec<(StateId, f64)>> = Vec::with_capacity(n as usize + 3);
    transitions.push(vec![(0, 0.5), (1, 0.5)]);
    for i in 1..n {
        transitions.push(vec![(0, 0.5), (i + 1, 0.5)]);
    }
    transitions.push(vec![(good, 0.5), (bad, 0.5)]); // s_n
    transitions.push(vec![(good, 1.0)]);
    transitions.push(vec![(bad, 1.0)]);
    let mut labels = vec![0u32; n as usize + 3];
    labels[good as usize] = 1;
    MarkovChain::new(transitions, vec![(0, 1.0)], labels, vec!["p".to_string()])
        .expect("fig1 construction is valid")
}

/// Self-loop line: each of `s_0 .. s_{n-1}` loops with probability 1/2 or
/// moves forward, ending in an absorbing `p`-labelled state.
///
/// State ids: `s_i = i`, `s_good = n`.
pub fn gen_fig2(n: u32) -> MarkovChain {
    assert!(n >= 1, "family size parameter must be >= 1");
    let good = n;
    let mut transitions: Vec<Vec<(StateId, f64)>> = Vec::with_capacity(n as usize + 1);
    for i in 0..n {
        transitions.push(vec![(i, 0.5), (i + 1, 0.5)]);
    }
    transitions.push(vec![(good, 1.0)]);
    let mut labels = vec![0u32; n as usize + 1];
    labels[good as usize] = 1;
    MarkovChain::new(transitions, vec![(0, 1.0)], labels, vec!["p".to_string()])
        .expect("fig2 construction is valid")
}

/// Seeded random chain over one proposition.
///
/// Every state gets between one and four distinct successors; each row's
/// probabilities are drawn from `palette` so that they sum exactly to 1.
/// States are labelled `p` with probability 1/2. The initial distribution is
/// concentrated on state 0. Identical `(n, seed, palette)` always produce
/// the identical chain.
pub fn gen_random(n: u32, seed: u64, palette: &[f64]) -> Result<MarkovChain, GenError> {
    if n < 1 {
        return Err(GenError::InvalidSize);
    }
    for &p in palette {
        if !(p > 0.0 && p <= 1.0) {
            return Err(GenError::InvalidPalette { value: p });
        }
    }
    let min_entry = palette.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut transitions: Vec<Vec<(StateId, f64)>> = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let probs = draw_row(&mut rng, palette, min_entry)?;
        let mut targets: Vec<StateId> = Vec::with_capacity(probs.len());
        while targets.len() < probs.len() {
            let t = rng.random_range(0..n);
            if !targets.contains(&t) {
                targets.push(t);
            }
            if targets.len() as u32 == n {
                break;
            }
        }
        // Fewer distinct targets than palette entries (tiny n): collapse the
        // row onto the available targets by re-drawing with a shorter row.
        let row: Vec<(StateId, f64)> = if targets.len() == probs.len() {
            targets.into_iter().zip(probs).collect()
        } else {
            vec![(targets[0], 1.0)]
        };
        transitions.push(row);
    }

    let labels: Vec<u32> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { 0 }).collect();
    MarkovChain::new(transitions, vec![(0, 1.0)], labels, vec!["p".to_string()])
        .map_err(|_| GenError::PaletteUnsatisfiable)
}

/// Draws a row of palette probabilities summing exactly to 1.
fn draw_row(rng: &mut ChaCha8Rng, palette: &[f64], min_entry: f64) -> Result<Vec<f64>, GenError> {
    const EPS: f64 = 1e-12;
    'attempt: for _ in 0..64 {
        let mut row = Vec::new();
        let mut remaining = 1.0;
        while remaining > EPS {
            if row.len() >= 4 {
                continue 'attempt;
            }
            // A palette entry is admissible if it finishes the row exactly or
            // leaves room for at least the smallest entry.
            let choices: Vec<f64> = palette
                .iter()
                .cloned()
                .filter(|&p| {
                    let rest = remaining - p;
                    libm::fabs(rest) <= EPS || rest >= min_entry - EPS
                })
                .collect();
            if choices.is_empty() {
                continue 'attempt;
            }
            let p = choices[rng.random_range(0..choices.len())];
            row.push(p);
            remaining -= p;
        }
        return Ok(row);
    }
    Err(GenError::PaletteUnsatisfiable)
}

/// The built-in one-proposition properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinProperty {
    /// Eventually `p`.
    Fp,
    /// Always `p`.
    Gp,
    /// Infinitely often `p`.
    GFp,
    /// Eventually always `p`.
    FGp,
    /// Infinitely often `p` implies eventually always `p`.
    GFimpliesFG,
}

impl BuiltinProperty {
    pub const ALL: [BuiltinProperty; 5] = [
        BuiltinProperty::Fp,
        BuiltinProperty::Gp,
        BuiltinProperty::GFp,
        BuiltinProperty::FGp,
        BuiltinProperty::GFimpliesFG,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinProperty::Fp => "Fp",
            BuiltinProperty::Gp => "Gp",
            BuiltinProperty::GFp => "GFp",
            BuiltinProperty::FGp => "FGp",
            BuiltinProperty::GFimpliesFG => "GFimpliesFG",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().find(|p| p.name() == name).copied()
    }
}

/// Hand-built deterministic Rabin automaton for a built-in property, over
/// the single proposition `p`.
///
/// Letters: 0 = {} and 1 = {p}. Each automaton is verified against the
/// property semantics by an exhaustive ultimately-periodic-word oracle in the
/// test suite.
pub fn builtin_dra(prop: BuiltinProperty) -> RabinAutomaton {
    let ap = vec!["p".to_string()];
    match prop {
        // q0 waits for p, q1 is the accepting sink.
        BuiltinProperty::Fp => RabinAutomaton::new(
            ap,
            2,
            0,
            vec![0, 1, 1, 1],
            vec![RabinPair { e: vec![], f: vec![1] }],
        ),
        // q0 while p has always held, q1 once violated (sink).
        BuiltinProperty::Gp => RabinAutomaton::new(
            ap,
            2,
            0,
            vec![1, 0, 1, 1],
            vec![RabinPair { e: vec![1], f: vec![0] }],
        ),
        // q0 after reading {}, q1 after reading {p}: visit q1 infinitely often.
        BuiltinProperty::GFp => RabinAutomaton::new(
            ap,
            2,
            0,
            vec![0, 1, 0, 1],
            vec![RabinPair { e: vec![], f: vec![1] }],
        ),
        // Same letter tracker; additionally leave q0 behind for good.
        BuiltinProperty::FGp => RabinAutomaton::new(
            ap,
            2,
            0,
            vec![0, 1, 0, 1],
            vec![RabinPair { e: vec![0], f: vec![1] }],
        ),
        // Letter tracker with a separate start state; accepted iff the
        // letters stabilize, i.e. FG !p or FG p.
        BuiltinProperty::GFimpliesFG => RabinAutomaton::new(
            ap,
            3,
            0,
            vec![1, 2, 1, 2, 1, 2],
            vec![
                RabinPair { e: vec![2], f: vec![1] },
                RabinPair { e: vec![1], f: vec![2] },
            ],
        ),
    }
    .expect("builtin automata are valid")
}
