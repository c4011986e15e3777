//! Synchronized chain-automaton product: the space all monitors observe.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::chain::{MarkovChain, StateId};
use crate::dra::RabinAutomaton;

/// Goodness of a candidate or SCC with respect to the lifted Rabin pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Good,
    Bad,
}

/// Errors raised while building a product.
#[derive(Debug, Clone, PartialEq)]
pub enum ProductError {
    /// Chain and automaton disagree on the proposition set; carries the
    /// symmetric difference of the two name sets.
    ApMismatch { missing_in_dra: Vec<String>, missing_in_chain: Vec<String> },
    /// No chain state has positive initial probability.
    NoInitialStates,
}

impl fmt::Display for ProductError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductError::ApMismatch { missing_in_dra, missing_in_chain } => {
                write!(
                    f,
                    "atomic propositions differ: missing in automaton {missing_in_dra:?}, missing in chain {missing_in_chain:?}"
                )
            }
            ProductError::NoInitialStates => write!(f, "product has no initial states"),
        }
    }
}

impl core::error::Error for ProductError {}

/// The reachable fragment of a chain-automaton product.
///
/// Product states are interned to dense ids in BFS discovery order from the
/// initial states. Transition probabilities are copied exactly from the
/// chain. The Rabin pairs are lifted to per-state membership bitmasks: bit
/// `k` of `e_mask(s)` is set iff the automaton component of `s` lies in the
/// `E`-set of pair `k`.
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone)]
pub struct ProductChain {
    states: Vec<(StateId, StateId)>,
    transitions: Vec<Vec<(StateId, f64)>>,
    initial: Vec<(StateId, f64)>,
    n_pairs: u32,
    e_mask: Vec<u32>,
    f_mask: Vec<u32>,
}

impl ProductChain {
    /// Number of reachable product states.
    pub fn n_states(&self) -> u32 {
        self.states.len() as u32
    }

    /// The (chain state, automaton state) pair interned as product id `s`.
    pub fn state_pair(&self, s: StateId) -> (StateId, StateId) {
        self.states[s as usize]
    }

    pub fn transitions(&self, s: StateId) -> &[(StateId, f64)] {
        &self.transitions[s as usize]
    }

    pub fn initial(&self) -> &[(StateId, f64)] {
        &self.initial
    }

    pub fn n_pairs(&self) -> u32 {
        self.n_pairs
    }

    pub fn e_mask(&self, s: StateId) -> u32 {
        self.e_mask[s as usize]
    }

    pub fn f_mask(&self, s: StateId) -> u32 {
        self.f_mask[s as usize]
    }

    /// Smallest positive transition probability of the product.
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

    /// Classifies a set of product states against the lifted Rabin pairs.
    ///
    /// Good iff some pair `(E, F)` has no member in `E` and a member in `F`.
    pub fn classify(&self, members: &[StateId]) -> Verdict {
        classify_scc(members, self)
    }
}

/// Classifies a nonempty product-state set against the lifted Rabin pairs.
pub fn classify_scc(members: &[StateId], product: &ProductChain) -> Verdict {
    debug_assert!(!members.is_empty());
    let mut e_or = 0u32;
    let mut f_or = 0u32;
    for &s in members {
        e_or |= product.e_mask(s);
        f_or |= product.f_mask(s);
    }
    if !e_or & f_or != 0 {
        Verdict::Good
    } else {
        Verdict::Bad
    }
}

/// Builds the reachable fragment of the product of `chain` and `dra`.
///
/// Requires both to use the same proposition set; a permuted order is
/// canonicalized by remapping automaton letters to the chain's ordering.
pub fn build_product(
    chain: &MarkovChain,
    dra: &RabinAutomaton,
) -> Result<ProductChain, ProductError> {
    let letter_map = letter_remap(chain, dra)?;
    let to_letter = |label: u32| letter_map[label as usize];

    let n_chain = chain.n_states() as usize;
    let n_dra = dra.n_states() as usize;
    let mut intern = alloc::vec![StateId::MAX; n_chain * n_dra];
    let key = |s: StateId, q: StateId| s as usize * n_dra + q as usize;

    let mut states: Vec<(StateId, StateId)> = Vec::new();
    let mut initial: Vec<(StateId, f64)> = Vec::new();
    let mut queue: Vec<StateId> = Vec::new();

    // Initial states in ascending chain-state order; mu'(s, q) = mu(s) for
    // q = delta(q0, L(s)).
    let mut init_sorted: Vec<(StateId, f64)> = chain.initial().to_vec();
    init_sorted.sort_by_key(|&(s, _)| s);
    for (s, p) in init_sorted {
        let q = dra.step(dra.initial(), to_letter(chain.label(s)));
        let k = key(s, q);
        if intern[k] == StateId::MAX {
            intern[k] = states.len() as StateId;
            states.push((s, q));
            queue.push(intern[k]);
        }
        initial.push((intern[k], p));
    }
    if initial.is_empty() {
        return Err(ProductError::NoInitialStates);
    }

    let mut transitions: Vec<Vec<(StateId, f64)>> = Vec::new();
    let mut head = 0;
    while head < queue.len() {
        let id = queue[head];
        head += 1;
        let (s, q) = states[id as usize];
        let mut row = Vec::with_capacity(chain.transitions(s).len());
        for &(s2, p) in chain.transitions(s) {
            let q2 = dra.step(q, to_letter(chain.label(s2)));
            let k = key(s2, q2);
            if intern[k] == StateId::MAX {
                intern[k] = states.len() as StateId;
                states.push((s2, q2));
                queue.push(intern[k]);
            }
            row.push((intern[k], p));
        }
        transitions.push(row);
    }

    let n_pairs = dra.pairs().len() as u32;
    let mut dra_e = alloc::vec![0u32; n_dra];
    let mut dra_f = alloc::vec![0u32; n_dra];
    for (k, pair) in dra.pairs().iter().enumerate() {
        for &q in &pair.e {
            dra_e[q as usize] |= 1 << k;
        }
        for &q in &pair.f {
            dra_f[q as usize] |= 1 << k;
        }
    }
    let e_mask = states.iter().map(|&(_, q)| dra_e[q as usize]).collect();
    let f_mask = states.iter().map(|&(_, q)| dra_f[q as usize]).collect();

    Ok(ProductChain { states, transitions, initial, n_pairs, e_mask, f_mask })
}

/// Maps each chain label bitmask to the corresponding automaton letter.
fn letter_remap(chain: &MarkovChain, dra: &RabinAutomaton) -> Result<Vec<u32>, ProductError> {
    let mut missing_in_dra = Vec::new();
    let mut perm = Vec::with_capacity(chain.ap().len());
    for name in chain.ap() {
        match dra.ap().iter().position(|a| a == name) {
            Some(i) => perm.push(i as u32),
            None => missing_in_dra.push(name.clone()),
        }
    }
    let missing_in_chain: Vec<String> = dra
        .ap()
        .iter()
        .filter(|a| !chain.ap().contains(a))
        .cloned()
        .collect();
    if !missing_in_dra.is_empty() || !missing_in_chain.is_empty() {
        return Err(ProductError::ApMismatch { missing_in_dra, missing_in_chain });
    }

    let n_labels = 1usize << chain.ap().len();
    let mut map = Vec::with_capacity(n_labels);
    for label in 0..n_labels as u32 {
        let mut letter = 0u32;
        for (chain_bit, &dra_bit) in perm.iter().enumerate() {
            if label & (1 << chain_bit) != 0 {
                letter |= 1 << dra_bit;
            }
        }
        map.push(letter);
    }
    Ok(map)
}
