//! Exact graph and probability oracles over the product chain.
//!
//! These are the desk-side ground-truth routines: SCC/BSCC decomposition,
//! the probability of satisfying the property (reaching a good bottom
//! component), the structural parameters driving the performance bounds,
//! the theoretical bound calculator, and a constructive witness path whose
//! prefixes never carry a bad candidate.

use alloc::vec::Vec;

use crate::chain::StateId;
use crate::monitor::{alpha0, ConfigError};
use crate::naive::naive_candidate;
use crate::product::{classify_scc, ProductChain, Verdict};

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisError {
    /// The reachability linear system became singular (internal error).
    SingularSystem,
    /// Witness requested but the product has no good BSCC.
    NoGoodBscc,
    /// Value iteration failed to converge within the iteration cap.
    NoConvergence,
}

impl core::fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AnalysisError::SingularSystem => write!(f, "reachability system is singular"),
            AnalysisError::NoGoodBscc => {
                write!(f, "no good bottom SCC: the property has probability 0")
            }
            AnalysisError::NoConvergence => write!(f, "value iteration did not converge"),
        }
    }
}

impl core::error::Error for AnalysisError {}

/// SCC decomposition with bottom flags.
///
/// Components are disjoint, cover all reachable states, and are ordered by
/// their smallest contained state id; members are sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SccDecomposition {
    pub components: Vec<Vec<StateId>>,
    pub is_bottom: Vec<bool>,
    pub component_of: Vec<u32>,
}

impl SccDecomposition {
    /// Indices of bottom components, in component order.
    pub fn bottom_components(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.components.len()).filter(|&i| self.is_bottom[i])
    }
}

/// Exact SCC decomposition of the product graph (iterative Tarjan).
pub fn scc_decompose(product: &ProductChain) -> SccDecomposition {
    let n = product.n_states() as usize;
    const UNSET: u32 = u32::MAX;
    let mut index = alloc::vec![UNSET; n];
    let mut low = alloc::vec![0u32; n];
    let mut on_stack = alloc::vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next = 0u32;
    let mut raw: Vec<Vec<StateId>> = Vec::new();

    let mut frames: Vec<(u32, usize)> = Vec::new();
    for start in 0..n as u32 {
        if index[start as usize] != UNSET {
            continue;
        }
        index[start as usize] = next;
        low[start as usize] = next;
        next += 1;
        stack.push(start);
        on_stack[start as usize] = true;
        frames.push((start, 0));
        while let Some(&mut (v, ref mut cursor)) = frames.last_mut() {
            let succs = product.transitions(v);
            if *cursor < succs.len() {
                let w = succs[*cursor].0;
                *cursor += 1;
                if index[w as usize] == UNSET {
                    index[w as usize] = next;
                    low[w as usize] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    frames.push((w, 0));
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
            } else {
                if low[v as usize] == index[v as usize] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w as usize] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    raw.push(comp);
                }
                frames.pop();
                if let Some(&mut (parent, _)) = frames.last_mut() {
                    low[parent as usize] = low[parent as usize].min(low[v as usize]);
                }
            }
        }
    }

    // Deterministic ordering: by smallest contained state id.
    for comp in &mut raw {
        comp.sort_unstable();
    }
    raw.sort_by_key(|comp| comp[0]);

    let mut component_of = alloc::vec![0u32; n];
    for (i, comp) in raw.iter().enumerate() {
        for &s in comp {
            component_of[s as usize] = i as u32;
        }
    }
    let is_bottom = raw
        .iter()
        .enumerate()
        .map(|(i, comp)| {
            comp.iter().all(|&s| {
                product
                    .transitions(s)
                    .iter()
                    .all(|&(t, _)| component_of[t as usize] == i as u32)
            })
        })
        .collect();

    SccDecomposition { components: raw, is_bottom, component_of }
}

/// Probability of reaching any good BSCC from the initial distribution,
/// solved exactly from the standard reachability linear system.
///
/// Dense Gaussian elimination with partial pivoting up to 2000 transient
/// states, value iteration to a 1e-12 residual above.
pub fn satisfaction_probability(product: &ProductChain) -> Result<f64, AnalysisError> {
    let dec = scc_decompose(product);
    let n = product.n_states() as usize;

    // Known values on bottom components.
    let mut value = alloc::vec![f64::NAN; n];
    let mut transient: Vec<StateId> = Vec::new();
    for (i, comp) in dec.components.iter().enumerate() {
        if dec.is_bottom[i] {
            let v = match classify_scc(comp, product) {
                Verdict::Good => 1.0,
                Verdict::Bad => 0.0,
            };
            for &s in comp {
                value[s as usize] = v;
            }
        } else {
            transient.extend(comp.iter().copied());
        }
    }
    transient.sort_unstable();

    if transient.is_empty() {
        return Ok(initial_mass(product, &value));
    }

    if transient.len() <= 2000 {
        solve_gauss(product, &transient, &mut value)?;
    } else {
        solve_value_iteration(product, &transient, &mut value)?;
    }
    Ok(initial_mass(product, &value))
}

fn initial_mass(product: &ProductChain, value: &[f64]) -> f64 {
    let p: f64 = product
        .initial()
        .iter()
        .map(|&(s, mu)| mu * value[s as usize])
        .sum();
    p.clamp(0.0, 1.0)
}

fn solve_gauss(
    product: &ProductChain,
    transient: &[StateId],
    value: &mut [f64],
) -> Result<(), AnalysisError> {
    let m = transient.len();
    let mut col = alloc::vec![u32::MAX; product.n_states() as usize];
    for (j, &s) in transient.iter().enumerate() {
        col[s as usize] = j as u32;
    }
    // Row-major (I - P_TT) x = P_TG . 1, augmented in the last column.
    let mut a = alloc::vec![0.0f64; m * (m + 1)];
    for (r, &s) in transient.iter().enumerate() {
        a[r * (m + 1) + r] = 1.0;
        for &(t, p) in product.transitions(s) {
            match col[t as usize] {
                u32::MAX => {
                    if value[t as usize] == 1.0 {
                        a[r * (m + 1) + m] += p;
                    }
                }
                c => a[r * (m + 1) + c as usize] -= p,
            }
        }
    }
    // Forward elimination with partial pivoting.
    for k in 0..m {
        let mut pivot = k;
        let mut best = libm::fabs(a[k * (m + 1) + k]);
        for r in k + 1..m {
            let mag = libm::fabs(a[r * (m + 1) + k]);
            if mag > best {
                best = mag;
                pivot = r;
            }
        }
        if best < 1e-12 {
            return Err(AnalysisError::SingularSystem);
        }
        if pivot != k {
            for c in 0..=m {
                a.swap(k * (m + 1) + c, pivot * (m + 1) + c);
            }
        }
        let diag = a[k * (m + 1) + k];
        for r in k + 1..m {
            let factor = a[r * (m + 1) + k] / diag;
            if factor == 0.0 {
                continue;
            }
            for c in k..=m {
                a[r * (m + 1) + c] -= factor * a[k * (m + 1) + c];
            }
        }
    }
    // Back substitution.
    for k in (0..m).rev() {
        let mut x = a[k * (m + 1) + m];
        for c in k + 1..m {
            x -= a[k * (m + 1) + c] * value[transient[c] as usize];
        }
        value[transient[k] as usize] = x / a[k * (m + 1) + k];
    }
    Ok(())
}

fn solve_value_iteration(
    product: &ProductChain,
    transient: &[StateId],
    value: &mut [f64],
) -> Result<(), AnalysisError> {
    const RESIDUAL: f64 = 1e-12;
    const MAX_ITERS: u64 = 100_000_000;
    for &s in transient {
        value[s as usize] = 0.0;
    }
    let mut next = alloc::vec![0.0f64; transient.len()];
    for _ in 0..MAX_ITERS {
        let mut residual = 0.0f64;
        for (j, &s) in transient.iter().enumerate() {
            let mut x = 0.0;
            for &(t, p) in product.transitions(s) {
                x += p * value[t as usize];
            }
            residual = residual.max(libm::fabs(x - value[s as usize]));
            next[j] = x;
        }
        for (j, &s) in transient.iter().enumerate() {
            value[s as usize] = next[j];
        }
        if residual <= RESIDUAL {
            return Ok(());
        }
    }
    Err(AnalysisError::NoConvergence)
}

/// The structural parameters the performance bounds depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuralParams {
    /// Reachable product states.
    pub n_states: u32,
    /// Smallest positive transition probability of the product.
    pub p_min: f64,
    /// Maximal SCC size of the product.
    pub mxsc: u32,
}

pub fn structural_params(product: &ProductChain) -> StructuralParams {
    let dec = scc_decompose(product);
    let mxsc = dec.components.iter().map(|c| c.len()).max().unwrap_or(0) as u32;
    StructuralParams { n_states: product.n_states(), p_min: product.p_min(), mxsc }
}

/// Theoretical performance bounds for the bold controllers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoreticalBounds {
    /// Expected resets: `1 / (p_phi (1 - epsilon))`.
    pub er_bound: f64,
    /// Expected steps of one aborted sample at fixed boldness `alpha`:
    /// `2 n alpha (n - log2 epsilon) mxsc (1/p_min)^mxsc`.
    pub sample_cost_fixed: f64,
    /// Expected steps to the last reset at fixed boldness:
    /// `er_bound * sample_cost_fixed`.
    pub et_bound_fixed: f64,
    /// Expected steps to the last reset for the linear schedule, with the
    /// first qualifying sample index bounded by `1/p_min`:
    /// `(1/p_min^2 + 1/(p_min p_phi (1-eps)) + 1/(p_phi (1-eps))^2) * c`.
    pub et_bound_general: f64,
}

/// Evaluates the bound formulas; all logarithms base 2.
pub fn theoretical_bounds(
    params: &StructuralParams,
    p_phi: f64,
    alpha: f64,
    epsilon: f64,
) -> Result<TheoreticalBounds, ConfigError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ConfigError::EpsilonOutOfRange { epsilon });
    }
    if !(p_phi > 0.0 && p_phi <= 1.0) {
        return Err(ConfigError::PhiOutOfRange { p_phi });
    }
    let floor = alpha0(params.p_min)?;
    if alpha < floor {
        return Err(ConfigError::AlphaBelowFloor { alpha, floor });
    }
    let n = params.n_states as f64;
    let survive = p_phi * (1.0 - epsilon);
    let er_bound = 1.0 / survive;
    let c = 2.0
        * n
        * (n - libm::log2(epsilon))
        * params.mxsc as f64
        * libm::pow(1.0 / params.p_min, params.mxsc as f64);
    let sample_cost_fixed = c * alpha;
    let et_bound_fixed = er_bound * sample_cost_fixed;
    let inv_pmin = 1.0 / params.p_min;
    let et_bound_general = (inv_pmin * inv_pmin + inv_pmin / survive + 1.0 / (survive * survive)) * c;
    Ok(TheoreticalBounds { er_bound, sample_cost_fixed, et_bound_fixed, et_bound_general })
}

/// Builds a finite path from an initial state whose candidate becomes a good
/// BSCC while no prefix ever carries a bad candidate.
///
/// Construction: a simple path to an F-state of a good BSCC `B`, closed into
/// a lasso by a shortest path back to the visited support, then repeatedly a
/// shortest extension to an unexplored state of `B` followed by a shortest
/// path back to the current candidate, until the candidate equals `B`.
/// Shortest paths break ties toward the smallest successor state id.
pub fn witness_good_path(product: &ProductChain) -> Result<Vec<StateId>, AnalysisError> {
    let dec = scc_decompose(product);
    let good: Option<usize> = dec
        .bottom_components()
        .find(|&i| classify_scc(&dec.components[i], product) == Verdict::Good);
    let b_idx = good.ok_or(AnalysisError::NoGoodBscc)?;
    let b_set = &dec.components[b_idx];
    let in_b = |s: StateId| dec.component_of[s as usize] == b_idx as u32;

    // Witnessing pair and its F-states inside B.
    let pair = (0..product.n_pairs())
        .find(|&k| {
            b_set.iter().all(|&s| product.e_mask(s) & (1 << k) == 0)
                && b_set.iter().any(|&s| product.f_mask(s) & (1 << k) != 0)
        })
        .expect("a good BSCC has a witnessing pair");

    // Smallest initial state that reaches B.
    let mut initials: Vec<StateId> = product.initial().iter().map(|&(s, _)| s).collect();
    initials.sort_unstable();
    initials.dedup();
    let start = initials
        .into_iter()
        .find(|&s0| reaches(product, s0, &in_b))
        .ok_or(AnalysisError::NoGoodBscc)?;

    // Simple path to an F-state of B, then a lasso back to the support.
    let mut path = shortest_path(product, start, &|s| {
        in_b(s) && product.f_mask(s) & (1 << pair) != 0
    }, false)
    .expect("an F-state of B is reachable from the chosen initial state");
    let support: alloc::collections::BTreeSet<StateId> = path.iter().copied().collect();
    let lasso = shortest_path(product, *path.last().unwrap(), &|s| support.contains(&s), true)
        .expect("a BSCC member can return to the lasso support");
    extend(&mut path, lasso);

    // Grow the candidate until it covers B.
    for _ in 0..=b_set.len() {
        let cand = naive_candidate(product, &path)
            .expect("the lasso closes a candidate");
        debug_assert_eq!(cand.verdict, Verdict::Good);
        if &cand.members == b_set {
            return Ok(path);
        }
        let cand_set: alloc::collections::BTreeSet<StateId> =
            cand.members.iter().copied().collect();
        let outward = shortest_path(product, *path.last().unwrap(), &|s| {
            in_b(s) && !cand_set.contains(&s)
        }, true)
        .expect("B has unexplored states reachable inside B");
        extend(&mut path, outward);
        let homeward =
            shortest_path(product, *path.last().unwrap(), &|s| cand_set.contains(&s), true)
                .expect("the previous candidate is reachable inside B");
        extend(&mut path, homeward);
    }
    Err(AnalysisError::NoConvergence)
}

fn extend(path: &mut Vec<StateId>, segment: Vec<StateId>) {
    debug_assert_eq!(path.last().copied(), segment.first().copied());
    path.extend_from_slice(&segment[1..]);
}

fn reaches(product: &ProductChain, from: StateId, target: &dyn Fn(StateId) -> bool) -> bool {
    let mut seen = alloc::vec![false; product.n_states() as usize];
    let mut stack = alloc::vec![from];
    seen[from as usize] = true;
    while let Some(v) = stack.pop() {
        if target(v) {
            return true;
        }
        for &(w, _) in product.transitions(v) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                stack.push(w);
            }
        }
    }
    false
}

/// BFS shortest path from `from` to any state satisfying `target`,
/// inclusive of both endpoints. With `require_move` the path has at least
/// one edge even if `from` already satisfies `target`. Successors are
/// explored in ascending state id, so ties resolve deterministically toward
/// the smallest successor.
fn shortest_path(
    product: &ProductChain,
    from: StateId,
    target: &dyn Fn(StateId) -> bool,
    require_move: bool,
) -> Option<Vec<StateId>> {
    if !require_move && target(from) {
        return Some(alloc::vec![from]);
    }
    let n = product.n_states() as usize;
    let mut parent = alloc::vec![StateId::MAX; n];
    let mut seen = alloc::vec![false; n];
    // The start is not marked seen so that a cycle back to it can be found;
    // parent walks below stop at `from` before reading its (possibly
    // overwritten) parent entry.
    let mut queue: Vec<StateId> = alloc::vec![from];
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        let mut succ: Vec<StateId> = product.transitions(v).iter().map(|&(t, _)| t).collect();
        succ.sort_unstable();
        for w in succ {
            if seen[w as usize] {
                continue;
            }
            seen[w as usize] = true;
            parent[w as usize] = v;
            if target(w) {
                let mut rev = alloc::vec![w];
                let mut cur = v;
                while cur != from {
                    rev.push(cur);
                    cur = parent[cur as usize];
                }
                rev.push(from);
                rev.reverse();
                return Some(rev);
            }
            queue.push(w);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::MarkovChain;
    use crate::dra::{RabinAutomaton, RabinPair};
    use crate::models::{builtin_dra, gen_fig1, gen_fig2, gen_random, BuiltinProperty};
    use crate::naive::NaiveScan;
    use crate::product::build_product;
    use alloc::string::ToString;
    use alloc::vec;

    fn fig1_product(n: u32) -> ProductChain {
        build_product(&gen_fig1(n), &builtin_dra(BuiltinProperty::Fp)).unwrap()
    }

    fn fig2_product(n: u32) -> ProductChain {
        build_product(&gen_fig2(n), &builtin_dra(BuiltinProperty::Fp)).unwrap()
    }

    /// 1-state DRA accepting everything, used to analyse a chain as its own
    /// product.
    fn trivial_dra() -> RabinAutomaton {
        RabinAutomaton::new(
            vec!["p".to_string()],
            1,
            0,
            vec![0, 0],
            vec![RabinPair { e: vec![], f: vec![0] }],
        )
        .unwrap()
    }

    #[test]
    fn fig1_decomposition() {
        // Chain as its own product: the ladder s_0..s_{n-1} is one
        // non-bottom SCC, s_n is a trivial non-bottom SCC (its only exits
        // lead to the absorbing states), and the two absorbing states are
        // the bottom components.
        let n = 3;
        let p = build_product(&gen_fig1(n), &trivial_dra()).unwrap();
        let dec = scc_decompose(&p);
        assert_eq!(dec.components.len(), 4);
        let ladder: Vec<StateId> = (0..n).collect();
        assert_eq!(dec.components[0], ladder);
        assert_eq!(dec.components[1], vec![n]);
        assert!(!dec.is_bottom[0] && !dec.is_bottom[1]);
        assert!(dec.is_bottom[2] && dec.is_bottom[3]);
        assert_eq!(dec.components[2], vec![n + 1]);
        assert_eq!(dec.components[3], vec![n + 2]);
    }

    #[test]
    fn single_self_loop_is_one_bottom_scc() {
        let chain = MarkovChain::new(
            vec![vec![(0, 1.0)]],
            vec![(0, 1.0)],
            vec![1],
            vec!["p".to_string()],
        )
        .unwrap();
        let p = build_product(&chain, &trivial_dra()).unwrap();
        let dec = scc_decompose(&p);
        assert_eq!(dec.components, vec![vec![0]]);
        assert_eq!(dec.is_bottom, vec![true]);
    }

    #[test]
    fn fig2_has_singleton_sccs() {
        let n = 4;
        let p = build_product(&gen_fig2(n), &trivial_dra()).unwrap();
        let dec = scc_decompose(&p);
        assert_eq!(dec.components.len() as u32, n + 1);
        assert!(dec.components.iter().all(|c| c.len() == 1));
        let bottoms: Vec<usize> = dec.bottom_components().collect();
        assert_eq!(bottoms, vec![n as usize]);
    }

    #[test]
    #[allow(clippy::needless_range_loop)] // index pairs are the point here
    fn decomposition_matches_transitive_closure_on_random_products() {
        // Brute force: pairwise mutual reachability on everything up to 12
        // product states.
        for seed in 0..60u64 {
            let chain = gen_random(2 + (seed % 6) as u32, seed, &[0.5, 0.25]).unwrap();
            let prop = BuiltinProperty::ALL[(seed % 5) as usize];
            let p = build_product(&chain, &builtin_dra(prop)).unwrap();
            if p.n_states() > 12 {
                continue;
            }
            let n = p.n_states() as usize;
            let mut reach = vec![vec![false; n]; n];
            for s in 0..n {
                let mut stack = vec![s as StateId];
                while let Some(v) = stack.pop() {
                    for &(w, _) in p.transitions(v) {
                        if !reach[s][w as usize] {
                            reach[s][w as usize] = true;
                            stack.push(w);
                        }
                    }
                }
            }
            let dec = scc_decompose(&p);
            for a in 0..n {
                for b in 0..n {
                    let same = dec.component_of[a] == dec.component_of[b];
                    let mutual = (a == b) || (reach[a][b] && reach[b][a]);
                    assert_eq!(same, mutual, "seed {seed}, states {a},{b}");
                }
            }
            for (i, comp) in dec.components.iter().enumerate() {
                let closed = comp.iter().all(|&s| {
                    p.transitions(s).iter().all(|&(t, _)| dec.component_of[t as usize] == i as u32)
                });
                assert_eq!(closed, dec.is_bottom[i]);
            }
        }
    }

    #[test]
    fn fig1_satisfaction_probability_is_half() {
        let p = fig1_product(4);
        let p_phi = satisfaction_probability(&p).unwrap();
        assert!((p_phi - 0.5).abs() < 1e-9, "got {p_phi}");
    }

    #[test]
    fn fig2_satisfaction_probability_is_one() {
        let p = fig2_product(5);
        assert!((satisfaction_probability(&p).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn one_step_reachability() {
        // a -> good with 0.3, a -> bad with 0.7.
        let chain = MarkovChain::new(
            vec![
                vec![(1, 0.3), (2, 0.7)],
                vec![(1, 1.0)],
                vec![(2, 1.0)],
            ],
            vec![(0, 1.0)],
            vec![0, 1, 0],
            vec!["p".to_string()],
        )
        .unwrap();
        let p = build_product(&chain, &builtin_dra(BuiltinProperty::Fp)).unwrap();
        assert!((satisfaction_probability(&p).unwrap() - 0.3).abs() < 1e-9);
    }

    #[test]
    fn value_iteration_kicks_in_above_the_dense_cutoff() {
        // 2500 transient states, each jumping straight to the absorbing
        // pair: too many for the dense solver, trivial for value iteration.
        let m = 2500u32;
        let good = m;
        let bad = m + 1;
        let mut transitions: Vec<Vec<(StateId, f64)>> =
            (0..m).map(|_| vec![(good, 0.3), (bad, 0.7)]).collect();
        transitions.push(vec![(good, 1.0)]);
        transitions.push(vec![(bad, 1.0)]);
        let mut labels = vec![0u32; m as usize + 2];
        labels[good as usize] = 1;
        let initial: Vec<(StateId, f64)> = (0..m).map(|s| (s, 1.0 / m as f64)).collect();
        let chain = MarkovChain::new(transitions, initial, labels, vec!["p".to_string()]).unwrap();
        let p = build_product(&chain, &builtin_dra(BuiltinProperty::Fp)).unwrap();
        assert!((satisfaction_probability(&p).unwrap() - 0.3).abs() < 1e-9);
    }

    #[test]
    fn structural_params_examples() {
        // Five chain states in the self-loop family: all product SCCs are
        // singletons.
        let p = fig2_product(4);
        let params = structural_params(&p);
        assert_eq!(params.mxsc, 1);
        assert_eq!(params.p_min, 0.5);

        let p1 = fig1_product(3);
        assert_eq!(structural_params(&p1).mxsc, 3); // the s0..s_{n-1} ladder

        let single = MarkovChain::new(
            vec![vec![(0, 1.0)]],
            vec![(0, 1.0)],
            vec![1],
            vec!["p".to_string()],
        )
        .unwrap();
        let sp = structural_params(&build_product(&single, &trivial_dra()).unwrap());
        assert_eq!((sp.n_states, sp.p_min, sp.mxsc), (1, 1.0, 1));
    }

    #[test]
    fn bound_calculator_frozen_values() {
        // Hand-computed for n=5, alpha=1, eps=0.5, mxsc=1, p_min=0.5, p_phi=1:
        //   er   = 1/(1*0.5)                   = 2
        //   c*a  = 2*5*1*(5+1)*1*2             = 120
        //   et   = er * c*a                    = 240
        //   etg  = (4 + 4 + 4) * 120           = 1440
        let params = StructuralParams { n_states: 5, p_min: 0.5, mxsc: 1 };
        let b = theoretical_bounds(&params, 1.0, 1.0, 0.5).unwrap();
        assert_eq!(b.er_bound, 2.0);
        assert_eq!(b.sample_cost_fixed, 120.0);
        assert_eq!(b.et_bound_fixed, 240.0);
        assert_eq!(b.et_bound_general, 1440.0);
    }

    #[test]
    fn bound_calculator_validates_parameters() {
        let params = StructuralParams { n_states: 5, p_min: 0.5, mxsc: 1 };
        assert!(theoretical_bounds(&params, 1.0, 1.0, 1.5).is_err());
        assert!(theoretical_bounds(&params, 0.0, 1.0, 0.5).is_err());
        // alpha below alpha0(0.1) ~ 6.58.
        let low = StructuralParams { n_states: 5, p_min: 0.1, mxsc: 1 };
        assert!(matches!(
            theoretical_bounds(&low, 1.0, 1.0, 0.5),
            Err(ConfigError::AlphaBelowFloor { .. })
        ));
    }

    #[test]
    fn er_bound_trivial_arithmetic() {
        let params = StructuralParams { n_states: 1, p_min: 1.0, mxsc: 1 };
        assert_eq!(theoretical_bounds(&params, 1.0, 1.0, 0.5).unwrap().er_bound, 2.0);
    }

    /// Checks the witness guarantee with the reference scan: every prefix
    /// candidate is good or undefined, and the final candidate is the good
    /// BSCC itself.
    fn check_witness(p: &ProductChain, path: &[StateId]) {
        let dec = scc_decompose(p);
        let mut scan = NaiveScan::new(p);
        for &s in path {
            scan.feed(s);
            if let Some(c) = scan.candidate() {
                assert_eq!(c.verdict, Verdict::Good, "bad prefix candidate in {path:?}");
            }
        }
        let final_c = scan.candidate().expect("witness ends with a candidate");
        let comp = dec.component_of[final_c.members[0] as usize] as usize;
        assert!(dec.is_bottom[comp]);
        assert_eq!(final_c.members, dec.components[comp]);
    }

    #[test]
    fn witness_on_fig2() {
        let p = fig2_product(4);
        let path = witness_good_path(&p).unwrap();
        check_witness(&p, &path);
    }

    #[test]
    fn witness_lasso_of_length_one() {
        // Initial state inside a singleton good BSCC: the witness is that
        // state twice.
        let chain = MarkovChain::new(
            vec![vec![(0, 1.0)]],
            vec![(0, 1.0)],
            vec![1],
            vec!["p".to_string()],
        )
        .unwrap();
        let p = build_product(&chain, &builtin_dra(BuiltinProperty::Fp)).unwrap();
        assert_eq!(witness_good_path(&p).unwrap(), vec![0, 0]);
    }

    #[test]
    fn witness_on_random_products() {
        let mut produced = 0;
        let mut seed = 0u64;
        while produced < 10 {
            seed += 1;
            let chain = gen_random(10, seed, &[0.5, 0.25]).unwrap();
            let p = build_product(&chain, &builtin_dra(BuiltinProperty::GFp)).unwrap();
            if satisfaction_probability(&p).unwrap() <= 0.0 {
                continue;
            }
            produced += 1;
            let path = witness_good_path(&p).unwrap();
            check_witness(&p, &path);
        }
    }

    #[test]
    fn witness_requires_a_good_bscc() {
        // G p on a chain that always violates it.
        let chain = MarkovChain::new(
            vec![vec![(0, 1.0)]],
            vec![(0, 1.0)],
            vec![0],
            vec!["p".to_string()],
        )
        .unwrap();
        let p = build_product(&chain, &builtin_dra(BuiltinProperty::Gp)).unwrap();
        assert_eq!(witness_good_path(&p).unwrap_err(), AnalysisError::NoGoodBscc);
    }
}
