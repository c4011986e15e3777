//! Reference candidate and strength computation, recomputed from scratch.
//!
//! A path of the product has a *candidate* when some suffix traverses a
//! bottom SCC of the explored graph completely: the suffix support, with the
//! edges it traversed, is a maximal strongly connected subgraph with no
//! explored edge leaving it and every member exited at least once.
//! Equivalently, the candidate is undefined exactly when the last state of
//! the path is at its first occurrence, and otherwise equals the SCC of the
//! last state in the explored graph.
//!
//! The *strength* counts how thoroughly the candidate has been re-traversed
//! since its creation: writing the path as `prefix . s . kappa` where
//! `prefix . s` is the shortest prefix whose candidate equals the current
//! one, the strength is the least number of occurrences in `kappa` over the
//! candidate members.
//!
//! Everything here recomputes from the path alone; the incremental
//! [`crate::tracker`] is required to agree with this module exactly.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::chain::StateId;
use crate::product::{classify_scc, ProductChain, Verdict};

/// A candidate computed by the reference path scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveCandidate {
    /// Member product states, ascending.
    pub members: Vec<StateId>,
    pub verdict: Verdict,
}

/// Candidate of a nonempty path, or `None` when undefined.
pub fn naive_candidate(product: &ProductChain, path: &[StateId]) -> Option<NaiveCandidate> {
    assert!(!path.is_empty(), "candidate of the empty path is undefined");
    let last = *path.last().unwrap();
    let occurrences = path.iter().filter(|&&s| s == last).count();
    let (fwd, rev) = explored_adjacency(path);
    candidate_from_graph(product, &fwd, &rev, last, occurrences)
}

/// Strength of a nonempty path: 0 when the candidate is undefined, else the
/// least member-occurrence count strictly after the candidate's birth.
pub fn naive_strength(product: &ProductChain, path: &[StateId]) -> u32 {
    let Some(cand) = naive_candidate(product, path) else {
        return 0;
    };
    // Shortest prefix whose candidate equals the current one.
    let mut birth = None;
    for t in 1..=path.len() {
        if naive_candidate(product, &path[..t]).as_ref() == Some(&cand) {
            birth = Some(t);
            break;
        }
    }
    let birth = birth.expect("the full path is such a prefix");
    let kappa = &path[birth..];
    cand.members
        .iter()
        .map(|&m| kappa.iter().filter(|&&s| s == m).count() as u32)
        .min()
        .unwrap_or(0)
}

/// Forward and reverse explored adjacency (deduplicated) of a path.
fn explored_adjacency(path: &[StateId]) -> (BTreeMap<StateId, Vec<StateId>>, BTreeMap<StateId, Vec<StateId>>) {
    let mut fwd: BTreeMap<StateId, Vec<StateId>> = BTreeMap::new();
    let mut rev: BTreeMap<StateId, Vec<StateId>> = BTreeMap::new();
    for &s in path {
        fwd.entry(s).or_default();
        rev.entry(s).or_default();
    }
    for w in path.windows(2) {
        let (u, v) = (w[0], w[1]);
        let out = fwd.get_mut(&u).unwrap();
        if !out.contains(&v) {
            out.push(v);
            rev.get_mut(&v).unwrap().push(u);
        }
    }
    (fwd, rev)
}

/// Shared core: candidate from an explored graph and the last state.
///
/// The SCC of the last state is always closed in the explored graph; the
/// candidate exists iff the last state has been exited before, i.e. occurs
/// at least twice.
fn candidate_from_graph(
    product: &ProductChain,
    fwd: &BTreeMap<StateId, Vec<StateId>>,
    rev: &BTreeMap<StateId, Vec<StateId>>,
    last: StateId,
    last_occurrences: usize,
) -> Option<NaiveCandidate> {
    if last_occurrences < 2 {
        return None;
    }
    let forward = reach(fwd, last);
    let backward = reach(rev, last);
    let mut members: Vec<StateId> = forward.intersection(&backward).copied().collect();
    members.sort_unstable();
    debug_assert!(
        members.iter().all(|s| {
            fwd[s].iter().all(|t| members.binary_search(t).is_ok())
        }),
        "the last state's SCC must be closed in the explored graph"
    );
    let verdict = classify_scc(&members, product);
    Some(NaiveCandidate { members, verdict })
}

fn reach(adj: &BTreeMap<StateId, Vec<StateId>>, from: StateId) -> alloc::collections::BTreeSet<StateId> {
    let mut seen = alloc::collections::BTreeSet::new();
    let mut stack = alloc::vec![from];
    seen.insert(from);
    while let Some(v) = stack.pop() {
        for &w in &adj[&v] {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen
}

/// Incremental driver around the reference computation.
///
/// Feeds a path state by state; at each step the candidate is recomputed
/// from scratch, and the candidate index, birthday and per-member visit
/// counts are derived purely from the resulting candidate sequence. This is
/// the differential-test reference for [`crate::tracker::Tracker`] and the
/// prefix checker for witness paths; it shares none of the tracker's
/// internal structures.
pub struct NaiveScan<'p> {
    product: &'p ProductChain,
    len: usize,
    fwd: BTreeMap<StateId, Vec<StateId>>,
    rev: BTreeMap<StateId, Vec<StateId>>,
    occurrences: BTreeMap<StateId, u32>,
    last: Option<StateId>,
    candidate: Option<NaiveCandidate>,
    index: u32,
    birthday: Option<usize>,
    since_birth: BTreeMap<StateId, u32>,
}

impl<'p> NaiveScan<'p> {
    pub fn new(product: &'p ProductChain) -> Self {
        NaiveScan {
            product,
            len: 0,
            fwd: BTreeMap::new(),
            rev: BTreeMap::new(),
            occurrences: BTreeMap::new(),
            last: None,
            candidate: None,
            index: 0,
            birthday: None,
            since_birth: BTreeMap::new(),
        }
    }

    /// Extends the path by one state and recomputes the candidate.
    pub fn feed(&mut self, s: StateId) {
        debug_assert!(
            self.last
                .is_none_or(|prev| self.product.transitions(prev).iter().any(|&(t, _)| t == s)),
            "consecutive states must be connected by product edges"
        );
        self.len += 1;
        self.fwd.entry(s).or_default();
        self.rev.entry(s).or_default();
        if let Some(prev) = self.last {
            let out = self.fwd.get_mut(&prev).unwrap();
            if !out.contains(&s) {
                out.push(s);
                self.rev.get_mut(&s).unwrap().push(prev);
            }
        }
        *self.occurrences.entry(s).or_insert(0) += 1;
        self.last = Some(s);

        let cand = candidate_from_graph(
            self.product,
            &self.fwd,
            &self.rev,
            s,
            self.occurrences[&s] as usize,
        );
        match (&cand, &self.candidate) {
            (Some(new), old) if old.as_ref().map(|o| &o.members) != Some(&new.members) => {
                // A candidate is born; counting starts after this step.
                self.index += 1;
                self.birthday = Some(self.len);
                self.since_birth.clear();
            }
            (Some(_), _) => {
                *self.since_birth.entry(s).or_insert(0) += 1;
            }
            (None, _) => {
                self.birthday = None;
                self.since_birth.clear();
            }
        }
        self.candidate = cand;
    }

    pub fn candidate(&self) -> Option<&NaiveCandidate> {
        self.candidate.as_ref()
    }

    /// 1-based count of candidate births so far.
    pub fn index(&self) -> u32 {
        self.index
    }

    /// Path length at which the current candidate was created.
    pub fn birthday(&self) -> Option<usize> {
        self.birthday
    }

    pub fn strength(&self) -> u32 {
        match &self.candidate {
            None => 0,
            Some(c) => c
                .members
                .iter()
                .map(|m| self.since_birth.get(m).copied().unwrap_or(0))
                .min()
                .unwrap_or(0),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}
