//! Incremental candidate and strength tracking along a sampled path.
//!
//! The tracker maintains, in amortized logarithmic time per step:
//!
//! - the discovery index of every visited product state (states are named by
//!   the order in which the path first visits them);
//! - the root sequence: the first-discovered state of each SCC of the
//!   explored graph, in ascending discovery order. Because SCCs of a path
//!   graph absorb only newer states, each SCC is a contiguous interval of
//!   discovery indices and the roots form a stack;
//! - per-state visit pairs `(birthday, count)`: the birthday of the
//!   candidate current at the state's last visit, and the number of visits
//!   since that birthday. The candidate strength is read off the minimal
//!   pair among the candidate members, where pairs with an out-of-date
//!   birthday (or none) pin the minimum to zero;
//! - per-SCC verdict masks for the lifted Rabin pairs.
//!
//! Feeding an edge applies exactly one of three cases: a newly discovered
//! state opens a fresh singleton SCC (and the candidate becomes undefined),
//! a revisit inside the current structure bumps a visit count, and an edge
//! back to an older SCC pops and merges every newer root, giving birth to a
//! new candidate of strength 0.
//!
//! The tracker is observationally identical to the reference scan in
//! [`crate::naive`]; the differential test suite enforces this exactly.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::chain::StateId;
use crate::product::{ProductChain, Verdict};

/// Protocol errors raised by [`Tracker::step`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrackerError {
    StateOutOfRange { state: StateId, n_states: u32 },
    /// The fed state is not a product-graph successor of the previous one.
    NotASuccessor { from: StateId, to: StateId },
}

impl fmt::Display for TrackerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrackerError::StateOutOfRange { state, n_states } => {
                write!(f, "state {state} out of range (product has {n_states} states)")
            }
            TrackerError::NotASuccessor { from, to } => {
                write!(f, "{to} is not a product successor of {from}")
            }
        }
    }
}

impl core::error::Error for TrackerError {}

/// The current candidate as seen by the tracker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate<'a> {
    /// Member product states in discovery order.
    pub members: &'a [StateId],
    /// 1-based ordinal of this candidate since the last reset.
    pub index: u32,
    pub strength: u32,
    pub verdict: Verdict,
}

/// Instrumentation: logical structure operations, cumulative across resets.
///
/// Over any n-step feed the total stays within 4n: one insert per discovery,
/// one increment per revisit, and one extract-max plus one merge per popped
/// root, where every root is popped at most once.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounters {
    pub inserts: u64,
    pub increments: u64,
    pub extract_max: u64,
    pub merges: u64,
}

impl OpCounters {
    pub fn total(&self) -> u64 {
        self.inserts + self.increments + self.extract_max + self.merges
    }
}

/// Visit pair ordered so that the structure minimum yields the strength.
///
/// `b_ord` is 0 when the state has not been visited under any candidate
/// (the undefined birthday), otherwise the birthday path length. Ordering is
/// lexicographic, so any member whose pair predates the current birthday
/// sorts below all fresh pairs and forces the strength read-out to 0.
/// Ties between equal pairs break on the smallest state id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct VisitKey {
    b_ord: u64,
    count: u32,
    state: StateId,
}

const EMPTY_KEY: VisitKey = VisitKey { b_ord: u64::MAX, count: u32::MAX, state: StateId::MAX };

/// Fixed-shape min segment tree over discovery indices, grown by doubling.
struct MinSegTree {
    cap: usize,
    nodes: Vec<VisitKey>,
}

impl MinSegTree {
    fn new() -> Self {
        MinSegTree { cap: 0, nodes: Vec::new() }
    }

    fn ensure(&mut self, len: usize) {
        if len <= self.cap {
            return;
        }
        let mut cap = self.cap.max(64);
        while cap < len {
            cap *= 2;
        }
        let mut nodes = alloc::vec![EMPTY_KEY; 2 * cap];
        for i in 0..self.cap {
            nodes[cap + i] = self.nodes[self.cap + i];
        }
        for i in (1..cap).rev() {
            nodes[i] = nodes[2 * i].min(nodes[2 * i + 1]);
        }
        self.cap = cap;
        self.nodes = nodes;
    }

    fn get(&self, pos: usize) -> VisitKey {
        self.nodes[self.cap + pos]
    }

    fn set(&mut self, pos: usize, key: VisitKey) {
        let mut i = self.cap + pos;
        self.nodes[i] = key;
        i /= 2;
        while i >= 1 {
            self.nodes[i] = self.nodes[2 * i].min(self.nodes[2 * i + 1]);
            i /= 2;
        }
    }

    /// Minimum over the half-open index range `l..r`.
    fn range_min(&self, l: usize, r: usize) -> VisitKey {
        let mut min = EMPTY_KEY;
        let mut l = self.cap + l;
        let mut r = self.cap + r;
        while l < r {
            if l % 2 == 1 {
                min = min.min(self.nodes[l]);
                l += 1;
            }
            if r % 2 == 1 {
                r -= 1;
                min = min.min(self.nodes[r]);
            }
            l /= 2;
            r /= 2;
        }
        min
    }

    /// Clears the first `used` leaves back to the empty sentinel.
    fn reset(&mut self, used: usize) {
        for pos in 0..used {
            self.set(pos, EMPTY_KEY);
        }
    }
}

/// Incremental candidate/strength tracker over a fixed product.
///
/// Single-owner mutable: one trial drives one tracker. Distinct trackers
/// over the same (shared, immutable) product may run concurrently.
pub struct Tracker<'p> {
    product: &'p ProductChain,
    /// State id -> discovery index + 1; 0 when undiscovered.
    disc: Vec<u32>,
    /// Discovery index -> state id.
    order: Vec<StateId>,
    /// Root discovery indices, ascending; the top root owns the candidate.
    roots: Vec<u32>,
    /// Per-root `(E, F)` membership masks OR-ed over the component members.
    root_masks: Vec<(u32, u32)>,
    seg: MinSegTree,
    last: Option<StateId>,
    len: u64,
    birthday: Option<u64>,
    index: u32,
    defined: bool,
    ops: OpCounters,
}

impl<'p> Tracker<'p> {
    /// Fresh tracker: nothing discovered, no candidate.
    pub fn new(product: &'p ProductChain) -> Self {
        Tracker {
            product,
            disc: alloc::vec![0; product.n_states() as usize],
            order: Vec::new(),
            roots: Vec::new(),
            root_masks: Vec::new(),
            seg: MinSegTree::new(),
            last: None,
            len: 0,
            birthday: None,
            index: 0,
            defined: false,
            ops: OpCounters::default(),
        }
    }

    /// Number of distinct states discovered since the last reset.
    pub fn discovered(&self) -> u32 {
        self.order.len() as u32
    }

    /// States fed since the last reset.
    pub fn path_len(&self) -> u64 {
        self.len
    }

    pub fn ops(&self) -> OpCounters {
        self.ops
    }

    pub fn last_state(&self) -> Option<StateId> {
        self.last
    }

    /// Path length at which the current candidate was born.
    pub fn birthday(&self) -> Option<u64> {
        self.birthday
    }

    /// Clears all path state; operation counters are kept cumulative.
    pub fn reset(&mut self) {
        for &s in &self.order {
            self.disc[s as usize] = 0;
        }
        self.seg.reset(self.order.len());
        self.order.clear();
        self.roots.clear();
        self.root_masks.clear();
        self.last = None;
        self.len = 0;
        self.birthday = None;
        self.index = 0;
        self.defined = false;
    }

    /// Extends the path by one state.
    ///
    /// The first call seeds the path; every later call must feed a product
    /// successor of the previously fed state. Returns the (possibly
    /// unchanged) current candidate.
    pub fn step(&mut self, s: StateId) -> Result<Option<Candidate<'_>>, TrackerError> {
        if s >= self.product.n_states() {
            return Err(TrackerError::StateOutOfRange { state: s, n_states: self.product.n_states() });
        }
        if let Some(prev) = self.last {
            if !self.product.transitions(prev).iter().any(|&(t, _)| t == s) {
                return Err(TrackerError::NotASuccessor { from: prev, to: s });
            }
        }
        self.len += 1;

        if self.disc[s as usize] == 0 {
            // Case 1: discovery. New trivial SCC rooted at s; the path now
            // ends at a first occurrence, so there is no candidate.
            let idx = self.order.len() as u32;
            self.disc[s as usize] = idx + 1;
            self.order.push(s);
            self.roots.push(idx);
            self.root_masks.push((self.product.e_mask(s), self.product.f_mask(s)));
            self.seg.ensure(idx as usize + 1);
            self.seg.set(idx as usize, VisitKey { b_ord: 0, count: 0, state: s });
            self.ops.inserts += 1;
            self.defined = false;
            self.birthday = None;
        } else {
            let ds = self.disc[s as usize] - 1;
            // Case 3 when s lies in an older SCC: pop and merge every root
            // above the root of s's component. Roots are sorted, so those
            // are exactly the roots greater than ds.
            let mut popped = false;
            let mut acc = (0u32, 0u32);
            while *self.roots.last().expect("nonempty path has roots") > ds {
                self.roots.pop();
                let m = self.root_masks.pop().expect("masks parallel roots");
                acc.0 |= m.0;
                acc.1 |= m.1;
                self.ops.extract_max += 1;
                self.ops.merges += 1;
                popped = true;
            }
            if popped {
                // A new candidate is born with strength 0; counting starts
                // after this step.
                let top = self.root_masks.last_mut().expect("surviving root");
                top.0 |= acc.0;
                top.1 |= acc.1;
                self.index += 1;
                self.birthday = Some(self.len);
                self.defined = true;
                self.seg.set(ds as usize, VisitKey { b_ord: self.len, count: 0, state: s });
                self.ops.increments += 1;
            } else if self.defined {
                // Case 2: revisit inside the current candidate.
                let b_ord = self.birthday.expect("defined candidate has a birthday");
                let cur = self.seg.get(ds as usize);
                let count = if cur.b_ord == b_ord { cur.count + 1 } else { 1 };
                self.seg.set(ds as usize, VisitKey { b_ord, count, state: s });
                self.ops.increments += 1;
            } else {
                // Revisit while undefined: only the self-loop on the newest
                // state qualifies, and it gives birth to the singleton
                // candidate.
                debug_assert_eq!(self.last, Some(s));
                self.index += 1;
                self.birthday = Some(self.len);
                self.defined = true;
                self.seg.set(ds as usize, VisitKey { b_ord: self.len, count: 0, state: s });
                self.ops.increments += 1;
            }
        }
        self.last = Some(s);
        Ok(self.candidate())
    }

    /// The current candidate, or `None` while undefined.
    pub fn candidate(&self) -> Option<Candidate<'_>> {
        if !self.defined {
            return None;
        }
        let root = *self.roots.last().expect("defined candidate has a root") as usize;
        let members = &self.order[root..];
        let (e_or, f_or) = *self.root_masks.last().expect("masks parallel roots");
        let verdict = if !e_or & f_or != 0 { Verdict::Good } else { Verdict::Bad };
        Some(Candidate { members, index: self.index, strength: self.strength(), verdict })
    }

    /// Strength of the current candidate; 0 while undefined.
    pub fn strength(&self) -> u32 {
        if !self.defined {
            return 0;
        }
        let root = *self.roots.last().expect("defined candidate has a root") as usize;
        let min = self.seg.range_min(root, self.order.len());
        if min.b_ord == self.birthday.expect("defined candidate has a birthday") {
            min.count
        } else {
            0
        }
    }

    /// Snapshot for the monitor: no borrows into the tracker.
    pub fn observation(&self) -> crate::monitor::Observation {
        match self.candidate() {
            None => crate::monitor::Observation {
                defined: false,
                verdict: None,
                index: self.index,
                strength: 0,
            },
            Some(c) => crate::monitor::Observation {
                defined: true,
                verdict: Some(c.verdict),
                index: c.index,
                strength: c.strength,
            },
        }
    }

    /// Debug dump: one line per root with its member interval and pairs.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (k, &root) in self.roots.iter().enumerate() {
            let end = self.roots.get(k + 1).copied().unwrap_or(self.order.len() as u32);
            let _ = write!(out, "root d{root} state {}:", self.order[root as usize]);
            for idx in root..end {
                let key = self.seg.get(idx as usize);
                let state = self.order[idx as usize];
                if key.b_ord == 0 {
                    let _ = write!(out, " {state}:(-,{})", key.count);
                } else {
                    let _ = write!(out, " {state}:({},{})", key.b_ord, key.count);
                }
            }
            out.push('\n');
        }
        out
    }
}
