//! Differential and behavioural tests of the incremental tracker against
//! the reference scan, plus run-level properties of the candidate
//! machinery.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resetmon_core::analysis::scc_decompose;
use resetmon_core::models::{builtin_dra, gen_random, BuiltinProperty, DEFAULT_PALETTE};
use resetmon_core::naive::NaiveScan;
use resetmon_core::product::{build_product, ProductChain};
use resetmon_core::{MarkovChain, RabinAutomaton, StateId, Tracker, Verdict};

/// A reproducible random product with at most `max_states` states.
fn random_product(seed: u64, max_states: u32) -> ProductChain {
    let mut attempt = seed;
    loop {
        let n = 3 + (attempt % 8) as u32;
        let chain = gen_random(n, attempt, DEFAULT_PALETTE).expect("generation succeeds");
        let prop = BuiltinProperty::ALL[(attempt % 5) as usize];
        let product = build_product(&chain, &builtin_dra(prop)).expect("same AP set");
        if product.n_states() <= max_states {
            return product;
        }
        attempt = attempt.wrapping_add(0x9e37_79b9);
    }
}

fn weighted_step(rng: &mut ChaCha8Rng, product: &ProductChain, s: StateId) -> StateId {
    let row = product.transitions(s);
    let r: f64 = rng.random();
    let mut acc = 0.0;
    for &(t, p) in row {
        acc += p;
        if r < acc {
            return t;
        }
    }
    row.last().unwrap().0
}

#[test]
fn tracker_equals_reference_scan_on_random_walks() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for walk in 0..1500u64 {
        let product = random_product(walk, 20);
        let mut tracker = Tracker::new(&product);
        let mut scan = NaiveScan::new(&product);
        let len = rng.random_range(1..=200usize);
        let mut state = rng.random_range(0..product.n_states());
        for step in 0..len {
            tracker.step(state).expect("walk follows product edges");
            scan.feed(state);
            let got = tracker.candidate();
            let want = scan.candidate();
            match (got, want) {
                (None, None) => {}
                (Some(g), Some(w)) => {
                    let mut members = g.members.to_vec();
                    members.sort_unstable();
                    assert_eq!(members, w.members, "walk {walk} step {step}\n{}", tracker.dump());
                    assert_eq!(g.verdict, w.verdict, "walk {walk} step {step}");
                    assert_eq!(g.index, scan.index(), "walk {walk} step {step}");
                }
                (g, w) => panic!(
                    "walk {walk} step {step}: tracker {:?} vs reference {:?}\n{}",
                    g.map(|c| c.members.to_vec()),
                    w.map(|c| c.members.clone()),
                    tracker.dump()
                ),
            }
            assert_eq!(tracker.strength(), scan.strength(), "walk {walk} step {step}\n{}", tracker.dump());
            state = weighted_step(&mut rng, &product, state);
        }
    }
}

#[test]
fn strength_dynamics_along_runs() {
    // Strength is 0 when a candidate appears, never decreases while the
    // set is unchanged, and grows by at most 1 per step.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for walk in 0..300u64 {
        let product = random_product(walk.wrapping_mul(31).wrapping_add(5), 20);
        let mut tracker = Tracker::new(&product);
        let mut state = rng.random_range(0..product.n_states());
        let mut prev: Option<(Vec<StateId>, u32)> = None;
        for _ in 0..300 {
            tracker.step(state).unwrap();
            let cur = tracker
                .candidate()
                .map(|c| (c.members.to_vec(), c.strength));
            if let Some((members, strength)) = &cur {
                match &prev {
                    Some((pm, ps)) if pm == members => {
                        assert!(*strength >= *ps, "strength decreased");
                        assert!(*strength <= ps + 1, "strength jumped");
                    }
                    _ => assert_eq!(*strength, 0, "fresh candidate must have strength 0"),
                }
            }
            prev = cur;
            state = weighted_step(&mut rng, &product, state);
        }
    }
}

#[test]
fn merged_candidates_strictly_grow() {
    // A candidate born while another candidate exists comes from the merge
    // case and strictly contains the old one.
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    let mut merges_seen = 0u32;
    for walk in 0..300u64 {
        let product = random_product(walk.wrapping_mul(7).wrapping_add(1), 20);
        let mut tracker = Tracker::new(&product);
        let mut state = rng.random_range(0..product.n_states());
        let mut prev: Option<(Vec<StateId>, u32)> = None;
        for _ in 0..200 {
            tracker.step(state).unwrap();
            let cur = tracker.candidate().map(|c| {
                let mut m = c.members.to_vec();
                m.sort_unstable();
                (m, c.index)
            });
            if let (Some((members, index)), Some((pm, pi))) = (&cur, &prev) {
                if index > pi {
                    assert!(
                        pm.iter().all(|s| members.contains(s)) && members.len() > pm.len(),
                        "merge did not strictly grow: {pm:?} -> {members:?}"
                    );
                    merges_seen += 1;
                }
            }
            prev = cur;
            state = weighted_step(&mut rng, &product, state);
        }
    }
    assert!(merges_seen > 50, "too few merges observed ({merges_seen}) for the property to bite");
}

#[test]
fn final_candidate_is_a_true_bscc_and_strength_grows_unboundedly() {
    // Oracle-terminated runs: walk until the candidate set equals a bottom
    // SCC of the product (almost surely happens), then keep walking and
    // watch the strength pass a fixed bar while the set stays put.
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    for walk in 0..120u64 {
        let product = random_product(walk.wrapping_add(400), 20);
        let dec = scc_decompose(&product);
        let mut tracker = Tracker::new(&product);
        let mut state = rng.random_range(0..product.n_states());
        let mut trapped: Option<Vec<StateId>> = None;
        for _ in 0..200_000 {
            tracker.step(state).unwrap();
            if let Some(c) = tracker.candidate() {
                let comp = dec.component_of[c.members[0] as usize] as usize;
                let mut members = c.members.to_vec();
                members.sort_unstable();
                if dec.is_bottom[comp] && members == dec.components[comp] {
                    trapped = Some(members);
                    break;
                }
            }
            state = weighted_step(&mut rng, &product, state);
        }
        let trapped = trapped.unwrap_or_else(|| panic!("walk {walk} never trapped in a BSCC"));
        // From here no reset condition can ever fire: the set is stable and
        // the strength grows beyond any fixed threshold.
        let mut reached = false;
        for _ in 0..200_000 {
            state = weighted_step(&mut rng, &product, state);
            tracker.step(state).unwrap();
            let c = tracker.candidate().expect("candidate stays defined");
            let mut members = c.members.to_vec();
            members.sort_unstable();
            assert_eq!(members, trapped, "final candidate changed after trapping");
            if c.strength >= 5 {
                reached = true;
                break;
            }
        }
        assert!(reached, "walk {walk}: strength never reached 5 inside the BSCC");
    }
}

#[test]
fn amortized_structure_operations_stay_linear() {
    let chain = gen_random(200, 77, DEFAULT_PALETTE).unwrap();
    let product = build_product(&chain, &builtin_dra(BuiltinProperty::GFp)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut tracker = Tracker::new(&product);
    let n: u64 = 100_000;
    let mut state = 0u32;
    for _ in 0..n {
        tracker.step(state).unwrap();
        state = weighted_step(&mut rng, &product, state);
    }
    let ops = tracker.ops();
    assert!(
        ops.total() <= 4 * n,
        "structure operations {} exceed 4n = {}",
        ops.total(),
        4 * n
    );
}

#[test]
fn amortized_budget_holds_across_resets() {
    // Counters are cumulative, so the linear budget must survive a tracker
    // being reused for many samples.
    let chain = gen_random(300, 9, DEFAULT_PALETTE).unwrap();
    let product = build_product(&chain, &builtin_dra(BuiltinProperty::GFp)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut tracker = Tracker::new(&product);
    let n = 50_000u64;
    let mut state: StateId = 0;
    for i in 0..n {
        tracker.step(state).unwrap();
        if i % 1000 == 999 {
            tracker.reset();
            state = rng.random_range(0..product.n_states());
            continue;
        }
        state = weighted_step(&mut rng, &product, state);
    }
    assert!(tracker.ops().total() <= 4 * n, "{} > {}", tracker.ops().total(), 4 * n);
}

/// Product soundness: projecting a sampled product run onto the chain gives
/// a valid chain run, and the automaton component always equals the
/// transition function folded over the projected labels.
#[test]
fn product_runs_project_onto_chain_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(31415);
    for round in 0..200u64 {
        let chain: MarkovChain = gen_random(3 + (round % 8) as u32, round, DEFAULT_PALETTE).unwrap();
        let dra: RabinAutomaton = builtin_dra(BuiltinProperty::ALL[(round % 5) as usize]);
        let product = build_product(&chain, &dra).unwrap();

        // Sample an initial product state per the initial distribution.
        let r: f64 = rng.random();
        let mut acc = 0.0;
        let mut s = product.initial()[0].0;
        for &(cand, p) in product.initial() {
            acc += p;
            if r < acc {
                s = cand;
                break;
            }
        }
        let (cs, q0) = product.state_pair(s);
        assert_eq!(q0, dra.step(dra.initial(), chain.label(cs)));

        let mut prev = s;
        for _ in 0..100 {
            let next = weighted_step(&mut rng, &product, prev);
            let (pc, pq) = product.state_pair(prev);
            let (nc, nq) = product.state_pair(next);
            // The chain edge exists with the same probability.
            let chain_prob = chain
                .transitions(pc)
                .iter()
                .find(|&&(t, _)| t == nc)
                .map(|&(_, p)| p)
                .expect("projected edge exists in the chain");
            let product_prob = product
                .transitions(prev)
                .iter()
                .find(|&&(t, _)| t == next)
                .map(|&(_, p)| p)
                .unwrap();
            assert_eq!(chain_prob, product_prob);
            // The automaton component tracks the label sequence exactly.
            assert_eq!(nq, dra.step(pq, chain.label(nc)));
            prev = next;
        }
    }
}

/// The exact reachability solver against a Monte-Carlo estimate from
/// oracle-terminated runs. Tolerance is statistical: four standard errors
/// of the binomial estimate (a fixed absolute tolerance below the sampling
/// noise of 10^5 runs is not attainable).
#[test]
fn satisfaction_probability_matches_monte_carlo() {
    use resetmon_core::analysis::satisfaction_probability;
    let fig1 = build_product(
        &resetmon_core::models::gen_fig1(4),
        &builtin_dra(BuiltinProperty::Fp),
    )
    .unwrap();
    let random = random_product(321, 20);
    for (name, product) in [("fig1", &fig1), ("random", &random)] {
        let exact = satisfaction_probability(product).unwrap();
        let dec = scc_decompose(product);
        let runs = 100_000u64;
        let mut good = 0u64;
        let mut rng = ChaCha8Rng::seed_from_u64(0xACC);
        for _ in 0..runs {
            let mut tracker = Tracker::new(product);
            let mut state = {
                let r: f64 = rng.random();
                let mut acc = 0.0;
                let mut chosen = product.initial()[0].0;
                for &(s, p) in product.initial() {
                    acc += p;
                    if r < acc {
                        chosen = s;
                        break;
                    }
                }
                chosen
            };
            loop {
                tracker.step(state).unwrap();
                if let Some(c) = tracker.candidate() {
                    if c.strength >= 1 {
                        let comp = dec.component_of[c.members[0] as usize] as usize;
                        if dec.is_bottom[comp] && dec.components[comp].len() == c.members.len() {
                            if c.verdict == Verdict::Good {
                                good += 1;
                            }
                            break;
                        }
                    }
                }
                state = weighted_step(&mut rng, product, state);
            }
        }
        let estimate = good as f64 / runs as f64;
        let se = (exact * (1.0 - exact) / runs as f64).sqrt();
        let tolerance = (4.0 * se).max(1e-6);
        assert!(
            (estimate - exact).abs() <= tolerance,
            "{name}: Monte-Carlo {estimate} vs exact {exact}, tolerance {tolerance}"
        );
    }
}

#[test]
fn classify_matches_brute_force_on_random_sets() {
    // classify_scc against a direct evaluation of the pair definition over
    // random member sets.
    let mut rng = ChaCha8Rng::seed_from_u64(555);
    let mut checked = 0;
    for round in 0..400u64 {
        let product = random_product(round.wrapping_add(900), 30);
        for _ in 0..3 {
            let size = rng.random_range(1..=product.n_states() as usize);
            let mut members: Vec<StateId> = Vec::new();
            while members.len() < size {
                let s = rng.random_range(0..product.n_states());
                if !members.contains(&s) {
                    members.push(s);
                }
            }
            let brute = (0..product.n_pairs()).any(|k| {
                let touches_e = members.iter().any(|&s| product.e_mask(s) & (1 << k) != 0);
                let touches_f = members.iter().any(|&s| product.f_mask(s) & (1 << k) != 0);
                !touches_e && touches_f
            });
            let verdict = product.classify(&members);
            assert_eq!(verdict == Verdict::Good, brute);
            checked += 1;
        }
    }
    assert!(checked >= 1000);
}
