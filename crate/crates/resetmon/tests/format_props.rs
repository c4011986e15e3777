//! Property tests for the file formats.

use proptest::prelude::*;

use resetmon::parse::{parse_chain, parse_dra_hoa, serialize_chain};
use resetmon_core::models::{builtin_dra, gen_random, BuiltinProperty};
use resetmon_core::RabinAutomaton;

proptest! {
    /// Serializing any generated chain and parsing it back yields an
    /// identical chain.
    #[test]
    fn chain_round_trip(n in 1u32..24, seed in any::<u64>(), wide in any::<bool>()) {
        let palette: &[f64] = if wide { &[0.5, 0.25] } else { &[0.5] };
        let chain = gen_random(n, seed, palette).unwrap();
        let text = serialize_chain(&chain);
        let parsed = parse_chain(&text).expect("serialized chains parse");
        prop_assert_eq!(parsed, chain);
    }
}

/// Rabin acceptance of `u . v^omega`, for the cross-format equivalence
/// check below.
fn accepts(a: &RabinAutomaton, u: &[u32], v: &[u32]) -> bool {
    let mut q = a.initial();
    for &l in u {
        q = a.step(q, l);
    }
    let mut starts = Vec::new();
    let mut visits: Vec<Vec<u32>> = Vec::new();
    loop {
        if let Some(i) = starts.iter().position(|&s| s == q) {
            let inf: std::collections::BTreeSet<u32> =
                visits[i..].iter().flatten().copied().collect();
            return a.pairs().iter().any(|p| {
                p.e.iter().all(|e| !inf.contains(e)) && p.f.iter().any(|f| inf.contains(f))
            });
        }
        starts.push(q);
        let mut block = Vec::with_capacity(v.len());
        for &l in v {
            q = a.step(q, l);
            block.push(q);
        }
        visits.push(block);
    }
}

#[test]
fn hoa_fp_is_equivalent_to_the_builtin() {
    let text = r#"HOA: v1
States: 2
Start: 0
AP: 1 "p"
Acceptance: 2 Fin(0) & Inf(1)
--BODY--
State: 0
[!0] 0
[0] 1
State: 1 {1}
[t] 1
--END--
"#;
    let parsed = parse_dra_hoa(text).unwrap();
    let builtin = builtin_dra(BuiltinProperty::Fp);
    for lu in 0..=5usize {
        for ub in 0..(1u32 << lu) {
            let u: Vec<u32> = (0..lu).map(|i| (ub >> i) & 1).collect();
            for lv in 1..=5usize {
                for vb in 0..(1u32 << lv) {
                    let v: Vec<u32> = (0..lv).map(|i| (vb >> i) & 1).collect();
                    assert_eq!(
                        accepts(&parsed, &u, &v),
                        accepts(&builtin, &u, &v),
                        "u={u:?} v={v:?}"
                    );
                }
            }
        }
    }
}
