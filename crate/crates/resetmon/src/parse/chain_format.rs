//! Explicit-state chain format.
//!
//! ```text
//! # comment
//! mc <nstates> <nap>
//! <ap names, whitespace separated>     # present only when nap > 0
//! state <id> [<bitset>] init=<prob>    # bitset: nap chars of 0/1
//! <src> <dst> <prob>                   # prob: decimal or a/b rational
//! ```
//!
//! Comments run from `#` to end of line; blank lines are ignored. Every
//! state must be declared by exactly one `state` line; transition lines may
//! appear in any order after the header.

use resetmon_core::{MarkovChain, StateId};
use std::fmt::Write as _;
use thiserror::Error;

/// Parse diagnostic with a stable code and a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{code} at {line}:{col}: {message}")]
pub struct ChainParseError {
    pub code: &'static str,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ChainParseError {
    fn new(code: &'static str, line: usize, col: usize, message: String) -> Self {
        ChainParseError { code, line, col, message }
    }
}

const E_SYNTAX: &str = "E_SYNTAX";
const E_HEADER: &str = "E_HEADER";
const E_ROWSUM: &str = "E_ROWSUM";
const E_UNKNOWN_STATE: &str = "E_UNKNOWN_STATE";
const E_DUP_TRANSITION: &str = "E_DUP_TRANSITION";
const E_DUP_STATE: &str = "E_DUP_STATE";
const E_MISSING_STATE: &str = "E_MISSING_STATE";
const E_PROB: &str = "E_PROB";
const E_INITSUM: &str = "E_INITSUM";
const E_LABEL: &str = "E_LABEL";

/// Tokens of a line with their 1-based column, comments stripped.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &body[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &body[s..]));
    }
    out
}

fn parse_prob(tok: &str, line: usize, col: usize) -> Result<f64, ChainParseError> {
    let value = if let Some((a, b)) = tok.split_once('/') {
        let num: f64 = a.parse().map_err(|_| {
            ChainParseError::new(E_PROB, line, col, format!("bad rational numerator `{a}`"))
        })?;
        let den: f64 = b.parse().map_err(|_| {
            ChainParseError::new(E_PROB, line, col, format!("bad rational denominator `{b}`"))
        })?;
        if den == 0.0 {
            return Err(ChainParseError::new(E_PROB, line, col, "zero denominator".into()));
        }
        num / den
    } else {
        tok.parse().map_err(|_| {
            ChainParseError::new(E_PROB, line, col, format!("bad probability `{tok}`"))
        })?
    };
    if !value.is_finite() || value < 0.0 {
        return Err(ChainParseError::new(E_PROB, line, col, format!("probability `{tok}` out of range")));
    }
    Ok(value)
}

fn parse_id(tok: &str, line: usize, col: usize) -> Result<u64, ChainParseError> {
    tok.parse().map_err(|_| {
        ChainParseError::new(E_SYNTAX, line, col, format!("expected a state id, found `{tok}`"))
    })
}

/// Parses the explicit-state format into a validated chain.
pub fn parse_chain(text: &str) -> Result<MarkovChain, ChainParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    // Header.
    let (hdr_line, hdr) = loop {
        match lines.next() {
            Some((ln, l)) => {
                let toks = tokens(l);
                if toks.is_empty() {
                    continue;
                }
                break (ln, toks);
            }
            None => {
                return Err(ChainParseError::new(E_HEADER, 1, 1, "empty input, expected `mc <nstates> <nap>`".into()));
            }
        }
    };
    if hdr.len() != 3 || hdr[0].1 != "mc" {
        return Err(ChainParseError::new(
            E_HEADER,
            hdr_line,
            hdr[0].0,
            "expected header `mc <nstates> <nap>`".into(),
        ));
    }
    let n_states = parse_id(hdr[1].1, hdr_line, hdr[1].0)? as usize;
    let n_ap = parse_id(hdr[2].1, hdr_line, hdr[2].0)? as usize;
    if n_states == 0 {
        return Err(ChainParseError::new(E_HEADER, hdr_line, hdr[1].0, "chain needs at least one state".into()));
    }

    // Proposition names, only when declared.
    let mut ap: Vec<String> = Vec::new();
    if n_ap > 0 {
        let (ln, toks) = loop {
            match lines.next() {
                Some((ln, l)) => {
                    let toks = tokens(l);
                    if toks.is_empty() {
                        continue;
                    }
                    break (ln, toks);
                }
                None => {
                    return Err(ChainParseError::new(E_HEADER, hdr_line + 1, 1, format!("expected {n_ap} proposition names")));
                }
            }
        };
        if toks.len() != n_ap {
            return Err(ChainParseError::new(
                E_HEADER,
                ln,
                toks[0].0,
                format!("expected {n_ap} proposition names, found {}", toks.len()),
            ));
        }
        ap = toks.iter().map(|&(_, t)| t.to_string()).collect();
    }

    let mut declared: Vec<Option<(usize, u32, f64)>> = vec![None; n_states]; // line, label, init
    let mut rows: Vec<Vec<(StateId, f64)>> = vec![Vec::new(); n_states];
    let mut row_line: Vec<usize> = vec![0; n_states];

    for (ln, l) in lines {
        let toks = tokens(l);
        if toks.is_empty() {
            continue;
        }
        if toks[0].1 == "state" {
            if toks.len() != 4 {
                return Err(ChainParseError::new(E_SYNTAX, ln, toks[0].0, "expected `state <id> [<bitset>] init=<prob>`".into()));
            }
            let id = parse_id(toks[1].1, ln, toks[1].0)?;
            if id >= n_states as u64 {
                return Err(ChainParseError::new(
                    E_UNKNOWN_STATE,
                    ln,
                    toks[1].0,
                    format!("state {id} out of range 0..{n_states}"),
                ));
            }
            let (lcol, ltok) = toks[2];
            let bits = ltok
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(|| ChainParseError::new(E_LABEL, ln, lcol, format!("expected `[<bitset>]`, found `{ltok}`")))?;
            if bits.len() != n_ap || bits.chars().any(|c| c != '0' && c != '1') {
                return Err(ChainParseError::new(
                    E_LABEL,
                    ln,
                    lcol,
                    format!("label bitset `{bits}` must be {n_ap} chars of 0/1"),
                ));
            }
            let mut label = 0u32;
            for (i, c) in bits.chars().enumerate() {
                if c == '1' {
                    label |= 1 << i;
                }
            }
            let (icol, itok) = toks[3];
            let init_tok = itok.strip_prefix("init=").ok_or_else(|| {
                ChainParseError::new(E_SYNTAX, ln, icol, format!("expected `init=<prob>`, found `{itok}`"))
            })?;
            let init = parse_prob(init_tok, ln, icol)?;
            if declared[id as usize].is_some() {
                return Err(ChainParseError::new(E_DUP_STATE, ln, toks[1].0, format!("state {id} declared twice")));
            }
            declared[id as usize] = Some((ln, label, init));
        } else {
            if toks.len() != 3 {
                return Err(ChainParseError::new(E_SYNTAX, ln, toks[0].0, "expected `<src> <dst> <prob>`".into()));
            }
            let src = parse_id(toks[0].1, ln, toks[0].0)?;
            let dst = parse_id(toks[1].1, ln, toks[1].0)?;
            for (&id, col) in [(&src, toks[0].0), (&dst, toks[1].0)] {
                if id >= n_states as u64 {
                    return Err(ChainParseError::new(
                        E_UNKNOWN_STATE,
                        ln,
                        col,
                        format!("state {id} out of range 0..{n_states}"),
                    ));
                }
            }
            let p = parse_prob(toks[2].1, ln, toks[2].0)?;
            if p <= 0.0 {
                return Err(ChainParseError::new(E_PROB, ln, toks[2].0, "transition probability must be positive".into()));
            }
            let row = &mut rows[src as usize];
            if row.iter().any(|&(t, _)| t as u64 == dst) {
                return Err(ChainParseError::new(
                    E_DUP_TRANSITION,
                    ln,
                    toks[1].0,
                    format!("duplicate transition {src} -> {dst}"),
                ));
            }
            if row.is_empty() {
                row_line[src as usize] = ln;
            }
            row.push((dst as StateId, p));
        }
    }

    // Per-state validation.
    let mut labels = vec![0u32; n_states];
    let mut initial: Vec<(StateId, f64)> = Vec::new();
    let mut init_sum = 0.0;
    for s in 0..n_states {
        let (ln, label, init) = declared[s].ok_or_else(|| {
            ChainParseError::new(E_MISSING_STATE, 1, 1, format!("state {s} has no `state` line"))
        })?;
        labels[s] = label;
        if init > 0.0 {
            initial.push((s as StateId, init));
            init_sum += init;
        }
        let sum: f64 = rows[s].iter().map(|&(_, p)| p).sum();
        if rows[s].is_empty() {
            return Err(ChainParseError::new(E_ROWSUM, ln, 1, format!("state {s} has no transitions")));
        }
        if (sum - 1.0).abs() > resetmon_core::PROB_SUM_TOLERANCE {
            return Err(ChainParseError::new(
                E_ROWSUM,
                row_line[s],
                1,
                format!("state {s}: outgoing probabilities sum to {sum}"),
            ));
        }
    }
    if (init_sum - 1.0).abs() > resetmon_core::PROB_SUM_TOLERANCE {
        return Err(ChainParseError::new(E_INITSUM, hdr_line, 1, format!("initial distribution sums to {init_sum}")));
    }

    MarkovChain::new(rows, initial, labels, ap)
        .map_err(|e| ChainParseError::new(E_SYNTAX, hdr_line, 1, format!("model validation failed: {e}")))
}

/// Serializes a chain in canonical order; `parse_chain` returns an
/// identical chain.
pub fn serialize_chain(chain: &MarkovChain) -> String {
    let mut out = String::new();
    let n = chain.n_states();
    let _ = writeln!(out, "mc {} {}", n, chain.ap().len());
    if !chain.ap().is_empty() {
        let _ = writeln!(out, "{}", chain.ap().join(" "));
    }
    for s in 0..n {
        let mut bits = String::new();
        for i in 0..chain.ap().len() {
            bits.push(if chain.label(s) & (1 << i) != 0 { '1' } else { '0' });
        }
        let init = chain
            .initial()
            .iter()
            .find(|&&(t, _)| t == s)
            .map(|&(_, p)| p)
            .unwrap_or(0.0);
        let _ = writeln!(out, "state {s} [{bits}] init={init}");
    }
    for s in 0..n {
        for &(t, p) in chain.transitions(s) {
            let _ = writeln!(out, "{s} {t} {p}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_STATE: &str = "\
mc 2 1
p
state 0 [0] init=1
state 1 [1] init=0
0 0 1/2
0 1 1/2
1 1 1
";

    #[test]
    fn parses_the_format_example() {
        let c = parse_chain(TWO_STATE).unwrap();
        assert_eq!(c.n_states(), 2);
        assert_eq!(c.transitions(0), &[(0, 0.5), (1, 0.5)]);
        assert_eq!(c.label(1), 1);
        assert_eq!(c.initial(), &[(0, 1.0)]);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = format!("# a chain\n\n{TWO_STATE}\n# trailing\n");
        assert!(parse_chain(&text).is_ok());
    }

    #[test]
    fn row_sum_error_names_the_state() {
        let bad = TWO_STATE.replace("0 1 1/2", "0 1 0.4");
        let err = parse_chain(&bad).unwrap_err();
        assert_eq!(err.code, "E_ROWSUM");
        assert!(err.message.contains("state 0"), "{err}");
    }

    #[test]
    fn unknown_state_reference() {
        let bad = TWO_STATE.replace("1 1 1", "1 7 1");
        let err = parse_chain(&bad).unwrap_err();
        assert_eq!(err.code, "E_UNKNOWN_STATE");
        assert_eq!(err.line, 7);
    }

    #[test]
    fn duplicate_transition() {
        let bad = TWO_STATE.replace("0 1 1/2", "0 0 1/2");
        let err = parse_chain(&bad).unwrap_err();
        assert_eq!(err.code, "E_DUP_TRANSITION");
    }

    #[test]
    fn duplicate_state_line() {
        let bad = TWO_STATE.replace("state 1 [1] init=0", "state 0 [0] init=0");
        let err = parse_chain(&bad).unwrap_err();
        assert_eq!(err.code, "E_DUP_STATE");
    }

    #[test]
    fn initial_sum_checked() {
        let bad = TWO_STATE.replace("state 0 [0] init=1", "state 0 [0] init=0.5");
        let err = parse_chain(&bad).unwrap_err();
        assert_eq!(err.code, "E_INITSUM");
    }

    #[test]
    fn round_trip_identical() {
        let c = parse_chain(TWO_STATE).unwrap();
        let text = serialize_chain(&c);
        let c2 = parse_chain(&text).unwrap();
        assert_eq!(c, c2);
    }
}
