//! HOA v1 subset for deterministic Rabin automata.
//!
//! Accepted shape: explicit labels over declared APs, state-based
//! acceptance, a single start state, and an acceptance condition that is a
//! disjunction of `Fin(2k) & Inf(2k+1)` Rabin pairs in order. Every state
//! must have exactly one matching edge per letter.

use resetmon_core::dra::RabinPair;
use resetmon_core::{RabinAutomaton, StateId};
use thiserror::Error;

/// Parse diagnostic with a stable code and a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{code} at {line}:{col}: {message}")]
pub struct HoaParseError {
    pub code: &'static str,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl HoaParseError {
    fn new(code: &'static str, line: usize, col: usize, message: impl Into<String>) -> Self {
        HoaParseError { code, line, col, message: message.into() }
    }
}

const E_SYNTAX: &str = "E_HOA_SYNTAX";
const E_VERSION: &str = "E_HOA_VERSION";
const E_MISSING: &str = "E_HOA_MISSING_HEADER";
const E_BODY: &str = "E_HOA_BODY";
const E_NONDET: &str = "E_HOA_NONDET";
const E_ACCEPTANCE: &str = "E_HOA_ACCEPTANCE";
const E_UNDECLARED_AP: &str = "E_HOA_UNDECLARED_AP";
const E_INCOMPLETE: &str = "E_HOA_INCOMPLETE";
const E_STATE: &str = "E_HOA_STATE";

/// Boolean label formula over AP indices.
#[derive(Debug, Clone)]
enum LabelExpr {
    True,
    False,
    Ap(u32),
    Not(Box<LabelExpr>),
    And(Box<LabelExpr>, Box<LabelExpr>),
    Or(Box<LabelExpr>, Box<LabelExpr>),
}

impl LabelExpr {
    fn eval(&self, letter: u32) -> bool {
        match self {
            LabelExpr::True => true,
            LabelExpr::False => false,
            LabelExpr::Ap(i) => letter & (1 << i) != 0,
            LabelExpr::Not(e) => !e.eval(letter),
            LabelExpr::And(a, b) => a.eval(letter) && b.eval(letter),
            LabelExpr::Or(a, b) => a.eval(letter) || b.eval(letter),
        }
    }
}

struct LabelParser<'a> {
    src: &'a str,
    pos: usize,
    n_ap: u32,
    line: usize,
    col0: usize,
}

impl<'a> LabelParser<'a> {
    fn err(&self, code: &'static str, msg: String) -> HoaParseError {
        HoaParseError::new(code, self.line, self.col0 + self.pos, msg)
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(' ') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn parse_or(&mut self) -> Result<LabelExpr, HoaParseError> {
        let mut e = self.parse_and()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            e = LabelExpr::Or(Box::new(e), Box::new(self.parse_and()?));
        }
        Ok(e)
    }

    fn parse_and(&mut self) -> Result<LabelExpr, HoaParseError> {
        let mut e = self.parse_atom()?;
        while self.peek() == Some('&') {
            self.pos += 1;
            e = LabelExpr::And(Box::new(e), Box::new(self.parse_atom()?));
        }
        Ok(e)
    }

    fn parse_atom(&mut self) -> Result<LabelExpr, HoaParseError> {
        match self.peek() {
            Some('!') => {
                self.pos += 1;
                Ok(LabelExpr::Not(Box::new(self.parse_atom()?)))
            }
            Some('(') => {
                self.pos += 1;
                let e = self.parse_or()?;
                if self.peek() != Some(')') {
                    return Err(self.err(E_SYNTAX, "expected `)` in label".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some('t') => {
                self.pos += 1;
                Ok(LabelExpr::True)
            }
            Some('f') => {
                self.pos += 1;
                Ok(LabelExpr::False)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let idx: u32 = self.src[start..self.pos].parse().unwrap();
                if idx >= self.n_ap {
                    return Err(self.err(
                        E_UNDECLARED_AP,
                        format!("AP index {idx} not declared (have {})", self.n_ap),
                    ));
                }
                Ok(LabelExpr::Ap(idx))
            }
            other => Err(self.err(E_SYNTAX, format!("unexpected `{other:?}` in label"))),
        }
    }
}

fn parse_label(
    src: &str,
    n_ap: u32,
    line: usize,
    col0: usize,
) -> Result<LabelExpr, HoaParseError> {
    let mut p = LabelParser { src, pos: 0, n_ap, line, col0 };
    let e = p.parse_or()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.err(E_SYNTAX, "trailing tokens in label".into()));
    }
    Ok(e)
}

/// Splits `Acceptance:` into Rabin pairs `Fin(2k) & Inf(2k+1)`, in order.
fn parse_acceptance(cond: &str, n_sets: u32, line: usize) -> Result<u32, HoaParseError> {
    let unsupported = |msg: String| HoaParseError::new(E_ACCEPTANCE, line, 1, msg);
    let terms: Vec<&str> = cond.split('|').map(str::trim).collect();
    if n_sets == 0 || !n_sets.is_multiple_of(2) || terms.len() as u32 != n_sets / 2 {
        return Err(unsupported(format!(
            "acceptance `{cond}` with {n_sets} sets is not a disjunction of Fin/Inf Rabin pairs"
        )));
    }
    for (k, term) in terms.iter().enumerate() {
        let compact: String = term.chars().filter(|c| !c.is_whitespace()).collect();
        let expected = format!("Fin({})&Inf({})", 2 * k, 2 * k + 1);
        if compact != expected && compact != format!("({expected})") {
            return Err(unsupported(format!(
                "term `{term}` is not the Rabin pair `Fin({}) & Inf({})`",
                2 * k,
                2 * k + 1
            )));
        }
    }
    Ok(n_sets / 2)
}

/// Parses the HOA subset into a deterministic Rabin automaton.
pub fn parse_dra_hoa(text: &str) -> Result<RabinAutomaton, HoaParseError> {
    let mut n_states: Option<u32> = None;
    let mut start: Option<(StateId, usize)> = None;
    let mut ap: Option<Vec<String>> = None;
    let mut n_pairs: Option<u32> = None;
    let mut saw_hoa = false;
    let mut body_line = None;

    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let raw = lines[i];
        let line_no = i + 1;
        i += 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "--BODY--" {
            body_line = Some(line_no);
            break;
        }
        let (key, rest) = match line.split_once(':') {
            Some((k, r)) => (k.trim(), r.trim()),
            None => {
                return Err(HoaParseError::new(E_SYNTAX, line_no, 1, format!("expected `Header: value`, found `{line}`")));
            }
        };
        match key {
            "HOA" => {
                if rest != "v1" {
                    return Err(HoaParseError::new(E_VERSION, line_no, 1, format!("unsupported HOA version `{rest}`")));
                }
                saw_hoa = true;
            }
            "States" => {
                n_states = Some(rest.parse().map_err(|_| {
                    HoaParseError::new(E_SYNTAX, line_no, 1, format!("bad state count `{rest}`"))
                })?);
            }
            "Start" => {
                if start.is_some() || rest.contains('&') || rest.split_whitespace().count() != 1 {
                    return Err(HoaParseError::new(E_NONDET, line_no, 1, "exactly one start state required".to_string()));
                }
                let s: StateId = rest.parse().map_err(|_| {
                    HoaParseError::new(E_SYNTAX, line_no, 1, format!("bad start state `{rest}`"))
                })?;
                start = Some((s, line_no));
            }
            "AP" => {
                let mut parts = rest.splitn(2, char::is_whitespace);
                let count: usize = parts.next().unwrap_or("").parse().map_err(|_| {
                    HoaParseError::new(E_SYNTAX, line_no, 1, format!("bad AP count in `{rest}`"))
                })?;
                let names_part = parts.next().unwrap_or("").trim();
                let mut names = Vec::new();
                let mut rest_names = names_part;
                while !rest_names.is_empty() {
                    let Some(stripped) = rest_names.strip_prefix('"') else {
                        return Err(HoaParseError::new(E_SYNTAX, line_no, 1, "AP names must be quoted".to_string()));
                    };
                    let Some(end) = stripped.find('"') else {
                        return Err(HoaParseError::new(E_SYNTAX, line_no, 1, "unterminated AP name".to_string()));
                    };
                    names.push(stripped[..end].to_string());
                    rest_names = stripped[end + 1..].trim_start();
                }
                if names.len() != count {
                    return Err(HoaParseError::new(
                        E_SYNTAX,
                        line_no,
                        1,
                        format!("AP header declares {count} names but lists {}", names.len()),
                    ));
                }
                ap = Some(names);
            }
            "Acceptance" => {
                let mut parts = rest.splitn(2, char::is_whitespace);
                let n_sets: u32 = parts.next().unwrap_or("").parse().map_err(|_| {
                    HoaParseError::new(E_SYNTAX, line_no, 1, format!("bad acceptance set count`{rest}`"))
                })?;
                let cond = parts.next().unwrap_or("").trim();
                n_pairs = Some(parse_acceptance(cond, n_sets, line_no)?);
            }
            // Informational headers are accepted and ignored.
            "acc-name" | "name" | "tool" | "properties" | "owner" | "Alias" => {}
            "State" => {
                return Err(HoaParseError::new(
                    E_BODY,
                    line_no,
                    1,
                    "state definition before `--BODY--`".to_string(),
                ));
            }
            other => {
                return Err(HoaParseError::new(E_SYNTAX, line_no, 1, format!("unknown header `{other}`")));
            }
        }
    }

    let body_line = body_line.ok_or_else(|| {
        HoaParseError::new(E_BODY, lines.len().max(1), 1, "missing `--BODY--`".to_string())
    })?;
    if !saw_hoa {
        return Err(HoaParseError::new(E_MISSING, 1, 1, "missing `HOA: v1`".to_string()));
    }
    let n_states = n_states.ok_or_else(|| HoaParseError::new(E_MISSING, body_line, 1, "missing `States:`".to_string()))?;
    let (start, _) = start.ok_or_else(|| HoaParseError::new(E_MISSING, body_line, 1, "missing `Start:`".to_string()))?;
    let ap = ap.ok_or_else(|| HoaParseError::new(E_MISSING, body_line, 1, "missing `AP:`".to_string()))?;
    let n_pairs = n_pairs.ok_or_else(|| HoaParseError::new(E_MISSING, body_line, 1, "missing `Acceptance:`".to_string()))?;
    if ap.len() > 16 {
        return Err(HoaParseError::new(E_SYNTAX, body_line, 1, "at most 16 APs supported".to_string()));
    }

    // Body: states with their acceptance sets and labelled edges.
    struct StateBody {
        line: usize,
        acc_sets: Vec<u32>,
        edges: Vec<(LabelExpr, StateId)>,
    }
    let mut bodies: Vec<Option<StateBody>> = (0..n_states).map(|_| None).collect();
    let mut current: Option<usize> = None;
    let mut ended = false;

    while i < lines.len() {
        let raw = lines[i];
        let line_no = i + 1;
        i += 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "--END--" {
            ended = true;
            break;
        }
        if let Some(rest) = line.strip_prefix("State:") {
            let rest = rest.trim();
            if rest.starts_with('[') {
                return Err(HoaParseError::new(E_ACCEPTANCE, line_no, 1, "state labels are not supported".to_string()));
            }
            // `<id> [{sets}]`, a trailing quoted name is not supported.
            let (id_part, acc_part) = match rest.split_once('{') {
                Some((a, b)) => (a.trim(), Some(b)),
                None => (rest, None),
            };
            let id: u32 = id_part.parse().map_err(|_| {
                HoaParseError::new(E_SYNTAX, line_no, 1, format!("bad state id `{id_part}`"))
            })?;
            if id >= n_states {
                return Err(HoaParseError::new(E_STATE, line_no, 1, format!("state {id} out of range 0..{n_states}")));
            }
            let mut acc_sets = Vec::new();
            if let Some(acc) = acc_part {
                let Some(inner) = acc.strip_suffix('}') else {
                    return Err(HoaParseError::new(E_SYNTAX, line_no, 1, "unterminated acceptance set list".to_string()));
                };
                for tok in inner.split_whitespace() {
                    let set: u32 = tok.parse().map_err(|_| {
                        HoaParseError::new(E_SYNTAX, line_no, 1, format!("bad acceptance set `{tok}`"))
                    })?;
                    if set >= 2 * n_pairs {
                        return Err(HoaParseError::new(
                            E_ACCEPTANCE,
                            line_no,
                            1,
                            format!("acceptance set {set} not declared"),
                        ));
                    }
                    acc_sets.push(set);
                }
            }
            if bodies[id as usize].is_some() {
                return Err(HoaParseError::new(E_STATE, line_no, 1, format!("state {id} defined twice")));
            }
            bodies[id as usize] = Some(StateBody { line: line_no, acc_sets, edges: Vec::new() });
            current = Some(id as usize);
        } else if let Some(rest) = line.strip_prefix('[') {
            let Some(cur) = current else {
                return Err(HoaParseError::new(E_SYNTAX, line_no, 1, "edge before any `State:`".to_string()));
            };
            let Some(close) = rest.find(']') else {
                return Err(HoaParseError::new(E_SYNTAX, line_no, 1, "unterminated label".to_string()));
            };
            let label = parse_label(&rest[..close], ap.len() as u32, line_no, 2)?;
            let dest_part = rest[close + 1..].trim();
            if dest_part.contains('{') {
                return Err(HoaParseError::new(
                    E_ACCEPTANCE,
                    line_no,
                    1,
                    "edge-based acceptance is not supported (state-based required)".to_string(),
                ));
            }
            if dest_part.contains('&') || dest_part.split_whitespace().count() != 1 {
                return Err(HoaParseError::new(E_NONDET, line_no, 1, format!("expected one destination, found `{dest_part}`")));
            }
            let dst: u32 = dest_part.parse().map_err(|_| {
                HoaParseError::new(E_SYNTAX, line_no, 1, format!("bad destination `{dest_part}`"))
            })?;
            if dst >= n_states {
                return Err(HoaParseError::new(E_STATE, line_no, 1, format!("state {dst} out of range 0..{n_states}")));
            }
            bodies[cur].as_mut().unwrap().edges.push((label, dst));
        } else {
            return Err(HoaParseError::new(E_SYNTAX, line_no, 1, format!("unexpected body line `{line}`")));
        }
    }
    if !ended {
        return Err(HoaParseError::new(E_BODY, lines.len(), 1, "missing `--END--`".to_string()));
    }

    // Determinism and totality per letter; build the dense table.
    let n_letters = 1u32 << ap.len();
    let mut delta = vec![0u32; (n_states * n_letters) as usize];
    let mut pairs = vec![RabinPair { e: Vec::new(), f: Vec::new() }; n_pairs as usize];
    for q in 0..n_states {
        let body = bodies[q as usize].as_ref().ok_or_else(|| {
            HoaParseError::new(E_INCOMPLETE, body_line, 1, format!("state {q} has no body"))
        })?;
        for letter in 0..n_letters {
            let matching: Vec<StateId> = body
                .edges
                .iter()
                .filter(|(l, _)| l.eval(letter))
                .map(|&(_, d)| d)
                .collect();
            match matching.len() {
                0 => {
                    return Err(HoaParseError::new(
                        E_INCOMPLETE,
                        body.line,
                        1,
                        format!("state {q} has no edge for letter {letter:#b}"),
                    ));
                }
                1 => delta[(q * n_letters + letter) as usize] = matching[0],
                _ => {
                    return Err(HoaParseError::new(
                        E_NONDET,
                        body.line,
                        1,
                        format!("state {q} has {} edges for letter {letter:#b}", matching.len()),
                    ));
                }
            }
        }
        for &set in &body.acc_sets {
            let pair = &mut pairs[(set / 2) as usize];
            if set % 2 == 0 {
                pair.e.push(q);
            } else {
                pair.f.push(q);
            }
        }
    }

    RabinAutomaton::new(ap, n_states, start, delta, pairs)
        .map_err(|e| HoaParseError::new(E_SYNTAX, body_line, 1, format!("automaton validation failed: {e}")))
}
