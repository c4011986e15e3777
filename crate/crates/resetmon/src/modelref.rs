//! Resolution of model and property references.
//!
//! Models: a file path in the explicit-state format, or
//! `builtin:fig1:<n>`, `builtin:fig2:<n>`, `builtin:random:<n>:<seed>`.
//! Properties: a file path in the HOA subset, or `prop:<name>` for the
//! built-in automata (`Fp`, `Gp`, `GFp`, `FGp`, `GFimpliesFG`).

use std::path::Path;

use thiserror::Error;

use resetmon_core::models::{builtin_dra, BuiltinProperty, Family, FamilySpec, GenError};
use resetmon_core::{MarkovChain, RabinAutomaton};

use crate::parse::{parse_chain, parse_dra_hoa, ChainParseError, HoaParseError};

#[derive(Debug, Error)]
pub enum ModelRefError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad model/property reference `{0}`: {1}")]
    BadReference(String, String),
    #[error(transparent)]
    Generation(#[from] GenError),
    #[error(transparent)]
    Chain(#[from] ChainParseError),
    #[error(transparent)]
    Hoa(#[from] HoaParseError),
}

impl ModelRefError {
    /// True for parse errors in input files (CLI exit code 3); everything
    /// else is a configuration error (exit code 2).
    pub fn is_parse_error(&self) -> bool {
        matches!(self, ModelRefError::Chain(_) | ModelRefError::Hoa(_))
    }
}

fn read(path: &str) -> Result<String, ModelRefError> {
    std::fs::read_to_string(Path::new(path))
        .map_err(|source| ModelRefError::Io { path: path.to_string(), source })
}

/// Resolves a model reference into a chain.
pub fn resolve_model(reference: &str) -> Result<MarkovChain, ModelRefError> {
    let Some(rest) = reference.strip_prefix("builtin:") else {
        return Ok(parse_chain(&read(reference)?)?);
    };
    let parts: Vec<&str> = rest.split(':').collect();
    let bad = |msg: &str| ModelRefError::BadReference(reference.to_string(), msg.to_string());
    let parse_n = |tok: &str| tok.parse::<u32>().map_err(|_| bad("bad size parameter"));
    let spec = match parts.as_slice() {
        ["fig1", n] => FamilySpec { family: Family::Fig1, n: parse_n(n)?, seed: None, prob_palette: None },
        ["fig2", n] => FamilySpec { family: Family::Fig2, n: parse_n(n)?, seed: None, prob_palette: None },
        ["random", n, seed] => FamilySpec {
            family: Family::Random,
            n: parse_n(n)?,
            seed: Some(seed.parse().map_err(|_| bad("bad seed"))?),
            prob_palette: None,
        },
        _ => return Err(bad("expected fig1:<n>, fig2:<n> or random:<n>:<seed>")),
    };
    Ok(spec.generate()?)
}

/// Resolves a property reference into an automaton.
pub fn resolve_prop(reference: &str) -> Result<RabinAutomaton, ModelRefError> {
    let Some(name) = reference.strip_prefix("prop:") else {
        return Ok(parse_dra_hoa(&read(reference)?)?);
    };
    let prop = BuiltinProperty::from_name(name).ok_or_else(|| {
        ModelRefError::BadReference(
            reference.to_string(),
            format!("unknown builtin property `{name}` (have Fp, Gp, GFp, FGp, GFimpliesFG)"),
        )
    })?;
    Ok(builtin_dra(prop))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_references_resolve() {
        assert_eq!(resolve_model("builtin:fig1:4").unwrap().n_states(), 7);
        assert_eq!(resolve_model("builtin:fig2:4").unwrap().n_states(), 5);
        assert_eq!(
            resolve_model("builtin:random:6:42").unwrap(),
            resolve_model("builtin:random:6:42").unwrap()
        );
        assert_eq!(resolve_prop("prop:GFp").unwrap().n_states(), 2);
    }

    #[test]
    fn bad_references_are_config_errors() {
        let err = resolve_model("builtin:fig3:4").unwrap_err();
        assert!(!err.is_parse_error());
        let err = resolve_prop("prop:Xp").unwrap_err();
        assert!(!err.is_parse_error());
    }

    #[test]
    fn files_round_trip_through_the_parsers() {
        let dir = std::env::temp_dir().join("resetmon-modelref-test");
        std::fs::create_dir_all(&dir).unwrap();
        let chain_path = dir.join("chain.mc");
        let chain = resolve_model("builtin:fig2:2").unwrap();
        std::fs::write(&chain_path, crate::parse::serialize_chain(&chain)).unwrap();
        let loaded = resolve_model(chain_path.to_str().unwrap()).unwrap();
        assert_eq!(loaded, chain);
    }
}
