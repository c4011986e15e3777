//! Input formats: the explicit-state chain format and the HOA subset for
//! deterministic Rabin automata.

mod chain_format;
mod hoa;

pub use chain_format::{parse_chain, serialize_chain, ChainParseError};
pub use hoa::{parse_dra_hoa, HoaParseError};
