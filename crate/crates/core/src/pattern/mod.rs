//! Pattern frontend: parsing, exact-match normalization, repetition expansion.

mod ast;
mod normalize;
mod parser;

pub use ast::{LoopId, PatternAst, PatternKind, Span, UnsupportedKind};
pub use normalize::{normalize, Expansion, NormalizeConfig, NormalizeError, TranslationReport};
pub use parser::{parse, ParseError, ParseErrorKind};
