//! Buggy code snippets as immutable, classified token streams.

mod classify;
mod corpus;
mod lexer;
mod snippet;
mod token;

pub use classify::{classify, LexicalKind, MODIFIERS, RESERVED_WORDS, TYPE_NAMES};
pub use corpus::{Corpus, CorpusError, SnippetDoc};
pub use lexer::{tokenize, tokenize_lenient, LexError};
pub use snippet::{line_tokens, CodeError, Snippet};
pub use token::{Token, TokenClass};
