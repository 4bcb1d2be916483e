use std::ops::Range;

use thiserror::Error;

use super::{tokenize, LexError, Token, TokenClass};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("line {line} is out of range (snippet has {line_count} lines)")]
    LineOutOfRange { line: usize, line_count: usize },
    #[error("token index {index} is out of range (snippet has {token_count} tokens)")]
    TokenOutOfRange { index: usize, token_count: usize },
    #[error("buggy line {0} holds no token")]
    EmptyBuggyLine(usize),
    #[error("snippet id must not be empty")]
    EmptyId,
}

/// A buggy code snippet with its known buggy line.
///
/// Immutable once built; all token and line structure is computed up front.
#[derive(Debug, Clone, PartialEq)]
pub struct Snippet {
    id: String,
    source: String,
    description: String,
    tokens: Vec<Token>,
    buggy_line: usize,
    line_ranges: Vec<Range<usize>>,
    line_texts: Vec<Range<usize>>,
}

impl Snippet {
    pub fn new(
        id: impl Into<String>,
        source: impl Into<String>,
        buggy_line: usize,
        description: impl Into<String>,
    ) -> Result<Self, CodeError> {
        let id = id.into();
        if id.is_empty() {
            return Err(CodeError::EmptyId);
        }
        let source = source.into();
        let tokens = tokenize(&source)?;

        let mut line_texts = Vec::new();
        let mut start = 0;
        for (i, b) in source.bytes().enumerate() {
            if b == b'\n' {
                line_texts.push(start..i);
                start = i + 1;
            }
        }
        if start < source.len() || line_texts.is_empty() {
            line_texts.push(start..source.len());
        }
        let line_count = line_texts.len();

        let mut line_ranges = Vec::with_capacity(line_count);
        let mut cursor = 0;
        for line in 1..=line_count {
            let begin = cursor;
            while cursor < tokens.len() && tokens[cursor].line == line {
                cursor += 1;
            }
            line_ranges.push(begin..cursor);
        }

        if buggy_line == 0 || buggy_line > line_count {
            return Err(CodeError::LineOutOfRange {
                line: buggy_line,
                line_count,
            });
        }
        if line_ranges[buggy_line - 1].is_empty() {
            return Err(CodeError::EmptyBuggyLine(buggy_line));
        }

        Ok(Self {
            id,
            source,
            description: description.into(),
            tokens,
            buggy_line,
            line_ranges,
            line_texts,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn token(&self, index: usize) -> Result<&Token, CodeError> {
        self.tokens.get(index).ok_or(CodeError::TokenOutOfRange {
            index,
            token_count: self.tokens.len(),
        })
    }

    pub fn buggy_line(&self) -> usize {
        self.buggy_line
    }

    pub fn line_count(&self) -> usize {
        self.line_ranges.len()
    }

    /// Source text of a 1-based line, without its line terminator.
    pub fn line_text(&self, line: usize) -> Result<&str, CodeError> {
        let range = self.line_texts.get(line.wrapping_sub(1)).ok_or(CodeError::LineOutOfRange {
            line,
            line_count: self.line_count(),
        })?;
        Ok(self.source[range.clone()].trim_end_matches('\r'))
    }

    /// Contiguous, possibly empty index range of the tokens starting on `line`.
    pub fn line_tokens(&self, line: usize) -> Result<Range<usize>, CodeError> {
        self.line_ranges
            .get(line.wrapping_sub(1))
            .cloned()
            .ok_or(CodeError::LineOutOfRange {
                line,
                line_count: self.line_count(),
            })
    }

    pub fn buggy_line_tokens(&self) -> Range<usize> {
        self.line_ranges[self.buggy_line - 1].clone()
    }

    pub fn is_on_buggy_line(&self, index: usize) -> bool {
        self.buggy_line_tokens().contains(&index)
    }

    /// Number of tokens of each class, in [`TokenClass::ALL`] order.
    pub fn class_counts(&self) -> [usize; 8] {
        let mut counts = [0; 8];
        for t in &self.tokens {
            let slot = TokenClass::ALL.iter().position(|c| *c == t.class).unwrap();
            counts[slot] += 1;
        }
        counts
    }

    /// Rebuilds the source from the tokens and the whitespace between them.
    pub fn reconstruct(&self) -> String {
        let mut out = String::with_capacity(self.source.len());
        let mut at = 0;
        for t in &self.tokens {
            out.push_str(&self.source[at..t.byte_start]);
            out.push_str(&t.text);
            at = t.byte_end;
        }
        out.push_str(&self.source[at..]);
        out
    }
}

/// Free-function form of [`Snippet::line_tokens`].
pub fn line_tokens(snippet: &Snippet, line: usize) -> Result<Range<usize>, CodeError> {
    snippet.line_tokens(line)
}
