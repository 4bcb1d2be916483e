use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Token family used for distance-from-uniformity grouping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenClass {
    Identifier,
    Keyword,
    Type,
    Modifier,
    Operator,
    Literal,
    Separator,
    Comment,
}

impl TokenClass {
    pub const ALL: [TokenClass; 8] = [
        TokenClass::Identifier,
        TokenClass::Keyword,
        TokenClass::Type,
        TokenClass::Modifier,
        TokenClass::Operator,
        TokenClass::Literal,
        TokenClass::Separator,
        TokenClass::Comment,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TokenClass::Identifier => "identifier",
            TokenClass::Keyword => "keyword",
            TokenClass::Type => "type",
            TokenClass::Modifier => "modifier",
            TokenClass::Operator => "operator",
            TokenClass::Literal => "literal",
            TokenClass::Separator => "separator",
            TokenClass::Comment => "comment",
        }
    }
}

impl fmt::Display for TokenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TokenClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TokenClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown token class `{s}`"))
    }
}

/// One lexical token of a snippet.
///
/// `line` is 1-based; `col_start`/`col_end` are 0-based character offsets
/// within that line. A block comment or text block spanning several lines is
/// attributed to the line it starts on, and its `col_end` is `col_start` plus
/// its character count. `byte_start`/`byte_end` index into the snippet source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub index: usize,
    pub text: String,
    pub line: usize,
    pub col_start: usize,
    pub col_end: usize,
    pub class: TokenClass,
    pub byte_start: usize,
    pub byte_end: usize,
}
