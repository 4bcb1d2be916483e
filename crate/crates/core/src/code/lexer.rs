use thiserror::Error;

use super::classify::{classify, LexicalKind};
use super::Token;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}, column {col}: {message}")]
pub struct LexError {
    /// 1-based line.
    pub line: usize,
    /// 0-based character column.
    pub col: usize,
    pub message: String,
}

// Longest first so that matching is maximal munch.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "->", "==", ">=", "<=", "!=", "&&", "||", "++", "--", "+=", "-=",
    "*=", "/=", "&=", "|=", "^=", "%=", "<<", ">>", "=", ">", "<", "!", "~", "?", ":", "+", "-",
    "*", "/", "&", "|", "^", "%",
];

const SEPARATORS: &[&str] = &["...", "::", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@"];

/// Lexes Java-like source into tokens.
///
/// Comments and string, char and numeric literals are single tokens;
/// multi-character operators are single tokens; whitespace is dropped.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    Lexer::new(source, false).run()
}

/// Lexes a line that may hold half-typed code.
///
/// Never fails: an unlexable character or an unterminated literal becomes an
/// opaque token reaching to the end of the offending construct.
pub fn tokenize_lenient(source: &str) -> Vec<Token> {
    Lexer::new(source, true)
        .run()
        .expect("lenient lexing is infallible")
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    col: usize,
    lenient: bool,
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_part(c: char) -> bool {
    is_ident_start(c) || c.is_alphanumeric()
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, lenient: bool) -> Self {
        Self {
            src,
            chars: src.char_indices().collect(),
            pos: 0,
            line: 1,
            col: 0,
            lenient,
        }
    }

    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).map(|&(_, c)| c)
    }

    fn byte_at(&self, pos: usize) -> usize {
        self.chars.get(pos).map_or(self.src.len(), |&(b, _)| b)
    }

    fn bump(&mut self) {
        if let Some(&(_, c)) = self.chars.get(self.pos) {
            self.pos += 1;
            if c == '\n' {
                self.line += 1;
                self.col = 0;
            } else {
                self.col += 1;
            }
        }
    }

    fn bump_n(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.byte_at(self.pos)..].starts_with(s)
    }

    fn error(&self, line: usize, col: usize, message: impl Into<String>) -> LexError {
        LexError {
            line,
            col,
            message: message.into(),
        }
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        let mut tokens = Vec::new();
        while let Some(c) = self.peek(0) {
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            let (start_pos, line, col) = (self.pos, self.line, self.col);
            let kind = match self.lex_one(c) {
                Ok(kind) => kind,
                Err(err) if self.lenient => {
                    // Consume to end of line; the remainder is opaque.
                    self.pos = start_pos;
                    self.line = line;
                    self.col = col;
                    while let Some(c) = self.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                    let _ = err;
                    LexicalKind::Unknown
                }
                Err(err) => return Err(err),
            };
            let byte_start = self.byte_at(start_pos);
            let byte_end = self.byte_at(self.pos);
            let text = &self.src[byte_start..byte_end];
            let text = if kind == LexicalKind::Unknown {
                text.trim_end()
            } else {
                text
            };
            let byte_end = byte_start + text.len();
            tokens.push(Token {
                index: tokens.len(),
                text: text.to_owned(),
                line,
                col_start: col,
                col_end: col + text.chars().count(),
                class: classify(text, kind),
                byte_start,
                byte_end,
            });
        }
        Ok(tokens)
    }

    fn lex_one(&mut self, c: char) -> Result<LexicalKind, LexError> {
        let (line, col) = (self.line, self.col);
        if c == '/' && self.peek(1) == Some('/') {
            while let Some(c) = self.peek(0) {
                if c == '\n' || c == '\r' {
                    break;
                }
                self.bump();
            }
            return Ok(LexicalKind::LineComment);
        }
        if c == '/' && self.peek(1) == Some('*') {
            self.bump_n(2);
            loop {
                match self.peek(0) {
                    None => return Err(self.error(line, col, "unterminated block comment")),
                    Some('*') if self.peek(1) == Some('/') => {
                        self.bump_n(2);
                        return Ok(LexicalKind::BlockComment);
                    }
                    Some(_) => self.bump(),
                }
            }
        }
        if is_ident_start(c) {
            while self.peek(0).is_some_and(is_ident_part) {
                self.bump();
            }
            return Ok(LexicalKind::Word);
        }
        if c.is_ascii_digit() || (c == '.' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) {
            return self.lex_number(line, col);
        }
        if self.starts_with("\"\"\"") {
            self.bump_n(3);
            loop {
                if self.starts_with("\"\"\"") {
                    self.bump_n(3);
                    return Ok(LexicalKind::String);
                }
                match self.peek(0) {
                    None => return Err(self.error(line, col, "unterminated text block")),
                    Some('\\') => self.bump_n(2),
                    Some(_) => self.bump(),
                }
            }
        }
        if c == '"' || c == '\'' {
            self.bump();
            loop {
                match self.peek(0) {
                    None | Some('\n') | Some('\r') => {
                        let what = if c == '"' { "string" } else { "char" };
                        return Err(self.error(line, col, format!("unterminated {what} literal")));
                    }
                    Some('\\') => {
                        self.bump();
                        if matches!(self.peek(0), None | Some('\n')) {
                            return Err(self.error(line, col, "unterminated escape"));
                        }
                        self.bump();
                    }
                    Some(q) if q == c => {
                        self.bump();
                        break;
                    }
                    Some(_) => self.bump(),
                }
            }
            return Ok(if c == '"' {
                LexicalKind::String
            } else {
                LexicalKind::Char
            });
        }
        for sep in SEPARATORS {
            if self.starts_with(sep) {
                self.bump_n(sep.chars().count());
                return Ok(LexicalKind::Separator);
            }
        }
        for op in OPERATORS {
            if self.starts_with(op) {
                self.bump_n(op.chars().count());
                return Ok(LexicalKind::Operator);
            }
        }
        Err(self.error(line, col, format!("unexpected character {c:?}")))
    }

    fn lex_number(&mut self, line: usize, col: usize) -> Result<LexicalKind, LexError> {
        let digits = |lx: &mut Self, pred: fn(char) -> bool| {
            while lx.peek(0).is_some_and(|c| pred(c) || c == '_') {
                lx.bump();
            }
        };
        let radix_prefix = self.peek(0) == Some('0')
            && matches!(self.peek(1), Some('x' | 'X' | 'b' | 'B'));
        if radix_prefix {
            let hex = matches!(self.peek(1), Some('x' | 'X'));
            self.bump_n(2);
            if hex {
                digits(self, |c| c.is_ascii_hexdigit());
            } else {
                digits(self, |c| c == '0' || c == '1');
            }
            if matches!(self.peek(0), Some('l' | 'L')) {
                self.bump();
            }
        } else {
            digits(self, |c| c.is_ascii_digit());
            if self.peek(0) == Some('.')
                && !self.peek(1).is_some_and(|c| is_ident_start(c) || c == '.')
            {
                self.bump();
                digits(self, |c| c.is_ascii_digit());
            }
            if matches!(self.peek(0), Some('e' | 'E')) {
                let sign = usize::from(matches!(self.peek(1), Some('+' | '-')));
                if self.peek(1 + sign).is_some_and(|c| c.is_ascii_digit()) {
                    self.bump_n(1 + sign);
                    digits(self, |c| c.is_ascii_digit());
                } else {
                    return Err(self.error(line, col, "malformed exponent"));
                }
            }
            if matches!(self.peek(0), Some('f' | 'F' | 'd' | 'D' | 'l' | 'L')) {
                self.bump();
            }
        }
        if self.peek(0).is_some_and(is_ident_part) {
            return Err(self.error(line, col, "malformed numeric literal"));
        }
        Ok(LexicalKind::Number)
    }
}
