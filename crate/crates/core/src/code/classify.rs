use super::TokenClass;

/// Raw lexical category produced by the lexer before classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexicalKind {
    /// Identifier or reserved word; [`classify`] decides which.
    Word,
    Number,
    String,
    Char,
    Operator,
    Separator,
    LineComment,
    BlockComment,
    /// Unlexable remainder, produced only by lenient lexing of edited lines.
    Unknown,
}

/// Primitive and boxed type names, `void`, `String` and `Object`.
pub const TYPE_NAMES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void", "var",
    "Boolean", "Byte", "Character", "Short", "Integer", "Long", "Float", "Double", "Void",
    "String", "Object",
];

pub const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "synchronized",
    "native",
    "transient",
    "volatile",
    "strictfp",
];

/// Reserved words that are neither types, modifiers nor literals.
pub const RESERVED_WORDS: &[&str] = &[
    "assert", "break", "case", "catch", "class", "const", "continue", "default", "do", "else",
    "enum", "extends", "finally", "for", "goto", "if", "implements", "import", "instanceof",
    "interface", "new", "package", "return", "super", "switch", "this", "throw", "throws", "try",
    "while",
];

const LITERAL_WORDS: &[&str] = &["true", "false", "null"];

/// Maps a token to its family. Total: every input yields exactly one class.
pub fn classify(text: &str, kind: LexicalKind) -> TokenClass {
    match kind {
        LexicalKind::Word => {
            if TYPE_NAMES.contains(&text) {
                TokenClass::Type
            } else if MODIFIERS.contains(&text) {
                TokenClass::Modifier
            } else if LITERAL_WORDS.contains(&text) {
                TokenClass::Literal
            } else if RESERVED_WORDS.contains(&text) {
                TokenClass::Keyword
            } else {
                TokenClass::Identifier
            }
        }
        LexicalKind::Number | LexicalKind::String | LexicalKind::Char => TokenClass::Literal,
        LexicalKind::Operator => TokenClass::Operator,
        LexicalKind::Separator => TokenClass::Separator,
        LexicalKind::LineComment | LexicalKind::BlockComment => TokenClass::Comment,
        LexicalKind::Unknown => TokenClass::Identifier,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyword_sub_split() {
        assert_eq!(classify("static", LexicalKind::Word), TokenClass::Modifier);
        assert_eq!(classify("boolean", LexicalKind::Word), TokenClass::Type);
        assert_eq!(classify("Integer", LexicalKind::Word), TokenClass::Type);
        assert_eq!(classify("while", LexicalKind::Word), TokenClass::Keyword);
        assert_eq!(classify("null", LexicalKind::Word), TokenClass::Literal);
        assert_eq!(classify("approx", LexicalKind::Word), TokenClass::Identifier);
        assert_eq!(classify("&&", LexicalKind::Operator), TokenClass::Operator);
        assert_eq!(classify(";", LexicalKind::Separator), TokenClass::Separator);
    }

    #[test]
    fn word_tables_are_disjoint() {
        for w in TYPE_NAMES {
            assert!(!MODIFIERS.contains(w) && !RESERVED_WORDS.contains(w), "{w}");
        }
        for w in MODIFIERS {
            assert!(!RESERVED_WORDS.contains(w), "{w}");
        }
    }
}
