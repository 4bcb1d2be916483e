use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CodeError, Snippet};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("corpus document {doc}: {source}")]
    Parse {
        doc: usize,
        source: serde_json::Error,
    },
    #[error("snippet `{id}`: {source}")]
    Snippet { id: String, source: CodeError },
    #[error("duplicate snippet id `{0}`")]
    DuplicateId(String),
    #[error("corpus is empty")]
    Empty,
}

/// On-disk form of one snippet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnippetDoc {
    pub snippet_id: String,
    pub source: String,
    pub buggy_line: usize,
    #[serde(default)]
    pub description: String,
}

impl TryFrom<SnippetDoc> for Snippet {
    type Error = CorpusError;

    fn try_from(doc: SnippetDoc) -> Result<Self, Self::Error> {
        Snippet::new(&doc.snippet_id, doc.source, doc.buggy_line, doc.description).map_err(
            |source| CorpusError::Snippet {
                id: doc.snippet_id,
                source,
            },
        )
    }
}

impl From<&Snippet> for SnippetDoc {
    fn from(s: &Snippet) -> Self {
        Self {
            snippet_id: s.id().to_owned(),
            source: s.source().to_owned(),
            buggy_line: s.buggy_line(),
            description: s.description().to_owned(),
        }
    }
}

/// An ordered set of snippets with unique ids.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    snippets: Vec<Snippet>,
    by_id: HashMap<String, usize>,
}

impl Corpus {
    pub fn new(snippets: Vec<Snippet>) -> Result<Self, CorpusError> {
        let mut by_id = HashMap::with_capacity(snippets.len());
        for (i, s) in snippets.iter().enumerate() {
            if by_id.insert(s.id().to_owned(), i).is_some() {
                return Err(CorpusError::DuplicateId(s.id().to_owned()));
            }
        }
        Ok(Self { snippets, by_id })
    }

    /// Parses a corpus: either a JSON array of documents or one JSON document
    /// per line. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let docs: Vec<SnippetDoc> = if text.trim_start().starts_with('[') {
            serde_json::from_str(text).map_err(|source| CorpusError::Parse { doc: 0, source })?
        } else {
            text.lines()
                .filter(|l| !l.trim().is_empty())
                .enumerate()
                .map(|(doc, l)| {
                    serde_json::from_str(l).map_err(|source| CorpusError::Parse { doc, source })
                })
                .collect::<Result<_, _>>()?
        };
        if docs.is_empty() {
            return Err(CorpusError::Empty);
        }
        let snippets = docs
            .into_iter()
            .map(Snippet::try_from)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(snippets)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Serialises as one document per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for s in &self.snippets {
            out.push_str(&serde_json::to_string(&SnippetDoc::from(s)).expect("serialisable"));
            out.push('\n');
        }
        out
    }

    pub fn get(&self, id: &str) -> Option<&Snippet> {
        self.by_id.get(id).map(|&i| &self.snippets[i])
    }

    pub fn snippets(&self) -> &[Snippet] {
        &self.snippets
    }

    pub fn len(&self) -> usize {
        self.snippets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snippets.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_jsonl_and_array() {
        let line = r#"{"snippet_id":"gcd","source":"return a;","buggy_line":1,"description":"d"}"#;
        let c = Corpus::parse(&format!("{line}\n\n")).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.get("gcd").unwrap().token_count(), 3);
        let c = Corpus::parse(&format!("[{line}]")).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(Corpus::parse(&c.to_jsonl()).unwrap().get("gcd"), c.get("gcd"));
    }

    #[test]
    fn rejects_duplicates_and_bad_lines() {
        let line = r#"{"snippet_id":"a","source":"x;","buggy_line":1}"#;
        assert!(matches!(
            Corpus::parse(&format!("{line}\n{line}")),
            Err(CorpusError::DuplicateId(_))
        ));
        let bad = r#"{"snippet_id":"a","source":"x;","buggy_line":4}"#;
        assert!(matches!(Corpus::parse(bad), Err(CorpusError::Snippet { .. })));
        assert!(matches!(Corpus::parse("\n"), Err(CorpusError::Empty)));
    }
}
