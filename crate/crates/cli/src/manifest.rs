//! Run manifest: one TOML file naming the inputs and parameters of a batch
//! run. Relative paths are resolved against the manifest's directory.
//!
//! ```toml
//! format_version = 1
//! corpus = "fixtures/corpus.jsonl"
//! sessions = "study-data/sessions"
//! dumps = "dumps"          # optional
//! output = "report"
//! alpha = 0.05
//! n_bins = 20
//! seed = 0
//! ```

use std::path::{Path, PathBuf};

use codeattn_core::analysis::DEFAULT_BINS;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MANIFEST_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub format_version: u32,
    pub corpus: PathBuf,
    pub sessions: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dumps: Option<PathBuf>,
    pub output: PathBuf,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_bins")]
    pub n_bins: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_alpha() -> f64 {
    0.05
}

fn default_bins() -> usize {
    DEFAULT_BINS
}

/// Command-line values that take precedence over the manifest.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub corpus: Option<PathBuf>,
    pub sessions: Option<PathBuf>,
    pub dumps: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub alpha: Option<f64>,
    pub n_bins: Option<usize>,
    pub seed: Option<u64>,
}

impl RunManifest {
    pub fn new(corpus: impl Into<PathBuf>, sessions: impl Into<PathBuf>, output: impl Into<PathBuf>) -> Self {
        Self {
            format_version: MANIFEST_FORMAT_VERSION,
            corpus: corpus.into(),
            sessions: sessions.into(),
            dumps: None,
            output: output.into(),
            alpha: default_alpha(),
            n_bins: default_bins(),
            seed: 0,
        }
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut m: RunManifest =
            toml::from_str(text).map_err(|e| CliError::Input(format!("manifest: {e}")))?;
        if m.format_version != MANIFEST_FORMAT_VERSION {
            return Err(CliError::Input(format!(
                "manifest: unsupported format_version {}",
                m.format_version
            )));
        }
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut m.corpus);
        resolve(&mut m.sessions);
        resolve(&mut m.output);
        if let Some(d) = &mut m.dumps {
            resolve(d);
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn apply(mut self, o: Overrides) -> Self {
        self.corpus = o.corpus.unwrap_or(self.corpus);
        self.sessions = o.sessions.unwrap_or(self.sessions);
        self.dumps = o.dumps.or(self.dumps);
        self.output = o.output.unwrap_or(self.output);
        self.alpha = o.alpha.unwrap_or(self.alpha);
        self.n_bins = o.n_bins.unwrap_or(self.n_bins);
        self.seed = o.seed.unwrap_or(self.seed);
        self
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (name, p) in [("corpus", Some(&self.corpus)), ("sessions", Some(&self.sessions)), ("dumps", self.dumps.as_ref())] {
            if let Some(p) = p {
                if !p.exists() {
                    return Err(CliError::Input(format!("{name} path {} does not exist", p.display())));
                }
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::Input(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        if self.n_bins < 2 {
            return Err(CliError::Input(format!("n_bins {} below 2", self.n_bins)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_resolves_and_defaults() {
        let m = RunManifest::parse(
            "format_version = 1\ncorpus = \"c.jsonl\"\nsessions = \"/abs/s\"\noutput = \"out\"\n",
            Path::new("/base"),
        )
        .unwrap();
        assert_eq!(m.corpus, Path::new("/base/c.jsonl"));
        assert_eq!(m.sessions, Path::new("/abs/s"));
        assert_eq!((m.alpha, m.n_bins, m.seed, m.dumps.is_none()), (0.05, 20, 0, true));
        let m = m.apply(Overrides {
            alpha: Some(0.01),
            ..Overrides::default()
        });
        assert_eq!(m.alpha, 0.01);
    }

    #[test]
    fn rejects_bad_manifests() {
        let base = Path::new("/");
        assert!(RunManifest::parse("format_version = 2\ncorpus=\"a\"\nsessions=\"b\"\noutput=\"c\"", base).is_err());
        assert!(RunManifest::parse("corpus=\"a\"\nsessions=\"b\"\noutput=\"c\"", base).is_err());
        assert!(RunManifest::parse("format_version = 1\ncorpus=\"a\"\nsessions=\"b\"\noutput=\"c\"\nextra=1", base).is_err());
        let mut m = RunManifest::new("/", "/", "/tmp/x");
        m.alpha = 1.0;
        assert!(m.validate().is_err());
        m.alpha = 0.05;
        m.n_bins = 1;
        assert!(m.validate().is_err());
        m.n_bins = 2;
        m.validate().unwrap();
        m.corpus = "/definitely/not/here".into();
        assert!(m.validate().is_err());
    }
}
