use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use codeattn_core::analysis::aoi_share;
use codeattn_core::io::{load_dumps, load_session_file, load_sessions};
use codeattn_core::report::{analyze, sensitivity_table, write_report, AnalysisOptions, Summary, SensitivityTable};
use codeattn_core::session::derive_attention;
use codeattn_core::{AttentionVector, Corpus, TokenClass};
use serde::{Deserialize, Serialize};

use crate::render::{heat_rendering, token_weights};
use crate::{CliError, RunManifest};

fn options(m: &RunManifest) -> AnalysisOptions {
    AnalysisOptions {
        alpha: m.alpha,
        n_bins: m.n_bins,
    }
}

struct Inputs {
    corpus: Corpus,
    sessions: Vec<codeattn_core::SessionRecord>,
    dumps: Vec<codeattn_core::ModelAttentionDumpF64>,
}

fn load_inputs(m: &RunManifest) -> Result<Inputs, CliError> {
    m.validate()?;
    let corpus = Corpus::load(&m.corpus)?;
    let sessions = load_sessions(&m.sessions)?;
    let dumps = match &m.dumps {
        Some(d) => load_dumps(d)?,
        None => Vec::new(),
    };
    Ok(Inputs { corpus, sessions, dumps })
}

#[derive(Debug, Clone)]
pub struct AnalyzeOutcome {
    pub output: PathBuf,
    pub summary: Summary,
    pub text: String,
}

/// Runs the full analysis and writes the report files.
pub fn cmd_analyze(m: &RunManifest) -> Result<AnalyzeOutcome, CliError> {
    let inputs = load_inputs(m)?;
    let report = analyze(&inputs.corpus, &inputs.sessions, &inputs.dumps, options(m))?;
    write_report(&m.output, &report)?;

    let s = &report.summary;
    let mut text = String::new();
    let c = &s.sessions;
    let _ = writeln!(
        text,
        "sessions: {} total, {} included, {} excluded (external_source {}, outlier {})",
        c.total,
        c.included,
        c.excluded_external_source + c.excluded_outlier,
        c.excluded_external_source,
        c.excluded_outlier
    );
    for (group, g) in &s.correlations {
        let rho = g.mean_rho.map_or("n/a".into(), |r| format!("{r:.3}"));
        let _ = writeln!(text, "{group}: mean rho {rho} ({} of {} pairs significant)", g.kept, g.pairs);
    }
    for (subject, sh) in &s.shares {
        if let Some(b) = sh.mean_buggy_line_share {
            let _ = writeln!(text, "{subject}: buggy-line share {b:.3}");
        }
    }
    let _ = writeln!(text, "report written to {}", m.output.display());
    Ok(AnalyzeOutcome {
        output: m.output.clone(),
        summary: report.summary,
        text,
    })
}

/// Token weights and a heat rendering of one session.
pub fn cmd_replay(corpus: &Path, session: &Path) -> Result<String, CliError> {
    let corpus = Corpus::load(corpus)?;
    let record = load_session_file(session)?
        .ok_or_else(|| CliError::Input(format!("{}: session is still open", session.display())))?;
    let snippet = corpus
        .get(&record.snippet_id)
        .ok_or_else(|| CliError::Input(format!("unknown snippet `{}`", record.snippet_id)))?;
    let v: AttentionVector<f64> = codeattn_core::session::replay(snippet, &record)
        .map_err(|e| CliError::Input(format!("{}: {e}", session.display())))?;
    let mut out = format!(
        "snippet {} participant {} duration {} ms\n",
        record.snippet_id,
        record.participant_id,
        record.duration_ms()
    );
    out.push_str(&token_weights(snippet, &v));
    out.push('\n');
    out.push_str(&heat_rendering(snippet, &v));
    Ok(out)
}

pub const AOI_FORMAT_VERSION: u32 = 1;

/// Areas of interest: per snippet, inclusive 1-based line ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AoiSpec {
    pub format_version: u32,
    pub snippets: BTreeMap<String, Vec<[usize; 2]>>,
}

impl AoiSpec {
    pub fn lines(&self, snippet_id: &str) -> Option<Vec<usize>> {
        self.snippets
            .get(snippet_id)
            .map(|ranges| ranges.iter().flat_map(|&[a, b]| a..=b).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AoiOutcome {
    /// (participant, snippet, share); `None` when the session has no attention.
    pub rows: Vec<(String, String, Option<f64>)>,
    pub mean: Option<f64>,
    pub text: String,
}

/// Share of each valid session's attention that falls in the areas of interest.
pub fn cmd_validate_aoi(corpus: &Path, sessions: &Path, aoi: &Path) -> Result<AoiOutcome, CliError> {
    let corpus = Corpus::load(corpus)?;
    let text = std::fs::read_to_string(aoi).map_err(|e| CliError::Input(format!("{}: {e}", aoi.display())))?;
    let spec: AoiSpec =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", aoi.display())))?;
    if spec.format_version != AOI_FORMAT_VERSION {
        return Err(CliError::Input(format!("aoi: unsupported format_version {}", spec.format_version)));
    }
    let mut records: Vec<_> = load_sessions(sessions)?.into_iter().filter(|s| s.is_valid()).collect();
    if records.is_empty() {
        return Err(CliError::Input("no valid sessions".into()));
    }
    records.sort_by(|a, b| (&a.participant_id, &a.snippet_id).cmp(&(&b.participant_id, &b.snippet_id)));

    let mut rows = Vec::with_capacity(records.len());
    for r in &records {
        let snippet = corpus
            .get(&r.snippet_id)
            .ok_or_else(|| CliError::Input(format!("unknown snippet `{}`", r.snippet_id)))?;
        let lines = spec
            .lines(&r.snippet_id)
            .ok_or_else(|| CliError::Input(format!("missing AOI mapping for snippet `{}`", r.snippet_id)))?;
        let v: AttentionVector<f64> = derive_attention(snippet, r)
            .map_err(|e| CliError::Input(format!("session {}/{}: {e}", r.participant_id, r.snippet_id)))?;
        let share = match aoi_share(snippet, &v, &lines) {
            Ok(s) => Some(s),
            Err(codeattn_core::analysis::AnalysisError::ZeroMass) => None,
            Err(e) => return Err(CliError::Input(format!("snippet `{}`: {e}", r.snippet_id))),
        };
        rows.push((r.participant_id.clone(), r.snippet_id.clone(), share));
    }
    let defined: Vec<f64> = rows.iter().filter_map(|r| r.2).collect();
    let mean = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);

    let mut text = String::from("participant_id,snippet_id,aoi_share\n");
    for (p, s, share) in &rows {
        let _ = writeln!(text, "{p},{s},{}", share.map(|x| x.to_string()).unwrap_or_default());
    }
    let _ = writeln!(text, "mean,,{}", mean.map(|x| x.to_string()).unwrap_or_default());
    Ok(AoiOutcome { rows, mean, text })
}

/// Window-size simulation; writes `sensitivity.csv` into the output directory.
pub fn cmd_sensitivity(m: &RunManifest, windows: &[usize]) -> Result<SensitivityTable, CliError> {
    let inputs = load_inputs(m)?;
    let table = sensitivity_table(&inputs.corpus, &inputs.sessions, &inputs.dumps, options(m), windows, m.seed)?;
    std::fs::create_dir_all(&m.output).map_err(|e| CliError::Internal(e.to_string()))?;
    std::fs::write(m.output.join("sensitivity.csv"), table.to_csv()).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(table)
}

/// Checks that a corpus loads and summarises its token structure.
pub fn cmd_lint_corpus(corpus: &Path) -> Result<String, CliError> {
    let corpus = Corpus::load(corpus)?;
    let mut out = String::from("snippet_id,lines,tokens,buggy_line,buggy_line_tokens");
    for c in TokenClass::ALL {
        let _ = write!(out, ",{c}");
    }
    out.push('\n');
    for s in corpus.snippets() {
        let counts = s.class_counts();
        let _ = write!(
            out,
            "{},{},{},{},{}",
            s.id(),
            s.line_count(),
            s.token_count(),
            s.buggy_line(),
            s.buggy_line_tokens().len()
        );
        for n in counts {
            let _ = write!(out, ",{n}");
        }
        out.push('\n');
    }
    Ok(out)
}
