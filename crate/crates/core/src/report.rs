//! Cohort-level analysis producing report tables and a summary document.
//!
//! Output files (see `docs/reports.md` for the column reference):
//! `sessions.csv`, `correlations.csv`, `shares.csv`, `dfu.csv`,
//! `temporal.csv` and `summary.json`. Everything is ordered
//! deterministically, so identical inputs give byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{
    buggy_line_share, dfu_report, jsd, length_context_correlation, significance_filter, spearman,
    temporal_profile, window_sensitivity, AnalysisError, Correlation, PValue, DEFAULT_BINS,
};
use crate::code::{Corpus, Snippet};
use crate::model::{aggregate, copy_attention, ModelAttentionDump, ModelError};
use crate::session::{derive_attention, Label, SessionError, SessionRecord, Validity};
use crate::AttentionVector;

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no valid sessions")]
    NoValidSessions,
    #[error("{what} refers to unknown snippet `{snippet}`")]
    UnknownSnippet { what: String, snippet: String },
    #[error("session {participant}/{snippet}: {source}")]
    Session {
        participant: String,
        snippet: String,
        source: SessionError,
    },
    #[error("dump {model}/{snippet}: {source}")]
    Model {
        model: String,
        snippet: String,
        source: ModelError,
    },
    #[error("session {participant}/{snippet}: {source}")]
    Analysis {
        participant: String,
        snippet: String,
        source: AnalysisError,
    },
    #[error("invalid option: {0}")]
    Options(String),
    #[error("writing report: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing report: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub alpha: f64,
    pub n_bins: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            n_bins: DEFAULT_BINS,
        }
    }
}

impl AnalysisOptions {
    pub fn validate(&self) -> Result<(), ReportError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ReportError::Options(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        if self.n_bins < 2 {
            return Err(ReportError::Options(format!("n_bins {} below 2", self.n_bins)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum PairKind {
    #[serde(rename = "dev-dev")]
    DevDev,
    #[serde(rename = "dev-model")]
    DevModel,
    #[serde(rename = "model-model")]
    ModelModel,
}

impl PairKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PairKind::DevDev => "dev-dev",
            PairKind::DevModel => "dev-model",
            PairKind::ModelModel => "model-model",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionRow {
    pub participant_id: String,
    pub snippet_id: String,
    pub label: Label,
    pub validity: Validity,
    pub included: bool,
    pub duration_ms: u64,
    pub event_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub snippet_id: String,
    pub pair_kind: PairKind,
    /// `dev-dev`, `dev-model:<model>` or `model-model:<a>~<b>`.
    pub group: String,
    pub left: String,
    pub right: String,
    pub n: usize,
    /// `None` when the correlation is undefined (a constant vector).
    pub correlation: Option<Correlation<f64>>,
    pub jsd: Option<f64>,
}

impl CorrelationRow {
    pub fn status(&self, alpha: f64) -> &'static str {
        match &self.correlation {
            None => "degenerate",
            Some(c) if c.p_value <= alpha => "significant",
            Some(_) => "insignificant",
        }
    }
}

impl PValue<f64> for CorrelationRow {
    fn p_value(&self) -> f64 {
        self.correlation.map_or(f64::INFINITY, |c| c.p_value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShareRow {
    pub subject_kind: &'static str,
    pub subject: String,
    pub snippet_id: String,
    pub token_count: usize,
    pub buggy_line_share: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfuRow {
    pub subject_kind: &'static str,
    pub subject: String,
    pub snippet_id: String,
    pub class: String,
    pub token_share: f64,
    pub dfu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalRow {
    pub participant_id: String,
    pub snippet_id: String,
    pub bin: usize,
    pub start_ms: f64,
    pub end_ms: f64,
    pub buggy_mass: f64,
    pub context_mass: f64,
    pub buggy_fraction: Option<f64>,
    pub context_fraction: Option<f64>,
    pub switch_count: usize,
    pub edit_count: usize,
    pub unblur_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SessionCounts {
    pub total: usize,
    pub included: usize,
    pub excluded_external_source: usize,
    pub excluded_outlier: usize,
    pub fix_done: usize,
    pub cannot_fix: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GroupSummary {
    pub pair_kind: Option<PairKind>,
    pub pairs: usize,
    pub degenerate: usize,
    pub kept: usize,
    pub discarded: usize,
    /// Mean rho over significant pairs.
    pub mean_rho: Option<f64>,
    /// Mean JSD over all pairs where it is defined.
    pub mean_jsd: Option<f64>,
    pub per_snippet_mean_rho: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ShareSummary {
    pub n: usize,
    pub mean_buggy_line_share: Option<f64>,
    pub mean_context_share: Option<f64>,
    pub per_snippet_mean_buggy_line_share: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ClassSummary {
    pub n: usize,
    pub mean_dfu: f64,
    pub mean_token_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationSummary {
    pub rho: f64,
    pub p_value: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BinSummary {
    pub bin: usize,
    pub sessions_with_attention: usize,
    pub mean_buggy_fraction: Option<f64>,
    pub mean_context_fraction: Option<f64>,
    pub mean_switch_count: f64,
    pub mean_edit_count: f64,
    pub mean_unblur_count: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub format_version: u32,
    pub alpha: f64,
    pub n_bins: usize,
    pub sessions: SessionCounts,
    pub correlations: BTreeMap<String, GroupSummary>,
    pub shares: BTreeMap<String, ShareSummary>,
    pub length_context: Option<CorrelationSummary>,
    pub length_context_error: Option<String>,
    pub dfu: BTreeMap<String, BTreeMap<String, ClassSummary>>,
    pub temporal: Vec<BinSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub options: AnalysisOptions,
    pub sessions: Vec<SessionRow>,
    pub correlations: Vec<CorrelationRow>,
    pub shares: Vec<ShareRow>,
    pub dfu: Vec<DfuRow>,
    pub temporal: Vec<TemporalRow>,
    pub summary: Summary,
}

/// Attention vectors of one snippet, grouped by who produced them.
#[derive(Default)]
struct SnippetVectors {
    devs: Vec<(String, AttentionVector<f64>)>,
    models: Vec<(String, AttentionVector<f64>)>,
    copies: Vec<(String, AttentionVector<f64>)>,
}

fn snippet_of<'c>(corpus: &'c Corpus, id: &str, what: impl FnOnce() -> String) -> Result<&'c Snippet, ReportError> {
    corpus.get(id).ok_or_else(|| ReportError::UnknownSnippet {
        what: what(),
        snippet: id.to_owned(),
    })
}

/// Sessions that enter the default analyses, in (snippet, participant) order.
fn included_sessions(sessions: &[SessionRecord]) -> Vec<&SessionRecord> {
    let mut out: Vec<&SessionRecord> = sessions.iter().filter(|s| s.is_valid()).collect();
    out.sort_by(|a, b| {
        (&a.snippet_id, &a.participant_id, a.submitted_at_ms)
            .cmp(&(&b.snippet_id, &b.participant_id, b.submitted_at_ms))
    });
    out
}

fn model_vectors(
    corpus: &Corpus,
    dumps: &[ModelAttentionDump<f64>],
    into: &mut BTreeMap<String, SnippetVectors>,
) -> Result<(), ReportError> {
    let mut sorted: Vec<&ModelAttentionDump<f64>> = dumps.iter().collect();
    sorted.sort_by(|a, b| (&a.snippet_id, &a.model_id).cmp(&(&b.snippet_id, &b.model_id)));
    for dump in sorted {
        let snippet = snippet_of(corpus, &dump.snippet_id, || format!("dump of model `{}`", dump.model_id))?;
        let err = |source| ReportError::Model {
            model: dump.model_id.clone(),
            snippet: dump.snippet_id.clone(),
            source,
        };
        dump.validate(snippet).map_err(err)?;
        let entry = into.entry(dump.snippet_id.clone()).or_default();
        entry
            .models
            .push((dump.model_id.clone(), aggregate(snippet, dump).map_err(err)?));
        if dump.has_copy_attention() {
            entry.copies.push((
                format!("{}:copy", dump.model_id),
                copy_attention(snippet, dump).map_err(err)?,
            ));
        }
    }
    Ok(())
}

fn compare(
    snippet_id: &str,
    pair_kind: PairKind,
    group: String,
    left: (&str, &AttentionVector<f64>),
    right: (&str, &AttentionVector<f64>),
) -> CorrelationRow {
    CorrelationRow {
        snippet_id: snippet_id.to_owned(),
        pair_kind,
        group,
        left: left.0.to_owned(),
        right: right.0.to_owned(),
        n: left.1.len(),
        correlation: spearman(left.1, right.1).ok(),
        jsd: jsd(left.1, right.1).ok(),
    }
}

fn correlation_rows(
    by_snippet: &BTreeMap<String, SnippetVectors>,
    include_model_model: bool,
) -> Vec<CorrelationRow> {
    let mut rows = Vec::new();
    for (sid, v) in by_snippet {
        for (i, (pa, va)) in v.devs.iter().enumerate() {
            for (pb, vb) in &v.devs[i + 1..] {
                rows.push(compare(sid, PairKind::DevDev, "dev-dev".into(), (pa, va), (pb, vb)));
            }
        }
        for (p, dv) in &v.devs {
            for (m, mv) in &v.models {
                rows.push(compare(sid, PairKind::DevModel, format!("dev-model:{m}"), (p, dv), (m, mv)));
            }
        }
        if include_model_model {
            for (i, (ma, va)) in v.models.iter().enumerate() {
                for (mb, vb) in &v.models[i + 1..] {
                    rows.push(compare(sid, PairKind::ModelModel, format!("model-model:{ma}~{mb}"), (ma, va), (mb, vb)));
                }
            }
            for (c, cv) in &v.copies {
                let base = c.trim_end_matches(":copy");
                if let Some((m, mv)) = v.models.iter().find(|(m, _)| m == base) {
                    rows.push(compare(sid, PairKind::ModelModel, format!("model-model:{m}~{c}"), (m, mv), (c, cv)));
                }
            }
        }
    }
    rows
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in values {
        sum += v;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

fn summarise_groups(rows: &[CorrelationRow], alpha: f64) -> BTreeMap<String, GroupSummary> {
    let mut grouped: BTreeMap<String, Vec<CorrelationRow>> = BTreeMap::new();
    for r in rows {
        grouped.entry(r.group.clone()).or_default().push(r.clone());
    }
    grouped
        .into_iter()
        .map(|(group, rows)| {
            let pairs = rows.len();
            let pair_kind = rows.first().map(|r| r.pair_kind);
            let mean_jsd = mean(rows.iter().filter_map(|r| r.jsd));
            let (defined, degenerate): (Vec<_>, Vec<_>) =
                rows.into_iter().partition(|r| r.correlation.is_some());
            let filtered = significance_filter(defined, alpha);
            let mut per_snippet: BTreeMap<String, Vec<f64>> = BTreeMap::new();
            for r in &filtered.kept {
                per_snippet
                    .entry(r.snippet_id.clone())
                    .or_default()
                    .push(r.correlation.expect("defined").rho);
            }
            let summary = GroupSummary {
                pair_kind,
                pairs,
                degenerate: degenerate.len(),
                kept: filtered.kept.len(),
                discarded: filtered.discarded,
                mean_rho: mean(filtered.kept.iter().map(|r| r.correlation.expect("defined").rho)),
                mean_jsd,
                per_snippet_mean_rho: per_snippet
                    .into_iter()
                    .map(|(k, v)| (k, mean(v).expect("non-empty")))
                    .collect(),
            };
            (group, summary)
        })
        .collect()
}

fn developer_vectors(
    corpus: &Corpus,
    sessions: &[&SessionRecord],
    derive: impl Fn(&Snippet, &SessionRecord) -> Result<AttentionVector<f64>, ReportError>,
) -> Result<BTreeMap<String, SnippetVectors>, ReportError> {
    let mut by_snippet: BTreeMap<String, SnippetVectors> = BTreeMap::new();
    for s in sessions {
        let snippet = snippet_of(corpus, &s.snippet_id, || format!("session of `{}`", s.participant_id))?;
        by_snippet
            .entry(s.snippet_id.clone())
            .or_default()
            .devs
            .push((s.participant_id.clone(), derive(snippet, s)?));
    }
    Ok(by_snippet)
}

fn session_error(s: &SessionRecord) -> impl FnOnce(SessionError) -> ReportError + '_ {
    move |source| ReportError::Session {
        participant: s.participant_id.clone(),
        snippet: s.snippet_id.clone(),
        source,
    }
}

/// Runs every comparative analysis over a cohort.
///
/// Only sessions with validity `valid` enter the analyses; every session is
/// still checked and listed in the session table.
pub fn analyze(
    corpus: &Corpus,
    sessions: &[SessionRecord],
    dumps: &[ModelAttentionDump<f64>],
    options: AnalysisOptions,
) -> Result<AnalysisReport, ReportError> {
    options.validate()?;

    let mut counts = SessionCounts {
        total: sessions.len(),
        ..SessionCounts::default()
    };
    let mut session_rows = Vec::with_capacity(sessions.len());
    for s in sessions {
        let snippet = snippet_of(corpus, &s.snippet_id, || format!("session of `{}`", s.participant_id))?;
        // Every input is checked, included or not.
        derive_attention::<f64>(snippet, s).map_err(session_error(s))?;
        match s.validity {
            Validity::Valid => counts.included += 1,
            Validity::ExternalSource => counts.excluded_external_source += 1,
            Validity::Outlier => counts.excluded_outlier += 1,
        }
        match s.label {
            Label::FixDone => counts.fix_done += 1,
            Label::CannotFix => counts.cannot_fix += 1,
        }
        session_rows.push(SessionRow {
            participant_id: s.participant_id.clone(),
            snippet_id: s.snippet_id.clone(),
            label: s.label,
            validity: s.validity,
            included: s.is_valid(),
            duration_ms: s.duration_ms(),
            event_count: s.events.len(),
        });
    }
    session_rows.sort_by(|a, b| (&a.snippet_id, &a.participant_id).cmp(&(&b.snippet_id, &b.participant_id)));

    let included = included_sessions(sessions);
    if included.is_empty() {
        return Err(ReportError::NoValidSessions);
    }

    let mut by_snippet = developer_vectors(corpus, &included, |snippet, s| {
        derive_attention(snippet, s).map_err(session_error(s))
    })?;
    model_vectors(corpus, dumps, &mut by_snippet)?;

    let correlations = correlation_rows(&by_snippet, true);

    // Buggy-line shares and DFU, per vector.
    let mut shares = Vec::new();
    let mut dfu_rows = Vec::new();
    let mut length_pairs = Vec::new();
    for (sid, v) in &by_snippet {
        let snippet = corpus.get(sid).expect("checked above");
        let subjects = v
            .devs
            .iter()
            .map(|(p, vec)| ("developer", p, vec))
            .chain(v.models.iter().map(|(m, vec)| ("model", m, vec)));
        for (kind, subject, vector) in subjects {
            let share = buggy_line_share(snippet, vector).ok();
            if let (Some(share), "developer") = (share, kind) {
                length_pairs.push((snippet.token_count(), 1.0 - share));
            }
            shares.push(ShareRow {
                subject_kind: kind,
                subject: subject.clone(),
                snippet_id: sid.clone(),
                token_count: snippet.token_count(),
                buggy_line_share: share,
            });
            if let Ok(report) = dfu_report(snippet, vector) {
                for e in report.entries {
                    dfu_rows.push(DfuRow {
                        subject_kind: kind,
                        subject: subject.clone(),
                        snippet_id: sid.clone(),
                        class: e.class.to_string(),
                        token_share: e.token_share,
                        dfu: e.dfu,
                    });
                }
            }
        }
    }

    let mut temporal = Vec::new();
    for s in &included {
        let snippet = corpus.get(&s.snippet_id).expect("checked above");
        let profile = temporal_profile::<f64>(snippet, s, options.n_bins).map_err(|source| {
            ReportError::Analysis {
                participant: s.participant_id.clone(),
                snippet: s.snippet_id.clone(),
                source,
            }
        })?;
        for (bin, b) in profile.bins.into_iter().enumerate() {
            temporal.push(TemporalRow {
                participant_id: s.participant_id.clone(),
                snippet_id: s.snippet_id.clone(),
                bin,
                start_ms: b.start_ms,
                end_ms: b.end_ms,
                buggy_mass: b.buggy_mass,
                context_mass: b.context_mass,
                buggy_fraction: b.buggy_fraction,
                context_fraction: b.context_fraction,
                switch_count: b.switch_count,
                edit_count: b.edit_count,
                unblur_count: b.unblur_count,
            });
        }
    }

    let subject_key = |kind: &str, subject: &str| match kind {
        "developer" => "developers".to_owned(),
        _ => format!("model:{subject}"),
    };
    let mut share_groups: BTreeMap<String, Vec<&ShareRow>> = BTreeMap::new();
    for r in &shares {
        share_groups.entry(subject_key(r.subject_kind, &r.subject)).or_default().push(r);
    }
    let share_summary = share_groups
        .into_iter()
        .map(|(key, rows)| {
            let mut per_snippet: BTreeMap<String, Vec<f64>> = BTreeMap::new();
            for r in &rows {
                if let Some(s) = r.buggy_line_share {
                    per_snippet.entry(r.snippet_id.clone()).or_default().push(s);
                }
            }
            let m = mean(rows.iter().filter_map(|r| r.buggy_line_share));
            let summary = ShareSummary {
                n: rows.iter().filter(|r| r.buggy_line_share.is_some()).count(),
                mean_buggy_line_share: m,
                mean_context_share: m.map(|m| 1.0 - m),
                per_snippet_mean_buggy_line_share: per_snippet
                    .into_iter()
                    .map(|(k, v)| (k, mean(v).expect("non-empty")))
                    .collect(),
            };
            (key, summary)
        })
        .collect();

    let mut dfu_groups: BTreeMap<String, BTreeMap<String, Vec<&DfuRow>>> = BTreeMap::new();
    for r in &dfu_rows {
        dfu_groups
            .entry(subject_key(r.subject_kind, &r.subject))
            .or_default()
            .entry(r.class.clone())
            .or_default()
            .push(r);
    }
    let dfu_summary = dfu_groups
        .into_iter()
        .map(|(key, classes)| {
            let classes = classes
                .into_iter()
                .map(|(class, rows)| {
                    let s = ClassSummary {
                        n: rows.len(),
                        mean_dfu: mean(rows.iter().map(|r| r.dfu)).expect("non-empty"),
                        mean_token_share: mean(rows.iter().map(|r| r.token_share)).expect("non-empty"),
                    };
                    (class, s)
                })
                .collect();
            (key, classes)
        })
        .collect();

    let temporal_summary = (0..options.n_bins)
        .map(|bin| {
            let rows: Vec<&TemporalRow> = temporal.iter().filter(|r| r.bin == bin).collect();
            let count = rows.len().max(1) as f64;
            let fractions: Vec<&TemporalRow> = rows.iter().copied().filter(|r| r.buggy_fraction.is_some()).collect();
            BinSummary {
                bin,
                sessions_with_attention: fractions.len(),
                mean_buggy_fraction: mean(fractions.iter().filter_map(|r| r.buggy_fraction)),
                mean_context_fraction: mean(fractions.iter().filter_map(|r| r.context_fraction)),
                mean_switch_count: rows.iter().map(|r| r.switch_count as f64).sum::<f64>() / count,
                mean_edit_count: rows.iter().map(|r| r.edit_count as f64).sum::<f64>() / count,
                mean_unblur_count: rows.iter().map(|r| r.unblur_count as f64).sum::<f64>() / count,
            }
        })
        .collect();

    let (length_context, length_context_error) = match length_context_correlation(&length_pairs) {
        Ok(c) => (
            Some(CorrelationSummary {
                rho: c.rho,
                p_value: c.p_value,
                n: c.n,
            }),
            None,
        ),
        Err(e) => (None, Some(e.to_string())),
    };

    let summary = Summary {
        format_version: REPORT_FORMAT_VERSION,
        alpha: options.alpha,
        n_bins: options.n_bins,
        sessions: counts,
        correlations: summarise_groups(&correlations, options.alpha),
        shares: share_summary,
        length_context,
        length_context_error,
        dfu: dfu_summary,
        temporal: temporal_summary,
    };

    Ok(AnalysisReport {
        options,
        sessions: session_rows,
        correlations,
        shares,
        dfu: dfu_rows,
        temporal,
        summary,
    })
}

/// Correlation statistics of one pair group at one window size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityCell {
    pub pairs: usize,
    pub kept: usize,
    pub discarded: usize,
    pub mean_rho: Option<f64>,
}

/// One row of the window-size sensitivity table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityRow {
    pub window: usize,
    pub groups: BTreeMap<String, SensitivityCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityTable {
    pub seed: u64,
    pub rows: Vec<SensitivityRow>,
}

impl SensitivityTable {
    /// Every group name seen in any row, sorted.
    pub fn groups(&self) -> Vec<String> {
        let mut g: Vec<String> = self.rows.iter().flat_map(|r| r.groups.keys().cloned()).collect();
        g.sort();
        g.dedup();
        g
    }

    /// CSV text: `window`, then `<group>:mean_rho` and `<group>:kept` per group.
    pub fn to_csv(&self) -> String {
        let groups = self.groups();
        let mut out = String::from("window");
        for g in &groups {
            let _ = write!(out, ",{g}:mean_rho,{g}:kept");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{}", r.window);
            for g in &groups {
                match r.groups.get(g) {
                    Some(c) => {
                        let _ = write!(out, ",{},{}", opt(c.mean_rho), c.kept);
                    }
                    None => out.push_str(",,"),
                }
            }
            out.push('\n');
        }
        out
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Seed for one session's simulation, independent of session order.
pub fn session_seed(seed: u64, session: &SessionRecord) -> u64 {
    let key = format!("{}\u{0}{}", session.participant_id, session.snippet_id);
    seed ^ fnv1a(key.as_bytes())
}

/// Mean significant developer–developer and developer–model correlations
/// when attention is attributed to simulated windows of each size.
pub fn sensitivity_table(
    corpus: &Corpus,
    sessions: &[SessionRecord],
    dumps: &[ModelAttentionDump<f64>],
    options: AnalysisOptions,
    windows: &[usize],
    seed: u64,
) -> Result<SensitivityTable, ReportError> {
    options.validate()?;
    if windows.is_empty() {
        return Err(ReportError::Options("no window sizes given".into()));
    }
    if let Some(&w) = windows.iter().find(|w| !(1..=7).contains(*w)) {
        return Err(ReportError::Options(format!("window size {w} outside 1..=7")));
    }
    let included = included_sessions(sessions);
    if included.is_empty() {
        return Err(ReportError::NoValidSessions);
    }
    let mut models = BTreeMap::new();
    model_vectors(corpus, dumps, &mut models)?;

    let mut rows = Vec::with_capacity(windows.len());
    for &w in windows {
        let mut by_snippet = developer_vectors(corpus, &included, |snippet, s| {
            window_sensitivity(snippet, s, w, session_seed(seed, s)).map_err(|source| ReportError::Analysis {
                participant: s.participant_id.clone(),
                snippet: s.snippet_id.clone(),
                source,
            })
        })?;
        for (sid, m) in &models {
            by_snippet.entry(sid.clone()).or_default().models = m.models.clone();
        }
        let corr = correlation_rows(&by_snippet, false);
        let groups = summarise_groups(&corr, options.alpha)
            .into_iter()
            .map(|(group, g)| {
                let cell = SensitivityCell {
                    pairs: g.pairs,
                    kept: g.kept,
                    discarded: g.discarded,
                    mean_rho: g.mean_rho,
                };
                (group, cell)
            })
            .collect();
        rows.push(SensitivityRow { window: w, groups });
    }
    Ok(SensitivityTable { seed, rows })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub const SESSIONS_COLUMNS: &[&str] = &[
    "participant_id", "snippet_id", "label", "validity", "included", "duration_ms", "event_count",
];
pub const CORRELATIONS_COLUMNS: &[&str] = &[
    "snippet_id", "pair_kind", "group", "left", "right", "n", "rho", "p_value", "status", "jsd",
];
pub const SHARES_COLUMNS: &[&str] = &[
    "subject_kind", "subject", "snippet_id", "token_count", "buggy_line_share", "context_share",
];
pub const DFU_COLUMNS: &[&str] = &["subject_kind", "subject", "snippet_id", "token_class", "token_share", "dfu"];
pub const TEMPORAL_COLUMNS: &[&str] = &[
    "participant_id", "snippet_id", "bin", "start_ms", "end_ms", "buggy_mass", "context_mass",
    "buggy_fraction", "context_fraction", "switch_count", "edit_count", "unblur_count",
];

/// Writes the report files into `dir`, creating it if needed.
pub fn write_report(dir: &Path, report: &AnalysisReport) -> Result<(), ReportError> {
    std::fs::create_dir_all(dir)?;
    let alpha = report.options.alpha;
    write_csv(
        &dir.join("sessions.csv"),
        SESSIONS_COLUMNS,
        report.sessions.iter().map(|r| {
            vec![
                r.participant_id.clone(),
                r.snippet_id.clone(),
                r.label.as_str().into(),
                r.validity.as_str().into(),
                r.included.to_string(),
                r.duration_ms.to_string(),
                r.event_count.to_string(),
            ]
        }),
    )?;
    write_csv(
        &dir.join("correlations.csv"),
        CORRELATIONS_COLUMNS,
        report.correlations.iter().map(|r| {
            vec![
                r.snippet_id.clone(),
                r.pair_kind.as_str().into(),
                r.group.clone(),
                r.left.clone(),
                r.right.clone(),
                r.n.to_string(),
                opt(r.correlation.map(|c| c.rho)),
                opt(r.correlation.map(|c| c.p_value)),
                r.status(alpha).into(),
                opt(r.jsd),
            ]
        }),
    )?;
    write_csv(
        &dir.join("shares.csv"),
        SHARES_COLUMNS,
        report.shares.iter().map(|r| {
            vec![
                r.subject_kind.into(),
                r.subject.clone(),
                r.snippet_id.clone(),
                r.token_count.to_string(),
                opt(r.buggy_line_share),
                opt(r.buggy_line_share.map(|s| 1.0 - s)),
            ]
        }),
    )?;
    write_csv(
        &dir.join("dfu.csv"),
        DFU_COLUMNS,
        report.dfu.iter().map(|r| {
            vec![
                r.subject_kind.into(),
                r.subject.clone(),
                r.snippet_id.clone(),
                r.class.clone(),
                r.token_share.to_string(),
                r.dfu.to_string(),
            ]
        }),
    )?;
    write_csv(
        &dir.join("temporal.csv"),
        TEMPORAL_COLUMNS,
        report.temporal.iter().map(|r| {
            vec![
                r.participant_id.clone(),
                r.snippet_id.clone(),
                r.bin.to_string(),
                r.start_ms.to_string(),
                r.end_ms.to_string(),
                r.buggy_mass.to_string(),
                r.context_mass.to_string(),
                opt(r.buggy_fraction),
                opt(r.context_fraction),
                r.switch_count.to_string(),
                r.edit_count.to_string(),
                r.unblur_count.to_string(),
            ]
        }),
    )?;
    let mut json = serde_json::to_string_pretty(&report.summary).expect("summary serialises");
    json.push('\n');
    std::fs::write(dir.join("summary.json"), json)?;
    Ok(())
}
