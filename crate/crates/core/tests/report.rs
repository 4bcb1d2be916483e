use codeattn_core::model::ModelAttentionDump;
use codeattn_core::report::{analyze, sensitivity_table, write_report, AnalysisOptions, ReportError};
use codeattn_core::session::Validity;
use codeattn_core::synth::{synthetic_cohort, Archetype};
use codeattn_core::{Corpus, SessionRecord};

fn corpus() -> Corpus {
    Corpus::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/corpus.jsonl")).unwrap()
}

fn cohort(corpus: &Corpus) -> Vec<SessionRecord> {
    let archetypes = [Archetype::new("buggy", 0.75), Archetype::new("context", 0.25)];
    synthetic_cohort(corpus, &archetypes, 3, 40, 11)
}

/// A model that attends to the buggy line twice as much as elsewhere.
fn dumps(corpus: &Corpus) -> Vec<ModelAttentionDump<f64>> {
    corpus
        .snippets()
        .iter()
        .map(|s| {
            let step: Vec<f64> = (0..s.token_count())
                .map(|i| if s.is_on_buggy_line(i) { 2.0 } else { 1.0 } + i as f64 * 1e-3)
                .collect();
            ModelAttentionDump::token_level(s.id(), "toy", vec![step])
        })
        .collect()
}

#[test]
fn excluded_sessions_are_counted() {
    let corpus = corpus();
    let mut sessions = cohort(&corpus);
    sessions[0].validity = Validity::ExternalSource;
    sessions[5].validity = Validity::ExternalSource;
    sessions[7].validity = Validity::Outlier;
    let r = analyze(&corpus, &sessions, &dumps(&corpus), AnalysisOptions::default()).unwrap();
    assert_eq!(r.summary.sessions.total, sessions.len());
    assert_eq!(r.summary.sessions.excluded_external_source, 2);
    assert_eq!(r.summary.sessions.excluded_outlier, 1);
    assert_eq!(r.summary.sessions.included, sessions.len() - 3);
    assert_eq!(r.sessions.iter().filter(|s| !s.included).count(), 3);
    let developer_shares = r.shares.iter().filter(|s| s.subject_kind == "developer").count();
    assert_eq!(developer_shares, sessions.len() - 3);
}

#[test]
fn no_valid_sessions() {
    let corpus = corpus();
    let mut sessions = cohort(&corpus);
    for s in &mut sessions {
        s.validity = Validity::ExternalSource;
    }
    assert!(matches!(
        analyze(&corpus, &sessions, &[], AnalysisOptions::default()),
        Err(ReportError::NoValidSessions)
    ));
    assert!(matches!(
        analyze(&corpus, &[], &[], AnalysisOptions::default()),
        Err(ReportError::NoValidSessions)
    ));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let corpus = corpus();
    let sessions = cohort(&corpus);
    let dumps = dumps(&corpus);
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let mut shuffled = sessions.clone();
        shuffled.reverse();
        let r = analyze(&corpus, &shuffled, &dumps, AnalysisOptions::default()).unwrap();
        write_report(d.path(), &r).unwrap();
    }
    for f in ["sessions.csv", "correlations.csv", "shares.csv", "dfu.csv", "temporal.csv", "summary.json"] {
        let a = std::fs::read(dirs[0].path().join(f)).unwrap();
        let b = std::fs::read(dirs[1].path().join(f)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn window_seven_is_the_baseline() {
    let corpus = corpus();
    let sessions = cohort(&corpus);
    let dumps = dumps(&corpus);
    let opts = AnalysisOptions::default();
    let base = analyze(&corpus, &sessions, &dumps, opts).unwrap();
    let table = sensitivity_table(&corpus, &sessions, &dumps, opts, &[7, 3], 99).unwrap();
    let row = &table.rows[0];
    assert_eq!(row.window, 7);
    for (group, cell) in &row.groups {
        let g = &base.summary.correlations[group];
        assert_eq!(cell.mean_rho, g.mean_rho, "{group}");
        assert_eq!(cell.kept, g.kept);
    }
    let again = sensitivity_table(&corpus, &sessions, &dumps, opts, &[7, 3], 99).unwrap();
    assert_eq!(again.to_csv(), table.to_csv());
    assert!(sensitivity_table(&corpus, &sessions, &dumps, opts, &[8], 99).is_err());
}

#[test]
fn unknown_snippet_is_an_input_error() {
    let corpus = corpus();
    let mut sessions = cohort(&corpus);
    sessions[0].snippet_id = "nope".into();
    assert!(matches!(
        analyze(&corpus, &sessions, &[], AnalysisOptions::default()),
        Err(ReportError::UnknownSnippet { .. })
    ));
}
