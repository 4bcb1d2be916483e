use std::sync::Arc;

use codeattn_core::report::{analyze, AnalysisOptions};
use codeattn_core::session::{compute_window, derive_attention, replay, InteractionEvent, Label, Validity};
use codeattn_core::synth::fuzz_session;
use codeattn_core::{AttentionVector, Corpus, Snippet};
use codeattn_service::api::{EventBatch, OpenSessionRequest, RegisterRequest, SubmitRequest, TaskStatus};
use codeattn_service::{ServiceError, StudyConfig, StudyService};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus(n: usize) -> Corpus {
    let snippets = (0..n)
        .map(|i| Snippet::new(format!("s{i:02}"), "int x = a + b * c - d;\nreturn x;", 1, "fix it").unwrap())
        .collect();
    Corpus::new(snippets).unwrap()
}

fn service(dir: &std::path::Path, n: usize, k: usize) -> StudyService {
    let mut cfg = StudyConfig::new("unused", dir);
    cfg.tasks_per_participant = k;
    cfg.seed = 42;
    StudyService::with_corpus(cfg, corpus(n)).unwrap()
}

fn register(svc: &StudyService, id: &str) -> Vec<String> {
    svc.register(RegisterRequest {
        format_version: 1,
        participant_id: Some(id.into()),
    })
    .unwrap()
    .tasks
}

fn open(svc: &StudyService, pid: &str, sid: &str) -> String {
    svc.open_session(OpenSessionRequest {
        format_version: 1,
        participant_id: pid.into(),
        snippet_id: sid.into(),
    })
    .unwrap()
    .0
    .session_token
}

fn batch(events: Vec<InteractionEvent>) -> EventBatch {
    EventBatch {
        format_version: 1,
        events,
    }
}

fn submit(label: Label, line: Option<&str>, external: bool) -> SubmitRequest {
    SubmitRequest {
        format_version: 1,
        label,
        final_buggy_line: line.map(Into::into),
        external_source: external,
        submitted_at_ms: Some(100_000),
    }
}

#[test]
fn assignment_examples() {
    let dir = tempfile::tempdir().unwrap();
    let svc = service(dir.path(), 16, 4);
    let mut all: Vec<String> = (0..4).flat_map(|p| register(&svc, &format!("p{p}"))).collect();
    all.sort();
    assert_eq!(all, (0..16).map(|i| format!("s{i:02}")).collect::<Vec<_>>());

    let dir = tempfile::tempdir().unwrap();
    let svc = service(dir.path(), 1, 1);
    for p in 0..3 {
        assert_eq!(register(&svc, &format!("p{p}")), ["s00"]);
    }

    let dir = tempfile::tempdir().unwrap();
    let svc = service(dir.path(), 16, 4);
    let mut coverage = std::collections::BTreeMap::<String, usize>::new();
    for p in 0..27 {
        for t in register(&svc, &format!("p{p}")) {
            *coverage.entry(t).or_default() += 1;
        }
    }
    assert_eq!(coverage.len(), 16);
    assert!(coverage.values().all(|&c| c >= 6), "{coverage:?}");
}

#[test]
fn config_bounds_tasks() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = StudyConfig::new("unused", dir.path());
    cfg.tasks_per_participant = 3;
    assert!(matches!(StudyService::with_corpus(cfg.clone(), corpus(2)), Err(ServiceError::Config(_))));
    cfg.tasks_per_participant = 0;
    assert!(matches!(StudyService::with_corpus(cfg, corpus(2)), Err(ServiceError::Config(_))));
}

#[test]
fn append_rules() {
    let dir = tempfile::tempdir().unwrap();
    let svc = service(dir.path(), 4, 2);
    let tasks = register(&svc, "p");
    let token = open(&svc, "p", &tasks[0]);

    let ack = svc.append_events(&token, batch(vec![])).unwrap();
    assert_eq!((ack.accepted, ack.persisted_events), (0, 0));

    let snippet = svc.corpus().get(&tasks[0]).unwrap().clone();
    let events: Vec<InteractionEvent> = (0..50u64)
        .map(|k| {
            let focus = (k % 11) as usize;
            InteractionEvent::unblur(k * 100, focus, compute_window(&snippet, focus).unwrap().collect())
        })
        .collect();
    let ack = svc.append_events(&token, batch(events)).unwrap();
    assert_eq!(ack.persisted_events, 50);

    let eight = InteractionEvent::unblur(6000, 4, (0..8).collect());
    assert!(matches!(
        svc.append_events(&token, batch(vec![eight])),
        Err(ServiceError::MalformedEvent { index: 0, .. })
    ));
    // Visible set not matching the window around the focus.
    let shifted = InteractionEvent::unblur(6000, 4, (2..9).collect());
    assert!(matches!(
        svc.append_events(&token, batch(vec![shifted])),
        Err(ServiceError::MalformedEvent { .. })
    ));
    assert!(matches!(
        svc.append_events(&token, batch(vec![InteractionEvent::blur_everything(10)])),
        Err(ServiceError::OutOfOrderBatch { last_ms: 4900, got_ms: 10 })
    ));
    // A bad event late in a batch rejects the whole batch.
    let mixed = vec![
        InteractionEvent::blur_everything(5000),
        InteractionEvent::edit(5100, "int x = a + b;\nreturn 0;"),
    ];
    assert!(matches!(
        svc.append_events(&token, batch(mixed)),
        Err(ServiceError::MalformedEvent { index: 1, .. })
    ));
    assert_eq!(svc.append_events(&token, batch(vec![])).unwrap().persisted_events, 50);
    assert!(matches!(
        svc.append_events("nope", batch(vec![])),
        Err(ServiceError::UnknownSession(_))
    ));
}

#[test]
fn submission_rules() {
    let dir = tempfile::tempdir().unwrap();
    let svc = service(dir.path(), 4, 3);
    let tasks = register(&svc, "p");
    let [a, b, c] = [0, 1, 2].map(|i| open(&svc, "p", &tasks[i]));

    assert!(matches!(
        svc.submit(&a, submit(Label::FixDone, Some("int x = a;"), false)),
        Err(ServiceError::EmptySession)
    ));
    for t in [&a, &b, &c] {
        svc.append_events(t, batch(vec![InteractionEvent::unblur(10, 0, (0..4).collect())]))
            .unwrap();
    }
    let r = svc
        .submit(&a, submit(Label::FixDone, Some("int x = a + b * c + d;"), false))
        .unwrap()
        .record;
    assert_eq!((r.label, r.validity), (Label::FixDone, Validity::Valid));
    assert_eq!(r.final_buggy_line, "int x = a + b * c + d;");

    let r = svc.submit(&b, submit(Label::CannotFix, None, false)).unwrap().record;
    assert_eq!(r.final_buggy_line, "int x = a + b * c - d;");

    let r = svc.submit(&c, submit(Label::CannotFix, None, true)).unwrap().record;
    assert_eq!(r.validity, Validity::ExternalSource);

    assert!(matches!(
        svc.submit(&a, submit(Label::CannotFix, None, false)),
        Err(ServiceError::AlreadyClosed(_))
    ));
    assert!(matches!(
        svc.append_events(&a, batch(vec![])),
        Err(ServiceError::StaleSession(_))
    ));
    assert!(matches!(
        svc.open_session(OpenSessionRequest {
            format_version: 1,
            participant_id: "p".into(),
            snippet_id: tasks[0].clone(),
        }),
        Err(ServiceError::AlreadyClosed(_))
    ));

    let report = analyze(svc.corpus(), &svc.records(), &[], AnalysisOptions::default()).unwrap();
    assert_eq!(report.summary.sessions.excluded_external_source, 1);
    assert_eq!(report.summary.sessions.included, 2);

    let list = svc.tasks("p").unwrap();
    assert!(list.tasks.iter().all(|t| t.status == TaskStatus::Submitted));
    assert_eq!(list.guidance_minutes, 15);
}

#[test]
fn one_open_session_per_task() {
    let dir = tempfile::tempdir().unwrap();
    let svc = service(dir.path(), 4, 2);
    let tasks = register(&svc, "p");
    let first = svc
        .open_session(OpenSessionRequest {
            format_version: 1,
            participant_id: "p".into(),
            snippet_id: tasks[0].clone(),
        })
        .unwrap();
    let again = svc
        .open_session(OpenSessionRequest {
            format_version: 1,
            participant_id: "p".into(),
            snippet_id: tasks[0].clone(),
        })
        .unwrap();
    assert!(first.1 && !again.1 && again.0.resumed);
    assert_eq!(first.0.session_token, again.0.session_token);
    let other = (0..4).map(|i| format!("s{i:02}")).find(|s| !tasks.contains(s)).unwrap();
    assert!(matches!(
        svc.open_session(OpenSessionRequest {
            format_version: 1,
            participant_id: "p".into(),
            snippet_id: other,
        }),
        Err(ServiceError::NotAssigned { .. })
    ));
}

#[test]
fn restart_replays_storage() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = corpus(4);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (token, live_events, sid) = {
        let svc = service(dir.path(), 4, 2);
        let tasks = register(&svc, "p");
        register(&svc, "q");
        let token = open(&svc, "p", &tasks[0]);
        let rec = fuzz_session(corpus.get(&tasks[0]).unwrap(), "p", 80, &mut rng);
        for chunk in rec.events.chunks(7) {
            svc.append_events(&token, batch(chunk.to_vec())).unwrap();
        }
        (token, rec.events, tasks[0].clone())
    };
    let svc = service(dir.path(), 4, 2);
    // Assignment continues the same seeded stream.
    let fresh = service(tempfile::tempdir().unwrap().path(), 4, 2);
    for p in ["p", "q", "r"] {
        register(&fresh, p);
    }
    assert_eq!(register(&svc, "r"), fresh.assign_tasks("r").unwrap());

    let last = live_events.last().unwrap().timestamp_ms;
    let mut req = submit(Label::CannotFix, None, false);
    req.submitted_at_ms = Some(last + 10);
    let record = svc.submit(&token, req).unwrap().record;
    assert_eq!(record.events, live_events);
    let snippet = corpus.get(&sid).unwrap();
    let live: AttentionVector<f64> = derive_attention(snippet, &record).unwrap();

    let svc = service(dir.path(), 4, 2);
    let stored = svc.records();
    assert_eq!(stored.len(), 1);
    assert_eq!(replay::<f64>(snippet, &stored[0]).unwrap(), live);
}

#[test]
fn concurrent_batches_stay_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let svc = Arc::new(service(dir.path(), 4, 4));
    let tasks = register(&svc, "p");
    let token = open(&svc, "p", &tasks[0]);
    let threads: Vec<_> = (0..16u64)
        .map(|k| {
            let svc = Arc::clone(&svc);
            let token = token.clone();
            std::thread::spawn(move || {
                // Each batch is a run of 5 events; thread k uses times k*1000.. .
                let events: Vec<InteractionEvent> = (0..5u64)
                    .map(|j| InteractionEvent::unblur(k * 1000 + j, 0, (0..4).collect()))
                    .collect();
                svc.append_events(&token, batch(events)).map(|_| k)
            })
        })
        .collect();
    let accepted: Vec<u64> = threads
        .into_iter()
        .filter_map(|t| match t.join().unwrap() {
            Ok(k) => Some(k),
            Err(ServiceError::OutOfOrderBatch { .. }) => None,
            Err(e) => panic!("{e}"),
        })
        .collect();
    assert!(!accepted.is_empty());
    let mut req = submit(Label::CannotFix, None, false);
    req.submitted_at_ms = Some(20_000);
    let events = svc.submit(&token, req).unwrap().record.events;
    assert_eq!(events.len(), accepted.len() * 5);
    // Batches are contiguous: every run of five shares one thread's base.
    for run in events.chunks(5) {
        let base = run[0].timestamp_ms / 1000;
        assert!(run.iter().enumerate().all(|(j, e)| e.timestamp_ms == base * 1000 + j as u64));
    }
    assert!(events.windows(2).all(|w| w[0].timestamp_ms <= w[1].timestamp_ms));
}

#[test]
fn concurrent_sessions_proceed_independently() {
    let dir = tempfile::tempdir().unwrap();
    let svc = Arc::new(service(dir.path(), 8, 2));
    let pids: Vec<String> = (0..8).map(|p| format!("p{p}")).collect();
    let tokens: Vec<String> = pids
        .iter()
        .map(|p| {
            let t = register(&svc, p);
            open(&svc, p, &t[0])
        })
        .collect();
    let handles: Vec<_> = tokens
        .iter()
        .cloned()
        .map(|token| {
            let svc = Arc::clone(&svc);
            std::thread::spawn(move || {
                for k in 0..20u64 {
                    let ev = InteractionEvent::unblur(k * 50, 1, (0..5).collect());
                    svc.append_events(&token, batch(vec![ev])).unwrap();
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    for t in &tokens {
        assert_eq!(svc.append_events(t, batch(vec![])).unwrap().persisted_events, 20);
    }
}
