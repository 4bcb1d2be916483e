use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use codeattn_core::session::log::{LogEntry, LogLine};
use codeattn_core::session::{EventValidator, InteractionEvent, Label, SessionError, SessionRecord, Validity};
use codeattn_core::{Corpus, Snippet};
use rand::RngCore;

use crate::api::{
    Ack, EventBatch, OpenSessionRequest, Participant, RegisterRequest, SessionInfo, SubmitRequest, Submitted,
    Task, TaskList, TaskStatus, API_FORMAT_VERSION,
};
use crate::assign::Assigner;
use crate::store::{AppendFile, ParticipantRecord, Store};
use crate::{ServiceError, StudyConfig};

fn now_unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

fn random_token() -> String {
    let mut bytes = [0u8; 16];
    rand::rng().fill_bytes(&mut bytes);
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn check_version(v: u32) -> Result<(), ServiceError> {
    if v == API_FORMAT_VERSION {
        Ok(())
    } else {
        Err(ServiceError::UnsupportedVersion(v))
    }
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|p| p.into_inner())
}

/// A session being recorded, or a closed one kept for status queries.
#[derive(Debug)]
struct LiveSession {
    token: String,
    participant_id: String,
    snippet_id: String,
    opened_unix_ms: u64,
    events: Vec<InteractionEvent>,
    record: Option<SessionRecord>,
    log: AppendFile,
}

impl LiveSession {
    fn last_timestamp(&self) -> u64 {
        self.events.last().map_or(0, |e| e.timestamp_ms)
    }

    fn info(&self, resumed: bool) -> SessionInfo {
        SessionInfo {
            format_version: API_FORMAT_VERSION,
            session_token: self.token.clone(),
            participant_id: self.participant_id.clone(),
            snippet_id: self.snippet_id.clone(),
            resumed,
            persisted_events: self.events.len(),
            last_timestamp_ms: self.last_timestamp(),
        }
    }
}

#[derive(Debug)]
struct Registry {
    assigner: Assigner,
    participants: BTreeMap<String, Vec<String>>,
    participants_log: AppendFile,
    /// (participant, snippet) -> session token
    by_task: HashMap<(String, String), String>,
}

/// The study back end: assignment, event ingestion and submission.
///
/// Registry changes are serialized by one lock; each session has its own
/// lock, so batches for one session apply strictly in order while sessions
/// proceed concurrently. Nothing is acknowledged before it is synced.
#[derive(Debug)]
pub struct StudyService {
    config: StudyConfig,
    corpus: Corpus,
    store: Store,
    registry: Mutex<Registry>,
    sessions: RwLock<HashMap<String, Arc<Mutex<LiveSession>>>>,
}

impl StudyService {
    /// Loads the corpus and storage named by `config`, replaying whatever
    /// was persisted by earlier runs.
    pub fn open(config: StudyConfig) -> Result<Self, ServiceError> {
        let corpus = Corpus::load(&config.corpus)?;
        Self::with_corpus(config, corpus)
    }

    pub fn with_corpus(config: StudyConfig, corpus: Corpus) -> Result<Self, ServiceError> {
        config.validate(corpus.len())?;
        let store = Store::open(&config.storage_dir)?;
        let (stored, participants_log) = store.participants()?;

        let mut assigner = Assigner::new(config.seed, corpus.len(), config.tasks_per_participant);
        let mut participants = BTreeMap::new();
        for p in stored {
            let expected: Vec<String> = assigner.next()?.into_iter().map(|i| corpus.snippets()[i].id().to_owned()).collect();
            if expected != p.tasks {
                return Err(ServiceError::Corrupt {
                    path: store.root().display().to_string(),
                    reason: format!(
                        "assignment of `{}` differs from the configured seed and corpus",
                        p.participant_id
                    ),
                });
            }
            participants.insert(p.participant_id, p.tasks);
        }

        let mut by_task = HashMap::new();
        let mut sessions = HashMap::new();
        for (log, file) in store.sessions()? {
            let snippet = corpus.get(&log.snippet_id).ok_or_else(|| ServiceError::Corrupt {
                path: log.session_token.clone(),
                reason: format!("unknown snippet `{}`", log.snippet_id),
            })?;
            EventValidator::new(snippet)
                .check_all(&log.events)
                .map_err(|e| ServiceError::Corrupt {
                    path: log.session_token.clone(),
                    reason: e.to_string(),
                })?;
            by_task.insert((log.participant_id.clone(), log.snippet_id.clone()), log.session_token.clone());
            let live = LiveSession {
                token: log.session_token.clone(),
                participant_id: log.participant_id,
                snippet_id: log.snippet_id,
                opened_unix_ms: log.opened_unix_ms,
                events: log.events,
                record: log.submission,
                log: file,
            };
            sessions.insert(log.session_token, Arc::new(Mutex::new(live)));
        }
        tracing::info!(
            participants = participants.len(),
            sessions = sessions.len(),
            "study storage loaded"
        );

        Ok(Self {
            config,
            corpus,
            store,
            registry: Mutex::new(Registry {
                assigner,
                participants,
                participants_log,
                by_task,
            }),
            sessions: RwLock::new(sessions),
        })
    }

    pub fn config(&self) -> &StudyConfig {
        &self.config
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn register(&self, req: RegisterRequest) -> Result<Participant, ServiceError> {
        check_version(req.format_version)?;
        let mut reg = lock(&self.registry);
        let participant_id = match req.participant_id {
            Some(id) if id.trim().is_empty() => return Err(ServiceError::BadRequest("empty participant_id".into())),
            Some(id) if reg.participants.contains_key(&id) => return Err(ServiceError::DuplicateParticipant(id)),
            Some(id) => id,
            None => random_token(),
        };
        // Work on a copy so a failed write leaves the assignment stream intact.
        let mut assigner = reg.assigner.clone();
        let tasks: Vec<String> = assigner
            .next()?
            .into_iter()
            .map(|i| self.corpus.snippets()[i].id().to_owned())
            .collect();
        let record = ParticipantRecord {
            format_version: API_FORMAT_VERSION,
            participant_id: participant_id.clone(),
            tasks: tasks.clone(),
            registered_unix_ms: now_unix_ms(),
        };
        reg.participants_log
            .append(&[serde_json::to_string(&record).expect("serialisable")])?;
        reg.assigner = assigner;
        reg.participants.insert(participant_id.clone(), tasks.clone());
        Ok(Participant {
            format_version: API_FORMAT_VERSION,
            participant_id,
            tasks,
        })
    }

    /// Assigned snippet ids of a participant.
    pub fn assign_tasks(&self, participant_id: &str) -> Result<Vec<String>, ServiceError> {
        lock(&self.registry)
            .participants
            .get(participant_id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownParticipant(participant_id.to_owned()))
    }

    pub fn tasks(&self, participant_id: &str) -> Result<TaskList, ServiceError> {
        let ids = self.assign_tasks(participant_id)?;
        let tokens: Vec<Option<String>> = {
            let reg = lock(&self.registry);
            ids.iter()
                .map(|s| reg.by_task.get(&(participant_id.to_owned(), s.clone())).cloned())
                .collect()
        };
        let mut tasks = Vec::with_capacity(ids.len());
        for (id, token) in ids.into_iter().zip(tokens) {
            let snippet = self.snippet(&id)?;
            let status = match &token {
                None => TaskStatus::Pending,
                Some(t) => match self.session(t)?.lock() {
                    Ok(s) if s.record.is_some() => TaskStatus::Submitted,
                    _ => TaskStatus::Open,
                },
            };
            tasks.push(Task {
                snippet_id: id,
                source: snippet.source().to_owned(),
                buggy_line: snippet.buggy_line(),
                description: snippet.description().to_owned(),
                tokens: snippet.tokens().to_vec(),
                status,
                session_token: token,
            });
        }
        Ok(TaskList {
            format_version: API_FORMAT_VERSION,
            participant_id: participant_id.to_owned(),
            guidance_minutes: self.config.guidance_minutes,
            tasks,
        })
    }

    fn snippet(&self, id: &str) -> Result<&Snippet, ServiceError> {
        self.corpus
            .get(id)
            .ok_or_else(|| ServiceError::UnknownSnippet(id.to_owned()))
    }

    fn session(&self, token: &str) -> Result<Arc<Mutex<LiveSession>>, ServiceError> {
        self.sessions
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .get(token)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(token.to_owned()))
    }

    /// Opens the session for an assigned task, or returns the one already
    /// open. Returns whether a new session was created.
    pub fn open_session(&self, req: OpenSessionRequest) -> Result<(SessionInfo, bool), ServiceError> {
        check_version(req.format_version)?;
        self.snippet(&req.snippet_id)?;
        let mut reg = lock(&self.registry);
        let tasks = reg
            .participants
            .get(&req.participant_id)
            .ok_or_else(|| ServiceError::UnknownParticipant(req.participant_id.clone()))?;
        if !tasks.contains(&req.snippet_id) {
            return Err(ServiceError::NotAssigned {
                participant: req.participant_id,
                snippet: req.snippet_id,
            });
        }
        let key = (req.participant_id.clone(), req.snippet_id.clone());
        if let Some(token) = reg.by_task.get(&key) {
            let session = self.session(token)?;
            let s = lock(&session);
            if s.record.is_some() {
                return Err(ServiceError::AlreadyClosed(token.clone()));
            }
            return Ok((s.info(true), false));
        }
        let token = random_token();
        let opened_unix_ms = now_unix_ms();
        let log = self.store.create_session(
            &token,
            &LogLine::new(LogEntry::Open {
                session_token: token.clone(),
                participant_id: req.participant_id.clone(),
                snippet_id: req.snippet_id.clone(),
                opened_unix_ms,
            }),
        )?;
        let live = LiveSession {
            token: token.clone(),
            participant_id: req.participant_id,
            snippet_id: req.snippet_id,
            opened_unix_ms,
            events: Vec::new(),
            record: None,
            log,
        };
        let info = live.info(false);
        self.sessions
            .write()
            .unwrap_or_else(|p| p.into_inner())
            .insert(token.clone(), Arc::new(Mutex::new(live)));
        reg.by_task.insert(key, token);
        Ok((info, true))
    }

    /// Validates a batch against the session so far and appends it durably.
    /// The batch is all-or-nothing.
    pub fn append_events(&self, token: &str, batch: EventBatch) -> Result<Ack, ServiceError> {
        check_version(batch.format_version)?;
        let session = self.session(token)?;
        let mut s = lock(&session);
        if s.record.is_some() {
            return Err(ServiceError::StaleSession(token.to_owned()));
        }
        let last = s.last_timestamp();
        let mut prev = last;
        for ev in &batch.events {
            if ev.timestamp_ms < prev {
                return Err(ServiceError::OutOfOrderBatch {
                    last_ms: prev,
                    got_ms: ev.timestamp_ms,
                });
            }
            prev = ev.timestamp_ms;
        }
        let snippet = self.snippet(&s.snippet_id)?;
        let mut validator = EventValidator::resume(snippet, &s.events);
        for (index, ev) in batch.events.iter().enumerate() {
            validator.check(ev).map_err(|e| ServiceError::MalformedEvent {
                index,
                reason: match e {
                    SessionError::MalformedLog { reason, .. } => reason,
                    other => other.to_string(),
                },
            })?;
        }
        if !batch.events.is_empty() {
            let received_unix_ms = now_unix_ms();
            let lines: Vec<String> = batch
                .events
                .iter()
                .map(|e| {
                    LogLine::new(LogEntry::Event {
                        received_unix_ms,
                        event: e.clone(),
                    })
                    .to_json()
                })
                .collect();
            s.log.append(&lines)?;
            s.events.extend(batch.events.iter().cloned());
        }
        Ok(Ack {
            format_version: API_FORMAT_VERSION,
            accepted: batch.events.len(),
            persisted_events: s.events.len(),
            last_timestamp_ms: s.last_timestamp(),
        })
    }

    pub fn submit(&self, token: &str, req: SubmitRequest) -> Result<Submitted, ServiceError> {
        check_version(req.format_version)?;
        let session = self.session(token)?;
        let mut s = lock(&session);
        if s.record.is_some() {
            return Err(ServiceError::AlreadyClosed(token.to_owned()));
        }
        if s.events.is_empty() {
            return Err(ServiceError::EmptySession);
        }
        let snippet = self.snippet(&s.snippet_id)?;
        let final_buggy_line = match (req.label, req.final_buggy_line) {
            (_, Some(line)) => line,
            (Label::CannotFix, None) => snippet
                .line_text(snippet.buggy_line())
                .expect("buggy line exists")
                .to_owned(),
            (Label::FixDone, None) => {
                return Err(ServiceError::InvalidSubmission("fix_done requires final_buggy_line".into()))
            }
        };
        if final_buggy_line.contains(['\n', '\r']) {
            return Err(ServiceError::InvalidSubmission("final_buggy_line spans several lines".into()));
        }
        let last = s.last_timestamp();
        let submitted_at_ms = match req.submitted_at_ms {
            Some(t) if t < last => {
                return Err(ServiceError::InvalidSubmission(format!(
                    "submitted_at_ms {t} precedes last event at {last}"
                )))
            }
            Some(t) => t,
            None => now_unix_ms().saturating_sub(s.opened_unix_ms).max(last),
        };
        let validity = if req.external_source {
            Validity::ExternalSource
        } else {
            Validity::Valid
        };
        let record = SessionRecord::new(
            s.snippet_id.clone(),
            s.participant_id.clone(),
            s.events.clone(),
            req.label,
            final_buggy_line.clone(),
            validity,
            submitted_at_ms,
        )
        .map_err(|e| ServiceError::InvalidSubmission(e.to_string()))?;
        let line = LogLine::new(LogEntry::Submit {
            label: req.label,
            final_buggy_line,
            validity,
            submitted_at_ms,
            received_unix_ms: now_unix_ms(),
        });
        s.log.append(&[line.to_json()])?;
        s.record = Some(record.clone());
        Ok(Submitted {
            format_version: API_FORMAT_VERSION,
            record,
        })
    }

    /// Submitted records, ordered by (snippet, participant).
    pub fn records(&self) -> Vec<SessionRecord> {
        let sessions = self.sessions.read().unwrap_or_else(|p| p.into_inner());
        let mut out: Vec<SessionRecord> = sessions.values().filter_map(|s| lock(s).record.clone()).collect();
        out.sort_by(|a, b| (&a.snippet_id, &a.participant_id).cmp(&(&b.snippet_id, &b.participant_id)));
        out
    }
}
