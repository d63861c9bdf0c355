//! Append-only session transcripts.
//!
//! Each session lives in `<session_id>.jsonl`: a header line, then one line
//! per attempt in play order, then any rule guesses. Machine and human
//! sessions share the format, so both replay through the same engine and
//! aggregate into the same learning curves.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use uuid::Uuid;

use crate::board::{Board, Bucket};
use crate::engine::{
    new_episode, EngineError, EpisodeParams, EpisodeState, EpisodeStatus, MoveAttempt,
};
use crate::harness::{EpisodeRecord, LearningCurve};
use crate::rng::stream_seed;
use crate::rule::{canonical_form, parse_rule, RuleAst, RuleError};

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("session `{0}` already exists")]
    SessionExists(String),
    #[error("malformed record: {0}")]
    Malformed(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("session has no usable rule: {0}")]
    MissingRule(RuleError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("episode {0} is incomplete")]
    IncompleteEpisode(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnerKind {
    Machine,
    Human,
}

pub fn rule_hash(rule_text: &str) -> String {
    hex::encode(Sha256::digest(rule_text.as_bytes()))
}

fn now_utc() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionRecord {
    pub session_id: String,
    pub learner_kind: LearnerKind,
    pub learner_id: String,
    pub rule_text: String,
    pub rule_hash: String,
    #[serde(rename = "L")]
    pub length: usize,
    pub k_min: usize,
    pub k_max: usize,
    #[serde(rename = "C")]
    pub colors: usize,
    pub gamma: f64,
    pub master_seed: u64,
    pub created_at: String,
}

impl SessionRecord {
    /// A new session with a random id and the current time.
    pub fn new(
        learner_kind: LearnerKind,
        learner_id: &str,
        rule_text: &str,
        params: &EpisodeParams,
        master_seed: u64,
    ) -> Self {
        Self::with_id(
            Uuid::new_v4(),
            learner_kind,
            learner_id,
            rule_text,
            params,
            master_seed,
        )
    }

    /// A machine session whose id is a function of learner, rule and seed.
    pub fn machine(
        learner_id: &str,
        rule_text: &str,
        params: &EpisodeParams,
        master_seed: u64,
    ) -> Self {
        let digest =
            Sha256::digest(format!("machine|{learner_id}|{rule_text}|{master_seed}").as_bytes());
        let mut bytes = [0u8; 16];
        bytes.copy_from_slice(&digest[..16]);
        let id = uuid::Builder::from_random_bytes(bytes).into_uuid();
        Self::with_id(
            id,
            LearnerKind::Machine,
            learner_id,
            rule_text,
            params,
            master_seed,
        )
    }

    fn with_id(
        id: Uuid,
        learner_kind: LearnerKind,
        learner_id: &str,
        rule_text: &str,
        params: &EpisodeParams,
        master_seed: u64,
    ) -> Self {
        Self {
            session_id: id.to_string(),
            learner_kind,
            learner_id: learner_id.to_string(),
            rule_text: rule_text.to_string(),
            rule_hash: rule_hash(rule_text),
            length: params.length,
            k_min: params.k_min,
            k_max: params.k_max,
            colors: params.colors,
            gamma: params.gamma,
            master_seed,
            created_at: now_utc(),
        }
    }

    pub fn params(&self) -> EpisodeParams {
        EpisodeParams {
            length: self.length,
            k_min: self.k_min,
            k_max: self.k_max,
            colors: self.colors,
            gamma: self.gamma,
        }
    }

    pub fn rule(&self) -> Result<RuleAst, TranscriptError> {
        parse_rule(&self.rule_text).map_err(TranscriptError::MissingRule)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttemptRecord {
    pub episode: usize,
    /// 1-based index of the attempt within its episode.
    pub attempt: usize,
    pub board_before: String,
    pub position: usize,
    pub bucket: Bucket,
    pub accepted: bool,
    pub reward: i32,
}

impl AttemptRecord {
    pub fn check(&self, length: usize) -> Result<(), TranscriptError> {
        let bad = |m: String| Err(TranscriptError::Malformed(m));
        if self.reward != if self.accepted { 1 } else { -1 } {
            return bad(format!(
                "reward {} inconsistent with accepted={}",
                self.reward, self.accepted
            ));
        }
        if self.board_before.chars().count() != length {
            return bad(format!(
                "board_before has length {}, expected {length}",
                self.board_before.len()
            ));
        }
        if self.board_before.parse::<Board>().is_err() {
            return bad(format!(
                "board_before `{}` is not a board pattern",
                self.board_before
            ));
        }
        if self.episode == 0 || self.attempt == 0 {
            return bad("episode and attempt indices start at 1".into());
        }
        if self.position == 0 || self.position > length {
            return bad(format!(
                "position {} out of range 1..{length}",
                self.position
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuessRecord {
    pub guess_text: String,
    pub submitted_at: String,
}

impl GuessRecord {
    pub fn now(text: &str) -> Self {
        Self {
            guess_text: text.to_string(),
            submitted_at: now_utc(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Line {
    Header(SessionRecord),
    Attempt(AttemptRecord),
    Guess(GuessRecord),
}

/// Everything recorded for one session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionTranscript {
    pub header: SessionRecord,
    pub attempts: Vec<AttemptRecord>,
    pub guesses: Vec<GuessRecord>,
}

impl SessionTranscript {
    /// Line-delimited JSON. `strip_timestamps` blanks every timestamp so
    /// repeated runs compare byte for byte; `redact_rule` blanks the rule.
    pub fn render(&self, strip_timestamps: bool, redact_rule: bool) -> String {
        let mut header = self.header.clone();
        if strip_timestamps {
            header.created_at.clear();
        }
        if redact_rule {
            header.rule_text.clear();
            header.rule_hash.clear();
        }
        let mut out = String::new();
        let mut push = |line: Line| {
            out.push_str(&serde_json::to_string(&line).expect("records serialize"));
            out.push('\n');
        };
        push(Line::Header(header));
        for a in &self.attempts {
            push(Line::Attempt(a.clone()));
        }
        for g in &self.guesses {
            let mut g = g.clone();
            if strip_timestamps {
                g.submitted_at.clear();
            }
            push(Line::Guess(g));
        }
        out
    }
}

/// Directory of session files. One writer per session.
#[derive(Debug, Clone)]
pub struct TranscriptStore {
    dir: PathBuf,
}

impl TranscriptStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, TranscriptError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, session_id: &str) -> Result<PathBuf, TranscriptError> {
        // Only UUID text is accepted, which also keeps ids inside the store.
        Uuid::parse_str(session_id)
            .map_err(|_| TranscriptError::UnknownSession(session_id.to_string()))?;
        Ok(self.dir.join(format!("{session_id}.jsonl")))
    }

    fn existing(&self, session_id: &str) -> Result<PathBuf, TranscriptError> {
        let path = self.path(session_id)?;
        if path.is_file() {
            Ok(path)
        } else {
            Err(TranscriptError::UnknownSession(session_id.to_string()))
        }
    }

    pub fn contains(&self, session_id: &str) -> bool {
        self.existing(session_id).is_ok()
    }

    pub fn create_session(&self, header: &SessionRecord) -> Result<(), TranscriptError> {
        let path = self.path(&header.session_id)?;
        if header.rule_hash != rule_hash(&header.rule_text) {
            return Err(TranscriptError::Malformed(
                "rule_hash does not match rule_text".into(),
            ));
        }
        let mut file = OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::AlreadyExists => {
                    TranscriptError::SessionExists(header.session_id.clone())
                }
                _ => e.into(),
            })?;
        writeln!(
            file,
            "{}",
            serde_json::to_string(header).expect("header serializes")
        )?;
        file.flush()?;
        Ok(())
    }

    pub fn header(&self, session_id: &str) -> Result<SessionRecord, TranscriptError> {
        let path = self.existing(session_id)?;
        let mut first = String::new();
        BufReader::new(File::open(path)?).read_line(&mut first)?;
        serde_json::from_str(first.trim_end()).map_err(|e| TranscriptError::Parse {
            line: 1,
            message: e.to_string(),
        })
    }

    fn append_lines(
        &self,
        session_id: &str,
        lines: impl IntoIterator<Item = Line>,
    ) -> Result<(), TranscriptError> {
        let path = self.existing(session_id)?;
        let mut buf = String::new();
        for line in lines {
            buf.push_str(&serde_json::to_string(&line).expect("records serialize"));
            buf.push('\n');
        }
        let mut file = OpenOptions::new().append(true).open(path)?;
        file.write_all(buf.as_bytes())?;
        file.flush()?;
        Ok(())
    }

    pub fn append_attempt(
        &self,
        session_id: &str,
        rec: &AttemptRecord,
    ) -> Result<(), TranscriptError> {
        self.append_attempts(session_id, std::slice::from_ref(rec))
    }

    /// Validates every record against the session header, then appends all.
    pub fn append_attempts(
        &self,
        session_id: &str,
        recs: &[AttemptRecord],
    ) -> Result<(), TranscriptError> {
        let header = self.header(session_id)?;
        for r in recs {
            r.check(header.length)?;
        }
        self.append_lines(session_id, recs.iter().cloned().map(Line::Attempt))
    }

    pub fn append_guess(
        &self,
        session_id: &str,
        guess: &GuessRecord,
    ) -> Result<(), TranscriptError> {
        let header = self.header(session_id)?;
        if header.learner_kind != LearnerKind::Human {
            return Err(TranscriptError::Malformed(
                "guesses belong to human sessions".into(),
            ));
        }
        self.append_lines(session_id, [Line::Guess(guess.clone())])
    }

    pub fn raw(&self, session_id: &str) -> Result<String, TranscriptError> {
        Ok(fs::read_to_string(self.existing(session_id)?)?)
    }

    pub fn read_session(&self, session_id: &str) -> Result<SessionTranscript, TranscriptError> {
        parse_transcript(&self.raw(session_id)?)
    }

    /// Session ids present in the store, sorted.
    pub fn session_ids(&self) -> Result<Vec<String>, TranscriptError> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(&self.dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "jsonl") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    if Uuid::parse_str(stem).is_ok() {
                        ids.push(stem.to_string());
                    }
                }
            }
        }
        ids.sort();
        Ok(ids)
    }
}

pub fn parse_transcript(text: &str) -> Result<SessionTranscript, TranscriptError> {
    let mut header = None;
    let mut attempts = Vec::new();
    let mut guesses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let line: Line = serde_json::from_str(raw).map_err(|e| TranscriptError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        match (line, i) {
            (Line::Header(h), 0) => header = Some(h),
            (Line::Header(_), _) => {
                return Err(TranscriptError::Parse {
                    line: i + 1,
                    message: "header after first line".into(),
                })
            }
            (_, 0) => {
                return Err(TranscriptError::Parse {
                    line: 1,
                    message: "missing session header".into(),
                })
            }
            (Line::Attempt(a), _) if guesses.is_empty() => attempts.push(a),
            (Line::Attempt(_), _) => {
                return Err(TranscriptError::Parse {
                    line: i + 1,
                    message: "attempt after guess".into(),
                })
            }
            (Line::Guess(g), _) => guesses.push(g),
        }
    }
    let header = header.ok_or(TranscriptError::Parse {
        line: 1,
        message: "empty transcript".into(),
    })?;
    Ok(SessionTranscript {
        header,
        attempts,
        guesses,
    })
}

/// One recorded attempt that the engine does not reproduce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub episode: usize,
    pub attempt: usize,
    pub fields: Vec<&'static str>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayReport {
    pub session_id: String,
    pub episodes: usize,
    pub attempts: usize,
    /// Whether the header's rule hash matches the rule replayed against.
    pub rule_matches: bool,
    pub divergences: Vec<Divergence>,
}

impl ReplayReport {
    pub fn is_clean(&self) -> bool {
        self.rule_matches && self.divergences.is_empty()
    }
}

/// Attempts grouped by episode, checking that episodes are numbered 1, 2, ...
fn episodes_of(attempts: &[AttemptRecord]) -> Result<Vec<&[AttemptRecord]>, TranscriptError> {
    let groups: Vec<&[AttemptRecord]> = attempts.chunk_by(|a, b| a.episode == b.episode).collect();
    for (i, g) in groups.iter().enumerate() {
        if g[0].episode != i + 1 {
            return Err(TranscriptError::Malformed(format!(
                "episode {} out of sequence (expected {})",
                g[0].episode,
                i + 1
            )));
        }
    }
    Ok(groups)
}

/// Re-runs every attempt through the engine, starting each episode from
/// its recorded first board, and reports where recorded and recomputed
/// outcomes differ. Initial boards are also checked against the session's
/// seed derivation.
pub fn replay_transcript(
    transcript: &SessionTranscript,
    rule: &RuleAst,
    params: &EpisodeParams,
) -> Result<ReplayReport, TranscriptError> {
    let rule = std::sync::Arc::new(rule.clone());
    let header = &transcript.header;
    let mut divergences = Vec::new();
    let groups = episodes_of(&transcript.attempts)?;

    for group in &groups {
        let episode = group[0].episode;
        let first: Board = group[0]
            .board_before
            .parse()
            .map_err(|e| TranscriptError::Malformed(format!("{e}")))?;
        let derived = new_episode(
            rule.clone(),
            params,
            stream_seed(header.master_seed, episode as u64),
        )?;
        if derived.board() != &first {
            divergences.push(Divergence {
                episode,
                attempt: group[0].attempt,
                fields: vec!["initial_board"],
                detail: format!("recorded {first}, seed gives {}", derived.board()),
            });
        }
        let mut state = EpisodeState::from_board(rule.clone(), params, first)?;
        for rec in group.iter() {
            let mut fields = Vec::new();
            let mut detail = Vec::new();
            if rec.board_before != state.board().pattern() {
                fields.push("board_before");
                detail.push(format!("board {} vs {}", rec.board_before, state.board()));
            }
            if state.status().is_terminal() {
                fields.push("status");
                detail.push("attempt after episode ended".to_string());
                divergences.push(Divergence {
                    episode,
                    attempt: rec.attempt,
                    fields,
                    detail: detail.join("; "),
                });
                continue;
            }
            let outcome = state.attempt_move(MoveAttempt::new(rec.position, rec.bucket))?;
            if outcome.accepted != rec.accepted {
                fields.push("accepted");
                detail.push(format!("accepted {} vs {}", rec.accepted, outcome.accepted));
            }
            if outcome.reward != rec.reward {
                fields.push("reward");
                detail.push(format!("reward {} vs {}", rec.reward, outcome.reward));
            }
            if !fields.is_empty() {
                divergences.push(Divergence {
                    episode,
                    attempt: rec.attempt,
                    fields,
                    detail: detail.join("; "),
                });
            }
        }
    }

    Ok(ReplayReport {
        session_id: header.session_id.clone(),
        episodes: groups.len(),
        attempts: transcript.attempts.len(),
        rule_matches: rule_hash(&canonical_form(&rule)) == header.rule_hash,
        divergences,
    })
}

pub fn replay(
    store: &TranscriptStore,
    session_id: &str,
    rule: &RuleAst,
    params: &EpisodeParams,
) -> Result<ReplayReport, TranscriptError> {
    replay_transcript(&store.read_session(session_id)?, rule, params)
}

/// Replays against the rule and parameters recorded in the session header.
pub fn replay_recorded(
    store: &TranscriptStore,
    session_id: &str,
) -> Result<ReplayReport, TranscriptError> {
    let t = store.read_session(session_id)?;
    let rule = t.header.rule()?;
    replay_transcript(&t, &rule, &t.header.params())
}

/// Rule label used for curves exported from transcripts.
pub fn rule_label(header: &SessionRecord) -> String {
    header.rule_hash.chars().take(12).collect()
}

/// Aggregates a session's attempts into a learning curve. The last episode
/// must have ended (cleared or stalemated) unless a guess closed the session.
pub fn session_curve(transcript: &SessionTranscript) -> Result<LearningCurve, TranscriptError> {
    let header = &transcript.header;
    let rule = std::sync::Arc::new(header.rule()?);
    let params = header.params();
    let groups = episodes_of(&transcript.attempts)?;
    let mut episodes = Vec::with_capacity(groups.len());
    for (i, group) in groups.iter().enumerate() {
        let board: Board = group[0]
            .board_before
            .parse()
            .map_err(|e| TranscriptError::Malformed(format!("{e}")))?;
        let mut state = EpisodeState::from_board(rule.clone(), &params, board)?;
        for rec in group.iter() {
            if state.status().is_terminal() {
                break;
            }
            state.attempt_move(MoveAttempt::new(rec.position, rec.bucket))?;
        }
        let last = i + 1 == groups.len();
        if last && !state.status().is_terminal() && transcript.guesses.is_empty() {
            return Err(TranscriptError::IncompleteEpisode(group[0].episode));
        }
        let rewards: Vec<i32> = group.iter().map(|r| r.reward).collect();
        episodes.push(EpisodeRecord::from_rewards(
            group[0].episode,
            &rewards,
            header.gamma,
            state.status() == EpisodeStatus::Cleared,
        ));
    }
    Ok(LearningCurve {
        rule_id: rule_label(header),
        learner_id: header.learner_id.clone(),
        seed: header.master_seed,
        episodes,
    })
}

pub fn export_curves(
    store: &TranscriptStore,
    session_ids: &[String],
) -> Result<Vec<LearningCurve>, TranscriptError> {
    session_ids
        .iter()
        .map(|id| session_curve(&store.read_session(id)?))
        .collect()
}

/// Curves for every session in the store, keyed by session id.
pub fn export_all_curves(
    store: &TranscriptStore,
) -> Result<BTreeMap<String, LearningCurve>, TranscriptError> {
    let ids = store.session_ids()?;
    Ok(ids
        .iter()
        .cloned()
        .zip(export_curves(store, &ids)?)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store() -> (tempfile::TempDir, TranscriptStore) {
        let dir = tempfile::tempdir().unwrap();
        let store = TranscriptStore::open(dir.path()).unwrap();
        (dir, store)
    }

    fn params() -> EpisodeParams {
        EpisodeParams {
            length: 6,
            k_min: 1,
            k_max: 3,
            colors: 2,
            gamma: 0.9,
        }
    }

    fn attempt(accepted: bool) -> AttemptRecord {
        AttemptRecord {
            episode: 1,
            attempt: 1,
            board_before: "R.G...".into(),
            position: 1,
            bucket: Bucket::Left,
            accepted,
            reward: if accepted { 1 } else { -1 },
        }
    }

    #[test]
    fn append_and_read_back() {
        let (_d, store) = store();
        let header = SessionRecord::new(
            LearnerKind::Human,
            "p1",
            "order=any; bucket=any",
            &params(),
            7,
        );
        store.create_session(&header).unwrap();
        store
            .append_attempt(&header.session_id, &attempt(true))
            .unwrap();
        let t = store.read_session(&header.session_id).unwrap();
        assert_eq!(t.header, header);
        assert_eq!(t.attempts, vec![attempt(true)]);
        assert!(matches!(
            store.create_session(&header),
            Err(TranscriptError::SessionExists(_))
        ));
    }

    #[test]
    fn malformed_attempts_rejected() {
        let (_d, store) = store();
        let header = SessionRecord::new(
            LearnerKind::Human,
            "p1",
            "order=any; bucket=any",
            &params(),
            7,
        );
        store.create_session(&header).unwrap();
        let mut bad = attempt(false);
        bad.reward = 1;
        assert!(matches!(
            store.append_attempt(&header.session_id, &bad),
            Err(TranscriptError::Malformed(_))
        ));
        let mut short = attempt(true);
        short.board_before = "R.G".into();
        assert!(store.append_attempt(&header.session_id, &short).is_err());
        assert!(matches!(
            store.append_attempt(&Uuid::new_v4().to_string(), &attempt(true)),
            Err(TranscriptError::UnknownSession(_))
        ));
        assert!(store
            .append_attempt("../etc/passwd", &attempt(true))
            .is_err());
    }

    #[test]
    fn field_names_on_disk() {
        let (_d, store) = store();
        let header = SessionRecord::new(
            LearnerKind::Human,
            "p1",
            "order=any; bucket=any",
            &params(),
            7,
        );
        store.create_session(&header).unwrap();
        store
            .append_attempt(&header.session_id, &attempt(true))
            .unwrap();
        store
            .append_guess(&header.session_id, &GuessRecord::now("anything goes"))
            .unwrap();
        let raw = store.raw(&header.session_id).unwrap();
        let lines: Vec<serde_json::Value> = raw
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        let keys = |v: &serde_json::Value| {
            let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
            k.sort();
            k
        };
        let mut expected_header = vec![
            "session_id",
            "learner_kind",
            "learner_id",
            "rule_text",
            "rule_hash",
            "L",
            "k_min",
            "k_max",
            "C",
            "gamma",
            "master_seed",
            "created_at",
        ];
        expected_header.sort();
        assert_eq!(keys(&lines[0]), expected_header);
        let mut expected_attempt = vec![
            "episode",
            "attempt",
            "board_before",
            "position",
            "bucket",
            "accepted",
            "reward",
        ];
        expected_attempt.sort();
        assert_eq!(keys(&lines[1]), expected_attempt);
        assert_eq!(keys(&lines[2]), vec!["guess_text", "submitted_at"]);
        assert_eq!(lines[1]["bucket"], "left");
        assert_eq!(lines[0]["learner_kind"], "human");
    }

    #[test]
    fn guesses_only_for_humans() {
        let (_d, store) = store();
        let header = SessionRecord::machine("qlearn", "order=any; bucket=any", &params(), 3);
        store.create_session(&header).unwrap();
        assert!(store
            .append_guess(&header.session_id, &GuessRecord::now("x"))
            .is_err());
    }

    #[test]
    fn machine_ids_are_stable() {
        let a = SessionRecord::machine("qlearn", "order=any; bucket=any", &params(), 3);
        let b = SessionRecord::machine("qlearn", "order=any; bucket=any", &params(), 3);
        let c = SessionRecord::machine("qlearn", "order=any; bucket=any", &params(), 4);
        assert_eq!(a.session_id, b.session_id);
        assert_ne!(a.session_id, c.session_id);
        assert!(Uuid::parse_str(&a.session_id).is_ok());
    }

    #[test]
    fn empty_session_gives_empty_curve() {
        let (_d, store) = store();
        let header = SessionRecord::new(
            LearnerKind::Human,
            "p1",
            "order=any; bucket=any",
            &params(),
            7,
        );
        store.create_session(&header).unwrap();
        let curves = export_curves(&store, std::slice::from_ref(&header.session_id)).unwrap();
        assert!(curves[0].episodes.is_empty());
    }

    #[test]
    fn render_strips_and_redacts() {
        let (_d, store) = store();
        let header = SessionRecord::new(
            LearnerKind::Human,
            "p1",
            "order=ltr; bucket=any",
            &params(),
            7,
        );
        store.create_session(&header).unwrap();
        let t = store.read_session(&header.session_id).unwrap();
        let text = t.render(true, true);
        assert!(!text.contains("ltr"));
        assert!(text.contains("\"created_at\":\"\""));
        assert_eq!(parse_transcript(&t.render(false, false)).unwrap(), t);
    }
}
