//! List-record ingestion: canonical record parsing, the append-only corpus
//! store, and pluggable list/profile sources with replay fixtures.

use chrono::{DateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

mod source;
mod store;

pub use source::{
    collect_lists, lookup_profiles, CollectOutcome, ListPage, ListSource, LiveListSource,
    LiveProfileSource, ProfileSource, ReplayListSource, ReplayProfileSource,
};
pub use store::CorpusStore;

/// Records may not predate the platform itself.
pub fn earliest_created_at() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2006, 1, 1, 0, 0, 0).unwrap()
}

/// Member lists are capped defensively; the overflow flag marks truncation.
pub const MAX_MEMBER_IDS: usize = 100_000;

/// One social-media list: the unit of detection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListRecord {
    pub list_id: String,
    pub title: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub creator_id: String,
    pub created_at: DateTime<Utc>,
    #[serde(default)]
    pub member_ids: Vec<String>,
    #[serde(default)]
    pub follower_count: u64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub member_overflow: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccountStatus {
    Active,
    Suspended,
    NotFound,
}

/// Public profile of a list creator account. Suspended and unresolved
/// accounts carry zero counts, never fabricated ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountProfile {
    pub account_id: String,
    #[serde(default)]
    pub username: String,
    #[serde(default)]
    pub follower_count: u64,
    #[serde(default)]
    pub tweet_count: u64,
    pub status: AccountStatus,
}

impl AccountProfile {
    pub fn not_found(account_id: &str) -> Self {
        AccountProfile {
            account_id: account_id.to_string(),
            username: String::new(),
            follower_count: 0,
            tweet_count: 0,
            status: AccountStatus::NotFound,
        }
    }
}

/// Opaque resumable position in a source stream plus a fetch counter.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCursor {
    pub position: String,
    pub fetched_count: u64,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: malformed JSON: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: missing or invalid required key `{key}`")]
    Schema { line: usize, key: String },
    #[error("line {line}: created_at {value} predates 2006-01-01T00:00:00Z")]
    TimestampTooEarly { line: usize, value: String },
    #[error("duplicate list_id in store: {0}")]
    DuplicateId(String),
    #[error("profile lookup requires at least one id")]
    EmptyIdSet,
    #[error("source error: {0}")]
    Source(#[from] SourceError),
    #[error("unresolved ids after retries: {}", ids.join(", "))]
    Unresolved { ids: Vec<String> },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum SourceError {
    #[error("rate limited{}", retry_after_secs.map(|s| format!(" (retry after {s}s)")).unwrap_or_default())]
    RateLimited { retry_after_secs: Option<u64> },
    #[error("permanent source failure: {0}")]
    Permanent(String),
    #[error("network failure: {0}")]
    Network(String),
    #[error("fixture missing for cursor `{0}`")]
    MissingFixture(String),
    #[error("{0}")]
    Forbidden(String),
    #[error("bad page payload: {0}")]
    BadPayload(String),
}

impl SourceError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, SourceError::RateLimited { .. } | SourceError::Network(_))
    }
}

fn required_str(
    obj: &serde_json::Map<String, serde_json::Value>,
    key: &str,
    line: usize,
) -> Result<String, CorpusError> {
    match obj.get(key) {
        Some(serde_json::Value::String(s)) => Ok(s.clone()),
        _ => Err(CorpusError::Schema { line, key: key.to_string() }),
    }
}

fn optional_str(obj: &serde_json::Map<String, serde_json::Value>, key: &str) -> String {
    obj.get(key).and_then(|v| v.as_str()).unwrap_or_default().to_string()
}

/// Parse one JSONL line into a [`ListRecord`].
///
/// `list_id`, `title`, and `created_at` are required; other fields default.
/// Unknown keys are ignored. Timestamps are normalized to UTC, member ids
/// are deduplicated preserving order, and oversized member lists are capped
/// with the overflow flag set.
pub fn parse_list_record(line: &str, line_no: usize) -> Result<ListRecord, CorpusError> {
    let value: serde_json::Value = serde_json::from_str(line)
        .map_err(|e| CorpusError::Parse { line: line_no, message: e.to_string() })?;
    let obj = value
        .as_object()
        .ok_or_else(|| CorpusError::Schema { line: line_no, key: "<object>".to_string() })?;

    let list_id = required_str(obj, "list_id", line_no)?;
    if list_id.is_empty() {
        return Err(CorpusError::Schema { line: line_no, key: "list_id".to_string() });
    }
    let title = required_str(obj, "title", line_no)?;
    let created_raw = required_str(obj, "created_at", line_no)?;
    let created_at = DateTime::parse_from_rfc3339(&created_raw)
        .map_err(|_| CorpusError::Schema { line: line_no, key: "created_at".to_string() })?
        .with_timezone(&Utc);
    if created_at < earliest_created_at() {
        return Err(CorpusError::TimestampTooEarly { line: line_no, value: created_raw });
    }

    let mut member_ids: Vec<String> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut member_overflow = false;
    if let Some(serde_json::Value::Array(items)) = obj.get("member_ids") {
        for item in items {
            let Some(id) = item.as_str() else {
                return Err(CorpusError::Schema { line: line_no, key: "member_ids".to_string() });
            };
            if !seen.insert(id.to_string()) {
                continue;
            }
            if member_ids.len() >= MAX_MEMBER_IDS {
                member_overflow = true;
                break;
            }
            member_ids.push(id.to_string());
        }
    }

    let follower_count = match obj.get("follower_count") {
        None | Some(serde_json::Value::Null) => 0,
        Some(v) => v
            .as_u64()
            .ok_or_else(|| CorpusError::Schema { line: line_no, key: "follower_count".to_string() })?,
    };

    Ok(ListRecord {
        list_id,
        title,
        description: optional_str(obj, "description"),
        creator_id: optional_str(obj, "creator_id"),
        created_at,
        member_ids,
        follower_count,
        member_overflow,
    })
}
