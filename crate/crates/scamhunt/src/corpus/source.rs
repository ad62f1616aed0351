//! List and profile sources: replay fixtures for offline runs, plus live
//! adapters speaking a small JSON paging protocol.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

use crate::net::{self, BackoffPolicy, RateLimiter};

use super::{
    parse_list_record, AccountProfile, AccountStatus, CorpusError, ListRecord, SourceCursor,
    SourceError, CorpusStore,
};

/// Env var holding the live-source credential. Fixtures are the default
/// mode; the full test suite runs without it.
pub const SOURCE_API_TOKEN_ENV: &str = "SOURCE_API_TOKEN";

/// One page of list records plus the token of the next page, if any.
#[derive(Debug, Clone)]
pub struct ListPage {
    pub records: Vec<ListRecord>,
    pub next_cursor: Option<String>,
}

/// Paged list lookup. A cursor token of `""` addresses the first page.
pub trait ListSource {
    fn fetch_page(&self, cursor_token: &str) -> Result<ListPage, SourceError>;
}

/// Bulk profile lookup; ids the source does not know are simply absent from
/// the response.
pub trait ProfileSource {
    fn fetch(&self, ids: &[String]) -> Result<Vec<AccountProfile>, SourceError>;
}

// Cursor position encoding: "<page_token>+<offset within page>".
fn parse_position(position: &str) -> (String, usize) {
    match position.rsplit_once('+') {
        Some((token, offset)) => (token.to_string(), offset.parse().unwrap_or(0)),
        None => (position.to_string(), 0),
    }
}

fn encode_position(token: &str, offset: usize) -> String {
    format!("{token}+{offset}")
}

/// Result of one collection run: what was fetched, where to resume, and the
/// permanent source error (if any) that stopped it early.
#[derive(Debug)]
pub struct CollectOutcome {
    pub records: Vec<ListRecord>,
    pub cursor: SourceCursor,
    pub error: Option<SourceError>,
}

/// Pull up to `limit` records from the source, appending each to the store
/// exactly once (dedup by list id). Rate-limit and network errors are
/// retried under the backoff policy; a permanent error returns the partial
/// batch with a resumable cursor and the error attached.
pub fn collect_lists(
    source: &dyn ListSource,
    store: &mut CorpusStore,
    cursor: &SourceCursor,
    limit: usize,
    backoff: &BackoffPolicy,
) -> Result<CollectOutcome, CorpusError> {
    let (mut page_token, mut offset) = parse_position(&cursor.position);
    let mut fetched_count = cursor.fetched_count;
    let mut records = Vec::new();

    loop {
        let page = match backoff.run(|| source.fetch_page(&page_token), SourceError::is_retryable) {
            Ok(page) => page,
            Err(err @ SourceError::Permanent(_)) => {
                return Ok(CollectOutcome {
                    records,
                    cursor: SourceCursor {
                        position: encode_position(&page_token, offset),
                        fetched_count,
                    },
                    error: Some(err),
                });
            }
            Err(err) => return Err(err.into()),
        };

        while offset < page.records.len() {
            if records.len() >= limit {
                return Ok(CollectOutcome {
                    records,
                    cursor: SourceCursor {
                        position: encode_position(&page_token, offset),
                        fetched_count,
                    },
                    error: None,
                });
            }
            let record = page.records[offset].clone();
            offset += 1;
            fetched_count += 1;
            store.append(&record)?;
            records.push(record);
        }

        match page.next_cursor {
            Some(next) => {
                page_token = next;
                offset = 0;
            }
            None => {
                return Ok(CollectOutcome {
                    records,
                    cursor: SourceCursor {
                        position: encode_position(&page_token, offset),
                        fetched_count,
                    },
                    error: None,
                });
            }
        }
    }
}

/// Resolve profiles for every requested id. Ids the source cannot resolve
/// come back with `status = not_found`; transient failures are retried and,
/// once retries are exhausted, reported with the full unresolved id list.
pub fn lookup_profiles(
    source: &dyn ProfileSource,
    ids: &[String],
    backoff: &BackoffPolicy,
) -> Result<BTreeMap<String, AccountProfile>, CorpusError> {
    if ids.is_empty() {
        return Err(CorpusError::EmptyIdSet);
    }
    let fetched = backoff
        .run(|| source.fetch(ids), SourceError::is_retryable)
        .map_err(|err| match err {
            SourceError::Network(_) | SourceError::RateLimited { .. } => {
                CorpusError::Unresolved { ids: ids.to_vec() }
            }
            other => CorpusError::Source(other),
        })?;

    let mut by_id: HashMap<String, AccountProfile> =
        fetched.into_iter().map(|p| (p.account_id.clone(), p)).collect();
    let mut out = BTreeMap::new();
    for id in ids {
        let mut profile =
            by_id.remove(id).unwrap_or_else(|| AccountProfile::not_found(id));
        if profile.status != AccountStatus::Active {
            // never fabricate metrics for suspended or unknown accounts
            profile.follower_count = 0;
            profile.tweet_count = 0;
        }
        out.insert(id.clone(), profile);
    }
    Ok(out)
}

// ---------------------------------------------------------------- fixtures

#[derive(Debug, Deserialize)]
struct FixtureIndex {
    #[serde(default)]
    lists: BTreeMap<String, String>,
    #[serde(default)]
    profiles: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
struct RawListPage {
    records: Vec<serde_json::Value>,
    #[serde(default)]
    next_cursor: Option<String>,
}

#[derive(Debug, Deserialize)]
struct RawProfilePage {
    profiles: Vec<AccountProfile>,
}

fn read_index(dir: &Path) -> Result<FixtureIndex, SourceError> {
    let path = dir.join("index.json");
    let content = std::fs::read_to_string(&path)
        .map_err(|_| SourceError::MissingFixture(path.display().to_string()))?;
    serde_json::from_str(&content).map_err(|e| SourceError::BadPayload(e.to_string()))
}

/// Fixture-backed list source. The index file maps cursor tokens to numbered
/// page files inside the same directory.
pub struct ReplayListSource {
    dir: PathBuf,
    pages: BTreeMap<String, String>,
}

impl ReplayListSource {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, SourceError> {
        let dir = dir.into();
        let index = read_index(&dir)?;
        Ok(ReplayListSource { dir, pages: index.lists })
    }
}

impl ListSource for ReplayListSource {
    fn fetch_page(&self, cursor_token: &str) -> Result<ListPage, SourceError> {
        let file = self
            .pages
            .get(cursor_token)
            .ok_or_else(|| SourceError::MissingFixture(cursor_token.to_string()))?;
        let content = std::fs::read_to_string(self.dir.join(file))
            .map_err(|e| SourceError::MissingFixture(format!("{file}: {e}")))?;
        let raw: RawListPage =
            serde_json::from_str(&content).map_err(|e| SourceError::BadPayload(e.to_string()))?;
        let records = raw
            .records
            .iter()
            .enumerate()
            .map(|(i, value)| parse_list_record(&value.to_string(), i + 1))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| SourceError::BadPayload(e.to_string()))?;
        Ok(ListPage { records, next_cursor: raw.next_cursor })
    }
}

/// Fixture-backed profile source.
pub struct ReplayProfileSource {
    profiles: HashMap<String, AccountProfile>,
}

impl ReplayProfileSource {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, SourceError> {
        let dir: PathBuf = dir.into();
        let index = read_index(&dir)?;
        let mut profiles = HashMap::new();
        for file in index.profiles.values() {
            let content = std::fs::read_to_string(dir.join(file))
                .map_err(|e| SourceError::MissingFixture(format!("{file}: {e}")))?;
            let raw: RawProfilePage = serde_json::from_str(&content)
                .map_err(|e| SourceError::BadPayload(e.to_string()))?;
            for profile in raw.profiles {
                profiles.insert(profile.account_id.clone(), profile);
            }
        }
        Ok(ReplayProfileSource { profiles })
    }
}

impl ProfileSource for ReplayProfileSource {
    fn fetch(&self, ids: &[String]) -> Result<Vec<AccountProfile>, SourceError> {
        Ok(ids.iter().filter_map(|id| self.profiles.get(id).cloned()).collect())
    }
}

// -------------------------------------------------------------- live mode

fn api_token() -> Result<String, SourceError> {
    std::env::var(SOURCE_API_TOKEN_ENV)
        .map_err(|_| SourceError::Permanent(format!("{SOURCE_API_TOKEN_ENV} is not set")))
}

/// Live list source speaking `GET {base}/lists?cursor=<token>` with a bearer
/// token from the environment. Responses use the same page schema as the
/// replay fixtures.
pub struct LiveListSource {
    base_url: String,
    token: String,
    agent: ureq::Agent,
    limiter: RateLimiter,
}

impl LiveListSource {
    pub fn new(base_url: &str, rate_limit_rps: f64) -> Result<Self, SourceError> {
        net::assert_network_allowed().map_err(|e| SourceError::Forbidden(e.to_string()))?;
        Ok(LiveListSource {
            base_url: base_url.trim_end_matches('/').to_string(),
            token: api_token()?,
            agent: ureq::AgentBuilder::new().timeout(Duration::from_secs(10)).build(),
            limiter: RateLimiter::per_second(rate_limit_rps),
        })
    }
}

fn classify_http_error(err: ureq::Error) -> SourceError {
    match err {
        ureq::Error::Status(429, _) => SourceError::RateLimited { retry_after_secs: None },
        ureq::Error::Status(code, _) if code >= 500 => {
            SourceError::Network(format!("server error {code}"))
        }
        ureq::Error::Status(code, _) => SourceError::Permanent(format!("http status {code}")),
        ureq::Error::Transport(t) => SourceError::Network(t.to_string()),
    }
}

impl ListSource for LiveListSource {
    fn fetch_page(&self, cursor_token: &str) -> Result<ListPage, SourceError> {
        self.limiter.wait("lists");
        let response = self
            .agent
            .get(&format!("{}/lists", self.base_url))
            .query("cursor", cursor_token)
            .set("authorization", &format!("Bearer {}", self.token))
            .call()
            .map_err(classify_http_error)?;
        let raw: RawListPage = response
            .into_json()
            .map_err(|e| SourceError::BadPayload(e.to_string()))?;
        let records = raw
            .records
            .iter()
            .enumerate()
            .map(|(i, value)| parse_list_record(&value.to_string(), i + 1))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| SourceError::BadPayload(e.to_string()))?;
        Ok(ListPage { records, next_cursor: raw.next_cursor })
    }
}

/// Live profile source speaking `GET {base}/profiles?ids=a,b,c`.
pub struct LiveProfileSource {
    base_url: String,
    token: String,
    agent: ureq::Agent,
    limiter: RateLimiter,
}

impl LiveProfileSource {
    pub fn new(base_url: &str, rate_limit_rps: f64) -> Result<Self, SourceError> {
        net::assert_network_allowed().map_err(|e| SourceError::Forbidden(e.to_string()))?;
        Ok(LiveProfileSource {
            base_url: base_url.trim_end_matches('/').to_string(),
            token: api_token()?,
            agent: ureq::AgentBuilder::new().timeout(Duration::from_secs(10)).build(),
            limiter: RateLimiter::per_second(rate_limit_rps),
        })
    }
}

impl ProfileSource for LiveProfileSource {
    fn fetch(&self, ids: &[String]) -> Result<Vec<AccountProfile>, SourceError> {
        self.limiter.wait("profiles");
        let response = self
            .agent
            .get(&format!("{}/profiles", self.base_url))
            .query("ids", &ids.join(","))
            .set("authorization", &format!("Bearer {}", self.token))
            .call()
            .map_err(classify_http_error)?;
        let raw: RawProfilePage = response
            .into_json()
            .map_err(|e| SourceError::BadPayload(e.to_string()))?;
        Ok(raw.profiles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::RefCell;

    fn record_json(id: &str) -> serde_json::Value {
        serde_json::json!({
            "list_id": id,
            "title": format!("title {id}"),
            "description": "",
            "creator_id": "U1",
            "created_at": "2022-03-01T00:00:00Z",
            "member_ids": [],
            "follower_count": 0
        })
    }

    fn write_fixture(dir: &Path, pages: &[(&str, &str, Vec<&str>, Option<&str>)]) {
        let mut lists = BTreeMap::new();
        for (token, file, _, _) in pages {
            lists.insert(token.to_string(), file.to_string());
        }
        let index = serde_json::json!({ "lists": lists });
        std::fs::write(dir.join("index.json"), index.to_string()).unwrap();
        for (_, file, ids, next) in pages {
            let page = serde_json::json!({
                "records": ids.iter().map(|id| record_json(id)).collect::<Vec<_>>(),
                "next_cursor": next,
            });
            std::fs::write(dir.join(file), page.to_string()).unwrap();
        }
    }

    fn fresh_store(dir: &Path) -> CorpusStore {
        CorpusStore::open(dir.join("corpus.jsonl")).unwrap()
    }

    #[test]
    fn exhausting_a_small_fixture() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(dir.path(), &[("", "p0.json", vec!["L1", "L2", "L3"], None)]);
        let source = ReplayListSource::open(dir.path()).unwrap();
        let mut store = fresh_store(dir.path());
        let out = collect_lists(
            &source,
            &mut store,
            &SourceCursor::default(),
            10,
            &BackoffPolicy::immediate(0),
        )
        .unwrap();
        assert_eq!(out.records.len(), 3);
        assert!(out.error.is_none());
        assert_eq!(out.cursor.fetched_count, 3);
    }

    #[test]
    fn limit_two_twice_never_overlaps() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(
            dir.path(),
            &[
                ("", "p0.json", vec!["L1", "L2", "L3"], Some("p1")),
                ("p1", "p1.json", vec!["L4", "L5"], None),
            ],
        );
        let source = ReplayListSource::open(dir.path()).unwrap();
        let mut store = fresh_store(dir.path());
        let policy = BackoffPolicy::immediate(0);
        let first =
            collect_lists(&source, &mut store, &SourceCursor::default(), 2, &policy).unwrap();
        let second = collect_lists(&source, &mut store, &first.cursor, 2, &policy).unwrap();
        let ids1: Vec<&str> = first.records.iter().map(|r| r.list_id.as_str()).collect();
        let ids2: Vec<&str> = second.records.iter().map(|r| r.list_id.as_str()).collect();
        assert_eq!(ids1, vec!["L1", "L2"]);
        assert_eq!(ids2, vec!["L3", "L4"]);
    }

    #[test]
    fn split_collection_equals_one_shot_for_every_split_point() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(
            dir.path(),
            &[
                ("", "p0.json", vec!["L1", "L2", "L3"], Some("p1")),
                ("p1", "p1.json", vec!["L4", "L5", "L6"], None),
            ],
        );
        let source = ReplayListSource::open(dir.path()).unwrap();
        let policy = BackoffPolicy::immediate(0);
        let n = 6;

        let all_dir = tempfile::tempdir().unwrap();
        let mut store = fresh_store(all_dir.path());
        let whole =
            collect_lists(&source, &mut store, &SourceCursor::default(), n, &policy).unwrap();
        let whole_ids: Vec<String> =
            whole.records.iter().map(|r| r.list_id.clone()).collect();

        for k in 0..=n {
            let part_dir = tempfile::tempdir().unwrap();
            let mut store = fresh_store(part_dir.path());
            let a = collect_lists(&source, &mut store, &SourceCursor::default(), k, &policy)
                .unwrap();
            let b = collect_lists(&source, &mut store, &a.cursor, n - k, &policy).unwrap();
            let ids: Vec<String> = a
                .records
                .iter()
                .chain(b.records.iter())
                .map(|r| r.list_id.clone())
                .collect();
            assert_eq!(ids, whole_ids, "split at {k}");
        }
    }

    #[test]
    fn duplicate_list_ids_store_once_but_count_twice() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(dir.path(), &[("", "p0.json", vec!["L1", "L1"], None)]);
        let source = ReplayListSource::open(dir.path()).unwrap();
        let mut store = fresh_store(dir.path());
        let out = collect_lists(
            &source,
            &mut store,
            &SourceCursor::default(),
            10,
            &BackoffPolicy::immediate(0),
        )
        .unwrap();
        assert_eq!(out.cursor.fetched_count, 2);
        assert_eq!(store.len(), 1);
    }

    struct FlakySource {
        responses: RefCell<Vec<Result<ListPage, SourceError>>>,
    }

    impl ListSource for FlakySource {
        fn fetch_page(&self, _cursor: &str) -> Result<ListPage, SourceError> {
            self.responses.borrow_mut().remove(0)
        }
    }

    fn one_record_page() -> ListPage {
        let value = record_json("L1").to_string();
        ListPage {
            records: vec![parse_list_record(&value, 1).unwrap()],
            next_cursor: None,
        }
    }

    #[test]
    fn rate_limits_are_retried_through() {
        let source = FlakySource {
            responses: RefCell::new(vec![
                Err(SourceError::RateLimited { retry_after_secs: None }),
                Err(SourceError::RateLimited { retry_after_secs: None }),
                Ok(one_record_page()),
            ]),
        };
        let dir = tempfile::tempdir().unwrap();
        let mut store = fresh_store(dir.path());
        let out = collect_lists(
            &source,
            &mut store,
            &SourceCursor::default(),
            10,
            &BackoffPolicy::immediate(3),
        )
        .unwrap();
        assert_eq!(out.records.len(), 1);
        assert!(out.error.is_none());
    }

    #[test]
    fn permanent_errors_return_partials_and_the_error() {
        let source = FlakySource {
            responses: RefCell::new(vec![Err(SourceError::Permanent("gone".into()))]),
        };
        let dir = tempfile::tempdir().unwrap();
        let mut store = fresh_store(dir.path());
        let out = collect_lists(
            &source,
            &mut store,
            &SourceCursor::default(),
            10,
            &BackoffPolicy::immediate(0),
        )
        .unwrap();
        assert!(out.records.is_empty());
        assert!(matches!(out.error, Some(SourceError::Permanent(_))));
    }

    fn profile_fixture(dir: &Path) {
        let index = serde_json::json!({ "profiles": {"": "profiles.json"} });
        std::fs::write(dir.join("index.json"), index.to_string()).unwrap();
        let page = serde_json::json!({
            "profiles": [
                {"account_id": "U1", "username": "", "follower_count": 0, "tweet_count": 0, "status": "suspended"},
                {"account_id": "U2", "username": "quiet", "follower_count": 0, "tweet_count": 0, "status": "active"},
                {"account_id": "U3", "username": "busy", "follower_count": 150721, "tweet_count": 78669, "status": "active"}
            ]
        });
        std::fs::write(dir.join("profiles.json"), page.to_string()).unwrap();
    }

    #[test]
    fn suspended_and_active_profiles_resolve() {
        let dir = tempfile::tempdir().unwrap();
        profile_fixture(dir.path());
        let source = ReplayProfileSource::open(dir.path()).unwrap();
        let ids: Vec<String> = ["U1", "U2", "U3"].iter().map(|s| s.to_string()).collect();
        let out = lookup_profiles(&source, &ids, &BackoffPolicy::immediate(0)).unwrap();
        assert_eq!(out["U1"].status, AccountStatus::Suspended);
        assert_eq!(out["U2"].status, AccountStatus::Active);
        assert_eq!(out["U2"].follower_count, 0);
        assert_eq!(out["U3"].follower_count, 150721);
    }

    #[test]
    fn unknown_ids_map_to_not_found() {
        let dir = tempfile::tempdir().unwrap();
        profile_fixture(dir.path());
        let source = ReplayProfileSource::open(dir.path()).unwrap();
        let ids = vec!["U404".to_string()];
        let out = lookup_profiles(&source, &ids, &BackoffPolicy::immediate(0)).unwrap();
        assert_eq!(out["U404"].status, AccountStatus::NotFound);
        assert_eq!(out["U404"].follower_count, 0);
    }

    #[test]
    fn empty_id_set_is_a_precondition_error() {
        let dir = tempfile::tempdir().unwrap();
        profile_fixture(dir.path());
        let source = ReplayProfileSource::open(dir.path()).unwrap();
        assert!(matches!(
            lookup_profiles(&source, &[], &BackoffPolicy::immediate(0)),
            Err(CorpusError::EmptyIdSet)
        ));
    }

    struct DownProfileSource;
    impl ProfileSource for DownProfileSource {
        fn fetch(&self, _: &[String]) -> Result<Vec<AccountProfile>, SourceError> {
            Err(SourceError::Network("unreachable".into()))
        }
    }

    #[test]
    fn exhausted_retries_list_the_unresolved_ids() {
        let ids = vec!["U1".to_string(), "U2".to_string()];
        let err =
            lookup_profiles(&DownProfileSource, &ids, &BackoffPolicy::immediate(1)).unwrap_err();
        match err {
            CorpusError::Unresolved { ids } => assert_eq!(ids.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn suspended_profiles_never_carry_fabricated_counts() {
        // a fixture claiming counts for a suspended account gets zeroed
        let dir = tempfile::tempdir().unwrap();
        let index = serde_json::json!({ "profiles": {"": "profiles.json"} });
        std::fs::write(dir.path().join("index.json"), index.to_string()).unwrap();
        let page = serde_json::json!({
            "profiles": [
                {"account_id": "U9", "username": "x", "follower_count": 10, "tweet_count": 5, "status": "suspended"}
            ]
        });
        std::fs::write(dir.path().join("profiles.json"), page.to_string()).unwrap();
        let source = ReplayProfileSource::open(dir.path()).unwrap();
        let out =
            lookup_profiles(&source, &["U9".to_string()], &BackoffPolicy::immediate(0)).unwrap();
        assert_eq!(out["U9"].follower_count, 0);
        assert_eq!(out["U9"].tweet_count, 0);
    }
}
