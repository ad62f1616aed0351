//! Page fetching behind a pluggable HTTP contract: a live agent for real
//! crawls and a fixture-backed replay store for offline runs.

use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::net::{self, RateLimiter};

use super::{FetchError, ScamPage, UrlCandidate};

pub const DEFAULT_REDIRECT_CAP: usize = 5;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);
pub const DEFAULT_POLITENESS: Duration = Duration::from_secs(1);

/// One HTTP exchange, before redirect handling.
#[derive(Debug, Clone)]
pub struct HttpResponse {
    pub status: u16,
    pub location: Option<String>,
    pub body: Vec<u8>,
    pub fetched_at: DateTime<Utc>,
}

/// Single-request HTTP contract. Redirect following, the hop cap, and error
/// typing live in [`fetch_page`]; implementations only do one exchange.
pub trait HttpFetch: Send + Sync {
    fn get(&self, url: &str) -> Result<HttpResponse, FetchError>;
}

/// Stable fixture key for a URL.
pub fn url_key(url: &str) -> String {
    hex::encode(Sha256::digest(url.as_bytes()))
}

/// Metadata sidecar stored next to each fixture body.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PageMeta {
    pub url: String,
    pub status: u16,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub redirect_chain: Vec<String>,
    pub fetched_at: DateTime<Utc>,
    /// Simulated transport failure ("connect", "timeout", "dns").
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// On-disk page store: `<key>.json` metadata plus `<key>.body` raw bytes,
/// keyed by the SHA-256 of the URL.
#[derive(Debug, Clone)]
pub struct PageStore {
    dir: PathBuf,
}

impl PageStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, FetchError> {
        let dir = dir.into();
        if !dir.is_dir() {
            return Err(FetchError::StoreMissing(dir.display().to_string()));
        }
        Ok(PageStore { dir })
    }

    fn meta_path(&self, url: &str) -> PathBuf {
        self.dir.join(format!("{}.json", url_key(url)))
    }

    fn body_path(&self, url: &str) -> PathBuf {
        self.dir.join(format!("{}.body", url_key(url)))
    }

    pub fn read(&self, url: &str) -> Result<(PageMeta, Vec<u8>), FetchError> {
        let meta_path = self.meta_path(url);
        if !meta_path.exists() {
            return Err(FetchError::MissingFixture(url.to_string()));
        }
        let meta: PageMeta = serde_json::from_str(
            &std::fs::read_to_string(&meta_path).map_err(|e| FetchError::Io(e.to_string()))?,
        )
        .map_err(|e| FetchError::Io(format!("{}: {e}", meta_path.display())))?;
        let body_path = self.body_path(url);
        let body = if body_path.exists() {
            std::fs::read(&body_path).map_err(|e| FetchError::Io(e.to_string()))?
        } else {
            Vec::new()
        };
        Ok((meta, body))
    }

    /// Write a fixture entry (used when building replay sets).
    pub fn write(&self, meta: &PageMeta, body: &[u8]) -> Result<(), FetchError> {
        let json = serde_json::to_string_pretty(meta).expect("meta serializes");
        std::fs::write(self.meta_path(&meta.url), json).map_err(|e| FetchError::Io(e.to_string()))?;
        std::fs::write(self.body_path(&meta.url), body).map_err(|e| FetchError::Io(e.to_string()))?;
        Ok(())
    }
}

/// Fixture-backed fetcher; answers exclusively from the page store.
pub struct ReplayHttp {
    store: PageStore,
}

impl ReplayHttp {
    pub fn new(store: PageStore) -> Self {
        ReplayHttp { store }
    }
}

impl HttpFetch for ReplayHttp {
    fn get(&self, url: &str) -> Result<HttpResponse, FetchError> {
        let (meta, body) = self.store.read(url)?;
        if let Some(kind) = &meta.error {
            return Err(match kind.as_str() {
                "timeout" => FetchError::Timeout(url.to_string()),
                _ => FetchError::Connect { url: url.to_string(), reason: kind.clone() },
            });
        }
        Ok(HttpResponse {
            status: meta.status,
            location: meta.location.clone(),
            body,
            fetched_at: meta.fetched_at,
        })
    }
}

/// Live fetcher with timeout and a per-host politeness delay. Never follows
/// redirects itself; hops are driven (and capped) by [`fetch_page`]. Pages are
/// fetched as opaque bytes; no scripts run.
pub struct LiveHttp {
    agent: ureq::Agent,
    limiter: RateLimiter,
}

impl LiveHttp {
    pub fn new(timeout: Duration, politeness: Duration) -> Result<Self, FetchError> {
        net::assert_network_allowed().map_err(|e| FetchError::Forbidden(e.to_string()))?;
        let agent = ureq::AgentBuilder::new()
            .timeout(timeout)
            .redirects(0)
            .build();
        Ok(LiveHttp { agent, limiter: RateLimiter::new(politeness) })
    }
}

fn host_of(url: &str) -> &str {
    let rest = url.split("://").nth(1).unwrap_or(url);
    rest.split('/').next().unwrap_or(rest)
}

impl HttpFetch for LiveHttp {
    fn get(&self, url: &str) -> Result<HttpResponse, FetchError> {
        self.limiter.wait(host_of(url));
        let fetched_at = Utc::now();
        match self.agent.get(url).call() {
            Ok(resp) | Err(ureq::Error::Status(_, resp)) => {
                let status = resp.status();
                let location = resp.header("location").map(str::to_string);
                let mut body = Vec::new();
                resp.into_reader()
                    .read_to_end(&mut body)
                    .map_err(|e| FetchError::Io(e.to_string()))?;
                Ok(HttpResponse { status, location, body, fetched_at })
            }
            Err(ureq::Error::Transport(t)) => {
                Err(FetchError::Connect { url: url.to_string(), reason: t.to_string() })
            }
        }
    }
}

/// Fetch the page behind a URL candidate, following at most
/// `redirect_cap` redirects and recording the final post-redirect URL.
pub fn fetch_page(
    url: &UrlCandidate,
    fetcher: &dyn HttpFetch,
    redirect_cap: usize,
) -> Result<ScamPage, FetchError> {
    let mut current = url.normalized.clone();
    let mut redirects = Vec::new();
    loop {
        let resp = fetcher.get(&current)?;
        let is_redirect = (300..400).contains(&resp.status) && resp.location.is_some();
        if !is_redirect {
            return Ok(ScamPage {
                url: current,
                body: resp.body,
                fetched_at: resp.fetched_at,
                status: resp.status,
            });
        }
        if redirects.len() >= redirect_cap {
            return Err(FetchError::RedirectLoop {
                url: url.normalized.clone(),
                hops: redirects.len() + 1,
            });
        }
        redirects.push(current.clone());
        let next = resp.location.unwrap();
        current = if next.contains("://") {
            next
        } else {
            // naive relative resolution against the current host
            format!("https://{}{}", host_of(&current), next)
        };
    }
}
