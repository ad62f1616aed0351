//! Shared networking plumbing: the no-network guard, retry backoff, and a
//! minimal per-key rate limiter.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use thiserror::Error;

/// Env var that forbids constructing any live network client in this process.
pub const FORBID_NETWORK_ENV: &str = "SCAMHUNT_FORBID_NETWORK";

static FORBID_NETWORK: AtomicBool = AtomicBool::new(false);

/// Forbid live network clients for the rest of the process lifetime.
/// The offline demo path sets this before running any stage.
pub fn forbid_network() {
    FORBID_NETWORK.store(true, Ordering::SeqCst);
}

pub fn network_forbidden() -> bool {
    FORBID_NETWORK.load(Ordering::SeqCst) || std::env::var_os(FORBID_NETWORK_ENV).is_some()
}

#[derive(Debug, Error)]
#[error("live network access is forbidden in this run (replay fixtures only)")]
pub struct NetworkForbidden;

/// Call from every live client constructor.
pub fn assert_network_allowed() -> Result<(), NetworkForbidden> {
    if network_forbidden() {
        Err(NetworkForbidden)
    } else {
        Ok(())
    }
}

/// Bounded exponential backoff policy.
#[derive(Debug, Clone, Copy)]
pub struct BackoffPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for BackoffPolicy {
    fn default() -> Self {
        BackoffPolicy {
            max_retries: 5,
            base_delay: Duration::from_millis(500),
            max_delay: Duration::from_secs(30),
        }
    }
}

impl BackoffPolicy {
    /// Zero-delay policy for tests and replay runs.
    pub fn immediate(max_retries: u32) -> Self {
        BackoffPolicy { max_retries, base_delay: Duration::ZERO, max_delay: Duration::ZERO }
    }

    pub fn delay_for(&self, attempt: u32) -> Duration {
        let factor = 1u32 << attempt.min(16);
        self.base_delay.saturating_mul(factor).min(self.max_delay)
    }

    /// Run `op`, retrying while it reports a retryable error. Returns the last
    /// error once retries are exhausted.
    pub fn run<T, E>(
        &self,
        mut op: impl FnMut() -> Result<T, E>,
        mut is_retryable: impl FnMut(&E) -> bool,
    ) -> Result<T, E> {
        let mut attempt = 0;
        loop {
            match op() {
                Ok(value) => return Ok(value),
                Err(err) if is_retryable(&err) && attempt < self.max_retries => {
                    std::thread::sleep(self.delay_for(attempt));
                    attempt += 1;
                }
                Err(err) => return Err(err),
            }
        }
    }
}

/// Enforces a minimum interval between requests sharing a key (host, chain).
#[derive(Debug)]
pub struct RateLimiter {
    min_interval: Duration,
    last_seen: Mutex<HashMap<String, Instant>>,
}

impl RateLimiter {
    pub fn new(min_interval: Duration) -> Self {
        RateLimiter { min_interval, last_seen: Mutex::new(HashMap::new()) }
    }

    /// From a requests-per-second budget.
    pub fn per_second(rps: f64) -> Self {
        let interval = if rps <= 0.0 {
            Duration::ZERO
        } else {
            Duration::from_secs_f64(1.0 / rps)
        };
        Self::new(interval)
    }

    /// Block until a request for `key` is allowed, then record it.
    pub fn wait(&self, key: &str) {
        if self.min_interval.is_zero() {
            return;
        }
        loop {
            let sleep_for = {
                let mut last_seen = self.last_seen.lock().unwrap();
                let now = Instant::now();
                match last_seen.get(key) {
                    Some(&last) if now.duration_since(last) < self.min_interval => {
                        self.min_interval - now.duration_since(last)
                    }
                    _ => {
                        last_seen.insert(key.to_string(), now);
                        return;
                    }
                }
            };
            std::thread::sleep(sleep_for);
        }
    }
}
