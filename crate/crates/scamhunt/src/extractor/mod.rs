//! Scam website and fund-collection address extraction.
//!
//! From a scam-classified list: pull giveaway URLs out of the description,
//! fetch the hosted page, then scan and checksum-validate cryptocurrency
//! addresses for each supported chain.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

mod chain;
mod checksum;
mod fetch;
mod scan;
mod urls;

pub use chain::Chain;
pub use checksum::{
    base58_decode, base58check_verify, bech32_verify, eip55_canonical, evm_checksum_ok,
    validate_address, BECH32_CHARSET, BTC_ALPHABET, XRP_ALPHABET,
};
pub use fetch::{
    fetch_page, url_key, HttpFetch, HttpResponse, LiveHttp, PageMeta, PageStore, ReplayHttp,
    DEFAULT_POLITENESS, DEFAULT_REDIRECT_CAP, DEFAULT_TIMEOUT,
};
pub use scan::scan_addresses;
pub use urls::{extract_urls, PublicSuffixList};

/// A URL spotted in a list description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrlCandidate {
    pub raw: String,
    pub normalized: String,
    #[serde(default)]
    pub source_list_id: String,
}

impl UrlCandidate {
    pub fn with_source(mut self, list_id: &str) -> Self {
        self.source_list_id = list_id.to_string();
        self
    }
}

/// A fetched giveaway page. The body is kept verbatim and the status is
/// recorded even for non-200 responses.
#[derive(Debug, Clone)]
pub struct ScamPage {
    pub url: String,
    pub body: Vec<u8>,
    pub fetched_at: DateTime<Utc>,
    pub status: u16,
}

/// A grammar-matched address candidate with its checksum verdict.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainAddress {
    pub chain: Chain,
    pub text: String,
    pub checksum_ok: bool,
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("connect failed for {url}: {reason}")]
    Connect { url: String, reason: String },
    #[error("request timed out: {0}")]
    Timeout(String),
    #[error("no fixture recorded for {0}")]
    MissingFixture(String),
    #[error("page store directory missing: {0}")]
    StoreMissing(String),
    #[error("redirect chain exceeded the cap at {url} ({hops} hops)")]
    RedirectLoop { url: String, hops: usize },
    #[error("{0}")]
    Forbidden(String),
    #[error("io error: {0}")]
    Io(String),
}

/// Keywords whose presence on a page reassigns an EVM address to BNB.
pub const DEFAULT_BNB_KEYWORDS: &[&str] = &["bnb", "binance coin", "bsc"];

/// Split a 0x-format address between the two EVM chains using page context:
/// BNB wins whenever a BNB keyword appears anywhere in the body, otherwise
/// the address stays on ETH.
pub fn disambiguate_evm(address: &ChainAddress, page: &ScamPage, keywords: &[&str]) -> Chain {
    debug_assert!(address.chain.is_evm());
    let body = String::from_utf8_lossy(&page.body).to_lowercase();
    if keywords.iter().any(|kw| body.contains(&kw.to_lowercase())) {
        Chain::Bnb
    } else {
        Chain::Eth
    }
}
