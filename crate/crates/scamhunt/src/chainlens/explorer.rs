//! Explorer clients: a fixture replay client for offline runs and a live
//! HTTP client with rate limiting. Paginated fetches are stitched completely
//! and checked against the declared total.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};
use std::time::Duration;

use bigdecimal::num_bigint::BigInt;
use serde::Deserialize;

use crate::extractor::{Chain, ChainAddress};
use crate::net::{self, BackoffPolicy, RateLimiter};

use super::units::base_to_native;
use super::{LedgerError, Transfer};

/// One page of transfers for an address, with the declared overall total.
#[derive(Debug, Clone)]
pub struct TransferPage {
    pub transfers: Vec<Transfer>,
    pub total: usize,
    pub next_page: Option<usize>,
}

/// Paged per-address transfer lookup for one chain.
pub trait ExplorerClient {
    fn chain(&self) -> Chain;
    fn fetch_page(&self, address: &str, page: usize) -> Result<TransferPage, LedgerError>;
}

/// Fetch the complete transfer history touching a checksum-valid address:
/// pages are stitched until exhausted, every record is validated, tx hashes
/// must be unique, and the stitched count must match the declared total.
pub fn fetch_transfers(
    client: &dyn ExplorerClient,
    address: &ChainAddress,
    backoff: &BackoffPolicy,
) -> Result<Vec<Transfer>, LedgerError> {
    if !address.checksum_ok {
        return Err(LedgerError::UncheckedAddress { address: address.text.clone() });
    }
    if client.chain() != address.chain {
        return Err(LedgerError::ChainMismatch {
            client: client.chain(),
            address: address.chain,
        });
    }

    let mut transfers: Vec<Transfer> = Vec::new();
    let mut seen_hashes: HashSet<String> = HashSet::new();
    let mut page_no = 0usize;
    let declared_total;
    loop {
        let page = backoff.run(
            || client.fetch_page(&address.text, page_no),
            LedgerError::is_retryable,
        )?;
        for transfer in &page.transfers {
            transfer.validate()?;
            if !seen_hashes.insert(transfer.tx_hash.clone()) {
                return Err(LedgerError::DuplicateTx {
                    chain: client.chain(),
                    tx_hash: transfer.tx_hash.clone(),
                });
            }
        }
        transfers.extend(page.transfers);
        match page.next_page {
            Some(next) => page_no = next,
            None => {
                declared_total = page.total;
                break;
            }
        }
    }
    if transfers.len() != declared_total {
        return Err(LedgerError::PaginationIncomplete {
            fetched: transfers.len(),
            declared: declared_total,
        });
    }
    Ok(transfers)
}

#[derive(Debug, Deserialize)]
struct LedgerIndex {
    addresses: BTreeMap<String, String>,
}

/// Fixture-backed explorer: an index file maps each address to a JSONL file
/// of transfers; the file's line count is the declared total. Pages are
/// served in fixed-size slices to exercise stitching.
pub struct ReplayExplorer {
    chain: Chain,
    dir: PathBuf,
    index: BTreeMap<String, String>,
    page_size: usize,
}

impl ReplayExplorer {
    pub fn open(dir: impl Into<PathBuf>, chain: Chain) -> Result<Self, LedgerError> {
        let dir = dir.into();
        let index_path = dir.join("index.json");
        let content = std::fs::read_to_string(&index_path)
            .map_err(|_| LedgerError::MissingFixture(index_path.display().to_string()))?;
        let index: LedgerIndex =
            serde_json::from_str(&content).map_err(|e| LedgerError::Io(e.to_string()))?;
        Ok(ReplayExplorer { chain, dir, index: index.addresses, page_size: 100 })
    }

    pub fn with_page_size(mut self, page_size: usize) -> Self {
        self.page_size = page_size.max(1);
        self
    }

    fn read_all(&self, address: &str) -> Result<Vec<Transfer>, LedgerError> {
        let file = self
            .index
            .get(address)
            .ok_or_else(|| LedgerError::MissingFixture(address.to_string()))?;
        let content = std::fs::read_to_string(self.dir.join(file))
            .map_err(|e| LedgerError::Io(format!("{file}: {e}")))?;
        content
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|line| {
                serde_json::from_str::<Transfer>(line).map_err(|e| LedgerError::Io(e.to_string()))
            })
            .collect()
    }
}

impl ExplorerClient for ReplayExplorer {
    fn chain(&self) -> Chain {
        self.chain
    }

    fn fetch_page(&self, address: &str, page: usize) -> Result<TransferPage, LedgerError> {
        let all = self.read_all(address)?;
        let start = page * self.page_size;
        let end = (start + self.page_size).min(all.len());
        let slice = if start < all.len() { all[start..end].to_vec() } else { Vec::new() };
        let next_page = if end < all.len() { Some(page + 1) } else { None };
        Ok(TransferPage { transfers: slice, total: all.len(), next_page })
    }
}

/// Raw explorer wire record: amounts come back in integer base units
/// (satoshi, wei, ...) and are converted exactly to native units.
#[derive(Debug, Deserialize)]
struct RawTransfer {
    tx_hash: String,
    from_addr: String,
    to_addr: String,
    amount_base_units: String,
    timestamp: chrono::DateTime<chrono::Utc>,
    #[serde(default)]
    self_transfer: bool,
}

#[derive(Debug, Deserialize)]
struct RawTransferPage {
    transfers: Vec<RawTransfer>,
    total: usize,
    #[serde(default)]
    next_page: Option<usize>,
}

/// Live explorer speaking `GET {base}/{chain}/address/{addr}/transfers?page=N`.
pub struct LiveExplorer {
    chain: Chain,
    base_url: String,
    agent: ureq::Agent,
    limiter: RateLimiter,
}

impl LiveExplorer {
    pub fn new(base_url: &str, chain: Chain, rate_limit_rps: f64) -> Result<Self, LedgerError> {
        net::assert_network_allowed().map_err(|e| LedgerError::Forbidden(e.to_string()))?;
        Ok(LiveExplorer {
            chain,
            base_url: base_url.trim_end_matches('/').to_string(),
            agent: ureq::AgentBuilder::new().timeout(Duration::from_secs(10)).build(),
            limiter: RateLimiter::per_second(rate_limit_rps),
        })
    }
}

impl ExplorerClient for LiveExplorer {
    fn chain(&self) -> Chain {
        self.chain
    }

    fn fetch_page(&self, address: &str, page: usize) -> Result<TransferPage, LedgerError> {
        self.limiter.wait(self.chain.ticker());
        let url = format!("{}/{}/address/{}/transfers", self.base_url, self.chain, address);
        let response = self
            .agent
            .get(&url)
            .query("page", &page.to_string())
            .call()
            .map_err(|err| match err {
                ureq::Error::Status(429, _) => LedgerError::RateLimited,
                other => LedgerError::Explorer(other.to_string()),
            })?;
        let raw: RawTransferPage = response
            .into_json()
            .map_err(|e| LedgerError::Explorer(e.to_string()))?;
        let transfers = raw
            .transfers
            .into_iter()
            .map(|t| {
                let base: BigInt = t
                    .amount_base_units
                    .parse()
                    .map_err(|_| LedgerError::Explorer(format!("bad base amount in {}", t.tx_hash)))?;
                Ok(Transfer {
                    chain: self.chain,
                    tx_hash: t.tx_hash,
                    from_addr: t.from_addr,
                    to_addr: t.to_addr,
                    amount: base_to_native(self.chain, &base),
                    timestamp: t.timestamp,
                    self_transfer: t.self_transfer,
                })
            })
            .collect::<Result<Vec<_>, LedgerError>>()?;
        Ok(TransferPage { transfers, total: raw.total, next_page: raw.next_page })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chainlens::test_transfer;

    const SCAM_ETH: &str = "0xc4BE4a14d4E61b2DA5dd7eE64cbA8E85766dFD3d";

    fn eth_address() -> ChainAddress {
        ChainAddress { chain: Chain::Eth, text: SCAM_ETH.to_string(), checksum_ok: true }
    }

    fn write_ledger(dir: &Path, address: &str, transfers: &[Transfer]) {
        let index = serde_json::json!({ "addresses": { address: "ledger.jsonl" } });
        std::fs::write(dir.join("index.json"), index.to_string()).unwrap();
        let lines: Vec<String> =
            transfers.iter().map(|t| serde_json::to_string(t).unwrap()).collect();
        std::fs::write(dir.join("ledger.jsonl"), lines.join("\n")).unwrap();
    }

    fn four_inbound() -> Vec<Transfer> {
        vec![
            test_transfer(Chain::Eth, "0xt1", "0xv1", SCAM_ETH, "0.4", "2022-11-02T10:00:00Z"),
            test_transfer(Chain::Eth, "0xt2", "0xv2", SCAM_ETH, "0.25", "2022-11-20T11:00:00Z"),
            test_transfer(Chain::Eth, "0xt3", "0xv3", SCAM_ETH, "0.2", "2022-12-01T12:00:00Z"),
            test_transfer(
                Chain::Eth,
                "0x154a98e68828721ba1f0ca70ee2787d0ebb98ebf2926a30cb77cb25017ac8e80",
                "0xbinancecustodial",
                SCAM_ETH,
                "130",
                "2022-12-24T09:30:00Z",
            ),
        ]
    }

    #[test]
    fn replay_returns_all_inbound_transfers() {
        let dir = tempfile::tempdir().unwrap();
        write_ledger(dir.path(), SCAM_ETH, &four_inbound());
        let client = ReplayExplorer::open(dir.path(), Chain::Eth).unwrap();
        let got =
            fetch_transfers(&client, &eth_address(), &BackoffPolicy::immediate(0)).unwrap();
        assert_eq!(got.len(), 4);
    }

    #[test]
    fn the_big_december_transfer_is_intact() {
        let dir = tempfile::tempdir().unwrap();
        write_ledger(dir.path(), SCAM_ETH, &four_inbound());
        let client = ReplayExplorer::open(dir.path(), Chain::Eth).unwrap();
        let got =
            fetch_transfers(&client, &eth_address(), &BackoffPolicy::immediate(0)).unwrap();
        let big = got
            .iter()
            .find(|t| t.tx_hash.starts_with("0x154a98e6"))
            .expect("tx present");
        assert_eq!(big.amount.to_string(), "130");
        assert_eq!(big.date(), chrono::NaiveDate::from_ymd_opt(2022, 12, 24).unwrap());
    }

    #[test]
    fn empty_ledger_yields_no_transfers() {
        let dir = tempfile::tempdir().unwrap();
        write_ledger(dir.path(), SCAM_ETH, &[]);
        let client = ReplayExplorer::open(dir.path(), Chain::Eth).unwrap();
        let got =
            fetch_transfers(&client, &eth_address(), &BackoffPolicy::immediate(0)).unwrap();
        assert!(got.is_empty());
    }

    #[test]
    fn pagination_stitches_to_the_declared_total() {
        let dir = tempfile::tempdir().unwrap();
        write_ledger(dir.path(), SCAM_ETH, &four_inbound());
        let client = ReplayExplorer::open(dir.path(), Chain::Eth).unwrap().with_page_size(2);
        let got =
            fetch_transfers(&client, &eth_address(), &BackoffPolicy::immediate(0)).unwrap();
        assert_eq!(got.len(), 4);
        let hashes: Vec<&str> = got.iter().map(|t| t.tx_hash.as_str()).collect();
        assert_eq!(hashes[0], "0xt1");
        assert_eq!(hashes[3].len(), 66);
    }

    #[test]
    fn replay_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        write_ledger(dir.path(), SCAM_ETH, &four_inbound());
        let client = ReplayExplorer::open(dir.path(), Chain::Eth).unwrap().with_page_size(3);
        let a = fetch_transfers(&client, &eth_address(), &BackoffPolicy::immediate(0)).unwrap();
        let b = fetch_transfers(&client, &eth_address(), &BackoffPolicy::immediate(0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn missing_fixture_is_explicit() {
        let dir = tempfile::tempdir().unwrap();
        write_ledger(dir.path(), SCAM_ETH, &[]);
        let client = ReplayExplorer::open(dir.path(), Chain::Eth).unwrap();
        let other = ChainAddress {
            chain: Chain::Eth,
            text: "0x0000000000000000000000000000000000000001".into(),
            checksum_ok: true,
        };
        assert!(matches!(
            fetch_transfers(&client, &other, &BackoffPolicy::immediate(0)),
            Err(LedgerError::MissingFixture(_))
        ));
    }

    #[test]
    fn checksum_failures_are_not_traced() {
        let dir = tempfile::tempdir().unwrap();
        write_ledger(dir.path(), SCAM_ETH, &[]);
        let client = ReplayExplorer::open(dir.path(), Chain::Eth).unwrap();
        let mut addr = eth_address();
        addr.checksum_ok = false;
        assert!(matches!(
            fetch_transfers(&client, &addr, &BackoffPolicy::immediate(0)),
            Err(LedgerError::UncheckedAddress { .. })
        ));
    }

    #[test]
    fn chain_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_ledger(dir.path(), SCAM_ETH, &[]);
        let client = ReplayExplorer::open(dir.path(), Chain::Btc).unwrap();
        assert!(matches!(
            fetch_transfers(&client, &eth_address(), &BackoffPolicy::immediate(0)),
            Err(LedgerError::ChainMismatch { .. })
        ));
    }

    #[test]
    fn duplicate_tx_hashes_fail_the_ledger_invariant() {
        let dir = tempfile::tempdir().unwrap();
        let mut transfers = four_inbound();
        transfers[1].tx_hash = transfers[0].tx_hash.clone();
        write_ledger(dir.path(), SCAM_ETH, &transfers);
        let client = ReplayExplorer::open(dir.path(), Chain::Eth).unwrap();
        assert!(matches!(
            fetch_transfers(&client, &eth_address(), &BackoffPolicy::immediate(0)),
            Err(LedgerError::DuplicateTx { .. })
        ));
    }
}
