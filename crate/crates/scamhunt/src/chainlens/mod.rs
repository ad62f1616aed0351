//! Transaction history retrieval and USD valuation.
//!
//! Explorer clients (live or replay) normalize per-chain transaction records
//! into [`Transfer`]s; a daily low/high price series values each transfer as
//! a min-max USD range. All money math is exact decimal arithmetic.

use bigdecimal::BigDecimal;
use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

mod explorer;
mod price;
mod units;

pub use explorer::{fetch_transfers, ExplorerClient, LiveExplorer, ReplayExplorer};
pub use price::{usd_range, NearestDay, PriceSeries};
pub use units::{base_to_native, native_to_base};

use crate::extractor::Chain;

/// One on-chain transaction edge touching a scam address. Amounts are exact
/// decimals in native units (BTC, ETH, BNB, ADA, XRP) and serialize as
/// strings; JSON numbers would round-trip through f64 and drift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transfer {
    pub chain: Chain,
    pub tx_hash: String,
    pub from_addr: String,
    pub to_addr: String,
    pub amount: BigDecimal,
    pub timestamp: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub self_transfer: bool,
}

impl Transfer {
    /// Enforce the record invariants; every ingest path calls this.
    pub fn validate(&self) -> Result<(), LedgerError> {
        if self.tx_hash.is_empty() {
            return Err(LedgerError::BadTransfer("empty tx_hash".to_string()));
        }
        if self.amount.sign() != bigdecimal::num_bigint::Sign::Plus {
            return Err(LedgerError::BadTransfer(format!(
                "non-positive amount {} in {}",
                self.amount, self.tx_hash
            )));
        }
        if self.from_addr == self.to_addr && !self.self_transfer {
            return Err(LedgerError::BadTransfer(format!(
                "{}: from equals to without self_transfer flag",
                self.tx_hash
            )));
        }
        Ok(())
    }

    pub fn date(&self) -> NaiveDate {
        self.timestamp.date_naive()
    }
}

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("invalid transfer: {0}")]
    BadTransfer(String),
    #[error("duplicate tx_hash on {chain}: {tx_hash}")]
    DuplicateTx { chain: Chain, tx_hash: String },
    #[error("address {address} failed checksum; refusing to trace")]
    UncheckedAddress { address: String },
    #[error("client chain {client} does not match address chain {address}")]
    ChainMismatch { client: Chain, address: Chain },
    #[error("no ledger fixture for {0}")]
    MissingFixture(String),
    #[error("pagination incomplete: fetched {fetched} of {declared} declared transfers")]
    PaginationIncomplete { fetched: usize, declared: usize },
    #[error("missing price for {}", dates.iter().map(|(c, d)| format!("{c} {d}")).collect::<Vec<_>>().join(", "))]
    MissingPrice { dates: Vec<(Chain, NaiveDate)> },
    #[error("bad price row {line}: {message}")]
    BadPrice { line: usize, message: String },
    #[error("amount {amount} is finer than {chain} base units")]
    SubBaseUnit { chain: Chain, amount: String },
    #[error("explorer error: {0}")]
    Explorer(String),
    #[error("rate limited by explorer")]
    RateLimited,
    #[error("{0}")]
    Forbidden(String),
    #[error("io error: {0}")]
    Io(String),
}

impl LedgerError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, LedgerError::RateLimited)
    }
}

#[cfg(test)]
pub(crate) fn test_transfer(
    chain: Chain,
    tx: &str,
    from: &str,
    to: &str,
    amount: &str,
    ts: &str,
) -> Transfer {
    use std::str::FromStr;
    Transfer {
        chain,
        tx_hash: tx.to_string(),
        from_addr: from.to_string(),
        to_addr: to.to_string(),
        amount: BigDecimal::from_str(amount).unwrap(),
        timestamp: ts.parse().unwrap(),
        self_transfer: false,
    }
}
