//! Analysis tables: victim/loss accounting from ledgers, plus list-corpus
//! distributions (timelines, creators, members, followers, URLs, reach).

use bigdecimal::BigDecimal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

mod ledger;
pub mod report;
mod tables;

pub use ledger::{filter_internal, profit_report, victim_stats, ProfitReport, TransferPartition};
pub use tables::{
    creator_distribution, crypto_category, membership_distribution, scam_overview,
    timeline_histogram, unique_member_reach, url_frequency, AliasTable, Granularity,
    MembershipTables, OverviewRow, UrlFrequencyRow,
};

use crate::extractor::Chain;

/// Per-chain victim and loss aggregates. Internal transfers (scam address to
/// scam address) are excluded from every victim figure and only surface in
/// their own count column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VictimStats {
    pub chain: Chain,
    pub scam_address_count: u64,
    pub internal_tx_count: u64,
    pub victim_tx_count: u64,
    pub victim_address_count: u64,
    pub total_amount: BigDecimal,
    pub usd_min: BigDecimal,
    pub usd_max: BigDecimal,
}

impl VictimStats {
    pub fn zero(chain: Chain) -> Self {
        VictimStats {
            chain,
            scam_address_count: 0,
            internal_tx_count: 0,
            victim_tx_count: 0,
            victim_address_count: 0,
            total_amount: BigDecimal::from(0),
            usd_min: BigDecimal::from(0),
            usd_max: BigDecimal::from(0),
        }
    }
}

/// One labeled bucket of a distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub label: String,
    pub count: u64,
    pub ratio: f64,
}

/// Ordered buckets whose counts sum to the total and whose ratios sum to
/// one (up to rounding) whenever the total is non-zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionTable {
    pub buckets: Vec<Bucket>,
    pub total: u64,
}

impl DistributionTable {
    pub fn from_counts(counts: Vec<(String, u64)>) -> Self {
        let total: u64 = counts.iter().map(|(_, c)| c).sum();
        let buckets = counts
            .into_iter()
            .map(|(label, count)| Bucket {
                label,
                count,
                ratio: if total == 0 { 0.0 } else { count as f64 / total as f64 },
            })
            .collect();
        DistributionTable { buckets, total }
    }

    pub fn count_of(&self, label: &str) -> u64 {
        self.buckets.iter().find(|b| b.label == label).map_or(0, |b| b.count)
    }

    pub fn ratio_of(&self, label: &str) -> f64 {
        self.buckets.iter().find(|b| b.label == label).map_or(0.0, |b| b.ratio)
    }

    /// Count-sum and ratio-sum identities.
    pub fn is_consistent(&self) -> bool {
        let count_sum: u64 = self.buckets.iter().map(|b| b.count).sum();
        if count_sum != self.total {
            return false;
        }
        if self.total == 0 {
            return true;
        }
        let ratio_sum: f64 = self.buckets.iter().map(|b| b.ratio).sum();
        (ratio_sum - 1.0).abs() <= 0.001
    }
}

#[derive(Debug, Error)]
pub enum ForensicsError {
    #[error("scam address set is empty")]
    EmptyScamSet,
    #[error("transfer {tx_hash} is not inbound to a scam address")]
    NotInbound { tx_hash: String },
    #[error(transparent)]
    Ledger(#[from] crate::chainlens::LedgerError),
    #[error("io error: {0}")]
    Io(String),
}
