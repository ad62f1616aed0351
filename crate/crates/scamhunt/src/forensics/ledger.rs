//! Internal-transfer filtering, per-chain victim statistics, and the profit
//! report with grand totals.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use bigdecimal::rounding::RoundingMode;
use bigdecimal::BigDecimal;

use crate::chainlens::{usd_range, LedgerError, NearestDay, PriceSeries, Transfer};
use crate::extractor::{Chain, ChainAddress};

use super::{ForensicsError, VictimStats};

/// Outcome of splitting raw transfers against the scam address set.
#[derive(Debug, Clone, Default)]
pub struct TransferPartition {
    /// Inbound from a non-scam sender: the victim candidates.
    pub victim: Vec<Transfer>,
    /// Both endpoints are scam addresses; excluded from loss estimates.
    pub internal: Vec<Transfer>,
    /// Outbound to non-scam destinations; not part of either analysis.
    pub ignored_outbound: Vec<Transfer>,
}

/// Split transfers into victim inflows, scam-to-scam internals, and ignored
/// outbound spends. The three parts partition the input.
pub fn filter_internal(
    transfers: &[Transfer],
    scam_set: &HashSet<ChainAddress>,
) -> Result<TransferPartition, ForensicsError> {
    if scam_set.is_empty() {
        return Err(ForensicsError::EmptyScamSet);
    }
    let scam_keys: HashSet<(Chain, &str)> =
        scam_set.iter().map(|a| (a.chain, a.text.as_str())).collect();
    let mut partition = TransferPartition::default();
    for transfer in transfers {
        let from_is_scam = scam_keys.contains(&(transfer.chain, transfer.from_addr.as_str()));
        let to_is_scam = scam_keys.contains(&(transfer.chain, transfer.to_addr.as_str()));
        match (from_is_scam, to_is_scam) {
            (true, true) => partition.internal.push(transfer.clone()),
            (false, true) => partition.victim.push(transfer.clone()),
            _ => partition.ignored_outbound.push(transfer.clone()),
        }
    }
    Ok(partition)
}

/// Per-chain victim aggregates: transfer counts, distinct sender counts,
/// exact native totals, and summed min/max USD values. Chains that only
/// appear in the internal set still get a row with zero victim figures.
pub fn victim_stats(
    victim_transfers: &[Transfer],
    internal_transfers: &[Transfer],
    scam_addresses: &[ChainAddress],
    prices: &PriceSeries,
    nearest: NearestDay,
) -> Result<BTreeMap<Chain, VictimStats>, ForensicsError> {
    let mut stats: BTreeMap<Chain, VictimStats> = BTreeMap::new();
    let mut senders: BTreeMap<Chain, BTreeSet<String>> = BTreeMap::new();
    let mut missing: Vec<(Chain, chrono::NaiveDate)> = Vec::new();

    for address in scam_addresses {
        stats
            .entry(address.chain)
            .or_insert_with(|| VictimStats::zero(address.chain))
            .scam_address_count += 1;
    }

    for transfer in victim_transfers {
        let entry = stats
            .entry(transfer.chain)
            .or_insert_with(|| VictimStats::zero(transfer.chain));
        entry.victim_tx_count += 1;
        entry.total_amount += &transfer.amount;
        senders.entry(transfer.chain).or_default().insert(transfer.from_addr.clone());
        match usd_range(transfer, prices, nearest) {
            Ok((min, max)) => {
                entry.usd_min += min;
                entry.usd_max += max;
            }
            Err(LedgerError::MissingPrice { dates }) => missing.extend(dates),
            Err(other) => return Err(other.into()),
        }
    }
    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(LedgerError::MissingPrice { dates: missing }.into());
    }

    for transfer in internal_transfers {
        stats
            .entry(transfer.chain)
            .or_insert_with(|| VictimStats::zero(transfer.chain))
            .internal_tx_count += 1;
    }
    for (chain, sender_set) in senders {
        if let Some(entry) = stats.get_mut(&chain) {
            entry.victim_address_count = sender_set.len() as u64;
        }
    }
    Ok(stats)
}

/// The final per-chain table plus exact grand totals (summed before the
/// single presentation rounding).
#[derive(Debug, Clone, PartialEq)]
pub struct ProfitReport {
    pub rows: Vec<VictimStats>,
    pub grand_usd_min: BigDecimal,
    pub grand_usd_max: BigDecimal,
}

/// Format a USD amount as thousands with one decimal, e.g. `413.1K`.
pub fn format_thousands(usd: &BigDecimal) -> String {
    let thousands = usd / BigDecimal::from(1000);
    format!("{}K", thousands.with_scale_round(1, RoundingMode::HalfUp))
}

pub fn profit_report(stats: &BTreeMap<Chain, VictimStats>) -> ProfitReport {
    let rows: Vec<VictimStats> = stats.values().cloned().collect();
    let grand_usd_min = rows.iter().fold(BigDecimal::from(0), |acc, r| acc + &r.usd_min);
    let grand_usd_max = rows.iter().fold(BigDecimal::from(0), |acc, r| acc + &r.usd_max);
    ProfitReport { rows, grand_usd_min, grand_usd_max }
}

impl ProfitReport {
    /// CSV rendering with one row per chain and a trailing totals row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "chain,scam_addresses,internal_txs,victim_txs,victim_addresses,total_amount,usd_min,usd_max,usd_min_k,usd_max_k\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                row.chain,
                row.scam_address_count,
                row.internal_tx_count,
                row.victim_tx_count,
                row.victim_address_count,
                row.total_amount,
                row.usd_min.with_scale(2),
                row.usd_max.with_scale(2),
                format_thousands(&row.usd_min),
                format_thousands(&row.usd_max),
            ));
        }
        out.push_str(&format!(
            "TOTAL,{},{},{},{},,{},{},{},{}\n",
            self.rows.iter().map(|r| r.scam_address_count).sum::<u64>(),
            self.rows.iter().map(|r| r.internal_tx_count).sum::<u64>(),
            self.rows.iter().map(|r| r.victim_tx_count).sum::<u64>(),
            self.rows.iter().map(|r| r.victim_address_count).sum::<u64>(),
            self.grand_usd_min.with_scale(2),
            self.grand_usd_max.with_scale(2),
            format_thousands(&self.grand_usd_min),
            format_thousands(&self.grand_usd_max),
        ));
        out
    }
}
