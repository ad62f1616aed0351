//! Daily low/high USD price series and per-transfer valuation.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use bigdecimal::rounding::RoundingMode;
use bigdecimal::BigDecimal;
use chrono::NaiveDate;

use crate::extractor::Chain;

use super::{LedgerError, Transfer};

/// Fallback window for transfers whose exact date has no price row.
/// Off by default; enabled by the `--nearest-day` flag.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum NearestDay {
    #[default]
    Off,
    /// Substitute the closest covered date within this many days.
    Within(u32),
}

/// Per (chain, UTC date) daily low and high USD price per native unit.
#[derive(Debug, Clone, Default)]
pub struct PriceSeries {
    entries: BTreeMap<(Chain, NaiveDate), (BigDecimal, BigDecimal)>,
}

impl PriceSeries {
    /// Load from CSV with a `chain,date,low_usd,high_usd` header.
    pub fn load_csv(path: &Path) -> Result<Self, LedgerError> {
        let content = std::fs::read_to_string(path).map_err(|e| LedgerError::Io(e.to_string()))?;
        Self::parse_csv(&content)
    }

    pub fn parse_csv(content: &str) -> Result<Self, LedgerError> {
        let mut reader = csv::Reader::from_reader(content.as_bytes());
        let mut series = PriceSeries::default();
        for (i, row) in reader.records().enumerate() {
            let line = i + 2; // header is line 1
            let row = row.map_err(|e| LedgerError::BadPrice { line, message: e.to_string() })?;
            if row.len() != 4 {
                return Err(LedgerError::BadPrice {
                    line,
                    message: format!("expected 4 columns, got {}", row.len()),
                });
            }
            let chain = Chain::from_str(&row[0])
                .map_err(|e| LedgerError::BadPrice { line, message: e })?;
            let date = NaiveDate::parse_from_str(&row[1], "%Y-%m-%d")
                .map_err(|e| LedgerError::BadPrice { line, message: e.to_string() })?;
            let low = BigDecimal::from_str(&row[2])
                .map_err(|e| LedgerError::BadPrice { line, message: e.to_string() })?;
            let high = BigDecimal::from_str(&row[3])
                .map_err(|e| LedgerError::BadPrice { line, message: e.to_string() })?;
            series.insert(chain, date, low, high).map_err(|message| LedgerError::BadPrice {
                line,
                message,
            })?;
        }
        Ok(series)
    }

    pub fn insert(
        &mut self,
        chain: Chain,
        date: NaiveDate,
        low: BigDecimal,
        high: BigDecimal,
    ) -> Result<(), String> {
        if low <= BigDecimal::from(0) {
            return Err(format!("low price must be positive, got {low}"));
        }
        if high < low {
            return Err(format!("high {high} below low {low}"));
        }
        self.entries.insert((chain, date), (low, high));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, chain: Chain, date: NaiveDate) -> Option<&(BigDecimal, BigDecimal)> {
        self.entries.get(&(chain, date))
    }

    /// Exact-date lookup, optionally falling back to the nearest covered
    /// date within the window (smaller delta wins; earlier date on ties).
    pub fn lookup(
        &self,
        chain: Chain,
        date: NaiveDate,
        nearest: NearestDay,
    ) -> Option<&(BigDecimal, BigDecimal)> {
        if let Some(prices) = self.get(chain, date) {
            return Some(prices);
        }
        let NearestDay::Within(window) = nearest else {
            return None;
        };
        for delta in 1..=window as i64 {
            for candidate in [date - chrono::Duration::days(delta), date + chrono::Duration::days(delta)] {
                if let Some(prices) = self.get(chain, candidate) {
                    return Some(prices);
                }
            }
        }
        None
    }
}

/// Value one transfer at its date's daily low and high, exact decimal
/// multiplication reported to cent precision.
pub fn usd_range(
    transfer: &Transfer,
    prices: &PriceSeries,
    nearest: NearestDay,
) -> Result<(BigDecimal, BigDecimal), LedgerError> {
    transfer.validate()?;
    let date = transfer.date();
    let (low, high) = prices
        .lookup(transfer.chain, date, nearest)
        .ok_or_else(|| LedgerError::MissingPrice { dates: vec![(transfer.chain, date)] })?;
    let min = (&transfer.amount * low).with_scale_round(2, RoundingMode::HalfUp);
    let max = (&transfer.amount * high).with_scale_round(2, RoundingMode::HalfUp);
    Ok((min, max))
}
