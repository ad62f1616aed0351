//! Report bundle serialization: CSV tables plus one JSON report with a
//! metadata block.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DistributionTable, ProfitReport, UrlFrequencyRow};

/// Metadata block attached to every report bundle. `generated_at` is the
/// only wall-clock field anywhere in a bundle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportMeta {
    pub corpus_sha256: String,
    pub price_convention: String,
    pub config_echo: serde_json::Value,
    pub generated_at: String,
}

/// Pricing convention label recorded in report metadata: each transfer is
/// valued at its UTC date's daily low and high.
pub const PRICE_CONVENTION: &str = "daily-low-high";

pub fn write_distribution_csv(path: &Path, table: &DistributionTable) -> std::io::Result<()> {
    let mut out = String::from("bucket,count,ratio\n");
    for bucket in &table.buckets {
        out.push_str(&format!("{},{},{:.4}\n", bucket.label, bucket.count, bucket.ratio));
    }
    out.push_str(&format!("TOTAL,{},1.0000\n", table.total));
    std::fs::write(path, out)
}

pub fn write_url_frequency_csv(path: &Path, rows: &[UrlFrequencyRow]) -> std::io::Result<()> {
    let mut out = String::from("url,list_count,categories\n");
    for row in rows {
        let cats: Vec<&str> = row.categories.iter().map(String::as_str).collect();
        out.push_str(&format!("{},{},{}\n", row.url, row.list_count, cats.join("&")));
    }
    std::fs::write(path, out)
}

pub fn write_profit_csv(path: &Path, report: &ProfitReport) -> std::io::Result<()> {
    std::fs::write(path, report.to_csv())
}

/// Address report row: one line per (list, url, address) extraction result.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AddressReportRow {
    pub list_id: String,
    pub url: String,
    pub chain: crate::extractor::Chain,
    pub address: String,
    pub checksum_ok: bool,
}

pub fn write_address_csv(path: &Path, rows: &[AddressReportRow]) -> std::io::Result<()> {
    let mut out = String::from("list_id,url,chain,address,checksum_ok\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.list_id, row.url, row.chain, row.address, row.checksum_ok
        ));
    }
    std::fs::write(path, out)
}

/// Distinct validated addresses in a set of report rows.
pub fn distinct_valid_addresses(rows: &[AddressReportRow]) -> usize {
    rows.iter()
        .filter(|r| r.checksum_ok)
        .map(|r| (r.chain, r.address.as_str()))
        .collect::<BTreeSet<_>>()
        .len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractor::Chain;

    #[test]
    fn distribution_csv_round_trip_shape() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let table = DistributionTable::from_counts(vec![("1".into(), 3), ("2".into(), 1)]);
        write_distribution_csv(&path, &table).unwrap();
        let content = std::fs::read_to_string(&path).unwrap();
        assert!(content.starts_with("bucket,count,ratio\n"));
        assert!(content.contains("1,3,0.7500"));
        assert!(content.trim_end().ends_with("TOTAL,4,1.0000"));
    }

    #[test]
    fn distinct_address_counting_ignores_failures_and_duplicates() {
        let rows = vec![
            AddressReportRow {
                list_id: "a".into(),
                url: "u".into(),
                chain: Chain::Eth,
                address: "0xA".into(),
                checksum_ok: true,
            },
            AddressReportRow {
                list_id: "b".into(),
                url: "u".into(),
                chain: Chain::Eth,
                address: "0xA".into(),
                checksum_ok: true,
            },
            AddressReportRow {
                list_id: "a".into(),
                url: "u".into(),
                chain: Chain::Btc,
                address: "1bad".into(),
                checksum_ok: false,
            },
        ];
        assert_eq!(distinct_valid_addresses(&rows), 1);
    }
}
