//! List-corpus analytics: cryptocurrency categories, creation timelines,
//! creator/member/follower distributions, URL frequency, and member reach.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::corpus::ListRecord;

use super::DistributionTable;

/// Case-insensitive alias table mapping surface names to asset tags.
#[derive(Debug, Clone)]
pub struct AliasTable {
    aliases: BTreeMap<String, String>,
}

impl AliasTable {
    pub fn parse(content: &str) -> Self {
        let aliases = content
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .filter_map(|l| l.split_once('\t'))
            .map(|(alias, tag)| (alias.trim().to_lowercase(), tag.trim().to_string()))
            .collect();
        AliasTable { aliases }
    }

    pub fn shipped() -> Self {
        Self::parse(include_str!("../../data/crypto_aliases.tsv"))
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn tag_of(&self, word: &str) -> Option<&str> {
        self.aliases.get(&word.to_lowercase()).map(String::as_str)
    }
}

/// Asset tags named in a list title, via word-level alias matching.
pub fn crypto_category(title: &str, aliases: &AliasTable) -> BTreeSet<String> {
    title
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .filter_map(|w| aliases.tag_of(w))
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Year,
    Month,
}

/// Bucket list creation times by UTC calendar year or month; empty buckets
/// between the first and last are emitted with zero counts.
pub fn timeline_histogram(lists: &[ListRecord], granularity: Granularity) -> DistributionTable {
    if lists.is_empty() {
        return DistributionTable::from_counts(Vec::new());
    }
    let mut counts: BTreeMap<(i32, u32), u64> = BTreeMap::new();
    for list in lists {
        let key = match granularity {
            Granularity::Year => (list.created_at.year(), 0),
            Granularity::Month => (list.created_at.year(), list.created_at.month()),
        };
        *counts.entry(key).or_insert(0) += 1;
    }
    let (&first, &last) = (
        counts.keys().next().unwrap(),
        counts.keys().next_back().unwrap(),
    );
    let mut filled: Vec<(String, u64)> = Vec::new();
    let mut cursor = first;
    loop {
        let label = match granularity {
            Granularity::Year => format!("{}", cursor.0),
            Granularity::Month => format!("{}-{:02}", cursor.0, cursor.1),
        };
        filled.push((label, counts.get(&cursor).copied().unwrap_or(0)));
        if cursor == last {
            break;
        }
        cursor = match granularity {
            Granularity::Year => (cursor.0 + 1, 0),
            Granularity::Month => {
                if cursor.1 == 12 {
                    (cursor.0 + 1, 1)
                } else {
                    (cursor.0, cursor.1 + 1)
                }
            }
        };
    }
    DistributionTable::from_counts(filled)
}

/// Distribution of creator accounts by how many of these lists they created:
/// exactly one, exactly two, or more than two.
pub fn creator_distribution(scam_lists: &[ListRecord]) -> DistributionTable {
    let mut per_creator: BTreeMap<&str, u64> = BTreeMap::new();
    for list in scam_lists {
        *per_creator.entry(list.creator_id.as_str()).or_insert(0) += 1;
    }
    let mut one = 0;
    let mut two = 0;
    let mut more = 0;
    for &n in per_creator.values() {
        match n {
            1 => one += 1,
            2 => two += 1,
            _ => more += 1,
        }
    }
    DistributionTable::from_counts(vec![
        ("1".into(), one),
        ("2".into(), two),
        (">2".into(), more),
    ])
}

/// Member-count and follower-count distributions over scam lists.
/// Member boundaries: `0-50` means at most 50, `50-100` means 51 to 100.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipTables {
    pub members: DistributionTable,
    pub followers: DistributionTable,
}

pub fn membership_distribution(scam_lists: &[ListRecord]) -> MembershipTables {
    let mut m = [0u64; 3];
    let mut f = [0u64; 5];
    for list in scam_lists {
        match list.member_ids.len() {
            0..=50 => m[0] += 1,
            51..=100 => m[1] += 1,
            _ => m[2] += 1,
        }
        match list.follower_count {
            0 => f[0] += 1,
            1 => f[1] += 1,
            2 => f[2] += 1,
            3 => f[3] += 1,
            _ => f[4] += 1,
        }
    }
    MembershipTables {
        members: DistributionTable::from_counts(vec![
            ("0-50".into(), m[0]),
            ("50-100".into(), m[1]),
            (">100".into(), m[2]),
        ]),
        followers: DistributionTable::from_counts(vec![
            ("0".into(), f[0]),
            ("1".into(), f[1]),
            ("2".into(), f[2]),
            ("3".into(), f[3]),
            (">3".into(), f[4]),
        ]),
    }
}

/// One ranked row of the URL frequency table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrlFrequencyRow {
    pub url: String,
    pub list_count: u64,
    pub categories: BTreeSet<String>,
}

/// Count distinct lists per normalized URL (descending, then by URL), and
/// attach the asset categories of the owning lists' titles.
pub fn url_frequency(
    list_urls: &[(String, String)],
    lists: &[ListRecord],
    aliases: &AliasTable,
) -> Vec<UrlFrequencyRow> {
    let titles: BTreeMap<&str, &str> =
        lists.iter().map(|l| (l.list_id.as_str(), l.title.as_str())).collect();
    let mut per_url: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (list_id, url) in list_urls {
        per_url.entry(url.as_str()).or_default().insert(list_id.as_str());
    }
    let mut rows: Vec<UrlFrequencyRow> = per_url
        .into_iter()
        .map(|(url, list_ids)| {
            let mut categories = BTreeSet::new();
            for id in &list_ids {
                if let Some(title) = titles.get(id) {
                    categories.extend(crypto_category(title, aliases));
                }
            }
            UrlFrequencyRow { url: url.to_string(), list_count: list_ids.len() as u64, categories }
        })
        .collect();
    rows.sort_by(|a, b| b.list_count.cmp(&a.list_count).then_with(|| a.url.cmp(&b.url)));
    rows
}

/// Cardinality of the union of member ids across the given lists.
pub fn unique_member_reach(scam_lists: &[ListRecord]) -> u64 {
    let mut members: HashSet<&str> = HashSet::new();
    for list in scam_lists {
        members.extend(list.member_ids.iter().map(String::as_str));
    }
    members.len() as u64
}

/// Totals row for the detection overview table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverviewRow {
    pub total: u64,
    pub scam: u64,
    pub ratio: f64,
}

pub fn scam_overview(total: u64, scam: u64) -> OverviewRow {
    OverviewRow { total, scam, ratio: if total == 0 { 0.0 } else { scam as f64 / total as f64 } }
}
