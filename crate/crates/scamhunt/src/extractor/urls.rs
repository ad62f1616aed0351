//! Giveaway URL extraction from list descriptions.
//!
//! Descriptions rarely carry a scheme, so bare domains are recognized against
//! a shipped public-suffix snapshot and default to https.

use std::collections::HashSet;
use std::sync::LazyLock;

use regex::Regex;

use super::UrlCandidate;

static SCHEME_URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"(?i)\bhttps?://[^\s<>"']+"#).unwrap());
static BARE_DOMAIN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^[a-z0-9-]+(\.[a-z0-9-]+)+$").unwrap());

/// Snapshot of known public suffixes, loaded from a one-suffix-per-line file.
#[derive(Debug, Clone)]
pub struct PublicSuffixList {
    suffixes: HashSet<String>,
}

impl PublicSuffixList {
    pub fn parse(content: &str) -> Self {
        let suffixes = content
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_ascii_lowercase())
            .collect();
        PublicSuffixList { suffixes }
    }

    /// Built-in snapshot shipped with the crate.
    pub fn shipped() -> Self {
        Self::parse(include_str!("../../data/public_suffixes.tsv"))
    }

    /// True when the host ends in a known public suffix and has at least one
    /// extra label in front of it.
    pub fn is_registrable(&self, host: &str) -> bool {
        let host = host.to_ascii_lowercase();
        let labels: Vec<&str> = host.split('.').collect();
        if labels.len() < 2 || labels.iter().any(|l| l.is_empty()) {
            return false;
        }
        // longest-suffix match, leaving at least one label
        for cut in 1..labels.len() {
            let suffix = labels[cut..].join(".");
            if self.suffixes.contains(&suffix) {
                return true;
            }
        }
        false
    }
}

fn trim_trailing_punct(s: &str) -> &str {
    s.trim_end_matches(|c: char| matches!(c, '.' | ',' | ';' | ':' | '!' | '?' | ')' | '(' | '\'' | '"'))
}

/// Normalize to `scheme://lowercase-host[path]`, dropping query and fragment
/// and a bare trailing slash.
fn normalize(raw: &str) -> Option<(String, String)> {
    let (scheme, rest) = if let Some(rest) = strip_scheme(raw, "https://") {
        ("https", rest)
    } else if let Some(rest) = strip_scheme(raw, "http://") {
        ("http", rest)
    } else {
        ("https", raw)
    };
    let rest = rest.split(['?', '#']).next().unwrap_or("");
    let (host, path) = match rest.find('/') {
        Some(i) => (&rest[..i], &rest[i..]),
        None => (rest, ""),
    };
    if host.is_empty() {
        return None;
    }
    let host = host.to_ascii_lowercase();
    let path = if path == "/" { "" } else { path };
    Some((host.clone(), format!("{scheme}://{host}{path}")))
}

fn strip_scheme<'a>(raw: &'a str, scheme: &str) -> Option<&'a str> {
    if raw.len() >= scheme.len() && raw[..scheme.len()].eq_ignore_ascii_case(scheme) {
        Some(&raw[scheme.len()..])
    } else {
        None
    }
}

/// Extract scheme-qualified URLs and bare registrable domains from a list
/// description, in order of appearance, collapsing duplicates by their
/// normalized form.
pub fn extract_urls(description: &str, psl: &PublicSuffixList) -> Vec<UrlCandidate> {
    // (byte offset, raw text) candidates, scheme URLs first, then bare
    // domains found outside the scheme spans
    let mut found: Vec<(usize, String)> = Vec::new();
    let mut covered: Vec<(usize, usize)> = Vec::new();
    for m in SCHEME_URL.find_iter(description) {
        let raw = trim_trailing_punct(m.as_str());
        if raw.len() > "https://".len() {
            found.push((m.start(), raw.to_string()));
            covered.push((m.start(), m.start() + raw.len()));
        }
    }
    let mut offset = 0;
    for token in description.split(|c: char| c.is_whitespace() || matches!(c, ',' | ';' | '(' | ')' | '<' | '>' | '"' | '\'')) {
        let start = find_from(description, token, &mut offset);
        let trimmed = trim_trailing_punct(token).trim_start_matches(['.', '!', '?', ':']);
        if trimmed.is_empty() || covered.iter().any(|&(s, e)| start >= s && start < e) {
            continue;
        }
        if BARE_DOMAIN.is_match(trimmed) && psl.is_registrable(trimmed) {
            found.push((start, trimmed.to_string()));
        }
    }
    found.sort_by_key(|(start, _)| *start);

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (_, raw) in found {
        let Some((host, normalized)) = normalize(&raw) else {
            continue;
        };
        if !psl.is_registrable(&host) {
            continue;
        }
        if seen.insert(normalized.clone()) {
            out.push(UrlCandidate { raw, normalized, source_list_id: String::new() });
        }
    }
    out
}

fn find_from(haystack: &str, needle: &str, offset: &mut usize) -> usize {
    if needle.is_empty() {
        return *offset;
    }
    match haystack[*offset..].find(needle) {
        Some(pos) => {
            let start = *offset + pos;
            *offset = start + needle.len();
            start
        }
        None => *offset,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psl() -> PublicSuffixList {
        PublicSuffixList::shipped()
    }

    #[test]
    fn bare_domain_defaults_to_https() {
        let urls = extract_urls("giveaway hosted on www.buterinofficial.com today", &psl());
        let normalized: Vec<&str> = urls.iter().map(|u| u.normalized.as_str()).collect();
        assert_eq!(normalized, vec!["https://www.buterinofficial.com"]);
    }

    #[test]
    fn scheme_urls_are_kept() {
        let urls = extract_urls("see https://merge-ethx2.info now", &psl());
        let normalized: Vec<&str> = urls.iter().map(|u| u.normalized.as_str()).collect();
        assert_eq!(normalized, vec!["https://merge-ethx2.info"]);
    }

    #[test]
    fn no_links_yields_empty() {
        assert!(extract_urls("no links here", &psl()).is_empty());
    }

    #[test]
    fn duplicates_collapse_keeping_first() {
        let urls = extract_urls("visit coinx2.org or https://coinx2.org today", &psl());
        assert_eq!(urls.len(), 1);
        assert_eq!(urls[0].raw, "coinx2.org");
    }

    #[test]
    fn order_of_appearance_is_preserved() {
        let urls = extract_urls("first czdrop.com then https://buterin.site ok", &psl());
        let normalized: Vec<&str> = urls.iter().map(|u| u.normalized.as_str()).collect();
        assert_eq!(normalized, vec!["https://czdrop.com", "https://buterin.site"]);
    }

    #[test]
    fn unknown_suffix_is_ignored() {
        assert!(extract_urls("file readme.txt attached", &psl()).is_empty());
        assert!(extract_urls("version 1.5 released", &psl()).is_empty());
    }

    #[test]
    fn trailing_punctuation_is_trimmed() {
        let urls = extract_urls("go to xrpdouble.info! (limited)", &psl());
        assert_eq!(urls[0].normalized, "https://xrpdouble.info");
    }

    #[test]
    fn paths_survive_but_query_is_dropped() {
        let urls = extract_urls("https://czdrop.com/claim?ref=1#top", &psl());
        assert_eq!(urls[0].normalized, "https://czdrop.com/claim");
    }

    #[test]
    fn http_scheme_is_preserved() {
        let urls = extract_urls("old http://justevent.info page", &psl());
        assert_eq!(urls[0].normalized, "http://justevent.info");
    }

    #[test]
    fn host_case_is_folded() {
        let urls = extract_urls("HTTPS://Merge-ETHX2.INFO/Claim", &psl());
        assert_eq!(urls[0].normalized, "https://merge-ethx2.info/Claim");
    }
}
