//! Address candidate scanning over fetched page bodies.

use std::sync::LazyLock;

use regex::Regex;

use super::chain::Chain;

// Grammars are anchored over whole alphanumeric tokens, so an address-shaped
// substring inside a longer token never matches.
static BTC_LEGACY: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[13][1-9A-HJ-NP-Za-km-z]{25,34}$").unwrap());
static BTC_SEGWIT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^bc1[qpzry9x8gf2tvdw0s3jn54khce6mua7l]{11,71}$").unwrap());
static EVM_HEX: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^0x[0-9a-fA-F]{40}$").unwrap());
static ADA_BECH32: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^addr1[qpzry9x8gf2tvdw0s3jn54khce6mua7l]{50,108}$").unwrap());
static XRP_B58: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^r[rpshnaf39wBUDNEGHJKLM4PQRST7VWXYZ2bcdeCg65jkm8oFqi1tuvAxyz]{24,34}$").unwrap()
});

fn classify_token(token: &str) -> Option<Chain> {
    // prefixes are mutually exclusive across the five grammars
    match token.as_bytes().first()? {
        b'1' | b'3' if BTC_LEGACY.is_match(token) => Some(Chain::Btc),
        b'b' if BTC_SEGWIT.is_match(token) => Some(Chain::Btc),
        b'0' if EVM_HEX.is_match(token) => Some(Chain::Eth),
        b'a' if ADA_BECH32.is_match(token) => Some(Chain::Ada),
        b'r' if XRP_B58.is_match(token) => Some(Chain::Xrp),
        _ => None,
    }
}

/// Scan a page body for per-chain address candidates.
///
/// The body is decoded as UTF-8 with lossy replacement and split into maximal
/// ASCII-alphanumeric tokens; each whole token is tested against the chain
/// grammars. EVM hits are reported as ETH pending page-context disambiguation.
pub fn scan_addresses(body: &[u8]) -> Vec<(Chain, String)> {
    let text = String::from_utf8_lossy(body);
    let mut out = Vec::new();
    let mut token_start: Option<usize> = None;
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b.is_ascii_alphanumeric() {
            if token_start.is_none() {
                token_start = Some(i);
            }
        } else if let Some(start) = token_start.take() {
            if let Some(chain) = classify_token(&text[start..i]) {
                out.push((chain, text[start..i].to_string()));
            }
        }
    }
    if let Some(start) = token_start {
        if let Some(chain) = classify_token(&text[start..]) {
            out.push((chain, text[start..].to_string()));
        }
    }
    out
}
