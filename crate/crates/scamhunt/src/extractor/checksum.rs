//! Per-chain address checksum verification.
//!
//! Candidates arriving here already matched a chain grammar; this layer
//! decides whether the checksum embedded in the encoding holds, so that raw
//! regex hits scraped out of arbitrary HTML do not pollute the ledger stage.

use sha2::{Digest, Sha256};
use sha3::Keccak256;

use super::chain::Chain;
use super::ChainAddress;

/// Bitcoin base58 alphabet.
pub const BTC_ALPHABET: &[u8; 58] =
    b"123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";
/// Ripple base58 alphabet (same 58 symbols, permuted).
pub const XRP_ALPHABET: &[u8; 58] =
    b"rpshnaf39wBUDNEGHJKLM4PQRST7VWXYZ2bcdeCg65jkm8oFqi1tuvAxyz";
/// Bech32 data charset.
pub const BECH32_CHARSET: &[u8; 32] = b"qpzry9x8gf2tvdw0s3jn54khce6mua7l";

const BECH32_CONST: u32 = 1;
const BECH32M_CONST: u32 = 0x2bc8_30a3;

fn sha256d(data: &[u8]) -> [u8; 32] {
    let first = Sha256::digest(data);
    let second = Sha256::digest(first);
    second.into()
}

/// Decode a base58 string into bytes with the given alphabet.
/// Leading `alphabet[0]` characters map to leading zero bytes.
pub fn base58_decode(s: &str, alphabet: &[u8; 58]) -> Option<Vec<u8>> {
    let mut digits: Vec<u8> = Vec::with_capacity(s.len());
    for byte in s.bytes() {
        let value = alphabet.iter().position(|&c| c == byte)?;
        digits.push(value as u8);
    }
    // big-number accumulation in base 256
    let mut bytes: Vec<u8> = Vec::new();
    for &digit in &digits {
        let mut carry = digit as u32;
        for b in bytes.iter_mut().rev() {
            let v = (*b as u32) * 58 + carry;
            *b = (v & 0xff) as u8;
            carry = v >> 8;
        }
        while carry > 0 {
            bytes.insert(0, (carry & 0xff) as u8);
            carry >>= 8;
        }
    }
    let leading_zeros = s.bytes().take_while(|&b| b == alphabet[0]).count();
    let mut out = vec![0u8; leading_zeros];
    out.extend_from_slice(&bytes);
    Some(out)
}

/// Base58Check: the trailing 4 bytes must equal the first 4 bytes of
/// SHA-256(SHA-256(version + payload)).
pub fn base58check_verify(s: &str, alphabet: &[u8; 58]) -> bool {
    let raw = match base58_decode(s, alphabet) {
        Some(raw) => raw,
        None => return false,
    };
    if raw.len() < 5 {
        return false;
    }
    let (payload, checksum) = raw.split_at(raw.len() - 4);
    sha256d(payload)[..4] == *checksum
}

fn bech32_polymod(values: &[u8]) -> u32 {
    const GEN: [u32; 5] = [0x3b6a_57b2, 0x2650_8e6d, 0x1ea1_19fa, 0x3d42_33dd, 0x2a14_62b3];
    let mut chk: u32 = 1;
    for &v in values {
        let top = chk >> 25;
        chk = ((chk & 0x01ff_ffff) << 5) ^ (v as u32);
        for (i, g) in GEN.iter().enumerate() {
            if (top >> i) & 1 == 1 {
                chk ^= g;
            }
        }
    }
    chk
}

fn bech32_hrp_expand(hrp: &str) -> Vec<u8> {
    let mut out: Vec<u8> = hrp.bytes().map(|b| b >> 5).collect();
    out.push(0);
    out.extend(hrp.bytes().map(|b| b & 31));
    out
}

/// Verify the Bech32 polynomial over `hrp1data`, accepting either the
/// Bech32 or the Bech32m residue constant. No length cap is enforced;
/// Cardano addresses exceed the 90-character segwit limit.
pub fn bech32_verify(s: &str) -> bool {
    let Some(sep) = s.rfind('1') else {
        return false;
    };
    let (hrp, data_part) = (&s[..sep], &s[sep + 1..]);
    if hrp.is_empty() || data_part.len() < 6 {
        return false;
    }
    let mut values = bech32_hrp_expand(hrp);
    for byte in data_part.bytes() {
        let Some(v) = BECH32_CHARSET.iter().position(|&c| c == byte) else {
            return false;
        };
        values.push(v as u8);
    }
    let residue = bech32_polymod(&values);
    residue == BECH32_CONST || residue == BECH32M_CONST
}

/// EIP-55 canonical form of a 40-char lowercase hex address body (no 0x).
pub fn eip55_canonical(lower_hex: &str) -> String {
    let hash = Keccak256::digest(lower_hex.as_bytes());
    let mut out = String::with_capacity(42);
    out.push_str("0x");
    for (i, c) in lower_hex.chars().enumerate() {
        let nibble = (hash[i / 2] >> (4 * (1 - i % 2))) & 0x0f;
        if c.is_ascii_alphabetic() && nibble >= 8 {
            out.push(c.to_ascii_uppercase());
        } else {
            out.push(c);
        }
    }
    out
}

/// EVM address check: all-lowercase or all-uppercase hex carries no checksum
/// and is accepted; mixed case must match the EIP-55 capitalization.
pub fn evm_checksum_ok(addr: &str) -> bool {
    let body = match addr.strip_prefix("0x") {
        Some(body) if body.len() == 40 => body,
        _ => return false,
    };
    if !body.bytes().all(|b| b.is_ascii_hexdigit()) {
        return false;
    }
    let letters: Vec<u8> = body.bytes().filter(|b| b.is_ascii_alphabetic()).collect();
    if letters.iter().all(|b| b.is_ascii_lowercase())
        || letters.iter().all(|b| b.is_ascii_uppercase())
    {
        return true;
    }
    eip55_canonical(&body.to_ascii_lowercase()) == format!("0x{body}")
}

/// Verify the chain-specific checksum of a grammar-matched candidate.
///
/// Failures are retained with `checksum_ok = false` so regex-only counts stay
/// available in diagnostics; downstream forensics only consumes valid ones.
/// The address text is kept verbatim except for EVM addresses, which are
/// canonicalized to their EIP-55 form when valid.
pub fn validate_address(candidate: &str, chain: Chain) -> ChainAddress {
    let (ok, text) = match chain {
        Chain::Btc => {
            if candidate.starts_with("bc1") {
                (bech32_verify(candidate), candidate.to_string())
            } else {
                (base58check_verify(candidate, BTC_ALPHABET), candidate.to_string())
            }
        }
        Chain::Xrp => (base58check_verify(candidate, XRP_ALPHABET), candidate.to_string()),
        Chain::Ada => (bech32_verify(candidate), candidate.to_string()),
        Chain::Eth | Chain::Bnb => {
            let ok = evm_checksum_ok(candidate);
            let text = if ok {
                eip55_canonical(&candidate[2..].to_ascii_lowercase())
            } else {
                candidate.to_string()
            };
            (ok, text)
        }
    };
    ChainAddress { chain, text, checksum_ok: ok }
}

#[cfg(test)]
mod tests {
    use super::*;

    // constants below were produced/verified with an out-of-band
    // base58check / bech32 / keccak oracle before this module was written
    const BTC_SAMPLE: &str = "13i79MkvCijL6MqjHL1ojyqmDREKHiYdbk";
    const BTC_BURN: &str = "1111111111111111111114oLvT2";
    const BTC_P2SH: &str = "37BXqJVc7MEXfhy8C7kd5FxEvW9AFwkq56";
    const ETH_SAMPLE: &str = "0xc4BE4a14d4E61b2DA5dd7eE64cbA8E85766dFD3d";
    const XRP_GENESIS: &str = "rHb9CJAWyB4rj91VRWn96DkukG4bwdtyTh";
    const XRP_ZERO: &str = "rrrrrrrrrrrrrrrrrrrrrhoLvTp";
    const BC1_V0: &str = "bc1qw508d6qejxtdg4y5r3zarvary0c5xw7kv8f3t4";
    const BC1_V1: &str = "bc1p0xlxvlhemja6c4dqv22uapctqupfhlxm9h8z3k2e72q4k9hcz7vqzk5jj0";
    const ADA_SAMPLE: &str = "addr1qyqsyqcyq5rqwzqfpg9scrgwpugpzysnzs23v9ccrydpk8r9venks6t2ddkx6mn0wpchyum5w4m8w7re0fahclt707qqlr2pjq";

    #[test]
    fn btc_base58check_accepts_known_valid() {
        for addr in [BTC_SAMPLE, BTC_BURN, BTC_P2SH] {
            assert!(validate_address(addr, Chain::Btc).checksum_ok, "{addr}");
        }
    }

    #[test]
    fn btc_base58check_rejects_flip() {
        // flip one mid-string character of a valid address
        let mut s: Vec<u8> = BTC_SAMPLE.bytes().collect();
        s[10] = if s[10] == b'k' { b'm' } else { b'k' };
        let flipped = String::from_utf8(s).unwrap();
        assert!(!validate_address(&flipped, Chain::Btc).checksum_ok);
    }

    #[test]
    fn bech32_accepts_v0_and_v1() {
        assert!(validate_address(BC1_V0, Chain::Btc).checksum_ok);
        assert!(validate_address(BC1_V1, Chain::Btc).checksum_ok);
    }

    #[test]
    fn bech32_rejects_flip() {
        let mut s: Vec<u8> = BC1_V0.bytes().collect();
        let last = s.len() - 1;
        s[last] = if s[last] == b'4' { b'5' } else { b'4' };
        let flipped = String::from_utf8(s).unwrap();
        assert!(!validate_address(&flipped, Chain::Btc).checksum_ok);
    }

    #[test]
    fn ada_bech32_accepts_sample() {
        assert!(validate_address(ADA_SAMPLE, Chain::Ada).checksum_ok);
    }

    #[test]
    fn xrp_accepts_known_valid() {
        assert!(validate_address(XRP_GENESIS, Chain::Xrp).checksum_ok);
        assert!(validate_address(XRP_ZERO, Chain::Xrp).checksum_ok);
    }

    #[test]
    fn evm_mixed_case_must_satisfy_eip55() {
        assert!(validate_address(ETH_SAMPLE, Chain::Eth).checksum_ok);
        // break one capital
        let broken = ETH_SAMPLE.replace("c4BE", "c4Be");
        assert!(!validate_address(&broken, Chain::Eth).checksum_ok);
    }

    #[test]
    fn evm_single_case_accepted_and_canonicalized() {
        let lower = ETH_SAMPLE.to_ascii_lowercase();
        let validated = validate_address(&lower, Chain::Eth);
        assert!(validated.checksum_ok);
        assert_eq!(validated.text, ETH_SAMPLE);

        let upper = format!("0x{}", ETH_SAMPLE[2..].to_ascii_uppercase());
        let validated = validate_address(&upper, Chain::Eth);
        assert!(validated.checksum_ok);
        assert_eq!(validated.text, ETH_SAMPLE);
    }

    #[test]
    fn canonicalization_preserves_lowercase_projection() {
        let validated = validate_address(&ETH_SAMPLE.to_ascii_lowercase(), Chain::Eth);
        assert_eq!(validated.text.to_ascii_lowercase(), ETH_SAMPLE.to_ascii_lowercase());
    }

    #[test]
    fn failed_candidates_are_retained_not_dropped() {
        let bogus = "1BoGus1111111111111111111111111";
        let validated = validate_address(bogus, Chain::Btc);
        assert!(!validated.checksum_ok);
        assert_eq!(validated.text, bogus);
    }

    #[test]
    fn base58_decode_rejects_foreign_characters() {
        assert!(base58_decode("0OIl", BTC_ALPHABET).is_none());
    }
}
