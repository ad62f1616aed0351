use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Blockchains with a shipped address grammar and checksum routine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chain {
    #[serde(rename = "BTC")]
    Btc,
    #[serde(rename = "ETH")]
    Eth,
    #[serde(rename = "BNB")]
    Bnb,
    #[serde(rename = "ADA")]
    Ada,
    #[serde(rename = "XRP")]
    Xrp,
}

impl Chain {
    pub const ALL: [Chain; 5] = [Chain::Btc, Chain::Eth, Chain::Bnb, Chain::Ada, Chain::Xrp];

    pub fn ticker(self) -> &'static str {
        match self {
            Chain::Btc => "BTC",
            Chain::Eth => "ETH",
            Chain::Bnb => "BNB",
            Chain::Ada => "ADA",
            Chain::Xrp => "XRP",
        }
    }

    /// Decimal places between the base unit (satoshi, wei, lovelace, drop)
    /// and one native coin.
    pub fn base_unit_decimals(self) -> u32 {
        match self {
            Chain::Btc => 8,
            Chain::Eth | Chain::Bnb => 18,
            Chain::Ada => 6,
            Chain::Xrp => 6,
        }
    }

    /// True for chains that share the 0x hex address format.
    pub fn is_evm(self) -> bool {
        matches!(self, Chain::Eth | Chain::Bnb)
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ticker())
    }
}

impl FromStr for Chain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "BTC" => Ok(Chain::Btc),
            "ETH" => Ok(Chain::Eth),
            "BNB" => Ok(Chain::Bnb),
            "ADA" => Ok(Chain::Ada),
            "XRP" => Ok(Chain::Xrp),
            other => Err(format!("unknown chain: {other}")),
        }
    }
}
