//! Exact conversion between native coin amounts and chain base units
//! (satoshi, wei, lovelace, drops). No floating point anywhere.

use bigdecimal::num_bigint::BigInt;
use bigdecimal::BigDecimal;

use crate::extractor::Chain;

use super::LedgerError;

/// Native amount to integer base units. Errors if the amount carries more
/// precision than the chain's base unit can represent.
pub fn native_to_base(chain: Chain, amount: &BigDecimal) -> Result<BigInt, LedgerError> {
    let decimals = chain.base_unit_decimals() as i64;
    let (digits, exponent) = amount.as_bigint_and_exponent(); // value = digits * 10^-exponent
    let shift = decimals - exponent;
    if shift >= 0 {
        Ok(digits * BigInt::from(10u8).pow(shift as u32))
    } else {
        let divisor = BigInt::from(10u8).pow((-shift) as u32);
        let (quotient, remainder) = num_div_rem(&digits, &divisor);
        if remainder == BigInt::from(0) {
            Ok(quotient)
        } else {
            Err(LedgerError::SubBaseUnit { chain, amount: amount.to_string() })
        }
    }
}

fn num_div_rem(a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    (a / b, a % b)
}

/// Integer base units back to a native-unit decimal.
pub fn base_to_native(chain: Chain, base: &BigInt) -> BigDecimal {
    BigDecimal::new(base.clone(), chain.base_unit_decimals() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    #[test]
    fn one_eth_is_ten_to_the_eighteen_wei() {
        let wei = native_to_base(Chain::Eth, &BigDecimal::from_str("1").unwrap()).unwrap();
        assert_eq!(wei.to_string(), "1000000000000000000");
    }

    #[test]
    fn satoshi_round_trip() {
        let amount = BigDecimal::from_str("5.39958").unwrap();
        let sats = native_to_base(Chain::Btc, &amount).unwrap();
        assert_eq!(sats.to_string(), "539958000");
        assert_eq!(base_to_native(Chain::Btc, &sats), amount);
    }

    #[test]
    fn sub_base_precision_is_an_error() {
        // 9 decimal places cannot be represented in satoshi
        let amount = BigDecimal::from_str("0.000000001").unwrap();
        assert!(native_to_base(Chain::Btc, &amount).is_err());
        // but it is fine in wei
        assert!(native_to_base(Chain::Eth, &amount).is_ok());
    }

    #[test]
    fn trailing_zero_scale_does_not_error() {
        // 1.230000000 BTC has exponent 9 but is exactly representable
        let amount = BigDecimal::from_str("1.230000000").unwrap();
        let sats = native_to_base(Chain::Btc, &amount).unwrap();
        assert_eq!(sats.to_string(), "123000000");
    }

    #[test]
    fn round_trip_is_exact_for_many_random_amounts() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20_000 {
            let chain = Chain::ALL[rng.random_range(0..Chain::ALL.len())];
            let base = BigInt::from(rng.random_range(1u64..u64::MAX));
            let native = base_to_native(chain, &base);
            assert_eq!(native_to_base(chain, &native).unwrap(), base);
        }
    }
}
