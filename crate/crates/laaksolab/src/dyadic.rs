//! Exact dyadic rational arithmetic.
//!
//! Every distance this crate stores is a dyadic rational: graph metrics are
//! integer valued and the sup-norm point sets only ever halve coordinates.
//! Keeping them exact (64-bit numerator over a power of two) makes symmetry
//! and triangle-inequality verification decidable instead of tolerance-based,
//! and dyadic values print as finite decimals, which is what the CSV metric
//! format relies on.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `num / 2^exp`, normalized so that `exp == 0` or `num` is odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i64,
    exp: u32,
}

pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

impl Dyadic {
    pub fn new(num: i64, exp: u32) -> Dyadic {
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    pub fn from_int(n: i64) -> Dyadic {
        Dyadic { num: n, exp: 0 }
    }

    fn normalize(&mut self) {
        if self.num == 0 {
            self.exp = 0;
            return;
        }
        while self.exp > 0 && self.num % 2 == 0 {
            self.num /= 2;
            self.exp -= 1;
        }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn abs(self) -> Dyadic {
        Dyadic {
            num: self.num.checked_abs().expect("dyadic overflow in abs"),
            exp: self.exp,
        }
    }

    /// Exact halving; exponent growth is bounded by the recursion depths we build.
    pub fn half(self) -> Dyadic {
        if self.num == 0 {
            return ZERO;
        }
        Dyadic::new(self.num, self.exp.checked_add(1).expect("dyadic exponent overflow"))
    }

    /// Exact as long as the numerator fits in 53 bits, which all constructed
    /// distances do.
    pub fn to_f64(self) -> f64 {
        self.num as f64 / (self.exp as f64).exp2()
    }

    fn aligned(self, other: Dyadic) -> (i64, i64, u32) {
        let exp = self.exp.max(other.exp);
        let a = self
            .num
            .checked_shl(exp - self.exp)
            .filter(|v| v >> (exp - self.exp) == self.num)
            .expect("dyadic overflow in alignment");
        let b = other
            .num
            .checked_shl(exp - other.exp)
            .filter(|v| v >> (exp - other.exp) == other.num)
            .expect("dyadic overflow in alignment");
        (a, b, exp)
    }

    /// Parses a finite decimal such as `"1.5"` or `"0.125"`. Errors when the
    /// value is not a dyadic rational (for example `"0.1"`).
    pub fn parse_decimal(s: &str) -> Result<Dyadic> {
        s.parse::<Dyadic>()
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(rhs);
        Dyadic::new(a.checked_add(b).expect("dyadic overflow in add"), exp)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(rhs);
        Dyadic::new(a.checked_sub(b).expect("dyadic overflow in sub"), exp)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: self.num.checked_neg().expect("dyadic overflow in neg"),
            exp: self.exp,
        }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        let num = self.num.checked_mul(rhs.num).expect("dyadic overflow in mul");
        Dyadic::new(num, self.exp.checked_add(rhs.exp).expect("dyadic exponent overflow"))
    }
}

impl Mul<i64> for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: i64) -> Dyadic {
        Dyadic::new(
            self.num.checked_mul(rhs).expect("dyadic overflow in mul"),
            self.exp,
        )
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Dyadic) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Dyadic) -> Ordering {
        let exp = self.exp.max(other.exp);
        let a = (self.num as i128) << (exp - self.exp);
        let b = (other.num as i128) << (exp - other.exp);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    /// Exact finite decimal; dyadic denominators guarantee termination.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num < 0 {
            write!(f, "-")?;
        }
        let mag = (self.num as i128).unsigned_abs();
        let int = mag >> self.exp;
        write!(f, "{int}")?;
        let mask = (1u128 << self.exp) - 1;
        let mut rem = mag & mask;
        if rem != 0 {
            write!(f, ".")?;
            while rem != 0 {
                rem *= 10;
                write!(f, "{}", rem >> self.exp)?;
                rem &= mask;
            }
        }
        Ok(())
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Dyadic> {
        let bad = |m: &str| Error::InvalidInput(format!("`{s}` is not a dyadic decimal: {m}"));
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_str, frac_str) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_str.is_empty() || !int_str.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("malformed integer part"));
        }
        if !frac_str.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("malformed fractional part"));
        }
        if frac_str.len() > 25 {
            return Err(bad("too many fractional digits"));
        }
        let int: i128 = int_str.parse().map_err(|_| bad("integer part overflows"))?;
        let frac: i128 = if frac_str.is_empty() {
            0
        } else {
            frac_str.parse().map_err(|_| bad("fractional part overflows"))?
        };
        let k = frac_str.len() as u32;
        // value = (int*10^k + frac) / 10^k; dyadic iff 5^k divides the numerator.
        let pow10 = 10i128.pow(k);
        let pow5 = 5i128.pow(k);
        let total = int
            .checked_mul(pow10)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(|| bad("value overflows"))?;
        if total % pow5 != 0 {
            return Err(bad("denominator is not a power of two"));
        }
        let num = total / pow5;
        let num: i64 = i64::try_from(if neg { -num } else { num })
            .map_err(|_| bad("numerator exceeds 64 bits"))?;
        Ok(Dyadic::new(num, k))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalization() {
        assert_eq!(Dyadic::new(4, 2), Dyadic::from_int(1));
        assert_eq!(Dyadic::new(6, 1), Dyadic::from_int(3));
        assert_eq!(Dyadic::new(0, 7), ZERO);
    }

    #[test]
    fn arithmetic() {
        let h = Dyadic::new(1, 1); // 1/2
        let q = Dyadic::new(1, 2); // 1/4
        assert_eq!(h + q, Dyadic::new(3, 2));
        assert_eq!(h - q, q);
        assert_eq!(h * q, Dyadic::new(1, 3));
        assert_eq!(ONE.half(), h);
        assert!(q < h && h < ONE);
    }

    #[test]
    fn display_exact() {
        assert_eq!(Dyadic::new(3, 2).to_string(), "0.75");
        assert_eq!(Dyadic::new(-5, 3).to_string(), "-0.625");
        assert_eq!(Dyadic::from_int(14).to_string(), "14");
        assert_eq!(Dyadic::new(1, 10).to_string(), "0.0009765625");
    }

    #[test]
    fn parse_rejects_non_dyadic() {
        assert!("0.1".parse::<Dyadic>().is_err());
        assert!("1.3".parse::<Dyadic>().is_err());
        assert!("x".parse::<Dyadic>().is_err());
        assert!("".parse::<Dyadic>().is_err());
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(num in -1_000_000i64..1_000_000, exp in 0u32..20) {
            let d = Dyadic::new(num, exp);
            let back: Dyadic = d.to_string().parse().unwrap();
            prop_assert_eq!(d, back);
        }

        #[test]
        fn order_matches_f64(a in -100_000i64..100_000, ea in 0u32..12,
                             b in -100_000i64..100_000, eb in 0u32..12) {
            let x = Dyadic::new(a, ea);
            let y = Dyadic::new(b, eb);
            prop_assert_eq!(x.cmp(&y), x.to_f64().partial_cmp(&y.to_f64()).unwrap());
        }
    }
}
