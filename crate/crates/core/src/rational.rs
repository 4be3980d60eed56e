//! Parsing and canonical formatting of exact rationals.
//!
//! Inputs may be integers (`3`), fractions (`3/10`) or decimals (`0.3`,
//! `-1.25`, `.5`). Output is always `p/q` in lowest terms with `q > 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub fn parse_rational(input: &str) -> Result<BigRational> {
    let s = input.trim();
    let err = || Error::Parse(input.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = parse_integer(num.trim()).ok_or_else(err)?;
        let den: BigInt = parse_integer(den.trim()).ok_or_else(err)?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().map_err(|_| err())?;
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(num, den);
    Ok(if negative { -value } else { value })
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Canonical `p/q` rendering. `BigRational` keeps values reduced with a
/// positive denominator, so this is bit-exact for equal values.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Shorter rendering for human-readable output: integers print without `/1`.
pub fn display_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format_rational(q)
    }
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}


/// Serde adapter for a single rational as a `"p/q"` string.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a sequence of rationals as `["p/q", ...]`.
pub mod serde_rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(qs: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(qs.len()))?;
        for q in qs {
            seq.serialize_element(&format_rational(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapters for integers: a JSON number when it fits in `i64`,
/// otherwise a decimal string.
pub mod serde_int {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    struct Int<'a>(&'a BigInt);

    impl Serialize for Int<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            match self.0.to_i64() {
                Some(v) => s.serialize_i64(v),
                None => s.serialize_str(&self.0.to_string()),
            }
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum RawInt {
        Num(i64),
        Text(String),
    }

    impl RawInt {
        fn into_bigint<E: serde::de::Error>(self) -> std::result::Result<BigInt, E> {
            match self {
                RawInt::Num(v) => Ok(BigInt::from(v)),
                RawInt::Text(t) => t.parse().map_err(E::custom),
            }
        }
    }

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        Int(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        RawInt::deserialize(d)?.into_bigint()
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&Int(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigInt>, D::Error> {
            Vec::<RawInt>::deserialize(d)?
                .into_iter()
                .map(RawInt::into_bigint)
                .collect()
        }
    }

    pub mod matrix {
        use super::*;

        struct Row<'a>(&'a [BigInt]);

        impl Serialize for Row<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                super::vec::serialize(self.0, s)
            }
        }

        pub fn serialize<S: Serializer>(m: &[Vec<BigInt>], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(m.len()))?;
            for row in m {
                seq.serialize_element(&Row(row))?;
            }
            seq.end()
        }
    }

    pub mod array3 {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[BigInt; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
            super::vec::serialize(v, s)
        }
    }
}
