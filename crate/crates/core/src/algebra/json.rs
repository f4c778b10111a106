//! JSON form of polynomials:
//!
//! ```json
//! { "ring": {"inverted": [2]},
//!   "terms": [ {"coeff": {"num": "1", "den": "2"}, "monomial": {"a[1][1]": 1}} ] }
//! ```
//!
//! Terms are written in graded-lexicographic order and monomial keys in symbol
//! order, so the output is byte-stable.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::de::{self, MapAccess, Visitor};
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CoeffRing, Monomial, Polynomial, VarSymbol};

#[derive(Serialize, Deserialize)]
struct RingJson {
    inverted: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    num: String,
    den: String,
}

struct MonomialJson<'a>(&'a Monomial);

impl Serialize for MonomialJson<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.iter().count()))?;
        for (s, e) in self.0.iter() {
            map.serialize_entry(&s.to_string(), &e)?;
        }
        map.end()
    }
}

struct TermJson<'a> {
    coeff: &'a BigRational,
    monomial: &'a Monomial,
}

impl Serialize for TermJson<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Term", 2)?;
        st.serialize_field(
            "coeff",
            &CoeffJson {
                num: self.coeff.numer().to_string(),
                den: self.coeff.denom().to_string(),
            },
        )?;
        st.serialize_field("monomial", &MonomialJson(self.monomial))?;
        st.end()
    }
}

impl Serialize for CoeffRing {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RingJson {
            inverted: self.inverted().iter().copied().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CoeffRing {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RingJson::deserialize(deserializer)?;
        CoeffRing::with_inverted(raw.inverted).map_err(de::Error::custom)
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermJson<'_>> = self
            .terms()
            .map(|(monomial, coeff)| TermJson { coeff, monomial })
            .collect();
        let mut st = serializer.serialize_struct("Polynomial", 2)?;
        st.serialize_field("ring", self.ring())?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// Monomial keys as written, before validation.
struct RawMonomial(Vec<(String, u32)>);

impl<'de> Deserialize<'de> for RawMonomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RawMonomial;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from variable names to positive exponents")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some((k, e)) = access.next_entry::<String, u32>()? {
                    out.push((k, e));
                }
                Ok(RawMonomial(out))
            }
        }
        deserializer.deserialize_map(V)
    }
}

#[derive(Deserialize)]
struct RawTerm {
    coeff: CoeffJson,
    monomial: RawMonomial,
}

#[derive(Deserialize)]
struct RawPolynomial {
    ring: CoeffRing,
    terms: Vec<RawTerm>,
}

fn parse_coeff(c: &CoeffJson) -> Result<BigRational, String> {
    let num: BigInt = c.num.parse().map_err(|_| format!("bad numerator {:?}", c.num))?;
    let den: BigInt = c.den.parse().map_err(|_| format!("bad denominator {:?}", c.den))?;
    if !den.is_positive() {
        return Err(format!("denominator must be positive, got {den}"));
    }
    let q = BigRational::new(num, den);
    if q.is_zero() {
        return Err("zero coefficients are not stored".into());
    }
    Ok(q)
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawPolynomial::deserialize(deserializer)?;
        let mut seen = BTreeSet::new();
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in raw.terms {
            let coeff = parse_coeff(&t.coeff).map_err(de::Error::custom)?;
            let mut powers = Vec::with_capacity(t.monomial.0.len());
            let mut names = BTreeSet::new();
            for (name, e) in t.monomial.0 {
                let sym: VarSymbol = name.parse().map_err(de::Error::custom)?;
                if e == 0 {
                    return Err(de::Error::custom(format!("zero exponent for {sym}")));
                }
                if !names.insert(sym.clone()) {
                    return Err(de::Error::custom(format!("repeated variable {sym}")));
                }
                powers.push((sym, e));
            }
            let monomial = Monomial::from_powers(powers.iter().map(|(s, e)| (s, *e)));
            if !seen.insert(monomial.clone()) {
                return Err(de::Error::custom(format!("repeated monomial {monomial}")));
            }
            terms.push((monomial, coeff));
        }
        Polynomial::from_terms(raw.ring, terms).map_err(de::Error::custom)
    }
}
