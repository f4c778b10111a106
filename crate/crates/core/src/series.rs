//! Power series in up to three formal variables `u, v, w` with polynomial
//! coefficients, stored modulo a total-degree cutoff.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::de;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{AlgebraError, CoeffRing, Monomial, Polynomial, VarSymbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("truncation order must be at least 1, got {0}")]
    InvalidOrder(u32),
    #[error("invalid value {value} for {name}")]
    InvalidParameter { name: &'static str, value: u32 },
    #[error("inner series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("exponent uses variable {0} which the series does not declare")]
    UndeclaredVariable(SeriesVar),
    #[error("expected a series in one variable, found {0} variables")]
    NotUnivariate(usize),
    #[error("coefficient of {0} is not denominator-free after any power of {1}")]
    NotLocalizedAt(String, u64),
    #[error("round trip through the division series failed at order {0}")]
    RoundTripFailed(u32),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesVar {
    U,
    V,
    W,
}

impl SeriesVar {
    pub const ALL: [SeriesVar; 3] = [SeriesVar::U, SeriesVar::V, SeriesVar::W];

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SeriesVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesVar::U => "u",
            SeriesVar::V => "v",
            SeriesVar::W => "w",
        })
    }
}

/// Exponents of `(u, v, w)`, ordered graded-lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct SeriesExp(pub [u32; 3]);

impl SeriesExp {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn of(var: SeriesVar, e: u32) -> Self {
        let mut x = [0; 3];
        x[var.slot()] = e;
        SeriesExp(x)
    }

    pub fn get(&self, var: SeriesVar) -> u32 {
        self.0[var.slot()]
    }

    fn add(&self, other: &SeriesExp) -> SeriesExp {
        SeriesExp([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }
}

impl Ord for SeriesExp {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for SeriesExp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A power series truncated above total degree `order`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    vars: Vec<SeriesVar>,
    order: u32,
    ring: CoeffRing,
    coeffs: BTreeMap<SeriesExp, Polynomial>,
}

fn check_order(order: u32) -> Result<(), SeriesError> {
    if order == 0 {
        Err(SeriesError::InvalidOrder(order))
    } else {
        Ok(())
    }
}

fn normalize_vars(vars: &[SeriesVar]) -> Vec<SeriesVar> {
    let mut v = vars.to_vec();
    v.sort();
    v.dedup();
    v
}

fn union_vars(a: &[SeriesVar], b: &[SeriesVar]) -> Vec<SeriesVar> {
    let mut v: Vec<_> = a.iter().chain(b).copied().collect();
    v.sort();
    v.dedup();
    v
}

impl TruncatedSeries {
    pub fn zero(vars: &[SeriesVar], order: u32, ring: CoeffRing) -> Result<Self, SeriesError> {
        check_order(order)?;
        Ok(Self {
            vars: normalize_vars(vars),
            order,
            ring,
            coeffs: BTreeMap::new(),
        })
    }

    /// The series consisting of the single variable `var`.
    pub fn variable(var: SeriesVar, order: u32) -> Result<Self, SeriesError> {
        let ring = CoeffRing::integers();
        Self::from_coeffs(
            &[var],
            order,
            ring.clone(),
            [(SeriesExp::of(var, 1), Polynomial::one(ring))],
        )
    }

    /// Builds a series from coefficients, dropping zero coefficients and
    /// anything above the cutoff. Coefficient rings are joined into `ring`.
    pub fn from_coeffs(
        vars: &[SeriesVar],
        order: u32,
        ring: CoeffRing,
        coeffs: impl IntoIterator<Item = (SeriesExp, Polynomial)>,
    ) -> Result<Self, SeriesError> {
        let mut s = Self::zero(vars, order, ring)?;
        let mut kept = Vec::new();
        for (exp, c) in coeffs {
            if let Some(&var) = SeriesVar::ALL
                .iter()
                .find(|v| exp.get(**v) > 0 && !s.vars.contains(v))
            {
                return Err(SeriesError::UndeclaredVariable(var));
            }
            s.ring = s.ring.join(c.ring())?;
            if exp.degree() <= order && !c.is_zero() {
                kept.push((exp, c));
            }
        }
        for (exp, c) in kept {
            let c = c.embed(&s.ring)?;
            match s.coeffs.remove(&exp) {
                Some(prev) => {
                    let sum = prev.try_add(&c)?;
                    if !sum.is_zero() {
                        s.coeffs.insert(exp, sum);
                    }
                }
                None => {
                    s.coeffs.insert(exp, c);
                }
            }
        }
        Ok(s)
    }

    pub fn vars(&self) -> &[SeriesVar] {
        &self.vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nonzero coefficients in graded-lexicographic exponent order.
    pub fn coeffs(&self) -> impl Iterator<Item = (&SeriesExp, &Polynomial)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, exp: SeriesExp) -> Polynomial {
        self.coeffs
            .get(&exp)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.ring.clone()))
    }

    /// Coefficient of `var^e` in a series; other variables at exponent 0.
    pub fn coeff_of(&self, var: SeriesVar, e: u32) -> Polynomial {
        self.coeff(SeriesExp::of(var, e))
    }

    pub fn constant_term(&self) -> Polynomial {
        self.coeff(SeriesExp::default())
    }

    /// Re-truncates at a lower order (higher orders are left unchanged).
    pub fn truncate(&self, order: u32) -> Result<Self, SeriesError> {
        check_order(order)?;
        let order = order.min(self.order);
        Ok(Self {
            vars: self.vars.clone(),
            order,
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| e.degree() <= order)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        })
    }

    /// Declares extra variables without changing the value.
    pub fn with_vars(&self, vars: &[SeriesVar]) -> Self {
        let mut s = self.clone();
        s.vars = union_vars(&self.vars, vars);
        s
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        let order = self.order.min(other.order);
        let ring = self.ring.join(&other.ring)?;
        let coeffs = self
            .coeffs
            .iter()
            .chain(other.coeffs.iter())
            .map(|(e, c)| (*e, c.clone()));
        Self::from_coeffs(&union_vars(&self.vars, &other.vars), order, ring, coeffs)
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        let order = self.order.min(other.order);
        let ring = self.ring.join(&other.ring)?;
        let mut acc: BTreeMap<SeriesExp, Polynomial> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e = ea.add(eb);
                if e.degree() > order {
                    continue;
                }
                let prod = ca.try_mul(cb)?;
                match acc.get_mut(&e) {
                    Some(existing) => *existing = existing.try_add(&prod)?,
                    None => {
                        acc.insert(e, prod);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        for c in acc.values_mut() {
            *c = c.embed(&ring)?;
        }
        Ok(Self {
            vars: union_vars(&self.vars, &other.vars),
            order,
            ring,
            coeffs: acc,
        })
    }

    /// Multiplies every coefficient by a polynomial scalar.
    pub fn scale(&self, factor: &Polynomial) -> Result<Self, SeriesError> {
        let ring = self.ring.join(factor.ring())?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| Ok((*e, c.try_mul(factor)?)))
            .collect::<Result<Vec<_>, AlgebraError>>()?;
        Self::from_coeffs(&self.vars, self.order, ring, coeffs)
    }

    /// Applies a function to every coefficient polynomial.
    pub fn map_coeffs(
        &self,
        f: impl Fn(&Polynomial) -> Result<Polynomial, AlgebraError>,
    ) -> Result<Self, SeriesError> {
        let mut ring = self.ring.clone();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (e, c) in &self.coeffs {
            let image = f(c)?;
            ring = ring.join(image.ring())?;
            coeffs.push((*e, image));
        }
        Self::from_coeffs(&self.vars, self.order, ring, coeffs)
    }

    /// Renames formal variables, e.g. `F(u,v)` into `F(v,w)`. The renaming is
    /// applied simultaneously and must be injective on the declared variables.
    pub fn rename(&self, map: &[(SeriesVar, SeriesVar)]) -> Self {
        let target = |v: SeriesVar| map.iter().find(|(from, _)| *from == v).map_or(v, |&(_, to)| to);
        let vars: Vec<_> = self.vars.iter().map(|&v| target(v)).collect();
        debug_assert_eq!(normalize_vars(&vars).len(), self.vars.len(), "renaming must be injective");
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| {
                let mut out = [0u32; 3];
                for v in SeriesVar::ALL {
                    out[target(v).slot()] += e.get(v);
                }
                (SeriesExp(out), c.clone())
            })
            .collect();
        Self {
            vars: normalize_vars(&vars),
            order: self.order,
            ring: self.ring.clone(),
            coeffs,
        }
    }

    /// Substitutes `inner` for `var`, truncating at the smaller of the two
    /// orders. `inner` may mention `var` itself; the substitution is
    /// simultaneous.
    pub fn compose(&self, var: SeriesVar, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.constant_term().is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let order = self.order.min(inner.order);
        let ring = self.ring.join(&inner.ring)?;
        let rest_vars: Vec<_> = self.vars.iter().copied().filter(|&v| v != var).collect();
        let result_vars = union_vars(&rest_vars, &inner.vars);

        // outer = sum_k c_k * var^k with c_k free of var
        let mut parts: BTreeMap<u32, Vec<(SeriesExp, Polynomial)>> = BTreeMap::new();
        for (e, c) in &self.coeffs {
            let k = e.get(var);
            let mut rest = *e;
            rest.0[var.slot()] = 0;
            parts.entry(k).or_default().push((rest, c.clone()));
        }

        let mut result = Self::zero(&result_vars, order, ring.clone())?;
        let mut power: Option<Self> = None;
        let mut power_k = 0;
        for (k, part) in parts {
            let ck = Self::from_coeffs(&rest_vars, order, ring.clone(), part)?;
            if k == 0 {
                result = result.add(&ck)?;
                continue;
            }
            if k > order {
                break;
            }
            while power_k < k {
                power = Some(match power {
                    None => inner.truncate(order)?,
                    Some(p) => p.mul(inner)?,
                });
                power_k += 1;
            }
            let term = ck.mul(power.as_ref().expect("k >= 1"))?;
            result = result.add(&term)?;
        }
        Ok(result.with_vars(&result_vars))
    }

    /// Coefficients of a univariate series, index `i` holding the coefficient
    /// of the `i`-th power, up to the order.
    pub fn univariate_coeffs(&self) -> Result<Vec<Polynomial>, SeriesError> {
        let var = self.single_var()?;
        Ok((0..=self.order).map(|i| self.coeff_of(var, i)).collect())
    }

    pub fn single_var(&self) -> Result<SeriesVar, SeriesError> {
        match self.vars.as_slice() {
            [v] => Ok(*v),
            other => Err(SeriesError::NotUnivariate(other.len())),
        }
    }

    /// Turns the truncated series into an ordinary polynomial, sending each
    /// formal variable to the given symbol.
    pub fn to_polynomial(&self, symbols: &[(SeriesVar, VarSymbol)]) -> Result<Polynomial, SeriesError> {
        let mut out = Polynomial::zero(self.ring.clone());
        for (e, c) in &self.coeffs {
            let mut powers = Vec::new();
            for v in SeriesVar::ALL {
                if e.get(v) == 0 {
                    continue;
                }
                let sym = symbols
                    .iter()
                    .find(|(sv, _)| *sv == v)
                    .map(|(_, s)| s)
                    .ok_or(SeriesError::UndeclaredVariable(v))?;
                powers.push((sym, e.get(v)));
            }
            let m = Polynomial::term(self.ring.clone(), Monomial::from_powers(powers), BigRational::one())?;
            out = out.try_add(&m.try_mul(c)?)?;
        }
        Ok(out)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.coeffs {
            let negated;
            let c = if c.len() == 1 && c.terms().all(|(_, q)| q.is_negative()) {
                f.write_str(if first { "-" } else { " - " })?;
                negated = -c;
                &negated
            } else {
                if !first {
                    f.write_str(" + ")?;
                }
                c
            };
            first = false;
            let mono: Vec<String> = SeriesVar::ALL
                .iter()
                .filter(|v| e.get(**v) > 0)
                .map(|v| match e.get(*v) {
                    1 => v.to_string(),
                    k => format!("{v}^{k}"),
                })
                .collect();
            let coeff = if c.len() > 1 { format!("({c})") } else { c.to_string() };
            match (mono.is_empty(), coeff.as_str()) {
                (true, _) => f.write_str(&coeff)?,
                (false, "1") => f.write_str(&mono.join("*"))?,
                (false, _) => write!(f, "{coeff}*{}", mono.join("*"))?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(deg {})", self.order + 1)
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffEntry<P> {
    exp: Vec<u32>,
    poly: P,
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let coeffs: Vec<CoeffEntry<&Polynomial>> = self
            .coeffs
            .iter()
            .map(|(e, c)| CoeffEntry {
                exp: self.vars.iter().map(|v| e.get(*v)).collect(),
                poly: c,
            })
            .collect();
        let mut st = serializer.serialize_struct("TruncatedSeries", 3)?;
        st.serialize_field("vars", &self.vars)?;
        st.serialize_field("order", &self.order)?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct RawSeries {
    vars: Vec<SeriesVar>,
    order: u32,
    coeffs: Vec<CoeffEntry<Polynomial>>,
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawSeries::deserialize(deserializer)?;
        let vars = normalize_vars(&raw.vars);
        if vars.len() != raw.vars.len() || vars != raw.vars {
            return Err(de::Error::custom("vars must be distinct and in u, v, w order"));
        }
        let mut coeffs = Vec::with_capacity(raw.coeffs.len());
        for entry in raw.coeffs {
            if entry.exp.len() != vars.len() {
                return Err(de::Error::custom("exponent length does not match vars"));
            }
            let mut e = [0u32; 3];
            for (v, k) in vars.iter().zip(entry.exp) {
                e[v.slot()] = k;
            }
            let e = SeriesExp(e);
            if e.degree() > raw.order {
                return Err(de::Error::custom("coefficient above the truncation order"));
            }
            coeffs.push((e, entry.poly));
        }
        TruncatedSeries::from_coeffs(&vars, raw.order, CoeffRing::integers(), coeffs)
            .map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use SeriesVar::*;

    fn z() -> CoeffRing {
        CoeffRing::integers()
    }

    fn int(k: i64) -> Polynomial {
        Polynomial::integer(z(), k)
    }

    /// 1-variable series from integer coefficients starting at degree 0.
    fn uni(var: SeriesVar, order: u32, cs: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_coeffs(
            &[var],
            order,
            z(),
            cs.iter().enumerate().map(|(i, c)| (SeriesExp::of(var, i as u32), int(*c))),
        )
        .unwrap()
    }

    #[test]
    fn zero_order_is_rejected() {
        assert_eq!(TruncatedSeries::variable(U, 0), Err(SeriesError::InvalidOrder(0)));
    }

    #[test]
    fn product_is_truncated() {
        // (1 + u)^2 mod u^3 -> 1 + 2u + u^2; (1+u)^3 -> 1 + 3u + 3u^2
        let s = uni(U, 2, &[1, 1]);
        let sq = s.mul(&s).unwrap();
        assert_eq!(sq, uni(U, 2, &[1, 2, 1]));
        assert_eq!(sq.mul(&s).unwrap(), uni(U, 2, &[1, 3, 3]));
        assert!(sq.coeffs().all(|(e, _)| e.degree() <= 2));
    }

    #[test]
    fn compose_identity_and_zero() {
        let u = TruncatedSeries::variable(U, 5).unwrap();
        let g = uni(U, 5, &[0, 2, 0, 1]);
        assert_eq!(u.compose(U, &g).unwrap(), g);
        let f = uni(U, 5, &[0, 1, 1]).with_vars(&[V]);
        let zero = TruncatedSeries::zero(&[U], 5, z()).unwrap();
        assert_eq!(f.compose(V, &zero).unwrap(), uni(U, 5, &[0, 1, 1]));
    }

    #[test]
    fn compose_rejects_constant_term() {
        let u = TruncatedSeries::variable(U, 3).unwrap();
        assert_eq!(
            u.compose(U, &uni(U, 3, &[1, 1])),
            Err(SeriesError::NonzeroConstantTerm)
        );
    }

    #[test]
    fn compose_matches_geometric_series() {
        // 1/(1-u) - 1 composed with u -> 2u is sum 2^k u^k
        let geom = uni(U, 6, &[0, 1, 1, 1, 1, 1, 1]);
        let two_u = uni(U, 6, &[0, 2]);
        assert_eq!(geom.compose(U, &two_u).unwrap(), uni(U, 6, &[0, 2, 4, 8, 16, 32, 64]));
    }

    #[test]
    fn simultaneous_substitution_and_rename() {
        // f(u,v) = u*v; f(u, u+v) = u^2 + u*v
        let uv = TruncatedSeries::from_coeffs(&[U, V], 4, z(), [(SeriesExp([1, 1, 0]), int(1))]).unwrap();
        let u_plus_v = TruncatedSeries::variable(U, 4)
            .unwrap()
            .add(&TruncatedSeries::variable(V, 4).unwrap())
            .unwrap();
        let got = uv.compose(V, &u_plus_v).unwrap();
        let want = TruncatedSeries::from_coeffs(
            &[U, V],
            4,
            z(),
            [(SeriesExp([2, 0, 0]), int(1)), (SeriesExp([1, 1, 0]), int(1))],
        )
        .unwrap();
        assert_eq!(got, want);
        let vw = uv.rename(&[(U, V), (V, W)]);
        assert_eq!(vw.vars(), &[V, W]);
        assert_eq!(vw.coeff(SeriesExp([0, 1, 1])), int(1));
    }

    #[test]
    fn json_round_trip_and_layout() {
        let s = TruncatedSeries::from_coeffs(
            &[U, V],
            2,
            z(),
            [(SeriesExp([0, 1, 0]), int(1)), (SeriesExp([1, 0, 0]), int(1)), (SeriesExp([1, 1, 0]), int(3))],
        )
        .unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.starts_with(r#"{"vars":["u","v"],"order":2,"coeffs":[{"exp":[1,0],"#), "{json}");
        let back: TruncatedSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
