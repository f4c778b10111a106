use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use smallvec::SmallVec;

use super::AlgebraError;

/// Families that sort ahead of everything else, in this order. This puts the
/// double-point-relation alphabet in its conventional X < Y < U < V order.
const FAMILY_PRECEDENCE: [&str; 4] = ["X", "Y", "U", "V"];

fn family_rank(family: &str) -> usize {
    FAMILY_PRECEDENCE
        .iter()
        .position(|f| *f == family)
        .unwrap_or(FAMILY_PRECEDENCE.len())
}

/// A named, indexed indeterminate such as `a[1][2]`, `X[3]`, `U[2][4]` or `cC`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarSymbol {
    family: String,
    indices: Vec<u32>,
}

impl VarSymbol {
    pub fn new(family: impl Into<String>, indices: impl Into<Vec<u32>>) -> Self {
        let family = family.into();
        debug_assert!(valid_family(&family), "bad family name {family:?}");
        Self {
            family,
            indices: indices.into(),
        }
    }

    pub fn plain(family: impl Into<String>) -> Self {
        Self::new(family, Vec::new())
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }
}

fn valid_family(family: &str) -> bool {
    let mut chars = family.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Ord for VarSymbol {
    fn cmp(&self, other: &Self) -> Ordering {
        family_rank(&self.family)
            .cmp(&family_rank(&other.family))
            .then_with(|| self.family.cmp(&other.family))
            .then_with(|| self.indices.cmp(&other.indices))
    }
}

impl PartialOrd for VarSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VarSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.family)?;
        for i in &self.indices {
            write!(f, "[{i}]")?;
        }
        Ok(())
    }
}

impl FromStr for VarSymbol {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AlgebraError::BadSymbol(s.to_string());
        let (family, mut rest) = match s.find('[') {
            Some(pos) => s.split_at(pos),
            None => (s, ""),
        };
        if !valid_family(family) {
            return Err(bad());
        }
        let mut indices = Vec::new();
        while !rest.is_empty() {
            let close = rest.find(']').ok_or_else(bad)?;
            if !rest.starts_with('[') {
                return Err(bad());
            }
            let digits = &rest[1..close];
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            indices.push(digits.parse().map_err(|_| bad())?);
            rest = &rest[close + 1..];
        }
        Ok(Self::new(family, indices))
    }
}

/// Interned handle to a [`VarSymbol`]. Equality and hashing are by address;
/// ordering is the symbol order.
#[derive(Clone, Copy)]
pub(crate) struct Var(&'static VarSymbol);

fn interner() -> &'static RwLock<HashMap<VarSymbol, &'static VarSymbol>> {
    static INTERNER: OnceLock<RwLock<HashMap<VarSymbol, &'static VarSymbol>>> = OnceLock::new();
    INTERNER.get_or_init(Default::default)
}

impl Var {
    pub(crate) fn intern(symbol: &VarSymbol) -> Var {
        if let Some(s) = interner().read().expect("symbol table poisoned").get(symbol) {
            return Var(s);
        }
        let mut table = interner().write().expect("symbol table poisoned");
        let s = *table
            .entry(symbol.clone())
            .or_insert_with(|| Box::leak(Box::new(symbol.clone())));
        Var(s)
    }

    pub(crate) fn symbol(self) -> &'static VarSymbol {
        self.0
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0 as *const VarSymbol).hash(state)
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            Ordering::Equal
        } else {
            self.0.cmp(other.0)
        }
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

type Factors = SmallVec<[(Var, u32); 4]>;

/// A power product of variables. Factors are kept sorted by symbol with
/// strictly positive exponents; the empty product is the unit monomial.
///
/// Monomials are ordered graded-lexicographically: lower total degree first,
/// then within a degree the monomial carrying the higher power of the earliest
/// variable comes first (`x^2 < x*y < y^2` when `x < y`).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    degree: u32,
    factors: Factors,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(symbol: &VarSymbol) -> Self {
        Self::power(symbol, 1)
    }

    pub fn power(symbol: &VarSymbol, exp: u32) -> Self {
        if exp == 0 {
            return Self::one();
        }
        let mut factors = Factors::new();
        factors.push((Var::intern(symbol), exp));
        Self {
            degree: exp,
            factors,
        }
    }

    /// Builds a monomial from `(symbol, exponent)` pairs. Repeated symbols
    /// multiply; zero exponents are dropped.
    pub fn from_powers<'a>(powers: impl IntoIterator<Item = (&'a VarSymbol, u32)>) -> Self {
        powers
            .into_iter()
            .fold(Self::one(), |acc, (s, e)| acc.mul(&Self::power(s, e)))
    }

    pub(crate) fn from_sorted_factors(factors: Factors) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(factors.iter().all(|&(_, e)| e > 0));
        let degree = factors.iter().map(|&(_, e)| e).sum();
        Self { degree, factors }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exponent(&self, symbol: &VarSymbol) -> u32 {
        self.exponent_of(Var::intern(symbol))
    }

    pub(crate) fn exponent_of(&self, var: Var) -> u32 {
        self.factors
            .iter()
            .find(|(v, _)| *v == var)
            .map_or(0, |&(_, e)| e)
    }

    /// `(symbol, exponent)` pairs in symbol order.
    pub fn iter(&self) -> impl Iterator<Item = (&'static VarSymbol, u32)> + '_ {
        self.factors.iter().map(|&(v, e)| (v.symbol(), e))
    }

    pub(crate) fn factors(&self) -> &[(Var, u32)] {
        &self.factors
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        if other.is_one() {
            return self.clone();
        }
        if self.is_one() {
            return other.clone();
        }
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Factors::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial {
            degree: self.degree + other.degree,
            factors: out,
        }
    }

    /// The monomial with `symbol` removed, together with its former exponent.
    pub fn split_off(&self, symbol: &VarSymbol) -> (Monomial, u32) {
        let var = Var::intern(symbol);
        match self.factors.iter().position(|(v, _)| *v == var) {
            None => (self.clone(), 0),
            Some(pos) => {
                let mut factors = self.factors.clone();
                let (_, e) = factors.remove(pos);
                (
                    Monomial {
                        degree: self.degree - e,
                        factors,
                    },
                    e,
                )
            }
        }
    }

    /// Sum of `weight(v) * exponent` over the factors.
    pub fn weighted_degree(
        &self,
        weight: impl Fn(&VarSymbol) -> Option<i64>,
    ) -> Result<i64, AlgebraError> {
        self.iter().try_fold(0i64, |acc, (s, e)| {
            let w = weight(s).ok_or_else(|| AlgebraError::MissingWeight(s.clone()))?;
            Ok(acc + w * i64::from(e))
        })
    }

    /// Applies a symbol renaming. The map need not be injective.
    pub fn rename(&self, f: impl Fn(&VarSymbol) -> VarSymbol) -> Monomial {
        let renamed: Vec<(VarSymbol, u32)> = self.iter().map(|(s, e)| (f(s), e)).collect();
        Monomial::from_powers(renamed.iter().map(|(s, e)| (s, *e)))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            for (x, y) in self.factors.iter().zip(other.factors.iter()) {
                match x.0.cmp(&y.0) {
                    Ordering::Equal => match y.1.cmp(&x.1) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    },
                    ord => return ord,
                }
            }
            // same degree and a common prefix means the tails are empty
            self.factors.len().cmp(&other.factors.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (i, (s, e)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> VarSymbol {
        s.parse().unwrap()
    }

    #[test]
    fn symbols_round_trip_through_text() {
        for s in ["a[1][2]", "X[3]", "U[2][4]", "cC", "sigma1A[1][2][3]", "c1"] {
            assert_eq!(sym(s).to_string(), s);
        }
        for bad in ["", "[1]", "a[", "a[x]", "a[1]]", "1a", "a[]", "a b"] {
            assert!(bad.parse::<VarSymbol>().is_err(), "{bad:?} parsed");
        }
    }

    #[test]
    fn gdpr_families_sort_first() {
        let order = ["X[2]", "Y[1]", "U[1][1]", "U[2][1]", "V[3][1]", "a[1][1]", "cA[1]"];
        let syms: Vec<_> = order.iter().map(|s| sym(s)).collect();
        let mut sorted = syms.clone();
        sorted.sort();
        assert_eq!(sorted, syms);
        assert!(sym("X[1]") < sym("X[2]"));
        assert!(sym("a[1][2]") < sym("a[2][2]"));
    }

    #[test]
    fn graded_lex_order() {
        let x = Monomial::var(&sym("x"));
        let y = Monomial::var(&sym("y"));
        let xx = x.mul(&x);
        let xy = x.mul(&y);
        let yy = y.mul(&y);
        let mut ms = vec![yy.clone(), Monomial::one(), xy.clone(), y.clone(), xx.clone(), x.clone()];
        ms.sort();
        assert_eq!(ms, vec![Monomial::one(), x, y, xx, xy, yy]);
    }

    #[test]
    fn weighted_degree_sums_weights() {
        let m = Monomial::from_powers([(&sym("x"), 2), (&sym("y"), 1)]);
        let w = |s: &VarSymbol| match s.family() {
            "x" => Some(1),
            "y" => Some(-1),
            _ => None,
        };
        assert_eq!(m.weighted_degree(w).unwrap(), 1);
        assert_eq!(Monomial::one().weighted_degree(|_| None).unwrap(), 0);
        assert!(matches!(
            Monomial::var(&sym("z")).weighted_degree(w),
            Err(AlgebraError::MissingWeight(_))
        ));
    }

    #[test]
    fn split_off_removes_one_variable() {
        let m = Monomial::from_powers([(&sym("x"), 2), (&sym("y"), 3)]);
        let (rest, e) = m.split_off(&sym("y"));
        assert_eq!(e, 3);
        assert_eq!(rest, Monomial::power(&sym("x"), 2));
        assert_eq!(m.split_off(&sym("z")).1, 0);
    }
}
