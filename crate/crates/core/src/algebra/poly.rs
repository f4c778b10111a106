use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;

use super::symbol::Var;
use super::{AlgebraError, CoeffRing, Monomial, VarSymbol};

/// A sparse multivariate polynomial with exact rational coefficients drawn
/// from a [`CoeffRing`].
///
/// Terms are kept in graded-lexicographic order with no zero coefficients, so
/// structural equality is mathematical equality (within the same ring).
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    ring: CoeffRing,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero(ring: CoeffRing) -> Self {
        Self {
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: CoeffRing) -> Self {
        Self::integer(ring, 1)
    }

    pub fn integer(ring: CoeffRing, value: i64) -> Self {
        let mut p = Self::zero(ring);
        if value != 0 {
            p.terms.insert(Monomial::one(), BigRational::from_integer(value.into()));
        }
        p
    }

    pub fn constant(ring: CoeffRing, value: BigRational) -> Result<Self, AlgebraError> {
        Self::term(ring, Monomial::one(), value)
    }

    pub fn var(ring: CoeffRing, symbol: &VarSymbol) -> Self {
        let mut p = Self::zero(ring);
        p.terms.insert(Monomial::var(symbol), BigRational::one());
        p
    }

    pub fn term(ring: CoeffRing, monomial: Monomial, coeff: BigRational) -> Result<Self, AlgebraError> {
        ring.check(&coeff)?;
        let mut p = Self::zero(ring);
        if !coeff.is_zero() {
            p.terms.insert(monomial, coeff);
        }
        Ok(p)
    }

    /// Collects terms, merging repeated monomials and dropping zeros. Every
    /// coefficient must belong to `ring`.
    pub fn from_terms(
        ring: CoeffRing,
        terms: impl IntoIterator<Item = (Monomial, BigRational)>,
    ) -> Result<Self, AlgebraError> {
        let mut map: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (m, c) in terms {
            ring.check(&c)?;
            *map.entry(m).or_insert_with(BigRational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Self { ring, terms: map })
    }

    pub(crate) fn from_map_unchecked(ring: CoeffRing, terms: BTreeMap<Monomial, BigRational>) -> Self {
        debug_assert!(terms.values().all(|c| !c.is_zero() && ring.contains(c)));
        Self { ring, terms }
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    /// Terms in graded-lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn coeff(&self, monomial: &Monomial) -> BigRational {
        self.terms.get(monomial).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&Monomial::one())
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, symbol: &VarSymbol) -> u32 {
        let v = Var::intern(symbol);
        self.terms.keys().map(|m| m.exponent_of(v)).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<VarSymbol> {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|(s, _)| s.clone()))
            .collect()
    }

    /// Moves the polynomial into a larger ring.
    pub fn embed(&self, ring: &CoeffRing) -> Result<Self, AlgebraError> {
        if !ring.contains_ring(&self.ring) {
            return Err(AlgebraError::IncompatibleRings {
                left: self.ring.clone(),
                right: ring.clone(),
            });
        }
        Ok(Self {
            ring: ring.clone(),
            terms: self.terms.clone(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        let ring = self.ring.join(&other.ring)?;
        let (big, small) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut terms = big.terms.clone();
        for (m, c) in &small.terms {
            match terms.get_mut(m) {
                Some(existing) => {
                    *existing += c;
                    if existing.is_zero() {
                        terms.remove(m);
                    }
                }
                None => {
                    terms.insert(m.clone(), c.clone());
                }
            }
        }
        Ok(Self { ring, terms })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        let ring = self.ring.join(&other.ring)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(ring));
        }
        let mut acc: FxHashMap<Monomial, BigRational> = FxHashMap::default();
        acc.reserve(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                acc.entry(ma.mul(mb))
                    .and_modify(|e| *e += &c)
                    .or_insert(c);
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(Self { ring, terms })
    }

    fn neg_ref(&self) -> Self {
        Self {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    /// Multiplies by a rational scalar, which must lie in the ring.
    pub fn scale(&self, factor: &BigRational) -> Result<Self, AlgebraError> {
        self.ring.check(factor)?;
        if factor.is_zero() {
            return Ok(Self::zero(self.ring.clone()));
        }
        Ok(Self {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * factor)).collect(),
        })
    }

    pub fn scale_int(&self, factor: i64) -> Self {
        self.scale(&BigRational::from_integer(factor.into()))
            .expect("integers lie in every ring")
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self::one(self.ring.clone());
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Extends `bindings` to a ring homomorphism; unbound variables map to
    /// themselves.
    pub fn substitute(&self, bindings: &BTreeMap<VarSymbol, Polynomial>) -> Result<Self, AlgebraError> {
        let ring = bindings
            .values()
            .try_fold(self.ring.clone(), |r, p| r.join(p.ring()))?;
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        let images: FxHashMap<Var, &Polynomial> =
            bindings.iter().map(|(s, p)| (Var::intern(s), p)).collect();
        let mut powers: FxHashMap<(Var, u32), Polynomial> = FxHashMap::default();
        let mut acc: FxHashMap<Monomial, BigRational> = FxHashMap::default();
        for (m, c) in &self.terms {
            let mut kept = smallvec::SmallVec::<[(Var, u32); 4]>::new();
            let mut image = Polynomial::one(ring.clone());
            for &(v, e) in m.factors() {
                match images.get(&v) {
                    Some(p) => {
                        let pe = powers.entry((v, e)).or_insert_with(|| p.pow(e));
                        image = &image * &*pe;
                    }
                    None => kept.push((v, e)),
                }
            }
            let kept = Monomial::from_sorted_factors(kept);
            for (mi, ci) in &image.terms {
                let coeff = c * ci;
                acc.entry(mi.mul(&kept))
                    .and_modify(|e| *e += &coeff)
                    .or_insert(coeff);
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(Self { ring, terms })
    }

    /// Exact value at a point binding every variable.
    pub fn evaluate(&self, point: &BTreeMap<VarSymbol, BigRational>) -> Result<BigRational, AlgebraError> {
        let values: FxHashMap<Var, &BigRational> =
            point.iter().map(|(s, q)| (Var::intern(s), q)).collect();
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.factors() {
                let x = values
                    .get(&v)
                    .ok_or_else(|| AlgebraError::UnboundVariable(v.symbol().clone()))?;
                t *= pow_rational(x, e);
            }
            total += t;
        }
        Ok(total)
    }

    /// Substitutes rational values for the bound variables only, keeping the
    /// rest symbolic. Sampled values need not lie in the coefficient ring, so
    /// the result is returned as raw terms over `Q`.
    pub fn evaluate_partial(&self, point: &BTreeMap<VarSymbol, BigRational>) -> BTreeMap<Monomial, BigRational> {
        let values: FxHashMap<Var, &BigRational> =
            point.iter().map(|(s, q)| (Var::intern(s), q)).collect();
        let mut acc: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            let mut kept = smallvec::SmallVec::<[(Var, u32); 4]>::new();
            for &(v, e) in m.factors() {
                match values.get(&v) {
                    Some(x) => t *= pow_rational(x, e),
                    None => kept.push((v, e)),
                }
            }
            *acc.entry(Monomial::from_sorted_factors(kept))
                .or_insert_with(BigRational::zero) += t;
        }
        acc.retain(|_, c| !c.is_zero());
        acc
    }

    /// Drops every term whose monomial satisfies `predicate`.
    pub fn kill_monomials(&self, predicate: impl Fn(&Monomial) -> bool) -> Self {
        Self {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !predicate(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Splits into coefficients of powers of `symbol`.
    pub fn coefficients_in(&self, symbol: &VarSymbol) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, BTreeMap<Monomial, BigRational>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (rest, e) = m.split_off(symbol);
            out.entry(e).or_default().insert(rest, c.clone());
        }
        out.into_iter()
            .map(|(e, terms)| (e, Self::from_map_unchecked(self.ring.clone(), terms)))
            .collect()
    }

    /// Applies a symbol renaming to every monomial.
    pub fn rename(&self, f: impl Fn(&VarSymbol) -> VarSymbol) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (m.rename(&f), c.clone()));
        Self::from_terms(self.ring.clone(), terms).expect("renaming keeps coefficients")
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        use num_integer::Integer;
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

pub(crate) fn pow_rational(x: &BigRational, e: u32) -> BigRational {
    num_traits::pow::pow(x.clone(), e as usize)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self, self.ring)
    }
}

fn expect_compatible<T>(r: Result<T, AlgebraError>) -> T {
    r.unwrap_or_else(|e| panic!("{e}"))
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            /// Panics if the coefficient rings are incompatible; use the
            /// `try_` form to handle that case.
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                expect_compatible(self.$checked(rhs))
            }
        }
        impl $trait<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                expect_compatible(self.$checked(&rhs))
            }
        }
        impl $trait<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                expect_compatible(self.$checked(rhs))
            }
        }
        impl $trait<Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                expect_compatible(self.$checked(&rhs))
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.neg_ref()
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> CoeffRing {
        CoeffRing::integers()
    }

    fn v(name: &str) -> Polynomial {
        Polynomial::var(z(), &name.parse().unwrap())
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn s(name: &str) -> VarSymbol {
        name.parse().unwrap()
    }

    #[test]
    fn additive_identity_and_inverse() {
        let p = &v("x") * &v("y") + v("z");
        assert_eq!(&p + &Polynomial::zero(z()), p);
        assert!((v("x") - v("x")).is_zero());
        let sum = (v("x") + v("y")) + &v("x") * &v("y");
        assert_eq!(sum.to_string(), "x + y + x*y");
    }

    #[test]
    fn difference_of_squares() {
        let p = (v("x") + v("y")) * (v("x") - v("y"));
        assert_eq!(p.to_string(), "x^2 - y^2");
        assert_eq!(&p * &Polynomial::one(z()), p);
    }

    #[test]
    fn incompatible_rings_are_rejected() {
        let half = Polynomial::constant(CoeffRing::localized_at(2).unwrap(), q(1, 2)).unwrap();
        let third = Polynomial::constant(CoeffRing::localized_at(3).unwrap(), q(1, 3)).unwrap();
        assert!(matches!(half.try_add(&third), Err(AlgebraError::IncompatibleRings { .. })));
        assert!(matches!(half.try_mul(&third), Err(AlgebraError::IncompatibleRings { .. })));
        let mixed = half.try_add(&v("x")).unwrap();
        assert_eq!(mixed.ring(), &CoeffRing::localized_at(2).unwrap());
        assert!(Polynomial::constant(z(), q(1, 2)).is_err());
    }

    #[test]
    fn substitution_examples() {
        let x2 = v("x").pow(2);
        let b = BTreeMap::from([(s("x"), v("y") + Polynomial::one(z()))]);
        assert_eq!(x2.substitute(&b).unwrap().to_string(), "1 + 2*y + y^2");
        assert_eq!(x2.substitute(&BTreeMap::new()).unwrap(), x2);
        let xy = &v("x") * &v("y");
        let kill = BTreeMap::from([(s("x"), Polynomial::zero(z()))]);
        assert!(xy.substitute(&kill).unwrap().is_zero());
    }

    #[test]
    fn substitution_ring_conflict() {
        let b = BTreeMap::from([
            (s("x"), Polynomial::constant(CoeffRing::localized_at(2).unwrap(), q(1, 2)).unwrap()),
            (s("y"), Polynomial::constant(CoeffRing::localized_at(3).unwrap(), q(1, 3)).unwrap()),
        ]);
        assert!(matches!(
            v("x").substitute(&b),
            Err(AlgebraError::IncompatibleRings { .. })
        ));
    }

    #[test]
    fn evaluation_examples() {
        let point = BTreeMap::from([(s("x"), q(1, 2)), (s("y"), q(1, 3))]);
        assert_eq!((v("x") + v("y")).evaluate(&point).unwrap(), q(5, 6));
        assert_eq!(Polynomial::zero(z()).evaluate(&BTreeMap::new()).unwrap(), q(0, 1));
        let at = BTreeMap::from([(s("x"), q(-3, 1))]);
        assert_eq!(v("x").pow(2).evaluate(&at).unwrap(), q(9, 1));
        assert!(matches!(
            v("w").evaluate(&point),
            Err(AlgebraError::UnboundVariable(_))
        ));
    }

    #[test]
    fn kill_examples() {
        let p = v("x") + &v("x") * &v("z");
        let z_sym = s("z");
        assert_eq!(p.kill_monomials(|m| m.exponent(&z_sym) > 0), v("x"));
        assert_eq!(p.kill_monomials(|_| false), p);
        assert!(p.kill_monomials(|_| true).is_zero());
    }

    #[test]
    fn coefficients_in_splits_by_power() {
        let p = &v("x").pow(2) * &v("y") + v("y") + v("x").scale_int(3);
        let parts = p.coefficients_in(&s("x"));
        assert_eq!(parts[&0], v("y"));
        assert_eq!(parts[&1], Polynomial::integer(z(), 3));
        assert_eq!(parts[&2], v("y"));
        assert_eq!(p.degree_in(&s("x")), 2);
    }

    #[test]
    fn display_handles_signs_and_fractions() {
        let r = CoeffRing::localized_at(2).unwrap();
        let p = Polynomial::from_terms(
            r,
            [
                (Monomial::one(), q(-1, 2)),
                (Monomial::var(&s("x")), q(-1, 1)),
                (Monomial::power(&s("y"), 3), q(3, 4)),
            ],
        )
        .unwrap();
        assert_eq!(p.to_string(), "-1/2 - x + 3/4*y^3");
        assert_eq!(Polynomial::zero(z()).to_string(), "0");
    }
}
