//! The free ring on `X_i, Y_j, U^p_k, V^q_l` and the polynomials `E_n`,
//! `F_n`, `G_{n,m}` of generalized double point relations.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::algebra::{AlgebraError, CoeffRing, Monomial, Polynomial, VarSymbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GdprError {
    #[error("index must be at least 1")]
    ZeroIndex,
    #[error("superscript {0} is not in 1..=3")]
    BadSuperscript(u32),
    #[error("padding needs N >= n and M >= m, got N={big_n}, M={big_m}, n={n}, m={m}")]
    BadPadding { big_n: u32, big_m: u32, n: u32, m: u32 },
    #[error("{0} is not a GDPR variable")]
    NotGdprVariable(VarSymbol),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// One of the two divisor families. `X` pairs with `U`, `Y` with `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    X,
    Y,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::X => Side::Y,
            Side::Y => Side::X,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GdprVar {
    X(u32),
    Y(u32),
    U(u32, u32),
    V(u32, u32),
}

impl GdprVar {
    /// The divisor variable of `side` with index `i`.
    pub fn divisor(side: Side, i: u32) -> Self {
        match side {
            Side::X => GdprVar::X(i),
            Side::Y => GdprVar::Y(i),
        }
    }

    /// The tower variable `U^p_k` or `V^p_k` of `side`.
    pub fn tower(side: Side, p: u32, k: u32) -> Self {
        match side {
            Side::X => GdprVar::U(p, k),
            Side::Y => GdprVar::V(p, k),
        }
    }

    pub fn side(&self) -> Side {
        match self {
            GdprVar::X(_) | GdprVar::U(..) => Side::X,
            GdprVar::Y(_) | GdprVar::V(..) => Side::Y,
        }
    }

    pub fn index(&self) -> u32 {
        match *self {
            GdprVar::X(i) | GdprVar::Y(i) | GdprVar::U(_, i) | GdprVar::V(_, i) => i,
        }
    }

    pub fn symbol(&self) -> VarSymbol {
        match *self {
            GdprVar::X(i) => VarSymbol::new("X", [i]),
            GdprVar::Y(i) => VarSymbol::new("Y", [i]),
            GdprVar::U(p, k) => VarSymbol::new("U", [p, k]),
            GdprVar::V(p, k) => VarSymbol::new("V", [p, k]),
        }
    }

    pub fn from_symbol(symbol: &VarSymbol) -> Result<Self, GdprError> {
        let bad = || GdprError::NotGdprVariable(symbol.clone());
        let v = match (symbol.family(), symbol.indices()) {
            ("X", &[i]) => GdprVar::X(i),
            ("Y", &[i]) => GdprVar::Y(i),
            ("U", &[p, k]) => GdprVar::U(p, k),
            ("V", &[p, k]) => GdprVar::V(p, k),
            _ => return Err(bad()),
        };
        v.validate().map_err(|_| bad())?;
        Ok(v)
    }

    fn validate(&self) -> Result<(), GdprError> {
        if let GdprVar::U(p, _) | GdprVar::V(p, _) = *self {
            if !(1..=3).contains(&p) {
                return Err(GdprError::BadSuperscript(p));
            }
        }
        if self.index() == 0 {
            return Err(GdprError::ZeroIndex);
        }
        Ok(())
    }

    /// Grading: divisors weigh 1, `U^1` weighs -1, `U^2` and `U^3` weigh -2.
    pub fn weight(&self) -> i64 {
        match *self {
            GdprVar::X(_) | GdprVar::Y(_) => 1,
            GdprVar::U(1, _) | GdprVar::V(1, _) => -1,
            GdprVar::U(..) | GdprVar::V(..) => -2,
        }
    }

    /// `X <-> Y`, `U <-> V`.
    pub fn swapped(&self) -> Self {
        match *self {
            GdprVar::X(i) => GdprVar::Y(i),
            GdprVar::Y(i) => GdprVar::X(i),
            GdprVar::U(p, k) => GdprVar::V(p, k),
            GdprVar::V(p, k) => GdprVar::U(p, k),
        }
    }

    pub fn poly(&self) -> Polynomial {
        Polynomial::var(CoeffRing::integers(), &self.symbol())
    }
}

impl fmt::Display for GdprVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.symbol().fmt(f)
    }
}

fn divisor_sum(side: Side, n: u32) -> Polynomial {
    (1..=n).fold(Polynomial::zero(CoeffRing::integers()), |acc, i| {
        acc + GdprVar::divisor(side, i).poly()
    })
}

/// Memo table for `E_n`, `F_n` of one side.
#[derive(Clone, Debug)]
pub struct Recursion {
    side: Side,
    e: Vec<Polynomial>,
    f: Vec<Polynomial>,
}

impl Recursion {
    pub fn new(side: Side) -> Self {
        let zero = Polynomial::zero(CoeffRing::integers());
        Self {
            side,
            e: vec![zero.clone()],
            f: vec![zero],
        }
    }

    fn extend_to(&mut self, n: u32) {
        while (self.e.len() as u32) < n {
            let k = self.e.len() as u32 + 1;
            let (e, f) = step(self.side, k, &self.e[k as usize - 2], &self.f[k as usize - 2]);
            self.e.push(e);
            self.f.push(f);
        }
    }

    pub fn e(&mut self, n: u32) -> Result<Polynomial, GdprError> {
        check_index(n)?;
        self.extend_to(n);
        Ok(self.e[n as usize - 1].clone())
    }

    pub fn f(&mut self, n: u32) -> Result<Polynomial, GdprError> {
        check_index(n)?;
        self.extend_to(n);
        Ok(self.f[n as usize - 1].clone())
    }
}

fn check_index(n: u32) -> Result<(), GdprError> {
    if n == 0 {
        Err(GdprError::ZeroIndex)
    } else {
        Ok(())
    }
}

/// `(E_n, F_n)` from `(E_{n-1}, F_{n-1})`, for `n >= 2`.
fn step(side: Side, n: u32, e_prev: &Polynomial, f_prev: &Polynomial) -> (Polynomial, Polynomial) {
    let xn = GdprVar::divisor(side, n).poly();
    let t = divisor_sum(side, n - 1) + e_prev;
    let t_xn = &t * &xn;
    let u1 = GdprVar::tower(side, 1, n - 1).poly();
    let u23 = GdprVar::tower(side, 2, n).poly() - GdprVar::tower(side, 3, n).poly();
    let e = e_prev - &t_xn * &u1 - &xn * f_prev;
    let f = f_prev + &t_xn * &u23;
    (e, f)
}

/// `(E_n, F_n)` by plain recursion, without any table.
pub fn build_ef_unmemoized(side: Side, n: u32) -> Result<(Polynomial, Polynomial), GdprError> {
    check_index(n)?;
    if n == 1 {
        let zero = Polynomial::zero(CoeffRing::integers());
        return Ok((zero.clone(), zero));
    }
    let (e, _) = build_ef_unmemoized(side, n - 1)?;
    let (_, f) = build_ef_unmemoized(side, n - 1)?;
    Ok(step(side, n, &e, &f))
}

pub fn build_e(side: Side, n: u32) -> Result<Polynomial, GdprError> {
    Recursion::new(side).e(n)
}

pub fn build_f(side: Side, n: u32) -> Result<Polynomial, GdprError> {
    Recursion::new(side).f(n)
}

/// Both families' memo tables, for building many `G` values.
#[derive(Clone, Debug)]
pub struct GdprBuilder {
    x: Recursion,
    y: Recursion,
}

impl Default for GdprBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl GdprBuilder {
    pub fn new() -> Self {
        Self {
            x: Recursion::new(Side::X),
            y: Recursion::new(Side::Y),
        }
    }

    fn table(&mut self, side: Side) -> &mut Recursion {
        match side {
            Side::X => &mut self.x,
            Side::Y => &mut self.y,
        }
    }

    pub fn e(&mut self, side: Side, n: u32) -> Result<Polynomial, GdprError> {
        self.table(side).e(n)
    }

    pub fn f(&mut self, side: Side, n: u32) -> Result<Polynomial, GdprError> {
        self.table(side).f(n)
    }

    /// `G^side_{n,m}` in factored form; `n` counts the variables of `side`,
    /// `m` those of the other family.
    pub fn g_parts(&mut self, side: Side, n: u32, m: u32) -> Result<GParts, GdprError> {
        let own_e = self.e(side, n)?;
        let own_f = self.f(side, n)?;
        let other_e = self.e(side.other(), m)?;
        Ok(GParts {
            head: divisor_sum(side, n) + own_e,
            cofactor: divisor_sum(side.other(), m) + other_e,
            factor: own_f,
        })
    }

    /// Swapping `X <-> Y`, `U <-> V` in `G^X_{n,m}` gives `G^Y_{n,m}`.
    pub fn mirror_check(&mut self, n: u32, m: u32) -> Result<bool, GdprError> {
        let swapped = self.g_parts(Side::X, n, m)?.swap_sides()?;
        Ok(swapped.same_expansion(&self.g_parts(Side::Y, n, m)?))
    }

    /// `G^X_{N,M}` reduces to `G^X_{n,m}` once out-of-range divisors are
    /// killed, and likewise `G^Y_{M,N}` to `G^Y_{m,n}`.
    pub fn padding_check(&mut self, big_n: u32, big_m: u32, n: u32, m: u32) -> Result<bool, GdprError> {
        if n == 0 || m == 0 || big_n < n || big_m < m {
            return Err(GdprError::BadPadding { big_n, big_m, n, m });
        }
        let x_ok = self
            .g_parts(Side::X, big_n, big_m)?
            .kill_out_of_range(n, m)
            .same_expansion(&self.g_parts(Side::X, n, m)?);
        let y_ok = self
            .g_parts(Side::Y, big_m, big_n)?
            .kill_out_of_range(n, m)
            .same_expansion(&self.g_parts(Side::Y, m, n)?);
        Ok(x_ok && y_ok)
    }

    /// `G^side_{n,m}` fully expanded.
    pub fn g(&mut self, side: Side, n: u32, m: u32) -> Result<Polynomial, GdprError> {
        Ok(self.g_parts(side, n, m)?.expand())
    }
}

/// `G = head + cofactor * factor`, where `head` and `factor` use only the
/// variables of one family and `cofactor` only those of the other.
///
/// Every monomial of `cofactor` contains a divisor of its family, so the
/// monomials of the expansion are exactly those of `head` together with the
/// products of one monomial from each factor, with no cancellation. The
/// checks below rely on this and never expand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GParts {
    pub head: Polynomial,
    pub cofactor: Polynomial,
    pub factor: Polynomial,
}

impl GParts {
    pub fn expand(&self) -> Polynomial {
        &self.head + &(&self.cofactor * &self.factor)
    }

    /// Number of terms of the expansion.
    pub fn term_count(&self) -> usize {
        self.head.len() + self.cofactor.len() * self.factor.len()
    }

    /// The polynomials whose monomials make up the expansion.
    fn pieces(&self) -> Vec<&Polynomial> {
        if self.cofactor.is_zero() || self.factor.is_zero() {
            vec![&self.head]
        } else {
            vec![&self.head, &self.cofactor, &self.factor]
        }
    }

    pub fn check_multilinear(&self) -> Result<bool, GdprError> {
        for p in self.pieces() {
            if !check_multilinear(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn check_index_bounds(&self, n: u32, m: u32) -> Result<bool, GdprError> {
        for p in self.pieces() {
            if !check_index_bounds(p, n, m)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every monomial of the expansion has weight 1.
    pub fn weight_check(&self) -> Result<bool, GdprError> {
        if !is_homogeneous(&self.head, 1)? {
            return Ok(false);
        }
        let a = weights(&self.cofactor)?;
        let b = weights(&self.factor)?;
        if a.is_empty() || b.is_empty() {
            return Ok(true);
        }
        Ok(a.len() == 1 && b.len() == 1 && a[0] + b[0] == 1)
    }

    pub fn swap_sides(&self) -> Result<GParts, GdprError> {
        Ok(GParts {
            head: swap_sides(&self.head)?,
            cofactor: swap_sides(&self.cofactor)?,
            factor: swap_sides(&self.factor)?,
        })
    }

    pub fn kill_out_of_range(&self, n: u32, m: u32) -> GParts {
        GParts {
            head: kill_out_of_range(&self.head, n, m),
            cofactor: kill_out_of_range(&self.cofactor, n, m),
            factor: kill_out_of_range(&self.factor, n, m),
        }
    }

    /// Equality of expansions. Equal parts decide it at once; otherwise both
    /// sides are expanded.
    pub fn same_expansion(&self, other: &GParts) -> bool {
        self == other || self.expand() == other.expand()
    }

    /// Exact value at a point binding every variable.
    pub fn evaluate(
        &self,
        point: &BTreeMap<VarSymbol, BigRational>,
    ) -> Result<BigRational, AlgebraError> {
        Ok(self.head.evaluate(point)? + self.cofactor.evaluate(point)? * self.factor.evaluate(point)?)
    }
}

fn weights(p: &Polynomial) -> Result<Vec<i64>, GdprError> {
    let mut w: Vec<i64> = p.terms().map(|(m, _)| monomial_weight(m)).collect::<Result<_, _>>()?;
    w.sort_unstable();
    w.dedup();
    Ok(w)
}

pub fn build_g_parts(side: Side, n: u32, m: u32) -> Result<GParts, GdprError> {
    GdprBuilder::new().g_parts(side, n, m)
}

pub fn build_g(side: Side, n: u32, m: u32) -> Result<Polynomial, GdprError> {
    GdprBuilder::new().g(side, n, m)
}

fn gdpr_vars(m: &Monomial) -> impl Iterator<Item = (Result<GdprVar, GdprError>, u32)> + '_ {
    m.iter().map(|(s, e)| (GdprVar::from_symbol(s), e))
}

/// Every `X_i` and `Y_j` appears with exponent at most 1.
pub fn check_multilinear(g: &Polynomial) -> Result<bool, GdprError> {
    for (m, _) in g.terms() {
        for (v, e) in gdpr_vars(m) {
            if matches!(v?, GdprVar::X(_) | GdprVar::Y(_)) && e > 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `X`/`U` indices are at most `n` and `Y`/`V` indices at most `m`.
pub fn check_index_bounds(g: &Polynomial, n: u32, m: u32) -> Result<bool, GdprError> {
    for (mono, _) in g.terms() {
        for (v, _) in gdpr_vars(mono) {
            let v = v?;
            let bound = match v.side() {
                Side::X => n,
                Side::Y => m,
            };
            if v.index() > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Total weight of a monomial under [`GdprVar::weight`].
pub fn monomial_weight(m: &Monomial) -> Result<i64, GdprError> {
    let mut total = 0;
    for (v, e) in gdpr_vars(m) {
        total += v?.weight() * e as i64;
    }
    Ok(total)
}

/// Every monomial has weight `target`.
pub fn is_homogeneous(g: &Polynomial, target: i64) -> Result<bool, GdprError> {
    for (m, _) in g.terms() {
        if monomial_weight(m)? != target {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn weight_check(g: &Polynomial) -> Result<bool, GdprError> {
    is_homogeneous(g, 1)
}

/// Applies `X <-> Y`, `U <-> V` to a GDPR polynomial.
pub fn swap_sides(g: &Polynomial) -> Result<Polynomial, GdprError> {
    for s in g.variables() {
        GdprVar::from_symbol(&s)?;
    }
    Ok(g.rename(|s| {
        GdprVar::from_symbol(s)
            .expect("checked above")
            .swapped()
            .symbol()
    }))
}

pub fn mirror_check(n: u32, m: u32) -> Result<bool, GdprError> {
    GdprBuilder::new().mirror_check(n, m)
}

/// Drops every term containing an `X_i` with `i > n` or a `Y_j` with `j > m`.
pub fn kill_out_of_range(g: &Polynomial, n: u32, m: u32) -> Polynomial {
    g.kill_monomials(|mono| {
        mono.iter().any(|(s, _)| match GdprVar::from_symbol(s) {
            Ok(GdprVar::X(i)) => i > n,
            Ok(GdprVar::Y(j)) => j > m,
            _ => false,
        })
    })
}

/// `G^X_{N,M}` reduces to `G^X_{n,m}` once out-of-range divisors are killed,
/// and likewise `G^Y_{M,N}` to `G^Y_{m,n}`.
pub fn padding_check(big_n: u32, big_m: u32, n: u32, m: u32) -> Result<bool, GdprError> {
    GdprBuilder::new().padding_check(big_n, big_m, n, m)
}

/// Integer values for every variable, keyed by symbol, for quick numeric
/// evaluation of GDPR polynomials.
pub fn uniform_point(n: u32, m: u32, value: impl Fn(GdprVar) -> i64) -> BTreeMap<VarSymbol, BigRational> {
    let mut out = BTreeMap::new();
    for (side, bound) in [(Side::X, n), (Side::Y, m)] {
        for i in 1..=bound {
            let mut vars = vec![GdprVar::divisor(side, i)];
            vars.extend((1..=3).map(|p| GdprVar::tower(side, p, i)));
            for v in vars {
                out.insert(v.symbol(), BigRational::from_integer(value(v).into()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u32) -> Polynomial {
        GdprVar::X(i).poly()
    }
    fn y(i: u32) -> Polynomial {
        GdprVar::Y(i).poly()
    }
    fn u(p: u32, k: u32) -> Polynomial {
        GdprVar::U(p, k).poly()
    }

    #[test]
    fn base_cases() {
        assert!(build_e(Side::X, 1).unwrap().is_zero());
        assert!(build_f(Side::X, 1).unwrap().is_zero());
        assert_eq!(build_e(Side::X, 2).unwrap(), -(x(1) * x(2) * u(1, 1)));
        assert_eq!(build_f(Side::X, 2).unwrap(), x(1) * x(2) * (u(2, 2) - u(3, 2)));
    }

    #[test]
    fn explicit_gdpr_2_1() {
        let gx = build_g(Side::X, 2, 1).unwrap();
        let want = x(1) + x(2) - x(1) * x(2) * u(1, 1) + y(1) * x(1) * x(2) * (u(2, 2) - u(3, 2));
        assert_eq!(gx, want);
        assert_eq!(build_g(Side::Y, 1, 2).unwrap(), y(1));
        assert_eq!(build_g(Side::X, 1, 1).unwrap(), x(1));
    }

    #[test]
    fn simple_checks() {
        assert!(!check_multilinear(&(x(1) * x(1))).unwrap());
        assert!(check_multilinear(&Polynomial::zero(CoeffRing::integers())).unwrap());
        assert!(!check_index_bounds(&x(4), 3, 3).unwrap());
        assert!(weight_check(&(x(1) * x(2) * u(1, 1))).unwrap());
        assert!(!weight_check(&(x(1) * x(2))).unwrap());
        assert!(mirror_check(1, 1).unwrap());
        assert!(padding_check(4, 3, 2, 1).unwrap());
        assert!(padding_check(2, 1, 3, 1).is_err());
    }

    #[test]
    fn symbols_round_trip() {
        for v in [GdprVar::X(3), GdprVar::Y(1), GdprVar::U(2, 4), GdprVar::V(3, 1)] {
            assert_eq!(GdprVar::from_symbol(&v.symbol()).unwrap(), v);
        }
        assert_eq!(GdprVar::U(2, 3).to_string(), "U[2][3]");
        assert!(GdprVar::from_symbol(&VarSymbol::new("U", [4, 1])).is_err());
        assert!(GdprVar::from_symbol(&VarSymbol::new("X", [0])).is_err());
        assert!(GdprVar::from_symbol(&VarSymbol::plain("cA")).is_err());
    }
}
