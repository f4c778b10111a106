//! Formal group laws over the free symmetric presentation of the Lazard ring
//! and the series built from them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use crate::algebra::{pow_rational, AlgebraError, CoeffRing, Monomial, Polynomial, VarSymbol};
use crate::series::{SeriesError, SeriesExp, SeriesVar, TruncatedSeries};

use SeriesVar::{U, V, W};

/// Which coefficients `a[i][j]` (with `i, j >= 1`) the law carries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FglMode {
    /// Free symbols `a[i][j]` with `a[j][i]` identified to `a[i][j]`.
    UniversalSymmetric,
    /// `F(u,v) = u + v`.
    Additive,
    /// `F(u,v) = u + v + beta*u*v`.
    Multiplicative(Polynomial),
    /// Explicit table keyed by `(i, j)`; absent entries are zero.
    Custom(BTreeMap<(u32, u32), Polynomial>),
}

impl FglMode {
    pub fn custom(table: BTreeMap<(u32, u32), Polynomial>) -> Result<Self, SeriesError> {
        for &(i, j) in table.keys() {
            if i == 0 || j == 0 {
                return Err(SeriesError::InvalidParameter {
                    name: "coefficient index",
                    value: 0,
                });
            }
        }
        Ok(FglMode::Custom(table))
    }

    /// Coefficient of `u^i v^j` for `i, j >= 1`.
    pub fn coefficient(&self, i: u32, j: u32) -> Polynomial {
        let z = CoeffRing::integers();
        match self {
            FglMode::UniversalSymmetric => Polynomial::var(z, &lazard_symbol(i, j)),
            FglMode::Additive => Polynomial::zero(z),
            FglMode::Multiplicative(beta) if i == 1 && j == 1 => beta.clone(),
            FglMode::Multiplicative(beta) => Polynomial::zero(beta.ring().clone()),
            FglMode::Custom(table) => table.get(&(i, j)).cloned().unwrap_or_else(|| Polynomial::zero(z)),
        }
    }
}

/// The symbol `a[min(i,j)][max(i,j)]`.
pub fn lazard_symbol(i: u32, j: u32) -> VarSymbol {
    VarSymbol::new("a", [i.min(j), i.max(j)])
}

fn is_lazard(symbol: &VarSymbol) -> bool {
    symbol.family() == "a" && symbol.indices().len() == 2
}

/// Sends every `a[i][j]` to zero.
pub fn specialize_additive(p: &Polynomial) -> Polynomial {
    p.kill_monomials(|m| m.iter().any(|(s, _)| is_lazard(s)))
}

/// Sends `a[1][1]` to `beta` and every other `a[i][j]` to zero.
pub fn specialize_multiplicative(p: &Polynomial, beta: &Polynomial) -> Result<Polynomial, AlgebraError> {
    let a11 = lazard_symbol(1, 1);
    let killed = p.kill_monomials(|m| m.iter().any(|(s, _)| is_lazard(s) && *s != a11));
    killed.substitute(&BTreeMap::from([(a11, beta.clone())]))
}

fn check_positive(name: &'static str, value: u32) -> Result<(), SeriesError> {
    if value == 0 {
        Err(SeriesError::InvalidParameter { name, value })
    } else {
        Ok(())
    }
}

/// `F(u,v) = u + v + sum a[i][j] u^i v^j`, truncated at total degree `order`.
pub fn universal_fgl(mode: &FglMode, order: u32) -> Result<TruncatedSeries, SeriesError> {
    let z = CoeffRing::integers();
    let mut coeffs = vec![
        (SeriesExp([1, 0, 0]), Polynomial::one(z.clone())),
        (SeriesExp([0, 1, 0]), Polynomial::one(z.clone())),
    ];
    for i in 1..order {
        for j in 1..=order - i {
            coeffs.push((SeriesExp([i, j, 0]), mode.coefficient(i, j)));
        }
    }
    TruncatedSeries::from_coeffs(&[U, V], order, z, coeffs)
}

/// The series `g(u)` with `F(u, g(u)) = 0`, solved one degree at a time.
pub fn inverse_series(mode: &FglMode, order: u32) -> Result<TruncatedSeries, SeriesError> {
    let f = universal_fgl(mode, order)?;
    let mut coeffs = vec![(SeriesExp::of(U, 1), Polynomial::integer(CoeffRing::integers(), -1))];
    for k in 2..=order {
        let gamma = TruncatedSeries::from_coeffs(&[U], k, f.ring().clone(), coeffs.clone())?;
        let residue = f.truncate(k)?.compose(V, &gamma)?.coeff_of(U, k);
        // d/dv F(u,v) at v = 0 is 1 + O(u), so the u^k coefficient of
        // F(u, gamma + t u^k) is residue + t.
        coeffs.push((SeriesExp::of(U, k), -residue));
    }
    TruncatedSeries::from_coeffs(&[U], order, f.ring().clone(), coeffs)
}

/// `F(u, g(v))`.
pub fn f_minus(mode: &FglMode, order: u32) -> Result<TruncatedSeries, SeriesError> {
    let f = universal_fgl(mode, order)?;
    let gamma_v = inverse_series(mode, order)?.rename(&[(U, V)]);
    f.compose(V, &gamma_v)
}

/// `F(u, F(u, ... F(u, u)))` with `n - 1` applications of `F`.
pub fn n_fold_sum(n: u32, mode: &FglMode, order: u32) -> Result<TruncatedSeries, SeriesError> {
    check_positive("n", n)?;
    let f = universal_fgl(mode, order)?;
    let mut acc = TruncatedSeries::variable(U, order)?;
    for _ in 1..n {
        acc = f.compose(V, &acc)?;
    }
    Ok(acc)
}

/// Compositional inverse of `F^n(u)` over `Z[1/n]`.
///
/// The coefficients `b_i` come from the triangular system
/// `[u^i] sum_k b_k (F^n)^k = [i == 1]`, whose diagonal entry is `n^i`.
/// Both round trips are checked before returning.
pub fn division_series(n: u32, mode: &FglMode, order: u32) -> Result<TruncatedSeries, SeriesError> {
    check_positive("n", n)?;
    let ring = CoeffRing::localized_at(n as u64)?;
    let fn_u = n_fold_sum(n, mode, order)?;
    let ring = ring.join(fn_u.ring())?;
    let inv_n = BigRational::new(BigInt::one(), BigInt::from(n));

    let mut powers = vec![fn_u.clone()];
    let mut b: Vec<Polynomial> = Vec::with_capacity(order as usize);
    for i in 1..=order {
        let bi = if i == 1 {
            Polynomial::constant(ring.clone(), inv_n.clone())?
        } else {
            while powers.len() < i as usize - 1 {
                let next = powers.last().expect("nonempty").mul(&fn_u)?;
                powers.push(next);
            }
            let mut acc = Polynomial::zero(ring.clone());
            for (k, bk) in b.iter().enumerate() {
                acc = acc.try_add(&bk.try_mul(&powers[k].coeff_of(U, i))?)?;
            }
            (-acc).scale(&pow_rational(&inv_n, i))?
        };
        b.push(bi);
    }
    let div = TruncatedSeries::from_coeffs(
        &[U],
        order,
        ring.clone(),
        b.into_iter().enumerate().map(|(k, bk)| (SeriesExp::of(U, k as u32 + 1), bk)),
    )?;

    let u = TruncatedSeries::from_coeffs(&[U], order, ring, [(SeriesExp::of(U, 1), Polynomial::one(CoeffRing::integers()))])?;
    if div.compose(U, &fn_u)? != u || fn_u.compose(U, &div)? != u {
        return Err(SeriesError::RoundTripFailed(order));
    }
    Ok(div)
}

/// Nonzero coefficients of `F(F(u,v),w) - F(u,F(v,w))` in the universal
/// symmetric law, in graded-lexicographic exponent order.
pub fn associativity_relations(order: u32) -> Result<Vec<(SeriesExp, Polynomial)>, SeriesError> {
    if order < 3 {
        return Err(SeriesError::InvalidParameter { name: "order", value: order });
    }
    let f = universal_fgl(&FglMode::UniversalSymmetric, order)?;
    let left = f.rename(&[(V, W)]).compose(U, &f)?;
    let right = f.compose(V, &f.rename(&[(U, V), (V, W)]))?;
    let diff = left.sub(&right)?;
    Ok(diff.coeffs().map(|(e, c)| (*e, c.clone())).collect())
}

/// Turns a one-variable series into a polynomial in `c`, dropping every
/// power of `c` above `d`.
pub fn eval_dim_truncated(series: &TruncatedSeries, c: &VarSymbol, d: u32) -> Result<Polynomial, SeriesError> {
    let var = series.single_var()?;
    let mut out = Polynomial::zero(series.ring().clone());
    for (e, coeff) in series.coeffs() {
        let k = e.get(var);
        if k > d {
            continue;
        }
        let term = Polynomial::term(series.ring().clone(), Monomial::power(c, k), BigRational::one())?;
        out = out.try_add(&term.try_mul(coeff)?)?;
    }
    Ok(out)
}

/// For each nonzero coefficient `b_i` of a one-variable series, the least `k`
/// with `n^k b_i` free of denominators.
pub fn denominator_profile(series: &TruncatedSeries, n: u64) -> Result<Vec<(u32, u32)>, SeriesError> {
    let var = series.single_var()?;
    let n_big = BigInt::from(n);
    let mut out = Vec::new();
    for (e, coeff) in series.coeffs() {
        let mut den = coeff.denominator_lcm();
        let mut k = 0;
        while !den.is_one() {
            let g = den.gcd(&n_big);
            if g.is_one() {
                return Err(SeriesError::NotLocalizedAt(format!("{var}^{}", e.get(var)), n));
            }
            den /= g;
            k += 1;
        }
        out.push((e.get(var), k));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> CoeffRing {
        CoeffRing::integers()
    }

    fn a(i: u32, j: u32) -> Polynomial {
        Polynomial::var(z(), &lazard_symbol(i, j))
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn universal_order_two() {
        let f = universal_fgl(&FglMode::UniversalSymmetric, 2).unwrap();
        let want = TruncatedSeries::from_coeffs(
            &[U, V],
            2,
            z(),
            [
                (SeriesExp([1, 0, 0]), Polynomial::one(z())),
                (SeriesExp([0, 1, 0]), Polynomial::one(z())),
                (SeriesExp([1, 1, 0]), a(1, 1)),
            ],
        )
        .unwrap();
        assert_eq!(f, want);
        assert_eq!(f.coeff(SeriesExp([1, 2, 0])), Polynomial::zero(z()));
    }

    #[test]
    fn additive_and_multiplicative_shapes() {
        let f = universal_fgl(&FglMode::Additive, 5).unwrap();
        assert_eq!(f.coeffs().count(), 2);
        let beta = Polynomial::var(z(), &VarSymbol::plain("beta"));
        let m = universal_fgl(&FglMode::Multiplicative(beta.clone()), 3).unwrap();
        assert_eq!(m.coeffs().count(), 3);
        assert_eq!(m.coeff(SeriesExp([1, 1, 0])), beta);
    }

    #[test]
    fn inverse_second_coefficient_by_hand() {
        // F(u, -u + g2 u^2) at u^2: g2 + a11 * (-1) = 0
        let g = inverse_series(&FglMode::UniversalSymmetric, 3).unwrap();
        assert_eq!(g.coeff_of(U, 1), Polynomial::integer(z(), -1));
        assert_eq!(g.coeff_of(U, 2), a(1, 1));
    }

    #[test]
    fn two_fold_sum_by_direct_expansion() {
        // F(u,u) = 2u + a11 u^2 + 2 a12 u^3 + ...
        let f2 = n_fold_sum(2, &FglMode::UniversalSymmetric, 3).unwrap();
        assert_eq!(f2.coeff_of(U, 1), Polynomial::integer(z(), 2));
        assert_eq!(f2.coeff_of(U, 2), a(1, 1));
        assert_eq!(f2.coeff_of(U, 3), a(1, 2).scale_int(2));
    }

    #[test]
    fn division_in_additive_mode_is_u_over_n() {
        let d = division_series(3, &FglMode::Additive, 5).unwrap();
        assert_eq!(d.coeffs().count(), 1);
        assert_eq!(d.coeff_of(U, 1).constant_term(), q(1, 3));
        assert_eq!(denominator_profile(&d, 3).unwrap(), vec![(1, 1)]);
    }

    #[test]
    fn division_b2_formula() {
        // b2 = -(b1 [u^2]F^2) / 4 = -a11/8
        let d = division_series(2, &FglMode::UniversalSymmetric, 4).unwrap();
        let want = a(1, 1).embed(d.ring()).unwrap().scale(&q(-1, 8)).unwrap();
        assert_eq!(d.coeff_of(U, 2), want);
    }

    #[test]
    fn relations_need_order_three() {
        assert!(associativity_relations(2).is_err());
        // symmetry already forces associativity through degree 3
        assert!(associativity_relations(3).unwrap().is_empty());
        let rels = associativity_relations(4).unwrap();
        assert!(!rels.is_empty());
        assert!(rels.iter().all(|(e, _)| e.degree() == 4));
    }

    #[test]
    fn dimension_truncation() {
        let c = VarSymbol::plain("c");
        let f3 = n_fold_sum(3, &FglMode::UniversalSymmetric, 4).unwrap();
        assert_eq!(eval_dim_truncated(&f3, &c, 1).unwrap(), Polynomial::var(z(), &c).scale_int(3));
    }

    #[test]
    fn zero_parameters_are_rejected() {
        assert!(n_fold_sum(0, &FglMode::Additive, 3).is_err());
        assert!(universal_fgl(&FglMode::Additive, 0).is_err());
        assert!(FglMode::custom(BTreeMap::from([((0, 2), a(1, 1))])).is_err());
    }
}
