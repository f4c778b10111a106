//! The fixed-point homomorphism `F'` on the GDPR ring, with goodness of
//! divisors decided by characters of a finite abelian group.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, CoeffRing, Polynomial, VarSymbol};
use crate::gdpr::{uniform_point, GdprBuilder, GdprError, GdprVar, Side};
use crate::opalg::{
    chern_symbol, h_expression, h_to_standard, sigma1_symbol, tower_symbol, verify_full_identity, OpalgError,
    OperatorExpr, RelationSystem, Sampling, VerificationReport,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixedPointError {
    #[error("unknown divisor {0}")]
    UnknownDivisor(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("bad character: {0}")]
    BadCharacter(String),
    #[error("bad group spec {0:?}")]
    BadGroupSpec(String),
    #[error("the A and B divisors have different total characters")]
    InconsistentContext,
    #[error("exactly one of D, A_k, D + A_k is bad")]
    ImpossibleCase,
    #[error("claim 1 case must be 1..=5, got {0}")]
    BadCase(u32),
    #[error("step {k} on side {side:?} has a bad divisor but a nonzero relation")]
    NonzeroRelation { side: Side, k: u32 },
    #[error(transparent)]
    Gdpr(#[from] GdprError),
    #[error(transparent)]
    Opalg(#[from] OpalgError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// An element of `Z/o_1 x ... x Z/o_r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    pub orders: Vec<u32>,
    pub residues: Vec<i64>,
}

impl Character {
    pub fn new(orders: Vec<u32>, residues: Vec<i64>) -> Result<Self, FixedPointError> {
        if orders.len() != residues.len() {
            return Err(FixedPointError::BadCharacter(format!(
                "{} orders but {} residues",
                orders.len(),
                residues.len()
            )));
        }
        if orders.contains(&0) {
            return Err(FixedPointError::BadCharacter("order 0".into()));
        }
        let residues = residues
            .iter()
            .zip(&orders)
            .map(|(r, &o)| r.rem_euclid(o as i64))
            .collect();
        Ok(Self { orders, residues })
    }

    pub fn trivial(orders: &[u32]) -> Self {
        Self {
            orders: orders.to_vec(),
            residues: vec![0; orders.len()],
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }

    pub fn add(&self, other: &Character) -> Result<Character, FixedPointError> {
        if self.orders != other.orders {
            return Err(FixedPointError::BadCharacter("characters of different groups".into()));
        }
        Character::new(
            self.orders.clone(),
            self.residues.iter().zip(&other.residues).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn scale(&self, k: i64) -> Character {
        Character::new(self.orders.clone(), self.residues.iter().map(|r| r * k).collect()).expect("same shape")
    }

    /// Every element of the group, in lexicographic residue order.
    pub fn all(orders: &[u32]) -> Vec<Character> {
        let mut out = vec![Character::trivial(orders)];
        for (i, &o) in orders.iter().enumerate() {
            out = out
                .into_iter()
                .flat_map(|c| {
                    (0..o as i64).map(move |r| {
                        let mut c = c.clone();
                        c.residues[i] = r;
                        c
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.residues.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Parses `Z/2`, `Z/2xZ/2`, `2x3`, `6` and the like into group orders.
pub fn parse_group(spec: &str) -> Result<Vec<u32>, FixedPointError> {
    let bad = || FixedPointError::BadGroupSpec(spec.to_string());
    let orders: Vec<u32> = spec
        .split(['x', 'X', '×', ','])
        .map(|part| {
            let part = part.trim();
            let part = part.strip_prefix("Z/").unwrap_or(part);
            part.parse::<u32>().ok().filter(|&o| o > 0).ok_or_else(bad)
        })
        .collect::<Result<_, _>>()?;
    Ok(orders)
}

/// Name of the `i`-th divisor on a side: `A3`, `B1`.
pub fn divisor_name(side: Side, i: u32) -> String {
    match side {
        Side::X => format!("A{i}"),
        Side::Y => format!("B{i}"),
    }
}

/// A formal integer combination of named divisors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DivisorSum(pub BTreeMap<String, i64>);

impl DivisorSum {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn of(name: impl Into<String>) -> Self {
        Self(BTreeMap::from([(name.into(), 1)]))
    }

    /// `A_1 + ... + A_k` on the given side.
    pub fn prefix(side: Side, k: u32) -> Self {
        Self((1..=k).map(|i| (divisor_name(side, i), 1)).collect())
    }

    pub fn plus(&self, other: &DivisorSum) -> Self {
        let mut out = self.0.clone();
        for (n, c) in &other.0 {
            *out.entry(n.clone()).or_default() += c;
        }
        Self(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodnessContext {
    pub group: Vec<u32>,
    pub basic: BTreeMap<String, Character>,
}

impl GoodnessContext {
    pub fn new(group: Vec<u32>) -> Self {
        Self {
            group,
            basic: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: impl Into<String>, residues: Vec<i64>) -> Result<Self, FixedPointError> {
        let c = Character::new(self.group.clone(), residues)?;
        self.basic.insert(name.into(), c);
        Ok(self)
    }

    /// A context for `A_1..A_n`, `B_1..B_m`; the two sides must have equal
    /// total character.
    pub fn for_gdpr(group: &[u32], a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<Self, FixedPointError> {
        let mut ctx = Self::new(group.to_vec());
        for (i, r) in a.iter().enumerate() {
            ctx = ctx.with(divisor_name(Side::X, i as u32 + 1), r.clone())?;
        }
        for (j, r) in b.iter().enumerate() {
            ctx = ctx.with(divisor_name(Side::Y, j as u32 + 1), r.clone())?;
        }
        let ta = ctx.character(&DivisorSum::prefix(Side::X, a.len() as u32))?;
        let tb = ctx.character(&DivisorSum::prefix(Side::Y, b.len() as u32))?;
        if ta != tb {
            return Err(FixedPointError::InconsistentContext);
        }
        Ok(ctx)
    }

    /// A random consistent context for `GDPR(n,m)`; `B_m` absorbs the
    /// difference.
    pub fn random(group: &[u32], n: u32, m: u32, rng: &mut impl Rng) -> Self {
        let mut draw = || group.iter().map(|&o| rng.gen_range(0..o as i64)).collect::<Vec<_>>();
        let a: Vec<_> = (0..n).map(|_| draw()).collect();
        let mut b: Vec<_> = (1..m).map(|_| draw()).collect();
        let last = (0..group.len())
            .map(|i| a.iter().map(|r| r[i]).sum::<i64>() - b.iter().map(|r| r[i]).sum::<i64>())
            .collect();
        b.push(last);
        Self::for_gdpr(group, &a, &b).expect("balanced by construction")
    }

    pub fn character(&self, sum: &DivisorSum) -> Result<Character, FixedPointError> {
        let mut total = Character::trivial(&self.group);
        for (name, &k) in &sum.0 {
            let c = self
                .basic
                .get(name)
                .ok_or_else(|| FixedPointError::UnknownDivisor(name.clone()))?;
            total = total.add(&c.scale(k))?;
        }
        Ok(total)
    }
}

pub fn is_good(ctx: &GoodnessContext, sum: &DivisorSum) -> Result<bool, FixedPointError> {
    Ok(ctx.character(sum)?.is_trivial())
}

/// True unless exactly one of `D`, `A_k`, `D + A_k` is bad.
pub fn impossible_case_guard(ctx: &GoodnessContext, d: &DivisorSum, ak: &DivisorSum) -> Result<bool, FixedPointError> {
    let bad = [d.clone(), ak.clone(), d.plus(ak)]
        .iter()
        .map(|s| is_good(ctx, s).map(|g| !g as u32))
        .sum::<Result<u32, _>>()?;
    Ok(bad != 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GuardReport {
    pub group: Vec<u32>,
    pub contexts: u64,
    pub checks: u64,
    pub pass: bool,
}

/// Every assignment of characters to `A1`, `A2`, `B1`, guarding the
/// `(D, A_k)` pairs `(0, A1)`, `(A1, A2)` and `(0, B1)`.
pub fn guard_enumeration(group: &[u32]) -> Result<GuardReport, FixedPointError> {
    let all = Character::all(group);
    let (mut contexts, mut checks, mut pass) = (0u64, 0u64, true);
    for a1 in &all {
        for a2 in &all {
            for b1 in &all {
                let ctx = GoodnessContext::new(group.to_vec())
                    .with("A1", a1.residues.clone())?
                    .with("A2", a2.residues.clone())?
                    .with("B1", b1.residues.clone())?;
                contexts += 1;
                for (d, ak) in [
                    (DivisorSum::empty(), DivisorSum::of("A1")),
                    (DivisorSum::of("A1"), DivisorSum::of("A2")),
                    (DivisorSum::empty(), DivisorSum::of("B1")),
                ] {
                    checks += 1;
                    pass &= impossible_case_guard(&ctx, &d, &ak)?;
                }
            }
        }
    }
    Ok(GuardReport {
        group: group.to_vec(),
        contexts,
        checks,
        pass,
    })
}

pub type FPrimeImage = OperatorExpr;

fn z() -> CoeffRing {
    CoeffRing::integers()
}

fn sym(s: VarSymbol) -> Polynomial {
    Polynomial::var(z(), &s)
}

fn int(k: i64) -> Polynomial {
    Polynomial::integer(z(), k)
}

/// Image of `U^p_k` (`p` in 2..=3) from the goodness of `D = A_1 + ... +
/// A_{k-1}`, `A_k` and `D + A_k`.
fn tower_image(side: Side, p: u32, k: u32, good: (bool, bool, bool)) -> Result<Polynomial, FixedPointError> {
    let base = if p == 2 { 2 } else { 1 };
    Ok(match good {
        (true, true, true) => sym(tower_symbol(side, p, k)),
        (true, false, false) => {
            let s = sym(sigma1_symbol(side, 1..k));
            if p == 2 {
                s.scale_int(2)
            } else {
                int(1) + s
            }
        }
        (false, true, false) => int(base) + sym(sigma1_symbol(side, [k])),
        (false, false, true) => int(base) + sym(sigma1_symbol(side, 1..=k)),
        (false, false, false) => int(if p == 2 { 4 } else { 3 }),
        _ => return Err(FixedPointError::ImpossibleCase),
    })
}

/// The table image of one variable in the `GDPR(n,m)` setup described by
/// `ctx`. Indices beyond `n` (or `m` on the `Y` side) map to 0.
pub fn fprime_of_var(v: GdprVar, ctx: &GoodnessContext, n: u32, m: u32) -> Result<FPrimeImage, FixedPointError> {
    let side = v.side();
    let k = v.index();
    if k == 0 {
        return Err(FixedPointError::IndexOutOfRange(v.to_string()));
    }
    if let GdprVar::U(p, _) | GdprVar::V(p, _) = v {
        if !(1..=3).contains(&p) {
            return Err(GdprError::BadSuperscript(p).into());
        }
    }
    let bound = match side {
        Side::X => n,
        Side::Y => m,
    };
    if k > bound {
        return Ok(OperatorExpr(int(0)));
    }
    let good = |s: &DivisorSum| is_good(ctx, s);
    let image = match v {
        GdprVar::X(_) | GdprVar::Y(_) => {
            if good(&DivisorSum::of(divisor_name(side, k)))? {
                sym(chern_symbol(side, k))
            } else {
                int(1)
            }
        }
        GdprVar::U(1, _) | GdprVar::V(1, _) => {
            if good(&DivisorSum::prefix(side, k))? {
                sym(sigma1_symbol(side, 1..=k))
            } else {
                int(2)
            }
        }
        GdprVar::U(p, _) | GdprVar::V(p, _) => {
            let d = DivisorSum::prefix(side, k - 1);
            let ak = DivisorSum::of(divisor_name(side, k));
            tower_image(side, p, k, (good(&d)?, good(&ak)?, good(&d.plus(&ak))?))?
        }
    };
    Ok(OperatorExpr(image))
}

/// Ring homomorphism extension of [`fprime_of_var`].
pub fn fprime_eval(g: &Polynomial, ctx: &GoodnessContext, n: u32, m: u32) -> Result<FPrimeImage, FixedPointError> {
    let mut bindings = BTreeMap::new();
    for s in g.variables() {
        let v = GdprVar::from_symbol(&s)?;
        bindings.insert(s, fprime_of_var(v, ctx, n, m)?.into_poly());
    }
    Ok(OperatorExpr(g.substitute(&bindings)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub case: u32,
    pub lhs: OperatorExpr,
    pub rhs: OperatorExpr,
    pub equal: bool,
}

/// Characters over `Z/3` of `(A, B, C)` for each case of Claim 1.
fn case_characters(case: u32) -> Result<[i64; 3], FixedPointError> {
    Ok(match case {
        1 => [0, 0, 0],
        2 => [0, 1, 1],
        3 => [1, 0, 1],
        4 => [1, 2, 0],
        5 => [1, 1, 2],
        _ => return Err(FixedPointError::BadCase(case)),
    })
}

/// The `A + B ~ C` context of Claim 1 case `case`.
pub fn case_context(case: u32) -> Result<GoodnessContext, FixedPointError> {
    let [a, b, c] = case_characters(case)?;
    GoodnessContext::for_gdpr(&[3], &[vec![a], vec![b]], &[vec![c]])
}

/// `F'(G^X_{2,1})` against `F'(G^Y_{1,2})`. Case 1 holds when the
/// difference is `H` and `H = 0` verifies; the others need an exact zero
/// difference.
pub fn claim1_case_report(case: u32) -> Result<CaseReport, FixedPointError> {
    let ctx = case_context(case)?;
    let mut b = GdprBuilder::new();
    let lhs = fprime_eval(&b.g(Side::X, 2, 1)?, &ctx, 2, 1)?;
    let rhs = fprime_eval(&b.g(Side::Y, 1, 2)?, &ctx, 2, 1)?;
    let diff = lhs.poly() - rhs.poly();
    let equal = if case == 1 {
        diff == h_to_standard(&h_expression()).into_poly() && verify_full_identity(2, 1, &Sampling::new(42))?.pass
    } else {
        diff.is_zero()
    };
    Ok(CaseReport { case, lhs, rhs, equal })
}

pub fn claim1_case_check(case: u32) -> Result<bool, FixedPointError> {
    Ok(claim1_case_report(case)?.equal)
}

fn all_bad_value(v: GdprVar) -> i64 {
    match v {
        GdprVar::X(_) | GdprVar::Y(_) => 1,
        GdprVar::U(1, _) | GdprVar::V(1, _) => 2,
        GdprVar::U(2, _) | GdprVar::V(2, _) => 4,
        _ => 3,
    }
}

/// Values of `G^X_{n,m}` and `G^Y_{m,n}` with every divisor bad.
pub fn all_bad_values(n: u32, m: u32) -> Result<(BigRational, BigRational), FixedPointError> {
    let mut b = GdprBuilder::new();
    let point = uniform_point(n, m, all_bad_value);
    let x = b.g_parts(Side::X, n, m)?.evaluate(&point)?;
    let y = b.g_parts(Side::Y, m, n)?.evaluate(&point)?;
    Ok((x, y))
}

pub fn all_bad_evaluation(n: u32, m: u32) -> Result<bool, FixedPointError> {
    let (x, y) = all_bad_values(n, m)?;
    Ok(x == y)
}

/// `F'` of `c(O(A_1 + ... + A_k))`.
fn prefix_chern(ctx: &GoodnessContext, side: Side, k: u32) -> Result<Polynomial, FixedPointError> {
    Ok(if is_good(ctx, &DivisorSum::prefix(side, k))? {
        sym(VarSymbol::new(chern_symbol(side, 1).family(), (1..=k).collect::<Vec<_>>()))
    } else {
        int(1)
    })
}

/// Identifies `c(O(A_1 + ... + A_n))` and `c(O(B_1 + ... + B_m))` with `cC`.
fn alias_total(p: &Polynomial, n: u32, m: u32) -> Polynomial {
    let full_x: Vec<u32> = (1..=n).collect();
    let full_y: Vec<u32> = (1..=m).collect();
    p.rename(|s| {
        if (s.family() == "cA" && s.indices() == full_x) || (s.family() == "cB" && s.indices() == full_y) {
            VarSymbol::plain("cC")
        } else {
            s.clone()
        }
    })
}

/// Sampled check of `F'(G^X_{n,m}) = F'(G^Y_{m,n})` in a mixed context.
///
/// Each side is the chain `P_{k-1} + A_k ~ P_k` with `P_k = A_1 + ... +
/// A_k`. When all three are good the chain link is an `H` relation, solved
/// for `sigma2A[k]`; otherwise the link must vanish identically. All other
/// symbols are sampled.
pub fn mixed_context_check(
    ctx: &GoodnessContext,
    n: u32,
    m: u32,
    sampling: &Sampling,
) -> Result<VerificationReport, FixedPointError> {
    let mut relations = Vec::new();
    for (side, bound) in [(Side::X, n), (Side::Y, m)] {
        let img = |v: GdprVar| fprime_of_var(v, ctx, n, m).map(OperatorExpr::into_poly);
        for k in 2..=bound {
            let prev = prefix_chern(ctx, side, k - 1)?;
            let next = prefix_chern(ctx, side, k)?;
            let x = img(GdprVar::divisor(side, k))?;
            let u1 = img(GdprVar::tower(side, 1, k - 1))?;
            let u23 = img(GdprVar::tower(side, 2, k))? - img(GdprVar::tower(side, 3, k))?;
            let px = &prev * &x;
            let link = &prev + &x - &px * &u1 + &(&px * &next) * &u23 - &next;
            let link = alias_total(&link, n, m);
            let all_good = [
                DivisorSum::prefix(side, k - 1),
                DivisorSum::of(divisor_name(side, k)),
                DivisorSum::prefix(side, k),
            ]
            .iter()
            .map(|s| is_good(ctx, s))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .all(|g| g);
            if all_good {
                relations.push((tower_symbol(side, 2, k), link));
            } else if !link.is_zero() {
                return Err(FixedPointError::NonzeroRelation { side, k });
            }
        }
    }
    let mut b = GdprBuilder::new();
    let lhs = fprime_eval(&b.g(Side::X, n, m)?, ctx, n, m)?.into_poly();
    let rhs = fprime_eval(&b.g(Side::Y, m, n)?, ctx, n, m)?.into_poly();
    let conclusion = alias_total(&(lhs - rhs), n, m);
    let system = RelationSystem {
        relations,
        sampling: sampling.clone(),
    };
    let (pass, resamples) = system.verify(&conclusion)?;
    Ok(VerificationReport {
        identity: "mixed".into(),
        n,
        m,
        trials: sampling.trials,
        resamples,
        pass,
        seed: sampling.seed,
        degree_bound: system.degree_bound(&conclusion),
        sample_range: [-(sampling.range as i64), sampling.range as i64],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Polynomial {
        sym(s.parse().unwrap())
    }

    #[test]
    fn goodness_examples() {
        let ctx = GoodnessContext::new(vec![3]).with("A", vec![1]).unwrap().with("B", vec![2]).unwrap();
        assert!(is_good(&ctx, &DivisorSum::empty()).unwrap());
        assert!(!is_good(&ctx, &DivisorSum::of("A")).unwrap());
        assert!(is_good(&ctx, &DivisorSum::of("A").plus(&DivisorSum::of("B"))).unwrap());
        assert_eq!(
            is_good(&ctx, &DivisorSum::of("Q")),
            Err(FixedPointError::UnknownDivisor("Q".into()))
        );
    }

    #[test]
    fn guard_examples() {
        let ctx = GoodnessContext::new(vec![2]).with("D", vec![0]).unwrap().with("A", vec![1]).unwrap();
        assert!(impossible_case_guard(&ctx, &DivisorSum::of("D"), &DivisorSum::of("D")).unwrap());
        assert!(impossible_case_guard(&ctx, &DivisorSum::of("D"), &DivisorSum::of("A")).unwrap());
    }

    #[test]
    fn table_rows() {
        // U^1_1 with A1 bad
        let ctx = GoodnessContext::for_gdpr(&[2], &[vec![1], vec![0]], &[vec![1]]).unwrap();
        assert_eq!(fprime_of_var(GdprVar::U(1, 1), &ctx, 2, 1).unwrap().into_poly(), int(2));
        // D = A1, A2, D + A2 all bad
        let ctx = case_context(5).unwrap();
        assert_eq!(fprime_of_var(GdprVar::U(3, 2), &ctx, 2, 1).unwrap().into_poly(), int(3));
        assert_eq!(fprime_of_var(GdprVar::U(2, 2), &ctx, 2, 1).unwrap().into_poly(), int(4));
        // D = A1 good, A2 and D + A2 bad
        let ctx = case_context(2).unwrap();
        assert_eq!(
            fprime_of_var(GdprVar::U(2, 2), &ctx, 2, 1).unwrap().into_poly(),
            v("sigma1A[1]").scale_int(2)
        );
        assert_eq!(fprime_of_var(GdprVar::U(3, 2), &ctx, 2, 1).unwrap().into_poly(), int(1) + v("sigma1A[1]"));
        assert_eq!(fprime_of_var(GdprVar::X(3), &ctx, 2, 1).unwrap().into_poly(), int(0));
        assert!(matches!(
            fprime_of_var(GdprVar::X(0), &ctx, 2, 1),
            Err(FixedPointError::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn fprime_of_y() {
        let g = GdprBuilder::new().g(Side::Y, 1, 2).unwrap();
        assert_eq!(fprime_eval(&g, &case_context(1).unwrap(), 2, 1).unwrap().into_poly(), v("cB[1]"));
        assert_eq!(fprime_eval(&g, &case_context(5).unwrap(), 2, 1).unwrap().into_poly(), int(1));
        let x1x2 = GdprVar::X(1).poly() * GdprVar::X(2).poly();
        assert_eq!(fprime_eval(&x1x2, &case_context(5).unwrap(), 2, 1).unwrap().into_poly(), int(1));
    }

    #[test]
    fn claim1_cases() {
        for case in 1..=5 {
            assert!(claim1_case_check(case).unwrap(), "case {case}");
        }
        assert_eq!(claim1_case_report(2).unwrap().lhs.into_poly(), int(1));
        assert_eq!(claim1_case_report(4).unwrap().lhs.into_poly(), v("cB[1]"));
        assert_eq!(claim1_case_report(5).unwrap().rhs.into_poly(), int(1));
        assert!(claim1_case_check(6).is_err());
    }

    #[test]
    fn group_specs() {
        assert_eq!(parse_group("Z/2xZ/2").unwrap(), vec![2, 2]);
        assert_eq!(parse_group("6").unwrap(), vec![6]);
        assert_eq!(parse_group("2x3").unwrap(), vec![2, 3]);
        assert!(parse_group("Z/0").is_err());
        assert!(parse_group("abc").is_err());
        assert_eq!(Character::all(&[2, 3]).len(), 6);
    }
}
