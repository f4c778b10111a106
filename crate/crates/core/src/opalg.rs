//! Commutative operator algebra: Chern symbols `cA[i]`, `cB[j]` and tower
//! symbols `sigma1A[..]`, `sigma2A[k]`, `sigma3A[k]` (and their `B` mirrors),
//! the substitution `G` into it, and exact identity testing by sampling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, CoeffRing, Polynomial, VarSymbol};
use crate::gdpr::{GdprBuilder, GdprError, GdprVar, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpalgError {
    #[error("no image given for {0}")]
    MissingImage(VarSymbol),
    #[error("relation is not affine in {0}")]
    NotAffine(VarSymbol),
    #[error("relation for {solving} still mentions unknown {unknown}")]
    Unresolved { solving: VarSymbol, unknown: VarSymbol },
    #[error("trial {trial} hit {limit} degenerate samples in a row")]
    ResampleLimitExceeded { trial: u32, limit: u32 },
    #[error("trial {trial}: the two solves for {var} disagree")]
    InconsistentSolve { trial: u32, var: VarSymbol },
    #[error("{0} must be at least {1}")]
    OutOfRange(&'static str, u32),
    #[error(transparent)]
    Gdpr(#[from] GdprError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// An element of the operator algebra. Multiplication is commutative since
/// the underlying ring is.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OperatorExpr(pub Polynomial);

impl OperatorExpr {
    pub fn poly(&self) -> &Polynomial {
        &self.0
    }

    pub fn into_poly(self) -> Polynomial {
        self.0
    }

    pub fn symbol(s: &VarSymbol) -> Self {
        OperatorExpr(Polynomial::var(CoeffRing::integers(), s))
    }

    pub fn integer(k: i64) -> Self {
        OperatorExpr(Polynomial::integer(CoeffRing::integers(), k))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl From<Polynomial> for OperatorExpr {
    fn from(p: Polynomial) -> Self {
        OperatorExpr(p)
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The divisor family named by a side: `A` for `X`, `B` for `Y`.
pub fn family_letter(side: Side) -> &'static str {
    match side {
        Side::X => "A",
        Side::Y => "B",
    }
}

/// `cA[i]` or `cB[i]`.
pub fn chern_symbol(side: Side, i: u32) -> VarSymbol {
    VarSymbol::new(format!("c{}", family_letter(side)), [i])
}

/// `sigma1A[i_1]...[i_r]`, the pull-push through `P(O + O(A_i1 + ... + A_ir))`.
pub fn sigma1_symbol(side: Side, divisors: impl IntoIterator<Item = u32>) -> VarSymbol {
    VarSymbol::new(format!("sigma1{}", family_letter(side)), divisors.into_iter().collect::<Vec<_>>())
}

/// `sigma2A[k]` or `sigma3A[k]` (and `B` mirrors) for `p` in 2..=3.
pub fn tower_symbol(side: Side, p: u32, k: u32) -> VarSymbol {
    VarSymbol::new(format!("sigma{p}{}", family_letter(side)), [k])
}

/// The standard image of a GDPR variable.
pub fn standard_image(v: GdprVar) -> VarSymbol {
    match v {
        GdprVar::X(i) | GdprVar::Y(i) => chern_symbol(v.side(), i),
        GdprVar::U(1, k) | GdprVar::V(1, k) => sigma1_symbol(v.side(), 1..=k),
        GdprVar::U(p, k) | GdprVar::V(p, k) => tower_symbol(v.side(), p, k),
    }
}

/// Standard images of every variable of `g`.
pub fn standard_images(g: &Polynomial) -> Result<BTreeMap<GdprVar, OperatorExpr>, OpalgError> {
    let mut out = BTreeMap::new();
    for s in g.variables() {
        let v = GdprVar::from_symbol(&s)?;
        out.insert(v, OperatorExpr::symbol(&standard_image(v)));
    }
    Ok(out)
}

/// Extends `images` to a ring homomorphism and applies it to `g`.
pub fn apply_g(g: &Polynomial, images: &BTreeMap<GdprVar, OperatorExpr>) -> Result<OperatorExpr, OpalgError> {
    let mut bindings = BTreeMap::new();
    for s in g.variables() {
        let v = GdprVar::from_symbol(&s)?;
        let image = images.get(&v).ok_or_else(|| OpalgError::MissingImage(s.clone()))?;
        bindings.insert(s, image.0.clone());
    }
    Ok(OperatorExpr(g.substitute(&bindings)?))
}

/// [`apply_g`] with the standard images.
pub fn apply_g_standard(g: &Polynomial) -> Result<OperatorExpr, OpalgError> {
    apply_g(g, &standard_images(g)?)
}

/// `H(L,M)` in the symbols `cL, cM, cLM, sigma1, sigma2, sigma3`.
pub fn h_expression() -> OperatorExpr {
    let z = CoeffRing::integers();
    let s = |name: &str| Polynomial::var(z.clone(), &VarSymbol::plain(name));
    let (cl, cm, clm) = (s("cL"), s("cM"), s("cLM"));
    let lm = &cl * &cm;
    OperatorExpr(&cl + &cm - &lm * &s("sigma1") + &(&lm * &clm) * &(s("sigma2") - s("sigma3")) - &clm)
}

/// Renames the symbols of [`h_expression`] to the standard images of the
/// `GDPR(2,1)` setup `A_1 = L`, `A_2 = M`, `B_1 = L + M`.
pub fn h_to_standard(h: &OperatorExpr) -> OperatorExpr {
    OperatorExpr(h.0.rename(|s| match s.family() {
        "cL" => chern_symbol(Side::X, 1),
        "cM" => chern_symbol(Side::X, 2),
        "cLM" => chern_symbol(Side::Y, 1),
        "sigma1" => sigma1_symbol(Side::X, [1]),
        "sigma2" => tower_symbol(Side::X, 2, 2),
        "sigma3" => tower_symbol(Side::X, 3, 2),
        _ => s.clone(),
    }))
}

/// How sample points are drawn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sampling {
    pub seed: u64,
    pub trials: u32,
    /// Values are integers in `[-range, range]`.
    pub range: u32,
    /// Degenerate draws allowed per trial before giving up.
    pub resample_limit: u32,
}

impl Sampling {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            trials: 20,
            range: 1000,
            resample_limit: 50,
        }
    }

    /// The random stream of one trial.
    pub fn trial_rng(&self, trial: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }
}

/// Relations `equation = 0`, each solved in turn for its variable.
#[derive(Clone, Debug)]
pub struct RelationSystem {
    pub relations: Vec<(VarSymbol, Polynomial)>,
    pub sampling: Sampling,
}

/// Result of one sampled solve.
enum Solved {
    Value(BigRational),
    Degenerate,
}

/// A polynomial split by the exponents of a few rational-valued symbols,
/// so the remaining integer-valued part is summed in `BigInt` arithmetic.
/// Free-variable index and exponent pairs of one monomial.
type Sparse = Vec<(usize, u32)>;

/// Rational exponents, common denominator, integer terms over the free part.
type Group = (Vec<u32>, BigInt, Vec<(BigInt, Sparse)>);

struct Compiled {
    rational: Vec<VarSymbol>,
    free: Vec<VarSymbol>,
    groups: Vec<Group>,
}

impl Compiled {
    fn new(p: &Polynomial, rational: &[VarSymbol]) -> Self {
        let mut free: BTreeMap<VarSymbol, usize> = BTreeMap::new();
        for s in p.variables() {
            if !rational.contains(&s) {
                let k = free.len();
                free.insert(s, k);
            }
        }
        let mut groups: BTreeMap<Vec<u32>, Vec<(BigRational, Sparse)>> = BTreeMap::new();
        for (m, c) in p.terms() {
            let mut exps = vec![0; rational.len()];
            let mut rest = Vec::new();
            for (s, e) in m.iter() {
                match rational.iter().position(|r| r == s) {
                    Some(i) => exps[i] = e,
                    None => rest.push((free[s], e)),
                }
            }
            groups.entry(exps).or_default().push((c.clone(), rest));
        }
        let groups = groups
            .into_iter()
            .map(|(exps, terms)| {
                let denom = terms.iter().fold(BigInt::one(), |l, (c, _)| l.lcm(c.denom()));
                let terms = terms
                    .into_iter()
                    .map(|(c, rest)| ((c * BigRational::from_integer(denom.clone())).to_integer(), rest))
                    .collect();
                (exps, denom, terms)
            })
            .collect();
        Self {
            rational: rational.to_vec(),
            free: free.into_keys().collect(),
            groups,
        }
    }

    /// Value of every group at `point`, which must bind all free symbols to
    /// integers; `Err(symbol)` names the first unbound one.
    fn group_values(&self, point: &BTreeMap<VarSymbol, BigRational>) -> Result<Vec<(&[u32], BigRational)>, VarSymbol> {
        let mut ints = Vec::with_capacity(self.free.len());
        for s in &self.free {
            let q = point.get(s).ok_or_else(|| s.clone())?;
            ints.push(q.clone());
        }
        let integral = ints.iter().all(|q| q.is_integer());
        let nums: Vec<BigInt> = ints.iter().map(|q| q.numer().clone()).collect();
        Ok(self
            .groups
            .iter()
            .map(|(exps, denom, terms)| {
                let value = if integral {
                    let mut total = BigInt::zero();
                    for (c, rest) in terms {
                        let mut t = c.clone();
                        for &(i, e) in rest {
                            t *= num_traits::pow(nums[i].clone(), e as usize);
                        }
                        total += t;
                    }
                    BigRational::new(total, denom.clone())
                } else {
                    let mut total = BigRational::zero();
                    for (c, rest) in terms {
                        let mut t = BigRational::from_integer(c.clone());
                        for &(i, e) in rest {
                            t *= num_traits::pow(ints[i].clone(), e as usize);
                        }
                        total += t;
                    }
                    total / BigRational::from_integer(denom.clone())
                };
                (exps.as_slice(), value)
            })
            .collect())
    }

    fn rational_monomial(&self, exps: &[u32], point: &BTreeMap<VarSymbol, BigRational>, skip: Option<usize>) -> Result<BigRational, OpalgError> {
        let mut t = BigRational::one();
        for (i, &e) in exps.iter().enumerate() {
            if e == 0 || Some(i) == skip {
                continue;
            }
            let x = point
                .get(&self.rational[i])
                .ok_or_else(|| AlgebraError::UnboundVariable(self.rational[i].clone()))?;
            t *= num_traits::pow(x.clone(), e as usize);
        }
        Ok(t)
    }

    fn evaluate(&self, point: &BTreeMap<VarSymbol, BigRational>) -> Result<BigRational, OpalgError> {
        let groups = self.group_values(point).map_err(AlgebraError::UnboundVariable)?;
        let mut total = BigRational::zero();
        for (exps, v) in groups {
            if !v.is_zero() {
                total += v * self.rational_monomial(exps, point, None)?;
            }
        }
        Ok(total)
    }

    /// Solves `self = 0` for the last rational symbol.
    fn solve_last(&self, point: &BTreeMap<VarSymbol, BigRational>) -> Result<Solved, OpalgError> {
        let target = self.rational.len() - 1;
        let var = &self.rational[target];
        let groups = self.group_values(point).map_err(|unknown| OpalgError::Unresolved {
            solving: var.clone(),
            unknown,
        })?;
        let mut a = BigRational::zero();
        let mut b = BigRational::zero();
        for (exps, v) in groups {
            if v.is_zero() {
                continue;
            }
            let v = v * self.rational_monomial(exps, point, Some(target))?;
            if v.is_zero() {
                continue;
            }
            match exps[target] {
                0 => b += v,
                1 => a += v,
                _ => return Err(OpalgError::NotAffine(var.clone())),
            }
        }
        if a.is_zero() {
            Ok(Solved::Degenerate)
        } else {
            Ok(Solved::Value(-b / a))
        }
    }
}

/// What a per-point check concluded.
pub enum Check {
    Holds,
    Fails,
    Degenerate,
}

impl RelationSystem {
    /// Variables that are sampled rather than solved for.
    pub fn free_variables(&self, extra: &[&Polynomial]) -> BTreeSet<VarSymbol> {
        let solved: BTreeSet<_> = self.relations.iter().map(|(v, _)| v.clone()).collect();
        self.relations
            .iter()
            .map(|(_, e)| e)
            .chain(extra.iter().copied())
            .flat_map(|p| p.variables())
            .filter(|s| !solved.contains(s))
            .collect()
    }

    fn solved(&self) -> Vec<VarSymbol> {
        self.relations.iter().map(|(v, _)| v.clone()).collect()
    }

    /// Schwartz-Zippel degree bound for `conclusion` after clearing the
    /// denominators of all solved variables.
    pub fn degree_bound(&self, conclusion: &Polynomial) -> u64 {
        let mut sum = 0u64;
        for (_, e) in &self.relations {
            let d = e.total_degree().unwrap_or(0) as u64 * (1 + sum);
            sum += d;
        }
        conclusion.total_degree().unwrap_or(0) as u64 * (1 + sum)
    }

    /// Samples the free variables, solves the relations in order and hands
    /// the full point to `check`. Returns whether every trial held and the
    /// number of resamples.
    pub fn run(
        &self,
        free: &BTreeSet<VarSymbol>,
        mut check: impl FnMut(u32, &BTreeMap<VarSymbol, BigRational>) -> Result<Check, OpalgError>,
    ) -> Result<(bool, u32), OpalgError> {
        let range = self.sampling.range as i64;
        let compiled: Vec<Compiled> = self
            .relations
            .iter()
            .enumerate()
            .map(|(i, (_, eq))| Compiled::new(eq, &self.solved()[..=i]))
            .collect();
        let mut all_hold = true;
        let mut resamples = 0;
        for trial in 0..self.sampling.trials {
            let mut rng = self.sampling.trial_rng(trial);
            let mut attempts = 0;
            loop {
                let mut point: BTreeMap<VarSymbol, BigRational> = free
                    .iter()
                    .map(|s| (s.clone(), BigRational::from_integer(BigInt::from(rng.gen_range(-range..=range)))))
                    .collect();
                let mut degenerate = false;
                for ((var, _), eq) in self.relations.iter().zip(&compiled) {
                    match eq.solve_last(&point)? {
                        Solved::Value(x) => {
                            point.insert(var.clone(), x);
                        }
                        Solved::Degenerate => {
                            degenerate = true;
                            break;
                        }
                    }
                }
                if !degenerate {
                    match check(trial, &point)? {
                        Check::Holds => break,
                        Check::Fails => {
                            all_hold = false;
                            break;
                        }
                        Check::Degenerate => {}
                    }
                }
                attempts += 1;
                resamples += 1;
                if attempts > self.sampling.resample_limit {
                    return Err(OpalgError::ResampleLimitExceeded {
                        trial,
                        limit: self.sampling.resample_limit,
                    });
                }
            }
        }
        Ok((all_hold, resamples))
    }

    /// Checks that `conclusion` vanishes at every sampled solution.
    pub fn verify(&self, conclusion: &Polynomial) -> Result<(bool, u32), OpalgError> {
        let free = self.free_variables(&[conclusion]);
        let conclusion = Compiled::new(conclusion, &self.solved());
        self.run(&free, |_, point| {
            Ok(if conclusion.evaluate(point)?.is_zero() {
                Check::Holds
            } else {
                Check::Fails
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub n: u32,
    pub m: u32,
    pub trials: u32,
    pub resamples: u32,
    pub pass: bool,
    pub seed: u64,
    pub degree_bound: u64,
    pub sample_range: [i64; 2],
}

impl VerificationReport {
    fn new(identity: &str, n: u32, m: u32, sampling: &Sampling, pass: bool, resamples: u32, degree_bound: u64) -> Self {
        Self {
            identity: identity.to_string(),
            n,
            m,
            trials: sampling.trials,
            resamples,
            pass,
            seed: sampling.seed,
            degree_bound,
            sample_range: [-(sampling.range as i64), sampling.range as i64],
        }
    }
}

fn plain(name: &str) -> Polynomial {
    Polynomial::var(CoeffRing::integers(), &VarSymbol::plain(name))
}

fn std_image(b: &mut GdprBuilder, which: impl FnOnce(&mut GdprBuilder) -> Result<Polynomial, GdprError>) -> Result<Polynomial, OpalgError> {
    Ok(apply_g_standard(&which(b)?)?.into_poly())
}

fn divisor_sum_image(side: Side, n: u32) -> Polynomial {
    (1..=n).fold(Polynomial::zero(CoeffRing::integers()), |acc, i| {
        acc + Polynomial::var(CoeffRing::integers(), &chern_symbol(side, i))
    })
}

/// The `GDPR(n-1,1) + GDPR(2,1) => GDPR(n,1)` step.
///
/// With `C = A_1 + ... + A_{n-1}` and `A_1 + ... + A_n ~ B`, solve
/// `cC = G(X_1 + ... + X_{n-1} + E_{n-1}) + cC G(F_{n-1})` for `cC`, then
/// `cB = cC + cA[n] - cC cA[n] s + cB cC cA[n] s'` for `cB`, where
/// `s = G(U^1_{n-1})` and `s' = G(U^2_n - U^3_n)`, and check
/// `cB = G(X_1 + ... + X_n + E_n) + cB G(F_n)`.
pub fn verify_step_identity(n: u32, sampling: &Sampling) -> Result<VerificationReport, OpalgError> {
    if n < 2 {
        return Err(OpalgError::OutOfRange("n", 2));
    }
    let mut b = GdprBuilder::new();
    let (cb, cc) = (plain("cB"), plain("cC"));
    let can = Polynomial::var(CoeffRing::integers(), &chern_symbol(Side::X, n));
    let sigma = Polynomial::var(CoeffRing::integers(), &sigma1_symbol(Side::X, 1..n));
    let sigma_p = Polynomial::var(CoeffRing::integers(), &tower_symbol(Side::X, 2, n))
        - Polynomial::var(CoeffRing::integers(), &tower_symbol(Side::X, 3, n));

    let e_prev = std_image(&mut b, |b| b.e(Side::X, n - 1))?;
    let f_prev = std_image(&mut b, |b| b.f(Side::X, n - 1))?;
    let prefix_rel = divisor_sum_image(Side::X, n - 1) + e_prev + &cc * &f_prev - &cc;
    let step_rel = &cc + &can - &(&cc * &can) * &sigma + &(&(&cb * &cc) * &can) * &sigma_p - &cb;

    let e_n = std_image(&mut b, |b| b.e(Side::X, n))?;
    let f_n = std_image(&mut b, |b| b.f(Side::X, n))?;
    let conclusion = divisor_sum_image(Side::X, n) + e_n + &cb * &f_n - &cb;

    let system = RelationSystem {
        relations: vec![(VarSymbol::plain("cC"), prefix_rel), (VarSymbol::plain("cB"), step_rel)],
        sampling: sampling.clone(),
    };
    let (pass, resamples) = system.verify(&conclusion)?;
    Ok(VerificationReport::new(
        "step",
        n,
        1,
        sampling,
        pass,
        resamples,
        system.degree_bound(&conclusion),
    ))
}

/// `GDPR(n,1)` on each side `=> GDPR(n,m)`.
///
/// With `A_1 + ... + A_n ~ C ~ B_1 + ... + B_m`, solve the `X`-side relation
/// `cC = G(X_1 + ... + X_n + E^X_n) + G(F^X_n) cC` for `cC`, then the
/// `Y`-side relation for the image `cB[m]` of `Y_m`. The `Y`-side relation
/// is solved again for `cC` to confirm both solves agree, and
/// `G(G^X_{n,m}) - G(G^Y_{m,n})` must vanish.
pub fn verify_full_identity(n: u32, m: u32, sampling: &Sampling) -> Result<VerificationReport, OpalgError> {
    if n == 0 || m == 0 {
        return Err(OpalgError::OutOfRange(if n == 0 { "n" } else { "m" }, 1));
    }
    let mut b = GdprBuilder::new();
    let cc = plain("cC");
    let one_sided = |b: &mut GdprBuilder, side: Side, k: u32| -> Result<Polynomial, OpalgError> {
        let e = std_image(b, |b| b.e(side, k))?;
        let f = std_image(b, |b| b.f(side, k))?;
        Ok(divisor_sum_image(side, k) + e + &f * &cc - &cc)
    };
    let x_rel = one_sided(&mut b, Side::X, n)?;
    let y_rel = one_sided(&mut b, Side::Y, m)?;

    let gx = b.g_parts(Side::X, n, m)?;
    let gy = b.g_parts(Side::Y, m, n)?;
    let image = |p: &Polynomial| apply_g_standard(p).map(OperatorExpr::into_poly);
    let conclusion = image(&gx.head)? + &image(&gx.cofactor)? * &image(&gx.factor)?
        - image(&gy.head)?
        - &image(&gy.cofactor)? * &image(&gy.factor)?;

    let ym = chern_symbol(Side::Y, m);
    let system = RelationSystem {
        relations: vec![(VarSymbol::plain("cC"), x_rel), (ym.clone(), y_rel.clone())],
        sampling: sampling.clone(),
    };
    let free = system.free_variables(&[&conclusion]);
    let cc_sym = VarSymbol::plain("cC");
    let y_again = Compiled::new(&y_rel, &[ym.clone(), cc_sym.clone()]);
    let degree_bound = system.degree_bound(&conclusion);
    let conclusion = Compiled::new(&conclusion, &system.solved());
    let (pass, resamples) = system.run(&free, |trial, point| {
        let mut without = point.clone();
        let expected = without.remove(&cc_sym).expect("solved");
        match y_again.solve_last(&without)? {
            Solved::Degenerate => return Ok(Check::Degenerate),
            Solved::Value(again) if again != expected => {
                return Err(OpalgError::InconsistentSolve { trial, var: cc_sym.clone() })
            }
            Solved::Value(_) => {}
        }
        Ok(if conclusion.evaluate(point)?.is_zero() {
            Check::Holds
        } else {
            Check::Fails
        })
    })?;
    Ok(VerificationReport::new(
        "full",
        n,
        m,
        sampling,
        pass,
        resamples,
        degree_bound,
    ))
}

pub fn rational(k: i64) -> BigRational {
    BigRational::from_integer(k.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Monomial;
    use crate::gdpr::build_g;

    fn sym(s: &str) -> Polynomial {
        Polynomial::var(CoeffRing::integers(), &s.parse().unwrap())
    }

    #[test]
    fn images_of_generators() {
        let x1 = GdprVar::X(1).poly();
        let images = BTreeMap::from([(GdprVar::X(1), OperatorExpr::symbol(&VarSymbol::plain("cA")))]);
        assert_eq!(apply_g(&x1, &images).unwrap(), OperatorExpr::symbol(&VarSymbol::plain("cA")));
        let one = Polynomial::one(CoeffRing::integers());
        assert_eq!(apply_g(&one, &BTreeMap::new()).unwrap(), OperatorExpr::integer(1));
        assert!(matches!(apply_g(&x1, &BTreeMap::new()), Err(OpalgError::MissingImage(_))));
        let t = GdprVar::X(1).poly() * GdprVar::X(2).poly() * GdprVar::U(1, 1).poly();
        assert_eq!(apply_g_standard(&t).unwrap().0, sym("cA[1]") * sym("cA[2]") * sym("sigma1A[1]"));
        assert_eq!(standard_image(GdprVar::U(1, 3)).to_string(), "sigma1A[1][2][3]");
        assert_eq!(standard_image(GdprVar::V(3, 2)).to_string(), "sigma3B[2]");
    }

    #[test]
    fn h_matches_gdpr_2_1() {
        let h = h_expression();
        let cl = Monomial::var(&VarSymbol::plain("cL"));
        let clm = Monomial::var(&VarSymbol::plain("cLM"));
        assert_eq!(h.0.coeff(&cl), rational(1));
        assert_eq!(h.0.coeff(&clm), rational(-1));
        let gx = apply_g_standard(&build_g(Side::X, 2, 1).unwrap()).unwrap().0;
        let gy = apply_g_standard(&build_g(Side::Y, 1, 2).unwrap()).unwrap().0;
        assert_eq!(h_to_standard(&h).0, gx - gy);
    }

    #[test]
    fn h_degenerates_additively() {
        let h = h_expression().0;
        let z = CoeffRing::integers();
        let bind = BTreeMap::from([
            (VarSymbol::plain("sigma1"), Polynomial::zero(z.clone())),
            (VarSymbol::plain("sigma2"), sym("sigma3")),
            (VarSymbol::plain("cLM"), sym("cL") + sym("cM")),
        ]);
        assert!(h.substitute(&bind).unwrap().is_zero());
    }

    #[test]
    fn small_identities_pass() {
        let s = Sampling::new(42);
        assert!(verify_step_identity(2, &s).unwrap().pass);
        assert!(verify_step_identity(3, &s).unwrap().pass);
        assert!(verify_full_identity(1, 1, &s).unwrap().pass);
        assert!(verify_full_identity(2, 1, &s).unwrap().pass);
        assert!(verify_step_identity(1, &s).is_err());
    }

    #[test]
    fn wrong_conclusion_is_caught() {
        // drop the E_n term: no longer implied by the relations
        let system = RelationSystem {
            relations: vec![(VarSymbol::plain("cC"), sym("cA[1]") - sym("cC"))],
            sampling: Sampling::new(7),
        };
        assert!(system.verify(&(sym("cC") - sym("cA[1]"))).unwrap().0);
        assert!(!system.verify(&(sym("cC") - sym("cA[1]") * sym("cA[1]"))).unwrap().0);
    }

    #[test]
    fn non_affine_relation_is_rejected() {
        let system = RelationSystem {
            relations: vec![(VarSymbol::plain("cC"), sym("cC") * sym("cC") - sym("cA[1]"))],
            sampling: Sampling::new(1),
        };
        assert_eq!(
            system.verify(&sym("cC")).unwrap_err(),
            OpalgError::NotAffine(VarSymbol::plain("cC"))
        );
    }

    #[test]
    fn always_degenerate_hits_limit() {
        let system = RelationSystem {
            relations: vec![(VarSymbol::plain("cC"), sym("cA[1]") * sym("cC") - sym("cA[1]") * sym("cC"))],
            sampling: Sampling::new(1),
        };
        assert!(matches!(
            system.verify(&sym("cC")),
            Err(OpalgError::ResampleLimitExceeded { trial: 0, limit: 50 })
        ));
    }

    #[test]
    fn report_layout_is_stable() {
        let r = verify_step_identity(2, &Sampling::new(42)).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.starts_with(r#"{"identity":"step","n":2,"m":1,"trials":20,"resamples":0,"pass":true,"seed":42,"degree_bound":"#), "{json}");
        assert!(json.ends_with(r#""sample_range":[-1000,1000]}"#));
    }
}
