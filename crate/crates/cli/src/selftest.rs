//! The acceptance suite, shared by `cobord selftest` and the `acceptance`
//! test target.

use std::time::{Duration, Instant};

use cobord_core::fgl::{
    associativity_relations, denominator_profile, division_series, eval_dim_truncated, inverse_series, f_minus,
    n_fold_sum, specialize_additive, specialize_multiplicative, universal_fgl, FglMode,
};
use cobord_core::fixedpoint::{all_bad_values, claim1_case_check, guard_enumeration, parse_group};
use cobord_core::gdpr::{GdprBuilder, GdprVar, Side};
use cobord_core::opalg::{verify_full_identity, verify_step_identity, Sampling};
use cobord_core::{CoeffRing, Polynomial, SeriesExp, SeriesVar, TruncatedSeries, VarSymbol};
use num_rational::BigRational;
use serde::Serialize;

use SeriesVar::{U, V};

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    /// Wall-clock budget in seconds, if any.
    pub runtime_limit_s: Option<u64>,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

type Outcome = Result<(bool, String), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn timed(id: u32, title: &'static str, limit: Option<u64>, body: impl FnOnce() -> Outcome) -> CriterionResult {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    if let Some(s) = limit {
        if elapsed > Duration::from_secs(s) {
            pass = false;
            detail.push_str(&format!("; over the {s} s budget"));
        }
    }
    CriterionResult {
        id,
        title,
        pass,
        runtime_limit_s: limit,
        detail,
        elapsed,
    }
}

/// Collects named boolean checks and reports the first failures.
#[derive(Default)]
struct Tally {
    checks: usize,
    failed: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed.push(what());
        }
    }

    fn finish(self, summary: &str) -> Outcome {
        if self.failed.is_empty() {
            Ok((true, format!("{summary}; {} checks", self.checks)))
        } else {
            let shown: Vec<_> = self.failed.iter().take(5).cloned().collect();
            Ok((false, format!("{} of {} checks failed: {}", self.failed.len(), self.checks, shown.join(", "))))
        }
    }
}

fn x(i: u32) -> Polynomial {
    GdprVar::X(i).poly()
}

fn u(p: u32, k: u32) -> Polynomial {
    GdprVar::U(p, k).poly()
}

pub fn criterion_1() -> Outcome {
    let mut b = GdprBuilder::new();
    let mut t = Tally::default();
    t.check(b.e(Side::X, 1).map_err(err)?.is_zero(), || "E1".into());
    t.check(b.f(Side::X, 1).map_err(err)?.is_zero(), || "F1".into());
    t.check(b.e(Side::X, 2).map_err(err)? == -(x(1) * x(2) * u(1, 1)), || "E2".into());
    t.check(b.f(Side::X, 2).map_err(err)? == x(1) * x(2) * (u(2, 2) - u(3, 2)), || "F2".into());
    let gx = x(1) + x(2) - x(1) * x(2) * u(1, 1) + GdprVar::Y(1).poly() * x(1) * x(2) * (u(2, 2) - u(3, 2));
    t.check(b.g(Side::X, 2, 1).map_err(err)? == gx, || "G^X_{2,1}".into());
    t.check(b.g(Side::Y, 1, 2).map_err(err)? == GdprVar::Y(1).poly(), || "G^Y_{1,2}".into());
    t.finish("E1, F1, E2, F2, G^X_{2,1}, G^Y_{1,2} match")
}

pub fn criterion_2() -> Outcome {
    let mut b = GdprBuilder::new();
    let mut t = Tally::default();
    for n in 1..=8 {
        for m in 1..=8 {
            let gx = b.g_parts(Side::X, n, m).map_err(err)?;
            let gy = b.g_parts(Side::Y, m, n).map_err(err)?;
            for (name, g) in [("GX", &gx), ("GY", &gy)] {
                t.check(g.check_multilinear().map_err(err)?, || format!("multilinear {name}({n},{m})"));
                t.check(g.check_index_bounds(n, m).map_err(err)?, || format!("bounds {name}({n},{m})"));
                t.check(g.weight_check().map_err(err)?, || format!("weight {name}({n},{m})"));
            }
            t.check(b.mirror_check(n, m).map_err(err)?, || format!("mirror ({n},{m})"));
        }
    }
    for big_n in 1..=6 {
        for big_m in 1..=6 {
            for n in 1..=big_n {
                for m in 1..=big_m {
                    t.check(b.padding_check(big_n, big_m, n, m).map_err(err)?, || {
                        format!("padding ({big_n},{big_m})->({n},{m})")
                    });
                }
            }
        }
    }
    t.finish("n, m <= 8 structural; n <= N <= 6, m <= M <= 6 padding")
}

pub fn criterion_3() -> Outcome {
    const ORDER: u32 = 10;
    let mode = FglMode::UniversalSymmetric;
    let z = CoeffRing::integers();
    let id = TruncatedSeries::variable(U, ORDER).map_err(err)?;
    let zero_u = TruncatedSeries::zero(&[U], ORDER, z.clone()).map_err(err)?;
    let mut t = Tally::default();
    let f = universal_fgl(&mode, ORDER).map_err(err)?;
    t.check(f.compose(V, &zero_u).map_err(err)? == id, || "F(u,0) = u".into());
    t.check(f.rename(&[(U, V), (V, U)]) == f, || "symmetry".into());
    let gamma = inverse_series(&mode, ORDER).map_err(err)?;
    t.check(f.compose(V, &gamma).map_err(err)?.is_zero(), || "F(u, gamma(u)) = 0".into());
    let minus = f_minus(&mode, ORDER).map_err(err)?;
    t.check(minus.compose(V, &id).map_err(err)?.is_zero(), || "F-(u,u) = 0".into());
    for n in 1..=7u32 {
        let s = n_fold_sum(n, &mode, ORDER).map_err(err)?;
        t.check(s.coeff_of(U, 1) == Polynomial::integer(z.clone(), n as i64), || format!("leading coefficient n={n}"));
    }
    for n in [2u32, 3, 5] {
        let d = division_series(n, &mode, ORDER).map_err(err)?;
        let fnu = n_fold_sum(n, &mode, ORDER).map_err(err)?;
        let left = d.compose(U, &fnu).and_then(|s| s.sub(&id)).map_err(err)?;
        let right = fnu.compose(U, &d).and_then(|s| s.sub(&id)).map_err(err)?;
        t.check(left.is_zero(), || format!("[1/{n}](F^{n}) = u"));
        t.check(right.is_zero(), || format!("F^{n}([1/{n}]) = u"));
        t.check(
            d.coeff_of(U, 1).constant_term() == BigRational::new(1.into(), (n as i64).into()),
            || format!("b1 = 1/{n}"),
        );
        if n <= 3 {
            for (i, k) in denominator_profile(&d, n as u64).map_err(err)? {
                if i <= 8 {
                    t.check(k <= i * (i + 1) / 2, || format!("n={n} b_{i} has {n}^{k}"));
                }
            }
        }
    }
    t.finish("order 10, exact")
}

pub fn criterion_4() -> Outcome {
    let rels = associativity_relations(6).map_err(err)?;
    let beta = Polynomial::var(CoeffRing::integers(), &VarSymbol::plain("beta"));
    let mut t = Tally::default();
    t.check(!rels.is_empty(), || "no relations".into());
    for (e, r) in &rels {
        t.check(e.degree() > 2, || format!("relation at degree {}", e.degree()));
        t.check(specialize_additive(r).is_zero(), || format!("additive {:?}", e.0));
        t.check(
            specialize_multiplicative(r, &beta).map_err(err)?.is_zero(),
            || format!("multiplicative {:?}", e.0),
        );
    }
    let lowest = rels.iter().map(|(e, _)| e.degree()).min().unwrap_or(0);
    t.finish(&format!("{} relations to order 6, lowest degree {lowest}", rels.len()))
}

pub fn criterion_5() -> Outcome {
    let s = Sampling::new(42);
    let mut t = Tally::default();
    let mut resamples = 0;
    for n in 2..=8 {
        let r = verify_step_identity(n, &s).map_err(err)?;
        resamples += r.resamples;
        t.check(r.pass && r.trials == 20, || format!("step n={n}"));
    }
    for n in 1..=5 {
        for m in 1..=5 {
            let r = verify_full_identity(n, m, &s).map_err(err)?;
            resamples += r.resamples;
            t.check(r.pass && r.trials == 20, || format!("full ({n},{m})"));
        }
    }
    t.finish(&format!("20 trials each, seed 42, {resamples} resamples, no inconsistent solves"))
}

/// `(X_1 + ... + X_n + E_n, F_n)` at the all-bad values, by scalar recursion.
pub fn all_bad_oracle(n: u32) -> (i64, i64) {
    let (mut s, mut e, mut f) = (1i64, 0i64, 0i64);
    for _ in 2..=n {
        let t = s + e;
        let e_next = e - 2 * t - f;
        f += t;
        e = e_next;
        s += 1;
    }
    (s + e, f)
}

pub fn criterion_6() -> Outcome {
    let mut t = Tally::default();
    for case in 1..=5 {
        t.check(claim1_case_check(case).map_err(err)?, || format!("claim 1 case {case}"));
    }
    let mut ones = 0;
    for n in 1..=8 {
        for m in 1..=8 {
            let (gx, gy) = all_bad_values(n, m).map_err(err)?;
            let (hx, fx) = all_bad_oracle(n);
            let (hy, fy) = all_bad_oracle(m);
            let want_x = BigRational::from_integer((hx + hy * fx).into());
            let want_y = BigRational::from_integer((hy + hx * fy).into());
            t.check(gx == gy && gx == want_x && gy == want_y, || format!("all-bad ({n},{m}): {gx} vs {gy}"));
            if gx == BigRational::from_integer(1.into()) {
                ones += 1;
            }
        }
    }
    for spec in ["Z/2", "Z/3", "Z/2xZ/2", "Z/6"] {
        let r = guard_enumeration(&parse_group(spec).map_err(err)?).map_err(err)?;
        t.check(r.pass, || format!("guard {spec}"));
    }
    t.finish(&format!(
        "cases 1-5 hold; all-bad sides equal for n, m <= 8 ({ones} pairs at 1 = 1, the rest 0 = 0); guard over Z/2, Z/3, Z/2xZ/2, Z/6"
    ))
}

pub fn criterion_7() -> Outcome {
    let mode = FglMode::UniversalSymmetric;
    let z = CoeffRing::integers();
    let c = VarSymbol::plain("c");
    let cp = Polynomial::var(z.clone(), &c);
    let mut t = Tally::default();
    for p in 1..=7u32 {
        let s = n_fold_sum(p, &mode, 4).map_err(err)?;
        t.check(eval_dim_truncated(&s, &c, 1).map_err(err)? == cp.scale_int(p as i64), || format!("F^{p}(c)"));
    }
    for d in 0..=4 {
        for r in d + 1..=8 {
            let cr = TruncatedSeries::from_coeffs(&[U], 8, z.clone(), [(SeriesExp::of(U, r), Polynomial::one(z.clone()))])
                .map_err(err)?;
            t.check(eval_dim_truncated(&cr, &c, d).map_err(err)?.is_zero(), || format!("c^{r} at d={d}"));
        }
    }
    let (c1, c2) = (VarSymbol::new("c", [1]), VarSymbol::new("c", [2]));
    let f = universal_fgl(&mode, 6).map_err(err)?;
    let p = f.to_polynomial(&[(U, c1.clone()), (V, c2.clone())]).map_err(err)?;
    t.check(
        specialize_additive(&p) == Polynomial::var(z.clone(), &c1) + Polynomial::var(z, &c2),
        || "additive F(c1,c2)".into(),
    );
    t.finish("F^p(c) = p*c at d = 1 for p <= 7; c^r = 0 for r > d, d <= 4; additive F(c1,c2) = c1 + c2")
}

/// Criteria 1 to 7.
pub fn run_core() -> Vec<CriterionResult> {
    vec![
        timed(1, "GDPR base cases", Some(1), criterion_1),
        timed(2, "GDPR structural suite", Some(10), criterion_2),
        timed(3, "FGL suite at order 10", Some(30), criterion_3),
        timed(4, "associativity relations to order 6", Some(10), criterion_4),
        timed(5, "reduction identities", Some(60), criterion_5),
        timed(6, "fixed point claims", Some(10), criterion_6),
        timed(7, "dimension-truncated evaluation", Some(2), criterion_7),
    ]
}

/// Renders results as JSON, the report `selftest` prints.
pub fn render_json(results: &[CriterionResult]) -> String {
    let all = results.iter().all(|r| r.pass);
    let value = serde_json::json!({ "pass": all, "criteria": results });
    serde_json::to_string_pretty(&value).expect("serializable")
}

pub fn render_text(results: &[CriterionResult]) -> String {
    let width = results.iter().map(|r| r.title.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in results {
        out.push_str(&format!(
            "[{}] {:>2}  {:<width$}  {}\n",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.title,
            r.detail
        ));
    }
    out
}

/// Criteria 1 to 8; criterion 8 reruns 1 to 7 and compares the reports.
pub fn run_all() -> Vec<CriterionResult> {
    let mut results = run_core();
    let first = render_json(&results);
    let determinism = timed(8, "determinism", None, || {
        let second = render_json(&run_core());
        Ok(if second == first {
            (true, "second run byte-identical".to_string())
        } else {
            (false, "reports differ between runs".to_string())
        })
    });
    results.push(determinism);
    results
}
