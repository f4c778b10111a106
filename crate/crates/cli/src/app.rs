use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cobord_core::fgl::{
    associativity_relations, denominator_profile, division_series, f_minus, inverse_series, n_fold_sum,
    universal_fgl, FglMode,
};
use cobord_core::fixedpoint::{all_bad_values, claim1_case_report, guard_enumeration, parse_group};
use cobord_core::gdpr::{GdprBuilder, Side};
use cobord_core::opalg::{verify_full_identity, verify_step_identity, Sampling, VerificationReport};
use cobord_core::{CoeffRing, Polynomial, TruncatedSeries, VarSymbol};
use serde_json::{json, Value};

use crate::selftest;

#[derive(Parser, Debug)]
#[command(name = "cobord", version, about = "GDPR polynomials, formal group laws and fixed-point checks")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Formal group law series.
    #[command(subcommand)]
    Fgl(FglCmd),
    /// Generalized double point relation polynomials.
    #[command(subcommand)]
    Gdpr(GdprCmd),
    /// Sampled verification of the reduction identities.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// The fixed-point homomorphism.
    #[command(subcommand)]
    Fixedpoint(FixedpointCmd),
    /// Runs the acceptance suite.
    Selftest,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Mode {
    Universal,
    Additive,
    /// `F(u,v) = u + v + beta*u*v`.
    Multiplicative,
}

impl Mode {
    fn build(self) -> FglMode {
        match self {
            Mode::Universal => FglMode::UniversalSymmetric,
            Mode::Additive => FglMode::Additive,
            Mode::Multiplicative => FglMode::Multiplicative(Polynomial::var(
                CoeffRing::integers(),
                &VarSymbol::plain("beta"),
            )),
        }
    }
}

#[derive(Args, Debug)]
struct OrderArgs {
    #[arg(long, value_enum, default_value_t = Mode::Universal)]
    mode: Mode,
    #[arg(long)]
    order: u32,
}

#[derive(Subcommand, Debug)]
enum FglCmd {
    Show(OrderArgs),
    Inverse(OrderArgs),
    /// F^-(u,v) = F(u, gamma(v)).
    Minus(OrderArgs),
    Nfold {
        #[arg(short = 'n')]
        n: u32,
        #[command(flatten)]
        order: OrderArgs,
    },
    Divide {
        #[arg(short = 'n')]
        n: u32,
        #[command(flatten)]
        order: OrderArgs,
        /// Also report the power of n in each denominator.
        #[arg(long)]
        denominator_profile: bool,
    },
    Relations {
        #[arg(long)]
        order: u32,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
#[value(rename_all = "UPPER")]
enum Family {
    Ex,
    Fx,
    Ey,
    Fy,
    Gx,
    Gy,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum CheckKind {
    Multilinear,
    Bounds,
    Weight,
    Mirror,
    Padding,
}

#[derive(Subcommand, Debug)]
enum GdprCmd {
    Build {
        #[arg(value_enum)]
        which: Family,
        #[arg(short = 'n')]
        n: u32,
        #[arg(short = 'm', default_value_t = 1)]
        m: u32,
    },
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        #[arg(short = 'n')]
        n: u32,
        #[arg(short = 'm', default_value_t = 1)]
        m: u32,
        /// Padded sizes for `padding`.
        #[arg(long = "big-n", required_if_eq("kind", "padding"))]
        big_n: Option<u32>,
        #[arg(long = "big-m", required_if_eq("kind", "padding"))]
        big_m: Option<u32>,
    },
}

#[derive(Args, Debug)]
struct SamplingArgs {
    #[arg(long, default_value_t = 20)]
    trials: u32,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    range: u32,
}

impl SamplingArgs {
    fn build(&self) -> Sampling {
        Sampling {
            trials: self.trials,
            range: self.range,
            ..Sampling::new(self.seed)
        }
    }
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    Step {
        #[arg(short = 'n')]
        n: u32,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    Full {
        #[arg(short = 'n')]
        n: u32,
        #[arg(short = 'm')]
        m: u32,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
}

#[derive(Subcommand, Debug)]
enum FixedpointCmd {
    Claim1 {
        #[arg(long)]
        case: u32,
    },
    Allbad {
        #[arg(short = 'n')]
        n: u32,
        #[arg(short = 'm')]
        m: u32,
    },
    Guard {
        /// A group such as `Z/2xZ/2` or `6`.
        #[arg(long)]
        group: String,
    },
}

/// What a command produced: a JSON value, its text rendering, and whether
/// the checks it ran held.
struct Output {
    json: Value,
    text: String,
    pass: bool,
}

impl Output {
    fn new(json: Value, text: String) -> Self {
        Self { json, text, pass: true }
    }

    fn checked(json: Value, text: String, pass: bool) -> Self {
        Self { json, text, pass }
    }
}

/// Result of one invocation.
pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn error_object(kind: &str, message: &str) -> String {
    let v = json!({ "error": { "kind": kind, "message": message.trim_end() } });
    format!("{v}\n")
}

pub fn run<I, T>(args: I) -> Run
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Run {
                    code: 0,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => Run {
                    code: 2,
                    stdout: String::new(),
                    stderr: error_object("usage", &e.to_string()),
                },
            };
        }
    };
    render(dispatch(&cli.command), cli.format)
}

fn render(result: Result<Output, String>, format: Format) -> Run {
    match result {
        Ok(out) => {
            let stdout = match format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&out.json).expect("serializable")),
                Format::Text => out.text,
            };
            Run {
                code: if out.pass { 0 } else { 1 },
                stdout,
                stderr: String::new(),
            }
        }
        Err(message) => Run {
            code: 2,
            stdout: String::new(),
            stderr: error_object("invalid_input", &message),
        },
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Aligned `key  value` lines.
fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

fn series_out(s: &TruncatedSeries) -> Output {
    Output::new(serde_json::to_value(s).expect("serializable"), format!("{s}\n"))
}

fn report_out(r: &VerificationReport) -> Output {
    let text = table(&[
        ("identity", r.identity.clone()),
        ("n", r.n.to_string()),
        ("m", r.m.to_string()),
        ("trials", r.trials.to_string()),
        ("resamples", r.resamples.to_string()),
        ("pass", r.pass.to_string()),
        ("seed", r.seed.to_string()),
        ("degree_bound", r.degree_bound.to_string()),
        ("sample_range", format!("[{}, {}]", r.sample_range[0], r.sample_range[1])),
    ]);
    Output::checked(serde_json::to_value(r).expect("serializable"), text, r.pass)
}

fn dispatch(cmd: &Command) -> Result<Output, String> {
    match cmd {
        Command::Fgl(c) => fgl(c),
        Command::Gdpr(c) => gdpr(c),
        Command::Verify(c) => verify(c),
        Command::Fixedpoint(c) => fixedpoint(c),
        Command::Selftest => {
            let results = selftest::run_all();
            let pass = results.iter().all(|r| r.pass);
            let json: Value = serde_json::from_str(&selftest::render_json(&results)).expect("valid");
            Ok(Output::checked(json, selftest::render_text(&results), pass))
        }
    }
}

fn fgl(cmd: &FglCmd) -> Result<Output, String> {
    match cmd {
        FglCmd::Show(a) => Ok(series_out(&universal_fgl(&a.mode.build(), a.order).map_err(err)?)),
        FglCmd::Inverse(a) => Ok(series_out(&inverse_series(&a.mode.build(), a.order).map_err(err)?)),
        FglCmd::Minus(a) => Ok(series_out(&f_minus(&a.mode.build(), a.order).map_err(err)?)),
        FglCmd::Nfold { n, order } => Ok(series_out(&n_fold_sum(*n, &order.mode.build(), order.order).map_err(err)?)),
        FglCmd::Divide {
            n,
            order,
            denominator_profile: profile,
        } => {
            let d = division_series(*n, &order.mode.build(), order.order).map_err(err)?;
            if !*profile {
                return Ok(series_out(&d));
            }
            let prof = denominator_profile(&d, *n as u64).map_err(err)?;
            let rows: Vec<Value> = prof.iter().map(|(i, k)| json!({ "i": i, "power": k })).collect();
            let mut text = format!("{d}\n");
            for (i, k) in &prof {
                text.push_str(&format!("b_{i:<3} {n}^{k}\n"));
            }
            Ok(Output::new(
                json!({ "series": serde_json::to_value(&d).expect("serializable"), "denominator_profile": rows }),
                text,
            ))
        }
        FglCmd::Relations { order } => {
            let rels = associativity_relations(*order).map_err(err)?;
            let json: Vec<Value> = rels
                .iter()
                .map(|(e, p)| json!({ "exp": e.0, "poly": p }))
                .collect();
            let text: String = rels
                .iter()
                .map(|(e, p)| {
                    let mono: Vec<String> = ["u", "v", "w"]
                        .iter()
                        .zip(e.0)
                        .filter(|(_, k)| *k > 0)
                        .map(|(v, k)| if k == 1 { v.to_string() } else { format!("{v}^{k}") })
                        .collect();
                    format!("{}: {p}\n", mono.join("*"))
                })
                .collect();
            Ok(Output::new(Value::Array(json), text))
        }
    }
}

fn gdpr(cmd: &GdprCmd) -> Result<Output, String> {
    let mut b = GdprBuilder::new();
    match cmd {
        GdprCmd::Build { which, n, m } => {
            let p = match which {
                Family::Ex => b.e(Side::X, *n),
                Family::Fx => b.f(Side::X, *n),
                Family::Ey => b.e(Side::Y, *n),
                Family::Fy => b.f(Side::Y, *n),
                Family::Gx => b.g(Side::X, *n, *m),
                Family::Gy => b.g(Side::Y, *n, *m),
            }
            .map_err(err)?;
            Ok(Output::new(serde_json::to_value(&p).expect("serializable"), format!("{p}\n")))
        }
        GdprCmd::Check {
            kind,
            n,
            m,
            big_n,
            big_m,
        } => {
            let (n, m) = (*n, *m);
            let both = |b: &mut GdprBuilder, f: &dyn Fn(&cobord_core::gdpr::GParts) -> Result<bool, String>| {
                let gx = b.g_parts(Side::X, n, m).map_err(err)?;
                let gy = b.g_parts(Side::Y, m, n).map_err(err)?;
                Ok::<bool, String>(f(&gx)? && f(&gy)?)
            };
            let (name, pass) = match kind {
                CheckKind::Multilinear => ("multilinear", both(&mut b, &|g| g.check_multilinear().map_err(err))?),
                CheckKind::Bounds => ("bounds", both(&mut b, &|g| g.check_index_bounds(n, m).map_err(err))?),
                CheckKind::Weight => ("weight", both(&mut b, &|g| g.weight_check().map_err(err))?),
                CheckKind::Mirror => ("mirror", b.mirror_check(n, m).map_err(err)?),
                CheckKind::Padding => {
                    let (bn, bm) = (big_n.expect("required"), big_m.expect("required"));
                    ("padding", b.padding_check(bn, bm, n, m).map_err(err)?)
                }
            };
            let mut json = json!({ "check": name, "n": n, "m": m, "pass": pass });
            let mut rows = vec![("check", name.to_string()), ("n", n.to_string()), ("m", m.to_string())];
            if let (Some(bn), Some(bm)) = (big_n, big_m) {
                json["big_n"] = json!(bn);
                json["big_m"] = json!(bm);
                rows.push(("big_n", bn.to_string()));
                rows.push(("big_m", bm.to_string()));
            }
            rows.push(("pass", pass.to_string()));
            Ok(Output::checked(json, table(&rows), pass))
        }
    }
}

fn verify(cmd: &VerifyCmd) -> Result<Output, String> {
    let r = match cmd {
        VerifyCmd::Step { n, sampling } => verify_step_identity(*n, &sampling.build()),
        VerifyCmd::Full { n, m, sampling } => verify_full_identity(*n, *m, &sampling.build()),
    }
    .map_err(err)?;
    Ok(report_out(&r))
}

fn fixedpoint(cmd: &FixedpointCmd) -> Result<Output, String> {
    match cmd {
        FixedpointCmd::Claim1 { case } => {
            let r = claim1_case_report(*case).map_err(err)?;
            let text = table(&[
                ("case", r.case.to_string()),
                ("lhs", r.lhs.to_string()),
                ("rhs", r.rhs.to_string()),
                ("equal", r.equal.to_string()),
            ]);
            Ok(Output::checked(serde_json::to_value(&r).expect("serializable"), text, r.equal))
        }
        FixedpointCmd::Allbad { n, m } => {
            if *n == 0 || *m == 0 {
                return Err("n and m must be at least 1".into());
            }
            let (x, y) = all_bad_values(*n, *m).map_err(err)?;
            let equal = x == y;
            let num = |q: &num_rational::BigRational| -> Value {
                serde_json::from_str(&q.to_string()).unwrap_or_else(|_| Value::String(q.to_string()))
            };
            let json = json!({ "n": n, "m": m, "lhs": num(&x), "rhs": num(&y), "equal": equal });
            let text = table(&[
                ("n", n.to_string()),
                ("m", m.to_string()),
                ("lhs", x.to_string()),
                ("rhs", y.to_string()),
                ("equal", equal.to_string()),
            ]);
            Ok(Output::checked(json, text, equal))
        }
        FixedpointCmd::Guard { group } => {
            let r = guard_enumeration(&parse_group(group).map_err(err)?).map_err(err)?;
            let text = table(&[
                ("group", format!("{:?}", r.group)),
                ("contexts", r.contexts.to_string()),
                ("checks", r.checks.to_string()),
                ("pass", r.pass.to_string()),
            ]);
            Ok(Output::checked(serde_json::to_value(&r).expect("serializable"), text, r.pass))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_outcome() {
        let ok = render(Ok(Output::new(json!(1), "1\n".into())), Format::Text);
        assert_eq!((ok.code, ok.stdout.as_str()), (0, "1\n"));
        let failed = render(Ok(Output::checked(json!({"pass": false}), String::new(), false)), Format::Json);
        assert_eq!(failed.code, 1);
        assert!(failed.stdout.contains("false"));
        let bad = render(Err("n must be at least 2".into()), Format::Json);
        assert_eq!(bad.code, 2);
        assert!(bad.stdout.is_empty());
        let v: Value = serde_json::from_str(&bad.stderr).unwrap();
        assert_eq!(v["error"]["kind"], "invalid_input");
    }
}
