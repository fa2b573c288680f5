//! Command-line front end. Every subcommand prints one JSON document to stdout.
//!
//! Exit codes: 0 success, 1 a violated bound or failed claim, 2 usage or input
//! errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::audit::{privacy_profile, verify, Verdict};
use crate::bounds::{euclidean_bound_check, ratio_bound_scan};
use crate::error::{Error, Result};
use crate::io::{parse_mechanism, parse_scenario};
use crate::params::{parse_delta, Epsilon};
use crate::participation::{check_participation, compare_variants, exact_min_compensation, participation_cost};
use crate::rational::Rational;
use crate::scenarios::{run_hcua, run_laplace_optout, run_maimonides, run_unlimited_stakes};

pub const THREADS_ENV: &str = "DP_PARTICIPATION_THREADS";

#[derive(Debug, Parser)]
#[command(name = "dp-participation", version, about = "Exact privacy audits and participation analysis")]
struct Cli {
    /// Worker threads for the exhaustive scans.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tightest pure epsilon and the delta curve of a table mechanism.
    Audit {
        #[arg(long)]
        mechanism: PathBuf,
        /// Also check an (epsilon, delta) claim; exits 1 if it fails.
        #[arg(long, requires = "delta")]
        epsilon: Option<Epsilon>,
        #[arg(long, requires = "epsilon", value_parser = delta_arg)]
        delta: Option<Rational>,
    },
    /// Ratio and difference bounds on expected utility for the scenario's agent.
    Bounds {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Voluntary participation and the compensation needed to restore it.
    Participation {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Which of two (epsilon, delta) guarantees is cheaper to compensate.
    Compare {
        #[arg(long)]
        eps: Epsilon,
        #[arg(long, value_parser = delta_arg)]
        delta: Rational,
        #[arg(long)]
        eps2: Epsilon,
        #[arg(long, value_parser = delta_arg)]
        delta2: Rational,
        /// Number of consequences.
        #[arg(long)]
        c: usize,
    },
    /// Re-run one of the packaged worked examples.
    Reproduce {
        #[arg(value_enum)]
        scenario: Example,
        #[arg(long)]
        epsilon: Option<Epsilon>,
        #[arg(long, value_parser = delta_arg)]
        delta: Option<Rational>,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Example {
    Hcua,
    LaplaceOptout,
    UnlimitedStakes,
    Maimonides,
}

fn delta_arg(s: &str) -> Result<Rational, String> {
    parse_delta(s).map_err(|e| e.to_string())
}

fn eps_or(e: Option<Epsilon>, default: &str) -> Epsilon {
    e.unwrap_or_else(|| default.parse().expect("valid default epsilon"))
}

struct Outcome {
    body: serde_json::Value,
    ok: bool,
}

fn outcome(body: impl Serialize, ok: bool) -> Result<Outcome> {
    Ok(Outcome { body: serde_json::to_value(body)?, ok })
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Audit { mechanism, epsilon, delta } => {
            let m = parse_mechanism(&mechanism)?;
            let table = m
                .as_table()
                .ok_or_else(|| Error::invalid("audit needs a finite table mechanism"))?;
            let profile = privacy_profile(table);
            match (epsilon, delta) {
                (Some(e), Some(d)) => {
                    let verdict = verify(table, &e, &d);
                    let ok = verdict.is_satisfied();
                    let verdict = match verdict {
                        Verdict::Satisfied => json!({"satisfied": true}),
                        Verdict::Violated { tight_delta, witness } => {
                            json!({"satisfied": false, "tight_delta": tight_delta, "witness": witness})
                        }
                    };
                    outcome(json!({"profile": profile, "claim": {"epsilon": e, "delta": d.to_string(), "verdict": verdict}}), ok)
                }
                _ => outcome(profile, true),
            }
        }
        Command::Bounds { scenario } => {
            let s = parse_scenario(&scenario)?;
            let model = s.model();
            let u = s.utility();
            let (eps, delta) = s.privacy_parameters()?;
            let euclid = euclidean_bound_check(&model, u, s.agent, &eps, &delta)?;
            let ratio = if u.is_nonnegative_real() {
                Some(ratio_bound_scan(&model, u, s.agent, &eps)?)
            } else {
                None
            };
            let ok = euclid.holds && ratio.as_ref().is_none_or(|r| r.holds);
            let ratio = match ratio {
                Some(r) => serde_json::to_value(r)?,
                None => json!({"applicable": false, "reason": "utility is not nonnegative and real"}),
            };
            outcome(
                json!({"agent": s.agent, "epsilon": eps, "delta": delta, "ratio": ratio, "difference": euclid}),
                ok,
            )
        }
        Command::Participation { scenario } => {
            let s = parse_scenario(&scenario)?;
            let model = s.model();
            let (eps, delta) = s.privacy_parameters()?;
            let report = check_participation(&model, s.utility(), s.agent)?;
            let compensation = exact_min_compensation(&model, s.utility(), s.agent, &eps, &delta)?;
            let ok = report.satisfied;
            outcome(
                json!({"epsilon": eps, "delta": delta, "participation": report, "compensation": compensation}),
                ok,
            )
        }
        Command::Compare { eps, delta, eps2, delta2, c } => {
            let order = compare_variants((&eps, &delta), (&eps2, &delta2), c)?;
            let cost = |e: &Epsilon, d: &Rational| {
                let r = participation_cost(e, d, c);
                json!({"epsilon": e, "delta": d.to_string(), "cost_factor": r, "decimal": r.to_f64()})
            };
            outcome(json!({"order": order, "first": cost(&eps, &delta), "second": cost(&eps2, &delta2), "consequences": c}), true)
        }
        Command::Reproduce { scenario, epsilon, delta, n } => {
            let v = match scenario {
                Example::Hcua => run_hcua(&eps_or(epsilon, "ln(2)"))?,
                Example::LaplaceOptout => run_laplace_optout(n.unwrap_or(3), &eps_or(epsilon, "1"))?,
                Example::UnlimitedStakes => run_unlimited_stakes(n.unwrap_or(3), &eps_or(epsilon, "1"))?,
                Example::Maimonides => {
                    let d = delta.unwrap_or_else(|| crate::rational::ratio(1, 20));
                    run_maimonides(&eps_or(epsilon, "ln(2)"), &d)?
                }
            };
            let ok = v.pass;
            outcome(v, ok)
        }
    }
}

fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    configure_threads(cli.threads);
    match execute(cli.command) {
        Ok(o) => {
            let text = serde_json::to_string_pretty(&o.body).expect("json values serialize");
            let _ = writeln!(out, "{text}");
            if o.ok { 0 } else { 1 }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
