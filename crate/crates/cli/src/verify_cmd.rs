//! `patrec verify`: run the brute-force identity suites and aggregate
//! their reports. Exit 0 iff every suite passes.

use std::path::PathBuf;

use clap::Args;
use patrec_core::lemmas::{self, LemmaReport};
use serde::Serialize;

use crate::formats;
use crate::{resolve_seed, usage, Failure};

#[derive(Args)]
pub struct VerifyArgs {
    /// Comma-separated suite names, or "all". Known suites: ab_lemma,
    /// gelfand_pinsker, time_sharing, alt_form, rate_excess,
    /// no_ind_identity.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub suites: Vec<String>,

    /// Cases per suite (>= 1); defaults to each suite's own count
    /// (10^4 for ab_lemma and no_ind_identity, 10^3 otherwise).
    #[arg(long)]
    pub cases: Option<u64>,

    /// PRNG seed (falls back to PATREC_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output JSON path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct VerifyReport {
    seed: u64,
    all_pass: bool,
    suites: Vec<LemmaReport>,
}

pub fn run(args: VerifyArgs) -> Result<i32, Failure> {
    let seed = resolve_seed(args.seed)?;
    if args.cases == Some(0) {
        return Err(Failure::Usage("--cases must be at least 1".into()));
    }
    let names: Vec<&str> = if args.suites.len() == 1 && args.suites[0] == "all" {
        lemmas::SUITES.to_vec()
    } else {
        let mut out = Vec::with_capacity(args.suites.len());
        for s in &args.suites {
            if !lemmas::SUITES.contains(&s.as_str()) {
                return Err(Failure::Usage(format!(
                    "unknown suite {s:?}; known suites: {}",
                    lemmas::SUITES.join(", ")
                )));
            }
            out.push(s.as_str());
        }
        out
    };

    let mut reports = Vec::with_capacity(names.len());
    for name in names {
        let report = lemmas::run_suite(name, seed, args.cases).map_err(usage)?;
        eprintln!(
            "verify {}: {} cases, max violation {:.3e} (tol {:.1e}) -> {}",
            report.lemma_id,
            report.cases_run,
            report.max_violation,
            report.tolerance,
            if report.pass { "pass" } else { "FAIL" }
        );
        reports.push(report);
    }
    let all_pass = reports.iter().all(|r| r.pass);
    let report = VerifyReport {
        seed,
        all_pass,
        suites: reports,
    };
    match &args.out {
        Some(path) => {
            formats::write_json(path, &report)?;
            formats::write_meta(path, "verify", seed)?;
        }
        None => {
            let body = serde_json::to_string_pretty(&report).map_err(crate::io_failure)?;
            println!("{body}");
        }
    }
    Ok(if all_pass { 0 } else { 1 })
}
