//! `patrec envelope`: measure the gap between the ray-scaling envelope and
//! the general two-point oracle over a grid.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use patrec_core::binary::BinaryEnv;
use patrec_core::envelope::{check_simplification, ScalarField2D, SimplificationReport};
use patrec_core::gaussian::{GaussianEnv, R_MAX};
use patrec_core::grid::GridSpec;
use serde::Serialize;

use crate::formats;
use crate::{resolve_seed, usage, Failure};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldCase {
    /// Binary inner bound on [0,1]^2.
    Binary,
    /// Gaussian inner bound on the capped domain [0,8]^2.
    Gaussian,
    /// The quadratic reference field (1-(1-x)^2)(1-(1-y)^2) on [0,1]^2.
    Worked,
}

#[derive(Args)]
pub struct EnvelopeArgs {
    /// Field whose envelope routes are compared.
    #[arg(long, value_enum)]
    pub case: FieldCase,

    /// Crossover probability in [0, 1/2] (binary case).
    #[arg(long, default_value_t = 0.2)]
    pub q: f64,

    /// Pattern/observation correlation in [0, 1) (gaussian case).
    #[arg(long, default_value_t = 0.8)]
    pub rho_xy: f64,

    /// Comparison grid points per axis (>= 1).
    #[arg(long, default_value_t = 21)]
    pub nx: usize,
    #[arg(long, default_value_t = 21)]
    pub ny: usize,

    /// Two-point oracle discretization per axis (>= 8).
    #[arg(long, default_value_t = 64)]
    pub oracle_grid: usize,

    /// Pass threshold on the max |ray - two_point| gap.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,

    /// PRNG seed for the precondition spot checks (falls back to
    /// PATREC_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output JSON path.
    #[arg(long)]
    pub out: PathBuf,
}

/// The four-field report schema.
#[derive(Serialize)]
struct ReportJson {
    max_gap: f64,
    argmax_rx: f64,
    argmax_ry: f64,
    precondition_samples_failed: u32,
}

fn check<F: Fn(f64, f64) -> f64 + Sync>(
    x_max: f64,
    y_max: f64,
    eval: F,
    args: &EnvelopeArgs,
    seed: u64,
) -> Result<SimplificationReport, Failure> {
    let field = ScalarField2D::new(x_max, y_max, eval).map_err(usage)?;
    let grid = GridSpec::linspace(0.0, x_max, args.nx, 0.0, y_max, args.ny).map_err(usage)?;
    check_simplification(&field, &grid, args.tol, args.oracle_grid, seed).map_err(usage)
}

pub fn run(args: EnvelopeArgs) -> Result<i32, Failure> {
    let seed = resolve_seed(args.seed)?;
    let report = match args.case {
        FieldCase::Binary => {
            let env = BinaryEnv::new(args.q).map_err(usage)?;
            check(1.0, 1.0, move |x, y| env.inner_bound(x, y).unwrap_or(0.0), &args, seed)?
        }
        FieldCase::Gaussian => {
            let env = GaussianEnv::new(args.rho_xy).map_err(usage)?;
            check(
                R_MAX,
                R_MAX,
                move |x, y| env.inner_bound(x, y).unwrap_or(0.0),
                &args,
                seed,
            )?
        }
        FieldCase::Worked => check(
            1.0,
            1.0,
            |x: f64, y: f64| (1.0 - (1.0 - x) * (1.0 - x)) * (1.0 - (1.0 - y) * (1.0 - y)),
            &args,
            seed,
        )?,
    };

    formats::write_json(
        &args.out,
        &ReportJson {
            max_gap: report.max_gap,
            argmax_rx: report.argmax_rx,
            argmax_ry: report.argmax_ry,
            precondition_samples_failed: report.precondition_samples_failed,
        },
    )?;
    formats::write_meta(&args.out, "envelope", seed)?;

    eprintln!(
        "envelope: max gap = {:.3e} at (r_x={:.4}, r_y={:.4}), tol = {:.1e}, precondition samples failed = {} -> {}",
        report.max_gap,
        report.argmax_rx,
        report.argmax_ry,
        report.tol,
        report.precondition_samples_failed,
        if report.pass { "pass" } else { "FAIL" }
    );
    Ok(if report.pass { 0 } else { 1 })
}
