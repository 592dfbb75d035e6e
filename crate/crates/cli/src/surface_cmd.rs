//! `patrec surface`: sample a bound surface over a rate grid into CSV.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use patrec_core::binary::BinaryEnv;
use patrec_core::gaussian::{GaussianEnv, R_MAX};
use patrec_core::grid::{GridSpec, SurfaceGrid, SurfaceKind};

use crate::formats;
use crate::{usage, worker_count, Failure};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    Binary,
    Gaussian,
}

#[derive(Args)]
pub struct SurfaceArgs {
    /// Environment: binary (BSC) or gaussian.
    #[arg(long, value_enum)]
    pub case: Case,

    /// Surface to evaluate: g | g_star | difference (binary);
    /// G | G_star | difference | hull_gap (gaussian). `inner`/`outer`
    /// are accepted aliases.
    #[arg(long)]
    pub which: String,

    /// Crossover probability in [0, 1/2] (binary case).
    #[arg(long, default_value_t = 0.2)]
    pub q: f64,

    /// Pattern/observation correlation in [0, 1) (gaussian case).
    #[arg(long, default_value_t = 0.8)]
    pub rho_xy: f64,

    /// Grid points along r_x (>= 1).
    #[arg(long, default_value_t = 41)]
    pub nx: usize,

    /// Grid points along r_y (>= 1).
    #[arg(long, default_value_t = 41)]
    pub ny: usize,

    /// Upper rate limit along r_x; defaults to 1 (binary) or 8 (gaussian).
    #[arg(long)]
    pub rx_max: Option<f64>,

    /// Upper rate limit along r_y; defaults as for --rx-max.
    #[arg(long)]
    pub ry_max: Option<f64>,

    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,

    /// Worker thread cap; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
}

fn parse_which(s: &str) -> Result<SurfaceKind, Failure> {
    match s.to_ascii_lowercase().as_str() {
        "g" | "inner" => Ok(SurfaceKind::Inner),
        "g_star" | "gstar" | "outer" => Ok(SurfaceKind::Outer),
        "difference" | "diff" => Ok(SurfaceKind::Difference),
        "hull_gap" | "hullgap" => Ok(SurfaceKind::HullGap),
        other => Err(Failure::Usage(format!(
            "unknown surface {other:?}; expected g|g_star|difference|hull_gap"
        ))),
    }
}

/// Evaluate the surface in row bands on up to `workers` threads. Cell
/// values do not depend on the banding, so the output is identical for any
/// thread count.
fn banded_surface(
    grid: &GridSpec,
    which: SurfaceKind,
    workers: usize,
    eval: impl Fn(&GridSpec, SurfaceKind) -> patrec_core::Result<SurfaceGrid> + Sync,
) -> Result<SurfaceGrid, Failure> {
    let xs = grid.xs();
    let workers = workers.min(xs.len()).max(1);
    if workers == 1 {
        return eval(grid, which).map_err(usage);
    }
    let chunk = xs.len().div_ceil(workers);
    let bands: Vec<patrec_core::Result<SurfaceGrid>> = std::thread::scope(|scope| {
        let handles: Vec<_> = xs
            .chunks(chunk)
            .map(|band_xs| {
                let band = GridSpec::from_axes(band_xs.to_vec(), grid.ys().to_vec());
                let eval = &eval;
                scope.spawn(move || eval(&band?, which))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut z = Vec::with_capacity(grid.cells());
    let mut clamped = false;
    for band in bands {
        let band = band.map_err(usage)?;
        clamped |= band.clamped();
        z.extend_from_slice(band.values());
    }
    SurfaceGrid::with_floor(
        which.label(),
        xs.to_vec(),
        grid.ys().to_vec(),
        z,
        clamped,
        -1e-6,
    )
    .map_err(usage)
}

pub fn run(args: SurfaceArgs) -> Result<i32, Failure> {
    let which = parse_which(&args.which)?;
    let workers = worker_count(args.threads);
    let default_max = match args.case {
        Case::Binary => 1.0,
        Case::Gaussian => R_MAX,
    };
    let rx_max = args.rx_max.unwrap_or(default_max);
    let ry_max = args.ry_max.unwrap_or(default_max);
    let grid = GridSpec::linspace(0.0, rx_max, args.nx, 0.0, ry_max, args.ny).map_err(usage)?;

    let surface = match args.case {
        Case::Binary => {
            let env = BinaryEnv::new(args.q).map_err(usage)?;
            banded_surface(&grid, which, workers, |g, w| env.surface(g, w))?
        }
        Case::Gaussian => {
            let env = GaussianEnv::new(args.rho_xy).map_err(usage)?;
            banded_surface(&grid, which, workers, |g, w| env.surface(g, w))?
        }
    };

    formats::write_surface_csv(&args.out, &surface)?;
    formats::write_meta(&args.out, "surface", 0)?;

    let (ax, ay, max_z) = surface.argmax();
    eprintln!(
        "surface {}: {} cells, max z = {:.6e} at (r_x={ax:.4}, r_y={ay:.4}), min z = {:.3e}{}",
        surface.label(),
        grid.cells(),
        max_z,
        surface.min_value(),
        if surface.clamped() {
            " [rates clamped at cap]"
        } else {
            ""
        }
    );
    Ok(0)
}
