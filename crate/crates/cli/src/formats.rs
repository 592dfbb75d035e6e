//! File formats: surface CSV, JSON reports, and the `.meta.json` sidecar.
//!
//! Data files are byte-reproducible under a fixed seed; anything
//! wall-clock-dependent lives only in the sidecar.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use patrec_core::grid::SurfaceGrid;
use serde::Serialize;

use crate::{io_failure, Failure};

/// 12 significant digits, scientific notation.
pub fn fmt12(v: f64) -> String {
    format!("{v:.11e}")
}

/// Write `r_x,r_y,z` rows, row-major in `r_x` then `r_y`.
pub fn write_surface_csv(path: &Path, surface: &SurfaceGrid) -> Result<(), Failure> {
    let mut out = String::from("r_x,r_y,z\n");
    for (ix, &x) in surface.r_x_values().iter().enumerate() {
        for (iy, &y) in surface.r_y_values().iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt12(x),
                fmt12(y),
                fmt12(surface.value(ix, iy))
            ));
        }
    }
    fs::write(path, out).map_err(io_failure)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut body = serde_json::to_string_pretty(value).map_err(io_failure)?;
    body.push('\n');
    fs::write(path, body).map_err(io_failure)
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    created_unix_s: u64,
}

/// Sidecar `<out>.meta.json` with timestamps/versions, kept out of the data
/// files so those stay reproducible.
pub fn write_meta(out_path: &Path, command: &str, seed: u64) -> Result<(), Failure> {
    let created = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = Meta {
        tool: "patrec",
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed,
        created_unix_s: created,
    };
    let mut name = out_path.as_os_str().to_os_string();
    name.push(".meta.json");
    write_json(Path::new(&name), &meta)
}
