//! Rectangular evaluation grids and sampled surfaces.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Strictly increasing axis grids over the rate plane.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl GridSpec {
    pub fn from_axes(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        for axis in [&xs, &ys] {
            if axis.is_empty() {
                return Err(Error::InvalidGrid("empty axis"));
            }
            for w in axis.windows(2) {
                if !(w[1] > w[0]) {
                    return Err(Error::InvalidGrid("axis values must be strictly increasing"));
                }
            }
            if !axis.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidGrid("axis values must be finite"));
            }
        }
        Ok(GridSpec { xs, ys })
    }

    /// `nx` x `ny` evenly spaced grid on `[x0,x1] x [y0,y1]`.
    pub fn linspace(x0: f64, x1: f64, nx: usize, y0: f64, y1: f64, ny: usize) -> Result<Self> {
        let axis = |a: f64, b: f64, n: usize| -> Result<Vec<f64>> {
            if n == 0 {
                return Err(Error::InvalidGrid("zero grid points"));
            }
            if n == 1 {
                return Ok([a].to_vec());
            }
            if !(b > a) {
                return Err(Error::InvalidGrid("axis upper bound must exceed lower"));
            }
            Ok((0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect())
        };
        GridSpec::from_axes(axis(x0, x1, nx)?, axis(y0, y1, ny)?)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn cells(&self) -> usize {
        self.xs.len() * self.ys.len()
    }
}

/// Which surface of the rate region to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceKind {
    /// Inner-bound surface (binary `g`, Gaussian `G`).
    Inner,
    /// Outer-bound surface (binary upper concave envelope, Gaussian closed form).
    Outer,
    /// Outer minus inner.
    Difference,
    /// Outer minus the ray envelope of the inner bound (Gaussian only).
    HullGap,
}

impl SurfaceKind {
    pub fn label(self) -> &'static str {
        match self {
            SurfaceKind::Inner => "inner",
            SurfaceKind::Outer => "outer",
            SurfaceKind::Difference => "difference",
            SurfaceKind::HullGap => "hull_gap",
        }
    }
}

/// Sampled surface values over a [`GridSpec`], row-major in `r_x` then `r_y`.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceGrid {
    label: &'static str,
    r_x_values: Vec<f64>,
    r_y_values: Vec<f64>,
    z: Vec<f64>,
    clamped: bool,
}

impl SurfaceGrid {
    pub fn new(
        label: &'static str,
        r_x_values: Vec<f64>,
        r_y_values: Vec<f64>,
        z: Vec<f64>,
        clamped: bool,
    ) -> Result<Self> {
        Self::with_floor(label, r_x_values, r_y_values, z, clamped, -1e-9)
    }

    /// Like [`SurfaceGrid::new`] with an explicit negativity floor. The
    /// hull-gap surface needs a looser -1e-6: near rate saturation the
    /// outer bound's log argument loses ~7 digits to cancellation.
    pub fn with_floor(
        label: &'static str,
        r_x_values: Vec<f64>,
        r_y_values: Vec<f64>,
        z: Vec<f64>,
        clamped: bool,
        floor: f64,
    ) -> Result<Self> {
        if z.len() != r_x_values.len() * r_y_values.len() {
            return Err(Error::InvalidGrid("z length != grid size"));
        }
        if z.iter().any(|&v| !(v >= floor)) {
            return Err(Error::Inconsistency("surface value below negativity floor"));
        }
        Ok(SurfaceGrid {
            label,
            r_x_values,
            r_y_values,
            z,
            clamped,
        })
    }

    pub fn label(&self) -> &'static str {
        self.label
    }

    pub fn r_x_values(&self) -> &[f64] {
        &self.r_x_values
    }

    pub fn r_y_values(&self) -> &[f64] {
        &self.r_y_values
    }

    /// True when some requested rate exceeded the module's cap and was
    /// clamped before evaluation.
    pub fn clamped(&self) -> bool {
        self.clamped
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.z[ix * self.r_y_values.len() + iy]
    }

    pub fn values(&self) -> &[f64] {
        &self.z
    }

    pub fn max_value(&self) -> f64 {
        self.z.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.z.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `(r_x, r_y, z)` of the maximizing cell (first in row-major order).
    pub fn argmax(&self) -> (f64, f64, f64) {
        let mut best = (0usize, 0usize);
        let mut best_v = f64::NEG_INFINITY;
        for ix in 0..self.r_x_values.len() {
            for iy in 0..self.r_y_values.len() {
                let v = self.value(ix, iy);
                if v > best_v {
                    best_v = v;
                    best = (ix, iy);
                }
            }
        }
        (self.r_x_values[best.0], self.r_y_values[best.1], best_v)
    }
}
