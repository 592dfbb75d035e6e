//! Upper concave envelope machinery over rectangular domains.
//!
//! Two independent routes to the envelope of a surface `f` with
//! `f(0,y) = f(x,0) = 0`:
//!
//! * [`ray_envelope`]: the one-parameter scaling form
//!   `c(r) = max_theta theta * f(r/theta)`, valid when every hull segment
//!   passes through the origin;
//! * [`TwoPointEnvelope`]: a general oracle over two-point mixtures
//!   `theta f(r1) + (1-theta) f(r2)` with `theta r1 + (1-theta) r2 = r`.
//!
//! [`check_simplification`] measures the gap between the two routes over a
//! grid, which is the machine check that the scaling simplification is
//! valid for a given surface.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::rng::SplitMix64;

/// Number of scan points seeding the ray-envelope line search.
const THETA_SCAN: usize = 1024;
/// Golden-section refinement width for line searches.
const GOLDEN_TOL: f64 = 1e-10;

/// A scalar surface on `[0, x_max] x [0, y_max]`.
///
/// The evaluator must be total on the domain and safe to call from several
/// threads at once.
pub struct ScalarField2D<F> {
    eval: F,
    x_max: f64,
    y_max: f64,
}

impl<F: Fn(f64, f64) -> f64 + Sync> ScalarField2D<F> {
    pub fn new(x_max: f64, y_max: f64, eval: F) -> Result<Self> {
        if !(x_max > 0.0 && x_max.is_finite() && y_max > 0.0 && y_max.is_finite()) {
            return Err(Error::OutOfRange("field domain extents must be positive"));
        }
        Ok(ScalarField2D { eval, x_max, y_max })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    #[inline]
    pub fn value(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    fn contains(&self, x: f64, y: f64, slack: f64) -> bool {
        x >= -slack && x <= self.x_max + slack && y >= -slack && y <= self.y_max + slack
    }
}

/// Golden-section maximization of `f` on `[lo, hi]`; returns the best
/// evaluated `(arg, value)` including the endpoints.
fn golden_max(lo: f64, hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best = (lo, f(lo));
    let v_hi = f(hi);
    if v_hi > best.1 {
        best = (hi, v_hi);
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        let (arg, val) = if fc > fd { (c, fc) } else { (d, fd) };
        if val > best.1 {
            best = (arg, val);
        }
    }
    best
}

/// Upper envelope along the ray through the origin:
/// `max over theta in (0,1], r/theta in domain, of theta * f(r/theta)`.
pub fn ray_envelope<F: Fn(f64, f64) -> f64 + Sync>(
    field: &ScalarField2D<F>,
    r_x: f64,
    r_y: f64,
) -> Result<f64> {
    if !field.contains(r_x, r_y, 0.0) {
        return Err(Error::OutOfRange("point outside field domain"));
    }
    if r_x == 0.0 && r_y == 0.0 {
        return Ok(field.value(0.0, 0.0));
    }
    let theta_min = (r_x / field.x_max).max(r_y / field.y_max);
    let objective = |theta: f64| theta * field.value(r_x / theta, r_y / theta);
    if theta_min >= 1.0 {
        return Ok(field.value(r_x, r_y));
    }
    let step = (1.0 - theta_min) / (THETA_SCAN - 1) as f64;
    let mut best_i = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..THETA_SCAN {
        let v = objective(theta_min + step * i as f64);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = theta_min + step * best_i.saturating_sub(1) as f64;
    let hi = (theta_min + step * (best_i + 1) as f64).min(1.0);
    let (_, refined) = golden_max(lo, hi, GOLDEN_TOL, objective);
    Ok(refined.max(best_v))
}

/// General two-point-mixture envelope oracle.
///
/// A coarse search runs on a precomputed table of field values (bilinear
/// interpolation off-grid), then the best candidate is polished with exact
/// evaluations: a compass search over `(theta, r1)` and golden-section
/// passes with one endpoint pinned to each domain corner.
pub struct TwoPointEnvelope<'a, F> {
    field: &'a ScalarField2D<F>,
    grid_n: usize,
    fine_n: usize,
    fine: Vec<f64>,
}

impl<'a, F: Fn(f64, f64) -> f64 + Sync> TwoPointEnvelope<'a, F> {
    pub fn new(field: &'a ScalarField2D<F>, grid_n: usize) -> Result<Self> {
        if grid_n < 8 {
            return Err(Error::OutOfRange("two-point oracle grid must be >= 8"));
        }
        // Fine table at 4x the coarse resolution; coarse nodes land on
        // every fourth fine node exactly.
        let fine_n = 4 * (grid_n - 1) + 1;
        let mut fine = Vec::with_capacity(fine_n * fine_n);
        for ix in 0..fine_n {
            let x = field.x_max * ix as f64 / (fine_n - 1) as f64;
            for iy in 0..fine_n {
                let y = field.y_max * iy as f64 / (fine_n - 1) as f64;
                fine.push(field.value(x, y));
            }
        }
        Ok(TwoPointEnvelope {
            field,
            grid_n,
            fine_n,
            fine,
        })
    }

    fn interp(&self, x: f64, y: f64) -> f64 {
        let nx = (self.fine_n - 1) as f64;
        let fx = (x / self.field.x_max * nx).clamp(0.0, nx);
        let fy = (y / self.field.y_max * nx).clamp(0.0, nx);
        let ix = (fx as usize).min(self.fine_n - 2);
        let iy = (fy as usize).min(self.fine_n - 2);
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let at = |i: usize, j: usize| self.fine[i * self.fine_n + j];
        (1.0 - tx) * ((1.0 - ty) * at(ix, iy) + ty * at(ix, iy + 1))
            + tx * ((1.0 - ty) * at(ix + 1, iy) + ty * at(ix + 1, iy + 1))
    }

    /// Exact mixture value, or `-inf` when the derived second point leaves
    /// the domain.
    fn mixture(&self, r_x: f64, r_y: f64, theta: f64, x1: f64, y1: f64) -> f64 {
        if !(theta > 1e-12 && theta < 1.0 - 1e-12) || !self.field.contains(x1, y1, 0.0) {
            return f64::NEG_INFINITY;
        }
        let x2 = (r_x - theta * x1) / (1.0 - theta);
        let y2 = (r_y - theta * y1) / (1.0 - theta);
        if !self.field.contains(x2, y2, 1e-9) {
            return f64::NEG_INFINITY;
        }
        let x2 = x2.clamp(0.0, self.field.x_max);
        let y2 = y2.clamp(0.0, self.field.y_max);
        theta * self.field.value(x1, y1) + (1.0 - theta) * self.field.value(x2, y2)
    }

    /// Envelope value at `(r_x, r_y)`.
    pub fn value(&self, r_x: f64, r_y: f64) -> Result<f64> {
        if !self.field.contains(r_x, r_y, 0.0) {
            return Err(Error::OutOfRange("point outside field domain"));
        }
        // theta = 1 degenerates to the surface itself.
        let mut best = self.field.value(r_x, r_y);

        // Coarse pass on the table.
        let coarse_step_x = self.field.x_max / (self.grid_n - 1) as f64;
        let coarse_step_y = self.field.y_max / (self.grid_n - 1) as f64;
        let mut seed = None;
        let mut seed_v = f64::NEG_INFINITY;
        for ti in 1..self.grid_n {
            let theta = ti as f64 / self.grid_n as f64;
            for i in 0..self.grid_n {
                let x1 = coarse_step_x * i as f64;
                for j in 0..self.grid_n {
                    let y1 = coarse_step_y * j as f64;
                    let x2 = (r_x - theta * x1) / (1.0 - theta);
                    let y2 = (r_y - theta * y1) / (1.0 - theta);
                    if !self.field.contains(x2, y2, 1e-9) {
                        continue;
                    }
                    let v = theta * self.fine[(4 * i) * self.fine_n + 4 * j]
                        + (1.0 - theta)
                            * self.interp(
                                x2.clamp(0.0, self.field.x_max),
                                y2.clamp(0.0, self.field.y_max),
                            );
                    if v > seed_v {
                        seed_v = v;
                        seed = Some((theta, x1, y1));
                    }
                }
            }
        }

        // Compass polish with exact evaluations.
        if let Some((t0, x0, y0)) = seed {
            best = best.max(self.compass(r_x, r_y, t0, x0, y0));
        }

        // Corner-pinned one-dimensional polish (the r2 = origin case is the
        // ray family; the other corners keep the oracle general).
        let corners = [
            (0.0, 0.0),
            (self.field.x_max, 0.0),
            (0.0, self.field.y_max),
            (self.field.x_max, self.field.y_max),
        ];
        for &(cx, cy) in &corners {
            best = best.max(self.pin_second_point(r_x, r_y, cx, cy));
            best = best.max(self.pin_first_point(r_x, r_y, cx, cy));
        }
        Ok(best)
    }

    fn compass(&self, r_x: f64, r_y: f64, t0: f64, x0: f64, y0: f64) -> f64 {
        let span = self.field.x_max.max(self.field.y_max);
        let mut t = t0;
        let mut x = x0;
        let mut y = y0;
        let mut v = self.mixture(r_x, r_y, t, x, y);
        let mut dt = 0.5 / self.grid_n as f64;
        let mut dxy = span / self.grid_n as f64;
        let mut evals = 0usize;
        while (dt > 1e-11 || dxy > 1e-11 * span) && evals < 20_000 {
            let candidates = [
                (t + dt, x, y),
                (t - dt, x, y),
                (t, (x + dxy).min(self.field.x_max), y),
                (t, (x - dxy).max(0.0), y),
                (t, x, (y + dxy).min(self.field.y_max)),
                (t, x, (y - dxy).max(0.0)),
            ];
            let mut improved = false;
            for &(tc, xc, yc) in &candidates {
                let vc = self.mixture(r_x, r_y, tc, xc, yc);
                evals += 1;
                if vc > v {
                    v = vc;
                    t = tc;
                    x = xc;
                    y = yc;
                    improved = true;
                }
            }
            if !improved {
                dt *= 0.5;
                dxy *= 0.5;
            }
        }
        v
    }

    /// Pin `r2 = (cx, cy)` and optimize the mixture over theta alone;
    /// `r1(theta) = c + (r - c)/theta`.
    fn pin_second_point(&self, r_x: f64, r_y: f64, cx: f64, cy: f64) -> f64 {
        let lo = match Self::pinned_lower_bound(r_x, cx, self.field.x_max)
            .max(Self::pinned_lower_bound(r_y, cy, self.field.y_max))
        {
            lb if lb.is_finite() => lb.max(1e-9),
            _ => return f64::NEG_INFINITY,
        };
        if lo >= 1.0 {
            return f64::NEG_INFINITY;
        }
        let f_c = self.field.value(cx, cy);
        let objective = |theta: f64| {
            let x1 = (cx + (r_x - cx) / theta).clamp(0.0, self.field.x_max);
            let y1 = (cy + (r_y - cy) / theta).clamp(0.0, self.field.y_max);
            theta * self.field.value(x1, y1) + (1.0 - theta) * f_c
        };
        golden_max(lo, 1.0, 1e-12, objective).1
    }

    /// Pin `r1 = (cx, cy)`; `r2(theta) = c + (r - c)/(1 - theta)`.
    fn pin_first_point(&self, r_x: f64, r_y: f64, cx: f64, cy: f64) -> f64 {
        let lb = Self::pinned_lower_bound(r_x, cx, self.field.x_max)
            .max(Self::pinned_lower_bound(r_y, cy, self.field.y_max));
        if !lb.is_finite() {
            return f64::NEG_INFINITY;
        }
        let hi = 1.0 - lb.max(1e-9);
        if hi <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let f_c = self.field.value(cx, cy);
        let objective = |theta: f64| {
            let x2 = (cx + (r_x - cx) / (1.0 - theta)).clamp(0.0, self.field.x_max);
            let y2 = (cy + (r_y - cy) / (1.0 - theta)).clamp(0.0, self.field.y_max);
            theta * f_c + (1.0 - theta) * self.field.value(x2, y2)
        };
        golden_max(1e-9, hi, 1e-12, objective).1
    }

    /// Smallest scale `s` such that `c + (r - c)/s` stays within `[0, max]`
    /// in one coordinate; `+inf` when no scale works.
    fn pinned_lower_bound(r: f64, c: f64, max: f64) -> f64 {
        if (r - c).abs() < 1e-15 {
            0.0
        } else if r > c {
            if max > c {
                (r - c) / (max - c)
            } else {
                f64::INFINITY
            }
        } else if c > 0.0 {
            (c - r) / c
        } else {
            f64::INFINITY
        }
    }
}

/// Convenience wrapper: build the oracle and query one point.
pub fn two_point_envelope<F: Fn(f64, f64) -> f64 + Sync>(
    field: &ScalarField2D<F>,
    r_x: f64,
    r_y: f64,
    grid_n: usize,
) -> Result<f64> {
    TwoPointEnvelope::new(field, grid_n)?.value(r_x, r_y)
}

/// Outcome of comparing the two envelope routes over a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplificationReport {
    /// Largest `|ray - two_point|` over the grid.
    pub max_gap: f64,
    pub argmax_rx: f64,
    pub argmax_ry: f64,
    /// Interior samples where the sign/curvature preconditions
    /// (`f_x, f_y > 0`, `f_xx, f_yy < 0`) failed a finite-difference check.
    pub precondition_samples_failed: u32,
    pub tol: f64,
    pub pass: bool,
}

/// Compare [`ray_envelope`] against the two-point oracle over `grid`;
/// passes iff the largest gap is within `tol`.
pub fn check_simplification<F: Fn(f64, f64) -> f64 + Sync>(
    field: &ScalarField2D<F>,
    grid: &GridSpec,
    tol: f64,
    oracle_grid_n: usize,
    seed: u64,
) -> Result<SimplificationReport> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange("tolerance must be positive"));
    }
    let oracle = TwoPointEnvelope::new(field, oracle_grid_n)?;
    let mut max_gap = -1.0;
    let mut arg = (0.0, 0.0);
    for &x in grid.xs() {
        for &y in grid.ys() {
            let ray = ray_envelope(field, x, y)?;
            let two = oracle.value(x, y)?;
            let gap = (ray - two).abs();
            if gap > max_gap {
                max_gap = gap;
                arg = (x, y);
            }
        }
    }

    // Spot-check the preconditions behind the simplification; reported,
    // not enforced.
    let mut rng = SplitMix64::new(seed);
    let h = 1e-4;
    let mut failed = 0u32;
    for _ in 0..100 {
        let x = field.x_max * (0.05 + 0.9 * rng.next_f64());
        let y = field.y_max * (0.05 + 0.9 * rng.next_f64());
        let f = |a: f64, b: f64| field.value(a, b);
        let fx = (f(x + h, y) - f(x - h, y)) / (2.0 * h);
        let fy = (f(x, y + h) - f(x, y - h)) / (2.0 * h);
        let fxx = (f(x + h, y) - 2.0 * f(x, y) + f(x - h, y)) / (h * h);
        let fyy = (f(x, y + h) - 2.0 * f(x, y) + f(x, y - h)) / (h * h);
        if !(fx > 0.0 && fy > 0.0 && fxx < 0.0 && fyy < 0.0) {
            failed += 1;
        }
    }

    Ok(SimplificationReport {
        max_gap,
        argmax_rx: arg.0,
        argmax_ry: arg.1,
        precondition_samples_failed: failed,
        tol,
        pass: max_gap <= tol,
    })
}
