//! Closed-form rate-region surfaces for the binary symmetric environment:
//! uniform Bernoulli patterns observed through a BSC with crossover `q`.
//!
//! The inner-bound surface is `1 - h(q * q_x * q_y)` where `*` is binary
//! convolution and `q_x, q_y` are the test-channel crossovers implied by the
//! rates; the outer-bound surface is its upper concave envelope, which
//! reduces to the one-parameter ray form.

use alloc::vec::Vec;

use crate::envelope::{ray_envelope, ScalarField2D};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, SurfaceGrid, SurfaceKind};
use crate::math;
use crate::pmf::{build_chain_pmf, Channel, JointPmf, RateTriple, X};

/// Binary entropy `h(p) = -p log2 p - (1-p) log2 (1-p)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange("binary entropy needs p in [0,1]"));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * math::log2(p) - (1.0 - p) * math::log2(1.0 - p))
}

/// Inverse of [`binary_entropy`] on `[0, 1/2]`, found by bisection
/// (at most 200 iterations or until the bracket is narrower than 1e-14).
pub fn inverse_binary_entropy(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange("inverse binary entropy needs t in [0,1]"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t == 1.0 {
        return Ok(0.5);
    }
    let mut lo = 0.0f64;
    let mut hi = 0.5f64;
    for _ in 0..200 {
        if hi - lo < 1e-14 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid)? < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Binary convolution `a * b = a(1-b) + b(1-a)`: the crossover probability
/// of two cascaded binary symmetric channels.
pub fn binary_convolve(a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
        return Err(Error::OutOfRange("binary convolution needs arguments in [0,1]"));
    }
    Ok(a * (1.0 - b) + b * (1.0 - a))
}

/// The binary symmetric environment, `q` restricted to `[0, 1/2]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinaryEnv {
    q: f64,
}

impl BinaryEnv {
    pub fn new(q: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&q) {
            return Err(Error::OutOfRange("crossover must be in [0, 1/2]"));
        }
        Ok(BinaryEnv { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Inner-bound surface `1 - h(q * q_x * q_y)` at rates in `[0,1]`.
    pub fn inner_bound(&self, r_x: f64, r_y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r_x) || !(0.0..=1.0).contains(&r_y) {
            return Err(Error::OutOfRange("binary rates must be in [0,1]"));
        }
        let q_x = inverse_binary_entropy(1.0 - r_x)?;
        let q_y = inverse_binary_entropy(1.0 - r_y)?;
        let eff = binary_convolve(binary_convolve(self.q, q_x)?, q_y)?;
        Ok((1.0 - binary_entropy(eff)?).max(0.0))
    }

    fn field(&self) -> ScalarField2D<impl Fn(f64, f64) -> f64 + Sync + '_> {
        let env = *self;
        ScalarField2D::new(1.0, 1.0, move |x, y| {
            env.inner_bound(x, y).unwrap_or(0.0)
        })
        .expect("unit square domain")
    }

    /// Outer-bound surface: upper concave envelope of the inner bound via
    /// the ray-scaling form.
    pub fn outer_bound(&self, r_x: f64, r_y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r_x) || !(0.0..=1.0).contains(&r_y) {
            return Err(Error::OutOfRange("binary rates must be in [0,1]"));
        }
        ray_envelope(&self.field(), r_x, r_y)
    }

    /// Build the additive-noise auxiliary pair `U = X + W_x`, `V = Y + W_y`
    /// (mod 2) through the pmf machinery and return its rate triple. Must
    /// match `(1 - h(q*q_x*q_y), 1 - h(q_x), 1 - h(q_y))`.
    pub fn forward_construction_check(&self, q_x: f64, q_y: f64) -> Result<RateTriple> {
        if !(0.0..=0.5).contains(&q_x) || !(0.0..=0.5).contains(&q_y) {
            return Err(Error::OutOfRange("test-channel crossovers must be in [0, 1/2]"));
        }
        let p_x = JointPmf::from_marginal(X, &[0.5, 0.5])?;
        let pmf = build_chain_pmf(
            &p_x,
            &Channel::bsc(self.q)?,
            &Channel::bsc(q_x)?,
            &Channel::bsc(q_y)?,
        )?;
        pmf.rate_triple_from_aux()
    }

    /// Sample the requested surface over `grid` (rates in `[0,1]`).
    pub fn surface(&self, grid: &GridSpec, which: SurfaceKind) -> Result<SurfaceGrid> {
        if which == SurfaceKind::HullGap {
            return Err(Error::InvalidConfig(
                "hull_gap is not defined for the binary case (outer bound is the ray envelope)",
            ));
        }
        let mut z = Vec::with_capacity(grid.cells());
        for &x in grid.xs() {
            for &y in grid.ys() {
                let v = match which {
                    SurfaceKind::Inner => self.inner_bound(x, y)?,
                    SurfaceKind::Outer => self.outer_bound(x, y)?,
                    SurfaceKind::Difference => {
                        self.outer_bound(x, y)? - self.inner_bound(x, y)?
                    }
                    SurfaceKind::HullGap => unreachable!(),
                };
                z.push(v);
            }
        }
        SurfaceGrid::new(
            which.label(),
            grid.xs().to_vec(),
            grid.ys().to_vec(),
            z,
            false,
        )
    }
}
