//! Closed-form rate-region surfaces for jointly Gaussian patterns and
//! observations with correlation `rho_xy`.
//!
//! Rates map to test-channel correlations through
//! `r = -1/2 log2(1 - rho^2)`; the inner bound is
//! `-1/2 log2(1 - rho_xy^2 rho_xu^2 rho_yv^2)` and the outer bound follows
//! from minimizing `I(XY;UV)` over the free correlation `rho_uv` subject to
//! the two short Markov chains. The minimizer has the closed form
//! `rho* = beta/(2 gamma) - sqrt((beta/(2 gamma))^2 - 1)`.
//!
//! The determinant form of `I(XY;UV)` is the ground truth here; it reduces
//! to the rational form `-1/2 log2[1 + (2 rho_uv gamma - beta)/(1 -
//! rho_uv^2)]` — linear in `rho_uv`, which is what makes `rho*` its
//! stationary point — and the two routes are cross-checked numerically.

use alloc::vec::Vec;

use crate::envelope::{ray_envelope, ScalarField2D};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, SurfaceGrid, SurfaceKind};
use crate::math;

/// Rate cap in bits; beyond this the surfaces are saturated to within
/// `2^-16` and the log forms start losing precision.
pub const R_MAX: f64 = 8.0;

/// Correlation magnitudes are kept strictly below this to avoid the
/// singular (veridical) limit where mutual informations diverge.
pub const RHO_CAP: f64 = 1.0 - 1e-6;

/// Test-channel correlation implied by a rate: `sqrt(1 - 2^(-2r))`.
/// Rates above [`R_MAX`] are clamped.
pub fn rho_from_rate(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::OutOfRange("rates must be nonnegative"));
    }
    let r = r.min(R_MAX);
    Ok(math::sqrt(1.0 - math::exp2(-2.0 * r)))
}

/// Scalar Gaussian Markov-chain correlation rule: for `A - B - C`,
/// `rho_ac = rho_ab * rho_bc`.
pub fn markov_correlation(rho_ab: f64, rho_bc: f64) -> Result<f64> {
    if rho_ab.abs() >= 1.0 || rho_bc.abs() >= 1.0 {
        return Err(Error::OutOfRange("correlation magnitudes must be < 1"));
    }
    Ok(rho_ab * rho_bc)
}

/// The `gamma`/`beta` pair and the stationary correlation `rho*` of the
/// outer-bound optimization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaBeta {
    pub gamma: f64,
    pub beta: f64,
    pub rho_star: f64,
}

/// `gamma = rho_xy rho_xu rho_yv`,
/// `beta = rho_xu^2 + rho_yv^2 - (1 - rho_xy^2) rho_xu^2 rho_yv^2`,
/// `rho* = beta/(2 gamma) - sqrt((beta/(2 gamma))^2 - 1)`.
///
/// Requires all three correlations strictly inside `(0, 1)`; at zero the
/// ratio `beta / (2 gamma)` is undefined.
pub fn gamma_beta(rho_xy: f64, rho_xu: f64, rho_yv: f64) -> Result<GammaBeta> {
    for rho in [rho_xy, rho_xu, rho_yv] {
        if rho <= 0.0 {
            return Err(Error::DegenerateInput("correlations must be positive"));
        }
        if rho >= 1.0 {
            return Err(Error::OutOfRange("correlations must be < 1"));
        }
    }
    let gamma = rho_xy * rho_xu * rho_yv;
    let beta = rho_xu * rho_xu + rho_yv * rho_yv
        - (1.0 - rho_xy * rho_xy) * rho_xu * rho_xu * rho_yv * rho_yv;
    if !(beta > 2.0 * gamma && gamma > 0.0) {
        // Holds for all correlations strictly inside (0,1); equality needs
        // rho_xy = 1 with rho_xu = rho_yv.
        return Err(Error::Inconsistency("beta > 2 gamma > 0 violated"));
    }
    let s = beta / (2.0 * gamma);
    let rho_star = s - math::sqrt(s * s - 1.0);
    Ok(GammaBeta {
        gamma,
        beta,
        rho_star,
    })
}

/// Correlation coefficients of the jointly Gaussian quadruple under the two
/// short chains `U - X - Y` and `X - Y - V`; the cross terms
/// `rho_xv = rho_xy rho_yv` and `rho_yu = rho_xy rho_xu` are implied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationSet {
    pub rho_xy: f64,
    pub rho_xu: f64,
    pub rho_yv: f64,
    pub rho_uv: Option<f64>,
}

impl CorrelationSet {
    pub fn new(rho_xy: f64, rho_xu: f64, rho_yv: f64, rho_uv: Option<f64>) -> Result<Self> {
        for rho in [rho_xy, rho_xu, rho_yv] {
            if !(0.0..=RHO_CAP).contains(&rho) {
                return Err(Error::OutOfRange(
                    "correlations must be in [0, 1 - 1e-6] (the veridical limit diverges)",
                ));
            }
        }
        if let Some(d) = rho_uv {
            if d.abs() > RHO_CAP {
                return Err(Error::OutOfRange("rho_uv magnitude must be <= 1 - 1e-6"));
            }
        }
        Ok(CorrelationSet {
            rho_xy,
            rho_xu,
            rho_yv,
            rho_uv,
        })
    }

    pub fn rho_xv(&self) -> f64 {
        self.rho_xy * self.rho_yv
    }

    pub fn rho_yu(&self) -> f64 {
        self.rho_xy * self.rho_xu
    }

    /// Conditional covariance of `(X,Y)` given `(U,V)` (Schur complement of
    /// the `(U,V)` block in the assembled 4x4 correlation matrix).
    fn conditional_covariance(&self, rho_uv: f64) -> [[f64; 2]; 2] {
        let c = self.rho_xy;
        let cross = [[self.rho_xu, self.rho_xv()], [self.rho_yu(), self.rho_yv]];
        let det_uv = 1.0 - rho_uv * rho_uv;
        let inv_uv = [
            [1.0 / det_uv, -rho_uv / det_uv],
            [-rho_uv / det_uv, 1.0 / det_uv],
        ];
        let mut sigma = [[1.0, c], [c, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for k in 0..2 {
                    for l in 0..2 {
                        acc += cross[i][k] * inv_uv[k][l] * cross[j][l];
                    }
                }
                sigma[i][j] -= acc;
            }
        }
        sigma
    }
}

/// `I(XY;UV)` in bits from the determinant form
/// `1/2 log2 det C - 1/2 log2 det(C - C_{xy,uv} C_{uv,uv}^-1 C_{uv,xy})`.
pub fn mutual_information_xyuv(cs: &CorrelationSet) -> Result<f64> {
    let d = cs
        .rho_uv
        .ok_or(Error::DegenerateInput("rho_uv must be set"))?;
    let sigma = cs.conditional_covariance(d);
    let det_sigma = sigma[0][0] * sigma[1][1] - sigma[0][1] * sigma[1][0];
    let psd_tol = 1e-12;
    if sigma[0][0] < -psd_tol || sigma[1][1] < -psd_tol || det_sigma < -psd_tol {
        return Err(Error::NotPositiveSemidefinite);
    }
    if det_sigma <= 1e-15 {
        // Singular conditional covariance: the mutual information diverges.
        return Err(Error::NotPositiveSemidefinite);
    }
    let det_c = 1.0 - cs.rho_xy * cs.rho_xy;
    Ok(0.5 * math::log2(det_c / det_sigma))
}

/// `I(XY;UV)` from the closed rational form
/// `-1/2 log2[1 + (2 rho_uv gamma - beta)/(1 - rho_uv^2)]`.
pub fn mutual_information_xyuv_closed(cs: &CorrelationSet) -> Result<f64> {
    let d = cs
        .rho_uv
        .ok_or(Error::DegenerateInput("rho_uv must be set"))?;
    let (c, a, b) = (cs.rho_xy, cs.rho_xu, cs.rho_yv);
    let gamma = c * a * b;
    let beta = a * a + b * b - (1.0 - c * c) * a * a * b * b;
    let bracket = 1.0 + (2.0 * d * gamma - beta) / (1.0 - d * d);
    if bracket <= 0.0 {
        return Err(Error::NotPositiveSemidefinite);
    }
    Ok(-0.5 * math::log2(bracket))
}

/// Feasible interval of `rho_uv` keeping the assembled 4x4 correlation
/// matrix positive definite: `gamma +- sqrt((1 - rho_xu^2)(1 - rho_yv^2))`
/// intersected with `(-1, 1)`.
pub fn feasible_rho_uv(rho_xy: f64, rho_xu: f64, rho_yv: f64) -> Result<(f64, f64)> {
    let cs = CorrelationSet::new(rho_xy, rho_xu, rho_yv, None)?;
    let gamma = cs.rho_xy * cs.rho_xu * cs.rho_yv;
    let half_width =
        math::sqrt((1.0 - cs.rho_xu * cs.rho_xu) * (1.0 - cs.rho_yv * cs.rho_yv));
    Ok(((gamma - half_width).max(-RHO_CAP), (gamma + half_width).min(RHO_CAP)))
}

/// Minimize the determinant-form `I(XY;UV)` over the feasible `rho_uv` by a
/// 4096-point scan plus golden-section refinement. The result must agree
/// with [`gamma_beta`]'s `rho*` to within 1e-6.
pub fn optimal_rho_uv(rho_xy: f64, rho_xu: f64, rho_yv: f64) -> Result<f64> {
    const SCAN: usize = 4096;
    let (lo, hi) = feasible_rho_uv(rho_xy, rho_xu, rho_yv)?;
    let base = CorrelationSet::new(rho_xy, rho_xu, rho_yv, None)?;
    let info = |d: f64| -> f64 {
        let cs = CorrelationSet { rho_uv: Some(d), ..base };
        mutual_information_xyuv(&cs).unwrap_or(f64::INFINITY)
    };
    let margin = 1e-9 * (hi - lo);
    let (lo, hi) = (lo + margin, hi - margin);
    let step = (hi - lo) / (SCAN - 1) as f64;
    let mut best_i = 0usize;
    let mut best_v = f64::INFINITY;
    for i in 0..SCAN {
        let v = info(lo + step * i as f64);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    if !best_v.is_finite() {
        return Err(Error::Inconsistency("no feasible rho_uv found in scan"));
    }
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    // Golden-section minimization via negated maximization.
    let (arg, _) = golden_min(a, b, 1e-12, info);
    Ok(arg)
}

fn golden_min(lo: f64, hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fc < fd { (c, fc) } else { (d, fd) };
    while b - a > tol {
        if fc < fd {
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
        let cand = if fc < fd { (c, fc) } else { (d, fd) };
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}

/// The jointly Gaussian environment with pattern/observation correlation
/// `rho_xy`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianEnv {
    rho_xy: f64,
}

impl GaussianEnv {
    pub fn new(rho_xy: f64) -> Result<Self> {
        if !(0.0..=RHO_CAP).contains(&rho_xy) {
            return Err(Error::OutOfRange("rho_xy must be in [0, 1 - 1e-6]"));
        }
        Ok(GaussianEnv { rho_xy })
    }

    pub fn rho_xy(&self) -> f64 {
        self.rho_xy
    }

    /// Inner-bound surface
    /// `-1/2 log2(1 - rho_xy^2 rho_xu^2 rho_yv^2)`; rates clamped at
    /// [`R_MAX`].
    pub fn inner_bound(&self, r_x: f64, r_y: f64) -> Result<f64> {
        let a = rho_from_rate(r_x)?;
        let b = rho_from_rate(r_y)?;
        let c = self.rho_xy;
        Ok((-0.5 * math::log2(1.0 - c * c * a * a * b * b)).max(0.0))
    }

    /// Outer-bound surface
    /// `r_x + r_y + 1/2 log2[1 + (2 rho* gamma - beta)/(1 - rho*^2)]`.
    ///
    /// Returns 0 at zero rate or zero `rho_xy` by continuity (the
    /// `beta/(2 gamma)` ratio is undefined there but the limit is 0).
    pub fn outer_bound(&self, r_x: f64, r_y: f64) -> Result<f64> {
        if !(r_x >= 0.0) || !(r_y >= 0.0) {
            return Err(Error::OutOfRange("rates must be nonnegative"));
        }
        if r_x == 0.0 || r_y == 0.0 || self.rho_xy == 0.0 {
            return Ok(0.0);
        }
        let r_x = r_x.min(R_MAX);
        let r_y = r_y.min(R_MAX);
        let a = rho_from_rate(r_x)?;
        let b = rho_from_rate(r_y)?;
        let gb = gamma_beta(self.rho_xy, a, b)?;
        let rho = gb.rho_star;
        let bracket = 1.0 + (2.0 * rho * gb.gamma - gb.beta) / (1.0 - rho * rho);
        Ok((r_x + r_y + 0.5 * math::log2(bracket)).max(0.0))
    }

    fn inner_field(&self) -> ScalarField2D<impl Fn(f64, f64) -> f64 + Sync + '_> {
        let env = *self;
        ScalarField2D::new(R_MAX, R_MAX, move |x, y| {
            env.inner_bound(x, y).unwrap_or(0.0)
        })
        .expect("capped domain")
    }

    /// Sample the requested surface over `grid`; rates beyond [`R_MAX`] are
    /// clamped and the result is flagged.
    pub fn surface(&self, grid: &GridSpec, which: SurfaceKind) -> Result<SurfaceGrid> {
        let clamped = grid
            .xs()
            .iter()
            .chain(grid.ys())
            .any(|&r| r > R_MAX);
        let field = self.inner_field();
        let mut z = Vec::with_capacity(grid.cells());
        for &x in grid.xs() {
            let cx = x.min(R_MAX);
            for &y in grid.ys() {
                let cy = y.min(R_MAX);
                let v = match which {
                    SurfaceKind::Inner => self.inner_bound(cx, cy)?,
                    SurfaceKind::Outer => self.outer_bound(cx, cy)?,
                    SurfaceKind::Difference => {
                        self.outer_bound(cx, cy)? - self.inner_bound(cx, cy)?
                    }
                    SurfaceKind::HullGap => {
                        self.outer_bound(cx, cy)? - ray_envelope(&field, cx, cy)?
                    }
                };
                z.push(v);
            }
        }
        let floor = if which == SurfaceKind::HullGap {
            -1e-6
        } else {
            -1e-9
        };
        SurfaceGrid::with_floor(
            which.label(),
            grid.xs().to_vec(),
            grid.ys().to_vec(),
            z,
            clamped,
            floor,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    #[test]
    fn rho_from_rate_examples() {
        assert_eq!(rho_from_rate(0.0).unwrap(), 0.0);
        // r = 1/2 inverts to sqrt(1 - 2^-1) = 1/sqrt(2)
        assert!((rho_from_rate(0.5).unwrap() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let capped = rho_from_rate(1e9).unwrap();
        assert!(capped < 1.0 && capped > 0.99999);
        assert_eq!(capped, rho_from_rate(R_MAX).unwrap());
        assert!(rho_from_rate(-0.1).is_err());
    }

    #[test]
    fn markov_correlation_examples() {
        assert_eq!(markov_correlation(0.8, 1.0 - 1e-12).unwrap(), 0.8 * (1.0 - 1e-12));
        assert_eq!(markov_correlation(0.0, 0.6).unwrap(), 0.0);
        assert!((markov_correlation(0.8, 0.7).unwrap() - 0.56).abs() < 1e-15);
        assert!(markov_correlation(1.0, 0.5).is_err());
    }

    #[test]
    fn inner_bound_examples() {
        let env = GaussianEnv::new(0.8).unwrap();
        assert_eq!(env.inner_bound(0.0, 3.0).unwrap(), 0.0);
        let indep = GaussianEnv::new(0.0).unwrap();
        assert_eq!(indep.inner_bound(2.0, 2.0).unwrap(), 0.0);
        assert!((env.inner_bound(0.5, 0.5).unwrap() - 0.1257693834979822).abs() < 1e-12);
        assert!(GaussianEnv::new(1.0).is_err());
    }

    #[test]
    fn gamma_beta_examples() {
        let gb = gamma_beta(0.8, 0.7, 0.7).unwrap();
        assert!((gb.gamma - 0.392).abs() < 1e-15);
        assert!((gb.beta - 0.893564).abs() < 1e-15);
        assert!((gb.rho_star - 0.5929135870756228).abs() < 1e-12);
        assert!(gb.beta > 2.0 * gb.gamma && gb.gamma > 0.0);
        assert!(0.0 < gb.rho_star && gb.rho_star < 1.0);

        assert!(matches!(
            gamma_beta(0.8, 0.0, 0.7),
            Err(Error::DegenerateInput(_))
        ));
        // The boundary case rho_xy = 1 is outside the domain.
        assert!(gamma_beta(1.0, 0.7, 0.7).is_err());
    }

    proptest! {
        #[test]
        fn beta_exceeds_two_gamma(
            c in 0.01f64..=0.99,
            a in 0.01f64..=0.99,
            b in 0.01f64..=0.99,
        ) {
            let gb = gamma_beta(c, a, b).unwrap();
            prop_assert!(gb.beta > 2.0 * gb.gamma);
            prop_assert!(gb.gamma > 0.0);
            prop_assert!(gb.rho_star > 0.0 && gb.rho_star < 1.0);
        }

        #[test]
        fn determinant_matches_closed_form(
            c in 0.05f64..=0.95,
            a in 0.05f64..=0.95,
            b in 0.05f64..=0.95,
            frac in 0.05f64..=0.95,
        ) {
            let (lo, hi) = feasible_rho_uv(c, a, b).unwrap();
            let d = lo + frac * (hi - lo);
            let cs = CorrelationSet::new(c, a, b, Some(d)).unwrap();
            let det = mutual_information_xyuv(&cs);
            let closed = mutual_information_xyuv_closed(&cs);
            if let (Ok(det), Ok(closed)) = (det, closed) {
                prop_assert!((det - closed).abs() <= 1e-9, "det={det} closed={closed}");
            }
        }

        #[test]
        fn outer_dominates_inner(rx in 0.01f64..=6.0, ry in 0.01f64..=6.0) {
            let env = GaussianEnv::new(0.8).unwrap();
            let g = env.inner_bound(rx, ry).unwrap();
            let gs = env.outer_bound(rx, ry).unwrap();
            prop_assert!(gs >= g - 1e-9, "g={g} gs={gs}");
        }

        #[test]
        fn inner_monotone(rx in 0.0f64..=6.0, ry in 0.0f64..=6.0, d in 0.01f64..=0.5) {
            let env = GaussianEnv::new(0.8).unwrap();
            let base = env.inner_bound(rx, ry).unwrap();
            prop_assert!(env.inner_bound(rx + d, ry).unwrap() >= base - 1e-12);
            prop_assert!(env.inner_bound(rx, ry + d).unwrap() >= base - 1e-12);
            let tighter = GaussianEnv::new(0.9).unwrap();
            prop_assert!(tighter.inner_bound(rx, ry).unwrap() >= base - 1e-12);
        }
    }

    #[test]
    fn mutual_information_examples() {
        // rho_uv = 0 with rho_xu = rho_yv = 0: full independence.
        let cs = CorrelationSet::new(0.5, 0.0, 0.0, Some(0.0)).unwrap();
        assert!(mutual_information_xyuv(&cs).unwrap().abs() < 1e-12);

        // Veridical limit is rejected at construction.
        assert!(CorrelationSet::new(0.5, 0.9999999, 0.5, Some(0.1)).is_err());

        // At the stationary point the two forms agree.
        let gb = gamma_beta(0.8, 0.7, 0.7).unwrap();
        let cs = CorrelationSet::new(0.8, 0.7, 0.7, Some(gb.rho_star)).unwrap();
        let det = mutual_information_xyuv(&cs).unwrap();
        let closed = mutual_information_xyuv_closed(&cs).unwrap();
        assert!((det - closed).abs() < 1e-9);
        assert!(det > 0.0);

        // Outside the feasible interval the matrix is not PSD.
        let (_, hi) = feasible_rho_uv(0.8, 0.7, 0.7).unwrap();
        if hi < RHO_CAP {
            let bad = CorrelationSet::new(0.8, 0.7, 0.7, Some((hi + 0.01).min(RHO_CAP))).unwrap();
            assert!(mutual_information_xyuv(&bad).is_err());
        }
    }

    #[test]
    fn sweep_matches_stationary_point() {
        for &(c, a, b) in &[
            (0.8, 0.7, 0.7),
            (0.8, 0.01, 0.5),
            (0.99, 0.6, 0.3),
            (0.3, 0.9, 0.9),
        ] {
            let swept = optimal_rho_uv(c, a, b).unwrap();
            let rho_star = gamma_beta(c, a, b).unwrap().rho_star;
            assert!(
                (swept - rho_star).abs() <= 1e-6,
                "c={c} a={a} b={b}: swept={swept} rho*={rho_star}"
            );
        }
    }

    #[test]
    fn outer_bound_examples() {
        let env = GaussianEnv::new(0.8).unwrap();
        assert_eq!(env.outer_bound(0.0, 2.0).unwrap(), 0.0);
        let g = env.inner_bound(0.5, 0.5).unwrap();
        let gs = env.outer_bound(0.5, 0.5).unwrap();
        assert!(gs >= g);
        assert!((gs - 0.19620820776770509).abs() < 1e-12);
        assert!(env.outer_bound(-1.0, 1.0).is_err());
    }

    #[test]
    fn surface_examples() {
        let env = GaussianEnv::new(0.8).unwrap();
        let grid = GridSpec::linspace(0.0, 3.0, 7, 0.0, 3.0, 7).unwrap();

        let diff = env.surface(&grid, SurfaceKind::Difference).unwrap();
        // Axis cells: both bounds vanish.
        assert!(diff.value(0, 3).abs() < 1e-12);
        assert!(diff.value(3, 0).abs() < 1e-12);
        assert!(!diff.clamped());

        let gap = env.surface(&grid, SurfaceKind::HullGap).unwrap();
        assert!(gap.min_value() >= -1e-6);
        assert!(gap.max_value() > 1e-3);

        let clamped = env
            .surface(
                &GridSpec::linspace(0.0, 10.0, 4, 0.0, 3.0, 4).unwrap(),
                SurfaceKind::Inner,
            )
            .unwrap();
        assert!(clamped.clamped());
    }

    #[test]
    fn random_feasible_interval_contains_stationary_point() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..500 {
            let c = 0.01 + 0.98 * rng.next_f64();
            let a = 0.01 + 0.98 * rng.next_f64();
            let b = 0.01 + 0.98 * rng.next_f64();
            let (lo, hi) = feasible_rho_uv(c, a, b).unwrap();
            let rho_star = gamma_beta(c, a, b).unwrap().rho_star;
            assert!(lo < rho_star && rho_star < hi);
        }
    }
}
