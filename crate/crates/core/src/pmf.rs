//! Dense discrete joint probability tables and the entropy / mutual
//! information operations built on them.
//!
//! Tables are deliberately small (at most 4 variables, alphabets at most 16
//! symbols): this is a brute-force verification domain, not a statistics
//! library. All logarithms are base 2 and `0 log 0 = 0`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math;

/// Largest number of variables a joint table may carry.
pub const MAX_VARS: usize = 4;
/// Largest alphabet size per variable.
pub const MAX_ALPHABET: usize = 16;

/// Absolute slack below which a negative entropy/information value is
/// treated as float round-off and clamped to zero. Anything more negative
/// is reported as an internal inconsistency.
pub const ROUND_OFF: f64 = 1e-12;

/// Suggested tolerance for [`JointPmf::is_markov_chain`]; the chain tests
/// in this crate all use it.
pub const DEFAULT_MARKOV_TOL: f64 = 1e-10;

/// A named random variable in a joint table.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Var(pub &'static str);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

pub const X: Var = Var("X");
pub const Y: Var = Var("Y");
pub const U: Var = Var("U");
pub const V: Var = Var("V");
pub const A: Var = Var("A");
pub const B: Var = Var("B");
pub const ALPHA: Var = Var("alpha");
pub const BETA: Var = Var("beta");
pub const GAMMA: Var = Var("gamma");
pub const Q: Var = Var("Q");

/// Dense joint pmf over up to [`MAX_VARS`] named variables.
///
/// The table is row-major with the first variable slowest. Entries must be
/// nonnegative and sum to one within `1e-12`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPmf {
    vars: Vec<Var>,
    sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(vars: Vec<Var>, sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if vars.is_empty() || vars.len() > MAX_VARS {
            return Err(Error::InvalidDistribution("need 1..=4 variables"));
        }
        if sizes.len() != vars.len() {
            return Err(Error::InvalidDistribution("one alphabet size per variable"));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::DuplicateVariable(*v));
            }
        }
        let mut cells = 1usize;
        for &s in &sizes {
            if s == 0 || s > MAX_ALPHABET {
                return Err(Error::InvalidDistribution("alphabet sizes must be 1..=16"));
            }
            cells *= s;
        }
        if probs.len() != cells {
            return Err(Error::InvalidDistribution("table length != product of sizes"));
        }
        let mut sum = 0.0;
        for &p in &probs {
            if !(p >= 0.0) {
                return Err(Error::InvalidDistribution("negative or NaN entry"));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > ROUND_OFF {
            return Err(Error::InvalidDistribution("entries must sum to 1 within 1e-12"));
        }
        Ok(JointPmf { vars, sizes, probs })
    }

    /// Single-variable pmf.
    pub fn from_marginal(var: Var, probs: &[f64]) -> Result<Self> {
        JointPmf::new(vec![var], vec![probs.len()], probs.to_vec())
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet_size(&self, var: Var) -> Result<usize> {
        Ok(self.sizes[self.position(var)?])
    }

    fn position(&self, var: Var) -> Result<usize> {
        self.vars
            .iter()
            .position(|&v| v == var)
            .ok_or(Error::UnknownVariable(var))
    }

    fn positions(&self, vars: &[Var]) -> Result<Vec<usize>> {
        if vars.is_empty() {
            return Err(Error::EmptyVariableSet);
        }
        let mut out = Vec::with_capacity(vars.len());
        for (i, &v) in vars.iter().enumerate() {
            if vars[..i].contains(&v) {
                return Err(Error::DuplicateVariable(v));
            }
            out.push(self.position(v)?);
        }
        Ok(out)
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.sizes.len()];
        for i in (0..self.sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.sizes[i + 1];
        }
        strides
    }

    /// Probability of one joint symbol tuple, indices in variable order.
    pub fn prob(&self, idx: &[usize]) -> Result<f64> {
        if idx.len() != self.sizes.len() {
            return Err(Error::InvalidDistribution("index arity mismatch"));
        }
        let mut flat = 0usize;
        for ((&i, &s), stride) in idx.iter().zip(&self.sizes).zip(self.strides()) {
            if i >= s {
                return Err(Error::OutOfRange("symbol index"));
            }
            flat += i * stride;
        }
        Ok(self.probs[flat])
    }

    /// Marginal table over `vars` (kept in this pmf's variable order).
    pub fn marginal(&self, vars: &[Var]) -> Result<JointPmf> {
        let keep = self.positions(vars)?;
        let mut order: Vec<usize> = keep.clone();
        order.sort_unstable();
        let out_vars: Vec<Var> = order.iter().map(|&p| self.vars[p]).collect();
        let out_sizes: Vec<usize> = order.iter().map(|&p| self.sizes[p]).collect();
        let table = self.accumulate(&order);
        JointPmf::new(out_vars, out_sizes, table)
    }

    /// Sum the full table into the cells indexed by the given (sorted)
    /// variable positions.
    fn accumulate(&self, keep_sorted: &[usize]) -> Vec<f64> {
        let strides = self.strides();
        let mut out_len = 1usize;
        for &p in keep_sorted {
            out_len *= self.sizes[p];
        }
        let mut out = vec![0.0f64; out_len];
        for (flat, &p) in self.probs.iter().enumerate() {
            let mut reduced = 0usize;
            for &pos in keep_sorted {
                let sym = (flat / strides[pos]) % self.sizes[pos];
                reduced = reduced * self.sizes[pos] + sym;
            }
            out[reduced] += p;
        }
        out
    }

    fn entropy_of_positions(&self, positions: &[usize]) -> f64 {
        let mut sorted = positions.to_vec();
        sorted.sort_unstable();
        let table = self.accumulate(&sorted);
        let mut h = 0.0;
        for &p in &table {
            if p > 0.0 {
                h -= p * math::log2(p);
            }
        }
        h
    }

    /// Shannon entropy (bits) of the marginal over `vars`.
    pub fn entropy(&self, vars: &[Var]) -> Result<f64> {
        Ok(self.entropy_of_positions(&self.positions(vars)?))
    }

    fn disjoint(a: &[usize], b: &[usize]) -> bool {
        a.iter().all(|p| !b.contains(p))
    }

    fn clamp_round_off(x: f64) -> Result<f64> {
        if x < -ROUND_OFF {
            Err(Error::Inconsistency("information quantity below -1e-12"))
        } else {
            Ok(x.max(0.0))
        }
    }

    /// I(A;B) = H(A) + H(B) - H(A,B), clamped at zero.
    pub fn mutual_information(&self, vars_a: &[Var], vars_b: &[Var]) -> Result<f64> {
        let a = self.positions(vars_a)?;
        let b = self.positions(vars_b)?;
        if !Self::disjoint(&a, &b) {
            return Err(Error::OverlappingVariableSets);
        }
        let mut ab = a.clone();
        ab.extend_from_slice(&b);
        let i = self.entropy_of_positions(&a) + self.entropy_of_positions(&b)
            - self.entropy_of_positions(&ab);
        Self::clamp_round_off(i)
    }

    /// I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C), clamped at zero.
    pub fn conditional_mutual_information(
        &self,
        vars_a: &[Var],
        vars_b: &[Var],
        vars_c: &[Var],
    ) -> Result<f64> {
        let a = self.positions(vars_a)?;
        let b = self.positions(vars_b)?;
        let c = self.positions(vars_c)?;
        if !Self::disjoint(&a, &b) || !Self::disjoint(&a, &c) || !Self::disjoint(&b, &c) {
            return Err(Error::OverlappingVariableSets);
        }
        let mut ac = a.clone();
        ac.extend_from_slice(&c);
        let mut bc = b.clone();
        bc.extend_from_slice(&c);
        let mut abc = a.clone();
        abc.extend_from_slice(&b);
        abc.extend_from_slice(&c);
        let i = self.entropy_of_positions(&ac) + self.entropy_of_positions(&bc)
            - self.entropy_of_positions(&abc)
            - self.entropy_of_positions(&c);
        Self::clamp_round_off(i)
    }

    /// True iff A - B - C holds numerically, i.e. I(A;C|B) <= tol.
    pub fn is_markov_chain(
        &self,
        vars_a: &[Var],
        vars_b: &[Var],
        vars_c: &[Var],
        tol: f64,
    ) -> Result<bool> {
        if !(tol > 0.0) {
            return Err(Error::OutOfRange("tolerance must be positive"));
        }
        Ok(self.conditional_mutual_information(vars_a, vars_c, vars_b)? <= tol)
    }

    /// Corner rate triple generated by an auxiliary pair:
    /// `(I(U;V) - I(U;V|X,Y), I(U;X), I(V;Y))`.
    pub fn rate_triple_from_aux(&self) -> Result<RateTriple> {
        for required in [X, Y, U, V] {
            self.position(required)?;
        }
        if self.vars.len() != 4 {
            return Err(Error::InvalidDistribution("expected exactly X, Y, U, V"));
        }
        let r_c = self.mutual_information(&[U], &[V])?
            - self.conditional_mutual_information(&[U], &[V], &[X, Y])?;
        let r_x = self.mutual_information(&[U], &[X])?;
        let r_y = self.mutual_information(&[V], &[Y])?;
        RateTriple::new(r_c, r_x, r_y)
    }
}

/// A rate triple `(R_c, R_x, R_y)` in bits per symbol.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RateTriple {
    pub r_c: f64,
    pub r_x: f64,
    pub r_y: f64,
}

impl RateTriple {
    /// Build a rate triple, clamping negative round-off below `1e-12` in
    /// magnitude to zero and rejecting anything more negative.
    pub fn new(r_c: f64, r_x: f64, r_y: f64) -> Result<Self> {
        let clamp = |x: f64| -> Result<f64> {
            if x < -ROUND_OFF {
                Err(Error::OutOfRange("rate components must be nonnegative"))
            } else {
                Ok(x.max(0.0))
            }
        };
        Ok(RateTriple {
            r_c: clamp(r_c)?,
            r_x: clamp(r_x)?,
            r_y: clamp(r_y)?,
        })
    }
}

/// Row-stochastic transition table (`rows` inputs, `cols` outputs).
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl Channel {
    pub fn new(rows: usize, cols: usize, probs: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows > MAX_ALPHABET || cols > MAX_ALPHABET {
            return Err(Error::InvalidDistribution("channel dimensions must be 1..=16"));
        }
        if probs.len() != rows * cols {
            return Err(Error::InvalidDistribution("channel table length"));
        }
        for r in 0..rows {
            let mut sum = 0.0;
            for c in 0..cols {
                let p = probs[r * cols + c];
                if !(p >= 0.0) {
                    return Err(Error::InvalidDistribution("negative or NaN channel entry"));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > ROUND_OFF {
                return Err(Error::NotStochastic);
            }
        }
        Ok(Channel { rows, cols, probs })
    }

    /// Binary symmetric channel with crossover probability `q`.
    pub fn bsc(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::OutOfRange("crossover probability must be in [0,1]"));
        }
        Channel::new(2, 2, vec![1.0 - q, q, q, 1.0 - q])
    }

    pub fn identity(k: usize) -> Result<Self> {
        let mut probs = vec![0.0; k * k];
        for i in 0..k {
            probs[i * k + i] = 1.0;
        }
        Channel::new(k, k, probs)
    }

    pub fn uniform(rows: usize, cols: usize) -> Result<Self> {
        Channel::new(rows, cols, vec![1.0 / cols as f64; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn prob(&self, input: usize, output: usize) -> f64 {
        self.probs[input * self.cols + output]
    }
}

/// Compose `p(x, y, u, v) = p(x) p(y|x) p(u|x) p(v|y)`, the factorization of
/// the inner-bound auxiliary set. The result satisfies the long Markov
/// chain U - X - Y - V.
pub fn build_chain_pmf(
    p_x: &JointPmf,
    ch_yx: &Channel,
    ch_ux: &Channel,
    ch_vy: &Channel,
) -> Result<JointPmf> {
    if p_x.vars() != [X] {
        return Err(Error::InvalidDistribution("p_x must be a pmf over X alone"));
    }
    let nx = p_x.sizes()[0];
    if ch_yx.rows() != nx || ch_ux.rows() != nx {
        return Err(Error::InvalidDistribution("channel input alphabet mismatch on X"));
    }
    let ny = ch_yx.cols();
    if ch_vy.rows() != ny {
        return Err(Error::InvalidDistribution("channel input alphabet mismatch on Y"));
    }
    let nu = ch_ux.cols();
    let nv = ch_vy.cols();
    let mut probs = Vec::with_capacity(nx * ny * nu * nv);
    for x in 0..nx {
        let px = p_x.probs()[x];
        for y in 0..ny {
            let pyx = ch_yx.prob(x, y);
            for u in 0..nu {
                let pux = ch_ux.prob(x, u);
                for v in 0..nv {
                    probs.push(px * pyx * pux * ch_vy.prob(y, v));
                }
            }
        }
    }
    JointPmf::new(vec![X, Y, U, V], vec![nx, ny, nu, nv], probs)
}
