//! Monte Carlo simulation of the random-coding recognition scheme for the
//! binary symmetric environment.
//!
//! Each trial draws a fresh training set and fresh typical-set codebooks
//! (the ensemble average), picks a test index uniformly, pushes the pattern
//! through the channel, and runs the full encode/classify pipeline with the
//! scheme's fallback rules. The outcome is `Ok` exactly when the classifier
//! recovers both the memory index assigned to the test pattern and its
//! label; otherwise the trial is labeled with the first failure event in
//! the order e0..e5:
//!
//! * e0 - sensory data not jointly typical with the test pattern
//! * e1 - test pattern not encodable into the memory codebook
//! * e2 - two or more training patterns share a memory codeword
//! * e3 - sensory data not encodable into the sensory codebook
//! * e4 - no active memory codeword matches the encoded observation
//! * e5 - an incorrect active memory codeword matches
//!
//! Sequences are packed into `u64` words (block lengths 4..=24), and all
//! randomness flows through per-trial, per-object substreams of a
//! counter-based generator, so results are reproducible under any
//! execution order or thread count.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::binary::binary_convolve;
use crate::error::{Error, Result};
use crate::math;
use crate::pmf::{JointPmf, Var};
use crate::rng::SplitMix64;

const TAG_PATTERN: u64 = 1;
const TAG_NOISE: u64 = 2;
const TAG_SELECT: u64 = 3;
const TAG_BOOK_U: u64 = 4;
const TAG_BOOK_V: u64 = 5;

pub const MIN_BLOCK: usize = 4;
pub const MAX_BLOCK: usize = 24;
/// Guard on codebook sizes: `n * R <= 24` keeps each codebook at or below
/// 2^24 entries.
pub const MAX_CODEBOOK_BITS: f64 = 24.0;
pub const DEFAULT_MAX_REJECTION: u64 = 1_000_000;

/// Configuration of one `(M_c, M_x, M_y, n)` recognition code plus the
/// typicality slack and PRNG seed.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeConfig {
    pub n: usize,
    /// Channel crossover probability.
    pub q: f64,
    /// Memory test-channel crossover.
    pub q_x: f64,
    /// Sensory test-channel crossover.
    pub q_y: f64,
    pub r_c: f64,
    pub r_x: f64,
    pub r_y: f64,
    /// Typicality slack.
    pub delta: f64,
    pub seed: u64,
    /// Draw cap per rejection-sampled codeword.
    pub max_rejection: u64,
}

impl CodeConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        q: f64,
        q_x: f64,
        q_y: f64,
        r_c: f64,
        r_x: f64,
        r_y: f64,
        delta: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(MIN_BLOCK..=MAX_BLOCK).contains(&n) {
            return Err(Error::InvalidConfig("block length must be in 4..=24"));
        }
        for p in [q, q_x, q_y] {
            if !(0.0..=0.5).contains(&p) {
                return Err(Error::InvalidConfig("crossover parameters must be in [0, 1/2]"));
            }
        }
        for r in [r_c, r_x, r_y] {
            if !(r >= 0.0) {
                return Err(Error::InvalidConfig("rates must be nonnegative"));
            }
        }
        if n as f64 * r_x > MAX_CODEBOOK_BITS || n as f64 * r_y > MAX_CODEBOOK_BITS {
            return Err(Error::InvalidConfig("n*R_x and n*R_y must be at most 24"));
        }
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::InvalidConfig("delta must be in (0, 0.5)"));
        }
        Ok(CodeConfig {
            n,
            q,
            q_x,
            q_y,
            r_c,
            r_x,
            r_y,
            delta,
            seed,
            max_rejection: DEFAULT_MAX_REJECTION,
        })
    }

    /// Default typicality slack: 0.1 up to n = 12, 0.05 beyond.
    pub fn default_delta(n: usize) -> f64 {
        if n <= 12 {
            0.1
        } else {
            0.05
        }
    }

    fn size_from_rate(&self, r: f64) -> u64 {
        (math::round(math::exp2(self.n as f64 * r)) as u64).max(1)
    }

    pub fn m_c(&self) -> u64 {
        self.size_from_rate(self.r_c)
    }

    pub fn m_x(&self) -> u64 {
        self.size_from_rate(self.r_x)
    }

    pub fn m_y(&self) -> u64 {
        self.size_from_rate(self.r_y)
    }

    fn mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }
}

/// Trial outcome classification. `Ok` means the classifier returned both
/// the right memory index and the right label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialEvent {
    Ok,
    /// e0: observation not jointly typical with the test pattern.
    AmbiguousSensoryData,
    /// e1: test pattern unencodable.
    PatternUnencodable,
    /// e2: memory codeword collision among training patterns.
    MemoryCollision,
    /// e3: observation unencodable.
    SensoryDataUnencodable,
    /// e4: no active codeword matched.
    NoMemoryMatch,
    /// e5: an incorrect active codeword matched.
    WrongMemoryMatch,
    /// Rejection sampling exceeded its cap while building codebooks.
    SamplingFailed,
}

impl TrialEvent {
    /// Index into the e0..e5 counters, when applicable.
    pub fn error_index(self) -> Option<usize> {
        match self {
            TrialEvent::AmbiguousSensoryData => Some(0),
            TrialEvent::PatternUnencodable => Some(1),
            TrialEvent::MemoryCollision => Some(2),
            TrialEvent::SensoryDataUnencodable => Some(3),
            TrialEvent::NoMemoryMatch => Some(4),
            TrialEvent::WrongMemoryMatch => Some(5),
            _ => None,
        }
    }
}

/// Full record of one trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialOutcome {
    pub selected_w: u64,
    /// Memory index assigned to the selected pattern during training.
    pub m_assigned: usize,
    /// Sensory codeword index.
    pub mu: usize,
    /// Classifier's memory index estimate.
    pub m_hat: usize,
    /// Classifier's label estimate.
    pub w_hat: u64,
    pub event: TrialEvent,
}

/// Aggregated event counts. The counts partition the trials.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SimulationResult {
    pub trials: u64,
    pub ok: u64,
    /// Counters for e0..e5.
    pub events: [u64; 6],
    pub sampling_failed: u64,
}

impl SimulationResult {
    pub fn record(&mut self, event: TrialEvent) {
        self.trials += 1;
        match event.error_index() {
            Some(i) => self.events[i] += 1,
            None => match event {
                TrialEvent::Ok => self.ok += 1,
                _ => self.sampling_failed += 1,
            },
        }
    }

    pub fn merge(&mut self, other: &SimulationResult) {
        self.trials += other.trials;
        self.ok += other.ok;
        self.sampling_failed += other.sampling_failed;
        for i in 0..6 {
            self.events[i] += other.events[i];
        }
    }

    /// Empirical error probability `1 - ok/trials`.
    pub fn p_e_hat(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        1.0 - self.ok as f64 / self.trials as f64
    }

    /// Half-width of the 95% normal-approximation binomial interval.
    pub fn ci95_half_width(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        let p = self.p_e_hat();
        1.96 * math::sqrt(p * (1.0 - p) / self.trials as f64)
    }
}

// ---------------------------------------------------------------------------
// Strong joint typicality
// ---------------------------------------------------------------------------

/// Strong joint delta-typicality of aligned sequences against `joint`:
/// every joint symbol-tuple frequency is within `delta` of its probability
/// (including zero-probability tuples).
pub fn typicality_test(seqs: &[&[u8]], joint: &JointPmf, delta: f64) -> Result<bool> {
    if seqs.len() != joint.vars().len() {
        return Err(Error::InvalidConfig("one sequence per joint variable"));
    }
    let n = seqs[0].len();
    if n == 0 || seqs.iter().any(|s| s.len() != n) {
        return Err(Error::InvalidConfig("sequences must be aligned and nonempty"));
    }
    let sizes = joint.sizes();
    let cells: usize = sizes.iter().product();
    let mut counts = vec![0u32; cells];
    for t in 0..n {
        let mut flat = 0usize;
        for (seq, &size) in seqs.iter().zip(sizes) {
            let sym = seq[t] as usize;
            if sym >= size {
                return Err(Error::OutOfRange("symbol outside alphabet"));
            }
            flat = flat * size + sym;
        }
        counts[flat] += 1;
    }
    let n = n as f64;
    Ok(counts
        .iter()
        .zip(joint.probs())
        .all(|(&c, &p)| (c as f64 / n - p).abs() <= delta))
}

/// Draw a delta-typical length-`n` sequence from a single-variable marginal
/// by iid sampling plus rejection. This weights type classes by their iid
/// measure rather than exactly uniformly.
pub fn sample_typical(
    marginal: &JointPmf,
    n: usize,
    delta: f64,
    max_rejection: u64,
    rng: &mut SplitMix64,
) -> Result<Vec<u8>> {
    if marginal.vars().len() != 1 {
        return Err(Error::InvalidConfig("marginal must have exactly one variable"));
    }
    if n == 0 {
        return Err(Error::InvalidConfig("sequence length must be positive"));
    }
    let probs = marginal.probs();
    let mut cum = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cum.push(acc);
    }
    let mut seq = vec![0u8; n];
    for attempt in 0..max_rejection {
        for slot in seq.iter_mut() {
            let u = rng.next_f64();
            *slot = cum.iter().position(|&c| u < c).unwrap_or(probs.len() - 1) as u8;
        }
        if typicality_test(&[&seq], marginal, delta)? {
            return Ok(seq);
        }
        let _ = attempt;
    }
    Err(Error::SamplingFailed {
        attempts: max_rejection,
    })
}

// ---------------------------------------------------------------------------
// Packed binary fast path
// ---------------------------------------------------------------------------

/// Joint pmf of an (input, output) bit pair: uniform input through a
/// binary symmetric channel with the given crossover.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BitPairJoint {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

impl BitPairJoint {
    pub fn symmetric(crossover: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&crossover) {
            return Err(Error::OutOfRange("crossover must be in [0,1]"));
        }
        Ok(BitPairJoint {
            p00: 0.5 * (1.0 - crossover),
            p01: 0.5 * crossover,
            p10: 0.5 * crossover,
            p11: 0.5 * (1.0 - crossover),
        })
    }

    pub fn to_joint_pmf(&self, a: Var, b: Var) -> Result<JointPmf> {
        JointPmf::new(
            vec![a, b],
            vec![2, 2],
            vec![self.p00, self.p01, self.p10, self.p11],
        )
    }
}

/// Pair typicality for bit-packed sequences; equivalent to
/// [`typicality_test`] on the corresponding 2x2 joint.
#[inline]
pub fn pair_typical(a: u64, b: u64, n: usize, joint: &BitPairJoint, delta: f64) -> bool {
    let mask = (1u64 << n) - 1;
    let nf = n as f64;
    let n11 = (a & b & mask).count_ones() as f64;
    let n10 = (a & !b & mask).count_ones() as f64;
    let n01 = (!a & b & mask).count_ones() as f64;
    let n00 = n as f64 - n11 - n10 - n01;
    (n00 / nf - joint.p00).abs() <= delta
        && (n01 / nf - joint.p01).abs() <= delta
        && (n10 / nf - joint.p10).abs() <= delta
        && (n11 / nf - joint.p11).abs() <= delta
}

/// Single-sequence typicality for a Bernoulli(p1) marginal on packed bits.
#[inline]
fn word_typical(a: u64, n: usize, p1: f64, delta: f64) -> bool {
    let ones = (a & ((1u64 << n) - 1)).count_ones() as f64;
    let nf = n as f64;
    (ones / nf - p1).abs() <= delta && ((nf - ones) / nf - (1.0 - p1)).abs() <= delta
}

fn bernoulli_word(rng: &mut SplitMix64, n: usize, p: f64) -> u64 {
    let mut w = 0u64;
    for i in 0..n {
        if rng.next_bool(p) {
            w |= 1 << i;
        }
    }
    w
}

/// A codebook of bit-packed length-`n` codewords.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    n: usize,
    words: Vec<u64>,
}

impl Codebook {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn word(&self, i: usize) -> u64 {
        self.words[i]
    }
}

fn generate_book(
    n: usize,
    count: u64,
    delta: f64,
    max_rejection: u64,
    base_seed: u64,
    tag: u64,
) -> Result<Codebook> {
    let mask = (1u64 << n) - 1;
    let mut words = Vec::with_capacity(count as usize);
    for i in 0..count {
        let mut rng = SplitMix64::substream(base_seed, tag, i);
        let mut accepted = None;
        for _ in 0..max_rejection {
            let w = rng.next_u64() & mask;
            if word_typical(w, n, 0.5, delta) {
                accepted = Some(w);
                break;
            }
        }
        match accepted {
            Some(w) => words.push(w),
            None => {
                return Err(Error::SamplingFailed {
                    attempts: max_rejection,
                })
            }
        }
    }
    Ok(Codebook { n, words })
}

/// Generate the memory and sensory codebooks for one trial: codewords are
/// drawn independently by rejection against the Bernoulli(1/2) marginals
/// that the symmetric test channels induce.
pub fn generate_codebooks(cfg: &CodeConfig, base_seed: u64) -> Result<(Codebook, Codebook)> {
    let b_u = generate_book(cfg.n, cfg.m_x(), cfg.delta, cfg.max_rejection, base_seed, TAG_BOOK_U)?;
    let b_v = generate_book(cfg.n, cfg.m_y(), cfg.delta, cfg.max_rejection, base_seed, TAG_BOOK_V)?;
    Ok((b_u, b_v))
}

/// First codeword jointly typical with `pattern`, searching in ascending
/// index order; falls back to index 0 with the failure flag set.
pub fn memory_encode(
    book: &Codebook,
    pattern: u64,
    joint_xu: &BitPairJoint,
    delta: f64,
) -> (usize, bool) {
    for (i, &u) in book.words.iter().enumerate() {
        if pair_typical(pattern, u, book.n, joint_xu, delta) {
            return (i, false);
        }
    }
    (0, true)
}

/// Sensory counterpart of [`memory_encode`].
pub fn sensory_encode(
    book: &Codebook,
    observation: u64,
    joint_yv: &BitPairJoint,
    delta: f64,
) -> (usize, bool) {
    memory_encode(book, observation, joint_yv, delta)
}

/// True iff any memory index repeats among the assignments.
pub fn detect_collision(assignments: &[usize]) -> bool {
    let mut sorted = assignments.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// Classifier output: the match set over the active codewords, the memory
/// index estimate (fallback 0 on no or multiple matches), and the label
/// retrieved from the stored pairs (first pair wins on ties).
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub m_hat: usize,
    pub w_hat: u64,
    pub matches: Vec<usize>,
    pub no_match: bool,
    pub ambiguous: bool,
}

/// Search the active portion of the memory codebook for codewords jointly
/// typical with the encoded observation, then look up the label.
///
/// `active` must list the distinct indices appearing in `labeled` in
/// ascending order; `labeled` holds `(memory index, label)` pairs in label
/// order.
pub fn classify(
    book_u: &Codebook,
    active: &[usize],
    v_word: u64,
    labeled: &[(usize, u64)],
    joint_uv: &BitPairJoint,
    delta: f64,
) -> Classification {
    debug_assert!(active.windows(2).all(|w| w[0] < w[1]));
    let matches: Vec<usize> = active
        .iter()
        .copied()
        .filter(|&m| pair_typical(book_u.words[m], v_word, book_u.n, joint_uv, delta))
        .collect();
    let no_match = matches.is_empty();
    let ambiguous = matches.len() > 1;
    let m_hat = if matches.len() == 1 { matches[0] } else { 0 };
    let w_hat = labeled
        .iter()
        .find(|&&(m, _)| m == m_hat)
        .map(|&(_, w)| w)
        .unwrap_or(labeled[0].1);
    Classification {
        m_hat,
        w_hat,
        matches,
        no_match,
        ambiguous,
    }
}

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

struct TrialJoints {
    xy: BitPairJoint,
    xu: BitPairJoint,
    yv: BitPairJoint,
    uv: BitPairJoint,
}

fn trial_joints(cfg: &CodeConfig) -> Result<TrialJoints> {
    let q_uv = binary_convolve(binary_convolve(cfg.q_x, cfg.q)?, cfg.q_y)?;
    Ok(TrialJoints {
        xy: BitPairJoint::symmetric(cfg.q)?,
        xu: BitPairJoint::symmetric(cfg.q_x)?,
        yv: BitPairJoint::symmetric(cfg.q_y)?,
        uv: BitPairJoint::symmetric(q_uv)?,
    })
}

fn trial_pattern(cfg: &CodeConfig, base: u64, w: u64) -> u64 {
    SplitMix64::substream(base, TAG_PATTERN, w).next_u64() & cfg.mask()
}

/// Event priority: the first flag in e0..e5 order explains an error trial.
#[allow(clippy::too_many_arguments)]
fn first_event(
    e0: bool,
    e1: bool,
    e2: bool,
    e3: bool,
    e4: bool,
    e5: bool,
) -> TrialEvent {
    if e0 {
        TrialEvent::AmbiguousSensoryData
    } else if e1 {
        TrialEvent::PatternUnencodable
    } else if e2 {
        TrialEvent::MemoryCollision
    } else if e3 {
        TrialEvent::SensoryDataUnencodable
    } else if e4 {
        TrialEvent::NoMemoryMatch
    } else if e5 {
        TrialEvent::WrongMemoryMatch
    } else {
        debug_assert!(false, "error trial with no failure flag");
        TrialEvent::WrongMemoryMatch
    }
}

/// Run one trial and keep the full outcome. Materializes every training
/// pattern, so the cost is O(M_c * M_x); [`run_trials`] uses an equivalent
/// early-exit path when only event counts are needed.
pub fn run_trial(cfg: &CodeConfig, trial: u64) -> Result<TrialOutcome> {
    let base = cfg.seed ^ trial;
    let joints = trial_joints(cfg)?;
    let m_c = cfg.m_c();
    let (book_u, book_v) = match generate_codebooks(cfg, base) {
        Ok(books) => books,
        Err(Error::SamplingFailed { .. }) => {
            return Ok(TrialOutcome {
                selected_w: 0,
                m_assigned: 0,
                mu: 0,
                m_hat: 0,
                w_hat: 0,
                event: TrialEvent::SamplingFailed,
            })
        }
        Err(e) => return Err(e),
    };
    let w_sel = SplitMix64::substream(base, TAG_SELECT, 0).next_below(m_c);
    let x_w = trial_pattern(cfg, base, w_sel);
    let noise = bernoulli_word(
        &mut SplitMix64::substream(base, TAG_NOISE, 0),
        cfg.n,
        cfg.q,
    );
    let y = x_w ^ noise;

    let e0 = !pair_typical(x_w, y, cfg.n, &joints.xy, cfg.delta);

    let mut assignments = Vec::with_capacity(m_c as usize);
    let mut e1 = false;
    for w in 0..m_c {
        let pattern = if w == w_sel { x_w } else { trial_pattern(cfg, base, w) };
        let (m, failed) = memory_encode(&book_u, pattern, &joints.xu, cfg.delta);
        if w == w_sel {
            e1 = failed;
        }
        assignments.push(m);
    }
    let m_w = assignments[w_sel as usize];
    let e2 = detect_collision(&assignments);

    let (mu, e3) = sensory_encode(&book_v, y, &joints.yv, cfg.delta);
    let v_word = book_v.words[mu];

    let mut active: Vec<usize> = assignments.clone();
    active.sort_unstable();
    active.dedup();
    let labeled: Vec<(usize, u64)> = assignments
        .iter()
        .enumerate()
        .map(|(w, &m)| (m, w as u64))
        .collect();
    let cls = classify(&book_u, &active, v_word, &labeled, &joints.uv, cfg.delta);

    let ok = cls.w_hat == w_sel && cls.m_hat == m_w;
    let e4 = cls.no_match;
    let e5 = !cls.no_match && cls.matches != [m_w];
    let event = if ok {
        TrialEvent::Ok
    } else {
        first_event(e0, e1, e2, e3, e4, e5)
    };
    Ok(TrialOutcome {
        selected_w: w_sel,
        m_assigned: m_w,
        mu,
        m_hat: cls.m_hat,
        w_hat: cls.w_hat,
        event,
    })
}

/// Event-only trial with early exit: training patterns are encoded lazily
/// and the scan stops as soon as the outcome and its explaining event are
/// both determined. Produces exactly the same event as [`run_trial`].
fn run_trial_event(cfg: &CodeConfig, trial: u64) -> Result<TrialEvent> {
    let base = cfg.seed ^ trial;
    let joints = trial_joints(cfg)?;
    let m_c = cfg.m_c();
    let m_x = cfg.m_x();
    let (book_u, book_v) = match generate_codebooks(cfg, base) {
        Ok(books) => books,
        Err(Error::SamplingFailed { .. }) => return Ok(TrialEvent::SamplingFailed),
        Err(e) => return Err(e),
    };
    let w_sel = SplitMix64::substream(base, TAG_SELECT, 0).next_below(m_c);
    let x_w = trial_pattern(cfg, base, w_sel);
    let noise = bernoulli_word(
        &mut SplitMix64::substream(base, TAG_NOISE, 0),
        cfg.n,
        cfg.q,
    );
    let y = x_w ^ noise;

    let e0 = !pair_typical(x_w, y, cfg.n, &joints.xy, cfg.delta);
    let (m_w, e1) = memory_encode(&book_u, x_w, &joints.xu, cfg.delta);
    let (mu, e3) = sensory_encode(&book_v, y, &joints.yv, cfg.delta);
    let v_word = book_v.words[mu];
    let flag = |m: usize| pair_typical(book_u.words[m], v_word, cfg.n, &joints.uv, cfg.delta);
    let flag_mw = flag(m_w);

    let pigeonhole = m_c > m_x;
    let mut seen = vec![0u64; (m_x as usize + 63) / 64];
    let mark = |seen: &mut [u64], m: usize| -> bool {
        let hit = seen[m / 64] & (1 << (m % 64)) != 0;
        seen[m / 64] |= 1 << (m % 64);
        hit
    };
    mark(&mut seen, m_w);

    let mut collision_seen = false;
    // Count of active non-m_w codewords matching the observation (capped at 2).
    let mut other_matches = 0u32;
    // Some pattern before the selected one owns the selected index, which
    // would steal the label lookup.
    let mut earlier_owner = false;
    let mut scanned_all = true;
    for w in 0..m_c {
        if w == w_sel {
            continue;
        }
        // The classifier falls back to index 0 on no/multiple matches, so
        // when the selected pattern sits at index 0 an accidental correct
        // outcome stays possible until the final match count is known.
        let ok_possible = !earlier_owner
            && if m_w != 0 {
                flag_mw && other_matches == 0
            } else {
                true
            };
        if !ok_possible && (e0 || e1 || collision_seen || pigeonhole) {
            scanned_all = false;
            break;
        }
        let (m, _) = memory_encode(&book_u, trial_pattern(cfg, base, w), &joints.xu, cfg.delta);
        if mark(&mut seen, m) {
            collision_seen = true;
        }
        if m != m_w && flag(m) && other_matches < 2 {
            other_matches += 1;
        }
        if m == m_w && w < w_sel {
            earlier_owner = true;
        }
    }

    if scanned_all {
        let total_matches = u32::from(flag_mw) + other_matches;
        let ok = if total_matches == 1 && flag_mw {
            !earlier_owner
        } else if total_matches != 1 {
            // Fallback m_hat = 0: accidentally correct only if the selected
            // pattern owns index 0 and no earlier pattern does.
            m_w == 0 && !earlier_owner
        } else {
            false
        };
        if ok {
            return Ok(TrialEvent::Ok);
        }
        let e2 = collision_seen;
        let e4 = !flag_mw && other_matches == 0;
        let e5 = other_matches > 0;
        Ok(first_event(e0, e1, e2, e3, e4, e5))
    } else {
        // Early exit: the outcome is an error and e0/e1/e2 already explain it.
        Ok(first_event(e0, e1, true, false, false, false))
    }
}

/// Run trials `range.start..range.end` (trial indices seed their own
/// substreams, so disjoint ranges can run on different threads and merge).
pub fn run_trial_range(cfg: &CodeConfig, range: Range<u64>) -> Result<SimulationResult> {
    let mut result = SimulationResult::default();
    for t in range {
        result.record(run_trial_event(cfg, t)?);
    }
    Ok(result)
}

/// Run `trials` independent trials (fresh codebooks and training set per
/// trial) and aggregate the event counts.
pub fn run_trials(cfg: &CodeConfig, trials: u64) -> Result<SimulationResult> {
    if trials == 0 {
        return Err(Error::InvalidConfig("need at least one trial"));
    }
    run_trial_range(cfg, 0..trials)
}

// ---------------------------------------------------------------------------
// Fixed-code instances (single codebook/training draw, noise-only trials)
// ---------------------------------------------------------------------------

/// A frozen draw of codebooks, training set, and test index. Only the
/// channel noise varies between evaluations, which makes the error
/// probability exactly computable by enumerating noise patterns.
#[derive(Clone, Debug)]
pub struct FixedCodeInstance {
    cfg: CodeConfig,
    joints: TrialJointsOwned,
    book_u: Codebook,
    book_v: Codebook,
    w_sel: u64,
    x_w: u64,
    assignments: Vec<usize>,
    e1: bool,
    e2: bool,
    active: Vec<usize>,
    labeled: Vec<(usize, u64)>,
}

#[derive(Clone, Debug)]
struct TrialJointsOwned {
    xy: BitPairJoint,
    yv: BitPairJoint,
    uv: BitPairJoint,
}

impl FixedCodeInstance {
    /// Draw one instance from the configuration's seed (trial-0 substreams).
    pub fn generate(cfg: &CodeConfig) -> Result<Self> {
        let base = cfg.seed;
        let joints = trial_joints(cfg)?;
        let (book_u, book_v) = generate_codebooks(cfg, base)?;
        let m_c = cfg.m_c();
        let w_sel = SplitMix64::substream(base, TAG_SELECT, 0).next_below(m_c);
        let x_w = trial_pattern(cfg, base, w_sel);
        let mut assignments = Vec::with_capacity(m_c as usize);
        let mut e1 = false;
        for w in 0..m_c {
            let pattern = if w == w_sel { x_w } else { trial_pattern(cfg, base, w) };
            let (m, failed) = memory_encode(&book_u, pattern, &joints.xu, cfg.delta);
            if w == w_sel {
                e1 = failed;
            }
            assignments.push(m);
        }
        let e2 = detect_collision(&assignments);
        let mut active: Vec<usize> = assignments.clone();
        active.sort_unstable();
        active.dedup();
        let labeled: Vec<(usize, u64)> = assignments
            .iter()
            .enumerate()
            .map(|(w, &m)| (m, w as u64))
            .collect();
        Ok(FixedCodeInstance {
            cfg: cfg.clone(),
            joints: TrialJointsOwned {
                xy: joints.xy,
                yv: joints.yv,
                uv: joints.uv,
            },
            book_u,
            book_v,
            w_sel,
            x_w,
            assignments,
            e1,
            e2,
            active,
            labeled,
        })
    }

    pub fn selected_w(&self) -> u64 {
        self.w_sel
    }

    pub fn selected_pattern(&self) -> u64 {
        self.x_w
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn memory_book(&self) -> &Codebook {
        &self.book_u
    }

    pub fn sensory_book(&self) -> &Codebook {
        &self.book_v
    }

    pub fn config(&self) -> &CodeConfig {
        &self.cfg
    }

    /// Run the decode pipeline for one concrete noise word.
    pub fn outcome_for_noise(&self, noise: u64) -> TrialOutcome {
        let cfg = &self.cfg;
        let y = self.x_w ^ (noise & cfg.mask());
        let m_w = self.assignments[self.w_sel as usize];
        let e0 = !pair_typical(self.x_w, y, cfg.n, &self.joints.xy, cfg.delta);
        let (mu, e3) = sensory_encode(&self.book_v, y, &self.joints.yv, cfg.delta);
        let v_word = self.book_v.words[mu];
        let cls = classify(
            &self.book_u,
            &self.active,
            v_word,
            &self.labeled,
            &self.joints.uv,
            cfg.delta,
        );
        let ok = cls.w_hat == self.w_sel && cls.m_hat == m_w;
        let e4 = cls.no_match;
        let e5 = !cls.no_match && cls.matches != [m_w];
        let event = if ok {
            TrialEvent::Ok
        } else {
            first_event(e0, self.e1, self.e2, e3, e4, e5)
        };
        TrialOutcome {
            selected_w: self.w_sel,
            m_assigned: m_w,
            mu,
            m_hat: cls.m_hat,
            w_hat: cls.w_hat,
            event,
        }
    }

    /// Monte Carlo over channel noise only.
    pub fn monte_carlo(&self, trials: u64) -> Result<SimulationResult> {
        if trials == 0 {
            return Err(Error::InvalidConfig("need at least one trial"));
        }
        let mut result = SimulationResult::default();
        for t in 0..trials {
            let noise = bernoulli_word(
                &mut SplitMix64::substream(self.cfg.seed, TAG_NOISE, t + 1),
                self.cfg.n,
                self.cfg.q,
            );
            result.record(self.outcome_for_noise(noise).event);
        }
        Ok(result)
    }

    /// Exact error probability by enumerating all `2^n` noise words,
    /// weighted by the iid channel measure.
    pub fn exhaustive_error_probability(&self) -> f64 {
        let n = self.cfg.n;
        let q = self.cfg.q;
        let mut p_err = 0.0;
        for noise in 0u64..(1 << n) {
            let k = noise.count_ones() as i32;
            let weight = libm_pow(q, k) * libm_pow(1.0 - q, n as i32 - k);
            if self.outcome_for_noise(noise).event != TrialEvent::Ok {
                p_err += weight;
            }
        }
        p_err.clamp(0.0, 1.0)
    }
}

fn libm_pow(base: f64, exp: i32) -> f64 {
    let mut out = 1.0;
    for _ in 0..exp {
        out *= base;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf;
    use proptest::prelude::*;

    fn test_cfg(n: usize, r_c: f64, r_x: f64, r_y: f64, delta: f64, seed: u64) -> CodeConfig {
        let q_x = crate::binary::inverse_binary_entropy(1.0 - r_x).unwrap();
        let q_y = crate::binary::inverse_binary_entropy(1.0 - r_y).unwrap();
        CodeConfig::new(n, 0.2, q_x, q_y, r_c, r_x, r_y, delta, seed).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(CodeConfig::new(3, 0.2, 0.1, 0.1, 0.1, 0.5, 0.5, 0.1, 0).is_err());
        assert!(CodeConfig::new(8, 0.6, 0.1, 0.1, 0.1, 0.5, 0.5, 0.1, 0).is_err());
        assert!(CodeConfig::new(8, 0.2, 0.1, 0.1, 0.1, 3.5, 0.5, 0.1, 0).is_err());
        assert!(CodeConfig::new(8, 0.2, 0.1, 0.1, 0.1, 0.5, 0.5, 0.6, 0).is_err());
        let cfg = CodeConfig::new(12, 0.2, 0.1, 0.1, 0.1, 0.5, 0.5, 0.1, 0).unwrap();
        assert_eq!(cfg.m_x(), 64);
        assert_eq!(cfg.m_c(), (libm::exp2(1.2)).round() as u64);
        assert_eq!(CodeConfig::default_delta(12), 0.1);
        assert_eq!(CodeConfig::default_delta(13), 0.05);
    }

    #[test]
    fn typicality_exact_type_passes() {
        // n = 4 sequence matching the pmf frequencies of a uniform pair.
        let joint = BitPairJoint::symmetric(0.5)
            .unwrap()
            .to_joint_pmf(pmf::X, pmf::Y)
            .unwrap();
        let xs = [0u8, 0, 1, 1];
        let ys = [0u8, 1, 0, 1];
        assert!(typicality_test(&[&xs, &ys], &joint, 0.01).unwrap());
    }

    #[test]
    fn typicality_all_zeros_fails_uniform() {
        let marginal = JointPmf::from_marginal(pmf::X, &[0.5, 0.5]).unwrap();
        let zeros = vec![0u8; 20];
        assert!(!typicality_test(&[&zeros], &marginal, 0.1).unwrap());
    }

    #[test]
    fn typicality_law_of_large_numbers() {
        let marginal = JointPmf::from_marginal(pmf::X, &[0.7, 0.3]).unwrap();
        let mut rng = SplitMix64::new(99);
        let n = 1000;
        let mut hits = 0;
        let samples = 200;
        for _ in 0..samples {
            let seq: Vec<u8> = (0..n).map(|_| u8::from(rng.next_bool(0.3))).collect();
            if typicality_test(&[&seq], &marginal, 0.1).unwrap() {
                hits += 1;
            }
        }
        assert!(hits as f64 / samples as f64 > 0.99, "hits={hits}");
    }

    #[test]
    fn typicality_rejects_misaligned() {
        let joint = BitPairJoint::symmetric(0.2)
            .unwrap()
            .to_joint_pmf(pmf::X, pmf::Y)
            .unwrap();
        let a = [0u8, 1];
        let b = [0u8, 1, 0];
        assert!(typicality_test(&[&a, &b], &joint, 0.1).is_err());
    }

    proptest! {
        #[test]
        fn packed_pair_typicality_matches_generic(
            a in 0u64..(1 << 12),
            b in 0u64..(1 << 12),
            q in 0.0f64..=0.5,
            delta in 0.01f64..=0.4,
        ) {
            let n = 12;
            let joint = BitPairJoint::symmetric(q).unwrap();
            let packed = pair_typical(a, b, n, &joint, delta);
            let pa: Vec<u8> = (0..n).map(|i| ((a >> i) & 1) as u8).collect();
            let pb: Vec<u8> = (0..n).map(|i| ((b >> i) & 1) as u8).collect();
            let generic = typicality_test(
                &[&pa, &pb],
                &joint.to_joint_pmf(pmf::X, pmf::Y).unwrap(),
                delta,
            ).unwrap();
            prop_assert_eq!(packed, generic);
        }
    }

    #[test]
    fn sample_typical_counting_band() {
        let marginal = JointPmf::from_marginal(pmf::X, &[0.5, 0.5]).unwrap();
        let mut rng = SplitMix64::new(5);
        for _ in 0..200 {
            let seq = sample_typical(&marginal, 8, 0.25, 1_000_000, &mut rng).unwrap();
            let ones = seq.iter().filter(|&&b| b == 1).count();
            assert!((2..=6).contains(&ones), "ones={ones}");
        }
    }

    #[test]
    fn sample_typical_wide_band_accepts_first_draw() {
        let marginal = JointPmf::from_marginal(pmf::X, &[0.5, 0.5]).unwrap();
        let mut rng = SplitMix64::new(5);
        // With delta = 0.49 every sequence except the two constant ones is
        // typical at n = 8; acceptance should be nearly immediate.
        assert!(sample_typical(&marginal, 8, 0.49, 4, &mut rng).is_ok());
    }

    #[test]
    fn sample_typical_point_mass_and_failure() {
        let point = JointPmf::from_marginal(pmf::X, &[1.0, 0.0]).unwrap();
        let mut rng = SplitMix64::new(1);
        let seq = sample_typical(&point, 6, 0.1, 100, &mut rng).unwrap();
        assert_eq!(seq, vec![0u8; 6]);

        let skew = JointPmf::from_marginal(pmf::X, &[0.9, 0.1]).unwrap();
        // Impossible band: no length-5 type is within 0.001 of (0.9, 0.1).
        let err = sample_typical(&skew, 5, 0.001, 200, &mut rng);
        assert!(matches!(err, Err(Error::SamplingFailed { .. })));
    }

    #[test]
    fn codebooks_are_deterministic_and_typical() {
        let cfg = test_cfg(12, 0.1, 0.5, 0.5, 0.1, 77);
        let (bu1, bv1) = generate_codebooks(&cfg, cfg.seed).unwrap();
        let (bu2, bv2) = generate_codebooks(&cfg, cfg.seed).unwrap();
        assert_eq!(bu1, bu2);
        assert_eq!(bv1, bv2);
        assert_eq!(bu1.len(), 64);
        for &w in bu1.words() {
            assert!(word_typical(w, 12, 0.5, 0.1));
        }
    }

    #[test]
    fn single_codeword_book() {
        let cfg = test_cfg(8, 0.01, 0.01, 0.01, 0.2, 3);
        assert_eq!(cfg.m_x(), 1);
        let (bu, _) = generate_codebooks(&cfg, 0).unwrap();
        assert_eq!(bu.len(), 1);
    }

    #[test]
    fn memory_encode_finds_exact_match_under_identity_channel() {
        let joint = BitPairJoint::symmetric(0.0).unwrap();
        let book = Codebook {
            n: 8,
            words: vec![0b1010_1010, 0b0011_1100, 0b0101_0101],
        };
        // delta small enough that only the pattern itself (balanced) matches
        let (idx, fail) = memory_encode(&book, 0b0011_1100, &joint, 0.05);
        assert!(!fail);
        assert_eq!(idx, 1);

        // nothing matches at tiny delta with a far-off pattern
        let (idx, fail) = memory_encode(&book, 0b1111_1111, &joint, 0.05);
        assert!(fail);
        assert_eq!(idx, 0);
    }

    #[test]
    fn memory_encode_failure_rate_decreases_with_codebook_size() {
        let joint = BitPairJoint::symmetric(0.05).unwrap();
        let mut failures = [0u32; 2];
        for (slot, m_x) in [(0usize, 4u64), (1usize, 64u64)] {
            for trial in 0..400u64 {
                let base = 1000 + trial;
                let book = generate_book(12, m_x, 0.1, 1_000_000, base, TAG_BOOK_U).unwrap();
                let pattern = SplitMix64::substream(base, TAG_PATTERN, 0).next_u64() & 0xFFF;
                if memory_encode(&book, pattern, &joint, 0.1).1 {
                    failures[slot] += 1;
                }
            }
        }
        assert!(failures[1] < failures[0], "failures={failures:?}");
    }

    #[test]
    fn collision_detection() {
        assert!(!detect_collision(&[3]));
        assert!(detect_collision(&[0, 0]));
        assert!(!detect_collision(&[0, 1, 2]));
        assert!(detect_collision(&[2, 1, 2]));
    }

    #[test]
    fn collision_rate_decreases_with_block_length_at_fixed_pattern_count() {
        let qx = crate::binary::inverse_binary_entropy(0.2).unwrap();
        let joint = BitPairJoint::symmetric(qx).unwrap();
        let mut rates = [0u32; 2];
        for (slot, n) in [(0usize, 6usize), (1usize, 12usize)] {
            let cfg =
                CodeConfig::new(n, 0.2, qx, qx, 1.0 / n as f64, 0.8, 0.8, 0.1, 77).unwrap();
            assert_eq!(cfg.m_c(), 2);
            let mask = (1u64 << n) - 1;
            for t in 0..800u64 {
                let base = cfg.seed ^ t;
                let (book, _) = generate_codebooks(&cfg, base).unwrap();
                let pa = SplitMix64::substream(base, 1, 0).next_u64() & mask;
                let pb = SplitMix64::substream(base, 1, 1).next_u64() & mask;
                let (ma, _) = memory_encode(&book, pa, &joint, 0.1);
                let (mb, _) = memory_encode(&book, pb, &joint, 0.1);
                if ma == mb {
                    rates[slot] += 1;
                }
            }
        }
        // measured ~0.56 vs ~0.18 at 800 trials
        assert!(rates[1] * 2 < rates[0], "rates={rates:?}");
    }

    #[test]
    fn channel_atypicality_rate_decreases_with_block_length() {
        // Fixed slack: longer blocks concentrate the pair type around the
        // channel law.
        let joint = BitPairJoint::symmetric(0.2).unwrap();
        let mut rng = SplitMix64::new(5);
        let mut rates = [0u32; 2];
        for (slot, n) in [(0usize, 8usize), (1usize, 16usize)] {
            let mask = (1u64 << n) - 1;
            for _ in 0..3000 {
                let x = rng.next_u64() & mask;
                let noise = bernoulli_word(&mut rng, n, 0.2);
                if !pair_typical(x, x ^ noise, n, &joint, 0.1) {
                    rates[slot] += 1;
                }
            }
        }
        // exact multinomial values: 0.725 at n=8, 0.503 at n=16
        assert!(rates[1] < rates[0], "rates={rates:?}");
    }

    #[test]
    fn classify_cases() {
        let joint = BitPairJoint::symmetric(0.0).unwrap();
        let book = Codebook {
            n: 8,
            words: vec![0b0011_1100, 0b1010_1010, 0b1010_1010],
        };
        let labeled = vec![(1usize, 0u64), (0usize, 1u64)];
        let active = vec![0usize, 1];

        // unique match -> its stored label
        let cls = classify(&book, &active, 0b1010_1010, &labeled, &joint, 0.05);
        assert_eq!(cls.m_hat, 1);
        assert_eq!(cls.w_hat, 0);
        assert!(!cls.no_match && !cls.ambiguous);

        // no match at delta = tiny with a mismatched observation
        let cls = classify(&book, &active, 0b1111_0000, &labeled, &joint, 0.01);
        assert!(cls.no_match);
        assert_eq!(cls.m_hat, 0);

        // duplicated codewords both typical -> ambiguous
        let labeled = vec![(1usize, 0u64), (2usize, 1u64)];
        let cls = classify(&book, &[1, 2], 0b1010_1010, &labeled, &joint, 0.05);
        assert!(cls.ambiguous);
        assert_eq!(cls.m_hat, 0);
    }

    #[test]
    fn trials_are_deterministic() {
        let cfg = test_cfg(10, 0.15, 0.6, 0.6, 0.1, 2024);
        let a = run_trials(&cfg, 60).unwrap();
        let b = run_trials(&cfg, 60).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials, 60);
        assert_eq!(
            a.ok + a.events.iter().sum::<u64>() + a.sampling_failed,
            a.trials
        );
    }

    #[test]
    fn trial_ranges_merge_to_same_result() {
        let cfg = test_cfg(10, 0.15, 0.6, 0.6, 0.1, 99);
        let whole = run_trials(&cfg, 50).unwrap();
        let mut merged = run_trial_range(&cfg, 0..17).unwrap();
        merged.merge(&run_trial_range(&cfg, 17..50).unwrap());
        assert_eq!(whole, merged);
    }

    #[test]
    fn lazy_event_path_matches_full_path() {
        for seed in 0..6u64 {
            let cfg = test_cfg(8, 0.3, 0.6, 0.6, 0.12, 5000 + seed);
            for t in 0..120u64 {
                let full = run_trial(&cfg, t).unwrap().event;
                let lazy = run_trial_event(&cfg, t).unwrap();
                assert_eq!(full, lazy, "seed={seed} trial={t}");
            }
        }
        // A configuration where collisions and fallbacks are common.
        let cfg = CodeConfig::new(8, 0.2, 0.05, 0.05, 0.5, 0.4, 0.4, 0.2, 31).unwrap();
        for t in 0..200u64 {
            let full = run_trial(&cfg, t).unwrap().event;
            let lazy = run_trial_event(&cfg, t).unwrap();
            assert_eq!(full, lazy, "trial={t}");
        }
    }

    #[test]
    fn pigeonhole_configs_flag_collisions() {
        // M_c far above M_x: every trial has a guaranteed collision.
        let cfg = CodeConfig::new(8, 0.2, 0.031, 0.031, 0.9, 0.8, 0.8, 0.1, 7).unwrap();
        assert!(cfg.m_c() > cfg.m_x());
        let res = run_trials(&cfg, 80).unwrap();
        assert!(res.p_e_hat() > 0.3);
    }

    #[test]
    fn noiseless_channel_is_deterministic() {
        // q = 0: the only noise word is zero, so a fixed instance has error
        // probability exactly 0 or 1 and Monte Carlo reproduces it exactly.
        let cfg = CodeConfig::new(12, 0.0, 0.0, 0.0, 0.01, 0.8, 0.8, 0.3, 11).unwrap();
        assert_eq!(cfg.m_c(), 1);
        let inst = FixedCodeInstance::generate(&cfg).unwrap();
        let exact = inst.exhaustive_error_probability();
        assert!(exact == 0.0 || exact == 1.0, "exact={exact}");
        let mc = inst.monte_carlo(500).unwrap();
        assert_eq!(mc.p_e_hat(), exact);
    }

    #[test]
    fn fixed_instance_enumeration_matches_direct_average() {
        let cfg = CodeConfig::new(6, 0.2, 0.0, 0.0, 0.17, 0.5, 0.5, 0.18, 2).unwrap();
        let inst = FixedCodeInstance::generate(&cfg).unwrap();
        let exact = inst.exhaustive_error_probability();
        // Non-degenerate instance: the agreement check has statistical teeth.
        assert!(exact > 0.05 && exact < 0.95, "exact={exact}");
        let mc = inst.monte_carlo(20_000).unwrap();
        let se = (exact * (1.0 - exact) / 20_000.0).sqrt();
        assert!(
            (mc.p_e_hat() - exact).abs() < 5.0 * se,
            "mc={} exact={exact}",
            mc.p_e_hat()
        );
    }

    #[test]
    fn fixed_instance_outcomes_are_pure() {
        let cfg = CodeConfig::new(6, 0.2, 0.0, 0.0, 0.17, 0.5, 0.5, 0.1, 1).unwrap();
        let inst = FixedCodeInstance::generate(&cfg).unwrap();
        for noise in [0u64, 5, 63] {
            assert_eq!(
                inst.outcome_for_noise(noise),
                inst.outcome_for_noise(noise)
            );
        }
    }
}
