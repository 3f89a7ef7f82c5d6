//! End-to-end Monte Carlo simulation of the two-user Gaussian MAC.
//!
//! Both users encode on their labelled trellises, transmit simultaneously
//! with amplitude `rho` through complex AWGN, and the receiver runs joint
//! Viterbi decoding on the sum trellis.  An exhaustive maximum-likelihood
//! decoder over all codeword pairs serves as a correctness oracle for small
//! blocks.  Everything is reproducible: noise and data bits come from
//! substreams derived from `(seed, snr index, block index)`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::constellation::Point;
use crate::error::{invalid, Error, Result};
use crate::rng::substream;
use crate::trellis::{sum_trellis, LabeledTrellis, SumTrellis};

/// Channel and campaign parameters.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelConfig {
    /// Per-user transmit amplitude (each user sends `rho * x`).
    pub rho: f64,
    /// Total complex noise variance (`sigma2/2` per real dimension).
    pub sigma2: f64,
    /// Symbols per block, termination steps included.
    pub block_len: usize,
    pub blocks: usize,
    pub seed: u64,
}

impl ChannelConfig {
    fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) {
            return Err(invalid(format!("rho must be positive, got {}", self.rho)));
        }
        if !(self.sigma2 >= 0.0) {
            return Err(invalid(format!("sigma2 must be nonnegative, got {}", self.sigma2)));
        }
        if self.block_len == 0 || self.blocks == 0 {
            return Err(invalid("block_len and blocks must be positive"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

fn pack_words(bits: &[u8], m: usize) -> Result<Vec<usize>> {
    if bits.len() % m != 0 {
        return Err(invalid(format!(
            "bit count {} is not a multiple of the {m} input bits per step",
            bits.len()
        )));
    }
    if bits.iter().any(|&b| b > 1) {
        return Err(invalid("bits must be 0 or 1"));
    }
    Ok(bits
        .chunks(m)
        .map(|chunk| chunk.iter().fold(0usize, |w, &b| (w << 1) | b as usize))
        .collect())
}

fn unpack_words(words: &[usize], m: usize) -> Vec<u8> {
    let mut bits = Vec::with_capacity(words.len() * m);
    for &w in words {
        for j in (0..m).rev() {
            bits.push(((w >> j) & 1) as u8);
        }
    }
    bits
}

/// Walks the trellis from state 0 and appends `tail_steps` termination
/// inputs driving it back to state 0.
fn encode_with_tail(t: &LabeledTrellis, bits: &[u8], tail_steps: usize) -> Result<Vec<usize>> {
    let words = pack_words(bits, t.input_bits())?;
    let mut symbols = Vec::with_capacity(words.len() + tail_steps);
    let mut state = 0usize;
    for &w in &words {
        let e = t.edge(state, w);
        symbols.push(e.label);
        state = e.to;
    }
    if tail_steps < t.max_tail_steps() {
        return Err(invalid(format!(
            "{tail_steps} termination steps cannot cover the worst case of {}",
            t.max_tail_steps()
        )));
    }
    for _ in 0..tail_steps {
        let u = t
            .tail_input(state)
            .ok_or_else(|| invalid(format!("state {state} cannot terminate to state 0")))?;
        let e = t.edge(state, u);
        symbols.push(e.label);
        state = e.to;
    }
    if state != 0 {
        return Err(invalid("encoder did not return to state 0 within the tail"));
    }
    Ok(symbols)
}

/// Encodes an information bit sequence: one alphabet index per trellis step,
/// with the trellis's own worst-case number of termination steps appended.
pub fn encode(t: &LabeledTrellis, bits: &[u8]) -> Result<Vec<usize>> {
    encode_with_tail(t, bits, t.max_tail_steps())
}

// ---------------------------------------------------------------------------
// Channel
// ---------------------------------------------------------------------------

fn transmit_with_rng(
    x1: &[Point],
    x2: &[Point],
    rho: f64,
    sigma2: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Point> {
    let scale = (sigma2 / 2.0).sqrt();
    x1.iter()
        .zip(x2)
        .map(|(&a, &b)| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            rho * a + rho * b + Point::new(re * scale, im * scale)
        })
        .collect()
}

/// Superimposes both users with amplitude `rho` and adds complex Gaussian
/// noise of total variance `sigma2`: `y[t] = rho*x1[t] + rho*x2[t] + z[t]`.
///
/// Deterministic for a given `cfg.seed`.
pub fn transmit(x1: &[Point], x2: &[Point], cfg: &ChannelConfig) -> Result<Vec<Point>> {
    cfg.validate()?;
    if x1.len() != x2.len() {
        return Err(invalid(format!(
            "user streams differ in length: {} vs {}",
            x1.len(),
            x2.len()
        )));
    }
    let mut rng = substream(cfg.seed, 2, 0);
    Ok(transmit_with_rng(x1, x2, cfg.rho, cfg.sigma2, &mut rng))
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

/// Joint decoding result.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDecode {
    pub bits1: Vec<u8>,
    pub bits2: Vec<u8>,
    /// Decoded input word pairs, one per trellis step (tail included).
    pub inputs: Vec<(usize, usize)>,
    /// Accumulated squared-distance metric of the decoded path.
    pub metric: f64,
    /// Exact metric ties encountered while decoding.
    pub tie_events: u64,
}

/// Squared distance from each received symbol to each scaled edge label,
/// indexed `[step][edge]`.  Shared by both decoders so their path metrics
/// are bit-identical.
fn edge_distance_table(st: &SumTrellis, y: &[Point], rho: f64) -> Vec<Vec<f64>> {
    y.iter()
        .map(|&r| {
            st.edges()
                .iter()
                .map(|e| (r - rho * e.label.value).norm_sqr())
                .collect()
        })
        .collect()
}

/// Reconstructs the per-step local edge indices of the survivor ending in
/// `state` after `steps` steps.
fn survivor_inputs(
    survivors: &[Vec<u32>],
    edges_from: impl Fn(u32) -> usize,
    deg: usize,
    steps: usize,
    mut state: usize,
) -> Vec<u32> {
    let mut seq = vec![0u32; steps];
    for t in (0..steps).rev() {
        let e = survivors[t][state];
        seq[t] = e % deg as u32;
        state = edges_from(e);
    }
    seq
}

/// Maximum-likelihood sequence decoding of the sum trellis by the Viterbi
/// algorithm, constrained to start and end in state 0.
///
/// Exact metric ties are broken toward the lexicographically smallest
/// input-pair sequence (`(u1 << m2) | u2` per step), the same rule the
/// exhaustive oracle uses, so the two decoders are interchangeable.
pub fn viterbi_joint_decode(st: &SumTrellis, y: &[Point], rho: f64) -> Result<JointDecode> {
    if y.is_empty() {
        return Err(invalid("received sequence is empty"));
    }
    let states = st.states();
    let deg = st.out_degree();
    let dists = edge_distance_table(st, y, rho);
    let steps = y.len();

    let mut metric = vec![f64::INFINITY; states];
    metric[0] = 0.0;
    let mut survivors: Vec<Vec<u32>> = Vec::with_capacity(steps);
    let mut tie_events = 0u64;

    for t in 0..steps {
        let mut next = vec![f64::INFINITY; states];
        let mut surv = vec![u32::MAX; states];
        for s in 0..states {
            if !metric[s].is_finite() {
                continue;
            }
            let base = s * deg;
            for local in 0..deg {
                let idx = base + local;
                let cand = metric[s] + dists[t][idx];
                let to = st.edges()[idx].to;
                if cand < next[to] {
                    next[to] = cand;
                    surv[to] = idx as u32;
                } else if cand == next[to] {
                    tie_events += 1;
                    // Prefer the lexicographically smaller input sequence.
                    let edge_from = |e: u32| st.edges()[e as usize].from;
                    let mut challenger =
                        survivor_inputs(&survivors, edge_from, deg, t, s);
                    challenger.push(local as u32);
                    let incumbent_prev = edge_from(surv[to]);
                    let mut incumbent =
                        survivor_inputs(&survivors, edge_from, deg, t, incumbent_prev);
                    incumbent.push(surv[to] % deg as u32);
                    if challenger < incumbent {
                        surv[to] = idx as u32;
                    }
                }
            }
        }
        metric = next;
        survivors.push(surv);
    }

    if !metric[0].is_finite() {
        return Err(invalid(
            "no path returns to state 0; check block length and termination",
        ));
    }
    let edge_from = |e: u32| st.edges()[e as usize].from;
    let locals = survivor_inputs(&survivors, edge_from, deg, steps, 0);
    Ok(assemble_decode(st, &locals, metric[0], tie_events))
}

fn assemble_decode(
    st: &SumTrellis,
    locals: &[u32],
    metric: f64,
    tie_events: u64,
) -> JointDecode {
    let (m1, m2) = st.input_bits();
    let inputs: Vec<(usize, usize)> = locals
        .iter()
        .map(|&l| ((l as usize) >> m2, (l as usize) & ((1 << m2) - 1)))
        .collect();
    let words1: Vec<usize> = inputs.iter().map(|&(a, _)| a).collect();
    let words2: Vec<usize> = inputs.iter().map(|&(_, b)| b).collect();
    JointDecode {
        bits1: unpack_words(&words1, m1),
        bits2: unpack_words(&words2, m2),
        inputs,
        metric,
        tie_events,
    }
}

/// Exhaustive maximum-likelihood decoding: enumerates every input-pair
/// sequence that starts and ends in state 0 and returns the minimum-metric
/// one (lexicographically smallest on exact ties).
///
/// The candidate count is capped at `2^24` paths.
pub fn ml_oracle_decode(st: &SumTrellis, y: &[Point], rho: f64) -> Result<JointDecode> {
    if y.is_empty() {
        return Err(invalid("received sequence is empty"));
    }
    let deg = st.out_degree() as u128;
    let paths = deg.checked_pow(y.len() as u32).unwrap_or(u128::MAX);
    if paths > 1 << 24 {
        return Err(Error::BudgetExceeded(format!(
            "{paths} candidate paths exceed the exhaustive budget of 2^24; \
             use viterbi_joint_decode for long blocks"
        )));
    }
    let dists = edge_distance_table(st, y, rho);
    let deg = st.out_degree();
    let steps = y.len();

    struct Search<'a> {
        st: &'a SumTrellis,
        dists: &'a [Vec<f64>],
        deg: usize,
        steps: usize,
        best_metric: f64,
        best_seq: Vec<u32>,
        optimal_paths: u64,
        seq: Vec<u32>,
    }

    impl Search<'_> {
        fn visit(&mut self, state: usize, t: usize, acc: f64) {
            if acc > self.best_metric {
                return;
            }
            if t == self.steps {
                if state != 0 {
                    return;
                }
                if acc < self.best_metric {
                    self.best_metric = acc;
                    self.best_seq = self.seq.clone();
                    self.optimal_paths = 1;
                } else if acc == self.best_metric {
                    // Depth-first order visits sequences lexicographically,
                    // so the first optimum found already wins ties.
                    self.optimal_paths += 1;
                }
                return;
            }
            let base = state * self.deg;
            for local in 0..self.deg {
                let idx = base + local;
                self.seq.push(local as u32);
                self.visit(self.st.edges()[idx].to, t + 1, acc + self.dists[t][idx]);
                self.seq.pop();
            }
        }
    }

    let mut search = Search {
        st,
        dists: &dists,
        deg,
        steps,
        best_metric: f64::INFINITY,
        best_seq: Vec::new(),
        optimal_paths: 0,
        seq: Vec::with_capacity(steps),
    };
    search.visit(0, 0, 0.0);
    if search.optimal_paths == 0 {
        return Err(invalid(
            "no path returns to state 0; check block length and termination",
        ));
    }
    let ties = search.optimal_paths - 1;
    Ok(assemble_decode(st, &search.best_seq, search.best_metric, ties))
}

// ---------------------------------------------------------------------------
// BER harness
// ---------------------------------------------------------------------------

const WILSON_Z: f64 = 1.959963984540054;

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Error statistics for one bit stream.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateStat {
    pub errors: u64,
    pub total: u64,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl RateStat {
    fn new(errors: u64, total: u64) -> Self {
        let (wilson_low, wilson_high) = wilson_interval(errors, total);
        RateStat {
            errors,
            total,
            rate: if total == 0 { 0.0 } else { errors as f64 / total as f64 },
            wilson_low,
            wilson_high,
        }
    }
}

/// Monte Carlo statistics for one SNR point.
#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    /// `10*log10(2*rho^2 / sigma2)`: both users' power over the noise.
    pub snr_db: f64,
    pub sigma2: f64,
    pub rho: f64,
    pub seed: u64,
    pub blocks: u64,
    pub block_len: usize,
    /// Information steps per block (tail excluded).
    pub info_steps: usize,
    pub ber1: RateStat,
    pub ber2: RateStat,
    /// Both users' information bits pooled.
    pub ber_pooled: RateStat,
    /// Joint symbol errors: steps whose decoded input pair differs.
    pub ser: RateStat,
    /// Blocks with at least one information-bit error.
    pub fer: RateStat,
    /// Blocks during which the decoder hit at least one exact metric tie.
    pub decode_tie_blocks: u64,
}

fn sigma2_for_snr_db(snr_db: f64, rho: f64) -> f64 {
    2.0 * rho * rho / 10f64.powf(snr_db / 10.0)
}

/// Runs `cfg.blocks` random blocks per SNR point and aggregates error
/// statistics.  `cfg.sigma2` is ignored here; each SNR point derives its
/// own noise variance from `snr_db` with `rho` fixed.
///
/// Reports are bit-identical across runs for identical `(cfg, snr_list_db)`.
pub fn run_ber(
    t1: &LabeledTrellis,
    t2: &LabeledTrellis,
    cfg: &ChannelConfig,
    snr_list_db: &[f64],
) -> Result<Vec<SimReport>> {
    cfg.validate()?;
    let st = sum_trellis(t1, t2)?;
    run_ber_on(&st, t1, t2, cfg, snr_list_db)
}

/// [`run_ber`] over an already-built sum trellis.
pub fn run_ber_on(
    st: &SumTrellis,
    t1: &LabeledTrellis,
    t2: &LabeledTrellis,
    cfg: &ChannelConfig,
    snr_list_db: &[f64],
) -> Result<Vec<SimReport>> {
    cfg.validate()?;
    if st.component_states() != (t1.states(), t2.states())
        || st.input_bits() != (t1.input_bits(), t2.input_bits())
    {
        return Err(invalid("sum trellis does not match the component trellises"));
    }
    let tail = st.max_tail_steps();
    if cfg.block_len <= tail {
        return Err(invalid(format!(
            "block_len {} must exceed the {tail} termination steps",
            cfg.block_len
        )));
    }
    let info_steps = cfg.block_len - tail;
    let (m1, m2) = (t1.input_bits(), t2.input_bits());

    let mut reports = Vec::with_capacity(snr_list_db.len());
    for (snr_index, &snr_db) in snr_list_db.iter().enumerate() {
        let sigma2 = sigma2_for_snr_db(snr_db, cfg.rho);
        let mut errors1 = 0u64;
        let mut errors2 = 0u64;
        let mut symbol_errors = 0u64;
        let mut frame_errors = 0u64;
        let mut tie_blocks = 0u64;

        for block in 0..cfg.blocks {
            let mut rng = substream(cfg.seed, 0x10 + snr_index as u64, block as u64);
            let bits1: Vec<u8> = (0..m1 * info_steps).map(|_| rng.random::<bool>() as u8).collect();
            let bits2: Vec<u8> = (0..m2 * info_steps).map(|_| rng.random::<bool>() as u8).collect();
            let sym1 = encode_with_tail(t1, &bits1, tail)?;
            let sym2 = encode_with_tail(t2, &bits2, tail)?;
            let x1: Vec<Point> = sym1.iter().map(|&i| t1.alphabet().point(i)).collect();
            let x2: Vec<Point> = sym2.iter().map(|&i| t2.alphabet().point(i)).collect();
            let y = transmit_with_rng(&x1, &x2, cfg.rho, sigma2, &mut rng);
            let decoded = viterbi_joint_decode(st, &y, cfg.rho)?;

            let e1 = count_diffs(&bits1, &decoded.bits1[..bits1.len()]);
            let e2 = count_diffs(&bits2, &decoded.bits2[..bits2.len()]);
            errors1 += e1;
            errors2 += e2;
            if e1 + e2 > 0 {
                frame_errors += 1;
            }
            if decoded.tie_events > 0 {
                tie_blocks += 1;
            }
            let words1 = pack_words(&bits1, m1)?;
            let words2 = pack_words(&bits2, m2)?;
            for t in 0..info_steps {
                if decoded.inputs[t] != (words1[t], words2[t]) {
                    symbol_errors += 1;
                }
            }
        }

        let blocks = cfg.blocks as u64;
        let n1 = blocks * (m1 * info_steps) as u64;
        let n2 = blocks * (m2 * info_steps) as u64;
        reports.push(SimReport {
            snr_db,
            sigma2,
            rho: cfg.rho,
            seed: cfg.seed,
            blocks,
            block_len: cfg.block_len,
            info_steps,
            ber1: RateStat::new(errors1, n1),
            ber2: RateStat::new(errors2, n2),
            ber_pooled: RateStat::new(errors1 + errors2, n1 + n2),
            ser: RateStat::new(symbol_errors, blocks * info_steps as u64),
            fer: RateStat::new(frame_errors, blocks),
            decode_tie_blocks: tie_blocks,
        });
    }
    Ok(reports)
}

fn count_diffs(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}
