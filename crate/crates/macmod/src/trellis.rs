//! Labelled per-user trellises and the joint sum trellis.
//!
//! Each user runs a convolutional encoder that adds exactly one redundancy
//! bit: `m` input bits, `m+1` output bits, alphabet size `2^{m+1}`.  The
//! `2^m` edges diverging from a state therefore carry half the alphabet,
//! and under Ungerboeck labelling that half is one of the two index-parity
//! classes.  The receiver decodes on the product (sum) trellis whose edge
//! labels are sums of the component labels; its figure of merit is the
//! guaranteed minimum squared Euclidean distance over per-state diverging
//! label sets.

use serde::{Deserialize, Serialize};

use crate::constellation::{
    canonical_rotation, sum_alphabet, PskSet, SumAlphabet, SumPoint, POINT_TOLERANCE,
};
use crate::error::{invalid, violation, Error, Result};

// ---------------------------------------------------------------------------
// Encoder specification
// ---------------------------------------------------------------------------

/// A convolutional encoder as explicit transition tables: `m` input bits,
/// `nu` memory bits (so `2^nu` states), and `m+1` output bits per step.
#[derive(Debug, Clone)]
pub struct EncoderSpec {
    input_bits: usize,
    memory: usize,
    next_state: Vec<Vec<usize>>,
    output_word: Vec<Vec<usize>>,
}

impl EncoderSpec {
    /// Builds a spec from explicit `[state][input]` tables.
    pub fn new(
        input_bits: usize,
        memory: usize,
        next_state: Vec<Vec<usize>>,
        output_word: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if input_bits == 0 {
            return Err(invalid("need at least 1 input bit"));
        }
        if input_bits + memory >= usize::BITS as usize - 1 {
            return Err(invalid("encoder too large"));
        }
        let states = 1usize << memory;
        let inputs = 1usize << input_bits;
        let words = 1usize << (input_bits + 1);
        for table in [&next_state, &output_word] {
            if table.len() != states || table.iter().any(|row| row.len() != inputs) {
                return Err(invalid(format!(
                    "tables must be {states} states x {inputs} inputs"
                )));
            }
        }
        if next_state.iter().flatten().any(|&s| s >= states) {
            return Err(invalid("next-state entry out of range"));
        }
        if output_word.iter().flatten().any(|&w| w >= words) {
            return Err(invalid(format!("output words must be {} bits", input_bits + 1)));
        }
        Ok(EncoderSpec {
            input_bits,
            memory,
            next_state,
            output_word,
        })
    }

    /// Builds a feedback-free encoder from binary generator masks.
    ///
    /// The state register holds the last `memory` input bits (newest in the
    /// low positions); each step shifts the `m` fresh input bits in from
    /// below.  `generators[j]` is a tap mask over the `m + memory` bits of
    /// `(input << memory) | state` and produces output bit `j`, counted
    /// from the most significant bit of the output word.
    pub fn from_generators(input_bits: usize, memory: usize, generators: &[u64]) -> Result<Self> {
        if input_bits == 0 {
            return Err(invalid("need at least 1 input bit"));
        }
        if generators.len() != input_bits + 1 {
            return Err(invalid(format!(
                "need {} generator masks (one per output bit), got {}",
                input_bits + 1,
                generators.len()
            )));
        }
        let total_bits = input_bits + memory;
        if total_bits >= 63 {
            return Err(invalid("encoder too large"));
        }
        if generators.iter().any(|&g| g >> total_bits != 0) {
            return Err(invalid(format!("generator masks must fit in {total_bits} bits")));
        }
        let states = 1usize << memory;
        let inputs = 1usize << input_bits;
        let state_mask = states - 1;
        let mut next_state = vec![vec![0usize; inputs]; states];
        let mut output_word = vec![vec![0usize; inputs]; states];
        for s in 0..states {
            for u in 0..inputs {
                let aug = ((u as u64) << memory) | s as u64;
                let mut word = 0usize;
                for &g in generators {
                    word = (word << 1) | ((aug & g).count_ones() as usize & 1);
                }
                next_state[s][u] = ((s << input_bits) | u) & state_mask;
                output_word[s][u] = word;
            }
        }
        EncoderSpec::new(input_bits, memory, next_state, output_word)
    }

    /// The standard one-bit-redundancy construction used throughout: the
    /// parity (most significant output) bit is the XOR of the state
    /// register and the input bits pass through below it.
    ///
    /// The parity bit is constant across the edges diverging from a state,
    /// which is exactly what Ungerboeck labelling needs.
    pub fn tcm_parity(input_bits: usize, memory: usize) -> Result<Self> {
        if memory == 0 {
            return Err(invalid("tcm_parity needs at least 1 memory bit"));
        }
        let mut generators = Vec::with_capacity(input_bits + 1);
        generators.push((1u64 << memory) - 1);
        for j in (0..input_bits).rev() {
            generators.push(1u64 << (memory + j));
        }
        EncoderSpec::from_generators(input_bits, memory, &generators)
    }

    /// A memoryless (single-state) spec: the input word passes through with
    /// a zero parity bit.
    pub fn uncoded(input_bits: usize) -> Result<Self> {
        let inputs = 1usize << input_bits;
        EncoderSpec::new(
            input_bits,
            0,
            vec![vec![0; inputs]],
            vec![(0..inputs).collect()],
        )
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn states(&self) -> usize {
        1 << self.memory
    }

    pub fn next(&self, state: usize, input: usize) -> usize {
        self.next_state[state][input]
    }

    pub fn output(&self, state: usize, input: usize) -> usize {
        self.output_word[state][input]
    }
}

// ---------------------------------------------------------------------------
// Labelling
// ---------------------------------------------------------------------------

/// How encoder output words map onto alphabet indices.
#[derive(Debug, Clone)]
pub enum Labelling {
    /// Detect the state-constant (redundancy) bit of the output word and
    /// map it to index parity, so every state diverges with one parity
    /// class of the alphabet.
    Ungerboeck,
    /// Use the output word directly as the alphabet index.
    NaturalBinary,
    /// An explicit output-word-to-index permutation.  Must still send every
    /// state's diverging words onto one parity class.
    Explicit(Vec<usize>),
}

/// Labelling provenance carried by a built trellis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LabellingTag {
    Ungerboeck { parity_bit: usize },
    NaturalBinary,
    Explicit,
}

/// One trellis transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrellisEdge {
    pub from: usize,
    pub to: usize,
    pub input: usize,
    /// Index into the trellis alphabet.
    pub label: usize,
}

/// A finite-state encoder graph with alphabet labels on its edges.
#[derive(Debug, Clone)]
pub struct LabeledTrellis {
    states: usize,
    input_bits: usize,
    alphabet: PskSet,
    labelling: LabellingTag,
    /// Sorted by `(from, input)`; edge `(s, u)` sits at `s * 2^m + u`.
    edges: Vec<TrellisEdge>,
    /// Per state: shortest-path step count to state 0, if reachable.
    tail_distance: Vec<Option<usize>>,
    /// Per state: first input word on that shortest path (for state 0, the
    /// smallest self-loop input, used for padding).
    tail_input: Vec<Option<usize>>,
}

impl LabeledTrellis {
    pub fn states(&self) -> usize {
        self.states
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn out_degree(&self) -> usize {
        1 << self.input_bits
    }

    pub fn alphabet(&self) -> &PskSet {
        &self.alphabet
    }

    pub fn labelling(&self) -> LabellingTag {
        self.labelling
    }

    pub fn edges(&self) -> &[TrellisEdge] {
        &self.edges
    }

    pub fn edges_from(&self, state: usize) -> &[TrellisEdge] {
        let deg = self.out_degree();
        &self.edges[state * deg..(state + 1) * deg]
    }

    pub fn edge(&self, state: usize, input: usize) -> &TrellisEdge {
        &self.edges[state * self.out_degree() + input]
    }

    /// Steps every terminating tail must span: the worst-case shortest path
    /// back to state 0.
    pub fn max_tail_steps(&self) -> usize {
        self.tail_distance.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Next tail input from `state` (toward 0, or holding at 0).
    pub fn tail_input(&self, state: usize) -> Option<usize> {
        self.tail_input[state]
    }

    fn from_parts(
        states: usize,
        input_bits: usize,
        alphabet: PskSet,
        labelling: LabellingTag,
        mut edges: Vec<TrellisEdge>,
    ) -> Result<Self> {
        if states == 0 || input_bits == 0 {
            return Err(invalid("trellis needs at least one state and one input bit"));
        }
        let deg = 1usize << input_bits;
        if edges.len() != states * deg {
            return Err(invalid(format!(
                "expected {} edges ({} states x {} inputs), got {}",
                states * deg,
                states,
                deg,
                edges.len()
            )));
        }
        edges.sort_by_key(|e| (e.from, e.input));
        for (i, e) in edges.iter().enumerate() {
            if e.from != i / deg || e.input != i % deg {
                return Err(invalid("each (state, input) pair must appear exactly once"));
            }
            if e.to >= states {
                return Err(invalid(format!("edge target {} out of range", e.to)));
            }
            if e.label >= alphabet.size() {
                return Err(invalid(format!("edge label {} outside the alphabet", e.label)));
            }
        }
        let (tail_distance, tail_input) = tail_tables(states, deg, &edges);
        Ok(LabeledTrellis {
            states,
            input_bits,
            alphabet,
            labelling,
            edges,
            tail_distance,
            tail_input,
        })
    }
}

/// Shortest-path-to-zero tables, deterministic (smallest input breaks ties).
fn tail_tables(
    states: usize,
    deg: usize,
    edges: &[TrellisEdge],
) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let mut dist: Vec<Option<usize>> = vec![None; states];
    let mut step: Vec<Option<usize>> = vec![None; states];
    dist[0] = Some(0);
    step[0] = (0..deg).find(|&u| edges[u].to == 0);
    // Relax repeatedly; the diameter is below the state count.
    for _ in 0..states {
        let mut changed = false;
        for s in 1..states {
            for u in 0..deg {
                let t = edges[s * deg + u].to;
                if let Some(d) = dist[t] {
                    let cand = d + 1;
                    if dist[s].map_or(true, |cur| cand < cur) {
                        dist[s] = Some(cand);
                        step[s] = Some(u);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    (dist, step)
}

/// Labels an encoder's trellis with alphabet indices.
///
/// The alphabet must have size `2^{m+1}`.  Ungerboeck labelling locates a
/// redundancy bit that is constant across each state's diverging output
/// words and maps it to index parity; the result is checked to diverge with
/// exactly one parity class per state.  Explicit maps are checked the same
/// way.
pub fn build_trellis(
    spec: &EncoderSpec,
    alphabet: &PskSet,
    labelling: &Labelling,
) -> Result<LabeledTrellis> {
    let m = spec.input_bits();
    let n = 1usize << (m + 1);
    if alphabet.size() != n {
        return Err(invalid(format!(
            "alphabet size {} does not match 2^(m+1) = {n}",
            alphabet.size()
        )));
    }
    let states = spec.states();
    let inputs = 1usize << m;
    for s in 0..states {
        let mut seen = vec![false; n];
        for u in 0..inputs {
            let w = spec.output(s, u);
            if seen[w] {
                return Err(invalid(format!(
                    "state {s} emits output word {w} twice; edges would not carry distinct labels"
                )));
            }
            seen[w] = true;
        }
    }

    let (map, tag): (Vec<usize>, LabellingTag) = match labelling {
        Labelling::NaturalBinary => ((0..n).collect(), LabellingTag::NaturalBinary),
        Labelling::Ungerboeck => {
            let parity_bit = find_redundancy_bit(spec).ok_or_else(|| {
                Error::InvalidLabelling(
                    "no output bit is constant across the edges of every state; \
                     the encoder does not expose a per-state redundancy bit"
                        .into(),
                )
            })?;
            let map = (0..n)
                .map(|w| {
                    let parity = (w >> parity_bit) & 1;
                    let rest = ((w >> (parity_bit + 1)) << parity_bit) | (w & ((1 << parity_bit) - 1));
                    2 * rest + parity
                })
                .collect();
            (map, LabellingTag::Ungerboeck { parity_bit })
        }
        Labelling::Explicit(map) => {
            if map.len() != n {
                return Err(Error::InvalidLabelling(format!(
                    "explicit map must cover all {n} output words, got {}",
                    map.len()
                )));
            }
            let mut seen = vec![false; n];
            for &l in map {
                if l >= n || seen[l] {
                    return Err(Error::InvalidLabelling(
                        "explicit map must be a permutation of the alphabet indices".into(),
                    ));
                }
                seen[l] = true;
            }
            (map.clone(), LabellingTag::Explicit)
        }
    };

    let mut edges = Vec::with_capacity(states * inputs);
    for s in 0..states {
        for u in 0..inputs {
            edges.push(TrellisEdge {
                from: s,
                to: spec.next(s, u),
                input: u,
                label: map[spec.output(s, u)],
            });
        }
    }

    if !matches!(tag, LabellingTag::NaturalBinary) {
        for s in 0..states {
            let parity = edges[s * inputs].label % 2;
            for e in &edges[s * inputs..(s + 1) * inputs] {
                if e.label % 2 != parity {
                    return Err(Error::InvalidLabelling(format!(
                        "state {s} diverges with mixed index parity; \
                         each state must use one parity class"
                    )));
                }
            }
        }
    }

    LabeledTrellis::from_parts(states, m, alphabet.clone(), tag, edges)
}

/// Finds the lowest output-bit position that is constant across each
/// state's diverging words (the redundancy bit).
fn find_redundancy_bit(spec: &EncoderSpec) -> Option<usize> {
    let inputs = 1usize << spec.input_bits();
    'bits: for b in 0..=spec.input_bits() {
        for s in 0..spec.states() {
            let first = (spec.output(s, 0) >> b) & 1;
            for u in 1..inputs {
                if (spec.output(s, u) >> b) & 1 != first {
                    continue 'bits;
                }
            }
        }
        return Some(b);
    }
    None
}

// ---------------------------------------------------------------------------
// Sum trellis
// ---------------------------------------------------------------------------

/// One transition of the sum trellis.
#[derive(Debug, Clone)]
pub struct SumEdge {
    pub from: usize,
    pub to: usize,
    pub input1: usize,
    pub input2: usize,
    pub label: SumPoint,
}

/// Product of the two users' trellises; edge labels are the sums of the
/// component labels.
#[derive(Debug, Clone)]
pub struct SumTrellis {
    states1: usize,
    states2: usize,
    input_bits1: usize,
    input_bits2: usize,
    /// Sorted by `(from, (input1 << m2) | input2)`.
    edges: Vec<SumEdge>,
    alphabet: SumAlphabet,
    warnings: Vec<String>,
    max_tail_steps: usize,
}

impl SumTrellis {
    pub fn states(&self) -> usize {
        self.states1 * self.states2
    }

    pub fn component_states(&self) -> (usize, usize) {
        (self.states1, self.states2)
    }

    pub fn input_bits(&self) -> (usize, usize) {
        (self.input_bits1, self.input_bits2)
    }

    pub fn out_degree(&self) -> usize {
        1 << (self.input_bits1 + self.input_bits2)
    }

    pub fn edges(&self) -> &[SumEdge] {
        &self.edges
    }

    pub fn edges_from(&self, state: usize) -> &[SumEdge] {
        let deg = self.out_degree();
        &self.edges[state * deg..(state + 1) * deg]
    }

    pub fn alphabet(&self) -> &SumAlphabet {
        &self.alphabet
    }

    /// Rotation-convention warnings raised at construction.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Termination steps the component encoders need (the larger of the
    /// two).
    pub fn max_tail_steps(&self) -> usize {
        self.max_tail_steps
    }

    pub fn state_pair(&self, state: usize) -> (usize, usize) {
        (state / self.states2, state % self.states2)
    }
}

/// Builds the sum trellis of `t1` and `t2`: product states, paired inputs,
/// summed labels annotated through the sum alphabet.
pub fn sum_trellis(t1: &LabeledTrellis, t2: &LabeledTrellis) -> Result<SumTrellis> {
    let mut warnings = Vec::new();
    let rot1 = t1.alphabet().rotation();
    if rot1.min(std::f64::consts::TAU - rot1) > POINT_TOLERANCE {
        warnings.push(format!(
            "user-1 alphabet is rotated by {rot1}; the sum geometry assumes it unrotated"
        ));
    }
    let want = canonical_rotation(t2.alphabet().size());
    if (t2.alphabet().rotation() - want).abs() > POINT_TOLERANCE {
        warnings.push(format!(
            "user-2 alphabet rotation {} is not the canonical {want}; \
             unique decodability and the distance guarantees may not hold",
            t2.alphabet().rotation()
        ));
    }
    let alphabet = sum_alphabet(t1.alphabet(), t2.alphabet())?;

    let (s1n, s2n) = (t1.states(), t2.states());
    let (m1, m2) = (t1.input_bits(), t2.input_bits());
    let mut edges = Vec::with_capacity(s1n * s2n * (1 << (m1 + m2)));
    for a in 0..s1n {
        for b in 0..s2n {
            for u1 in 0..(1 << m1) {
                let e1 = t1.edge(a, u1);
                for u2 in 0..(1 << m2) {
                    let e2 = t2.edge(b, u2);
                    edges.push(SumEdge {
                        from: a * s2n + b,
                        to: e1.to * s2n + e2.to,
                        input1: u1,
                        input2: u2,
                        label: *alphabet.point(e1.label, e2.label),
                    });
                }
            }
        }
    }
    Ok(SumTrellis {
        states1: s1n,
        states2: s2n,
        input_bits1: m1,
        input_bits2: m2,
        edges,
        alphabet,
        warnings,
        max_tail_steps: t1.max_tail_steps().max(t2.max_tail_steps()),
    })
}

// ---------------------------------------------------------------------------
// Guaranteed distance
// ---------------------------------------------------------------------------

/// The guaranteed minimum squared Euclidean distance of a sum trellis and
/// where it is attained.
#[derive(Debug, Clone, Serialize)]
pub struct GuaranteedDistance {
    pub value_squared: f64,
    /// Flat index of the attaining state.
    pub attaining_state: usize,
    /// Component states `(s1, s2)` of the attaining state.
    pub attaining_state_pair: (usize, usize),
    /// Indices into `edges()` of the closest diverging label pair.
    pub attaining_edge_pair: (usize, usize),
}

/// Minimum over states of the minimum pairwise distance among that state's
/// diverging labels, squared.  Duplicate labels collapse the value to 0.
pub fn guaranteed_min_squared_distance(st: &SumTrellis) -> GuaranteedDistance {
    let deg = st.out_degree();
    let mut best = f64::INFINITY;
    let mut witness = (0usize, (0usize, 1usize));
    for s in 0..st.states() {
        let base = s * deg;
        let edges = st.edges_from(s);
        for i in 0..deg {
            for j in (i + 1)..deg {
                let d = (edges[i].label.value - edges[j].label.value).norm();
                if d < best {
                    best = d;
                    witness = (s, (base + i, base + j));
                }
            }
        }
    }
    let value = if best <= POINT_TOLERANCE { 0.0 } else { best * best };
    GuaranteedDistance {
        value_squared: value,
        attaining_state: witness.0,
        attaining_state_pair: st.state_pair(witness.0),
        attaining_edge_pair: witness.1,
    }
}

/// One entry of a labelling comparison.
#[derive(Debug, Clone, Serialize)]
pub struct LabellingRank {
    pub name: String,
    pub value_squared: f64,
}

fn labelling_name(l: &Labelling) -> &'static str {
    match l {
        Labelling::Ungerboeck => "ungerboeck",
        Labelling::NaturalBinary => "natural_binary",
        Labelling::Explicit(_) => "explicit",
    }
}

/// Builds the sum trellis for each candidate labelling pair and ranks them
/// by guaranteed squared distance (best first).  The Ungerboeck pair must
/// be among the candidates and must rank first (ties allowed).
pub fn compare_labellings(
    n1: usize,
    n2: usize,
    spec1: &EncoderSpec,
    spec2: &EncoderSpec,
    candidates: &[(Labelling, Labelling)],
) -> Result<Vec<LabellingRank>> {
    if !candidates
        .iter()
        .any(|(a, b)| matches!(a, Labelling::Ungerboeck) && matches!(b, Labelling::Ungerboeck))
    {
        return Err(invalid("candidates must include the Ungerboeck pair"));
    }
    let s1 = crate::constellation::make_psk(n1, 0.0)?;
    let s2 = crate::constellation::make_psk(n2, canonical_rotation(n2))?;
    let mut ranking = Vec::with_capacity(candidates.len());
    for (l1, l2) in candidates {
        let t1 = build_trellis(spec1, &s1, l1)?;
        let t2 = build_trellis(spec2, &s2, l2)?;
        let st = sum_trellis(&t1, &t2)?;
        ranking.push(LabellingRank {
            name: format!("{}+{}", labelling_name(l1), labelling_name(l2)),
            value_squared: guaranteed_min_squared_distance(&st).value_squared,
        });
    }
    ranking.sort_by(|a, b| b.value_squared.partial_cmp(&a.value_squared).unwrap());
    let ung = ranking
        .iter()
        .find(|r| r.name == "ungerboeck+ungerboeck")
        .expect("presence checked above");
    if ung.value_squared + POINT_TOLERANCE < ranking[0].value_squared {
        return Err(violation(format!(
            "Ungerboeck pair ranks below {}: {} < {}",
            ranking[0].name, ung.value_squared, ranking[0].value_squared
        )));
    }
    Ok(ranking)
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

pub const TRELLIS_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct AlphabetRef {
    size: usize,
    rotation: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrellisFile {
    schema_version: u32,
    states: usize,
    input_bits: usize,
    labelling: LabellingTag,
    alphabet: AlphabetRef,
    edges: Vec<TrellisEdge>,
}

impl LabeledTrellis {
    /// Serializes to the versioned JSON trellis schema.
    pub fn to_json_string(&self) -> String {
        let file = TrellisFile {
            schema_version: TRELLIS_SCHEMA_VERSION,
            states: self.states,
            input_bits: self.input_bits,
            labelling: self.labelling,
            alphabet: AlphabetRef {
                size: self.alphabet.size(),
                rotation: self.alphabet.rotation(),
            },
            edges: self.edges.clone(),
        };
        serde_json::to_string_pretty(&file).expect("trellis serialization cannot fail")
    }

    /// Loads and validates a trellis from its JSON schema.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: TrellisFile =
            serde_json::from_str(text).map_err(|e| Error::Schema(format!("trellis JSON: {e}")))?;
        if file.schema_version != TRELLIS_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schema_version {} (expected {TRELLIS_SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        if file.alphabet.size != 1 << (file.input_bits + 1) {
            return Err(Error::Schema(format!(
                "alphabet size {} does not match 2^(m+1) for m = {}",
                file.alphabet.size, file.input_bits
            )));
        }
        let alphabet = crate::constellation::make_psk(file.alphabet.size, file.alphabet.rotation)?;
        LabeledTrellis::from_parts(
            file.states,
            file.input_bits,
            alphabet,
            file.labelling,
            file.edges,
        )
    }
}
