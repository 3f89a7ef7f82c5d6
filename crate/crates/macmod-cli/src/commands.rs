//! Subcommand implementations.  Each command is an argument struct (shared
//! between the command line and campaign files) plus a runner; campaign
//! tasks call the same runners, so both paths produce identical outputs.

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use macmod::constellation::{canonical_rotation, make_psk, radial_gaps};
use macmod::partition::{
    certify_theorem_1, verify_lemmas, verify_proposition_3, verify_proposition_4, CertVerdict,
};
use macmod::rotation::{choose_cardinalities, rotation_search, CardinalityPlan, MetricConfig};
use macmod::simulator::{run_ber_on, ChannelConfig, SimReport};
use macmod::trellis::{build_trellis, sum_trellis, EncoderSpec, LabeledTrellis, Labelling};
use macmod::{check_unique_decodability, sum_alphabet, Error};

use crate::error::CliError;
use crate::output::{render_csv, to_versioned_json, write_atomic};

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

// ---------------------------------------------------------------------------
// sum-alphabet
// ---------------------------------------------------------------------------

/// Export the annotated sum alphabet of an (N1, N2) PSK pair.
#[derive(Args, Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumAlphabetArgs {
    #[arg(long)]
    pub n1: usize,
    #[arg(long)]
    pub n2: usize,
    /// Rotation of the second set in radians (default: pi/N2).
    #[arg(long)]
    #[serde(default)]
    pub theta: Option<f64>,
    /// Output JSON path.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional CSV of circle radii (m,radius).
    #[arg(long)]
    #[serde(default)]
    pub radii_csv: Option<PathBuf>,
    /// Optional CSV of consecutive radius gaps (q,gap).
    #[arg(long)]
    #[serde(default)]
    pub gaps_csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct SumAlphabetReport {
    n1: usize,
    n2: usize,
    theta: f64,
    uniquely_decodable: bool,
    collision_witness: Option<((usize, usize), (usize, usize))>,
    radii: Vec<f64>,
    points: Vec<macmod::constellation::SumPointRecord>,
}

pub fn cmd_sum_alphabet(args: &SumAlphabetArgs) -> Result<(), CliError> {
    let theta = args.theta.unwrap_or_else(|| canonical_rotation(args.n2));
    let s1 = make_psk(args.n1, 0.0)?;
    let s2 = make_psk(args.n2, theta)?;
    let sa = sum_alphabet(&s1, &s2)?;
    let ud = check_unique_decodability(&s1, &s2);
    let report = SumAlphabetReport {
        n1: args.n1,
        n2: args.n2,
        theta,
        uniquely_decodable: ud.uniquely_decodable,
        collision_witness: ud.witness,
        radii: sa.radii().to_vec(),
        points: sa.point_records(),
    };
    write_atomic(&args.out, &to_versioned_json(report))?;

    if let Some(path) = &args.radii_csv {
        let rows: Vec<Vec<String>> = sa
            .radii()
            .iter()
            .enumerate()
            .map(|(m, &r)| vec![m.to_string(), fmt_f64(r)])
            .collect();
        write_atomic(path, &render_csv(&["m", "radius"], &rows))?;
    }
    if let Some(path) = &args.gaps_csv {
        let gaps = radial_gaps(args.n2)?;
        let rows: Vec<Vec<String>> = gaps
            .iter()
            .enumerate()
            .map(|(q, &g)| vec![q.to_string(), fmt_f64(g)])
            .collect();
        write_atomic(path, &render_csv(&["q", "gap"], &rows))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// rotation-search
// ---------------------------------------------------------------------------

/// Grid search for the rotation-selection objective's minimizing angles.
#[derive(Args, Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationSearchArgs {
    #[arg(long)]
    pub n1: usize,
    #[arg(long)]
    pub n2: usize,
    #[arg(long)]
    pub sigma2: f64,
    /// Grid points over (0, 2*pi).
    #[arg(long, default_value_t = 1024)]
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// Output JSON path (report with minimizers and objective curve).
    #[arg(long)]
    pub out: PathBuf,
    /// Optional CSV of (theta, objective) pairs.
    #[arg(long)]
    #[serde(default)]
    pub csv: Option<PathBuf>,
}

fn default_grid() -> usize {
    1024
}

#[derive(Serialize)]
struct RotationSearchReport {
    n1: usize,
    n2: usize,
    sigma2: f64,
    grid_points: usize,
    predicted: f64,
    minimizers: Vec<f64>,
    objective_values: Vec<(f64, f64)>,
}

pub fn cmd_rotation_search(args: &RotationSearchArgs) -> Result<(), CliError> {
    let cfg = MetricConfig {
        sigma2: args.sigma2,
        grid_points: args.grid,
        ..MetricConfig::new(args.sigma2)
    };
    let report = rotation_search(args.n1, args.n2, &cfg)?;
    if let Some(path) = &args.csv {
        let rows: Vec<Vec<String>> = report
            .objective_values
            .iter()
            .map(|&(t, v)| vec![fmt_f64(t), fmt_f64(v)])
            .collect();
        write_atomic(path, &render_csv(&["theta", "objective"], &rows))?;
    }
    let payload = RotationSearchReport {
        n1: args.n1,
        n2: args.n2,
        sigma2: args.sigma2,
        grid_points: args.grid,
        predicted: report.predicted,
        minimizers: report.minimizers,
        objective_values: report.objective_values,
    };
    write_atomic(&args.out, &to_versioned_json(payload))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

/// Run the distance lemma checks and the exhaustive partition-optimality
/// certification for one (N1, N2) pair.
#[derive(Args, Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyArgs {
    #[arg(long)]
    pub n1: usize,
    #[arg(long)]
    pub n2: usize,
    /// Partition-pair budget for the exhaustive scan.
    #[arg(long, default_value_t = 10_000_000)]
    #[serde(default = "default_limit")]
    pub limit: u64,
    #[arg(long)]
    pub out: PathBuf,
}

fn default_limit() -> u64 {
    10_000_000
}

fn section<T: Serialize>(r: Result<T, Error>, violations: &mut Vec<String>) -> serde_json::Value {
    match r {
        Ok(v) => serde_json::to_value(v).expect("section serialization"),
        Err(e) => {
            violations.push(e.to_string());
            serde_json::json!({ "error": e.to_string() })
        }
    }
}

pub fn cmd_certify(args: &CertifyArgs) -> Result<(), CliError> {
    // Parameter problems and budget overruns abort before any report.
    let certification = match certify_theorem_1(args.n1, args.n2, args.limit) {
        Ok(c) => c,
        Err(e @ Error::BudgetExceeded(_)) => return Err(CliError::budget(e.to_string())),
        Err(e) => return Err(e.into()),
    };

    let mut violations = Vec::new();
    let lemmas = section(verify_lemmas(args.n1, args.n2), &mut violations);
    let proposition_3 = if args.n2 >= 8 {
        section(verify_proposition_3(args.n2), &mut violations)
    } else {
        serde_json::json!({ "skipped": "needs N2 >= 8" })
    };
    let proposition_4 = if args.n1 >= 8 {
        section(verify_proposition_4(args.n1, args.n2), &mut violations)
    } else {
        serde_json::json!({ "skipped": "the innermost-circle argument covers N1 = 4" })
    };
    let radial = if args.n2 >= 8 {
        section(macmod::verify_radial_gaps(args.n2), &mut violations)
    } else {
        serde_json::json!({ "skipped": "needs N2 >= 8" })
    };
    if certification.verdict == CertVerdict::CounterexampleFound {
        violations.push("a partition pair beats the Ungerboeck guaranteed distance".into());
    }

    let confirmed = violations.is_empty();
    let payload = serde_json::json!({
        "n1": args.n1,
        "n2": args.n2,
        "confirmed": confirmed,
        "violations": violations,
        "lemmas": lemmas,
        "radial_gaps": radial,
        "proposition_3": proposition_3,
        "proposition_4": proposition_4,
        "certification": serde_json::to_value(&certification).expect("report"),
    });
    write_atomic(&args.out, &to_versioned_json(payload))?;
    if confirmed {
        Ok(())
    } else {
        Err(CliError::property(format!(
            "certification failed at ({}, {}); see {}",
            args.n1,
            args.n2,
            args.out.display()
        )))
    }
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

/// Choose PSK cardinalities for a target rate pair.
#[derive(Args, Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanArgs {
    #[arg(long)]
    pub r1: f64,
    #[arg(long)]
    pub r2: f64,
    #[arg(long)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 32)]
    #[serde(default = "default_nmax")]
    pub nmax: usize,
    /// Monte Carlo samples per sum-rate estimate.
    #[arg(long, default_value_t = 100_000)]
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[arg(long, required = true)]
    pub seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_nmax() -> usize {
    32
}

fn default_samples() -> usize {
    100_000
}

#[derive(Serialize)]
struct PlanReport {
    r1: f64,
    r2: f64,
    sigma2: f64,
    nmax: usize,
    samples: usize,
    seed: u64,
    #[serde(flatten)]
    plan: CardinalityPlan,
}

pub fn cmd_plan(args: &PlanArgs) -> Result<(), CliError> {
    let seed = args
        .seed
        .ok_or_else(|| CliError::usage("plan requires an explicit seed"))?;
    let plan = choose_cardinalities(args.r1, args.r2, args.sigma2, args.nmax, args.samples, seed)?;
    let text = to_versioned_json(PlanReport {
        r1: args.r1,
        r2: args.r2,
        sigma2: args.sigma2,
        nmax: args.nmax,
        samples: args.samples,
        seed,
        plan,
    });
    match &args.out {
        Some(path) => write_atomic(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// make-trellis
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelKind {
    Ungerboeck,
    NaturalBinary,
}

/// Build a standard parity-redundancy encoder trellis and write its JSON.
#[derive(Args, Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MakeTrellisArgs {
    /// Alphabet size (power of two >= 4); input bits = log2(n) - 1.
    #[arg(long)]
    pub n: usize,
    /// Encoder state count (power of two; 1 gives an uncoded trellis).
    #[arg(long)]
    pub states: usize,
    #[arg(long, value_enum, default_value_t = LabelKind::Ungerboeck)]
    #[serde(default = "default_label")]
    pub labelling: LabelKind,
    /// Alphabet rotation in radians (default 0).
    #[arg(long)]
    #[serde(default)]
    pub theta: Option<f64>,
    /// Use the canonical rotation pi/N (overrides --theta).
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    pub canonical: bool,
    #[arg(long)]
    pub out: PathBuf,
}

fn default_label() -> LabelKind {
    LabelKind::Ungerboeck
}

pub fn cmd_make_trellis(args: &MakeTrellisArgs) -> Result<(), CliError> {
    if args.n < 4 || !args.n.is_power_of_two() {
        return Err(CliError::usage(format!(
            "alphabet size must be a power of two >= 4, got {}",
            args.n
        )));
    }
    if args.states == 0 || !args.states.is_power_of_two() {
        return Err(CliError::usage(format!(
            "state count must be a power of two, got {}",
            args.states
        )));
    }
    let m = args.n.trailing_zeros() as usize - 1;
    let theta = if args.canonical {
        canonical_rotation(args.n)
    } else {
        args.theta.unwrap_or(0.0)
    };
    let spec = if args.states == 1 {
        EncoderSpec::uncoded(m)?
    } else {
        EncoderSpec::tcm_parity(m, args.states.trailing_zeros() as usize)?
    };
    let labelling = match args.labelling {
        LabelKind::Ungerboeck => Labelling::Ungerboeck,
        LabelKind::NaturalBinary => Labelling::NaturalBinary,
    };
    let trellis = build_trellis(&spec, &make_psk(args.n, theta)?, &labelling)?;
    write_atomic(&args.out, &trellis.to_json_string())?;
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

/// Monte Carlo BER/SER simulation over a list of SNR points.
#[derive(Args, Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateArgs {
    /// User-1 trellis JSON file.
    #[arg(long)]
    pub trellis1: PathBuf,
    /// User-2 trellis JSON file.
    #[arg(long)]
    pub trellis2: PathBuf,
    /// SNR points in dB, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub snr: Vec<f64>,
    #[arg(long)]
    pub blocks: usize,
    /// Symbols per block (termination steps included).
    #[arg(long)]
    pub block_len: usize,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[arg(long, required = true)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_json: PathBuf,
    #[arg(long)]
    pub out_csv: PathBuf,
    /// Escalate rotation-convention warnings to an error (exit 4).
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    pub strict: bool,
}

fn default_rho() -> f64 {
    1.0
}

#[derive(Serialize)]
struct SimulateReport {
    trellis1: String,
    trellis2: String,
    rho: f64,
    block_len: usize,
    blocks: usize,
    seed: u64,
    warnings: Vec<String>,
    reports: Vec<SimReport>,
}

fn load_trellis(path: &PathBuf) -> Result<LabeledTrellis, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(LabeledTrellis::from_json_str(&text)?)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let seed = args
        .seed
        .ok_or_else(|| CliError::usage("simulate requires an explicit seed"))?;
    let t1 = load_trellis(&args.trellis1)?;
    let t2 = load_trellis(&args.trellis2)?;
    let st = sum_trellis(&t1, &t2)?;
    if args.strict && !st.warnings().is_empty() {
        return Err(CliError::warning(format!(
            "strict mode: {}",
            st.warnings().join("; ")
        )));
    }
    let cfg = ChannelConfig {
        rho: args.rho,
        sigma2: 1.0,
        block_len: args.block_len,
        blocks: args.blocks,
        seed,
    };
    let reports = run_ber_on(&st, &t1, &t2, &cfg, &args.snr)?;

    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.snr_db),
                fmt_f64(r.ber1.rate),
                fmt_f64(r.ber2.rate),
                fmt_f64(r.ser.rate),
                fmt_f64(r.fer.rate),
                fmt_f64(r.ber_pooled.wilson_low),
                fmt_f64(r.ber_pooled.wilson_high),
            ]
        })
        .collect();
    write_atomic(
        &args.out_csv,
        &render_csv(
            &["snr_db", "ber1", "ber2", "ser", "fer", "ci_low", "ci_high"],
            &rows,
        ),
    )?;
    let payload = SimulateReport {
        trellis1: args.trellis1.display().to_string(),
        trellis2: args.trellis2.display().to_string(),
        rho: args.rho,
        block_len: args.block_len,
        blocks: args.blocks,
        seed,
        warnings: st.warnings().to_vec(),
        reports,
    };
    write_atomic(&args.out_json, &to_versioned_json(payload))?;
    Ok(())
}
