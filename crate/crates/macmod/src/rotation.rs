//! Rotation-angle selection between the two users' alphabets.
//!
//! The selection objective sums, over every pair of joint symbols, the log
//! of a Gaussian-kernel proximity score of that pair to all others:
//!
//! ```text
//! O(theta) = sum_{k1,k2} log2 [ sum_{i1,i2}
//!            exp( -| x1(k1)-x1(i1) + e^{i*theta} (x2(k2)-x2(i2)) |^2 / (4*sigma^2) ) ]
//! ```
//!
//! Small values mean well-separated joint signal points, so the preferred
//! rotations are the minimizers of `O`.  For `N1`/`N2`-PSK the minimizer
//! family contains `pi/N2` (and its `2*pi/N2` translates, a symmetry of the
//! difference sets).  This module evaluates the objective, locates all grid
//! minimizers and refines them, estimates the achievable sum rate of the
//! resulting sum alphabet, and picks alphabet sizes for a requested rate
//! pair.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::constellation::{canonical_rotation, make_psk, sum_alphabet, Point, PskSet, SumAlphabet};
use crate::error::{invalid, Result};
use crate::rng::substream;

/// Search configuration for [`rotation_search`].
#[derive(Debug, Clone)]
pub struct MetricConfig {
    /// Total complex noise variance.
    pub sigma2: f64,
    /// Number of grid points over the open search interval (>= 64).
    pub grid_points: usize,
    /// Open search interval, a sub-range of `(0, 2*pi)`.
    pub theta_min: f64,
    pub theta_max: f64,
}

impl MetricConfig {
    pub fn new(sigma2: f64) -> Self {
        MetricConfig {
            sigma2,
            grid_points: 1024,
            theta_min: 0.0,
            theta_max: TAU,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma2 > 0.0) {
            return Err(invalid(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        if self.grid_points < 64 {
            return Err(invalid(format!(
                "need at least 64 grid points, got {}",
                self.grid_points
            )));
        }
        if !(0.0 <= self.theta_min && self.theta_min < self.theta_max && self.theta_max <= TAU) {
            return Err(invalid("search interval must satisfy 0 <= min < max <= 2*pi"));
        }
        Ok(())
    }
}

/// Outcome of a rotation search.
#[derive(Debug, Clone, Serialize)]
pub struct RotationReport {
    /// `(theta, O(theta))` for every grid point, in grid order.
    pub objective_values: Vec<(f64, f64)>,
    /// Refined minimizing angles, ascending.
    pub minimizers: Vec<f64>,
    /// The structurally predicted angle `pi/N2`.
    pub predicted: f64,
}

/// Evaluates the rotation-selection objective at `theta`.
///
/// `s2_base` is used unrotated; the candidate rotation enters only through
/// `e^{i*theta}` on the second user's differences.
pub fn metric_objective(s1: &PskSet, s2_base: &PskSet, theta: f64, sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(invalid(format!("sigma2 must be positive, got {sigma2}")));
    }
    let rot = Point::from_polar(1.0, theta);
    let inv = 1.0 / (4.0 * sigma2);
    let mut total = 0.0;
    for &xk1 in s1.points() {
        for &xk2 in s2_base.points() {
            let mut inner = 0.0;
            for &xi1 in s1.points() {
                for &xi2 in s2_base.points() {
                    let diff = (xk1 - xi1) + rot * (xk2 - xi2);
                    inner += (-diff.norm_sqr() * inv).exp();
                }
            }
            total += inner.log2();
        }
    }
    Ok(total)
}

/// Golden-section minimization of `f` on `[a, b]` to within `tol` in the
/// argument.  `f` is assumed unimodal on the bracket.
fn golden_section(mut a: f64, mut b: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_PHI;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_PHI;
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Grid-scans the objective over the open interval, collects every grid
/// point within `1e-9` of the global grid minimum, and refines each by
/// golden-section search to `1e-6` radians.
pub fn rotation_search(n1: usize, n2: usize, cfg: &MetricConfig) -> Result<RotationReport> {
    cfg.validate()?;
    let s1 = make_psk(n1, 0.0)?;
    let s2 = make_psk(n2, 0.0)?;
    let g = cfg.grid_points;
    let span = cfg.theta_max - cfg.theta_min;
    let step = span / g as f64;

    // Midpoint grid: excludes both endpoints of the open interval.
    let mut values = Vec::with_capacity(g);
    for j in 0..g {
        let theta = cfg.theta_min + (j as f64 + 0.5) * step;
        values.push((theta, metric_objective(&s1, &s2, theta, cfg.sigma2)?));
    }
    let grid_min = values
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::INFINITY, f64::min);

    let mut minimizers = Vec::new();
    for &(theta, v) in &values {
        if v <= grid_min + 1e-9 {
            let lo = (theta - step).max(cfg.theta_min + 1e-12);
            let hi = (theta + step).min(cfg.theta_max - 1e-12);
            let refined = golden_section(lo, hi, 1e-6, |t| {
                metric_objective(&s1, &s2, t, cfg.sigma2).expect("validated sigma2")
            });
            minimizers.push(refined);
        }
    }
    minimizers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    minimizers.dedup_by(|a, b| (*a - *b).abs() < 1e-4);

    Ok(RotationReport {
        objective_values: values,
        minimizers,
        predicted: canonical_rotation(n2),
    })
}

// ---------------------------------------------------------------------------
// Sum-rate estimation
// ---------------------------------------------------------------------------

/// Monte Carlo mutual-information estimate with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SumRateEstimate {
    /// Estimated `I(x1+x2; y)` in bits per channel use.
    pub bits: f64,
    pub std_error: f64,
    pub samples: usize,
}

const SAMPLE_CHUNK: usize = 8192;

/// Estimates the sum rate `I(x1, x2; y)` for uniform transmit pairs over the
/// given sum alphabet in complex AWGN of total variance `sigma2`.
///
/// Sampling is split into fixed-size chunks, each on its own derived
/// substream, so the estimate does not depend on how chunks are scheduled.
pub fn estimate_sum_rate(
    sa: &SumAlphabet,
    sigma2: f64,
    samples: usize,
    seed: u64,
) -> Result<SumRateEstimate> {
    if !(sigma2 > 0.0) {
        return Err(invalid(format!("sigma2 must be positive, got {sigma2}")));
    }
    if samples < 10_000 {
        return Err(invalid(format!("need at least 1e4 samples, got {samples}")));
    }
    let points: Vec<Point> = sa.points().iter().map(|p| p.value).collect();
    let m = points.len() as f64;
    let log2_m = m.log2();
    let noise_scale = (sigma2 / 2.0).sqrt();
    let inv_sigma2 = 1.0 / sigma2;

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut done = 0usize;
    let mut chunk_index = 0u64;
    while done < samples {
        let count = SAMPLE_CHUNK.min(samples - done);
        let mut rng = substream(seed, 1, chunk_index);
        for _ in 0..count {
            let j = rng.random_range(0..points.len());
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let y = points[j] + Point::new(re * noise_scale, im * noise_scale);

            // log2 of sum_l exp(-(d_l - d_j)/sigma2), evaluated stably
            // around the smallest squared distance.
            let dj = (y - points[j]).norm_sqr();
            let mut dmin = f64::INFINITY;
            for &p in &points {
                let d = (y - p).norm_sqr();
                if d < dmin {
                    dmin = d;
                }
            }
            let mut acc = 0.0;
            for &p in &points {
                acc += (-((y - p).norm_sqr() - dmin) * inv_sigma2).exp();
            }
            let info = log2_m - acc.log2() - (dj - dmin) * inv_sigma2 / std::f64::consts::LN_2;
            sum += info;
            sum_sq += info * info;
        }
        done += count;
        chunk_index += 1;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(SumRateEstimate {
        bits: mean,
        std_error: (var / n).sqrt(),
        samples,
    })
}

// ---------------------------------------------------------------------------
// Cardinality planning
// ---------------------------------------------------------------------------

/// Outcome of [`choose_cardinalities`].
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CardinalityPlan {
    Chosen {
        n1: usize,
        n2: usize,
        /// `| log2(N2)/log2(N1) - r2/r1 |` for the chosen pair.
        ratio_error: f64,
        sum_rate: SumRateEstimate,
    },
    Infeasible {
        reason: String,
    },
}

/// Picks the smallest power-of-two pair `N1 <= N2 <= nmax` whose size ratio
/// `log2(N2)/log2(N1)` best matches `r2/r1`, subject to feasibility:
/// `log2(Ni) - 1 >= ri` per user (one redundancy bit each) and
/// `r1 + r2 <= sum-rate estimate - 1`.
pub fn choose_cardinalities(
    r1: f64,
    r2: f64,
    sigma2: f64,
    nmax: usize,
    samples: usize,
    seed: u64,
) -> Result<CardinalityPlan> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(invalid("rates must be positive"));
    }
    if r1 > r2 {
        return Err(invalid(format!(
            "require r1 <= r2, got ({r1}, {r2}); swap the users"
        )));
    }
    if nmax < 4 || nmax > 64 || !nmax.is_power_of_two() {
        return Err(invalid(format!("nmax must be a power of two in 4..=64, got {nmax}")));
    }

    let target = r2 / r1;
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    let mut n1 = 4;
    while n1 <= nmax {
        let mut n2 = n1;
        while n2 <= nmax {
            let ratio = (n2 as f64).log2() / (n1 as f64).log2();
            pairs.push((n1, n2, (ratio - target).abs()));
            n2 *= 2;
        }
        n1 *= 2;
    }
    // Best ratio first; ties by the smaller pair.  Feasibility is evaluated
    // lazily in this order, so the first feasible pair is the answer.
    pairs.sort_by(|a, b| {
        a.2.partial_cmp(&b.2)
            .unwrap()
            .then(a.0.cmp(&b.0))
            .then(a.1.cmp(&b.1))
    });

    for &(n1, n2, ratio_error) in &pairs {
        if (n1 as f64).log2() - 1.0 < r1 - 1e-12 || (n2 as f64).log2() - 1.0 < r2 - 1e-12 {
            continue;
        }
        let s1 = make_psk(n1, 0.0)?;
        let s2 = make_psk(n2, canonical_rotation(n2))?;
        let sa = sum_alphabet(&s1, &s2)?;
        let stream = ((n1 as u64) << 32) | n2 as u64;
        let est = estimate_sum_rate(&sa, sigma2, samples, seed.wrapping_add(stream))?;
        if r1 + r2 <= est.bits - 1.0 {
            return Ok(CardinalityPlan::Chosen {
                n1,
                n2,
                ratio_error,
                sum_rate: est,
            });
        }
    }
    Ok(CardinalityPlan::Infeasible {
        reason: format!(
            "no power-of-two pair up to {nmax} supports the rate pair ({r1}, {r2}) at sigma2 = {sigma2}"
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn objective_is_periodic() {
        let s1 = make_psk(4, 0.0).unwrap();
        let s2 = make_psk(8, 0.0).unwrap();
        for theta in [0.3, 1.1, 2.9] {
            let a = metric_objective(&s1, &s2, theta, 0.1).unwrap();
            let b = metric_objective(&s1, &s2, theta + TAU, 0.1).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn objective_quarter_turn_symmetry_for_qpsk_pair() {
        let s = make_psk(4, 0.0).unwrap();
        for theta in [0.17, 0.6, 1.3] {
            let a = metric_objective(&s, &s, theta, 0.1).unwrap();
            let b = metric_objective(&s, &s, theta + PI / 2.0, 0.1).unwrap();
            assert!((a - b).abs() < 1e-9, "theta={theta}: {a} vs {b}");
        }
    }

    #[test]
    fn objective_translation_symmetry() {
        // O(theta + 2*pi/N2) = O(theta) for symmetric PSK pairs.
        let s1 = make_psk(4, 0.0).unwrap();
        let s2 = make_psk(8, 0.0).unwrap();
        for j in 0..8 {
            let theta = 0.05 + j as f64 * (TAU / 8.5);
            let a = metric_objective(&s1, &s2, theta, 0.1).unwrap();
            let b = metric_objective(&s1, &s2, theta + TAU / 8.0, 0.1).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn objective_rejects_bad_sigma() {
        let s = make_psk(4, 0.0).unwrap();
        assert!(metric_objective(&s, &s, 0.1, 0.0).is_err());
        assert!(metric_objective(&s, &s, 0.1, -1.0).is_err());
    }

    #[test]
    fn objective_is_symmetric_about_canonical_angle() {
        // The difference sets make O reflection-symmetric about pi/N2, which
        // is what singles that angle out as a critical point.
        let s1 = make_psk(4, 0.0).unwrap();
        let s2 = make_psk(8, 0.0).unwrap();
        for x in [0.01, 0.05, 0.11, 0.19] {
            let a = metric_objective(&s1, &s2, PI / 8.0 + x, 0.1).unwrap();
            let b = metric_objective(&s1, &s2, PI / 8.0 - x, 0.1).unwrap();
            assert!((a - b).abs() < 1e-9, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn search_returns_valid_grid_minimizers() {
        let report = rotation_search(4, 8, &MetricConfig::new(0.1)).unwrap();
        assert!(!report.minimizers.is_empty());
        assert!((report.predicted - PI / 8.0).abs() < 1e-15);

        let grid_min = report
            .objective_values
            .iter()
            .map(|&(_, v)| v)
            .fold(f64::INFINITY, f64::min);
        let s1 = make_psk(4, 0.0).unwrap();
        let s2 = make_psk(8, 0.0).unwrap();
        for &t in &report.minimizers {
            let v = metric_objective(&s1, &s2, t, 0.1).unwrap();
            assert!(v <= grid_min + 1e-9, "refined minimizer {t} above grid minimum");
        }
    }

    #[test]
    fn minimizer_family_is_reflection_closed() {
        // Minimizers come in pairs mirrored about the canonical angle
        // (modulo the 2*pi/N2 translation symmetry).
        let report = rotation_search(4, 4, &MetricConfig::new(0.1)).unwrap();
        let period = TAU / 4.0;
        for &t in &report.minimizers {
            let mirrored = (2.0 * (PI / 4.0) - t).rem_euclid(period);
            assert!(
                report
                    .minimizers
                    .iter()
                    .any(|&u| {
                        let d = (u.rem_euclid(period) - mirrored).abs();
                        d < 1e-4 || (period - d) < 1e-4
                    }),
                "no mirror of {t} in {:?}",
                report.minimizers
            );
        }
    }

    #[test]
    fn minimizer_family_is_translation_closed() {
        let report = rotation_search(4, 8, &MetricConfig::new(0.1)).unwrap();
        let period = TAU / 8.0;
        for &t in &report.minimizers {
            let shifted = (t + period).rem_euclid(TAU);
            assert!(
                report
                    .minimizers
                    .iter()
                    .any(|&u| (u - shifted).abs() < 1e-4),
                "no translate of {t} in {:?}",
                report.minimizers
            );
        }
    }

    fn canonical_sum_alphabet(n1: usize, n2: usize) -> SumAlphabet {
        let s1 = make_psk(n1, 0.0).unwrap();
        let s2 = make_psk(n2, canonical_rotation(n2)).unwrap();
        sum_alphabet(&s1, &s2).unwrap()
    }

    #[test]
    fn sum_rate_limits() {
        let sa = canonical_sum_alphabet(4, 8);
        let zero_snr = estimate_sum_rate(&sa, 1e6, 20_000, 7).unwrap();
        assert!(zero_snr.bits.abs() < 0.01, "got {}", zero_snr.bits);

        let high_snr = estimate_sum_rate(&sa, 1e-6, 20_000, 7).unwrap();
        assert!((high_snr.bits - 5.0).abs() < 0.05, "got {}", high_snr.bits);
    }

    #[test]
    fn sum_rate_input_validation() {
        let sa = canonical_sum_alphabet(4, 8);
        assert!(estimate_sum_rate(&sa, 0.0, 20_000, 1).is_err());
        assert!(estimate_sum_rate(&sa, 0.1, 100, 1).is_err());
    }

    #[test]
    fn rotation_improves_sum_rate() {
        let s1 = make_psk(4, 0.0).unwrap();
        let rotated = sum_alphabet(&s1, &make_psk(8, PI / 8.0).unwrap()).unwrap();
        let aligned = sum_alphabet(&s1, &make_psk(8, 0.0).unwrap()).unwrap();
        let a = estimate_sum_rate(&rotated, 0.05, 200_000, 11).unwrap();
        let b = estimate_sum_rate(&aligned, 0.05, 200_000, 11).unwrap();
        let margin = 3.0 * (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!(
            a.bits > b.bits + margin,
            "rotated {} vs aligned {} (margin {margin})",
            a.bits,
            b.bits
        );
    }

    #[test]
    fn sum_rate_monotone_in_noise() {
        let sa = canonical_sum_alphabet(4, 8);
        let mut last: Option<SumRateEstimate> = None;
        for sigma2 in [0.01, 0.1, 1.0] {
            let est = estimate_sum_rate(&sa, sigma2, 100_000, 5).unwrap();
            assert!(est.bits <= (32f64).log2() + est.std_error);
            if let Some(prev) = last {
                let margin = 3.0 * (est.std_error.powi(2) + prev.std_error.powi(2)).sqrt();
                assert!(est.bits <= prev.bits + margin);
            }
            last = Some(est);
        }
    }

    #[test]
    fn sum_rate_is_deterministic() {
        let sa = canonical_sum_alphabet(4, 8);
        let a = estimate_sum_rate(&sa, 0.2, 50_000, 42).unwrap();
        let b = estimate_sum_rate(&sa, 0.2, 50_000, 42).unwrap();
        assert_eq!(a.bits.to_bits(), b.bits.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn planner_examples() {
        match choose_cardinalities(1.0, 2.0, 0.01, 32, 20_000, 3).unwrap() {
            CardinalityPlan::Chosen { n1, n2, ratio_error, .. } => {
                assert_eq!((n1, n2), (4, 16));
                assert!(ratio_error < 1e-12);
            }
            other => panic!("expected a chosen pair, got {other:?}"),
        }

        match choose_cardinalities(1.0, 1.0, 0.01, 32, 20_000, 3).unwrap() {
            CardinalityPlan::Chosen { n1, n2, .. } => assert_eq!(n1, n2),
            other => panic!("expected a chosen pair, got {other:?}"),
        }

        match choose_cardinalities(3.0, 3.0, 10.0, 32, 20_000, 3).unwrap() {
            CardinalityPlan::Infeasible { .. } => {}
            other => panic!("expected infeasible, got {other:?}"),
        }

        assert!(choose_cardinalities(2.0, 1.0, 0.01, 32, 20_000, 3).is_err());
    }
}
