//! PSK alphabets and the sum alphabet seen by the receiver.
//!
//! With user 1 on an `N1`-PSK and user 2 on an `N2`-PSK (`N1 <= N2`) rotated
//! by `theta = pi/N2`, the 2*N1*N2 pairwise sums `x(n1) + x'(n2)` arrange
//! themselves on `N2/2` concentric circles of radius
//! `2*cos(pi*(2m+1)/(2*N2))`, each carrying `2*N1` points.  Every sum point
//! is reachable in exactly one of two index forms,
//! `n2 = k*n1 + m` ("plus") or `n2 = k*n1 - m - 1` ("minus") with
//! `k = N2/N1`, and its phase is `2*pi*n1/N1 +/- pi*(2m+1)/(2*N2)`.  This
//! module constructs that annotated geometry and checks it numerically.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, violation, Result};

/// A point of the complex signal plane.
pub type Point = Complex64;

/// Absolute tolerance for point equality (Euclidean distance).
pub const POINT_TOLERANCE: f64 = 1e-9;

/// Tolerance-based equality of two complex points.
pub fn points_equal(a: Point, b: Point) -> bool {
    (a - b).norm() <= POINT_TOLERANCE
}

/// Reduces an angle to `[0, 2*pi)`.
pub fn mod_tau(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r == TAU {
        0.0
    } else {
        r
    }
}

/// Absolute circular distance between two angles.
fn angle_distance(a: f64, b: f64) -> f64 {
    let d = mod_tau(a - b);
    d.min(TAU - d)
}

fn require_psk_size(n: usize) -> Result<()> {
    if n < 4 || !n.is_power_of_two() {
        return Err(invalid(format!(
            "PSK size must be a power of two >= 4, got {n}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// PSK sets
// ---------------------------------------------------------------------------

/// A symmetric PSK signal set: `N` unit-magnitude points at phases
/// `2*pi*n/N + theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct PskSet {
    size: usize,
    rotation: f64,
    points: Vec<Point>,
}

impl PskSet {
    pub fn size(&self) -> usize {
        self.size
    }

    /// Rotation offset in radians, normalized to `[0, 2*pi)`.
    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, n: usize) -> Point {
        self.points[n]
    }

    /// Returns this set rotated by a further `phi` radians.
    ///
    /// Implemented as point-wise multiplication by `e^{i*phi}`, so it is an
    /// independent route to `make_psk(size, rotation + phi)`.
    pub fn rotated(&self, phi: f64) -> PskSet {
        let w = Point::from_polar(1.0, phi);
        PskSet {
            size: self.size,
            rotation: mod_tau(self.rotation + phi),
            points: self.points.iter().map(|p| p * w).collect(),
        }
    }
}

/// Builds the symmetric `N`-PSK set rotated by `theta`.
pub fn make_psk(n: usize, theta: f64) -> Result<PskSet> {
    require_psk_size(n)?;
    if !theta.is_finite() {
        return Err(invalid("rotation angle must be finite"));
    }
    let rotation = mod_tau(theta);
    let points = (0..n)
        .map(|i| Point::from_polar(1.0, TAU * i as f64 / n as f64 + rotation))
        .collect();
    Ok(PskSet {
        size: n,
        rotation,
        points,
    })
}

/// The canonical relative rotation `pi/N2` that makes the sum alphabet
/// uniquely decodable.
pub fn canonical_rotation(n2: usize) -> f64 {
    PI / n2 as f64
}

// ---------------------------------------------------------------------------
// Sum alphabet
// ---------------------------------------------------------------------------

/// Which of the two index forms of the sum-alphabet decomposition produced a
/// point: `n2 = k*n1 + m` (plus) or `n2 = k*n1 - m - 1` (minus).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumForm {
    Plus,
    Minus,
}

/// One point of the sum alphabet, annotated with the transmit pair that
/// produced it and, when the geometry matches, its circle index and form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumPoint {
    pub value: Point,
    pub n1: usize,
    pub n2: usize,
    /// Circle index `m` with radius `2*cos(pi*(2m+1)/(2*N2))`; `None` when
    /// the rotation does not produce the concentric-ring pattern.
    pub circle: Option<usize>,
    pub form: Option<SumForm>,
}

/// Serializable record for one sum point (`{n1, n2, re, im, circle, form}`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SumPointRecord {
    pub n1: usize,
    pub n2: usize,
    pub re: f64,
    pub im: f64,
    pub circle: Option<usize>,
    pub form: Option<SumForm>,
}

/// All pairwise sums of two PSK sets, with ring geometry annotations.
#[derive(Debug, Clone)]
pub struct SumAlphabet {
    s1: PskSet,
    s2: PskSet,
    points: Vec<SumPoint>,
    radii: Vec<f64>,
}

impl SumAlphabet {
    pub fn s1(&self) -> &PskSet {
        &self.s1
    }

    pub fn s2(&self) -> &PskSet {
        &self.s2
    }

    /// Points in `(n1, n2)` lexicographic order.
    pub fn points(&self) -> &[SumPoint] {
        &self.points
    }

    /// The point produced by the transmit pair `(n1, n2)`.
    pub fn point(&self, n1: usize, n2: usize) -> &SumPoint {
        &self.points[n1 * self.s2.size() + n2]
    }

    /// Ideal circle radii, outermost first.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// True when user 2's rotation is the canonical `pi/N2`.
    pub fn has_canonical_rotation(&self) -> bool {
        angle_distance(self.s2.rotation(), canonical_rotation(self.s2.size())) <= POINT_TOLERANCE
    }

    /// Export records in point order.
    pub fn point_records(&self) -> Vec<SumPointRecord> {
        self.points
            .iter()
            .map(|p| SumPointRecord {
                n1: p.n1,
                n2: p.n2,
                re: p.value.re,
                im: p.value.im,
                circle: p.circle,
                form: p.form,
            })
            .collect()
    }
}

/// Builds the sum alphabet of `s1` and `s2` (`s1.size <= s2.size`).
///
/// Points are annotated with circle index and form whenever they sit on the
/// ideal ring geometry, which requires `s1` unrotated and `s2` at the
/// canonical rotation modulo `2*pi/N2`; otherwise `circle`/`form` stay
/// unassigned.
pub fn sum_alphabet(s1: &PskSet, s2: &PskSet) -> Result<SumAlphabet> {
    if s1.size() > s2.size() {
        return Err(invalid(format!(
            "require n1 <= n2, got ({}, {})",
            s1.size(),
            s2.size()
        )));
    }
    let n1 = s1.size();
    let n2 = s2.size();
    let k = n2 / n1;
    let radii = circle_radii(n2)?;
    let s1_unrotated =
        s1.rotation().abs() <= POINT_TOLERANCE || (TAU - s1.rotation()).abs() <= POINT_TOLERANCE;
    let canonical = s1_unrotated
        && angle_distance(s2.rotation(), canonical_rotation(n2)) <= POINT_TOLERANCE;

    let mut points = Vec::with_capacity(n1 * n2);
    for a in 0..n1 {
        for b in 0..n2 {
            let value = s1.point(a) + s2.point(b);
            let (circle, form) = if canonical {
                // n2 = k*n1 + m (plus) covers m in [0, N2/2); otherwise
                // n2 = k*n1 - m - 1 (minus) with m = N2 - 1 - (b - k*a mod N2).
                let m_plus = (b + n2 - (k * a) % n2) % n2;
                if m_plus < n2 / 2 {
                    (Some(m_plus), Some(SumForm::Plus))
                } else {
                    (Some(n2 - 1 - m_plus), Some(SumForm::Minus))
                }
            } else {
                match_ring_geometry(value, a, n1, n2, &radii)
            };
            points.push(SumPoint {
                value,
                n1: a,
                n2: b,
                circle,
                form,
            });
        }
    }
    Ok(SumAlphabet {
        s1: s1.clone(),
        s2: s2.clone(),
        points,
        radii,
    })
}

/// Tries to place a sum value on the ideal ring geometry for user-1 index
/// `a`: phase `2*pi*a/N1 +/- pi*(2m+1)/(2*N2)` at radius `radii[m]`.
fn match_ring_geometry(
    value: Point,
    a: usize,
    n1: usize,
    n2: usize,
    radii: &[f64],
) -> (Option<usize>, Option<SumForm>) {
    let base = TAU * a as f64 / n1 as f64;
    for (m, &r) in radii.iter().enumerate() {
        let offset = PI * (2 * m + 1) as f64 / (2.0 * n2 as f64);
        if points_equal(value, Point::from_polar(r, base + offset)) {
            return (Some(m), Some(SumForm::Plus));
        }
        if points_equal(value, Point::from_polar(r, base - offset)) {
            return (Some(m), Some(SumForm::Minus));
        }
    }
    (None, None)
}

/// Radii of the `N2/2` concentric circles, `2*cos(pi*(2m+1)/(2*N2))` for
/// `m = 0..N2/2-1` (strictly decreasing).
pub fn circle_radii(n2: usize) -> Result<Vec<f64>> {
    require_psk_size(n2)?;
    Ok((0..n2 / 2)
        .map(|m| 2.0 * (PI * (2 * m + 1) as f64 / (2.0 * n2 as f64)).cos())
        .collect())
}

/// Consecutive radius gaps `r(C^q) - r(C^{q+1})` without verification.
pub fn radial_gaps(n2: usize) -> Result<Vec<f64>> {
    let radii = circle_radii(n2)?;
    Ok(radii.windows(2).map(|w| w[0] - w[1]).collect())
}

/// Computes the radius gaps and certifies that they match the closed form
/// `4*sin(pi/(2*N2))*sin(pi*(q+1)/N2)` and increase strictly in `q`.
pub fn verify_radial_gaps(n2: usize) -> Result<Vec<f64>> {
    if n2 < 8 {
        return Err(invalid(format!("need N2 >= 8 for gap verification, got {n2}")));
    }
    let gaps = radial_gaps(n2)?;
    for (q, &g) in gaps.iter().enumerate() {
        let closed = 4.0
            * (PI / (2.0 * n2 as f64)).sin()
            * (PI * (q + 1) as f64 / n2 as f64).sin();
        if (g - closed).abs() > POINT_TOLERANCE {
            return Err(violation(format!(
                "radial gap q={q}: measured {g}, closed form {closed}"
            )));
        }
    }
    for q in 0..gaps.len().saturating_sub(1) {
        if gaps[q] >= gaps[q + 1] {
            return Err(violation(format!(
                "radial gaps not strictly increasing at q={q}: {} >= {}",
                gaps[q],
                gaps[q + 1]
            )));
        }
    }
    Ok(gaps)
}

// ---------------------------------------------------------------------------
// Angular separations
// ---------------------------------------------------------------------------

/// Signed phase difference `arg(p) - arg(q)` reduced to `[0, 2*pi)`.
///
/// When both points are annotated and lie on the same or adjacent circles,
/// the measured value is checked against the closed-form separation for
/// that case and a mismatch is reported as a property violation.
pub fn angular_separation(sa: &SumAlphabet, p: &SumPoint, q: &SumPoint) -> Result<f64> {
    for end in [p, q] {
        if end.n1 >= sa.s1().size() || end.n2 >= sa.s2().size() {
            return Err(invalid("point indices outside this alphabet"));
        }
        let own = sa.point(end.n1, end.n2);
        if !points_equal(own.value, end.value) || own.circle != end.circle || own.form != end.form
        {
            return Err(invalid("point does not belong to this alphabet"));
        }
    }
    let measured = mod_tau(p.value.arg() - q.value.arg());
    let (Some(mp), Some(fp)) = (p.circle, p.form) else {
        return Ok(measured);
    };
    let (Some(mq), Some(fq)) = (q.circle, q.form) else {
        return Ok(measured);
    };

    let n1 = sa.s1().size() as f64;
    let n2 = sa.s2().size() as f64;
    let dn = TAU * (p.n1 as f64 - q.n1 as f64) / n1;
    let expected = if mp == mq {
        match (fp, fq) {
            (SumForm::Plus, SumForm::Plus) | (SumForm::Minus, SumForm::Minus) => Some(dn),
            (SumForm::Plus, SumForm::Minus) => Some(dn + PI * (2 * mp + 1) as f64 / n2),
            (SumForm::Minus, SumForm::Plus) => Some(dn - PI * (2 * mp + 1) as f64 / n2),
        }
    } else if mp == mq + 1 {
        match (fp, fq) {
            (SumForm::Plus, SumForm::Minus) => Some(dn + TAU * mp as f64 / n2),
            (SumForm::Minus, SumForm::Plus) => Some(dn - TAU * mp as f64 / n2),
            _ => None,
        }
    } else if mq == mp + 1 {
        // Same two cases with the roles of p and q swapped, negated.
        match (fp, fq) {
            (SumForm::Minus, SumForm::Plus) => Some(dn - TAU * mq as f64 / n2),
            (SumForm::Plus, SumForm::Minus) => Some(dn + TAU * mq as f64 / n2),
            _ => None,
        }
    } else {
        None
    };
    if let Some(e) = expected {
        if angle_distance(measured, mod_tau(e)) > POINT_TOLERANCE {
            return Err(violation(format!(
                "angular separation ({}, {:?}) vs ({}, {:?}): measured {measured}, expected {}",
                p.n1,
                p.form,
                q.n1,
                q.form,
                mod_tau(e)
            )));
        }
    }
    Ok(measured)
}

// ---------------------------------------------------------------------------
// Unique decodability
// ---------------------------------------------------------------------------

/// Outcome of the unique-decodability check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UdCheck {
    pub uniquely_decodable: bool,
    /// First colliding transmit pairs `((n1, n2), (n1', n2'))`, if any.
    pub witness: Option<((usize, usize), (usize, usize))>,
}

/// Checks whether all `N1*N2` sums are pairwise distinct (within tolerance).
///
/// Scans transmit pairs in `(n1, n2)` lexicographic order and reports the
/// first collision as a witness.
pub fn check_unique_decodability(s1: &PskSet, s2: &PskSet) -> UdCheck {
    let n2 = s2.size();
    let sums: Vec<Point> = s1
        .points()
        .iter()
        .flat_map(|&a| s2.points().iter().map(move |&b| a + b))
        .collect();
    for i in 0..sums.len() {
        for j in (i + 1)..sums.len() {
            if points_equal(sums[i], sums[j]) {
                return UdCheck {
                    uniquely_decodable: false,
                    witness: Some(((i / n2, i % n2), (j / n2, j % n2))),
                };
            }
        }
    }
    UdCheck {
        uniquely_decodable: true,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_psk_canonical_qpsk() {
        let s = make_psk(4, 0.0).unwrap();
        let want = [
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(-1.0, 0.0),
            Point::new(0.0, -1.0),
        ];
        for (p, w) in s.points().iter().zip(want) {
            assert!(points_equal(*p, w), "{p} vs {w}");
        }
    }

    #[test]
    fn make_psk_rotation_and_periodicity() {
        let s = make_psk(8, PI / 8.0).unwrap();
        assert!((s.point(0).arg() - PI / 8.0).abs() < 1e-12);
        assert!((s.point(0).norm() - 1.0).abs() < 1e-12);

        let a = make_psk(4, TAU).unwrap();
        let b = make_psk(4, 0.0).unwrap();
        for (p, q) in a.points().iter().zip(b.points()) {
            assert!(points_equal(*p, *q));
        }
    }

    #[test]
    fn make_psk_rejects_bad_sizes() {
        assert!(make_psk(3, 0.0).is_err());
        assert!(make_psk(2, 0.0).is_err());
        assert!(make_psk(12, 0.0).is_err());
        assert!(make_psk(4, f64::NAN).is_err());
    }

    #[test]
    fn rotation_composes() {
        for n in [4usize, 8, 16] {
            for i in 0..12 {
                let theta = 0.37 * i as f64;
                let phi = 0.11 + 0.23 * i as f64;
                let a = make_psk(n, theta).unwrap().rotated(phi);
                let b = make_psk(n, theta + phi).unwrap();
                for (p, q) in a.points().iter().zip(b.points()) {
                    assert!(points_equal(*p, *q));
                }
            }
        }
    }

    #[test]
    fn qpsk_8psk_sum_alphabet_structure() {
        let s1 = make_psk(4, 0.0).unwrap();
        let s2 = make_psk(8, PI / 8.0).unwrap();
        let sa = sum_alphabet(&s1, &s2).unwrap();
        assert_eq!(sa.points().len(), 32);
        assert!(sa.has_canonical_rotation());

        // Expected radii, cross-checked against brute-force magnitudes below.
        let expected = [
            2.0 * (PI / 16.0).cos(),
            2.0 * (3.0 * PI / 16.0).cos(),
            2.0 * (5.0 * PI / 16.0).cos(),
            2.0 * (7.0 * PI / 16.0).cos(),
        ];
        let frozen = [1.961570560806461, 1.662939224605090, 1.111140466039204, 0.390180644032257];
        for m in 0..4 {
            assert!((sa.radii()[m] - expected[m]).abs() < 1e-12);
            assert!((sa.radii()[m] - frozen[m]).abs() < 1e-12);
        }

        let mut per_circle = [0usize; 4];
        let mut per_circle_plus = [0usize; 4];
        for p in sa.points() {
            let m = p.circle.expect("canonical rotation annotates every point");
            per_circle[m] += 1;
            if p.form == Some(SumForm::Plus) {
                per_circle_plus[m] += 1;
            }
            assert!((p.value.norm() - sa.radii()[m]).abs() <= POINT_TOLERANCE);
        }
        assert_eq!(per_circle, [8, 8, 8, 8]);
        assert_eq!(per_circle_plus, [4, 4, 4, 4]);
    }

    #[test]
    fn sum_alphabet_annotation_matches_phase_formula() {
        for (n1, n2) in [(4usize, 4usize), (4, 8), (8, 8), (8, 16), (4, 16)] {
            let s1 = make_psk(n1, 0.0).unwrap();
            let s2 = make_psk(n2, canonical_rotation(n2)).unwrap();
            let sa = sum_alphabet(&s1, &s2).unwrap();
            for p in sa.points() {
                let m = p.circle.unwrap();
                let offset = PI * (2 * m + 1) as f64 / (2.0 * n2 as f64);
                let base = TAU * p.n1 as f64 / n1 as f64;
                let expected = match p.form.unwrap() {
                    SumForm::Plus => base + offset,
                    SumForm::Minus => base - offset,
                };
                assert!(
                    angle_distance(p.value.arg(), expected) <= POINT_TOLERANCE,
                    "({n1},{n2}) point ({},{})",
                    p.n1,
                    p.n2
                );
            }
        }
    }

    #[test]
    fn sum_alphabet_distinctness_over_size_grid() {
        for n1 in [4usize, 8, 16, 32] {
            for n2 in [4usize, 8, 16, 32] {
                if n1 > n2 {
                    continue;
                }
                let s1 = make_psk(n1, 0.0).unwrap();
                let s2 = make_psk(n2, canonical_rotation(n2)).unwrap();
                let check = check_unique_decodability(&s1, &s2);
                assert!(check.uniquely_decodable, "({n1},{n2}) should be UD");
                let sa = sum_alphabet(&s1, &s2).unwrap();
                assert_eq!(sa.points().len(), n1 * n2);
                let mut counts = vec![0usize; n2 / 2];
                for p in sa.points() {
                    counts[p.circle.unwrap()] += 1;
                }
                assert!(counts.iter().all(|&c| c == 2 * n1));
            }
        }
    }

    #[test]
    fn sum_alphabet_rejects_size_order() {
        let s1 = make_psk(8, 0.0).unwrap();
        let s2 = make_psk(4, 0.0).unwrap();
        assert!(sum_alphabet(&s1, &s2).is_err());
    }

    #[test]
    fn unrotated_sum_alphabet_collides() {
        let s1 = make_psk(4, 0.0).unwrap();
        let s2 = make_psk(8, 0.0).unwrap();
        let check = check_unique_decodability(&s1, &s2);
        assert!(!check.uniquely_decodable);
        assert_eq!(check.witness, Some(((0, 2), (1, 0))));

        // Construction still succeeds; geometry is unassigned.
        let sa = sum_alphabet(&s1, &s2).unwrap();
        assert!(sa.points().iter().all(|p| p.circle.is_none() && p.form.is_none()));
    }

    #[test]
    fn equal_size_rotated_pair_is_ud() {
        let s1 = make_psk(4, 0.0).unwrap();
        let s2 = make_psk(4, PI / 4.0).unwrap();
        assert!(check_unique_decodability(&s1, &s2).uniquely_decodable);
    }

    #[test]
    fn circle_radii_formula_and_ordering() {
        let r = circle_radii(4).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - 2.0 * (PI / 8.0).cos()).abs() < 1e-15);
        assert!((r[1] - 2.0 * (3.0 * PI / 8.0).cos()).abs() < 1e-15);

        let r8 = circle_radii(8).unwrap();
        assert_eq!(r8.len(), 4);
        assert!((r8[3] - 0.390180644032257).abs() < 1e-12);

        for n2 in [4usize, 8, 16, 32, 64] {
            let r = circle_radii(n2).unwrap();
            assert!(r.windows(2).all(|w| w[0] > w[1]), "N2={n2}");
        }
        assert!(circle_radii(6).is_err());
    }

    #[test]
    fn radii_match_brute_force_magnitudes() {
        let s1 = make_psk(4, 0.0).unwrap();
        let s2 = make_psk(8, PI / 8.0).unwrap();
        let radii = circle_radii(8).unwrap();
        for a in s1.points() {
            for b in s2.points() {
                let mag = (a + b).norm();
                assert!(
                    radii.iter().any(|&r| (r - mag).abs() <= POINT_TOLERANCE),
                    "magnitude {mag} not on any ideal circle"
                );
            }
        }
    }

    #[test]
    fn radial_gap_verification() {
        let gaps = verify_radial_gaps(8).unwrap();
        assert_eq!(gaps.len(), 3);
        // First gap agrees with 4*sin(pi/8)*sin(pi/16) (the two closed forms
        // coincide at q = 0).
        assert!((gaps[0] - 4.0 * (PI / 8.0).sin() * (PI / 16.0).sin()).abs() < 1e-12);
        assert!((gaps[0] - 0.298631).abs() < 1e-6);

        let gaps16 = verify_radial_gaps(16).unwrap();
        assert_eq!(gaps16.len(), 7);
        assert!(gaps16.iter().all(|&g| g > 0.0));

        // Closed form vs direct radii subtraction to 1e-12.
        for n2 in [8usize, 16, 32, 64] {
            let radii = circle_radii(n2).unwrap();
            let gaps = verify_radial_gaps(n2).unwrap();
            for (q, &g) in gaps.iter().enumerate() {
                assert!((g - (radii[q] - radii[q + 1])).abs() < 1e-12);
            }
        }
        assert!(verify_radial_gaps(4).is_err());
    }

    #[test]
    fn angular_separation_cases() {
        let s1 = make_psk(4, 0.0).unwrap();
        let s2 = make_psk(8, PI / 8.0).unwrap();
        let sa = sum_alphabet(&s1, &s2).unwrap();

        // p = q.
        let p = sa.point(1, 3);
        assert!(angular_separation(&sa, p, p).unwrap().abs() < 1e-12);

        // Same circle, same form, n1 - n1' = 1 -> 2*pi/N1 = pi/2.
        let (mut a, mut b) = (None, None);
        for p in sa.points() {
            if p.circle == Some(0) && p.form == Some(SumForm::Plus) {
                if p.n1 == 1 {
                    a = Some(*p);
                }
                if p.n1 == 0 {
                    b = Some(*p);
                }
            }
        }
        let sep = angular_separation(&sa, &a.unwrap(), &b.unwrap()).unwrap();
        assert!((sep - PI / 2.0).abs() < 1e-9);

        // Same circle m=0, cross-form, n1 = n1' -> pi/8.
        let plus = sa
            .points()
            .iter()
            .find(|p| p.circle == Some(0) && p.form == Some(SumForm::Plus) && p.n1 == 2)
            .unwrap();
        let minus = sa
            .points()
            .iter()
            .find(|p| p.circle == Some(0) && p.form == Some(SumForm::Minus) && p.n1 == 2)
            .unwrap();
        let sep = angular_separation(&sa, plus, minus).unwrap();
        assert!((sep - PI / 8.0).abs() < 1e-9);
    }

    #[test]
    fn angular_separation_checks_all_near_pairs() {
        for (n1, n2) in [(4usize, 8usize), (8, 16)] {
            let s1 = make_psk(n1, 0.0).unwrap();
            let s2 = make_psk(n2, canonical_rotation(n2)).unwrap();
            let sa = sum_alphabet(&s1, &s2).unwrap();
            for p in sa.points() {
                for q in sa.points() {
                    let (mp, mq) = (p.circle.unwrap(), q.circle.unwrap());
                    if mp.abs_diff(mq) <= 1 {
                        angular_separation(&sa, p, q).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn angular_separation_rejects_foreign_points() {
        let s1 = make_psk(4, 0.0).unwrap();
        let s2 = make_psk(8, PI / 8.0).unwrap();
        let sa = sum_alphabet(&s1, &s2).unwrap();
        let other = sum_alphabet(&s1, &make_psk(8, 0.3).unwrap()).unwrap();
        let p = sa.point(0, 0);
        let foreign = other.point(0, 0);
        assert!(angular_separation(&sa, p, foreign).is_err());
    }
}
