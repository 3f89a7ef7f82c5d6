//! Trellis-coded modulation for a two-user Gaussian multiple access channel
//! with PSK signal sets of (possibly) unequal size.
//!
//! The receiver of a two-user GMAC sees the *sum* of both users' symbols in
//! complex AWGN.  When user 2's PSK alphabet is rotated by `pi/N2` relative
//! to user 1's, the sum alphabet becomes a stack of `N2/2` concentric
//! asymmetric PSK rings, every sum point maps back to a unique transmit
//! pair, and Ungerboeck (index-parity) partitioning of each user's alphabet
//! maximizes the guaranteed minimum squared Euclidean distance of the joint
//! (sum) trellis.
//!
//! The crate is organized around that pipeline:
//!
//! * [`constellation`] — PSK alphabets, the annotated sum alphabet and its
//!   ring geometry.
//! * [`rotation`] — the rotation-selection objective, grid/golden-section
//!   search for minimizing angles, sum-rate estimation and cardinality
//!   planning.
//! * [`partition`] — Ungerboeck splits, the induced four-set partition of
//!   the sum alphabet, minimum-distance lemmas and exhaustive optimality
//!   certification.
//! * [`trellis`] — labelled per-user trellises, the product sum trellis and
//!   its guaranteed minimum squared Euclidean distance.
//! * [`simulator`] — end-to-end Monte Carlo link simulation with joint
//!   Viterbi decoding and an exhaustive maximum-likelihood oracle.

pub mod constellation;
pub mod error;
pub mod partition;
pub mod rng;
pub mod rotation;
pub mod simulator;
pub mod trellis;

pub use constellation::{
    check_unique_decodability, circle_radii, make_psk, sum_alphabet, verify_radial_gaps, Point,
    PskSet, SumAlphabet, SumForm, SumPoint, POINT_TOLERANCE,
};
pub use error::{Error, Result};
