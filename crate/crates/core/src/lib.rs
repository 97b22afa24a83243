//! Spin systems in `M_{2^n}`, trace-invariant projections onto spin factors,
//! and convex-cone oracles for positive maps.
//!
//! The library constructs the anticommuting generators `s_1, ..., s_m` of a
//! spin factor inside the `2^n x 2^n` complex matrices, the trace-invariant
//! projection `P` onto their span, the projection `Q` onto the reversible
//! Jordan algebra fixed by `t ∘ AdW`, and represents these maps as transfer
//! matrices with Choi-matrix conversion. On top of that it provides
//! membership oracles for the completely positive, co-positive, positive
//! (block-positive) and decomposable cones, plus a scripted harness that
//! verifies the decomposition identities `P = 2^{-n} ι + β` and
//! `P = 2^{-n+1} Q + β` together with their optimality witnesses.

pub mod cones;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod report;
pub mod rng;
pub mod spin;
pub mod superop;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use spin::SpinSystem;
pub use superop::{ChoiMatrix, SuperOp};
