//! One-dimensional discrete-time phase retrieval with interference
//! measurements.
//!
//! A finitely supported complex signal is never determined by its Fourier
//! intensity alone: rotations, shifts, and the conjugate reflection always
//! survive, and beyond those the zero pairs of the autocorrelation's
//! associated polynomial generate up to 2^(N-2) genuinely different
//! solutions. This crate simulates the measurement families that break the
//! ambiguity and implements the matching reconstructions:
//!
//! * [`ambiguity`] enumerates every non-trivial solution of the plain
//!   intensity problem by zero flipping.
//! * [`recover::recover_self_interference`] reconstructs the signal, up to
//!   one global rotation, from its intensity plus interference with a
//!   rotated, modulated copy of itself, either through a K >= 3
//!   root-of-unity polarization family or from two channels with generic
//!   rotations. With K = 3 this consumes exactly 8N-4 scalar measurements.
//! * [`recover::recover_known_reference`] reduces the solution set to at
//!   most two candidates using a known reference signal.
//! * [`recover::resolve_unknown_reference`] pins both signals, up to common
//!   trivial ambiguities, from the three intensities of x, h, and x + h when
//!   their zero sets are disjoint.
//!
//! Everything is pure and reentrant; the enumeration and Monte-Carlo drivers
//! are data parallel behind the `parallel` feature (on by default, rayon
//! backed) with an identical sequential fallback when the feature is off.

pub mod ambiguity;
pub mod config;
pub mod error;
pub mod exec;
pub mod fit;
mod linalg;
pub mod measurement;
pub mod phase;
pub mod prony;
pub mod recover;
pub mod signal;
pub mod synth;

pub use config::Tolerances;
pub use error::{Error, ErrorClass, Result};
pub use signal::{trivially_equivalent, ComplexSignal, EquivalenceWitness, SignalRecord, TrigPoly};
