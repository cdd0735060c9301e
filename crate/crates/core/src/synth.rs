//! Deterministic signal generators for experiments, benchmarks, and the
//! Monte-Carlo drivers.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

use crate::signal::ComplexSignal;

/// A modulation step that stays admissible for every support length at desk
/// scale: 2*pi times the fractional part of the golden ratio conjugate,
/// which lands in (0, pi).
pub fn golden_mu() -> f64 {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    TAU * (2.0 - phi)
}

/// Random signal of support length `n` with coefficient magnitudes in
/// [0.3, 1.3] (endpoints included, so the trimmed form is stable) and an
/// offset drawn from `offset_range` inclusive.
pub fn random_signal<R: Rng>(rng: &mut R, n: usize, offset_range: (i64, i64)) -> ComplexSignal {
    assert!(n >= 1);
    let coeffs: Vec<Complex64> = (0..n)
        .map(|_| Complex64::from_polar(rng.random_range(0.3..1.3), rng.random_range(-PI..PI)))
        .collect();
    let offset = rng.random_range(offset_range.0..=offset_range.1);
    ComplexSignal::new(offset, coeffs)
}

/// Seeded convenience wrapper around [`random_signal`].
pub fn random_signal_seeded(seed: u64, n: usize, offset_range: (i64, i64)) -> ComplexSignal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_signal(&mut rng, n, offset_range)
}

/// Linear convolution of two finitely supported signals.
pub fn convolve(a: &ComplexSignal, b: &ComplexSignal) -> ComplexSignal {
    if a.is_zero() || b.is_zero() {
        return ComplexSignal::zero();
    }
    let mut out = vec![Complex64::ZERO; a.len() + b.len() - 1];
    for (i, &av) in a.coeffs().iter().enumerate() {
        for (j, &bv) in b.coeffs().iter().enumerate() {
            out[i + j] += av * bv;
        }
    }
    ComplexSignal::new(a.offset() + b.offset(), out)
}
