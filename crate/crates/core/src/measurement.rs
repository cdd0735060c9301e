//! Forward models: the sampled intensity and interference magnitudes the
//! recovery pipelines consume, with optional multiplicative noise.
//!
//! Squared channel magnitudes are trigonometric polynomials of degree N-1 in
//! omega, so 2N-1 samples at distinct nodes pin each channel down exactly.
//! The default grids are equispaced in [-pi, pi) for conditioning.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::signal::ComplexSignal;

/// One self-interference channel: magnitudes of F x + e^{i alpha} F x(. - mu).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Channel {
    pub alpha: f64,
    pub mu: f64,
    pub values: Vec<f64>,
}

/// Reference interference block. `signal` is present when the reference is
/// known to the reconstruction and absent when it is itself unknown.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceChannel {
    pub signal: Option<ComplexSignal>,
    pub base_h: Vec<f64>,
    pub interference: Vec<f64>,
}

/// Sampled measurement data: base intensity plus tagged interference
/// channels and an optional reference block. `support_bound` is the
/// trigonometric degree the grid can fit (grid length >= 2*support_bound+1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementSet {
    pub grid: Vec<f64>,
    pub base: Vec<f64>,
    pub channels: Vec<Channel>,
    pub reference: Option<ReferenceChannel>,
    pub support_bound: usize,
}

impl MeasurementSet {
    /// Structural checks: consistent lengths, finite nonnegative values,
    /// distinct grid nodes, enough nodes for the declared degree bound.
    pub fn validate(&self) -> Result<()> {
        let n = self.grid.len();
        if n == 0 {
            return Err(Error::InvalidMeasurement("empty grid"));
        }
        if n < 2 * self.support_bound + 1 {
            return Err(Error::InvalidMeasurement(
                "grid shorter than 2*support_bound+1",
            ));
        }
        if self.grid.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidMeasurement("non-finite grid node"));
        }
        let mut wrapped: Vec<f64> = self.grid.iter().map(|w| w.rem_euclid(TAU)).collect();
        wrapped.sort_by(f64::total_cmp);
        for pair in wrapped.windows(2) {
            if pair[1] - pair[0] <= 1e-12 {
                return Err(Error::InvalidMeasurement("repeated grid nodes"));
            }
        }
        let check_values = |v: &[f64]| -> Result<()> {
            if v.len() != n {
                return Err(Error::InvalidMeasurement("value/grid length mismatch"));
            }
            if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::InvalidMeasurement("negative or non-finite value"));
            }
            Ok(())
        };
        check_values(&self.base)?;
        for ch in &self.channels {
            check_values(&ch.values)?;
            if !ch.alpha.is_finite() || !ch.mu.is_finite() {
                return Err(Error::InvalidMeasurement("non-finite channel tag"));
            }
        }
        if let Some(r) = &self.reference {
            check_values(&r.base_h)?;
            check_values(&r.interference)?;
        }
        Ok(())
    }

    /// Squared base samples paired with their nodes.
    pub fn base_squared(&self) -> Vec<(f64, f64)> {
        self.grid
            .iter()
            .zip(&self.base)
            .map(|(&w, &v)| (w, v * v))
            .collect()
    }
}

/// Equispaced nodes in [-pi, pi) fitting a trigonometric degree `d` exactly:
/// 2d+1 points.
pub fn grid_for_degree(d: usize) -> Vec<f64> {
    let count = 2 * d + 1;
    (0..count)
        .map(|k| -PI + TAU * k as f64 / count as f64)
        .collect()
}

/// The 2N-1 node default grid for a signal of support length `n`.
pub fn default_grid(n: usize) -> Vec<f64> {
    grid_for_degree(n.saturating_sub(1))
}

/// |F x| per grid node.
pub fn simulate_base(x: &ComplexSignal, grid: &[f64]) -> Vec<f64> {
    grid.iter().map(|&w| x.dtft(w).norm()).collect()
}

/// |F x(w) + e^{i alpha} F x(w - mu)| per grid node.
pub fn simulate_self_interference(
    x: &ComplexSignal,
    alpha: f64,
    mu: f64,
    grid: &[f64],
) -> Vec<f64> {
    let r = Complex64::from_polar(1.0, alpha);
    grid.iter()
        .map(|&w| (x.dtft(w) + r * x.dtft(w - mu)).norm())
        .collect()
}

/// |F x + F h| per grid node.
pub fn simulate_reference_interference(
    x: &ComplexSignal,
    h: &ComplexSignal,
    grid: &[f64],
) -> Vec<f64> {
    grid.iter()
        .map(|&w| (x.dtft(w) + h.dtft(w)).norm())
        .collect()
}

/// Relative multiplicative Gaussian noise on every stored magnitude:
/// v -> max(0, v (1 + eps)), eps ~ N(0, sigma), deterministic per seed.
/// Phases are never touched; they are not observable.
pub fn add_noise(m: &MeasurementSet, sigma: f64, seed: u64) -> MeasurementSet {
    if sigma == 0.0 {
        return m.clone();
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma >= 0");
    let mut perturb = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|&x| (x * (1.0 + normal.sample(&mut rng))).max(0.0))
            .collect()
    };
    MeasurementSet {
        grid: m.grid.clone(),
        base: perturb(&m.base),
        channels: m
            .channels
            .iter()
            .map(|ch| Channel {
                alpha: ch.alpha,
                mu: ch.mu,
                values: perturb(&ch.values),
            })
            .collect(),
        reference: m.reference.as_ref().map(|r| ReferenceChannel {
            signal: r.signal.clone(),
            base_h: perturb(&r.base_h),
            interference: perturb(&r.interference),
        }),
        support_bound: m.support_bound,
    }
}

/// Base intensity plus the K-channel root-of-unity interference family
/// (alpha_k = -2 pi k / K) on the default 2N-1 grid.
pub fn polarization_set(x: &ComplexSignal, k: usize, mu: f64) -> Result<MeasurementSet> {
    if k < 3 {
        return Err(Error::PolarizationOrder { k });
    }
    if x.is_zero() {
        return Err(Error::EmptySignal);
    }
    let grid = default_grid(x.len());
    let channels = (0..k)
        .map(|j| {
            let alpha = wrap_angle(-TAU * j as f64 / k as f64);
            Channel {
                alpha,
                mu,
                values: simulate_self_interference(x, alpha, mu, &grid),
            }
        })
        .collect();
    Ok(MeasurementSet {
        base: simulate_base(x, &grid),
        channels,
        reference: None,
        support_bound: x.len() - 1,
        grid,
    })
}

/// Base intensity plus two interference channels with rotations alpha1 and
/// alpha2, which must not differ by a multiple of pi.
pub fn two_rotation_set(
    x: &ComplexSignal,
    alpha1: f64,
    alpha2: f64,
    mu: f64,
) -> Result<MeasurementSet> {
    if (alpha1 - alpha2).sin().abs() < 1e-9 {
        return Err(Error::DegenerateRotationPair {
            delta: alpha1 - alpha2,
        });
    }
    if x.is_zero() {
        return Err(Error::EmptySignal);
    }
    let grid = default_grid(x.len());
    let channels = [alpha1, alpha2]
        .iter()
        .map(|&alpha| Channel {
            alpha,
            mu,
            values: simulate_self_interference(x, alpha, mu, &grid),
        })
        .collect();
    Ok(MeasurementSet {
        base: simulate_base(x, &grid),
        channels,
        reference: None,
        support_bound: x.len() - 1,
        grid,
    })
}

/// Base, reference, and interference intensities for a reference signal `h`.
/// With `known` the reference is embedded for the known-reference pipeline;
/// without it only its intensity travels. The grid is sized for the combined
/// support of x and h, which bounds the interference degree.
pub fn reference_set(x: &ComplexSignal, h: &ComplexSignal, known: bool) -> Result<MeasurementSet> {
    if x.is_zero() || h.is_zero() {
        return Err(Error::EmptySignal);
    }
    let lo = x.offset().min(h.offset());
    let hi = (x.offset() + x.len() as i64 - 1).max(h.offset() + h.len() as i64 - 1);
    let degree = (hi - lo) as usize;
    let grid = grid_for_degree(degree);
    Ok(MeasurementSet {
        base: simulate_base(x, &grid),
        channels: Vec::new(),
        reference: Some(ReferenceChannel {
            signal: known.then(|| h.clone()),
            base_h: simulate_base(h, &grid),
            interference: simulate_reference_interference(x, h, &grid),
        }),
        support_bound: degree,
        grid,
    })
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    let mut v = a.rem_euclid(TAU);
    if v > PI {
        v -= TAU;
    }
    v
}
