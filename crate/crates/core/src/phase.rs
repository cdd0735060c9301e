//! Relative-phase extraction conj(F x(w)) F x(w - mu) from interference
//! magnitudes, either through the root-of-unity polarization identity (K >= 3
//! channels) or from two channels with generic rotations.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::fit::fit_trig_poly;
use crate::measurement::MeasurementSet;
use crate::signal::TrigPoly;

/// How relative phases are pulled out of the interference channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMode {
    Polarization,
    TwoRotation,
}

/// Polarization identity: given the K magnitudes |z1 + zeta_K^{-j} z2|
/// (j = 0..K-1, zeta_K = e^{2 pi i / K}), returns
/// (1/K) sum_j zeta_K^j |...|^2 = conj(z1) z2. Needs K >= 3; for K < 3 the
/// right-hand side is forced real and carries no phase.
pub fn polarize(values: &[f64], k: usize) -> Result<Complex64> {
    if k < 3 {
        return Err(Error::PolarizationOrder { k });
    }
    assert_eq!(values.len(), k, "need one magnitude per root of unity");
    let mut acc = Complex64::ZERO;
    for (j, &v) in values.iter().enumerate() {
        acc += Complex64::from_polar(1.0, TAU * j as f64 / k as f64) * (v * v);
    }
    Ok(acc / k as f64)
}

/// Extracts the phase difference Delta = phi(w - mu) - phi(w) from two
/// interference magnitudes I1, I2 taken with rotations alpha1, alpha2, given
/// both moduli m1 = |F x(w)| and m2 = |F x(w - mu)|.
///
/// Expanding |F x(w) + e^{i alpha} F x(w - mu)|^2 gives
/// Re e^{i(Delta + alpha)} per channel; the pair yields a 2x2 system for
/// (cos Delta, sin Delta) with determinant sin(alpha1 - alpha2).
pub fn two_rotation_phase_diff(
    i1: f64,
    i2: f64,
    m1: f64,
    m2: f64,
    alpha1: f64,
    alpha2: f64,
    tol: &Tolerances,
) -> Result<f64> {
    let det = (alpha1 - alpha2).sin();
    if det.abs() < tol.rotation_pair {
        return Err(Error::DegenerateRotationPair {
            delta: alpha1 - alpha2,
        });
    }
    if m1 <= 0.0 || m2 <= 0.0 {
        return Err(Error::VanishingIntensity { omega: f64::NAN });
    }
    let r1 = (i1 * i1 - m1 * m1 - m2 * m2) / (2.0 * m1 * m2);
    let r2 = (i2 * i2 - m1 * m1 - m2 * m2) / (2.0 * m1 * m2);
    let cos_d = (r2 * alpha1.sin() - r1 * alpha2.sin()) / det;
    let sin_d = (r2 * alpha1.cos() - r1 * alpha2.cos()) / det;
    Ok(sin_d.atan2(cos_d))
}

/// Channel polynomials fitted once so relative phases can be read anywhere,
/// not only at grid nodes. Squared channel magnitudes are trigonometric
/// polynomials of degree N-1, so the fit is exact on a 2N-1 grid.
#[derive(Debug, Clone)]
pub struct FittedChannels {
    mu: f64,
    base: TrigPoly,
    /// (alpha, fitted squared magnitudes), in measurement order
    channels: Vec<(f64, TrigPoly)>,
    /// base magnitude scale for the vanishing threshold
    peak: f64,
    /// scalar measurement values consumed by the fits
    consumed: usize,
}

impl FittedChannels {
    /// Fits the base and the channels needed by `mode` at degree n-1.
    /// Polarization uses every channel; two-rotation picks the first channel
    /// pair whose rotation difference is usable.
    pub fn new(
        mset: &MeasurementSet,
        n: usize,
        mode: PhaseMode,
        tol: &Tolerances,
    ) -> Result<FittedChannels> {
        if mset.channels.is_empty() {
            return Err(Error::ChannelFamily("no interference channels"));
        }
        let mu = mset.channels[0].mu;
        if mset.channels.iter().any(|c| (c.mu - mu).abs() > 1e-12) {
            return Err(Error::MixedModulationSet);
        }
        let degree = n.saturating_sub(1);
        let fit = |values: &[f64]| -> Result<TrigPoly> {
            let samples: Vec<(f64, f64)> = mset
                .grid
                .iter()
                .zip(values)
                .map(|(&w, &v)| (w, v * v))
                .collect();
            fit_trig_poly(&samples, degree, tol.fit_residual)
        };

        let picked: Vec<usize> = match mode {
            PhaseMode::Polarization => {
                let k = mset.channels.len();
                if k < 3 {
                    return Err(Error::PolarizationOrder { k });
                }
                // channels must realize alpha_j = -2 pi j / K, in some order
                let mut order = vec![usize::MAX; k];
                for (idx, ch) in mset.channels.iter().enumerate() {
                    let j = (-ch.alpha * k as f64 / TAU).rem_euclid(k as f64).round() as usize % k;
                    let expect = crate::measurement::wrap_angle(-TAU * j as f64 / k as f64);
                    if angular_distance(ch.alpha, expect) > 1e-9 || order[j] != usize::MAX {
                        return Err(Error::ChannelFamily(
                            "rotations are not a full root-of-unity family",
                        ));
                    }
                    order[j] = idx;
                }
                order
            }
            PhaseMode::TwoRotation => {
                let mut found = None;
                'outer: for i in 0..mset.channels.len() {
                    for j in i + 1..mset.channels.len() {
                        let delta = mset.channels[i].alpha - mset.channels[j].alpha;
                        if delta.sin().abs() >= tol.rotation_pair {
                            found = Some(vec![i, j]);
                            break 'outer;
                        }
                    }
                }
                found.ok_or(Error::DegenerateRotationPair {
                    delta: mset
                        .channels
                        .get(1)
                        .map_or(0.0, |c| mset.channels[0].alpha - c.alpha),
                })?
            }
        };

        let base = fit(&mset.base)?;
        let mut channels = Vec::with_capacity(picked.len());
        for &idx in &picked {
            let ch = &mset.channels[idx];
            channels.push((ch.alpha, fit(&ch.values)?));
        }
        let peak = mset.base.iter().cloned().fold(0.0, f64::max);
        let consumed = mset.grid.len() * (1 + picked.len());
        Ok(FittedChannels {
            mu,
            base,
            channels,
            peak,
            consumed,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Scalar intensity values read by the fits (base plus used channels).
    pub fn measurements_consumed(&self) -> usize {
        self.consumed
    }

    /// |F x(omega)| from the fitted base polynomial.
    pub fn magnitude(&self, omega: f64) -> f64 {
        self.base.eval(omega).max(0.0).sqrt()
    }

    fn vanishing_threshold(&self, tol: &Tolerances) -> f64 {
        // squared evaluations round at machine eps, so magnitudes near true
        // zeros bottom out around sqrt(eps) * peak
        tol.vanishing_intensity.max(f64::EPSILON.sqrt() * 2.0) * self.peak.max(1e-300)
    }

    /// Unit phase factor e^{i (phi(omega - mu) - phi(omega))}, provided both
    /// moduli stay above the vanishing threshold.
    pub fn relative_phase(
        &self,
        omega: f64,
        mode: PhaseMode,
        tol: &Tolerances,
    ) -> Result<Complex64> {
        let m1 = self.magnitude(omega);
        let m2 = self.magnitude(omega - self.mu);
        let thr = self.vanishing_threshold(tol);
        if m1 <= thr || m2 <= thr {
            return Err(Error::VanishingIntensity { omega });
        }
        match mode {
            PhaseMode::Polarization => {
                let k = self.channels.len();
                let mut acc = Complex64::ZERO;
                for (j, (_, poly)) in self.channels.iter().enumerate() {
                    let sq = poly.eval(omega).max(0.0);
                    acc += Complex64::from_polar(1.0, TAU * j as f64 / k as f64) * sq;
                }
                acc /= k as f64;
                if acc.norm() <= thr * thr {
                    return Err(Error::VanishingIntensity { omega });
                }
                Ok(acc / acc.norm())
            }
            PhaseMode::TwoRotation => {
                let (a1, p1) = &self.channels[0];
                let (a2, p2) = &self.channels[1];
                let i1 = p1.eval(omega).max(0.0).sqrt();
                let i2 = p2.eval(omega).max(0.0).sqrt();
                let delta = two_rotation_phase_diff(i1, i2, m1, m2, *a1, *a2, tol).map_err(
                    |e| match e {
                        Error::VanishingIntensity { .. } => Error::VanishingIntensity { omega },
                        other => other,
                    },
                )?;
                Ok(Complex64::from_polar(1.0, delta))
            }
        }
    }
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}
