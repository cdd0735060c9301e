//! End-to-end reconstruction pipelines.
//!
//! Self interference: read relative phases off the interference channels,
//! chain them along the arithmetic progression omega_0 + k*mu to win 2N
//! values of F x, then treat those values as an exponential sum whose
//! frequencies encode the support position. The admissibility condition on
//! mu keeps the exponential nodes distinct, and the phase of F x(omega_0) is
//! the one quantity no intensity measurement can fix, so recovery is exact
//! up to a global rotation with the offset pinned.
//!
//! Known reference: the cross term 2 Re[conj(F h) F x] is read off the three
//! intensities; windowing its coefficient block isolates the correlation
//! h * x, and dividing by conj(F h) returns F x. The mirrored phase choice
//! yields at most one further candidate, kept only when it fits the support
//! window.
//!
//! Unknown reference: both intensities are factored into their zero-flip
//! classes and every candidate pair is tested against the interference
//! channel over the admissible relative shifts and the closed-form relative
//! rotation. With disjoint zero sets exactly one class survives.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::ambiguity::{associated_polynomial, enumerate_ambiguities};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::exec;
use crate::fit::{estimate_support_length, fit_finite_signal, fit_trig_poly};
use crate::measurement::{add_noise, polarization_set, two_rotation_set, MeasurementSet};
use crate::phase::{FittedChannels, PhaseMode};
use crate::prony::{check_mu, frequencies_to_support, prony_recover};
use crate::signal::{ComplexSignal, TrigPoly};

/// A successful self-interference reconstruction.
#[derive(Debug, Clone)]
pub struct Recovery {
    pub signal: ComplexSignal,
    pub mode: PhaseMode,
    /// Start point of the phase chain; its phase is the fixed gauge.
    pub omega0: f64,
    /// Scalar intensity values consumed from the measurement set.
    pub measurements_used: usize,
}

/// Recovers the signal, up to one global rotation, from its Fourier
/// intensity and the self-interference channels of `mset`.
pub fn recover_self_interference(
    mset: &MeasurementSet,
    mode: PhaseMode,
    tol: &Tolerances,
) -> Result<Recovery> {
    mset.validate()?;
    let n = estimate_support_length(
        &mset.base_squared(),
        mset.support_bound,
        tol.support_truncation,
    )?;
    let mu = mset
        .channels
        .first()
        .ok_or(Error::ChannelFamily("no interference channels"))?
        .mu;
    if !check_mu(mu, n, tol.mu_margin) {
        return Err(Error::InadmissibleMu { mu, q_max: n - 1 });
    }

    let fits = FittedChannels::new(mset, n, mode, tol)?;
    let path_len = 2 * n;

    // scan for a start point whose whole sampling path stays away from the
    // zeros of F x; a degree N-1 polynomial has finitely many on the circle
    let scan = 64 * n.max(1);
    let mut peak = 0.0f64;
    let mut best = (f64::NEG_INFINITY, 0.0f64);
    for j in 0..scan {
        let w0 = -PI + TAU * j as f64 / scan as f64;
        let mut path_min = f64::INFINITY;
        for k in 0..path_len {
            let m = fits.magnitude(w0 + k as f64 * mu);
            path_min = path_min.min(m);
            peak = peak.max(m);
        }
        if path_min > best.0 {
            best = (path_min, w0);
        }
    }
    let threshold = tol.path_minimum * peak.max(1e-300);
    if best.0 <= threshold {
        return Err(Error::DegenerateSamplingPath { threshold });
    }
    let omega0 = best.1;

    // fix phi(omega_0) = 0 and chain relative phases along the path
    let mut samples = Vec::with_capacity(path_len);
    let mut phase = Complex64::new(1.0, 0.0);
    samples.push(Complex64::new(fits.magnitude(omega0), 0.0));
    for k in 1..path_len {
        let w = omega0 + k as f64 * mu;
        // factor = e^{i(phi(w - mu) - phi(w))}, so phi(w) adds its conjugate
        let factor = fits.relative_phase(w, mode, tol)?;
        phase *= factor.conj();
        samples.push(phase * fits.magnitude(w));
    }

    let es = prony_recover(&samples, n, tol)?;
    let (n0, mut coeffs) = frequencies_to_support(&es, mu, tol.frequency_lattice, n)?;
    // the chained values carry e^{-i omega_0 (n0 + j)} twiddles; divide out
    for (j, c) in coeffs.iter_mut().enumerate() {
        *c *= Complex64::from_polar(1.0, omega0 * (n0 + j as i64) as f64);
    }
    let signal = ComplexSignal::new(n0, coeffs);
    if signal.is_zero() {
        return Err(Error::ZeroIntensity);
    }
    Ok(Recovery {
        signal,
        mode,
        omega0,
        measurements_used: fits.measurements_consumed(),
    })
}

/// Recovers the at most two candidates consistent with a known reference:
/// the cross-correlation route and its mirrored-phase counterpart, each kept
/// only when it fits the support window (indices within |n| <= window-1).
pub fn recover_known_reference(
    mset: &MeasurementSet,
    window: usize,
    tol: &Tolerances,
) -> Result<Vec<ComplexSignal>> {
    mset.validate()?;
    if window == 0 {
        return Err(Error::WindowTooSmall { n: 1, window });
    }
    let reference = mset
        .reference
        .as_ref()
        .ok_or(Error::InvalidMeasurement("missing reference block"))?;
    let h = reference
        .signal
        .as_ref()
        .ok_or(Error::InvalidMeasurement("reference signal not embedded"))?;
    if h.is_zero() {
        return Err(Error::EmptySignal);
    }
    let n_est = estimate_support_length(
        &mset.base_squared(),
        mset.support_bound,
        tol.support_truncation,
    )?;
    if n_est > window {
        return Err(Error::WindowTooSmall { n: n_est, window });
    }

    // cross term 2 Re[conj(F h) F x] as a trig polynomial
    let degree = mset.support_bound;
    let cross_samples: Vec<(f64, f64)> = mset
        .grid
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let i2 = reference.interference[k] * reference.interference[k];
            let bx2 = mset.base[k] * mset.base[k];
            let bh2 = reference.base_h[k] * reference.base_h[k];
            (w, i2 - bx2 - bh2)
        })
        .collect();
    let cross = fit_trig_poly(&cross_samples, degree, tol.fit_residual)?;

    // the correlation c = h * x lives on a window determined by the known
    // reference support and the signal window
    let h0 = h.offset();
    let nh = h.len() as i64;
    let m = window as i64;
    let c_lo = (-h0 - nh + 1).max(-(degree as i64));
    let c_hi = (m - 1 - h0).min(degree as i64);
    if c_lo > c_hi {
        return Err(Error::WindowTooSmall { n: n_est, window });
    }
    let c_coeffs: Vec<Complex64> = (c_lo..=c_hi).map(|n| cross.coeff(n)).collect();
    let c_signal = ComplexSignal::new(c_lo, c_coeffs);

    // working nodes clear of the reference spectrum zeros
    let needed = 2 * window - 1;
    let dense = (8 * needed).max(64);
    let mut h_peak = 0.0f64;
    let node_set: Vec<f64> = (0..dense)
        .map(|j| -PI + TAU * j as f64 / dense as f64)
        .collect();
    for &w in &node_set {
        h_peak = h_peak.max(h.dtft(w).norm());
    }
    let floor = tol.reference_floor * h_peak.max(1e-300);
    let working: Vec<f64> = node_set
        .into_iter()
        .filter(|&w| h.dtft(w).norm() > floor)
        .collect();
    if working.len() < needed {
        return Err(Error::ReferenceSpectrumTooSparse {
            usable: working.len(),
            needed,
        });
    }

    let win_lo = -(window as i64 - 1);
    let win_hi = window as i64 - 1;
    let mut candidates: Vec<ComplexSignal> = Vec::new();

    // candidate 1: F x = F c / conj(F h) on the working nodes
    let samples1: Vec<(f64, Complex64)> = working
        .iter()
        .map(|&w| (w, c_signal.dtft(w) / h.dtft(w).conj()))
        .collect();
    if let Ok((cand, residual)) =
        fit_finite_signal(&samples1, win_lo, win_hi, tol.support_truncation)
    {
        if residual <= tol.fit_residual && !cand.is_zero() {
            candidates.push(cand);
        }
    }

    // candidate 2: the mirrored phase choice F = conj(F x) F h / conj(F h),
    // valid only when it also fits the window
    if let Some(first) = candidates.first().cloned() {
        let samples2: Vec<(f64, Complex64)> = working
            .iter()
            .map(|&w| {
                let fh = h.dtft(w);
                (w, first.dtft(w).conj() * fh / fh.conj())
            })
            .collect();
        if let Ok((cand, residual)) =
            fit_finite_signal(&samples2, win_lo, win_hi, tol.support_truncation)
        {
            if residual <= tol.fit_residual && !cand.is_zero() {
                candidates.push(cand);
            }
        }
    }

    // the two routes can coincide; keep one copy
    let mut unique: Vec<ComplexSignal> = Vec::new();
    for cand in candidates {
        if unique.iter().all(|u| !u.approx_eq(&cand, tol.equivalence)) {
            unique.push(cand);
        }
    }
    Ok(unique)
}

/// Resolves an unknown-reference measurement: enumerates the ambiguity
/// classes of both intensities and keeps every pair that reproduces the
/// interference channel, deduplicated up to common trivial ambiguity.
pub fn resolve_unknown_reference(
    mset: &MeasurementSet,
    n_x: usize,
    n_h: usize,
    tol: &Tolerances,
) -> Result<Vec<(ComplexSignal, ComplexSignal)>> {
    mset.validate()?;
    let reference = mset
        .reference
        .as_ref()
        .ok_or(Error::InvalidMeasurement("missing reference block"))?;
    if n_x == 0 || n_h == 0 {
        return Err(Error::EmptySignal);
    }

    let fit_intensity = |values: &[f64], n: usize| -> Result<TrigPoly> {
        let samples: Vec<(f64, f64)> = mset
            .grid
            .iter()
            .zip(values)
            .map(|(&w, &v)| (w, v * v))
            .collect();
        fit_trig_poly(&samples, n - 1, tol.fit_residual)
    };
    let a_x = fit_intensity(&mset.base, n_x)?;
    let a_h = fit_intensity(&reference.base_h, n_h)?;

    // hypothesis check: the zero sets of the two associated polynomials must
    // be disjoint
    if n_x > 1 && n_h > 1 {
        let roots_x = associated_polynomial(&a_x)?.roots()?;
        let roots_h = associated_polynomial(&a_h)?.roots()?;
        for rx in &roots_x {
            for rh in &roots_h {
                if (rx - rh).norm() <= tol.disjoint_zeros * (1.0 + rx.norm()) {
                    return Err(Error::SharedZeros);
                }
            }
        }
    }

    let reps_x = enumerate_ambiguities(&a_x, tol)?;
    let reps_h = enumerate_ambiguities(&a_h, tol)?;

    // measured cross term and the shift range its support admits
    let degree = mset.support_bound;
    let cross_samples: Vec<(f64, f64)> = mset
        .grid
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let i2 = reference.interference[k] * reference.interference[k];
            (
                w,
                i2 - mset.base[k] * mset.base[k] - reference.base_h[k] * reference.base_h[k],
            )
        })
        .collect();
    let cross = fit_trig_poly(&cross_samples, degree, tol.fit_residual)?;
    let span = cross.effective_degree(tol.support_truncation).unwrap_or(0) as i64;
    let m_lo = n_x as i64 - 1 - span;
    let m_hi = span - (n_h as i64) + 1;
    if m_lo > m_hi {
        return Err(Error::InconsistentMeasurements);
    }

    let inter_sq: Vec<f64> = reference.interference.iter().map(|v| v * v).collect();
    let match_scale = inter_sq.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let match_tol = tol.equivalence.max(tol.intensity_match * 10.0);

    // candidate grid: (x class, h class, h reflected?, relative shift)
    let shifts = (m_hi - m_lo + 1) as usize;
    let total = reps_x.len() * reps_h.len() * 2 * shifts;
    let survivors: Vec<(ComplexSignal, ComplexSignal)> = exec::map_indexed(total, |idx| {
        let mut rem = idx;
        let ix = rem % reps_x.len();
        rem /= reps_x.len();
        let ih = rem % reps_h.len();
        rem /= reps_h.len();
        let reflected = rem % 2 == 1;
        let m = m_lo + (rem / 2) as i64;

        let xc = &reps_x[ix];
        let hc = if reflected {
            reps_h[ih].conj_reflect()
        } else {
            reps_h[ih].clone()
        };
        // place the candidate so its first sample sits at index m
        let hc = hc.shift(m - hc.offset());
        test_pair(xc, &hc, &cross, &inter_sq, mset, match_tol * match_scale)
            .map(|h_solved| (xc.clone(), h_solved))
    })
    .into_iter()
    .flatten()
    .collect();

    let mut unique: Vec<(ComplexSignal, ComplexSignal)> = Vec::new();
    for pair in survivors {
        if unique
            .iter()
            .all(|u| !pairs_equivalent(u, &pair, tol.equivalence))
        {
            unique.push(pair);
        }
    }
    if unique.is_empty() {
        return Err(Error::InconsistentMeasurements);
    }
    Ok(unique)
}

/// Solves the relative rotation from the dominant cross-correlation
/// coefficient and verifies the pair against the interference samples.
fn test_pair(
    x: &ComplexSignal,
    h: &ComplexSignal,
    cross: &TrigPoly,
    inter_sq: &[f64],
    mset: &MeasurementSet,
    abs_tol: f64,
) -> Option<ComplexSignal> {
    // c[n] = sum_k conj(h[k]) x[k+n]
    let corr = |n: i64| -> Complex64 {
        let mut acc = Complex64::ZERO;
        for (j, hv) in h.coeffs().iter().enumerate() {
            let k = h.offset() + j as i64;
            acc += hv.conj() * x.value_at(k + n);
        }
        acc
    };

    // coefficients of the measured cross term, largest first
    let d = cross.degree() as i64;
    let mut order: Vec<i64> = (-d..=d).collect();
    order.sort_by(|a, b| cross.coeff(*b).norm().total_cmp(&cross.coeff(*a).norm()));

    let mut beta = None;
    for &n in order.iter().take(5) {
        let a = corr(n);
        let b = corr(-n).conj();
        // measured d[n] = e^{-i beta} c[n] + e^{i beta} conj(c[-n])
        let s = a + b;
        let t = Complex64::i() * (b - a);
        let det = s.re * t.im - t.re * s.im;
        if det.abs() < 1e-9 * (s.norm() + t.norm()).max(1e-300) {
            continue;
        }
        let rhs = cross.coeff(n);
        let cos_b = (rhs.re * t.im - t.re * rhs.im) / det;
        let sin_b = (s.re * rhs.im - rhs.re * s.im) / det;
        let r = (cos_b * cos_b + sin_b * sin_b).sqrt();
        if r < 1e-6 {
            continue;
        }
        beta = Some(sin_b.atan2(cos_b));
        break;
    }
    let beta = beta?;
    let h_rot = h.rotate(beta);

    let worst = mset
        .grid
        .iter()
        .zip(inter_sq)
        .map(|(&w, &target)| {
            let model = (x.dtft(w) + h_rot.dtft(w)).norm_sqr();
            (model - target).abs()
        })
        .fold(0.0f64, f64::max);
    (worst <= abs_tol).then_some(h_rot)
}

/// Common-trivial-ambiguity equivalence of signal pairs: one witness
/// (rotation, shift, reflection) must transport both components.
pub fn pairs_equivalent(
    a: &(ComplexSignal, ComplexSignal),
    b: &(ComplexSignal, ComplexSignal),
    rel_tol: f64,
) -> bool {
    for reflected in [false, true] {
        let (x1, h1) = if reflected {
            (a.0.conj_reflect(), a.1.conj_reflect())
        } else {
            (a.0.clone(), a.1.clone())
        };
        if x1.len() != b.0.len() || h1.len() != b.1.len() {
            continue;
        }
        let m = b.0.offset() - x1.offset();
        if b.1.offset() - h1.offset() != m {
            continue;
        }
        // rotation witness from the dominant coefficient of x
        let j = match x1
            .coeffs()
            .iter()
            .enumerate()
            .max_by(|p, q| p.1.norm().total_cmp(&q.1.norm()))
        {
            Some((j, _)) => j,
            None => continue,
        };
        let alpha = (b.0.coeffs()[j] * x1.coeffs()[j].conj()).arg();
        let x_moved = x1.shift(m).rotate(alpha);
        let h_moved = h1.shift(m).rotate(alpha);
        if x_moved.approx_eq(&b.0, rel_tol) && h_moved.approx_eq(&b.1, rel_tol) {
            return true;
        }
    }
    false
}

/// Round-trip trial configurations for the self-interference pipelines.
#[derive(Debug, Clone)]
pub enum TrialMode {
    Polarization { k: usize },
    TwoRotation { alpha1: f64, alpha2: f64 },
}

/// One simulate-then-reconstruct verification run.
#[derive(Debug, Clone)]
pub struct RoundTripConfig {
    pub mode: TrialMode,
    pub mu: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

/// Outcome of a round trip; serializes to the report interchange format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundTripReport {
    pub success: bool,
    pub rotation: Option<f64>,
    pub max_err: Option<f64>,
    pub n0: Option<i64>,
    pub mode: String,
    pub error: Option<String>,
}

impl RoundTripReport {
    pub fn failure(mode: &str, error: String) -> RoundTripReport {
        RoundTripReport {
            success: false,
            rotation: None,
            max_err: None,
            n0: None,
            mode: mode.to_string(),
            error: Some(error),
        }
    }
}

/// Rotation-only comparison: same support, and y matches e^{i alpha} x for
/// the alpha read off the dominant coefficient. Returns (alpha, max abs
/// coefficient deviation).
pub fn rotation_only_error(x: &ComplexSignal, y: &ComplexSignal) -> Option<(f64, f64)> {
    if x.is_zero() || y.is_zero() || x.offset() != y.offset() || x.len() != y.len() {
        return None;
    }
    let j = x
        .coeffs()
        .iter()
        .enumerate()
        .max_by(|p, q| p.1.norm().total_cmp(&q.1.norm()))?
        .0;
    let alpha = (y.coeffs()[j] * x.coeffs()[j].conj()).arg();
    let r = Complex64::from_polar(1.0, alpha);
    let err = x
        .coeffs()
        .iter()
        .zip(y.coeffs())
        .map(|(a, b)| (b - a * r).norm())
        .fold(0.0, f64::max);
    Some((alpha, err))
}

/// Simulates, optionally degrades, reconstructs, and scores one signal.
/// Failures come back as structured reports, never panics.
pub fn verify_round_trip(
    x: &ComplexSignal,
    config: &RoundTripConfig,
    tol: &Tolerances,
) -> RoundTripReport {
    let (mode_name, built, phase_mode) = match config.mode {
        TrialMode::Polarization { k } => (
            "polarization",
            polarization_set(x, k, config.mu),
            PhaseMode::Polarization,
        ),
        TrialMode::TwoRotation { alpha1, alpha2 } => (
            "two-rotation",
            two_rotation_set(x, alpha1, alpha2, config.mu),
            PhaseMode::TwoRotation,
        ),
    };
    let mset = match built {
        Ok(m) => m,
        Err(e) => return RoundTripReport::failure(mode_name, e.to_string()),
    };
    let mset = if config.noise_sigma > 0.0 {
        add_noise(&mset, config.noise_sigma, config.seed)
    } else {
        mset
    };
    match recover_self_interference(&mset, phase_mode, tol) {
        Ok(rec) => match rotation_only_error(x, &rec.signal) {
            Some((alpha, err)) => RoundTripReport {
                success: err <= tol.equivalence.max(1e-6),
                rotation: Some(alpha),
                max_err: Some(err),
                n0: Some(rec.signal.offset()),
                mode: mode_name.to_string(),
                error: None,
            },
            None => RoundTripReport {
                success: false,
                rotation: None,
                max_err: None,
                n0: Some(rec.signal.offset()),
                mode: mode_name.to_string(),
                error: Some("support mismatch".to_string()),
            },
        },
        Err(e) => RoundTripReport::failure(mode_name, e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::reference_set;
    use crate::synth::golden_mu;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn polarization_round_trip_with_offset() {
        let x = ComplexSignal::new(5, vec![c(1.0, 0.0), c(0.0, 1.0), c(-2.0, 0.0)]);
        let mset = polarization_set(&x, 3, golden_mu()).unwrap();
        let rec = recover_self_interference(&mset, PhaseMode::Polarization, &tol()).unwrap();
        assert_eq!(rec.signal.offset(), 5);
        let (_, err) = rotation_only_error(&x, &rec.signal).unwrap();
        assert!(err < 1e-8, "err = {err:.3e}");
        assert_eq!(rec.measurements_used, 8 * 3 - 4);
    }

    #[test]
    fn two_rotation_round_trip() {
        let x = ComplexSignal::new(
            -2,
            vec![c(0.8, 0.4), c(-0.3, 1.1), c(0.6, -0.9), c(1.0, 0.2)],
        );
        let mset = two_rotation_set(&x, 0.0, -PI / 2.0, golden_mu()).unwrap();
        let rec = recover_self_interference(&mset, PhaseMode::TwoRotation, &tol()).unwrap();
        assert_eq!(rec.signal.offset(), -2);
        let (_, err) = rotation_only_error(&x, &rec.signal).unwrap();
        assert!(err < 1e-8, "err = {err:.3e}");
    }

    #[test]
    fn impulse_round_trip() {
        let x = ComplexSignal::impulse(0);
        for mode in [PhaseMode::Polarization, PhaseMode::TwoRotation] {
            let mset = match mode {
                PhaseMode::Polarization => polarization_set(&x, 3, golden_mu()).unwrap(),
                PhaseMode::TwoRotation => {
                    two_rotation_set(&x, 0.0, -PI / 2.0, golden_mu()).unwrap()
                }
            };
            let rec = recover_self_interference(&mset, mode, &tol()).unwrap();
            let (_, err) = rotation_only_error(&x, &rec.signal).unwrap();
            assert!(err < 1e-10);
        }
    }

    #[test]
    fn rational_mu_is_rejected() {
        let x = ComplexSignal::new(0, vec![c(1.0, 0.0), c(0.4, 0.4), c(0.0, 1.0)]);
        let mset = polarization_set(&x, 3, TAU / 2.0).unwrap();
        assert!(matches!(
            recover_self_interference(&mset, PhaseMode::Polarization, &tol()),
            Err(Error::InadmissibleMu { .. })
        ));
    }

    #[test]
    fn known_reference_recovers_the_signal() {
        let x = ComplexSignal::new(0, vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let h = ComplexSignal::new(2, vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let mset = reference_set(&x, &h, true).unwrap();
        let cands = recover_known_reference(&mset, 2, &tol()).unwrap();
        assert!(!cands.is_empty() && cands.len() <= 2);
        assert!(
            cands.iter().any(|cand| cand.approx_eq(&x, 1e-6)),
            "candidates {cands:?}"
        );
    }

    #[test]
    fn self_reference_collapses_to_one_candidate() {
        let x = ComplexSignal::new(0, vec![c(1.0, 0.2), c(0.5, -0.8), c(-0.9, 0.4)]);
        let mset = reference_set(&x, &x, true).unwrap();
        let cands = recover_known_reference(&mset, 3, &tol()).unwrap();
        assert_eq!(cands.len(), 1);
    }

    #[test]
    fn symmetric_pair_yields_two_candidates() {
        // real symmetric signal and reference: the mirrored solution is a
        // shifted copy, in-window, so both candidates stay
        let x = ComplexSignal::new(0, vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        let h = ComplexSignal::new(-1, vec![c(1.0, 0.0)]);
        let mset = reference_set(&x, &h, true).unwrap();
        let cands = recover_known_reference(&mset, 5, &tol()).unwrap();
        assert_eq!(cands.len(), 2);
        assert!(cands.iter().any(|cand| cand.approx_eq(&x, 1e-6)));
        let shifted = x.shift(-4);
        assert!(cands.iter().any(|cand| cand.approx_eq(&shifted, 1e-6)));
    }

    #[test]
    fn sparse_reference_spectrum_is_flagged() {
        // reference with transform zeros on 62 of the 64 working nodes. The
        // nodes carry all 64th roots of unity, so the zero-laden polynomial
        // is (w^64 - 1) deflated by the two spared roots; synthetic division
        // keeps the coefficients tame where a direct arc product would not.
        let dense = 64usize;
        let node_root = |j: usize| {
            let w = -PI + TAU * j as f64 / dense as f64;
            Complex64::from_polar(1.0, -w)
        };
        let mut coeffs = vec![Complex64::ZERO; dense + 1]; // w^64 - 1, descending
        coeffs[0] = c(1.0, 0.0);
        coeffs[dense] = c(-1.0, 0.0);
        for spared in [node_root(0), node_root(1)] {
            let mut quotient = Vec::with_capacity(coeffs.len() - 1);
            let mut acc = Complex64::ZERO;
            for &a in &coeffs[..coeffs.len() - 1] {
                acc = acc * spared + a;
                quotient.push(acc);
            }
            coeffs = quotient;
        }
        coeffs.reverse(); // ascending in w = e^{-i omega}
        let h = ComplexSignal::new(2, coeffs);
        let x = ComplexSignal::new(0, vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let mset = reference_set(&x, &h, true).unwrap();
        assert!(matches!(
            recover_known_reference(&mset, 2, &tol()),
            Err(Error::ReferenceSpectrumTooSparse { .. })
        ));
    }

    #[test]
    fn window_too_small_is_flagged() {
        let x = ComplexSignal::new(0, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.7, 0.0)]);
        let h = ComplexSignal::new(4, vec![c(1.0, 0.0)]);
        let mset = reference_set(&x, &h, true).unwrap();
        assert!(matches!(
            recover_known_reference(&mset, 2, &tol()),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn unknown_reference_generic_pair() {
        let x = ComplexSignal::new(
            0,
            vec![c(0.9, 0.3), c(-0.5, 0.7), c(0.4, -0.6), c(1.1, 0.2)],
        );
        let h = ComplexSignal::new(0, vec![c(0.8, -0.4), c(0.3, 0.9), c(-0.7, 0.1)]);
        let mset = reference_set(&x, &h, false).unwrap();
        let pairs = resolve_unknown_reference(&mset, 4, 3, &tol()).unwrap();
        assert_eq!(pairs.len(), 1, "classes: {}", pairs.len());
        assert!(pairs_equivalent(&pairs[0], &(x, h), 1e-6));
    }

    #[test]
    fn unknown_reference_impulse_pair() {
        let x = ComplexSignal::impulse(0).rotate(0.6);
        let h = ComplexSignal::impulse(1).rotate(-1.1);
        let mset = reference_set(&x, &h, false).unwrap();
        let pairs = resolve_unknown_reference(&mset, 1, 1, &tol()).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!(pairs_equivalent(&pairs[0], &(x, h), 1e-6));
    }

    #[test]
    fn shared_zeros_violate_the_hypothesis() {
        // x and h share the transform zero at e^{-i w} = -1/2
        let shared = ComplexSignal::new(0, vec![c(0.5, 0.0), c(1.0, 0.0)]);
        let x = crate::synth::convolve(
            &shared,
            &ComplexSignal::new(0, vec![c(1.0, 0.0), c(0.3, 0.4)]),
        );
        let h = crate::synth::convolve(
            &shared,
            &ComplexSignal::new(0, vec![c(0.8, -0.2), c(0.1, 0.9)]),
        );
        let mset = reference_set(&x, &h, false).unwrap();
        assert!(matches!(
            resolve_unknown_reference(&mset, x.len(), h.len(), &tol()),
            Err(Error::SharedZeros)
        ));
    }

    #[test]
    fn round_trip_report_is_structured_on_failure() {
        let x = ComplexSignal::new(0, vec![c(1.0, 0.0), c(0.5, 0.5), c(0.0, 1.0)]);
        let config = RoundTripConfig {
            mode: TrialMode::Polarization { k: 3 },
            mu: TAU / 2.0, // rational: inadmissible for N = 3
            noise_sigma: 0.0,
            seed: 1,
        };
        let rep = verify_round_trip(&x, &config, &tol());
        assert!(!rep.success);
        assert!(rep.error.as_deref().unwrap_or("").contains("inadmissible"));
    }

    #[test]
    fn round_trip_is_deterministic() {
        let x = ComplexSignal::new(0, vec![c(1.0, 0.1), c(0.4, -0.8), c(0.6, 0.6)]);
        let config = RoundTripConfig {
            mode: TrialMode::Polarization { k: 3 },
            mu: golden_mu(),
            noise_sigma: 1e-6,
            seed: 42,
        };
        let a = verify_round_trip(&x, &config, &Tolerances::for_noise(1e-6));
        let b = verify_round_trip(&x, &config, &Tolerances::for_noise(1e-6));
        assert_eq!(a.success, b.success);
        assert_eq!(a.max_err, b.max_err);
    }
}
