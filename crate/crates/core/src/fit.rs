//! Trigonometric-polynomial fitting, support-length estimation, and algebraic
//! polynomial root finding.
//!
//! A trigonometric polynomial of degree d is determined by 2d+1 samples at
//! distinct nodes modulo 2*pi; with more samples the fit is least squares.
//! Root finding uses the Aberth-Ehrlich simultaneous iteration with Newton
//! polishing, which is what the zero-flip enumeration downstream leans on.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg;
use crate::signal::{ComplexSignal, TrigPoly};

/// Number of distinct sample nodes modulo 2*pi.
fn distinct_nodes(omegas: &[f64]) -> usize {
    let mut wrapped: Vec<f64> = omegas
        .iter()
        .map(|w| {
            let mut v = w.rem_euclid(TAU);
            if v >= TAU {
                v -= TAU;
            }
            v
        })
        .collect();
    wrapped.sort_by(f64::total_cmp);
    if wrapped.is_empty() {
        return 0;
    }
    let mut count = 1usize;
    for pair in wrapped.windows(2) {
        if pair[1] - pair[0] > 1e-12 {
            count += 1;
        }
    }
    // first and last may coincide across the wrap-around
    if count > 1 && (wrapped[0] + TAU - wrapped[wrapped.len() - 1]) <= 1e-12 {
        count -= 1;
    }
    count
}

fn design_matrix(omegas: &[f64], lo: i64, hi: i64) -> DMatrix<Complex64> {
    let cols = (hi - lo + 1) as usize;
    DMatrix::from_fn(omegas.len(), cols, |r, c| {
        Complex64::from_polar(1.0, -omegas[r] * (lo + c as i64) as f64)
    })
}

/// Fits a Hermitian trigonometric polynomial of the given degree to real
/// samples `(omega, value)`.
///
/// Needs at least 2*degree+1 samples at distinct nodes; the fit is exact
/// interpolation at that count and least squares beyond it. The relative
/// residual at the sample nodes must stay within `rel_tol`.
pub fn fit_trig_poly(samples: &[(f64, f64)], degree: usize, rel_tol: f64) -> Result<TrigPoly> {
    let needed = 2 * degree + 1;
    if samples.len() < needed {
        return Err(Error::SingularInterpolation);
    }
    let omegas: Vec<f64> = samples.iter().map(|s| s.0).collect();
    if distinct_nodes(&omegas) < needed {
        return Err(Error::SingularInterpolation);
    }
    let a = design_matrix(&omegas, -(degree as i64), degree as i64);
    let b = DVector::from_iterator(
        samples.len(),
        samples.iter().map(|s| Complex64::new(s.1, 0.0)),
    );
    let x = linalg::lstsq(&a, &b, 1e-12).map_err(|_| Error::SingularInterpolation)?;
    let poly = TrigPoly::from_coeffs(x.iter().cloned().collect());

    let scale = samples
        .iter()
        .map(|s| s.1.abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    let residual = samples
        .iter()
        .map(|&(w, v)| (poly.eval(w) - v).abs())
        .fold(0.0, f64::max);
    if residual > rel_tol * scale {
        return Err(Error::DegreeTooSmall { residual });
    }
    Ok(poly)
}

/// Fits a finitely supported complex signal on the index window `lo..=hi`
/// from samples of its transform. Returns the trimmed signal together with
/// the relative residual at the sample nodes; the caller decides whether the
/// residual certifies the window.
pub fn fit_finite_signal(
    samples: &[(f64, Complex64)],
    lo: i64,
    hi: i64,
    trim_tol: f64,
) -> Result<(ComplexSignal, f64)> {
    let cols = (hi - lo + 1).max(0) as usize;
    if cols == 0 {
        return Err(Error::SingularInterpolation);
    }
    if samples.len() < cols {
        return Err(Error::SingularInterpolation);
    }
    let omegas: Vec<f64> = samples.iter().map(|s| s.0).collect();
    if distinct_nodes(&omegas) < cols {
        return Err(Error::SingularInterpolation);
    }
    let a = design_matrix(&omegas, lo, hi);
    let b = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let x = linalg::lstsq(&a, &b, 1e-12)?;
    let raw = ComplexSignal::new(lo, x.iter().cloned().collect());

    let scale = samples
        .iter()
        .map(|s| s.1.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let residual = samples
        .iter()
        .map(|&(w, v)| (raw.dtft(w) - v).norm())
        .fold(0.0, f64::max)
        / scale;
    Ok((raw.trimmed(trim_tol), residual))
}

/// Reads the support length N off sampled intensity values: fit at
/// `degree_bound`, then N = 1 + (largest |n| with a coefficient above
/// `rel_tol` times the peak).
pub fn estimate_support_length(
    samples: &[(f64, f64)],
    degree_bound: usize,
    rel_tol: f64,
) -> Result<usize> {
    let poly = fit_trig_poly(samples, degree_bound, 1.0)?;
    match poly.effective_degree(rel_tol) {
        Some(d) => Ok(d + 1),
        None => Err(Error::ZeroIntensity),
    }
}

/// An algebraic polynomial with complex coefficients, ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicPoly {
    coeffs: Vec<Complex64>,
}

impl AlgebraicPoly {
    /// Builds from ascending coefficients, trimming a numerically zero
    /// leading coefficient.
    pub fn new(coeffs: Vec<Complex64>) -> AlgebraicPoly {
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut hi = coeffs.len();
        while hi > 1 && coeffs[hi - 1].norm() <= 1e-14 * scale {
            hi -= 1;
        }
        AlgebraicPoly {
            coeffs: coeffs[..hi].to_vec(),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::ZERO;
        let mut dp = Complex64::ZERO;
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// All roots with multiplicity, via Aberth-Ehrlich iteration plus Newton
    /// polishing. Zero roots are split off exactly beforehand.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.degree() == 0 {
            return Ok(Vec::new());
        }
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        // roots at the origin: strip low-order zero coefficients
        let mut low = 0usize;
        while low < self.coeffs.len() - 1 && self.coeffs[low].norm() <= 1e-14 * scale {
            low += 1;
        }
        let mut roots = vec![Complex64::ZERO; low];
        let reduced = AlgebraicPoly::new(self.coeffs[low..].to_vec());
        match reduced.degree() {
            0 => {}
            1 => roots.push(-reduced.coeffs[0] / reduced.coeffs[1]),
            2 => roots.extend(quadratic_roots(
                reduced.coeffs[0],
                reduced.coeffs[1],
                reduced.coeffs[2],
            )),
            _ => roots.extend(reduced.aberth()?),
        }
        Ok(roots)
    }

    fn aberth(&self) -> Result<Vec<Complex64>> {
        const MAX_ITER: usize = 400;
        let d = self.degree();
        let lead = self.coeffs[d];
        let radius = 1.0
            + self.coeffs[..d]
                .iter()
                .map(|c| (c / lead).norm())
                .fold(0.0, f64::max);
        let mut z: Vec<Complex64> = (0..d)
            .map(|k| Complex64::from_polar(0.5 * radius, TAU * k as f64 / d as f64 + 0.4))
            .collect();

        let res_scale = |w: Complex64| -> f64 {
            self.coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c.norm() * w.norm().powi(j as i32))
                .sum::<f64>()
                .max(1e-300)
        };

        let mut converged = false;
        for _ in 0..MAX_ITER {
            let mut max_step = 0.0f64;
            for i in 0..d {
                let (p, dp) = self.eval_with_derivative(z[i]);
                if p.norm() <= 1e-15 * res_scale(z[i]) {
                    continue;
                }
                let w = if dp.norm() == 0.0 {
                    Complex64::new(1e-8, 1e-8)
                } else {
                    p / dp
                };
                let mut s = Complex64::ZERO;
                for j in 0..d {
                    if j != i {
                        let diff = z[i] - z[j];
                        if diff.norm() > 1e-300 {
                            s += Complex64::new(1.0, 0.0) / diff;
                        }
                    }
                }
                let denom = Complex64::new(1.0, 0.0) - w * s;
                let step = if denom.norm() < 1e-300 { w } else { w / denom };
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
            if max_step < 1e-14 {
                converged = true;
                break;
            }
            if z.iter()
                .all(|&zi| self.eval(zi).norm() <= 1e-12 * res_scale(zi))
            {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::RootFindingFailed { max_iter: MAX_ITER });
        }

        // Newton polishing; stalls harmlessly on multiple roots.
        for zi in z.iter_mut() {
            for _ in 0..4 {
                let (p, dp) = self.eval_with_derivative(*zi);
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                if step.norm() <= 1e-16 * (1.0 + zi.norm()) {
                    break;
                }
                *zi -= step;
            }
        }

        for &zi in &z {
            if self.eval(zi).norm() > 1e-8 * res_scale(zi) {
                return Err(Error::RootFindingFailed { max_iter: MAX_ITER });
            }
        }
        Ok(z)
    }
}

fn quadratic_roots(c0: Complex64, c1: Complex64, c2: Complex64) -> [Complex64; 2] {
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    // pick the sign that avoids cancellation in -b -+ sqrt(disc)
    let q = if (c1 + disc).norm() >= (c1 - disc).norm() {
        -0.5 * (c1 + disc)
    } else {
        -0.5 * (c1 - disc)
    };
    if q.norm() == 0.0 {
        [Complex64::ZERO, Complex64::ZERO]
    } else {
        [q / c2, c0 / q]
    }
}
