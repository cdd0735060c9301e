//! Finitely supported complex signals, their transforms, and the trivial
//! ambiguity group (rotation, shift, conjugate reflection).
//!
//! A signal x is stored as a coefficient block together with the index of its
//! first sample. The canonical trimmed form keeps the first and last stored
//! coefficients nonzero, so the support length N is well defined and all the
//! N-dependent sample counts downstream are unambiguous.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A complex-valued signal with finite support.
///
/// The value at index `n` is `coeffs[n - offset]` inside the stored block and
/// zero outside. The zero signal is the empty block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SignalRecord", into = "SignalRecord")]
pub struct ComplexSignal {
    offset: i64,
    coeffs: Vec<Complex64>,
}

/// Interchange form of a signal: `{"offset": int, "coeffs": [[re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalRecord {
    pub offset: i64,
    pub coeffs: Vec<[f64; 2]>,
}

impl From<ComplexSignal> for SignalRecord {
    fn from(x: ComplexSignal) -> SignalRecord {
        SignalRecord {
            offset: x.offset,
            coeffs: x.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl TryFrom<SignalRecord> for ComplexSignal {
    type Error = Error;

    fn try_from(rec: SignalRecord) -> Result<ComplexSignal> {
        if rec.coeffs.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal("non-finite coefficient"));
        }
        Ok(ComplexSignal::new(
            rec.offset,
            rec.coeffs
                .into_iter()
                .map(|p| Complex64::new(p[0], p[1]))
                .collect(),
        ))
    }
}

impl ComplexSignal {
    /// Builds a signal in canonical trimmed form: exactly-zero coefficients at
    /// either end of the block are stripped and the offset adjusted.
    pub fn new(offset: i64, coeffs: Vec<Complex64>) -> Self {
        let mut lead = 0usize;
        while lead < coeffs.len() && coeffs[lead].norm() == 0.0 {
            lead += 1;
        }
        let mut tail = coeffs.len();
        while tail > lead && coeffs[tail - 1].norm() == 0.0 {
            tail -= 1;
        }
        if lead == tail {
            return ComplexSignal {
                offset: 0,
                coeffs: Vec::new(),
            };
        }
        ComplexSignal {
            offset: offset + lead as i64,
            coeffs: coeffs[lead..tail].to_vec(),
        }
    }

    pub fn zero() -> Self {
        ComplexSignal {
            offset: 0,
            coeffs: Vec::new(),
        }
    }

    /// Unit impulse at index `n`.
    pub fn impulse(n: i64) -> Self {
        ComplexSignal {
            offset: n,
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the first stored sample.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Support length N.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Value at absolute index `n` (zero outside the support).
    pub fn value_at(&self, n: i64) -> Complex64 {
        let j = n - self.offset;
        if j < 0 || j as usize >= self.coeffs.len() {
            Complex64::ZERO
        } else {
            self.coeffs[j as usize]
        }
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Squared Euclidean norm of the coefficients.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Discrete-time Fourier transform at `omega`: sum of x[n] e^{-i omega n}.
    pub fn dtft(&self, omega: f64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        // Horner over the block, then one twiddle for the offset.
        let w = Complex64::from_polar(1.0, -omega);
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc * Complex64::from_polar(1.0, -omega * self.offset as f64)
    }

    /// Autocorrelation a[n] = sum_k conj(x[k]) x[k+n], supported on
    /// {-N+1, ..., N-1}.
    pub fn autocorrelation(&self) -> Result<ComplexSignal> {
        if self.is_zero() {
            return Err(Error::EmptySignal);
        }
        let n = self.coeffs.len();
        let mut acf = vec![Complex64::ZERO; 2 * n - 1];
        for (k, xk) in self.coeffs.iter().enumerate() {
            for (m, xm) in self.coeffs.iter().enumerate() {
                // lag m - k lands at position m - k + (n - 1)
                acf[m + n - 1 - k] += xk.conj() * xm;
            }
        }
        Ok(ComplexSignal {
            offset: -(n as i64 - 1),
            coeffs: acf,
        })
    }

    /// Squared Fourier intensity |F x|^2 as a trigonometric polynomial.
    pub fn intensity(&self) -> Result<TrigPoly> {
        let acf = self.autocorrelation()?;
        Ok(TrigPoly::from_coeffs(acf.coeffs))
    }

    /// e^{i alpha} x[n].
    pub fn rotate(&self, alpha: f64) -> ComplexSignal {
        let r = Complex64::from_polar(1.0, alpha);
        ComplexSignal {
            offset: self.offset,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// x[n - m].
    pub fn shift(&self, m: i64) -> ComplexSignal {
        if self.is_zero() {
            return ComplexSignal::zero();
        }
        ComplexSignal {
            offset: self.offset + m,
            coeffs: self.coeffs.clone(),
        }
    }

    /// conj(x[-n]).
    pub fn conj_reflect(&self) -> ComplexSignal {
        if self.is_zero() {
            return ComplexSignal::zero();
        }
        let coeffs: Vec<Complex64> = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        ComplexSignal {
            offset: -(self.offset + self.coeffs.len() as i64 - 1),
            coeffs,
        }
    }

    /// e^{i mu n} x[n]; the phase factor uses the absolute index n.
    pub fn modulate(&self, mu: f64) -> ComplexSignal {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * Complex64::from_polar(1.0, mu * (self.offset + j as i64) as f64))
            .collect();
        ComplexSignal {
            offset: self.offset,
            coeffs,
        }
    }

    /// Strips end coefficients below `rel_tol` times the peak magnitude.
    pub fn trimmed(&self, rel_tol: f64) -> ComplexSignal {
        let scale = self.max_magnitude();
        if scale == 0.0 {
            return ComplexSignal::zero();
        }
        let thr = rel_tol * scale;
        let mut lead = 0usize;
        while lead < self.coeffs.len() && self.coeffs[lead].norm() <= thr {
            lead += 1;
        }
        let mut tail = self.coeffs.len();
        while tail > lead && self.coeffs[tail - 1].norm() <= thr {
            tail -= 1;
        }
        ComplexSignal::new(self.offset + lead as i64, self.coeffs[lead..tail].to_vec())
    }

    /// Canonical class representative: offset zero, first coefficient rotated
    /// to the positive real axis.
    pub fn canonical(&self) -> ComplexSignal {
        if self.is_zero() {
            return ComplexSignal::zero();
        }
        let alpha = -self.coeffs[0].arg();
        let mut out = self.rotate(alpha);
        out.offset = 0;
        out
    }

    /// Coefficient-wise comparison: same support, maximum deviation at most
    /// `rel_tol` times the larger peak magnitude.
    pub fn approx_eq(&self, other: &ComplexSignal, rel_tol: f64) -> bool {
        if self.offset != other.offset || self.coeffs.len() != other.coeffs.len() {
            return false;
        }
        let scale = self.max_magnitude().max(other.max_magnitude());
        if scale == 0.0 {
            return true;
        }
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .all(|(a, b)| (a - b).norm() <= rel_tol * scale)
    }
}

/// Witness of a trivial equivalence: `y = rotate(shift(x', m), alpha)` with
/// `x'` either `x` or its conjugate reflection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceWitness {
    pub rotation: f64,
    pub shift: i64,
    pub reflected: bool,
}

/// Tests whether `y` differs from `x` only by a trivial ambiguity and returns
/// the witness when it does.
///
/// The deviation is measured relative to the peak coefficient magnitude, and
/// the rotation is read off the largest-magnitude coefficient.
pub fn trivially_equivalent(
    x: &ComplexSignal,
    y: &ComplexSignal,
    rel_tol: f64,
) -> Option<EquivalenceWitness> {
    if x.is_zero() || y.is_zero() {
        return None;
    }
    if let Some((alpha, shift)) = match_up_to_rotation_and_shift(x, y, rel_tol) {
        return Some(EquivalenceWitness {
            rotation: alpha,
            shift,
            reflected: false,
        });
    }
    let xr = x.conj_reflect();
    match_up_to_rotation_and_shift(&xr, y, rel_tol).map(|(alpha, shift)| EquivalenceWitness {
        rotation: alpha,
        shift,
        reflected: true,
    })
}

fn match_up_to_rotation_and_shift(
    x: &ComplexSignal,
    y: &ComplexSignal,
    rel_tol: f64,
) -> Option<(f64, i64)> {
    if x.len() != y.len() {
        return None;
    }
    let shift = y.offset() - x.offset();
    let scale = x.max_magnitude().max(y.max_magnitude());
    let j = x
        .coeffs()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))?
        .0;
    let alpha = (y.coeffs()[j] * x.coeffs()[j].conj()).arg();
    let r = Complex64::from_polar(1.0, alpha);
    let ok = x
        .coeffs()
        .iter()
        .zip(y.coeffs())
        .all(|(a, b)| (b - a * r).norm() <= rel_tol * scale);
    ok.then_some((alpha, shift))
}

/// A trigonometric polynomial with Hermitian coefficients a[-n] = conj(a[n]),
/// hence real-valued on the unit circle. Holds autocorrelations and squared
/// intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    degree: usize,
    // coefficient a[n] lives at index n + degree
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    /// Builds from coefficients a[-d..=d] (odd length) and enforces the
    /// Hermitian symmetry by averaging mirror coefficients.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> TrigPoly {
        assert!(coeffs.len() % 2 == 1, "need coefficients for -d..=d");
        let degree = coeffs.len() / 2;
        let mut sym = coeffs.clone();
        for n in 0..=degree {
            let hi = degree + n;
            let lo = degree - n;
            let avg = 0.5 * (coeffs[hi] + coeffs[lo].conj());
            sym[hi] = avg;
            sym[lo] = avg.conj();
        }
        TrigPoly {
            degree,
            coeffs: sym,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient a[n], zero outside |n| <= degree.
    pub fn coeff(&self, n: i64) -> Complex64 {
        let d = self.degree as i64;
        if n < -d || n > d {
            Complex64::ZERO
        } else {
            self.coeffs[(n + d) as usize]
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Evaluates sum a[n] e^{-i omega n}; real by Hermitian symmetry.
    pub fn eval(&self, omega: f64) -> f64 {
        let d = self.degree as i64;
        let w = Complex64::from_polar(1.0, -omega);
        let mut acc = Complex64::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c;
        }
        (acc * Complex64::from_polar(1.0, -omega * (-d) as f64)).re
    }

    /// Largest |n| with |a[n]| above `rel_tol` times the peak coefficient,
    /// or None when every coefficient is below.
    pub fn effective_degree(&self, rel_tol: f64) -> Option<usize> {
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return None;
        }
        let thr = rel_tol * scale;
        (0..=self.degree)
            .rev()
            .find(|&n| self.coeff(n as i64).norm() > thr || self.coeff(-(n as i64)).norm() > thr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sig(offset: i64, vals: &[(f64, f64)]) -> ComplexSignal {
        ComplexSignal::new(offset, vals.iter().map(|&(r, i)| c(r, i)).collect())
    }

    #[test]
    fn trims_to_canonical_form() {
        let x = ComplexSignal::new(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(x.offset(), 3);
        assert_eq!(x.len(), 2);
        let z = ComplexSignal::new(7, vec![c(0.0, 0.0)]);
        assert!(z.is_zero());
        assert_eq!(z.offset(), 0);
    }

    #[test]
    fn dtft_examples() {
        let imp = ComplexSignal::impulse(0);
        assert!((imp.dtft(0.4) - c(1.0, 0.0)).norm() < 1e-15);

        let x = sig(0, &[(1.0, 0.0), (1.0, 0.0)]);
        assert!((x.dtft(0.0) - c(2.0, 0.0)).norm() < 1e-15);

        let y = sig(0, &[(1.0, 0.0), (0.0, 1.0)]);
        // 1 + i e^{-i pi/2} = 2
        assert!((y.dtft(PI / 2.0) - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn autocorrelation_examples() {
        let x = sig(0, &[(1.0, 0.0), (0.0, 1.0)]);
        let a = x.autocorrelation().unwrap();
        assert_eq!(a.offset(), -1);
        assert!((a.value_at(-1) - c(0.0, -1.0)).norm() < 1e-15);
        assert!((a.value_at(0) - c(2.0, 0.0)).norm() < 1e-15);
        assert!((a.value_at(1) - c(0.0, 1.0)).norm() < 1e-15);

        let imp = ComplexSignal::impulse(3);
        let ai = imp.autocorrelation().unwrap();
        assert_eq!(ai.offset(), 0);
        assert_eq!(ai.len(), 1);

        let ones = sig(0, &[(1.0, 0.0), (1.0, 0.0), (1.0, 0.0)]);
        let a3 = ones.autocorrelation().unwrap();
        let expect = [1.0, 2.0, 3.0, 2.0, 1.0];
        for (k, e) in expect.iter().enumerate() {
            assert!((a3.coeffs()[k] - c(*e, 0.0)).norm() < 1e-15);
        }

        assert_eq!(
            ComplexSignal::zero().autocorrelation(),
            Err(Error::EmptySignal)
        );
    }

    #[test]
    fn intensity_matches_dtft_magnitude() {
        let x = sig(0, &[(1.0, 0.0), (0.0, 1.0)]);
        let p = x.intensity().unwrap();
        assert!((p.eval(0.0) - 2.0).abs() < 1e-14);
        for &w in &[0.3, -1.1, 2.9] {
            assert!((p.eval(w) - x.dtft(w).norm_sqr()).abs() < 1e-12);
        }
        let two = sig(0, &[(1.0, 0.0), (1.0, 0.0)]);
        assert!(two.intensity().unwrap().eval(PI).abs() < 1e-14);
    }

    #[test]
    fn trivial_transforms() {
        let x = sig(0, &[(1.0, 0.0), (2.0, 0.0)]);
        let r = x.rotate(PI);
        assert!((r.coeffs()[0] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((r.coeffs()[1] - c(-2.0, 0.0)).norm() < 1e-15);

        let y = sig(0, &[(1.0, 0.0), (0.0, 1.0)]);
        let yr = y.conj_reflect();
        assert_eq!(yr.offset(), -1);
        assert!((yr.coeffs()[0] - c(0.0, -1.0)).norm() < 1e-15);
        assert!((yr.coeffs()[1] - c(1.0, 0.0)).norm() < 1e-15);

        let m = sig(0, &[(1.0, 0.0), (1.0, 0.0)]).modulate(PI);
        assert!((m.coeffs()[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((m.coeffs()[1] - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn modulation_shifts_the_transform() {
        let x = sig(2, &[(0.4, -0.3), (1.0, 0.2), (-0.7, 0.9)]);
        let mu = 0.83;
        let xm = x.modulate(mu);
        for &w in &[0.0, 0.7, -2.1] {
            assert!((xm.dtft(w) - x.dtft(w - mu)).norm() < 1e-12);
        }
    }

    #[test]
    fn equivalence_witnesses() {
        let x = sig(0, &[(1.0, 0.0), (2.0, 0.0)]);
        let y = x.shift(3).rotate(PI / 2.0);
        let w = trivially_equivalent(&x, &y, 1e-9).unwrap();
        assert!(!w.reflected);
        assert_eq!(w.shift, 3);
        assert!((w.rotation - PI / 2.0).abs() < 1e-12);

        let z = sig(0, &[(2.0, 0.0), (1.0, 0.0)]);
        let w = trivially_equivalent(&x, &z, 1e-9).unwrap();
        assert!(w.reflected);

        let q = sig(0, &[(1.0, 0.0), (3.0, 0.0)]);
        assert!(trivially_equivalent(&x, &q, 1e-9).is_none());
    }

    #[test]
    fn intensity_invariant_under_trivial_transforms() {
        let x = sig(-2, &[(0.9, 0.1), (0.2, -1.3), (-0.5, 0.4), (1.1, 0.6)]);
        let base = x.intensity().unwrap();
        for y in [
            x.rotate(1.234).shift(5),
            x.conj_reflect(),
            x.conj_reflect().rotate(-0.7).shift(-2),
        ] {
            let p = y.intensity().unwrap();
            for n in -3i64..=3 {
                assert!((p.coeff(n) - base.coeff(n)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn autocorrelation_is_hermitian_with_energy_at_zero() {
        let x = sig(1, &[(0.3, 0.8), (-1.2, 0.1), (0.0, -0.9)]);
        let a = x.autocorrelation().unwrap();
        for n in 0..3i64 {
            assert!((a.value_at(-n) - a.value_at(n).conj()).norm() < 1e-14);
        }
        assert!((a.value_at(0).re - x.energy()).abs() < 1e-14);
    }

    #[test]
    fn canonical_representative() {
        let x = sig(4, &[(0.0, 2.0), (1.0, 1.0)]);
        let canon = x.canonical();
        assert_eq!(canon.offset(), 0);
        assert!(canon.coeffs()[0].im.abs() < 1e-15);
        assert!(canon.coeffs()[0].re > 0.0);
        assert!(trivially_equivalent(&x, &canon, 1e-12).is_some());
    }

    #[test]
    fn record_round_trip() {
        let x = sig(-3, &[(1.5, -0.5), (0.0, 2.0)]);
        let rec = SignalRecord::from(x.clone());
        let back = ComplexSignal::try_from(rec).unwrap();
        assert_eq!(x, back);
    }
}
