//! Zero-pair factorization of the autocorrelation and enumeration of all
//! non-trivial solutions of the plain (interference-free) problem.
//!
//! Lifting the intensity F a to the algebraic polynomial
//! p(z) = sum_n a[n-(N-1)] z^n turns the nonnegativity of F a into the root
//! structure p exploits: roots come in reciprocal-conjugate pairs
//! (gamma, 1/conj(gamma)), with unit-circle roots self-paired at even
//! multiplicity. Choosing one member per pair fixes a solution up to trivial
//! ambiguity, so a support length N admits at most 2^(N-2) non-trivially
//! different signals.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::exec;
use crate::fit::AlgebraicPoly;
use crate::signal::{trivially_equivalent, ComplexSignal, TrigPoly};

/// Lift of an intensity to its associated algebraic polynomial: the degree
/// 2(N-1) polynomial with p(e^{-i w}) = e^{-i w (N-1)} F a(w).
pub fn associated_polynomial(a: &TrigPoly) -> Result<AlgebraicPoly> {
    let d = a.degree() as i64;
    let scale = a.max_abs_coeff();
    if scale == 0.0 || a.coeff(d).norm() <= 1e-12 * scale {
        return Err(Error::UntrimmedIntensity);
    }
    let coeffs = (-d..=d).map(|n| a.coeff(n)).collect();
    Ok(AlgebraicPoly::new(coeffs))
}

/// The zero pairs of an associated polynomial plus the data needed to build
/// any solution with the same intensity.
#[derive(Debug, Clone)]
pub struct AmbiguityCatalog {
    zero_pairs: Vec<(Complex64, Complex64)>,
    unit_circle_zeros: Vec<Complex64>,
    scale: f64,
    origin_multiplicity: usize,
    a0: f64,
}

impl AmbiguityCatalog {
    /// Factors the intensity: finds the roots of the associated polynomial,
    /// pairs each non-unimodular root gamma with 1/conj(gamma), and halves
    /// the multiplicity of unit-circle roots.
    pub fn from_intensity(a: &TrigPoly, tol: &Tolerances) -> Result<AmbiguityCatalog> {
        let a0 = a.coeff(0).re;
        if a.degree() == 0 {
            if a0 <= 0.0 {
                return Err(Error::NotAnIntensity { min_value: a0 });
            }
            return Ok(AmbiguityCatalog {
                zero_pairs: Vec::new(),
                unit_circle_zeros: Vec::new(),
                scale: a0.sqrt(),
                origin_multiplicity: 0,
                a0,
            });
        }
        let p = associated_polynomial(a)?;
        let roots = p.roots()?;

        let mut origin = 0usize;
        let mut unit: Vec<Complex64> = Vec::new();
        let mut inside: Vec<Complex64> = Vec::new();
        let mut outside: Vec<Complex64> = Vec::new();
        for r in roots {
            let m = r.norm();
            if m <= 1e-12 {
                origin += 1;
            } else if (m - 1.0).abs() <= tol.unimodular {
                unit.push(r);
            } else if m < 1.0 {
                inside.push(r);
            } else {
                outside.push(r);
            }
        }

        // unit-circle zeros of a nonnegative polynomial have even
        // multiplicity; pair nearest neighbours and keep one per pair
        if !unit.len().is_multiple_of(2) {
            return Err(Error::RootPairing("odd unit-circle multiplicity"));
        }
        let mut unit_halved = Vec::with_capacity(unit.len() / 2);
        while let Some(u) = unit.pop() {
            let (j, _) = unit
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - u).norm().total_cmp(&(b.1 - u).norm()))
                .ok_or(Error::RootPairing("odd unit-circle multiplicity"))?;
            let v = unit.swap_remove(j);
            let mid = 0.5 * (u + v);
            let proj = if mid.norm() == 0.0 {
                u
            } else {
                mid / mid.norm()
            };
            unit_halved.push(proj);
        }

        if inside.len() != outside.len() {
            return Err(Error::RootPairing("unbalanced reciprocal pairs"));
        }
        let mut zero_pairs = Vec::with_capacity(inside.len());
        for g in inside {
            let target = 1.0 / g.conj();
            let (j, best) = outside
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - target).norm().total_cmp(&(b.1 - target).norm()))
                .ok_or(Error::RootPairing("missing reciprocal partner"))?;
            if (best - target).norm() > 1e-6 * (1.0 + target.norm()) {
                return Err(Error::RootPairing("missing reciprocal partner"));
            }
            let partner = outside.swap_remove(j);
            zero_pairs.push((g, partner));
        }
        zero_pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));

        let mut catalog = AmbiguityCatalog {
            zero_pairs,
            unit_circle_zeros: unit_halved,
            scale: 0.0,
            origin_multiplicity: origin,
            a0,
        };
        let base = catalog.expand_selection(0);
        let norm_sq: f64 = base.iter().map(|c| c.norm_sqr()).sum();
        if norm_sq <= 0.0 || a0 <= 0.0 {
            return Err(Error::NotAnIntensity { min_value: a0 });
        }
        catalog.scale = (a0 / norm_sq).sqrt();
        Ok(catalog)
    }

    pub fn num_pairs(&self) -> usize {
        self.zero_pairs.len()
    }

    pub fn zero_pairs(&self) -> &[(Complex64, Complex64)] {
        &self.zero_pairs
    }

    pub fn unit_circle_zeros(&self) -> &[Complex64] {
        &self.unit_circle_zeros
    }

    /// |C| normalization of the baseline (all-inside) selection.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn origin_multiplicity(&self) -> usize {
        self.origin_multiplicity
    }

    fn expand_selection(&self, selection: u64) -> Vec<Complex64> {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        let mut mul_root = |r: Complex64| {
            let mut next = vec![Complex64::ZERO; coeffs.len() + 1];
            for (j, &cj) in coeffs.iter().enumerate() {
                next[j + 1] += cj;
                next[j] -= cj * r;
            }
            coeffs = next;
        };
        for (j, pair) in self.zero_pairs.iter().enumerate() {
            let r = if selection >> j & 1 == 1 {
                pair.1
            } else {
                pair.0
            };
            mul_root(r);
        }
        for &u in &self.unit_circle_zeros {
            mul_root(u);
        }
        coeffs
    }

    /// Builds the signal whose transform has the selected pair members plus
    /// all unit-circle roots as zeros; bit j of `selection` flips pair j.
    /// The magnitude normalization matches the source intensity at lag zero.
    pub fn flip_candidate(&self, selection: u64) -> ComplexSignal {
        let e = self.expand_selection(selection);
        let norm_sq: f64 = e.iter().map(|c| c.norm_sqr()).sum();
        let c = if norm_sq > 0.0 {
            (self.a0 / norm_sq).sqrt()
        } else {
            0.0
        };
        ComplexSignal::new(0, e.into_iter().map(|v| v * c).collect())
    }
}

/// Enumerates one canonical representative per non-trivial equivalence class
/// of signals sharing the intensity `a`.
///
/// Flipping every pair mirrors the whole zero set, which is the conjugate
/// reflection; complementary selections therefore collapse into one class and
/// only half the masks are walked. Candidates are deduplicated under trivial
/// equivalence and each survivor is verified against `a` coefficient-wise.
pub fn enumerate_ambiguities(a: &TrigPoly, tol: &Tolerances) -> Result<Vec<ComplexSignal>> {
    let n = a.degree() + 1;
    if n > tol.enumeration_cap {
        return Err(Error::SupportTooLarge {
            n,
            cap: tol.enumeration_cap,
        });
    }

    // nonnegativity on a dense grid
    let grid_len = 256 + 64 * a.degree();
    let max_val = (0..grid_len)
        .map(|k| a.eval(std::f64::consts::TAU * k as f64 / grid_len as f64))
        .fold(0.0f64, f64::max);
    let min_val = (0..grid_len)
        .map(|k| a.eval(std::f64::consts::TAU * k as f64 / grid_len as f64))
        .fold(f64::INFINITY, f64::min);
    if max_val <= 0.0 || min_val < -1e-9 * max_val {
        return Err(Error::NotAnIntensity { min_value: min_val });
    }

    let catalog = AmbiguityCatalog::from_intensity(a, tol)?;
    let pairs = catalog.num_pairs();
    let half_count: u64 = if pairs == 0 { 1 } else { 1 << (pairs - 1) };

    // pin pair 0 unflipped; its flip is reached through the complement class.
    // Each class is stored as the lex-smaller of its two canonical variants
    // (itself and its conjugate reflection), so duplicates carry nearly
    // identical coefficient vectors and land adjacent after sorting.
    let mut keyed: Vec<(Vec<f64>, ComplexSignal)> = exec::map_indexed(half_count as usize, |i| {
        let mask = (i as u64) << 1;
        let cand = catalog.flip_candidate(mask).canonical();
        let mirrored = cand.conj_reflect().canonical();
        let key_of = |s: &ComplexSignal| -> Vec<f64> {
            s.coeffs().iter().flat_map(|c| [c.re, c.im]).collect()
        };
        let ka = key_of(&cand);
        let kb = key_of(&mirrored);
        if lex_le(&ka, &kb) {
            (ka, cand)
        } else {
            (kb, mirrored)
        }
    });
    keyed.sort_by(|a, b| lex_cmp(&a.0, &b.0));

    // windowed merge over the sort order: representatives whose leading
    // coefficients are too far apart cannot be equivalent
    let scale_abs = catalog.a0.sqrt().max(1e-300);
    let window = 2.0 * tol.equivalence * scale_abs;
    let mut reps: Vec<ComplexSignal> = Vec::new();
    for (_, cand) in keyed {
        let dup = reps
            .iter()
            .rev()
            .take_while(|r| (r.coeffs()[0].re - cand.coeffs()[0].re).abs() <= window)
            .any(|r| {
                r.approx_eq(&cand, tol.equivalence)
                    || trivially_equivalent(r, &cand, tol.equivalence).is_some()
            });
        if !dup {
            reps.push(cand);
        }
    }

    let scale = a.max_abs_coeff();
    for rep in &reps {
        let p = rep.intensity()?;
        let mut err = 0.0f64;
        for m in -(a.degree() as i64)..=(a.degree() as i64) {
            err = err.max((p.coeff(m) - a.coeff(m)).norm());
        }
        if err > tol.intensity_match * scale {
            return Err(Error::EnumerationMismatch { err });
        }
    }
    Ok(reps)
}

fn lex_le(a: &[f64], b: &[f64]) -> bool {
    lex_cmp(a, b) != std::cmp::Ordering::Greater
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let c = x.total_cmp(y);
        if c != std::cmp::Ordering::Equal {
            return c;
        }
    }
    a.len().cmp(&b.len())
}
