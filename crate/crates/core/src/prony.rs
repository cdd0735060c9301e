//! Exponential-sum recovery from equispaced samples and the mapping of
//! recovered frequencies back to integer support indices.
//!
//! Given 2N samples f(k) = sum_j c_j e^{-i nu_j k} with distinct unimodular
//! nodes e^{-i nu_j}, the classical three-step method applies: solve the
//! length-N linear prediction system on the Hankel matrix of samples, root
//! the prediction polynomial to get the nodes, then solve a Vandermonde
//! system for the coefficients. A rank-revealing least-squares solve lets
//! sums with fewer than N genuine terms degrade gracefully.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::fit::AlgebraicPoly;
use crate::linalg;

/// One term of an exponential sum: frequency in (-pi, pi] and a nonzero
/// complex coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialTerm {
    pub frequency: f64,
    pub coefficient: Complex64,
}

/// A finite exponential sum, terms ordered by frequency.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExponentialSum {
    terms: Vec<ExponentialTerm>,
}

impl ExponentialSum {
    pub fn new(mut terms: Vec<ExponentialTerm>) -> ExponentialSum {
        terms.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        ExponentialSum { terms }
    }

    pub fn terms(&self) -> &[ExponentialTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// sum_j c_j e^{-i nu_j k}
    pub fn eval(&self, k: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * Complex64::from_polar(1.0, -t.frequency * k))
            .sum()
    }
}

/// Admissibility of the modulation step: true iff q*mu/(2*pi) stays at least
/// `tol` away from the integers for every q in 1..N. A failure means two
/// support indices at distance q alias to the same node e^{-i mu n}.
pub fn check_mu(mu: f64, n: usize, tol: f64) -> bool {
    for q in 1..n {
        let v = q as f64 * mu / TAU;
        if (v - v.round()).abs() <= tol {
            return false;
        }
    }
    true
}

/// Recovers an exponential sum with at most `n` terms from 2n equispaced
/// samples f(0), ..., f(2n-1).
pub fn prony_recover(samples: &[Complex64], n: usize, tol: &Tolerances) -> Result<ExponentialSum> {
    assert_eq!(samples.len(), 2 * n, "need exactly 2n samples");
    let scale = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(ExponentialSum::default());
    }

    // order selection off the numerical rank of the Hankel matrix
    let hankel = DMatrix::from_fn(n, n, |r, c| samples[r + c]);
    let order = linalg::rank(&hankel, 1e-10).min(n);
    if order == 0 {
        return Ok(ExponentialSum::default());
    }

    // linear prediction: sum_{j<m} q_j f(k+j) = -f(k+m) for all windows
    let rows = 2 * n - order;
    let a = DMatrix::from_fn(rows, order, |r, c| samples[r + c]);
    let b = DVector::from_fn(rows, |r, _| -samples[r + order]);
    let (q, _) = linalg::lstsq_rank(&a, &b, 1e-12)?;

    let mut poly_coeffs: Vec<Complex64> = q.iter().cloned().collect();
    poly_coeffs.push(Complex64::new(1.0, 0.0));
    let mut nodes = AlgebraicPoly::new(poly_coeffs).roots()?;
    // the model promises unimodular nodes; project the credible ones
    for z in nodes.iter_mut() {
        let m = z.norm();
        if (m - 1.0).abs() < 0.1 && m > 0.0 {
            *z /= m;
        }
    }

    // coefficients from the node Vandermonde over all samples
    let v = DMatrix::from_fn(2 * n, nodes.len(), |r, c| nodes[c].powu(r as u32));
    let f = DVector::from_column_slice(samples);
    let (coeffs, _) = linalg::lstsq_rank(&v, &f, 1e-12)?;

    let peak = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut terms: Vec<ExponentialTerm> = nodes
        .iter()
        .zip(coeffs.iter())
        .filter(|(_, c)| c.norm() > tol.coefficient_discard * peak)
        .map(|(z, c)| ExponentialTerm {
            frequency: node_frequency(*z),
            coefficient: *c,
        })
        .collect();
    terms.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
    let sum = ExponentialSum { terms };

    let residual = (0..2 * n)
        .map(|k| (sum.eval(k as f64) - samples[k]).norm())
        .fold(0.0, f64::max);
    if residual > tol.exponential_residual * scale {
        return Err(Error::NotExponentialSum { residual });
    }
    Ok(sum)
}

/// Frequency nu in (-pi, pi] of the node z = e^{-i nu}.
fn node_frequency(z: Complex64) -> f64 {
    let nu = -z.arg();
    if nu <= -std::f64::consts::PI {
        nu + TAU
    } else {
        nu
    }
}

/// Maps recovered frequencies nu_j = mu (n_j + n0) mod 2*pi back to integer
/// indices by lattice rounding over a bounded branch range, and returns the
/// support offset together with the coefficient block.
///
/// `extent` bounds the index window the caller expects (the support length
/// in the recovery pipelines); it sizes the branch range of the rounding.
pub fn frequencies_to_support(
    es: &ExponentialSum,
    mu: f64,
    tol: f64,
    extent: usize,
) -> Result<(i64, Vec<Complex64>)> {
    if es.is_empty() {
        return Ok((0, Vec::new()));
    }
    if mu == 0.0 {
        return Err(Error::FrequencyLatticeMismatch {
            nu: es.terms[0].frequency,
        });
    }
    let branches = (extent as f64 * mu.abs() / TAU).ceil() as i64 + 1;
    let mut indices = Vec::with_capacity(es.terms.len());
    for term in es.terms() {
        let mut best: Option<(f64, i64)> = None;
        for ell in -branches..=branches {
            let m = ((term.frequency + TAU * ell as f64) / mu).round() as i64;
            let dist = angular_distance(mu * m as f64, term.frequency);
            if best.is_none_or(|(d, _)| dist < d) {
                best = Some((dist, m));
            }
        }
        let (dist, m) = best.expect("nonempty branch range");
        if dist > tol {
            return Err(Error::FrequencyLatticeMismatch { nu: term.frequency });
        }
        indices.push(m);
    }
    let mut sorted = indices.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::FrequencyLatticeMismatch {
            nu: es.terms[0].frequency,
        });
    }
    let n0 = *sorted.first().expect("nonempty");
    let width = (sorted.last().unwrap() - n0) as usize + 1;
    let mut coeffs = vec![Complex64::ZERO; width];
    for (term, &m) in es.terms().iter().zip(&indices) {
        coeffs[(m - n0) as usize] = term.coefficient;
    }
    Ok((n0, coeffs))
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Solves for the coefficients directly when the support is known: the
/// frequencies mu*n are then fixed, so a single Vandermonde least-squares
/// solve replaces the full method.
pub fn solve_known_support(
    samples: &[Complex64],
    mu: f64,
    support: &[i64],
    tol: &Tolerances,
) -> Result<Vec<Complex64>> {
    assert!(!support.is_empty(), "support must be nonempty");
    assert!(
        samples.len() >= support.len(),
        "need at least |support| samples"
    );
    let nodes: Vec<Complex64> = support
        .iter()
        .map(|&m| Complex64::from_polar(1.0, -mu * m as f64))
        .collect();
    let v = DMatrix::from_fn(samples.len(), nodes.len(), |r, c| nodes[c].powu(r as u32));
    let svd = v.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let smin = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if smax == 0.0 || smin / smax < 1e-12 {
        return Err(Error::VandermondeNearSingular);
    }
    let f = DVector::from_column_slice(samples);
    let coeffs = svd.solve(&f, 1e-12 * smax).map_err(Error::LinearSolve)?;

    let scale = samples
        .iter()
        .map(|s| s.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let residual = (0..samples.len())
        .map(|k| {
            let model: Complex64 = nodes
                .iter()
                .zip(coeffs.iter())
                .map(|(z, c)| c * z.powu(k as u32))
                .sum();
            (model - samples[k]).norm()
        })
        .fold(0.0, f64::max);
    if residual > tol.exponential_residual * scale {
        return Err(Error::NotExponentialSum { residual });
    }
    Ok(coeffs.iter().cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn forward(terms: &[(f64, Complex64)], count: usize) -> Vec<Complex64> {
        (0..count)
            .map(|k| {
                terms
                    .iter()
                    .map(|&(nu, co)| co * Complex64::from_polar(1.0, -nu * k as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn single_term() {
        let samples = forward(&[(0.5, c(3.0, 0.0))], 2);
        let es = prony_recover(&samples, 1, &tol()).unwrap();
        assert_eq!(es.terms().len(), 1);
        assert!((es.terms()[0].frequency - 0.5).abs() < 1e-10);
        assert!((es.terms()[0].coefficient - c(3.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn zero_samples_give_empty_sum() {
        let samples = vec![Complex64::ZERO; 6];
        let es = prony_recover(&samples, 3, &tol()).unwrap();
        assert!(es.is_empty());
    }

    #[test]
    fn two_terms() {
        let truth = [(0.3, c(2.0, 0.0)), (1.1, c(1.0, 1.0))];
        let samples = forward(&truth, 4);
        let es = prony_recover(&samples, 2, &tol()).unwrap();
        assert_eq!(es.terms().len(), 2);
        assert!((es.terms()[0].frequency - 0.3).abs() < 1e-9);
        assert!((es.terms()[0].coefficient - c(2.0, 0.0)).norm() < 1e-9);
        assert!((es.terms()[1].frequency - 1.1).abs() < 1e-9);
        assert!((es.terms()[1].coefficient - c(1.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn fewer_genuine_terms_than_order() {
        let truth = [(0.4, c(1.5, -0.5))];
        let samples = forward(&truth, 8);
        let es = prony_recover(&samples, 4, &tol()).unwrap();
        assert_eq!(es.terms().len(), 1);
        assert!((es.terms()[0].frequency - 0.4).abs() < 1e-9);
    }

    #[test]
    fn random_round_trips() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 5, 9, 12] {
            for _ in 0..10 {
                let mut freqs: Vec<f64> = Vec::new();
                while freqs.len() < n {
                    let nu: f64 = rng.random_range(-3.0..3.0);
                    if freqs.iter().all(|f| (f - nu).abs() > 0.1) {
                        freqs.push(nu);
                    }
                }
                let truth: Vec<(f64, Complex64)> = freqs
                    .iter()
                    .map(|&nu| {
                        (
                            nu,
                            Complex64::from_polar(
                                rng.random_range(0.3..2.0),
                                rng.random_range(-3.0..3.0),
                            ),
                        )
                    })
                    .collect();
                let samples = forward(&truth, 2 * n);
                let es = prony_recover(&samples, n, &tol()).unwrap();
                assert_eq!(es.terms().len(), n);
                let mut sorted = truth.clone();
                sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
                for (got, want) in es.terms().iter().zip(&sorted) {
                    assert!((got.frequency - want.0).abs() < 1e-6);
                    assert!((got.coefficient - want.1).norm() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn order_mismatch_is_detected() {
        let truth = [(0.3, c(2.0, 0.0)), (1.1, c(1.0, 1.0))];
        let samples = forward(&truth, 2);
        // order 1 cannot reproduce a two-term sum
        assert!(matches!(
            prony_recover(&samples, 1, &tol()),
            Err(Error::NotExponentialSum { .. })
        ));
    }

    #[test]
    fn check_mu_examples() {
        assert!(!check_mu(TAU / 3.0, 4, 1e-6));
        assert!(check_mu(TAU * (5.0f64.sqrt() - 1.0) / 2.0, 12, 1e-6));
        assert!(check_mu(std::f64::consts::PI, 2, 1e-6));
    }

    #[test]
    fn check_mu_failure_gives_an_aliasing_witness() {
        let tol = 1e-6;
        let mu = TAU * 2.0 / 5.0 + 1e-8; // nearly rational with q = 5
        let n = 7;
        assert!(!check_mu(mu, n, tol));
        let q = (1..n)
            .find(|&q| {
                let v = q as f64 * mu / TAU;
                (v - v.round()).abs() <= tol
            })
            .unwrap();
        // indices 0 and q collide on the node lattice
        let z0 = Complex64::from_polar(1.0, 0.0);
        let zq = Complex64::from_polar(1.0, -mu * q as f64);
        assert!((z0 - zq).norm() <= TAU * tol * 1.01);
    }

    #[test]
    fn support_mapping() {
        let mu = TAU * (5.0f64.sqrt() - 1.0) / 2.0;
        let es = ExponentialSum::new(vec![ExponentialTerm {
            frequency: 0.0,
            coefficient: c(1.0, 2.0),
        }]);
        let (n0, coeffs) = frequencies_to_support(&es, mu, 1e-6, 1).unwrap();
        assert_eq!(n0, 0);
        assert_eq!(coeffs.len(), 1);

        // support {2, 3}
        let terms: Vec<ExponentialTerm> = [2i64, 3]
            .iter()
            .map(|&m| ExponentialTerm {
                frequency: wrap(mu * m as f64),
                coefficient: c(m as f64, 0.0),
            })
            .collect();
        let es = ExponentialSum::new(terms);
        let (n0, coeffs) = frequencies_to_support(&es, mu, 1e-6, 2).unwrap();
        assert_eq!(n0, 2);
        assert_eq!(coeffs.len(), 2);
        assert!((coeffs[0] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((coeffs[1] - c(3.0, 0.0)).norm() < 1e-12);

        // frequency off the lattice
        let es = ExponentialSum::new(vec![ExponentialTerm {
            frequency: wrap(mu * 0.5),
            coefficient: c(1.0, 0.0),
        }]);
        assert!(matches!(
            frequencies_to_support(&es, mu, 1e-6, 2),
            Err(Error::FrequencyLatticeMismatch { .. })
        ));
    }

    fn wrap(a: f64) -> f64 {
        let mut v = a.rem_euclid(TAU);
        if v > std::f64::consts::PI {
            v -= TAU;
        }
        v
    }

    #[test]
    fn known_support_agrees_with_prony() {
        let mu = TAU * (5.0f64.sqrt() - 1.0) / 2.0;
        let support = [0i64, 1];
        let truth: Vec<(f64, Complex64)> = support
            .iter()
            .map(|&m| (wrap(mu * m as f64), c(1.0 + m as f64, -0.5)))
            .collect();
        let samples = forward(&truth, 4);
        let direct = solve_known_support(&samples, mu, &support, &tol()).unwrap();
        let es = prony_recover(&samples, 2, &tol()).unwrap();
        let (n0, coeffs) = frequencies_to_support(&es, mu, 1e-6, 2).unwrap();
        assert_eq!(n0, 0);
        for (a, b) in direct.iter().zip(&coeffs) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn known_support_edge_cases() {
        let tolerances = tol();
        let zeros = vec![Complex64::ZERO; 4];
        let coeffs = solve_known_support(&zeros, 1.234, &[0, 1], &tolerances).unwrap();
        assert!(coeffs.iter().all(|c| c.norm() < 1e-12));

        // model mismatch: one known index cannot explain a two-term sum
        let truth = [(0.3, c(2.0, 0.0)), (1.1, c(1.0, 1.0))];
        let samples = forward(&truth, 4);
        assert!(matches!(
            solve_known_support(&samples, 0.3, &[1], &tolerances),
            Err(Error::NotExponentialSum { .. })
        ));

        // aliased support indices make the Vandermonde singular
        let mu = TAU / 3.0;
        let samples = forward(&[(0.0, c(1.0, 0.0))], 6);
        assert!(matches!(
            solve_known_support(&samples, mu, &[0, 3], &tolerances),
            Err(Error::VandermondeNearSingular)
        ));
    }
}
