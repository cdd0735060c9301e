//! Property tests for the algebraic invariants the pipelines rely on.

use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

use interfero_core::phase::polarize;
use interfero_core::prony::{frequencies_to_support, prony_recover};
use interfero_core::signal::{trivially_equivalent, ComplexSignal};
use interfero_core::synth::random_signal_seeded;
use interfero_core::Tolerances;

fn signal_strategy(max_n: usize) -> impl Strategy<Value = ComplexSignal> {
    (any::<u64>(), 1..=max_n, -4i64..=4)
        .prop_map(|(seed, n, off)| random_signal_seeded(seed, n, (off, off)))
}

proptest! {
    #[test]
    fn intensity_is_invariant_under_trivial_transforms(
        x in signal_strategy(7),
        alpha in -PI..PI,
        shift in -5i64..5,
    ) {
        let base = x.intensity().unwrap();
        let transformed = [
            x.rotate(alpha).shift(shift),
            x.conj_reflect(),
            x.conj_reflect().rotate(alpha).shift(shift),
        ];
        for y in transformed {
            let p = y.intensity().unwrap();
            let d = base.degree() as i64;
            for n in -d..=d {
                prop_assert!((p.coeff(n) - base.coeff(n)).norm() < 1e-12 * (1.0 + base.max_abs_coeff()));
            }
        }
    }

    #[test]
    fn autocorrelation_symmetry_and_energy(x in signal_strategy(8)) {
        let a = x.autocorrelation().unwrap();
        let n = x.len() as i64;
        for k in 0..n {
            prop_assert!((a.value_at(-k) - a.value_at(k).conj()).norm() < 1e-12);
        }
        prop_assert!((a.value_at(0).re - x.energy()).abs() < 1e-12 * (1.0 + x.energy()));
    }

    #[test]
    fn modulation_shifts_the_transform(
        x in signal_strategy(6),
        mu in -3.0f64..3.0,
        omega in -PI..PI,
    ) {
        let lhs = x.modulate(mu).dtft(omega);
        let rhs = x.dtft(omega - mu);
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn equivalence_is_reflexive_symmetric_and_transport_invariant(
        x in signal_strategy(6),
        alpha in -PI..PI,
        shift in -4i64..4,
        reflect in any::<bool>(),
    ) {
        prop_assert!(trivially_equivalent(&x, &x, 1e-9).is_some());
        let mut y = x.rotate(alpha).shift(shift);
        if reflect {
            y = y.conj_reflect();
        }
        prop_assert!(trivially_equivalent(&x, &y, 1e-9).is_some());
        prop_assert!(trivially_equivalent(&y, &x, 1e-9).is_some());
    }

    #[test]
    fn polarization_identity_is_exact(
        m1 in 0.0f64..10.0,
        m2 in 0.0f64..10.0,
        p1 in -PI..PI,
        p2 in -PI..PI,
        k in 3usize..=8,
    ) {
        let z1 = Complex64::from_polar(m1, p1);
        let z2 = Complex64::from_polar(m2, p2);
        let values: Vec<f64> = (0..k)
            .map(|j| (z1 + Complex64::from_polar(1.0, -TAU * j as f64 / k as f64) * z2).norm())
            .collect();
        let got = polarize(&values, k).unwrap();
        prop_assert!((got - z1.conj() * z2).norm() <= 1e-12);
    }

    #[test]
    fn support_length_is_read_off_the_intensity(x in signal_strategy(8)) {
        let degree_bound = 10usize;
        let grid: Vec<f64> = (0..(2 * degree_bound + 1))
            .map(|k| -PI + TAU * k as f64 / (2 * degree_bound + 1) as f64)
            .collect();
        let samples: Vec<(f64, f64)> = grid
            .iter()
            .map(|&w| (w, x.dtft(w).norm_sqr()))
            .collect();
        let n = interfero_core::fit::estimate_support_length(&samples, degree_bound, 1e-8).unwrap();
        prop_assert_eq!(n, x.len());
    }

    #[test]
    fn prony_round_trips_on_lattice_sums(
        seed in any::<u64>(),
        n in 1usize..=6,
        n0 in -3i64..=3,
    ) {
        let mu = interfero_core::synth::golden_mu();
        let x = random_signal_seeded(seed, n, (n0, n0));
        let samples: Vec<Complex64> = (0..2 * n)
            .map(|k| {
                (0..x.len())
                    .map(|j| {
                        let m = x.offset() + j as i64;
                        x.coeffs()[j]
                            * Complex64::from_polar(1.0, -mu * m as f64 * k as f64)
                    })
                    .sum()
            })
            .collect();
        let es = prony_recover(&samples, n, &Tolerances::default()).unwrap();
        let (got_n0, coeffs) = frequencies_to_support(&es, mu, 1e-6, n).unwrap();
        prop_assert_eq!(got_n0, x.offset());
        prop_assert_eq!(coeffs.len(), x.len());
        for (a, b) in coeffs.iter().zip(x.coeffs()) {
            prop_assert!((a - b).norm() < 1e-6);
        }
    }
}

#[test]
fn enumeration_contains_the_source_class() {
    let tol = Tolerances::default();
    for seed in 0..30u64 {
        let n = 2 + (seed % 5) as usize;
        let x = random_signal_seeded(seed, n, (0, 0));
        let a = x.intensity().unwrap();
        let reps = interfero_core::ambiguity::enumerate_ambiguities(&a, &tol).unwrap();
        assert!(reps.len() <= 1 << n.saturating_sub(2));
        assert!(
            reps.iter()
                .any(|r| trivially_equivalent(&x, r, 1e-6).is_some()),
            "seed {seed}: source class missing"
        );
        for r in &reps {
            let p = r.intensity().unwrap();
            let d = a.degree() as i64;
            for m in -d..=d {
                assert!((p.coeff(m) - a.coeff(m)).norm() <= 1e-8 * a.max_abs_coeff());
            }
        }
    }
}
