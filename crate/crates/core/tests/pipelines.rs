//! End-to-end pipeline checks across support lengths and modes.

use std::f64::consts::PI;

use interfero_core::measurement::{polarization_set, reference_set, two_rotation_set};
use interfero_core::phase::PhaseMode;
use interfero_core::recover::{
    pairs_equivalent, recover_known_reference, recover_self_interference,
    resolve_unknown_reference, rotation_only_error,
};
use interfero_core::synth::{golden_mu, random_signal_seeded};
use interfero_core::Tolerances;

#[test]
fn self_interference_round_trips_across_sizes() {
    let tol = Tolerances::default();
    for n in 2..=10usize {
        for trial in 0..6u64 {
            let x = random_signal_seeded(1000 * n as u64 + trial, n, (-3, 3));

            let pol = polarization_set(&x, 3, golden_mu()).unwrap();
            let rec = recover_self_interference(&pol, PhaseMode::Polarization, &tol)
                .unwrap_or_else(|e| panic!("polarization n={n} trial={trial}: {e}"));
            let (_, err) = rotation_only_error(&x, &rec.signal).expect("same support");
            assert!(err <= 1e-6, "polarization n={n} err={err:.2e}");
            assert_eq!(rec.measurements_used, 8 * n - 4);

            let two = two_rotation_set(&x, 0.0, -PI / 2.0, golden_mu()).unwrap();
            let rec = recover_self_interference(&two, PhaseMode::TwoRotation, &tol)
                .unwrap_or_else(|e| panic!("two-rotation n={n} trial={trial}: {e}"));
            let (_, err) = rotation_only_error(&x, &rec.signal).expect("same support");
            assert!(err <= 1e-6, "two-rotation n={n} err={err:.2e}");
            assert_eq!(rec.measurements_used, 3 * (2 * n - 1));
        }
    }
}

#[test]
fn polarization_recovery_is_rotation_only() {
    let tol = Tolerances::default();
    for trial in 0..20u64 {
        let n = 2 + (trial % 6) as usize;
        let x = random_signal_seeded(7_000 + trial, n, (-2, 2));
        let mset = polarization_set(&x, 4, golden_mu()).unwrap();
        let rec = recover_self_interference(&mset, PhaseMode::Polarization, &tol).unwrap();
        let w = interfero_core::trivially_equivalent(&x, &rec.signal, 1e-6).expect("equivalent");
        assert_eq!(w.shift, 0);
        assert!(!w.reflected);
    }
}

#[test]
fn known_reference_contains_the_truth() {
    let tol = Tolerances::default();
    for trial in 0..25u64 {
        let m = 3 + (trial % 4) as usize; // window
        let n = 1 + (trial % m as u64) as usize;
        let x = random_signal_seeded(40_000 + trial, n, (0, (m - n) as i64));
        let h = random_signal_seeded(
            50_000 + trial,
            1 + (trial % 3) as usize,
            (m as i64, m as i64),
        );
        let mset = reference_set(&x, &h, true).unwrap();
        let cands = recover_known_reference(&mset, m, &tol)
            .unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        assert!(cands.len() <= 2);
        assert!(
            cands.iter().any(|c| c.approx_eq(&x, 1e-6)),
            "trial {trial}: truth missing"
        );
    }
}

#[test]
fn unknown_reference_is_unique_under_disjoint_zeros() {
    let tol = Tolerances::default();
    let mut done = 0u64;
    let mut seed = 0u64;
    while done < 15 {
        seed += 1;
        let n_x = 2 + (seed % 4) as usize;
        let n_h = 2 + (seed % 3) as usize;
        let x = random_signal_seeded(90_000 + seed, n_x, (-1, 1));
        let h = random_signal_seeded(91_000 + seed, n_h, (-1, 1));
        let mset = reference_set(&x, &h, false).unwrap();
        match resolve_unknown_reference(&mset, n_x, n_h, &tol) {
            Ok(pairs) => {
                assert_eq!(pairs.len(), 1, "seed {seed}");
                assert!(pairs_equivalent(&pairs[0], &(x, h), 1e-6), "seed {seed}");
                // the surviving pair reproduces all three measured intensities
                let (x_hat, h_hat) = &pairs[0];
                let r = mset.reference.as_ref().unwrap();
                let scale = r.interference.iter().map(|v| v * v).fold(0.0f64, f64::max);
                for (k, &w) in mset.grid.iter().enumerate() {
                    let bx = x_hat.dtft(w).norm_sqr();
                    let bh = h_hat.dtft(w).norm_sqr();
                    let bi = (x_hat.dtft(w) + h_hat.dtft(w)).norm_sqr();
                    assert!((bx - mset.base[k] * mset.base[k]).abs() <= 1e-8 * scale);
                    assert!((bh - r.base_h[k] * r.base_h[k]).abs() <= 1e-8 * scale);
                    assert!((bi - r.interference[k] * r.interference[k]).abs() <= 1e-8 * scale);
                }
                done += 1;
            }
            Err(interfero_core::Error::SharedZeros) => continue, // resample
            Err(e) => panic!("seed {seed}: {e}"),
        }
    }
}
