//! Transform invariants: involution, Parseval, linearity, and equivalence
//! with the direct O(4^N) summation.

use iqp_core::transform::{fwht, fwht_inverse};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vector(n_qubits: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..1usize << n_qubits).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn direct_walsh(v: &[f64]) -> Vec<f64> {
    (0..v.len())
        .map(|y| {
            v.iter()
                .enumerate()
                .map(|(x, &f)| if (x & y).count_ones() % 2 == 0 { f } else { -f })
                .sum()
        })
        .collect()
}

#[test]
fn involution_up_to_dimension_factor() {
    for n in 2..=10usize {
        let v = random_vector(n, n as u64);
        let twice = fwht(&fwht(&v).unwrap()).unwrap();
        let dim = (1usize << n) as f64;
        for (x, (&a, &b)) in twice.iter().zip(&v).enumerate() {
            let err = (a - dim * b).abs() / (dim * b.abs()).max(1e-30);
            assert!(err < 1e-12, "N = {n}, index {x}: relative error {err}");
        }
    }
}

#[test]
fn parseval_identity() {
    for n in 2..=10usize {
        let v = random_vector(n, 100 + n as u64);
        let w = fwht(&v).unwrap();
        let lhs: f64 = w.iter().map(|x| x * x).sum();
        let rhs: f64 = (1usize << n) as f64 * v.iter().map(|x| x * x).sum::<f64>();
        assert!((lhs - rhs).abs() / rhs < 1e-10, "N = {n}: {lhs} vs {rhs}");
    }
}

#[test]
fn equivalence_with_direct_sum_up_to_eight_qubits() {
    for n in 1..=8usize {
        let v = random_vector(n, 200 + n as u64);
        let fast = fwht(&v).unwrap();
        let slow = direct_walsh(&v);
        let scale: f64 = slow.iter().map(|x| x.abs()).fold(1e-30, f64::max);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() / scale < 1e-10, "N = {n}: {a} vs {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_roundtrip(seed in any::<u64>()) {
        let v = random_vector(4, seed);
        let back = fwht_inverse(&fwht(&v).unwrap()).unwrap();
        let scale: f64 = v.iter().map(|x| x.abs()).fold(1e-30, f64::max);
        for (a, b) in v.iter().zip(&back) {
            prop_assert!((a - b).abs() / scale < 1e-12);
        }
    }

    #[test]
    fn linearity(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let u = random_vector(5, seed);
        let v = random_vector(5, seed.wrapping_add(1));
        let combined: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let lhs = fwht(&combined).unwrap();
        let fu = fwht(&u).unwrap();
        let fv = fwht(&v).unwrap();
        let scale: f64 = lhs.iter().map(|x| x.abs()).fold(1.0, f64::max);
        for (k, l) in lhs.iter().enumerate() {
            let r = a * fu[k] + b * fv[k];
            prop_assert!((l - r).abs() / scale < 1e-12);
        }
    }
}
