//! Certified approximation bounds for truncated parent Hamiltonians and the
//! structure of the q = 0 spectra.

use iqp_core::circuit::{CircuitInstance, GateFamily, ProbDist};
use iqp_core::hamiltonian::{find_truncation_threshold, l1_distance, CouplingSpectrum};
use iqp_core::transform::fwht;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const L1_BOUND_FACTOR: f64 = 2.0 * (std::f64::consts::E - 1.0);

fn circuit_distribution(n: usize, q: f64, seed: u64) -> ProbDist {
    CircuitInstance::sample(n, q, seed)
        .unwrap()
        .output_state(GateFamily::D)
        .unwrap()
        .probabilities()
}

/// Gibbs renormalization of p·e^{shift}.
fn exponent_shifted(p: &ProbDist, shift: &[f64]) -> ProbDist {
    let probs: Vec<f64> = p
        .as_slice()
        .iter()
        .zip(shift)
        .map(|(&pi, &d)| pi * d.exp())
        .collect();
    ProbDist::new(probs).unwrap()
}

#[test]
fn bounded_exponent_perturbations_keep_l1_small() {
    // A perturbation with max_x |H − H̃| = ε < 1 moves the renormalized
    // Gibbs distribution by at most 2(e−1)ε in L1.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for n in [4usize, 6, 8] {
        let p = circuit_distribution(n, 0.5, n as u64);
        let dim = 1usize << n;
        for &target_eps in &[0.5, 0.1, 0.01] {
            // Random coefficient perturbation scaled to the target exponent
            // error measured directly in x-space.
            let u: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let shift_raw = fwht(&u).unwrap();
            let max_abs = shift_raw.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let shift: Vec<f64> = shift_raw
                .iter()
                .map(|v| v * target_eps / max_abs)
                .collect();
            let eps_actual = shift.iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert!(eps_actual < 1.0);
            let perturbed = exponent_shifted(&p, &shift);
            let l1 = l1_distance(&perturbed, &p).unwrap();
            assert!(
                l1 <= L1_BOUND_FACTOR * eps_actual,
                "N = {n}, eps = {eps_actual}: L1 = {l1}"
            );
        }
    }
}

#[test]
fn coefficient_truncation_at_scaled_epsilon_obeys_the_l1_bound() {
    for n in [6usize, 8, 10] {
        for seed in 0..5u64 {
            let p = circuit_distribution(n, 0.3, 70 + seed);
            let spectrum = CouplingSpectrum::reconstruct(&p).unwrap();
            for &eps in &[0.1, 0.01, 0.001] {
                let delta = eps / (1usize << n) as f64;
                let truncated = spectrum.truncated(delta);
                let l1 = l1_distance(&truncated.distribution(), &p).unwrap();
                assert!(
                    l1 <= L1_BOUND_FACTOR * eps,
                    "N = {n}, seed {seed}, eps {eps}: L1 = {l1}"
                );
            }
        }
    }
}

#[test]
fn multiplicative_noise_bounds_coefficient_error() {
    // (1/c)·p < p̃ < c·p elementwise implies |J(y) − J̃(y)| < log c away
    // from y = 0.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in [4usize, 6, 8] {
        let p = circuit_distribution(n, 0.6, 30 + n as u64);
        let spectrum = CouplingSpectrum::reconstruct(&p).unwrap();
        for &c in &[1.1f64, 2.0] {
            let half_log = c.ln() / 2.0;
            let shift: Vec<f64> = (0..p.len()).map(|_| rng.gen_range(-half_log..=half_log)).collect();
            let noisy = exponent_shifted(&p, &shift);
            // Renormalization keeps the ratio within [1/c, c].
            for (a, b) in noisy.as_slice().iter().zip(p.as_slice()) {
                let ratio = a / b;
                assert!(ratio > 1.0 / c && ratio < c, "ratio {ratio} escapes [{}, {c}]", 1.0 / c);
            }
            let noisy_spectrum = CouplingSpectrum::reconstruct(&noisy).unwrap();
            let max_shift = spectrum.coefficients()[1..]
                .iter()
                .zip(&noisy_spectrum.coefficients()[1..])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(max_shift < c.ln(), "N = {n}, c = {c}: coefficient shift {max_shift}");
        }
    }
}

#[test]
fn reconstruction_and_gibbs_form_are_mutual_inverses() {
    let p = circuit_distribution(8, 0.4, 12);
    let spectrum = CouplingSpectrum::reconstruct(&p).unwrap();

    // Distribution side: exact roundtrip.
    let back = spectrum.distribution();
    assert!(l1_distance(&back, &p).unwrap() < 1e-10);

    // Spectrum side: coefficients recovered, including the normalization
    // constant at y = 0 (the source spectrum came from a distribution).
    let again = CouplingSpectrum::reconstruct(&back).unwrap();
    let max_diff = spectrum
        .coefficients()
        .iter()
        .zip(again.coefficients())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(max_diff < 1e-10, "coefficient drift {max_diff}");
}

#[test]
fn q_zero_family_d_spectra_live_on_coweight_one_masks() {
    for n in [6usize, 8, 10] {
        for seed in 0..3u64 {
            let inst = CircuitInstance::sample(n, 0.0, 500 + seed).unwrap();
            assert!(!inst.has_degenerate_angles());
            let p = inst.output_state(GateFamily::D).unwrap().probabilities();
            let spectrum = CouplingSpectrum::reconstruct(&p).unwrap();
            for (y, &j) in spectrum.coefficients().iter().enumerate().skip(1) {
                let weight = y.count_ones() as usize;
                if weight == n - 1 {
                    continue;
                }
                assert!(
                    j.abs() < 1e-10,
                    "N = {n}, seed {seed}: mask {y} (weight {weight}) carries {j:e}"
                );
            }
            let profile = spectrum.weight_profile();
            assert!(profile[n - 1] > 0.0);
            assert_eq!(spectrum.support_size(), n);
        }
    }
}

#[test]
fn threshold_search_result_verifies_independently() {
    let p = circuit_distribution(10, 0.5, 77);
    let eps = 1e-3;
    let result = find_truncation_threshold(&p, eps).unwrap();
    assert!(!result.saturated);
    // Recompute from scratch at the returned threshold.
    let spectrum = CouplingSpectrum::reconstruct(&p).unwrap();
    let redone = spectrum.truncated(result.delta).distribution();
    let l1 = l1_distance(&redone, &p).unwrap();
    assert!(l1 < eps, "recomputed L1 {l1} at delta {}", result.delta);
    assert!((l1 - result.l1_error).abs() < 1e-12);
    // The search keeps the largest passing threshold: nudging δ up by the
    // bracket tolerance must break the target.
    let above = spectrum
        .truncated(result.delta * (1.0 + 2.0 * 1e-3))
        .distribution();
    assert!(l1_distance(&above, &p).unwrap() >= eps || result.saturated);
}

#[test]
fn coupling_sum_grows_with_gate_density() {
    let seed = 5;
    let low = CouplingSpectrum::reconstruct(&circuit_distribution(12, 0.0, seed)).unwrap();
    let high = CouplingSpectrum::reconstruct(&circuit_distribution(12, 1.0, seed)).unwrap();
    assert!(
        high.coupling_l1() > 10.0 * low.coupling_l1(),
        "q = 1 sum {} vs q = 0 sum {}",
        high.coupling_l1(),
        low.coupling_l1()
    );
}
