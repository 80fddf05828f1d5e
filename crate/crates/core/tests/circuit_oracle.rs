//! Cross-checks of the FWHT statevector pipeline against a dense
//! matrix-chain oracle, plus the parity-permutation equivalence between the
//! two gate families.

use iqp_core::circuit::{CircuitInstance, GateFamily};
use iqp_core::l1_distance;
use num_complex::Complex64;

/// Pauli-Z eigenvalue on basis state y, qubit i.
fn eig_z(y: usize, i: usize) -> f64 {
    if (y >> i) & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Diagonal phase from the literal operator definitions: Z_{¬i} as the
/// product of Z eigenvalues over k ≠ i for family D, plain Z_i for family F.
fn oracle_phase(inst: &CircuitInstance, y: usize, family: GateFamily) -> f64 {
    let n = inst.n_qubits;
    let mut angle = 0.0;
    for (i, &theta) in inst.theta.iter().enumerate() {
        let factor: f64 = match family {
            GateFamily::F => eig_z(y, i),
            GateFamily::D => (0..n).filter(|&k| k != i).map(|k| eig_z(y, k)).product(),
        };
        angle += theta * factor;
    }
    for &(i, j, phi) in &inst.phi {
        angle += phi * eig_z(y, i) * eig_z(y, j);
    }
    angle
}

/// H^{⊗N} built by literal Kronecker products of the 2×2 Hadamard.
fn hadamard_matrix(n: usize) -> Vec<Vec<f64>> {
    let h = [[1.0, 1.0], [1.0, -1.0]];
    let s = 1.0 / 2.0f64.sqrt();
    let mut m = vec![vec![1.0]];
    for _ in 0..n {
        let dim = m.len();
        let mut next = vec![vec![0.0; 2 * dim]; 2 * dim];
        for (hi, hrow) in h.iter().enumerate() {
            for (hj, &hv) in hrow.iter().enumerate() {
                for a in 0..dim {
                    for b in 0..dim {
                        next[hi * dim + a][hj * dim + b] = hv * s * m[a][b];
                    }
                }
            }
        }
        m = next;
    }
    m
}

/// ψ = H^{⊗N}·U_diag·|+⟩^{⊗N} as an explicit matrix chain.
fn dense_output_state(inst: &CircuitInstance, family: GateFamily) -> Vec<Complex64> {
    let dim = 1usize << inst.n_qubits;
    let plus_amp = 1.0 / (dim as f64).sqrt();
    let after_diag: Vec<Complex64> = (0..dim)
        .map(|y| Complex64::from_polar(plus_amp, oracle_phase(inst, y, family)))
        .collect();
    let h = hadamard_matrix(inst.n_qubits);
    (0..dim)
        .map(|x| {
            (0..dim)
                .map(|y| after_diag[y] * h[x][y])
                .sum::<Complex64>()
        })
        .collect()
}

#[test]
fn transform_pipeline_matches_dense_oracle() {
    for (n, q, seed) in [(4usize, 0.7, 42u64), (4, 0.0, 7), (6, 1.0, 3), (6, 0.3, 19)] {
        let inst = CircuitInstance::sample(n, q, seed).unwrap();
        for family in [GateFamily::D, GateFamily::F] {
            let fast = inst.output_state(family).unwrap();
            let dense = dense_output_state(&inst, family);
            for (x, (a, b)) in fast.amplitudes().iter().zip(&dense).enumerate() {
                assert!(
                    (a - b).norm() < 1e-10,
                    "N = {n}, q = {q}, family {family:?}, amplitude {x}: {a} vs {b}"
                );
            }
        }
    }
}

#[test]
fn parity_permutation_relates_the_families() {
    // p_D(x) equals the parity permutation of r_F for every even N; both
    // sides here run through the FWHT pipeline with independent phase
    // conventions.
    for n in [4usize, 6, 8, 10] {
        for seed in 0..50u64 {
            let inst = CircuitInstance::sample(n, 0.4, 1000 * n as u64 + seed).unwrap();
            let p_d = inst.output_state(GateFamily::D).unwrap().probabilities();
            let r_f = inst.output_state(GateFamily::F).unwrap().probabilities();
            let permuted = r_f.parity_permute().unwrap();
            let max_diff = p_d
                .as_slice()
                .iter()
                .zip(permuted.as_slice())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(max_diff < 1e-10, "N = {n}, seed {seed}: max diff {max_diff}");
        }
    }
}

#[test]
fn parity_permutation_against_dense_oracle_small_n() {
    // At N ≤ 6 the D side additionally comes from the dense matrix oracle,
    // so the two sides of the theorem share no simulation code at all.
    for (n, seed) in [(4usize, 5u64), (6, 8)] {
        let inst = CircuitInstance::sample(n, 0.5, seed).unwrap();
        let dense_d = dense_output_state(&inst, GateFamily::D);
        let r_f = inst.output_state(GateFamily::F).unwrap().probabilities();
        let permuted = r_f.parity_permute().unwrap();
        for (x, amp) in dense_d.iter().enumerate() {
            let diff = (amp.norm_sqr() - permuted.as_slice()[x]).abs();
            assert!(diff < 1e-10, "N = {n}, x = {x}: diff {diff}");
        }
    }
}

#[test]
fn output_distributions_are_strictly_positive_for_generic_angles() {
    for seed in 0..10u64 {
        let inst = CircuitInstance::sample(8, 0.5, seed).unwrap();
        assert!(!inst.has_degenerate_angles());
        let p = inst.output_state(GateFamily::D).unwrap().probabilities();
        let min = p.as_slice().iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > 0.0, "seed {seed}: min probability {min}");
    }
}

#[test]
fn q_zero_family_f_is_the_analytic_product() {
    for seed in 0..10u64 {
        let inst = CircuitInstance::sample(6, 0.0, seed).unwrap();
        let pipeline = inst.output_state(GateFamily::F).unwrap().probabilities();
        let analytic = iqp_core::analytic_product_distribution(&inst.theta);
        assert!(l1_distance(&pipeline, &analytic).unwrap() < 1e-10);
    }
}
