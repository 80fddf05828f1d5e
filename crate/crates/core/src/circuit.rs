//! Random gate-density-q IQP instances and their exact output states.
//!
//! An instance fixes single-qubit angles θ_i and a sparse set of two-qubit
//! couplings φ_ij, each coupling switched on independently with probability
//! q. Two diagonal gate families share those parameters:
//!
//! * family D uses `Z_{¬i} = ∏_{k≠i} Z_k` phase terms and produces the
//!   distribution p(x),
//! * family F uses the conventional single-qubit `Z_i` terms and produces
//!   r(x).
//!
//! For even N the two distributions are related by a parity permutation:
//! p(x) = r(x) on even-parity x and p(x) = r(x̄) otherwise, with x̄ the
//! bitwise complement. Output states are computed exactly via one complex
//! Walsh–Hadamard transform of the phase vector rather than gate-by-gate
//! simulation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::transform::{fwht_in_place, n_qubits_of_len};

/// Hard upper bound on the qubit count an instance may carry.
pub const MAX_QUBITS: usize = 26;

/// Default cap on statevector allocation (2^22 complex doubles = 64 MiB).
pub const DEFAULT_QUBIT_CAP: usize = 22;

/// Which diagonal gate family generates the state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateFamily {
    /// `exp[i Σ θ_i Z_{¬i}]·exp[i Σ φ_ij Z_i Z_j]`; output distribution p(x).
    D,
    /// `exp[i Σ θ_i Z_i]·exp[i Σ φ_ij Z_i Z_j]`; output distribution r(x).
    F,
}

/// One random IQP instance: qubit count, gate density, angles and couplings.
///
/// Serializes to the canonical JSON exchange format
/// `{n_qubits, q, seed, theta: [...], phi: [[i, j, value], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitInstance {
    pub n_qubits: usize,
    pub q: f64,
    pub seed: u64,
    pub theta: Vec<f64>,
    /// Couplings that survived the density gate, keyed by ordered pairs i < j.
    /// Absent pair = coupling off.
    pub phi: Vec<(usize, usize, f64)>,
}

impl CircuitInstance {
    /// Draw a random instance.
    ///
    /// θ_i are i.i.d. uniform on [−π, π]. For each pair i < j (lexicographic
    /// order) a gating variable q̃ ~ U[0,1) and a candidate angle
    /// φ̃ ~ U[−π, π] are drawn — both always, so instances at the same seed
    /// share randomness across different q — and the coupling is stored iff
    /// q̃ < q. The stream is ChaCha8 seeded with `seed`, making instances
    /// bit-reproducible across platforms.
    pub fn sample(n_qubits: usize, q: f64, seed: u64) -> Result<Self> {
        if n_qubits % 2 != 0 {
            return Err(Error::OddQubitCount { n: n_qubits });
        }
        if !(2..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCountOutOfRange { n: n_qubits, min: 2, max: MAX_QUBITS });
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::GateDensityOutOfRange { q });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta: Vec<f64> = (0..n_qubits).map(|_| rng.gen_range(-PI..=PI)).collect();
        let mut phi = Vec::new();
        for i in 0..n_qubits {
            for j in (i + 1)..n_qubits {
                let gate: f64 = rng.gen();
                let candidate = rng.gen_range(-PI..=PI);
                if gate < q {
                    phi.push((i, j, candidate));
                }
            }
        }
        Ok(Self { n_qubits, q, seed, theta, phi })
    }

    /// True if any θ_i sits exactly on {0, ±π/2, ±π}, where single outcome
    /// probabilities vanish and log p(x) is ill-defined downstream.
    pub fn has_degenerate_angles(&self) -> bool {
        self.theta
            .iter()
            .any(|&t| t == 0.0 || t.abs() == PI || t.abs() == PI / 2.0)
    }

    /// Eigenphase of the diagonal gate on basis state |y⟩.
    ///
    /// Family F: `Σ_i θ_i ζ_i(y) + Σ_{i<j} φ_ij ζ_i(y) ζ_j(y)` with
    /// ζ_i(y) = 1 − 2 y_i. Family D replaces the single-qubit term by
    /// `Σ_i θ_i (−1)^{Σ_k y_k} ζ_i(y)`, the eigenvalue of Z_{¬i}.
    pub fn phase(&self, y: usize, family: GateFamily) -> f64 {
        debug_assert!(y < (1usize << self.n_qubits));
        let single: f64 = self
            .theta
            .iter()
            .enumerate()
            .map(|(i, &t)| t * zeta(y, i))
            .sum();
        let single = match family {
            GateFamily::F => single,
            GateFamily::D => {
                if y.count_ones() % 2 == 1 {
                    -single
                } else {
                    single
                }
            }
        };
        let pairwise: f64 = self
            .phi
            .iter()
            .map(|&(i, j, p)| p * zeta(y, i) * zeta(y, j))
            .sum();
        single + pairwise
    }

    /// Exact output state `ψ(x) = 2^{−N} Σ_y (−1)^{x·y} e^{i·phase(y)}`,
    /// one complex FWHT over the phase vector. Capped at
    /// [`DEFAULT_QUBIT_CAP`] qubits; see [`Self::output_state_capped`].
    pub fn output_state(&self, family: GateFamily) -> Result<Statevector> {
        self.output_state_capped(family, DEFAULT_QUBIT_CAP)
    }

    /// As [`Self::output_state`] with an explicit allocation cap (≤ 26).
    pub fn output_state_capped(&self, family: GateFamily, cap: usize) -> Result<Statevector> {
        let cap = cap.min(MAX_QUBITS);
        if self.n_qubits > cap {
            return Err(Error::QubitCapExceeded { n: self.n_qubits, cap });
        }
        let dim = 1usize << self.n_qubits;
        let mut amplitudes: Vec<Complex64> = (0..dim)
            .map(|y| Complex64::from_polar(1.0, self.phase(y, family)))
            .collect();
        fwht_in_place(&mut amplitudes)?;
        let scale = 1.0 / dim as f64;
        for a in &mut amplitudes {
            *a *= scale;
        }
        Statevector::new(amplitudes)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput {
            what: "instance JSON",
            why: e.to_string(),
        })
    }
}

#[inline]
fn zeta(y: usize, i: usize) -> f64 {
    1.0 - 2.0 * ((y >> i) & 1) as f64
}

/// 2^N complex amplitudes of a circuit output state.
#[derive(Clone, Debug)]
pub struct Statevector {
    amplitudes: Vec<Complex64>,
    n_qubits: usize,
}

impl Statevector {
    /// Wrap amplitudes, checking the length is 2^N and the norm is 1 within
    /// 1e−10.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = n_qubits_of_len(amplitudes.len())?;
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput {
                what: "statevector",
                why: format!("squared norm {norm_sq} deviates from 1 by more than 1e-10"),
            });
        }
        Ok(Self { amplitudes, n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Born-rule outcome distribution |ψ(x)|², renormalized to sum exactly
    /// to the computed total.
    pub fn probabilities(&self) -> ProbDist {
        let probs: Vec<f64> = self.amplitudes.iter().map(|a| a.norm_sqr()).collect();
        ProbDist::new(probs).expect("|ψ|² of a normalized state is a valid distribution")
    }
}

/// A distribution over the 2^N bitstrings: nonnegative, summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbDist {
    probs: Vec<f64>,
    n_qubits: usize,
}

impl ProbDist {
    /// Validate and normalize: entries must be finite and ≥ 0 with a
    /// positive sum; the stored vector is divided by that sum.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        let n_qubits = n_qubits_of_len(probs.len())?;
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidInput {
                    what: "probability vector",
                    why: format!("entry {p} at index {i} is negative or non-finite"),
                });
            }
        }
        let total: f64 = probs.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::InvalidInput {
                what: "probability vector",
                why: format!("total mass {total} is not positive and finite"),
            });
        }
        for p in &mut probs {
            *p /= total;
        }
        Ok(Self { probs, n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    /// The parity permutation Q with r(x) = p(Qx): identity on even-parity
    /// bitstrings, bitwise complement on odd-parity ones. Requires even N,
    /// under which Q is an involution.
    pub fn parity_permute(&self) -> Result<ProbDist> {
        if self.n_qubits % 2 != 0 {
            return Err(Error::OddQubitCount { n: self.n_qubits });
        }
        let mask = self.probs.len() - 1;
        let permuted: Vec<f64> = (0..self.probs.len())
            .map(|x| {
                if x.count_ones() % 2 == 0 {
                    self.probs[x]
                } else {
                    self.probs[x ^ mask]
                }
            })
            .collect();
        Ok(ProbDist { probs: permuted, n_qubits: self.n_qubits })
    }
}

/// The coupling-free (q = 0, family F) outcome distribution in closed form:
/// `r(x) = ∏_k f_{x_k}(θ_k)` with f_0 = cos², f_1 = sin².
///
/// Panics if more than [`MAX_QUBITS`] angles are supplied.
pub fn analytic_product_distribution(theta: &[f64]) -> ProbDist {
    assert!(
        theta.len() <= MAX_QUBITS,
        "{} angles exceed the {MAX_QUBITS}-qubit cap",
        theta.len()
    );
    let mut probs = vec![1.0];
    for &t in theta {
        let f0 = t.cos().powi(2);
        let f1 = t.sin().powi(2);
        let mut next = Vec::with_capacity(probs.len() * 2);
        next.extend(probs.iter().map(|p| p * f0));
        next.extend(probs.iter().map(|p| p * f1));
        probs = next;
    }
    ProbDist::new(probs).expect("product of cos²/sin² factors is a valid distribution")
}
