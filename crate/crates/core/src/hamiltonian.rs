//! Classical parent Hamiltonians of strictly positive distributions.
//!
//! Any p(x) > 0 over bitstrings is exactly a Gibbs state p(x) = e^{−H(x)}/Z
//! of a classical Hamiltonian diagonal in parity functions. We store the
//! Walsh coefficients of log p,
//!
//! ```text
//!   J(y) = (1/2^N) Σ_x log p(x) · (−1)^{x·y},
//! ```
//!
//! so that log p(x) = Σ_y J(y)·(−1)^{x·y} exactly. The y = 0 entry absorbs
//! −log Z together with the Hamiltonian's constant shift (a gauge with no
//! observable effect on the distribution). Σ_{y≠0} |J(y)| measures how hard
//! the distribution is to represent classically; truncating small |J(y)|
//! yields controlled-error approximations with certified L1 bounds.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use crate::circuit::ProbDist;
use crate::error::{Error, Result};
use crate::transform::{fwht, fwht_inverse, n_qubits_of_len};

/// Probabilities below this are refused rather than clamped; log p must stay
/// finite and trustworthy.
pub const MIN_PROBABILITY: f64 = 1e-300;

/// Grid size for the log-scale threshold scan in
/// [`find_truncation_threshold`].
pub const TRUNCATION_GRID: usize = 64;

/// Relative bracket width at which the threshold binary search stops.
pub const TRUNCATION_TOLERANCE: f64 = 1e-3;

const BINARY_SEARCH_CAP: usize = 40;

const SPECTRUM_MAGIC: [u8; 4] = *b"JSPC";
const SPECTRUM_VERSION: u32 = 1;

/// Walsh coefficients J(y) of log p, indexed by subset mask y.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSpectrum {
    j: Vec<f64>,
    n_qubits: usize,
}

/// Summary statistics attached to serialized spectra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub n_qubits: usize,
    pub coupling_l1: f64,
    pub support_size: usize,
    pub weight_profile: Vec<f64>,
}

impl CouplingSpectrum {
    /// Reconstruct the exact parent Hamiltonian of a strictly positive
    /// distribution: J = W^{-1}{log p}.
    ///
    /// Fails, naming the offending index, if any entry is below
    /// [`MIN_PROBABILITY`].
    pub fn reconstruct(dist: &ProbDist) -> Result<Self> {
        for (index, &p) in dist.as_slice().iter().enumerate() {
            if p < MIN_PROBABILITY {
                return Err(Error::NonPositiveProbability { index, value: p });
            }
        }
        let log_p: Vec<f64> = dist.as_slice().iter().map(|&p| p.ln()).collect();
        let j = fwht_inverse(&log_p)?;
        Ok(Self { j, n_qubits: dist.n_qubits() })
    }

    /// Wrap raw coefficients (used by file loading and tests).
    pub fn from_coefficients(j: Vec<f64>) -> Result<Self> {
        let n_qubits = n_qubits_of_len(j.len())?;
        Ok(Self { j, n_qubits })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.j
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Σ_{y≠0} |J(y)|, the classical-difficulty measure.
    pub fn coupling_l1(&self) -> f64 {
        self.j[1..].iter().map(|v| v.abs()).sum()
    }

    /// log(Σ_{y≠0} |J(y)|) / log N. Converges in N for polynomially-sized
    /// Hamiltonians and diverges for super-polynomial ones. Returns −∞ when
    /// the coupling sum is zero.
    pub fn normalized_complexity(&self) -> f64 {
        let l1 = self.coupling_l1();
        if l1 == 0.0 {
            return f64::NEG_INFINITY;
        }
        l1.ln() / (self.n_qubits as f64).ln()
    }

    /// Zero every y ≠ 0 coefficient with |J(y)| < delta. The y = 0 entry is
    /// preserved; renormalization happens at distribution reconstruction.
    pub fn truncated(&self, delta: f64) -> CouplingSpectrum {
        debug_assert!(delta >= 0.0);
        let mut j = self.j.clone();
        for v in &mut j[1..] {
            if v.abs() < delta {
                *v = 0.0;
            }
        }
        CouplingSpectrum { j, n_qubits: self.n_qubits }
    }

    /// The Gibbs distribution of the (possibly truncated) Hamiltonian:
    /// probs ∝ exp(Σ_y J(y)·(−1)^{x·y}), max-subtracted before
    /// exponentiation and explicitly renormalized.
    pub fn distribution(&self) -> ProbDist {
        let exponent = fwht(&self.j).expect("stored coefficient length is a power of two");
        let max = exponent.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let probs: Vec<f64> = exponent.iter().map(|&e| (e - max).exp()).collect();
        ProbDist::new(probs).expect("exponentials of finite values form a valid distribution")
    }

    /// Number of nonzero coefficients away from y = 0, |S_δ|.
    pub fn support_size(&self) -> usize {
        self.j[1..].iter().filter(|v| **v != 0.0).count()
    }

    /// Entry k holds Σ |J(y)| over masks of Hamming weight k, y ≠ 0; entry 0
    /// is zero by that convention. Length N + 1.
    pub fn weight_profile(&self) -> Vec<f64> {
        let mut profile = vec![0.0; self.n_qubits + 1];
        for (y, &v) in self.j.iter().enumerate().skip(1) {
            profile[y.count_ones() as usize] += v.abs();
        }
        profile
    }

    pub fn summary(&self) -> SpectrumSummary {
        SpectrumSummary {
            n_qubits: self.n_qubits,
            coupling_l1: self.coupling_l1(),
            support_size: self.support_size(),
            weight_profile: self.weight_profile(),
        }
    }

    /// Binary layout: magic `JSPC`, version u32 LE, qubit count u32 LE, then
    /// 2^N coefficients as little-endian f64 in mask order.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&SPECTRUM_MAGIC)?;
        w.write_all(&SPECTRUM_VERSION.to_le_bytes())?;
        w.write_all(&(self.n_qubits as u32).to_le_bytes())?;
        for v in &self.j {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let bad = |why: String| Error::InvalidInput { what: "spectrum file", why };
        let io = |e: std::io::Error| bad(e.to_string());
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io)?;
        if magic != SPECTRUM_MAGIC {
            return Err(bad(format!("bad magic {magic:?}")));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word).map_err(io)?;
        let version = u32::from_le_bytes(word);
        if version != SPECTRUM_VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        r.read_exact(&mut word).map_err(io)?;
        let n_qubits = u32::from_le_bytes(word) as usize;
        if n_qubits == 0 || n_qubits > 32 {
            return Err(bad(format!("implausible qubit count {n_qubits}")));
        }
        let mut j = vec![0.0f64; 1usize << n_qubits];
        let mut buf = [0u8; 8];
        for v in &mut j {
            r.read_exact(&mut buf).map_err(io)?;
            *v = f64::from_le_bytes(buf);
        }
        Self::from_coefficients(j)
    }
}

/// L1 distance Σ_x |a(x) − b(x)|, in [0, 2].
pub fn l1_distance(a: &ProbDist, b: &ProbDist) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .sum())
}

/// Outcome of the threshold search.
#[derive(Clone, Debug)]
pub struct Truncation {
    /// Largest threshold found whose truncated Gibbs distribution stays
    /// within the L1 target.
    pub delta: f64,
    /// The spectrum truncated at `delta`.
    pub spectrum: CouplingSpectrum,
    /// Independently recomputed ‖p_δ − p‖₁ at the returned threshold.
    pub l1_error: f64,
    /// True when every scanned threshold already met the target (degenerate
    /// bracket; `delta` is the maximal |J(y≠0)|).
    pub saturated: bool,
}

/// Find the maximal truncation threshold δ with ‖p_δ − p‖₁ < epsilon.
///
/// Scans [`TRUNCATION_GRID`] thresholds evenly spaced in log |J| between the
/// smallest and largest nonzero |J(y≠0)|, locates the largest bracketing
/// pair with err(δ_i) < ε ≤ err(δ_{i+1}) (monotonicity is not assumed), then
/// bisects geometrically to relative width [`TRUNCATION_TOLERANCE`].
pub fn find_truncation_threshold(dist: &ProbDist, epsilon: f64) -> Result<Truncation> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange { epsilon });
    }
    let spectrum = CouplingSpectrum::reconstruct(dist)?;
    let error_at = |delta: f64| -> f64 {
        l1_distance(&spectrum.truncated(delta).distribution(), dist)
            .expect("reconstructed distribution has the source size")
    };

    let magnitudes: Vec<f64> = spectrum.j[1..]
        .iter()
        .map(|v| v.abs())
        .filter(|&v| v > 0.0)
        .collect();
    let Some((&min, &max)) = magnitudes
        .iter()
        .min_by(|a, b| a.total_cmp(b))
        .zip(magnitudes.iter().max_by(|a, b| a.total_cmp(b)))
    else {
        // No couplings at all: the distribution is already uniform.
        return Ok(Truncation {
            delta: 0.0,
            l1_error: error_at(0.0),
            spectrum,
            saturated: true,
        });
    };

    let grid: Vec<f64> = (0..TRUNCATION_GRID)
        .map(|k| {
            let t = k as f64 / (TRUNCATION_GRID - 1) as f64;
            (min.ln() + t * (max.ln() - min.ln())).exp()
        })
        .collect();
    let errors: Vec<f64> = grid.iter().map(|&d| error_at(d)).collect();

    let bracket = grid
        .windows(2)
        .zip(errors.windows(2))
        .rev()
        .find(|(_, e)| e[0] < epsilon && epsilon <= e[1]);
    let (mut lo, mut hi) = match bracket {
        Some((d, _)) => (d[0], d[1]),
        None => {
            // Every grid threshold satisfies the bound; δ = max|J| discards
            // everything below the largest coefficient.
            let delta = max;
            let truncated = spectrum.truncated(delta);
            let l1_error = l1_distance(&truncated.distribution(), dist)?;
            return Ok(Truncation { delta, spectrum: truncated, l1_error, saturated: true });
        }
    };

    let mut iterations = 0;
    while (hi - lo) / hi > TRUNCATION_TOLERANCE && iterations < BINARY_SEARCH_CAP {
        let mid = (lo * hi).sqrt();
        if error_at(mid) < epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    let truncated = spectrum.truncated(lo);
    let l1_error = l1_distance(&truncated.distribution(), dist)?;
    Ok(Truncation { delta: lo, spectrum: truncated, l1_error, saturated: false })
}
