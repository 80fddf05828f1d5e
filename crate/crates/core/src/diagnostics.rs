//! Entanglement-spectrum statistics, Porter–Thomas comparisons and series
//! smoothing.
//!
//! The entanglement spectrum across the equal bipartition (qubits 0..N/2 vs
//! the rest) classifies circuit ensembles by the distribution of its
//! consecutive gap ratios u = (λ_{i+1}−λ_i)/(λ_{i+2}−λ_{i+1}) against the
//! GOE/GUE Wigner-like surmises. Outcome-probability statistics are compared
//! to the Porter–Thomas law d·e^{−pd} through a binned KL divergence.

use nalgebra::{Complex, DMatrix, Matrix4, Vector4};

use crate::circuit::{ProbDist, Statevector};
use crate::error::{Error, Result};

/// Eigenvalues below this are treated as numerical rank deficiency when
/// forming gap ratios.
pub const DEFAULT_EIGENVALUE_FLOOR: f64 = 1e-12;

/// Gap denominators below this produce meaningless ratios and are skipped.
const GAP_DENOMINATOR_FLOOR: f64 = 1e-14;

/// Ascending eigenvalues of the reduced density matrix across the equal cut.
#[derive(Clone, Debug)]
pub struct EntanglementSpectrum {
    eigenvalues: Vec<f64>,
    n_qubits: usize,
}

impl EntanglementSpectrum {
    /// Schmidt spectrum of `state` across the bipartition into qubits
    /// 0..N/2 (subsystem A, matrix rows) and N/2..N (subsystem B, columns).
    ///
    /// The amplitudes are reshaped into the 2^{N/2} × 2^{N/2} matrix
    /// M[a,b] = ψ(a | b·2^{N/2}); the eigenvalues of ρ_A = M·M† are the
    /// squared singular values of M. Requires even N.
    pub fn from_state(state: &Statevector) -> Result<Self> {
        let n = state.n_qubits();
        if n % 2 != 0 {
            return Err(Error::OddQubitCount { n });
        }
        let half_dim = 1usize << (n / 2);
        let amps = state.amplitudes();
        let m = DMatrix::from_fn(half_dim, half_dim, |a, b| {
            let amp = amps[a | (b << (n / 2))];
            Complex::new(amp.re, amp.im)
        });
        let singular = m.singular_values();
        let mut eigenvalues: Vec<f64> = singular.iter().map(|s| s * s).collect();
        eigenvalues.sort_by(f64::total_cmp);
        for v in &mut eigenvalues {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(Self { eigenvalues, n_qubits: n })
    }

    /// Wrap an explicit spectrum (ascending order is restored, entries in
    /// [−1e−12, 0) clamped to zero). The values must sum to 1 within 1e−8.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, n_qubits: usize) -> Result<Self> {
        eigenvalues.sort_by(f64::total_cmp);
        for v in &mut eigenvalues {
            if *v < 0.0 && *v >= -1e-12 {
                *v = 0.0;
            }
        }
        if eigenvalues.first().copied().unwrap_or(0.0) < 0.0 {
            return Err(Error::InvalidInput {
                what: "entanglement spectrum",
                why: "negative eigenvalue".into(),
            });
        }
        let total: f64 = eigenvalues.iter().sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidInput {
                what: "entanglement spectrum",
                why: format!("eigenvalues sum to {total}, not 1"),
            });
        }
        Ok(Self { eigenvalues, n_qubits })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn cut(&self) -> usize {
        self.n_qubits / 2
    }

    /// Von Neumann entropy S = −Σ λ_i ln λ_i with 0·ln 0 = 0, in nats.
    pub fn entropy(&self) -> f64 {
        self.eigenvalues
            .iter()
            .filter(|&&v| v > 0.0)
            .map(|&v| -v * v.ln())
            .sum()
    }

    /// Consecutive gap ratios u_i = (λ_{i+1}−λ_i)/(λ_{i+2}−λ_{i+1}) over the
    /// ascending eigenvalues ≥ `floor`. Ratios whose denominator falls below
    /// 1e−14 are dropped; fewer than three surviving eigenvalues give an
    /// empty result.
    pub fn gap_ratios(&self, floor: f64) -> Vec<f64> {
        assert!(floor >= 0.0, "eigenvalue floor must be nonnegative");
        let surviving: Vec<f64> = self
            .eigenvalues
            .iter()
            .copied()
            .filter(|&v| v >= floor)
            .collect();
        if surviving.len() < 3 {
            return Vec::new();
        }
        surviving
            .windows(3)
            .filter_map(|w| {
                let num = w[1] - w[0];
                let den = w[2] - w[1];
                (den >= GAP_DENOMINATOR_FLOOR).then_some(num / den)
            })
            .collect()
    }
}

/// Random-matrix ensemble selecting the gap-ratio surmise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixEnsemble {
    Goe,
    Gue,
}

impl MatrixEnsemble {
    fn beta(self) -> f64 {
        match self {
            MatrixEnsemble::Goe => 1.0,
            MatrixEnsemble::Gue => 2.0,
        }
    }

    fn normalization(self) -> f64 {
        match self {
            MatrixEnsemble::Goe => 8.0 / 27.0,
            MatrixEnsemble::Gue => 4.0 * std::f64::consts::PI / (81.0 * 3.0f64.sqrt()),
        }
    }
}

/// Wigner-like surmise density for the (unfolded) gap ratio,
/// P_β(r) = (1/Z_β)·(r + r²)^β / (1 + r + r²)^{1 + 3β/2}.
pub fn surmise_pdf(ensemble: MatrixEnsemble, r: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::NegativeRatio { r });
    }
    let beta = ensemble.beta();
    let z = ensemble.normalization();
    Ok((r + r * r).powf(beta) / (1.0 + r + r * r).powf(1.0 + 1.5 * beta) / z)
}

/// CDF of the unfolded surmise on [0, r], by composite Simpson quadrature.
pub fn surmise_cdf(ensemble: MatrixEnsemble, r: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::NegativeRatio { r });
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let steps = 2000;
    let h = r / steps as f64;
    let mut acc = surmise_pdf(ensemble, 0.0)? + surmise_pdf(ensemble, r)?;
    for k in 1..steps {
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += weight * surmise_pdf(ensemble, k as f64 * h)?;
    }
    Ok(acc * h / 3.0)
}

/// Map unfolded ratios to r̃ = min(u, 1/u) ∈ [0, 1].
pub fn fold_ratios(ratios: &[f64]) -> Vec<f64> {
    ratios
        .iter()
        .filter(|u| u.is_finite() && **u >= 0.0)
        .map(|&u| if u > 1.0 { 1.0 / u } else { u })
        .collect()
}

/// Kolmogorov–Smirnov distance between an empirical sample of folded ratios
/// and the folded surmise CDF.
///
/// The surmise satisfies P(1/r) = r²·P(r), so the folded CDF is simply
/// 2·F(t) for t ∈ [0, 1] with F the unfolded CDF.
pub fn ks_distance_to_surmise(folded: &[f64], ensemble: MatrixEnsemble) -> Result<f64> {
    if folded.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut sorted = folded.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut ks = 0.0f64;
    for (i, &t) in sorted.iter().enumerate() {
        let model = 2.0 * surmise_cdf(ensemble, t.min(1.0))?;
        let above = (i as f64 + 1.0) / n - model;
        let below = model - i as f64 / n;
        ks = ks.max(above.abs()).max(below.abs());
    }
    Ok(ks)
}

/// Porter–Thomas density d·e^{−p·d} over outcome probabilities, with
/// d = `dim` the Hilbert-space dimension (mean outcome probability 1/d).
pub fn porter_thomas_pdf(p: f64, dim: usize) -> f64 {
    assert!(p >= 0.0 && dim >= 1);
    let d = dim as f64;
    d * (-p * d).exp()
}

/// Histogram of the 2^N outcome probabilities over `n_bins` uniform bins on
/// [0, 10/d] (overflow mass in the last bin), together with the discretized
/// Porter–Thomas reference renormalized over the same range.
///
/// Returns (edges, empirical masses, reference masses).
pub fn porter_thomas_bins(dist: &ProbDist, n_bins: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    assert!(n_bins >= 2, "need at least two bins");
    let d = dist.len() as f64;
    let hi = 10.0 / d;
    let edges: Vec<f64> = (0..=n_bins).map(|k| hi * k as f64 / n_bins as f64).collect();

    let mut empirical = vec![0.0f64; n_bins];
    for &p in dist.as_slice() {
        let bin = ((p / hi * n_bins as f64) as usize).min(n_bins - 1);
        empirical[bin] += 1.0;
    }
    for mass in &mut empirical {
        *mass /= d;
    }

    let tail = 1.0 - (-10.0f64).exp();
    let reference: Vec<f64> = edges
        .windows(2)
        .map(|w| ((-d * w[0]).exp() - (-d * w[1]).exp()) / tail)
        .collect();
    (edges, empirical, reference)
}

/// KL divergence of the binned outcome-probability statistics from the
/// Porter–Thomas law, Σ_k P_k log(P_k/Q_k) with 0·log 0 = 0.
pub fn kl_to_porter_thomas(dist: &ProbDist, n_bins: usize) -> f64 {
    let (_, p, q) = porter_thomas_bins(dist, n_bins);
    p.iter()
        .zip(&q)
        .filter(|(pk, _)| **pk > 0.0)
        .map(|(&pk, &qk)| pk * (pk / qk).ln())
        .sum()
}

/// KL(P‖Q) = Σ_k P_k log(P_k/Q_k) over matching supports; fails where P has
/// mass but Q does not.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch { left: p.len(), right: q.len() });
    }
    let mut acc = 0.0;
    for (index, (&pk, &qk)) in p.iter().zip(q).enumerate() {
        if pk > 0.0 {
            if qk <= 0.0 {
                return Err(Error::AbsoluteContinuity { index, mass: pk });
            }
            acc += pk * (pk / qk).ln();
        }
    }
    Ok(acc)
}

/// A histogram with explicit edges; masses sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct BinnedDistribution {
    edges: Vec<f64>,
    masses: Vec<f64>,
}

impl BinnedDistribution {
    pub fn new(edges: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if edges.len() != masses.len() + 1 {
            return Err(Error::SizeMismatch { left: edges.len(), right: masses.len() + 1 });
        }
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput {
                what: "bin edges",
                why: "edges must be strictly ascending".into(),
            });
        }
        if masses.iter().any(|&m| m < 0.0) {
            return Err(Error::InvalidInput {
                what: "bin masses",
                why: "negative mass".into(),
            });
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput {
                what: "bin masses",
                why: format!("masses sum to {total}, not 1"),
            });
        }
        Ok(Self { edges, masses })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn kl_divergence_from(&self, reference: &BinnedDistribution) -> Result<f64> {
        kl_divergence(&self.masses, &reference.masses)
    }
}

/// Smoothing coefficients of the 9-point cubic Savitzky–Golay filter
/// (interior points), i.e. the least-squares cubic evaluated at the window
/// center: (−21, 14, 39, 54, 59, 54, 39, 14, −21)/231.
pub const SAVITZKY_GOLAY_9: [f64; 9] = [
    -21.0 / 231.0,
    14.0 / 231.0,
    39.0 / 231.0,
    54.0 / 231.0,
    59.0 / 231.0,
    54.0 / 231.0,
    39.0 / 231.0,
    14.0 / 231.0,
    -21.0 / 231.0,
];

/// 9-point cubic Savitzky–Golay smoothing. Interior points convolve with
/// [`SAVITZKY_GOLAY_9`]; within four points of either end the cubic is
/// refitted by least squares on the truncated one-sided window.
pub fn savitzky_golay_smooth(series: &[f64]) -> Result<Vec<f64>> {
    if series.len() < 9 {
        return Err(Error::SeriesTooShort { len: series.len(), min: 9 });
    }
    let n = series.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if i >= 4 && i + 4 < n {
            let value = SAVITZKY_GOLAY_9
                .iter()
                .zip(&series[i - 4..=i + 4])
                .map(|(c, y)| c * y)
                .sum();
            out.push(value);
        } else {
            let lo = i.saturating_sub(4);
            let hi = (i + 4).min(n - 1);
            out.push(cubic_fit_at(&series[lo..=hi], (i - lo) as f64));
        }
    }
    Ok(out)
}

/// Least-squares cubic through `window`, evaluated at offset `at` (in sample
/// units from the window start). Solves the 4×4 normal equations.
fn cubic_fit_at(window: &[f64], at: f64) -> f64 {
    let mut vtv = Matrix4::zeros();
    let mut vty = Vector4::zeros();
    for (j, &y) in window.iter().enumerate() {
        let t = j as f64 - at;
        let row = [1.0, t, t * t, t * t * t];
        for a in 0..4 {
            vty[a] += row[a] * y;
            for b in 0..4 {
                vtv[(a, b)] += row[a] * row[b];
            }
        }
    }
    let coeffs = vtv
        .lu()
        .solve(&vty)
        .expect("normal equations of a 4+ point window are nonsingular");
    coeffs[0]
}
