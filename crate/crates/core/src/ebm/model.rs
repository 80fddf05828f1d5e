//! Fully connected energy network f_W(x) with batch forward/backward passes.

use ndarray::{Array1, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::ProbDist;
use crate::error::{Error, Result};

/// Cap on exact enumeration of the model distribution (2^22 energies).
const ENUMERATION_CAP: usize = 22;

/// Rows per chunk when enumerating all bitstrings through the network.
const FORWARD_CHUNK: usize = 4096;

/// Named architecture profiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArchProfile {
    /// Two hidden layers of α·N units each, biases on both hidden layers;
    /// sized for first-order (Adam) training.
    Adam,
    /// One hidden layer of 10·N units with a bias; small enough for the
    /// explicit Fisher matrix of natural gradient descent.
    Ngd,
}

/// Multilayer perceptron mapping a ±1 spin vector to a scalar energy.
///
/// Hidden layers apply tanh; the output layer is linear. The flattened
/// parameter vector is canonical: layer by layer, weight matrix in row-major
/// (input-major) order, then that layer's bias if present.
#[derive(Clone, Debug, PartialEq)]
pub struct MlpEnergyModel {
    layer_dims: Vec<usize>,
    weights: Vec<Array2<f64>>,
    biases: Vec<Option<Array1<f64>>>,
}

struct ForwardCache {
    /// activations[0] is the input batch; activations[l] the post-tanh
    /// output of hidden layer l.
    activations: Vec<Array2<f64>>,
    output: Array1<f64>,
}

impl MlpEnergyModel {
    /// Build one of the named profiles.
    ///
    /// `alpha` sets the hidden width of the Adam profile (α·N per layer) and
    /// is ignored by the NGD profile. Weights and biases are drawn uniformly
    /// from [−1/√fan_in, 1/√fan_in], layer by layer (weights row-major, then
    /// bias), from a ChaCha8 stream seeded with `seed`.
    pub fn init(n_qubits: usize, profile: ArchProfile, alpha: usize, seed: u64) -> Self {
        assert!(n_qubits >= 1 && alpha >= 1);
        let (dims, bias): (Vec<usize>, Vec<bool>) = match profile {
            ArchProfile::Adam => {
                let m = alpha * n_qubits;
                (vec![n_qubits, m, m, 1], vec![true, true, false])
            }
            ArchProfile::Ngd => (vec![n_qubits, 10 * n_qubits, 1], vec![true, false]),
        };
        Self::with_layer_dims(&dims, &bias, seed).expect("profile dimensions are consistent")
    }

    /// Build an arbitrary fully connected stack (used by tests and toys).
    pub fn with_layer_dims(dims: &[usize], bias: &[bool], seed: u64) -> Result<Self> {
        if dims.len() < 2 || *dims.last().unwrap() != 1 {
            return Err(Error::InvalidInput {
                what: "layer dims",
                why: "need at least input and a single-unit output layer".into(),
            });
        }
        if bias.len() != dims.len() - 1 {
            return Err(Error::SizeMismatch { left: bias.len(), right: dims.len() - 1 });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for (l, w) in dims.windows(2).enumerate() {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            weights.push(Array2::from_shape_fn((fan_in, fan_out), |_| {
                rng.gen_range(-bound..=bound)
            }));
            biases.push(bias[l].then(|| Array1::from_shape_fn(fan_out, |_| rng.gen_range(-bound..=bound))));
        }
        Ok(Self { layer_dims: dims.to_vec(), weights, biases })
    }

    pub fn n_inputs(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    /// Bias presence per weight layer.
    pub fn bias_flags(&self) -> Vec<bool> {
        self.biases.iter().map(Option::is_some).collect()
    }

    /// Exact length of the flattened parameter vector.
    pub fn param_count(&self) -> usize {
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| w.len() + b.as_ref().map_or(0, |b| b.len()))
            .sum()
    }

    /// Flatten all parameters in canonical order.
    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend(w.iter());
            if let Some(b) = b {
                out.extend(b.iter());
            }
        }
        out
    }

    /// Overwrite all parameters from a canonical flat vector.
    pub fn set_params_flat(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::SizeMismatch { left: params.len(), right: self.param_count() });
        }
        let mut offset = 0;
        for (w, b) in self.weights.iter_mut().zip(&mut self.biases) {
            for v in w.iter_mut() {
                *v = params[offset];
                offset += 1;
            }
            if let Some(b) = b {
                for v in b.iter_mut() {
                    *v = params[offset];
                    offset += 1;
                }
            }
        }
        Ok(())
    }

    /// Spin encoding of bitstring indices: bit b of x maps to 1 − 2b.
    fn encode(&self, xs: &[usize]) -> Array2<f64> {
        let n = self.n_inputs();
        Array2::from_shape_fn((xs.len(), n), |(s, i)| 1.0 - 2.0 * ((xs[s] >> i) & 1) as f64)
    }

    fn forward(&self, inputs: &Array2<f64>) -> ForwardCache {
        let layers = self.weights.len();
        let mut activations = Vec::with_capacity(layers);
        activations.push(inputs.clone());
        for l in 0..layers - 1 {
            let mut z = activations[l].dot(&self.weights[l]);
            if let Some(b) = &self.biases[l] {
                z += b;
            }
            z.mapv_inplace(f64::tanh);
            activations.push(z);
        }
        let mut z = activations[layers - 1].dot(&self.weights[layers - 1]);
        if let Some(b) = &self.biases[layers - 1] {
            z += b;
        }
        let output = z.index_axis(Axis(1), 0).to_owned();
        ForwardCache { activations, output }
    }

    /// Scalar energy f_W(x) for one bitstring index.
    pub fn energy(&self, x: usize) -> f64 {
        self.forward(&self.encode(&[x])).output[0]
    }

    /// Energies for a batch of bitstring indices.
    pub fn energies(&self, xs: &[usize]) -> Vec<f64> {
        self.forward(&self.encode(xs)).output.to_vec()
    }

    /// The exact model distribution: softmax of all 2^N energies with max
    /// subtraction, enumerated in chunks.
    pub fn distribution(&self) -> Result<ProbDist> {
        let n = self.n_inputs();
        if n > ENUMERATION_CAP {
            return Err(Error::QubitCapExceeded { n, cap: ENUMERATION_CAP });
        }
        let dim = 1usize << n;
        let mut energies = Vec::with_capacity(dim);
        let mut start = 0;
        while start < dim {
            let end = (start + FORWARD_CHUNK).min(dim);
            let xs: Vec<usize> = (start..end).collect();
            energies.extend(self.energies(&xs));
            start = end;
        }
        let max = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::InvalidInput {
                what: "model energies",
                why: "non-finite energy during enumeration".into(),
            });
        }
        ProbDist::new(energies.iter().map(|&e| (e - max).exp()).collect())
    }

    /// Gradient of Σ_s weight_s·f_W(x_s) with respect to the flattened
    /// parameters, by reverse accumulation over the batch.
    fn weighted_gradient(&self, inputs: &Array2<f64>, weights: &Array1<f64>) -> Vec<f64> {
        let cache = self.forward(inputs);
        let layers = self.weights.len();
        let mut grads_w: Vec<Array2<f64>> = Vec::with_capacity(layers);
        let mut grads_b: Vec<Option<Array1<f64>>> = Vec::with_capacity(layers);

        // Output layer: delta is the per-sample weight itself.
        let mut delta: Array2<f64> = weights
            .view()
            .insert_axis(Axis(1))
            .to_owned();
        for l in (0..layers).rev() {
            grads_w.push(cache.activations[l].t().dot(&delta));
            grads_b.push(
                self.biases[l]
                    .as_ref()
                    .map(|_| delta.sum_axis(Axis(0))),
            );
            if l > 0 {
                let mut upstream = delta.dot(&self.weights[l].t());
                upstream.zip_mut_with(&cache.activations[l], |u, &a| *u *= 1.0 - a * a);
                delta = upstream;
            }
        }
        grads_w.reverse();
        grads_b.reverse();

        let mut flat = Vec::with_capacity(self.param_count());
        for (gw, gb) in grads_w.iter().zip(&grads_b) {
            flat.extend(gw.iter());
            if let Some(gb) = gb {
                flat.extend(gb.iter());
            }
        }
        flat
    }

    /// Cross-entropy gradient estimate from samples: the per-parameter mean
    /// of ∇_W f_W over `target_samples` minus the mean over `model_samples`.
    /// This is the negative gradient of the cross-entropy loss.
    pub fn ce_gradient(
        &self,
        target_samples: &[usize],
        model_samples: &[usize],
    ) -> Result<Vec<f64>> {
        if target_samples.is_empty() || model_samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        let mut xs = Vec::with_capacity(target_samples.len() + model_samples.len());
        xs.extend_from_slice(target_samples);
        xs.extend_from_slice(model_samples);
        let t_weight = 1.0 / target_samples.len() as f64;
        let m_weight = -1.0 / model_samples.len() as f64;
        let weights = Array1::from_shape_fn(xs.len(), |s| {
            if s < target_samples.len() {
                t_weight
            } else {
                m_weight
            }
        });
        Ok(self.weighted_gradient(&self.encode(&xs), &weights))
    }

    /// Cross-entropy gradient with both expectations enumerated exactly:
    /// Σ_x [p(x) − p_W(x)]·∇_W f_W(x). Equals the sampled estimate in the
    /// infinite-batch limit.
    pub fn ce_gradient_exact(&self, target: &ProbDist) -> Result<Vec<f64>> {
        if target.n_qubits() != self.n_inputs() {
            return Err(Error::SizeMismatch { left: target.n_qubits(), right: self.n_inputs() });
        }
        let model_dist = self.distribution()?;
        let xs: Vec<usize> = (0..target.len()).collect();
        let weights = Array1::from_shape_fn(xs.len(), |x| {
            target.as_slice()[x] - model_dist.as_slice()[x]
        });
        Ok(self.weighted_gradient(&self.encode(&xs), &weights))
    }

    /// Per-sample energy gradients, one row of ∇_W f_W(x_s) per sample.
    /// Memory scales as samples × parameters; intended for the NGD profile.
    pub fn per_sample_gradients(&self, xs: &[usize]) -> Result<Array2<f64>> {
        if xs.is_empty() {
            return Err(Error::EmptySamples);
        }
        let inputs = self.encode(xs);
        let cache = self.forward(&inputs);
        let layers = self.weights.len();
        let samples = xs.len();
        let params = self.param_count();

        // Per-sample deltas at every layer, shaped (samples, layer width).
        let mut deltas: Vec<Array2<f64>> = vec![Array2::zeros((0, 0)); layers];
        deltas[layers - 1] = Array2::ones((samples, 1));
        for l in (0..layers - 1).rev() {
            let mut upstream = deltas[l + 1].dot(&self.weights[l + 1].t());
            upstream.zip_mut_with(&cache.activations[l + 1], |u, &a| *u *= 1.0 - a * a);
            deltas[l] = upstream;
        }

        let mut grads = Array2::zeros((samples, params));
        for s in 0..samples {
            let mut offset = 0;
            for l in 0..layers {
                let acts = cache.activations[l].row(s);
                let delta = deltas[l].row(s);
                let (fan_in, fan_out) = self.weights[l].dim();
                for i in 0..fan_in {
                    let a = acts[i];
                    for o in 0..fan_out {
                        grads[[s, offset + i * fan_out + o]] = a * delta[o];
                    }
                }
                offset += fan_in * fan_out;
                if self.biases[l].is_some() {
                    for o in 0..fan_out {
                        grads[[s, offset + o]] = delta[o];
                    }
                    offset += fan_out;
                }
            }
        }
        Ok(grads)
    }
}
