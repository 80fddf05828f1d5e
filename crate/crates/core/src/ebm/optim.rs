//! Adam and natural-gradient optimizer steps over the flattened parameters.

use nalgebra::DMatrix;
use ndarray::{Array2, Axis};

use super::model::MlpEnergyModel;
use super::train::TrainConfig;
use crate::error::{Error, Result};

/// Denominator fuzz in the Adam update.
pub const ADAM_EPSILON: f64 = 1e-8;

/// First and second gradient moments with bias correction.
#[derive(Clone, Debug)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(param_count: usize) -> Self {
        Self { m: vec![0.0; param_count], v: vec![0.0; param_count], t: 0 }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One Adam descent step on `loss_grad` (the gradient of the loss, not
    /// its negation).
    pub fn step(
        &mut self,
        model: &mut MlpEnergyModel,
        loss_grad: &[f64],
        cfg: &TrainConfig,
    ) -> Result<()> {
        if loss_grad.len() != self.m.len() {
            return Err(Error::SizeMismatch { left: loss_grad.len(), right: self.m.len() });
        }
        self.t += 1;
        let mut params = model.params_flat();
        let bias_m = 1.0 - cfg.beta1.powi(self.t as i32);
        let bias_v = 1.0 - cfg.beta2.powi(self.t as i32);
        for k in 0..params.len() {
            let g = loss_grad[k];
            self.m[k] = cfg.beta1 * self.m[k] + (1.0 - cfg.beta1) * g;
            self.v[k] = cfg.beta2 * self.v[k] + (1.0 - cfg.beta2) * g * g;
            let m_hat = self.m[k] / bias_m;
            let v_hat = self.v[k] / bias_v;
            params[k] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPSILON);
        }
        model.set_params_flat(&params)
    }
}

/// Empirical Fisher information of the energy gradients: the covariance of
/// per-sample ∇_W f_W(x) over `samples`, ⟨∂f ∂f⟩ − ⟨∂f⟩⟨∂f⟩.
///
/// Built from centered outer products, so positive semidefinite by
/// construction.
pub fn fisher_matrix(model: &MlpEnergyModel, samples: &[usize]) -> Result<Array2<f64>> {
    let grads = model.per_sample_gradients(samples)?;
    let mean = grads.mean_axis(Axis(0)).expect("nonempty sample list");
    let centered = &grads - &mean.insert_axis(Axis(0));
    Ok(centered.t().dot(&centered) / samples.len() as f64)
}

/// Moving-average state for natural gradient descent.
#[derive(Clone, Debug)]
pub struct NgdState {
    fisher_avg: Array2<f64>,
    grad_avg: Vec<f64>,
    t: u64,
}

impl NgdState {
    pub fn new(param_count: usize) -> Self {
        Self {
            fisher_avg: Array2::zeros((param_count, param_count)),
            grad_avg: vec![0.0; param_count],
            t: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One NGD step W ← W − η·(F̂ + λI)^{-1}·ĝ.
    ///
    /// The Fisher matrix and gradient enter through bias-corrected
    /// exponential moving averages with rates β₂ and β₁. λ is
    /// `cfg.damping`, or 1e−3·tr(F̂)/dim when unset. The damped system is
    /// solved by Cholesky, falling back to LU; a singular system reports a
    /// diagonal-based condition estimate.
    pub fn step(
        &mut self,
        model: &mut MlpEnergyModel,
        fisher: &Array2<f64>,
        loss_grad: &[f64],
        cfg: &TrainConfig,
    ) -> Result<()> {
        let dim = self.grad_avg.len();
        if loss_grad.len() != dim {
            return Err(Error::SizeMismatch { left: loss_grad.len(), right: dim });
        }
        if fisher.dim() != (dim, dim) {
            return Err(Error::SizeMismatch { left: fisher.dim().0, right: dim });
        }
        self.t += 1;
        self.fisher_avg.zip_mut_with(fisher, |avg, &f| {
            *avg = cfg.beta2 * *avg + (1.0 - cfg.beta2) * f;
        });
        for (avg, &g) in self.grad_avg.iter_mut().zip(loss_grad) {
            *avg = cfg.beta1 * *avg + (1.0 - cfg.beta1) * g;
        }
        let bias_f = 1.0 - cfg.beta2.powi(self.t as i32);
        let bias_g = 1.0 - cfg.beta1.powi(self.t as i32);

        let mut system = DMatrix::from_fn(dim, dim, |r, c| self.fisher_avg[[r, c]] / bias_f);
        let damping = cfg.damping.unwrap_or_else(|| {
            1e-3 * system.diagonal().sum() / dim as f64
        });
        for k in 0..dim {
            system[(k, k)] += damping;
        }
        let rhs = nalgebra::DVector::from_fn(dim, |k, _| self.grad_avg[k] / bias_g);

        let solution = match system.clone().cholesky() {
            Some(chol) => chol.solve(&rhs),
            None => system
                .clone()
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::SingularFisher { cond: diagonal_condition(&system) })?,
        };
        if solution.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularFisher { cond: diagonal_condition(&system) });
        }

        let mut params = model.params_flat();
        for (p, v) in params.iter_mut().zip(solution.iter()) {
            *p -= cfg.learning_rate * v;
        }
        model.set_params_flat(&params)
    }
}

fn diagonal_condition(system: &DMatrix<f64>) -> f64 {
    let diag = system.diagonal();
    let max = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
