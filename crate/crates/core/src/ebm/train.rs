//! Exact sampling and the epoch loop.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Read, Write};
use std::time::Instant;

use super::model::MlpEnergyModel;
use super::optim::{fisher_matrix, AdamState, NgdState};
use crate::circuit::ProbDist;
use crate::diagnostics::kl_divergence;
use crate::error::{Error, Result};

/// First- or second-order parameter updates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Adam,
    Ngd,
}

/// Hyperparameters of one training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub optimizer: OptimizerKind,
    /// Learning rate η.
    pub learning_rate: f64,
    /// Momentum β₁ for the gradient average.
    pub beta1: f64,
    /// Rate β₂ for the second-moment (Adam) or Fisher (NGD) average.
    pub beta2: f64,
    /// Fresh samples per epoch from both the target and the model, S.
    pub batch_size: usize,
    pub epochs: usize,
    /// NGD damping added to the Fisher diagonal; `None` picks
    /// 1e−3·tr(F̂)/dim adaptively each step.
    pub damping: Option<f64>,
    pub seed: u64,
}

impl TrainConfig {
    /// Adam defaults: η = 1e−3, β₁ = 0.9, β₂ = 0.999, S = 1024.
    pub fn adam(epochs: usize, seed: u64) -> Self {
        Self {
            optimizer: OptimizerKind::Adam,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            batch_size: 1024,
            epochs,
            damping: None,
            seed,
        }
    }

    /// NGD defaults: same rates as Adam with adaptive damping.
    pub fn ngd(epochs: usize, seed: u64) -> Self {
        Self { optimizer: OptimizerKind::Ngd, ..Self::adam(epochs, seed) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidInput {
                what: "learning rate",
                why: format!("{} is not positive", self.learning_rate),
            });
        }
        for (name, beta) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::InvalidInput {
                    what: "momentum",
                    why: format!("{name} = {beta} outside [0, 1)"),
                });
            }
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidInput {
                what: "batch size",
                why: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Inverse-CDF sampling from an exactly known distribution: i.i.d. draws by
/// binary search on the cumulative sums. Deterministic given `seed`.
pub fn exact_sample(dist: &ProbDist, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    exact_sample_with(dist, count, &mut rng)
}

/// As [`exact_sample`] drawing from a caller-owned stream.
pub fn exact_sample_with<R: Rng>(dist: &ProbDist, count: usize, rng: &mut R) -> Vec<usize> {
    let mut cumulative = Vec::with_capacity(dist.len());
    let mut acc = 0.0;
    for &p in dist.as_slice() {
        acc += p;
        cumulative.push(acc);
    }
    let last = dist.len() - 1;
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen();
            cumulative.partition_point(|&c| c <= u).min(last)
        })
        .collect()
}

/// One epoch of the recorded trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// KL(target ‖ p_W) after this epoch's update; +∞ when undefined.
    pub kl_forward: f64,
    /// KL(p_W ‖ target) after this epoch's update; +∞ when undefined.
    pub kl_reverse: f64,
    /// L2 norm of the cross-entropy gradient estimate used this epoch.
    pub grad_norm: f64,
    pub wall_ms: f64,
}

/// Per-epoch diagnostics of a completed run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingTrace {
    pub records: Vec<EpochRecord>,
}

impl TrainingTrace {
    pub fn final_kl_forward(&self) -> Option<f64> {
        self.records.last().map(|r| r.kl_forward)
    }

    /// One JSON object per line: {epoch, kl_forward, kl_reverse, grad_norm,
    /// wall_ms}.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for record in &self.records {
            serde_json::to_writer(&mut w, record)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: Read>(r: R) -> Result<Self> {
        let reader = std::io::BufReader::new(r);
        let mut records = Vec::new();
        for line in reader.lines() {
            let line = line.map_err(|e| Error::InvalidInput {
                what: "trace file",
                why: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str(&line).map_err(|e| Error::InvalidInput {
                what: "trace line",
                why: e.to_string(),
            })?);
        }
        Ok(Self { records })
    }
}

/// A trained model together with its trace.
#[derive(Clone, Debug)]
pub struct TrainRun {
    pub model: MlpEnergyModel,
    pub trace: TrainingTrace,
}

/// Train `model` toward `target` by sampled cross-entropy gradients.
///
/// Each epoch draws `cfg.batch_size` fresh samples from the target and from
/// the exact model distribution (recomputed every epoch), estimates the
/// gradient — plus the Fisher matrix under NGD — and applies one optimizer
/// step. The trace records the exact KL divergences after each update.
/// Non-finite gradients or energies abort the run.
pub fn train(target: &ProbDist, cfg: &TrainConfig, model: MlpEnergyModel) -> Result<TrainRun> {
    cfg.validate()?;
    if target.n_qubits() != model.n_inputs() {
        return Err(Error::SizeMismatch { left: target.n_qubits(), right: model.n_inputs() });
    }
    let mut model = model;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut adam = AdamState::new(model.param_count());
    let mut ngd = NgdState::new(match cfg.optimizer {
        OptimizerKind::Ngd => model.param_count(),
        OptimizerKind::Adam => 0,
    });
    let mut trace = TrainingTrace::default();
    let mut model_dist = model.distribution()?;

    for epoch in 0..cfg.epochs {
        let start = Instant::now();
        let target_samples = exact_sample_with(target, cfg.batch_size, &mut rng);
        let model_samples = exact_sample_with(&model_dist, cfg.batch_size, &mut rng);

        // ce_gradient is the negative loss gradient; optimizers descend.
        let ascent = model.ce_gradient(&target_samples, &model_samples)?;
        let grad_norm = ascent.iter().map(|g| g * g).sum::<f64>().sqrt();
        if !grad_norm.is_finite() {
            return Err(Error::NonFinite { what: "gradient", epoch });
        }
        let loss_grad: Vec<f64> = ascent.iter().map(|g| -g).collect();
        match cfg.optimizer {
            OptimizerKind::Adam => adam.step(&mut model, &loss_grad, cfg)?,
            OptimizerKind::Ngd => {
                let fisher = fisher_matrix(&model, &model_samples)?;
                ngd.step(&mut model, &fisher, &loss_grad, cfg)?;
            }
        }
        if model.params_flat().iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite { what: "parameters", epoch });
        }

        model_dist = model.distribution()?;
        trace.records.push(EpochRecord {
            epoch,
            kl_forward: kl_or_infinity(target, &model_dist),
            kl_reverse: kl_or_infinity(&model_dist, target),
            grad_norm,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok(TrainRun { model, trace })
}

fn kl_or_infinity(p: &ProbDist, q: &ProbDist) -> f64 {
    kl_divergence(p.as_slice(), q.as_slice()).unwrap_or(f64::INFINITY)
}

const CHECKPOINT_MAGIC: [u8; 4] = *b"EBMC";
const CHECKPOINT_VERSION: u32 = 1;

impl MlpEnergyModel {
    /// Checkpoint layout: magic `EBMC`, version u32 LE, layer count u32 LE,
    /// each layer width u32 LE, one bias-presence byte per weight layer,
    /// then the flattened parameters as little-endian f64.
    pub fn write_checkpoint<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&CHECKPOINT_MAGIC)?;
        w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
        let dims = self.layer_dims();
        w.write_all(&(dims.len() as u32).to_le_bytes())?;
        for &d in dims {
            w.write_all(&(d as u32).to_le_bytes())?;
        }
        for has_bias in self.bias_flags() {
            w.write_all(&[u8::from(has_bias)])?;
        }
        for v in self.params_flat() {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Self> {
        let bad = |why: String| Error::InvalidInput { what: "checkpoint", why };
        let io = |e: std::io::Error| bad(e.to_string());
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io)?;
        if magic != CHECKPOINT_MAGIC {
            return Err(bad(format!("bad magic {magic:?}")));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word).map_err(io)?;
        if u32::from_le_bytes(word) != CHECKPOINT_VERSION {
            return Err(bad("unsupported version".into()));
        }
        r.read_exact(&mut word).map_err(io)?;
        let n_layers = u32::from_le_bytes(word) as usize;
        if !(2..=64).contains(&n_layers) {
            return Err(bad(format!("implausible layer count {n_layers}")));
        }
        let mut dims = Vec::with_capacity(n_layers);
        for _ in 0..n_layers {
            r.read_exact(&mut word).map_err(io)?;
            dims.push(u32::from_le_bytes(word) as usize);
        }
        let mut bias = Vec::with_capacity(n_layers - 1);
        let mut byte = [0u8; 1];
        for _ in 0..n_layers - 1 {
            r.read_exact(&mut byte).map_err(io)?;
            bias.push(byte[0] != 0);
        }
        let mut model = Self::with_layer_dims(&dims, &bias, 0)?;
        let mut params = vec![0.0f64; model.param_count()];
        let mut buf = [0u8; 8];
        for v in &mut params {
            r.read_exact(&mut buf).map_err(io)?;
            *v = f64::from_le_bytes(buf);
        }
        model.set_params_flat(&params)?;
        Ok(model)
    }
}
