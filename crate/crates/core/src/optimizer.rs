//! ADAM and the supervised training loop for re-uploading models.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::Dataset;
use crate::reuploading::ReuploadModel;

const HYPERPARAMS: &str = include_str!("../data/hyperparams.csv");

pub const DEFAULT_EPSILON: f64 = 1e-8;
pub const DEFAULT_BATCH: usize = 25;
pub const DEFAULT_THRESHOLD: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    pub max_steps: usize,
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

impl AdamConfig {
    pub fn new(learning_rate: f64, beta1: f64, beta2: f64, max_steps: usize) -> Result<Self> {
        let c = Self {
            learning_rate,
            beta1,
            beta2,
            epsilon: DEFAULT_EPSILON,
            max_steps,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::OutOfRange(format!("learning rate {}", self.learning_rate)));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::OutOfRange(format!("{name} = {b} not in [0, 1)")));
            }
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::OutOfRange(format!("epsilon {}", self.epsilon)));
        }
        Ok(())
    }

    /// Tabulated re-uploading hyperparameters for depth `layers`.
    pub fn for_layers(layers: usize) -> Result<Self> {
        lookup("reupload", layers)
    }

    /// Default VQE optimiser settings.
    pub fn vqe_default() -> Self {
        lookup("vqe", 4).expect("shipped table has a vqe row")
    }
}

fn lookup(model: &str, key: usize) -> Result<AdamConfig> {
    for line in HYPERPARAMS.lines().skip(1) {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 6 || f[0] != model || f[1].parse::<usize>().ok() != Some(key) {
            continue;
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Config(format!("hyperparameter table: {e}")))
        };
        let steps = f[5]
            .parse::<usize>()
            .map_err(|e| Error::Config(format!("hyperparameter table: {e}")))?;
        return AdamConfig::new(num(f[2])?, num(f[3])?, num(f[4])?, steps);
    }
    Err(Error::Config(format!("no {model} hyperparameters for {key}")))
}

/// Moment estimates and step counter.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// One bias-corrected update `θ ← θ − lr·m̂/(√v̂ + ε)`.
    pub fn step(&mut self, cfg: &AdamConfig, theta: &mut [f64], grad: &[f64]) -> Result<()> {
        if grad.len() != theta.len() || grad.len() != self.m.len() {
            return Err(Error::DimensionMismatch {
                expected: self.m.len(),
                got: grad.len(),
            });
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("gradient".into()));
        }
        self.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.t as i32);
        let c2 = 1.0 - cfg.beta2.powi(self.t as i32);
        for ((th, g), (m, v)) in theta
            .iter_mut()
            .zip(grad)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
            *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *th -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// `max_steps` counts epochs (full passes over the shuffled data).
    pub adam: AdamConfig,
    pub batch_size: usize,
    pub threshold: f64,
    /// Evaluate the full-dataset loss after every batch update rather than
    /// only at epoch boundaries.
    pub check_every_update: bool,
    /// Train a constant output offset `b` alongside `θ`, so the fit is to
    /// `g` up to an additive constant.
    #[serde(default)]
    pub fit_offset: bool,
}

impl TrainConfig {
    pub fn for_layers(layers: usize) -> Result<Self> {
        Ok(Self {
            adam: AdamConfig::for_layers(layers)?,
            batch_size: DEFAULT_BATCH,
            threshold: DEFAULT_THRESHOLD,
            check_every_update: true,
            fit_offset: false,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainResult {
    pub final_theta: Vec<f64>,
    /// Full-dataset loss at the end of each step (or at the stopping point).
    pub loss_history: Vec<f64>,
    pub converged: bool,
    pub steps_used: usize,
    pub updates: usize,
    /// Fitted offset (0 unless `fit_offset`).
    pub offset: f64,
    /// Full-dataset loss at `final_theta`.
    pub final_loss: f64,
}

/// Mean of `½(f − g)²` over the whole dataset.
pub fn dataset_loss(model: &ReuploadModel, data: &Dataset) -> f64 {
    dataset_loss_with_offset(model, data, 0.0)
}

/// Mean of `½(f + b − g)²`.
pub fn dataset_loss_with_offset(model: &ReuploadModel, data: &Dataset, b: f64) -> f64 {
    let s: f64 = data
        .inputs()
        .iter()
        .zip(data.targets())
        .map(|(&x, &g)| {
            let r = model.forward(x) + b - g;
            0.5 * r * r
        })
        .sum();
    s / data.len() as f64
}

/// Batch-mean gradient; with `offset = Some(b)` the last entry is `∂/∂b`.
fn batch_grad(model: &ReuploadModel, data: &Dataset, batch: &[usize], offset: Option<f64>) -> Vec<f64> {
    let p = model.theta().len();
    let mut grad = vec![0.0; p + offset.is_some() as usize];
    for &k in batch {
        let x = data.inputs()[k];
        let r = model.forward(x) + offset.unwrap_or(0.0) - data.targets()[k];
        for (g, d) in grad.iter_mut().zip(model.gradient(x)) {
            *g += r * d;
        }
        if offset.is_some() {
            grad[p] += r;
        }
    }
    let n = batch.len() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    grad
}

/// Mini-batch ADAM on the mean of `½(f − g)²`.
///
/// Each step is one epoch: the data order is reshuffled from `rng`, then
/// every batch triggers one ADAM update. Training stops as soon as the
/// full-dataset loss drops below the threshold; it is checked before the
/// first update and after each update (or each epoch when
/// `check_every_update` is off).
pub fn train<R: Rng + ?Sized>(
    model: &ReuploadModel,
    data: &Dataset,
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<TrainResult> {
    cfg.adam.validate()?;
    if cfg.batch_size == 0 || cfg.batch_size > data.len() {
        return Err(Error::OutOfRange(format!(
            "batch size {} for {} points",
            cfg.batch_size,
            data.len()
        )));
    }
    let mut m = model.clone();
    let p = m.theta().len();
    // Trainable vector: θ, then b when the offset is fitted.
    let mut params = m.theta().to_vec();
    if cfg.fit_offset {
        params.push(0.0);
    }
    let offset = |params: &[f64]| if cfg.fit_offset { params[p] } else { 0.0 };
    let mut state = AdamState::new(params.len());
    let mut history = Vec::new();
    let mut order: Vec<usize> = (0..data.len()).collect();

    let check = |m: &ReuploadModel, b: f64| -> Result<f64> {
        let l = dataset_loss_with_offset(m, data, b);
        if !l.is_finite() {
            return Err(Error::NonFinite("training loss".into()));
        }
        Ok(l)
    };

    let mut loss = check(&m, 0.0)?;
    let mut steps = 0;
    let mut updates = 0;
    'epochs: while loss >= cfg.threshold && steps < cfg.adam.max_steps {
        steps += 1;
        order.shuffle(rng);
        for batch in order.chunks(cfg.batch_size) {
            let grad = batch_grad(&m, data, batch, cfg.fit_offset.then(|| offset(&params)));
            state.step(&cfg.adam, &mut params, &grad)?;
            m.set_theta(&params[..p])?;
            updates += 1;
            if cfg.check_every_update {
                loss = check(&m, offset(&params))?;
                if loss < cfg.threshold {
                    history.push(loss);
                    break 'epochs;
                }
            }
        }
        if !cfg.check_every_update {
            loss = check(&m, offset(&params))?;
        }
        history.push(loss);
    }
    let b = offset(&params);
    params.truncate(p);
    Ok(TrainResult {
        final_theta: params,
        offset: b,
        loss_history: history,
        converged: loss < cfg.threshold,
        steps_used: steps,
        updates,
        final_loss: loss,
    })
}
