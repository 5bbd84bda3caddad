//! Expressivity (output-range search) and trainability (gradient statistics).

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;

use crate::channels::NoiseSpec;
use crate::error::{Error, Result};
use crate::fourier::{linspace, random_target, Dataset, TARGET_DOMAIN, TARGET_POINTS};
use crate::optimizer::{train, TrainConfig};
use crate::reuploading::{BasisVariant, ReuploadModel};
use crate::rng::{trial_rng, uniform_angles};

/// How the offset `b` of the target `a·g′ + b` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum OffsetMode {
    /// `b` is trained jointly with `θ`.
    #[default]
    Fitted,
    /// Target centred on zero.
    Centered,
    Fixed(f64),
}

impl OffsetMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "fitted" => Ok(OffsetMode::Fitted),
            "centered" => Ok(OffsetMode::Centered),
            other => other
                .parse::<f64>()
                .map(OffsetMode::Fixed)
                .map_err(|_| Error::Config(format!("offset must be fitted, centered or a number, got `{other}`"))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            OffsetMode::Fitted => "fitted".into(),
            OffsetMode::Centered => "centered".into(),
            OffsetMode::Fixed(b) => format!("{b}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RangeSearch {
    pub a_lo: f64,
    pub a_hi: f64,
    pub tol: f64,
    pub offset: OffsetMode,
}

impl Default for RangeSearch {
    fn default() -> Self {
        Self {
            a_lo: 0.0,
            a_hi: 4.0,
            tol: 0.01,
            offset: OffsetMode::Fitted,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RangeResult {
    pub seed: u64,
    pub noise: NoiseSpec,
    pub layers: usize,
    pub variant: BasisVariant,
    pub max_range: f64,
    /// Every amplitude tried, in order, with its outcome.
    pub trials: Vec<(f64, bool)>,
    pub iterations: usize,
}

/// Initial angles for `seed`, shared by every noise setting.
pub fn initial_theta(seed: u64, layers: usize) -> Vec<f64> {
    let mut rng = trial_rng(seed, "init", layers as u64);
    uniform_angles(&mut rng, ReuploadModel::param_count(layers))
}

/// Trains the seeded model on the seeded target of amplitude `a`.
pub fn fits_amplitude(
    layers: usize,
    noise: &NoiseSpec,
    variant: BasisVariant,
    seed: u64,
    a: f64,
    offset: OffsetMode,
) -> Result<bool> {
    let cfg = TrainConfig {
        fit_offset: offset == OffsetMode::Fitted,
        ..TrainConfig::for_layers(layers)?
    };
    let b = match offset {
        OffsetMode::Fixed(b) => Some(b),
        _ => None,
    };
    let (_, data) = random_target(layers, seed, a, b)?;
    let model = ReuploadModel::new(layers, initial_theta(seed, layers), noise.clone(), variant)?;
    let mut shuffle = trial_rng(seed, "shuffle", layers as u64);
    Ok(train(&model, &data, &cfg, &mut shuffle)?.converged)
}

/// Largest amplitude the model still fits, by bisection on `[a_lo, a_hi]`.
pub fn expressivity_range_seed(
    layers: usize,
    noise: &NoiseSpec,
    variant: BasisVariant,
    seed: u64,
    search: RangeSearch,
) -> Result<RangeResult> {
    TrainConfig::for_layers(layers)?;
    // Amplitudes live on a grid a_lo + k*tol; the ends count as fit / no fit.
    let n = ((search.a_hi - search.a_lo) / search.tol).floor() as i64;
    let amp = |k: i64| search.a_lo + k as f64 * search.tol;
    let mut seen: HashMap<i64, bool> = HashMap::new();
    let mut trials = Vec::new();
    let mut fits = |k: i64| -> Result<bool> {
        if k <= 0 {
            return Ok(true);
        }
        if k >= n {
            return Ok(false);
        }
        if let Some(&ok) = seen.get(&k) {
            return Ok(ok);
        }
        let ok = fits_amplitude(layers, noise, variant, seed, amp(k), search.offset)?;
        seen.insert(k, ok);
        trials.push((amp(k), ok));
        Ok(ok)
    };
    let (mut lo, mut hi) = (0i64, n);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if fits(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Convergence is not monotone in the amplitude, so look outward from lo
    // (lower side first) for a point that fits one step below and fails one
    // step above. One always exists between the two ends.
    let mut best = None;
    for d in 0..=n + 1 {
        for m in [lo - d, lo + d] {
            if (0..=n).contains(&m) && fits(m - 1)? && !fits(m + 1)? {
                best = Some(m);
                break;
            }
        }
        if best.is_some() {
            break;
        }
    }
    let m = best.unwrap_or(lo);
    let lo = amp(m);
    Ok(RangeResult {
        seed,
        noise: noise.clone(),
        layers,
        variant,
        max_range: lo,
        iterations: trials.len(),
        trials,
    })
}

/// Range search for every seed, run in parallel and returned in seed order.
pub fn expressivity_range(
    layers: usize,
    noise: &NoiseSpec,
    variant: BasisVariant,
    seeds: &[u64],
    search: RangeSearch,
) -> Result<Vec<RangeResult>> {
    seeds
        .par_iter()
        .map(|&s| expressivity_range_seed(layers, noise, variant, s, search))
        .collect()
}

pub fn mean_range(results: &[RangeResult]) -> f64 {
    results.iter().map(|r| r.max_range).sum::<f64>() / results.len() as f64
}

/// Range searches for every `(L, noise)` pair; rows ordered by depth, noise, seed.
pub fn depth_sweep(
    depths: &[usize],
    noises: &[NoiseSpec],
    variant: BasisVariant,
    seeds: &[u64],
    search: RangeSearch,
) -> Result<Vec<RangeResult>> {
    let jobs: Vec<(usize, &NoiseSpec, u64)> = depths
        .iter()
        .flat_map(|&l| noises.iter().flat_map(move |n| seeds.iter().map(move |&s| (l, n, s))))
        .collect();
    jobs.par_iter()
        .map(|&(l, n, s)| expressivity_range_seed(l, n, variant, s, search))
        .collect()
}

/// Extreme mean outputs reached when training towards the constant
/// targets `−2` and `+2`.
pub fn output_bounds(layers: usize, noise: &NoiseSpec, variant: BasisVariant, seed: u64) -> Result<(f64, f64)> {
    let cfg = TrainConfig::for_layers(layers)?;
    let reach = |target: f64| -> Result<f64> {
        let data = Dataset::sample(|_| target, TARGET_DOMAIN.0, TARGET_DOMAIN.1, TARGET_POINTS)?;
        let model = ReuploadModel::new(layers, initial_theta(seed, layers), noise.clone(), variant)?;
        let mut shuffle = trial_rng(seed, "bounds", layers as u64);
        let r = train(&model, &data, &cfg, &mut shuffle)?;
        let trained = model.with_theta(r.final_theta)?;
        let mean = |m: &ReuploadModel| data.inputs().iter().map(|&x| m.forward(x)).sum::<f64>() / data.len() as f64;
        let end = mean(&trained);
        let start = mean(&model);
        Ok(if target > 0.0 { end.max(start) } else { end.min(start) })
    };
    let (lo, hi) = (reach(-2.0)?, reach(2.0)?);
    Ok((lo.min(hi), lo.max(hi)))
}

/// One draw of the common random stream.
#[derive(Clone, Debug, PartialEq)]
pub struct GradSample {
    pub theta: Vec<f64>,
    pub index: usize,
    pub x: f64,
}

/// `θ ~ U[0,2π)^{3(L+1)}`, `i ~ U{0..3L+2}`, `x ~ U(0,2π)` from one stream.
pub fn gradient_samples(layers: usize, n: usize, master_seed: u64) -> Vec<GradSample> {
    let mut rng = trial_rng(master_seed, "gradients", layers as u64);
    let p = ReuploadModel::param_count(layers);
    (0..n)
        .map(|_| {
            let theta = uniform_angles(&mut rng, p);
            let index = rng.gen_range(0..p);
            let x = rng.gen_range(0.0..std::f64::consts::TAU);
            GradSample { theta, index, x }
        })
        .collect()
}

/// `|∂f̃/∂θᵢ|` for each sample under `noise`, in sample order.
pub fn gradient_magnitudes(
    layers: usize,
    noise: &NoiseSpec,
    variant: BasisVariant,
    samples: &[GradSample],
) -> Result<Vec<f64>> {
    let base = ReuploadModel::zeros(layers, noise.clone(), variant)?;
    samples
        .par_iter()
        .map(|s| {
            let m = base.with_theta(s.theta.clone())?;
            Ok(m.gradient_component(s.x, s.index)?.abs())
        })
        .collect()
}

/// Tukey box-plot summary.
#[derive(Clone, Debug, PartialEq)]
pub struct GradStats {
    pub noise: NoiseSpec,
    pub samples: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

impl GradStats {
    pub fn from_values(noise: NoiseSpec, values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let (q1, med, q3) = (quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75));
        let iqr = q3 - q1;
        let (fence_lo, fence_hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
        let whisker_lo = v.iter().copied().find(|&x| x >= fence_lo).unwrap_or(q1);
        let whisker_hi = v.iter().rev().copied().find(|&x| x <= fence_hi).unwrap_or(q3);
        Self {
            noise,
            samples: v.len(),
            q1,
            median: med,
            q3,
            whisker_lo,
            whisker_hi,
            min: v[0],
            max: v[v.len() - 1],
            mean: v.iter().sum::<f64>() / v.len() as f64,
        }
    }
}

/// Gradient statistics for each noise setting over one shared sample stream.
/// Returns the summaries with the raw magnitudes.
pub fn gradient_distribution(
    layers: usize,
    noises: &[NoiseSpec],
    variant: BasisVariant,
    n: usize,
    master_seed: u64,
) -> Result<Vec<(GradStats, Vec<f64>)>> {
    let samples = gradient_samples(layers, n, master_seed);
    noises
        .iter()
        .map(|noise| {
            let g = gradient_magnitudes(layers, noise, variant, &samples)?;
            Ok((GradStats::from_values(noise.clone(), &g), g))
        })
        .collect()
}

/// `n` points of `[lo, hi]`, handy for strength grids.
pub fn strength_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo, hi, n)
}
