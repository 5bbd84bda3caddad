//! Fourier structure of re-uploading models, target functions and datasets.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;

use crate::channels::realize;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix, C0};
use crate::ptm::vectorize_complex;
use crate::reuploading::ReuploadModel;
use crate::rng::trial_rng;

pub const BAND_TOL: f64 = 1e-10;

/// Truncated Fourier series `Σ_{|ω|≤degree} c_ω e^{iωx}` of a real function.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl FourierSeries {
    /// `coeffs[k]` holds `c_{k-degree}`.
    pub fn new(degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * degree + 1 {
            return Err(Error::DimensionMismatch {
                expected: 2 * degree + 1,
                got: coeffs.len(),
            });
        }
        let s = Self { degree, coeffs };
        let scale = s.coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        if s.symmetry_error() > 1e-9 * scale {
            return Err(Error::InvalidModel(
                "coefficients are not conjugate-symmetric".into(),
            ));
        }
        Ok(s)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, omega: i64) -> Complex64 {
        if omega.unsigned_abs() as usize > self.degree {
            return C0;
        }
        self.coeffs[(omega + self.degree as i64) as usize]
    }

    pub fn frequencies(&self) -> impl Iterator<Item = i64> {
        let d = self.degree as i64;
        -d..=d
    }

    pub fn symmetry_error(&self) -> f64 {
        self.frequencies()
            .map(|w| (self.coeff(-w) - self.coeff(w).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Complex value of the series; its imaginary part vanishes for real functions.
    pub fn evaluate_complex(&self, x: f64) -> Complex64 {
        self.frequencies()
            .map(|w| self.coeff(w) * Complex64::from_polar(1.0, w as f64 * x))
            .sum()
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.evaluate_complex(x).re
    }

    fn derivatives(&self, x: f64) -> (f64, f64) {
        let mut d1 = C0;
        let mut d2 = C0;
        for w in self.frequencies() {
            let e = self.coeff(w) * Complex64::from_polar(1.0, w as f64 * x);
            let wf = w as f64;
            d1 += e * Complex64::new(0.0, wf);
            d2 -= e * wf * wf;
        }
        (d1.re, d2.re)
    }

    /// `a·g + b`.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        let mut coeffs: Vec<Complex64> = self.coeffs.iter().map(|c| c * a).collect();
        coeffs[self.degree] += b;
        Self {
            degree: self.degree,
            coeffs,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = self.degree.max(other.degree) as i64;
        (-d..=d)
            .map(|w| (self.coeff(w) - other.coeff(w)).norm())
            .fold(0.0, f64::max)
    }

    /// Minimum and maximum over one period: grid scan of `grid` points, then
    /// Newton refinement of both extrema.
    pub fn extrema(&self, grid: usize) -> (f64, f64) {
        let xs: Vec<f64> = (0..grid).map(|k| TAU * k as f64 / grid as f64).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| self.evaluate(x)).collect();
        let arg = |better: fn(f64, f64) -> bool| {
            (0..grid).fold(0, |best, k| if better(vals[k], vals[best]) { k } else { best })
        };
        let polish = |x0: f64, v0: f64, is_max: bool| {
            let mut x = x0;
            let h = TAU / grid as f64;
            for _ in 0..30 {
                let (d1, d2) = self.derivatives(x);
                if d2 == 0.0 || (is_max && d2 > 0.0) || (!is_max && d2 < 0.0) {
                    break;
                }
                let step = d1 / d2;
                x -= step.clamp(-h, h);
                if step.abs() < 1e-15 {
                    break;
                }
            }
            let v = self.evaluate(x);
            if is_max {
                v.max(v0)
            } else {
                v.min(v0)
            }
        };
        let imin = arg(|a, b| a < b);
        let imax = arg(|a, b| a > b);
        (polish(xs[imin], vals[imin], false), polish(xs[imax], vals[imax], true))
    }
}

/// Inputs and targets for supervised fitting.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    inputs: Vec<f64>,
    targets: Vec<f64>,
}

impl Dataset {
    pub fn new(inputs: Vec<f64>, targets: Vec<f64>) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                got: targets.len(),
            });
        }
        if inputs.is_empty() {
            return Err(Error::InvalidModel("empty dataset".into()));
        }
        if inputs.iter().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dataset".into()));
        }
        Ok(Self { inputs, targets })
    }

    /// Samples `g` at `n` equispaced points on `[lo, hi]`, both ends included.
    pub fn sample(g: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Result<Self> {
        let inputs = linspace(lo, hi, n);
        let targets = inputs.iter().map(|&x| g(x)).collect();
        Self::new(inputs, targets)
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// CSV with header `x,target`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,target\n");
        for (x, g) in self.inputs.iter().zip(&self.targets) {
            let _ = writeln!(s, "{x:.16e},{g:.16e}");
        }
        s
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub const TARGET_POINTS: usize = 250;
pub const TARGET_DOMAIN: (f64, f64) = (-2.0 * PI, 2.0 * PI);
const NORMALISATION_GRID: usize = 1000;

/// Random real series of `degree` with coefficients in `[−1, 1]`, scaled to
/// unit peak-to-peak.
pub fn random_unit_series<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Result<FourierSeries> {
    if degree == 0 {
        return Err(Error::InvalidModel("target degree must be ≥ 1".into()));
    }
    let mut coeffs = vec![C0; 2 * degree + 1];
    coeffs[degree] = Complex64::new(rng.gen_range(-1.0..=1.0), 0.0);
    for w in 1..=degree {
        let c = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        coeffs[degree + w] = c;
        coeffs[degree - w] = c.conj();
    }
    let raw = FourierSeries::new(degree, coeffs)?;
    let (lo, hi) = raw.extrema(NORMALISATION_GRID);
    let ptp = hi - lo;
    if ptp <= 0.0 {
        return Err(Error::Diagnostic("degenerate target draw".into()));
    }
    Ok(raw.affine(1.0 / ptp, 0.0))
}

/// Target `g = a·g′ + b` with `g′` of unit peak-to-peak, plus its dataset of
/// 250 points on `[−2π, 2π]`. `b = None` centres the target on zero.
pub fn random_target(degree: usize, seed: u64, a: f64, b: Option<f64>) -> Result<(FourierSeries, Dataset)> {
    let mut rng = trial_rng(seed, "target", degree as u64);
    let unit = random_unit_series(degree, &mut rng)?;
    let (lo, hi) = unit.extrema(NORMALISATION_GRID);
    let b = b.unwrap_or(-a * (lo + hi) / 2.0);
    let g = unit.affine(a, b);
    let data = Dataset::sample(|x| g.evaluate(x), TARGET_DOMAIN.0, TARGET_DOMAIN.1, TARGET_POINTS)?;
    Ok((g, data))
}

/// All `n` DFT bins of `f` sampled on `[0, 2π)`, indexed by signed frequency.
fn dft(samples: &[f64]) -> Vec<(i64, Complex64)> {
    let n = samples.len();
    (0..n)
        .map(|k| {
            let w = if k <= n / 2 { k as i64 } else { k as i64 - n as i64 };
            let c: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, &f)| f * Complex64::from_polar(1.0, -TAU * (k * j % n) as f64 / n as f64))
                .sum();
            (w, c / n as f64)
        })
        .collect()
}

/// In-band series plus the total magnitude of the out-of-band DFT bins.
pub fn dft_spectrum(model: &ReuploadModel, oversample: usize) -> Result<(FourierSeries, f64)> {
    if oversample == 0 {
        return Err(Error::OutOfRange("oversample must be ≥ 1".into()));
    }
    let l = model.layers();
    let n = oversample * (2 * l + 1);
    let samples: Vec<f64> = (0..n).map(|j| model.forward(TAU * j as f64 / n as f64)).collect();
    let mut coeffs = vec![C0; 2 * l + 1];
    let mut leak = 0.0;
    for (w, c) in dft(&samples) {
        if w.unsigned_abs() as usize <= l {
            coeffs[(w + l as i64) as usize] = c;
        } else {
            leak += c.norm();
        }
    }
    Ok((FourierSeries::new(l, coeffs)?, leak))
}

/// Fourier coefficients of the model output from a sampled DFT; fails if
/// any weight appears outside `−L..L`.
pub fn extract_fourier(model: &ReuploadModel, oversample: usize) -> Result<FourierSeries> {
    let (series, leak) = dft_spectrum(model, oversample)?;
    if leak >= BAND_TOL {
        return Err(Error::Diagnostic(format!(
            "out-of-band spectral weight {leak:e} exceeds {BAND_TOL:e}"
        )));
    }
    Ok(series)
}

pub const PATHSUM_MAX_LAYERS: usize = 3;

/// Coefficients from the explicit path sum, and for Pauli noise the
/// attenuation `n_ω = c̃_ω / c_ω` relative to the noiseless model.
#[derive(Clone, Debug)]
pub struct PathSum {
    pub noisy: FourierSeries,
    pub noiseless: FourierSeries,
    /// Indexed like the series coefficients; `None` where `|c_ω| < 1e-9`.
    pub attenuation: Vec<Option<Complex64>>,
}

/// Enumerates every path through the eigen-operators `|e_a⟩⟨e_b|` of the
/// encoding generator. Noise must be a Pauli channel and `L ≤ 3`.
pub fn pathsum_coefficients(model: &ReuploadModel) -> Result<PathSum> {
    if model.layers() > PATHSUM_MAX_LAYERS {
        return Err(Error::Unsupported(format!(
            "path sum limited to L ≤ {PATHSUM_MAX_LAYERS}"
        )));
    }
    let r = realize(model.noise())?;
    let off_diag = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .any(|(i, j)| i != j && r.get(i, j) != 0.0);
    if off_diag {
        return Err(Error::Unsupported(format!(
            "path sum needs a Pauli channel, got {}",
            model.noise()
        )));
    }
    let noisy = pathsum_series(model)?;
    let noiseless = pathsum_series(&model.with_noise(crate::channels::NoiseSpec::none())?)?;
    let attenuation = noisy
        .coeffs()
        .iter()
        .zip(noiseless.coeffs())
        .map(|(a, b)| (b.norm() >= 1e-9).then(|| a / b))
        .collect();
    Ok(PathSum {
        noisy,
        noiseless,
        attenuation,
    })
}

fn pathsum_series(model: &ReuploadModel) -> Result<FourierSeries> {
    let l = model.layers();
    let variant = model.variant();
    let generator = variant.encoding_axis().matrix().scale(0.5.into());
    let (lambda, vecs) = hermitian_eigen(&generator)?;

    // Eigen-operators E_ab and their Pauli coefficient vectors.
    let mut modes = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            let e = ComplexMatrix::from_fn(2, 2, |i, j| vecs[(i, a)] * vecs[(j, b)].conj());
            modes.push((lambda[b] - lambda[a], vectorize_complex(&e, 1)?));
        }
    }

    // Segment maps as 4×4 PTMs: G₁ = N·W₁, G_l = N·W_l·N for l ≥ 2.
    let block = |l: usize, trailing_noise_first: bool| -> Result<[[f64; 4]; 4]> {
        let nr = realize(model.noise())?;
        let ax = variant.block_axis();
        let t = model.theta();
        let mut seq = Vec::new();
        if trailing_noise_first {
            seq.push(nr.clone());
        }
        seq.push(crate::gates::rotation_ptm(ax, t[3 * l]));
        seq.push(crate::gates::rotation_ptm(crate::pauli::Axis::Y, t[3 * l + 1]));
        seq.push(crate::gates::rotation_ptm(ax, t[3 * l + 2]));
        seq.push(nr);
        let r = crate::ptm::compose(&seq)?;
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = r.get(i, j);
            }
        }
        Ok(m)
    };
    let segments: Vec<[[f64; 4]; 4]> = (0..=l).map(|k| block(k, k > 0)).collect::<Result<_>>()?;

    let apply = |m: &[[f64; 4]; 4], v: &[Complex64]| -> Vec<Complex64> {
        (0..4).map(|i| (0..4).map(|j| v[j] * m[i][j]).sum()).collect()
    };
    // ⟨⟨E|Y⟩⟩ = tr(E†Y) = 2 Σ conj(e_k) y_k.
    let overlap = |e: &[Complex64], y: &[Complex64]| -> Complex64 {
        e.iter().zip(y).map(|(a, b)| a.conj() * b).sum::<Complex64>() * 2.0
    };

    let ro = variant.readout_axis().digit() as usize;
    let mut rho0 = vec![C0; 4];
    rho0[0] = 0.5.into();
    rho0[ro] = 0.5.into();
    // f = 2 Σ M_k y_k with M = the readout Pauli (coefficient 1 on its index).
    let readout = |y: &[Complex64]| y[ro] * 2.0;

    let mut coeffs = vec![C0; 2 * l + 1];
    let n_paths = 4usize.pow(l as u32);
    for path in 0..n_paths {
        let mut y = apply(&segments[0], &rho0);
        let mut amp = Complex64::new(1.0, 0.0);
        let mut omega = 0.0;
        for step in 0..l {
            let idx = (path >> (2 * step)) & 3;
            let (w, e) = &modes[idx];
            amp *= overlap(e, &y);
            omega += w;
            y = apply(&segments[step + 1], e);
        }
        let w = omega.round() as i64;
        coeffs[(w + l as i64) as usize] += amp * readout(&y);
    }
    FourierSeries::new(l, coeffs)
}
