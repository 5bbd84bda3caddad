//! Experiment configuration: a sectioned TOML file plus `section.key=value`
//! overrides.
//!
//! ```toml
//! [experiment]
//! name = "expressivity"
//!
//! [noise]
//! kind = "amplitude_damping"
//! strength = 0.2
//! twirls = ["none", "pauli", "clifford"]
//!
//! [model]
//! layers = 2
//!
//! [run]
//! seed = 0
//! seeds = 10
//! output = "out/expressivity"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channels::{NoiseKind, NoiseSpec, Twirl};
use crate::error::{Error, Result};
use crate::metrics::{OffsetMode, RangeSearch};
use crate::pauli::Axis;
use crate::reuploading::BasisVariant;
use crate::vqe::{NoisePlacement, TfimSpec, VqeAnsatz};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ChannelInspect,
    Twirl,
    Fit,
    Expressivity,
    Bounds,
    Gradients,
    DepthSweep,
    Vqe,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::ChannelInspect,
        Experiment::Twirl,
        Experiment::Fit,
        Experiment::Expressivity,
        Experiment::Bounds,
        Experiment::Gradients,
        Experiment::DepthSweep,
        Experiment::Vqe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::ChannelInspect => "channel-inspect",
            Experiment::Twirl => "twirl",
            Experiment::Fit => "fit",
            Experiment::Expressivity => "expressivity",
            Experiment::Bounds => "bounds",
            Experiment::Gradients => "gradients",
            Experiment::DepthSweep => "depth-sweep",
            Experiment::Vqe => "vqe",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: Experiment,
}

/// Base channel plus optional sweep lists. `strengths` replaces `strength`
/// and `twirls` replaces `twirl` when present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default)]
    pub kind: NoiseKind,
    #[serde(default)]
    pub strength: f64,
    #[serde(default)]
    pub pauli_probs: [f64; 3],
    #[serde(default = "default_axis")]
    pub coherent_axis: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherent_angle: Option<f64>,
    #[serde(default)]
    pub twirl: Twirl,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strengths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twirls: Option<Vec<Twirl>>,
}

fn default_axis() -> Axis {
    Axis::Z
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self::from_spec(&NoiseSpec::none())
    }
}

impl NoiseSection {
    pub fn from_spec(s: &NoiseSpec) -> Self {
        Self {
            kind: s.kind,
            strength: s.strength,
            pauli_probs: s.pauli_probs,
            coherent_axis: s.coherent_axis,
            coherent_angle: s.coherent_angle,
            twirl: s.twirl,
            strengths: None,
            twirls: None,
        }
    }

    pub fn base(&self) -> NoiseSpec {
        NoiseSpec {
            kind: self.kind,
            strength: self.strength,
            pauli_probs: self.pauli_probs,
            coherent_axis: self.coherent_axis,
            coherent_angle: self.coherent_angle,
            twirl: self.twirl,
        }
    }

    /// Every setting of the sweep, twirl-major.
    pub fn settings(&self) -> Result<Vec<NoiseSpec>> {
        let base = self.base();
        let twirls = self.twirls.clone().unwrap_or_else(|| vec![self.twirl]);
        let mut out = Vec::new();
        for t in twirls {
            match &self.strengths {
                Some(list) => {
                    for &s in list {
                        out.push(base.with_strength(s).with_twirl(t));
                    }
                }
                None => out.push(base.clone().with_twirl(t)),
            }
        }
        if out.is_empty() {
            return Err(Error::Config("noise sweep is empty".into()));
        }
        for n in &out {
            n.validate()?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "default_layers")]
    pub layers: usize,
    /// Depths for `depth-sweep`.
    #[serde(default = "default_depths")]
    pub depths: Vec<usize>,
    #[serde(default)]
    pub variant: BasisVariant,
    /// `fitted`, `centered` or a number.
    #[serde(default = "default_offset")]
    pub offset: String,
    #[serde(default = "default_n")]
    pub n_qubits: usize,
    #[serde(default = "default_j", rename = "J")]
    pub j: f64,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_true")]
    pub periodic: bool,
    #[serde(default = "default_trotter")]
    pub trotter_steps: usize,
    #[serde(default)]
    pub placement: NoisePlacement,
}

fn default_layers() -> usize {
    2
}
fn default_depths() -> Vec<usize> {
    (1..=6).collect()
}
fn default_offset() -> String {
    "fitted".into()
}
fn default_n() -> usize {
    3
}
fn default_j() -> f64 {
    1.0
}
fn default_h() -> f64 {
    0.5
}
fn default_true() -> bool {
    true
}
fn default_trotter() -> usize {
    4
}

impl Default for ModelSection {
    fn default() -> Self {
        toml::from_str("").expect("defaults deserialize")
    }
}

impl ModelSection {
    pub fn offset_mode(&self) -> Result<OffsetMode> {
        OffsetMode::parse(&self.offset)
    }

    pub fn tfim(&self) -> TfimSpec {
        TfimSpec {
            n_qubits: self.n_qubits,
            j: self.j,
            h: self.h,
            periodic: self.periodic,
        }
    }

    pub fn ansatz(&self) -> VqeAnsatz {
        VqeAnsatz {
            trotter_steps: self.trotter_steps,
            placement: self.placement,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Master seed.
    #[serde(default)]
    pub seed: u64,
    /// Number of target seeds; trial `i` uses target seed `seed + i`.
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    /// Gradient samples per noise setting.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Target amplitude for `fit`.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub a_lo: f64,
    #[serde(default = "default_a_hi")]
    pub a_hi: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_seeds() -> usize {
    10
}
fn default_restarts() -> usize {
    20
}
fn default_samples() -> usize {
    2000
}
fn default_amplitude() -> f64 {
    1.0
}
fn default_a_hi() -> f64 {
    4.0
}
fn default_tol() -> f64 {
    0.01
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunSection {
    fn default() -> Self {
        toml::from_str("").expect("defaults deserialize")
    }
}

impl RunSection {
    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64).map(|i| self.seed.wrapping_add(i)).collect()
    }
}

/// Provenance block written into `manifest.toml`; ignored on input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestSection {
    pub artifact_version: String,
    pub master_seed: u64,
    pub files: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<ManifestSection>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment: ExperimentSection { name: experiment },
            noise: NoiseSection::default(),
            model: ModelSection::default(),
            run: RunSection::default(),
            manifest: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Loads `text` (may be empty apart from the experiment name) and applies
    /// `section.key=value` overrides in order.
    pub fn from_toml_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for (key, value) in overrides {
            apply_override(&mut table, key, value)?;
        }
        let cfg: Self = table.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn range_search(&self) -> Result<RangeSearch> {
        Ok(RangeSearch {
            a_lo: self.run.a_lo,
            a_hi: self.run.a_hi,
            tol: self.run.tol,
            offset: self.model.offset_mode()?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.settings()?;
        self.model.offset_mode()?;
        let r = &self.run;
        if !(r.tol > 0.0) || !(r.a_hi > r.a_lo) || !r.a_lo.is_finite() || !r.a_hi.is_finite() {
            return Err(Error::Config("run.a_lo < run.a_hi and run.tol > 0 required".into()));
        }
        if r.seeds == 0 || r.restarts == 0 || r.samples == 0 {
            return Err(Error::Config("run.seeds, run.restarts and run.samples must be positive".into()));
        }
        if self.model.depths.is_empty() {
            return Err(Error::Config("model.depths is empty".into()));
        }
        match self.experiment.name {
            Experiment::Vqe => self.model.tfim().validate(),
            _ => Ok(()),
        }
    }
}

/// Splits `section.key` and stores `value`, parsed as a TOML value when
/// possible and as a bare string otherwise.
pub fn apply_override(table: &mut toml::Table, key: &str, value: &str) -> Result<()> {
    let (section, field) = key
        .split_once('.')
        .ok_or_else(|| Error::Config(format!("override `{key}` must be section.key")))?;
    if section.is_empty() || field.is_empty() || field.contains('.') {
        return Err(Error::Config(format!("override `{key}` must be section.key")));
    }
    let parsed = toml::from_str::<toml::Table>(&format!("v = {value}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    match entry {
        toml::Value::Table(t) => {
            t.insert(field.to_string(), parsed);
            Ok(())
        }
        _ => Err(Error::Config(format!("`{section}` is not a section"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = ExperimentConfig::from_toml("[experiment]\nname = \"vqe\"\n").unwrap();
        assert_eq!(c.experiment.name, Experiment::Vqe);
        assert_eq!(c.model.layers, 2);
        assert_eq!(c.model.tfim(), TfimSpec::default());
        assert_eq!(c.run.restarts, 20);
        assert_eq!(c.noise.settings().unwrap(), vec![NoiseSpec::none()]);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_toml("[experiment]\nname = \"vqe\"\n[run]\nbogus = 1\n").is_err());
        assert!(ExperimentConfig::from_toml("[experiment]\nname = \"nope\"\n").is_err());
        assert!(ExperimentConfig::from_toml("[experiment]\nname = \"vqe\"\n[extra]\n").is_err());
    }

    #[test]
    fn overrides_parse_typed_and_bare_values() {
        let c = ExperimentConfig::from_toml_with_overrides(
            "",
            &[
                ("experiment.name".into(), "twirl".into()),
                ("noise.kind".into(), "amplitude_damping".into()),
                ("noise.strength".into(), "0.36".into()),
                ("noise.twirls".into(), "[\"pauli\", \"clifford\"]".into()),
                ("run.seed".into(), "7".into()),
            ],
        )
        .unwrap();
        assert_eq!(c.experiment.name, Experiment::Twirl);
        assert_eq!(c.run.seed, 7);
        let s = c.noise.settings().unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1], NoiseSpec::amplitude_damping(0.36).with_twirl(Twirl::Clifford));
        assert!(apply_override(&mut toml::Table::new(), "nodot", "1").is_err());
    }

    #[test]
    fn sweep_is_twirl_major() {
        let mut n = NoiseSection::from_spec(&NoiseSpec::amplitude_damping(0.0));
        n.strengths = Some(vec![0.1, 0.2]);
        n.twirls = Some(vec![Twirl::None, Twirl::Pauli]);
        let s = n.settings().unwrap();
        assert_eq!(s[1], NoiseSpec::amplitude_damping(0.2));
        assert_eq!(s[2], NoiseSpec::amplitude_damping(0.1).with_twirl(Twirl::Pauli));
        n.strengths = Some(vec![1.5]);
        assert!(n.settings().is_err());
    }

    #[test]
    fn toml_round_trip() {
        let mut c = ExperimentConfig::new(Experiment::Expressivity);
        c.noise = NoiseSection::from_spec(&NoiseSpec::pauli_axis(Axis::X, 0.1));
        c.noise.twirls = Some(vec![Twirl::None, Twirl::Clifford]);
        c.model.variant = BasisVariant::XSwapped;
        c.manifest = Some(ManifestSection {
            artifact_version: "0.1.0".into(),
            master_seed: 3,
            files: vec!["range.csv".into()],
        });
        let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }
}
