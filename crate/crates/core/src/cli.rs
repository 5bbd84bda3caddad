//! Experiment driver behind the `noisy-vqa` binary.
//!
//! Every subcommand resolves to an [`ExperimentConfig`], runs it on a
//! worker pool sized by `--workers` or `NOISY_VQA_WORKERS`, writes its CSVs
//! into `run.output` and finishes with `manifest.toml`, which is itself a
//! valid config that reproduces the run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::channels::{realize, NoiseSpec, Twirl};
use crate::config::{Experiment, ExperimentConfig, ManifestSection};
use crate::error::{Error, Result};
use crate::fourier::random_target;
use crate::metrics::{depth_sweep, expressivity_range, gradient_distribution, output_bounds, OffsetMode, RangeResult};
use crate::optimizer::{train, AdamConfig, TrainConfig};
use crate::reuploading::ReuploadModel;
use crate::rng::trial_rng;
use crate::vqe::{train_vqe, VqeProblem, VqeResult};

pub const WORKERS_ENV: &str = "NOISY_VQA_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DIAGNOSTIC: i32 = 3;

pub const RANGE_HEADER: &str = "seed,noise_kind,twirl,strength,L,max_range,iterations";
pub const GRADS_HEADER: &str = "noise_kind,twirl,strength,sample_id,grad_abs";
pub const GRADS_SUMMARY_HEADER: &str =
    "noise_kind,twirl,strength,samples,q1,median,q3,whisker_lo,whisker_hi,min,max,mean";
pub const BOUNDS_HEADER: &str = "noise_kind,strength,f_min,f_max";
pub const VQE_HEADER: &str = "noise_kind,twirl,strength,restart,final_energy,E0,percentage_error,steps";
pub const DATASET_HEADER: &str = "x,target";
pub const FIT_HEADER: &str = "x,target,prediction";
pub const LOSS_HEADER: &str = "step,loss";
pub const PTM_HEADER: &str = "noise_kind,twirl,strength,row,col,value";

/// Exit status for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Diagnostic(_)
        | Error::NonFinite(_)
        | Error::NotUnitary(_)
        | Error::NotHermitian(_)
        | Error::IncompleteKraus(_)
        | Error::ComplexPtm(_) => EXIT_DIAGNOSTIC,
        _ => EXIT_CONFIG,
    }
}

/// 17 significant digits, locale-free.
pub fn csv_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(dir: &Path, name: &str, header: &str, rows: &[String], files: &mut Vec<String>) -> Result<()> {
    let mut text = String::with_capacity(64 * (rows.len() + 1));
    text.push_str(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    std::fs::write(dir.join(name), text)?;
    files.push(name.to_string());
    Ok(())
}

fn noise_cols(n: &NoiseSpec) -> String {
    format!("{},{},{}", n.kind.as_str(), n.twirl.as_str(), csv_f64(n.effective_strength()))
}

fn range_rows(results: &[RangeResult]) -> Vec<String> {
    results
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{}",
                r.seed,
                noise_cols(&r.noise),
                r.layers,
                csv_f64(r.max_range),
                r.iterations
            )
        })
        .collect()
}

/// What a run printed and wrote.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub stdout: String,
    /// File names relative to the output directory, manifest last.
    pub files: Vec<String>,
    pub output: PathBuf,
}

/// Runs `cfg` on the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let dir = cfg.run.output.clone();
    std::fs::create_dir_all(&dir)?;
    let mut out = String::new();
    let mut files = Vec::new();
    let settings = cfg.noise.settings()?;
    let variant = cfg.model.variant;
    let layers = cfg.model.layers;

    match cfg.experiment.name {
        Experiment::ChannelInspect | Experiment::Twirl => {
            let mut rows = Vec::new();
            for n in &settings {
                let r = realize(n)?;
                let _ = writeln!(out, "# {n}");
                let _ = write!(out, "{r}");
                let min_eig = r.min_choi_eigenvalue();
                let _ = writeln!(out, "min Choi eigenvalue: {min_eig:.6e}");
                if cfg.experiment.name == Experiment::Twirl {
                    let d = r.diag();
                    let _ = writeln!(out, "diag: ({:.6}, {:.6}, {:.6}, {:.6})", d[0], d[1], d[2], d[3]);
                    match n.twirl {
                        Twirl::Pauli => {
                            let p = crate::channels::pauli_probs_from_diagonal([d[0], d[1], d[2], d[3]]);
                            let _ = writeln!(out, "p = ({:.6}, {:.6}, {:.6})", p[1], p[2], p[3]);
                        }
                        Twirl::Clifford => {
                            let p = 1.0 - (d[1] + d[2] + d[3]) / 3.0;
                            let _ = writeln!(out, "p_depol = {p:.6}");
                        }
                        Twirl::None => {}
                    }
                }
                for i in 0..4 {
                    for j in 0..4 {
                        rows.push(format!("{},{i},{j},{}", noise_cols(n), csv_f64(r.get(i, j))));
                    }
                }
                r.check_cptp(1e-9, 1e-12)?;
            }
            write_csv(&dir, "ptm.csv", PTM_HEADER, &rows, &mut files)?;
        }
        Experiment::Fit => {
            let seed = cfg.run.seed;
            let offset = cfg.model.offset_mode()?;
            let fixed = match offset {
                OffsetMode::Fixed(b) => Some(b),
                _ => None,
            };
            let (_, data) = random_target(layers, seed, cfg.run.amplitude, fixed)?;
            write_csv(&dir, "dataset.csv", DATASET_HEADER, &dataset_rows(&data), &mut files)?;
            let tc = TrainConfig {
                fit_offset: offset == OffsetMode::Fitted,
                ..TrainConfig::for_layers(layers)?
            };
            let n = &settings[0];
            let model = ReuploadModel::new(layers, crate::metrics::initial_theta(seed, layers), n.clone(), variant)?;
            let mut shuffle = trial_rng(seed, "shuffle", layers as u64);
            let res = train(&model, &data, &tc, &mut shuffle)?;
            let trained = model.with_theta(res.final_theta.clone())?;
            let fit: Vec<String> = data
                .inputs()
                .iter()
                .zip(data.targets())
                .map(|(&x, &g)| format!("{},{},{}", csv_f64(x), csv_f64(g), csv_f64(trained.forward(x) + res.offset)))
                .collect();
            write_csv(&dir, "fit.csv", FIT_HEADER, &fit, &mut files)?;
            let loss: Vec<String> = res
                .loss_history
                .iter()
                .enumerate()
                .map(|(i, l)| format!("{i},{}", csv_f64(*l)))
                .collect();
            write_csv(&dir, "loss.csv", LOSS_HEADER, &loss, &mut files)?;
            let _ = writeln!(
                out,
                "{n}: converged={} epochs={} updates={} final_loss={:.3e} offset={:.6}",
                res.converged, res.steps_used, res.updates, res.final_loss, res.offset
            );
        }
        Experiment::Expressivity => {
            let seeds = cfg.run.seed_list();
            let search = cfg.range_search()?;
            let mut all = Vec::new();
            for n in &settings {
                let r = expressivity_range(layers, n, variant, &seeds, search)?;
                let _ = writeln!(out, "{n}: mean max_range {:.4}", crate::metrics::mean_range(&r));
                all.extend(r);
            }
            write_csv(&dir, "range.csv", RANGE_HEADER, &range_rows(&all), &mut files)?;
        }
        Experiment::DepthSweep => {
            let seeds = cfg.run.seed_list();
            let all = depth_sweep(&cfg.model.depths, &settings, variant, &seeds, cfg.range_search()?)?;
            for chunk in all.chunks(seeds.len()) {
                let _ = writeln!(
                    out,
                    "L={} {}: mean max_range {:.4}",
                    chunk[0].layers,
                    chunk[0].noise,
                    crate::metrics::mean_range(chunk)
                );
            }
            write_csv(&dir, "range.csv", RANGE_HEADER, &range_rows(&all), &mut files)?;
        }
        Experiment::Bounds => {
            let mut rows = Vec::new();
            for n in &settings {
                let (lo, hi) = output_bounds(layers, n, variant, cfg.run.seed)?;
                let kind = match n.twirl {
                    Twirl::None => n.kind.as_str().to_string(),
                    t => format!("{}/{}", n.kind.as_str(), t.as_str()),
                };
                rows.push(format!("{kind},{},{},{}", csv_f64(n.effective_strength()), csv_f64(lo), csv_f64(hi)));
                let _ = writeln!(out, "{n}: [{lo:.4}, {hi:.4}]");
            }
            write_csv(&dir, "bounds.csv", BOUNDS_HEADER, &rows, &mut files)?;
        }
        Experiment::Gradients => {
            let dist = gradient_distribution(layers, &settings, variant, cfg.run.samples, cfg.run.seed)?;
            let mut rows = Vec::new();
            let mut summary = Vec::new();
            for (stats, values) in &dist {
                let cols = noise_cols(&stats.noise);
                rows.extend(values.iter().enumerate().map(|(i, g)| format!("{cols},{i},{}", csv_f64(*g))));
                summary.push(format!(
                    "{cols},{},{}",
                    stats.samples,
                    [
                        stats.q1,
                        stats.median,
                        stats.q3,
                        stats.whisker_lo,
                        stats.whisker_hi,
                        stats.min,
                        stats.max,
                        stats.mean
                    ]
                    .map(csv_f64)
                    .join(",")
                ));
                let _ = writeln!(out, "{}: median |grad| {:.4e}", stats.noise, stats.median);
            }
            write_csv(&dir, "grads.csv", GRADS_HEADER, &rows, &mut files)?;
            write_csv(&dir, "grads_summary.csv", GRADS_SUMMARY_HEADER, &summary, &mut files)?;
        }
        Experiment::Vqe => {
            let adam = AdamConfig::vqe_default();
            let mut rows = Vec::new();
            for n in &settings {
                let problem = VqeProblem::new(cfg.model.tfim(), cfg.model.ansatz(), n.clone())?;
                let results = train_vqe(&problem, &adam, cfg.run.restarts, cfg.run.seed)?;
                rows.extend(vqe_rows(n, &results));
                let _ = writeln!(
                    out,
                    "{n}: median error {:.4}% mean {:.4}% (E0 = {:.6})",
                    crate::vqe::median_error(&results),
                    crate::vqe::mean_error(&results),
                    problem.e0()
                );
            }
            write_csv(&dir, "vqe.csv", VQE_HEADER, &rows, &mut files)?;
        }
    }

    let mut manifest = cfg.clone();
    files.push("manifest.toml".into());
    manifest.manifest = Some(ManifestSection {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed: cfg.run.seed,
        files: files.clone(),
    });
    std::fs::write(dir.join("manifest.toml"), manifest.to_toml())?;
    Ok(Report {
        stdout: out,
        files,
        output: dir,
    })
}

fn dataset_rows(data: &crate::fourier::Dataset) -> Vec<String> {
    data.inputs()
        .iter()
        .zip(data.targets())
        .map(|(&x, &g)| format!("{},{}", csv_f64(x), csv_f64(g)))
        .collect()
}

fn vqe_rows(n: &NoiseSpec, results: &[VqeResult]) -> Vec<String> {
    results
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{}",
                noise_cols(n),
                r.restart,
                csv_f64(r.final_energy),
                csv_f64(r.e0),
                csv_f64(r.percentage_error),
                r.steps
            )
        })
        .collect()
}

#[derive(Parser, Debug)]
#[command(
    name = "noisy-vqa",
    version,
    about = "Noisy variational circuit experiments",
    after_help = "Any config key can be overridden with --section.key=value, e.g. --noise.strength=0.2"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the PTM of a noise channel.
    ChannelInspect(Flags),
    /// Print a twirled channel and its Pauli or depolarizing parameters.
    Twirl(Flags),
    /// Train one model on one seeded target.
    Fit(Flags),
    /// Output-range search over seeds.
    Expressivity(Flags),
    /// Extreme reachable mean outputs.
    Bounds(Flags),
    /// Gradient-magnitude distributions.
    Gradients(Flags),
    /// Range search at every depth.
    DepthSweep(Flags),
    /// Transverse-field Ising VQE.
    Vqe(Flags),
    /// Run a config or manifest file as is.
    Run(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Config file; `run` requires it.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Noise kind.
    #[arg(long, visible_alias = "noise")]
    kind: Option<String>,
    #[arg(long)]
    strength: Option<f64>,
    /// Comma-separated strength sweep.
    #[arg(long, value_delimiter = ',')]
    strengths: Option<Vec<f64>>,
    #[arg(long)]
    twirl: Option<String>,
    /// Comma-separated twirl sweep.
    #[arg(long, value_delimiter = ',')]
    twirls: Option<Vec<String>>,
    #[arg(short = 'L', long)]
    layers: Option<usize>,
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    offset: Option<String>,
    #[arg(long)]
    placement: Option<String>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of target seeds.
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Worker threads; overrides the environment.
    #[arg(long)]
    workers: Option<usize>,
}

fn quoted(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

impl Flags {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut o = Vec::new();
        let mut put = |k: &str, v: String| o.push((k.to_string(), v));
        if let Some(v) = &self.kind {
            put("noise.kind", quoted(v));
        }
        if let Some(v) = self.strength {
            put("noise.strength", format!("{v:?}"));
        }
        if let Some(v) = &self.strengths {
            put("noise.strengths", format!("[{}]", v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")));
        }
        if let Some(v) = &self.twirl {
            put("noise.twirl", quoted(v));
        }
        if let Some(v) = &self.twirls {
            put("noise.twirls", format!("[{}]", v.iter().map(|x| quoted(x)).collect::<Vec<_>>().join(",")));
        }
        if let Some(v) = self.layers {
            put("model.layers", v.to_string());
        }
        if let Some(v) = &self.variant {
            put("model.variant", quoted(v));
        }
        if let Some(v) = &self.offset {
            put("model.offset", quoted(v));
        }
        if let Some(v) = &self.placement {
            put("model.placement", quoted(v));
        }
        if let Some(v) = self.seed {
            put("run.seed", v.to_string());
        }
        if let Some(v) = self.seeds {
            put("run.seeds", v.to_string());
        }
        if let Some(v) = self.restarts {
            put("run.restarts", v.to_string());
        }
        if let Some(v) = self.samples {
            put("run.samples", v.to_string());
        }
        if let Some(v) = &self.output {
            put("run.output", quoted(&v.to_string_lossy()));
        }
        o
    }
}

/// Pulls `--section.key=value` arguments out of `args`.
pub fn split_overrides(args: Vec<String>) -> (Vec<String>, Vec<(String, String)>) {
    let mut rest = Vec::new();
    let mut overrides = Vec::new();
    for a in args {
        if let Some(body) = a.strip_prefix("--") {
            if let Some((k, v)) = body.split_once('=') {
                if k.contains('.') {
                    overrides.push((k.to_string(), v.to_string()));
                    continue;
                }
            }
        }
        rest.push(a);
    }
    (rest, overrides)
}

/// Resolves the command line (program name first) into a config and a
/// worker count.
pub fn resolve(args: Vec<String>) -> Result<(ExperimentConfig, Option<usize>)> {
    let (rest, dotted) = split_overrides(args);
    let cli = Cli::try_parse_from(rest).map_err(|e| Error::Config(e.to_string()))?;
    resolve_parsed(cli, dotted)
}

fn resolve_parsed(cli: Cli, dotted: Vec<(String, String)>) -> Result<(ExperimentConfig, Option<usize>)> {
    let (flags, name) = match cli.command {
        Command::ChannelInspect(f) => (f, Some(Experiment::ChannelInspect)),
        Command::Twirl(f) => (f, Some(Experiment::Twirl)),
        Command::Fit(f) => (f, Some(Experiment::Fit)),
        Command::Expressivity(f) => (f, Some(Experiment::Expressivity)),
        Command::Bounds(f) => (f, Some(Experiment::Bounds)),
        Command::Gradients(f) => (f, Some(Experiment::Gradients)),
        Command::DepthSweep(f) => (f, Some(Experiment::DepthSweep)),
        Command::Vqe(f) => (f, Some(Experiment::Vqe)),
        Command::Run(f) => {
            if f.config.is_none() {
                return Err(Error::Config("`run` needs --config".into()));
            }
            (f, None)
        }
    };
    let text = match &flags.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut overrides = Vec::new();
    if let Some(e) = name {
        overrides.push(("experiment.name".to_string(), quoted(e.as_str())));
    }
    overrides.extend(flags.overrides());
    overrides.extend(dotted);
    let cfg = ExperimentConfig::from_toml_with_overrides(&text, &overrides)?;
    let workers = match flags.workers {
        Some(w) => Some(w),
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("{WORKERS_ENV}=`{v}` is not a count")))?,
            ),
            Err(_) => None,
        },
    };
    if workers == Some(0) {
        return Err(Error::Config("worker count must be positive".into()));
    }
    Ok((cfg, workers))
}

/// Runs `cfg` on a dedicated pool of `workers` threads (rayon's default
/// when `None`).
pub fn run_with_workers(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Report> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w);
    }
    let pool = b.build().map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| run_experiment(cfg))
}

/// Full command-line entry point; returns the process exit code.
pub fn main_with_args(args: Vec<String>) -> i32 {
    let (rest, dotted) = split_overrides(args);
    let cli = match Cli::try_parse_from(rest) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = resolve_parsed(cli, dotted).and_then(|(cfg, workers)| {
        if cfg.noise.settings()?.iter().any(NoiseSpec::outside_protocol) {
            eprintln!("warning: twirled coherent noise is outside the studied protocol");
        }
        run_with_workers(&cfg, workers)
    });
    match result {
        Ok(report) => {
            print!("{}", report.stdout);
            println!("wrote {} files to {}", report.files.len(), report.output.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        std::iter::once("noisy-vqa".to_string())
            .chain(s.split_whitespace().map(String::from))
            .collect()
    }

    #[test]
    fn short_flags_and_dotted_overrides() {
        let (cfg, w) = resolve(args(
            "twirl --kind amplitude_damping --strength 0.36 --twirl pauli --noise.strength=0.2 --workers 2",
        ))
        .unwrap();
        assert_eq!(cfg.experiment.name, Experiment::Twirl);
        assert_eq!(cfg.noise.settings().unwrap(), vec![NoiseSpec::amplitude_damping(0.2).with_twirl(Twirl::Pauli)]);
        assert_eq!(w, Some(2));
    }

    #[test]
    fn bad_input_is_config_error() {
        for a in ["vqe --noise.bogus=1", "vqe --kind nope", "run", "vqe --strength 2 --kind depolarizing"] {
            let e = resolve(args(a)).unwrap_err();
            assert_eq!(exit_code(&e), EXIT_CONFIG, "{a}");
        }
    }

    #[test]
    fn diagnostics_map_to_three() {
        assert_eq!(exit_code(&Error::Diagnostic("x".into())), EXIT_DIAGNOSTIC);
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
    }

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(csv_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(csv_f64(-3.0), "-3.0000000000000000e0");
    }
}
