//! The `cvnn` command line.
//!
//! Exit status is 0 on success, 1 when a check or a training run fails, and
//! 2 for usage and configuration errors. Relative output paths are resolved
//! against `--out-dir`, which defaults to `$CVNN_OUT_DIR` or the current
//! directory.
//!
//! `train` reads an optional TOML file with `[network]`, `[train]`, `[task]`
//! and `[output]` sections; any flag given on the command line wins over the
//! file.

use crate::activations::{catalog, ActivationSpec, Category};
use crate::cplx::Complex;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::render::{domain_color_subject, surface_export, Part, Shading, Subject};
use crate::tasks::{gen_qam_with, gen_symmetry, gen_xor_with, Dataset, QamParams, QamScale, XorEncoding};
use crate::train::{train, Algorithm, StopReason, TrainConfig, TrainReport};
use crate::verify::{run_suites, GridSpec, Suite};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "cvnn", version, about = "Complex-valued neural network toolkit")]
struct Cli {
    /// Directory that relative output paths are resolved against.
    #[arg(long, env = "CVNN_OUT_DIR", default_value = ".", global = true)]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ListFormat {
    Table,
    Records,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the activation catalog.
    ListActivations {
        /// Only rows of this category (split-real-imaginary, amplitude-phase, fully-complex).
        #[arg(long)]
        category: Option<String>,
        /// `table` for people, `records` for one JSON object per line.
        #[arg(long, value_enum, default_value = "table")]
        format: ListFormat,
    },
    /// Train a network on a generated task.
    Train(TrainArgs),
    /// Run property-check suites.
    Verify {
        /// Suites to run: cr, bounds, grad, equiv, symmetry, all.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        suite: Vec<String>,
        /// Activation to check; repeat for several. Defaults to the whole catalog.
        #[arg(long)]
        af: Vec<String>,
        /// Seed for sampled checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON-lines report path.
        #[arg(long, default_value = "verify.jsonl")]
        report: PathBuf,
    },
    /// Domain-colour an activation or fixture, or export one part as CSV.
    #[command(group(ArgGroup::new("subject").required(true).args(["af", "fixture"])))]
    Render {
        /// Activation spec, e.g. `aptf` or `apsf(a=1,b=2)`.
        #[arg(long)]
        af: Option<String>,
        /// Builtin function: z, z2, conj, z4m1-over-z2.
        #[arg(long)]
        fixture: Option<String>,
        /// Window and resolution as `remin:remax:immin:immax:NXxNY`.
        #[arg(long, default_value = "-2:2:-2:2:256x256", allow_hyphen_values = true)]
        grid: String,
        /// arg-only, log-abs-rings or abs-arg-rings.
        #[arg(long, default_value = "arg-only")]
        shading: String,
        /// PPM output path. Written unless only `--csv` is given.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Part for CSV export: re, im, abs, arg.
        #[arg(long, default_value = "abs")]
        part: String,
        /// CSV output path for the chosen part.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug, Default)]
struct TrainArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// xor, symmetry or qam.
    #[arg(long)]
    task: Option<String>,
    /// Layer widths, input first, e.g. `2,3,1`.
    #[arg(long, value_delimiter = ',')]
    widths: Option<Vec<usize>>,
    /// Activation spec; give once for all layers or once per layer.
    #[arg(long)]
    af: Vec<String>,
    /// complex_derivative, partial_derivatives, cr_simplified or split.
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Seed for initialisation, shuffling and data.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shuffle: Option<bool>,
    #[arg(long)]
    stop_loss: Option<f64>,
    #[arg(long)]
    init_radius: Option<f64>,
    /// Bit count for the symmetry task.
    #[arg(long)]
    bits: Option<usize>,
    /// two-bit or real-target.
    #[arg(long)]
    xor_encoding: Option<String>,
    #[arg(long)]
    qam_order: Option<usize>,
    #[arg(long)]
    qam_n: Option<usize>,
    #[arg(long)]
    noise_sigma: Option<f64>,
    /// unit-power or integer.
    #[arg(long)]
    qam_scale: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    /// Defaults to `[input width, target width]` of the task.
    pub widths: Option<Vec<usize>>,
    pub activations: Vec<String>,
    pub init_radius: f64,
}

impl Default for NetworkSection {
    fn default() -> Self {
        NetworkSection { widths: None, activations: vec!["split_tanh".into()], init_radius: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub algorithm: String,
    pub learning_rate: f64,
    pub epochs: usize,
    pub shuffle: bool,
    pub seed: u64,
    pub stop_loss: f64,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        TrainSection {
            algorithm: d.algorithm.name().into(),
            learning_rate: d.learning_rate,
            epochs: d.epochs,
            shuffle: d.shuffle,
            seed: d.seed,
            stop_loss: d.stop_loss,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskSection {
    pub name: String,
    pub bits: usize,
    pub xor_encoding: String,
    pub qam_order: usize,
    pub qam_n: usize,
    pub noise_sigma: f64,
    /// Channel taps as `[re, im]` pairs.
    pub channel: Vec<[f64; 2]>,
    pub qam_scale: String,
}

impl Default for TaskSection {
    fn default() -> Self {
        TaskSection {
            name: "xor".into(),
            bits: 4,
            xor_encoding: "two-bit".into(),
            qam_order: 4,
            qam_n: 2000,
            noise_sigma: 0.05,
            channel: vec![[1.0, 0.0], [0.3, 0.2]],
            qam_scale: "unit-power".into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Subdirectory of the output directory for this run's files.
    pub dir: Option<PathBuf>,
}

/// Everything a `train` run needs, as read from TOML and flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub network: NetworkSection,
    pub train: TrainSection,
    pub task: TaskSection,
    pub output: OutputSection,
}

/// A run configuration with every field parsed and cross-checked.
pub struct ResolvedRun {
    pub data: Dataset,
    pub net: Network,
    pub cfg: TrainConfig,
    pub xor_encoding: Option<XorEncoding>,
}

fn field<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Config(format!("{name}: {e}")))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    fn apply(&mut self, a: &TrainArgs) {
        let (n, t, k) = (&mut self.network, &mut self.train, &mut self.task);
        if let Some(v) = &a.task {
            k.name = v.clone();
        }
        if let Some(v) = &a.widths {
            n.widths = Some(v.clone());
        }
        if !a.af.is_empty() {
            n.activations = a.af.clone();
        }
        if let Some(v) = &a.algo {
            t.algorithm = v.clone();
        }
        if let Some(v) = a.lr {
            t.learning_rate = v;
        }
        if let Some(v) = a.epochs {
            t.epochs = v;
        }
        if let Some(v) = a.seed {
            t.seed = v;
        }
        if let Some(v) = a.shuffle {
            t.shuffle = v;
        }
        if let Some(v) = a.stop_loss {
            t.stop_loss = v;
        }
        if let Some(v) = a.init_radius {
            n.init_radius = v;
        }
        if let Some(v) = a.bits {
            k.bits = v;
        }
        if let Some(v) = &a.xor_encoding {
            k.xor_encoding = v.clone();
        }
        if let Some(v) = a.qam_order {
            k.qam_order = v;
        }
        if let Some(v) = a.qam_n {
            k.qam_n = v;
        }
        if let Some(v) = a.noise_sigma {
            k.noise_sigma = v;
        }
        if let Some(v) = &a.qam_scale {
            k.qam_scale = v.clone();
        }
    }

    /// Parses and cross-checks every field. Errors name the offending field.
    pub fn resolve(&self) -> Result<ResolvedRun> {
        let t = &self.task;
        let seed = self.train.seed;
        let mut xor_encoding = None;
        let data = match t.name.as_str() {
            "xor" => {
                let enc: XorEncoding = field("task.xor_encoding", t.xor_encoding.parse())?;
                xor_encoding = Some(enc);
                gen_xor_with(enc)
            }
            "symmetry" => field("task.bits", gen_symmetry(t.bits, seed))?,
            "qam" => {
                let scale = match t.qam_scale.as_str() {
                    "unit-power" => QamScale::UnitPower,
                    "integer" => QamScale::Integer,
                    other => return Err(Error::Config(format!("task.qam_scale: unknown scale `{other}`"))),
                };
                let p = QamParams {
                    order: t.qam_order,
                    n: t.qam_n,
                    noise_sigma: t.noise_sigma,
                    channel: t.channel.iter().map(|&[re, im]| Complex::new(re, im)).collect(),
                    seed,
                    scale,
                };
                field("task", gen_qam_with(&p))?
            }
            other => return Err(Error::Config(format!("task.name: unknown task `{other}` (xor, symmetry, qam)"))),
        };
        let widths = self.network.widths.clone().unwrap_or_else(|| vec![data.input_width(), data.target_width()]);
        if widths.first() != Some(&data.input_width()) || widths.last() != Some(&data.target_width()) {
            return Err(Error::Config(format!(
                "network.widths: {widths:?} does not match the task's {} inputs and {} targets",
                data.input_width(),
                data.target_width()
            )));
        }
        let specs = self
            .network
            .activations
            .iter()
            .map(|s| s.parse::<ActivationSpec>())
            .collect::<Result<Vec<_>>>();
        let specs = field("network.activations", specs)?;
        let net = field("network", Network::init(&widths, &specs, self.network.init_radius, seed))?;
        let algorithm: Algorithm = field("train.algorithm", self.train.algorithm.parse())?;
        field("train.algorithm", algorithm.supports_network(&net))?;
        let cfg = TrainConfig {
            algorithm,
            learning_rate: self.train.learning_rate,
            epochs: self.train.epochs,
            shuffle: self.train.shuffle,
            seed,
            stop_loss: self.train.stop_loss,
        };
        field("train", cfg.validate())?;
        Ok(ResolvedRun { data, net, cfg, xor_encoding })
    }
}

/// Fraction of labelled samples the trained network classifies correctly.
pub fn accuracy(net: &Network, data: &Dataset, classify: impl Fn(Complex) -> u32) -> Option<f64> {
    let labelled: Vec<_> = data.samples.iter().filter(|s| s.label.is_some()).collect();
    if labelled.is_empty() {
        return None;
    }
    let hits = labelled
        .iter()
        .filter(|s| net.predict(&s.input).is_ok_and(|o| classify(o[0]) == s.label.unwrap()))
        .count();
    Some(hits as f64 / labelled.len() as f64)
}

fn resolve_path(out_dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        out_dir.join(p)
    }
}

fn ensure_parent(p: &Path) -> Result<()> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(())
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Runs the command line given by `args` (program name first) and returns
/// the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { out, err };
    let result = match &cli.command {
        Command::ListActivations { category, format } => list(&mut io, category.as_deref(), *format),
        Command::Train(args) => train_cmd(&mut io, &cli.out_dir, args),
        Command::Verify { suite, af, seed, report } => verify_cmd(&mut io, &cli.out_dir, suite, af, *seed, report),
        Command::Render { af, fixture, grid, shading, out, part, csv } => {
            render_cmd(&mut io, &cli.out_dir, af.as_deref(), fixture.as_deref(), grid, shading, out.as_deref(), part, csv.as_deref())
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            match e {
                Error::Io(_) => EXIT_FAILURE,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn list(io: &mut Io, category: Option<&str>, format: ListFormat) -> Result<i32> {
    let filter: Option<Category> = category.map(str::parse).transpose()?;
    let rows: Vec<ActivationSpec> = catalog().into_iter().filter(|s| filter.is_none_or(|c| s.category() == c)).collect();
    for s in &rows {
        match format {
            ListFormat::Records => writeln!(io.out, "{}", serde_json::to_string(&s.record())?)?,
            ListFormat::Table => {
                let loci: Vec<String> = s.singularities().iter().map(|d| d.locus.to_string()).collect();
                writeln!(
                    io.out,
                    "{:<34} {:<22} diff={:<5} holo={:<5} bound={:<12} singular=[{}]",
                    s.to_string(),
                    s.category().name(),
                    s.differentiable(),
                    s.holomorphic(),
                    s.bounded_on(),
                    loci.join("; ")
                )?
            }
        }
    }
    Ok(EXIT_OK)
}

fn train_cmd(io: &mut Io, out_dir: &Path, args: &TrainArgs) -> Result<i32> {
    let mut rc = match &args.config {
        Some(p) => RunConfig::from_toml(&std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?)?,
        None => RunConfig::default(),
    };
    rc.apply(args);
    let run = rc.resolve()?;
    if run.cfg.learning_rate == 0.0 {
        writeln!(io.err, "warning: learning rate is 0; weights will not change")?;
    }
    let report: TrainReport = train(run.net, &run.data, &run.cfg)?;
    let dir = resolve_path(out_dir, rc.output.dir.as_deref().unwrap_or(Path::new(".")));
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("report.json"), report.to_json())?;
    report.network.save(&dir.join("network.json"))?;
    std::fs::write(dir.join("config.toml"), toml::to_string(&rc).map_err(|e| Error::Config(e.to_string()))?)?;
    writeln!(
        io.out,
        "task={} algorithm={} epochs_run={} initial_loss={:.6e} final_loss={:.6e} skipped={} stop={:?}",
        run.data.name,
        run.cfg.algorithm,
        report.epoch_losses.len() - 1,
        report.epoch_losses[0],
        report.final_loss(),
        report.skipped,
        report.stop
    )?;
    let classify: Option<Box<dyn Fn(Complex) -> u32>> = match (run.data.name.as_str(), run.xor_encoding) {
        ("xor", Some(enc)) => Some(Box::new(move |o| enc.classify(o))),
        ("symmetry", _) => Some(Box::new(|o: Complex| (o.re > 0.5) as u32)),
        _ => None,
    };
    if let Some(acc) = classify.and_then(|f| accuracy(&report.network, &run.data, f)) {
        writeln!(io.out, "accuracy={acc:.4}")?;
    }
    writeln!(io.out, "wrote {}", dir.join("report.json").display())?;
    Ok(match report.stop {
        StopReason::NumericFailure { .. } => EXIT_FAILURE,
        _ => EXIT_OK,
    })
}

fn verify_cmd(io: &mut Io, out_dir: &Path, suites: &[String], af: &[String], seed: u64, report: &Path) -> Result<i32> {
    let suites = suites.iter().map(|s| s.parse::<Suite>()).collect::<Result<Vec<_>>>()?;
    let specs = if af.is_empty() {
        catalog()
    } else {
        af.iter().map(|s| s.parse::<ActivationSpec>()).collect::<Result<Vec<_>>>()?
    };
    let reports = run_suites(&suites, &specs, seed);
    let path = resolve_path(out_dir, report);
    ensure_parent(&path)?;
    let lines: String = reports.iter().map(|r| r.to_json_line() + "\n").collect();
    std::fs::write(&path, lines)?;
    for r in &reports {
        writeln!(io.out, "{}", r.summary_row())?;
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    writeln!(io.out, "{} checks, {} failed; report {}", reports.len(), failed, path.display())?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}

#[allow(clippy::too_many_arguments)]
fn render_cmd(
    io: &mut Io,
    out_dir: &Path,
    af: Option<&str>,
    fixture: Option<&str>,
    grid: &str,
    shading: &str,
    out: Option<&Path>,
    part: &str,
    csv: Option<&Path>,
) -> Result<i32> {
    let subject = match (af, fixture) {
        (Some(a), _) => Subject::Spec(a.parse()?),
        (None, Some(f)) => Subject::Fixture(f.parse()?),
        (None, None) => return Err(Error::Config("render needs --af or --fixture".into())),
    };
    let grid: GridSpec = grid.parse()?;
    let shading: Shading = shading.parse()?;
    let part: Part = part.parse()?;
    if let Some(csv) = csv {
        let path = resolve_path(out_dir, csv);
        ensure_parent(&path)?;
        std::fs::write(&path, surface_export(|z| subject.eval(z), &grid, part).to_csv())?;
        writeln!(io.out, "wrote {}", path.display())?;
    }
    if out.is_some() || csv.is_none() {
        let default = PathBuf::from(format!("{}.ppm", subject.name()));
        let path = resolve_path(out_dir, out.unwrap_or(&default));
        ensure_parent(&path)?;
        let img = domain_color_subject(&subject, &grid, shading);
        img.write_ppm(&path)?;
        writeln!(io.out, "sha256={} {}", img.sha256(), path.display())?;
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("cvnn").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn list_activations_formats() {
        let (code, out, _) = run_cli(&["list-activations"]);
        assert_eq!(code, 0);
        assert!(out.lines().count() >= 34);
        let (_, out, _) = run_cli(&["list-activations", "--category", "fully-complex", "--format", "records"]);
        for line in out.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["category"], "fully-complex");
        }
        assert_eq!(run_cli(&["list-activations", "--category", "nope"]).0, 2);
    }

    #[test]
    fn config_round_trips_and_flags_win() {
        let text = "[network]\nactivations = [\"fc_tanh\"]\n[train]\nalgorithm = \"cr\"\nepochs = 3\n";
        let mut rc = RunConfig::from_toml(text).unwrap();
        assert_eq!(rc.train.epochs, 3);
        rc.apply(&TrainArgs { epochs: Some(9), ..Default::default() });
        assert_eq!(rc.train.epochs, 9);
        assert_eq!(RunConfig::from_toml(&toml::to_string(&rc).unwrap()).unwrap(), rc);
        assert!(RunConfig::from_toml("[train]\nlearning_rat = 1.0\n").is_err());
    }

    #[test]
    fn bad_configs_name_the_field() {
        let mut rc = RunConfig::default();
        rc.network.activations = vec!["no_such_af".into()];
        let e = rc.resolve().err().unwrap().to_string();
        assert!(e.contains("network.activations") && e.contains("no_such_af"), "{e}");
        let mut rc = RunConfig::default();
        rc.train.algorithm = "cr_simplified".into();
        assert!(rc.resolve().err().unwrap().to_string().contains("train.algorithm"));
        let mut rc = RunConfig::default();
        rc.network.widths = Some(vec![2, 1]);
        assert!(rc.resolve().err().unwrap().to_string().contains("network.widths"));
    }

    #[test]
    fn train_command_writes_report() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        let (code, out, _) = run_cli(&[
            "train", "--out-dir", d, "--task", "xor", "--widths", "1,1", "--af", "split_tanh", "--algo", "split",
            "--lr", "0.5", "--epochs", "200", "--seed", "1",
        ]);
        assert_eq!(code, 0, "{out}");
        let report: TrainReport = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
        assert_eq!(report.epoch_losses.len(), 201);
        assert!(out.contains("accuracy="));
        let (code, _, err) = run_cli(&["train", "--out-dir", d, "--af", "missing_af"]);
        assert_eq!(code, 2);
        assert!(err.contains("missing_af"));
        let (code, _, err) = run_cli(&["train", "--out-dir", d, "--lr", "0", "--epochs", "2"]);
        assert_eq!(code, 0);
        assert!(err.contains("warning"));
    }

    #[test]
    fn verify_and_render_commands() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        assert_eq!(run_cli(&["verify", "--out-dir", d, "--suite", "cr", "--af", "fc_exp"]).0, 0);
        assert_eq!(run_cli(&["verify", "--out-dir", d, "--suite", "equiv", "--af", "fc_tanh"]).0, 0);
        assert_eq!(run_cli(&["verify", "--out-dir", d, "--suite", "nonsense"]).0, 2);
        let (code, out, _) = run_cli(&["render", "--out-dir", d, "--af", "aptf", "--grid", "-3:3:-3:3:32x32", "--out", "a.ppm"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("sha256="));
        assert!(dir.path().join("a.ppm").exists());
        let (code, _, _) = run_cli(&["render", "--out-dir", d, "--af", "fc_tanh", "--part", "abs", "--csv", "t.csv", "--grid", "-1:1:-1:1:4x3"]);
        assert_eq!(code, 0);
        let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(csv.lines().count(), 5);
        assert_eq!(run_cli(&["render", "--out-dir", d]).0, 2);
    }
}
