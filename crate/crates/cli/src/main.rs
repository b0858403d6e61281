//! `planar-ising`: generate, sample, fit, infer, evaluate and export planar
//! Ising models.
//!
//! Exit codes: 0 success, 1 failure, 2 usage error, 3 a parameter fit did not
//! converge (outputs are still written).

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use planar_ising::fit::{average_log_likelihood, FitConfig};
use planar_ising::io::{read_model, read_moments, read_samples, to_dot, write_model, write_samples, write_trace};
use planar_ising::ising::{empirical_moments, IsingModel, MomentSet};
use planar_ising::kacward::{infer_model, InferenceRoute};
use planar_ising::learn::{learn, LearnConfig, LearnMode, StopRule};
use planar_ising::planar::draw;
use planar_ising::sampling::{gen_model, gibbs_sample, GenConfig, GenKind, SampleConfig};
use planar_ising::Error;

#[derive(Parser)]
#[command(name = "planar-ising", version, about = "Planar Ising model learning and exact inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random model.
    Gen(GenArgs),
    /// Draw Gibbs samples from a model.
    Sample(SampleArgs),
    /// Learn a planar model from samples or moments.
    Fit(FitArgs),
    /// Exact log-partition function or moments of a model.
    Infer(InferArgs),
    /// Average log-likelihood per sample of data under a model.
    Eval(EvalArgs),
    /// Write a model as a Graphviz graph.
    ExportDot(ExportArgs),
}

#[derive(Args, Serialize)]
struct GenArgs {
    /// grid:RxC, outerplanar:N or random-planar:N
    #[arg(long, value_parser = parse_kind)]
    #[serde(serialize_with = "debug_string")]
    kind: GenKind,
    /// Parameter range lo,hi
    #[arg(long, default_value = "-1,1", value_parser = parse_range, allow_hyphen_values = true)]
    range: (f64, f64),
    /// Smallest allowed |theta|
    #[arg(long, default_value_t = 0.05)]
    min_abs: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct SampleArgs {
    #[arg(long)]
    model: PathBuf,
    /// Number of samples
    #[arg(long)]
    num: usize,
    /// Burn-in sweeps
    #[arg(long, default_value_t = 1000)]
    burn: usize,
    /// Sweeps discarded between kept samples
    #[arg(long, default_value_t = 10)]
    thin: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct FitArgs {
    /// Samples CSV (header row, then one ±1 row per sample)
    #[arg(long, conflicts_with = "moments", required_unless_present = "moments")]
    samples: Option<PathBuf>,
    /// Read samples as 0/1 instead of -1/+1
    #[arg(long, requires = "samples")]
    zero_one: bool,
    /// Moments CSV (i,j,mu and i,mu rows)
    #[arg(long)]
    moments: Option<PathBuf>,
    /// Sample count behind --moments, used by the stopping rules
    #[arg(long, requires = "moments")]
    sample_count: Option<usize>,
    /// zero-field, outer-planar or mixed
    #[arg(long, default_value = "zero-field", value_parser = parse_mode)]
    #[serde(serialize_with = "debug_string")]
    mode: LearnMode,
    /// maximal, gamma:V, aic or bic
    #[arg(long, default_value = "maximal", value_parser = parse_stop)]
    #[serde(serialize_with = "debug_string")]
    stop: StopRule,
    /// Edge cap, auxiliary edges included
    #[arg(long)]
    max_edges: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    grad_tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct InferArgs {
    #[arg(long)]
    model: PathBuf,
    /// logz or moments
    #[arg(long, value_parser = ["logz", "moments"])]
    query: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    zero_one: bool,
}

#[derive(Args, Serialize)]
struct ExportArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn debug_string<T: std::fmt::Debug, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{v:?}"))
}

fn parse_kind(s: &str) -> Result<GenKind, String> {
    let (kind, dims) = s.split_once(':').ok_or("expected KIND:DIMS")?;
    let count = |d: &str| d.parse::<usize>().map_err(|e| format!("{d:?}: {e}"));
    match kind {
        "grid" => {
            let (r, c) = dims.split_once('x').ok_or("grid expects RxC")?;
            Ok(GenKind::Grid {
                rows: count(r)?,
                cols: count(c)?,
            })
        }
        "outerplanar" => Ok(GenKind::OuterPlanar { n: count(dims)? }),
        "random-planar" => Ok(GenKind::RandomPlanar { n: count(dims)? }),
        _ => Err(format!("unknown kind {kind:?}; use grid, outerplanar or random-planar")),
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if lo > hi {
        return Err("lo must not exceed hi".into());
    }
    Ok((lo, hi))
}

fn parse_mode(s: &str) -> Result<LearnMode, String> {
    match s {
        "zero-field" => Ok(LearnMode::ZeroFieldPlanar),
        "outer-planar" => Ok(LearnMode::OuterPlanar),
        "mixed" => Ok(LearnMode::Mixed),
        _ => Err(format!("unknown mode {s:?}; use zero-field, outer-planar or mixed")),
    }
}

fn parse_stop(s: &str) -> Result<StopRule, String> {
    match s {
        "maximal" => Ok(StopRule::Maximal),
        "aic" => Ok(StopRule::Aic),
        "bic" => Ok(StopRule::Bic),
        _ => {
            let v = s.strip_prefix("gamma:").ok_or(format!("unknown stop rule {s:?}"))?;
            let g: f64 = v.parse().map_err(|e| format!("{v:?}: {e}"))?;
            if !(g >= 0.0) {
                return Err("gamma must be non-negative".into());
            }
            Ok(StopRule::Threshold(g))
        }
    }
}

#[derive(Serialize)]
struct RunManifest<'a, A: Serialize> {
    subcommand: &'a str,
    flags: &'a A,
    seed: Option<u64>,
    inputs: Vec<&'a Path>,
    outputs: Vec<&'a Path>,
    wall_clock_secs: f64,
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

impl<'a, A: Serialize> RunManifest<'a, A> {
    fn new(subcommand: &'a str, flags: &'a A) -> Self {
        RunManifest {
            subcommand,
            flags,
            seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            wall_clock_secs: 0.0,
            version: env!("CARGO_PKG_VERSION"),
            converged: None,
            notes: Vec::new(),
        }
    }

    /// Writes `<out>.manifest.json`.
    fn write(mut self, out: &Path, started: Instant) -> Result<(), Error> {
        self.wall_clock_secs = started.elapsed().as_secs_f64();
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest.json");
        let mut w = BufWriter::new(File::create(PathBuf::from(name))?);
        serde_json::to_writer_pretty(&mut w, &self)?;
        writeln!(w)?;
        Ok(())
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Error> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn cmd_gen(a: &GenArgs) -> Result<ExitCode, Error> {
    let started = Instant::now();
    let cfg = GenConfig {
        kind: a.kind,
        range: a.range,
        min_abs: a.min_abs,
        seed: a.seed,
    };
    let (model, emb) = gen_model(&cfg)?;
    write_model(create(&a.out)?, &model, emb.coords().map(<[_]>::to_vec))?;
    let mut m = RunManifest::new("gen", a);
    m.seed = Some(a.seed);
    m.outputs.push(&a.out);
    m.write(&a.out, started)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sample(a: &SampleArgs) -> Result<ExitCode, Error> {
    let started = Instant::now();
    let (model, _) = read_model(open(&a.model)?)?;
    let cfg = SampleConfig {
        num_samples: a.num,
        burn_in: a.burn,
        thin: a.thin,
        seed: a.seed,
    };
    let samples = gibbs_sample(&model, &cfg)?;
    write_samples(create(&a.out)?, &samples)?;
    let mut m = RunManifest::new("sample", a);
    m.seed = Some(a.seed);
    m.inputs.push(&a.model);
    m.outputs.push(&a.out);
    m.write(&a.out, started)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_fit(a: &FitArgs) -> Result<ExitCode, Error> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("fit", a);
    let targets: MomentSet = match (&a.samples, &a.moments) {
        (Some(p), _) => {
            manifest.inputs.push(p);
            empirical_moments(&read_samples(open(p)?, a.zero_one)?)?
        }
        (None, Some(p)) => {
            manifest.inputs.push(p);
            read_moments(open(p)?)?.with_sample_count(a.sample_count)
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    let cfg = LearnConfig {
        mode: a.mode,
        stop: a.stop,
        max_edges: a.max_edges,
        fit: FitConfig {
            grad_tol: a.grad_tol,
            max_iters: a.max_iters,
            ..FitConfig::default()
        },
    };
    let r = learn(&targets, &cfg)?;
    let positions = draw(r.model.graph())?.coords().map(<[_]>::to_vec);
    write_model(create(&a.out)?, &r.model, positions)?;
    manifest.outputs.push(&a.out);
    if let Some(t) = &a.trace {
        write_trace(create(t)?, &r.trace)?;
        manifest.outputs.push(t);
    }
    log::info!(
        "{} edges, training log-likelihood {:.6}",
        r.model.graph().num_edges(),
        r.trace.accepted().last().map_or(r.trace.initial_ll, |s| s.avg_ll)
    );
    manifest.converged = Some(r.converged);
    if !r.converged {
        manifest.notes.push("a parameter fit stopped before reaching grad_tol".into());
    }
    manifest.write(&a.out, started)?;
    if r.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("warning: parameter fit did not converge; best model written");
        Ok(ExitCode::from(3))
    }
}

fn cmd_infer(a: &InferArgs) -> Result<ExitCode, Error> {
    let started = Instant::now();
    let (model, _) = read_model(open(&a.model)?)?;
    let r = infer_model(&model)?;
    let mut manifest = RunManifest::new("infer", a);
    match r.route {
        InferenceRoute::KacWard => {}
        InferenceRoute::ExtendedKacWard => manifest
            .notes
            .push("node fields handled through the auxiliary-vertex extension".into()),
        InferenceRoute::Enumeration => {
            log::warn!("model is not planar after extension; enumerating states");
            manifest.notes.push("non-planar model; exact enumeration used".into());
        }
    }
    let mut w = create(&a.out)?;
    if a.query == "logz" {
        writeln!(w, "logz\n{:.17e}", r.log_z)?;
    } else {
        write_edge_moments(w, &model, &r.node_moments, &r.edge_moments)?;
    }
    manifest.inputs.push(&a.model);
    manifest.outputs.push(&a.out);
    manifest.write(&a.out, started)?;
    Ok(ExitCode::SUCCESS)
}

/// Moments CSV restricted to the model's edges.
fn write_edge_moments<W: Write>(mut w: W, model: &IsingModel, node: &[f64], edge: &[f64]) -> Result<(), Error> {
    for (i, mu) in node.iter().enumerate() {
        writeln!(w, "{i},{mu:.17e}")?;
    }
    for (p, mu) in model.graph().edges().iter().zip(edge) {
        writeln!(w, "{},{},{mu:.17e}", p.0, p.1)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_eval(a: &EvalArgs) -> Result<ExitCode, Error> {
    let (model, _) = read_model(open(&a.model)?)?;
    let data = empirical_moments(&read_samples(open(&a.samples)?, a.zero_one)?)?;
    let ll = average_log_likelihood(&model, &data)?;
    println!("{ll:.12}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_export_dot(a: &ExportArgs) -> Result<ExitCode, Error> {
    let started = Instant::now();
    let (model, positions) = read_model(open(&a.model)?)?;
    let mut w = create(&a.out)?;
    w.write_all(to_dot(&model, positions.as_deref()).as_bytes())?;
    w.flush()?;
    let mut m = RunManifest::new("export-dot", a);
    m.inputs.push(&a.model);
    m.outputs.push(&a.out);
    m.write(&a.out, started)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Infer(a) => cmd_infer(a),
        Command::Eval(a) => cmd_eval(a),
        Command::ExportDot(a) => cmd_export_dot(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
