//! The `instanton` command-line tool.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors. Every
//! output file gets a `<file>.manifest.json` sidecar recording the options,
//! code identity, seed, and timer needed to reproduce it.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::channel::{self, NoiseVector};
use crate::code::{self, TannerGraph};
use crate::decoder::{trace_csv, MinSumDecoder};
use crate::render::{self, CutSpec, GrayImage, ThirdPoint};
use crate::search::{
    self, load_checkpoint, Budget, DecayOn, FeedbackRule, GrowthBase, ProgressLog, SchemeRegistry,
    SearchConfig, Searcher, TimerKind,
};

#[derive(Debug, Parser)]
#[command(name = "instanton", version, about = "Instanton search for min-sum decoding of LDPC codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a built-in code as an alist file.
    GenCode {
        /// Built-in code name (toy, tanner155).
        name: String,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Decode one noise vector and report how the decoder ends.
    Decode {
        #[arg(long)]
        code: String,
        #[arg(long)]
        noise: PathBuf,
        #[arg(long)]
        iters: usize,
        #[arg(long)]
        trace_csv: Option<PathBuf>,
        #[arg(long)]
        trace_pgm: Option<PathBuf>,
    },
    /// Run the instanton-array search.
    Search(SearchArgs),
    /// Render a two-dimensional cut of noise space.
    RenderCut(CutArgs),
    /// Render the decoding output over iterations.
    RenderTrace {
        #[arg(long)]
        code: String,
        #[arg(long)]
        noise: PathBuf,
        #[arg(long)]
        iters: usize,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Report the sign-pattern period, ignoring iterations before this one.
        #[arg(long)]
        period_from: Option<usize>,
    },
    /// Merge progress logs into an empirical distribution of w(slot n_max).
    Aggregate {
        /// Glob pattern matching progress CSV files.
        #[arg(long)]
        inputs: String,
        /// Comma-separated times in seconds.
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Weight grid `lo,hi,count`; defaults to every weight seen in the logs.
        #[arg(long)]
        w_grid: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TimerArg {
    Cpu,
    Wall,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecayArg {
    Every,
    Rejection,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GrowthArg {
    Pre,
    Post,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("budget").required(true).args(["budget_seconds", "sweeps"])))]
struct SearchArgs {
    #[arg(long)]
    code: String,
    #[arg(long)]
    n_max: usize,
    /// Amplitude scheme: A, D, or W.
    #[arg(long, default_value = "A")]
    scheme: String,
    #[arg(long)]
    budget_seconds: Option<f64>,
    #[arg(long)]
    sweeps: Option<u64>,
    #[arg(long)]
    seed: u64,
    /// Starting configurations, one vector per line (whitespace-separated).
    #[arg(long)]
    seeds_file: Option<PathBuf>,
    /// Where to write the final (and periodic) array checkpoint.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    checkpoint_every: u64,
    /// Start from a saved array instead of all-ones.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Where to write the `seconds,w_nmax` progress log.
    #[arg(long)]
    progress_csv: Option<PathBuf>,
    /// Independent runs with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    parallel_runs: usize,
    /// Stop once w(slot n_max) is at or below this weight.
    #[arg(long)]
    target_weight: Option<f64>,
    #[arg(long, value_enum, default_value = "cpu")]
    timer: TimerArg,
    #[arg(long, default_value_t = 100)]
    log_every: u64,
    #[arg(long, default_value_t = 0.1)]
    initial_amp: f64,
    #[arg(long, default_value_t = 2.0)]
    amp_growth: f64,
    #[arg(long, default_value_t = 0.999)]
    amp_decay: f64,
    #[arg(long, value_enum, default_value = "every")]
    decay_on: DecayArg,
    #[arg(long, value_enum, default_value = "pre")]
    growth_base: GrowthArg,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("third_point").required(true).args(["third", "third_random", "third_bits"])))]
struct CutArgs {
    #[arg(long)]
    code: String,
    #[arg(long)]
    anchor: PathBuf,
    #[arg(long)]
    third: Option<PathBuf>,
    #[arg(long)]
    third_random: Option<u64>,
    /// Comma-separated bit indices of an indicator vector.
    #[arg(long, value_delimiter = ',')]
    third_bits: Option<Vec<usize>>,
    /// Interpret --third-bits as 1-based.
    #[arg(long, requires = "third_bits")]
    one_based: bool,
    #[arg(long, default_value = "-0.25,1.5")]
    urange: String,
    #[arg(long, default_value = "-0.6,0.6")]
    vrange: String,
    #[arg(long, default_value = "432x288")]
    res: String,
    #[arg(long, default_value_t = 1024)]
    cap: usize,
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
    /// Also write per-pixel `u,v,withstand,tone`.
    #[arg(long)]
    tone_csv: Option<PathBuf>,
}

/// Malformed option values that clap cannot catch.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Entry point; returns the process exit code.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                1
            } else {
                2
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::GenCode { name, output } => gen_code(&name, &output),
        Command::Decode {
            code,
            noise,
            iters,
            trace_csv,
            trace_pgm,
        } => decode_cmd(&code, &noise, iters, trace_csv.as_deref(), trace_pgm.as_deref()),
        Command::Search(args) => search_cmd(&args),
        Command::RenderCut(args) => render_cut_cmd(&args),
        Command::RenderTrace {
            code,
            noise,
            iters,
            output,
            period_from,
        } => render_trace_cmd(&code, &noise, iters, &output, period_from),
        Command::Aggregate {
            inputs,
            times,
            output,
            w_grid,
        } => aggregate_cmd(&inputs, &times, &output, w_grid.as_deref()),
    }
}

/// A loaded code and how to name it reproducibly.
struct LoadedCode {
    graph: TannerGraph,
    identity: String,
}

fn load_code(arg: &str) -> Result<LoadedCode> {
    if let Some(graph) = code::builtin(arg) {
        return Ok(LoadedCode {
            graph,
            identity: format!("builtin:{arg}"),
        });
    }
    let path = Path::new(arg);
    if !path.exists() {
        let names: Vec<_> = code::builtin_names().collect();
        bail!("code {arg:?} is neither a built-in ({}) nor an existing file", names.join(", "));
    }
    let text = read_text(path)?;
    let graph = code::from_alist(&text).with_context(|| format!("reading {}", path.display()))?;
    Ok(LoadedCode {
        graph,
        identity: format!("sha256:{}", sha256_hex(text.as_bytes())),
    })
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn load_noise_for(path: &Path, graph: &TannerGraph) -> Result<NoiseVector> {
    let xi = channel::load_noise(&read_text(path)?).with_context(|| format!("reading {}", path.display()))?;
    if xi.len() != graph.n_bits() {
        bail!(
            "{} has {} values, but the code has {} bits",
            path.display(),
            xi.len(),
            graph.n_bits()
        );
    }
    Ok(xi)
}

#[derive(Debug, Clone, Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    code: String,
    options: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timer: Option<&'static str>,
    artifacts: Vec<String>,
}

impl RunManifest {
    fn new(subcommand: &'static str, code: impl Into<String>) -> Self {
        Self {
            tool: "instanton",
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            code: code.into(),
            options: BTreeMap::new(),
            seed: None,
            timer: None,
            artifacts: Vec::new(),
        }
    }

    fn opt(mut self, key: &str, value: impl Serialize) -> Self {
        self.options.insert(key.to_string(), json!(value));
        self
    }

    fn artifact(mut self, path: &Path) -> Self {
        self.artifacts.push(path.display().to_string());
        self
    }

    /// Writes `<primary>.manifest.json`.
    fn write_beside(&self, primary: &Path) -> Result<()> {
        let mut name = primary.as_os_str().to_owned();
        name.push(".manifest.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_file(Path::new(&name), text)
    }
}

fn gen_code(name: &str, output: &Path) -> Result<()> {
    let graph = code::builtin(name).ok_or_else(|| {
        let names: Vec<_> = code::builtin_names().collect();
        usage(format!("unknown built-in code {name:?}; choose one of {}", names.join(", ")))
    })?;
    write_file(output, code::to_alist(&graph))?;
    RunManifest::new("gen-code", format!("builtin:{name}"))
        .artifact(output)
        .write_beside(output)?;
    println!("wrote {} ({} bits, {} checks)", output.display(), graph.n_bits(), graph.n_checks());
    Ok(())
}

fn trace_image(trace: &[Vec<f64>]) -> GrayImage {
    GrayImage {
        width: trace.first().map_or(0, Vec::len),
        height: trace.len(),
        pixels: trace
            .iter()
            .flatten()
            .map(|&m| render::tone_byte(render::trace_tone(m)))
            .collect(),
    }
}

fn decode_cmd(code: &str, noise: &Path, iters: usize, csv: Option<&Path>, pgm: Option<&Path>) -> Result<()> {
    let code = load_code(code)?;
    let xi = load_noise_for(noise, &code.graph)?;
    let capture = csv.is_some() || pgm.is_some();
    let out = MinSumDecoder::new(&code.graph).decode(&xi.llr(), iters, capture)?;
    let manifest = RunManifest::new("decode", code.identity)
        .opt("noise", noise.display().to_string())
        .opt("iters", iters);
    if let Some(trace) = &out.trace {
        if let Some(p) = csv {
            write_file(p, trace_csv(trace))?;
            manifest.clone().artifact(p).write_beside(p)?;
        }
        if let Some(p) = pgm {
            write_file(p, trace_image(trace).to_pgm())?;
            manifest.clone().artifact(p).write_beside(p)?;
        }
    }
    println!("outcome: {}", out.kind);
    println!("withstand: {}", out.withstand());
    println!("weight: {:?}", xi.weight());
    Ok(())
}

/// Seeds file: one configuration per non-comment line.
fn load_seeds(path: &Path) -> Result<Vec<NoiseVector>> {
    let text = read_text(path)?;
    let mut seeds = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: Vec<f64> = t
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| anyhow!("{} line {}: not a list of numbers", path.display(), i + 1))?;
        seeds.push(NoiseVector::new(v));
    }
    Ok(seeds)
}

/// `dir/name.ext` -> `dir/name.run<i>.ext` when several runs share a path.
fn per_run_path(path: &Path, run: usize, runs: usize) -> PathBuf {
    if runs <= 1 {
        return path.to_path_buf();
    }
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.run{run}.{}", ext.to_string_lossy()),
        None => format!("{stem}.run{run}"),
    };
    path.with_file_name(name)
}

fn search_cmd(args: &SearchArgs) -> Result<()> {
    let code = load_code(&args.code)?;
    let registry = SchemeRegistry::with_defaults();
    let scheme = registry.get(&args.scheme).ok_or_else(|| {
        usage(format!(
            "unknown scheme {:?}; choose one of {}",
            args.scheme,
            registry.names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    if args.parallel_runs == 0 {
        return Err(usage("--parallel-runs must be at least 1"));
    }
    let budget = match (args.budget_seconds, args.sweeps) {
        (Some(s), None) => Budget::Seconds(s),
        (None, Some(n)) => Budget::Sweeps(n),
        _ => return Err(usage("give exactly one of --budget-seconds and --sweeps")),
    };
    let seeds = args.seeds_file.as_deref().map(load_seeds).transpose()?.unwrap_or_default();
    let timer = match args.timer {
        TimerArg::Cpu => TimerKind::preferred(),
        TimerArg::Wall => TimerKind::Wall,
    };
    let feedback = FeedbackRule {
        decay_on: match args.decay_on {
            DecayArg::Every => DecayOn::EveryAttempt,
            DecayArg::Rejection => DecayOn::RejectionOnly,
        },
        growth_base: match args.growth_base {
            GrowthArg::Pre => GrowthBase::PreDecay,
            GrowthArg::Post => GrowthBase::PostDecay,
        },
    };
    let resume = args.resume.as_deref().map(read_text).transpose()?;

    let make_config = |run: usize| {
        let mut cfg = SearchConfig::new(scheme.clone(), args.n_max, budget, args.seed + run as u64);
        cfg.initial_amp = args.initial_amp;
        cfg.amp_growth = args.amp_growth;
        cfg.amp_decay = args.amp_decay;
        cfg.feedback = feedback;
        cfg.seeds = seeds.clone();
        cfg.target_weight = args.target_weight;
        cfg.timer = timer;
        cfg.log_every_sweeps = args.log_every;
        cfg.code_label = code.identity.clone();
        cfg
    };
    make_config(0).validate().map_err(|e| usage(e.to_string()))?;

    let runs = args.parallel_runs;
    let graph = &code.graph;
    let results: Vec<Result<String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..runs)
            .map(|run| {
                let cfg = make_config(run);
                let resume = resume.as_deref();
                scope.spawn(move || search_one(graph, cfg, resume, args, run, runs))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(anyhow!("search thread panicked"))))
            .collect()
    });

    for (run, r) in results.into_iter().enumerate() {
        let line = r.with_context(|| format!("run {run}"))?;
        println!("{line}");
    }

    let manifest_for = |run: usize| {
        let mut m = RunManifest::new("search", code.identity.clone())
            .opt("n_max", args.n_max)
            .opt("scheme", scheme.describe())
            .opt("budget", format!("{budget:?}"))
            .opt("base_seed", args.seed)
            .opt("run", run)
            .opt("parallel_runs", runs)
            .opt("seeds_file", args.seeds_file.as_ref().map(|p| p.display().to_string()))
            .opt("resume", args.resume.as_ref().map(|p| p.display().to_string()))
            .opt("target_weight", args.target_weight)
            .opt("initial_amp", args.initial_amp)
            .opt("amp_growth", args.amp_growth)
            .opt("amp_decay", args.amp_decay)
            .opt("feedback", feedback.describe())
            .opt("log_every", args.log_every)
            .opt("rng", "chacha8 seeded with base_seed + run");
        m.seed = Some(args.seed + run as u64);
        m.timer = Some(timer.as_str());
        let outputs: Vec<PathBuf> = [&args.progress_csv, &args.checkpoint]
            .into_iter()
            .flatten()
            .map(|p| per_run_path(p, run, runs))
            .collect();
        for p in &outputs {
            m = m.artifact(p);
        }
        (outputs, m)
    };
    // The manifest sits beside the first output file, if any.
    for run in 0..runs {
        let (outputs, m) = manifest_for(run);
        if let Some(first) = outputs.first() {
            m.write_beside(first)?;
        }
    }
    Ok(())
}

fn search_one(
    graph: &TannerGraph,
    cfg: SearchConfig,
    resume: Option<&str>,
    args: &SearchArgs,
    run: usize,
    runs: usize,
) -> Result<String> {
    let seed = cfg.rng_seed;
    let searcher = match resume {
        Some(text) => {
            let loaded = load_checkpoint(text, graph, Some(cfg.n_max), cfg.initial_amp)?;
            for w in &loaded.warnings {
                eprintln!("warning: {w}");
            }
            Searcher::with_array(graph, cfg, loaded.array)?
        }
        None => Searcher::new(graph, cfg)?,
    };
    for w in searcher.warnings() {
        eprintln!("warning: {w}");
    }
    let checkpoint = args.checkpoint.as_ref().map(|c| per_run_path(c, run, runs));
    let every = args.checkpoint_every.max(1);
    let mut write_error = None;
    let outcome = searcher.run_with(|s, _| {
        if let Some(path) = &checkpoint {
            if s.sweeps() % every == 0 && write_error.is_none() {
                write_error = write_file(path, s.array().save_checkpoint()).err();
            }
        }
    })?;
    if let Some(e) = write_error {
        return Err(e);
    }
    if let Some(path) = &checkpoint {
        write_file(path, outcome.array.save_checkpoint())?;
    }
    if let Some(p) = &args.progress_csv {
        write_file(&per_run_path(p, run, runs), outcome.progress.to_csv())?;
    }
    Ok(format!(
        "run {run} seed={seed}: sweeps={} accepted={} seconds={:.3} w(slot {})={:?}{}",
        outcome.sweeps,
        outcome.accepted,
        outcome.seconds,
        outcome.array.n_max(),
        outcome.array.top_weight(),
        if outcome.reached_target { " (target reached)" } else { "" }
    ))
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| usage(format!("{what} must look like a,b (got {s:?})")))?;
    let p = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("{what}: {x:?} is not a number")))
    };
    Ok((p(a)?, p(b)?))
}

fn parse_res(s: &str) -> Result<(usize, usize)> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| usage(format!("--res must look like WxH (got {s:?})")))?;
    let p = |x: &str| {
        x.trim()
            .parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| usage(format!("--res: {x:?} is not a positive integer")))
    };
    Ok((p(w)?, p(h)?))
}

fn render_cut_cmd(args: &CutArgs) -> Result<()> {
    let code = load_code(&args.code)?;
    let anchor = load_noise_for(&args.anchor, &code.graph)?;
    let third = if let Some(p) = &args.third {
        ThirdPoint::Vector(load_noise_for(p, &code.graph)?)
    } else if let Some(seed) = args.third_random {
        ThirdPoint::Random { seed }
    } else if let Some(bits) = &args.third_bits {
        ThirdPoint::Indicator {
            bits: bits.clone(),
            one_based: args.one_based,
        }
    } else {
        return Err(usage("give one of --third, --third-random, --third-bits"));
    };
    let mut spec = CutSpec::new(anchor, third.clone());
    spec.u_range = parse_pair(&args.urange, "--urange")?;
    spec.v_range = parse_pair(&args.vrange, "--vrange")?;
    (spec.width, spec.height) = parse_res(&args.res)?;
    spec.n_cap = args.cap;

    let r = render::render_cut(&code.graph, &spec)?;
    write_file(&args.output, r.image.to_pgm())?;
    let mut manifest = RunManifest::new("render-cut", code.identity)
        .opt("anchor", args.anchor.display().to_string())
        .opt("third", third.to_string())
        .opt("third_file", args.third.as_ref().map(|p| p.display().to_string()))
        .opt("urange", spec.u_range)
        .opt("vrange", spec.v_range)
        .opt("res", format!("{}x{}", spec.width, spec.height))
        .opt("cap", spec.n_cap)
        .artifact(&args.output);
    manifest.seed = args.third_random;
    if let Some(p) = &args.tone_csv {
        write_file(p, r.to_csv())?;
        manifest = manifest.artifact(p);
    }
    manifest.write_beside(&args.output)?;
    println!("wrote {} ({}x{})", args.output.display(), spec.width, spec.height);
    Ok(())
}

fn render_trace_cmd(code: &str, noise: &Path, iters: usize, output: &Path, period_from: Option<usize>) -> Result<()> {
    if iters == 0 {
        return Err(usage("--iters must be at least 1"));
    }
    let code = load_code(code)?;
    let xi = load_noise_for(noise, &code.graph)?;
    let r = render::render_trace(&code.graph, &xi, iters)?;
    write_file(output, r.image.to_pgm())?;
    println!("outcome: {}", r.outcome);
    println!("rows: {}", r.image.height);
    let mut manifest = RunManifest::new("render-trace", code.identity)
        .opt("noise", noise.display().to_string())
        .opt("iters", iters)
        .opt("stopped_at", r.outcome.last_iteration())
        .opt("outcome", r.outcome.to_string())
        .artifact(output);
    if let Some(k0) = period_from {
        let period = render::detect_sign_period(&r.trace, k0)?;
        match period {
            Some(p) => println!("sign period: {p} (from iteration {k0})"),
            None => println!("sign period: none (from iteration {k0})"),
        }
        manifest = manifest.opt("period_from", k0).opt("sign_period", period);
    }
    manifest.write_beside(output)?;
    Ok(())
}

fn aggregate_cmd(pattern: &str, times: &[f64], output: &Path, w_grid: Option<&str>) -> Result<()> {
    let mut paths: Vec<PathBuf> = glob::glob(pattern)
        .map_err(|e| usage(format!("bad --inputs pattern: {e}")))?
        .collect::<Result<_, _>>()?;
    paths.sort();
    if paths.is_empty() {
        bail!("no progress logs match {pattern:?}");
    }
    let logs = paths
        .iter()
        .map(|p| ProgressLog::from_csv(&read_text(p)?).with_context(|| format!("reading {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let grid = match w_grid {
        None => search::weight_grid(&logs),
        Some(spec) => {
            let parts: Vec<&str> = spec.split(',').collect();
            let [lo, hi, count] = parts.as_slice() else {
                return Err(usage(format!("--w-grid must look like lo,hi,count (got {spec:?})")));
            };
            let lo: f64 = lo.trim().parse().map_err(|_| usage("--w-grid: bad lo"))?;
            let hi: f64 = hi.trim().parse().map_err(|_| usage("--w-grid: bad hi"))?;
            let count: usize = count.trim().parse().map_err(|_| usage("--w-grid: bad count"))?;
            if count < 2 || !(lo < hi) {
                return Err(usage("--w-grid needs lo < hi and count >= 2"));
            }
            (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
        }
    };
    let rows = search::aggregate_progress(&logs, times, &grid);
    write_file(output, search::cdf_csv(&rows))?;
    RunManifest::new("aggregate", "n/a")
        .opt("inputs", paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>())
        .opt("times", times)
        .opt("w_grid", w_grid)
        .artifact(output)
        .write_beside(output)?;
    println!("wrote {} ({} logs, {} rows)", output.display(), logs.len(), rows.len());
    Ok(())
}
