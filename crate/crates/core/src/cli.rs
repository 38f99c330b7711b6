//! `omd-tch` command-line runner.
//!
//! Exit codes: 0 on success, 2 for flag, config or validation errors, 1 when
//! a run fails numerically or an output cannot be written.

use std::fmt::Display;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::bounds::{convergence_bound_terms, optimal_step_sizes, BoundConstants, BoundVariant};
use crate::error::MooError;
use crate::fedsim::{run_federated, FedConfig};
use crate::harness::config::{parse_floats, parse_seeds, ConfigFile};
use crate::harness::csvio::{
    write_archive, write_fed_rounds, write_fed_summary, write_solutions, write_sweep, write_trace, SweepRow,
};
use crate::harness::svg::{emit_svg, PlotRay};
use crate::problem::Problem;
use crate::problems::{vlmop2_pareto_front, FedLogReg, FedSpec, Heterogeneity, QuadraticBiObjective, Vlmop2};
use crate::scalarize::{tch_value, NadirPoint};
use crate::solver::{run, Method, SolverConfig};
use crate::types::PreferenceVector;

pub const SEED_ENV: &str = "MOO_SEED";

#[derive(Debug, Parser)]
#[command(name = "omd-tch", version, about = "Tchebycheff multi-objective optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one scalarized problem and write its per-round trace.
    Solve(SolveArgs),
    /// Run every (method, preference, seed) cell on a two-objective problem.
    Sweep(SweepArgs),
    /// Simulate federated training with one objective per client.
    Fedsim(FedArgs),
    /// Print step sizes and the convergence bound for given constants.
    Bound(BoundArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// vlmop2, quadratic or fedlogreg
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    method: Option<String>,
    /// Comma-separated preference weights (default uniform)
    #[arg(long)]
    pref: Option<String>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    eta_theta: Option<f64>,
    #[arg(long)]
    eta_lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Decision dimension (vlmop2 default 10, quadratic default 2)
    #[arg(long)]
    dim: Option<usize>,
    /// Seed of the generated problem instance (quadratic, fedlogreg)
    #[arg(long)]
    problem_seed: Option<u64>,
    /// Clamp every coordinate of θ to [-R, R]
    #[arg(long = "box")]
    theta_box: Option<f64>,
    /// Comma-separated reference point (default 0)
    #[arg(long)]
    nadir: Option<String>,
    #[arg(long)]
    init_scale: Option<f64>,
    /// Use minibatch gradients (fedlogreg)
    #[arg(long)]
    stochastic: Option<bool>,
    #[arg(long)]
    merge_duplicates: Option<bool>,
    #[arg(long)]
    clients: Option<usize>,
    #[arg(long)]
    heterogeneity: Option<String>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Trace CSV path; summary, archive and manifest are written next to it
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// vlmop2 or quadratic
    #[arg(long)]
    problem: Option<String>,
    /// Number of evenly spaced preferences
    #[arg(long)]
    prefs: Option<usize>,
    #[arg(long)]
    methods: Option<String>,
    /// Comma list, `a..b` ranges are inclusive
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    eta_theta: Option<f64>,
    #[arg(long)]
    eta_lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    problem_seed: Option<u64>,
    #[arg(long)]
    init_scale: Option<f64>,
    /// Worker threads (default: available CPUs)
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FedArgs {
    #[arg(long)]
    clients: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    local_steps: Option<usize>,
    #[arg(long)]
    local_lr: Option<f64>,
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    eta_lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    seeds: Option<String>,
    /// rotation, iid or partial:<C>
    #[arg(long)]
    heterogeneity: Option<String>,
    /// Samples per client before the 80/20 split
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    features: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundArgs {
    /// pgd-pgd or pgd-eg
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    u: Option<f64>,
    #[arg(long)]
    l: Option<f64>,
    #[arg(long)]
    r_theta: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    /// Failure probability for the high-probability bound
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn numeric(e: impl Display) -> Failure {
    Failure::Numeric(e.to_string())
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("invalid arguments"));
            return 2;
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Fedsim(a) => cmd_fedsim(a),
        Command::Bound(a) => cmd_bound(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) | Failure::Numeric(m) => m.replace('\n', " "),
            };
            eprintln!("error: {msg}");
            f.code()
        }
    }
}

/// Resolves each setting from flag, then config file, then default, and
/// records the result for the run manifest.
struct Resolver {
    config: ConfigFile,
    manifest: ConfigFile,
}

const MANIFEST_META: [&str; 3] = ["command", "version", "outputs"];

impl Resolver {
    fn load(path: Option<&Path>, command: &str, allowed: &[&str]) -> CliResult<Self> {
        let config = match path {
            Some(p) => ConfigFile::load(p).map_err(usage)?,
            None => ConfigFile::default(),
        };
        if let Some(c) = config.get("command") {
            if c != command {
                return Err(usage(format!("config was written for '{c}', not '{command}'")));
            }
        }
        for key in config.keys() {
            if !allowed.contains(&key) && !MANIFEST_META.contains(&key) {
                return Err(usage(format!("unknown config key '{key}' for {command}")));
            }
        }
        let mut manifest = ConfigFile::default();
        manifest.insert("command", command);
        manifest.insert("version", env!("CARGO_PKG_VERSION"));
        Ok(Resolver { config, manifest })
    }

    fn get<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>, default: T) -> CliResult<T> {
        let v = self.config.resolve_or(key, flag, default).map_err(usage)?;
        self.manifest.insert(key, v.to_string());
        Ok(v)
    }

    fn opt<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> CliResult<Option<T>> {
        let v = self.config.resolve(key, flag).map_err(usage)?;
        if let Some(v) = &v {
            self.manifest.insert(key, v.to_string());
        }
        Ok(v)
    }

    fn required<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> CliResult<T> {
        self.opt(key, flag)?
            .ok_or_else(|| usage(format!("missing required flag --{key}")))
    }

    fn write_manifest(mut self, path: &Path, outputs: &[PathBuf]) -> CliResult<()> {
        let list: Vec<String> = outputs.iter().map(|p| p.display().to_string()).collect();
        self.manifest.insert("outputs", list.join(","));
        std::fs::write(path, self.manifest.render()).map_err(|e| numeric(format!("writing {}: {e}", path.display())))
    }
}

fn default_seed() -> CliResult<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("{SEED_ENV}='{v}' is not an integer"))),
        Err(_) => Ok(0),
    }
}

fn parse_methods(list: &str) -> CliResult<Vec<Method>> {
    let methods: Vec<Method> = list
        .split(',')
        .map(|s| s.trim().parse::<Method>().map_err(usage))
        .collect::<CliResult<_>>()?;
    if methods.is_empty() {
        return Err(usage("method list is empty"));
    }
    Ok(methods)
}

fn parse_heterogeneity(spec: &str, clients: usize) -> CliResult<Heterogeneity> {
    match spec {
        "rotation" => Ok(Heterogeneity::default_rotation(clients)),
        "iid" => Ok(Heterogeneity::Rotation { angles_deg: vec![0.0; clients] }),
        other => match other.strip_prefix("partial:") {
            Some(c) => c
                .parse()
                .map(|classes| Heterogeneity::PartialClass { classes })
                .map_err(|_| usage(format!("bad class count in '{other}'"))),
            None => Err(usage(format!("unknown heterogeneity '{other}' (valid: rotation, iid, partial:<C>)"))),
        },
    }
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| numeric(format!("creating {}: {e}", dir.display())))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| numeric(format!("creating {}: {e}", path.display())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn jobs_pool(jobs: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let n = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if n == 0 {
        return Err(usage("--jobs must be >= 1"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(numeric)
}

const SOLVE_KEYS: &[&str] = &[
    "problem", "method", "pref", "rounds", "eta-theta", "eta-lambda", "mu", "seed", "dim", "problem-seed", "box",
    "nadir", "init-scale", "stochastic", "merge-duplicates", "clients", "heterogeneity", "batch-size", "out",
    "out-dir",
];

fn build_problem(r: &mut Resolver, a: &SolveArgs) -> CliResult<Box<dyn Problem>> {
    let name = r.get("problem", a.problem.clone(), "vlmop2".to_string())?;
    match name.as_str() {
        "vlmop2" => {
            let d = r.get("dim", a.dim, 10)?;
            Ok(Box::new(Vlmop2::new(d).map_err(usage)?))
        }
        "quadratic" => {
            let d = r.get("dim", a.dim, 2)?;
            let s = r.get("problem-seed", a.problem_seed, 0)?;
            Ok(Box::new(QuadraticBiObjective::random(d, s).map_err(usage)?))
        }
        "fedlogreg" => {
            let clients = r.get("clients", a.clients, 10)?;
            let het = r.get("heterogeneity", a.heterogeneity.clone(), "rotation".to_string())?;
            let s = r.get("problem-seed", a.problem_seed, 0)?;
            let mut spec = FedSpec::new(clients, parse_heterogeneity(&het, clients)?);
            spec.batch_size = r.opt("batch-size", a.batch_size)?;
            Ok(Box::new(FedLogReg::generate(spec, s).map_err(usage)?))
        }
        other => Err(usage(format!("unknown problem '{other}' (valid: vlmop2, quadratic, fedlogreg)"))),
    }
}

fn cmd_solve(a: SolveArgs) -> CliResult<()> {
    let mut r = Resolver::load(a.config.as_deref(), "solve", SOLVE_KEYS)?;
    let problem = build_problem(&mut r, &a)?;
    let m = problem.num_objectives();

    let method: Method = r.get("method", a.method.clone(), "adaomd-gd".to_string())?.parse().map_err(usage)?;
    r.manifest.insert("method", method.name());
    let preference = match r.opt("pref", a.pref.clone())? {
        Some(s) => PreferenceVector::new(parse_floats(&s).map_err(usage)?).map_err(usage)?,
        None => PreferenceVector::uniform(m).map_err(usage)?,
    };
    if preference.len() != m {
        return Err(usage(format!("preference has {} entries but the problem has {m} objectives", preference.len())));
    }
    let mut config = SolverConfig::new(method, preference);
    config.rounds = r.get("rounds", a.rounds, config.rounds)?;
    config.eta_theta = r.get("eta-theta", a.eta_theta, config.eta_theta)?;
    config.eta_lambda = r.get("eta-lambda", a.eta_lambda, config.eta_lambda)?;
    config.mu = r.get("mu", a.mu, config.mu)?;
    config.seed = r.get("seed", a.seed, default_seed()?)?;
    config.theta_box = r.opt("box", a.theta_box)?;
    config.init_scale = r.get("init-scale", a.init_scale, config.init_scale)?;
    config.stochastic = r.get("stochastic", a.stochastic, false)?;
    config.merge_duplicates = r.get("merge-duplicates", a.merge_duplicates, false)?;
    if let Some(z) = r.opt("nadir", a.nadir.clone())? {
        config.nadir = Some(NadirPoint::new(parse_floats(&z).map_err(usage)?).map_err(usage)?);
    }
    config.validate().map_err(usage)?;

    let out_dir = r.opt("out-dir", a.out_dir.as_ref().map(|p| p.display().to_string()))?;
    let trace_path = match r.opt("out", a.out.as_ref().map(|p| p.display().to_string()))? {
        Some(p) => PathBuf::from(p),
        None => PathBuf::from(out_dir.unwrap_or_else(|| ".".into())).join("trace.csv"),
    };

    let result = run(problem.as_ref(), &config).map_err(numeric)?;

    let nadir = config.nadir.clone().unwrap_or_else(|| NadirPoint::zeros(m));
    let w = &config.preference;
    let tch = |f: &[f64]| tch_value(f, w, &nadir).map_err(numeric);
    let f_last = problem.objectives(result.theta_last.as_slice());
    let mut solutions: Vec<(&str, &[f64], f64, &[f64])> =
        vec![("bar", result.objectives_bar.as_slice(), tch(&result.objectives_bar)?, result.theta_bar.as_slice())];
    if let (Some(t), Some(f)) = (&result.theta_tilde, &result.objectives_tilde) {
        solutions.push(("tilde", f.as_slice(), tch(f)?, t.as_slice()));
    }
    solutions.push(("last", &f_last, tch(&f_last)?, result.theta_last.as_slice()));

    let summary_path = with_suffix(&trace_path, "_summary.csv");
    write_trace(create(&trace_path)?, &result.trace).map_err(numeric)?;
    write_solutions(create(&summary_path)?, &solutions).map_err(numeric)?;
    let mut outputs = vec![trace_path.clone(), summary_path];
    if let Some(archive) = &result.archive {
        let p = with_suffix(&trace_path, "_archive.csv");
        write_archive(create(&p)?, archive).map_err(numeric)?;
        outputs.push(p);
    }
    r.write_manifest(&with_suffix(&trace_path, ".manifest"), &outputs)
}

const SWEEP_KEYS: &[&str] = &[
    "problem", "prefs", "methods", "seeds", "rounds", "eta-theta", "eta-lambda", "mu", "dim", "problem-seed",
    "init-scale", "jobs", "out-dir",
];

enum SweepProblem {
    Vlmop2(Vlmop2),
    Quadratic(QuadraticBiObjective),
}

impl SweepProblem {
    fn as_dyn(&self) -> &dyn Problem {
        match self {
            SweepProblem::Vlmop2(p) => p,
            SweepProblem::Quadratic(p) => p,
        }
    }

    fn front(&self) -> CliResult<Vec<[f64; 2]>> {
        match self {
            SweepProblem::Vlmop2(p) => vlmop2_pareto_front(p, 200).map_err(numeric),
            SweepProblem::Quadratic(q) => Ok((0..=200)
                .map(|k| {
                    let t = k as f64 / 200.0;
                    let theta: Vec<f64> = q.anchor(0).iter().zip(q.anchor(1)).map(|(a, b)| (1.0 - t) * a + t * b).collect();
                    let f = q.objectives(&theta);
                    [f[0], f[1]]
                })
                .collect()),
        }
    }
}

fn cmd_sweep(a: SweepArgs) -> CliResult<()> {
    let mut r = Resolver::load(a.config.as_deref(), "sweep", SWEEP_KEYS)?;
    let name = r.get("problem", a.problem.clone(), "vlmop2".to_string())?;
    let problem = match name.as_str() {
        "vlmop2" => SweepProblem::Vlmop2(Vlmop2::new(r.get("dim", a.dim, 10)?).map_err(usage)?),
        "quadratic" => {
            let d = r.get("dim", a.dim, 2)?;
            let s = r.get("problem-seed", a.problem_seed, 0)?;
            SweepProblem::Quadratic(QuadraticBiObjective::random(d, s).map_err(usage)?)
        }
        other => return Err(usage(format!("unknown sweep problem '{other}' (valid: vlmop2, quadratic)"))),
    };
    let prefs = r.get("prefs", a.prefs, 10)?;
    if prefs < 2 {
        return Err(usage("--prefs must be >= 2"));
    }
    let methods = parse_methods(&r.get("methods", a.methods.clone(), "ls,tch,omd-gd,adaomd-gd".to_string())?)?;
    let seeds = parse_seeds(&r.get("seeds", a.seeds.clone(), default_seed()?.to_string())?).map_err(usage)?;
    let base = SolverConfig::new(Method::Ls, PreferenceVector::uniform(2).map_err(usage)?);
    let rounds = r.get("rounds", a.rounds, base.rounds)?;
    let eta_theta = r.get("eta-theta", a.eta_theta, base.eta_theta)?;
    let eta_lambda = r.get("eta-lambda", a.eta_lambda, base.eta_lambda)?;
    let mu = r.get("mu", a.mu, base.mu)?;
    let init_scale = r.get("init-scale", a.init_scale, base.init_scale)?;
    let jobs = r.opt("jobs", a.jobs)?;
    let out_dir = PathBuf::from(r.get("out-dir", a.out_dir.as_ref().map(|p| p.display().to_string()), ".".into())?);

    let mut cells = Vec::new();
    for &method in &methods {
        for k in 0..prefs {
            let preference = PreferenceVector::evenly_spaced(prefs, k).map_err(usage)?;
            for &seed in &seeds {
                let mut c = SolverConfig::new(method, preference.clone());
                c.rounds = rounds;
                c.eta_theta = eta_theta;
                c.eta_lambda = eta_lambda;
                c.mu = mu;
                c.init_scale = init_scale;
                c.seed = seed;
                c.validate().map_err(usage)?;
                cells.push(c);
            }
        }
    }

    let pool = jobs_pool(jobs)?;
    let rows: Vec<SweepRow> = pool
        .install(|| {
            cells
                .par_iter()
                .map(|c| {
                    let result = run(problem.as_dyn(), c)?;
                    Ok(SweepRow {
                        method: c.method.name().to_string(),
                        preference: c.preference.as_slice().to_vec(),
                        seed: c.seed,
                        objectives: result.output().1.as_slice().to_vec(),
                    })
                })
                .collect::<Result<Vec<_>, MooError>>()
        })
        .map_err(numeric)?;

    let summary = out_dir.join("sweep_summary.csv");
    write_sweep(create(&summary)?, &rows).map_err(numeric)?;
    let mut outputs = vec![summary];
    let front = problem.front()?;
    let rays: Vec<PlotRay> = (0..prefs)
        .map(|k| {
            let w = PreferenceVector::evenly_spaced(prefs, k).expect("validated above");
            PlotRay::inverse_preference([w[0], w[1]])
        })
        .collect();
    for method in &methods {
        let points: Vec<[f64; 2]> = rows
            .iter()
            .filter(|row| row.method == method.name())
            .map(|row| [row.objectives[0], row.objectives[1]])
            .collect();
        let path = out_dir.join(format!("sweep_{}.svg", method.name()));
        emit_svg(&points, &front, &rays, &path).map_err(numeric)?;
        outputs.push(path);
    }
    r.write_manifest(&out_dir.join("sweep.manifest"), &outputs)
}

const FED_KEYS: &[&str] = &[
    "clients", "rounds", "local-steps", "local-lr", "methods", "eta-lambda", "mu", "seeds", "heterogeneity",
    "samples", "features", "batch-size", "jobs", "out-dir",
];

fn cmd_fedsim(a: FedArgs) -> CliResult<()> {
    let mut r = Resolver::load(a.config.as_deref(), "fedsim", FED_KEYS)?;
    let clients: usize = r.required("clients", a.clients)?;
    let rounds: usize = r.required("rounds", a.rounds)?;
    let base = FedConfig::new(Method::Ls);
    let local_steps = r.get("local-steps", a.local_steps, base.local_steps)?;
    let local_lr = r.get("local-lr", a.local_lr, base.local_lr)?;
    let methods = parse_methods(&r.get("methods", a.methods.clone(), "ls,omd-gd,adaomd-gd".to_string())?)?;
    let eta_lambda = r.get("eta-lambda", a.eta_lambda, base.eta_lambda)?;
    let mu = r.get("mu", a.mu, base.mu)?;
    let seeds = parse_seeds(&r.get("seeds", a.seeds.clone(), default_seed()?.to_string())?).map_err(usage)?;
    let het = r.get("heterogeneity", a.heterogeneity.clone(), "rotation".to_string())?;
    let mut spec = FedSpec::new(clients, parse_heterogeneity(&het, clients)?);
    spec.samples_per_client = r.get("samples", a.samples, spec.samples_per_client)?;
    spec.features = r.get("features", a.features, spec.features)?;
    spec.batch_size = r.opt("batch-size", a.batch_size)?;
    spec.validate().map_err(usage)?;
    let jobs = r.opt("jobs", a.jobs)?;
    let out_dir = PathBuf::from(r.get("out-dir", a.out_dir.as_ref().map(|p| p.display().to_string()), ".".into())?);

    let configs: Vec<FedConfig> = methods
        .iter()
        .map(|&method| {
            let c = FedConfig { method, rounds, local_steps, local_lr, eta_lambda, mu, seeds: seeds.clone(), ..base.clone() };
            c.validate().map(|_| c)
        })
        .collect::<Result<_, _>>()
        .map_err(usage)?;

    let pool = jobs_pool(jobs)?;
    let results = pool
        .install(|| -> Result<Vec<_>, MooError> {
            let problems: Vec<FedLogReg> =
                seeds.par_iter().map(|&s| FedLogReg::generate(spec.clone(), s)).collect::<Result<_, _>>()?;
            let cells: Vec<(&FedConfig, usize)> =
                configs.iter().flat_map(|c| (0..seeds.len()).map(move |i| (c, i))).collect();
            cells.par_iter().map(|&(c, i)| run_federated(&problems[i], c, seeds[i])).collect()
        })
        .map_err(numeric)?;

    let mut outputs = Vec::new();
    let mut summary = Vec::new();
    for res in &results {
        let path = out_dir.join(format!("fed_rounds_{}_seed{}.csv", res.method.name(), res.seed));
        write_fed_rounds(create(&path)?, &res.worst_train_loss, &res.lambda_trace).map_err(numeric)?;
        outputs.push(path);
        let o = res.output();
        summary.push((res.method.name().to_string(), res.seed, o.average_accuracy, o.agnostic_loss, o.accuracy_parity));
    }
    let summary_path = out_dir.join("fed_summary.csv");
    write_fed_summary(create(&summary_path)?, &summary).map_err(numeric)?;
    outputs.insert(0, summary_path);
    r.write_manifest(&out_dir.join("fedsim.manifest"), &outputs)
}

const BOUND_KEYS: &[&str] = &["variant", "u", "l", "r-theta", "d", "m", "t", "gamma"];

fn cmd_bound(a: BoundArgs) -> CliResult<()> {
    let mut r = Resolver::load(a.config.as_deref(), "bound", BOUND_KEYS)?;
    let variant: BoundVariant = r.get("variant", a.variant.clone(), "pgd-pgd".to_string())?.parse().map_err(usage)?;
    let c = BoundConstants {
        u: r.get("u", a.u, 1.0)?,
        l: r.get("l", a.l, 1.0)?,
        r_theta: r.get("r-theta", a.r_theta, 1.0)?,
        d: r.get("d", a.d, 1)?,
        m: r.get("m", a.m, 2)?,
        t: r.required("t", a.t)?,
    };
    let gamma = r.opt("gamma", a.gamma)?;
    let (eta_theta, eta_lambda) = optimal_step_sizes(variant, &c).map_err(usage)?;
    let terms = convergence_bound_terms(variant, &c, gamma).map_err(usage)?;
    println!("variant = {variant}");
    println!("eta_theta = {eta_theta}");
    println!("eta_lambda = {eta_lambda}");
    println!("theta_term = {}", terms.theta);
    println!("lambda_term = {}", terms.lambda);
    if gamma.is_some() {
        println!("high_prob_term = {}", terms.high_prob);
    }
    println!("bound = {}", terms.total());
    Ok(())
}
