mod config;
mod verify;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{Config, ConfigError};
use pairdiff_core::channel::ChannelFamily;
use pairdiff_core::divergence::divergence_profile;
use pairdiff_core::graph::{
    cut_profile, gen_complete, gen_erdos_renyi, gen_geometric_sphere, gen_grid, gen_ring,
    gen_two_cliques_bridge, ENUMERATE_LIMIT,
};
use pairdiff_core::montecarlo::{
    estimate_error_prob, locate_transition, sweep, ChannelSpec, DecoderSpec, ExperimentConfig,
    GraphSpec, TiePolicy, TruthMode,
};
use pairdiff_core::thresholds::{
    corollary1_outlier, haplotype_thresholds, min_sample_complexity, sbm_thresholds,
    thm1_sufficient, thm3a_necessary, thm3b_necessary, thm4_sufficient, thm5_necessary,
    thm6_necessary, Direction, HaplotypeConstants, HaplotypeGraphModel,
};
use pairdiff_core::{Graph, ThresholdReport};

#[derive(Parser)]
#[command(name = "pairdiff", version, about = "Pairwise-difference recovery toolkit")]
struct Cli {
    /// Master seed for all randomness (recorded in manifests).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; defaults to available parallelism.
    #[arg(long, global = true, env = "PAIRDIFF_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a measurement graph and print its cut summary.
    Graph {
        /// complete | ring | erdos-renyi | geometric | grid | bridge
        #[arg(long)]
        model: String,
        #[arg(long)]
        n: Option<usize>,
        /// Ring window.
        #[arg(long)]
        w: Option<usize>,
        /// Edge probability (erdos-renyi).
        #[arg(long)]
        p: Option<f64>,
        /// Connection radius (geometric).
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        /// Drop the wrap-around edges of a ring.
        #[arg(long)]
        open: bool,
        /// Write the edge list here (summary still goes to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate recovery thresholds for a configured scenario.
    Predict {
        config: PathBuf,
        /// Emit one JSON object per report instead of text blocks.
        #[arg(long)]
        json: bool,
    },
    /// Estimate the error probability of a single configuration.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        /// Write a one-row CSV (plus manifest) here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a parameter and record the empirical phase transition.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Also render the sweep as an SVG plot.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Run the built-in invariant suite.
    Verify {
        /// Only run checks whose name starts with this prefix.
        #[arg(long)]
        only: Option<String>,
    },
}

enum AppError {
    /// Bad input or configuration: exit 2.
    Usage(String),
    /// Valid request that cannot be satisfied: exit 1.
    Domain(String),
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Usage(e.0)
    }
}

impl From<pairdiff_core::Error> for AppError {
    fn from(e: pairdiff_core::Error) -> Self {
        AppError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Domain(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be >= 1");
            return ExitCode::from(2);
        }
        // Ignore "already initialized": tests may reuse the process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    let seed = cli.seed;
    match cli.cmd {
        Cmd::Graph { model, n, w, p, r, rows, cols, open, out } => {
            cmd_graph(&model, n, w, p, r, rows, cols, !open, seed.unwrap_or(0), out.as_deref())
        }
        Cmd::Predict { config, json } => cmd_predict(&config, json),
        Cmd::Simulate { config, trials, out } => {
            cmd_simulate(&config, seed, trials, out.as_deref(), cli.jobs)
        }
        Cmd::Sweep { config, trials, out, plot } => {
            cmd_sweep(&config, seed, trials, &out, plot.as_deref(), cli.jobs)
        }
        Cmd::Verify { only } => {
            if verify::run(only.as_deref()) {
                Ok(())
            } else {
                Err(AppError::Domain("one or more checks failed".into()))
            }
        }
    }
}

fn need<T: Copy>(opt: Option<T>, flag: &str, model: &str) -> Result<T, AppError> {
    opt.ok_or_else(|| AppError::Usage(format!("model {model:?} requires --{flag}")))
}

#[allow(clippy::too_many_arguments)]
fn cmd_graph(
    model: &str,
    n: Option<usize>,
    w: Option<usize>,
    p: Option<f64>,
    r: Option<f64>,
    rows: Option<usize>,
    cols: Option<usize>,
    circular: bool,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), AppError> {
    let g = match model {
        "complete" => gen_complete(need(n, "n", model)?)?,
        "ring" => gen_ring(need(n, "n", model)?, need(w, "w", model)?, circular)?,
        "erdos-renyi" | "er" => gen_erdos_renyi(need(n, "n", model)?, need(p, "p", model)?, seed)?,
        "geometric" => gen_geometric_sphere(need(n, "n", model)?, need(r, "r", model)?, seed)?.0,
        "grid" => gen_grid(need(rows, "rows", model)?, need(cols, "cols", model)?)?,
        "bridge" => gen_two_cliques_bridge(need(n, "n", model)?)?,
        other => return Err(AppError::Usage(format!("unknown graph model {other:?}"))),
    };
    if let Some(path) = out {
        std::fs::write(path, g.to_text())?;
    }
    print_graph_summary(&g)?;
    Ok(())
}

fn print_graph_summary(g: &Graph) -> Result<(), AppError> {
    println!("n = {}", g.n());
    println!("edges = {}", g.edges().len());
    println!("connected = {}", g.is_connected());
    if g.is_connected() && g.n() <= ENUMERATE_LIMIT {
        let prof = cut_profile(g, ENUMERATE_LIMIT)?;
        println!("mincut = {}", prof.mincut);
        println!("d_min = {}", prof.d_min);
        println!("d_avg = {}", prof.d_avg);
        println!("d_max = {}", prof.d_max);
        println!("tau_cut = {}", prof.tau_cut);
        for (k, t) in &prof.tau_k {
            println!("tau_{k} = {t}");
        }
    } else if g.is_connected() {
        println!("mincut = {}", pairdiff_core::graph::min_cut(g)?);
        println!("note = cut census skipped (n exceeds the enumeration limit)");
    }
    Ok(())
}

fn report_json(r: &ThresholdReport) -> serde_json::Value {
    let mut params = serde_json::Map::new();
    for (k, v) in &r.parameters {
        params.insert(k.clone(), serde_json::json!(v));
    }
    serde_json::json!({
        "name": r.name,
        "direction": direction_str(r.direction),
        "satisfied": r.satisfied,
        "lhs": r.lhs,
        "rhs": r.rhs,
        "margin": r.margin,
        "error_bound": r.error_bound,
        "parameters": params,
    })
}

fn direction_str(d: Direction) -> &'static str {
    match d {
        Direction::Sufficient => "sufficient",
        Direction::Necessary => "necessary",
    }
}

fn print_reports(reports: &[ThresholdReport], json: bool) {
    for r in reports {
        if json {
            println!("{}", report_json(r));
            continue;
        }
        println!("[{}]", r.name);
        println!("  direction   = {}", direction_str(r.direction));
        println!("  satisfied   = {}", r.satisfied);
        println!("  lhs         = {}", r.lhs);
        println!("  rhs         = {}", r.rhs);
        println!("  margin      = {}", r.margin);
        if let Some(b) = r.error_bound {
            println!("  error_bound = {b}");
        }
        for (k, v) in &r.parameters {
            println!("  param {k} = {v}");
        }
        println!();
    }
}

fn cmd_predict(path: &Path, json: bool) -> Result<(), AppError> {
    let cfg = Config::parse(&std::fs::read_to_string(path)?)?;
    let scenario = cfg.require("scenario")?.to_string();
    let mut reports = Vec::new();
    let mut extras: Vec<(String, f64)> = Vec::new();
    match scenario.as_str() {
        "outlier" => {
            let n = require_usize(&cfg, "n")?;
            let m = require_usize(&cfg, "m")?;
            let p_obs = cfg.require_f64("p_obs")?;
            let p_true = cfg.require_f64("p_true")?;
            let epsilon = cfg.get_f64("epsilon")?.unwrap_or(0.1);
            let delta = cfg.get_f64("delta")?.unwrap_or(1.0);
            let zeta = cfg.get_f64("zeta")?.unwrap_or(0.0);
            let (ach, conv) = corollary1_outlier(n, m, p_obs, p_true, epsilon)?;
            if p_true > 0.0 {
                let ch = pairdiff_core::channel::outlier_channel(m, p_true)?;
                let prof = divergence_profile(&ch, &[], &[zeta])?;
                reports.push(thm1_sufficient(n, m, p_obs, &prof, delta)?);
                reports.push(thm3a_necessary(
                    n,
                    p_obs,
                    prof.kl_min,
                    prof.m_kl_at(zeta).unwrap_or(m - 1),
                    zeta,
                    epsilon.min(0.5),
                )?);
                extras.push(("min_samples".into(), min_sample_complexity(n, prof.hel_half_min())?));
            }
            reports.push(ach);
            reports.push(conv);
        }
        "sbm" => {
            let a = cfg.require_f64("a")?;
            let b = cfg.require_f64("b")?;
            let n = require_usize(&cfg, "n")?;
            let (ach, conv) = sbm_thresholds(a, b, n)?;
            reports.push(ach);
            reports.push(conv);
        }
        "haplotype" => {
            let theta = cfg.require_f64("theta")?;
            let reads = require_usize(&cfg, "reads")?;
            let n = require_usize(&cfg, "n")?;
            let model = match cfg.get("model").unwrap_or("ring") {
                "ring" => HaplotypeGraphModel::Ring,
                "erdos-renyi" | "er" => HaplotypeGraphModel::ErdosRenyi,
                other => return Err(AppError::Usage(format!("unknown haplotype model {other:?}"))),
            };
            let mut c = HaplotypeConstants::default();
            if let Some(v) = cfg.get_f64("c1")? {
                c.c1 = v;
            }
            if let Some(v) = cfg.get_f64("c2")? {
                c.c2 = v;
            }
            if let Some(v) = cfg.get_f64("c3")? {
                c.c3 = v;
            }
            if let Some(v) = cfg.get_f64("c4")? {
                c.c4 = v;
            }
            if let Some(v) = cfg.get_f64("c5")? {
                c.c5 = v;
            }
            let (ach, conv) = haplotype_thresholds(
                theta,
                reads,
                n,
                cfg.get_f64("p_obs")?,
                cfg.get_usize("w")?,
                model,
                c,
            )?;
            reports.push(ach);
            reports.push(conv);
        }
        "generic" => {
            let ch = ChannelFamily::from_text(&std::fs::read_to_string(
                cfg.require("channel.file")?,
            )?)?;
            let g = Graph::from_text(&std::fs::read_to_string(cfg.require("graph.file")?)?)?;
            let n = g.n();
            let epsilon = cfg.get_f64("epsilon")?.unwrap_or(0.1);
            let delta = cfg.get_f64("delta")?.unwrap_or(1.0);
            let zeta = cfg.get_f64("zeta")?.unwrap_or(0.0);
            let alpha = cfg.get_f64("alpha")?.unwrap_or(0.5);
            let prof = divergence_profile(&ch, &[alpha], &[zeta])?;
            let m_kl = prof.m_kl_at(zeta).unwrap_or(ch.m() - 1);
            let gp = cut_profile(&g, ENUMERATE_LIMIT)?;
            reports.push(thm4_sufficient(n, ch.m(), gp.mincut, gp.tau_cut, prof.sup_alpha_term, delta)?);
            reports.push(thm5_necessary(
                gp.mincut,
                gp.d_max,
                gp.tau_cut,
                prof.kl_min,
                m_kl,
                n,
                zeta,
                epsilon.min(0.5),
            )?);
            match thm6_necessary(gp.d_max, n, prof.hel_at(alpha).unwrap(), alpha, epsilon) {
                Ok(rep) => reports.push(rep),
                Err(e) => println!("note: hellinger necessary condition skipped ({e})"),
            }
            if let Some(p_obs) = cfg.get_f64("p_obs")? {
                reports.push(thm1_sufficient(n, ch.m(), p_obs, &prof, delta)?);
                reports.push(thm3a_necessary(n, p_obs, prof.kl_min, m_kl, zeta, epsilon.min(0.5))?);
                match thm3b_necessary(n, p_obs, prof.hel_at(alpha).unwrap(), alpha, epsilon) {
                    Ok(rep) => reports.push(rep),
                    Err(e) => println!("note: dense hellinger condition skipped ({e})"),
                }
            }
            if prof.hel_half_min() > 0.0 {
                extras.push(("min_samples".into(), min_sample_complexity(n, prof.hel_half_min())?));
            }
        }
        other => {
            return Err(AppError::Usage(format!(
                "unknown scenario {other:?} (expected generic | outlier | sbm | haplotype)"
            )))
        }
    }
    print_reports(&reports, json);
    for (k, v) in extras {
        if json {
            println!("{}", serde_json::json!({ k: v }));
        } else {
            println!("{k} = {v}");
        }
    }
    Ok(())
}

fn require_usize(cfg: &Config, key: &str) -> Result<usize, AppError> {
    Ok(cfg.get_usize(key)?.ok_or_else(|| ConfigError(format!("missing required key {key:?}")))?)
}

fn experiment_from_config(
    cfg: &Config,
    seed_flag: Option<u64>,
    trials_flag: Option<usize>,
) -> Result<ExperimentConfig, AppError> {
    let graph = match cfg.require("graph.model")? {
        "complete" => GraphSpec::Complete { n: require_usize(cfg, "graph.n")? },
        "ring" => GraphSpec::Ring {
            n: require_usize(cfg, "graph.n")?,
            w: require_usize(cfg, "graph.w")?,
            circular: cfg.get_bool("graph.circular")?.unwrap_or(true),
        },
        "erdos-renyi" | "er" => GraphSpec::ErdosRenyi {
            n: require_usize(cfg, "graph.n")?,
            p: cfg.require_f64("graph.p")?,
        },
        "geometric" => GraphSpec::GeometricSphere {
            n: require_usize(cfg, "graph.n")?,
            r: cfg.require_f64("graph.r")?,
        },
        "grid" => GraphSpec::Grid {
            rows: require_usize(cfg, "graph.rows")?,
            cols: require_usize(cfg, "graph.cols")?,
        },
        "bridge" => GraphSpec::TwoCliquesBridge { n: require_usize(cfg, "graph.n")? },
        other => return Err(AppError::Usage(format!("unknown graph model {other:?}"))),
    };
    let channel = match cfg.require("channel.kind")? {
        "outlier" => ChannelSpec::Outlier {
            m: require_usize(cfg, "channel.m")?,
            p_true: cfg.require_f64("channel.p_true")?,
        },
        "sbm" => ChannelSpec::Sbm {
            a: cfg.require_f64("channel.a")?,
            b: cfg.require_f64("channel.b")?,
        },
        "haplotype" => ChannelSpec::Haplotype {
            theta: cfg.require_f64("channel.theta")?,
            reads: require_usize(cfg, "channel.reads")?,
        },
        other => return Err(AppError::Usage(format!("unknown channel kind {other:?}"))),
    };
    let decoder = match cfg.get("decoder").unwrap_or("exhaustive") {
        "exhaustive" => DecoderSpec::Exhaustive,
        "local-search" => DecoderSpec::LocalSearch {
            restarts: cfg.get_usize("decoder.restarts")?.unwrap_or(8),
        },
        other => return Err(AppError::Usage(format!("unknown decoder {other:?}"))),
    };
    let truth_mode = match cfg.get("truth_mode").unwrap_or("uniform-random") {
        "uniform-random" => TruthMode::UniformRandom,
        "zero" => TruthMode::Zero,
        other => return Err(AppError::Usage(format!("unknown truth_mode {other:?}"))),
    };
    let tie_policy = match cfg.get("tie_policy").unwrap_or("tie-broken") {
        "tie-broken" => TiePolicy::TieBroken,
        "truth-among-maximizers" => TiePolicy::TruthAmongMaximizers,
        other => return Err(AppError::Usage(format!("unknown tie_policy {other:?}"))),
    };
    let trials = match trials_flag {
        Some(t) => t,
        None => cfg.get_usize("trials")?.unwrap_or(100),
    };
    let master_seed = match seed_flag {
        Some(s) => s,
        None => cfg.get_u64("seed")?.unwrap_or(0),
    };
    Ok(ExperimentConfig { graph, channel, truth_mode, decoder, trials, master_seed, tie_policy })
}

fn write_manifest(
    command: &str,
    cfg: &Config,
    exp: &ExperimentConfig,
    jobs: Option<usize>,
    outputs: &[&Path],
    elapsed_ms: u128,
) -> Result<PathBuf, AppError> {
    let mut snapshot = BTreeMap::new();
    for (k, v) in cfg.iter() {
        snapshot.insert(k.clone(), v.clone());
    }
    let manifest = serde_json::json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "master_seed": exp.master_seed,
        "trials": exp.trials,
        "jobs": jobs,
        "config": snapshot,
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "wall_clock_ms": elapsed_ms,
    });
    let path = match outputs.first() {
        Some(first) => {
            let mut s = first.as_os_str().to_owned();
            s.push(".manifest.json");
            PathBuf::from(s)
        }
        None => PathBuf::from("run.manifest.json"),
    };
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}

impl From<serde_json::Error> for AppError {
    fn from(e: serde_json::Error) -> Self {
        AppError::Domain(e.to_string())
    }
}

fn cmd_simulate(
    path: &Path,
    seed: Option<u64>,
    trials: Option<usize>,
    out: Option<&Path>,
    jobs: Option<usize>,
) -> Result<(), AppError> {
    let cfg = Config::parse(&std::fs::read_to_string(path)?)?;
    let exp = experiment_from_config(&cfg, seed, trials)?;
    exp.validate()?;
    let start = Instant::now();
    let est = estimate_error_prob(&exp)?;
    println!("pe = {}", est.p_e_hat);
    println!("ci_low = {}", est.ci_low);
    println!("ci_high = {}", est.ci_high);
    println!("errors = {}", est.errors);
    println!("trials = {}", est.trials);
    if let Some(out) = out {
        let csv = format!(
            "pe,ci_low,ci_high,errors,trials\n{},{},{},{},{}\n",
            est.p_e_hat, est.ci_low, est.ci_high, est.errors, est.trials
        );
        std::fs::write(out, csv)?;
        let manifest =
            write_manifest("simulate", &cfg, &exp, jobs, &[out], start.elapsed().as_millis())?;
        println!("wrote {} and {}", out.display(), manifest.display());
    }
    Ok(())
}

fn sweep_values(cfg: &Config) -> Result<Vec<f64>, AppError> {
    if let Some(values) = cfg.get_f64_list("sweep.values")? {
        if values.is_empty() {
            return Err(AppError::Usage("sweep.values must be non-empty".into()));
        }
        return Ok(values);
    }
    let start = cfg.require_f64("sweep.start")?;
    let stop = cfg.require_f64("sweep.stop")?;
    let count = require_usize(cfg, "sweep.count")?;
    if count < 2 || stop <= start {
        return Err(AppError::Usage("sweep range needs count >= 2 and stop > start".into()));
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

fn cmd_sweep(
    path: &Path,
    seed: Option<u64>,
    trials: Option<usize>,
    out: &Path,
    plot: Option<&Path>,
    jobs: Option<usize>,
) -> Result<(), AppError> {
    let cfg = Config::parse(&std::fs::read_to_string(path)?)?;
    let exp = experiment_from_config(&cfg, seed, trials)?;
    exp.validate()?;
    let param = cfg.require("sweep.param")?.to_string();
    let values = sweep_values(&cfg)?;
    let start = Instant::now();
    let result = sweep(&exp, &param, &values, exp.trials)?;
    std::fs::write(out, result.to_csv())?;
    let mut outputs: Vec<&Path> = vec![out];
    if let Some(plot) = plot {
        std::fs::write(plot, result.to_svg())?;
        outputs.push(plot);
    }
    let manifest = write_manifest("sweep", &cfg, &exp, jobs, &outputs, start.elapsed().as_millis())?;
    match locate_transition(&result, 0.5) {
        Ok(x) => println!("transition_at_half = {x}"),
        Err(_) => println!("transition_at_half = none"),
    }
    for p in &outputs {
        println!("wrote {}", p.display());
    }
    println!("wrote {}", manifest.display());
    Ok(())
}
