//! Reproducible empirical error-probability estimation, parameter sweeps,
//! and phase-transition localization.
//!
//! Every trial draws from a counter-based substream of (master seed, trial
//! index), and reductions are order-insensitive counts, so results are
//! bit-identical for any worker count.

use rayon::prelude::*;

use crate::channel::{haplotype_channel, outlier_channel, sbm_channel, EdgeChannelMap};
use crate::decoder::{dist, log_likelihood, ml_decode_exhaustive, ml_decode_local_search};
use crate::error::{Error, Result};
use crate::graph::{
    gen_complete, gen_erdos_renyi, gen_geometric_sphere, gen_grid, gen_ring,
    gen_two_cliques_bridge, Graph,
};
use crate::rng::CounterRng;

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    ErdosRenyi { n: usize, p: f64 },
    GeometricSphere { n: usize, r: f64 },
    Ring { n: usize, w: usize, circular: bool },
    Complete { n: usize },
    Grid { rows: usize, cols: usize },
    TwoCliquesBridge { n: usize },
}

impl GraphSpec {
    pub fn n(&self) -> usize {
        match *self {
            GraphSpec::ErdosRenyi { n, .. }
            | GraphSpec::GeometricSphere { n, .. }
            | GraphSpec::Ring { n, .. }
            | GraphSpec::Complete { n }
            | GraphSpec::TwoCliquesBridge { n } => n,
            GraphSpec::Grid { rows, cols } => rows * cols,
        }
    }

    /// Whether each trial draws a fresh graph.
    pub fn is_random(&self) -> bool {
        matches!(self, GraphSpec::ErdosRenyi { .. } | GraphSpec::GeometricSphere { .. })
    }

    /// Observation density: the edge probability for random graphs, 1 for
    /// the complete graph, none otherwise.
    pub fn p_obs(&self) -> Option<f64> {
        match *self {
            GraphSpec::ErdosRenyi { p, .. } => Some(p),
            GraphSpec::Complete { .. } => Some(1.0),
            _ => None,
        }
    }

    pub fn build(&self, seed: u64) -> Result<Graph> {
        match *self {
            GraphSpec::ErdosRenyi { n, p } => gen_erdos_renyi(n, p, seed),
            GraphSpec::GeometricSphere { n, r } => Ok(gen_geometric_sphere(n, r, seed)?.0),
            GraphSpec::Ring { n, w, circular } => gen_ring(n, w, circular),
            GraphSpec::Complete { n } => gen_complete(n),
            GraphSpec::Grid { rows, cols } => gen_grid(rows, cols),
            GraphSpec::TwoCliquesBridge { n } => gen_two_cliques_bridge(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Outlier { m: usize, p_true: f64 },
    Sbm { a: f64, b: f64 },
    Haplotype { theta: f64, reads: usize },
}

impl ChannelSpec {
    pub fn m(&self) -> usize {
        match *self {
            ChannelSpec::Outlier { m, .. } => m,
            ChannelSpec::Sbm { .. } | ChannelSpec::Haplotype { .. } => 2,
        }
    }

    pub fn build(&self, n: usize) -> Result<EdgeChannelMap> {
        let fam = match *self {
            ChannelSpec::Outlier { m, p_true } => outlier_channel(m, p_true)?,
            // At desk scale a ln n / n can exceed 1; saturate the edge
            // probability rather than reject the experiment.
            ChannelSpec::Sbm { a, b } => {
                let cap = n as f64 / (n as f64).ln();
                sbm_channel(a.min(cap), b.min(cap), n)?
            }
            ChannelSpec::Haplotype { theta, reads } => haplotype_channel(theta, reads)?,
        };
        Ok(EdgeChannelMap::uniform(fam))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthMode {
    Zero,
    UniformRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderSpec {
    Exhaustive,
    LocalSearch { restarts: usize },
}

/// How ties at the likelihood maximum are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiePolicy {
    /// The tie-broken estimate must be offset-equivalent to the truth
    /// (conservative default).
    TieBroken,
    /// Success whenever the truth attains the maximum likelihood, even if
    /// the tie broke elsewhere.
    TruthAmongMaximizers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    pub channel: ChannelSpec,
    pub truth_mode: TruthMode,
    pub decoder: DecoderSpec,
    pub trials: usize,
    pub master_seed: u64,
    pub tie_policy: TiePolicy,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InfeasibleConfig("trials must be >= 1".into()));
        }
        let n = self.graph.n();
        if n < 2 {
            return Err(Error::InfeasibleConfig("graph needs n >= 2".into()));
        }
        if let DecoderSpec::Exhaustive = self.decoder {
            match (self.channel.m() as u128).checked_pow((n - 1) as u32) {
                Some(space) if space <= crate::decoder::SEARCH_BUDGET => {}
                Some(space) => {
                    return Err(Error::InfeasibleConfig(format!(
                        "exhaustive decoding over {space} hypotheses exceeds the budget"
                    )))
                }
                None => {
                    return Err(Error::InfeasibleConfig(
                        "exhaustive decoding space overflows; far beyond the budget".into(),
                    ))
                }
            }
        }
        // Fail fast on bad channel/graph parameters.
        self.channel.build(n)?;
        self.graph.build(0)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorEstimate {
    pub p_e_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub errors: usize,
    pub trials: usize,
}

/// Wilson 95% score interval for a binomial proportion.
pub fn wilson_interval(errors: usize, trials: usize) -> (f64, f64) {
    const Z: f64 = 1.959963984540054;
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    (((center - half).max(0.0)), ((center + half).min(1.0)))
}

/// One decode trial; returns true on error. Everything random derives from
/// (master_seed, trial), so trials can run in any order.
fn run_trial(cfg: &ExperimentConfig, trial: u64) -> Result<bool> {
    let mut rng = CounterRng::new(cfg.master_seed, trial);
    let graph_seed = rng.next_u64();
    let obs_seed = rng.next_u64();
    let n = cfg.graph.n();
    let m = cfg.channel.m();

    let g = cfg.graph.build(graph_seed)?;
    if !g.is_connected() {
        return Ok(true); // exact recovery is impossible across components
    }
    let ch = cfg.channel.build(n)?;
    let x: Vec<usize> = match cfg.truth_mode {
        TruthMode::Zero => vec![0; n],
        TruthMode::UniformRandom => (0..n).map(|_| rng.below(m as u64) as usize).collect(),
    };
    let y = crate::channel::sample_observations(&g, &ch, &x, obs_seed)?;
    let res = match cfg.decoder {
        DecoderSpec::Exhaustive => ml_decode_exhaustive(n, &y, &ch)?,
        DecoderSpec::LocalSearch { restarts } => {
            ml_decode_local_search(n, &y, &ch, restarts, rng.next_u64())?
        }
    };
    let hit = dist(res.estimate.values(), &x, m)? == 0;
    let ok = match cfg.tie_policy {
        TiePolicy::TieBroken => hit,
        TiePolicy::TruthAmongMaximizers => {
            hit || log_likelihood(&y, &x, &ch) == res.log_likelihood
        }
    };
    Ok(!ok)
}

/// Runs `trials` independent instances and reports the empirical error
/// probability with a Wilson 95% interval. Deterministic given the config.
pub fn estimate_error_prob(cfg: &ExperimentConfig) -> Result<ErrorEstimate> {
    cfg.validate()?;
    let errors = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(cfg, t).map(|e| e as usize))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let (ci_low, ci_high) = wilson_interval(errors, cfg.trials);
    Ok(ErrorEstimate {
        p_e_hat: errors as f64 / cfg.trials as f64,
        ci_low,
        ci_high,
        errors,
        trials: cfg.trials,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub estimate: ErrorEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub param_path: String,
    pub rows: Vec<SweepRow>,
    /// Named predicted-threshold markers on the swept axis.
    pub thresholds: Vec<(String, f64)>,
}

/// Sets a numeric field addressed by a dotted path such as
/// "channel.p_true", "channel.b", "channel.reads", or "graph.p".
pub fn apply_param(cfg: &mut ExperimentConfig, path: &str, value: f64) -> Result<()> {
    match (path, &mut cfg.graph, &mut cfg.channel) {
        ("graph.p", GraphSpec::ErdosRenyi { p, .. }, _) => *p = value,
        ("graph.r", GraphSpec::GeometricSphere { r, .. }, _) => *r = value,
        ("channel.p_true", _, ChannelSpec::Outlier { p_true, .. }) => *p_true = value,
        ("channel.a", _, ChannelSpec::Sbm { a, .. }) => *a = value,
        ("channel.b", _, ChannelSpec::Sbm { b, .. }) => *b = value,
        ("channel.theta", _, ChannelSpec::Haplotype { theta, .. }) => *theta = value,
        ("channel.reads", _, ChannelSpec::Haplotype { reads, .. }) => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(Error::BadParam(format!("channel.reads needs a positive integer, got {value}")));
            }
            *reads = value as usize;
        }
        _ => {
            return Err(Error::BadParam(format!(
                "unknown or inapplicable sweep parameter {path:?}"
            )))
        }
    }
    Ok(())
}

/// Predicted-threshold markers for the swept axis, where a closed form is
/// known for the configured scenario.
pub fn threshold_markers(cfg: &ExperimentConfig, param_path: &str) -> Vec<(String, f64)> {
    let n = cfg.graph.n() as f64;
    let mut out = Vec::new();
    match (&cfg.channel, param_path) {
        (ChannelSpec::Outlier { m: 2, .. }, "channel.p_true") => {
            if let Some(p_obs) = cfg.graph.p_obs() {
                out.push(("p_true_achievable".to_string(), (2.0 * n.ln() / (p_obs * n)).sqrt()));
                out.push(("p_true_converse".to_string(), (n.ln() / (2.0 * p_obs * n)).sqrt()));
            }
        }
        (ChannelSpec::Sbm { a, .. }, "channel.b") => {
            // Boundary of (sqrt(a) - sqrt(b))^2 = 2 in b, for b < a.
            if *a >= 2.0 {
                out.push(("b_boundary".to_string(), (a.sqrt() - std::f64::consts::SQRT_2).powi(2)));
            }
        }
        (ChannelSpec::Haplotype { theta, .. }, "channel.reads") => {
            // Order-level crossing: L at which (1-2 theta)^2 = ln n / L.
            let gap2 = (1.0 - 2.0 * theta).powi(2);
            out.push(("reads_scaling".to_string(), n.ln() / gap2));
        }
        _ => {}
    }
    out
}

/// One error estimate per swept value. Each value gets its own substream of
/// the master seed, so inserting or removing values does not perturb the
/// others.
pub fn sweep(
    base_cfg: &ExperimentConfig,
    param_path: &str,
    values: &[f64],
    trials: usize,
) -> Result<SweepResult> {
    let thresholds = threshold_markers(base_cfg, param_path);
    let mut rows = Vec::with_capacity(values.len());
    for (idx, &value) in values.iter().enumerate() {
        let mut cfg = base_cfg.clone();
        cfg.trials = trials;
        apply_param(&mut cfg, param_path, value)?;
        cfg.master_seed = CounterRng::new(base_cfg.master_seed, 0x5eed_0000 + idx as u64).next_u64();
        rows.push(SweepRow { param: value, estimate: estimate_error_prob(&cfg)? });
    }
    Ok(SweepResult { param_path: param_path.to_string(), rows, thresholds })
}

/// Linear interpolation of the swept parameter where the empirical error
/// probability first crosses `level`.
pub fn locate_transition(sweep: &SweepResult, level: f64) -> Result<f64> {
    for pair in sweep.rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (pa, pb) = (a.estimate.p_e_hat, b.estimate.p_e_hat);
        if (pa - level) * (pb - level) <= 0.0 && pa != pb {
            let t = (level - pa) / (pb - pa);
            return Ok(a.param + t * (b.param - a.param));
        }
        if pa == level && pb == level {
            return Ok(a.param);
        }
    }
    Err(Error::NoCrossing)
}

impl SweepResult {
    /// CSV with header "param,pe,ci_low,ci_high,trials" plus one column per
    /// threshold marker (constant down the column).
    pub fn to_csv(&self) -> String {
        let mut header = String::from("param,pe,ci_low,ci_high,trials");
        for (name, _) in &self.thresholds {
            header.push(',');
            header.push_str(name);
        }
        let mut s = header;
        s.push('\n');
        for row in &self.rows {
            let e = &row.estimate;
            s.push_str(&format!(
                "{},{},{},{},{}",
                row.param, e.p_e_hat, e.ci_low, e.ci_high, e.trials
            ));
            for (_, v) in &self.thresholds {
                s.push_str(&format!(",{v}"));
            }
            s.push('\n');
        }
        s
    }

    /// Deterministic standalone SVG line plot of the error probability
    /// against the swept parameter, with the Wilson band and vertical
    /// threshold markers.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 420.0;
        const ML: f64 = 60.0; // margins
        const MR: f64 = 20.0;
        const MT: f64 = 20.0;
        const MB: f64 = 50.0;
        let xs: Vec<f64> = self.rows.iter().map(|r| r.param).collect();
        let (xmin, xmax) = xs
            .iter()
            .chain(self.thresholds.iter().map(|(_, v)| v))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let span = if xmax > xmin { xmax - xmin } else { 1.0 };
        let px = |x: f64| ML + (x - xmin) / span * (W - ML - MR);
        let py = |p: f64| MT + (1.0 - p) * (H - MT - MB);

        let mut s = String::new();
        s.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
        ));
        s.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
        ));
        // Axes.
        s.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
            H - MB,
            W - MR,
            H - MB
        ));
        s.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n",
            H - MB
        ));
        for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let y = py(tick);
            s.push_str(&format!(
                "<line x1=\"{}\" y1=\"{y}\" x2=\"{ML}\" y2=\"{y}\" stroke=\"black\"/>\n",
                ML - 5.0
            ));
            s.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{tick}</text>\n",
                ML - 8.0,
                y + 4.0
            ));
        }
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            (ML + W - MR) / 2.0,
            H - 12.0,
            self.param_path
        ));
        s.push_str(&format!(
            "<text x=\"14\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">empirical error probability</text>\n",
            (MT + H - MB) / 2.0,
            (MT + H - MB) / 2.0
        ));
        // Threshold markers.
        for (name, v) in &self.thresholds {
            let x = px(*v);
            s.push_str(&format!(
                "<line x1=\"{x}\" y1=\"{MT}\" x2=\"{x}\" y2=\"{}\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n",
                H - MB
            ));
            s.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"10\" fill=\"gray\">{name}</text>\n",
                x + 3.0,
                MT + 12.0
            ));
        }
        // Confidence band whiskers and the estimate polyline.
        for row in &self.rows {
            let x = px(row.param);
            s.push_str(&format!(
                "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"steelblue\" stroke-width=\"1\"/>\n",
                py(row.estimate.ci_low),
                py(row.estimate.ci_high)
            ));
        }
        let points: Vec<String> = self
            .rows
            .iter()
            .map(|r| format!("{},{}", px(r.param), py(r.estimate.p_e_hat)))
            .collect();
        s.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n",
            points.join(" ")
        ));
        for row in &self.rows {
            s.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"steelblue\"/>\n",
                px(row.param),
                py(row.estimate.p_e_hat)
            ));
        }
        s.push_str("</svg>\n");
        s
    }
}
