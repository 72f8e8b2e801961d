//! Channel families for the pairwise-difference model: generic transition
//! tables, the three application channels, per-edge variants, and
//! observation sampling.

use std::collections::BTreeMap;

use crate::divergence::Pmf;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::CounterRng;

/// A family of M transition measures over a shared output alphabet: row l is
/// the output law when the channel input (the pairwise difference) is l.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelFamily {
    rows: Vec<Pmf>,
    label: String,
}

impl ChannelFamily {
    pub fn new(rows: Vec<Pmf>, label: impl Into<String>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::DegenerateChannel(rows.len()));
        }
        let y = rows[0].len();
        if rows.iter().any(|r| r.len() != y) {
            return Err(Error::BadParam("rows must share one output alphabet".into()));
        }
        Ok(ChannelFamily { rows, label: label.into() })
    }

    /// Input alphabet size M.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Output alphabet size |Y|.
    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, l: usize) -> &Pmf {
        &self.rows[l % self.rows.len()]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Serializes as: line 1 "M |Y|", then one row of |Y| probabilities per
    /// input, space-separated, full precision.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.m(), self.outputs());
        for row in &self.rows {
            let cells: Vec<String> = row.probs().iter().map(|p| format!("{p:?}")).collect();
            s.push_str(&cells.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::BadParam("empty channel file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::BadParam(format!("bad header {header:?}"))))
            .collect::<Result<_>>()?;
        if dims.len() != 2 {
            return Err(Error::BadParam(format!("header must be \"M |Y|\", got {header:?}")));
        }
        let (m, y) = (dims[0], dims[1]);
        let mut rows = Vec::with_capacity(m);
        for l in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| Error::BadParam(format!("missing row {l} of {m}")))?;
            let probs: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::BadParam(format!("row {l}: bad value {t:?}"))))
                .collect::<Result<_>>()?;
            if probs.len() != y {
                return Err(Error::BadParam(format!("row {l}: expected {y} entries, got {}", probs.len())));
            }
            rows.push(Pmf::new(probs).map_err(|e| Error::BadParam(format!("row {l}: {e}")))?);
        }
        ChannelFamily::new(rows, "file")
    }
}

/// Per-edge channel assignment: a default family plus overrides keyed by
/// canonical edge (u, v), u < v. All families share the same M.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeChannelMap {
    default: ChannelFamily,
    overrides: BTreeMap<(usize, usize), ChannelFamily>,
}

impl EdgeChannelMap {
    pub fn uniform(default: ChannelFamily) -> Self {
        EdgeChannelMap { default, overrides: BTreeMap::new() }
    }

    pub fn with_overrides(
        default: ChannelFamily,
        overrides: BTreeMap<(usize, usize), ChannelFamily>,
    ) -> Result<Self> {
        let m = default.m();
        if overrides.values().any(|ch| ch.m() != m) {
            return Err(Error::BadParam("edge overrides must share the default's M".into()));
        }
        Ok(EdgeChannelMap { default, overrides })
    }

    pub fn m(&self) -> usize {
        self.default.m()
    }

    /// Family for edge (u, v) in either order.
    pub fn family(&self, u: usize, v: usize) -> &ChannelFamily {
        self.overrides.get(&(u.min(v), u.max(v))).unwrap_or(&self.default)
    }

    pub fn default_family(&self) -> &ChannelFamily {
        &self.default
    }
}

/// Observed outputs, one per edge. Keys are (i, j) with i > j; the channel
/// input for that edge is (x_i - x_j) mod M.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    y: BTreeMap<(usize, usize), usize>,
}

impl Observations {
    pub fn new(y: BTreeMap<(usize, usize), usize>) -> Self {
        Observations { y }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<usize> {
        self.y.get(&(i.max(j), i.min(j))).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &usize)> {
        self.y.iter()
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// CSV with header "i,j,y", one row per edge, i > j, sorted.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,j,y\n");
        for (&(i, j), &y) in &self.y {
            s.push_str(&format!("{i},{j},{y}\n"));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("i,j,y") => {}
            other => return Err(Error::BadParam(format!("expected header \"i,j,y\", got {other:?}"))),
        }
        let mut y = BTreeMap::new();
        for (idx, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 3 {
                return Err(Error::BadParam(format!("line {}: expected 3 fields", idx + 2)));
            }
            let parse = |t: &str| -> Result<usize> {
                t.trim().parse().map_err(|_| Error::BadParam(format!("line {}: bad value {t:?}", idx + 2)))
            };
            let (i, j, v) = (parse(cells[0])?, parse(cells[1])?, parse(cells[2])?);
            if i <= j {
                return Err(Error::BadParam(format!("line {}: rows must have i > j", idx + 2)));
            }
            y.insert((i, j), v);
        }
        Ok(Observations { y })
    }
}

/// Outlier model: the true difference with probability p_true, otherwise a
/// uniform symbol. Row l = p_true * delta_l + (1 - p_true) * Unif over
/// Y = {0..M-1}.
pub fn outlier_channel(m: usize, p_true: f64) -> Result<ChannelFamily> {
    if m < 2 {
        return Err(Error::DegenerateChannel(m));
    }
    if !(0.0..=1.0).contains(&p_true) {
        return Err(Error::BadParam(format!("p_true {p_true} outside [0,1]")));
    }
    let noise = (1.0 - p_true) / m as f64;
    let rows = (0..m)
        .map(|l| {
            let mut probs = vec![noise; m];
            probs[l] += p_true;
            Pmf::new(probs)
        })
        .collect::<Result<Vec<_>>>()?;
    ChannelFamily::new(rows, format!("outlier(M={m}, p_true={p_true})"))
}

/// Two-community block-model channel: P_0 = Bern(a ln n / n) for same-side
/// pairs, P_1 = Bern(b ln n / n) for cross pairs. The companion measurement
/// graph is complete.
pub fn sbm_channel(a: f64, b: f64, n: usize) -> Result<ChannelFamily> {
    if n < 2 {
        return Err(Error::BadParam(format!("n must be >= 2, got {n}")));
    }
    let scale = (n as f64).ln() / n as f64;
    let (pa, pb) = (a * scale, b * scale);
    for (name, p) in [("a", pa), ("b", pb)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadParam(format!("{name} ln n / n = {p} outside [0,1]")));
        }
    }
    ChannelFamily::new(
        vec![Pmf::bernoulli(pa)?, Pmf::bernoulli(pb)?],
        format!("sbm(a={a}, b={b}, n={n})"),
    )
}

/// Parity-read channel with error rate theta and L reads per pair, in the
/// count-of-ones sufficient-statistic form: M = 2, Y = {0..L},
/// row 0 = Binomial(L, theta), row 1 = Binomial(L, 1 - theta).
pub fn haplotype_channel(theta: f64, reads: usize) -> Result<ChannelFamily> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(Error::BadParam(format!("theta {theta} outside (0, 1/2)")));
    }
    if reads < 1 {
        return Err(Error::BadParam("need at least one read".into()));
    }
    ChannelFamily::new(
        vec![Pmf::binomial(reads, theta)?, Pmf::binomial(reads, 1.0 - theta)?],
        format!("haplotype(theta={theta}, L={reads})"),
    )
}

/// Ring graph with distance-dependent read counts: edge at index distance d
/// gets round(L * p_profile[d]) reads, at least 1. `p_profile[d]` must be
/// present for every d in 1..=w with values in (0, 1].
pub fn edge_channels_for_ring(
    n: usize,
    w: usize,
    circular: bool,
    theta: f64,
    reads: usize,
    p_profile: &BTreeMap<usize, f64>,
) -> Result<(Graph, EdgeChannelMap)> {
    for d in 1..=w {
        match p_profile.get(&d) {
            Some(&p) if p > 0.0 && p <= 1.0 => {}
            Some(&p) => return Err(Error::BadParam(format!("p_profile[{d}] = {p} outside (0,1]"))),
            None => return Err(Error::BadParam(format!("p_profile missing distance {d}"))),
        }
    }
    let g = crate::graph::gen_ring(n, w, circular)?;
    let mut per_distance = BTreeMap::new();
    for d in 1..=w {
        let l_d = ((reads as f64 * p_profile[&d]).round() as usize).max(1);
        per_distance.insert(d, haplotype_channel(theta, l_d)?);
    }
    let mut overrides = BTreeMap::new();
    for &(u, v) in g.edges() {
        let d = if circular { (v - u).min(n - (v - u)) } else { v - u };
        overrides.insert((u, v), per_distance[&d].clone());
    }
    let default = per_distance[&1].clone();
    let map = EdgeChannelMap::with_overrides(default, overrides)?;
    Ok((g, map))
}

/// Draws one output per edge: edge (u, v), u < v, observes a sample from row
/// (x_v - x_u) mod M of its family. Deterministic given the seed, with one
/// substream per edge indexed by canonical edge order, so results do not
/// depend on sampling order or worker count.
pub fn sample_observations(
    g: &Graph,
    ch: &EdgeChannelMap,
    x: &[usize],
    seed: u64,
) -> Result<Observations> {
    if x.len() != g.n() {
        return Err(Error::LengthMismatch(x.len(), g.n()));
    }
    let m = ch.m();
    if let Some(&bad) = x.iter().find(|&&v| v >= m) {
        return Err(Error::BadParam(format!("input symbol {bad} outside 0..{m}")));
    }
    let root = CounterRng::new(seed, 0);
    let mut y = BTreeMap::new();
    for (idx, &(u, v)) in g.edges().iter().enumerate() {
        let fam = ch.family(u, v);
        let l = (x[v] + m - x[u]) % m;
        let mut rng = root.substream(idx as u64);
        let draw = sample_pmf(fam.row(l), &mut rng);
        y.insert((v, u), draw);
    }
    Ok(Observations { y })
}

/// Inverse-CDF categorical draw.
fn sample_pmf(pmf: &Pmf, rng: &mut CounterRng) -> usize {
    let u = rng.next_f64();
    let mut acc = 0.0;
    for (i, &p) in pmf.probs().iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    pmf.len() - 1
}
