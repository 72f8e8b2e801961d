//! Measurement-graph generators and cut-theoretic metrics: global min-cut,
//! edge expansion, the cut census, the cut-homogeneity exponent, and
//! hypothesis-class counting.
//!
//! Enumeration-based operations (census, expansion, class counts) are exact
//! and refuse instances beyond a hard size limit instead of approximating.

use crate::error::{Error, Result};
use crate::rng::CounterRng;

/// Hard limit on vertex count for subset-enumeration operations.
pub const ENUMERATE_LIMIT: usize = 24;

/// An undirected simple graph on vertices 0..n.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list; pairs are normalized to (min, max),
    /// deduplicated, and sorted.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut es: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::BadShape(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::BadShape(format!("edge ({a},{b}) outside 0..{n}")));
            }
            es.push((a.min(b), a.max(b)));
        }
        es.sort_unstable();
        es.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &es {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { n, edges: es, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges in canonical sorted order, each as (u, v) with u < v.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }

    /// Serializes as: first line "n", then one "i j" line per edge, i < j.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines
            .next()
            .ok_or_else(|| Error::BadShape("empty graph file".into()))?;
        let n: usize = first
            .trim()
            .parse()
            .map_err(|_| Error::BadShape(format!("line 1: expected vertex count, got {first:?}")))?;
        let mut edges = Vec::new();
        for (idx, line) in lines {
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize> {
                tok.and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::BadShape(format!("line {}: expected \"i j\", got {line:?}", idx + 1)))
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::BadShape(format!("line {}: trailing tokens in {line:?}", idx + 1)));
            }
            edges.push((u, v));
        }
        Graph::new(n, edges)
    }
}

/// Each unordered pair joined independently with probability p.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n < 1 {
        return Err(Error::BadShape("n must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadParam(format!("edge probability {p} outside [0,1]")));
    }
    let mut rng = CounterRng::new(seed, 0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.next_f64() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// Vertices i.i.d. uniform on the unit 2-sphere; edge iff chord distance <= r.
/// Returns the graph and the sampled coordinates.
pub fn gen_geometric_sphere(n: usize, r: f64, seed: u64) -> Result<(Graph, Vec<Vec<f64>>)> {
    if n < 1 {
        return Err(Error::BadShape("n must be >= 1".into()));
    }
    if r < 0.0 {
        return Err(Error::BadParam(format!("radius {r} must be >= 0")));
    }
    let mut rng = CounterRng::new(seed, 0);
    let mut coords = Vec::with_capacity(n);
    for _ in 0..n {
        // Uniform on the sphere: z uniform in [-1,1], azimuth uniform.
        let z = 2.0 * rng.next_f64() - 1.0;
        let phi = 2.0 * std::f64::consts::PI * rng.next_f64();
        let s = (1.0 - z * z).max(0.0).sqrt();
        coords.push(vec![s * phi.cos(), s * phi.sin(), z]);
    }
    let mut edges = Vec::new();
    let r2 = r * r;
    for u in 0..n {
        for v in (u + 1)..n {
            let d2: f64 = coords[u]
                .iter()
                .zip(&coords[v])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d2 <= r2 {
                edges.push((u, v));
            }
        }
    }
    Ok((Graph::new(n, edges)?, coords))
}

/// Ring lattice: edge iff the index distance is at most w. Circular uses
/// min(|i-j|, n-|i-j|); otherwise plain |i-j| (a line variant).
pub fn gen_ring(n: usize, w: usize, circular: bool) -> Result<Graph> {
    if n < 2 || w < 1 || 2 * w >= n {
        return Err(Error::BadWindow { n, w });
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let d = if circular { (v - u).min(n - (v - u)) } else { v - u };
            if d <= w {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

pub fn gen_complete(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::BadShape("complete graph needs n >= 2".into()));
    }
    let edges = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v)));
    Graph::new(n, edges)
}

/// 2D lattice with 4-neighbor adjacency; vertex (r, c) has index r*cols + c.
pub fn gen_grid(rows: usize, cols: usize) -> Result<Graph> {
    if rows * cols < 2 {
        return Err(Error::BadShape("grid needs at least 2 vertices".into()));
    }
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Graph::new(rows * cols, edges)
}

/// Two disjoint complete graphs on n/2 vertices joined by a single bridge
/// edge between vertex n/2 - 1 and vertex n/2.
pub fn gen_two_cliques_bridge(n: usize) -> Result<Graph> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::BadShape(format!("bridge graph needs even n >= 4, got {n}")));
    }
    let half = n / 2;
    let mut edges = Vec::new();
    for base in [0, half] {
        for u in base..(base + half) {
            for v in (u + 1)..(base + half) {
                edges.push((u, v));
            }
        }
    }
    edges.push((half - 1, half));
    Graph::new(n, edges)
}

/// Global minimum edge cut by the deterministic contraction-phase algorithm
/// (maximum-adjacency orderings). Exact for unit weights.
pub fn min_cut(g: &Graph) -> Result<usize> {
    if g.n() < 2 {
        return Err(Error::BadShape("min cut needs n >= 2".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    let mut w = vec![vec![0u64; n]; n];
    for &(u, v) in g.edges() {
        w[u][v] = 1;
        w[v][u] = 1;
    }
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    while alive.len() > 1 {
        // One phase: grow a maximum-adjacency ordering, record the
        // cut-of-the-phase, then merge the last two vertices added.
        let mut in_a = vec![false; n];
        let start = alive[0];
        in_a[start] = true;
        let mut wsum = vec![0u64; n];
        for &v in &alive {
            wsum[v] = w[start][v];
        }
        let mut prev = start;
        let mut last = start;
        for _ in 1..alive.len() {
            let mut pick = usize::MAX;
            for &v in &alive {
                if !in_a[v] && (pick == usize::MAX || wsum[v] > wsum[pick]) {
                    pick = v;
                }
            }
            in_a[pick] = true;
            prev = last;
            last = pick;
            for &v in &alive {
                if !in_a[v] {
                    wsum[v] += w[pick][v];
                }
            }
        }
        best = best.min(wsum[last]);
        for &v in &alive {
            if v != last && v != prev {
                w[prev][v] += w[last][v];
                w[v][prev] = w[prev][v];
            }
        }
        alive.retain(|&v| v != last);
    }
    Ok(best as usize)
}

/// Degree statistics, cut census, and the cut-homogeneity exponent.
#[derive(Debug, Clone)]
pub struct CutProfile {
    pub mincut: usize,
    pub d_min: usize,
    pub d_avg: f64,
    pub d_max: usize,
    /// census[m] = number of unordered cut classes with cut size <= m,
    /// for m = 0..=|E|. The trivial class counts once; S and its complement
    /// are identified, so census[|E|] = 2^(n-1).
    pub census: Vec<u64>,
    /// (k, (1/k) ln census[min(k * mincut, |E|)]) for k = 1 up to saturation.
    pub tau_k: Vec<(usize, f64)>,
    pub tau_cut: f64,
    pub connected: bool,
}

/// Histogram of cut sizes over all 2^(n-1) unordered cut classes, by a
/// gray-code walk with incremental cut-size updates. Vertex n-1 is pinned to
/// the complement side so each class is visited exactly once.
fn cut_size_histogram(g: &Graph) -> Vec<u64> {
    let n = g.n();
    let bits = n - 1;
    let mut hist = vec![0u64; g.edges().len() + 1];
    let mut side = 0u32; // bitmask over vertices 0..n-1; bit set = in S
    let mut cut = 0i64;
    hist[0] += 1; // mask 0: the trivial class
    for code in 1u64..(1u64 << bits) {
        let flip = (code.trailing_zeros()) as usize; // gray-code bit flipped
        let joining = side & (1 << flip) == 0;
        let mut delta = 0i64;
        for &u in g.neighbors(flip) {
            let u_in_s = u < bits && side & (1 << u) != 0;
            delta += if u_in_s { -1 } else { 1 };
        }
        if joining {
            side |= 1 << flip;
            cut += delta;
        } else {
            side &= !(1 << flip);
            cut -= delta; // leaving reverses the boundary change
        }
        hist[cut as usize] += 1;
    }
    hist
}

/// Computes the [`CutProfile`]. Requires a connected graph with
/// 2 <= n <= `enumerate_limit` (the census is exhaustive).
pub fn cut_profile(g: &Graph, enumerate_limit: usize) -> Result<CutProfile> {
    let n = g.n();
    if n > enumerate_limit || n > ENUMERATE_LIMIT {
        return Err(Error::TooLargeToEnumerate(format!(
            "census over 2^{} cut classes (limit n = {})",
            n - 1,
            enumerate_limit.min(ENUMERATE_LIMIT)
        )));
    }
    let mincut = min_cut(g)?; // errors on n < 2 or disconnected
    let degs: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let hist = cut_size_histogram(g);
    let mut census = vec![0u64; hist.len()];
    let mut acc = 0u64;
    for (m, &h) in hist.iter().enumerate() {
        acc += h;
        census[m] = acc;
    }
    let total = 1u64 << (n - 1);
    let k_max = (n * n).div_ceil(mincut);
    let mut tau_k = Vec::new();
    let mut tau_cut = f64::NEG_INFINITY;
    for k in 1..=k_max {
        let m = (k * mincut).min(g.edges().len());
        let t = (census[m] as f64).ln() / k as f64;
        tau_k.push((k, t));
        tau_cut = tau_cut.max(t);
        if census[m] == total {
            break; // saturated: later k only shrink (1/k) ln(total)
        }
    }
    Ok(CutProfile {
        mincut,
        d_min: *degs.iter().min().unwrap(),
        d_avg: degs.iter().sum::<usize>() as f64 / n as f64,
        d_max: *degs.iter().max().unwrap(),
        census,
        tau_k,
        tau_cut,
        connected: true,
    })
}

/// Edge expansion h_G: minimum over nonempty S with |S| <= n/2 of
/// (boundary edges of S) / |S|. Exhaustive over cut classes.
pub fn edge_expansion(g: &Graph) -> Result<f64> {
    let n = g.n();
    if n > ENUMERATE_LIMIT {
        return Err(Error::TooLargeToEnumerate(format!("2^{n} subsets (limit n = {ENUMERATE_LIMIT})")));
    }
    if n < 2 {
        return Err(Error::BadShape("edge expansion needs n >= 2".into()));
    }
    // Walk cut classes as in the census; the smaller side of each class is
    // always a valid S, and e/smaller <= e/larger, so classes suffice.
    let bits = n - 1;
    let mut best = f64::INFINITY;
    let mut side = 0u32;
    let mut cut = 0i64;
    let mut size = 0i64;
    for code in 1u64..(1u64 << bits) {
        let flip = (code.trailing_zeros()) as usize;
        let joining = side & (1 << flip) == 0;
        let mut delta = 0i64;
        for &u in g.neighbors(flip) {
            let u_in_s = u < bits && side & (1 << u) != 0;
            delta += if u_in_s { -1 } else { 1 };
        }
        if joining {
            side |= 1 << flip;
            cut += delta;
            size += 1;
        } else {
            side &= !(1 << flip);
            cut -= delta;
            size -= 1;
        }
        let small = size.min(n as i64 - size);
        let ratio = cut as f64 / small as f64;
        if ratio < best {
            best = ratio;
        }
    }
    Ok(best)
}

/// Expander-style upper bound on the cut-homogeneity exponent:
/// (mincut / h_G) ln n + ln 2.
pub fn tau_bound_expander(g: &Graph) -> Result<f64> {
    let mc = min_cut(g)? as f64;
    let h = edge_expansion(g)?;
    Ok(mc / h * (g.n() as f64).ln() + std::f64::consts::LN_2)
}

/// Constants for the geometric-homogeneity conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricHomogeneityParams {
    pub rho: f64,
    pub kappa: f64,
}

impl GeometricHomogeneityParams {
    pub fn new(rho: f64, kappa: f64) -> Result<Self> {
        if rho <= 0.0 {
            return Err(Error::BadParam(format!("rho must be > 0, got {rho}")));
        }
        if !(kappa > 0.0 && kappa < 0.5) {
            return Err(Error::BadParam(format!("kappa must lie in (0, 1/2), got {kappa}")));
        }
        Ok(GeometricHomogeneityParams { rho, kappa })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneityCheck {
    /// Every edge's endpoints share at least rho * mincut neighbors.
    pub cond_a: bool,
    /// For each edge (u,v), each of the floor(kappa rho mincut) shared
    /// neighbors closest to v covers all but (1/2) rho mincut of v's
    /// neighborhood.
    pub cond_b: bool,
    /// The exponent bound (8 / (kappa rho)) ln(2n) implied when both hold.
    pub bound: f64,
}

/// Checks the two geometric-homogeneity conditions against supplied vertex
/// coordinates (used to order shared neighbors by distance).
pub fn verify_geometric_homogeneity(
    g: &Graph,
    params: GeometricHomogeneityParams,
    coords: &[Vec<f64>],
) -> Result<HomogeneityCheck> {
    if coords.len() != g.n() {
        return Err(Error::MissingCoordinates);
    }
    let mc = min_cut(g)? as f64;
    let dist2 = |a: usize, b: usize| -> f64 {
        coords[a].iter().zip(&coords[b]).map(|(x, y)| (x - y) * (x - y)).sum()
    };
    let shared = |u: usize, v: usize| -> Vec<usize> {
        g.neighbors(u).iter().copied().filter(|w| g.neighbors(v).binary_search(w).is_ok()).collect()
    };
    let mut cond_a = true;
    let mut cond_b = true;
    let take = (params.kappa * params.rho * mc).floor() as usize;
    for &(u, v) in g.edges() {
        for (a, b) in [(u, v), (v, u)] {
            let mut common = shared(a, b);
            if (common.len() as f64) < params.rho * mc {
                cond_a = false;
            }
            common.sort_by(|&x, &y| dist2(x, b).partial_cmp(&dist2(y, b)).unwrap());
            for &w in common.iter().take(take) {
                let uncovered = g
                    .neighbors(b)
                    .iter()
                    .filter(|x| g.neighbors(w).binary_search(x).is_err())
                    .count();
                if uncovered as f64 > 0.5 * params.rho * mc {
                    cond_b = false;
                }
            }
        }
    }
    let bound = 8.0 / (params.kappa * params.rho) * (2.0 * g.n() as f64).ln();
    Ok(HomogeneityCheck { cond_a, cond_b, bound })
}

/// Counts offset-inequivalent hypotheses w (canonical form w[0] = 0, w != 0)
/// whose disagreement-edge count {(u,v) in E : w_u != w_v} is strictly below
/// k * mincut. Exhaustive over M^(n-1) canonical vectors.
pub fn count_hypothesis_classes(g: &Graph, m: usize, k: usize) -> Result<u64> {
    if m < 2 {
        return Err(Error::DegenerateChannel(m));
    }
    let n = g.n();
    let space = (m as u128).pow(n as u32);
    if space > 1 << 24 {
        return Err(Error::TooLargeToEnumerate(format!("{m}^{n} hypotheses")));
    }
    let cutoff = (k * min_cut(g)?) as u64;
    let mut w = vec![0usize; n];
    let mut count = 0u64;
    // Odometer over coordinates 1..n with w[0] pinned to 0.
    loop {
        let mut i = 1;
        while i < n {
            w[i] += 1;
            if w[i] < m {
                break;
            }
            w[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        let disagree = g.edges().iter().filter(|&&(u, v)| w[u] != w[v]).count() as u64;
        if disagree < cutoff {
            count += 1;
        }
    }
    Ok(count)
}
