//! Maximum-likelihood decoding over the offset-equivalence classes of
//! {0..M-1}^n: exact exhaustive search, an iterated-conditional-modes
//! heuristic, the zero-one error metric, and the pairwise Chernoff bound.

use rayon::prelude::*;

use crate::channel::{EdgeChannelMap, Observations};
use crate::error::{Error, Result};
use crate::rng::CounterRng;

/// Hard budget on the number of canonical hypotheses scanned exhaustively.
pub const SEARCH_BUDGET: u128 = 1 << 24;

/// A canonical input hypothesis: values[0] = 0, so each offset-equivalence
/// class has exactly one representative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Hypothesis {
    values: Vec<usize>,
}

impl Hypothesis {
    /// Canonicalizes an arbitrary vector by subtracting values[0] mod M.
    pub fn canonical(values: &[usize], m: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::BadParam("empty hypothesis".into()));
        }
        if let Some(&bad) = values.iter().find(|&&v| v >= m) {
            return Err(Error::BadParam(format!("symbol {bad} outside 0..{m}")));
        }
        let off = values[0];
        Ok(Hypothesis { values: values.iter().map(|&v| (v + m - off) % m).collect() })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub estimate: Hypothesis,
    pub log_likelihood: f64,
    /// True only when an exhaustive scan found a single maximizer.
    pub unique_argmax: bool,
    /// Number of canonical hypotheses attaining the maximum (exhaustive
    /// scans only; the heuristic reports 1).
    pub ties: u64,
}

/// Zero-one distance modulo a global offset: 0 iff w = x + l*1 (mod M) for
/// some l, else 1.
pub fn dist(w: &[usize], x: &[usize], m: usize) -> Result<u8> {
    if w.len() != x.len() {
        return Err(Error::LengthMismatch(w.len(), x.len()));
    }
    if m < 2 {
        return Err(Error::DegenerateChannel(m));
    }
    for v in w.iter().chain(x) {
        if *v >= m {
            return Err(Error::BadParam(format!("symbol {v} outside 0..{m}")));
        }
    }
    if w.is_empty() {
        return Ok(0);
    }
    let off = (w[0] + m - x[0]) % m;
    let equal = w.iter().zip(x).all(|(&a, &b)| a == (b + off) % m);
    Ok(if equal { 0 } else { 1 })
}

/// Sum over observed edges of ln P_{(x_i - x_j) mod M}(y_ij); -inf if any
/// edge has zero probability under the hypothesis.
pub fn log_likelihood(y: &Observations, x: &[usize], ch: &EdgeChannelMap) -> f64 {
    let m = ch.m();
    let mut acc = 0.0;
    for (&(i, j), &obs) in y.iter() {
        let l = (x[i] + m - x[j]) % m;
        let p = ch.family(i, j).row(l).probs()[obs];
        if p == 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += p.ln();
    }
    acc
}

/// Per-edge log-probability tables: tab[e][l] = ln P_l^(e)(y_e), with -inf
/// for zero-probability symbols. Edge order follows the observation map.
fn ln_tables(y: &Observations, ch: &EdgeChannelMap) -> (Vec<(usize, usize)>, Vec<Vec<f64>>) {
    let m = ch.m();
    let mut edges = Vec::with_capacity(y.len());
    let mut tabs = Vec::with_capacity(y.len());
    for (&(i, j), &obs) in y.iter() {
        let fam = ch.family(i, j);
        let tab: Vec<f64> = (0..m)
            .map(|l| {
                let p = fam.row(l).probs()[obs];
                if p == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    p.ln()
                }
            })
            .collect();
        edges.push((i, j));
        tabs.push(tab);
    }
    (edges, tabs)
}

/// Decodes hypothesis index `idx` into canonical values. Digits are
/// big-endian over coordinates 1..n, so index order equals lexicographic
/// order of the value vectors.
fn index_to_values(mut idx: u64, n: usize, m: usize) -> Vec<usize> {
    let mut values = vec![0usize; n];
    for coord in (1..n).rev() {
        values[coord] = (idx % m as u64) as usize;
        idx /= m as u64;
    }
    values
}

fn ll_from_tables(values: &[usize], edges: &[(usize, usize)], tabs: &[Vec<f64>], m: usize) -> f64 {
    let mut acc = 0.0;
    for (&(i, j), tab) in edges.iter().zip(tabs) {
        let t = tab[(values[i] + m - values[j]) % m];
        if t == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        acc += t;
    }
    acc
}

/// Exhaustive maximum-likelihood decoding over all M^(n-1) canonical
/// hypotheses. Ties are counted exactly; the estimate is the
/// lexicographically smallest maximizer. The scan is partitioned across
/// workers with an order-insensitive reduction, so the result is identical
/// at any worker count.
pub fn ml_decode_exhaustive(
    n: usize,
    y: &Observations,
    ch: &EdgeChannelMap,
) -> Result<DecodeResult> {
    let m = ch.m();
    if n < 1 {
        return Err(Error::BadParam("n must be >= 1".into()));
    }
    let total = (m as u128).pow((n - 1) as u32);
    if total > SEARCH_BUDGET {
        return Err(Error::SearchSpaceTooLarge(total));
    }
    let total = total as u64;

    let (edges, tabs) = ln_tables(y, ch);

    // Per-chunk best: (log-likelihood, smallest index, tie count). Exact f64
    // equality is sound because every hypothesis' sum is computed in the
    // same edge order in every partition.
    #[derive(Clone, Copy)]
    struct Best {
        ll: f64,
        idx: u64,
        ties: u64,
    }
    let merge = |a: Best, b: Best| -> Best {
        if a.ll > b.ll {
            a
        } else if b.ll > a.ll {
            b
        } else {
            Best { ll: a.ll, idx: a.idx.min(b.idx), ties: a.ties + b.ties }
        }
    };

    const CHUNK: u64 = 1 << 12;
    let chunks: Vec<u64> = (0..total.div_ceil(CHUNK)).collect();
    let best = chunks
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(total);
            let mut best = Best { ll: f64::NEG_INFINITY, idx: lo, ties: 0 };
            let mut values = index_to_values(lo, n, m);
            for idx in lo..hi {
                if idx > lo {
                    // Odometer increment on the big-endian digits.
                    let mut coord = n - 1;
                    loop {
                        values[coord] += 1;
                        if values[coord] < m {
                            break;
                        }
                        values[coord] = 0;
                        coord -= 1;
                    }
                }
                let ll = ll_from_tables(&values, &edges, &tabs, m);
                let cand = Best { ll, idx, ties: 1 };
                best = merge(best, cand);
            }
            best
        })
        .reduce(|| Best { ll: f64::NEG_INFINITY, idx: u64::MAX, ties: 0 }, merge);

    let estimate = Hypothesis { values: index_to_values(best.idx, n, m) };
    Ok(DecodeResult {
        estimate,
        log_likelihood: best.ll,
        unique_argmax: best.ties == 1,
        ties: best.ties.max(1),
    })
}

/// Iterated-conditional-modes heuristic: sweep coordinates 1..n in ascending
/// order, setting each to its conditional argmax (smallest value on ties),
/// until a full sweep changes nothing. Runs from the all-zero start plus
/// `restarts` random starts and keeps the best endpoint. Cannot certify
/// uniqueness, so `unique_argmax` is always false.
pub fn ml_decode_local_search(
    n: usize,
    y: &Observations,
    ch: &EdgeChannelMap,
    restarts: usize,
    seed: u64,
) -> Result<DecodeResult> {
    let m = ch.m();
    if n < 1 {
        return Err(Error::BadParam("n must be >= 1".into()));
    }
    let (edges, tabs) = ln_tables(y, ch);
    // Soft tables for the climb: a zero-probability edge costs a huge finite
    // penalty instead of -inf, so moves that reduce the violation count
    // still register as improvements.
    const PENALTY: f64 = -1e15;
    let soft: Vec<Vec<f64>> = tabs
        .iter()
        .map(|tab| tab.iter().map(|&t| if t == f64::NEG_INFINITY { PENALTY } else { t }).collect())
        .collect();

    // incident[v] = (edge index, other endpoint, v_is_first) where the edge
    // key is (i, j) and the channel input is (x_i - x_j) mod M.
    let mut incident: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); n];
    for (e, &(i, j)) in edges.iter().enumerate() {
        incident[i].push((e, j, true));
        incident[j].push((e, i, false));
    }

    let climb = |mut values: Vec<usize>| -> Vec<usize> {
        loop {
            let mut changed = false;
            for v in 1..n {
                let mut best_val = values[v];
                let mut best_score = f64::NEG_INFINITY;
                for cand in 0..m {
                    let mut score = 0.0;
                    for &(e, other, v_first) in &incident[v] {
                        let l = if v_first {
                            (cand + m - values[other]) % m
                        } else {
                            (values[other] + m - cand) % m
                        };
                        score += soft[e][l];
                    }
                    if score > best_score {
                        best_score = score;
                        best_val = cand;
                    }
                }
                if best_val != values[v] {
                    values[v] = best_val;
                    changed = true;
                }
            }
            if !changed {
                return values;
            }
        }
    };

    let root = CounterRng::new(seed, 0);
    let mut best_values = climb(vec![0; n]);
    let mut best_soft = ll_from_tables(&best_values, &edges, &soft, m);
    for r in 0..restarts {
        let mut rng = root.substream(r as u64);
        let mut start = vec![0usize; n];
        for s in start.iter_mut().skip(1) {
            *s = rng.below(m as u64) as usize;
        }
        let end = climb(start);
        let ll = ll_from_tables(&end, &edges, &soft, m);
        if ll > best_soft || (ll == best_soft && end < best_values) {
            best_soft = ll;
            best_values = end;
        }
    }
    let log_likelihood = ll_from_tables(&best_values, &edges, &tabs, m);
    Ok(DecodeResult {
        estimate: Hypothesis { values: best_values },
        log_likelihood,
        unique_argmax: false,
        ties: 1,
    })
}

/// Chernoff bound on the pairwise log-likelihood-ratio error event for a
/// hypothesis disagreeing with the truth on `disagreement_edges` edges:
/// exp(-(1 - alpha) * disagreement_edges * d_alpha_min).
pub fn chernoff_pairwise_bound(
    disagreement_edges: u64,
    d_alpha_min: f64,
    alpha: f64,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::BadOrder(alpha));
    }
    if d_alpha_min < 0.0 {
        return Err(Error::BadParam(format!("d_alpha_min {d_alpha_min} must be >= 0")));
    }
    Ok((-(1.0 - alpha) * disagreement_edges as f64 * d_alpha_min).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{outlier_channel, sample_observations, EdgeChannelMap};
    use crate::graph::{gen_complete, gen_erdos_renyi, gen_ring};

    fn uniform_map(m: usize) -> EdgeChannelMap {
        EdgeChannelMap::uniform(outlier_channel(m, 0.0).unwrap())
    }

    #[test]
    fn dist_offset_equivalence() {
        assert_eq!(dist(&[0, 1, 2], &[0, 1, 2], 3).unwrap(), 0);
        assert_eq!(dist(&[1, 2, 0], &[0, 1, 2], 3).unwrap(), 0);
        assert_eq!(dist(&[3, 0, 1], &[0, 1, 2], 4).unwrap(), 0); // +3 shift
        assert_eq!(dist(&[0, 1, 0], &[0, 1, 2], 3).unwrap(), 1);
        assert!(matches!(dist(&[0, 1], &[0, 1, 2], 3), Err(Error::LengthMismatch(2, 3))));
    }

    #[test]
    fn dist_symmetric() {
        let mut rng = CounterRng::new(11, 0);
        for _ in 0..200 {
            let m = 2 + rng.below(4) as usize;
            let n = 2 + rng.below(5) as usize;
            let w: Vec<usize> = (0..n).map(|_| rng.below(m as u64) as usize).collect();
            let x: Vec<usize> = (0..n).map(|_| rng.below(m as u64) as usize).collect();
            assert_eq!(dist(&w, &x, m).unwrap(), dist(&x, &w, m).unwrap());
        }
    }

    #[test]
    fn log_likelihood_noiseless_truth_is_zero() {
        let g = gen_ring(6, 1, true).unwrap();
        let ch = EdgeChannelMap::uniform(outlier_channel(3, 1.0).unwrap());
        let x = vec![0, 1, 2, 0, 1, 2];
        let y = sample_observations(&g, &ch, &x, 1).unwrap();
        assert_eq!(log_likelihood(&y, &x, &ch), 0.0);
    }

    #[test]
    fn log_likelihood_uniform_is_constant() {
        let g = gen_complete(4).unwrap();
        let ch = uniform_map(3);
        let y = sample_observations(&g, &ch, &[0; 4], 2).unwrap();
        let expect = -(g.edges().len() as f64) * 3.0f64.ln();
        for x in [[0, 0, 0, 0], [0, 1, 2, 1], [2, 2, 1, 0]] {
            assert!((log_likelihood(&y, &x, &ch) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn log_likelihood_matches_product_oracle() {
        let g = gen_erdos_renyi(7, 0.6, 3).unwrap();
        let ch = EdgeChannelMap::uniform(outlier_channel(3, 0.6).unwrap());
        let truth = vec![0, 2, 1, 1, 0, 2, 1];
        let y = sample_observations(&g, &ch, &truth, 4).unwrap();
        let x = vec![0, 1, 1, 2, 0, 1, 2];
        let mut product = 1.0f64;
        for (&(i, j), &obs) in y.iter() {
            product *= ch.family(i, j).row((x[i] + 3 - x[j]) % 3).probs()[obs];
        }
        assert!((log_likelihood(&y, &x, &ch) - product.ln()).abs() < 1e-10);
    }

    #[test]
    fn log_likelihood_zero_probability_is_neg_inf() {
        let g = gen_ring(4, 1, true).unwrap();
        let ch = EdgeChannelMap::uniform(outlier_channel(2, 1.0).unwrap());
        let y = sample_observations(&g, &ch, &[0, 1, 0, 1], 5).unwrap();
        assert_eq!(log_likelihood(&y, &[0, 0, 0, 0], &ch), f64::NEG_INFINITY);
    }

    #[test]
    fn exhaustive_noiseless_recovers_truth() {
        let g = gen_ring(8, 2, true).unwrap();
        let ch = EdgeChannelMap::uniform(outlier_channel(3, 1.0).unwrap());
        let truth = vec![0, 2, 1, 0, 0, 1, 2, 2];
        let y = sample_observations(&g, &ch, &truth, 6).unwrap();
        let res = ml_decode_exhaustive(8, &y, &ch).unwrap();
        assert_eq!(dist(res.estimate.values(), &truth, 3).unwrap(), 0);
        assert!(res.unique_argmax);
        assert_eq!(res.ties, 1);
    }

    #[test]
    fn exhaustive_uniform_channel_ties() {
        let g = gen_complete(3).unwrap();
        let ch = uniform_map(2);
        let y = sample_observations(&g, &ch, &[0, 0, 0], 7).unwrap();
        let res = ml_decode_exhaustive(3, &y, &ch).unwrap();
        assert_eq!(res.ties, 4); // all 2^(3-1) canonical hypotheses tie
        assert!(!res.unique_argmax);
        assert_eq!(res.estimate.values(), &[0, 0, 0]); // lexicographic break
    }

    #[test]
    fn exhaustive_beats_truth_and_full_rescan() {
        let mut rng = CounterRng::new(21, 0);
        for trial in 0..10u64 {
            let g = gen_erdos_renyi(6, 0.7, 100 + trial).unwrap();
            if !g.is_connected() {
                continue;
            }
            let m = 2 + (trial % 2) as usize;
            let ch = EdgeChannelMap::uniform(outlier_channel(m, 0.7).unwrap());
            let truth: Vec<usize> = (0..6).map(|_| rng.below(m as u64) as usize).collect();
            let y = sample_observations(&g, &ch, &truth, 200 + trial).unwrap();
            let res = ml_decode_exhaustive(6, &y, &ch).unwrap();
            assert!(res.log_likelihood >= log_likelihood(&y, &truth, &ch) - 1e-12);
            // Full rescan: no canonical hypothesis does better.
            let mut ties = 0;
            for idx in 0..(m as u64).pow(5) {
                let values = index_to_values(idx, 6, m);
                let ll = log_likelihood(&y, &values, &ch);
                assert!(ll <= res.log_likelihood + 1e-12);
                if ll == res.log_likelihood {
                    ties += 1;
                }
            }
            assert_eq!(ties, res.ties);
        }
    }

    #[test]
    fn exhaustive_rejects_oversized_space() {
        let g = gen_ring(40, 2, true).unwrap();
        let ch = EdgeChannelMap::uniform(outlier_channel(4, 0.5).unwrap());
        let y = sample_observations(&g, &ch, &vec![0; 40], 1).unwrap();
        assert!(matches!(
            ml_decode_exhaustive(40, &y, &ch),
            Err(Error::SearchSpaceTooLarge(_))
        ));
    }

    #[test]
    fn local_search_noiseless_reaches_truth() {
        let g = gen_ring(30, 3, true).unwrap();
        let ch = EdgeChannelMap::uniform(outlier_channel(4, 1.0).unwrap());
        let truth: Vec<usize> = (0..30).map(|i| (i * 7) % 4).collect();
        let y = sample_observations(&g, &ch, &truth, 9).unwrap();
        let res = ml_decode_local_search(30, &y, &ch, 4, 13).unwrap();
        assert_eq!(dist(res.estimate.values(), &truth, 4).unwrap(), 0);
    }

    #[test]
    fn local_search_no_restarts_uniform_stays_zero() {
        let g = gen_complete(5).unwrap();
        let ch = uniform_map(3);
        let y = sample_observations(&g, &ch, &[0; 5], 2).unwrap();
        let res = ml_decode_local_search(5, &y, &ch, 0, 0).unwrap();
        assert_eq!(res.estimate.values(), &[0; 5]);
        assert!(!res.unique_argmax);
    }

    #[test]
    fn local_search_mostly_matches_exhaustive() {
        let mut hits = 0;
        let mut eligible = 0;
        for trial in 0..60u64 {
            let g = gen_erdos_renyi(8, 0.6, 300 + trial).unwrap();
            if !g.is_connected() {
                continue;
            }
            let ch = EdgeChannelMap::uniform(outlier_channel(2, 0.75).unwrap());
            let mut rng = CounterRng::new(400 + trial, 0);
            let truth: Vec<usize> = (0..8).map(|_| rng.below(2) as usize).collect();
            let y = sample_observations(&g, &ch, &truth, 500 + trial).unwrap();
            let exact = ml_decode_exhaustive(8, &y, &ch).unwrap();
            if !exact.unique_argmax {
                continue;
            }
            eligible += 1;
            let heur = ml_decode_local_search(8, &y, &ch, 32, 600 + trial).unwrap();
            if heur.estimate == exact.estimate {
                hits += 1;
            }
        }
        assert!(eligible >= 30, "too few eligible instances: {eligible}");
        assert!(
            hits as f64 >= 0.95 * eligible as f64,
            "heuristic matched exhaustive on {hits}/{eligible}"
        );
    }

    #[test]
    fn local_search_deterministic() {
        let g = gen_erdos_renyi(12, 0.5, 8).unwrap();
        let ch = EdgeChannelMap::uniform(outlier_channel(3, 0.5).unwrap());
        let y = sample_observations(&g, &ch, &vec![1; 12], 3).unwrap();
        let a = ml_decode_local_search(12, &y, &ch, 16, 77).unwrap();
        let b = ml_decode_local_search(12, &y, &ch, 16, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn chernoff_bound_edges() {
        assert_eq!(chernoff_pairwise_bound(0, 1.5, 0.5).unwrap(), 1.0);
        assert_eq!(chernoff_pairwise_bound(10, 0.0, 0.5).unwrap(), 1.0);
        let b = chernoff_pairwise_bound(4, 0.3, 0.5).unwrap();
        assert!((b - (-0.5 * 4.0 * 0.3f64).exp()).abs() < 1e-15);
        assert!(chernoff_pairwise_bound(1, 1.0, 1.0).is_err());
        assert!(chernoff_pairwise_bound(1, -1.0, 0.5).is_err());
    }

    #[test]
    fn canonical_hypothesis_pins_first_coordinate() {
        let h = Hypothesis::canonical(&[2, 0, 1], 3).unwrap();
        assert_eq!(h.values(), &[0, 1, 2]);
        assert!(Hypothesis::canonical(&[3, 0], 3).is_err());
    }
}
