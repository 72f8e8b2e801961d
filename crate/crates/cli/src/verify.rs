//! Built-in invariant suite: re-checks the numerical identities, oracle
//! equivalences, and bound dominations on fresh deterministic instances.

use pairdiff_core::channel::{outlier_channel, sample_observations, EdgeChannelMap};
use pairdiff_core::decoder::{chernoff_pairwise_bound, dist, log_likelihood, ml_decode_exhaustive};
use pairdiff_core::divergence::{
    decoupling_check, divergence_profile, fact1_bounds, renyi, Pmf,
};
use pairdiff_core::graph::{
    count_hypothesis_classes, cut_profile, gen_complete, gen_erdos_renyi, gen_ring, min_cut,
    tau_bound_expander,
};
use pairdiff_core::montecarlo::{
    estimate_error_prob, ChannelSpec, DecoderSpec, ExperimentConfig, GraphSpec, TiePolicy,
    TruthMode,
};
use pairdiff_core::rng::CounterRng;

pub struct Check {
    pub name: &'static str,
    pub run: fn() -> Result<(), String>,
}

fn fail(msg: String) -> Result<(), String> {
    Err(msg)
}

fn outlier_closed_forms() -> Result<(), String> {
    for m in [2usize, 3, 5, 17] {
        for i in 0..10 {
            let p = i as f64 / 10.0;
            let ch = outlier_channel(m, p).map_err(|e| e.to_string())?;
            let prof = divergence_profile(&ch, &[0.5], &[0.0]).map_err(|e| e.to_string())?;
            let mf = m as f64;
            let kl_expect =
                if p == 0.0 { 0.0 } else { p * (1.0 + p * mf / (1.0 - p)).ln() };
            let hel_expect = 2.0 / mf * ((1.0 - p + mf * p).sqrt() - (1.0 - p).sqrt()).powi(2);
            if (prof.kl_min - kl_expect).abs() > 1e-12 {
                return fail(format!("kl_min mismatch at (M={m}, p={p}): {} vs {kl_expect}", prof.kl_min));
            }
            if (prof.hel_half_min() - hel_expect).abs() > 1e-12 {
                return fail(format!("hel_min mismatch at (M={m}, p={p})"));
            }
        }
    }
    Ok(())
}

fn kl_hellinger_sandwich() -> Result<(), String> {
    let mut rng = CounterRng::new(0xfac7, 0);
    for i in 0..200 {
        let p = 0.02 + 0.96 * rng.next_f64();
        let q = 0.02 + 0.96 * rng.next_f64();
        let b = fact1_bounds(&Pmf::bernoulli(p).unwrap(), &Pmf::bernoulli(q).unwrap())
            .map_err(|e| e.to_string())?;
        if !(b.lower_ok && b.upper_ok && b.small_r_ok) {
            return fail(format!("sandwich violated at pair {i}: p={p}, q={q}, R={}", b.r));
        }
    }
    Ok(())
}

fn decoupling() -> Result<(), String> {
    for ai in 1..10 {
        let alpha = ai as f64 / 10.0;
        for copies in 1..=6 {
            let c = decoupling_check(
                &Pmf::bernoulli(0.7).unwrap(),
                &Pmf::bernoulli(0.2).unwrap(),
                alpha,
                copies,
            )
            .map_err(|e| e.to_string())?;
            if (c.lhs - c.rhs).abs() > 1e-10 {
                return fail(format!("decoupling gap {} at alpha={alpha}, n={copies}", (c.lhs - c.rhs).abs()));
            }
        }
    }
    Ok(())
}

fn renyi_identity() -> Result<(), String> {
    let cases = [(0.7, 0.2, 0.3), (0.9, 0.55, 0.5), (0.05, 0.6, 0.85)];
    for (p, q, a) in cases {
        let pp = Pmf::bernoulli(p).unwrap();
        let qq = Pmf::bernoulli(q).unwrap();
        let direct: f64 = {
            let integral: f64 = pp
                .probs()
                .iter()
                .zip(qq.probs())
                .map(|(&x, &y)| x.powf(a) * y.powf(1.0 - a))
                .sum();
            -integral.ln() / (1.0 - a)
        };
        let via = renyi(&pp, &qq, a).map_err(|e| e.to_string())?;
        if (via - direct).abs() > 1e-12 {
            return fail(format!("identity gap {} at ({p},{q},{a})", (via - direct).abs()));
        }
    }
    Ok(())
}

fn mincut_oracle() -> Result<(), String> {
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 30 {
        seed += 1;
        let n = 4 + (seed % 7) as usize;
        let g = gen_erdos_renyi(n, 0.55, seed).unwrap();
        if !g.is_connected() {
            continue;
        }
        let mut brute = usize::MAX;
        for mask in 1u64..((1u64 << n) - 1) {
            let cut = g
                .edges()
                .iter()
                .filter(|&&(u, v)| (mask >> u & 1) != (mask >> v & 1))
                .count();
            brute = brute.min(cut);
        }
        let fast = min_cut(&g).map_err(|e| e.to_string())?;
        if fast != brute {
            return fail(format!("min cut {fast} vs brute {brute} at seed {seed}"));
        }
        checked += 1;
    }
    Ok(())
}

fn census_monotone() -> Result<(), String> {
    for seed in 1..=5u64 {
        let g = gen_erdos_renyi(9, 0.5, seed).unwrap();
        if !g.is_connected() {
            continue;
        }
        let prof = cut_profile(&g, 24).map_err(|e| e.to_string())?;
        for w in prof.census.windows(2) {
            if w[0] > w[1] {
                return fail(format!("census not monotone at seed {seed}"));
            }
        }
        if *prof.census.last().unwrap() != 1 << 8 {
            return fail(format!("census total wrong at seed {seed}"));
        }
    }
    Ok(())
}

fn expander_bound_dominates() -> Result<(), String> {
    let graphs: Vec<(&str, pairdiff_core::Graph)> = vec![
        ("K8", gen_complete(8).unwrap()),
        ("ring(10,2)", gen_ring(10, 2, true).unwrap()),
        ("er(10,0.6)", gen_erdos_renyi(10, 0.6, 3).unwrap()),
    ];
    for (name, g) in graphs {
        if !g.is_connected() {
            continue;
        }
        let tau = cut_profile(&g, 24).map_err(|e| e.to_string())?.tau_cut;
        let bound = tau_bound_expander(&g).map_err(|e| e.to_string())?;
        if tau > bound + 1e-12 {
            return fail(format!("{name}: tau {tau} exceeds bound {bound}"));
        }
    }
    Ok(())
}

fn hypothesis_class_bound() -> Result<(), String> {
    // ln|A_k|/k must stay below 2 ln M + 2 ln(2 k mincut) + 4 tau_cut.
    for (n, m) in [(6usize, 2usize), (7, 2), (6, 3)] {
        let g = gen_ring(n, 2, true).unwrap();
        let prof = cut_profile(&g, 24).map_err(|e| e.to_string())?;
        let mc = prof.mincut;
        for k in 2..=(g.edges().len() / mc + 1) {
            let count = count_hypothesis_classes(&g, m, k).map_err(|e| e.to_string())?;
            if count == 0 {
                continue;
            }
            let lhs = (count as f64).ln() / k as f64;
            let rhs = 2.0 * (m as f64).ln()
                + 2.0 * (2.0 * (k * mc) as f64).ln()
                + 4.0 * prof.tau_cut;
            if lhs >= rhs {
                return fail(format!("class bound fails at n={n}, M={m}, k={k}: {lhs} >= {rhs}"));
            }
        }
    }
    Ok(())
}

fn exhaustive_decode_oracle() -> Result<(), String> {
    for seed in 0..6u64 {
        let g = gen_erdos_renyi(6, 0.7, 40 + seed).unwrap();
        if !g.is_connected() {
            continue;
        }
        let ch = EdgeChannelMap::uniform(outlier_channel(2, 0.7).unwrap());
        let mut rng = CounterRng::new(50 + seed, 0);
        let truth: Vec<usize> = (0..6).map(|_| rng.below(2) as usize).collect();
        let y = sample_observations(&g, &ch, &truth, 60 + seed).unwrap();
        let res = ml_decode_exhaustive(6, &y, &ch).map_err(|e| e.to_string())?;
        for bits in 0u32..(1 << 5) {
            let mut x = vec![0usize; 6];
            for (i, v) in x.iter_mut().enumerate().skip(1) {
                *v = (bits >> (i - 1) & 1) as usize;
            }
            if log_likelihood(&y, &x, &ch) > res.log_likelihood + 1e-12 {
                return fail(format!("rescan beat the decoder at seed {seed}"));
            }
        }
    }
    Ok(())
}

fn decoder_offset_invariance() -> Result<(), String> {
    let g = gen_ring(8, 2, true).unwrap();
    let ch = EdgeChannelMap::uniform(outlier_channel(3, 0.6).unwrap());
    let truth = vec![0, 1, 2, 0, 1, 2, 0, 1];
    let y = sample_observations(&g, &ch, &truth, 77).unwrap();
    let x = vec![0usize, 2, 1, 1, 0, 2, 2, 1];
    let base = log_likelihood(&y, &x, &ch);
    for l in 1..3 {
        let shifted: Vec<usize> = x.iter().map(|&v| (v + l) % 3).collect();
        if (log_likelihood(&y, &shifted, &ch) - base).abs() > 1e-9 {
            return fail(format!("shift {l} changed the likelihood"));
        }
        if dist(&shifted, &x, 3).unwrap() != 0 {
            return fail("offset class broken".into());
        }
    }
    Ok(())
}

fn noiseless_zero_error() -> Result<(), String> {
    let cfg = ExperimentConfig {
        graph: GraphSpec::Ring { n: 10, w: 2, circular: true },
        channel: ChannelSpec::Outlier { m: 2, p_true: 1.0 },
        truth_mode: TruthMode::UniformRandom,
        decoder: DecoderSpec::Exhaustive,
        trials: 40,
        master_seed: 5,
        tie_policy: TiePolicy::TieBroken,
    };
    let est = estimate_error_prob(&cfg).map_err(|e| e.to_string())?;
    if est.p_e_hat != 0.0 {
        return fail(format!("noiseless run errored with p_e = {}", est.p_e_hat));
    }
    Ok(())
}

fn union_bound_domination() -> Result<(), String> {
    // Empirical P_e against the enumerated pairwise-bound aggregation on a
    // small instance where the union bound is informative.
    let n = 8usize;
    let p_true = 0.8;
    let g = gen_complete(n).unwrap();
    let ch_fam = outlier_channel(2, p_true).unwrap();
    let prof = divergence_profile(&ch_fam, &[0.5], &[0.0]).map_err(|e| e.to_string())?;
    let d_half = prof.renyi_min.iter().find(|(a, _)| (*a - 0.5).abs() < 1e-9).unwrap().1;
    let mut union = 0.0;
    for bits in 1u32..(1 << (n - 1)) {
        let mut w = vec![0usize; n];
        for (i, v) in w.iter_mut().enumerate().skip(1) {
            *v = (bits >> (i - 1) & 1) as usize;
        }
        let disagree = g.edges().iter().filter(|&&(u, v)| w[u] != w[v]).count() as u64;
        union += chernoff_pairwise_bound(disagree, d_half, 0.5).map_err(|e| e.to_string())?;
    }
    let cfg = ExperimentConfig {
        graph: GraphSpec::Complete { n },
        channel: ChannelSpec::Outlier { m: 2, p_true },
        truth_mode: TruthMode::Zero,
        decoder: DecoderSpec::Exhaustive,
        trials: 2000,
        master_seed: 11,
        tie_policy: TiePolicy::TieBroken,
    };
    let est = estimate_error_prob(&cfg).map_err(|e| e.to_string())?;
    let sigma = (est.p_e_hat * (1.0 - est.p_e_hat) / cfg.trials as f64).sqrt();
    if union < 1.0 && est.p_e_hat > union + 4.0 * sigma.max(1.0 / cfg.trials as f64) {
        return fail(format!("empirical {} exceeds union bound {union}", est.p_e_hat));
    }
    Ok(())
}

pub fn checks() -> Vec<Check> {
    vec![
        Check { name: "divergence.outlier-closed-forms", run: outlier_closed_forms },
        Check { name: "divergence.kl-hellinger-sandwich", run: kl_hellinger_sandwich },
        Check { name: "divergence.decoupling", run: decoupling },
        Check { name: "divergence.renyi-identity", run: renyi_identity },
        Check { name: "graph.mincut-oracle", run: mincut_oracle },
        Check { name: "graph.census-monotone", run: census_monotone },
        Check { name: "graph.expander-bound", run: expander_bound_dominates },
        Check { name: "graph.hypothesis-class-bound", run: hypothesis_class_bound },
        Check { name: "decoder.exhaustive-oracle", run: exhaustive_decode_oracle },
        Check { name: "decoder.offset-invariance", run: decoder_offset_invariance },
        Check { name: "montecarlo.noiseless-zero-error", run: noiseless_zero_error },
        Check { name: "montecarlo.union-bound-domination", run: union_bound_domination },
    ]
}

/// Runs the suite, printing one line per check. Returns true iff all pass.
pub fn run(only: Option<&str>) -> bool {
    let mut all_ok = true;
    let mut ran = 0;
    for check in checks() {
        if let Some(filter) = only {
            if !check.name.starts_with(filter) {
                continue;
            }
        }
        ran += 1;
        match (check.run)() {
            Ok(()) => println!("PASS {}", check.name),
            Err(msg) => {
                println!("FAIL {} ({msg})", check.name);
                all_ok = false;
            }
        }
    }
    if ran == 0 {
        println!("no checks match filter");
        return false;
    }
    all_ok
}
