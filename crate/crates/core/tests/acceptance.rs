//! End-to-end acceptance gate. Each test covers one release criterion and
//! prints a single PASS line on success (run with --nocapture to see them).

use pairdiff_core::channel::{outlier_channel, sample_observations, EdgeChannelMap};
use pairdiff_core::decoder::{chernoff_pairwise_bound, log_likelihood};
use pairdiff_core::divergence::{decoupling_check, divergence_profile, fact1_bounds, Pmf};
use pairdiff_core::graph::{
    count_hypothesis_classes, cut_profile, gen_complete, gen_erdos_renyi, gen_ring,
    gen_two_cliques_bridge, min_cut, tau_bound_expander,
};
use pairdiff_core::montecarlo::{
    estimate_error_prob, locate_transition, sweep, ChannelSpec, DecoderSpec, ExperimentConfig,
    GraphSpec, TiePolicy, TruthMode,
};
use pairdiff_core::rng::CounterRng;

fn pass(name: &str) {
    println!("PASS: {name}");
}

#[test]
fn criterion_01_outlier_closed_forms() {
    for m in [2usize, 3, 5, 17] {
        let mf = m as f64;
        for i in 0..10 {
            let p = i as f64 / 10.0;
            let ch = outlier_channel(m, p).unwrap();
            let prof = divergence_profile(&ch, &[], &[0.0]).unwrap();
            let kl_expect = if p == 0.0 { 0.0 } else { p * (1.0 + p * mf / (1.0 - p)).ln() };
            let hel_expect = 2.0 / mf * ((1.0 - p + mf * p).sqrt() - (1.0 - p).sqrt()).powi(2);
            assert!(
                (prof.kl_min - kl_expect).abs() <= 1e-12,
                "FAIL: kl_min at (M={m}, p={p}): {} vs {kl_expect}",
                prof.kl_min
            );
            assert!(
                (prof.hel_half_min() - hel_expect).abs() <= 1e-12,
                "FAIL: hel_half_min at (M={m}, p={p}): {} vs {hel_expect}",
                prof.hel_half_min()
            );
        }
    }
    pass("outlier channel closed forms match to 1e-12");
}

#[test]
fn criterion_02_kl_hellinger_sandwich() {
    let mut rng = CounterRng::new(0xacce97, 2);
    let mut accepted = 0;
    while accepted < 1000 {
        let p = 0.05 + 0.9 * rng.next_f64();
        let q = 0.05 + 0.9 * rng.next_f64();
        let r = (p / q).max(q / p).max(((1.0 - p) / (1.0 - q)).max((1.0 - q) / (1.0 - p)));
        if r > 4.5 {
            continue;
        }
        accepted += 1;
        let b = fact1_bounds(&Pmf::bernoulli(p).unwrap(), &Pmf::bernoulli(q).unwrap()).unwrap();
        assert!(b.lower_ok && b.upper_ok, "FAIL: sandwich at ({p}, {q}), R = {}", b.r);
        assert!(b.small_r_ok, "FAIL: small-R variant at ({p}, {q}), R = {}", b.r);
    }
    pass("KL/Hellinger sandwich holds on 1000 pairs with R <= 4.5");
}

#[test]
fn criterion_03_decoupling_identity() {
    let mut rng = CounterRng::new(0xacce97, 3);
    for _ in 0..40 {
        let p = 0.02 + 0.96 * rng.next_f64();
        let q = 0.02 + 0.96 * rng.next_f64();
        for ai in 1..10 {
            let alpha = ai as f64 / 10.0;
            for copies in 1..=6 {
                let c = decoupling_check(
                    &Pmf::bernoulli(p).unwrap(),
                    &Pmf::bernoulli(q).unwrap(),
                    alpha,
                    copies,
                )
                .unwrap();
                assert!(
                    (c.lhs - c.rhs).abs() <= 1e-10,
                    "FAIL: decoupling gap {} at (p={p}, q={q}, alpha={alpha}, copies={copies})",
                    (c.lhs - c.rhs).abs()
                );
            }
        }
    }
    pass("product-measure decoupling identity within 1e-10");
}

#[test]
fn criterion_04_cut_oracles() {
    // Exact min cut on 200 random connected graphs, plus the expansion-based
    // ceiling on tau_cut for each.
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 200 {
        seed += 1;
        let n = 4 + (seed % 9) as usize; // 4..=12
        let g = gen_erdos_renyi(n, 0.5, seed).unwrap();
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
        assert_eq!(min_cut(&g).unwrap(), brute, "FAIL: min cut mismatch at seed {seed}");
        let prof = cut_profile(&g, 24).unwrap();
        let bound = tau_bound_expander(&g).unwrap();
        assert!(
            prof.tau_cut <= bound + 1e-12,
            "FAIL: tau_cut {} above expansion bound {bound} at seed {seed}",
            prof.tau_cut
        );
        checked += 1;
    }
    // Hypothesis-class growth stays under the cut-census bound for every
    // enumerable (n <= 8, M <= 3, k).
    let graphs = [
        gen_ring(6, 2, true).unwrap(),
        gen_ring(8, 2, true).unwrap(),
        gen_complete(6).unwrap(),
        gen_complete(8).unwrap(),
        gen_erdos_renyi(7, 0.6, 5).unwrap(),
        gen_erdos_renyi(8, 0.5, 17).unwrap(),
    ];
    for g in &graphs {
        if !g.is_connected() {
            continue;
        }
        let prof = cut_profile(g, 24).unwrap();
        let mc = prof.mincut;
        for m in [2usize, 3] {
            let k_max = g.edges().len() / mc + 1;
            for k in 1..=k_max {
                let count = count_hypothesis_classes(g, m, k).unwrap();
                if count == 0 {
                    continue;
                }
                let lhs = (count as f64).ln() / k as f64;
                let rhs = 2.0 * (m as f64).ln()
                    + 2.0 * (2.0 * (k * mc) as f64).ln()
                    + 4.0 * prof.tau_cut;
                assert!(
                    lhs < rhs,
                    "FAIL: class-count bound at n={}, M={m}, k={k}: {lhs} >= {rhs}",
                    g.n()
                );
            }
        }
    }
    pass("cut oracles: exact min cut, tau ceiling, class-count bound");
}

#[test]
fn criterion_05_homogeneity_contrast() {
    for n in [8usize, 10, 12] {
        let bridge = cut_profile(&gen_two_cliques_bridge(n).unwrap(), 24).unwrap();
        let complete = cut_profile(&gen_complete(n).unwrap(), 24).unwrap();
        assert!(
            bridge.tau_cut < complete.tau_cut,
            "FAIL: tau contrast at n={n}: bridge {} vs complete {}",
            bridge.tau_cut,
            complete.tau_cut
        );
    }
    pass("bottlenecked graphs show strictly smaller tau_cut than complete graphs");
}

#[test]
fn criterion_06_chernoff_and_union_bound() {
    let n = 10usize;
    let p_true = 0.75;
    let trials = 10_000usize;
    let g = gen_complete(n).unwrap();
    let fam = outlier_channel(2, p_true).unwrap();
    let prof = divergence_profile(&fam, &[], &[0.0]).unwrap();
    let d_half = prof
        .renyi_min
        .iter()
        .find(|(a, _)| (*a - 0.5).abs() < 1e-9)
        .unwrap()
        .1;
    let ch = EdgeChannelMap::uniform(fam);
    let truth = vec![0usize; n];

    // Pairwise: empirical P{log LR >= 0} for a fixed wrong hypothesis
    // against the Chernoff bound at order 1/2.
    let wrong: Vec<usize> = (0..n).map(|i| usize::from(i < 3)).collect();
    let disagree = g.edges().iter().filter(|&&(u, v)| wrong[u] != wrong[v]).count() as u64;
    let bound = chernoff_pairwise_bound(disagree, d_half, 0.5).unwrap();
    let mut exceed = 0usize;
    for t in 0..trials {
        let y = sample_observations(&g, &ch, &truth, t as u64).unwrap();
        if log_likelihood(&y, &wrong, &ch) >= log_likelihood(&y, &truth, &ch) {
            exceed += 1;
        }
    }
    let p_hat = exceed as f64 / trials as f64;
    let sigma = (p_hat * (1.0 - p_hat) / trials as f64).sqrt().max(1.0 / trials as f64);
    assert!(
        p_hat <= bound + 4.0 * sigma,
        "FAIL: pairwise error {p_hat} above Chernoff bound {bound} + 4 sigma"
    );

    // Full error probability against the enumerated union of pairwise bounds.
    let mut union = 0.0;
    for bits in 1u32..(1 << (n - 1)) {
        let mut w = vec![0usize; n];
        for (i, v) in w.iter_mut().enumerate().skip(1) {
            *v = (bits >> (i - 1) & 1) as usize;
        }
        let k = g.edges().iter().filter(|&&(u, v)| w[u] != w[v]).count() as u64;
        union += chernoff_pairwise_bound(k, d_half, 0.5).unwrap();
    }
    assert!(union < 1.0, "FAIL: union bound {union} not informative at p_true={p_true}");
    let cfg = ExperimentConfig {
        graph: GraphSpec::Complete { n },
        channel: ChannelSpec::Outlier { m: 2, p_true },
        truth_mode: TruthMode::Zero,
        decoder: DecoderSpec::Exhaustive,
        trials,
        master_seed: 6,
        tie_policy: TiePolicy::TieBroken,
    };
    let est = estimate_error_prob(&cfg).unwrap();
    let sigma = (est.p_e_hat * (1.0 - est.p_e_hat) / trials as f64)
        .sqrt()
        .max(1.0 / trials as f64);
    assert!(
        est.p_e_hat <= union + 4.0 * sigma,
        "FAIL: empirical P_e {} above union bound {union} + 4 sigma",
        est.p_e_hat
    );
    pass("Chernoff pairwise and union bounds dominate the empirical errors");
}

#[test]
fn criterion_07_sbm_direction_check() {
    let base = ExperimentConfig {
        graph: GraphSpec::Complete { n: 14 },
        channel: ChannelSpec::Sbm { a: 16.0, b: 1.0 },
        truth_mode: TruthMode::UniformRandom,
        decoder: DecoderSpec::Exhaustive,
        trials: 400,
        master_seed: 7,
        tie_policy: TiePolicy::TieBroken,
    };
    let easy = estimate_error_prob(&base).unwrap();
    assert!(
        easy.p_e_hat <= 0.05,
        "FAIL: (a,b) = (16,1) should recover, got P_e = {}",
        easy.p_e_hat
    );
    let mut hard_cfg = base;
    hard_cfg.channel = ChannelSpec::Sbm { a: 1.1, b: 1.0 };
    let hard = estimate_error_prob(&hard_cfg).unwrap();
    assert!(
        hard.p_e_hat >= 0.5,
        "FAIL: (a,b) = (1.1,1) should fail often, got P_e = {}",
        hard.p_e_hat
    );
    pass("block-model separation: (16,1) recovers, (1.1,1) does not");
}

#[test]
fn criterion_08_outlier_transition_corridor() {
    let n = 16usize;
    let base = ExperimentConfig {
        graph: GraphSpec::Complete { n },
        channel: ChannelSpec::Outlier { m: 2, p_true: 0.5 },
        truth_mode: TruthMode::UniformRandom,
        decoder: DecoderSpec::Exhaustive,
        trials: 80,
        master_seed: 8,
        tie_policy: TiePolicy::TieBroken,
    };
    let values: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let result = sweep(&base, "channel.p_true", &values, base.trials).unwrap();
    let crossing = locate_transition(&result, 0.5).unwrap();
    let target = (2.0 * (n as f64).ln() / n as f64).sqrt();
    assert!(
        crossing >= target / 3.0 && crossing <= target * 3.0,
        "FAIL: 50% crossing {crossing} outside [{}, {}]",
        target / 3.0,
        target * 3.0
    );
    pass("outlier 50% crossing lies inside the predicted corridor");
}

#[test]
fn criterion_09_haplotype_read_scaling() {
    // Halving the squared parity gap should roughly double the reads needed
    // for the 50% crossing (inverse-square order check with slack).
    let n = 16usize;
    let crossing_for = |theta: f64, seed: u64| -> f64 {
        let base = ExperimentConfig {
            graph: GraphSpec::Ring { n, w: 2, circular: true },
            channel: ChannelSpec::Haplotype { theta, reads: 4 },
            truth_mode: TruthMode::UniformRandom,
            decoder: DecoderSpec::Exhaustive,
            trials: 100,
            master_seed: seed,
            tie_policy: TiePolicy::TieBroken,
        };
        let values: Vec<f64> = (1..=24).map(|l| l as f64).collect();
        let result = sweep(&base, "channel.reads", &values, base.trials).unwrap();
        locate_transition(&result, 0.5).unwrap()
    };
    let gap = 0.36f64; // (1 - 2 theta)^2 at theta = 0.2
    let theta_easy = 0.2;
    let theta_hard = 0.5 * (1.0 - (gap / 2.0).sqrt());
    let l_easy = crossing_for(theta_easy, 9);
    let l_hard = crossing_for(theta_hard, 10);
    let ratio = l_hard / l_easy;
    assert!(
        (1.5..=3.0).contains(&ratio),
        "FAIL: read-count ratio {ratio} outside [1.5, 3] (crossings {l_easy} and {l_hard})"
    );
    pass("halving the parity gap scales the required reads by ~2x");
}

#[test]
fn criterion_10_sweep_determinism_across_workers() {
    let base = ExperimentConfig {
        graph: GraphSpec::ErdosRenyi { n: 10, p: 0.8 },
        channel: ChannelSpec::Outlier { m: 2, p_true: 0.6 },
        truth_mode: TruthMode::UniformRandom,
        decoder: DecoderSpec::Exhaustive,
        trials: 50,
        master_seed: 10,
        tie_policy: TiePolicy::TieBroken,
    };
    let values = [0.4, 0.6, 0.8];
    let run = |threads: usize| -> String {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sweep(&base, "channel.p_true", &values, base.trials).unwrap().to_csv())
    };
    let one = run(1);
    let four = run(4);
    let seven = run(7);
    assert_eq!(one, four, "FAIL: CSV differs between 1 and 4 workers");
    assert_eq!(one, seven, "FAIL: CSV differs between 1 and 7 workers");
    pass("sweep CSV is byte-identical across worker counts");
}
