//! Randomized property checks for the divergence identities, graph metrics,
//! and decoder invariants.

use proptest::prelude::*;

use pairdiff_core::decoder::dist;
use pairdiff_core::divergence::{
    chi_square, decoupling_check, fact1_bounds, hellinger_alpha, kl, renyi, Pmf,
};
use pairdiff_core::graph::{cut_profile, gen_erdos_renyi, min_cut};

fn inner_prob() -> impl Strategy<Value = f64> {
    // Bounded away from {0, 1} so supports coincide and R stays finite.
    (0.01f64..0.99).prop_map(|p| p)
}

fn order() -> impl Strategy<Value = f64> {
    0.05f64..0.95
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sandwich_hel_renyi_kl(p in inner_prob(), q in inner_prob(), a in order()) {
        let pp = Pmf::bernoulli(p).unwrap();
        let qq = Pmf::bernoulli(q).unwrap();
        let hel = hellinger_alpha(&pp, &qq, a).unwrap();
        let d = renyi(&pp, &qq, a).unwrap();
        let k = kl(&pp, &qq).unwrap();
        prop_assert!(hel <= d + 1e-12, "Hel {hel} > Renyi {d}");
        prop_assert!(d <= k + 1e-12, "Renyi {d} > KL {k}");
    }

    #[test]
    fn divergences_vanish_iff_equal(p in inner_prob(), q in inner_prob(), a in order()) {
        let pp = Pmf::bernoulli(p).unwrap();
        let qq = Pmf::bernoulli(q).unwrap();
        let same = Pmf::bernoulli(p).unwrap();
        prop_assert!(kl(&pp, &same).unwrap().abs() < 1e-14);
        prop_assert!(hellinger_alpha(&pp, &same, a).unwrap().abs() < 1e-14);
        prop_assert!(chi_square(&pp, &same).unwrap().abs() < 1e-14);
        if (p - q).abs() > 1e-6 {
            prop_assert!(kl(&pp, &qq).unwrap() > 0.0);
            prop_assert!(hellinger_alpha(&pp, &qq, a).unwrap() > 0.0);
            prop_assert!(chi_square(&pp, &qq).unwrap() > 0.0);
            prop_assert!(renyi(&pp, &qq, a).unwrap() > 0.0);
        }
    }

    #[test]
    fn kl_hellinger_sandwich_randomized(p in inner_prob(), q in inner_prob()) {
        let b = fact1_bounds(&Pmf::bernoulli(p).unwrap(), &Pmf::bernoulli(q).unwrap()).unwrap();
        prop_assert!(b.lower_ok && b.upper_ok, "bounds violated at ({p}, {q}), R = {}", b.r);
        prop_assert!(b.small_r_ok, "small-R variant violated at ({p}, {q}), R = {}", b.r);
    }

    #[test]
    fn chi_square_bernoulli_identity(p in inner_prob(), q in inner_prob()) {
        let got = chi_square(&Pmf::bernoulli(p).unwrap(), &Pmf::bernoulli(q).unwrap()).unwrap();
        let expect = (p - q) * (p - q) / (q * (1.0 - q));
        prop_assert!((got - expect).abs() < 1e-12 * (1.0 + expect));
    }

    #[test]
    fn product_measure_decouples(p in inner_prob(), q in inner_prob(), a in order(), n in 1usize..6) {
        let c = decoupling_check(
            &Pmf::bernoulli(p).unwrap(),
            &Pmf::bernoulli(q).unwrap(),
            a,
            n,
        )
        .unwrap();
        prop_assert!((c.lhs - c.rhs).abs() <= 1e-10, "lhs {} rhs {}", c.lhs, c.rhs);
    }

    #[test]
    fn dist_invariant_under_offsets(
        values in proptest::collection::vec(0usize..4, 2..8),
        shift in 0usize..4,
    ) {
        let m = 4;
        let shifted: Vec<usize> = values.iter().map(|&v| (v + shift) % m).collect();
        prop_assert_eq!(dist(&values, &shifted, m).unwrap(), 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn census_monotone_and_mincut_exact(seed in 0u64..10_000, n in 4usize..10) {
        let g = gen_erdos_renyi(n, 0.55, seed).unwrap();
        prop_assume!(g.is_connected());
        // Min cut equals the exhaustive-subset minimum.
        let mut brute = usize::MAX;
        for mask in 1u64..((1u64 << n) - 1) {
            let cut = g
                .edges()
                .iter()
                .filter(|&&(u, v)| (mask >> u & 1) != (mask >> v & 1))
                .count();
            brute = brute.min(cut);
        }
        prop_assert_eq!(min_cut(&g).unwrap(), brute);
        let prof = cut_profile(&g, 24).unwrap();
        prop_assert_eq!(prof.mincut, brute);
        for w in prof.census.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        prop_assert_eq!(*prof.census.last().unwrap(), 1u64 << (n - 1));
    }
}
