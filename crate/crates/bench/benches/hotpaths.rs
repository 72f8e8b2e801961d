use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use pairdiff_core::channel::{haplotype_channel, outlier_channel, sample_observations, EdgeChannelMap};
use pairdiff_core::decoder::{ml_decode_exhaustive, ml_decode_local_search};
use pairdiff_core::divergence::divergence_profile;
use pairdiff_core::graph::{cut_profile, gen_complete, gen_erdos_renyi, min_cut};

fn bench_divergence_profile(c: &mut Criterion) {
    let outlier = outlier_channel(17, 0.6).unwrap();
    c.bench_function("divergence_profile/outlier_m17", |b| {
        b.iter(|| divergence_profile(&outlier, &[], &[0.0]).unwrap())
    });
    let hap = haplotype_channel(0.2, 24).unwrap();
    c.bench_function("divergence_profile/haplotype_l24", |b| {
        b.iter(|| divergence_profile(&hap, &[], &[0.0]).unwrap())
    });
}

fn bench_min_cut(c: &mut Criterion) {
    let g = gen_erdos_renyi(120, 0.1, 1).unwrap();
    assert!(g.is_connected());
    c.bench_function("min_cut/er_n120", |b| b.iter(|| min_cut(&g).unwrap()));
    let k = gen_complete(18).unwrap();
    c.bench_function("cut_profile/complete_n18", |b| b.iter(|| cut_profile(&k, 24).unwrap()));
}

fn bench_decoders(c: &mut Criterion) {
    let n = 14;
    let g = gen_complete(n).unwrap();
    let ch = EdgeChannelMap::uniform(outlier_channel(2, 0.6).unwrap());
    let truth = vec![0usize; n];
    let y = sample_observations(&g, &ch, &truth, 3).unwrap();
    c.bench_function("ml_decode_exhaustive/complete_n14_m2", |b| {
        b.iter(|| ml_decode_exhaustive(n, &y, &ch).unwrap())
    });
    c.bench_function("ml_decode_local_search/complete_n14_m2", |b| {
        b.iter_batched(
            || y.clone(),
            |y| ml_decode_local_search(n, &y, &ch, 8, 7).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_divergence_profile, bench_min_cut, bench_decoders);
criterion_main!(benches);
