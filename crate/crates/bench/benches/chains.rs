use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use radixlab_core::laws::{dm_kernel, forward_prob, green_kernel, marginal_law};
use radixlab_core::oracle::enumerate_shapes;
use radixlab_core::rng::replica_rng;
use radixlab_core::simulate::{sample_bridge_with, sample_terminal_trie};
use radixlab_core::{Prob, RadixTree, SourceMeasure};

fn bench_trie_growth(c: &mut Criterion) {
    let gamma = SourceMeasure::fair_coin();
    let biased = SourceMeasure::bernoulli(Prob::from_ratio(3, 10)).unwrap();
    let mut group = c.benchmark_group("trie_growth_n1000");
    group.sample_size(20);
    group.bench_function("fair_coin", |b| {
        let mut replica = 0u64;
        b.iter(|| {
            replica += 1;
            sample_terminal_trie(&gamma, 1000, &mut replica_rng(1, replica)).unwrap()
        })
    });
    group.bench_function("bernoulli_3_10", |b| {
        let mut replica = 0u64;
        b.iter(|| {
            replica += 1;
            sample_terminal_trie(&biased, 1000, &mut replica_rng(1, replica)).unwrap()
        })
    });
    group.finish();
}

fn bench_kernel_on_large_tree(c: &mut Criterion) {
    let gamma = SourceMeasure::fair_coin();
    let s: RadixTree = "0,1".parse().unwrap();
    let t = sample_terminal_trie(&gamma, 2000, &mut replica_rng(2, 0)).unwrap();
    c.bench_function("dm_kernel_pair_vs_2000_leaves", |b| {
        b.iter(|| dm_kernel(&s, &t))
    });
}

fn bench_exact_laws(c: &mut Criterion) {
    let gamma = SourceMeasure::fair_coin();
    let shapes = enumerate_shapes(4, 4).unwrap();
    c.bench_function("marginals_over_s4_depth4", |b| {
        b.iter(|| {
            shapes
                .iter()
                .map(|t| marginal_law(&gamma, t))
                .fold(Prob::zero(), |acc, p| {
                    Prob::expect(acc.into_rat() + p.rat())
                })
        })
    });
    let s: RadixTree = "00,01,1".parse().unwrap();
    c.bench_function("forward_row_split_cap_6", |b| {
        b.iter(|| {
            let succ = s.forward_successors(s.max_leaf_depth() + 6).unwrap();
            succ.iter()
                .map(|(t, _)| forward_prob(&gamma, &s, t).into_rat())
                .sum::<radixlab_core::Rat>()
        })
    });
    let root = RadixTree::trivial();
    let target: RadixTree = "000,001,01,1".parse().unwrap();
    c.bench_function("green_kernel_root_to_4_leaves", |b| {
        b.iter(|| green_kernel(&root, &target, 4).unwrap())
    });
}

fn bench_bridge(c: &mut Criterion) {
    let gamma = SourceMeasure::fair_coin();
    let target = sample_terminal_trie(&gamma, 64, &mut replica_rng(3, 0)).unwrap();
    c.bench_function("bridge_to_64_leaves", |b| {
        let mut replica = 0u64;
        b.iter_batched(
            || {
                replica += 1;
                replica_rng(4, replica)
            },
            |mut rng| sample_bridge_with(&target, &mut rng).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(
    benches,
    bench_trie_growth,
    bench_kernel_on_large_tree,
    bench_exact_laws,
    bench_bridge
);
criterion_main!(benches);
