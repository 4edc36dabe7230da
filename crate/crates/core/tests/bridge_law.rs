//! Bridge law exactness: over every target with at most 4 leaves and depth
//! at most 3, the empirical distribution of full bridge trajectories matches
//! the exact conditional path law within 4 sigma per path.

use std::collections::BTreeMap;

use rayon::prelude::*;

use radixlab_core::oracle::{enumerate_shapes, exact_path_laws};
use radixlab_core::rng::replica_rng;
use radixlab_core::simulate::sample_bridge_with;
use radixlab_core::RadixTree;

fn path_key(trees: &[RadixTree]) -> String {
    trees
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join("|")
}

#[test]
fn bridge_trajectories_follow_the_exact_conditional_law() {
    let replicas: u64 = 100_000;
    let mut targets = Vec::new();
    for n in 1..=4usize {
        targets.extend(enumerate_shapes(n, 3).unwrap());
    }

    for (ti, target) in targets.iter().enumerate() {
        let exact: BTreeMap<String, f64> = exact_path_laws(target)
            .unwrap()
            .into_iter()
            .map(|p| (path_key(&p.path), p.conditional.to_f64()))
            .collect();

        let counts: BTreeMap<String, u64> = (0..replicas)
            .into_par_iter()
            .fold(BTreeMap::new, |mut acc: BTreeMap<String, u64>, r| {
                let path =
                    sample_bridge_with(target, &mut replica_rng(9000 + ti as u64, r)).unwrap();
                *acc.entry(path_key(path.trees())).or_default() += 1;
                acc
            })
            .reduce(BTreeMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_default() += v;
                }
                a
            });

        // nothing outside the exact support
        for key in counts.keys() {
            assert!(exact.contains_key(key), "target {target}: stray path {key}");
        }
        for (key, p) in &exact {
            let freq = counts.get(key).copied().unwrap_or(0) as f64 / replicas as f64;
            let sigma = (p * (1.0 - p) / replicas as f64).sqrt();
            assert!(
                (freq - p).abs() <= 4.0 * sigma.max(1e-9),
                "target {target}, path {key}: freq {freq} vs exact {p} (4 sigma = {})",
                4.0 * sigma
            );
        }
    }
}
