//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (run with `--nocapture` to see them).

use std::time::Instant;

use num_traits::One;

use radixlab_core::laws::{
    green_kernel, h_nu, killed_path_law, marginal_law, riesz_eta,
    theta_total_mass,
};
use radixlab_core::measure::{two_atom_measure, Atom};
use radixlab_core::oracle::{definitional_recheck, enumerate_shapes, exact_path_laws, Scope};
use radixlab_core::prob::{pow2, Rat};
use radixlab_core::simulate::{
    estimate_cylinders, kernel_convergence, killed_path_frequencies, sample_bridge_with,
    sample_labeled_chain,
};
use radixlab_core::rng::replica_rng;
use radixlab_core::{build_radix_tree, EventuallyPeriodic, Prob, RadixTree, SourceMeasure, Word};

fn tree(s: &str) -> RadixTree {
    s.parse().unwrap()
}

fn gamma() -> SourceMeasure {
    SourceMeasure::fair_coin()
}

fn bernoulli(num: i64, den: i64) -> SourceMeasure {
    SourceMeasure::bernoulli(Prob::expect(Rat::new(num.into(), den.into()))).unwrap()
}

/// The four two-atom measures from the worked counterexample: atoms at
/// 000..., 011..., 111..., 100... with masses 1/3 and 2/3 either way round.
fn counterexample_measures() -> Vec<SourceMeasure> {
    vec![
        two_atom_measure("(0)", Prob::from_ratio(1, 3), "(1)"),
        two_atom_measure("0(1)", Prob::from_ratio(1, 3), "1(0)"),
        two_atom_measure("(0)", Prob::from_ratio(2, 3), "(1)"),
        two_atom_measure("0(1)", Prob::from_ratio(2, 3), "1(0)"),
    ]
}

#[test]
fn acceptance_01_counterexample_reproduction() {
    let start = Instant::now();
    let root = RadixTree::trivial();
    let pair = tree("0,1");
    let replicas = 10_000u64;

    for (j, nu) in counterexample_measures().iter().enumerate() {
        // exact killed-path laws: die at the second draw, or pass through
        // the two-leaf tree and die at the third
        let short = killed_path_law(nu, std::slice::from_ref(&root)).unwrap();
        let long = killed_path_law(nu, &[root.clone(), pair.clone()]).unwrap();
        assert_eq!(short, Prob::from_ratio(5, 9), "measure {}", j + 1);
        assert_eq!(long, Prob::from_ratio(4, 9), "measure {}", j + 1);

        // the transform function agrees across all four measures
        assert!(h_nu(nu, &root).is_one());
        assert_eq!(h_nu(nu, &pair), Rat::new(8.into(), 9.into()));

        // Monte Carlo at 10^4 replicas within +-0.02
        let freqs = killed_path_frequencies(nu, replicas, 20_260 + j as u64, 8).unwrap();
        let freq_of = |key: &str| {
            freqs
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, f)| *f)
                .unwrap_or(0.0)
        };
        assert!(
            (freq_of("e+") - 5.0 / 9.0).abs() <= 0.02,
            "measure {}: short-path frequency {}",
            j + 1,
            freq_of("e+")
        );
        assert!(
            (freq_of("e|0,1+") - 4.0 / 9.0).abs() <= 0.02,
            "measure {}: long-path frequency {}",
            j + 1,
            freq_of("e|0,1+")
        );
        assert_eq!(freqs.len(), 2, "measure {}: only two trajectories occur", j + 1);
    }
    println!(
        "PASS criterion 1: four measures, exact path laws 4/9 and 5/9, MC within 0.02 ({:?})",
        start.elapsed()
    );
}

#[test]
fn acceptance_02_riesz_reconstruction() {
    let start = Instant::now();
    let nu = &counterexample_measures()[0];
    let root = RadixTree::trivial();
    let support = radixlab_core::laws::atomic_support_trees(nu).unwrap();
    let total: Rat = support
        .iter()
        .map(|s| green_kernel(&root, s, 8).unwrap().into_rat() * riesz_eta(nu, s))
        .sum();
    assert_eq!(total, h_nu(nu, &root));
    assert!(total.is_one());
    // the two contributions are 5/9 and (1/2)(8/9)
    assert_eq!(riesz_eta(nu, &root), Rat::new(5.into(), 9.into()));
    assert_eq!(riesz_eta(nu, &tree("0,1")), Rat::new(8.into(), 9.into()));
    println!(
        "PASS criterion 2: sum G(root,s) eta(s) = 1 = h(root), exactly ({:?})",
        start.elapsed()
    );
}

#[test]
fn acceptance_03_theta_total_mass() {
    let start = Instant::now();
    let nu1 = &counterexample_measures()[0];
    assert!(theta_total_mass(nu1).unwrap().is_one());

    // uniform measure on the four atoms 000..., 011..., 111..., 100...
    let uniform4 = SourceMeasure::atomic(
        ["(0)", "0(1)", "(1)", "1(0)"]
            .iter()
            .map(|s| Atom {
                s: s.parse().unwrap(),
                mass: Prob::from_ratio(1, 4),
            })
            .collect(),
    )
    .unwrap();
    assert!(theta_total_mass(&uniform4).unwrap().is_one());
    println!(
        "PASS criterion 3: theta total mass 1 for the two-atom and uniform four-atom measures ({:?})",
        start.elapsed()
    );
}

#[test]
fn acceptance_04_oracle_suite() {
    let start = Instant::now();
    let scope = Scope {
        n_max: 4,
        depth_max: 4,
    };
    for nu in [gamma(), bernoulli(1, 3), counterexample_measures()[0].clone()] {
        let report = definitional_recheck(&nu, scope).unwrap();
        let checked: u64 = report.identities.iter().map(|s| s.instances).sum();
        assert!(
            report.passed,
            "oracle mismatches for {:?}: {:?}",
            nu, report.mismatches
        );
        println!(
            "  oracle: {} identities over {} instances, zero mismatches",
            report.identities.len(),
            checked
        );
    }
    println!(
        "PASS criterion 4: definitional recheck clean for the fair coin, bernoulli(1/3) and the two-atom measure ({:?})",
        start.elapsed()
    );
}

#[test]
fn acceptance_05_bridge_law() {
    let start = Instant::now();
    let target = tree("00,01,1");
    let laws = exact_path_laws(&target).unwrap();
    assert_eq!(laws.len(), 2);
    let via_pair = laws
        .iter()
        .find(|p| p.path[1] == tree("0,1"))
        .expect("path through the balanced pair");
    assert_eq!(via_pair.conditional, Prob::from_ratio(2, 3));
    let via_cherry = laws
        .iter()
        .find(|p| p.path[1] == tree("00,01"))
        .expect("path through the deep pair");
    assert_eq!(via_cherry.conditional, Prob::from_ratio(1, 3));

    let replicas = 100_000u64;
    let mut hits = 0u64;
    for r in 0..replicas {
        let path = sample_bridge_with(&target, &mut replica_rng(505, r)).unwrap();
        assert_eq!(path.last(), &target);
        if path.trees()[1] == tree("0,1") {
            hits += 1;
        }
    }
    let freq = hits as f64 / replicas as f64;
    let expect = 2.0 / 3.0;
    let sigma = (expect * (1.0 - expect) / replicas as f64).sqrt();
    assert!(
        (freq - expect).abs() <= 4.0 * sigma,
        "bridge frequency {freq} vs {expect} (4 sigma = {})",
        4.0 * sigma
    );
    println!(
        "PASS criterion 5: bridge weights 2/3 and 1/3 exact; sampled {freq:.4} within 4 sigma ({:?})",
        start.elapsed()
    );
}

#[test]
fn acceptance_06_kernel_limit() {
    let start = Instant::now();
    let nu = bernoulli(3, 10);
    let s = tree("0,1");
    let rows = kernel_convergence(&nu, &s, 2000, 200, 606, &[500, 1000, 2000]).unwrap();
    let last = rows.last().unwrap();
    let h = h_nu(&nu, &s);
    assert_eq!(h, Rat::new(21.into(), 25.into()));
    assert!(
        (last.mean - 0.84).abs() <= 0.05,
        "kernel mean {} at n = {} vs h = 0.84",
        last.mean,
        last.k
    );
    println!(
        "PASS criterion 6: mean K(s, R_2000) = {:.4} within 0.05 of 21/25 over 200 replicas ({:?})",
        last.mean,
        start.elapsed()
    );
}

#[test]
fn acceptance_07_nu_recovery() {
    let start = Instant::now();
    let depth2: Vec<Word> = ["e", "0", "1", "00", "01", "10", "11"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    for (nu, seed) in [(gamma(), 707u64), (bernoulli(3, 10), 708u64)] {
        let estimates = estimate_cylinders(&nu, 5000, 4, seed, &depth2).unwrap();
        for e in &estimates {
            assert!(
                (e.estimate - e.exact).abs() <= 0.03,
                "cylinder {}: estimate {} vs exact {}",
                e.y,
                e.estimate,
                e.exact
            );
        }
    }
    println!(
        "PASS criterion 7: all depth-<=2 cylinder estimates within 0.03 at n = 5000 ({:?})",
        start.elapsed()
    );
}

#[test]
fn acceptance_08_truncated_normalization() {
    let start = Instant::now();
    for depth in 1..=10usize {
        let shapes = enumerate_shapes(2, depth).unwrap();
        let total: Rat = shapes
            .iter()
            .map(|t| marginal_law(&gamma(), t).into_rat())
            .sum();
        assert_eq!(total, Rat::one() - pow2(-(depth as i64)), "depth {depth}");
    }
    println!(
        "PASS criterion 8: two-leaf marginals total 1 - 2^-D for D <= 10, exactly ({:?})",
        start.elapsed()
    );
}

#[test]
fn acceptance_09_property_suites() {
    let start = Instant::now();

    // shape-rule validity across the full enumeration to n = 4, depth = 4
    for n in 1..=4usize {
        for t in enumerate_shapes(n, 4).unwrap() {
            assert!(RadixTree::from_leaves(t.leaves().to_vec()).is_ok());
        }
    }

    // pruning inverts every forward move out of every 3-leaf shape
    for s in enumerate_shapes(3, 3).unwrap() {
        for (t, mv) in s.forward_successors(s.max_leaf_depth() + 2).unwrap() {
            for leaf in mv.new_leaves() {
                assert_eq!(t.kappa(leaf).unwrap(), s);
            }
        }
    }

    // permutation invariance, exhaustive over all orderings for n <= 4
    let family: Vec<EventuallyPeriodic> = ["(0)", "01(1)", "(1)", "1(10)"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let reference = build_radix_tree(&family, 4096).unwrap();
    let mut stack = vec![(Vec::new(), family.clone())];
    while let Some((chosen, rest)) = stack.pop() {
        if rest.is_empty() {
            assert_eq!(build_radix_tree(&chosen, 4096).unwrap(), reference);
            continue;
        }
        for i in 0..rest.len() {
            let mut c = chosen.clone();
            let mut r = rest.clone();
            c.push(r.remove(i));
            stack.push((c, r));
        }
    }

    // label traces: monotone growth and stable meets
    for seed in 0..40u64 {
        let (_, trace) = sample_labeled_chain(&gamma(), 10, seed).unwrap();
        assert!(trace.is_monotone());
        assert!(trace.meets_are_stable());
        let (_, trace) = sample_labeled_chain(&bernoulli(3, 10), 10, seed).unwrap();
        assert!(trace.is_monotone());
        assert!(trace.meets_are_stable());
    }

    println!(
        "PASS criterion 9: shape validity, pruning round trips, permutation invariance, label traces ({:?})",
        start.elapsed()
    );
}
