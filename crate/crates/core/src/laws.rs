//! Exact laws of the radix sort tree chain.
//!
//! Everything here is closed-form rational arithmetic: marginal laws, forward
//! and backward transition probabilities, the ratio kernel `K(s,t)` and its
//! limits `h_nu`, the Green kernel, and the occupation quantities `eta` and
//! `theta` for sources with atoms. Monte-Carlo estimation lives in
//! [`crate::simulate`]; the independent brute-force recomputation of these
//! laws lives in [`crate::oracle`].

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::measure::SourceMeasure;
use crate::prob::{factorial, falling_factorial, pow2, Prob, Rat};
use crate::tree::{Move, RadixTree};
use crate::word::Word;

/// P{R_n = t} for inputs drawn from `nu`: n! times the product of the leaf
/// cylinder masses.
pub fn marginal_law(nu: &SourceMeasure, t: &RadixTree) -> Prob {
    let mut mass = Rat::from_integer(factorial(t.leaf_count()));
    for leaf in t.leaves() {
        mass *= nu.cylinder_mass(leaf).rat();
    }
    Prob::expect(mass)
}

/// One-step forward transition probability P{R_{n+1} = t | R_n = s} under
/// `nu`. Pairs that are not one-step moves get 0.
pub fn forward_prob(nu: &SourceMeasure, s: &RadixTree, t: &RadixTree) -> Prob {
    match s.classify_move(t) {
        Some(mv) => forward_prob_of_move(nu, s, &mv),
        None => Prob::zero(),
    }
}

/// Transition probability of an already classified move out of `s`.
pub fn forward_prob_of_move(nu: &SourceMeasure, _s: &RadixTree, mv: &Move) -> Prob {
    match mv {
        Move::AttachSibling { w } => nu.cylinder_mass(w),
        Move::SplitLeaf { y, deeper, other } => {
            let denom = nu.cylinder_mass(y).into_rat();
            let num =
                nu.cylinder_mass(deeper).into_rat() * nu.cylinder_mass(other).into_rat();
            if denom.is_zero() {
                // additivity forces the numerators to vanish with the
                // denominator; anything else is a broken measure
                assert!(
                    num.is_zero(),
                    "cylinder of {y} has zero mass but its children do not"
                );
                return Prob::zero();
            }
            let p = Rat::from_integer(2.into()) * num / denom;
            #[cfg(debug_assertions)]
            if *nu == SourceMeasure::fair_coin() {
                // split probability factorizes as 2^-|y| P{R_2 = pair tree}
                let pair_depth = (deeper.len() - y.len()) as i64;
                let pair_marginal = Rat::from_integer(2.into()) * pow2(-2 * pair_depth);
                debug_assert_eq!(p, pow2(-(y.len() as i64)) * pair_marginal);
            }
            Prob::expect(p)
        }
    }
}

/// Backward transition probability P{R_n = s | R_{n+1} = t}: the fraction of
/// leaves of `t` whose pruning yields `s`. Independent of the source measure;
/// always 0, 1/(n+1) or 2/(n+1).
pub fn backward_prob(s: &RadixTree, t: &RadixTree) -> Prob {
    let n1 = t.leaf_count();
    if n1 < 2 {
        return Prob::zero();
    }
    let hits = t
        .leaves()
        .iter()
        .filter(|v| t.kappa(v).expect("leaf of a >=2 leaf tree") == *s)
        .count();
    Prob::expect(Rat::new(hits.into(), n1.into()))
}

/// The ratio kernel K(s,t): the probability that the bridge to `t` passes
/// through `s`, relative to the unconditioned chain. A nonnegative rational,
/// often above 1; zero iff some leaf of `s` has no extension among the
/// leaves of `t`.
pub fn dm_kernel(s: &RadixTree, t: &RadixTree) -> Rat {
    let m = s.leaf_count();
    let big_m = t.leaf_count();
    if m > big_m {
        return Rat::zero();
    }
    let mut num = Rat::one();
    for y in s.leaves() {
        let count = t.leaves_extending(y);
        if count == 0 {
            return Rat::zero();
        }
        num *= pow2(y.len() as i64) * Rat::from_integer(count.into());
    }
    num / Rat::from_integer(falling_factorial(big_m, m))
}

/// The harmonic (for diffuse `nu`; excessive in general) function
/// h_nu(s) = prod over leaves of 2^|a| nu(cylinder(a)), the kernel limit
/// along chains driven by `nu`.
pub fn h_nu(nu: &SourceMeasure, s: &RadixTree) -> Rat {
    let mut h = Rat::one();
    for a in s.leaves() {
        h *= pow2(a.len() as i64) * nu.cylinder_mass(a).rat();
    }
    h
}

/// The transform identity: forward probability under `nu` equals
/// h(s)^-1 p_gamma(s,t) h(t). Returns the transformed value after checking
/// it agrees exactly with the direct formula; for sources with atoms this is
/// the (sub-stochastic) killed-chain kernel.
pub fn h_transform_check(nu: &SourceMeasure, s: &RadixTree, t: &RadixTree) -> Result<Prob> {
    let hs = h_nu(nu, s);
    if hs.is_zero() {
        return Err(Error::ZeroMassPrefix {
            prefix: format!("h vanishes on {s}"),
        });
    }
    let transformed =
        forward_prob(&SourceMeasure::fair_coin(), s, t).into_rat() * h_nu(nu, t) / hs;
    let direct = forward_prob(nu, s, t);
    assert_eq!(
        &transformed,
        direct.rat(),
        "transform identity failed for {s} -> {t}"
    );
    Ok(direct)
}

/// Total split mass at leaf `y` under `nu`: the probability that a fresh
/// draw lands in the cylinder of `y` and differs from the draw stored there.
pub fn split_mass_total(nu: &SourceMeasure, y: &Word) -> Prob {
    let mass = nu.cylinder_mass(y);
    let survive = Rat::one() - nu.collision_mass(y).rat();
    Prob::expect(mass.rat() * survive)
}

/// Split mass at leaf `y` restricted to split depths <= `max_split`.
pub fn split_mass_truncated(nu: &SourceMeasure, y: &Word, max_split: usize) -> Prob {
    let denom = nu.cylinder_mass(y).into_rat();
    if denom.is_zero() {
        return Prob::zero();
    }
    let mut acc = Rat::zero();
    let mut stems = vec![y.clone()];
    for _ in 1..=max_split {
        let mut next = Vec::with_capacity(stems.len() * 2);
        for stem in stems {
            let left = nu.cylinder_mass(&stem.child(0)).into_rat();
            let right = nu.cylinder_mass(&stem.child(1)).into_rat();
            acc += Rat::from_integer(2.into()) * left * right / &denom;
            next.push(stem.child(0));
            next.push(stem.child(1));
        }
        stems = next;
    }
    Prob::expect(acc)
}

/// Exact residual split mass beyond depth `max_split`, monotone in the cap.
pub fn split_tail(nu: &SourceMeasure, y: &Word, max_split: usize) -> Prob {
    let tail =
        split_mass_total(nu, y).into_rat() - split_mass_truncated(nu, y, max_split).rat();
    assert!(!tail.is_negative(), "truncated split mass exceeds total");
    Prob::expect(tail)
}

/// Total attach mass out of `s`: one minus the leaf cylinder masses.
pub fn attach_mass_total(nu: &SourceMeasure, s: &RadixTree) -> Prob {
    let leaves: Rat = s
        .leaves()
        .iter()
        .map(|y| nu.cylinder_mass(y).into_rat())
        .sum();
    Prob::expect(Rat::one() - leaves)
}

/// Residual forward mass of `s` not covered by successors with split depth
/// <= `max_split`.
pub fn row_residual(nu: &SourceMeasure, s: &RadixTree, max_split: usize) -> Prob {
    let acc: Rat = s
        .leaves()
        .iter()
        .map(|y| split_tail(nu, y, max_split).into_rat())
        .sum();
    Prob::expect(acc)
}

/// Probability that the next draw duplicates a stored one: the per-step kill
/// mass of the chain at `s`. Zero for diffuse sources.
pub fn kill_mass(nu: &SourceMeasure, s: &RadixTree) -> Prob {
    let acc: Rat = s
        .leaves()
        .iter()
        .map(|y| nu.cylinder_mass(y).into_rat() * nu.collision_mass(y).rat())
        .sum();
    Prob::expect(acc)
}

/// Defect of harmonicity of h_nu at `s`, evaluated by enumerating successors
/// up to the split cap: h(s) - sum over enumerated t of p_gamma(s,t) h(t).
/// Equals h(s) (kill mass + split tails) exactly; it converges to eta(s) as
/// the cap grows, and to 0 for diffuse sources.
pub fn harmonic_deficit(nu: &SourceMeasure, s: &RadixTree, max_split: usize) -> Rat {
    let gamma = SourceMeasure::fair_coin();
    let cap = s.max_leaf_depth() + max_split;
    let mut acc = Rat::zero();
    for (t, mv) in s
        .forward_successors(cap)
        .expect("cap covers the tree depth")
    {
        if let Move::SplitLeaf { y, deeper, .. } = &mv {
            if deeper.len() - y.len() > max_split {
                continue;
            }
        }
        acc += forward_prob_of_move(&gamma, s, &mv).into_rat() * h_nu(nu, &t);
    }
    h_nu(nu, s) - acc
}

/// The mass the Riesz decomposition of h_nu places on `s`:
/// eta(s) = h_nu(s) times the kill mass at `s`. Identically zero for diffuse
/// sources, where h_nu is harmonic.
pub fn riesz_eta(nu: &SourceMeasure, s: &RadixTree) -> Rat {
    h_nu(nu, s) * kill_mass(nu, s).rat()
}

/// Green kernel G(s,t) = P{R_{M(t)} = t | R_{M(s)} = s}, by dynamic
/// programming over the trees between `s` and `t`. The closed-form route
/// marginal(t) K(s,t) is computed alongside and must agree.
pub fn green_kernel(s: &RadixTree, t: &RadixTree, depth_cap: usize) -> Result<Prob> {
    if depth_cap < t.max_leaf_depth().max(s.max_leaf_depth()) {
        return Err(Error::CapTooSmall {
            cap: depth_cap,
            required: t.max_leaf_depth().max(s.max_leaf_depth()),
        });
    }
    green_kernel_with_memo(s, t, &mut BTreeMap::new())
}

/// Like [`green_kernel`], reusing a memo table across sources `s` of the same
/// target `t`. The memo must not be shared between different targets.
pub fn green_kernel_with_memo(
    s: &RadixTree,
    t: &RadixTree,
    memo: &mut BTreeMap<RadixTree, Rat>,
) -> Result<Prob> {
    let gamma = SourceMeasure::fair_coin();
    let dp = green_dp(&gamma, s, t, memo);
    let closed = marginal_law(&gamma, t).into_rat() * dm_kernel(s, t);
    assert_eq!(dp, closed, "Green kernel routes disagree for {s} -> {t}");
    Prob::new(dp)
}

fn green_dp(
    gamma: &SourceMeasure,
    r: &RadixTree,
    t: &RadixTree,
    memo: &mut BTreeMap<RadixTree, Rat>,
) -> Rat {
    if r == t {
        return Rat::one();
    }
    if r.leaf_count() >= t.leaf_count() || !r.is_subtree_of(t) {
        return Rat::zero();
    }
    if let Some(v) = memo.get(r) {
        return v.clone();
    }
    let mut acc = Rat::zero();
    for (next, mv) in r
        .forward_successors(t.max_leaf_depth())
        .expect("cap covers subtree depth")
    {
        if next.is_subtree_of(t) {
            acc += forward_prob_of_move(gamma, r, &mv).into_rat()
                * green_dp(gamma, &next, t, memo);
        }
    }
    memo.insert(r.clone(), acc.clone());
    acc
}

/// The boundary-mixing mass placed on the interior state `s`:
/// theta(s) = M(s)! prod nu(cylinder(a)) times the kill mass at `s`: the
/// probability that the killed chain dies immediately after occupying `s`.
pub fn theta(nu: &SourceMeasure, s: &RadixTree) -> Rat {
    let mut mass = Rat::from_integer(factorial(s.leaf_count()));
    for a in s.leaves() {
        mass *= nu.cylinder_mass(a).rat();
    }
    let th = mass * kill_mass(nu, s).rat();
    debug_assert_eq!(
        th,
        marginal_law(&SourceMeasure::fair_coin(), s).into_rat() * riesz_eta(nu, s)
    );
    th
}

/// Trees reachable by storing distinct atoms of a purely atomic measure:
/// the support of `theta` and `eta`.
pub fn atomic_support_trees(nu: &SourceMeasure) -> Result<Vec<RadixTree>> {
    if !nu.diffuse_parts().is_empty() {
        return Err(Error::NonAtomic);
    }
    let atoms = nu.atoms();
    let k = atoms.len();
    if k > 16 {
        return Err(Error::Explosion {
            projected: 1u64 << k,
            limit: 1 << 16,
        });
    }
    let mut trees = std::collections::BTreeSet::new();
    for mask in 1u64..(1 << k) {
        let subset: Vec<_> = (0..k)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| atoms[i].0.clone())
            .collect();
        let t = crate::tree::build_radix_tree(&subset, usize::MAX)
            .expect("distinct atoms build a tree");
        trees.insert(t);
    }
    Ok(trees.into_iter().collect())
}

/// Total boundary-mixing mass over interior states for a purely atomic
/// measure; the killed chain dies somewhere with probability one, so this
/// totals 1.
pub fn theta_total_mass(nu: &SourceMeasure) -> Result<Prob> {
    let support = atomic_support_trees(nu)?;
    let total: Rat = support.iter().map(|s| theta(nu, s)).sum();
    Prob::new(total)
}

/// Exact law of one killed-chain trajectory: the probability that the chain
/// visits exactly `trees` (which must start at the trivial tree and step by
/// legal moves) and is then sent to the cemetery.
pub fn killed_path_law(nu: &SourceMeasure, trees: &[RadixTree]) -> Result<Prob> {
    if trees.first() != Some(&RadixTree::trivial()) {
        return Err(Error::InvalidTree(
            "killed path must start at the trivial tree".to_string(),
        ));
    }
    let mut mass = Rat::one();
    for pair in trees.windows(2) {
        let step = forward_prob(nu, &pair[0], &pair[1]);
        if step.is_zero() {
            return Err(Error::InvalidTree(format!(
                "{} -> {} is not a legal step",
                pair[0], pair[1]
            )));
        }
        mass *= step.rat();
    }
    let last = trees.last().expect("nonempty path");
    Ok(Prob::expect(mass * kill_mass(nu, last).rat()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::two_atom_measure;
    use crate::prob::rat;

    fn tree(s: &str) -> RadixTree {
        s.parse().unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn gamma() -> SourceMeasure {
        SourceMeasure::fair_coin()
    }

    fn bern(num: i64, den: i64) -> SourceMeasure {
        SourceMeasure::bernoulli(Prob::expect(rat(num, den))).unwrap()
    }

    fn nu1() -> SourceMeasure {
        two_atom_measure("(0)", Prob::from_ratio(1, 3), "(1)")
    }

    #[test]
    fn marginal_examples() {
        assert_eq!(marginal_law(&gamma(), &tree("0,1")), Prob::from_ratio(1, 2));
        assert_eq!(
            marginal_law(&gamma(), &tree("00,01,1")),
            Prob::from_ratio(3, 16)
        );
        assert_eq!(
            marginal_law(&bern(1, 3), &tree("0,1")),
            Prob::from_ratio(4, 9)
        );
        assert_eq!(marginal_law(&gamma(), &RadixTree::trivial()), Prob::one());
    }

    #[test]
    fn forward_examples() {
        let g = gamma();
        assert_eq!(
            forward_prob(&g, &RadixTree::trivial(), &tree("0,1")),
            Prob::from_ratio(1, 2)
        );
        assert_eq!(
            forward_prob(&g, &tree("0,1"), &tree("00,01,1")),
            Prob::from_ratio(1, 4)
        );
        assert_eq!(
            forward_prob(&g, &tree("00,01"), &tree("00,01,1")),
            Prob::from_ratio(1, 2)
        );
        // not one-step
        assert_eq!(
            forward_prob(&g, &RadixTree::trivial(), &tree("00,01,1")),
            Prob::zero()
        );
    }

    #[test]
    fn backward_examples_and_row_sum() {
        let t = tree("00,01,1");
        assert_eq!(backward_prob(&tree("0,1"), &t), Prob::from_ratio(2, 3));
        assert_eq!(backward_prob(&tree("00,01"), &t), Prob::from_ratio(1, 3));
        assert_eq!(backward_prob(&tree("10,11"), &t), Prob::zero());

        // distinct pruned trees exhaust the leaves of any target
        for target in ["0,1", "00,01,1", "000,001,01,1"] {
            let target = tree(target);
            let mut seen = std::collections::BTreeSet::new();
            for v in target.leaves() {
                seen.insert(target.kappa(v).unwrap());
            }
            let total: Rat = seen
                .iter()
                .map(|s| backward_prob(s, &target).into_rat())
                .sum();
            assert!(total.is_one());
        }
    }

    #[test]
    fn bayes_triangle_exact() {
        // marginal(s) forward(s,t) = marginal(t) backward(s,t)
        for nu in [gamma(), bern(1, 3)] {
            for s in ["e", "0,1", "00,01", "00,01,1"] {
                let s = tree(s);
                for (t, _) in s.forward_successors(s.max_leaf_depth() + 2).unwrap() {
                    let lhs = marginal_law(&nu, &s).into_rat()
                        * forward_prob(&nu, &s, &t).into_rat();
                    let rhs = marginal_law(&nu, &t).into_rat()
                        * backward_prob(&s, &t).into_rat();
                    assert_eq!(lhs, rhs, "bayes failed at {s} -> {t}");
                }
            }
        }
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(dm_kernel(&RadixTree::trivial(), &tree("00,01,1")), Rat::one());
        assert_eq!(dm_kernel(&tree("0,1"), &tree("00,01,1")), rat(4, 3));
        assert_eq!(dm_kernel(&tree("00,01"), &tree("000,001,1")), Rat::zero());
        // against the definition: P{R_3 = t | R_2 = s} / P{R_3 = t}
        let cond = forward_prob(&gamma(), &tree("0,1"), &tree("00,01,1")).into_rat();
        let marg = marginal_law(&gamma(), &tree("00,01,1")).into_rat();
        assert_eq!(dm_kernel(&tree("0,1"), &tree("00,01,1")), cond / marg);
    }

    #[test]
    fn h_nu_examples() {
        assert!(h_nu(&gamma(), &tree("000,001,01,1")).is_one());
        assert_eq!(h_nu(&bern(3, 10), &tree("0,1")), rat(21, 25));
        assert_eq!(h_nu(&nu1(), &tree("0,1")), rat(8, 9));
        assert!(h_nu(&nu1(), &RadixTree::trivial()).is_one());
        assert_eq!(h_nu(&nu1(), &tree("00,01,1")), Rat::zero());
    }

    #[test]
    fn h_transform_identity() {
        let b = bern(3, 10);
        let p = h_transform_check(&b, &RadixTree::trivial(), &tree("0,1")).unwrap();
        assert_eq!(p, Prob::from_ratio(21, 50));
        // every enumerated one-step pair satisfies the identity
        for s in ["e", "0,1", "00,01,1"] {
            let s = tree(s);
            for (t, _) in s.forward_successors(s.max_leaf_depth() + 2).unwrap() {
                h_transform_check(&b, &s, &t).unwrap();
                h_transform_check(&nu1(), &s, &t).ok();
            }
        }
    }

    #[test]
    fn row_sums_with_exact_tails() {
        // under the fair coin the residual of leaf y at split cap P is
        // 2^-|y| 2^-P; trees up to depth 6, caps up to 6
        for s in [
            "e",
            "0,1",
            "00,01,1",
            "000,001,01,1",
            "000000,000001,00001,0001,001,01,1",
        ] {
            let s = tree(s);
            for cap in 1..=6usize {
                let mut total = attach_mass_total(&gamma(), &s).into_rat();
                for y in s.leaves() {
                    total += split_mass_truncated(&gamma(), y, cap).rat();
                }
                let residual: Rat = s
                    .leaves()
                    .iter()
                    .map(|y| pow2(-(y.len() as i64)) * pow2(-(cap as i64)))
                    .sum();
                assert_eq!(total, Rat::one() - &residual);
                assert_eq!(row_residual(&gamma(), &s, cap).into_rat(), residual);
            }
        }
    }

    #[test]
    fn bernoulli_tail_closed_form() {
        let b = bern(3, 10);
        let s_sq = rat(9, 100) + rat(49, 100); // p1^2 + p0^2
        for y in ["e", "0", "11"] {
            let y = w(y);
            for cap in 0..=5usize {
                let mut expect = b.cylinder_mass(&y).into_rat();
                for _ in 0..cap {
                    expect *= &s_sq;
                }
                assert_eq!(split_tail(&b, &y, cap).into_rat(), expect);
            }
        }
    }

    #[test]
    fn harmonic_deficit_shrinks_for_diffuse_and_hits_eta_for_atomic() {
        let b = bern(3, 10);
        let s = tree("0,1");
        let mut last = harmonic_deficit(&b, &s, 1);
        for cap in 2..=6 {
            let d = harmonic_deficit(&b, &s, cap);
            assert!(d < last);
            assert!(!d.is_negative());
            // exact: deficit = h(s) * sum of split tails
            let expect = h_nu(&b, &s) * row_residual(&b, &s, cap).rat();
            assert_eq!(d, expect);
            last = d;
        }
        // atoms separate at depth 1, so any cap >= 1 gives the exact eta
        let nu = nu1();
        for s in ["e", "0,1"] {
            let s = tree(s);
            assert_eq!(harmonic_deficit(&nu, &s, 3), riesz_eta(&nu, &s));
        }
    }

    #[test]
    fn green_kernel_examples() {
        let t = tree("00,01,1");
        assert_eq!(green_kernel(&t, &t, 4).unwrap(), Prob::one());
        assert_eq!(
            green_kernel(&RadixTree::trivial(), &tree("0,1"), 4).unwrap(),
            Prob::from_ratio(1, 2)
        );
        assert_eq!(
            green_kernel(&tree("0,1"), &t, 4).unwrap(),
            Prob::from_ratio(1, 4)
        );
        // multi-step: trivial -> {00,01,1} sums both paths
        assert_eq!(
            green_kernel(&RadixTree::trivial(), &t, 4).unwrap(),
            Prob::from_ratio(3, 16)
        );
        assert_eq!(green_kernel(&tree("10,11"), &t, 4).unwrap(), Prob::zero());
        assert!(matches!(
            green_kernel(&RadixTree::trivial(), &t, 1),
            Err(Error::CapTooSmall { .. })
        ));
    }

    #[test]
    fn eta_and_theta_examples() {
        let nu = nu1();
        assert_eq!(riesz_eta(&gamma(), &tree("0,1")), Rat::zero());
        assert_eq!(riesz_eta(&bern(3, 10), &tree("0,1")), Rat::zero());
        assert_eq!(riesz_eta(&nu, &RadixTree::trivial()), rat(5, 9));
        assert_eq!(riesz_eta(&nu, &tree("0,1")), rat(8, 9));

        assert_eq!(theta(&nu, &RadixTree::trivial()), rat(5, 9));
        assert_eq!(theta(&nu, &tree("0,1")), rat(4, 9));
        assert_eq!(theta(&gamma(), &tree("0,1")), Rat::zero());
    }

    #[test]
    fn riesz_reconstruction_for_two_atoms() {
        let nu = nu1();
        let root = RadixTree::trivial();
        let support = atomic_support_trees(&nu).unwrap();
        assert_eq!(support.len(), 2);
        let mut total = Rat::zero();
        for s in &support {
            total += green_kernel(&root, s, 4).unwrap().into_rat() * riesz_eta(&nu, s);
        }
        assert_eq!(total, h_nu(&nu, &root));
        assert!(total.is_one());
    }

    #[test]
    fn theta_total_mass_examples() {
        assert!(theta_total_mass(&nu1()).unwrap().is_one());
        // a single atom collides at the second draw with certainty
        let single = SourceMeasure::atomic(vec![crate::measure::Atom {
            s: "(10)".parse().unwrap(),
            mass: Prob::one(),
        }])
        .unwrap();
        assert_eq!(theta(&single, &RadixTree::trivial()), Rat::one());
        assert!(theta_total_mass(&single).unwrap().is_one());
        assert!(matches!(theta_total_mass(&gamma()), Err(Error::NonAtomic)));
    }

    #[test]
    fn killed_path_laws_match_the_worked_example() {
        let nu = nu1();
        let root = RadixTree::trivial();
        assert_eq!(
            killed_path_law(&nu, std::slice::from_ref(&root)).unwrap(),
            Prob::from_ratio(5, 9)
        );
        assert_eq!(
            killed_path_law(&nu, &[root, tree("0,1")]).unwrap(),
            Prob::from_ratio(4, 9)
        );
    }

    #[test]
    fn kill_mass_is_the_row_deficit() {
        let nu = nu1();
        let s = tree("0,1");
        // atoms separate by depth 1, so the truncated row sum at any cap >= 1
        // is already complete
        let mut alive = attach_mass_total(&nu, &s).into_rat();
        for y in s.leaves() {
            alive += split_mass_truncated(&nu, y, 4).rat();
        }
        assert_eq!(alive + kill_mass(&nu, &s).rat(), Rat::one());
        assert_eq!(kill_mass(&nu, &s), Prob::one());
        assert_eq!(kill_mass(&nu, &RadixTree::trivial()), Prob::from_ratio(5, 9));
    }
}
