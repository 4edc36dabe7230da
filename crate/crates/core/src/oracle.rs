//! Brute-force verification of the closed-form laws.
//!
//! Nothing here trusts the formulas in [`crate::laws`]: marginals and
//! transition probabilities are recomputed from the definition of the chain
//! by exhaustively enumerating input tuples: depth-D prefixes for diffuse
//! sources (exact, because a tree of depth <= D is determined by the first D
//! bits of its inputs), atom tuples for purely atomic sources. The recheck
//! then demands exact rational equality with every closed form, identity by
//! identity.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laws;
use crate::measure::SourceMeasure;
use crate::prob::{pow2, rat_to_string, Prob, Rat};
use crate::tree::{build_radix_tree, Move, RadixTree, TrieBuilder};
use crate::word::Word;

pub const DEFAULT_ENUM_LIMIT: u64 = 2_000_000;

/// All trees with `n` leaves and every leaf depth <= `depth_cap`.
pub fn enumerate_shapes(n: usize, depth_cap: usize) -> Result<Vec<RadixTree>> {
    enumerate_shapes_with_limit(n, depth_cap, DEFAULT_ENUM_LIMIT)
}

pub fn enumerate_shapes_with_limit(
    n: usize,
    depth_cap: usize,
    limit: u64,
) -> Result<Vec<RadixTree>> {
    assert!(n >= 1);
    let mut counts = BTreeMap::new();
    let projected = count_shapes(n, depth_cap, &mut counts);
    if projected > limit as u128 {
        return Err(Error::Explosion {
            projected: projected.min(u64::MAX as u128) as u64,
            limit,
        });
    }
    Ok(build_shapes(n, depth_cap))
}

/// |S_n restricted to depth <= cap| by the root decomposition: either both
/// root subtrees are present, or the whole tree hangs below one child.
fn count_shapes(n: usize, cap: usize, memo: &mut BTreeMap<(usize, usize), u128>) -> u128 {
    if n == 1 {
        return 1;
    }
    if cap == 0 {
        return 0;
    }
    if let Some(&c) = memo.get(&(n, cap)) {
        return c;
    }
    let mut total = 2 * count_shapes(n, cap - 1, memo);
    for a in 1..n {
        total += count_shapes(a, cap - 1, memo) * count_shapes(n - a, cap - 1, memo);
    }
    memo.insert((n, cap), total);
    total
}

fn build_shapes(n: usize, cap: usize) -> Vec<RadixTree> {
    if n == 1 {
        return vec![RadixTree::trivial()];
    }
    if cap == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for a in 1..n {
        for left in build_shapes(a, cap - 1) {
            for right in build_shapes(n - a, cap - 1) {
                let mut leaves: Vec<Word> = left
                    .leaves()
                    .iter()
                    .map(|l| Word::from_bits(&[0]).concat(l))
                    .collect();
                leaves.extend(
                    right
                        .leaves()
                        .iter()
                        .map(|l| Word::from_bits(&[1]).concat(l)),
                );
                out.push(RadixTree::from_leaves(leaves).expect("glued shapes are valid"));
            }
        }
    }
    for bit in [0u8, 1] {
        for sub in build_shapes(n, cap - 1) {
            let leaves: Vec<Word> = sub
                .leaves()
                .iter()
                .map(|l| Word::from_bits(&[bit]).concat(l))
                .collect();
            out.push(RadixTree::from_leaves(leaves).expect("shifted shapes are valid"));
        }
    }
    out
}

/// One forward path from the trivial tree to a target, with its mass under
/// the fair coin and its share of the bridge law.
#[derive(Clone, Debug)]
pub struct PathLaw {
    pub path: Vec<RadixTree>,
    pub mass: Prob,
    pub conditional: Prob,
}

/// Enumerates every forward path from the trivial tree to `t` and normalizes
/// the path masses into the exact bridge law. The total mass must equal the
/// marginal of `t`, which is asserted.
pub fn exact_path_laws(t: &RadixTree) -> Result<Vec<PathLaw>> {
    if t.leaf_count() > 6 || t.max_leaf_depth() > 5 {
        return Err(Error::Explosion {
            projected: u64::MAX,
            limit: 0,
        });
    }
    let gamma = SourceMeasure::fair_coin();
    let mut paths = Vec::new();
    let mut current = vec![RadixTree::trivial()];
    let mut mass_stack = vec![Rat::one()];
    path_dfs(&gamma, t, &mut current, &mut mass_stack, &mut paths);
    let total: Rat = paths.iter().map(|(_, m)| m.clone()).sum();
    assert_eq!(
        total,
        laws::marginal_law(&gamma, t).into_rat(),
        "path masses must add up to the marginal of {t}"
    );
    Ok(paths
        .into_iter()
        .map(|(path, mass)| PathLaw {
            conditional: Prob::expect(&mass / &total),
            mass: Prob::expect(mass),
            path,
        })
        .collect())
}

fn path_dfs(
    gamma: &SourceMeasure,
    t: &RadixTree,
    current: &mut Vec<RadixTree>,
    mass: &mut Vec<Rat>,
    out: &mut Vec<(Vec<RadixTree>, Rat)>,
) {
    let here = current.last().expect("path starts at the trivial tree").clone();
    if here == *t {
        out.push((current.clone(), mass.last().unwrap().clone()));
        return;
    }
    if here.leaf_count() >= t.leaf_count() {
        return;
    }
    let successors = here
        .forward_successors(t.max_leaf_depth())
        .expect("cap covers target depth");
    for (next, mv) in successors {
        if !next.is_subtree_of(t) {
            continue;
        }
        let step = laws::forward_prob_of_move(gamma, &here, &mv).into_rat();
        let next_mass = mass.last().unwrap() * step;
        current.push(next);
        mass.push(next_mass);
        path_dfs(gamma, t, current, mass, out);
        current.pop();
        mass.pop();
    }
}

/// Laws of the chain recomputed from the definition by exhaustive tuple
/// enumeration: per-size marginals and all two-time joint laws.
pub struct EnumeratedLaws {
    pub n_max: usize,
    /// `marg[n-1][t]` = P{R_n = t (and inputs distinct)}, exact per key.
    pub marg: Vec<BTreeMap<RadixTree, Rat>>,
    /// `joint[(m,n)][(s,t)]` = P{R_m = s, R_n = t (inputs distinct)}.
    pub joint: BTreeMap<(usize, usize), BTreeMap<(RadixTree, RadixTree), Rat>>,
    /// `kill[s]` = P{inputs 1..k distinct, R_k = s, input k+1 a duplicate};
    /// empty for diffuse sources.
    pub kill: BTreeMap<RadixTree, Rat>,
    /// `killed_paths[key]` = probability of a full killed trajectory.
    pub killed_paths: BTreeMap<String, Rat>,
}

impl EnumeratedLaws {
    fn new(n_max: usize) -> Self {
        EnumeratedLaws {
            n_max,
            marg: vec![BTreeMap::new(); n_max],
            joint: BTreeMap::new(),
            kill: BTreeMap::new(),
            killed_paths: BTreeMap::new(),
        }
    }

    fn record_chain(&mut self, chain: &[RadixTree], mass: &Rat) {
        let n = chain.len();
        let t = &chain[n - 1];
        self.marg[n - 1]
            .entry(t.clone())
            .and_modify(|v| *v += mass)
            .or_insert_with(|| mass.clone());
        for m in 1..n {
            self.joint
                .entry((m, n))
                .or_default()
                .entry((chain[m - 1].clone(), t.clone()))
                .and_modify(|v| *v += mass)
                .or_insert_with(|| mass.clone());
        }
    }
}

/// Recomputes the laws of a diffuse source by enumerating ordered tuples of
/// pairwise distinct depth-D prefixes, D = depth_max + 1. A tuple of distinct
/// prefixes pins the tree exactly; tuples that collide at depth D can only
/// produce deeper trees, so every key of depth <= D is exact.
pub fn enumerate_word_laws(
    nu: &SourceMeasure,
    n_max: usize,
    depth_max: usize,
) -> Result<EnumeratedLaws> {
    let d = depth_max + 1;
    let word_count = 1u64 << d;
    let mut projected = 0u128;
    let mut level = 1u128;
    for j in 0..n_max as u64 {
        level *= (word_count - j) as u128;
        projected += level;
    }
    if projected > DEFAULT_ENUM_LIMIT as u128 {
        return Err(Error::Explosion {
            projected: projected.min(u64::MAX as u128) as u64,
            limit: DEFAULT_ENUM_LIMIT,
        });
    }

    let words: Vec<Word> = (0..word_count)
        .map(|v| {
            let bits: Vec<u8> = (0..d).map(|i| ((v >> (d - 1 - i)) & 1) as u8).collect();
            Word::from_bits(&bits)
        })
        .collect();
    let masses: Vec<Rat> = words
        .iter()
        .map(|w| nu.cylinder_mass(w).into_rat())
        .collect();

    let mut out = EnumeratedLaws::new(n_max);
    let mut chosen: Vec<usize> = Vec::with_capacity(n_max);
    let mut chain: Vec<RadixTree> = Vec::with_capacity(n_max);
    word_dfs(
        &words,
        &masses,
        n_max,
        d,
        &mut chosen,
        &mut chain,
        &Rat::one(),
        &TrieBuilder::new(),
        &mut out,
    );
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn word_dfs(
    words: &[Word],
    masses: &[Rat],
    n_max: usize,
    depth: usize,
    chosen: &mut Vec<usize>,
    chain: &mut Vec<RadixTree>,
    mass: &Rat,
    builder: &TrieBuilder,
    out: &mut EnumeratedLaws,
) {
    if !chain.is_empty() {
        out.record_chain(chain, mass);
    }
    if chain.len() == n_max {
        return;
    }
    for idx in 0..words.len() {
        if chosen.contains(&idx) || masses[idx].is_zero() {
            continue;
        }
        let mut next_builder = builder.clone();
        chosen.push(idx);
        next_builder
            .insert(|s, i| words[chosen[s]].bit(i), depth)
            .expect("distinct prefixes separate within their length");
        let next_mass = mass * &masses[idx];
        chain.push(next_builder.tree());
        word_dfs(
            words, masses, n_max, depth, chosen, chain, &next_mass, &next_builder, out,
        );
        chain.pop();
        chosen.pop();
    }
}

/// Recomputes the laws of a purely atomic source by enumerating ordered
/// tuples of distinct atoms, including the killed-trajectory laws.
pub fn enumerate_atom_laws(nu: &SourceMeasure, n_max: usize) -> Result<EnumeratedLaws> {
    if !nu.diffuse_parts().is_empty() {
        return Err(Error::NonAtomic);
    }
    let atoms = nu.atoms();
    if atoms.len() > 10 {
        return Err(Error::Explosion {
            projected: u64::MAX,
            limit: DEFAULT_ENUM_LIMIT,
        });
    }
    let mut out = EnumeratedLaws::new(n_max);
    let mut chosen: Vec<usize> = Vec::new();
    let mut chain: Vec<RadixTree> = Vec::new();
    atom_dfs(&atoms, n_max, &mut chosen, &mut chain, &Rat::one(), &mut out);
    Ok(out)
}

fn atom_dfs(
    atoms: &[(crate::strings::EventuallyPeriodic, Rat)],
    n_max: usize,
    chosen: &mut Vec<usize>,
    chain: &mut Vec<RadixTree>,
    mass: &Rat,
    out: &mut EnumeratedLaws,
) {
    if !chain.is_empty() {
        out.record_chain(chain, mass);
        // the next draw duplicates one of the chosen atoms
        let dup: Rat = chosen.iter().map(|&i| atoms[i].1.clone()).sum();
        let killed = mass * dup;
        let last = chain.last().unwrap();
        out.kill
            .entry(last.clone())
            .and_modify(|v| *v += &killed)
            .or_insert_with(|| killed.clone());
        let key = killed_key(chain);
        out.killed_paths
            .entry(key)
            .and_modify(|v| *v += &killed)
            .or_insert(killed);
    }
    if chain.len() == n_max {
        return;
    }
    for idx in 0..atoms.len() {
        if chosen.contains(&idx) {
            continue;
        }
        chosen.push(idx);
        let selected: Vec<_> = chosen.iter().map(|&i| atoms[i].0.clone()).collect();
        let tree = build_radix_tree(&selected, usize::MAX).expect("distinct atoms");
        let next_mass = mass * &atoms[idx].1;
        chain.push(tree);
        atom_dfs(atoms, n_max, chosen, chain, &next_mass, out);
        chain.pop();
        chosen.pop();
    }
}

fn killed_key(chain: &[RadixTree]) -> String {
    let mut key = chain
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join("|");
    key.push('+');
    key
}

/// Verification scope: chain lengths up to `n_max`, trees up to `depth_max`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Scope {
    pub n_max: usize,
    pub depth_max: usize,
}

impl Default for Scope {
    fn default() -> Self {
        Scope {
            n_max: 4,
            depth_max: 4,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One compared instance that disagreed (or a per-identity summary line).
#[derive(Clone, Debug, Serialize)]
pub struct ReportEntry {
    pub identity: String,
    pub instance: String,
    pub expected: String,
    pub actual: String,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentitySummary {
    pub identity: String,
    pub instances: u64,
    pub mismatches: u64,
    pub status: Status,
}

/// Outcome of a definitional recheck run.
#[derive(Debug, Serialize)]
pub struct Report {
    pub measure: String,
    pub scope: Scope,
    pub identities: Vec<IdentitySummary>,
    pub mismatches: Vec<ReportEntry>,
    pub passed: bool,
}

struct Checker {
    counts: BTreeMap<String, (u64, u64)>,
    order: Vec<String>,
    mismatches: Vec<ReportEntry>,
}

impl Checker {
    fn new() -> Self {
        Checker {
            counts: BTreeMap::new(),
            order: Vec::new(),
            mismatches: Vec::new(),
        }
    }

    fn check(&mut self, identity: &str, instance: String, expected: &Rat, actual: &Rat) {
        if !self.counts.contains_key(identity) {
            self.order.push(identity.to_string());
        }
        let slot = self.counts.entry(identity.to_string()).or_insert((0, 0));
        slot.0 += 1;
        if expected != actual {
            slot.1 += 1;
            self.mismatches.push(ReportEntry {
                identity: identity.to_string(),
                instance,
                expected: rat_to_string(expected),
                actual: rat_to_string(actual),
                status: Status::Fail,
            });
        }
    }

    fn finish(self, measure: String, scope: Scope) -> Report {
        let identities: Vec<IdentitySummary> = self
            .order
            .iter()
            .map(|id| {
                let (instances, mismatches) = self.counts[id];
                IdentitySummary {
                    identity: id.clone(),
                    instances,
                    mismatches,
                    status: if mismatches == 0 {
                        Status::Pass
                    } else {
                        Status::Fail
                    },
                }
            })
            .collect();
        let passed = identities.iter().all(|s| s.mismatches == 0)
            && !identities.is_empty();
        Report {
            measure,
            scope,
            identities,
            mismatches: self.mismatches,
            passed,
        }
    }
}

/// Recomputes every law from the definition of the chain and compares it
/// with the closed forms, exactly. Any mismatch fails the report.
pub fn definitional_recheck(nu: &SourceMeasure, scope: Scope) -> Result<Report> {
    let gamma = SourceMeasure::fair_coin();
    let is_gamma = *nu == gamma;
    let mut checker = Checker::new();

    if nu.is_diffuse() {
        let enum_nu = enumerate_word_laws(nu, scope.n_max, scope.depth_max)?;
        let enum_gamma = if is_gamma {
            None
        } else {
            Some(enumerate_word_laws(&gamma, scope.n_max, scope.depth_max)?)
        };
        recheck_common(nu, &enum_nu, &mut checker);
        if is_gamma {
            recheck_gamma_specifics(&enum_nu, scope, &mut checker)?;
        } else {
            recheck_transform(nu, &enum_nu, enum_gamma.as_ref().unwrap(), &mut checker);
        }
    } else {
        let enum_nu = enumerate_atom_laws(nu, scope.n_max)?;
        recheck_common(nu, &enum_nu, &mut checker);
        recheck_atomic(nu, &enum_nu, &mut checker);
    }

    Ok(checker.finish(
        serde_json::to_string(nu).unwrap_or_else(|_| "<measure>".to_string()),
        scope,
    ))
}

/// Marginal product formula, forward transition formulas, move legality and
/// the measure-free backward law, against the enumerated joints.
fn recheck_common(nu: &SourceMeasure, enumerated: &EnumeratedLaws, checker: &mut Checker) {
    for (n, marg) in enumerated.marg.iter().enumerate() {
        let n = n + 1;
        for (t, mass) in marg {
            checker.check(
                "marginal-product-formula",
                format!("n={n} t={t}"),
                mass,
                &laws::marginal_law(nu, t).into_rat(),
            );
        }
    }
    for n in 1..enumerated.n_max {
        let Some(joint) = enumerated.joint.get(&(n, n + 1)) else {
            continue;
        };
        let marg_s = &enumerated.marg[n - 1];
        let marg_t = &enumerated.marg[n];
        for ((s, t), mass) in joint {
            checker.check(
                "forward-moves-are-one-step",
                format!("{s} -> {t}"),
                &Rat::one(),
                &if s.classify_move(t).is_some() {
                    Rat::one()
                } else {
                    Rat::zero()
                },
            );
            let cond = mass / &marg_s[s];
            checker.check(
                "forward-transition-formula",
                format!("{s} -> {t}"),
                &cond,
                &laws::forward_prob(nu, s, t).into_rat(),
            );
            let back = mass / &marg_t[t];
            checker.check(
                "backward-uniform-pruning",
                format!("{s} <- {t}"),
                &back,
                &laws::backward_prob(s, t).into_rat(),
            );
        }
    }
}

/// Fair-coin-only identities: shape enumeration coverage, the cherry
/// factorization of split moves, the kernel as a conditioning quotient, and
/// the Green kernel as a multi-step conditional.
fn recheck_gamma_specifics(
    enumerated: &EnumeratedLaws,
    scope: Scope,
    checker: &mut Checker,
) -> Result<()> {
    let gamma = SourceMeasure::fair_coin();
    // every shape of bounded depth is realized, and nothing else
    for n in 1..=scope.n_max {
        let shapes = enumerate_shapes(n, scope.depth_max)?;
        let mut expected: Vec<&RadixTree> = shapes.iter().collect();
        expected.sort();
        let realized: Vec<&RadixTree> = enumerated.marg[n - 1]
            .keys()
            .filter(|t| t.max_leaf_depth() <= scope.depth_max)
            .collect();
        checker.check(
            "shape-enumeration-coverage",
            format!("n={n} depth<={}", scope.depth_max),
            &Rat::from_integer(expected.len().into()),
            &Rat::from_integer(realized.len().into()),
        );
        for (a, b) in expected.iter().zip(realized.iter()) {
            if a != b {
                checker.check(
                    "shape-enumeration-coverage",
                    format!("n={n} {a} vs {b}"),
                    &Rat::one(),
                    &Rat::zero(),
                );
            }
        }
        // third route to the marginal: total mass of all forward paths
        for t in &shapes {
            let path_total: Rat = exact_path_laws(t)?
                .into_iter()
                .map(|p| p.mass.into_rat())
                .sum();
            checker.check(
                "marginal-path-sum",
                format!("n={n} t={t}"),
                &path_total,
                &enumerated.marg[n - 1][t],
            );
        }
    }
    for n in 1..enumerated.n_max {
        let Some(joint) = enumerated.joint.get(&(n, n + 1)) else {
            continue;
        };
        for (s, t) in joint.keys() {
            if let Some(Move::SplitLeaf { y, deeper, .. }) = s.classify_move(t) {
                let p = deeper.len() - y.len();
                let pair_marginal = Rat::from_integer(2.into()) * pow2(-2 * p as i64);
                checker.check(
                    "cherry-factorization",
                    format!("{s} -> {t}"),
                    &(pow2(-(y.len() as i64)) * pair_marginal),
                    &laws::forward_prob(&gamma, s, t).into_rat(),
                );
            }
        }
    }
    for ((m, n), joint) in &enumerated.joint {
        let marg_s = &enumerated.marg[m - 1];
        let marg_t = &enumerated.marg[n - 1];
        // group by target so the Green recursion shares its table
        let mut by_target: BTreeMap<&RadixTree, Vec<&RadixTree>> = BTreeMap::new();
        for (s, t) in joint.keys() {
            by_target.entry(t).or_default().push(s);
        }
        for (t, sources) in by_target {
            let mut memo = BTreeMap::new();
            for s in sources {
                let mass = &joint[&(s.clone(), t.clone())];
                let quotient = mass / (&marg_s[s] * &marg_t[t]);
                checker.check(
                    "kernel-conditioning-quotient",
                    format!("K({s}, {t})"),
                    &quotient,
                    &laws::dm_kernel(s, t),
                );
                let conditional = mass / &marg_s[s];
                let green = laws::green_kernel_with_memo(s, t, &mut memo)
                    .expect("green kernel within scope")
                    .into_rat();
                checker.check(
                    "green-kernel-definition",
                    format!("G({s}, {t})"),
                    &conditional,
                    &green,
                );
            }
        }
    }
    Ok(())
}

/// The transform identity checked definitionally: enumerated forward law of
/// `nu` against the reweighted enumerated forward law of the fair coin.
fn recheck_transform(
    nu: &SourceMeasure,
    enum_nu: &EnumeratedLaws,
    enum_gamma: &EnumeratedLaws,
    checker: &mut Checker,
) {
    for n in 1..enum_nu.n_max {
        let Some(joint_nu) = enum_nu.joint.get(&(n, n + 1)) else {
            continue;
        };
        let joint_gamma = &enum_gamma.joint[&(n, n + 1)];
        for ((s, t), mass) in joint_nu {
            let cond_nu = mass / &enum_nu.marg[n - 1][s];
            let cond_gamma = &joint_gamma[&(s.clone(), t.clone())]
                / &enum_gamma.marg[n - 1][s];
            // cross-multiplied form of p_nu = h(s)^-1 p_gamma h(t)
            checker.check(
                "transform-identity",
                format!("{s} -> {t}"),
                &(cond_nu * laws::h_nu(nu, s)),
                &(cond_gamma * laws::h_nu(nu, t)),
            );
        }
    }
}

/// Atomic-source identities: the kill distribution against theta, full
/// killed trajectories against the closed path law, and total mass one.
fn recheck_atomic(nu: &SourceMeasure, enumerated: &EnumeratedLaws, checker: &mut Checker) {
    let gamma = SourceMeasure::fair_coin();
    for (s, mass) in &enumerated.kill {
        checker.check(
            "theta-kill-distribution",
            format!("theta({s})"),
            mass,
            &laws::theta(nu, s),
        );
    }
    for (key, mass) in &enumerated.killed_paths {
        let trees: Vec<RadixTree> = key
            .trim_end_matches('+')
            .split('|')
            .map(|part| part.parse().expect("key holds valid trees"))
            .collect();
        checker.check(
            "killed-path-law",
            key.clone(),
            mass,
            &laws::killed_path_law(nu, &trees)
                .expect("enumerated paths are legal")
                .into_rat(),
        );
    }
    // the atoms force a collision eventually, so the kill masses total 1
    // once n_max reaches the atom count
    if enumerated.n_max >= nu.atoms().len() {
        let total: Rat = enumerated.kill.values().sum();
        checker.check(
            "theta-total-mass",
            "sum over reachable trees".to_string(),
            &Rat::one(),
            &total,
        );
        checker.check(
            "theta-total-mass",
            "closed form".to_string(),
            &Rat::one(),
            &laws::theta_total_mass(nu)
                .expect("purely atomic measure")
                .into_rat(),
        );
    }
    // the transform identity against the closed fair-coin kernel
    for n in 1..enumerated.n_max {
        let Some(joint) = enumerated.joint.get(&(n, n + 1)) else {
            continue;
        };
        for ((s, t), mass) in joint {
            let cond = mass / &enumerated.marg[n - 1][s];
            checker.check(
                "transform-identity",
                format!("{s} -> {t}"),
                &(cond * laws::h_nu(nu, s)),
                &(laws::forward_prob(&gamma, s, t).into_rat() * laws::h_nu(nu, t)),
            );
        }
    }
}
