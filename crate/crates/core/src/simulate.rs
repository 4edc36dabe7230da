//! Seeded Monte Carlo for radix sort tree chains.
//!
//! Replica r always draws from the stream derived from `(seed, r)`, so every
//! result is reproducible byte for byte regardless of thread count; float
//! aggregation walks replicas in index order.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laws::dm_kernel;
use crate::measure::{LazySampler, SourceMeasure};
use crate::prob::{rat_to_f64, Rat};
use crate::rng::{categorical_exact, replica_rng};
use crate::strings::{BitStream, EventuallyPeriodic, DEFAULT_PROBE_DEPTH};
use crate::tree::{LabeledRadixTree, RadixTree, TrieBuilder};
use crate::word::Word;

/// One realized trajectory R_1, ..., R_k, possibly ending at the cemetery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainPath {
    trees: Vec<RadixTree>,
    labels: Option<Vec<Vec<Word>>>, // step m (0-based) holds leaves labeled 1..=m+1
    killed: bool,
}

impl ChainPath {
    /// Validates the trajectory: starts at the trivial tree, every step is a
    /// legal forward move, labels (if any) are per-step bijections.
    pub fn new(
        trees: Vec<RadixTree>,
        labels: Option<Vec<Vec<Word>>>,
        killed: bool,
    ) -> Result<Self> {
        if trees.first() != Some(&RadixTree::trivial()) {
            return Err(Error::InvalidTree(
                "a chain path starts at the trivial tree".to_string(),
            ));
        }
        for pair in trees.windows(2) {
            if pair[0].classify_move(&pair[1]).is_none() {
                return Err(Error::InvalidTree(format!(
                    "{} -> {} is not a legal forward move",
                    pair[0], pair[1]
                )));
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != trees.len() {
                return Err(Error::InvalidTree("one labeling per step".to_string()));
            }
            for (m, step) in labels.iter().enumerate() {
                LabeledRadixTree::new(trees[m].clone(), step.clone())?;
            }
        }
        Ok(ChainPath {
            trees,
            labels,
            killed,
        })
    }

    pub fn trees(&self) -> &[RadixTree] {
        &self.trees
    }

    pub fn last(&self) -> &RadixTree {
        self.trees.last().expect("paths are nonempty")
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Whether the path ended at the cemetery (kill time = len + 1).
    pub fn killed(&self) -> bool {
        self.killed
    }

    pub fn labels(&self) -> Option<&[Vec<Word>]> {
        self.labels.as_deref()
    }

    /// Extracts the per-label leaf positions over time.
    pub fn label_trace(&self) -> Option<LabelTrace> {
        let labels = self.labels.as_ref()?;
        let n = labels.len();
        let mut per_label = Vec::with_capacity(n);
        for i in 1..=n {
            let mut row = Vec::with_capacity(n - i + 1);
            for step in labels[(i - 1)..].iter() {
                row.push(step[i - 1].clone());
            }
            per_label.push(row);
        }
        Some(LabelTrace { per_label })
    }
}

/// The positions `<i>_m` of each label i over time m = i, ..., n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelTrace {
    per_label: Vec<Vec<Word>>, // per_label[i-1][m-i] = leaf labeled i at time m
}

impl LabelTrace {
    pub fn label_count(&self) -> usize {
        self.per_label.len()
    }

    /// Leaf labeled `i` at time `m` (both 1-based, m >= i).
    pub fn position(&self, i: usize, m: usize) -> &Word {
        &self.per_label[i - 1][m - i]
    }

    /// Final position of label `i`.
    pub fn last_position(&self, i: usize) -> &Word {
        self.per_label[i - 1].last().expect("nonempty trace")
    }

    /// Every label's position only ever extends: `<i>_m <= <i>_{m+1}`.
    pub fn is_monotone(&self) -> bool {
        self.per_label.iter().all(|row| {
            row.windows(2).all(|w| w[0].is_prefix_of(&w[1]))
        })
    }

    /// For i != j the meet `<i>_m /\ <j>_m` never changes once both labels
    /// exist (m >= max(i,j)).
    pub fn meets_are_stable(&self) -> bool {
        let n = self.label_count();
        for i in 1..=n {
            for j in (i + 1)..=n {
                let first = self.position(i, j).meet(self.position(j, j));
                for m in j..=n {
                    if self.position(i, m).meet(self.position(j, m)) != first {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// One lazily realized draw from a measure: either a known atom or a bitwise
/// realization of a diffuse component.
enum Draw<'m> {
    Atom(usize, EventuallyPeriodic),
    Diffuse(LazySampler<'m>),
}

impl Draw<'_> {
    fn bit_at(&mut self, i: usize, rng: &mut ChaCha12Rng) -> u8 {
        match self {
            Draw::Atom(_, s) => s.bit_at(i),
            Draw::Diffuse(s) => s
                .bit_at(i, rng)
                .expect("sampled prefixes have positive mass"),
        }
    }
}

/// Draws the component (atom index or diffuse part) of the next string.
fn draw_string<'m>(nu: &'m SourceMeasure, rng: &mut ChaCha12Rng) -> Draw<'m> {
    let atoms = nu.atoms();
    let parts = nu.diffuse_parts();
    if atoms.is_empty() && parts.len() == 1 {
        return Draw::Diffuse(parts[0].1.sampler());
    }
    let weights: Vec<Rat> = atoms
        .iter()
        .map(|(_, m)| m.clone())
        .chain(parts.iter().map(|(w, _)| w.clone()))
        .collect();
    let idx = categorical_exact(&weights, rng);
    if idx < atoms.len() {
        Draw::Atom(idx, atoms[idx].0.clone())
    } else {
        Draw::Diffuse(parts[idx - atoms.len()].1.sampler())
    }
}

fn require_diffuse(nu: &SourceMeasure) -> Result<()> {
    if nu.is_diffuse() {
        Ok(())
    } else {
        Err(Error::NotDiffuse)
    }
}

/// Grows an n-string trie, invoking the observer after every insertion with
/// the current size k and builder state.
fn grow_trie(
    nu: &SourceMeasure,
    n: usize,
    rng: &mut ChaCha12Rng,
    mut observe: impl FnMut(usize, &TrieBuilder),
) -> Result<TrieBuilder> {
    assert!(n >= 1);
    let mut draws: Vec<Draw<'_>> = Vec::with_capacity(n);
    let mut builder = TrieBuilder::new();
    for k in 1..=n {
        draws.push(draw_string(nu, rng));
        builder.insert(|s, i| draws[s].bit_at(i, rng), DEFAULT_PROBE_DEPTH)?;
        observe(k, &builder);
    }
    Ok(builder)
}

fn record_step(trees: &mut Vec<RadixTree>, labels: &mut Vec<Vec<Word>>, builder: &TrieBuilder) {
    trees.push(builder.tree());
    labels.push(
        (0..builder.len())
            .map(|s| builder.leaf_of(s).clone())
            .collect(),
    );
}

/// Samples the chain R_1, ..., R_n for a diffuse source.
pub fn sample_chain(nu: &SourceMeasure, n: usize, seed: u64) -> Result<ChainPath> {
    sample_chain_with(nu, n, &mut replica_rng(seed, 0))
}

pub fn sample_chain_with(
    nu: &SourceMeasure,
    n: usize,
    rng: &mut ChaCha12Rng,
) -> Result<ChainPath> {
    require_diffuse(nu)?;
    let mut trees = Vec::with_capacity(n);
    grow_trie(nu, n, rng, |_, b| trees.push(b.tree()))?;
    ChainPath::new(trees, None, false)
}

/// Samples the chain together with its input labeling: the leaf storing the
/// i-th input carries label i.
pub fn sample_labeled_chain(
    nu: &SourceMeasure,
    n: usize,
    seed: u64,
) -> Result<(ChainPath, LabelTrace)> {
    sample_labeled_chain_with(nu, n, &mut replica_rng(seed, 0))
}

pub fn sample_labeled_chain_with(
    nu: &SourceMeasure,
    n: usize,
    rng: &mut ChaCha12Rng,
) -> Result<(ChainPath, LabelTrace)> {
    require_diffuse(nu)?;
    let mut trees = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    grow_trie(nu, n, rng, |_, b| record_step(&mut trees, &mut labels, b))?;
    let path = ChainPath::new(trees, Some(labels), false)?;
    let trace = path.label_trace().expect("labels recorded");
    Ok((path, trace))
}

/// Samples only the terminal tree R_n (no intermediate snapshots).
pub fn sample_terminal_trie(
    nu: &SourceMeasure,
    n: usize,
    rng: &mut ChaCha12Rng,
) -> Result<RadixTree> {
    require_diffuse(nu)?;
    let builder = grow_trie(nu, n, rng, |_, _| {})?;
    Ok(builder.tree())
}

/// Samples the bridge to `t`: labels the leaves uniformly, then repeatedly
/// prunes the highest label. Returned in forward order, ending at `t`.
pub fn sample_bridge(t: &RadixTree, seed: u64) -> Result<ChainPath> {
    sample_bridge_with(t, &mut replica_rng(seed, 0))
}

pub fn sample_bridge_with(t: &RadixTree, rng: &mut ChaCha12Rng) -> Result<ChainPath> {
    let m = t.leaf_count();
    let mut label_to_leaf: Vec<Word> = t.leaves().to_vec();
    label_to_leaf.shuffle(rng);
    let mut labeled = LabeledRadixTree::new(t.clone(), label_to_leaf)?;
    let mut trees = vec![t.clone()];
    let mut labels = vec![(1..=m)
        .map(|i| labeled.leaf_with_label(i).clone())
        .collect::<Vec<_>>()];
    while labeled.leaf_count() > 1 {
        labeled = labeled.prune_highest()?;
        trees.push(labeled.tree().clone());
        labels.push(
            (1..=labeled.leaf_count())
                .map(|i| labeled.leaf_with_label(i).clone())
                .collect(),
        );
    }
    trees.reverse();
    labels.reverse();
    ChainPath::new(trees, Some(labels), false)
}

/// Runs the killed chain: strings are drawn from `nu` until one duplicates a
/// previous draw (exactly detectable for atoms), at which point the path ends
/// at the cemetery; stops alive at `max_n` otherwise.
pub fn sample_killed_chain(nu: &SourceMeasure, seed: u64, max_n: usize) -> Result<ChainPath> {
    sample_killed_chain_with(nu, max_n, &mut replica_rng(seed, 0))
}

pub fn sample_killed_chain_with(
    nu: &SourceMeasure,
    max_n: usize,
    rng: &mut ChaCha12Rng,
) -> Result<ChainPath> {
    assert!(max_n >= 1);
    let mut draws: Vec<Draw<'_>> = Vec::new();
    let mut builder = TrieBuilder::new();
    let mut trees = Vec::new();
    for _ in 0..max_n {
        let next = draw_string(nu, rng);
        if let Draw::Atom(idx, _) = &next {
            let dup = draws
                .iter()
                .any(|d| matches!(d, Draw::Atom(prev, _) if prev == idx));
            if dup {
                return ChainPath::new(trees, None, true);
            }
        }
        draws.push(next);
        builder.insert(|s, i| draws[s].bit_at(i, rng), DEFAULT_PROBE_DEPTH)?;
        trees.push(builder.tree());
    }
    ChainPath::new(trees, None, false)
}

/// Fraction of leaves extending `y`: the tail estimator of the cylinder
/// mass from a single tree.
pub fn cylinder_frequency(tree: &RadixTree, y: &Word) -> f64 {
    tree.leaves_extending(y) as f64 / tree.leaf_count() as f64
}

/// A cylinder estimate averaged over replicas, next to the exact mass.
#[derive(Clone, Debug)]
pub struct CylinderEstimate {
    pub y: Word,
    pub estimate: f64,
    pub exact: f64,
}

/// Estimates cylinder masses from the leaf frequencies of terminal trees of
/// size `n`, averaged over `replicas` independent runs.
pub fn estimate_cylinders(
    nu: &SourceMeasure,
    n: usize,
    replicas: u64,
    seed: u64,
    ys: &[Word],
) -> Result<Vec<CylinderEstimate>> {
    require_diffuse(nu)?;
    let trees: Vec<RadixTree> = (0..replicas)
        .into_par_iter()
        .map(|r| sample_terminal_trie(nu, n, &mut replica_rng(seed, r)))
        .collect::<Result<_>>()?;
    Ok(ys
        .iter()
        .map(|y| {
            let mean = trees.iter().map(|t| cylinder_frequency(t, y)).sum::<f64>()
                / replicas as f64;
            CylinderEstimate {
                y: y.clone(),
                estimate: mean,
                exact: nu.cylinder_mass(y).to_f64(),
            }
        })
        .collect())
}

/// Kernel statistics along simulated chains at one checkpoint.
#[derive(Clone, Debug)]
pub struct ConvergencePoint {
    pub k: usize,
    pub mean: f64,
    pub sd: f64,
}

/// Default geometric checkpoint grid 1, 2, 4, ..., n.
pub fn default_checkpoints(n: usize) -> Vec<usize> {
    let mut ks = Vec::new();
    let mut k = 1;
    while k < n {
        ks.push(k);
        k *= 2;
    }
    ks.push(n);
    ks
}

/// Tracks K(s, R_k) along chains driven by `nu` at the given checkpoints:
/// per-checkpoint mean and standard deviation over replicas. The kernel
/// values concentrate at h_nu(s) as k grows.
pub fn kernel_convergence(
    nu: &SourceMeasure,
    s: &RadixTree,
    n: usize,
    replicas: u64,
    seed: u64,
    checkpoints: &[usize],
) -> Result<Vec<ConvergencePoint>> {
    require_diffuse(nu)?;
    assert!(checkpoints.iter().all(|&k| k >= 1 && k <= n));
    let per_replica: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|r| -> Result<Vec<f64>> {
            let mut vals = Vec::with_capacity(checkpoints.len());
            grow_trie(nu, n, &mut replica_rng(seed, r), |k, b| {
                if checkpoints.contains(&k) {
                    vals.push(rat_to_f64(&dm_kernel(s, &b.tree())));
                }
            })?;
            Ok(vals)
        })
        .collect::<Result<_>>()?;
    Ok(checkpoints
        .iter()
        .enumerate()
        .map(|(ci, &k)| {
            let xs: Vec<f64> = per_replica.iter().map(|v| v[ci]).collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
                / xs.len() as f64;
            ConvergencePoint {
                k,
                mean,
                sd: var.sqrt(),
            }
        })
        .collect())
}

/// Counts how often each full path shows up among killed-chain replicas.
/// Paths are keyed by their display form, `+` marking a cemetery ending.
pub fn killed_path_frequencies(
    nu: &SourceMeasure,
    replicas: u64,
    seed: u64,
    max_n: usize,
) -> Result<Vec<(String, f64)>> {
    let keys: Vec<String> = (0..replicas)
        .into_par_iter()
        .map(|r| -> Result<String> {
            let path = sample_killed_chain_with(nu, max_n, &mut replica_rng(seed, r))?;
            Ok(path_key(&path))
        })
        .collect::<Result<_>>()?;
    let mut counts: std::collections::BTreeMap<String, u64> = Default::default();
    for k in keys {
        *counts.entry(k).or_default() += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / replicas as f64))
        .collect())
}

/// Stable text key for a path: trees joined by `|`, `+` if killed.
pub fn path_key(path: &ChainPath) -> String {
    let mut key = path
        .trees()
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join("|");
    if path.killed() {
        key.push('+');
    }
    key
}
