//! Finite rooted binary trees arising from radix sorting, and the moves of
//! the tree-valued chain.
//!
//! A tree is canonically represented by its sorted leaf set; the vertex set
//! (every prefix of a leaf) is recomputed on demand. Equality of trees is
//! equality of leaf lists.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::strings::BitStream;
use crate::word::Word;

/// A radix sort tree: the element of S_n with the given leaves.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RadixTree {
    leaves: Vec<Word>,
}

/// One forward move of the chain, from some tree `s` to a successor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    /// A new leaf appears at the free sibling slot `w` next to an internal
    /// vertex of `s` (the new input diverged from everything already stored
    /// at an interior branch point).
    AttachSibling { w: Word },
    /// The leaf `y` of `s` splits: the stored input and the new one share the
    /// longer prefix and end up at the sibling pair `deeper`/`other`.
    SplitLeaf { y: Word, deeper: Word, other: Word },
}

impl Move {
    /// Leaves of the successor tree that are new relative to the source.
    pub fn new_leaves(&self) -> Vec<&Word> {
        match self {
            Move::AttachSibling { w } => vec![w],
            Move::SplitLeaf { deeper, other, .. } => vec![deeper, other],
        }
    }
}

impl RadixTree {
    /// The one-leaf tree {root}, the chain's start state.
    pub fn trivial() -> Self {
        RadixTree {
            leaves: vec![Word::root()],
        }
    }

    /// Builds a tree from its leaf set, validating the shape.
    pub fn from_leaves(mut leaves: Vec<Word>) -> Result<Self> {
        leaves.sort();
        if !is_valid_shape(&leaves) {
            let shown: Vec<String> = leaves.iter().map(|w| w.to_string()).collect();
            return Err(Error::InvalidTree(format!(
                "leaf set {{{}}} is not a radix sort tree",
                shown.join(",")
            )));
        }
        Ok(RadixTree { leaves })
    }

    pub fn leaves(&self) -> &[Word] {
        &self.leaves
    }

    /// Number of leaves (the time index of the chain at this state).
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn max_leaf_depth(&self) -> usize {
        self.leaves.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn is_leaf(&self, w: &Word) -> bool {
        self.leaves.binary_search(w).is_ok()
    }

    /// Whether `w` is a vertex, i.e. a prefix of some leaf.
    pub fn is_vertex(&self, w: &Word) -> bool {
        // extensions of w form a contiguous sorted block starting at the
        // first leaf >= w
        let idx = self.leaves.partition_point(|l| l < w);
        idx < self.leaves.len() && w.is_prefix_of(&self.leaves[idx])
    }

    /// Number of leaves extending `w` (including `w` itself if it is a leaf).
    pub fn leaves_extending(&self, w: &Word) -> usize {
        let lo = self.leaves.partition_point(|l| l < w);
        let hi = self
            .leaves
            .partition_point(|l| l < w || w.is_prefix_of(l));
        hi - lo
    }

    /// All vertices: every prefix of every leaf.
    pub fn vertices(&self) -> BTreeSet<Word> {
        let mut out = BTreeSet::new();
        for leaf in &self.leaves {
            for k in 0..=leaf.len() {
                out.insert(leaf.prefix(k));
            }
        }
        out
    }

    /// Vertices that are not leaves.
    pub fn internal_vertices(&self) -> Vec<Word> {
        self.vertices()
            .into_iter()
            .filter(|v| !self.is_leaf(v))
            .collect()
    }

    /// Whether every vertex of `self` is a vertex of `other`.
    pub fn is_subtree_of(&self, other: &RadixTree) -> bool {
        self.leaves.iter().all(|l| other.is_vertex(l))
    }

    /// The backward pruning move: remove the leaf `v`.
    ///
    /// If `v`'s sibling is an internal vertex the leaf is simply dropped. If
    /// the sibling is also a leaf, both go, and the pair's stub is retracted
    /// toward the root until a vertex with a present sibling (or the root)
    /// becomes the new leaf. This inverts the forward split move for every
    /// split depth.
    pub fn kappa(&self, v: &Word) -> Result<RadixTree> {
        if self.leaf_count() == 1 {
            return Err(Error::Underflow);
        }
        if !self.is_leaf(v) {
            return Err(Error::NotALeaf {
                word: v.to_string(),
            });
        }
        let sib = v.sibling().expect("non-root leaf");
        let mut leaves = self.leaves.clone();
        if self.is_leaf(&sib) {
            let mut c = v.parent().expect("non-root leaf");
            while !c.is_empty() {
                let csib = c.sibling().expect("non-root vertex");
                if self.is_vertex(&csib) {
                    break;
                }
                c = c.parent().expect("non-root vertex");
            }
            leaves.retain(|l| l != v && l != &sib);
            leaves.push(c);
        } else {
            debug_assert!(self.is_vertex(&sib), "leaf sibling missing from tree");
            leaves.retain(|l| l != v);
        }
        RadixTree::from_leaves(leaves)
    }

    /// All one-step successors, with split depths capped at `depth_cap`.
    ///
    /// Attach moves are finite and always complete; split moves below depth
    /// `depth_cap` are omitted (their total probability mass is available in
    /// closed form from the transition laws).
    pub fn forward_successors(&self, depth_cap: usize) -> Result<Vec<(RadixTree, Move)>> {
        if depth_cap < self.max_leaf_depth() {
            return Err(Error::CapTooSmall {
                cap: depth_cap,
                required: self.max_leaf_depth(),
            });
        }
        let mut out = Vec::new();
        for x in self.internal_vertices() {
            for bit in [0, 1] {
                let w = x.child(bit);
                if !self.is_vertex(&w) {
                    let mut leaves = self.leaves.clone();
                    leaves.push(w.clone());
                    out.push((
                        RadixTree::from_leaves(leaves).expect("attach preserves shape"),
                        Move::AttachSibling { w },
                    ));
                }
            }
        }
        for y in &self.leaves {
            for p in 1..=depth_cap.saturating_sub(y.len()) {
                // every interior word u of length p-1 gives the sibling pair
                // y.u0 / y.u1
                for u in words_of_len(p - 1) {
                    let stem = y.concat(&u);
                    let deeper = stem.child(0);
                    let other = stem.child(1);
                    let mut leaves = self.leaves.clone();
                    leaves.retain(|l| l != y);
                    leaves.push(deeper.clone());
                    leaves.push(other.clone());
                    out.push((
                        RadixTree::from_leaves(leaves).expect("split preserves shape"),
                        Move::SplitLeaf {
                            y: y.clone(),
                            deeper,
                            other,
                        },
                    ));
                }
            }
        }
        Ok(out)
    }

    /// Classifies `t` as a one-step successor of `self`, if it is one.
    pub fn classify_move(&self, t: &RadixTree) -> Option<Move> {
        if t.leaf_count() != self.leaf_count() + 1 {
            return None;
        }
        let mine: BTreeSet<&Word> = self.leaves.iter().collect();
        let theirs: BTreeSet<&Word> = t.leaves.iter().collect();
        let added: Vec<&Word> = theirs.difference(&mine).copied().collect();
        let removed: Vec<&Word> = mine.difference(&theirs).copied().collect();
        match (added.as_slice(), removed.as_slice()) {
            ([w], []) => {
                let sib = w.sibling()?;
                if self.is_vertex(&sib) {
                    debug_assert!(!self.is_leaf(&sib), "free slot next to a leaf");
                    Some(Move::AttachSibling { w: (*w).clone() })
                } else {
                    None
                }
            }
            ([a, b], [y]) => {
                if a.sibling().as_ref() == Some(b)
                    && y.is_strict_prefix_of(a)
                    && y.is_strict_prefix_of(b)
                {
                    Some(Move::SplitLeaf {
                        y: (*y).clone(),
                        deeper: (*a).clone(),
                        other: (*b).clone(),
                    })
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

/// Interior words of a given length, in lexicographic order.
fn words_of_len(len: usize) -> Vec<Word> {
    let mut out = Vec::with_capacity(1 << len);
    let mut bits = vec![0u8; len];
    loop {
        out.push(Word::from_bits(&bits));
        // increment as a binary counter
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if bits[i] == 0 {
                bits[i] = 1;
                break;
            }
            bits[i] = 0;
        }
    }
}

/// The shape criterion for membership in S_n, as a total function over any
/// nonempty leaf set: an antichain in which every leaf's sibling word is a
/// vertex (the one-leaf tree {root} trivially qualifies).
pub fn is_valid_shape(leaves: &[Word]) -> bool {
    if leaves.is_empty() {
        return false;
    }
    let sorted: Vec<Word>;
    let sorted_leaves: &[Word] = if leaves.windows(2).all(|w| w[0] < w[1]) {
        leaves
    } else {
        let mut v = leaves.to_vec();
        v.sort();
        sorted = v;
        &sorted
    };
    // antichain: in this sort order a prefix lands right before its
    // extensions, so adjacent checks suffice
    if sorted_leaves
        .windows(2)
        .any(|w| w[0].is_prefix_of(&w[1]))
    {
        return false;
    }
    let is_vertex = |w: &Word| {
        let idx = sorted_leaves.partition_point(|l| l < w);
        idx < sorted_leaves.len() && w.is_prefix_of(&sorted_leaves[idx])
    };
    sorted_leaves.iter().all(|leaf| match leaf.sibling() {
        Some(sib) => is_vertex(&sib),
        None => sorted_leaves.len() == 1,
    })
}

/// The separating prefixes of pairwise distinct strings: for each input, its
/// shortest prefix different from the equal-length prefix of every other.
///
/// `probe_cap` bounds how deep two streams are compared before they are
/// declared duplicates; streams that can decide equality exactly (eventually
/// periodic atoms) advertise a tighter bound and get an exact answer.
pub fn separating_prefixes<S: BitStream>(strings: &[S], probe_cap: usize) -> Result<Vec<Word>> {
    assert!(!strings.is_empty(), "need at least one input string");
    let n = strings.len();
    if n == 1 {
        return Ok(vec![Word::root()]);
    }
    // H[j] = 1 + max over k != j of the first index where j and k differ
    let mut depth = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            // exact bounds (eventually periodic atoms) override the cap
            let bound = strings[i].decision_bound(&strings[j]).unwrap_or(probe_cap);
            let sep = (0..bound).find(|&k| strings[i].bit_at(k) != strings[j].bit_at(k));
            match sep {
                Some(k) => {
                    depth[i] = depth[i].max(k + 1);
                    depth[j] = depth[j].max(k + 1);
                }
                None => return Err(Error::DuplicateInput { i, j, depth: bound }),
            }
        }
    }
    Ok((0..n).map(|j| strings[j].prefix(depth[j])).collect())
}

/// The radix sort tree storing the given pairwise distinct strings.
pub fn build_radix_tree<S: BitStream>(strings: &[S], probe_cap: usize) -> Result<RadixTree> {
    let zeta = separating_prefixes(strings, probe_cap)?;
    let tree = RadixTree::from_leaves(zeta).expect("separating prefixes form a radix tree");
    debug_assert_eq!(tree.leaf_count(), strings.len());
    Ok(tree)
}

/// Incremental construction of the chain R_1, R_2, ... by inserting one
/// string at a time. Bits are pulled on demand through a callback
/// `(string index, bit index) -> bit`, so lazily sampled strings extend only
/// as far as separation requires.
#[derive(Clone, Debug, Default)]
pub struct TrieBuilder {
    leaves: BTreeSet<Word>,
    owner_of: Vec<(Word, usize)>, // sorted by word, parallel to leaves
    leaf_of: Vec<Word>,           // per string index
}

impl TrieBuilder {
    pub fn new() -> Self {
        TrieBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.leaf_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaf_of.is_empty()
    }

    /// Current leaf of each inserted string, indexed by insertion order.
    pub fn leaf_of(&self, string: usize) -> &Word {
        &self.leaf_of[string]
    }

    pub fn tree(&self) -> RadixTree {
        RadixTree {
            leaves: self.leaves.iter().cloned().collect(),
        }
    }

    fn owner(&self, w: &Word) -> usize {
        let idx = self
            .owner_of
            .binary_search_by(|(l, _)| l.cmp(w))
            .expect("owner of leaf");
        self.owner_of[idx].1
    }

    fn set_leaf(&mut self, string: usize, w: Word) {
        self.leaves.insert(w.clone());
        let idx = self
            .owner_of
            .binary_search_by(|(l, _)| l.cmp(&w))
            .unwrap_err();
        self.owner_of.insert(idx, (w.clone(), string));
        if string == self.leaf_of.len() {
            self.leaf_of.push(w);
        } else {
            self.leaf_of[string] = w;
        }
    }

    fn remove_leaf(&mut self, w: &Word) {
        self.leaves.remove(w);
        let idx = self
            .owner_of
            .binary_search_by(|(l, _)| l.cmp(w))
            .expect("removing a leaf");
        self.owner_of.remove(idx);
    }

    /// Is `w` a proper prefix of some stored leaf?
    fn is_internal(&self, w: &Word) -> bool {
        self.leaves
            .range(w.clone()..)
            .next()
            .is_some_and(|l| w.is_strict_prefix_of(l))
    }

    /// Inserts the next string; its index is the current count.
    ///
    /// Fails with `SeparationDepthExceeded` if the new string agrees with a
    /// stored one past `probe_cap` bits.
    pub fn insert(
        &mut self,
        mut bit: impl FnMut(usize, usize) -> u8,
        probe_cap: usize,
    ) -> Result<()> {
        let k = self.leaf_of.len();
        if k == 0 {
            self.set_leaf(0, Word::root());
            return Ok(());
        }
        let mut w = Word::root();
        loop {
            if self.leaves.contains(&w) {
                // collision with the string stored at w: extend both until
                // they part ways
                let j = self.owner(&w);
                let mut d = w.len();
                while bit(j, d) == bit(k, d) {
                    d += 1;
                    if d > probe_cap {
                        return Err(Error::SeparationDepthExceeded { depth: probe_cap });
                    }
                }
                let mut bits_j = Vec::with_capacity(d + 1);
                let mut bits_k = Vec::with_capacity(d + 1);
                for i in 0..=d {
                    bits_j.push(bit(j, i));
                    bits_k.push(bit(k, i));
                }
                self.remove_leaf(&w);
                self.set_leaf(j, Word::from_bits(&bits_j));
                self.set_leaf(k, Word::from_bits(&bits_k));
                return Ok(());
            }
            if self.is_internal(&w) {
                let next = bit(k, w.len());
                w = w.child(next);
            } else {
                self.set_leaf(k, w);
                return Ok(());
            }
        }
    }
}

impl fmt::Display for RadixTree {
    /// Comma-separated leaf words, `e` for the root, e.g. `00,01,1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, leaf) in self.leaves.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{leaf}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for RadixTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadixTree({self})")
    }
}

impl FromStr for RadixTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let leaves = s
            .split(',')
            .map(|part| part.trim().parse::<Word>())
            .collect::<Result<Vec<Word>>>()?;
        RadixTree::from_leaves(leaves)
    }
}

impl Serialize for RadixTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("RadixTree", 1)?;
        st.serialize_field("leaves", &self.leaves)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for RadixTree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            leaves: Vec<Word>,
        }
        let raw = Raw::deserialize(deserializer)?;
        RadixTree::from_leaves(raw.leaves).map_err(serde::de::Error::custom)
    }
}

/// A radix tree with leaves labeled bijectively by 1..=n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledRadixTree {
    tree: RadixTree,
    label_to_leaf: Vec<Word>, // position i holds the leaf labeled i+1
}

impl LabeledRadixTree {
    pub fn new(tree: RadixTree, label_to_leaf: Vec<Word>) -> Result<Self> {
        let mut sorted = label_to_leaf.clone();
        sorted.sort();
        if sorted != tree.leaves() {
            return Err(Error::InvalidTree(
                "labels are not a bijection onto the leaf set".to_string(),
            ));
        }
        Ok(LabeledRadixTree {
            tree,
            label_to_leaf,
        })
    }

    pub fn tree(&self) -> &RadixTree {
        &self.tree
    }

    pub fn leaf_count(&self) -> usize {
        self.tree.leaf_count()
    }

    /// Leaf carrying the 1-based label.
    pub fn leaf_with_label(&self, label: usize) -> &Word {
        &self.label_to_leaf[label - 1]
    }

    pub fn label_of(&self, leaf: &Word) -> Option<usize> {
        self.label_to_leaf.iter().position(|l| l == leaf).map(|i| i + 1)
    }

    /// Removes the highest-labeled leaf by the pruning move. A collapsed
    /// sibling pair's replacement leaf inherits the surviving sibling's
    /// label; all other labels stay put.
    pub fn prune_highest(&self) -> Result<LabeledRadixTree> {
        let n = self.leaf_count();
        if n == 1 {
            return Err(Error::Underflow);
        }
        let v = self.leaf_with_label(n).clone();
        let next = self.tree.kappa(&v)?;
        let sib = v.sibling().expect("non-root leaf");
        let mut labels = self.label_to_leaf[..n - 1].to_vec();
        if self.tree.is_leaf(&sib) {
            // the new leaf is the one vertex of `next` that was not a leaf
            // of the old tree; find it as the leaf replacing the pair
            let new_leaf = next
                .leaves()
                .iter()
                .find(|l| !self.tree.is_leaf(l))
                .expect("collapse creates one new leaf")
                .clone();
            let k = self
                .label_of(&sib)
                .expect("sibling leaf carries a label");
            labels[k - 1] = new_leaf;
        }
        LabeledRadixTree::new(next, labels)
    }
}
