//! Radix sort tree chains: construction, exact transition laws, harmonic
//! analysis, and seeded simulation.
//!
//! The library has three layers:
//!
//! * combinatorics: [`Word`], [`RadixTree`], the pruning move
//!   [`RadixTree::kappa`], and forward successors;
//! * exact laws over a [`SourceMeasure`]: marginals, forward/backward
//!   transition probabilities, the ratio kernel, harmonic and excessive
//!   functions, Green/occupation quantities (module [`laws`]);
//! * seeded Monte Carlo for chains, bridges and killed chains (module
//!   [`simulate`]) plus a brute-force verification suite (module [`oracle`]).
//!
//! All laws are exact rationals; floats appear only in simulation reports.

pub mod error;
pub mod laws;
pub mod measure;
pub mod oracle;
pub mod prob;
pub mod rng;
pub mod simulate;
pub mod strings;
pub mod tree;
pub mod word;

pub use error::{Error, Result};
pub use measure::{Atom, SourceMeasure};
pub use prob::{Prob, Rat};
pub use strings::{BitStream, EventuallyPeriodic, DEFAULT_PROBE_DEPTH};
pub use tree::{build_radix_tree, separating_prefixes, LabeledRadixTree, Move, RadixTree};
pub use word::Word;
