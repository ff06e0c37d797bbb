//! Ranking the nodes of a graph from a random subsample of pairwise
//! preferences.
//!
//! The core learner ([`ranking::pref_rank`]) embeds node *pairs* through a
//! graph kernel lifted to the pair level (Kronecker or pairwise-difference),
//! fits a bias-free SVM on the observed pairs, scores every pair and turns
//! the scores into a node ranking by win counting.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | dense graphs, pair indexing, synthetic generators, RBF graphs, file readers |
//! | [`spectral`] | symmetric eigendecomposition, pseudoinverse, PSD checks |
//! | [`kernels`] | LS-labelling and Laplacian node kernels, pair kernels |
//! | [`svm`] | box-constrained dual solver |
//! | [`ranking`] | sampling, the ranking pipeline, losses and errors |
//! | [`baselines`] | Rank Centrality and Graph Rank |
//! | [`analysis`] | Rademacher bounds, generalization bounds, sample complexity |
//! | [`experiment`] | sweeps over sampled fractions with CSV output |
//!
//! ```
//! use prefrank::graph::gen_union_cliques;
//! use prefrank::ranking::{pref_rank, sample_pairs, Embedding, PreferenceVector};
//!
//! let g = gen_union_cliques(6, 2).unwrap();
//! let pref = PreferenceVector::full(vec![6.0, 5.0, 4.0, 3.0, 2.0, 1.0]).unwrap();
//! let sample = sample_pairs(6, 1.0, &pref, 7).unwrap();
//! let out = pref_rank(&g, Embedding::LsKron, &sample, 1.0).unwrap();
//! assert_eq!(out.ranking.ranks().len(), 6);
//! ```

pub mod analysis;
pub mod baselines;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod kernels;
pub mod ranking;
pub mod rng;
pub mod spectral;
pub mod svm;

pub use error::{Error, Result};
