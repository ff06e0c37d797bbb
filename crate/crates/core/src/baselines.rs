//! Comparison methods: Rank Centrality and Graph Rank.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::{Graph, PairIndex};
use crate::ranking::{pref_rank, Embedding, PrefRankOutput, PreferenceSample, Ranking};

pub const DEFAULT_DAMPING: f64 = 0.01;
pub const POWER_TOL: f64 = 1e-10;
pub const POWER_MAX_ITER: usize = 100_000;
/// Stationary probabilities are compared on this grid so that rounding
/// noise does not reorder nodes with equal mass.
const TIE_GRID: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    /// Row-stochastic transition matrix.
    pub transition: Array2<f64>,
    pub stationary: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankCentralityOutput {
    pub chain: MarkovChain,
    pub ranking: Ranking,
}

impl RankCentralityOutput {
    /// `π_i − π_j` for every pair, in pair-index order.
    pub fn pair_scores(&self) -> Vec<f64> {
        let pi = &self.chain.stationary;
        PairIndex::new(pi.len()).iter().map(|(i, j)| pi[i] - pi[j]).collect()
    }
}

/// Rank Centrality on the labelled pairs of a sample.
pub fn rank_centrality(n: usize, sample: &PreferenceSample, damping: f64) -> Result<RankCentralityOutput> {
    if sample.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: sample.n(),
        });
    }
    let index = PairIndex::new(n);
    let comparisons: Vec<(usize, usize)> = sample
        .indices()
        .iter()
        .zip(sample.labels())
        .map(|(&k, &y)| {
            let (i, j) = index.pair(k);
            if y > 0 {
                (i, j)
            } else {
                (j, i)
            }
        })
        .collect();
    rank_centrality_from_comparisons(n, &comparisons, damping)
}

/// Rank Centrality from `(winner, loser)` observations.
///
/// A walker at `l` moves to `w` with probability `a_lw / d_max`, where
/// `a_lw` is the fraction of `l`–`w` comparisons won by `w` and `d_max` the
/// largest number of distinct opponents of any node; the remaining mass
/// stays on `l`. The chain is then mixed with the uniform chain.
pub fn rank_centrality_from_comparisons(
    n: usize,
    comparisons: &[(usize, usize)],
    damping: f64,
) -> Result<RankCentralityOutput> {
    if !(0.0..=1.0).contains(&damping) {
        return Err(Error::invalid(format!("damping {damping} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::invalid("rank centrality needs n >= 1"));
    }
    let mut wins = Array2::<f64>::zeros((n, n));
    for &(w, l) in comparisons {
        if w >= n || l >= n || w == l {
            return Err(Error::invalid(format!("bad comparison ({w}, {l}) for n = {n}")));
        }
        wins[[w, l]] += 1.0;
    }
    let opponents: Vec<usize> = (0..n)
        .map(|i| (0..n).filter(|&j| wins[[i, j]] + wins[[j, i]] > 0.0).count())
        .collect();
    let d_max = opponents.iter().copied().max().unwrap_or(0).max(1) as f64;

    let mut p = Array2::<f64>::zeros((n, n));
    for l in 0..n {
        let mut off = 0.0;
        for w in 0..n {
            let total = wins[[w, l]] + wins[[l, w]];
            if w != l && total > 0.0 {
                let v = wins[[w, l]] / total / d_max;
                p[[l, w]] = v;
                off += v;
            }
        }
        p[[l, l]] = 1.0 - off;
    }
    let uniform = 1.0 / n as f64;
    p.mapv_inplace(|x| (1.0 - damping) * x + damping * uniform);

    let mut pi = vec![uniform; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < POWER_MAX_ITER {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (i, &pi_i) in pi.iter().enumerate() {
            if pi_i != 0.0 {
                for (x, &t) in next.iter_mut().zip(p.row(i)) {
                    *x += pi_i * t;
                }
            }
        }
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= s);
        let delta: f64 = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        iterations += 1;
        if delta <= POWER_TOL {
            converged = true;
            break;
        }
    }
    let keys: Vec<f64> = pi.iter().map(|x| (x / TIE_GRID).round()).collect();
    Ok(RankCentralityOutput {
        ranking: Ranking::from_scores(&keys),
        chain: MarkovChain {
            transition: p,
            stationary: pi,
            iterations,
            converged,
        },
    })
}

/// Laplacian-regularized pairwise SVM: the pipeline with the Laplacian
/// kernel and the pairwise-difference lift.
pub fn graph_rank(g: &Graph, sample: &PreferenceSample, c: f64) -> Result<PrefRankOutput> {
    pref_rank(g, Embedding::LapPd, sample, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng as _;
    use crate::graph::gen_complete;
    use crate::ranking::{sample_pairs, PreferenceVector};

    fn ranks(out: &RankCentralityOutput) -> Vec<usize> {
        out.ranking.ranks().to_vec()
    }

    #[test]
    fn three_node_total_order() {
        let out = rank_centrality_from_comparisons(3, &[(0, 1), (0, 2), (1, 2)], DEFAULT_DAMPING).unwrap();
        assert_eq!(ranks(&out), vec![1, 2, 3]);
        assert!(out.chain.converged);
        for row in out.chain.transition.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-10);
        }
        let pi = &out.chain.stationary;
        assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // stationarity
        for j in 0..3 {
            let s: f64 = (0..3).map(|i| pi[i] * out.chain.transition[[i, j]]).sum();
            assert!((s - pi[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn no_comparisons_gives_uniform_and_identity() {
        let out = rank_centrality_from_comparisons(4, &[], DEFAULT_DAMPING).unwrap();
        assert!(out.chain.stationary.iter().all(|&p| (p - 0.25).abs() < 1e-12));
        assert_eq!(ranks(&out), vec![1, 2, 3, 4]);
    }

    #[test]
    fn two_state_closed_form() {
        // P = (1-δ)[[1,0],[1,0]] + δ/2 J, so π_1 = δ/2
        let d = DEFAULT_DAMPING;
        let out = rank_centrality_from_comparisons(2, &[(0, 1)], d).unwrap();
        assert!((out.chain.stationary[1] - d / 2.0).abs() < 1e-9);
        assert_eq!(ranks(&out), vec![1, 2]);
        let out = rank_centrality_from_comparisons(2, &[(1, 0)], d).unwrap();
        assert_eq!(ranks(&out), vec![2, 1]);
    }

    #[test]
    fn duplicates_do_not_change_the_chain() {
        let once = [(0, 1), (2, 1), (3, 0), (3, 2)];
        let twice: Vec<_> = once.iter().chain(once.iter()).copied().collect();
        let a = rank_centrality_from_comparisons(4, &once, DEFAULT_DAMPING).unwrap();
        let b = rank_centrality_from_comparisons(4, &twice, DEFAULT_DAMPING).unwrap();
        assert_eq!(a.ranking, b.ranking);
        assert_eq!(a.chain.transition, b.chain.transition);
    }

    #[test]
    fn sample_driven_rank_centrality() {
        let pref = PreferenceVector::full(vec![0.3, 0.9, 0.1, 0.5]).unwrap();
        let s = sample_pairs(4, 1.0, &pref, 0).unwrap();
        let out = rank_centrality(4, &s, DEFAULT_DAMPING).unwrap();
        assert_eq!(out.ranking, pref.ranking());
        let scores = out.pair_scores();
        assert!(scores[0] < 0.0);
        assert!(rank_centrality(5, &s, DEFAULT_DAMPING).is_err());
    }

    #[test]
    fn graph_rank_on_single_edge() {
        let g = gen_complete(2);
        let pref = PreferenceVector::full(vec![2.0, 1.0]).unwrap();
        let s = sample_pairs(2, 1.0, &pref, 0).unwrap();
        let out = graph_rank(&g, &s, 1.0).unwrap();
        assert!(out.scores[0].is_finite() && out.scores[0] > 0.0);
        assert_eq!(out.ranking.ranks(), &[1, 2]);
        let direct = pref_rank(&g, Embedding::LapPd, &s, 1.0).unwrap();
        assert_eq!(direct.scores, out.scores);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn chain_is_stochastic_and_ignores_duplicates(seed in any::<u64>(), n in 2usize..10, copies in 1usize..4) {
            let mut rng = seeded(seed);
            let mut once = Vec::new();
            for (i, j) in PairIndex::new(n).iter() {
                match rng.gen_range(0..5) {
                    0 | 1 => once.push((i, j)),
                    2 | 3 => once.push((j, i)),
                    _ => {}
                }
            }
            let many: Vec<(usize, usize)> = (0..copies).flat_map(|_| once.iter().copied()).collect();
            let a = rank_centrality_from_comparisons(n, &once, DEFAULT_DAMPING).unwrap();
            let b = rank_centrality_from_comparisons(n, &many, DEFAULT_DAMPING).unwrap();
            prop_assert_eq!(&a.ranking, &b.ranking);
            for row in b.chain.transition.rows() {
                prop_assert!((row.sum() - 1.0).abs() < 1e-12);
                prop_assert!(row.iter().all(|&p| p >= 0.0));
            }
            prop_assert!(b.chain.stationary.iter().all(|&p| p >= 0.0));
            prop_assert!((b.chain.stationary.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
