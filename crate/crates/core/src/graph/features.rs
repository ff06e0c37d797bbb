use super::Graph;
use crate::error::{Error, Result};

/// How the RBF similarity matrix is cut into an adjacency matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdRule {
    /// Edge iff similarity is strictly above the mean off-diagonal similarity.
    #[default]
    MeanStrict,
    /// Edge iff similarity is at or above the mean off-diagonal similarity.
    MeanInclusive,
}

/// Build a graph from feature vectors via a thresholded RBF similarity.
///
/// `s_ij = exp(-|x_i - x_j|^2 / (2 mu^2))` where `mu` is the mean Euclidean
/// distance over all pairs `i < j`; the threshold is the mean of the
/// off-diagonal similarities.
pub fn graph_from_features(points: &[Vec<f64>], rule: ThresholdRule) -> Result<Graph> {
    let n = points.len();
    if n < 2 {
        return Err(Error::invalid(format!("need at least two points, got {n}")));
    }
    let dim = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: p.len(),
        });
    }
    let n_pairs = (n * (n - 1) / 2) as f64;
    let mut sq = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d2: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            sq.push(d2);
        }
    }
    let mu = sq.iter().map(|d2| d2.sqrt()).sum::<f64>() / n_pairs;
    if mu <= 0.0 {
        return Err(Error::DegenerateFeatures);
    }
    let sim: Vec<f64> = sq.iter().map(|d2| (-d2 / (2.0 * mu * mu)).exp()).collect();
    let mean = sim.iter().sum::<f64>() / n_pairs;
    // relative slack absorbs the rounding in `mean` when all similarities tie
    let slack = 1e-12 * mean.abs();
    let mut g = Graph::empty(n);
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let keep = match rule {
                ThresholdRule::MeanStrict => sim[k] > mean + slack,
                ThresholdRule::MeanInclusive => sim[k] >= mean - slack,
            };
            if keep {
                g.set_edge(i, j);
            }
            k += 1;
        }
    }
    Ok(g)
}
