//! Node kernels over a graph and their lift to node pairs.
//!
//! A node kernel `K` is an `n x n` PSD matrix. Members of the orthonormal
//! labelling set additionally have unit diagonal and vanish on non-edges;
//! [`ls_kernel`] always lands in that set, the Laplacian kernels generally
//! do not.
//!
//! A [`PairKernel`] evaluates `K̃(k, k')` for pairs `k = (i, j)` and
//! `k' = (i', j')` on demand:
//!
//! * Kronecker: `K_ii' K_jj'`
//! * pairwise difference: `K_ii' - K_ij' - K_ji' + K_jj'`

use std::fmt::Write as _;
use std::sync::Arc;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, PairIndex};
use crate::spectral::{self, PINV_REL_TOL};

/// Default absolute tolerance for [`validate_membership`].
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// Largest `n` for which [`PairKernel::materialize`] builds the dense `N x N` matrix.
pub const MATERIALIZE_LIMIT: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelKind {
    Ls,
    Laplacian,
    NormalizedLaplacian,
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeKernel {
    matrix: Array2<f64>,
    kind: KernelKind,
}

impl NodeKernel {
    /// Wrap an arbitrary symmetric matrix; PSD-ness is not checked here
    /// (see [`validate_membership`]).
    pub fn custom(matrix: Array2<f64>) -> Result<Self> {
        spectral::check_symmetric(&matrix.view())?;
        Ok(NodeKernel {
            matrix,
            kind: KernelKind::Custom,
        })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[[i, j]]
    }

    pub fn lambda_max(&self) -> Result<f64> {
        spectral::lambda_max(&self.matrix)
    }

    /// Dense CSV, row-major, shortest round-trip decimal for every entry.
    pub fn to_csv(&self) -> String {
        matrix_to_csv(&self.matrix)
    }
}

pub fn matrix_to_csv(m: &Array2<f64>) -> String {
    let mut s = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

/// `(D - A)†`, or `(I - D^{-1/2} A D^{-1/2})†` when `normalized`.
pub fn laplacian_kernel(g: &Graph, normalized: bool) -> Result<NodeKernel> {
    let n = g.n();
    let a = g.adjacency_matrix();
    let deg: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
    let lap = if normalized {
        if let Some(i) = deg.iter().position(|&d| d == 0.0) {
            return Err(Error::IsolatedNode(i));
        }
        let inv_sqrt: Vec<f64> = deg.iter().map(|d| 1.0 / d.sqrt()).collect();
        Array2::from_shape_fn((n, n), |(i, j)| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - inv_sqrt[i] * a[[i, j]] * inv_sqrt[j]
        })
    } else {
        Array2::from_shape_fn((n, n), |(i, j)| {
            if i == j {
                deg[i]
            } else {
                -a[[i, j]]
            }
        })
    };
    Ok(NodeKernel {
        matrix: spectral::pseudo_inverse(&lap, PINV_REL_TOL)?,
        kind: if normalized {
            KernelKind::NormalizedLaplacian
        } else {
            KernelKind::Laplacian
        },
    })
}

/// LS-labelling `A/τ + I` with `τ = max(|λ_n(A)|, 1)`.
pub fn ls_kernel(g: &Graph) -> Result<NodeKernel> {
    let a = g.adjacency_matrix();
    let lam_min = if g.n() == 0 {
        0.0
    } else {
        spectral::eig_sym(&a)?.smallest()
    };
    ls_kernel_with_tau(g, lam_min.abs().max(1.0))
}

/// LS-labelling with an explicit `τ`; must satisfy `τ >= |λ_n(A)|`.
pub fn ls_kernel_with_tau(g: &Graph, tau: f64) -> Result<NodeKernel> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::invalid(format!("tau must be positive, got {tau}")));
    }
    let n = g.n();
    let matrix = Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            1.0
        } else if g.has_edge(i, j) {
            1.0 / tau
        } else {
            0.0
        }
    });
    Ok(NodeKernel {
        matrix,
        kind: KernelKind::Ls,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MembershipViolation {
    Diagonal { node: usize, value: f64 },
    NonEdge { i: usize, j: usize, value: f64 },
    NotPsd { min_eigenvalue: f64 },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MembershipReport {
    pub violations: Vec<MembershipViolation>,
}

impl MembershipReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check `K` against the orthonormal-labelling kernel set of `G`: unit
/// diagonal, zero on every non-adjacent pair, PSD.
pub fn validate_membership(k: &NodeKernel, g: &Graph, tol: f64) -> Result<MembershipReport> {
    let n = g.n();
    if k.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: k.n(),
        });
    }
    let mut report = MembershipReport::default();
    for i in 0..n {
        let d = k.get(i, i);
        if (d - 1.0).abs() > tol {
            report
                .violations
                .push(MembershipViolation::Diagonal { node: i, value: d });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let v = k.get(i, j);
            if !g.has_edge(i, j) && v.abs() > tol {
                report
                    .violations
                    .push(MembershipViolation::NonEdge { i, j, value: v });
            }
        }
    }
    if n > 0 {
        let min = spectral::eig_sym(k.matrix())?.smallest();
        if min < -tol {
            report.violations.push(MembershipViolation::NotPsd {
                min_eigenvalue: min,
            });
        }
    }
    Ok(report)
}

/// `fᵀ K† f` for a node kernel.
pub fn rkhs_norm(f: &[f64], k: &NodeKernel) -> Result<f64> {
    pinv_quadratic_form(f, k.matrix())
}

/// `fᵀ M† f` for any symmetric matrix (e.g. a materialized pair kernel).
pub fn pinv_quadratic_form(f: &[f64], m: &Array2<f64>) -> Result<f64> {
    if f.len() != m.nrows() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: f.len(),
        });
    }
    let p = spectral::pseudo_inverse(m, PINV_REL_TOL)?;
    let f = Array1::from(f.to_vec());
    Ok(f.dot(&p.dot(&f)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairMode {
    Kronecker,
    PairwiseDifference,
}

/// Symmetric kernel matrix accessed entry by entry.
pub trait KernelMatrix: Sync {
    fn dim(&self) -> usize;
    fn entry(&self, a: usize, b: usize) -> f64;
}

impl KernelMatrix for Array2<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    #[inline]
    fn entry(&self, a: usize, b: usize) -> f64 {
        self[[a, b]]
    }
}

/// Pair-level kernel over the `N` node pairs, evaluated lazily from the
/// node kernel.
#[derive(Debug, Clone)]
pub struct PairKernel {
    source: Arc<NodeKernel>,
    mode: PairMode,
    index: Arc<PairIndex>,
}

impl PairKernel {
    pub fn new(source: NodeKernel, mode: PairMode) -> Self {
        let index = Arc::new(PairIndex::new(source.n()));
        PairKernel {
            source: Arc::new(source),
            mode,
            index,
        }
    }

    pub fn source(&self) -> &NodeKernel {
        &self.source
    }

    pub fn mode(&self) -> PairMode {
        self.mode
    }

    pub fn index(&self) -> &PairIndex {
        &self.index
    }

    pub fn n_pairs(&self) -> usize {
        self.index.len()
    }

    #[inline]
    pub fn eval(&self, k: usize, kp: usize) -> f64 {
        let (i, j) = self.index.pair(k);
        let (ip, jp) = self.index.pair(kp);
        let m = &self.source.matrix;
        match self.mode {
            PairMode::Kronecker => m[[i, ip]] * m[[j, jp]],
            PairMode::PairwiseDifference => m[[i, ip]] - m[[i, jp]] - m[[j, ip]] + m[[j, jp]],
        }
    }

    /// Dense `N x N` matrix; refused above [`MATERIALIZE_LIMIT`] nodes.
    pub fn materialize(&self) -> Result<Array2<f64>> {
        let n = self.source.n();
        if n > MATERIALIZE_LIMIT {
            return Err(Error::TooLarge {
                n,
                limit: MATERIALIZE_LIMIT,
            });
        }
        let big_n = self.n_pairs();
        Ok(Array2::from_shape_fn((big_n, big_n), |(a, b)| self.eval(a, b)))
    }
}

impl KernelMatrix for PairKernel {
    fn dim(&self) -> usize {
        self.n_pairs()
    }

    #[inline]
    fn entry(&self, a: usize, b: usize) -> f64 {
        self.eval(a, b)
    }
}

pub fn pair_kernel(k: NodeKernel, mode: PairMode) -> PairKernel {
    PairKernel::new(k, mode)
}
