//! Bias-free soft-margin SVM solved in the dual:
//!
//! ```text
//! max_α  Σ α_a − ½ Σ_ab α_a α_b y_a y_b K̃(k_a, k_b)    s.t. 0 ≤ α_a ≤ C
//! ```
//!
//! There is no equality constraint (no bias term), so any pair of
//! coordinates can move independently. Each step picks the two coordinates
//! with the largest projected-gradient violation and solves the resulting
//! two-variable box QP exactly. Kernel rows restricted to the sampled
//! columns are kept in a small LRU cache.

use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::kernels::KernelMatrix;
use crate::ranking::PreferenceSample;

pub const DEFAULT_C: f64 = 1.0;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_CACHE_ROWS: usize = 256;

/// Box used by [`omega`] in place of `C = ∞`.
pub const OMEGA_BOX: f64 = 1e6;

/// Relative curvature below which a direction is treated as flat.
const MIN_DEFAULT_SWEEPS: usize = 1000;
/// Sweeps with a flat objective and no 0.1% drop in the largest violation
/// before giving up.
const STALL_SWEEPS: usize = 20;
const FLAT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SvmOptions {
    pub c: f64,
    /// Stop once the largest projected-gradient violation is at most this.
    pub tol: f64,
    /// Cap on sweeps (one sweep = `m` working-set updates); `None` means
    /// `max(10·m, 1000)`.
    pub max_sweeps: Option<usize>,
    pub cache_rows: usize,
}

impl Default for SvmOptions {
    fn default() -> Self {
        SvmOptions {
            c: DEFAULT_C,
            tol: DEFAULT_TOL,
            max_sweeps: None,
            cache_rows: DEFAULT_CACHE_ROWS,
        }
    }
}

impl SvmOptions {
    pub fn with_c(c: f64) -> Self {
        SvmOptions {
            c,
            ..Default::default()
        }
    }
}

/// Regularization constant that balances the two error terms of the
/// consistency analysis: `(ϑ³ / (N n √(8 f (1 − f))))^{1/2}`.
pub fn optimal_c(theta: f64, n: usize, f: f64) -> Result<f64> {
    if !(f > 0.0 && f < 1.0) || n < 2 || theta <= 0.0 {
        return Err(Error::invalid(format!(
            "optimal C needs theta > 0, n >= 2, 0 < f < 1 (got {theta}, {n}, {f})"
        )));
    }
    let big_n = (n * (n - 1) / 2) as f64;
    Ok((theta.powi(3) / (big_n * n as f64 * (8.0 * f * (1.0 - f)).sqrt())).sqrt())
}

/// A dual problem over a kernel restricted to the sampled indices.
pub struct SvmProblem<'a, K: KernelMatrix + ?Sized> {
    kernel: &'a K,
    indices: &'a [usize],
    labels: &'a [i8],
    pub options: SvmOptions,
}

impl<'a, K: KernelMatrix + ?Sized> SvmProblem<'a, K> {
    pub fn new(kernel: &'a K, sample: &'a PreferenceSample, options: SvmOptions) -> Result<Self> {
        Self::from_parts(kernel, sample.indices(), sample.labels(), options)
    }

    pub fn from_parts(
        kernel: &'a K,
        indices: &'a [usize],
        labels: &'a [i8],
        options: SvmOptions,
    ) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySubset("SVM needs at least one labelled instance".into()));
        }
        if indices.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: indices.len(),
                got: labels.len(),
            });
        }
        if let Some(&k) = indices.iter().find(|&&k| k >= kernel.dim()) {
            return Err(Error::invalid(format!(
                "sample index {k} outside kernel of size {}",
                kernel.dim()
            )));
        }
        if labels.iter().any(|&y| y != 1 && y != -1) {
            return Err(Error::invalid("labels must be +1 or -1"));
        }
        if !(options.c > 0.0) || !(options.tol > 0.0) {
            return Err(Error::invalid(format!(
                "C and tol must be positive (C = {}, tol = {})",
                options.c, options.tol
            )));
        }
        Ok(SvmProblem {
            kernel,
            indices,
            labels,
            options,
        })
    }

    pub fn m(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        self.indices
    }

    pub fn labels(&self) -> &[i8] {
        self.labels
    }

    #[inline]
    fn q(&self, a: usize, b: usize) -> f64 {
        let y = f64::from(self.labels[a] * self.labels[b]);
        y * self.kernel.entry(self.indices[a], self.indices[b])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmSolution {
    /// Dual variables, aligned with the sample order.
    pub alpha: Vec<f64>,
    pub dual_objective: f64,
    /// `f = K̃β` over every index of the kernel.
    pub scores: Vec<f64>,
    /// Non-zero entries `(k, y_k α_k)` of `β`.
    pub beta: Vec<(usize, f64)>,
    pub iterations: usize,
    pub converged: bool,
    /// Largest projected-gradient violation at exit.
    pub max_violation: f64,
    /// Dual objective after every completed sweep.
    pub objective_trace: Vec<f64>,
}

struct RowCache {
    capacity: usize,
    clock: u64,
    rows: HashMap<usize, (Rc<[f64]>, u64)>,
}

impl RowCache {
    fn new(capacity: usize) -> Self {
        RowCache {
            capacity: capacity.max(2),
            clock: 0,
            rows: HashMap::new(),
        }
    }

    fn get<K: KernelMatrix + ?Sized>(&mut self, p: &SvmProblem<'_, K>, a: usize) -> Rc<[f64]> {
        self.clock += 1;
        let now = self.clock;
        if let Some((row, stamp)) = self.rows.get_mut(&a) {
            *stamp = now;
            return row.clone();
        }
        if self.rows.len() >= self.capacity {
            let oldest = self
                .rows
                .iter()
                .min_by_key(|(_, (_, s))| *s)
                .map(|(&k, _)| k)
                .expect("cache is non-empty");
            self.rows.remove(&oldest);
        }
        let row: Rc<[f64]> = (0..p.m()).map(|b| p.q(a, b)).collect();
        self.rows.insert(a, (row.clone(), now));
        row
    }
}

#[inline]
fn violation(alpha: f64, grad: f64, c: f64) -> f64 {
    if alpha <= 0.0 {
        grad.max(0.0)
    } else if alpha >= c {
        (-grad).max(0.0)
    } else {
        grad.abs()
    }
}

/// Maximize `g d − ½ q d²` over `d ∈ [lo, hi]`.
#[inline]
fn best_step(g: f64, q: f64, lo: f64, hi: f64, scale: f64) -> f64 {
    if q > FLAT * scale {
        (g / q).clamp(lo, hi)
    } else if g > 0.0 {
        hi
    } else if g < 0.0 {
        lo
    } else {
        0.0
    }
}

fn not_psd(coordinate: usize, curvature: f64) -> Error {
    Error::NotPsd {
        coordinate,
        curvature,
    }
}

/// Solve the box-constrained dual.
pub fn solve_dual<K: KernelMatrix + ?Sized>(problem: &SvmProblem<'_, K>) -> Result<SvmSolution> {
    let m = problem.m();
    let c = problem.options.c;
    let tol = problem.options.tol;
    let max_sweeps = problem.options.max_sweeps.unwrap_or((10 * m).max(MIN_DEFAULT_SWEEPS)).max(1);
    let max_updates = max_sweeps.saturating_mul(m);

    let mut alpha = vec![0.0; m];
    let mut grad = vec![1.0; m];
    let mut cache = RowCache::new(problem.options.cache_rows);
    let mut trace = Vec::new();
    let mut stalled_sweeps = 0;
    let mut best_violation = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut max_violation;

    loop {
        // two largest violators, ties to the lower index
        let (mut first, mut second) = ((usize::MAX, -1.0), (usize::MAX, -1.0));
        for a in 0..m {
            let v = violation(alpha[a], grad[a], c);
            if v > first.1 {
                second = first;
                first = (a, v);
            } else if v > second.1 {
                second = (a, v);
            }
        }
        max_violation = first.1;
        if max_violation <= tol {
            converged = true;
            break;
        }
        if iterations >= max_updates {
            break;
        }
        let a = first.0;
        let row_a = cache.get(problem, a);
        let qaa = row_a[a];
        let scale = qaa.abs().max(1.0);
        if qaa < -FLAT * scale {
            return Err(not_psd(problem.indices[a], qaa));
        }

        let (da, db, b_row) = if second.1 > tol && second.0 != usize::MAX {
            let b = second.0;
            let row_b = cache.get(problem, b);
            let qbb = row_b[b];
            let qab = row_a[b];
            let scale = qaa.abs().max(qbb.abs()).max(1.0);
            if qbb < -FLAT * scale {
                return Err(not_psd(problem.indices[b], qbb));
            }
            let det = qaa * qbb - qab * qab;
            if det < -1e-10 * (qaa * qbb + qab * qab).max(1.0) {
                return Err(not_psd(problem.indices[a], det));
            }
            let (ga, gb) = (grad[a], grad[b]);
            let (lo_a, hi_a) = (-alpha[a], c - alpha[a]);
            let (lo_b, hi_b) = (-alpha[b], c - alpha[b]);
            let gain = |x: f64, y: f64| ga * x + gb * y - 0.5 * (qaa * x * x + 2.0 * qab * x * y + qbb * y * y);

            let mut best = (0.0, 0.0, 0.0);
            let mut consider = |x: f64, y: f64| {
                let g = gain(x, y);
                if g > best.2 {
                    best = (x, y, g);
                }
            };
            if det > FLAT * scale * scale {
                let x = (qbb * ga - qab * gb) / det;
                let y = (qaa * gb - qab * ga) / det;
                if (lo_a..=hi_a).contains(&x) && (lo_b..=hi_b).contains(&y) {
                    consider(x, y);
                }
            }
            for x in [lo_a, hi_a] {
                consider(x, best_step(gb - qab * x, qbb, lo_b, hi_b, scale));
            }
            for y in [lo_b, hi_b] {
                consider(best_step(ga - qab * y, qaa, lo_a, hi_a, scale), y);
            }
            consider(best_step(ga, qaa, lo_a, hi_a, scale), 0.0);
            consider(0.0, best_step(gb, qbb, lo_b, hi_b, scale));
            (best.0, best.1, Some((b, row_b)))
        } else {
            (best_step(grad[a], qaa, -alpha[a], c - alpha[a], scale), 0.0, None)
        };

        if da != 0.0 {
            alpha[a] = (alpha[a] + da).clamp(0.0, c);
            for (g, q) in grad.iter_mut().zip(row_a.iter()) {
                *g -= da * q;
            }
        }
        if let Some((b, row_b)) = b_row {
            if db != 0.0 {
                alpha[b] = (alpha[b] + db).clamp(0.0, c);
                for (g, q) in grad.iter_mut().zip(row_b.iter()) {
                    *g -= db * q;
                }
            }
        }
        iterations += 1;

        if iterations % m == 0 {
            let obj = objective_from_gradient(&alpha, &grad);
            let flat = trace.last().is_some_and(|&prev: &f64| obj - prev <= 1e-15 * obj.abs().max(1.0));
            trace.push(obj);
            if max_violation < 0.999 * best_violation {
                best_violation = max_violation;
                stalled_sweeps = 0;
            } else if flat {
                stalled_sweeps += 1;
            } else {
                stalled_sweeps = 0;
            }
            if stalled_sweeps >= STALL_SWEEPS {
                break;
            }
        }
    }

    let dual_objective = objective_from_gradient(&alpha, &grad);
    let beta: Vec<(usize, f64)> = alpha
        .iter()
        .enumerate()
        .filter(|(_, &al)| al != 0.0)
        .map(|(a, &al)| (problem.indices[a], f64::from(problem.labels[a]) * al))
        .collect();
    let scores = (0..problem.kernel.dim())
        .map(|k| beta.iter().map(|&(l, b)| b * problem.kernel.entry(l, k)).sum())
        .collect();

    Ok(SvmSolution {
        alpha,
        dual_objective,
        scores,
        beta,
        iterations,
        converged,
        max_violation,
        objective_trace: trace,
    })
}

/// `Σα − ½αᵀQα` using `Qα = 1 − grad`.
fn objective_from_gradient(alpha: &[f64], grad: &[f64]) -> f64 {
    0.5 * alpha.iter().zip(grad).map(|(a, g)| a * (1.0 + g)).sum::<f64>()
}

/// `f_a = Σ_b y_b α_b K̃(k_b, k_a)` recomputed from `α` for every sampled index.
fn sampled_scores<K: KernelMatrix + ?Sized>(problem: &SvmProblem<'_, K>, alpha: &[f64]) -> Vec<f64> {
    let idx = problem.indices();
    let y = problem.labels();
    idx.iter()
        .map(|&ka| {
            idx.iter()
                .zip(y)
                .zip(alpha)
                .map(|((&kb, &yb), &al)| f64::from(yb) * al * problem.kernel.entry(kb, ka))
                .sum()
        })
        .collect()
}

/// Dual objective evaluated directly from `α` and the kernel.
pub fn dual_objective<K: KernelMatrix + ?Sized>(problem: &SvmProblem<'_, K>, alpha: &[f64]) -> f64 {
    let f = sampled_scores(problem, alpha);
    let quad: f64 = problem
        .labels()
        .iter()
        .zip(alpha)
        .zip(&f)
        .map(|((&y, &a), &fa)| f64::from(y) * a * fa)
        .sum();
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Primal objective `½ βᵀK̃β + C Σ (1 − y f)₊` at the `β` induced by `α`.
pub fn primal_objective<K: KernelMatrix + ?Sized>(problem: &SvmProblem<'_, K>, alpha: &[f64]) -> f64 {
    let f = sampled_scores(problem, alpha);
    let mut quad = 0.0;
    let mut hinge = 0.0;
    for ((&y, &a), &fa) in problem.labels().iter().zip(alpha).zip(&f) {
        let y = f64::from(y);
        quad += y * a * fa;
        hinge += (1.0 - y * fa).max(0.0);
    }
    0.5 * quad + problem.options.c * hinge
}

/// Primal minus dual objective at the solution's `α`; non-negative up to
/// rounding, zero exactly at the optimum.
pub fn dual_gap<K: KernelMatrix + ?Sized>(problem: &SvmProblem<'_, K>, solution: &SvmSolution) -> f64 {
    primal_objective(problem, &solution.alpha) - dual_objective(problem, &solution.alpha)
}

/// Largest projected-gradient violation of `α`, recomputed from scratch.
pub fn kkt_violation<K: KernelMatrix + ?Sized>(problem: &SvmProblem<'_, K>, alpha: &[f64]) -> f64 {
    let f = sampled_scores(problem, alpha);
    problem
        .labels()
        .iter()
        .zip(alpha)
        .zip(&f)
        .map(|((&y, &a), &fa)| violation(a, 1.0 - f64::from(y) * fa, problem.options.c))
        .fold(0.0, f64::max)
}

/// Hard-margin dual optimum `max_{α ≥ 0} Σα − ½ Σ α_a α_b y_a y_b K_ab` over
/// all instances of a dense kernel. The upper box is [`OMEGA_BOX`]; a
/// solution touching it is reported as unbounded.
pub fn omega(k: &ndarray::Array2<f64>, y: &[i8]) -> Result<f64> {
    let indices: Vec<usize> = (0..k.nrows()).collect();
    let options = SvmOptions {
        c: OMEGA_BOX,
        tol: 1e-10,
        ..Default::default()
    };
    let problem = SvmProblem::from_parts(k, &indices, y, options)?;
    let sol = solve_dual(&problem)?;
    if let Some(a) = sol.alpha.iter().position(|&a| a >= OMEGA_BOX * (1.0 - 1e-9)) {
        return Err(Error::UnboundedDual(format!(
            "dual variable {a} reached the safeguard box {OMEGA_BOX:e} (objective {:e})",
            sol.dual_objective
        )));
    }
    Ok(sol.dual_objective)
}
