//! Dense symmetric eigendecomposition (cyclic Jacobi), spectral
//! pseudoinverse and PSD tests.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};

/// Allowed asymmetry, relative to `max(1, max|M_ij|)`.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Default relative cut for treating eigenvalues as zero in [`pseudo_inverse`].
pub const PINV_REL_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Eigen-pairs of a symmetric matrix, eigenvalues sorted descending and
/// eigenvectors stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Array1<f64>,
    pub vectors: Array2<f64>,
}

impl SymmetricEigen {
    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `Q diag(g(λ)) Qᵀ`.
    pub fn reconstruct_with(&self, g: impl Fn(f64) -> f64) -> Array2<f64> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let w = g(lam);
            scaled.column_mut(j).mapv_inplace(|x| x * w);
        }
        let mut out = scaled.dot(&self.vectors.t());
        symmetrize(&mut out);
        debug_assert_eq!(out.nrows(), n);
        out
    }

    pub fn reconstruct(&self) -> Array2<f64> {
        self.reconstruct_with(|l| l)
    }
}

fn max_abs(m: &ArrayView2<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
}

fn symmetrize(m: &mut Array2<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[[i, j]] + m[[j, i]]);
            m[[i, j]] = v;
            m[[j, i]] = v;
        }
    }
}

/// Fail unless `m` is square and symmetric within [`SYMMETRY_TOL`].
pub fn check_symmetric(m: &ArrayView2<f64>) -> Result<()> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::NotSquare { rows: r, cols: c });
    }
    let tol = SYMMETRY_TOL * max_abs(m).max(1.0);
    let mut worst = 0.0f64;
    for i in 0..r {
        for j in (i + 1)..r {
            worst = worst.max((m[[i, j]] - m[[j, i]]).abs());
        }
    }
    if worst > tol || worst.is_nan() {
        return Err(Error::NotSymmetric {
            asymmetry: worst,
            tolerance: tol,
        });
    }
    Ok(())
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
pub fn eig_sym(m: &Array2<f64>) -> Result<SymmetricEigen> {
    check_symmetric(&m.view())?;
    let n = m.nrows();
    // row-major working copies; `a` is rotated towards diagonal form
    let mut a: Vec<f64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push(0.5 * (m[[i, j]] + m[[j, i]]));
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob2: f64 = a.iter().map(|x| x * x).sum();
    let stop = (f64::EPSILON * f64::EPSILON) * frob2;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off <= stop || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    theta.signum() / (theta.abs() + theta.hypot(1.0))
                };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                if s == 0.0 {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let values = Array1::from_iter(order.iter().map(|&i| a[i * n + i]));
    let vectors = Array2::from_shape_fn((n, n), |(r, c)| v[r * n + order[c]]);
    Ok(SymmetricEigen { values, vectors })
}

/// Eigenvalues only, descending.
pub fn eigenvalues(m: &Array2<f64>) -> Result<Array1<f64>> {
    Ok(eig_sym(m)?.values)
}

/// Largest eigenvalue `λ₁(M)`.
pub fn lambda_max(m: &Array2<f64>) -> Result<f64> {
    Ok(eig_sym(m)?.largest())
}

/// Moore–Penrose pseudoinverse of a symmetric matrix. Eigenvalues with
/// `|λ| <= rel_tol * max|λ|` are treated as zero.
pub fn pseudo_inverse(m: &Array2<f64>, rel_tol: f64) -> Result<Array2<f64>> {
    let eig = eig_sym(m)?;
    Ok(pseudo_inverse_from(&eig, rel_tol))
}

pub fn pseudo_inverse_from(eig: &SymmetricEigen, rel_tol: f64) -> Array2<f64> {
    let scale = eig.values.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let cut = rel_tol * scale;
    eig.reconstruct_with(|l| if scale > 0.0 && l.abs() > cut { 1.0 / l } else { 0.0 })
}

/// `λ_n(M) >= -tol * max(1, λ₁(M))`.
pub fn is_psd(m: &Array2<f64>, tol: f64) -> Result<bool> {
    let eig = eig_sym(m)?;
    if eig.values.is_empty() {
        return Ok(true);
    }
    Ok(eig.smallest() >= -tol * eig.largest().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    fn max_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
        (a - b).iter().fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    fn random_symmetric(n: usize, seed: u64) -> Array2<f64> {
        use rand::Rng;
        let mut rng = crate::rng::seeded(seed);
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                m[[i, j]] = v;
                m[[j, i]] = v;
            }
        }
        m
    }

    fn check_contract(m: &Array2<f64>, eig: &SymmetricEigen) {
        let n = m.nrows();
        let scale = max_abs(&m.view()).max(f64::MIN_POSITIVE);
        assert!(max_diff(&eig.reconstruct(), m) <= 1e-10 * scale.max(1.0));
        let qtq = eig.vectors.t().dot(&eig.vectors);
        assert!(max_diff(&qtq, &Array2::eye(n)) <= 1e-10);
        for w in eig.values.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn identity_spectrum() {
        let eig = eig_sym(&Array2::eye(3)).unwrap();
        assert_eq!(eig.values.to_vec(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn triangle_adjacency_spectrum() {
        // det(J - I - λI) = (2 - λ)(1 + λ)^2
        let a = array![[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]];
        let eig = eig_sym(&a).unwrap();
        let expect = [2.0, -1.0, -1.0];
        for (v, e) in eig.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-13);
        }
        check_contract(&a, &eig);
    }

    #[test]
    fn diagonal_input() {
        let m = Array2::from_diag(&array![2.0, 5.0, -1.0]);
        let eig = eig_sym(&m).unwrap();
        assert_eq!(eig.values.to_vec(), vec![5.0, 2.0, -1.0]);
        // permuted standard basis
        assert_eq!(eig.vectors.column(0).to_vec(), vec![0.0, 1.0, 0.0]);
        assert_eq!(eig.vectors.column(2).to_vec(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = array![[1.0, 2.0], [0.0, 1.0]];
        assert!(matches!(eig_sym(&m), Err(Error::NotSymmetric { .. })));
        let m = Array2::<f64>::zeros((2, 3));
        assert!(matches!(eig_sym(&m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn empty_and_scalar() {
        let eig = eig_sym(&Array2::zeros((0, 0))).unwrap();
        assert!(eig.values.is_empty());
        let eig = eig_sym(&array![[-3.5]]).unwrap();
        assert_eq!(eig.values.to_vec(), vec![-3.5]);
    }

    #[test]
    fn contract_holds_at_n_200() {
        let m = random_symmetric(200, 11);
        let eig = eig_sym(&m).unwrap();
        check_contract(&m, &eig);
    }

    #[test]
    fn pseudo_inverse_examples() {
        assert_eq!(pseudo_inverse(&Array2::eye(4), PINV_REL_TOL).unwrap(), Array2::<f64>::eye(4));
        let l = array![[1.0, -1.0], [-1.0, 1.0]];
        let p = pseudo_inverse(&l, PINV_REL_TOL).unwrap();
        assert!(max_diff(&p, &(&l * 0.25)) < 1e-15);
        let z = Array2::<f64>::zeros((3, 3));
        assert_eq!(pseudo_inverse(&z, PINV_REL_TOL).unwrap(), z);
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&Array2::eye(3), 1e-10).unwrap());
        assert!(!is_psd(&array![[0.0, 1.0], [1.0, 0.0]], 1e-10).unwrap());
        assert!(is_psd(&Array2::from_elem((3, 3), 1.0), 1e-10).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trace_equals_eigenvalue_sum(n in 1usize..=12, seed in any::<u64>()) {
            let m = random_symmetric(n, seed);
            let eig = eig_sym(&m).unwrap();
            check_contract(&m, &eig);
            let tr = m.diag().sum();
            let s = eig.values.sum();
            prop_assert!((tr - s).abs() <= 1e-8 * tr.abs().max(1.0));
        }

        #[test]
        fn moore_penrose_identities(n in 1usize..=10, rank in 0usize..=10, seed in any::<u64>()) {
            let b = random_symmetric(n, seed);
            let r = rank.min(n);
            let cols = b.slice(ndarray::s![.., ..r]).to_owned();
            let m = cols.dot(&cols.t());
            let p = pseudo_inverse(&m, PINV_REL_TOL).unwrap();
            let scale = max_abs(&m.view()).max(1.0);
            prop_assert!(max_diff(&m.dot(&p).dot(&m), &m) <= 1e-8 * scale);
            let pscale = max_abs(&p.view()).max(1.0);
            prop_assert!(max_diff(&p.dot(&m).dot(&p), &p) <= 1e-8 * pscale);
        }

        #[test]
        fn pseudo_inverse_is_involution_on_full_rank(n in 1usize..=8, seed in any::<u64>()) {
            let b = random_symmetric(n, seed);
            let m = b.dot(&b.t()) + Array2::<f64>::eye(n);
            let back = pseudo_inverse(&pseudo_inverse(&m, PINV_REL_TOL).unwrap(), PINV_REL_TOL).unwrap();
            let scale = max_abs(&m.view());
            prop_assert!(max_diff(&back, &m) <= 1e-8 * scale);
        }
    }
}
