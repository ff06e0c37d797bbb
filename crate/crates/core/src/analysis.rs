//! Numerical side of the learning theory: Rademacher complexity bounds and
//! Monte Carlo estimates, generalization-bound right-hand sides, Lovász ϑ
//! values for special graph families and sample-complexity predictions.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use ndarray::Array2;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::PairIndex;
use crate::kernels::{NodeKernel, PairKernel, PairMode};
use crate::ranking::sample_size;
use crate::rng::{derive_seed, seeded};
use crate::spectral;

/// Constant in front of the confidence term of the transductive bound.
pub const DEFAULT_C1: f64 = 5.05;
pub const DEFAULT_MC_SAMPLES: usize = 2000;

/// Graph families with a known order of ϑ(G).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ThetaFamily {
    Complete,
    UnionOfCliques(usize),
    /// Complement of a power-law graph; order-level constant `√n`.
    ComplementPowerLaw,
    ComplementKColorable(usize),
    /// G(n, q); order-level constant `√n`.
    ErdosRenyi(f64),
    /// Caller-supplied ϑ.
    Custom(f64),
}

impl fmt::Display for ThetaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaFamily::Complete => write!(f, "complete"),
            ThetaFamily::UnionOfCliques(k) => write!(f, "cliques:{k}"),
            ThetaFamily::ComplementPowerLaw => write!(f, "power-law-complement"),
            ThetaFamily::ComplementKColorable(k) => write!(f, "colorable-complement:{k}"),
            ThetaFamily::ErdosRenyi(q) => write!(f, "erdos-renyi:{q}"),
            ThetaFamily::Custom(t) => write!(f, "theta:{t}"),
        }
    }
}

impl FromStr for ThetaFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s.as_str(), None),
        };
        let need = |what: &str| -> Result<&str> {
            arg.ok_or_else(|| Error::invalid(format!("family {name:?} needs a parameter ({what})")))
        };
        let bad = |v: &str| Error::invalid(format!("bad family parameter {v:?}"));
        Ok(match name {
            "complete" => ThetaFamily::Complete,
            "cliques" | "union-of-cliques" => {
                let v = need("k")?;
                ThetaFamily::UnionOfCliques(v.parse().map_err(|_| bad(v))?)
            }
            "power-law-complement" | "power-law" => ThetaFamily::ComplementPowerLaw,
            "colorable-complement" | "k-colorable" => {
                let v = need("k")?;
                ThetaFamily::ComplementKColorable(v.parse().map_err(|_| bad(v))?)
            }
            "erdos-renyi" | "er" => {
                let v = need("q")?;
                ThetaFamily::ErdosRenyi(v.parse().map_err(|_| bad(v))?)
            }
            "theta" | "custom" => {
                let v = need("value")?;
                ThetaFamily::Custom(v.parse().map_err(|_| bad(v))?)
            }
            _ => return Err(Error::invalid(format!("unknown graph family {s:?}"))),
        })
    }
}

/// ϑ(G) (or its order-level constant) for a family on `n` nodes.
pub fn theta_bound(family: ThetaFamily, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("theta needs n >= 1"));
    }
    match family {
        ThetaFamily::Complete => Ok(1.0),
        ThetaFamily::UnionOfCliques(k) | ThetaFamily::ComplementKColorable(k) => {
            if k == 0 || k > n {
                return Err(Error::invalid(format!("family parameter k = {k} must lie in 1..={n}")));
            }
            Ok(k as f64)
        }
        ThetaFamily::ComplementPowerLaw => Ok((n as f64).sqrt()),
        ThetaFamily::ErdosRenyi(q) => {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::invalid(format!("edge probability {q} outside (0, 1)")));
            }
            Ok((n as f64).sqrt())
        }
        ThetaFamily::Custom(t) => {
            if !(1.0..=n as f64).contains(&t) {
                return Err(Error::invalid(format!("theta = {t} outside [1, {n}]")));
            }
            Ok(t)
        }
    }
}

fn check_p(p: f64, hi: f64) -> Result<()> {
    if !(0.0..=hi).contains(&p) {
        return Err(Error::invalid(format!("perturbation probability {p} outside [0, {hi}]")));
    }
    Ok(())
}

/// Closed-form bound on the transductive Rademacher complexity of the
/// pair-level hypothesis class: `C λ₁(K) √(2p)` for the Kronecker lift,
/// `2C √(p n λ₁(K))` for the pairwise-difference lift.
pub fn rademacher_bound(k: &NodeKernel, mode: PairMode, c: f64, p: f64) -> Result<f64> {
    check_p(p, 1.0)?;
    let l1 = k.lambda_max()?.max(0.0);
    Ok(match mode {
        PairMode::Kronecker => c * l1 * (2.0 * p).sqrt(),
        PairMode::PairwiseDifference => 2.0 * c * (p * k.n() as f64 * l1).sqrt(),
    })
}

/// `C √(2p λ₁(K̃) tr(K̃) / N)` from a materialized pair kernel. With a unit
/// diagonal (the Kronecker lift) this is `C √(2p λ₁(K̃))`; the pairwise
/// difference lift has diagonal entries up to 2 and needs the trace factor.
pub fn rademacher_bound_pair(k_pair: &Array2<f64>, c: f64, p: f64) -> Result<f64> {
    check_p(p, 1.0)?;
    let l1 = spectral::lambda_max(k_pair)?.max(0.0);
    let big_n = k_pair.nrows().max(1) as f64;
    let trace = k_pair.diag().sum().max(0.0);
    Ok(c * (2.0 * p * l1 * trace / big_n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Monte Carlo estimate of `E_γ [C ‖K̃ γ‖₁] / N` with `γ_k` equal to `+1`
/// or `-1` with probability `p` each and `0` otherwise. Draw `d` uses the
/// stream `derive_seed(seed, [d])`, so the result does not depend on the
/// thread count.
pub fn rademacher_mc(k_pair: &Array2<f64>, c: f64, p: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    check_p(p, 0.5)?;
    spectral::check_symmetric(&k_pair.view())?;
    if samples < 2 {
        return Err(Error::invalid("Monte Carlo needs at least two draws"));
    }
    let big_n = k_pair.nrows();
    if big_n == 0 {
        return Err(Error::invalid("empty pair kernel"));
    }
    let draws: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|d| {
            let mut rng = seeded(derive_seed(seed, &[d]));
            let gamma: Vec<f64> = (0..big_n)
                .map(|_| {
                    let u: f64 = rng.gen();
                    if u < p {
                        1.0
                    } else if u < 2.0 * p {
                        -1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            let l1: f64 = k_pair
                .rows()
                .into_iter()
                .map(|row| row.iter().zip(&gamma).map(|(a, g)| a * g).sum::<f64>().abs())
                .sum();
            c * l1 / big_n as f64
        })
        .collect();
    let s = samples as f64;
    let mean = draws.iter().sum::<f64>() / s;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (s - 1.0);
    Ok(McEstimate {
        estimate: mean,
        stderr: (var / s).sqrt(),
        samples,
    })
}

/// Bound and (optionally) simulation for one kernel and lift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub embedding: String,
    pub mode: PairMode,
    pub n: usize,
    pub lambda1_node: f64,
    pub lambda1_pair: Option<f64>,
    pub bound_value: f64,
    pub mc_estimate: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub p: f64,
    pub c: f64,
}

impl BoundReport {
    /// `mc ≤ bound + 3·stderr`; vacuously true without a simulation.
    pub fn is_valid(&self) -> bool {
        match (self.mc_estimate, self.mc_stderr) {
            (Some(m), Some(s)) => m <= self.bound_value + 3.0 * s,
            _ => true,
        }
    }

    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Build a report; the pair kernel is materialized (for `λ₁(K̃)` and the
/// simulation) only when `mc` is given.
pub fn bound_report(
    embedding: &str,
    k: &NodeKernel,
    mode: PairMode,
    c: f64,
    p: f64,
    mc: Option<(usize, u64)>,
) -> Result<BoundReport> {
    let bound_value = rademacher_bound(k, mode, c, p)?;
    let lambda1_node = k.lambda_max()?;
    let (lambda1_pair, mc_estimate, mc_stderr) = match mc {
        Some((samples, seed)) => {
            let dense = PairKernel::new(k.clone(), mode).materialize()?;
            let l1 = spectral::lambda_max(&dense)?;
            let est = rademacher_mc(&dense, c, p, samples, seed)?;
            (Some(l1), Some(est.estimate), Some(est.stderr))
        }
        None => (None, None, None),
    };
    Ok(BoundReport {
        embedding: embedding.to_string(),
        mode,
        n: k.n(),
        lambda1_node,
        lambda1_pair,
        bound_value,
        mc_estimate,
        mc_stderr,
        p,
        c,
    })
}

pub fn write_reports_csv<W: Write>(reports: &[BoundReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_reports_json_lines<W: Write>(reports: &[BoundReport], mut out: W) -> Result<()> {
    for r in reports {
        writeln!(out, "{}", r.to_json_line()?)?;
    }
    Ok(())
}

/// Inputs of the generalization bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub mode: PairMode,
    /// `λ₁(K)` of the node kernel.
    pub lambda1: f64,
    pub n: usize,
    pub c: f64,
    pub f: f64,
    pub delta: f64,
    /// Ramp-loss margin.
    pub rho: f64,
    /// Bound on the loss.
    pub b: f64,
    pub c1: f64,
}

impl BoundInputs {
    pub fn new(mode: PairMode, lambda1: f64, n: usize, c: f64, f: f64) -> Self {
        BoundInputs {
            mode,
            lambda1,
            n,
            c,
            f,
            delta: 0.05,
            rho: 1.0,
            b: 1.0,
            c1: DEFAULT_C1,
        }
    }
}

/// Right-hand side of the test-error bound: training error plus a
/// complexity term plus a confidence term.
pub fn generalization_rhs(train_error: f64, x: &BoundInputs) -> Result<f64> {
    if !(x.f > 0.0 && x.f < 1.0) {
        return Err(Error::invalid(format!("fraction {} outside (0, 1)", x.f)));
    }
    if !(x.delta > 0.0 && x.delta < 1.0) {
        return Err(Error::invalid(format!("delta {} outside (0, 1)", x.delta)));
    }
    if !(x.rho > 0.0) || x.n < 2 {
        return Err(Error::invalid("need rho > 0 and n >= 2"));
    }
    let spread = x.rho * (x.f * (1.0 - x.f)).sqrt();
    let complexity = match x.mode {
        PairMode::Kronecker => x.c * x.lambda1 * 2f64.sqrt() / spread,
        PairMode::PairwiseDifference => 2.0 * x.c * (x.n as f64 * x.lambda1).sqrt() / spread,
    };
    let big_n = (x.n * (x.n - 1) / 2) as f64;
    let confidence = x.c1 * x.b / (1.0 - x.f) * ((1.0 / x.delta).ln() / (big_n * x.f)).sqrt();
    Ok(train_error + complexity + confidence)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleComplexity {
    pub theta: f64,
    pub n: usize,
    pub epsilon: f64,
    /// `(√θ / n^{1/2−ε})^{4/3}`, capped at 1.
    pub f_star: f64,
    /// `⌈N f*⌉`.
    pub m_star: usize,
    /// `½ (n^{2+2ε} θ)^{2/3}`.
    pub closed_form: f64,
    /// The uncapped fraction reached 1.
    pub saturated: bool,
    /// `ε < (1 − log_n θ)/2`, the range where the prediction is below a full census.
    pub admissible: bool,
}

pub fn sample_complexity(theta: f64, n: usize, epsilon: f64) -> Result<SampleComplexity> {
    if n < 2 {
        return Err(Error::invalid("sample complexity needs n >= 2"));
    }
    let nf = n as f64;
    if !(1.0..=nf).contains(&theta) {
        return Err(Error::invalid(format!("theta = {theta} outside [1, {n}]")));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::invalid(format!("epsilon = {epsilon} outside (0, 1/2)")));
    }
    let raw = (theta.sqrt() / nf.powf(0.5 - epsilon)).powf(4.0 / 3.0);
    let f_star = raw.min(1.0);
    let big_n = n * (n - 1) / 2;
    Ok(SampleComplexity {
        theta,
        n,
        epsilon,
        f_star,
        m_star: sample_size(big_n, f_star),
        closed_form: 0.5 * (nf.powf(2.0 + 2.0 * epsilon) * theta).powf(2.0 / 3.0),
        saturated: raw >= 1.0,
        admissible: epsilon < (1.0 - theta.ln() / nf.ln()) / 2.0,
    })
}

/// `A ⊗ B`.
pub fn kron(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(r, c)| a[[r / br, c / bc]] * b[[r % br, c % bc]])
}

/// `n × N` matrix whose column for pair `(i, j)` is `e_i − e_j`.
pub fn incidence_difference(n: usize) -> Array2<f64> {
    let index = PairIndex::new(n);
    let mut e = Array2::zeros((n, index.len()));
    for (k, (i, j)) in index.iter().enumerate() {
        e[[i, k]] = 1.0;
        e[[j, k]] = -1.0;
    }
    e
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::invalid("slope fit needs two or more matched points"));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(Error::invalid("log-log fit needs positive values"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("slope fit needs distinct x values"));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_union_cliques;
    use crate::ranking::{pairwise_error, pref_rank, sample_pairs, Embedding, Loss, PreferenceVector, Subset};
    use crate::graph::gen_complete;
    use crate::kernels::ls_kernel;
    use proptest::prelude::*;

    fn identity_kernel(n: usize) -> NodeKernel {
        NodeKernel::custom(Array2::eye(n)).unwrap()
    }

    #[test]
    fn closed_form_bounds() {
        let k = identity_kernel(4);
        for mode in [PairMode::Kronecker, PairMode::PairwiseDifference] {
            assert_eq!(rademacher_bound(&k, mode, 1.0, 0.0).unwrap(), 0.0);
        }
        assert!((rademacher_bound(&k, PairMode::Kronecker, 1.0, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((rademacher_bound(&k, PairMode::PairwiseDifference, 1.0, 0.25).unwrap() - 2.0).abs() < 1e-12);
        assert!(rademacher_bound(&k, PairMode::Kronecker, 1.0, 1.5).is_err());
    }

    #[test]
    fn generic_bound_uses_the_trace() {
        let eye = Array2::<f64>::eye(10);
        assert!((rademacher_bound_pair(&eye, 2.0, 0.125).unwrap() - 1.0).abs() < 1e-12);
        let two = &eye * 2.0;
        assert!((rademacher_bound_pair(&two, 2.0, 0.125).unwrap() - 2.0).abs() < 1e-12);
        // PD lift of the identity on n = 3: E^T E has diagonal 2 and λ₁ = 3
        let pd = PairKernel::new(identity_kernel(3), PairMode::PairwiseDifference)
            .materialize()
            .unwrap();
        let want = (2.0 * 0.25 * 3.0 * 2.0f64).sqrt();
        assert!((rademacher_bound_pair(&pd, 1.0, 0.25).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn mc_on_identity_is_two_p() {
        let eye = Array2::<f64>::eye(45);
        let est = rademacher_mc(&eye, 1.0, 0.2, 4000, 1).unwrap();
        assert!((est.estimate - 0.4).abs() < 4.0 * est.stderr + 1e-3, "{est:?}");
        let zero = rademacher_mc(&eye, 1.0, 0.0, 10, 1).unwrap();
        assert_eq!(zero.estimate, 0.0);
    }

    #[test]
    fn mc_is_reproducible_across_thread_counts() {
        let dense = PairKernel::new(ls_kernel(&gen_complete(5)).unwrap(), PairMode::Kronecker)
            .materialize()
            .unwrap();
        let a = rademacher_mc(&dense, 1.0, 0.25, 300, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| rademacher_mc(&dense, 1.0, 0.25, 300, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn report_serializations_agree() {
        let k = ls_kernel(&gen_complete(4)).unwrap();
        let r = bound_report("LS-Kron", &k, PairMode::Kronecker, 1.0, 0.1, Some((200, 3))).unwrap();
        assert!(r.is_valid());
        let back: BoundReport = serde_json::from_str(&r.to_json_line().unwrap()).unwrap();
        assert_eq!(back, r);
        let mut buf = Vec::new();
        write_reports_csv(std::slice::from_ref(&r), &mut buf).unwrap();
        let mut rdr = csv::Reader::from_reader(buf.as_slice());
        let row: BoundReport = rdr.deserialize().next().unwrap().unwrap();
        assert_eq!(row, r);
    }

    #[test]
    fn generalization_examples() {
        let mut x = BoundInputs::new(PairMode::Kronecker, 3.0, 10, 0.0, 0.3);
        let conf = DEFAULT_C1 / 0.7 * ((20f64).ln() / (45.0 * 0.3)).sqrt();
        assert!((generalization_rhs(0.0, &x).unwrap() - conf).abs() < 1e-12);
        x.c = 1.0;
        x.f = 0.5;
        x.c1 = 0.0;
        assert!((generalization_rhs(0.0, &x).unwrap() - 2.0 * 2f64.sqrt() * 3.0).abs() < 1e-12);
        x.c1 = DEFAULT_C1;
        x.delta = 1.0;
        assert!(generalization_rhs(0.0, &x).is_err());
        x.delta = 0.999_999_999;
        let rhs = generalization_rhs(0.0, &x).unwrap();
        assert!((rhs - 2.0 * 2f64.sqrt() * 3.0).abs() < 1e-3);
        x.mode = PairMode::PairwiseDifference;
        x.c1 = 0.0;
        assert!((generalization_rhs(0.1, &x).unwrap() - (0.1 + 4.0 * 30f64.sqrt())).abs() < 1e-12);
        x.f = 1.0;
        assert!(generalization_rhs(0.0, &x).is_err());
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_bound(ThetaFamily::Complete, 57).unwrap(), 1.0);
        assert_eq!(theta_bound(ThetaFamily::UnionOfCliques(10), 30).unwrap(), 10.0);
        assert_eq!(theta_bound(ThetaFamily::ErdosRenyi(0.5), 100).unwrap(), 10.0);
        assert!(theta_bound(ThetaFamily::UnionOfCliques(31), 30).is_err());
        for s in ["complete", "cliques:3", "power-law", "k-colorable:2", "er:0.3", "theta:2.5"] {
            let fam: ThetaFamily = s.parse().unwrap();
            assert_eq!(fam.to_string().parse::<ThetaFamily>().unwrap(), fam);
        }
        assert!("hypercube".parse::<ThetaFamily>().is_err());
        assert!("cliques".parse::<ThetaFamily>().is_err());
    }

    #[test]
    fn sample_complexity_examples() {
        let s = sample_complexity(1.0, 100, 0.1).unwrap();
        assert!((s.f_star - 100f64.powf(-8.0 / 15.0)).abs() < 1e-12);
        assert!((s.f_star - 0.0858).abs() < 5e-5);
        assert_eq!(s.m_star, 425);
        assert!(s.admissible && !s.saturated);
        let s = sample_complexity(100.0, 100, 0.1).unwrap();
        assert_eq!(s.f_star, 1.0);
        assert!(s.saturated && !s.admissible);
        assert_eq!(s.m_star, 4950);
        assert!(sample_complexity(1.0, 100, 0.5).is_err());
        assert!(sample_complexity(0.5, 100, 0.1).is_err());
    }

    #[test]
    fn helper_matrices() {
        let a = ndarray::array![[1.0, 2.0], [3.0, 4.0]];
        let k = kron(&a, &Array2::eye(2));
        assert_eq!(k[[2, 0]], 3.0);
        assert_eq!(k[[3, 1]], 3.0);
        assert_eq!(k[[3, 0]], 0.0);
        let e = incidence_difference(3);
        assert_eq!(e.column(2).to_vec(), vec![0.0, 1.0, -1.0]);
        let slope = loglog_slope(&[1.0, 2.0, 4.0], &[3.0, 12.0, 48.0]).unwrap();
        assert!((slope - 2.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn f_star_monotone(t1 in 1.0f64..10.0, dt in 0.0f64..10.0, n in 20usize..200, eps in 0.01f64..0.2) {
            let t2 = t1 + dt;
            let a = sample_complexity(t1, n, eps).unwrap();
            let b = sample_complexity(t2, n, eps).unwrap();
            prop_assert!(a.f_star <= b.f_star);
            let c = sample_complexity(t1, n + 10, eps).unwrap();
            prop_assert!(c.f_star <= a.f_star);
            prop_assert!(a.n as f64 * (a.n as f64 - 1.0) / 2.0 * a.f_star <= a.closed_form * (1.0 + 1e-12));
        }
    }

    /// Union of k cliques, first clique preferred: the slack mass of the LS
    /// Kronecker solution stays under ϑ(G)² = k².
    #[test]
    fn slack_mass_is_bounded_by_theta_squared() {
        let mut checked = 0;
        for k in 1..=2usize {
            for n in (2 * k).max(3)..=8 {
                let g = gen_union_cliques(n, k).unwrap();
                let first = n / k + usize::from(n % k > 0);
                let pref = PreferenceVector::bipartite((0..n).map(|i| if i < first { 1.0 } else { -1.0 }).collect()).unwrap();
                for (t, c) in [0.01, 0.1, 1.0, 10.0].into_iter().enumerate() {
                    let s = sample_pairs(n, 0.7, &pref, t as u64).unwrap();
                    if s.is_empty() {
                        continue;
                    }
                    let out = pref_rank(&g, Embedding::LsKron, &s, c).unwrap();
                    let hinge = pairwise_error(&out.scores, &pref, Subset::Train(&s), Loss::Hinge).unwrap();
                    let slack = 2.0 * c * hinge * s.len() as f64;
                    assert!(slack <= (k * k) as f64 + 1e-6, "k={k} n={n} C={c}: 2C·Σξ = {slack}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }
}
