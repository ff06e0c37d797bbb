use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::Graph;
use crate::error::{Error, Result};
use crate::rng::{seeded, Rng};

pub const DEFAULT_REGULAR_RESTARTS: usize = 100;

pub fn gen_complete(n: usize) -> Graph {
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            g.set_edge(i, j);
        }
    }
    g
}

/// `k` disjoint cliques over contiguous node blocks. The first `n % k`
/// blocks hold `⌈n/k⌉` nodes, the rest `⌊n/k⌋`.
pub fn gen_union_cliques(n: usize, k: usize) -> Result<Graph> {
    if k == 0 || k > n {
        return Err(Error::Infeasible(format!(
            "union of cliques needs 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let mut g = Graph::empty(n);
    let (base, extra) = (n / k, n % k);
    let mut start = 0;
    for b in 0..k {
        let size = base + usize::from(b < extra);
        for i in start..start + size {
            for j in (i + 1)..start + size {
                g.set_edge(i, j);
            }
        }
        start += size;
    }
    Ok(g)
}

/// Random `r`-regular graph with the default restart budget.
pub fn gen_regular(n: usize, r: usize, seed: u64) -> Result<Graph> {
    gen_regular_with_restarts(n, r, seed, DEFAULT_REGULAR_RESTARTS)
}

/// Random `r`-regular graph: configuration-model pairing followed by
/// random edge swaps that remove self-loops and multi-edges. A pairing
/// that cannot be repaired is discarded and redrawn, up to `restarts` times.
pub fn gen_regular_with_restarts(n: usize, r: usize, seed: u64, restarts: usize) -> Result<Graph> {
    if r >= n.max(1) {
        return Err(Error::Infeasible(format!("degree r = {r} must be < n = {n}")));
    }
    if (n * r) % 2 == 1 {
        return Err(Error::Infeasible(format!("n * r = {} is odd", n * r)));
    }
    if r == 0 {
        return Ok(Graph::empty(n));
    }
    let mut rng = seeded(seed);
    let stubs: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat(i).take(r)).collect();
    for _ in 0..restarts.max(1) {
        let mut s = stubs.clone();
        s.shuffle(&mut rng);
        let mut edges: Vec<(usize, usize)> = s.chunks(2).map(|c| (c[0], c[1])).collect();
        if repair_pairing(&mut edges, &mut rng) {
            let mut g = Graph::empty(n);
            for (u, v) in edges {
                g.set_edge(u, v);
            }
            return Ok(g);
        }
    }
    Err(Error::Infeasible(format!(
        "could not build a simple {r}-regular graph on {n} nodes in {restarts} restarts"
    )))
}

fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn repair_pairing(edges: &mut [(usize, usize)], rng: &mut Rng) -> bool {
    let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
    for &(u, v) in edges.iter() {
        *counts.entry(key(u, v)).or_default() += 1;
    }
    let is_bad = |e: (usize, usize), counts: &HashMap<(usize, usize), usize>| {
        e.0 == e.1 || counts[&key(e.0, e.1)] > 1
    };
    let budget = 50 * edges.len() + 100;
    for _ in 0..budget {
        let Some(b) = (0..edges.len()).find(|&b| is_bad(edges[b], &counts)) else {
            return true;
        };
        if edges.len() < 2 {
            return false;
        }
        let mut o = rng.gen_range(0..edges.len() - 1);
        if o >= b {
            o += 1;
        }
        let (u, v) = edges[b];
        let (mut x, mut y) = edges[o];
        if rng.gen::<bool>() {
            std::mem::swap(&mut x, &mut y);
        }
        if u == x || v == y {
            continue;
        }
        let (n1, n2) = (key(u, x), key(v, y));
        if n1 == n2 {
            continue;
        }
        // existing multiplicities once the two old edges are removed
        let old_b = key(u, v);
        let old_o = key(x, y);
        let remaining = |e: (usize, usize)| {
            let c = counts.get(&e).copied().unwrap_or(0);
            c - usize::from(e == old_b) - usize::from(e == old_o)
        };
        if remaining(n1) > 0 || remaining(n2) > 0 {
            continue;
        }
        for e in [old_b, old_o] {
            let c = counts.get_mut(&e).unwrap();
            *c -= 1;
            if *c == 0 {
                counts.remove(&e);
            }
        }
        *counts.entry(n1).or_default() += 1;
        *counts.entry(n2).or_default() += 1;
        edges[b] = (u, x);
        edges[o] = (v, y);
    }
    edges.iter().all(|&e| !is_bad(e, &counts))
}

/// G(n, q): every pair present independently with probability `q`.
/// Pairs are visited in lexicographic order, one uniform draw each.
pub fn gen_erdos_renyi(n: usize, q: f64, seed: u64) -> Result<Graph> {
    check_probability("q", q)?;
    let mut rng = seeded(seed);
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < q {
                g.set_edge(i, j);
            }
        }
    }
    Ok(g)
}

/// Two equal clusters `0..n/2` and `n/2..n`: within-cluster pairs appear
/// with probability `p`, cross pairs with probability `q`. Uses the same
/// draw sequence as [`gen_erdos_renyi`], so `p == q` reproduces it exactly.
pub fn gen_two_cluster(n: usize, p: f64, q: f64, seed: u64) -> Result<Graph> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    if q > p {
        return Err(Error::invalid(format!("two-cluster graph needs q <= p, got p = {p}, q = {q}")));
    }
    if n % 2 == 1 {
        return Err(Error::invalid(format!("two-cluster graph needs even n, got {n}")));
    }
    let half = n / 2;
    let mut rng = seeded(seed);
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let prob = if (i < half) == (j < half) { p } else { q };
            if rng.gen::<f64>() < prob {
                g.set_edge(i, j);
            }
        }
    }
    Ok(g)
}

fn check_probability(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} = {v} is not a probability")))
    }
}
