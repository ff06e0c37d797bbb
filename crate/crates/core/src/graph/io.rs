//! Text formats.
//!
//! Edge list: first non-comment line is `n`, then one `i j` pair per line,
//! 1-indexed. Lines starting with `#` and blank lines are ignored.
//!
//! Feature files use the sparse `label index:value ...` layout (1-based
//! feature indices); absent features are zero.

use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

pub fn write_edge_list(g: &Graph) -> String {
    let mut s = format!("{}\n", g.n());
    for (i, j) in g.edges() {
        let _ = writeln!(s, "{} {}", i + 1, j + 1);
    }
    s
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (first, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing node count"))?;
    let n: usize = header
        .parse()
        .map_err(|_| Error::parse(first, format!("bad node count {header:?}")))?;
    let mut g = Graph::empty(n);
    for (lineno, line) in lines {
        let mut it = line.split_whitespace();
        let mut endpoint = || -> Result<usize> {
            let tok = it
                .next()
                .ok_or_else(|| Error::parse(lineno, "expected two endpoints"))?;
            let v: usize = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad node id {tok:?}")))?;
            if v == 0 || v > n {
                return Err(Error::parse(lineno, format!("node {v} outside 1..={n}")));
            }
            Ok(v - 1)
        };
        let (i, j) = (endpoint()?, endpoint()?);
        if it.next().is_some() {
            return Err(Error::parse(lineno, "trailing tokens"));
        }
        if i == j {
            return Err(Error::parse(lineno, format!("self-loop at node {}", i + 1)));
        }
        if g.has_edge(i, j) {
            return Err(Error::parse(
                lineno,
                format!("duplicate edge {} {}", i + 1, j + 1),
            ));
        }
        g.set_edge(i, j);
    }
    Ok(g)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn write_edge_list_file(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_edge_list(g))?;
    Ok(())
}

/// Labels and dense feature vectors read from a sparse feature file.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureData {
    pub labels: Vec<f64>,
    pub features: Vec<Vec<f64>>,
}

pub fn parse_features<R: BufRead>(reader: R) -> Result<FeatureData> {
    let mut labels = Vec::new();
    let mut sparse: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut dim = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let label_tok = toks.next().unwrap_or_default();
        let label: f64 = label_tok
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad label {label_tok:?}")))?;
        let mut row = Vec::new();
        let mut last = 0usize;
        for tok in toks {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, format!("expected index:value, got {tok:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad feature index {idx:?}")))?;
            let val: f64 = val
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad feature value {val:?}")))?;
            if idx == 0 || idx <= last {
                return Err(Error::parse(
                    lineno,
                    "feature indices must be 1-based and strictly increasing",
                ));
            }
            last = idx;
            dim = dim.max(idx);
            row.push((idx - 1, val));
        }
        labels.push(label);
        sparse.push(row);
    }
    let features = sparse
        .into_iter()
        .map(|row| {
            let mut dense = vec![0.0; dim];
            for (i, v) in row {
                dense[i] = v;
            }
            dense
        })
        .collect();
    Ok(FeatureData { labels, features })
}

pub fn read_features(path: impl AsRef<Path>) -> Result<FeatureData> {
    let f = std::fs::File::open(path)?;
    parse_features(std::io::BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_union_cliques;

    #[test]
    fn edge_list_round_trip() {
        let g = gen_union_cliques(7, 3).unwrap();
        let text = write_edge_list(&g);
        assert!(text.starts_with("7\n1 2\n"));
        assert_eq!(parse_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn edge_list_rejects_bad_lines() {
        assert!(parse_edge_list("").is_err());
        assert!(parse_edge_list("3\n1 1\n").is_err());
        assert!(parse_edge_list("3\n1 2\n2 1\n").is_err());
        assert!(parse_edge_list("3\n1 4\n").is_err());
        assert!(parse_edge_list("3\n0 1\n").is_err());
        assert!(parse_edge_list("3\n1\n").is_err());
        assert!(parse_edge_list("3\n1 2 3\n").is_err());
        let g = parse_edge_list("# comment\n3\n\n1 3\n").unwrap();
        assert!(g.has_edge(0, 2));
    }

    #[test]
    fn sparse_features() {
        let text = "1 1:0.5 3:2\n-1 2:1.5\n# comment\n\n+1 1:1 2:2 3:3\n";
        let data = parse_features(text.as_bytes()).unwrap();
        assert_eq!(data.labels, vec![1.0, -1.0, 1.0]);
        assert_eq!(
            data.features,
            vec![vec![0.5, 0.0, 2.0], vec![0.0, 1.5, 0.0], vec![1.0, 2.0, 3.0]]
        );
        assert!(parse_features("x 1:1\n".as_bytes()).is_err());
        assert!(parse_features("1 0:1\n".as_bytes()).is_err());
        assert!(parse_features("1 2:1 1:1\n".as_bytes()).is_err());
        assert!(parse_features("1 2-1\n".as_bytes()).is_err());
    }
}
