//! Undirected simple contact graphs.
//!
//! A [`Graph`] is immutable once built. Adjacency is stored in compressed
//! sparse row form with both orientations of every edge, so `neighbors(i)`
//! is a sorted slice and the adjacency matrix is implicitly symmetric with a
//! zero diagonal.
//!
//! The text format is one edge per line, two whitespace-separated node ids,
//! `#` starting a comment line. Node ids are taken literally: the graph has
//! `1 + max id` nodes. A `# nodes <n>` comment line declares extra trailing
//! isolated nodes; [`Graph::to_edge_list`] emits it only when needed, so the
//! export of a loaded file round-trips byte for byte.

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    columns: Vec<usize>,
    degrees: Vec<usize>,
}

impl Graph {
    /// Builds a graph on `n` nodes from unordered pairs. Duplicates (in either
    /// orientation) are collapsed.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut pairs = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::SelfLoop { line: 0, node: a });
            }
            if a >= n || b >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) references a node outside 0..{n}"
                )));
            }
            pairs.push((a, b));
            pairs.push((b, a));
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut offsets = vec![0usize; n + 1];
        for &(a, _) in &pairs {
            offsets[a + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let columns: Vec<usize> = pairs.iter().map(|&(_, b)| b).collect();
        let degrees = (0..n).map(|i| offsets[i + 1] - offsets[i]).collect();
        Ok(Self {
            n,
            offsets,
            columns,
            degrees,
        })
    }

    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            offsets: vec![0; n + 1],
            columns: Vec::new(),
            degrees: vec![0; n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.columns.len() / 2
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn degree(&self, node: usize) -> usize {
        self.degrees[node]
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edge_count() as f64 / self.n as f64
        }
    }

    /// Sorted neighbor ids of `node`.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.columns[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && self.neighbors(a).binary_search(&b).is_ok()
    }

    /// CSR row offsets (length `n + 1`).
    pub fn row_offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// CSR column indices, both orientations of every edge.
    pub fn column_indices(&self) -> &[usize] {
        &self.columns
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// `y = A x`.
    pub fn adjacency_apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            *yi = self.neighbors(i).iter().map(|&j| x[j]).sum();
        }
    }

    /// Dense adjacency matrix.
    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for &j in self.neighbors(i) {
                a[(i, j)] = 1.0;
            }
        }
        a
    }

    /// Connected components as a label per node, labels numbered from 0 in
    /// order of their smallest node.
    pub fn component_labels(&self) -> (usize, Vec<usize>) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &w in self.neighbors(v) {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (count, label)
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.component_labels().0 == 1
    }

    /// Parses the edge-list text format.
    pub fn from_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut edges = Vec::new();
        let mut declared = 0usize;
        let mut max_id: Option<usize> = None;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                let mut words = comment.split_whitespace();
                if words.next() == Some("nodes") {
                    let n = words
                        .next()
                        .and_then(|w| w.parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse {
                            line: lineno,
                            message: "malformed `# nodes <n>` directive".into(),
                        })?;
                    declared = declared.max(n);
                }
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let mut next_id = || -> Result<usize> {
                let token = tokens.next().ok_or_else(|| Error::Parse {
                    line: lineno,
                    message: "expected two node ids".into(),
                })?;
                token.parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid node id `{token}`"),
                })
            };
            let a = next_id()?;
            let b = next_id()?;
            if let Some(extra) = tokens.next() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("unexpected token `{extra}`"),
                });
            }
            if a == b {
                return Err(Error::SelfLoop { line: lineno, node: a });
            }
            max_id = Some(max_id.map_or(a.max(b), |m| m.max(a).max(b)));
            edges.push((a, b));
        }
        let n = max_id.map_or(0, |m| m + 1).max(declared);
        Self::from_edges(n, edges)
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        Self::from_edge_list(text.as_bytes())
    }

    /// Canonical edge-list text: edges `i j` with `i < j` in sorted order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let implied = self.columns.iter().copied().max().map_or(0, |m| m + 1);
        if self.n > implied {
            out.push_str(&format!("# nodes {}\n", self.n));
        }
        for (i, j) in self.edges() {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }

    pub fn generate(kind: GraphKind, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one node".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges: Vec<(usize, usize)> = match kind {
            GraphKind::Complete => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
            GraphKind::Star => (1..n).map(|j| (0, j)).collect(),
            GraphKind::Path => (1..n).map(|j| (j - 1, j)).collect(),
            GraphKind::Cycle => {
                let mut e: Vec<_> = (1..n).map(|j| (j - 1, j)).collect();
                if n >= 3 {
                    e.push((0, n - 1));
                }
                e
            }
            GraphKind::ErdosRenyi { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidParameter(format!("edge probability {p} not in [0, 1]")));
                }
                let mut e = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        if rng.random::<f64>() < p {
                            e.push((i, j));
                        }
                    }
                }
                e
            }
            GraphKind::PreferentialAttachment { m0 } => {
                if m0 == 0 {
                    return Err(Error::InvalidParameter("m0 must be at least 1".into()));
                }
                preferential_attachment(n, m0, &mut rng)
            }
        };
        Self::from_edges(n, edges)
    }
}

/// Seed clique on `min(m0 + 1, n)` nodes; every later node attaches to `m0`
/// distinct earlier nodes drawn with probability proportional to degree.
fn preferential_attachment(n: usize, m0: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let core = (m0 + 1).min(n);
    let mut edges = Vec::new();
    // every endpoint appears once per incident edge
    let mut endpoints = Vec::new();
    for i in 0..core {
        for j in i + 1..core {
            edges.push((i, j));
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    let mut targets = Vec::with_capacity(m0);
    for v in core..n {
        targets.clear();
        while targets.len() < m0 {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        targets.sort_unstable();
        for &t in &targets {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    edges
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GraphKind {
    Complete,
    Star,
    Cycle,
    Path,
    ErdosRenyi { p: f64 },
    PreferentialAttachment { m0: usize },
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::Complete => write!(f, "complete"),
            GraphKind::Star => write!(f, "star"),
            GraphKind::Cycle => write!(f, "cycle"),
            GraphKind::Path => write!(f, "path"),
            GraphKind::ErdosRenyi { p } => write!(f, "erdos_renyi({p})"),
            GraphKind::PreferentialAttachment { m0 } => write!(f, "preferential_attachment({m0})"),
        }
    }
}

/// Accepts `complete`, `star`, `cycle`, `path`, `erdos_renyi(p)` / `er:p`
/// and `preferential_attachment(m0)` / `pa:m0`.
impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = if let Some((name, rest)) = s.split_once('(') {
            let arg = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::InvalidParameter(format!("unbalanced parentheses in `{s}`")))?;
            (name.trim(), Some(arg.trim()))
        } else if let Some((name, arg)) = s.split_once(':') {
            (name.trim(), Some(arg.trim()))
        } else {
            (s, None)
        };
        let bad = || Error::InvalidParameter(format!("unknown graph kind `{s}`"));
        match (name, arg) {
            ("complete", None) => Ok(GraphKind::Complete),
            ("star", None) => Ok(GraphKind::Star),
            ("cycle", None) => Ok(GraphKind::Cycle),
            ("path", None) => Ok(GraphKind::Path),
            ("erdos_renyi" | "er", Some(a)) => Ok(GraphKind::ErdosRenyi {
                p: a.parse().map_err(|_| bad())?,
            }),
            ("preferential_attachment" | "pa", Some(a)) => Ok(GraphKind::PreferentialAttachment {
                m0: a.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_simple(g: &Graph) {
        let a = g.adjacency_matrix();
        for i in 0..g.node_count() {
            assert_eq!(a[(i, i)], 0.0);
            for j in 0..g.node_count() {
                assert_eq!(a[(i, j)], a[(j, i)]);
            }
            assert!(g.neighbors(i).windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
    }

    #[test]
    fn path_from_text() {
        let g = Graph::parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degrees(), &[1, 2, 1]);
        assert_simple(&g);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = Graph::parse_edge_list("0 1\n1 0\n").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn self_loop_rejected_with_line() {
        match Graph::parse_edge_list("0 0") {
            Err(Error::SelfLoop { line: 1, node: 0 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match Graph::parse_edge_list("# c\n0 1\n\n2 2\n") {
            Err(Error::SelfLoop { line: 4, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_tokens_rejected_with_line() {
        for (text, line) in [("0 x", 1), ("0 1\n-1 2", 2), ("0 1\n3", 2), ("0 1 2", 1), ("1.5 2", 1)] {
            match Graph::parse_edge_list(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = Graph::parse_edge_list("# header\n\n  # indented\n2 0\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.degrees(), &[1, 0, 1]);
    }

    #[test]
    fn export_round_trips() {
        let text = "0 1\n0 3\n1 2\n";
        let g = Graph::parse_edge_list(text).unwrap();
        assert_eq!(g.to_edge_list(), text);
        let unsorted = Graph::parse_edge_list("3 0\n2 1\n1 0\n1 0\n").unwrap();
        assert_eq!(unsorted.to_edge_list(), text);
    }

    #[test]
    fn trailing_isolated_nodes_survive_export() {
        let g = Graph::generate(GraphKind::Star, 1, 0).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text, "# nodes 1\n");
        assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn star_and_complete() {
        let s = Graph::generate(GraphKind::Star, 5, 0).unwrap();
        assert_eq!(s.degrees(), &[4, 1, 1, 1, 1]);
        let k3 = Graph::generate(GraphKind::Complete, 3, 0).unwrap();
        assert_eq!(k3.edge_count(), 3);
        assert_simple(&k3);
    }

    #[test]
    fn cycle_and_path_small_cases() {
        assert_eq!(
            Graph::generate(GraphKind::Cycle, 4, 0).unwrap().degrees(),
            &[2, 2, 2, 2]
        );
        assert_eq!(Graph::generate(GraphKind::Cycle, 2, 0).unwrap().edge_count(), 1);
        assert_eq!(Graph::generate(GraphKind::Path, 1, 0).unwrap().edge_count(), 0);
    }

    #[test]
    fn random_generators_are_seeded() {
        let a = Graph::generate(GraphKind::ErdosRenyi { p: 0.5 }, 20, 7).unwrap();
        let b = Graph::generate(GraphKind::ErdosRenyi { p: 0.5 }, 20, 7).unwrap();
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
        let c = Graph::generate(GraphKind::ErdosRenyi { p: 0.5 }, 20, 8).unwrap();
        assert_ne!(a, c);

        let pa = Graph::generate(GraphKind::PreferentialAttachment { m0: 2 }, 50, 3).unwrap();
        assert_eq!(
            pa,
            Graph::generate(GraphKind::PreferentialAttachment { m0: 2 }, 50, 3).unwrap()
        );
        // clique of 3 then 2 edges per new node
        assert_eq!(pa.edge_count(), 3 + 2 * 47);
        assert!(pa.is_connected());
        assert_simple(&pa);
    }

    #[test]
    fn generator_parameters_validated() {
        assert!(Graph::generate(GraphKind::ErdosRenyi { p: 1.5 }, 5, 0).is_err());
        assert!(Graph::generate(GraphKind::ErdosRenyi { p: -0.1 }, 5, 0).is_err());
        assert!(Graph::generate(GraphKind::PreferentialAttachment { m0: 0 }, 5, 0).is_err());
        assert!(Graph::generate(GraphKind::Complete, 0, 0).is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("star".parse::<GraphKind>().unwrap(), GraphKind::Star);
        assert_eq!(
            "er:0.25".parse::<GraphKind>().unwrap(),
            GraphKind::ErdosRenyi { p: 0.25 }
        );
        assert_eq!(
            "preferential_attachment(3)".parse::<GraphKind>().unwrap(),
            GraphKind::PreferentialAttachment { m0: 3 }
        );
        for k in [
            GraphKind::Cycle,
            GraphKind::ErdosRenyi { p: 0.5 },
            GraphKind::PreferentialAttachment { m0: 2 },
        ] {
            assert_eq!(k.to_string().parse::<GraphKind>().unwrap(), k);
        }
        assert!("wheel".parse::<GraphKind>().is_err());
        assert!("er".parse::<GraphKind>().is_err());
    }

    #[test]
    fn connectivity() {
        assert!(!Graph::parse_edge_list("0 1\n2 3").unwrap().is_connected());
        assert!(Graph::generate(GraphKind::Path, 6, 0).unwrap().is_connected());
        assert!(!Graph::empty(0).is_connected());
    }
}
