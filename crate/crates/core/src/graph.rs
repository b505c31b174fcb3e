//! Vertex-colored undirected multigraphs and the `cgraph` text format.
//!
//! Vertices are `0..n` internally and 1-based in files. Edge multiplicity is
//! stored on the edge, never as repeated entries, and self-loops are rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

/// Colors in `cgraph` files must stay below this bound; the range above it is
/// reserved for individualization identifiers.
pub const MAX_INPUT_COLOR: u64 = (1 << 62) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: malformed header, expected `p cgraph <n> <m>`")]
    MalformedHeader { line: usize },
    #[error("line {line}: malformed line `{text}`")]
    MalformedLine { line: usize, text: String },
    #[error("line {line}: vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { line: usize, vertex: u64, n: usize },
    #[error("line {line}: duplicate edge {u} {v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: self-loop on vertex {v}")]
    SelfLoopLine { line: usize, v: usize },
    #[error("line {line}: duplicate color line for vertex {v}")]
    DuplicateColor { line: usize, v: usize },
    #[error("line {line}: color {color} exceeds {max}", max = MAX_INPUT_COLOR)]
    ColorTooLarge { line: usize, color: u64 },
    #[error("line {line}: multiplicity must be positive")]
    ZeroMultiplicity { line: usize },
    #[error("header announces {expected} edge lines, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("missing `p cgraph` header")]
    MissingHeader,
    #[error("input is not valid UTF-8")]
    NotUtf8,
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("unknown builtin graph `{0}`")]
    UnknownBuiltin(String),
    #[error("invalid parameters for builtin `{name}`: {reason}")]
    InvalidBuiltinParams { name: String, reason: String },
}

/// A sorted, duplicate-free set of vertex indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = members.into_iter().collect();
        VertexSet(set.into_iter().collect())
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

/// Vertex-colored multigraph in compressed adjacency form.
///
/// Neighbor lists are sorted, so two graphs with the same vertex colors and
/// the same edge multiset compare equal field-for-field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    colors: Vec<u64>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    mults: Vec<u32>,
}

impl ColoredGraph {
    /// Graph with `n` isolated vertices, all colored 0.
    pub fn empty(n: usize) -> Self {
        GraphBuilder::new(n).build()
    }

    /// Builds a graph from an edge list; repeated pairs add up their multiplicities.
    pub fn from_edges(
        colors: Vec<u64>,
        edges: impl IntoIterator<Item = (usize, usize, u32)>,
    ) -> Result<Self, GraphError> {
        let mut b = GraphBuilder::new(colors.len());
        b.colors = colors;
        for (u, v, m) in edges {
            b.add_edge(u, v, m)?;
        }
        Ok(b.build())
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    /// Number of adjacent vertex pairs (multiplicity not counted).
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn color(&self, v: usize) -> u64 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u64] {
        &self.colors
    }

    /// Neighbors of `v` with edge multiplicity, ascending by neighbor.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.mults[range].iter().copied())
    }

    pub(crate) fn neighbor_slices(&self, v: usize) -> (&[usize], &[u32]) {
        let range = self.offsets[v]..self.offsets[v + 1];
        (&self.targets[range.clone()], &self.mults[range])
    }

    /// Number of distinct neighbors.
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sum of multiplicities over incident edges.
    pub fn weighted_degree(&self, v: usize) -> u64 {
        self.neighbors(v).map(|(_, m)| u64::from(m)).sum()
    }

    /// Multiplicity of the edge `uv`, 0 when absent.
    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        let (t, m) = self.neighbor_slices(u);
        match t.binary_search(&v) {
            Ok(i) => m[i],
            Err(_) => 0,
        }
    }

    /// Edges as `(u, v, mult)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, m)| (u, v, m))
        })
    }

    /// Same structure with a different vertex coloring.
    pub fn with_colors(&self, colors: Vec<u64>) -> Self {
        assert_eq!(colors.len(), self.n(), "coloring length mismatch");
        ColoredGraph { colors, ..self.clone() }
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n(), "permutation length mismatch");
        let mut colors = vec![0; self.n()];
        for (v, &p) in perm.iter().enumerate() {
            colors[p] = self.colors[v];
        }
        let edges = self.edges().map(|(u, v, m)| (perm[u], perm[v], m));
        ColoredGraph::from_edges(colors, edges).expect("relabeling preserves validity")
    }

    /// The subgraph induced on `0..len` shifted by `start`.
    pub fn induced_range(&self, start: usize, len: usize) -> Self {
        let colors = self.colors[start..start + len].to_vec();
        let edges = self
            .edges()
            .filter(|&(u, v, _)| u >= start && v < start + len)
            .map(|(u, v, m)| (u - start, v - start, m))
            .collect::<Vec<_>>();
        ColoredGraph::from_edges(colors, edges).expect("induced subgraph is valid")
    }

    /// True when `map` is a color-, adjacency- and multiplicity-preserving
    /// bijection from `self` onto `other`.
    pub fn is_isomorphism(&self, other: &ColoredGraph, map: &[usize]) -> bool {
        let n = self.n();
        if other.n() != n || map.len() != n || self.edge_count() != other.edge_count() {
            return false;
        }
        let mut seen = vec![false; n];
        for &t in map {
            if t >= n || std::mem::replace(&mut seen[t], true) {
                return false;
            }
        }
        if (0..n).any(|v| self.colors[v] != other.colors[map[v]]) {
            return false;
        }
        self.edges().all(|(u, v, m)| other.multiplicity(map[u], map[v]) == m)
    }

    /// Serializes to the `cgraph` format.
    pub fn to_cgraph(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p cgraph {} {}", self.n(), self.edge_count());
        for (v, &c) in self.colors.iter().enumerate() {
            if c != 0 {
                let _ = writeln!(out, "c {} {}", v + 1, c);
            }
        }
        for (u, v, m) in self.edges() {
            if m > 1 {
                let _ = writeln!(out, "e {} {} {}", u + 1, v + 1, m);
            } else {
                let _ = writeln!(out, "e {} {}", u + 1, v + 1);
            }
        }
        out
    }
}

/// Incremental construction of a [`ColoredGraph`].
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    colors: Vec<u64>,
    edges: BTreeMap<(usize, usize), u32>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder {
            colors: vec![0; n],
            edges: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    /// Appends a vertex with the given color and returns its index.
    pub fn add_vertex(&mut self, color: u64) -> usize {
        self.colors.push(color);
        self.colors.len() - 1
    }

    pub fn set_color(&mut self, v: usize, color: u64) {
        self.colors[v] = color;
    }

    /// Adds `mult` to the multiplicity of `uv`.
    pub fn add_edge(&mut self, u: usize, v: usize, mult: u32) -> Result<(), GraphError> {
        let n = self.n();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::OutOfRange { vertex: x, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if mult > 0 {
            *self.edges.entry((u.min(v), u.max(v))).or_insert(0) += mult;
        }
        Ok(())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains_key(&(u.min(v), u.max(v)))
    }

    pub fn build(self) -> ColoredGraph {
        let n = self.colors.len();
        let mut lists: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
        for (&(u, v), &m) in &self.edges {
            lists[u].push((v, m));
            lists[v].push((u, m));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(2 * self.edges.len());
        let mut mults = Vec::with_capacity(2 * self.edges.len());
        offsets.push(0);
        for mut list in lists {
            list.sort_unstable();
            for (t, m) in list {
                targets.push(t);
                mults.push(m);
            }
            offsets.push(targets.len());
        }
        ColoredGraph {
            colors: self.colors,
            offsets,
            targets,
            mults,
        }
    }
}

/// Parses the `cgraph` text format.
pub fn parse_graph(text: &[u8]) -> Result<ColoredGraph, GraphError> {
    let text = std::str::from_utf8(text).map_err(|_| GraphError::NotUtf8)?;
    let mut builder: Option<GraphBuilder> = None;
    let mut expected_edges = 0;
    let mut edge_lines = 0;
    let mut colored = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let malformed = || GraphError::MalformedLine {
            line,
            text: trimmed.to_string(),
        };
        let Some(b) = builder.as_mut() else {
            match fields.as_slice() {
                ["p", "cgraph", n, m] => {
                    let n: usize = n.parse().map_err(|_| GraphError::MalformedHeader { line })?;
                    expected_edges = m.parse().map_err(|_| GraphError::MalformedHeader { line })?;
                    builder = Some(GraphBuilder::new(n));
                    continue;
                }
                _ => return Err(GraphError::MalformedHeader { line }),
            }
        };
        let n = b.n();
        let vertex = |s: &str| -> Result<usize, GraphError> {
            let v: u64 = s.parse().map_err(|_| malformed())?;
            if v == 0 || v > n as u64 {
                return Err(GraphError::VertexOutOfRange { line, vertex: v, n });
            }
            Ok(v as usize - 1)
        };
        match fields.as_slice() {
            ["c", v, c] => {
                let v = vertex(v)?;
                let color: u64 = c.parse().map_err(|_| malformed())?;
                if color > MAX_INPUT_COLOR {
                    return Err(GraphError::ColorTooLarge { line, color });
                }
                if !colored.insert(v) {
                    return Err(GraphError::DuplicateColor { line, v: v + 1 });
                }
                b.set_color(v, color);
            }
            ["e", u, v, rest @ ..] if rest.len() <= 1 => {
                let (u, v) = (vertex(u)?, vertex(v)?);
                let mult: u32 = match rest.first() {
                    Some(m) => m.parse().map_err(|_| malformed())?,
                    None => 1,
                };
                if mult == 0 {
                    return Err(GraphError::ZeroMultiplicity { line });
                }
                if u == v {
                    return Err(GraphError::SelfLoopLine { line, v: u + 1 });
                }
                if b.has_edge(u, v) {
                    return Err(GraphError::DuplicateEdge {
                        line,
                        u: u.min(v) + 1,
                        v: u.max(v) + 1,
                    });
                }
                b.add_edge(u, v, mult)?;
                edge_lines += 1;
            }
            ["p", ..] => return Err(GraphError::MalformedHeader { line }),
            _ => return Err(malformed()),
        }
    }
    let b = builder.ok_or(GraphError::MissingHeader)?;
    if edge_lines != expected_edges {
        return Err(GraphError::EdgeCountMismatch {
            expected: expected_edges,
            found: edge_lines,
        });
    }
    Ok(b.build())
}

/// Cycle, path, complete graph or the Frucht graph, all vertices colored 0.
pub fn builtin(name: &str, params: &[usize]) -> Result<ColoredGraph, GraphError> {
    let invalid = |reason: &str| GraphError::InvalidBuiltinParams {
        name: name.to_string(),
        reason: reason.to_string(),
    };
    let single = |min: usize| -> Result<usize, GraphError> {
        match params {
            [n] if *n >= min => Ok(*n),
            [_] => Err(invalid(&format!("size must be at least {min}"))),
            _ => Err(invalid("expected exactly one size parameter")),
        }
    };
    let mut b;
    match name {
        "cycle" => {
            let n = single(3)?;
            b = GraphBuilder::new(n);
            for v in 0..n {
                b.add_edge(v, (v + 1) % n, 1)?;
            }
        }
        "path" => {
            let n = single(1)?;
            b = GraphBuilder::new(n);
            for v in 1..n {
                b.add_edge(v - 1, v, 1)?;
            }
        }
        "complete" => {
            let n = single(1)?;
            b = GraphBuilder::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    b.add_edge(u, v, 1)?;
                }
            }
        }
        "frucht" => {
            if !params.is_empty() {
                return Err(invalid("takes no parameters"));
            }
            // LCF notation [-5,-2,-4,2,5,-2,2,5,-2,-5,4,2] on the 12-cycle.
            const LCF: [i64; 12] = [-5, -2, -4, 2, 5, -2, 2, 5, -2, -5, 4, 2];
            b = GraphBuilder::new(12);
            for v in 0..12usize {
                b.add_edge(v, (v + 1) % 12, 1)?;
            }
            for (v, &jump) in LCF.iter().enumerate() {
                let w = (v as i64 + jump).rem_euclid(12) as usize;
                if !b.has_edge(v, w) {
                    b.add_edge(v, w, 1)?;
                }
            }
        }
        other => return Err(GraphError::UnknownBuiltin(other.to_string())),
    }
    Ok(b.build())
}

/// Disjoint union; vertices of `h` are shifted by the returned offset `g.n()`.
pub fn disjoint_union(g: &ColoredGraph, h: &ColoredGraph) -> (ColoredGraph, usize) {
    let offset = g.n();
    let colors = g.colors().iter().chain(h.colors()).copied().collect();
    let edges = g
        .edges()
        .chain(h.edges().map(|(u, v, m)| (u + offset, v + offset, m)))
        .collect::<Vec<_>>();
    let union = ColoredGraph::from_edges(colors, edges).expect("union of valid graphs");
    (union, offset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degrees(g: &ColoredGraph) -> Vec<u64> {
        (0..g.n()).map(|v| g.weighted_degree(v)).collect()
    }

    #[test]
    fn parses_path() {
        let g = parse_graph(b"p cgraph 3 2\ne 1 2\ne 2 3\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.colors().iter().all(|&c| c == 0));
        assert_eq!(g.multiplicity(0, 1), 1);
        assert_eq!(g.multiplicity(0, 2), 0);
    }

    #[test]
    fn parses_colors_and_multiplicity() {
        let g = parse_graph(b"p cgraph 2 1\nc 1 5\ne 1 2 1\n").unwrap();
        assert_eq!(g.colors(), &[5, 0]);
        assert_eq!(g.multiplicity(1, 0), 1);
        let g = parse_graph(b"# comment\np cgraph 2 1\n\ne 2 1 2\n").unwrap();
        assert_eq!(g.multiplicity(0, 1), 2);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_graph(b"p cgraph 2 1\ne 1 3\n"),
            Err(GraphError::VertexOutOfRange { vertex: 3, .. })
        ));
        assert!(matches!(
            parse_graph(b"p graph 2 1\n"),
            Err(GraphError::MalformedHeader { line: 1 })
        ));
        assert!(matches!(
            parse_graph(b"p cgraph 3 2\ne 1 2\ne 2 1\n"),
            Err(GraphError::DuplicateEdge { u: 1, v: 2, .. })
        ));
        assert!(matches!(
            parse_graph(b"p cgraph 3 1\ne 2 2\n"),
            Err(GraphError::SelfLoopLine { v: 2, .. })
        ));
        assert!(matches!(
            parse_graph(b"p cgraph 3 2\ne 1 2\n"),
            Err(GraphError::EdgeCountMismatch { expected: 2, found: 1 })
        ));
        assert!(matches!(
            parse_graph(b"p cgraph 3 1\ne 1 2 0\n"),
            Err(GraphError::ZeroMultiplicity { .. })
        ));
        assert!(matches!(parse_graph(b""), Err(GraphError::MissingHeader)));
        assert!(matches!(
            parse_graph(b"p cgraph 2 0\nx 1\n"),
            Err(GraphError::MalformedLine { line: 2, .. })
        ));
    }

    #[test]
    fn serialization_is_exact() {
        let g = ColoredGraph::from_edges(vec![0, 3, 0, 7], [(2, 3, 2), (0, 1, 1), (1, 2, 1)]).unwrap();
        assert_eq!(g.to_cgraph(), "p cgraph 4 3\nc 2 3\nc 4 7\ne 1 2\ne 2 3\ne 3 4 2\n");
    }

    #[test]
    fn builtins() {
        let c6 = builtin("cycle", &[6]).unwrap();
        assert_eq!((c6.n(), c6.edge_count()), (6, 6));
        assert!(degrees(&c6).iter().all(|&d| d == 2));

        let frucht = builtin("frucht", &[]).unwrap();
        assert_eq!((frucht.n(), frucht.edge_count()), (12, 18));
        assert!(degrees(&frucht).iter().all(|&d| d == 3));

        let p1 = builtin("path", &[1]).unwrap();
        assert_eq!((p1.n(), p1.edge_count()), (1, 0));

        let k4 = builtin("complete", &[4]).unwrap();
        assert_eq!(k4.edge_count(), 6);

        assert!(matches!(
            builtin("cycle", &[2]),
            Err(GraphError::InvalidBuiltinParams { .. })
        ));
        assert!(matches!(builtin("petersen", &[]), Err(GraphError::UnknownBuiltin(_))));
    }

    #[test]
    fn union_sizes() {
        let k2 = builtin("complete", &[2]).unwrap();
        let (u, off) = disjoint_union(&k2, &k2);
        assert_eq!((u.n(), u.edge_count(), off), (4, 2, 2));

        let c3 = builtin("cycle", &[3]).unwrap();
        let p2 = builtin("path", &[2]).unwrap();
        let (u, _) = disjoint_union(&c3, &p2);
        assert_eq!((u.n(), u.edge_count()), (5, 4));
        let mut expect = degrees(&c3);
        expect.extend(degrees(&p2));
        assert_eq!(degrees(&u), expect);

        let (u, off) = disjoint_union(&c3, &ColoredGraph::empty(0));
        assert_eq!(u, c3);
        assert_eq!(off, 3);
    }

    #[test]
    fn isomorphism_check() {
        let p3 = builtin("path", &[3]).unwrap();
        let relabeled = p3.relabel(&[1, 0, 2]);
        assert!(p3.is_isomorphism(&relabeled, &[1, 0, 2]));
        assert!(!p3.is_isomorphism(&relabeled, &[0, 1, 2]));
        assert!(!p3.is_isomorphism(&relabeled, &[1, 1, 2]));
    }

    #[test]
    fn rejects_self_loop_in_builder() {
        let mut b = GraphBuilder::new(2);
        assert_eq!(b.add_edge(1, 1, 1), Err(GraphError::SelfLoop(1)));
        assert!(matches!(
            b.add_edge(0, 2, 1),
            Err(GraphError::OutOfRange { vertex: 2, n: 2 })
        ));
    }
}
