//! Exact automorphism enumeration, orbit partitions and an isomorphism oracle.
//!
//! All searches run on the disjoint union of the two graphs involved (a graph
//! and itself for automorphisms), so that both halves are refined jointly and
//! a color class always pairs vertices of one side with vertices of the other.

use std::fmt::Write as _;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::graph::{disjoint_union, ColoredGraph, VertexSet};
use crate::refinement::{ind_color, partition_of, refine, refine_from};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("graph has {n} vertices, enumeration bound is {max}")]
    TooLarge { n: usize, max: usize },
    #[error("automorphism group exceeds the cap of {0} elements")]
    GroupTooLarge(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("pair {index} ({a}, {b}) is not mapped onto itself by every automorphism")]
    PairNotPreserved { index: usize, a: usize, b: usize },
}

/// Size limits for exhaustive searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_vertices: usize,
    pub max_group: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_vertices: 64,
            max_group: 1_000_000,
        }
    }
}

/// A bijection on `0..n` given by its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Panics if `images` is not a permutation of `0..images.len()`.
    pub fn from_images(images: Vec<usize>) -> Self {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            assert!(
                x < images.len() && !std::mem::replace(&mut seen[x], true),
                "not a permutation"
            );
        }
        Permutation(images)
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, v: usize) -> usize {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Permutation(inv)
    }

    /// Nontrivial cycles with 1-based points, `()` for the identity.
    pub fn cycle_notation(&self) -> String {
        let mut out = String::new();
        let mut seen = vec![false; self.0.len()];
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            out.push('(');
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    out.push(' ');
                }
                let _ = write!(out, "{}", x + 1);
                first = false;
                x = self.0[x];
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

/// Every automorphism fixing `fixed` pointwise, as an explicit list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismSet {
    n: usize,
    perms: Vec<Permutation>,
    fixed: VertexSet,
}

impl AutomorphismSet {
    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn fixed(&self) -> &VertexSet {
        &self.fixed
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.perms.contains(p)
    }

    /// The members that fix every vertex of `s`.
    pub fn stabilizer(&self, s: &VertexSet) -> AutomorphismSet {
        let fixed = self.fixed.iter().chain(s.iter()).collect();
        AutomorphismSet {
            n: self.n,
            perms: self
                .perms
                .iter()
                .filter(|p| s.iter().all(|v| p.apply(v) == v))
                .cloned()
                .collect(),
            fixed,
        }
    }
}

/// Vertex classes ordered by smallest member, members ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrbitPartition {
    pub classes: Vec<Vec<usize>>,
}

impl OrbitPartition {
    /// Orbits of the group generated by `perms`.
    pub fn from_perms<'a>(n: usize, perms: impl IntoIterator<Item = &'a Permutation>) -> Self {
        let mut uf = UnionFind::new(n);
        for p in perms {
            for (v, &w) in p.images().iter().enumerate() {
                uf.union(v, w);
            }
        }
        OrbitPartition { classes: uf.classes() }
    }

    pub fn class_of(&self, v: usize) -> &[usize] {
        self.classes
            .iter()
            .find(|c| c.contains(&v))
            .expect("vertex in some class")
    }

    /// Smallest member of each class.
    pub fn representatives(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c[0]).collect()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut y = x;
        while self.0[y] != root {
            y = std::mem::replace(&mut self.0[y], root);
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn classes(&mut self) -> Vec<Vec<usize>> {
        let roots: Vec<usize> = (0..self.0.len()).map(|v| self.find(v)).collect();
        let colors: Vec<u64> = roots.iter().map(|&r| r as u64).collect();
        partition_of(&colors)
    }
}

/// Backtracking over color-respecting bijections from `left` onto `right`,
/// pruned by joint refinement of their disjoint union.
pub(crate) struct PairSearch<'a> {
    left: &'a ColoredGraph,
    right: &'a ColoredGraph,
    union: ColoredGraph,
}

impl<'a> PairSearch<'a> {
    pub(crate) fn new(left: &'a ColoredGraph, right: &'a ColoredGraph) -> Self {
        let (union, _) = disjoint_union(left, right);
        PairSearch { left, right, union }
    }

    pub(crate) fn union(&self) -> &ColoredGraph {
        &self.union
    }

    /// Calls `visit` on every isomorphism consistent with `start` (a coloring
    /// of the union), in ascending-candidate order. `step` is the next unused
    /// individualization index.
    pub(crate) fn run<F>(&self, start: &[u64], step: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(Vec<usize>) -> ControlFlow<()>,
    {
        let colors = refine_from(&self.union, start).into_colors();
        self.descend(colors, step, visit)
    }

    fn descend<F>(&self, colors: Vec<u64>, step: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(Vec<usize>) -> ControlFlow<()>,
    {
        let n = self.left.n();
        let Some(cells) = paired_cells(&colors, n) else {
            return ControlFlow::Continue(());
        };
        let target = cells
            .iter()
            .filter(|(_, l, _)| l.len() > 1)
            .min_by_key(|(c, l, _)| (l.len(), *c));
        match target {
            None => {
                let mut map = vec![0; n];
                for (_, l, r) in &cells {
                    map[l[0]] = r[0] - n;
                }
                if self.left.is_isomorphism(self.right, &map) {
                    visit(map)
                } else {
                    ControlFlow::Continue(())
                }
            }
            Some((_, l, r)) => {
                let u = l[0];
                for &v in r {
                    let mut next = colors.clone();
                    next[u] = ind_color(step);
                    next[v] = ind_color(step);
                    let next = refine_from(&self.union, &next).into_colors();
                    self.descend(next, step + 1, visit)?;
                }
                ControlFlow::Continue(())
            }
        }
    }
}

/// `(color, left members, right members)` per color of a union coloring.
pub(crate) type PairedCells = Vec<(u64, Vec<usize>, Vec<usize>)>;

/// Groups a union coloring by color into `(color, left members, right members)`;
/// `None` when some color has different counts on the two sides.
pub(crate) fn paired_cells(colors: &[u64], offset: usize) -> Option<PairedCells> {
    let mut map: std::collections::BTreeMap<u64, (Vec<usize>, Vec<usize>)> = Default::default();
    for (v, &c) in colors.iter().enumerate() {
        let entry = map.entry(c).or_default();
        if v < offset {
            entry.0.push(v);
        } else {
            entry.1.push(v);
        }
    }
    if map.values().any(|(l, r)| l.len() != r.len()) {
        return None;
    }
    Some(map.into_iter().map(|(c, (l, r))| (c, l, r)).collect())
}

fn check_size(n: usize, limits: &SearchLimits) -> Result<(), GroupError> {
    if n > limits.max_vertices {
        return Err(GroupError::TooLarge {
            n,
            max: limits.max_vertices,
        });
    }
    Ok(())
}

pub fn automorphisms(g: &ColoredGraph, fixed: &VertexSet) -> Result<AutomorphismSet, GroupError> {
    automorphisms_with(g, fixed, &SearchLimits::default())
}

/// Color-preserving automorphisms fixing every vertex of `fixed`, in the
/// order the search visits them.
pub fn automorphisms_with(
    g: &ColoredGraph,
    fixed: &VertexSet,
    limits: &SearchLimits,
) -> Result<AutomorphismSet, GroupError> {
    let n = g.n();
    check_size(n, limits)?;
    if let Some(v) = fixed.iter().find(|&v| v >= n) {
        return Err(GroupError::VertexOutOfRange { vertex: v, n });
    }
    let search = PairSearch::new(g, g);
    let mut start = search.union().colors().to_vec();
    for (step, v) in fixed.iter().enumerate() {
        start[v] = ind_color(step);
        start[v + n] = ind_color(step);
    }
    let mut perms = Vec::new();
    let mut overflow = false;
    let _ = search.run(&start, fixed.len(), &mut |map| {
        if perms.len() == limits.max_group {
            overflow = true;
            return ControlFlow::Break(());
        }
        perms.push(Permutation(map));
        ControlFlow::Continue(())
    });
    if overflow {
        return Err(GroupError::GroupTooLarge(limits.max_group));
    }
    Ok(AutomorphismSet {
        n,
        perms,
        fixed: fixed.clone(),
    })
}

pub fn orbit_partition(auts: &AutomorphismSet) -> OrbitPartition {
    OrbitPartition::from_perms(auts.n, auts.perms())
}

/// Orbits of the full automorphism group, found by asking for one mapping
/// per candidate pair instead of listing the group.
pub fn automorphism_orbits(g: &ColoredGraph, limits: &SearchLimits) -> Result<OrbitPartition, GroupError> {
    stabilizer_orbits(g, &VertexSet::empty(), limits)
}

/// Orbits of the pointwise stabilizer of `fixed`, without listing the group.
pub fn stabilizer_orbits(
    g: &ColoredGraph,
    fixed: &VertexSet,
    limits: &SearchLimits,
) -> Result<OrbitPartition, GroupError> {
    let n = g.n();
    check_size(n, limits)?;
    if let Some(v) = fixed.iter().find(|&v| v >= n) {
        return Err(GroupError::VertexOutOfRange { vertex: v, n });
    }
    let search = PairSearch::new(g, g);
    let mut start = search.union().colors().to_vec();
    for (step, v) in fixed.iter().enumerate() {
        start[v] = ind_color(step);
        start[v + n] = ind_color(step);
    }
    let base = refine_from(search.union(), &start).into_colors();
    let step = fixed.len();
    let mut uf = UnionFind::new(n);
    for u in 0..n {
        if uf.find(u) != u {
            continue;
        }
        for v in u + 1..n {
            if base[v] != base[u] || uf.find(v) == uf.find(u) {
                continue;
            }
            let mut start = base.clone();
            start[u] = ind_color(step);
            start[v + n] = ind_color(step);
            let mut found = None;
            let _ = search.run(&start, step + 1, &mut |map| {
                found = Some(map);
                ControlFlow::Break(())
            });
            if let Some(map) = found {
                for (x, &y) in map.iter().enumerate() {
                    uf.union(x, y);
                }
            }
        }
    }
    Ok(OrbitPartition { classes: uf.classes() })
}

pub fn exact_iso(g: &ColoredGraph, h: &ColoredGraph) -> Result<Option<Vec<usize>>, GroupError> {
    exact_iso_with(g, h, &SearchLimits::default())
}

/// A color-, adjacency- and multiplicity-preserving bijection from `g` onto
/// `h`, or `None` when none exists.
pub fn exact_iso_with(
    g: &ColoredGraph,
    h: &ColoredGraph,
    limits: &SearchLimits,
) -> Result<Option<Vec<usize>>, GroupError> {
    check_size(g.n().max(h.n()), limits)?;
    if g.n() != h.n() || g.edge_count() != h.edge_count() {
        return Ok(None);
    }
    let search = PairSearch::new(g, h);
    let mut found = None;
    let _ = search.run(search.union().colors(), 0, &mut |map| {
        found = Some(map);
        ControlFlow::Break(())
    });
    Ok(found)
}

/// True when the stable partition of `g` equals its orbit partition.
pub fn is_refinable(g: &ColoredGraph) -> Result<bool, GroupError> {
    is_refinable_with(g, &SearchLimits::default())
}

pub fn is_refinable_with(g: &ColoredGraph, limits: &SearchLimits) -> Result<bool, GroupError> {
    let orbits = automorphism_orbits(g, limits)?;
    Ok(orbits.classes == refine(g).partition())
}

/// One automorphism with the indices of the listed pairs it flips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipRecord {
    pub perm: Permutation,
    pub flipped: Vec<usize>,
}

/// For every automorphism, which of `pairs` it flips.
pub fn flip_parity_report(g: &ColoredGraph, pairs: &[(usize, usize)]) -> Result<Vec<FlipRecord>, GroupError> {
    flip_parity_report_with(g, pairs, &SearchLimits::default())
}

pub fn flip_parity_report_with(
    g: &ColoredGraph,
    pairs: &[(usize, usize)],
    limits: &SearchLimits,
) -> Result<Vec<FlipRecord>, GroupError> {
    for &(a, b) in pairs {
        for v in [a, b] {
            if v >= g.n() {
                return Err(GroupError::VertexOutOfRange { vertex: v, n: g.n() });
            }
        }
    }
    let auts = automorphisms_with(g, &VertexSet::empty(), limits)?;
    auts.perms
        .into_iter()
        .map(|perm| {
            let mut flipped = Vec::new();
            for (index, &(a, b)) in pairs.iter().enumerate() {
                match (perm.apply(a), perm.apply(b)) {
                    (x, y) if x == a && y == b => {}
                    (x, y) if x == b && y == a => flipped.push(index),
                    _ => return Err(GroupError::PairNotPreserved { index, a, b }),
                }
            }
            Ok(FlipRecord { perm, flipped })
        })
        .collect()
}
