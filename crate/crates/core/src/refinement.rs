//! Color refinement with structure-determined color names.
//!
//! Every round maps each vertex to its signature (own color, sorted list of
//! `(neighbor color, weighted count)`), sorts the distinct signatures and
//! numbers them consecutively from the first unused identifier. Identifiers
//! therefore depend only on the refinement history, so colorings of different
//! graphs (or of different runs) can be compared directly.
//!
//! Identifiers at or above [`RESERVED_BASE`] are reserved for
//! individualization: step `i` uses [`ind_color`]`(i)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{ColoredGraph, VertexSet};

/// First reserved identifier. Fresh names are always allocated below it.
pub const RESERVED_BASE: u64 = 1 << 63;

/// Identifier given to the vertex individualized at step `step`.
pub fn ind_color(step: usize) -> u64 {
    u64::MAX - step as u64
}

pub fn is_reserved(color: u64) -> bool {
    color >= RESERVED_BASE
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RefineError {
    #[error("vertex {0} appears more than once in the individualization sequence")]
    RepeatedVertex(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("coloring is not stable: vertices {u} and {v} share a class but differ in neighbor counts")]
    NotStable { u: usize, v: usize },
    #[error("coloring has {got} entries, graph has {n} vertices")]
    LengthMismatch { got: usize, n: usize },
}

/// Which implementation computes the rounds. Both produce identical output.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Engine {
    /// Re-examines only cells adjacent to a cell that split in the previous round.
    #[default]
    Worklist,
    /// Recomputes every signature every round.
    Naive,
}

/// A coloring that is fixed under one further refinement round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableColoring {
    colors: Vec<u64>,
    rounds: usize,
}

impl StableColoring {
    pub(crate) fn new(colors: Vec<u64>, rounds: usize) -> Self {
        StableColoring { colors, rounds }
    }

    pub fn colors(&self) -> &[u64] {
        &self.colors
    }

    pub fn into_colors(self) -> Vec<u64> {
        self.colors
    }

    pub fn color(&self, v: usize) -> u64 {
        self.colors[v]
    }

    /// Rounds executed, including the final round that detected stability.
    pub fn round_count(&self) -> usize {
        self.rounds
    }

    /// Color classes keyed by color, each with ascending members.
    pub fn classes(&self) -> BTreeMap<u64, Vec<usize>> {
        let mut map: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (v, &c) in self.colors.iter().enumerate() {
            map.entry(c).or_default().push(v);
        }
        map
    }

    pub fn num_classes(&self) -> usize {
        self.classes().len()
    }

    /// The classes as a set partition, ordered by smallest member.
    pub fn partition(&self) -> Vec<Vec<usize>> {
        partition_of(&self.colors)
    }

    pub fn is_discrete(&self) -> bool {
        is_discrete_colors(&self.colors)
    }

    /// Lines `v <vertex> <color>` in vertex order, 1-based vertices.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (v, &c) in self.colors.iter().enumerate() {
            let _ = writeln!(out, "v {} {}", v + 1, c);
        }
        out
    }
}

/// True when every class of the coloring is a singleton.
pub fn is_discrete(pi: &StableColoring) -> bool {
    pi.is_discrete()
}

pub(crate) fn is_discrete_colors(colors: &[u64]) -> bool {
    let mut sorted = colors.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).all(|w| w[0] != w[1])
}

/// Set partition induced by a coloring, classes ordered by smallest member.
pub fn partition_of(colors: &[u64]) -> Vec<Vec<usize>> {
    let mut index: BTreeMap<u64, usize> = BTreeMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (v, &c) in colors.iter().enumerate() {
        let i = *index.entry(c).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[i].push(v);
    }
    classes
}

/// Refines the graph's own vertex colors.
pub fn refine(g: &ColoredGraph) -> StableColoring {
    refine_with(g, g.colors(), Engine::default())
}

/// Refines starting from `start` instead of the graph's colors.
///
/// Panics if `start.len() != g.n()`.
pub fn refine_from(g: &ColoredGraph, start: &[u64]) -> StableColoring {
    refine_with(g, start, Engine::default())
}

pub fn refine_with(g: &ColoredGraph, start: &[u64], engine: Engine) -> StableColoring {
    assert_eq!(start.len(), g.n(), "start coloring length mismatch");
    let (colors, rounds) = match engine {
        Engine::Worklist => worklist(g, start),
        Engine::Naive => naive(g, start),
    };
    StableColoring::new(colors, rounds)
}

fn first_free(start: &[u64]) -> u64 {
    start
        .iter()
        .copied()
        .filter(|&c| !is_reserved(c))
        .max()
        .map_or(0, |c| c + 1)
}

fn count_distinct(colors: &[u64]) -> usize {
    let mut sorted = colors.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len()
}

type Signature = (u64, Vec<(u64, u64)>);

fn naive(g: &ColoredGraph, start: &[u64]) -> (Vec<u64>, usize) {
    let mut cur = start.to_vec();
    let mut base = first_free(start);
    let mut classes = count_distinct(&cur);
    let mut rounds = 0;
    loop {
        rounds += 1;
        let sigs: Vec<Signature> = (0..g.n())
            .map(|v| {
                let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
                for (w, m) in g.neighbors(v) {
                    *counts.entry(cur[w]).or_insert(0) += u64::from(m);
                }
                (cur[v], counts.into_iter().collect())
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        if distinct.len() == classes {
            return (cur, rounds);
        }
        for (v, sig) in sigs.iter().enumerate() {
            let rank = distinct.binary_search(sig).expect("signature present");
            cur[v] = base + rank as u64;
        }
        base += distinct.len() as u64;
        classes = distinct.len();
    }
}

/// Ordered partition: cells are contiguous ranges of `elems`, and the order
/// of cell start positions agrees with the order of the cells' identifiers.
/// A cell's start position can therefore stand in for its identifier when
/// signatures are compared within one round.
struct OrderedPartition {
    elems: Vec<usize>,
    cell_of: Vec<usize>,
    cell_end: Vec<usize>,
    cells: usize,
}

struct Split {
    start: usize,
    order: Vec<usize>,
    bounds: Vec<usize>,
}

impl OrderedPartition {
    fn new(start: &[u64]) -> Self {
        let n = start.len();
        let mut elems: Vec<usize> = (0..n).collect();
        elems.sort_by_key(|&v| (start[v], v));
        let mut cell_of = vec![0; n];
        let mut cell_end = vec![0; n];
        let mut cells = 0;
        let mut s = 0;
        while s < n {
            let mut e = s + 1;
            while e < n && start[elems[e]] == start[elems[s]] {
                e += 1;
            }
            for &v in &elems[s..e] {
                cell_of[v] = s;
            }
            cell_end[s] = e;
            cells += 1;
            s = e;
        }
        OrderedPartition {
            elems,
            cell_of,
            cell_end,
            cells,
        }
    }

    fn cell_starts(&self) -> Vec<usize> {
        let mut starts = Vec::with_capacity(self.cells);
        let mut s = 0;
        while s < self.elems.len() {
            starts.push(s);
            s = self.cell_end[s];
        }
        starts
    }

    /// Computes how the cell at `s` splits, without modifying anything.
    fn plan(&self, g: &ColoredGraph, s: usize, buf: &mut Vec<(usize, u64)>) -> Option<Split> {
        let e = self.cell_end[s];
        if e - s < 2 {
            return None;
        }
        buf.clear();
        let mut ranges = Vec::with_capacity(e - s);
        for &v in &self.elems[s..e] {
            let from = buf.len();
            let (targets, mults) = g.neighbor_slices(v);
            buf.extend(
                targets
                    .iter()
                    .zip(mults)
                    .map(|(&w, &m)| (self.cell_of[w], u64::from(m))),
            );
            buf[from..].sort_unstable_by_key(|&(c, _)| c);
            let mut write = from;
            for read in from..buf.len() {
                if write > from && buf[write - 1].0 == buf[read].0 {
                    buf[write - 1].1 += buf[read].1;
                } else {
                    buf[write] = buf[read];
                    write += 1;
                }
            }
            buf.truncate(write);
            ranges.push((v, from, write));
        }
        let sig = |r: &(usize, usize, usize)| &buf[r.1..r.2];
        ranges.sort_by(|x, y| sig(x).cmp(sig(y)));
        if sig(&ranges[0]) == sig(&ranges[ranges.len() - 1]) {
            return None;
        }
        let mut bounds = vec![0];
        for i in 1..ranges.len() {
            if sig(&ranges[i - 1]) != sig(&ranges[i]) {
                bounds.push(i);
            }
        }
        bounds.push(ranges.len());
        Some(Split {
            start: s,
            order: ranges.into_iter().map(|r| r.0).collect(),
            bounds,
        })
    }

    fn apply(&mut self, split: &Split) {
        let s = split.start;
        self.elems[s..s + split.order.len()].copy_from_slice(&split.order);
        for w in split.bounds.windows(2) {
            let (from, to) = (s + w[0], s + w[1]);
            self.cell_end[from] = to;
            for &v in &self.elems[from..to] {
                self.cell_of[v] = from;
            }
        }
        self.cells += split.bounds.len() - 2;
    }
}

fn worklist(g: &ColoredGraph, start: &[u64]) -> (Vec<u64>, usize) {
    let n = g.n();
    let mut part = OrderedPartition::new(start);
    let mut base = first_free(start);
    let mut last_base = None;
    let mut rounds = 0;
    let mut dirty = part.cell_starts();
    let mut stamp = vec![0usize; n];
    let mut buf = Vec::new();
    loop {
        rounds += 1;
        let splits: Vec<Split> = dirty.iter().filter_map(|&s| part.plan(g, s, &mut buf)).collect();
        if splits.is_empty() {
            break;
        }
        for split in &splits {
            part.apply(split);
        }
        last_base = Some(base);
        base += part.cells as u64;

        dirty.clear();
        for split in &splits {
            for &x in &split.order {
                for &w in g.neighbor_slices(x).0 {
                    let c = part.cell_of[w];
                    if stamp[c] != rounds {
                        stamp[c] = rounds;
                        dirty.push(c);
                    }
                }
            }
        }
    }

    let colors = match last_base {
        None => start.to_vec(),
        Some(base) => {
            let mut colors = vec![0; n];
            for (rank, s) in part.cell_starts().into_iter().enumerate() {
                for &v in &part.elems[s..part.cell_end[s]] {
                    colors[v] = base + rank as u64;
                }
            }
            colors
        }
    };
    (colors, rounds)
}

fn check_vertex(g: &ColoredGraph, v: usize) -> Result<(), RefineError> {
    if v >= g.n() {
        return Err(RefineError::VertexOutOfRange { vertex: v, n: g.n() });
    }
    Ok(())
}

/// Individualizes `seq[i]` with `ind_color(i)`, re-refining after each step.
pub fn refine_seq(g: &ColoredGraph, seq: &[usize]) -> Result<StableColoring, RefineError> {
    let mut seen = VertexSet::empty();
    for &v in seq {
        check_vertex(g, v)?;
        if seen.contains(v) {
            return Err(RefineError::RepeatedVertex(v));
        }
        seen = seen.iter().chain([v]).collect();
    }
    let first = refine(g);
    let mut rounds = first.round_count();
    let mut colors = first.into_colors();
    for (step, &v) in seq.iter().enumerate() {
        colors[v] = ind_color(step);
        let next = refine_from(g, &colors);
        rounds += next.round_count();
        colors = next.into_colors();
    }
    Ok(StableColoring::new(colors, rounds))
}

/// Individualizes every member of `s` at once (ascending vertex order gets
/// ascending step indices) and refines.
pub fn p_set(g: &ColoredGraph, s: &VertexSet) -> Result<StableColoring, RefineError> {
    let order: Vec<usize> = s.iter().collect();
    p_set_ordered(g, &order)
}

/// Like [`p_set`], but `order[i]` receives `ind_color(i)`.
pub fn p_set_ordered(g: &ColoredGraph, order: &[usize]) -> Result<StableColoring, RefineError> {
    let mut colors = g.colors().to_vec();
    let mut seen = vec![false; g.n()];
    for (step, &v) in order.iter().enumerate() {
        check_vertex(g, v)?;
        if std::mem::replace(&mut seen[v], true) {
            return Err(RefineError::RepeatedVertex(v));
        }
        colors[v] = ind_color(step);
    }
    Ok(refine_from(g, &colors))
}

/// Class graph of a stable coloring: class sizes and per-vertex neighbor counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuotientGraph {
    /// `(color, class size)`, ascending by color.
    pub nodes: Vec<(u64, usize)>,
    /// `((from, to), count)`, ascending; zero counts omitted.
    pub arcs: Vec<((u64, u64), u64)>,
}

impl QuotientGraph {
    pub fn size(&self, color: u64) -> Option<usize> {
        self.nodes
            .binary_search_by_key(&color, |&(c, _)| c)
            .ok()
            .map(|i| self.nodes[i].1)
    }

    pub fn arc(&self, from: u64, to: u64) -> u64 {
        self.arcs
            .binary_search_by_key(&(from, to), |&(k, _)| k)
            .map_or(0, |i| self.arcs[i].1)
    }

    /// `q <color> <size>` lines followed by `a <from> <to> <count>` lines.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for &(c, size) in &self.nodes {
            let _ = writeln!(out, "q {c} {size}");
        }
        for &((i, j), count) in &self.arcs {
            let _ = writeln!(out, "a {i} {j} {count}");
        }
        out
    }
}

/// Builds the quotient graph, first verifying that `pi` is stable for `g`.
pub fn quotient(g: &ColoredGraph, pi: &StableColoring) -> Result<QuotientGraph, RefineError> {
    quotient_of_colors(g, pi.colors())
}

pub(crate) fn quotient_of_colors(g: &ColoredGraph, colors: &[u64]) -> Result<QuotientGraph, RefineError> {
    if colors.len() != g.n() {
        return Err(RefineError::LengthMismatch {
            got: colors.len(),
            n: g.n(),
        });
    }
    // color -> (first member, class size, weighted counts into each color)
    #[allow(clippy::type_complexity)]
    let mut reps: BTreeMap<u64, (usize, usize, Vec<(u64, u64)>)> = BTreeMap::new();
    for v in 0..g.n() {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for (w, m) in g.neighbors(v) {
            *counts.entry(colors[w]).or_insert(0) += u64::from(m);
        }
        let counts: Vec<(u64, u64)> = counts.into_iter().collect();
        match reps.get_mut(&colors[v]) {
            Some((rep, size, expected)) => {
                if *expected != counts {
                    return Err(RefineError::NotStable { u: *rep, v });
                }
                *size += 1;
            }
            None => {
                reps.insert(colors[v], (v, 1, counts));
            }
        }
    }
    let nodes = reps.iter().map(|(&c, &(_, size, _))| (c, size)).collect();
    let arcs = reps
        .iter()
        .flat_map(|(&c, (_, _, counts))| counts.iter().map(move |&(d, k)| ((c, d), k)))
        .collect();
    Ok(QuotientGraph { nodes, arcs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builtin;

    fn cycle(n: usize) -> ColoredGraph {
        builtin("cycle", &[n]).unwrap()
    }

    #[test]
    fn cycle_is_one_class() {
        let pi = refine(&cycle(6));
        assert_eq!(pi.partition(), vec![(0..6).collect::<Vec<_>>()]);
        assert_eq!(pi.round_count(), 1);
        assert_eq!(pi.colors(), &[0; 6]);
    }

    #[test]
    fn path_splits_endpoints() {
        let p4 = builtin("path", &[4]).unwrap();
        let pi = refine(&p4);
        assert_eq!(pi.partition(), vec![vec![0, 3], vec![1, 2]]);
        // Round 1 splits, round 2 verifies.
        assert_eq!(pi.round_count(), 2);
        assert_eq!(pi.colors(), &[1, 2, 2, 1]);
    }

    #[test]
    fn sequences_on_cycle() {
        let c6 = cycle(6);
        let pi = refine_seq(&c6, &[0]).unwrap();
        assert_eq!(pi.partition(), vec![vec![0], vec![1, 5], vec![2, 4], vec![3]]);
        assert!(refine_seq(&c6, &[0, 1]).unwrap().is_discrete());
        assert_eq!(refine_seq(&c6, &[]).unwrap(), refine(&c6));
        assert_eq!(refine_seq(&c6, &[2, 2]), Err(RefineError::RepeatedVertex(2)));
    }

    #[test]
    fn p_set_on_cycle() {
        let c6 = cycle(6);
        let single = p_set(&c6, &VertexSet::new([0])).unwrap();
        assert_eq!(single.partition(), refine_seq(&c6, &[0]).unwrap().partition());
        assert_eq!(p_set(&c6, &VertexSet::empty()).unwrap(), refine(&c6));
        assert!(p_set(&c6, &VertexSet::new(0..6)).unwrap().is_discrete());
    }

    #[test]
    fn discreteness() {
        let p4 = builtin("path", &[4]).unwrap();
        assert!(!refine(&cycle(6)).is_discrete());
        assert!(refine_seq(&p4, &[0]).unwrap().is_discrete());
        assert!(refine(&ColoredGraph::empty(1)).is_discrete());
    }

    #[test]
    fn quotients() {
        let c6 = cycle(6);
        let q = quotient(&c6, &refine(&c6)).unwrap();
        assert_eq!(q.nodes, vec![(0, 6)]);
        assert_eq!(q.arcs, vec![((0, 0), 2)]);

        let k2 = ColoredGraph::from_edges(vec![0, 1], [(0, 1, 1)]).unwrap();
        let q = quotient(&k2, &refine(&k2)).unwrap();
        assert_eq!(q.nodes, vec![(0, 1), (1, 1)]);
        assert_eq!(q.arcs, vec![((0, 1), 1), ((1, 0), 1)]);

        let p4 = builtin("path", &[4]).unwrap();
        let bad = StableColoring::new(vec![0; 4], 0);
        assert!(matches!(quotient(&p4, &bad), Err(RefineError::NotStable { .. })));
    }

    #[test]
    fn multiplicity_refines() {
        // Star with one doubled spoke: the doubled leaf separates.
        let g = ColoredGraph::from_edges(vec![0; 4], [(0, 1, 2), (0, 2, 1), (0, 3, 1)]).unwrap();
        let pi = refine(&g);
        assert_eq!(pi.partition(), vec![vec![0], vec![1], vec![2, 3]]);
    }

    #[test]
    fn engines_agree_on_small_graphs() {
        let g = builtin("frucht", &[]).unwrap();
        for seq in [vec![], vec![0], vec![3, 7]] {
            let mut colors = refine(&g).into_colors();
            for (i, &v) in seq.iter().enumerate() {
                colors[v] = ind_color(i);
            }
            assert_eq!(
                refine_with(&g, &colors, Engine::Worklist),
                refine_with(&g, &colors, Engine::Naive)
            );
        }
    }

    #[test]
    fn dumps() {
        let p3 = builtin("path", &[3]).unwrap();
        let pi = refine(&p3);
        assert_eq!(pi.dump(), "v 1 1\nv 2 2\nv 3 1\n");
        assert_eq!(quotient(&p3, &pi).unwrap().dump(), "q 1 2\nq 2 1\na 1 2 1\na 2 1 2\n");
    }
}
