//! Generators for CFI gadgets, IMP gadgets, the level-separating graph and
//! the circuit-reduction graph.
//!
//! A pair `(a, b)` is always two vertices sharing a color. In a CFI gadget on
//! pairs `P1..Pk`, the intermediate vertex for the even-weight bit string
//! `s1..sk` is adjacent to `a_i` when `s_i = 0` and to `b_i` otherwise.

mod circuit;
mod hardness;

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{ColoredGraph, GraphBuilder};

pub use circuit::{eval_circuit, parse_circuit, Circuit, CircuitError, Gate};
pub use hardness::{gen_hardness, ConstZeroWiring, HardnessOptions};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("parameter k = {k} is below the minimum {min}")]
    KTooSmall { k: usize, min: usize },
    #[error("parameter k = {0} is too large to generate")]
    KTooLarge(usize),
    #[error("circuit has no AND or OR gate")]
    NoLogicGate,
    #[error("circuit has no CONST0 gate")]
    NoConstZero,
    #[error("gate {0} uses the same input twice")]
    RepeatedInput(u64),
}

/// Labeled vertex pairs and intermediate sets of a generated graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairMap {
    pairs: Vec<(String, (usize, usize))>,
    sets: Vec<(String, Vec<usize>)>,
}

impl PairMap {
    pub fn insert_pair(&mut self, label: impl Into<String>, pair: (usize, usize)) {
        self.pairs.push((label.into(), pair));
    }

    pub fn insert_set(&mut self, label: impl Into<String>, members: Vec<usize>) {
        self.sets.push((label.into(), members));
    }

    pub fn pair(&self, label: &str) -> Option<(usize, usize)> {
        self.pairs.iter().find(|(l, _)| l == label).map(|&(_, p)| p)
    }

    pub fn set(&self, label: &str) -> Option<&[usize]> {
        self.sets.iter().find(|(l, _)| l == label).map(|(_, s)| s.as_slice())
    }

    /// Pairs in insertion order.
    pub fn pairs(&self) -> &[(String, (usize, usize))] {
        &self.pairs
    }

    pub fn sets(&self) -> &[(String, Vec<usize>)] {
        &self.sets
    }

    /// `pair <label> <a> <b>` lines, then `set <label> <members…>` lines, 1-based.
    pub fn sidecar(&self) -> String {
        let mut out = String::new();
        for (label, (a, b)) in &self.pairs {
            let _ = writeln!(out, "pair {label} {} {}", a + 1, b + 1);
        }
        for (label, members) in &self.sets {
            let _ = write!(out, "set {label}");
            for v in members {
                let _ = write!(out, " {}", v + 1);
            }
            out.push('\n');
        }
        out
    }
}

/// Bit strings of length `k` with an even number of ones, ascending, as bit
/// vectors with position 0 first.
pub(crate) fn even_strings(k: usize) -> Vec<Vec<bool>> {
    (0u64..1 << k)
        .filter(|x| x.count_ones() % 2 == 0)
        .map(|x| (0..k).map(|i| (x >> (k - 1 - i)) & 1 == 1).collect())
        .collect()
}

/// Adds the intermediate set of a CFI gadget over `pairs` with color `color`.
pub(crate) fn attach_cfi(b: &mut GraphBuilder, pairs: &[(usize, usize)], color: u64) -> Vec<usize> {
    even_strings(pairs.len())
        .into_iter()
        .map(|bits| {
            let f = b.add_vertex(color);
            for (&(a, bb), bit) in pairs.iter().zip(bits) {
                b.add_edge(f, if bit { bb } else { a }, 1)
                    .expect("gadget vertices are distinct");
            }
            f
        })
        .collect()
}

/// Joins `p0` to the two input pairs with matched polarity.
pub(crate) fn attach_imp(b: &mut GraphBuilder, p0: (usize, usize), p1: (usize, usize), p2: (usize, usize)) {
    for p in [p1, p2] {
        b.add_edge(p0.0, p.0, 1).expect("distinct pairs");
        b.add_edge(p0.1, p.1, 1).expect("distinct pairs");
    }
}

pub(crate) fn add_pair(b: &mut GraphBuilder, color: u64) -> (usize, usize) {
    (b.add_vertex(color), b.add_vertex(color))
}

const MAX_K: usize = 24;

fn check_k(k: usize, min: usize) -> Result<(), GadgetError> {
    if k < min {
        return Err(GadgetError::KTooSmall { k, min });
    }
    if k > MAX_K {
        return Err(GadgetError::KTooLarge(k));
    }
    Ok(())
}

/// CFI gadget `X_k`: pairs `P1..Pk` at vertices `2(i-1), 2(i-1)+1` with
/// colors `0..k`, then the `2^(k-1)` intermediates with color `k`.
pub fn gen_cfi(k: usize) -> Result<(ColoredGraph, PairMap), GadgetError> {
    check_k(k, 2)?;
    let mut b = GraphBuilder::new(0);
    let mut map = PairMap::default();
    let pairs: Vec<_> = (0..k).map(|i| add_pair(&mut b, i as u64)).collect();
    for (i, &p) in pairs.iter().enumerate() {
        map.insert_pair(format!("P{}", i + 1), p);
    }
    let f = attach_cfi(&mut b, &pairs, k as u64);
    map.insert_set("F", f);
    Ok((b.build(), map))
}

/// IMP gadget `Y_k`: `X_k` plus a pair `P0` (color `k + 1`) joined to `P1`, `P2`.
pub fn gen_imp(k: usize) -> Result<(ColoredGraph, PairMap), GadgetError> {
    check_k(k, 2)?;
    let (g, mut map) = gen_cfi(k)?;
    let mut b = GraphBuilder::new(0);
    for v in 0..g.n() {
        b.add_vertex(g.color(v));
    }
    for (u, v, m) in g.edges() {
        b.add_edge(u, v, m).expect("copied edge");
    }
    let p0 = add_pair(&mut b, k as u64 + 1);
    attach_imp(&mut b, p0, map.pair("P1").expect("P1"), map.pair("P2").expect("P2"));
    map.insert_pair("P0", p0);
    Ok((b.build(), map))
}

/// The graph that is `k`-Tinhofer but not `(k+1)`-Tinhofer: `X_3` on
/// `(P1, P2, P0)` and `X_{k+2}` on `(P1, P2, P3, …, P_{k+2})`.
///
/// Pairs `P0..P_{k+2}` come first (`P_i` has color `i`), then `F` (color
/// `k+3`), then `F'` (color `k+4`).
pub fn gen_separator(k: usize) -> Result<(ColoredGraph, PairMap), GadgetError> {
    check_k(k, 1)?;
    let mut b = GraphBuilder::new(0);
    let mut map = PairMap::default();
    let pairs: Vec<_> = (0..k + 3).map(|i| add_pair(&mut b, i as u64)).collect();
    for (i, &p) in pairs.iter().enumerate() {
        map.insert_pair(format!("P{i}"), p);
    }
    let f = attach_cfi(&mut b, &[pairs[1], pairs[2], pairs[0]], k as u64 + 3);
    let f2 = attach_cfi(&mut b, &pairs[1..], k as u64 + 4);
    map.insert_set("F", f);
    map.insert_set("F'", f2);
    Ok((b.build(), map))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cfi_sizes() {
        for (k, n, m) in [(2, 6, 4), (3, 10, 12), (4, 16, 32)] {
            let (g, map) = gen_cfi(k).unwrap();
            assert_eq!((g.n(), g.edge_count()), (n, m), "k = {k}");
            assert_eq!(map.pairs().len(), k);
            assert_eq!(map.set("F").unwrap().len(), 1 << (k - 1));
        }
        assert_eq!(gen_cfi(1), Err(GadgetError::KTooSmall { k: 1, min: 2 }));
    }

    #[test]
    fn cfi_k2_strings() {
        let (g, map) = gen_cfi(2).unwrap();
        let f = map.set("F").unwrap();
        // 00 -> a1, a2 ; 11 -> b1, b2
        let nb: Vec<Vec<usize>> = f.iter().map(|&v| g.neighbors(v).map(|x| x.0).collect()).collect();
        assert_eq!(nb, vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn imp_shape() {
        let (g, map) = gen_imp(3).unwrap();
        assert_eq!((g.n(), g.edge_count()), (12, 16));
        let (a0, b0) = map.pair("P0").unwrap();
        assert_eq!(g.degree(a0), 2);
        let nb: Vec<usize> = g.neighbors(a0).map(|x| x.0).collect();
        assert_eq!(nb, vec![map.pair("P1").unwrap().0, map.pair("P2").unwrap().0]);
        assert_ne!(g.color(a0), g.color(0));
        assert_eq!(g.color(a0), g.color(b0));
        let x_colors: Vec<u64> = (0..10).map(|v| g.color(v)).collect();
        assert!(!x_colors.contains(&g.color(a0)));
    }

    #[test]
    fn separator_sizes() {
        assert_eq!(gen_separator(1).unwrap().0.n(), 16);
        assert_eq!(gen_separator(2).unwrap().0.n(), 22);
        assert_eq!(gen_separator(0), Err(GadgetError::KTooSmall { k: 0, min: 1 }));
    }

    #[test]
    fn sidecar_format() {
        let (_, map) = gen_cfi(2).unwrap();
        assert_eq!(map.sidecar(), "pair P1 1 2\npair P2 3 4\nset F 5 6\n");
    }
}
