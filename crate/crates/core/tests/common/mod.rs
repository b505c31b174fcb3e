//! Seeded graph corpora shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tinhofer_core::{disjoint_union, ColoredGraph, GraphBuilder};

pub const CORPUS_SEED: u64 = 0x7a11_0f3e;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random graph on `n` vertices with colors drawn from `0..colors` and edge
/// probability `p`.
pub fn random_graph(rng: &mut impl Rng, n: usize, colors: u64, p: f64) -> ColoredGraph {
    let mut b = GraphBuilder::new(0);
    for _ in 0..n {
        b.add_vertex(rng.gen_range(0..colors.max(1)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                b.add_edge(u, v, 1).unwrap();
            }
        }
    }
    b.build()
}

fn cycle_union(lengths: &[usize]) -> ColoredGraph {
    let mut b = GraphBuilder::new(0);
    for &len in lengths {
        let start = b.n();
        for _ in 0..len {
            b.add_vertex(0);
        }
        for i in 0..len {
            b.add_edge(start + i, start + (i + 1) % len, 1).unwrap();
        }
    }
    b.build()
}

fn complement(g: &ColoredGraph) -> ColoredGraph {
    let mut b = GraphBuilder::new(0);
    for v in 0..g.n() {
        b.add_vertex(g.color(v));
    }
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            if g.multiplicity(u, v) == 0 {
                b.add_edge(u, v, 1).unwrap();
            }
        }
    }
    b.build()
}

/// Structured graphs, so that non-refinable and non-Tinhofer graphs occur.
fn structured(rng: &mut impl Rng, n: usize) -> ColoredGraph {
    match rng.gen_range(0..5) {
        0 if n >= 6 => cycle_union(&[3, n - 3]),
        4 if n >= 6 => complement(&cycle_union(&[3, n - 3])),
        1 if n >= 3 => cycle_union(&[n]),
        2 => {
            // complement of a random perfect-ish matching
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut matched = vec![usize::MAX; n];
            for pair in order.chunks(2) {
                if let [a, b] = *pair {
                    matched[a] = b;
                    matched[b] = a;
                }
            }
            let mut b = GraphBuilder::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if matched[u] != v {
                        b.add_edge(u, v, 1).unwrap();
                    }
                }
            }
            b.build()
        }
        _ => {
            let half = n / 2;
            let a = random_graph(rng, half, 1, 0.5);
            let (g, _) = disjoint_union(&a, &a);
            if g.n() < n {
                let (g, _) = disjoint_union(&g, &ColoredGraph::empty(n - g.n()));
                g
            } else {
                g
            }
        }
    }
}

/// The colored-graph corpus: `count` graphs with `1 <= n <= max_n`.
pub fn corpus(seed: u64, count: usize, max_n: usize) -> Vec<ColoredGraph> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_n);
            if rng.gen_bool(0.5) {
                structured(&mut rng, n)
            } else {
                let colors = rng.gen_range(1..=3);
                let p = [0.2, 0.4, 0.5, 0.7][rng.gen_range(0..4)];
                random_graph(&mut rng, n, colors, p)
            }
        })
        .collect()
}

pub fn random_perm(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// `g` with one vertex pair's adjacency toggled.
pub fn perturb(rng: &mut impl Rng, g: &ColoredGraph) -> ColoredGraph {
    let n = g.n();
    let mut b = GraphBuilder::new(0);
    for v in 0..n {
        b.add_vertex(g.color(v));
    }
    if n < 2 {
        b.set_color(0, g.color(0) + 1);
        return b.build();
    }
    let u = rng.gen_range(0..n);
    let mut v = rng.gen_range(0..n - 1);
    if v >= u {
        v += 1;
    }
    for (a, c, m) in g.edges() {
        if (a, c) != (u.min(v), u.max(v)) {
            b.add_edge(a, c, m).unwrap();
        }
    }
    if g.multiplicity(u, v) == 0 {
        b.add_edge(u, v, 1).unwrap();
    }
    b.build()
}
