//! Membership in the k-Tinhofer hierarchy.
//!
//! A graph is k-Tinhofer when, for two isomorphic copies, every way of running
//! k individualization-refinement steps on corresponding cells ends with
//! isomorphic colored graphs. Three checks are provided: the exhaustive
//! adversarial search itself, the comparison of stabilizer orbits with
//! individualized stable partitions, and the comparison of IR-tree quotients.

use std::collections::HashSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{disjoint_union, ColoredGraph, VertexSet};
use crate::groups::{exact_iso_with, is_refinable_with, paired_cells, stabilizer_orbits, GroupError, SearchLimits};
use crate::refinement::{ind_color, p_set, refine, refine_from};
use crate::tinhofer::{build_ir_tree_with, CellSelector, TinhoferError, DEFAULT_NODE_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("level {k} is out of range for a graph on {n} vertices")]
    LevelOutOfRange { k: usize, n: usize },
    #[error("search exceeded the node cap of {0}")]
    NodeCap(usize),
    #[error("witness sequences have different lengths or repeat a vertex")]
    InvalidWitness,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Tinhofer(#[from] TinhoferError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Operational,
    Algebraic,
    IrTree,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Operational => "op",
            Method::Algebraic => "alg",
            Method::IrTree => "irtree",
        }
    }
}

/// Two individualization sequences whose results are not isomorphic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Witness {
    pub g_seq: Vec<usize>,
    pub h_seq: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyVerdict {
    pub k: usize,
    pub member: bool,
    pub witness: Option<Witness>,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperationalOptions {
    /// Try one vertex per automorphism orbit of each colored copy.
    pub symmetry_pruning: bool,
    pub node_cap: usize,
    pub limits: SearchLimits,
}

impl Default for OperationalOptions {
    fn default() -> Self {
        OperationalOptions {
            symmetry_pruning: false,
            node_cap: 5_000_000,
            limits: SearchLimits::default(),
        }
    }
}

enum Outcome {
    Fail(Witness),
    /// `truncated` is set when some branch stopped at the depth limit
    /// before its coloring became discrete.
    Pass {
        truncated: bool,
    },
}

struct Adversary<'a> {
    g: &'a ColoredGraph,
    h: &'a ColoredGraph,
    union: ColoredGraph,
    k: usize,
    opts: OperationalOptions,
    nodes: usize,
}

impl Adversary<'_> {
    fn candidates(
        &self,
        graph: &ColoredGraph,
        colors: &[u64],
        members: &[usize],
    ) -> Result<Vec<usize>, HierarchyError> {
        if !self.opts.symmetry_pruning {
            return Ok(members.to_vec());
        }
        let orbits = stabilizer_orbits(
            &graph.with_colors(colors.to_vec()),
            &VertexSet::empty(),
            &self.opts.limits,
        )?;
        let reps = orbits.representatives();
        Ok(members.iter().copied().filter(|v| reps.contains(v)).collect())
    }

    fn search(
        &mut self,
        colors: Vec<u64>,
        g_seq: &mut Vec<usize>,
        h_seq: &mut Vec<usize>,
    ) -> Result<Outcome, HierarchyError> {
        self.nodes += 1;
        if self.nodes > self.opts.node_cap {
            return Err(HierarchyError::NodeCap(self.opts.node_cap));
        }
        let n = self.g.n();
        let fail = |g_seq: &Vec<usize>, h_seq: &Vec<usize>| {
            Ok(Outcome::Fail(Witness {
                g_seq: g_seq.clone(),
                h_seq: h_seq.clone(),
            }))
        };
        let Some(cells) = paired_cells(&colors, n) else {
            return fail(g_seq, h_seq);
        };
        if cells.iter().all(|(_, l, _)| l.len() == 1) {
            return Ok(Outcome::Pass { truncated: false });
        }
        let depth = g_seq.len();
        if depth == self.k {
            let left = self.g.with_colors(colors[..n].to_vec());
            let right = self.h.with_colors(colors[n..].to_vec());
            return match exact_iso_with(&left, &right, &self.opts.limits)? {
                Some(_) => Ok(Outcome::Pass { truncated: true }),
                None => fail(g_seq, h_seq),
            };
        }
        let mut truncated = false;
        for (_, left, right) in cells.iter().filter(|(_, l, _)| l.len() > 1) {
            let right: Vec<usize> = right.iter().map(|v| v - n).collect();
            let us = self.candidates(self.g, &colors[..n], left)?;
            let vs = self.candidates(self.h, &colors[n..], &right)?;
            for &u in &us {
                for &v in &vs {
                    let mut next = colors.clone();
                    next[u] = ind_color(depth);
                    next[v + n] = ind_color(depth);
                    let next = refine_from(&self.union, &next).into_colors();
                    g_seq.push(u);
                    h_seq.push(v);
                    let outcome = self.search(next, g_seq, h_seq)?;
                    g_seq.pop();
                    h_seq.pop();
                    match outcome {
                        Outcome::Fail(w) => return Ok(Outcome::Fail(w)),
                        Outcome::Pass { truncated: t } => truncated |= t,
                    }
                }
            }
        }
        Ok(Outcome::Pass { truncated })
    }
}

fn check_level(g: &ColoredGraph, k: usize) -> Result<(), HierarchyError> {
    if k > g.n() {
        return Err(HierarchyError::LevelOutOfRange { k, n: g.n() });
    }
    Ok(())
}

fn run_operational(
    g: &ColoredGraph,
    h: &ColoredGraph,
    k: usize,
    opts: &OperationalOptions,
) -> Result<Outcome, HierarchyError> {
    check_level(g, k)?;
    if g.n() > opts.limits.max_vertices {
        return Err(GroupError::TooLarge {
            n: g.n(),
            max: opts.limits.max_vertices,
        }
        .into());
    }
    let (union, _) = disjoint_union(g, h);
    let colors = refine(&union).into_colors();
    let mut adversary = Adversary {
        g,
        h,
        union,
        k,
        opts: *opts,
        nodes: 0,
    };
    adversary.search(colors, &mut Vec::new(), &mut Vec::new())
}

fn verdict(k: usize, method: Method, outcome: Outcome) -> HierarchyVerdict {
    match outcome {
        Outcome::Fail(w) => HierarchyVerdict {
            k,
            member: false,
            witness: Some(w),
            method,
        },
        Outcome::Pass { .. } => HierarchyVerdict {
            k,
            member: true,
            witness: None,
            method,
        },
    }
}

pub fn is_k_tinhofer_operational(g: &ColoredGraph, k: usize) -> Result<HierarchyVerdict, HierarchyError> {
    is_k_tinhofer_operational_with(g, k, &OperationalOptions::default())
}

/// Exhaustive search over paired individualization sequences of length `k`
/// on two copies of `g`: every non-singleton cell, every vertex of it in the
/// first copy, every vertex of it in the second.
pub fn is_k_tinhofer_operational_with(
    g: &ColoredGraph,
    k: usize,
    opts: &OperationalOptions,
) -> Result<HierarchyVerdict, HierarchyError> {
    is_k_tinhofer_operational_against(g, g, k, opts)
}

/// As [`is_k_tinhofer_operational_with`], with `h` (normally a relabeled copy
/// of `g`) as the second copy.
pub fn is_k_tinhofer_operational_against(
    g: &ColoredGraph,
    h: &ColoredGraph,
    k: usize,
    opts: &OperationalOptions,
) -> Result<HierarchyVerdict, HierarchyError> {
    let outcome = run_operational(g, h, k, opts)?;
    Ok(verdict(k, Method::Operational, outcome))
}

/// For every `S` with `|S| <= k - 1`, compares the orbits of the pointwise
/// stabilizer of `S` with the stable partition after individualizing `S`.
/// Level 0 holds for every graph.
pub fn is_k_tinhofer_algebraic(g: &ColoredGraph, k: usize) -> Result<HierarchyVerdict, HierarchyError> {
    is_k_tinhofer_algebraic_with(g, k, &SearchLimits::default())
}

pub fn is_k_tinhofer_algebraic_with(
    g: &ColoredGraph,
    k: usize,
    limits: &SearchLimits,
) -> Result<HierarchyVerdict, HierarchyError> {
    check_level(g, k)?;
    for size in 0..k {
        for s in (0..g.n()).combinations(size) {
            let s = VertexSet::new(s);
            let orbits = stabilizer_orbits(g, &s, limits)?;
            let stable = p_set(g, &s).expect("vertices in range").partition();
            if orbits.classes == stable {
                continue;
            }
            let (u, v) = stable
                .iter()
                .flat_map(|class| class.iter().tuple_combinations())
                .find(|&(u, v)| !orbits.class_of(*u).contains(v))
                .map(|(&u, &v)| (u, v))
                .expect("orbits refine the stable partition");
            let mut g_seq: Vec<usize> = s.iter().collect();
            let mut h_seq = g_seq.clone();
            g_seq.push(u);
            h_seq.push(v);
            return Ok(HierarchyVerdict {
                k,
                member: false,
                witness: Some(Witness { g_seq, h_seq }),
                method: Method::Algebraic,
            });
        }
    }
    Ok(HierarchyVerdict {
        k,
        member: true,
        witness: None,
        method: Method::Algebraic,
    })
}

/// Builds IR-trees of depth `k - 1` for `g` and for a copy relabeled by a
/// permutation drawn from `seed`, and asks whether every leaf quotient of
/// `g`'s tree occurs among the leaf quotients of the copy's tree.
///
/// This is a necessary condition for membership only.
pub fn is_k_tinhofer_irtree(
    g: &ColoredGraph,
    k: usize,
    sel: CellSelector,
    seed: u64,
) -> Result<HierarchyVerdict, HierarchyError> {
    check_level(g, k)?;
    let member = if k == 0 {
        true
    } else {
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let h = g.relabel(&perm);
        let tree_g = build_ir_tree_with(g, sel, k - 1, DEFAULT_NODE_CAP)?;
        let tree_h = build_ir_tree_with(&h, sel, k - 1, DEFAULT_NODE_CAP)?;
        let available: HashSet<_> = tree_h.leaves().map(|l| &l.quotient).collect();
        let covered = tree_g.leaves().all(|l| available.contains(&l.quotient));
        covered
    };
    Ok(HierarchyVerdict {
        k,
        member,
        witness: None,
        method: Method::IrTree,
    })
}

/// Individualizes the two sequences step by step on `g` and `h` (refining
/// jointly) and reports whether the resulting colored graphs are
/// non-isomorphic.
pub fn replay_witness(
    g: &ColoredGraph,
    h: &ColoredGraph,
    w: &Witness,
    limits: &SearchLimits,
) -> Result<bool, HierarchyError> {
    let n = g.n();
    let distinct = |s: &[usize], bound: usize| s.iter().all_unique() && s.iter().all(|&v| v < bound);
    if w.g_seq.len() != w.h_seq.len() || !distinct(&w.g_seq, n) || !distinct(&w.h_seq, h.n()) {
        return Err(HierarchyError::InvalidWitness);
    }
    let (union, offset) = disjoint_union(g, h);
    let mut colors = refine(&union).into_colors();
    for (step, (&u, &v)) in w.g_seq.iter().zip(&w.h_seq).enumerate() {
        colors[u] = ind_color(step);
        colors[v + offset] = ind_color(step);
        colors = refine_from(&union, &colors).into_colors();
    }
    if paired_cells(&colors, offset).is_none() {
        return Ok(true);
    }
    let left = g.with_colors(colors[..offset].to_vec());
    let right = h.with_colors(colors[offset..].to_vec());
    Ok(exact_iso_with(&left, &right, limits)?.is_none())
}

/// Largest `j` such that `g` is `j`-Tinhofer, by iterative deepening of the
/// operational search.
pub fn tinhofer_threshold(g: &ColoredGraph) -> Result<usize, HierarchyError> {
    tinhofer_threshold_with(g, &OperationalOptions::default())
}

pub fn tinhofer_threshold_with(g: &ColoredGraph, opts: &OperationalOptions) -> Result<usize, HierarchyError> {
    let n = g.n();
    for k in 1..=n {
        match run_operational(g, g, k, opts)? {
            Outcome::Fail(_) => return Ok(k - 1),
            Outcome::Pass { truncated: false } => return Ok(n),
            Outcome::Pass { truncated: true } => {}
        }
    }
    Ok(n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    pub n: usize,
    pub is_discrete: bool,
    pub is_refinable: bool,
    pub threshold: usize,
    /// `n - 1 - threshold`, or `None` for Tinhofer graphs.
    pub deficiency: Option<usize>,
    pub is_tinhofer: bool,
}

pub fn classify(g: &ColoredGraph) -> Result<ClassificationReport, HierarchyError> {
    classify_with(g, &OperationalOptions::default())
}

pub fn classify_with(g: &ColoredGraph, opts: &OperationalOptions) -> Result<ClassificationReport, HierarchyError> {
    let n = g.n();
    let threshold = tinhofer_threshold_with(g, opts)?;
    Ok(ClassificationReport {
        n,
        is_discrete: refine(g).is_discrete(),
        is_refinable: is_refinable_with(g, &opts.limits)?,
        threshold,
        deficiency: (threshold < n).then(|| n - 1 - threshold),
        is_tinhofer: threshold == n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::gen_separator;
    use crate::graph::builtin;

    fn pruned() -> OperationalOptions {
        OperationalOptions {
            symmetry_pruning: true,
            ..Default::default()
        }
    }

    #[test]
    fn level_zero_always_holds() {
        let frucht = builtin("frucht", &[]).unwrap();
        assert!(is_k_tinhofer_operational(&frucht, 0).unwrap().member);
        assert!(is_k_tinhofer_algebraic(&frucht, 0).unwrap().member);
    }

    #[test]
    fn frucht_fails_level_one() {
        let g = builtin("frucht", &[]).unwrap();
        let op = is_k_tinhofer_operational(&g, 1).unwrap();
        assert!(!op.member);
        assert!(replay_witness(&g, &g, op.witness.as_ref().unwrap(), &SearchLimits::default()).unwrap());
        let alg = is_k_tinhofer_algebraic(&g, 1).unwrap();
        assert!(!alg.member);
        assert!(replay_witness(&g, &g, alg.witness.as_ref().unwrap(), &SearchLimits::default()).unwrap());
        assert_eq!(tinhofer_threshold(&g).unwrap(), 0);
    }

    #[test]
    fn cycle_is_tinhofer() {
        let c6 = builtin("cycle", &[6]).unwrap();
        assert!(is_k_tinhofer_algebraic(&c6, 1).unwrap().member);
        assert!(is_k_tinhofer_irtree(&c6, 2, CellSelector::MinColor, 1).unwrap().member);
        let report = classify(&c6).unwrap();
        assert_eq!(
            report,
            ClassificationReport {
                n: 6,
                is_discrete: false,
                is_refinable: true,
                threshold: 6,
                deficiency: None,
                is_tinhofer: true,
            }
        );
    }

    #[test]
    fn separator_one() {
        let (g, map) = gen_separator(1).unwrap();
        assert!(is_k_tinhofer_operational_with(&g, 1, &pruned()).unwrap().member);
        let v = is_k_tinhofer_operational_with(&g, 2, &pruned()).unwrap();
        assert!(!v.member);
        let w = v.witness.unwrap();
        assert!(replay_witness(&g, &g, &w, &SearchLimits::default()).unwrap());
        let (a0, b0) = map.pair("P0").unwrap();
        let (a3, b3) = map.pair("P3").unwrap();
        let paper = Witness {
            g_seq: vec![a0, a3],
            h_seq: vec![a0, b3],
        };
        assert!(replay_witness(&g, &g, &paper, &SearchLimits::default()).unwrap());
        let same = Witness {
            g_seq: vec![b0, a3],
            h_seq: vec![b0, a3],
        };
        assert!(!replay_witness(&g, &g, &same, &SearchLimits::default()).unwrap());
        assert!(!is_k_tinhofer_algebraic(&g, 2).unwrap().member);
    }

    #[test]
    fn discrete_graph_irtree() {
        let g = ColoredGraph::from_edges(vec![0, 1, 2], [(0, 1, 1)]).unwrap();
        for k in 1..=3 {
            assert!(is_k_tinhofer_irtree(&g, k, CellSelector::MaxSize, 3).unwrap().member);
        }
    }

    #[test]
    fn level_range() {
        let g = builtin("path", &[2]).unwrap();
        assert_eq!(
            is_k_tinhofer_operational(&g, 3),
            Err(HierarchyError::LevelOutOfRange { k: 3, n: 2 })
        );
    }
}
