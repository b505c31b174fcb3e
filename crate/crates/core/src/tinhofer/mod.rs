//! Tinhofer's individualization-refinement isomorphism test.
//!
//! Both graphs are refined jointly on their disjoint union, so a color class
//! of the union is the pair of corresponding cells. Each step picks a cell,
//! individualizes one vertex on each side with the same reserved identifier,
//! and refines again.

mod fpt;
mod irtree;

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{disjoint_union, ColoredGraph};
use crate::groups::paired_cells;
use crate::refinement::{ind_color, refine, refine_from};

pub use fpt::{fpt_iso, fpt_iso_with, FptOptions};
pub use irtree::{build_ir_tree, build_ir_tree_with, export_dot, IrNode, IrTree, DEFAULT_NODE_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TinhoferError {
    #[error("step {step}: scripted vertex {vertex} is not in the selected cell")]
    ScriptOutsideCell { step: usize, vertex: usize },
    #[error("step {step}: scripted policy has no vertex left")]
    ScriptExhausted { step: usize },
    #[error("budget {budget} exceeds the vertex count {n}")]
    BudgetOutOfRange { budget: usize, n: usize },
    #[error("tree exceeds the node cap of {0}")]
    NodeCap(usize),
    #[error("line {line}: malformed transcript line `{text}`")]
    MalformedTranscript { line: usize, text: String },
}

/// Rule choosing the non-singleton class to individualize from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum CellSelector {
    /// Smallest color identifier.
    #[default]
    MinColor,
    /// Largest class, ties broken by smallest identifier.
    MaxSize,
    /// Smallest class, ties broken by smallest identifier.
    First,
}

impl CellSelector {
    pub const ALL: [CellSelector; 3] = [CellSelector::MinColor, CellSelector::MaxSize, CellSelector::First];

    /// Picks among `(color, size)` entries; singletons are ignored.
    pub fn select(&self, cells: impl IntoIterator<Item = (u64, usize)>) -> Option<u64> {
        let candidates = cells.into_iter().filter(|&(_, size)| size > 1);
        match self {
            CellSelector::MinColor => candidates.map(|(c, _)| c).min(),
            CellSelector::MaxSize => candidates
                .min_by_key(|&(c, size)| (std::cmp::Reverse(size), c))
                .map(|(c, _)| c),
            CellSelector::First => candidates.min_by_key(|&(c, size)| (size, c)).map(|(c, _)| c),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CellSelector::MinColor => "min-color",
            CellSelector::MaxSize => "max-size",
            CellSelector::First => "first",
        }
    }
}

impl std::str::FromStr for CellSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CellSelector::ALL
            .into_iter()
            .find(|sel| sel.name() == s)
            .ok_or_else(|| format!("unknown selector `{s}` (min-color, max-size, first)"))
    }
}

/// How a vertex is taken from the selected cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChoicePolicy {
    FirstVertex,
    SeededRandom(u64),
    /// The vertex to take at each step.
    Scripted(Vec<usize>),
}

pub(crate) struct Chooser<'a> {
    policy: &'a ChoicePolicy,
    rng: Option<ChaCha8Rng>,
}

impl<'a> Chooser<'a> {
    pub(crate) fn new(policy: &'a ChoicePolicy) -> Self {
        let rng = match policy {
            ChoicePolicy::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
            _ => None,
        };
        Chooser { policy, rng }
    }

    /// Chooses from `members` (ascending, non-empty).
    pub(crate) fn choose(&mut self, step: usize, members: &[usize]) -> Result<usize, TinhoferError> {
        match self.policy {
            ChoicePolicy::FirstVertex => Ok(members[0]),
            ChoicePolicy::SeededRandom(_) => {
                let rng = self.rng.as_mut().expect("seeded");
                Ok(members[rng.gen_range(0..members.len())])
            }
            ChoicePolicy::Scripted(script) => {
                let &vertex = script.get(step).ok_or(TinhoferError::ScriptExhausted { step })?;
                if members.binary_search(&vertex).is_err() {
                    return Err(TinhoferError::ScriptOutsideCell { step, vertex });
                }
                Ok(vertex)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// A verified color-, adjacency- and multiplicity-preserving map `g -> h`.
    Isomorphic(Vec<usize>),
    NotIsomorphic,
}

impl Verdict {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, Verdict::Isomorphic(_))
    }
}

/// One individualization step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub color: u64,
    pub g: usize,
    pub h: usize,
    /// Class sizes of `g` after refinement, descending.
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunTranscript {
    pub steps: Vec<Step>,
    pub isomorphic: bool,
}

impl RunTranscript {
    /// `step <i> color <c> g <u> h <v>` lines (1-based step and vertices),
    /// then `verdict isomorphic|not-isomorphic`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.steps.iter().enumerate() {
            let _ = writeln!(out, "step {} color {} g {} h {}", i + 1, s.color, s.g + 1, s.h + 1);
        }
        let verdict = if self.isomorphic {
            "isomorphic"
        } else {
            "not-isomorphic"
        };
        let _ = writeln!(out, "verdict {verdict}");
        out
    }

    /// The vertices chosen in `g` and in `h`, usable as scripted policies.
    pub fn scripts(&self) -> (Vec<usize>, Vec<usize>) {
        self.steps.iter().map(|s| (s.g, s.h)).unzip()
    }
}

/// Reads the `step` lines of a transcript back into the two vertex scripts.
pub fn parse_transcript(text: &str) -> Result<(Vec<usize>, Vec<usize>), TinhoferError> {
    let mut g = Vec::new();
    let mut h = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let malformed = || TinhoferError::MalformedTranscript {
            line: i + 1,
            text: line.to_string(),
        };
        match fields.as_slice() {
            [] => {}
            ["verdict", _] => {}
            ["step", _, "color", _, "g", u, "h", v] => {
                let u: usize = u.parse().map_err(|_| malformed())?;
                let v: usize = v.parse().map_err(|_| malformed())?;
                if u == 0 || v == 0 {
                    return Err(malformed());
                }
                g.push(u - 1);
                h.push(v - 1);
            }
            _ => return Err(malformed()),
        }
    }
    Ok((g, h))
}

fn class_sizes(colors: &[u64]) -> Vec<usize> {
    let mut sizes: Vec<usize> = crate::refinement::partition_of(colors).iter().map(Vec::len).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// Runs Tinhofer's algorithm on `g` and `h`.
///
/// An `Isomorphic` verdict always carries a bijection that has been checked
/// edge by edge. A `NotIsomorphic` verdict is only guaranteed correct when
/// `g` is a Tinhofer graph.
pub fn tinhofer_iso(
    g: &ColoredGraph,
    h: &ColoredGraph,
    sel: CellSelector,
    pol_g: &ChoicePolicy,
    pol_h: &ChoicePolicy,
) -> Result<(Verdict, RunTranscript), TinhoferError> {
    let mut transcript = RunTranscript::default();
    if g.n() != h.n() {
        return Ok((Verdict::NotIsomorphic, transcript));
    }
    let n = g.n();
    let (union, _) = disjoint_union(g, h);
    let mut colors = refine(&union).into_colors();
    let mut choose_g = Chooser::new(pol_g);
    let mut choose_h = Chooser::new(pol_h);
    for step in 0.. {
        let Some(cells) = paired_cells(&colors, n) else {
            return Ok((Verdict::NotIsomorphic, transcript));
        };
        let Some(target) = sel.select(cells.iter().map(|(c, l, _)| (*c, l.len()))) else {
            let verdict = bijection_verdict(g, h, &cells, n);
            transcript.isomorphic = verdict.is_isomorphic();
            return Ok((verdict, transcript));
        };
        let (_, left, right) = cells.iter().find(|(c, _, _)| *c == target).expect("selected");
        let right: Vec<usize> = right.iter().map(|v| v - n).collect();
        let u = choose_g.choose(step, left)?;
        let v = choose_h.choose(step, &right)?;
        colors[u] = ind_color(step);
        colors[v + n] = ind_color(step);
        colors = refine_from(&union, &colors).into_colors();
        transcript.steps.push(Step {
            color: target,
            g: u,
            h: v,
            sizes: class_sizes(&colors[..n]),
        });
    }
    unreachable!("each step individualizes a new vertex")
}

/// Color-matching bijection of a discrete paired coloring, if it is an isomorphism.
pub(crate) fn bijection_verdict(
    g: &ColoredGraph,
    h: &ColoredGraph,
    cells: &[(u64, Vec<usize>, Vec<usize>)],
    n: usize,
) -> Verdict {
    let mut map = vec![0; n];
    for (_, l, r) in cells {
        map[l[0]] = r[0] - n;
    }
    if g.is_isomorphism(h, &map) {
        Verdict::Isomorphic(map)
    } else {
        Verdict::NotIsomorphic
    }
}
