//! Individualization-refinement trees.

use std::collections::VecDeque;
use std::fmt::Write as _;

use super::{CellSelector, TinhoferError};
use crate::graph::ColoredGraph;
use crate::refinement::{ind_color, quotient, refine, refine_from, QuotientGraph, StableColoring};

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrNode {
    /// Individualized vertices, in order.
    pub seq: Vec<usize>,
    pub coloring: StableColoring,
    pub quotient: QuotientGraph,
    /// Color of the cell the children individualize from.
    pub cell: Option<u64>,
    pub children: Vec<usize>,
}

impl IrNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Nodes in breadth-first order; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrTree {
    nodes: Vec<IrNode>,
}

impl IrTree {
    pub fn nodes(&self) -> &[IrNode] {
        &self.nodes
    }

    pub fn root(&self) -> &IrNode {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &IrNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.iter().map(|n| n.children.len()).sum()
    }
}

pub fn build_ir_tree(g: &ColoredGraph, sel: CellSelector, depth: usize) -> Result<IrTree, TinhoferError> {
    build_ir_tree_with(g, sel, depth, DEFAULT_NODE_CAP)
}

/// Expands every node until its coloring is discrete or `depth` vertices
/// have been individualized. Children follow ascending vertex order.
pub fn build_ir_tree_with(
    g: &ColoredGraph,
    sel: CellSelector,
    depth: usize,
    node_cap: usize,
) -> Result<IrTree, TinhoferError> {
    let make = |seq: Vec<usize>, coloring: StableColoring| {
        let quotient = quotient(g, &coloring).expect("refinement output is stable");
        IrNode {
            seq,
            coloring,
            quotient,
            cell: None,
            children: Vec::new(),
        }
    };
    let mut nodes = vec![make(Vec::new(), refine(g))];
    let mut queue = VecDeque::from([0]);
    while let Some(id) = queue.pop_front() {
        if nodes[id].seq.len() >= depth {
            continue;
        }
        let classes = nodes[id].coloring.classes();
        let Some(cell) = sel.select(classes.iter().map(|(&c, m)| (c, m.len()))) else {
            continue;
        };
        nodes[id].cell = Some(cell);
        let step = nodes[id].seq.len();
        for &v in &classes[&cell] {
            if nodes.len() >= node_cap {
                return Err(TinhoferError::NodeCap(node_cap));
            }
            let mut colors = nodes[id].coloring.colors().to_vec();
            colors[v] = ind_color(step);
            let coloring = refine_from(g, &colors);
            let mut seq = nodes[id].seq.clone();
            seq.push(v);
            let child = nodes.len();
            nodes.push(make(seq, coloring));
            nodes[id].children.push(child);
            queue.push_back(child);
        }
    }
    Ok(IrTree { nodes })
}

/// DOT digraph; each label shows the 1-based sequence and the class sizes
/// in descending order.
pub fn export_dot(t: &IrTree) -> String {
    let mut out = String::from("digraph irtree {\n");
    for (i, node) in t.nodes.iter().enumerate() {
        let seq: Vec<String> = node.seq.iter().map(|v| (v + 1).to_string()).collect();
        let mut sizes: Vec<usize> = node.quotient.nodes.iter().map(|&(_, s)| s).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        let sizes: Vec<String> = sizes.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "  n{i} [label=\"({})\\n{}\"];", seq.join(","), sizes.join(" "));
    }
    for (i, node) in t.nodes.iter().enumerate() {
        for c in &node.children {
            let _ = writeln!(out, "  n{i} -> n{c};");
        }
    }
    out.push_str("}\n");
    out
}
