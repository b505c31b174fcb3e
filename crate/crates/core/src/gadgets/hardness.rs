//! The graph built from a monotone circuit.
//!
//! Every gate gets a pair. AND gates become `X_3` over their input and output
//! pairs; OR gates become two IMP gadgets sharing the output pair. Each AND/OR
//! output pair then drives an IMP gadget `Y_{k+4}` whose last two pairs feed an
//! `X_3` with output pair `P_m`, and `P_m` is joined to the CONST0 pairs by
//! double edges.

use super::circuit::{Circuit, Gate};
use super::{add_pair, attach_cfi, attach_imp, check_k, GadgetError, PairMap};
use crate::graph::{ColoredGraph, GraphBuilder};

/// How `P_m` is joined to each CONST0 pair (all edges have multiplicity 2).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ConstZeroWiring {
    /// Every `P_m` vertex to every CONST0 vertex.
    #[default]
    Complete,
    /// `a_m` to `a_c` and `b_m` to `b_c`.
    Matched,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HardnessOptions {
    /// One `P_m` per AND/OR gate instead of a single shared one.
    pub per_gate_pm: bool,
    pub wiring: ConstZeroWiring,
}

struct Colors(u64);

impl Colors {
    fn fresh(&mut self) -> u64 {
        self.0 += 1;
        self.0 - 1
    }
}

/// Builds the reduction graph for `c` with parameter `k`.
///
/// Labels: gate pairs are `g<id>`; OR auxiliaries `g<id>.i1`, `g<id>.i2`,
/// `g<id>.j1`, `g<id>.j2` with sets `g<id>.F`, `g<id>.F'`; AND sets `g<id>.F`;
/// the attached gadget has pairs `g<id>.Q0..Q<k+4>` and sets `g<id>.FY`,
/// `g<id>.FM`; the final pair is `Pm` (or `g<id>.Pm` per gate).
pub fn gen_hardness(c: &Circuit, k: usize, opts: &HardnessOptions) -> Result<(ColoredGraph, PairMap), GadgetError> {
    check_k(k, 1)?;
    let gates = c.gates();
    let ids = c.ids();
    if !gates.iter().any(|g| matches!(g, Gate::And(..) | Gate::Or(..))) {
        return Err(GadgetError::NoLogicGate);
    }
    if !gates.contains(&Gate::Const0) {
        return Err(GadgetError::NoConstZero);
    }
    for (g, &id) in gates.iter().zip(ids) {
        if let Gate::And(x, y) | Gate::Or(x, y) = *g {
            if x == y {
                return Err(GadgetError::RepeatedInput(id));
            }
        }
    }

    let mut b = GraphBuilder::new(0);
    let mut map = PairMap::default();
    let mut colors = Colors(0);

    let mut zero_color = None;
    let mut pairs = Vec::with_capacity(gates.len());
    for (g, &id) in gates.iter().zip(ids) {
        let pair = match g {
            Gate::Const0 => {
                let color = *zero_color.get_or_insert_with(|| colors.fresh());
                add_pair(&mut b, color)
            }
            Gate::Const1 => {
                let (ca, cb) = (colors.fresh(), colors.fresh());
                (b.add_vertex(ca), b.add_vertex(cb))
            }
            Gate::And(..) | Gate::Or(..) => add_pair(&mut b, colors.fresh()),
        };
        map.insert_pair(format!("g{id}"), pair);
        pairs.push(pair);
    }

    for (t, (g, &id)) in gates.iter().zip(ids).enumerate() {
        match *g {
            Gate::And(i, j) => {
                let f = attach_cfi(&mut b, &[pairs[i], pairs[j], pairs[t]], colors.fresh());
                map.insert_set(format!("g{id}.F"), f);
            }
            Gate::Or(i, j) => {
                for (input, side, set) in [(i, "i", "F"), (j, "j", "F'")] {
                    let p1 = add_pair(&mut b, colors.fresh());
                    let p2 = add_pair(&mut b, colors.fresh());
                    let f = attach_cfi(&mut b, &[p1, p2, pairs[t]], colors.fresh());
                    attach_imp(&mut b, pairs[input], p1, p2);
                    map.insert_pair(format!("g{id}.{side}1"), p1);
                    map.insert_pair(format!("g{id}.{side}2"), p2);
                    map.insert_set(format!("g{id}.{set}"), f);
                }
            }
            Gate::Const0 | Gate::Const1 => {}
        }
    }

    let mut shared_pm = None;
    let mut outputs = Vec::new();
    for (t, (g, &id)) in gates.iter().zip(ids).enumerate() {
        if !matches!(g, Gate::And(..) | Gate::Or(..)) {
            continue;
        }
        let q: Vec<(usize, usize)> = (0..k + 5).map(|_| add_pair(&mut b, colors.fresh())).collect();
        for (i, &p) in q.iter().enumerate() {
            map.insert_pair(format!("g{id}.Q{i}"), p);
        }
        let fy = attach_cfi(&mut b, &q[1..], colors.fresh());
        map.insert_set(format!("g{id}.FY"), fy);
        attach_imp(&mut b, q[0], q[1], q[2]);
        let gate_pair = pairs[t];
        b.add_edge(gate_pair.0, q[0].0, 1).expect("distinct pairs");
        b.add_edge(gate_pair.1, q[0].1, 1).expect("distinct pairs");

        let pm = if opts.per_gate_pm {
            let pm = add_pair(&mut b, colors.fresh());
            map.insert_pair(format!("g{id}.Pm"), pm);
            outputs.push(pm);
            pm
        } else {
            *shared_pm.get_or_insert_with(|| {
                let pm = add_pair(&mut b, colors.fresh());
                map.insert_pair("Pm", pm);
                outputs.push(pm);
                pm
            })
        };
        let fm = attach_cfi(&mut b, &[q[k + 3], q[k + 4], pm], colors.fresh());
        map.insert_set(format!("g{id}.FM"), fm);
    }

    for pm in outputs {
        for (g, &pair) in gates.iter().zip(&pairs) {
            if *g != Gate::Const0 {
                continue;
            }
            let edges = match opts.wiring {
                ConstZeroWiring::Complete => vec![(pm.0, pair.0), (pm.0, pair.1), (pm.1, pair.0), (pm.1, pair.1)],
                ConstZeroWiring::Matched => vec![(pm.0, pair.0), (pm.1, pair.1)],
            };
            for (u, v) in edges {
                b.add_edge(u, v, 2).expect("distinct pairs");
            }
        }
    }
    Ok((b.build(), map))
}
