//! Isomorphism test for graphs with small Tinhofer deficiency: a bounded
//! number of Tinhofer steps, then exhaustive matching of what is left.

use super::{bijection_verdict, CellSelector, ChoicePolicy, Chooser, TinhoferError, Verdict};
use crate::graph::{disjoint_union, ColoredGraph};
use crate::groups::paired_cells;
use crate::refinement::{ind_color, refine, refine_from};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FptOptions {
    pub selector: CellSelector,
    pub pol_g: ChoicePolicy,
    pub pol_h: ChoicePolicy,
}

impl Default for FptOptions {
    fn default() -> Self {
        FptOptions {
            selector: CellSelector::MinColor,
            pol_g: ChoicePolicy::FirstVertex,
            pol_h: ChoicePolicy::FirstVertex,
        }
    }
}

pub fn fpt_iso(g: &ColoredGraph, h: &ColoredGraph, budget: usize) -> Result<Verdict, TinhoferError> {
    fpt_iso_with(g, h, budget, &FptOptions::default())
}

/// Runs `n - budget` Tinhofer steps, then tries every color-respecting
/// bijection between the remaining classes.
///
/// The verdict is exact when `g` is `(n - budget)`-Tinhofer; an `Isomorphic`
/// verdict is always verified.
pub fn fpt_iso_with(
    g: &ColoredGraph,
    h: &ColoredGraph,
    budget: usize,
    opts: &FptOptions,
) -> Result<Verdict, TinhoferError> {
    let n = g.n();
    if budget > n {
        return Err(TinhoferError::BudgetOutOfRange { budget, n });
    }
    if h.n() != n {
        return Ok(Verdict::NotIsomorphic);
    }
    let (union, _) = disjoint_union(g, h);
    let mut colors = refine(&union).into_colors();
    let mut choose_g = Chooser::new(&opts.pol_g);
    let mut choose_h = Chooser::new(&opts.pol_h);
    for step in 0..n - budget {
        let Some(cells) = paired_cells(&colors, n) else {
            return Ok(Verdict::NotIsomorphic);
        };
        let Some(target) = opts.selector.select(cells.iter().map(|(c, l, _)| (*c, l.len()))) else {
            return Ok(bijection_verdict(g, h, &cells, n));
        };
        let (_, left, right) = cells.iter().find(|(c, _, _)| *c == target).expect("selected");
        let right: Vec<usize> = right.iter().map(|v| v - n).collect();
        let u = choose_g.choose(step, left)?;
        let v = choose_h.choose(step, &right)?;
        colors[u] = ind_color(step);
        colors[v + n] = ind_color(step);
        colors = refine_from(&union, &colors).into_colors();
    }
    let Some(cells) = paired_cells(&colors, n) else {
        return Ok(Verdict::NotIsomorphic);
    };
    let mut order = Vec::with_capacity(n);
    let mut candidates = vec![Vec::new(); n];
    let mut sorted = cells;
    sorted.sort_by_key(|(c, l, _)| (l.len(), *c));
    for (_, l, r) in &sorted {
        for &u in l {
            order.push(u);
            candidates[u] = r.iter().map(|v| v - n).collect();
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend(g, h, &order, &candidates, 0, &mut map, &mut used) && g.is_isomorphism(h, &map) {
        Ok(Verdict::Isomorphic(map))
    } else {
        Ok(Verdict::NotIsomorphic)
    }
}

fn extend(
    g: &ColoredGraph,
    h: &ColoredGraph,
    order: &[usize],
    candidates: &[Vec<usize>],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&u) = order.get(depth) else {
        return true;
    };
    for &v in &candidates[u] {
        if used[v] {
            continue;
        }
        let consistent = order[..depth]
            .iter()
            .all(|&x| g.multiplicity(u, x) == h.multiplicity(v, map[x]));
        if !consistent {
            continue;
        }
        map[u] = v;
        used[v] = true;
        if extend(g, h, order, candidates, depth + 1, map, used) {
            return true;
        }
        used[v] = false;
    }
    map[u] = usize::MAX;
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builtin;

    #[test]
    fn cycles() {
        let g = builtin("cycle", &[6]).unwrap();
        let h = g.relabel(&[2, 4, 0, 1, 5, 3]);
        for budget in 0..=6 {
            assert!(fpt_iso(&g, &h, budget).unwrap().is_isomorphic(), "budget {budget}");
        }
        let c3 = builtin("cycle", &[3]).unwrap();
        let (t, _) = disjoint_union(&c3, &c3);
        for budget in 0..=6 {
            assert_eq!(fpt_iso(&g, &t, budget).unwrap(), Verdict::NotIsomorphic);
        }
        assert_eq!(
            fpt_iso(&g, &h, 7),
            Err(TinhoferError::BudgetOutOfRange { budget: 7, n: 6 })
        );
    }
}
