use std::collections::HashSet;

use itertools::Itertools;
use proptest::prelude::*;

use tinhofer_core::groups::stabilizer_orbits;
use tinhofer_core::refinement::p_set_ordered;
use tinhofer_core::{
    automorphisms, exact_iso, p_set, parse_graph, quotient, refine, refine_with, tinhofer_iso, CellSelector,
    ChoicePolicy, ColoredGraph, Engine, Permutation, SearchLimits, VertexSet,
};

fn graph(max_n: usize, colors: u64) -> impl Strategy<Value = ColoredGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(0..colors, n),
            proptest::collection::vec(prop_oneof![3 => Just(0u32), 2 => Just(1u32), 1 => Just(2u32)], pairs),
        )
            .prop_map(move |(cols, mults)| {
                let edges = (0..n)
                    .tuple_combinations()
                    .zip(mults)
                    .filter(|(_, m)| *m > 0)
                    .map(|((u, v), m)| (u, v, m));
                ColoredGraph::from_edges(cols, edges).unwrap()
            })
    })
}

fn graph_and_perm(max_n: usize, colors: u64) -> impl Strategy<Value = (ColoredGraph, Vec<usize>)> {
    graph(max_n, colors).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

/// Automorphisms by trying all `n!` permutations.
fn brute_force_automorphisms(g: &ColoredGraph) -> HashSet<Vec<usize>> {
    (0..g.n())
        .permutations(g.n())
        .filter(|p| g.is_isomorphism(g, p))
        .collect()
}

proptest! {
    #[test]
    fn cgraph_round_trip(g in graph(9, 4)) {
        prop_assert_eq!(parse_graph(g.to_cgraph().as_bytes()).unwrap(), g);
    }

    #[test]
    fn naming_is_invariant_under_relabeling((g, perm) in graph_and_perm(12, 3)) {
        let pi = refine(&g);
        let rho = refine(&g.relabel(&perm));
        for v in 0..g.n() {
            prop_assert_eq!(pi.color(v), rho.color(perm[v]));
        }
        prop_assert_eq!(pi.round_count(), rho.round_count());
    }

    #[test]
    fn worklist_matches_naive(g in graph(16, 3)) {
        prop_assert_eq!(
            refine_with(&g, g.colors(), Engine::Worklist),
            refine_with(&g, g.colors(), Engine::Naive)
        );
    }

    #[test]
    fn quotient_counts((g, seq) in graph(10, 2).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n.min(3)))
    })) {
        let pi = tinhofer_core::refine_seq(&g, &seq).unwrap();
        let q = quotient(&g, &pi).unwrap();
        let classes = pi.classes();
        prop_assert_eq!(q.nodes.len(), classes.len());
        for (&ci, members) in &classes {
            prop_assert_eq!(q.size(ci), Some(members.len()));
            for &cj in classes.keys() {
                // every member of ci has the same weighted count into cj
                for &v in members {
                    let count: u64 = g
                        .neighbors(v)
                        .filter(|&(w, _)| pi.color(w) == cj)
                        .map(|(_, m)| u64::from(m))
                        .sum();
                    prop_assert_eq!(count, q.arc(ci, cj));
                }
                let size_j = classes[&cj].len() as u64;
                prop_assert_eq!(members.len() as u64 * q.arc(ci, cj), size_j * q.arc(cj, ci));
            }
        }
    }

    #[test]
    fn p_set_ignores_individualization_order((g, order) in graph(9, 2).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n.min(4)).prop_shuffle())
    })) {
        let s = VertexSet::new(order.iter().copied());
        let reference = p_set(&g, &s).unwrap();
        let permuted = p_set_ordered(&g, &order).unwrap();
        prop_assert_eq!(reference.partition(), permuted.partition());
    }

    #[test]
    fn automorphisms_form_a_group(g in graph(7, 2)) {
        let auts = automorphisms(&g, &VertexSet::empty()).unwrap();
        let set: HashSet<&Permutation> = auts.perms().iter().collect();
        prop_assert!(auts.contains(&Permutation::identity(g.n())));
        for p in auts.perms() {
            prop_assert!(set.contains(&p.inverse()));
            for q in auts.perms() {
                prop_assert!(set.contains(&p.compose(q)));
            }
        }
    }

    #[test]
    fn backtracking_matches_enumeration(g in graph(7, 2)) {
        let auts = automorphisms(&g, &VertexSet::empty()).unwrap();
        let found: HashSet<Vec<usize>> = auts.perms().iter().map(|p| p.images().to_vec()).collect();
        prop_assert_eq!(found.len(), auts.len());
        prop_assert_eq!(found, brute_force_automorphisms(&g));
    }

    #[test]
    fn orbits_refine_stable_partition((g, fixed) in graph(9, 2).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n.min(2)))
    })) {
        let s = VertexSet::new(fixed);
        let orbits = stabilizer_orbits(&g, &s, &SearchLimits::default()).unwrap();
        let pi = p_set(&g, &s).unwrap();
        for orbit in &orbits.classes {
            prop_assert!(orbit.iter().all(|&v| pi.color(v) == pi.color(orbit[0])));
        }
    }

    #[test]
    fn transcripts_replay((g, perm, seed) in graph_and_perm(9, 2).prop_flat_map(|(g, p)| (Just(g), Just(p), any::<u64>()))) {
        let h = g.relabel(&perm);
        for sel in CellSelector::ALL {
            let (verdict, transcript) = tinhofer_iso(
                &g,
                &h,
                sel,
                &ChoicePolicy::SeededRandom(seed),
                &ChoicePolicy::SeededRandom(seed ^ 1),
            )
            .unwrap();
            let (sg, sh) = transcript.scripts();
            let (again, replayed) =
                tinhofer_iso(&g, &h, sel, &ChoicePolicy::Scripted(sg), &ChoicePolicy::Scripted(sh)).unwrap();
            prop_assert_eq!(&again, &verdict);
            prop_assert_eq!(&replayed, &transcript);
            let parsed = tinhofer_core::parse_transcript(&transcript.to_text()).unwrap();
            prop_assert_eq!(parsed, transcript.scripts());
        }
    }

    #[test]
    fn exact_iso_finds_relabelings((g, perm) in graph_and_perm(9, 2)) {
        let h = g.relabel(&perm);
        let map = exact_iso(&g, &h).unwrap().expect("relabeled copy");
        prop_assert!(g.is_isomorphism(&h, &map));
    }
}
