//! Color refinement, individualization-refinement, the k-Tinhofer hierarchy
//! and the gadget constructions that separate its levels.

pub mod gadgets;
pub mod graph;
pub mod groups;
pub mod hierarchy;
pub mod refinement;
pub mod tinhofer;

pub use gadgets::{
    eval_circuit, gen_cfi, gen_hardness, gen_imp, gen_separator, parse_circuit, Circuit, CircuitError, ConstZeroWiring,
    GadgetError, Gate, HardnessOptions, PairMap,
};
pub use graph::{builtin, disjoint_union, parse_graph, ColoredGraph, GraphBuilder, GraphError, VertexSet};
pub use groups::{
    automorphisms, exact_iso, flip_parity_report, is_refinable, orbit_partition, AutomorphismSet, FlipRecord,
    GroupError, OrbitPartition, Permutation, SearchLimits,
};
pub use hierarchy::{
    classify, is_k_tinhofer_algebraic, is_k_tinhofer_irtree, is_k_tinhofer_operational, replay_witness,
    tinhofer_threshold, ClassificationReport, HierarchyError, HierarchyVerdict, Method, OperationalOptions, Witness,
};
pub use refinement::{
    ind_color, is_discrete, p_set, quotient, refine, refine_from, refine_seq, refine_with, Engine, QuotientGraph,
    RefineError, StableColoring,
};
pub use tinhofer::{
    build_ir_tree, export_dot, fpt_iso, parse_transcript, tinhofer_iso, CellSelector, ChoicePolicy, IrTree,
    RunTranscript, TinhoferError, Verdict,
};
