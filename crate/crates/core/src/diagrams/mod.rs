//! Trees, Wick pairings and phase forms of the diagram expansion of `n_s^k`.

pub mod diagram;
pub mod linalg;
pub mod phase;
pub mod tree;

pub use diagram::{
    diagram_count, enumerate_diagrams, momenta, Constraints, FeynmanDiagram, Vertex,
    MAX_DIAGRAM_ORDER,
};
pub use linalg::Q;
pub use phase::{
    census, classify_f2, phase_form, phase_form_with, vertex_phase_sum, CensusRow, Factor,
    PhaseForm, F2_READING,
};
pub use tree::{enumerate_trees, FlatNode, Tree, MAX_TREE_ORDER};
