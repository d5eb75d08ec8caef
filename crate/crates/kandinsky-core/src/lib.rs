//! Bend minimization for plane graphs in the Kandinsky drawing model.
//!
//! The crate provides a combinatorial-embedding graph model, the Kandinsky
//! representation type with its validity rules, an exhaustive search oracle
//! for small instances, glueable decomposition trees, the exact dynamic
//! program over such trees, and generators for the NP-hardness gadget
//! families together with small-instance corpora.

pub mod corpus;
pub mod decomposition;
pub mod hardness;
pub mod oracle;
pub mod plane_graph;
pub mod rep;
pub mod solver;
pub mod subgraph;

pub use plane_graph::{
    build_plane_graph, BoundaryPath, Dart, EdgeId, FaceId, FaceWalk, GraphError, PlaneGraph,
    VertexId,
};
