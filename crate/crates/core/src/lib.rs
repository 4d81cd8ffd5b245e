//! Vital node identification on complex networks.
//!
//! A per-network GCN feature extractor, a transferable GAT task model trained
//! on SIR spreading labels, and a neighbor-entropy ranking built on the GAT's
//! influence factors, together with the baseline centralities, the SIR
//! simulator, and the attack/spreading evaluation harness used to compare
//! them.

pub mod centrality;
pub mod embedding;
pub mod error;
pub mod evaluation;
pub mod gnne;
pub mod graph;
pub mod matrix;
pub mod methods;
pub mod nn;
pub mod seed;
pub mod sir;

pub use centrality::RankedList;
pub use error::{Error, Result};
pub use graph::{Graph, NodeMap};
pub use matrix::DenseMatrix;
