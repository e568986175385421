//! Dynamic shortest paths on unweighted graphs.
//!
//! The algebraic core keeps `(I - uA)^{-1}` over truncated polynomials as a lazy
//! `T(I+N)` pair; hop distances are the minimal nonzero degrees of its entries.
//! On top of it sit successor/path reporting, exact and approximate APSP,
//! two spanner maintenance schemes, a dynamic Steiner tree, and generators for
//! the OuMv / k-cycle reduction workloads with a replay harness.

pub mod apsp;
pub mod cli;
pub mod error;
pub mod gadgets;
pub mod graph;
pub mod inverse;
pub mod path_reporter;
pub mod polymat;
pub mod product;
pub mod provider;
pub mod ring;
pub mod rng;
pub mod spanner;
pub mod steiner;

pub use error::{Error, Result};
pub use graph::{bfs_dist, Dist, DynamicGraph, EdgeEvent};
