//! Orientations of mixed graphs that maximize the number of ordered
//! reachable vertex pairs.

pub mod graph;
pub mod instances;
pub mod arboresque;
pub mod dismember;
pub mod reduce;
pub mod replacement;
pub mod solvers;
