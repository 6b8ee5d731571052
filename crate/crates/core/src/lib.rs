//! Size functions of graphs and triangle meshes with scalar or vector-valued
//! measuring functions.
//!
//! The crate computes 1-dimensional size functions and their cornerpoint
//! series, compares series with the matching distance, reduces vector-valued
//! measuring functions along the half-plane foliation, and checks where the
//! reduced size functions can be discontinuous.

// `!(a < b)` guards below also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod critical;
pub mod error;
pub mod exec;
pub mod extended;
pub mod foliation;
pub mod matching;
pub mod plot;
pub mod shapes;
pub mod size_pair;
pub mod sublevel;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Execution;
pub use extended::ExtendedReal;
pub use foliation::AdmissiblePair;
pub use size_pair::SizeGraph;
pub use sublevel::{Cornerpoint, FormalSeries, ScalarField};
