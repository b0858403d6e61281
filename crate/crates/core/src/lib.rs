//! Exact inference and greedy structure learning for planar Ising models.
//!
//! Zero-field models on planar graphs get their log-partition function,
//! moments and Hessian from the Kac-Ward determinant. Node fields are
//! handled through an auxiliary vertex. On top of that sit a Newton fitter
//! and a greedy learner that adds planarity-preserving edges.

pub mod error;
pub mod fit;
pub mod io;
pub mod ising;
pub mod kacward;
pub mod learn;
pub mod planar;
pub mod sampling;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/planar-graphs.md")]
    mod planar_graphs {}
    #[doc = include_str!("../../../book/src/kac-ward.md")]
    mod kac_ward {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/fitting.md")]
    mod fitting {}
    #[doc = include_str!("../../../book/src/structure-learning.md")]
    mod structure_learning {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
