#![allow(clippy::needless_range_loop)]

//! Homomorphism numbers of multigraphs into weighted graphs, randomly
//! weighted graphs and step graphons, with exact checks of the moment,
//! reflection-positivity and rank-growth structure they carry.
//!
//! ```
//! use graph_moments::graph::{family, Family};
//! use graph_moments::hom::{density, t_rw};
//! use graph_moments::scalar::{int, rat};
//! use graph_moments::targets::{Distribution, RandomWeightedGraph, StepGraphon};
//!
//! let double_edge = family(Family::MultiEdge(2)).unwrap();
//! assert_eq!(density(&double_edge, &StepGraphon::constant(rat(1, 2))).unwrap(), rat(1, 4));
//!
//! let coin = Distribution::uniform(vec![int(0), int(1)]).unwrap();
//! let h = RandomWeightedGraph::new(vec![int(1)], vec![vec![coin]]).unwrap();
//! assert_eq!(t_rw(&double_edge, &h).unwrap(), rat(1, 2));
//! ```
//!
//! The guide in `book/` walks through every module; its code blocks run as
//! doc-tests of this crate.

pub mod connection;
pub mod error;
pub mod graph;
pub mod hom;
pub mod io;
pub mod linalg;
pub mod moments;
pub mod rank_growth;
pub mod sampler;
pub mod scalar;
pub mod spectral;
pub mod targets;
pub mod verify;

pub use error::{Error, Result};
pub use graph::Multigraph;
pub use scalar::Rational;
pub use targets::{Distribution, RandomWeightedGraph, StepGraphon, WeightedGraph};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/multigraphs.md")]
    mod multigraphs {}
    #[doc = include_str!("../../../book/src/homomorphisms.md")]
    mod homomorphisms {}
    #[doc = include_str!("../../../book/src/connection-matrices.md")]
    mod connection_matrices {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    mod spectra {}
    #[doc = include_str!("../../../book/src/moments.md")]
    mod moments {}
    #[doc = include_str!("../../../book/src/rank-growth.md")]
    mod rank_growth {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
