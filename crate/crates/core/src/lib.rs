//! Gromov-Hausdorff distance estimates between the 2-dimensional model spaces
//! E², S² and H², and a weighted search graph over their Cartesian products.
//!
//! The pipeline discretizes unit balls of each model space ([`geometry`]),
//! embeds the hyperbolic ball isometrically into ℝ⁶ ([`blanusa`]), places the
//! Euclidean and spherical balls into ℝ⁶ through a finite family of rigid
//! candidate embeddings, and takes the smallest symmetric Hausdorff distance
//! ([`hausdorff`], [`gh_estimate`]). The resulting distances weight the edges
//! of a graph over product-manifold signatures ([`latent_graph`]).

pub mod blanusa;
pub mod error;
pub mod geometry;
pub mod gh_estimate;
pub mod hausdorff;
pub mod latent_graph;
pub mod quadrature;

pub use error::{GhError, Result};
