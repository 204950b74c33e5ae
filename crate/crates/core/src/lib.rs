//! Modulo orientations, strong group connectivity and circular flows on
//! multigraphs, with the partition weights, reductions and planar discharging
//! that drive a flow solver for highly edge-connected plane multigraphs.

pub mod catalog;
pub mod error;
pub mod gen;
pub mod multigraph;
pub mod orient;
pub mod planar;
pub mod reduce;
pub mod text;
pub mod weights;

pub use catalog::{catalog_match, CatalogLabel};
pub use error::{Error, Result};
pub use multigraph::{Multigraph, Subdivision};
