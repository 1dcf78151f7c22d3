//! Coupled 3D-1D blood flow and oxygen transport on vascular networks
//! embedded in tissue, and stochastic growth of microvascular networks
//! driven by the computed oxygen field.

pub mod config;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod growth;
pub mod linalg;
pub mod model;
pub mod network;
pub mod oxygen;
pub mod rheology;
pub mod runner;
pub mod statistics;
pub mod tissue_grid;
pub mod units;
pub mod vtk;

pub use error::{Error, Result};
