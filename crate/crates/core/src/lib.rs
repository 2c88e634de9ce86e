//! Constructive combinatorics of tree-modeled genus-0 curve families.

pub mod scalar;
pub mod trees;
pub mod projective;
pub mod metric_nets;
pub mod curve_families;
pub mod sampling;
pub mod bubbles;
pub mod bounds;
pub mod svg;
pub mod artifacts;
pub mod pipeline;

pub use scalar::Scalar;

pub type ProjPoint = projective::ProjPoint<f64>;
pub type FiniteMetricSpace = metric_nets::FiniteMetricSpace<f64>;
pub type ModuliPoint = curve_families::ModuliPoint<f64>;
pub type FiberPoint = curve_families::FiberPoint<f64>;
pub type CompactnessParams = curve_families::CompactnessParams<f64>;
pub type ThickThinDecomposition = curve_families::ThickThinDecomposition<f64>;
pub type BubbleConfiguration = bubbles::BubbleConfiguration<f64>;
pub type TreeAssociation = bubbles::TreeAssociation<f64>;
