//! Weighted Bergman projections on the unit disc, for radial weights given in
//! closed families. The crate computes moment tables, applies the projection
//! and evaluates its kernel with certified truncation bounds, measures
//! weighted Sobolev norms, and assembles the operator constants that control
//! how the projection interacts with differentiation.

pub mod cli;
pub mod error;
pub mod moments;
pub mod projection;
mod quad;
pub mod regularity;
pub mod series;
pub mod sobolev;
pub mod special;
pub mod weights;
