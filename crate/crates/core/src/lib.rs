//! Exact-arithmetic tools for deciding when an embedding between function spaces
//! factors through a Hilbert space, plus numerical labs that probe the obstructions.

pub mod param;
pub mod rules;
pub mod embedding;
pub mod packing;
pub mod decide;
pub mod irkbs;
pub mod lab;
pub mod report;
