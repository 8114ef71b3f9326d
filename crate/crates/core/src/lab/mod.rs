//! Numerical lab: bump families, the norms the obstructions are built from, and
//! ratio scans that watch type/cotype quotients blow up.

use thiserror::Error;

use crate::packing::PackingError;

pub mod bump;
pub mod family;
pub mod norms;
pub mod quad;
pub mod scan;


pub use bump::{SmoothBump, NORMALIZATION};
pub use family::{lp_norm, lp_norm_patterns, BumpFamily, LpTarget, Reference};
pub use norms::{
    hoelder_norm, rademacher_norm, seq_l2_norm, sign_patterns, slobodeckij_seminorm, BoxRegion, RadEstimate, RadMode,
    TentTable,
};
pub use quad::{radial_integral, QuadratureConfig, Scheme};
pub use scan::{scan, ScanPoint, ScanSeries, ScanSpec};


#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("tolerance {target:e} not reached; best relative change {achieved:e}")]
    Accuracy { achieved: f64, target: f64 },
    #[error("integral diverges under refinement (last estimate {last})")]
    Divergence { last: f64 },
    #[error("exhaustive sign enumeration needs n <= 20, got {0}")]
    Mode(usize),
    #[error("packing yields only {0} centers; need at least 2")]
    DomainTooSmall(usize),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error("quadrature config: {0}")]
    Config(String),
    #[error(transparent)]
    Packing(#[from] PackingError),
}
