//! Exact truncated-series geometry of symplectic connections.
//!
//! Jets of functions at a base point, tensors with jet or rational entries,
//! connection charts, curvature, normal tensors and reconstruction of charts
//! from prescribed curvature data. Arithmetic is exact over the rationals.
#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod chart;
pub mod curvature;
pub mod error;
pub mod generate;
pub mod jet;
pub mod matrix;
pub mod normal;
pub mod rational;
pub mod reconstruct;
pub mod report;
pub mod series;
pub mod tensor;

pub use chart::{ChartSpec, Provenance};
pub use error::{Error, Result};
pub use jet::{Jet, Multidegree, RingOp};
pub use rational::Rational;
pub use report::ValidationReport;
pub use tensor::{JetTensor, PointTensor, Tensor, Variance};
