//! Boundary-operator discretization of the zero-energy Faddeev scattering
//! problem on a bounded planar domain, together with three independent
//! detectors for exceptional points.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! numerics: file formats, caching, parallel scans and the command line
//! live in the `faddeev-ep` companion crate.

#![no_std]

extern crate alloc;

mod prelude;

pub mod boundary_ops;
pub mod dtn;
pub mod error;
pub mod exceptional;
pub mod geometry;
pub mod green;
pub mod interior;
pub mod linalg;
pub mod potential;
pub mod quadrature;
pub mod sobolev;
pub mod special;
pub mod transform;

pub use boundary_ops::{BlockForm, BoundaryOperator, SpaceTag};
pub use dtn::{DtnMap, DtnProvenance};
pub use error::{Error, Result};
pub use exceptional::{CriterionOperator, ParityRecord, ParityVerdict, ScanRecord, XiCurve};
pub use geometry::{BoundaryCurve, NodeSet};
pub use green::{GreenValue, KPoint};
pub use potential::{Conductivity, Omega, Potential};
pub use sobolev::SobolevWeight;
pub use transform::{BoundaryTrace, TransformValue};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix used for every assembled operator.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex vector of node values.
pub type CVec = nalgebra::DVector<C64>;
