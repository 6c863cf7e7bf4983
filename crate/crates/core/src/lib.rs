//! Perturbed orbits of hyperbolic Möbius recurrences
//! `z_{i+1} = (a z_i + b)/(c z_i + d)`: fixed points, conjugation to a dilation,
//! invariant and avoided regions, shadowing bounds and seeded verification suites.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod extended;
pub mod hyperbolic;
pub mod mobius;
pub mod regions;
pub mod rng;
pub mod verify;

pub use dynamics::{BoundSet, ModelKind, OrbitRecord, PerturbationModel, RegionTag};
pub use error::{HusError, Result};
pub use extended::{approx_eq, chordal_distance, ExtendedComplex};
pub use hyperbolic::{AxisPoint, HyperbolicProfile, ProfileSummary};
pub use mobius::{preset, MapClass, MapFile, MobiusMap};
pub use num_complex::Complex64;
pub use regions::{AvoidedRegionW, DiskSpec, Frame, RegionReport, Sense};
pub use verify::{SuiteConfig, SuiteId, SuiteReport};
