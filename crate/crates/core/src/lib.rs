//! Exact evaluation of relations among real enumerative invariants of del Pezzo surfaces:
//! genus decrease along a vanishing sphere, unscrewing, the absolute/relative correspondence
//! and its inverse, wall-crossing, and a classifier for curves in the quadric.
//!
//! All arithmetic is over arbitrary-precision integers.

pub mod cli;
pub mod combin;
pub mod engine;
pub mod fixtures;
pub mod picard;
pub mod realmodel;
pub mod store;

pub use engine::{EngineError, Incidence, Mode, RelationResult};
pub use picard::{HClass, LatticeKind, SurfaceModel};
pub use realmodel::{ModelSet, RealSurfaceModel};
pub use store::{InvariantKey, InvariantTable};
