//! Deterministic approximate counting for the hard-core and monomer-dimer
//! models via truncated self-avoiding-walk tree recurrences, with the
//! correlation-decay analysis and connective-constant tools around it.
//!
//! Parallelism comes from rayon when the `parallel` feature is enabled (the
//! default) and the current pool has more than one thread. Every parallel
//! path combines results in a fixed order, so outputs do not depend on the
//! thread count.

pub mod connconst;
pub mod counting;
pub mod decay;
pub mod error;
pub mod graph;
pub mod par;
pub mod recurrence;
pub mod sawtree;

pub use error::{Error, Result};
pub use graph::{generate, Graph, GraphKind, RNG_NAME};
pub use recurrence::{ApproxResult, Bracket, DepthSchedule, InitialCondition, ModelParams};
pub use sawtree::{BoundaryCondition, Fix, Mode, Pin, SawTree};
