//! Hopset and spanner construction from a single parameterized sampling
//! hierarchy, together with exhaustive verifiers and generators/checkers for
//! the matching lower-bound instances.
//!
//! The pipeline is: pick a level function and a size parameter `k`
//! ([`schedule`]), sample a vertex hierarchy and derive pivots and bunches
//! ([`levels`]), assemble a hopset ([`hopset`]) or spanner ([`spanner`]),
//! then measure true stretch and hop counts against the exact shortest-path
//! oracle ([`verify`]). The [`lowerbound`] module generates high-girth and
//! layered tower instances and checks the counting arguments on them.

pub mod error;
pub mod gen;
pub mod graph;
pub mod hopset;
pub mod levels;
pub mod lowerbound;
mod rng;
pub mod schedule;
pub mod spanner;
pub mod verify;

pub use error::{Error, Result};
