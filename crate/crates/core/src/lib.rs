//! Max-consensus for multi-agent systems over a wireless multiple-access channel.
//!
//! Simultaneous transmissions superpose at each receiver. Broadcasting `y·x` and
//! `y` on two orthogonal slots lets every agent compute the average of its
//! authorized neighbors in two channel uses, regardless of its degree. Agents
//! that fall below that average cannot hold the maximum and stop broadcasting.
//!
//! * [`topology`]: undirected graphs, generators, connectivity and diameter.
//! * [`channel`]: ideal and affine superposition, nomographic evaluation.
//! * [`protocol`]: asymptotic, switching and traditional per-agent dynamics.
//! * [`engine`]: synchronous rounds, consensus detection, batch runs, exports.
//! * [`analysis`]: Lyapunov monitor, trace checks and the TDMA ratio study.

pub mod analysis;
pub mod channel;
pub mod engine;
mod error;
pub mod protocol;
pub mod scalar;
pub mod stats;
pub mod topology;

pub use error::{Error, Result};
