//! Eavesdropping probes on BB84: Eve's information gain, the Alice–Eve
//! mutual information, Bob's disturbance, and the resonance peaks that the
//! disturbance develops near the optimal probe.
//!
//! The crate is layered bottom-up:
//!
//! * [`qstate`]: small dense kets and operators, partial trace, Hermitian
//!   eigendecomposition.
//! * [`probes`]: the one-qubit and two-qubit probe families.
//! * [`measurement`]: Eve's binary measurements.
//! * [`infodist`]: gains, mutual information, conditional errors and the
//!   averaged disturbance.
//! * [`sweep`]: parameter sweeps, peak detection, attenuation with `δ` and
//!   the best single-qubit strategy search.
//! * [`oracle`]: an independent recomputation from the joint Born-rule
//!   distribution.
//!
//! Grid evaluations run on rayon when the `parallel` feature is enabled
//! (the default); results are always assembled in grid order.

pub mod error;
pub mod infodist;
pub mod measurement;
pub mod oracle;
pub mod par;
pub mod probes;
pub mod qstate;
pub mod sweep;

pub use error::{Error, Result};
