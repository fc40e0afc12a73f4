//! Structured random-matrix ensembles and the algebra that goes with them:
//! circulant Hankel/Toeplitz and (s,t)-link patterns, the swirl block
//! construction with its exact trace identities, empirical spectra scaled
//! against the symmetrized Rayleigh law, and exact limiting moments computed
//! by pair-partition nullity counting over the integers.
//!
//! All randomness flows through seeded [`ensembles::EntryDistribution`]
//! streams, so every simulation in this crate is reproducible bit for bit.

pub mod ensembles;
pub mod error;
pub mod link;
pub mod matrix;
pub mod moments;
pub mod spectra;
pub mod swirl;

mod eigen;

pub use ensembles::{DistributionKind, EntryDistribution, PatternFamily, PatternSpec};
pub use error::{Error, Result};
pub use link::LinkReport;
pub use matrix::{DenseMatrix, IntMatrix};
pub use moments::Matching;
pub use spectra::{ReferenceDistribution, SpectralSample};
pub use swirl::{SwirlResult, TraceIdentity, TraceIdentityReport};
