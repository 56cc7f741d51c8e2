//! Finite-frame certification kernel.
//!
//! Exact-rational and floating linear algebra (`scalar`, `qmat`, `fmat`,
//! `cmat`, `poly`), the frame model (`frame`), and the deciders and
//! constructors built on them: spark and complement-property scans
//! (`spark`), Naimark complements (`naimark`), phase and norm retrieval by
//! vectors and subspaces (`phase`), minimal augmentation and direct sums
//! (`augment`), and projection/Riesz dualities (`projections`).
//!
//! Inputs are stored exactly — every finite double is a rational — so the
//! combinatorial decisions are exact by default; floating paths are
//! tolerance-guarded and report their arithmetic in every certificate.

pub mod augment;
pub mod cert;
pub mod cmat;
pub mod error;
pub mod fixtures;
pub mod fmat;
pub mod frame;
pub mod naimark;
pub mod phase;
pub mod poly;
pub mod projections;
pub mod qmat;
pub mod random;
pub mod scalar;
pub mod spark;
pub mod tol;

pub use cert::{Certificate, Decision, PartitionCertificate, PrCertificate};
pub use error::{Error, Result};
pub use frame::{Subspace, SubspaceFamily, VectorFamily};
pub use tol::{Field, Mode, ToleranceConfig};
