//! Krylov-complexity simulation of Majorana-string operators in quadratic
//! SYK models on interaction graphs.
//!
//! The crate simulates operator delocalization: a fixed-size Majorana string
//! evolves under `H = i sum_{(a,b)} J_ab g^a g^b` with Gaussian couplings on
//! a graph (complete, star, or Watts-Strogatz), and its spread over the
//! Krylov basis is measured by the K-complexity `C_K(t)`. On top of that
//! sits a quantum-battery layer: charging power of spin batteries quenched
//! with the rescaled Hamiltonian, connected to the operator return amplitude.
//!
//! Module map:
//! - [`graph`]: interaction-graph generators.
//! - [`couplings`]: Gaussian couplings, single-particle spectrum, bandwidth
//!   rescaling, free-fermion propagator.
//! - [`opspace`]: fixed-size string sectors, ranking, the matrix-free
//!   Liouvillian, determinant fast paths.
//! - [`krylov`]: Lanczos recursion, amplitude evolution, `C_K`.
//! - [`star`]: closed forms on the star graph (analytic test surface).
//! - [`oracle`]: dense Hilbert-space brute force for small `L`.
//! - [`battery`]: charging power, maximum power, perturbative series.
//! - [`ensemble`]: deterministic parallel disorder averaging.
//! - [`cli`]: config-driven experiment commands behind the `opdeloc` binary.

pub mod battery;
pub mod cli;
pub mod couplings;
pub mod ensemble;
pub mod error;
pub mod graph;
pub mod krylov;
pub mod opspace;
pub mod oracle;
pub mod star;

pub use couplings::{CouplingMatrix, Propagator};
pub use error::{Error, Result};
pub use graph::Graph;
pub use krylov::{ComplexitySeries, LanczosData};
pub use opspace::{BatteryAxis, MajoranaString, SectorVector};
