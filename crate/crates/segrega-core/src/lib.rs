//! Simulation and certification of segregated limit configurations of k
//! strongly competing species on the unit disk.
//!
//! The crate has three layers:
//!
//! * a finite-difference solver for the competition-diffusion system
//!   -Δu_i = -μ u_i Σ_{j≠i} u_j on a polar grid, with a continuation schedule
//!   in the interaction strength μ ([`pde`]);
//! * spectral machinery for the harmonic function ψ_a attached to an
//!   alternating boundary datum, and the Chebyshev/monomial moment conditions
//!   that certify interior points of maximal multiplicity ([`harmonic`],
//!   [`certify`]);
//! * extraction and combinatorial verification of the nodal geometry:
//!   regions, interfaces, multiple points, the Euler/multiplicity identities
//!   and the five-way classification for six species ([`partition`]).

pub mod datum;
pub mod harmonic;
pub mod kernels;
pub mod pde;

pub use datum::{AdmissibleDatum, AlternatingDatum, Arc, BoundaryProfile, ProfileShape};
pub use harmonic::{CriticalPoint, DirichletSolution, FourierField};
pub use kernels::{DiskPoint, QuadratureRule};
pub use pde::{DensityGrid, PolarGrid, SolveStats};
