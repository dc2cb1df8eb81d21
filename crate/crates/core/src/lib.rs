//! Certification and global reconstruction for an inverse Robin transmission
//! problem under the shunt electrode model.
//!
//! A disc-shaped body `Ω` contains a concentric inclusion `Ω₁` whose boundary
//! `Γ` carries an unknown Robin transmission coefficient (a corrosion
//! profile), piecewise constant on `n` arcs. Currents are driven through `m`
//! perfectly conducting electrodes on the outer boundary and the resulting
//! electrode voltages are measured. This crate provides:
//!
//! * a structured polar mesh generator and a P1 finite element assembly of
//!   the electrode-constrained forward problem ([`geometry`], [`mesh`],
//!   [`assembly`]),
//! * the current-to-voltage measurement operator, its derivative, and
//!   monotonicity/convexity diagnostics ([`forward`]),
//! * a finite probe-grid test that certifies unique solvability and produces
//!   an explicit Lipschitz stability constant ([`certify`]),
//! * a globally convergent reconstruction through an exact semidefinite
//!   reformulation, plus a nonlinear least-squares baseline ([`reconstruct`]),
//! * a batch experiment harness behind the `corrocert` CLI ([`experiment`]).
//!
//! With the default `parallel` feature, probe tables and grid sweeps run on a
//! rayon pool; disabling it falls back to sequential loops with identical
//! results (all reductions are performed in a fixed order).

pub mod assembly;
pub mod certify;
pub mod config;
mod error;
pub mod exec;
pub mod experiment;
pub mod forward;
pub mod geometry;
pub mod mesh;
pub mod numerics;
pub mod reconstruct;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
