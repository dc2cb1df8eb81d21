//! Shared numeric kernels: sparse SPD factorization, dense symmetric
//! eigendecomposition, and the linear-combination machinery used to
//! re-evaluate parameter-dependent matrices cheaply.

mod eig;
mod sparse;

pub use eig::{eig_sym, max_eig, min_eig, spectral_norm_sym, SymEigen};
pub use sparse::{spd_factorize, LinearCombo, SparseSym, SpdFactor};
