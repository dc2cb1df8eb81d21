//! Seeded symmetric noise with unit spectral norm.

use crate::numerics::spectral_norm_sym;
use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Symmetric `m × m` matrix with uniform entries, rescaled to spectral norm
/// one; scale by `δ` to realize `‖Y^δ − Ŷ‖₂ = δ`.
pub fn noise_matrix(m: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = DMatrix::zeros(m, m);
    for r in 0..m {
        for c in 0..=r {
            let v: f64 = rng.random_range(-1.0..1.0);
            e[(r, c)] = v;
            e[(c, r)] = v;
        }
    }
    let norm = spectral_norm_sym(&e).expect("symmetric by construction");
    e / norm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_norm_symmetric_and_deterministic() {
        let e1 = noise_matrix(6, 99);
        let e2 = noise_matrix(6, 99);
        assert_eq!(e1, e2);
        assert!((spectral_norm_sym(&e1).unwrap() - 1.0).abs() <= 1e-12);
        assert_eq!(e1.transpose(), e1);
        let other = noise_matrix(6, 100);
        assert!((&e1 - other).amax() > 1e-3);
    }
}
