#![allow(dead_code)]

use qutrit_parity::{DensityKind, DensityMatrix, Operator3, QutritState, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed 3×3 unitary: Gram–Schmidt on complex Gaussian columns.
pub fn haar_unitary(rng: &mut ChaCha8Rng) -> Operator3 {
    let mut cols: Vec<[C64; 3]> = Vec::new();
    while cols.len() < 3 {
        let mut v = [gaussian(rng), gaussian(rng), gaussian(rng)];
        for c in &cols {
            let ov: C64 = (0..3).map(|i| c[i].conj() * v[i]).sum();
            for i in 0..3 {
                v[i] -= ov * c[i];
            }
        }
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            cols.push(v.map(|x| x / n));
        }
    }
    let mut rows = [[C64::new(0.0, 0.0); 3]; 3];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..3 {
            rows[i][j] = c[i];
        }
    }
    Operator3::from_entries(rows)
}

pub fn random_state(rng: &mut ChaCha8Rng) -> QutritState {
    QutritState::normalized([gaussian(rng), gaussian(rng), gaussian(rng)]).unwrap()
}

/// Traceless Hermitian `U·diag(a, b, −a−b)·U†`.
pub fn random_deviation(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    let u = haar_unitary(rng);
    let m = u * Operator3::real_diagonal([a, b, -a - b]) * u.dagger();
    // Symmetrize away rounding so the Hermiticity check sees an exact matrix.
    let h = (m + m.dagger()).scale(C64::new(0.5, 0.0));
    let tr = h.trace().re / 3.0;
    let h = h - Operator3::identity().scale(C64::new(tr, 0.0));
    DensityMatrix::new(h, DensityKind::Deviation).unwrap()
}

pub fn identity_deviation_gap(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    a.entries().max_abs_diff(b.entries()).0
}
