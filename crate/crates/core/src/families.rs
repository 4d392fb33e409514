//! Synthetic target families used by the benches and acceptance checks.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::types::{Task, TargetVector, C64};

/// exp(-(x - 1/2)^2 / (2 sigma^2)) on x_i = i / 2^n, normalized.
pub fn gaussian(n: usize, sigma: f64) -> Result<TargetVector> {
    let dim = 1usize << n;
    let v: Vec<f64> = (0..dim)
        .map(|i| {
            let x = i as f64 / dim as f64 - 0.5;
            (-x * x / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    TargetVector::state(&v)
}

/// Cavity-like velocity field u = x(1-x) y^2 (1-y) on a 2^nx by 2^ny
/// cell-centred grid, x fastest.
pub fn cavity_field(nx: usize, ny: usize) -> Result<TargetVector> {
    let (gx, gy) = (1usize << nx, 1usize << ny);
    let mut v = Vec::with_capacity(gx * gy);
    for j in 0..gy {
        let y = (j as f64 + 0.5) / gy as f64;
        for i in 0..gx {
            let x = (i as f64 + 0.5) / gx as f64;
            v.push(x * (1.0 - x) * y * y * (1.0 - y));
        }
    }
    TargetVector::state(&v)
}

/// Diagonal 0.2 + 2.16 x(1-x) on cell centres; values in [0.2, 0.74].
pub fn parabolic_diagonal(n: usize) -> Result<TargetVector> {
    let dim = 1usize << n;
    let v: Vec<f64> = (0..dim)
        .map(|j| {
            let x = (j as f64 + 0.5) / dim as f64;
            0.2 + 2.16 * x * (1.0 - x)
        })
        .collect();
    TargetVector::diagonal(&v)
}

/// `k` nonzero amplitudes at distinct random positions.
pub fn sparse_random(n: usize, k: usize, seed: u64) -> Result<TargetVector> {
    let dim = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    let mut idx = sample(&mut rng, dim, k.min(dim)).into_vec();
    idx.sort_unstable();
    for i in idx {
        amps[i] = C64::new(rng.random_range(0.1..1.0), 0.0);
    }
    TargetVector::new(n, amps, Task::StatePrep)
}

/// Dense random real or complex amplitudes in [-1, 1).
pub fn random_state(n: usize, complex: bool, seed: u64) -> Result<TargetVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1usize << n)
        .map(|_| {
            let re = rng.random_range(-1.0..1.0);
            let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
            C64::new(re, im)
        })
        .collect();
    TargetVector::new(n, amps, Task::StatePrep)
}

/// Lower half sparse (k entries), upper half a broad Gaussian, equal weight.
pub fn sparse_then_smooth(n: usize, k: usize, seed: u64) -> Result<TargetVector> {
    let sparse = sparse_random(n - 1, k, seed)?;
    let smooth = gaussian(n - 1, 0.3)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps = sparse.amplitudes.iter().chain(&smooth.amplitudes).map(|a| a * s).collect();
    TargetVector::new(n, amps, Task::StatePrep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_has_k_entries() {
        let t = sparse_random(10, 16, 3).unwrap();
        assert_eq!(t.amplitudes.iter().filter(|a| a.norm() > 0.0).count(), 16);
    }
}
