//! Initial velocity fields.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{IcKind, IcSpec};
use crate::dynamics::{velocity_from_q, Model, ModelParams};
use crate::error::{Error, Result};
use crate::spectral::{Grid, Spectrum, VectorField};

/// Divergence-free, zero-mean velocity for `spec`.
pub fn build_ic(spec: &IcSpec, grid: &Grid, params: &ModelParams) -> Result<VectorField<Spectrum>> {
    match spec.kind {
        IcKind::TaylorGreen => Ok(VectorField([
            grid.forward(&grid.sample(|x, y| x.sin() * y.cos()))?,
            grid.forward(&grid.sample(|x, y| -x.cos() * y.sin()))?,
        ])),
        IcKind::Shear => Ok(VectorField([
            grid.forward(&grid.sample(|_, y| y.sin()))?,
            Spectrum::zeros((grid.n(), grid.n())),
        ])),
        IcKind::Modes => {
            let field = grid.sample(|x, y| {
                spec.modes
                    .iter()
                    .map(|m| m.amplitude * (m.k1 as f64 * x + m.k2 as f64 * y + m.phase).cos())
                    .sum()
            });
            let f = grid.forward(&field)?;
            match params.model {
                Model::Euler => Ok(grid.velocity_from_vorticity(&f)),
                Model::EulerAlpha => velocity_from_q(grid, &f, params.alpha),
            }
        }
        IcKind::Random => random_velocity(grid, spec.seed, spec.p, spec.cutoff, spec.amplitude),
    }
}

/// Random vorticity spectrum `|ω̂_k| ∝ (1 + |k|²)^(−p/2)` for `0 < |k| ≤ cutoff`
/// with uniform phases, conjugate-symmetric, scaled so the velocity has RMS
/// value `rms`.
pub fn random_velocity(grid: &Grid, seed: u64, p: f64, cutoff: usize, rms: f64) -> Result<VectorField<Spectrum>> {
    let n = grid.n();
    if cutoff == 0 || 3 * cutoff >= n {
        return Err(Error::Setup(format!(
            "random spectrum cutoff K = {cutoff} must satisfy 1 <= K < n/3 = {:.2}",
            n as f64 / 3.0
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut omega = Spectrum::zeros((n, n));
    let k = cutoff as i64;
    let idx = |j: i64| j.rem_euclid(n as i64) as usize;
    for ky in 0..=k {
        for kx in -k..=k {
            if (ky == 0 && kx <= 0) || kx * kx + ky * ky > k * k {
                continue;
            }
            let k2 = (kx * kx + ky * ky) as f64;
            let c = Complex64::from_polar((1.0 + k2).powf(-p / 2.0), rng.gen_range(0.0..2.0 * PI));
            omega[[idx(ky), idx(kx)]] = c;
            omega[[idx(-ky), idx(-kx)]] = c.conj();
        }
    }
    let u = grid.velocity_from_vorticity(&omega);
    let current = grid.l2_norm(&[&u.0[0], &u.0[1]]) / (2.0 * PI);
    Ok(u.scale(rms / current))
}
