//! Right-hand sides of the Euler and Euler-α equations on the flat torus,
//! in velocity form and in (potential-)vorticity transport form.
//!
//! Every quadratic product is formed in physical space and truncated by the
//! 2/3 rule, so for band-limited inputs the products are exact on the kept
//! band and the velocity and transport forms agree to round-off.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{modulus, Grid, RealField, Spectrum, TensorField, VectorField};

/// Relative threshold for the divergence-free and pair-consistency guards.
const CONSISTENCY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Euler,
    EulerAlpha,
}

/// Model selection with the Helmholtz length-squared `alpha` and viscosity
/// `nu`. `alpha` is ignored by the Euler model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub model: Model,
    pub alpha: f64,
    pub nu: f64,
}

impl ModelParams {
    pub fn euler() -> Self {
        Self { model: Model::Euler, alpha: 0.0, nu: 0.0 }
    }

    pub fn euler_alpha(alpha: f64, nu: f64) -> Result<Self> {
        let p = Self { model: Model::EulerAlpha, alpha, nu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self.model {
            Model::Euler if self.nu != 0.0 => Err(Error::ViscousEuler(self.nu)),
            Model::Euler => Ok(()),
            Model::EulerAlpha => {
                if !(self.alpha > 0.0 && self.alpha.is_finite()) {
                    return Err(Error::Alpha(self.alpha));
                }
                if !(self.nu >= 0.0 && self.nu.is_finite()) {
                    return Err(Error::Viscosity(self.nu));
                }
                Ok(())
            }
        }
    }
}

/// Physical samples of `u` and of its gradient `[i][j] = ∂u_i/∂x_j`.
struct Samples {
    u: VectorField<RealField>,
    g: TensorField<RealField>,
}

impl Samples {
    fn new(grid: &Grid, u: &VectorField<Spectrum>) -> Self {
        let g = grid.gradient_tensor(u);
        Self {
            u: grid.to_physical_vector(u),
            g: TensorField([
                [grid.to_physical(&g.0[0][0]), grid.to_physical(&g.0[0][1])],
                [grid.to_physical(&g.0[1][0]), grid.to_physical(&g.0[1][1])],
            ]),
        }
    }

    /// Dealiased `(u·∇)u`, component `i` = `u_j ∂_j u_i`.
    fn advection(&self, grid: &Grid) -> VectorField<Spectrum> {
        let [u1, u2] = &self.u.0;
        let g = &self.g.0;
        VectorField([
            grid.dealiased_transform(&(u1 * &g[0][0] + u2 * &g[0][1])),
            grid.dealiased_transform(&(u1 * &g[1][0] + u2 * &g[1][1])),
        ])
    }

    /// Dealiased `Tr(∇u·∇u) = ∂_j u_i ∂_i u_j`.
    fn trace_square(&self, grid: &Grid) -> Spectrum {
        let g = &self.g.0;
        let tr = &g[0][0] * &g[0][0] + &(&g[0][1] * &g[1][0]) * 2.0 + &g[1][1] * &g[1][1];
        grid.dealiased_transform(&tr)
    }

    /// Dealiased `∇u·∇uᵗ + ∇u·∇u − ∇uᵗ·∇u`.
    fn bracket(&self, grid: &Grid) -> TensorField<Spectrum> {
        let g = &self.g.0;
        let entry = |i: usize, j: usize| -> Spectrum {
            let mut acc = RealField::zeros(g[0][0].dim());
            for k in 0..2 {
                // (G Gᵗ)_ij = G_ik G_jk ; (G G)_ij = G_ik G_kj ; (Gᵗ G)_ij = G_ki G_kj
                acc = acc + &g[i][k] * &g[j][k] + &g[i][k] * &g[k][j] - &g[k][i] * &g[k][j];
            }
            grid.dealiased_transform(&acc)
        };
        TensorField([[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]])
    }
}

/// Reject velocity fields whose divergence is not negligible.
pub fn check_divergence_free(grid: &Grid, u: &VectorField<Spectrum>) -> Result<()> {
    let bound = grid.divergence_bound(u);
    if bound > CONSISTENCY_TOL * grid.gradient_scale(u).max(1.0) {
        return Err(Error::NotDivergenceFree(bound));
    }
    Ok(())
}

fn check_pair(expected: &Spectrum, given: &Spectrum, what: &str) -> Result<()> {
    let (mut diff, mut scale) = (0.0, 0.0);
    for (((iy, ix), a), b) in expected.indexed_iter().zip(given.iter()) {
        if (iy, ix) == (0, 0) {
            continue;
        }
        diff += modulus(a - b);
        scale += modulus(*b);
    }
    if diff > CONSISTENCY_TOL * scale.max(1.0) {
        return Err(Error::Inconsistent(format!("{what} mismatch {diff:.3e}")));
    }
    Ok(())
}

/// `grad Δ⁻¹[Tr(∇u·∇u)]`, the pressure gradient of the Lagrangian equations
/// on the flat torus (the Ricci term vanishes). Equals the gradient part of
/// `(u·∇)u`.
pub fn pressure_gradient(grid: &Grid, u: &VectorField<Spectrum>) -> Result<VectorField<Spectrum>> {
    check_divergence_free(grid, u)?;
    let s = Samples::new(grid, u);
    Ok(grid.grad(&grid.inv_laplacian(&s.trace_square(grid))))
}

/// Dealiased self-advection `(u·∇)u`.
pub fn advection(grid: &Grid, u: &VectorField<Spectrum>) -> VectorField<Spectrum> {
    Samples::new(grid, u).advection(grid)
}

/// Euler: `∂_t u = −P[(u·∇)u]`.
pub fn euler_rhs(grid: &Grid, u: &VectorField<Spectrum>) -> Result<VectorField<Spectrum>> {
    check_divergence_free(grid, u)?;
    let adv = advection(grid, u);
    Ok(grid.leray_project(&adv).scale(-1.0))
}

/// Euler vorticity transport `−u·∇ω`.
pub fn vorticity_rhs(grid: &Grid, omega: &Spectrum, u: &VectorField<Spectrum>) -> Result<Spectrum> {
    check_pair(&grid.curl(u), omega, "curl u vs omega")?;
    Ok(transport(grid, omega, u))
}

/// Dealiased `−u·∇f`.
fn transport(grid: &Grid, f: &Spectrum, u: &VectorField<Spectrum>) -> Spectrum {
    let df = grid.grad(f);
    let u_phys = grid.to_physical_vector(u);
    let prod = &u_phys.0[0] * &grid.to_physical(&df.0[0]) + &u_phys.0[1] * &grid.to_physical(&df.0[1]);
    -grid.dealiased_transform(&prod)
}

/// `α(1 − α𝓛)⁻¹{div[∇u·∇uᵗ + ∇u·∇u − ∇uᵗ·∇u] + grad Tr(∇u·∇u)}` with
/// `𝓛 = Δ + grad div`. The inverse is taken per mode from the 2x2 symbol
/// `(1 + α|k|²)I + α kkᵗ`.
pub fn cal_u(grid: &Grid, u: &VectorField<Spectrum>, alpha: f64) -> Result<VectorField<Spectrum>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Alpha(alpha));
    }
    check_divergence_free(grid, u)?;
    let s = Samples::new(grid, u);
    Ok(cal_u_from_samples(grid, &s, alpha))
}

fn cal_u_from_samples(grid: &Grid, s: &Samples, alpha: f64) -> VectorField<Spectrum> {
    let source = grid
        .div_rows(&s.bracket(grid))
        .add_scaled(1.0, &grid.grad(&s.trace_square(grid)));
    grid.multiply_matrix(&source, |kx, ky| {
        let k2 = kx * kx + ky * ky;
        let a = 1.0 + alpha * k2;
        let c = alpha / (1.0 + 2.0 * alpha * k2);
        let f = alpha / a;
        [
            [f * (1.0 - c * kx * kx), -f * c * kx * ky],
            [-f * c * kx * ky, f * (1.0 - c * ky * ky)],
        ]
    })
}

/// Euler-α velocity form:
/// `∂_t u = P[ν(1 − αΔ)⁻¹Δu − (u·∇)u − 𝒰(u)]`.
pub fn euler_alpha_rhs(
    grid: &Grid,
    u: &VectorField<Spectrum>,
    params: &ModelParams,
) -> Result<VectorField<Spectrum>> {
    params.validate()?;
    if params.model != Model::EulerAlpha {
        return Err(Error::Setup("euler_alpha_rhs called with the Euler model".into()));
    }
    check_divergence_free(grid, u)?;
    let s = Samples::new(grid, u);
    let mut total = cal_u_from_samples(grid, &s, params.alpha).add_scaled(1.0, &s.advection(grid));
    total = total.scale(-1.0);
    if params.nu != 0.0 {
        let visc = grid.helmholtz_inv_vector(&grid.laplacian_vector(u), params.alpha)?;
        total = total.add_scaled(params.nu, &visc);
    }
    Ok(grid.leray_project(&total))
}

/// Velocity right-hand side for whichever model `params` selects.
pub fn velocity_rhs(
    grid: &Grid,
    u: &VectorField<Spectrum>,
    params: &ModelParams,
) -> Result<VectorField<Spectrum>> {
    match params.model {
        Model::Euler => euler_rhs(grid, u),
        Model::EulerAlpha => euler_alpha_rhs(grid, u, params),
    }
}

/// Potential vorticity `q = curl((1 − αΔ)u)`.
pub fn potential_vorticity(grid: &Grid, u: &VectorField<Spectrum>, alpha: f64) -> Result<Spectrum> {
    grid.helmholtz(&grid.curl(u), alpha)
}

/// Inverts `q → ω = (1 − αΔ)⁻¹q → u = ∇⊥Δ⁻¹ω`. The mean of `q` is discarded.
pub fn velocity_from_q(grid: &Grid, q: &Spectrum, alpha: f64) -> Result<VectorField<Spectrum>> {
    Ok(grid.velocity_from_vorticity(&grid.helmholtz_inv(q, alpha)?))
}

/// Potential-vorticity transport `−u·∇q + νΔω`, `ω = (1 − αΔ)⁻¹q`.
pub fn q_transport_rhs(
    grid: &Grid,
    q: &Spectrum,
    u: &VectorField<Spectrum>,
    nu: f64,
    alpha: f64,
) -> Result<Spectrum> {
    check_pair(&potential_vorticity(grid, u, alpha)?, q, "q(u) vs q")?;
    let mut rhs = transport(grid, q, u);
    if nu != 0.0 {
        let omega = grid.helmholtz_inv(q, alpha)?;
        rhs = rhs + grid.laplacian(&omega).mapv(|z| z * nu);
    }
    Ok(rhs)
}
