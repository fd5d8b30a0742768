//! Periodic grid on the torus [0, 2π)² and the Fourier-multiplier operators
//! built on it.
//!
//! Fields are stored as `Array2` indexed `[[iy, ix]]`, so the x index is the
//! fastest-varying one in memory. Spectral coefficients use the Fourier-series
//! normalization `f(x) = Σ_k f̂_k e^{ik·x}`, which makes the zero mode equal to
//! the mean of the field.
//!
//! Wavenumbers used for differentiation have the Nyquist component set to
//! zero: a real field cannot carry a derivative of the `n/2` mode, so every
//! derivative-based operator annihilates it.

mod fft;
mod interp;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use rustfft::Fft;

use crate::error::{Error, Result};

pub use fft::fft2_real;
pub use interp::{interpolate, sup_norm_refined, trig_eval, trig_eval_with_derivatives, Interpolant};

/// Samples of a real field at the grid nodes.
pub type RealField = Array2<f64>;
/// Fourier coefficients of a field.
pub type Spectrum = Array2<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A two-component field, `0` = x component, `1` = y component.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<T>(pub [T; 2]);

/// A 2x2 matrix field. Entry `[i][j]` of a velocity gradient is `∂u_i/∂x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField<T>(pub [[T; 2]; 2]);

impl<T> VectorField<T> {
    pub fn new(x: T, y: T) -> Self {
        Self([x, y])
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> VectorField<U> {
        VectorField([f(&self.0[0]), f(&self.0[1])])
    }
}

impl VectorField<Spectrum> {
    pub fn zeros(n: usize) -> Self {
        Self([Spectrum::zeros((n, n)), Spectrum::zeros((n, n))])
    }

    /// `self + a * other`
    pub fn add_scaled(&self, a: f64, other: &Self) -> Self {
        VectorField([
            &self.0[0] + &other.0[0].mapv(|c| c * a),
            &self.0[1] + &other.0[1].mapv(|c| c * a),
        ])
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|c| c.mapv(|z| z * a))
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }
}

/// Regularity index of a Sobolev space H^s in the well-posedness class s > 2.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct SobolevIndex(f64);

impl SobolevIndex {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s > 2.0 {
            Ok(Self(s))
        } else {
            Err(Error::SobolevIndex { got: s, bound: "finite and > 2" })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Uniform periodic `n x n` grid on [0, 2π)², with FFT plans and wavenumber
/// tables. Cheap to clone; plans are shared.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    /// Centered integer wavenumber for each array index.
    k: Vec<f64>,
    /// Wavenumber used for differentiation (Nyquist set to zero).
    kd: Vec<f64>,
    /// 2/3-rule retention mask per array index.
    keep: Vec<bool>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n", &self.n).finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::GridSize(n));
        }
        let k: Vec<f64> = (0..n).map(|i| centered_wavenumber(i, n) as f64).collect();
        let kd = k
            .iter()
            .map(|&k| if k.abs() as usize == n / 2 { 0.0 } else { k })
            .collect();
        let cutoff = (n - 1) / 3;
        let keep = k.iter().map(|&k| k.abs() as usize <= cutoff).collect();
        let (fwd, inv) = fft::plans(n);
        Ok(Self { n, k, kd, keep, fwd, inv })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Node spacing 2π/n.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Coordinate of node index `i` along either axis.
    pub fn node(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.n as f64
    }

    /// Centered wavenumber of array index `i`, in `[-n/2, n/2)`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        centered_wavenumber(i, self.n)
    }

    /// Largest |k| component kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> usize {
        (self.n - 1) / 3
    }

    /// Sample a function at the grid nodes.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> RealField {
        Array2::from_shape_fn((self.n, self.n), |(iy, ix)| f(self.node(ix), self.node(iy)))
    }

    fn check_shape<T>(&self, a: &Array2<T>) -> Result<()> {
        if a.dim() != (self.n, self.n) {
            return Err(Error::Shape { got: a.dim(), expected: self.n });
        }
        Ok(())
    }

    /// Physical → spectral. Rejects mis-shaped and non-finite input.
    pub fn forward(&self, f: &RealField) -> Result<Spectrum> {
        self.check_shape(f)?;
        if let Some(((iy, ix), _)) = f.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteSample { iy, ix });
        }
        Ok(self.to_spectral(f))
    }

    /// Spectral → physical (real part).
    pub fn inverse(&self, f: &Spectrum) -> Result<RealField> {
        self.check_shape(f)?;
        Ok(self.to_physical(f))
    }

    pub fn forward_vector(&self, v: &VectorField<RealField>) -> Result<VectorField<Spectrum>> {
        Ok(VectorField([self.forward(&v.0[0])?, self.forward(&v.0[1])?]))
    }

    pub fn inverse_vector(&self, v: &VectorField<Spectrum>) -> Result<VectorField<RealField>> {
        Ok(VectorField([self.inverse(&v.0[0])?, self.inverse(&v.0[1])?]))
    }

    pub(crate) fn to_spectral(&self, f: &RealField) -> Spectrum {
        let mut data = f.mapv(|v| Complex64::new(v, 0.0));
        fft::fft2(&mut data, &self.fwd);
        let scale = 1.0 / (self.n * self.n) as f64;
        data.mapv_inplace(|z| z * scale);
        data
    }

    pub(crate) fn to_physical(&self, f: &Spectrum) -> RealField {
        let mut data = f.clone();
        fft::fft2(&mut data, &self.inv);
        data.mapv(|z| z.re)
    }

    pub(crate) fn to_physical_vector(&self, v: &VectorField<Spectrum>) -> VectorField<RealField> {
        v.map(|c| self.to_physical(c))
    }

    /// Apply a per-mode multiplier `m(kx, ky)` built from differentiation
    /// wavenumbers.
    fn multiply(&self, f: &Spectrum, m: impl Fn(f64, f64) -> Complex64) -> Spectrum {
        let mut out = f.clone();
        for ((iy, ix), z) in out.indexed_iter_mut() {
            *z *= m(self.kd[ix], self.kd[iy]);
        }
        out
    }

    /// Spectral derivative along axis `j` (0 = x, 1 = y).
    pub fn derivative(&self, f: &Spectrum, j: usize) -> Spectrum {
        match j {
            0 => self.multiply(f, |kx, _| I * kx),
            _ => self.multiply(f, |_, ky| I * ky),
        }
    }

    pub fn grad(&self, f: &Spectrum) -> VectorField<Spectrum> {
        VectorField([self.derivative(f, 0), self.derivative(f, 1)])
    }

    pub fn div(&self, v: &VectorField<Spectrum>) -> Spectrum {
        self.derivative(&v.0[0], 0) + self.derivative(&v.0[1], 1)
    }

    /// Scalar curl `∂₁v₂ − ∂₂v₁`.
    pub fn curl(&self, v: &VectorField<Spectrum>) -> Spectrum {
        self.derivative(&v.0[1], 0) - self.derivative(&v.0[0], 1)
    }

    /// `∇⊥f = (−∂₂f, ∂₁f)`.
    pub fn perp_grad(&self, f: &Spectrum) -> VectorField<Spectrum> {
        VectorField([-self.derivative(f, 1), self.derivative(f, 0)])
    }

    pub fn laplacian(&self, f: &Spectrum) -> Spectrum {
        self.multiply(f, |kx, ky| Complex64::from(-(kx * kx + ky * ky)))
    }

    pub fn laplacian_vector(&self, v: &VectorField<Spectrum>) -> VectorField<Spectrum> {
        v.map(|c| self.laplacian(c))
    }

    /// Zero-mean inverse Laplacian. Modes with vanishing symbol are set to 0.
    pub fn inv_laplacian(&self, f: &Spectrum) -> Spectrum {
        self.multiply(f, |kx, ky| {
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                Complex64::from(0.0)
            } else {
                Complex64::from(-1.0 / k2)
            }
        })
    }

    /// `(1 − αΔ)f`.
    pub fn helmholtz(&self, f: &Spectrum, alpha: f64) -> Result<Spectrum> {
        check_alpha(alpha)?;
        Ok(self.multiply(f, |kx, ky| Complex64::from(1.0 + alpha * (kx * kx + ky * ky))))
    }

    /// `(1 − αΔ)⁻¹f`.
    pub fn helmholtz_inv(&self, f: &Spectrum, alpha: f64) -> Result<Spectrum> {
        check_alpha(alpha)?;
        Ok(self.multiply(f, |kx, ky| Complex64::from(1.0 / (1.0 + alpha * (kx * kx + ky * ky)))))
    }

    pub fn helmholtz_vector(&self, v: &VectorField<Spectrum>, alpha: f64) -> Result<VectorField<Spectrum>> {
        Ok(VectorField([self.helmholtz(&v.0[0], alpha)?, self.helmholtz(&v.0[1], alpha)?]))
    }

    pub fn helmholtz_inv_vector(
        &self,
        v: &VectorField<Spectrum>,
        alpha: f64,
    ) -> Result<VectorField<Spectrum>> {
        Ok(VectorField([self.helmholtz_inv(&v.0[0], alpha)?, self.helmholtz_inv(&v.0[1], alpha)?]))
    }

    /// Per-mode 2x2 multiplier applied to a vector field.
    pub(crate) fn multiply_matrix(
        &self,
        v: &VectorField<Spectrum>,
        m: impl Fn(f64, f64) -> [[f64; 2]; 2],
    ) -> VectorField<Spectrum> {
        let mut out = v.clone();
        let [ox, oy] = &mut out.0;
        Zip::indexed(ox).and(oy).for_each(|(iy, ix), a, b| {
            let mm = m(self.kd[ix], self.kd[iy]);
            let (va, vb) = (*a, *b);
            *a = va * mm[0][0] + vb * mm[0][1];
            *b = va * mm[1][0] + vb * mm[1][1];
        });
        out
    }

    /// Leray projection `(I − kkᵗ/|k|²)v̂` onto divergence-free fields.
    pub fn leray_project(&self, v: &VectorField<Spectrum>) -> VectorField<Spectrum> {
        self.multiply_matrix(v, |kx, ky| {
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                [[1.0, 0.0], [0.0, 1.0]]
            } else {
                [[1.0 - kx * kx / k2, -kx * ky / k2], [-kx * ky / k2, 1.0 - ky * ky / k2]]
            }
        })
    }

    /// `u = ∇⊥Δ⁻¹ω`. The mean of ω is discarded.
    pub fn velocity_from_vorticity(&self, omega: &Spectrum) -> VectorField<Spectrum> {
        self.perp_grad(&self.inv_laplacian(omega))
    }

    /// Velocity gradient with entries `[i][j] = ∂u_i/∂x_j`.
    pub fn gradient_tensor(&self, u: &VectorField<Spectrum>) -> TensorField<Spectrum> {
        TensorField([
            [self.derivative(&u.0[0], 0), self.derivative(&u.0[0], 1)],
            [self.derivative(&u.0[1], 0), self.derivative(&u.0[1], 1)],
        ])
    }

    /// Row-wise divergence `(div M)_i = ∂_j M_ij`.
    pub fn div_rows(&self, m: &TensorField<Spectrum>) -> VectorField<Spectrum> {
        VectorField([
            self.derivative(&m.0[0][0], 0) + self.derivative(&m.0[0][1], 1),
            self.derivative(&m.0[1][0], 0) + self.derivative(&m.0[1][1], 1),
        ])
    }

    /// Zero every mode outside the 2/3-rule band.
    pub fn dealias(&self, f: &mut Spectrum) {
        for ((iy, ix), z) in f.indexed_iter_mut() {
            if !(self.keep[ix] && self.keep[iy]) {
                *z = Complex64::from(0.0);
            }
        }
    }

    pub fn dealias_vector(&self, v: &mut VectorField<Spectrum>) {
        for c in v.0.iter_mut() {
            self.dealias(c);
        }
    }

    /// True when no coefficient outside the 2/3 band exceeds `tol`.
    pub fn is_dealiased(&self, f: &Spectrum, tol: f64) -> bool {
        f.indexed_iter()
            .all(|((iy, ix), z)| (self.keep[ix] && self.keep[iy]) || z.norm() <= tol)
    }

    /// Spectrum of a pointwise product of physical samples, truncated by the
    /// 2/3 rule. Exact on the kept band when both factors are band-limited.
    pub fn dealiased_transform(&self, f: &RealField) -> Spectrum {
        let mut s = self.to_spectral(f);
        self.dealias(&mut s);
        s
    }

    /// Mean value (zero mode).
    pub fn mean(&self, f: &Spectrum) -> f64 {
        f[[0, 0]].re
    }

    /// `∫ f g dx` over the torus via Parseval.
    pub fn inner(&self, f: &Spectrum, g: &Spectrum) -> f64 {
        let s: f64 = Zip::from(f).and(g).fold(0.0, |acc, a, b| acc + (a * b.conj()).re);
        4.0 * PI * PI * s
    }

    pub fn inner_vector(&self, u: &VectorField<Spectrum>, v: &VectorField<Spectrum>) -> f64 {
        self.inner(&u.0[0], &v.0[0]) + self.inner(&u.0[1], &v.0[1])
    }

    /// `(∫|f|²)^{1/2}` summed over the given components.
    pub fn l2_norm(&self, components: &[&Spectrum]) -> f64 {
        let s: f64 = components.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>()).sum();
        2.0 * PI * s.sqrt()
    }

    /// H^s norm `2π (Σ_k (1+|k|²)^s |f̂_k|²)^{1/2}` summed over components.
    /// For `s = 0` this is the L² norm over the torus.
    pub fn sobolev_norm(&self, components: &[&Spectrum], s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::SobolevIndex { got: s, bound: "non-negative" });
        }
        Ok(sobolev_sum(&self.k, components, s))
    }

    /// Sum over modes of `|k·v̂_k|`, an upper bound for `max |div v|`.
    pub(crate) fn divergence_bound(&self, v: &VectorField<Spectrum>) -> f64 {
        let mut acc = 0.0;
        Zip::indexed(&v.0[0]).and(&v.0[1]).for_each(|(iy, ix), a, b| {
            acc += modulus(a * self.kd[ix] + b * self.kd[iy]);
        });
        acc
    }

    /// Sum over modes of `|k||v̂_k|`, the scale against which
    /// [`Self::divergence_bound`] is judged.
    pub(crate) fn gradient_scale(&self, v: &VectorField<Spectrum>) -> f64 {
        let mut acc = 0.0;
        Zip::indexed(&v.0[0]).and(&v.0[1]).for_each(|(iy, ix), a, b| {
            let k = (self.kd[ix] * self.kd[ix] + self.kd[iy] * self.kd[iy]).sqrt();
            acc += k * (modulus(*a) + modulus(*b));
        });
        acc
    }

    pub(crate) fn wavenumbers(&self) -> &[f64] {
        &self.k
    }
}

/// `|z|` without the overflow-safe (and much slower) `hypot`.
pub(crate) fn modulus(z: Complex64) -> f64 {
    z.norm_sqr().sqrt()
}

/// Shared H^s sum; `k` is the centered wavenumber table of the lattice.
pub(crate) fn sobolev_sum(k: &[f64], components: &[&Spectrum], s: f64) -> f64 {
    let mut acc = 0.0;
    for c in components {
        for ((iy, ix), z) in c.indexed_iter() {
            let k2 = k[ix] * k[ix] + k[iy] * k[iy];
            acc += (1.0 + k2).powf(s) * z.norm_sqr();
        }
    }
    2.0 * PI * acc.sqrt()
}

pub(crate) fn centered_wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Alpha(alpha))
    }
}

/// Max |value| over all samples.
pub fn max_abs(f: &RealField) -> f64 {
    f.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn spec(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Spectrum {
        grid.forward(&grid.sample(f)).unwrap()
    }

    fn max_diff(a: &RealField, b: &RealField) -> f64 {
        Zip::from(a).and(b).fold(0.0_f64, |m, x, y| m.max((x - y).abs()))
    }

    #[test]
    fn grid_rejects_odd_and_small() {
        assert!(matches!(Grid::new(63), Err(Error::GridSize(63))));
        assert!(matches!(Grid::new(6), Err(Error::GridSize(6))));
        assert!(Grid::new(8).is_ok());
    }

    #[test]
    fn forward_rejects_non_finite() {
        let grid = Grid::new(8).unwrap();
        let mut f = RealField::zeros((8, 8));
        f[[2, 3]] = f64::NAN;
        assert!(matches!(grid.forward(&f), Err(Error::NonFiniteSample { iy: 2, ix: 3 })));
    }

    #[test]
    fn constant_has_only_zero_mode() {
        let grid = Grid::new(16).unwrap();
        let c = spec(&grid, |_, _| 3.5);
        for ((iy, ix), z) in c.indexed_iter() {
            if (iy, ix) == (0, 0) {
                assert!(close(z.re, 3.5, 1e-14) && z.im.abs() < 1e-14);
            } else {
                assert!(z.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn sine_has_two_modes() {
        let grid = Grid::new(16).unwrap();
        let c = spec(&grid, |x, _| x.sin());
        let nonzero: Vec<_> = c
            .indexed_iter()
            .filter(|(_, z)| z.norm() > 1e-12)
            .map(|((iy, ix), z)| ((grid.wavenumber(ix), grid.wavenumber(iy)), *z))
            .collect();
        assert_eq!(nonzero.len(), 2);
        for ((kx, ky), z) in nonzero {
            assert_eq!(ky, 0);
            assert_eq!(kx.abs(), 1);
            // sin x = (e^{ix} − e^{−ix}) / 2i
            assert!(close(z.im, -0.5 * kx as f64, 1e-14));
        }
    }

    #[test]
    fn grad_of_constant_vanishes() {
        let grid = Grid::new(16).unwrap();
        let g = grid.grad(&spec(&grid, |_, _| 2.0));
        assert!(g.0.iter().all(|c| c.iter().all(|z| z.norm() == 0.0)));
    }

    #[test]
    fn curl_of_grad_vanishes() {
        let grid = Grid::new(32).unwrap();
        let f = spec(&grid, |x, y| x.sin() * (2.0 * y).cos());
        let c = grid.to_physical(&grid.curl(&grid.grad(&f)));
        assert!(max_abs(&c) < 1e-13);
    }

    #[test]
    fn inverse_laplacian_eigenfunctions() {
        let grid = Grid::new(32).unwrap();
        let out = grid.to_physical(&grid.inv_laplacian(&spec(&grid, |x, y| x.sin() + (2.0 * y).cos())));
        let expected = grid.sample(|x, y| -x.sin() - (2.0 * y).cos() / 4.0);
        assert!(max_diff(&out, &expected) < 1e-13);
        let zero = grid.inv_laplacian(&spec(&grid, |_, _| 7.0));
        assert!(zero.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn helmholtz_inverse_examples() {
        let grid = Grid::new(16).unwrap();
        let out = grid.to_physical(&grid.helmholtz_inv(&spec(&grid, |x, _| x.sin()), 1.0).unwrap());
        assert!(max_diff(&out, &grid.sample(|x, _| x.sin() / 2.0)) < 1e-14);
        let c = grid.to_physical(&grid.helmholtz_inv(&spec(&grid, |_, _| 1.25), 0.3).unwrap());
        assert!(max_diff(&c, &grid.sample(|_, _| 1.25)) < 1e-14);
        assert!(matches!(grid.helmholtz_inv(&c.mapv(Complex64::from), 0.0), Err(Error::Alpha(_))));
        assert!(matches!(grid.helmholtz_inv(&Spectrum::zeros((16, 16)), -1.0), Err(Error::Alpha(_))));
    }

    #[test]
    fn leray_examples() {
        let grid = Grid::new(16).unwrap();
        let g = grid.grad(&spec(&grid, |x, _| x.cos()));
        let p = grid.leray_project(&g);
        assert!(p.0.iter().all(|c| c.iter().all(|z| z.norm() < 1e-15)));

        let shear = VectorField([spec(&grid, |_, y| y.sin()), Spectrum::zeros((16, 16))]);
        let p = grid.leray_project(&shear);
        assert_eq!(p, shear);
    }

    #[test]
    fn velocity_from_vorticity_examples() {
        let grid = Grid::new(32).unwrap();
        let u = grid.to_physical_vector(&grid.velocity_from_vorticity(&spec(&grid, |x, _| x.sin())));
        assert!(max_abs(&u.0[0]) < 1e-14);
        assert!(max_diff(&u.0[1], &grid.sample(|x, _| -x.cos())) < 1e-14);

        let tg = grid.to_physical_vector(
            &grid.velocity_from_vorticity(&spec(&grid, |x, y| 2.0 * x.sin() * y.sin())),
        );
        assert!(max_diff(&tg.0[0], &grid.sample(|x, y| x.sin() * y.cos())) < 1e-14);
        assert!(max_diff(&tg.0[1], &grid.sample(|x, y| -x.cos() * y.sin())) < 1e-14);

        let zero = grid.velocity_from_vorticity(&Spectrum::zeros((32, 32)));
        assert_eq!(zero, VectorField::zeros(32));
    }

    #[test]
    fn sobolev_norm_single_mode_and_constant() {
        let grid = Grid::new(16).unwrap();
        let sin = spec(&grid, |x, _| x.sin());
        for s in [0.0, 1.0, 2.5, 4.0] {
            let expected = 2f64.powf(s / 2.0) * PI * 2f64.sqrt();
            assert!(close(grid.sobolev_norm(&[&sin], s).unwrap(), expected, 1e-12 * expected));
        }
        let c = spec(&grid, |_, _| 0.75);
        assert!(close(grid.sobolev_norm(&[&c], 3.0).unwrap(), 2.0 * PI * 0.75, 1e-13));
        assert!(grid.sobolev_norm(&[&c], -0.5).is_err());
    }

    #[test]
    fn sobolev_index_requires_above_two() {
        assert!(SobolevIndex::new(2.0).is_err());
        assert!(SobolevIndex::new(f64::NAN).is_err());
        assert_eq!(SobolevIndex::new(2.5).unwrap().value(), 2.5);
    }

    #[test]
    fn dealias_cutoff_follows_two_thirds_rule() {
        assert_eq!(Grid::new(64).unwrap().dealias_cutoff(), 21);
        assert_eq!(Grid::new(8).unwrap().dealias_cutoff(), 2);
    }
}
