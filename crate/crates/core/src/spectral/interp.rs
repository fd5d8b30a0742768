//! Off-grid evaluation of periodic fields.
//!
//! The production path is a periodic bicubic spline: the interpolating cubic
//! B-spline in each direction, with coefficients obtained by dividing the
//! Fourier coefficients by the B-spline symbol `(2 + cos kh)/3`. It is C²,
//! reproduces node values, and is fourth-order accurate. Exact trigonometric
//! evaluation is kept as a slow oracle and for refining extrema.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Grid, RealField, Spectrum, VectorField};
use crate::error::{Error, Result};

/// Spline coefficients for one or more scalar components on a common grid.
#[derive(Clone, Debug)]
pub struct Interpolant {
    n: usize,
    inv_h: f64,
    coeffs: Vec<RealField>,
}

impl Interpolant {
    /// Build from spectral components (no FFT of the data needed).
    pub fn from_spectra(grid: &Grid, components: &[&Spectrum]) -> Self {
        let n = grid.n();
        let symbol: Vec<f64> = (0..n)
            .map(|i| {
                let theta = 2.0 * PI * grid.wavenumber(i) as f64 / n as f64;
                (2.0 + theta.cos()) / 3.0
            })
            .collect();
        let coeffs = components
            .iter()
            .map(|c| {
                let mut filtered = (*c).clone();
                for ((iy, ix), z) in filtered.indexed_iter_mut() {
                    *z /= symbol[ix] * symbol[iy];
                }
                grid.to_physical(&filtered)
            })
            .collect();
        Self { n, inv_h: n as f64 / (2.0 * PI), coeffs }
    }

    pub fn from_physical(grid: &Grid, components: &[&RealField]) -> Result<Self> {
        let spectra = components
            .iter()
            .map(|c| grid.forward(c))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&Spectrum> = spectra.iter().collect();
        Ok(Self::from_spectra(grid, &refs))
    }

    pub fn components(&self) -> usize {
        self.coeffs.len()
    }

    /// Evaluate every component at `p` (wrapped periodically) into `out`.
    pub fn eval_into(&self, p: [f64; 2], out: &mut [f64]) {
        let (ix, wx) = self.stencil(p[0]);
        let (iy, wy) = self.stencil(p[1]);
        let n = self.n;
        for (c, o) in self.coeffs.iter().zip(out.iter_mut()) {
            let mut acc = 0.0;
            for (a, w_y) in wy.iter().enumerate() {
                let row = (iy + a) % n;
                let mut r = 0.0;
                for (b, w_x) in wx.iter().enumerate() {
                    r += w_x * c[[row, (ix + b) % n]];
                }
                acc += w_y * r;
            }
            *o = acc;
        }
    }

    pub fn eval(&self, p: [f64; 2]) -> Vec<f64> {
        let mut out = vec![0.0; self.coeffs.len()];
        self.eval_into(p, &mut out);
        out
    }

    /// First stencil index (already shifted by −1 and wrapped) and the four
    /// cubic B-spline weights.
    fn stencil(&self, x: f64) -> (usize, [f64; 4]) {
        let s = x * self.inv_h;
        let fl = s.floor();
        let t = s - fl;
        let n = self.n as i64;
        let i0 = ((fl as i64 - 1).rem_euclid(n)) as usize;
        let u = 1.0 - t;
        let t2 = t * t;
        let t3 = t2 * t;
        let w = [
            u * u * u / 6.0,
            (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0,
            (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0,
            t3 / 6.0,
        ];
        (i0, w)
    }
}

/// Interpolate a physical vector field at arbitrary points.
pub fn interpolate(
    grid: &Grid,
    field: &VectorField<RealField>,
    points: &[[f64; 2]],
) -> Result<Vec<[f64; 2]>> {
    if let Some(p) = points.iter().find(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err(Error::NonFinitePoint(p[0], p[1]));
    }
    let interp = Interpolant::from_physical(grid, &[&field.0[0], &field.0[1]])?;
    let mut buf = [0.0; 2];
    Ok(points
        .iter()
        .map(|&p| {
            interp.eval_into(p, &mut buf);
            buf
        })
        .collect())
}

/// Exact evaluation of the trigonometric interpolant at `p`. O(n²) per point.
pub fn trig_eval(grid: &Grid, f: &Spectrum, p: [f64; 2]) -> f64 {
    trig_eval_with_derivatives(grid, f, p)[0]
}

/// Trigonometric interpolant and its derivatives at `p`:
/// `[f, f_x, f_y, f_xx, f_xy, f_yy]`.
pub fn trig_eval_with_derivatives(grid: &Grid, f: &Spectrum, p: [f64; 2]) -> [f64; 6] {
    let k = grid.wavenumbers();
    let ex: Vec<Complex64> = k.iter().map(|&kx| Complex64::from_polar(1.0, kx * p[0])).collect();
    let ey: Vec<Complex64> = k.iter().map(|&ky| Complex64::from_polar(1.0, ky * p[1])).collect();
    let mut out = [0.0; 6];
    for ((iy, ix), c) in f.indexed_iter() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let (kx, ky) = (k[ix], k[iy]);
        let v = c * ex[ix] * ey[iy];
        // d/dx e^{ikx} = ik e^{ikx}; Re(i v) = −Im v
        out[0] += v.re;
        out[1] -= kx * v.im;
        out[2] -= ky * v.im;
        out[3] -= kx * kx * v.re;
        out[4] -= kx * ky * v.re;
        out[5] -= ky * ky * v.re;
    }
    out
}

/// `max |f|` of the band-limited interpolant of `f`: the grid maximum,
/// refined by Newton iteration on the trigonometric interpolant from the
/// strongest local extrema on the grid.
pub fn sup_norm_refined(grid: &Grid, f: &Spectrum) -> f64 {
    const CANDIDATES: usize = 6;
    let phys = grid.to_physical(f);
    let n = grid.n();
    let mut extrema: Vec<(f64, usize, usize)> = Vec::new();
    for ((iy, ix), &v) in phys.indexed_iter() {
        let a = v.abs();
        let is_peak = (0..3).all(|dy| {
            (0..3).all(|dx| {
                let (jy, jx) = ((iy + n + dy - 1) % n, (ix + n + dx - 1) % n);
                (jy, jx) == (iy, ix) || phys[[jy, jx]].abs() <= a
            })
        });
        if is_peak {
            extrema.push((a, iy, ix));
        }
    }
    extrema.sort_by(|a, b| b.0.total_cmp(&a.0));
    let grid_max = extrema.first().map_or(0.0, |e| e.0);
    let h = grid.spacing();
    extrema
        .iter()
        .take(CANDIDATES)
        .map(|&(a, iy, ix)| newton_extremum(grid, f, [grid.node(ix), grid.node(iy)], h).max(a))
        .fold(grid_max, f64::max)
}

fn newton_extremum(grid: &Grid, f: &Spectrum, start: [f64; 2], h: f64) -> f64 {
    let mut p = start;
    let mut best = trig_eval(grid, f, p).abs();
    for _ in 0..20 {
        let [_, fx, fy, fxx, fxy, fyy] = trig_eval_with_derivatives(grid, f, p);
        let det = fxx * fyy - fxy * fxy;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = -(fyy * fx - fxy * fy) / det;
        let dy = -(fxx * fy - fxy * fx) / det;
        if !(dx.hypot(dy) < h) {
            break;
        }
        p = [p[0] + dx, p[1] + dy];
        if (p[0] - start[0]).hypot(p[1] - start[1]) > 2.0 * h {
            break;
        }
        best = best.max(trig_eval(grid, f, p).abs());
        if dx.hypot(dy) < 1e-13 {
            break;
        }
    }
    best
}
