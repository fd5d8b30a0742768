//! Lagrangian flow map η on a particle lattice, with its tangent map Tη and
//! inverse tangent map Tη⁻¹:
//!
//! ```text
//! dη/dt    = u(t, η)
//! dT/dt    = ∇u(t, η) · T
//! dTinv/dt = −Tinv · ∇u(t, η)
//! ```
//!
//! `Tinv` is integrated on its own rather than inverted from `T`, so the
//! product `T·Tinv` is an independent consistency check. Positions are kept
//! unwrapped (on the universal cover); wrapping happens only when a field is
//! evaluated.

use std::f64::consts::PI;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::spectral::{fft2_real, sobolev_sum, Grid, Interpolant, Spectrum, VectorField};

pub type Mat2 = [[f64; 2]; 2];

const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

fn mat_axpy(y: &Mat2, a: f64, x: &Mat2) -> Mat2 {
    [
        [y[0][0] + a * x[0][0], y[0][1] + a * x[0][1]],
        [y[1][0] + a * x[1][0], y[1][1] + a * x[1][1]],
    ]
}

/// Particle positions and tangent data on an `m x m` lattice, particle
/// `j*m + i` starting at `(2πi/m, 2πj/m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowMap {
    m: usize,
    pub t: f64,
    pub positions: Vec<[f64; 2]>,
    pub tangent: Vec<Mat2>,
    pub inverse_tangent: Vec<Mat2>,
}

/// Time derivatives, or step increments, of every particle quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowRates {
    pub positions: Vec<[f64; 2]>,
    pub tangent: Vec<Mat2>,
    pub inverse_tangent: Vec<Mat2>,
}

/// Interpolant of `u` and `∇u` at one instant, ready for particle queries.
#[derive(Clone, Debug)]
pub struct FlowField {
    interp: Interpolant,
}

impl FlowField {
    /// `∇u` is taken spectrally from `u`.
    pub fn new(grid: &Grid, u: &VectorField<Spectrum>) -> Self {
        let g = grid.gradient_tensor(u);
        let interp = Interpolant::from_spectra(
            grid,
            &[&u.0[0], &u.0[1], &g.0[0][0], &g.0[0][1], &g.0[1][0], &g.0[1][1]],
        );
        Self { interp }
    }

    /// Velocity and velocity gradient at `p`.
    pub fn sample(&self, p: [f64; 2]) -> ([f64; 2], Mat2) {
        let mut v = [0.0; 6];
        self.interp.eval_into(p, &mut v);
        ([v[0], v[1]], [[v[2], v[3]], [v[4], v[5]]])
    }
}

impl FlowMap {
    /// Identity configuration at `t = 0`.
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::LatticeSize(m));
        }
        let h = 2.0 * PI / m as f64;
        let positions = (0..m * m)
            .map(|p| [(p % m) as f64 * h, (p / m) as f64 * h])
            .collect();
        Ok(Self {
            m,
            t: 0.0,
            positions,
            tangent: vec![IDENTITY; m * m],
            inverse_tangent: vec![IDENTITY; m * m],
        })
    }

    /// Reassemble a flow map from stored parts (e.g. a snapshot).
    pub fn from_parts(
        m: usize,
        t: f64,
        positions: Vec<[f64; 2]>,
        tangent: Vec<Mat2>,
        inverse_tangent: Vec<Mat2>,
    ) -> Result<Self> {
        if m < 2 {
            return Err(Error::LatticeSize(m));
        }
        let n = m * m;
        if positions.len() != n || tangent.len() != n || inverse_tangent.len() != n {
            return Err(Error::Setup(format!("flow map parts must hold {n} particles")));
        }
        Ok(Self { m, t, positions, tangent, inverse_tangent })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Initial (lattice) position of particle `p`.
    pub fn label(&self, p: usize) -> [f64; 2] {
        let h = 2.0 * PI / self.m as f64;
        [(p % self.m) as f64 * h, (p / self.m) as f64 * h]
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        for p in 0..self.len() {
            let ok = self.positions[p].iter().all(|v| v.is_finite())
                && self.tangent[p].iter().flatten().all(|v| v.is_finite())
                && self.inverse_tangent[p].iter().flatten().all(|v| v.is_finite());
            if !ok {
                return Err(Error::NonFiniteParticle(p));
            }
        }
        Ok(())
    }

    /// Right-hand side of the particle system for the field `field`.
    pub fn rates(&self, field: &FlowField) -> Result<FlowRates> {
        if let Some(p) = self.positions.iter().position(|x| !(x[0].is_finite() && x[1].is_finite())) {
            return Err(Error::NonFiniteParticle(p));
        }
        let n = self.len();
        let mut out = FlowRates {
            positions: Vec::with_capacity(n),
            tangent: Vec::with_capacity(n),
            inverse_tangent: Vec::with_capacity(n),
        };
        for p in 0..n {
            let (v, g) = field.sample(self.positions[p]);
            out.positions.push(v);
            out.tangent.push(mat_mul(&g, &self.tangent[p]));
            out.inverse_tangent.push(mat_mul(&self.inverse_tangent[p], &g).map(|r| r.map(|x| -x)));
        }
        Ok(out)
    }

    /// One classical RK4 step. `stages` holds the fields at `t`, `t + dt/2`
    /// (twice: the second and third Runge-Kutta stage values) and `t + dt`.
    pub fn step(&self, stages: &[FlowField], dt: f64) -> Result<FlowMap> {
        let incr = self.increments(stages, dt)?;
        let mut next = self.clone();
        for p in 0..self.len() {
            next.positions[p] = [self.positions[p][0] + incr.positions[p][0], self.positions[p][1] + incr.positions[p][1]];
            next.tangent[p] = mat_axpy(&self.tangent[p], 1.0, &incr.tangent[p]);
            next.inverse_tangent[p] = mat_axpy(&self.inverse_tangent[p], 1.0, &incr.inverse_tangent[p]);
        }
        next.t = self.t + dt;
        next.check_finite()?;
        Ok(next)
    }

    /// The RK4 increments of one step (new value minus old value), for
    /// callers that accumulate the state themselves.
    pub fn increments(&self, stages: &[FlowField], dt: f64) -> Result<FlowRates> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::TimeStep(dt));
        }
        if stages.len() != 4 {
            return Err(Error::Stages { expected: 4, got: stages.len() });
        }
        self.check_finite()?;
        let n = self.len();
        let mut out = FlowRates {
            positions: Vec::with_capacity(n),
            tangent: Vec::with_capacity(n),
            inverse_tangent: Vec::with_capacity(n),
        };
        for p in 0..n {
            let (x, t, ti) = particle_increment(
                self.positions[p],
                &self.tangent[p],
                &self.inverse_tangent[p],
                stages,
                dt,
            );
            out.positions.push(x);
            out.tangent.push(t);
            out.inverse_tangent.push(ti);
        }
        Ok(out)
    }

    /// `max_p |det T_p − 1|`.
    pub fn volume_defect(&self) -> f64 {
        self.tangent
            .iter()
            .map(|t| (t[0][0] * t[1][1] - t[0][1] * t[1][0] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `max_p ‖T_p·Tinv_p − I‖_∞` (largest entry in absolute value).
    pub fn inverse_defect(&self) -> f64 {
        self.tangent
            .iter()
            .zip(&self.inverse_tangent)
            .map(|(t, ti)| {
                let prod = mat_mul(t, ti);
                (0..2)
                    .flat_map(|i| (0..2).map(move |j| (i, j)))
                    .map(|(i, j)| (prod[i][j] - IDENTITY[i][j]).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Lattice proxy for `‖Tη‖_{H^{s−1}}`: the four entries of `T` are treated
    /// as periodic samples over the particle labels and measured with the
    /// same Parseval-normalized Sobolev norm as grid fields.
    pub fn tangent_monitor(&self, s: f64) -> f64 {
        let m = self.m;
        let k: Vec<f64> = (0..m)
            .map(|i| if i < m / 2 { i as f64 } else { i as f64 - m as f64 })
            .collect();
        let spectra: Vec<Spectrum> = (0..4)
            .map(|e| {
                let samples = Array2::from_shape_fn((m, m), |(j, i)| self.tangent[j * m + i][e / 2][e % 2]);
                fft2_real(&samples)
            })
            .collect();
        let refs: Vec<&Spectrum> = spectra.iter().collect();
        sobolev_sum(&k, &refs, s - 1.0)
    }
}

fn particle_increment(
    x0: [f64; 2],
    t0: &Mat2,
    ti0: &Mat2,
    stages: &[FlowField],
    dt: f64,
) -> ([f64; 2], Mat2, Mat2) {
    let rate = |field: &FlowField, x: [f64; 2], t: &Mat2, ti: &Mat2| {
        let (v, g) = field.sample(x);
        let dti = mat_mul(ti, &g);
        (v, mat_mul(&g, t), dti.map(|r| r.map(|z| -z)))
    };
    let shift = |x: [f64; 2], a: f64, v: [f64; 2]| [x[0] + a * v[0], x[1] + a * v[1]];

    let k1 = rate(&stages[0], x0, t0, ti0);
    let h = 0.5 * dt;
    let k2 = rate(&stages[1], shift(x0, h, k1.0), &mat_axpy(t0, h, &k1.1), &mat_axpy(ti0, h, &k1.2));
    let k3 = rate(&stages[2], shift(x0, h, k2.0), &mat_axpy(t0, h, &k2.1), &mat_axpy(ti0, h, &k2.2));
    let k4 = rate(&stages[3], shift(x0, dt, k3.0), &mat_axpy(t0, dt, &k3.1), &mat_axpy(ti0, dt, &k3.2));

    let w = dt / 6.0;
    let mut dx = [0.0; 2];
    let mut dtan = [[0.0; 2]; 2];
    let mut dti = [[0.0; 2]; 2];
    for (a, k) in [(w, &k1), (2.0 * w, &k2), (2.0 * w, &k3), (w, &k4)] {
        dx = shift(dx, a, k.0);
        dtan = mat_axpy(&dtan, a, &k.1);
        dti = mat_axpy(&dti, a, &k.2);
    }
    (dx, dtan, dti)
}

/// Periodic distance on the torus between two unwrapped points.
pub fn torus_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let wrap = |d: f64| {
        let r = d.rem_euclid(2.0 * PI);
        r.min(2.0 * PI - r)
    };
    wrap(a[0] - b[0]).hypot(wrap(a[1] - b[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(grid: &Grid, fx: impl Fn(f64, f64) -> f64, fy: impl Fn(f64, f64) -> f64) -> VectorField<Spectrum> {
        VectorField([grid.forward(&grid.sample(fx)).unwrap(), grid.forward(&grid.sample(fy)).unwrap()])
    }

    #[test]
    fn identity_initialization() {
        let fm = FlowMap::new(4).unwrap();
        assert_eq!(fm.len(), 16);
        assert_eq!(fm.positions[5], [PI / 2.0, PI / 2.0]);
        assert!(fm.tangent.iter().all(|t| *t == IDENTITY));
        assert!(fm.inverse_tangent.iter().all(|t| *t == IDENTITY));
        assert_eq!(fm.volume_defect(), 0.0);
        assert_eq!(fm.inverse_defect(), 0.0);
        assert!(matches!(FlowMap::new(1), Err(Error::LatticeSize(1))));
    }

    #[test]
    fn uniform_translation_rates() {
        let grid = Grid::new(16).unwrap();
        let u = field(&grid, |_, _| 1.0, |_, _| 0.0);
        let fm = FlowMap::new(4).unwrap();
        let r = fm.rates(&FlowField::new(&grid, &u)).unwrap();
        for p in 0..fm.len() {
            assert!((r.positions[p][0] - 1.0).abs() < 1e-14 && r.positions[p][1].abs() < 1e-14);
            assert!(r.tangent[p].iter().flatten().all(|v| v.abs() < 1e-14));
            assert!(r.inverse_tangent[p].iter().flatten().all(|v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn shear_tangent_rate() {
        let grid = Grid::new(32).unwrap();
        let u = field(&grid, |_, y| y.sin(), |_, _| 0.0);
        let fm = FlowMap::new(8).unwrap();
        let r = fm.rates(&FlowField::new(&grid, &u)).unwrap();
        for p in 0..fm.len() {
            let c = fm.positions[p][1].cos();
            let expected = [[0.0, c], [0.0, 0.0]];
            for i in 0..2 {
                for j in 0..2 {
                    assert!((r.tangent[p][i][j] - expected[i][j]).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn step_validates_inputs() {
        let grid = Grid::new(8).unwrap();
        let f = FlowField::new(&grid, &VectorField::zeros(8));
        let fm = FlowMap::new(2).unwrap();
        let stages = vec![f.clone(), f.clone(), f.clone(), f];
        assert!(matches!(fm.step(&stages, 0.0), Err(Error::TimeStep(_))));
        assert!(matches!(fm.step(&stages[..3], 0.1), Err(Error::Stages { got: 3, .. })));
        let mut bad = fm.clone();
        bad.positions[1][0] = f64::INFINITY;
        assert!(matches!(bad.step(&stages, 0.1), Err(Error::NonFiniteParticle(1))));
    }

    #[test]
    fn translation_is_exact() {
        let grid = Grid::new(16).unwrap();
        let u = field(&grid, |_, _| 1.0, |_, _| 0.0);
        let f = FlowField::new(&grid, &u);
        let stages = vec![f.clone(), f.clone(), f.clone(), f];
        let mut fm = FlowMap::new(4).unwrap();
        for _ in 0..10 {
            fm = fm.step(&stages, 0.1).unwrap();
        }
        for p in 0..fm.len() {
            let l = fm.label(p);
            assert!((fm.positions[p][0] - l[0] - 1.0).abs() < 1e-14);
            assert_eq!(fm.positions[p][1], l[1]);
        }
        assert!(fm.volume_defect() < 1e-14);
    }

    #[test]
    fn monitor_of_identity_is_constant_norm() {
        let fm = FlowMap::new(8).unwrap();
        // T = I: two unit constant entries, each of norm 2π
        let expected = 2.0 * PI * 2f64.sqrt();
        assert!((fm.tangent_monitor(2.5) - expected).abs() < 1e-12);
    }

    #[test]
    fn torus_distance_wraps() {
        assert!((torus_distance([0.1, 0.0], [2.0 * PI - 0.1, 0.0]) - 0.2).abs() < 1e-12);
        assert!((torus_distance([0.0, 4.0 * PI + 0.3], [0.0, 0.0]) - 0.3).abs() < 1e-12);
    }
}
