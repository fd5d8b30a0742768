//! Operators checked against values computed independently here: direct
//! DFT sums, closed-form derivatives and per-mode linear algebra.

use std::f64::consts::PI;

use lagflow::dynamics::{cal_u, euler_alpha_rhs, euler_rhs, ModelParams};
use lagflow::spectral::{sup_norm_refined, Grid, RealField, Spectrum, VectorField};
use num_complex::Complex64;

/// `f̂[ky, kx] = n⁻² Σ f[iy, ix] exp(−i(kx x + ky y))`, O(n⁴).
fn direct_dft(f: &RealField) -> Spectrum {
    let n = f.nrows();
    let h = 2.0 * PI / n as f64;
    Spectrum::from_shape_fn((n, n), |(jy, jx)| {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((iy, ix), v) in f.indexed_iter() {
            let phase = (jx * ix + jy * iy) as f64 * h;
            acc += v * Complex64::from_polar(1.0, -phase);
        }
        acc / (n * n) as f64
    })
}

fn signed(i: usize, n: usize) -> f64 {
    if i <= n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

fn max_diff(a: &Spectrum, b: &Spectrum) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_diff_real(a: &RealField, b: &RealField) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Stream function `ψ = Σ a cos(k₁x + k₂y + φ)` with modes `|kᵢ| ≤ 2`, so that
/// quadratic products stay below the dealiasing cutoff at n = 16.
struct Stream(Vec<(f64, f64, f64, f64)>);

impl Stream {
    fn new() -> Self {
        Self(vec![(1.0, 0.0, 0.7, 0.3), (0.0, 1.0, -0.4, 1.1), (1.0, 1.0, 0.5, -0.2), (2.0, -1.0, 0.25, 0.9), (-1.0, 2.0, 0.3, 2.0)])
    }

    /// `∂^{(a,b)}ψ` for `a + b ≤ 5`, as a function of the point.
    fn d(&self, a: u32, b: u32, x: f64, y: f64) -> f64 {
        self.0
            .iter()
            .map(|&(k1, k2, amp, ph)| {
                let order = a + b;
                // d^r/dθ^r cos θ = cos(θ + rπ/2)
                amp * k1.powi(a as i32) * k2.powi(b as i32) * (k1 * x + k2 * y + ph + order as f64 * PI / 2.0).cos()
            })
            .sum()
    }

    /// `u = (−ψ_y, ψ_x)`; returns `u` and its gradient `G[i][j] = ∂_j u_i`.
    fn velocity(&self, x: f64, y: f64) -> ([f64; 2], [[f64; 2]; 2]) {
        let u = [-self.d(0, 1, x, y), self.d(1, 0, x, y)];
        let g = [[-self.d(1, 1, x, y), -self.d(0, 2, x, y)], [self.d(2, 0, x, y), self.d(1, 1, x, y)]];
        (u, g)
    }

    /// `ω = Δψ` and its gradient.
    fn vorticity(&self, x: f64, y: f64) -> (f64, [f64; 2]) {
        let w = self.d(2, 0, x, y) + self.d(0, 2, x, y);
        (w, [self.d(3, 0, x, y) + self.d(1, 2, x, y), self.d(2, 1, x, y) + self.d(0, 3, x, y)])
    }

    /// `Δω` and its gradient.
    fn lap_vorticity(&self, x: f64, y: f64) -> (f64, [f64; 2]) {
        let l = self.d(4, 0, x, y) + 2.0 * self.d(2, 2, x, y) + self.d(0, 4, x, y);
        let lx = self.d(5, 0, x, y) + 2.0 * self.d(3, 2, x, y) + self.d(1, 4, x, y);
        let ly = self.d(4, 1, x, y) + 2.0 * self.d(2, 3, x, y) + self.d(0, 5, x, y);
        (l, [lx, ly])
    }

    fn sampled_velocity(&self, grid: &Grid) -> VectorField<Spectrum> {
        VectorField([
            grid.forward(&grid.sample(|x, y| self.velocity(x, y).0[0])).unwrap(),
            grid.forward(&grid.sample(|x, y| self.velocity(x, y).0[1])).unwrap(),
        ])
    }
}

#[test]
fn fft_matches_direct_dft() {
    let grid = Grid::new(8).unwrap();
    let f = grid.sample(|x, y| (x + 0.3).sin() * (2.0 * y).cos() + 0.1 * x * (y - 1.0));
    assert!(max_diff(&grid.forward(&f).unwrap(), &direct_dft(&f)) < 1e-15);
}

#[test]
fn derivatives_match_closed_forms() {
    let grid = Grid::new(32).unwrap();
    let s = Stream::new();
    let psi = grid.forward(&grid.sample(|x, y| s.d(0, 0, x, y))).unwrap();
    for (j, (a, b)) in [(0, (1, 0)), (1, (0, 1))] {
        let got = grid.inverse(&grid.derivative(&psi, j)).unwrap();
        let want = grid.sample(|x, y| s.d(a, b, x, y));
        assert!(max_diff_real(&got, &want) < 1e-13);
    }
    let lap = grid.inverse(&grid.laplacian(&psi)).unwrap();
    let e = max_diff_real(&lap, &grid.sample(|x, y| s.vorticity(x, y).0));
    assert!(e < 1e-12, "{e:e}");
}

#[test]
fn derivative_zeroes_nyquist_mode() {
    let grid = Grid::new(16).unwrap();
    let f = grid.forward(&grid.sample(|x, _| (8.0 * x).cos())).unwrap();
    assert!(grid.derivative(&f, 0).iter().all(|z| z.norm() == 0.0));
}

#[test]
fn parseval_matches_node_quadrature() {
    let grid = Grid::new(16).unwrap();
    let f = grid.sample(|x, y| (x + 2.0 * y).sin() + 0.3);
    let g = grid.sample(|x, y| (x + 2.0 * y).cos() + (3.0 * x).sin() + 0.5);
    let h = 2.0 * PI / 16.0;
    let quad: f64 = f.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() * h * h;
    let spec = grid.inner(&grid.forward(&f).unwrap(), &grid.forward(&g).unwrap());
    assert!((quad - spec).abs() < 1e-13);
    assert!((spec - 4.0 * PI * PI * 0.15).abs() < 1e-13);
}

#[test]
fn sobolev_norm_of_single_mode() {
    let grid = Grid::new(16).unwrap();
    let f = grid.forward(&grid.sample(|x, _| (3.0 * x).cos())).unwrap();
    for s in [0.0, 1.0, 2.5] {
        let want = 2.0 * PI * (0.5 * 10f64.powf(s)).sqrt();
        assert!((grid.sobolev_norm(&[&f], s).unwrap() - want).abs() < 1e-12 * want);
    }
}

#[test]
fn leray_projection_per_mode() {
    let grid = Grid::new(16).unwrap();
    let v = VectorField([
        grid.forward(&grid.sample(|x, y| (x + 2.0 * y).sin() + (3.0 * x).cos() * y.sin())).unwrap(),
        grid.forward(&grid.sample(|x, y| (2.0 * x - y).cos() + 0.25)).unwrap(),
    ]);
    let p = grid.leray_project(&v);
    for ((iy, ix), _) in v.0[0].indexed_iter() {
        let (kx, ky) = (signed(ix, 16), signed(iy, 16));
        let (a, b) = (p.0[0][[iy, ix]], p.0[1][[iy, ix]]);
        let (da, db) = (v.0[0][[iy, ix]] - a, v.0[1][[iy, ix]] - b);
        if kx == 0.0 && ky == 0.0 {
            assert!(da.norm() + db.norm() == 0.0);
        } else {
            // k·Pv̂ = 0 and v̂ − Pv̂ parallel to k
            assert!((kx * a + ky * b).norm() < 1e-15);
            assert!((kx * db - ky * da).norm() < 1e-15);
        }
    }
}

#[test]
fn helmholtz_inverse_of_cosines() {
    let grid = Grid::new(16).unwrap();
    let alpha = 0.7;
    let f = grid.forward(&grid.sample(|x, y| (2.0 * x + y).cos() + 3.0)).unwrap();
    let got = grid.inverse(&grid.helmholtz_inv(&f, alpha).unwrap()).unwrap();
    let want = grid.sample(|x, y| (2.0 * x + y).cos() / (1.0 + 5.0 * alpha) + 3.0);
    assert!(max_diff_real(&got, &want) < 1e-14);
}

#[test]
fn refined_sup_norm_finds_off_grid_maximum() {
    let grid = Grid::new(32).unwrap();
    let f = grid.forward(&grid.sample(|x, y| (x - 0.1).cos() + 0.5 * (2.0 * y - 0.05).cos())).unwrap();
    assert!((sup_norm_refined(&grid, &f) - 1.5).abs() < 1e-12);
}

#[test]
fn euler_rhs_curl_is_vorticity_transport() {
    // curl(−P[(u·∇)u]) = −u·∇ω, and the right-hand side is divergence-free
    let grid = Grid::new(16).unwrap();
    let s = Stream::new();
    let rhs = euler_rhs(&grid, &s.sampled_velocity(&grid)).unwrap();
    let got = grid.inverse(&grid.curl(&rhs)).unwrap();
    let want = grid.sample(|x, y| {
        let (u, _) = s.velocity(x, y);
        let (_, dw) = s.vorticity(x, y);
        -(u[0] * dw[0] + u[1] * dw[1])
    });
    assert!(max_diff_real(&got, &want) < 1e-12);
    assert!(grid.div(&rhs).iter().all(|z| z.norm() < 1e-14));
}

#[test]
fn euler_alpha_rhs_transports_potential_vorticity() {
    // curl((1 − αΔ)∂_t u) = −u·∇q with q = ω − αΔω
    let grid = Grid::new(16).unwrap();
    let s = Stream::new();
    let alpha = 0.6;
    let params = ModelParams::euler_alpha(alpha, 0.0).unwrap();
    let rhs = euler_alpha_rhs(&grid, &s.sampled_velocity(&grid), &params).unwrap();
    let got = grid.inverse(&grid.curl(&grid.helmholtz_vector(&rhs, alpha).unwrap())).unwrap();
    let want = grid.sample(|x, y| {
        let (u, _) = s.velocity(x, y);
        let (_, dw) = s.vorticity(x, y);
        let (_, dl) = s.lap_vorticity(x, y);
        -(u[0] * (dw[0] - alpha * dl[0]) + u[1] * (dw[1] - alpha * dl[1]))
    });
    let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(max_diff_real(&got, &want) < 1e-12 * scale);
}

#[test]
fn cal_u_solves_the_second_order_system() {
    // (1 − α(Δ + grad div)) 𝒰 = α(div[G Gᵗ + G G − Gᵗ G] + grad Tr(G G)),
    // with the source assembled from closed-form gradients and a direct DFT
    let n = 16;
    let grid = Grid::new(n).unwrap();
    let s = Stream::new();
    let alpha = 0.4;
    let got = cal_u(&grid, &s.sampled_velocity(&grid), alpha).unwrap();

    let field = |f: &dyn Fn([[f64; 2]; 2]) -> f64| direct_dft(&grid.sample(|x, y| f(s.velocity(x, y).1)));
    let mul = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| {
        let mut c = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        c
    };
    let tr = |g: [[f64; 2]; 2]| g[0][0] * g[0][0] + 2.0 * g[0][1] * g[1][0] + g[1][1] * g[1][1];
    let bracket = |g: [[f64; 2]; 2], i: usize, j: usize| {
        let gt = [[g[0][0], g[1][0]], [g[0][1], g[1][1]]];
        mul(g, gt)[i][j] + mul(g, g)[i][j] - mul(gt, g)[i][j]
    };
    let m: Vec<Vec<Spectrum>> = (0..2).map(|i| (0..2).map(|j| field(&|g| bracket(g, i, j))).collect()).collect();
    let t = field(&|g| tr(g));

    let iu = Complex64::new(0.0, 1.0);
    let mut worst = 0.0f64;
    for iy in 0..n {
        for ix in 0..n {
            let k = [signed(ix, n), signed(iy, n)];
            if k[0].abs() == 8.0 || k[1].abs() == 8.0 {
                continue;
            }
            let src: Vec<Complex64> = (0..2)
                .map(|i| iu * (k[0] * m[i][0][[iy, ix]] + k[1] * m[i][1][[iy, ix]]) + iu * k[i] * t[[iy, ix]])
                .collect();
            let k2 = k[0] * k[0] + k[1] * k[1];
            let a = [
                [1.0 + alpha * k2 + alpha * k[0] * k[0], alpha * k[0] * k[1]],
                [alpha * k[0] * k[1], 1.0 + alpha * k2 + alpha * k[1] * k[1]],
            ];
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            let want = [
                alpha * (a[1][1] * src[0] - a[0][1] * src[1]) / det,
                alpha * (a[0][0] * src[1] - a[1][0] * src[0]) / det,
            ];
            for c in 0..2 {
                worst = worst.max((got.0[c][[iy, ix]] - want[c]).norm());
            }
        }
    }
    assert!(worst < 1e-13, "{worst:e}");
}

/// Exact product spectrum `Σ_{p+q=k} â_p b̂_q` on signed wavenumbers, kept
/// for `|k_i| ≤ keep`.
fn convolve(a: &Spectrum, b: &Spectrum, keep: i64) -> Spectrum {
    let n = a.nrows();
    let idx = |k: i64| k.rem_euclid(n as i64) as usize;
    let mut out = Spectrum::zeros((n, n));
    for ((py, px), za) in a.indexed_iter() {
        for ((qy, qx), zb) in b.indexed_iter() {
            let kx = signed(px, n) as i64 + signed(qx, n) as i64;
            let ky = signed(py, n) as i64 + signed(qy, n) as i64;
            if kx.abs() <= keep && ky.abs() <= keep {
                out[[idx(ky), idx(kx)]] += za * zb;
            }
        }
    }
    out
}

/// `∂_j` of a spectrum with the Nyquist mode dropped.
fn d(f: &Spectrum, j: usize) -> Spectrum {
    let n = f.nrows();
    Spectrum::from_shape_fn((n, n), |(iy, ix)| {
        let i = if j == 0 { ix } else { iy };
        if i == n / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, signed(i, n)) * f[[iy, ix]]
        }
    })
}

fn leray(v: [Spectrum; 2]) -> [Spectrum; 2] {
    let n = v[0].nrows();
    let mut out = v.clone();
    for iy in 0..n {
        for ix in 0..n {
            let k = [signed(ix, n), signed(iy, n)];
            let k2 = k[0] * k[0] + k[1] * k[1];
            if k2 > 0.0 {
                let dot = (k[0] * v[0][[iy, ix]] + k[1] * v[1][[iy, ix]]) / k2;
                out[0][[iy, ix]] -= k[0] * dot;
                out[1][[iy, ix]] -= k[1] * dot;
            }
        }
    }
    out
}

#[test]
fn euler_rhs_matches_dense_convolution_on_8x8() {
    let grid = Grid::new(8).unwrap();
    for seed in 0..4 {
        let u = lagflow::ic::random_velocity(&grid, seed, 1.0, 2, 1.0).unwrap();
        let adv: Vec<Spectrum> = (0..2)
            .map(|i| convolve(&u.0[0], &d(&u.0[i], 0), 2) + convolve(&u.0[1], &d(&u.0[i], 1), 2))
            .collect();
        let want = leray([-adv[0].clone(), -adv[1].clone()]);
        let got = euler_rhs(&grid, &u).unwrap();
        assert!(max_diff(&got.0[0], &want[0]).max(max_diff(&got.0[1], &want[1])) < 1e-10);
    }
}

#[test]
fn cal_u_matches_dense_convolution_on_8x8() {
    let grid = Grid::new(8).unwrap();
    let alpha = 1.3;
    for seed in 0..4 {
        let u = lagflow::ic::random_velocity(&grid, 10 + seed, 1.0, 2, 1.0).unwrap();
        // g[i][j] = ∂_j u_i
        let g: Vec<Vec<Spectrum>> = (0..2).map(|i| (0..2).map(|j| d(&u.0[i], j)).collect()).collect();
        let prod = |a: &Spectrum, b: &Spectrum| convolve(a, b, 2);
        // [G Gᵗ + G G − Gᵗ G]_{ij} = Σ_k g_ik g_jk + g_ik g_kj − g_ki g_kj
        let m = |i: usize, j: usize| {
            (0..2)
                .map(|k| prod(&g[i][k], &g[j][k]) + prod(&g[i][k], &g[k][j]) - prod(&g[k][i], &g[k][j]))
                .fold(Spectrum::zeros((8, 8)), |acc, x| acc + x)
        };
        let tr = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| prod(&g[i][j], &g[j][i]))
            .fold(Spectrum::zeros((8, 8)), |acc, x| acc + x);
        let src: Vec<Spectrum> = (0..2).map(|i| d(&m(i, 0), 0) + d(&m(i, 1), 1) + d(&tr, i)).collect();
        let got = cal_u(&grid, &u, alpha).unwrap();
        for iy in 0..8 {
            for ix in 0..8 {
                let k = [signed(ix, 8), signed(iy, 8)];
                let k2 = k[0] * k[0] + k[1] * k[1];
                let a = [
                    [1.0 + alpha * (k2 + k[0] * k[0]), alpha * k[0] * k[1]],
                    [alpha * k[0] * k[1], 1.0 + alpha * (k2 + k[1] * k[1])],
                ];
                let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
                let (s0, s1) = (src[0][[iy, ix]], src[1][[iy, ix]]);
                let want = [alpha * (a[1][1] * s0 - a[0][1] * s1) / det, alpha * (a[0][0] * s1 - a[1][0] * s0) / det];
                for c in 0..2 {
                    assert!((got.0[c][[iy, ix]] - want[c]).norm() < 1e-10, "seed {seed} mode ({ix},{iy})");
                }
            }
        }
    }
}
