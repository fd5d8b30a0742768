//! Coupled time integration of the velocity field and the flow map, and the
//! three experiments built on it: conservation runs, the viscosity sweep and
//! the sensitivity (smooth dependence) study.
//!
//! Time stepping is classical fixed-step RK4. The four field stage values of
//! each step drive the four particle stages, so the coupled system
//! `(u, η, T, Tinv)` is integrated at fourth order.
//!
//! State updates use compensated (Kahan) summation: the low-order bits lost
//! when an O(dt) increment is added to an O(1) state are carried to the next
//! step. This keeps the round-off floor of long runs near machine precision,
//! which the finite-difference sensitivity study depends on.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::config::SimConfig;
use crate::diagnostics::{self, DiagnosticsRecord};
use crate::dynamics::{check_divergence_free, potential_vorticity, q_transport_rhs, velocity_from_q, velocity_rhs, Model, ModelParams};
use crate::error::{Error, Result};
use crate::flowmap::{torus_distance, FlowField, FlowMap, Mat2};
use crate::ic::{build_ic, random_velocity};
use crate::snapshot;
use crate::spectral::{max_abs, Grid, Spectrum, VectorField};

#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub u: VectorField<Spectrum>,
    pub flow: FlowMap,
    pub params: ModelParams,
    carry: Carry,
}

/// Compensation terms of the summed state.
#[derive(Clone, Debug, PartialEq)]
struct Carry {
    u: VectorField<Spectrum>,
    positions: Vec<[f64; 2]>,
    tangent: Vec<Mat2>,
    inverse_tangent: Vec<Mat2>,
}

impl Carry {
    fn zeros(n: usize, particles: usize) -> Self {
        Self {
            u: VectorField::zeros(n),
            positions: vec![[0.0; 2]; particles],
            tangent: vec![[[0.0; 2]; 2]; particles],
            inverse_tangent: vec![[[0.0; 2]; 2]; particles],
        }
    }
}

/// `s += d` with Kahan compensation `c`.
fn kahan(s: &mut f64, c: &mut f64, d: f64) {
    let y = d - *c;
    let t = *s + y;
    *c = (t - *s) - y;
    *s = t;
}

fn kahan_spectrum(s: &mut Spectrum, c: &mut Spectrum, d: &Spectrum) {
    ndarray::Zip::from(s).and(c).and(d).for_each(|s, c, d| {
        kahan(&mut s.re, &mut c.re, d.re);
        kahan(&mut s.im, &mut c.im, d.im);
    });
}

fn kahan_vector(s: &mut VectorField<Spectrum>, c: &mut VectorField<Spectrum>, d: &VectorField<Spectrum>) {
    for i in 0..2 {
        kahan_spectrum(&mut s.0[i], &mut c.0[i], &d.0[i]);
    }
}

fn kahan_slice<const N: usize>(s: &mut [f64; N], c: &mut [f64; N], d: &[f64; N]) {
    for i in 0..N {
        kahan(&mut s[i], &mut c[i], d[i]);
    }
}

impl SimState {
    /// State at `t = 0` with the identity flow map on an `m x m` lattice.
    /// `u` is dealiased and must be divergence-free.
    pub fn new(grid: &Grid, u: VectorField<Spectrum>, m: usize, params: ModelParams) -> Result<Self> {
        params.validate()?;
        check_divergence_free(grid, &u)?;
        let mut u = grid.leray_project(&u);
        grid.dealias_vector(&mut u);
        let flow = FlowMap::new(m)?;
        let carry = Carry::zeros(grid.n(), flow.len());
        Ok(Self { t: 0.0, u, flow, params, carry })
    }

    /// The same particles in the velocity field `−u`. For inviscid models,
    /// advancing the result by `t` retraces the trajectory back to `t = 0`.
    pub fn reversed(&self) -> Self {
        let mut s = self.clone();
        s.u = s.u.scale(-1.0);
        s.carry.u = s.carry.u.scale(-1.0);
        s
    }
}

fn instability(t: f64, step: usize, detail: impl Into<String>) -> Error {
    Error::Instability { t, step, detail: detail.into() }
}

/// One RK4 step of the field alone. Returns the (projected, dealiased)
/// increment and the four stage values `u`, `u + dt/2·k1`, `u + dt/2·k2`,
/// `u + dt·k3`.
fn field_increment(
    grid: &Grid,
    u: &VectorField<Spectrum>,
    params: &ModelParams,
    dt: f64,
    t: f64,
    step: usize,
) -> Result<(VectorField<Spectrum>, [VectorField<Spectrum>; 4])> {
    let rhs = |v: &VectorField<Spectrum>, stage: usize| -> Result<VectorField<Spectrum>> {
        if !v.is_finite() {
            return Err(instability(t, step, format!("non-finite velocity at RK stage {stage}")));
        }
        let k = velocity_rhs(grid, v, params).map_err(|e| match e {
            Error::NotDivergenceFree(d) => {
                instability(t, step, format!("divergence {d:.3e} at RK stage {stage}"))
            }
            other => other,
        })?;
        if !k.is_finite() {
            return Err(instability(t, step, format!("non-finite tendency at RK stage {stage}")));
        }
        Ok(k)
    };
    let k1 = rhs(u, 1)?;
    let u2 = u.add_scaled(0.5 * dt, &k1);
    let k2 = rhs(&u2, 2)?;
    let u3 = u.add_scaled(0.5 * dt, &k2);
    let k3 = rhs(&u3, 3)?;
    let u4 = u.add_scaled(dt, &k3);
    let k4 = rhs(&u4, 4)?;
    let w = dt / 6.0;
    let incr = k1.scale(w).add_scaled(2.0 * w, &k2).add_scaled(2.0 * w, &k3).add_scaled(w, &k4);
    // u is divergence-free and dealiased, so projecting the increment
    // projects the updated field.
    let mut incr = grid.leray_project(&incr);
    grid.dealias_vector(&mut incr);
    Ok((incr, [u.clone(), u2, u3, u4]))
}

fn step_indexed(grid: &Grid, state: &SimState, dt: f64, t_next: f64, step: usize) -> Result<SimState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::TimeStep(dt));
    }
    let (du, stages) = field_increment(grid, &state.u, &state.params, dt, state.t, step)?;
    let fields: Vec<FlowField> = stages.iter().map(|s| FlowField::new(grid, s)).collect();
    let particle_error = |e| match e {
        Error::NonFiniteParticle(p) => instability(t_next, step + 1, format!("non-finite state of particle {p}")),
        other => other,
    };
    let incr = state.flow.increments(&fields, dt).map_err(particle_error)?;

    let mut next = state.clone();
    kahan_vector(&mut next.u, &mut next.carry.u, &du);
    if !next.u.is_finite() {
        return Err(instability(t_next, step + 1, "non-finite velocity after the step"));
    }
    let (flow, carry) = (&mut next.flow, &mut next.carry);
    for p in 0..flow.len() {
        kahan_slice(&mut flow.positions[p], &mut carry.positions[p], &incr.positions[p]);
        for i in 0..2 {
            kahan_slice(&mut flow.tangent[p][i], &mut carry.tangent[p][i], &incr.tangent[p][i]);
            kahan_slice(&mut flow.inverse_tangent[p][i], &mut carry.inverse_tangent[p][i], &incr.inverse_tangent[p][i]);
        }
    }
    flow.check_finite().map_err(particle_error)?;
    next.t = t_next;
    next.flow.t = t_next;
    Ok(next)
}

/// One RK4 step of the coupled system; the velocity increment is Leray
/// projected and dealiased.
pub fn step(grid: &Grid, state: &SimState, dt: f64) -> Result<SimState> {
    step_indexed(grid, state, dt, state.t + dt, 0)
}

/// Advance `steps` steps of size `dt`. `observe` sees the initial state
/// (index 0) and the state after every step. Times are `t₀ + i·dt`.
pub fn advance(
    grid: &Grid,
    state: SimState,
    dt: f64,
    steps: usize,
    mut observe: impl FnMut(usize, &SimState) -> Result<()>,
) -> Result<SimState> {
    let t0 = state.t;
    let mut state = state;
    observe(0, &state)?;
    for i in 0..steps {
        state = step_indexed(grid, &state, dt, t0 + (i + 1) as f64 * dt, i)?;
        observe(i + 1, &state)?;
    }
    Ok(state)
}

/// Courant number `dt·max|u|·n/(2π)` of a velocity field.
pub fn courant_number(grid: &Grid, u: &VectorField<Spectrum>, dt: f64) -> f64 {
    let p = grid.to_physical_vector(u);
    let speed = (&p.0[0] * &p.0[0] + &p.0[1] * &p.0[1]).mapv(f64::sqrt);
    dt * max_abs(&speed) * grid.n() as f64 / (2.0 * PI)
}

fn cfl_guard(grid: &Grid, u: &VectorField<Spectrum>, dt: f64) {
    let c = courant_number(grid, u, dt);
    if c > 0.5 {
        log::warn!("Courant number {c:.3} exceeds 0.5 at t = 0 (dt = {dt})");
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub state: SimState,
    pub diagnostics: Vec<DiagnosticsRecord>,
    /// Files written, in order (empty without an output directory).
    pub files: Vec<PathBuf>,
}

/// Build the grid and initial condition from `config` and run it.
pub fn run(config: &SimConfig) -> Result<RunOutput> {
    config.validate()?;
    let grid = config.build_grid()?;
    let u0 = build_ic(&config.ic, &grid, &config.params())?;
    run_from(config, &grid, u0)
}

/// Run `config` from the given initial velocity. Diagnostics are sampled at
/// step 0, every `sample_every` steps and at the final step. With an output
/// directory, writes `diagnostics.csv`, the resolved `config.toml` and
/// snapshots `u_NNNNNN.fld` (velocity), `omega_NNNNNN.fld` or
/// `q_NNNNNN.fld` (scalar) and `flow_NNNNNN.fmp`.
pub fn run_from(config: &SimConfig, grid: &Grid, u0: VectorField<Spectrum>) -> Result<RunOutput> {
    config.validate()?;
    if grid.n() != config.grid.n {
        return Err(Error::Setup(format!("grid has n = {}, config has n = {}", grid.n(), config.grid.n)));
    }
    let params = config.params();
    let state = SimState::new(grid, u0, config.grid.m, params)?;
    let dt = config.time.dt;
    let steps = config.steps();
    cfl_guard(grid, &state.u, dt);

    let out = &config.output;
    let dir = out.dir.as_deref();
    let mut files = Vec::new();
    if let Some(dir) = dir {
        let path = dir.join("config.toml");
        snapshot::write_atomic(&path, |w| std::io::Write::write_all(w, config.to_toml().as_bytes()))?;
        files.push(path);
    }
    let mut series = Vec::new();
    let state = advance(grid, state, dt, steps, |i, s| {
        if i % out.sample_every == 0 || i == steps {
            let rec = diagnostics::sample(grid, s, out.sobolev_s)?;
            if !rec.is_finite() {
                return Err(instability(s.t, i, format!("non-finite diagnostics: {}", rec.csv_row())));
            }
            series.push(rec);
        }
        if let Some(dir) = dir {
            let due = match out.snapshot_every {
                Some(every) => i % every == 0 || i == steps,
                None => i == 0 || i == steps,
            };
            if due {
                files.extend(write_snapshots(grid, dir, i, s)?);
            }
        }
        Ok(())
    })?;
    if let Some(dir) = dir {
        let path = dir.join("diagnostics.csv");
        diagnostics::write_csv(&path, &series)?;
        files.push(path);
    }
    Ok(RunOutput { state, diagnostics: series, files })
}

/// Velocity, vorticity (Euler) or potential vorticity (Euler-α), and flow-map
/// snapshots of `state`, tagged with the step index.
pub fn write_snapshots(grid: &Grid, dir: &Path, index: usize, state: &SimState) -> Result<Vec<PathBuf>> {
    let u = grid.to_physical_vector(&state.u);
    let (name, scalar) = match state.params.model {
        Model::Euler => ("omega", grid.curl(&state.u)),
        Model::EulerAlpha => ("q", potential_vorticity(grid, &state.u, state.params.alpha)?),
    };
    let paths = [
        dir.join(format!("u_{index:06}.fld")),
        dir.join(format!("{name}_{index:06}.fld")),
        dir.join(format!("flow_{index:06}.fmp")),
    ];
    snapshot::write_field(&paths[0], state.t, &[&u.0[0], &u.0[1]])?;
    snapshot::write_field(&paths[1], state.t, &[&grid.to_physical(&scalar)])?;
    snapshot::write_flow(&paths[2], &state.flow)?;
    Ok(paths.to_vec())
}

/// Integrate the field alone (no particles) in velocity form.
pub fn evolve_velocity(
    grid: &Grid,
    u0: &VectorField<Spectrum>,
    params: &ModelParams,
    dt: f64,
    steps: usize,
) -> Result<VectorField<Spectrum>> {
    params.validate()?;
    let mut u = grid.leray_project(u0);
    grid.dealias_vector(&mut u);
    let mut carry = VectorField::zeros(grid.n());
    for i in 0..steps {
        let (du, _) = field_increment(grid, &u, params, dt, i as f64 * dt, i)?;
        kahan_vector(&mut u, &mut carry, &du);
    }
    Ok(u)
}

/// Integrate Euler-α in potential-vorticity transport form,
/// `∂_t q = −u·∇q + νΔω`, recovering `u` from `q` at every stage, and return
/// the final velocity.
pub fn evolve_q_form(
    grid: &Grid,
    u0: &VectorField<Spectrum>,
    params: &ModelParams,
    dt: f64,
    steps: usize,
) -> Result<VectorField<Spectrum>> {
    params.validate()?;
    if params.model != Model::EulerAlpha {
        return Err(Error::Setup("the q-transport form needs model = euler_alpha".into()));
    }
    let (alpha, nu) = (params.alpha, params.nu);
    let rhs = |q: &Spectrum, t: f64, step: usize| -> Result<Spectrum> {
        let u = velocity_from_q(grid, q, alpha)?;
        let r = q_transport_rhs(grid, q, &u, nu, alpha)?;
        if r.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(instability(t, step, "non-finite potential-vorticity tendency"));
        }
        Ok(r)
    };
    let mut q = potential_vorticity(grid, u0, alpha)?;
    grid.dealias(&mut q);
    let mut carry = Spectrum::zeros(q.dim());
    let w = dt / 6.0;
    for i in 0..steps {
        let t = i as f64 * dt;
        let k1 = rhs(&q, t, i)?;
        let k2 = rhs(&axpy(&q, 0.5 * dt, &k1), t, i)?;
        let k3 = rhs(&axpy(&q, 0.5 * dt, &k2), t, i)?;
        let k4 = rhs(&axpy(&q, dt, &k3), t, i)?;
        let mut dq = axpy(&axpy(&axpy(&k1.mapv(|z| z * w), 2.0 * w, &k2), 2.0 * w, &k3), w, &k4);
        grid.dealias(&mut dq);
        kahan_spectrum(&mut q, &mut carry, &dq);
    }
    velocity_from_q(grid, &q, alpha)
}

fn axpy(y: &Spectrum, a: f64, x: &Spectrum) -> Spectrum {
    let mut out = y.clone();
    out.zip_mut_with(x, |o, v| *o += a * v);
    out
}

/// Both distances between two flow maps on the same lattice: the particle
/// sup of the periodic distance, and the lattice-quadrature L² norm
/// `(Σ d² · (2π/m)²)^{1/2}`.
pub fn flow_distance(a: &FlowMap, b: &FlowMap) -> (f64, f64) {
    let d: Vec<f64> = a.positions.iter().zip(&b.positions).map(|(p, q)| torus_distance(*p, *q)).collect();
    let sup = d.iter().copied().fold(0.0, f64::max);
    let h = 2.0 * PI / a.m() as f64;
    (sup, h * d.iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Pointwise sup (grid) and L² norms of `u − v`.
pub fn velocity_distance(grid: &Grid, u: &VectorField<Spectrum>, v: &VectorField<Spectrum>) -> (f64, f64) {
    let d = u.add_scaled(-1.0, v);
    let p = grid.to_physical_vector(&d);
    let mag = (&p.0[0] * &p.0[0] + &p.0[1] * &p.0[1]).mapv(f64::sqrt);
    (max_abs(&mag), grid.l2_norm(&[&d.0[0], &d.0[1]]))
}

/// Run several independent configurations from the same grid concurrently.
fn run_members(grid: &Grid, jobs: Vec<(SimConfig, VectorField<Spectrum>)>) -> Result<Vec<SimState>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .into_iter()
            .map(|(cfg, u0)| scope.spawn(move || run_from(&cfg, grid, u0).map(|o| o.state)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub nu: f64,
    /// Particle sup of the periodic distance between `η^ν(T)` and `η⁰(T)`.
    pub eta_sup: f64,
    pub eta_l2: f64,
    pub u_sup: f64,
    pub u_l2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// `eta_sup` strictly decreases as ν decreases.
    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].eta_sup < w[0].eta_sup)
    }

    /// Least-squares slope of `ln E` against `ln ν` for the chosen column.
    pub fn slope(&self, column: impl Fn(&SweepRow) -> f64) -> f64 {
        let pts: Vec<(f64, f64)> = self.rows.iter().map(|r| (r.nu.ln(), column(r).ln())).collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("nu,eta_sup,eta_l2,u_sup,u_l2\n");
        for r in &self.rows {
            s.push_str(&format!("{:?},{:?},{:?},{:?},{:?}\n", r.nu, r.eta_sup, r.eta_l2, r.u_sup, r.u_l2));
        }
        s
    }
}

/// Distances at `T` between each viscous run and the inviscid reference run,
/// all from the same initial velocity, grid, time step and lattice. Member
/// runs execute in parallel; with an output directory each writes into its
/// own subdirectory `nu_<ν>`.
pub fn viscosity_sweep(config: &SimConfig, nus: &[f64]) -> Result<SweepTable> {
    config.validate()?;
    if config.model.model != Model::EulerAlpha {
        return Err(Error::Setup("the viscosity sweep requires model = euler_alpha".into()));
    }
    crate::config::validate_nus(nus)?;
    let grid = config.build_grid()?;
    let u0 = build_ic(&config.ic, &grid, &config.params())?;
    let member = |nu: f64| {
        let mut cfg = config.clone();
        cfg.model.nu = nu;
        if let Some(dir) = &config.output.dir {
            cfg.output.dir = Some(dir.join(format!("nu_{nu:e}")));
        }
        (cfg, u0.clone())
    };
    let jobs = std::iter::once(0.0).chain(nus.iter().copied()).map(member).collect();
    let states = run_members(&grid, jobs)?;
    let reference = &states[0];
    let rows = nus
        .iter()
        .zip(&states[1..])
        .map(|(&nu, s)| {
            let (eta_sup, eta_l2) = flow_distance(&s.flow, &reference.flow);
            let (u_sup, u_l2) = velocity_distance(&grid, &s.u, &reference.u);
            SweepRow { nu, eta_sup, eta_l2, u_sup, u_l2 }
        })
        .collect();
    Ok(SweepTable { rows })
}

/// Central-difference derivatives `D(ε)` for a descending list of ε and the
/// successive differences between them.
#[derive(Clone, Debug, PartialEq)]
pub struct RichardsonTable {
    /// `‖D(ε_i) − D(ε_{i+1})‖`.
    pub differences: Vec<f64>,
    /// `differences[i] / differences[i+1]`.
    pub ratios: Vec<f64>,
    /// Size of `‖D‖` at the smallest ε.
    pub derivative_norm: f64,
    /// Round-off estimate for `D` at each ε: `ε_mach·‖Φ‖ / ε` (the measured
    /// noise of the compensated integrator is about a fifth of this).
    pub floor: Vec<f64>,
}

impl RichardsonTable {
    fn new(diffs: Vec<f64>, derivative_norm: f64, phi_norm: f64, eps: &[f64]) -> Self {
        let ratios = diffs.windows(2).map(|w| w[0] / w[1]).collect();
        let floor = eps.iter().map(|e| f64::EPSILON * phi_norm / e).collect();
        Self { differences: diffs, ratios, derivative_norm, floor }
    }

    /// Whether ratio `i` is measured clear of the round-off floor: both
    /// differences exceed the floor of the smallest ε involved.
    pub fn pre_floor(&self, i: usize) -> bool {
        let floor = self.floor[i + 2];
        self.differences[i] > floor && self.differences[i + 1] > floor
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SensitivityReport {
    pub eps: Vec<f64>,
    /// Lattice L² norms of the flow-map derivatives.
    pub eta: RichardsonTable,
    /// L² norms of the velocity derivatives.
    pub u: RichardsonTable,
}

impl SensitivityReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("quantity,eps,difference,floor,ratio,pre_floor\n");
        for (name, table) in [("eta", &self.eta), ("u", &self.u)] {
            for (i, d) in table.differences.iter().enumerate() {
                let (ratio, pre) = match i {
                    0 => (String::new(), String::new()),
                    _ => (format!("{:?}", table.ratios[i - 1]), table.pre_floor(i - 1).to_string()),
                };
                s.push_str(&format!("{name},{:?},{d:?},{:?},{ratio},{pre}\n", self.eps[i], table.floor[i + 1]));
            }
        }
        s
    }
}

/// Random direction for [`sensitivity`]: a random field of the configured
/// spectrum with its own seed, scaled to unit `H^s` norm.
pub fn sensitivity_direction(config: &SimConfig, grid: &Grid) -> Result<VectorField<Spectrum>> {
    let sens = config.sensitivity_or_default();
    let seed = sens.direction_seed.unwrap_or(config.ic.seed.wrapping_add(1));
    let v = random_velocity(grid, seed, config.ic.p, config.ic.cutoff, 1.0)?;
    let norm = grid.sobolev_norm(&[&v.0[0], &v.0[1]], config.output.sobolev_s)?;
    Ok(v.scale(1.0 / norm))
}

/// Finite-difference directional derivatives of `η(T)` and `u(T)` with
/// respect to `u₀` along `v`: `D(ε) = (Φ(u₀ + εv) − Φ(u₀ − εv))/(2ε)`, for
/// every ε of `eps` (positive, strictly descending). All perturbed runs
/// execute in parallel.
pub fn sensitivity(config: &SimConfig, v: &VectorField<Spectrum>, eps: &[f64]) -> Result<SensitivityReport> {
    config.validate()?;
    if eps.len() < 2 || eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) || eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Setup("eps list needs at least two positive, strictly descending values".into()));
    }
    let grid = config.build_grid()?;
    check_divergence_free(&grid, v)?;
    let hs = grid.sobolev_norm(&[&v.0[0], &v.0[1]], config.output.sobolev_s)?;
    if (hs - 1.0).abs() > 1e-8 {
        return Err(Error::Setup(format!("direction must have unit H^s norm, got {hs}")));
    }
    let u0 = build_ic(&config.ic, &grid, &config.params())?;
    let mut cfg = config.clone();
    cfg.output.dir = None;
    let jobs = eps
        .iter()
        .flat_map(|&e| [u0.add_scaled(e, v), u0.add_scaled(-e, v)])
        .map(|u| (cfg.clone(), u))
        .collect();
    let states = run_members(&grid, jobs)?;
    let base = run_from(&cfg, &grid, u0)?.state;

    let h = 2.0 * PI / config.grid.m as f64;
    let mut d_eta: Vec<Vec<[f64; 2]>> = Vec::new();
    let mut d_u: Vec<VectorField<Spectrum>> = Vec::new();
    for (i, &e) in eps.iter().enumerate() {
        let (plus, minus) = (&states[2 * i], &states[2 * i + 1]);
        let s = 0.5 / e;
        d_eta.push(
            plus.flow
                .positions
                .iter()
                .zip(&minus.flow.positions)
                .map(|(a, b)| [(a[0] - b[0]) * s, (a[1] - b[1]) * s])
                .collect(),
        );
        d_u.push(plus.u.add_scaled(-1.0, &minus.u).scale(s));
    }
    let eta_norm = |d: &[[f64; 2]]| h * d.iter().map(|p| p[0] * p[0] + p[1] * p[1]).sum::<f64>().sqrt();
    let u_norm = |d: &VectorField<Spectrum>| grid.l2_norm(&[&d.0[0], &d.0[1]]);

    let eta_diffs = d_eta
        .windows(2)
        .map(|w| {
            let diff: Vec<[f64; 2]> = w[0].iter().zip(&w[1]).map(|(a, b)| [a[0] - b[0], a[1] - b[1]]).collect();
            eta_norm(&diff)
        })
        .collect();
    let u_diffs = d_u.windows(2).map(|w| u_norm(&w[0].add_scaled(-1.0, &w[1]))).collect();

    let eta_phi = eta_norm(&base.flow.positions);
    let u_phi = u_norm(&base.u);
    Ok(SensitivityReport {
        eps: eps.to_vec(),
        eta: RichardsonTable::new(eta_diffs, eta_norm(d_eta.last().unwrap()), eta_phi, eps),
        u: RichardsonTable::new(u_diffs, u_norm(d_u.last().unwrap()), u_phi, eps),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub dts: Vec<f64>,
    /// Particle sup distances between successive resolutions.
    pub eta_differences: Vec<f64>,
    /// Velocity sup distances between successive resolutions.
    pub u_differences: Vec<f64>,
}

impl ConvergenceReport {
    fn orders(d: &[f64]) -> Vec<f64> {
        d.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
    }

    pub fn eta_orders(&self) -> Vec<f64> {
        Self::orders(&self.eta_differences)
    }

    pub fn u_orders(&self) -> Vec<f64> {
        Self::orders(&self.u_differences)
    }
}

/// Self-convergence in dt: runs at `base_dt / 2^i` for `i = 0..=halvings`
/// (in parallel) to `config.time.t_end`.
pub fn convergence_study(config: &SimConfig, base_dt: f64, halvings: usize) -> Result<ConvergenceReport> {
    config.validate()?;
    let grid = config.build_grid()?;
    let u0 = build_ic(&config.ic, &grid, &config.params())?;
    let dts: Vec<f64> = (0..=halvings).map(|i| base_dt / f64::powi(2.0, i as i32)).collect();
    let jobs = dts
        .iter()
        .map(|&dt| {
            let mut cfg = config.clone();
            cfg.time.dt = dt;
            cfg.output.dir = None;
            cfg.output.sample_every = usize::MAX;
            cfg.validate().map(|_| (cfg, u0.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let states = run_members(&grid, jobs)?;
    let eta_differences = states.windows(2).map(|w| flow_distance(&w[0].flow, &w[1].flow).0).collect();
    let u_differences = states.windows(2).map(|w| velocity_distance(&grid, &w[0].u, &w[1].u).0).collect();
    Ok(ConvergenceReport { dts, eta_differences, u_differences })
}
