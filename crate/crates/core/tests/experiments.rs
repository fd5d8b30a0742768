//! End-to-end runs against closed-form trajectories.

use std::f64::consts::PI;

use lagflow::config::{IcKind, IcSpec, SimConfig};
use lagflow::diagnostics::assert_conservation;
use lagflow::diagnostics::Tolerances;
use lagflow::dynamics::ModelParams;
use lagflow::flowmap::torus_distance;
use lagflow::simulate::{run, sensitivity, sensitivity_direction, viscosity_sweep};

fn small(params: ModelParams, kind: IcKind) -> SimConfig {
    let mut cfg = SimConfig::new(params, IcSpec::new(kind));
    cfg.grid.n = 16;
    cfg.grid.m = 8;
    cfg
}

#[test]
fn viscous_shear_decays_at_the_single_mode_rate() {
    // ω = −cos y is an eigenfunction: ∂_t q = νΔω with q = (1 + α)ω gives
    // u^ν = e^{−λt}(sin y, 0), λ = ν/(1 + α), and
    // η^ν = (x + sin y (1 − e^{−λt})/λ, y).
    let alpha = 1.0;
    let cfg = small(ModelParams::euler_alpha(alpha, 0.0).unwrap(), IcKind::Shear);
    let nus = [1e-1, 1e-2, 1e-3];
    let table = viscosity_sweep(&cfg, &nus).unwrap();
    let t = cfg.time.t_end;
    let m = cfg.grid.m;
    let h = 2.0 * PI / m as f64;
    for (row, nu) in table.rows.iter().zip(nus) {
        let lambda = nu / (1.0 + alpha);
        let lag = (1.0 - (-lambda * t).exp()) / lambda - t;
        let (mut sup, mut sq) = (0.0f64, 0.0);
        for iy in 0..m {
            let y = iy as f64 * h;
            let a = [0.0, y];
            let d = torus_distance(a, [lag * y.sin(), y]);
            sup = sup.max(d);
            sq += m as f64 * d * d;
        }
        let decay = 1.0 - (-lambda * t).exp();
        assert!((row.eta_sup - sup).abs() < 1e-12, "nu {nu}: {} vs {sup}", row.eta_sup);
        assert!((row.eta_l2 - h * sq.sqrt()).abs() < 1e-12);
        assert!((row.u_sup - decay).abs() < 1e-12);
        assert!((row.u_l2 - decay * PI * 2f64.sqrt()).abs() < 1e-12);
    }
    assert!(table.rows.iter().all(|r| r.eta_sup > 0.0));
    assert!(table.monotone());
}

#[test]
fn taylor_green_particles_follow_streamlines() {
    let mut cfg = SimConfig::new(ModelParams::euler(), IcSpec::new(IcKind::TaylorGreen));
    cfg.grid.m = 16;
    let out = run(&cfg).unwrap();
    let rep = assert_conservation(&out.diagnostics, ModelParams::euler().model, 0.0, &Tolerances::default());
    assert!(rep.rows.iter().all(|r| r.drift <= 1e-10), "{}", rep.to_table());

    let fm = &out.state.flow;
    assert!(fm.volume_defect() <= 1e-8 && fm.inverse_defect() <= 1e-8);
    // ψ = sin x sin y is constant along trajectories
    let psi = |p: [f64; 2]| p[0].sin() * p[1].sin();
    let worst = (0..fm.len())
        .map(|p| (psi(fm.positions[p]) - psi(fm.label(p))).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst:e}");
    let moved = (0..fm.len()).map(|p| torus_distance(fm.positions[p], fm.label(p))).fold(0.0, f64::max);
    assert!(moved > 0.1);
}

#[test]
fn roundoff_floor_is_detected_for_tiny_eps() {
    let mut cfg = SimConfig::new(ModelParams::euler(), IcSpec::random(3, 4.0, 4));
    cfg.grid.n = 16;
    cfg.grid.m = 8;
    cfg.time.dt = 1e-2;
    cfg.time.t_end = 0.5;
    let grid = cfg.build_grid().unwrap();
    let v = sensitivity_direction(&cfg, &grid).unwrap();

    let smooth = sensitivity(&cfg, &v, &[1e-2, 5e-3, 2.5e-3]).unwrap();
    assert!(smooth.eta.pre_floor(0) && smooth.u.pre_floor(0));
    assert!((3.2..=4.8).contains(&smooth.eta.ratios[0]), "{:?}", smooth.eta.ratios);

    let tiny = sensitivity(&cfg, &v, &[1e-9, 5e-10, 2.5e-10]).unwrap();
    assert!(!tiny.eta.pre_floor(0) && !tiny.u.pre_floor(0));
    assert!(tiny.to_csv().contains(",false"));
}
