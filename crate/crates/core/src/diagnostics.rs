//! Conserved and monitored quantities, sampled along a run.
//!
//! Integrals are exact spectral sums (Parseval). `‖∇u‖_∞` is a grid maximum;
//! `‖ω‖_∞` and `‖q‖_∞` are maxima of the band-limited interpolant, refined
//! off-grid from the grid extrema (see `spectral::sup_norm_refined`).

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::dynamics::{potential_vorticity, Model};
use crate::error::Result;
use crate::simulate::SimState;
use crate::spectral::{max_abs, sup_norm_refined, Grid};

pub const CSV_HEADER: &str = "t,energy,enstrophy,omega_max,q_mean,q_l2,q_max,hs_norm,grad_u_max,\
log_bound_ratio,volume_defect,inverse_defect,tangent_monitor";

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `½∫|u|²`
    pub energy: f64,
    /// `½∫ω²`
    pub enstrophy: f64,
    pub omega_max: f64,
    pub q_mean: Option<f64>,
    pub q_l2: Option<f64>,
    pub q_max: Option<f64>,
    pub hs_norm: f64,
    pub grad_u_max: f64,
    /// `grad_u_max / (1 + ln(e + hs_norm))`
    pub log_bound_ratio: f64,
    pub volume_defect: f64,
    pub inverse_defect: f64,
    pub tangent_monitor: f64,
}

impl DiagnosticsRecord {
    fn values(&self) -> [Option<f64>; 13] {
        [
            Some(self.t),
            Some(self.energy),
            Some(self.enstrophy),
            Some(self.omega_max),
            self.q_mean,
            self.q_l2,
            self.q_max,
            Some(self.hs_norm),
            Some(self.grad_u_max),
            Some(self.log_bound_ratio),
            Some(self.volume_defect),
            Some(self.inverse_defect),
            Some(self.tangent_monitor),
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().flatten().all(|v| v.is_finite())
    }

    /// One CSV row; missing quantities are empty fields, numbers use the
    /// shortest representation that round-trips.
    pub fn csv_row(&self) -> String {
        let mut row = String::new();
        for (i, v) in self.values().iter().enumerate() {
            if i > 0 {
                row.push(',');
            }
            if let Some(v) = v {
                write!(row, "{v:?}").unwrap();
            }
        }
        row
    }
}

/// Sample every diagnostic of `state`, with Sobolev index `s` for `hs_norm`
/// and the tangent monitor.
pub fn sample(grid: &Grid, state: &SimState, s: f64) -> Result<DiagnosticsRecord> {
    let u = &state.u;
    let omega = grid.curl(u);
    let energy = 0.5 * grid.l2_norm(&[&u.0[0], &u.0[1]]).powi(2);
    let enstrophy = 0.5 * grid.l2_norm(&[&omega]).powi(2);
    let omega_max = sup_norm_refined(grid, &omega);

    let (q_mean, q_l2, q_max) = match state.params.model {
        Model::Euler => (None, None, None),
        Model::EulerAlpha => {
            let q = potential_vorticity(grid, u, state.params.alpha)?;
            (
                Some(grid.mean(&q)),
                Some(grid.l2_norm(&[&q])),
                Some(sup_norm_refined(grid, &q)),
            )
        }
    };

    let hs_norm = grid.sobolev_norm(&[&u.0[0], &u.0[1]], s)?;
    let g = grid.gradient_tensor(u);
    let g = [
        grid.to_physical(&g.0[0][0]),
        grid.to_physical(&g.0[0][1]),
        grid.to_physical(&g.0[1][0]),
        grid.to_physical(&g.0[1][1]),
    ];
    let frob = &g[0] * &g[0] + &g[1] * &g[1] + &g[2] * &g[2] + &g[3] * &g[3];
    let grad_u_max = max_abs(&frob).sqrt();
    let log_bound_ratio = grad_u_max / (1.0 + (std::f64::consts::E + hs_norm).ln());

    Ok(DiagnosticsRecord {
        t: state.t,
        energy,
        enstrophy,
        omega_max,
        q_mean,
        q_l2,
        q_max,
        hs_norm,
        grad_u_max,
        log_bound_ratio,
        volume_defect: state.flow.volume_defect(),
        inverse_defect: state.flow.inverse_defect(),
        tangent_monitor: state.flow.tangent_monitor(s),
    })
}

/// Full CSV document (header plus one row per record).
pub fn to_csv(series: &[DiagnosticsRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in series {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, series: &[DiagnosticsRecord]) -> Result<()> {
    crate::snapshot::write_atomic(path, |w| w.write_all(to_csv(series).as_bytes()))
}

/// Thresholds for [`assert_conservation`]. Drifts are relative to the first
/// sample, except `q_mean`, which is absolute.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub energy: f64,
    pub enstrophy: f64,
    pub omega_max: f64,
    pub q_l2: f64,
    pub q_max: f64,
    pub q_mean: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { energy: 1e-8, enstrophy: 1e-8, omega_max: 1e-8, q_l2: 1e-6, q_max: 1e-6, q_mean: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriftRow {
    pub quantity: &'static str,
    pub drift: f64,
    /// `None` when the quantity is reported but not asserted.
    pub tolerance: Option<f64>,
}

impl DriftRow {
    pub fn passed(&self) -> bool {
        self.tolerance.map_or(true, |tol| self.drift <= tol)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConservationReport {
    pub rows: Vec<DriftRow>,
}

impl ConservationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(DriftRow::passed)
    }

    pub fn row(&self, quantity: &str) -> Option<&DriftRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    pub fn to_table(&self) -> String {
        let mut s = format!("{:<12} {:>12} {:>12}  verdict\n", "quantity", "drift", "tolerance");
        for r in &self.rows {
            let tol = r.tolerance.map_or("-".to_string(), |t| format!("{t:.1e}"));
            let verdict = match r.tolerance {
                None => "report",
                Some(_) if r.passed() => "pass",
                Some(_) => "FAIL",
            };
            writeln!(s, "{:<12} {:>12.3e} {:>12}  {verdict}", r.quantity, r.drift, tol).unwrap();
        }
        s
    }
}

fn relative_drift(series: &[DiagnosticsRecord], f: impl Fn(&DiagnosticsRecord) -> Option<f64>) -> f64 {
    let Some(x0) = series.first().and_then(&f) else { return 0.0 };
    let scale = if x0 == 0.0 { 1.0 } else { x0.abs() };
    series
        .iter()
        .filter_map(&f)
        .map(|x| (x - x0).abs() / scale)
        .fold(0.0, f64::max)
}

fn absolute_drift(series: &[DiagnosticsRecord], f: impl Fn(&DiagnosticsRecord) -> Option<f64>) -> f64 {
    let Some(x0) = series.first().and_then(&f) else { return 0.0 };
    series.iter().filter_map(&f).map(|x| (x - x0).abs()).fold(0.0, f64::max)
}

/// Drift report for the quantities the model conserves. Euler asserts energy,
/// enstrophy and `‖ω‖_∞`; Euler-α asserts `q_mean` for every ν and the
/// L² and sup norms of q only when ν = 0. Everything else is reported.
pub fn assert_conservation(
    series: &[DiagnosticsRecord],
    model: Model,
    nu: f64,
    tol: &Tolerances,
) -> ConservationReport {
    let euler = model == Model::Euler;
    let inviscid_alpha = model == Model::EulerAlpha && nu == 0.0;
    let pick = |assert: bool, t: f64| assert.then_some(t);
    let mut rows = vec![
        DriftRow {
            quantity: "energy",
            drift: relative_drift(series, |r| Some(r.energy)),
            tolerance: pick(euler, tol.energy),
        },
        DriftRow {
            quantity: "enstrophy",
            drift: relative_drift(series, |r| Some(r.enstrophy)),
            tolerance: pick(euler, tol.enstrophy),
        },
        DriftRow {
            quantity: "omega_max",
            drift: relative_drift(series, |r| Some(r.omega_max)),
            tolerance: pick(euler, tol.omega_max),
        },
    ];
    if model == Model::EulerAlpha {
        rows.push(DriftRow {
            quantity: "q_mean",
            drift: absolute_drift(series, |r| r.q_mean),
            tolerance: Some(tol.q_mean),
        });
        rows.push(DriftRow {
            quantity: "q_l2",
            drift: relative_drift(series, |r| r.q_l2),
            tolerance: pick(inviscid_alpha, tol.q_l2),
        });
        rows.push(DriftRow {
            quantity: "q_max",
            drift: relative_drift(series, |r| r.q_max),
            tolerance: pick(inviscid_alpha, tol.q_max),
        });
    }
    ConservationReport { rows }
}

/// Both sides of the integrated growth inequality for the tangent monitor:
/// `ln(monitor(t)/monitor(0))` against `∫(‖∇u‖_∞ + ‖u‖_{H^s}) dt`
/// (trapezoidal in the sample times). Returned as `(t, lhs, rhs)`; this is a
/// soft diagnostic, the constant in the inequality being unknown.
pub fn growth_budget(series: &[DiagnosticsRecord]) -> Vec<(f64, f64, f64)> {
    let Some(first) = series.first() else { return Vec::new() };
    let mut integral = 0.0;
    let mut out = vec![(first.t, 0.0, 0.0)];
    for w in series.windows(2) {
        let rate = |r: &DiagnosticsRecord| r.grad_u_max + r.hs_norm;
        integral += 0.5 * (w[1].t - w[0].t) * (rate(&w[0]) + rate(&w[1]));
        out.push((w[1].t, (w[1].tangent_monitor / first.tangent_monitor).ln(), integral));
    }
    out
}
