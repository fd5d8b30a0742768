use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Spectrum;

pub(super) fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    let mut planner = FftPlanner::new();
    (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
}

/// Unnormalized in-place 2D transform of a square array: rows, then columns
/// through a transpose.
pub(super) fn fft2(data: &mut Array2<Complex64>, plan: &Arc<dyn Fft<f64>>) {
    let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
    rows(data, plan, &mut scratch);
    let mut t = data.t().as_standard_layout().into_owned();
    rows(&mut t, plan, &mut scratch);
    data.assign(&t.t());
}

fn rows(data: &mut Array2<Complex64>, plan: &Arc<dyn Fft<f64>>, scratch: &mut [Complex64]) {
    let buf = data
        .as_slice_mut()
        .expect("fft input must be in standard layout");
    plan.process_with_scratch(buf, scratch);
}

/// Fourier-series coefficients of real samples on an arbitrary `m x m`
/// periodic lattice (no grid-size restrictions).
pub fn fft2_real(samples: &Array2<f64>) -> Spectrum {
    let (rows, cols) = samples.dim();
    assert_eq!(rows, cols, "fft2_real expects a square lattice");
    let (fwd, _) = plans(rows);
    let mut data = samples.mapv(|v| Complex64::new(v, 0.0));
    fft2(&mut data, &fwd);
    let scale = 1.0 / (rows * cols) as f64;
    data.mapv_inplace(|z| z * scale);
    data
}
