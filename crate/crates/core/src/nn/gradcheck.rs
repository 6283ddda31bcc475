//! Central finite-difference verification of analytic gradients.

use super::{Gradients, Parameterized};

/// Default perturbation for central differences.
pub const FD_STEP: f64 = 1e-5;

/// Magnitude below which gradient components are compared absolutely.
const ABS_FLOOR: f64 = 1e-6;

/// One-sided slopes differing by more than this (relative) mark a kink
/// inside the perturbation window; such coordinates are skipped.
pub const KINK_THRESHOLD: f64 = 2e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    /// Worst relative error over the smooth coordinates.
    pub worst: f64,
    pub checked: usize,
    /// Coordinates skipped because the loss is not differentiable within
    /// one step of the current point (typically a ReLU switching).
    pub kinks: usize,
}

impl GradCheck {
    pub fn kink_fraction(&self) -> f64 {
        self.kinks as f64 / (self.checked + self.kinks).max(1) as f64
    }
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(ABS_FLOOR)
}

/// Worst relative error between `analytic` and central differences of `loss`
/// over every parameter. The model is restored before returning.
pub fn finite_difference_check<M, F>(model: &mut M, loss: F, analytic: &Gradients, step: f64) -> GradCheck
where
    M: Parameterized,
    F: Fn(&M) -> f64,
{
    let coords: Vec<(usize, usize)> = analytic
        .0
        .iter()
        .enumerate()
        .flat_map(|(t, g)| (0..g.len()).map(move |i| (t, i)))
        .collect();
    check_coords(model, &loss, analytic, step, &coords)
}

/// Like [`finite_difference_check`] but only over every `stride`-th parameter,
/// starting at `offset`. Useful for full-width networks.
pub fn finite_difference_check_strided<M, F>(
    model: &mut M,
    loss: F,
    analytic: &Gradients,
    step: f64,
    stride: usize,
    offset: usize,
) -> GradCheck
where
    M: Parameterized,
    F: Fn(&M) -> f64,
{
    let coords: Vec<(usize, usize)> = analytic
        .0
        .iter()
        .enumerate()
        .flat_map(|(t, g)| (0..g.len()).map(move |i| (t, i)))
        .skip(offset)
        .step_by(stride.max(1))
        .collect();
    check_coords(model, &loss, analytic, step, &coords)
}

fn check_coords<M, F>(
    model: &mut M,
    loss: &F,
    analytic: &Gradients,
    step: f64,
    coords: &[(usize, usize)],
) -> GradCheck
where
    M: Parameterized,
    F: Fn(&M) -> f64,
{
    let mut report = GradCheck { worst: 0.0, checked: 0, kinks: 0 };
    let centre = loss(model);
    for &(t, i) in coords {
        let original = model.param_slices()[t][i];
        model.param_slices_mut()[t][i] = original + step;
        let up = loss(model);
        model.param_slices_mut()[t][i] = original - step;
        let down = loss(model);
        model.param_slices_mut()[t][i] = original;
        if relative_error((up - centre) / step, (centre - down) / step) > KINK_THRESHOLD {
            report.kinks += 1;
            continue;
        }
        let numeric = (up - down) / (2.0 * step);
        report.worst = report.worst.max(relative_error(analytic.0[t][i], numeric));
        report.checked += 1;
    }
    report
}
