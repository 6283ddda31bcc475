use super::{Matrix, NnError};

/// Huber threshold used by the quantile regression loss.
pub const HUBER_KAPPA: f64 = 1.0;

/// Quantile Huber loss `|tau - 1{u<0}| * L_kappa(u) / kappa` and its
/// derivative with respect to the residual `u`.
pub fn quantile_huber(u: f64, tau: f64, kappa: f64) -> (f64, f64) {
    let weight = (tau - if u < 0.0 { 1.0 } else { 0.0 }).abs();
    if u.abs() <= kappa {
        (weight * 0.5 * u * u / kappa, weight * u / kappa)
    } else {
        (
            weight * (u.abs() - 0.5 * kappa),
            weight * u.signum(),
        )
    }
}

/// Quantile regression loss over an `N x N'` matrix of pairwise TD errors,
/// where row `i` belongs to quantile fraction `taus[i]`. Summed over `i`,
/// averaged over `j`. Returns the gradient with respect to each TD error.
pub fn iqn_loss(deltas: &Matrix, taus: &[f64]) -> Result<(f64, Matrix), NnError> {
    if deltas.rows() != taus.len() {
        return Err(NnError::Shape(format!(
            "{} TD rows but {} quantile fractions",
            deltas.rows(),
            taus.len()
        )));
    }
    let n_prime = deltas.cols();
    if n_prime == 0 {
        return Err(NnError::Shape("no target quantiles".into()));
    }
    let scale = 1.0 / n_prime as f64;
    let mut grad = Matrix::zeros(deltas.rows(), n_prime);
    let mut total = 0.0;
    for (i, &tau) in taus.iter().enumerate() {
        for j in 0..n_prime {
            let (l, d) = quantile_huber(deltas[(i, j)], tau, HUBER_KAPPA);
            total += l;
            grad[(i, j)] = d * scale;
        }
    }
    Ok((total * scale, grad))
}

/// Mean squared TD error and its gradient with respect to the predictions.
pub fn dqn_loss(predicted: &[f64], targets: &[f64]) -> Result<(f64, Vec<f64>), NnError> {
    if predicted.len() != targets.len() || predicted.is_empty() {
        return Err(NnError::Shape(format!(
            "{} predictions vs {} targets",
            predicted.len(),
            targets.len()
        )));
    }
    let n = predicted.len() as f64;
    let mut loss = 0.0;
    let grad = predicted
        .iter()
        .zip(targets)
        .map(|(q, t)| {
            let e = q - t;
            loss += e * e;
            2.0 * e / n
        })
        .collect();
    Ok((loss / n, grad))
}
