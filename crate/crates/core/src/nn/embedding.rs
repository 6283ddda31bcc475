use std::f64::consts::PI;

use super::{Matrix, NnError};

/// Width of the cosine quantile embedding.
pub const COSINE_FEATURES: usize = 64;

/// Row `k` holds `cos(pi * i * phi * tau_k)` for `i = 0..64`. The product
/// `phi * tau` is the CVaR distortion of the quantile fraction.
pub fn cosine_embedding(taus: &[f64], phi: f64) -> Result<Matrix, NnError> {
    if !(phi > 0.0 && phi <= 1.0) {
        return Err(NnError::InvalidArgument(format!(
            "CVaR threshold must lie in (0, 1], got {phi}"
        )));
    }
    if let Some(t) = taus.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(NnError::InvalidArgument(format!(
            "quantile fraction must lie in [0, 1], got {t}"
        )));
    }
    let mut out = Matrix::zeros(taus.len(), COSINE_FEATURES);
    for (k, &tau) in taus.iter().enumerate() {
        let scaled = PI * phi * tau;
        for (i, v) in out.row_mut(k).iter_mut().enumerate() {
            *v = (scaled * i as f64).cos();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_zero_is_all_ones() {
        let e = cosine_embedding(&[0.0], 0.3).unwrap();
        assert!(e.row(0).iter().all(|&v| v == 1.0));
    }

    #[test]
    fn first_column_is_one_and_values_bounded() {
        let taus: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
        let e = cosine_embedding(&taus, 0.77).unwrap();
        for k in 0..taus.len() {
            assert_eq!(e[(k, 0)], 1.0);
            assert!(e.row(k).iter().all(|v| (-1.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn half_quantile_first_harmonic() {
        let e = cosine_embedding(&[0.5], 1.0).unwrap();
        assert!(e[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_threshold_or_tau() {
        assert!(cosine_embedding(&[0.5], 0.0).is_err());
        assert!(cosine_embedding(&[0.5], 1.5).is_err());
        assert!(cosine_embedding(&[1.2], 1.0).is_err());
    }
}
