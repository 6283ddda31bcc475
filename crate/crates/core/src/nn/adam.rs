use serde::{Deserialize, Serialize};

use super::{Gradients, NnError, Parameterized};

/// Bias-corrected adaptive-moment optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step: u64,
    first_moment: Vec<Vec<f64>>,
    second_moment: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new<P: Parameterized + ?Sized>(model: &P, learning_rate: f64) -> Self {
        let shapes: Vec<Vec<f64>> = model.param_slices().iter().map(|s| vec![0.0; s.len()]).collect();
        Adam {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            first_moment: shapes.clone(),
            second_moment: shapes,
        }
    }

    pub fn apply<P: Parameterized + ?Sized>(
        &mut self,
        model: &mut P,
        grads: &Gradients,
    ) -> Result<(), NnError> {
        let mut params = model.param_slices_mut();
        if params.len() != grads.0.len() || params.len() != self.first_moment.len() {
            return Err(NnError::Shape(format!(
                "{} parameter tensors, {} gradients, {} moment buffers",
                params.len(),
                grads.0.len(),
                self.first_moment.len()
            )));
        }
        for ((p, g), m) in params.iter().zip(&grads.0).zip(&self.first_moment) {
            if p.len() != g.len() || p.len() != m.len() {
                return Err(NnError::Shape("gradient tensor size differs from parameter".into()));
            }
        }
        self.step += 1;
        let t = self.step as i32;
        let correction1 = 1.0 - self.beta1.powi(t);
        let correction2 = 1.0 - self.beta2.powi(t);
        let step_size = self.learning_rate / correction1;
        for (k, p) in params.iter_mut().enumerate() {
            let m = &mut self.first_moment[k];
            let v = &mut self.second_moment[k];
            for (i, g) in grads.0[k].iter().enumerate() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g;
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g * g;
                let v_hat = v[i] / correction2;
                p[i] -= step_size * m[i] / (v_hat.sqrt() + self.epsilon);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Scalar(Vec<f64>);

    impl Parameterized for Scalar {
        fn param_slices(&self) -> Vec<&[f64]> {
            vec![&self.0]
        }
        fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
            vec![&mut self.0]
        }
    }

    #[test]
    fn zero_gradient_is_noop() {
        let mut x = Scalar(vec![1.5, -2.0]);
        let mut opt = Adam::new(&x, 1e-3);
        opt.apply(&mut x, &Gradients(vec![vec![0.0, 0.0]])).unwrap();
        assert_eq!(x.0, vec![1.5, -2.0]);
    }

    #[test]
    fn minimizes_square() {
        let mut x = Scalar(vec![1.0]);
        let mut opt = Adam::new(&x, 0.01);
        let mut prev = 1.0f64;
        for step in 0..300 {
            let g = 2.0 * x.0[0];
            opt.apply(&mut x, &Gradients(vec![vec![g]])).unwrap();
            if step > 5 {
                assert!(x.0[0].abs() <= prev.abs() + 1e-12);
            }
            prev = x.0[0];
        }
        assert!(x.0[0].abs() < 0.1);
    }

    #[test]
    fn deterministic_and_checks_shape() {
        let mut a = Scalar(vec![0.3]);
        let mut b = Scalar(vec![0.3]);
        let mut oa = Adam::new(&a, 1e-4);
        let mut ob = oa.clone();
        let g = Gradients(vec![vec![0.7]]);
        oa.apply(&mut a, &g).unwrap();
        ob.apply(&mut b, &g).unwrap();
        assert_eq!(a.0, b.0);
        assert!(oa.apply(&mut a, &Gradients(vec![vec![0.1, 0.2]])).is_err());
    }
}
