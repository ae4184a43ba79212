//! Adam with bias correction.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::tensor::Parameter;

/// Optimizer state shared across all parameters (the step counter); the
/// per-parameter moments live inside [`Parameter`].
#[derive(Debug, Clone)]
pub struct Adam<T: Real> {
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
    step: u64,
}

impl<T: Real> Default for Adam<T> {
    fn default() -> Self {
        Adam {
            beta1: T::from_f64(0.9),
            beta2: T::from_f64(0.999),
            epsilon: T::from_f64(1e-8),
            step: 0,
        }
    }
}

impl<T: Real> Adam<T> {
    /// One update over all parameters from their accumulated gradients.
    pub fn step(&mut self, params: &mut [&mut Parameter<T>], lr: T) -> Result<()> {
        if lr <= T::zero() {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be > 0, got {lr}"
            )));
        }
        self.step += 1;
        let t = self.step as i32;
        let bc1 = T::one() - self.beta1.powi(t);
        let bc2 = T::one() - self.beta2.powi(t);
        for p in params.iter_mut() {
            let g = p.grad.data();
            let m = p.adam_m.data_mut();
            for (m, &g) in m.iter_mut().zip(g) {
                *m = self.beta1 * *m + (T::one() - self.beta1) * g;
            }
            let v = p.adam_v.data_mut();
            for (v, &g) in v.iter_mut().zip(g) {
                *v = self.beta2 * *v + (T::one() - self.beta2) * g * g;
            }
            let m = p.adam_m.data();
            let v = p.adam_v.data();
            for ((x, &m), &v) in p.value.data_mut().iter_mut().zip(m).zip(v) {
                let m_hat = m / bc1;
                let v_hat = v / bc2;
                *x -= lr * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Tensor;

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut p = Parameter::new(Tensor::from_vec(vec![3], vec![1.0f64, -2.0, 0.5]));
        let before = p.value.clone();
        let mut adam = Adam::default();
        adam.step(&mut [&mut p], 0.001).unwrap();
        assert_eq!(p.value, before);
    }

    #[test]
    fn first_step_with_unit_gradient_moves_by_lr() {
        let mut p = Parameter::new(Tensor::scalar(1.0f64));
        p.grad = Tensor::scalar(1.0);
        let mut adam = Adam::default();
        adam.step(&mut [&mut p], 0.001).unwrap();
        // Bias-corrected first step: m_hat = v_hat = 1, so the update is
        // lr / (1 + eps) under the hood.
        let moved = 1.0 - p.value.data()[0];
        assert!((moved - 0.001).abs() < 1e-8, "moved {moved}");
    }

    #[test]
    fn rejects_non_positive_lr() {
        let mut p = Parameter::new(Tensor::scalar(1.0f64));
        let mut adam = Adam::default();
        assert!(adam.step(&mut [&mut p], 0.0).is_err());
        assert!(adam.step(&mut [&mut p], -1.0).is_err());
    }

    #[test]
    fn identical_runs_are_identical() {
        let run = || {
            let mut p = Parameter::new(Tensor::from_vec(vec![2], vec![0.3f32, -0.7]));
            let mut adam = Adam::default();
            for i in 0..25 {
                p.grad = Tensor::from_vec(vec![2], vec![0.1 * (i as f32), -0.05]);
                adam.step(&mut [&mut p], 0.01).unwrap();
            }
            p.value
        };
        assert_eq!(run(), run());
    }
}
