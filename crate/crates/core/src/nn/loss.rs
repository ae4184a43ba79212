//! Classification and regression losses.

use crate::error::{Error, Result};
use crate::scalar::Real;

fn check_targets<T: Real>(targets: &[T]) -> Result<()> {
    if targets.iter().any(|&t| t != T::zero() && t != T::one()) {
        return Err(Error::InvalidArgument(
            "bce targets must be exactly 0 or 1".into(),
        ));
    }
    Ok(())
}

/// Mean binary cross entropy on logits, in the numerically stable form
/// `max(z,0) - z*t + ln(1 + exp(-|z|))`.
pub fn bce_loss<T: Real>(logits: &[T], targets: &[T]) -> Result<T> {
    Ok(bce_loss_grad(logits, targets)?.0)
}

/// Loss plus `dL/dlogits` (`(sigmoid(z) - t) / n`).
pub fn bce_loss_grad<T: Real>(logits: &[T], targets: &[T]) -> Result<(T, Vec<T>)> {
    if logits.len() != targets.len() {
        return Err(Error::Shape(format!(
            "bce: {} logits vs {} targets",
            logits.len(),
            targets.len()
        )));
    }
    if logits.is_empty() {
        return Err(Error::Shape("bce on empty input".into()));
    }
    check_targets(targets)?;
    let inv_n = T::one() / T::from_f64(logits.len() as f64);
    let mut loss = T::zero();
    let mut grad = Vec::with_capacity(logits.len());
    for (&z, &t) in logits.iter().zip(targets) {
        let pos = if z > T::zero() { z } else { T::zero() };
        loss += pos - z * t + (T::one() + (-z.abs()).exp()).ln();
        let sig = T::one() / (T::one() + (-z).exp());
        grad.push((sig - t) * inv_n);
    }
    Ok((loss * inv_n, grad))
}

/// Masked mean absolute error: `sum(|pred - target| * mask) / max(1, #mask)`.
pub fn l1_loss<T: Real>(pred: &[T], target: &[T], mask: &[T]) -> Result<T> {
    Ok(l1_loss_grad(pred, target, mask)?.0)
}

/// Loss plus `dL/dpred` (`sign(pred - target) * mask / max(1, #mask)`).
pub fn l1_loss_grad<T: Real>(pred: &[T], target: &[T], mask: &[T]) -> Result<(T, Vec<T>)> {
    if pred.len() != target.len() || pred.len() != mask.len() {
        return Err(Error::Shape(format!(
            "l1: pred {} / target {} / mask {}",
            pred.len(),
            target.len(),
            mask.len()
        )));
    }
    check_targets(mask)?;
    let count = mask.iter().filter(|&&m| m == T::one()).count();
    let denom = T::from_f64(count.max(1) as f64);
    let inv = T::one() / denom;
    let mut loss = T::zero();
    let mut grad = Vec::with_capacity(pred.len());
    for ((&p, &t), &m) in pred.iter().zip(target).zip(mask) {
        let d = p - t;
        loss += d.abs() * m;
        let s = if d > T::zero() {
            T::one()
        } else if d < T::zero() {
            -T::one()
        } else {
            T::zero()
        };
        grad.push(s * m * inv);
    }
    Ok((loss * inv, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bce_known_values() {
        // sigmoid(0) = 0.5 -> ln 2.
        let (loss, _) = bce_loss_grad(&[0.0f64], &[1.0]).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
        // Saturated positive logit: tiny but finite.
        let loss = bce_loss(&[20.0f64], &[1.0]).unwrap();
        assert!((loss - 2.061_153_620_314_380_7e-9).abs() < 1e-20);
        assert!(loss.is_finite());
    }

    #[test]
    fn bce_finite_on_extreme_logits() {
        for z in [-1e4f64, -500.0, 500.0, 1e4] {
            for t in [0.0, 1.0] {
                let loss = bce_loss(&[z], &[t]).unwrap();
                assert!(loss.is_finite(), "z={z} t={t} loss={loss}");
            }
        }
    }

    #[test]
    fn bce_rejects_soft_targets() {
        assert!(bce_loss(&[0.0f64], &[0.5]).is_err());
    }

    #[test]
    fn l1_examples() {
        let full = [1.0f64, 1.0];
        assert_eq!(l1_loss(&[2.0, -3.0], &[2.0, -3.0], &full).unwrap(), 0.0);
        // All-masked-out input hits the max(1, count) guard.
        assert_eq!(l1_loss(&[5.0, 5.0], &[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(l1_loss(&[1.0, -1.0], &[0.0, 0.0], &full).unwrap(), 1.0);
    }
}
