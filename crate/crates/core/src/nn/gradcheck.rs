//! Finite-difference verification harness.

/// Central-difference step; in f64 this balances truncation against
/// cancellation for losses of order one.
pub const GRAD_CHECK_EPS: f64 = 1e-5;

/// Compares an analytic gradient against central finite differences of a
/// scalar-valued function.
///
/// Perturbs `inputs` in place (restoring each entry) and returns the maximum
/// over entries of `|analytic - numeric| / max(1, |analytic|, |numeric|)`.
pub fn grad_check<F>(mut f: F, inputs: &mut [f64], analytic: &[f64]) -> f64
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(
        inputs.len(),
        analytic.len(),
        "one analytic gradient entry per input"
    );
    let mut worst = 0.0f64;
    for i in 0..inputs.len() {
        let saved = inputs[i];
        inputs[i] = saved + GRAD_CHECK_EPS;
        let plus = f(inputs);
        inputs[i] = saved - GRAD_CHECK_EPS;
        let minus = f(inputs);
        inputs[i] = saved;
        let numeric = (plus - minus) / (2.0 * GRAD_CHECK_EPS);
        let denom = 1.0f64.max(analytic[i].abs()).max(numeric.abs());
        worst = worst.max((analytic[i] - numeric).abs() / denom);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_gradient_matches() {
        let mut x = vec![0.5, -1.5, 2.0];
        let analytic: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let err = grad_check(|x| x.iter().map(|v| v * v).sum(), &mut x, &analytic);
        assert!(err < 1e-9, "err {err}");
    }

    #[test]
    fn broken_gradient_is_flagged() {
        let mut x = vec![0.5, -1.5, 2.0];
        // Deliberately wrong analytic gradient (factor 3 instead of 2).
        let analytic: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let err = grad_check(|x| x.iter().map(|v| v * v).sum(), &mut x, &analytic);
        assert!(err > 1e-2, "harness failed to flag the broken gradient");
    }
}
