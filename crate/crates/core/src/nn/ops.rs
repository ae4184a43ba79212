//! Layers and activation functions with explicit forward/backward pairs.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::tensor::{Parameter, Tensor};

/// Uniform Glorot initialization in `±sqrt(6 / (fan_in + fan_out))`.
fn glorot<T: Real, R: Rng>(shape: Vec<usize>, fan_in: usize, fan_out: usize, rng: &mut R) -> Tensor<T> {
    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let n = shape.iter().product();
    let data = (0..n)
        .map(|_| T::from_f64(rng.gen_range(-bound..bound)))
        .collect();
    Tensor::from_vec(shape, data)
}

/// 1-D cross-correlation over `[c_in, L]` inputs.
#[derive(Debug, Clone)]
pub struct Conv1d<T: Real> {
    /// `[c_out, c_in, kernel]`
    pub weight: Parameter<T>,
    /// `[c_out]`
    pub bias: Parameter<T>,
    pub stride: usize,
    pub padding: usize,
}

impl<T: Real> Conv1d<T> {
    pub fn new<R: Rng>(
        c_in: usize,
        c_out: usize,
        kernel: usize,
        stride: usize,
        padding: usize,
        rng: &mut R,
    ) -> Self {
        Conv1d {
            weight: Parameter::new(glorot(
                vec![c_out, c_in, kernel],
                c_in * kernel,
                c_out * kernel,
                rng,
            )),
            bias: Parameter::new(Tensor::zeros(vec![c_out])),
            stride,
            padding,
        }
    }

    pub fn c_in(&self) -> usize {
        self.weight.value.shape()[1]
    }

    pub fn c_out(&self) -> usize {
        self.weight.value.shape()[0]
    }

    pub fn kernel(&self) -> usize {
        self.weight.value.shape()[2]
    }

    pub fn out_len(&self, input_len: usize) -> Result<usize> {
        let padded = input_len + 2 * self.padding;
        if padded < self.kernel() {
            return Err(Error::Shape(format!(
                "input length {} too short for kernel {}",
                input_len,
                self.kernel()
            )));
        }
        Ok((padded - self.kernel()) / self.stride + 1)
    }

    /// `[c_in, L] -> [c_out, L']`
    pub fn forward(&self, input: &Tensor<T>) -> Result<Tensor<T>> {
        let (c_in, len) = as_2d(input)?;
        if c_in != self.c_in() {
            return Err(Error::Shape(format!(
                "conv input has {} channels, expected {}",
                c_in,
                self.c_in()
            )));
        }
        let out_len = self.out_len(len)?;
        let (c_out, kernel) = (self.c_out(), self.kernel());
        let mut out = Tensor::zeros(vec![c_out, out_len]);
        let w = self.weight.value.data();
        for co in 0..c_out {
            let out_row = out.row_mut(co);
            out_row.fill(self.bias.value.data()[co]);
            for ci in 0..c_in {
                let x_row = input.row(ci);
                let w_base = (co * c_in + ci) * kernel;
                for k in 0..kernel {
                    let wv = w[w_base + k];
                    if self.stride == 1 {
                        // out[l] += w * x[l + k - padding]
                        let lo = self.padding.saturating_sub(k);
                        let hi = (len + self.padding - k).min(out_len);
                        let off = k as isize - self.padding as isize;
                        for l in lo..hi {
                            out_row[l] += wv * x_row[(l as isize + off) as usize];
                        }
                    } else {
                        for (l, o) in out_row.iter_mut().enumerate() {
                            let xi = l as isize * self.stride as isize + k as isize
                                - self.padding as isize;
                            if (0..len as isize).contains(&xi) {
                                *o += wv * x_row[xi as usize];
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Accumulates weight/bias gradients and returns the input gradient.
    pub fn backward(&mut self, input: &Tensor<T>, grad_out: &Tensor<T>) -> Result<Tensor<T>> {
        let (c_in, len) = as_2d(input)?;
        let (c_out, kernel) = (self.c_out(), self.kernel());
        let out_len = self.out_len(len)?;
        if grad_out.shape() != [c_out, out_len] {
            return Err(Error::Shape(format!(
                "conv grad shape {:?}, expected [{}, {}]",
                grad_out.shape(),
                c_out,
                out_len
            )));
        }
        let mut grad_in = Tensor::zeros(vec![c_in, len]);
        let gw = self.weight.grad.data_mut();
        let gb = self.bias.grad.data_mut();
        let w = self.weight.value.data();
        for co in 0..c_out {
            let go_row = grad_out.row(co);
            gb[co] += go_row.iter().fold(T::zero(), |acc, &g| acc + g);
            for ci in 0..c_in {
                let x_row = input.row(ci);
                let gi_row = grad_in.row_mut(ci);
                let w_base = (co * c_in + ci) * kernel;
                for k in 0..kernel {
                    let mut acc = T::zero();
                    let wv = w[w_base + k];
                    for (l, &g) in go_row.iter().enumerate() {
                        let xi =
                            l as isize * self.stride as isize + k as isize - self.padding as isize;
                        if (0..len as isize).contains(&xi) {
                            acc += g * x_row[xi as usize];
                            gi_row[xi as usize] += wv * g;
                        }
                    }
                    gw[w_base + k] += acc;
                }
            }
        }
        Ok(grad_in)
    }
}

/// Fully connected layer `y = W x + b`.
#[derive(Debug, Clone)]
pub struct Linear<T: Real> {
    /// `[out, in]`
    pub weight: Parameter<T>,
    /// `[out]`
    pub bias: Parameter<T>,
}

impl<T: Real> Linear<T> {
    pub fn new<R: Rng>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        Linear {
            weight: Parameter::new(glorot(vec![out_dim, in_dim], in_dim, out_dim, rng)),
            bias: Parameter::new(Tensor::zeros(vec![out_dim])),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weight.value.shape()[1]
    }

    pub fn out_dim(&self) -> usize {
        self.weight.value.shape()[0]
    }

    pub fn forward(&self, input: &[T], out: &mut [T]) {
        debug_assert_eq!(input.len(), self.in_dim());
        debug_assert_eq!(out.len(), self.out_dim());
        let w = self.weight.value.data();
        let b = self.bias.value.data();
        let d = self.in_dim();
        for (o, out_v) in out.iter_mut().enumerate() {
            let row = &w[o * d..(o + 1) * d];
            let mut acc = b[o];
            for (wv, xv) in row.iter().zip(input) {
                acc += *wv * *xv;
            }
            *out_v = acc;
        }
    }

    /// Accumulates gradients; adds the input gradient into `grad_in`.
    pub fn backward(&mut self, input: &[T], grad_out: &[T], grad_in: &mut [T]) {
        let d = self.in_dim();
        let w = self.weight.value.data();
        let gw = self.weight.grad.data_mut();
        let gb = self.bias.grad.data_mut();
        for (o, &g) in grad_out.iter().enumerate() {
            gb[o] += g;
            let w_row = &w[o * d..(o + 1) * d];
            let gw_row = &mut gw[o * d..(o + 1) * d];
            for i in 0..d {
                gw_row[i] += g * input[i];
                grad_in[i] += g * w_row[i];
            }
        }
    }
}

fn as_2d<T: Real>(t: &Tensor<T>) -> Result<(usize, usize)> {
    match t.shape() {
        [a, b] => Ok((*a, *b)),
        s => Err(Error::Shape(format!("expected 2-d tensor, got {s:?}"))),
    }
}

/// Elementwise `max(0, x)`.
pub fn relu<T: Real>(input: &Tensor<T>) -> Tensor<T> {
    let data = input
        .data()
        .iter()
        .map(|&v| if v > T::zero() { v } else { T::zero() })
        .collect();
    Tensor::from_vec(input.shape().to_vec(), data)
}

/// Routes gradients through positive inputs only.
pub fn relu_backward<T: Real>(input: &Tensor<T>, grad_out: &Tensor<T>) -> Tensor<T> {
    let data = input
        .data()
        .iter()
        .zip(grad_out.data())
        .map(|(&x, &g)| if x > T::zero() { g } else { T::zero() })
        .collect();
    Tensor::from_vec(input.shape().to_vec(), data)
}

/// Non-overlapping max pooling along the last axis of `[C, L]`; the trailing
/// remainder is dropped. Returns the pooled tensor and per-output argmax
/// indices into the input rows.
pub fn max_pool1d<T: Real>(input: &Tensor<T>, window: usize) -> Result<(Tensor<T>, Vec<usize>)> {
    let (c, len) = as_2d(input)?;
    if window == 0 {
        return Err(Error::InvalidArgument("pool window must be >= 1".into()));
    }
    let out_len = len / window;
    if out_len == 0 {
        return Err(Error::Shape(format!(
            "input length {len} shorter than pool window {window}"
        )));
    }
    let mut out = Tensor::zeros(vec![c, out_len]);
    let mut argmax = vec![0usize; c * out_len];
    for ci in 0..c {
        let x = input.row(ci);
        let o = out.row_mut(ci);
        for l in 0..out_len {
            let base = l * window;
            let mut best = base;
            for j in base + 1..base + window {
                if x[j] > x[best] {
                    best = j;
                }
            }
            o[l] = x[best];
            argmax[ci * out_len + l] = best;
        }
    }
    Ok((out, argmax))
}

/// Scatters gradients back to the argmax positions.
pub fn max_pool1d_backward<T: Real>(
    input_shape: &[usize],
    argmax: &[usize],
    grad_out: &Tensor<T>,
) -> Tensor<T> {
    let mut grad_in = Tensor::zeros(input_shape.to_vec());
    let (c, out_len) = (grad_out.shape()[0], grad_out.shape()[1]);
    for ci in 0..c {
        let g = grad_out.row(ci);
        let gi = grad_in.row_mut(ci);
        for l in 0..out_len {
            gi[argmax[ci * out_len + l]] += g[l];
        }
    }
    grad_in
}

/// Numerically safe softmax (max subtraction); output sums to 1.
pub fn softmax<T: Real>(input: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); input.len()];
    softmax_into(input, &mut out);
    out
}

pub(crate) fn softmax_into<T: Real>(input: &[T], out: &mut [T]) {
    debug_assert!(!input.is_empty());
    let max = input.iter().fold(input[0], |m, &v| if v > m { v } else { m });
    let mut sum = T::zero();
    for (o, &v) in out.iter_mut().zip(input) {
        let e = (v - max).exp();
        *o = e;
        sum += e;
    }
    let inv = T::one() / sum;
    for o in out.iter_mut() {
        *o *= inv;
    }
}

/// Gradient of softmax: `dx_i = y_i * (dy_i - sum_j y_j dy_j)`.
pub fn softmax_backward<T: Real>(output: &[T], grad_out: &[T]) -> Vec<T> {
    let dot = output
        .iter()
        .zip(grad_out)
        .fold(T::zero(), |acc, (&y, &g)| acc + y * g);
    output
        .iter()
        .zip(grad_out)
        .map(|(&y, &g)| y * (g - dot))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(42)
    }

    #[test]
    fn conv_identity_kernel() {
        let mut conv = Conv1d::<f64>::new(1, 1, 1, 1, 0, &mut rng());
        conv.weight.value = Tensor::from_vec(vec![1, 1, 1], vec![1.0]);
        conv.bias.value = Tensor::from_vec(vec![1], vec![0.0]);
        let x = Tensor::from_vec(vec![1, 4], vec![1.0, -2.0, 3.0, 0.5]);
        let y = conv.forward(&x).unwrap();
        assert_eq!(y.data(), x.data());
    }

    #[test]
    fn conv_box_kernel_hand_sum() {
        let mut conv = Conv1d::<f64>::new(1, 1, 3, 1, 0, &mut rng());
        conv.weight.value = Tensor::from_vec(vec![1, 1, 3], vec![1.0, 1.0, 1.0]);
        conv.bias.value = Tensor::from_vec(vec![1], vec![0.0]);
        let x = Tensor::from_vec(vec![1, 4], vec![1.0, 2.0, 3.0, 4.0]);
        let y = conv.forward(&x).unwrap();
        assert_eq!(y.shape(), &[1, 2]);
        assert_eq!(y.data(), &[6.0, 9.0]);
    }

    #[test]
    fn conv_rejects_mismatched_channels() {
        let conv = Conv1d::<f64>::new(2, 1, 3, 1, 0, &mut rng());
        let x = Tensor::from_vec(vec![1, 4], vec![0.0; 4]);
        assert!(conv.forward(&x).is_err());
    }

    #[test]
    fn linear_identity_and_hand_case() {
        let mut lin = Linear::<f64>::new(2, 2, &mut rng());
        lin.weight.value = Tensor::from_vec(vec![2, 2], vec![1.0, 0.0, 0.0, 1.0]);
        lin.bias.value = Tensor::from_vec(vec![2], vec![0.0, 0.0]);
        let mut out = [0.0; 2];
        lin.forward(&[3.0, -4.0], &mut out);
        assert_eq!(out, [3.0, -4.0]);

        lin.weight.value = Tensor::from_vec(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]);
        lin.bias.value = Tensor::from_vec(vec![2], vec![0.5, -0.5]);
        lin.forward(&[1.0, 1.0], &mut out);
        assert_eq!(out, [3.5, 6.5]);
    }

    #[test]
    fn relu_edge_cases() {
        let x = Tensor::from_vec(vec![1, 3], vec![-1.0, -0.5, -2.0]);
        assert!(relu(&x).data().iter().all(|&v| v == 0.0));
        let x = Tensor::from_vec(vec![1, 3], vec![1.0, 0.5, 2.0]);
        assert_eq!(relu(&x).data(), x.data());
    }

    #[test]
    fn max_pool_examples() {
        let x = Tensor::from_vec(vec![1, 4], vec![3.0, 1.0, 4.0, 1.0]);
        let (y, _) = max_pool1d(&x, 1).unwrap();
        assert_eq!(y.data(), x.data());
        let (y, arg) = max_pool1d(&x, 2).unwrap();
        assert_eq!(y.data(), &[3.0, 4.0]);
        assert_eq!(arg, vec![0, 2]);
    }

    #[test]
    fn softmax_examples() {
        let y = softmax(&[1.0f64; 5]);
        for v in &y {
            assert!((v - 0.2).abs() < 1e-15);
        }
        let y = softmax(&[0.0f64, 3.0f64.ln()]);
        assert!((y[0] - 0.25).abs() < 1e-15);
        assert!((y[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn softmax_shift_invariance_and_simplex() {
        let x = [0.3f64, -2.0, 5.5, 1.1];
        let shifted: Vec<f64> = x.iter().map(|v| v + 123.456).collect();
        let a = softmax(&x);
        let b = softmax(&shifted);
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
        let sum: f64 = a.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(a.iter().all(|&v| v > 0.0));
    }
}
