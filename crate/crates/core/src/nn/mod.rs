//! Minimal differentiable-operation kernel.
//!
//! Exactly the pieces the detector needs: dense tensors, 1-D convolution,
//! linear layers, relu/max-pool/softmax, the two losses, Adam, a
//! finite-difference gradient checker and a binary checkpoint format. Each
//! layer implements an explicit forward/backward pair; there is no autodiff
//! graph.

mod adam;
mod checkpoint;
mod gradcheck;
mod loss;
mod ops;
mod tensor;

pub use adam::Adam;
pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use gradcheck::grad_check;
pub use loss::{bce_loss, bce_loss_grad, l1_loss, l1_loss_grad};
pub use ops::{
    max_pool1d, max_pool1d_backward, relu, relu_backward, softmax, softmax_backward, Conv1d,
    Linear,
};
pub use tensor::{Parameter, Tensor};
