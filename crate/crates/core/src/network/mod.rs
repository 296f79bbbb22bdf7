//! The single-hidden-layer network
//! `o = f_o(W2 · f_h(W1 · x + b1) + b2)`, its cost functions and their exact
//! gradients.

mod activation;
mod backward;
mod forward;
mod loss;
mod params;

pub use activation::Activation;
pub use backward::{
    backward, backward_cross_entropy, backward_pairwise, loss_and_gradient, Gradients,
    SparseColumns,
};
pub use forward::{forward, Dropout, ForwardTrace};
pub use loss::{
    cross_entropy_from_logit, log_loss, loss_cross_entropy, loss_pairwise, LabelWeighting,
    LossConfig, LossKind, OpCounter, CE_CLAMP,
};
pub use params::{Block, Dims, NetworkParams};
