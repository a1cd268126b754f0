//! Dense tensors, the recorded compute graph with reverse-mode gradients,
//! and the Adam optimizer step.

mod adam;
mod array;
pub mod gradcheck;
pub mod kernels;
mod graph;
mod scalar;


pub use adam::{adam_step, AdamState, ParamSet};
pub use array::{same_shape, Tensor};
pub use graph::{Graph, LstmCellIds, NodeId};
pub use scalar::Scalar;
