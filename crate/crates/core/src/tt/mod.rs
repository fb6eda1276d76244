//! Tensor-train storage, conversion from full format, orthonormalization and
//! contractions.

mod contract;
mod decompose;
mod dense;
mod ortho;
mod shape;
mod train;

pub use contract::{contract_pair, tt_dot, tt_norm};
pub use decompose::{tt_svd, tt_svd_report, TtSvdReport};
pub use dense::DenseTensor;
pub(crate) use ortho::{left_step, right_step};
pub use shape::Shape;
pub use train::{chain_matrix, contract_left_vector, Core, OrthoState, TensorTrain};
