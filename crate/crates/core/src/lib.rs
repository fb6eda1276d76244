//! Dynamic mode decomposition on tensor-train snapshot data.
//!
//! Snapshot tensors `X`, `Y` (snapshot axis last) are held in TT-format. The
//! pseudoinverse of the snapshot unfolding of `X` is obtained directly from
//! its cores, the reduced operator is assembled from core contractions, and
//! DMD modes come back as tensor trains with a replaced last core. The dense
//! algorithms live alongside as a reference path.

pub mod dmd;
pub mod error;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod pinv;
pub mod sweep;
pub mod synth;
pub mod tt;

pub use error::{Result, TtError};
pub use num_complex::Complex64;
