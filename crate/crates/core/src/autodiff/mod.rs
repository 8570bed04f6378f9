//! Dense reverse-mode automatic differentiation.
//!
//! A [`Tape`] records primitives as they execute and differentiates a scalar
//! output with respect to every node marked `requires_grad`. Values are
//! `f64` throughout. Stochastic primitives are absent: dropout takes a mask
//! drawn by the caller, which keeps a tape a pure function of its inputs.

mod check;
mod tape;
mod tensor;

pub use check::finite_difference_check;
pub use tape::{sigmoid, Tape, Var};
pub(crate) use tape::dot;
pub use tensor::Tensor;
