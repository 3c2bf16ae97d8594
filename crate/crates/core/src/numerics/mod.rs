//! Small numerical kernels shared by the equilibrium solvers.

pub mod interp;
pub mod quad;
pub mod roots;

pub use interp::MonotoneCubic;
pub use quad::{integrate, QuadResult};
pub use roots::{bisect, NoSignChange};
