//! Semidefinite programming over complex Hermitian blocks and the
//! diamond-norm programs built on top of it.
//!
//! The solver handles the standard-form pair
//!
//! ```text
//! (P)  min ⟨C, X⟩   s.t.  ⟨A_i, X⟩ = b_i,  X ⪰ 0
//! (D)  max bᵀy      s.t.  C − Σ_i y_i A_i ⪰ 0
//! ```
//!
//! where `X`, `C`, `A_i` are block-diagonal Hermitian matrices and `⟨·,·⟩` is
//! the real trace inner product. Complex Hermitian blocks are handled
//! natively; a real-embedding transform of whole problems is provided as an
//! independent cross-check path.

mod diamond;
mod problem;
mod solver;

pub use diamond::{
    cptp_project, diamond_cs_check, diamond_lower_bound, diamond_norm, diamond_norm_positive,
    diamond_norm_via_dual, diamond_norm_with, DiamondMethod, DiamondValue,
};
pub use problem::{real_embed_problem, BlockMat, SdpConstraint, SdpProblem};
pub use solver::{solve_sdp, SdpSolution, SdpStatus, SolverOptions};
