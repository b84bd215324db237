//! Sparse storage and the Krylov solvers used by the time stepper.

pub mod csr;
pub mod krylov;
pub mod vecops;

pub use csr::{spmv, CsrMatrix};
pub use krylov::{
    solve_general, solve_neumann_zero_mean, solve_spd, Method, SolveStats, SolverConfig,
};
