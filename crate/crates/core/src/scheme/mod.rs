//! The two-auxiliary-variable pressure-correction time stepper.
//!
//! One step solves two Cahn-Hilliard systems and three momentum systems
//! with shared matrices, reduces the auxiliary variables `r` and `rho` to a
//! scalar quadratic, and finishes with a pressure correction.

pub mod params;
mod state;
mod step;
#[cfg(test)]
mod tests;

pub use params::Params;
pub use state::{
    dissipation, energy_identity_residual, init_state, modified_energy, shift_to_zero_mean, State,
};
pub use step::{
    build_operators, quadratic_roots, Boundary, ChPart, EquationResiduals, Forcing, Operators,
    Projection, Reduction, ScalarField, SchemeOptions, SolverCounts, StepLoads, StepReport,
    Stepper, VectorField,
};
