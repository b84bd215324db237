use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linsolve::SolverConfig;

/// Physical constants and numerical controls of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Mobility `M`.
    pub mobility: f64,
    /// Mixing coefficient `lambda`.
    pub lambda: f64,
    /// Viscosity `nu`.
    pub nu: f64,
    /// Interface width `epsilon`.
    pub epsilon: f64,
    /// Stabilization constant `gamma` split off the double well.
    pub gamma: f64,
    /// Shift of the phase-field auxiliary variable.
    pub c1: f64,
    /// Shift of the kinetic auxiliary variable.
    pub c2: f64,
    pub tau: f64,
    pub t_final: f64,
    #[serde(skip, default)]
    pub solver: SolverConfig,
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("mobility", self.mobility),
            ("lambda", self.lambda),
            ("nu", self.nu),
            ("epsilon", self.epsilon),
            ("gamma", self.gamma),
            ("c1", self.c1),
            ("c2", self.c2),
            ("tau", self.tau),
            ("t_final", self.t_final),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.tau > self.t_final * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "tau = {} exceeds the final time {}",
                self.tau, self.t_final
            )));
        }
        self.solver.validate()
    }

    /// The shift condition `C1 > gamma` from the auxiliary-variable setup.
    pub fn check_shift_constraint(&self) -> Result<()> {
        if self.c1 > self.gamma {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "c1 = {} must exceed gamma = {}",
                self.c1, self.gamma
            )))
        }
    }

    /// Ginzburg-Landau double well `G(phi) = (phi^2 - 1)^2 / (4 eps^2)`.
    pub fn double_well(&self, phi: f64) -> f64 {
        let s = phi * phi - 1.0;
        s * s / (4.0 * self.epsilon * self.epsilon)
    }

    pub fn double_well_derivative(&self, phi: f64) -> f64 {
        (phi * phi * phi - phi) / (self.epsilon * self.epsilon)
    }

    /// `F(phi) = G(phi) - gamma/2 phi^2`.
    pub fn potential(&self, phi: f64) -> f64 {
        self.double_well(phi) - 0.5 * self.gamma * phi * phi
    }

    /// `F'(phi) = (phi^3 - phi)/eps^2 - gamma phi`.
    pub fn potential_derivative(&self, phi: f64) -> f64 {
        self.double_well_derivative(phi) - self.gamma * phi
    }

    pub fn num_steps(&self) -> usize {
        (self.t_final / self.tau).round().max(1.0) as usize
    }

    /// Manufactured-solution setup: `M = lambda = 1e-3, eps = 0.04, nu = 0.1,
    /// C1 = C2 = 0.1, gamma = 1, T = 0.1`; `tau` is set per level.
    pub fn convergence_preset() -> Self {
        Params {
            mobility: 1e-3,
            lambda: 1e-3,
            nu: 0.1,
            epsilon: 0.04,
            gamma: 1.0,
            c1: 0.1,
            c2: 0.1,
            tau: 0.1 / 64.0,
            t_final: 0.1,
            solver: SolverConfig::default(),
        }
    }

    /// Spinodal coarsening from small random data.
    pub fn coarsening_preset() -> Self {
        Params {
            mobility: 1e-4,
            lambda: 0.02,
            nu: 1.0,
            epsilon: 0.01,
            gamma: 1.0,
            c1: 1.0,
            c2: 0.1,
            tau: 1e-3,
            t_final: 5.0,
            solver: SolverConfig::default(),
        }
    }

    /// Shape relaxation under a rotating boundary flow.
    pub fn relaxation_preset() -> Self {
        Params {
            mobility: 1e-3,
            lambda: 0.1,
            nu: 1.0,
            epsilon: 0.01,
            gamma: 1.0,
            c1: 1.0,
            c2: 0.1,
            tau: 1e-3,
            t_final: 0.5,
            solver: SolverConfig::default(),
        }
    }
}
