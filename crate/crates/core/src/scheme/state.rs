use serde::{Deserialize, Serialize};

use super::Params;
use crate::assembly::Discretization;
use crate::error::{Error, Result};
use crate::linsolve::vecops::{dot, sub};

/// Discrete unknowns after step `step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub step: usize,
    pub time: f64,
    pub phi: Vec<f64>,
    pub mu: Vec<f64>,
    pub u_tilde: Vec<f64>,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub r: f64,
    pub rho: f64,
}

/// Remove the mass-weighted mean so that `int p_h = 0`.
pub fn shift_to_zero_mean(disc: &Discretization, p: &mut [f64]) {
    let mean = disc.p1_integral(p) / disc.mesh.rect.area();
    p.iter_mut().for_each(|v| *v -= mean);
}

impl State {
    /// Build the initial state from coefficient vectors. `mu` is taken as
    /// given; `p` is shifted to zero mean; `r`, `rho` come from the discrete
    /// energies and `u_tilde = u`.
    pub fn from_coefficients(
        disc: &Discretization,
        params: &Params,
        phi: Vec<f64>,
        mu: Vec<f64>,
        u: Vec<f64>,
        mut p: Vec<f64>,
    ) -> Result<Self> {
        disc.p1.check("init_state: phi", &phi)?;
        disc.p1.check("init_state: mu", &mu)?;
        disc.p1.check("init_state: p", &p)?;
        disc.velocity.check("init_state: u", &u)?;
        let e = disc
            .compute_discrete_energies(&phi, &u, params)
            .map_err(|e| match e {
                Error::StateCorruption(msg) => {
                    Error::InvalidArgument(format!("initial data: {msg}"))
                }
                other => other,
            })?;
        shift_to_zero_mean(disc, &mut p);
        Ok(State {
            step: 0,
            time: 0.0,
            phi,
            mu,
            u_tilde: u.clone(),
            u,
            p,
            r: e.e1.sqrt(),
            rho: e.e2.sqrt(),
        })
    }

    pub fn check(&self, disc: &Discretization) -> Result<()> {
        disc.p1.check("state: phi", &self.phi)?;
        disc.p1.check("state: mu", &self.mu)?;
        disc.p1.check("state: p", &self.p)?;
        disc.velocity.check("state: u", &self.u)?;
        disc.velocity.check("state: u_tilde", &self.u_tilde)?;
        if !(self.r > 0.0 && self.rho > 0.0) {
            return Err(Error::StateCorruption(format!(
                "auxiliary variables must be positive (r = {}, rho = {})",
                self.r, self.rho
            )));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        [&self.phi, &self.mu, &self.u, &self.u_tilde, &self.p]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()))
            && self.r.is_finite()
            && self.rho.is_finite()
    }
}

/// Interpolate analytic initial data. `mu` defaults to `phi`'s chemical
/// potential computed by the caller; pass it explicitly.
pub fn init_state(
    disc: &Discretization,
    params: &Params,
    phi0: impl Fn(f64, f64) -> f64,
    mu0: impl Fn(f64, f64) -> f64,
    u0: impl Fn(f64, f64) -> [f64; 2],
    p0: impl Fn(f64, f64) -> f64,
) -> Result<State> {
    State::from_coefficients(
        disc,
        params,
        disc.p1.interpolate(phi0)?,
        disc.p1.interpolate(mu0)?,
        disc.velocity.interpolate_vector(u0)?,
        disc.p1.interpolate(p0)?,
    )
}

/// `lambda |grad phi|^2 + lambda gamma |phi|^2 + 2 lambda r^2 + 1/2 |u|^2
/// + tau^2 |grad p|^2 + rho^2`.
pub fn modified_energy(disc: &Discretization, params: &Params, state: &State) -> f64 {
    let f = &disc.forms;
    let l = params.lambda;
    l * f.stiffness_p1.bilinear(&state.phi, &state.phi)
        + l * params.gamma * f.mass_p1.bilinear(&state.phi, &state.phi)
        + 2.0 * l * state.r * state.r
        + 0.5 * f.mass_v.bilinear(&state.u, &state.u)
        + params.tau * params.tau * f.stiffness_p1.bilinear(&state.p, &state.p)
        + state.rho * state.rho
}

/// `2 M tau |grad mu^{n+1}|^2 + 2 nu tau |grad u_tilde^{n+1}|^2`.
pub fn dissipation(disc: &Discretization, params: &Params, next: &State) -> f64 {
    let f = &disc.forms;
    2.0 * params.tau
        * (params.mobility * f.stiffness_p1.bilinear(&next.mu, &next.mu)
            + params.nu * f.stiffness_v.bilinear(&next.u_tilde, &next.u_tilde))
}

/// Signed defect of the discrete energy equality of one unforced step with
/// no-slip walls.
///
/// The equality is the sum of the phase equation tested with `2 tau mu`, the
/// chemical-potential equation tested with `-2 (phi^{n+1} - phi^n)`, the
/// `r` equation times `4 lambda tau r^{n+1}`, the momentum equation tested
/// with `2 tau u_tilde` and the `rho` equation times `tau`:
///
/// ```text
/// lambda (|grad phi'|^2 - |grad phi|^2 + |grad dphi|^2)
///   + lambda gamma (|phi'|^2 - |phi|^2 + |dphi|^2)
///   + 2 lambda (r'^2 - r^2 + dr^2) + rho'^2 - rho^2 + drho^2
///   + 1/2 (|u~|^2 - |u|^2 + |u~ - u|^2) + 2 tau (grad p, u~) + D = 0
/// ```
///
/// Every term is available from the two states, so the defect measures how
/// well the step satisfied its equations. The projection step is not part
/// of the equality.
pub fn energy_identity_residual(
    disc: &Discretization,
    params: &Params,
    prev: &State,
    next: &State,
) -> Result<f64> {
    let f = &disc.forms;
    let l = params.lambda;
    let dphi = sub(&next.phi, &prev.phi);
    let du = sub(&next.u_tilde, &prev.u);
    let kq = |m: &crate::linsolve::CsrMatrix, a: &[f64], b: &[f64], d: &[f64]| {
        m.bilinear(a, a) - m.bilinear(b, b) + m.bilinear(d, d)
    };
    let dr = next.r - prev.r;
    let drho = next.rho - prev.rho;
    let grad_p = disc.grad_p_load(&prev.p)?;
    Ok(l * kq(&f.stiffness_p1, &next.phi, &prev.phi, &dphi)
        + l * params.gamma * kq(&f.mass_p1, &next.phi, &prev.phi, &dphi)
        + 2.0 * l * (next.r * next.r - prev.r * prev.r + dr * dr)
        + (next.rho * next.rho - prev.rho * prev.rho + drho * drho)
        + 0.5 * kq(&f.mass_v, &next.u_tilde, &prev.u, &du)
        + 2.0 * params.tau * dot(&grad_p, &next.u_tilde)
        + dissipation(disc, params, next))
}
