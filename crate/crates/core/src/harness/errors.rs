use serde::{Deserialize, Serialize};

use super::mms::MmsCase;
use crate::assembly::{scalar_error_norms, vector_error_norms, Discretization, ErrorNorms};
use crate::error::Result;
use crate::scheme::State;

/// Errors of one convergence level.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub nx: usize,
    pub h: f64,
    pub tau: f64,
    pub steps: usize,
    /// `max_n |phi^n - phi(t^n)|`, `n = 0..N`.
    pub phi_linf_l2: f64,
    /// `sqrt(tau sum_n |mu^n - mu(t^n)|^2)`, `n = 1..N`.
    pub mu_l2_l2: f64,
    pub u_linf_l2: f64,
    pub p_l2_l2: f64,
    pub phi_h1: f64,
    pub mu_h1: f64,
    pub u_h1: f64,
    pub p_h1: f64,
    pub r_error: f64,
    pub rho_error: f64,
}

/// Observed orders `log2(e_coarse / e_fine)` between consecutive records.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RateRecord {
    pub phi_linf_l2: f64,
    pub mu_l2_l2: f64,
    pub u_linf_l2: f64,
    pub p_l2_l2: f64,
    pub phi_h1: f64,
    pub mu_h1: f64,
    pub u_h1: f64,
    pub p_h1: f64,
}

pub fn rate(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Rates between consecutive records. Records must share one `tau(h)` rule.
pub fn convergence_rates(records: &[ErrorRecord]) -> Vec<RateRecord> {
    records
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            RateRecord {
                phi_linf_l2: rate(a.phi_linf_l2, b.phi_linf_l2),
                mu_l2_l2: rate(a.mu_l2_l2, b.mu_l2_l2),
                u_linf_l2: rate(a.u_linf_l2, b.u_linf_l2),
                p_l2_l2: rate(a.p_l2_l2, b.p_l2_l2),
                phi_h1: rate(a.phi_h1, b.phi_h1),
                mu_h1: rate(a.mu_h1, b.mu_h1),
                u_h1: rate(a.u_h1, b.u_h1),
                p_h1: rate(a.p_h1, b.p_h1),
            }
        })
        .collect()
}

/// Errors of all fields of one state against the exact solution.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateErrors {
    pub phi: ErrorNorms,
    pub mu: ErrorNorms,
    pub u: ErrorNorms,
    pub p: ErrorNorms,
    pub r: f64,
    pub rho: f64,
}

pub fn state_errors(disc: &Discretization, case: &MmsCase, state: &State) -> Result<StateErrors> {
    let t = state.time;
    let phi = scalar_error_norms(
        &disc.p1,
        &state.phi,
        |x, y| case.phi(t, x, y),
        |x, y| case.grad_phi(t, x, y),
    )?;
    let mu = scalar_error_norms(
        &disc.p1,
        &state.mu,
        |x, y| case.mu(t, x, y),
        |x, y| case.grad_mu(t, x, y),
    )?;
    let p = scalar_error_norms(
        &disc.p1,
        &state.p,
        |x, y| case.p(t, x, y),
        |x, y| case.grad_p(t, x, y),
    )?;
    let u = vector_error_norms(
        &disc.velocity,
        &state.u,
        |x, y| case.u(t, x, y),
        |x, y| case.grad_u(t, x, y),
    )?;
    let (r_exact, rho_exact) = exact_auxiliaries(disc, case, t)?;
    Ok(StateErrors {
        phi,
        mu,
        u,
        p,
        r: (state.r - r_exact).abs(),
        rho: (state.rho - rho_exact).abs(),
    })
}

/// `sqrt(E1(phi(t)) + C1)` and `sqrt(1/2 |u(t)|^2 + C2)` by quadrature of
/// the analytic fields.
pub fn exact_auxiliaries(disc: &Discretization, case: &MmsCase, t: f64) -> Result<(f64, f64)> {
    let p = &case.params;
    let tab = disc.norm_tab();
    let mut e1 = 0.0;
    let mut e2 = 0.0;
    for k in 0..disc.num_triangles() {
        let g = disc.geometry(k);
        for q in 0..tab.rule.len() {
            let [x, y] = g.map(tab.rule.points[q]);
            let w = tab.rule.weights[q] * g.det;
            e1 += w * p.potential(case.phi(t, x, y));
            let u = case.u(t, x, y);
            e2 += w * 0.5 * (u[0] * u[0] + u[1] * u[1]);
        }
    }
    Ok(((e1 + p.c1).sqrt(), (e2 + p.c2).sqrt()))
}

/// Online accumulation of trajectory norms.
#[derive(Debug, Clone, Default)]
pub struct ErrorAccumulator {
    tau: f64,
    phi_max: f64,
    u_max: f64,
    mu_sq: f64,
    p_sq: f64,
    last: StateErrors,
    steps: usize,
}

impl ErrorAccumulator {
    pub fn new(tau: f64) -> Self {
        ErrorAccumulator {
            tau,
            ..Default::default()
        }
    }

    /// Record the errors of the state after step `step` (0 for the initial data).
    pub fn push(&mut self, step: usize, e: StateErrors) {
        self.phi_max = self.phi_max.max(e.phi.l2);
        self.u_max = self.u_max.max(e.u.l2);
        if step > 0 {
            self.mu_sq += self.tau * e.mu.l2 * e.mu.l2;
            self.p_sq += self.tau * e.p.l2 * e.p.l2;
        }
        self.steps = step;
        self.last = e;
    }

    pub fn finish(&self, nx: usize, h: f64) -> ErrorRecord {
        ErrorRecord {
            nx,
            h,
            tau: self.tau,
            steps: self.steps,
            phi_linf_l2: self.phi_max,
            mu_l2_l2: self.mu_sq.sqrt(),
            u_linf_l2: self.u_max,
            p_l2_l2: self.p_sq.sqrt(),
            phi_h1: self.last.phi.h1(),
            mu_h1: self.last.mu.h1(),
            u_h1: self.last.u.h1(),
            p_h1: self.last.p.h1(),
            r_error: self.last.r,
            rho_error: self.last.rho,
        }
    }
}
