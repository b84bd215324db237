//! Finite-difference cross-check of the manufactured forcing.
//!
//! First derivatives come from central differences of the analytic values
//! (space step `1e-5`, time step `1e-6`). Laplacians are central differences
//! of the analytic gradients, whose own agreement with the values is checked
//! separately; a second difference of the values at step `1e-5` would lose
//! about six digits to cancellation.

use super::mms::MmsCase;
use super::random::unit_stream;

pub const SPACE_STEP: f64 = 1e-5;
pub const TIME_STEP: f64 = 1e-6;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn d_dx(f: impl Fn(f64, f64) -> f64, x: f64, y: f64) -> [f64; 2] {
    let h = SPACE_STEP;
    [
        (f(x + h, y) - f(x - h, y)) / (2.0 * h),
        (f(x, y + h) - f(x, y - h)) / (2.0 * h),
    ]
}

fn d_dt(f: impl Fn(f64) -> f64, t: f64) -> f64 {
    (f(t + TIME_STEP) - f(t - TIME_STEP)) / (2.0 * TIME_STEP)
}

/// Divergence of a vector field by central differences.
fn div(f: impl Fn(f64, f64) -> [f64; 2], x: f64, y: f64) -> f64 {
    let h = SPACE_STEP;
    (f(x + h, y)[0] - f(x - h, y)[0] + f(x, y + h)[1] - f(x, y - h)[1]) / (2.0 * h)
}

/// Largest relative mismatch between the closed-form derivatives of the
/// case and central differences of its fields at `(t, x, y)`.
pub fn derivative_mismatch(case: &MmsCase, t: f64, x: f64, y: f64) -> f64 {
    let mut worst = 0.0f64;
    let mut acc = |a: f64, b: f64| worst = worst.max(rel(a, b));

    let g = d_dx(|x, y| case.phi(t, x, y), x, y);
    let e = case.grad_phi(t, x, y);
    acc(g[0], e[0]);
    acc(g[1], e[1]);
    let g = d_dx(|x, y| case.mu(t, x, y), x, y);
    let e = case.grad_mu(t, x, y);
    acc(g[0], e[0]);
    acc(g[1], e[1]);
    let g = d_dx(|x, y| case.p(t, x, y), x, y);
    let e = case.grad_p(t, x, y);
    acc(g[0], e[0]);
    acc(g[1], e[1]);
    let gu = case.grad_u(t, x, y);
    for c in 0..2 {
        let g = d_dx(|x, y| case.u(t, x, y)[c], x, y);
        acc(g[0], gu[c][0]);
        acc(g[1], gu[c][1]);
    }
    acc(d_dt(|s| case.phi(s, x, y), t), case.phi_t(t, x, y));
    let ut = case.u_t(t, x, y);
    for c in 0..2 {
        acc(d_dt(|s| case.u(s, x, y)[c], t), ut[c]);
    }
    acc(
        div(|x, y| case.grad_phi(t, x, y), x, y),
        case.lap_phi(t, x, y),
    );
    acc(
        div(|x, y| case.grad_mu(t, x, y), x, y),
        case.lap_mu(t, x, y),
    );
    let lu = case.lap_u(t, x, y);
    for c in 0..2 {
        acc(div(|x, y| case.grad_u(t, x, y)[c], x, y), lu[c]);
    }
    worst
}

/// `(g_phi, g_u)` assembled from finite differences only.
pub fn forcing_by_differences(case: &MmsCase, t: f64, x: f64, y: f64) -> (f64, [f64; 2]) {
    let m = case.params.mobility;
    let nu = case.params.nu;
    let phi_t = d_dt(|s| case.phi(s, x, y), t);
    let grad_phi = d_dx(|x, y| case.phi(t, x, y), x, y);
    let u = case.u(t, x, y);
    let lap_mu = div(|x, y| d_dx(|x, y| case.mu(t, x, y), x, y), x, y);
    let g_phi = phi_t + u[0] * grad_phi[0] + u[1] * grad_phi[1] - m * lap_mu;

    let grad_p = d_dx(|x, y| case.p(t, x, y), x, y);
    let mu = case.mu(t, x, y);
    let g_u = std::array::from_fn(|c| {
        let ut = d_dt(|s| case.u(s, x, y)[c], t);
        let gu = d_dx(|x, y| case.u(t, x, y)[c], x, y);
        let lap = div(|x, y| d_dx(|x, y| case.u(t, x, y)[c], x, y), x, y);
        ut + u[0] * gu[0] + u[1] * gu[1] - nu * lap + grad_p[c] - mu * grad_phi[c]
    });
    (g_phi, g_u)
}

/// Relative mismatch between the closed-form forcing and
/// [`forcing_by_differences`], using the analytic gradients only for the
/// Laplacians (see the module notes).
pub fn forcing_mismatch(case: &MmsCase, t: f64, x: f64, y: f64) -> f64 {
    let m = case.params.mobility;
    let nu = case.params.nu;
    let phi_t = d_dt(|s| case.phi(s, x, y), t);
    let grad_phi = d_dx(|x, y| case.phi(t, x, y), x, y);
    let u = case.u(t, x, y);
    let lap_mu = div(|x, y| case.grad_mu(t, x, y), x, y);
    let g_phi = phi_t + u[0] * grad_phi[0] + u[1] * grad_phi[1] - m * lap_mu;
    let grad_p = d_dx(|x, y| case.p(t, x, y), x, y);
    let mu = case.mu(t, x, y);
    let g_u: [f64; 2] = std::array::from_fn(|c| {
        let ut = d_dt(|s| case.u(s, x, y)[c], t);
        let gu = d_dx(|x, y| case.u(t, x, y)[c], x, y);
        let lap = div(|x, y| case.grad_u(t, x, y)[c], x, y);
        ut + u[0] * gu[0] + u[1] * gu[1] - nu * lap + grad_p[c] - mu * grad_phi[c]
    });
    let gu_exact = case.forcing_u(t, x, y);
    rel(g_phi, case.forcing_phi(t, x, y))
        .max(rel(g_u[0], gu_exact[0]))
        .max(rel(g_u[1], gu_exact[1]))
}

/// `n` points `(t, x, y)` in `[0, t_max] x (0, 1)^2` from the seeded stream.
pub fn sample_points(seed: u64, n: usize, t_max: f64) -> Vec<[f64; 3]> {
    let mut s = unit_stream(seed);
    (0..n)
        .map(|_| {
            let t = t_max * s.next().unwrap_or(0.5);
            let x = 0.01 + 0.98 * s.next().unwrap_or(0.5);
            let y = 0.01 + 0.98 * s.next().unwrap_or(0.5);
            [t, x, y]
        })
        .collect()
}

/// Worst of [`derivative_mismatch`] and [`forcing_mismatch`] over the points.
pub fn cross_check(case: &MmsCase, points: &[[f64; 3]]) -> f64 {
    points
        .iter()
        .map(|&[t, x, y]| derivative_mismatch(case, t, x, y).max(forcing_mismatch(case, t, x, y)))
        .fold(0.0, f64::max)
}
