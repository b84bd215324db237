//! Jacobi-preconditioned Krylov solvers.

use super::csr::CsrMatrix;
use super::vecops::{axpy, dot, norm};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cg,
    BiCgStab,
    /// Restarted GMRES with the given Krylov dimension.
    Gmres(usize),
    /// GMRES(60), falling back to BiCGStab if it does not converge.
    /// BiCGStab alone stagnates on the CH block when the coupling term
    /// dominates the spectrum.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub rel_tolerance: f64,
    /// `None` means `10 * n`.
    pub max_iterations: Option<usize>,
    pub method: Method,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rel_tolerance: 1e-10,
            max_iterations: None,
            method: Method::Auto,
        }
    }
}

impl SolverConfig {
    pub fn with_tolerance(rel_tolerance: f64) -> Self {
        SolverConfig {
            rel_tolerance,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tolerance > 0.0 && self.rel_tolerance < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "solver tolerance must lie in (0, 1), got {}",
                self.rel_tolerance
            )));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidArgument(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn max_iter(&self, n: usize) -> usize {
        self.max_iterations.unwrap_or(10 * n.max(1))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final `||b - A x|| / ||b||`, recomputed with an explicit product.
    pub residual: f64,
}

struct Jacobi(Vec<f64>);

impl Jacobi {
    fn new(a: &CsrMatrix) -> Self {
        Jacobi(
            a.diagonal()
                .into_iter()
                .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
                .collect(),
        )
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(&self.0) {
            *zi = ri * di;
        }
    }
}

fn true_residual(a: &CsrMatrix, x: &[f64], b: &[f64], bnorm: f64) -> f64 {
    let mut r = vec![0.0; b.len()];
    a.spmv_into(x, &mut r);
    let s: f64 = r.iter().zip(b).map(|(ax, bi)| (bi - ax).powi(2)).sum();
    s.sqrt() / bnorm
}

fn check_square(a: &CsrMatrix, b: &[f64]) -> Result<()> {
    check_len("solver matrix columns", a.nrows(), a.ncols())?;
    check_len("solver right-hand side", a.nrows(), b.len())
}

/// Runs `kernel` from the current iterate until the explicitly recomputed
/// residual meets the tolerance, restarting a few times to shed recurrence
/// drift.
fn drive(
    a: &CsrMatrix,
    b: &[f64],
    config: &SolverConfig,
    method: &'static str,
    mut kernel: impl FnMut(&mut [f64], usize) -> std::result::Result<usize, usize>,
) -> Result<(Vec<f64>, SolveStats)> {
    config.validate()?;
    check_square(a, b)?;
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], SolveStats::default()));
    }
    let budget = config.max_iter(n);
    let mut x = vec![0.0; n];
    let mut used = 0;
    for _ in 0..4 {
        let outcome = kernel(&mut x, budget - used);
        let its = match outcome {
            Ok(k) | Err(k) => k,
        };
        used += its;
        let res = true_residual(a, &x, b, bnorm);
        if res <= config.rel_tolerance {
            return Ok((
                x,
                SolveStats {
                    iterations: used,
                    residual: res,
                },
            ));
        }
        if outcome.is_err() || used >= budget {
            return Err(Error::SolverFailure {
                method,
                iterations: used,
                residual: res,
            });
        }
    }
    let res = true_residual(a, &x, b, bnorm);
    Err(Error::SolverFailure {
        method,
        iterations: used,
        residual: res,
    })
}

/// Preconditioned conjugate gradients for symmetric positive definite `a`.
pub fn solve_spd(
    a: &CsrMatrix,
    b: &[f64],
    config: &SolverConfig,
) -> Result<(Vec<f64>, SolveStats)> {
    let pre = Jacobi::new(a);
    let tol = config.rel_tolerance;
    let bnorm = norm(b);
    drive(a, b, config, "conjugate gradients", |x, budget| {
        cg_kernel(a, b, x, &pre, tol * bnorm, budget)
    })
}

fn cg_kernel(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    pre: &Jacobi,
    abs_tol: f64,
    budget: usize,
) -> std::result::Result<usize, usize> {
    let n = b.len();
    let mut r = vec![0.0; n];
    a.spmv_into(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut z = vec![0.0; n];
    pre.apply(&r, &mut z);
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for k in 0..budget {
        if norm(&r) <= abs_tol {
            return Ok(k);
        }
        a.spmv_into(&p, &mut q);
        let pq = dot(&p, &q);
        if pq <= 0.0 || !pq.is_finite() {
            return Err(k);
        }
        let alpha = rz / pq;
        axpy(alpha, &p, x);
        axpy(-alpha, &q, &mut r);
        pre.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    if norm(&r) <= abs_tol {
        Ok(budget)
    } else {
        Err(budget)
    }
}

/// Krylov solve for a general nonsingular `a`.
pub fn solve_general(
    a: &CsrMatrix,
    b: &[f64],
    config: &SolverConfig,
) -> Result<(Vec<f64>, SolveStats)> {
    match config.method {
        Method::Cg => solve_spd(a, b, config),
        Method::BiCgStab => solve_bicgstab(a, b, config),
        Method::Gmres(m) => solve_gmres(a, b, config, m),
        Method::Auto => solve_gmres(a, b, config, 60).or_else(|err| match err {
            Error::SolverFailure { .. } => solve_bicgstab(a, b, config),
            other => Err(other),
        }),
    }
}

fn solve_bicgstab(
    a: &CsrMatrix,
    b: &[f64],
    config: &SolverConfig,
) -> Result<(Vec<f64>, SolveStats)> {
    let pre = Jacobi::new(a);
    let tol = config.rel_tolerance;
    let bnorm = norm(b);
    drive(a, b, config, "BiCGStab", |x, budget| {
        bicgstab_kernel(a, b, x, &pre, tol * bnorm, budget)
    })
}

fn bicgstab_kernel(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    pre: &Jacobi,
    abs_tol: f64,
    budget: usize,
) -> std::result::Result<usize, usize> {
    let n = b.len();
    let mut r = vec![0.0; n];
    a.spmv_into(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0f64, 1.0f64, 1.0f64);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut p_hat = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut s_hat = vec![0.0; n];
    let mut t = vec![0.0; n];
    let scale = norm(&r_hat);
    for k in 0..budget {
        if norm(&r) <= abs_tol {
            return Ok(k);
        }
        let rho_new = dot(&r_hat, &r);
        if rho_new.abs() <= 1e-300 || rho_new.abs() < 1e-30 * scale * norm(&r) {
            return Err(k);
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        pre.apply(&p, &mut p_hat);
        a.spmv_into(&p_hat, &mut v);
        let rv = dot(&r_hat, &v);
        if rv == 0.0 || !rv.is_finite() {
            return Err(k);
        }
        alpha = rho / rv;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) <= abs_tol {
            axpy(alpha, &p_hat, x);
            return Ok(k + 1);
        }
        pre.apply(&s, &mut s_hat);
        a.spmv_into(&s_hat, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 || !tt.is_finite() {
            return Err(k);
        }
        omega = dot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }
        if omega == 0.0 {
            return Err(k + 1);
        }
    }
    if norm(&r) <= abs_tol {
        Ok(budget)
    } else {
        Err(budget)
    }
}

fn solve_gmres(
    a: &CsrMatrix,
    b: &[f64],
    config: &SolverConfig,
    restart: usize,
) -> Result<(Vec<f64>, SolveStats)> {
    let pre = Jacobi::new(a);
    let tol = config.rel_tolerance;
    let bnorm = norm(b);
    let restart = restart.max(1);
    drive(a, b, config, "GMRES", |x, budget| {
        let mut used = 0;
        while used < budget {
            match gmres_cycle(a, b, x, &pre, tol * bnorm, restart.min(budget - used)) {
                (k, true) => return Ok(used + k),
                (k, false) => {
                    used += k;
                    if k == 0 {
                        return Err(used);
                    }
                }
            }
        }
        Err(used)
    })
}

/// One right-preconditioned GMRES cycle. Returns (iterations, converged).
fn gmres_cycle(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    pre: &Jacobi,
    abs_tol: f64,
    m: usize,
) -> (usize, bool) {
    let n = b.len();
    let mut r = vec![0.0; n];
    a.spmv_into(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let beta = norm(&r);
    if beta <= abs_tol {
        return (0, true);
    }
    let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
    let mut hess = vec![vec![0.0; m]; m + 1];
    let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
    let mut g = vec![0.0; m + 1];
    g[0] = beta;
    let mut z = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut k_done = 0;
    let mut converged = false;
    for j in 0..m {
        pre.apply(&basis[j], &mut z);
        a.spmv_into(&z, &mut w);
        for (i, vi) in basis.iter().enumerate() {
            let hij = dot(&w, vi);
            hess[i][j] = hij;
            axpy(-hij, vi, &mut w);
        }
        let hn = norm(&w);
        hess[j + 1][j] = hn;
        for i in 0..j {
            let tmp = cs[i] * hess[i][j] + sn[i] * hess[i + 1][j];
            hess[i + 1][j] = -sn[i] * hess[i][j] + cs[i] * hess[i + 1][j];
            hess[i][j] = tmp;
        }
        let denom = hess[j][j].hypot(hess[j + 1][j]);
        if denom == 0.0 {
            break;
        }
        cs[j] = hess[j][j] / denom;
        sn[j] = hess[j + 1][j] / denom;
        hess[j][j] = denom;
        hess[j + 1][j] = 0.0;
        g[j + 1] = -sn[j] * g[j];
        g[j] *= cs[j];
        k_done = j + 1;
        if g[j + 1].abs() <= abs_tol {
            converged = true;
            break;
        }
        if hn == 0.0 {
            break;
        }
        basis.push(w.iter().map(|v| v / hn).collect());
    }
    let mut y = vec![0.0; k_done];
    for i in (0..k_done).rev() {
        let mut s = g[i];
        for l in i + 1..k_done {
            s -= hess[i][l] * y[l];
        }
        y[i] = s / hess[i][i];
    }
    let mut update = vec![0.0; n];
    for (i, yi) in y.iter().enumerate() {
        axpy(*yi, &basis[i], &mut update);
    }
    pre.apply(&update.clone(), &mut update);
    axpy(1.0, &update, x);
    (k_done, converged)
}

/// Solves the singular Neumann problem `K x = b` in the complement of the
/// constants. `b` is projected orthogonally to the constant vector first; the
/// result is shifted so that `sum_i x_i * mass_row_sums_i = 0`.
pub fn solve_neumann_zero_mean(
    k: &CsrMatrix,
    b: &[f64],
    mass_row_sums: &[f64],
    config: &SolverConfig,
) -> Result<(Vec<f64>, SolveStats)> {
    check_square(k, b)?;
    check_len("mass row sums", b.len(), mass_row_sums.len())?;
    let n = b.len() as f64;
    let mean = b.iter().sum::<f64>() / n;
    let projected: Vec<f64> = b.iter().map(|v| v - mean).collect();
    if norm(&projected) <= 1e-14 * norm(b) {
        return Ok((vec![0.0; b.len()], SolveStats::default()));
    }
    let (mut x, stats) = solve_spd_semidefinite(k, &projected, config)?;
    let total: f64 = mass_row_sums.iter().sum();
    let shift = dot(&x, mass_row_sums) / total;
    x.iter_mut().for_each(|v| *v -= shift);
    Ok((x, stats))
}

fn solve_spd_semidefinite(
    k: &CsrMatrix,
    b: &[f64],
    config: &SolverConfig,
) -> Result<(Vec<f64>, SolveStats)> {
    let pre = Jacobi::new(k);
    let tol = config.rel_tolerance;
    let bnorm = norm(b);
    drive(
        k,
        b,
        config,
        "conjugate gradients (Neumann)",
        |x, budget| cg_kernel(k, b, x, &pre, tol * bnorm, budget),
    )
}
