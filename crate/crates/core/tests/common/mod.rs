//! Shared helpers for the acceptance suite: result lines and a monolithic
//! reference for one step of the scheme.

use std::io::Write;

use chns_core::assembly::apply_dirichlet;
use chns_core::linsolve::vecops::{axpy, dot, norm, scale, sub};
use chns_core::linsolve::{solve_general, solve_spd, CsrMatrix, Method, SolverConfig};
use chns_core::scheme::{State, Stepper};
use chns_core::Result;

/// One result line per criterion, written straight to stderr so it shows
/// up even when the test harness captures output.
pub fn report(criterion: u32, passed: bool, detail: &str) {
    let line = format!(
        "criterion {criterion}: {} {detail}\n",
        if passed { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    norm(&sub(a, b)) / norm(b).max(1e-300)
}

pub fn scalar_rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Fields after the momentum solve, before the pressure correction.
#[derive(Debug, Clone)]
pub struct Reference {
    pub phi: Vec<f64>,
    pub mu: Vec<f64>,
    pub u_tilde: Vec<f64>,
    pub r: f64,
    pub rho: f64,
    pub iterations: usize,
}

fn tight() -> SolverConfig {
    SolverConfig {
        rel_tolerance: 1e-13,
        max_iterations: Some(20_000),
        method: Method::Gmres(100),
    }
}

/// Solves the coupled step from `prev` without the splitting: the CH and
/// momentum systems are solved for the current guess of `(r, rho)`, then `r`
/// is updated from its own equation and `rho` from its quadratic, until the
/// scalars stop moving.
pub fn monolithic_step(stepper: &Stepper, prev: &State) -> Result<Reference> {
    let d = &*stepper.disc;
    let f = &d.forms;
    let p = &stepper.params;
    let tau = p.tau;
    let loads = stepper.loads(prev)?;
    let (s1, s2) = (loads.sqrt_e1, loads.sqrt_e2);
    let n = d.p1.ndofs;

    let ch = CsrMatrix::block_2x2(
        &f.mass_p1.scaled(1.0 / tau),
        &f.stiffness_p1.scaled(p.mobility),
        &CsrMatrix::linear_combination(&[
            (-p.lambda, &f.stiffness_p1),
            (-p.lambda * p.gamma, &f.mass_p1),
        ])?,
        &f.mass_p1,
    )?;
    let a_v = CsrMatrix::linear_combination(&[(1.0 / tau, &f.mass_v), (p.nu, &f.stiffness_v)])?;
    let walls = &d.velocity.boundary_dofs;
    let wall_values: Vec<f64> = walls.iter().map(|&i| loads.wall_field[i]).collect();

    let mut r = prev.r;
    let mut rho = prev.rho;
    for it in 1..=200 {
        let mut rhs = scale(1.0 / tau, &f.mass_p1.spmv(&prev.phi)?);
        axpy(1.0, &loads.forcing_phi, &mut rhs);
        axpy(-r / s1, &loads.convection_phi, &mut rhs);
        rhs.extend(loads.fprime.iter().map(|v| p.lambda * r / s1 * v));
        let (x, _) = solve_general(&ch, &rhs, &tight())?;
        let (phi, mu) = (x[..n].to_vec(), x[n..].to_vec());

        let mut rhs = scale(1.0 / tau, &f.mass_v.spmv(&prev.u)?);
        axpy(-1.0, &loads.grad_p, &mut rhs);
        axpy(1.0, &loads.forcing_u, &mut rhs);
        axpy(r / s1, &loads.capillary, &mut rhs);
        axpy(-rho / s2, &loads.convection_u, &mut rhs);
        let (a, b) = apply_dirichlet(&a_v, &rhs, walls, &wall_values)?;
        let u_tilde = if stepper.options.ch_only {
            vec![0.0; d.velocity.ndofs]
        } else {
            solve_spd(&a, &b, &tight())?.0
        };

        let c = 1.0 / (2.0 * s1);
        let r_new = prev.r
            + tau
                * c
                * (dot(&loads.fprime, &sub(&phi, &prev.phi)) / tau
                    + dot(&mu, &loads.convection_phi) / p.lambda
                    - dot(&u_tilde, &loads.capillary) / p.lambda);
        // rho^2 - b rho - c0 = 0 with the velocity frozen.
        let bq = prev.rho + tau * dot(&loads.convection_u, &u_tilde) / s2;
        let c0 = 0.5 * f.mass_v.bilinear(&sub(&u_tilde, &prev.u), &u_tilde);
        let rho_new = 0.5 * (bq + (bq * bq + 4.0 * c0).max(0.0).sqrt());

        let moved =
            (r_new - r).abs() / r.abs().max(1.0) + (rho_new - rho).abs() / rho.abs().max(1.0);
        r = r_new;
        rho = rho_new;
        if moved < 1e-15 || it == 200 {
            return Ok(Reference {
                phi,
                mu,
                u_tilde,
                r,
                rho,
                iterations: it,
            });
        }
    }
    unreachable!()
}
