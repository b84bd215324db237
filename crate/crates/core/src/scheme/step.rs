use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::state::{dissipation, energy_identity_residual, modified_energy, shift_to_zero_mean};
use super::{Params, State};
use crate::assembly::{assemble_load, assemble_vector_load, DirichletSystem, Discretization};
use crate::error::{Error, Result};
use crate::linsolve::vecops::{axpy, combine, dot, norm, scale, sub};
use crate::linsolve::{solve_general, solve_neumann_zero_mean, solve_spd, CsrMatrix};

pub type ScalarField = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(f64, f64, f64) -> [f64; 2] + Send + Sync>;

/// Right-hand sides `g_phi(t, x, y)` and `g_u(t, x, y)` added to the phase
/// and momentum equations.
#[derive(Clone, Default)]
pub struct Forcing {
    pub phi: Option<ScalarField>,
    pub velocity: Option<VectorField>,
}

impl Forcing {
    pub fn none() -> Self {
        Forcing::default()
    }

    pub fn is_none(&self) -> bool {
        self.phi.is_none() && self.velocity.is_none()
    }
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Forcing")
            .field("phi", &self.phi.is_some())
            .field("velocity", &self.velocity.is_some())
            .finish()
    }
}

/// Velocity trace on the walls.
#[derive(Clone, Default)]
pub enum Boundary {
    #[default]
    NoSlip,
    Prescribed(VectorField),
}

impl fmt::Debug for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::NoSlip => f.write_str("NoSlip"),
            Boundary::Prescribed(_) => f.write_str("Prescribed"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SchemeOptions {
    /// Freeze the velocity at zero and advance only the phase field.
    pub ch_only: bool,
    /// Project both candidate velocities before choosing the `rho` root.
    pub strict_root: bool,
}

/// Step-independent matrices for one `tau`.
#[derive(Debug, Clone)]
pub struct Operators {
    pub tau: f64,
    /// `[[M/tau, Mob K], [-lambda K - lambda gamma M, M]]` on `(phi, mu)`.
    pub ch: CsrMatrix,
    /// `M_v/tau + nu K_v` with wall dofs eliminated.
    pub velocity: DirichletSystem,
    /// `M_v` with wall dofs eliminated, for the velocity projection.
    pub projection: DirichletSystem,
}

pub fn build_operators(disc: &Discretization, params: &Params) -> Result<Operators> {
    params.validate()?;
    let f = &disc.forms;
    let tau = params.tau;
    let lower = CsrMatrix::linear_combination(&[
        (-params.lambda, &f.stiffness_p1),
        (-params.lambda * params.gamma, &f.mass_p1),
    ])?;
    let ch = CsrMatrix::block_2x2(
        &f.mass_p1.scaled(1.0 / tau),
        &f.stiffness_p1.scaled(params.mobility),
        &lower,
        &f.mass_p1,
    )?;
    let av = CsrMatrix::linear_combination(&[(1.0 / tau, &f.mass_v), (params.nu, &f.stiffness_v)])?;
    let walls = &disc.velocity.boundary_dofs;
    Ok(Operators {
        tau,
        ch,
        velocity: DirichletSystem::new(&av, walls)?,
        projection: DirichletSystem::new(&f.mass_v, walls)?,
    })
}

/// `(Phi, U)` pair of a CH solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ChPart {
    pub phi: Vec<f64>,
    pub mu: Vec<f64>,
}

impl ChPart {
    fn from_block(mut x: Vec<f64>) -> Self {
        let mu = x.split_off(x.len() / 2);
        ChPart { phi: x, mu }
    }
}

/// Explicit load vectors of one step, all built from the state at `t^n`.
#[derive(Debug, Clone)]
pub struct StepLoads {
    /// `(u^n . grad phi^n, w)`
    pub convection_phi: Vec<f64>,
    /// `(F'(phi^n), w)`
    pub fprime: Vec<f64>,
    /// `(mu^n grad phi^n, v)`
    pub capillary: Vec<f64>,
    /// `((u^n . grad) u^n, v)`
    pub convection_u: Vec<f64>,
    /// `(grad p^n, v)`
    pub grad_p: Vec<f64>,
    pub forcing_phi: Vec<f64>,
    pub forcing_u: Vec<f64>,
    /// Wall velocity at `t^{n+1}`, interpolated on the whole velocity space.
    pub wall_field: Vec<f64>,
    pub sqrt_e1: f64,
    pub sqrt_e2: f64,
}

/// Outcome of the two-scalar reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reduction {
    pub alpha: f64,
    pub beta: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
    pub discriminant: f64,
    pub roots: [f64; 2],
    pub rho: f64,
    pub r: f64,
    /// `rho / sqrt(E2(u(rho)) + C2)` of the chosen root.
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolverCounts {
    pub ch: usize,
    pub velocity: usize,
    pub pressure: usize,
    pub projection: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub step: usize,
    pub time: f64,
    pub energy_before: f64,
    pub energy_after: f64,
    pub dissipation: f64,
    /// Defect of the discrete energy equality; `None` when forcing or a
    /// nonhomogeneous wall velocity is present.
    pub identity_residual: Option<f64>,
    pub reduction: Reduction,
    /// `|(div u^{n+1}, q)|` as a Euclidean norm over pressure test functions.
    pub weak_divergence: f64,
    pub iterations: SolverCounts,
}

/// Coefficients of `a2 rho^2 + a1 rho + a0 = 0`, real roots from the
/// cancellation-free formula, or an error when the discriminant is
/// genuinely negative.
pub fn quadratic_roots(a2: f64, a1: f64, a0: f64) -> Result<(f64, [f64; 2])> {
    let scale = (a1 * a1).max((4.0 * a2 * a0).abs());
    if a2.abs() <= 1e-14 * a1.abs().max(a0.abs()) {
        if a1 == 0.0 {
            return Err(Error::NoRealRoot {
                discriminant: 0.0,
                scale,
            });
        }
        let root = -a0 / a1;
        return Ok((a1 * a1, [root, root]));
    }
    let mut disc = a1 * a1 - 4.0 * a2 * a0;
    if disc < 0.0 {
        if disc < -1e-12 * scale {
            return Err(Error::NoRealRoot {
                discriminant: disc,
                scale,
            });
        }
        disc = 0.0;
    }
    let sign = if a1 >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (a1 + sign * disc.sqrt());
    if q == 0.0 {
        return Ok((disc, [0.0, 0.0]));
    }
    Ok((disc, [q / a2, a0 / q]))
}

/// Advances a [`State`] by one step of the scheme.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub disc: Arc<Discretization>,
    pub params: Params,
    pub ops: Operators,
    pub forcing: Forcing,
    pub boundary: Boundary,
    pub options: SchemeOptions,
}

impl Stepper {
    pub fn new(disc: Arc<Discretization>, params: Params) -> Result<Self> {
        let ops = build_operators(&disc, &params)?;
        Ok(Stepper {
            disc,
            params,
            ops,
            forcing: Forcing::none(),
            boundary: Boundary::NoSlip,
            options: SchemeOptions::default(),
        })
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = forcing;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_options(mut self, options: SchemeOptions) -> Self {
        self.options = options;
        self
    }

    fn tau(&self) -> f64 {
        self.params.tau
    }

    pub fn modified_energy(&self, state: &State) -> f64 {
        modified_energy(&self.disc, &self.params, state)
    }

    /// Whether the energy equality applies (no forcing, no-slip walls).
    pub fn is_autonomous(&self) -> bool {
        self.forcing.is_none() && matches!(self.boundary, Boundary::NoSlip)
    }

    pub fn loads(&self, state: &State) -> Result<StepLoads> {
        let d = &*self.disc;
        let t1 = (state.step + 1) as f64 * self.tau();
        let e = d.compute_discrete_energies(&state.phi, &state.u, &self.params)?;
        let forcing_phi = match &self.forcing.phi {
            Some(g) => assemble_load(&d.p1, |x, y| g(t1, x, y))?,
            None => vec![0.0; d.p1.ndofs],
        };
        let forcing_u = match &self.forcing.velocity {
            Some(g) if !self.options.ch_only => {
                assemble_vector_load(&d.velocity, |x, y| g(t1, x, y))?
            }
            _ => vec![0.0; d.velocity.ndofs],
        };
        let wall_field = match &self.boundary {
            Boundary::Prescribed(g) if !self.options.ch_only => {
                d.velocity.interpolate_vector(|x, y| g(t1, x, y))?
            }
            _ => vec![0.0; d.velocity.ndofs],
        };
        Ok(StepLoads {
            convection_phi: d.convective_load_scalar(&state.u, &state.phi)?,
            fprime: d.fprime_load(&state.phi, &self.params)?,
            capillary: d.mu_grad_phi_load(&state.mu, &state.phi)?,
            convection_u: d.convective_load_vector(&state.u)?,
            grad_p: d.grad_p_load(&state.p)?,
            forcing_phi,
            forcing_u,
            wall_field,
            sqrt_e1: e.e1.sqrt(),
            sqrt_e2: e.e2.sqrt(),
        })
    }

    /// The two CH solves: `(phi, mu) = X0 + r X1` solves the phase and
    /// chemical-potential equations for any `r`.
    pub fn ch_split_solve(
        &self,
        state: &State,
        loads: &StepLoads,
    ) -> Result<(ChPart, ChPart, usize)> {
        let d = &*self.disc;
        let n = d.p1.ndofs;
        let cfg = &self.params.solver;
        let mut rhs0 = d.forms.mass_p1.spmv(&state.phi)?;
        rhs0.iter_mut().for_each(|v| *v /= self.tau());
        axpy(1.0, &loads.forcing_phi, &mut rhs0);
        rhs0.resize(2 * n, 0.0);
        let mut rhs1 = scale(-1.0 / loads.sqrt_e1, &loads.convection_phi);
        rhs1.extend(
            loads
                .fprime
                .iter()
                .map(|v| self.params.lambda * v / loads.sqrt_e1),
        );
        let (x0, s0) = solve_general(&self.ops.ch, &rhs0, cfg)?;
        let (x1, s1) = solve_general(&self.ops.ch, &rhs1, cfg)?;
        Ok((
            ChPart::from_block(x0),
            ChPart::from_block(x1),
            s0.iterations + s1.iterations,
        ))
    }

    /// The three momentum solves: `u_tilde = Y0 + r Y1 + rho Y2`.
    pub fn velocity_split_solve(
        &self,
        state: &State,
        loads: &StepLoads,
    ) -> Result<([Vec<f64>; 3], usize)> {
        let d = &*self.disc;
        let nv = d.velocity.ndofs;
        if self.options.ch_only {
            return Ok(([vec![0.0; nv], vec![0.0; nv], vec![0.0; nv]], 0));
        }
        let cfg = &self.params.solver;
        let sys = &self.ops.velocity;
        let mut rhs0 = d.forms.mass_v.spmv(&state.u)?;
        rhs0.iter_mut().for_each(|v| *v /= self.tau());
        axpy(-1.0, &loads.grad_p, &mut rhs0);
        axpy(1.0, &loads.forcing_u, &mut rhs0);
        let rhs1 = sys.lift_homogeneous(&scale(1.0 / loads.sqrt_e1, &loads.capillary))?;
        let rhs2 = sys.lift_homogeneous(&scale(-1.0 / loads.sqrt_e2, &loads.convection_u))?;
        let (y0, s0) = sys.solve_spd(&rhs0, &loads.wall_field, cfg)?;
        let (y1, s1) = solve_spd(&sys.matrix, &rhs1, cfg)?;
        let (y2, s2) = solve_spd(&sys.matrix, &rhs2, cfg)?;
        Ok(([y0, y1, y2], s0.iterations + s1.iterations + s2.iterations))
    }

    /// Eliminates `r` (affine in `rho`) and reduces the `rho` equation to a
    /// quadratic; among the roots giving positive `rho` and `r`, picks the one
    /// whose energy ratio is closest to one.
    pub fn scalar_reduction(
        &self,
        state: &State,
        loads: &StepLoads,
        x: &[ChPart; 2],
        y: &[Vec<f64>; 3],
    ) -> Result<Reduction> {
        let (z0, z1, mut red) = self.reduce(state, loads, x, y)?;
        let mut candidates: Vec<f64> = if red.roots[0] == red.roots[1] {
            vec![red.roots[0]]
        } else {
            red.roots.to_vec()
        };
        // rho and r are square roots; a nonpositive root is only kept when
        // nothing else is left, and the step then reports the corruption.
        let admissible = |rho: &f64| *rho > 0.0 && red.alpha + red.beta * *rho > 0.0;
        if candidates.iter().any(admissible) {
            candidates.retain(admissible);
        }
        let mut best: Option<(f64, f64)> = None;
        for &rho in &candidates {
            let ratio = self.root_ratio(state, &z0, &z1, rho)?;
            let better = match best {
                None => true,
                Some((_, b)) => (ratio - 1.0).abs() < (b - 1.0).abs(),
            };
            if better {
                best = Some((rho, ratio));
            }
        }
        let (rho, ratio) = best.expect("at least one root");
        red.rho = rho;
        red.ratio = ratio;
        red.r = red.alpha + red.beta * rho;
        Ok(red)
    }

    fn reduce(
        &self,
        state: &State,
        loads: &StepLoads,
        x: &[ChPart; 2],
        y: &[Vec<f64>; 3],
    ) -> Result<(Vec<f64>, Vec<f64>, Reduction)> {
        let tau = self.tau();
        let lambda = self.params.lambda;
        let d = &*self.disc;
        let (s1, s2) = (loads.sqrt_e1, loads.sqrt_e2);
        let c = 1.0 / (2.0 * s1);
        let kappa1 = c
            * (dot(&loads.fprime, &x[1].phi) / tau + dot(&loads.convection_phi, &x[1].mu) / lambda
                - dot(&loads.capillary, &y[1]) / lambda);
        let dphi0 = sub(&x[0].phi, &state.phi);
        let kappa0 = c
            * (dot(&loads.fprime, &dphi0) / tau + dot(&loads.convection_phi, &x[0].mu) / lambda
                - dot(&loads.capillary, &y[0]) / lambda);
        let kappa_rho = -c * dot(&loads.capillary, &y[2]) / lambda;
        let gap = 1.0 / tau - kappa1;
        let threshold = 1e-12 / tau;
        if gap.abs() < threshold {
            return Err(Error::DegenerateReduction { gap, threshold });
        }
        let alpha = (state.r / tau + kappa0) / gap;
        let beta = kappa_rho / gap;

        let z0 = combine(&[(1.0, &y[0]), (alpha, &y[1])]);
        let z1 = combine(&[(beta, &y[1]), (1.0, &y[2])]);
        let m = &d.forms.mass_v;
        let z0u = sub(&z0, &state.u);
        let a2 = 2.0 / tau - m.bilinear(&z1, &z1) / tau - 2.0 / s2 * dot(&loads.convection_u, &z1);
        let a1 = -2.0 * state.rho / tau
            - (m.bilinear(&z0u, &z1) + m.bilinear(&z0, &z1)) / tau
            - 2.0 / s2 * dot(&loads.convection_u, &z0);
        let a0 = -m.bilinear(&z0u, &z0) / tau;
        let (discriminant, roots) = quadratic_roots(a2, a1, a0)?;
        Ok((
            z0,
            z1,
            Reduction {
                alpha,
                beta,
                a2,
                a1,
                a0,
                discriminant,
                roots,
                rho: f64::NAN,
                r: f64::NAN,
                ratio: f64::NAN,
            },
        ))
    }

    fn root_ratio(&self, state: &State, z0: &[f64], z1: &[f64], rho: f64) -> Result<f64> {
        let d = &*self.disc;
        let u_tilde = combine(&[(1.0, z0), (rho, z1)]);
        let u = if self.options.strict_root && !self.options.ch_only {
            self.pressure_correction(&u_tilde, &state.p)?.u
        } else {
            u_tilde
        };
        let e2 = 0.5 * d.forms.mass_v.bilinear(&u, &u) + self.params.c2;
        Ok(rho / e2.sqrt())
    }

    /// Poisson solve for the pressure increment and L2 projection of
    /// `u_tilde - tau grad psi` with the wall values of `u_tilde`.
    pub fn pressure_correction(&self, u_tilde: &[f64], p: &[f64]) -> Result<Projection> {
        let d = &*self.disc;
        let tau = self.tau();
        let cfg = &self.params.solver;
        let rhs = scale(-1.0 / tau, &d.div_load(u_tilde)?);
        let (psi, sp) =
            solve_neumann_zero_mean(&d.forms.stiffness_p1, &rhs, &d.forms.p1_mass_row_sums, cfg)?;
        let mut p_next = combine(&[(1.0, p), (1.0, &psi)]);
        shift_to_zero_mean(d, &mut p_next);
        let mut b = d.forms.mass_v.spmv(u_tilde)?;
        axpy(-tau, &d.grad_p_load(&psi)?, &mut b);
        let (u, sm) = self.ops.projection.solve_spd(&b, u_tilde, cfg)?;
        Ok(Projection {
            u,
            p: p_next,
            psi,
            iterations: (sp.iterations, sm.iterations),
        })
    }

    pub fn step(&self, state: &State) -> Result<(State, StepReport)> {
        let n = state.step;
        self.step_inner(state).map_err(|e| e.at_step(n + 1))
    }

    fn step_inner(&self, state: &State) -> Result<(State, StepReport)> {
        let d = &*self.disc;
        state.check(d)?;
        let loads = self.loads(state)?;
        let (x0, x1, ch_its) = self.ch_split_solve(state, &loads)?;
        let (y, vel_its) = self.velocity_split_solve(state, &loads)?;
        let x = [x0, x1];
        let red = self.scalar_reduction(state, &loads, &x, &y)?;
        if !(red.r > 0.0 && red.rho > 0.0) {
            return Err(Error::StateCorruption(format!(
                "nonpositive auxiliary variable (r = {}, rho = {})",
                red.r, red.rho
            )));
        }
        let phi = combine(&[(1.0, &x[0].phi), (red.r, &x[1].phi)]);
        let mu = combine(&[(1.0, &x[0].mu), (red.r, &x[1].mu)]);
        let u_tilde = combine(&[(1.0, &y[0]), (red.r, &y[1]), (red.rho, &y[2])]);
        let (u, p, proj_its) = if self.options.ch_only {
            (u_tilde.clone(), state.p.clone(), (0, 0))
        } else {
            let pr = self.pressure_correction(&u_tilde, &state.p)?;
            (pr.u, pr.p, pr.iterations)
        };
        let next = State {
            step: state.step + 1,
            time: (state.step + 1) as f64 * self.tau(),
            phi,
            mu,
            u_tilde,
            u,
            p,
            r: red.r,
            rho: red.rho,
        };
        if !next.is_finite() {
            return Err(Error::StateCorruption(
                "non-finite values after step".into(),
            ));
        }
        let identity_residual = if self.is_autonomous() {
            Some(energy_identity_residual(d, &self.params, state, &next)?)
        } else {
            None
        };
        let report = StepReport {
            step: next.step,
            time: next.time,
            energy_before: self.modified_energy(state),
            energy_after: self.modified_energy(&next),
            dissipation: dissipation(d, &self.params, &next),
            identity_residual,
            reduction: red,
            weak_divergence: norm(&d.div_load(&next.u)?),
            iterations: SolverCounts {
                ch: ch_its,
                velocity: vel_its,
                pressure: proj_its.0,
                projection: proj_its.1,
            },
        };
        Ok((next, report))
    }

    /// Relative residuals of the five discrete equations at `next`, each
    /// normalized by the sum of the norms of its terms (difference quotients
    /// count as two terms).
    pub fn equation_residuals(&self, prev: &State, next: &State) -> Result<EquationResiduals> {
        let d = &*self.disc;
        let f = &d.forms;
        let tau = self.tau();
        let lambda = self.params.lambda;
        let loads = self.loads(prev)?;
        let (s1, s2) = (loads.sqrt_e1, loads.sqrt_e2);
        let r = next.r;
        let rho = next.rho;
        let dphi = sub(&next.phi, &prev.phi);

        let phi_terms = [
            scale(1.0 / tau, &f.mass_p1.spmv(&next.phi)?),
            scale(-1.0 / tau, &f.mass_p1.spmv(&prev.phi)?),
            scale(r / s1, &loads.convection_phi),
            scale(self.params.mobility, &f.stiffness_p1.spmv(&next.mu)?),
            scale(-1.0, &loads.forcing_phi),
        ];
        let mu_terms = [
            f.mass_p1.spmv(&next.mu)?,
            scale(-lambda, &f.stiffness_p1.spmv(&next.phi)?),
            scale(-lambda * self.params.gamma, &f.mass_p1.spmv(&next.phi)?),
            scale(-lambda * r / s1, &loads.fprime),
        ];
        let c = 1.0 / (2.0 * s1);
        let r_terms = [
            r / tau,
            -prev.r / tau,
            -c * dot(&loads.fprime, &dphi) / tau,
            -c * dot(&next.mu, &loads.convection_phi) / lambda,
            c * dot(&next.u_tilde, &loads.capillary) / lambda,
        ];
        let mut vel_terms = [
            scale(1.0 / tau, &f.mass_v.spmv(&next.u_tilde)?),
            scale(-1.0 / tau, &f.mass_v.spmv(&prev.u)?),
            scale(rho / s2, &loads.convection_u),
            scale(self.params.nu, &f.stiffness_v.spmv(&next.u_tilde)?),
            loads.grad_p.clone(),
            scale(-r / s1, &loads.capillary),
            scale(-1.0, &loads.forcing_u),
        ];
        // Wall rows are not equations of the scheme.
        for v in vel_terms.iter_mut() {
            for &i in &d.velocity.boundary_dofs {
                v[i] = 0.0;
            }
        }
        let du = sub(&next.u_tilde, &prev.u);
        let rho_terms = [
            2.0 * rho * rho / tau,
            -2.0 * rho * prev.rho / tau,
            -f.mass_v.bilinear(&du, &next.u_tilde) / tau,
            -2.0 * rho / s2 * dot(&loads.convection_u, &next.u_tilde),
        ];
        let mut wall_defect = 0.0f64;
        if !self.options.ch_only {
            for &i in &d.velocity.boundary_dofs {
                wall_defect = wall_defect.max((next.u_tilde[i] - loads.wall_field[i]).abs());
            }
        }
        Ok(EquationResiduals {
            phi: vector_residual(&phi_terms),
            mu: vector_residual(&mu_terms),
            r: scalar_residual(&r_terms),
            velocity: if self.options.ch_only {
                0.0
            } else {
                vector_residual(&vel_terms)
            },
            rho: scalar_residual(&rho_terms),
            wall_defect,
        })
    }
}

fn vector_residual(terms: &[Vec<f64>]) -> f64 {
    let total: f64 = terms.iter().map(|t| norm(t)).sum();
    let refs: Vec<(f64, &[f64])> = terms.iter().map(|t| (1.0, t.as_slice())).collect();
    let res = norm(&combine(&refs));
    if total == 0.0 {
        0.0
    } else {
        res / total
    }
}

fn scalar_residual(terms: &[f64]) -> f64 {
    let total: f64 = terms.iter().map(|t| t.abs()).sum();
    let res: f64 = terms.iter().sum();
    if total == 0.0 {
        0.0
    } else {
        res.abs() / total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub psi: Vec<f64>,
    /// (Poisson, mass) iterations.
    pub iterations: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquationResiduals {
    pub phi: f64,
    pub mu: f64,
    pub r: f64,
    pub velocity: f64,
    pub rho: f64,
    /// Largest deviation of the intermediate velocity from the wall data.
    pub wall_defect: f64,
}

impl EquationResiduals {
    pub fn max(&self) -> f64 {
        [self.phi, self.mu, self.r, self.velocity, self.rho]
            .into_iter()
            .fold(0.0, f64::max)
    }
}
