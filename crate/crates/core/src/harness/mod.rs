//! Manufactured solutions, error norms and the numerical experiments.

pub mod errors;
pub mod fd;
pub mod mms;
pub mod polygon;
pub mod random;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use errors::{
    convergence_rates, rate, state_errors, ErrorAccumulator, ErrorRecord, RateRecord, StateErrors,
};
pub use mms::MmsCase;
pub use polygon::Polygon;

use crate::assembly::{
    assemble_gradient_load, assemble_load, scalar_error_norms, Discretization, ErrorNorms,
};
use crate::error::{Error, Result};
use crate::linsolve::vecops::{combine, norm};
use crate::linsolve::{solve_neumann_zero_mean, solve_spd};
use crate::scheme::{
    quadratic_roots, Boundary, Params, SchemeOptions, State, StepReport, Stepper, VectorField,
};

/// Relative slack allowed when checking that the modified energy does not grow.
pub const ENERGY_SLACK: f64 = 1e-8;

/// One row of an energy trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub step: usize,
    pub time: f64,
    pub modified_energy: f64,
    pub dissipation: f64,
    /// Absent for forced runs or prescribed wall velocity.
    pub identity_residual: Option<f64>,
    pub discriminant: f64,
    pub chosen_root_ratio: f64,
}

impl From<&StepReport> for EnergyRow {
    fn from(r: &StepReport) -> Self {
        EnergyRow {
            step: r.step,
            time: r.time,
            modified_energy: r.energy_after,
            dissipation: r.dissipation,
            identity_residual: r.identity_residual,
            discriminant: r.reduction.discriminant,
            chosen_root_ratio: r.reduction.ratio,
        }
    }
}

/// Largest relative energy increase along a trace, starting from `initial`.
/// Non-positive when the trace is nonincreasing.
pub fn max_energy_increase(initial: f64, trace: &[EnergyRow]) -> f64 {
    let mut prev = initial;
    let mut worst = f64::NEG_INFINITY;
    for row in trace {
        worst = worst.max((row.modified_energy - prev) / prev.max(1.0));
        prev = row.modified_energy;
    }
    worst
}

pub fn is_monotone(initial: f64, trace: &[EnergyRow]) -> bool {
    max_energy_increase(initial, trace) <= ENERGY_SLACK
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    /// Requested time; the state sits on the nearest step.
    pub time: f64,
    pub state: State,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub disc: Arc<Discretization>,
    pub params: Params,
    pub initial_energy: f64,
    pub trace: Vec<EnergyRow>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: State,
}

impl RunOutput {
    pub fn is_monotone(&self) -> bool {
        is_monotone(self.initial_energy, &self.trace)
    }

    pub fn max_energy_increase(&self) -> f64 {
        max_energy_increase(self.initial_energy, &self.trace)
    }

    /// Largest `|identity residual| / max(1, E)` over the trace.
    pub fn max_identity_defect(&self) -> Option<f64> {
        let mut prev = self.initial_energy;
        let mut worst: Option<f64> = None;
        for row in &self.trace {
            if let Some(d) = row.identity_residual {
                let v = d.abs() / prev.max(1.0);
                worst = Some(worst.map_or(v, |w| w.max(v)));
            }
            prev = row.modified_energy;
        }
        worst
    }
}

/// Step indices of the requested snapshot times; times past the end are dropped.
fn snapshot_steps(times: &[f64], tau: f64, steps: usize) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = times
        .iter()
        .filter(|&&t| t >= 0.0 && t <= (steps as f64 + 0.5) * tau)
        .map(|&t| (((t / tau).round() as usize).min(steps), t))
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    out.dedup_by(|a, b| a.1 == b.1);
    out
}

/// Runs `params.num_steps()` steps from `initial`. `observe` sees every new
/// state with its report.
pub fn march(
    stepper: &Stepper,
    initial: State,
    snapshot_times: &[f64],
    mut observe: impl FnMut(&State, &StepReport) -> Result<()>,
) -> Result<RunOutput> {
    let steps = stepper.params.num_steps();
    let wanted = snapshot_steps(snapshot_times, stepper.params.tau, steps);
    let mut snapshots = Vec::with_capacity(wanted.len());
    let take = |state: &State, snapshots: &mut Vec<Snapshot>| {
        for &(k, t) in &wanted {
            if k == state.step {
                snapshots.push(Snapshot {
                    time: t,
                    state: state.clone(),
                });
            }
        }
    };
    let initial_energy = stepper.modified_energy(&initial);
    take(&initial, &mut snapshots);
    let mut trace = Vec::with_capacity(steps);
    let mut state = initial;
    for _ in 0..steps {
        let (next, report) = stepper.step(&state)?;
        observe(&next, &report)?;
        trace.push(EnergyRow::from(&report));
        take(&next, &mut snapshots);
        state = next;
    }
    Ok(RunOutput {
        disc: stepper.disc.clone(),
        params: stepper.params,
        initial_energy,
        trace,
        snapshots,
        final_state: state,
    })
}

/// How the time step follows the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum TauRule {
    Fixed {
        tau: f64,
    },
    /// `tau = factor * h^3`, with `h = 1/nx`.
    MeshCubed {
        factor: f64,
    },
}

impl Default for TauRule {
    fn default() -> Self {
        TauRule::MeshCubed { factor: 0.1 }
    }
}

impl TauRule {
    /// The raw step, shrunk so that a whole number of steps reaches `t_final`.
    pub fn tau(&self, nx: usize, t_final: f64) -> f64 {
        let raw = match *self {
            TauRule::Fixed { tau } => tau,
            TauRule::MeshCubed { factor } => factor / (nx as f64).powi(3),
        };
        let n = (t_final / raw).round().max(1.0);
        t_final / n
    }
}

fn level_disc(nx: usize) -> Result<Arc<Discretization>> {
    Ok(Arc::new(Discretization::unit_square(nx)?))
}

/// Exact data at `t = 0`, interpolated.
pub fn mms_initial_state(disc: &Discretization, case: &MmsCase) -> Result<State> {
    crate::scheme::init_state(
        disc,
        &case.params,
        |x, y| case.phi(0.0, x, y),
        |x, y| case.mu(0.0, x, y),
        |x, y| case.u(0.0, x, y),
        |x, y| case.p(0.0, x, y),
    )
}

pub fn mms_stepper(
    disc: Arc<Discretization>,
    case: &MmsCase,
    options: SchemeOptions,
) -> Result<Stepper> {
    Ok(Stepper::new(disc, case.params)?
        .with_forcing(case.forcing())
        .with_options(options))
}

/// One level of the convergence study.
pub fn run_convergence_level(
    nx: usize,
    tau_rule: TauRule,
    params: Params,
    options: SchemeOptions,
) -> Result<ErrorRecord> {
    let inner = || -> Result<ErrorRecord> {
        let mut params = params;
        params.tau = tau_rule.tau(nx, params.t_final);
        params.validate()?;
        let case = MmsCase::new(params);
        let disc = level_disc(nx)?;
        let stepper = mms_stepper(disc.clone(), &case, options)?;
        let initial = mms_initial_state(&disc, &case)?;
        let mut acc = ErrorAccumulator::new(params.tau);
        acc.push(0, state_errors(&disc, &case, &initial)?);
        march(&stepper, initial, &[], |s, _| {
            acc.push(s.step, state_errors(&disc, &case, s)?);
            Ok(())
        })?;
        Ok(acc.finish(nx, 1.0 / nx as f64))
    };
    inner().map_err(|e| e.at_level(nx))
}

/// Runs every level (in parallel) and returns the records coarse to fine.
pub fn run_convergence(
    levels: &[usize],
    tau_rule: TauRule,
    params: Params,
    options: SchemeOptions,
) -> Result<Vec<ErrorRecord>> {
    if levels.is_empty() {
        return Err(Error::InvalidArgument("no convergence levels".into()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) || levels[0] == 0 {
        return Err(Error::InvalidArgument(format!(
            "levels must be positive and strictly increasing, got {levels:?}"
        )));
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = levels
            .iter()
            .map(|&nx| s.spawn(move || run_convergence_level(nx, tau_rule, params, options)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
            .collect()
    })
}

/// Random phase in `[-0.1, 0.1]` at the P1 nodes, `mu` equal to it, fluid at rest.
pub fn coarsening_initial_state(
    disc: &Discretization,
    params: &Params,
    seed: u64,
) -> Result<State> {
    let phi = random::uniform_values(seed, disc.p1.ndofs, -0.1, 0.1);
    State::from_coefficients(
        disc,
        params,
        phi.clone(),
        phi,
        vec![0.0; disc.velocity.ndofs],
        vec![0.0; disc.p1.ndofs],
    )
}

pub fn run_coarsening(
    seed: u64,
    nx: usize,
    params: Params,
    snapshot_times: &[f64],
    options: SchemeOptions,
) -> Result<RunOutput> {
    params.validate()?;
    let disc = level_disc(nx)?;
    let stepper = Stepper::new(disc.clone(), params)?.with_options(options);
    let initial = coarsening_initial_state(&disc, &params, seed)?;
    march(&stepper, initial, snapshot_times, |_, _| Ok(()))
}

/// Rigid rotation about the centre of the unit square.
pub fn rotational_field(x: f64, y: f64) -> [f64; 2] {
    [y - 0.5, -x + 0.5]
}

/// `mu` from the discrete chemical-potential equation at `r = sqrt(E1)`:
/// `M_h mu = lambda (K phi + gamma M_h phi + (F'(phi), w))`.
pub fn discrete_chemical_potential(
    disc: &Discretization,
    params: &Params,
    phi: &[f64],
) -> Result<Vec<f64>> {
    let f = &disc.forms;
    let k = f.stiffness_p1.spmv(phi)?;
    let m = f.mass_p1.spmv(phi)?;
    let fp = disc.fprime_load(phi, params)?;
    let rhs = combine(&[
        (params.lambda, &k),
        (params.lambda * params.gamma, &m),
        (params.lambda, &fp),
    ]);
    Ok(solve_spd(&f.mass_p1, &rhs, &params.solver)?.0)
}

/// `phi = 1` inside the polygon and `-1` outside, `mu` consistent with it,
/// `u` the rotational field, `p = 0`.
pub fn relaxation_initial_state(
    disc: &Discretization,
    params: &Params,
    polygon: &Polygon,
) -> Result<State> {
    polygon.validate(disc.mesh.rect)?;
    let phi: Vec<f64> = disc
        .p1
        .dof_coords
        .iter()
        .map(|&p| if polygon.contains(p) { 1.0 } else { -1.0 })
        .collect();
    let mu = discrete_chemical_potential(disc, params, &phi)?;
    let u = disc.velocity.interpolate_vector(rotational_field)?;
    State::from_coefficients(disc, params, phi, mu, u, vec![0.0; disc.p1.ndofs])
}

pub fn run_relaxation(
    polygon: &Polygon,
    nx: usize,
    params: Params,
    snapshot_times: &[f64],
    options: SchemeOptions,
) -> Result<RunOutput> {
    params.validate()?;
    let disc = level_disc(nx)?;
    let initial = relaxation_initial_state(&disc, &params, polygon)?;
    let wall: VectorField = Arc::new(|_, x, y| rotational_field(x, y));
    let stepper = Stepper::new(disc, params)?
        .with_boundary(Boundary::Prescribed(wall))
        .with_options(options);
    march(&stepper, initial, snapshot_times, |_, _| Ok(()))
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub tau: f64,
    pub output: RunOutput,
}

impl SweepEntry {
    pub fn is_monotone(&self) -> bool {
        self.output.is_monotone()
    }
}

/// The coarsening run repeated for each `tau`, in parallel.
pub fn run_stability_sweep(
    taus: &[f64],
    seed: u64,
    nx: usize,
    base: Params,
    options: SchemeOptions,
) -> Result<Vec<SweepEntry>> {
    if taus.is_empty() {
        return Err(Error::InvalidArgument("no time steps to sweep".into()));
    }
    if let Some(t) = taus.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {t}"
        )));
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = taus
            .iter()
            .map(|&tau| {
                s.spawn(move || {
                    let mut params = base;
                    params.tau = tau;
                    run_coarsening(seed, nx, params, &[], options)
                        .map(|output| SweepEntry { tau, output })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
            .collect()
    })
}

/// Ritz projection: `(grad R psi, grad w) = (grad psi, grad w)` for all P1
/// `w`, with `int R psi = int psi`.
pub fn ritz_projection(
    disc: &Discretization,
    value: impl Fn(f64, f64) -> f64,
    grad: impl Fn(f64, f64) -> [f64; 2],
) -> Result<Vec<f64>> {
    let f = &disc.forms;
    let b = assemble_gradient_load(&disc.p1, grad)?;
    let config = crate::linsolve::SolverConfig::with_tolerance(1e-13);
    let (mut x, _) = solve_neumann_zero_mean(&f.stiffness_p1, &b, &f.p1_mass_row_sums, &config)?;
    let mean = assemble_load(&disc.p1, value)?.iter().sum::<f64>() / disc.mesh.rect.area();
    x.iter_mut().for_each(|v| *v += mean);
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionLevel {
    pub nx: usize,
    pub h: f64,
    pub l2: f64,
    pub h1: f64,
}

pub fn ritz_test_field(x: f64, y: f64) -> f64 {
    use std::f64::consts::PI;
    (PI * x).sin() * (PI * y).cos()
}

pub fn ritz_test_gradient(x: f64, y: f64) -> [f64; 2] {
    use std::f64::consts::PI;
    [
        PI * (PI * x).cos() * (PI * y).cos(),
        -PI * (PI * x).sin() * (PI * y).sin(),
    ]
}

/// Ritz projection errors of `sin(pi x) cos(pi y)` and the `(L2, H1)`
/// orders between consecutive levels.
pub fn projection_rate_check(levels: &[usize]) -> Result<(Vec<ProjectionLevel>, Vec<(f64, f64)>)> {
    let mut out = Vec::with_capacity(levels.len());
    for &nx in levels {
        let disc = Discretization::unit_square(nx)?;
        let x = ritz_projection(&disc, ritz_test_field, ritz_test_gradient)?;
        let e: ErrorNorms = scalar_error_norms(&disc.p1, &x, ritz_test_field, ritz_test_gradient)?;
        out.push(ProjectionLevel {
            nx,
            h: 1.0 / nx as f64,
            l2: e.l2,
            h1: e.h1(),
        });
    }
    let rates = out
        .windows(2)
        .map(|w| (rate(w[0].l2, w[1].l2), rate(w[0].h1, w[1].h1)))
        .collect();
    Ok((out, rates))
}

/// Result of one self-test check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

/// Fast structural and invariant checks on small meshes.
pub fn selftest() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let disc = Arc::new(Discretization::unit_square(6)?);
    let f = &disc.forms;

    let asym = [&f.mass_p1, &f.stiffness_p1, &f.mass_v, &f.stiffness_v]
        .iter()
        .map(|m| m.max_asymmetry())
        .fold(0.0, f64::max);
    out.push(check(
        "matrix symmetry",
        asym <= 1e-14,
        format!("max asymmetry {asym:.3e}"),
    ));

    let mass_total: f64 = f.p1_mass_row_sums.iter().sum();
    let kernel = norm(&f.stiffness_p1.spmv(&vec![1.0; disc.p1.ndofs])?);
    out.push(check(
        "partition of unity and stiffness kernel",
        (mass_total - 1.0).abs() <= 1e-13 && kernel <= 1e-12,
        format!("mass total {mass_total:.15}, |K 1| = {kernel:.3e}"),
    ));

    let case = MmsCase::new(Params::convergence_preset());
    let fd = fd::cross_check(&case, &fd::sample_points(1, 50, 1.0));
    out.push(check(
        "manufactured forcing vs differences",
        fd <= 1e-6,
        format!("max relative mismatch {fd:.3e}"),
    ));

    let (_, roots) = quadratic_roots(2.0, -6.0, 0.0)?;
    let ok = roots.contains(&0.0) && roots.iter().any(|r| (r - 3.0).abs() <= 1e-15);
    out.push(check(
        "quadratic with zero constant term",
        ok,
        format!("roots {roots:?}"),
    ));

    let mut params = Params::coarsening_preset();
    params.t_final = 20.0 * params.tau;
    let mut zero_mean = 0.0f64;
    let run = {
        let stepper = Stepper::new(disc.clone(), params)?;
        let initial = coarsening_initial_state(&disc, &params, 3)?;
        march(&stepper, initial, &[], |s, _| {
            zero_mean = zero_mean.max(disc.p1_integral(&s.p).abs());
            Ok(())
        })?
    };
    let identity = run.max_identity_defect().unwrap_or(f64::INFINITY);
    out.push(check(
        "energy identity",
        identity <= 1e-8,
        format!("max relative defect {identity:.3e}"),
    ));
    out.push(check(
        "energy decay",
        run.is_monotone(),
        format!("max relative increase {:.3e}", run.max_energy_increase()),
    ));
    out.push(check(
        "pressure zero mean",
        zero_mean <= 1e-12,
        format!("max |int p| {zero_mean:.3e}"),
    ));

    let stepper = Stepper::new(disc.clone(), params)?.with_options(SchemeOptions {
        ch_only: true,
        ..Default::default()
    });
    let initial = coarsening_initial_state(&disc, &params, 4)?;
    let m0 = disc.p1_integral(&initial.phi);
    let run = march(&stepper, initial, &[], |_, _| Ok(()))?;
    let drift = (disc.p1_integral(&run.final_state.phi) - m0).abs();
    out.push(check(
        "mass conservation",
        drift <= 1e-10,
        format!("mass drift {drift:.3e}"),
    ));

    let (_, rates) = projection_rate_check(&[4, 8, 16])?;
    let ok = rates.iter().all(|&(l2, h1)| l2 >= 1.8 && h1 >= 0.9);
    out.push(check(
        "Ritz projection orders",
        ok,
        format!("(L2, H1) orders {rates:?}"),
    ));
    Ok(out)
}
