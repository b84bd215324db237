use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::assembly::{l2_error, Discretization};
use crate::error::Error;
use crate::linsolve::vecops::{combine, norm, sub};
use crate::linsolve::SolverConfig;

fn disc(n: usize) -> Arc<Discretization> {
    Arc::new(Discretization::unit_square(n).unwrap())
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    norm(&sub(a, b)) / norm(b).max(1e-300)
}

/// A smooth, nontrivial state with zero wall velocity.
fn wavy_state(d: &Discretization, p: &Params) -> State {
    init_state(
        d,
        p,
        |x, y| 0.4 * (PI * x).cos() * (PI * y).cos() + 0.1,
        |x, y| 0.3 * (2.0 * PI * x).sin() + y,
        |x, y| {
            let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
            [
                sx * sx * (2.0 * PI * y).sin(),
                -sy * sy * (2.0 * PI * x).sin(),
            ]
        },
        |x, y| (PI * x).cos() * y,
    )
    .unwrap()
}

#[test]
fn ch_operator_on_constants() {
    let d = disc(4);
    let p = Params::coarsening_preset();
    let ops = build_operators(&d, &p).unwrap();
    let n = d.p1.ndofs;
    let c = 0.7;
    let mut x = vec![c; n];
    x.resize(2 * n, 0.0);
    let y = ops.ch.spmv(&x).unwrap();
    let rows = &d.forms.p1_mass_row_sums;
    for i in 0..n {
        assert!((y[i] - c / p.tau * rows[i]).abs() < 1e-10);
        assert!((y[n + i] + p.lambda * p.gamma * c * rows[i]).abs() < 1e-13);
    }
}

#[test]
fn velocity_operator_is_spd_and_linear_in_inverse_tau() {
    let d = disc(3);
    let p = Params::coarsening_preset();
    let ops = build_operators(&d, &p).unwrap();
    let a = &ops.velocity.matrix;
    assert!(a.max_asymmetry() <= 1e-13);
    let mut seed = 3u64;
    for _ in 0..10 {
        let x: Vec<f64> = (0..a.nrows())
            .map(|_| {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
                (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        assert!(a.bilinear(&x, &x) > 0.0);
    }
    let mut p2 = p;
    p2.tau *= 2.0;
    let ops2 = build_operators(&d, &p2).unwrap();
    // Entry of an interior dof: M/tau + nu K.
    let i = (0..a.nrows())
        .find(|&i| !ops.velocity.is_constrained(i))
        .unwrap();
    let m = d.forms.mass_v.get(i, i);
    let diff = ops.velocity.matrix.get(i, i) - ops2.velocity.matrix.get(i, i);
    assert!((diff - m / (2.0 * p.tau)).abs() < 1e-9 * m / p.tau);
}

#[test]
fn zero_state_is_a_fixed_point() {
    let d = disc(4);
    let p = Params::coarsening_preset();
    let st = Stepper::new(d.clone(), p).unwrap();
    let s0 = init_state(&d, &p, |_, _| 0.0, |_, _| 0.0, |_, _| [0.0; 2], |_, _| 0.0).unwrap();
    let loads = st.loads(&s0).unwrap();
    let (x0, x1, _) = st.ch_split_solve(&s0, &loads).unwrap();
    assert!(x0
        .phi
        .iter()
        .chain(&x0.mu)
        .chain(&x1.phi)
        .chain(&x1.mu)
        .all(|&v| v == 0.0));
    let (y, _) = st.velocity_split_solve(&s0, &loads).unwrap();
    assert!(y.iter().flatten().all(|&v| v == 0.0));

    let red = st.scalar_reduction(&s0, &loads, &[x0, x1], &y).unwrap();
    assert_eq!(red.r, s0.r);
    assert!((red.a2 - 2.0 / p.tau).abs() < 1e-9);
    assert!((red.a1 + 2.0 * s0.rho / p.tau).abs() < 1e-9);
    assert_eq!(red.a0, 0.0);
    assert!(red.roots.contains(&0.0));
    assert!((red.rho - s0.rho).abs() < 1e-15);

    let mut s = s0.clone();
    for _ in 0..3 {
        let (next, rep) = st.step(&s).unwrap();
        assert_eq!(next.phi, s0.phi);
        assert_eq!(next.u, s0.u);
        assert!((next.r - s0.r).abs() < 1e-14 * s0.r);
        assert!((next.rho - s0.rho).abs() < 1e-15);
        assert!((rep.energy_after - rep.energy_before).abs() < 1e-12 * rep.energy_before);
        assert!(rep.identity_residual.unwrap().abs() < 1e-12);
        s = next;
    }
}

#[test]
fn ch_superposition_holds_for_any_r() {
    let d = disc(4);
    let p = Params::relaxation_preset();
    let st = Stepper::new(d.clone(), p).unwrap();
    let s = wavy_state(&d, &p);
    let loads = st.loads(&s).unwrap();
    let (x0, x1, _) = st.ch_split_solve(&s, &loads).unwrap();
    let n = d.p1.ndofs;
    let r = 1.37;
    let mut x = combine(&[(1.0, &x0.phi), (r, &x1.phi)]);
    x.extend(combine(&[(1.0, &x0.mu), (r, &x1.mu)]));
    let lhs = st.ops.ch.spmv(&x).unwrap();
    let mut rhs: Vec<f64> = d
        .forms
        .mass_p1
        .spmv(&s.phi)
        .unwrap()
        .iter()
        .map(|v| v / p.tau)
        .collect();
    for i in 0..n {
        rhs[i] -= r * loads.convection_phi[i] / loads.sqrt_e1;
    }
    rhs.extend(
        loads
            .fprime
            .iter()
            .map(|v| p.lambda * r * v / loads.sqrt_e1),
    );
    assert!(rel(&lhs, &rhs) <= 1e-9);

    // Adding a forcing load changes only X0, linearly.
    let g: ScalarField = Arc::new(|_, x, y| x * y);
    let g2: ScalarField = Arc::new(|_, x, y| 2.0 * x * y);
    let a = Stepper::new(d.clone(), p).unwrap().with_forcing(Forcing {
        phi: Some(g),
        velocity: None,
    });
    let b = Stepper::new(d.clone(), p).unwrap().with_forcing(Forcing {
        phi: Some(g2),
        velocity: None,
    });
    let (xa, xa1, _) = a.ch_split_solve(&s, &a.loads(&s).unwrap()).unwrap();
    let (xb, _, _) = b.ch_split_solve(&s, &b.loads(&s).unwrap()).unwrap();
    assert_eq!(xa1, x1);
    let da = sub(&xa.phi, &x0.phi);
    let db = sub(&xb.phi, &x0.phi);
    assert!(rel(&db, &combine(&[(2.0, &da)])) < 1e-8);
}

#[test]
fn velocity_superposition_and_wall_values() {
    let d = disc(4);
    let p = Params::relaxation_preset();
    let wall: VectorField = Arc::new(|_, x, y| [y - 0.5, -x + 0.5]);
    let st = Stepper::new(d.clone(), p)
        .unwrap()
        .with_boundary(Boundary::Prescribed(wall));
    let s = wavy_state(&d, &p);
    let loads = st.loads(&s).unwrap();
    let (y, _) = st.velocity_split_solve(&s, &loads).unwrap();
    let exact = d
        .velocity
        .interpolate_vector(|x, y| [y - 0.5, -x + 0.5])
        .unwrap();
    for &i in &d.velocity.boundary_dofs {
        assert_eq!(y[0][i], exact[i]);
        assert_eq!(y[1][i], 0.0);
        assert_eq!(y[2][i], 0.0);
    }
    let (r, rho) = (2.0, 3.0);
    let u = combine(&[(1.0, &y[0]), (r, &y[1]), (rho, &y[2])]);
    let f = &d.forms;
    let mut lhs = f.mass_v.spmv(&sub(&u, &s.u)).unwrap();
    lhs.iter_mut().for_each(|v| *v /= p.tau);
    let terms = [
        (rho / loads.sqrt_e2, &loads.convection_u),
        (p.nu, &f.stiffness_v.spmv(&u).unwrap()),
        (1.0, &loads.grad_p),
        (-r / loads.sqrt_e1, &loads.capillary),
    ];
    let mut scale = norm(&lhs);
    for (c, v) in terms {
        crate::linsolve::vecops::axpy(c, v, &mut lhs);
        scale += c.abs() * norm(v);
    }
    for &i in &d.velocity.boundary_dofs {
        lhs[i] = 0.0;
    }
    assert!(norm(&lhs) / scale <= 1e-9);

    let zero = Stepper::new(d.clone(), p).unwrap();
    let s0 = init_state(&d, &p, |_, _| 0.3, |_, _| 0.0, |_, _| [0.0; 2], |_, _| 0.0).unwrap();
    let (y, _) = zero
        .velocity_split_solve(&s0, &zero.loads(&s0).unwrap())
        .unwrap();
    assert!(y.iter().flatten().all(|&v| v == 0.0));
}

#[test]
fn quadratic_root_cases() {
    let (disc, roots) = quadratic_roots(2.0, -6.0, 4.0).unwrap();
    assert_eq!(disc, 4.0);
    let mut r = roots;
    r.sort_by(f64::total_cmp);
    assert_eq!(r, [1.0, 2.0]);

    let (_, roots) = quadratic_roots(3.0, -2.0, 0.0).unwrap();
    assert!(roots.contains(&0.0));

    // Tiny negative discriminant is clamped; a real one is an error.
    let (disc, roots) = quadratic_roots(1.0, -2.0, 1.0 + 1e-15).unwrap();
    assert_eq!(disc, 0.0);
    assert!((roots[0] - 1.0).abs() < 1e-7);
    assert!(matches!(
        quadratic_roots(1.0, 0.0, 1.0),
        Err(Error::NoRealRoot { .. })
    ));

    // Vanishing leading coefficient falls back to the linear equation.
    let (_, roots) = quadratic_roots(0.0, 2.0, -1.0).unwrap();
    assert_eq!(roots, [0.5, 0.5]);

    // Cancellation-prone case keeps the small root accurate.
    let (_, roots) = quadratic_roots(1.0, -1e8, 1.0).unwrap();
    assert!((roots[1] - 1e-8).abs() < 1e-22);
}

#[test]
fn pressure_correction_examples() {
    let d = disc(4);
    let p = Params::relaxation_preset();
    let st = Stepper::new(d.clone(), p).unwrap();
    let pn = d.p1.interpolate(|x, y| x - y).unwrap();
    let zero = vec![0.0; d.velocity.ndofs];
    let pr = st.pressure_correction(&zero, &pn).unwrap();
    assert!(pr.psi.iter().all(|&v| v == 0.0));
    assert!(pr.u.iter().all(|&v| v == 0.0));
    assert!(rel(&pr.p, &pn) < 1e-14);

    // The weak divergence vanishes up to rounding, so psi does too.
    let lin = d.velocity.interpolate_vector(|x, y| [x, -y]).unwrap();
    let pr = st.pressure_correction(&lin, &pn).unwrap();
    assert!(norm(&pr.psi) < 1e-9);
    assert!(rel(&pr.u, &lin) < 1e-8);
}

#[test]
fn pressure_increment_recovers_gradient_potential() {
    let chi = |x: f64, y: f64| (PI * x).cos() * (PI * y).cos();
    let mut errs = Vec::new();
    for n in [8, 16] {
        let d = disc(n);
        let p = Params::relaxation_preset();
        let st = Stepper::new(d.clone(), p).unwrap();
        let grad = d
            .velocity
            .interpolate_vector(|x, y| {
                [
                    -PI * (PI * x).sin() * (PI * y).cos(),
                    -PI * (PI * x).cos() * (PI * y).sin(),
                ]
            })
            .unwrap();
        let pr = st
            .pressure_correction(&grad, &vec![0.0; d.p1.ndofs])
            .unwrap();
        // psi approximates chi / tau; chi has zero mean already.
        let scaled: Vec<f64> = pr.psi.iter().map(|v| v * p.tau).collect();
        errs.push(l2_error(&d.p1, &scaled, chi).unwrap());
    }
    let order = (errs[0] / errs[1]).log2();
    assert!(order >= 1.8, "order {order}, errors {errs:?}");
}

#[test]
fn coarsening_steps_satisfy_the_energy_identity() {
    let d = disc(8);
    let p = Params::coarsening_preset();
    let st = Stepper::new(d.clone(), p).unwrap();
    let mut s = wavy_state(&d, &p);
    // Start from a consistent chemical potential-free state with no-slip walls.
    for _ in 0..5 {
        let (next, rep) = st.step(&s).unwrap();
        let scale = rep.energy_before.max(1.0);
        assert!(
            rep.identity_residual.unwrap().abs() <= 1e-8 * scale,
            "{rep:?}"
        );
        assert!(
            rep.energy_after <= rep.energy_before + 1e-8 * scale,
            "{rep:?}"
        );
        assert!(rep.reduction.discriminant >= 0.0);
        let res = st.equation_residuals(&s, &next).unwrap();
        assert!(res.max() <= 1e-9, "{res:?}");
        s = next;
        let mean = d.p1_integral(&s.p);
        assert!(mean.abs() <= 1e-12 * (1.0 + norm(&s.p)));
    }
}

#[test]
fn loose_solver_tolerance_shows_in_the_identity() {
    let d = disc(6);
    let mut p = Params::coarsening_preset();
    let s = wavy_state(&d, &p);
    let tight = Stepper::new(d.clone(), p).unwrap().step(&s).unwrap().1;
    p.solver = SolverConfig::with_tolerance(1e-4);
    let loose = Stepper::new(d.clone(), p).unwrap().step(&s).unwrap().1;
    let (a, b) = (
        tight.identity_residual.unwrap().abs(),
        loose.identity_residual.unwrap().abs(),
    );
    assert!(b > 10.0 * a, "tight {a}, loose {b}");
}

#[test]
fn ch_only_mode_conserves_mass() {
    let d = disc(8);
    let p = Params::coarsening_preset();
    let st = Stepper::new(d.clone(), p)
        .unwrap()
        .with_options(SchemeOptions {
            ch_only: true,
            strict_root: false,
        });
    let s0 = init_state(
        &d,
        &p,
        |x, y| 0.1 * (3.0 * x).sin() * (5.0 * y).cos(),
        |_, _| 0.0,
        |_, _| [0.0; 2],
        |_, _| 0.0,
    )
    .unwrap();
    let m0 = d.p1_integral(&s0.phi);
    let mut s = s0.clone();
    for _ in 0..10 {
        let (next, rep) = st.step(&s).unwrap();
        assert!(next.u.iter().all(|&v| v == 0.0));
        assert!(rep.identity_residual.unwrap().abs() <= 1e-8 * rep.energy_before.max(1.0));
        s = next;
    }
    assert!((d.p1_integral(&s.phi) - m0).abs() <= 1e-10);
}

#[test]
fn strict_root_agrees_with_default_selection() {
    let d = disc(4);
    let p = Params::coarsening_preset();
    let s = wavy_state(&d, &p);
    let a = Stepper::new(d.clone(), p).unwrap().step(&s).unwrap().0;
    let b = Stepper::new(d.clone(), p)
        .unwrap()
        .with_options(SchemeOptions {
            ch_only: false,
            strict_root: true,
        })
        .step(&s)
        .unwrap()
        .0;
    assert_eq!(a.rho, b.rho);
}

#[test]
fn errors_carry_the_step_index() {
    let d = disc(3);
    let p = Params::coarsening_preset();
    let st = Stepper::new(d.clone(), p).unwrap();
    let mut s = wavy_state(&d, &p);
    s.step = 41;
    s.rho = -1.0;
    match st.step(&s) {
        Err(Error::Step { step, .. }) => assert_eq!(step, 42),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn negative_root_is_never_chosen() {
    // Projection drains kinetic energy that rho keeps, so the ratio drifts
    // above 2; from there the negative root would be nearer to 1.
    let d = disc(8);
    let mut p = Params::coarsening_preset();
    p.tau = 0.01;
    let stepper = Stepper::new(d.clone(), p).unwrap();
    let mut s = crate::harness::coarsening_initial_state(&d, &p, 2024).unwrap();
    let mut max_ratio = 0.0f64;
    for _ in 0..60 {
        let (next, rep) = stepper.step(&s).unwrap();
        let red = rep.reduction;
        assert!(red.rho > 0.0 && red.r > 0.0);
        max_ratio = max_ratio.max(red.ratio);
        s = next;
    }
    assert!(max_ratio > 2.0, "{max_ratio}");
}
