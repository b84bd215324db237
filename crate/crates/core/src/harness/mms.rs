//! Manufactured solution on the unit square.
//!
//! ```text
//! phi = 2 + sin t cos(pi x) cos(pi y)
//! u   = sin t (pi sin^2(pi x) sin(2 pi y), -pi sin^2(pi y) sin(2 pi x))
//! p   = sin t cos(pi x) sin(pi y)
//! mu  = lambda (-lap phi + G'(phi))
//! ```
//!
//! `u` is divergence free and vanishes on the walls; `p` has zero mean.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::scheme::{Forcing, Params};

#[derive(Debug, Clone, Copy)]
pub struct MmsCase {
    pub params: Params,
}

impl MmsCase {
    pub fn new(params: Params) -> Self {
        MmsCase { params }
    }

    pub fn phi(&self, t: f64, x: f64, y: f64) -> f64 {
        2.0 + t.sin() * (PI * x).cos() * (PI * y).cos()
    }

    pub fn phi_t(&self, t: f64, x: f64, y: f64) -> f64 {
        t.cos() * (PI * x).cos() * (PI * y).cos()
    }

    pub fn grad_phi(&self, t: f64, x: f64, y: f64) -> [f64; 2] {
        let s = t.sin();
        [
            -PI * s * (PI * x).sin() * (PI * y).cos(),
            -PI * s * (PI * x).cos() * (PI * y).sin(),
        ]
    }

    pub fn lap_phi(&self, t: f64, x: f64, y: f64) -> f64 {
        -2.0 * PI * PI * t.sin() * (PI * x).cos() * (PI * y).cos()
    }

    fn g1(&self, phi: f64) -> f64 {
        self.params.double_well_derivative(phi)
    }

    fn g2(&self, phi: f64) -> f64 {
        (3.0 * phi * phi - 1.0) / (self.params.epsilon * self.params.epsilon)
    }

    fn g3(&self, phi: f64) -> f64 {
        6.0 * phi / (self.params.epsilon * self.params.epsilon)
    }

    pub fn mu(&self, t: f64, x: f64, y: f64) -> f64 {
        self.params.lambda * (-self.lap_phi(t, x, y) + self.g1(self.phi(t, x, y)))
    }

    /// `grad mu = lambda (2 pi^2 + G''(phi)) grad phi`, since
    /// `lap phi = -2 pi^2 (phi - 2)`.
    pub fn grad_mu(&self, t: f64, x: f64, y: f64) -> [f64; 2] {
        let c = self.params.lambda * (2.0 * PI * PI + self.g2(self.phi(t, x, y)));
        let g = self.grad_phi(t, x, y);
        [c * g[0], c * g[1]]
    }

    pub fn lap_mu(&self, t: f64, x: f64, y: f64) -> f64 {
        let phi = self.phi(t, x, y);
        let g = self.grad_phi(t, x, y);
        let bilap = 4.0 * PI.powi(4) * t.sin() * (PI * x).cos() * (PI * y).cos();
        self.params.lambda
            * (-bilap
                + self.g2(phi) * self.lap_phi(t, x, y)
                + self.g3(phi) * (g[0] * g[0] + g[1] * g[1]))
    }

    pub fn u(&self, t: f64, x: f64, y: f64) -> [f64; 2] {
        self.u_shape(x, y).map(|v| v * t.sin())
    }

    pub fn u_t(&self, t: f64, x: f64, y: f64) -> [f64; 2] {
        self.u_shape(x, y).map(|v| v * t.cos())
    }

    fn u_shape(&self, x: f64, y: f64) -> [f64; 2] {
        let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
        [
            PI * sx * sx * (2.0 * PI * y).sin(),
            -PI * sy * sy * (2.0 * PI * x).sin(),
        ]
    }

    /// `grad[c][d] = d u_c / d x_d`.
    pub fn grad_u(&self, t: f64, x: f64, y: f64) -> [[f64; 2]; 2] {
        let s = t.sin();
        let pi2 = PI * PI;
        let (s2x, s2y) = ((2.0 * PI * x).sin(), (2.0 * PI * y).sin());
        let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
        [
            [
                pi2 * s2x * s2y * s,
                2.0 * pi2 * sx * sx * (2.0 * PI * y).cos() * s,
            ],
            [
                -2.0 * pi2 * sy * sy * (2.0 * PI * x).cos() * s,
                -pi2 * s2x * s2y * s,
            ],
        ]
    }

    pub fn lap_u(&self, t: f64, x: f64, y: f64) -> [f64; 2] {
        let s = t.sin();
        let pi3 = PI.powi(3);
        let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
        let (s2x, s2y) = ((2.0 * PI * x).sin(), (2.0 * PI * y).sin());
        let (c2x, c2y) = ((2.0 * PI * x).cos(), (2.0 * PI * y).cos());
        [
            s * pi3 * (2.0 * c2x * s2y - 4.0 * sx * sx * s2y),
            -s * pi3 * (2.0 * c2y * s2x - 4.0 * sy * sy * s2x),
        ]
    }

    pub fn p(&self, t: f64, x: f64, y: f64) -> f64 {
        t.sin() * (PI * x).cos() * (PI * y).sin()
    }

    pub fn grad_p(&self, t: f64, x: f64, y: f64) -> [f64; 2] {
        let s = t.sin();
        [
            -PI * s * (PI * x).sin() * (PI * y).sin(),
            PI * s * (PI * x).cos() * (PI * y).cos(),
        ]
    }

    /// `g_phi = phi_t + u . grad phi - M lap mu`.
    pub fn forcing_phi(&self, t: f64, x: f64, y: f64) -> f64 {
        let u = self.u(t, x, y);
        let g = self.grad_phi(t, x, y);
        self.phi_t(t, x, y) + u[0] * g[0] + u[1] * g[1]
            - self.params.mobility * self.lap_mu(t, x, y)
    }

    /// `g_u = u_t + (u . grad) u - nu lap u + grad p - mu grad phi`.
    pub fn forcing_u(&self, t: f64, x: f64, y: f64) -> [f64; 2] {
        let u = self.u(t, x, y);
        let gu = self.grad_u(t, x, y);
        let ut = self.u_t(t, x, y);
        let lu = self.lap_u(t, x, y);
        let gp = self.grad_p(t, x, y);
        let mu = self.mu(t, x, y);
        let gphi = self.grad_phi(t, x, y);
        let nu = self.params.nu;
        std::array::from_fn(|c| {
            ut[c] + u[0] * gu[c][0] + u[1] * gu[c][1] - nu * lu[c] + gp[c] - mu * gphi[c]
        })
    }

    pub fn forcing(&self) -> Forcing {
        let a = *self;
        let b = *self;
        Forcing {
            phi: Some(Arc::new(move |t, x, y| a.forcing_phi(t, x, y))),
            velocity: Some(Arc::new(move |t, x, y| b.forcing_u(t, x, y))),
        }
    }
}
