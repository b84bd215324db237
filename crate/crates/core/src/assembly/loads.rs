//! Load vectors of the explicit (lagged) terms.

use super::Discretization;
use crate::error::Result;
use crate::scheme::Params;

impl Discretization {
    /// `(u . grad phi, w_i)` on P1.
    pub fn convective_load_scalar(&self, u: &[f64], phi: &[f64]) -> Result<Vec<f64>> {
        self.check_velocity("convective_load_scalar: u", u)?;
        self.check_p1("convective_load_scalar: phi", phi)?;
        let tab = self.assembly_tab();
        let mut out = vec![0.0; self.p1.ndofs];
        for t in 0..self.num_triangles() {
            let det = self.geometry(t).det;
            let dofs = self.p1.cell_dofs(t);
            for q in 0..tab.rule.len() {
                let (_, gphi) = self.p1_sample(tab, t, q, phi);
                let (uv, _) = self.velocity_sample(tab, t, q, u);
                let f = tab.rule.weights[q] * det * (uv[0] * gphi[0] + uv[1] * gphi[1]);
                for i in 0..3 {
                    out[dofs[i]] += f * tab.p1_val[q][i];
                }
            }
        }
        Ok(out)
    }

    /// `((u . grad) u, v_i)` on the velocity space.
    pub fn convective_load_vector(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_velocity("convective_load_vector: u", u)?;
        self.velocity_load(|t, q| {
            let (uv, g) = self.velocity_sample(self.assembly_tab(), t, q, u);
            [
                uv[0] * g[0][0] + uv[1] * g[0][1],
                uv[0] * g[1][0] + uv[1] * g[1][1],
            ]
        })
    }

    /// `(mu grad phi, v_i)` on the velocity space.
    pub fn mu_grad_phi_load(&self, mu: &[f64], phi: &[f64]) -> Result<Vec<f64>> {
        self.check_p1("mu_grad_phi_load: mu", mu)?;
        self.check_p1("mu_grad_phi_load: phi", phi)?;
        self.velocity_load(|t, q| {
            let tab = self.assembly_tab();
            let (m, _) = self.p1_sample(tab, t, q, mu);
            let (_, g) = self.p1_sample(tab, t, q, phi);
            [m * g[0], m * g[1]]
        })
    }

    /// `(F'(phi_h), w_i)` with `F'` applied pointwise at quadrature nodes.
    pub fn fprime_load(&self, phi: &[f64], params: &Params) -> Result<Vec<f64>> {
        self.check_p1("fprime_load: phi", phi)?;
        let tab = self.assembly_tab();
        let mut out = vec![0.0; self.p1.ndofs];
        for t in 0..self.num_triangles() {
            let det = self.geometry(t).det;
            let dofs = self.p1.cell_dofs(t);
            for q in 0..tab.rule.len() {
                let (v, _) = self.p1_sample(tab, t, q, phi);
                let f = tab.rule.weights[q] * det * params.potential_derivative(v);
                for i in 0..3 {
                    out[dofs[i]] += f * tab.p1_val[q][i];
                }
            }
        }
        Ok(out)
    }

    /// `(grad p, v_i) = G p`.
    pub fn grad_p_load(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_p1("grad_p_load: p", p)?;
        self.forms.grad.spmv(p)
    }

    /// `(div u, q_k) = D u`.
    pub fn div_load(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_velocity("div_load: u", u)?;
        self.forms.div.spmv(u)
    }

    fn velocity_load(&self, f: impl Fn(usize, usize) -> [f64; 2]) -> Result<Vec<f64>> {
        let tab = self.assembly_tab();
        let mut out = vec![0.0; self.velocity.ndofs];
        for t in 0..self.num_triangles() {
            let det = self.geometry(t).det;
            let dofs = self.velocity.cell_dofs(t);
            for q in 0..tab.rule.len() {
                let fv = f(t, q);
                let w = tab.rule.weights[q] * det;
                for a in 0..6 {
                    let phi = w * tab.p2_val[q][a];
                    out[dofs[2 * a]] += fv[0] * phi;
                    out[dofs[2 * a + 1]] += fv[1] * phi;
                }
            }
        }
        Ok(out)
    }
}
