//! Galerkin matrices, load vectors, Dirichlet elimination, norms and energies.
//!
//! [`Discretization`] bundles one mesh with the P1 scalar space (phase field,
//! chemical potential, pressure) and the P2 vector space (velocity), together
//! with per-element geometry, tabulated bases and the constant matrices of
//! the scheme.

mod dirichlet;
mod forms;
mod loads;
mod norms;

use std::sync::Arc;

pub use dirichlet::{apply_dirichlet, DirichletSystem};
pub use forms::{
    assemble_gradient_load, assemble_load, assemble_mass, assemble_stiffness, assemble_vector_load,
    AssembledForms,
};
pub use norms::{
    h1_error, h1_seminorm, l2_error, l2_norm, scalar_error_norms, vector_error_norms,
    DiscreteEnergies, ErrorNorms,
};

use crate::error::{Error, Result};
use crate::fem::quadrature::{triangle_quadrature, ASSEMBLY_DEGREE, NORM_DEGREE};
use crate::fem::{build_space, ElementGeometry, FeSpace, SpaceKind, Tabulation};
use crate::mesh::Mesh;

#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Arc<Mesh>,
    pub p1: FeSpace,
    pub velocity: FeSpace,
    pub forms: AssembledForms,
    geometry: Vec<ElementGeometry>,
    assembly_tab: Tabulation,
    norm_tab: Tabulation,
}

impl Discretization {
    pub fn new(mesh: Mesh) -> Result<Self> {
        let mesh = Arc::new(mesh);
        let p1 = build_space(mesh.clone(), SpaceKind::P1Scalar);
        let velocity = build_space(mesh.clone(), SpaceKind::P2Vector);
        let geometry = (0..mesh.num_triangles())
            .map(|t| ElementGeometry::new(&mesh, t))
            .collect();
        let assembly_tab = Tabulation::new(triangle_quadrature(ASSEMBLY_DEGREE)?);
        let norm_tab = Tabulation::new(triangle_quadrature(NORM_DEGREE)?);
        let mut disc = Discretization {
            mesh,
            p1,
            velocity,
            forms: AssembledForms::empty(),
            geometry,
            assembly_tab,
            norm_tab,
        };
        disc.forms = AssembledForms::build(&disc)?;
        Ok(disc)
    }

    pub fn unit_square(n: usize) -> Result<Self> {
        Discretization::new(Mesh::unit_square(n)?)
    }

    pub fn geometry(&self, t: usize) -> &ElementGeometry {
        &self.geometry[t]
    }

    pub fn num_triangles(&self) -> usize {
        self.geometry.len()
    }

    pub(crate) fn assembly_tab(&self) -> &Tabulation {
        &self.assembly_tab
    }

    pub(crate) fn norm_tab(&self) -> &Tabulation {
        &self.norm_tab
    }

    pub(crate) fn check_p1(&self, context: &'static str, v: &[f64]) -> Result<()> {
        self.p1.check(context, v)
    }

    pub(crate) fn check_velocity(&self, context: &'static str, v: &[f64]) -> Result<()> {
        self.velocity.check(context, v)
    }

    /// `int_Omega phi_h`, from the P1 mass row sums.
    pub fn p1_integral(&self, coeffs: &[f64]) -> f64 {
        crate::linsolve::vecops::dot(&self.forms.p1_mass_row_sums, coeffs)
    }

    /// P1 value and (constant) gradient on triangle `t` at tabulated point `q`.
    pub(crate) fn p1_sample(
        &self,
        tab: &Tabulation,
        t: usize,
        q: usize,
        coeffs: &[f64],
    ) -> (f64, [f64; 2]) {
        let dofs = self.p1.cell_dofs(t);
        let geom = &self.geometry[t];
        let mut val = 0.0;
        let mut grad = [0.0; 2];
        for i in 0..3 {
            let c = coeffs[dofs[i]];
            val += c * tab.p1_val[q][i];
            let g = geom.grad(tab.p1_grad[q][i]);
            grad[0] += c * g[0];
            grad[1] += c * g[1];
        }
        (val, grad)
    }

    /// Velocity value and gradient `grad[c][d] = d u_c / d x_d`.
    pub(crate) fn velocity_sample(
        &self,
        tab: &Tabulation,
        t: usize,
        q: usize,
        coeffs: &[f64],
    ) -> ([f64; 2], [[f64; 2]; 2]) {
        let dofs = self.velocity.cell_dofs(t);
        let geom = &self.geometry[t];
        let mut val = [0.0; 2];
        let mut grad = [[0.0; 2]; 2];
        for a in 0..6 {
            let phi = tab.p2_val[q][a];
            let g = geom.grad(tab.p2_grad[q][a]);
            for c in 0..2 {
                let u = coeffs[dofs[2 * a + c]];
                val[c] += u * phi;
                grad[c][0] += u * g[0];
                grad[c][1] += u * g[1];
            }
        }
        (val, grad)
    }
}

/// Scalar-space sample on an arbitrary scalar [`FeSpace`] (P1 or P2).
pub(crate) fn scalar_sample(
    space: &FeSpace,
    geom: &ElementGeometry,
    tab: &Tabulation,
    t: usize,
    q: usize,
    coeffs: &[f64],
) -> Result<(f64, [f64; 2])> {
    let dofs = space.cell_dofs(t);
    let mut val = 0.0;
    let mut grad = [0.0; 2];
    let mut acc = |c: f64, v: f64, g: [f64; 2]| {
        let g = geom.grad(g);
        val += c * v;
        grad[0] += c * g[0];
        grad[1] += c * g[1];
    };
    match space.kind {
        SpaceKind::P1Scalar => {
            for i in 0..3 {
                acc(coeffs[dofs[i]], tab.p1_val[q][i], tab.p1_grad[q][i]);
            }
        }
        SpaceKind::P2Scalar => {
            for i in 0..6 {
                acc(coeffs[dofs[i]], tab.p2_val[q][i], tab.p2_grad[q][i]);
            }
        }
        SpaceKind::P2Vector => {
            return Err(Error::InvalidArgument(
                "scalar sample of a vector space".into(),
            ))
        }
    }
    Ok((val, grad))
}
