use super::Discretization;
use crate::error::{Error, Result};
use crate::fem::quadrature::{triangle_quadrature, ASSEMBLY_DEGREE};
use crate::fem::{ElementGeometry, FeSpace, SpaceKind, Tabulation};
use crate::linsolve::CsrMatrix;

/// The constant matrices of the scheme.
///
/// `grad` is `nv x np` with `grad[i][k] = (grad q_k, v_i)`; `div` is `np x nv`
/// with `div[k][i] = (div v_i, q_k)`.
#[derive(Debug, Clone)]
pub struct AssembledForms {
    pub mass_p1: CsrMatrix,
    pub stiffness_p1: CsrMatrix,
    pub mass_v: CsrMatrix,
    pub stiffness_v: CsrMatrix,
    pub grad: CsrMatrix,
    pub div: CsrMatrix,
    pub p1_mass_row_sums: Vec<f64>,
}

impl AssembledForms {
    pub(super) fn empty() -> Self {
        AssembledForms {
            mass_p1: CsrMatrix::zeros(0, 0),
            stiffness_p1: CsrMatrix::zeros(0, 0),
            mass_v: CsrMatrix::zeros(0, 0),
            stiffness_v: CsrMatrix::zeros(0, 0),
            grad: CsrMatrix::zeros(0, 0),
            div: CsrMatrix::zeros(0, 0),
            p1_mass_row_sums: Vec::new(),
        }
    }

    pub(super) fn build(disc: &Discretization) -> Result<Self> {
        let mass_p1 = assemble_mass(&disc.p1)?;
        let stiffness_p1 = assemble_stiffness(&disc.p1)?;
        let mass_v = assemble_mass(&disc.velocity)?;
        let stiffness_v = assemble_stiffness(&disc.velocity)?;
        let grad = assemble_gradient_coupling(disc);
        let div = assemble_divergence_coupling(disc);
        let p1_mass_row_sums = mass_p1.row_sums();
        Ok(AssembledForms {
            mass_p1,
            stiffness_p1,
            mass_v,
            stiffness_v,
            grad,
            div,
            p1_mass_row_sums,
        })
    }
}

/// Scalar reference basis of `kind` at point `q`: values and reference gradients.
pub(crate) fn scalar_basis(kind: SpaceKind, tab: &Tabulation, q: usize) -> (&[f64], &[[f64; 2]]) {
    match kind {
        SpaceKind::P1Scalar => (&tab.p1_val[q], &tab.p1_grad[q]),
        SpaceKind::P2Scalar | SpaceKind::P2Vector => (&tab.p2_val[q], &tab.p2_grad[q]),
    }
}

fn default_tab() -> Result<Tabulation> {
    Ok(Tabulation::new(triangle_quadrature(ASSEMBLY_DEGREE)?))
}

/// Assemble a scalar-node bilinear form; vector spaces get the block-diagonal
/// (componentwise) extension.
fn assemble_nodal(
    space: &FeSpace,
    kernel: impl Fn(f64, f64, [f64; 2], [f64; 2]) -> f64,
) -> Result<CsrMatrix> {
    let tab = default_tab()?;
    let mesh = &space.mesh;
    let nloc = if space.kind == SpaceKind::P1Scalar {
        3
    } else {
        6
    };
    let ncomp = if space.kind.is_vector() { 2 } else { 1 };
    let mut trip = Vec::with_capacity(mesh.num_triangles() * nloc * nloc * ncomp);
    let mut local = vec![0.0; nloc * nloc];
    for t in 0..mesh.num_triangles() {
        let geom = ElementGeometry::new(mesh, t);
        local.iter_mut().for_each(|v| *v = 0.0);
        for q in 0..tab.rule.len() {
            let w = tab.rule.weights[q] * geom.det;
            let (val, rg) = scalar_basis(space.kind, &tab, q);
            let grads: Vec<[f64; 2]> = rg.iter().map(|&g| geom.grad(g)).collect();
            for a in 0..nloc {
                for b in 0..nloc {
                    local[a * nloc + b] += w * kernel(val[a], val[b], grads[a], grads[b]);
                }
            }
        }
        let dofs = space.cell_dofs(t);
        for a in 0..nloc {
            for b in 0..nloc {
                let v = local[a * nloc + b];
                for c in 0..ncomp {
                    trip.push((dofs[ncomp * a + c], dofs[ncomp * b + c], v));
                }
            }
        }
    }
    CsrMatrix::from_triplets(space.ndofs, space.ndofs, trip)
}

pub fn assemble_mass(space: &FeSpace) -> Result<CsrMatrix> {
    assemble_nodal(space, |va, vb, _, _| va * vb)
}

pub fn assemble_stiffness(space: &FeSpace) -> Result<CsrMatrix> {
    assemble_nodal(space, |_, _, ga, gb| ga[0] * gb[0] + ga[1] * gb[1])
}

/// `(f, w_i)` for a scalar space.
pub fn assemble_load(space: &FeSpace, f: impl Fn(f64, f64) -> f64) -> Result<Vec<f64>> {
    assemble_load_with(space, &default_tab()?, f)
}

pub(crate) fn assemble_load_with(
    space: &FeSpace,
    tab: &Tabulation,
    f: impl Fn(f64, f64) -> f64,
) -> Result<Vec<f64>> {
    if space.kind.is_vector() {
        return Err(Error::InvalidArgument(
            "scalar load on a vector space".into(),
        ));
    }
    let mesh = &space.mesh;
    let mut out = vec![0.0; space.ndofs];
    for t in 0..mesh.num_triangles() {
        let geom = ElementGeometry::new(mesh, t);
        let dofs = space.cell_dofs(t);
        for q in 0..tab.rule.len() {
            let [x, y] = geom.map(tab.rule.points[q]);
            let w = tab.rule.weights[q] * geom.det * f(x, y);
            let (val, _) = scalar_basis(space.kind, tab, q);
            for (a, &d) in dofs.iter().enumerate() {
                out[d] += w * val[a];
            }
        }
    }
    Ok(out)
}

/// `(f, v_i)` for the vector space.
pub fn assemble_vector_load(space: &FeSpace, f: impl Fn(f64, f64) -> [f64; 2]) -> Result<Vec<f64>> {
    if !space.kind.is_vector() {
        return Err(Error::InvalidArgument(
            "vector load on a scalar space".into(),
        ));
    }
    let tab = default_tab()?;
    let mesh = &space.mesh;
    let mut out = vec![0.0; space.ndofs];
    for t in 0..mesh.num_triangles() {
        let geom = ElementGeometry::new(mesh, t);
        let dofs = space.cell_dofs(t);
        for q in 0..tab.rule.len() {
            let [x, y] = geom.map(tab.rule.points[q]);
            let fv = f(x, y);
            let w = tab.rule.weights[q] * geom.det;
            for a in 0..6 {
                let phi = tab.p2_val[q][a];
                out[dofs[2 * a]] += w * fv[0] * phi;
                out[dofs[2 * a + 1]] += w * fv[1] * phi;
            }
        }
    }
    Ok(out)
}

/// `(grad f, grad w_i)` for a scalar space, given the gradient of `f`.
pub fn assemble_gradient_load(
    space: &FeSpace,
    grad_f: impl Fn(f64, f64) -> [f64; 2],
) -> Result<Vec<f64>> {
    if space.kind.is_vector() {
        return Err(Error::InvalidArgument(
            "gradient load on a vector space".into(),
        ));
    }
    let tab = default_tab()?;
    let mesh = &space.mesh;
    let mut out = vec![0.0; space.ndofs];
    for t in 0..mesh.num_triangles() {
        let geom = ElementGeometry::new(mesh, t);
        let dofs = space.cell_dofs(t);
        for q in 0..tab.rule.len() {
            let [x, y] = geom.map(tab.rule.points[q]);
            let g = grad_f(x, y);
            let w = tab.rule.weights[q] * geom.det;
            let (_, rg) = scalar_basis(space.kind, &tab, q);
            for (a, &d) in dofs.iter().enumerate() {
                let ga = geom.grad(rg[a]);
                out[d] += w * (g[0] * ga[0] + g[1] * ga[1]);
            }
        }
    }
    Ok(out)
}

fn assemble_gradient_coupling(disc: &Discretization) -> CsrMatrix {
    let tab = disc.assembly_tab();
    let mut trip = Vec::with_capacity(disc.num_triangles() * 36);
    for t in 0..disc.num_triangles() {
        let geom = disc.geometry(t);
        let vd = disc.velocity.cell_dofs(t);
        let pd = disc.p1.cell_dofs(t);
        // P1 gradients are constant per element.
        let gq: Vec<[f64; 2]> = tab.p1_grad[0].iter().map(|&g| geom.grad(g)).collect();
        let mut mean = [0.0; 6];
        for q in 0..tab.rule.len() {
            let w = tab.rule.weights[q] * geom.det;
            for (a, m) in mean.iter_mut().enumerate() {
                *m += w * tab.p2_val[q][a];
            }
        }
        for a in 0..6 {
            for k in 0..3 {
                for c in 0..2 {
                    trip.push((vd[2 * a + c], pd[k], mean[a] * gq[k][c]));
                }
            }
        }
    }
    CsrMatrix::from_triplets(disc.velocity.ndofs, disc.p1.ndofs, trip).expect("in-range triplets")
}

fn assemble_divergence_coupling(disc: &Discretization) -> CsrMatrix {
    let tab = disc.assembly_tab();
    let mut trip = Vec::with_capacity(disc.num_triangles() * 36);
    for t in 0..disc.num_triangles() {
        let geom = disc.geometry(t);
        let vd = disc.velocity.cell_dofs(t);
        let pd = disc.p1.cell_dofs(t);
        let mut local = [[[0.0; 2]; 3]; 6];
        for q in 0..tab.rule.len() {
            let w = tab.rule.weights[q] * geom.det;
            for a in 0..6 {
                let g = geom.grad(tab.p2_grad[q][a]);
                for k in 0..3 {
                    let qv = tab.p1_val[q][k];
                    local[a][k][0] += w * g[0] * qv;
                    local[a][k][1] += w * g[1] * qv;
                }
            }
        }
        for a in 0..6 {
            for k in 0..3 {
                for c in 0..2 {
                    trip.push((pd[k], vd[2 * a + c], local[a][k][c]));
                }
            }
        }
    }
    CsrMatrix::from_triplets(disc.p1.ndofs, disc.velocity.ndofs, trip).expect("in-range triplets")
}
