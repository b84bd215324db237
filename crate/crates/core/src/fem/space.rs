use std::sync::Arc;

use super::basis::{p1_basis, p2_basis, EDGE_VERTS};
use super::quadrature::QuadratureRule;
use crate::error::{check_len, Error, Result};
use crate::mesh::{Mesh, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    P1Scalar,
    P2Scalar,
    P2Vector,
}

impl SpaceKind {
    /// Local dofs per triangle.
    pub fn local_dofs(self) -> usize {
        match self {
            SpaceKind::P1Scalar => 3,
            SpaceKind::P2Scalar => 6,
            SpaceKind::P2Vector => 12,
        }
    }

    pub fn is_vector(self) -> bool {
        self == SpaceKind::P2Vector
    }
}

/// Degree-of-freedom map of a Lagrange space on a [`Mesh`].
///
/// Scalar nodes are numbered vertices first, then edge midpoints (P2).
/// Vector dofs are interleaved: node `a` owns dofs `2a` (x) and `2a + 1` (y).
#[derive(Debug, Clone)]
pub struct FeSpace {
    pub kind: SpaceKind,
    pub mesh: Arc<Mesh>,
    pub ndofs: usize,
    cell_dofs: Vec<usize>,
    /// Sorted ascending.
    pub boundary_dofs: Vec<usize>,
    /// Coordinates of the Lagrange node carrying each dof.
    pub dof_coords: Vec<Point>,
}

pub fn build_space(mesh: Arc<Mesh>, kind: SpaceKind) -> FeSpace {
    let nv = mesh.num_vertices();
    let ne = mesh.num_edges();
    let mut node_coords: Vec<Point> = mesh.vertices.clone();
    let mut node_boundary = vec![false; nv];
    for &v in &mesh.boundary_vertices {
        node_boundary[v] = true;
    }
    let with_edges = kind != SpaceKind::P1Scalar;
    if with_edges {
        for e in 0..ne {
            node_coords.push(mesh.edge_midpoint(e));
            node_boundary.push(mesh.edges[e].is_boundary());
        }
    }
    let nodes_per_cell = if with_edges { 6 } else { 3 };
    let mut cell_nodes = Vec::with_capacity(mesh.num_triangles() * nodes_per_cell);
    for (t, tri) in mesh.triangles.iter().enumerate() {
        cell_nodes.extend_from_slice(tri);
        if with_edges {
            for k in 0..3 {
                cell_nodes.push(nv + mesh.triangle_edges[t][k]);
            }
        }
    }

    let (ndofs, cell_dofs, boundary_dofs, dof_coords) = if kind.is_vector() {
        let cell_dofs = cell_nodes
            .iter()
            .flat_map(|&n| [2 * n, 2 * n + 1])
            .collect();
        let boundary = (0..node_coords.len())
            .filter(|&n| node_boundary[n])
            .flat_map(|n| [2 * n, 2 * n + 1])
            .collect();
        let coords = node_coords.iter().flat_map(|&p| [p, p]).collect();
        (2 * node_coords.len(), cell_dofs, boundary, coords)
    } else {
        let boundary = (0..node_coords.len())
            .filter(|&n| node_boundary[n])
            .collect();
        (node_coords.len(), cell_nodes, boundary, node_coords)
    };

    FeSpace {
        kind,
        mesh,
        ndofs,
        cell_dofs,
        boundary_dofs,
        dof_coords,
    }
}

impl FeSpace {
    pub fn cell_dofs(&self, t: usize) -> &[usize] {
        let n = self.kind.local_dofs();
        &self.cell_dofs[t * n..(t + 1) * n]
    }

    /// Number of scalar Lagrange nodes.
    pub fn num_nodes(&self) -> usize {
        if self.kind.is_vector() {
            self.ndofs / 2
        } else {
            self.ndofs
        }
    }

    /// Nodal interpolant of a scalar function.
    pub fn interpolate(&self, f: impl Fn(f64, f64) -> f64) -> Result<Vec<f64>> {
        if self.kind.is_vector() {
            return Err(Error::InvalidArgument(
                "scalar interpolation into a vector space".into(),
            ));
        }
        Ok(self.dof_coords.iter().map(|p| f(p[0], p[1])).collect())
    }

    /// Nodal interpolant of a vector field.
    pub fn interpolate_vector(&self, f: impl Fn(f64, f64) -> [f64; 2]) -> Result<Vec<f64>> {
        if !self.kind.is_vector() {
            return Err(Error::InvalidArgument(
                "vector interpolation into a scalar space".into(),
            ));
        }
        let mut out = vec![0.0; self.ndofs];
        for n in 0..self.num_nodes() {
            let p = self.dof_coords[2 * n];
            let v = f(p[0], p[1]);
            out[2 * n] = v[0];
            out[2 * n + 1] = v[1];
        }
        Ok(out)
    }

    pub fn check(&self, context: &'static str, coeffs: &[f64]) -> Result<()> {
        check_len(context, self.ndofs, coeffs.len())
    }
}

/// Affine map of a triangle from the reference element.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub origin: Point,
    /// Columns are `v1 - v0` and `v2 - v0`.
    pub jac: [[f64; 2]; 2],
    /// `J^{-T}`, maps reference gradients to physical ones.
    pub inv_jac_t: [[f64; 2]; 2],
    pub det: f64,
}

impl ElementGeometry {
    pub fn new(mesh: &Mesh, t: usize) -> Self {
        let [a, b, c] = mesh.triangles[t].map(|v| mesh.vertices[v]);
        let jac = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv_jac_t = [
            [jac[1][1] / det, -jac[1][0] / det],
            [-jac[0][1] / det, jac[0][0] / det],
        ];
        ElementGeometry {
            origin: a,
            jac,
            inv_jac_t,
            det,
        }
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det
    }

    pub fn map(&self, l: [f64; 3]) -> Point {
        let (x, y) = (l[1], l[2]);
        [
            self.origin[0] + self.jac[0][0] * x + self.jac[0][1] * y,
            self.origin[1] + self.jac[1][0] * x + self.jac[1][1] * y,
        ]
    }

    pub fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_jac_t[0][0] * g[0] + self.inv_jac_t[0][1] * g[1],
            self.inv_jac_t[1][0] * g[0] + self.inv_jac_t[1][1] * g[1],
        ]
    }
}

/// Reference basis values and gradients at the points of one rule.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub rule: QuadratureRule,
    pub p1_val: Vec<[f64; 3]>,
    pub p1_grad: Vec<[[f64; 2]; 3]>,
    pub p2_val: Vec<[f64; 6]>,
    pub p2_grad: Vec<[[f64; 2]; 6]>,
}

impl Tabulation {
    pub fn new(rule: QuadratureRule) -> Self {
        let (p1_val, p1_grad) = rule.points.iter().map(|&l| p1_basis(l)).unzip();
        let (p2_val, p2_grad) = rule.points.iter().map(|&l| p2_basis(l)).unzip();
        Tabulation {
            rule,
            p1_val,
            p1_grad,
            p2_val,
            p2_grad,
        }
    }
}

/// Local edge `k` of triangle `t` has the same endpoints as mesh edge
/// `triangle_edges[t][k]`; checked in tests, relied on by P2 numbering.
#[allow(dead_code)]
fn local_edge_consistent(mesh: &Mesh, t: usize, k: usize) -> bool {
    let tri = mesh.triangles[t];
    let [a, b] = EDGE_VERTS[k];
    let mut want = [tri[a], tri[b]];
    want.sort_unstable();
    mesh.edges[mesh.triangle_edges[t][k]].vertices == want
}
