//! Uniform triangulations of an axis-aligned rectangle.
//!
//! Vertices are numbered row-major (x fastest), triangles cell-major with two
//! triangles per cell, both sharing the bottom-left to top-right diagonal.
//! Edges are numbered in order of first appearance while walking triangles
//! and their local edges `(0,1), (1,2), (2,0)`.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect {
        x0: 0.0,
        y0: 0.0,
        x1: 1.0,
        y1: 1.0,
    };

    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if !(x1 > x0 && y1 > y0) || ![x0, y0, x1, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "degenerate rectangle ({x0}, {y0}) - ({x1}, {y1})"
            )));
        }
        Ok(Rect { x0, y0, x1, y1 })
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints, sorted ascending.
    pub vertices: [usize; 2],
    /// Adjacent triangles; the second slot is `None` on the boundary.
    pub triangles: [Option<usize>; 2],
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.triangles[1].is_none()
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
    pub vertices: Vec<Point>,
    /// Counter-clockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    /// Global edge index of local edge `k` (from local vertex `k` to `k+1`).
    pub triangle_edges: Vec<[usize; 3]>,
    pub boundary_vertices: Vec<usize>,
    pub boundary_edges: Vec<usize>,
    h: f64,
}

/// Splits each of the `nx * ny` cells of `rect` into two right triangles.
pub fn build_uniform_mesh(nx: usize, ny: usize, rect: Rect) -> Result<Mesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument(format!(
            "subdivision counts must be positive, got nx={nx}, ny={ny}"
        )));
    }
    let rect = Rect::new(rect.x0, rect.y0, rect.x1, rect.y1)?;
    let dx = (rect.x1 - rect.x0) / nx as f64;
    let dy = (rect.y1 - rect.y0) / ny as f64;

    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        let y = if j == ny {
            rect.y1
        } else {
            rect.y0 + j as f64 * dy
        };
        for i in 0..=nx {
            let x = if i == nx {
                rect.x1
            } else {
                rect.x0 + i as f64 * dx
            };
            vertices.push([x, y]);
        }
    }

    let vid = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let v00 = vid(i, j);
            let v10 = vid(i + 1, j);
            let v01 = vid(i, j + 1);
            let v11 = vid(i + 1, j + 1);
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }

    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut triangle_edges = Vec::with_capacity(triangles.len());
    for (t, tri) in triangles.iter().enumerate() {
        let mut local = [0usize; 3];
        for k in 0..3 {
            let a = tri[k];
            let b = tri[(k + 1) % 3];
            let key = (a.min(b), a.max(b));
            let e = *edge_index.entry(key).or_insert_with(|| {
                edges.push(Edge {
                    vertices: [key.0, key.1],
                    triangles: [None, None],
                });
                edges.len() - 1
            });
            let slot = &mut edges[e].triangles;
            if slot[0].is_none() {
                slot[0] = Some(t);
            } else {
                slot[1] = Some(t);
            }
            local[k] = e;
        }
        triangle_edges.push(local);
    }

    let boundary_edges: Vec<usize> = (0..edges.len())
        .filter(|&e| edges[e].is_boundary())
        .collect();
    let mut on_boundary = vec![false; vertices.len()];
    for &e in &boundary_edges {
        for &v in &edges[e].vertices {
            on_boundary[v] = true;
        }
    }
    let boundary_vertices = (0..vertices.len()).filter(|&v| on_boundary[v]).collect();

    let mut mesh = Mesh {
        rect,
        nx,
        ny,
        vertices,
        triangles,
        edges,
        triangle_edges,
        boundary_vertices,
        boundary_edges,
        h: 0.0,
    };
    mesh.h = mesh
        .triangles
        .iter()
        .map(|tri| {
            (0..3)
                .map(|k| dist(mesh.vertices[tri[k]], mesh.vertices[tri[(k + 1) % 3]]))
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    Ok(mesh)
}

fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

impl Mesh {
    pub fn unit_square(n: usize) -> Result<Mesh> {
        build_uniform_mesh(n, n, Rect::UNIT)
    }

    /// Maximum triangle diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|v| self.vertices[v]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let [a, b] = self.edges[e].vertices.map(|v| self.vertices[v]);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }
}

/// Free-function form of [`Mesh::h`].
pub fn mesh_size(mesh: &Mesh) -> f64 {
    mesh.h()
}
