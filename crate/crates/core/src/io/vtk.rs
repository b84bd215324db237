//! Legacy VTK (ASCII, version 3.0) unstructured-grid snapshots.
//!
//! Fields live on the mesh vertices. For P2 velocity only the vertex nodes
//! are written.

use std::io::Write;
use std::path::Path;

use crate::assembly::Discretization;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::scheme::State;

/// VTK cell type of a linear triangle.
pub const VTK_TRIANGLE: u8 = 5;

pub struct PointField<'a> {
    pub name: &'a str,
    pub data: FieldData<'a>,
}

pub enum FieldData<'a> {
    /// One value per vertex.
    Scalar(&'a [f64]),
    /// Interleaved `(x, y)` per node; the first `2 * num_vertices` entries
    /// are used.
    Vector(&'a [f64]),
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(Error::InvalidArgument(format!(
            "bad VTK field name '{name}'"
        )));
    }
    Ok(())
}

pub fn write_vtk<W: Write>(
    mut out: W,
    mesh: &Mesh,
    title: &str,
    fields: &[PointField],
) -> Result<()> {
    let nv = mesh.num_vertices();
    let nt = mesh.num_triangles();
    for f in fields {
        check_name(f.name)?;
        let (need, got) = match f.data {
            FieldData::Scalar(d) => (nv, d.len()),
            FieldData::Vector(d) => (2 * nv, d.len()),
        };
        if got < need {
            return Err(Error::DimensionMismatch {
                context: "vtk field",
                expected: need,
                got,
            });
        }
    }
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{title}")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {nv} double")?;
    for p in &mesh.vertices {
        writeln!(out, "{:e} {:e} 0", p[0], p[1])?;
    }
    writeln!(out, "CELLS {nt} {}", 4 * nt)?;
    for t in &mesh.triangles {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(out, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(out, "{VTK_TRIANGLE}")?;
    }
    if !fields.is_empty() {
        writeln!(out, "POINT_DATA {nv}")?;
    }
    for f in fields {
        match f.data {
            FieldData::Scalar(d) => {
                writeln!(out, "SCALARS {} double 1", f.name)?;
                writeln!(out, "LOOKUP_TABLE default")?;
                for v in &d[..nv] {
                    writeln!(out, "{v:e}")?;
                }
            }
            FieldData::Vector(d) => {
                writeln!(out, "VECTORS {} double", f.name)?;
                for k in 0..nv {
                    writeln!(out, "{:e} {:e} 0", d[2 * k], d[2 * k + 1])?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// `phi`, `mu`, `p` and the vertex values of `u`.
pub fn write_state_vtk(path: &Path, disc: &Discretization, state: &State) -> Result<()> {
    state.check(disc)?;
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    let fields = [
        PointField {
            name: "phi",
            data: FieldData::Scalar(&state.phi),
        },
        PointField {
            name: "mu",
            data: FieldData::Scalar(&state.mu),
        },
        PointField {
            name: "p",
            data: FieldData::Scalar(&state.p),
        },
        PointField {
            name: "u",
            data: FieldData::Vector(&state.u),
        },
    ];
    write_vtk(
        file,
        &disc.mesh,
        &format!("chns step {} t={:e}", state.step, state.time),
        &fields,
    )
}
