use crate::error::{check_len, Error, Result};
use crate::linsolve::{solve_spd, CsrMatrix, SolveStats, SolverConfig};

/// Symmetric elimination of Dirichlet dofs.
///
/// Constrained rows and columns are zeroed with a unit diagonal; known column
/// contributions move to the right-hand side and constrained entries of the
/// right-hand side take the prescribed values.
pub fn apply_dirichlet(
    matrix: &CsrMatrix,
    rhs: &[f64],
    dofs: &[usize],
    values: &[f64],
) -> Result<(CsrMatrix, Vec<f64>)> {
    check_len("apply_dirichlet: values", dofs.len(), values.len())?;
    let sys = DirichletSystem::new(matrix, dofs)?;
    let mut field = vec![0.0; matrix.nrows()];
    for (&d, &v) in dofs.iter().zip(values) {
        field[d] = v;
    }
    let b = sys.lift(rhs, &field)?;
    Ok((sys.matrix, b))
}

/// A matrix with its Dirichlet dofs eliminated, kept together with the
/// original so new right-hand sides can be lifted without reassembly.
#[derive(Debug, Clone)]
pub struct DirichletSystem {
    pub matrix: CsrMatrix,
    original: CsrMatrix,
    dofs: Vec<usize>,
    constrained: Vec<bool>,
}

impl DirichletSystem {
    pub fn new(matrix: &CsrMatrix, dofs: &[usize]) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "apply_dirichlet: square matrix",
                expected: n,
                got: matrix.ncols(),
            });
        }
        let mut constrained = vec![false; n];
        for &d in dofs {
            if d >= n {
                return Err(Error::InvalidArgument(format!(
                    "Dirichlet dof {d} out of range for {n} unknowns"
                )));
            }
            constrained[d] = true;
        }
        let mut eliminated = matrix.clone();
        let offsets = matrix.row_offsets().to_vec();
        let cols = matrix.col_indices().to_vec();
        let vals = eliminated.values_mut();
        for i in 0..n {
            for k in offsets[i]..offsets[i + 1] {
                let j = cols[k];
                if constrained[i] || constrained[j] {
                    vals[k] = if i == j { 1.0 } else { 0.0 };
                }
            }
        }
        // A constrained dof with no stored diagonal would leave a zero row.
        for &d in dofs {
            if matrix.row(d).all(|(j, _)| j != d) {
                return Err(Error::InvalidArgument(format!(
                    "Dirichlet dof {d} has no stored diagonal entry"
                )));
            }
        }
        let mut dofs = dofs.to_vec();
        dofs.sort_unstable();
        dofs.dedup();
        Ok(DirichletSystem {
            matrix: eliminated,
            original: matrix.clone(),
            dofs,
            constrained,
        })
    }

    pub fn dofs(&self) -> &[usize] {
        &self.dofs
    }

    pub fn is_constrained(&self, i: usize) -> bool {
        self.constrained[i]
    }

    /// Right-hand side of the eliminated system. Boundary values are read
    /// from `field` at the constrained dofs; other entries of `field` are ignored.
    pub fn lift(&self, rhs: &[f64], field: &[f64]) -> Result<Vec<f64>> {
        let n = self.matrix.nrows();
        check_len("apply_dirichlet: rhs", n, rhs.len())?;
        check_len("apply_dirichlet: boundary field", n, field.len())?;
        let mut known = vec![0.0; n];
        for &d in &self.dofs {
            known[d] = field[d];
        }
        let mut b = rhs.to_vec();
        if known.iter().any(|&v| v != 0.0) {
            let shift = self.original.spmv(&known)?;
            for i in 0..n {
                if !self.constrained[i] {
                    b[i] -= shift[i];
                }
            }
        }
        for &d in &self.dofs {
            b[d] = known[d];
        }
        Ok(b)
    }

    /// Solves the eliminated SPD system for the unknowns off the walls and
    /// adds the wall values of `field` exactly.
    pub fn solve_spd(
        &self,
        rhs: &[f64],
        field: &[f64],
        config: &SolverConfig,
    ) -> Result<(Vec<f64>, SolveStats)> {
        let mut b = self.lift(rhs, field)?;
        for &d in &self.dofs {
            b[d] = 0.0;
        }
        let (mut x, stats) = solve_spd(&self.matrix, &b, config)?;
        for &d in &self.dofs {
            x[d] = field[d];
        }
        Ok((x, stats))
    }

    /// Right-hand side for homogeneous conditions.
    pub fn lift_homogeneous(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        check_len("apply_dirichlet: rhs", self.matrix.nrows(), rhs.len())?;
        let mut b = rhs.to_vec();
        for &d in &self.dofs {
            b[d] = 0.0;
        }
        Ok(b)
    }
}
