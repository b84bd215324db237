use crate::error::{check_len, Error, Result};

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        check_len("csr row offsets", nrows + 1, row_offsets.len())?;
        check_len("csr values", col_indices.len(), values.len())?;
        if row_offsets[0] != 0 || row_offsets[nrows] != col_indices.len() {
            return Err(Error::InvalidArgument(
                "csr offsets do not span the entries".into(),
            ));
        }
        for i in 0..nrows {
            let (s, e) = (row_offsets[i], row_offsets[i + 1]);
            if e < s {
                return Err(Error::InvalidArgument(format!(
                    "csr offsets decrease at row {i}"
                )));
            }
            let cols = &col_indices[s..e];
            if cols.iter().any(|&c| c >= ncols) || cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "csr row {i}: column indices out of range or not strictly increasing"
                )));
            }
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds a matrix from `(row, col, value)` entries, summing duplicates
    /// in insertion order.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut entries: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        if let Some(&(r, c, _)) = entries.iter().find(|(r, c, _)| *r >= nrows || *c >= ncols) {
            return Err(Error::InvalidArgument(format!(
                "triplet ({r}, {c}) outside {nrows}x{ncols}"
            )));
        }
        // stable: duplicates keep insertion order, so sums are reproducible
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_offsets = vec![0usize; nrows + 1];
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            row_offsets: vec![0; nrows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("spmv input", self.ncols, x.len())?;
        let mut y = vec![0.0; self.nrows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x`; lengths must already match.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                s += self.values[k] * x[self.col_indices[k]];
            }
            *yi = s;
        }
    }

    /// `A^T x`.
    pub fn spmv_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("transposed spmv input", self.nrows, x.len())?;
        let mut y = vec![0.0; self.ncols];
        for (i, xi) in x.iter().enumerate() {
            for (j, v) in self.row(i) {
                y[j] += v * xi;
            }
        }
        Ok(y)
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nrows);
        debug_assert_eq!(y.len(), self.ncols);
        (0..self.nrows)
            .map(|i| x[i] * self.row(i).map(|(j, v)| v * y[j]).sum::<f64>())
            .sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(_, v)| v).sum())
            .collect()
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut entries = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                entries.push((j, i, v));
            }
        }
        CsrMatrix::from_triplets(self.ncols, self.nrows, entries).expect("transpose stays in range")
    }

    pub fn scaled(&self, alpha: f64) -> CsrMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// `sum_k alpha_k A_k` over matrices of equal shape.
    pub fn linear_combination(terms: &[(f64, &CsrMatrix)]) -> Result<CsrMatrix> {
        let (nrows, ncols) = match terms.first() {
            Some((_, m)) => (m.nrows, m.ncols),
            None => return Err(Error::InvalidArgument("empty linear combination".into())),
        };
        let mut entries = Vec::new();
        for (alpha, m) in terms {
            check_len("linear combination rows", nrows, m.nrows)?;
            check_len("linear combination cols", ncols, m.ncols)?;
            for i in 0..m.nrows {
                entries.extend(m.row(i).map(|(j, v)| (i, j, alpha * v)));
            }
        }
        CsrMatrix::from_triplets(nrows, ncols, entries)
    }

    /// Assembles `[[a, b], [c, d]]` from four blocks.
    pub fn block_2x2(
        a: &CsrMatrix,
        b: &CsrMatrix,
        c: &CsrMatrix,
        d: &CsrMatrix,
    ) -> Result<CsrMatrix> {
        check_len("block rows", a.nrows, b.nrows)?;
        check_len("block rows", c.nrows, d.nrows)?;
        check_len("block cols", a.ncols, c.ncols)?;
        check_len("block cols", b.ncols, d.ncols)?;
        let (r0, c0) = (a.nrows, a.ncols);
        let mut entries = Vec::with_capacity(a.nnz() + b.nnz() + c.nnz() + d.nnz());
        for (m, dr, dc) in [(a, 0, 0), (b, 0, c0), (c, r0, 0), (d, r0, c0)] {
            for i in 0..m.nrows {
                entries.extend(m.row(i).map(|(j, v)| (i + dr, j + dc, v)));
            }
        }
        CsrMatrix::from_triplets(r0 + c.nrows, c0 + b.ncols, entries)
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry.
    pub fn max_asymmetry(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Free-function form of [`CsrMatrix::spmv`].
pub fn spmv(a: &CsrMatrix, x: &[f64]) -> Result<Vec<f64>> {
    a.spmv(x)
}
