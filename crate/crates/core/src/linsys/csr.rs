use std::io::Write;

use crate::error::{Error, Result};

/// Compressed-sparse-row matrix with canonical (sorted, deduplicated) rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed.
    pub fn from_triplets(n_rows: usize, n_cols: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; n_rows + 1];
        for &(r, c, _) in entries {
            if r >= n_rows || c >= n_cols {
                return Err(Error::IndexOutOfRange { row: r, col: c, n: n_rows.max(n_cols) });
            }
            counts[r + 1] += 1;
        }
        for i in 0..n_rows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; entries.len()];
        let mut vals = vec![0.0; entries.len()];
        for &(r, c, v) in entries {
            cols[next[r]] = c;
            vals[next[r]] = v;
            next[r] += 1;
        }
        Ok(Self::canonicalize(n_rows, n_cols, &counts, &cols, &vals))
    }

    /// Builds a matrix from per-row `(col, value)` lists, summing duplicates.
    pub fn from_rows(n_cols: usize, rows: &[Vec<(usize, f64)>]) -> Result<Self> {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            for &(c, v) in row {
                if c >= n_cols {
                    return Err(Error::IndexOutOfRange { row: r, col: c, n: rows.len().max(n_cols) });
                }
                cols.push(c);
                vals.push(v);
            }
            offsets.push(cols.len());
        }
        Ok(Self::canonicalize(rows.len(), n_cols, &offsets, &cols, &vals))
    }

    fn canonicalize(n_rows: usize, n_cols: usize, offsets: &[usize], cols: &[usize], vals: &[f64]) -> Self {
        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        row_offsets.push(0);
        let mut col_indices = Vec::with_capacity(cols.len());
        let mut values = Vec::with_capacity(vals.len());
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for r in 0..n_rows {
            scratch.clear();
            scratch.extend((offsets[r]..offsets[r + 1]).map(|k| (cols[k], vals[k])));
            // stable sort keeps the summation order of duplicates deterministic
            scratch.sort_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < scratch.len() {
                let c = scratch[k].0;
                let mut v = 0.0;
                while k < scratch.len() && scratch[k].0 == c {
                    v += scratch[k].1;
                    k += 1;
                }
                col_indices.push(c);
                values.push(v);
            }
            row_offsets.push(col_indices.len());
        }
        SparseMatrix { n_rows, n_cols, row_offsets, col_indices, values }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
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

    /// Iterates over `(col, value)` pairs of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_offsets[r]..self.row_offsets[r + 1];
        self.col_indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_offsets[r]..self.row_offsets[r + 1];
        match self.col_indices[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut triplets = Vec::with_capacity(self.nnz());
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                triplets.push((c, r, v));
            }
        }
        SparseMatrix::from_triplets(self.n_cols, self.n_rows, &triplets)
            .expect("transpose indices are in range by construction")
    }

    /// True when every stored entry matches its mirror within `tol`
    /// (absolute, scaled by the largest magnitude in the matrix).
    pub fn is_symmetric(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let t = self.transpose();
        if t.col_indices != self.col_indices || t.row_offsets != self.row_offsets {
            // structural mismatch is tolerated only where the mirror is numerically zero
            return (0..self.n_rows).all(|r| self.row(r).all(|(c, v)| (v - self.get(c, r)).abs() <= tol * scale))
                && (0..t.n_rows).all(|r| t.row(r).all(|(c, v)| (v - t.get(c, r)).abs() <= tol * scale));
        }
        self.values.iter().zip(&t.values).all(|(a, b)| (a - b).abs() <= tol * scale)
    }

    /// `out = A v`.
    pub fn mul_into(&self, v: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate().take(self.n_rows) {
            let mut acc = 0.0;
            for k in self.row_offsets[r]..self.row_offsets[r + 1] {
                acc += self.values[k] * v[self.col_indices[k]];
            }
            *o = acc;
        }
    }

    /// Plain-text coordinate dump, one `row col value` triple per line.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                writeln!(w, "{r} {c} {v:e}")?;
            }
        }
        Ok(())
    }
}

/// Canonical CSR for a square `n x n` matrix.
pub fn csr_from_triplets(n: usize, entries: &[(usize, usize, f64)]) -> Result<SparseMatrix> {
    SparseMatrix::from_triplets(n, n, entries)
}

pub fn spmv(a: &SparseMatrix, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != a.n_cols {
        return Err(Error::DimensionMismatch { expected: a.n_cols, got: v.len() });
    }
    let mut out = vec![0.0; a.n_rows];
    a.mul_into(v, &mut out);
    Ok(out)
}
