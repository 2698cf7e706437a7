//! Sparse matrices in compressed sparse row form.
//!
//! Matrices are assembled from `(row, col, value)` triplets; duplicate
//! coordinates are summed during assembly, so after construction each
//! `(row, col)` pair is stored at most once with entries sorted by row then
//! column. The text serialization is a `rows cols nnz` header followed by one
//! `row col value` line per stored entry (0-based indices); values are
//! printed with Rust's shortest round-trip formatting, so write/read cycles
//! are bit-exact.

use std::io::{BufRead, Write};

use crate::dense::DenseMatrix;
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(CoreError::invalid(format!(
                    "triplet ({r}, {c}) outside {rows}x{cols} matrix"
                )));
            }
            entries.push((r, c, v));
        }
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("merge target exists") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(SparseMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        let triplets: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &triplets).expect("identity triplets are in bounds")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        match self.col_idx[lo..hi].binary_search(&c) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    /// Column indices and values of row `r`.
    pub fn row_entries(&self, r: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            let (cols, vals) = self.row_entries(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    /// Sparse * dense product; `x` must have `self.cols` rows.
    pub fn mul_dense(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.rows() != self.cols {
            return Err(CoreError::shape(format!(
                "sparse {}x{} * dense {}x{}",
                self.rows,
                self.cols,
                x.rows(),
                x.cols()
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, x.cols());
        for r in 0..self.rows {
            let (cols, vals) = self.row_entries(r);
            let orow = out.row_mut(r);
            for (&c, &v) in cols.iter().zip(vals) {
                for (o, &b) in orow.iter_mut().zip(x.row(c)) {
                    *o += v * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(CoreError::shape(format!(
                "sparse {}x{} * vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let mut out = vec![0.0; self.rows];
        for r in 0..self.rows {
            let (cols, vals) = self.row_entries(r);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            out[r] = acc;
        }
        Ok(out)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let triplets: Vec<_> = self.iter().map(|(r, c, v)| (c, r, v)).collect();
        SparseMatrix::from_triplets(self.cols, self.rows, &triplets)
            .expect("transposed triplets are in bounds")
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.iter() {
            out.set(r, c, v);
        }
        out
    }

    /// Block-diagonal stack of `blocks` copies of `self`.
    pub fn block_diagonal(&self, blocks: usize) -> SparseMatrix {
        let mut triplets = Vec::with_capacity(self.nnz() * blocks);
        for b in 0..blocks {
            for (r, c, v) in self.iter() {
                triplets.push((b * self.rows + r, b * self.cols + c, v));
            }
        }
        SparseMatrix::from_triplets(self.rows * blocks, self.cols * blocks, &triplets)
            .expect("block triplets are in bounds")
    }

    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "{} {} {}", self.rows, self.cols, self.nnz())?;
        for (r, c, v) in self.iter() {
            writeln!(w, "{r} {c} {v}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<SparseMatrix> {
        let mut lines = r.lines().enumerate();
        let (rows, cols, nnz) = loop {
            let (idx, line) = lines
                .next()
                .ok_or_else(|| CoreError::parse(1, "missing sparse matrix header"))?;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut it = trimmed.split_whitespace();
            let parse = |tok: Option<&str>, what: &str| -> Result<usize> {
                tok.ok_or_else(|| CoreError::parse(idx + 1, format!("header missing {what}")))?
                    .parse::<usize>()
                    .map_err(|e| CoreError::parse(idx + 1, format!("bad {what}: {e}")))
            };
            let rows = parse(it.next(), "row count")?;
            let cols = parse(it.next(), "column count")?;
            let nnz = parse(it.next(), "entry count")?;
            if it.next().is_some() {
                return Err(CoreError::parse(idx + 1, "trailing tokens in header"));
            }
            break (rows, cols, nnz);
        };

        let mut triplets = Vec::with_capacity(nnz);
        for (idx, line) in lines {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut it = trimmed.split_whitespace();
            let row: usize = it
                .next()
                .ok_or_else(|| CoreError::parse(idx + 1, "missing row index"))?
                .parse()
                .map_err(|e| CoreError::parse(idx + 1, format!("bad row index: {e}")))?;
            let col: usize = it
                .next()
                .ok_or_else(|| CoreError::parse(idx + 1, "missing column index"))?
                .parse()
                .map_err(|e| CoreError::parse(idx + 1, format!("bad column index: {e}")))?;
            let val: f64 = it
                .next()
                .ok_or_else(|| CoreError::parse(idx + 1, "missing value"))?
                .parse()
                .map_err(|e| CoreError::parse(idx + 1, format!("bad value: {e}")))?;
            if it.next().is_some() {
                return Err(CoreError::parse(idx + 1, "trailing tokens in entry"));
            }
            if row >= rows || col >= cols {
                return Err(CoreError::parse(
                    idx + 1,
                    format!("entry ({row}, {col}) outside {rows}x{cols} matrix"),
                ));
            }
            triplets.push((row, col, val));
        }
        if triplets.len() != nnz {
            return Err(CoreError::parse(
                0,
                format!("header promised {nnz} entries, found {}", triplets.len()),
            ));
        }
        SparseMatrix::from_triplets(rows, cols, &triplets)
    }

    pub fn write_text_file(&self, path: &std::path::Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_text(&mut w)
    }

    pub fn read_text_file(path: &std::path::Path) -> Result<SparseMatrix> {
        Self::read_text(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}
