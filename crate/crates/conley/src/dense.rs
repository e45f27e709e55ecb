//! Small dense matrices over a prime field.
//!
//! These back the block extractors and the whole verification path. Blocks
//! are per-(grade, dimension) and stay small, so plain row-major storage and
//! Gauss-Jordan elimination are all that is needed; the sparse machinery in
//! [`crate::reduction`] is where performance lives.

use crate::field::{FieldError, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
    field: PrimeField,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize, field: PrimeField) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
            field,
        }
    }

    pub fn identity(n: usize, field: PrimeField) -> Self {
        let mut m = Self::zeros(n, n, field);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<u64>>, field: PrimeField) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c, field);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v % field.characteristic());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: u64) {
        let cur = self.get(i, j);
        self.set(i, j, self.field.add(cur, v));
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        assert_eq!(self.field, other.field);
        let p = self.field.characteristic();
        let mut out = DenseMatrix::zeros(self.rows, other.cols, self.field);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let cur = out.get(i, j);
                        out.set(i, j, (cur + a * b) % p);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (o, &v) in out.data.iter_mut().zip(other.data.iter()) {
            *o = self.field.add(*o, v);
        }
        out
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (o, &v) in out.data.iter_mut().zip(other.data.iter()) {
            *o = self.field.sub(*o, v);
        }
        out
    }

    pub fn neg(&self) -> DenseMatrix {
        let mut out = self.clone();
        for o in out.data.iter_mut() {
            *o = self.field.neg(*o);
        }
        out
    }

    pub fn scale(&self, c: u64) -> DenseMatrix {
        let mut out = self.clone();
        for o in out.data.iter_mut() {
            *o = self.field.mul(*o, c);
        }
        out
    }

    /// Column rank by destructive Gaussian elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let f = m.field;
        let mut rank = 0;
        let mut pivot_row = 0;
        for col in 0..m.cols {
            let Some(r) = (pivot_row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            m.swap_rows(r, pivot_row);
            let inv = f.inv(m.get(pivot_row, col)).expect("nonzero pivot");
            for rr in (pivot_row + 1)..m.rows {
                let v = m.get(rr, col);
                if v != 0 {
                    let c = f.mul(v, inv);
                    for cc in col..m.cols {
                        let sub = f.mul(c, m.get(pivot_row, cc));
                        let cur = m.get(rr, cc);
                        m.set(rr, cc, f.sub(cur, sub));
                    }
                }
            }
            rank += 1;
            pivot_row += 1;
            if pivot_row == m.rows {
                break;
            }
        }
        rank
    }

    /// Inverse by Gauss-Jordan; fails on singular input.
    pub fn inverse(&self) -> Result<DenseMatrix, FieldError> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let f = self.field;
        let mut a = self.clone();
        let mut inv = DenseMatrix::identity(n, f);
        for col in 0..n {
            let Some(r) = (col..n).find(|&r| a.get(r, col) != 0) else {
                return Err(FieldError::DivisionByZero(f.characteristic()));
            };
            a.swap_rows(r, col);
            inv.swap_rows(r, col);
            let piv_inv = f.inv(a.get(col, col))?;
            for cc in 0..n {
                a.set(col, cc, f.mul(a.get(col, cc), piv_inv));
                inv.set(col, cc, f.mul(inv.get(col, cc), piv_inv));
            }
            for rr in 0..n {
                if rr == col {
                    continue;
                }
                let c = a.get(rr, col);
                if c != 0 {
                    for cc in 0..n {
                        let sa = f.mul(c, a.get(col, cc));
                        let si = f.mul(c, inv.get(col, cc));
                        a.set(rr, cc, f.sub(a.get(rr, cc), sa));
                        inv.set(rr, cc, f.sub(inv.get(rr, cc), si));
                    }
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
