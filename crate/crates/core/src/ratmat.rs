//! Exact dense linear algebra over the rationals: just enough Gauss–Jordan
//! to invert metrics and solve the small structured systems the flat
//! coordinate construction produces.

use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRational>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn mul(&self, other: &RatMat) -> Result<RatMat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = RatMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let term = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += term;
                }
            }
        }
        Ok(out)
    }

    /// Exact inverse by Gauss–Jordan with partial (first nonzero) pivoting.
    pub fn inverse(&self) -> Result<RatMat> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMat::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[(r, col)].is_zero())
                .ok_or_else(|| Error::Singular(format!("no pivot in column {col}")))?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] /= p.clone();
                inv[(col, j)] /= p.clone();
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for j in 0..n {
                    let ta = &factor * &a[(col, j)];
                    a[(r, j)] -= ta;
                    let ti = &factor * &inv[(col, j)];
                    inv[(r, j)] -= ti;
                }
            }
        }
        Ok(inv)
    }

    pub fn det(&self) -> Result<BigRational> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let pivot = match (col..n).find(|&r| !a[(r, col)].is_zero()) {
                Some(p) => p,
                None => return Ok(BigRational::zero()),
            };
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det *= p.clone();
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let factor = &a[(r, col)] / &p;
                for j in col..n {
                    let t = &factor * &a[(col, j)];
                    a[(r, j)] -= t;
                }
            }
        }
        Ok(det)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for col in 0..self.cols {
            self.data.swap(i * self.cols + col, j * self.cols + col);
        }
    }
}

impl std::ops::Index<(usize, usize)> for RatMat {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

/// Solve a possibly rectangular exact system `A x = b`; returns any solution
/// if the system is consistent, `Singular` if the system is inconsistent or
/// underdetermined in a pivot-relevant way. Free variables are set to zero.
pub fn solve_least_structured(a: &RatMat, b: &[BigRational]) -> Result<Vec<BigRational>> {
    let rows = a.rows;
    let cols = a.cols;
    if rows != b.len() {
        return Err(Error::DimensionMismatch {
            expected: rows,
            got: b.len(),
        });
    }
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let mut pivot_cols: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut row = 0usize;
    for col in 0..cols {
        let pivot = match (row..rows).find(|&r| !m[(r, col)].is_zero()) {
            Some(p) => p,
            None => continue,
        };
        if pivot != row {
            m.swap_rows(pivot, row);
            rhs.swap(pivot, row);
        }
        let p = m[(row, col)].clone();
        for j in 0..cols {
            m[(row, j)] /= p.clone();
        }
        rhs[row] /= p.clone();
        for r in 0..rows {
            if r == row || m[(r, col)].is_zero() {
                continue;
            }
            let factor = m[(r, col)].clone();
            for j in 0..cols {
                let t = &factor * &m[(row, j)];
                m[(r, j)] -= t;
            }
            let t = &factor * &rhs[row];
            rhs[r] -= t;
        }
        pivot_cols.push((row, col));
        row += 1;
        if row == rows {
            break;
        }
    }
    // Consistency: remaining rows must have zero rhs.
    for r in row..rows {
        if !rhs[r].is_zero() {
            return Err(Error::Singular("inconsistent linear system".into()));
        }
    }
    let mut x = vec![BigRational::zero(); cols];
    for (r, c) in pivot_cols {
        x[c] = rhs[r].clone();
    }
    Ok(x)
}

/// Row-reduce the consistent system `A x = b` and return the variables whose
/// values are forced by it: pivot rows whose entries in non-pivot columns all
/// vanish. Errors only on inconsistency.
pub fn forced_solutions(a: &RatMat, b: &[BigRational]) -> Result<Vec<(usize, BigRational)>> {
    let rows = a.rows;
    let cols = a.cols;
    if rows != b.len() {
        return Err(Error::DimensionMismatch {
            expected: rows,
            got: b.len(),
        });
    }
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        let pivot = match (row..rows).find(|&r| !m[(r, col)].is_zero()) {
            Some(p) => p,
            None => continue,
        };
        if pivot != row {
            m.swap_rows(pivot, row);
            rhs.swap(pivot, row);
        }
        let p = m[(row, col)].clone();
        for j in 0..cols {
            m[(row, j)] /= p.clone();
        }
        rhs[row] /= p.clone();
        for r in 0..rows {
            if r == row || m[(r, col)].is_zero() {
                continue;
            }
            let factor = m[(r, col)].clone();
            for j in 0..cols {
                let t = &factor * &m[(row, j)];
                m[(r, j)] -= t;
            }
            let t = &factor * &rhs[row];
            rhs[r] -= t;
        }
        pivots.push((row, col));
        row += 1;
        if row == rows {
            break;
        }
    }
    for r in row..rows {
        if !rhs[r].is_zero() {
            return Err(Error::Singular("inconsistent linear system".into()));
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut forced = Vec::new();
    for &(r, c) in &pivots {
        let mut free_entry = false;
        for j in 0..cols {
            if j != c && !pivot_cols.contains(&j) && !m[(r, j)].is_zero() {
                free_entry = true;
                break;
            }
        }
        if !free_entry {
            // The row also has zero entries in other pivot columns by RREF.
            forced.push((c, rhs[r].clone()));
        }
    }
    Ok(forced)
}
