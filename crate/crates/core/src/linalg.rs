//! Exact dense linear algebra over Q.
//!
//! Ranks and determinants use fraction-free (Bareiss) elimination; kernels and
//! particular solutions come from the reduced row echelon form. Both routes are
//! exact, so there are no pivot tolerances anywhere.

use std::fmt;

use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
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

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Rational) {
        self.data[i * self.cols + j] = x;
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    /// Fraction-free elimination; returns the rank and, for square input, the determinant.
    fn bareiss(&self) -> (usize, Rational) {
        let mut m = self.clone();
        let mut prev = Rational::one();
        let mut sign = Rational::one();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, row * m.cols + j);
                }
                sign = -sign;
            }
            let pivot = m.get(row, col).clone();
            for i in row + 1..m.rows {
                let lead = m.get(i, col).clone();
                for j in col + 1..m.cols {
                    let v = &(&(m.get(i, j) * &pivot) - &(&lead * m.get(row, j))) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, col, Rational::zero());
            }
            prev = pivot;
            row += 1;
        }
        let det = if self.rows == self.cols && row == self.rows {
            if self.rows == 0 {
                Rational::one()
            } else {
                &sign * m.get(self.rows - 1, self.cols - 1)
            }
        } else {
            Rational::zero()
        };
        (row, det)
    }

    pub fn rank(&self) -> usize {
        self.bareiss().0
    }

    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        self.bareiss().1
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, row * m.cols + j);
            }
            let inv = m.get(row, col).recip();
            for j in col..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for i in 0..m.rows {
                if i == row || m.get(i, col).is_zero() {
                    continue;
                }
                let f = m.get(i, col).clone();
                for j in col..m.cols {
                    let v = m.get(i, j) - &(&f * m.get(row, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f);
                }
                v
            })
            .collect()
    }

    /// Solution of `self * x = b` with all free variables set to zero, if any.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Some(x)
    }

    /// Indices of a maximal independent subset of the columns (greedy, left to right).
    pub fn pivot_columns(&self) -> Vec<usize> {
        self.rref().1
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Rank of a family of vectors of common length `n`.
pub fn rank_of(n: usize, vectors: &[Vec<Rational>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_columns(n, vectors).rank()
}

/// True when `v` lies in the span of `vectors`.
pub fn in_span(vectors: &[Vec<Rational>], v: &[Rational]) -> bool {
    if v.iter().all(Rational::is_zero) {
        return true;
    }
    if vectors.is_empty() {
        return false;
    }
    Matrix::from_columns(v.len(), vectors).solve(v).is_some()
}

/// Greedily extends an independent family by vectors from `candidates`
/// (in order) until it spans the span of both; returns the added vectors.
pub fn extend_basis(n: usize, base: &[Vec<Rational>], candidates: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut current: Vec<Vec<Rational>> = base.to_vec();
    let mut rank = rank_of(n, &current);
    let mut added = Vec::new();
    for c in candidates {
        current.push(c.clone());
        let r = rank_of(n, &current);
        if r > rank {
            rank = r;
            added.push(c.clone());
        } else {
            current.pop();
        }
    }
    added
}

/// Standard basis vector `e_i` of length `n`.
pub fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_determinant() {
        let m = Matrix::from_int_rows(&[&[2, 1, 0], &[4, 2, 0], &[0, 0, 3]]);
        assert_eq!(m.rank(), 2);
        assert!(m.determinant().is_zero());
        let m = Matrix::from_int_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.determinant(), Rational::from_int(-1));
        let m = Matrix::from_int_rows(&[&[2, 3, 1], &[4, 1, -2], &[1, 0, 5]]);
        // cofactor expansion: 2(5-0) - 3(20+2) + 1(0-1) = -57
        assert_eq!(m.determinant(), Rational::from_int(-57));
    }

    #[test]
    fn kernel_is_annihilated() {
        let m = Matrix::from_int_rows(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let k = m.kernel();
        assert_eq!(k.len(), 4 - m.rank());
        for v in &k {
            assert!(m.mul_vec(v).iter().all(Rational::is_zero));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = Matrix::from_int_rows(&[&[1, 1], &[1, 1]]);
        let ok = m.solve(&[Rational::from_int(2), Rational::from_int(2)]).unwrap();
        assert_eq!(m.mul_vec(&ok), vec![Rational::from_int(2), Rational::from_int(2)]);
        assert!(m.solve(&[Rational::from_int(1), Rational::from_int(2)]).is_none());
    }

    #[test]
    fn extend_to_full_basis() {
        let base = vec![vec![Rational::one(), Rational::one(), Rational::zero()]];
        let cands: Vec<_> = (0..3).map(|i| unit(3, i)).collect();
        let added = extend_basis(3, &base, &cands);
        assert_eq!(added, vec![unit(3, 0), unit(3, 2)]);
    }
}
