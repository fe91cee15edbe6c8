//! Dense row-major matrices over the integers and the rationals.
//!
//! Integer determinants use Bareiss fraction-free elimination; everything
//! over the rationals goes through exact Gaussian elimination.

use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, BigRat};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RatMatrix = Matrix<BigRat>;
pub type IntMatrix = Matrix<BigInt>;

impl<T: Clone> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from row vectors. An empty list gives a 0x0 matrix.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        let nrows = rows.len();
        Ok(Matrix {
            rows: nrows,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Submatrix on the given columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Self {
        Matrix::from_fn(self.rows, columns.len(), |i, j| self.get(i, columns[j]).clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), self.cols, |i, j| self.get(rows[i], j).clone())
    }

    /// Submatrix with the listed columns removed, remaining columns kept in order.
    pub fn without_columns(&self, removed: &[usize]) -> Self {
        let kept: Vec<usize> = (0..self.cols).filter(|j| !removed.contains(j)).collect();
        self.select_columns(&kept)
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(size: usize) -> Self {
        Matrix::from_fn(size, size, |i, j| if i == j { T::one() } else { T::zero() })
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + Add<Output = T>,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, t| acc + self.get(i, t) * other.get(t, j))
        }))
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }
}

impl IntMatrix {
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|x| BigRat::from_integer(x.clone()))
    }

    /// Bareiss fraction-free determinant. Every intermediate division is exact.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "determinant of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_rows();
        let mut negate = false;
        let mut previous = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        negate = !negate;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let value = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = value / &previous;
                }
                a[i][k] = BigInt::zero();
            }
            previous = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        Ok(if negate { -det } else { det })
    }

    pub fn rank(&self) -> usize {
        self.to_rational().rank()
    }
}

impl RatMatrix {
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Ok(IntMatrix::from_i64_rows(rows)?.to_rational())
    }

    /// Exact determinant by Gaussian elimination over the rationals.
    pub fn determinant(&self) -> Result<BigRat> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "determinant of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut det = BigRat::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(BigRat::zero());
            };
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            let pivot = a[k][k].clone();
            det *= &pivot;
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let factor = &a[i][k] / &pivot;
                for j in k + 1..n {
                    let delta = &factor * &a[k][j];
                    a[i][j] -= delta;
                }
            }
        }
        Ok(det)
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut a = self.to_rows();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let inv = a[r][c].recip();
            for x in a[r].iter_mut() {
                *x *= &inv;
            }
            for i in 0..self.rows {
                if i != r && !a[i][c].is_zero() {
                    let factor = a[i][c].clone();
                    for j in c..self.cols {
                        let delta = &factor * &a[r][j];
                        a[i][j] -= delta;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let reduced = Matrix::from_vec(self.rows, self.cols, a.into_iter().flatten().collect())
            .expect("shape preserved");
        (reduced, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Matrix whose columns form a basis of the right kernel.
    pub fn kernel_basis(&self) -> RatMatrix {
        let (reduced, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = RatMatrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis.set(f, k, BigRat::one());
            for (row, &p) in pivots.iter().enumerate() {
                basis.set(p, k, -reduced.get(row, f).clone());
            }
        }
        basis
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let augmented = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                BigRat::one()
            } else {
                BigRat::zero()
            }
        });
        let (reduced, pivots) = augmented.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| reduced.get(i, n + j).clone()))
    }

    /// Largest absolute entry in a column below `start`, ties to the lowest row.
    pub(crate) fn largest_pivot(rows: &[Vec<BigRat>], col: usize, start: usize) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, row) in rows.iter().enumerate().skip(start) {
            if row[col].is_zero() {
                continue;
            }
            match best {
                Some(b) if rows[b][col].abs() >= row[col].abs() => {}
                _ => best = Some(i),
            }
        }
        best
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(format_rational).collect())
            .collect();
        write!(f, "RatMatrix{rows:?}")
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(ToString::to_string).collect())
            .collect();
        write!(f, "IntMatrix{rows:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};
    use proptest::prelude::*;

    fn cofactor_det(m: &[Vec<i64>]) -> i128 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] as i128 * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn identity_and_small_determinants() {
        assert_eq!(RatMatrix::identity(3).determinant().unwrap(), int(1));
        let m = RatMatrix::from_i64_rows(&[vec![1, 1], vec![1, 2]]).unwrap();
        assert_eq!(m.determinant().unwrap(), int(1));
        let z = IntMatrix::from_i64_rows(&[vec![1, 1], vec![1, 2]]).unwrap();
        assert_eq!(z.determinant().unwrap(), BigInt::from(1));
        assert_eq!(IntMatrix::identity(0).determinant().unwrap(), BigInt::from(1));
    }

    #[test]
    fn non_square_determinant_is_an_error() {
        let m = RatMatrix::zeros(2, 3);
        assert!(matches!(m.determinant(), Err(Error::Dimension(_))));
        assert!(matches!(m.map(|_| BigInt::zero()).determinant(), Err(Error::Dimension(_))));
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let m = RatMatrix::zeros(2, 3);
        let k = m.kernel_basis();
        assert_eq!((k.rows(), k.cols()), (3, 3));
        assert_eq!(k.rank(), 3);
    }

    #[test]
    fn trinomial_kernel() {
        let m = RatMatrix::from_i64_rows(&[vec![1, -2, 1]]).unwrap();
        let k = m.kernel_basis();
        assert_eq!(k.cols(), 2);
        assert!(m.mul(&k).unwrap().is_zero());
        assert_eq!(k.rank(), 2);
    }

    #[test]
    fn inverse_round_trip() {
        let m = RatMatrix::from_rows(vec![
            vec![rat(1, 2), int(3), int(0)],
            vec![int(-1), int(2), rat(5, 3)],
            vec![int(4), int(0), int(1)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), RatMatrix::identity(3));
        assert!(RatMatrix::from_i64_rows(&[vec![1, 2], vec![2, 4]]).unwrap().inverse().is_none());
    }

    fn small_matrix(size: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(prop::collection::vec(-9i64..=9, size), size)
    }

    proptest! {
        #[test]
        fn determinant_matches_cofactor_expansion(rows in small_matrix(5)) {
            let expected = BigInt::from(cofactor_det(&rows));
            let ints = IntMatrix::from_i64_rows(&rows).unwrap();
            prop_assert_eq!(ints.determinant().unwrap(), expected.clone());
            prop_assert_eq!(ints.to_rational().determinant().unwrap(), BigRat::from_integer(expected));
        }

        #[test]
        fn determinant_is_multiplicative(a in small_matrix(4), b in small_matrix(4)) {
            let a = RatMatrix::from_i64_rows(&a).unwrap();
            let b = RatMatrix::from_i64_rows(&b).unwrap();
            let product = a.mul(&b).unwrap().determinant().unwrap();
            prop_assert_eq!(product, a.determinant().unwrap() * b.determinant().unwrap());
        }

        #[test]
        fn kernel_annihilates_and_completes_rank(
            rows in 1usize..5,
            cols in 1usize..7,
            seed in prop::collection::vec(-3i64..=3, 36),
        ) {
            let m = RatMatrix::from_fn(rows, cols, |i, j| int(seed[i * 6 + j]));
            let k = m.kernel_basis();
            prop_assert!(m.mul(&k).unwrap().is_zero());
            prop_assert_eq!(m.rank() + k.cols(), cols);
            prop_assert_eq!(k.rank(), k.cols());
        }
    }
}
