//! Dense matrices over exact integers and rationals.
//!
//! Only the handful of operations the lattice and field code needs: products,
//! fraction-free determinants and ranks, reduced row echelon forms and
//! inverses. Everything is exact; no floating point appears here.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Index, IndexMut};

pub type Int = BigInt;
pub type Rat = BigRational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| &self.data[i * self.cols..(i + 1) * self.cols]))
            .finish()
    }
}

impl<T> Matrix<T> {
    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Matrix {
            rows: nrows,
            cols,
            data,
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.rows_iter().map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> Self {
        Matrix {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }

    pub fn push_row(&mut self, row: &[T]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(Zero::is_zero)
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Block diagonal matrix with `copies` copies of `self`.
    pub fn block_diag_power(&self, copies: usize) -> Self {
        let mut out = Self::zeros(self.rows * copies, self.cols * copies);
        for c in 0..copies {
            for i in 0..self.rows {
                for j in 0..self.cols {
                    out[(c * self.rows + i, c * self.cols + j)] = self[(i, j)].clone();
                }
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero,
    for<'a> &'a T: std::ops::Mul<&'a T, Output = T>,
{
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    let cell = &mut out[(i, j)];
                    *cell = std::mem::replace(cell, T::zero()) + prod;
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (k, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, cell) in out.iter_mut().enumerate() {
                let prod = a * &self[(k, j)];
                *cell = std::mem::replace(cell, T::zero()) + prod;
            }
        }
        out
    }
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> Rat {
    Rat::from_integer(n.into())
}

pub fn int_to_rat(m: &Matrix<Int>) -> Matrix<Rat> {
    m.map(|x| Rat::from_integer(x.clone()))
}

/// Writes a rational as `"num/den"`, the exact serialization used in every file format.
pub fn rat_to_string(q: &Rat) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rat::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
    }
}

pub fn rat_to_f64(q: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        // Ratios of huge integers: scale down by bit length first.
        let shift = (q.numer().bits().max(q.denom().bits())).saturating_sub(1000) as usize;
        let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Least common multiple of all denominators, and the integer matrix `lcm * m`.
pub fn clear_denominators(m: &Matrix<Rat>) -> (Matrix<Int>, Int) {
    let mut l = Int::one();
    for x in &m.data {
        l = l.lcm(x.denom());
    }
    let out = m.map(|x| (x * Rat::from_integer(l.clone())).to_integer());
    (out, l)
}

/// Reduced row echelon form over the rationals, returning the pivot columns.
pub fn rref(m: &Matrix<Rat>) -> (Matrix<Rat>, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = a[(r, c)].recip();
        for j in c..a.cols {
            a[(r, j)] = &a[(r, j)] * &inv;
        }
        for i in 0..a.rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..a.cols {
                let t = &f * &a[(r, j)];
                a[(i, j)] -= t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rat_rank(m: &Matrix<Rat>) -> usize {
    rref(m).1.len()
}

pub fn rat_det(m: &Matrix<Rat>) -> Rat {
    assert_eq!(m.rows, m.cols);
    let mut a = m.clone();
    let n = a.rows;
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap_rows(p, c);
            det = -det;
        }
        let piv = a[(c, c)].clone();
        det *= &piv;
        for i in c + 1..n {
            if a[(i, c)].is_zero() {
                continue;
            }
            let f = &a[(i, c)] / &piv;
            for j in c..n {
                let t = &f * &a[(c, j)];
                a[(i, j)] -= t;
            }
        }
    }
    det
}

pub fn rat_inverse(m: &Matrix<Rat>) -> Option<Matrix<Rat>> {
    let n = m.rows;
    assert_eq!(n, m.cols);
    let mut aug = Matrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, n + i)] = Rat::one();
    }
    let (r, piv) = rref(&aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    let mut inv = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv[(i, j)] = r[(i, n + j)].clone();
        }
    }
    Some(inv)
}

/// Solves `x * a = b` for a row vector `x`, if a solution exists.
pub fn rat_solve_left(a: &Matrix<Rat>, b: &[Rat]) -> Option<Vec<Rat>> {
    // Transpose to the column system a^T x^T = b^T and row reduce the augmented matrix.
    let at = a.transpose();
    let n = at.cols;
    let mut aug = Matrix::zeros(at.rows, n + 1);
    for i in 0..at.rows {
        for j in 0..n {
            aug[(i, j)] = at[(i, j)].clone();
        }
        aug[(i, n)] = b[i].clone();
    }
    let (r, piv) = rref(&aug);
    if piv.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &c) in piv.iter().enumerate() {
        x[c] = r[(i, n)].clone();
    }
    Some(x)
}

/// Fraction-free (Bareiss) elimination; returns the rank and, for square input, the determinant.
fn bareiss(m: &Matrix<Int>) -> (usize, Int) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut prev = Int::one();
    let mut sign = Int::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap_rows(p, r);
            sign = -sign;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[(r, c)] * &a[(i, j)] - &a[(i, c)] * &a[(r, j)];
                a[(i, j)] = v / &prev;
            }
            a[(i, c)] = Int::zero();
        }
        prev = a[(r, c)].clone();
        r += 1;
    }
    let det = if rows == cols && r == rows {
        sign * a[(rows - 1, cols - 1)].clone()
    } else {
        Int::zero()
    };
    (r, det)
}

pub fn int_rank(m: &Matrix<Int>) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    bareiss(m).0
}

pub fn int_det(m: &Matrix<Int>) -> Int {
    assert_eq!(m.rows, m.cols);
    if m.rows == 0 {
        return Int::one();
    }
    bareiss(m).1
}

/// Gram matrix `b * form * b^T`.
pub fn gram_of(basis: &Matrix<Rat>, form: &Matrix<Rat>) -> Matrix<Rat> {
    basis.mul(form).mul(&basis.transpose())
}

pub fn is_integral(m: &Matrix<Rat>) -> bool {
    m.data.iter().all(|x| x.is_integer())
}

pub fn abs_int(x: &Int) -> Int {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: Vec<Vec<i64>>) -> Matrix<Int> {
        let c = rows[0].len();
        Matrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(Int::from).collect())
                .collect(),
            c,
        )
    }

    #[test]
    fn bareiss_matches_cofactor_determinant() {
        let m = im(vec![vec![2, -1, 0], vec![1, 3, 4], vec![0, 5, -2]]);
        // 2*(3*-2-4*5) - (-1)*(1*-2-0) + 0 = 2*(-26) + (-2) = -54
        assert_eq!(int_det(&m), Int::from(-54));
        assert_eq!(int_rank(&m), 3);
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = im(vec![vec![2, 1], vec![4, 2], vec![6, 3]]);
        assert_eq!(int_rank(&m), 1);
        assert_eq!(rat_rank(&int_to_rat(&m)), 1);
    }

    #[test]
    fn inverse_round_trip() {
        let m = int_to_rat(&im(vec![vec![2, 1], vec![7, 4]]));
        let inv = rat_inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert!(rat_inverse(&int_to_rat(&im(vec![vec![1, 2], vec![2, 4]]))).is_none());
    }

    #[test]
    fn solve_left_finds_combination() {
        let a = int_to_rat(&im(vec![vec![1, 0, 1], vec![0, 1, 1]]));
        let b = vec![rat(2, 1), rat(3, 1), rat(5, 1)];
        assert_eq!(rat_solve_left(&a, &b).unwrap(), vec![rat(2, 1), rat(3, 1)]);
        let bad = vec![rat(1, 1), rat(1, 1), rat(3, 1)];
        assert!(rat_solve_left(&a, &bad).is_none());
    }

    #[test]
    fn rational_string_round_trip() {
        let q = rat(-6, 4);
        assert_eq!(rat_to_string(&q), "-3/2");
        assert_eq!(parse_rat("-3/2").unwrap(), q);
        assert_eq!(parse_rat("7").unwrap(), rat(7, 1));
        assert!(parse_rat("1/0").is_none());
    }
}
