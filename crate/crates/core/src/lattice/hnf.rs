//! Hermite and Smith normal forms over the integers.

use crate::matrix::{Int, Matrix};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

fn row_sub(m: &mut Matrix<Int>, dst: usize, src: usize, q: &Int) {
    if q.is_zero() {
        return;
    }
    for j in 0..m.ncols() {
        let t = &m[(src, j)] * q;
        m[(dst, j)] -= t;
    }
}

fn col_sub(m: &mut Matrix<Int>, dst: usize, src: usize, q: &Int) {
    if q.is_zero() {
        return;
    }
    for i in 0..m.nrows() {
        let t = &m[(i, src)] * q;
        m[(i, dst)] -= t;
    }
}

fn negate_row(m: &mut Matrix<Int>, i: usize) {
    for x in m.row_mut(i) {
        *x = -&*x;
    }
}

/// Replaces rows `a`, `b` of `m` by `(x ra + y rb, -(rb0/g) ra + (ra0/g) rb)`.
fn gcd_combine(m: &mut Matrix<Int>, a: usize, b: usize, x: &Int, y: &Int, u: &Int, v: &Int) {
    for j in 0..m.ncols() {
        let ra = m[(a, j)].clone();
        let rb = m[(b, j)].clone();
        m[(a, j)] = x * &ra + y * &rb;
        m[(b, j)] = u * &ra + v * &rb;
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `U * M = H`, `U`
/// unimodular, pivots positive and strictly to the right row by row, entries
/// above a pivot reduced into `[0, pivot)`, zero rows at the bottom.
pub fn hermite_normal_form(m: &Matrix<Int>) -> (Matrix<Int>, Matrix<Int>) {
    let rows = m.nrows();
    let cols = m.ncols();
    let mut h = m.clone();
    let mut u = Matrix::<Int>::identity(rows);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        for i in (r + 1)..rows {
            if h[(i, c)].is_zero() {
                continue;
            }
            if h[(r, c)].is_zero() {
                h.swap_rows(r, i);
                u.swap_rows(r, i);
                continue;
            }
            let a = h[(r, c)].clone();
            let b = h[(i, c)].clone();
            let e = a.extended_gcd(&b);
            let (ua, vb) = (-(&b / &e.gcd), &a / &e.gcd);
            gcd_combine(&mut h, r, i, &e.x, &e.y, &ua, &vb);
            gcd_combine(&mut u, r, i, &e.x, &e.y, &ua, &vb);
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut u, r);
        }
        let piv = h[(r, c)].clone();
        for i in 0..r {
            let q = h[(i, c)].div_floor(&piv);
            row_sub(&mut h, i, r, &q);
            row_sub(&mut u, i, r, &q);
        }
        r += 1;
    }
    (h, u)
}

/// Nonzero rows of the Hermite normal form: a canonical basis of the row lattice.
pub fn hnf_basis(m: &Matrix<Int>) -> Matrix<Int> {
    let (h, _) = hermite_normal_form(m);
    let rows: Vec<Vec<Int>> = (0..h.nrows())
        .filter(|&i| !h.is_zero_row(i))
        .map(|i| h.row(i).to_vec())
        .collect();
    Matrix::from_rows(rows, m.ncols())
}

/// Smith normal form `P * M * Q = D`.
#[derive(Debug, Clone)]
pub struct Smith {
    /// Nonzero elementary divisors `d_1 | d_2 | ...`, all positive.
    pub divisors: Vec<Int>,
    pub p: Matrix<Int>,
    pub q: Matrix<Int>,
    pub q_inv: Matrix<Int>,
    pub d: Matrix<Int>,
}

pub fn smith_normal_form(m: &Matrix<Int>) -> Smith {
    let rows = m.nrows();
    let cols = m.ncols();
    let mut a = m.clone();
    let mut p = Matrix::<Int>::identity(rows);
    let mut q = Matrix::<Int>::identity(cols);
    let mut qi = Matrix::<Int>::identity(cols);
    let mut divisors = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[(i, j)].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish(a, p, q, qi, divisors);
            };
            a.swap_rows(t, bi);
            p.swap_rows(t, bi);
            a.swap_cols(t, bj);
            q.swap_cols(t, bj);
            qi.swap_rows(t, bj);
            let piv = a[(t, t)].clone();
            let mut clean = true;
            for i in (t + 1)..rows {
                let f = a[(i, t)].div_floor(&piv);
                row_sub(&mut a, i, t, &f);
                row_sub(&mut p, i, t, &f);
                clean &= a[(i, t)].is_zero();
            }
            for j in (t + 1)..cols {
                let f = a[(t, j)].div_floor(&piv);
                col_sub(&mut a, j, t, &f);
                col_sub(&mut q, j, t, &f);
                // Q' = Q E, E^{-1} adds f * row j to row t.
                for c in 0..cols {
                    let v = &qi[(j, c)] * &f;
                    qi[(t, c)] += v;
                }
                clean &= a[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            let mut bad = None;
            'search: for i in (t + 1)..rows {
                for j in (t + 1)..cols {
                    if !(&a[(i, j)] % &piv).is_zero() {
                        bad = Some(i);
                        break 'search;
                    }
                }
            }
            match bad {
                Some(i) => {
                    let one = -Int::one();
                    row_sub(&mut a, t, i, &one);
                    row_sub(&mut p, t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            negate_row(&mut a, t);
            negate_row(&mut p, t);
        }
        divisors.push(a[(t, t)].clone());
    }
    finish(a, p, q, qi, divisors)
}

fn finish(d: Matrix<Int>, p: Matrix<Int>, q: Matrix<Int>, q_inv: Matrix<Int>, divisors: Vec<Int>) -> Smith {
    Smith {
        divisors,
        p,
        q,
        q_inv,
        d,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int_det;

    fn im(rows: &[&[i64]]) -> Matrix<Int> {
        let c = rows[0].len();
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect(), c)
    }

    #[test]
    fn hnf_examples() {
        let m = im(&[&[2, 4], &[1, 3]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(h, im(&[&[1, 1], &[0, 2]]));
        assert_eq!(u.mul(&m), h);
        assert_eq!(int_det(&u).abs(), Int::one());

        let id = im(&[&[1, 0], &[0, 1]]);
        assert_eq!(hermite_normal_form(&id), (id.clone(), id.clone()));

        let z = im(&[&[0, 0], &[3, 6]]);
        let (h, u) = hermite_normal_form(&z);
        assert_eq!(h, im(&[&[3, 6], &[0, 0]]));
        assert_eq!(u.mul(&z), h);
    }

    #[test]
    fn snf_examples() {
        for (m, want) in [
            (im(&[&[2, 0], &[0, 3]]), vec![1, 6]),
            (im(&[&[1, 0], &[0, 1]]), vec![1, 1]),
            (im(&[&[2, 0], &[0, 2]]), vec![2, 2]),
            (im(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]), vec![2, 6, 12]),
        ] {
            let s = smith_normal_form(&m);
            assert_eq!(s.divisors, want.iter().map(|&x| Int::from(x)).collect::<Vec<_>>());
            assert_eq!(s.p.mul(&m).mul(&s.q), s.d);
            assert_eq!(s.q.mul(&s.q_inv), Matrix::identity(m.ncols()));
        }
    }
}
