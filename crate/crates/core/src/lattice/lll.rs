//! Exact LLL reduction driven by the integral Gram matrix.

use super::ZLattice;
use crate::matrix::{Int, Matrix, Rat};
use num_traits::{One, Zero};

fn gso(g: &Matrix<Int>) -> (Vec<Vec<Rat>>, Vec<Rat>) {
    let r = g.nrows();
    let mut mu = vec![vec![Rat::zero(); r]; r];
    let mut bstar = vec![Rat::zero(); r];
    for i in 0..r {
        for j in 0..i {
            let mut s = Rat::from_integer(g[(i, j)].clone());
            for l in 0..j {
                s -= &mu[j][l] * &mu[i][l] * &bstar[l];
            }
            mu[i][j] = s / &bstar[j];
        }
        let mut s = Rat::from_integer(g[(i, i)].clone());
        for l in 0..i {
            s -= &mu[i][l] * &mu[i][l] * &bstar[l];
        }
        bstar[i] = s;
    }
    (mu, bstar)
}

fn round(q: &Rat) -> Int {
    (q + Rat::new(Int::one(), Int::from(2))).floor().to_integer()
}

/// Unimodular `U` such that the rows of `U * B` are LLL-reduced, given the
/// Gram matrix of `B`.
pub fn lll_transform(gram: &Matrix<Int>, delta: &Rat) -> Matrix<Int> {
    let r = gram.nrows();
    let mut g = gram.clone();
    let mut u = Matrix::<Int>::identity(r);
    if r < 2 {
        return u;
    }
    let (mut mu, mut bstar) = gso(&g);
    let mut k = 1;
    while k < r {
        for j in (0..k).rev() {
            let q = round(&mu[k][j]);
            if q.is_zero() {
                continue;
            }
            // b_k -= q b_j
            for c in 0..r {
                let t = &u[(j, c)] * &q;
                u[(k, c)] -= t;
            }
            for c in 0..r {
                let t = &g[(j, c)] * &q;
                g[(k, c)] -= t;
            }
            for c in 0..r {
                let t = &g[(c, j)] * &q;
                g[(c, k)] -= t;
            }
            let qr = Rat::from_integer(q);
            for l in 0..j {
                let t = &qr * &mu[j][l];
                mu[k][l] -= t;
            }
            mu[k][j] -= &qr;
        }
        let lhs = &bstar[k];
        let rhs = (delta - &mu[k][k - 1] * &mu[k][k - 1]) * &bstar[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            u.swap_rows(k, k - 1);
            g.swap_rows(k, k - 1);
            g.swap_cols(k, k - 1);
            let fresh = gso(&g);
            mu = fresh.0;
            bstar = fresh.1;
            k = k.max(2) - 1;
        }
    }
    u
}

/// Same lattice with an LLL-reduced basis (exact arithmetic, parameter `delta`).
pub fn lll_reduce(l: &ZLattice, delta: &Rat) -> ZLattice {
    let u = lll_transform(l.gram(), delta);
    l.with_basis(u.mul(l.basis())).expect("unimodular image of a basis")
}

/// Basis change `U` together with the reduced lattice.
pub fn lll_with_transform(l: &ZLattice, delta: &Rat) -> (ZLattice, Matrix<Int>) {
    let u = lll_transform(l.gram(), delta);
    (l.with_basis(u.mul(l.basis())).expect("unimodular image of a basis"), u)
}

pub fn default_delta() -> Rat {
    Rat::new(Int::from(99), Int::from(100))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ZLattice;
    use crate::matrix::int_det;
    use num_traits::Signed;

    fn is_size_reduced(g: &Matrix<Int>) -> bool {
        let (mu, _) = gso(g);
        let half = Rat::new(Int::one(), Int::from(2));
        mu.iter()
            .enumerate()
            .all(|(i, row)| row[..i].iter().all(|m| m.abs() <= half))
    }

    fn plane(rows: &[&[i64]]) -> ZLattice {
        let c = rows[0].len();
        let b = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect(), c);
        ZLattice::standard(c).with_basis(b).unwrap()
    }

    #[test]
    fn reduces_skewed_basis() {
        let l = plane(&[&[1, 0], &[10, 1]]);
        let (red, u) = lll_with_transform(&l, &default_delta());
        assert_eq!(int_det(&u).abs(), Int::one());
        for i in 0..2 {
            assert!(red.gram()[(i, i)] <= Int::from(4));
        }
        assert!(red.hadamard_ratio() <= l.hadamard_ratio() + 1e-12);
        assert!(is_size_reduced(red.gram()));
    }

    #[test]
    fn orthogonal_basis_is_fixed() {
        let l = plane(&[&[2, 0], &[0, 3]]);
        let red = lll_reduce(&l, &default_delta());
        assert_eq!(red.basis(), l.basis());
    }

    #[test]
    fn integer_rounding() {
        assert_eq!(round(&Rat::new(5.into(), 2.into())), Int::from(3));
        assert_eq!(round(&Rat::new((-5).into(), 2.into())), Int::from(-2));
    }
}
