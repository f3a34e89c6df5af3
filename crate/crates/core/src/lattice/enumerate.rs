//! Fincke–Pohst short-vector enumeration.
//!
//! Pruning bounds come from a floating LDLᵀ of the LLL-reduced Gram matrix
//! with a small slack; every candidate leaf is then accepted or rejected by
//! the exact integer quadratic form, so the floating step can only cost time,
//! never correctness.

use super::lll::{default_delta, lll_with_transform};
use super::ZLattice;
use crate::error::{Error, Result};
use num_traits::ToPrimitive;
use rayon::prelude::*;

/// Predicted-count ceiling above which enumeration refuses to start.
pub const DEFAULT_CAP: usize = 50_000_000;

/// Relative tolerance of the radius test `|v|^2 <= R^2`.
pub const RADIUS_REL_TOL: f64 = 1e-12;

/// The single radius predicate used everywhere: unscaled exact squared norm
/// `q` times the analytic scale against `radius_sq`.
pub fn within_radius(q: f64, scale_sq: f64, radius_sq: f64) -> bool {
    q * scale_sq <= radius_sq * (1.0 + RADIUS_REL_TOL)
}

/// Volume of the unit ball in `R^dim`.
pub fn ball_volume(dim: usize) -> f64 {
    let mut v = if dim.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut s = if dim.is_multiple_of(2) { 2 } else { 3 };
    while s <= dim {
        v *= 2.0 * std::f64::consts::PI / s as f64;
        s += 2;
    }
    v
}

/// Predicted number of lattice points of norm at most `radius`:
/// `V(r) (radius + ρ)^r / H` with `ρ` the certified covering bound.
pub fn count_estimate(l: &ZLattice, radius: f64) -> f64 {
    let r = l.rank();
    ball_volume(r) * (radius + l.covering_radius_bound()).powi(r as i32) / l.height()
}

pub fn short_vectors(l: &ZLattice, radius: f64) -> Result<Vec<Vec<i64>>> {
    short_vectors_capped(l, radius, DEFAULT_CAP)
}

/// All lattice coordinate vectors `x` with `|x B| <= radius`, zero included,
/// sorted lexicographically.
pub fn short_vectors_capped(l: &ZLattice, radius: f64, cap: usize) -> Result<Vec<Vec<i64>>> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!("radius must be a nonnegative real, got {radius}")));
    }
    let r = l.rank();
    if r == 0 {
        return Ok(vec![Vec::new()]);
    }
    let estimate = count_estimate(l, radius);
    if estimate > cap as f64 {
        return Err(Error::CapExceeded {
            estimate,
            cap,
            context: format!("short_vectors(rank {r}, radius {radius})"),
        });
    }
    let (red, u) = lll_with_transform(l, &default_delta());
    let g: Vec<i128> = red
        .gram()
        .rows_iter()
        .flatten()
        .map(|x| x.to_i128().ok_or(Error::Overflow("reduced Gram matrix")))
        .collect::<Result<_>>()?;
    let u: Vec<i64> = u
        .rows_iter()
        .flatten()
        .map(|x| x.to_i64().ok_or(Error::Overflow("reduction transform")))
        .collect::<Result<_>>()?;
    let scale = l.scale_sq();
    let radius_sq = radius * radius;
    let bound = radius_sq / scale * (1.0 + 1e-9) + 1e-9;

    // q(x) = sum_i d_i (x_i + sum_{j>i} m_ij x_j)^2
    let mut m: Vec<Vec<f64>> = (0..r).map(|i| (0..r).map(|j| g[i * r + j] as f64).collect()).collect();
    for i in 0..r {
        for j in (i + 1)..r {
            m[j][i] = m[i][j];
            m[i][j] /= m[i][i];
        }
        for k in (i + 1)..r {
            for c in k..r {
                m[k][c] -= m[k][i] * m[i][c];
            }
        }
    }
    let ctx = Ctx {
        r,
        m: &m,
        g: &g,
        scale,
        radius_sq,
        bound,
    };
    let top = r - 1;
    let w = (bound / m[top][top]).sqrt();
    let hi = (w + 1e-9).floor() as i64;
    let found: Vec<Vec<i64>> = (-hi..=hi)
        .into_par_iter()
        .flat_map_iter(|v| {
            let mut y = vec![0i64; r];
            y[top] = v;
            let used = m[top][top] * (v as f64) * (v as f64);
            let mut out = Vec::new();
            ctx.descend(top, &mut y, used, &mut out);
            out
        })
        .collect();
    if found.len() > cap {
        return Err(Error::CapExceeded {
            estimate: found.len() as f64,
            cap,
            context: format!("short_vectors(rank {r}, radius {radius})"),
        });
    }
    let mut result = found
        .into_iter()
        .map(|y| {
            (0..r)
                .map(|j| {
                    let s: i128 = (0..r).map(|i| y[i] as i128 * u[i * r + j] as i128).sum();
                    i64::try_from(s).map_err(|_| Error::Overflow("short vector coordinates"))
                })
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    result.sort_unstable();
    Ok(result)
}

struct Ctx<'a> {
    r: usize,
    m: &'a [Vec<f64>],
    g: &'a [i128],
    scale: f64,
    radius_sq: f64,
    bound: f64,
}

impl Ctx<'_> {
    fn descend(&self, level: usize, y: &mut [i64], used: f64, out: &mut Vec<Vec<i64>>) {
        if used > self.bound {
            return;
        }
        if level == 0 {
            if self.exact_ok(y) {
                out.push(y.to_vec());
            }
            return;
        }
        let i = level - 1;
        let c: f64 = -((i + 1)..self.r).map(|j| self.m[i][j] * y[j] as f64).sum::<f64>();
        let w = ((self.bound - used).max(0.0) / self.m[i][i]).sqrt();
        let lo = (c - w - 1e-9).ceil() as i64;
        let hi = (c + w + 1e-9).floor() as i64;
        for v in lo..=hi {
            y[i] = v;
            let t = v as f64 - c;
            self.descend(i, y, used + self.m[i][i] * t * t, out);
        }
        y[i] = 0;
    }

    fn exact_ok(&self, y: &[i64]) -> bool {
        let r = self.r;
        let mut q: i128 = 0;
        for i in 0..r {
            if y[i] == 0 {
                continue;
            }
            let mut row: i128 = 0;
            for j in 0..r {
                row += self.g[i * r + j] * y[j] as i128;
            }
            q += row * y[i] as i128;
        }
        within_radius(q as f64, self.scale, self.radius_sq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{Int, Matrix};
    use crate::numfield::builtin_field;

    #[test]
    fn ball_volumes() {
        assert!((ball_volume(0) - 1.0).abs() < 1e-15);
        assert!((ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((ball_volume(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn integer_lattice_counts() {
        let z2 = ZLattice::standard(2);
        let v = short_vectors(&z2, 1.0).unwrap();
        assert_eq!(v, vec![vec![-1, 0], vec![0, -1], vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert_eq!(short_vectors(&z2, 2.0).unwrap().len(), 13);
    }

    #[test]
    fn gaussian_integers_unit_radius() {
        let k = builtin_field("Qi").unwrap();
        let v = short_vectors(&ZLattice::ok_power(&k, 1), 1.0).unwrap();
        assert_eq!(v.len(), 5);
    }

    #[test]
    fn skewed_basis_matches_brute_force() {
        let b = Matrix::from_rows(vec![vec![Int::from(1), Int::from(0)], vec![Int::from(10), Int::from(1)]], 2);
        let l = ZLattice::standard(2).with_basis(b).unwrap();
        let got = short_vectors(&l, 3.0).unwrap();
        let mut want = Vec::new();
        for a in -40i64..=40 {
            for c in -40i64..=40 {
                if l.norm_sq(&[a, c]) <= 9.0 {
                    want.push(vec![a, c]);
                }
            }
        }
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn cap_aborts_with_estimate() {
        match short_vectors_capped(&ZLattice::standard(4), 50.0, 1000) {
            Err(Error::CapExceeded { estimate, cap, .. }) => {
                assert_eq!(cap, 1000);
                assert!(estimate > 1000.0);
            }
            other => panic!("expected cap abort, got {other:?}"),
        }
    }
}
