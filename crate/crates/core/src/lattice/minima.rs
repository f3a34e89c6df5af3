//! Saturation and successive `K`-minima.

use super::enumerate::short_vectors;
use super::hnf::{hnf_basis, smith_normal_form};
use super::lll::{default_delta, lll_reduce};
use super::{k_rank, ok_span_generators, ZLattice};
use crate::error::{Error, Result};
use crate::matrix::{rat_inverse, rat_to_f64, Int, Matrix, Rat};
use crate::numfield::NumberField;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;

fn coords_in(sub: &ZLattice, ambient: &ZLattice) -> Result<Matrix<Int>> {
    let rows = sub
        .basis()
        .rows_iter()
        .map(|r| ambient.coords_of(r).ok_or(Error::NotContained))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_rows(rows, ambient.rank()))
}

/// `(sub ⊗ Q) ∩ ambient`, with a Hermite-normal-form basis.
pub fn saturate(sub: &ZLattice, ambient: &ZLattice) -> Result<ZLattice> {
    let c = coords_in(sub, ambient)?;
    let s = smith_normal_form(&c);
    let r = sub.rank();
    let sat_coords = s.q_inv.row_block(0, r);
    let vectors = sat_coords.mul(ambient.basis());
    ambient.with_basis(hnf_basis(&vectors))
}

/// `[saturate(sub) : sub]`, the product of the elementary divisors.
pub fn saturation_index(sub: &ZLattice, ambient: &ZLattice) -> Result<Int> {
    let c = coords_in(sub, ambient)?;
    Ok(smith_normal_form(&c).divisors.iter().fold(Int::one(), |a, b| a * b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimaReport {
    /// `l_1, ..., l_k` in ambient coordinates.
    pub vectors: Vec<Vec<Int>>,
    pub norms: Vec<f64>,
    /// `((i, j), |π_i(l_j)|, bound, ok)` for `i < j`, where the bound is the
    /// covering bound of `O_K l_i`.
    pub projections: Vec<((usize, usize), f64, f64, bool)>,
}

impl MinimaReport {
    pub fn projections_ok(&self) -> bool {
        self.projections.iter().all(|p| p.3)
    }
}

fn embedded(field: &NumberField, v: &[i64]) -> Vec<f64> {
    v.chunks(field.degree()).flat_map(|c| field.embed_integral(c)).collect()
}

/// Lexicographically larger embedded coordinates come first.
fn tie_break(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > 1e-9 * (1.0 + x.abs().max(y.abs())) {
            return y.partial_cmp(x).unwrap_or(Ordering::Equal);
        }
    }
    Ordering::Equal
}

/// Successive `K`-minima of an `O_K`-module of `O_K`-rank at least `k`,
/// ambient `O_K^m` in integral coordinates. Equal norms are ordered by
/// lexicographically largest embedded coordinates.
pub fn successive_k_minima(module: &ZLattice, field: &NumberField, k: usize) -> Result<MinimaReport> {
    let d = field.degree();
    if !module.ambient_dim().is_multiple_of(d) || !module.is_ok_stable(field) {
        return Err(Error::InvalidInput("module is not closed under O_K".into()));
    }
    let ok_rank = module.rank() / d;
    if ok_rank < k {
        return Err(Error::RankDeficient {
            expected: k,
            found: ok_rank,
        });
    }
    let red = lll_reduce(module, &default_delta());
    let radius = (0..red.rank())
        .map(|i| red.gram()[(i, i)].to_f64().unwrap() * module.scale_sq())
        .fold(0.0, f64::max)
        .sqrt();
    let mut cands: Vec<(Int, Vec<f64>, Vec<i64>)> = short_vectors(module, radius)?
        .into_iter()
        .filter(|x| x.iter().any(|&c| c != 0))
        .map(|x| {
            let v = module.to_ambient_i64(&x)?;
            Ok((module.quad(&x), embedded(field, &v), v))
        })
        .collect::<Result<_>>()?;
    cands.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| tie_break(&a.1, &b.1)));

    let mut chosen: Vec<Vec<Int>> = Vec::new();
    let mut norms = Vec::new();
    for (q, _, v) in &cands {
        if chosen.len() == k {
            break;
        }
        let vi: Vec<Int> = v.iter().map(|&c| Int::from(c)).collect();
        let mut trial = chosen.clone();
        trial.push(vi.clone());
        if k_rank(field, &trial) == trial.len() {
            chosen = trial;
            norms.push((q.to_f64().unwrap() * module.scale_sq()).sqrt());
        }
    }
    if chosen.len() < k {
        return Err(Error::RankDeficient {
            expected: k,
            found: chosen.len(),
        });
    }
    let projections = projection_checks(module, field, &chosen)?;
    Ok(MinimaReport {
        vectors: chosen,
        norms,
        projections,
    })
}

fn projection_checks(
    module: &ZLattice,
    field: &NumberField,
    l: &[Vec<Int>],
) -> Result<Vec<((usize, usize), f64, f64, bool)>> {
    let form = module.form();
    let s = module.scale_sq();
    let mut out = Vec::new();
    for i in 0..l.len() {
        let gens = Matrix::from_rows(ok_span_generators(field, &l[i]), l[i].len());
        let line = module.with_basis(gens.clone())?;
        let bound = line.covering_radius_bound();
        let gi = line.gram().map(|x| Rat::from_integer(x.clone()));
        let gi_inv = rat_inverse(&gi).ok_or_else(|| Error::Singular("O_K l_i".into()))?;
        let gf = gens.mul(form);
        for (j, lj) in l.iter().enumerate().skip(i + 1) {
            let c: Vec<Rat> = (0..gf.nrows())
                .map(|t| Rat::from_integer(gf.row(t).iter().zip(lj).map(|(a, b)| a * b).sum()))
                .collect();
            let w = gi_inv.left_mul_vec(&c);
            let proj_sq: Rat = w.iter().zip(&c).map(|(a, b)| a * b).fold(Rat::zero(), |a, b| a + b);
            let norm = (rat_to_f64(&proj_sq) * s).sqrt();
            out.push(((i, j), norm, bound, norm <= bound * (1.0 + 1e-12)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::builtin_field;

    fn im(rows: &[&[i64]]) -> Matrix<Int> {
        let c = rows[0].len();
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect(), c)
    }

    fn iv(x: &[i64]) -> Vec<Int> {
        x.iter().map(|&c| Int::from(c)).collect()
    }

    #[test]
    fn saturation_examples() {
        let z2 = ZLattice::standard(2);
        let s = saturate(&z2.with_basis(im(&[&[2, 0]])).unwrap(), &z2).unwrap();
        assert_eq!(s.basis(), &im(&[&[1, 0]]));
        let sub = z2.with_basis(im(&[&[2, 4]])).unwrap();
        let s = saturate(&sub, &z2).unwrap();
        assert_eq!(s.basis(), &im(&[&[1, 2]]));
        assert_eq!(saturation_index(&sub, &z2).unwrap(), Int::from(2));
        assert_eq!(saturate(&s, &z2).unwrap(), s);
        let outside = ZLattice::standard(2).with_basis(im(&[&[1, 0]])).unwrap();
        let amb = z2.with_basis(im(&[&[2, 0], &[0, 1]])).unwrap();
        assert!(matches!(saturate(&outside, &amb), Err(Error::NotContained)));
    }

    #[test]
    fn minima_examples() {
        let q = builtin_field("Q").unwrap();
        let rep = successive_k_minima(&ZLattice::standard(2), &q, 2).unwrap();
        assert_eq!(rep.vectors, vec![iv(&[1, 0]), iv(&[0, 1])]);
        let skew = ZLattice::standard(2).with_basis(im(&[&[1, 0], &[10, 1]])).unwrap();
        let rep = successive_k_minima(&skew, &q, 2).unwrap();
        assert_eq!(rep.vectors, vec![iv(&[1, 0]), iv(&[0, 1])]);
        assert!(rep.projections_ok());

        let qi = builtin_field("Qi").unwrap();
        let rep = successive_k_minima(&ZLattice::ok_power(&qi, 1), &qi, 1).unwrap();
        assert!((rep.norms[0] - 1.0).abs() < 1e-12);
        assert!(matches!(
            successive_k_minima(&ZLattice::ok_power(&qi, 1), &qi, 2),
            Err(Error::RankDeficient { .. })
        ));
    }
}
