//! Hecke neighbors of `O_K^n` (lifts of codes over `O_K / P`) and the
//! moments of their lattice sums.

pub mod finite;
pub mod moments;

pub use finite::{
    containment_epsilon, containment_probability, enumerate_subspaces, gaussian_binomial, rank_mod, FiniteSubspace,
    SubspaceSampler,
};
pub use moments::{
    column_product, convergence_row, convergence_table, moment_lhs, moment_rhs_limit, moment_stratified, window_check, MomentMode,
    MomentReport, MomentValue, RhsLimit, StratifiedMoment,
};

use crate::counting::TestFunction;
use crate::error::{Error, Result};
use crate::grassmann::FieldMatrix;
use crate::lattice::{short_vectors, AnalyticScale, ZLattice};
use crate::matrix::{Int, Matrix, Rat};
use crate::numfield::{mod_inverse, NumberField, PrimeIdealData};
use num_traits::ToPrimitive;

/// Tolerance on the covolume of a constructed neighbor.
pub const COVOLUME_TOL: f64 = 1e-10;

/// `T_P = N(P)^{(1 - s/n)/d}`.
pub fn t_scale(field: &NumberField, prime: &PrimeIdealData, n: usize, s: usize) -> f64 {
    let e = (n - s) as f64 / (n as f64 * field.degree() as f64);
    (prime.norm() as f64).powf(e)
}

/// The scaled preimage `T_P^{-1} π_P^{-1}(S)` of a subspace `S ⊆ (O_K/P)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeckeLattice {
    pub lattice: ZLattice,
    pub prime: PrimeIdealData,
    pub subspace: FiniteSubspace,
    pub t_scale: f64,
}

/// Builds the neighbor from `P^n` and lifts of a basis of `S`, puts it in
/// Hermite normal form and attaches the scale `T_P^{-2}` to squared norms.
pub fn hecke_neighbor(field: &NumberField, prime: &PrimeIdealData, s: &FiniteSubspace) -> Result<HeckeLattice> {
    let p = prime.p();
    if s.q() != p {
        return Err(Error::InvalidInput(format!(
            "subspace lives over F_{} but the prime has residue field F_{p}",
            s.q()
        )));
    }
    let d = field.degree();
    let n = s.n();
    let res = prime.residues();
    let t0 = res.iter().position(|&r| r != 0).expect("some basis element is a unit mod P");
    let inv0 = mod_inverse(res[t0], p).unwrap();
    let nd = n * d;
    let unit = |i: usize, t: usize| -> Vec<Int> {
        let mut v = vec![Int::from(0); nd];
        v[i * d + t] = Int::from(1);
        v
    };
    let mut gens: Vec<Vec<Int>> = Vec::new();
    for i in 0..n {
        for t in 0..d {
            let mut v = unit(i, t);
            v[i * d + t] = Int::from(p);
            gens.push(v);
            if t != t0 {
                let mut v = unit(i, t);
                v[i * d + t0] = -Int::from(res[t] as u128 * inv0 as u128 % p as u128);
                gens.push(v);
            }
        }
    }
    for row in s.basis() {
        let mut v = vec![Int::from(0); nd];
        for (i, a) in row.iter().enumerate() {
            v[i * d + t0] = Int::from(*a as u128 * inv0 as u128 % p as u128);
        }
        gens.push(v);
    }
    let ambient = ZLattice::ok_power(field, n);
    let unscaled = ambient.span(&Matrix::from_rows(gens, nd))?;
    let exp = Rat::new(Int::from(-2 * (n - s.dim()) as i64), Int::from((n * d) as i64));
    let scale = AnalyticScale::of_field(field).mul(&AnalyticScale::power(Int::from(p), exp));
    let lattice = unscaled.with_scale(scale);
    let covol = lattice.height();
    if (covol - 1.0).abs() > COVOLUME_TOL {
        return Err(Error::Validation(format!("neighbor covolume {covol} differs from 1")));
    }
    Ok(HeckeLattice {
        lattice,
        prime: prime.clone(),
        subspace: s.clone(),
        t_scale: t_scale(field, prime, n, s.dim()),
    })
}

/// Value of a one-column test function at a lattice vector given in ambient
/// integral coordinates of `O_K^n`, with squared norm `q` unscaled.
pub(crate) fn eval_column(field: &NumberField, g: &TestFunction, v: &[i64], q: f64, scale: f64) -> f64 {
    if let Some(x) = g.eval_quads(q, &[q], scale, 1.0) {
        return x;
    }
    let d = field.degree();
    let r = (scale / field.scale_sq()).sqrt();
    let y: Vec<f64> = v
        .chunks(d)
        .flat_map(|c| field.embed_integral(c))
        .map(|t| t * r)
        .collect();
    g.eval_embedded(&y, v.len() / d, 1)
}

/// `sum_{v ∈ L} g(v)` for a lattice in `O_K^n`, with or without `v = 0`.
pub fn lattice_sum_of(field: &NumberField, l: &ZLattice, g: &TestFunction, include_zero: bool) -> Result<f64> {
    let scale = l.scale_sq();
    let mut total = 0.0;
    for x in short_vectors(l, g.support_radius(1))? {
        if !include_zero && x.iter().all(|&c| c == 0) {
            continue;
        }
        let q = l.quad(&x).to_f64().unwrap();
        let v = l.to_ambient_i64(&x)?;
        total += eval_column(field, g, &v, q, scale);
    }
    Ok(total)
}

pub fn lattice_sum(field: &NumberField, l: &HeckeLattice, g: &TestFunction, include_zero: bool) -> Result<f64> {
    lattice_sum_of(field, &l.lattice, g, include_zero)
}

/// Outcome of the rank-drop comparison for one integral matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RankDrop {
    pub rank_k: usize,
    pub rank_mod_p: usize,
    pub norm: f64,
    /// `c N(P)^{1/(kd)}` when the rank drops.
    pub bound: Option<f64>,
    pub satisfied: bool,
}

/// `c = sqrt(kd) |Δ_K|^{-1/(2d)}`: a nonzero `k × k` minor lying in `P` has
/// norm at least `N(P)`, and AM-GM over rows and places bounds that norm
/// by `(|x|^2 |Δ_K|^{1/d} / (kd))^{kd/2}`.
pub fn rank_drop_constant(field: &NumberField, k: usize) -> f64 {
    let d = field.degree() as f64;
    let disc = field.discriminant().to_f64().unwrap().abs();
    ((k as f64) * d).sqrt() * disc.powf(-1.0 / (2.0 * d))
}

pub fn rank_drop_check(x: &FieldMatrix, prime: &PrimeIdealData) -> Result<RankDrop> {
    let field = x.field();
    let d = field.degree();
    let coords = x.integral_coords().ok_or(Error::NonIntegral)?;
    let coords: Vec<i64> = coords
        .iter()
        .map(|c| c.to_i64().ok_or(Error::Overflow("matrix entries")))
        .collect::<Result<_>>()?;
    let (rows, cols) = (x.nrows(), x.ncols());
    let reduced: Vec<Vec<u64>> = (0..rows)
        .map(|i| prime.reduce_vec(&coords[i * cols * d..(i + 1) * cols * d]))
        .collect();
    let rank_k = x.rank();
    let rank_mod_p = rank_mod(&reduced, prime.p());
    let q: i128 = coords.chunks(d).map(|c| field.trace_norm_integral(c)).sum();
    let norm = (q as f64 * field.scale_sq()).sqrt();
    let (bound, satisfied) = if rank_mod_p < rank_k {
        let k = rank_k;
        let b = rank_drop_constant(field, k) * (prime.norm() as f64).powf(1.0 / (k * d) as f64);
        (Some(b), norm >= b * (1.0 - 1e-12))
    } else {
        (None, true)
    };
    Ok(RankDrop {
        rank_k,
        rank_mod_p,
        norm,
        bound,
        satisfied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::builtin_field;

    fn im(rows: &[&[i64]]) -> Matrix<Int> {
        let c = rows[0].len();
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect(), c)
    }

    #[test]
    fn neighbor_examples() {
        let q = builtin_field("Q").unwrap();
        let p2 = PrimeIdealData::first_above(&q, 2).unwrap();
        let s = FiniteSubspace::new(2, 2, &[vec![1, 0]]).unwrap();
        let h = hecke_neighbor(&q, &p2, &s).unwrap();
        assert_eq!(h.lattice.basis(), &im(&[&[1, 0], &[0, 2]]));
        assert!((h.lattice.height() - 1.0).abs() < 1e-12);
        assert!((h.t_scale - 2f64.sqrt()).abs() < 1e-12);

        let full = FiniteSubspace::full(2, 2).unwrap();
        let h = hecke_neighbor(&q, &p2, &full).unwrap();
        assert_eq!(h.lattice.basis(), &Matrix::identity(2));
        assert_eq!(h.t_scale, 1.0);

        let qi = builtin_field("Qi").unwrap();
        let p5 = PrimeIdealData::first_above(&qi, 5).unwrap();
        for v in enumerate_subspaces(1, 2, 5).unwrap() {
            let h = hecke_neighbor(&qi, &p5, &v).unwrap();
            assert!((h.lattice.height() - 1.0).abs() < 1e-10);
            assert!(h.lattice.is_ok_stable(&qi));
            assert_eq!(h.lattice.det_gram(), Int::from(400));
        }
        assert!(hecke_neighbor(&q, &p2, &FiniteSubspace::new(3, 2, &[vec![1, 0]]).unwrap()).is_err());
    }

    #[test]
    fn neighbor_is_preimage() {
        let qi = builtin_field("Qi").unwrap();
        let p = PrimeIdealData::first_above(&qi, 5).unwrap();
        let s = FiniteSubspace::new(5, 2, &[vec![1, 3]]).unwrap();
        let h = hecke_neighbor(&qi, &p, &s).unwrap();
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                for c in -3i64..=3 {
                    let v = [a, b, c, a - b];
                    let inside = s.contains(&p.reduce_vec(&v));
                    let vi: Vec<Int> = v.iter().map(|&t| Int::from(t)).collect();
                    assert_eq!(h.lattice.contains(&vi), inside, "{v:?}");
                }
            }
        }
    }

    #[test]
    fn lattice_sum_examples() {
        let q = builtin_field("Q").unwrap();
        let z2 = ZLattice::ok_power(&q, 2);
        assert_eq!(lattice_sum_of(&q, &z2, &TestFunction::ball(1.5), true).unwrap(), 9.0);
        assert_eq!(lattice_sum_of(&q, &z2, &TestFunction::ball(0.5), false).unwrap(), 0.0);

        let p2 = PrimeIdealData::first_above(&q, 2).unwrap();
        let s = FiniteSubspace::new(2, 2, &[vec![1, 0]]).unwrap();
        let h = hecke_neighbor(&q, &p2, &s).unwrap();
        let got = lattice_sum(&q, &h, &TestFunction::ball(1.5), true).unwrap();
        // basis (1,0)/√2, (0,2)/√2: a²/2 + 2b² ≤ 2.25
        let mut want = 0;
        for a in -5i64..=5 {
            for b in -5i64..=5 {
                if (a * a) as f64 / 2.0 + (2 * b * b) as f64 <= 2.25 {
                    want += 1;
                }
            }
        }
        assert_eq!(got, want as f64);
    }

    #[test]
    fn rank_drop_examples() {
        let q = builtin_field("Q").unwrap();
        let p = PrimeIdealData::first_above(&q, 3).unwrap();
        let r = rank_drop_check(&FieldMatrix::from_ints(&q, 1, 1, &[3]), &p).unwrap();
        assert_eq!((r.rank_k, r.rank_mod_p), (1, 0));
        assert!(r.satisfied);
        assert!((r.bound.unwrap() - 3.0).abs() < 1e-12);

        let r = rank_drop_check(&FieldMatrix::from_ints(&q, 2, 2, &[1, 0, 0, 3]), &p).unwrap();
        assert_eq!((r.rank_k, r.rank_mod_p), (2, 1));
        assert!(r.satisfied && r.norm >= 3f64.sqrt());

        let r = rank_drop_check(&FieldMatrix::from_ints(&q, 2, 2, &[1, 1, 0, 1]), &p).unwrap();
        assert_eq!((r.rank_k, r.rank_mod_p, r.bound), (2, 2, None));
        assert!(r.satisfied);
    }
}
