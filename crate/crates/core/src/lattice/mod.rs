//! Exact `Z`-lattices: integral basis rows in an ambient space with an exact
//! integral quadratic form, and an analytic scale applied to squared norms.

pub mod enumerate;
pub mod hnf;
pub mod lll;
pub mod minima;

pub use enumerate::{count_estimate, short_vectors, short_vectors_capped, DEFAULT_CAP};
pub use hnf::{hermite_normal_form, hnf_basis, smith_normal_form, Smith};
pub use lll::lll_reduce;
pub use minima::{saturate, saturation_index, successive_k_minima, MinimaReport};

use crate::error::{Error, Result};
use crate::matrix::{int_det, int_rank, rat_solve_left, rat_to_string, Int, Matrix, Rat};
use crate::numfield::NumberField;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;
use std::sync::Arc;

/// A positive real `prefactor * prod base^exp` with rational data, kept
/// symbolic so exact quantities stay exact until the final evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticScale {
    pub prefactor: Rat,
    pub factors: Vec<(Int, Rat)>,
}

impl AnalyticScale {
    pub fn one() -> Self {
        AnalyticScale {
            prefactor: Rat::one(),
            factors: Vec::new(),
        }
    }

    pub fn power(base: Int, exp: Rat) -> Self {
        let mut s = Self::one();
        if !base.is_one() && !exp.is_zero() {
            s.factors.push((base, exp));
        }
        s
    }

    /// `|Δ_K|^{-1/d}`.
    pub fn of_field(field: &NumberField) -> Self {
        Self::power(field.discriminant().abs(), -Rat::new(Int::one(), Int::from(field.degree())))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = AnalyticScale {
            prefactor: &self.prefactor * &other.prefactor,
            factors: self.factors.clone(),
        };
        for (b, e) in &other.factors {
            match out.factors.iter_mut().find(|(b2, _)| b2 == b) {
                Some(slot) => slot.1 += e,
                None => out.factors.push((b.clone(), e.clone())),
            }
        }
        out.factors.retain(|(_, e)| !e.is_zero());
        out
    }

    pub fn pow(&self, r: i64) -> Self {
        AnalyticScale {
            prefactor: num_traits::pow::Pow::pow(&self.prefactor, r as i32),
            factors: self
                .factors
                .iter()
                .map(|(b, e)| (b.clone(), e * Rat::from_integer(Int::from(r))))
                .collect(),
        }
    }

    pub fn ln(&self) -> f64 {
        let mut s = crate::matrix::rat_to_f64(&self.prefactor).ln();
        for (b, e) in &self.factors {
            s += crate::matrix::rat_to_f64(e) * int_ln(b);
        }
        s
    }

    pub fn value(&self) -> f64 {
        self.ln().exp()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "prefactor": rat_to_string(&self.prefactor),
            "factors": self
                .factors
                .iter()
                .map(|(b, e)| json!({"base": b.to_string(), "exp": rat_to_string(e)}))
                .collect::<Vec<_>>(),
        })
    }
}

/// Natural log of a positive big integer, robust beyond the `f64` range.
pub fn int_ln(x: &Int) -> f64 {
    if let Some(v) = x.to_f64().filter(|v| v.is_finite()) {
        return v.ln();
    }
    let bits = x.bits();
    let shift = bits - 60;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Ambient form on `O_K^m`: `m` diagonal copies of the trace form.
pub fn ok_ambient_form(field: &NumberField, m: usize) -> Arc<Matrix<Int>> {
    Arc::new(field.trace_form().block_diag_power(m))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZLattice {
    basis: Matrix<Int>,
    form: Arc<Matrix<Int>>,
    gram: Matrix<Int>,
    scale: AnalyticScale,
}

impl ZLattice {
    /// Lattice spanned by the rows of `basis` under the ambient `form`, with
    /// squared norms multiplied by `scale`. The rows must be independent.
    pub fn new(basis: Matrix<Int>, form: Arc<Matrix<Int>>, scale: AnalyticScale) -> Result<Self> {
        if basis.ncols() != form.nrows() {
            return Err(Error::InvalidInput(format!(
                "basis has {} columns, ambient form is {}x{}",
                basis.ncols(),
                form.nrows(),
                form.ncols()
            )));
        }
        let gram = basis.mul(&form).mul(&basis.transpose());
        for i in 1..=gram.nrows() {
            let minor = Matrix::from_rows((0..i).map(|r| gram.row(r)[..i].to_vec()).collect(), i);
            if !int_det(&minor).is_positive() {
                return Err(Error::RankDeficient {
                    expected: basis.nrows(),
                    found: int_rank(&basis),
                });
            }
        }
        Ok(ZLattice {
            basis,
            form,
            gram,
            scale,
        })
    }

    /// `Z^n` with the standard form.
    pub fn standard(n: usize) -> Self {
        let id = Matrix::<Int>::identity(n);
        ZLattice::new(id.clone(), Arc::new(id), AnalyticScale::one()).expect("identity is a basis")
    }

    /// `O_K^r` with the unit-covolume normalization.
    pub fn ok_power(field: &NumberField, r: usize) -> Self {
        let n = r * field.degree();
        ZLattice::new(Matrix::identity(n), ok_ambient_form(field, r), AnalyticScale::of_field(field))
            .expect("identity is a basis")
    }

    /// Sublattice spanned by rows given in ambient coordinates; dependent rows
    /// are reduced to a basis first.
    pub fn span(&self, rows: &Matrix<Int>) -> Result<Self> {
        let b = hnf_basis(rows);
        if b.nrows() == 0 {
            return Err(Error::InvalidInput("empty span".into()));
        }
        ZLattice::new(b, self.form.clone(), self.scale.clone())
    }

    pub fn with_basis(&self, basis: Matrix<Int>) -> Result<Self> {
        ZLattice::new(basis, self.form.clone(), self.scale.clone())
    }

    pub fn with_scale(&self, scale: AnalyticScale) -> Self {
        ZLattice {
            scale,
            ..self.clone()
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &Matrix<Int> {
        &self.basis
    }

    pub fn gram(&self) -> &Matrix<Int> {
        &self.gram
    }

    pub fn form(&self) -> &Arc<Matrix<Int>> {
        &self.form
    }

    pub fn scale(&self) -> &AnalyticScale {
        &self.scale
    }

    pub fn scale_sq(&self) -> f64 {
        self.scale.value()
    }

    /// Exact `det(gram)`; the height is `sqrt(scale^r * det)`.
    pub fn det_gram(&self) -> Int {
        int_det(&self.gram)
    }

    pub fn height_sq(&self) -> f64 {
        (self.scale.ln() * self.rank() as f64 + int_ln(&self.det_gram())).exp()
    }

    pub fn height(&self) -> f64 {
        (0.5 * (self.scale.ln() * self.rank() as f64 + int_ln(&self.det_gram()))).exp()
    }

    /// Unscaled squared norm of the lattice vector with coordinates `x`.
    pub fn quad(&self, x: &[i64]) -> Int {
        let r = self.rank();
        let mut s = Int::zero();
        for i in 0..r {
            if x[i] == 0 {
                continue;
            }
            let mut row = Int::zero();
            for j in 0..r {
                if x[j] != 0 {
                    row += &self.gram[(i, j)] * x[j];
                }
            }
            s += row * x[i];
        }
        s
    }

    pub fn norm_sq(&self, x: &[i64]) -> f64 {
        self.quad(x).to_f64().unwrap() * self.scale_sq()
    }

    /// Ambient coordinates of the lattice vector with coordinates `x`.
    pub fn to_ambient(&self, x: &[i64]) -> Vec<Int> {
        let mut out = vec![Int::zero(); self.ambient_dim()];
        for (i, &c) in x.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, b) in out.iter_mut().zip(self.basis.row(i)) {
                *o += b * c;
            }
        }
        out
    }

    pub fn to_ambient_i64(&self, x: &[i64]) -> Result<Vec<i64>> {
        self.to_ambient(x)
            .iter()
            .map(|v| v.to_i64().ok_or(Error::Overflow("ambient coordinates")))
            .collect()
    }

    /// Lattice coordinates of an ambient vector, if it lies in the lattice.
    pub fn coords_of(&self, v: &[Int]) -> Option<Vec<Int>> {
        let b = self.basis.map(|x| Rat::from_integer(x.clone()));
        let t: Vec<Rat> = v.iter().map(|x| Rat::from_integer(x.clone())).collect();
        let sol = rat_solve_left(&b, &t)?;
        if sol.iter().all(|x| x.is_integer()) {
            Some(sol.into_iter().map(|x| x.to_integer()).collect())
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        self.coords_of(v).is_some()
    }

    pub fn contains_lattice(&self, other: &ZLattice) -> bool {
        other.basis.rows_iter().all(|r| self.contains(r))
    }

    /// Closed under multiplication by every integral basis element of `field`
    /// (ambient taken as `O_K^m` in integral-basis coordinates).
    pub fn is_ok_stable(&self, field: &NumberField) -> bool {
        self.basis.rows_iter().all(|b| {
            (0..field.degree()).all(|t| self.contains(&scalar_mul(field, t, b)))
        })
    }

    pub fn hadamard_ratio(&self) -> f64 {
        hadamard_ratio(&self.basis, &self.form).expect("lattice basis is independent")
    }

    /// Half the sum of the norms of an LLL-reduced basis: a certified upper
    /// bound on the covering radius.
    pub fn covering_radius_bound(&self) -> f64 {
        let red = lll_reduce(self, &Rat::new(99.into(), 100.into()));
        let s = self.scale_sq();
        0.5 * (0..red.rank())
            .map(|i| (red.gram[(i, i)].to_f64().unwrap() * s).sqrt())
            .sum::<f64>()
    }

    /// Lattice dump: exact data as strings.
    pub fn to_json(&self) -> serde_json::Value {
        let ints = |m: &Matrix<Int>| -> Vec<Vec<String>> {
            m.rows_iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
        };
        json!({
            "basis": ints(&self.basis),
            "gram": ints(&self.gram),
            "scale_sq_num": rat_to_string(&self.scale.prefactor),
            "scale_sq_den_pow": self.scale.to_json()["factors"],
            "rank": self.rank(),
            "ambient_dim": self.ambient_dim(),
        })
    }
}

/// `u_t * v` for `v` in `O_K^m` (flattened integral coordinates).
pub fn scalar_mul(field: &NumberField, t: usize, v: &[Int]) -> Vec<Int> {
    let d = field.degree();
    let mut out = vec![Int::zero(); v.len()];
    for (blk, chunk) in v.chunks(d).enumerate() {
        for (j, c) in chunk.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (l, e) in field.mul_table_entry(t, j).iter().enumerate() {
                if *e != 0 {
                    out[blk * d + l] += c * *e;
                }
            }
        }
    }
    out
}

/// `Z`-generators `u_t v` of `O_K v`.
pub fn ok_span_generators(field: &NumberField, v: &[Int]) -> Vec<Vec<Int>> {
    (0..field.degree()).map(|t| scalar_mul(field, t, v)).collect()
}

/// Rank over `K` of vectors in `O_K^m`.
pub fn k_rank(field: &NumberField, vectors: &[Vec<Int>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<Int>> = vectors.iter().flat_map(|v| ok_span_generators(field, v)).collect();
    let cols = rows[0].len();
    int_rank(&Matrix::from_rows(rows, cols)) / field.degree()
}

/// `prod |b_i| / H` for independent rows under `form` (scale-invariant).
pub fn hadamard_ratio(basis: &Matrix<Int>, form: &Matrix<Int>) -> Result<f64> {
    let gram = basis.mul(form).mul(&basis.transpose());
    let det = int_det(&gram);
    if !det.is_positive() {
        return Err(Error::RankDeficient {
            expected: basis.nrows(),
            found: int_rank(basis),
        });
    }
    let ln_prod: f64 = (0..gram.nrows()).map(|i| int_ln(&gram[(i, i)])).sum();
    Ok((0.5 * (ln_prod - int_ln(&det))).exp())
}
