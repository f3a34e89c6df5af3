//! Echelon matrices over `K`, the primitive modules `Λ_D` they cut out of
//! `O_K^m`, heights and denominators, and enumeration of primitive modules
//! by height.

use crate::error::{Error, Result};
use crate::lattice::{
    hnf_basis, k_rank, saturation_index, short_vectors, short_vectors_capped, smith_normal_form, ZLattice,
    DEFAULT_CAP,
};
use crate::matrix::{clear_denominators, int_det, rat_to_string, Int, Matrix, Rat};
use crate::numfield::NumberField;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A matrix over `K`; entries are power-basis coordinate vectors.
#[derive(Clone, PartialEq)]
pub struct FieldMatrix {
    field: Arc<NumberField>,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Rat>>,
}

impl std::fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FieldMatrix{}x{}[{}]", self.rows, self.cols, self.key())
    }
}

impl FieldMatrix {
    pub fn zeros(field: &Arc<NumberField>, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            field: field.clone(),
            rows,
            cols,
            entries: vec![vec![Rat::zero(); field.degree()]; rows * cols],
        }
    }

    /// From rational scalars (entries in `Q ⊆ K`), row-major.
    pub fn from_rats(field: &Arc<NumberField>, rows: usize, cols: usize, vals: &[Rat]) -> Self {
        let mut m = Self::zeros(field, rows, cols);
        for (e, v) in m.entries.iter_mut().zip(vals) {
            e[0] = v.clone();
        }
        m
    }

    pub fn from_ints(field: &Arc<NumberField>, rows: usize, cols: usize, vals: &[i64]) -> Self {
        let v: Vec<Rat> = vals.iter().map(|&x| Rat::from_integer(x.into())).collect();
        Self::from_rats(field, rows, cols, &v)
    }

    /// From flattened integral-basis coordinates: entry `(i, j)` occupies
    /// `d` consecutive slots starting at `(i * cols + j) * d`.
    pub fn from_integral<T: Clone + Into<Int>>(field: &Arc<NumberField>, rows: usize, cols: usize, coords: &[T]) -> Self {
        let d = field.degree();
        let entries = coords.chunks(d).map(|c| field.power_from_integral(c)).collect();
        FieldMatrix {
            field: field.clone(),
            rows,
            cols,
            entries,
        }
    }

    pub fn from_entries(field: &Arc<NumberField>, rows: usize, cols: usize, entries: Vec<Vec<Rat>>) -> Result<Self> {
        if entries.len() != rows * cols || entries.iter().any(|e| e.len() != field.degree()) {
            return Err(Error::InvalidInput("entry count or width does not match the shape".into()));
        }
        Ok(FieldMatrix {
            field: field.clone(),
            rows,
            cols,
            entries,
        })
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &[Rat] {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Vec<Rat>) {
        self.entries[i * self.cols + j] = v;
    }

    fn is_zero_entry(e: &[Rat]) -> bool {
        e.iter().all(Zero::is_zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| Self::is_zero_entry(e))
    }

    /// Flattened integral coordinates, if every entry lies in `O_K`.
    pub fn integral_coords(&self) -> Option<Vec<Int>> {
        let mut out = Vec::with_capacity(self.entries.len() * self.field.degree());
        for e in &self.entries {
            for c in self.field.integral_from_power(e) {
                if !c.is_integer() {
                    return None;
                }
                out.push(c.to_integer());
            }
        }
        Some(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::InvalidInput("shape mismatch in product".into()));
        }
        if *self.field != *other.field {
            return Err(Error::FieldMismatch);
        }
        let mut out = Self::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = vec![Rat::zero(); self.field.degree()];
                for l in 0..self.cols {
                    let p = self.field.mul_power(self.get(i, l), other.get(l, j));
                    for (a, b) in acc.iter_mut().zip(p) {
                        *a += b;
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn row_block(&self, start: usize, end: usize) -> Self {
        FieldMatrix {
            field: self.field.clone(),
            rows: end - start,
            cols: self.cols,
            entries: self.entries[start * self.cols..end * self.cols].to_vec(),
        }
    }

    /// Reduced row echelon form over `K` and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let k = &self.field;
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !Self::is_zero_entry(a.get(i, c))) else {
                continue;
            };
            for j in 0..a.cols {
                a.entries.swap(r * a.cols + j, p * a.cols + j);
            }
            let inv = k.inv_power(a.get(r, c)).expect("nonzero pivot");
            for j in 0..a.cols {
                let v = k.mul_power(a.get(r, j), &inv);
                a.set(r, j, v);
            }
            for i in 0..a.rows {
                if i == r || Self::is_zero_entry(a.get(i, c)) {
                    continue;
                }
                let f = a.get(i, c).to_vec();
                for j in 0..a.cols {
                    let p = k.mul_power(&f, a.get(r, j));
                    let mut v = a.get(i, j).to_vec();
                    for (x, y) in v.iter_mut().zip(p) {
                        *x -= y;
                    }
                    a.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Canonical text form: entries row-major, power coordinates as `p/q`.
    pub fn key(&self) -> String {
        self.entries
            .iter()
            .map(|e| e.iter().map(rat_to_string).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<Vec<String>>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).iter().map(rat_to_string).collect()).collect())
            .collect();
        serde_json::json!(rows)
    }
}

/// Rank of a matrix over `K`.
pub fn rank_over_k(a: &FieldMatrix) -> usize {
    a.rank()
}

/// A full-rank reduced row echelon matrix over `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct EchelonMatrix {
    pub entries: FieldMatrix,
    pub pivot_cols: Vec<usize>,
}

impl EchelonMatrix {
    pub fn k(&self) -> usize {
        self.entries.nrows()
    }

    pub fn m(&self) -> usize {
        self.entries.ncols()
    }

    pub fn key(&self) -> String {
        self.entries.key()
    }

    pub fn field(&self) -> &Arc<NumberField> {
        self.entries.field()
    }

    /// The pivot-only shape: pivot columns carry the identity and every
    /// other entry vanishes.
    pub fn is_pivot_only(&self) -> bool {
        let e = &self.entries;
        (0..e.nrows()).all(|i| {
            (0..e.ncols()).all(|j| self.pivot_cols[i] == j || e.get(i, j).iter().all(Zero::is_zero))
        })
    }
}

/// Canonical echelon form of a rank-`k` matrix.
pub fn to_echelon(m: &FieldMatrix) -> Result<EchelonMatrix> {
    let (r, piv) = m.rref();
    if piv.len() < m.nrows() {
        return Err(Error::RankDeficient {
            expected: m.nrows(),
            found: piv.len(),
        });
    }
    Ok(EchelonMatrix {
        entries: r,
        pivot_cols: piv,
    })
}

/// `Λ_D` together with `H(D)` and `𝔇(D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveModule {
    pub echelon: EchelonMatrix,
    pub lattice: ZLattice,
    pub height: f64,
    pub denominator: Int,
}

impl PrimitiveModule {
    pub fn key(&self) -> String {
        self.echelon.key()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "D": self.echelon.entries.to_json(),
            "pivots": self.echelon.pivot_cols,
            "H": crate::harness::report::round15(self.height),
            "denominator": self.denominator.to_string(),
        })
    }
}

/// Integral coordinates (rational) of `u_t D_i`, a `Q`-basis of the row space.
fn image_basis(d: &EchelonMatrix) -> Matrix<Rat> {
    let f = d.field();
    let deg = f.degree();
    let e = &d.entries;
    let mut rows = Vec::new();
    for i in 0..e.nrows() {
        for t in 0..deg {
            let u = f.integral_basis().row(t);
            let mut row = Vec::with_capacity(e.ncols() * deg);
            for j in 0..e.ncols() {
                row.extend(f.integral_from_power(&f.mul_power(u, e.get(i, j))));
            }
            rows.push(row);
        }
    }
    Matrix::from_rows(rows, e.ncols() * deg)
}

/// `Λ_D = (K^k D) ∩ O_K^m`.
pub fn lambda_of(d: &EchelonMatrix) -> Result<PrimitiveModule> {
    let f = d.field();
    let (ints, _) = clear_denominators(&image_basis(d));
    let snf = smith_normal_form(&ints);
    let r = ints.nrows();
    let basis = hnf_basis(&snf.q_inv.row_block(0, r));
    let lattice = ZLattice::ok_power(f, d.m()).with_basis(basis)?;
    let denominator = pivot_determinant(d, &lattice);
    Ok(PrimitiveModule {
        echelon: d.clone(),
        height: lattice.height(),
        lattice,
        denominator,
    })
}

fn pivot_determinant(d: &EchelonMatrix, lattice: &ZLattice) -> Int {
    let deg = d.field().degree();
    let b = lattice.basis();
    let rows: Vec<Vec<Int>> = (0..b.nrows())
        .map(|i| {
            d.pivot_cols
                .iter()
                .flat_map(|&p| b.row(i)[p * deg..(p + 1) * deg].to_vec())
                .collect()
        })
        .collect();
    int_det(&Matrix::from_rows(rows, b.nrows())).abs()
}

/// `𝔇(D) = [O_K^k : {v : vD ∈ O_K^m}]`: the image of `Λ_D` under the pivot
/// coordinates is exactly that submodule, so its determinant is the index.
pub fn denominator(d: &EchelonMatrix) -> Result<Int> {
    Ok(lambda_of(d)?.denominator)
}

/// `det` of the Gram matrix of `{u_t D_i}` under the trace form: the
/// squared volume scaling of `x -> xD` up to the analytic scale.
pub fn image_gram_det(d: &EchelonMatrix) -> Rat {
    let f = d.field();
    let b = image_basis(d);
    let form = crate::matrix::int_to_rat(&f.trace_form().block_diag_power(d.m()));
    crate::matrix::rat_det(&crate::matrix::gram_of(&b, &form))
}

/// `[M_{n×k}(O_K) D : M_n(Λ_D)]` from the Smith form of the coordinate matrix.
pub fn image_index(p: &PrimitiveModule, n: usize) -> Result<Int> {
    let b = image_basis(&p.echelon);
    let inv_rows = {
        // Coordinates of Λ_D in the basis {u_t D_i}: pivot blocks of each vector.
        let deg = p.echelon.field().degree();
        let lb = p.lattice.basis();
        (0..lb.nrows())
            .map(|i| {
                p.echelon
                    .pivot_cols
                    .iter()
                    .flat_map(|&c| lb.row(i)[c * deg..(c + 1) * deg].to_vec())
                    .collect::<Vec<Int>>()
            })
            .collect::<Vec<_>>()
    };
    debug_assert_eq!(inv_rows.len(), b.nrows());
    let c = Matrix::from_rows(inv_rows, b.nrows()).block_diag_power(n);
    Ok(smith_normal_form(&c).divisors.iter().fold(Int::one(), |a, x| a * x))
}

/// Recovers the echelon matrix of a primitive `O_K`-stable module.
pub fn echelon_of_module(field: &Arc<NumberField>, l: &ZLattice) -> Result<EchelonMatrix> {
    let d = field.degree();
    if !l.ambient_dim().is_multiple_of(d) || !l.is_ok_stable(field) {
        return Err(Error::InvalidInput("module is not closed under O_K".into()));
    }
    let m = l.ambient_dim() / d;
    let ambient = ZLattice::ok_power(field, m);
    if !saturation_index(l, &ambient)?.is_one() {
        return Err(Error::InvalidInput("module is not primitive".into()));
    }
    let rows: Vec<Int> = l.basis().rows_iter().flatten().cloned().collect();
    let fm = FieldMatrix::from_integral(field, l.rank(), m, &rows);
    let (r, piv) = fm.rref();
    let k = piv.len();
    Ok(EchelonMatrix {
        entries: r.row_block(0, k),
        pivot_cols: piv,
    })
}

/// Smallest nonzero norm in `O_K`.
pub fn min_norm_ok(field: &NumberField) -> Result<f64> {
    let ok = ZLattice::ok_power(field, 1);
    let one = (field.trace_form()[(0, 0)].to_f64().unwrap() * field.scale_sq()).sqrt();
    Ok(short_vectors(&ok, one)?
        .iter()
        .filter(|x| x.iter().any(|&c| c != 0))
        .map(|x| ok.norm_sq(x).sqrt())
        .fold(f64::INFINITY, f64::min))
}

/// Explicit constant `C` with `prod |l_i|^d <= C H` for the `K`-minima of a
/// rank-`k` module: `2^{kd(kd-1)/4}`, which dominates Minkowski's `2^n / V(n)`.
pub fn minima_product_constant(k: usize, d: usize) -> f64 {
    let n = (k * d) as f64;
    2f64.powf(n * (n - 1.0) / 4.0)
}

fn full_module(field: &Arc<NumberField>, m: usize) -> Result<PrimitiveModule> {
    let id = FieldMatrix::from_rats(
        field,
        m,
        m,
        &(0..m * m)
            .map(|i| if i % (m + 1) == 0 { Rat::one() } else { Rat::zero() })
            .collect::<Vec<_>>(),
    );
    lambda_of(&to_echelon(&id)?)
}

/// Every primitive rank-`k` `O_K`-module of `O_K^m` with `H <= height_bound`,
/// sorted by `(H, key)`.
pub fn enumerate_primitive_modules(
    field: &Arc<NumberField>,
    k: usize,
    m: usize,
    height_bound: f64,
) -> Result<Vec<PrimitiveModule>> {
    enumerate_primitive_modules_capped(field, k, m, height_bound, DEFAULT_CAP)
}

pub fn enumerate_primitive_modules_capped(
    field: &Arc<NumberField>,
    k: usize,
    m: usize,
    height_bound: f64,
    cap: usize,
) -> Result<Vec<PrimitiveModule>> {
    if k == 0 || k > m {
        return Err(Error::InvalidInput(format!("need 1 <= k <= m, got k={k}, m={m}")));
    }
    if !(height_bound >= 0.0) {
        return Err(Error::InvalidInput("height bound must be nonnegative".into()));
    }
    let d = field.degree();
    let ambient = ZLattice::ok_power(field, m);
    let scale_ln = ambient.scale().ln();
    // H <= B  <=>  det <= B^2 / scale^{kd}
    let det_ok = |p: &PrimitiveModule| {
        let lhs = crate::lattice::int_ln(&p.lattice.det_gram()) + scale_ln * (k * d) as f64;
        lhs <= 2.0 * height_bound.ln() + 1e-12
    };
    if k == m {
        let full = full_module(field, m)?;
        return Ok(if det_ok(&full) { vec![full] } else { Vec::new() });
    }
    let mu = min_norm_ok(field)?;
    let c = minima_product_constant(k, d);
    let radius = (c * height_bound).powf(1.0 / d as f64) / mu.powi(k as i32 - 1);
    let mut vecs: Vec<(f64, Vec<Int>)> = short_vectors_capped(&ambient, radius, cap)?
        .into_iter()
        .filter(|x| x.iter().any(|&v| v != 0))
        .map(|x| (ambient.norm_sq(&x).sqrt(), x.iter().map(|&v| Int::from(v)).collect()))
        .collect();
    vecs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)));
    let budget = c * height_bound;

    // Collect distinct K-spans of admissible tuples.
    let mut spans: BTreeMap<String, EchelonMatrix> = BTreeMap::new();
    let mut visited = 0usize;
    let mut stack: Vec<usize> = Vec::with_capacity(k);
    collect_spans(field, &vecs, k, m, budget, 0, 1.0, &mut stack, &mut spans, &mut visited, cap)?;

    let mut modules: Vec<PrimitiveModule> = spans
        .into_values()
        .collect::<Vec<_>>()
        .par_iter()
        .map(lambda_of)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| det_ok(p))
        .collect();
    modules.sort_by(|a, b| {
        a.lattice
            .det_gram()
            .cmp(&b.lattice.det_gram())
            .then_with(|| a.key().cmp(&b.key()))
    });
    Ok(modules)
}

#[allow(clippy::too_many_arguments)]
fn collect_spans(
    field: &Arc<NumberField>,
    vecs: &[(f64, Vec<Int>)],
    k: usize,
    m: usize,
    budget: f64,
    start: usize,
    prod: f64,
    stack: &mut Vec<usize>,
    spans: &mut BTreeMap<String, EchelonMatrix>,
    visited: &mut usize,
    cap: usize,
) -> Result<()> {
    let d = field.degree() as i32;
    if stack.len() == k {
        *visited += 1;
        if *visited > cap {
            return Err(Error::CapExceeded {
                estimate: *visited as f64,
                cap,
                context: "enumerate_primitive_modules tuples".into(),
            });
        }
        let rows: Vec<Int> = stack.iter().flat_map(|&i| vecs[i].1.clone()).collect();
        let fm = FieldMatrix::from_integral(field, k, m, &rows);
        let e = to_echelon(&fm)?;
        spans.entry(e.key()).or_insert(e);
        return Ok(());
    }
    let remaining = (k - stack.len() - 1) as i32;
    for i in start..vecs.len() {
        let nd = vecs[i].0.powi(d);
        // later vectors are at least as long as this one
        if prod * nd * nd.powi(remaining) > budget * (1.0 + 1e-9) {
            break;
        }
        if !stack.is_empty() {
            let mut cur: Vec<Vec<Int>> = stack.iter().map(|&j| vecs[j].1.clone()).collect();
            cur.push(vecs[i].1.clone());
            if k_rank(field, &cur) < cur.len() {
                continue;
            }
        }
        stack.push(i);
        collect_spans(field, vecs, k, m, budget, i + 1, prod * nd, stack, spans, visited, cap)?;
        stack.pop();
    }
    Ok(())
}

pub fn schmidt_count(field: &Arc<NumberField>, k: usize, m: usize, t: f64) -> Result<usize> {
    Ok(enumerate_primitive_modules(field, k, m, t)?.len())
}

/// `M_n(Λ)`: `n` orthogonal copies of `Λ`, as a lattice in `O_K^{n×m}`.
pub fn matrix_lattice(lattice: &ZLattice, n: usize) -> Result<ZLattice> {
    let form = Arc::new(lattice.form().block_diag_power(n));
    ZLattice::new(lattice.basis().block_diag_power(n), form, lattice.scale().clone())
}

/// Elements of `M_n(Λ_D)` with Frobenius norm at most `radius`, as flattened
/// integral coordinates (row-major, `n * m * d` entries), sorted.
pub fn matrices_with_rows(n: usize, p: &PrimitiveModule, radius: f64) -> Result<Vec<Vec<i64>>> {
    let ml = matrix_lattice(&p.lattice, n)?;
    let mut out = short_vectors(&ml, radius)?
        .into_iter()
        .map(|x| ml.to_ambient_i64(&x))
        .collect::<Result<Vec<_>>>()?;
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::rat;
    use crate::numfield::builtin_field;

    fn q() -> Arc<NumberField> {
        builtin_field("Q").unwrap()
    }

    fn ech(field: &Arc<NumberField>, rows: usize, cols: usize, vals: &[Rat]) -> EchelonMatrix {
        to_echelon(&FieldMatrix::from_rats(field, rows, cols, vals)).unwrap()
    }

    #[test]
    fn echelon_examples() {
        let k = q();
        let e = ech(&k, 1, 2, &[rat(2, 1), rat(1, 1)]);
        assert_eq!(e.entries, FieldMatrix::from_rats(&k, 1, 2, &[rat(1, 1), rat(1, 2)]));
        let qi = builtin_field("Qi").unwrap();
        // [[1,1],[0,i]]
        let mut m = FieldMatrix::from_ints(&qi, 2, 2, &[1, 1, 0, 0]);
        m.set(1, 1, vec![rat(0, 1), rat(1, 1)]);
        let e = to_echelon(&m).unwrap();
        assert_eq!(e.entries, FieldMatrix::from_ints(&qi, 2, 2, &[1, 0, 0, 1]));
        assert!(to_echelon(&FieldMatrix::from_ints(&k, 2, 2, &[1, 2, 2, 4])).is_err());
    }

    #[test]
    fn lambda_examples() {
        let k = q();
        let p = lambda_of(&ech(&k, 1, 2, &[rat(1, 1), rat(1, 2)])).unwrap();
        assert_eq!(p.lattice.basis().row(0), &[Int::from(2), Int::from(1)]);
        assert!((p.height - 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(p.denominator, Int::from(2));
        let p = lambda_of(&ech(&k, 1, 2, &[rat(1, 1), rat(0, 1)])).unwrap();
        assert_eq!((p.height, p.denominator.clone()), (1.0, Int::one()));
        let p = lambda_of(&ech(&k, 2, 3, &[rat(1, 1), rat(0, 1), rat(1, 2), rat(0, 1), rat(1, 1), rat(1, 3)])).unwrap();
        assert_eq!(p.denominator, Int::from(6));

        let qi = builtin_field("Qi").unwrap();
        let mut m = FieldMatrix::from_ints(&qi, 1, 2, &[1, 0]);
        m.set(0, 1, vec![rat(1, 2), rat(1, 2)]);
        let p = lambda_of(&to_echelon(&m).unwrap()).unwrap();
        assert_eq!(p.denominator, Int::from(2));
    }

    #[test]
    fn round_trip_examples() {
        let k = q();
        let l = ZLattice::standard(2).with_basis(Matrix::from_rows(vec![vec![Int::from(2), Int::from(1)]], 2)).unwrap();
        let e = echelon_of_module(&k, &l).unwrap();
        assert_eq!(e.entries, FieldMatrix::from_rats(&k, 1, 2, &[rat(1, 1), rat(1, 2)]));
        let non_prim = ZLattice::standard(2).with_basis(Matrix::from_rows(vec![vec![Int::from(4), Int::from(2)]], 2)).unwrap();
        assert!(echelon_of_module(&k, &non_prim).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let k = q();
        let mods = enumerate_primitive_modules(&k, 1, 2, 2.0).unwrap();
        assert_eq!(mods.len(), 4);
        assert_eq!(enumerate_primitive_modules(&k, 1, 2, 1.0).unwrap().len(), 2);
        let full = enumerate_primitive_modules(&k, 2, 2, 3.0).unwrap();
        assert_eq!(full.len(), 1);
        assert!((full[0].height - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matrices_with_rows_examples() {
        let k = q();
        let p = lambda_of(&ech(&k, 1, 2, &[rat(1, 1), rat(1, 2)])).unwrap();
        assert_eq!(matrices_with_rows(2, &p, 10f64.sqrt()).unwrap().len(), 9);
        assert_eq!(matrices_with_rows(1, &p, 2.0).unwrap(), vec![vec![0, 0]]);
        let one = matrices_with_rows(1, &p, 5.0).unwrap();
        assert_eq!(one.len(), short_vectors(&p.lattice, 5.0).unwrap().len());
    }
}
