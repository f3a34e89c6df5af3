//! Both sides of the fixed-rank counting asymptotic: the direct weighted
//! count of rank-`k` integral matrices and its stratification by the
//! primitive module of the row space.

pub mod series;

pub use series::{
    c1_estimate, koecher_identity_check, primitive_zeta_check, term_value, zeta, C1Estimate, IdentityCheck, TermValue,
};

use crate::error::{Error, Result};
use crate::grassmann::{
    enumerate_primitive_modules, lambda_of, matrices_with_rows, to_echelon, EchelonMatrix, FieldMatrix,
};
use crate::lattice::enumerate::within_radius;
use crate::lattice::{k_rank, short_vectors, ZLattice};
use crate::matrix::{Int, Rat};
use crate::numfield::NumberField;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

pub type CustomFn = Arc<dyn Fn(&[f64], usize, usize) -> f64 + Send + Sync>;

/// Compactly supported test functions on `n × m` matrices over `K_R`.
/// Column-wise kinds act on the `m` columns (vectors in `K_R^n`).
#[derive(Clone)]
pub enum TestFunction {
    /// Indicator of Frobenius norm at most `radius`.
    Ball { radius: f64 },
    /// Product over columns of the indicator of norm at most `radius`.
    ProductOfBalls { radius: f64 },
    /// Product over columns of the indicator of `inner < norm <= outer`.
    ProductOfAnnuli { inner: f64, outer: f64 },
    /// Arbitrary function of the embedded matrix (row-major, `d` reals per
    /// entry), vanishing outside the Frobenius ball of `support_radius`.
    Custom { support_radius: f64, eval: CustomFn },
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TestFunction::Ball { radius } => write!(f, "ball({radius})"),
            TestFunction::ProductOfBalls { radius } => write!(f, "product_of_balls({radius})"),
            TestFunction::ProductOfAnnuli { inner, outer } => write!(f, "product_of_annuli({inner},{outer})"),
            TestFunction::Custom { support_radius, .. } => write!(f, "custom(support {support_radius})"),
        }
    }
}

impl TestFunction {
    pub fn ball(radius: f64) -> Self {
        TestFunction::Ball { radius }
    }

    pub fn product_of_balls(radius: f64) -> Self {
        TestFunction::ProductOfBalls { radius }
    }

    pub fn name(&self) -> String {
        format!("{self:?}")
    }

    /// Frobenius radius outside which the function vanishes on `m` columns.
    pub fn support_radius(&self, m: usize) -> f64 {
        match self {
            TestFunction::Ball { radius } => *radius,
            TestFunction::ProductOfBalls { radius } => radius * (m as f64).sqrt(),
            TestFunction::ProductOfAnnuli { outer, .. } => outer * (m as f64).sqrt(),
            TestFunction::Custom { support_radius, .. } => *support_radius,
        }
    }

    pub fn is_indicator(&self) -> bool {
        !matches!(self, TestFunction::Custom { .. })
    }

    /// Single-column profile `g(0)` for column-wise kinds.
    pub fn column_at_zero(&self) -> f64 {
        match self {
            TestFunction::ProductOfAnnuli { .. } => 0.0,
            _ => 1.0,
        }
    }

    pub fn at_zero(&self, n: usize, m: usize, d: usize) -> f64 {
        match self {
            TestFunction::Custom { eval, .. } => eval(&vec![0.0; n * m * d], n, m),
            TestFunction::Ball { .. } => 1.0,
            _ => self.column_at_zero().powi(m as i32),
        }
    }

    /// Indicator value from exact unscaled squared norms of `A` (total and
    /// per column), with squared norms multiplied by `scale` and `A` divided
    /// by `t`. `None` for kinds that need the embedded matrix.
    pub fn eval_quads(&self, total: f64, cols: &[f64], scale: f64, t: f64) -> Option<f64> {
        let t2 = t * t;
        let hit = |q: f64, r: f64| within_radius(q, scale, r * r * t2);
        let v = match self {
            TestFunction::Ball { radius } => hit(total, *radius),
            TestFunction::ProductOfBalls { radius } => cols.iter().all(|&q| hit(q, *radius)),
            TestFunction::ProductOfAnnuli { inner, outer } => {
                cols.iter().all(|&q| hit(q, *outer) && !hit(q, *inner))
            }
            TestFunction::Custom { .. } => return None,
        };
        Some(if v { 1.0 } else { 0.0 })
    }

    /// Value at an embedded matrix (row-major, `d` reals per entry).
    pub fn eval_embedded(&self, x: &[f64], n: usize, m: usize) -> f64 {
        if let TestFunction::Custom { eval, .. } = self {
            return eval(x, n, m);
        }
        let d = x.len() / (n * m);
        let mut cols = vec![0.0; m];
        for i in 0..n {
            for j in 0..m {
                let off = (i * m + j) * d;
                cols[j] += x[off..off + d].iter().map(|v| v * v).sum::<f64>();
            }
        }
        let total: f64 = cols.iter().sum();
        self.eval_quads(total, &cols, 1.0, 1.0).unwrap()
    }

    /// Integral over `K_R^n` of the single-column profile, for column-wise
    /// kinds: `V(nd) (outer^{nd} - inner^{nd})`.
    pub fn column_integral(&self, nd: usize) -> Option<f64> {
        let v = crate::lattice::enumerate::ball_volume(nd);
        match self {
            TestFunction::ProductOfBalls { radius } => Some(v * radius.powi(nd as i32)),
            TestFunction::ProductOfAnnuli { inner, outer } => {
                Some(v * (outer.powi(nd as i32) - inner.powi(nd as i32)))
            }
            _ => None,
        }
    }
}

/// Result of a direct weighted count.
#[derive(Debug, Clone, PartialEq)]
pub struct RankCountReport {
    pub t: f64,
    pub raw_sum: f64,
    /// The exact count when the test function is an indicator.
    pub exact_count: Option<u64>,
    /// `raw_sum / T^{k n d}`.
    pub normalized: f64,
    pub matrices_seen: u64,
}

/// `A = C D` with `D` the echelon form of the row space of `A`.
pub fn rank_factorize(a: &FieldMatrix) -> Result<(FieldMatrix, EchelonMatrix)> {
    let (r, piv) = a.rref();
    let k = piv.len();
    if k == 0 {
        return Err(Error::InvalidInput("zero matrix has no rank factorization".into()));
    }
    let d = EchelonMatrix {
        entries: r.row_block(0, k),
        pivot_cols: piv.clone(),
    };
    let mut c = FieldMatrix::zeros(a.field(), a.nrows(), k);
    for i in 0..a.nrows() {
        for (l, &p) in piv.iter().enumerate() {
            c.set(i, l, a.get(i, p).to_vec());
        }
    }
    Ok((c, d))
}

#[derive(Debug, Clone)]
struct RowEntry {
    v: Vec<i64>,
    q: i128,
    cols: Vec<i128>,
}

fn row_entries(field: &NumberField, lattice: &ZLattice, radius: f64) -> Result<Vec<RowEntry>> {
    let d = field.degree();
    let mut out = short_vectors(lattice, radius)?
        .into_iter()
        .map(|x| {
            let v = lattice.to_ambient_i64(&x)?;
            let cols: Vec<i128> = v.chunks(d).map(|c| field.trace_norm_integral(c)).collect();
            Ok(RowEntry {
                q: cols.iter().sum(),
                cols,
                v,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.q.cmp(&b.q).then_with(|| a.v.cmp(&b.v)));
    Ok(out)
}

#[derive(Default, Clone, Copy)]
struct Acc {
    count: u64,
    sum: f64,
    seen: u64,
}

struct State {
    used: i128,
    cols: Vec<i128>,
    rows: Vec<Vec<i64>>,
}

struct LhsCtx<'a> {
    field: &'a Arc<NumberField>,
    n: usize,
    m: usize,
    k: usize,
    f: &'a TestFunction,
    t: f64,
    scale: f64,
    radius: f64,
    budget: i128,
    full: Arc<Vec<RowEntry>>,
    cache: Mutex<HashMap<String, Arc<Vec<RowEntry>>>>,
}

impl LhsCtx<'_> {
    fn span_list(&self, span: &[Vec<Int>]) -> Result<Arc<Vec<RowEntry>>> {
        if self.k == self.m {
            return Ok(self.full.clone());
        }
        let rows: Vec<Int> = span.iter().flatten().cloned().collect();
        let e = to_echelon(&FieldMatrix::from_integral(self.field, span.len(), self.m, &rows))?;
        let key = e.key();
        if let Some(l) = self.cache.lock().unwrap().get(&key) {
            return Ok(l.clone());
        }
        let p = lambda_of(&e)?;
        let list = Arc::new(row_entries(self.field, &p.lattice, self.radius)?);
        self.cache.lock().unwrap().insert(key, list.clone());
        Ok(list)
    }

    fn push(&self, st: &mut State, e: &RowEntry) {
        st.used += e.q;
        for (c, q) in st.cols.iter_mut().zip(&e.cols) {
            *c += q;
        }
        if !self.f.is_indicator() {
            st.rows.push(e.v.clone());
        }
    }

    fn pop(&self, st: &mut State, e: &RowEntry) {
        st.used -= e.q;
        for (c, q) in st.cols.iter_mut().zip(&e.cols) {
            *c -= q;
        }
        if !self.f.is_indicator() {
            st.rows.pop();
        }
    }

    fn leaf(&self, st: &State, acc: &mut Acc) {
        acc.seen += 1;
        let cols: Vec<f64> = st.cols.iter().map(|&q| q as f64).collect();
        let val = match self.f.eval_quads(st.used as f64, &cols, self.scale, self.t) {
            Some(v) => v,
            None => {
                let x: Vec<f64> = st
                    .rows
                    .iter()
                    .flat_map(|v| {
                        v.chunks(self.field.degree())
                            .flat_map(|c| self.field.embed_integral(c))
                            .collect::<Vec<_>>()
                    })
                    .map(|y| y / self.t)
                    .collect();
                self.f.eval_embedded(&x, self.n, self.m)
            }
        };
        if val != 0.0 {
            acc.count += 1;
            acc.sum += val;
        }
    }

    fn dfs(&self, row: usize, span: &[Vec<Int>], list: Option<&[RowEntry]>, st: &mut State, acc: &mut Acc) -> Result<()> {
        if row == self.n {
            if span.len() == self.k {
                self.leaf(st, acc);
            }
            return Ok(());
        }
        if span.len() + (self.n - row) < self.k {
            return Ok(());
        }
        if span.len() == self.k {
            let list = list.expect("span list at full rank");
            for e in list {
                if st.used + e.q > self.budget {
                    break;
                }
                self.push(st, e);
                self.dfs(row + 1, span, Some(list), st, acc)?;
                self.pop(st, e);
            }
            return Ok(());
        }
        let full = self.full.clone();
        for e in full.iter() {
            if st.used + e.q > self.budget {
                break;
            }
            self.step(row, span, e, st, acc)?;
        }
        Ok(())
    }

    /// Places `e` in row `row` while the row space still has rank below `k`.
    fn step(&self, row: usize, span: &[Vec<Int>], e: &RowEntry, st: &mut State, acc: &mut Acc) -> Result<()> {
        let left = self.n - row;
        if e.q == 0 {
            self.push(st, e);
            self.dfs(row + 1, span, None, st, acc)?;
            self.pop(st, e);
            return Ok(());
        }
        let mut next: Vec<Vec<Int>> = span.to_vec();
        next.push(e.v.iter().map(|&c| Int::from(c)).collect());
        if !span.is_empty() && k_rank(self.field, &next) < next.len() {
            self.push(st, e);
            self.dfs(row + 1, span, None, st, acc)?;
            self.pop(st, e);
            return Ok(());
        }
        if next.len() + (left - 1) < self.k {
            return Ok(());
        }
        self.push(st, e);
        if next.len() == self.k {
            let l = self.span_list(&next)?;
            self.dfs(row + 1, &next, Some(&l), st, acc)?;
        } else {
            self.dfs(row + 1, &next, None, st, acc)?;
        }
        self.pop(st, e);
        Ok(())
    }
}

/// `sum f(A / T)` over `A ∈ M_{n×m}(O_K)` of rank exactly `k`.
///
/// Rows are chosen one at a time from the short vectors of `O_K^m`; once
/// the row space reaches rank `k`, the remaining rows are drawn from the
/// saturated span `Λ_D`, so only rank-`k` matrices are ever visited.
pub fn lhs_count(
    field: &Arc<NumberField>,
    n: usize,
    m: usize,
    k: usize,
    t: f64,
    f: &TestFunction,
) -> Result<RankCountReport> {
    if k == 0 || k > m || m > n {
        return Err(Error::Validation(format!("need n >= m >= k >= 1, got n={n}, m={m}, k={k}")));
    }
    if !(t > 0.0) {
        return Err(Error::Validation("T must be positive".into()));
    }
    let ambient = ZLattice::ok_power(field, m);
    let scale = ambient.scale_sq();
    let radius = f.support_radius(m) * t;
    let budget = (radius * radius / scale * (1.0 + 1e-9)).floor() as i128;
    let full = Arc::new(row_entries(field, &ambient, radius)?);
    let ctx = LhsCtx {
        field,
        n,
        m,
        k,
        f,
        t,
        scale,
        radius,
        budget,
        full: full.clone(),
        cache: Mutex::new(HashMap::new()),
    };
    // Parallel over the first row; partial results are combined in order.
    let parts: Vec<Result<Acc>> = full
        .par_iter()
        .map(|e| {
            let mut acc = Acc::default();
            let mut st = State {
                used: 0,
                cols: vec![0; m],
                rows: Vec::new(),
            };
            if e.q <= budget {
                ctx.step(0, &[], e, &mut st, &mut acc)?;
            }
            Ok(acc)
        })
        .collect();
    let mut total = Acc::default();
    for p in parts {
        let p = p?;
        total.count += p.count;
        total.sum += p.sum;
        total.seen += p.seen;
    }
    let exp = (k * n * field.degree()) as i32;
    Ok(RankCountReport {
        t,
        raw_sum: total.sum,
        exact_count: f.is_indicator().then_some(total.count),
        normalized: total.sum / t.powi(exp),
        matrices_seen: total.seen,
    })
}

/// Reference count by full enumeration of `M_{n×m}(O_K)` and a rank filter.
pub fn lhs_count_naive(
    field: &Arc<NumberField>,
    n: usize,
    m: usize,
    k: usize,
    t: f64,
    f: &TestFunction,
) -> Result<u64> {
    let amb = ZLattice::ok_power(field, n * m);
    let d = field.degree();
    let radius = f.support_radius(m) * t;
    let scale = amb.scale_sq();
    let mut count = 0;
    for x in short_vectors(&amb, radius)? {
        let rows: Vec<Vec<Int>> = x.chunks(m * d).map(|r| r.iter().map(|&c| Int::from(c)).collect()).collect();
        if k_rank(field, &rows) != k {
            continue;
        }
        let cols: Vec<f64> = (0..m)
            .map(|j| {
                (0..n)
                    .map(|i| field.trace_norm_integral(&x[(i * m + j) * d..(i * m + j + 1) * d]) as f64)
                    .sum()
            })
            .collect();
        let total: f64 = cols.iter().sum();
        if f.eval_quads(total, &cols, scale, t) == Some(1.0) {
            count += 1;
        }
    }
    Ok(count)
}

/// Height bound covering every `Λ_D` met by a rank-`k` matrix of norm at
/// most `radius`: `(prod_t c_t)^k (radius)^{kd}`, with `c_t` the largest
/// absolute embedding of `u_t`.
pub fn stratified_height_bound(field: &NumberField, k: usize, radius: f64) -> f64 {
    let d = field.degree();
    let mut c = 1.0;
    for t in 0..d {
        let u: Vec<Rat> = field.integral_basis().row(t).to_vec();
        let uf: Vec<f64> = u.iter().map(crate::matrix::rat_to_f64).collect();
        let mut best: f64 = 0.0;
        for z in field.roots() {
            let v = uf
                .iter()
                .rev()
                .fold(num_complex::Complex64::new(0.0, 0.0), |acc, a| acc * z + a);
            best = best.max(v.norm());
        }
        c *= best.max(1.0);
    }
    c.powi(k as i32) * radius.powi((k * d) as i32) * (1.0 + 1e-9)
}

/// Per-module breakdown of the stratified count.
#[derive(Debug, Clone)]
pub struct StratifiedCount {
    pub total: u64,
    pub per_module: Vec<(String, u64)>,
    pub height_bound: f64,
}

/// `sum_D #{X ∈ M_n(Λ_D) : rank X = k, f(X / T) = 1}` for indicator `f`.
pub fn stratified_count(
    field: &Arc<NumberField>,
    n: usize,
    m: usize,
    k: usize,
    t: f64,
    f: &TestFunction,
) -> Result<StratifiedCount> {
    if !f.is_indicator() {
        return Err(Error::InvalidInput("stratified count needs an indicator test function".into()));
    }
    let radius = f.support_radius(m) * t;
    let bound = stratified_height_bound(field, k, radius);
    let modules = enumerate_primitive_modules(field, k, m, bound)?;
    let d = field.degree();
    let scale = ZLattice::ok_power(field, m).scale_sq();
    let per_module: Vec<(String, u64)> = modules
        .par_iter()
        .map(|p| {
            let mut c = 0u64;
            for x in matrices_with_rows(n, p, radius)? {
                let rows: Vec<Vec<Int>> = x.chunks(m * d).map(|r| r.iter().map(|&v| Int::from(v)).collect()).collect();
                if k_rank(field, &rows) != k {
                    continue;
                }
                let cols: Vec<f64> = (0..m)
                    .map(|j| {
                        (0..n)
                            .map(|i| field.trace_norm_integral(&x[(i * m + j) * d..(i * m + j + 1) * d]) as f64)
                            .sum()
                    })
                    .collect();
                let total: f64 = cols.iter().sum();
                if f.eval_quads(total, &cols, scale, t) == Some(1.0) {
                    c += 1;
                }
            }
            Ok((p.key(), c))
        })
        .collect::<Result<_>>()?;
    Ok(StratifiedCount {
        total: per_module.iter().map(|x| x.1).sum(),
        per_module,
        height_bound: bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::rank_over_k;
    use crate::matrix::rat;
    use crate::numfield::builtin_field;

    #[test]
    fn rank_examples() {
        let q = builtin_field("Q").unwrap();
        assert_eq!(rank_over_k(&FieldMatrix::zeros(&q, 2, 2)), 0);
        assert_eq!(rank_over_k(&FieldMatrix::from_ints(&q, 3, 2, &[2, 1, 4, 2, 6, 3])), 1);
        assert_eq!(rank_over_k(&FieldMatrix::from_ints(&q, 3, 2, &[1, 0, 0, 1, 1, 1])), 2);
    }

    #[test]
    fn factorization_examples() {
        let q = builtin_field("Q").unwrap();
        let a = FieldMatrix::from_ints(&q, 3, 2, &[2, 1, 4, 2, 6, 3]);
        let (c, d) = rank_factorize(&a).unwrap();
        assert_eq!(c, FieldMatrix::from_ints(&q, 3, 1, &[2, 4, 6]));
        assert_eq!(d.entries, FieldMatrix::from_rats(&q, 1, 2, &[rat(1, 1), rat(1, 2)]));
        assert_eq!(c.mul(&d.entries).unwrap(), a);
        let a = FieldMatrix::from_ints(&q, 3, 2, &[1, 1, 2, 2, 0, 0]);
        let (c, d) = rank_factorize(&a).unwrap();
        assert_eq!(c, FieldMatrix::from_ints(&q, 3, 1, &[1, 2, 0]));
        assert_eq!(d.entries, FieldMatrix::from_ints(&q, 1, 2, &[1, 1]));
        assert!(rank_factorize(&FieldMatrix::zeros(&q, 2, 2)).is_err());
    }

    #[test]
    fn lhs_examples() {
        let q = builtin_field("Q").unwrap();
        let r = lhs_count(&q, 2, 1, 1, 2.0, &TestFunction::ball(1.0)).unwrap();
        assert_eq!(r.exact_count, Some(12));
        let r = lhs_count(&q, 3, 2, 2, 1.0, &TestFunction::ball(1.0)).unwrap();
        assert_eq!(r.exact_count, Some(0));
        let r = lhs_count(&q, 3, 2, 1, 0.5, &TestFunction::ball(1.0)).unwrap();
        assert_eq!(r.exact_count, Some(0));
    }

    #[test]
    fn lhs_matches_naive() {
        let q = builtin_field("Q").unwrap();
        for (n, m, k, t) in [(3, 2, 1, 2.0), (3, 2, 2, 2.0), (2, 2, 1, 3.0), (3, 3, 2, 1.5)] {
            let f = TestFunction::ball(1.0);
            let fast = lhs_count(&q, n, m, k, t, &f).unwrap().exact_count.unwrap();
            assert_eq!(fast, lhs_count_naive(&q, n, m, k, t, &f).unwrap(), "{n} {m} {k} {t}");
        }
        let qi = builtin_field("Qi").unwrap();
        let f = TestFunction::ball(1.0);
        let fast = lhs_count(&qi, 2, 2, 1, 1.8, &f).unwrap().exact_count.unwrap();
        assert_eq!(fast, lhs_count_naive(&qi, 2, 2, 1, 1.8, &f).unwrap());
        let f = TestFunction::product_of_balls(1.0);
        let fast = lhs_count(&q, 3, 2, 1, 2.5, &f).unwrap().exact_count.unwrap();
        assert_eq!(fast, lhs_count_naive(&q, 3, 2, 1, 2.5, &f).unwrap());
    }

    #[test]
    fn stratified_matches_direct() {
        let q = builtin_field("Q").unwrap();
        for k in 1..=2 {
            let f = TestFunction::ball(1.0);
            let direct = lhs_count(&q, 3, 2, k, 2.0, &f).unwrap().exact_count.unwrap();
            assert_eq!(stratified_count(&q, 3, 2, k, 2.0, &f).unwrap().total, direct);
        }
    }
}
