//! Moments of lattice sums over the Hecke neighbors of a prime, their exact
//! stratification by rank, and the limiting series.

use super::finite::{containment_probability, enumerate_subspaces, rank_mod, SubspaceSampler};
use super::{eval_column, hecke_neighbor, lattice_sum, t_scale};
use crate::counting::series::{fit_tail, term_value, TermRecord};
use crate::counting::TestFunction;
use crate::error::{Error, Result};
use crate::grassmann::enumerate_primitive_modules;
use crate::harness::report::round15;
use crate::lattice::{k_rank, short_vectors, ZLattice};
use crate::matrix::{int_rank, rat_to_f64, rat_to_string, Int, Matrix, Rat};
use crate::numfield::{NumberField, PrimeIdealData};
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Ceiling on the number of column tuples visited by the stratified sum.
pub const TUPLE_CAP: usize = 50_000_000;

/// The admissible window `1 - s/n < 1/m` or `s = n - 1`, with `1 <= m < n`
/// and `1 <= s <= n`.
pub fn window_check(n: usize, m: usize, s: usize) -> Result<()> {
    if !(m >= 1 && m < n) {
        return Err(Error::Validation(format!("need 1 <= m <= n-1, got n={n}, m={m}")));
    }
    if !(s >= 1 && s <= n) {
        return Err(Error::Validation(format!("need 1 <= s <= n, got n={n}, s={s}")));
    }
    if (n - s) * m < n || s + 1 == n {
        return Ok(());
    }
    let lhs = Rat::new(Int::from(n - s), Int::from(n));
    Err(Error::Validation(format!(
        "moment window violated: need 1-s/n < 1/m or s = n-1, but 1-s/n = {} >= 1/m = 1/{m} and s = {s} != n-1 = {}",
        rat_to_string(&lhs),
        n - 1
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMode {
    /// Average over every subspace of the Grassmannian.
    Exact,
    /// Average over `count` uniform draws.
    Sampled { count: usize },
    /// Exact while the Grassmannian has at most `max_exact` points, else sampled.
    Auto { max_exact: usize, samples: usize },
}

impl MomentMode {
    pub fn resolve(self, s: usize, n: usize, q: u64) -> MomentMode {
        match self {
            MomentMode::Auto { max_exact, samples } => {
                if super::gaussian_binomial(s, n, q) <= Int::from(max_exact) {
                    MomentMode::Exact
                } else {
                    MomentMode::Sampled { count: samples }
                }
            }
            m => m,
        }
    }

    pub fn label(&self, seed: u64) -> String {
        match self {
            MomentMode::Exact => "exact_all_subspaces".into(),
            MomentMode::Sampled { count } => format!("sampled({count}, {seed})"),
            MomentMode::Auto { max_exact, samples } => format!("auto({max_exact}, {samples}, {seed})"),
        }
    }
}

/// An average over neighbors, exact as a rational when the summands are.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentValue {
    pub value: f64,
    pub exact: Option<Rat>,
    pub std_error: f64,
    pub lattices: usize,
}

fn check_args(field: &NumberField, prime: &PrimeIdealData, n: usize, s: usize, m: usize) -> Result<()> {
    if m == 0 || s > n || n == 0 {
        return Err(Error::Validation(format!("need m >= 1 and s <= n, got n={n}, s={s}, m={m}")));
    }
    if field.degree() != prime.residues().len() {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

/// `(1/|L|) sum_{Λ ∈ L(P, s)} (sum_{v ∈ Λ} g(v))^m`.
#[allow(clippy::too_many_arguments)]
pub fn moment_lhs(
    field: &Arc<NumberField>,
    prime: &PrimeIdealData,
    n: usize,
    s: usize,
    m: usize,
    g: &TestFunction,
    mode: MomentMode,
    seed: u64,
    include_zero: bool,
) -> Result<MomentValue> {
    check_args(field, prime, n, s, m)?;
    let p = prime.p();
    let sums: Vec<f64> = match mode.resolve(s, n, p) {
        MomentMode::Exact => enumerate_subspaces(s, n, p)?
            .par_iter()
            .map(|v| lattice_sum(field, &hecke_neighbor(field, prime, v)?, g, include_zero))
            .collect::<Result<_>>()?,
        MomentMode::Sampled { count } => {
            if count == 0 {
                return Err(Error::Validation("sampled mode needs a positive count".into()));
            }
            let sampler = SubspaceSampler::new(s, n, p)?;
            (0..count)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(i as u64);
                    let v = sampler.sample(&mut rng);
                    lattice_sum(field, &hecke_neighbor(field, prime, &v)?, g, include_zero)
                })
                .collect::<Result<_>>()?
        }
        MomentMode::Auto { .. } => unreachable!(),
    };
    let count = sums.len();
    let powers: Vec<f64> = sums.iter().map(|x| x.powi(m as i32)).collect();
    let mean = powers.iter().sum::<f64>() / count as f64;
    let exact = if g.is_indicator() && matches!(mode.resolve(s, n, p), MomentMode::Exact) {
        let total: Int = sums.iter().map(|&x| num_traits::pow(Int::from(x as u64), m)).sum();
        Some(Rat::new(total, Int::from(count)))
    } else {
        None
    };
    let std_error = if matches!(mode.resolve(s, n, p), MomentMode::Exact) || count < 2 {
        0.0
    } else {
        let var = powers.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (count - 1) as f64;
        (var / count as f64).sqrt()
    };
    Ok(MomentValue {
        value: exact.as_ref().map_or(mean, rat_to_f64),
        exact,
        std_error,
        lattices: count,
    })
}

/// The rank-stratified form of the exact neighbor average.
#[derive(Debug, Clone, PartialEq)]
pub struct StratifiedMoment {
    pub value: f64,
    pub exact: Option<Rat>,
    /// Contribution of tuples of `K`-rank `k`, for `k = 0..=m`.
    pub per_k: Vec<f64>,
    /// `(rank over K, rank mod P) -> number of tuples` (weights dropped).
    pub rank_table: BTreeMap<(usize, usize), u64>,
    pub tuples: u64,
}

struct Column {
    weight: f64,
    reduced: Vec<u64>,
    coords: Vec<Int>,
}

#[derive(Default)]
struct Tally {
    sums: BTreeMap<(usize, usize), f64>,
    counts: BTreeMap<(usize, usize), u64>,
}

impl Tally {
    fn merge(&mut self, o: Tally) {
        for (k, v) in o.sums {
            *self.sums.entry(k).or_default() += v;
        }
        for (k, v) in o.counts {
            *self.counts.entry(k).or_default() += v;
        }
    }
}

fn k_rank_fast(field: &NumberField, cols: &[Vec<Int>]) -> usize {
    if field.degree() == 1 {
        int_rank(&Matrix::from_rows(cols.to_vec(), cols[0].len()))
    } else {
        k_rank(field, cols)
    }
}

/// `sum_x f(x / T_P) Pr[span π_P(x) ⊆ S]` over `x ∈ M_{n×m}(O_K)`, with
/// `f` the product of `g` over columns and the probability taken from the
/// rank of `x` mod `P`. Equals the exact-mode `moment_lhs`.
#[allow(clippy::too_many_arguments)]
pub fn moment_stratified(
    field: &Arc<NumberField>,
    prime: &PrimeIdealData,
    n: usize,
    s: usize,
    m: usize,
    g: &TestFunction,
    include_zero: bool,
) -> Result<StratifiedMoment> {
    check_args(field, prime, n, s, m)?;
    let p = prime.p();
    let t = t_scale(field, prime, n, s);
    let amb = ZLattice::ok_power(field, n);
    let scale = amb.scale_sq();
    let mut cols = Vec::new();
    for x in short_vectors(&amb, g.support_radius(1) * t)? {
        if !include_zero && x.iter().all(|&c| c == 0) {
            continue;
        }
        let q = amb.quad(&x).to_f64().unwrap();
        let w = eval_column(field, g, &x, q, scale / (t * t));
        if w != 0.0 {
            cols.push(Column {
                weight: w,
                reduced: prime.reduce_vec(&x),
                coords: x.iter().map(|&c| Int::from(c)).collect(),
            });
        }
    }
    let tuples = (cols.len() as f64).powi(m as i32);
    if tuples > TUPLE_CAP as f64 {
        return Err(Error::CapExceeded {
            estimate: tuples,
            cap: TUPLE_CAP,
            context: format!("column tuples for p={p}, n={n}, m={m}"),
        });
    }
    fn rec(
        field: &NumberField,
        p: u64,
        cols: &[Column],
        m: usize,
        chosen: &mut Vec<usize>,
        w: f64,
        tally: &mut Tally,
    ) {
        if chosen.len() == m {
            let red: Vec<Vec<u64>> = chosen.iter().map(|&i| cols[i].reduced.clone()).collect();
            let ks: Vec<Vec<Int>> = chosen.iter().map(|&i| cols[i].coords.clone()).collect();
            let key = (k_rank_fast(field, &ks), rank_mod(&red, p));
            *tally.sums.entry(key).or_default() += w;
            *tally.counts.entry(key).or_default() += 1;
            return;
        }
        for i in 0..cols.len() {
            chosen.push(i);
            rec(field, p, cols, m, chosen, w * cols[i].weight, tally);
            chosen.pop();
        }
    }
    let parts: Vec<Tally> = (0..cols.len())
        .into_par_iter()
        .map(|i| {
            let mut tally = Tally::default();
            rec(field, p, &cols, m, &mut vec![i], cols[i].weight, &mut tally);
            tally
        })
        .collect();
    let mut tally = Tally::default();
    for part in parts {
        tally.merge(part);
    }
    let prob: Vec<Rat> = (0..=m).map(|r| containment_probability(r, s, n, p)).collect();
    let mut per_k = vec![0.0; m + 1];
    let mut value = 0.0;
    for (&(k, r), &w) in &tally.sums {
        let c = w * rat_to_f64(&prob[r]);
        per_k[k] += c;
        value += c;
    }
    let exact = g.is_indicator().then(|| {
        tally
            .counts
            .iter()
            .map(|(&(_, r), &c)| Rat::from_integer(Int::from(c)) * &prob[r])
            .fold(Rat::zero(), |a, b| a + b)
    });
    Ok(StratifiedMoment {
        value: exact.as_ref().map_or(value, rat_to_f64),
        exact,
        per_k,
        tuples: tally.counts.values().sum(),
        rank_table: tally.counts,
    })
}

/// `f(x) = prod_j g(x_j)` over the `m` columns of `x`.
pub fn column_product(g: &TestFunction, m: usize) -> TestFunction {
    match g {
        TestFunction::Ball { radius } | TestFunction::ProductOfBalls { radius } => {
            TestFunction::ProductOfBalls { radius: *radius }
        }
        TestFunction::ProductOfAnnuli { inner, outer } => TestFunction::ProductOfAnnuli {
            inner: *inner,
            outer: *outer,
        },
        TestFunction::Custom { support_radius, eval } => {
            let eval = eval.clone();
            let r = *support_radius;
            TestFunction::Custom {
                support_radius: r * (m as f64).sqrt(),
                eval: Arc::new(move |x: &[f64], n: usize, m: usize| {
                    let d = x.len() / (n * m);
                    (0..m)
                        .map(|j| {
                            let col: Vec<f64> =
                                (0..n).flat_map(|i| x[(i * m + j) * d..(i * m + j + 1) * d].to_vec()).collect();
                            eval(&col, n, 1)
                        })
                        .product()
                }),
            }
        }
    }
}

/// Truncated limiting series, one block per rank `k = 0..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsLimit {
    pub value: f64,
    pub std_error: f64,
    /// `(k, partial sum, tail estimate, number of terms)`.
    pub per_k: Vec<(usize, f64, f64, usize)>,
    pub tail_estimate: f64,
}

/// `sum_{k=0}^m sum_{D, H(D) <= cutoff} 𝔇(D)^{-n} ∫ f(xD) dx` with
/// `f = prod_j g(x_j)`; the `k = 0` term is `g(0)^m`. Without zero the
/// `k = 0` term and every `D` with a zero column drop out.
#[allow(clippy::too_many_arguments)]
pub fn moment_rhs_limit(
    field: &Arc<NumberField>,
    n: usize,
    m: usize,
    g: &TestFunction,
    cutoff: f64,
    mc_samples: usize,
    seed: u64,
    include_zero: bool,
) -> Result<RhsLimit> {
    if !(n >= 2 && m >= 1 && m < n) {
        return Err(Error::Validation(format!("need n >= 2 and 1 <= m <= n-1, got n={n}, m={m}")));
    }
    let f = column_product(g, m);
    let d = field.degree();
    let g0 = g.at_zero(n, 1, d);
    let mut per_k = vec![(0, if include_zero { g0.powi(m as i32) } else { 0.0 }, 0.0, 1)];
    let mut var = 0.0;
    for k in 1..=m {
        let modules = enumerate_primitive_modules(field, k, m, cutoff)?;
        let terms: Vec<TermRecord> = modules
            .par_iter()
            .filter(|p| include_zero || !has_zero_column(p))
            .map(|p| {
                let t = term_value(p, n, &f, mc_samples, seed)?;
                Ok(TermRecord {
                    key: p.key(),
                    height: p.height,
                    denominator: p.denominator.clone(),
                    value: t.value,
                    std_error: t.std_error,
                    method: t.method,
                })
            })
            .collect::<Result<_>>()?;
        let partial: f64 = terms.iter().map(|t| t.value).sum();
        var += terms.iter().map(|t| t.std_error * t.std_error).sum::<f64>();
        let tail = if k == m { 0.0 } else { fit_tail(&terms, cutoff, n, m) };
        per_k.push((k, partial, tail, terms.len()));
    }
    Ok(RhsLimit {
        value: per_k.iter().map(|x| x.1).sum(),
        std_error: var.sqrt(),
        tail_estimate: per_k.iter().map(|x| x.2).sum(),
        per_k,
    })
}

fn has_zero_column(p: &crate::grassmann::PrimitiveModule) -> bool {
    let e = &p.echelon.entries;
    (0..e.ncols()).any(|j| (0..e.nrows()).all(|i| e.get(i, j).iter().all(|c| c.is_zero())))
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub p: u64,
    pub s: usize,
    pub n: usize,
    pub m: usize,
    pub mode: String,
    pub t_scale: f64,
    pub lhs: MomentValue,
    pub stratified: Option<StratifiedMoment>,
    pub rhs_limit: f64,
    pub abs_error: f64,
    pub lhs_nonzero: MomentValue,
    pub rhs_limit_nonzero: f64,
    pub abs_error_nonzero: f64,
}

fn opt_rat(r: &Option<Rat>) -> serde_json::Value {
    r.as_ref().map_or(serde_json::Value::Null, |x| json!(rat_to_string(x)))
}

impl MomentReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "p": self.p,
            "s": self.s,
            "n": self.n,
            "m": self.m,
            "mode": self.mode,
            "t_scale": round15(self.t_scale),
            "include_zero": true,
            "lhs": round15(self.lhs.value),
            "lhs_exact": opt_rat(&self.lhs.exact),
            "lhs_std_error": round15(self.lhs.std_error),
            "lattices": self.lhs.lattices,
            "stratified": self.stratified.as_ref().map(|s| round15(s.value)),
            "stratified_exact": self.stratified.as_ref().map_or(serde_json::Value::Null, |s| opt_rat(&s.exact)),
            "stratified_per_k": self.stratified.as_ref().map(|s| s.per_k.iter().map(|&v| round15(v)).collect::<Vec<_>>()),
            "rhs_limit": round15(self.rhs_limit),
            "abs_error": round15(self.abs_error),
            "lhs_nonzero": round15(self.lhs_nonzero.value),
            "rhs_limit_nonzero": round15(self.rhs_limit_nonzero),
            "abs_error_nonzero": round15(self.abs_error_nonzero),
        })
    }
}

/// Per-prime moments against the limiting series. The stratified value is
/// `None` when its tuple count exceeds the cap.
#[allow(clippy::too_many_arguments)]
pub fn convergence_table(
    field: &Arc<NumberField>,
    n: usize,
    m: usize,
    s: usize,
    g: &TestFunction,
    primes: &[u64],
    mode: MomentMode,
    cutoff: f64,
    mc_samples: usize,
    seed: u64,
) -> Result<Vec<MomentReport>> {
    window_check(n, m, s)?;
    if primes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("primes must be strictly increasing".into()));
    }
    let rhs = moment_rhs_limit(field, n, m, g, cutoff, mc_samples, seed, true)?;
    let rhs0 = moment_rhs_limit(field, n, m, g, cutoff, mc_samples, seed, false)?;
    primes
        .iter()
        .map(|&p| convergence_row(field, n, m, s, g, p, mode, seed, &rhs, &rhs0))
        .collect()
}

/// One prime of `convergence_table`, against precomputed limits with and
/// without the zero vector.
#[allow(clippy::too_many_arguments)]
pub fn convergence_row(
    field: &Arc<NumberField>,
    n: usize,
    m: usize,
    s: usize,
    g: &TestFunction,
    p: u64,
    mode: MomentMode,
    seed: u64,
    rhs: &RhsLimit,
    rhs0: &RhsLimit,
) -> Result<MomentReport> {
    let prime = PrimeIdealData::first_above(field, p)?;
    let resolved = mode.resolve(s, n, p);
    let lhs = moment_lhs(field, &prime, n, s, m, g, resolved, seed, true)?;
    let lhs0 = moment_lhs(field, &prime, n, s, m, g, resolved, seed, false)?;
    let stratified = match moment_stratified(field, &prime, n, s, m, g, true) {
        Ok(v) => Some(v),
        Err(Error::CapExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(MomentReport {
        p,
        s,
        n,
        m,
        mode: resolved.label(seed),
        t_scale: t_scale(field, &prime, n, s),
        abs_error: (lhs.value - rhs.value).abs(),
        abs_error_nonzero: (lhs0.value - rhs0.value).abs(),
        lhs,
        stratified,
        rhs_limit: rhs.value,
        lhs_nonzero: lhs0,
        rhs_limit_nonzero: rhs0.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::builtin_field;

    fn q() -> Arc<NumberField> {
        builtin_field("Q").unwrap()
    }

    #[test]
    fn window_examples() {
        assert!(window_check(3, 2, 2).is_ok());
        let e = window_check(4, 3, 1).unwrap_err().to_string();
        assert!(e.contains("1-s/n < 1/m"), "{e}");
        assert!(window_check(4, 3, 3).is_ok());
        assert!(window_check(3, 3, 2).is_err());
    }

    #[test]
    fn lhs_single_lattice_when_full() {
        let q = q();
        let p = PrimeIdealData::first_above(&q, 3).unwrap();
        let g = TestFunction::ball(1.5);
        let v = moment_lhs(&q, &p, 2, 2, 1, &g, MomentMode::Exact, 0, true).unwrap();
        assert_eq!(v.exact, Some(Rat::from_integer(Int::from(9))));
        assert_eq!(v.lattices, 1);
    }

    #[test]
    fn lhs_three_lattices_by_hand() {
        // Z^2 ∩ {a ≡ 0}, {b ≡ 0}, {a ≡ b} mod 2, scaled by 1/√2, ball 1.5.
        let q = q();
        let p = PrimeIdealData::first_above(&q, 2).unwrap();
        let g = TestFunction::ball(1.5);
        let v = moment_lhs(&q, &p, 2, 1, 1, &g, MomentMode::Exact, 0, true).unwrap();
        let mut total = 0;
        for (u, w) in [(0i64, 1i64), (1, 0), (1, 1)] {
            for a in -6i64..=6 {
                for b in -6i64..=6 {
                    if (u * a + w * b).rem_euclid(2) == 0 && (a * a + b * b) as f64 / 2.0 <= 2.25 {
                        total += 1;
                    }
                }
            }
        }
        assert_eq!(v.exact, Some(Rat::new(Int::from(total), Int::from(3))));
    }

    #[test]
    fn stratified_equals_lhs_exactly() {
        let q = q();
        for &(p, n, s, m, r) in &[(2u64, 2, 1, 1, 1.5), (3, 3, 2, 2, 1.2), (2, 3, 2, 2, 1.5)] {
            let prime = PrimeIdealData::first_above(&q, p).unwrap();
            let g = TestFunction::ball(r);
            for zero in [true, false] {
                let a = moment_lhs(&q, &prime, n, s, m, &g, MomentMode::Exact, 0, zero).unwrap();
                let b = moment_stratified(&q, &prime, n, s, m, &g, zero).unwrap();
                assert_eq!(a.exact, b.exact, "p={p} n={n} s={s} m={m} zero={zero}");
            }
        }
    }

    #[test]
    fn stratified_below_min_norm_is_g0() {
        let q = q();
        let prime = PrimeIdealData::first_above(&q, 3).unwrap();
        let b = moment_stratified(&q, &prime, 3, 2, 2, &TestFunction::ball(0.1), true).unwrap();
        assert_eq!(b.exact, Some(Rat::from_integer(Int::from(1))));
    }

    #[test]
    fn rhs_m1_matches_c1() {
        let q = q();
        let g = TestFunction::ball(1.0);
        let r = moment_rhs_limit(&q, 3, 1, &g, 1e9, 0, 0, true).unwrap();
        assert_eq!(r.per_k.len(), 2);
        assert!((r.per_k[1].1 - crate::lattice::enumerate::ball_volume(3)).abs() < 1e-12);
        assert!((r.value - 1.0 - crate::lattice::enumerate::ball_volume(3)).abs() < 1e-12);
        let r0 = moment_rhs_limit(&q, 3, 1, &g, 1e9, 0, 0, false).unwrap();
        assert!((r0.value - crate::lattice::enumerate::ball_volume(3)).abs() < 1e-12);
    }

    #[test]
    fn rhs_cutoff_doubling_within_tail() {
        let q = q();
        let g = TestFunction::ball(1.2);
        let a = moment_rhs_limit(&q, 3, 2, &g, 30.0, 0, 0, true).unwrap();
        let b = moment_rhs_limit(&q, 3, 2, &g, 60.0, 0, 0, true).unwrap();
        assert!(b.value >= a.value);
        assert!(b.value - a.value < a.tail_estimate, "{} vs {}", b.value - a.value, a.tail_estimate);
    }

    #[test]
    fn sampled_close_to_exact() {
        let q = q();
        let prime = PrimeIdealData::first_above(&q, 3).unwrap();
        let g = TestFunction::ball(1.5);
        let e = moment_lhs(&q, &prime, 3, 2, 1, &g, MomentMode::Exact, 0, true).unwrap();
        let s = moment_lhs(&q, &prime, 3, 2, 1, &g, MomentMode::Sampled { count: e.lattices }, 9, true).unwrap();
        assert!((s.value - e.value).abs() <= 3.0 * s.std_error.max(1e-9) + 1e-9);
    }
}
