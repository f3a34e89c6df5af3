//! The leading-constant series over echelon matrices, its per-module
//! integrals, and the zeta identities it reduces to over the rationals.

use super::TestFunction;
use crate::error::{Error, Result};
use crate::grassmann::{enumerate_primitive_modules, PrimitiveModule};
use crate::lattice::enumerate::ball_volume;
use crate::lattice::{short_vectors, ZLattice};
use crate::matrix::{rat_to_f64, Int};
use crate::numfield::{builtin_field, NumberField};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::Arc;

/// Riemann zeta at real `s > 1`: direct sum plus an Euler–Maclaurin
/// remainder (truncation error far below `1e-12` for `s >= 2`).
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta needs s > 1");
    let n = 64.0f64;
    let mut sum = 0.0;
    for k in 1..64 {
        sum += (k as f64).powf(-s);
    }
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Bernoulli corrections B_2/2!, B_4/4!, B_6/6!
    let mut fall = s;
    sum += fall * n.powf(-s - 1.0) / 12.0;
    fall *= (s + 1.0) * (s + 2.0);
    sum -= fall * n.powf(-s - 3.0) / 720.0;
    fall *= (s + 3.0) * (s + 4.0);
    sum += fall * n.powf(-s - 5.0) / 30240.0;
    sum
}

/// One summand `𝔇(D)^{-n} ∫ f(xD) dx` with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct TermValue {
    pub value: f64,
    pub std_error: f64,
    pub method: &'static str,
}

fn stream_id(key: &str) -> u64 {
    use sha2::{Digest, Sha256};
    let h = Sha256::digest(key.as_bytes());
    u64::from_le_bytes(h[..8].try_into().unwrap())
}

/// `𝔇(D)^{-n} ∫_{M_{n×k}(K_R)} f(xD) dx`.
pub fn term_value(p: &PrimitiveModule, n: usize, f: &TestFunction, mc_samples: usize, seed: u64) -> Result<TermValue> {
    let e = &p.echelon;
    let field = e.field().clone();
    let (k, m, d) = (e.k(), e.m(), field.degree());
    if n <= m {
        return Err(Error::Validation(format!("term integrals need n > m, got n={n}, m={m}")));
    }
    if let TestFunction::Ball { radius } = f {
        let dim = k * n * d;
        return Ok(TermValue {
            value: ball_volume(dim) * radius.powi(dim as i32) / p.height.powi(n as i32),
            std_error: 0.0,
            method: "closed_form_ball",
        });
    }
    let den_n = p.denominator.to_f64().unwrap().powi(n as i32);
    if let Some(col) = f.column_integral(n * d) {
        if e.is_pivot_only() {
            return Ok(TermValue {
                value: col.powi(k as i32) * f.column_at_zero().powi((m - k) as i32) / den_n,
                std_error: 0.0,
                method: "closed_form_pivot",
            });
        }
        if d == 1 && k == 1 {
            // Column j of xD is D_j x, of norm |D_j| |x|.
            let scal: Vec<f64> = (0..m).map(|j| rat_to_f64(&e.entries.get(0, j)[0]).abs()).collect();
            let (inner, outer) = match f {
                TestFunction::ProductOfBalls { radius } => (0.0, *radius),
                TestFunction::ProductOfAnnuli { inner, outer } => (*inner, *outer),
                _ => unreachable!(),
            };
            let mut lo: f64 = 0.0;
            let mut hi = f64::INFINITY;
            let mut zero_cols = 0;
            for &c in &scal {
                if c == 0.0 {
                    zero_cols += 1;
                    continue;
                }
                lo = lo.max(inner / c);
                hi = hi.min(outer / c);
            }
            let vol = if hi > lo {
                ball_volume(n) * (hi.powi(n as i32) - lo.powi(n as i32))
            } else {
                0.0
            };
            return Ok(TermValue {
                value: vol * f.column_at_zero().powi(zero_cols) / den_n,
                std_error: 0.0,
                method: "closed_form_product_rank1",
            });
        }
    }
    if mc_samples == 0 {
        return Err(Error::InvalidInput("Monte Carlo integration needs mc_samples > 0".into()));
    }
    let (mean_vol, se) = monte_carlo(&field, p, n, f, mc_samples, seed)?;
    Ok(TermValue {
        value: mean_vol / den_n,
        std_error: se / den_n,
        method: "monte_carlo",
    })
}

/// Uniform sampling of `x` from the box `[-R, R]^{nkd}` in orthonormal
/// embedded coordinates, `R` the Frobenius support of `f` (the pivot columns
/// of `xD` reproduce `x`, so the box contains the support).
fn monte_carlo(
    field: &Arc<NumberField>,
    p: &PrimitiveModule,
    n: usize,
    f: &TestFunction,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let e = &p.echelon;
    let (k, m, d) = (e.k(), e.m(), field.degree());
    let r = f.support_radius(m);
    // Multipliers of D_{lj} at each place.
    let mult: Vec<Vec<Complex64>> = (0..k * m)
        .map(|idx| {
            let a: Vec<f64> = e.entries.get(idx / m, idx % m).iter().map(rat_to_f64).collect();
            field
                .roots()
                .iter()
                .map(|z| a.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c))
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(&e.key()));
    let dim = n * k * d;
    let vol = (2.0 * r).powi(dim as i32);
    let mut x = vec![0.0; dim];
    let mut y = vec![0.0; n * m * d];
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..samples {
        for v in x.iter_mut() {
            *v = rng.gen_range(-r..=r);
        }
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            for l in 0..k {
                let xs = &x[(i * k + l) * d..(i * k + l + 1) * d];
                for j in 0..m {
                    let mu = &mult[l * m + j];
                    let out = &mut y[(i * m + j) * d..(i * m + j + 1) * d];
                    let mut pos = 0;
                    for (z, c) in field.roots().iter().zip(mu) {
                        if z.im == 0.0 {
                            out[pos] += xs[pos] * c.re;
                            pos += 1;
                        } else {
                            let w = Complex64::new(xs[pos], xs[pos + 1]) * c;
                            out[pos] += w.re;
                            out[pos + 1] += w.im;
                            pos += 2;
                        }
                    }
                }
            }
        }
        let v = f.eval_embedded(&y, n, m);
        s1 += v;
        s2 += v * v;
    }
    let nf = samples as f64;
    let mean = s1 / nf;
    let var = (s2 / nf - mean * mean).max(0.0);
    Ok((vol * mean, vol * (var / nf).sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermRecord {
    pub key: String,
    pub height: f64,
    pub denominator: Int,
    pub value: f64,
    pub std_error: f64,
    pub method: &'static str,
}

/// Truncated series for the leading constant.
#[derive(Debug, Clone, PartialEq)]
pub struct C1Estimate {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub cutoff: f64,
    pub partial_sum: f64,
    pub std_error: f64,
    pub term_count: usize,
    /// `C cutoff^{m-n}` with `C` fitted on the last decade of heights; a
    /// heuristic, never added to `partial_sum`.
    pub tail_estimate: f64,
    pub terms: Vec<TermRecord>,
}

/// Fits `C` in `sum_{H > X} term ≈ C X^{m-n}` from the terms with
/// `H ∈ (cutoff/10, cutoff]` and returns `C cutoff^{m-n}`.
pub fn fit_tail(terms: &[TermRecord], cutoff: f64, n: usize, m: usize) -> f64 {
    if m >= n || cutoff <= 1.0 {
        return 0.0;
    }
    let lo = cutoff / 10.0;
    let dec: f64 = terms.iter().filter(|t| t.height > lo && t.height <= cutoff).map(|t| t.value).sum();
    let e = m as f64 - n as f64;
    let span = lo.powf(e) - cutoff.powf(e);
    if dec <= 0.0 || span <= 0.0 {
        return 0.0;
    }
    dec / span * cutoff.powf(e)
}

pub fn c1_estimate(
    field: &Arc<NumberField>,
    n: usize,
    m: usize,
    k: usize,
    f: &TestFunction,
    cutoff: f64,
    mc_samples: usize,
    seed: u64,
) -> Result<C1Estimate> {
    if !(n > m && m >= k && k >= 1) {
        return Err(Error::Validation(format!("need n > m >= k >= 1, got n={n}, m={m}, k={k}")));
    }
    let modules = enumerate_primitive_modules(field, k, m, cutoff)?;
    let terms: Vec<TermRecord> = modules
        .par_iter()
        .map(|p| {
            let t = term_value(p, n, f, mc_samples, seed)?;
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
    let partial_sum = terms.iter().map(|t| t.value).sum();
    let std_error = terms.iter().map(|t| t.std_error * t.std_error).sum::<f64>().sqrt();
    let tail_estimate = if k == m { 0.0 } else { fit_tail(&terms, cutoff, n, m) };
    Ok(C1Estimate {
        n,
        m,
        k,
        cutoff,
        partial_sum,
        std_error,
        term_count: terms.len(),
        tail_estimate,
        terms,
    })
}

/// Two truncated sides of an identity that holds in the limit.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub relative_error: f64,
    /// Relative error after adding the continuum tail estimate to both sides.
    pub tail_corrected_relative_error: f64,
    pub note: Option<String>,
}

fn nonzero_vectors(m: usize, cutoff: f64) -> Result<Vec<(f64, bool)>> {
    let z = ZLattice::standard(m);
    Ok(short_vectors(&z, cutoff)?
        .into_iter()
        .filter(|x| x.iter().any(|&c| c != 0))
        .map(|x| {
            let norm = (x.iter().map(|&c| (c * c) as f64).sum::<f64>()).sqrt();
            let g = x.iter().fold(0i64, |g, &c| g.gcd(&c));
            (norm, g == 1)
        })
        .collect())
}

/// `sum_{|v| > X} |v|^{-n}` over `Z^m` approximated by the continuum:
/// `m V(m) X^{m-n} / (n - m)`.
fn continuum_tail(n: usize, m: usize, x: f64) -> f64 {
    m as f64 * ball_volume(m) * x.powf(m as f64 - n as f64) / (n as f64 - m as f64)
}

fn truncation_note(cutoff: f64) -> Option<String> {
    (cutoff < 10.0).then(|| format!("cutoff {cutoff} is small; the gap is a truncation artifact"))
}

/// `ζ(n) sum_{prim} |v|^{-n}` against `sum_{v ≠ 0} |v|^{-n}`, both over `|v| <= cutoff`.
pub fn primitive_zeta_check(n: usize, m: usize, cutoff: f64) -> Result<IdentityCheck> {
    if n <= m || m == 0 {
        return Err(Error::Validation(format!("need n > m >= 1, got n={n}, m={m}")));
    }
    let vs = nonzero_vectors(m, cutoff)?;
    let z = zeta(n as f64);
    let prim: f64 = vs.iter().filter(|v| v.1).map(|v| v.0.powi(-(n as i32))).sum();
    let all: f64 = vs.iter().map(|v| v.0.powi(-(n as i32))).sum();
    let lhs = z * prim;
    let rhs = all;
    let tail = continuum_tail(n, m, cutoff);
    let zm = if m >= 2 { zeta(m as f64) } else { f64::INFINITY };
    let lhs_c = z * (prim + if m >= 2 { tail / zm } else { 0.0 });
    let rhs_c = rhs + if m >= 2 { tail } else { 0.0 };
    Ok(IdentityCheck {
        lhs,
        rhs,
        relative_error: (lhs - rhs).abs() / rhs.abs(),
        tail_corrected_relative_error: (lhs_c - rhs_c).abs() / rhs_c.abs(),
        note: truncation_note(cutoff),
    })
}

/// Series over echelon matrices (`f` the unit ball, `K = Q`, `k = 1`)
/// against `V(n) Z(n/2) / ζ(n)` with `Z = (1/2) sum_{v ≠ 0} |v|^{-n}`.
pub fn koecher_identity_check(n: usize, m: usize, cutoff: f64) -> Result<IdentityCheck> {
    if n <= m || m == 0 {
        return Err(Error::Validation(format!("need n > m >= 1, got n={n}, m={m}")));
    }
    let q = builtin_field("Q")?;
    let f = TestFunction::ball(1.0);
    let modules = enumerate_primitive_modules(&q, 1, m, cutoff)?;
    let series: f64 = modules
        .iter()
        .map(|p| term_value(p, n, &f, 0, 0).map(|t| t.value))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .sum();
    let vs = nonzero_vectors(m, cutoff)?;
    let vn = ball_volume(n);
    let z = zeta(n as f64);
    let epstein = 0.5 * vs.iter().map(|v| v.0.powi(-(n as i32))).sum::<f64>();
    let zeta_side = vn * epstein / z;
    let tail = 0.5 * continuum_tail(n, m, cutoff);
    let (series_c, zeta_c) = if m >= 2 {
        (series + vn * tail / zeta(m as f64), zeta_side + vn * tail / z)
    } else {
        (series, zeta_side)
    };
    Ok(IdentityCheck {
        lhs: series,
        rhs: zeta_side,
        relative_error: (series - zeta_side).abs() / zeta_side.abs(),
        tail_corrected_relative_error: (series_c - zeta_c).abs() / zeta_c.abs(),
        note: truncation_note(cutoff),
    })
}

/// `V(n) (1/2) sum_{prim, |v| <= cutoff} |v|^{-n}`: the series side written
/// through the bijection `±v <-> D`.
pub fn primitive_half_sum(n: usize, m: usize, cutoff: f64) -> Result<f64> {
    let vs = nonzero_vectors(m, cutoff)?;
    Ok(ball_volume(n) * 0.5 * vs.iter().filter(|v| v.1).map(|v| v.0.powi(-(n as i32))).sum::<f64>())
}

/// Sum of the per-module values, sorted by module key for reproducibility.
pub fn sorted_sum(mut vals: Vec<(String, f64)>) -> f64 {
    vals.sort_by(|a, b| a.0.cmp(&b.0));
    vals.iter().map(|v| v.1).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{lambda_of, to_echelon, FieldMatrix};
    use crate::matrix::rat;
    use std::f64::consts::PI;

    fn module(vals: &[crate::matrix::Rat]) -> PrimitiveModule {
        let q = builtin_field("Q").unwrap();
        lambda_of(&to_echelon(&FieldMatrix::from_rats(&q, 1, vals.len(), vals)).unwrap()).unwrap()
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0) - PI * PI / 6.0).abs() < 1e-13);
        assert!((zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-13);
        assert!((zeta(3.0) - 1.202_056_903_159_594_2).abs() < 1e-13);
    }

    #[test]
    fn term_examples() {
        let f = TestFunction::ball(1.0);
        let t = term_value(&module(&[rat(1, 1), rat(0, 1)]), 3, &f, 0, 0).unwrap();
        assert!((t.value - 4.0 * PI / 3.0).abs() < 1e-12);
        let t = term_value(&module(&[rat(1, 1), rat(1, 2)]), 3, &f, 0, 0).unwrap();
        assert!((t.value - 5f64.powf(-1.5) * 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn product_closed_form_matches_monte_carlo() {
        let f = TestFunction::product_of_balls(1.0);
        for d in [[rat(1, 1), rat(0, 1)], [rat(1, 1), rat(1, 2)]] {
            let p = module(&d);
            let exact = term_value(&p, 3, &f, 0, 0).unwrap();
            let q = builtin_field("Q").unwrap();
            let (mc, se) = monte_carlo(&q, &p, 3, &f, 200_000, 7).unwrap();
            let mc = mc / p.denominator.to_f64().unwrap().powi(3);
            let se = se / p.denominator.to_f64().unwrap().powi(3);
            assert!((mc - exact.value).abs() <= 3.0 * se + 1e-12, "{} vs {} ± {}", mc, exact.value, se);
        }
    }

    #[test]
    fn c1_small_cutoff() {
        let q = builtin_field("Q").unwrap();
        let e = c1_estimate(&q, 3, 2, 1, &TestFunction::ball(1.0), 1.0, 0, 0).unwrap();
        assert_eq!(e.term_count, 2);
        assert!((e.partial_sum - 2.0 * 4.0 * PI / 3.0).abs() < 1e-12);
        let e5 = c1_estimate(&q, 3, 2, 1, &TestFunction::ball(1.0), 5.0, 0, 0).unwrap();
        let e10 = c1_estimate(&q, 3, 2, 1, &TestFunction::ball(1.0), 10.0, 0, 0).unwrap();
        assert!(e10.partial_sum >= e5.partial_sum);
        assert!(e10.tail_estimate >= 0.0);
    }

    #[test]
    fn identity_small_cases() {
        let c = primitive_zeta_check(4, 2, 1.0).unwrap();
        assert!((c.lhs - 4.0 * zeta(4.0)).abs() < 1e-12);
        assert!((c.rhs - 4.0).abs() < 1e-12);
        assert!(c.note.is_some());
        let c = primitive_zeta_check(3, 1, 50.0).unwrap();
        assert!((c.lhs - 2.0 * zeta(3.0)).abs() < 1e-12);
        let k = koecher_identity_check(4, 2, 1.0).unwrap();
        assert!((k.lhs - 2.0 * ball_volume(4)).abs() < 1e-12);
        for m in 1..=2 {
            let k = koecher_identity_check(3, m, 20.0).unwrap();
            assert!((k.lhs - primitive_half_sum(3, m, 20.0).unwrap()).abs() < 1e-12);
        }
    }
}
