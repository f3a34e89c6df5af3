//! Univariate polynomials with integer or rational coefficients, stored
//! constant term first.

use crate::matrix::{Int, Rat};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Reduces `a` modulo the monic polynomial `f` (both constant-first), in place.
pub fn rem_monic(a: &mut Vec<Rat>, f: &[Int]) {
    let d = f.len() - 1;
    while a.len() > d {
        let lead = a.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = a.len() - d;
        for (i, c) in f[..d].iter().enumerate() {
            a[shift + i] -= &lead * Rat::from_integer(c.clone());
        }
    }
    a.resize(d, Rat::zero());
}

pub fn mul_rat(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Evaluates a rational polynomial at a field element given in power-basis
/// coordinates, reducing modulo `f`.
pub fn compose_mod(g: &[Rat], x: &[Rat], f: &[Int]) -> Vec<Rat> {
    let d = f.len() - 1;
    let mut acc = vec![Rat::zero(); d];
    for c in g.iter().rev() {
        let mut prod = mul_rat(&acc, x);
        rem_monic(&mut prod, f);
        acc = prod;
        acc[0] += c;
    }
    acc
}

pub fn eval_complex(f: &[Int], z: Complex64) -> Complex64 {
    f.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_f64().unwrap_or(f64::NAN))
}

fn eval_complex_f64(f: &[f64], z: Complex64) -> (Complex64, Complex64) {
    // Horner for value and derivative.
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in f.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of a monic integer polynomial by Aberth–Ehrlich
/// iteration followed by Newton polishing. Returns the roots and the largest
/// relative residual.
pub fn complex_roots(f: &[Int]) -> (Vec<Complex64>, f64) {
    let d = f.len() - 1;
    let coeffs: Vec<f64> = f.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    if d == 1 {
        return (vec![Complex64::new(-coeffs[0], 0.0)], 0.0);
    }
    // Cauchy bound for the initial circle.
    let bound = 1.0 + coeffs[..d].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64 + 0.4;
            Complex64::from_polar(0.5 * bound, ang)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..d {
            let (p, dp) = eval_complex_f64(&coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..d {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-17 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..5 {
            let (p, dp) = eval_complex_f64(&coeffs, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            *zi -= p / dp;
        }
    }
    let scale: f64 = coeffs.iter().map(|c| c.abs()).sum();
    let resid = z
        .iter()
        .map(|zi| {
            let (p, _) = eval_complex_f64(&coeffs, *zi);
            p.norm() / (scale * (1.0 + zi.norm()).powi(d as i32))
        })
        .fold(0.0, f64::max);
    (z, resid)
}

/// Power sums `Tr(theta^k)` for `k = 0..count` via Newton's identities.
pub fn power_sums(f: &[Int], count: usize) -> Vec<Int> {
    let d = f.len() - 1;
    let mut p = vec![Int::zero(); count.max(1)];
    p[0] = Int::from(d);
    for k in 1..count {
        let mut s = Int::zero();
        for i in 1..=d.min(k - 1) {
            s += &f[d - i] * &p[k - i];
        }
        if k <= d {
            s += Int::from(k) * &f[d - k];
        }
        p[k] = -s;
    }
    p
}

fn eval_int(f: &[Int], x: &Int) -> Int {
    f.iter().rev().fold(Int::zero(), |acc, c| acc * x + c)
}

fn divisors(n: &Int) -> Vec<Int> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut i = Int::one();
    while &i * &i <= n {
        if (&n % &i).is_zero() {
            out.push(i.clone());
            let other = &n / &i;
            if other != i {
                out.push(other);
            }
        }
        i += 1;
    }
    out
}

/// Integer roots of a monic integer polynomial (its only possible rational roots).
pub fn integer_roots(f: &[Int]) -> Vec<Int> {
    if f[0].is_zero() {
        let mut r = vec![Int::zero()];
        if f.len() > 2 {
            r.extend(integer_roots(&f[1..]));
        }
        return r;
    }
    let mut out = Vec::new();
    for dv in divisors(&f[0]) {
        for cand in [dv.clone(), -dv] {
            if eval_int(f, &cand).is_zero() {
                out.push(cand);
            }
        }
    }
    out
}

/// Outcome of the irreducibility test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible,
    Reducible,
    /// Degree above 4: not checked, asserted by the caller.
    Unchecked,
}

/// Irreducibility over the rationals for monic integer polynomials of degree
/// at most 4 (Gauss's lemma reduces this to monic integer factorizations).
pub fn irreducibility(f: &[Int]) -> Irreducibility {
    let d = f.len() - 1;
    if d == 1 {
        return Irreducibility::Irreducible;
    }
    if d > 4 {
        return Irreducibility::Unchecked;
    }
    if !integer_roots(f).is_empty() {
        return Irreducibility::Reducible;
    }
    if d <= 3 {
        return Irreducibility::Irreducible;
    }
    // x^4 + a x^3 + b x^2 + c x + e = (x^2 + p x + q)(x^2 + r x + s)
    let (e, c, b, a) = (&f[0], &f[1], &f[2], &f[3]);
    for q in divisors(e).into_iter().flat_map(|v| [v.clone(), -v]) {
        let s = e / &q;
        if s != q {
            // p (s - q) = c - q a
            let num = c - &q * a;
            let den = &s - &q;
            if !(&num % &den).is_zero() {
                continue;
            }
            let p = num / den;
            let r = a - &p;
            if &q + &s + &p * &r == *b {
                return Irreducibility::Reducible;
            }
        } else {
            // s == q: need c = q a and p r = b - 2q, p + r = a.
            if *c != &q * a {
                continue;
            }
            let prod = b - Int::from(2) * &q;
            let disc = a * a - Int::from(4) * &prod;
            if disc.is_negative() {
                continue;
            }
            let root = disc.sqrt();
            if &root * &root == disc && (a + &root).is_even() {
                return Irreducibility::Reducible;
            }
        }
    }
    Irreducibility::Irreducible
}

/// Best rational approximation with denominator at most `max_den` by
/// continued fractions.
pub fn rationalize(x: f64, max_den: i64) -> Rat {
    let mut h0: i128 = 0;
    let mut h1: i128 = 1;
    let mut k0: i128 = 1;
    let mut k1: i128 = 0;
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a;
        if frac.abs() < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    if k1 == 0 {
        return Rat::zero();
    }
    Rat::new(Int::from(h1), Int::from(k1))
}

pub fn gcd_all(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |g, x| g.gcd(x))
}
