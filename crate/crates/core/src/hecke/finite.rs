//! Linear algebra over `F_p`, Grassmannian enumeration and uniform sampling.

use crate::error::{Error, Result};
use crate::matrix::{Int, Rat};
use num_traits::{One, Zero};
use rand::Rng;

/// Default ceiling on the number of subspaces listed in exact mode.
pub const DEFAULT_SUBSPACE_CAP: usize = 1_000_000;

/// Number of `u`-dimensional subspaces of `F_q^t`, by the `q`-Pascal rule.
pub fn gaussian_binomial(u: usize, t: usize, q: u64) -> Int {
    if u > t {
        return Int::zero();
    }
    let qi = Int::from(q);
    // row[j] = [i choose j]_q, built up for i = 0..=t
    let mut row = vec![Int::one()];
    for i in 1..=t {
        let mut next = vec![Int::one(); i + 1];
        let mut qj = Int::one();
        for j in 1..i {
            qj *= &qi;
            next[j] = &row[j - 1] + &qj * &row[j];
        }
        row = next;
    }
    row[u].clone()
}

/// Probability that a uniform `s`-dimensional subspace of `F_q^n` contains a
/// fixed `k`-dimensional one.
pub fn containment_probability(k: usize, s: usize, n: usize, q: u64) -> Rat {
    if s < k || k > n {
        return Rat::zero();
    }
    Rat::new(gaussian_binomial(s - k, n - k, q), gaussian_binomial(s, n, q))
}

/// `ε₁` in `containment_probability = q^{-k(n-s)} (1 + ε₁)`.
pub fn containment_epsilon(k: usize, s: usize, n: usize, q: u64) -> f64 {
    let p = crate::matrix::rat_to_f64(&containment_probability(k, s, n, q));
    let e = (k * (n - s.min(n))) as i32;
    p * (q as f64).powi(e) - 1.0
}

fn check_prime_field(q: u64) -> Result<()> {
    if q < 2 || (2..q).take_while(|i| i * i <= q).any(|i| q.is_multiple_of(i)) {
        return Err(Error::InvalidInput(format!("F_q needs a prime q, got {q}")));
    }
    Ok(())
}

fn inv(a: u64, p: u64) -> u64 {
    crate::numfield::mod_inverse(a, p).expect("nonzero residue mod a prime")
}

/// Reduced row echelon form over `F_p`, dropping zero rows; returns the
/// pivot columns as well.
pub fn rref_mod(rows: &[Vec<u64>], p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pr);
        let iv = inv(a[r][c], p);
        for x in a[r].iter_mut() {
            *x = *x * iv % p;
        }
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..ncols {
                    a[i][j] = (a[i][j] + (p - f) * a[r][j]) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank_mod(rows: &[Vec<u64>], p: u64) -> usize {
    rref_mod(rows, p).1.len()
}

/// An `s`-dimensional subspace of `F_q^n` held by its reduced echelon basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteSubspace {
    q: u64,
    n: usize,
    basis: Vec<Vec<u64>>,
}

impl FiniteSubspace {
    /// Span of the given rows, which must be independent.
    pub fn new(q: u64, n: usize, rows: &[Vec<u64>]) -> Result<Self> {
        check_prime_field(q)?;
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(format!("rows must have length {n}")));
        }
        let (basis, piv) = rref_mod(rows, q);
        if piv.len() != rows.len() {
            return Err(Error::RankDeficient {
                expected: rows.len(),
                found: piv.len(),
            });
        }
        Ok(FiniteSubspace { q, n, basis })
    }

    pub fn full(q: u64, n: usize) -> Result<Self> {
        let rows: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
        Self::new(q, n, &rows)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect()
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let p = self.q;
        let mut w: Vec<u64> = v.iter().map(|x| x % p).collect();
        for (row, c) in self.basis.iter().zip(self.pivots()) {
            let f = w[c];
            if f != 0 {
                for j in 0..self.n {
                    w[j] = (w[j] + (p - f) * row[j]) % p;
                }
            }
        }
        w.iter().all(|&x| x == 0)
    }

    pub fn key(&self) -> String {
        let rows: Vec<String> = self
            .basis
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        format!("F{}^{}:[{}]", self.q, self.n, rows.join(";"))
    }
}

/// Free positions `(row, col)` of the Schubert cell with these pivots.
fn free_positions(n: usize, pivots: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, &c) in pivots.iter().enumerate() {
        for j in (c + 1)..n {
            if !pivots.contains(&j) {
                out.push((i, j));
            }
        }
    }
    out
}

fn pivot_sets(s: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, s: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for c in start..n {
            cur.push(c);
            rec(c + 1, s, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, s, n, &mut Vec::new(), &mut out);
    out
}

fn cell_matrix(n: usize, pivots: &[usize], free: &[(usize, usize)], values: &[u64]) -> Vec<Vec<u64>> {
    let mut rows = vec![vec![0u64; n]; pivots.len()];
    for (i, &c) in pivots.iter().enumerate() {
        rows[i][c] = 1;
    }
    for (&(i, j), &v) in free.iter().zip(values) {
        rows[i][j] = v;
    }
    rows
}

/// Every `s`-dimensional subspace of `F_q^n`, ordered by Schubert cell and
/// then by free entries.
pub fn enumerate_subspaces(s: usize, n: usize, q: u64) -> Result<Vec<FiniteSubspace>> {
    enumerate_subspaces_capped(s, n, q, DEFAULT_SUBSPACE_CAP)
}

pub fn enumerate_subspaces_capped(s: usize, n: usize, q: u64, cap: usize) -> Result<Vec<FiniteSubspace>> {
    check_prime_field(q)?;
    if s > n {
        return Err(Error::InvalidInput(format!("need s <= n, got s={s}, n={n}")));
    }
    let count = gaussian_binomial(s, n, q);
    if count > Int::from(cap) {
        return Err(Error::CapExceeded {
            estimate: crate::lattice::int_ln(&count).exp(),
            cap,
            context: format!("Gr({s}, F_{q}^{n})"),
        });
    }
    let mut out = Vec::new();
    for piv in pivot_sets(s, n) {
        let free = free_positions(n, &piv);
        let mut vals = vec![0u64; free.len()];
        loop {
            out.push(FiniteSubspace {
                q,
                n,
                basis: cell_matrix(n, &piv, &free, &vals),
            });
            // odometer
            let mut i = 0;
            while i < vals.len() {
                vals[i] += 1;
                if vals[i] < q {
                    break;
                }
                vals[i] = 0;
                i += 1;
            }
            if i == vals.len() {
                break;
            }
        }
    }
    Ok(out)
}

/// Uniform sampler on `Gr(s, F_q^n)`: a Schubert cell is drawn with weight
/// equal to its size `q^{#free}`, then its free entries uniformly.
#[derive(Debug, Clone)]
pub struct SubspaceSampler {
    q: u64,
    n: usize,
    cells: Vec<(Vec<usize>, Vec<(usize, usize)>)>,
    cumulative: Vec<u128>,
}

impl SubspaceSampler {
    pub fn new(s: usize, n: usize, q: u64) -> Result<Self> {
        check_prime_field(q)?;
        if s > n {
            return Err(Error::InvalidInput(format!("need s <= n, got s={s}, n={n}")));
        }
        let mut cells = Vec::new();
        let mut cumulative = Vec::new();
        let mut total: u128 = 0;
        for piv in pivot_sets(s, n) {
            let free = free_positions(n, &piv);
            let w = (q as u128)
                .checked_pow(free.len() as u32)
                .ok_or(Error::Overflow("Schubert cell size"))?;
            total = total.checked_add(w).ok_or(Error::Overflow("Grassmannian size"))?;
            cumulative.push(total);
            cells.push((piv, free));
        }
        Ok(SubspaceSampler {
            q,
            n,
            cells,
            cumulative,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FiniteSubspace {
        let total = *self.cumulative.last().unwrap();
        let u = rng.gen_range(0..total);
        let idx = self.cumulative.partition_point(|&c| c <= u);
        let (piv, free) = &self.cells[idx];
        let vals: Vec<u64> = free.iter().map(|_| rng.gen_range(0..self.q)).collect();
        FiniteSubspace {
            q: self.q,
            n: self.n,
            basis: cell_matrix(self.n, piv, free, &vals),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::{BTreeSet, HashMap};

    #[test]
    fn gaussian_binomial_examples() {
        assert_eq!(gaussian_binomial(1, 2, 2), Int::from(3));
        assert_eq!(gaussian_binomial(2, 4, 3), Int::from(130));
        assert_eq!(gaussian_binomial(0, 5, 7), Int::one());
        assert_eq!(gaussian_binomial(5, 5, 7), Int::one());
    }

    /// Counts subspaces by brute force: distinct row spaces of all s×n matrices.
    fn brute_count(s: usize, n: usize, q: u64) -> usize {
        let total = (q as usize).pow((s * n) as u32);
        let mut seen = BTreeSet::new();
        for code in 0..total {
            let mut c = code;
            let rows: Vec<Vec<u64>> = (0..s)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            let v = (c % q as usize) as u64;
                            c /= q as usize;
                            v
                        })
                        .collect()
                })
                .collect();
            let (b, piv) = rref_mod(&rows, q);
            if piv.len() == s {
                seen.insert(b);
            }
        }
        seen.len()
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for &(s, n, q) in &[(1, 2, 2), (2, 3, 2), (2, 4, 2), (1, 3, 3), (2, 3, 3), (2, 2, 5)] {
            let list = enumerate_subspaces(s, n, q).unwrap();
            assert_eq!(list.len(), brute_count(s, n, q));
            assert_eq!(Int::from(list.len()), gaussian_binomial(s, n, q));
            let set: BTreeSet<_> = list.iter().cloned().collect();
            assert_eq!(set.len(), list.len());
            for v in &list {
                assert_eq!(&FiniteSubspace::new(q, n, v.basis()).unwrap(), v);
            }
        }
        assert_eq!(enumerate_subspaces(3, 3, 2).unwrap(), vec![FiniteSubspace::full(2, 3).unwrap()]);
    }

    #[test]
    fn containment_examples() {
        assert_eq!(containment_probability(1, 1, 2, 2), rat(1, 3));
        assert!((containment_epsilon(1, 1, 2, 2) + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(containment_probability(0, 2, 4, 3), rat(1, 1));
        assert_eq!(containment_probability(3, 2, 4, 3), rat(0, 1));
    }

    #[test]
    fn containment_matches_enumeration() {
        let (s, n, q) = (2, 4, 3);
        let list = enumerate_subspaces(s, n, q).unwrap();
        let fixed = [vec![1, 2, 0, 1]];
        let hits = list.iter().filter(|v| fixed.iter().all(|r| v.contains(r))).count();
        assert_eq!(rat(hits as i64, list.len() as i64), containment_probability(1, s, n, q));
    }

    #[test]
    fn sampler_is_uniform() {
        let (s, n, q) = (1, 3, 2);
        let smp = SubspaceSampler::new(s, n, q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut hist: HashMap<FiniteSubspace, usize> = HashMap::new();
        let draws = 70_000;
        for _ in 0..draws {
            *hist.entry(smp.sample(&mut rng)).or_default() += 1;
        }
        assert_eq!(hist.len(), 7);
        for c in hist.values() {
            let dev = (*c as f64 - 10_000.0).abs();
            assert!(dev < 5.0 * (10_000.0f64 * 6.0 / 7.0).sqrt(), "count {c}");
        }
    }

    #[test]
    fn non_prime_rejected() {
        assert!(enumerate_subspaces(1, 2, 4).is_err());
    }
}
