//! Number fields: exact arithmetic in `K = Q[x]/(f)`, its ring of integers
//! through a fixed integral basis, the scaled Minkowski embedding and
//! reduction modulo primes of residue degree one.
//!
//! Elements are carried in power-basis coordinates (rationals). Vectors in
//! `O_K^m` are carried as flat integer vectors of length `m * d` in
//! integral-basis coordinates; this is the ambient `Z`-lattice all lattice
//! code works in.
//!
//! The Euclidean structure is `|x|^2 = |Δ_K|^{-1/d} Tr(x x̄)`, where the
//! trace counts each complex place twice. With this scale `O_K^r` has unit
//! covolume for every `r`.

use crate::error::{Error, Result};
use crate::matrix::{int_det, parse_rat, rat_det, rat_inverse, rat_to_f64, Int, Matrix, Rat};
use crate::poly::{self, Irreducibility};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::sync::Arc;

/// Largest number of significant decimal digits the floating embedding carries.
pub const EFFECTIVE_DIGITS: u32 = 15;

#[derive(Clone)]
pub struct NumberField {
    min_poly: Vec<Int>,
    degree: usize,
    signature: (usize, usize),
    integral_basis: Matrix<Rat>,
    basis_inverse: Matrix<Rat>,
    discriminant: Int,
    index: Int,
    precision_digits: u32,
    irreducibility: Irreducibility,
    /// Real roots ascending, then one root per complex pair (positive imaginary part).
    roots: Vec<Complex64>,
    /// Image of the generator under complex conjugation, power basis.
    conjugation: Vec<Rat>,
    trace_form: Matrix<Int>,
    trace_form_i64: Vec<i64>,
    bilinear_trace: Matrix<Int>,
    /// `mul_table[i * d + j]` = integral coordinates of `u_i * u_j`.
    mul_table: Vec<Vec<i64>>,
    scale_sq: f64,
    /// Scaled Minkowski embedding of each integral basis element (rows).
    basis_embedding: Vec<Vec<f64>>,
    power_sums: Vec<Int>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberField")
            .field("min_poly", &self.min_poly)
            .field("signature", &self.signature)
            .field("discriminant", &self.discriminant)
            .finish()
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly && self.integral_basis == other.integral_basis
    }
}

/// Parsed contents of a field specification file.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    pub min_poly: Vec<Int>,
    pub integral_basis: Option<Matrix<Rat>>,
    pub precision_digits: u32,
}

impl FieldSpec {
    pub fn new(min_poly: &[i64]) -> Self {
        FieldSpec {
            min_poly: min_poly.iter().map(|&c| Int::from(c)).collect(),
            integral_basis: None,
            precision_digits: 50,
        }
    }

    pub fn with_basis(mut self, basis: Matrix<Rat>) -> Self {
        self.integral_basis = Some(basis);
        self
    }

    /// Parses `key = value` lines. Keys: `min_poly` (integers, constant term
    /// first), `integral_basis` (row-major rationals `p/q`), `precision_digits`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut min_poly = None;
        let mut basis_entries: Option<Vec<Rat>> = None;
        let mut digits = 50u32;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
            let tokens: Vec<&str> = value
                .split(|c: char| c == ',' || c == '[' || c == ']' || c.is_whitespace() || c == '"')
                .filter(|t| !t.is_empty())
                .collect();
            match key.trim() {
                "min_poly" => {
                    let coeffs = tokens
                        .iter()
                        .map(|t| t.parse::<Int>().map_err(|_| Error::Parse(format!("bad coefficient `{t}`"))))
                        .collect::<Result<Vec<_>>>()?;
                    min_poly = Some(coeffs);
                }
                "integral_basis" => {
                    let entries = tokens
                        .iter()
                        .map(|t| parse_rat(t).ok_or_else(|| Error::Parse(format!("bad rational `{t}`"))))
                        .collect::<Result<Vec<_>>>()?;
                    basis_entries = Some(entries);
                }
                "precision_digits" => {
                    digits = value
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad precision_digits `{}`", value.trim())))?;
                }
                other => return Err(Error::Parse(format!("unknown key `{other}`"))),
            }
        }
        let min_poly = min_poly.ok_or_else(|| Error::Parse("missing min_poly".into()))?;
        let d = min_poly.len().saturating_sub(1);
        let integral_basis = match basis_entries {
            None => None,
            Some(e) => {
                if e.len() != d * d {
                    return Err(Error::Parse(format!(
                        "integral_basis needs {} entries, found {}",
                        d * d,
                        e.len()
                    )));
                }
                Some(Matrix::from_rows(e.chunks(d).map(|c| c.to_vec()).collect(), d))
            }
        };
        Ok(FieldSpec {
            min_poly,
            integral_basis,
            precision_digits: digits,
        })
    }

    pub fn build(&self) -> Result<Arc<NumberField>> {
        NumberField::with_precision(&self.min_poly, self.integral_basis.clone(), self.precision_digits)
    }
}

/// Named fields used throughout tests and the CLI.
pub fn builtin_field(name: &str) -> Result<Arc<NumberField>> {
    match name {
        "Q" | "QQ" | "rationals" => NumberField::new(&[0, 1], None),
        "Qi" | "Q(i)" | "gaussian" => NumberField::new(&[1, 0, 1], None),
        "Qsqrt5" | "Q(sqrt5)" => NumberField::new(
            &[-5, 0, 1],
            Some(Matrix::from_rows(
                vec![
                    vec![Rat::one(), Rat::zero()],
                    vec![Rat::new(1.into(), 2.into()), Rat::new(1.into(), 2.into())],
                ],
                2,
            )),
        ),
        "Qsqrt2" | "Q(sqrt2)" => NumberField::new(&[-2, 0, 1], None),
        "Qzeta3" | "Q(zeta3)" | "eisenstein" => NumberField::new(&[1, 1, 1], None),
        other => Err(Error::InvalidInput(format!("unknown builtin field `{other}`"))),
    }
}

impl NumberField {
    /// Builds the field from a monic integer polynomial (constant term first)
    /// and an optional integral basis (rows in power-basis coordinates).
    pub fn new(min_poly: &[i64], integral_basis: Option<Matrix<Rat>>) -> Result<Arc<Self>> {
        let f: Vec<Int> = min_poly.iter().map(|&c| Int::from(c)).collect();
        Self::with_precision(&f, integral_basis, 50)
    }

    pub fn with_precision(
        min_poly: &[Int],
        integral_basis: Option<Matrix<Rat>>,
        precision_digits: u32,
    ) -> Result<Arc<Self>> {
        if min_poly.len() < 2 {
            return Err(Error::InvalidInput("minimal polynomial must have degree >= 1".into()));
        }
        if !min_poly.last().unwrap().is_one() {
            return Err(Error::InvalidInput("minimal polynomial must be monic".into()));
        }
        let d = min_poly.len() - 1;
        let irreducibility = poly::irreducibility(min_poly);
        if irreducibility == Irreducibility::Reducible {
            return Err(Error::Reducible(format!("{min_poly:?}")));
        }
        let basis = integral_basis.unwrap_or_else(|| Matrix::identity(d));
        if basis.nrows() != d || basis.ncols() != d {
            return Err(Error::InvalidInput(format!("integral basis must be {d}x{d}")));
        }
        let basis_det = rat_det(&basis);
        if basis_det.is_zero() {
            return Err(Error::Singular("integral basis".into()));
        }
        let basis_inverse = rat_inverse(&basis).expect("nonsingular");
        if basis.row(0)[0] != Rat::one() || basis.row(0)[1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::InvalidInput("first integral basis element must be 1".into()));
        }
        let index_q = basis_det.abs().recip();
        if !index_q.is_integer() {
            return Err(Error::InvalidInput(
                "integral basis does not contain Z[theta] (index is not an integer)".into(),
            ));
        }
        let index = index_q.to_integer();

        let power_sums = poly::power_sums(min_poly, 2 * d);
        let mut field = NumberField {
            min_poly: min_poly.to_vec(),
            degree: d,
            signature: (0, 0),
            integral_basis: basis,
            basis_inverse,
            discriminant: Int::zero(),
            index,
            precision_digits,
            irreducibility,
            roots: Vec::new(),
            conjugation: Vec::new(),
            trace_form: Matrix::zeros(d, d),
            trace_form_i64: Vec::new(),
            bilinear_trace: Matrix::zeros(d, d),
            mul_table: Vec::new(),
            scale_sq: 1.0,
            basis_embedding: Vec::new(),
            power_sums,
        };

        // Ring closure: products of basis elements must have integral coordinates.
        let mut table = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let prod = field.mul_power(field.integral_basis.row(i), field.integral_basis.row(j));
                let coords = field.integral_from_power(&prod);
                let mut row = Vec::with_capacity(d);
                for c in coords {
                    if !c.is_integer() {
                        return Err(Error::InvalidInput("integral basis is not closed under multiplication".into()));
                    }
                    row.push(c.to_integer().to_i64().ok_or(Error::Overflow("multiplication table"))?);
                }
                table.push(row);
            }
        }
        field.mul_table = table;

        let mut bil = Matrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let prod = field.mul_power(field.integral_basis.row(i), field.integral_basis.row(j));
                let t = field.trace_power(&prod);
                if !t.is_integer() {
                    return Err(Error::InvalidInput("integral basis elements are not algebraic integers".into()));
                }
                bil[(i, j)] = t.to_integer();
            }
        }
        field.discriminant = int_det(&bil);
        field.bilinear_trace = bil;

        field.locate_roots()?;
        field.find_conjugation()?;

        let mut tf = Matrix::zeros(d, d);
        for i in 0..d {
            let conj_j: Vec<Vec<Rat>> = (0..d).map(|j| field.conj_power(field.integral_basis.row(j))).collect();
            for j in 0..d {
                let prod = field.mul_power(field.integral_basis.row(i), &conj_j[j]);
                let t = field.trace_power(&prod);
                if !t.is_integer() {
                    return Err(Error::InvalidInput("trace form is not integral on the basis".into()));
                }
                tf[(i, j)] = t.to_integer();
            }
        }
        // det Tr(u_i conj u_j) = |det embedding|^2 = |Δ_K|
        if int_det(&tf) != field.discriminant.abs() {
            return Err(Error::InsufficientPrecision(
                "trace form determinant disagrees with |discriminant|".into(),
            ));
        }
        field.trace_form_i64 = tf
            .rows_iter()
            .flatten()
            .map(|x| x.to_i64().ok_or(Error::Overflow("trace form")))
            .collect::<Result<_>>()?;
        field.trace_form = tf;
        let disc_abs = field.discriminant.abs().to_f64().unwrap_or(f64::INFINITY);
        field.scale_sq = disc_abs.powf(-1.0 / d as f64);

        field.basis_embedding = (0..d)
            .map(|i| field.embed_power(field.integral_basis.row(i)))
            .collect();
        Ok(Arc::new(field))
    }

    fn locate_roots(&mut self) -> Result<()> {
        let d = self.degree;
        let (roots, resid) = poly::complex_roots(&self.min_poly);
        if resid > 1e-10 {
            return Err(Error::InsufficientPrecision(format!(
                "root isolation residual {resid:.2e} exceeds 1e-10"
            )));
        }
        let mut real: Vec<f64> = Vec::new();
        let mut complex: Vec<Complex64> = Vec::new();
        for z in roots {
            if z.im.abs() <= 1e-9 * (1.0 + z.norm()) {
                real.push(z.re);
            } else if z.im > 0.0 {
                complex.push(z);
            }
        }
        real.sort_by(|a, b| a.partial_cmp(b).unwrap());
        complex.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        let r1 = real.len();
        let r2 = complex.len();
        if r1 + 2 * r2 != d {
            return Err(Error::InsufficientPrecision(format!(
                "root count mismatch: {r1} real + 2*{r2} complex != {d}"
            )));
        }
        // sign(Δ) = (-1)^{r2}
        let expected_neg = r2 % 2 == 1;
        if self.discriminant.is_negative() != expected_neg {
            return Err(Error::InsufficientPrecision(
                "signature disagrees with discriminant sign".into(),
            ));
        }
        self.signature = (r1, r2);
        self.roots = real
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .chain(complex)
            .collect();
        Ok(())
    }

    /// Finds `c` in `Q[theta]` with `c(σ(θ)) = conj(σ(θ))` at every embedding.
    fn find_conjugation(&mut self) -> Result<()> {
        let d = self.degree;
        let mut theta = vec![Rat::zero(); d];
        if d > 1 {
            theta[1] = Rat::one();
        } else {
            theta[0] = -Rat::from_integer(self.min_poly[0].clone());
        }
        if self.signature.1 == 0 {
            self.conjugation = theta;
            return Ok(());
        }
        // All d complex embeddings.
        let mut all: Vec<Complex64> = Vec::with_capacity(d);
        for z in &self.roots {
            all.push(*z);
            if z.im != 0.0 {
                all.push(z.conj());
            }
        }
        // Vandermonde system V c = conj(z).
        let mut a: Vec<Vec<Complex64>> = all
            .iter()
            .map(|z| {
                let mut row: Vec<Complex64> = (0..d).map(|j| z.powu(j as u32)).collect();
                row.push(z.conj());
                row
            })
            .collect();
        for c in 0..d {
            let p = (c..d)
                .max_by(|&i, &j| a[i][c].norm().partial_cmp(&a[j][c].norm()).unwrap())
                .unwrap();
            a.swap(c, p);
            let piv = a[c][c];
            for i in 0..d {
                if i == c {
                    continue;
                }
                let f = a[i][c] / piv;
                for j in c..=d {
                    let t = a[c][j];
                    a[i][j] -= f * t;
                }
            }
        }
        let coeffs: Vec<Rat> = (0..d)
            .map(|i| poly::rationalize((a[i][d] / a[i][i]).re, 1_000_000))
            .collect();
        let image = poly::compose_mod(&coeffs, &theta, &self.min_poly);
        let fval = poly::compose_mod(
            &self.min_poly.iter().map(|c| Rat::from_integer(c.clone())).collect::<Vec<_>>(),
            &image,
            &self.min_poly,
        );
        let numerically_ok = all.iter().all(|z| {
            let v = coeffs
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + rat_to_f64(c));
            (v - z.conj()).norm() < 1e-8 * (1.0 + z.norm())
        });
        if !fval.iter().all(Zero::is_zero) || !numerically_ok {
            return Err(Error::Unsupported(
                "complex conjugation does not preserve K; the trace form Tr(x x̄) is not rational".into(),
            ));
        }
        self.conjugation = image;
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn min_poly(&self) -> &[Int] {
        &self.min_poly
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn discriminant(&self) -> &Int {
        &self.discriminant
    }

    pub fn integral_basis(&self) -> &Matrix<Rat> {
        &self.integral_basis
    }

    /// `[O_K : Z[theta]]` for the stored basis.
    pub fn index(&self) -> &Int {
        &self.index
    }

    pub fn precision_digits(&self) -> u32 {
        self.precision_digits
    }

    pub fn effective_precision_digits(&self) -> u32 {
        self.precision_digits.min(EFFECTIVE_DIGITS)
    }

    pub fn irreducibility(&self) -> Irreducibility {
        self.irreducibility
    }

    /// `|Δ_K|^{-1/d}`, the factor turning the trace form into the squared norm.
    pub fn scale_sq(&self) -> f64 {
        self.scale_sq
    }

    /// `Tr(u_i conj(u_j))` on the integral basis.
    pub fn trace_form(&self) -> &Matrix<Int> {
        &self.trace_form
    }

    pub fn bilinear_trace(&self) -> &Matrix<Int> {
        &self.bilinear_trace
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn conjugation(&self) -> &[Rat] {
        &self.conjugation
    }

    pub fn is_rationals(&self) -> bool {
        self.degree == 1
    }

    /// Hex SHA-256 of the minimal polynomial and basis; identifies the field in reports.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        let poly: Vec<String> = self.min_poly.iter().map(|c| c.to_string()).collect();
        h.update(poly.join(",").as_bytes());
        h.update(b";");
        for r in self.integral_basis.rows_iter() {
            for c in r {
                h.update(crate::matrix::rat_to_string(c).as_bytes());
                h.update(b",");
            }
        }
        let out = h.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }

    // ---- power-basis arithmetic ----

    pub fn mul_power(&self, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let mut p = poly::mul_rat(a, b);
        poly::rem_monic(&mut p, &self.min_poly);
        p
    }

    pub fn trace_power(&self, a: &[Rat]) -> Rat {
        a.iter()
            .zip(&self.power_sums)
            .map(|(c, p)| c * Rat::from_integer(p.clone()))
            .fold(Rat::zero(), |s, t| s + t)
    }

    pub fn conj_power(&self, a: &[Rat]) -> Vec<Rat> {
        poly::compose_mod(a, &self.conjugation, &self.min_poly)
    }

    /// Multiplication-by-`a` matrix: row `i` holds `a * theta^i`.
    fn mul_matrix(&self, a: &[Rat]) -> Matrix<Rat> {
        let d = self.degree;
        let rows = (0..d)
            .map(|i| {
                let mut e = vec![Rat::zero(); d];
                e[i] = Rat::one();
                self.mul_power(a, &e)
            })
            .collect();
        Matrix::from_rows(rows, d)
    }

    pub fn inv_power(&self, a: &[Rat]) -> Option<Vec<Rat>> {
        if a.iter().all(Zero::is_zero) {
            return None;
        }
        let mut one = vec![Rat::zero(); self.degree];
        one[0] = Rat::one();
        // x * M_a = 1 where M_a has rows a * theta^i.
        crate::matrix::rat_solve_left(&self.mul_matrix(a), &one)
    }

    pub fn power_from_integral<T: Clone + Into<Int>>(&self, x: &[T]) -> Vec<Rat> {
        let v: Vec<Rat> = x.iter().map(|c| Rat::from_integer(c.clone().into())).collect();
        self.integral_basis.left_mul_vec(&v)
    }

    pub fn integral_from_power(&self, x: &[Rat]) -> Vec<Rat> {
        self.basis_inverse.left_mul_vec(x)
    }

    /// Integral-basis coordinates of `u_i * u_j`.
    pub fn mul_table_entry(&self, i: usize, j: usize) -> &[i64] {
        &self.mul_table[i * self.degree + j]
    }

    /// Product of two elements of `O_K` in integral coordinates.
    pub fn mul_integral(&self, a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
        let d = self.degree;
        let mut out = vec![0i64; d];
        for i in 0..d {
            if a[i] == 0 {
                continue;
            }
            for j in 0..d {
                if b[j] == 0 {
                    continue;
                }
                let ab = a[i].checked_mul(b[j]).ok_or(Error::Overflow("O_K product"))?;
                for (o, t) in out.iter_mut().zip(self.mul_table_entry(i, j)) {
                    *o = o
                        .checked_add(ab.checked_mul(*t).ok_or(Error::Overflow("O_K product"))?)
                        .ok_or(Error::Overflow("O_K product"))?;
                }
            }
        }
        Ok(out)
    }

    /// Unscaled squared norm `Tr(x x̄)` of an integral element.
    pub fn trace_norm_integral(&self, x: &[i64]) -> i128 {
        let d = self.degree;
        let mut s: i128 = 0;
        for i in 0..d {
            if x[i] == 0 {
                continue;
            }
            let mut row: i128 = 0;
            for j in 0..d {
                row += self.trace_form_i64[i * d + j] as i128 * x[j] as i128;
            }
            s += x[i] as i128 * row;
        }
        s
    }

    /// Unscaled squared norm of a flattened vector of `O_K^m`.
    pub fn trace_norm_vec(&self, v: &[i64]) -> i128 {
        v.chunks(self.degree).map(|c| self.trace_norm_integral(c)).sum()
    }

    /// Scaled Minkowski embedding of a single element (power coordinates).
    pub fn embed_power(&self, x: &[Rat]) -> Vec<f64> {
        let xf: Vec<f64> = x.iter().map(rat_to_f64).collect();
        let s = self.scale_sq.sqrt();
        let mut out = Vec::with_capacity(self.degree);
        for z in &self.roots {
            let v = xf
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
            if z.im == 0.0 {
                out.push(s * v.re);
            } else {
                out.push(s * std::f64::consts::SQRT_2 * v.re);
                out.push(s * std::f64::consts::SQRT_2 * v.im);
            }
        }
        out
    }

    /// Scaled Minkowski embedding of an integral element via the cached basis embedding.
    pub fn embed_integral(&self, x: &[i64]) -> Vec<f64> {
        let d = self.degree;
        let mut out = vec![0.0; d];
        for (i, &c) in x.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, e) in out.iter_mut().zip(&self.basis_embedding[i]) {
                *o += c as f64 * e;
            }
        }
        out
    }

    pub fn basis_embedding(&self) -> &[Vec<f64>] {
        &self.basis_embedding
    }

    /// Largest absolute value of any embedding of any integral basis element.
    pub fn basis_distortion(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.degree {
            let row = self.integral_basis.row(i);
            let xf: Vec<f64> = row.iter().map(rat_to_f64).collect();
            for z in &self.roots {
                let v = xf.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
                best = best.max(v.norm());
            }
        }
        best
    }

    /// Multiplies an element of `K_R` (given in embedded coordinates) by
    /// an element of `K` (power coordinates), in embedded coordinates.
    pub fn mul_embedded(&self, y: &[f64], a: &[Rat]) -> Vec<f64> {
        let af: Vec<f64> = a.iter().map(rat_to_f64).collect();
        let mut out = Vec::with_capacity(self.degree);
        let mut pos = 0;
        for z in &self.roots {
            let s = af.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
            if z.im == 0.0 {
                out.push(y[pos] * s.re);
                pos += 1;
            } else {
                let w = Complex64::new(y[pos], y[pos + 1]) * s;
                out.push(w.re);
                out.push(w.im);
                pos += 2;
            }
        }
        out
    }
}

/// An element of a number field in power-basis coordinates.
#[derive(Clone)]
pub struct FieldElement {
    coords: Vec<Rat>,
    field: Arc<NumberField>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && same_field(&self.field, &other.field)
    }
}

fn same_field(a: &Arc<NumberField>, b: &Arc<NumberField>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// The four field operations, for [`field_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn field_arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    if !same_field(&a.field, &b.field) {
        return Err(Error::FieldMismatch);
    }
    let coords = match op {
        ArithOp::Add => a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
        ArithOp::Sub => a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect(),
        ArithOp::Mul => a.field.mul_power(&a.coords, &b.coords),
        ArithOp::Div => {
            let inv = a.field.inv_power(&b.coords).ok_or(Error::DivisionByZero)?;
            a.field.mul_power(&a.coords, &inv)
        }
    };
    Ok(FieldElement {
        coords,
        field: a.field.clone(),
    })
}

impl FieldElement {
    pub fn new(field: &Arc<NumberField>, coords: Vec<Rat>) -> Result<Self> {
        if coords.len() != field.degree {
            return Err(Error::InvalidInput(format!(
                "element needs {} coordinates, got {}",
                field.degree,
                coords.len()
            )));
        }
        Ok(FieldElement {
            coords,
            field: field.clone(),
        })
    }

    pub fn from_ints(field: &Arc<NumberField>, coords: &[i64]) -> Self {
        let mut c: Vec<Rat> = coords.iter().map(|&x| Rat::from_integer(x.into())).collect();
        c.resize(field.degree, Rat::zero());
        FieldElement {
            coords: c,
            field: field.clone(),
        }
    }

    pub fn from_rat(field: &Arc<NumberField>, q: Rat) -> Self {
        let mut c = vec![Rat::zero(); field.degree];
        c[0] = q;
        FieldElement {
            coords: c,
            field: field.clone(),
        }
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self::from_rat(field, Rat::zero())
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_rat(field, Rat::one())
    }

    /// Element with the given integral-basis coordinates.
    pub fn from_integral(field: &Arc<NumberField>, x: &[i64]) -> Self {
        FieldElement {
            coords: field.power_from_integral(x),
            field: field.clone(),
        }
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        field_arith(self, o, ArithOp::Add)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        field_arith(self, o, ArithOp::Sub)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        field_arith(self, o, ArithOp::Mul)
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        field_arith(self, o, ArithOp::Div)
    }

    pub fn neg(&self) -> Self {
        FieldElement {
            coords: self.coords.iter().map(|c| -c).collect(),
            field: self.field.clone(),
        }
    }

    pub fn conj(&self) -> Self {
        FieldElement {
            coords: self.field.conj_power(&self.coords),
            field: self.field.clone(),
        }
    }

    pub fn trace(&self) -> Rat {
        self.field.trace_power(&self.coords)
    }

    /// Integral-basis coordinates, or `None` when the element is not in `O_K`.
    pub fn integral_coords(&self) -> Option<Vec<Int>> {
        let c = self.field.integral_from_power(&self.coords);
        if c.iter().all(|x| x.is_integer()) {
            Some(c.into_iter().map(|x| x.to_integer()).collect())
        } else {
            None
        }
    }

    /// `(Tr(x x̄), |Δ|^{-1/d} Tr(x x̄))`.
    pub fn trace_and_twisted_norm(&self) -> (Rat, f64) {
        let t = self.field.trace_power(&self.field.mul_power(&self.coords, &self.field.conj_power(&self.coords)));
        let v = rat_to_f64(&t) * self.field.scale_sq;
        (t, v)
    }
}

/// Scaled Minkowski embedding of a vector over `K` into `R^{r d}`.
pub fn minkowski_embed(v: &[FieldElement]) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let Some(first) = v.first() else {
        return Ok(out);
    };
    let field = first.field.clone();
    for x in v {
        if !same_field(&field, &x.field) {
            return Err(Error::FieldMismatch);
        }
        let e = field.embed_power(&x.coords);
        let (_, norm) = x.trace_and_twisted_norm();
        let got: f64 = e.iter().map(|t| t * t).sum();
        let tol = 10f64.powi(-(field.effective_precision_digits() as i32 - 4)) * (1.0 + norm);
        if (got - norm).abs() > tol {
            return Err(Error::InsufficientPrecision(format!(
                "embedding norm {got} disagrees with exact trace norm {norm}"
            )));
        }
        out.extend(e);
    }
    Ok(out)
}

/// `Z`-basis `u_j v_i` of the `O_K`-span of `v_1..v_r`.
pub fn ok_z_basis(module_basis: &[Vec<FieldElement>]) -> Result<Vec<Vec<FieldElement>>> {
    let mut out = Vec::new();
    for v in module_basis {
        let Some(first) = v.first() else {
            continue;
        };
        let field = first.field.clone();
        for j in 0..field.degree {
            let u = FieldElement {
                coords: field.integral_basis.row(j).to_vec(),
                field: field.clone(),
            };
            out.push(v.iter().map(|x| u.mul(x)).collect::<Result<Vec<_>>>()?);
        }
    }
    Ok(out)
}

/// A prime ideal of residue degree one: `P = (p, theta - root)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeIdealData {
    p: u64,
    root: u64,
    /// Images of the integral basis elements in `F_p`.
    residues: Vec<u64>,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= p {
        if p.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

pub fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    let e = Int::from(a).extended_gcd(&Int::from(p));
    if !e.gcd.is_one() {
        return None;
    }
    e.x.mod_floor(&Int::from(p)).to_u64()
}

fn rat_mod(q: &Rat, p: u64) -> Option<u64> {
    let pm = Int::from(p);
    let den = q.denom().mod_floor(&pm).to_u64()?;
    let inv = mod_inverse(den, p)?;
    let num = q.numer().mod_floor(&pm).to_u64()?;
    Some(((num as u128 * inv as u128) % p as u128) as u64)
}

impl PrimeIdealData {
    pub fn new(field: &NumberField, p: u64, root: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        let pm = Int::from(p);
        if (field.index() % &pm).is_zero() {
            return Err(Error::InvalidInput(format!(
                "p = {p} divides the index [O_K : Z[theta]]"
            )));
        }
        let r = Int::from(root % p);
        let val = field
            .min_poly()
            .iter()
            .rev()
            .fold(Int::zero(), |acc, c| (acc * &r + c).mod_floor(&pm));
        if !val.is_zero() {
            return Err(Error::InvalidInput(format!(
                "min_poly({root}) is not 0 mod {p}"
            )));
        }
        let d = field.degree();
        let mut residues = Vec::with_capacity(d);
        for t in 0..d {
            let coords = field.integral_basis().row(t);
            let mut acc = 0u128;
            let mut pow = 1u128;
            for c in coords {
                let cm = rat_mod(c, p).ok_or_else(|| Error::InvalidInput("denominator divisible by p".into()))?;
                acc = (acc + cm as u128 * pow) % p as u128;
                pow = pow * (root % p) as u128 % p as u128;
            }
            residues.push(acc as u64);
        }
        Ok(PrimeIdealData {
            p,
            root: root % p,
            residues,
        })
    }

    /// All degree-one primes above `p` (one per root of the minimal polynomial mod `p`).
    pub fn above(field: &NumberField, p: u64) -> Vec<Self> {
        (0..p).filter_map(|r| Self::new(field, p, r).ok()).collect()
    }

    /// First degree-one prime above `p`, if any.
    pub fn first_above(field: &NumberField, p: u64) -> Result<Self> {
        Self::above(field, p)
            .into_iter()
            .next()
            .ok_or_else(|| Error::InvalidInput(format!("no residue-degree-one prime above {p}")))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn residue_degree(&self) -> u32 {
        1
    }

    pub fn norm(&self) -> u64 {
        self.p
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    /// Reduction of an integral element (integral-basis coordinates) into `F_p`.
    pub fn reduce_integral(&self, x: &[i64]) -> u64 {
        let p = self.p as i128;
        let mut acc: i128 = 0;
        for (c, r) in x.iter().zip(&self.residues) {
            acc = (acc + (*c as i128).rem_euclid(p) * *r as i128) % p;
        }
        acc as u64
    }

    /// Reduction of a flattened vector of `O_K^n` into `F_p^n`.
    pub fn reduce_vec(&self, v: &[i64]) -> Vec<u64> {
        v.chunks(self.residues.len()).map(|c| self.reduce_integral(c)).collect()
    }
}

/// Image of `x` in `O_K / P = F_p`; fails if `x` is not integral.
pub fn reduce_mod_degree1_prime(x: &FieldElement, prime: &PrimeIdealData) -> Result<u64> {
    let coords = x.integral_coords().ok_or(Error::NonIntegral)?;
    let pm = Int::from(prime.p);
    let mut acc = Int::zero();
    for (c, r) in coords.iter().zip(&prime.residues) {
        acc = (acc + c * Int::from(*r)).mod_floor(&pm);
    }
    Ok(acc.to_u64().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::rat;

    fn q() -> Arc<NumberField> {
        builtin_field("Q").unwrap()
    }
    fn qi() -> Arc<NumberField> {
        builtin_field("Qi").unwrap()
    }
    fn qs5() -> Arc<NumberField> {
        builtin_field("Qsqrt5").unwrap()
    }

    #[test]
    fn field_invariants() {
        let k = q();
        assert_eq!((k.degree(), k.signature(), k.discriminant().clone()), (1, (1, 0), Int::from(1)));
        let k = qi();
        assert_eq!((k.degree(), k.signature(), k.discriminant().clone()), (2, (0, 1), Int::from(-4)));
        assert_eq!(k.bilinear_trace(), &Matrix::from_rows(vec![vec![2.into(), 0.into()], vec![0.into(), (-2).into()]], 2));
        let k = qs5();
        assert_eq!((k.signature(), k.discriminant().clone()), ((2, 0), Int::from(5)));
        assert_eq!(k.index(), &Int::from(2));
        let k = builtin_field("Qzeta3").unwrap();
        assert_eq!(k.discriminant(), &Int::from(-3));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(NumberField::new(&[-4, 0, 1], None), Err(Error::Reducible(_))));
        assert!(NumberField::new(&[1, 0, 2], None).is_err());
        let singular = Matrix::from_rows(vec![vec![rat(1, 1), rat(0, 1)], vec![rat(2, 1), rat(0, 1)]], 2);
        assert!(matches!(NumberField::new(&[1, 0, 1], Some(singular)), Err(Error::Singular(_))));
        // Q(cbrt 2): conjugation is not an automorphism.
        assert!(matches!(NumberField::new(&[-2, 0, 0, 1], None), Err(Error::Unsupported(_))));
    }

    #[test]
    fn arithmetic_examples() {
        let k = qi();
        let a = FieldElement::from_ints(&k, &[1, 1]);
        let b = FieldElement::from_ints(&k, &[1, -1]);
        assert_eq!(a.mul(&b).unwrap(), FieldElement::from_ints(&k, &[2, 0]));
        let inv = FieldElement::one(&k).div(&a).unwrap();
        assert_eq!(inv.coords(), &[rat(1, 2), rat(-1, 2)]);
        assert!(matches!(a.div(&FieldElement::zero(&k)), Err(Error::DivisionByZero)));
        assert!(matches!(a.add(&FieldElement::one(&q())), Err(Error::FieldMismatch)));

        let k5 = NumberField::new(&[-5, 0, 1], None).unwrap();
        let t = FieldElement::from_ints(&k5, &[0, 1]);
        assert_eq!(t.mul(&t).unwrap(), FieldElement::from_ints(&k5, &[5, 0]));
    }

    #[test]
    fn twisted_norm_examples() {
        let (t, n) = FieldElement::from_ints(&q(), &[3]).trace_and_twisted_norm();
        assert_eq!(t, rat(9, 1));
        assert!((n - 9.0).abs() < 1e-12);
        let (t, n) = FieldElement::one(&qi()).trace_and_twisted_norm();
        assert_eq!(t, rat(2, 1));
        assert!((n - 1.0).abs() < 1e-12);
        let (t, n) = FieldElement::from_ints(&qi(), &[1, 1]).trace_and_twisted_norm();
        assert_eq!(t, rat(4, 1));
        assert!((n - 2.0).abs() < 1e-12);
    }

    #[test]
    fn embedding_examples() {
        let k = q();
        let v = vec![FieldElement::from_ints(&k, &[2]), FieldElement::from_ints(&k, &[-1])];
        assert_eq!(minkowski_embed(&v).unwrap(), vec![2.0, -1.0]);
        let e = minkowski_embed(&[FieldElement::one(&qi())]).unwrap();
        assert_eq!(e.len(), 2);
        assert!((e.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        let e = minkowski_embed(&[FieldElement::one(&qs5())]).unwrap();
        assert!((e.iter().map(|x| x * x).sum::<f64>() - 2.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reduction_examples() {
        let p5 = PrimeIdealData::new(&q(), 5, 0).unwrap();
        assert_eq!(reduce_mod_degree1_prime(&FieldElement::from_ints(&q(), &[7]), &p5).unwrap(), 2);
        let k = qi();
        let p = PrimeIdealData::new(&k, 5, 2).unwrap();
        assert_eq!(reduce_mod_degree1_prime(&FieldElement::from_ints(&k, &[1, 1]), &p).unwrap(), 3);
        let p = PrimeIdealData::new(&k, 5, 3).unwrap();
        assert_eq!(reduce_mod_degree1_prime(&FieldElement::from_ints(&k, &[2, -1]), &p).unwrap(), 4);
        let half = FieldElement::new(&k, vec![rat(1, 2), rat(0, 1)]).unwrap();
        assert!(matches!(reduce_mod_degree1_prime(&half, &p), Err(Error::NonIntegral)));
        assert!(PrimeIdealData::new(&k, 5, 1).is_err());
        // 2 divides [O_K : Z[sqrt5]]
        assert!(PrimeIdealData::new(&qs5(), 2, 1).is_err());
        assert_eq!(PrimeIdealData::above(&k, 3).len(), 0);
    }

    #[test]
    fn z_basis_examples() {
        let k = qi();
        let v = vec![vec![FieldElement::from_ints(&k, &[1, 1]), FieldElement::zero(&k)]];
        let w = ok_z_basis(&v).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w[0][0], FieldElement::from_ints(&k, &[1, 1]));
        assert_eq!(w[1][0], FieldElement::from_ints(&k, &[-1, 1]));
    }

    #[test]
    fn spec_file_parsing() {
        let s = FieldSpec::parse("# golden\nmin_poly = -5, 0, 1\nintegral_basis = 1 0 1/2 1/2\nprecision_digits = 30\n").unwrap();
        let k = s.build().unwrap();
        assert_eq!(k.discriminant(), &Int::from(5));
        assert_eq!(k.precision_digits(), 30);
        assert!(FieldSpec::parse("min_poly = 1, 0, 1\nintegral_basis = 1 0 0").is_err());
        assert!(FieldSpec::parse("foo = 1").is_err());
    }
}
