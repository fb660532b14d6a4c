//! Exact linear algebra over the Gaussian rationals `Q(i)`.
//!
//! Every algorithm in the crate that needs a rank, a kernel or a solve goes
//! through this module, so nothing downstream ever touches floating point.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinError {
    #[error("linear system has no solution")]
    NoSolution,
    #[error("linear system has a {0}-dimensional solution space")]
    NonUnique(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

/// An element `re + im*i` of `Q(i)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn i() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn int(n: i64) -> Self {
        Scalar { re: rat(n), im: BigRational::zero() }
    }

    pub fn gauss(re: i64, im: i64) -> Self {
        Scalar { re: rat(re), im: rat(im) }
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Scalar {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn from_parts(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `|z|^2`, always rational.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sq();
        Some(Scalar { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Scalar::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        out
    }

    /// Least common multiple of the denominators of both parts.
    pub fn denom_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }

    pub fn is_gaussian_integer(&self) -> bool {
        self.re.is_integer() && self.im.is_integer()
    }

    /// Exact square root when `self` is a square in `Q(i)`.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        // (a+bi)^2 = u+vi with a^2 = (u+m)/2, b^2 = (m-u)/2, m = |u+vi|.
        let m = rational_sqrt(&self.norm_sq())?;
        let two = rat(2);
        let a = rational_sqrt(&((&self.re + &m) / &two))?;
        let b = rational_sqrt(&((&m - &self.re) / &two))?;
        for (sa, sb) in [(1, 1), (1, -1)] {
            let cand = Scalar { re: &a * rat(sa), im: &b * rat(sb) };
            if &(&cand * &cand) == self {
                return Some(cand);
            }
        }
        None
    }

    pub fn to_i64_pair(&self) -> Option<(i64, i64)> {
        if !self.is_gaussian_integer() {
            return None;
        }
        Some((self.re.to_integer().to_i64()?, self.im.to_integer().to_i64()?))
    }
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

fn fmt_rat(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rat(&self.re));
        }
        let im_abs = self.im.abs();
        let im_txt = if im_abs.is_one() { "i".to_string() } else { format!("{}i", fmt_rat(&im_abs)) };
        if self.re.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{im_txt}")
            } else {
                write!(f, "{im_txt}")
            }
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{}{}{}", fmt_rat(&self.re), sign, im_txt)
        }
    }
}

/// Serialized as its text form, e.g. `"-1/2"` or `"1+2i"`.
impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rat(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl FromStr for Scalar {
    type Err = LinError;

    /// Accepts `3`, `-1/2`, `i`, `-2i`, `1/2+3/4i`, `1-i`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || LinError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err());
        }
        if let Some(body) = t.strip_suffix('i') {
            // Split at the last sign that is not the leading one.
            let split = body
                .char_indices()
                .skip(1)
                .filter(|(_, c)| *c == '+' || *c == '-')
                .map(|(k, _)| k)
                .last();
            let (re_txt, im_txt) = match split {
                Some(k) => (&body[..k], &body[k..]),
                None => ("", body),
            };
            let im = match im_txt {
                "" | "+" => BigRational::one(),
                "-" => -BigRational::one(),
                other => parse_rat(other.trim_start_matches('+')).ok_or_else(err)?,
            };
            let re = if re_txt.is_empty() { BigRational::zero() } else { parse_rat(re_txt).ok_or_else(err)? };
            Ok(Scalar { re, im })
        } else {
            Ok(Scalar { re: parse_rat(&t).ok_or_else(err)?, im: BigRational::zero() })
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.im.is_zero() && o.im.is_zero() {
            return Scalar { re: &self.re * &o.re, im: BigRational::zero() };
        }
        Scalar {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        &self + &o
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        &self - &o
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re, im: -self.im }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl Scalar {
    /// Field division; panics on a zero divisor, which is always a logic error here.
    pub fn div(&self, o: &Scalar) -> Scalar {
        self * &o.inv().expect("division by zero in Q(i)")
    }
}

/// Dense row-major matrix over `Q(i)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (r, c): (usize, usize)) -> &Scalar {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| Scalar::int(v)).collect()).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn column(v: &[Scalar]) -> Self {
        Matrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn neg(&self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    pub fn add(&self, o: &Matrix) -> Self {
        assert_eq!(self.shape(), o.shape(), "add shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Matrix) -> Self {
        assert_eq!(self.shape(), o.shape(), "sub shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, o: &Matrix) -> Self {
        assert_eq!(self.cols, o.rows, "mul shape {:?} x {:?}", self.shape(), o.shape());
        let mut out = Self::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let b = &o[(k, c)];
                    if !b.is_zero() {
                        let p = a * b;
                        out[(r, c)] += &p;
                    }
                }
            }
        }
        out
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, o: &Matrix) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn trace(&self) -> Scalar {
        let mut t = Scalar::zero();
        for k in 0..self.rows.min(self.cols) {
            t += &self[(k, k)];
        }
        t
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        for r in 0..b.rows {
            for c in 0..b.cols {
                self[(r0 + r, c0 + c)] = b[(r, c)].clone();
            }
        }
    }

    pub fn block_diag(blocks: &[&Matrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(n, m);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    pub fn hstack(parts: &[&Matrix]) -> Self {
        let rows = parts.first().map_or(0, |p| p.rows);
        assert!(parts.iter().all(|p| p.rows == rows), "hstack rows");
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut c = 0;
        for p in parts {
            out.set_block(0, c, p);
            c += p.cols;
        }
        out
    }

    pub fn vstack(parts: &[&Matrix]) -> Self {
        let cols = parts.first().map_or(0, |p| p.cols);
        assert!(parts.iter().all(|p| p.cols == cols), "vstack cols");
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = Self::zeros(rows, cols);
        let mut r = 0;
        for p in parts {
            out.set_block(r, 0, p);
            r += p.rows;
        }
        out
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "apply shape");
        (0..self.rows)
            .map(|r| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::identity(self.rows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Column-wise flattening in row-major order of entries.
    pub fn flatten(&self) -> Vec<Scalar> {
        self.data.clone()
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<Scalar>) -> Self {
        assert_eq!(rows * cols, data.len(), "from_flat length");
        Matrix { rows, cols, data }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |r, c| self[(r, cols[c])].clone())
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }
}

/// Rank by fraction-free (Bareiss) elimination.
/// Rows in brackets, e.g. `[[1, i], [i, -1]]`.
impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|r| {
                let cells: Vec<String> = self.row(r).iter().map(|s| s.to_string()).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

pub fn rank(m: &Matrix) -> usize {
    let (rows, cols) = m.shape();
    let mut a = m.data.clone();
    let idx = |r: usize, c: usize| r * cols + c;
    let mut prev = Scalar::one();
    let mut rk = 0;
    for c in 0..cols {
        if rk == rows {
            break;
        }
        let Some(p) = (rk..rows).find(|&r| !a[idx(r, c)].is_zero()) else { continue };
        if p != rk {
            for k in 0..cols {
                a.swap(idx(p, k), idx(rk, k));
            }
        }
        let piv = a[idx(rk, c)].clone();
        let prev_inv = prev.inv().expect("nonzero Bareiss pivot");
        for r in rk + 1..rows {
            let f = a[idx(r, c)].clone();
            for k in c + 1..cols {
                let v = &(&piv * &a[idx(r, k)]) - &(&f * &a[idx(rk, k)]);
                a[idx(r, k)] = &v * &prev_inv;
            }
            a[idx(r, c)] = Scalar::zero();
        }
        prev = piv;
        rk += 1;
    }
    rk
}

/// Reduced row echelon form and pivot columns.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = m.shape();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&k| !a[(k, c)].is_zero()) else { continue };
        if p != r {
            for k in 0..cols {
                a.data.swap(p * cols + k, r * cols + k);
            }
        }
        let inv = a[(r, c)].inv().expect("pivot");
        for k in c..cols {
            a[(r, k)] = &a[(r, k)] * &inv;
        }
        for o in 0..rows {
            if o == r || a[(o, c)].is_zero() {
                continue;
            }
            let f = a[(o, c)].clone();
            for k in c..cols {
                let v = &a[(r, k)] * &f;
                a[(o, k)] -= &v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Basis of the right kernel, one vector per free column.
pub fn kernel(m: &Matrix) -> Vec<Vec<Scalar>> {
    let (red, pivots) = rref(m);
    let cols = m.cols();
    let mut is_pivot = vec![None; cols];
    for (r, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(r);
    }
    let mut out = Vec::new();
    for free in 0..cols {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = vec![Scalar::zero(); cols];
        v[free] = Scalar::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = -&red[(r, free)];
        }
        out.push(v);
    }
    out
}

/// Some solution of `m x = b`, if any.
pub fn solve_any(m: &Matrix, b: &[Scalar]) -> Result<Vec<Scalar>, LinError> {
    if b.len() != m.rows() {
        return Err(LinError::Shape(format!("rhs length {} vs {} rows", b.len(), m.rows())));
    }
    let aug = Matrix::hstack(&[m, &Matrix::column(b)]);
    let (red, pivots) = rref(&aug);
    let n = m.cols();
    if pivots.last() == Some(&n) {
        return Err(LinError::NoSolution);
    }
    let mut x = vec![Scalar::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = red[(r, n)].clone();
    }
    Ok(x)
}

/// The unique solution of `m x = b`.
pub fn solve_unique(m: &Matrix, b: &[Scalar]) -> Result<Vec<Scalar>, LinError> {
    let x = solve_any(m, b)?;
    let rk = rank(m);
    if rk < m.cols() {
        return Err(LinError::NonUnique(m.cols() - rk));
    }
    Ok(x)
}

pub fn inverse(m: &Matrix) -> Option<Matrix> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    let aug = Matrix::hstack(&[m, &Matrix::identity(n)]);
    let (red, pivots) = rref(&aug);
    if pivots.len() < n || (n > 0 && pivots[n - 1] != n - 1) {
        return None;
    }
    Some(red.submatrix(0, n, n, n))
}

pub fn det(m: &Matrix) -> Scalar {
    assert!(m.is_square(), "det of non-square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut d = Scalar::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[(r, c)].is_zero()) else { return Scalar::zero() };
        if p != c {
            for k in 0..n {
                a.data.swap(p * n + k, c * n + k);
            }
            d = -d;
        }
        let piv = a[(c, c)].clone();
        d = &d * &piv;
        let inv = piv.inv().expect("pivot");
        for r in c + 1..n {
            if a[(r, c)].is_zero() {
                continue;
            }
            let f = &a[(r, c)] * &inv;
            for k in c..n {
                let v = &a[(c, k)] * &f;
                a[(r, k)] -= &v;
            }
        }
    }
    d
}

/// Coordinates of `v` in the span of `basis` (given as vectors), if it lies there.
pub fn coordinates(basis: &[Vec<Scalar>], v: &[Scalar]) -> Result<Vec<Scalar>, LinError> {
    if basis.is_empty() {
        return if v.iter().all(Scalar::is_zero) { Ok(vec![]) } else { Err(LinError::NoSolution) };
    }
    let m = Matrix::from_fn(v.len(), basis.len(), |r, c| basis[c][r].clone());
    solve_unique(&m, v)
}

/// [`coordinates`] against a fixed independent basis, factored once: the
/// solve uses a square set of pivot entries and then checks the full vector.
#[derive(Clone, Debug)]
pub struct SpanCoordinates {
    basis: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
    inv: Matrix,
}

impl SpanCoordinates {
    pub fn new(basis: Vec<Vec<Scalar>>) -> Result<Self, LinError> {
        let n = basis.len();
        let len = basis.first().map_or(0, Vec::len);
        let (_, pivots) = rref(&Matrix::from_fn(n, len, |r, c| basis[r][c].clone()));
        if pivots.len() < n {
            return Err(LinError::NonUnique(n - pivots.len()));
        }
        let square = Matrix::from_fn(n, n, |r, c| basis[c][pivots[r]].clone());
        let inv = inverse(&square).expect("pivot entries of an independent basis");
        Ok(SpanCoordinates { basis, pivots, inv })
    }

    pub fn coords(&self, v: &[Scalar]) -> Result<Vec<Scalar>, LinError> {
        let picked: Vec<Scalar> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let c = self.inv.apply(&picked);
        for (k, x) in v.iter().enumerate() {
            let mut s = Scalar::zero();
            for (ci, b) in c.iter().zip(&self.basis) {
                if !ci.is_zero() && !b[k].is_zero() {
                    s += &(ci * &b[k]);
                }
            }
            if &s != x {
                return Err(LinError::NoSolution);
            }
        }
        Ok(c)
    }
}

/// Incremental row echelon basis; used where rows arrive one at a time.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    cols: usize,
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl RowEchelon {
    pub fn new(cols: usize) -> Self {
        RowEchelon { cols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.cols
    }

    /// Reduces `v` against the current basis; returns true when it was independent.
    pub fn insert(&mut self, mut v: Vec<Scalar>) -> bool {
        assert_eq!(v.len(), self.cols, "row length");
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for k in *p..self.cols {
                if !row[k].is_zero() {
                    let t = &row[k] * &f;
                    v[k] -= &t;
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else { return false };
        let inv = v[p].inv().expect("pivot");
        for x in v.iter_mut().skip(p) {
            *x = &*x * &inv;
        }
        // Keep earlier rows reduced at the new pivot so insertion stays one pass.
        for (_, row) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for k in p..self.cols {
                if !v[k].is_zero() {
                    let t = &v[k] * &f;
                    row[k] -= &t;
                }
            }
        }
        self.rows.push((p, v));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    #[test]
    fn parse_and_print_round_trip() {
        for t in ["0", "3", "-1/2", "i", "-i", "2i", "1+i", "1/2-3/4i", "-5/3+7i"] {
            assert_eq!(s(t).to_string(), t);
        }
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }

    #[test]
    fn field_arithmetic() {
        let a = s("1+2i");
        let b = s("3-i");
        assert_eq!(&a * &b, s("5+5i"));
        assert_eq!(a.div(&b).to_string(), "1/10+7/10i");
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::int(-1));
    }

    #[test]
    fn gaussian_square_roots() {
        let r = s("-1").sqrt().unwrap();
        assert_eq!(&r * &r, s("-1"));
        let r = s("2i").sqrt().unwrap();
        assert_eq!(&r * &r, s("2i"));
        let r = s("-7/4+6i").sqrt();
        assert!(r.is_none() || { let r = r.unwrap(); &r * &r == s("-7/4+6i") });
        assert!(s("2").sqrt().is_none());
        assert!(s("i").sqrt().is_none());
    }

    #[test]
    fn rank_kernel_solve() {
        let m = Matrix::from_ints(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&m), 2);
        let k = kernel(&m);
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).iter().all(Scalar::is_zero));
        assert_eq!(solve_unique(&m, &vec![Scalar::int(1); 3]), Err(LinError::NoSolution));
        let sq = Matrix::from_ints(&[&[2, 1], &[1, 1]]);
        let x = solve_unique(&sq, &[Scalar::int(3), Scalar::int(2)]).unwrap();
        assert_eq!(x, vec![Scalar::int(1), Scalar::int(1)]);
        assert_eq!(solve_unique(&m, &vec![Scalar::zero(); 3]), Err(LinError::NonUnique(1)));
    }

    #[test]
    fn complex_rank_differs_from_real_intuition() {
        // Rows (1, i) and (i, -1) are proportional over Q(i).
        let m = Matrix::from_rows(vec![vec![s("1"), s("i")], vec![s("i"), s("-1")]]);
        assert_eq!(rank(&m), 1);
        assert_eq!(det(&m), Scalar::zero());
    }

    fn small_matrix(n: usize, m: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec((-3i64..=3, -2i64..=2), n * m).prop_map(move |v| {
            Matrix::from_flat(n, m, v.into_iter().map(|(a, b)| Scalar::gauss(a, b)).collect())
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix(4, 5)) {
            let rk = rank(&m);
            let k = kernel(&m);
            prop_assert_eq!(rk + k.len(), 5);
            for v in &k {
                prop_assert!(m.apply(v).iter().all(Scalar::is_zero));
            }
            let (_, piv) = rref(&m);
            prop_assert_eq!(piv.len(), rk);
        }

        #[test]
        fn inverse_and_det_agree(m in small_matrix(3, 3)) {
            let d = det(&m);
            match inverse(&m) {
                Some(inv) => {
                    prop_assert!(!d.is_zero());
                    prop_assert_eq!(m.mul(&inv), Matrix::identity(3));
                }
                None => prop_assert!(d.is_zero()),
            }
        }

        #[test]
        fn echelon_matches_rank(m in small_matrix(6, 4)) {
            let mut e = RowEchelon::new(4);
            for r in 0..6 {
                e.insert(m.row(r).to_vec());
            }
            prop_assert_eq!(e.rank(), rank(&m));
        }

        #[test]
        fn factored_coordinates_agree(m in small_matrix(3, 6), c in proptest::collection::vec(-3i64..=3, 3), off in 0usize..6) {
            let basis: Vec<Vec<Scalar>> = (0..3).map(|r| m.row(r).to_vec()).collect();
            let Ok(span) = SpanCoordinates::new(basis.clone()) else {
                prop_assert!(rank(&m) < 3);
                return Ok(());
            };
            let inside = m.transpose().apply(&c.iter().map(|&x| Scalar::int(x)).collect::<Vec<_>>());
            prop_assert_eq!(span.coords(&inside), coordinates(&basis, &inside));
            let mut outside = inside.clone();
            outside[off] += &Scalar::one();
            prop_assert_eq!(span.coords(&outside).is_ok(), coordinates(&basis, &outside).is_ok());
        }

        #[test]
        fn transpose_keeps_rank(m in small_matrix(4, 6)) {
            prop_assert_eq!(rank(&m.transpose()), rank(&m));
        }

        #[test]
        fn field_axioms_on_samples(a in (-9i64..9, -9i64..9, 1i64..7), b in (-9i64..9, -9i64..9, 1i64..7)) {
            let x = Scalar::from_parts(BigRational::new(a.0.into(), a.2.into()), BigRational::new(a.1.into(), 1.into()));
            let y = Scalar::from_parts(BigRational::new(b.0.into(), b.2.into()), BigRational::new(b.1.into(), 1.into()));
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            prop_assert_eq!(&x * &y, &y * &x);
            if !y.is_zero() {
                prop_assert_eq!(&x.div(&y) * &y, x);
            }
        }

        #[test]
        fn sqrt_of_square(a in -9i64..9, b in -9i64..9, d in 1i64..5) {
            let z = Scalar::from_parts(
                BigRational::new(a.into(), d.into()),
                BigRational::new(b.into(), 1.into()),
            );
            let sq = &z * &z;
            let r = sq.sqrt().unwrap();
            prop_assert_eq!(&r * &r, sq);
        }
    }
}
