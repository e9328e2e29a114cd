//! Scalar field (exact rational or binary64) and the small dense linear
//! algebra used throughout the crate.
//!
//! Exact mode is the default for every decision. Float mode exists for
//! eigenvalue and root extraction, and for the optional end-to-end float
//! pipeline.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Index, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arithmetic mode of a [`Scalar`] or [`Matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    /// Mode of the result of a binary operation.
    pub fn join(self, other: Mode) -> Mode {
        if self == Mode::Exact && other == Mode::Exact {
            Mode::Exact
        } else {
            Mode::Float
        }
    }
}

/// Numerical thresholds used in float mode and in root classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative entrywise symmetry slack for float matrices.
    pub symmetry: f64,
    /// Relative pivot threshold below which a float matrix is singular.
    pub pivot: f64,
    /// Eigenvalue slack for positive-definiteness cross-checks.
    pub eigen_slack: f64,
    /// Relative bound on the imaginary part of a root accepted as real.
    pub root_imag: f64,
    /// Relative separation below which two roots count as repeated.
    pub root_separation: f64,
    /// Densities must exceed `density * γ₀`. Zero by default: densities are
    /// solved exactly over the binary values of the nodes, so their sign is
    /// reliable, and genuine weights can be far below any fixed floor.
    pub density: f64,
    /// Relative tolerance when comparing float moments.
    pub moment_match: f64,
    /// Relative tolerance for equality tests in the float pipeline.
    pub float_equality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            symmetry: 1e-12,
            pivot: 1e-9,
            eigen_slack: 1e-6,
            root_imag: 1e-8,
            root_separation: 1e-8,
            density: 0.0,
            moment_match: 1e-6,
            float_equality: 1e-9,
        }
    }
}

/// An exact rational or a binary64 float.
///
/// Exact values are kept in lowest terms with a positive denominator (this is
/// maintained by [`BigRational`]). Any operation touching a float is float.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero(mode: Mode) -> Scalar {
        Scalar::from_int(0, mode)
    }

    pub fn one(mode: Mode) -> Scalar {
        Scalar::from_int(1, mode)
    }

    pub fn from_int(n: i64, mode: Mode) -> Scalar {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(n))),
            Mode::Float => Scalar::Float(n as f64),
        }
    }

    /// Exact `num/den`.
    ///
    /// # Panics
    /// If `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Scalar {
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Scalar {
        Scalar::Exact(BigRational::new(num, den))
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(x) => *x,
        }
    }

    /// Converts to `mode`. Floats become the exact rational of their binary
    /// value; non-finite floats stay float.
    pub fn to_mode(&self, mode: Mode) -> Scalar {
        match (self, mode) {
            (Scalar::Exact(_), Mode::Exact) | (Scalar::Float(_), Mode::Float) => self.clone(),
            (Scalar::Exact(_), Mode::Float) => Scalar::Float(self.to_f64()),
            (Scalar::Float(x), Mode::Exact) => match BigRational::from_float(*x) {
                Some(q) => Scalar::Exact(q),
                None => self.clone(),
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    /// Sign as an ordering against zero. NaN compares as `Equal`.
    pub fn sign(&self) -> Ordering {
        match self {
            Scalar::Exact(q) => q.cmp(&BigRational::zero()),
            Scalar::Float(x) => x.partial_cmp(&0.0).unwrap_or(Ordering::Equal),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.abs()),
            Scalar::Float(x) => Scalar::Float(Float::abs(*x)),
        }
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        let mut acc = Scalar::one(self.mode());
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Parses an exact value: an integer, `p/q`, or a decimal with an optional
    /// exponent (`0.25`, `-1.5e3`). Decimals are rationalized exactly.
    pub fn parse_exact(s: &str) -> core::result::Result<Scalar, ParseScalarError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseScalarError::new(s, "empty"));
        }
        if let Some((n, d)) = s.split_once('/') {
            let num = parse_decimal(n.trim()).ok_or_else(|| ParseScalarError::new(s, "bad numerator"))?;
            let den = parse_decimal(d.trim()).ok_or_else(|| ParseScalarError::new(s, "bad denominator"))?;
            if den.is_zero() {
                return Err(ParseScalarError::new(s, "zero denominator"));
            }
            return Ok(Scalar::Exact(num / den));
        }
        parse_decimal(s)
            .map(Scalar::Exact)
            .ok_or_else(|| ParseScalarError::new(s, "not a number"))
    }

    fn binary(
        &self,
        rhs: &Scalar,
        exact: impl FnOnce(&BigRational, &BigRational) -> BigRational,
        float: impl FnOnce(f64, f64) -> f64,
    ) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(exact(a, b)),
            _ => Scalar::Float(float(self.to_f64(), rhs.to_f64())),
        }
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut all = String::with_capacity(int_part.len() + frac_part.len());
    all.push_str(int_part);
    all.push_str(frac_part);
    let mut num: BigInt = all.parse().ok()?;
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Failure to parse a [`Scalar`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot parse {input:?} as a number: {reason}")]
pub struct ParseScalarError {
    pub input: String,
    pub reason: &'static str,
}

impl ParseScalarError {
    fn new(input: &str, reason: &'static str) -> Self {
        ParseScalarError {
            input: input.to_string(),
            reason,
        }
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        Scalar::parse_exact(s)
    }
}

impl fmt::Display for Scalar {
    /// Exact values print as `p/q` (or `p` when integral); floats print as the
    /// shortest decimal that round-trips.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Scalar::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Scalar::Float(x) => write!(f, "{x:?}"),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Exact(q)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n, Mode::Exact)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $exact:expr, $float:expr) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.binary(rhs, $exact, $float)
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a + b, |a, b| a + b);
forward_binop!(Sub, sub, |a, b| a - b, |a, b| a - b);
forward_binop!(Mul, mul, |a, b| a * b, |a, b| a * b);
forward_binop!(Div, div, |a, b| a / b, |a, b| a / b);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Equality used by decision procedures: exact when both sides are exact,
/// otherwise relative to `max(1, |a|, |b|)` with `tol.float_equality`.
pub fn decide_equal(a: &Scalar, b: &Scalar, tol: &Tolerances) -> bool {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => x == y,
        _ => {
            let (x, y) = (a.to_f64(), b.to_f64());
            Float::abs(x - y) <= tol.float_equality * Float::abs(x).max(Float::abs(y)).max(1.0)
        }
    }
}

/// Strict positivity used by decision procedures: exact sign, or above
/// `tol.float_equality * scale` in float mode.
pub fn decide_positive(a: &Scalar, scale: f64, tol: &Tolerances) -> bool {
    match a {
        Scalar::Exact(_) => a.is_positive(),
        Scalar::Float(x) => *x > tol.float_equality * Float::abs(scale).max(1.0),
    }
}

/// Dense row-major matrix of [`Scalar`]s, homogeneous in mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    /// Builds a matrix from row-major entries. Mixed-mode input is coerced
    /// to float.
    pub fn new(rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        let mode = data.iter().fold(Mode::Exact, |m, s| m.join(s.mode()));
        let data = if mode == Mode::Float {
            data.into_iter().map(|s| s.to_mode(Mode::Float)).collect()
        } else {
            data
        };
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix::new(rows, cols, data).expect("from_fn produces rows*cols entries")
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Matrix::new(r, c, data)
    }

    pub fn zeros(rows: usize, cols: usize, mode: Mode) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(mode); rows * cols],
        }
    }

    pub fn identity(n: usize, mode: Mode) -> Matrix {
        Matrix::from_fn(n, n, |i, j| Scalar::from_int((i == j) as i64, mode))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Mode of the entries; an empty matrix reports `Exact`.
    pub fn mode(&self) -> Mode {
        self.data.first().map_or(Mode::Exact, Scalar::mode)
    }

    pub fn to_mode(&self, mode: Mode) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|s| s.to_mode(mode)).collect(),
        }
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(Scalar::to_f64).collect())
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mode = self.mode().join(rhs.mode());
        Ok(Matrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(Scalar::zero(mode), |acc, k| {
                acc + &self[(i, k)] * &rhs[(k, j)]
            })
        }))
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let mode = v.iter().fold(self.mode(), |m, s| m.join(s.mode()));
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Scalar::zero(mode), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * c)
    }

    fn zip_with(&self, rhs: &Matrix, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        Ok(Matrix::from_fn(self.rows, self.cols, |i, j| {
            f(&self[(i, j)], &rhs[(i, j)])
        }))
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|s| Float::abs(s.to_f64()))
            .fold(0.0, f64::max)
    }

    /// Exact symmetry in exact mode, relative entrywise slack in float mode.
    pub fn is_symmetric(&self, tol: &Tolerances) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        (0..self.rows).all(|i| {
            (i + 1..self.cols).all(|j| match (&self[(i, j)], &self[(j, i)]) {
                (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
                (a, b) => Float::abs(a.to_f64() - b.to_f64()) <= tol.symmetry * scale,
            })
        })
    }

    /// Rank by Gaussian elimination; exact in exact mode, pivot-thresholded
    /// in float mode.
    pub fn rank(&self, tol: &Tolerances) -> usize {
        let mut a: Vec<Vec<Scalar>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let threshold = tol.pivot * self.max_abs();
        let exact = self.mode() == Mode::Exact;
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let pivot = if exact {
                (rank..self.rows).find(|&r| !a[r][col].is_zero())
            } else {
                (rank..self.rows)
                    .max_by(|&x, &y| {
                        Float::abs(a[x][col].to_f64())
                            .partial_cmp(&Float::abs(a[y][col].to_f64()))
                            .unwrap_or(Ordering::Equal)
                    })
                    .filter(|&r| Float::abs(a[r][col].to_f64()) > threshold)
            };
            let Some(p) = pivot else { continue };
            a.swap(rank, p);
            for r in rank + 1..self.rows {
                if a[r][col].is_zero() {
                    continue;
                }
                let factor = &a[r][col] / &a[rank][col];
                for c in col..self.cols {
                    let delta = &factor * &a[rank][c];
                    a[r][c] = &a[r][c] - delta;
                }
            }
            rank += 1;
        }
        rank
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;

    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            f.write_str("[")?;
            for (j, s) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{s}")?;
            }
            f.write_str("]")?;
            if i + 1 < self.rows {
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}

/// Solves `A·x = b` with the default tolerances.
pub fn solve_linear(a: &Matrix, b: &[Scalar]) -> Result<Vec<Scalar>> {
    solve_linear_with(a, b, &Tolerances::default())
}

/// Gaussian elimination with partial pivoting. Exact mode picks the first
/// nonzero pivot and reports singularity iff the determinant is zero.
pub fn solve_linear_with(a: &Matrix, b: &[Scalar], tol: &Tolerances) -> Result<Vec<Scalar>> {
    a.require_square()?;
    let n = a.rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let mode = b.iter().fold(a.mode(), |m, s| m.join(s.mode()));
    let mut m: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            let mut row: Vec<Scalar> = a.row(i).iter().map(|s| s.to_mode(mode)).collect();
            row.push(b[i].to_mode(mode));
            row
        })
        .collect();
    let threshold = tol.pivot * a.max_abs();
    for col in 0..n {
        let pivot = match mode {
            Mode::Exact => (col..n).find(|&r| !m[r][col].is_zero()),
            Mode::Float => (col..n)
                .max_by(|&x, &y| {
                    Float::abs(m[x][col].to_f64())
                        .partial_cmp(&Float::abs(m[y][col].to_f64()))
                        .unwrap_or(Ordering::Equal)
                })
                .filter(|&r| Float::abs(m[r][col].to_f64()) > threshold),
        };
        let p = pivot.ok_or(Error::SingularMatrix)?;
        m.swap(col, p);
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &m[col][col];
            for c in col..=n {
                let delta = &factor * &m[col][c];
                m[r][c] = &m[r][c] - delta;
            }
        }
    }
    let mut x = vec![Scalar::zero(mode); n];
    for i in (0..n).rev() {
        let mut acc = m[i][n].clone();
        for j in i + 1..n {
            acc = acc - &m[i][j] * &x[j];
        }
        x[i] = acc / &m[i][i];
    }
    Ok(x)
}

/// Determinant by elimination. The 0×0 matrix has determinant 1.
pub fn determinant(a: &Matrix) -> Result<Scalar> {
    a.require_square()?;
    let n = a.rows();
    let mode = a.mode();
    let mut m: Vec<Vec<Scalar>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut det = Scalar::one(mode);
    for col in 0..n {
        let pivot = match mode {
            Mode::Exact => (col..n).find(|&r| !m[r][col].is_zero()),
            Mode::Float => (col..n).max_by(|&x, &y| {
                Float::abs(m[x][col].to_f64())
                    .partial_cmp(&Float::abs(m[y][col].to_f64()))
                    .unwrap_or(Ordering::Equal)
            }),
        };
        let Some(p) = pivot.filter(|&r| !m[r][col].is_zero()) else {
            return Ok(Scalar::zero(mode));
        };
        if p != col {
            m.swap(col, p);
            det = -det;
        }
        det = det * &m[col][col];
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &m[col][col];
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] = &m[r][c] - delta;
            }
        }
    }
    Ok(det)
}

/// Outcome of a positive-definiteness test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    Yes,
    /// `minor_order` is the 1-based size of the first leading principal
    /// minor (exact) or Cholesky pivot (float) that is not positive.
    No { minor_order: usize },
}

impl Definiteness {
    pub fn is_yes(self) -> bool {
        self == Definiteness::Yes
    }
}

pub fn is_positive_definite(a: &Matrix) -> Result<Definiteness> {
    is_positive_definite_with(a, &Tolerances::default())
}

/// Exact mode: positivity of all leading principal minors, read off as the
/// pivots of elimination without row exchanges. Float mode: Cholesky with
/// pivot threshold `pivot * max|diag|`.
pub fn is_positive_definite_with(a: &Matrix, tol: &Tolerances) -> Result<Definiteness> {
    a.require_square()?;
    if !a.is_symmetric(tol) {
        return Err(Error::NotSymmetric);
    }
    let n = a.rows();
    match a.mode() {
        Mode::Exact => {
            let mut m: Vec<Vec<Scalar>> = (0..n).map(|i| a.row(i).to_vec()).collect();
            for k in 0..n {
                if !m[k][k].is_positive() {
                    return Ok(Definiteness::No { minor_order: k + 1 });
                }
                for r in k + 1..n {
                    if m[r][k].is_zero() {
                        continue;
                    }
                    let factor = &m[r][k] / &m[k][k];
                    for c in k..n {
                        let delta = &factor * &m[k][c];
                        m[r][c] = &m[r][c] - delta;
                    }
                }
            }
            Ok(Definiteness::Yes)
        }
        Mode::Float => {
            let f = a.to_f64_rows();
            let max_diag = (0..n).map(|i| Float::abs(f[i][i])).fold(0.0, f64::max);
            let threshold = tol.pivot * max_diag;
            let mut l = vec![vec![0.0f64; n]; n];
            for j in 0..n {
                let d = f[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
                if !(d > threshold) {
                    return Ok(Definiteness::No { minor_order: j + 1 });
                }
                let root = Float::sqrt(d);
                l[j][j] = root;
                for i in j + 1..n {
                    let s = f[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
                    l[i][j] = s / root;
                }
            }
            Ok(Definiteness::Yes)
        }
    }
}

/// Eigenvalues of a symmetric matrix in descending order (cyclic Jacobi,
/// always in float).
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    a.require_square()?;
    if !a.is_symmetric(&Tolerances::default()) {
        return Err(Error::NotSymmetric);
    }
    let n = a.rows();
    let mut m = a.to_f64_rows();
    let norm2: f64 = m.iter().flatten().map(|x| x * x).sum();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off <= 1e-30 * norm2 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = Float::signum(theta) / (Float::abs(theta) + Float::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / Float::sqrt(t * t + 1.0);
                let s = t * c;
                for row in m.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * apk - s * aqk;
                    m[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    Ok(eig)
}

/// Eigenvalues `(re, im)` of a real upper Hessenberg matrix, after diagonal
/// balancing, by the shifted double-step QR iteration. `None` if the
/// iteration fails to converge.
pub fn hessenberg_eigenvalues(h: &[Vec<f64>]) -> Option<Vec<(f64, f64)>> {
    let n = h.len();
    // 1-based working copy keeps the classic index arithmetic readable.
    let mut a = vec![vec![0.0f64; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i + 1][j + 1] = h[i][j];
        }
    }
    balance(&mut a, n);
    let mut wr = vec![0.0f64; n + 1];
    let mut wi = vec![0.0f64; n + 1];
    let sign = |a: f64, b: f64| if b >= 0.0 { Float::abs(a) } else { -Float::abs(a) };

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in core::cmp::max(i - 1, 1)..=n {
            anorm += Float::abs(a[i][j]);
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = Float::abs(a[l - 1][l - 1]) + Float::abs(a[l][l]);
                if s == 0.0 {
                    s = anorm;
                }
                if Float::abs(a[l][l - 1]) + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[nn - 1][nn - 1];
            let mut w = a[nn][nn - 1] * a[nn - 1][nn];
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = Float::sqrt(Float::abs(q));
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return None;
            }
            if its == 10 || its == 20 {
                t += x;
                for i in 1..=nn {
                    a[i][i] -= x;
                }
                let s = Float::abs(a[nn][nn - 1]) + Float::abs(a[nn - 1][nn - 2]);
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let mut m = nn - 2;
            let (mut p, mut q, mut r, mut z);
            loop {
                z = a[m][m];
                r = x - z;
                let s = y - z;
                p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - r - s;
                r = a[m + 2][m + 1];
                let s = Float::abs(p) + Float::abs(q) + Float::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = Float::abs(a[m][m - 1]) * (Float::abs(q) + Float::abs(r));
                let v = Float::abs(p)
                    * (Float::abs(a[m - 1][m - 1]) + Float::abs(z) + Float::abs(a[m + 1][m + 1]));
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            let mut k = m;
            while k < nn {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = 0.0;
                    if k != nn - 1 {
                        r = a[k + 2][k - 1];
                    }
                    x = Float::abs(p) + Float::abs(q) + Float::abs(r);
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign(Float::sqrt(p * p + q * q + r * r), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        p = a[k][j] + q * a[k + 1][j];
                        if k != nn - 1 {
                            p += r * a[k + 2][j];
                            a[k + 2][j] -= p * z;
                        }
                        a[k + 1][j] -= p * y;
                        a[k][j] -= p * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        p = x * a[i][k] + y * a[i][k + 1];
                        if k != nn - 1 {
                            p += z * a[i][k + 2];
                            a[i][k + 2] -= p * r;
                        }
                        a[i][k + 1] -= p * q;
                        a[i][k] -= p;
                    }
                }
                k += 1;
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Some((1..=n).map(|i| (wr[i], wi[i])).collect())
}

/// Diagonal similarity scaling by powers of two so row and column norms are
/// comparable (1-based storage).
fn balance(a: &mut [Vec<f64>], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += Float::abs(a[j][i]);
                    r += Float::abs(a[i][j]);
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut().skip(1).take(n) {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    fn int(n: i64) -> Scalar {
        Scalar::from(n)
    }

    fn exact_matrix(rows: &[&[Scalar]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn hf3_one_third() -> Matrix {
        exact_matrix(&[
            &[q(-17, 3), int(-13), q(-110, 3), int(-130)],
            &[int(-13), q(-110, 3), int(-130), int(-552)],
            &[q(-110, 3), int(-130), int(-552), int(-2680)],
            &[int(-130), int(-552), int(-2680), int(-14160)],
        ])
    }

    #[test]
    fn scalar_modes_propagate() {
        let a = q(1, 3);
        let b = Scalar::Float(0.5);
        assert_eq!((&a + &a).mode(), Mode::Exact);
        assert_eq!((&a * &b).mode(), Mode::Float);
        assert_eq!(q(2, -4), q(-1, 2));
        assert_eq!(q(6, 3).to_string(), "2");
        assert_eq!(q(-2, 6).to_string(), "-1/3");
    }

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(Scalar::parse_exact("0.25").unwrap(), q(1, 4));
        assert_eq!(Scalar::parse_exact("-3/6").unwrap(), q(-1, 2));
        assert_eq!(Scalar::parse_exact("1.5e2").unwrap(), int(150));
        assert_eq!(Scalar::parse_exact("2.5E-1").unwrap(), q(1, 4));
        assert_eq!(Scalar::parse_exact("42").unwrap(), int(42));
        assert!(Scalar::parse_exact("1/0").is_err());
        assert!(Scalar::parse_exact("abc").is_err());
        assert!(Scalar::parse_exact("").is_err());
        assert!(Scalar::parse_exact(".").is_err());
    }

    #[test]
    fn solve_identity() {
        let x = solve_linear(&Matrix::identity(3, Mode::Exact), &[int(1), int(2), int(3)]).unwrap();
        assert_eq!(x, [int(1), int(2), int(3)]);
    }

    #[test]
    fn solve_localizing_system_from_one_third_example() {
        let b = [int(-552), int(-2680), int(-14160), int(-75600)];
        let x = solve_linear(&hf3_one_third(), &b).unwrap();
        assert_eq!(
            x,
            [
                q(-46998216, 137503),
                q(41197920, 137503),
                q(-11282760, 137503),
                q(1695024, 137503)
            ]
        );
    }

    #[test]
    fn solve_singular_is_error() {
        let a = exact_matrix(&[&[int(1), int(1)], &[int(1), int(1)]]);
        assert_eq!(solve_linear(&a, &[int(1), int(2)]), Err(Error::SingularMatrix));
        let af = a.to_mode(Mode::Float);
        assert_eq!(
            solve_linear(&af, &[Scalar::Float(1.0), Scalar::Float(2.0)]),
            Err(Error::SingularMatrix)
        );
    }

    #[test]
    fn determinant_conventions() {
        assert_eq!(determinant(&Matrix::identity(4, Mode::Exact)).unwrap(), int(1));
        assert_eq!(determinant(&Matrix::zeros(0, 0, Mode::Exact)).unwrap(), int(1));
        assert!(determinant(&Matrix::zeros(2, 3, Mode::Exact)).is_err());
    }

    #[test]
    fn positive_definite_basic() {
        assert_eq!(
            is_positive_definite(&Matrix::identity(5, Mode::Exact)).unwrap(),
            Definiteness::Yes
        );
        assert_eq!(
            is_positive_definite(&Matrix::zeros(0, 0, Mode::Exact)).unwrap(),
            Definiteness::Yes
        );
        let a = exact_matrix(&[&[int(1), int(2)], &[int(2), int(1)]]);
        assert_eq!(
            is_positive_definite(&a).unwrap(),
            Definiteness::No { minor_order: 2 }
        );
        assert_eq!(
            is_positive_definite_with(&a.to_mode(Mode::Float), &Tolerances::default()).unwrap(),
            Definiteness::No { minor_order: 2 }
        );
        let ns = exact_matrix(&[&[int(1), int(2)], &[int(3), int(1)]]);
        assert_eq!(is_positive_definite(&ns), Err(Error::NotSymmetric));
    }

    #[test]
    fn eigenvalues_of_diagonal_and_localizing_matrix() {
        let d = Matrix::from_fn(3, 3, |i, j| {
            int(if i == j { [3, 1, 2][i] } else { 0 })
        });
        let e = symmetric_eigenvalues(&d).unwrap();
        assert_eq!(e, [3.0, 2.0, 1.0]);

        let e = symmetric_eigenvalues(&hf3_one_third()).unwrap();
        let expected = [0.18, -1.54, -61.04, -14691.9];
        for (got, want) in e.iter().zip(expected) {
            assert!((got - want).abs() <= 0.01 * want.abs().max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn hessenberg_qr_finds_complex_pair() {
        // companion of x^2 + 1
        let eig = hessenberg_eigenvalues(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(eig.len(), 2);
        for (re, im) in eig {
            assert!(re.abs() < 1e-12);
            assert!((im.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_exact() {
        let a = exact_matrix(&[
            &[int(1), int(0), int(1)],
            &[int(0), int(1), int(0)],
            &[int(1), int(0), int(1)],
        ]);
        assert_eq!(a.rank(&Tolerances::default()), 2);
        assert_eq!(Matrix::zeros(3, 3, Mode::Exact).rank(&Tolerances::default()), 0);
    }
}
