//! Exact matrix arithmetic over the integers and the rationals.
//!
//! Everything here is dense and exact. Matrices are small (tens of rows at
//! most), so clarity wins over cache behaviour.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Canonical exact rational; always stored in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Dense rational matrix.
pub type RMatrix = Matrix<Rational>;

/// Dense integer matrix (used for equivalence witnesses and powers).
pub type IntMatrix = Matrix<BigInt>;

/// A column vector of rationals.
pub type RVector = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("factor polynomial must be nonconstant")]
    ConstantFactor,
    #[error(
        "rank drop {drop} at power {power} is not a multiple of the factor degree {degree}; \
         the factor is not irreducible over the rationals"
    )]
    NonIntegralBlockCount {
        power: usize,
        drop: usize,
        degree: usize,
    },
    #[error("cannot parse polynomial {0:?}")]
    PolynomialParse(String),
    #[error("matrix entries are not all integers")]
    NotIntegral,
}

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Dense row-major matrix over a commutative ring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{} ", self.data[r * self.cols + c])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: T) {
        self.data[r * self.cols + c] = value;
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        Matrix { rows, cols, data }
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.iter().flat_map(|row| row.iter().cloned()).collect(),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        let cols = columns.len();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for col in columns {
                data.push(col[r].clone());
            }
        }
        Matrix { rows, cols, data }
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T> + Sub<Output = T> + Neg<Output = T>,
{
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        if self.cols != other.rows {
            return None;
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        Some(out)
    }

    /// Panics on a shape mismatch; use [`Matrix::checked_mul`] for untrusted shapes.
    pub fn mul(&self, other: &Self) -> Self {
        self.checked_mul(other).unwrap_or_else(|| {
            panic!(
                "shape mismatch: {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| s.clone() * x.clone())
    }

    pub fn pow(&self, mut e: usize) -> Self {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square());
        (0..self.rows).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn diagonal(&self) -> Vec<T> {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }
}

impl IntMatrix {
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let rows: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Matrix::from_rows(&rows)
    }

    pub fn to_rational(&self) -> RMatrix {
        self.map(|x| Rational::from_integer(x.clone()))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn is_zero_one(&self) -> bool {
        self.data.iter().all(|x| x.is_zero() || x.is_one())
    }
}

impl RMatrix {
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        IntMatrix::from_i64_rows(rows).to_rational()
    }

    pub fn to_integer(&self) -> Result<IntMatrix, LinalgError> {
        if self.data.iter().any(|x| !x.is_integer()) {
            return Err(LinalgError::NotIntegral);
        }
        Ok(self.map(|x| x.to_integer()))
    }

    /// Reduced row echelon form and the pivot columns, pivoting on the first
    /// nonzero entry of each column in order.
    pub fn rref(&self) -> (RMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    m.data.swap(p * m.cols + c, row * m.cols + c);
                }
            }
            let inv = m.get(row, col).recip();
            for c in col..m.cols {
                let v = m.get(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for c in col..m.cols {
                    let v = m.get(r, c) - &factor * m.get(row, c);
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }
}

/// Rank over the rationals.
pub fn rank(m: &RMatrix) -> usize {
    m.rref().1.len()
}

/// Basis of the right null space: one vector per free column of the reduced
/// row echelon form, in column order.
pub fn kernel_basis(m: &RMatrix) -> Vec<RVector> {
    let (r, pivots) = m.rref();
    let mut is_pivot = vec![None; m.cols()];
    for (row, &col) in pivots.iter().enumerate() {
        is_pivot[col] = Some(row);
    }
    (0..m.cols())
        .filter(|&c| is_pivot[c].is_none())
        .map(|free| {
            let mut v = vec![Rational::zero(); m.cols()];
            v[free] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(row, free).clone();
            }
            v
        })
        .collect()
}

/// Some `x` with `m x = b`, or `None` if the system is inconsistent.
pub fn solve(m: &RMatrix, b: &[Rational]) -> Option<RVector> {
    assert_eq!(m.rows(), b.len());
    let aug: Vec<Vec<Rational>> = b
        .iter()
        .enumerate()
        .map(|(r, rhs)| {
            let mut row = m.row(r).to_vec();
            row.push(rhs.clone());
            row
        })
        .collect();
    let (red, pivots) = RMatrix::from_rows(&aug).rref();
    if pivots.last() == Some(&m.cols()) {
        return None;
    }
    let mut x = vec![Rational::zero(); m.cols()];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = red.get(row, m.cols()).clone();
    }
    Some(x)
}

/// Whether `b` lies in the column space of `m`.
pub fn in_column_space(m: &RMatrix, b: &[Rational]) -> bool {
    solve(m, b).is_some()
}

/// Rank of a family of vectors of common length `dim`.
pub fn rank_of_vectors(dim: usize, vectors: &[RVector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    rank(&RMatrix::from_columns(dim, vectors))
}

pub fn dot(u: &[Rational], v: &[Rational]) -> Rational {
    assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// `u - s * v`, elementwise.
pub fn axpy_neg(u: &[Rational], s: &Rational, v: &[Rational]) -> RVector {
    u.iter().zip(v).map(|(a, b)| a - s * b).collect()
}

/// Integer polynomial, coefficients lowest degree first; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coefficients: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coefficients: Vec<BigInt>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        IntPolynomial { coefficients }
    }

    pub fn from_i64(coefficients: &[i64]) -> Self {
        Self::new(coefficients.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The monomial `t`.
    pub fn t() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coefficients.last().cloned().unwrap_or_default()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::new(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::from_i64(&[1]), |acc, _| acc.mul(self))
    }

    /// `f(M)` by Horner's scheme.
    pub fn eval_matrix(&self, m: &RMatrix) -> RMatrix {
        assert!(m.is_square());
        let n = m.rows();
        let mut acc = RMatrix::zeros(n, n);
        for c in self.coefficients.iter().rev() {
            acc = acc
                .mul(m)
                .add(&RMatrix::identity(n).scale(&Rational::from_integer(c.clone())));
        }
        acc
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| {
                acc * x + Rational::from_integer(c.clone())
            })
    }

    /// `t^deg * f(1/t)`, e.g. `det(I - tM)` from the characteristic polynomial.
    pub fn reversed(&self) -> Self {
        let mut c = self.coefficients.clone();
        c.reverse();
        Self::new(c)
    }

    /// Parse expressions such as `t`, `t-1`, `t^2-3t+1`, `2t^3 + t - 5`.
    pub fn parse(src: &str) -> Result<Self, LinalgError> {
        let err = || LinalgError::PolynomialParse(src.to_string());
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err());
        }
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in s.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        let mut coeffs: Vec<BigInt> = Vec::new();
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, term.strip_prefix('+').unwrap_or(term)),
            };
            if body.is_empty() {
                return Err(err());
            }
            let (coef, power) = match body.find(['t', 'x']) {
                None => (body.parse::<BigInt>().map_err(|_| err())?, 0usize),
                Some(pos) => {
                    let head = body[..pos].trim_end_matches('*');
                    let coef = if head.is_empty() {
                        BigInt::one()
                    } else {
                        head.parse::<BigInt>().map_err(|_| err())?
                    };
                    let tail = &body[pos + 1..];
                    let power = if tail.is_empty() {
                        1
                    } else {
                        tail.strip_prefix('^')
                            .ok_or_else(err)?
                            .parse::<usize>()
                            .map_err(|_| err())?
                    };
                    (coef, power)
                }
            };
            if coeffs.len() <= power {
                coeffs.resize(power + 1, BigInt::zero());
            }
            coeffs[power] += coef * sign;
        }
        Ok(Self::new(coeffs))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coef = !abs.is_one() || i == 0;
            if show_coef {
                write!(f, "{abs}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({self})")
    }
}

/// `det(tI - M)` by the Faddeev–LeVerrier recurrence. Intermediate values are
/// rational; the result is checked to be integral.
pub fn char_poly(m: &RMatrix) -> Result<IntPolynomial, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let id = RMatrix::identity(n);
    let mut aux = RMatrix::zeros(n, n);
    for k in 1..=n {
        // aux_k = M aux_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(M aux_k) / k
        aux = m.mul(&aux).add(&id.scale(&coeffs[n - k + 1]));
        let c = -(m.mul(&aux).trace()) / rational(k as i64);
        coeffs[n - k] = c;
    }
    if coeffs.iter().any(|c| !c.is_integer()) {
        return Err(LinalgError::NotIntegral);
    }
    Ok(IntPolynomial::new(
        coeffs.into_iter().map(|c| c.to_integer()).collect(),
    ))
}

/// Block sizes of the part of the Jordan form belonging to an irreducible
/// factor `f`, read off the rank sequence of `f(M)^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanProfile {
    pub factor: IntPolynomial,
    /// Weakly decreasing.
    pub block_sizes: Vec<usize>,
    /// `rank(f(M)^k)` for `k = 0..` until it stabilises (last entry repeats).
    pub rank_sequence: Vec<usize>,
}

impl JordanProfile {
    pub fn total_dimension(&self) -> usize {
        self.block_sizes.iter().sum::<usize>() * self.factor.degree()
    }
}

pub fn jordan_profile(m: &RMatrix, f: &IntPolynomial) -> Result<JordanProfile, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if f.degree() == 0 {
        return Err(LinalgError::ConstantFactor);
    }
    let n = m.rows();
    let deg = f.degree();
    let fm = f.eval_matrix(m);
    let mut ranks = vec![n];
    let mut power = RMatrix::identity(n);
    loop {
        power = power.mul(&fm);
        let r = rank(&power);
        let prev = *ranks.last().unwrap();
        ranks.push(r);
        if r == prev {
            break;
        }
    }
    // at_least[k-1] = number of blocks of size >= k
    let mut at_least = Vec::new();
    for k in 1..ranks.len() {
        let drop = ranks[k - 1] - ranks[k];
        if drop % deg != 0 {
            return Err(LinalgError::NonIntegralBlockCount {
                power: k,
                drop,
                degree: deg,
            });
        }
        at_least.push(drop / deg);
    }
    let mut block_sizes = Vec::new();
    for k in (1..=at_least.len()).rev() {
        let exact = at_least[k - 1] - at_least.get(k).copied().unwrap_or(0);
        block_sizes.extend(std::iter::repeat_n(k, exact));
    }
    Ok(JordanProfile {
        factor: f.clone(),
        block_sizes,
        rank_sequence: ranks,
    })
}

/// Factors of degree at most two found by the helper, with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<(IntPolynomial, usize)>,
    /// Square-free pieces of degree > 2 that the helper does not split further.
    pub unresolved: Vec<(IntPolynomial, usize)>,
}

/// Split a monic integer polynomial into rational-root linear factors and
/// irreducible quadratics, via square-free decomposition. Pieces of degree
/// three or more without rational roots are reported as unresolved.
pub fn small_factors(p: &IntPolynomial) -> Factorization {
    let mut factors: Vec<(IntPolynomial, usize)> = Vec::new();
    let mut unresolved = Vec::new();
    for (piece, mult) in square_free_decomposition(p) {
        let mut rest = piece;
        for root in rational_roots(&rest) {
            // primitive linear factor (den t - num)
            let lin = IntPolynomial::new(vec![-root.numer().clone(), root.denom().clone()]);
            rest = exact_div(&rest, &lin).expect("root divides");
            factors.push((lin, mult));
        }
        match rest.degree() {
            0 => {}
            1 | 2 => factors.push((rest, mult)),
            _ => unresolved.push((rest, mult)),
        }
    }
    factors.sort_by(|a, b| {
        (a.0.degree(), a.0.coefficients()).cmp(&(b.0.degree(), b.0.coefficients()))
    });
    Factorization {
        factors,
        unresolved,
    }
}

type QPoly = Vec<Rational>;

fn qpoly_trim(mut p: QPoly) -> QPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn qpoly_divmod(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let b = qpoly_trim(b.clone());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r = qpoly_trim(a.clone());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Rational::zero(); r.len() - b.len() + 1];
    let lead = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] = &r[i + shift] - &c * bi;
        }
        q[shift] = c;
        r = qpoly_trim(r);
    }
    (qpoly_trim(q), r)
}

fn qpoly_gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut x, mut y) = (qpoly_trim(a.clone()), qpoly_trim(b.clone()));
    while !y.is_empty() {
        let (_, r) = qpoly_divmod(&x, &y);
        x = y;
        y = r;
    }
    if let Some(l) = x.last().cloned() {
        x = x.into_iter().map(|c| c / &l).collect();
    }
    x
}

fn to_q(p: &IntPolynomial) -> QPoly {
    p.coefficients()
        .iter()
        .map(|c| Rational::from_integer(c.clone()))
        .collect()
}

/// Rational polynomial scaled to a primitive integer polynomial with
/// positive leading coefficient.
fn to_primitive(p: &QPoly) -> IntPolynomial {
    let p = qpoly_trim(p.clone());
    let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut ints: Vec<BigInt> = p.iter().map(|c| (c * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() {
        ints = ints.into_iter().map(|c| c / &g).collect();
    }
    if ints.last().is_some_and(Signed::is_negative) {
        ints = ints.into_iter().map(|c| -c).collect();
    }
    IntPolynomial::new(ints)
}

fn derivative(p: &QPoly) -> QPoly {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * rational(i as i64))
        .collect()
}

/// Yun's algorithm: pieces `(g_i, i)` with `p = lc * prod g_i^i`, each `g_i`
/// square-free and pairwise coprime.
fn square_free_decomposition(p: &IntPolynomial) -> Vec<(IntPolynomial, usize)> {
    let f = to_q(p);
    if f.len() <= 1 {
        return Vec::new();
    }
    let df = derivative(&f);
    let mut a = qpoly_gcd(&f, &df);
    let mut b = qpoly_divmod(&f, &a).0;
    let mut c = qpoly_divmod(&df, &a).0;
    let mut d: QPoly = {
        let db = derivative(&b);
        let len = c.len().max(db.len());
        qpoly_trim(
            (0..len)
                .map(|i| {
                    c.get(i).cloned().unwrap_or_default() - db.get(i).cloned().unwrap_or_default()
                })
                .collect(),
        )
    };
    let mut out = Vec::new();
    let mut i = 1;
    loop {
        a = qpoly_gcd(&b, &d);
        if a.len() > 1 {
            out.push((to_primitive(&a), i));
        }
        b = qpoly_divmod(&b, &a).0;
        if b.len() <= 1 {
            break;
        }
        c = qpoly_divmod(&d, &a).0;
        let db = derivative(&b);
        let len = c.len().max(db.len());
        d = qpoly_trim(
            (0..len)
                .map(|k| {
                    c.get(k).cloned().unwrap_or_default() - db.get(k).cloned().unwrap_or_default()
                })
                .collect(),
        );
        i += 1;
    }
    out
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let Some(small) = n.to_u64() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= small {
        if small % d == 0 {
            out.push(BigInt::from(d));
            if d * d != small {
                out.push(BigInt::from(small / d));
            }
        }
        d += 1;
    }
    out
}

/// Distinct rational roots of a square-free polynomial.
fn rational_roots(p: &IntPolynomial) -> Vec<Rational> {
    if p.degree() == 0 {
        return Vec::new();
    }
    let coeffs = p.coefficients();
    let mut roots = Vec::new();
    // strip the factor t^k first
    let low = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
    if low > 0 {
        roots.push(Rational::zero());
    }
    let c0 = &coeffs[low];
    let lead = p.leading();
    for num in divisors(c0) {
        for den in divisors(&lead) {
            for sign in [1, -1] {
                let r = Rational::new(num.clone() * sign, den.clone());
                if !roots.contains(&r) && p.eval(&r).is_zero() {
                    roots.push(r);
                }
            }
        }
    }
    roots.sort();
    roots
}

fn exact_div(a: &IntPolynomial, b: &IntPolynomial) -> Option<IntPolynomial> {
    let (q, r) = qpoly_divmod(&to_q(a), &to_q(b));
    if !r.is_empty() || q.iter().any(|c| !c.is_integer()) {
        return None;
    }
    Some(IntPolynomial::new(
        q.into_iter().map(|c| c.to_integer()).collect(),
    ))
}
