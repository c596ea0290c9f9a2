//! Fixed-point counts and zeta functions as exact truncated power series.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::flip::{FlipPair, ZeroOneMatrix};
use crate::linalg::{char_poly, rational, IntMatrix, Rational};

pub const DEFAULT_DEGREE: usize = 16;

/// Coefficients `c_0..=c_degree`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaSeries {
    pub degree: usize,
    #[serde(with = "crate::io::rational_vec")]
    pub coefficients: Vec<Rational>,
}

impl ZetaSeries {
    pub fn new(mut coefficients: Vec<Rational>, degree: usize) -> Self {
        coefficients.resize(degree + 1, Rational::zero());
        ZetaSeries {
            degree,
            coefficients,
        }
    }

    pub fn coefficient(&self, k: usize) -> &Rational {
        &self.coefficients[k]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesComparison {
    /// Degrees `0..=compared_degree` were examined.
    pub compared_degree: usize,
    pub first_difference: Option<usize>,
}

impl SeriesComparison {
    pub fn equal(&self) -> bool {
        self.first_difference.is_none()
    }
}

pub fn series_equal(x: &ZetaSeries, y: &ZetaSeries) -> SeriesComparison {
    let compared_degree = x.degree.min(y.degree);
    let first_difference = (0..=compared_degree).find(|&k| x.coefficients[k] != y.coefficients[k]);
    SeriesComparison {
        compared_degree,
        first_difference,
    }
}

fn coeff(a: &[Rational], k: usize) -> Rational {
    a.get(k).cloned().unwrap_or_else(Rational::zero)
}

pub fn series_mul(a: &[Rational], b: &[Rational], degree: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); degree + 1];
    for (i, x) in a.iter().enumerate().take(degree + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(degree + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `exp(g)` for `g_0 = 0`, from `n f_n = sum_k k g_k f_{n-k}`.
pub fn series_exp(g: &[Rational], degree: usize) -> Vec<Rational> {
    assert!(coeff(g, 0).is_zero(), "exp needs a zero constant term");
    let mut f = vec![Rational::zero(); degree + 1];
    f[0] = Rational::one();
    for n in 1..=degree {
        let mut acc = Rational::zero();
        for k in 1..=n {
            let gk = coeff(g, k);
            if !gk.is_zero() {
                acc += gk * rational(k as i64) * &f[n - k];
            }
        }
        f[n] = acc / rational(n as i64);
    }
    f
}

/// Square root with constant term 1, for `f_0 = 1`.
pub fn series_sqrt(f: &[Rational], degree: usize) -> Vec<Rational> {
    assert!(coeff(f, 0).is_one(), "sqrt needs constant term 1");
    let mut g = vec![Rational::zero(); degree + 1];
    g[0] = Rational::one();
    for n in 1..=degree {
        let mut acc = coeff(f, n);
        for k in 1..n {
            acc -= &g[k] * &g[n - k];
        }
        g[n] = acc / rational(2);
    }
    g
}

pub fn series_inverse(f: &[Rational], degree: usize) -> Vec<Rational> {
    let f0 = coeff(f, 0);
    assert!(!f0.is_zero(), "inverse needs a nonzero constant term");
    let mut r = vec![Rational::zero(); degree + 1];
    r[0] = f0.recip();
    for n in 1..=degree {
        let mut acc = Rational::zero();
        for k in 1..=n {
            let fk = coeff(f, k);
            if !fk.is_zero() {
                acc += fk * &r[n - k];
            }
        }
        r[n] = -acc / &f0;
    }
    r
}

/// `f^{-1/2}` for `f_0 = 1`.
pub fn series_power_neg_half(f: &[Rational], degree: usize) -> Vec<Rational> {
    series_inverse(&series_sqrt(f, degree), degree)
}

/// Substitute `t -> t^2`.
fn in_t_squared(a: &[Rational], degree: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); degree + 1];
    for (k, x) in a.iter().enumerate() {
        if 2 * k > degree {
            break;
        }
        out[2 * k] = x.clone();
    }
    out
}

/// The diagonal of a square matrix.
pub fn delta_vector(m: &IntMatrix) -> Vec<BigInt> {
    m.diagonal()
}

fn quad(u: &[BigInt], m: &IntMatrix, v: &[BigInt]) -> BigInt {
    u.iter().zip(m.mul_vec(v)).map(|(a, b)| a * b).sum()
}

/// `p_m`, `p_{2m-1,0}`, `p_{2m,0}` and `p_{2m,1}` for `m = 1..=max_m`;
/// index `m - 1` holds the entry for `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointTable {
    pub max_m: usize,
    #[serde(with = "crate::io::bigint_vec")]
    pub p_m: Vec<BigInt>,
    #[serde(with = "crate::io::bigint_vec")]
    pub p_odd0: Vec<BigInt>,
    #[serde(with = "crate::io::bigint_vec")]
    pub p_even0: Vec<BigInt>,
    #[serde(with = "crate::io::bigint_vec")]
    pub p_even1: Vec<BigInt>,
}

impl FixedPointTable {
    /// `p_{m,n}` through the parity reductions; `None` beyond the table.
    pub fn p_mn(&self, m: usize, n: i64) -> Option<&BigInt> {
        if m == 0 {
            return None;
        }
        if m % 2 == 1 {
            self.p_odd0.get(m.div_ceil(2) - 1)
        } else if n.rem_euclid(2) == 0 {
            self.p_even0.get(m / 2 - 1)
        } else {
            self.p_even1.get(m / 2 - 1)
        }
    }

    /// Table of the same shift with flip `sigma o phi`: even offsets swap.
    pub fn shifted(&self) -> Self {
        FixedPointTable {
            max_m: self.max_m,
            p_m: self.p_m.clone(),
            p_odd0: self.p_odd0.clone(),
            p_even0: self.p_even1.clone(),
            p_even1: self.p_even0.clone(),
        }
    }
}

pub fn fixed_point_counts(p: &FlipPair, max_m: usize) -> FixedPointTable {
    let a = p.a().to_int();
    let j = p.j().to_int();
    let n = p.size();
    let d_j = delta_vector(&j);
    let d_aj = delta_vector(&a.mul(&j));
    let d_ja = delta_vector(&j.mul(&a));
    let mut table = FixedPointTable {
        max_m,
        p_m: Vec::with_capacity(max_m),
        p_odd0: Vec::with_capacity(max_m),
        p_even0: Vec::with_capacity(max_m),
        p_even1: Vec::with_capacity(max_m),
    };
    // prev = A^{m-1}, cur = A^m
    let mut prev = IntMatrix::identity(n);
    for _ in 1..=max_m {
        let cur = prev.mul(&a);
        table.p_m.push(cur.trace());
        table.p_odd0.push(quad(&d_j, &prev, &d_aj));
        table.p_even0.push(quad(&d_j, &cur, &d_j));
        table.p_even1.push(quad(&d_ja, &prev, &d_aj));
        prev = cur;
    }
    table
}

/// `exp(sum_m trace(A^m) t^m / m)`.
pub fn artin_mazur(a: &ZeroOneMatrix, degree: usize) -> ZetaSeries {
    let am = a.to_int();
    let mut g = vec![Rational::zero(); degree + 1];
    let mut power = IntMatrix::identity(a.size());
    for (m, gm) in g.iter_mut().enumerate().skip(1) {
        power = power.mul(&am);
        *gm = Rational::new(power.trace(), BigInt::from(m));
    }
    ZetaSeries::new(series_exp(&g, degree), degree)
}

/// `1 / det(I - tA)`, from the reversed characteristic polynomial.
pub fn inverse_det_series(a: &ZeroOneMatrix, degree: usize) -> ZetaSeries {
    let chi = char_poly(&a.to_rational()).expect("square integer matrix");
    let mut det: Vec<Rational> = chi
        .coefficients()
        .iter()
        .rev()
        .map(|c| Rational::from_integer(c.clone()))
        .collect();
    det.resize(a.size() + 1, Rational::zero());
    ZetaSeries::new(series_inverse(&det, degree), degree)
}

/// `zeta_T(t^2)^{1/2} exp(G)` with
/// `G = sum_m p_{2m-1,0} t^{2m-1} + (p_{2m,0} + p_{2m,1}) / 2 t^{2m}`.
pub fn lind_zeta_from_table(
    table: &FixedPointTable,
    artin_mazur: &ZetaSeries,
    degree: usize,
) -> ZetaSeries {
    assert!(2 * table.max_m >= degree, "fixed-point table too short");
    assert!(
        artin_mazur.degree * 2 >= degree,
        "Artin-Mazur series too short"
    );
    let mut g = vec![Rational::zero(); degree + 1];
    for m in 1..=table.max_m {
        let odd = 2 * m - 1;
        if odd <= degree {
            g[odd] = Rational::from_integer(table.p_odd0[m - 1].clone());
        }
        if 2 * m <= degree {
            g[2 * m] = Rational::new(
                &table.p_even0[m - 1] + &table.p_even1[m - 1],
                BigInt::from(2),
            );
        }
    }
    let root = series_sqrt(&in_t_squared(&artin_mazur.coefficients, degree), degree);
    ZetaSeries::new(series_mul(&root, &series_exp(&g, degree), degree), degree)
}

pub fn lind_zeta(p: &FlipPair, degree: usize) -> ZetaSeries {
    let half = degree.div_ceil(2).max(1);
    let table = fixed_point_counts(p, half);
    let am = artin_mazur(p.a(), half);
    lind_zeta_from_table(&table, &am, degree)
}
