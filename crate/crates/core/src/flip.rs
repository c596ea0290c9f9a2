//! Flip pairs `(A, J)`: a transition matrix together with a symbol involution
//! that reverses it.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{IntMatrix, RMatrix, Rational};

/// Default largest alphabet for [`enumerate_flips`].
pub const DEFAULT_FLIP_ALPHABET_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlipError {
    #[error("J is not a symmetric permutation matrix of order two")]
    NotInvolution,
    #[error("AJ != JA^T")]
    NotCompatible,
    #[error("A is {a}x{a} but J is {j}x{j}")]
    SizeMismatch { a: usize, j: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry ({row}, {col}) is not 0 or 1")]
    NotZeroOne { row: usize, col: usize },
    #[error("symbol {symbol} out of range for an alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },
    #[error("alphabet size {size} exceeds the limit {limit}")]
    AlphabetTooLarge { size: usize, limit: usize },
}

/// Square matrix with entries in {0, 1}.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZeroOneMatrix {
    size: usize,
    bits: Vec<bool>,
}

impl ZeroOneMatrix {
    pub fn zeros(size: usize) -> Self {
        ZeroOneMatrix {
            size,
            bits: vec![false; size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m.set(i, i, true);
        }
        m
    }

    pub fn permutation(perm: &[usize]) -> Self {
        let mut m = Self::zeros(perm.len());
        for (i, &p) in perm.iter().enumerate() {
            m.set(i, p, true);
        }
        m
    }

    pub fn from_rows<T: Copy + Into<i64>>(rows: &[Vec<T>]) -> Result<Self, FlipError> {
        let size = rows.len();
        let mut m = Self::zeros(size);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(FlipError::NotSquare {
                    rows: size,
                    cols: row.len(),
                });
            }
            for (c, &x) in row.iter().enumerate() {
                match x.into() {
                    0 => {}
                    1 => m.set(r, c, true),
                    _ => return Err(FlipError::NotZeroOne { row: r, col: c }),
                }
            }
        }
        Ok(m)
    }

    pub fn from_int(m: &IntMatrix) -> Result<Self, FlipError> {
        if !m.is_square() {
            return Err(FlipError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let mut out = Self::zeros(m.rows());
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let x = m.get(r, c);
                if x.is_one() {
                    out.set(r, c, true);
                } else if !x.is_zero() {
                    return Err(FlipError::NotZeroOne { row: r, col: c });
                }
            }
        }
        Ok(out)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.size + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.bits[r * self.size + c] = v;
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.size);
        for r in 0..self.size {
            for c in 0..self.size {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Successors of symbol `r`, ascending.
    pub fn successors(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.size).filter(move |&c| self.get(r, c))
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.size)
            .map(|r| (0..self.size).map(|c| self.get(r, c) as u8).collect())
            .collect()
    }

    pub fn to_int(&self) -> IntMatrix {
        IntMatrix::from_vec(
            self.size,
            self.size,
            self.bits.iter().map(|&b| BigInt::from(b as u8)).collect(),
        )
    }

    pub fn to_rational(&self) -> RMatrix {
        RMatrix::from_vec(
            self.size,
            self.size,
            self.bits
                .iter()
                .map(|&b| Rational::from_integer(BigInt::from(b as u8)))
                .collect(),
        )
    }

    /// Boolean-free integer product, used for the `AJ = JA^T` test.
    fn int_product(&self, other: &Self) -> Vec<u32> {
        let n = self.size;
        let mut out = vec![0u32; n * n];
        for i in 0..n {
            for k in 0..n {
                if !self.get(i, k) {
                    continue;
                }
                for j in 0..n {
                    if other.get(k, j) {
                        out[i * n + j] += 1;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for ZeroOneMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZeroOneMatrix{:?}", self.to_rows())
    }
}

/// A validated flip pair. `tau` is the symbol involution read off `J`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlipPair {
    a: ZeroOneMatrix,
    j: ZeroOneMatrix,
    tau: Vec<usize>,
}

impl FlipPair {
    pub fn a(&self) -> &ZeroOneMatrix {
        &self.a
    }

    pub fn j(&self) -> &ZeroOneMatrix {
        &self.j
    }

    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    pub fn size(&self) -> usize {
        self.a.size
    }

    /// Whether `u v` is an allowed transition.
    pub fn allowed(&self, u: usize, v: usize) -> bool {
        self.a.get(u, v)
    }

    /// Cycle notation of `tau` with fixed points omitted; `id` when trivial.
    pub fn tau_cycles(&self) -> String {
        permutation_cycles(&self.tau)
    }
}

pub fn permutation_cycles(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] == start {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut x = perm[start];
        while x != start {
            seen[x] = true;
            cycle.push(x);
            x = perm[x];
        }
        let body: Vec<String> = cycle.iter().map(usize::to_string).collect();
        out.push('(');
        out.push_str(&body.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        "id".to_string()
    } else {
        out
    }
}

/// Extract the involution encoded by `j`, if `j` is a symmetric permutation matrix.
fn involution_of(j: &ZeroOneMatrix) -> Result<Vec<usize>, FlipError> {
    let n = j.size;
    let mut tau = Vec::with_capacity(n);
    for r in 0..n {
        let mut ones = j.successors(r);
        let (Some(c), None) = (ones.next(), ones.next()) else {
            return Err(FlipError::NotInvolution);
        };
        tau.push(c);
    }
    if (0..n).any(|i| tau[tau[i]] != i) {
        return Err(FlipError::NotInvolution);
    }
    Ok(tau)
}

pub fn validate_flip_pair(a: ZeroOneMatrix, j: ZeroOneMatrix) -> Result<FlipPair, FlipError> {
    if a.size != j.size {
        return Err(FlipError::SizeMismatch {
            a: a.size,
            j: j.size,
        });
    }
    let tau = involution_of(&j)?;
    if a.int_product(&j) != j.int_product(&a.transpose()) {
        return Err(FlipError::NotCompatible);
    }
    Ok(FlipPair { a, j, tau })
}

/// Reverse `w` and apply `tau` to every symbol.
pub fn flip_block(p: &FlipPair, w: &[usize]) -> Result<Vec<usize>, FlipError> {
    let size = p.size();
    w.iter()
        .rev()
        .map(|&s| {
            p.tau
                .get(s)
                .copied()
                .ok_or(FlipError::SymbolOutOfRange { symbol: s, size })
        })
        .collect()
}

/// Every `J` making `(a, J)` a flip pair, in the order produced by pairing
/// the smallest unassigned symbol first with itself, then with each larger
/// unassigned symbol.
pub fn enumerate_flips(a: &ZeroOneMatrix, limit: usize) -> Result<Vec<ZeroOneMatrix>, FlipError> {
    if a.size > limit {
        return Err(FlipError::AlphabetTooLarge {
            size: a.size,
            limit,
        });
    }
    let mut tau = vec![usize::MAX; a.size];
    let mut out = Vec::new();
    extend_involution(a, &mut tau, &mut out);
    Ok(out)
}

/// `A(x, y) = A(tau y, tau x)` on every pair whose images are both assigned.
fn consistent_with(a: &ZeroOneMatrix, tau: &[usize], fresh: &[usize]) -> bool {
    let n = a.size;
    fresh.iter().all(|&x| {
        (0..n)
            .filter(|&y| tau[y] != usize::MAX)
            .all(|y| a.get(x, y) == a.get(tau[y], tau[x]) && a.get(y, x) == a.get(tau[x], tau[y]))
    })
}

fn extend_involution(a: &ZeroOneMatrix, tau: &mut Vec<usize>, out: &mut Vec<ZeroOneMatrix>) {
    let Some(i) = tau.iter().position(|&t| t == usize::MAX) else {
        out.push(ZeroOneMatrix::permutation(tau));
        return;
    };
    for k in i..a.size {
        if tau[k] != usize::MAX {
            continue;
        }
        tau[i] = k;
        tau[k] = i;
        if consistent_with(a, tau, &[i, k]) {
            extend_involution(a, tau, out);
        }
        tau[i] = usize::MAX;
        tau[k] = usize::MAX;
    }
}
