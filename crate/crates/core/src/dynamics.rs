//! Blocks, periodic points and their brute-force counts, higher-block
//! recodings and the sliding-block conjugacy of a half elementary
//! equivalence.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::equivalence::{EquivalenceWitness, WitnessKind};
use crate::flip::{flip_block, validate_flip_pair, FlipPair, ZeroOneMatrix};
use crate::linalg::IntMatrix;

/// Largest number of words a brute-force enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("enumeration needs {needed} words, budget is {budget}")]
    BudgetExceeded { needed: BigInt, budget: u64 },
    #[error("no admissible blocks of length {0}")]
    EmptyShift(usize),
    #[error("period must be positive")]
    ZeroPeriod,
    #[error("witness gives no image symbol at position {position}")]
    NoImage { position: usize },
    #[error("expected an HEE witness, got {0:?}")]
    WrongWitnessKind(WitnessKind),
}

/// Fundamental word of a point with `x_{i+m} = x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodicPoint {
    pub word: Vec<usize>,
}

impl PeriodicPoint {
    pub fn new(word: Vec<usize>) -> Self {
        assert!(!word.is_empty(), "periodic point with empty word");
        PeriodicPoint { word }
    }

    pub fn period(&self) -> usize {
        self.word.len()
    }

    /// `x_i` for any integer `i`.
    pub fn at(&self, i: i64) -> usize {
        self.word[i.rem_euclid(self.word.len() as i64) as usize]
    }

    pub fn is_admissible(&self, a: &ZeroOneMatrix) -> bool {
        let m = self.word.len();
        (0..m).all(|i| a.get(self.word[i], self.word[(i + 1) % m]))
    }

    /// `sigma^k(x)_i = x_{i+k}`.
    pub fn shift(&self, k: i64) -> Self {
        let m = self.word.len() as i64;
        PeriodicPoint::new((0..m).map(|i| self.at(i + k)).collect())
    }

    /// `phi(x)_i = tau(x_{-i})`.
    pub fn flip(&self, p: &FlipPair) -> Self {
        let m = self.word.len() as i64;
        PeriodicPoint::new((0..m).map(|i| p.tau()[self.at(-i)]).collect())
    }
}

/// Number of admissible words of length `n`.
pub fn block_count(a: &ZeroOneMatrix, n: usize) -> BigInt {
    match n {
        0 => BigInt::from(1),
        _ => a.to_int().pow(n - 1).entries().iter().sum(),
    }
}

fn check_budget(a: &ZeroOneMatrix, n: usize, budget: u64) -> Result<(), DynamicsError> {
    let needed = block_count(a, n);
    if needed > BigInt::from(budget) {
        return Err(DynamicsError::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Depth-first walk over admissible words of length `n`, lexicographic.
fn for_each_block<F: FnMut(&[usize])>(a: &ZeroOneMatrix, n: usize, mut f: F) {
    if n == 0 {
        f(&[]);
        return;
    }
    let mut word = Vec::with_capacity(n);
    fn go<F: FnMut(&[usize])>(a: &ZeroOneMatrix, n: usize, word: &mut Vec<usize>, f: &mut F) {
        if word.len() == n {
            f(word);
            return;
        }
        let next: Vec<usize> = match word.last() {
            None => (0..a.size()).collect(),
            Some(&s) => a.successors(s).collect(),
        };
        for s in next {
            word.push(s);
            go(a, n, word, f);
            word.pop();
        }
    }
    go(a, n, &mut word, &mut f);
}

/// All admissible `n`-blocks in lexicographic order.
pub fn blocks(a: &ZeroOneMatrix, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_block(a, n, |w| out.push(w.to_vec()));
    out
}

/// Points with `sigma^m(x) = x`, as fundamental words in lexicographic order.
pub fn periodic_points(
    a: &ZeroOneMatrix,
    m: usize,
    budget: u64,
) -> Result<Vec<PeriodicPoint>, DynamicsError> {
    if m == 0 {
        return Err(DynamicsError::ZeroPeriod);
    }
    check_budget(a, m, budget)?;
    let mut out = Vec::new();
    for_each_block(a, m, |w| {
        if a.get(w[m - 1], w[0]) {
            out.push(PeriodicPoint::new(w.to_vec()));
        }
    });
    Ok(out)
}

/// Brute-force `p_m`.
pub fn count_periodic(a: &ZeroOneMatrix, m: usize, budget: u64) -> Result<u64, DynamicsError> {
    if m == 0 {
        return Err(DynamicsError::ZeroPeriod);
    }
    check_budget(a, m, budget)?;
    let mut count = 0u64;
    for_each_block(a, m, |w| {
        if a.get(w[m - 1], w[0]) {
            count += 1;
        }
    });
    Ok(count)
}

/// Brute-force `p_{m,n}`: period-`m` points with `sigma^n(phi(x)) = x`.
pub fn count_flip_fixed(p: &FlipPair, m: usize, n: i64, budget: u64) -> Result<u64, DynamicsError> {
    if m == 0 {
        return Err(DynamicsError::ZeroPeriod);
    }
    let a = p.a();
    check_budget(a, m, budget)?;
    let tau = p.tau();
    let mi = m as i64;
    let mut count = 0u64;
    for_each_block(a, m, |w| {
        if !a.get(w[m - 1], w[0]) {
            return;
        }
        // (sigma^n phi x)_i = tau(x_{-(i+n)})
        let fixed = (0..mi).all(|i| tau[w[(-(i + n)).rem_euclid(mi) as usize]] == w[i as usize]);
        if fixed {
            count += 1;
        }
    });
    Ok(count)
}

/// A higher-block pair with the block labelling its symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HigherBlock {
    pub pair: FlipPair,
    pub blocks: Vec<Vec<usize>>,
}

impl HigherBlock {
    pub fn index_of(&self, block: &[usize]) -> Option<usize> {
        self.blocks
            .binary_search_by(|b| b.as_slice().cmp(block))
            .ok()
    }
}

/// The pair on `n`-blocks: `u -> v` iff they overlap in `n - 1` symbols, and
/// `J_n` sends `u` to its reversed `tau`-image.
pub fn higher_block(p: &FlipPair, n: usize) -> Result<HigherBlock, DynamicsError> {
    assert!(n >= 1, "block length must be positive");
    let labels = blocks(p.a(), n);
    if labels.is_empty() {
        return Err(DynamicsError::EmptyShift(n));
    }
    let size = labels.len();
    let find = |b: &[usize]| labels.binary_search_by(|x| x.as_slice().cmp(b)).ok();
    let mut a = ZeroOneMatrix::zeros(size);
    let mut j = ZeroOneMatrix::zeros(size);
    for (ui, u) in labels.iter().enumerate() {
        if n == 1 {
            for v in p.a().successors(u[0]) {
                a.set(ui, v, true);
            }
        } else {
            let last = *u.last().unwrap();
            for s in p.a().successors(last) {
                let mut v = u[1..].to_vec();
                v.push(s);
                let vi = find(&v).expect("extension of an admissible block is admissible");
                a.set(ui, vi, true);
            }
        }
        let image = flip_block(p, u).expect("block symbols are in range");
        let vi = find(&image).expect("flip maps admissible blocks to admissible blocks");
        j.set(ui, vi, true);
    }
    let pair = validate_flip_pair(a, j).expect("higher-block pairs are flip pairs");
    Ok(HigherBlock {
        pair,
        blocks: labels,
    })
}

/// `gamma(x)_i = b` with `D(x_i, b) = E(b, x_{i+1}) = 1`.
pub fn apply_gamma(
    w: &EquivalenceWitness,
    x: &PeriodicPoint,
) -> Result<PeriodicPoint, DynamicsError> {
    if w.kind != WitnessKind::Hee {
        return Err(DynamicsError::WrongWitnessKind(w.kind));
    }
    let image: Result<Vec<usize>, DynamicsError> = (0..x.period())
        .map(|i| {
            let (from, to) = (x.at(i as i64), x.at(i as i64 + 1));
            gamma_symbol(&w.d, &w.e, from, to).ok_or(DynamicsError::NoImage { position: i })
        })
        .collect();
    Ok(PeriodicPoint::new(image?))
}

fn gamma_symbol(d: &IntMatrix, e: &IntMatrix, from: usize, to: usize) -> Option<usize> {
    if from >= d.rows() || to >= e.cols() {
        return None;
    }
    let mut hits = (0..d.cols())
        .filter(|&b| d.get(from, b).to_u8() == Some(1) && e.get(b, to).to_u8() == Some(1));
    let first = hits.next()?;
    hits.next().is_none().then_some(first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flip::fixtures::*;

    #[test]
    fn blocks_examples() {
        assert_eq!(
            blocks(&full_two(), 2),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(blocks(&ashley_a(), 2).len(), 16);
        assert_eq!(blocks(&ashley_a(), 1).len(), 8);
        assert_eq!(blocks(&ashley_a(), 0), vec![Vec::<usize>::new()]);
        assert_eq!(
            block_count(&ashley_a(), 5),
            BigInt::from(blocks(&ashley_a(), 5).len())
        );
    }

    #[test]
    fn periodic_counts() {
        assert_eq!(count_periodic(&full_two(), 3, DEFAULT_BUDGET), Ok(8));
        assert_eq!(count_periodic(&ashley_a(), 4, DEFAULT_BUDGET), Ok(16));
        assert_eq!(
            count_periodic(&ashley_a(), 0, DEFAULT_BUDGET),
            Err(DynamicsError::ZeroPeriod)
        );
        assert!(matches!(
            count_periodic(&full_two(), 30, DEFAULT_BUDGET),
            Err(DynamicsError::BudgetExceeded { .. })
        ));
        for m in 1..=10 {
            let via_trace = ashley_a().to_int().pow(m).trace();
            assert_eq!(
                BigInt::from(count_periodic(&ashley_a(), m, DEFAULT_BUDGET).unwrap()),
                via_trace
            );
        }
    }

    #[test]
    fn flip_fixed_counts() {
        assert_eq!(count_flip_fixed(&ashley(), 12, 1, DEFAULT_BUDGET), Ok(80));
        assert_eq!(count_flip_fixed(&bi(), 2, 0, DEFAULT_BUDGET), Ok(4));
        assert_eq!(count_flip_fixed(&bk(), 1, 0, DEFAULT_BUDGET), Ok(0));
    }

    #[test]
    fn point_operations() {
        let x = PeriodicPoint::new(vec![0, 1, 1]);
        assert_eq!(x.shift(1).word, vec![1, 1, 0]);
        assert_eq!(x.shift(-1).word, vec![1, 0, 1]);
        // phi(x)_i = tau(x_{-i}): indices 0, 2, 1
        assert_eq!(x.flip(&bk()).word, vec![1, 0, 0]);
        assert_eq!(x.flip(&bk()).flip(&bk()), x);
    }

    #[test]
    fn higher_block_examples() {
        let h1 = higher_block(&ashley(), 1).unwrap();
        assert_eq!(&h1.pair, &ashley());

        let h = higher_block(&bk(), 2).unwrap();
        assert_eq!(h.pair.size(), 4);
        let i01 = h.index_of(&[0, 1]).unwrap();
        assert_eq!(h.pair.tau()[i01], i01);
        let i00 = h.index_of(&[0, 0]).unwrap();
        assert_eq!(h.pair.tau()[i00], h.index_of(&[1, 1]).unwrap());

        assert_eq!(higher_block(&ashley(), 2).unwrap().pair.size(), 16);
        let dead = validate_flip_pair(ZeroOneMatrix::zeros(2), ZeroOneMatrix::identity(2)).unwrap();
        assert_eq!(higher_block(&dead, 2), Err(DynamicsError::EmptyShift(2)));
    }
}
