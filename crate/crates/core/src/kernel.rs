//! Eventual kernels, normalized cycle bases and flip signatures.
//!
//! A chain `[u_1, ..., u_p]` satisfies `A u_{k+1} = u_k` and `A u_1 = 0`.
//! All bilinear values are `u^T J v` for the flip matrix `J` of the pair.
//! `A` is self-adjoint for this form because `AJ = JA^T`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equivalence::{verify_hee, EquivalenceWitness, WitnessKind};
use crate::flip::{FlipPair, ZeroOneMatrix};
use crate::linalg::{
    in_column_space, is_zero_vector, kernel_basis, rank, rank_of_vectors, ratio, solve, RMatrix,
    RVector, Rational,
};
use crate::zeta::{series_mul, series_power_neg_half};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("vector lengths {left} and {right} do not match the form of size {size}")]
    DimensionMismatch {
        size: usize,
        left: usize,
        right: usize,
    },
    #[error("not a cycle basis of the eventual kernel: {0}")]
    BasisInvalid(String),
    #[error("witness rejected: {0}")]
    WitnessInvalid(String),
}

/// Ordered Jordan chain at eigenvalue zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    vectors: Vec<RVector>,
}

impl Chain {
    /// Chain generated by pushing `terminal` down by `a` until it vanishes.
    pub fn from_terminal(a: &RMatrix, terminal: RVector) -> Self {
        let mut rev = vec![terminal];
        loop {
            let next = a.mul_vec(rev.last().unwrap());
            if is_zero_vector(&next) {
                break;
            }
            rev.push(next);
        }
        rev.reverse();
        Chain { vectors: rev }
    }

    pub fn from_vectors(vectors: Vec<RVector>) -> Self {
        assert!(!vectors.is_empty(), "a chain has at least one vector");
        Chain { vectors }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[RVector] {
        &self.vectors
    }

    pub fn ini(&self) -> &RVector {
        &self.vectors[0]
    }

    pub fn ter(&self) -> &RVector {
        self.vectors.last().unwrap()
    }

    /// `u_{k}`, one-based as in the chain relation.
    pub fn at(&self, k: usize) -> &RVector {
        &self.vectors[k - 1]
    }

    fn satisfies_relations(&self, a: &RMatrix) -> bool {
        is_zero_vector(&a.mul_vec(self.ini()))
            && self.vectors.windows(2).all(|w| a.mul_vec(&w[1]) == w[0])
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationFlags {
    pub nonzero_ends: bool,
    pub anti_diagonal: bool,
    pub orthogonal: bool,
}

impl NormalizationFlags {
    pub fn all(self) -> bool {
        self.nonzero_ends && self.anti_diagonal && self.orthogonal
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleBasis {
    dim: usize,
    chains: Vec<Chain>,
    pub normalized: NormalizationFlags,
}

impl CycleBasis {
    pub fn new(dim: usize, chains: Vec<Chain>) -> Self {
        CycleBasis {
            dim,
            chains,
            normalized: NormalizationFlags::default(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn into_chains(self) -> Vec<Chain> {
        self.chains
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    /// Total number of basis vectors.
    pub fn kernel_dim(&self) -> usize {
        self.chains.iter().map(Chain::len).sum()
    }

    /// Chain lengths, weakly decreasing.
    pub fn lengths(&self) -> Vec<usize> {
        let mut l: Vec<usize> = self.chains.iter().map(Chain::len).collect();
        l.sort_unstable_by(|a, b| b.cmp(a));
        l
    }

    pub fn vectors(&self) -> Vec<RVector> {
        self.chains
            .iter()
            .flat_map(|c| c.vectors.iter().cloned())
            .collect()
    }

    /// Chain indices grouped by length.
    pub fn length_classes(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, c) in self.chains.iter().enumerate() {
            out.entry(c.len()).or_default().push(i);
        }
        out
    }
}

/// `sign(E_p)` for each chain length `p`, plus the sign of the longest class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipSignature {
    pub index_set: Vec<usize>,
    pub signs: BTreeMap<usize, i8>,
    pub leading: i8,
}

impl FlipSignature {
    pub fn trivial() -> Self {
        FlipSignature {
            index_set: vec![0],
            signs: BTreeMap::from([(0, 1)]),
            leading: 1,
        }
    }

    pub fn minus_one_count(&self) -> usize {
        self.signs.values().filter(|&&s| s < 0).count()
    }

    /// Signs in index-set order.
    pub fn tuple(&self) -> Vec<i8> {
        self.index_set.iter().map(|i| self.signs[i]).collect()
    }
}

/// `u^T J v`.
pub fn bilinear(
    j: &ZeroOneMatrix,
    u: &[Rational],
    v: &[Rational],
) -> Result<Rational, KernelError> {
    let n = j.size();
    if u.len() != n || v.len() != n {
        return Err(KernelError::DimensionMismatch {
            size: n,
            left: u.len(),
            right: v.len(),
        });
    }
    let mut acc = Rational::zero();
    for (r, ur) in u.iter().enumerate() {
        if ur.is_zero() {
            continue;
        }
        for c in j.successors(r) {
            acc += ur * &v[c];
        }
    }
    Ok(acc)
}

/// Bilinear value for vectors already known to have the right length.
fn form(p: &FlipPair, u: &[Rational], v: &[Rational]) -> Rational {
    // J is a permutation matrix: (Jv)_r = v_{tau(r)}
    u.iter().zip(p.tau()).map(|(ur, &t)| ur * &v[t]).sum()
}

/// Dimension of the eventual kernel, `n - rank(A^n)`.
pub fn eventual_kernel_dim(a: &ZeroOneMatrix) -> usize {
    let n = a.size();
    n - rank(&a.to_rational().pow(n))
}

/// Jordan chains at zero built top-down from the kernels of `A^k`.
pub fn eventual_kernel(a: &ZeroOneMatrix) -> CycleBasis {
    let n = a.size();
    let am = a.to_rational();
    let mut kernels: Vec<Vec<RVector>> = vec![Vec::new()];
    let mut power = RMatrix::identity(n);
    loop {
        power = power.mul(&am);
        let k = kernel_basis(&power);
        let grew = k.len() > kernels.last().unwrap().len();
        if !grew {
            break;
        }
        kernels.push(k);
    }
    let top = kernels.len() - 1;
    let mut terminals: Vec<(usize, RVector)> = Vec::new();
    for level in (1..=top).rev() {
        // span of ker A^{level-1} and the level-`level` vectors of longer chains
        let mut covered: Vec<RVector> = kernels[level - 1].clone();
        for (len, t) in &terminals {
            let mut v = t.clone();
            for _ in 0..(len - level) {
                v = am.mul_vec(&v);
            }
            covered.push(v);
        }
        let mut current = rank_of_vectors(n, &covered);
        for cand in &kernels[level] {
            covered.push(cand.clone());
            let r = rank_of_vectors(n, &covered);
            if r > current {
                current = r;
                terminals.push((level, cand.clone()));
            } else {
                covered.pop();
            }
        }
    }
    let chains = terminals
        .into_iter()
        .map(|(_, t)| Chain::from_terminal(&am, t))
        .collect();
    CycleBasis::new(n, chains)
}

/// Check that `b` is a cycle basis of the eventual kernel of `p.a()`.
pub fn validate_basis(p: &FlipPair, b: &CycleBasis) -> Result<(), KernelError> {
    let n = p.size();
    if b.dim != n {
        return Err(KernelError::BasisInvalid(format!(
            "ambient dimension {} but alphabet size {n}",
            b.dim
        )));
    }
    let am = p.a().to_rational();
    for (i, c) in b.chains.iter().enumerate() {
        if c.vectors.iter().any(|v| v.len() != n) {
            return Err(KernelError::BasisInvalid(format!(
                "chain {i} has a vector of wrong length"
            )));
        }
        if !c.satisfies_relations(&am) {
            return Err(KernelError::BasisInvalid(format!(
                "chain {i} violates A u_(k+1) = u_k"
            )));
        }
    }
    let vecs = b.vectors();
    let expected = eventual_kernel_dim(p.a());
    if vecs.len() != expected || rank_of_vectors(n, &vecs) != expected {
        return Err(KernelError::BasisInvalid(format!(
            "{} vectors of rank {} for a kernel of dimension {expected}",
            vecs.len(),
            rank_of_vectors(n, &vecs)
        )));
    }
    Ok(())
}

fn ter_order(x: &Chain, y: &Chain) -> std::cmp::Ordering {
    y.len().cmp(&x.len()).then_with(|| x.ter().cmp(y.ter()))
}

/// Normalized cycle basis: nonzero end values, anti-diagonal Gram matrix per
/// chain and mutual orthogonality of distinct chains.
pub fn normalize_basis(p: &FlipPair, b: &CycleBasis) -> Result<CycleBasis, KernelError> {
    validate_basis(p, b)?;
    let am = p.a().to_rational();
    let mut remaining = b.chains.clone();
    let mut finished: Vec<Chain> = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        remaining.sort_by(ter_order);
        let mut alpha = remaining.remove(0);
        let len = alpha.len();

        if form(p, alpha.ini(), alpha.ter()).is_zero() {
            alpha = repair_end_value(p, &am, &alpha, &remaining)?;
        }
        alpha = anti_diagonalize(p, &am, &alpha);

        let a = form(p, alpha.ini(), alpha.ter());
        for beta in remaining.iter_mut() {
            let w = beta.ter();
            let mut z = w.clone();
            for i in 1..=len {
                let c = form(p, alpha.at(i), w);
                if c.is_zero() {
                    continue;
                }
                let s = c / &a;
                for (zi, ui) in z.iter_mut().zip(alpha.at(len + 1 - i)) {
                    *zi -= &s * ui;
                }
            }
            let rebuilt = Chain::from_terminal(&am, z);
            debug_assert_eq!(rebuilt.len(), beta.len());
            *beta = rebuilt;
        }
        finished.push(alpha);
    }
    let mut out = CycleBasis::new(b.dim, finished);
    out.normalized = NormalizationFlags {
        nonzero_ends: true,
        anti_diagonal: true,
        orthogonal: true,
    };
    Ok(out)
}

/// Replace `alpha` by `alpha - k beta` for a same-length `beta`, trying
/// `k = 1, -1, 2, -2, ...`.
fn repair_end_value(
    p: &FlipPair,
    am: &RMatrix,
    alpha: &Chain,
    rest: &[Chain],
) -> Result<Chain, KernelError> {
    let len = alpha.len();
    for beta in rest.iter().filter(|c| c.len() == len) {
        let c = form(p, alpha.ini(), beta.ter());
        let d = form(p, beta.ini(), beta.ter());
        if c.is_zero() && d.is_zero() {
            continue;
        }
        // end value of alpha - k beta is k (k d - 2c); at most one k != 0 fails
        for step in 1i64.. {
            let k = if step % 2 == 1 {
                (step + 1) / 2
            } else {
                -(step / 2)
            };
            let k = Rational::from_integer(k.into());
            if (&k * &d - &c - &c).is_zero() {
                continue;
            }
            let ter: RVector = alpha
                .ter()
                .iter()
                .zip(beta.ter())
                .map(|(x, y)| x - &k * y)
                .collect();
            return Ok(Chain::from_terminal(am, ter));
        }
    }
    Err(KernelError::BasisInvalid(
        "restricted form is degenerate; basis does not span a nondegenerate subspace".into(),
    ))
}

/// New terminal `f(A) u_p` with `f^2 = b_1 / P`, where
/// `P(x) = sum_d <u_p, u_{d+1}> x^d`, makes the Gram matrix `b_1` times the
/// anti-identity.
fn anti_diagonalize(p: &FlipPair, am: &RMatrix, alpha: &Chain) -> Chain {
    let len = alpha.len();
    let ter = alpha.ter();
    let b1 = form(p, alpha.ini(), ter);
    let scaled: Vec<Rational> = (1..=len).map(|d| form(p, ter, alpha.at(d)) / &b1).collect();
    if scaled.iter().skip(1).all(Zero::is_zero) {
        return alpha.clone();
    }
    let f = series_power_neg_half(&scaled, len - 1);
    debug_assert!({
        let sq = series_mul(&f, &f, len - 1);
        series_mul(&sq, &scaled, len - 1)
            .iter()
            .enumerate()
            .all(|(i, x)| if i == 0 { x.is_one() } else { x.is_zero() })
    });
    let mut w = vec![Rational::zero(); ter.len()];
    for (m, fm) in f.iter().enumerate() {
        if fm.is_zero() {
            continue;
        }
        for (wi, ui) in w.iter_mut().zip(alpha.at(len - m)) {
            *wi += fm * ui;
        }
    }
    Chain::from_terminal(am, w)
}

/// Which normalization properties a basis actually has.
pub fn check_normalization(p: &FlipPair, b: &CycleBasis) -> NormalizationFlags {
    let nonzero_ends = b
        .chains
        .iter()
        .all(|c| !form(p, c.ini(), c.ter()).is_zero());
    let anti_diagonal = b.chains.iter().all(|c| {
        let len = c.len();
        let corner = form(p, c.ini(), c.ter());
        (1..=len).all(|i| {
            (1..=len).all(|j| {
                let g = form(p, c.at(i), c.at(j));
                if i + j == len + 1 {
                    g == corner
                } else {
                    g.is_zero()
                }
            })
        })
    });
    let orthogonal = b.chains.iter().enumerate().all(|(x, cx)| {
        b.chains.iter().skip(x + 1).all(|cy| {
            cx.vectors
                .iter()
                .all(|u| cy.vectors.iter().all(|v| form(p, u, v).is_zero()))
        })
    });
    NormalizationFlags {
        nonzero_ends,
        anti_diagonal,
        orthogonal,
    }
}

/// Gram matrix of the chains of one length class under the flip form.
pub fn class_gram(p: &FlipPair, b: &CycleBasis, length: usize) -> RMatrix {
    let vecs: Vec<&RVector> = b
        .chains
        .iter()
        .filter(|c| c.len() == length)
        .flat_map(|c| c.vectors.iter())
        .collect();
    let k = vecs.len();
    let mut g = RMatrix::zeros(k, k);
    for (r, u) in vecs.iter().enumerate() {
        for (c, v) in vecs.iter().enumerate() {
            g.set(r, c, form(p, u, v));
        }
    }
    g
}

/// Signature of an already normalized basis.
pub fn signature_of_basis(p: &FlipPair, b: &CycleBasis) -> Result<FlipSignature, KernelError> {
    if b.is_empty() {
        return Ok(FlipSignature::trivial());
    }
    let mut signs: BTreeMap<usize, i8> = BTreeMap::new();
    for c in &b.chains {
        let v = form(p, c.ini(), c.ter());
        if v.is_zero() {
            return Err(KernelError::BasisInvalid(
                "chain with zero end value; normalize first".into(),
            ));
        }
        let s: i8 = if v.is_positive() { 1 } else { -1 };
        *signs.entry(c.len()).or_insert(1) *= s;
    }
    let index_set: Vec<usize> = signs.keys().copied().collect();
    let leading = signs[index_set.last().unwrap()];
    Ok(FlipSignature {
        index_set,
        signs,
        leading,
    })
}

pub fn flip_signature(p: &FlipPair) -> FlipSignature {
    let basis = eventual_kernel(p.a());
    let normalized = normalize_basis(p, &basis).expect("eventual_kernel returns a valid basis");
    signature_of_basis(p, &normalized).expect("normalized basis has nonzero end values")
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

/// Another cycle basis of the same kernel, drawn from `seed`. Terminals of
/// each length class are mixed by a random invertible matrix and perturbed
/// by random multiples of lower-or-equal height vectors of other classes.
pub fn scramble_basis(a: &ZeroOneMatrix, b: &CycleBasis, seed: u64) -> CycleBasis {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let am = a.to_rational();
    let classes = b.length_classes();
    let mut chains = Vec::with_capacity(b.chains.len());
    for (&len, members) in &classes {
        let r = members.len();
        let mix = loop {
            let m = RMatrix::from_vec(
                r,
                r,
                (0..r * r).map(|_| random_rational(&mut rng)).collect(),
            );
            if rank(&m) == r {
                break m;
            }
        };
        for row in 0..r {
            let mut t = vec![Rational::zero(); b.dim];
            for (col, &ci) in members.iter().enumerate() {
                let s = mix.get(row, col);
                for (x, y) in t.iter_mut().zip(b.chains[ci].ter()) {
                    *x += s * y;
                }
            }
            for other in &b.chains {
                for k in 1..=other.len().min(len) {
                    // same-class terminals are already mixed by `mix`
                    if other.len() == len && k == len {
                        continue;
                    }
                    if rng.gen_bool(0.5) {
                        let s = random_rational(&mut rng);
                        for (x, y) in t.iter_mut().zip(other.at(k)) {
                            *x += &s * y;
                        }
                    }
                }
            }
            chains.push(Chain::from_terminal(&am, t));
        }
    }
    chains.reverse();
    CycleBasis::new(b.dim, chains)
}

/// Chains of each length whose terminal is or is not in the column space of
/// the witness's `D`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundaryPartition {
    pub plus: BTreeMap<usize, Vec<usize>>,
    pub minus: BTreeMap<usize, Vec<usize>>,
}

impl BoundaryPartition {
    pub fn is_empty(&self) -> bool {
        self.plus.is_empty() && self.minus.is_empty()
    }
}

pub fn boundary_decomposition(
    p: &FlipPair,
    q: &FlipPair,
    w: &EquivalenceWitness,
    b: &CycleBasis,
) -> Result<BoundaryPartition, KernelError> {
    if w.kind != WitnessKind::Hee {
        return Err(KernelError::WitnessInvalid(format!(
            "expected an HEE, got {:?}",
            w.kind
        )));
    }
    verify_hee(p, q, &w.d, &w.e).map_err(|e| KernelError::WitnessInvalid(e.to_string()))?;
    validate_basis(p, b)?;
    let d = w.d.to_rational();
    let mut out = BoundaryPartition::default();
    for (i, c) in b.chains.iter().enumerate() {
        let side = if in_column_space(&d, c.ter()) {
            &mut out.plus
        } else {
            &mut out.minus
        };
        side.entry(c.len()).or_default().push(i);
    }
    Ok(out)
}

/// For a chain whose terminal is `D x`, the codomain chain
/// `(E u_1, ..., E u_p, x)` of length `p + 1`.
pub fn lifted_chain(w: &EquivalenceWitness, alpha: &Chain) -> Option<Chain> {
    let d = w.d.to_rational();
    let e = w.e.to_rational();
    let x = solve(&d, alpha.ter())?;
    let mut vectors: Vec<RVector> = alpha.vectors.iter().map(|u| e.mul_vec(u)).collect();
    vectors.push(x);
    Some(Chain::from_vectors(vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flip::fixtures::*;
    use crate::flip::validate_flip_pair;
    use crate::linalg::rational;

    fn rv(xs: &[i64]) -> RVector {
        xs.iter().map(|&x| rational(x)).collect()
    }

    #[test]
    fn bilinear_examples() {
        let u = rv(&[1, -1]);
        assert_eq!(bilinear(&swap2(), &u, &u).unwrap(), rational(-2));
        assert_eq!(
            bilinear(&ZeroOneMatrix::identity(2), &u, &u).unwrap(),
            rational(2)
        );
        assert!(bilinear(&swap2(), &rv(&[0, 0]), &u).unwrap().is_zero());
        assert!(matches!(
            bilinear(&swap2(), &rv(&[1]), &u),
            Err(KernelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eventual_kernel_examples() {
        let k = eventual_kernel(ashley().a());
        assert_eq!(k.lengths(), vec![6, 1]);
        assert_eq!(k.kernel_dim(), 7);
        validate_basis(&ashley(), &k).unwrap();

        let b = eventual_kernel(&full_two());
        assert_eq!(b.lengths(), vec![1]);
        let v = b.chains()[0].ter();
        assert_eq!(v[0], -v[1].clone());

        assert!(eventual_kernel(&ZeroOneMatrix::identity(3)).is_empty());
        assert_eq!(
            eventual_kernel(&ZeroOneMatrix::zeros(3)).lengths(),
            vec![1, 1, 1]
        );
    }

    #[test]
    fn normalize_examples() {
        let p = ashley();
        let nb = normalize_basis(&p, &eventual_kernel(p.a())).unwrap();
        assert_eq!(nb.lengths(), vec![6, 1]);
        assert!(check_normalization(&p, &nb).all());

        let bk_basis = eventual_kernel(bk().a());
        let nb = normalize_basis(&bk(), &bk_basis).unwrap();
        assert_eq!(
            form(&bk(), nb.chains()[0].ini(), nb.chains()[0].ter()),
            rational(-2)
        );
        assert_eq!(nb.chains(), bk_basis.chains());

        let empty = CycleBasis::new(3, Vec::new());
        let id =
            validate_flip_pair(ZeroOneMatrix::identity(3), ZeroOneMatrix::identity(3)).unwrap();
        assert!(normalize_basis(&id, &empty).unwrap().is_empty());
    }

    #[test]
    fn normalize_rejects_non_basis() {
        let p = ashley();
        let mut chains = eventual_kernel(p.a()).into_chains();
        chains.pop();
        assert!(matches!(
            normalize_basis(&p, &CycleBasis::new(8, chains)),
            Err(KernelError::BasisInvalid(_))
        ));
    }

    #[test]
    fn repairs_zero_end_values_on_zero_matrix() {
        // A = 0 with tau = (0 1): e_0 and e_1 are isotropic, their mix is not
        let p = validate_flip_pair(ZeroOneMatrix::zeros(2), swap2()).unwrap();
        let basis = eventual_kernel(p.a());
        assert!(!check_normalization(&p, &basis).nonzero_ends);
        let nb = normalize_basis(&p, &basis).unwrap();
        assert!(check_normalization(&p, &nb).all());
        // hyperbolic plane: one positive, one negative end value
        let sig = signature_of_basis(&p, &nb).unwrap();
        assert_eq!(sig.signs[&1], -1);
    }

    #[test]
    fn signature_examples() {
        let s = flip_signature(&ashley());
        assert_eq!(s.index_set, vec![1, 6]);
        assert_eq!(s.tuple(), vec![-1, 1]);
        assert_eq!(s.leading, 1);
        assert_eq!(flip_signature(&bi()).tuple(), vec![1]);
        assert_eq!(flip_signature(&bk()).tuple(), vec![-1]);
        let perm = validate_flip_pair(swap2(), ZeroOneMatrix::identity(2)).unwrap();
        assert_eq!(flip_signature(&perm), FlipSignature::trivial());
    }

    #[test]
    fn scrambled_bases_are_bases_with_same_signature() {
        let p = ashley();
        let base = eventual_kernel(p.a());
        let reference = flip_signature(&p);
        for seed in 0..5 {
            let s = scramble_basis(p.a(), &base, seed);
            validate_basis(&p, &s).unwrap();
            assert_ne!(s.chains(), base.chains());
            let nb = normalize_basis(&p, &s).unwrap();
            assert!(check_normalization(&p, &nb).all());
            assert_eq!(signature_of_basis(&p, &nb).unwrap(), reference);
        }
    }

    #[test]
    fn class_gram_is_nonsingular() {
        let p = ashley();
        let nb = normalize_basis(&p, &eventual_kernel(p.a())).unwrap();
        for len in [1, 6] {
            let g = class_gram(&p, &nb, len);
            assert_eq!(rank(&g), len);
        }
    }
}
