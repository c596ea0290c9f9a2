//! Equivalences between flip pairs: half elementary equivalences (HEE),
//! chains of them, shift equivalences (SE), and certificates of
//! non-conjugacy.
//!
//! An HEE `(D, E)` from `(A, J)` to `(B, K)` is a pair of zero-one matrices
//! with `A = DE`, `B = ED` and `E = K D^T J`. An SE of lag `l` relaxes this
//! to nonnegative integer matrices with `A^l = DE`, `B^l = ED`, `AD = DB`
//! and the same formula for `E`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{blocks, periodic_points, DynamicsError, PeriodicPoint};
use crate::flip::{flip_block, validate_flip_pair, FlipPair, ZeroOneMatrix};
use crate::kernel::{bilinear, flip_signature, FlipSignature};
use crate::linalg::{
    jordan_profile, kernel_basis, IntMatrix, IntPolynomial, JordanProfile, Rational,
};
use crate::zeta::{lind_zeta, series_equal};

/// Default bound on `|A| * |B|` for [`search_hee`].
pub const DEFAULT_SEARCH_CELLS: usize = 64;
/// Default bound on visited search nodes.
pub const DEFAULT_SEARCH_NODES: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WitnessKind {
    #[serde(rename = "HEE")]
    Hee,
    #[serde(rename = "SSE")]
    SseChain,
    #[serde(rename = "SE")]
    Se,
}

/// The identity a candidate witness failed, in checking order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Identity {
    Shape,
    ZeroOne,
    Nonnegative,
    /// `E = K D^T J`
    EFormula,
    /// `A = DE`, or `A^l = DE` for an SE
    ADe,
    /// `B = ED`, or `B^l = ED` for an SE
    BEd,
    /// `AD = DB`
    Intertwining,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Identity::Shape => "matrix shapes",
            Identity::ZeroOne => "zero-one entries",
            Identity::Nonnegative => "nonnegative entries",
            Identity::EFormula => "E = K D^T J",
            Identity::ADe => "A^l = DE",
            Identity::BEd => "B^l = ED",
            Identity::Intertwining => "AD = DB",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivalenceError {
    #[error("identity fails: {0}")]
    IdentityFails(Identity),
    #[error("search visited {nodes} nodes without finishing")]
    SearchBudgetExceeded { nodes: u64 },
    #[error("search size {cells} cells exceeds the limit {limit}")]
    SizeLimit { cells: usize, limit: usize },
    #[error("chain links do not compose: {0}")]
    ChainMismatch(String),
    #[error("block map is not a flip conjugacy: {0}")]
    NotAConjugacy(String),
    #[error("inverse window {0} does not determine the preimage symbol")]
    WindowTooSmall(usize),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub kind: WitnessKind,
    pub d: IntMatrix,
    pub e: IntMatrix,
    pub lag: usize,
    pub chain: Option<Vec<(IntMatrix, IntMatrix)>>,
}

impl EquivalenceWitness {
    pub fn hee(d: IntMatrix, e: IntMatrix) -> Self {
        EquivalenceWitness {
            kind: WitnessKind::Hee,
            d,
            e,
            lag: 1,
            chain: None,
        }
    }

    /// `(E, D)`, an HEE from the codomain back to the domain.
    pub fn reversed(&self) -> Self {
        EquivalenceWitness {
            kind: self.kind,
            d: self.e.clone(),
            e: self.d.clone(),
            lag: self.lag,
            chain: None,
        }
    }
}

/// `K D^T J`, the only admissible partner of `D`.
pub fn e_from_d(p: &FlipPair, q: &FlipPair, d: &IntMatrix) -> IntMatrix {
    let (m, n) = (d.rows(), d.cols());
    let mut e = IntMatrix::zeros(n, m);
    for b in 0..n {
        for a in 0..m {
            e.set(b, a, d.get(p.tau()[a], q.tau()[b]).clone());
        }
    }
    e
}

/// `J E^T K`; inverse of [`e_from_d`].
pub fn d_from_e(p: &FlipPair, q: &FlipPair, e: &IntMatrix) -> IntMatrix {
    let (n, m) = (e.rows(), e.cols());
    let mut d = IntMatrix::zeros(m, n);
    for a in 0..m {
        for b in 0..n {
            d.set(a, b, e.get(q.tau()[b], p.tau()[a]).clone());
        }
    }
    d
}

fn check_shapes(
    p: &FlipPair,
    q: &FlipPair,
    d: &IntMatrix,
    e: &IntMatrix,
) -> Result<(), EquivalenceError> {
    let (m, n) = (p.size(), q.size());
    if (d.rows(), d.cols(), e.rows(), e.cols()) != (m, n, n, m) {
        return Err(EquivalenceError::IdentityFails(Identity::Shape));
    }
    Ok(())
}

pub fn verify_hee(
    p: &FlipPair,
    q: &FlipPair,
    d: &IntMatrix,
    e: &IntMatrix,
) -> Result<EquivalenceWitness, EquivalenceError> {
    check_shapes(p, q, d, e)?;
    if !d.is_zero_one() || !e.is_zero_one() {
        return Err(EquivalenceError::IdentityFails(Identity::ZeroOne));
    }
    if &e_from_d(p, q, d) != e {
        return Err(EquivalenceError::IdentityFails(Identity::EFormula));
    }
    if d.mul(e) != p.a().to_int() {
        return Err(EquivalenceError::IdentityFails(Identity::ADe));
    }
    if e.mul(d) != q.a().to_int() {
        return Err(EquivalenceError::IdentityFails(Identity::BEd));
    }
    Ok(EquivalenceWitness::hee(d.clone(), e.clone()))
}

pub fn verify_se(
    p: &FlipPair,
    q: &FlipPair,
    d: &IntMatrix,
    e: &IntMatrix,
    lag: usize,
) -> Result<EquivalenceWitness, EquivalenceError> {
    check_shapes(p, q, d, e)?;
    if lag == 0 {
        return Err(EquivalenceError::IdentityFails(Identity::Shape));
    }
    if !d.is_nonnegative() || !e.is_nonnegative() {
        return Err(EquivalenceError::IdentityFails(Identity::Nonnegative));
    }
    if &e_from_d(p, q, d) != e {
        return Err(EquivalenceError::IdentityFails(Identity::EFormula));
    }
    let a = p.a().to_int();
    let b = q.a().to_int();
    if d.mul(e) != a.pow(lag) {
        return Err(EquivalenceError::IdentityFails(Identity::ADe));
    }
    if e.mul(d) != b.pow(lag) {
        return Err(EquivalenceError::IdentityFails(Identity::BEd));
    }
    if a.mul(d) != d.mul(&b) {
        return Err(EquivalenceError::IdentityFails(Identity::Intertwining));
    }
    Ok(EquivalenceWitness {
        kind: WitnessKind::Se,
        d: d.clone(),
        e: e.clone(),
        lag,
        chain: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub max_cells: usize,
    pub max_nodes: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_cells: DEFAULT_SEARCH_CELLS,
            max_nodes: DEFAULT_SEARCH_NODES,
        }
    }
}

/// One entry of `DE = A` or `ED = B`: the number of terms whose two `D`
/// cells are both one must equal `target`.
struct EntryConstraint {
    target: bool,
    terms: Vec<(usize, usize)>,
}

/// Partial zero-one `D` (row-major, `None` unassigned) with unit propagation
/// over entry constraints. `E` cells are read through `E(b, a) = D(tau a, tau b)`.
struct HeeSearch {
    m: usize,
    n: usize,
    cells: Vec<Option<bool>>,
    trail: Vec<usize>,
    constraints: Vec<EntryConstraint>,
    watching: Vec<Vec<usize>>,
    nodes: u64,
    max_nodes: u64,
}

impl HeeSearch {
    fn new(p: &FlipPair, q: &FlipPair, max_nodes: u64) -> Self {
        let (m, n) = (p.size(), q.size());
        let (tp, tq) = (p.tau(), q.tau());
        let d = |a: usize, b: usize| a * n + b;
        let e = |b: usize, a: usize| d(tp[a], tq[b]);
        let mut constraints = Vec::with_capacity(m * m + n * n);
        for x in 0..m {
            for y in 0..m {
                constraints.push(EntryConstraint {
                    target: p.a().get(x, y),
                    terms: (0..n).map(|c| (d(x, c), e(c, y))).collect(),
                });
            }
        }
        for c in 0..n {
            for c2 in 0..n {
                constraints.push(EntryConstraint {
                    target: q.a().get(c, c2),
                    terms: (0..m).map(|x| (e(c, x), d(x, c2))).collect(),
                });
            }
        }
        let mut watching = vec![Vec::new(); m * n];
        for (i, con) in constraints.iter().enumerate() {
            for &(u, v) in &con.terms {
                for cell in [u, v] {
                    if watching[cell].last() != Some(&i) {
                        watching[cell].push(i);
                    }
                }
            }
        }
        HeeSearch {
            m,
            n,
            cells: vec![None; m * n],
            trail: Vec::new(),
            constraints,
            watching,
            nodes: 0,
            max_nodes,
        }
    }

    fn undo_to(&mut self, mark: usize) {
        for cell in self.trail.drain(mark..) {
            self.cells[cell] = None;
        }
    }

    /// Assigns `cell` and everything it forces; `false` on a conflict.
    fn assign(&mut self, cell: usize, value: bool) -> bool {
        let mut queue = vec![(cell, value)];
        while let Some((c, v)) = queue.pop() {
            match self.cells[c] {
                Some(old) if old == v => continue,
                Some(_) => return false,
                None => {
                    self.cells[c] = Some(v);
                    self.trail.push(c);
                }
            }
            for &ci in &self.watching[c] {
                if !self.settle(ci, &mut queue) {
                    return false;
                }
            }
        }
        true
    }

    /// Checks one constraint and queues the cells it forces.
    fn settle(&self, ci: usize, queue: &mut Vec<(usize, bool)>) -> bool {
        let con = &self.constraints[ci];
        let target = con.target as u32;
        let (mut lo, mut open, mut last_open) = (0u32, 0u32, None);
        for &(u, v) in &con.terms {
            match (self.cells[u], self.cells[v]) {
                (Some(false), _) | (_, Some(false)) => {}
                (Some(true), Some(true)) => lo += 1,
                _ => {
                    open += 1;
                    last_open = Some((u, v));
                }
            }
        }
        if lo > target || lo + open < target {
            return false;
        }
        if lo == target {
            // every open term must vanish; force it where one side is known
            for &(u, v) in &con.terms {
                match (self.cells[u], self.cells[v]) {
                    (Some(true), None) => queue.push((v, false)),
                    (None, Some(true)) => queue.push((u, false)),
                    (None, None) if u == v => queue.push((u, false)),
                    _ => {}
                }
            }
        } else if open == 1 {
            let (u, v) = last_open.expect("one open term");
            queue.push((u, true));
            queue.push((v, true));
        }
        true
    }

    /// Cells in column-major order, zero tried before one.
    fn run(&mut self, k: usize) -> Result<bool, EquivalenceError> {
        if k == self.m * self.n {
            return Ok(true);
        }
        let cell = (k % self.m) * self.n + k / self.m;
        if self.cells[cell].is_some() {
            return self.run(k + 1);
        }
        for v in [false, true] {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(EquivalenceError::SearchBudgetExceeded { nodes: self.nodes });
            }
            let mark = self.trail.len();
            if self.assign(cell, v) && self.run(k + 1)? {
                return Ok(true);
            }
            self.undo_to(mark);
        }
        Ok(false)
    }
}

/// The first HEE from `p` to `q` with `D` ordered column-major, zero before
/// one. `Ok(None)` proves that no HEE exists.
pub fn search_hee(
    p: &FlipPair,
    q: &FlipPair,
    opts: SearchOptions,
) -> Result<Option<EquivalenceWitness>, EquivalenceError> {
    let (m, n) = (p.size(), q.size());
    if m * n > opts.max_cells {
        return Err(EquivalenceError::SizeLimit {
            cells: m * n,
            limit: opts.max_cells,
        });
    }
    let mut s = HeeSearch::new(p, q, opts.max_nodes);
    if !s.run(0)? {
        return Ok(None);
    }
    let d = IntMatrix::from_vec(
        m,
        n,
        s.cells
            .iter()
            .map(|c| BigInt::from(c.expect("complete assignment") as u8))
            .collect(),
    );
    let e = e_from_d(p, q, &d);
    verify_hee(p, q, &d, &e).map(Some)
}

/// Search for an SE of the given lag with entries in `0..=max_entry`.
/// Exploratory only; exponential in `|A| * |B|`.
pub fn search_se(
    p: &FlipPair,
    q: &FlipPair,
    lag: usize,
    max_entry: u32,
    opts: SearchOptions,
) -> Result<Option<EquivalenceWitness>, EquivalenceError> {
    let (m, n) = (p.size(), q.size());
    if m * n > opts.max_cells {
        return Err(EquivalenceError::SizeLimit {
            cells: m * n,
            limit: opts.max_cells,
        });
    }
    let al = p.a().to_int().pow(lag);
    let bl = q.a().to_int().pow(lag);
    let mut cells: Vec<Option<u32>> = vec![None; m * n];
    let mut nodes = 0u64;

    // partial DE sums may only grow, so any overshoot prunes
    fn bounded(
        p: &FlipPair,
        q: &FlipPair,
        cells: &[Option<u32>],
        m: usize,
        n: usize,
        al: &IntMatrix,
        bl: &IntMatrix,
    ) -> bool {
        let d = |a: usize, b: usize| cells[a * n + b];
        let e = |b: usize, a: usize| cells[p.tau()[a] * n + q.tau()[b]];
        for x in 0..m {
            for y in 0..m {
                let s: u64 = (0..n)
                    .filter_map(|c| Some(d(x, c)? as u64 * e(c, y)? as u64))
                    .sum();
                if BigInt::from(s) > *al.get(x, y) {
                    return false;
                }
            }
        }
        for c in 0..n {
            for c2 in 0..n {
                let s: u64 = (0..m)
                    .filter_map(|x| Some(e(c, x)? as u64 * d(x, c2)? as u64))
                    .sum();
                if BigInt::from(s) > *bl.get(c, c2) {
                    return false;
                }
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn go(
        k: usize,
        p: &FlipPair,
        q: &FlipPair,
        cells: &mut Vec<Option<u32>>,
        m: usize,
        n: usize,
        al: &IntMatrix,
        bl: &IntMatrix,
        max_entry: u32,
        lag: usize,
        nodes: &mut u64,
        max_nodes: u64,
    ) -> Result<Option<EquivalenceWitness>, EquivalenceError> {
        if k == m * n {
            let d = IntMatrix::from_vec(
                m,
                n,
                cells.iter().map(|c| BigInt::from(c.unwrap())).collect(),
            );
            let e = e_from_d(p, q, &d);
            return Ok(verify_se(p, q, &d, &e, lag).ok());
        }
        let (a, b) = (k % m, k / m);
        for v in 0..=max_entry {
            *nodes += 1;
            if *nodes > max_nodes {
                return Err(EquivalenceError::SearchBudgetExceeded { nodes: *nodes });
            }
            cells[a * n + b] = Some(v);
            if bounded(p, q, cells, m, n, al, bl) {
                if let Some(w) = go(
                    k + 1,
                    p,
                    q,
                    cells,
                    m,
                    n,
                    al,
                    bl,
                    max_entry,
                    lag,
                    nodes,
                    max_nodes,
                )? {
                    return Ok(Some(w));
                }
            }
        }
        cells[a * n + b] = None;
        Ok(None)
    }

    go(
        0,
        p,
        q,
        &mut cells,
        m,
        n,
        &al,
        &bl,
        max_entry,
        lag,
        &mut nodes,
        opts.max_nodes,
    )
}

/// Flip pairs `pairs[0] -> ... -> pairs[l]` joined by HEE links.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SseChain {
    pub pairs: Vec<FlipPair>,
    pub links: Vec<EquivalenceWitness>,
}

impl SseChain {
    pub fn lag(&self) -> usize {
        self.links.len()
    }

    pub fn verify(&self) -> Result<(), EquivalenceError> {
        if self.pairs.len() != self.links.len() + 1 {
            return Err(EquivalenceError::ChainMismatch(format!(
                "{} pairs for {} links",
                self.pairs.len(),
                self.links.len()
            )));
        }
        for (k, link) in self.links.iter().enumerate() {
            verify_hee(&self.pairs[k], &self.pairs[k + 1], &link.d, &link.e)
                .map_err(|e| EquivalenceError::ChainMismatch(format!("link {k}: {e}")))?;
        }
        Ok(())
    }

    /// The chain as a single witness of kind SSE; `d`, `e` hold the products.
    pub fn as_witness(&self) -> Result<EquivalenceWitness, EquivalenceError> {
        let se = compose_sse(self)?;
        Ok(EquivalenceWitness {
            kind: WitnessKind::SseChain,
            chain: Some(
                self.links
                    .iter()
                    .map(|l| (l.d.clone(), l.e.clone()))
                    .collect(),
            ),
            ..se
        })
    }
}

/// `D = D_1 ... D_l`, `E = E_l ... E_1`.
pub fn compose_sse(chain: &SseChain) -> Result<EquivalenceWitness, EquivalenceError> {
    if chain.links.is_empty() {
        return Err(EquivalenceError::ChainMismatch("empty chain".into()));
    }
    chain.verify()?;
    let mut d = chain.links[0].d.clone();
    let mut e = chain.links[0].e.clone();
    for link in &chain.links[1..] {
        d = d.mul(&link.d);
        e = link.e.mul(&e);
    }
    let first = &chain.pairs[0];
    let last = chain.pairs.last().unwrap();
    verify_se(first, last, &d, &e, chain.lag())
}

/// `D_k(u, v) = [u = i_k(v)]` and `E_k(v, u) = [u = t_k(v)]` on the
/// `k`- and `(k+1)`-block alphabets, for `k = 1..n-1`.
pub fn higher_block_chain(p: &FlipPair, n: usize) -> Result<SseChain, EquivalenceError> {
    assert!(n >= 1, "block length must be positive");
    let mut pairs = vec![p.clone()];
    let mut links = Vec::with_capacity(n.saturating_sub(1));
    let mut labels = blocks(p.a(), 1);
    for k in 1..n {
        let next = crate::dynamics::higher_block(p, k + 1)?;
        let (rows, cols) = (labels.len(), next.blocks.len());
        let mut d = IntMatrix::zeros(rows, cols);
        let mut e = IntMatrix::zeros(cols, rows);
        let find = |w: &[usize]| labels.binary_search_by(|x| x.as_slice().cmp(w)).ok();
        for (vi, v) in next.blocks.iter().enumerate() {
            if let Some(ui) = find(&v[..k]) {
                d.set(ui, vi, BigInt::one());
            }
            if let Some(ui) = find(&v[1..]) {
                e.set(vi, ui, BigInt::one());
            }
        }
        let w = verify_hee(pairs.last().unwrap(), &next.pair, &d, &e)?;
        links.push(w);
        pairs.push(next.pair);
        labels = next.blocks;
    }
    Ok(SseChain { pairs, links })
}

/// Symbol of the `k`-th alphabet: `u Psi(w) v` with `u`, `v` words of the
/// target shift and `w` a word of the source shift.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub u: Vec<usize>,
    pub w: Vec<usize>,
    pub v: Vec<usize>,
}

impl Triple {
    fn image(&self, psi: &[usize]) -> Vec<usize> {
        let mut out = self.u.clone();
        out.extend(self.w.iter().map(|&s| psi[s]));
        out.extend_from_slice(&self.v);
        out
    }

    /// Source-side word with the target words in place, for ordering.
    fn key(&self) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        (self.u.clone(), self.w.clone(), self.v.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropAChain {
    pub alphabets: Vec<Vec<Triple>>,
    pub chain: SseChain,
}

fn validate_block_map(
    p: &FlipPair,
    q: &FlipPair,
    psi: &[usize],
    window: usize,
    budget: u64,
) -> Result<(), EquivalenceError> {
    let bad = |s: String| Err(EquivalenceError::NotAConjugacy(s));
    if psi.len() != p.size() {
        return bad(format!(
            "map has {} entries for {} symbols",
            psi.len(),
            p.size()
        ));
    }
    if let Some(s) = psi.iter().find(|&&s| s >= q.size()) {
        return bad(format!("image symbol {s} out of range"));
    }
    for a in 0..p.size() {
        if psi[p.tau()[a]] != q.tau()[psi[a]] {
            return bad(format!("map does not commute with the flips at symbol {a}"));
        }
        for b in p.a().successors(a) {
            if !q.a().get(psi[a], psi[b]) {
                return bad(format!("transition {a}{b} maps outside the target shift"));
            }
        }
    }
    let m = window as i64;
    let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for period in 1..=2 * window + 1 {
        let xs = periodic_points(p.a(), period, budget)?;
        let target = periodic_points(q.a(), period, budget)?;
        let mut images: Vec<PeriodicPoint> = xs
            .iter()
            .map(|x| PeriodicPoint::new(x.word.iter().map(|&s| psi[s]).collect()))
            .collect();
        images.sort();
        images.dedup();
        if images.len() != xs.len() || images.len() != target.len() {
            return bad(format!("not a bijection on points of period {period}"));
        }
        for x in &xs {
            for i in 0..period as i64 {
                let key: Vec<usize> = (i - m..=i + m).map(|t| psi[x.at(t)]).collect();
                let sym = x.at(i);
                if *seen.entry(key).or_insert(sym) != sym {
                    return Err(EquivalenceError::WindowTooSmall(window));
                }
            }
        }
    }
    Ok(())
}

/// The alphabets `A_1..A_{2m+1}` and the HEE links between consecutive
/// pairs built from a one-block flip conjugacy `psi` whose inverse has
/// window `2m+1`.
pub fn prop_a_chain(
    p: &FlipPair,
    q: &FlipPair,
    psi: &[usize],
    m: usize,
    budget: u64,
) -> Result<PropAChain, EquivalenceError> {
    validate_block_map(p, q, psi, m, budget)?;
    let alphabets: Vec<Vec<Triple>> = (1..=2 * m + 1).map(|k| alphabet(p, q, psi, k)).collect();
    let mut pairs = Vec::with_capacity(alphabets.len());
    for (k, alpha) in alphabets.iter().enumerate() {
        pairs.push(triple_pair(p, q, psi, alpha, k + 1)?);
    }
    let mut links = Vec::with_capacity(2 * m);
    for k in 0..2 * m {
        let (small, big) = (&alphabets[k], &alphabets[k + 1]);
        let len = k + 1;
        let mut r = IntMatrix::zeros(small.len(), big.len());
        let mut s = IntMatrix::zeros(big.len(), small.len());
        for (xi, x) in small.iter().enumerate() {
            let xw = x.image(psi);
            for (yi, y) in big.iter().enumerate() {
                let yw = y.image(psi);
                if xw[..] == yw[..len] && x.w.last() == y.w.first() {
                    r.set(xi, yi, BigInt::one());
                }
                if yw[1..] == xw[..] && y.w.last() == x.w.first() {
                    s.set(yi, xi, BigInt::one());
                }
            }
        }
        links.push(verify_hee(&pairs[k], &pairs[k + 1], &r, &s)?);
    }
    Ok(PropAChain {
        alphabets,
        chain: SseChain { pairs, links },
    })
}

fn alphabet(p: &FlipPair, q: &FlipPair, psi: &[usize], k: usize) -> Vec<Triple> {
    let i = (k - 1) / 2;
    let j = k - 2 * i;
    let mut out = Vec::new();
    let sources = blocks(p.a(), j);
    for word in blocks(q.a(), k) {
        for w in &sources {
            if w.iter().zip(&word[i..i + j]).all(|(&s, &t)| psi[s] == t) {
                out.push(Triple {
                    u: word[..i].to_vec(),
                    w: w.clone(),
                    v: word[i + j..].to_vec(),
                });
            }
        }
    }
    out.sort_by_key(Triple::key);
    out
}

fn triple_pair(
    p: &FlipPair,
    q: &FlipPair,
    psi: &[usize],
    alpha: &[Triple],
    k: usize,
) -> Result<FlipPair, EquivalenceError> {
    let size = alpha.len();
    let index: BTreeMap<&Triple, usize> = alpha.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut mk = ZeroOneMatrix::zeros(size);
    let mut fk = ZeroOneMatrix::zeros(size);
    for (xi, x) in alpha.iter().enumerate() {
        let xw = x.image(psi);
        for (yi, y) in alpha.iter().enumerate() {
            let yw = y.image(psi);
            let overlap = xw[1..] == yw[..k - 1];
            let source_step = if x.w.len() == 1 {
                p.a().get(x.w[0], y.w[0])
            } else {
                x.w[1..] == y.w[..x.w.len() - 1]
            };
            if overlap && source_step {
                mk.set(xi, yi, true);
            }
        }
        let image = Triple {
            u: flip_block(q, &x.v).expect("in range"),
            w: flip_block(p, &x.w).expect("in range"),
            v: flip_block(q, &x.u).expect("in range"),
        };
        let yi = *index
            .get(&image)
            .ok_or_else(|| EquivalenceError::NotAConjugacy("flip leaves the alphabet".into()))?;
        fk.set(xi, yi, true);
    }
    validate_flip_pair(mk, fk)
        .map_err(|e| EquivalenceError::NotAConjugacy(format!("alphabet {k}: {e}")))
}

/// `Ker(E)` is `J`-orthogonal to the columns of `D`, and `Ker(D)` is
/// `K`-orthogonal to the columns of `E`.
pub fn kernel_range_orthogonal(p: &FlipPair, q: &FlipPair, w: &EquivalenceWitness) -> bool {
    let d = w.d.to_rational();
    let e = w.e.to_rational();
    let side =
        |j: &ZeroOneMatrix, ker_of: &crate::linalg::RMatrix, range_of: &crate::linalg::RMatrix| {
            let ker = kernel_basis(ker_of);
            (0..range_of.cols()).all(|c| {
                let col = range_of.column(c);
                ker.iter()
                    .all(|k| bilinear(j, k, &col).map(|v| v.is_zero()).unwrap_or(false))
            })
        };
    side(p.j(), &e, &d) && side(q.j(), &d, &e)
}

/// A proved obstruction to a flip conjugacy between two pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason")]
pub enum NonConjugacyCertificate {
    SignatureMinusOneCount {
        left: usize,
        right: usize,
    },
    LeadingSignature {
        left: i8,
        right: i8,
    },
    ZetaMismatch {
        degree: usize,
        #[serde(with = "crate::io::rational_string")]
        left: Rational,
        #[serde(with = "crate::io::rational_string")]
        right: Rational,
    },
}

/// Checks leading signs, then the number of `-1` signs, then Lind zeta
/// coefficients up to `degree`. `None` is inconclusive.
pub fn distinguish(p: &FlipPair, q: &FlipPair, degree: usize) -> Option<NonConjugacyCertificate> {
    let (sp, sq): (FlipSignature, FlipSignature) = (flip_signature(p), flip_signature(q));
    if sp.leading != sq.leading {
        return Some(NonConjugacyCertificate::LeadingSignature {
            left: sp.leading,
            right: sq.leading,
        });
    }
    if sp.minus_one_count() != sq.minus_one_count() {
        return Some(NonConjugacyCertificate::SignatureMinusOneCount {
            left: sp.minus_one_count(),
            right: sq.minus_one_count(),
        });
    }
    let (zp, zq) = (lind_zeta(p, degree), lind_zeta(q, degree));
    series_equal(&zp, &zq)
        .first_difference
        .map(|k| NonConjugacyCertificate::ZetaMismatch {
            degree: k,
            left: zp.coefficients[k].clone(),
            right: zq.coefficients[k].clone(),
        })
}

/// Differing Jordan data at a factor away from zero rules out a shift
/// equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanObstruction {
    pub left: JordanProfile,
    pub right: JordanProfile,
}

pub fn jordan_obstruction(
    p: &FlipPair,
    q: &FlipPair,
    factors: &[IntPolynomial],
) -> Result<Option<JordanObstruction>, crate::linalg::LinalgError> {
    for f in factors {
        let left = jordan_profile(&p.a().to_rational(), f)?;
        let right = jordan_profile(&q.a().to_rational(), f)?;
        if left.block_sizes != right.block_sizes {
            return Ok(Some(JordanObstruction { left, right }));
        }
    }
    Ok(None)
}
