//! Augmentation-power towers for monoid, group and operad-algebra rings.
//!
//! The quotients I/I^{n+1} of an augmentation ideal by its powers are computed
//! along three routes, each exact in its own regime:
//!
//! * free monoids, free groups and their finite products go through a degree
//!   truncated ring with one block of noncommuting variables per factor
//!   (generators map to 1 + y, inverses to the alternating geometric sum),
//! * finite monoids and groups go through explicit ideal-power spans over the
//!   group ring basis,
//! * finite algebras over a truncated operad go through spans of multilinear
//!   operation images.
//!
//! On top of the quotients sit the hom-group categories with objects the free
//! ranks, the monoid-to-group comparison matrices, and the two-path check that
//! the polynomial truncation of the linearized hom functor agrees with the
//! quotient construction.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::operad::{OpElem, Operad, OperadError};
use crate::perm::Perm;
use crate::zmod::{
    quotient_by_rows, row_span_solve, solve_columns, FgAbGroup, Int, QuotObject, ZHom, ZMatrix,
    ZmodError,
};

#[derive(Debug, Error)]
pub enum PassiError {
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("verification failure: {0}")]
    Verification(String),
    #[error("not stabilized between length budgets {budget} and {next}")]
    NotStabilized { budget: usize, next: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Operad(#[from] OperadError),
    #[error(transparent)]
    Zmod(#[from] ZmodError),
}

/// Hard cap on basis sizes in the truncated ring models.
const MONOMIAL_BUDGET: u128 = 150_000;
/// Hard cap on generator row counts in span computations.
const SPAN_ROW_BUDGET: usize = 200_000;

/* # truncated rings */

/// Monomial in block variables: one word per block. Words in commutative
/// blocks are kept sorted; blocks always commute with each other.
pub type Monomial = Vec<Vec<usize>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Block {
    rank: usize,
    commutative: bool,
}

/// Z-linear combinations of block monomials of total degree at most `degree`;
/// products drop every overflowing term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedRing {
    degree: usize,
    blocks: Vec<Block>,
}

/// Element of a [`TruncatedRing`]; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RingElt {
    terms: BTreeMap<Monomial, Int>,
}

fn monomial_degree(m: &[Vec<usize>]) -> usize {
    m.iter().map(|w| w.len()).sum()
}

impl TruncatedRing {
    /// `blocks` lists `(rank, commutative)` pairs.
    pub fn new(degree: usize, blocks: &[(usize, bool)]) -> TruncatedRing {
        TruncatedRing {
            degree,
            blocks: blocks.iter().map(|&(rank, commutative)| Block { rank, commutative }).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    fn check_var(&self, block: usize, i: usize) -> Result<(), PassiError> {
        if block >= self.blocks.len() || i >= self.blocks[block].rank {
            return Err(PassiError::Shape(format!(
                "variable ({block},{i}) outside ring shape"
            )));
        }
        Ok(())
    }

    fn normalize(&self, m: &mut Monomial) {
        for (b, word) in m.iter_mut().enumerate() {
            if self.blocks[b].commutative {
                word.sort_unstable();
            }
        }
    }

    pub fn zero(&self) -> RingElt {
        RingElt::default()
    }

    pub fn one(&self) -> RingElt {
        let mut terms = BTreeMap::new();
        terms.insert(vec![Vec::new(); self.blocks.len()], Int::one());
        RingElt { terms }
    }

    pub fn var(&self, block: usize, i: usize) -> Result<RingElt, PassiError> {
        self.check_var(block, i)?;
        if self.degree == 0 {
            return Ok(self.zero());
        }
        let mut mono = vec![Vec::new(); self.blocks.len()];
        mono[block] = vec![i];
        let mut terms = BTreeMap::new();
        terms.insert(mono, Int::one());
        Ok(RingElt { terms })
    }

    pub fn add(&self, a: &RingElt, b: &RingElt) -> RingElt {
        let mut terms = a.terms.clone();
        for (m, c) in &b.terms {
            let entry = terms.entry(m.clone()).or_insert_with(Int::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(m);
            }
        }
        RingElt { terms }
    }

    pub fn neg(&self, a: &RingElt) -> RingElt {
        RingElt { terms: a.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, a: &RingElt, b: &RingElt) -> RingElt {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &RingElt, k: &Int) -> RingElt {
        if k.is_zero() {
            return self.zero();
        }
        RingElt { terms: a.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul(&self, a: &RingElt, b: &RingElt) -> RingElt {
        let mut out: BTreeMap<Monomial, Int> = BTreeMap::new();
        for (ma, ca) in &a.terms {
            let da = monomial_degree(ma);
            for (mb, cb) in &b.terms {
                if da + monomial_degree(mb) > self.degree {
                    continue;
                }
                let mut m = ma.clone();
                for (blk, word) in m.iter_mut().enumerate() {
                    word.extend_from_slice(&mb[blk]);
                }
                self.normalize(&mut m);
                let entry = out.entry(m.clone()).or_insert_with(Int::zero);
                *entry += ca * cb;
                if entry.is_zero() {
                    out.remove(&m);
                }
            }
        }
        RingElt { terms: out }
    }

    pub fn pow(&self, a: &RingElt, k: usize) -> RingElt {
        let mut out = self.one();
        for _ in 0..k {
            out = self.mul(&out, a);
        }
        out
    }

    /// `1 + y_{block,i}`, the multiplicative image of a free generator.
    pub fn one_plus_var(&self, block: usize, i: usize) -> Result<RingElt, PassiError> {
        Ok(self.add(&self.one(), &self.var(block, i)?))
    }

    /// The truncated inverse `sum_k (-1)^k y^k` of `1 + y_{block,i}`.
    pub fn inv_one_plus_var(&self, block: usize, i: usize) -> Result<RingElt, PassiError> {
        let y = self.var(block, i)?;
        let mut out = self.one();
        let mut pw = self.one();
        for k in 1..=self.degree {
            pw = self.mul(&pw, &y);
            if k % 2 == 1 {
                out = self.sub(&out, &pw);
            } else {
                out = self.add(&out, &pw);
            }
        }
        Ok(out)
    }

    pub fn augmentation(&self, a: &RingElt) -> Int {
        let empty = vec![Vec::new(); self.blocks.len()];
        a.terms.get(&empty).cloned().unwrap_or_else(Int::zero)
    }

    fn block_words(rank: usize, commutative: bool, d: usize) -> Vec<Vec<usize>> {
        if d == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        let mut stack = vec![Vec::with_capacity(d)];
        while let Some(word) = stack.pop() {
            if word.len() == d {
                out.push(word);
                continue;
            }
            let lo = if commutative { word.last().copied().unwrap_or(0) } else { 0 };
            // reversed push keeps lexicographic order on pop
            for i in (lo..rank).rev() {
                let mut next = word.clone();
                next.push(i);
                stack.push(next);
            }
        }
        out
    }

    fn monomials_of_degree(&self, d: usize) -> Vec<Monomial> {
        let mut acc: Vec<Monomial> = vec![Vec::new()];
        let mut remaining: Vec<usize> = vec![d];
        for (idx, blk) in self.blocks.iter().enumerate() {
            let last = idx + 1 == self.blocks.len();
            let mut next_acc = Vec::new();
            let mut next_rem = Vec::new();
            for (prefix, rem) in acc.iter().zip(&remaining) {
                let choices: Vec<usize> = if last { vec![*rem] } else { (0..=*rem).collect() };
                for take in choices {
                    for word in Self::block_words(blk.rank, blk.commutative, take) {
                        let mut m = prefix.clone();
                        m.push(word);
                        next_acc.push(m);
                        next_rem.push(rem - take);
                    }
                }
            }
            acc = next_acc;
            remaining = next_rem;
        }
        acc
    }

    /// All monomials of total degree in `lo..=hi`, ordered by degree then
    /// lexicographically. The order is the coordinate convention everywhere.
    pub fn monomials(&self, lo: usize, hi: usize) -> Vec<Monomial> {
        let mut out = Vec::new();
        for d in lo..=hi {
            let mut level = self.monomials_of_degree(d);
            level.sort();
            out.extend(level);
        }
        out
    }

    pub fn count_monomials(&self, lo: usize, hi: usize) -> u128 {
        // per-block counts convolved over total degree
        let mut counts: Vec<u128> = vec![0; hi + 1];
        counts[0] = 1;
        for blk in &self.blocks {
            let mut blk_counts: Vec<u128> = Vec::with_capacity(hi + 1);
            for d in 0..=hi {
                let c = if blk.commutative {
                    // multisets of size d from blk.rank symbols
                    if blk.rank == 0 {
                        u128::from(d == 0)
                    } else {
                        let mut num: u128 = 1;
                        for j in 0..d {
                            num = num.saturating_mul((blk.rank + j) as u128);
                        }
                        let mut den: u128 = 1;
                        for j in 1..=d {
                            den *= j as u128;
                        }
                        num / den
                    }
                } else {
                    (blk.rank as u128).saturating_pow(d as u32)
                };
                blk_counts.push(c);
            }
            let mut next = vec![0u128; hi + 1];
            for a in 0..=hi {
                for b in 0..=(hi - a) {
                    next[a + b] = next[a + b].saturating_add(counts[a].saturating_mul(blk_counts[b]));
                }
            }
            counts = next;
        }
        counts[lo..=hi].iter().fold(0u128, |s, c| s.saturating_add(*c))
    }

    /// Coordinates of `a` over the listed monomials. Terms outside the index
    /// are an error; callers pick the degree window so none can occur.
    pub fn coords(
        &self,
        a: &RingElt,
        index: &BTreeMap<Monomial, usize>,
        dim: usize,
    ) -> Result<Vec<Int>, PassiError> {
        let mut out = vec![Int::zero(); dim];
        for (m, c) in &a.terms {
            match index.get(m) {
                Some(&i) => out[i] = c.clone(),
                None => {
                    return Err(PassiError::Verification(format!(
                        "term of degree {} outside the coordinate window",
                        monomial_degree(m)
                    )))
                }
            }
        }
        Ok(out)
    }
}

/* # monoid specifications */

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecKind {
    Free { rank: usize },
    GroupFree { rank: usize },
    Finite { table: Vec<Vec<usize>>, unit: usize },
    GroupFinite { table: Vec<Vec<usize>>, unit: usize },
    Product(Vec<MonoidSpec>),
}

/// A monoid given by generators-free data: free on a rank, a finite
/// multiplication table, the group variants of both, or a finite product.
/// Mixed free and finite product factors have no shared model and are
/// rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidSpec {
    kind: SpecKind,
}

/// Element of a [`MonoidSpec`]: positive words for free monoids, signed words
/// for free groups, basis indices for finite tables, tuples for products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonoidElement {
    Word(Vec<usize>),
    GroupWord(Vec<(usize, bool)>),
    Elem(usize),
    Tuple(Vec<MonoidElement>),
}

fn table_unit(table: &[Vec<usize>]) -> Result<usize, PassiError> {
    let s = table.len();
    if s == 0 {
        return Err(PassiError::Shape("empty multiplication table".into()));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != s {
            return Err(PassiError::Shape(format!("table row {i} has length {}", row.len())));
        }
        for &v in row {
            if v >= s {
                return Err(PassiError::Shape(format!("table entry {v} out of range")));
            }
        }
    }
    let unit = (0..s)
        .find(|&e| (0..s).all(|x| table[e][x] == x && table[x][e] == x))
        .ok_or_else(|| PassiError::Shape("table has no two-sided unit".into()))?;
    for a in 0..s {
        for b in 0..s {
            for c in 0..s {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(PassiError::Shape(format!(
                        "table is not associative at ({a},{b},{c})"
                    )));
                }
            }
        }
    }
    Ok(unit)
}

impl MonoidSpec {
    pub fn free(rank: usize) -> MonoidSpec {
        MonoidSpec { kind: SpecKind::Free { rank } }
    }

    pub fn group_free(rank: usize) -> MonoidSpec {
        MonoidSpec { kind: SpecKind::GroupFree { rank } }
    }

    pub fn finite(table: Vec<Vec<usize>>) -> Result<MonoidSpec, PassiError> {
        let unit = table_unit(&table)?;
        Ok(MonoidSpec { kind: SpecKind::Finite { table, unit } })
    }

    pub fn group_finite(table: Vec<Vec<usize>>) -> Result<MonoidSpec, PassiError> {
        let unit = table_unit(&table)?;
        let s = table.len();
        for a in 0..s {
            if !(0..s).any(|b| table[a][b] == unit && table[b][a] == unit) {
                return Err(PassiError::Shape(format!("element {a} has no inverse")));
            }
        }
        Ok(MonoidSpec { kind: SpecKind::GroupFinite { table, unit } })
    }

    /// Cyclic group of order `n` as a finite table.
    pub fn cyclic(n: usize) -> Result<MonoidSpec, PassiError> {
        if n == 0 {
            return Err(PassiError::Shape("cyclic order must be positive".into()));
        }
        let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        MonoidSpec::group_finite(table)
    }

    pub fn product(factors: Vec<MonoidSpec>) -> Result<MonoidSpec, PassiError> {
        if factors.is_empty() {
            return Err(PassiError::Shape("empty product".into()));
        }
        let frees = factors.iter().all(|f| f.is_ring_modeled());
        let finites = factors.iter().all(|f| f.is_finite_modeled());
        if !frees && !finites {
            return Err(PassiError::Shape(
                "product factors mix free and finite kinds; no shared model exists".into(),
            ));
        }
        Ok(MonoidSpec { kind: SpecKind::Product(factors) })
    }

    pub fn kind(&self) -> &SpecKind {
        &self.kind
    }

    fn is_ring_modeled(&self) -> bool {
        match &self.kind {
            SpecKind::Free { .. } | SpecKind::GroupFree { .. } => true,
            SpecKind::Finite { .. } | SpecKind::GroupFinite { .. } => false,
            SpecKind::Product(fs) => fs.iter().all(|f| f.is_ring_modeled()),
        }
    }

    fn is_finite_modeled(&self) -> bool {
        match &self.kind {
            SpecKind::Finite { .. } | SpecKind::GroupFinite { .. } => true,
            SpecKind::Free { .. } | SpecKind::GroupFree { .. } => false,
            SpecKind::Product(fs) => fs.iter().all(|f| f.is_finite_modeled()),
        }
    }

    fn leaves(&self) -> Vec<LeafKind> {
        match &self.kind {
            SpecKind::Free { rank } => vec![LeafKind::Free(*rank)],
            SpecKind::GroupFree { rank } => vec![LeafKind::GroupFree(*rank)],
            SpecKind::Finite { .. } | SpecKind::GroupFinite { .. } => Vec::new(),
            SpecKind::Product(fs) => fs.iter().flat_map(|f| f.leaves()).collect(),
        }
    }

    /// Flattens a finite-modeled spec to one table; products are row-major
    /// over the factors.
    fn flat_table(&self) -> Result<(Vec<Vec<usize>>, usize), PassiError> {
        match &self.kind {
            SpecKind::Finite { table, unit } | SpecKind::GroupFinite { table, unit } => {
                Ok((table.clone(), *unit))
            }
            SpecKind::Product(fs) => {
                let mut table = vec![vec![0]];
                let mut unit = 0;
                for f in fs {
                    let (t2, u2) = f.flat_table()?;
                    let (s1, s2) = (table.len(), t2.len());
                    let merged: Vec<Vec<usize>> = (0..s1 * s2)
                        .map(|a| {
                            (0..s1 * s2)
                                .map(|b| {
                                    let (a1, a2) = (a / s2, a % s2);
                                    let (b1, b2) = (b / s2, b % s2);
                                    table[a1][b1] * s2 + t2[a2][b2]
                                })
                                .collect()
                        })
                        .collect();
                    unit = unit * s2 + u2;
                    table = merged;
                }
                Ok((table, unit))
            }
            _ => Err(PassiError::Shape("free spec has no finite table".into())),
        }
    }

    /// `free:R`, `gfree:R`, `cyclic:N`, `trivial`, and `*`-separated products.
    pub fn parse(text: &str) -> Result<MonoidSpec, PassiError> {
        let parts: Vec<&str> = text.split('*').collect();
        let mut factors = Vec::new();
        for part in &parts {
            let part = part.trim();
            let spec = if part == "trivial" {
                MonoidSpec::finite(vec![vec![0]])?
            } else if let Some(r) = part.strip_prefix("free:") {
                let rank: usize = r
                    .parse()
                    .map_err(|_| PassiError::Shape(format!("bad rank in {part:?}")))?;
                MonoidSpec::free(rank)
            } else if let Some(r) = part.strip_prefix("gfree:") {
                let rank: usize = r
                    .parse()
                    .map_err(|_| PassiError::Shape(format!("bad rank in {part:?}")))?;
                MonoidSpec::group_free(rank)
            } else if let Some(r) = part.strip_prefix("cyclic:") {
                let n: usize =
                    r.parse().map_err(|_| PassiError::Shape(format!("bad order in {part:?}")))?;
                MonoidSpec::cyclic(n)?
            } else {
                return Err(PassiError::Shape(format!("unknown monoid spec {part:?}")));
            };
            factors.push(spec);
        }
        if factors.len() == 1 {
            Ok(factors.pop().expect("nonempty"))
        } else {
            MonoidSpec::product(factors)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LeafKind {
    Free(usize),
    GroupFree(usize),
}

/// Magnus image of a spec element in a ring with one block per free leaf.
fn magnus_element(
    ring: &TruncatedRing,
    spec: &MonoidSpec,
    x: &MonoidElement,
) -> Result<RingElt, PassiError> {
    let leaves = spec.leaves();
    let mut cursor = 0usize;
    let out = magnus_walk(ring, spec, x, &leaves, &mut cursor)?;
    if cursor != leaves.len() {
        return Err(PassiError::Shape("element does not cover every product factor".into()));
    }
    Ok(out)
}

fn magnus_walk(
    ring: &TruncatedRing,
    spec: &MonoidSpec,
    x: &MonoidElement,
    leaves: &[LeafKind],
    cursor: &mut usize,
) -> Result<RingElt, PassiError> {
    match (&spec.kind, x) {
        (SpecKind::Free { rank }, MonoidElement::Word(w)) => {
            let block = *cursor;
            *cursor += 1;
            let mut out = ring.one();
            for &i in w {
                if i >= *rank {
                    return Err(PassiError::Shape(format!("letter {i} outside rank {rank}")));
                }
                out = ring.mul(&out, &ring.one_plus_var(block, i)?);
            }
            Ok(out)
        }
        (SpecKind::GroupFree { .. }, MonoidElement::Word(w)) => {
            let signed: Vec<(usize, bool)> = w.iter().map(|&i| (i, false)).collect();
            magnus_walk(ring, spec, &MonoidElement::GroupWord(signed), leaves, cursor)
        }
        (SpecKind::GroupFree { rank }, MonoidElement::GroupWord(w)) => {
            let block = *cursor;
            *cursor += 1;
            let mut out = ring.one();
            for &(i, inverted) in w {
                if i >= *rank {
                    return Err(PassiError::Shape(format!("letter {i} outside rank {rank}")));
                }
                let factor = if inverted {
                    ring.inv_one_plus_var(block, i)?
                } else {
                    ring.one_plus_var(block, i)?
                };
                out = ring.mul(&out, &factor);
            }
            Ok(out)
        }
        (SpecKind::Product(fs), MonoidElement::Tuple(xs)) => {
            if fs.len() != xs.len() {
                return Err(PassiError::Shape(format!(
                    "tuple length {} does not match {} product factors",
                    xs.len(),
                    fs.len()
                )));
            }
            let mut out = ring.one();
            for (f, xf) in fs.iter().zip(xs) {
                out = ring.mul(&out, &magnus_walk(ring, f, xf, leaves, cursor)?);
            }
            Ok(out)
        }
        _ => Err(PassiError::Shape("element shape does not match the spec".into())),
    }
}

/* # quotient groups of augmentation powers */

enum Model {
    Ring {
        ring: TruncatedRing,
        index: BTreeMap<Monomial, usize>,
        dim: usize,
    },
    Finite {
        table: Vec<Vec<usize>>,
        unit: usize,
        quot: QuotObject,
    },
}

/// The degree `n` quotient of the augmentation ideal of a spec's monoid ring,
/// with the universal reduction from elements to quotient coordinates.
pub struct PassiGroup {
    spec: MonoidSpec,
    n: usize,
    group: FgAbGroup,
    model: Model,
}

/// Multiplies vectors in the based monoid ring of a flat table.
fn table_ring_mul(table: &[Vec<usize>], a: &[Int], b: &[Int]) -> Vec<Int> {
    let s = table.len();
    let mut out = vec![Int::zero(); s];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            if cb.is_zero() {
                continue;
            }
            out[table[i][j]] += ca * cb;
        }
    }
    out
}

/// Ideal coordinates of a sum-zero vector: drop the unit entry over the basis
/// `m - e`.
fn ideal_coords(v: &[Int], unit: usize) -> Vec<Int> {
    v.iter().enumerate().filter(|&(i, _)| i != unit).map(|(_, c)| c.clone()).collect()
}

fn basis_minus_unit(s: usize, unit: usize, m: usize) -> Vec<Int> {
    let mut v = vec![Int::zero(); s];
    v[m] += Int::one();
    v[unit] -= Int::one();
    v
}

/// Generator rows of the span of `k`-fold products of the `m - e`.
fn ideal_power_rows(table: &[Vec<usize>], unit: usize, k: usize) -> Result<Vec<Vec<Int>>, PassiError> {
    let s = table.len();
    let mut level: Vec<Vec<Int>> = vec![];
    {
        let mut e0 = vec![Int::zero(); s];
        e0[unit] = Int::one();
        level.push(e0);
    }
    for _ in 0..k {
        let mut next = Vec::new();
        for v in &level {
            for m in 0..s {
                if m == unit {
                    continue;
                }
                next.push(table_ring_mul(table, v, &basis_minus_unit(s, unit, m)));
            }
            if next.len() > SPAN_ROW_BUDGET {
                return Err(PassiError::Budget(format!(
                    "ideal power span exceeds {SPAN_ROW_BUDGET} generators"
                )));
            }
        }
        level = next;
    }
    Ok(level.into_iter().map(|v| ideal_coords(&v, unit)).collect())
}

fn rows_matrix(rows: &[Vec<Int>], cols: usize) -> ZMatrix {
    ZMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c].clone())
}

/// Reduces coordinates modulo the torsion orders of `g`.
pub fn normalize_coords(g: &FgAbGroup, coords: &mut [Int]) {
    for (i, c) in coords.iter_mut().enumerate() {
        if let Some(d) = g.coord_order(i) {
            *c = ((c.clone() % d) + d) % d;
        }
    }
}

/// `I(M)/I^{n+1}(M)` for a monoid spec.
pub fn passi_group(spec: &MonoidSpec, n: usize) -> Result<PassiGroup, PassiError> {
    if spec.is_ring_modeled() {
        let blocks: Vec<(usize, bool)> = spec
            .leaves()
            .iter()
            .map(|leaf| match leaf {
                LeafKind::Free(r) | LeafKind::GroupFree(r) => (*r, false),
            })
            .collect();
        let ring = TruncatedRing::new(n, &blocks);
        let count = if n == 0 { 0 } else { ring.count_monomials(1, n) };
        if count > MONOMIAL_BUDGET {
            return Err(PassiError::Budget(format!(
                "{count} monomials exceed the budget of {MONOMIAL_BUDGET}"
            )));
        }
        let basis = if n == 0 { Vec::new() } else { ring.monomials(1, n) };
        let index: BTreeMap<Monomial, usize> =
            basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let dim = basis.len();
        Ok(PassiGroup {
            spec: spec.clone(),
            n,
            group: FgAbGroup::free(dim),
            model: Model::Ring { ring, index, dim },
        })
    } else if spec.is_finite_modeled() {
        let (table, unit) = spec.flat_table()?;
        let s = table.len();
        let rows = ideal_power_rows(&table, unit, n + 1)?;
        let quot = quotient_by_rows(&FgAbGroup::free(s - 1), &rows_matrix(&rows, s - 1));
        Ok(PassiGroup {
            spec: spec.clone(),
            n,
            group: quot.group.clone(),
            model: Model::Finite { table, unit, quot },
        })
    } else {
        Err(PassiError::Shape("product mixes free and finite factors".into()))
    }
}

impl PassiGroup {
    pub fn group(&self) -> &FgAbGroup {
        &self.group
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spec(&self) -> &MonoidSpec {
        &self.spec
    }

    /// Coordinates of the class of `x - 1`, the universal degree `n` map.
    pub fn reduce(&self, x: &MonoidElement) -> Result<Vec<Int>, PassiError> {
        match &self.model {
            Model::Ring { ring, index, dim } => {
                let img = magnus_element(ring, &self.spec, x)?;
                let shifted = ring.sub(&img, &ring.one());
                ring.coords(&shifted, index, *dim)
            }
            Model::Finite { table, unit, quot } => {
                let idx = self.flat_index(x)?;
                let v = ideal_coords(&basis_minus_unit(table.len(), *unit, idx), *unit);
                let col = ZMatrix::from_fn(v.len(), 1, |r, _| v[r].clone());
                let out = quot.proj.matrix().mul(&col);
                let mut coords: Vec<Int> = (0..out.rows).map(|r| out.get(r, 0).clone()).collect();
                normalize_coords(&self.group, &mut coords);
                Ok(coords)
            }
        }
    }

    fn flat_index(&self, x: &MonoidElement) -> Result<usize, PassiError> {
        fn walk(spec: &MonoidSpec, x: &MonoidElement) -> Result<(usize, usize), PassiError> {
            match (&spec.kind, x) {
                (SpecKind::Finite { table, .. }, MonoidElement::Elem(i))
                | (SpecKind::GroupFinite { table, .. }, MonoidElement::Elem(i)) => {
                    if *i >= table.len() {
                        return Err(PassiError::Shape(format!("element {i} outside the table")));
                    }
                    Ok((*i, table.len()))
                }
                (SpecKind::Product(fs), MonoidElement::Tuple(xs)) => {
                    if fs.len() != xs.len() {
                        return Err(PassiError::Shape("tuple arity mismatch".into()));
                    }
                    let mut idx = 0usize;
                    let mut size = 1usize;
                    for (f, xf) in fs.iter().zip(xs) {
                        let (i2, s2) = walk(f, xf)?;
                        idx = idx * s2 + i2;
                        size *= s2;
                    }
                    Ok((idx, size))
                }
                _ => Err(PassiError::Shape("element shape does not match the spec".into())),
            }
        }
        Ok(walk(&self.spec, x)?.0)
    }
}

/* # groupification comparison */

/// Comparison of the free-monoid and free-group models in one rank: columns
/// are monoid word classes written in the group-side monomial coordinates.
pub struct GroupificationReport {
    pub rank: usize,
    pub n: usize,
    pub dim: usize,
    pub matrix: ZMatrix,
    pub unimodular: bool,
    pub inverses_verified: bool,
}

impl GroupificationReport {
    pub fn passed(&self) -> bool {
        self.unimodular && self.inverses_verified
    }
}

pub fn groupification_iso_check(rank: usize, n: usize) -> Result<GroupificationReport, PassiError> {
    if n == 0 {
        return Ok(GroupificationReport {
            rank,
            n,
            dim: 0,
            matrix: ZMatrix::zeros(0, 0),
            unimodular: true,
            inverses_verified: true,
        });
    }
    let ring = TruncatedRing::new(n, &[(rank, false)]);
    if ring.count_monomials(1, n) > MONOMIAL_BUDGET {
        return Err(PassiError::Budget("monomial basis exceeds the budget".into()));
    }
    let basis = ring.monomials(1, n);
    let index: BTreeMap<Monomial, usize> =
        basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let dim = basis.len();

    // Words of length 1..=n over the alphabet are exactly the one-block
    // monomials, so the basis doubles as the word list.
    let mut matrix = ZMatrix::zeros(dim, dim);
    for (j, word_mono) in basis.iter().enumerate() {
        let word = &word_mono[0];
        let mut img = ring.one();
        for &i in word {
            img = ring.mul(&img, &ring.one_plus_var(0, i)?);
        }
        let coords = ring.coords(&ring.sub(&img, &ring.one()), &index, dim)?;
        for (i, c) in coords.into_iter().enumerate() {
            matrix.set(i, j, c);
        }
    }
    let unimodular = matrix.is_unimodular();

    let mut inverses_verified = true;
    for i in 0..rank {
        let gen = ring.one_plus_var(0, i)?;
        let inv = ring.inv_one_plus_var(0, i)?;
        if ring.mul(&gen, &inv) != ring.one() || ring.mul(&inv, &gen) != ring.one() {
            inverses_verified = false;
            continue;
        }
        let v = ring.coords(&ring.sub(&inv, &ring.one()), &index, dim)?;
        let col = ZMatrix::from_fn(dim, 1, |r, _| v[r].clone());
        if solve_columns(&matrix, &col).is_none() {
            inverses_verified = false;
        }
    }
    Ok(GroupificationReport { rank, n, dim, matrix, unimodular, inverses_verified })
}

/* # finite algebras over an operad */

/// A finite carrier with operation tables for every element of a truncated
/// operad. Construction verifies unitality, equivariance and compatibility
/// with substitution exhaustively over the in-range arities.
pub struct FinitePAlgebra {
    op: Operad,
    size: usize,
    unit: usize,
    /// tables[m][e.index * size^m + tuple], tuple big-endian over the slots
    tables: Vec<Vec<usize>>,
}

impl FinitePAlgebra {
    pub fn from_fn(
        op: &Operad,
        size: usize,
        mut f: impl FnMut(OpElem, &[usize]) -> Result<usize, String>,
    ) -> Result<FinitePAlgebra, PassiError> {
        if size == 0 {
            return Err(PassiError::Shape("empty carrier".into()));
        }
        let nmax = op.max_arity();
        let mut total: usize = 0;
        for m in 0..=nmax {
            total = total.saturating_add(op.size(m)?.saturating_mul(size.pow(m as u32)));
        }
        if total > SPAN_ROW_BUDGET {
            return Err(PassiError::Budget(format!("{total} table entries exceed the budget")));
        }
        let mut tables = Vec::with_capacity(nmax + 1);
        for m in 0..=nmax {
            let elems = op.elements(m)?;
            let tuples = size.pow(m as u32);
            let mut table = vec![0usize; elems.len() * tuples];
            let mut args = vec![0usize; m];
            for e in &elems {
                for t in 0..tuples {
                    let mut rem = t;
                    for slot in (0..m).rev() {
                        args[slot] = rem % size;
                        rem /= size;
                    }
                    let out = f(*e, &args).map_err(PassiError::Shape)?;
                    if out >= size {
                        return Err(PassiError::Shape(format!("operation value {out} outside carrier")));
                    }
                    table[e.index * tuples + t] = out;
                }
            }
            tables.push(table);
        }
        let unit = tables[0][0];
        let alg = FinitePAlgebra { op: op.clone(), size, unit, tables };
        alg.verify()?;
        Ok(alg)
    }

    pub fn op(&self) -> &Operad {
        &self.op
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn apply(&self, e: OpElem, args: &[usize]) -> Result<usize, PassiError> {
        self.op.check_elem(e)?;
        if args.len() != e.arity {
            return Err(PassiError::Shape(format!(
                "arity {} element applied to {} arguments",
                e.arity,
                args.len()
            )));
        }
        let mut t = 0usize;
        for &a in args {
            if a >= self.size {
                return Err(PassiError::Shape(format!("argument {a} outside carrier")));
            }
            t = t * self.size + a;
        }
        Ok(self.tables[e.arity][e.index * self.size.pow(e.arity as u32) + t])
    }

    fn tuples(&self, m: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for _ in 0..m {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..self.size).map(move |a| {
                        let mut n = t.clone();
                        n.push(a);
                        n
                    })
                })
                .collect();
        }
        out
    }

    fn verify(&self) -> Result<(), PassiError> {
        let nmax = self.op.max_arity();
        for a in 0..self.size {
            if self.apply(self.op.unit(), &[a])? != a {
                return Err(PassiError::Verification(format!("unit operation moves element {a}")));
            }
        }
        // equivariance: e.sigma applied to a tuple matches e applied to the
        // tuple pushed through sigma
        for m in 0..=nmax {
            for e in self.op.elements(m)? {
                for sigma in Perm::all(m) {
                    let moved = self.op.act(e, &sigma)?;
                    for t in self.tuples(m) {
                        let mut pushed = vec![0usize; m];
                        for (i, &a) in t.iter().enumerate() {
                            pushed[sigma.apply(i)] = a;
                        }
                        if self.apply(moved, &t)? != self.apply(e, &pushed)? {
                            return Err(PassiError::Verification(format!(
                                "equivariance fails at arity {m}"
                            )));
                        }
                    }
                }
            }
        }
        // substitution compatibility over every in-range composition
        for m in 1..=nmax {
            for inner_arities in compositions_up_to(m, nmax) {
                let total: usize = inner_arities.iter().sum();
                for outer in self.op.elements(m)? {
                    for inner in elem_tuples(&self.op, &inner_arities)? {
                        let composed = self.op.gamma(outer, &inner)?;
                        for t in self.tuples(total) {
                            let mut parts = Vec::with_capacity(m);
                            let mut offset = 0;
                            for e in &inner {
                                parts.push(self.apply(*e, &t[offset..offset + e.arity])?);
                                offset += e.arity;
                            }
                            if self.apply(composed, &t)? != self.apply(outer, &parts)? {
                                return Err(PassiError::Verification(format!(
                                    "substitution compatibility fails at outer arity {m}"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Monoid multiplication as an algebra: folded products for the one-point
    /// components, order read off the permutation decode otherwise.
    pub fn monoid_algebra(op: &Operad, table: &[Vec<usize>]) -> Result<FinitePAlgebra, PassiError> {
        let unit = table_unit(table)?;
        let size = table.len();
        match op.name() {
            "com" => {
                for a in 0..size {
                    for b in 0..size {
                        if table[a][b] != table[b][a] {
                            return Err(PassiError::Shape(format!(
                                "table is not commutative at ({a},{b})"
                            )));
                        }
                    }
                }
                FinitePAlgebra::from_fn(op, size, |_, args| {
                    Ok(args.iter().fold(unit, |acc, &a| table[acc][a]))
                })
            }
            "as" => {
                let op2 = op.clone();
                FinitePAlgebra::from_fn(op, size, move |e, args| {
                    let theta = op2.as_perm(e).ok_or("not a permutation element")?;
                    let mut acc = unit;
                    for p in 0..e.arity {
                        acc = table[acc][args[theta.apply(p)]];
                    }
                    Ok(acc)
                })
            }
            other => Err(PassiError::Shape(format!(
                "monoid algebras are built over com or as, not {other}"
            ))),
        }
    }

    pub fn trivial(op: &Operad) -> Result<FinitePAlgebra, PassiError> {
        FinitePAlgebra::from_fn(op, 1, |_, _| Ok(0))
    }

    /// Multilinear extension of an operation to based vectors.
    fn eval_multilinear(&self, e: OpElem, vectors: &[Vec<Int>]) -> Result<Vec<Int>, PassiError> {
        let m = e.arity;
        debug_assert_eq!(vectors.len(), m);
        let mut out = vec![Int::zero(); self.size];
        let mut idx = vec![0usize; m];
        loop {
            let mut coeff = Int::one();
            for (slot, &i) in idx.iter().enumerate() {
                coeff *= &vectors[slot][i];
                if coeff.is_zero() {
                    break;
                }
            }
            if !coeff.is_zero() {
                let target = self.apply(e, &idx)?;
                out[target] += coeff;
            }
            let mut slot = m;
            loop {
                if slot == 0 {
                    return Ok(out);
                }
                slot -= 1;
                idx[slot] += 1;
                if idx[slot] < self.size {
                    break;
                }
                idx[slot] = 0;
            }
        }
    }

    /// Image of `(a_1 - 1) (x) ... (x) (a_m - 1)` under the operation.
    fn op_product(&self, e: OpElem, tuple: &[usize]) -> Result<Vec<Int>, PassiError> {
        let vectors: Vec<Vec<Int>> =
            tuple.iter().map(|&a| basis_minus_unit(self.size, self.unit, a)).collect();
        self.eval_multilinear(e, &vectors)
    }
}

fn compositions_up_to(parts: usize, total_max: usize) -> Vec<Vec<usize>> {
    // tuples of nonnegative arities with the given number of parts and sum
    // within the truncation
    let mut out = vec![Vec::new()];
    for _ in 0..parts {
        out = out
            .into_iter()
            .flat_map(|t| {
                let used: usize = t.iter().sum();
                (0..=(total_max - used)).map(move |a| {
                    let mut n = t.clone();
                    n.push(a);
                    n
                })
            })
            .collect();
    }
    out
}

fn elem_tuples(op: &Operad, arities: &[usize]) -> Result<Vec<Vec<OpElem>>, OperadError> {
    let mut out = vec![Vec::new()];
    for &a in arities {
        let elems = op.elements(a)?;
        out = out
            .into_iter()
            .flat_map(|t: Vec<OpElem>| {
                elems.iter().map(move |&e| {
                    let mut n = t.clone();
                    n.push(e);
                    n
                })
            })
            .collect();
    }
    Ok(out)
}

/// Non-unit tuples of the given length over a carrier.
fn nonunit_tuples(size: usize, unit: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..size).filter(|&a| a != unit).map(move |a| {
                    let mut n = t.clone();
                    n.push(a);
                    n
                })
            })
            .collect();
    }
    out
}

/// Quotient of the augmentation ideal of a finite algebra by the operadic
/// power span. Exactness of the arity cutoff is certified for the builtin
/// operads and for trivial quotients; otherwise a warning is attached.
pub struct OperadicPassi {
    pub group: FgAbGroup,
    pub truncation_certified: bool,
    pub warning: Option<String>,
    quot: QuotObject,
}

/// Generator rows of `sum_{m >= k} theta(I (x) ... (x) I)` in ideal
/// coordinates, with `m` capped by the operad truncation.
fn operadic_power_rows(alg: &FinitePAlgebra, k: usize) -> Result<Vec<Vec<Int>>, PassiError> {
    let mut rows = Vec::new();
    for m in k..=alg.op().max_arity() {
        for e in alg.op().elements(m)? {
            for tuple in nonunit_tuples(alg.size, alg.unit, m) {
                rows.push(ideal_coords(&alg.op_product(e, &tuple)?, alg.unit));
                if rows.len() > SPAN_ROW_BUDGET {
                    return Err(PassiError::Budget("operadic span exceeds the row budget".into()));
                }
            }
        }
    }
    Ok(rows)
}

pub fn operadic_passi(alg: &FinitePAlgebra, n: usize) -> Result<OperadicPassi, PassiError> {
    if alg.op().max_arity() < n + 1 {
        return Err(PassiError::Shape(format!(
            "operad truncation {} cannot express the degree {} power",
            alg.op().max_arity(),
            n
        )));
    }
    let s = alg.size;
    let rows = operadic_power_rows(alg, n + 1)?;
    let quot = quotient_by_rows(&FgAbGroup::free(s - 1), &rows_matrix(&rows, s - 1));
    let group = quot.group.clone();
    let builtin = matches!(alg.op().name(), "com" | "as" | "initial");
    let truncation_certified = builtin || group.is_trivial();
    let warning = if truncation_certified {
        None
    } else {
        Some(format!(
            "arities above {} are not represented; the power span may be incomplete",
            alg.op().max_arity()
        ))
    };
    Ok(OperadicPassi { group, truncation_certified, warning, quot })
}

impl OperadicPassi {
    pub fn reduce(&self, alg: &FinitePAlgebra, a: usize) -> Result<Vec<Int>, PassiError> {
        if a >= alg.size {
            return Err(PassiError::Shape(format!("element {a} outside carrier")));
        }
        let v = ideal_coords(&basis_minus_unit(alg.size, alg.unit, a), alg.unit);
        let col = ZMatrix::from_fn(v.len(), 1, |r, _| v[r].clone());
        let out = self.quot.proj.matrix().mul(&col);
        let mut coords: Vec<Int> = (0..out.rows).map(|r| out.get(r, 0).clone()).collect();
        normalize_coords(&self.group, &mut coords);
        Ok(coords)
    }
}

/* # the connecting exact sequence */

pub enum PnexsequInput<'a> {
    FreeMonoid { rank: usize },
    FiniteMonoid { table: Vec<Vec<usize>> },
    Algebra(&'a FinitePAlgebra),
}

/// Exactness data for the sequence connecting consecutive quotients: the
/// degree `n` multiplication image against the kernel of the step-down map.
pub struct PnexsequReport {
    pub n: usize,
    pub p_n: FgAbGroup,
    pub p_n_minus_1: FgAbGroup,
    pub nu_image: FgAbGroup,
    pub kernel: FgAbGroup,
    pub exact: bool,
    /// Only for the algebra route: the multiplication map respects degree one
    /// classes in every slot.
    pub nu_well_defined: Option<bool>,
    /// Only for the algebra route: operations split additively modulo the
    /// square span.
    pub additivity_mod_square: Option<bool>,
}

impl PnexsequReport {
    pub fn passed(&self) -> bool {
        self.exact
            && self.nu_well_defined.unwrap_or(true)
            && self.additivity_mod_square.unwrap_or(true)
    }
}

fn span_contains(amb: &FgAbGroup, span_rows: &ZMatrix, v_rows: &ZMatrix) -> bool {
    let rel = amb.relation_rows();
    let sys = if rel.rows > 0 { span_rows.vstack(&rel) } else { span_rows.clone() };
    if sys.rows == 0 {
        return v_rows.is_zero();
    }
    row_span_solve(&sys, v_rows).is_some()
}

fn spans_equal(amb: &FgAbGroup, a: &ZMatrix, b: &ZMatrix) -> bool {
    span_contains(amb, a, b) && span_contains(amb, b, a)
}

fn subgroup_of(amb: &FgAbGroup, rows: &ZMatrix) -> FgAbGroup {
    crate::zmod::subgroup_from_rows(amb, rows).group
}

pub fn pnexsequ_check(input: PnexsequInput<'_>, n: usize) -> Result<PnexsequReport, PassiError> {
    if n == 0 {
        return Err(PassiError::Shape("the sequence needs degree at least 1".into()));
    }
    match input {
        PnexsequInput::FreeMonoid { rank } => {
            let ring = TruncatedRing::new(n, &[(rank, false)]);
            if ring.count_monomials(1, n) > MONOMIAL_BUDGET {
                return Err(PassiError::Budget("monomial basis exceeds the budget".into()));
            }
            let basis = ring.monomials(1, n);
            let index: BTreeMap<Monomial, usize> =
                basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
            let dim = basis.len();
            let low_dim = basis.iter().filter(|m| monomial_degree(m) < n).count();
            let p_n = FgAbGroup::free(dim);
            let p_low = FgAbGroup::free(low_dim);
            // kernel of the truncation: the top-degree span
            let top: Vec<usize> =
                (0..dim).filter(|&i| monomial_degree(&basis[i]) == n).collect();
            let mut ker_rows = ZMatrix::zeros(top.len(), dim);
            for (r, &i) in top.iter().enumerate() {
                ker_rows.set(r, i, Int::one());
            }
            // products of n generator classes
            let mut letter_tuples: Vec<Vec<usize>> = vec![Vec::new()];
            for _ in 0..n {
                letter_tuples = letter_tuples
                    .into_iter()
                    .flat_map(|t| {
                        (0..rank).map(move |i| {
                            let mut u = t.clone();
                            u.push(i);
                            u
                        })
                    })
                    .collect();
            }
            let mut nu_rows = Vec::new();
            for tuple in letter_tuples {
                let mut img = ring.one();
                for &i in &tuple {
                    let gen = ring.one_plus_var(0, i)?;
                    img = ring.mul(&img, &ring.sub(&gen, &ring.one()));
                }
                nu_rows.push(ring.coords(&img, &index, dim)?);
            }
            let nu = rows_matrix(&nu_rows, dim);
            let exact = spans_equal(&p_n, &nu, &ker_rows);
            Ok(PnexsequReport {
                n,
                p_n: p_n.clone(),
                p_n_minus_1: p_low,
                nu_image: subgroup_of(&p_n, &nu),
                kernel: FgAbGroup::free(top.len()),
                exact,
                nu_well_defined: None,
                additivity_mod_square: None,
            })
        }
        PnexsequInput::FiniteMonoid { table } => {
            let unit = table_unit(&table)?;
            let s = table.len();
            let rows_np1 = ideal_power_rows(&table, unit, n + 1)?;
            let rows_n = ideal_power_rows(&table, unit, n)?;
            let quot_n = quotient_by_rows(&FgAbGroup::free(s - 1), &rows_matrix(&rows_np1, s - 1));
            let quot_low = quotient_by_rows(&FgAbGroup::free(s - 1), &rows_matrix(&rows_n, s - 1));
            finite_sequence_report(
                n,
                &quot_n,
                &quot_low,
                s - 1,
                rows_n.iter().map(|v| v.clone()).collect(),
                None,
                None,
            )
        }
        PnexsequInput::Algebra(alg) => {
            if alg.op().max_arity() < n + 1 {
                return Err(PassiError::Shape("operad truncation below the needed power".into()));
            }
            let s = alg.size;
            let rows_np1 = operadic_power_rows(alg, n + 1)?;
            let rows_n_only = {
                let mut rows = Vec::new();
                for e in alg.op().elements(n)? {
                    for tuple in nonunit_tuples(s, alg.unit, n) {
                        rows.push(ideal_coords(&alg.op_product(e, &tuple)?, alg.unit));
                    }
                }
                rows
            };
            let quot_n = quotient_by_rows(&FgAbGroup::free(s - 1), &rows_matrix(&rows_np1, s - 1));
            let rows_n = operadic_power_rows(alg, n)?;
            let quot_low = quotient_by_rows(&FgAbGroup::free(s - 1), &rows_matrix(&rows_n, s - 1));

            // the multiplication map factors through degree one classes:
            // a square-span entry in any slot must land in the higher power
            let square_rows = operadic_power_rows(alg, 2)?;
            let higher = rows_matrix(&rows_np1, s - 1);
            let free_amb = FgAbGroup::free(s - 1);
            let mut well_defined = true;
            'outer: for e in alg.op().elements(n)? {
                for g in &square_rows {
                    let gv = ideal_insert(g, alg.unit);
                    for slot in 0..n {
                        for rest in nonunit_tuples(s, alg.unit, n - 1) {
                            let mut vectors: Vec<Vec<Int>> = Vec::with_capacity(n);
                            let mut rest_it = rest.iter();
                            for j in 0..n {
                                if j == slot {
                                    vectors.push(gv.clone());
                                } else {
                                    let &a = rest_it.next().expect("length n - 1");
                                    vectors.push(basis_minus_unit(s, alg.unit, a));
                                }
                            }
                            let img = alg.eval_multilinear(e, &vectors)?;
                            let row = rows_matrix(&[ideal_coords(&img, alg.unit)], s - 1);
                            if !span_contains(&free_amb, &higher, &row) {
                                well_defined = false;
                                break 'outer;
                            }
                        }
                    }
                }
            }

            // operations split additively modulo the square span
            let square = rows_matrix(&square_rows, s - 1);
            let mut additive = true;
            'mod2: for p in 1..=3.min(alg.op().max_arity()) {
                for e in alg.op().elements(p)? {
                    let splitters: Vec<OpElem> = (0..p)
                        .map(|k| {
                            let inner: Vec<OpElem> = (0..p)
                                .map(|j| if j == k { alg.op().unit() } else { alg.op().zero() })
                                .collect();
                            alg.op().gamma(e, &inner)
                        })
                        .collect::<Result<_, _>>()?;
                    for tuple in alg.tuples(p) {
                        let lhs_full = basis_minus_unit(s, alg.unit, alg.apply(e, &tuple)?);
                        let mut diff = lhs_full;
                        for (k, &a) in tuple.iter().enumerate() {
                            let part =
                                basis_minus_unit(s, alg.unit, alg.apply(splitters[k], &[a])?);
                            for i in 0..s {
                                diff[i] -= &part[i];
                            }
                        }
                        let row = rows_matrix(&[ideal_coords(&diff, alg.unit)], s - 1);
                        if !span_contains(&free_amb, &square, &row) {
                            additive = false;
                            break 'mod2;
                        }
                    }
                }
            }

            finite_sequence_report(
                n,
                &quot_n,
                &quot_low,
                s - 1,
                rows_n_only,
                Some(well_defined),
                Some(additive),
            )
        }
    }
}

/// Based-ring coordinates of ideal coordinates: `sum c_m (m - e)` puts the
/// negated coefficient sum at the unit position.
fn ideal_insert(v: &[Int], unit: usize) -> Vec<Int> {
    let minus_sum = -v.iter().fold(Int::zero(), |s, c| s + c);
    let mut out = Vec::with_capacity(v.len() + 1);
    for (i, c) in v.iter().enumerate() {
        if i == unit {
            out.push(minus_sum.clone());
        }
        out.push(c.clone());
    }
    if unit == v.len() {
        out.push(minus_sum);
    }
    out
}

fn finite_sequence_report(
    n: usize,
    quot_n: &QuotObject,
    quot_low: &QuotObject,
    amb_dim: usize,
    nu_ambient_rows: Vec<Vec<Int>>,
    nu_well_defined: Option<bool>,
    additivity_mod_square: Option<bool>,
) -> Result<PnexsequReport, PassiError> {
    let step = ZHom::new(
        quot_n.group.clone(),
        quot_low.group.clone(),
        quot_low.proj.matrix().mul(&quot_n.lift),
    )?;
    let ker = crate::zmod::kernel_subobject(&step);
    let ker_rows = ker.incl.matrix().transpose();
    let mut nu_rows = ZMatrix::zeros(nu_ambient_rows.len(), quot_n.group.num_coords());
    for (r, v) in nu_ambient_rows.iter().enumerate() {
        let col = ZMatrix::from_fn(amb_dim, 1, |i, _| v[i].clone());
        let img = quot_n.proj.matrix().mul(&col);
        for i in 0..img.rows {
            nu_rows.set(r, i, img.get(i, 0).clone());
        }
    }
    let exact = spans_equal(&quot_n.group, &nu_rows, &ker_rows);
    Ok(PnexsequReport {
        n,
        p_n: quot_n.group.clone(),
        p_n_minus_1: quot_low.group.clone(),
        nu_image: subgroup_of(&quot_n.group, &nu_rows),
        kernel: ker.group,
        exact,
        nu_well_defined,
        additivity_mod_square,
    })
}

/* # hom-group categories over the free objects */

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Mon,
    Gr,
}

/// The hom-group from rank `k` to rank `l` at degree `n`: free on the block
/// monomials, which double as the word-tuple morphisms of total length up to
/// `n`. Classes of longer or signed morphisms expand over the stored basis.
pub struct PassiHom {
    pub side: Side,
    pub k: usize,
    pub l: usize,
    pub n: usize,
    ring: TruncatedRing,
    index: BTreeMap<Monomial, usize>,
    basis: Vec<Monomial>,
    pub group: FgAbGroup,
    basis_matrix: ZMatrix,
    basis_inv: ZMatrix,
}

pub fn hom_object(side: Side, k: usize, l: usize, n: usize) -> Result<PassiHom, PassiError> {
    if k == 0 {
        return Err(PassiError::Shape("source rank must be positive".into()));
    }
    let blocks: Vec<(usize, bool)> = (0..k).map(|_| (l, false)).collect();
    let ring = TruncatedRing::new(n, &blocks);
    if n > 0 && ring.count_monomials(1, n) > MONOMIAL_BUDGET {
        return Err(PassiError::Budget("hom-group basis exceeds the budget".into()));
    }
    let basis = if n == 0 { Vec::new() } else { ring.monomials(1, n) };
    let index: BTreeMap<Monomial, usize> =
        basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let dim = basis.len();
    let mut basis_matrix = ZMatrix::zeros(dim, dim);
    for (j, mono) in basis.iter().enumerate() {
        let coords = class_coords(&ring, &index, dim, mono)?;
        for (i, c) in coords.into_iter().enumerate() {
            basis_matrix.set(i, j, c);
        }
    }
    let basis_inv = if dim == 0 {
        ZMatrix::zeros(0, 0)
    } else {
        solve_columns(&basis_matrix, &ZMatrix::identity(dim)).ok_or_else(|| {
            PassiError::Verification("morphism basis is not invertible over the integers".into())
        })?
    };
    Ok(PassiHom {
        side,
        k,
        l,
        n,
        ring,
        index,
        basis,
        group: FgAbGroup::free(dim),
        basis_matrix,
        basis_inv,
    })
}

fn class_coords(
    ring: &TruncatedRing,
    index: &BTreeMap<Monomial, usize>,
    dim: usize,
    words: &[Vec<usize>],
) -> Result<Vec<Int>, PassiError> {
    let mut img = ring.one();
    for (block, word) in words.iter().enumerate() {
        for &i in word {
            img = ring.mul(&img, &ring.one_plus_var(block, i)?);
        }
    }
    ring.coords(&ring.sub(&img, &ring.one()), index, dim)
}

impl PassiHom {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// The `i`-th basis morphism as a word tuple.
    pub fn basis_morphism(&self, i: usize) -> &[Vec<usize>] {
        &self.basis[i]
    }

    /// Class of a positive word tuple morphism.
    pub fn class_of_words(&self, words: &[Vec<usize>]) -> Result<Vec<Int>, PassiError> {
        if words.len() != self.k {
            return Err(PassiError::Shape(format!(
                "{} words for source rank {}",
                words.len(),
                self.k
            )));
        }
        for w in words {
            for &i in w {
                if i >= self.l {
                    return Err(PassiError::Shape(format!("letter {i} outside rank {}", self.l)));
                }
            }
        }
        class_coords(&self.ring, &self.index, self.basis.len(), words)
    }

    /// Class of a signed word tuple morphism; inverses require the group side.
    pub fn class_of_signed(&self, words: &[Vec<(usize, bool)>]) -> Result<Vec<Int>, PassiError> {
        if words.len() != self.k {
            return Err(PassiError::Shape(format!(
                "{} words for source rank {}",
                words.len(),
                self.k
            )));
        }
        let has_inverse = words.iter().any(|w| w.iter().any(|&(_, inv)| inv));
        if has_inverse && self.side == Side::Mon {
            return Err(PassiError::Shape("inverse letters need the group side".into()));
        }
        let mut img = self.ring.one();
        for (block, word) in words.iter().enumerate() {
            for &(i, inv) in word {
                if i >= self.l {
                    return Err(PassiError::Shape(format!("letter {i} outside rank {}", self.l)));
                }
                let factor = if inv {
                    self.ring.inv_one_plus_var(block, i)?
                } else {
                    self.ring.one_plus_var(block, i)?
                };
                img = self.ring.mul(&img, &factor);
            }
        }
        self.ring.coords(
            &self.ring.sub(&img, &self.ring.one()),
            &self.index,
            self.basis.len(),
        )
    }

    /// Comparison columns: basis-morphism classes over the monomial basis.
    pub fn basis_matrix(&self) -> &ZMatrix {
        &self.basis_matrix
    }

    fn expand(&self, coords: &[Int]) -> Result<Vec<Int>, PassiError> {
        if coords.len() != self.basis.len() {
            return Err(PassiError::Shape("coordinate length mismatch".into()));
        }
        let col = ZMatrix::from_fn(coords.len(), 1, |r, _| coords[r].clone());
        let out = self.basis_inv.mul(&col);
        Ok((0..out.rows).map(|r| out.get(r, 0).clone()).collect())
    }
}

/// Substitutes the words of `g` into the letters of `f`: the composite of
/// `f : k -> l` followed by `g : l -> m` as word tuples.
fn substitute_words(g: &[Vec<usize>], f: &[Vec<usize>]) -> Vec<Vec<usize>> {
    f.iter()
        .map(|word| word.iter().flat_map(|&j| g[j].iter().copied()).collect())
        .collect()
}

fn substitute_signed(
    g: &[Vec<(usize, bool)>],
    f: &[Vec<(usize, bool)>],
) -> Vec<Vec<(usize, bool)>> {
    f.iter()
        .map(|word| {
            let mut out = Vec::new();
            for &(j, inv) in word {
                if inv {
                    for &(t, ti) in g[j].iter().rev() {
                        out.push((t, !ti));
                    }
                } else {
                    out.extend(g[j].iter().copied());
                }
            }
            out
        })
        .collect()
}

/// Bilinear composition of classes: `xi` in the hom from `l` to `m`, `eta` in
/// the hom from `k` to `l`, result in the hom from `k` to `m`. Both inputs are
/// expanded over the stored morphism bases, composed pairwise, and the classes
/// of the composites are summed.
pub fn compose_classes(
    g: &PassiHom,
    f: &PassiHom,
    out: &PassiHom,
    xi: &[Int],
    eta: &[Int],
) -> Result<Vec<Int>, PassiError> {
    if g.side != f.side || f.side != out.side || g.n != f.n || f.n != out.n {
        return Err(PassiError::Shape("hom objects disagree on side or degree".into()));
    }
    if g.k != f.l || out.k != f.k || out.l != g.l {
        return Err(PassiError::Shape("hom objects do not chain".into()));
    }
    let cg = g.expand(xi)?;
    let cf = f.expand(eta)?;
    let mut acc = vec![Int::zero(); out.rank()];
    for (i, ci) in cg.iter().enumerate() {
        if ci.is_zero() {
            continue;
        }
        for (j, cj) in cf.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            let composite = substitute_words(g.basis_morphism(i), f.basis_morphism(j));
            let cls = out.class_of_words(&composite)?;
            for (t, c) in cls.into_iter().enumerate() {
                acc[t] += ci * cj * c;
            }
        }
    }
    Ok(acc)
}

/* # monoid versus group hom categories */

/// Comparison of the two sides of a hom-group: the change of basis from
/// morphism classes to monomial coordinates, plus composition transport
/// checks including one genuinely signed witness.
pub struct MonGrReport {
    pub k: usize,
    pub l: usize,
    pub n: usize,
    pub matrix: ZMatrix,
    pub unimodular: bool,
    pub composition_preserved: bool,
    pub signed_witness_ok: bool,
    pub identity_at_degree_one: Option<bool>,
}

impl MonGrReport {
    pub fn passed(&self) -> bool {
        self.unimodular
            && self.composition_preserved
            && self.signed_witness_ok
            && self.identity_at_degree_one.unwrap_or(true)
    }
}

pub fn compare_mon_gr(k: usize, l: usize, n: usize) -> Result<MonGrReport, PassiError> {
    if l == 0 {
        return Err(PassiError::Shape("target rank must be positive".into()));
    }
    let mon = hom_object(Side::Mon, k, l, n)?;
    let gr = hom_object(Side::Gr, k, l, n)?;
    if mon.basis_matrix() != gr.basis_matrix() {
        return Err(PassiError::Verification(
            "positive word classes disagree between the sides".into(),
        ));
    }
    let matrix = mon.basis_matrix().clone();
    let unimodular = matrix.rows == matrix.cols && (matrix.rows == 0 || matrix.is_unimodular());

    // endomorphisms of the target compose with morphisms from the source
    let mon_end = hom_object(Side::Mon, l, l, n)?;
    let gr_end = hom_object(Side::Gr, l, l, n)?;
    let mut composition_preserved = true;
    let probe = 2.min(n.max(1));
    'comp: for gi in 0..gr_end.rank() {
        if monomial_degree(gr_end.basis_morphism(gi)) > probe {
            continue;
        }
        for fi in 0..gr.rank() {
            if monomial_degree(gr.basis_morphism(fi)) > probe {
                continue;
            }
            let composite = substitute_words(gr_end.basis_morphism(gi), gr.basis_morphism(fi));
            let direct_gr = gr.class_of_words(&composite)?;
            let via_gr = compose_classes(
                &gr_end,
                &gr,
                &gr,
                &gr_end.class_of_words(gr_end.basis_morphism(gi))?,
                &gr.class_of_words(gr.basis_morphism(fi))?,
            )?;
            let via_mon = compose_classes(
                &mon_end,
                &mon,
                &mon,
                &mon_end.class_of_words(mon_end.basis_morphism(gi))?,
                &mon.class_of_words(mon.basis_morphism(fi))?,
            )?;
            if via_gr != direct_gr || via_mon != direct_gr {
                composition_preserved = false;
                break 'comp;
            }
        }
    }
    // a word longer than the degree bound must still transport correctly
    if n >= 1 && composition_preserved {
        let long: Vec<Vec<usize>> = (0..k)
            .map(|b| if b == 0 { vec![0; n + 1] } else { Vec::new() })
            .collect();
        let long_class = mon.class_of_words(&long)?;
        for gi in 0..mon_end.rank().min(3) {
            let composite = substitute_words(mon_end.basis_morphism(gi), &long);
            let direct = mon.class_of_words(&composite)?;
            let via = compose_classes(
                &mon_end,
                &mon,
                &mon,
                &mon_end.class_of_words(mon_end.basis_morphism(gi))?,
                &long_class,
            )?;
            if via != direct {
                composition_preserved = false;
                break;
            }
        }
    }

    // signed witness: invert the first generator, push through the squaring
    // endomorphism, compare with the direct class of the composite
    let mut signed_witness_ok = true;
    if n >= 1 {
        let f_signed: Vec<Vec<(usize, bool)>> =
            (0..k).map(|b| if b == 0 { vec![(0, true)] } else { Vec::new() }).collect();
        let g_sq: Vec<Vec<(usize, bool)>> =
            (0..l).map(|j| vec![(j, false), (j, false)]).collect();
        let g_sq_pos: Vec<Vec<usize>> = (0..l).map(|j| vec![j, j]).collect();
        let composite = substitute_signed(&g_sq, &f_signed);
        let direct = gr.class_of_signed(&composite)?;
        let via = compose_classes(
            &gr_end,
            &gr,
            &gr,
            &gr_end.class_of_words(&g_sq_pos)?,
            &gr.class_of_signed(&f_signed)?,
        )?;
        if via != direct {
            signed_witness_ok = false;
        }
    }

    let identity_at_degree_one =
        (n == 1).then(|| matrix == ZMatrix::identity(matrix.rows));
    Ok(MonGrReport {
        k,
        l,
        n,
        matrix,
        unimodular,
        composition_preserved,
        signed_witness_ok,
        identity_at_degree_one,
    })
}

/* # the two-path universal check */

/// Agreement between the direct polynomial truncation of the linearized hom
/// and the quotient model, with stabilization across one budget step.
pub struct TnUniversalReport {
    pub operad: String,
    pub m: usize,
    pub l: usize,
    pub n: usize,
    pub length_budget: usize,
    pub direct: FgAbGroup,
    pub quotient: FgAbGroup,
    pub matches: bool,
}

impl TnUniversalReport {
    pub fn passed(&self) -> bool {
        self.matches
    }
}

/// Elements of the free algebra on `l` generators with length in `1..=max`:
/// words when associative, exponent vectors when commutative.
fn free_alg_elements(assoc: bool, l: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if assoc {
        let mut level: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..max {
            let mut next = Vec::new();
            for w in &level {
                for i in 0..l {
                    let mut n = w.clone();
                    n.push(i);
                    next.push(n);
                }
            }
            out.extend(next.iter().cloned());
            level = next;
        }
    } else {
        // exponent vectors with total in 1..=max
        let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
        while let Some((prefix, used)) = stack.pop() {
            if prefix.len() == l {
                if used >= 1 {
                    out.push(prefix);
                }
                continue;
            }
            for e in 0..=(max - used) {
                let mut n = prefix.clone();
                n.push(e);
                stack.push((n, used + e));
            }
        }
        out.sort();
    }
    out
}

fn elem_len(assoc: bool, e: &[usize]) -> usize {
    if assoc {
        e.len()
    } else {
        e.iter().sum()
    }
}

fn elem_mul(assoc: bool, a: &[usize], b: &[usize]) -> Vec<usize> {
    if assoc {
        a.iter().chain(b.iter()).copied().collect()
    } else {
        a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
    }
}

/// Direct side: the reduced linearization of tuples of free algebra elements,
/// divided by the span of the alternating sums over nonempty slot subsets of
/// every in-budget tuple of composable summands.
fn tn_direct(assoc: bool, m: usize, l: usize, n: usize, budget: usize) -> Result<FgAbGroup, PassiError> {
    let elems = free_alg_elements(assoc, l, budget);
    let unit: Vec<usize> = if assoc { Vec::new() } else { vec![0; l] };
    // m-tuples with positive total length within the budget
    let mut tuples: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for _ in 0..m {
        let mut next = Vec::new();
        for t in &tuples {
            let used: usize = t.iter().map(|e| elem_len(assoc, e)).sum();
            next.push({
                let mut u = t.clone();
                u.push(unit.clone());
                u
            });
            for e in &elems {
                if used + elem_len(assoc, e) <= budget {
                    let mut u = t.clone();
                    u.push(e.clone());
                    next.push(u);
                }
            }
        }
        tuples = next;
    }
    tuples.retain(|t| t.iter().map(|e| elem_len(assoc, e)).sum::<usize>() >= 1);
    tuples.sort();
    let index: BTreeMap<Vec<Vec<usize>>, usize> =
        tuples.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let dim = tuples.len();
    if dim > SPAN_ROW_BUDGET {
        return Err(PassiError::Budget("tuple basis exceeds the budget".into()));
    }

    // summand tuples: ordered when associative, nondecreasing otherwise
    let mut rel_rows: Vec<Vec<Int>> = Vec::new();
    let mut chains: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..=n {
        let mut next = Vec::new();
        for c in &chains {
            let used: usize = c.iter().map(|&i| {
                tuples[i].iter().map(|e| elem_len(assoc, e)).sum::<usize>()
            }).sum();
            let lo = if assoc { 0 } else { c.last().map_or(0, |&i| i) };
            for (i, t) in tuples.iter().enumerate().skip(lo) {
                let tl: usize = t.iter().map(|e| elem_len(assoc, e)).sum();
                if used + tl <= budget {
                    let mut u = c.clone();
                    u.push(i);
                    next.push(u);
                }
            }
        }
        chains = next;
    }
    for chain in &chains {
        let mut row = vec![Int::zero(); dim];
        // alternating sum over nonempty subsets of the summand slots
        for mask in 1u32..(1 << (n + 1)) {
            let mut prod: Vec<Vec<usize>> = vec![unit.clone(); m];
            let mut bits = 0;
            for (slot, &ti) in chain.iter().enumerate() {
                if mask & (1 << slot) != 0 {
                    bits += 1;
                    for (comp, e) in tuples[ti].iter().enumerate() {
                        prod[comp] = elem_mul(assoc, &prod[comp], e);
                    }
                }
            }
            let sign = if (n + 1 - bits) % 2 == 0 { Int::one() } else { -Int::one() };
            if let Some(&i) = index.get(&prod) {
                row[i] += sign;
            } else if prod.iter().map(|e| elem_len(assoc, e)).sum::<usize>() == 0 {
                // the unit tuple is the basepoint class and contributes zero
            } else {
                return Err(PassiError::Verification(
                    "summand product escaped the tuple basis".into(),
                ));
            }
        }
        if row.iter().any(|c| !c.is_zero()) {
            rel_rows.push(row);
        }
        if rel_rows.len() > SPAN_ROW_BUDGET {
            return Err(PassiError::Budget("relation rows exceed the budget".into()));
        }
    }
    Ok(quotient_by_rows(&FgAbGroup::free(dim), &rows_matrix(&rel_rows, dim)).group)
}

pub fn tn_universal_check(
    operad: &str,
    m: usize,
    l: usize,
    n: usize,
    length_budget: usize,
) -> Result<TnUniversalReport, PassiError> {
    let assoc = match operad {
        "as" => true,
        "com" => false,
        other => {
            return Err(PassiError::Shape(format!(
                "the check needs a binary unital operad, com or as, not {other}"
            )))
        }
    };
    if m == 0 || l == 0 {
        return Err(PassiError::Shape("ranks must be positive".into()));
    }
    if n == 0 {
        let trivial = FgAbGroup::trivial();
        let direct = tn_direct(assoc, m, l, 0, length_budget.max(1))?;
        return Ok(TnUniversalReport {
            operad: operad.to_string(),
            m,
            l,
            n,
            length_budget,
            matches: direct.is_isomorphic(&trivial),
            direct,
            quotient: trivial,
        });
    }
    if length_budget < n + 1 {
        return Err(PassiError::Shape(format!(
            "length budget {length_budget} below the first relation length {}",
            n + 1
        )));
    }
    let direct = tn_direct(assoc, m, l, n, length_budget)?;
    let next = tn_direct(assoc, m, l, n, length_budget + 1)?;
    if !direct.is_isomorphic(&next) {
        return Err(PassiError::NotStabilized { budget: length_budget, next: length_budget + 1 });
    }
    // quotient side: m blocks of rank l, commutative exactly for com
    let ring = TruncatedRing::new(n, &vec![(l, !assoc); m]);
    let dim = ring.count_monomials(1, n);
    if dim > MONOMIAL_BUDGET {
        return Err(PassiError::Budget("quotient basis exceeds the budget".into()));
    }
    let quotient = FgAbGroup::free(dim as usize);
    let matches = direct.is_isomorphic(&quotient);
    Ok(TnUniversalReport {
        operad: operad.to_string(),
        m,
        l,
        n,
        length_budget,
        direct,
        quotient,
        matches,
    })
}

/* # functoriality on free specs */

/// The hom induced on quotient groups by a free-monoid substitution sending
/// generator `i` of the source to `images[i]` in the target.
pub fn free_substitution_hom(
    src_rank: usize,
    dst_rank: usize,
    images: &[Vec<usize>],
    n: usize,
) -> Result<ZHom, PassiError> {
    if images.len() != src_rank {
        return Err(PassiError::Shape(format!(
            "{} images for rank {src_rank}",
            images.len()
        )));
    }
    let src = TruncatedRing::new(n, &[(src_rank, false)]);
    let dst = TruncatedRing::new(n, &[(dst_rank, false)]);
    if src.count_monomials(1, n) > MONOMIAL_BUDGET || dst.count_monomials(1, n) > MONOMIAL_BUDGET {
        return Err(PassiError::Budget("monomial basis exceeds the budget".into()));
    }
    let src_basis = if n == 0 { Vec::new() } else { src.monomials(1, n) };
    let dst_basis = if n == 0 { Vec::new() } else { dst.monomials(1, n) };
    let dst_index: BTreeMap<Monomial, usize> =
        dst_basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    // generator letters map to the shifted images of their words
    let mut letter_images = Vec::with_capacity(src_rank);
    for w in images {
        let mut img = dst.one();
        for &i in w {
            if i >= dst_rank {
                return Err(PassiError::Shape(format!("letter {i} outside rank {dst_rank}")));
            }
            img = dst.mul(&img, &dst.one_plus_var(0, i)?);
        }
        letter_images.push(dst.sub(&img, &dst.one()));
    }
    let mut mat = ZMatrix::zeros(dst_basis.len(), src_basis.len());
    for (j, mono) in src_basis.iter().enumerate() {
        let mut img = dst.one();
        for &i in &mono[0] {
            img = dst.mul(&img, &letter_images[i]);
        }
        let coords = dst.coords(&img, &dst_index, dst_basis.len())?;
        for (i, c) in coords.into_iter().enumerate() {
            mat.set(i, j, c);
        }
    }
    Ok(ZHom::new(
        FgAbGroup::free(src_basis.len()),
        FgAbGroup::free(dst_basis.len()),
        mat,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zmod::bi;
    use proptest::prelude::*;

    fn int_vec(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| bi(x)).collect()
    }

    #[test]
    fn free_monoid_ranks_follow_the_word_count() {
        for (rank, n, expect) in [(2usize, 2usize, 6usize), (2, 3, 14), (1, 2, 2), (3, 1, 3)] {
            let pg = passi_group(&MonoidSpec::free(rank), n).unwrap();
            assert_eq!(pg.group().rank(), expect, "rank {rank} degree {n}");
            assert!(pg.group().torsion().is_empty());
        }
        let pg = passi_group(&MonoidSpec::free(2), 0).unwrap();
        assert!(pg.group().is_trivial());
    }

    #[test]
    fn product_of_free_monoids_counts_block_monomials() {
        let spec = MonoidSpec::product(vec![MonoidSpec::free(1), MonoidSpec::free(1)]).unwrap();
        let pg = passi_group(&spec, 2).unwrap();
        // degree one: two variables; degree two: three products across blocks
        assert_eq!(pg.group().rank(), 5);
        let x = MonoidElement::Tuple(vec![
            MonoidElement::Word(vec![0]),
            MonoidElement::Word(vec![]),
        ]);
        let coords = pg.reduce(&x).unwrap();
        assert_eq!(coords.iter().filter(|c| !c.is_zero()).count(), 1);
    }

    #[test]
    fn cyclic_groups_match_their_abelianization_at_degree_one() {
        let pg = passi_group(&MonoidSpec::cyclic(3).unwrap(), 1).unwrap();
        assert_eq!(pg.group().rank(), 0);
        assert_eq!(pg.group().torsion(), &[bi(3)]);
        // degree two over the two-element group picks up the factor of two
        let pg2 = passi_group(&MonoidSpec::cyclic(2).unwrap(), 2).unwrap();
        assert_eq!(pg2.group().rank(), 0);
        assert_eq!(pg2.group().torsion(), &[bi(4)]);
        for n in 1..=3 {
            let t = passi_group(&MonoidSpec::parse("trivial").unwrap(), n).unwrap();
            assert!(t.group().is_trivial());
        }
    }

    #[test]
    fn reduction_kills_high_products_in_both_models() {
        // free side: expand a triple product over monoid words and reduce
        let pg = passi_group(&MonoidSpec::free(2), 2).unwrap();
        let words: [&[usize]; 3] = [&[0], &[1, 0], &[1]];
        let mut acc = vec![Int::zero(); pg.group().num_coords()];
        for mask in 0u8..8 {
            let mut w: Vec<usize> = Vec::new();
            let mut bits = 0;
            for (i, word) in words.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    bits += 1;
                    w.extend_from_slice(word);
                }
            }
            let sign = if (3 - bits) % 2 == 0 { bi(1) } else { bi(-1) };
            let coords = pg.reduce(&MonoidElement::Word(w)).unwrap();
            for (a, c) in acc.iter_mut().zip(coords) {
                *a += &sign * c;
            }
        }
        assert!(acc.iter().all(|c| c.is_zero()), "triple products die at degree two");

        // finite side: same expansion over a cyclic table
        let pg = passi_group(&MonoidSpec::cyclic(4).unwrap(), 2).unwrap();
        let elems = [1usize, 2, 3];
        let mut acc = vec![Int::zero(); pg.group().num_coords()];
        for mask in 0u8..8 {
            let mut prod = 0usize;
            let mut bits = 0;
            for (i, &e) in elems.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    bits += 1;
                    prod = (prod + e) % 4;
                }
            }
            let sign = if (3 - bits) % 2 == 0 { bi(1) } else { bi(-1) };
            let coords = pg.reduce(&MonoidElement::Elem(prod)).unwrap();
            for (a, c) in acc.iter_mut().zip(coords) {
                *a += &sign * c;
            }
        }
        normalize_coords(pg.group(), &mut acc);
        assert!(acc.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn groupification_matrix_is_unimodular_and_explicit_in_rank_one() {
        let rep = groupification_iso_check(1, 2).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.dim, 2);
        // columns: x - 1 and x^2 - 1 over the monomials y, y^2
        assert_eq!(rep.matrix, ZMatrix::from_i64_rows(&[vec![1, 2], vec![0, 1]]));

        let rep = groupification_iso_check(2, 3).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.dim, 14);

        let rep = groupification_iso_check(2, 1).unwrap();
        assert_eq!(rep.matrix, ZMatrix::identity(2));
    }

    #[test]
    fn inverse_class_expands_over_word_classes() {
        // x^{-1} - 1 = -3 (x - 1) + (x^2 - 1) at degree two
        let rep = groupification_iso_check(1, 2).unwrap();
        let ring = TruncatedRing::new(2, &[(1, false)]);
        let index: BTreeMap<Monomial, usize> =
            ring.monomials(1, 2).into_iter().enumerate().map(|(i, m)| (m, i)).collect();
        let inv = ring.inv_one_plus_var(0, 0).unwrap();
        let v = ring.coords(&ring.sub(&inv, &ring.one()), &index, 2).unwrap();
        assert_eq!(v, int_vec(&[-1, 1]));
        let col = ZMatrix::from_fn(2, 1, |r, _| v[r].clone());
        let sol = solve_columns(&rep.matrix, &col).unwrap();
        assert_eq!(sol.get(0, 0), &bi(-3));
        assert_eq!(sol.get(1, 0), &bi(1));
    }

    #[test]
    fn monoid_algebras_verify_and_bad_tables_fail() {
        let op = Operad::builtin("com", 3).unwrap();
        let z2 = vec![vec![0, 1], vec![1, 0]];
        assert!(FinitePAlgebra::monoid_algebra(&op, &z2).is_ok());

        let broken = vec![vec![0, 1], vec![1, 1]];
        // idempotent table is fine for com; break associativity instead
        assert!(FinitePAlgebra::monoid_algebra(&op, &broken).is_ok());
        let nonassoc = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 1, 0]];
        assert!(matches!(
            FinitePAlgebra::monoid_algebra(&op, &nonassoc),
            Err(PassiError::Shape(_))
        ));

        let as_op = Operad::builtin("as", 3).unwrap();
        let left_zero = vec![vec![0, 1, 2], vec![1, 1, 1], vec![2, 2, 2]];
        assert!(FinitePAlgebra::monoid_algebra(&as_op, &left_zero).is_ok());
    }

    #[test]
    fn operadic_and_classical_quotients_agree_on_builtin_operads() {
        // commutative route over the two-element group
        let op = Operad::builtin("com", 3).unwrap();
        let z2 = vec![vec![0, 1], vec![1, 0]];
        let alg = FinitePAlgebra::monoid_algebra(&op, &z2).unwrap();
        let viaop = operadic_passi(&alg, 1).unwrap();
        assert!(viaop.truncation_certified);
        let classical = passi_group(&MonoidSpec::cyclic(2).unwrap(), 1).unwrap();
        assert!(viaop.group.is_isomorphic(classical.group()));
        assert_eq!(viaop.group.torsion(), &[bi(2)]);

        // associative route over a noncommutative monoid
        let as_op = Operad::builtin("as", 4).unwrap();
        let left_zero = vec![vec![0, 1, 2], vec![1, 1, 1], vec![2, 2, 2]];
        let alg = FinitePAlgebra::monoid_algebra(&as_op, &left_zero).unwrap();
        let spec = MonoidSpec::finite(left_zero.clone()).unwrap();
        for n in 1..=3 {
            let a = operadic_passi(&alg, n).unwrap();
            assert!(a.truncation_certified, "builtin cutoff is exact");
            let c = passi_group(&spec, n).unwrap();
            assert!(
                a.group.is_isomorphic(c.group()),
                "operadic and classical invariants at degree {n}"
            );
        }

        let trivial = FinitePAlgebra::trivial(&op).unwrap();
        assert!(operadic_passi(&trivial, 1).unwrap().group.is_trivial());
    }

    #[test]
    fn connecting_sequence_is_exact_on_each_route() {
        let rep = pnexsequ_check(PnexsequInput::FreeMonoid { rank: 1 }, 2).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.nu_image.rank(), 1);
        assert_eq!(rep.kernel.rank(), 1);

        let rep = pnexsequ_check(
            PnexsequInput::FiniteMonoid { table: vec![vec![0, 1], vec![1, 0]] },
            2,
        )
        .unwrap();
        assert!(rep.passed());
        assert_eq!(rep.p_n.torsion(), &[bi(4)]);
        assert_eq!(rep.p_n_minus_1.torsion(), &[bi(2)]);
        assert_eq!(rep.kernel.torsion(), &[bi(2)]);

        let op = Operad::builtin("com", 3).unwrap();
        let alg = FinitePAlgebra::monoid_algebra(&op, &[vec![0, 1], vec![1, 0]]).unwrap();
        let rep = pnexsequ_check(PnexsequInput::Algebra(&alg), 2).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.nu_well_defined, Some(true));
        assert_eq!(rep.additivity_mod_square, Some(true));

        // degree one: the single-slot image spans everything
        let rep = pnexsequ_check(PnexsequInput::FreeMonoid { rank: 2 }, 1).unwrap();
        assert!(rep.exact);
    }

    #[test]
    fn hom_groups_count_block_monomials() {
        assert_eq!(hom_object(Side::Mon, 1, 1, 2).unwrap().rank(), 2);
        assert_eq!(hom_object(Side::Mon, 2, 1, 2).unwrap().rank(), 5);
        assert_eq!(hom_object(Side::Gr, 2, 1, 2).unwrap().rank(), 5);
        assert_eq!(hom_object(Side::Mon, 1, 2, 2).unwrap().rank(), 6);
    }

    #[test]
    fn class_composition_matches_direct_substitution() {
        let h = hom_object(Side::Mon, 1, 1, 2).unwrap();
        for a in 1usize..=3 {
            for b in 1usize..=3 {
                let xi = h.class_of_words(&[vec![0; a]]).unwrap();
                let eta = h.class_of_words(&[vec![0; b]]).unwrap();
                let composed = compose_classes(&h, &h, &h, &xi, &eta).unwrap();
                let direct = h.class_of_words(&[vec![0; a * b]]).unwrap();
                assert_eq!(composed, direct, "powers {a} and {b}");
            }
        }
        // associativity over three short endomorphisms
        for a in 1usize..=2 {
            for b in 1..=2 {
                for c in 1..=2 {
                    let ca = h.class_of_words(&[vec![0; a]]).unwrap();
                    let cb = h.class_of_words(&[vec![0; b]]).unwrap();
                    let cc = h.class_of_words(&[vec![0; c]]).unwrap();
                    let left = compose_classes(
                        &h,
                        &h,
                        &h,
                        &compose_classes(&h, &h, &h, &ca, &cb).unwrap(),
                        &cc,
                    )
                    .unwrap();
                    let right = compose_classes(
                        &h,
                        &h,
                        &h,
                        &ca,
                        &compose_classes(&h, &h, &h, &cb, &cc).unwrap(),
                    )
                    .unwrap();
                    assert_eq!(left, right);
                }
            }
        }
        // bilinearity in the second slot
        let xi = h.class_of_words(&[vec![0, 0]]).unwrap();
        let e1 = h.class_of_words(&[vec![0]]).unwrap();
        let e2 = h.class_of_words(&[vec![0, 0, 0]]).unwrap();
        let sum: Vec<Int> = e1.iter().zip(&e2).map(|(a, b)| a + b).collect();
        let lhs = compose_classes(&h, &h, &h, &xi, &sum).unwrap();
        let r1 = compose_classes(&h, &h, &h, &xi, &e1).unwrap();
        let r2 = compose_classes(&h, &h, &h, &xi, &e2).unwrap();
        let rhs: Vec<Int> = r1.iter().zip(&r2).map(|(a, b)| a + b).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mon_gr_comparison_is_unimodular_and_transports_composition() {
        let rep = compare_mon_gr(1, 1, 2).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.matrix, ZMatrix::from_i64_rows(&[vec![1, 2], vec![0, 1]]));

        let rep = compare_mon_gr(1, 2, 2).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.matrix.rows, 6);

        let rep = compare_mon_gr(2, 1, 1).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.identity_at_degree_one, Some(true));
    }

    #[test]
    fn signed_class_agrees_with_the_hand_expansion() {
        // squaring endomorphism after inversion: -2y + 3y^2 at degree two
        let gr = hom_object(Side::Gr, 1, 1, 2).unwrap();
        let f = gr.class_of_signed(&[vec![(0, true)]]).unwrap();
        assert_eq!(f, int_vec(&[-1, 1]));
        let g = gr.class_of_words(&[vec![0, 0]]).unwrap();
        let composed = compose_classes(&gr, &gr, &gr, &g, &f).unwrap();
        assert_eq!(composed, int_vec(&[-2, 3]));
        let direct = gr.class_of_signed(&[vec![(0, true), (0, true)]]).unwrap();
        assert_eq!(direct, composed);
    }

    #[test]
    fn two_path_truncation_agrees_for_both_builtin_operads() {
        let rep = tn_universal_check("com", 1, 1, 1, 3).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.direct.rank(), 1);
        assert!(rep.direct.torsion().is_empty());

        let rep = tn_universal_check("as", 1, 1, 2, 3).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.direct.rank(), 2);

        let rep = tn_universal_check("as", 1, 2, 1, 3).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.quotient.rank(), 2);

        let rep = tn_universal_check("com", 2, 1, 1, 3).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.quotient.rank(), 2);

        let rep = tn_universal_check("as", 1, 1, 0, 2).unwrap();
        assert!(rep.passed());
        assert!(rep.direct.is_trivial());
    }

    #[test]
    fn substitution_homs_commute_with_reduction() {
        // send both source letters into words of the one-letter target
        let images = vec![vec![0], vec![0, 0]];
        let hom = free_substitution_hom(2, 1, &images, 2).unwrap();
        let src = passi_group(&MonoidSpec::free(2), 2).unwrap();
        let dst = passi_group(&MonoidSpec::free(1), 2).unwrap();
        for word in [vec![0], vec![1], vec![0, 1], vec![1, 1], vec![0, 0, 1]] {
            let image_word: Vec<usize> =
                word.iter().flat_map(|&i| images[i].iter().copied()).collect();
            let lhs = dst.reduce(&MonoidElement::Word(image_word)).unwrap();
            let v = src.reduce(&MonoidElement::Word(word.clone())).unwrap();
            let col = ZMatrix::from_fn(v.len(), 1, |r, _| v[r].clone());
            let out = hom.matrix().mul(&col);
            let rhs: Vec<Int> = (0..out.rows).map(|r| out.get(r, 0).clone()).collect();
            assert_eq!(lhs, rhs, "word {word:?}");
        }
    }

    #[test]
    fn spec_parsing_round_trips_the_cli_forms() {
        assert_eq!(MonoidSpec::parse("free:2").unwrap(), MonoidSpec::free(2));
        assert_eq!(MonoidSpec::parse("gfree:1").unwrap(), MonoidSpec::group_free(1));
        assert!(MonoidSpec::parse("cyclic:3").is_ok());
        assert!(MonoidSpec::parse("free:1*free:2").is_ok());
        assert!(MonoidSpec::parse("free:1*cyclic:2").is_err());
        assert!(MonoidSpec::parse("weird").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn magnus_is_multiplicative(
            w1 in proptest::collection::vec(0usize..2, 0..4),
            w2 in proptest::collection::vec(0usize..2, 0..4),
        ) {
            let pg = passi_group(&MonoidSpec::free(2), 3).unwrap();
            let ring = TruncatedRing::new(3, &[(2, false)]);
            let index: BTreeMap<Monomial, usize> =
                ring.monomials(1, 3).into_iter().enumerate().map(|(i, m)| (m, i)).collect();
            let cat: Vec<usize> = w1.iter().chain(w2.iter()).copied().collect();
            let joint = pg.reduce(&MonoidElement::Word(cat)).unwrap();
            let m1 = magnus_element(&ring, &MonoidSpec::free(2), &MonoidElement::Word(w1)).unwrap();
            let m2 = magnus_element(&ring, &MonoidSpec::free(2), &MonoidElement::Word(w2)).unwrap();
            let prod = ring.sub(&ring.mul(&m1, &m2), &ring.one());
            let coords = ring.coords(&prod, &index, index.len()).unwrap();
            prop_assert_eq!(joint, coords);
        }

        #[test]
        fn signed_words_cancel_against_their_inverses(
            w in proptest::collection::vec((0usize..2, proptest::bool::ANY), 1..4),
        ) {
            let ring = TruncatedRing::new(3, &[(2, false)]);
            let spec = MonoidSpec::group_free(2);
            let fwd = magnus_element(&ring, &spec, &MonoidElement::GroupWord(w.clone())).unwrap();
            let back: Vec<(usize, bool)> =
                w.iter().rev().map(|&(i, inv)| (i, !inv)).collect();
            let bwd = magnus_element(&ring, &spec, &MonoidElement::GroupWord(back)).unwrap();
            prop_assert_eq!(ring.mul(&fwd, &bwd), ring.one());
        }
    }
}
