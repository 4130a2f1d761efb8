//! Operator presentations of additive functors on the span category.
//!
//! A presentation stores one abelian group per arity together with matrices
//! for the generating operators: fold and swap images under the covariant
//! leg, decorated fold, swap, and scalar images under the contravariant leg.
//! Arbitrary surjections act through a fixed word decomposition, so the
//! relation checkers certify exactly the generator relations, the inverse
//! and duplication laws, the big fold-exchange family, and the double-coset
//! exchange law on lifted squares. Extraction from a span functor and the
//! reconstruction back are both provided, along with the degree-one and
//! degree-two specializations.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};
use thiserror::Error;

use crate::functorlab::{
    cross_effect, BaseCat, BaseKind, CrossEffectResult, FunctorError, Mor, TruncatedFunctor,
};
use crate::opcat::{self, DecoratedMap, Flavor, OpcatError};
use crate::operad::{OpElem, Operad, OperadError};
use crate::perm::{Perm, PermError};
use crate::spans::{self, PlainMap, SpanError, SpanMorphism};
use crate::zmod::{FgAbGroup, Int, ZHom, ZmodError};

#[derive(Debug, Error)]
pub enum MkError {
    #[error(transparent)]
    Operad(#[from] OperadError),
    #[error(transparent)]
    Opcat(#[from] OpcatError),
    #[error(transparent)]
    Span(#[from] SpanError),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Zmod(#[from] ZmodError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("presentation shape: {0}")]
    Shape(String),
    #[error("relation template did not recompose: {0}")]
    Template(String),
    #[error("value at arity {n} must vanish for this extraction")]
    DegreeViolation { n: usize },
}

fn bi(c: i64) -> Int {
    Int::from(c)
}

/* # generating morphisms */

/// The fold `n -> n-1` merging positions `i` and `i+1` onto `i`.
pub fn fold_map(n: usize, i: usize) -> Result<PlainMap, MkError> {
    if n < 2 || i < 1 || i >= n {
        return Err(MkError::Shape(format!("no fold at position {i} on {n} letters")));
    }
    let map = (1..=n)
        .map(|x| if x <= i { x } else if x == i + 1 { i } else { x - 1 })
        .collect();
    Ok(PlainMap::new(Flavor::Omega, n, n - 1, map)?)
}

/// The adjacent swap `n -> n` exchanging `i` and `i+1`.
pub fn swap_map(n: usize, i: usize) -> Result<PlainMap, MkError> {
    if i < 1 || i >= n {
        return Err(MkError::Shape(format!("no swap at position {i} on {n} letters")));
    }
    let map = (1..=n)
        .map(|x| if x == i { i + 1 } else if x == i + 1 { i } else { x })
        .collect();
    Ok(PlainMap::new(Flavor::Omega, n, n, map)?)
}

pub fn perm_map(p: &Perm) -> Result<PlainMap, MkError> {
    let n = p.degree();
    Ok(PlainMap::new(Flavor::Omega, n, n, p.word())?)
}

/// The decorated block fold `n -> n-k` sending `i..=i+k` to `i`, carrying
/// `omega` on the merged point and units elsewhere.
pub fn fold_decorated(
    op: &Operad,
    n: usize,
    k: usize,
    i: usize,
    omega: OpElem,
) -> Result<DecoratedMap, MkError> {
    if k < 1 || k >= n || i < 1 || i > n - k {
        return Err(MkError::Shape(format!("no {k}-fold at position {i} on {n} letters")));
    }
    if omega.arity != k + 1 {
        return Err(MkError::Shape(format!(
            "fold decoration must have arity {}, got {}",
            k + 1,
            omega.arity
        )));
    }
    let map = (1..=n)
        .map(|x| if x < i { x } else if x <= i + k { i } else { x - k })
        .collect();
    let decorations =
        (1..=n - k).map(|y| if y == i { omega } else { op.unit() }).collect();
    Ok(DecoratedMap::new(Flavor::Omega, op, n, n - k, map, decorations)?)
}

/// The unit-decorated adjacent swap.
pub fn swap_decorated(op: &Operad, n: usize, i: usize) -> Result<DecoratedMap, MkError> {
    let plain = swap_map(n, i)?;
    let map = (1..=n).map(|x| plain.apply(x)).collect();
    Ok(DecoratedMap::new(Flavor::Omega, op, n, n, map, vec![op.unit(); n])?)
}

/// The identity map carrying arity-one decorations.
pub fn scalar_decorated(op: &Operad, alphas: &[OpElem]) -> Result<DecoratedMap, MkError> {
    let n = alphas.len();
    for a in alphas {
        if a.arity != 1 {
            return Err(MkError::Shape("scalar decorations must have arity one".into()));
        }
    }
    let map = (1..=n).collect();
    Ok(DecoratedMap::new(Flavor::Omega, op, n, n, map, alphas.to_vec())?)
}

/* # word decomposition */

#[derive(Debug, Clone, PartialEq, Eq)]
enum HFactor {
    Fold { n: usize, i: usize },
    Swap { n: usize, i: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum VFactor {
    Fold { n: usize, k: usize, i: usize, omega: OpElem },
    Swap { n: usize, i: usize },
    Scalar { alphas: Vec<OpElem> },
}

/// Adjacent-swap word for a permutation, outermost factor first.
fn swap_word(p: &Perm) -> Vec<usize> {
    let n = p.degree();
    let mut u: Vec<usize> = p.word();
    let mut swaps = Vec::new();
    loop {
        let mut moved = false;
        for idx in 0..n.saturating_sub(1) {
            if u[idx] > u[idx + 1] {
                u.swap(idx, idx + 1);
                swaps.push(idx + 1);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    // p * s_1 * ... * s_r = id, so p = s_r * ... * s_1
    swaps.reverse();
    swaps
}

/// The sorting permutation putting every fiber into a contiguous block in
/// target order; built so fiber orders are preserved.
fn sorting_perm(fibers: &[Vec<usize>], source: usize) -> Result<Perm, MkError> {
    let mut img = vec![0usize; source];
    let mut pos = 0usize;
    for fiber in fibers {
        for &x in fiber {
            pos += 1;
            img[x - 1] = pos;
        }
    }
    if pos != source {
        return Err(MkError::Template("fibers do not partition the source".into()));
    }
    Ok(Perm::from_word(&img)?)
}

fn factor_plain(f: &HFactor) -> Result<PlainMap, MkError> {
    match *f {
        HFactor::Fold { n, i } => fold_map(n, i),
        HFactor::Swap { n, i } => swap_map(n, i),
    }
}

fn factor_decorated(op: &Operad, f: &VFactor) -> Result<DecoratedMap, MkError> {
    match f {
        VFactor::Fold { n, k, i, omega } => fold_decorated(op, *n, *k, *i, *omega),
        VFactor::Swap { n, i } => swap_decorated(op, *n, *i),
        VFactor::Scalar { alphas } => scalar_decorated(op, alphas),
    }
}

/// Decomposes a surjection into fold and swap generators, outermost factor
/// first, and certifies the factorisation by recomposing it.
fn horizontal_word(h: &PlainMap) -> Result<Vec<HFactor>, MkError> {
    if h.flavor != Flavor::Omega {
        return Err(MkError::Shape("horizontal words need surjective maps".into()));
    }
    let (a, b) = (h.source, h.target);
    let fibers: Vec<Vec<usize>> = (1..=b).map(|y| h.fiber(y)).collect();
    let pi = sorting_perm(&fibers, a)?;

    let mut applied: Vec<HFactor> = Vec::new();
    let mut cur = a;
    for (y, fiber) in fibers.iter().enumerate() {
        for _ in 1..fiber.len() {
            applied.push(HFactor::Fold { n: cur, i: y + 1 });
            cur -= 1;
        }
    }
    let mut word: Vec<HFactor> = applied.into_iter().rev().collect();
    word.extend(swap_word(&pi).into_iter().map(|i| HFactor::Swap { n: a, i }));

    let mut comp = PlainMap::identity(Flavor::Omega, a);
    for f in word.iter().rev() {
        comp = PlainMap::compose(&factor_plain(f)?, &comp)?;
    }
    if comp != *h {
        return Err(MkError::Template(format!("surjection {:?} escaped its word", h)));
    }
    Ok(word)
}

/// Decomposes a decorated surjection into scalar, fold, and swap generators,
/// outermost factor first, recomposing to certify the factorisation.
fn vertical_word(op: &Operad, v: &DecoratedMap) -> Result<Vec<VFactor>, MkError> {
    if v.flavor != Flavor::Omega {
        return Err(MkError::Shape("vertical words need surjective decorated maps".into()));
    }
    let (a, b) = (v.source, v.target);
    let fibers: Vec<Vec<usize>> = (1..=b).map(|y| v.fiber(y)).collect();
    let pi = sorting_perm(&fibers, a)?;

    let mut applied: Vec<VFactor> = Vec::new();
    let mut cur = a;
    let mut alphas = vec![op.unit(); b];
    for (idx, fiber) in fibers.iter().enumerate() {
        let y = idx + 1;
        let c = fiber.len();
        if c >= 2 {
            applied.push(VFactor::Fold { n: cur, k: c - 1, i: y, omega: v.decoration(y) });
            cur -= c - 1;
        } else {
            alphas[idx] = v.decoration(y);
        }
    }
    let mut word: Vec<VFactor> = Vec::new();
    if alphas.iter().any(|&e| e != op.unit()) {
        word.push(VFactor::Scalar { alphas });
    }
    word.extend(applied.into_iter().rev());
    word.extend(swap_word(&pi).into_iter().map(|i| VFactor::Swap { n: a, i }));

    let mut comp = DecoratedMap::identity(Flavor::Omega, op, a)?;
    for f in word.iter().rev() {
        comp = opcat::compose(op, &factor_decorated(op, f)?, &comp)?;
    }
    if comp != *v {
        return Err(MkError::Template(format!("decorated map {:?} escaped its word", v)));
    }
    Ok(word)
}

/* # certificates */

#[derive(Debug, Clone)]
pub struct RelationFailure {
    pub name: String,
    pub lhs: ZHom,
    pub rhs: ZHom,
}

/// Outcome of a relation sweep: every instance is listed by name on exactly
/// one side. An empty failure list certifies the swept family.
#[derive(Debug, Clone, Default)]
pub struct PseudoMackeyCertificate {
    pub verified: Vec<String>,
    pub failures: Vec<RelationFailure>,
}

impl PseudoMackeyCertificate {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, name: String, lhs: &ZHom, rhs: &ZHom) {
        if lhs.eq(rhs) {
            self.verified.push(name);
        } else {
            self.failures.push(RelationFailure { name, lhs: lhs.clone(), rhs: rhs.clone() });
        }
    }

    pub fn merge(&mut self, other: PseudoMackeyCertificate) {
        self.verified.extend(other.verified);
        self.failures.extend(other.failures);
    }
}

/* # the presentation */

/// Groups `M(1)..=M(bound)` together with generator operator matrices. The
/// group at arity zero is trivial and every arity beyond the bound is read
/// as zero, which is the degree cutoff all checkers work against.
#[derive(Debug, Clone)]
pub struct JanusPresentation {
    op: Operad,
    bound: usize,
    groups: Vec<FgAbGroup>,
    trivial: FgAbGroup,
    t: BTreeMap<(usize, usize), ZHom>,
    tstar: BTreeMap<(usize, usize), ZHom>,
    p: BTreeMap<(usize, usize), ZHom>,
    iops: BTreeMap<(usize, Vec<OpElem>), ZHom>,
    hops: BTreeMap<(usize, usize, usize, OpElem), ZHom>,
}

fn unary_tuples(op: &Operad, len: usize) -> Result<Vec<Vec<OpElem>>, MkError> {
    let p1 = op.elements(1)?;
    let mut out: Vec<Vec<OpElem>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                p1.iter().map(move |&e| {
                    let mut t2 = t.clone();
                    t2.push(e);
                    t2
                })
            })
            .collect();
    }
    Ok(out)
}

fn labels(op: &Operad, es: &[OpElem]) -> String {
    es.iter().map(|&e| op.label(e)).collect::<Vec<_>>().join(",")
}

impl JanusPresentation {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        op: Operad,
        bound: usize,
        groups: Vec<FgAbGroup>,
        t: BTreeMap<(usize, usize), ZHom>,
        tstar: BTreeMap<(usize, usize), ZHom>,
        p: BTreeMap<(usize, usize), ZHom>,
        iops: BTreeMap<(usize, Vec<OpElem>), ZHom>,
        hops: BTreeMap<(usize, usize, usize, OpElem), ZHom>,
    ) -> Result<Self, MkError> {
        if bound == 0 {
            return Err(MkError::Shape("the bound must be at least one".into()));
        }
        if op.max_arity() < bound {
            return Err(MkError::Shape(format!(
                "operad truncated at arity {} cannot decorate folds up to {}",
                op.max_arity(),
                bound
            )));
        }
        if groups.len() != bound + 1 {
            return Err(MkError::Shape(format!(
                "need {} groups, got {}",
                bound + 1,
                groups.len()
            )));
        }
        if !groups[0].is_trivial() {
            return Err(MkError::Shape("the group at arity zero must vanish".into()));
        }
        let pres = JanusPresentation {
            op,
            bound,
            groups,
            trivial: FgAbGroup::trivial(),
            t,
            tstar,
            p,
            iops,
            hops,
        };
        pres.validate_tables()?;
        Ok(pres)
    }

    fn validate_tables(&self) -> Result<(), MkError> {
        let expect = |h: &ZHom, src: &FgAbGroup, dst: &FgAbGroup, what: &str| {
            if h.src != *src || h.dst != *dst {
                return Err(MkError::Shape(format!("{what} has the wrong endpoints")));
            }
            Ok(())
        };
        for n in 2..=self.bound {
            for i in 1..n {
                let t = self
                    .t
                    .get(&(n, i))
                    .ok_or_else(|| MkError::Shape(format!("missing T at ({n},{i})")))?;
                expect(t, &self.groups[n], &self.groups[n], "a swap operator")?;
                let ts = self
                    .tstar
                    .get(&(n, i))
                    .ok_or_else(|| MkError::Shape(format!("missing T* at ({n},{i})")))?;
                expect(ts, &self.groups[n], &self.groups[n], "a decorated swap operator")?;
                let p = self
                    .p
                    .get(&(n, i))
                    .ok_or_else(|| MkError::Shape(format!("missing P at ({n},{i})")))?;
                expect(p, &self.groups[n], &self.groups[n - 1], "a fold operator")?;
            }
        }
        for n in 1..=self.bound {
            for tuple in unary_tuples(&self.op, n)? {
                let key = (n, tuple.clone());
                let h = self.iops.get(&key).ok_or_else(|| {
                    MkError::Shape(format!("missing I at {n} [{}]", labels(&self.op, &tuple)))
                })?;
                expect(h, &self.groups[n], &self.groups[n], "a scalar operator")?;
            }
        }
        for n in 2..=self.bound {
            for k in 1..n {
                for i in 1..=n - k {
                    for omega in self.op.elements(k + 1)? {
                        let h = self.hops.get(&(n, k, i, omega)).ok_or_else(|| {
                            MkError::Shape(format!(
                                "missing H at ({n},{k},{i},{})",
                                self.op.label(omega)
                            ))
                        })?;
                        expect(h, &self.groups[n - k], &self.groups[n], "a cofold operator")?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn op(&self) -> &Operad {
        &self.op
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// The value group at an arity, zero beyond the bound.
    pub fn group(&self, n: usize) -> &FgAbGroup {
        if n <= self.bound {
            &self.groups[n]
        } else {
            &self.trivial
        }
    }

    fn t_op(&self, n: usize, i: usize) -> Result<ZHom, MkError> {
        if n > self.bound {
            return Ok(ZHom::zero(self.group(n), self.group(n)));
        }
        self.t
            .get(&(n, i))
            .cloned()
            .ok_or_else(|| MkError::Shape(format!("no swap operator at ({n},{i})")))
    }

    fn tstar_op(&self, n: usize, i: usize) -> Result<ZHom, MkError> {
        if n > self.bound {
            return Ok(ZHom::zero(self.group(n), self.group(n)));
        }
        self.tstar
            .get(&(n, i))
            .cloned()
            .ok_or_else(|| MkError::Shape(format!("no decorated swap operator at ({n},{i})")))
    }

    fn p_op(&self, n: usize, i: usize) -> Result<ZHom, MkError> {
        if i < 1 || i >= n {
            return Err(MkError::Shape(format!("no fold operator at ({n},{i})")));
        }
        if n > self.bound {
            return Ok(ZHom::zero(self.group(n), self.group(n - 1)));
        }
        self.p
            .get(&(n, i))
            .cloned()
            .ok_or_else(|| MkError::Shape(format!("no fold operator at ({n},{i})")))
    }

    fn i_op(&self, alphas: &[OpElem]) -> Result<ZHom, MkError> {
        let n = alphas.len();
        if n > self.bound {
            return Ok(ZHom::zero(self.group(n), self.group(n)));
        }
        self.iops
            .get(&(n, alphas.to_vec()))
            .cloned()
            .ok_or_else(|| {
                MkError::Shape(format!("no scalar operator at {n} [{}]", labels(&self.op, alphas)))
            })
    }

    fn h_op(&self, n: usize, k: usize, i: usize, omega: OpElem) -> Result<ZHom, MkError> {
        if k < 1 || k >= n || i < 1 || i > n - k {
            return Err(MkError::Shape(format!("no cofold operator at ({n},{k},{i})")));
        }
        if n > self.bound {
            return Ok(ZHom::zero(self.group(n - k), self.group(n)));
        }
        self.hops
            .get(&(n, k, i, omega))
            .cloned()
            .ok_or_else(|| {
                MkError::Shape(format!(
                    "no cofold operator at ({n},{k},{i},{})",
                    self.op.label(omega)
                ))
            })
    }

    /// Cofold with the convention that equal endpoints degrade to a scalar
    /// operator placed at the fold position.
    fn h_or_i(&self, tgt: usize, src: usize, i: usize, deco: OpElem) -> Result<ZHom, MkError> {
        if tgt == src {
            if deco.arity != 1 {
                return Err(MkError::Shape("degenerate cofold needs a unary decoration".into()));
            }
            let mut alphas = vec![self.op.unit(); tgt];
            if i < 1 || i > tgt {
                return Err(MkError::Shape(format!("scalar position {i} outside {tgt}")));
            }
            alphas[i - 1] = deco;
            if tgt > self.bound {
                return Ok(ZHom::zero(self.group(tgt), self.group(tgt)));
            }
            self.i_op(&alphas)
        } else {
            self.h_op(tgt, tgt - src, i, deco)
        }
    }

    /* ## the two actions */

    /// Covariant action on a surjection, through its generator word.
    pub fn act_lower(&self, h: &PlainMap) -> Result<ZHom, MkError> {
        let word = horizontal_word(h)?;
        let mut out = ZHom::identity(self.group(h.source));
        for f in word.iter().rev() {
            let m = match *f {
                HFactor::Fold { n, i } => self.p_op(n, i)?,
                HFactor::Swap { n, i } => self.t_op(n, i)?,
            };
            out = m.compose(&out);
        }
        Ok(out)
    }

    /// Contravariant action on a decorated surjection, through its word.
    pub fn act_upper(&self, v: &DecoratedMap) -> Result<ZHom, MkError> {
        let word = vertical_word(&self.op, v)?;
        let mut out = ZHom::identity(self.group(v.target));
        for f in &word {
            let m = match f {
                VFactor::Fold { n, k, i, omega } => self.h_op(*n, *k, *i, *omega)?,
                VFactor::Swap { n, i } => self.tstar_op(*n, *i)?,
                VFactor::Scalar { alphas } => self.i_op(alphas)?,
            };
            out = m.compose(&out);
        }
        Ok(out)
    }

    /// Covariant value of a composite written outermost factor first.
    fn lower_of(&self, maps: &[PlainMap]) -> Result<ZHom, MkError> {
        let src = maps.last().map_or(0, |m| m.source);
        let mut out = ZHom::identity(self.group(src));
        for m in maps.iter().rev() {
            out = self.act_lower(m)?.compose(&out);
        }
        Ok(out)
    }

    /// Contravariant value of a composite written outermost factor first.
    fn upper_of(&self, maps: &[DecoratedMap]) -> Result<ZHom, MkError> {
        let tgt = maps.first().map_or(0, |m| m.target);
        let mut out = ZHom::identity(self.group(tgt));
        for m in maps {
            out = self.act_upper(m)?.compose(&out);
        }
        Ok(out)
    }
}

/* # relation oracles */

fn compose_plain_chain(maps: &[PlainMap]) -> Result<PlainMap, MkError> {
    let mut it = maps.iter().rev();
    let first = it.next().ok_or_else(|| MkError::Template("empty plain chain".into()))?;
    let mut comp = first.clone();
    for m in it {
        comp = PlainMap::compose(m, &comp)?;
    }
    Ok(comp)
}

fn compose_decorated_chain(op: &Operad, maps: &[DecoratedMap]) -> Result<DecoratedMap, MkError> {
    let mut it = maps.iter().rev();
    let first = it.next().ok_or_else(|| MkError::Template("empty decorated chain".into()))?;
    let mut comp = first.clone();
    for m in it {
        comp = opcat::compose(op, m, &comp)?;
    }
    Ok(comp)
}

/// Both sides must name the same morphism before their operator values are
/// compared; a mismatch is a template bug, not a presentation failure.
fn check_plain_sides(
    pres: &JanusPresentation,
    cert: &mut PseudoMackeyCertificate,
    name: String,
    lhs: &[PlainMap],
    rhs: &[PlainMap],
) -> Result<(), MkError> {
    if compose_plain_chain(lhs)? != compose_plain_chain(rhs)? {
        return Err(MkError::Template(name));
    }
    let l = pres.lower_of(lhs)?;
    let r = pres.lower_of(rhs)?;
    cert.record(name, &l, &r);
    Ok(())
}

fn check_decorated_sides(
    pres: &JanusPresentation,
    cert: &mut PseudoMackeyCertificate,
    name: String,
    lhs: &[DecoratedMap],
    rhs: &[DecoratedMap],
) -> Result<(), MkError> {
    if compose_decorated_chain(&pres.op, lhs)? != compose_decorated_chain(&pres.op, rhs)? {
        return Err(MkError::Template(name));
    }
    let l = pres.upper_of(lhs)?;
    let r = pres.upper_of(rhs)?;
    cert.record(name, &l, &r);
    Ok(())
}

/* # the checkers */

impl JanusPresentation {
    /// Fold and swap relations of the covariant leg: the symmetric-group
    /// relations, fold exchange, fold absorption of its own swap, and the
    /// four swap-past-fold cases.
    pub fn check_horizontal_relations(&self) -> Result<PseudoMackeyCertificate, MkError> {
        let mut cert = PseudoMackeyCertificate::default();
        for n in 2..=self.bound {
            for i in 1..n {
                check_plain_sides(
                    self,
                    &mut cert,
                    format!("hor-sym-invol n={n} i={i}"),
                    &[swap_map(n, i)?, swap_map(n, i)?],
                    &[PlainMap::identity(Flavor::Omega, n)],
                )?;
            }
            for i in 1..n.saturating_sub(1) {
                check_plain_sides(
                    self,
                    &mut cert,
                    format!("hor-sym-braid n={n} i={i}"),
                    &[swap_map(n, i)?, swap_map(n, i + 1)?, swap_map(n, i)?],
                    &[swap_map(n, i + 1)?, swap_map(n, i)?, swap_map(n, i + 1)?],
                )?;
            }
            for i in 1..n {
                for j in i + 2..n {
                    check_plain_sides(
                        self,
                        &mut cert,
                        format!("hor-sym-far n={n} i={i} j={j}"),
                        &[swap_map(n, i)?, swap_map(n, j)?],
                        &[swap_map(n, j)?, swap_map(n, i)?],
                    )?;
                }
            }
            // fold exchange
            for j in 2..n {
                for i in 1..j {
                    check_plain_sides(
                        self,
                        &mut cert,
                        format!("hor-1 n={n} i={i} j={j}"),
                        &[fold_map(n - 1, i)?, fold_map(n, j)?],
                        &[fold_map(n - 1, j - 1)?, fold_map(n, i)?],
                    )?;
                }
            }
            // a fold absorbs its own swap
            for i in 1..n {
                check_plain_sides(
                    self,
                    &mut cert,
                    format!("hor-2 n={n} i={i}"),
                    &[fold_map(n, i)?, swap_map(n, i)?],
                    &[fold_map(n, i)?],
                )?;
            }
            // swap past fold
            for j in 1..n {
                for k in 1..n - 1 {
                    let name = format!("hor-3 n={n} j={j} k={k}");
                    let lhs = [swap_map(n - 1, k)?, fold_map(n, j)?];
                    if k + 1 < j {
                        check_plain_sides(
                            self,
                            &mut cert,
                            name,
                            &lhs,
                            &[fold_map(n, j)?, swap_map(n, k)?],
                        )?;
                    } else if k + 1 == j {
                        check_plain_sides(
                            self,
                            &mut cert,
                            name,
                            &lhs,
                            &[fold_map(n, j - 1)?, swap_map(n, j)?, swap_map(n, j - 1)?],
                        )?;
                    } else if k == j {
                        check_plain_sides(
                            self,
                            &mut cert,
                            name,
                            &lhs,
                            &[fold_map(n, j + 1)?, swap_map(n, j)?, swap_map(n, j + 1)?],
                        )?;
                    } else {
                        check_plain_sides(
                            self,
                            &mut cert,
                            name,
                            &lhs,
                            &[fold_map(n, j)?, swap_map(n, k + 1)?],
                        )?;
                    }
                }
            }
        }
        Ok(cert)
    }

    /// Relations among the decorated generators, swept over every decoration
    /// of the truncated operad. Contravariance is built into the evaluator,
    /// so the sides are stated as composites of decorated maps.
    pub fn check_vertical_relations(&self) -> Result<PseudoMackeyCertificate, MkError> {
        let op = &self.op;
        let mut cert = PseudoMackeyCertificate::default();
        for n in 1..=self.bound {
            // identity decoration acts as the identity
            check_decorated_sides(
                self,
                &mut cert,
                format!("vert-unit n={n}"),
                &[scalar_decorated(op, &vec![op.unit(); n])?],
                &[DecoratedMap::identity(Flavor::Omega, op, n)?],
            )?;
            // scalars compose through substitution
            for omegas in unary_tuples(op, n)? {
                for alphas in unary_tuples(op, n)? {
                    let composite: Vec<OpElem> = omegas
                        .iter()
                        .zip(&alphas)
                        .map(|(&w, &a)| op.gamma(w, &[a]))
                        .collect::<Result<_, _>>()?;
                    check_decorated_sides(
                        self,
                        &mut cert,
                        format!(
                            "vert-1 n={n} omega=[{}] alpha=[{}]",
                            labels(op, &omegas),
                            labels(op, &alphas)
                        ),
                        &[scalar_decorated(op, &omegas)?, scalar_decorated(op, &alphas)?],
                        &[scalar_decorated(op, &composite)?],
                    )?;
                }
            }
            // scalars slide through swaps
            for k in 1..n {
                for omegas in unary_tuples(op, n)? {
                    let mut swapped = omegas.clone();
                    swapped.swap(k - 1, k);
                    check_decorated_sides(
                        self,
                        &mut cert,
                        format!("vert-2 n={n} k={k} omega=[{}]", labels(op, &omegas)),
                        &[scalar_decorated(op, &omegas)?, swap_decorated(op, n, k)?],
                        &[swap_decorated(op, n, k)?, scalar_decorated(op, &swapped)?],
                    )?;
                }
            }
            // symmetric-group relations on decorated swaps
            for i in 1..n {
                check_decorated_sides(
                    self,
                    &mut cert,
                    format!("vert-sym-invol n={n} i={i}"),
                    &[swap_decorated(op, n, i)?, swap_decorated(op, n, i)?],
                    &[DecoratedMap::identity(Flavor::Omega, op, n)?],
                )?;
            }
            for i in 1..n.saturating_sub(1) {
                check_decorated_sides(
                    self,
                    &mut cert,
                    format!("vert-sym-braid n={n} i={i}"),
                    &[
                        swap_decorated(op, n, i)?,
                        swap_decorated(op, n, i + 1)?,
                        swap_decorated(op, n, i)?,
                    ],
                    &[
                        swap_decorated(op, n, i + 1)?,
                        swap_decorated(op, n, i)?,
                        swap_decorated(op, n, i + 1)?,
                    ],
                )?;
            }
        }
        // scalar past fold, both slides
        for n in 2..=self.bound {
            for k in 1..n {
                for i in 1..=n - k {
                    for omega in op.elements(k + 1)? {
                        for outer in unary_tuples(op, n - k)? {
                            let twisted = op.gamma(outer[i - 1], &[omega])?;
                            let mut expanded = Vec::with_capacity(n);
                            expanded.extend_from_slice(&outer[..i - 1]);
                            expanded.extend(vec![op.unit(); k + 1]);
                            expanded.extend_from_slice(&outer[i..]);
                            check_decorated_sides(
                                self,
                                &mut cert,
                                format!(
                                    "vert-3 n={n} k={k} i={i} omega={} outer=[{}]",
                                    op.label(omega),
                                    labels(op, &outer)
                                ),
                                &[
                                    scalar_decorated(op, &outer)?,
                                    fold_decorated(op, n, k, i, omega)?,
                                ],
                                &[
                                    fold_decorated(op, n, k, i, twisted)?,
                                    scalar_decorated(op, &expanded)?,
                                ],
                            )?;
                        }
                        for inner in unary_tuples(op, n)? {
                            let args: Vec<OpElem> = inner[i - 1..i + k].to_vec();
                            let twisted = op.gamma(omega, &args)?;
                            let mut outer = Vec::with_capacity(n - k);
                            outer.extend_from_slice(&inner[..i - 1]);
                            outer.push(op.unit());
                            outer.extend_from_slice(&inner[i + k..]);
                            check_decorated_sides(
                                self,
                                &mut cert,
                                format!(
                                    "vert-4 n={n} k={k} i={i} omega={} inner=[{}]",
                                    op.label(omega),
                                    labels(op, &inner)
                                ),
                                &[
                                    fold_decorated(op, n, k, i, omega)?,
                                    scalar_decorated(op, &inner)?,
                                ],
                                &[
                                    scalar_decorated(op, &outer)?,
                                    fold_decorated(op, n, k, i, twisted)?,
                                ],
                            )?;
                        }
                    }
                }
            }
        }
        // two folds in sequence
        for n in 3..=self.bound {
            for k in 1..n {
                for p in 1..n - k {
                    for j in 1..=n - k {
                        for i in 1..=n - k - p {
                            for alpha in op.elements(k + 1)? {
                                for omega in op.elements(p + 1)? {
                                    let name = format!(
                                        "vert-5 n={n} k={k} p={p} i={i} j={j} alpha={} omega={}",
                                        op.label(alpha),
                                        op.label(omega)
                                    );
                                    let lhs = [
                                        fold_decorated(op, n - k, p, i, omega)?,
                                        fold_decorated(op, n, k, j, alpha)?,
                                    ];
                                    if i <= j && j <= i + p {
                                        let mut args = Vec::with_capacity(p + 1);
                                        args.extend(vec![op.unit(); j - i]);
                                        args.push(alpha);
                                        args.extend(vec![op.unit(); p - (j - i)]);
                                        let merged = op.gamma(omega, &args)?;
                                        check_decorated_sides(
                                            self,
                                            &mut cert,
                                            name,
                                            &lhs,
                                            &[fold_decorated(op, n, k + p, i, merged)?],
                                        )?;
                                    } else if j < i {
                                        check_decorated_sides(
                                            self,
                                            &mut cert,
                                            name,
                                            &lhs,
                                            &[
                                                fold_decorated(op, n - p, k, j, alpha)?,
                                                fold_decorated(op, n, p, i + k, omega)?,
                                            ],
                                        )?;
                                    } else {
                                        check_decorated_sides(
                                            self,
                                            &mut cert,
                                            name,
                                            &lhs,
                                            &[
                                                fold_decorated(op, n - p, k, j - p, alpha)?,
                                                fold_decorated(op, n, p, i, omega)?,
                                            ],
                                        )?;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        // swap past decorated fold
        for n in 2..=self.bound {
            for p in 1..n {
                for j in 1..=n - p {
                    for k in 1..n - p {
                        for alpha in op.elements(p + 1)? {
                            let name = format!(
                                "vert-6 n={n} p={p} j={j} k={k} alpha={}",
                                op.label(alpha)
                            );
                            let lhs = [
                                swap_decorated(op, n - p, k)?,
                                fold_decorated(op, n, p, j, alpha)?,
                            ];
                            if k + 1 < j {
                                check_decorated_sides(
                                    self,
                                    &mut cert,
                                    name,
                                    &lhs,
                                    &[
                                        fold_decorated(op, n, p, j, alpha)?,
                                        swap_decorated(op, n, k)?,
                                    ],
                                )?;
                            } else if k + 1 == j {
                                let mut rhs =
                                    vec![fold_decorated(op, n, p, j - 1, alpha)?];
                                for s in (j - 1..=j + p - 1).rev() {
                                    rhs.push(swap_decorated(op, n, s)?);
                                }
                                check_decorated_sides(self, &mut cert, name, &lhs, &rhs)?;
                            } else if k == j {
                                let mut rhs =
                                    vec![fold_decorated(op, n, p, j + 1, alpha)?];
                                for s in j..=j + p {
                                    rhs.push(swap_decorated(op, n, s)?);
                                }
                                check_decorated_sides(self, &mut cert, name, &lhs, &rhs)?;
                            } else {
                                check_decorated_sides(
                                    self,
                                    &mut cert,
                                    name,
                                    &lhs,
                                    &[
                                        fold_decorated(op, n, p, j, alpha)?,
                                        swap_decorated(op, n, k + p)?,
                                    ],
                                )?;
                            }
                        }
                    }
                }
            }
        }
        // decorated fold past swap
        for n in 2..=self.bound {
            for p in 1..n {
                for j in 1..=n - p {
                    for k in 1..n {
                        if k + 1 == j || k == j + p {
                            continue; // no two-factor normal form here
                        }
                        for alpha in op.elements(p + 1)? {
                            let name = format!(
                                "vert-7 n={n} p={p} j={j} k={k} alpha={}",
                                op.label(alpha)
                            );
                            let lhs = [
                                fold_decorated(op, n, p, j, alpha)?,
                                swap_decorated(op, n, k)?,
                            ];
                            if k >= j && k < j + p {
                                let tau = Perm::adjacent_transposition(p + 1, k - j + 1);
                                let acted = op.act(alpha, &tau)?;
                                check_decorated_sides(
                                    self,
                                    &mut cert,
                                    name,
                                    &lhs,
                                    &[fold_decorated(op, n, p, j, acted)?],
                                )?;
                            } else if k + 1 < j {
                                check_decorated_sides(
                                    self,
                                    &mut cert,
                                    name,
                                    &lhs,
                                    &[
                                        swap_decorated(op, n - p, k)?,
                                        fold_decorated(op, n, p, j, alpha)?,
                                    ],
                                )?;
                            } else {
                                check_decorated_sides(
                                    self,
                                    &mut cert,
                                    name,
                                    &lhs,
                                    &[
                                        swap_decorated(op, n - p, k - p)?,
                                        fold_decorated(op, n, p, j, alpha)?,
                                    ],
                                )?;
                            }
                        }
                    }
                }
            }
        }
        Ok(cert)
    }
}

/* # the interleaving permutation */

/// The interleaver on `n+2k` letters: fixed outside `i..=i+2k+1`, it sends
/// the first half of that window to even offsets and the second half to odd
/// ones.
fn interleaver(n: usize, k: usize, i: usize) -> Result<Perm, MkError> {
    let sz = n + 2 * k;
    if i + 2 * k + 1 > sz {
        return Err(MkError::Shape("interleaver window escapes the letters".into()));
    }
    let mut img: Vec<usize> = (1..=sz).collect();
    for j in 0..=k {
        img[i + j - 1] = i + 2 * j;
        img[i + k + 1 + j - 1] = i + 1 + 2 * j;
    }
    Ok(Perm::from_word(&img)?)
}

/// Deletes the named columns of a permutation's two-row array and renumbers
/// both rows order-preservingly.
fn remove_columns(p: &Perm, removed: &BTreeSet<usize>) -> Result<Perm, MkError> {
    let w = p.word();
    let kept: Vec<usize> = (1..=p.degree()).filter(|x| !removed.contains(x)).collect();
    let mut bottoms: Vec<usize> = kept.iter().map(|&x| w[x - 1]).collect();
    let mut sorted = bottoms.clone();
    sorted.sort_unstable();
    for b in &mut bottoms {
        *b = sorted.binary_search(b).expect("kept value") + 1;
    }
    Ok(Perm::from_word(&bottoms)?)
}

/// Deletion patterns for the big fold-exchange relation: marked offsets in
/// `0..=k` with their side choices, constrained so both restricted cofolds
/// stay within arity. The empty pattern names the main term.
fn exchange_patterns(k: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    use itertools::Itertools;
    let mut out = vec![(Vec::new(), Vec::new())];
    for beta in 1..=k + 1 {
        for combo in (0..=k).combinations(beta) {
            for eps_bits in 0..(1u32 << beta) {
                let eps: Vec<usize> =
                    (0..beta).map(|l| ((eps_bits >> l) & 1) as usize).collect();
                let s: usize = eps.iter().sum();
                if s + k >= beta && s <= k {
                    out.push((combo.clone(), eps));
                }
            }
        }
    }
    out
}

impl JanusPresentation {
    /// The chain of folds `i+k` down to `i`, skipping the marked positions,
    /// starting at the given arity.
    fn fold_chain(
        &self,
        start: usize,
        i: usize,
        k: usize,
        skip: &BTreeSet<usize>,
    ) -> Result<ZHom, MkError> {
        let mut out = ZHom::identity(self.group(start));
        let mut cur = start;
        for r in 0..=k {
            if skip.contains(&(i + r)) {
                continue;
            }
            out = self.p_op(cur, i + r)?.compose(&out);
            cur -= 1;
        }
        Ok(out)
    }

    fn exchange_rhs(
        &self,
        n: usize,
        k: usize,
        i: usize,
        alpha: OpElem,
    ) -> Result<ZHom, MkError> {
        let op = &self.op;
        let sigma = interleaver(n, k, i)?;
        let mut rhs = ZHom::zero(self.group(n), self.group(n + k - 1));
        for (offsets, eps) in exchange_patterns(k) {
            let beta = offsets.len();
            let s: usize = eps.iter().sum();
            let skip: BTreeSet<usize> = offsets.iter().map(|&o| i + o).collect();
            let removed: BTreeSet<usize> = offsets
                .iter()
                .zip(&eps)
                .map(|(&o, &e)| i + o + e * (k + 1))
                .collect();
            let sigma_cut = remove_columns(&sigma, &removed)?;
            // decorations: a deletion on the plain side zeroes a slot of the
            // first cofold, one on the twisted side zeroes a slot of the second
            let mut first_slots = vec![op.unit(); k + 1];
            let mut second_slots = vec![op.unit(); k + 1];
            for (&o, &e) in offsets.iter().zip(&eps) {
                if e == 0 {
                    first_slots[o] = op.zero();
                } else {
                    second_slots[o] = op.zero();
                }
            }
            let first_deco = op.gamma(alpha, &first_slots)?;
            let second_deco = op.gamma(alpha, &second_slots)?;
            let term = self
                .fold_chain(n + 2 * k - beta, i, k, &skip)?
                .compose(&self.act_lower(&perm_map(&sigma_cut)?)?)
                .compose(&self.h_or_i(n + 2 * k - beta, n + k - s, i, first_deco)?)
                .compose(&self.h_or_i(n + k - s, n, i + 1, second_deco)?);
            rhs = rhs.add(&term);
        }
        Ok(rhs)
    }

    /// The inverse, duplication, slide, and fold-exchange laws that make the
    /// two actions a presentation of a functor on spans.
    pub fn check_pseudo_mackey(&self) -> Result<PseudoMackeyCertificate, MkError> {
        let op = &self.op;
        let mut cert = PseudoMackeyCertificate::default();
        // decorated swaps invert the plain ones
        for n in 2..=self.bound {
            for i in 1..n {
                let t = self.t_op(n, i)?;
                let ts = self.tstar_op(n, i)?;
                let id = ZHom::identity(self.group(n));
                cert.record(format!("pm-1 n={n} i={i} right"), &t.compose(&ts), &id);
                cert.record(format!("pm-1 n={n} i={i} left"), &ts.compose(&t), &id);
            }
        }
        // scalars duplicate through folds
        for n in 2..=self.bound {
            for i in 1..n {
                for alphas in unary_tuples(op, n - 1)? {
                    let mut dup = Vec::with_capacity(n);
                    dup.extend_from_slice(&alphas[..i]);
                    dup.push(alphas[i - 1]);
                    dup.extend_from_slice(&alphas[i..]);
                    let lhs = self.i_op(&alphas)?.compose(&self.p_op(n, i)?);
                    let rhs = self.p_op(n, i)?.compose(&self.i_op(&dup)?);
                    cert.record(
                        format!("pm-2 n={n} i={i} alpha=[{}]", labels(op, &alphas)),
                        &lhs,
                        &rhs,
                    );
                }
            }
        }
        // cofolds slide past disjoint folds
        for n in 3..=self.bound {
            for k in 1..=self.bound + 1 - n {
                for alpha in op.elements(k + 1)? {
                    for j in 2..n {
                        for i in 1..j {
                            let lhs = self
                                .h_op(n + k - 1, k, j, alpha)?
                                .compose(&self.p_op(n, i)?);
                            let rhs = self
                                .p_op(n + k, i)?
                                .compose(&self.h_op(n + k, k, j + 1, alpha)?);
                            cert.record(
                                format!(
                                    "pm-3 n={n} k={k} i={i} j={j} alpha={}",
                                    op.label(alpha)
                                ),
                                &lhs,
                                &rhs,
                            );
                        }
                        for i in j + 1..n {
                            let lhs = self
                                .h_op(n + k - 1, k, j, alpha)?
                                .compose(&self.p_op(n, i)?);
                            let rhs = self
                                .p_op(n + k, k + i)?
                                .compose(&self.h_op(n + k, k, j, alpha)?);
                            cert.record(
                                format!(
                                    "pm-4 n={n} k={k} i={i} j={j} alpha={}",
                                    op.label(alpha)
                                ),
                                &lhs,
                                &rhs,
                            );
                        }
                    }
                }
            }
        }
        // the big fold exchange
        for n in 2..=self.bound {
            for k in 1..=(self.bound + 1 - n).min(n) {
                for alpha in op.elements(k + 1)? {
                    for i in 1..n {
                        let lhs = self
                            .h_op(n + k - 1, k, i, alpha)?
                            .compose(&self.p_op(n, i)?);
                        let rhs = self.exchange_rhs(n, k, i, alpha)?;
                        cert.record(
                            format!("pm-5 n={n} k={k} i={i} alpha={}", op.label(alpha)),
                            &lhs,
                            &rhs,
                        );
                    }
                }
            }
        }
        Ok(cert)
    }

    /// Verifies the double-coset exchange law on every lifted square with
    /// source, bottom, and side arities up to `size_cap`, and the inverse
    /// law on every bijection. Decorated sides are enumerated within the
    /// given budget.
    pub fn check_exchange(
        &self,
        size_cap: usize,
        hom_budget: u128,
    ) -> Result<PseudoMackeyCertificate, MkError> {
        let op = &self.op;
        let cap = size_cap.min(self.bound);
        let mut cert = PseudoMackeyCertificate::default();
        for n in 1..=cap {
            for pi in Perm::all(n) {
                let f = perm_map(&pi)?;
                let u = DecoratedMap::new(
                    Flavor::Omega,
                    op,
                    n,
                    n,
                    pi.word(),
                    vec![op.unit(); n],
                )?;
                let lhs = self.act_lower(&f)?.compose(&self.act_upper(&u)?);
                cert.record(
                    format!("exchange-iso n={n} perm={}", pi.cycle_label()),
                    &lhs,
                    &ZHom::identity(self.group(n)),
                );
            }
        }
        for a in 1..=cap {
            for b in 1..=a {
                for c in b..=cap {
                    for (gi, g) in plain_surjections(a, b).into_iter().enumerate() {
                        for (pi, psi) in opcat::enumerate_hom(Flavor::Omega, op, c, b, hom_budget)?
                            .into_iter()
                            .enumerate()
                        {
                            let sq = spans::lift_square(op, Flavor::Omega, &g, &psi)?;
                            let lhs = self.act_upper(&psi)?.compose(&self.act_lower(&g)?);
                            let mut rhs = ZHom::zero(self.group(a), self.group(c));
                            for part in spans::admissible_subsets(&sq)? {
                                let top = promote_surjection(&sq.top.restrict(&part)?)?;
                                let left = restrict_keeping_target(op, &sq.left, &part)?;
                                rhs = rhs.add(
                                    &self.act_lower(&top)?.compose(&self.act_upper(&left)?),
                                );
                            }
                            cert.record(
                                format!("exchange a={a} b={b} c={c} g#{gi} psi#{pi}"),
                                &lhs,
                                &rhs,
                            );
                        }
                    }
                }
            }
        }
        Ok(cert)
    }
}

fn plain_surjections(a: usize, b: usize) -> Vec<PlainMap> {
    let mut out = Vec::new();
    let total = (b as u64).pow(a as u32);
    for code in 0..total {
        let mut c = code;
        let mut map = Vec::with_capacity(a);
        for _ in 0..a {
            map.push((c % b as u64) as usize + 1);
            c /= b as u64;
        }
        if let Ok(m) = PlainMap::new(Flavor::Omega, a, b, map) {
            out.push(m);
        }
    }
    out
}

/// Restriction of a decorated map to a source subset, keeping the full
/// target: surviving slots stay, the rest are closed off with constants.
fn restrict_keeping_target(
    op: &Operad,
    m: &DecoratedMap,
    subset: &BTreeSet<usize>,
) -> Result<DecoratedMap, MkError> {
    let cut = opcat::restrict_to_subset(op, m, subset)?;
    let map: Vec<usize> = (1..=cut.source).map(|x| cut.apply(x)).collect();
    Ok(DecoratedMap::new(
        Flavor::Omega,
        op,
        cut.source,
        cut.target,
        map,
        cut.decorations().to_vec(),
    )?)
}

fn promote_surjection(m: &PlainMap) -> Result<PlainMap, MkError> {
    Ok(PlainMap::new(Flavor::Omega, m.source, m.target, (1..=m.source).map(|x| m.apply(x)).collect())?)
}

/* # extraction from a span functor */

fn span_of_surjection(op: &Operad, h: &PlainMap) -> Result<SpanMorphism, MkError> {
    let a = h.source;
    let vertical = DecoratedMap::new(
        Flavor::S,
        op,
        a,
        a,
        (1..=a).collect(),
        vec![op.unit(); a],
    )?;
    let horizontal =
        PlainMap::new(Flavor::S, a, h.target, (1..=a).map(|x| h.apply(x)).collect())?;
    Ok(SpanMorphism::new(op, vertical, horizontal)?)
}

fn span_of_decorated(op: &Operad, v: &DecoratedMap) -> Result<SpanMorphism, MkError> {
    let a = v.source;
    let vertical = DecoratedMap::new(
        Flavor::S,
        op,
        a,
        v.target,
        (1..=a).map(|x| v.apply(x)).collect(),
        v.decorations().to_vec(),
    )?;
    let horizontal = PlainMap::new(Flavor::S, a, a, (1..=a).collect())?;
    Ok(SpanMorphism::new(op, vertical, horizontal)?)
}

fn inclusion_span(op: &Operad, n: usize, mu: &[usize]) -> Result<SpanMorphism, MkError> {
    let m = mu.len();
    let mut dec = Vec::with_capacity(n);
    for y in 1..=n {
        dec.push(if mu.contains(&y) { op.unit() } else { op.zero() });
    }
    let vertical = DecoratedMap::new(Flavor::S, op, m, n, mu.to_vec(), dec)?;
    let horizontal = PlainMap::new(Flavor::S, m, n, mu.to_vec())?;
    Ok(SpanMorphism::new(op, vertical, horizontal)?)
}

fn crs_at<'a>(
    crs: &'a [Option<CrossEffectResult>],
    n: usize,
) -> Result<&'a CrossEffectResult, MkError> {
    crs.get(n)
        .and_then(|o| o.as_ref())
        .ok_or_else(|| MkError::Shape(format!("no cross-effect stored at arity {n}")))
}

fn extract_lower(
    f: &TruncatedFunctor,
    crs: &[Option<CrossEffectResult>],
    op: &Operad,
    h: &PlainMap,
) -> Result<ZHom, MkError> {
    let sp = span_of_surjection(op, h)?;
    let val = f.on(&Mor::Span(sp))?.compose(&crs_at(crs, h.source)?.inclusion);
    Ok(crs_at(crs, h.target)?.express(&val)?)
}

fn extract_upper(
    f: &TruncatedFunctor,
    crs: &[Option<CrossEffectResult>],
    ptop: &[Option<ZHom>],
    op: &Operad,
    v: &DecoratedMap,
) -> Result<ZHom, MkError> {
    let sp = span_of_decorated(op, v)?;
    let val = f.on(&Mor::Span(sp))?.compose(&crs_at(crs, v.target)?.inclusion);
    let proj = ptop
        .get(v.source)
        .and_then(|o| o.as_ref())
        .ok_or_else(|| MkError::Shape(format!("no projection stored at arity {}", v.source)))?;
    Ok(proj.compose(&val))
}

/// Reads the generator operators out of a covariant functor on the span
/// category: the groups are the diagonal cross-effects, covariant
/// generators act through identity-vertical spans, contravariant ones
/// through identity-horizontal spans followed by the top projection.
pub fn from_functor(f: &TruncatedFunctor) -> Result<JanusPresentation, MkError> {
    Ok(from_functor_with_data(f)?.0)
}

pub fn from_functor_with_data(
    f: &TruncatedFunctor,
) -> Result<(JanusPresentation, Vec<Option<CrossEffectResult>>), MkError> {
    let cat = f.cat();
    if cat.kind() != BaseKind::Span {
        return Err(MkError::Shape("presentations extract from span functors".into()));
    }
    if f.contravariant() {
        return Err(MkError::Shape("presentations extract from covariant functors".into()));
    }
    let op = cat.op().clone();
    let bound = cat.bound();
    let mut crs: Vec<Option<CrossEffectResult>> = vec![None];
    for n in 1..=bound {
        crs.push(Some(cross_effect(f, &vec![1; n])?));
    }
    let mut groups = vec![FgAbGroup::trivial()];
    for n in 1..=bound {
        groups.push(crs_at(&crs, n)?.group.clone());
    }

    // the projection onto the top cross-effect summand, as an alternating
    // sum of subset inclusion spans
    let mut ptop: Vec<Option<ZHom>> = vec![None];
    for n in 1..=bound {
        let mut e = ZHom::zero(f.object(n), f.object(n));
        for mask in 0usize..(1 << n) {
            let mu: Vec<usize> = (1..=n).filter(|x| (mask >> (x - 1)) & 1 == 1).collect();
            let sign = if (n - mu.len()) % 2 == 0 { bi(1) } else { bi(-1) };
            let sp = inclusion_span(&op, n, &mu)?;
            e = e.add(&f.on(&Mor::Span(sp))?.scale(&sign));
        }
        ptop.push(Some(crs_at(&crs, n)?.express(&e)?));
    }

    let mut t = BTreeMap::new();
    let mut tstar = BTreeMap::new();
    let mut p = BTreeMap::new();
    let mut iops = BTreeMap::new();
    let mut hops = BTreeMap::new();
    for n in 2..=bound {
        for i in 1..n {
            t.insert((n, i), extract_lower(f, &crs, &op, &swap_map(n, i)?)?);
            p.insert((n, i), extract_lower(f, &crs, &op, &fold_map(n, i)?)?);
            tstar.insert((n, i), extract_upper(f, &crs, &ptop, &op, &swap_decorated(&op, n, i)?)?);
        }
    }
    for n in 1..=bound {
        for alphas in unary_tuples(&op, n)? {
            let v = scalar_decorated(&op, &alphas)?;
            iops.insert((n, alphas), extract_upper(f, &crs, &ptop, &op, &v)?);
        }
    }
    for n in 2..=bound {
        for k in 1..n {
            for i in 1..=n - k {
                for omega in op.elements(k + 1)? {
                    let v = fold_decorated(&op, n, k, i, omega)?;
                    hops.insert((n, k, i, omega), extract_upper(f, &crs, &ptop, &op, &v)?);
                }
            }
        }
    }
    let pres = JanusPresentation::new(op, bound, groups, t, tstar, p, iops, hops)?;
    Ok((pres, crs))
}

/* # reconstruction */

struct SumParts {
    group: FgAbGroup,
    inj: Vec<ZHom>,
    proj: Vec<ZHom>,
}

fn omega_restriction(
    op: &Operad,
    v: &DecoratedMap,
    nu: &BTreeSet<usize>,
) -> Result<(DecoratedMap, usize), MkError> {
    let cut = opcat::restrict_to_subset(op, v, nu)?;
    let image: BTreeSet<usize> = nu.iter().map(|&q| v.apply(q)).collect();
    let cut2 = opcat::restrict_target(op, &cut, &image)?;
    let map: Vec<usize> = (1..=cut2.source).map(|q| cut2.apply(q)).collect();
    let om = DecoratedMap::new(
        Flavor::Omega,
        op,
        cut2.source,
        cut2.target,
        map,
        cut2.decorations().to_vec(),
    )?;
    let mask = image.iter().map(|&y| 1usize << (y - 1)).sum();
    Ok((om, mask))
}

fn plain_restriction(h: &PlainMap, nu: &[usize]) -> Result<(PlainMap, usize), MkError> {
    let image: Vec<usize> = nu
        .iter()
        .map(|&q| h.apply(q))
        .collect::<BTreeSet<usize>>()
        .into_iter()
        .collect();
    let map: Vec<usize> = nu
        .iter()
        .map(|&q| image.binary_search(&h.apply(q)).expect("image point") + 1)
        .collect();
    let om = PlainMap::new(Flavor::Omega, nu.len(), image.len(), map)?;
    let mask = image.iter().map(|&y| 1usize << (y - 1)).sum();
    Ok((om, mask))
}

impl JanusPresentation {
    fn sum_parts(&self, n: usize) -> SumParts {
        let parts: Vec<FgAbGroup> =
            (0..1usize << n).map(|mask| self.group(mask.count_ones() as usize).clone()).collect();
        let (group, inj, proj) = FgAbGroup::direct_sum(&parts);
        SumParts { group, inj, proj }
    }

    fn upper_value(
        &self,
        v: &DecoratedMap,
        src: &SumParts,
        apex: &SumParts,
    ) -> Result<ZHom, MkError> {
        let x = v.source;
        let mut out = ZHom::zero(&src.group, &apex.group);
        for mask in 0usize..(1 << x) {
            let nu: BTreeSet<usize> = (1..=x).filter(|q| (mask >> (q - 1)) & 1 == 1).collect();
            let (om, image_mask) = omega_restriction(&self.op, v, &nu)?;
            out = out
                .add(&apex.inj[mask].compose(&self.act_upper(&om)?).compose(&src.proj[image_mask]));
        }
        Ok(out)
    }

    fn lower_value(
        &self,
        h: &PlainMap,
        apex: &SumParts,
        dst: &SumParts,
    ) -> Result<ZHom, MkError> {
        let x = h.source;
        let mut out = ZHom::zero(&apex.group, &dst.group);
        for mask in 0usize..(1 << x) {
            let nu: Vec<usize> = (1..=x).filter(|q| (mask >> (q - 1)) & 1 == 1).collect();
            let (om, image_mask) = plain_restriction(h, &nu)?;
            out = out
                .add(&dst.inj[image_mask].compose(&self.act_lower(&om)?).compose(&apex.proj[mask]));
        }
        Ok(out)
    }

    /// Builds the functor on the truncated span category whose value at `n`
    /// is the sum of the presentation groups over subsets of `n` letters.
    /// The constructor's functoriality audit doubles as the certificate that
    /// the presentation really defines a functor.
    pub fn to_functor(
        &self,
        apex_budget: usize,
        hom_budget: u128,
    ) -> Result<TruncatedFunctor, MkError> {
        let cat =
            BaseCat::new(self.op.clone(), BaseKind::Span, self.bound, apex_budget, hom_budget)?;
        let parts: Vec<SumParts> = (0..=self.bound).map(|n| self.sum_parts(n)).collect();
        let f = TruncatedFunctor::from_fn(
            &cat,
            false,
            |n| Ok(parts[n].group.clone()),
            |m| match m {
                Mor::Span(sp) => {
                    let apex = self.sum_parts(sp.apex());
                    let up = self
                        .upper_value(sp.vertical(), &parts[sp.source()], &apex)
                        .map_err(|e| FunctorError::Shape(e.to_string()))?;
                    let down = self
                        .lower_value(sp.horizontal(), &apex, &parts[sp.target()])
                        .map_err(|e| FunctorError::Shape(e.to_string()))?;
                    Ok(down.compose(&up))
                }
                Mor::Map(_) => Err(FunctorError::Shape("span category expected".into())),
            },
        )?;
        Ok(f)
    }

    /// Rebuilds a functor, re-extracts a presentation, and certifies that
    /// the comparison maps are isomorphisms intertwining every stored
    /// operator.
    pub fn roundtrip_certificate(
        &self,
        apex_budget: usize,
        hom_budget: u128,
    ) -> Result<PseudoMackeyCertificate, MkError> {
        let f = self.to_functor(apex_budget, hom_budget)?;
        let (q, crs) = from_functor_with_data(&f)?;
        let mut cert = PseudoMackeyCertificate::default();
        let mut comps: Vec<Option<ZHom>> = vec![None];
        for n in 1..=self.bound {
            let parts = self.sum_parts(n);
            let full = (1usize << n) - 1;
            let comp = crs_at(&crs, n)?.express(&parts.inj[full])?;
            if comp.is_iso() {
                cert.verified.push(format!("roundtrip-iso n={n}"));
            } else {
                cert.failures.push(RelationFailure {
                    name: format!("roundtrip-iso n={n}"),
                    lhs: comp.clone(),
                    rhs: comp.clone(),
                });
            }
            comps.push(Some(comp));
        }
        let comp_at = |n: usize| -> Result<&ZHom, MkError> {
            comps
                .get(n)
                .and_then(|o| o.as_ref())
                .ok_or_else(|| MkError::Shape(format!("no comparison map at arity {n}")))
        };
        for ((n, i), h) in &self.t {
            let c = comp_at(*n)?;
            cert.record(
                format!("roundtrip-T n={n} i={i}"),
                &c.compose(h),
                &q.t_op(*n, *i)?.compose(c),
            );
        }
        for ((n, i), h) in &self.tstar {
            let c = comp_at(*n)?;
            cert.record(
                format!("roundtrip-T* n={n} i={i}"),
                &c.compose(h),
                &q.tstar_op(*n, *i)?.compose(c),
            );
        }
        for ((n, i), h) in &self.p {
            cert.record(
                format!("roundtrip-P n={n} i={i}"),
                &comp_at(*n - 1)?.compose(h),
                &q.p_op(*n, *i)?.compose(comp_at(*n)?),
            );
        }
        for ((n, alphas), h) in &self.iops {
            let c = comp_at(*n)?;
            cert.record(
                format!("roundtrip-I n={n} [{}]", labels(&self.op, alphas)),
                &c.compose(h),
                &q.i_op(alphas)?.compose(c),
            );
        }
        for ((n, k, i, w), h) in &self.hops {
            cert.record(
                format!("roundtrip-H n={n} k={k} i={i} {}", self.op.label(*w)),
                &comp_at(*n)?.compose(h),
                &q.h_op(*n, *k, *i, *w)?.compose(comp_at(*n - *k)?),
            );
        }
        Ok(cert)
    }
}

/* # degree specializations */

/// A presentation vanishing from arity two on is a module over the unary
/// part of the operad.
#[derive(Debug, Clone)]
pub struct LinearPresentation {
    pub group: FgAbGroup,
    pub actions: BTreeMap<OpElem, ZHom>,
    pub certificate: PseudoMackeyCertificate,
}

/// A presentation vanishing from arity three on: the two groups with the
/// swap, fold, cofold, and scalar operators between them.
#[derive(Debug, Clone)]
pub struct QuadraticPresentation {
    pub m_e: FgAbGroup,
    pub m_ee: FgAbGroup,
    pub t: ZHom,
    pub tstar: ZHom,
    pub p: ZHom,
    pub h: BTreeMap<OpElem, ZHom>,
    pub i_e: BTreeMap<OpElem, ZHom>,
    pub i_ee: BTreeMap<(OpElem, OpElem), ZHom>,
    pub certificate: PseudoMackeyCertificate,
}

impl JanusPresentation {
    pub fn linear_presentation(&self) -> Result<LinearPresentation, MkError> {
        for n in 2..=self.bound {
            if !self.group(n).is_trivial() {
                return Err(MkError::DegreeViolation { n });
            }
        }
        let op = &self.op;
        let mut actions = BTreeMap::new();
        for w in op.elements(1)? {
            actions.insert(w, self.i_op(&[w])?);
        }
        let mut cert = PseudoMackeyCertificate::default();
        cert.record(
            "lin-1 unit".into(),
            &actions[&op.unit()],
            &ZHom::identity(self.group(1)),
        );
        for (&w, _) in &actions {
            for (&w2, a2) in &actions {
                let composite = op.gamma(w, &[w2])?;
                cert.record(
                    format!("lin-2 omega={} omega'={}", op.label(w), op.label(w2)),
                    &a2.compose(&actions[&w]),
                    &actions[&composite],
                );
            }
        }
        Ok(LinearPresentation { group: self.group(1).clone(), actions, certificate: cert })
    }

    pub fn quadratic_presentation(&self) -> Result<QuadraticPresentation, MkError> {
        if self.bound < 2 {
            return Err(MkError::Shape("quadratic data needs the bound at two".into()));
        }
        for n in 3..=self.bound {
            if !self.group(n).is_trivial() {
                return Err(MkError::DegreeViolation { n });
            }
        }
        let op = &self.op;
        let t = self.t_op(2, 1)?;
        let tstar = self.tstar_op(2, 1)?;
        let p = self.p_op(2, 1)?;
        let mut h = BTreeMap::new();
        for w in op.elements(2)? {
            h.insert(w, self.h_op(2, 1, 1, w)?);
        }
        let mut i_e = BTreeMap::new();
        for w in op.elements(1)? {
            i_e.insert(w, self.i_op(&[w])?);
        }
        let mut i_ee = BTreeMap::new();
        for w in op.elements(1)? {
            for w2 in op.elements(1)? {
                i_ee.insert((w, w2), self.i_op(&[w, w2])?);
            }
        }

        let mut cert = PseudoMackeyCertificate::default();
        let id2 = ZHom::identity(self.group(2));
        let tau = Perm::adjacent_transposition(2, 1);
        cert.record("quad-1".into(), &t.compose(&t), &id2);
        cert.record("quad-2".into(), &p.compose(&t), &p);
        for (&w, _) in &i_e {
            for (&w2, a2) in &i_e {
                cert.record(
                    format!("quad-3 omega={} omega'={}", op.label(w), op.label(w2)),
                    &a2.compose(&i_e[&w]),
                    &i_e[&op.gamma(w, &[w2])?],
                );
            }
        }
        for (&(w1, w2), _) in &i_ee {
            for (&(v1, v2), a2) in &i_ee {
                cert.record(
                    format!(
                        "quad-4 [{},{}] then [{},{}]",
                        op.label(w1),
                        op.label(w2),
                        op.label(v1),
                        op.label(v2)
                    ),
                    &a2.compose(&i_ee[&(w1, w2)]),
                    &i_ee[&(op.gamma(w1, &[v1])?, op.gamma(w2, &[v2])?)],
                );
            }
        }
        for (&(w1, w2), a) in &i_ee {
            cert.record(
                format!("quad-5 [{},{}]", op.label(w1), op.label(w2)),
                &a.compose(&t),
                &t.compose(&i_ee[&(w2, w1)]),
            );
        }
        for (&alpha, ha) in &h {
            for (&w, iw) in &i_e {
                cert.record(
                    format!("quad-6 alpha={} omega={}", op.label(alpha), op.label(w)),
                    &ha.compose(iw),
                    &h[&op.gamma(w, &[alpha])?],
                );
            }
            for (&(w1, w2), a) in &i_ee {
                cert.record(
                    format!(
                        "quad-7 alpha={} [{},{}]",
                        op.label(alpha),
                        op.label(w1),
                        op.label(w2)
                    ),
                    &a.compose(ha),
                    &h[&op.gamma(alpha, &[w1, w2])?],
                );
            }
            let flipped = &h[&op.act(alpha, &tau)?];
            cert.record(
                format!("quad-8 alpha={}", op.label(alpha)),
                &tstar.compose(ha),
                flipped,
            );
            cert.record(
                format!("quad-8' alpha={}", op.label(alpha)),
                &t.compose(ha),
                flipped,
            );
        }
        cert.record("quad-9 right".into(), &t.compose(&tstar), &id2);
        cert.record("quad-9 left".into(), &tstar.compose(&t), &id2);
        for (&w, iw) in &i_e {
            cert.record(
                format!("quad-10 omega={}", op.label(w)),
                &iw.compose(&p),
                &p.compose(&i_ee[&(w, w)]),
            );
        }
        for (&alpha, ha) in &h {
            let keep_first = op.gamma(alpha, &[op.unit(), op.zero()])?;
            let keep_second = op.gamma(alpha, &[op.zero(), op.unit()])?;
            let rhs = i_ee[&(keep_first, keep_second)]
                .add(&t.compose(&i_ee[&(keep_second, keep_first)]));
            cert.record(format!("quad-11 alpha={}", op.label(alpha)), &ha.compose(&p), &rhs);
        }

        // reduced laws when the unary part is trivial
        if op.size(1)? == 1 {
            for (&alpha, ha) in &h {
                cert.record(
                    format!("quad-php alpha={}", op.label(alpha)),
                    &p.compose(ha).compose(&p),
                    &p.scale(&bi(2)),
                );
                for (&alpha2, ha2) in &h {
                    let flipped = &h[&op.act(alpha2, &tau)?];
                    cert.record(
                        format!(
                            "quad-hph alpha={} alpha'={}",
                            op.label(alpha),
                            op.label(alpha2)
                        ),
                        &ha.compose(&p).compose(ha2),
                        &ha2.add(flipped),
                    );
                }
            }
        }
        Ok(QuadraticPresentation {
            m_e: self.group(1).clone(),
            m_ee: self.group(2).clone(),
            t,
            tstar,
            p,
            h,
            i_e,
            i_ee,
            certificate: cert,
        })
    }
}

/* # serialization */

fn group_to_json(g: &FgAbGroup) -> Value {
    json!({
        "rank": g.rank(),
        "torsion": g.torsion().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
    })
}

fn group_from_json(v: &Value) -> Result<FgAbGroup, MkError> {
    let rank = v
        .get("rank")
        .and_then(Value::as_u64)
        .ok_or_else(|| MkError::Shape("group entry needs a rank".into()))? as usize;
    let torsion = v
        .get("torsion")
        .and_then(Value::as_array)
        .map(|a| {
            a.iter()
                .map(|d| {
                    d.as_str()
                        .ok_or_else(|| MkError::Shape("torsion entries are strings".into()))?
                        .parse::<Int>()
                        .map_err(|_| MkError::Shape("unreadable torsion order".into()))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?
        .unwrap_or_default();
    Ok(FgAbGroup::new(rank, torsion))
}

fn matrix_to_json(h: &ZHom) -> Value {
    let m = h.matrix();
    let rows: Vec<Vec<String>> = (0..m.rows)
        .map(|r| (0..m.cols).map(|c| m.get(r, c).to_string()).collect())
        .collect();
    json!(rows)
}

fn matrix_from_json(v: &Value, src: &FgAbGroup, dst: &FgAbGroup) -> Result<ZHom, MkError> {
    let rows = v
        .as_array()
        .ok_or_else(|| MkError::Shape("matrix must be an array of rows".into()))?;
    let mut m = crate::zmod::ZMatrix::zeros(dst.num_coords(), src.num_coords());
    if rows.len() != m.rows {
        return Err(MkError::Shape(format!(
            "matrix has {} rows where {} are needed",
            rows.len(),
            m.rows
        )));
    }
    for (r, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| MkError::Shape("matrix rows are arrays".into()))?;
        if row.len() != m.cols {
            return Err(MkError::Shape(format!(
                "matrix row has {} columns where {} are needed",
                row.len(),
                m.cols
            )));
        }
        for (c, cell) in row.iter().enumerate() {
            let val = match cell {
                Value::String(s) => s
                    .parse::<Int>()
                    .map_err(|_| MkError::Shape("unreadable matrix entry".into()))?,
                Value::Number(x) => x
                    .as_i64()
                    .map(Int::from)
                    .ok_or_else(|| MkError::Shape("matrix entries must be integers".into()))?,
                _ => return Err(MkError::Shape("matrix entries are strings or integers".into())),
            };
            m.set(r, c, val);
        }
    }
    Ok(ZHom::new(src.clone(), dst.clone(), m)?)
}

pub fn presentation_to_json(j: &JanusPresentation) -> Value {
    let groups: Vec<Value> = (0..=j.bound).map(|n| group_to_json(j.group(n))).collect();
    let mut operators = Vec::new();
    for ((n, i), h) in &j.t {
        operators.push(json!({"op": "T", "n": n, "i": i, "matrix": matrix_to_json(h)}));
    }
    for ((n, i), h) in &j.tstar {
        operators.push(json!({"op": "Tstar", "n": n, "i": i, "matrix": matrix_to_json(h)}));
    }
    for ((n, i), h) in &j.p {
        operators.push(json!({"op": "P", "n": n, "i": i, "matrix": matrix_to_json(h)}));
    }
    for ((n, alphas), h) in &j.iops {
        let names: Vec<String> = alphas.iter().map(|&a| j.op.label(a)).collect();
        operators.push(json!({"op": "I", "n": n, "alphas": names, "matrix": matrix_to_json(h)}));
    }
    for ((n, k, i, w), h) in &j.hops {
        operators.push(json!({
            "op": "H", "n": n, "k": k, "i": i, "omega": j.op.label(*w),
            "matrix": matrix_to_json(h),
        }));
    }
    json!({
        "format": "janus-presentation",
        "operad": j.op.name(),
        "bound": j.bound,
        "groups": groups,
        "operators": operators,
    })
}

fn field_usize(v: &Value, name: &str) -> Result<usize, MkError> {
    v.get(name)
        .and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| MkError::Shape(format!("operator entry needs a numeric '{name}'")))
}

/// Reads a presentation back; the operad is supplied by the caller and must
/// match the name recorded in the document.
pub fn presentation_from_json(op: &Operad, v: &Value) -> Result<JanusPresentation, MkError> {
    if let Some(name) = v.get("operad").and_then(Value::as_str) {
        if name != op.name() {
            return Err(MkError::Shape(format!(
                "document was written over '{name}', not '{}'",
                op.name()
            )));
        }
    }
    let bound = field_usize(v, "bound")?;
    let groups_json = v
        .get("groups")
        .and_then(Value::as_array)
        .ok_or_else(|| MkError::Shape("document needs a 'groups' array".into()))?;
    if groups_json.len() != bound + 1 {
        return Err(MkError::Shape(format!(
            "need {} groups, got {}",
            bound + 1,
            groups_json.len()
        )));
    }
    let groups =
        groups_json.iter().map(group_from_json).collect::<Result<Vec<FgAbGroup>, _>>()?;
    let mut t = BTreeMap::new();
    let mut tstar = BTreeMap::new();
    let mut p = BTreeMap::new();
    let mut iops = BTreeMap::new();
    let mut hops = BTreeMap::new();
    let ops = v
        .get("operators")
        .and_then(Value::as_array)
        .ok_or_else(|| MkError::Shape("document needs an 'operators' array".into()))?;
    let group_at = |n: usize| -> Result<&FgAbGroup, MkError> {
        groups.get(n).ok_or_else(|| MkError::Shape(format!("operator arity {n} out of range")))
    };
    for entry in ops {
        let kind = entry
            .get("op")
            .and_then(Value::as_str)
            .ok_or_else(|| MkError::Shape("operator entry needs an 'op' tag".into()))?;
        let mat = entry
            .get("matrix")
            .ok_or_else(|| MkError::Shape("operator entry needs a matrix".into()))?;
        match kind {
            "T" | "Tstar" | "P" => {
                let n = field_usize(entry, "n")?;
                let i = field_usize(entry, "i")?;
                if n < 2 || i < 1 || i >= n {
                    return Err(MkError::Shape(format!("bad swap or fold index ({n},{i})")));
                }
                let dst = if kind == "P" { group_at(n - 1)? } else { group_at(n)? };
                let h = matrix_from_json(mat, group_at(n)?, dst)?;
                match kind {
                    "T" => t.insert((n, i), h),
                    "Tstar" => tstar.insert((n, i), h),
                    _ => p.insert((n, i), h),
                };
            }
            "I" => {
                let n = field_usize(entry, "n")?;
                let names = entry
                    .get("alphas")
                    .and_then(Value::as_array)
                    .ok_or_else(|| MkError::Shape("scalar entry needs 'alphas'".into()))?;
                if names.len() != n {
                    return Err(MkError::Shape("scalar entry length disagrees with n".into()));
                }
                let alphas = names
                    .iter()
                    .map(|s| {
                        let s = s
                            .as_str()
                            .ok_or_else(|| MkError::Shape("decoration labels are strings".into()))?;
                        Ok(op.parse_elem(1, s)?)
                    })
                    .collect::<Result<Vec<OpElem>, MkError>>()?;
                let h = matrix_from_json(mat, group_at(n)?, group_at(n)?)?;
                iops.insert((n, alphas), h);
            }
            "H" => {
                let n = field_usize(entry, "n")?;
                let k = field_usize(entry, "k")?;
                let i = field_usize(entry, "i")?;
                if k < 1 || k >= n || i < 1 || i > n - k {
                    return Err(MkError::Shape(format!("bad cofold index ({n},{k},{i})")));
                }
                let omega = entry
                    .get("omega")
                    .and_then(Value::as_str)
                    .ok_or_else(|| MkError::Shape("cofold entry needs 'omega'".into()))?;
                let w = op.parse_elem(k + 1, omega)?;
                let h = matrix_from_json(mat, group_at(n - k)?, group_at(n)?)?;
                hops.insert((n, k, i, w), h);
            }
            other => {
                return Err(MkError::Shape(format!("unknown operator tag '{other}'")));
            }
        }
    }
    JanusPresentation::new(op.clone(), bound, groups, t, tstar, p, iops, hops)
}

/* # a worked fixture */

/// The square-of-the-augmentation fixture: groups `0, Z, Z²`, fold adds the
/// two coordinates, cofold duplicates, swaps exchange them.
pub fn tensor_square_presentation() -> Result<JanusPresentation, MkError> {
    let op = Operad::builtin("com", 2)?;
    let z = FgAbGroup::free(1);
    let z2 = FgAbGroup::free(2);
    let swap = ZHom::new(z2.clone(), z2.clone(), crate::zmod::ZMatrix::from_i64_rows(&[vec![0, 1], vec![1, 0]]))?;
    let mu = op.elements(2)?[0];
    let mut t = BTreeMap::new();
    t.insert((2usize, 1usize), swap.clone());
    let mut tstar = BTreeMap::new();
    tstar.insert((2usize, 1usize), swap);
    let mut p = BTreeMap::new();
    p.insert(
        (2usize, 1usize),
        ZHom::new(z2.clone(), z.clone(), crate::zmod::ZMatrix::from_i64_rows(&[vec![1, 1]]))?,
    );
    let mut iops = BTreeMap::new();
    iops.insert((1usize, vec![op.unit()]), ZHom::identity(&z));
    iops.insert((2usize, vec![op.unit(), op.unit()]), ZHom::identity(&z2));
    let mut hops = BTreeMap::new();
    hops.insert(
        (2usize, 1usize, 1usize, mu),
        ZHom::new(z.clone(), z2.clone(), crate::zmod::ZMatrix::from_i64_rows(&[vec![1], vec![1]]))?,
    );
    JanusPresentation::new(
        op,
        2,
        vec![FgAbGroup::trivial(), z, z2],
        t,
        tstar,
        p,
        iops,
        hops,
    )
}

/// Linearized points functor of a finite commutative monoid: the value at
/// `n` is free on the tuples `A^n`, and a span pulls a tuple back along its
/// vertical leg and multiplies it out along the fibers of the horizontal
/// one. Element `0` is the unit. Only meaningful over operads with one
/// operation per arity, where decorations carry no information.
pub fn monoid_points_functor(
    cat: &BaseCat,
    table: &[Vec<usize>],
) -> Result<TruncatedFunctor, MkError> {
    let s = table.len();
    if s == 0 || table.iter().any(|row| row.len() != s || row.iter().any(|&x| x >= s)) {
        return Err(MkError::Shape("multiplication table must be square over 0..size".into()));
    }
    for i in 0..s {
        if table[0][i] != i || table[i][0] != i {
            return Err(MkError::Shape("element 0 must be the unit".into()));
        }
        for j in 0..s {
            if table[i][j] != table[j][i] {
                return Err(MkError::Shape("the multiplication must be commutative".into()));
            }
            for k in 0..s {
                if table[table[i][j]][k] != table[i][table[j][k]] {
                    return Err(MkError::Shape("the multiplication must be associative".into()));
                }
            }
        }
    }
    if cat.kind() != BaseKind::Span {
        return Err(MkError::Shape("points functors live on the span category".into()));
    }
    let f = TruncatedFunctor::from_fn(
        cat,
        false,
        |n| Ok(FgAbGroup::free(s.pow(n as u32))),
        |m| match m {
            Mor::Span(sp) => {
                let (a, b, x) = (sp.source(), sp.target(), sp.apex());
                let v = sp.vertical();
                let h = sp.horizontal();
                let mut mat = crate::zmod::ZMatrix::zeros(s.pow(b as u32), s.pow(a as u32));
                for col in 0..s.pow(a as u32) {
                    let mut t = Vec::with_capacity(a);
                    let mut c = col;
                    for _ in 0..a {
                        t.push(c % s);
                        c /= s;
                    }
                    let mut out = vec![0usize; b];
                    for u in 1..=x {
                        let y = h.apply(u);
                        out[y - 1] = table[out[y - 1]][t[v.apply(u) - 1]];
                    }
                    let row: usize =
                        out.iter().enumerate().map(|(q, &e)| e * s.pow(q as u32)).sum();
                    mat.set(row, col, bi(1));
                }
                ZHom::new(
                    FgAbGroup::free(s.pow(a as u32)),
                    FgAbGroup::free(s.pow(b as u32)),
                    mat,
                )
                .map_err(|e| FunctorError::Shape(e.to_string()))
            }
            Mor::Map(_) => Err(FunctorError::Shape("span category expected".into())),
        },
    )?;
    Ok(f)
}

/// The span-category linearization: free of rank `n` at `n`, a span acts by
/// counting apex points over each source and target pair. Degree one, so
/// its cross-effects vanish from arity two on.
pub fn span_linearization(cat: &BaseCat) -> Result<TruncatedFunctor, MkError> {
    if cat.kind() != BaseKind::Span {
        return Err(MkError::Shape("the linearization lives on the span category".into()));
    }
    let f = TruncatedFunctor::from_fn(
        cat,
        false,
        |n| Ok(FgAbGroup::free(n)),
        |m| match m {
            Mor::Span(sp) => {
                let (a, b, x) = (sp.source(), sp.target(), sp.apex());
                let v = sp.vertical();
                let h = sp.horizontal();
                let mut mat = crate::zmod::ZMatrix::zeros(b, a);
                for u in 1..=x {
                    let (r, c) = (h.apply(u) - 1, v.apply(u) - 1);
                    let bumped = mat.get(r, c) + &bi(1);
                    mat.set(r, c, bumped);
                }
                ZHom::new(FgAbGroup::free(a), FgAbGroup::free(b), mat)
                    .map_err(|e| FunctorError::Shape(e.to_string()))
            }
            Mor::Map(_) => Err(FunctorError::Shape("span category expected".into())),
        },
    )?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn com2() -> Operad {
        Operad::builtin("com", 2).unwrap()
    }

    #[test]
    fn words_recompose_over_small_surjections() {
        let op = Operad::builtin("as", 3).unwrap();
        let mut plain = 0usize;
        let mut decorated = 0usize;
        for a in 1..=3usize {
            for b in 1..=a {
                for h in plain_surjections(a, b) {
                    horizontal_word(&h).unwrap();
                    plain += 1;
                }
                for v in opcat::enumerate_hom(Flavor::Omega, &op, a, b, 100_000).unwrap() {
                    vertical_word(&op, &v).unwrap();
                    decorated += 1;
                }
            }
        }
        assert_eq!(plain, 1 + 2 + 1 + 6 + 6 + 1);
        assert!(decorated >= plain);
    }

    #[test]
    fn interleaver_specializes_to_the_adjacent_swap() {
        for n in 2..=4usize {
            for i in 1..n {
                let sigma = interleaver(n, 1, i).unwrap();
                assert_eq!(sigma, Perm::adjacent_transposition(n + 2, i + 1));
                let tau = |q: usize| Perm::adjacent_transposition(n + 1, q);
                let id = Perm::identity(n + 1);
                let cut = |cols: &[usize]| {
                    remove_columns(&sigma, &cols.iter().copied().collect()).unwrap()
                };
                assert_eq!(cut(&[i]), tau(i));
                assert_eq!(cut(&[i + 2]), id);
                assert_eq!(cut(&[i + 1]), id);
                assert_eq!(cut(&[i + 3]), tau(i + 1));
                assert_eq!(
                    remove_columns(&sigma, &[i, i + 3].iter().copied().collect()).unwrap(),
                    Perm::adjacent_transposition(n, i)
                );
                assert_eq!(
                    remove_columns(&sigma, &[i + 1, i + 2].iter().copied().collect()).unwrap(),
                    Perm::identity(n)
                );
            }
        }
    }

    #[test]
    fn exchange_pattern_counts_match_the_subset_census() {
        let op = Operad::builtin("com", 4).unwrap();
        for k in 1..=3usize {
            let expected = 3usize.pow(k as u32 + 1) - 2;
            assert_eq!(exchange_patterns(k).len(), expected, "k={k}");
            let sq = spans::presentation_square(&op, k).unwrap();
            assert_eq!(spans::admissible_subsets(&sq).unwrap().len(), expected, "k={k}");
        }
    }

    #[test]
    fn tensor_square_certifies() {
        let j = tensor_square_presentation().unwrap();
        let hor = j.check_horizontal_relations().unwrap();
        assert!(hor.holds(), "{:?}", hor.failures.iter().map(|f| &f.name).collect::<Vec<_>>());
        assert!(!hor.verified.is_empty());
        let vert = j.check_vertical_relations().unwrap();
        assert!(vert.holds(), "{:?}", vert.failures.iter().map(|f| &f.name).collect::<Vec<_>>());
        let pm = j.check_pseudo_mackey().unwrap();
        assert!(pm.holds(), "{:?}", pm.failures.iter().map(|f| &f.name).collect::<Vec<_>>());
        assert!(pm.verified.iter().any(|n| n.starts_with("pm-5")));
        let ex = j.check_exchange(2, 100_000).unwrap();
        assert!(ex.holds(), "{:?}", ex.failures.iter().map(|f| &f.name).collect::<Vec<_>>());
        assert!(ex.verified.iter().any(|n| n.starts_with("exchange a=2")));
    }

    #[test]
    fn corrupted_operator_is_named() {
        let mut j = tensor_square_presentation().unwrap();
        let key = *j.hops.keys().next().unwrap();
        let doubled = j.hops[&key].scale(&bi(2));
        j.hops.insert(key, doubled);
        let pm = j.check_pseudo_mackey().unwrap();
        assert!(!pm.holds());
        assert!(pm.failures.iter().any(|f| f.name.starts_with("pm-5 n=2 k=1")));
    }

    #[test]
    fn quadratic_laws_on_the_tensor_square() {
        let j = tensor_square_presentation().unwrap();
        let q = j.quadratic_presentation().unwrap();
        assert!(
            q.certificate.holds(),
            "{:?}",
            q.certificate.failures.iter().map(|f| &f.name).collect::<Vec<_>>()
        );
        assert!(q.certificate.verified.iter().any(|n| n.starts_with("quad-11")));
        assert!(q.certificate.verified.iter().any(|n| n.starts_with("quad-php")));
        assert!(q.certificate.verified.iter().any(|n| n.starts_with("quad-hph")));
        assert_eq!(q.p.matrix().get(0, 0), &bi(1));
        assert_eq!(q.p.matrix().get(0, 1), &bi(1));
    }

    #[test]
    fn linearization_square_extraction_certifies() {
        let op = Operad::builtin("com", 4).unwrap();
        let cat = BaseCat::new(op, BaseKind::Span, 2, 4, 1_000_000).unwrap();
        let l = span_linearization(&cat).unwrap();
        let sq = crate::functorlab::tensor_square(&l).unwrap();
        for f in [&l, &sq] {
            let j = from_functor(f).unwrap();
            assert!(j.check_horizontal_relations().unwrap().holds());
            assert!(j.check_vertical_relations().unwrap().holds());
            let pm = j.check_pseudo_mackey().unwrap();
            assert!(pm.holds(), "{:?}", pm.failures.iter().map(|f| &f.name).collect::<Vec<_>>());
        }
        let j = from_functor(&sq).unwrap();
        assert!(j.group(1).is_isomorphic(&FgAbGroup::free(1)));
        assert!(j.group(2).is_isomorphic(&FgAbGroup::free(2)));
    }

    #[test]
    fn unbounded_degree_truncation_fails_honestly() {
        // the monoid points functor has nonzero cross-effects in every
        // arity, so cutting at two must break the big exchange relation
        let op = Operad::builtin("com", 4).unwrap();
        let cat = BaseCat::new(op, BaseKind::Span, 2, 4, 1_000_000).unwrap();
        let f = monoid_points_functor(&cat, &[vec![0, 1], vec![1, 1]]).unwrap();
        let j = from_functor(&f).unwrap();
        assert!(j.check_horizontal_relations().unwrap().holds());
        assert!(j.check_vertical_relations().unwrap().holds());
        let pm = j.check_pseudo_mackey().unwrap();
        assert!(!pm.holds());
        assert!(pm.failures.iter().all(|x| x.name.starts_with("pm-5")));
    }

    #[test]
    fn reconstruction_roundtrips_the_tensor_square() {
        let j = tensor_square_presentation().unwrap();
        let cert = j.roundtrip_certificate(4, 1_000_000).unwrap();
        assert!(cert.holds(), "{:?}", cert.failures.iter().map(|f| &f.name).collect::<Vec<_>>());
        assert!(cert.verified.iter().any(|n| n == "roundtrip-iso n=2"));
    }

    #[test]
    fn degree_guards_fire() {
        let j = tensor_square_presentation().unwrap();
        match j.linear_presentation() {
            Err(MkError::DegreeViolation { n: 2 }) => {}
            other => panic!("expected a degree violation, got {other:?}"),
        }
        let op = com2();
        let mut iops = BTreeMap::new();
        iops.insert((1usize, vec![op.unit()]), ZHom::identity(&FgAbGroup::free(1)));
        let lin = JanusPresentation::new(
            op,
            1,
            vec![FgAbGroup::trivial(), FgAbGroup::free(1)],
            BTreeMap::new(),
            BTreeMap::new(),
            BTreeMap::new(),
            iops,
            BTreeMap::new(),
        )
        .unwrap();
        let data = lin.linear_presentation().unwrap();
        assert!(data.certificate.holds());
        assert_eq!(data.actions.len(), 1);
        assert!(lin.quadratic_presentation().is_err());
    }

    #[test]
    fn json_roundtrip_preserves_the_operators() {
        let j = tensor_square_presentation().unwrap();
        let v = presentation_to_json(&j);
        let j2 = presentation_from_json(j.op(), &v).unwrap();
        assert_eq!(presentation_to_json(&j2), v);
        let wrong = Operad::builtin("as", 2).unwrap();
        assert!(presentation_from_json(&wrong, &v).is_err());
    }
}
