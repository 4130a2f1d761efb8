//! Truncated functors from a decorated or span category into abelian groups.
//!
//! A functor is stored as a finite table: one group per object `0..=bound` and
//! one integer hom per morphism in the precomputed hom sets. Construction
//! re-derives every pairwise composite and rejects tables that fail the
//! functor laws, so downstream cross-effect and Taylor computations start from
//! certified data. Wedge calculus (inclusions, retractions, folds) is exposed
//! through the base category; cross-effects are kernels, Taylor truncation is
//! a cokernel, and every isomorphism claimed along the way is checked by
//! Smith-form rank arithmetic rather than assumed.

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use crate::opcat::{self, DecoratedMap, Flavor, OpcatError};
use crate::operad::{Operad, OperadError};
use crate::spans::{self, PlainMap, SpanError, SpanMorphism};
use crate::zmod::{
    bi, kernel_subobject, quotient_by_rows, reduce_presentation, FgAbGroup, Reduced, SubObject,
    ZHom, ZMatrix, ZmodError,
};

#[derive(Debug, Error)]
pub enum FunctorError {
    #[error(transparent)]
    Operad(#[from] OperadError),
    #[error(transparent)]
    Opcat(#[from] OpcatError),
    #[error(transparent)]
    Span(#[from] SpanError),
    #[error(transparent)]
    Zmod(#[from] ZmodError),
    #[error("object {needed} exceeds the category bound {bound}")]
    ObjectBound { needed: usize, bound: usize },
    #[error("no value stored on morphism {key}")]
    MorphismNotStored { key: String },
    #[error("not a functor: {0}")]
    NotAFunctor(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("{0} is unavailable on this base category")]
    Unavailable(&'static str),
    #[error("operation needs a reduced functor (trivial value at 0)")]
    NotReduced,
    #[error("cross-effect decomposition map is not an isomorphism")]
    DecompositionNotIso,
    #[error("kernel and cokernel forms of the contravariant cross-effect disagree")]
    ContravariantFormsDisagree,
}

/* # base categories */

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseKind {
    Gamma,
    Omega,
    Span,
}

/// A morphism of the base category: a decorated map for the one-arrow kinds,
/// a canonical span class otherwise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mor {
    Map(DecoratedMap),
    Span(SpanMorphism),
}

impl Mor {
    pub fn source(&self) -> usize {
        match self {
            Mor::Map(m) => m.source,
            Mor::Span(s) => s.source(),
        }
    }

    pub fn target(&self) -> usize {
        match self {
            Mor::Map(m) => m.target,
            Mor::Span(s) => s.target(),
        }
    }

    pub fn key(&self) -> String {
        match self {
            Mor::Map(m) => m.key(),
            Mor::Span(s) => s.key(),
        }
    }
}

/// A base category truncated at a fixed object bound, with every hom set
/// enumerated up front.
#[derive(Debug, Clone)]
pub struct BaseCat {
    op: Operad,
    kind: BaseKind,
    bound: usize,
    apex_budget: usize,
    hom_budget: u128,
    homs: Vec<Vec<Vec<Mor>>>,
}

impl BaseCat {
    /// Enumerates all hom sets for objects `0..=bound`. `apex_budget` limits
    /// span apexes and is ignored for the one-arrow kinds; `hom_budget` caps
    /// the raw enumeration size of any single hom set.
    pub fn new(
        op: Operad,
        kind: BaseKind,
        bound: usize,
        apex_budget: usize,
        hom_budget: u128,
    ) -> Result<BaseCat, FunctorError> {
        let mut homs = Vec::with_capacity(bound + 1);
        for a in 0..=bound {
            let mut row = Vec::with_capacity(bound + 1);
            for b in 0..=bound {
                let set: Vec<Mor> = match kind {
                    BaseKind::Gamma => {
                        opcat::enumerate_hom(Flavor::Gamma, &op, a, b, hom_budget)?
                            .into_iter()
                            .map(Mor::Map)
                            .collect()
                    }
                    BaseKind::Omega => {
                        opcat::enumerate_hom(Flavor::Omega, &op, a, b, hom_budget)?
                            .into_iter()
                            .map(Mor::Map)
                            .collect()
                    }
                    BaseKind::Span => spans::enumerate_spans(&op, a, b, apex_budget, hom_budget)?
                        .into_iter()
                        .map(Mor::Span)
                        .collect(),
                };
                row.push(set);
            }
            homs.push(row);
        }
        Ok(BaseCat { op, kind, bound, apex_budget, hom_budget, homs })
    }

    pub fn op(&self) -> &Operad {
        &self.op
    }

    pub fn kind(&self) -> BaseKind {
        self.kind
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn apex_budget(&self) -> usize {
        self.apex_budget
    }

    pub fn hom_budget(&self) -> u128 {
        self.hom_budget
    }

    pub fn same_shape(&self, other: &BaseCat) -> bool {
        self.op.name() == other.op.name() && self.kind == other.kind && self.bound == other.bound
    }

    fn check_object(&self, n: usize) -> Result<(), FunctorError> {
        if n > self.bound {
            return Err(FunctorError::ObjectBound { needed: n, bound: self.bound });
        }
        Ok(())
    }

    pub fn hom(&self, a: usize, b: usize) -> Result<&[Mor], FunctorError> {
        self.check_object(a)?;
        self.check_object(b)?;
        Ok(&self.homs[a][b])
    }

    fn flavor(&self) -> Flavor {
        match self.kind {
            BaseKind::Gamma => Flavor::Gamma,
            BaseKind::Omega => Flavor::Omega,
            BaseKind::Span => Flavor::S,
        }
    }

    pub fn identity(&self, n: usize) -> Result<Mor, FunctorError> {
        self.check_object(n)?;
        Ok(match self.kind {
            BaseKind::Span => Mor::Span(SpanMorphism::identity(&self.op, n)?),
            _ => Mor::Map(DecoratedMap::identity(self.flavor(), &self.op, n)?),
        })
    }

    /// `outer ∘ inner`. For spans the composite apex may exceed the ambient
    /// limit, in which case the error is passed through.
    pub fn compose(&self, outer: &Mor, inner: &Mor) -> Result<Mor, FunctorError> {
        match (outer, inner) {
            (Mor::Map(f), Mor::Map(g)) => Ok(Mor::Map(opcat::compose(&self.op, f, g)?)),
            (Mor::Span(f), Mor::Span(g)) => Ok(Mor::Span(spans::compose_spans(&self.op, f, g)?)),
            _ => Err(FunctorError::Shape("mixed morphism kinds".into())),
        }
    }

    pub fn is_zero_morphism(&self, m: &Mor) -> bool {
        match (self.kind, m) {
            (BaseKind::Gamma, Mor::Map(d)) => d.map_vec().iter().all(|&v| v == 0),
            (BaseKind::Span, Mor::Span(s)) => s.apex() == 0,
            _ => false,
        }
    }

    pub fn zero_morphism(&self, a: usize, b: usize) -> Result<Mor, FunctorError> {
        self.check_object(a)?;
        self.check_object(b)?;
        match self.kind {
            BaseKind::Gamma => Ok(Mor::Map(DecoratedMap::new(
                Flavor::Gamma,
                &self.op,
                a,
                b,
                vec![0; a],
                vec![self.op.zero(); b],
            )?)),
            BaseKind::Span => {
                let vertical =
                    DecoratedMap::new(Flavor::S, &self.op, 0, a, vec![], vec![self.op.zero(); a])?;
                let horizontal = PlainMap::new(Flavor::S, 0, b, vec![])?;
                Ok(Mor::Span(SpanMorphism::new(&self.op, vertical, horizontal)?))
            }
            BaseKind::Omega => Err(FunctorError::Unavailable("a zero morphism")),
        }
    }

    fn check_blocks(&self, sizes: &[usize], subset: &[usize]) -> Result<(), FunctorError> {
        let total: usize = sizes.iter().sum();
        self.check_object(total)?;
        if subset.windows(2).any(|w| w[0] >= w[1]) || subset.iter().any(|&i| i >= sizes.len()) {
            return Err(FunctorError::Shape("subset must be strictly increasing block indices".into()));
        }
        Ok(())
    }

    /// The wedge inclusion `X_S -> X_full` for the block decomposition given
    /// by `sizes`; `subset` lists the retained blocks, zero-based.
    pub fn wedge_inclusion(&self, sizes: &[usize], subset: &[usize]) -> Result<Mor, FunctorError> {
        self.check_blocks(sizes, subset)?;
        let offsets = block_offsets(sizes);
        let m_sub: usize = subset.iter().map(|&i| sizes[i]).sum();
        let m_full: usize = sizes.iter().sum();
        let mut map = Vec::with_capacity(m_sub);
        for &i in subset {
            for t in 1..=sizes[i] {
                map.push(offsets[i] + t);
            }
        }
        match self.kind {
            BaseKind::Gamma => {
                let mut dec = vec![self.op.zero(); m_full];
                for &v in &map {
                    dec[v - 1] = self.op.unit();
                }
                Ok(Mor::Map(DecoratedMap::new(Flavor::Gamma, &self.op, m_sub, m_full, map, dec)?))
            }
            BaseKind::Span => {
                let vertical = DecoratedMap::identity(Flavor::S, &self.op, m_sub)?;
                let horizontal = PlainMap::new(Flavor::S, m_sub, m_full, map)?;
                Ok(Mor::Span(SpanMorphism::new(&self.op, vertical, horizontal)?))
            }
            BaseKind::Omega => Err(FunctorError::Unavailable("wedge structure")),
        }
    }

    /// The wedge retraction `X_full -> X_S`, collapsing the dropped blocks.
    pub fn wedge_retraction(&self, sizes: &[usize], subset: &[usize]) -> Result<Mor, FunctorError> {
        self.check_blocks(sizes, subset)?;
        let offsets = block_offsets(sizes);
        let m_sub: usize = subset.iter().map(|&i| sizes[i]).sum();
        let m_full: usize = sizes.iter().sum();
        let sub_offsets: BTreeMap<usize, usize> = {
            let mut acc = 0;
            subset
                .iter()
                .map(|&i| {
                    let o = acc;
                    acc += sizes[i];
                    (i, o)
                })
                .collect()
        };
        match self.kind {
            BaseKind::Gamma => {
                let mut map = vec![0; m_full];
                for &i in subset {
                    for t in 1..=sizes[i] {
                        map[offsets[i] + t - 1] = sub_offsets[&i] + t;
                    }
                }
                let dec = vec![self.op.unit(); m_sub];
                Ok(Mor::Map(DecoratedMap::new(Flavor::Gamma, &self.op, m_full, m_sub, map, dec)?))
            }
            BaseKind::Span => {
                // apex X_S sits inside the source by the inclusion and maps
                // identically to the target
                let mut incl = Vec::with_capacity(m_sub);
                for &i in subset {
                    for t in 1..=sizes[i] {
                        incl.push(offsets[i] + t);
                    }
                }
                let mut dec = vec![self.op.zero(); m_full];
                for &v in &incl {
                    dec[v - 1] = self.op.unit();
                }
                let vertical = DecoratedMap::new(Flavor::S, &self.op, m_sub, m_full, incl, dec)?;
                let horizontal = PlainMap::identity(Flavor::S, m_sub);
                Ok(Mor::Span(SpanMorphism::new(&self.op, vertical, horizontal)?))
            }
            BaseKind::Omega => Err(FunctorError::Unavailable("wedge structure")),
        }
    }

    /// The fold `x^{∨k} -> x`, identity on every copy. Span categories only.
    pub fn fold(&self, x: usize, k: usize) -> Result<Mor, FunctorError> {
        if self.kind != BaseKind::Span {
            return Err(FunctorError::Unavailable("the fold map"));
        }
        self.check_object(x * k)?;
        let vertical = DecoratedMap::identity(Flavor::S, &self.op, x * k)?;
        let map = (0..x * k).map(|t| t % x + 1).collect();
        let horizontal = PlainMap::new(Flavor::S, x * k, x, map)?;
        Ok(Mor::Span(SpanMorphism::new(&self.op, vertical, horizontal)?))
    }
}

fn block_offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut acc = 0;
    for &s in sizes {
        out.push(acc);
        acc += s;
    }
    out
}

/* # truncated functors */

/// A functor table over a `BaseCat`, verified against the functor laws at
/// construction. Contravariant tables store `F(f) : F(target) -> F(source)`.
#[derive(Debug, Clone)]
pub struct TruncatedFunctor {
    cat: BaseCat,
    contravariant: bool,
    objects: Vec<FgAbGroup>,
    morphisms: BTreeMap<String, ZHom>,
    unverified_pairs: usize,
}

impl TruncatedFunctor {
    pub fn new(
        cat: BaseCat,
        contravariant: bool,
        objects: Vec<FgAbGroup>,
        morphisms: BTreeMap<String, ZHom>,
    ) -> Result<TruncatedFunctor, FunctorError> {
        if objects.len() != cat.bound + 1 {
            return Err(FunctorError::Shape(format!(
                "need {} object values, got {}",
                cat.bound + 1,
                objects.len()
            )));
        }
        let mut f =
            TruncatedFunctor { cat, contravariant, objects, morphisms, unverified_pairs: 0 };
        f.verify()?;
        Ok(f)
    }

    pub fn from_fn(
        cat: &BaseCat,
        contravariant: bool,
        mut obj: impl FnMut(usize) -> Result<FgAbGroup, FunctorError>,
        mut mor: impl FnMut(&Mor) -> Result<ZHom, FunctorError>,
    ) -> Result<TruncatedFunctor, FunctorError> {
        let objects =
            (0..=cat.bound).map(&mut obj).collect::<Result<Vec<_>, _>>()?;
        let mut morphisms = BTreeMap::new();
        for a in 0..=cat.bound {
            for b in 0..=cat.bound {
                for m in cat.hom(a, b)? {
                    morphisms.insert(m.key(), mor(m)?);
                }
            }
        }
        TruncatedFunctor::new(cat.clone(), contravariant, objects, morphisms)
    }

    fn verify(&mut self) -> Result<(), FunctorError> {
        let bound = self.cat.bound;
        for a in 0..=bound {
            for b in 0..=bound {
                for m in &self.cat.homs[a][b] {
                    let h = self
                        .morphisms
                        .get(&m.key())
                        .ok_or_else(|| FunctorError::MorphismNotStored { key: m.key() })?;
                    let (src, dst) = if self.contravariant { (b, a) } else { (a, b) };
                    if h.src != self.objects[src] || h.dst != self.objects[dst] {
                        return Err(FunctorError::NotAFunctor(format!(
                            "endpoint groups do not match on {}",
                            m.key()
                        )));
                    }
                }
            }
        }
        for n in 0..=bound {
            let id = self.cat.identity(n)?;
            let h = &self.morphisms[&id.key()];
            if !h.eq(&ZHom::identity(&self.objects[n])) {
                return Err(FunctorError::NotAFunctor(format!("identity at {n} is not preserved")));
            }
        }
        let mut skipped = 0;
        for a in 0..=bound {
            for b in 0..=bound {
                for c in 0..=bound {
                    for f in &self.cat.homs[a][b] {
                        for g in &self.cat.homs[b][c] {
                            let comp = match self.cat.compose(g, f) {
                                Ok(x) => x,
                                // span composites can leave the apex budget;
                                // those pairs go unverified by design
                                Err(_) if self.cat.kind == BaseKind::Span => {
                                    skipped += 1;
                                    continue;
                                }
                                Err(e) => return Err(e),
                            };
                            let stored = match self.morphisms.get(&comp.key()) {
                                Some(x) => x,
                                None if self.cat.kind == BaseKind::Span => {
                                    // canonical apex within the hard limit
                                    // but beyond this category's budget
                                    skipped += 1;
                                    continue;
                                }
                                None => {
                                    return Err(FunctorError::MorphismNotStored { key: comp.key() })
                                }
                            };
                            let hf = &self.morphisms[&f.key()];
                            let hg = &self.morphisms[&g.key()];
                            let built =
                                if self.contravariant { hf.compose(hg) } else { hg.compose(hf) };
                            if !built.eq(stored) {
                                return Err(FunctorError::NotAFunctor(format!(
                                    "composition fails on {} after {}",
                                    g.key(),
                                    f.key()
                                )));
                            }
                        }
                    }
                }
            }
        }
        self.unverified_pairs = skipped;
        Ok(())
    }

    pub fn cat(&self) -> &BaseCat {
        &self.cat
    }

    pub fn contravariant(&self) -> bool {
        self.contravariant
    }

    pub fn object(&self, n: usize) -> &FgAbGroup {
        &self.objects[n]
    }

    pub fn on(&self, m: &Mor) -> Result<&ZHom, FunctorError> {
        self.morphisms
            .get(&m.key())
            .ok_or_else(|| FunctorError::MorphismNotStored { key: m.key() })
    }

    /// Composable pairs whose composite left the span budget and therefore
    /// went unchecked. Always zero on the one-arrow kinds.
    pub fn unverified_pairs(&self) -> usize {
        self.unverified_pairs
    }

    pub fn is_reduced(&self) -> bool {
        self.objects[0].is_trivial()
    }

    /// The same table over a smaller object bound.
    pub fn restrict_bound(&self, new_bound: usize) -> Result<TruncatedFunctor, FunctorError> {
        if new_bound > self.cat.bound {
            return Err(FunctorError::ObjectBound { needed: new_bound, bound: self.cat.bound });
        }
        let cat = BaseCat::new(
            self.cat.op.clone(),
            self.cat.kind,
            new_bound,
            self.cat.apex_budget,
            self.cat.hom_budget,
        )?;
        let mut morphisms = BTreeMap::new();
        for a in 0..=new_bound {
            for b in 0..=new_bound {
                for m in cat.hom(a, b)? {
                    morphisms.insert(m.key(), self.on(m)?.clone());
                }
            }
        }
        TruncatedFunctor::new(
            cat,
            self.contravariant,
            self.objects[..=new_bound].to_vec(),
            morphisms,
        )
    }
}

/* # cross-effects */

pub struct CrossEffectResult {
    pub args: Vec<usize>,
    pub group: FgAbGroup,
    /// Inclusion of the cross-effect into the value at the full wedge.
    pub inclusion: ZHom,
    sub: SubObject,
}

impl CrossEffectResult {
    /// Writes a hom landing inside the cross-effect in its coordinates.
    pub fn express(&self, h: &ZHom) -> Result<ZHom, ZmodError> {
        self.sub.express(h)
    }
}

/// The `n`-th cross-effect at the tuple `args`, as the kernel of the stacked
/// block retractions (covariant) or block inclusions (contravariant). The
/// contravariant case also forms the cokernel presentation and insists the
/// two agree.
pub fn cross_effect(
    f: &TruncatedFunctor,
    args: &[usize],
) -> Result<CrossEffectResult, FunctorError> {
    let n = args.len();
    if n == 0 {
        return Err(FunctorError::Shape("cross-effect needs at least one slot".into()));
    }
    let wedge: usize = args.iter().sum();
    f.cat.check_object(wedge)?;
    let full = f.object(wedge).clone();
    let parts: Vec<FgAbGroup> =
        (0..n).map(|k| f.object(wedge - args[k]).clone()).collect();
    let (total, injs, projs) = FgAbGroup::direct_sum(&parts);
    let mut stacked = ZHom::zero(&full, &total);
    let mut hats = Vec::with_capacity(n);
    for k in 0..n {
        let subset: Vec<usize> = (0..n).filter(|&i| i != k).collect();
        let collapse = if f.contravariant {
            f.cat.wedge_inclusion(args, &subset)?
        } else {
            f.cat.wedge_retraction(args, &subset)?
        };
        let h = f.on(&collapse)?;
        stacked = stacked.add(&injs[k].compose(h));
        hats.push(subset);
    }
    let sub = kernel_subobject(&stacked);
    if f.contravariant {
        // cokernel presentation of the same group, certified isomorphic
        let mut assembled = ZHom::zero(&total, &full);
        for (k, subset) in hats.iter().enumerate() {
            let r = f.on(&f.cat.wedge_retraction(args, subset)?)?;
            assembled = assembled.add(&r.compose(&projs[k]));
        }
        let q = quotient_by_rows(&full, &assembled.matrix().transpose());
        if !q.proj.compose(&sub.incl).is_iso() {
            return Err(FunctorError::ContravariantFormsDisagree);
        }
    }
    Ok(CrossEffectResult {
        args: args.to_vec(),
        group: sub.group.clone(),
        inclusion: sub.incl.clone(),
        sub,
    })
}

pub struct DecompositionPiece {
    /// Zero-based slot indices of the sub-wedge.
    pub subset: Vec<usize>,
    pub cross: CrossEffectResult,
}

pub struct Decomposition {
    pub pieces: Vec<DecompositionPiece>,
    pub total: FgAbGroup,
    /// Certified isomorphism from the sum of the pieces onto the full value.
    pub assembly: ZHom,
}

/// Splits `F(X_1 ∨ … ∨ X_n)` into cross-effects over the nonempty slot
/// subsets. Fails unless the assembled comparison map is an isomorphism.
pub fn decompose(f: &TruncatedFunctor, args: &[usize]) -> Result<Decomposition, FunctorError> {
    if !f.is_reduced() {
        return Err(FunctorError::NotReduced);
    }
    let n = args.len();
    if n == 0 || n > 16 {
        return Err(FunctorError::Shape("decomposition needs 1..=16 slots".into()));
    }
    let wedge: usize = args.iter().sum();
    f.cat.check_object(wedge)?;
    let mut pieces = Vec::new();
    let mut maps = Vec::new();
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let sub_args: Vec<usize> = subset.iter().map(|&i| args[i]).collect();
        let cross = cross_effect(f, &sub_args)?;
        let to_full = if f.contravariant {
            f.on(&f.cat.wedge_retraction(args, &subset)?)?.compose(&cross.inclusion)
        } else {
            f.on(&f.cat.wedge_inclusion(args, &subset)?)?.compose(&cross.inclusion)
        };
        maps.push(to_full);
        pieces.push(DecompositionPiece { subset, cross });
    }
    let groups: Vec<FgAbGroup> = pieces.iter().map(|p| p.cross.group.clone()).collect();
    let (total, _, projs) = FgAbGroup::direct_sum(&groups);
    let mut assembly = ZHom::zero(&total, f.object(wedge));
    for (m, p) in maps.iter().zip(&projs) {
        assembly = assembly.add(&m.compose(p));
    }
    if !assembly.is_iso() {
        return Err(FunctorError::DecompositionNotIso);
    }
    Ok(Decomposition { pieces, total, assembly })
}

pub struct DegreeReport {
    /// Least certified degree, if the top cross-effect vanished on all probes.
    pub degree: Option<usize>,
    pub max_probe_total: usize,
    /// Slot counts with at least one nonvanishing probe.
    pub nonvanishing: Vec<usize>,
}

/// Probes cross-effects over every tuple of positive sizes with total at most
/// `max_total`. The reported degree is only as strong as the probe range: a
/// functor is called degree `d` here when all `(d+1)`-slot probes vanish.
pub fn degree(f: &TruncatedFunctor, max_total: usize) -> Result<DegreeReport, FunctorError> {
    let max_total = max_total.min(f.cat.bound);
    if max_total == 0 {
        return Err(FunctorError::Shape("degree probing needs a positive wedge bound".into()));
    }
    let mut nonvanishing = Vec::new();
    for parts in 1..=max_total {
        let mut seen = false;
        for tuple in compositions(parts, max_total) {
            if !cross_effect(f, &tuple)?.group.is_trivial() {
                seen = true;
                break;
            }
        }
        if seen {
            nonvanishing.push(parts);
        }
    }
    let degree = match nonvanishing.last() {
        Some(&top) if top == max_total => None,
        Some(&top) => Some(top),
        None => Some(0),
    };
    Ok(DegreeReport { degree, max_probe_total: max_total, nonvanishing })
}

/// All tuples of `parts` positive integers with sum at most `max_total`.
fn compositions(parts: usize, max_total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(parts);
    fn rec(parts: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            out.push(cur.clone());
            return;
        }
        for v in 1..=left.saturating_sub(parts - 1) {
            cur.push(v);
            rec(parts - 1, left - v, cur, out);
            cur.pop();
        }
    }
    rec(parts, max_total, &mut cur, &mut out);
    out
}

/* # Taylor truncation */

pub struct TaylorTruncation {
    pub functor: TruncatedFunctor,
    /// One projection `F(x) -> T(x)` per object of the truncated range.
    pub projections: Vec<ZHom>,
}

/// The degree-`n` Taylor quotient `T_n F`: at each object the cokernel of the
/// fold applied to the top cross-effect. Needs the fold, so span categories
/// only, and a covariant input. The result lives over the bound divided by
/// `n+1` so that every required wedge stays in range.
pub fn taylor_truncate(
    f: &TruncatedFunctor,
    n: usize,
) -> Result<TaylorTruncation, FunctorError> {
    if f.cat.kind != BaseKind::Span {
        return Err(FunctorError::Unavailable("Taylor truncation"));
    }
    if f.contravariant {
        return Err(FunctorError::Shape("Taylor truncation expects a covariant functor".into()));
    }
    let new_bound = f.cat.bound / (n + 1);
    if new_bound == 0 {
        return Err(FunctorError::ObjectBound { needed: n + 1, bound: f.cat.bound });
    }
    let cat = BaseCat::new(
        f.cat.op.clone(),
        f.cat.kind,
        new_bound,
        f.cat.apex_budget,
        f.cat.hom_budget,
    )?;
    let mut objects = Vec::with_capacity(new_bound + 1);
    let mut projections = Vec::with_capacity(new_bound + 1);
    let mut lifts = Vec::with_capacity(new_bound + 1);
    for x in 0..=new_bound {
        let cr = cross_effect(f, &vec![x; n + 1])?;
        let fold = f.on(&f.cat.fold(x, n + 1)?)?;
        let s = fold.compose(&cr.inclusion);
        let q = quotient_by_rows(f.object(x), &s.matrix().transpose());
        objects.push(q.group.clone());
        projections.push(q.proj.clone());
        lifts.push(q.lift.clone());
    }
    let mut morphisms = BTreeMap::new();
    for a in 0..=new_bound {
        for b in 0..=new_bound {
            for m in cat.hom(a, b)? {
                let h = f.on(m)?;
                let mat = projections[b].matrix().mul(h.matrix()).mul(&lifts[a]);
                let t = ZHom::new(objects[a].clone(), objects[b].clone(), mat).map_err(|_| {
                    FunctorError::NotAFunctor(format!("truncation not natural on {}", m.key()))
                })?;
                // the square `proj ∘ F(m) = T(m) ∘ proj` certifies that the
                // quotient map is well defined
                if !projections[b].compose(h).eq(&t.compose(&projections[a])) {
                    return Err(FunctorError::NotAFunctor(format!(
                        "truncation not natural on {}",
                        m.key()
                    )));
                }
                morphisms.insert(m.key(), t);
            }
        }
    }
    let functor = TruncatedFunctor::new(cat, false, objects, morphisms)?;
    Ok(TaylorTruncation { functor, projections })
}

/* # natural transformations */

/// Checks that `comps[x] : F(x) -> G(x)` commutes with every stored morphism.
pub fn natural_transformation_check(
    f: &TruncatedFunctor,
    g: &TruncatedFunctor,
    comps: &[ZHom],
) -> Result<(), FunctorError> {
    if !f.cat.same_shape(&g.cat) || f.contravariant != g.contravariant {
        return Err(FunctorError::Shape("functors live over different bases".into()));
    }
    if comps.len() != f.cat.bound + 1 {
        return Err(FunctorError::Shape("one component per object required".into()));
    }
    for x in 0..=f.cat.bound {
        if comps[x].src != *f.object(x) || comps[x].dst != *g.object(x) {
            return Err(FunctorError::Shape(format!("component {x} has wrong endpoints")));
        }
    }
    for a in 0..=f.cat.bound {
        for b in 0..=f.cat.bound {
            for m in f.cat.hom(a, b)? {
                let (src, dst) = if f.contravariant { (b, a) } else { (a, b) };
                let lhs = comps[dst].compose(f.on(m)?);
                let rhs = g.on(m)?.compose(&comps[src]);
                if !lhs.eq(&rhs) {
                    return Err(FunctorError::NotAFunctor(format!(
                        "naturality fails on {}",
                        m.key()
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The map induced on cross-effects by a natural transformation.
pub fn induced_on_cross_effect(
    f: &TruncatedFunctor,
    g: &TruncatedFunctor,
    comps: &[ZHom],
    args: &[usize],
) -> Result<(ZHom, CrossEffectResult, CrossEffectResult), FunctorError> {
    natural_transformation_check(f, g, comps)?;
    let crf = cross_effect(f, args)?;
    let crg = cross_effect(g, args)?;
    let wedge: usize = args.iter().sum();
    let through = comps[wedge].compose(&crf.inclusion);
    let induced = crg.sub.express(&through)?;
    Ok((induced, crf, crg))
}

/* # tensor helpers */

/// Presentation of `a ⊗ b` on the coordinate generators `e_i ⊗ e_j`, indexed
/// row-major as `i * b.num_coords() + j`.
pub fn tensor_reduce(a: &FgAbGroup, b: &FgAbGroup) -> Reduced {
    let (na, nb) = (a.num_coords(), b.num_coords());
    let mut rows = Vec::new();
    for i in 0..na {
        if let Some(d) = a.coord_order(i) {
            for j in 0..nb {
                let mut r = vec![bi(0); na * nb];
                r[i * nb + j] = d.clone();
                rows.push(r);
            }
        }
    }
    for j in 0..nb {
        if let Some(d) = b.coord_order(j) {
            for i in 0..na {
                let mut r = vec![bi(0); na * nb];
                r[i * nb + j] = d.clone();
                rows.push(r);
            }
        }
    }
    let mat = ZMatrix::from_fn(rows.len(), na * nb, |r, c| rows[r][c].clone());
    reduce_presentation(na * nb, &mat)
}

/* # stock functors */

/// The content functor: `Z^n` at `n`, a morphism acts by counting where each
/// source point lands. Degree one by construction.
pub fn linear_functor(cat: &BaseCat) -> Result<TruncatedFunctor, FunctorError> {
    let op = cat.op().clone();
    TruncatedFunctor::from_fn(
        cat,
        false,
        |n| Ok(FgAbGroup::free(n)),
        |m| {
            let (a, b) = (m.source(), m.target());
            let mat = match m {
                Mor::Map(d) => ZMatrix::from_fn(b, a, |r, c| {
                    if d.apply(c + 1) == r + 1 {
                        bi(1)
                    } else {
                        bi(0)
                    }
                }),
                Mor::Span(s) => {
                    let tuple = spans::span_to_tuple(&op, s)?;
                    ZMatrix::from_fn(b, a, |r, c| {
                        bi(tuple[c].tuple().iter().filter(|&&v| v == r + 1).count() as i64)
                    })
                }
            };
            Ok(ZHom::new(FgAbGroup::free(a), FgAbGroup::free(b), mat)?)
        },
    )
}

/// The reduced representable `Z[Hom(x, -)] / Z[zero]`, covariant. On a base
/// with no zero morphisms this is the plain representable.
pub fn reduced_representable(cat: &BaseCat, x: usize) -> Result<TruncatedFunctor, FunctorError> {
    cat.check_object(x)?;
    let mut basis: Vec<Vec<Mor>> = Vec::with_capacity(cat.bound + 1);
    let mut index: Vec<BTreeMap<String, usize>> = Vec::with_capacity(cat.bound + 1);
    for y in 0..=cat.bound {
        let b: Vec<Mor> =
            cat.hom(x, y)?.iter().filter(|m| !cat.is_zero_morphism(m)).cloned().collect();
        index.push(b.iter().enumerate().map(|(i, m)| (m.key(), i)).collect());
        basis.push(b);
    }
    TruncatedFunctor::from_fn(
        cat,
        false,
        |y| Ok(FgAbGroup::free(basis[y].len())),
        |m| {
            let (a, b) = (m.source(), m.target());
            let mut mat = ZMatrix::zeros(basis[b].len(), basis[a].len());
            for (c, g) in basis[a].iter().enumerate() {
                let comp = cat.compose(m, g)?;
                if cat.is_zero_morphism(&comp) {
                    continue;
                }
                let r = *index[b].get(&comp.key()).ok_or_else(|| {
                    FunctorError::Shape(
                        "representable needs hom sets closed under postcomposition".into(),
                    )
                })?;
                mat.set(r, c, bi(1));
            }
            Ok(ZHom::new(
                FgAbGroup::free(basis[a].len()),
                FgAbGroup::free(basis[b].len()),
                mat,
            )?)
        },
    )
}

/// Transpose of a functor with free values, flipping the variance.
pub fn transpose_functor(f: &TruncatedFunctor) -> Result<TruncatedFunctor, FunctorError> {
    for x in 0..=f.cat.bound {
        if !f.object(x).invariant_factors().1.is_empty() {
            return Err(FunctorError::Shape("transpose needs torsion-free values".into()));
        }
    }
    let mut morphisms = BTreeMap::new();
    for (k, h) in &f.morphisms {
        morphisms.insert(
            k.clone(),
            ZHom::new(h.dst.clone(), h.src.clone(), h.matrix().transpose())?,
        );
    }
    TruncatedFunctor::new(f.cat.clone(), !f.contravariant, f.objects.clone(), morphisms)
}

fn transported_endpoints(f: &TruncatedFunctor, m: &Mor) -> (usize, usize) {
    if f.contravariant {
        (m.target(), m.source())
    } else {
        (m.source(), m.target())
    }
}

/// Pointwise tensor square `x ↦ F(x) ⊗ F(x)`, morphisms by the Kronecker
/// square transported through the tensor presentations.
pub fn tensor_square(f: &TruncatedFunctor) -> Result<TruncatedFunctor, FunctorError> {
    let reduced: Vec<Reduced> =
        (0..=f.cat.bound).map(|x| tensor_reduce(f.object(x), f.object(x))).collect();
    let mut morphisms = BTreeMap::new();
    for a in 0..=f.cat.bound {
        for b in 0..=f.cat.bound {
            for m in f.cat.hom(a, b)? {
                let h = f.on(m)?;
                let (src, dst) = transported_endpoints(f, m);
                let raw = h.matrix().kronecker(h.matrix());
                let mat = reduced[dst].proj.mul(&raw).mul(&reduced[src].lift);
                morphisms.insert(
                    m.key(),
                    ZHom::new(reduced[src].group.clone(), reduced[dst].group.clone(), mat)?,
                );
            }
        }
    }
    TruncatedFunctor::new(
        f.cat.clone(),
        f.contravariant,
        reduced.iter().map(|r| r.group.clone()).collect(),
        morphisms,
    )
}

/// Pointwise `x ↦ F(x) ⊗ Z/d`.
pub fn torsion_twist(f: &TruncatedFunctor, d: u64) -> Result<TruncatedFunctor, FunctorError> {
    if d < 2 {
        return Err(FunctorError::Shape("torsion twist needs a modulus of at least 2".into()));
    }
    let zd = FgAbGroup::new(0, vec![bi(d as i64)]);
    let reduced: Vec<Reduced> =
        (0..=f.cat.bound).map(|x| tensor_reduce(f.object(x), &zd)).collect();
    let mut morphisms = BTreeMap::new();
    for a in 0..=f.cat.bound {
        for b in 0..=f.cat.bound {
            for m in f.cat.hom(a, b)? {
                let h = f.on(m)?;
                let (src, dst) = transported_endpoints(f, m);
                // the twist factor has a single coordinate, so the Kronecker
                // square collapses to the original matrix
                let mat = reduced[dst].proj.mul(h.matrix()).mul(&reduced[src].lift);
                morphisms.insert(
                    m.key(),
                    ZHom::new(reduced[src].group.clone(), reduced[dst].group.clone(), mat)?,
                );
            }
        }
    }
    TruncatedFunctor::new(
        f.cat.clone(),
        f.contravariant,
        reduced.iter().map(|r| r.group.clone()).collect(),
        morphisms,
    )
}

/// Symmetric part of the tensor square: the kernel of `swap - id` with the
/// induced morphisms, each one certified to preserve the invariants.
pub fn divided_square(f: &TruncatedFunctor) -> Result<TruncatedFunctor, FunctorError> {
    let mut reduced = Vec::with_capacity(f.cat.bound + 1);
    let mut kers: Vec<SubObject> = Vec::with_capacity(f.cat.bound + 1);
    for x in 0..=f.cat.bound {
        let r = tensor_reduce(f.object(x), f.object(x));
        let n = f.object(x).num_coords();
        let swap_raw = ZMatrix::from_fn(n * n, n * n, |row, col| {
            let (i, j) = (col / n, col % n);
            if row == j * n + i {
                bi(1)
            } else {
                bi(0)
            }
        });
        let swap = ZHom::new(
            r.group.clone(),
            r.group.clone(),
            r.proj.mul(&swap_raw).mul(&r.lift),
        )?;
        kers.push(kernel_subobject(&swap.sub(&ZHom::identity(&r.group))));
        reduced.push(r);
    }
    let mut morphisms = BTreeMap::new();
    for a in 0..=f.cat.bound {
        for b in 0..=f.cat.bound {
            for m in f.cat.hom(a, b)? {
                let h = f.on(m)?;
                let (src, dst) = transported_endpoints(f, m);
                let raw = h.matrix().kronecker(h.matrix());
                let mat = reduced[dst].proj.mul(&raw).mul(&reduced[src].lift);
                let square = ZHom::new(
                    reduced[src].group.clone(),
                    reduced[dst].group.clone(),
                    mat,
                )?;
                let through = square.compose(&kers[src].incl);
                morphisms.insert(m.key(), kers[dst].express(&through)?);
            }
        }
    }
    TruncatedFunctor::new(
        f.cat.clone(),
        f.contravariant,
        kers.iter().map(|k| k.group.clone()).collect(),
        morphisms,
    )
}

pub struct SumFunctor {
    pub functor: TruncatedFunctor,
    pub inject_left: Vec<ZHom>,
    pub inject_right: Vec<ZHom>,
    pub project_left: Vec<ZHom>,
    pub project_right: Vec<ZHom>,
}

/// Pointwise direct sum, with the four structural natural transformations.
pub fn direct_sum_functors(
    f: &TruncatedFunctor,
    g: &TruncatedFunctor,
) -> Result<SumFunctor, FunctorError> {
    if !f.cat.same_shape(&g.cat) || f.contravariant != g.contravariant {
        return Err(FunctorError::Shape("functors live over different bases".into()));
    }
    let mut objects = Vec::with_capacity(f.cat.bound + 1);
    let mut il = Vec::new();
    let mut ir = Vec::new();
    let mut pl = Vec::new();
    let mut pr = Vec::new();
    for x in 0..=f.cat.bound {
        let (total, injs, projs) =
            FgAbGroup::direct_sum(&[f.object(x).clone(), g.object(x).clone()]);
        objects.push(total);
        il.push(injs[0].clone());
        ir.push(injs[1].clone());
        pl.push(projs[0].clone());
        pr.push(projs[1].clone());
    }
    let mut morphisms = BTreeMap::new();
    for a in 0..=f.cat.bound {
        for b in 0..=f.cat.bound {
            for m in f.cat.hom(a, b)? {
                let (src, dst) = transported_endpoints(f, m);
                let h = il[dst]
                    .compose(f.on(m)?)
                    .compose(&pl[src])
                    .add(&ir[dst].compose(g.on(m)?).compose(&pr[src]));
                morphisms.insert(m.key(), h);
            }
        }
    }
    let functor = TruncatedFunctor::new(f.cat.clone(), f.contravariant, objects, morphisms)?;
    Ok(SumFunctor {
        functor,
        inject_left: il,
        inject_right: ir,
        project_left: pl,
        project_right: pr,
    })
}

/// Conjugates every value by a random basis change fixing the torsion
/// coordinates. Returns the functor and the conjugating isomorphisms.
pub fn conjugate_functor(
    f: &TruncatedFunctor,
    rng: &mut impl Rng,
) -> Result<(TruncatedFunctor, Vec<ZHom>), FunctorError> {
    let mut us = Vec::with_capacity(f.cat.bound + 1);
    for x in 0..=f.cat.bound {
        let g = f.object(x);
        let rank = g.invariant_factors().0;
        let u = crate::zmod::random_unimodular(rank, rng);
        let n = g.num_coords();
        let mat = ZMatrix::from_fn(n, n, |r, c| {
            if r < rank && c < rank {
                u.get(r, c).clone()
            } else if r == c {
                bi(1)
            } else {
                bi(0)
            }
        });
        us.push(ZHom::new(g.clone(), g.clone(), mat)?);
    }
    let inverses: Vec<ZHom> = us
        .iter()
        .map(|u| u.inverse().ok_or(FunctorError::Shape("conjugator is not invertible".into())))
        .collect::<Result<_, _>>()?;
    let mut morphisms = BTreeMap::new();
    for a in 0..=f.cat.bound {
        for b in 0..=f.cat.bound {
            for m in f.cat.hom(a, b)? {
                let (src, dst) = transported_endpoints(f, m);
                morphisms
                    .insert(m.key(), us[dst].compose(f.on(m)?).compose(&inverses[src]));
            }
        }
    }
    let out = TruncatedFunctor::new(
        f.cat.clone(),
        f.contravariant,
        f.objects.clone(),
        morphisms,
    )?;
    Ok((out, us))
}

pub struct CompositionDegreeReport {
    pub inner_degree: Option<usize>,
    pub outer_degree: usize,
    pub composite_degree: Option<usize>,
    /// Whether the composite degree respects the product bound; `None` when a
    /// degree did not stabilise within the probe range.
    pub bound_ok: Option<bool>,
}

/// Compares the probed degree of a composite against `deg(inner) * deg(outer)`
/// where `composite` was built by applying a degree-`outer_degree` operation
/// pointwise to `inner`.
pub fn composition_degree_report(
    inner: &TruncatedFunctor,
    composite: &TruncatedFunctor,
    outer_degree: usize,
    max_total: usize,
) -> Result<CompositionDegreeReport, FunctorError> {
    let di = degree(inner, max_total)?.degree;
    let dc = degree(composite, max_total)?.degree;
    let bound_ok = match (di, dc) {
        (Some(a), Some(c)) => Some(c <= a * outer_degree),
        _ => None,
    };
    Ok(CompositionDegreeReport {
        inner_degree: di,
        outer_degree,
        composite_degree: dc,
        bound_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn gamma_com(bound: usize) -> BaseCat {
        let op = Operad::builtin("com", 6).unwrap();
        BaseCat::new(op, BaseKind::Gamma, bound, 0, 10_000_000).unwrap()
    }

    fn span_com(bound: usize, apex: usize) -> BaseCat {
        let op = Operad::builtin("com", 8).unwrap();
        BaseCat::new(op, BaseKind::Span, bound, apex, 10_000_000).unwrap()
    }

    #[test]
    fn linear_functor_has_degree_one() {
        let cat = gamma_com(3);
        let lin = linear_functor(&cat).unwrap();
        assert_eq!(lin.unverified_pairs(), 0);
        let rep = degree(&lin, 3).unwrap();
        assert_eq!(rep.degree, Some(1));
        assert_eq!(rep.nonvanishing, vec![1]);
        assert!(cross_effect(&lin, &[1, 1]).unwrap().group.is_trivial());
        assert!(cross_effect(&lin, &[2, 1]).unwrap().group.is_trivial());
    }

    #[test]
    fn representable_on_pointed_base_is_linear_for_singleton_source() {
        let cat = gamma_com(2);
        let u = reduced_representable(&cat, 1).unwrap();
        assert!(u.is_reduced());
        assert_eq!(u.object(1).invariant_factors(), (1, vec![]));
        assert_eq!(u.object(2).invariant_factors(), (2, vec![]));
        assert_eq!(degree(&u, 2).unwrap().degree, Some(1));
        let dec = decompose(&u, &[1, 1]).unwrap();
        let ranks: Vec<usize> =
            dec.pieces.iter().map(|p| p.cross.group.invariant_factors().0).collect();
        assert_eq!(ranks, vec![1, 1, 0]);
    }

    #[test]
    fn tensor_square_cross_effect_has_rank_two() {
        let cat = span_com(3, 3);
        let lin = linear_functor(&cat).unwrap();
        let sq = tensor_square(&lin).unwrap();
        assert_eq!(sq.object(2).invariant_factors(), (4, vec![]));
        let cr = cross_effect(&sq, &[1, 1]).unwrap();
        assert_eq!(cr.group.invariant_factors(), (2, vec![]));
        let dec = decompose(&sq, &[1, 1]).unwrap();
        let ranks: Vec<usize> =
            dec.pieces.iter().map(|p| p.cross.group.invariant_factors().0).collect();
        assert_eq!(ranks, vec![1, 1, 2]);
        assert_eq!(dec.total.invariant_factors(), (4, vec![]));
        assert_eq!(degree(&sq, 3).unwrap().degree, Some(2));
    }

    #[test]
    fn taylor_one_of_tensor_square_vanishes_on_the_line() {
        let cat = span_com(3, 3);
        let sq = tensor_square(&linear_functor(&cat).unwrap()).unwrap();
        let t = taylor_truncate(&sq, 1).unwrap();
        assert_eq!(t.functor.cat().bound(), 1);
        assert!(t.functor.object(1).is_trivial());
    }

    #[test]
    fn taylor_one_of_a_linear_functor_changes_nothing() {
        let cat = span_com(2, 2);
        let lin = linear_functor(&cat).unwrap();
        let t = taylor_truncate(&lin, 1).unwrap();
        assert!(t.projections[1].is_iso());
        let small = lin.restrict_bound(1).unwrap();
        natural_transformation_check(&small, &t.functor, &t.projections).unwrap();
    }

    #[test]
    fn divided_square_sees_the_two_torsion() {
        let cat = span_com(3, 3);
        let lin = linear_functor(&cat).unwrap();
        let gsq = divided_square(&lin).unwrap();
        assert_eq!(gsq.object(1).invariant_factors(), (1, vec![]));
        assert_eq!(gsq.object(2).invariant_factors(), (3, vec![]));
        let cr = cross_effect(&gsq, &[1, 1]).unwrap();
        assert_eq!(cr.group.invariant_factors(), (1, vec![]));
        let t = taylor_truncate(&gsq, 1).unwrap();
        assert_eq!(t.functor.object(1).invariant_factors(), (0, vec![bi(2)]));
    }

    #[test]
    fn contravariant_cross_effect_agrees_with_its_cokernel_form() {
        let cat = span_com(2, 2);
        let sq = tensor_square(&linear_functor(&cat).unwrap()).unwrap();
        let dual = transpose_functor(&sq).unwrap();
        assert!(dual.contravariant());
        let cr = cross_effect(&dual, &[1, 1]).unwrap();
        assert_eq!(cr.group.invariant_factors(), (2, vec![]));
    }

    #[test]
    fn cross_effect_is_exact_on_a_split_sequence() {
        let cat = span_com(2, 2);
        let lin = linear_functor(&cat).unwrap();
        let sq = tensor_square(&lin).unwrap();
        let sum = direct_sum_functors(&lin, &sq).unwrap();
        natural_transformation_check(&lin, &sum.functor, &sum.inject_left).unwrap();
        natural_transformation_check(&sum.functor, &sq, &sum.project_right).unwrap();
        let (into, crl, _crs) =
            induced_on_cross_effect(&lin, &sum.functor, &sum.inject_left, &[1, 1]).unwrap();
        assert!(crl.group.is_trivial());
        assert!(into.is_zero());
        let (onto, crm, crr) =
            induced_on_cross_effect(&sum.functor, &sq, &sum.project_right, &[1, 1]).unwrap();
        assert_eq!(crm.group.invariant_factors(), (2, vec![]));
        assert_eq!(crr.group.invariant_factors(), (2, vec![]));
        assert!(onto.is_iso());
    }

    #[test]
    fn conjugation_and_twisting_preserve_cross_effect_shape() {
        let cat = span_com(2, 2);
        let sq = tensor_square(&linear_functor(&cat).unwrap()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let (conj, us) = conjugate_functor(&sq, &mut rng).unwrap();
        natural_transformation_check(&sq, &conj, &us).unwrap();
        assert!(cross_effect(&conj, &[1, 1])
            .unwrap()
            .group
            .is_isomorphic(&cross_effect(&sq, &[1, 1]).unwrap().group));
        let tw = torsion_twist(&sq, 3).unwrap();
        assert_eq!(tw.object(1).invariant_factors(), (0, vec![bi(3)]));
        assert_eq!(
            cross_effect(&tw, &[1, 1]).unwrap().group.invariant_factors(),
            (0, vec![bi(3), bi(3)])
        );
    }

    #[test]
    fn composite_degree_respects_the_product_bound() {
        let cat = span_com(3, 3);
        let lin = linear_functor(&cat).unwrap();
        let sq = tensor_square(&lin).unwrap();
        let rep = composition_degree_report(&lin, &sq, 2, 3).unwrap();
        assert_eq!(rep.inner_degree, Some(1));
        assert_eq!(rep.composite_degree, Some(2));
        assert_eq!(rep.bound_ok, Some(true));
    }

    #[test]
    fn wedge_maps_compose_to_the_identity() {
        let cat = gamma_com(3);
        let sizes = [1usize, 2];
        let i = cat.wedge_inclusion(&sizes, &[1]).unwrap();
        let r = cat.wedge_retraction(&sizes, &[1]).unwrap();
        let comp = cat.compose(&r, &i).unwrap();
        assert_eq!(comp.key(), cat.identity(2).unwrap().key());
        let scat = span_com(3, 3);
        let i = scat.wedge_inclusion(&sizes, &[1]).unwrap();
        let r = scat.wedge_retraction(&sizes, &[1]).unwrap();
        let comp = scat.compose(&r, &i).unwrap();
        assert_eq!(comp.key(), scat.identity(2).unwrap().key());
    }

    #[test]
    fn omega_base_has_no_wedge_calculus() {
        let op = Operad::builtin("as", 4).unwrap();
        let cat = BaseCat::new(op, BaseKind::Omega, 2, 0, 1_000_000).unwrap();
        assert!(matches!(
            cat.wedge_inclusion(&[1, 1], &[0]),
            Err(FunctorError::Unavailable(_))
        ));
        assert!(matches!(cat.zero_morphism(1, 1), Err(FunctorError::Unavailable(_))));
        let rep = reduced_representable(&cat, 1).unwrap();
        assert!(rep.is_reduced());
        assert_eq!(rep.object(1).invariant_factors(), (1, vec![]));
        // no surjection out of a singleton hits a two-point set
        assert!(rep.object(2).is_trivial());
    }
}
