//! Double-category squares over decorated maps, the span category, and free
//! algebra elements.
//!
//! A square has plain horizontal maps and decorated vertical maps:
//!
//! ```text
//!        top
//!    A -------> B
//!    |          |
//!  left       right      (decorated, pointing down)
//!    v          v
//!    C -------> D
//!       bottom
//! ```
//!
//! Validity means the underlying diagram is a set pullback and, over every
//! bottom-left point `c` with nonzero image, the top map carries the left
//! decoration to the right decoration over `bottom(c)`.
//!
//! Spans `[A <- X -> B]` (decorated left leg, plain right leg) are kept in a
//! canonical form: the lexicographically least presentation over all
//! relabelings of the apex, so equality of spans is structural equality.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde_json::json;
use thiserror::Error;

use crate::opcat::{self, DecoratedMap, Flavor, OpcatError};
use crate::operad::{Operad, OperadError, OpElem};
use crate::perm::Perm;

/// Canonicalization enumerates all apex relabelings; beyond this size the
/// operation is refused rather than approximated.
pub const MAX_APEX: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpanError {
    #[error(transparent)]
    Operad(#[from] OperadError),
    #[error(transparent)]
    Opcat(#[from] OpcatError),
    #[error("apex of size {apex} exceeds the canonicalization limit {MAX_APEX}")]
    ApexTooLarge { apex: usize },
    #[error("pointed lift needs the bottom map to send only the basepoint to 0")]
    GammaLiftUndefined,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("square invalid: {0}")]
    SquareInvalid(String),
    #[error("enumeration would produce {bound} elements, over the budget {budget}")]
    BudgetExceeded { bound: u128, budget: u128 },
    #[error("operation requires a surjection-flavored square")]
    NotOmegaFlavor,
    #[error("span json: {0}")]
    Json(String),
}

/* # plain maps */

/// An undecorated map, the horizontal arrow kind. Values are 1-based; `0` is
/// legal only for the pointed flavor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlainMap {
    pub flavor: Flavor,
    pub source: usize,
    pub target: usize,
    map: Vec<usize>,
}

impl PlainMap {
    pub fn new(
        flavor: Flavor,
        source: usize,
        target: usize,
        map: Vec<usize>,
    ) -> Result<Self, SpanError> {
        assert_eq!(map.len(), source, "map length must equal source size");
        for &v in &map {
            let ok = match flavor {
                Flavor::Gamma => v <= target,
                Flavor::S | Flavor::Omega => v >= 1 && v <= target,
            };
            if !ok {
                return Err(SpanError::ShapeMismatch(format!(
                    "value {v} out of range for target {target}"
                )));
            }
        }
        let pm = PlainMap { flavor, source, target, map };
        if flavor == Flavor::Omega {
            for y in 1..=target {
                if pm.fiber(y).is_empty() {
                    return Err(SpanError::ShapeMismatch(format!(
                        "target {y} has empty fiber in a surjection"
                    )));
                }
            }
        }
        Ok(pm)
    }

    pub fn identity(flavor: Flavor, n: usize) -> Self {
        PlainMap { flavor, source: n, target: n, map: (1..=n).collect() }
    }

    pub fn from_decorated(m: &DecoratedMap) -> Self {
        PlainMap {
            flavor: m.flavor,
            source: m.source,
            target: m.target,
            map: m.map_vec().to_vec(),
        }
    }

    pub fn apply(&self, x: usize) -> usize {
        assert!(x >= 1 && x <= self.source);
        self.map[x - 1]
    }

    pub fn map_vec(&self) -> &[usize] {
        &self.map
    }

    pub fn fiber(&self, y: usize) -> Vec<usize> {
        (1..=self.source).filter(|&x| self.map[x - 1] == y).collect()
    }

    pub fn zero_fiber(&self) -> Vec<usize> {
        (1..=self.source).filter(|&x| self.map[x - 1] == 0).collect()
    }

    pub fn is_surjective_on_nonzero(&self) -> bool {
        (1..=self.target).all(|y| !self.fiber(y).is_empty())
    }

    pub fn compose(outer: &PlainMap, inner: &PlainMap) -> Result<PlainMap, SpanError> {
        if outer.flavor != inner.flavor || outer.source != inner.target {
            return Err(SpanError::ShapeMismatch(format!(
                "cannot compose {}->{} after {}->{}",
                outer.source, outer.target, inner.source, inner.target
            )));
        }
        let map = inner
            .map
            .iter()
            .map(|&v| if v == 0 { 0 } else { outer.apply(v) })
            .collect();
        PlainMap::new(outer.flavor, inner.source, outer.target, map)
    }

    /// Restriction to a subset of the source, renumbered order-preservingly.
    /// The result is reported in the plain flavor since surjectivity may die.
    pub fn restrict(&self, subset: &BTreeSet<usize>) -> Result<PlainMap, SpanError> {
        for &x in subset {
            if x < 1 || x > self.source {
                return Err(SpanError::ShapeMismatch(format!("{x} outside the source")));
            }
        }
        let flavor = if self.flavor == Flavor::Omega { Flavor::S } else { self.flavor };
        let map = subset.iter().map(|&x| self.apply(x)).collect();
        PlainMap::new(flavor, subset.len(), self.target, map)
    }
}

/* # squares */

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Square {
    pub flavor: Flavor,
    pub top: PlainMap,
    pub bottom: PlainMap,
    pub left: DecoratedMap,
    pub right: DecoratedMap,
}

impl Square {
    pub fn apex(&self) -> usize {
        self.top.source
    }

    pub fn validate(&self, op: &Operad) -> Result<(), SpanError> {
        let fl = self.flavor;
        if self.top.flavor != fl
            || self.bottom.flavor != fl
            || self.left.flavor != fl
            || self.right.flavor != fl
        {
            return Err(SpanError::SquareInvalid("mixed flavors".into()));
        }
        if self.top.source != self.left.source
            || self.top.target != self.right.source
            || self.bottom.source != self.left.target
            || self.bottom.target != self.right.target
        {
            return Err(SpanError::SquareInvalid("object mismatch at a corner".into()));
        }
        // Pullback: nonzero apex points hit each compatible pair exactly once.
        let mut seen = BTreeSet::new();
        for a in 1..=self.apex() {
            let c = self.left.apply(a);
            let b = self.top.apply(a);
            let via_bottom = if c == 0 { 0 } else { self.bottom.apply(c) };
            let via_right = if b == 0 { 0 } else { self.right.apply(b) };
            if via_bottom != via_right {
                return Err(SpanError::SquareInvalid(format!(
                    "square does not commute at apex point {a}"
                )));
            }
            if !seen.insert((c, b)) {
                return Err(SpanError::SquareInvalid(format!(
                    "apex points repeat the pair ({c},{b})"
                )));
            }
        }
        let expected = pullback_pairs(self.flavor, &self.bottom, &self.right);
        if seen != expected.into_iter().collect::<BTreeSet<_>>() {
            return Err(SpanError::SquareInvalid(
                "apex is not the set pullback of the lower-right corner".into(),
            ));
        }
        // Decoration transport over every c whose bottom image is nonzero.
        for c in 1..=self.left.target {
            let d = self.bottom.apply(c);
            if d == 0 {
                continue;
            }
            let left_fiber = self.left.fiber(c);
            let right_fiber = self.right.fiber(d);
            if left_fiber.len() != right_fiber.len() {
                return Err(SpanError::SquareInvalid(format!(
                    "fibers over {c} and {d} differ in size"
                )));
            }
            let mut img = Vec::with_capacity(left_fiber.len());
            for &a in &left_fiber {
                let b = self.top.apply(a);
                match right_fiber.iter().position(|&v| v == b) {
                    Some(s) => img.push(s),
                    None => {
                        return Err(SpanError::SquareInvalid(format!(
                            "top map does not carry the fiber over {c} onto the fiber over {d}"
                        )))
                    }
                }
            }
            let pi = Perm::from_images(img).map_err(|_| {
                SpanError::SquareInvalid(format!("fiber comparison over {c} is not a bijection"))
            })?;
            let transported = op.act(self.left.decoration(c), &pi.inverse())?;
            if transported != self.right.decoration(d) {
                return Err(SpanError::SquareInvalid(format!(
                    "decoration over {c} does not transport to the decoration over {d}"
                )));
            }
        }
        Ok(())
    }
}

fn pullback_pairs(flavor: Flavor, bottom: &PlainMap, right: &DecoratedMap) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    match flavor {
        Flavor::Gamma => {
            for c in 0..=bottom.source {
                let gc = if c == 0 { 0 } else { bottom.apply(c) };
                for b in 0..=right.source {
                    if c == 0 && b == 0 {
                        continue;
                    }
                    let pb = if b == 0 { 0 } else { right.apply(b) };
                    if gc == pb {
                        pairs.push((c, b));
                    }
                }
            }
        }
        Flavor::S | Flavor::Omega => {
            for c in 1..=bottom.source {
                for b in 1..=right.source {
                    if bottom.apply(c) == right.apply(b) {
                        pairs.push((c, b));
                    }
                }
            }
        }
    }
    pairs.sort();
    pairs
}

/// Builds the unique square over the given bottom and right arrows. The apex
/// lists the compatible pairs `(c, b)` in lexicographic order, indexed from 1;
/// with that ordering the left decorations copy the right ones verbatim.
pub fn lift_square(
    op: &Operad,
    flavor: Flavor,
    bottom: &PlainMap,
    right: &DecoratedMap,
) -> Result<Square, SpanError> {
    if bottom.flavor != flavor || right.flavor != flavor {
        return Err(SpanError::ShapeMismatch("bottom/right flavor disagrees".into()));
    }
    if bottom.target != right.target {
        return Err(SpanError::ShapeMismatch("bottom and right have different targets".into()));
    }
    if flavor == Flavor::Gamma && !bottom.zero_fiber().is_empty() {
        return Err(SpanError::GammaLiftUndefined);
    }
    let pairs = pullback_pairs(flavor, bottom, right);
    let apex = pairs.len();
    let top_map: Vec<usize> = pairs.iter().map(|&(_, b)| b).collect();
    let left_map: Vec<usize> = pairs.iter().map(|&(c, _)| c).collect();
    let top = PlainMap::new(flavor, apex, right.source, top_map)?;
    let mut decorations = Vec::with_capacity(bottom.source);
    for c in 1..=bottom.source {
        let d = bottom.apply(c);
        let fiber_size = pairs.iter().filter(|&&(cc, _)| cc == c).count();
        if d == 0 {
            // unreachable: the pointed precondition forbids this case
            return Err(SpanError::GammaLiftUndefined);
        }
        debug_assert_eq!(fiber_size, right.fiber(d).len());
        decorations.push(right.decoration(d));
    }
    let left = DecoratedMap::new(flavor, op, apex, bottom.source, left_map, decorations)?;
    let sq = Square { flavor, top, bottom: bottom.clone(), left, right: right.clone() };
    sq.validate(op)?;
    Ok(sq)
}

/// The square witnessing the double isomorphism attached to a bijection.
pub fn double_iso_square(
    op: &Operad,
    flavor: Flavor,
    f: &Perm,
) -> Result<Square, SpanError> {
    let n = f.degree();
    let map: Vec<usize> = (1..=n).map(|x| f.apply(x - 1) + 1).collect();
    let top = PlainMap::new(flavor, n, n, map.clone())?;
    let left = DecoratedMap::new(flavor, op, n, n, map, vec![op.unit(); n])?;
    let bottom = PlainMap::identity(flavor, n);
    let right = DecoratedMap::identity(flavor, op, n)?;
    let sq = Square { flavor, top, bottom, left, right };
    sq.validate(op)?;
    Ok(sq)
}

/* # spans */

/// A class `[A <- X -> B]`, stored canonically: among all relabelings of the
/// apex the kept presentation minimizes (horizontal map, vertical map,
/// vertical decorations) lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpanMorphism {
    vertical: DecoratedMap,
    horizontal: PlainMap,
}

impl SpanMorphism {
    pub fn new(
        op: &Operad,
        vertical: DecoratedMap,
        horizontal: PlainMap,
    ) -> Result<Self, SpanError> {
        if vertical.flavor != Flavor::S || horizontal.flavor != Flavor::S {
            return Err(SpanError::ShapeMismatch("span legs must be unpointed".into()));
        }
        if vertical.source != horizontal.source {
            return Err(SpanError::ShapeMismatch("span legs start at different apexes".into()));
        }
        let (vertical, horizontal) = canonicalize(op, &vertical, &horizontal)?;
        Ok(SpanMorphism { vertical, horizontal })
    }

    pub fn identity(op: &Operad, n: usize) -> Result<Self, SpanError> {
        SpanMorphism::new(
            op,
            DecoratedMap::identity(Flavor::S, op, n)?,
            PlainMap::identity(Flavor::S, n),
        )
    }

    pub fn source(&self) -> usize {
        self.vertical.target
    }

    pub fn target(&self) -> usize {
        self.horizontal.target
    }

    pub fn apex(&self) -> usize {
        self.vertical.source
    }

    pub fn vertical(&self) -> &DecoratedMap {
        &self.vertical
    }

    pub fn horizontal(&self) -> &PlainMap {
        &self.horizontal
    }

    pub fn is_identity(&self) -> bool {
        self.apex() == self.source()
            && self.source() == self.target()
            && self.vertical.is_bijection()
            && self.vertical.map_vec() == self.horizontal.map_vec()
    }

    pub fn key(&self) -> String {
        format!(
            "{}|{:?}->{}",
            self.vertical.key(),
            self.horizontal.map_vec(),
            self.horizontal.target
        )
    }
}

fn canonicalize(
    op: &Operad,
    vertical: &DecoratedMap,
    horizontal: &PlainMap,
) -> Result<(DecoratedMap, PlainMap), SpanError> {
    let n = vertical.source;
    if n > MAX_APEX {
        return Err(SpanError::ApexTooLarge { apex: n });
    }
    type Key = (Vec<usize>, Vec<usize>, Vec<(usize, usize)>);
    let mut best: Option<(Key, DecoratedMap, PlainMap)> = None;
    for images in (1..=n).permutations(n) {
        let relabel = DecoratedMap::new(
            Flavor::S,
            op,
            n,
            n,
            images.clone(),
            vec![op.unit(); n],
        )?;
        let v = opcat::compose(op, vertical, &relabel)?;
        let h_map: Vec<usize> = images.iter().map(|&x| horizontal.apply(x)).collect();
        let h = PlainMap::new(Flavor::S, n, horizontal.target, h_map)?;
        let key: Key = (
            h.map_vec().to_vec(),
            v.map_vec().to_vec(),
            v.decorations().iter().map(|d| (d.arity, d.index)).collect(),
        );
        if best.as_ref().map_or(true, |(k, _, _)| key < *k) {
            best = Some((key, v, h));
        }
    }
    match best {
        Some((_, v, h)) => Ok((v, h)),
        // empty apex: the loop above yields exactly one empty permutation,
        // so this arm is only reachable for n = 0 with no iterations
        None => Ok((vertical.clone(), horizontal.clone())),
    }
}

/// `s2 ∘ s1` where `s1: A -> B` and `s2: B -> C`.
pub fn compose_spans(
    op: &Operad,
    s2: &SpanMorphism,
    s1: &SpanMorphism,
) -> Result<SpanMorphism, SpanError> {
    if s1.target() != s2.source() {
        return Err(SpanError::ShapeMismatch(format!(
            "cannot compose through {} != {}",
            s1.target(),
            s2.source()
        )));
    }
    let sq = lift_square(op, Flavor::S, &s1.horizontal, &s2.vertical)?;
    let vertical = opcat::compose(op, &s1.vertical, &sq.left)?;
    let horizontal = PlainMap::compose(&s2.horizontal, &sq.top)?;
    SpanMorphism::new(op, vertical, horizontal)
}

/// The span `A_1 ⊔ A_2 -> T` whose legs are the disjoint unions of the
/// inputs' legs. Precomposing with the canonical injections recovers them.
pub fn coproduct_spans(
    op: &Operad,
    s1: &SpanMorphism,
    s2: &SpanMorphism,
) -> Result<SpanMorphism, SpanError> {
    if s1.target() != s2.target() {
        return Err(SpanError::ShapeMismatch("coproduct needs a common target".into()));
    }
    let vertical = opcat::wedge(op, &s1.vertical, &s2.vertical)?;
    let h_map: Vec<usize> = s1
        .horizontal
        .map_vec()
        .iter()
        .chain(s2.horizontal.map_vec().iter())
        .copied()
        .collect();
    let horizontal =
        PlainMap::new(Flavor::S, s1.apex() + s2.apex(), s1.target(), h_map)?;
    SpanMorphism::new(op, vertical, horizontal)
}

/// The injection span of one summand into a two-part union; `which` is 1 or 2.
pub fn injection_span(
    op: &Operad,
    a1: usize,
    a2: usize,
    which: usize,
) -> Result<SpanMorphism, SpanError> {
    assert!(which == 1 || which == 2);
    let (size, shift) = if which == 1 { (a1, 0) } else { (a2, a1) };
    let vertical = DecoratedMap::identity(Flavor::S, op, size)?;
    let horizontal =
        PlainMap::new(Flavor::S, size, a1 + a2, (1..=size).map(|x| x + shift).collect())?;
    SpanMorphism::new(op, vertical, horizontal)
}

/// All spans `a -> b` with apex at most `apex_bound`, deduplicated by
/// canonical form, in sorted order.
pub fn enumerate_spans(
    op: &Operad,
    a: usize,
    b: usize,
    apex_bound: usize,
    budget: u128,
) -> Result<Vec<SpanMorphism>, SpanError> {
    let mut raw: u128 = 0;
    for x in 0..=apex_bound {
        let verts = opcat::count_hom(Flavor::S, op, x, a)?;
        let hors = (b as u128).checked_pow(x as u32).unwrap_or(u128::MAX);
        raw = raw.saturating_add(verts.saturating_mul(hors));
    }
    if raw > budget {
        return Err(SpanError::BudgetExceeded { bound: raw, budget });
    }
    let mut seen = BTreeSet::new();
    for x in 0..=apex_bound {
        let verticals = opcat::enumerate_hom(Flavor::S, op, x, a, budget)?;
        let h_maps = all_maps(x, b);
        for v in &verticals {
            for h in &h_maps {
                let hor = PlainMap::new(Flavor::S, x, b, h.clone())?;
                seen.insert(SpanMorphism::new(op, v.clone(), hor)?);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

fn all_maps(m: usize, n: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![1usize; m];
    loop {
        out.push(cur.clone());
        let mut pos = m;
        loop {
            if pos == 0 {
                return out;
            }
            cur[pos - 1] += 1;
            if cur[pos - 1] <= n {
                break;
            }
            cur[pos - 1] = 1;
            pos -= 1;
        }
    }
}

/* # free algebra elements */

/// An orbit class in the free algebra on `target` generators: an operad
/// element together with a tuple of generators, up to simultaneous
/// permutation. Stored as the least (theta index, tuple) representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeAlgebraElement {
    theta: OpElem,
    tuple: Vec<usize>,
    target: usize,
}

impl FreeAlgebraElement {
    pub fn new(
        op: &Operad,
        theta: OpElem,
        tuple: Vec<usize>,
        target: usize,
    ) -> Result<Self, SpanError> {
        op.check_elem(theta)?;
        if theta.arity != tuple.len() {
            return Err(SpanError::ShapeMismatch("tuple length must match the arity".into()));
        }
        for &t in &tuple {
            if t < 1 || t > target {
                return Err(SpanError::ShapeMismatch(format!(
                    "tuple entry {t} outside 1..={target}"
                )));
            }
        }
        let n = theta.arity;
        let mut best: Option<(usize, Vec<usize>)> = None;
        let mut best_theta = theta;
        for images in (0..n).permutations(n) {
            let sigma = Perm::from_images(images).expect("permutation images");
            let cand_theta = op.act(theta, &sigma)?;
            let inv = sigma.inverse();
            let cand_tuple: Vec<usize> = (0..n).map(|i| tuple[inv.apply(i)]).collect();
            let key = (cand_theta.index, cand_tuple.clone());
            if best.as_ref().map_or(true, |k| key < *k) {
                best = Some(key);
                best_theta = cand_theta;
            }
        }
        let tuple = best.map(|(_, t)| t).unwrap_or(tuple);
        Ok(FreeAlgebraElement { theta: best_theta, tuple, target })
    }

    /// The empty class, the image of the basepoint.
    pub fn zero(op: &Operad, target: usize) -> Self {
        FreeAlgebraElement { theta: op.zero(), tuple: Vec::new(), target }
    }

    pub fn generator(op: &Operad, i: usize, target: usize) -> Result<Self, SpanError> {
        FreeAlgebraElement::new(op, op.unit(), vec![i], target)
    }

    pub fn theta(&self) -> OpElem {
        self.theta
    }

    pub fn tuple(&self) -> &[usize] {
        &self.tuple
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn arity(&self) -> usize {
        self.tuple.len()
    }
}

/// Reads a one-source span as a free algebra element.
pub fn span_to_algebra_map(
    op: &Operad,
    s: &SpanMorphism,
) -> Result<FreeAlgebraElement, SpanError> {
    if s.source() != 1 {
        return Err(SpanError::ShapeMismatch("expected a span out of a single point".into()));
    }
    Ok(span_to_tuple(op, s)?.pop().expect("one component"))
}

/// Reads any span as the tuple of free algebra elements indexed by its
/// source points.
pub fn span_to_tuple(
    op: &Operad,
    s: &SpanMorphism,
) -> Result<Vec<FreeAlgebraElement>, SpanError> {
    let mut out = Vec::with_capacity(s.source());
    for i in 1..=s.source() {
        let fiber = s.vertical.fiber(i);
        let tuple: Vec<usize> = fiber.iter().map(|&x| s.horizontal.apply(x)).collect();
        out.push(FreeAlgebraElement::new(op, s.vertical.decoration(i), tuple, s.target())?);
    }
    Ok(out)
}

/// The canonical span presenting a tuple of free algebra elements.
pub fn tuple_to_span(
    op: &Operad,
    elems: &[FreeAlgebraElement],
) -> Result<SpanMorphism, SpanError> {
    let target = elems.first().map_or(0, |e| e.target);
    if elems.iter().any(|e| e.target != target) {
        return Err(SpanError::ShapeMismatch("components disagree on the target".into()));
    }
    let apex: usize = elems.iter().map(|e| e.arity()).sum();
    let mut v_map = Vec::with_capacity(apex);
    let mut h_map = Vec::with_capacity(apex);
    let mut decorations = Vec::with_capacity(elems.len());
    for (i, e) in elems.iter().enumerate() {
        v_map.extend(std::iter::repeat(i + 1).take(e.arity()));
        h_map.extend(e.tuple.iter().copied());
        decorations.push(e.theta);
    }
    let op_elems_ok = DecoratedMap::new(Flavor::S, op, apex, elems.len(), v_map, decorations)?;
    let horizontal = PlainMap::new(Flavor::S, apex, target, h_map)?;
    SpanMorphism::new(op, op_elems_ok, horizontal)
}

pub fn algebra_map_to_span(
    op: &Operad,
    e: &FreeAlgebraElement,
) -> Result<SpanMorphism, SpanError> {
    tuple_to_span(op, std::slice::from_ref(e))
}

/// Substitution: replaces generator `t` in the outer element by `args[t-1]`.
pub fn compose_algebra_maps(
    op: &Operad,
    outer: &FreeAlgebraElement,
    args: &[FreeAlgebraElement],
) -> Result<FreeAlgebraElement, SpanError> {
    if outer.target != args.len() {
        return Err(SpanError::ShapeMismatch(format!(
            "outer element addresses {} generators, {} given",
            outer.target,
            args.len()
        )));
    }
    let target = if args.is_empty() { 0 } else { args[0].target };
    if args.iter().any(|a| a.target != target) {
        return Err(SpanError::ShapeMismatch("argument targets disagree".into()));
    }
    let selected: Vec<&FreeAlgebraElement> =
        outer.tuple.iter().map(|&t| &args[t - 1]).collect();
    let thetas: Vec<OpElem> = selected.iter().map(|a| a.theta).collect();
    let theta = op.gamma(outer.theta, &thetas)?;
    let tuple: Vec<usize> =
        selected.iter().flat_map(|a| a.tuple.iter().copied()).collect();
    FreeAlgebraElement::new(op, theta, tuple, target)
}

/// All `p`-tuples of free algebra classes over `m` generators with component
/// arity at most `max_internal_arity`.
pub fn enumerate_free_hom(
    op: &Operad,
    p: usize,
    m: usize,
    max_internal_arity: usize,
    budget: u128,
) -> Result<Vec<Vec<FreeAlgebraElement>>, SpanError> {
    let mut singles = BTreeSet::new();
    for k in 0..=max_internal_arity.min(op.max_arity()) {
        for theta in op.elements(k)? {
            for tuple in all_maps(k, m) {
                singles.insert(FreeAlgebraElement::new(op, theta, tuple, m)?);
            }
        }
    }
    let singles: Vec<FreeAlgebraElement> = singles.into_iter().collect();
    let total = (singles.len() as u128)
        .checked_pow(p as u32)
        .unwrap_or(u128::MAX);
    if total > budget {
        return Err(SpanError::BudgetExceeded { bound: total, budget });
    }
    if p == 0 {
        return Ok(vec![Vec::new()]);
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; p];
    loop {
        out.push(idx.iter().map(|&i| singles[i].clone()).collect());
        let mut pos = p;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            idx[pos - 1] += 1;
            if idx[pos - 1] < singles.len() {
                break;
            }
            idx[pos - 1] = 0;
            pos -= 1;
        }
    }
}

/* # admissible subsets */

/// Subsets of the apex on which both the top map and the left map stay
/// surjective onto their full targets.
pub fn admissible_subsets(sq: &Square) -> Result<Vec<BTreeSet<usize>>, SpanError> {
    if sq.flavor != Flavor::Omega {
        return Err(SpanError::NotOmegaFlavor);
    }
    let apex = sq.apex();
    if apex > 22 {
        return Err(SpanError::ApexTooLarge { apex });
    }
    let top_fibers: Vec<u32> = (1..=sq.top.target)
        .map(|y| sq.top.fiber(y).iter().fold(0u32, |m, &x| m | (1 << (x - 1))))
        .collect();
    let left_fibers: Vec<u32> = (1..=sq.left.target)
        .map(|y| sq.left.fiber(y).iter().fold(0u32, |m, &x| m | (1 << (x - 1))))
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << apex) {
        let ok = top_fibers.iter().all(|&f| mask & f != 0)
            && left_fibers.iter().all(|&f| mask & f != 0);
        if ok {
            out.push((1..=apex).filter(|&x| mask & (1 << (x - 1)) != 0).collect());
        }
    }
    out.sort_by_key(|s: &BTreeSet<usize>| {
        (std::cmp::Reverse(s.len()), s.iter().copied().collect::<Vec<_>>())
    });
    Ok(out)
}

/// The standard square whose admissible-subset count is `3^(k+1) - 2`: bottom
/// collapses two points, the right leg merges `k+1` points with the given
/// decoration.
pub fn presentation_square(op: &Operad, k: usize) -> Result<Square, SpanError> {
    let alpha = op
        .elements(k + 1)?
        .first()
        .copied()
        .ok_or(SpanError::ShapeMismatch(format!("operad has no arity-{} element", k + 1)))?;
    let bottom = PlainMap::new(Flavor::Omega, 2, 1, vec![1, 1])?;
    let right =
        DecoratedMap::new(Flavor::Omega, op, k + 1, 1, vec![1; k + 1], vec![alpha])?;
    lift_square(op, Flavor::Omega, &bottom, &right)
}

/* # json */

pub fn span_to_json(op: &Operad, s: &SpanMorphism) -> serde_json::Value {
    let com = Operad::builtin("com", s.apex().max(1)).expect("builtin");
    let h_decorated = DecoratedMap::new(
        Flavor::S,
        &com,
        s.apex(),
        s.target(),
        s.horizontal.map_vec().to_vec(),
        (1..=s.target()).map(|y| com.elements(s.horizontal.fiber(y).len()).unwrap()[0]).collect(),
    )
    .expect("plain maps decorate over the one-point operad");
    json!({
        "source": s.source(),
        "target": s.target(),
        "vertical": opcat::to_json(op, s.vertical()),
        "horizontal": opcat::to_json(&com, &h_decorated),
    })
}

pub fn span_from_json(op: &Operad, v: &serde_json::Value) -> Result<SpanMorphism, SpanError> {
    let vert = v.get("vertical").ok_or(SpanError::Json("missing vertical leg".into()))?;
    let hor = v.get("horizontal").ok_or(SpanError::Json("missing horizontal leg".into()))?;
    let vertical = opcat::from_json(op, vert).map_err(|e| SpanError::Json(e.to_string()))?;
    let com = Operad::builtin("com", vertical.source.max(1))?;
    let h = opcat::from_json(&com, hor).map_err(|e| SpanError::Json(e.to_string()))?;
    let horizontal = PlainMap::new(Flavor::S, h.source, h.target, h.map_vec().to_vec())?;
    SpanMorphism::new(op, vertical, horizontal)
}

pub fn algebra_elem_to_json(op: &Operad, e: &FreeAlgebraElement) -> serde_json::Value {
    json!({
        "theta": op.label(e.theta),
        "tuple": e.tuple,
        "target": e.target,
    })
}

pub fn algebra_elem_from_json(
    op: &Operad,
    v: &serde_json::Value,
) -> Result<FreeAlgebraElement, SpanError> {
    let tuple: Vec<usize> = v
        .get("tuple")
        .and_then(|t| t.as_array())
        .ok_or(SpanError::Json("tuple must be an array".into()))?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|u| u as usize)
                .ok_or(SpanError::Json("tuple entries must be numbers".into()))
        })
        .collect::<Result<_, _>>()?;
    let label = v
        .get("theta")
        .and_then(|t| t.as_str())
        .ok_or(SpanError::Json("theta must be a label".into()))?;
    let theta = op.parse_elem(tuple.len(), label)?;
    let target = match v.get("target") {
        Some(t) => t
            .as_u64()
            .map(|u| u as usize)
            .ok_or(SpanError::Json("target must be a number".into()))?,
        None => tuple.iter().copied().max().unwrap_or(0),
    };
    FreeAlgebraElement::new(op, theta, tuple, target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn as_op() -> Operad {
        Operad::builtin("as", 8).unwrap()
    }

    fn com_op() -> Operad {
        Operad::builtin("com", 8).unwrap()
    }

    fn dec(
        op: &Operad,
        flavor: Flavor,
        target: usize,
        map: Vec<usize>,
        decs: &[(usize, &str)],
    ) -> DecoratedMap {
        let decorations =
            decs.iter().map(|&(a, l)| op.parse_elem(a, l).unwrap()).collect();
        DecoratedMap::new(flavor, op, map.len(), target, map, decorations).unwrap()
    }

    #[test]
    fn lift_against_identity_keeps_decorations() {
        let op = as_op();
        let right = dec(&op, Flavor::S, 2, vec![2, 1, 2], &[(1, "id_1"), (2, "(12)")]);
        let bottom = PlainMap::identity(Flavor::S, 2);
        let sq = lift_square(&op, Flavor::S, &bottom, &right).unwrap();
        assert_eq!(sq.apex(), 3);
        for c in 1..=2 {
            assert_eq!(sq.left.decoration(c), right.decoration(c));
        }
        sq.validate(&op).unwrap();
    }

    #[test]
    fn grid_lift_and_admissible_counts() {
        let com = com_op();
        let sq = presentation_square(&com, 1).unwrap();
        assert_eq!(sq.apex(), 4);
        assert_eq!(sq.left.map_vec(), &[1, 1, 2, 2]);
        assert_eq!(sq.top.map_vec(), &[1, 2, 1, 2]);
        assert_eq!(admissible_subsets(&sq).unwrap().len(), 7);
        assert_eq!(admissible_subsets(&presentation_square(&com, 2).unwrap()).unwrap().len(), 25);
        assert_eq!(admissible_subsets(&presentation_square(&com, 3).unwrap()).unwrap().len(), 79);
        // counts do not depend on decorations
        let asx = as_op();
        assert_eq!(admissible_subsets(&presentation_square(&asx, 1).unwrap()).unwrap().len(), 7);
    }

    #[test]
    fn omega_lift_transports_orders() {
        let op = as_op();
        let bottom = PlainMap::new(Flavor::Omega, 3, 2, vec![1, 2, 1]).unwrap();
        let right = dec(&op, Flavor::Omega, 2, vec![2, 1], &[(1, "id_1"), (1, "id_1")]);
        let sq = lift_square(&op, Flavor::Omega, &bottom, &right).unwrap();
        assert_eq!(sq.apex(), 3);
        sq.validate(&op).unwrap();
    }

    #[test]
    fn gamma_lift_needs_clean_zero_fiber() {
        let op = as_op();
        let bottom = PlainMap::new(Flavor::Gamma, 2, 1, vec![0, 1]).unwrap();
        let right = dec(&op, Flavor::Gamma, 1, vec![1], &[(1, "id_1")]);
        assert_eq!(
            lift_square(&op, Flavor::Gamma, &bottom, &right).unwrap_err(),
            SpanError::GammaLiftUndefined
        );
        let ok_bottom = PlainMap::new(Flavor::Gamma, 2, 1, vec![1, 1]).unwrap();
        lift_square(&op, Flavor::Gamma, &ok_bottom, &right).unwrap();
    }

    #[test]
    fn identity_spans_are_neutral() {
        let op = as_op();
        let v = dec(&op, Flavor::S, 2, vec![2, 1, 1], &[(2, "(12)"), (1, "id_1")]);
        let h = PlainMap::new(Flavor::S, 3, 2, vec![1, 2, 2]).unwrap();
        let s = SpanMorphism::new(&op, v, h).unwrap();
        let idl = SpanMorphism::identity(&op, 2).unwrap();
        assert_eq!(compose_spans(&op, &idl, &s).unwrap(), s);
        assert_eq!(compose_spans(&op, &s, &idl).unwrap(), s);
        assert!(idl.is_identity());
    }

    #[test]
    fn com_spans_match_set_pullbacks() {
        // Over the one-point operad a span is the multiset of its
        // (vertical, horizontal) value pairs; composition multiplies counts
        // through the middle object.
        let op = com_op();
        let pair_counts = |s: &SpanMorphism| {
            let mut counts = std::collections::BTreeMap::new();
            for x in 1..=s.apex() {
                *counts
                    .entry((s.vertical().apply(x), s.horizontal().apply(x)))
                    .or_insert(0usize) += 1;
            }
            counts
        };
        let v1 = dec(&op, Flavor::S, 2, vec![1, 1, 2], &[(2, "*"), (1, "*")]);
        let h1 = PlainMap::new(Flavor::S, 3, 2, vec![2, 1, 2]).unwrap();
        let s1 = SpanMorphism::new(&op, v1, h1).unwrap();
        let v2 = dec(&op, Flavor::S, 2, vec![1, 2, 2], &[(1, "*"), (2, "*")]);
        let h2 = PlainMap::new(Flavor::S, 3, 2, vec![1, 1, 2]).unwrap();
        let s2 = SpanMorphism::new(&op, v2, h2).unwrap();
        let c1 = pair_counts(&s1);
        let c2 = pair_counts(&s2);
        let composite = compose_spans(&op, &s2, &s1).unwrap();
        let got = pair_counts(&composite);
        let mut want = std::collections::BTreeMap::new();
        for a in 1..=2usize {
            for c in 1..=2usize {
                let mut total = 0;
                for b in 1..=2usize {
                    total += c1.get(&(a, b)).copied().unwrap_or(0)
                        * c2.get(&(b, c)).copied().unwrap_or(0);
                }
                if total > 0 {
                    want.insert((a, c), total);
                }
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn associativity_sample() {
        let op = as_op();
        let v1 = dec(&op, Flavor::S, 2, vec![2, 1], &[(1, "id_1"), (1, "id_1")]);
        let h1 = PlainMap::new(Flavor::S, 2, 2, vec![1, 1]).unwrap();
        let s1 = SpanMorphism::new(&op, v1, h1).unwrap();
        let v2 = dec(&op, Flavor::S, 2, vec![1, 2, 2], &[(1, "id_1"), (2, "(12)")]);
        let h2 = PlainMap::new(Flavor::S, 3, 2, vec![2, 2, 1]).unwrap();
        let s2 = SpanMorphism::new(&op, v2, h2).unwrap();
        let v3 = dec(&op, Flavor::S, 2, vec![1, 1], &[(2, "id_2"), (0, "id_0")]);
        let h3 = PlainMap::new(Flavor::S, 2, 2, vec![2, 1]).unwrap();
        let s3 = SpanMorphism::new(&op, v3, h3).unwrap();
        let left = compose_spans(&op, &s3, &compose_spans(&op, &s2, &s1).unwrap()).unwrap();
        let right = compose_spans(&op, &compose_spans(&op, &s3, &s2).unwrap(), &s1).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn coproduct_restricts_to_summands() {
        let op = as_op();
        let v1 = dec(&op, Flavor::S, 1, vec![1, 1], &[(2, "(12)")]);
        let h1 = PlainMap::new(Flavor::S, 2, 2, vec![2, 1]).unwrap();
        let s1 = SpanMorphism::new(&op, v1, h1).unwrap();
        let v2 = dec(&op, Flavor::S, 1, vec![1], &[(1, "id_1")]);
        let h2 = PlainMap::new(Flavor::S, 1, 2, vec![2]).unwrap();
        let s2 = SpanMorphism::new(&op, v2, h2).unwrap();
        let both = coproduct_spans(&op, &s1, &s2).unwrap();
        let i1 = injection_span(&op, 1, 1, 1).unwrap();
        let i2 = injection_span(&op, 1, 1, 2).unwrap();
        assert_eq!(compose_spans(&op, &both, &i1).unwrap(), s1);
        assert_eq!(compose_spans(&op, &both, &i2).unwrap(), s2);
    }

    #[test]
    fn relabeled_spans_share_their_class() {
        let op = as_op();
        let v1 = dec(&op, Flavor::S, 1, vec![1, 1, 1], &[(3, "(123)")]);
        let h1 = PlainMap::new(Flavor::S, 3, 2, vec![2, 1, 1]).unwrap();
        let s1 = SpanMorphism::new(&op, v1.clone(), h1.clone()).unwrap();
        // relabel the apex by the 3-cycle and transport both legs
        let relabel = dec(&op, Flavor::S, 3, vec![2, 3, 1], &[
            (1, "id_1"),
            (1, "id_1"),
            (1, "id_1"),
        ]);
        let v2 = opcat::compose(&op, &v1, &relabel).unwrap();
        let h2_map: Vec<usize> =
            relabel.map_vec().iter().map(|&x| h1.apply(x)).collect();
        let h2 = PlainMap::new(Flavor::S, 3, 2, h2_map).unwrap();
        let s2 = SpanMorphism::new(&op, v2, h2).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(
            span_to_algebra_map(&op, &s1).unwrap(),
            span_to_algebra_map(&op, &s2).unwrap()
        );
    }

    #[test]
    fn zero_apex_is_the_zero_class() {
        let op = as_op();
        let v = DecoratedMap::new(Flavor::S, &op, 0, 1, vec![], vec![op.zero()]).unwrap();
        let h = PlainMap::new(Flavor::S, 0, 3, vec![]).unwrap();
        let s = SpanMorphism::new(&op, v, h).unwrap();
        let e = span_to_algebra_map(&op, &s).unwrap();
        assert_eq!(e, FreeAlgebraElement::zero(&op, 3));
        assert_eq!(algebra_map_to_span(&op, &e).unwrap(), s);
    }

    #[test]
    fn substitution_matches_word_concatenation() {
        let op = as_op();
        // outer word reads generator 2 then generator 1
        let outer =
            FreeAlgebraElement::new(&op, op.parse_elem(2, "(12)").unwrap(), vec![1, 2], 2)
                .unwrap();
        let word = |e: &FreeAlgebraElement| -> Vec<usize> {
            let omega = op.as_perm(e.theta()).unwrap();
            (0..e.arity()).map(|i| e.tuple()[omega.apply(i)]).collect()
        };
        assert_eq!(word(&outer), vec![2, 1]);
        let g1 = FreeAlgebraElement::new(&op, op.parse_elem(2, "id_2").unwrap(), vec![1, 2], 2)
            .unwrap();
        let g2 = FreeAlgebraElement::new(&op, op.parse_elem(1, "id_1").unwrap(), vec![2], 2)
            .unwrap();
        let composite =
            compose_algebra_maps(&op, &outer, &[g1.clone(), g2.clone()]).unwrap();
        let expected: Vec<usize> =
            word(&g2).into_iter().chain(word(&g1)).collect();
        assert_eq!(word(&composite), expected);
        // transport through spans agrees
        let via_spans = compose_spans(
            &op,
            &tuple_to_span(&op, &[g1, g2]).unwrap(),
            &algebra_map_to_span(&op, &outer).unwrap(),
        )
        .unwrap();
        assert_eq!(span_to_algebra_map(&op, &via_spans).unwrap(), composite);
    }

    #[test]
    fn commutative_substitution_merges_multisets() {
        let op = com_op();
        let outer =
            FreeAlgebraElement::new(&op, op.parse_elem(2, "*").unwrap(), vec![1, 1], 1).unwrap();
        let inner =
            FreeAlgebraElement::new(&op, op.parse_elem(2, "*").unwrap(), vec![1, 2], 2).unwrap();
        let composite = compose_algebra_maps(&op, &outer, &[inner]).unwrap();
        let mut got = composite.tuple().to_vec();
        got.sort();
        assert_eq!(got, vec![1, 1, 2, 2]);
        assert_eq!(composite.arity(), 4);
    }

    #[test]
    fn free_hom_counts() {
        let com = com_op();
        assert_eq!(enumerate_free_hom(&com, 1, 1, 3, 1_000).unwrap().len(), 4);
        let asx = as_op();
        assert_eq!(enumerate_free_hom(&asx, 1, 2, 2, 1_000).unwrap().len(), 7);
        let initial = Operad::builtin("initial", 8).unwrap();
        assert_eq!(enumerate_free_hom(&initial, 1, 5, 5, 1_000).unwrap().len(), 6);
    }

    #[test]
    fn spans_biject_with_element_tuples() {
        let op = as_op();
        let spans = enumerate_spans(&op, 2, 2, 2, 100_000).unwrap();
        let tuples: BTreeSet<Vec<FreeAlgebraElement>> = enumerate_free_hom(&op, 2, 2, 2, 100_000)
            .unwrap()
            .into_iter()
            .filter(|t| t.iter().map(|e| e.arity()).sum::<usize>() <= 2)
            .collect();
        assert_eq!(spans.len(), tuples.len());
        let images: BTreeSet<Vec<FreeAlgebraElement>> =
            spans.iter().map(|s| span_to_tuple(&op, s).unwrap()).collect();
        assert_eq!(images, tuples);
        for s in &spans {
            let back = tuple_to_span(&op, &span_to_tuple(&op, s).unwrap()).unwrap();
            assert_eq!(&back, s);
        }
    }

    #[test]
    fn double_iso_squares_validate() {
        let op = as_op();
        let f = Perm::from_images(vec![2, 0, 1]).unwrap();
        for flavor in [Flavor::S, Flavor::Omega, Flavor::Gamma] {
            double_iso_square(&op, flavor, &f).unwrap();
        }
    }

    #[test]
    fn span_json_roundtrip() {
        let op = as_op();
        let v = dec(&op, Flavor::S, 2, vec![2, 1, 1], &[(2, "(12)"), (1, "id_1")]);
        let h = PlainMap::new(Flavor::S, 3, 3, vec![3, 1, 2]).unwrap();
        let s = SpanMorphism::new(&op, v, h).unwrap();
        let j = span_to_json(&op, &s);
        assert_eq!(span_from_json(&op, &j).unwrap(), s);
        let e = FreeAlgebraElement::new(&op, op.parse_elem(2, "(12)").unwrap(), vec![2, 1], 2)
            .unwrap();
        let ej = algebra_elem_to_json(&op, &e);
        assert_eq!(algebra_elem_from_json(&op, &ej).unwrap(), e);
    }
}
