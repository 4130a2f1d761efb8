//! Morita equivalence between functors on the pointed decorated category and
//! functors on its surjection subcategory.
//!
//! The engine is a family of orthogonal idempotents in the linearized
//! endomorphism ring of each object, built by Moebius inversion over the
//! poset of pointed subsets. Splitting a functor along these idempotents
//! identifies its values with cross-effects; the two directions of the
//! equivalence are realised explicitly as `cr_functor` and `i_shriek` (with
//! contravariant partner `i_star`), and `roundtrip_omega` / `roundtrip_gamma`
//! certify the unit and counit pointwise with invertible integer matrices.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::functorlab::{
    cross_effect, natural_transformation_check, BaseCat, BaseKind, CrossEffectResult, FunctorError,
    Mor, TruncatedFunctor,
};
use crate::opcat::{self, DecoratedMap, Flavor, OpcatError};
use crate::operad::{Operad, OperadError, OperadMorphism};
use crate::zmod::{bi, image_subobject, FgAbGroup, ZHom, ZmodError};

#[derive(Debug, Error)]
pub enum DkError {
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Opcat(#[from] OpcatError),
    #[error(transparent)]
    Operad(#[from] OperadError),
    #[error(transparent)]
    Zmod(#[from] ZmodError),
    #[error("roundtrip component at object {object} is not invertible")]
    NotIso { object: usize },
    #[error("naturality fails: {0}")]
    Naturality(String),
    #[error("idempotent system failed: {0}")]
    Idem(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/* # the linearized hom ring */

/// A formal integer combination of decorated maps sharing endpoints.
#[derive(Debug, Clone, Default)]
pub struct FormalSum {
    terms: BTreeMap<String, (DecoratedMap, i64)>,
}

impl FormalSum {
    pub fn zero() -> FormalSum {
        FormalSum::default()
    }

    pub fn from_map(m: DecoratedMap, c: i64) -> FormalSum {
        let mut s = FormalSum::zero();
        s.add_term(m, c);
        s
    }

    pub fn add_term(&mut self, m: DecoratedMap, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry(m.key()).or_insert((m, 0));
        e.1 += c;
        if e.1 == 0 {
            let key = e.0.key();
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &FormalSum) -> FormalSum {
        let mut out = self.clone();
        for (m, c) in other.terms.values() {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn scale(&self, k: i64) -> FormalSum {
        let mut out = FormalSum::zero();
        for (m, c) in self.terms.values() {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn sub(&self, other: &FormalSum) -> FormalSum {
        self.add(&other.scale(-1))
    }

    /// Bilinear extension of composition; `self` acts after `other`.
    pub fn compose(&self, op: &Operad, other: &FormalSum) -> Result<FormalSum, DkError> {
        let mut out = FormalSum::zero();
        for (f, cf) in self.terms.values() {
            for (g, cg) in other.terms.values() {
                out.add_term(opcat::compose(op, f, g)?, cf * cg);
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eq(&self, other: &FormalSum) -> bool {
        self.sub(other).is_zero()
    }

    pub fn coeff(&self, key: &str) -> i64 {
        self.terms.get(key).map_or(0, |(_, c)| *c)
    }

    pub fn support(&self) -> impl Iterator<Item = (&DecoratedMap, i64)> {
        self.terms.values().map(|(m, c)| (m, *c))
    }

    /// Applies a functor linearly: the sum of `c * F(m)` over the terms.
    pub fn evaluate(
        &self,
        f: &TruncatedFunctor,
        src: usize,
        dst: usize,
    ) -> Result<ZHom, DkError> {
        let (hs, hd) = if f.contravariant() { (dst, src) } else { (src, dst) };
        let mut out = ZHom::zero(f.object(hs), f.object(hd));
        for (m, c) in self.terms.values() {
            out = out.add(&f.on(&Mor::Map(m.clone()))?.scale(&bi(*c)));
        }
        Ok(out)
    }
}

/* # pointed subsets and idempotents */

/// All subsets of `[n] = {0, ..., n}` containing the basepoint, as sorted
/// lists starting with 0, ordered by the bitmask of their nonzero part.
pub fn pointed_subsets(n: usize) -> Vec<Vec<usize>> {
    (0..1u32 << n)
        .map(|mask| {
            let mut s = vec![0];
            s.extend((0..n).filter(|i| mask & (1 << i) != 0).map(|i| i + 1));
            s
        })
        .collect()
}

fn subset_mask(n: usize, a: &[usize]) -> Result<u32, DkError> {
    if a.first() != Some(&0) {
        return Err(DkError::Shape("pointed subset must start with 0".into()));
    }
    let mut mask = 0u32;
    for w in a.windows(2) {
        if w[0] >= w[1] {
            return Err(DkError::Shape("pointed subset must be strictly sorted".into()));
        }
    }
    for &x in &a[1..] {
        if x < 1 || x > n {
            return Err(DkError::Shape(format!("subset element {x} outside 1..={n}")));
        }
        mask |= 1 << (x - 1);
    }
    Ok(mask)
}

/// The collapse endomorphism of `[n]`: identity on `a`, zero elsewhere, with
/// unit decorations over the kept points and empty-fiber constants elsewhere.
pub fn collapse_map(op: &Operad, n: usize, a: &[usize]) -> Result<DecoratedMap, DkError> {
    subset_mask(n, a)?;
    let member: BTreeSet<usize> = a.iter().copied().collect();
    let map = (1..=n).map(|x| if member.contains(&x) { x } else { 0 }).collect();
    let decorations = (1..=n)
        .map(|y| if member.contains(&y) { op.unit() } else { op.zero() })
        .collect();
    Ok(DecoratedMap::new(Flavor::Gamma, op, n, n, map, decorations)?)
}

/// The orthogonal idempotent system of the endomorphism ring of `[n]`: one
/// signed-sum element per pointed subset.
pub struct IdempotentSystem {
    pub n: usize,
    /// In `pointed_subsets` order.
    pub entries: Vec<(Vec<usize>, FormalSum)>,
}

impl IdempotentSystem {
    pub fn get(&self, a: &[usize]) -> Result<&FormalSum, DkError> {
        let mask = subset_mask(self.n, a)?;
        Ok(&self.entries[mask as usize].1)
    }

    pub fn top(&self) -> &FormalSum {
        &self.entries.last().expect("nonempty system").1
    }
}

/// Builds every `f_A` by signed summation over the pointed subsets of `A`.
pub fn idempotents(op: &Operad, n: usize) -> Result<IdempotentSystem, DkError> {
    let subsets = pointed_subsets(n);
    let mut entries = Vec::with_capacity(subsets.len());
    for (mask, a) in subsets.iter().enumerate() {
        let mask = mask as u32;
        let mut f = FormalSum::zero();
        // enumerate sub-masks of `mask`, empty nonzero part included
        let mut sub = mask;
        loop {
            let b = &subsets[sub as usize];
            let sign = if (a.len() - b.len()) % 2 == 0 { 1 } else { -1 };
            f.add_term(collapse_map(op, n, b)?, sign);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        entries.push((a.clone(), f));
    }
    Ok(IdempotentSystem { n, entries })
}

/// Checks orthogonality, idempotency, completeness, and the product formula
/// `f_A = e_A * prod_{B strictly below A} (1 - e_B)`.
pub fn verify_idempotents(op: &Operad, sys: &IdempotentSystem) -> Result<(), DkError> {
    let n = sys.n;
    let one = FormalSum::from_map(DecoratedMap::identity(Flavor::Gamma, op, n)?, 1);
    let mut total = FormalSum::zero();
    for (i, (_, fa)) in sys.entries.iter().enumerate() {
        total = total.add(fa);
        for (j, (_, fb)) in sys.entries.iter().enumerate() {
            let prod = fa.compose(op, fb)?;
            let expected = if i == j { fa.clone() } else { FormalSum::zero() };
            if !prod.eq(&expected) {
                return Err(DkError::Idem(format!("product of entries {i} and {j}")));
            }
        }
    }
    if !total.eq(&one) {
        return Err(DkError::Idem("idempotents do not sum to the identity".into()));
    }
    for (a, fa) in &sys.entries {
        let mask = subset_mask(n, a)?;
        let mut prod = FormalSum::from_map(collapse_map(op, n, a)?, 1);
        for (other_mask, (b, _)) in sys.entries.iter().enumerate() {
            let other_mask = other_mask as u32;
            if other_mask & mask == other_mask && other_mask != mask {
                let factor = one.sub(&FormalSum::from_map(collapse_map(op, n, b)?, 1));
                prod = prod.compose(op, &factor)?;
            }
        }
        if !prod.eq(fa) {
            return Err(DkError::Idem(format!("product formula fails at {a:?}")));
        }
    }
    Ok(())
}

/* # the kappa sandwich */

/// Extends a surjection-category morphism `alpha` between the nonzero parts
/// of two pointed subsets to a pointed map, zero off the source subset.
pub fn extend_by_zero(
    op: &Operad,
    n: usize,
    a: &[usize],
    m: usize,
    b: &[usize],
    alpha: &DecoratedMap,
) -> Result<DecoratedMap, DkError> {
    subset_mask(n, a)?;
    subset_mask(m, b)?;
    if alpha.flavor != Flavor::Omega {
        return Err(DkError::Shape("alpha must be a surjection-category morphism".into()));
    }
    if alpha.source != b.len() - 1 || alpha.target != a.len() - 1 {
        return Err(DkError::Shape("alpha endpoints do not match the subsets".into()));
    }
    let a_nz = &a[1..];
    let b_nz = &b[1..];
    let map = (1..=m)
        .map(|x| match b_nz.iter().position(|&v| v == x) {
            Some(p) => a_nz[alpha.apply(p + 1) - 1],
            None => 0,
        })
        .collect();
    let decorations = (1..=n)
        .map(|y| match a_nz.iter().position(|&v| v == y) {
            Some(q) => alpha.decoration(q + 1),
            None => op.zero(),
        })
        .collect();
    Ok(DecoratedMap::new(Flavor::Gamma, op, m, n, map, decorations)?)
}

/// The sandwich `f_A (alpha~, omega) f_B` inside the linearized hom set from
/// `[m]` to `[n]`.
pub fn kappa(
    op: &Operad,
    n: usize,
    a: &[usize],
    m: usize,
    b: &[usize],
    alpha: &DecoratedMap,
) -> Result<FormalSum, DkError> {
    let tilde = extend_by_zero(op, n, a, m, b, alpha)?;
    let fa = idempotents(op, n)?.get(a)?.clone();
    let fb = idempotents(op, m)?.get(b)?.clone();
    fa.compose(op, &FormalSum::from_map(tilde, 1))?.compose(op, &fb)
}

/// Both sides of the hom-counting identity: the pointed hom count against the
/// sum of surjection hom counts over all pointed subset pairs.
pub fn hom_count_identity(op: &Operad, m: usize, n: usize) -> Result<(u128, u128), DkError> {
    let lhs = opcat::count_hom(Flavor::Gamma, op, m, n)?;
    let mut rhs: u128 = 0;
    for a in 0..=n {
        for b in 0..=m {
            let pairs = binomial(n, a) * binomial(m, b);
            rhs += pairs * opcat::count_hom(Flavor::Omega, op, b, a)?;
        }
    }
    Ok((lhs, rhs))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

/// Restriction of a pointed map to a source subset that avoids zero,
/// renumbered as a surjection onto its image.
pub fn gamma_restriction_omega(
    op: &Operad,
    g: &DecoratedMap,
    mu: &[usize],
) -> Result<DecoratedMap, DkError> {
    if g.flavor != Flavor::Gamma {
        return Err(DkError::Shape("restriction expects a pointed map".into()));
    }
    let subset: BTreeSet<usize> = mu.iter().copied().collect();
    for &x in &subset {
        if g.apply(x) == 0 {
            return Err(DkError::Shape(format!("point {x} is sent to the basepoint")));
        }
    }
    let restricted = opcat::restrict_to_subset(op, g, &subset)?;
    let image: BTreeSet<usize> = subset.iter().map(|&x| g.apply(x)).collect();
    let squeezed = opcat::restrict_target(op, &restricted, &image)?;
    Ok(DecoratedMap::new(
        Flavor::Omega,
        op,
        squeezed.source,
        squeezed.target,
        squeezed.map_vec().to_vec(),
        squeezed.decorations().to_vec(),
    )?)
}

/// Checks that pointed morphisms biject with triples (source subset, image
/// subset, induced surjection) by explicit enumeration.
pub fn decomposition_bijection(op: &Operad, m: usize, n: usize) -> Result<(), DkError> {
    let homs = opcat::enumerate_hom(Flavor::Gamma, op, m, n, 10_000_000)?;
    let mut seen = BTreeSet::new();
    for t in &homs {
        let mu: Vec<usize> = (1..=m).filter(|&x| t.apply(x) != 0).collect();
        let b_mask: u32 = mu.iter().map(|&x| 1 << (x - 1)).sum();
        let image: BTreeSet<usize> = mu.iter().map(|&x| t.apply(x)).collect();
        let a_mask: u32 = image.iter().map(|&y| 1 << (y - 1)).sum();
        let alpha = gamma_restriction_omega(op, t, &mu)?;
        if !seen.insert((a_mask, b_mask, alpha.key())) {
            return Err(DkError::Shape("decomposition is not injective".into()));
        }
    }
    let (lhs, rhs) = hom_count_identity(op, m, n)?;
    if lhs != rhs || homs.len() as u128 != lhs {
        return Err(DkError::Shape("decomposition misses morphisms".into()));
    }
    Ok(())
}

/* # the equivalence, explicitly */

struct CrPiece {
    group: FgAbGroup,
    incl: ZHom,
    cross: Option<CrossEffectResult>,
}

impl CrPiece {
    fn express(&self, h: &ZHom) -> Result<ZHom, DkError> {
        match &self.cross {
            Some(c) => Ok(c.express(h)?),
            None => Ok(h.clone()),
        }
    }
}

fn cr_pieces(f: &TruncatedFunctor) -> Result<Vec<CrPiece>, DkError> {
    let mut out = Vec::with_capacity(f.cat().bound() + 1);
    for n in 0..=f.cat().bound() {
        if n == 0 {
            out.push(CrPiece {
                group: f.object(0).clone(),
                incl: ZHom::identity(f.object(0)),
                cross: None,
            });
        } else {
            let c = cross_effect(f, &vec![1; n])?;
            out.push(CrPiece { group: c.group.clone(), incl: c.inclusion.clone(), cross: Some(c) });
        }
    }
    Ok(out)
}

/// The cross-effect side of the equivalence: objectwise the top cross-effect
/// at a tuple of singletons, acting through pointed extensions of
/// surjections. Works for either variance.
pub fn cr_functor(f: &TruncatedFunctor) -> Result<TruncatedFunctor, DkError> {
    Ok(cr_functor_with_pieces(f)?.0)
}

pub fn cr_functor_with_pieces(
    f: &TruncatedFunctor,
) -> Result<(TruncatedFunctor, Vec<ZHom>), DkError> {
    if f.cat().kind() != BaseKind::Gamma {
        return Err(DkError::Shape("cross-effect functor needs a pointed base".into()));
    }
    let op = f.cat().op().clone();
    let ocat = BaseCat::new(
        op.clone(),
        BaseKind::Omega,
        f.cat().bound(),
        0,
        f.cat().hom_budget(),
    )?;
    let pieces = cr_pieces(f)?;
    // top idempotents per size; against the arrows they supply the projection
    // that a plain restriction misses
    let mut tops = Vec::with_capacity(ocat.bound() + 1);
    for n in 0..=ocat.bound() {
        tops.push(idempotents(&op, n)?.top().clone());
    }
    let mut morphisms = BTreeMap::new();
    for a in 0..=ocat.bound() {
        for b in 0..=ocat.bound() {
            for m in ocat.hom(a, b)? {
                let Mor::Map(d) = m else {
                    return Err(DkError::Shape("surjection base stores plain maps".into()));
                };
                let plus = d.add_basepoint()?;
                let induced = if f.contravariant() {
                    let sandwich =
                        FormalSum::from_map(plus, 1).compose(&op, &tops[a])?;
                    let big = sandwich.evaluate(f, a, b)?;
                    pieces[a].express(&big.compose(&pieces[b].incl))?
                } else {
                    let big = f.on(&Mor::Map(plus))?;
                    pieces[b].express(&big.compose(&pieces[a].incl))?
                };
                morphisms.insert(m.key(), induced);
            }
        }
    }
    let objects: Vec<FgAbGroup> = pieces.iter().map(|p| p.group.clone()).collect();
    let incls: Vec<ZHom> = pieces.iter().map(|p| p.incl.clone()).collect();
    let out = TruncatedFunctor::new(ocat, f.contravariant(), objects, morphisms)?;
    Ok((out, incls))
}

/// Injection and projection data of the subset-indexed sums, per object,
/// indexed by the bitmask of the subset.
pub struct SumParts {
    pub injections: Vec<ZHom>,
    pub projections: Vec<ZHom>,
}

fn subset_elems(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).map(|i| i as usize + 1).collect()
}

/// The sum-over-subsets side of the equivalence, covariant direction: value
/// at `[n]` is the sum of `G` at each subset size, a pointed map acts
/// blockwise through its restrictions and kills blocks touching zero.
pub fn i_shriek(g: &TruncatedFunctor) -> Result<TruncatedFunctor, DkError> {
    Ok(i_shriek_with_parts(g)?.0)
}

pub fn i_shriek_with_parts(
    g: &TruncatedFunctor,
) -> Result<(TruncatedFunctor, Vec<SumParts>), DkError> {
    if g.cat().kind() != BaseKind::Omega || g.contravariant() {
        return Err(DkError::Shape("this direction expects a covariant surjection functor".into()));
    }
    let (gcat, objects, parts) = subset_sum_shell(g)?;
    let mut morphisms = BTreeMap::new();
    for a in 0..=gcat.bound() {
        for b in 0..=gcat.bound() {
            for m in gcat.hom(a, b)? {
                let Mor::Map(d) = m else {
                    return Err(DkError::Shape("pointed base stores plain maps".into()));
                };
                let mut h = ZHom::zero(&objects[a], &objects[b]);
                for mask in 0..1u32 << a {
                    let mu = subset_elems(mask);
                    if mu.iter().any(|&x| d.apply(x) == 0) {
                        continue;
                    }
                    let nu_mask: u32 = mu.iter().map(|&x| 1 << (d.apply(x) - 1)).fold(0, |s, b| s | b);
                    let alpha = gamma_restriction_omega(g.cat().op(), d, &mu)?;
                    let gh = g.on(&Mor::Map(alpha))?;
                    h = h.add(
                        &parts[b].injections[nu_mask as usize]
                            .compose(gh)
                            .compose(&parts[a].projections[mask as usize]),
                    );
                }
                morphisms.insert(m.key(), h);
            }
        }
    }
    let out = TruncatedFunctor::new(gcat, false, objects, morphisms)?;
    Ok((out, parts))
}

/// Contravariant partner of `i_shriek`: blocks run against the map direction,
/// one factor per source subset mapping onto the block's subset.
pub fn i_star(g: &TruncatedFunctor) -> Result<TruncatedFunctor, DkError> {
    Ok(i_star_with_parts(g)?.0)
}

pub fn i_star_with_parts(
    g: &TruncatedFunctor,
) -> Result<(TruncatedFunctor, Vec<SumParts>), DkError> {
    if g.cat().kind() != BaseKind::Omega || !g.contravariant() {
        return Err(DkError::Shape(
            "this direction expects a contravariant surjection functor".into(),
        ));
    }
    let (gcat, objects, parts) = subset_sum_shell(g)?;
    let mut morphisms = BTreeMap::new();
    for a in 0..=gcat.bound() {
        for b in 0..=gcat.bound() {
            for m in gcat.hom(a, b)? {
                let Mor::Map(d) = m else {
                    return Err(DkError::Shape("pointed base stores plain maps".into()));
                };
                let mut h = ZHom::zero(&objects[b], &objects[a]);
                for nu_mask in 0..1u32 << a {
                    let nu = subset_elems(nu_mask);
                    if nu.iter().any(|&x| d.apply(x) == 0) {
                        continue;
                    }
                    let mu_mask: u32 =
                        nu.iter().map(|&x| 1 << (d.apply(x) - 1)).fold(0, |s, b| s | b);
                    let alpha = gamma_restriction_omega(g.cat().op(), d, &nu)?;
                    let gh = g.on(&Mor::Map(alpha))?;
                    h = h.add(
                        &parts[a].injections[nu_mask as usize]
                            .compose(gh)
                            .compose(&parts[b].projections[mu_mask as usize]),
                    );
                }
                morphisms.insert(m.key(), h);
            }
        }
    }
    let out = TruncatedFunctor::new(gcat, true, objects, morphisms)?;
    Ok((out, parts))
}

fn subset_sum_shell(
    g: &TruncatedFunctor,
) -> Result<(BaseCat, Vec<FgAbGroup>, Vec<SumParts>), DkError> {
    let gcat = BaseCat::new(
        g.cat().op().clone(),
        BaseKind::Gamma,
        g.cat().bound(),
        0,
        g.cat().hom_budget(),
    )?;
    let mut objects = Vec::with_capacity(gcat.bound() + 1);
    let mut parts = Vec::with_capacity(gcat.bound() + 1);
    for n in 0..=gcat.bound() {
        let groups: Vec<FgAbGroup> = (0..1u32 << n)
            .map(|mask| g.object(mask.count_ones() as usize).clone())
            .collect();
        let (total, injections, projections) = FgAbGroup::direct_sum(&groups);
        objects.push(total);
        parts.push(SumParts { injections, projections });
    }
    Ok((gcat, objects, parts))
}

/* # roundtrips */

/// Pointwise-invertible natural transformation, stored by its components.
pub struct NaturalIso {
    pub components: Vec<ZHom>,
}

/// Certifies `cr(sum-over-subsets(G)) = G`: each component is the projection
/// onto the full-subset block restricted to the cross-effect, checked to be
/// invertible and natural.
pub fn roundtrip_omega(g: &TruncatedFunctor) -> Result<NaturalIso, DkError> {
    if g.cat().kind() != BaseKind::Omega {
        return Err(DkError::Shape("roundtrip starts from a surjection functor".into()));
    }
    let (big, parts) = if g.contravariant() {
        i_star_with_parts(g)?
    } else {
        i_shriek_with_parts(g)?
    };
    let (h, incls) = cr_functor_with_pieces(&big)?;
    let mut components = Vec::with_capacity(g.cat().bound() + 1);
    for n in 0..=g.cat().bound() {
        let top = (1usize << n) - 1;
        let comp = parts[n].projections[top].compose(&incls[n]);
        if !comp.is_iso() {
            return Err(DkError::NotIso { object: n });
        }
        components.push(comp);
    }
    natural_transformation_check(&h, g, &components)
        .map_err(|e| DkError::Naturality(e.to_string()))?;
    Ok(NaturalIso { components })
}

/// Certifies `sum-over-subsets(cr(F)) = F`: the component at `[n]` assembles
/// each block through the wedge inclusion (or retraction, contravariantly).
pub fn roundtrip_gamma(f: &TruncatedFunctor) -> Result<NaturalIso, DkError> {
    if f.cat().kind() != BaseKind::Gamma {
        return Err(DkError::Shape("roundtrip starts from a pointed functor".into()));
    }
    let (crf, incls) = cr_functor_with_pieces(f)?;
    let (k, parts) = if f.contravariant() {
        i_star_with_parts(&crf)?
    } else {
        i_shriek_with_parts(&crf)?
    };
    let mut components = Vec::with_capacity(f.cat().bound() + 1);
    for n in 0..=f.cat().bound() {
        let sizes = vec![1usize; n];
        let mut comp = ZHom::zero(k.object(n), f.object(n));
        for mask in 0..1u32 << n {
            let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let size = subset.len();
            let structural = if f.contravariant() {
                f.cat().wedge_retraction(&sizes, &subset)?
            } else {
                f.cat().wedge_inclusion(&sizes, &subset)?
            };
            let to_full = f.on(&structural)?.compose(&incls[size]);
            comp = comp.add(&to_full.compose(&parts[n].projections[mask as usize]));
        }
        if !comp.is_iso() {
            return Err(DkError::NotIso { object: n });
        }
        components.push(comp);
    }
    natural_transformation_check(&k, f, &components)
        .map_err(|e| DkError::Naturality(e.to_string()))?;
    Ok(NaturalIso { components })
}

/* # cross-checks */

/// The image of the top idempotent inside `F([n])` coincides with the top
/// cross-effect subgroup.
pub fn top_image_matches_cross_effect(
    f: &TruncatedFunctor,
    n: usize,
) -> Result<bool, DkError> {
    if f.cat().kind() != BaseKind::Gamma || f.contravariant() {
        return Err(DkError::Shape("expected a covariant pointed functor".into()));
    }
    let sys = idempotents(f.cat().op(), n)?;
    let h = sys.top().evaluate(f, n, n)?;
    let im = image_subobject(&h);
    let cr = cross_effect(f, &vec![1; n])?;
    Ok(cr.express(&im.incl).is_ok() && im.express(&cr.inclusion).is_ok())
}

/// Pulls a functor back along an operad morphism into the decorations: the
/// new base must share kind and bound, and values are untouched.
pub fn precompose_operad(
    f: &TruncatedFunctor,
    src_cat: &BaseCat,
    phi: &OperadMorphism,
) -> Result<TruncatedFunctor, DkError> {
    if src_cat.kind() != f.cat().kind() || src_cat.bound() != f.cat().bound() {
        return Err(DkError::Shape("base categories disagree in kind or bound".into()));
    }
    let mut morphisms = BTreeMap::new();
    for a in 0..=src_cat.bound() {
        for b in 0..=src_cat.bound() {
            for m in src_cat.hom(a, b)? {
                let Mor::Map(d) = m else {
                    return Err(DkError::Shape("operad precomposition needs one-arrow bases".into()));
                };
                let decs = d
                    .decorations()
                    .iter()
                    .map(|&e| phi.apply(e))
                    .collect::<Result<Vec<_>, _>>()?;
                let transported = DecoratedMap::new(
                    d.flavor,
                    f.cat().op(),
                    d.source,
                    d.target,
                    d.map_vec().to_vec(),
                    decs,
                )?;
                morphisms.insert(m.key(), f.on(&Mor::Map(transported))?.clone());
            }
        }
    }
    let objects: Vec<FgAbGroup> =
        (0..=src_cat.bound()).map(|x| f.object(x).clone()).collect();
    Ok(TruncatedFunctor::new(src_cat.clone(), f.contravariant(), objects, morphisms)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functorlab::{direct_sum_functors, reduced_representable, transpose_functor};

    fn gamma_cat(op: &str, bound: usize) -> BaseCat {
        let op = Operad::builtin(op, 6).unwrap();
        BaseCat::new(op, BaseKind::Gamma, bound, 0, 10_000_000).unwrap()
    }

    fn omega_cat(op: &str, bound: usize) -> BaseCat {
        let op = Operad::builtin(op, 6).unwrap();
        BaseCat::new(op, BaseKind::Omega, bound, 0, 10_000_000).unwrap()
    }

    #[test]
    fn idempotent_system_verifies_for_small_sizes() {
        for name in ["initial", "com", "as"] {
            let op = Operad::builtin(name, 5).unwrap();
            for n in 0..=2 {
                let sys = idempotents(&op, n).unwrap();
                verify_idempotents(&op, &sys).unwrap();
            }
        }
    }

    #[test]
    fn top_idempotent_at_two_has_the_signed_terms() {
        let op = Operad::builtin("com", 4).unwrap();
        let sys = idempotents(&op, 2).unwrap();
        let top = sys.get(&[0, 1, 2]).unwrap();
        let id = DecoratedMap::identity(Flavor::Gamma, &op, 2).unwrap();
        assert_eq!(top.coeff(&id.key()), 1);
        assert_eq!(top.coeff(&collapse_map(&op, 2, &[0, 1]).unwrap().key()), -1);
        assert_eq!(top.coeff(&collapse_map(&op, 2, &[0, 2]).unwrap().key()), -1);
        assert_eq!(top.coeff(&collapse_map(&op, 2, &[0]).unwrap().key()), 1);
        assert_eq!(top.support().count(), 4);
    }

    #[test]
    fn kappa_lands_in_the_sandwich_and_respects_composition() {
        let op = Operad::builtin("as", 5).unwrap();
        let alpha = DecoratedMap::identity(Flavor::Omega, &op, 1).unwrap();
        let k_ab = kappa(&op, 2, &[0, 2], 1, &[0, 1], &alpha).unwrap();
        assert!(!k_ab.is_zero());
        // fold surjection from the full subset of [2] to the one of [1]
        let beta = DecoratedMap::new(
            Flavor::Omega,
            &op,
            2,
            1,
            vec![1, 1],
            vec![op.parse_elem(2, "id_2").unwrap()],
        )
        .unwrap();
        let k_bc = kappa(&op, 1, &[0, 1], 2, &[0, 1, 2], &beta).unwrap();
        let composite = opcat::compose(&op, &alpha, &beta).unwrap();
        let lhs = kappa(&op, 2, &[0, 2], 2, &[0, 1, 2], &composite).unwrap();
        let rhs = k_ab.compose(&op, &k_bc).unwrap();
        assert!(lhs.eq(&rhs));
    }

    #[test]
    fn hom_counts_decompose_over_subset_pairs() {
        for name in ["com", "as"] {
            let op = Operad::builtin(name, 6).unwrap();
            for (m, n) in [(1, 1), (2, 1), (2, 2)] {
                let (lhs, rhs) = hom_count_identity(&op, m, n).unwrap();
                assert_eq!(lhs, rhs, "{name} at ({m},{n})");
            }
            decomposition_bijection(&op, 2, 2).unwrap();
        }
    }

    #[test]
    fn cross_effect_functor_of_a_singleton_representable_is_concentrated() {
        let cat = gamma_cat("com", 2);
        let u = reduced_representable(&cat, 1).unwrap();
        let cr = cr_functor(&u).unwrap();
        assert!(cr.object(0).is_trivial());
        assert_eq!(cr.object(1).invariant_factors(), (1, vec![]));
        assert!(cr.object(2).is_trivial());
    }

    #[test]
    fn subset_sum_of_a_point_supported_functor_doubles() {
        let ocat = omega_cat("com", 2);
        let g = reduced_representable(&ocat, 1).unwrap();
        assert_eq!(g.object(1).invariant_factors(), (1, vec![]));
        assert!(g.object(2).is_trivial());
        let (big, parts) = i_shriek_with_parts(&g).unwrap();
        assert_eq!(big.object(2).invariant_factors(), (2, vec![]));
        // collapse to {0,1} keeps the singleton block {1} and kills {2}
        let e = collapse_map(big.cat().op(), 2, &[0, 1]).unwrap();
        let h = big.on(&Mor::Map(e)).unwrap();
        let keep = h.compose(&parts[2].injections[0b01]);
        let kill = h.compose(&parts[2].injections[0b10]);
        assert!(keep.eq(&parts[2].injections[0b01]));
        assert!(kill.is_zero());
    }

    #[test]
    fn roundtrips_certify_on_representables() {
        let ocat = omega_cat("com", 2);
        let g1 = reduced_representable(&ocat, 1).unwrap();
        let g2 = reduced_representable(&ocat, 2).unwrap();
        let g = direct_sum_functors(&g1, &g2).unwrap().functor;
        roundtrip_omega(&g).unwrap();
        let cat = gamma_cat("com", 2);
        let f = reduced_representable(&cat, 1).unwrap();
        roundtrip_gamma(&f).unwrap();
    }

    #[test]
    fn contravariant_roundtrip_through_the_transpose() {
        let ocat = omega_cat("as", 2);
        let g = transpose_functor(&reduced_representable(&ocat, 2).unwrap()).unwrap();
        roundtrip_omega(&g).unwrap();
        let cat = gamma_cat("as", 2);
        let f = transpose_functor(&reduced_representable(&cat, 1).unwrap()).unwrap();
        roundtrip_gamma(&f).unwrap();
    }

    #[test]
    fn corrupted_component_names_the_failing_square() {
        let ocat = omega_cat("com", 2);
        // the representable at 2 acts nontrivially along the fold surjection,
        // so scaling one component must break that square
        let g = reduced_representable(&ocat, 2).unwrap();
        let iso = roundtrip_omega(&g).unwrap();
        let mut comps = iso.components;
        comps[1] = comps[1].scale(&bi(2));
        let h = cr_functor(&i_shriek(&g).unwrap()).unwrap();
        let err = natural_transformation_check(&h, &g, &comps).unwrap_err();
        assert!(err.to_string().contains("naturality fails on"));
    }

    #[test]
    fn top_idempotent_image_is_the_cross_effect() {
        let cat = gamma_cat("as", 2);
        let f = reduced_representable(&cat, 1).unwrap();
        for n in 1..=2 {
            assert!(top_image_matches_cross_effect(&f, n).unwrap());
        }
    }

    #[test]
    fn equivalence_is_natural_in_the_operad() {
        let bound = 2;
        let com_o = omega_cat("com", bound);
        let as_o = omega_cat("as", bound);
        let as_op = as_o.op().clone();
        let phi = crate::operad::terminal_morphism(&as_op, Some(3)).unwrap();
        let g = reduced_representable(&com_o, 1).unwrap();
        let pulled = precompose_operad(&g, &as_o, &phi).unwrap();
        let lhs = i_shriek(&pulled).unwrap();
        let as_g = gamma_cat("as", bound);
        let rhs = precompose_operad(&i_shriek(&g).unwrap(), &as_g, &phi).unwrap();
        for a in 0..=bound {
            for b in 0..=bound {
                for m in as_g.hom(a, b).unwrap() {
                    assert!(lhs.on(m).unwrap().eq(rhs.on(m).unwrap()));
                }
            }
        }
    }
}
