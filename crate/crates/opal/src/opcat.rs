//! Categories of finite-set maps decorated by operad elements.
//!
//! A decorated map `m -> n` carries, over every nonzero target point, an
//! operad element whose arity is the fiber size. Three flavors share one
//! representation:
//!
//! * `S`: plain maps between `{1..m}` and `{1..n}`;
//! * `Gamma`: pointed maps `[m] -> [n]` (both sides get a basepoint `0`;
//!   stored sizes count nonzero points only, and nothing is stored over `0`);
//! * `Omega`: surjections between `{1..m}` and `{1..n}`.
//!
//! Composition follows the ordered-union rule: the decoration over `y` is
//! `gamma(outer_y; inner over the outer fiber in increasing order)` acted on by
//! the block permutation comparing the natural order of the composite fiber
//! with the concatenated order of the inner fibers.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::operad::{Operad, OperadError, OpElem};
use crate::perm::Perm;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OpcatError {
    #[error(transparent)]
    Operad(#[from] OperadError),
    #[error("map value {value} out of range for flavor {flavor:?} with target {target}")]
    ValueOutOfRange { value: usize, target: usize, flavor: Flavor },
    #[error("map is not surjective: target {0} has empty fiber")]
    NotSurjective(usize),
    #[error("decoration over target {target} has arity {got}, fiber size is {want}")]
    DecorationArity { target: usize, got: usize, want: usize },
    #[error("expected {expected:?} flavor, found {found:?}")]
    FlavorMismatch { expected: Flavor, found: Flavor },
    #[error("cannot compose: outer source {outer_source} != inner target {inner_target}")]
    NotComposable { outer_source: usize, inner_target: usize },
    #[error("enumeration would produce {bound} morphisms, over the budget {budget}")]
    BudgetExceeded { bound: u128, budget: u128 },
    #[error("subset contains {0}, outside the nonzero source")]
    BadSubset(usize),
    #[error("target point {0} has a nonempty fiber and cannot be dropped")]
    NonEmptyFiberDropped(usize),
    #[error("operation not defined for the pointed flavor")]
    PointedUnsupported,
    #[error("morphism json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    S,
    Gamma,
    Omega,
}

/// A decorated map. `map[i]` is the image of the nonzero source point `i+1`;
/// the value `0` (basepoint) is legal only in the `Gamma` flavor.
/// `decorations[y-1]` sits over the nonzero target point `y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecoratedMap {
    pub flavor: Flavor,
    pub source: usize,
    pub target: usize,
    map: Vec<usize>,
    decorations: Vec<OpElem>,
}

impl DecoratedMap {
    pub fn new(
        flavor: Flavor,
        op: &Operad,
        source: usize,
        target: usize,
        map: Vec<usize>,
        decorations: Vec<OpElem>,
    ) -> Result<Self, OpcatError> {
        assert_eq!(map.len(), source, "map length must equal source size");
        assert_eq!(decorations.len(), target, "one decoration per nonzero target point");
        for &v in &map {
            let ok = match flavor {
                Flavor::Gamma => v <= target,
                Flavor::S | Flavor::Omega => v >= 1 && v <= target,
            };
            if !ok {
                return Err(OpcatError::ValueOutOfRange { value: v, target, flavor });
            }
        }
        let dm = DecoratedMap { flavor, source, target, map, decorations };
        for y in 1..=target {
            let fiber = dm.fiber(y);
            if flavor == Flavor::Omega && fiber.is_empty() {
                return Err(OpcatError::NotSurjective(y));
            }
            let dec = dm.decorations[y - 1];
            if dec.arity != fiber.len() {
                return Err(OpcatError::DecorationArity {
                    target: y,
                    got: dec.arity,
                    want: fiber.len(),
                });
            }
            op.check_elem(dec)?;
        }
        Ok(dm)
    }

    pub fn identity(flavor: Flavor, op: &Operad, n: usize) -> Result<Self, OpcatError> {
        DecoratedMap::new(flavor, op, n, n, (1..=n).collect(), vec![op.unit(); n])
    }

    pub fn apply(&self, x: usize) -> usize {
        assert!(x >= 1 && x <= self.source, "source point out of range");
        self.map[x - 1]
    }

    pub fn map_vec(&self) -> &[usize] {
        &self.map
    }

    pub fn decoration(&self, y: usize) -> OpElem {
        assert!(y >= 1 && y <= self.target);
        self.decorations[y - 1]
    }

    pub fn decorations(&self) -> &[OpElem] {
        &self.decorations
    }

    /// Nonzero source points mapping to `y`, in increasing order.
    pub fn fiber(&self, y: usize) -> Vec<usize> {
        (1..=self.source).filter(|&x| self.map[x - 1] == y).collect()
    }

    /// Nonzero source points mapping to the basepoint.
    pub fn zero_fiber(&self) -> Vec<usize> {
        (1..=self.source).filter(|&x| self.map[x - 1] == 0).collect()
    }

    pub fn is_surjective_on_nonzero(&self) -> bool {
        (1..=self.target).all(|y| !self.fiber(y).is_empty())
    }

    pub fn is_bijection(&self) -> bool {
        self.source == self.target
            && self.zero_fiber().is_empty()
            && self.is_surjective_on_nonzero()
    }

    /// Stable identity for use as a table key: flavor, sizes, map values and
    /// decoration indices.
    pub fn key(&self) -> String {
        let decs: Vec<String> =
            self.decorations.iter().map(|d| format!("{}:{}", d.arity, d.index)).collect();
        format!(
            "{:?}|{}->{}|{:?}|{}",
            self.flavor,
            self.source,
            self.target,
            self.map,
            decs.join(",")
        )
    }

    /// Reinterprets a surjective decorated map as a plain `S`-flavor map.
    pub fn omega_to_s(&self) -> Result<DecoratedMap, OpcatError> {
        if self.flavor != Flavor::Omega {
            return Err(OpcatError::FlavorMismatch { expected: Flavor::Omega, found: self.flavor });
        }
        let mut out = self.clone();
        out.flavor = Flavor::S;
        Ok(out)
    }

    /// Adds a basepoint: `S`- or `Omega`-flavor maps become pointed maps that
    /// send nothing to the basepoint.
    pub fn add_basepoint(&self) -> Result<DecoratedMap, OpcatError> {
        if self.flavor == Flavor::Gamma {
            return Err(OpcatError::FlavorMismatch { expected: Flavor::S, found: self.flavor });
        }
        let mut out = self.clone();
        out.flavor = Flavor::Gamma;
        Ok(out)
    }

    /// For the `as` backend: the order sequence over `y` encoded by the
    /// decoration, listing fiber elements in decorated order.
    pub fn as_order_sequence(&self, op: &Operad, y: usize) -> Option<Vec<usize>> {
        let fiber = self.fiber(y);
        let omega = op.as_perm(self.decoration(y))?;
        Some((0..fiber.len()).map(|k| fiber[omega.apply(k)]).collect())
    }
}

/* # composition */

/// The block permutation comparing coordinates over target `y`: position `k`
/// of the naturally ordered composite fiber is position `sigma(k)` of the
/// concatenation of inner fibers taken along the outer fiber in increasing
/// order.
pub fn composition_block_perm(outer: &DecoratedMap, inner: &DecoratedMap, y: usize) -> Perm {
    let a: Vec<usize> = (1..=inner.source)
        .filter(|&x| {
            let mid = inner.apply(x);
            mid != 0 && outer.apply(mid) == y
        })
        .collect();
    let mut b = Vec::with_capacity(a.len());
    for j in outer.fiber(y) {
        b.extend(inner.fiber(j));
    }
    let img: Vec<usize> = a
        .iter()
        .map(|x| b.iter().position(|v| v == x).expect("fibers agree"))
        .collect();
    Perm::from_images(img).expect("fiber comparison is a bijection")
}

/// `outer ∘ inner` in the decorated category.
pub fn compose(
    op: &Operad,
    outer: &DecoratedMap,
    inner: &DecoratedMap,
) -> Result<DecoratedMap, OpcatError> {
    if outer.flavor != inner.flavor {
        return Err(OpcatError::FlavorMismatch { expected: inner.flavor, found: outer.flavor });
    }
    if outer.source != inner.target {
        return Err(OpcatError::NotComposable {
            outer_source: outer.source,
            inner_target: inner.target,
        });
    }
    let map: Vec<usize> = (1..=inner.source)
        .map(|x| {
            let mid = inner.apply(x);
            if mid == 0 { 0 } else { outer.apply(mid) }
        })
        .collect();
    let mut decorations = Vec::with_capacity(outer.target);
    for y in 1..=outer.target {
        let outer_fiber = outer.fiber(y);
        let args: Vec<OpElem> = outer_fiber.iter().map(|&j| inner.decoration(j)).collect();
        let substituted = op.gamma(outer.decoration(y), &args)?;
        let sigma = composition_block_perm(outer, inner, y);
        decorations.push(op.act(substituted, &sigma)?);
    }
    DecoratedMap::new(outer.flavor, op, inner.source, outer.target, map, decorations)
}

/* # enumeration */

/// Counts the morphisms `m -> n` of the given flavor without materializing
/// them.
pub fn count_hom(
    flavor: Flavor,
    op: &Operad,
    m: usize,
    n: usize,
) -> Result<u128, OperadError> {
    let mut total: u128 = 0;
    let mut sizes = vec![0u128; m + 1];
    for (k, s) in sizes.iter_mut().enumerate() {
        if k <= op.max_arity() {
            *s = op.size(k)? as u128;
        }
    }
    for map in set_maps(flavor, m, n) {
        let mut prod: u128 = 1;
        for y in 1..=n {
            let fiber = map.iter().filter(|&&v| v == y).count();
            prod = prod.saturating_mul(if fiber <= op.max_arity() { sizes[fiber] } else { 0 });
        }
        total = total.saturating_add(prod);
    }
    Ok(total)
}

/// All morphisms `m -> n`, in lexicographic order of the map vector and then
/// the decoration indices. Errors with the exact cardinality bound when it
/// exceeds the budget.
pub fn enumerate_hom(
    flavor: Flavor,
    op: &Operad,
    m: usize,
    n: usize,
    budget: u128,
) -> Result<Vec<DecoratedMap>, OpcatError> {
    let bound = count_hom(flavor, op, m, n)?;
    if bound > budget {
        return Err(OpcatError::BudgetExceeded { bound, budget });
    }
    let mut out = Vec::new();
    for map in set_maps(flavor, m, n) {
        let fibers: Vec<usize> =
            (1..=n).map(|y| map.iter().filter(|&&v| v == y).count()).collect();
        if fibers.iter().any(|&f| f > op.max_arity()) {
            continue;
        }
        let mut components: Vec<Vec<OpElem>> = Vec::with_capacity(n);
        let mut empty = false;
        for &f in &fibers {
            let elems = op.elements(f)?;
            if elems.is_empty() {
                empty = true;
                break;
            }
            components.push(elems);
        }
        if empty {
            continue;
        }
        let mut idx = vec![0usize; n];
        loop {
            let decorations: Vec<OpElem> =
                idx.iter().enumerate().map(|(y, &i)| components[y][i]).collect();
            out.push(DecoratedMap::new(flavor, op, m, n, map.clone(), decorations)?);
            // odometer
            let mut pos = n;
            loop {
                if pos == 0 {
                    break;
                }
                idx[pos - 1] += 1;
                if idx[pos - 1] < components[pos - 1].len() {
                    break;
                }
                idx[pos - 1] = 0;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
        }
    }
    Ok(out)
}

fn set_maps(flavor: Flavor, m: usize, n: usize) -> Vec<Vec<usize>> {
    let lo = match flavor {
        Flavor::Gamma => 0usize,
        Flavor::S | Flavor::Omega => 1usize,
    };
    if n == 0 && lo == 1 && m > 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![lo; m];
    loop {
        let keep = match flavor {
            Flavor::Omega => (1..=n).all(|y| cur.contains(&y)),
            _ => true,
        };
        if keep {
            out.push(cur.clone());
        }
        let mut pos = m;
        loop {
            if pos == 0 {
                return out;
            }
            cur[pos - 1] += 1;
            if cur[pos - 1] <= n {
                break;
            }
            cur[pos - 1] = lo;
            pos -= 1;
        }
    }
}

/* # restriction */

/// Restricts along a subset of the nonzero source: composes with the decorated
/// inclusion of `subset` (units on included points, constants elsewhere) and
/// renumbers the subset order-preservingly. The target is unchanged.
pub fn restrict_to_subset(
    op: &Operad,
    m: &DecoratedMap,
    subset: &BTreeSet<usize>,
) -> Result<DecoratedMap, OpcatError> {
    for &x in subset {
        if x < 1 || x > m.source {
            return Err(OpcatError::BadSubset(x));
        }
    }
    let points: Vec<usize> = subset.iter().copied().collect();
    let map: Vec<usize> = points.iter().map(|&x| m.apply(x)).collect();
    let mut decorations = Vec::with_capacity(m.target);
    for y in 1..=m.target {
        let fiber = m.fiber(y);
        let slots: Vec<OpElem> = fiber
            .iter()
            .map(|x| if subset.contains(x) { op.unit() } else { op.zero() })
            .collect();
        decorations.push(op.gamma(m.decoration(y), &slots)?);
    }
    let flavor = if m.flavor == Flavor::Omega { Flavor::S } else { m.flavor };
    DecoratedMap::new(flavor, op, points.len(), m.target, map, decorations)
}

/// Drops target points outside `kept`, which must have empty fibers, and
/// renumbers the kept targets order-preservingly.
pub fn restrict_target(
    op: &Operad,
    m: &DecoratedMap,
    kept: &BTreeSet<usize>,
) -> Result<DecoratedMap, OpcatError> {
    for &y in kept {
        if y < 1 || y > m.target {
            return Err(OpcatError::BadSubset(y));
        }
    }
    for y in 1..=m.target {
        if !kept.contains(&y) && !m.fiber(y).is_empty() {
            return Err(OpcatError::NonEmptyFiberDropped(y));
        }
    }
    let order: Vec<usize> = kept.iter().copied().collect();
    let renumber = |y: usize| -> usize {
        if y == 0 { 0 } else { order.iter().position(|&v| v == y).map_or(0, |p| p + 1) }
    };
    let map: Vec<usize> = m.map.iter().map(|&v| renumber(v)).collect();
    let decorations: Vec<OpElem> = order.iter().map(|&y| m.decoration(y)).collect();
    DecoratedMap::new(m.flavor, op, m.source, order.len(), map, decorations)
}

/// Splits a plain or surjective decorated map along a two-part partition of
/// its target, renumbering source and target parts order-preservingly.
pub fn restrict_to_union(
    op: &Operad,
    m: &DecoratedMap,
    t1: &BTreeSet<usize>,
) -> Result<(DecoratedMap, DecoratedMap), OpcatError> {
    if m.flavor == Flavor::Gamma {
        return Err(OpcatError::PointedUnsupported);
    }
    for &y in t1 {
        if y < 1 || y > m.target {
            return Err(OpcatError::BadSubset(y));
        }
    }
    let t2: BTreeSet<usize> = (1..=m.target).filter(|y| !t1.contains(y)).collect();
    let mut halves = Vec::new();
    for part in [t1, &t2] {
        let sources: BTreeSet<usize> =
            (1..=m.source).filter(|&x| part.contains(&m.apply(x))).collect();
        let restricted = restrict_to_subset(op, m, &sources)?;
        halves.push(restrict_target(op, &restricted, part)?);
    }
    let second = halves.pop().expect("two halves");
    let first = halves.pop().expect("two halves");
    Ok((first, second))
}

/// The wedge of two decorated maps: sources and targets are concatenated with
/// the second block shifted.
pub fn wedge(
    op: &Operad,
    a: &DecoratedMap,
    b: &DecoratedMap,
) -> Result<DecoratedMap, OpcatError> {
    if a.flavor != b.flavor {
        return Err(OpcatError::FlavorMismatch { expected: a.flavor, found: b.flavor });
    }
    let map: Vec<usize> = a
        .map
        .iter()
        .copied()
        .chain(b.map.iter().map(|&v| if v == 0 { 0 } else { v + a.target }))
        .collect();
    let decorations: Vec<OpElem> =
        a.decorations.iter().chain(b.decorations.iter()).copied().collect();
    DecoratedMap::new(a.flavor, op, a.source + b.source, a.target + b.target, map, decorations)
}

/* # json */

pub fn to_json(op: &Operad, m: &DecoratedMap) -> serde_json::Value {
    let flavor = match m.flavor {
        Flavor::S => "s",
        Flavor::Gamma => "gamma",
        Flavor::Omega => "omega",
    };
    let map: Vec<usize> = match m.flavor {
        Flavor::Gamma => std::iter::once(0).chain(m.map.iter().copied()).collect(),
        _ => m.map.clone(),
    };
    let decoration: serde_json::Map<String, serde_json::Value> = (1..=m.target)
        .map(|y| (y.to_string(), serde_json::Value::String(op.label(m.decoration(y)))))
        .collect();
    json!({
        "flavor": flavor,
        "operad": op.name(),
        "map": map,
        "decoration": decoration,
    })
}

pub fn from_json(op: &Operad, v: &serde_json::Value) -> Result<DecoratedMap, OpcatError> {
    let err = |msg: &str| OpcatError::Json(msg.to_string());
    let flavor = match v.get("flavor").and_then(|f| f.as_str()) {
        Some("s") => Flavor::S,
        Some("gamma") => Flavor::Gamma,
        Some("omega") => Flavor::Omega,
        _ => return Err(err("flavor must be s, gamma or omega")),
    };
    let raw_map: Vec<usize> = v
        .get("map")
        .and_then(|m| m.as_array())
        .ok_or_else(|| err("map must be an array"))?
        .iter()
        .map(|x| x.as_u64().map(|u| u as usize).ok_or_else(|| err("map entries must be numbers")))
        .collect::<Result<_, _>>()?;
    let map = match flavor {
        Flavor::Gamma => {
            if raw_map.first() != Some(&0) {
                return Err(err("pointed maps list index 0 first and it must map to 0"));
            }
            raw_map[1..].to_vec()
        }
        _ => raw_map,
    };
    let dec_obj = v
        .get("decoration")
        .and_then(|d| d.as_object())
        .ok_or_else(|| err("decoration must be an object"))?;
    let target = dec_obj.len();
    let mut decorations = Vec::with_capacity(target);
    let source = map.len();
    let probe = DecoratedMap {
        flavor,
        source,
        target,
        map: map.clone(),
        decorations: Vec::new(),
    };
    for y in 1..=target {
        let label = dec_obj
            .get(&y.to_string())
            .and_then(|l| l.as_str())
            .ok_or_else(|| err("decoration keys must be 1..=target with string labels"))?;
        let fiber = probe.fiber(y).len();
        decorations.push(op.parse_elem(fiber, label)?);
    }
    DecoratedMap::new(flavor, op, source, target, map, decorations)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn as_op() -> Operad {
        Operad::builtin("as", 6).unwrap()
    }

    fn dm(
        op: &Operad,
        flavor: Flavor,
        target: usize,
        map: Vec<usize>,
        decs: &[(usize, &str)],
    ) -> DecoratedMap {
        let decorations: Vec<OpElem> =
            decs.iter().map(|&(arity, label)| op.parse_elem(arity, label).unwrap()).collect();
        DecoratedMap::new(flavor, op, map.len(), target, map, decorations).unwrap()
    }

    #[test]
    fn worked_composition() {
        let op = as_op();
        let outer = dm(&op, Flavor::S, 2, vec![2, 1, 2], &[(1, "id_1"), (2, "(12)")]);
        let inner = dm(
            &op,
            Flavor::S,
            3,
            vec![1, 2, 3, 3, 1, 3],
            &[(2, "id_2"), (1, "id_1"), (3, "id_3")],
        );
        let sigma = composition_block_perm(&outer, &inner, 2);
        assert_eq!(sigma.word(), vec![1, 3, 4, 2, 5]);
        let composite = compose(&op, &outer, &inner).unwrap();
        assert_eq!(composite.map_vec(), &[2, 1, 2, 2, 2, 2]);
        assert_eq!(op.label(composite.decoration(1)), "id_1");
        let w = op.as_perm(composite.decoration(2)).unwrap().word();
        assert_eq!(w, vec![2, 3, 5, 1, 4]);
        // Order semantics: the decorated order over 2 lists 3,4,6,1,5.
        assert_eq!(composite.as_order_sequence(&op, 2).unwrap(), vec![3, 4, 6, 1, 5]);
    }

    #[test]
    fn composition_is_associative() {
        let op = as_op();
        let f = dm(&op, Flavor::S, 2, vec![2, 1, 1], &[(2, "(12)"), (1, "id_1")]);
        let g = dm(&op, Flavor::S, 3, vec![3, 1, 1, 2], &[(2, "id_2"), (1, "id_1"), (1, "id_1")]);
        let h = dm(&op, Flavor::S, 4, vec![2, 4, 1, 3, 2], &[
            (1, "id_1"),
            (2, "(12)"),
            (1, "id_1"),
            (1, "id_1"),
        ]);
        let left = compose(&op, &compose(&op, &f, &g).unwrap(), &h).unwrap();
        let right = compose(&op, &f, &compose(&op, &g, &h).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn gamma_flavor_roundtrips_json() {
        let op = as_op();
        let m = dm(&op, Flavor::Gamma, 2, vec![0, 2, 1, 2], &[(1, "id_1"), (2, "(12)")]);
        let v = to_json(&op, &m);
        assert_eq!(v["map"], serde_json::json!([0, 0, 2, 1, 2]));
        let back = from_json(&op, &v).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn restriction_induces_suborder() {
        // Ordering (2,1,3) on a 3-point fiber restricted to {1,3} gives (1,3).
        let op = as_op();
        let m = dm(&op, Flavor::S, 1, vec![1, 1, 1], &[(3, "(12)")]);
        assert_eq!(m.as_order_sequence(&op, 1).unwrap(), vec![2, 1, 3]);
        let subset: BTreeSet<usize> = [1, 3].into_iter().collect();
        let r = restrict_to_subset(&op, &m, &subset).unwrap();
        assert_eq!(r.as_order_sequence(&op, 1).unwrap(), vec![1, 2]);
        assert_eq!(op.label(r.decoration(1)), "id_2");
    }

    #[test]
    fn hom_counts() {
        let com = Operad::builtin("com", 6).unwrap();
        assert_eq!(count_hom(Flavor::Gamma, &com, 2, 2).unwrap(), 9);
        let asx = as_op();
        assert_eq!(count_hom(Flavor::Gamma, &asx, 2, 1).unwrap(), 5);
        let initial = Operad::builtin("initial", 6).unwrap();
        assert_eq!(count_hom(Flavor::Omega, &initial, 2, 2).unwrap(), 2);
        let homs = enumerate_hom(Flavor::Gamma, &asx, 2, 1, 10_000).unwrap();
        assert_eq!(homs.len(), 5);
    }

    #[test]
    fn budget_is_enforced() {
        let op = as_op();
        let err = enumerate_hom(Flavor::Gamma, &op, 2, 1, 3).unwrap_err();
        assert_eq!(err, OpcatError::BudgetExceeded { bound: 5, budget: 3 });
    }

    #[test]
    fn union_restriction_reassembles() {
        let op = as_op();
        let m = dm(&op, Flavor::S, 3, vec![2, 1, 3, 1, 2], &[
            (2, "(12)"),
            (2, "id_2"),
            (1, "id_1"),
        ]);
        let t1: BTreeSet<usize> = [1, 3].into_iter().collect();
        let (m1, m2) = restrict_to_union(&op, &m, &t1).unwrap();
        assert_eq!(m1.source, 3);
        assert_eq!(m1.target, 2);
        assert_eq!(m2.source, 2);
        assert_eq!(m2.target, 1);
        // Decorations survive on each part.
        assert_eq!(op.label(m1.decoration(1)), "(12)");
        assert_eq!(op.label(m2.decoration(1)), "id_2");
    }
}
