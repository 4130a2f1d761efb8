//! Finite truncations of set-operads with symmetric-group actions.
//!
//! An operad here is unitary: the arity-0 component is a single constant.
//! Three built-in families are provided besides table-backed ones loaded from
//! JSON:
//!
//! * `initial`: only the constant and the unit;
//! * `com`: one element in every arity, trivial actions;
//! * `as`: the arity-`n` component is the symmetric group `S_n`, substitution
//!   splices permutation words, and the right action is
//!   `omega · sigma = sigma^{-1} ∘ omega`.
//!
//! Elements are opaque `(arity, index)` pairs; `as` indexes by Lehmer rank and
//! computes substitution on the fly, so large arities cost nothing to hold.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Deserialize;
use thiserror::Error;

use crate::perm::{block_permutation, factorial, Perm};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OperadError {
    #[error("unknown builtin operad {0:?} (expected initial, com or as)")]
    UnknownBuiltin(String),
    #[error("arity {n} exceeds the truncation bound {max}")]
    ArityOutOfRange { n: usize, max: usize },
    #[error("substitution needs arity {needed}, beyond the truncation bound {max}")]
    TruncationExceeded { needed: usize, max: usize },
    #[error("element index {index} out of range for arity {arity} (component size {size})")]
    BadElement { arity: usize, index: usize, size: usize },
    #[error("no element labelled {label:?} in arity {arity}")]
    UnknownLabel { arity: usize, label: String },
    #[error("substitution table has no entry for {outer} applied to [{inner}]")]
    MissingGammaEntry { outer: String, inner: String },
    #[error("action table for arity {arity} does not reach the permutation {perm}")]
    MissingActionEntry { arity: usize, perm: String },
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("operad description is invalid: {0}")]
    BadDescription(String),
    #[error("json error: {0}")]
    Json(String),
}

/// Opaque element handle: the component arity plus a dense index inside it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OpElem {
    pub arity: usize,
    pub index: usize,
}

#[derive(Debug, Clone)]
enum Backend {
    Initial,
    Com,
    As,
    Table(Box<TableData>),
}

#[derive(Debug, Clone)]
struct TableData {
    components: Vec<Vec<String>>,
    labels: HashMap<String, (usize, usize)>,
    unit_index: usize,
    gamma: HashMap<(OpElem, Vec<OpElem>), OpElem>,
    /// Per arity: Lehmer rank of a permutation -> image index per element.
    actions: Vec<HashMap<usize, Vec<usize>>>,
}

#[derive(Debug, Clone)]
pub struct Operad {
    name: String,
    max_arity: usize,
    backend: Backend,
}

#[derive(Deserialize)]
struct OperadJson {
    max_arity: usize,
    components: BTreeMap<String, Vec<String>>,
    unit: String,
    #[serde(default)]
    gamma: Vec<GammaJson>,
    #[serde(default)]
    actions: BTreeMap<String, BTreeMap<String, BTreeMap<String, String>>>,
}

#[derive(Deserialize)]
struct GammaJson {
    outer: String,
    inner: Vec<String>,
    result: String,
}

impl Operad {
    pub fn builtin(name: &str, max_arity: usize) -> Result<Operad, OperadError> {
        let backend = match name.to_ascii_lowercase().as_str() {
            "initial" | "i" => Backend::Initial,
            "com" | "commutative" => Backend::Com,
            "as" | "associative" => Backend::As,
            other => return Err(OperadError::UnknownBuiltin(other.to_string())),
        };
        let name = match backend {
            Backend::Initial => "initial",
            Backend::Com => "com",
            Backend::As => "as",
            Backend::Table(_) => unreachable!(),
        };
        Ok(Operad { name: name.to_string(), max_arity, backend })
    }

    pub fn from_json_str(text: &str) -> Result<Operad, OperadError> {
        let parsed: OperadJson =
            serde_json::from_str(text).map_err(|e| OperadError::Json(e.to_string()))?;
        Operad::from_parsed(parsed)
    }

    fn from_parsed(j: OperadJson) -> Result<Operad, OperadError> {
        let max = j.max_arity;
        let mut components = vec![Vec::new(); max + 1];
        for (k, labels) in &j.components {
            let n: usize = k
                .parse()
                .map_err(|_| OperadError::BadDescription(format!("bad component key {k:?}")))?;
            if n > max {
                return Err(OperadError::BadDescription(format!(
                    "component {n} beyond max_arity {max}"
                )));
            }
            components[n] = labels.clone();
        }
        if components[0].len() != 1 {
            return Err(OperadError::BadDescription(format!(
                "operads here are unitary: arity 0 must hold exactly one constant, found {}",
                components[0].len()
            )));
        }
        let mut labels = HashMap::new();
        for (n, comp) in components.iter().enumerate() {
            for (i, label) in comp.iter().enumerate() {
                if labels.insert(label.clone(), (n, i)).is_some() {
                    return Err(OperadError::BadDescription(format!(
                        "label {label:?} appears twice; labels must be globally unique"
                    )));
                }
            }
        }
        let &(unit_arity, unit_index) = labels
            .get(&j.unit)
            .ok_or_else(|| OperadError::BadDescription(format!("unknown unit {:?}", j.unit)))?;
        if unit_arity != 1 {
            return Err(OperadError::BadDescription(format!(
                "unit {:?} must live in arity 1, found arity {unit_arity}",
                j.unit
            )));
        }
        let lookup = |label: &String| -> Result<OpElem, OperadError> {
            labels
                .get(label)
                .map(|&(arity, index)| OpElem { arity, index })
                .ok_or_else(|| OperadError::BadDescription(format!("unknown label {label:?}")))
        };
        let mut gamma = HashMap::new();
        for entry in &j.gamma {
            let outer = lookup(&entry.outer)?;
            let inner: Vec<OpElem> =
                entry.inner.iter().map(&lookup).collect::<Result<_, _>>()?;
            if inner.len() != outer.arity {
                return Err(OperadError::BadDescription(format!(
                    "substitution entry for {:?} lists {} arguments, arity is {}",
                    entry.outer,
                    inner.len(),
                    outer.arity
                )));
            }
            let result = lookup(&entry.result)?;
            let total: usize = inner.iter().map(|e| e.arity).sum();
            if result.arity != total {
                return Err(OperadError::BadDescription(format!(
                    "substitution entry for {:?}: result arity {} should be {}",
                    entry.outer, result.arity, total
                )));
            }
            gamma.insert((outer, inner), result);
        }
        // Complete each arity's action table to the subgroup generated by the
        // listed permutations.
        let mut actions: Vec<HashMap<usize, Vec<usize>>> = vec![HashMap::new(); max + 1];
        for (n, table) in actions.iter_mut().enumerate() {
            table.insert(Perm::identity(n).lehmer_rank(), (0..components[n].len()).collect());
        }
        for (k, perms) in &j.actions {
            let n: usize = k
                .parse()
                .map_err(|_| OperadError::BadDescription(format!("bad action key {k:?}")))?;
            if n > max {
                return Err(OperadError::BadDescription(format!(
                    "action table for arity {n} beyond max_arity {max}"
                )));
            }
            let size = components[n].len();
            let mut provided: Vec<(Perm, Vec<usize>)> = Vec::new();
            for (perm_label, mapping) in perms {
                let perm = Perm::parse_cycle_label(n, perm_label).map_err(|e| {
                    OperadError::BadDescription(format!("bad permutation label: {e}"))
                })?;
                let mut images = vec![usize::MAX; size];
                for (from, to) in mapping {
                    let f = lookup(from)?;
                    let t = lookup(to)?;
                    if f.arity != n || t.arity != n {
                        return Err(OperadError::BadDescription(format!(
                            "action of {perm_label:?} on arity {n} mentions labels of other arities"
                        )));
                    }
                    images[f.index] = t.index;
                }
                if images.iter().any(|&v| v == usize::MAX) {
                    return Err(OperadError::BadDescription(format!(
                        "action of {perm_label:?} on arity {n} must map every element"
                    )));
                }
                provided.push((perm, images));
            }
            // Right action: x·(στ) = (x·σ)·τ, so the table for στ composes the
            // table for τ after the table for σ.
            let table = &mut actions[n];
            let mut queue: VecDeque<Perm> =
                table.keys().map(|&r| Perm::from_lehmer(n, r).unwrap()).collect();
            while let Some(sigma) = queue.pop_front() {
                let a_sigma = table[&sigma.lehmer_rank()].clone();
                for (tau, a_tau) in &provided {
                    let composite = sigma.compose(tau);
                    let rank = composite.lehmer_rank();
                    let image: Vec<usize> = a_sigma.iter().map(|&x| a_tau[x]).collect();
                    match table.get(&rank) {
                        Some(existing) => {
                            if existing != &image {
                                return Err(OperadError::BadDescription(format!(
                                    "action tables for arity {n} are inconsistent at {}",
                                    composite.cycle_label()
                                )));
                            }
                        }
                        None => {
                            table.insert(rank, image);
                            queue.push_back(composite);
                        }
                    }
                }
            }
        }
        Ok(Operad {
            name: "table".to_string(),
            max_arity: max,
            backend: Backend::Table(Box::new(TableData {
                components,
                labels,
                unit_index,
                gamma,
                actions,
            })),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn size(&self, n: usize) -> Result<usize, OperadError> {
        if n > self.max_arity {
            return Err(OperadError::ArityOutOfRange { n, max: self.max_arity });
        }
        Ok(match &self.backend {
            Backend::Initial => usize::from(n <= 1),
            Backend::Com => 1,
            Backend::As => factorial(n),
            Backend::Table(t) => t.components[n].len(),
        })
    }

    pub fn elements(&self, n: usize) -> Result<Vec<OpElem>, OperadError> {
        Ok((0..self.size(n)?).map(|index| OpElem { arity: n, index }).collect())
    }

    pub fn check_elem(&self, e: OpElem) -> Result<(), OperadError> {
        let size = self.size(e.arity)?;
        if e.index >= size {
            return Err(OperadError::BadElement { arity: e.arity, index: e.index, size });
        }
        Ok(())
    }

    /// The unit element in arity 1.
    pub fn unit(&self) -> OpElem {
        let index = match &self.backend {
            Backend::Table(t) => t.unit_index,
            _ => 0,
        };
        OpElem { arity: 1, index }
    }

    /// The unique constant in arity 0.
    pub fn zero(&self) -> OpElem {
        OpElem { arity: 0, index: 0 }
    }

    pub fn label(&self, e: OpElem) -> String {
        match &self.backend {
            Backend::Initial => (if e.arity == 0 { "z" } else { "e" }).to_string(),
            Backend::Com => "*".to_string(),
            Backend::As => Perm::from_lehmer(e.arity, e.index).expect("valid rank").cycle_label(),
            Backend::Table(t) => t.components[e.arity][e.index].clone(),
        }
    }

    pub fn parse_elem(&self, arity: usize, label: &str) -> Result<OpElem, OperadError> {
        if arity > self.max_arity {
            return Err(OperadError::ArityOutOfRange { n: arity, max: self.max_arity });
        }
        let unknown = || OperadError::UnknownLabel { arity, label: label.to_string() };
        let index = match &self.backend {
            Backend::Initial => match (arity, label) {
                (0, "z") | (1, "e") => 0,
                _ => return Err(unknown()),
            },
            Backend::Com => {
                if label == "*" {
                    0
                } else {
                    return Err(unknown());
                }
            }
            Backend::As => Perm::parse_cycle_label(arity, label)
                .map_err(|_| unknown())?
                .lehmer_rank(),
            Backend::Table(t) => match t.labels.get(label) {
                Some(&(a, i)) if a == arity => i,
                _ => return Err(unknown()),
            },
        };
        Ok(OpElem { arity, index })
    }

    /// For the `as` backend, the permutation behind an element.
    pub fn as_perm(&self, e: OpElem) -> Option<Perm> {
        match self.backend {
            Backend::As => Some(Perm::from_lehmer(e.arity, e.index).expect("valid rank")),
            _ => None,
        }
    }

    /// Operadic substitution `gamma(outer; inner_1, …, inner_n)`.
    pub fn gamma(&self, outer: OpElem, inner: &[OpElem]) -> Result<OpElem, OperadError> {
        self.check_elem(outer)?;
        for &e in inner {
            self.check_elem(e)?;
        }
        if inner.len() != outer.arity {
            return Err(OperadError::ArityMismatch(format!(
                "outer arity {} but {} arguments",
                outer.arity,
                inner.len()
            )));
        }
        let total: usize = inner.iter().map(|e| e.arity).sum();
        if total > self.max_arity {
            return Err(OperadError::TruncationExceeded { needed: total, max: self.max_arity });
        }
        match &self.backend {
            Backend::Initial => Ok(OpElem { arity: total, index: 0 }),
            Backend::Com => Ok(OpElem { arity: total, index: 0 }),
            Backend::As => {
                let theta = Perm::from_lehmer(outer.arity, outer.index).expect("valid rank");
                let args: Vec<Perm> = inner
                    .iter()
                    .map(|e| Perm::from_lehmer(e.arity, e.index).expect("valid rank"))
                    .collect();
                let mut offsets = vec![0usize; inner.len()];
                for j in 1..inner.len() {
                    offsets[j] = offsets[j - 1] + inner[j - 1].arity;
                }
                let mut img = Vec::with_capacity(total);
                for p in 0..outer.arity {
                    let j = theta.apply(p);
                    for t in 0..inner[j].arity {
                        img.push(offsets[j] + args[j].apply(t));
                    }
                }
                let word = Perm::from_images(img).expect("substitution yields a permutation");
                Ok(OpElem { arity: total, index: word.lehmer_rank() })
            }
            Backend::Table(t) => t
                .gamma
                .get(&(outer, inner.to_vec()))
                .copied()
                .ok_or_else(|| OperadError::MissingGammaEntry {
                    outer: self.label(outer),
                    inner: inner.iter().map(|&e| self.label(e)).collect::<Vec<_>>().join(", "),
                }),
        }
    }

    /// Right action `e · sigma`.
    pub fn act(&self, e: OpElem, sigma: &Perm) -> Result<OpElem, OperadError> {
        self.check_elem(e)?;
        if sigma.degree() != e.arity {
            return Err(OperadError::ArityMismatch(format!(
                "element arity {} but permutation degree {}",
                e.arity,
                sigma.degree()
            )));
        }
        match &self.backend {
            Backend::Initial | Backend::Com => Ok(e),
            Backend::As => {
                let omega = Perm::from_lehmer(e.arity, e.index).expect("valid rank");
                let moved = sigma.inverse().compose(&omega);
                Ok(OpElem { arity: e.arity, index: moved.lehmer_rank() })
            }
            Backend::Table(t) => {
                let table = &t.actions[e.arity];
                match table.get(&sigma.lehmer_rank()) {
                    Some(images) => Ok(OpElem { arity: e.arity, index: images[e.index] }),
                    None => Err(OperadError::MissingActionEntry {
                        arity: e.arity,
                        perm: sigma.cycle_label(),
                    }),
                }
            }
        }
    }

    /// Arity-1 elements act as endomorphisms under substitution; the unit must
    /// behave neutrally. Exposed for decoration plumbing.
    pub fn is_unit(&self, e: OpElem) -> bool {
        e == self.unit()
    }
}

/* # validation */

#[derive(Debug, Clone)]
pub struct AxiomCheck {
    pub axiom: String,
    pub ok: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

/// Exhaustively checks the operad axioms up to total arity `bound`
/// (default: `min(max_arity, 4)`).
pub fn validate(op: &Operad, bound: Option<usize>) -> Result<ValidationReport, OperadError> {
    let cap = bound.unwrap_or_else(|| op.max_arity.min(4));
    if cap > op.max_arity {
        return Err(OperadError::ArityOutOfRange { n: cap, max: op.max_arity });
    }
    let mut checks = Vec::new();
    let mut push = |axiom: &str, failure: Option<String>| {
        checks.push(AxiomCheck {
            axiom: axiom.to_string(),
            ok: failure.is_none(),
            detail: failure,
        });
    };

    push("unitaryarity0", {
        let size = op.size(0)?;
        (size != 1).then(|| format!("arity 0 holds {size} elements, expected 1"))
    });

    // gamma(unit; a) = a
    push("leftunit", {
        let mut failure = None;
        'outer: for n in 0..=cap {
            for a in op.elements(n)? {
                let got = op.gamma(op.unit(), &[a])?;
                if got != a {
                    failure = Some(format!(
                        "gamma(unit; {}) = {} in arity {n}",
                        op.label(a),
                        op.label(got)
                    ));
                    break 'outer;
                }
            }
        }
        failure
    });

    // gamma(theta; unit, …, unit) = theta
    push("rightunit", {
        let mut failure = None;
        'outer: for n in 0..=cap {
            for theta in op.elements(n)? {
                let units = vec![op.unit(); n];
                let got = op.gamma(theta, &units)?;
                if got != theta {
                    failure = Some(format!(
                        "gamma({}; unit^{n}) = {}",
                        op.label(theta),
                        op.label(got)
                    ));
                    break 'outer;
                }
            }
        }
        failure
    });

    // Right action laws.
    push("actionidentity", {
        let mut failure = None;
        'outer: for n in 0..=cap {
            for e in op.elements(n)? {
                if op.act(e, &Perm::identity(n))? != e {
                    failure = Some(format!("{} · id != itself in arity {n}", op.label(e)));
                    break 'outer;
                }
            }
        }
        failure
    });
    push("actioncomposition", {
        let mut failure = None;
        'outer: for n in 0..=cap.min(4) {
            for e in op.elements(n)? {
                for sigma in Perm::all(n) {
                    for tau in Perm::all(n) {
                        let lhs = op.act(op.act(e, &sigma)?, &tau)?;
                        let rhs = op.act(e, &sigma.compose(&tau))?;
                        if lhs != rhs {
                            failure = Some(format!(
                                "({}·{})·{} != {}·({}∘{}) in arity {n}",
                                op.label(e),
                                sigma.cycle_label(),
                                tau.cycle_label(),
                                op.label(e),
                                sigma.cycle_label(),
                                tau.cycle_label()
                            ));
                            break 'outer;
                        }
                    }
                }
            }
        }
        failure
    });

    // Associativity over all two-level composition shapes within the bound.
    push("associativity", check_associativity(op, cap)?);

    // Equivariance: gamma(theta·sigma; a) = gamma(theta; a_{sigma^{-1}(·)}) · sigma<sizes>.
    push("equivariance", check_equivariance(op, cap)?);

    Ok(ValidationReport { checks })
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    // All (m_1, …, m_parts) with m_i >= 0 summing to total.
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

fn check_associativity(op: &Operad, cap: usize) -> Result<Option<String>, OperadError> {
    for n in 0..=cap {
        for theta in op.elements(n)? {
            for mid in compositions_upto(n, cap) {
                let total_mid: usize = mid.iter().sum();
                let a_choices = elements_product(op, &mid)?;
                for a in &a_choices {
                    for low in compositions_upto(total_mid, cap) {
                        // low splits across the arities of the a_i in order
                        let b_choices = elements_product(op, &low)?;
                        for b in &b_choices {
                            // left: gamma(gamma(theta; a); b)
                            let inner_first = op.gamma(theta, a)?;
                            let lhs = op.gamma(inner_first, b)?;
                            // right: gamma(theta; gamma(a_i; b-block_i))
                            let mut blocks = Vec::with_capacity(n);
                            let mut off = 0usize;
                            for ai in a {
                                let slice = &b[off..off + ai.arity];
                                blocks.push(op.gamma(*ai, slice)?);
                                off += ai.arity;
                            }
                            let rhs = op.gamma(theta, &blocks)?;
                            if lhs != rhs {
                                return Ok(Some(format!(
                                    "associativity fails at outer {} (arity {n})",
                                    op.label(theta)
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

fn check_equivariance(op: &Operad, cap: usize) -> Result<Option<String>, OperadError> {
    for n in 0..=cap.min(4) {
        for theta in op.elements(n)? {
            for sizes in compositions_upto(n, cap) {
                let choices = elements_product(op, &sizes)?;
                for a in &choices {
                    for sigma in Perm::all(n) {
                        let lhs = op.gamma(op.act(theta, &sigma)?, a)?;
                        let inv = sigma.inverse();
                        let permuted: Vec<OpElem> =
                            (0..n).map(|i| a[inv.apply(i)]).collect();
                        let block = block_permutation(&sigma, &sizes);
                        let rhs = op.act(op.gamma(theta, &permuted)?, &block)?;
                        if lhs != rhs {
                            return Ok(Some(format!(
                                "equivariance fails at {} · {} with argument arities {:?}",
                                op.label(theta),
                                sigma.cycle_label(),
                                sizes
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// All argument-arity tuples of length `parts` with total at most `cap`.
fn compositions_upto(parts: usize, cap: usize) -> Vec<Vec<usize>> {
    (0..=cap).flat_map(|total| compositions(total, parts)).collect()
}

fn elements_product(op: &Operad, arities: &[usize]) -> Result<Vec<Vec<OpElem>>, OperadError> {
    let mut out: Vec<Vec<OpElem>> = vec![Vec::new()];
    for &n in arities {
        let elems = op.elements(n)?;
        let mut next = Vec::new();
        for prefix in &out {
            for &e in &elems {
                let mut v = prefix.clone();
                v.push(e);
                next.push(v);
            }
        }
        out = next;
    }
    Ok(out)
}

/* # operad morphisms */

/// Arity-preserving map of components, validated against both structures.
pub struct OperadMorphism {
    /// Per arity, per source index, the image index.
    pub maps: Vec<Vec<usize>>,
}

impl OperadMorphism {
    pub fn apply(&self, e: OpElem) -> Result<OpElem, OperadError> {
        let map = self
            .maps
            .get(e.arity)
            .ok_or(OperadError::ArityOutOfRange { n: e.arity, max: self.maps.len() })?;
        let index = *map.get(e.index).ok_or(OperadError::BadElement {
            arity: e.arity,
            index: e.index,
            size: map.len(),
        })?;
        Ok(OpElem { arity: e.arity, index })
    }
}

/// The unique morphism to `com`, checked against the morphism laws up to
/// `bound` (unit, substitution, actions).
pub fn terminal_morphism(
    src: &Operad,
    bound: Option<usize>,
) -> Result<OperadMorphism, OperadError> {
    let tgt = Operad::builtin("com", src.max_arity())?;
    let mut maps = Vec::new();
    for n in 0..=src.max_arity() {
        maps.push(vec![0usize; src.size(n)?]);
    }
    let m = OperadMorphism { maps };
    validate_morphism(src, &tgt, &m, bound)?;
    Ok(m)
}

pub fn validate_morphism(
    src: &Operad,
    tgt: &Operad,
    m: &OperadMorphism,
    bound: Option<usize>,
) -> Result<(), OperadError> {
    let cap = bound.unwrap_or_else(|| src.max_arity().min(4)).min(tgt.max_arity());
    if m.apply(src.unit())? != tgt.unit() {
        return Err(OperadError::BadDescription("morphism does not preserve the unit".into()));
    }
    for n in 0..=cap {
        for theta in src.elements(n)? {
            for sizes in compositions_upto(n, cap) {
                for a in elements_product(src, &sizes)? {
                    let lhs = m.apply(src.gamma(theta, &a)?)?;
                    let images: Vec<OpElem> =
                        a.iter().map(|&e| m.apply(e)).collect::<Result<_, _>>()?;
                    let rhs = tgt.gamma(m.apply(theta)?, &images)?;
                    if lhs != rhs {
                        return Err(OperadError::BadDescription(format!(
                            "morphism does not commute with substitution at {}",
                            src.label(theta)
                        )));
                    }
                }
            }
            if n <= 4 {
                for sigma in Perm::all(n) {
                    let lhs = m.apply(src.act(theta, &sigma)?)?;
                    let rhs = tgt.act(m.apply(theta)?, &sigma)?;
                    if lhs != rhs {
                        return Err(OperadError::BadDescription(format!(
                            "morphism does not commute with the action at {}",
                            src.label(theta)
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn as_sizes() {
        let op = Operad::builtin("as", 3).unwrap();
        let sizes: Vec<usize> = (0..=3).map(|n| op.size(n).unwrap()).collect();
        assert_eq!(sizes, vec![1, 1, 2, 6]);
    }

    #[test]
    fn as_gamma_matches_word_substitution() {
        let op = Operad::builtin("as", 3).unwrap();
        let tau = op.parse_elem(2, "(12)").unwrap();
        let id2 = op.parse_elem(2, "id_2").unwrap();
        let id1 = op.parse_elem(1, "id_1").unwrap();
        let got = op.gamma(tau, &[id2, id1]).unwrap();
        let word = op.as_perm(got).unwrap().word();
        assert_eq!(word, vec![3, 1, 2]);
    }

    #[test]
    fn builtins_validate() {
        for name in ["initial", "com", "as"] {
            let op = Operad::builtin(name, 4).unwrap();
            let report = validate(&op, None).unwrap();
            assert!(report.ok(), "{name}: {:?}", report.checks);
        }
    }

    #[test]
    fn initial_has_empty_higher_components() {
        let op = Operad::builtin("initial", 3).unwrap();
        assert_eq!(op.size(2).unwrap(), 0);
        assert_eq!(op.size(3).unwrap(), 0);
    }

    #[test]
    fn truncation_is_reported() {
        let op = Operad::builtin("com", 2).unwrap();
        let star2 = op.parse_elem(2, "*").unwrap();
        let err = op.gamma(star2, &[star2, star2]).unwrap_err();
        assert_eq!(err, OperadError::TruncationExceeded { needed: 4, max: 2 });
    }
}
