//! Finite permutations with exact Lehmer-code indexing.
//!
//! Permutations are stored as 0-based image vectors. All public labels and
//! parsed forms are 1-based cycle notation, `id_n` for identities. Composition
//! `a.compose(&b)` means "apply `b` first", i.e. `(a∘b)(x) = a(b(x))`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("image vector {0:?} is not a permutation")]
    NotAPermutation(Vec<usize>),
    #[error("cannot parse permutation label {label:?} on {n} points: {reason}")]
    BadLabel { label: String, n: usize, reason: String },
    #[error("rank {rank} out of range for degree {n}")]
    RankOutOfRange { rank: usize, n: usize },
}

/// A permutation of `{0, …, n-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm {
    img: Vec<usize>,
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({})", self.cycle_label())
    }
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { img: (0..n).collect() }
    }

    pub fn from_images(img: Vec<usize>) -> Result<Self, PermError> {
        let n = img.len();
        let mut seen = vec![false; n];
        for &v in &img {
            if v >= n || seen[v] {
                return Err(PermError::NotAPermutation(img));
            }
            seen[v] = true;
        }
        Ok(Perm { img })
    }

    /// One-based image word `(σ(1), …, σ(n))`.
    pub fn word(&self) -> Vec<usize> {
        self.img.iter().map(|&v| v + 1).collect()
    }

    pub fn from_word(word: &[usize]) -> Result<Self, PermError> {
        let img: Vec<usize> = word
            .iter()
            .map(|&v| v.checked_sub(1).ok_or_else(|| PermError::NotAPermutation(word.to_vec())))
            .collect::<Result<_, _>>()?;
        Perm::from_images(img)
    }

    pub fn degree(&self) -> usize {
        self.img.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.img[x]
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Perm {
        let mut img = vec![0; self.img.len()];
        for (i, &v) in self.img.iter().enumerate() {
            img[v] = i;
        }
        Perm { img }
    }

    /// `(self ∘ other)(x) = self(other(x))`; `other` acts first.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in composition");
        Perm { img: other.img.iter().map(|&v| self.img[v]).collect() }
    }

    /// Adjacent transposition `(i, i+1)` on `n` points, 1-based `i`.
    pub fn adjacent_transposition(n: usize, i: usize) -> Perm {
        assert!(i >= 1 && i < n, "adjacent transposition ({i} {}) needs 1 <= i < n = {n}", i + 1);
        let mut img: Vec<usize> = (0..n).collect();
        img.swap(i - 1, i);
        Perm { img }
    }

    /// Transposition `(a, b)` on `n` points, 1-based.
    pub fn transposition(n: usize, a: usize, b: usize) -> Perm {
        assert!(a >= 1 && b >= 1 && a <= n && b <= n && a != b);
        let mut img: Vec<usize> = (0..n).collect();
        img.swap(a - 1, b - 1);
        Perm { img }
    }

    /// Lehmer rank in `0..n!`, lexicographic on image words.
    pub fn lehmer_rank(&self) -> usize {
        let n = self.degree();
        let mut rank = 0usize;
        for i in 0..n {
            let smaller = (i + 1..n).filter(|&j| self.img[j] < self.img[i]).count();
            rank = rank * (n - i) + smaller;
        }
        rank
    }

    pub fn from_lehmer(n: usize, rank: usize) -> Result<Self, PermError> {
        let total = factorial(n);
        if rank >= total {
            return Err(PermError::RankOutOfRange { rank, n });
        }
        let mut digits = vec![0usize; n];
        let mut r = rank;
        for i in (0..n).rev() {
            let base = n - i;
            digits[i] = r % base;
            r /= base;
        }
        let mut pool: Vec<usize> = (0..n).collect();
        let img = digits.iter().map(|&d| pool.remove(d)).collect();
        Ok(Perm { img })
    }

    pub fn all(n: usize) -> impl Iterator<Item = Perm> {
        (0..factorial(n)).map(move |r| Perm::from_lehmer(n, r).expect("rank in range"))
    }

    /// Canonical label: `id_n`, or disjoint cycles in 1-based notation, each
    /// cycle led by its least point, cycles sorted by least point. Commas
    /// separate points once any point needs two digits.
    pub fn cycle_label(&self) -> String {
        let n = self.degree();
        if self.is_identity() {
            return format!("id_{n}");
        }
        let mut seen = vec![false; n];
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if seen[start] || self.img[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut x = self.img[start];
            while x != start {
                seen[x] = true;
                cyc.push(x);
                x = self.img[x];
            }
            cycles.push(cyc);
        }
        let wide = n >= 10;
        let mut out = String::new();
        for cyc in cycles {
            out.push('(');
            let parts: Vec<String> = cyc.iter().map(|&p| (p + 1).to_string()).collect();
            out.push_str(&if wide { parts.join(",") } else { parts.concat() });
            out.push(')');
        }
        out
    }

    /// Parses the output of [`Perm::cycle_label`]; also accepts `id_k` for any
    /// `k == n` and comma forms regardless of width.
    pub fn parse_cycle_label(n: usize, label: &str) -> Result<Self, PermError> {
        let fail = |reason: &str| PermError::BadLabel {
            label: label.to_string(),
            n,
            reason: reason.to_string(),
        };
        let label = label.trim();
        if let Some(rest) = label.strip_prefix("id_") {
            let k: usize = rest.parse().map_err(|_| fail("bad id_ suffix"))?;
            if k != n {
                return Err(fail(&format!("identity degree {k} does not match {n}")));
            }
            return Ok(Perm::identity(n));
        }
        let mut img: Vec<usize> = (0..n).collect();
        let mut moved = vec![false; n];
        let mut rest = label;
        while !rest.is_empty() {
            let close = rest.find(')').ok_or_else(|| fail("unbalanced parentheses"))?;
            if !rest.starts_with('(') {
                return Err(fail("expected '('"));
            }
            let body = &rest[1..close];
            let points: Vec<usize> = if body.contains(',') {
                body.split(',')
                    .map(|s| s.trim().parse::<usize>().map_err(|_| fail("bad point")))
                    .collect::<Result<_, _>>()?
            } else {
                body.chars()
                    .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| fail("bad digit")))
                    .collect::<Result<_, _>>()?
            };
            if points.len() < 2 {
                return Err(fail("cycle shorter than 2"));
            }
            for &p in &points {
                if p < 1 || p > n {
                    return Err(fail(&format!("point {p} out of range 1..={n}")));
                }
                if moved[p - 1] {
                    return Err(fail(&format!("point {p} repeated")));
                }
                moved[p - 1] = true;
            }
            for w in 0..points.len() {
                let from = points[w] - 1;
                let to = points[(w + 1) % points.len()] - 1;
                img[from] = to;
            }
            rest = &rest[close + 1..];
        }
        Perm::from_images(img)
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// The block permutation induced on `m_1 + … + m_n` points by `sigma` acting on
/// the `n` blocks: point `offset(i) + t` goes to `offset'(sigma(i)) + t`, where
/// `offset` accumulates the given sizes and `offset'` accumulates the sizes in
/// `sigma`-permuted order.
pub fn block_permutation(sigma: &Perm, sizes: &[usize]) -> Perm {
    let n = sigma.degree();
    assert_eq!(sizes.len(), n);
    let total: usize = sizes.iter().sum();
    let mut offset = vec![0usize; n];
    for i in 1..n {
        offset[i] = offset[i - 1] + sizes[i - 1];
    }
    let inv = sigma.inverse();
    let mut offset_new = vec![0usize; n];
    for j in 1..n {
        offset_new[j] = offset_new[j - 1] + sizes[inv.apply(j - 1)];
    }
    let mut img = vec![0usize; total];
    for i in 0..n {
        let j = sigma.apply(i);
        for t in 0..sizes[i] {
            img[offset[i] + t] = offset_new[j] + t;
        }
    }
    Perm { img }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_roundtrip() {
        for n in 0..=5 {
            for r in 0..factorial(n) {
                let p = Perm::from_lehmer(n, r).unwrap();
                assert_eq!(p.lehmer_rank(), r);
            }
        }
    }

    #[test]
    fn labels_roundtrip() {
        for n in 0..=5 {
            for p in Perm::all(n) {
                let label = p.cycle_label();
                let q = Perm::parse_cycle_label(n, &label).unwrap();
                assert_eq!(p, q, "label {label}");
            }
        }
    }

    #[test]
    fn compose_applies_right_factor_first() {
        let a = Perm::from_word(&[2, 3, 1]).unwrap();
        let b = Perm::from_word(&[2, 1, 3]).unwrap();
        let c = a.compose(&b);
        for x in 0..3 {
            assert_eq!(c.apply(x), a.apply(b.apply(x)));
        }
    }

    #[test]
    fn inverse_cancels() {
        for p in Perm::all(4) {
            assert!(p.compose(&p.inverse()).is_identity());
            assert!(p.inverse().compose(&p).is_identity());
        }
    }

    #[test]
    fn block_permutation_on_swap() {
        // Swap two blocks of sizes 1 and 2: (x | y z) ↦ (y z | x).
        let sigma = Perm::from_word(&[2, 1]).unwrap();
        let beta = block_permutation(&sigma, &[1, 2]);
        assert_eq!(beta.word(), vec![3, 1, 2]);
    }
}
