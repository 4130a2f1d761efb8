//! Exact linear algebra over the integers.
//!
//! Matrices act on column vectors: an `r × c` matrix is a map `Z^c -> Z^r`.
//! Generating sets for subgroups are passed around as matrix *rows* in ambient
//! coordinates. Smith and Hermite forms come with the unimodular transforms
//! (and their inverses) so every isomorphism certificate downstream is an
//! explicit integer matrix that can be re-multiplied and checked.
//!
//! Finitely generated abelian groups are carried as [`FgAbGroup`]: a free rank
//! plus a list of torsion coordinate orders (each `>= 2`, not necessarily in
//! divisibility order; [`FgAbGroup::invariant_factors`] canonicalizes).
//! Coordinates list the free part first, then the torsion part.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use thiserror::Error;

pub type Int = BigInt;

pub fn bi(x: i64) -> Int {
    Int::from(x)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ZmodError {
    #[error("matrix dimension mismatch: {0}")]
    Dimension(String),
    #[error("subgroup is not contained in the bigger subgroup (row {row} fails membership)")]
    ContainmentViolation { row: usize },
    #[error("no integer solution")]
    NotSolvable,
    #[error("matrix is not a valid homomorphism: column {col} violates torsion order {order}")]
    NotAHom { col: usize, order: Int },
    #[error("homomorphism endpoint mismatch: {0}")]
    HomMismatch(String),
}

/* # dense integer matrices */

#[derive(Clone, PartialEq, Eq)]
pub struct ZMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Int>,
}

impl fmt::Debug for ZMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ZMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl ZMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ZMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ZMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Int::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Int) -> Self {
        let mut m = ZMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == nc), "ragged rows");
        ZMatrix::from_fn(nr, nc, |r, c| bi(rows[r][c]))
    }

    pub fn get(&self, r: usize, c: usize) -> &Int {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Int) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<Int> {
        (0..self.cols).map(|c| self.get(r, c).clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<Int> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> ZMatrix {
        ZMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn mul(&self, other: &ZMatrix) -> ZMatrix {
        assert_eq!(self.cols, other.rows, "mul dimension mismatch");
        let mut out = ZMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(r, c).clone();
                    out.set(r, c, cur + a * b);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &ZMatrix) -> ZMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ZMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) + other.get(r, c))
    }

    pub fn sub(&self, other: &ZMatrix) -> ZMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ZMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) - other.get(r, c))
    }

    pub fn neg(&self) -> ZMatrix {
        ZMatrix::from_fn(self.rows, self.cols, |r, c| -self.get(r, c))
    }

    pub fn scale(&self, k: &Int) -> ZMatrix {
        ZMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) * k)
    }

    pub fn vstack(&self, other: &ZMatrix) -> ZMatrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        ZMatrix::from_fn(self.rows + other.rows, self.cols, |r, c| {
            if r < self.rows { self.get(r, c).clone() } else { other.get(r - self.rows, c).clone() }
        })
    }

    pub fn hstack(&self, other: &ZMatrix) -> ZMatrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        ZMatrix::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols { self.get(r, c).clone() } else { other.get(r, c - self.cols).clone() }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    /// Kronecker product; block (i,j) of the result is `self[i][j] * other`.
    pub fn kronecker(&self, other: &ZMatrix) -> ZMatrix {
        ZMatrix::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            self.get(r / other.rows, c / other.cols).clone()
                * other.get(r % other.rows, c % other.cols).clone()
        })
    }

    /// Fraction-free determinant (Bareiss). Panics on non-square input.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&r| !a.get(r, k).is_zero()) {
                    Some(r) => {
                        for c in 0..n {
                            let x = a.get(k, c).clone();
                            let y = a.get(r, c).clone();
                            a.set(k, c, y);
                            a.set(r, c, x);
                        }
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1).clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }
}

/* # Smith normal form */

pub struct SnfResult {
    /// Diagonal form, nonnegative diagonal, each entry dividing the next.
    pub d: ZMatrix,
    pub u: ZMatrix,
    pub u_inv: ZMatrix,
    pub v: ZMatrix,
    pub v_inv: ZMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<Int> {
        let n = self.d.rows.min(self.d.cols);
        (0..n).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|v| !v.is_zero()).count()
    }
}

struct SnfWork {
    a: ZMatrix,
    u: ZMatrix,
    u_inv: ZMatrix,
    v: ZMatrix,
    v_inv: ZMatrix,
}

impl SnfWork {
    fn row_swap(&mut self, r1: usize, r2: usize) {
        if r1 == r2 {
            return;
        }
        for c in 0..self.a.cols {
            let x = self.a.get(r1, c).clone();
            let y = self.a.get(r2, c).clone();
            self.a.set(r1, c, y);
            self.a.set(r2, c, x);
        }
        for c in 0..self.u.cols {
            let x = self.u.get(r1, c).clone();
            let y = self.u.get(r2, c).clone();
            self.u.set(r1, c, y);
            self.u.set(r2, c, x);
        }
        for r in 0..self.u_inv.rows {
            let x = self.u_inv.get(r, r1).clone();
            let y = self.u_inv.get(r, r2).clone();
            self.u_inv.set(r, r1, y);
            self.u_inv.set(r, r2, x);
        }
    }

    /// row r += k * row s
    fn row_addmul(&mut self, r: usize, s: usize, k: &Int) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.a.cols {
            let v = self.a.get(r, c) + k * self.a.get(s, c);
            self.a.set(r, c, v);
        }
        for c in 0..self.u.cols {
            let v = self.u.get(r, c) + k * self.u.get(s, c);
            self.u.set(r, c, v);
        }
        for row in 0..self.u_inv.rows {
            let v = self.u_inv.get(row, s) - k * self.u_inv.get(row, r);
            self.u_inv.set(row, s, v);
        }
    }

    fn row_neg(&mut self, r: usize) {
        for c in 0..self.a.cols {
            let v = -self.a.get(r, c);
            self.a.set(r, c, v);
        }
        for c in 0..self.u.cols {
            let v = -self.u.get(r, c);
            self.u.set(r, c, v);
        }
        for row in 0..self.u_inv.rows {
            let v = -self.u_inv.get(row, r);
            self.u_inv.set(row, r, v);
        }
    }

    fn col_swap(&mut self, c1: usize, c2: usize) {
        if c1 == c2 {
            return;
        }
        for r in 0..self.a.rows {
            let x = self.a.get(r, c1).clone();
            let y = self.a.get(r, c2).clone();
            self.a.set(r, c1, y);
            self.a.set(r, c2, x);
        }
        for r in 0..self.v.rows {
            let x = self.v.get(r, c1).clone();
            let y = self.v.get(r, c2).clone();
            self.v.set(r, c1, y);
            self.v.set(r, c2, x);
        }
        for c in 0..self.v_inv.cols {
            let x = self.v_inv.get(c1, c).clone();
            let y = self.v_inv.get(c2, c).clone();
            self.v_inv.set(c1, c, y);
            self.v_inv.set(c2, c, x);
        }
    }

    /// col c += k * col d
    fn col_addmul(&mut self, c: usize, d: usize, k: &Int) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.a.rows {
            let v = self.a.get(r, c) + k * self.a.get(r, d);
            self.a.set(r, c, v);
        }
        for r in 0..self.v.rows {
            let v = self.v.get(r, c) + k * self.v.get(r, d);
            self.v.set(r, c, v);
        }
        for col in 0..self.v_inv.cols {
            let v = self.v_inv.get(d, col) - k * self.v_inv.get(c, col);
            self.v_inv.set(d, col, v);
        }
    }
}

/// Smith normal form with unimodular transforms: `u * m * v = d`.
///
/// Pivots are chosen by minimum absolute value among the remaining nonzero
/// entries.
pub fn smith_normal_form(m: &ZMatrix) -> SnfResult {
    let mut w = SnfWork {
        a: m.clone(),
        u: ZMatrix::identity(m.rows),
        u_inv: ZMatrix::identity(m.rows),
        v: ZMatrix::identity(m.cols),
        v_inv: ZMatrix::identity(m.cols),
    };
    let steps = m.rows.min(m.cols);
    for t in 0..steps {
        'pivot: loop {
            // Move the minimum-absolute-value nonzero entry of the submatrix
            // to (t, t); if the submatrix is zero we are done with it.
            let mut best: Option<(usize, usize)> = None;
            for r in t..w.a.rows {
                for c in t..w.a.cols {
                    if !w.a.get(r, c).is_zero() {
                        let better = match best {
                            None => true,
                            Some((br, bc)) => w.a.get(r, c).abs() < w.a.get(br, bc).abs(),
                        };
                        if better {
                            best = Some((r, c));
                        }
                    }
                }
            }
            let Some((pr, pc)) = best else { break 'pivot };
            w.row_swap(t, pr);
            w.col_swap(t, pc);
            let mut dirty = false;
            for r in t + 1..w.a.rows {
                if !w.a.get(r, t).is_zero() {
                    let q = w.a.get(r, t) / w.a.get(t, t);
                    w.row_addmul(r, t, &-q);
                    if !w.a.get(r, t).is_zero() {
                        dirty = true;
                    }
                }
            }
            for c in t + 1..w.a.cols {
                if !w.a.get(t, c).is_zero() {
                    let q = w.a.get(t, c) / w.a.get(t, t);
                    w.col_addmul(c, t, &-q);
                    if !w.a.get(t, c).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'pivot;
            }
            // Pivot divides everything in its row and column and they are
            // cleared; enforce divisibility into the rest of the submatrix.
            let d = w.a.get(t, t).clone();
            for r in t + 1..w.a.rows {
                for c in t + 1..w.a.cols {
                    if !(w.a.get(r, c) % &d).is_zero() {
                        w.row_addmul(t, r, &Int::one());
                        continue 'pivot;
                    }
                }
            }
            if w.a.get(t, t).is_negative() {
                w.row_neg(t);
            }
            break 'pivot;
        }
    }
    SnfResult { d: w.a, u: w.u, u_inv: w.u_inv, v: w.v, v_inv: w.v_inv }
}

/* # Hermite form, solving, kernels */

pub struct HnfResult {
    /// Row echelon form with positive pivots; entries above each pivot reduced
    /// into `[0, pivot)`.
    pub h: ZMatrix,
    pub u: ZMatrix,
    /// For each pivot row, its pivot column.
    pub pivots: Vec<usize>,
}

/// Row-style Hermite normal form: `u * m = h` with unimodular `u`.
pub fn hermite_rows(m: &ZMatrix) -> HnfResult {
    let mut w = SnfWork {
        a: m.clone(),
        u: ZMatrix::identity(m.rows),
        u_inv: ZMatrix::identity(m.rows),
        v: ZMatrix::identity(m.cols),
        v_inv: ZMatrix::identity(m.cols),
    };
    let mut pivots = Vec::new();
    let mut r0 = 0usize;
    for c in 0..m.cols {
        if r0 == m.rows {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for r in r0..m.rows {
                if !w.a.get(r, c).is_zero() {
                    let better = match best {
                        None => true,
                        Some(b) => w.a.get(r, c).abs() < w.a.get(b, c).abs(),
                    };
                    if better {
                        best = Some(r);
                    }
                }
            }
            let Some(pr) = best else { break };
            w.row_swap(r0, pr);
            let mut dirty = false;
            for r in r0 + 1..m.rows {
                if !w.a.get(r, c).is_zero() {
                    let q = w.a.get(r, c) / w.a.get(r0, c);
                    w.row_addmul(r, r0, &-q);
                    if !w.a.get(r, c).is_zero() {
                        dirty = true;
                    }
                }
            }
            if !dirty {
                break;
            }
        }
        if !w.a.get(r0, c).is_zero() {
            if w.a.get(r0, c).is_negative() {
                w.row_neg(r0);
            }
            let pivot = w.a.get(r0, c).clone();
            for r in 0..r0 {
                let v = w.a.get(r, c);
                if !v.is_zero() {
                    let q = v.div_euclid(&pivot);
                    w.row_addmul(r, r0, &-q);
                }
            }
            pivots.push(c);
            r0 += 1;
        }
    }
    HnfResult { h: w.a, u: w.u, pivots }
}

/// Solves `x * b = t` row-wise: returns `x` with one row per row of `t`, or
/// `None` if some row of `t` is not in the row span of `b`.
pub fn row_span_solve(b: &ZMatrix, t: &ZMatrix) -> Option<ZMatrix> {
    assert_eq!(b.cols, t.cols, "row_span_solve column mismatch");
    let hnf = hermite_rows(b);
    let mut out = ZMatrix::zeros(t.rows, b.rows);
    for tr in 0..t.rows {
        let mut v = t.row(tr);
        let mut coeffs = vec![Int::zero(); hnf.h.rows];
        for (pr, &pc) in hnf.pivots.iter().enumerate() {
            if v[pc].is_zero() {
                continue;
            }
            let piv = hnf.h.get(pr, pc);
            if !(&v[pc] % piv).is_zero() {
                return None;
            }
            let q = &v[pc] / piv;
            for c in 0..b.cols {
                let delta = &q * hnf.h.get(pr, c);
                v[c] = &v[c] - delta;
            }
            coeffs[pr] = q;
        }
        if v.iter().any(|x| !x.is_zero()) {
            return None;
        }
        // x = coeffs * u
        for c in 0..b.rows {
            let mut acc = Int::zero();
            for (pr, coeff) in coeffs.iter().enumerate() {
                if !coeff.is_zero() {
                    acc += coeff * hnf.u.get(pr, c);
                }
            }
            out.set(tr, c, acc);
        }
    }
    Some(out)
}

/// Basis of `{x : m x = 0}`, returned as rows (each row a source vector).
pub fn kernel(m: &ZMatrix) -> ZMatrix {
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let zero_cols: Vec<usize> = (0..m.cols)
        .filter(|&i| i >= diag.len() || diag[i].is_zero())
        .collect();
    let mut out = ZMatrix::zeros(zero_cols.len(), m.cols);
    for (r, &ci) in zero_cols.iter().enumerate() {
        for j in 0..m.cols {
            out.set(r, j, snf.v.get(j, ci).clone());
        }
    }
    out
}

/// Basis of `{x : x m = 0}`, as rows.
pub fn left_kernel(m: &ZMatrix) -> ZMatrix {
    kernel(&m.transpose())
}

/// Solves `a X = b` over the integers, or `None`.
pub fn solve_columns(a: &ZMatrix, b: &ZMatrix) -> Option<ZMatrix> {
    assert_eq!(a.rows, b.rows, "solve_columns row mismatch");
    row_span_solve(&a.transpose(), &b.transpose()).map(|xt| xt.transpose())
}

/// Membership of every row of `t` in the row span of `b`.
pub fn rows_in_span(b: &ZMatrix, t: &ZMatrix) -> bool {
    row_span_solve(b, t).is_some()
}

/* # finitely generated abelian groups */

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FgAbGroup {
    rank: usize,
    torsion: Vec<Int>,
}

impl FgAbGroup {
    pub fn new(rank: usize, torsion: Vec<Int>) -> Self {
        assert!(torsion.iter().all(|d| d >= &bi(2)), "torsion orders must be >= 2");
        FgAbGroup { rank, torsion }
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup { rank, torsion: Vec::new() }
    }

    pub fn trivial() -> Self {
        FgAbGroup::free(0)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[Int] {
        &self.torsion
    }

    pub fn num_coords(&self) -> usize {
        self.rank + self.torsion.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.num_coords() == 0
    }

    /// Order of the coordinate: `None` for free coordinates.
    pub fn coord_order(&self, i: usize) -> Option<&Int> {
        if i < self.rank { None } else { Some(&self.torsion[i - self.rank]) }
    }

    /// Rows spanning the relation lattice inside `Z^{num_coords}`.
    pub fn relation_rows(&self) -> ZMatrix {
        let n = self.num_coords();
        let mut m = ZMatrix::zeros(self.torsion.len(), n);
        for (j, d) in self.torsion.iter().enumerate() {
            m.set(j, self.rank + j, d.clone());
        }
        m
    }

    /// `(free rank, invariant factors >= 2, in divisibility order)`.
    pub fn invariant_factors(&self) -> (usize, Vec<Int>) {
        if self.torsion.is_empty() {
            return (self.rank, Vec::new());
        }
        let t = self.torsion.len();
        let mut diag = ZMatrix::zeros(t, t);
        for (i, d) in self.torsion.iter().enumerate() {
            diag.set(i, i, d.clone());
        }
        let snf = smith_normal_form(&diag);
        let factors = snf.diagonal().into_iter().filter(|d| d > &Int::one()).collect();
        (self.rank, factors)
    }

    pub fn is_isomorphic(&self, other: &FgAbGroup) -> bool {
        self.invariant_factors() == other.invariant_factors()
    }

    pub fn direct_sum(parts: &[FgAbGroup]) -> (FgAbGroup, Vec<ZHom>, Vec<ZHom>) {
        let rank = parts.iter().map(|g| g.rank).sum();
        let torsion: Vec<Int> = parts.iter().flat_map(|g| g.torsion.iter().cloned()).collect();
        let total = FgAbGroup { rank, torsion };
        let n = total.num_coords();
        let mut free_off = 0usize;
        let mut tor_off = 0usize;
        let mut injections = Vec::new();
        let mut projections = Vec::new();
        for g in parts {
            let mut inj = ZMatrix::zeros(n, g.num_coords());
            let mut proj = ZMatrix::zeros(g.num_coords(), n);
            for j in 0..g.rank {
                inj.set(free_off + j, j, Int::one());
                proj.set(j, free_off + j, Int::one());
            }
            for j in 0..g.torsion.len() {
                inj.set(rank + tor_off + j, g.rank + j, Int::one());
                proj.set(g.rank + j, rank + tor_off + j, Int::one());
            }
            injections.push(ZHom::new(g.clone(), total.clone(), inj).expect("injection is a hom"));
            projections
                .push(ZHom::new(total.clone(), g.clone(), proj).expect("projection is a hom"));
            free_off += g.rank;
            tor_off += g.torsion.len();
        }
        (total, injections, projections)
    }
}

/* # homomorphisms between f.g. abelian groups */

#[derive(Clone, Debug)]
pub struct ZHom {
    pub src: FgAbGroup,
    pub dst: FgAbGroup,
    mat: ZMatrix,
}

impl ZHom {
    /// Validates that the matrix respects torsion orders and canonicalizes
    /// torsion-coordinate rows.
    pub fn new(src: FgAbGroup, dst: FgAbGroup, mat: ZMatrix) -> Result<Self, ZmodError> {
        if mat.rows != dst.num_coords() || mat.cols != src.num_coords() {
            return Err(ZmodError::Dimension(format!(
                "hom matrix is {}x{}, expected {}x{}",
                mat.rows,
                mat.cols,
                dst.num_coords(),
                src.num_coords()
            )));
        }
        let mut canon = mat;
        for r in 0..canon.rows {
            if let Some(d) = dst.coord_order(r) {
                for c in 0..canon.cols {
                    let v = canon.get(r, c).rem_euclid(d);
                    canon.set(r, c, v);
                }
            }
        }
        for c in 0..canon.cols {
            if let Some(d) = src.coord_order(c) {
                for r in 0..canon.rows {
                    let v = canon.get(r, c) * d;
                    let ok = match dst.coord_order(r) {
                        None => v.is_zero(),
                        Some(e) => (v % e).is_zero(),
                    };
                    if !ok {
                        return Err(ZmodError::NotAHom { col: c, order: d.clone() });
                    }
                }
            }
        }
        Ok(ZHom { src, dst, mat: canon })
    }

    pub fn matrix(&self) -> &ZMatrix {
        &self.mat
    }

    pub fn identity(g: &FgAbGroup) -> ZHom {
        ZHom::new(g.clone(), g.clone(), ZMatrix::identity(g.num_coords()))
            .expect("identity is a hom")
    }

    pub fn zero(src: &FgAbGroup, dst: &FgAbGroup) -> ZHom {
        ZHom::new(src.clone(), dst.clone(), ZMatrix::zeros(dst.num_coords(), src.num_coords()))
            .expect("zero is a hom")
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &ZHom) -> ZHom {
        assert_eq!(self.src, other.dst, "compose endpoint mismatch");
        ZHom::new(other.src.clone(), self.dst.clone(), self.mat.mul(&other.mat))
            .expect("composite of homs is a hom")
    }

    pub fn add(&self, other: &ZHom) -> ZHom {
        assert_eq!(self.src, other.src);
        assert_eq!(self.dst, other.dst);
        ZHom::new(self.src.clone(), self.dst.clone(), self.mat.add(&other.mat))
            .expect("sum of homs is a hom")
    }

    pub fn sub(&self, other: &ZHom) -> ZHom {
        assert_eq!(self.src, other.src);
        assert_eq!(self.dst, other.dst);
        ZHom::new(self.src.clone(), self.dst.clone(), self.mat.sub(&other.mat))
            .expect("difference of homs is a hom")
    }

    pub fn scale(&self, k: &Int) -> ZHom {
        ZHom::new(self.src.clone(), self.dst.clone(), self.mat.scale(k)).expect("scaled hom")
    }

    pub fn is_zero(&self) -> bool {
        self.mat.is_zero()
    }

    pub fn eq(&self, other: &ZHom) -> bool {
        self.src == other.src && self.dst == other.dst && self.mat == other.mat
    }

    /// Applies the hom to a column vector in source coordinates, canonicalizing
    /// torsion coordinates of the result.
    pub fn apply(&self, v: &ZMatrix) -> ZMatrix {
        assert_eq!(v.cols, 1);
        let mut out = self.mat.mul(v);
        for r in 0..out.rows {
            if let Some(d) = self.dst.coord_order(r) {
                let x = out.get(r, 0).rem_euclid(d);
                out.set(r, 0, x);
            }
        }
        out
    }

    /// Two-sided inverse, if one exists. The returned hom certifies the
    /// isomorphism: both composites are verified to be identities.
    pub fn inverse(&self) -> Option<ZHom> {
        let rel_dst = self.dst.relation_rows().transpose();
        let lhs = if rel_dst.cols > 0 { self.mat.hstack(&rel_dst) } else { self.mat.clone() };
        let sol = solve_columns(&lhs, &ZMatrix::identity(self.dst.num_coords()))?;
        let candidate = ZMatrix::from_fn(self.src.num_coords(), self.dst.num_coords(), |r, c| {
            sol.get(r, c).clone()
        });
        let inv = ZHom::new(self.dst.clone(), self.src.clone(), candidate).ok()?;
        let id_src = ZHom::identity(&self.src);
        let id_dst = ZHom::identity(&self.dst);
        if inv.compose(self).eq(&id_src) && self.compose(&inv).eq(&id_dst) {
            Some(inv)
        } else {
            None
        }
    }

    pub fn is_iso(&self) -> bool {
        self.inverse().is_some()
    }
}

/* # presentations, subgroups, quotients */

/// A group presented by `gens` generators and relation rows, reduced to
/// canonical coordinates. `proj * lift = identity` exactly.
pub struct Reduced {
    pub group: FgAbGroup,
    /// coords × gens
    pub proj: ZMatrix,
    /// gens × coords
    pub lift: ZMatrix,
}

/// Reduces `Z^gens / <relation rows>`.
pub fn reduce_presentation(gens: usize, rel_rows: &ZMatrix) -> Reduced {
    assert_eq!(rel_rows.cols, gens, "relation row length mismatch");
    let rel_cols = rel_rows.transpose();
    let snf = smith_normal_form(&rel_cols);
    let diag = snf.diagonal();
    let mut torsion_idx = Vec::new();
    let mut free_idx = Vec::new();
    for i in 0..gens {
        let d = if i < diag.len() { diag[i].clone() } else { Int::zero() };
        if d.is_zero() {
            free_idx.push(i);
        } else if d > Int::one() {
            torsion_idx.push((i, d));
        }
    }
    let group = FgAbGroup::new(free_idx.len(), torsion_idx.iter().map(|(_, d)| d.clone()).collect());
    let n = group.num_coords();
    let mut proj = ZMatrix::zeros(n, gens);
    let mut lift = ZMatrix::zeros(gens, n);
    let order: Vec<usize> = free_idx
        .iter()
        .copied()
        .chain(torsion_idx.iter().map(|&(i, _)| i))
        .collect();
    for (row, &i) in order.iter().enumerate() {
        for c in 0..gens {
            proj.set(row, c, snf.u.get(i, c).clone());
        }
        for r in 0..gens {
            lift.set(r, row, snf.u_inv.get(r, i).clone());
        }
    }
    Reduced { group, proj, lift }
}

/// A subgroup of `amb` generated by given rows, with structure maps.
pub struct SubObject {
    pub amb: FgAbGroup,
    pub group: FgAbGroup,
    /// The subgroup's inclusion into the ambient group.
    pub incl: ZHom,
    gens: ZMatrix,
    proj_gens: ZMatrix,
}

impl SubObject {
    /// Expresses a hom `h : W -> amb` whose image lies in the subgroup as a hom
    /// `W -> group` with `incl ∘ result = h`.
    pub fn express(&self, h: &ZHom) -> Result<ZHom, ZmodError> {
        if h.dst != self.amb {
            return Err(ZmodError::HomMismatch("express target is not the ambient group".into()));
        }
        let rel = self.amb.relation_rows();
        let system = if rel.rows > 0 { self.gens.vstack(&rel) } else { self.gens.clone() };
        let sol =
            row_span_solve(&system, &h.matrix().transpose()).ok_or(ZmodError::NotSolvable)?;
        // coefficient rows over gens -> subgroup coordinates
        let coeff = ZMatrix::from_fn(h.src.num_coords(), self.gens.rows, |r, c| {
            sol.get(r, c).clone()
        });
        let mat = self.proj_gens.mul(&coeff.transpose());
        let out = ZHom::new(h.src.clone(), self.group.clone(), mat)?;
        if !self.incl.compose(&out).eq(h) {
            return Err(ZmodError::NotSolvable);
        }
        Ok(out)
    }
}

/// Subgroup of `amb` generated by the given rows (ambient coordinates).
pub fn subgroup_from_rows(amb: &FgAbGroup, rows: &ZMatrix) -> SubObject {
    assert_eq!(rows.cols, amb.num_coords(), "generator rows in wrong ambient dimension");
    let rel = amb.relation_rows();
    let gens = if rel.rows > 0 { rows.vstack(&rel) } else { rows.clone() };
    let k = gens.rows;
    // Relations among the generators: rows (c, y) of the left kernel of
    // [gens; rel] satisfy c*gens = -y*rel, so the c-parts are exactly the
    // coefficient vectors landing in the ambient relation lattice.
    let stacked = if rel.rows > 0 { gens.vstack(&rel) } else { gens.clone() };
    let full = left_kernel(&stacked);
    let rel_among = ZMatrix::from_fn(full.rows, k, |r, c| full.get(r, c).clone());
    let red = reduce_presentation(k, &rel_among);
    let incl_mat = gens.transpose().mul(&red.lift);
    let incl = ZHom::new(red.group.clone(), amb.clone(), incl_mat)
        .expect("subgroup inclusion is a hom");
    SubObject {
        amb: amb.clone(),
        group: red.group,
        incl,
        gens,
        proj_gens: red.proj,
    }
}

/// Quotient of `amb` by the subgroup generated by the given rows.
pub struct QuotObject {
    pub amb: FgAbGroup,
    pub group: FgAbGroup,
    pub proj: ZHom,
    /// Section of `proj` at the coordinate level: `proj.matrix() * lift = id`.
    pub lift: ZMatrix,
}

pub fn quotient_by_rows(amb: &FgAbGroup, rows: &ZMatrix) -> QuotObject {
    assert_eq!(rows.cols, amb.num_coords(), "quotient rows in wrong ambient dimension");
    let rel = amb.relation_rows();
    let all = if rel.rows > 0 { rows.vstack(&rel) } else { rows.clone() };
    let red = reduce_presentation(amb.num_coords(), &all);
    let proj = ZHom::new(amb.clone(), red.group.clone(), red.proj)
        .expect("quotient projection is a hom");
    QuotObject { amb: amb.clone(), group: red.group, proj, lift: red.lift }
}

/// Kernel of a hom, as a subgroup of its source.
pub fn kernel_subobject(h: &ZHom) -> SubObject {
    let rel_dst = h.dst.relation_rows().transpose();
    let lhs = if rel_dst.cols > 0 { h.matrix().hstack(&rel_dst) } else { h.matrix().clone() };
    let ker = kernel(&lhs);
    let rows = ZMatrix::from_fn(ker.rows, h.src.num_coords(), |r, c| ker.get(r, c).clone());
    subgroup_from_rows(&h.src, &rows)
}

/// Image of a hom, as a subgroup of its target.
pub fn image_subobject(h: &ZHom) -> SubObject {
    subgroup_from_rows(&h.dst, &h.matrix().transpose())
}

/* # spec-level operations */

/// Cokernel of `m : Z^cols -> Z^rows`.
pub fn cokernel(m: &ZMatrix) -> FgAbGroup {
    quotient_by_rows(&FgAbGroup::free(m.rows), &m.transpose()).group
}

/// `(<sub rows> + R) / R` inside `(<bigger rows> + R) / R` for the free ambient
/// group `Z^cols`: the quotient `bigger / sub`, after checking containment.
pub fn subquotient(sub: &ZMatrix, bigger: &ZMatrix) -> Result<FgAbGroup, ZmodError> {
    if sub.cols != bigger.cols {
        return Err(ZmodError::Dimension(format!(
            "subquotient ambient mismatch: {} vs {}",
            sub.cols, bigger.cols
        )));
    }
    let sol = match row_span_solve(bigger, sub) {
        Some(s) => s,
        None => {
            let row = (0..sub.rows)
                .find(|&r| {
                    let one = ZMatrix::from_fn(1, sub.cols, |_, c| sub.get(r, c).clone());
                    row_span_solve(bigger, &one).is_none()
                })
                .unwrap_or(0);
            return Err(ZmodError::ContainmentViolation { row });
        }
    };
    let among = left_kernel(bigger);
    let rel = sol.vstack(&among);
    Ok(reduce_presentation(bigger.rows, &rel).group)
}

/// Random unimodular matrix: a product of elementary operations with small
/// coefficients.
pub fn random_unimodular(n: usize, rng: &mut impl Rng) -> ZMatrix {
    let mut m = ZMatrix::identity(n);
    if n == 0 {
        return m;
    }
    for _ in 0..3 * n + 2 {
        let op = rng.gen_range(0..3);
        match op {
            0 => {
                let r = rng.gen_range(0..n);
                let s = rng.gen_range(0..n);
                if r != s {
                    let k = bi(rng.gen_range(-2..=2i64));
                    for c in 0..n {
                        let v = m.get(r, c) + &k * m.get(s, c);
                        m.set(r, c, v);
                    }
                }
            }
            1 => {
                let r = rng.gen_range(0..n);
                let s = rng.gen_range(0..n);
                if r != s {
                    for c in 0..n {
                        let x = m.get(r, c).clone();
                        let y = m.get(s, c).clone();
                        m.set(r, c, y);
                        m.set(s, c, x);
                    }
                }
            }
            _ => {
                let r = rng.gen_range(0..n);
                for c in 0..n {
                    let v = -m.get(r, c);
                    m.set(r, c, v);
                }
            }
        }
    }
    m
}

trait RemEuclid {
    fn rem_euclid(&self, d: &Int) -> Int;
    fn div_euclid(&self, d: &Int) -> Int;
}

impl RemEuclid for Int {
    fn rem_euclid(&self, d: &Int) -> Int {
        let r = self % d;
        if r.is_negative() { r + d.abs() } else { r }
    }

    fn div_euclid(&self, d: &Int) -> Int {
        let r = RemEuclid::rem_euclid(self, d);
        (self - r) / d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_transforms_multiply_back() {
        let m = ZMatrix::from_i64_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.u.mul(&m).mul(&s.v), s.d);
        assert!(s.u.is_unimodular());
        assert!(s.v.is_unimodular());
        assert_eq!(s.u.mul(&s.u_inv), ZMatrix::identity(3));
        assert_eq!(s.v.mul(&s.v_inv), ZMatrix::identity(3));
    }

    #[test]
    fn snf_divisibility_chain() {
        let m = ZMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.diagonal(), vec![bi(1), bi(6)]);
    }

    #[test]
    fn hermite_solves_membership() {
        let b = ZMatrix::from_i64_rows(&[vec![2, 0, 1], vec![0, 3, 1]]);
        let t = ZMatrix::from_i64_rows(&[vec![2, 3, 2], vec![4, -3, 1]]);
        let x = row_span_solve(&b, &t).unwrap();
        assert_eq!(x.mul(&b), t);
        let bad = ZMatrix::from_i64_rows(&[vec![1, 0, 0]]);
        assert!(row_span_solve(&b, &bad).is_none());
    }

    #[test]
    fn kernel_annihilates() {
        let m = ZMatrix::from_i64_rows(&[vec![1, 1, 1], vec![0, 2, 2]]);
        let k = kernel(&m);
        assert_eq!(k.rows, 1);
        assert!(m.mul(&k.transpose()).is_zero());
    }

    #[test]
    fn reduce_presentation_maps_compose_to_identity() {
        let rel = ZMatrix::from_i64_rows(&[vec![2, 0, 0], vec![0, 0, 4], vec![2, 0, 4]]);
        let red = reduce_presentation(3, &rel);
        assert_eq!(red.proj.mul(&red.lift), ZMatrix::identity(red.group.num_coords()));
        assert_eq!(red.group.invariant_factors(), (1, vec![bi(2), bi(4)]));
    }

    #[test]
    fn hom_inverse_certificate() {
        let g = FgAbGroup::new(1, vec![bi(4)]);
        let m = ZMatrix::from_i64_rows(&[vec![1, 0], vec![1, 1]]);
        let h = ZHom::new(g.clone(), g.clone(), m).unwrap();
        let inv = h.inverse().expect("unipotent map is invertible");
        assert!(inv.compose(&h).eq(&ZHom::identity(&g)));
    }

    #[test]
    fn subgroup_expression_roundtrip() {
        let g = FgAbGroup::free(3);
        let rows = ZMatrix::from_i64_rows(&[vec![2, 0, 0], vec![0, 3, 0]]);
        let sub = subgroup_from_rows(&g, &rows);
        assert_eq!(sub.group.invariant_factors(), (2, vec![]));
        let h = ZHom::new(
            FgAbGroup::free(1),
            g.clone(),
            ZMatrix::from_i64_rows(&[vec![4], vec![3], vec![0]]),
        )
        .unwrap();
        let e = sub.express(&h).unwrap();
        assert!(sub.incl.compose(&e).eq(&h));
    }
}
