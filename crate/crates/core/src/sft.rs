//! Subshifts of finite type given by 0/1 transition matrices.
//!
//! Everything here is exact: reachability and primitivity use boolean matrix
//! products on bit rows, periodic-point counts use checked `u128` arithmetic.
//! The only floating-point routine is the Perron data behind the entropy.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{gcd, Digraph};
use crate::word::{canonical_rotation, primitive_period, Word};

pub const MAX_SYMBOLS: usize = 64;

/// Essential 0/1 transition matrix with at most [`MAX_SYMBOLS`] symbols.
///
/// Row `i` is stored as a bit mask of the symbols that may follow `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct TransitionMatrix {
    size: usize,
    rows: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawMatrix {
    size: usize,
    rows: Vec<Vec<u8>>,
}

impl TryFrom<RawMatrix> for TransitionMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        if raw.rows.len() != raw.size {
            return Err(Error::InvalidInput(format!(
                "size is {} but {} rows were given",
                raw.size,
                raw.rows.len()
            )));
        }
        TransitionMatrix::from_rows(&raw.rows)
    }
}

impl From<TransitionMatrix> for RawMatrix {
    fn from(a: TransitionMatrix) -> Self {
        RawMatrix {
            size: a.size,
            rows: a.to_rows(),
        }
    }
}

/// Fixed points of the shift of a given length, up to rotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicCycle {
    /// Canonical (least) rotation of the cyclic word; its length is `period`.
    pub states: Word,
    pub period: usize,
    pub primitive_period: usize,
}

impl SymbolicCycle {
    pub fn from_word(w: &[u8]) -> Self {
        SymbolicCycle {
            states: Word(canonical_rotation(w)),
            period: w.len(),
            primitive_period: primitive_period(w),
        }
    }

    /// The repeating block of length `primitive_period`.
    pub fn primitive_word(&self) -> Word {
        Word(self.states.0[..self.primitive_period].to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleList {
    pub cycles: Vec<SymbolicCycle>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicDecomposition {
    pub l: usize,
    pub classes: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronData {
    pub root: f64,
    /// Right eigenvector, normalized to sum 1.
    pub right: Vec<f64>,
    /// Left eigenvector, normalized so that `left . right = 1`.
    pub left: Vec<f64>,
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

impl TransitionMatrix {
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::InvalidInput("empty transition matrix".into()));
        }
        if size > MAX_SYMBOLS {
            return Err(Error::InvalidInput(format!(
                "{size} symbols exceeds the limit of {MAX_SYMBOLS}"
            )));
        }
        let mut masks = Vec::with_capacity(size);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != size {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            let mut mask = 0u64;
            for (j, &e) in row.iter().enumerate() {
                match e {
                    0 => {}
                    1 => mask |= 1 << j,
                    other => {
                        return Err(Error::InvalidInput(format!(
                            "entry ({i},{j}) is {other}, expected 0 or 1"
                        )))
                    }
                }
            }
            masks.push(mask);
        }
        Self::from_masks(size, masks)
    }

    pub fn from_masks(size: usize, rows: Vec<u64>) -> Result<Self> {
        if size == 0 || size > MAX_SYMBOLS || rows.len() != size {
            return Err(Error::InvalidInput(format!("bad matrix dimensions {size}")));
        }
        let full = if size == 64 { u64::MAX } else { (1u64 << size) - 1 };
        if rows.iter().any(|r| r & !full != 0) {
            return Err(Error::InvalidInput("entry outside the matrix".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if *r == 0 {
                return Err(Error::NotEssential {
                    symbol: i,
                    missing: "successor",
                });
            }
        }
        let cols = rows.iter().fold(0u64, |acc, r| acc | r);
        if cols != full {
            let missing = (!cols & full).trailing_zeros() as usize;
            return Err(Error::NotEssential {
                symbol: missing,
                missing: "predecessor",
            });
        }
        Ok(TransitionMatrix { size, rows })
    }

    /// Full shift on `k` symbols.
    pub fn full_shift(k: usize) -> Result<Self> {
        let row = vec![1u8; k];
        Self::from_rows(&vec![row; k])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn row_mask(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn allows(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> {
        bits(self.rows[i])
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.allows(i, j) as u8).collect())
            .collect()
    }

    pub fn digraph(&self) -> Digraph {
        Digraph::from_successors((0..self.size).map(|i| self.successors(i).collect()).collect())
    }

    /// Restriction to `symbols` (renumbered in the given order).
    pub fn restrict(&self, symbols: &[usize]) -> Result<Self> {
        let rows: Vec<Vec<u8>> = symbols
            .iter()
            .map(|&i| symbols.iter().map(|&j| self.allows(i, j) as u8).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn is_admissible(&self, w: &[u8]) -> bool {
        w.iter().all(|&s| (s as usize) < self.size) && w.windows(2).all(|p| self.allows(p[0] as usize, p[1] as usize))
    }

    pub fn is_cyclically_admissible(&self, w: &[u8]) -> bool {
        !w.is_empty() && self.is_admissible(w) && self.allows(w[w.len() - 1] as usize, w[0] as usize)
    }

    fn bool_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().map(|&row| bits(row).fold(0u64, |acc, k| acc | b[k])).collect()
    }

    /// Bit rows of the boolean power `A^k`, `k >= 1`.
    pub fn bool_power(&self, k: usize) -> Vec<u64> {
        let mut p = self.rows.clone();
        for _ in 1..k {
            p = self.bool_mul(&p, &self.rows);
        }
        p
    }

    fn full_mask(&self) -> u64 {
        if self.size == 64 {
            u64::MAX
        } else {
            (1u64 << self.size) - 1
        }
    }

    /// Every `(i, j)` has a positive entry in some power `A^k`, `1 <= k <= size`.
    pub fn is_irreducible(&self) -> bool {
        let full = self.full_mask();
        let mut power = self.rows.clone();
        let mut seen = power.clone();
        for _ in 1..self.size {
            power = self.bool_mul(&power, &self.rows);
            for (s, p) in seen.iter_mut().zip(&power) {
                *s |= p;
            }
        }
        seen.iter().all(|&r| r == full)
    }

    /// Some power `A^k` with `k <= (size-1)^2 + 1` is entrywise positive.
    pub fn is_primitive(&self) -> bool {
        let full = self.full_mask();
        let bound = (self.size - 1) * (self.size - 1) + 1;
        let mut power = self.rows.clone();
        for k in 1..=bound {
            if power.iter().all(|&r| r == full) {
                return true;
            }
            if k < bound {
                power = self.bool_mul(&power, &self.rows);
            }
        }
        false
    }

    /// Breadth-first levels from symbol 0.
    fn levels(&self) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.size];
        level[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for v in self.successors(u) {
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    }

    /// gcd of the lengths of cycles through symbol 0.
    pub fn class_period(&self) -> Result<usize> {
        if !self.is_irreducible() {
            return Err(Error::Reducible);
        }
        let level = self.levels();
        let mut g = 0;
        for u in 0..self.size {
            for v in self.successors(u) {
                let diff = (level[u] + 1).abs_diff(level[v]);
                g = gcd(g, diff);
            }
        }
        Ok(g)
    }

    pub fn cyclic_decomposition(&self) -> Result<CyclicDecomposition> {
        let l = self.class_period()?;
        let level = self.levels();
        let mut classes = vec![Vec::new(); l];
        for (i, &lv) in level.iter().enumerate() {
            classes[lv % l].push(i);
        }
        Ok(CyclicDecomposition { l, classes })
    }

    /// Class index of every symbol in the cyclic decomposition.
    pub fn class_of(&self) -> Result<(usize, Vec<usize>)> {
        let l = self.class_period()?;
        Ok((l, self.levels().into_iter().map(|lv| lv % l).collect()))
    }

    fn int_matrix(&self) -> Vec<Vec<u128>> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.allows(i, j) as u128).collect())
            .collect()
    }

    /// Number of points of period dividing `n`: `trace(A^n)`, exact.
    pub fn count_periodic_points(&self, n: usize) -> Result<u128> {
        if n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        let mut p = self.int_matrix();
        for _ in 1..n {
            let mut next = vec![vec![0u128; self.size]; self.size];
            for i in 0..self.size {
                for k in 0..self.size {
                    if p[i][k] == 0 {
                        continue;
                    }
                    for j in self.successors(k) {
                        next[i][j] = next[i][j].checked_add(p[i][k]).ok_or(Error::Overflow("matrix power"))?;
                    }
                }
            }
            p = next;
        }
        (0..self.size).try_fold(0u128, |acc, i| acc.checked_add(p[i][i]).ok_or(Error::Overflow("trace")))
    }

    /// All admissible cyclic words of length `n`, one per rotation class, in
    /// lexicographic order of their canonical rotations.
    ///
    /// Necklaces are generated by the Fredricksen–Kessler–Maiorana recursion,
    /// pruned by admissibility and by exact-length reachability back to the
    /// first symbol.
    pub fn enumerate_cycles(&self, n: usize, limit: usize) -> Result<CycleList> {
        if n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        let g = self.digraph();
        let mut gen = NecklaceGen {
            a: self,
            n,
            limit,
            word: vec![0u8; n + 1],
            back: Vec::new(),
            out: Vec::new(),
            truncated: false,
        };
        for first in 0..self.size {
            gen.back = g.layers_to(first, n);
            if !gen.back[n][first] {
                continue;
            }
            gen.word[1] = first as u8;
            gen.descend(2, 1);
            if gen.truncated {
                break;
            }
        }
        Ok(CycleList {
            cycles: gen.out,
            truncated: gen.truncated,
        })
    }

    /// Perron root and eigenvectors by power iteration on `A + I`, stopped by
    /// Collatz–Wielandt bounds at relative width `1e-13`.
    pub fn perron(&self) -> Result<PerronData> {
        if !self.is_irreducible() {
            return Err(Error::Reducible);
        }
        let right = self.perron_vector(false)?;
        let left = self.perron_vector(true)?;
        let root = right.0;
        let dot: f64 = left.1.iter().zip(&right.1).map(|(a, b)| a * b).sum();
        Ok(PerronData {
            root,
            right: right.1,
            left: left.1.iter().map(|x| x / dot).collect(),
        })
    }

    fn perron_vector(&self, transpose: bool) -> Result<(f64, Vec<f64>)> {
        const MAX_ITER: usize = 2_000_000;
        const REL_TOL: f64 = 1e-13;
        let n = self.size;
        let mut x = vec![1.0 / n as f64; n];
        let mut y = vec![0.0; n];
        let mut width = f64::INFINITY;
        for _ in 0..MAX_ITER {
            // y = (A + I) x  (or its transpose)
            y.copy_from_slice(&x);
            for i in 0..n {
                for j in self.successors(i) {
                    if transpose {
                        y[j] += x[i];
                    } else {
                        y[i] += x[j];
                    }
                }
            }
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for i in 0..n {
                let r = y[i] / x[i];
                lo = lo.min(r);
                hi = hi.max(r);
            }
            let s: f64 = y.iter().sum();
            for i in 0..n {
                x[i] = y[i] / s;
            }
            width = (hi - lo) / hi;
            if width <= REL_TOL {
                return Ok((0.5 * (lo + hi) - 1.0, x));
            }
        }
        Err(Error::NonConvergence {
            what: "Perron power iteration",
            iterations: MAX_ITER,
            last_residual: width,
        })
    }

    /// `log` of the Perron root.
    pub fn topological_entropy(&self) -> Result<f64> {
        Ok(self.perron()?.root.ln())
    }

    /// All `n <= horizon` for which some admissible sequence carries `u` at
    /// coordinate 0 and `v` at coordinate `n`.
    pub fn return_time_set(&self, u: &[u8], v: &[u8], horizon: usize) -> Result<BTreeSet<usize>> {
        if u.is_empty() || v.is_empty() {
            return Err(Error::InvalidInput("cylinder words must be non-empty".into()));
        }
        for w in [u, v] {
            if !self.is_admissible(w) {
                return Err(Error::NotAdmissible(w.to_vec()));
            }
        }
        let mut out = BTreeSet::new();
        for n in 0..u.len().min(horizon + 1) {
            // overlap: u[n..] and v must agree where both are defined
            let overlap = (u.len() - n).min(v.len());
            if u[n..n + overlap] == v[..overlap] {
                out.insert(n);
            }
        }
        // reach = symbols reachable in exactly (n - |u| + 1) steps from u's last symbol
        let last = *u.last().unwrap() as usize;
        let mut reach = self.rows[last];
        for n in u.len()..=horizon {
            if reach >> v[0] & 1 == 1 {
                out.insert(n);
            }
            reach = bits(reach).fold(0u64, |acc, k| acc | self.rows[k]);
        }
        Ok(out)
    }
}

struct NecklaceGen<'a> {
    a: &'a TransitionMatrix,
    n: usize,
    limit: usize,
    /// 1-indexed prenecklace under construction.
    word: Vec<u8>,
    /// `back[t][s]`: a walk of exactly `t` steps from `s` to the first symbol.
    back: Vec<Vec<bool>>,
    out: Vec<SymbolicCycle>,
    truncated: bool,
}

impl NecklaceGen<'_> {
    fn descend(&mut self, t: usize, p: usize) {
        if self.truncated {
            return;
        }
        let n = self.n;
        if t > n {
            if n.is_multiple_of(p) {
                if self.out.len() == self.limit {
                    self.truncated = true;
                    return;
                }
                self.out.push(SymbolicCycle::from_word(&self.word[1..]));
            }
            return;
        }
        let prev = self.word[t - 1] as usize;
        let lowest = self.word[t - p] as usize;
        for j in self.a.successors(prev).filter(|&j| j >= lowest) {
            if !self.back[n + 1 - t][j] {
                continue;
            }
            self.word[t] = j as u8;
            self.descend(t + 1, if j == lowest { p } else { t });
            if self.truncated {
                return;
            }
        }
    }
}
