//! Large periods property for subshifts of finite type.
//!
//! An orbit is `epsilon`-dense exactly when its cyclic word contains every
//! admissible word of length `m` (see [`crate::metric`]). Witnesses are closed
//! walks visiting every vertex of the `m`-block graph: a covering walk is
//! padded to the requested length with closed walks whose lengths generate a
//! numerical semigroup. Lengths the construction cannot reach fall back to a
//! budgeted exhaustive search.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{gcd, Digraph};
use crate::metric::word_length_for;
use crate::sft::{SymbolicCycle, TransitionMatrix};
use crate::word::{canonical_rotation, contains_cyclic_factor, primitive_period, Word};

/// Upper bound on the number of admissible `m`-words handled.
pub const BLOCK_CAP: usize = 4096;
/// Node budget of the fallback search, per period.
pub const SEARCH_BUDGET: usize = 200_000;
/// Periods evaluated concurrently per batch.
const CHUNK: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LppCertificate {
    pub epsilon: f64,
    pub m: usize,
    #[serde(rename = "N0")]
    pub n0: usize,
    pub n_max: usize,
    /// Canonical rotation of the witness cycle for each period in `[N0, n_max]`.
    pub witnesses: BTreeMap<usize, Word>,
    /// Periods whose witness is a proper power (fixed by `σ^n`, smaller primitive period).
    pub non_primitive: Vec<usize>,
    /// Every period from here on is covered by the splice-and-pad construction.
    pub complete_from: Option<usize>,
}

impl LppCertificate {
    pub fn witness(&self, n: usize) -> Option<SymbolicCycle> {
        self.witnesses.get(&n).map(|w| SymbolicCycle::from_word(&w.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LppRefutation {
    pub epsilon: f64,
    pub blocking_n: usize,
    /// True when the absence of a dense period-`blocking_n` orbit was decided exhaustively.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LppOutcome {
    Certificate(LppCertificate),
    Refutation(LppRefutation),
    /// Failing period found, but the search there ran out of budget.
    Inconclusive(LppRefutation),
}

impl LppOutcome {
    pub fn certificate(&self) -> Option<&LppCertificate> {
        match self {
            LppOutcome::Certificate(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_certificate(&self) -> bool {
        self.certificate().is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeriodStatus {
    Witness(Vec<u8>),
    Absent,
    Unknown,
}

/// All admissible words of length `m`, in lexicographic order.
pub fn admissible_words(a: &TransitionMatrix, m: usize, cap: usize) -> Result<Vec<Vec<u8>>> {
    assert!(m >= 1);
    let mut out: Vec<Vec<u8>> = (0..a.size() as u8).map(|s| vec![s]).collect();
    for _ in 1..m {
        let mut next = Vec::new();
        for w in &out {
            for s in a.successors(*w.last().unwrap() as usize) {
                if next.len() == cap {
                    return Err(Error::CapExceeded(format!(
                        "more than {cap} admissible words of length {m}"
                    )));
                }
                let mut e = w.clone();
                e.push(s as u8);
                next.push(e);
            }
        }
        out = next;
    }
    if out.len() > cap {
        return Err(Error::CapExceeded(format!(
            "more than {cap} admissible words of length {m}"
        )));
    }
    Ok(out)
}

/// The `m`-block presentation: vertices are admissible `m`-words.
#[derive(Debug, Clone)]
pub struct BlockGraph {
    pub m: usize,
    pub words: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    pub graph: Digraph,
}

impl BlockGraph {
    pub fn new(a: &TransitionMatrix, m: usize) -> Result<Self> {
        let words = admissible_words(a, m, BLOCK_CAP)?;
        let index: HashMap<Vec<u8>, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let succ = words
            .iter()
            .map(|w| {
                a.successors(*w.last().unwrap() as usize)
                    .map(|s| {
                        let mut e = w[1..].to_vec();
                        e.push(s as u8);
                        index[&e]
                    })
                    .collect()
            })
            .collect();
        Ok(BlockGraph {
            m,
            words,
            index,
            graph: Digraph::from_successors(succ),
        })
    }

    pub fn vertex(&self, w: &[u8]) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Cyclic word read off a closed walk given without its repeated endpoint.
    pub fn word_of_walk(&self, walk: &[usize]) -> Vec<u8> {
        walk.iter().map(|&v| self.words[v][0]).collect()
    }

    /// Vertices visited by the periodic sequence `w^∞`, one per position.
    pub fn walk_of_cycle(&self, w: &[u8]) -> Vec<usize> {
        let n = w.len();
        (0..n)
            .map(|i| {
                let block: Vec<u8> = (0..self.m).map(|k| w[(i + k) % n]).collect();
                self.index[&block]
            })
            .collect()
    }
}

/// Greedy closed walk through every vertex of a strongly connected graph,
/// returned without its repeated endpoint.
fn covering_walk(g: &Digraph) -> Vec<usize> {
    let mut visited = vec![false; g.len()];
    visited[0] = true;
    let mut walk = vec![0usize];
    let mut left = g.len() - 1;
    let mut cur = 0;
    while left > 0 {
        let path = g.shortest_path_to(cur, |v| !visited[v]).expect("strongly connected");
        for &v in &path[1..] {
            if !visited[v] {
                visited[v] = true;
                left -= 1;
            }
            walk.push(v);
        }
        cur = *walk.last().unwrap();
    }
    let back = g.shortest_path_to(cur, |v| v == 0).expect("strongly connected");
    walk.extend_from_slice(&back[1..back.len() - 1]);
    walk
}

/// Splice-and-pad witness builder plus search fallback for one matrix and word length.
pub struct WitnessSearch<'a> {
    a: &'a TransitionMatrix,
    pub blocks: BlockGraph,
    connected: bool,
    cover: Vec<usize>,
    /// Pad generators: cycle length, host vertex, and the closed walk (without endpoint).
    pads: Vec<(usize, usize, Vec<usize>)>,
    /// Cycle lengths of `A` up to `n_max` (closed walks of the block graph).
    has_cycle: Vec<bool>,
    /// `pad_choice[d]` = generator index used last in a representation of `d`.
    pad_choice: Vec<Option<usize>>,
}

impl<'a> WitnessSearch<'a> {
    pub fn new(a: &'a TransitionMatrix, m: usize, n_max: usize) -> Result<Self> {
        let blocks = BlockGraph::new(a, m)?;
        let connected = blocks.graph.is_strongly_connected();
        let mut has_cycle = vec![false; n_max + 1];
        let mut power = a.bool_power(1);
        for (k, slot) in has_cycle.iter_mut().enumerate().skip(1) {
            if k > 1 {
                power = (0..a.size())
                    .map(|i| a.successors(i).fold(0u64, |acc, j| acc | power[j]))
                    .collect();
            }
            *slot = (0..a.size()).any(|i| power[i] >> i & 1 == 1);
        }
        let mut cover = Vec::new();
        let mut pads = Vec::new();
        let mut pad_choice = Vec::new();
        if connected {
            cover = covering_walk(&blocks.graph);
            let g = a.digraph();
            for k in 1..=a.size().min(n_max) {
                if !has_cycle[k] {
                    continue;
                }
                let walk = (0..a.size()).find_map(|s| g.closed_walk(s, k)).expect("cycle exists");
                let w: Vec<u8> = walk[..k].iter().map(|&s| s as u8).collect();
                let bw = blocks.walk_of_cycle(&w);
                pads.push((k, bw[0], bw));
            }
            let span = n_max.saturating_sub(cover.len());
            pad_choice = vec![None; span + 1];
            for d in 0..=span {
                if d == 0 {
                    pad_choice[0] = Some(usize::MAX);
                    continue;
                }
                pad_choice[d] = pads
                    .iter()
                    .enumerate()
                    .rev()
                    .find(|(_, (k, _, _))| *k <= d && pad_choice[d - k].is_some())
                    .map(|(i, _)| i);
            }
        }
        Ok(WitnessSearch {
            a,
            blocks,
            connected,
            cover,
            pads,
            has_cycle,
            pad_choice,
        })
    }

    /// Length of the covering walk, when the block graph is strongly connected.
    pub fn cover_len(&self) -> Option<usize> {
        self.connected.then_some(self.cover.len())
    }

    /// First length from which every larger length is reachable by padding.
    pub fn complete_from(&self) -> Option<usize> {
        if !self.connected {
            return None;
        }
        let g = self.pads.iter().fold(0, |acc, p| gcd(acc, p.0));
        if g != 1 {
            return None;
        }
        let max_pad = self.pads.iter().map(|p| p.0).max()?;
        // a run of `max_pad` consecutive representable values closes the semigroup
        let mut run = 0;
        for (d, c) in self.pad_choice.iter().enumerate() {
            if c.is_some() {
                run += 1;
                if run == max_pad {
                    return Some(self.cover.len() + d + 1 - max_pad);
                }
            } else {
                run = 0;
            }
        }
        None
    }

    fn construct(&self, n: usize) -> Option<Vec<u8>> {
        let c = self.cover.len();
        if n < c {
            return None;
        }
        let mut d = n - c;
        self.pad_choice.get(d)?.as_ref()?;
        let mut counts = vec![0usize; self.pads.len()];
        while d > 0 {
            let i = self.pad_choice[d].unwrap();
            counts[i] += 1;
            d -= self.pads[i].0;
        }
        let mut walk = Vec::with_capacity(n);
        let mut inserted = vec![false; self.pads.len()];
        for &v in &self.cover {
            walk.push(v);
            for (i, (_, host, pad)) in self.pads.iter().enumerate() {
                if *host == v && !inserted[i] {
                    inserted[i] = true;
                    for _ in 0..counts[i] {
                        // pad starts at host; rotate so the host stays in front
                        walk.extend_from_slice(&pad[1..]);
                        walk.push(v);
                    }
                }
            }
        }
        debug_assert!(inserted.iter().all(|&b| b));
        debug_assert_eq!(walk.len(), n);
        Some(self.blocks.word_of_walk(&walk))
    }

    /// Exhaustive search for a closed walk of length `n` through every vertex.
    fn search(&self, n: usize, budget: usize) -> PeriodStatus {
        let g = &self.blocks.graph;
        let layers = g.layers_to(0, n);
        if !layers[n][0] {
            return PeriodStatus::Absent;
        }
        let mut visits = vec![0usize; g.len()];
        visits[0] = 1;
        let mut unvisited = g.len() - 1;
        let mut walk = vec![0usize];
        // next successor index to try at each depth
        let mut stack = vec![0usize];
        let mut nodes = 0usize;
        loop {
            let depth = walk.len();
            let cur = *walk.last().unwrap();
            if depth == n && unvisited == 0 && g.has_edge(cur, 0) {
                return PeriodStatus::Witness(self.blocks.word_of_walk(&walk));
            }
            let next = if depth < n {
                let rem = n - depth;
                let from = *stack.last().unwrap();
                g.successors(cur)
                    .iter()
                    .enumerate()
                    .skip(from)
                    .find(|(_, &v)| layers[rem][v] && (unvisited - (visits[v] == 0) as usize) < rem)
                    .map(|(i, &v)| (i, v))
            } else {
                None
            };
            match next {
                Some((i, v)) => {
                    nodes += 1;
                    if nodes > budget {
                        return PeriodStatus::Unknown;
                    }
                    *stack.last_mut().unwrap() = i + 1;
                    if visits[v] == 0 {
                        unvisited -= 1;
                    }
                    visits[v] += 1;
                    walk.push(v);
                    stack.push(0);
                }
                None => {
                    stack.pop();
                    let v = walk.pop().unwrap();
                    if stack.is_empty() {
                        return PeriodStatus::Absent;
                    }
                    visits[v] -= 1;
                    if visits[v] == 0 {
                        unvisited += 1;
                    }
                }
            }
        }
    }

    /// Decide whether period `n` admits a cycle containing every admissible `m`-word.
    pub fn status(&self, n: usize, budget: usize) -> PeriodStatus {
        if n == 0 || n < self.blocks.words.len() || !self.connected {
            return PeriodStatus::Absent;
        }
        if n < self.has_cycle.len() && !self.has_cycle[n] {
            return PeriodStatus::Absent;
        }
        if let Some(w) = self.construct(n) {
            return PeriodStatus::Witness(w);
        }
        self.search(n, budget)
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        self.a
    }
}

fn validate_n_max(n_max: usize) -> Result<()> {
    if n_max < 2 {
        return Err(Error::InvalidInput("n_max must be at least 2".into()));
    }
    Ok(())
}

/// Certify the large periods property at scale `epsilon` up to period `n_max`,
/// or refute it at a blocking period.
pub fn lpp_certificate(a: &TransitionMatrix, epsilon: f64, n_max: usize) -> Result<LppOutcome> {
    validate_n_max(n_max)?;
    let m = word_length_for(epsilon)?;
    let search = WitnessSearch::new(a, m, n_max)?;
    let eval =
        |ns: &[usize]| -> Vec<PeriodStatus> { ns.par_iter().map(|&n| search.status(n, SEARCH_BUDGET)).collect() };

    if a.is_primitive() {
        // walk down from n_max until the first period without a witness
        let mut found: BTreeMap<usize, Vec<u8>> = BTreeMap::new();
        let mut hi = n_max;
        'down: while hi >= 1 {
            let lo = hi.saturating_sub(CHUNK - 1).max(1);
            let ns: Vec<usize> = (lo..=hi).rev().collect();
            for (n, st) in ns.iter().zip(eval(&ns)) {
                match st {
                    PeriodStatus::Witness(w) => {
                        found.insert(*n, w);
                    }
                    _ => break 'down,
                }
            }
            hi = lo - 1;
        }
        let Some((&n0, _)) = found.iter().next() else {
            return Err(Error::HorizonTooSmall(format!(
                "no dense cycle of period {n_max}; the construction covers every period from {}",
                search
                    .complete_from()
                    .map_or("an unknown point".to_string(), |c| c.to_string())
            )));
        };
        let non_primitive = found
            .iter()
            .filter(|(n, w)| primitive_period(w) < **n)
            .map(|(n, _)| *n)
            .collect();
        let witnesses = found
            .into_iter()
            .map(|(n, w)| (n, Word(canonical_rotation(&w))))
            .collect();
        return Ok(LppOutcome::Certificate(LppCertificate {
            epsilon,
            m,
            n0,
            n_max,
            witnesses,
            non_primitive,
            complete_from: search.complete_from(),
        }));
    }

    // first failure after the first success, or the first failure outright
    let refute = |n: usize, st: &PeriodStatus| {
        let r = LppRefutation {
            epsilon,
            blocking_n: n,
            exhaustive: *st == PeriodStatus::Absent,
        };
        if r.exhaustive {
            LppOutcome::Refutation(r)
        } else {
            LppOutcome::Inconclusive(r)
        }
    };
    let mut seen_success = false;
    let mut first_failure: Option<(usize, PeriodStatus)> = None;
    let mut lo = 1;
    while lo <= n_max {
        let hi = (lo + CHUNK - 1).min(n_max);
        let ns: Vec<usize> = (lo..=hi).collect();
        for (&n, st) in ns.iter().zip(eval(&ns)) {
            match st {
                PeriodStatus::Witness(_) => seen_success = true,
                st if seen_success => return Ok(refute(n, &st)),
                st => {
                    first_failure.get_or_insert((n, st));
                }
            }
        }
        lo = hi + 1;
    }
    match first_failure {
        Some((n, st)) if !seen_success => Ok(refute(n, &st)),
        _ => Err(Error::HorizonTooSmall(format!(
            "matrix is not primitive but every period from the first success up to {n_max} has a dense cycle"
        ))),
    }
}

/// Independent validity check of a certificate against a matrix.
pub fn check_certificate(a: &TransitionMatrix, cert: &LppCertificate) -> Result<()> {
    let words = admissible_words(a, cert.m, BLOCK_CAP)?;
    for n in cert.n0..=cert.n_max {
        let w = cert
            .witnesses
            .get(&n)
            .ok_or_else(|| Error::InvalidInput(format!("certificate has no witness for period {n}")))?;
        if w.len() != n || !a.is_cyclically_admissible(&w.0) {
            return Err(Error::InvalidInput(format!(
                "witness for period {n} is not an admissible cycle of that length"
            )));
        }
        if let Some(miss) = words.iter().find(|u| !contains_cyclic_factor(&w.0, u)) {
            return Err(Error::InvalidInput(format!(
                "witness for period {n} misses the word {}",
                Word(miss.clone())
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub u: Word,
    pub v: Word,
    /// First `n >= 1` with `σ^n(V) ∩ U` nonempty.
    pub n1: usize,
    /// Word with `v` at coordinate 0 and `u` at coordinate `n1`.
    pub connector: Word,
    /// Word length of the certificate actually used.
    pub m_used: usize,
    /// `N(U,V)`: every `n` from here on is covered by a witness.
    pub threshold: usize,
    pub checked_through: usize,
    /// Smallest `N` with every `n` in `[N, n_max]` a direct hitting time.
    pub direct_from: usize,
    pub misses: Vec<usize>,
    /// Periods where the witness argument and direct return-time computation disagree.
    pub cross_check_failures: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub pairs: Vec<PairReport>,
    pub all_hit: bool,
}

/// Admissible word carrying `v` at 0 and `u` at `n1`.
fn connector(a: &TransitionMatrix, v: &[u8], u: &[u8], n1: usize) -> Option<Vec<u8>> {
    let len = v.len().max(n1 + u.len());
    let mut w: Vec<Option<u8>> = vec![None; len];
    for (i, &s) in v.iter().enumerate() {
        w[i] = Some(s);
    }
    for (j, &s) in u.iter().enumerate() {
        match w[n1 + j] {
            Some(t) if t != s => return None,
            _ => w[n1 + j] = Some(s),
        }
    }
    if n1 >= v.len() {
        let gap = n1 - v.len() + 1;
        let g = a.digraph();
        let target = u[0] as usize;
        let layers = g.layers_to(target, gap);
        let mut cur = *v.last().unwrap() as usize;
        if !layers[gap][cur] {
            return None;
        }
        for (pos, slot) in w.iter_mut().enumerate().take(n1).skip(v.len()) {
            let rem = n1 - pos;
            cur = *g.successors(cur).iter().find(|&&x| layers[rem][x])?;
            *slot = Some(cur as u8);
        }
    }
    let out: Vec<u8> = w.into_iter().collect::<Option<_>>()?;
    a.is_admissible(&out).then_some(out)
}

/// Derive mixing for cylinder pairs from a certificate, following the
/// argument that the large periods property implies topological mixing.
pub fn verify_mixing_from_lpp(
    a: &TransitionMatrix,
    cert: &LppCertificate,
    pairs: &[(Word, Word)],
) -> Result<MixingReport> {
    check_certificate(a, cert)?;
    let mut refined: BTreeMap<usize, LppCertificate> = BTreeMap::new();
    let mut reports = Vec::new();
    for (u, v) in pairs {
        if u.len() > cert.m || v.len() > cert.m {
            return Err(Error::Precondition(format!(
                "pair ({u}, {v}) is finer than the certificate word length {}",
                cert.m
            )));
        }
        for w in [u, v] {
            if w.is_empty() || !a.is_admissible(&w.0) {
                return Err(Error::NotAdmissible(w.0.clone()));
            }
        }
        let n1 = a
            .return_time_set(&v.0, &u.0, cert.n_max)?
            .into_iter()
            .find(|&n| n >= 1)
            .ok_or_else(|| Error::HorizonTooSmall(format!("no hitting time for ({u}, {v}) within n_max")))?;
        let w = connector(a, &v.0, &u.0, n1).expect("hitting time has a connecting word");
        let c = if w.len() <= cert.m {
            cert
        } else {
            if let Entry::Vacant(slot) = refined.entry(w.len()) {
                let eps = 0.5f64.powi(w.len() as i32);
                match lpp_certificate(a, eps, cert.n_max)? {
                    LppOutcome::Certificate(c) => {
                        slot.insert(c);
                    }
                    _ => {
                        return Err(Error::Precondition(format!(
                            "no certificate at word length {}",
                            w.len()
                        )))
                    }
                }
            }
            &refined[&w.len()]
        };
        let threshold = c.n0.saturating_sub(n1).max(1);
        let last = cert.n_max.saturating_sub(n1);
        let direct = a.return_time_set(&u.0, &v.0, cert.n_max)?;
        let mut misses = Vec::new();
        let mut cross = Vec::new();
        for n in threshold..=last {
            let hit = c
                .witnesses
                .get(&(n + n1))
                .is_some_and(|p| contains_cyclic_factor(&p.0, &w));
            if !hit {
                misses.push(n);
            }
            if hit != direct.contains(&n) {
                cross.push(n);
            }
        }
        let direct_from = (0..=cert.n_max)
            .rev()
            .take_while(|n| direct.contains(n))
            .last()
            .unwrap_or(cert.n_max + 1)
            .max(1);
        reports.push(PairReport {
            u: u.clone(),
            v: v.clone(),
            n1,
            connector: Word(w),
            m_used: c.m,
            threshold,
            checked_through: last,
            direct_from,
            misses,
            cross_check_failures: cross,
        });
    }
    let all_hit = reports
        .iter()
        .all(|r| r.misses.is_empty() && r.cross_check_failures.is_empty());
    Ok(MixingReport {
        pairs: reports,
        all_hit,
    })
}

/// Large periods property restricted to the irreducible component carrying `p`.
/// Witness symbols are reported in the original alphabet.
pub fn homoclinic_lpp_check(a: &TransitionMatrix, p: &SymbolicCycle, epsilon: f64, n_max: usize) -> Result<LppOutcome> {
    let w = &p.states.0;
    if !a.is_cyclically_admissible(w) {
        return Err(Error::NotAdmissible(w.clone()));
    }
    let component = a.digraph().component_of(w[0] as usize);
    let sub = a.restrict(&component)?;
    let outcome = lpp_certificate(&sub, epsilon, n_max)?;
    Ok(match outcome {
        LppOutcome::Certificate(mut c) => {
            for word in c.witnesses.values_mut() {
                let mapped: Vec<u8> = word.0.iter().map(|&s| component[s as usize] as u8).collect();
                *word = Word(canonical_rotation(&mapped));
            }
            LppOutcome::Certificate(c)
        }
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u8]]) -> TransitionMatrix {
        TransitionMatrix::from_rows(rows).unwrap()
    }

    fn full2() -> TransitionMatrix {
        TransitionMatrix::full_shift(2).unwrap()
    }

    fn golden() -> TransitionMatrix {
        m(&[&[1, 1], &[1, 0]])
    }

    /// Brute force: does some cyclic word of length n contain every m-word?
    fn brute(a: &TransitionMatrix, m_len: usize, n: usize) -> bool {
        let words = admissible_words(a, m_len, 1 << 12).unwrap();
        a.enumerate_cycles(n, usize::MAX)
            .unwrap()
            .cycles
            .iter()
            .any(|c| words.iter().all(|u| contains_cyclic_factor(&c.states.0, u)))
    }

    #[test]
    fn full_shift_certificate() {
        let out = lpp_certificate(&full2(), 0.5, 20).unwrap();
        let c = out.certificate().unwrap();
        assert_eq!(c.n0, 2);
        assert_eq!(c.witnesses[&2].to_string(), "01");
        assert_eq!(c.witnesses.len(), 19);
        check_certificate(&full2(), c).unwrap();
    }

    #[test]
    fn parity_refuted_at_three() {
        let a = m(&[&[0, 1], &[1, 0]]);
        let out = lpp_certificate(&a, 0.5, 20).unwrap();
        assert_eq!(
            out,
            LppOutcome::Refutation(LppRefutation {
                epsilon: 0.5,
                blocking_n: 3,
                exhaustive: true
            })
        );
    }

    #[test]
    fn golden_mean_witnesses_cover_two_words() {
        let a = golden();
        let out = lpp_certificate(&a, 0.25, 30).unwrap();
        let c = out.certificate().unwrap();
        assert_eq!(c.m, 2);
        for w in c.witnesses.values() {
            for u in [[0u8, 0], [0, 1], [1, 0]] {
                assert!(contains_cyclic_factor(&w.0, &u));
            }
        }
        // brute-force oracle for the minimal N0
        let short = lpp_certificate(&a, 0.25, 16).unwrap();
        let oracle = (1..=16).rev().take_while(|&n| brute(&a, 2, n)).last().unwrap();
        assert_eq!(short.certificate().unwrap().n0, oracle);
        assert_eq!(c.n0, oracle);
    }

    #[test]
    fn horizon_too_small_is_an_error() {
        let a = TransitionMatrix::full_shift(3).unwrap();
        // nine 2-words need period >= 9
        assert!(matches!(lpp_certificate(&a, 0.25, 5), Err(Error::HorizonTooSmall(_))));
        assert!(lpp_certificate(&a, 0.25, 1).is_err());
    }

    #[test]
    fn status_agrees_with_brute_force() {
        let a = m(&[&[0, 1, 0], &[0, 0, 1], &[1, 1, 0]]);
        let s = WitnessSearch::new(&a, 2, 16).unwrap();
        for n in 1..=16 {
            let got = s.status(n, SEARCH_BUDGET);
            assert_ne!(got, PeriodStatus::Unknown);
            assert_eq!(matches!(got, PeriodStatus::Witness(_)), brute(&a, 2, n), "n = {n}");
        }
    }

    #[test]
    fn mixing_from_full_shift_certificate() {
        let a = full2();
        let cert = lpp_certificate(&a, 0.5, 20).unwrap();
        let cert = cert.certificate().unwrap();
        let pairs = [(Word(vec![0]), Word(vec![1]))];
        let r = verify_mixing_from_lpp(&a, cert, &pairs).unwrap();
        assert!(r.all_hit);
        assert_eq!(r.pairs[0].direct_from, 1);
        // the connector "10" needs the word-length-2 certificate, N0 = 4
        assert_eq!(r.pairs[0].m_used, 2);
        assert_eq!(r.pairs[0].threshold, 3);
    }

    #[test]
    fn mixing_on_wheel_with_loop() {
        // 0 -> 1 -> 2 -> 0 with a loop at 0
        let a = m(&[&[1, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let out = lpp_certificate(&a, 0.5, 40).unwrap();
        let cert = out.certificate().unwrap();
        let pairs: Vec<(Word, Word)> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (Word(vec![i]), Word(vec![j]))))
            .collect();
        let r = verify_mixing_from_lpp(&a, cert, &pairs).unwrap();
        assert!(r.all_hit);
        // oracle: positivity of A^n for every n >= 5
        let pos = |n: usize| a.bool_power(n).iter().all(|&row| row == 0b111);
        assert!((5..=40).all(pos));
        for p in &r.pairs {
            assert!(p.direct_from <= 5, "{p:?}");
            assert!(p.threshold >= p.direct_from);
        }
    }

    #[test]
    fn certificate_for_other_matrix_is_rejected() {
        let cert = lpp_certificate(&full2(), 0.5, 20).unwrap();
        let parity = m(&[&[0, 1], &[1, 0]]);
        let pairs = [(Word(vec![0]), Word(vec![1]))];
        assert!(verify_mixing_from_lpp(&parity, cert.certificate().unwrap(), &pairs).is_err());
        let fine = [(Word(vec![0, 1]), Word(vec![1]))];
        assert!(matches!(
            verify_mixing_from_lpp(&full2(), cert.certificate().unwrap(), &fine),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn homoclinic_restriction() {
        let a = full2();
        let p = SymbolicCycle::from_word(&[0]);
        assert_eq!(
            homoclinic_lpp_check(&a, &p, 0.5, 20).unwrap(),
            lpp_certificate(&a, 0.5, 20).unwrap()
        );
        let block = m(&[&[1, 1, 0, 0], &[1, 1, 0, 0], &[0, 0, 1, 1], &[0, 0, 1, 1]]);
        let p = SymbolicCycle::from_word(&[2, 3]);
        let out = homoclinic_lpp_check(&block, &p, 0.5, 20).unwrap();
        let c = out.certificate().unwrap();
        assert!(c.witnesses.values().all(|w| w.0.iter().all(|&s| s >= 2)));
        let g = SymbolicCycle::from_word(&[0, 1]);
        assert!(homoclinic_lpp_check(&golden(), &g, 0.5, 20).unwrap().is_certificate());
        let bad = SymbolicCycle::from_word(&[1, 1]);
        assert!(homoclinic_lpp_check(&golden(), &bad, 0.5, 20).is_err());
    }

    #[test]
    fn certificate_json_layout() {
        let out = lpp_certificate(&full2(), 0.5, 4).unwrap();
        let v = serde_json::to_value(out.certificate().unwrap()).unwrap();
        assert_eq!(v["N0"], 2);
        assert_eq!(v["witnesses"]["2"], "01");
        let r = lpp_certificate(&m(&[&[0, 1], &[1, 0]]), 0.5, 4).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["outcome"], "refutation");
        assert_eq!(v["blocking_n"], 3);
    }
}
