//! Invariant measures and their weak-* comparison.
//!
//! Measures are compared through a fixed test family `φ_1, φ_2, …` of
//! observables bounded by 1, with `d(μ, ν) = Σ_j 2^{-j} |∫φ_j dμ − ∫φ_j dν|`.
//! On shift spaces the family is the cylinder indicators `1[u]` at coordinate
//! 0, ordered by length and then lexicographically. On the torus it is the
//! Fourier modes `e^{2πi k·x}`, `0 < |k|_∞ <= K`, ordered by `|k|_∞` and then
//! lexicographically.
//!
//! Markov measures may carry a labelling of their states by symbols. The
//! measure on sequences is then the image of the state chain, which is how the
//! block presentations built by [`bernoulli_approximation`] are pushed back to
//! the original alphabet.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{DynamicalSystem, ShiftSystem, SymPoint, ToralAutomorphism, Vec2};
use crate::sft::{TransitionMatrix, MAX_SYMBOLS};
use crate::shadowing::PeriodicOrbit;
use crate::word::{canonical_rotation, primitive_period, Word};

/// `[re, im]`.
pub type Complex = [f64; 2];

const NORMALIZATION_TOL: f64 = 1e-12;
/// Cycles examined per period before falling back to block constructions.
pub const CYCLE_LIMIT: usize = 1 << 15;
/// Upper bound on the number of observables in a family.
pub const FAMILY_CAP: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    /// Indicator of `x_0 … x_{|u|-1} = u`.
    Cylinder { word: Word },
    /// `e^{2πi k·x}`.
    Mode { k: [i64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFamily {
    Cylinders { alphabet: usize, depth: usize },
    Modes { max_norm: i64 },
}

impl TestFamily {
    pub fn observables(&self) -> Result<Vec<Observable>> {
        match *self {
            TestFamily::Cylinders { alphabet, depth } => {
                if alphabet == 0 || alphabet > MAX_SYMBOLS || depth == 0 {
                    return Err(Error::InvalidInput(
                        "cylinder family needs alphabet and depth >= 1".into(),
                    ));
                }
                let total: f64 = (1..=depth).map(|d| (alphabet as f64).powi(d as i32)).sum();
                if total > FAMILY_CAP as f64 {
                    return Err(Error::CapExceeded(format!("cylinder family has {total} members")));
                }
                let mut out = Vec::new();
                let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
                for _ in 0..depth {
                    layer = layer
                        .iter()
                        .flat_map(|w| {
                            (0..alphabet as u8).map(move |s| {
                                let mut v = w.clone();
                                v.push(s);
                                v
                            })
                        })
                        .collect();
                    out.extend(layer.iter().map(|w| Observable::Cylinder { word: Word(w.clone()) }));
                }
                Ok(out)
            }
            TestFamily::Modes { max_norm } => {
                if max_norm < 1 {
                    return Err(Error::InvalidInput("mode family needs max_norm >= 1".into()));
                }
                let mut out = Vec::new();
                for r in 1..=max_norm {
                    for a in -r..=r {
                        for b in -r..=r {
                            if a.abs().max(b.abs()) == r {
                                out.push(Observable::Mode { k: [a, b] });
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Weight of the `j`-th observable, counting from 0.
    pub fn weight(j: usize) -> f64 {
        0.5f64.powi(j as i32 + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedCycle {
    pub word: Word,
    pub weight: f64,
}

/// A Markov chain on the states of `support`, optionally labelled by symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovMeasure {
    pub support: TransitionMatrix,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    pub pi: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Measure {
    /// Finitely many torus points.
    Atoms {
        points: Vec<Vec2>,
        weights: Vec<f64>,
    },
    /// Convex combination of periodic measures on a shift space.
    Cycles {
        cycles: Vec<WeightedCycle>,
    },
    Markov(MarkovMeasure),
    /// Product measure on the full shift.
    Bernoulli {
        probabilities: Vec<f64>,
    },
    /// Haar measure on the torus.
    Lebesgue,
}

fn check_weights(w: &[f64]) -> Result<()> {
    if w.is_empty() || w.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidInput("weights must be positive".into()));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidInput(format!("weights sum to {s}, not 1")));
    }
    Ok(())
}

impl Measure {
    pub fn atoms(points: Vec<Vec2>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidInput("points and weights differ in length".into()));
        }
        check_weights(&weights)?;
        Ok(Measure::Atoms { points, weights })
    }

    /// The periodic measure of a cyclic word.
    pub fn cycle(word: &[u8]) -> Result<Self> {
        Measure::cycles(vec![(word.to_vec(), 1.0)])
    }

    pub fn cycles(parts: Vec<(Vec<u8>, f64)>) -> Result<Self> {
        if parts.iter().any(|(w, _)| w.is_empty()) {
            return Err(Error::InvalidInput("empty cycle word".into()));
        }
        check_weights(&parts.iter().map(|p| p.1).collect::<Vec<_>>())?;
        Ok(Measure::Cycles {
            cycles: parts
                .into_iter()
                .map(|(w, weight)| WeightedCycle { word: Word(w), weight })
                .collect(),
        })
    }

    pub fn bernoulli(probabilities: Vec<f64>) -> Result<Self> {
        check_weights(&probabilities)?;
        Ok(Measure::Bernoulli { probabilities })
    }

    /// Re-checks the structural invariants, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        match self {
            Measure::Atoms { points, weights } => {
                if points.len() != weights.len() {
                    return Err(Error::InvalidInput("points and weights differ in length".into()));
                }
                check_weights(weights)
            }
            Measure::Cycles { cycles } => {
                if cycles.iter().any(|c| c.word.is_empty()) {
                    return Err(Error::InvalidInput("empty cycle word".into()));
                }
                check_weights(&cycles.iter().map(|c| c.weight).collect::<Vec<_>>())
            }
            Measure::Markov(m) => m.validate(),
            Measure::Bernoulli { probabilities } => check_weights(probabilities),
            Measure::Lebesgue => Ok(()),
        }
    }

    /// Largest mismatch between the atoms and their images: the distance from
    /// `f(x)` to the nearest atom plus the weight difference.
    pub fn invariance_defect<S: DynamicalSystem<Point = Vec2>>(&self, sys: &S) -> Result<f64> {
        let Measure::Atoms { points, weights } = self else {
            return Err(Error::InvalidInput("invariance defect is defined for atoms".into()));
        };
        Ok(points
            .iter()
            .zip(weights)
            .map(|(x, &w)| {
                let fx = sys.evaluate(x);
                points
                    .iter()
                    .zip(weights)
                    .map(|(y, &v)| sys.distance(&fx, y) + (w - v).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max))
    }
}

/// Number of `i in 0..|w|` with `w[i+k mod |w|] = u[k]` for all `k`.
fn cyclic_occurrences(w: &[u8], u: &[u8]) -> usize {
    let n = w.len();
    (0..n)
        .filter(|&i| u.iter().enumerate().all(|(k, &c)| w[(i + k) % n] == c))
        .count()
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

impl MarkovMeasure {
    /// Builds the chain and solves for its stationary vector.
    pub fn new(support: TransitionMatrix, p: Vec<Vec<f64>>, labels: Option<Vec<u8>>) -> Result<Self> {
        let n = support.size();
        let mut m = MarkovMeasure {
            support,
            p,
            pi: vec![0.0; n],
            labels,
        };
        m.check_chain()?;
        // π(P − I) = 0 with the last equation replaced by Σπ = 1
        let mut a = vec![vec![0.0; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = m.p[j][i] - if i == j { 1.0 } else { 0.0 };
            }
        }
        a[n - 1] = vec![1.0; n];
        let mut b = vec![0.0; n];
        b[n - 1] = 1.0;
        m.pi = solve_dense(a, b).ok_or(Error::Reducible)?;
        if m.pi.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::Reducible);
        }
        Ok(m)
    }

    /// Product measure with one-step distribution `probabilities`.
    pub fn bernoulli(probabilities: &[f64]) -> Result<Self> {
        check_weights(probabilities)?;
        let k = probabilities.len();
        Ok(MarkovMeasure {
            support: TransitionMatrix::full_shift(k)?,
            p: vec![probabilities.to_vec(); k],
            pi: probabilities.to_vec(),
            labels: None,
        })
    }

    fn check_chain(&self) -> Result<()> {
        let n = self.support.size();
        if self.p.len() != n || self.p.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("P must be square of the support's size".into()));
        }
        if let Some(l) = &self.labels {
            if l.len() != n {
                return Err(Error::InvalidInput("one label per state required".into()));
            }
        }
        for (i, row) in self.p.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if !(x >= 0.0) || (x > 0.0 && !self.support.allows(i, j)) {
                    return Err(Error::InvalidInput(format!(
                        "P[{i}][{j}] = {x} is incompatible with the support"
                    )));
                }
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::InvalidInput(format!("row {i} of P sums to {s}")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check_chain()?;
        if self.pi.len() != self.support.size() {
            return Err(Error::InvalidInput("pi has the wrong length".into()));
        }
        check_weights(&self.pi)?;
        if self.stationarity_defect() > 1e-9 {
            return Err(Error::InvalidInput("pi is not stationary for P".into()));
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.pi.len()
    }

    pub fn label(&self, s: usize) -> u8 {
        self.labels.as_ref().map_or(s as u8, |l| l[s])
    }

    /// `max_j |(πP)_j − π_j|`.
    pub fn stationarity_defect(&self) -> f64 {
        let n = self.size();
        (0..n)
            .map(|j| ((0..n).map(|i| self.pi[i] * self.p[i][j]).sum::<f64>() - self.pi[j]).abs())
            .fold(0.0, f64::max)
    }

    /// Entropy of the state chain, `−Σ π_i P_ij log P_ij`.
    pub fn entropy(&self) -> f64 {
        let mut h = 0.0;
        for (i, row) in self.p.iter().enumerate() {
            for &x in row {
                if x > 0.0 {
                    h -= self.pi[i] * x * x.ln();
                }
            }
        }
        h
    }

    /// `α_s`: mass of reading `u` on `0..|u|` and sitting in state `s` at time `|u|−1`.
    fn forward(&self, u: &[u8]) -> Vec<f64> {
        let n = self.size();
        let mut v: Vec<f64> = (0..n)
            .map(|s| if self.label(s) == u[0] { self.pi[s] } else { 0.0 })
            .collect();
        for &c in &u[1..] {
            let mut nv = vec![0.0; n];
            for s in 0..n {
                if v[s] != 0.0 {
                    for t in self.support.successors(s) {
                        if self.label(t) == c {
                            nv[t] += v[s] * self.p[s][t];
                        }
                    }
                }
            }
            v = nv;
        }
        v
    }

    /// `β_t`: probability of reading `v` from state `t` onwards.
    fn backward(&self, v: &[u8]) -> Vec<f64> {
        let n = self.size();
        let last = *v.last().unwrap();
        let mut b: Vec<f64> = (0..n).map(|s| (self.label(s) == last) as u8 as f64).collect();
        for &c in v[..v.len() - 1].iter().rev() {
            b = (0..n)
                .map(|s| {
                    if self.label(s) != c {
                        0.0
                    } else {
                        self.support.successors(s).map(|t| self.p[s][t] * b[t]).sum()
                    }
                })
                .collect();
        }
        b
    }

    pub fn cylinder_mass(&self, u: &[u8]) -> f64 {
        if u.is_empty() {
            return 1.0;
        }
        self.forward(u).iter().sum()
    }
}

/// The measure of maximal entropy of a primitive shift: `P_ij = A_ij v_j / (λ v_i)`, `π_i ∝ u_i v_i`.
pub fn parry_measure(a: &TransitionMatrix) -> Result<MarkovMeasure> {
    if !a.is_primitive() {
        return Err(match a.class_period() {
            Ok(period) => Error::NotPrimitive { period },
            Err(e) => e,
        });
    }
    let perron = a.perron()?;
    let (lambda, u, v) = (perron.root, perron.left, perron.right);
    let n = a.size();
    let p: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n)
                .map(|j| if a.allows(i, j) { v[j] / (lambda * v[i]) } else { 0.0 })
                .collect();
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
            row
        })
        .collect();
    let mut pi: Vec<f64> = (0..n).map(|i| u[i] * v[i]).collect();
    let s: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= s);
    Ok(MarkovMeasure {
        support: a.clone(),
        p,
        pi,
        labels: None,
    })
}

fn unsupported(m: &Measure, o: &Observable) -> Error {
    let kind = match m {
        Measure::Atoms { .. } => "atoms",
        Measure::Cycles { .. } => "cycles",
        Measure::Markov(_) => "markov",
        Measure::Bernoulli { .. } => "bernoulli",
        Measure::Lebesgue => "lebesgue",
    };
    Error::InvalidInput(format!("cannot integrate {o:?} against a {kind} measure"))
}

pub fn integrate(measure: &Measure, obs: &Observable) -> Result<Complex> {
    match (measure, obs) {
        (Measure::Atoms { points, weights }, Observable::Mode { k }) => {
            let (mut re, mut im) = (0.0, 0.0);
            for (x, w) in points.iter().zip(weights) {
                let phase = TAU * (k[0] as f64 * x[0] + k[1] as f64 * x[1]);
                re += w * phase.cos();
                im += w * phase.sin();
            }
            Ok([re, im])
        }
        (Measure::Lebesgue, Observable::Mode { k }) => Ok([(*k == [0, 0]) as u8 as f64, 0.0]),
        (Measure::Cycles { cycles }, Observable::Cylinder { word }) => Ok([
            cycles
                .iter()
                .map(|c| c.weight * cyclic_occurrences(&c.word.0, &word.0) as f64 / c.word.len() as f64)
                .sum(),
            0.0,
        ]),
        (Measure::Markov(m), Observable::Cylinder { word }) => Ok([m.cylinder_mass(&word.0), 0.0]),
        (Measure::Bernoulli { probabilities }, Observable::Cylinder { word }) => Ok([
            word.0
                .iter()
                .map(|&s| probabilities.get(s as usize).copied().unwrap_or(0.0))
                .product(),
            0.0,
        ]),
        _ => Err(unsupported(measure, obs)),
    }
}

/// `(∫φ_j dμ)_j` over the family.
pub fn family_vector(measure: &Measure, observables: &[Observable]) -> Result<Vec<Complex>> {
    observables.iter().map(|o| integrate(measure, o)).collect()
}

pub fn vector_distance(a: &[Complex], b: &[Complex]) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(j, (x, y))| TestFamily::weight(j) * (x[0] - y[0]).hypot(x[1] - y[1]))
        .sum()
}

pub fn weak_star_distance(mu: &Measure, nu: &Measure, family: &TestFamily) -> Result<f64> {
    let obs = family.observables()?;
    Ok(vector_distance(&family_vector(mu, &obs)?, &family_vector(nu, &obs)?))
}

/// `∫ 1[u at 0] · 1[v at n] dμ − μ[u] μ[v]`.
pub fn correlation(m: &MarkovMeasure, phi: &[u8], psi: &[u8], n: usize) -> Result<f64> {
    if phi.is_empty() || psi.is_empty() {
        return Err(Error::InvalidInput("cylinder words must be non-empty".into()));
    }
    let (mu_u, mu_v) = (m.cylinder_mass(phi), m.cylinder_mass(psi));
    if n < phi.len() {
        // the windows overlap: merge the two words
        let len = phi.len().max(n + psi.len());
        let mut merged = vec![None; len];
        for (i, &c) in phi.iter().enumerate() {
            merged[i] = Some(c);
        }
        for (i, &c) in psi.iter().enumerate() {
            match merged[n + i] {
                Some(d) if d != c => return Ok(-mu_u * mu_v),
                _ => merged[n + i] = Some(c),
            }
        }
        let w: Vec<u8> = merged.into_iter().map(|c| c.unwrap()).collect();
        return Ok(m.cylinder_mass(&w) - mu_u * mu_v);
    }
    // α (P − 1π)^k β with k = n − |u| + 1 >= 1
    let size = m.size();
    let mut x = m.forward(phi);
    for _ in 0..n - phi.len() + 1 {
        let mass: f64 = x.iter().sum();
        let mut y = vec![0.0; size];
        for s in 0..size {
            if x[s] != 0.0 {
                for t in m.support.successors(s) {
                    y[t] += x[s] * m.p[s][t];
                }
            }
        }
        for t in 0..size {
            y[t] -= mass * m.pi[t];
        }
        x = y;
    }
    let beta = m.backward(psi);
    Ok(x.iter().zip(&beta).map(|(a, b)| a * b).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `exp` of the fitted slope.
    pub rho: f64,
    /// Smallest `C` with `|C_n| <= C ρ^n` on the samples.
    pub constant: f64,
    pub r_squared: f64,
    pub samples: usize,
}

/// Least-squares fit of `log E_n` against `n`, where `E_n = max_{k >= n} |C_k|`
/// is the tail envelope of the samples. The envelope removes the oscillation a
/// complex subdominant eigenvalue puts on `|C_n|` without changing the rate.
pub fn fit_exponential_decay(samples: &[(usize, f64)]) -> Result<DecayFit> {
    let mut sorted: Vec<(usize, f64)> = samples.to_vec();
    sorted.sort_by_key(|s| s.0);
    let mut env = 0.0f64;
    let mut pts: Vec<(f64, f64)> = sorted
        .iter()
        .rev()
        .map(|&(n, c)| {
            env = env.max(c.abs());
            (n as f64, env)
        })
        .filter(|p| p.1 > 0.0)
        .map(|(n, e)| (n, e.ln()))
        .collect();
    pts.reverse();
    if pts.len() < 2 {
        return Err(Error::InvalidInput(
            "need two nonzero correlations to fit a rate".into(),
        ));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    let constant = pts.iter().map(|&(n, y)| (y - slope * n).exp()).fold(0.0, f64::max);
    Ok(DecayFit {
        rho: slope.exp(),
        constant,
        r_squared,
        samples: pts.len(),
    })
}

/// Uniform atoms on an orbit of the torus.
pub fn periodic_measure_torus(orbit: &PeriodicOrbit<Vec2>, tol: f64) -> Result<Measure> {
    if orbit.residual > tol {
        return Err(Error::Precondition(format!(
            "orbit residual {:e} exceeds {tol:e}",
            orbit.residual
        )));
    }
    let n = orbit.points.len();
    Measure::atoms(orbit.points.clone(), vec![1.0 / n as f64; n])
}

/// The periodic measure of a shift orbit, read off its zeroth coordinates.
pub fn periodic_measure_symbolic(orbit: &PeriodicOrbit<SymPoint>) -> Result<Measure> {
    if orbit.residual > 0.0 {
        return Err(Error::Precondition("symbolic orbit is not closed".into()));
    }
    Measure::cycle(&orbit.points.iter().map(|x| x.at(0)).collect::<Vec<_>>())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicApproximation {
    pub measure: Measure,
    pub period: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<Word>,
    pub distance: f64,
    pub within_epsilon: bool,
    pub epsilon: f64,
    /// `enumeration` or `block_concatenation`.
    pub method: String,
    /// Largest period whose candidates were examined.
    pub scanned_through: usize,
    pub candidates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn connector(a: &TransitionMatrix, from: u8, to: u8) -> Option<Vec<u8>> {
    if a.allows(from as usize, to as usize) {
        return Some(Vec::new());
    }
    let path = a.digraph().shortest_path_to(from as usize, |v| v == to as usize)?;
    Some(path[1..path.len() - 1].iter().map(|&s| s as u8).collect())
}

/// Concatenations `c_1^{r_1} … c_k^{r_k}` of the target's cycles with
/// `r_i ≈ K w_i / |c_i|`, joined by shortest connecting paths.
fn block_candidates(a: &TransitionMatrix, target: &Measure, horizon: usize) -> Vec<Vec<u8>> {
    let Measure::Cycles { cycles } = target else {
        return Vec::new();
    };
    if cycles.iter().any(|c| !a.is_cyclically_admissible(&c.word.0)) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for k in 1..=horizon {
        let mut w: Vec<u8> = Vec::new();
        let mut ok = true;
        for c in cycles {
            let reps = ((k as f64 * c.weight / c.word.len() as f64).round() as usize).max(1);
            if let Some(&last) = w.last() {
                match connector(a, last, c.word.0[0]) {
                    Some(bridge) => w.extend(bridge),
                    None => ok = false,
                }
            }
            for _ in 0..reps {
                w.extend_from_slice(&c.word.0);
            }
        }
        if !ok || w.is_empty() {
            continue;
        }
        match connector(a, *w.last().unwrap(), w[0]) {
            Some(bridge) => w.extend(bridge),
            None => continue,
        }
        if w.len() <= horizon && a.is_cyclically_admissible(&w) && primitive_period(&w) == w.len() {
            out.push(canonical_rotation(&w));
        }
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Clone)]
struct Best {
    distance: f64,
    key: Vec<u8>,
    period: usize,
    method: &'static str,
}

fn better(a: &Best, b: &Best) -> bool {
    a.distance < b.distance || (a.distance == b.distance && (a.period, &a.key) < (b.period, &b.key))
}

/// Searches periodic measures of a shift for one within `epsilon` of `target`.
///
/// Periods are scanned upwards and the scan stops at the first period with a
/// candidate within `epsilon`; the closest candidate of that period is
/// returned. Candidates are all cycles of the period (when there are at most
/// [`CYCLE_LIMIT`] of them) and block concatenations of the target's cycles.
pub fn approximate_by_periodic_symbolic(
    target: &Measure,
    a: &TransitionMatrix,
    family: &TestFamily,
    epsilon: f64,
    horizon: usize,
) -> Result<PeriodicApproximation> {
    let obs = family.observables()?;
    let goal = family_vector(target, &obs)?;
    let blocks = block_candidates(a, target, horizon);
    let eval = |w: &[u8]| -> Result<f64> { Ok(vector_distance(&family_vector(&Measure::cycle(w)?, &obs)?, &goal)) };
    let mut best: Option<Best> = None;
    let mut candidates = 0;
    let mut truncated = Vec::new();
    let mut scanned = 0;
    for n in 1..=horizon {
        scanned = n;
        let list = a.enumerate_cycles(n, CYCLE_LIMIT)?;
        let mut words: Vec<(Vec<u8>, &'static str)> = Vec::new();
        if list.truncated {
            truncated.push(n);
        } else {
            words.extend(
                list.cycles
                    .iter()
                    .filter(|c| c.primitive_period == n)
                    .map(|c| (c.states.0.clone(), "enumeration")),
            );
        }
        for b in blocks.iter().filter(|b| b.len() == n) {
            if list.truncated || !words.iter().any(|(w, _)| w == b) {
                words.push((b.clone(), "block_concatenation"));
            }
        }
        candidates += words.len();
        let scored: Vec<Best> = words
            .par_iter()
            .map(|(w, method)| {
                Ok(Best {
                    distance: eval(w)?,
                    key: w.clone(),
                    period: n,
                    method,
                })
            })
            .collect::<Result<_>>()?;
        for s in scored {
            if best.as_ref().is_none_or(|b| better(&s, b)) {
                best = Some(s);
            }
        }
        if best.as_ref().is_some_and(|b| b.distance <= epsilon) {
            break;
        }
    }
    let best = best.ok_or_else(|| Error::HorizonTooSmall("no periodic orbit within the horizon".into()))?;
    let within = best.distance <= epsilon;
    Ok(PeriodicApproximation {
        measure: Measure::cycle(&best.key)?,
        period: best.period,
        word: Some(Word(best.key)),
        distance: best.distance,
        within_epsilon: within,
        epsilon,
        method: best.method.into(),
        scanned_through: scanned,
        candidates,
        note: (!truncated.is_empty()).then(|| format!("cycle enumeration truncated at periods {truncated:?}")),
    })
}

/// The same search on the torus over the orbits from the exact lattice solve.
/// The scan also stops when the period count exceeds the enumeration cap.
pub fn approximate_by_periodic_torus(
    target: &Measure,
    sys: &ToralAutomorphism,
    family: &TestFamily,
    epsilon: f64,
    horizon: usize,
) -> Result<PeriodicApproximation> {
    let obs = family.observables()?;
    let goal = family_vector(target, &obs)?;
    let mut best: Option<(f64, usize, Vec<Vec2>)> = None;
    let mut candidates = 0;
    let mut scanned = 0;
    let mut note = None;
    for n in 1..=horizon {
        let orbits = match sys.periodic_orbits(n) {
            Ok(o) => o,
            Err(Error::CapExceeded(msg)) => {
                note = Some(format!("scan stopped before period {n}: {msg}"));
                break;
            }
            Err(e) => return Err(e),
        };
        scanned = n;
        let orbits: Vec<Vec<Vec2>> = orbits
            .into_iter()
            .filter(|o| o.len() == n)
            .map(|o| o.iter().map(|p| p.to_f64()).collect())
            .collect();
        candidates += orbits.len();
        let scored: Vec<(f64, usize)> = orbits
            .par_iter()
            .enumerate()
            .map(|(i, o)| {
                let m = Measure::atoms(o.clone(), vec![1.0 / n as f64; n])?;
                Ok((vector_distance(&family_vector(&m, &obs)?, &goal), i))
            })
            .collect::<Result<_>>()?;
        if let Some(&(d, i)) = scored.iter().min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1))) {
            if best.as_ref().is_none_or(|b| d < b.0) {
                best = Some((d, n, orbits[i].clone()));
            }
        }
        if best.as_ref().is_some_and(|b| b.0 <= epsilon) {
            break;
        }
    }
    let (distance, period, points) =
        best.ok_or_else(|| Error::HorizonTooSmall("no periodic orbit within the horizon".into()))?;
    Ok(PeriodicApproximation {
        measure: Measure::atoms(points, vec![1.0 / period as f64; period])?,
        period,
        word: None,
        distance,
        within_epsilon: distance <= epsilon,
        epsilon,
        method: "enumeration".into(),
        scanned_through: scanned,
        candidates,
        note,
    })
}

/// The block `E` with `… p p E p p …` equal to the orbit of the homoclinic
/// point of `p`: everything after the last full copy of `p` in its left tail.
pub fn excursion_block(a: &TransitionMatrix, p: &[u8]) -> Result<Word> {
    let q = ShiftSystem::new(a.clone()).homoclinic_point(p)?;
    let tau = p.len() as i64;
    // left tail reads p[(t+1) mod τ]; a copy of p ends where that is p[τ−1]
    let bridge = q.core.len() as i64;
    let mut t = -bridge - 1;
    while (t + 1).rem_euclid(tau) != tau - 1 {
        t -= 1;
    }
    Ok(Word(q.slice(t + 1, 0)))
}

/// States `P_0 … P_{mτ−1}` reading `p^m`, then `E_0 … E_{e−1}` reading `E`;
/// `p^m` may follow itself or `E`, `E` may only follow `p^m`.
pub fn position_graph(p: &[u8], e: &[u8], m: usize) -> Result<(TransitionMatrix, Vec<u8>)> {
    let b = m * p.len();
    let size = b + e.len();
    if size > MAX_SYMBOLS {
        return Err(Error::CapExceeded(format!("position graph needs {size} states")));
    }
    let mut rows = vec![0u64; size];
    for i in 0..size - 1 {
        if i != b - 1 {
            rows[i] |= 1 << (i + 1);
        }
    }
    rows[b - 1] |= 1;
    if !e.is_empty() {
        rows[b - 1] |= 1 << b;
        rows[size - 1] |= 1;
    }
    let labels = (0..b).map(|i| p[i % p.len()]).chain(e.iter().copied()).collect();
    Ok((TransitionMatrix::from_masks(size, rows)?, labels))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockScanRow {
    pub m: usize,
    pub states: usize,
    pub primitive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_to_periodic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_to_target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliApproximation {
    pub epsilon: f64,
    pub periodic_word: Word,
    /// Distance from the periodic measure to the target.
    pub periodic_distance: f64,
    pub excursion: Word,
    /// The homoclinic point the excursion is read from.
    pub homoclinic: String,
    pub scan: Vec<BlockScanRow>,
    /// Smallest scanned `m` meeting `ε/2`, or the closest one.
    pub chosen_m: usize,
    pub measure: MarkovMeasure,
    pub distance_to_periodic: f64,
    pub distance_to_target: f64,
    pub within_epsilon: bool,
    /// Primitivity of the block presentation, hence mixing of the support.
    pub support_primitive: bool,
    /// Distances to the periodic measure never increase along the scan.
    pub monotone: bool,
    /// The scan stopped at the state cap before reaching `m_max`.
    pub capped: bool,
}

/// Approximates `target` by the Parry measure of a mixing horseshoe built from
/// a periodic orbit `p` close to the target and the excursion along its
/// homoclinic point. When `p` is not given it is found by
/// [`approximate_by_periodic_symbolic`] at `ε/2` with period at most `horizon`.
pub fn bernoulli_approximation(
    target: &Measure,
    a: &TransitionMatrix,
    p: Option<&[u8]>,
    family: &TestFamily,
    epsilon: f64,
    m_max: usize,
    horizon: usize,
) -> Result<BernoulliApproximation> {
    if !a.is_primitive() {
        return Err(Error::NotPrimitive {
            period: a.class_period()?,
        });
    }
    if !(epsilon > 0.0) || m_max == 0 {
        return Err(Error::InvalidInput("epsilon must be positive and m_max >= 1".into()));
    }
    let obs = family.observables()?;
    let goal = family_vector(target, &obs)?;
    let p: Vec<u8> = match p {
        Some(w) => {
            if !a.is_cyclically_admissible(w) {
                return Err(Error::NotAdmissible(w.to_vec()));
            }
            w[..primitive_period(w)].to_vec()
        }
        None => {
            approximate_by_periodic_symbolic(target, a, family, epsilon / 2.0, horizon)?
                .word
                .expect("symbolic search returns a word")
                .0
        }
    };
    let mu_p = Measure::cycle(&p)?;
    let at_p = family_vector(&mu_p, &obs)?;
    let periodic_distance = vector_distance(&at_p, &goal);
    let e = excursion_block(a, &p)?;
    let q = ShiftSystem::new(a.clone()).homoclinic_point(&p)?;
    let last_m = (1..=m_max)
        .take_while(|m| m * p.len() + e.len() <= MAX_SYMBOLS)
        .last()
        .ok_or_else(|| Error::CapExceeded("even m = 1 exceeds the state cap".into()))?;
    let rows: Vec<(BlockScanRow, Option<MarkovMeasure>)> = (1..=last_m)
        .into_par_iter()
        .map(|m| {
            let (g, labels) = position_graph(&p, &e.0, m)?;
            let mut row = BlockScanRow {
                m,
                states: g.size(),
                primitive: g.is_primitive(),
                distance_to_periodic: None,
                distance_to_target: None,
                entropy: None,
            };
            if !row.primitive {
                return Ok((row, None));
            }
            let mut nu = parry_measure(&g)?;
            nu.labels = Some(labels);
            let v = family_vector(&Measure::Markov(nu.clone()), &obs)?;
            row.distance_to_periodic = Some(vector_distance(&v, &at_p));
            row.distance_to_target = Some(vector_distance(&v, &goal));
            row.entropy = Some(nu.entropy());
            Ok((row, Some(nu)))
        })
        .collect::<Result<_>>()?;
    let certified: Vec<&(BlockScanRow, Option<MarkovMeasure>)> = rows.iter().filter(|r| r.1.is_some()).collect();
    let dists: Vec<f64> = certified.iter().map(|r| r.0.distance_to_periodic.unwrap()).collect();
    let monotone = dists.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let chosen = certified
        .iter()
        .find(|r| r.0.distance_to_periodic.unwrap() <= epsilon / 2.0)
        .or_else(|| {
            certified.iter().min_by(|x, y| {
                x.0.distance_to_periodic
                    .unwrap()
                    .total_cmp(&y.0.distance_to_periodic.unwrap())
            })
        })
        .ok_or_else(|| Error::HorizonTooSmall("no scanned m gives a mixing block presentation".into()))?;
    let (row, measure) = (chosen.0.clone(), chosen.1.clone().unwrap());
    Ok(BernoulliApproximation {
        epsilon,
        periodic_word: Word(p),
        periodic_distance,
        excursion: e,
        homoclinic: q.centered(12),
        chosen_m: row.m,
        distance_to_periodic: row.distance_to_periodic.unwrap(),
        distance_to_target: row.distance_to_target.unwrap(),
        within_epsilon: row.distance_to_target.unwrap() <= epsilon,
        support_primitive: measure.support.is_primitive(),
        measure,
        monotone,
        capped: last_m < m_max,
        scan: rows.into_iter().map(|r| r.0).collect(),
    })
}
