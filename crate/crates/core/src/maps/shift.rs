//! The shift map on eventually periodic sequences.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::DynamicalSystem;
use crate::error::{Error, Result};
use crate::metric::{sequence_distance, window};
use crate::sft::TransitionMatrix;
use crate::word::{primitive_period, symbol_char, Word};

/// Bi-infinite sequence `x(t) = base(t + shift)`, where `base` reads `core` on
/// `[core_start, core_start + |core|)`, repeats `left` to the left of it and
/// `right` to the right of it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymPoint {
    pub left: Vec<u8>,
    pub core: Vec<u8>,
    pub core_start: i64,
    pub right: Vec<u8>,
    pub shift: i64,
}

impl SymPoint {
    /// The periodic sequence `w^∞` with `w` at coordinates `0..|w|`.
    pub fn periodic(w: &[u8]) -> Self {
        assert!(!w.is_empty());
        SymPoint {
            left: w.to_vec(),
            core: Vec::new(),
            core_start: 0,
            right: w.to_vec(),
            shift: 0,
        }
    }

    pub fn at(&self, t: i64) -> u8 {
        let u = t + self.shift;
        let end = self.core_start + self.core.len() as i64;
        if u < self.core_start {
            self.left[(u - self.core_start).rem_euclid(self.left.len() as i64) as usize]
        } else if u >= end {
            self.right[(u - end).rem_euclid(self.right.len() as i64) as usize]
        } else {
            self.core[(u - self.core_start) as usize]
        }
    }

    pub fn shifted(&self, k: i64) -> Self {
        SymPoint {
            shift: self.shift + k,
            ..self.clone()
        }
    }

    /// Coordinates `from..to` (exclusive).
    pub fn slice(&self, from: i64, to: i64) -> Vec<u8> {
        (from..to).map(|t| self.at(t)).collect()
    }

    /// `x_{-r} .. x_{-1} . x_0 .. x_{r-1}`.
    pub fn centered(&self, r: usize) -> String {
        let r = r as i64;
        let mut s: String = (-r..0).map(|t| symbol_char(self.at(t))).collect();
        s.push('.');
        s.extend((0..r).map(|t| symbol_char(self.at(t))));
        s
    }
}

impl fmt::Display for SymPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.centered(8))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSystem {
    pub matrix: TransitionMatrix,
    /// Agreement on `W_cap` counts as equality.
    pub cap: usize,
}

impl ShiftSystem {
    pub fn new(matrix: TransitionMatrix) -> Self {
        ShiftSystem { matrix, cap: 128 }
    }

    /// Checks admissibility of the coordinates `[-r, r)`.
    pub fn is_admissible_near(&self, x: &SymPoint, r: i64) -> bool {
        self.matrix.is_admissible(&x.slice(-r, r))
    }

    /// An admissible sequence carrying `u` on `W_{|u|}`, extended greedily by
    /// least successors and predecessors until the tails become periodic.
    pub fn cylinder_representative(&self, u: &[u8]) -> Result<SymPoint> {
        if u.is_empty() || !self.matrix.is_admissible(u) {
            return Err(Error::NotAdmissible(u.to_vec()));
        }
        let g = self.matrix.digraph();
        let tail = |start: usize, forward: bool| -> (Vec<u8>, Vec<u8>) {
            let mut seen = vec![usize::MAX; self.matrix.size()];
            let mut path = vec![start];
            seen[start] = 0;
            loop {
                let cur = *path.last().unwrap();
                let next = if forward {
                    g.successors(cur)[0]
                } else {
                    g.predecessors(cur)[0]
                };
                if seen[next] != usize::MAX {
                    let k = seen[next];
                    let sym = |v: &[usize]| v.iter().map(|&s| s as u8).collect::<Vec<u8>>();
                    if k == 0 {
                        // the tail cycles back through the start symbol itself
                        let mut c = sym(&path[1..]);
                        c.push(start as u8);
                        return (Vec::new(), c);
                    }
                    return (sym(&path[1..k]), sym(&path[k..]));
                }
                seen[next] = path.len();
                path.push(next);
            }
        };
        let (fpre, fcyc) = tail(*u.last().unwrap() as usize, true);
        let (bpre, bcyc) = tail(u[0] as usize, false);
        let mut core: Vec<u8> = bpre.iter().rev().copied().collect();
        let lead = core.len() as i64;
        core.extend_from_slice(u);
        core.extend_from_slice(&fpre);
        let left: Vec<u8> = bcyc.iter().rev().copied().collect();
        let start = window(u.len()).0 - lead;
        Ok(SymPoint {
            left,
            core,
            core_start: start,
            right: fcyc,
            shift: 0,
        })
    }

    /// One representative per admissible cylinder of length `m` with `2^-m <= spacing`.
    pub fn net(&self, spacing: f64) -> Result<Vec<SymPoint>> {
        let m = crate::metric::word_length_for(spacing.min(1.0))?;
        crate::lpp::admissible_words(&self.matrix, m, crate::lpp::BLOCK_CAP)?
            .iter()
            .map(|u| self.cylinder_representative(u))
            .collect()
    }

    /// A point of `W^s(p) ∩ W^u(σ(p))` outside the orbit of `p`: the right tail
    /// follows `p`, the left tail follows `σ(p)`, joined by the shortest
    /// admissible bridge. Its core is the bridge, placed on `[-|E|, 0)`.
    pub fn homoclinic_point(&self, p: &[u8]) -> Result<SymPoint> {
        let tau = p.len();
        if tau == 0 || !self.matrix.is_cyclically_admissible(p) {
            return Err(Error::NotAdmissible(p.to_vec()));
        }
        if primitive_period(p) != tau {
            return Err(Error::InvalidInput(format!(
                "{} is not a primitive cycle word",
                Word(p.to_vec())
            )));
        }
        let g = self.matrix.digraph();
        let w0 = p[0] as usize;
        let bridge: Vec<u8> = if tau == 1 {
            // must leave the fixed point
            let path = g
                .successors(w0)
                .iter()
                .filter(|&&s| s != w0)
                .filter_map(|&s| {
                    if s == w0 {
                        None
                    } else {
                        g.shortest_path_to(s, |v| v == w0).map(|mut pth| {
                            pth.insert(0, s);
                            pth.dedup();
                            pth
                        })
                    }
                })
                .min_by_key(|pth| pth.len())
                .ok_or_else(|| Error::NoIntersection("the fixed point has no homoclinic excursion".into()))?;
            path[..path.len() - 1].iter().map(|&s| s as u8).collect()
        } else {
            let limit = tau * self.matrix.size() + tau;
            let layers = g.layers_to(w0, limit + 1);
            let len = (0..=limit)
                .find(|&l| layers[l + 1][p[(tau - l % tau) % tau] as usize])
                .ok_or_else(|| Error::NoIntersection("no bridge between phases".into()))?;
            let mut cur = p[(tau - len % tau) % tau] as usize;
            let mut out = Vec::with_capacity(len);
            for k in (1..=len).rev() {
                cur = *g.successors(cur).iter().find(|&&v| layers[k][v]).unwrap();
                out.push(cur as u8);
            }
            out
        };
        let l = bridge.len() as i64;
        let left: Vec<u8> = (0..tau as i64)
            .map(|i| p[(i - l + 1).rem_euclid(tau as i64) as usize])
            .collect();
        Ok(SymPoint {
            left,
            core: bridge,
            core_start: -l,
            right: p.to_vec(),
            shift: 0,
        })
    }
}

impl DynamicalSystem for ShiftSystem {
    type Point = SymPoint;

    fn evaluate(&self, x: &SymPoint) -> SymPoint {
        x.shifted(1)
    }

    fn distance(&self, x: &SymPoint, y: &SymPoint) -> f64 {
        sequence_distance(|t| x.at(t), |t| y.at(t), self.cap)
    }
}
