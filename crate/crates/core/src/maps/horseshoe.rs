//! Two-branch affine horseshoe on the unit square.
//!
//! The lower strip `y < 1/2` is mapped by `(x, y) -> (μ_s x, μ_u y)`, the upper
//! one by `(x, y) -> (μ_s x + 1 - μ_s, μ_u y - (μ_u - 1))`. The maximal
//! invariant set is coded by the full 2-shift.

use super::{norm, DynamicalSystem, Mat2, SmoothSystem, Splitting, Vec2};
use crate::error::{Error, Result};
use crate::sft::TransitionMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horseshoe {
    mu_s: f64,
    mu_u: f64,
}

impl Horseshoe {
    pub fn new(contraction: f64, expansion: f64) -> Result<Self> {
        if !(contraction > 0.0 && contraction < 0.5) {
            return Err(Error::InvalidInput(format!(
                "contraction {contraction} outside (0, 1/2)"
            )));
        }
        if !(expansion > 2.0 && expansion.is_finite()) {
            return Err(Error::InvalidInput(format!("expansion {expansion} not above 2")));
        }
        Ok(Horseshoe {
            mu_s: contraction,
            mu_u: expansion,
        })
    }

    pub fn rates(&self) -> (f64, f64) {
        (self.mu_s, self.mu_u)
    }

    pub fn branch(&self, x: &Vec2) -> u8 {
        (x[1] >= 0.5) as u8
    }

    /// Horizontal strips `R_0 = [0,1] x [0, 1/μ_u]` and `R_1 = [0,1] x [1 - 1/μ_u, 1]`.
    pub fn strip(&self, s: u8) -> (f64, f64) {
        if s == 0 {
            (0.0, 1.0 / self.mu_u)
        } else {
            (1.0 - 1.0 / self.mu_u, 1.0)
        }
    }

    /// Transition matrix read from the geometry: `s -> t` is allowed when
    /// `f(R_s)` meets `R_t` in a set with interior.
    pub fn transition_matrix(&self) -> TransitionMatrix {
        let rows: Vec<Vec<u8>> = (0..2u8)
            .map(|s| {
                let (lo, hi) = self.strip(s);
                let ys = [self.evaluate(&[0.5, lo])[1], self.evaluate(&[0.5, hi])[1]];
                (0..2u8)
                    .map(|t| {
                        let (a, b) = self.strip(t);
                        (ys[0].max(a) < ys[1].min(b)) as u8
                    })
                    .collect()
            })
            .collect();
        TransitionMatrix::from_rows(&rows).expect("horseshoe strips cover the square")
    }

    /// Point coded by the sequence `x(t)`, using coordinates in `[-depth, depth)`.
    pub fn code(&self, x: impl Fn(i64) -> u8, depth: usize) -> Vec2 {
        let y = (0..depth as i64)
            .map(|k| x(k) as f64 * self.mu_u.powi(-(k as i32 + 1)))
            .sum::<f64>()
            * (self.mu_u - 1.0);
        let h = (1..=depth as i64)
            .map(|k| x(-k) as f64 * self.mu_s.powi(k as i32 - 1))
            .sum::<f64>()
            * (1.0 - self.mu_s);
        [h, y]
    }

    /// Periodic point coded by `w^∞` with `w` at coordinates `0..|w|`.
    pub fn periodic_point(&self, w: &[u8]) -> Vec2 {
        let n = w.len() as i64;
        self.code(|t| w[t.rem_euclid(n) as usize], 64)
    }
}

impl DynamicalSystem for Horseshoe {
    type Point = Vec2;

    fn evaluate(&self, x: &Vec2) -> Vec2 {
        if self.branch(x) == 0 {
            [self.mu_s * x[0], self.mu_u * x[1]]
        } else {
            [self.mu_s * x[0] + 1.0 - self.mu_s, self.mu_u * x[1] - (self.mu_u - 1.0)]
        }
    }

    fn distance(&self, x: &Vec2, y: &Vec2) -> f64 {
        norm([y[0] - x[0], y[1] - x[1]])
    }
}

impl SmoothSystem for Horseshoe {
    fn differential(&self, _x: &Vec2) -> Mat2 {
        [[self.mu_s, 0.0], [0.0, self.mu_u]]
    }

    fn splitting(&self) -> Splitting {
        Splitting {
            lambda_u: self.mu_u,
            lambda_s: self.mu_s,
            v_u: [0.0, 1.0],
            v_s: [1.0, 0.0],
        }
    }

    fn displacement(&self, x: &Vec2, y: &Vec2) -> Vec2 {
        [y[0] - x[0], y[1] - x[1]]
    }

    fn translate(&self, x: &Vec2, v: Vec2) -> Vec2 {
        [x[0] + v[0], x[1] + v[1]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_validation() {
        assert!(Horseshoe::new(0.5, 3.0).is_err());
        assert!(Horseshoe::new(0.3, 2.0).is_err());
        assert!(Horseshoe::new(1.0 / 3.0, 3.0).is_ok());
    }

    #[test]
    fn coding_conjugates_shift() {
        let h = Horseshoe::new(0.3, 3.5).unwrap();
        let seq = |t: i64| ((t * t + 3 * t) % 5 < 2) as u8;
        let x = h.code(seq, 60);
        let fx = h.evaluate(&x);
        let shifted = h.code(|t| seq(t + 1), 60);
        assert!(h.distance(&fx, &shifted) < 1e-12);
        assert_eq!(h.branch(&x), seq(0));
    }

    #[test]
    fn periodic_points_close_up() {
        let h = Horseshoe::new(1.0 / 3.0, 3.0).unwrap();
        let w = [0u8, 1, 1];
        let p = h.periodic_point(&w);
        assert!(h.distance(&h.iterate(&p, 3), &p) < 1e-12);
        assert_eq!(h.transition_matrix(), TransitionMatrix::full_shift(2).unwrap());
    }
}
