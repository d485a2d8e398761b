//! Concrete systems: hyperbolic toral automorphisms, the affine horseshoe and
//! subshifts of finite type viewed as maps on sequence space.

pub mod horseshoe;
pub mod shift;
pub mod toral;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sft::TransitionMatrix;

pub use horseshoe::Horseshoe;
pub use shift::{ShiftSystem, SymPoint};
pub use toral::{RationalPoint, ToralAutomorphism};

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

pub trait DynamicalSystem {
    type Point: Clone + PartialEq + std::fmt::Debug + Send + Sync;

    fn evaluate(&self, x: &Self::Point) -> Self::Point;
    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;

    fn iterate(&self, x: &Self::Point, n: usize) -> Self::Point {
        (0..n).fold(x.clone(), |y, _| self.evaluate(&y))
    }
}

/// Constant hyperbolic splitting of a linear or affine planar system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Splitting {
    pub lambda_u: f64,
    pub lambda_s: f64,
    pub v_u: Vec2,
    pub v_s: Vec2,
}

impl Splitting {
    pub fn mu_u(&self) -> f64 {
        self.lambda_u.abs()
    }

    pub fn mu_s(&self) -> f64 {
        self.lambda_s.abs()
    }

    /// Coordinates `(a, b)` with `v = a v_u + b v_s`.
    pub fn coordinates(&self, v: Vec2) -> Vec2 {
        let det = self.v_u[0] * self.v_s[1] - self.v_u[1] * self.v_s[0];
        [
            (v[0] * self.v_s[1] - v[1] * self.v_s[0]) / det,
            (self.v_u[0] * v[1] - self.v_u[1] * v[0]) / det,
        ]
    }

    pub fn combine(&self, a: f64, b: f64) -> Vec2 {
        [a * self.v_u[0] + b * self.v_s[0], a * self.v_u[1] + b * self.v_s[1]]
    }

    /// Max of the absolute splitting coordinates.
    pub fn adapted_norm(&self, v: Vec2) -> f64 {
        let [a, b] = self.coordinates(v);
        a.abs().max(b.abs())
    }

    pub fn sin_angle(&self) -> f64 {
        (self.v_u[0] * self.v_s[1] - self.v_u[1] * self.v_s[0]).abs() / (norm(self.v_u) * norm(self.v_s))
    }

    /// `C = max(1/(1-μ_s), 1/(1-1/μ_u)) / |sin θ|`.
    pub fn shadowing_constant(&self) -> f64 {
        let c = (1.0 / (1.0 - self.mu_s())).max(1.0 / (1.0 - 1.0 / self.mu_u()));
        c / self.sin_angle()
    }
}

pub fn norm(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

pub trait SmoothSystem: DynamicalSystem<Point = Vec2> {
    fn differential(&self, x: &Vec2) -> Mat2;
    fn splitting(&self) -> Splitting;
    /// `y - x`, taken in the chart (wrapped on the torus).
    fn displacement(&self, x: &Vec2, y: &Vec2) -> Vec2;
    fn translate(&self, x: &Vec2, v: Vec2) -> Vec2;

    fn hyperbolicity_constant(&self) -> f64 {
        self.splitting().shadowing_constant()
    }
}

/// System description as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemSpec {
    Toral { matrix: [[i64; 2]; 2] },
    Horseshoe { contraction: f64, expansion: f64 },
    Sft { matrix: TransitionMatrix },
}

pub enum System {
    Toral(ToralAutomorphism),
    Horseshoe(Horseshoe),
    Sft(ShiftSystem),
}

impl SystemSpec {
    pub fn build(&self) -> Result<System> {
        Ok(match self {
            SystemSpec::Toral { matrix } => System::Toral(ToralAutomorphism::new(*matrix)?),
            SystemSpec::Horseshoe { contraction, expansion } => {
                System::Horseshoe(Horseshoe::new(*contraction, *expansion)?)
            }
            SystemSpec::Sft { matrix } => System::Sft(ShiftSystem::new(matrix.clone())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub exponents: Vec<f64>,
    pub defined: bool,
    pub note: String,
}

fn mat_mul(a: Mat2, b: Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Exponents of a periodic orbit: `(1/τ) log |eigenvalue|` of the cocycle
/// product over the orbit, sorted in decreasing order.
pub fn lyapunov_exponents_periodic<S: SmoothSystem>(sys: &S, orbit: &[Vec2]) -> Result<LyapunovReport> {
    if orbit.is_empty() {
        return Err(Error::InvalidInput("empty orbit".into()));
    }
    let product = orbit
        .iter()
        .fold([[1.0, 0.0], [0.0, 1.0]], |acc, x| mat_mul(sys.differential(x), acc));
    let tr = product[0][0] + product[1][1];
    let det = product[0][0] * product[1][1] - product[0][1] * product[1][0];
    let disc = tr * tr - 4.0 * det;
    let tau = orbit.len() as f64;
    let (mut exps, note) = if disc >= 0.0 {
        let r = disc.sqrt();
        let l1 = (tr + tr.signum() * r) / 2.0;
        // the smaller root from the product to avoid cancellation
        let l2 = if l1 != 0.0 { det / l1 } else { (tr - r) / 2.0 };
        (
            vec![l1.abs().ln() / tau, l2.abs().ln() / tau],
            if disc == 0.0 { "repeated eigenvalue" } else { "" },
        )
    } else {
        let modulus = det.abs().sqrt().ln() / tau;
        (vec![modulus, modulus], "complex pair; exponents from the modulus")
    };
    exps.sort_by(|a, b| b.total_cmp(a));
    Ok(LyapunovReport {
        exponents: exps,
        defined: true,
        note: note.to_string(),
    })
}

/// Shift spaces carry no differentiable structure.
pub fn lyapunov_exponents_symbolic() -> LyapunovReport {
    LyapunovReport {
        exponents: Vec::new(),
        defined: false,
        note: "no differentiable structure on a shift space".into(),
    }
}

/// Regular grid on the torus with at most `spacing` between neighbours.
pub fn torus_net(spacing: f64) -> Result<Vec<Vec2>> {
    if !(spacing > 0.0) {
        return Err(Error::InvalidInput("spacing must be positive".into()));
    }
    let k = (1.0 / spacing).ceil() as usize;
    Ok((0..k)
        .flat_map(|i| (0..k).map(move |j| [i as f64 / k as f64, j as f64 / k as f64]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_json_roundtrip() {
        let s: SystemSpec = serde_json::from_str(r#"{"kind":"toral","matrix":[[2,1],[1,1]]}"#).unwrap();
        assert!(matches!(s.build().unwrap(), System::Toral(_)));
        let h: SystemSpec = serde_json::from_str(r#"{"kind":"horseshoe","contraction":0.3,"expansion":3}"#).unwrap();
        assert!(matches!(h.build().unwrap(), System::Horseshoe(_)));
        let f: SystemSpec = serde_json::from_str(r#"{"kind":"sft","matrix":{"size":2,"rows":[[1,1],[1,0]]}}"#).unwrap();
        assert!(matches!(f.build().unwrap(), System::Sft(_)));
    }

    #[test]
    fn torus_net_sizes() {
        assert_eq!(torus_net(0.5).unwrap().len(), 4);
        assert_eq!(torus_net(0.25).unwrap().len(), 16);
    }

    #[test]
    fn lyapunov_of_cat_map_and_horseshoe() {
        let cat = ToralAutomorphism::cat();
        let lam = (3.0 + 5f64.sqrt()) / 2.0;
        let r = lyapunov_exponents_periodic(&cat, &[[0.2, 0.4], [0.8, 0.6]]).unwrap();
        assert!((r.exponents[0] - lam.ln()).abs() < 1e-12);
        assert!((r.exponents[1] + lam.ln()).abs() < 1e-12);
        let h = Horseshoe::new(1.0 / 3.0, 3.0).unwrap();
        let r = lyapunov_exponents_periodic(&h, &[[0.0, 0.0]]).unwrap();
        assert!((r.exponents[0] - 3f64.ln()).abs() < 1e-12);
        assert!((r.exponents[1] - (1.0f64 / 3.0).ln()).abs() < 1e-12);
        assert!(!lyapunov_exponents_symbolic().defined);
    }
}
