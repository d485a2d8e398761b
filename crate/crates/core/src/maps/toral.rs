//! Hyperbolic automorphisms of the 2-torus.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{norm, DynamicalSystem, Mat2, SmoothSystem, Splitting, Vec2};
use crate::error::{Error, Result};

/// Largest number of periodic points enumerated exactly.
pub const POINT_CAP: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ToralAutomorphism {
    m: [[i64; 2]; 2],
    split: Splitting,
}

/// Point of the torus with rational coordinates `num / den`, `0 <= num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalPoint {
    pub num: [i128; 2],
    pub den: i128,
}

impl RationalPoint {
    pub fn to_f64(self) -> Vec2 {
        [
            self.num[0] as f64 / self.den as f64,
            self.num[1] as f64 / self.den as f64,
        ]
    }
}

/// Transverse intersection `q = p + t v_s = f(p) + s v_u + k` of the stable
/// line of `p` with the unstable line of `f(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToralHomoclinic {
    pub q: Vec2,
    pub t: f64,
    pub s: f64,
    pub translate: [i64; 2],
}

fn wrap01(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        // a = q b + r, g = x b + y r
        (g, y, x - a.div_euclid(b) * y)
    }
}

impl ToralAutomorphism {
    pub fn new(m: [[i64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() != 1 {
            return Err(Error::InvalidInput(format!(
                "toral matrix must have determinant +-1, got {det}"
            )));
        }
        let tr = m[0][0] + m[1][1];
        let hyperbolic = if det == 1 { tr.abs() > 2 } else { tr != 0 };
        if !hyperbolic {
            return Err(Error::InvalidInput(
                "toral matrix has an eigenvalue on the unit circle".into(),
            ));
        }
        let (trf, detf) = (tr as f64, det as f64);
        let r = (trf * trf - 4.0 * detf).sqrt();
        let big = (trf + trf.signum() * r) / 2.0;
        let small = detf / big;
        let eigvec = |lam: f64| -> Vec2 {
            let v = if m[0][1] != 0 {
                [m[0][1] as f64, lam - m[0][0] as f64]
            } else {
                [lam - m[1][1] as f64, m[1][0] as f64]
            };
            let n = norm(v);
            [v[0] / n, v[1] / n]
        };
        Ok(ToralAutomorphism {
            m,
            split: Splitting {
                lambda_u: big,
                lambda_s: small,
                v_u: eigvec(big),
                v_s: eigvec(small),
            },
        })
    }

    /// Arnold's cat map `[[2,1],[1,1]]`.
    pub fn cat() -> Self {
        Self::new([[2, 1], [1, 1]]).expect("cat map is hyperbolic")
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.m
    }

    pub fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn power(&self, n: usize) -> Result<[[i128; 2]; 2]> {
        let a = self.m.map(|r| r.map(|e| e as i128));
        let mut p = [[1i128, 0], [0, 1]];
        for _ in 0..n {
            let mut q = [[0i128; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    q[i][j] = p[i][0]
                        .checked_mul(a[0][j])
                        .and_then(|x| p[i][1].checked_mul(a[1][j]).and_then(|y| x.checked_add(y)))
                        .ok_or(Error::Overflow("toral matrix power"))?;
                }
            }
            p = q;
        }
        Ok(p)
    }

    /// `|det(A^n - I)| = |det(A)^n - trace(A^n) + 1|`.
    pub fn fixed_point_count(&self, n: usize) -> Result<u128> {
        let p = self.power(n)?;
        let det_n: i128 = if self.det() == -1 && n % 2 == 1 { -1 } else { 1 };
        let v = det_n - (p[0][0] + p[1][1]) + 1;
        Ok(v.unsigned_abs())
    }

    pub fn evaluate_rational(&self, x: &RationalPoint) -> RationalPoint {
        let m = self.m.map(|r| r.map(|e| e as i128));
        RationalPoint {
            num: [
                (m[0][0] * x.num[0] + m[0][1] * x.num[1]).rem_euclid(x.den),
                (m[1][0] * x.num[0] + m[1][1] * x.num[1]).rem_euclid(x.den),
            ],
            den: x.den,
        }
    }

    /// All solutions of `(A^n - I) x ≡ 0 mod 1`, exactly, as points over the
    /// common denominator `|det(A^n - I)|`.
    pub fn periodic_points(&self, n: usize) -> Result<Vec<RationalPoint>> {
        if n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        let mut mm = self.power(n)?;
        mm[0][0] -= 1;
        mm[1][1] -= 1;
        let d = mm[0][0] * mm[1][1] - mm[0][1] * mm[1][0];
        let count = d.unsigned_abs();
        if count > POINT_CAP {
            return Err(Error::CapExceeded(format!(
                "period {n} has {count} points, more than {POINT_CAP}"
            )));
        }
        // column Hermite form: the lattice (A^n - I) Z^2 has basis (g, *), (0, |d|/g)
        let (g, _, _) = ext_gcd(mm[0][0], mm[0][1]);
        let h = count as i128 / g;
        let den = count as i128;
        let sign = d.signum();
        let adj = [[mm[1][1], -mm[0][1]], [-mm[1][0], mm[0][0]]];
        let mut out = Vec::with_capacity(count as usize);
        for i in 0..g {
            for j in 0..h {
                let x = (sign * (adj[0][0] * i + adj[0][1] * j)).rem_euclid(den);
                let y = (sign * (adj[1][0] * i + adj[1][1] * j)).rem_euclid(den);
                out.push(RationalPoint { num: [x, y], den });
            }
        }
        out.sort_by_key(|p| p.num);
        Ok(out)
    }

    /// Fixed points of `f^n` grouped into orbits; each orbit starts at its
    /// least point and follows the map.
    pub fn periodic_orbits(&self, n: usize) -> Result<Vec<Vec<RationalPoint>>> {
        let pts = self.periodic_points(n)?;
        let index: HashMap<[i128; 2], usize> = pts.iter().enumerate().map(|(i, p)| (p.num, i)).collect();
        let mut seen = vec![false; pts.len()];
        let mut orbits = Vec::new();
        for i in 0..pts.len() {
            if seen[i] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut cur = pts[i];
            loop {
                let k = index[&cur.num];
                if seen[k] {
                    break;
                }
                seen[k] = true;
                orbit.push(cur);
                cur = self.evaluate_rational(&cur);
            }
            orbits.push(orbit);
        }
        Ok(orbits)
    }

    /// Intersection of `W^s(p)` with `W^u(f(p))` over deck translates `|k_i| <= radius`,
    /// smallest `|t| + |s|` first. `orbit[0] = p`, `orbit[1] = f(p)`.
    pub fn homoclinic_point(&self, orbit: &[Vec2], radius: i64) -> Result<ToralHomoclinic> {
        if orbit.is_empty() {
            return Err(Error::InvalidInput("empty periodic orbit".into()));
        }
        let p0 = orbit[0];
        let p1 = orbit[1 % orbit.len()];
        let Splitting { v_u, v_s, .. } = self.split;
        // t v_s - s v_u = p1 - p0 + k
        let det = v_s[0] * (-v_u[1]) - (-v_u[0]) * v_s[1];
        let mut best: Option<(f64, ToralHomoclinic)> = None;
        for k0 in -radius..=radius {
            for k1 in -radius..=radius {
                let d = [p1[0] - p0[0] + k0 as f64, p1[1] - p0[1] + k1 as f64];
                let t = (d[0] * (-v_u[1]) - (-v_u[0]) * d[1]) / det;
                let s = (v_s[0] * d[1] - v_s[1] * d[0]) / det;
                if t.abs() < 1e-9 || s.abs() < 1e-9 {
                    continue;
                }
                let size = t.abs() + s.abs();
                if best.as_ref().is_none_or(|(b, _)| size < *b - 1e-12) {
                    let q = [wrap01(p0[0] + t * v_s[0]), wrap01(p0[1] + t * v_s[1])];
                    best = Some((
                        size,
                        ToralHomoclinic {
                            q,
                            t,
                            s,
                            translate: [k0, k1],
                        },
                    ));
                }
            }
        }
        best.map(|b| b.1)
            .ok_or_else(|| Error::NoIntersection(format!("no transverse intersection with |k| <= {radius}")))
    }

    /// `f^k(q)` for `k` in `[-back, fwd]`, computed from the exact orbit of `p`.
    pub fn homoclinic_segment(&self, orbit: &[Vec2], h: &ToralHomoclinic, back: usize, fwd: usize) -> Vec<Vec2> {
        let tau = orbit.len() as i64;
        let Splitting {
            lambda_u,
            lambda_s,
            v_u,
            v_s,
        } = self.split;
        (-(back as i64)..=fwd as i64)
            .map(|k| {
                let (base, c, v) = if k >= 0 {
                    (orbit[k.rem_euclid(tau) as usize], h.t * lambda_s.powi(k as i32), v_s)
                } else {
                    (
                        orbit[(1 + k).rem_euclid(tau) as usize],
                        h.s * lambda_u.powi(k as i32),
                        v_u,
                    )
                };
                [wrap01(base[0] + c * v[0]), wrap01(base[1] + c * v[1])]
            })
            .collect()
    }
}

impl DynamicalSystem for ToralAutomorphism {
    type Point = Vec2;

    fn evaluate(&self, x: &Vec2) -> Vec2 {
        let m = self.m.map(|r| r.map(|e| e as f64));
        [
            wrap01(m[0][0] * x[0] + m[0][1] * x[1]),
            wrap01(m[1][0] * x[0] + m[1][1] * x[1]),
        ]
    }

    fn distance(&self, x: &Vec2, y: &Vec2) -> f64 {
        norm(self.displacement(x, y))
    }
}

impl SmoothSystem for ToralAutomorphism {
    fn differential(&self, _x: &Vec2) -> Mat2 {
        self.m.map(|r| r.map(|e| e as f64))
    }

    fn splitting(&self) -> Splitting {
        self.split
    }

    fn displacement(&self, x: &Vec2, y: &Vec2) -> Vec2 {
        let d = [y[0] - x[0], y[1] - x[1]];
        [d[0] - d[0].round(), d[1] - d[1].round()]
    }

    fn translate(&self, x: &Vec2, v: Vec2) -> Vec2 {
        [wrap01(x[0] + v[0]), wrap01(x[1] + v[1])]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ToralAutomorphism::new([[1, 1], [0, 1]]).is_err());
        assert!(ToralAutomorphism::new([[2, 0], [0, 1]]).is_err());
        assert!(ToralAutomorphism::new([[0, 1], [1, 0]]).is_err());
        assert!(ToralAutomorphism::new([[1, 1], [1, 0]]).is_ok());
        assert!(ToralAutomorphism::new([[3, 1], [2, 1]]).is_ok());
    }

    #[test]
    fn evaluate_example() {
        let f = ToralAutomorphism::cat();
        let y = f.evaluate(&[0.2, 0.4]);
        assert!((y[0] - 0.8).abs() < 1e-15 && (y[1] - 0.6).abs() < 1e-15);
        assert_eq!(f.evaluate(&[0.0, 0.0]), [0.0, 0.0]);
    }

    #[test]
    fn splitting_matches_eigenvalues() {
        let f = ToralAutomorphism::cat();
        let s = f.splitting();
        let lam = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((s.lambda_u - lam).abs() < 1e-12);
        assert!((s.lambda_s - 1.0 / lam).abs() < 1e-12);
        // symmetric matrix: orthogonal directions, C = 1/(1 - 1/λ)
        assert!((s.sin_angle() - 1.0).abs() < 1e-12);
        assert!((f.hyperbolicity_constant() - 1.0 / (1.0 - 1.0 / lam)).abs() < 1e-12);
    }

    #[test]
    fn small_period_counts() {
        let f = ToralAutomorphism::cat();
        assert_eq!(f.periodic_points(1).unwrap().len(), 1);
        let p2 = f.periodic_points(2).unwrap();
        assert_eq!(p2.len(), 5);
        assert!(p2.iter().all(|p| p.den == 5));
        assert_eq!(f.periodic_points(3).unwrap().len(), 16);
        let orbits = f.periodic_orbits(2).unwrap();
        let mut sizes: Vec<usize> = orbits.iter().map(|o| o.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 2]);
        assert!(orbits
            .iter()
            .any(|o| o.contains(&RationalPoint { num: [1, 2], den: 5 })));
    }

    #[test]
    fn orientation_reversing_counts() {
        let f = ToralAutomorphism::new([[1, 1], [1, 0]]).unwrap();
        for n in 1..=8 {
            assert_eq!(
                f.periodic_points(n).unwrap().len() as u128,
                f.fixed_point_count(n).unwrap()
            );
        }
    }

    #[test]
    fn homoclinic_segment_tails() {
        let f = ToralAutomorphism::cat();
        let orbit = [[0.2, 0.4], [0.8, 0.6]];
        let h = f.homoclinic_point(&orbit, 3).unwrap();
        let seg = f.homoclinic_segment(&orbit, &h, 40, 40);
        // consecutive points follow the map
        for w in seg.windows(2) {
            assert!(f.distance(&f.evaluate(&w[0]), &w[1]) < 1e-9);
        }
        // forward tail near O(p) in phase, backward tail near O(f(p))
        assert!(f.distance(&seg[80], &orbit[0]) < 1e-12);
        assert!(f.distance(&seg[0], &orbit[1]) < 1e-12);
        assert!(f.distance(&seg[40], &orbit[0]) > 1e-3);
    }
}
