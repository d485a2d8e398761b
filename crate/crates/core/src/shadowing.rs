//! True periodic orbits near periodic pseudo-orbits.
//!
//! For planar systems with a constant hyperbolic splitting the cyclic
//! linearized system `y_{i+1} - Df y_i = e_i` decouples into one scalar
//! recursion per direction. The unstable one is solved backwards and the stable
//! one forwards, each closed up by its geometric series, so every Newton step
//! is an exact `O(n)` solve. Linear and affine systems converge in one step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homoclinic::{cyclic_defects, smallest_cyclic_period, PseudoOrbit};
use crate::maps::{norm, torus_net, DynamicalSystem, ShiftSystem, SmoothSystem, SymPoint, ToralAutomorphism, Vec2};
use crate::sft::TransitionMatrix;

pub const MAX_NEWTON: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit<P> {
    pub points: Vec<P>,
    pub n: usize,
    /// `max_i d(f(x̄_i), x̄_{i+1 mod n})`.
    pub residual: f64,
    /// Distance to the source pseudo-orbit in the adapted norm (the metric for shifts).
    pub shadow_distance: f64,
    /// Same distance in the ambient metric.
    pub shadow_distance_metric: f64,
    pub constant: f64,
    /// `C·δ`.
    pub bound: f64,
    pub primitive_period: usize,
    pub newton_steps: usize,
}

/// Solve `y_{i+1} - λ y_i = e_i` cyclically for a scalar `λ` with `|λ| != 1`.
pub fn cyclic_scalar_solve(lambda: f64, e: &[f64]) -> Vec<f64> {
    let n = e.len();
    let mut y = vec![0.0; n];
    if lambda.abs() > 1.0 {
        // y_0 = -(Σ λ^{-(k+1)} e_k) / (1 - λ^{-n}), then y_i = (y_{i+1} - e_i)/λ
        let inv = 1.0 / lambda;
        let mut pow = inv;
        let mut sum = 0.0;
        for &ek in e {
            sum += pow * ek;
            pow *= inv;
        }
        y[0] = -sum / (1.0 - inv.powi(n as i32));
        let mut next = y[0];
        for i in (1..n).rev() {
            y[i] = (next - e[i]) * inv;
            next = y[i];
        }
    } else {
        // y_0 = (Σ_{k=1..n} λ^{k-1} e_{n-k}) / (1 - λ^n), then forwards
        let mut pow = 1.0;
        let mut sum = 0.0;
        for k in 1..=n {
            sum += pow * e[n - k];
            pow *= lambda;
        }
        y[0] = sum / (1.0 - lambda.powi(n as i32));
        for i in 0..n - 1 {
            y[i + 1] = lambda * y[i] + e[i];
        }
    }
    y
}

fn step_errors<S: SmoothSystem>(sys: &S, x: &[Vec2]) -> Vec<Vec2> {
    let n = x.len();
    (0..n)
        .map(|i| sys.displacement(&x[(i + 1) % n], &sys.evaluate(&x[i])))
        .collect()
}

/// Newton shadowing of a periodic pseudo-orbit on a hyperbolic planar system.
pub fn shadow_periodic<S: SmoothSystem>(sys: &S, po: &PseudoOrbit<Vec2>, tol: f64) -> Result<PeriodicOrbit<Vec2>> {
    let n = po.points.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty pseudo-orbit".into()));
    }
    let split = sys.splitting();
    let delta = cyclic_defects(sys, &po.points).into_iter().fold(0.0, f64::max);
    let mut x = po.points.clone();
    let mut steps = 0;
    let residual = loop {
        let e = step_errors(sys, &x);
        let residual = e.iter().map(|&v| norm(v)).fold(0.0, f64::max);
        if residual <= tol {
            break residual;
        }
        if steps == MAX_NEWTON {
            return Err(Error::NonConvergence {
                what: "Newton shadowing",
                iterations: steps,
                last_residual: residual,
            });
        }
        let (eu, es): (Vec<f64>, Vec<f64>) = e
            .iter()
            .map(|&v| {
                let [a, b] = split.coordinates(v);
                (a, b)
            })
            .unzip();
        let a = cyclic_scalar_solve(split.lambda_u, &eu);
        let b = cyclic_scalar_solve(split.lambda_s, &es);
        for i in 0..n {
            x[i] = sys.translate(&x[i], split.combine(a[i], b[i]));
        }
        steps += 1;
    };
    let c = sys.hyperbolicity_constant();
    let bound = c * delta;
    let mut adapted: f64 = 0.0;
    let mut metric: f64 = 0.0;
    for (p, q) in po.points.iter().zip(&x) {
        let v = sys.displacement(p, q);
        adapted = adapted.max(split.adapted_norm(v));
        metric = metric.max(norm(v));
    }
    if adapted > bound * (1.0 + 1e-9) + tol {
        return Err(Error::ShadowingBound {
            distance: adapted,
            bound,
        });
    }
    let primitive_period = smallest_cyclic_period(sys, &x, 1e-9);
    Ok(PeriodicOrbit {
        points: x,
        n,
        residual,
        shadow_distance: adapted,
        shadow_distance_metric: metric,
        constant: c,
        bound,
        primitive_period,
        newton_steps: steps,
    })
}

/// Symbolic shadowing: read the zeroth coordinates as a cyclic word.
pub fn shadow_symbolic(sys: &ShiftSystem, po: &PseudoOrbit<SymPoint>) -> Result<PeriodicOrbit<SymPoint>> {
    let w: Vec<u8> = po.points.iter().map(|x| x.at(0)).collect();
    if !sys.matrix.is_cyclically_admissible(&w) {
        return Err(Error::NotAdmissible(w));
    }
    let delta = cyclic_defects(sys, &po.points).into_iter().fold(0.0, f64::max);
    let base = SymPoint::periodic(&w);
    let points: Vec<SymPoint> = (0..w.len() as i64).map(|i| base.shifted(i)).collect();
    let dist = po
        .points
        .iter()
        .zip(&points)
        .map(|(a, b)| sys.distance(a, b))
        .fold(0.0, f64::max);
    if dist > delta {
        return Err(Error::ShadowingBound {
            distance: dist,
            bound: delta,
        });
    }
    let residual = cyclic_defects(sys, &points).into_iter().fold(0.0, f64::max);
    Ok(PeriodicOrbit {
        n: w.len(),
        residual,
        shadow_distance: dist,
        shadow_distance_metric: dist,
        constant: 1.0,
        bound: delta,
        primitive_period: crate::word::primitive_period(&w),
        newton_steps: 0,
        points,
    })
}

fn exact_orbit<P>(points: Vec<P>) -> PeriodicOrbit<P> {
    let n = points.len();
    PeriodicOrbit {
        points,
        n,
        residual: 0.0,
        shadow_distance: 0.0,
        shadow_distance_metric: 0.0,
        constant: 0.0,
        bound: 0.0,
        primitive_period: n,
        newton_steps: 0,
    }
}

/// All orbits of points fixed by `f^n`, from the exact lattice solve.
pub fn enumerate_toral_orbits(sys: &ToralAutomorphism, n: usize) -> Result<Vec<PeriodicOrbit<Vec2>>> {
    Ok(sys
        .periodic_orbits(n)?
        .into_iter()
        .map(|o| {
            let pts: Vec<Vec2> = o.iter().map(|p| p.to_f64()).collect();
            let mut orbit = exact_orbit(pts);
            orbit.residual = cyclic_defects(sys, &orbit.points).into_iter().fold(0.0, f64::max);
            orbit
        })
        .collect())
}

/// All orbits of points fixed by `σ^n`, one per cycle.
pub fn enumerate_symbolic_orbits(a: &TransitionMatrix, n: usize, limit: usize) -> Result<Vec<PeriodicOrbit<SymPoint>>> {
    let list = a.enumerate_cycles(n, limit)?;
    if list.truncated {
        return Err(Error::CapExceeded(format!("more than {limit} cycles of length {n}")));
    }
    Ok(list
        .cycles
        .iter()
        .map(|c| {
            let w = c.primitive_word().0;
            let base = SymPoint::periodic(&w);
            exact_orbit((0..w.len() as i64).map(|i| base.shifted(i)).collect())
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport<P> {
    pub dense: bool,
    pub epsilon: f64,
    /// Largest distance from a net point to the orbit.
    pub worst_distance: f64,
    pub uncovered: Option<P>,
    pub net_size: usize,
}

/// Every net point lies within `epsilon` of some orbit point.
pub fn density_check<S: DynamicalSystem>(
    sys: &S,
    orbit: &[S::Point],
    net: &[S::Point],
    epsilon: f64,
) -> DensityReport<S::Point> {
    let mut worst = 0.0f64;
    let mut worst_point = None;
    for z in net {
        let d = orbit.iter().map(|x| sys.distance(x, z)).fold(f64::INFINITY, f64::min);
        if d > worst {
            worst = d;
            worst_point = Some(z.clone());
        }
    }
    let dense = worst <= epsilon;
    DensityReport {
        dense,
        epsilon,
        worst_distance: worst,
        uncovered: if dense { None } else { worst_point },
        net_size: net.len(),
    }
}

/// Density on the whole torus against the `ε/2` grid.
pub fn torus_density_check(sys: &ToralAutomorphism, orbit: &[Vec2], epsilon: f64) -> Result<DensityReport<Vec2>> {
    Ok(density_check(sys, orbit, &torus_net(epsilon / 2.0)?, epsilon))
}

/// Density on the shift space against one point per `ε/2`-cylinder.
pub fn symbolic_density_check(sys: &ShiftSystem, orbit: &[SymPoint], epsilon: f64) -> Result<DensityReport<SymPoint>> {
    Ok(density_check(sys, orbit, &sys.net(epsilon / 2.0)?, epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homoclinic::{build_periodic_pseudo_orbit, compute_excursion_parameters, symbolic_datum};
    use crate::lpp::lpp_certificate;

    fn pseudo(points: Vec<Vec2>, sys: &ToralAutomorphism) -> PseudoOrbit<Vec2> {
        let defect = cyclic_defects(sys, &points).into_iter().fold(0.0, f64::max);
        PseudoOrbit {
            n: points.len(),
            defect,
            jumps: vec![],
            times: vec![],
            points,
        }
    }

    #[test]
    fn scalar_solves_close_up() {
        let e = [0.3, -0.1, 0.25, 0.05, -0.4];
        for lambda in [2.618, -3.2, 0.382, -0.3] {
            let y = cyclic_scalar_solve(lambda, &e);
            for i in 0..e.len() {
                let lhs = y[(i + 1) % e.len()] - lambda * y[i];
                assert!((lhs - e[i]).abs() < 1e-13, "λ = {lambda}");
            }
        }
    }

    #[test]
    fn eigen_solve_matches_dense_oracle() {
        use nalgebra::{DMatrix, DVector};
        let f = ToralAutomorphism::cat();
        let split = f.splitting();
        let m = f.matrix();
        let e: Vec<Vec2> = (0..7)
            .map(|i| [0.01 * (i as f64).sin(), -0.02 * (i as f64 * 1.3).cos()])
            .collect();
        let n = e.len();
        // rows 2i..2i+2: y_{i+1} - A y_i = e_i
        let mut big = DMatrix::<f64>::zeros(2 * n, 2 * n);
        let mut rhs = DVector::<f64>::zeros(2 * n);
        for i in 0..n {
            let j = (i + 1) % n;
            for r in 0..2 {
                big[(2 * i + r, 2 * j + r)] += 1.0;
                for c in 0..2 {
                    big[(2 * i + r, 2 * i + c)] -= m[r][c] as f64;
                }
                rhs[2 * i + r] = e[i][r];
            }
        }
        let dense = big.lu().solve(&rhs).unwrap();
        let (eu, es): (Vec<f64>, Vec<f64>) = e
            .iter()
            .map(|&v| (split.coordinates(v)[0], split.coordinates(v)[1]))
            .unzip();
        let a = cyclic_scalar_solve(split.lambda_u, &eu);
        let b = cyclic_scalar_solve(split.lambda_s, &es);
        for i in 0..n {
            let y = split.combine(a[i], b[i]);
            assert!((y[0] - dense[2 * i]).abs() < 1e-13 && (y[1] - dense[2 * i + 1]).abs() < 1e-13);
        }
    }

    #[test]
    fn exact_orbit_is_fixed_by_solver() {
        let f = ToralAutomorphism::cat();
        let po = pseudo(vec![[0.2, 0.4], [0.8, 0.6]], &f);
        let o = shadow_periodic(&f, &po, 1e-12).unwrap();
        assert!(o.shadow_distance < 1e-15);
        assert_eq!(o.primitive_period, 2);
    }

    #[test]
    fn perturbed_orbit_is_corrected() {
        let f = ToralAutomorphism::cat();
        let pts = vec![[0.2 + 1e-3, 0.4 - 1e-3], [0.8 - 1e-3, 0.6 + 0.5e-3]];
        let po = pseudo(pts, &f);
        let o = shadow_periodic(&f, &po, 1e-12).unwrap();
        assert!(o.residual <= 1e-12);
        assert!(o.shadow_distance <= o.bound);
        assert!(f.distance(&o.points[0], &[0.2, 0.4]) < 1e-12);
    }

    #[test]
    fn counts_for_small_periods() {
        let f = ToralAutomorphism::cat();
        let count = |n| -> usize {
            enumerate_toral_orbits(&f, n)
                .unwrap()
                .iter()
                .map(|o| o.points.len())
                .sum()
        };
        assert_eq!(count(1), 1);
        assert_eq!(count(2), 5);
        assert_eq!(count(3), 16);
        let a = TransitionMatrix::from_rows(&[[1u8, 1], [1, 0]]).unwrap();
        let pts: usize = enumerate_symbolic_orbits(&a, 6, 1000)
            .unwrap()
            .iter()
            .map(|o| o.points.len())
            .sum();
        assert_eq!(pts as u128, a.count_periodic_points(6).unwrap());
    }

    #[test]
    fn density_examples() {
        let f = ToralAutomorphism::cat();
        let pts: Vec<Vec2> = f.periodic_points(2).unwrap().iter().map(|p| p.to_f64()).collect();
        assert!(torus_density_check(&f, &pts, 0.6).unwrap().dense);
        let r = torus_density_check(&f, &[[0.0, 0.0]], 0.1).unwrap();
        assert!(!r.dense);
        let w = r.uncovered.unwrap();
        assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);

        let a = TransitionMatrix::from_rows(&[[1u8, 1], [1, 0]]).unwrap();
        let s = ShiftSystem::new(a.clone());
        let cert = lpp_certificate(&a, 0.25, 20).unwrap();
        let w = cert.certificate().unwrap().witnesses[&20].0.clone();
        let base = SymPoint::periodic(&w);
        let orbit: Vec<SymPoint> = (0..20).map(|i| base.shifted(i)).collect();
        assert!(symbolic_density_check(&s, &orbit, 0.25).unwrap().dense);
    }

    #[test]
    fn horseshoe_pseudo_orbit_is_shadowed() {
        use crate::homoclinic::{build_with_refit, horseshoe_datum};
        use crate::maps::Horseshoe;
        let h = Horseshoe::new(1.0 / 3.0, 3.0).unwrap();
        let make = |b, f| horseshoe_datum(&h, &[0, 1], 1e-2, b, f);
        let (_, pr, _) = build_with_refit(&h, make, (64, 64), 400).unwrap();
        let (_, _, po) = build_with_refit(&h, make, (64, 64), pr.n0 as usize + 5).unwrap();
        let o = shadow_periodic(&h, &po, 1e-12).unwrap();
        assert!(o.residual <= 1e-12 && o.shadow_distance <= o.bound);
    }

    #[test]
    fn symbolic_shadowing_is_regluing() {
        let s = ShiftSystem::new(TransitionMatrix::full_shift(2).unwrap());
        let d = symbolic_datum(&s, &[0, 1], 0.125, 40, 120).unwrap();
        let pr = compute_excursion_parameters(&s, &d).unwrap();
        let n = pr.n0 as usize + 3;
        let po = build_periodic_pseudo_orbit(&s, &d, &pr, n).unwrap();
        let o = shadow_symbolic(&s, &po).unwrap();
        assert_eq!(o.residual, 0.0);
        assert!(o.shadow_distance <= 0.125);
        assert_eq!(o.points.len(), n);
    }
}
