//! Property tests for pseudo-orbits, shadowing, toral maps and measures.

use lpmix_core::homoclinic::{build_periodic_pseudo_orbit, fit_datum, symbolic_datum};
use lpmix_core::maps::{DynamicalSystem, ShiftSystem, SymPoint, ToralAutomorphism};
use lpmix_core::measure::{
    bernoulli_approximation, correlation, fit_exponential_decay, parry_measure, weak_star_distance, MarkovMeasure,
    Measure, TestFamily,
};
use lpmix_core::metric::{agreement_depth, word_length_for};
use lpmix_core::shadowing::{enumerate_toral_orbits, shadow_symbolic};
use lpmix_core::word::primitive_period;
use lpmix_core::TransitionMatrix;
use proptest::prelude::*;

fn primitive(max: usize) -> impl Strategy<Value = TransitionMatrix> {
    (2..=max)
        .prop_flat_map(|k| proptest::collection::vec(0..1u64 << k, k).prop_map(move |rows| (k, rows)))
        .prop_filter_map("not primitive", |(k, rows)| {
            TransitionMatrix::from_masks(k, rows).ok().filter(|a| a.is_primitive())
        })
}

/// A primitive cyclic word over `k` symbols.
fn cycle_word(k: u8, max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(0..k, 1..=max_len).prop_filter("proper power", |w| primitive_period(w) == w.len())
}

fn hyperbolic_toral() -> impl Strategy<Value = ToralAutomorphism> {
    [(-3i64..=3), (-3i64..=3), (-3i64..=3), (-3i64..=3)].prop_filter_map("not hyperbolic", |[a, b, c, d]| {
        ToralAutomorphism::new([[a, b], [c, d]]).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn toral_counts_equal_determinant(f in hyperbolic_toral(), n in 1usize..=4) {
        let m = f.power(n).unwrap();
        let det = (m[0][0] - 1) * (m[1][1] - 1) - m[0][1] * m[1][0];
        prop_assume!(det.unsigned_abs() <= 200_000);
        let pts: usize = enumerate_toral_orbits(&f, n).unwrap().iter().map(|o| o.points.len()).sum();
        prop_assert_eq!(pts as u128, det.unsigned_abs());
        prop_assert_eq!(f.fixed_point_count(n).unwrap(), det.unsigned_abs());
        // every enumerated point really is fixed by f^n
        for o in enumerate_toral_orbits(&f, n).unwrap() {
            let x = o.points[0];
            let y = f.iterate(&x, n);
            prop_assert!(f.distance(&x, &y) < 1e-9);
        }
    }

    #[test]
    fn pseudo_orbits_keep_their_invariants(p in cycle_word(2, 4), k in 2i32..=5, extra in 0usize..12) {
        let s = ShiftSystem::new(TransitionMatrix::full_shift(2).unwrap());
        let delta = 0.5f64.powi(k);
        let make = |b, f| symbolic_datum(&s, &p, delta, b, f);
        let (d, pr) = fit_datum(&s, make, (64, 64), |pr| pr.n0 as usize..=pr.n0 as usize + extra).unwrap();
        let n = pr.n0 as usize + extra;
        let po = build_periodic_pseudo_orbit(&s, &d, &pr, n).unwrap();
        prop_assert_eq!(po.points.len(), n);
        prop_assert!(po.defect <= delta);
        // the shadow is an admissible cycle of exact length n whose points stay within δ
        let o = shadow_symbolic(&s, &po).unwrap();
        prop_assert_eq!(o.points.len(), n);
        prop_assert!(o.shadow_distance <= delta);
        // gluing: away from the jumps the shadow agrees with the strings on W_m
        let m = word_length_for(delta).unwrap();
        let is_jump = |i: i64| po.jumps.contains(&(i.rem_euclid(n as i64) as usize));
        for i in 0..n as i64 {
            if (i - m as i64..=i + m as i64).any(is_jump) {
                continue;
            }
            let (x, y) = (&po.points[i as usize], &o.points[i as usize]);
            prop_assert!(agreement_depth(|t| x.at(t), |t| y.at(t), 2 * m) >= m);
        }
    }
}

/// `||M^(2^s)||^(1/2^s)` with the norm renormalised after every squaring.
fn gelfand_radius(mut m: nalgebra::DMatrix<f64>, squarings: u32) -> f64 {
    let mut log = 0.0;
    let mut k = 1.0;
    for _ in 0..squarings {
        let s = m.norm();
        if s == 0.0 {
            return 0.0;
        }
        m /= s;
        log = 2.0 * (log + s.ln());
        m = &m * &m;
        k *= 2.0;
    }
    ((log + m.norm().ln()) / k).exp()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn parry_is_stationary_and_maximal(a in primitive(5), seeds in proptest::collection::vec(0.05f64..1.0, 25 * 100)) {
        let parry = parry_measure(&a).unwrap();
        prop_assert!(parry.stationarity_defect() < 1e-12);
        let h = a.topological_entropy().unwrap();
        prop_assert!((parry.entropy() - h).abs() < 1e-10);
        let n = a.size();
        for t in 0..100 {
            let p: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    let row: Vec<f64> = (0..n)
                        .map(|j| if a.allows(i, j) { seeds[t * 25 + i * 5 + j] } else { 0.0 })
                        .collect();
                    let s: f64 = row.iter().sum();
                    row.iter().map(|x| x / s).collect()
                })
                .collect();
            let m = MarkovMeasure::new(a.clone(), p, None).unwrap();
            prop_assert!(m.stationarity_defect() < 1e-12);
            prop_assert!(m.entropy() <= h + 1e-12);
        }
    }

    #[test]
    fn correlations_decay(a in primitive(4)) {
        let m = parry_measure(&a).unwrap();
        // values at rounding level carry no rate; a nilpotent deflated part leaves at most a couple of samples
        let samples: Vec<(usize, f64)> = (1..=30)
            .map(|n| (n, correlation(&m, &[0], &[0], n).unwrap()))
            .filter(|s| s.1.abs() > 1e-13)
            .collect();
        prop_assume!(samples.len() >= 3);
        let fit = fit_exponential_decay(&samples).unwrap();
        // oracle: Gelfand's formula on the deflated chain P - 1 pi^T caps the observed rate
        let n = m.p.len();
        let d = nalgebra::DMatrix::from_fn(n, n, |i, j| m.p[i][j] - m.pi[j]);
        let rho2 = gelfand_radius(d.clone(), 10);
        // exact envelope: C_n = pi_0 (D^n)_00
        let mut dn = d.clone();
        for n in 1..=30 {
            let c = correlation(&m, &[0], &[0], n).unwrap();
            prop_assert!(c.abs() <= m.pi[0] * dn.norm() + 1e-12, "n = {}", n);
            dn = &dn * &d;
        }
        prop_assert!(fit.rho < 1.0, "{:?}", fit);
        // an n^2 prefactor (Jordan block of size 3) tilts a 30-sample log fit by at most e^0.178
        prop_assert!(fit.rho <= 1.2 * rho2 + 1e-3, "{:?} {}", fit, rho2);
        prop_assert!(fit.r_squared >= 0.95, "{:?} {:?}", fit, a.to_rows());
    }
}

fn symbolic_measure() -> impl Strategy<Value = Measure> {
    prop_oneof![
        cycle_word(2, 6).prop_map(|w| Measure::cycle(&w).unwrap()),
        (0.05f64..0.95).prop_map(|p| Measure::bernoulli(vec![p, 1.0 - p]).unwrap()),
        (0.05f64..0.95, 0.05f64..0.95).prop_map(|(a, b)| Measure::Markov(
            MarkovMeasure::new(
                TransitionMatrix::full_shift(2).unwrap(),
                vec![vec![a, 1.0 - a], vec![b, 1.0 - b]],
                None
            )
            .unwrap()
        )),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn weak_star_is_a_pseudometric(mu in symbolic_measure(), nu in symbolic_measure(), rho in symbolic_measure()) {
        let fam = TestFamily::Cylinders { alphabet: 2, depth: 4 };
        let d = |x: &Measure, y: &Measure| weak_star_distance(x, y, &fam).unwrap();
        prop_assert_eq!(d(&mu, &mu), 0.0);
        prop_assert_eq!(d(&mu, &nu), d(&nu, &mu));
        prop_assert!(d(&mu, &rho) <= d(&mu, &nu) + d(&nu, &rho) + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn block_scan_is_monotone(p in cycle_word(2, 5)) {
        let full = TransitionMatrix::full_shift(2).unwrap();
        let fam = TestFamily::Cylinders { alphabet: 2, depth: 3 };
        let target = Measure::cycle(&p).unwrap();
        let r = bernoulli_approximation(&target, &full, Some(&p), &fam, 0.2, 12, 0).unwrap();
        prop_assert!(r.monotone, "{:?}", r.scan);
        prop_assert!(r.support_primitive);
        let sp = SymPoint::periodic(&p);
        prop_assert_eq!(sp.at(0), p[0]);
    }
}
