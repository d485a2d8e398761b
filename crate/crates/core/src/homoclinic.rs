//! Periodic pseudo-orbits of every large period, built from a periodic point
//! `p` of period `τ` and a homoclinic point `q ∈ W^s(p) ⋔ W^u(f(p))`.
//!
//! With `x = f^{Nτ}(q)` and `l` the first return of the backward orbit of `x`
//! to `B(p, δ/2)` at times `-lτ-1`, a period `n ≡ r (mod τ)` is assembled from
//! `r` excursion strings of `lτ+1` points, each shifting the phase by one,
//! followed by a string of iterates of `x` near `p`. When `r = 0` the strings
//! are `τ` in number. For `τ = 1` a single excursion of `l+1` points suffices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{DynamicalSystem, Horseshoe, ShiftSystem, SymPoint, ToralAutomorphism, Vec2};

/// Periodic orbit `p, f(p), …` together with the segment `f^k(q)`, `k ∈ [-back, fwd]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomoclinicDatum<P> {
    pub orbit: Vec<P>,
    pub segment: Vec<P>,
    pub back: usize,
    pub delta: f64,
}

impl<P> HomoclinicDatum<P> {
    pub fn tau(&self) -> usize {
        self.orbit.len()
    }

    pub fn fwd(&self) -> usize {
        self.segment.len() - 1 - self.back
    }

    /// `f^k(q)`, if the segment reaches that far.
    pub fn q_at(&self, k: i64) -> Option<&P> {
        let i = k + self.back as i64;
        (i >= 0).then(|| self.segment.get(i as usize)).flatten()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcursionParameters {
    pub tau: usize,
    #[serde(rename = "N")]
    pub n_big: usize,
    /// Time of `x` along the orbit of `q`, `Nτ`.
    pub x_time: i64,
    pub l: usize,
    /// `k_r = r·l` for `r = 1..τ-1`.
    pub k_r: Vec<u64>,
    #[serde(rename = "L")]
    pub big_l: u64,
    /// `Lτ`, the bound stated for the phase-shifting branches.
    pub n0_paper: u64,
    /// Bound used by the builder: `(L + τl)τ` for `τ >= 2`, `l + 1` for `τ = 1`.
    pub n0: u64,
    /// Every `n >= n0_min` fits the string layout.
    pub n0_min: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoOrbit<P> {
    pub points: Vec<P>,
    pub n: usize,
    pub defect: f64,
    /// Indices `i` whose incoming step `x_{i-1} -> x_i` is a jump.
    pub jumps: Vec<usize>,
    /// Time along the orbit of `q` of each point.
    pub times: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoOrbitReport {
    pub max_defect: f64,
    pub within_delta: bool,
    /// False when a proper rotation maps the sequence to itself.
    pub exact_period_ok: bool,
    pub smallest_period: usize,
    pub hausdorff_to_reference: f64,
}

fn in_ball<S: DynamicalSystem>(sys: &S, d: &HomoclinicDatum<S::Point>, t: i64) -> Option<bool> {
    d.q_at(t).map(|x| sys.distance(x, &d.orbit[0]) <= d.delta / 2.0)
}

/// Locate `N` and `l` along the stored segment. For `τ >= 2`, `N` is minimal
/// with `f^{(N-r)τ}(q) ∈ B(p, δ/2)` for `r = 0..=τ`.
pub fn compute_excursion_parameters<S: DynamicalSystem>(
    sys: &S,
    d: &HomoclinicDatum<S::Point>,
) -> Result<ExcursionParameters> {
    let tau = d.tau();
    if tau == 0 || d.segment.is_empty() {
        return Err(Error::InvalidInput("empty homoclinic datum".into()));
    }
    let t = tau as i64;
    let grow_fwd = Error::InsufficientSegment {
        required_back: d.back,
        required_fwd: (2 * d.fwd()).max(2 * tau),
    };
    // the r = 0 branch runs τ excursions, so its first one starts from phase (N-τ)τ
    let phases = if tau == 1 { 1 } else { t + 1 };
    let mut n_big = 0usize;
    loop {
        let times = (0..phases).map(|r| (n_big as i64 - r) * t);
        if n_big as i64 * t > d.fwd() as i64 {
            return Err(grow_fwd);
        }
        if times.into_iter().all(|s| in_ball(sys, d, s) == Some(true)) {
            break;
        }
        n_big += 1;
    }
    let x_time = n_big as i64 * t;
    let mut l = 1usize;
    loop {
        let s = x_time - l as i64 * t - 1;
        match in_ball(sys, d, s) {
            None => {
                return Err(Error::InsufficientSegment {
                    required_back: (2 * d.back).max(2 * tau),
                    required_fwd: d.fwd(),
                })
            }
            Some(true) => break,
            Some(false) => l += 1,
        }
    }
    let k_r: Vec<u64> = (1..tau as u64).map(|r| r * l as u64).collect();
    let big_l = k_r
        .iter()
        .try_fold(1u64, |acc, &k| acc.checked_mul(k))
        .ok_or(Error::Overflow("product of the k_r"))?;
    let (lu, tu) = (l as u64, tau as u64);
    let overflow = || Error::Overflow("N0");
    let n0_paper = big_l.checked_mul(tu).ok_or_else(overflow)?;
    let (n0, n0_min) = if tau == 1 {
        (lu + 1, lu + 1)
    } else {
        let n0 = big_l
            .checked_add(tu * lu)
            .and_then(|v| v.checked_mul(tu))
            .ok_or_else(overflow)?;
        (n0, lu * tu * tu + 1)
    };
    Ok(ExcursionParameters {
        tau,
        n_big,
        x_time,
        l,
        k_r,
        big_l,
        n0_paper,
        n0,
        n0_min,
    })
}

/// Times along the orbit of `q` for each index of the period-`n` pseudo-orbit,
/// and the jump indices.
fn layout(pr: &ExcursionParameters, n: usize) -> (Vec<i64>, Vec<usize>) {
    let (tau, l) = (pr.tau as i64, pr.l as i64);
    if tau == 1 {
        let start = pr.x_time - l - 1;
        return ((0..n as i64).map(|i| start + i).collect(), vec![0]);
    }
    let r = n as i64 % tau;
    let s = if r == 0 { tau } else { r };
    let string = l * tau + 1;
    let mut times = Vec::with_capacity(n);
    let mut jumps = vec![0];
    for j in 0..s {
        if j > 0 {
            jumps.push(times.len());
        }
        let t0 = pr.x_time - (l + s - j) * tau - 1;
        times.extend(t0..t0 + string);
    }
    let rest = n as i64 - s * string;
    if rest > 0 {
        jumps.push(times.len());
        times.extend(pr.x_time..pr.x_time + rest);
    }
    (times, jumps)
}

/// Largest `d(f(x_i), x_{i+1 mod n})`.
pub fn cyclic_defects<S: DynamicalSystem>(sys: &S, pts: &[S::Point]) -> Vec<f64> {
    let n = pts.len();
    (0..n)
        .map(|i| sys.distance(&sys.evaluate(&pts[i]), &pts[(i + 1) % n]))
        .collect()
}

/// Assemble the periodic `δ`-pseudo-orbit of exact length `n`.
pub fn build_periodic_pseudo_orbit<S: DynamicalSystem>(
    sys: &S,
    d: &HomoclinicDatum<S::Point>,
    pr: &ExcursionParameters,
    n: usize,
) -> Result<PseudoOrbit<S::Point>> {
    if (n as u64) < pr.n0 {
        return Err(Error::Precondition(format!("period {n} is below N0 = {}", pr.n0)));
    }
    let (times, jumps) = layout(pr, n);
    debug_assert_eq!(times.len(), n);
    let lo = *times.iter().min().unwrap();
    let hi = *times.iter().max().unwrap();
    if lo < -(d.back as i64) || hi > d.fwd() as i64 {
        return Err(Error::InsufficientSegment {
            required_back: d.back.max((-lo).max(0) as usize),
            required_fwd: d.fwd().max(hi.max(0) as usize),
        });
    }
    let points: Vec<S::Point> = times.iter().map(|&t| d.q_at(t).unwrap().clone()).collect();
    let defects = cyclic_defects(sys, &points);
    let defect = defects.iter().cloned().fold(0.0, f64::max);
    if defect > d.delta {
        let at = defects.iter().position(|&e| e == defect).unwrap();
        return Err(Error::Precondition(format!(
            "jump after index {at} has size {defect:e}, above delta = {:e}",
            d.delta
        )));
    }
    Ok(PseudoOrbit {
        points,
        n,
        defect,
        jumps,
        times,
    })
}

/// Datum, parameters and pseudo-orbit after a refit.
pub type Refit<P> = (HomoclinicDatum<P>, ExcursionParameters, PseudoOrbit<P>);

/// Build for period `n`, regenerating the datum with a doubled segment while
/// it is too short.
pub fn build_with_refit<S: DynamicalSystem>(
    sys: &S,
    make: impl Fn(usize, usize) -> Result<HomoclinicDatum<S::Point>>,
    initial: (usize, usize),
    n: usize,
) -> Result<Refit<S::Point>> {
    let (mut back, mut fwd) = initial;
    for _ in 0..24 {
        let d = make(back, fwd)?;
        let attempt = compute_excursion_parameters(sys, &d)
            .and_then(|pr| build_periodic_pseudo_orbit(sys, &d, &pr, n).map(|po| (pr, po)));
        match attempt {
            Ok((pr, po)) => return Ok((d, pr, po)),
            Err(Error::InsufficientSegment {
                required_back,
                required_fwd,
            }) => {
                back = back.max(required_back);
                fwd = fwd.max(required_fwd);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::InsufficientSegment {
        required_back: back,
        required_fwd: fwd,
    })
}

/// Grow the segment of a datum until the parameters and every period in
/// `periods(&parameters)` can be built from it.
pub fn fit_datum<S: DynamicalSystem>(
    sys: &S,
    make: impl Fn(usize, usize) -> Result<HomoclinicDatum<S::Point>>,
    initial: (usize, usize),
    periods: impl Fn(&ExcursionParameters) -> std::ops::RangeInclusive<usize>,
) -> Result<(HomoclinicDatum<S::Point>, ExcursionParameters)> {
    let (mut back, mut fwd) = initial;
    for _ in 0..24 {
        let d = make(back, fwd)?;
        let attempt = compute_excursion_parameters(sys, &d).and_then(|pr| {
            for n in periods(&pr) {
                build_periodic_pseudo_orbit(sys, &d, &pr, n)?;
            }
            Ok(pr)
        });
        match attempt {
            Ok(pr) => return Ok((d, pr)),
            Err(Error::InsufficientSegment {
                required_back,
                required_fwd,
            }) => {
                back = back.max(required_back);
                fwd = fwd.max(required_fwd);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::InsufficientSegment {
        required_back: back,
        required_fwd: fwd,
    })
}

/// `O(p)` together with the part of the orbit of `q` used by the excursions.
pub fn reference_set<P: Clone>(d: &HomoclinicDatum<P>, pr: &ExcursionParameters) -> Vec<P> {
    let (tau, l) = (pr.tau as i64, pr.l as i64);
    let lo = pr.x_time - (l + tau) * tau - 1;
    let hi = pr.x_time + tau;
    let mut out = d.orbit.clone();
    out.extend((lo..=hi).filter_map(|t| d.q_at(t).cloned()));
    out
}

pub fn hausdorff<S: DynamicalSystem>(sys: &S, a: &[S::Point], b: &[S::Point]) -> f64 {
    let one_way = |x: &[S::Point], y: &[S::Point]| {
        x.iter()
            .map(|p| y.iter().map(|q| sys.distance(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Smallest `d | n` with `x_{i+d} = x_i` for all `i`, up to distance `tol`.
pub fn smallest_cyclic_period<S: DynamicalSystem>(sys: &S, pts: &[S::Point], tol: f64) -> usize {
    let n = pts.len();
    (1..=n)
        .filter(|d| n % d == 0)
        .find(|&d| (0..n).all(|i| sys.distance(&pts[i], &pts[(i + d) % n]) <= tol))
        .unwrap_or(n)
}

/// Recompute defect, exact period and distance to a reference set from scratch.
pub fn verify_pseudo_orbit<S: DynamicalSystem>(
    sys: &S,
    po: &PseudoOrbit<S::Point>,
    delta: f64,
    reference: &[S::Point],
) -> PseudoOrbitReport {
    let max_defect = cyclic_defects(sys, &po.points).into_iter().fold(0.0, f64::max);
    let smallest_period = smallest_cyclic_period(sys, &po.points, 1e-12);
    PseudoOrbitReport {
        max_defect,
        within_delta: max_defect <= delta,
        exact_period_ok: smallest_period == po.points.len(),
        smallest_period,
        hausdorff_to_reference: hausdorff(sys, &po.points, reference),
    }
}

/// Toral datum: `p` is given by its orbit, `q` by the line-intersection oracle.
pub fn toral_datum(
    sys: &ToralAutomorphism,
    orbit: &[Vec2],
    delta: f64,
    back: usize,
    fwd: usize,
) -> Result<HomoclinicDatum<Vec2>> {
    let h = sys.homoclinic_point(orbit, 3)?;
    Ok(HomoclinicDatum {
        orbit: orbit.to_vec(),
        segment: sys.homoclinic_segment(orbit, &h, back, fwd),
        back,
        delta,
    })
}

/// Symbolic datum from the spliced homoclinic word of the cycle `p`.
pub fn symbolic_datum(
    sys: &ShiftSystem,
    p: &[u8],
    delta: f64,
    back: usize,
    fwd: usize,
) -> Result<HomoclinicDatum<SymPoint>> {
    let q = sys.homoclinic_point(p)?;
    let base = SymPoint::periodic(p);
    Ok(HomoclinicDatum {
        orbit: (0..p.len() as i64).map(|i| base.shifted(i)).collect(),
        segment: (-(back as i64)..=fwd as i64).map(|k| q.shifted(k)).collect(),
        back,
        delta,
    })
}

/// Horseshoe datum: the symbolic datum of the coding word `p` pushed through the coding map.
pub fn horseshoe_datum(
    sys: &Horseshoe,
    p: &[u8],
    delta: f64,
    back: usize,
    fwd: usize,
) -> Result<HomoclinicDatum<Vec2>> {
    const DEPTH: usize = 60;
    let s = symbolic_datum(&ShiftSystem::new(sys.transition_matrix()), p, delta, back, fwd)?;
    let code = |x: &SymPoint| sys.code(|t| x.at(t), DEPTH);
    Ok(HomoclinicDatum {
        orbit: s.orbit.iter().map(code).collect(),
        segment: s.segment.iter().map(code).collect(),
        back,
        delta,
    })
}
