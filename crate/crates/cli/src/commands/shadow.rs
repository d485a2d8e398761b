//! Exact-period pseudo-orbits from a homoclinic datum, shadowed one period at a time.

use std::ops::RangeInclusive;

use lpmix_core::homoclinic::{
    build_periodic_pseudo_orbit, fit_datum, horseshoe_datum, reference_set, smallest_cyclic_period, symbolic_datum,
    toral_datum, verify_pseudo_orbit, ExcursionParameters, HomoclinicDatum, PseudoOrbit,
};
use lpmix_core::maps::{DynamicalSystem, SmoothSystem, System, SystemSpec, ToralAutomorphism, Vec2};
use lpmix_core::metric::word_length_for;
use lpmix_core::shadowing::{density_check, shadow_periodic, shadow_symbolic, PeriodicOrbit};
use lpmix_core::{Error, Result, Word};
use serde::{Deserialize, Serialize};

use super::{num, opt, Ctx};
use crate::config::ConfigFile;
use crate::output::Table;

pub const DEFAULT_DELTA: f64 = 1e-2;
/// Periods examined past `N0` when no upper end is given.
pub const DEFAULT_SPAN: usize = 30;
pub const DEFAULT_SEGMENT: [usize; 2] = [64, 64];
pub const NEWTON_TOL: f64 = 1e-10;
/// Tolerance for checking a user-supplied toral orbit.
const ORBIT_TOL: f64 = 1e-9;

/// `p` is a coding word for symbolic systems and the horseshoe, and the list
/// of orbit points `p, f(p), …` on the torus.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PeriodicInput {
    Word(Word),
    Points(Vec<Vec2>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Input {
    system: SystemSpec,
    p: PeriodicInput,
    delta: Option<f64>,
    n_from: Option<usize>,
    n_to: Option<usize>,
    segment: Option<[usize; 2]>,
}

#[derive(Debug, Serialize)]
pub struct Config {
    pub system: SystemSpec,
    pub p: PeriodicInput,
    pub delta: f64,
    /// `N0` when not given.
    pub n_from: usize,
    /// `n_from + 30` when not given.
    pub n_to: usize,
    /// Initial backward and forward length of the homoclinic segment.
    pub segment: [usize; 2],
    pub newton_tol: f64,
}

#[derive(Debug, Default, Serialize)]
pub struct Row {
    pub n: usize,
    pub defect: f64,
    pub within_delta: bool,
    pub exact_period: bool,
    pub hausdorff_to_reference: f64,
    pub residual: Option<f64>,
    pub shadow_distance: Option<f64>,
    pub bound: Option<f64>,
    pub primitive_period: Option<usize>,
    /// Largest distance from the reference set to the shadowing orbit.
    pub density_distance: Option<f64>,
    pub dense: Option<bool>,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct ShadowResult {
    pub tau: usize,
    pub parameters: ExcursionParameters,
    /// Segment lengths after fitting.
    pub segment: [usize; 2],
    pub hyperbolicity_constant: f64,
    /// Orbits must be `3ε`-dense in the reference set, with `ε = C·δ`.
    pub density_epsilon: f64,
    /// Word length `m` of `δ` and the resulting bound `2^-m` on symbolic defects.
    pub word_length: Option<usize>,
    pub defect_bound: Option<f64>,
    pub rows: Vec<Row>,
    pub all_pass: bool,
}

pub struct Overrides {
    pub delta: Option<f64>,
    pub n_from: Option<usize>,
    pub n_to: Option<usize>,
}

struct Request {
    delta: f64,
    n_from: Option<usize>,
    n_to: Option<usize>,
    segment: [usize; 2],
}

impl Request {
    fn range(&self, pr: &ExcursionParameters) -> RangeInclusive<usize> {
        let n0 = pr.n0 as usize;
        let from = self.n_from.unwrap_or(n0);
        from.max(n0)..=self.n_to.unwrap_or(from + DEFAULT_SPAN)
    }
}

fn word(p: &PeriodicInput) -> Result<Vec<u8>> {
    match p {
        PeriodicInput::Word(w) if !w.is_empty() => Ok(w.0.clone()),
        _ => Err(Error::InvalidInput(
            "p must be a non-empty coding word for this system".into(),
        )),
    }
}

/// The orbit must close up under `f` and have no shorter period.
fn toral_orbit(f: &ToralAutomorphism, p: &PeriodicInput) -> Result<Vec<Vec2>> {
    let PeriodicInput::Points(pts) = p else {
        return Err(Error::InvalidInput(
            "p must be the list of orbit points on the torus".into(),
        ));
    };
    if pts.is_empty() {
        return Err(Error::InvalidInput("empty periodic orbit".into()));
    }
    let n = pts.len();
    for i in 0..n {
        let d = f.distance(&f.evaluate(&pts[i]), &pts[(i + 1) % n]);
        if d > ORBIT_TOL {
            return Err(Error::InvalidInput(format!(
                "p is not a periodic orbit: step {i} misses by {d:e}"
            )));
        }
    }
    if smallest_cyclic_period(f, pts, ORBIT_TOL) != n {
        return Err(Error::InvalidInput("p repeats a shorter orbit".into()));
    }
    Ok(pts.clone())
}

struct Fitted<P> {
    datum: HomoclinicDatum<P>,
    params: ExcursionParameters,
    range: RangeInclusive<usize>,
}

fn fit<S: DynamicalSystem>(
    sys: &S,
    req: &Request,
    make: impl Fn(usize, usize) -> Result<HomoclinicDatum<S::Point>>,
) -> Result<Fitted<S::Point>> {
    if let (Some(a), Some(b)) = (req.n_from, req.n_to) {
        if b < a {
            return Err(Error::InvalidInput(format!("empty period range {a}..={b}")));
        }
    }
    let (datum, params) = fit_datum(sys, make, (req.segment[0], req.segment[1]), |pr| req.range(pr))?;
    if let Some(from) = req.n_from {
        if from < params.n0 as usize {
            return Err(Error::Precondition(format!(
                "period {from} is below N0 = {}; the construction covers n >= N0",
                params.n0
            )));
        }
    }
    let range = req.range(&params);
    if range.is_empty() {
        return Err(Error::InvalidInput(format!("empty period range {range:?}")));
    }
    Ok(Fitted { datum, params, range })
}

fn rows<S: DynamicalSystem>(
    sys: &S,
    fitted: &Fitted<S::Point>,
    density_epsilon: f64,
    shadow: impl Fn(&PseudoOrbit<S::Point>) -> Result<PeriodicOrbit<S::Point>>,
) -> Result<Vec<Row>> {
    let delta = fitted.datum.delta;
    let reference = reference_set(&fitted.datum, &fitted.params);
    fitted
        .range
        .clone()
        .map(|n| {
            let po = build_periodic_pseudo_orbit(sys, &fitted.datum, &fitted.params, n)?;
            let check = verify_pseudo_orbit(sys, &po, delta, &reference);
            let mut row = Row {
                n,
                defect: check.max_defect,
                within_delta: check.within_delta,
                exact_period: check.exact_period_ok,
                hausdorff_to_reference: check.hausdorff_to_reference,
                ..Row::default()
            };
            match shadow(&po) {
                Ok(o) => {
                    let density = density_check(sys, &o.points, &reference, 3.0 * density_epsilon);
                    row.residual = Some(o.residual);
                    row.shadow_distance = Some(o.shadow_distance);
                    row.bound = Some(o.bound);
                    row.primitive_period = Some(o.primitive_period);
                    row.density_distance = Some(density.worst_distance);
                    row.dense = Some(density.dense);
                    row.pass = check.within_delta
                        && check.exact_period_ok
                        && o.points.len() == n
                        && o.residual <= NEWTON_TOL
                        && density.dense;
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            Ok(row)
        })
        .collect()
}

fn summarize<P>(
    fitted: Fitted<P>,
    constant: f64,
    density_epsilon: f64,
    word_length: Option<usize>,
    rows: Vec<Row>,
) -> ShadowResult {
    let back = fitted.datum.back;
    ShadowResult {
        tau: fitted.datum.tau(),
        segment: [back, fitted.datum.fwd()],
        parameters: fitted.params,
        hyperbolicity_constant: constant,
        density_epsilon,
        word_length,
        defect_bound: word_length.map(|m| 0.5f64.powi(m as i32)),
        all_pass: rows.iter().all(|r| r.pass),
        rows,
    }
}

fn smooth<S: SmoothSystem>(
    sys: &S,
    req: &Request,
    make: impl Fn(usize, usize) -> Result<HomoclinicDatum<Vec2>>,
) -> Result<ShadowResult> {
    let fitted = fit(sys, req, make)?;
    let c = sys.hyperbolicity_constant();
    let eps = c * req.delta;
    let rows = rows(sys, &fitted, eps, |po| shadow_periodic(sys, po, NEWTON_TOL))?;
    Ok(summarize(fitted, c, eps, None, rows))
}

fn resolve_and_run(system: &SystemSpec, p: &PeriodicInput, req: &Request) -> Result<ShadowResult> {
    if !(req.delta > 0.0 && req.delta < 1.0) {
        return Err(Error::InvalidInput(format!("delta {} outside (0, 1)", req.delta)));
    }
    match system.build()? {
        System::Toral(f) => {
            let orbit = toral_orbit(&f, p)?;
            smooth(&f, req, |b, w| toral_datum(&f, &orbit, req.delta, b, w))
        }
        System::Horseshoe(h) => {
            let w = word(p)?;
            smooth(&h, req, |b, f| horseshoe_datum(&h, &w, req.delta, b, f))
        }
        System::Sft(s) => {
            let w = word(p)?;
            let fitted = fit(&s, req, |b, f| symbolic_datum(&s, &w, req.delta, b, f))?;
            let rows = rows(&s, &fitted, req.delta, |po| shadow_symbolic(&s, po))?;
            Ok(summarize(
                fitted,
                1.0,
                req.delta,
                Some(word_length_for(req.delta)?),
                rows,
            ))
        }
    }
}

pub fn run(ctx: &Ctx, cfg: &ConfigFile, o: &Overrides) -> Result<i32> {
    let input: Input = cfg.parse(&["system"])?;
    let req = Request {
        delta: o.delta.or(input.delta).unwrap_or(DEFAULT_DELTA),
        n_from: o.n_from.or(input.n_from),
        n_to: o.n_to.or(input.n_to),
        segment: input.segment.unwrap_or(DEFAULT_SEGMENT),
    };
    let result = resolve_and_run(&input.system, &input.p, &req)?;
    let config = Config {
        system: input.system,
        p: input.p,
        delta: req.delta,
        n_from: result.rows.first().map_or(0, |r| r.n),
        n_to: result.rows.last().map_or(0, |r| r.n),
        segment: req.segment,
        newton_tol: NEWTON_TOL,
    };
    let mut table = Table::new(&[
        "n",
        "defect",
        "within_delta",
        "exact_period",
        "residual",
        "shadow_distance",
        "bound",
        "density_distance",
        "dense",
        "pass",
    ]);
    for r in &result.rows {
        table.push(vec![
            r.n.to_string(),
            num(r.defect),
            r.within_delta.to_string(),
            r.exact_period.to_string(),
            opt(r.residual.map(num)),
            opt(r.shadow_distance.map(num)),
            opt(r.bound.map(num)),
            opt(r.density_distance.map(num)),
            opt(r.dense),
            r.pass.to_string(),
        ]);
    }
    ctx.emit("pseudo-shadow", &config, &result, &table)?;
    if result.all_pass {
        Ok(0)
    } else {
        let failed: Vec<String> = result
            .rows
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.n.to_string())
            .collect();
        eprintln!("error: shadowing failed for n = {}", failed.join(", "));
        Ok(4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lpmix_core::TransitionMatrix;

    fn req(n_from: Option<usize>, n_to: Option<usize>) -> Request {
        Request {
            delta: 0.01,
            n_from,
            n_to,
            segment: DEFAULT_SEGMENT,
        }
    }

    #[test]
    fn symbolic_rows_respect_the_word_length_bound() {
        let system = SystemSpec::Sft {
            matrix: TransitionMatrix::full_shift(2).unwrap(),
        };
        let r = resolve_and_run(&system, &PeriodicInput::Word(Word(vec![0, 1])), &req(None, None)).unwrap();
        assert!(r.all_pass);
        assert_eq!(r.rows.len(), DEFAULT_SPAN + 1);
        let bound = r.defect_bound.unwrap();
        assert_eq!(bound, 2f64.powi(-7));
        assert!(r.rows.iter().all(|row| row.defect <= bound));
    }

    #[test]
    fn periods_below_n0_are_a_precondition_failure() {
        let system = SystemSpec::Sft {
            matrix: TransitionMatrix::full_shift(2).unwrap(),
        };
        let e = resolve_and_run(&system, &PeriodicInput::Word(Word(vec![0, 1])), &req(Some(3), Some(5))).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn toral_orbits_are_validated() {
        let f = ToralAutomorphism::cat();
        assert!(toral_orbit(&f, &PeriodicInput::Points(vec![[0.2, 0.4], [0.8, 0.6]])).is_ok());
        assert!(toral_orbit(&f, &PeriodicInput::Points(vec![[0.2, 0.4]])).is_err());
        assert!(toral_orbit(&f, &PeriodicInput::Word(Word(vec![0]))).is_err());
    }
}
