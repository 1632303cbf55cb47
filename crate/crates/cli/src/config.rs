//! TOML run configuration. Every table rejects unknown keys; tolerances
//! have no defaults.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use duts_core::construct::{Caps, Problem};
use duts_core::error::Error;
use duts_core::poly::{CenteredPolynomial, DegreeWindow};
use duts_core::probe::Schedule;
use duts_core::runge::Tolerances;
use duts_core::sequence::{Formula, SequenceSpec};
use duts_core::sets::{sample, SampledSet, SetSpec};
use duts_core::solver::{FitGrid, FitTask, SolverOptions, DEFAULT_FACETS};
use duts_core::target::TargetFunction;

/// `[re, im]`
type Pair = [f64; 2];

fn cx(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub format: u32,
    pub solver: Option<SolverToml>,
    pub solve: Option<SolveToml>,
    pub construct: Option<ConstructToml>,
    pub probe: Option<ProbeToml>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverToml {
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub facets: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SetToml {
    Disk { center: Pair, radius: f64 },
    Segment { a: Pair, b: Pair },
    Polygon { vertices: Vec<Pair>, filled: bool },
    Union { members: Vec<SetToml> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridToml {
    pub set: SetToml,
    pub density: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyToml {
    pub center: Pair,
    pub coeffs: Vec<Pair>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TargetToml {
    Zero,
    Identity,
    Constant { value: Pair },
    Polynomial { center: Pair, coeffs: Vec<Pair> },
    /// `1 / (z - at)`
    Pole { at: Pair },
    Rational { numerator: PolyToml, denominator: PolyToml },
    Table { points: Vec<Pair>, values: Vec<Pair> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceToml {
    pub formula: Option<String>,
    pub table: Option<Vec<u64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsToml {
    pub max_candidates: Option<usize>,
    pub max_window_degree: Option<usize>,
    pub max_runge_degree: Option<usize>,
    pub horizon: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructToml {
    pub zeta0: Pair,
    pub epsilon: f64,
    pub s: u64,
    pub sequence: SequenceToml,
    #[serde(rename = "L")]
    pub l: GridToml,
    #[serde(rename = "K1")]
    pub k1: GridToml,
    #[serde(rename = "K2")]
    pub k2: GridToml,
    pub g: TargetToml,
    pub f1: TargetToml,
    pub f2: TargetToml,
    pub omega: Option<SetToml>,
    pub caps: Option<CapsToml>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveGridToml {
    pub name: String,
    pub set: SetToml,
    pub density: f64,
    pub target: TargetToml,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lawson,
    Lp,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveToml {
    pub center: Pair,
    /// `[low, high]`
    pub window: [usize; 2],
    pub method: Option<Method>,
    pub grids: Vec<SolveGridToml>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleToml {
    pub tau: Option<String>,
    pub sigma: Option<String>,
    pub first: Option<u64>,
    pub last: Option<u64>,
    /// Explicit `[tau, sigma]` pairs instead of formulas.
    pub pairs: Option<Vec<[usize; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeToml {
    pub f: TargetToml,
    #[serde(rename = "K")]
    pub k: GridToml,
    #[serde(rename = "L")]
    pub l: GridToml,
    pub schedule: ScheduleToml,
}

/// Prefixes a validation error's field with its position in the config.
fn at(path: &str, e: Error) -> Error {
    match e {
        Error::Invalid { field, reason } => Error::Invalid {
            field: format!("{path}.{field}"),
            reason,
        },
        other => other,
    }
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

pub fn load(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn parse(text: &str) -> Result<RunConfig, String> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    if first.map(|l| l.replace(' ', "")) != Some("format=1".into()) {
        return Err("the first setting must be `format = 1`".into());
    }
    let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
    if cfg.format != 1 {
        return Err(format!("unsupported format {}", cfg.format));
    }
    Ok(cfg)
}

impl SetToml {
    pub fn to_spec(&self) -> SetSpec {
        match self {
            SetToml::Disk { center, radius } => SetSpec::disk(cx(*center), *radius),
            SetToml::Segment { a, b } => SetSpec::segment(cx(*a), cx(*b)),
            SetToml::Polygon { vertices, filled } => {
                SetSpec::polygon(vertices.iter().map(|v| cx(*v)).collect(), *filled)
            }
            SetToml::Union { members } => SetSpec::Union(members.iter().map(SetToml::to_spec).collect()),
        }
    }

    pub fn build(&self, path: &str) -> Result<SetSpec, Error> {
        let spec = self.to_spec();
        spec.validate().map_err(|e| at(path, e))?;
        Ok(spec)
    }
}

impl GridToml {
    pub fn build(&self, path: &str) -> Result<SampledSet, Error> {
        let spec = self.set.build(&format!("{path}.set"))?;
        sample(&spec, self.density).map_err(|e| at(path, e))
    }
}

impl PolyToml {
    fn build(&self, path: &str) -> Result<CenteredPolynomial, Error> {
        CenteredPolynomial::new(cx(self.center), self.coeffs.iter().map(|c| cx(*c)).collect())
            .map_err(|e| at(path, e))
    }
}

impl TargetToml {
    pub fn build(&self, path: &str) -> Result<TargetFunction, Error> {
        let t = match self {
            TargetToml::Zero => TargetFunction::zero(),
            TargetToml::Identity => TargetFunction::identity(),
            TargetToml::Constant { value } => TargetFunction::constant(cx(*value)),
            TargetToml::Polynomial { center, coeffs } => TargetFunction::Polynomial(
                PolyToml {
                    center: *center,
                    coeffs: coeffs.clone(),
                }
                .build(path)?,
            ),
            TargetToml::Pole { at: a } => TargetFunction::simple_pole(cx(*a)).map_err(|e| at(path, e))?,
            TargetToml::Rational {
                numerator,
                denominator,
            } => TargetFunction::rational(
                numerator.build(&format!("{path}.numerator"))?,
                denominator.build(&format!("{path}.denominator"))?,
            )
            .map_err(|e| at(path, e))?,
            TargetToml::Table { points, values } => {
                if points.len() != values.len() {
                    return Err(invalid(
                        format!("{path}.values"),
                        format!("{} values for {} points", values.len(), points.len()),
                    ));
                }
                TargetFunction::table(points.iter().zip(values).map(|(z, v)| (cx(*z), cx(*v))).collect())
                    .map_err(|e| at(path, e))?
            }
        };
        Ok(t)
    }
}

impl SequenceToml {
    pub fn build(&self, path: &str) -> Result<SequenceSpec, Error> {
        match (&self.formula, &self.table) {
            (Some(f), None) => SequenceSpec::formula(f).map_err(|e| at(path, e)),
            (None, Some(t)) => SequenceSpec::table(t.clone()).map_err(|e| at(path, e)),
            _ => Err(invalid(path, "give exactly one of `formula` or `table`")),
        }
    }
}

impl RunConfig {
    pub fn solver_options(&self) -> Result<(SolverOptions, usize), Error> {
        let mut opts = SolverOptions::default();
        let s = self.solver.as_ref();
        if let Some(tol) = s.and_then(|s| s.tol) {
            opts.tol = tol;
        }
        if let Some(it) = s.and_then(|s| s.max_iters) {
            opts.max_iters = it;
        }
        opts.validate().map_err(|e| at("solver", e))?;
        let facets = s.and_then(|s| s.facets).unwrap_or(DEFAULT_FACETS);
        if facets < 3 {
            return Err(invalid("solver.facets", "need at least 3"));
        }
        Ok((opts, facets))
    }

    fn section<'a, T>(&self, sec: &'a Option<T>, name: &str) -> Result<&'a T, Error> {
        sec.as_ref()
            .ok_or_else(|| invalid(name, "section missing from the config"))
    }

    pub fn construct_problem(&self) -> Result<(Problem, Caps), Error> {
        let c = self.section(&self.construct, "construct")?;
        let tol = Tolerances::new(c.epsilon, c.s).map_err(|e| at("construct", e))?;
        let problem = Problem {
            g: c.g.build("construct.g")?,
            l: c.l.build("construct.L")?,
            f1: c.f1.build("construct.f1")?,
            k1: c.k1.build("construct.K1")?,
            f2: c.f2.build("construct.f2")?,
            k2: c.k2.build("construct.K2")?,
            zeta0: cx(c.zeta0),
            sequence: c.sequence.build("construct.sequence")?,
            tol,
            omega: c.omega.as_ref().map(|o| o.build("construct.omega")).transpose()?,
        };
        let mut caps = Caps {
            solver: self.solver_options()?.0,
            ..Caps::default()
        };
        let k = c.caps.as_ref();
        if let Some(v) = k.and_then(|k| k.max_candidates) {
            caps.max_candidates = v;
        }
        if let Some(v) = k.and_then(|k| k.max_window_degree) {
            caps.max_window_degree = v;
        }
        if let Some(v) = k.and_then(|k| k.max_runge_degree) {
            caps.max_runge_degree = v;
        }
        if let Some(v) = k.and_then(|k| k.horizon) {
            caps.horizon = v;
        }
        caps.validate().map_err(|e| at("construct.caps", e))?;
        Ok((problem, caps))
    }

    pub fn solve_task(&self) -> Result<(FitTask, bool), Error> {
        let s = self.section(&self.solve, "solve")?;
        let window = DegreeWindow::new(s.window[0], s.window[1]).map_err(|e| at("solve.window", e))?;
        let mut grids = Vec::with_capacity(s.grids.len());
        for (i, g) in s.grids.iter().enumerate() {
            let path = format!("solve.grids[{i}]");
            let set = sample(&g.set.build(&format!("{path}.set"))?, g.density).map_err(|e| at(&path, e))?;
            let target = g.target.build(&format!("{path}.target"))?;
            let values = target.values_on(set.points())?;
            grids.push(FitGrid::from_set(g.name.clone(), &set, values).map_err(|e| at(&path, e))?);
        }
        let task = FitTask::new(grids, window, cx(s.center)).map_err(|e| at("solve", e))?;
        Ok((task, matches!(s.method, Some(Method::Lp))))
    }

    pub fn probe_inputs(&self) -> Result<(TargetFunction, SampledSet, SampledSet, Schedule), Error> {
        let p = self.section(&self.probe, "probe")?;
        let sc = &p.schedule;
        let schedule = match (&sc.pairs, &sc.tau, &sc.sigma, sc.first, sc.last) {
            (Some(pairs), None, None, None, None) => {
                Schedule::new(pairs.iter().map(|p| (p[0], p[1])).collect())
            }
            (None, Some(tau), Some(sigma), Some(first), Some(last)) => Schedule::from_formulas(
                &Formula::parse(tau).map_err(|e| at("probe.schedule.tau", e))?,
                &Formula::parse(sigma).map_err(|e| at("probe.schedule.sigma", e))?,
                first,
                last,
            ),
            _ => Err(invalid(
                "probe.schedule",
                "give either `pairs` or all of `tau`, `sigma`, `first`, `last`",
            )),
        }
        .map_err(|e| match e {
            Error::Invalid { field, reason } if !field.starts_with("probe") => Error::Invalid {
                field: format!("probe.{field}"),
                reason,
            },
            e => e,
        })?;
        Ok((
            p.f.build("probe.f")?,
            p.k.build("probe.K")?,
            p.l.build("probe.L")?,
            schedule,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAGSHIP: &str = include_str!("../configs/flagship.toml");

    #[test]
    fn flagship_config_builds() {
        let cfg = parse(FLAGSHIP).unwrap();
        let (p, caps) = cfg.construct_problem().unwrap();
        assert_eq!(p.tol.s(), 100);
        assert_eq!(caps.max_candidates, 12);
        assert!(p.omega.is_some());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = FLAGSHIP.replace("epsilon = 0.01", "epsilon = 0.01\nepsilom = 0.02");
        let err = parse(&bad).unwrap_err();
        assert!(err.contains("epsilom"), "{err}");
    }

    #[test]
    fn tolerances_have_no_defaults() {
        let bad = FLAGSHIP.replace("epsilon = 0.01\n", "");
        assert!(parse(&bad).unwrap_err().contains("epsilon"));
    }

    #[test]
    fn format_line_must_lead() {
        assert!(parse("[solver]\nformat = 1\n").is_err());
        assert!(parse(&FLAGSHIP.replacen("format = 1", "format = 2", 1)).is_err());
    }

    #[test]
    fn validation_errors_name_the_field() {
        let bad = FLAGSHIP.replace("radius = 0.5 }\ndensity = 20", "radius = -0.5 }\ndensity = 20");
        let cfg = parse(&bad).unwrap();
        match cfg.construct_problem().unwrap_err() {
            Error::Invalid { field, .. } => assert!(field.starts_with("construct.L.set"), "{field}"),
            e => panic!("{e}"),
        }
    }
}
