use std::fs;
use std::path::Path;

use dehnscope_core::cochain::{class_rank, h1_dimension, is_cocycle, solve_coboundary, Cocycle, MarkedRepresentation};
use dehnscope_core::filling_solver::{
    cusp_distance, filling_sequence, solve_direct, solve_on_path, verify_coordinate_continuity, HolomorphicPath,
};
use dehnscope_core::schwarzian_end::{injectivity_depth, jacobian_check, point_at, schwarzian, ConformalMap, Grid};
use dehnscope_core::torus_end::{estimate_bilipschitz, ChartVariant, EndRegion};
use dehnscope_core::{Complex, End, Error, Tolerances};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{parse_region, parse_sweep, Command, EndArgs, Format};

/// Settings shared by all subcommands.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub tolerances: Tolerances<f64>,
    /// Default grid for Schwarzian sweeps, "x0:x1:n,y0:y1:m".
    pub grid: String,
    pub format: Format,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { tolerances: Tolerances::default(), grid: "-2:2:81,0.05:4:80".into(), format: Format::Json, seed: 0 }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("bad config {}: {e}", path.display())))?;
        cfg.tolerances.validate().map_err(|e| Failure::usage(e.to_string()))?;
        Grid::<f64>::parse(&cfg.grid).map_err(|e| Failure::usage(e.to_string()))?;
        Ok(cfg)
    }
}

/// A failed run: exit code and message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DomainExit(_)
            | Error::CriticalPoint(_)
            | Error::StepTooLarge
            | Error::StepTooSmall(_)
            | Error::ParabolicInput
            | Error::IdentityInput
            | Error::OutsideDomain(_)
            | Error::SingularNormalization => 1,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

/// Payload plus whether the computation declared success.
pub struct Outcome {
    pub value: Value,
    pub converged: bool,
}

impl From<Value> for Outcome {
    fn from(value: Value) -> Self {
        Self { value, converged: true }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload types serialize to JSON")
}

fn pair(z: Complex) -> Value {
    json!([z.re, z.im])
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("bad input {}: {e}", path.display())))
}

fn end(args: &EndArgs) -> Result<End, Failure> {
    Ok(End::new(args.a, args.b)?)
}

fn conformal(name: &str) -> Result<ConformalMap<f64>, Failure> {
    ConformalMap::parse(name).map_err(|e| Failure::usage(e.to_string()))
}

pub fn run(command: &Command, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let tol = &cfg.tolerances;
    match command {
        Command::Holonomy { end: e, m, n } => {
            let s = end(e)?;
            let h = s.holonomy(*m, *n);
            let length = h.complex_translation_length(tol).ok().map(pair);
            Ok(json!({
                "m": m,
                "n": n,
                "matrix": to_value(&h),
                "classification": to_value(&h.classify(tol)),
                "complex_length": length,
            })
            .into())
        }
        Command::Fill { end: e, classify, tol: rational, max_den } => {
            let s = end(e)?;
            let mut out = json!({ "coordinates": to_value(&s.filling_coordinates()) });
            if *classify {
                let rt = rational.unwrap_or(tol.rational);
                if !(rt > 0.0) {
                    return Err(Failure::usage("--tol must be positive"));
                }
                out["completion"] = to_value(&s.classify_completion(rt, *max_den));
            }
            Ok(out.into())
        }
        Command::Sequence { b, p, q, n } => {
            let ns: Vec<i64> = (n.0..=n.1).collect();
            let rows: Vec<Value> = filling_sequence(*b, *p, *q, &ns)?
                .iter()
                .map(|t| {
                    Ok(json!({
                        "n": t.n,
                        "x": t.coordinates.0,
                        "y": t.coordinates.1,
                        "a_re": t.end.a().re,
                        "a_im": t.end.a().im,
                        "cusp_residual": cusp_distance(&t.end, *b)?,
                    }))
                })
                .collect::<Result<_, Error>>()?;
            Ok(Value::Array(rows).into())
        }
        Command::Solve { x, y, b, path, w0, tol: newton, max_iter } => match (b, path) {
            (Some(b), None) => {
                let s = solve_direct(*b, *x, *y)?;
                Ok(json!({ "end": to_value(&s), "coordinates": to_value(&s.filling_coordinates()) }).into())
            }
            (None, Some(path)) => {
                let path: HolomorphicPath<f64> = read_json(path)?;
                let w0 = w0.ok_or_else(|| Failure::usage("--w0 is required with --path"))?;
                let nt = newton.unwrap_or(tol.newton);
                let report = solve_on_path(&path, *x, *y, w0, nt, *max_iter)?;
                let mut out = to_value(&report);
                if report.converged {
                    out["end"] = to_value(&path.end_at(report.w)?);
                }
                Ok(Outcome { value: out, converged: report.converged })
            }
            _ => Err(Failure::usage("give exactly one of --b or --path")),
        },
        Command::Continuity { path, samples } => {
            let path: HolomorphicPath<f64> = read_json(path)?;
            let report = verify_coordinate_continuity(&path, *samples, cfg.seed)?;
            Ok(json!({
                "samples": report.samples,
                "seed": cfg.seed,
                "max_jump": report.max_jump,
                "injectivity_violations": report.injectivity_violations,
                "example_pairs": report.example_pairs,
            })
            .into())
        }
        Command::Crosssection { end: e, x, y, eps, eps_grid } => {
            let s = end(e)?;
            match (eps, eps_grid) {
                (Some(eps), None) => Ok(json!({ "eps": eps, "length": s.cross_section_length(*x, *y, *eps)? }).into()),
                (None, Some(g)) => {
                    let rows: Vec<Value> = parse_sweep(g)
                        .map_err(Failure::usage)?
                        .into_iter()
                        .map(|eps| Ok(json!({ "eps": eps, "length": s.cross_section_length(*x, *y, eps)? })))
                        .collect::<Result<_, Error>>()?;
                    Ok(Value::Array(rows).into())
                }
                _ => Err(Failure::usage("give exactly one of --eps or --eps-grid")),
            }
        }
        Command::Bilipschitz { end: e, a2, b2, region, samples } => {
            let (s1, s2) = (end(e)?, End::new(*a2, *b2)?);
            let [x, y, t] = parse_region(region).map_err(Failure::usage)?;
            let region = EndRegion::new(x, y, t)?;
            let k = estimate_bilipschitz(&s1, &s2, &region, *samples, cfg.seed, ChartVariant::default())?;
            Ok(json!({ "k": k, "samples": samples, "seed": cfg.seed }).into())
        }
        Command::Schwarzian { f, z, grid, depth } => {
            let map = conformal(f)?;
            if let Some(z) = z {
                let value = schwarzian(&map, *z)?;
                let norm = (z.im > 0.0).then(|| z.im * z.im * value.norm());
                return Ok(json!({ "z": pair(*z), "value": pair(value), "norm": norm }).into());
            }
            let grid = Grid::<f64>::parse(grid.as_deref().unwrap_or(&cfg.grid)).map_err(|e| Failure::usage(e.to_string()))?;
            if *depth {
                return Ok(to_value(&injectivity_depth(&map, &grid)?).into());
            }
            let rows: Vec<Value> = grid
                .points()
                .into_iter()
                .map(|z| {
                    let v = schwarzian(&map, z)?;
                    let norm = (z.im > 0.0).then(|| z.im * z.im * v.norm());
                    Ok(json!({ "x": z.re, "y": z.im, "re": v.re, "im": v.im, "norm": norm }))
                })
                .collect::<Result<_, Error>>()?;
            Ok(Value::Array(rows).into())
        }
        Command::ThetaCheck { f, point, h } => {
            let map = conformal(f)?;
            let fp = point_at(point.0, point.1)?;
            Ok(to_value(&jacobian_check(&map, &fp.p, *h)?).into())
        }
        Command::Cocycle { rep, a, b, cocycle } => {
            let rep: MarkedRepresentation<f64> = match (rep, a, b) {
                (Some(path), None, None) => read_json(path)?,
                (None, Some(a), Some(b)) => MarkedRepresentation::torus(&End::new(*a, *b)?),
                _ => return Err(Failure::usage("give either --rep or both --a and --b")),
            };
            let mut out = json!({ "dimensions": to_value(&h1_dimension(&rep, tol.rank)?) });
            if let Some(path) = cocycle {
                let c: Cocycle<f64> = read_json(path)?;
                let (ok, residual) = is_cocycle(&rep, &c, tol.identity)?;
                let sol = solve_coboundary(&rep, &c, tol.rank)?;
                out["is_cocycle"] = json!(ok);
                out["relator_residual"] = json!(residual);
                out["coboundary"] = to_value(&sol);
                out["class_rank"] = json!(class_rank(&rep, std::slice::from_ref(&c), tol.rank)?);
            }
            Ok(out.into())
        }
    }
}
