use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dehnscope_core::Complex;
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "dehnscope", version, about = "Torus ends, Dehn filling coordinates and Schwarzian ends in PSL(2,C)")]
pub struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format; overrides the configuration.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for sampled diagnostics; overrides the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct EndArgs {
    /// Complex shape parameter `a` as "re,im".
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub a: Complex,
    /// Modulus `b` as "re,im", with Im b > 0.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub b: Complex,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Holonomy of the class (m, n): matrix, type and complex length.
    Holonomy {
        #[command(flatten)]
        end: EndArgs,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Filling coordinates, optionally with the completion type.
    Fill {
        #[command(flatten)]
        end: EndArgs,
        #[arg(long)]
        classify: bool,
        /// Tolerance for rational detection (default from config).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        max_den: u64,
    },
    /// Ends filled along (p, q) + n (r, s) with ps − qr = 1.
    Sequence {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        b: Complex,
        #[arg(long, allow_hyphen_values = true)]
        p: i64,
        #[arg(long, allow_hyphen_values = true)]
        q: i64,
        /// Inclusive range "start..end".
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        n: (i64, i64),
    },
    /// Solve for the end with filling coordinates (x, y).
    Solve {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        /// Fixed modulus: closed-form solve.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with = "path")]
        b: Option<Complex>,
        /// Holomorphic path (JSON) for Newton iteration.
        #[arg(long, requires = "w0")]
        path: Option<PathBuf>,
        /// Newton start "re,im".
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        w0: Option<Complex>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 64)]
        max_iter: usize,
    },
    /// Sampled continuity and injectivity report for a path's filling coordinates.
    Continuity {
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// Length of the (x, y) curve on the tube of radius eps.
    Crosssection {
        #[command(flatten)]
        end: EndArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        /// Single radius.
        #[arg(long, conflicts_with = "eps_grid", required_unless_present = "eps_grid")]
        eps: Option<f64>,
        /// Radius sweep "lo:hi:count".
        #[arg(long)]
        eps_grid: Option<String>,
    },
    /// Bi-Lipschitz estimate between the developed charts of two ends.
    Bilipschitz {
        #[command(flatten)]
        end: EndArgs,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a2: Complex,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        b2: Complex,
        /// Region "x0:x1,y0:y1,t0:t1".
        #[arg(long, default_value = "0:1,0:1,1:2", allow_hyphen_values = true)]
        region: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Schwarzian derivative at a point, or its norm over a grid.
    Schwarzian {
        /// identity | square | log | power:<re>[,<im>] | mobius:<8 numbers>
        #[arg(long)]
        f: String,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, required_unless_present = "grid")]
        z: Option<Complex>,
        /// Grid "x0:x1:n,y0:y1:m" (default from config when --depth is given).
        #[arg(long, allow_hyphen_values = true, conflicts_with = "z")]
        grid: Option<String>,
        /// Report the injectivity depth over the grid instead of rows.
        #[arg(long, requires = "grid")]
        depth: bool,
    },
    /// Jacobian of Θ_f at the point of P_d over a base point.
    ThetaCheck {
        #[arg(long)]
        f: String,
        /// "base_re,base_im,d"
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: (Complex, f64),
        #[arg(long, default_value_t = 1e-4)]
        h: f64,
    },
    /// H¹ dimensions of a marked representation, and cocycle checks.
    Cocycle {
        /// Marked representation (JSON).
        #[arg(long, conflicts_with_all = ["a", "b"], required_unless_present_any = ["a", "b"])]
        rep: Option<PathBuf>,
        /// Use the peripheral Z² of the end (a, b) instead.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, requires = "b")]
        a: Option<Complex>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, requires = "a")]
        b: Option<Complex>,
        /// Cocycle values (JSON list of sl2 matrices) to check and solve.
        #[arg(long)]
        cocycle: Option<PathBuf>,
    },
}

pub fn parse_complex(s: &str) -> Result<Complex, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected \"re,im\", got \"{s}\""))?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number \"{v}\": {e}"));
    let z = Complex::new(p(re)?, p(im)?);
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(format!("non-finite value \"{s}\""));
    }
    Ok(z)
}

pub fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected \"start..end\", got \"{s}\""))?;
    let p = |v: &str| v.trim().parse::<i64>().map_err(|e| format!("bad integer \"{v}\": {e}"));
    let (lo, hi) = (p(lo)?, p(hi)?);
    if hi < lo {
        return Err(format!("empty range \"{s}\""));
    }
    Ok((lo, hi))
}

pub fn parse_point(s: &str) -> Result<(Complex, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [re, im, d] = parts.as_slice() else {
        return Err(format!("expected \"base_re,base_im,d\", got \"{s}\""));
    };
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number \"{v}\": {e}"));
    Ok((Complex::new(p(re)?, p(im)?), p(d)?))
}

/// Parses "lo:hi:count" into `count` evenly spaced values.
pub fn parse_sweep(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(format!("expected \"lo:hi:count\", got \"{s}\""));
    };
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number \"{v}\": {e}"));
    let (lo, hi) = (p(lo)?, p(hi)?);
    let n: usize = n.trim().parse().map_err(|e| format!("bad count \"{n}\": {e}"))?;
    match n {
        0 => Err("count must be positive".into()),
        1 => Ok(vec![lo]),
        _ => Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()),
    }
}

/// Parses "x0:x1,y0:y1,t0:t1".
pub fn parse_region(s: &str) -> Result<[(f64, f64); 3], String> {
    let axes: Vec<&str> = s.split(',').collect();
    if axes.len() != 3 {
        return Err(format!("expected \"x0:x1,y0:y1,t0:t1\", got \"{s}\""));
    }
    let mut out = [(0.0, 0.0); 3];
    for (slot, axis) in out.iter_mut().zip(axes) {
        let (lo, hi) = axis.split_once(':').ok_or_else(|| format!("bad interval \"{axis}\""))?;
        let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number \"{v}\": {e}"));
        *slot = (p(lo)?, p(hi)?);
    }
    Ok(out)
}
