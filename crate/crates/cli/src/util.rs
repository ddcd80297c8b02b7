//! Shared helpers: deterministic float formatting, model/path loading,
//! grid parsing, integrator options from the environment.

use nalgebra::Matrix2;
use spk2d::fields::PointPolar;
use spk2d::models::ModelSpec;
use spk2d::transport::IntegratorOptions;

use crate::CliError;

/// 17 significant digits: enough to round-trip every f64.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_matrix(m: &Matrix2<f64>) -> String {
    format!(
        "[[{}, {}], [{}, {}]]",
        fmt_f(m[(0, 0)]),
        fmt_f(m[(0, 1)]),
        fmt_f(m[(1, 0)]),
        fmt_f(m[(1, 1)])
    )
}

/// Accepts inline JSON (starts with '{') or a path to a JSON file.
pub fn load_model(arg: &str) -> Result<ModelSpec, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| CliError::io(format!("cannot read model file {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::parse(format!("bad model spec: {e}")))
}

pub fn model_echo(spec: &ModelSpec) -> String {
    serde_json::to_string(spec).expect("model spec serializes")
}

#[derive(Debug, Clone, Copy)]
pub struct Grid {
    pub n_r: usize,
    pub n_theta: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl Grid {
    /// Radii log-spaced from `r_max` down to `r_min` (strictly decreasing),
    /// angles uniform in `[0, 2π)`.
    pub fn radii(&self) -> Vec<f64> {
        if self.n_r == 1 {
            return vec![self.r_max];
        }
        (0..self.n_r)
            .map(|i| self.r_max * (self.r_min / self.r_max).powf(i as f64 / (self.n_r - 1) as f64))
            .collect()
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.n_theta)
            .map(|j| std::f64::consts::TAU * (j as f64 + 0.5) / self.n_theta as f64)
            .collect()
    }

    pub fn points(&self) -> Vec<PointPolar> {
        let mut out = Vec::with_capacity(self.n_r * self.n_theta);
        for &r in &self.radii() {
            for &t in &self.thetas() {
                out.push(PointPolar::new(r, t).expect("grid inside the domain"));
            }
        }
        out
    }
}

pub fn parse_grid(arg: &str) -> Result<Grid, CliError> {
    let parts: Vec<&str> = arg.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::parse(format!(
            "grid must be nr,ntheta,rmin,rmax (got {arg:?})"
        )));
    }
    let n_r: usize = parts[0]
        .parse()
        .map_err(|_| CliError::parse(format!("bad nr {:?}", parts[0])))?;
    let n_theta: usize = parts[1]
        .parse()
        .map_err(|_| CliError::parse(format!("bad ntheta {:?}", parts[1])))?;
    let r_min: f64 = parts[2]
        .parse()
        .map_err(|_| CliError::parse(format!("bad rmin {:?}", parts[2])))?;
    let r_max: f64 = parts[3]
        .parse()
        .map_err(|_| CliError::parse(format!("bad rmax {:?}", parts[3])))?;
    if n_r == 0 || n_theta == 0 {
        return Err(CliError::parse("grid sizes must be positive"));
    }
    if !(0.0 < r_min && r_min <= r_max && r_max < 1.0) {
        return Err(CliError::domain(format!(
            "grid radii must satisfy 0 < rmin <= rmax < 1 (got {r_min}, {r_max})"
        )));
    }
    Ok(Grid {
        n_r,
        n_theta,
        r_min,
        r_max,
    })
}

/// Integrator options, honoring `SPK2D_MAX_REFINE`.
pub fn integrator_options() -> Result<IntegratorOptions, CliError> {
    let mut opts = IntegratorOptions::default();
    if let Ok(v) = std::env::var("SPK2D_MAX_REFINE") {
        let depth: u32 = v
            .parse()
            .map_err(|_| CliError::parse(format!("SPK2D_MAX_REFINE must be an integer, got {v:?}")))?;
        opts.max_refine = depth.clamp(4, 40);
    }
    Ok(opts)
}
