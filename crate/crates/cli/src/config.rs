use std::path::Path;

use serde::Deserialize;

use crate::error::CliError;

pub const TOL_ENV: &str = "LAGTOP_TOL";

/// Everything a `--config` file may set. Flags win over these.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub g: Option<usize>,
    pub m: Option<f64>,
    pub state: Option<Vec<f64>>,
    pub levels: Option<Vec<f64>>,
    pub parameters: Option<Vec<f64>>,
    pub t: Option<f64>,
    pub dt: Option<f64>,
    pub sample_every: Option<usize>,
    #[serde(rename = "loop")]
    pub loop_name: Option<String>,
    pub base: Option<Vec<f64>>,
    pub waypoints: Option<Vec<Vec<f64>>>,
    pub orientation: Option<i32>,
    pub basis: Option<String>,
    pub route: Option<String>,
    pub big_a: Option<f64>,
    pub c: Option<f64>,
    pub u_min: Option<f64>,
    pub u_max: Option<f64>,
    pub samples: Option<usize>,
    pub c2: Option<Vec<f64>>,
    pub isolation_radius: Option<f64>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<String>,
    pub csv: Option<String>,
    pub report: Option<String>,
    pub sequential: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Flag, then config file, then `LAGTOP_TOL`, then the command default.
pub fn resolve_tol(flag: Option<f64>, file: Option<f64>, default: f64) -> Result<f64, CliError> {
    let tol = match flag.or(file) {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s.trim().parse().map_err(|_| CliError::Config(format!("{TOL_ENV}={s:?} is not a number")))?,
            Err(_) => default,
        },
    };
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Config(format!("tolerance must be positive, got {tol}")));
    }
    Ok(tol)
}

/// `"1,2.5,-3"`.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"))).collect()
}

/// `"x,y,z;x,y,z;…"`.
pub fn parse_points(s: &str) -> Result<Vec<Vec<f64>>, String> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_list).collect()
}
