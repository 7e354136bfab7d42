//! Flat `key = value` configs. Every key a subcommand accepts, with its
//! default, lives in [`DEFAULTS`].

use crate::CliError;
use fbplab::angular_modes::t1;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

/// (subcommand, key, default, meaning)
pub const DEFAULTS: &[(&str, &str, &str, &str)] = &[
    ("modes", "omega", "pi", "segment length ω (accepts pi, t1 and multiples like 2pi)"),
    ("modes", "n_max", "4", "modes 1..=n_max"),
    ("homog", "profile", "flat", "flat | angular | nodal | isolated"),
    ("homog", "lambda", "1", "nodal parameter λ"),
    ("homog", "a", "1", "isolated coefficient a"),
    ("homog", "b", "0", "isolated coefficient b"),
    ("homog", "c", "0", "isolated coefficient c"),
    ("homog", "sign", "1", "±1"),
    ("homog", "rotation", "0", "rotation angle"),
    ("homog", "samples", "721", "angular samples on [0, 2π]"),
    ("weiss", "field", "", "field CSV (with JSON sidecar); empty means use the profile keys"),
    ("weiss", "profile", "flat", "flat | angular | nodal | isolated"),
    ("weiss", "lambda", "1", "area weight λ, also the nodal parameter"),
    ("weiss", "a", "1", "isolated coefficient a"),
    ("weiss", "b", "0", "isolated coefficient b"),
    ("weiss", "c", "0", "isolated coefficient c"),
    ("weiss", "sign", "1", "±1"),
    ("weiss", "rotation", "0", "rotation angle"),
    ("weiss", "radii", "0.2,0.4,0.6,0.8", "radii r"),
    ("weiss", "n_r", "256", "radial nodes of the profile grid"),
    ("weiss", "n_theta", "512", "angular nodes of the profile grid"),
    ("goursat", "coefficients", "", "coefficient JSON; empty means random sets"),
    ("goursat", "count", "50", "random coefficient sets"),
    ("goursat", "n_max", "8", "highest Fourier mode of random sets"),
    ("goursat", "center_flat", "true", "drop the modes that make u non-flat at 0"),
    ("goursat", "radii", "0.3,0.6,0.9", "radii r"),
    ("goursat", "n_r", "256", "radial nodes of the sampling grid"),
    ("goursat", "n_theta", "512", "angular nodes of the sampling grid"),
    ("epi", "profile", "flat", "flat | angular | nodal | isolated"),
    ("epi", "lambda", "1", "nodal parameter λ"),
    ("epi", "a", "1", "isolated coefficient a"),
    ("epi", "b", "0", "isolated coefficient b"),
    ("epi", "c", "0", "isolated coefficient c"),
    ("epi", "sign", "1", "±1"),
    ("epi", "rotation", "0", "rotation angle"),
    ("epi", "theta", "auto", "opening Θ; auto picks π, t1 or 2π from the profile"),
    ("epi", "perturb_n", "0", "buckling mode added to u (0 = none)"),
    ("epi", "perturb_amp", "0", "amplitude of that mode"),
    ("epi", "v_n", "0", "buckling mode used as the derivative trace v (0 = none)"),
    ("epi", "v_amp", "0", "amplitude of v"),
    ("epi", "w_values", "", "W(u, 1), W(u, 1/e) as two numbers, or empty"),
    ("solve", "boundary", "radial", "radial | profile"),
    ("solve", "g0", "1e-3", "radial data u on the circle"),
    ("solve", "h0", "0", "radial data ∂_r u on the circle"),
    ("solve", "profile", "flat", "profile supplying the data when boundary = profile"),
    ("solve", "a", "1", "isolated coefficient a"),
    ("solve", "b", "0", "isolated coefficient b"),
    ("solve", "c", "0", "isolated coefficient c"),
    ("solve", "sign", "1", "±1"),
    ("solve", "rotation", "0", "rotation angle"),
    ("solve", "trace_modes", "16", "Fourier modes kept in profile traces"),
    ("solve", "lambda", "1", "area weight λ"),
    ("solve", "n_r", "64", "mesh cells per unit length"),
    ("solve", "n_theta", "128", "angular nodes of the output field"),
    ("solve", "max_outer_iters", "400", "support updates per start"),
    ("solve", "rule", "cellwise-threshold", "cellwise-threshold | radial-exact"),
    ("solve", "tol_energy", "1e-10", "relative energy decrease that counts as progress"),
    ("solve", "inner_radius", "0.5", "radius of the disk reported on in the summary"),
    ("solve", "blowup_point", "", "x,y of a blow-up sequence, or empty"),
    ("solve", "blowup_radii", "0.5,0.4,0.3", "blow-up radii"),
    ("solve", "blowup_n_r", "24", "radial nodes of the blow-up grids"),
    ("solve", "blowup_n_theta", "48", "angular nodes of the blow-up grids"),
    ("buckling", "family", "ellipse", "ellipse | star"),
    ("buckling", "ratios", "1,1.1,1.25,1.5", "axis ratios of the area-π ellipses"),
    ("buckling", "r0", "1", "mean radius of the star"),
    ("buckling", "star_modes", "0,0.1,0.08,0", "a1,b1,a2,b2,… of the star boundary"),
    ("buckling", "scales", "0.5,1,2", "dilations of the star"),
    ("buckling", "meshes", "64,128", "mesh sizes, one table each"),
    ("buckling", "quasimin_radii", "", "radii of the quasiminimality sweep on the disk, or empty"),
    ("buckling", "quasimin_points", "0,0;0.5,0.2", "centres of the sweep, x,y;x,y"),
    ("buckling", "quasimin_amplitude", "1e-3", "bump amplitude"),
];

#[derive(Debug, Clone)]
pub struct Config {
    pub values: BTreeMap<String, String>,
}

fn parse_lines(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", no + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

impl Config {
    /// Defaults of `cmd`, then the file, then `--set` pairs.
    pub fn load(cmd: &str, file: Option<&Path>, sets: &[String]) -> Result<Config, CliError> {
        let mut values: BTreeMap<String, String> = DEFAULTS
            .iter()
            .filter(|d| d.0 == cmd)
            .map(|d| (d.1.to_string(), d.2.to_string()))
            .collect();
        let mut pairs = Vec::new();
        if let Some(p) = file {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
            pairs.extend(parse_lines(&text)?);
        }
        for s in sets {
            pairs.extend(parse_lines(s)?);
        }
        for (k, v) in pairs {
            if !values.contains_key(&k) {
                return Err(CliError::Usage(format!("unknown key '{k}' for {cmd}")));
            }
            values.insert(k, v);
        }
        Ok(Config { values })
    }

    pub fn str(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        parse_number(self.str(key)).ok_or_else(|| bad(key, self.str(key)))
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        self.str(key).parse().map_err(|_| bad(key, self.str(key)))
    }

    pub fn bool(&self, key: &str) -> Result<bool, CliError> {
        self.str(key).parse().map_err(|_| bad(key, self.str(key)))
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let s = self.str(key);
        if s.is_empty() {
            return Ok(Vec::new());
        }
        s.split(',')
            .map(|t| parse_number(t.trim()).ok_or_else(|| bad(key, s)))
            .collect()
    }
}

fn bad(key: &str, v: &str) -> CliError {
    CliError::Usage(format!("invalid value '{v}' for {key}"))
}

/// Plain numbers, or multiples of pi and t1 such as `2pi`, `0.5pi`, `t1`.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    for (suffix, unit) in [("pi", PI), ("t1", t1())] {
        if let Some(head) = s.strip_suffix(suffix) {
            let head = head.trim_end_matches('*');
            let k = if head.is_empty() { 1.0 } else { head.parse().ok()? };
            return Some(k * unit);
        }
    }
    s.parse().ok()
}
