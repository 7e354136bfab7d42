use super::field::{DiskField, PolarGrid, SupportRule, TAU_SUPP};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const FIELD_SCHEMA: &str = "fbplab.diskfield.v1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldMeta {
    pub schema: String,
    pub format: String,
    pub grid: PolarGrid,
    pub support_rule: SupportRule,
    pub center_flat: bool,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_meta(field: &DiskField, path: &Path, format: &str) -> Result<()> {
    let meta = FieldMeta {
        schema: FIELD_SCHEMA.into(),
        format: format.into(),
        grid: field.grid().clone(),
        support_rule: field.support_rule(),
        center_flat: field.center_flat(),
    };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

fn read_meta(path: &Path) -> Result<FieldMeta> {
    let meta: FieldMeta = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
    if meta.schema != FIELD_SCHEMA {
        return Err(Error::Domain(format!("unknown field schema {}", meta.schema)));
    }
    Ok(meta)
}

fn rebuild(meta: FieldMeta, values: &[f64]) -> Result<DiskField> {
    let tau = match meta.support_rule {
        SupportRule::Threshold { tau } => tau,
        SupportRule::Exact => TAU_SUPP,
    };
    let mut f = DiskField::from_samples(meta.grid, values, tau)?;
    f.set_center_flat(meta.center_flat);
    Ok(f)
}

/// CSV rows (r, θ, value) in grid order, plus a JSON sidecar.
pub fn write_csv(field: &DiskField, path: &Path) -> Result<()> {
    let g = field.grid();
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "# {FIELD_SCHEMA}")?;
    writeln!(w, "r,theta,value")?;
    for (i, &r) in g.radii.iter().enumerate() {
        for j in 0..g.n_theta {
            writeln!(w, "{:.17e},{:.17e},{:.17e}", r, g.theta(j), field.jet(i, j).u)?;
        }
    }
    w.flush()?;
    write_meta(field, path, "csv")
}

pub fn read_csv(path: &Path) -> Result<DiskField> {
    let meta = read_meta(path)?;
    let rd = BufReader::new(fs::File::open(path)?);
    let mut values = Vec::with_capacity(meta.grid.len());
    for line in rd.lines() {
        let line = line?;
        if line.starts_with('#') || line.starts_with("r,") || line.trim().is_empty() {
            continue;
        }
        let v = line
            .rsplit(',')
            .next()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .ok_or_else(|| Error::Domain(format!("malformed row: {line}")))?;
        values.push(v);
    }
    rebuild(meta, &values)
}

/// Little-endian f64 values in grid order, plus a JSON sidecar.
pub fn write_binary(field: &DiskField, path: &Path) -> Result<()> {
    let bytes: Vec<u8> = field.jets().iter().flat_map(|j| j.u.to_le_bytes()).collect();
    fs::write(path, bytes)?;
    write_meta(field, path, "f64le")
}

pub fn read_binary(path: &Path) -> Result<DiskField> {
    let meta = read_meta(path)?;
    let bytes = fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Domain("binary field length is not a multiple of 8".into()));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    rebuild(meta, &values)
}
