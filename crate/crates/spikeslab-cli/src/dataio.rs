//! Dataset CSV format: header `y,x1,...,xp`, one row per observation.

use std::fs;
use std::path::Path;

use spikeslab::nalgebra::{DMatrix, DVector};
use spikeslab::{DesignData, Error, Result};

pub fn write_dataset_csv(data: &DesignData, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push('y');
    for j in 1..=data.p() {
        out.push_str(&format!(",x{j}"));
    }
    out.push('\n');
    for i in 0..data.n() {
        out.push_str(&data.y()[i].to_string());
        for j in 0..data.p() {
            out.push_str(&format!(",{}", data.x()[(i, j)]));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_dataset_csv(path: &Path) -> Result<DesignData> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config(format!("{}: empty file", path.display())))?;
    let cols = header.split(',').count();
    if cols < 2 || !header.starts_with('y') {
        return Err(Error::Config(format!(
            "{}: expected header y,x1,...,xp",
            path.display()
        )));
    }
    let p = cols - 1;
    let mut y = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols {
            return Err(Error::Config(format!(
                "{}: row {} has {} fields, expected {cols}",
                path.display(),
                i + 2,
                fields.len()
            )));
        }
        let parse = |v: &str| -> Result<f64> {
            v.trim()
                .parse()
                .map_err(|_| Error::Config(format!("{}: bad number '{v}'", path.display())))
        };
        y.push(parse(fields[0])?);
        rows.push(fields[1..].iter().map(|v| parse(v)).collect::<Result<_>>()?);
    }
    let n = y.len();
    let x = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    DesignData::new(DVector::from_vec(y), x)
}
