//! CSV file formats.
//!
//! Cauchy data live in a directory holding `f.csv` and `g.csv` (one row per
//! time step, one column per `x` grid point) and `meta.csv` with the grid
//! parameters `x_min, dx, nx, t_min, dt, nt`. Every file may start with `#`
//! comment lines and carries a header row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::reconstruct::CauchyData;

pub const F_FILE: &str = "f.csv";
pub const G_FILE: &str = "g.csv";
pub const META_FILE: &str = "meta.csv";

const META_COLUMNS: [&str; 6] = ["x_min", "dx", "nx", "t_min", "dt", "nt"];

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{}: {other:?}", path.display())),
    }
}

/// Writes a table with an optional leading `# comment` line.
pub fn write_table(
    path: &Path,
    comment: Option<&str>,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    if let Some(c) = comment {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush()?;
    Ok(())
}

/// Header and numeric rows of a table, skipping `#` comment lines.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let file = File::open(path)?;
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = r
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let values = record
            .iter()
            .map(|s| {
                s.parse::<f64>().map_err(|_| {
                    Error::Parse(format!(
                        "{}: data row {}: '{s}' is not a number",
                        path.display(),
                        line + 1
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(values);
    }
    Ok((header, rows))
}

/// Shortest representation that reads back to the same `f64`, in plain
/// decimal notation for moderate magnitudes.
pub fn number(v: f64) -> String {
    // Adding zero turns -0 into +0.
    let v = v + 0.0;
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn format_row(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| number(v)).collect()
}

pub fn write_cauchy(dir: &Path, data: &CauchyData<f64>, comment: Option<&str>) -> Result<()> {
    let (x, t) = (data.x, data.t);
    let meta = vec![vec![
        number(x.start),
        number(x.step),
        x.len.to_string(),
        number(t.start),
        number(t.step),
        t.len.to_string(),
    ]];
    write_table(&dir.join(META_FILE), comment, &META_COLUMNS, &meta)?;
    let names: Vec<String> = (0..x.len).map(|i| format!("x{i}")).collect();
    let header: Vec<&str> = names.iter().map(String::as_str).collect();
    for (name, values) in [(F_FILE, &data.f), (G_FILE, &data.g)] {
        let rows: Vec<Vec<String>> = values.chunks(x.len).map(format_row).collect();
        write_table(&dir.join(name), comment, &header, &rows)?;
    }
    Ok(())
}

pub fn read_cauchy(dir: &Path) -> Result<CauchyData<f64>> {
    let meta_path = dir.join(META_FILE);
    let (header, rows) = read_table(&meta_path)?;
    if header != META_COLUMNS || rows.len() != 1 {
        return Err(Error::Parse(format!(
            "{}: expected header {} and one data row",
            meta_path.display(),
            META_COLUMNS.join(",")
        )));
    }
    let m = &rows[0];
    let count = |v: f64, what: &str| -> Result<usize> {
        if v >= 0.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(Error::Parse(format!(
                "{}: {what} = {v} is not a count",
                meta_path.display()
            )))
        }
    };
    let x = UniformGrid::new(m[0], m[1], count(m[2], "nx")?)?;
    let t = UniformGrid::new(m[3], m[4], count(m[5], "nt")?)?;
    let mut fields = Vec::with_capacity(2);
    for name in [F_FILE, G_FILE] {
        let path = dir.join(name);
        let (header, rows) = read_table(&path)?;
        if header.len() != x.len || rows.len() != t.len || rows.iter().any(|r| r.len() != x.len) {
            return Err(Error::Parse(format!(
                "{}: expected {} rows of {} columns as given in {META_FILE}",
                path.display(),
                t.len,
                x.len
            )));
        }
        fields.push(rows.concat());
    }
    let g = fields.pop().expect("two fields");
    let f = fields.pop().expect("two fields");
    CauchyData::new(x, t, f, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cauchy_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let x = UniformGrid::new(-1.0, 0.1, 21).unwrap();
        let t = UniformGrid::new(0.0, 0.05, 11).unwrap();
        let data = CauchyData::from_fn(
            x,
            t,
            |x: f64, t: f64| (x * 3.1).sin() * t.exp() / 7.0,
            |x, t| x * t - 1e-300,
        )
        .unwrap();
        write_cauchy(dir.path(), &data, Some("config-hash: abc")).unwrap();
        let back = read_cauchy(dir.path()).unwrap();
        assert_eq!(back, data);
        let text = std::fs::read_to_string(dir.path().join(F_FILE)).unwrap();
        assert!(text.starts_with("# config-hash: abc\nx0,x1,"));
    }

    #[test]
    fn missing_and_malformed_files() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(read_cauchy(dir.path()), Err(Error::Io(_))));
        let x = UniformGrid::new(0.0, 1.0, 4).unwrap();
        let data = CauchyData::zeros(x, x).unwrap();
        write_cauchy(dir.path(), &data, None).unwrap();
        std::fs::write(dir.path().join(G_FILE), "x0,x1,x2,x3\n0,0,0,zero\n").unwrap();
        assert!(matches!(read_cauchy(dir.path()), Err(Error::Parse(_))));
    }
}
