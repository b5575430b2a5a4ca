//! CSV artifacts. Every file starts with a `# <schema> v<version> ...`
//! comment line followed by a fixed column header; floats are written with
//! 17 significant digits so identical runs give byte-identical files.

use helmpv::grid::{build_disk_grid, DiskGrid};
use helmpv::C64;
use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};
use thiserror::Error;

pub const FIELD_SCHEMA: &str = "helmpv-field v1";
pub const NORMS_SCHEMA: &str = "helmpv-norms v1";
pub const TRACE_SCHEMA: &str = "helmpv-trace v1";

pub const FIELD_COLUMNS: [&str; 4] = ["rho", "theta", "re", "im"];
pub const NORMS_COLUMNS: [&str; 6] = ["param", "l2", "l2_rel", "h1", "h1_rel", "linf"];
pub const TRACE_COLUMNS: [&str; 3] = ["theta", "re", "im"];

#[derive(Debug, Error)]
pub enum OutputError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Format(String),
}

/// Fixed 17-significant-digit scientific notation; `nan` for undefined.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".into()
    }
}

fn write_table<W: Write>(
    mut w: W,
    comment: &str,
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<(), OutputError> {
    writeln!(w, "# {comment}")?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(columns)?;
    for row in rows {
        csv.write_record(row.into_iter().map(fmt17))?;
    }
    csv.flush()?;
    Ok(())
}

/// Nodal field dump in canonical node order.
pub fn write_field<W: Write>(w: W, grid: &DiskGrid<f64>, values: &[C64]) -> Result<(), OutputError> {
    let comment = format!(
        "{FIELD_SCHEMA} radius={} m_theta={} m_rho={}",
        fmt17(grid.radius()),
        grid.m_theta(),
        grid.m_rho()
    );
    let rows = (0..grid.len()).map(|g| {
        let (r, t) = grid.node(g);
        vec![r, t, values[g].re, values[g].im]
    });
    write_table(w, &comment, &FIELD_COLUMNS, rows)
}

/// One row per sweep point; missing relative norms are written as `nan`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormsRow {
    pub param: f64,
    pub l2: f64,
    pub l2_rel: Option<f64>,
    pub h1: f64,
    pub h1_rel: Option<f64>,
    pub linf: f64,
}

pub fn write_norms<W: Write>(w: W, param_name: &str, rows: &[NormsRow]) -> Result<(), OutputError> {
    let comment = format!("{NORMS_SCHEMA} param={param_name}");
    let nan = f64::NAN;
    let rows = rows.iter().map(|r| {
        vec![
            r.param,
            r.l2,
            r.l2_rel.unwrap_or(nan),
            r.h1,
            r.h1_rel.unwrap_or(nan),
            r.linf,
        ]
    });
    write_table(w, &comment, &NORMS_COLUMNS, rows)
}

pub fn write_trace<W: Write>(w: W, rho: f64, thetas: &[f64], values: &[C64]) -> Result<(), OutputError> {
    let comment = format!("{TRACE_SCHEMA} rho={}", fmt17(rho));
    let rows = thetas.iter().zip(values).map(|(t, v)| vec![*t, v.re, v.im]);
    write_table(w, &comment, &TRACE_COLUMNS, rows)
}

/// Parses `schema vN key=value ...` from the first comment line.
fn parse_comment(line: &str, schema: &str) -> Result<BTreeMap<String, String>, OutputError> {
    let rest = line
        .strip_prefix('#')
        .map(str::trim)
        .and_then(|l| l.strip_prefix(schema))
        .ok_or_else(|| OutputError::Format(format!("expected a `# {schema}` header line")))?;
    Ok(rest
        .split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect())
}

fn read_rows<R: Read>(r: R, columns: &[&str]) -> Result<Vec<Vec<f64>>, OutputError> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != columns {
        return Err(OutputError::Format(format!(
            "expected columns {columns:?}, got {header:?}"
        )));
    }
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            rec.iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| OutputError::Format(format!("bad number `{s}`")))
                })
                .collect()
        })
        .collect()
}

/// Reads a field dump back into its grid and nodal values.
pub fn read_field<R: Read>(r: R) -> Result<(DiskGrid<f64>, Vec<C64>), OutputError> {
    let mut reader = BufReader::new(r);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let meta = parse_comment(first.trim(), FIELD_SCHEMA)?;
    let get = |k: &str| {
        meta.get(k)
            .ok_or_else(|| OutputError::Format(format!("header is missing `{k}`")))
    };
    let parse_err = |k: &str| OutputError::Format(format!("bad header value for `{k}`"));
    let radius: f64 = get("radius")?.parse().map_err(|_| parse_err("radius"))?;
    let m_theta: usize = get("m_theta")?.parse().map_err(|_| parse_err("m_theta"))?;
    let m_rho: usize = get("m_rho")?.parse().map_err(|_| parse_err("m_rho"))?;
    let grid = build_disk_grid(radius, m_theta, m_rho).map_err(|e| OutputError::Format(e.to_string()))?;
    let rows = read_rows(reader, &FIELD_COLUMNS)?;
    if rows.len() != grid.len() {
        return Err(OutputError::Format(format!(
            "expected {} rows for a {m_theta}×{m_rho} grid, got {}",
            grid.len(),
            rows.len()
        )));
    }
    let mut values = Vec::with_capacity(rows.len());
    for (g, row) in rows.iter().enumerate() {
        let (r, t) = grid.node(g);
        if (row[0] - r).abs() > 1e-12 * radius || (row[1] - t).abs() > 1e-12 {
            return Err(OutputError::Format(format!("row {} is not at grid node {g}", g + 1)));
        }
        values.push(C64::new(row[2], row[3]));
    }
    Ok((grid, values))
}

pub fn read_trace<R: Read>(r: R) -> Result<(f64, Vec<f64>, Vec<C64>), OutputError> {
    let mut reader = BufReader::new(r);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let meta = parse_comment(first.trim(), TRACE_SCHEMA)?;
    let rho = meta
        .get("rho")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| OutputError::Format("header is missing `rho`".into()))?;
    let rows = read_rows(reader, &TRACE_COLUMNS)?;
    let thetas = rows.iter().map(|r| r[0]).collect();
    let values = rows.iter().map(|r| C64::new(r[1], r[2])).collect();
    Ok((rho, thetas, values))
}

pub fn read_norms<R: Read>(r: R) -> Result<Vec<NormsRow>, OutputError> {
    let mut reader = BufReader::new(r);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    parse_comment(first.trim(), NORMS_SCHEMA)?;
    let opt = |x: f64| if x.is_nan() { None } else { Some(x) };
    Ok(read_rows(reader, &NORMS_COLUMNS)?
        .into_iter()
        .map(|r| NormsRow {
            param: r[0],
            l2: r[1],
            l2_rel: opt(r[2]),
            h1: r[3],
            h1_rel: opt(r[4]),
            linf: r[5],
        })
        .collect())
}
