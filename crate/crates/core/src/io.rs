//! Plain-text file formats and atomic output.
//!
//! Every CSV accepts `#` comment lines; an optional first non-numeric row is
//! treated as a column header. Numbers are written with the shortest
//! representation that round-trips exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::dtm::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::geometry::{PointCloud, WeightedSite};
use crate::topology::{BoundingBox, PersistenceDiagram, ScalarField2D, Vineyard};
use crate::transport::TransportPlan;

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Path of the JSON sidecar describing how `path` was produced.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidParameter(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

struct Rows {
    comments: Vec<String>,
    rows: Vec<(usize, Vec<f64>)>,
}

fn parse_value(tok: &str) -> Option<f64> {
    match tok.trim() {
        "inf" | "+inf" | "Infinity" => Some(f64::INFINITY),
        t => t.parse().ok(),
    }
}

fn read_rows(path: &Path) -> Result<Rows> {
    let text = fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_rows(&text, path)
}

fn parse_rows(text: &str, path: &Path) -> Result<Rows> {
    let mut comments = Vec::new();
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim().to_string());
            continue;
        }
        let parsed: Option<Vec<f64>> = line.split(',').map(parse_value).collect();
        match parsed {
            Some(v) => rows.push((lineno + 1, v)),
            None if rows.is_empty() => continue,
            None => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno + 1,
                    message: format!("non-numeric row `{line}`"),
                })
            }
        }
    }
    let width = rows.first().map(|r| r.1.len());
    if let Some(&(line, ref r)) = rows.iter().find(|r| Some(r.1.len()) != width) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("expected {} columns, found {}", width.unwrap_or(0), r.len()),
        });
    }
    Ok(Rows { comments, rows })
}

/// `key=value` pairs from comment lines.
fn header_value<'a>(comments: &'a [String], key: &str) -> Option<&'a str> {
    comments
        .iter()
        .flat_map(|c| c.split_whitespace())
        .find_map(|tok| {
            let (k, v) = tok.split_once('=')?;
            (k == key).then_some(v)
        })
}

fn parse_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: message.into(),
    }
}

fn join_row(s: &mut String, values: impl IntoIterator<Item = f64>) {
    let mut first = true;
    for v in values {
        if !first {
            s.push(',');
        }
        first = false;
        if v == f64::INFINITY {
            s.push_str("inf");
        } else {
            let _ = write!(s, "{v}");
        }
    }
    s.push('\n');
}

pub fn point_cloud_csv(cloud: &PointCloud) -> String {
    let mut s = format!("# points dim={} n={}\n", cloud.dim(), cloud.len());
    for p in cloud.points() {
        join_row(&mut s, p.iter().copied());
    }
    s
}

pub fn read_point_cloud(path: &Path) -> Result<PointCloud> {
    let rows = read_rows(path)?;
    let dim = rows
        .rows
        .first()
        .map(|r| r.1.len())
        .ok_or(Error::EmptyInput)?;
    PointCloud::from_flat(dim, rows.rows.into_iter().flat_map(|r| r.1).collect())
}

/// Coordinates followed by a mass column; an optional `# denominator=Q`
/// comment declares the common denominator of the masses.
pub fn measure_csv(mu: &DiscreteMeasure) -> String {
    let mut s = format!("# measure dim={} n={}", mu.dim(), mu.len());
    if let Some(q) = mu.denominator() {
        let _ = write!(s, " denominator={q}");
    }
    s.push('\n');
    for (p, &m) in mu.support().points().zip(mu.masses()) {
        join_row(&mut s, p.iter().copied().chain([m]));
    }
    s
}

pub fn read_measure(path: &Path) -> Result<DiscreteMeasure> {
    let rows = read_rows(path)?;
    let width = rows
        .rows
        .first()
        .map(|r| r.1.len())
        .ok_or(Error::EmptyInput)?;
    if width < 2 {
        return Err(parse_err(
            path,
            "a measure needs coordinates and a mass column",
        ));
    }
    let mut coords = Vec::new();
    let mut masses = Vec::new();
    for (_, r) in &rows.rows {
        coords.extend_from_slice(&r[..width - 1]);
        masses.push(r[width - 1]);
    }
    let mu = DiscreteMeasure::new(PointCloud::from_flat(width - 1, coords)?, masses)?;
    match header_value(&rows.comments, "denominator") {
        Some(q) => mu.with_denominator(
            q.parse()
                .map_err(|_| parse_err(path, format!("bad denominator `{q}`")))?,
        ),
        None => Ok(mu),
    }
}

/// Site centers followed by their (non-positive) weight.
pub fn sites_csv(sites: &[WeightedSite], k: usize, n: usize, mode: &str) -> String {
    let mut s = format!("# sites k={k} n={n} mode={mode}\n");
    for site in sites {
        join_row(&mut s, site.center().iter().copied().chain([site.weight()]));
    }
    s
}

pub fn read_sites(path: &Path) -> Result<Vec<WeightedSite>> {
    let rows = read_rows(path)?;
    rows.rows
        .into_iter()
        .map(|(_, r)| {
            let (w, c) = r.split_last().ok_or(Error::EmptyInput)?;
            if c.is_empty() {
                return Err(parse_err(path, "a site needs coordinates and a weight"));
            }
            WeightedSite::new(c.to_vec(), *w)
        })
        .collect()
}

/// Query coordinates followed by the function value.
pub fn values_csv(queries: &PointCloud, values: &[f64]) -> String {
    let mut s = format!("# values dim={} n={}\n", queries.dim(), queries.len());
    for (p, &v) in queries.points().zip(values) {
        join_row(&mut s, p.iter().copied().chain([v]));
    }
    s
}

/// One line per grid row (bottom row first) after a header recording the
/// box and resolution.
pub fn field_csv(field: &ScalarField2D) -> String {
    let b = field.bbox();
    let mut s = format!(
        "# scalar-field nx={} ny={} xmin={} xmax={} ymin={} ymax={}\n",
        field.nx(),
        field.ny(),
        b.xmin,
        b.xmax,
        b.ymin,
        b.ymax
    );
    for row in field.values().chunks_exact(field.nx()) {
        join_row(&mut s, row.iter().copied());
    }
    s
}

pub fn read_field(path: &Path) -> Result<ScalarField2D> {
    let rows = read_rows(path)?;
    let get = |key: &str| -> Result<&str> {
        header_value(&rows.comments, key)
            .ok_or_else(|| parse_err(path, format!("missing `{key}` in scalar-field header")))
    };
    let int = |key: &str| -> Result<usize> {
        get(key)?
            .parse()
            .map_err(|_| parse_err(path, format!("bad `{key}`")))
    };
    let real = |key: &str| -> Result<f64> {
        get(key)?
            .parse()
            .map_err(|_| parse_err(path, format!("bad `{key}`")))
    };
    let (nx, ny) = (int("nx")?, int("ny")?);
    let bbox = BoundingBox::new(real("xmin")?, real("xmax")?, real("ymin")?, real("ymax")?)?;
    if rows.rows.len() != ny || rows.rows.iter().any(|r| r.1.len() != nx) {
        return Err(parse_err(
            path,
            format!("expected {ny} rows of {nx} values"),
        ));
    }
    ScalarField2D::new(
        bbox,
        nx,
        ny,
        rows.rows.into_iter().flat_map(|r| r.1).collect(),
    )
}

pub fn diagram_csv(diagram: &PersistenceDiagram) -> String {
    let mut s = String::from("dim,birth,death\n");
    for p in diagram.pairs() {
        join_row(&mut s, [p.dim as f64, p.birth, p.death]);
    }
    s
}

pub fn read_diagram(path: &Path) -> Result<PersistenceDiagram> {
    let rows = read_rows(path)?;
    let pairs = rows
        .rows
        .into_iter()
        .map(|(line, r)| match r.as_slice() {
            &[d, birth, death] if d == 0.0 || d == 1.0 => Ok(crate::topology::PersistencePair {
                dim: d as u8,
                birth,
                death,
            }),
            _ => Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: "expected dim,birth,death with dim 0 or 1".into(),
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    PersistenceDiagram::new(pairs)
}

pub fn vineyard_csv(vineyard: &Vineyard) -> String {
    let mut s = String::from("k,m0,class_rank,birth,death,persistence\n");
    for r in &vineyard.records {
        for (rank, b) in r.bars.iter().enumerate() {
            let _ = write!(s, "{},{},{},", r.k, r.m0, rank + 1);
            join_row(&mut s, [b.birth, b.death, b.persistence()]);
        }
    }
    s
}

pub fn plan_csv(plan: &TransportPlan) -> String {
    let mut s = String::from("source,target,mass\n");
    for e in &plan.entries {
        let _ = writeln!(s, "{},{},{}", e.source, e.target, e.mass);
    }
    s
}
