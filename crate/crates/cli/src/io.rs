//! CSV formats. Numbers are written in shortest round-trip form, so reading
//! a written file reproduces every value bit for bit.

use std::path::Path;

use anyhow::{bail, Context, Result};
use trackcop::{GridCopula, PlFunction};

/// Grid layout: first cell empty, first row and first column hold the
/// mesh, cell `(i, j)` holds `C(x_i, y_j)`.
pub fn write_grid(path: &Path, grid: &GridCopula) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    let mut header = vec![String::new()];
    header.extend(grid.mesh().iter().map(f64::to_string));
    w.write_record(&header)?;
    for (x, row) in grid.mesh().iter().zip(grid.rows()) {
        let mut record = vec![x.to_string()];
        record.extend(row.iter().map(f64::to_string));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid(path: &Path) -> Result<GridCopula> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut records = r.records();
    let header = records.next().context("empty grid file")??;
    if header.get(0).is_some_and(|c| !c.trim().is_empty()) {
        bail!("grid file must start with an empty cell");
    }
    let mesh = parse_cells(header.iter().skip(1)).context("bad mesh row")?;
    let mut rows = Vec::with_capacity(mesh.len());
    for (i, record) in records.enumerate() {
        let record = record?;
        let cells = parse_cells(record.iter()).with_context(|| format!("bad grid row {}", i + 1))?;
        let (x, values) = cells.split_first().context("empty grid row")?;
        if mesh.get(i) != Some(x) {
            bail!("row {} starts with {x}, expected the mesh coordinate", i + 1);
        }
        rows.push(values.to_vec());
    }
    Ok(GridCopula::new(mesh, rows)?)
}

/// Two columns `x,value` with a header.
pub fn write_function(path: &Path, f: &PlFunction) -> Result<()> {
    write_columns(path, &["x", "value"], f.xs().iter().map(|&x| vec![x, f.at(x)]))
}

pub fn read_function(path: &Path) -> Result<PlFunction> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, record) in r.records().enumerate() {
        let cells = parse_cells(record?.iter()).with_context(|| format!("bad row {}", i + 1))?;
        let [x, y] = cells[..] else { bail!("row {} must have two columns", i + 1) };
        xs.push(x);
        ys.push(y);
    }
    Ok(PlFunction::new(xs, ys)?)
}

pub fn write_columns(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

fn parse_cells<'a>(cells: impl Iterator<Item = &'a str>) -> Result<Vec<f64>> {
    cells
        .map(|c| c.trim().parse::<f64>().with_context(|| format!("not a number: {c:?}")))
        .collect()
}
