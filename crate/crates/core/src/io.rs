//! CSV input and output.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

fn records(reader: impl Read) -> Result<Vec<Vec<String>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push(rec.iter().map(str::to_owned).collect());
    }
    Ok(out)
}

fn parse_cell(cell: &str, line: usize, col: usize) -> Result<f64> {
    cell.parse::<f64>().map_err(|_| {
        Error::Parse(format!(
            "row {line}, column {col}: non-numeric value {cell:?}"
        ))
    })
}

fn is_numeric_row(row: &[String]) -> bool {
    row.iter().all(|c| c.is_empty() || c.parse::<f64>().is_ok())
}

/// Reads one numeric column.
///
/// A first row containing any non-numeric cell is taken as a header. With
/// more than one column, `col` names the column by header or 0-based index.
/// Blank lines are skipped; any other non-numeric cell is an error.
pub fn read_column_from(reader: impl Read, col: Option<&str>) -> Result<Vec<f64>> {
    let rows = records(reader)?;
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let header = (!is_numeric_row(&rows[0])).then(|| rows[0].clone());
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let index = match col {
        Some(name) => header
            .as_ref()
            .and_then(|h| h.iter().position(|c| c == name))
            .or_else(|| name.parse::<usize>().ok())
            .filter(|&i| i < width)
            .ok_or_else(|| Error::InvalidArgument(format!("no column {name:?}")))?,
        None if width == 1 => 0,
        None => {
            return Err(Error::InvalidArgument(format!(
                "input has {width} columns; choose one with --col"
            )))
        }
    };
    let skip = usize::from(header.is_some());
    let mut out = Vec::new();
    for (i, row) in rows.iter().enumerate().skip(skip) {
        match row.get(index).map(String::as_str) {
            None | Some("") => continue,
            Some(cell) => out.push(parse_cell(cell, i + 1, index)?),
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(out)
}

pub fn read_column(path: &Path, col: Option<&str>) -> Result<Vec<f64>> {
    read_column_from(File::open(path)?, col)
}

/// Named variables of a data matrix.
pub type Matrix = Vec<(String, Vec<f64>)>;

/// Reads a matrix whose columns are variables, with a header row of names.
///
/// With `transpose`, rows are variables: the first cell of each row is its
/// name, and a leading row with a non-numeric cell after the first is a
/// header and skipped. Empty cells are missing values and are dropped.
pub fn read_matrix_from(reader: impl Read, transpose: bool) -> Result<Matrix> {
    let rows = records(reader)?;
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = Vec::new();
    if transpose {
        let skip = usize::from(!is_numeric_row(&rows[0][1.min(rows[0].len())..]));
        for (i, row) in rows.iter().enumerate().skip(skip) {
            let values = row[1..]
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_empty())
                .map(|(j, c)| parse_cell(c, i + 1, j + 1))
                .collect::<Result<Vec<_>>>()?;
            out.push((row[0].clone(), values));
        }
    } else {
        let names = &rows[0];
        for (j, name) in names.iter().enumerate() {
            let mut values = Vec::new();
            for (i, row) in rows.iter().enumerate().skip(1) {
                if let Some(c) = row.get(j).filter(|c| !c.is_empty()) {
                    values.push(parse_cell(c, i + 1, j)?);
                }
            }
            out.push((name.clone(), values));
        }
    }
    Ok(out)
}

pub fn read_matrix(path: &Path, transpose: bool) -> Result<Matrix> {
    read_matrix_from(File::open(path)?, transpose)
}

/// Writes named columns of equal length as CSV.
pub fn write_columns(path: &Path, names: &[&str], cols: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(names)?;
    let n = cols.iter().map(Vec::len).max().unwrap_or(0);
    for i in 0..n {
        w.write_record(
            cols.iter()
                .map(|c| c.get(i).map(f64::to_string).unwrap_or_default()),
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = std::io::BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_blank_lines() {
        let v = read_column_from("x\n1.5\n\n2\n-3e-1\n".as_bytes(), None).unwrap();
        assert_eq!(v, vec![1.5, 2.0, -0.3]);
        let v = read_column_from("1\n2\n".as_bytes(), None).unwrap();
        assert_eq!(v, vec![1.0, 2.0]);
    }

    #[test]
    fn named_and_indexed_columns() {
        let src = "a,b\n1,10\n2,20\n";
        assert_eq!(
            read_column_from(src.as_bytes(), Some("b")).unwrap(),
            vec![10.0, 20.0]
        );
        assert_eq!(
            read_column_from(src.as_bytes(), Some("0")).unwrap(),
            vec![1.0, 2.0]
        );
        assert!(read_column_from(src.as_bytes(), None).is_err());
        assert!(read_column_from(src.as_bytes(), Some("c")).is_err());
    }

    #[test]
    fn non_numeric_cell_is_error() {
        let e = read_column_from("x\n1\nfoo\n".as_bytes(), None).unwrap_err();
        assert_eq!(e.code(), "parse_error");
        assert_eq!(
            read_column_from("".as_bytes(), None).unwrap_err().code(),
            "empty_input"
        );
    }

    #[test]
    fn matrix_orientations() {
        let m = read_matrix_from("g1,g2\n1,4\n2,\n3,6\n".as_bytes(), false).unwrap();
        assert_eq!(m[0], ("g1".into(), vec![1.0, 2.0, 3.0]));
        assert_eq!(m[1], ("g2".into(), vec![4.0, 6.0]));
        let t = read_matrix_from("gene,s1,s2\ng1,1,2\ng2,3,4\n".as_bytes(), true).unwrap();
        assert_eq!(
            t,
            vec![("g1".into(), vec![1.0, 2.0]), ("g2".into(), vec![3.0, 4.0])]
        );
        let t = read_matrix_from("g1,1,2\n".as_bytes(), true).unwrap();
        assert_eq!(t, vec![("g1".into(), vec![1.0, 2.0])]);
    }
}
