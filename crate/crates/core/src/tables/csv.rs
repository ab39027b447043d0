//! CSV ingestion and output for tables.
//!
//! Layout: an optional header row of column labels and an optional first
//! column of row labels; both are present iff the top-left field does not
//! parse as a number. All other fields are nonnegative decimals.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::ContingencyTable;
use crate::error::{Error, Result};

/// Output options for [`write_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvOptions {
    /// Significant digits per cell.
    pub precision: usize,
    /// Round cells to integers instead.
    pub round: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            precision: 12,
            round: false,
        }
    }
}

/// Formats `v` with at most `sig` significant digits, shortest form.
pub fn format_value(v: f64, sig: usize) -> String {
    let sig = sig.clamp(1, 17);
    let s = format!("{:.*e}", sig - 1, v);
    let r: f64 = s.parse().unwrap_or(v);
    // -0 prints as "-0"
    if r == 0.0 {
        return "0".to_string();
    }
    format!("{r}")
}

fn parse_err(line: u64, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

pub fn parse_table<R: Read>(input: R) -> Result<ContingencyTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);

    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, 0, e.to_string())
        })?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let line = rec.position().map_or(0, |p| p.line());
        records.push((line, rec));
    }
    let Some((_, first)) = records.first() else {
        return Err(parse_err(1, 1, "empty input"));
    };
    let labelled = first.get(0).is_some_and(|f| f.parse::<f64>().is_err());

    let (col_labels, body) = if labelled {
        let labels: Vec<String> = first.iter().skip(1).map(str::to_string).collect();
        (Some(labels), &records[1..])
    } else {
        (None, &records[..])
    };
    let skip = usize::from(labelled);

    let mut row_labels = labelled.then(Vec::new);
    let mut cells = Vec::new();
    let mut width = None;
    for (line, rec) in body {
        let w = rec.len() - skip;
        match width {
            None => width = Some(w),
            Some(expected) if expected != w => {
                return Err(parse_err(
                    *line,
                    rec.len(),
                    format!("expected {} fields, found {}", expected + skip, rec.len()),
                ))
            }
            _ => {}
        }
        if let Some(labels) = row_labels.as_mut() {
            labels.push(rec.get(0).unwrap_or_default().to_string());
        }
        for (k, field) in rec.iter().enumerate().skip(skip) {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(*line, k + 1, format!("`{field}` is not a number")))?;
            if !v.is_finite() || v < 0.0 {
                return Err(parse_err(
                    *line,
                    k + 1,
                    format!("`{field}` is not a nonnegative finite number"),
                ));
            }
            cells.push(v);
        }
    }
    let rows = body.len();
    let cols = width.unwrap_or(0);
    if let Some(labels) = &col_labels {
        if labels.len() != cols {
            return Err(parse_err(
                records[0].0,
                labels.len() + 1,
                format!("{} column labels for {} columns", labels.len(), cols),
            ));
        }
    }
    ContingencyTable::new(rows, cols, cells)?.with_labels(row_labels, col_labels)
}

pub fn read_table(path: impl AsRef<Path>) -> Result<ContingencyTable> {
    let path = path.as_ref();
    let file = File::open(path)
        .map_err(|e| parse_err(0, 0, format!("cannot open {}: {e}", path.display())))?;
    parse_table(file)
}

/// Writes `table` in the layout [`parse_table`] reads back.
pub fn write_table<W: Write>(table: &ContingencyTable, out: W, opts: CsvOptions) -> Result<()> {
    let io_err = |e: csv::Error| parse_err(0, 0, e.to_string());
    let mut w = csv::WriterBuilder::new().from_writer(out);
    let labelled = table.row_labels().is_some() || table.col_labels().is_some();
    let row_label = |r: usize| {
        table
            .row_labels()
            .map_or_else(|| format!("r{}", r + 1), |l| l[r].clone())
    };
    if labelled {
        let mut header = vec![String::new()];
        header.extend((0..table.cols()).map(|c| {
            table
                .col_labels()
                .map_or_else(|| format!("c{}", c + 1), |l| l[c].clone())
        }));
        w.write_record(&header).map_err(io_err)?;
    }
    for r in 0..table.rows() {
        let mut rec = Vec::with_capacity(table.cols() + 1);
        if labelled {
            rec.push(row_label(r));
        }
        rec.extend(table.row(r).iter().map(|&v| {
            if opts.round {
                format_value(v.round(), 17)
            } else {
                format_value(v, opts.precision)
            }
        }));
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush().map_err(|e| parse_err(0, 0, e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plain_numeric() {
        let t = parse_table("500,500\n100,900\n".as_bytes()).unwrap();
        assert_eq!(t.to_rows(), vec![vec![500.0, 500.0], vec![100.0, 900.0]]);
        assert!(t.row_labels().is_none());
    }

    #[test]
    fn labelled_layout() {
        let src = ",L,H\nL, 500, 500\nH,100,900\n";
        let t = parse_table(src.as_bytes()).unwrap();
        assert_eq!(t.cells(), &[500.0, 500.0, 100.0, 900.0]);
        assert_eq!(t.row_labels().unwrap(), &["L".to_string(), "H".to_string()]);
        assert_eq!(t.col_labels().unwrap(), &["L".to_string(), "H".to_string()]);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_table("1,2\n3,x\n".as_bytes()).unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                column: 2,
                message: "`x` is not a number".into()
            }
        );
        let err = parse_table("1,2\n3,4,5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_table("1,2\n3,-4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 2, .. }));
        assert!(parse_table("".as_bytes()).is_err());
        assert!(matches!(
            parse_table("1,2\n".as_bytes()),
            Err(Error::InvalidTable(_))
        ));
    }

    #[test]
    fn format_sig_digits() {
        assert_eq!(format_value(500.0, 12), "500");
        assert_eq!(format_value(600.0 * 600.0 / 680.0, 12), "529.411764706");
        assert_eq!(format_value(-0.0, 12), "0");
        assert_eq!(format_value(0.1 + 0.2, 12), "0.3");
    }

    #[test]
    fn rounded_output() {
        let t = ContingencyTable::from_rows(&[[534.46, 665.54], [65.54, 734.46]]).unwrap();
        let mut buf = Vec::new();
        write_table(&t, &mut buf, CsvOptions { round: true, ..Default::default() }).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "534,666\n66,734\n");
    }

    proptest! {
        #[test]
        fn written_tables_reparse(cells in prop::collection::vec(0.0f64..1e6, 6), labelled in any::<bool>()) {
            prop_assume!(cells.iter().sum::<f64>() > 0.0);
            let mut t = ContingencyTable::new(2, 3, cells).unwrap();
            if labelled {
                t = t.with_labels(
                    Some(vec!["L".into(), "H".into()]),
                    Some(vec!["a".into(), "b".into(), "c".into()]),
                ).unwrap();
            }
            let mut buf = Vec::new();
            write_table(&t, &mut buf, CsvOptions::default()).unwrap();
            let back = parse_table(buf.as_slice()).unwrap();
            for (a, b) in t.cells().iter().zip(back.cells()) {
                prop_assert_eq!(format_value(*a, 12).parse::<f64>().unwrap(), *b);
            }
            prop_assert_eq!(back.row_labels(), t.row_labels());
            let mut again = Vec::new();
            write_table(&back, &mut again, CsvOptions::default()).unwrap();
            prop_assert_eq!(again, buf);
        }
    }
}
