//! Contingency tables, margin targets and the aggregation utilities shared by
//! every transformation.
//!
//! Cells are nonnegative reals stored row-major. Rows are the husband (male)
//! categories and columns the wife (female) categories, ordered from lowest to
//! highest, so the bottom-right cell is the `H,H` cell.

mod csv;

pub use self::csv::{format_value, parse_table, read_table, write_table, CsvOptions};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the grand-total consistency of [`MarginTargets`].
pub const MARGIN_TOLERANCE: f64 = 1e-9;

/// A nonnegative `rows x cols` table with at least two rows and columns and a
/// positive grand total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    cells: Vec<f64>,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
}

/// One invariant violation found by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewRows(usize),
    TooFewColumns(usize),
    ShapeMismatch { expected: usize, found: usize },
    NonFinite { row: usize, col: usize },
    NegativeCell { row: usize, col: usize, value: f64 },
    ZeroTotal,
    LabelCount { axis: &'static str, expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewRows(n) => write!(f, "{n} row(s), need at least 2"),
            Violation::TooFewColumns(m) => write!(f, "{m} column(s), need at least 2"),
            Violation::ShapeMismatch { expected, found } => {
                write!(f, "expected {expected} cells, found {found}")
            }
            Violation::NonFinite { row, col } => write!(f, "cell ({row},{col}) is not finite"),
            Violation::NegativeCell { row, col, value } => {
                write!(f, "cell ({row},{col}) is negative ({value})")
            }
            Violation::ZeroTotal => f.write_str("grand total is zero"),
            Violation::LabelCount {
                axis,
                expected,
                found,
            } => write!(f, "{found} {axis} labels for {expected} {axis}s"),
        }
    }
}

/// Outcome of [`validate`]; empty iff the data forms a valid table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks raw row-major data against the table invariants.
pub fn validate(rows: usize, cols: usize, cells: &[f64]) -> ValidationReport {
    let mut violations = Vec::new();
    if rows < 2 {
        violations.push(Violation::TooFewRows(rows));
    }
    if cols < 2 {
        violations.push(Violation::TooFewColumns(cols));
    }
    if cells.len() != rows * cols {
        violations.push(Violation::ShapeMismatch {
            expected: rows * cols,
            found: cells.len(),
        });
        return ValidationReport { violations };
    }
    let mut total = 0.0;
    for (k, &v) in cells.iter().enumerate() {
        let (row, col) = (k / cols, k % cols);
        if !v.is_finite() {
            violations.push(Violation::NonFinite { row, col });
        } else if v < 0.0 {
            violations.push(Violation::NegativeCell { row, col, value: v });
        } else {
            total += v;
        }
    }
    if total <= 0.0 {
        violations.push(Violation::ZeroTotal);
    }
    ValidationReport { violations }
}

impl ContingencyTable {
    /// Builds a table from row-major cells.
    pub fn new(rows: usize, cols: usize, cells: Vec<f64>) -> Result<Self> {
        let report = validate(rows, cols, &cells);
        if !report.is_valid() {
            return Err(Error::InvalidTable(report));
        }
        Ok(Self {
            rows,
            cols,
            cells,
            row_labels: None,
            col_labels: None,
        })
    }

    /// Builds a table from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.as_ref().len());
        let mut cells = Vec::with_capacity(n * m);
        for r in rows {
            let r = r.as_ref();
            if r.len() != m {
                return Err(Error::InvalidTable(ValidationReport {
                    violations: vec![Violation::ShapeMismatch {
                        expected: m,
                        found: r.len(),
                    }],
                }));
            }
            cells.extend_from_slice(r);
        }
        Self::new(n, m, cells)
    }

    pub fn with_labels(
        mut self,
        row_labels: Option<Vec<String>>,
        col_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let mut violations = Vec::new();
        if let Some(l) = &row_labels {
            if l.len() != self.rows {
                violations.push(Violation::LabelCount {
                    axis: "row",
                    expected: self.rows,
                    found: l.len(),
                });
            }
        }
        if let Some(l) = &col_labels {
            if l.len() != self.cols {
                violations.push(Violation::LabelCount {
                    axis: "column",
                    expected: self.cols,
                    found: l.len(),
                });
            }
        }
        if !violations.is_empty() {
            return Err(Error::InvalidTable(ValidationReport { violations }));
        }
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        Ok(self)
    }

    /// Same labels as `self`, new cells. Internal constructor for engine
    /// outputs, which keep the invariants by construction.
    pub(crate) fn with_cells(&self, cells: Vec<f64>) -> Result<Self> {
        let mut t = Self::new(self.rows, self.cols, cells)?;
        t.row_labels = self.row_labels.clone();
        t.col_labels = self.col_labels.clone();
        Ok(t)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.cells[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.cells.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn col_labels(&self) -> Option<&[String]> {
        self.col_labels.as_deref()
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().sum()
    }

    pub fn row_totals(&self) -> Vec<f64> {
        self.cells.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_totals(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for r in self.cells.chunks(self.cols) {
            for (acc, v) in out.iter_mut().zip(r) {
                *acc += v;
            }
        }
        out
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Largest absolute cell difference; `None` when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        (self.shape() == other.shape()).then(|| {
            self.cells
                .iter()
                .zip(&other.cells)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }

    /// Cells rounded half away from zero, as the integer presentation of a
    /// fractional table.
    pub fn rounded(&self) -> Vec<Vec<f64>> {
        self.cells
            .chunks(self.cols)
            .map(|r| r.iter().map(|v| v.round()).collect())
            .collect()
    }

    /// Checks the invariants again; always valid for a constructed table.
    pub fn validate(&self) -> ValidationReport {
        validate(self.rows, self.cols, &self.cells)
    }
}

impl fmt::Display for ContingencyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, r) in self.cells.chunks(self.cols).enumerate() {
            if k > 0 {
                f.write_str("\n")?;
            }
            let cells: Vec<String> = r.iter().map(|v| format_value(*v, 12)).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    cells: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    row_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    col_labels: Option<Vec<String>>,
}

impl From<ContingencyTable> for TableRepr {
    fn from(t: ContingencyTable) -> Self {
        TableRepr {
            cells: t.to_rows(),
            row_labels: t.row_labels,
            col_labels: t.col_labels,
        }
    }
}

impl TryFrom<TableRepr> for ContingencyTable {
    type Error = Error;

    fn try_from(r: TableRepr) -> Result<Self> {
        ContingencyTable::from_rows(&r.cells)?.with_labels(r.row_labels, r.col_labels)
    }
}

/// Target row and column totals with a common grand total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginTargets {
    row_totals: Vec<f64>,
    col_totals: Vec<f64>,
}

impl MarginTargets {
    pub fn new(row_totals: Vec<f64>, col_totals: Vec<f64>) -> Result<Self> {
        if row_totals.is_empty() || col_totals.is_empty() {
            return Err(Error::InvalidMargins("empty margin vector".into()));
        }
        if let Some(v) = row_totals
            .iter()
            .chain(&col_totals)
            .find(|v| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidMargins(format!(
                "entry {v} is negative or not finite"
            )));
        }
        let r: f64 = row_totals.iter().sum();
        let c: f64 = col_totals.iter().sum();
        if r <= 0.0 {
            return Err(Error::InvalidMargins("grand total is zero".into()));
        }
        if (r - c).abs() > MARGIN_TOLERANCE * r.max(c) {
            return Err(Error::InvalidMargins(format!(
                "row totals sum to {r} but column totals sum to {c}"
            )));
        }
        Ok(Self {
            row_totals,
            col_totals,
        })
    }

    pub fn row_totals(&self) -> &[f64] {
        &self.row_totals
    }

    pub fn col_totals(&self) -> &[f64] {
        &self.col_totals
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.row_totals.len(), self.col_totals.len())
    }

    pub fn total(&self) -> f64 {
        self.row_totals.iter().sum()
    }

    /// Fails unless the targets fit a table of the given shape.
    pub fn check_shape(&self, table: &ContingencyTable) -> Result<()> {
        if self.shape() != table.shape() {
            return Err(Error::Dimension {
                expected: format!("{}x{} targets", table.rows(), table.cols()),
                found: format!("{}x{}", self.row_totals.len(), self.col_totals.len()),
            });
        }
        Ok(())
    }

    /// True if every entry of both vectors agrees within `rel_tol` of the
    /// grand total.
    pub fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        if self.shape() != other.shape() {
            return false;
        }
        let scale = self.total().max(other.total());
        self.row_totals
            .iter()
            .zip(&other.row_totals)
            .chain(self.col_totals.iter().zip(&other.col_totals))
            .all(|(a, b)| (a - b).abs() <= rel_tol * scale)
    }
}

/// Row and column totals of `table`.
pub fn margins(table: &ContingencyTable) -> MarginTargets {
    MarginTargets {
        row_totals: table.row_totals(),
        col_totals: table.col_totals(),
    }
}

/// A split of the ordered categories: the first `i` rows and first `j`
/// columns form the low block, the rest the high block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AggregationCut {
    pub i: usize,
    pub j: usize,
}

impl AggregationCut {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }

    pub fn check(&self, rows: usize, cols: usize) -> Result<()> {
        if self.i == 0 || self.i >= rows || self.j == 0 || self.j >= cols {
            return Err(Error::CutOutOfBounds {
                i: self.i,
                j: self.j,
                rows,
                cols,
            });
        }
        Ok(())
    }

    /// All cuts of a `rows x cols` table in row-major order.
    pub fn all(rows: usize, cols: usize) -> impl Iterator<Item = AggregationCut> {
        (1..rows).flat_map(move |i| (1..cols).map(move |j| AggregationCut { i, j }))
    }
}

/// Collapses `table` to 2x2 along `cut`. The bottom-right cell holds the mass
/// strictly below and right of the cut.
pub fn aggregate_2x2(table: &ContingencyTable, cut: AggregationCut) -> Result<ContingencyTable> {
    cut.check(table.rows(), table.cols())?;
    let mut out = [0.0; 4];
    for r in 0..table.rows() {
        let hr = usize::from(r >= cut.i);
        for c in 0..table.cols() {
            let hc = usize::from(c >= cut.j);
            out[2 * hr + hc] += table.get(r, c);
        }
    }
    ContingencyTable::new(2, 2, out.to_vec())
}

/// Which margin goes in the numerator of [`margin_ratio`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// Row-margin sum over column-margin sum, e.g. `N_{H,.} / N_{.,H}`.
    #[default]
    RowsOverCols,
    /// Column-margin sum over row-margin sum.
    ColsOverRows,
}

/// Ratio of a selected row-margin sum to a selected column-margin sum
/// (0-based indices), or its transpose.
pub fn margin_ratio(
    table: &ContingencyTable,
    row_indices: &[usize],
    col_indices: &[usize],
    orientation: Orientation,
) -> Result<f64> {
    if row_indices.is_empty() || col_indices.is_empty() {
        return Err(Error::InvalidArgument("empty index set".into()));
    }
    let rows = table.row_totals();
    let cols = table.col_totals();
    let pick = |totals: &[f64], idx: &[usize], what: &str| -> Result<f64> {
        idx.iter()
            .map(|&k| {
                totals.get(k).copied().ok_or_else(|| {
                    Error::InvalidArgument(format!("{what} index {k} out of range"))
                })
            })
            .sum()
    };
    let r = pick(&rows, row_indices, "row")?;
    let c = pick(&cols, col_indices, "column")?;
    let (num, den) = match orientation {
        Orientation::RowsOverCols => (r, c),
        Orientation::ColsOverRows => (c, r),
    };
    if den == 0.0 {
        return Err(Error::ZeroDenominator("selected margin sum is zero".into()));
    }
    Ok(num / den)
}
