//! Association and divergence measures: odds-ratio, the Liu–Lu sorting
//! indicator (scalar and matrix-valued) and the KL directed divergence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tables::{aggregate_2x2, AggregationCut, ContingencyTable, MarginTargets};

/// Slack when comparing real-valued cells against the integral `int(R)`.
const HH_SLACK: f64 = 1e-9;

/// Tolerance on the unit sum of un-normalized KL inputs.
const UNIT_SUM_TOLERANCE: f64 = 1e-9;

fn require_2x2(table: &ContingencyTable) -> Result<()> {
    if table.shape() != (2, 2) {
        return Err(Error::Dimension {
            expected: "2x2".into(),
            found: format!("{}x{}", table.rows(), table.cols()),
        });
    }
    Ok(())
}

/// Cross-product ratio `(c11 c22) / (c12 c21)` of a 2x2 table.
pub fn odds_ratio(table: &ContingencyTable) -> Result<f64> {
    require_2x2(table)?;
    let c = table.cells();
    if let Some(k) = c.iter().position(|&v| v == 0.0) {
        return Err(Error::ZeroCell {
            row: k / 2,
            col: k % 2,
        });
    }
    Ok((c[0] * c[3]) / (c[1] * c[2]))
}

/// Local odds-ratios of adjacent 2x2 blocks, `(n-1) x (m-1)` row-major;
/// `None` where a block has a zero cell.
pub fn local_odds_ratios(table: &ContingencyTable) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity((table.rows() - 1) * (table.cols() - 1));
    for r in 0..table.rows() - 1 {
        for c in 0..table.cols() - 1 {
            let (a, b) = (table.get(r, c), table.get(r, c + 1));
            let (d, e) = (table.get(r + 1, c), table.get(r + 1, c + 1));
            let den = b * d;
            out.push((a > 0.0 && e > 0.0 && den > 0.0).then(|| a * e / den));
        }
    }
    out
}

/// The integer part used for `int(R)`: floor, after snapping values within
/// 1e-9 relative of an integer onto it.
pub fn integer_part(r: f64) -> u64 {
    let nearest = r.round();
    let v = if (r - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest
    } else {
        r.floor()
    };
    v.max(0.0) as u64
}

/// Independence expectation `R = N_{H,.} N_{.,H} / N` of the H,H cell.
pub fn independence_expectation(h_row: f64, h_col: f64, total: f64) -> f64 {
    h_row * h_col / total
}

/// `int(R)` for the margins of a 2x2 table (H is the second category).
pub fn expected_hh(margins: &MarginTargets) -> Result<u64> {
    if margins.shape() != (2, 2) {
        return Err(Error::Dimension {
            expected: "2x2 margins".into(),
            found: format!("{}x{}", margins.shape().0, margins.shape().1),
        });
    }
    let r = independence_expectation(
        margins.row_totals()[1],
        margins.col_totals()[1],
        margins.total(),
    );
    Ok(integer_part(r))
}

/// Liu–Lu value of a 2x2 table together with its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LLValue {
    pub value: f64,
    /// `N_{H,H} - int(R)`
    pub numerator: f64,
    /// `min(N_{H,.}, N_{.,H}) - int(R)`
    pub denominator: f64,
    pub expected_hh: u64,
}

/// LL value from the H,H cell and the H margins of a 2x2 table.
pub(crate) fn liu_lu_parts(hh: f64, h_row: f64, h_col: f64, total: f64) -> Result<LLValue> {
    let expected_hh = integer_part(independence_expectation(h_row, h_col, total));
    let e = expected_hh as f64;
    let min_margin = h_row.min(h_col);
    if min_margin - e <= 0.0 {
        return Err(Error::DegenerateMargin {
            min_margin,
            expected_hh,
        });
    }
    if hh < e - HH_SLACK * e.max(1.0) {
        return Err(Error::NegativeAssociation { hh, expected_hh });
    }
    let numerator = hh - e;
    let denominator = min_margin - e;
    Ok(LLValue {
        value: numerator / denominator,
        numerator,
        denominator,
        expected_hh,
    })
}

/// Liu–Lu sorting indicator: where the H,H cell sits between `int(R)` and its
/// feasible maximum, on a 0..1 scale.
pub fn liu_lu(table: &ContingencyTable) -> Result<LLValue> {
    require_2x2(table)?;
    let c = table.cells();
    liu_lu_parts(c[3], c[2] + c[3], c[1] + c[3], table.total())
}

/// Matrix-valued generalized Liu–Lu indicator over every aggregation cut.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LLMatrix {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<LLValue>,
}

impl LLMatrix {
    pub fn get(&self, cut: AggregationCut) -> &LLValue {
        &self.values[(cut.i - 1) * self.cols + (cut.j - 1)]
    }

    /// Plain values, row-major.
    pub fn values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.value).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a.value - b.value).abs())
            .fold(0.0, f64::max)
    }
}

pub fn liu_lu_generalized(table: &ContingencyTable) -> Result<LLMatrix> {
    let values = AggregationCut::all(table.rows(), table.cols())
        .map(|cut| {
            aggregate_2x2(table, cut)
                .and_then(|agg| liu_lu(&agg))
                .map_err(|e| e.at_cut(cut))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LLMatrix {
        rows: table.rows() - 1,
        cols: table.cols() - 1,
        values,
    })
}

/// KL directed divergence `sum p ln(p/q)`, with `0 ln 0 = 0`.
///
/// With `normalize` unset both tables must already sum to one.
pub fn kl_divergence(p: &ContingencyTable, q: &ContingencyTable, normalize: bool) -> Result<f64> {
    if p.shape() != q.shape() {
        return Err(Error::Dimension {
            expected: format!("{}x{}", p.rows(), p.cols()),
            found: format!("{}x{}", q.rows(), q.cols()),
        });
    }
    let (sp, sq) = (p.total(), q.total());
    if !normalize {
        for s in [sp, sq] {
            if (s - 1.0).abs() > UNIT_SUM_TOLERANCE {
                return Err(Error::NotNormalized { sum: s });
            }
        }
    }
    let (sp, sq) = if normalize { (sp, sq) } else { (1.0, 1.0) };
    let mut acc = 0.0;
    for (k, (&a, &b)) in p.cells().iter().zip(q.cells()).enumerate() {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Err(Error::SupportViolation {
                row: k / p.cols(),
                col: k % p.cols(),
            });
        }
        let (a, b) = (a / sp, b / sq);
        acc += a * (a / b).ln();
    }
    Ok(acc.max(0.0))
}
