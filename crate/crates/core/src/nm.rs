//! The NM method: move a table onto new margins while keeping its Liu–Lu
//! value, or for larger tables the whole generalized LL matrix.
//!
//! A 2x2 table has three free margin constraints plus the LL condition, which
//! pins the H,H cell in closed form. For an `n x m` table every cut `(i,j)` is
//! its own 2x2 problem whose solution is the tail sum `T(i,j)` of the output
//! block strictly below and right of the cut; the margins supply the boundary
//! of the tail grid and the cells follow by inclusion-exclusion.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::indicators::{
    independence_expectation, integer_part, liu_lu, liu_lu_generalized, LLValue,
};
use crate::ipf::{margin_residual, Preserved, TransformResult};
use crate::tables::{aggregate_2x2, AggregationCut, ContingencyTable, MarginTargets};

/// Reconstructed cells this close to zero (relative to the grand total) are
/// treated as exact zeros.
const ZERO_SNAP: f64 = 1e-12;

/// One per-cut instance of the closed-form 2x2 solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NmSubproblem {
    pub cut: AggregationCut,
    pub source_ll: LLValue,
    pub target_expected_hh: u64,
    pub target_min_margin: f64,
    pub tail_sum: f64,
}

/// H,H cell under the target H margins that reproduces `source_ll`.
fn solve_hh(source_ll: &LLValue, h_row: f64, h_col: f64, total: f64) -> Result<(f64, u64, f64)> {
    let expected_hh = integer_part(independence_expectation(h_row, h_col, total));
    let e = expected_hh as f64;
    let min_margin = h_row.min(h_col);
    if min_margin - e <= 0.0 {
        return Err(Error::DegenerateMargin {
            min_margin,
            expected_hh,
        });
    }
    let hh = source_ll.numerator * (min_margin - e) / source_ll.denominator + e;
    Ok((hh, expected_hh, min_margin))
}

/// Closed-form NM transform of a 2x2 table.
pub fn nm_fit_2x2(source: &ContingencyTable, targets: &MarginTargets) -> Result<TransformResult> {
    if source.shape() != (2, 2) {
        return Err(Error::Dimension {
            expected: "2x2".into(),
            found: format!("{}x{}", source.rows(), source.cols()),
        });
    }
    nm_fit(source, targets)
}

/// Solves every per-cut subproblem of the generalized NM transform.
pub fn nm_subproblems(
    source: &ContingencyTable,
    targets: &MarginTargets,
) -> Result<Vec<NmSubproblem>> {
    targets.check_shape(source)?;
    let rows = targets.row_totals();
    let cols = targets.col_totals();
    let total = targets.total();
    AggregationCut::all(source.rows(), source.cols())
        .map(|cut| {
            let agg = aggregate_2x2(source, cut)?;
            let source_ll = liu_lu(&agg).map_err(|e| e.at_cut(cut))?;
            let h_row: f64 = rows[cut.i..].iter().sum();
            let h_col: f64 = cols[cut.j..].iter().sum();
            let (tail_sum, target_expected_hh, target_min_margin) =
                solve_hh(&source_ll, h_row, h_col, total).map_err(|e| e.at_cut(cut))?;
            Ok(NmSubproblem {
                cut,
                source_ll,
                target_expected_hh,
                target_min_margin,
                tail_sum,
            })
        })
        .collect()
}

/// NM transform of an `n x m` table onto `targets`.
///
/// Fails with [`Error::InfeasibleTarget`] when the cut solutions imply a
/// negative cell; no repair is attempted.
pub fn nm_fit(source: &ContingencyTable, targets: &MarginTargets) -> Result<TransformResult> {
    let subs = nm_subproblems(source, targets)?;
    let (n, m) = source.shape();
    let total = targets.total();

    // tail[i][j] = mass in rows >= i, cols >= j (0-based), with zeros past the edge
    let mut tail = vec![vec![0.0; m + 1]; n + 1];
    for (i, row) in tail.iter_mut().take(n).enumerate() {
        row[0] = targets.row_totals()[i..].iter().sum();
    }
    for (j, v) in tail[0].iter_mut().take(m).enumerate() {
        *v = targets.col_totals()[j..].iter().sum();
    }
    tail[0][0] = total;
    for s in &subs {
        tail[s.cut.i][s.cut.j] = s.tail_sum;
    }

    let mut cells = Vec::with_capacity(n * m);
    for r in 0..n {
        for c in 0..m {
            let corners = [tail[r][c], tail[r + 1][c], tail[r][c + 1], tail[r + 1][c + 1]];
            let mut v = corners[0] - corners[1] - corners[2] + corners[3];
            if v < 0.0 {
                if v >= -ZERO_SNAP * total {
                    v = 0.0;
                } else {
                    return Err(Error::InfeasibleTarget {
                        row: r,
                        col: c,
                        value: v,
                        tails: corners,
                    });
                }
            }
            cells.push(v);
        }
    }

    let table = source.with_cells(cells)?;
    let seed_ll = liu_lu_generalized(source)?;
    let output_ll = liu_lu_generalized(&table)?;
    Ok(TransformResult {
        margin_residual: margin_residual(&table, targets),
        table,
        iterations: 0,
        converged: true,
        preserved: Preserved::LiuLu {
            seed: seed_ll,
            output: output_ll,
        },
        trajectory: Vec::new(),
    })
}
