//! Iterative proportional fitting (RAS): alternate row and column scaling of a
//! seed table until both margins hit their targets.
//!
//! Every step multiplies whole rows or whole columns by one factor, so each
//! odds-ratio of the seed survives unchanged, and zero cells stay zero.

use serde::Serialize;

use crate::error::{Axis, Error, Result};
use crate::indicators::{local_odds_ratios, LLMatrix};
use crate::tables::{ContingencyTable, MarginTargets};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IpfConfig {
    pub max_iterations: usize,
    /// Bound on the largest absolute margin deviation divided by the grand
    /// total.
    pub tolerance: f64,
    pub record_trajectory: bool,
}

impl Default for IpfConfig {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            tolerance: 1e-10,
            record_trajectory: false,
        }
    }
}

impl IpfConfig {
    fn check(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Tables after the two half-steps of one iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IpfStep {
    pub after_rows: ContingencyTable,
    pub after_cols: ContingencyTable,
    pub residual: f64,
}

/// The association measure a transformation keeps, before and after.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "indicator", rename_all = "snake_case")]
pub enum Preserved {
    /// Local odds-ratios of adjacent 2x2 blocks; `None` where a block has a
    /// zero cell.
    OddsRatios {
        seed: Vec<Option<f64>>,
        output: Vec<Option<f64>>,
    },
    LiuLu { seed: LLMatrix, output: LLMatrix },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformResult {
    pub table: ContingencyTable,
    pub iterations: usize,
    pub margin_residual: f64,
    pub converged: bool,
    pub preserved: Preserved,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trajectory: Vec<IpfStep>,
}

/// Largest absolute deviation of either margin from its target, relative to
/// the target grand total.
pub fn margin_residual(table: &ContingencyTable, targets: &MarginTargets) -> f64 {
    residual(table.cells(), table.cols(), targets)
}

fn residual(cells: &[f64], cols: usize, targets: &MarginTargets) -> f64 {
    let mut worst = 0.0f64;
    for (row, t) in cells.chunks(cols).zip(targets.row_totals()) {
        worst = worst.max((row.iter().sum::<f64>() - t).abs());
    }
    for (c, t) in targets.col_totals().iter().enumerate() {
        let s: f64 = cells.iter().skip(c).step_by(cols).sum();
        worst = worst.max((s - t).abs());
    }
    worst / targets.total()
}

fn scale_rows(cells: &mut [f64], cols: usize, targets: &[f64]) -> Result<()> {
    for (i, (row, &t)) in cells.chunks_mut(cols).zip(targets).enumerate() {
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            let f = t / s;
            row.iter_mut().for_each(|v| *v *= f);
        } else if t > 0.0 {
            return Err(Error::StructuralZero {
                axis: Axis::Row,
                index: i,
                target: t,
            });
        }
    }
    Ok(())
}

fn scale_cols(cells: &mut [f64], cols: usize, targets: &[f64]) -> Result<()> {
    for (j, &t) in targets.iter().enumerate() {
        let s: f64 = cells.iter().skip(j).step_by(cols).sum();
        if s > 0.0 {
            let f = t / s;
            cells.iter_mut().skip(j).step_by(cols).for_each(|v| *v *= f);
        } else if t > 0.0 {
            return Err(Error::StructuralZero {
                axis: Axis::Column,
                index: j,
                target: t,
            });
        }
    }
    Ok(())
}

/// Scales every row of `table` to its target total.
pub fn ipf_step_rows(table: &ContingencyTable, targets: &MarginTargets) -> Result<ContingencyTable> {
    targets.check_shape(table)?;
    let mut cells = table.cells().to_vec();
    scale_rows(&mut cells, table.cols(), targets.row_totals())?;
    table.with_cells(cells)
}

/// Scales every column of `table` to its target total.
pub fn ipf_step_cols(table: &ContingencyTable, targets: &MarginTargets) -> Result<ContingencyTable> {
    targets.check_shape(table)?;
    let mut cells = table.cells().to_vec();
    scale_cols(&mut cells, table.cols(), targets.col_totals())?;
    table.with_cells(cells)
}

fn check_zero_pattern(seed: &ContingencyTable, targets: &MarginTargets) -> Result<()> {
    let slices = seed
        .row_totals()
        .into_iter()
        .zip(targets.row_totals())
        .map(|(s, &t)| (Axis::Row, s, t))
        .enumerate()
        .chain(
            seed.col_totals()
                .into_iter()
                .zip(targets.col_totals())
                .map(|(s, &t)| (Axis::Column, s, t))
                .enumerate(),
        );
    for (index, (axis, seed_sum, target)) in slices {
        if seed_sum == 0.0 && target > 0.0 {
            return Err(Error::StructuralZero {
                axis,
                index,
                target,
            });
        }
        if seed_sum > 0.0 && target == 0.0 {
            return Err(Error::ZeroTargetPositiveSeed { axis, index });
        }
    }
    Ok(())
}

/// Fits `seed` to `targets`. One iteration is a row step followed by a column
/// step; iteration stops once the margin residual is within tolerance.
/// Running out of iterations is reported through `converged`, not an error.
pub fn ipf_fit(
    seed: &ContingencyTable,
    targets: &MarginTargets,
    config: &IpfConfig,
) -> Result<TransformResult> {
    config.check()?;
    targets.check_shape(seed)?;
    check_zero_pattern(seed, targets)?;

    let cols = seed.cols();
    let mut cells = seed.cells().to_vec();
    let mut trajectory = Vec::new();
    let mut iterations = 0;
    let mut res = f64::INFINITY;
    while iterations < config.max_iterations {
        scale_rows(&mut cells, cols, targets.row_totals())?;
        let after_rows = config
            .record_trajectory
            .then(|| seed.with_cells(cells.clone()))
            .transpose()?;
        scale_cols(&mut cells, cols, targets.col_totals())?;
        iterations += 1;
        res = residual(&cells, cols, targets);
        if let Some(after_rows) = after_rows {
            trajectory.push(IpfStep {
                after_rows,
                after_cols: seed.with_cells(cells.clone())?,
                residual: res,
            });
        }
        if res <= config.tolerance {
            break;
        }
    }

    let table = seed.with_cells(cells)?;
    let preserved = Preserved::OddsRatios {
        seed: local_odds_ratios(seed),
        output: local_odds_ratios(&table),
    };
    Ok(TransformResult {
        table,
        iterations,
        margin_residual: res,
        converged: res <= config.tolerance,
        preserved,
        trajectory,
    })
}
