//! Counterfactual tables and the two-factor additive decomposition with an
//! interaction term.
//!
//! `f(A, P)` is an outcome statistic of the table that combines the margins
//! (availability) of period `A` with the association (preferences) of period
//! `P`. For periods 0 and 1,
//!
//! ```text
//! f(A1,P1) - f(A0,P0) = [f(A1,P0) - f(A0,P0)]                    availability
//!                     + [f(A0,P1) - f(A0,P0)]                    preferences
//!                     + [f(A1,P1) - f(A1,P0) - f(A0,P1) + f(A0,P0)]  interaction
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ipf::{ipf_fit, IpfConfig};
use crate::nm::nm_fit;
use crate::tables::{margins, ContingencyTable, MarginTargets};

/// Availability equal to the preference table's own margins within this
/// relative tolerance returns the preference table unchanged.
const SAME_PERIOD_TOLERANCE: f64 = 1e-12;

/// Table-transformation engine used to build counterfactuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    Ipf(IpfConfig),
    Nm,
}

impl Method {
    /// IPF with the default configuration.
    pub fn ipf() -> Self {
        Method::Ipf(IpfConfig::default())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Ipf(_) => "ipf",
            Method::Nm => "nm",
        }
    }
}

/// Shares of a square couples table (rows = husbands, columns = wives).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShareStatistics {
    pub heterogamy_share: f64,
    /// Husband in a higher category than the wife (below the diagonal).
    pub hypergamy_share: f64,
    /// Wife in a higher category than the husband (above the diagonal).
    pub hypogamy_share: f64,
    pub homogamy_share: f64,
}

fn require_square(table: &ContingencyTable) -> Result<()> {
    if !table.is_square() {
        return Err(Error::NotSquare {
            rows: table.rows(),
            cols: table.cols(),
        });
    }
    Ok(())
}

pub fn share_statistics(table: &ContingencyTable) -> Result<ShareStatistics> {
    require_square(table)?;
    let (mut diag, mut lower, mut upper) = (0.0, 0.0, 0.0);
    for r in 0..table.rows() {
        for c in 0..table.cols() {
            let v = table.get(r, c);
            match r.cmp(&c) {
                std::cmp::Ordering::Equal => diag += v,
                std::cmp::Ordering::Greater => lower += v,
                std::cmp::Ordering::Less => upper += v,
            }
        }
    }
    let total = table.total();
    Ok(ShareStatistics {
        heterogamy_share: (lower + upper) / total,
        hypergamy_share: lower / total,
        hypogamy_share: upper / total,
        homogamy_share: diag / total,
    })
}

/// Off-diagonal mass over total mass.
pub fn heterogamy_share(table: &ContingencyTable) -> Result<f64> {
    share_statistics(table).map(|s| s.heterogamy_share)
}

/// Outcome statistic `h` applied to each (counterfactual) table.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Heterogamy,
    Hypergamy,
    Hypogamy,
    Homogamy,
    /// Share of the grand total held by the listed `(row, col)` cells.
    Cells(Vec<(usize, usize)>),
}

impl Outcome {
    pub fn evaluate(&self, table: &ContingencyTable) -> Result<f64> {
        let shares = || share_statistics(table);
        match self {
            Outcome::Heterogamy => Ok(shares()?.heterogamy_share),
            Outcome::Hypergamy => Ok(shares()?.hypergamy_share),
            Outcome::Hypogamy => Ok(shares()?.hypogamy_share),
            Outcome::Homogamy => Ok(shares()?.homogamy_share),
            Outcome::Cells(cells) => {
                let mut acc = 0.0;
                for &(r, c) in cells {
                    if r >= table.rows() || c >= table.cols() {
                        return Err(Error::InvalidArgument(format!(
                            "cell ({r},{c}) outside a {}x{} table",
                            table.rows(),
                            table.cols()
                        )));
                    }
                    acc += table.get(r, c);
                }
                Ok(acc / table.total())
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Heterogamy => "heterogamy",
            Outcome::Hypergamy => "hypergamy",
            Outcome::Hypogamy => "hypogamy",
            Outcome::Homogamy => "homogamy",
            Outcome::Cells(_) => "cells",
        }
    }
}

/// Table with the margins `availability` and the association of
/// `preference_table`. Same-period inputs return the preference table.
pub fn counterfactual(
    preference_table: &ContingencyTable,
    availability: &MarginTargets,
    method: &Method,
) -> Result<ContingencyTable> {
    if margins(preference_table).approx_eq(availability, SAME_PERIOD_TOLERANCE) {
        return Ok(preference_table.clone());
    }
    match method {
        Method::Nm => nm_fit(preference_table, availability).map(|r| r.table),
        Method::Ipf(cfg) => {
            let r = ipf_fit(preference_table, availability, cfg)?;
            if !r.converged {
                return Err(Error::NotConverged {
                    iterations: r.iterations,
                    residual: r.margin_residual,
                });
            }
            Ok(r.table)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionResult {
    #[serde(flatten)]
    pub method: Method,
    pub outcome: Outcome,
    pub total_change: f64,
    pub availability_effect: f64,
    pub preference_effect: f64,
    pub interaction_effect: f64,
    /// `f(A0,P0)`, `f(A1,P0)`, `f(A0,P1)`, `f(A1,P1)`.
    pub outcome_values: [f64; 4],
    /// `g(A1, P0)`: period-1 margins, period-0 association.
    pub counterfactual_a1_p0: ContingencyTable,
    /// `g(A0, P1)`: period-0 margins, period-1 association.
    pub counterfactual_a0_p1: ContingencyTable,
}

impl DecompositionResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serializes")
    }
}

pub fn decompose(
    table_0: &ContingencyTable,
    table_1: &ContingencyTable,
    outcome: &Outcome,
    method: &Method,
) -> Result<DecompositionResult> {
    if table_0.shape() != table_1.shape() {
        return Err(Error::Dimension {
            expected: format!("{}x{}", table_0.rows(), table_0.cols()),
            found: format!("{}x{}", table_1.rows(), table_1.cols()),
        });
    }
    let leg = |name: &str, e: Error| Error::Counterfactual {
        leg: name.to_string(),
        source: Box::new(e),
    };
    let cf_a1_p0 = counterfactual(table_0, &margins(table_1), method)
        .map_err(|e| leg("g(A1,P0)", e))?;
    let cf_a0_p1 = counterfactual(table_1, &margins(table_0), method)
        .map_err(|e| leg("g(A0,P1)", e))?;

    let f00 = outcome.evaluate(table_0)?;
    let f11 = outcome.evaluate(table_1)?;
    let f10 = outcome.evaluate(&cf_a1_p0)?;
    let f01 = outcome.evaluate(&cf_a0_p1)?;

    Ok(DecompositionResult {
        method: *method,
        outcome: outcome.clone(),
        total_change: f11 - f00,
        availability_effect: f10 - f00,
        preference_effect: f01 - f00,
        interaction_effect: f11 - f10 - f01 + f00,
        outcome_values: [f00, f10, f01, f11],
        counterfactual_a1_p0: cf_a1_p0,
        counterfactual_a0_p1: cf_a0_p1,
    })
}

/// Outcome path if only preferences had changed, anchored at the historical
/// value of `tables[reference]` and chained over adjacent pairs. Entries
/// before the reference are filled backwards by the same increments.
pub fn cumulative_preference_path(
    tables: &[ContingencyTable],
    reference: usize,
    outcome: &Outcome,
    method: &Method,
) -> Result<Vec<f64>> {
    if tables.len() < 2 {
        return Err(Error::InvalidArgument("need at least two tables".into()));
    }
    if reference >= tables.len() {
        return Err(Error::InvalidArgument(format!(
            "reference index {reference} out of range for {} tables",
            tables.len()
        )));
    }
    let steps = tables
        .windows(2)
        .map(|w| decompose(&w[0], &w[1], outcome, method).map(|d| d.preference_effect))
        .collect::<Result<Vec<_>>>()?;

    let mut path = vec![0.0; tables.len()];
    path[reference] = outcome.evaluate(&tables[reference])?;
    for k in reference + 1..tables.len() {
        path[k] = path[k - 1] + steps[k - 1];
    }
    for k in (0..reference).rev() {
        path[k] = path[k + 1] - steps[k];
    }
    Ok(path)
}
