//! Seeded sampling experiments.
//!
//! Two settings are kept apart here: drawing a random sample from a known
//! population table (where IPF recovers the population association), and
//! enumerating the population tables compatible with fixed 2x2 margins (the
//! natural ranking that the Liu–Lu value indexes).
//!
//! Every draw uses `ChaCha8Rng::seed_from_u64(seed)`. A uniform variate is
//! `(next_u64() >> 11) * 2^-53`, and each sampled unit picks the first cell,
//! in row-major order, whose cumulative share exceeds it. Batches seed draw
//! `k` with `seed.wrapping_add(k)`.

use std::io::Write;

use rand::Rng;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::indicators::{independence_expectation, integer_part};
use crate::ipf::{ipf_fit, IpfConfig};
use crate::tables::{margins, ContingencyTable, MarginTargets};

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000;

/// Bisection steps for the likelihood search; enough to exhaust f64.
const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleDraw {
    pub sample: ContingencyTable,
    pub population: ContingencyTable,
    pub size: u64,
    pub rng_seed: u64,
}

fn unit_uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Multinomial draw of `size` units with cell probabilities proportional to
/// the population cells.
pub fn draw_sample(population: &ContingencyTable, size: u64, rng_seed: u64) -> Result<SampleDraw> {
    if size == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    let total = population.total();
    let mut cumulative = Vec::with_capacity(population.cells().len());
    let mut acc = 0.0;
    for v in population.cells() {
        acc += v / total;
        cumulative.push(acc);
    }
    // the last positive cell absorbs rounding in the cumulative sum
    let last_positive = population
        .cells()
        .iter()
        .rposition(|&v| v > 0.0)
        .expect("valid table has a positive cell");

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut counts = vec![0.0; cumulative.len()];
    for _ in 0..size {
        let u = unit_uniform(&mut rng);
        let k = cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(last_positive)
            .min(last_positive);
        counts[k] += 1.0;
    }
    Ok(SampleDraw {
        sample: population.with_cells(counts)?,
        population: population.clone(),
        size,
        rng_seed,
    })
}

fn integer_margin(v: f64) -> Result<u64> {
    if v.fract() != 0.0 || v < 0.0 {
        return Err(Error::NonInteger(v));
    }
    Ok(v as u64)
}

/// Feasible range of the H,H cell for integer 2x2 margins, optionally
/// restricted to `H,H >= int(R)`.
fn hh_range(targets: &MarginTargets, nonneg_association_only: bool) -> Result<(u64, u64, [u64; 3])> {
    if targets.shape() != (2, 2) {
        return Err(Error::Dimension {
            expected: "2x2 margins".into(),
            found: format!("{}x{}", targets.shape().0, targets.shape().1),
        });
    }
    let h_row = integer_margin(targets.row_totals()[1])?;
    let h_col = integer_margin(targets.col_totals()[1])?;
    let total = integer_margin(targets.row_totals()[0])? + h_row;
    let mut lo = (h_row + h_col).saturating_sub(total);
    let hi = h_row.min(h_col);
    if nonneg_association_only {
        let e = integer_part(independence_expectation(h_row as f64, h_col as f64, total as f64));
        lo = lo.max(e);
    }
    Ok((lo, hi, [h_row, h_col, total]))
}

fn table_with_hh(hh: u64, [h_row, h_col, total]: [u64; 3]) -> ContingencyTable {
    let ll = total + hh - h_row - h_col;
    let cells = vec![ll as f64, (h_col - hh) as f64, (h_row - hh) as f64, hh as f64];
    ContingencyTable::new(2, 2, cells).expect("enumerated table is valid")
}

/// All nonnegative integer 2x2 tables with the given margins, ordered by the
/// H,H cell (the natural ranking).
pub fn enumerate_tables(
    targets: &MarginTargets,
    nonneg_association_only: bool,
) -> Result<Vec<ContingencyTable>> {
    enumerate_tables_with_cap(targets, nonneg_association_only, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_tables_with_cap(
    targets: &MarginTargets,
    nonneg_association_only: bool,
    cap: u64,
) -> Result<Vec<ContingencyTable>> {
    let (lo, hi, m) = hh_range(targets, nonneg_association_only)?;
    let count = hi + 1 - lo;
    if count > cap {
        return Err(Error::EnumerationCap { count, cap });
    }
    Ok((lo..=hi).map(|hh| table_with_hh(hh, m)).collect())
}

/// Position of an integer 2x2 table in the natural ranking of its margins.
pub fn natural_rank(table: &ContingencyTable, nonneg_association_only: bool) -> Result<u64> {
    let (lo, hi, _) = hh_range(&margins(table), nonneg_association_only)?;
    let hh = integer_margin(table.get(1, 1))?;
    if hh < lo || hh > hi {
        return Err(Error::InvalidArgument(format!(
            "H,H cell {hh} outside the ranked range {lo}..={hi}"
        )));
    }
    Ok(hh - lo)
}

/// A table drawn uniformly from the enumerated set. Offered as a tool; no
/// claim is made that population tables are uniformly distributed.
pub fn sample_uniform_table(
    targets: &MarginTargets,
    nonneg_association_only: bool,
    rng_seed: u64,
) -> Result<ContingencyTable> {
    let (lo, hi, m) = hh_range(targets, nonneg_association_only)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok(table_with_hh(rng.random_range(lo..=hi), m))
}

/// IPF fit versus the likelihood maximizer for one sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MleReport {
    pub ipf_free_cell: Option<f64>,
    pub mle_free_cell: Option<f64>,
    pub discrepancy: Option<f64>,
    pub issue: Option<String>,
}

/// H,H-free-cell solution `m` of `m (n - a - b + m) = psi (a - m)(b - m)`:
/// the 2x2 table with top-left cell `m`, first-row total `a`, first-column
/// total `b`, grand total `n` and odds-ratio `psi`.
fn cell_for_odds_ratio(psi: f64, a: f64, b: f64, n: f64) -> f64 {
    let mut lo = (a + b - n).max(0.0);
    let mut hi = a.min(b);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = mid * (n - a - b + mid) - psi * (a - mid) * (b - mid);
        if g < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Free cell (top-left) of the population table maximizing the profile
/// likelihood of `sample` given the population margins.
///
/// Model: the population table has the known margins and odds-ratio `psi`;
/// the sample shares that odds-ratio while its own margins are free nuisance
/// parameters. Profiling them out leaves the fitted sample table with the
/// sample margins and odds-ratio `psi`, and the score in `ln psi` is the
/// observed minus fitted top-left count. The maximizer is found by bisection
/// on the sign of that score over the population free cell.
pub fn profile_mle_free_cell(sample: &ContingencyTable, population: &MarginTargets) -> Result<f64> {
    if sample.shape() != (2, 2) || population.shape() != (2, 2) {
        return Err(Error::Dimension {
            expected: "2x2".into(),
            found: format!("{}x{}", sample.rows(), sample.cols()),
        });
    }
    let s = sample.cells();
    let (sa, sb, sn) = (s[0] + s[1], s[0] + s[2], sample.total());
    let (pa, pb, pn) = (population.row_totals()[0], population.col_totals()[0], population.total());
    let odds = |x: f64| x * (pn - pa - pb + x) / ((pa - x) * (pb - x));

    let mut lo = (pa + pb - pn).max(0.0);
    let mut hi = pa.min(pb);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fitted = cell_for_odds_ratio(odds(mid), sa, sb, sn);
        if s[0] > fitted {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Profile log-likelihood of `sample` at population free cell `x`; the
/// function [`profile_mle_free_cell`] maximizes.
pub fn profile_log_likelihood(sample: &ContingencyTable, population: &MarginTargets, x: f64) -> f64 {
    let s = sample.cells();
    let (sa, sb, sn) = (s[0] + s[1], s[0] + s[2], sample.total());
    let (pa, pb, pn) = (population.row_totals()[0], population.col_totals()[0], population.total());
    let psi = x * (pn - pa - pb + x) / ((pa - x) * (pb - x));
    let m = cell_for_odds_ratio(psi, sa, sb, sn);
    let fitted = [m, sa - m, sb - m, sn - sa - sb + m];
    s.iter()
        .zip(fitted)
        .filter(|(c, _)| **c > 0.0)
        .map(|(c, f)| c * (f / sn).ln())
        .sum()
}

/// Compares `ipf_fit(sample, margins(population))` with the likelihood
/// maximizer. Zero sample cells are reported in `issue`.
pub fn mle_check(population: &ContingencyTable, sample: &SampleDraw) -> MleReport {
    let report_issue = |issue: String| MleReport {
        ipf_free_cell: None,
        mle_free_cell: None,
        discrepancy: None,
        issue: Some(issue),
    };
    if sample.sample.shape() != (2, 2) {
        return report_issue("mle_check needs a 2x2 sample".into());
    }
    if let Some(k) = sample.sample.cells().iter().position(|&v| v == 0.0) {
        return report_issue(format!("sample cell ({},{}) is zero; odds-ratio undefined", k / 2, k % 2));
    }
    let targets = margins(population);
    let ipf = match ipf_fit(&sample.sample, &targets, &IpfConfig::default()) {
        Ok(r) if r.converged => r.table.get(0, 0),
        Ok(r) => return report_issue(format!("IPF did not converge (residual {:e})", r.margin_residual)),
        Err(e) => return report_issue(e.to_string()),
    };
    match profile_mle_free_cell(&sample.sample, &targets) {
        Ok(mle) => MleReport {
            ipf_free_cell: Some(ipf),
            mle_free_cell: Some(mle),
            discrepancy: Some((ipf - mle).abs()),
            issue: None,
        },
        Err(e) => report_issue(e.to_string()),
    }
}

/// One row of a batch experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub seed: u64,
    pub cells: Vec<f64>,
    pub report: MleReport,
}

/// `draws` samples of `size` from `population`, each checked with
/// [`mle_check`].
pub fn mle_experiment(
    population: &ContingencyTable,
    size: u64,
    base_seed: u64,
    draws: u64,
) -> Result<Vec<ExperimentRow>> {
    (0..draws)
        .map(|k| {
            let seed = base_seed.wrapping_add(k);
            let draw = draw_sample(population, size, seed)?;
            let report = mle_check(population, &draw);
            Ok(ExperimentRow {
                seed,
                cells: draw.sample.cells().to_vec(),
                report,
            })
        })
        .collect()
}

/// CSV with one row per draw: seed, cells, IPF free cell, MLE free cell,
/// discrepancy, issue.
pub fn write_experiment_csv<W: Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let err = |e: csv::Error| Error::InvalidArgument(format!("write failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    let ncells = rows.first().map_or(0, |r| r.cells.len());
    let mut header = vec!["seed".to_string()];
    header.extend((0..ncells).map(|k| format!("cell{k}")));
    header.extend(["ipf_free_cell", "mle_free_cell", "discrepancy", "issue"].map(String::from));
    w.write_record(&header).map_err(err)?;
    let opt = |v: Option<f64>| v.map_or_else(String::new, |v| format!("{v}"));
    for r in rows {
        let mut rec = vec![r.seed.to_string()];
        rec.extend(r.cells.iter().map(|v| format!("{v}")));
        rec.push(opt(r.report.ipf_free_cell));
        rec.push(opt(r.report.mle_free_cell));
        rec.push(opt(r.report.discrepancy));
        rec.push(r.report.issue.clone().unwrap_or_default());
        w.write_record(&rec).map_err(err)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidArgument(format!("write failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicators::liu_lu;

    fn t(rows: &[&[f64]]) -> ContingencyTable {
        ContingencyTable::from_rows(rows).unwrap()
    }

    fn m(r: [f64; 2], c: [f64; 2]) -> MarginTargets {
        MarginTargets::new(r.to_vec(), c.to_vec()).unwrap()
    }

    #[test]
    fn degenerate_population() {
        let pop = t(&[&[0.0, 0.0], &[0.0, 3.0]]);
        let d = draw_sample(&pop, 57, 9).unwrap();
        assert_eq!(d.sample.cells(), &[0.0, 0.0, 0.0, 57.0]);
        assert!(draw_sample(&pop, 0, 9).is_err());
    }

    #[test]
    fn draws_are_deterministic_and_sized() {
        let pop = t(&[&[500.0, 500.0], &[100.0, 900.0]]);
        for seed in 0..20 {
            let a = draw_sample(&pop, 100, seed).unwrap();
            assert_eq!(a, draw_sample(&pop, 100, seed).unwrap());
            assert_eq!(a.sample.total(), 100.0);
        }
    }

    #[test]
    fn enumeration_examples() {
        let e = enumerate_tables(&m([1.0, 1.0], [1.0, 1.0]), false).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(e[1].to_rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);

        let e = enumerate_tables(&m([2.0, 2.0], [2.0, 2.0]), false).unwrap();
        let hh: Vec<f64> = e.iter().map(|t| t.get(1, 1)).collect();
        assert_eq!(hh, vec![0.0, 1.0, 2.0]);
        // int(R) = 1 drops the first table
        assert_eq!(enumerate_tables(&m([2.0, 2.0], [2.0, 2.0]), true).unwrap().len(), 2);
    }

    #[test]
    fn enumeration_errors() {
        assert!(matches!(
            enumerate_tables(&m([1.5, 0.5], [1.0, 1.0]), false),
            Err(Error::NonInteger(_))
        ));
        assert!(matches!(
            enumerate_tables_with_cap(&m([50.0, 50.0], [50.0, 50.0]), false, 10),
            Err(Error::EnumerationCap { count: 51, cap: 10 })
        ));
        let wide = MarginTargets::new(vec![1.0, 1.0], vec![1.0, 0.5, 0.5]).unwrap();
        assert!(enumerate_tables(&wide, false).is_err());
    }

    #[test]
    fn rank_matches_position() {
        let targets = m([7.0, 5.0], [4.0, 8.0]);
        for (k, tab) in enumerate_tables(&targets, true).unwrap().iter().enumerate() {
            assert_eq!(natural_rank(tab, true).unwrap(), k as u64);
            let ll = liu_lu(tab).unwrap();
            assert_eq!(ll.numerator, k as f64);
        }
    }

    #[test]
    fn uniform_sampling_stays_in_set() {
        let targets = m([7.0, 5.0], [4.0, 8.0]);
        let set = enumerate_tables(&targets, true).unwrap();
        for seed in 0..50 {
            let tab = sample_uniform_table(&targets, true, seed).unwrap();
            assert!(set.contains(&tab));
        }
    }

    #[test]
    fn cell_for_odds_ratio_solves_quadratic() {
        let x = cell_for_odds_ratio(9.0, 1200.0, 600.0, 2000.0);
        let closed = (2050.0 - (2050.0f64 * 2050.0 - 4.0 * 810000.0).sqrt()) / 2.0;
        assert!((x - closed).abs() < 1e-9);
    }

    #[test]
    fn mle_on_own_population() {
        let pop = t(&[&[30.0, 20.0], &[10.0, 40.0]]);
        let draw = SampleDraw { sample: pop.clone(), population: pop.clone(), size: 100, rng_seed: 0 };
        let r = mle_check(&pop, &draw);
        assert!((r.ipf_free_cell.unwrap() - 30.0).abs() < 1e-9);
        assert!((r.mle_free_cell.unwrap() - 30.0).abs() < 1e-9);
    }

    #[test]
    fn worked_pair_agrees() {
        let pop = t(&[&[500.0, 700.0], &[100.0, 700.0]]);
        let sample = t(&[&[500.0, 500.0], &[100.0, 900.0]]);
        let draw = SampleDraw { sample, population: pop.clone(), size: 2000, rng_seed: 0 };
        let r = mle_check(&pop, &draw);
        assert!(r.discrepancy.unwrap() <= 1e-5);
        assert!((r.mle_free_cell.unwrap() - 534.4645782164).abs() < 1e-6);
    }

    #[test]
    fn profile_likelihood_peaks_at_bisection_result() {
        let pop = margins(&t(&[&[500.0, 700.0], &[100.0, 700.0]]));
        let sample = t(&[&[25.0, 22.0], &[4.0, 49.0]]);
        let x = profile_mle_free_cell(&sample, &pop).unwrap();
        let at = profile_log_likelihood(&sample, &pop, x);
        for dx in [-5.0, -0.5, 0.5, 5.0] {
            assert!(profile_log_likelihood(&sample, &pop, x + dx) < at);
        }
    }

    #[test]
    fn zero_sample_cells_are_reported() {
        let pop = t(&[&[500.0, 500.0], &[100.0, 900.0]]);
        let draw = SampleDraw { sample: t(&[&[0.0, 5.0], &[1.0, 4.0]]), population: pop.clone(), size: 10, rng_seed: 0 };
        let r = mle_check(&pop, &draw);
        assert!(r.issue.unwrap().contains("zero"));
        assert!(r.discrepancy.is_none());
    }

    #[test]
    fn experiment_csv_layout() {
        let pop = t(&[&[500.0, 500.0], &[100.0, 900.0]]);
        let rows = mle_experiment(&pop, 200, 7, 3).unwrap();
        assert_eq!(rows.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![7, 8, 9]);
        let mut buf = Vec::new();
        write_experiment_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "seed,cell0,cell1,cell2,cell3,ipf_free_cell,mle_free_cell,discrepancy,issue"
        );
        assert_eq!(lines.count(), 3);
    }
}
