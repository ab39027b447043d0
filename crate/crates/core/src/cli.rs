//! Command-line front end. The `contab` binary parses [`Cli`] and calls
//! [`run`]; data goes to the writer passed in, errors come back to the caller.

use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::decompose::{cumulative_preference_path, decompose, share_statistics, Method, Outcome};
use crate::error::Error;
use crate::indicators::{liu_lu_generalized, local_odds_ratios, odds_ratio, LLMatrix};
use crate::ipf::{ipf_fit, IpfConfig, Preserved, TransformResult};
use crate::nm::nm_fit;
use crate::sim::{draw_sample, enumerate_tables, mle_experiment, write_experiment_csv};
use crate::survey::{agresti_coull_with, estimate_groups, VarianceBasis};
use crate::tables::{
    format_value, margin_ratio, margins, read_table, write_table, ContingencyTable, CsvOptions,
    MarginTargets, Orientation,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "contab", version, about = "Contingency-table transformations (IPF and NM), decompositions and share estimates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Move a table onto new margins with IPF or NM.
    Transform(TransformArgs),
    /// Odds-ratio, Liu–Lu values, shares and margin ratios of a table.
    Indicators(IndicatorsArgs),
    /// Availability / preference / interaction decomposition of outcome changes.
    Decompose(DecomposeArgs),
    /// Agresti–Coull share estimates with confidence intervals.
    Survey(SurveyArgs),
    /// Sampling and enumeration experiments.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Ipf,
    Nm,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutcomeArg {
    Heterogamy,
    Hypergamy,
    Hypogamy,
    Homogamy,
}

impl From<OutcomeArg> for Outcome {
    fn from(o: OutcomeArg) -> Self {
        match o {
            OutcomeArg::Heterogamy => Outcome::Heterogamy,
            OutcomeArg::Hypergamy => Outcome::Hypergamy,
            OutcomeArg::Hypogamy => Outcome::Hypogamy,
            OutcomeArg::Homogamy => Outcome::Homogamy,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Significant digits for table cells.
    #[arg(long, default_value_t = 12)]
    pub precision: usize,
    /// Print table cells rounded to integers.
    #[arg(long)]
    pub round: bool,
}

impl OutputArgs {
    fn csv(&self) -> CsvOptions {
        CsvOptions {
            precision: self.precision,
            round: self.round,
        }
    }
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Table to transform (CSV).
    pub seed: PathBuf,
    /// Table whose margins are the targets.
    #[arg(long, conflicts_with_all = ["rows", "cols"])]
    pub targets: Option<PathBuf>,
    /// Target row totals, comma separated.
    #[arg(long, value_delimiter = ',', requires = "cols")]
    pub rows: Option<Vec<f64>>,
    /// Target column totals, comma separated.
    #[arg(long, value_delimiter = ',', requires = "rows")]
    pub cols: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = MethodArg::Ipf)]
    pub method: MethodArg,
    #[arg(long, default_value_t = IpfConfig::default().tolerance)]
    pub tol: f64,
    #[arg(long, default_value_t = IpfConfig::default().max_iterations)]
    pub max_iter: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct IndicatorsArgs {
    pub table: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Two or more same-shape tables in time order.
    #[arg(required = true, num_args = 2..)]
    pub tables: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = MethodArg::Nm)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = OutcomeArg::Heterogamy)]
    pub outcome: OutcomeArg,
    /// Anchor of the cumulative preference path (0-based).
    #[arg(long, default_value_t = 0)]
    pub reference: usize,
    #[arg(long, default_value_t = IpfConfig::default().tolerance)]
    pub tol: f64,
    #[arg(long, default_value_t = IpfConfig::default().max_iterations)]
    pub max_iter: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    #[arg(long, requires = "n", conflicts_with = "counts")]
    pub x: Option<u64>,
    #[arg(long, requires = "x")]
    pub n: Option<u64>,
    /// CSV of `label,x,n` rows (header optional).
    #[arg(long)]
    pub counts: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Use the raw share x/n in the interval width.
    #[arg(long)]
    pub raw_variance: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(subcommand)]
    pub mode: SimulateMode,
}

#[derive(Debug, Subcommand)]
pub enum SimulateMode {
    /// Draw one multinomial sample from a population table.
    Sample {
        population: PathBuf,
        #[arg(long)]
        size: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// IPF versus likelihood maximizer over seeded draws (draw k uses seed + k).
    Mle {
        population: PathBuf,
        #[arg(long)]
        size: u64,
        #[arg(long, default_value_t = 200)]
        draws: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// All integer 2x2 tables with the given margins, in natural order.
    Enumerate {
        #[arg(long, value_delimiter = ',', required = true)]
        rows: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        cols: Vec<f64>,
        /// Keep only tables with H,H >= int(R).
        #[arg(long)]
        positive: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Transform(a) => cmd_transform(a, out),
        Command::Indicators(a) => cmd_indicators(a, out),
        Command::Decompose(a) => cmd_decompose(a, out),
        Command::Survey(a) => cmd_survey(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn rounded_table(t: &ContingencyTable, opts: &OutputArgs) -> ContingencyTable {
    if !opts.round {
        return t.clone();
    }
    let cells: Vec<f64> = t.cells().iter().map(|v| v.round()).collect();
    // rounding cannot zero the total of a table it was fitted to in practice;
    // fall back to the unrounded table if it does
    ContingencyTable::new(t.rows(), t.cols(), cells)
        .and_then(|r| r.with_labels(t.row_labels().map(<[_]>::to_vec), t.col_labels().map(<[_]>::to_vec)))
        .unwrap_or_else(|_| t.clone())
}

fn joined(values: impl IntoIterator<Item = Option<f64>>) -> String {
    values
        .into_iter()
        .map(|v| v.map_or_else(|| "NA".to_string(), |v| format_value(v, 12)))
        .collect::<Vec<_>>()
        .join(";")
}

fn ll_joined(m: &LLMatrix) -> String {
    joined(m.values().into_iter().map(Some))
}

fn cmd_transform(a: TransformArgs, out: &mut dyn Write) -> CliResult<()> {
    let seed = read_table(&a.seed)?;
    let targets = match (&a.targets, &a.rows, &a.cols) {
        (Some(path), _, _) => margins(&read_table(path)?),
        (None, Some(r), Some(c)) => MarginTargets::new(r.clone(), c.clone())?,
        _ => {
            return Err(CliError::Usage(
                "give targets as --targets TABLE or as --rows and --cols".into(),
            ))
        }
    };
    let (name, result): (&str, TransformResult) = match a.method {
        MethodArg::Ipf => {
            let cfg = IpfConfig {
                max_iterations: a.max_iter,
                tolerance: a.tol,
                record_trajectory: false,
            };
            ("ipf", ipf_fit(&seed, &targets, &cfg)?)
        }
        MethodArg::Nm => ("nm", nm_fit(&seed, &targets)?),
        MethodArg::Both => {
            return Err(CliError::Usage("transform takes --method ipf or nm".into()))
        }
    };

    match a.output.format {
        Format::Json => {
            let mut r = result;
            r.table = rounded_table(&r.table, &a.output);
            write_json(out, &json!({ "method": name, "result": r }))
        }
        Format::Csv => {
            write_table(&result.table, &mut *out, a.output.csv())?;
            writeln!(out)?;
            writeln!(out, "key,value")?;
            writeln!(out, "method,{name}")?;
            writeln!(out, "iterations,{}", result.iterations)?;
            writeln!(out, "margin_residual,{:e}", result.margin_residual)?;
            writeln!(out, "converged,{}", result.converged)?;
            match &result.preserved {
                Preserved::OddsRatios { seed, output } => {
                    writeln!(out, "odds_ratios_seed,{}", joined(seed.iter().copied()))?;
                    writeln!(out, "odds_ratios_output,{}", joined(output.iter().copied()))?;
                }
                Preserved::LiuLu { seed, output } => {
                    writeln!(out, "ll_seed,{}", ll_joined(seed))?;
                    writeln!(out, "ll_output,{}", ll_joined(output))?;
                }
            }
            Ok(())
        }
    }
}

/// Indicators that apply to `table`; failures are recorded per indicator.
pub fn indicator_report(table: &ContingencyTable) -> Vec<(String, Value)> {
    let mut report = Vec::new();
    let err = |e: Error| json!({ "error": e.to_string() });
    if table.shape() == (2, 2) {
        let v = odds_ratio(table).map_or_else(err, |v| json!(v));
        report.push(("odds_ratio".into(), v));
    } else {
        report.push(("local_odds_ratios".into(), json!(local_odds_ratios(table))));
    }
    let ll = liu_lu_generalized(table).map_or_else(err, |m| {
        let rows: Vec<Vec<f64>> = m.values().chunks(m.cols).map(<[f64]>::to_vec).collect();
        json!(rows)
    });
    report.push(("ll_matrix".into(), ll));
    let shares = share_statistics(table).map_or_else(err, |s| json!(s));
    report.push(("shares".into(), shares));
    let (n, m) = table.shape();
    let ratio = margin_ratio(table, &[n - 1], &[m - 1], Orientation::RowsOverCols)
        .map_or_else(err, |v| json!(v));
    report.push(("margin_ratio_high_rows_over_cols".into(), ratio));
    report
}

fn csv_value(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), |f| format_value(f, 12)),
        Value::Null => "NA".into(),
        Value::Array(items) => items.iter().map(csv_value).collect::<Vec<_>>().join(";"),
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("{k}={}", csv_value(v)))
            .collect::<Vec<_>>()
            .join(";"),
        other => other.to_string().trim_matches('"').to_string(),
    }
}

fn cmd_indicators(a: IndicatorsArgs, out: &mut dyn Write) -> CliResult<()> {
    let table = read_table(&a.table)?;
    let report = indicator_report(&table);
    match a.output.format {
        Format::Json => {
            let obj: serde_json::Map<String, Value> = report.into_iter().collect();
            write_json(out, &obj)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["indicator", "value"]).map_err(io::Error::from)?;
            for (k, v) in &report {
                w.write_record([k.as_str(), &csv_value(v)]).map_err(io::Error::from)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn cmd_decompose(a: DecomposeArgs, out: &mut dyn Write) -> CliResult<()> {
    let tables = a
        .tables
        .iter()
        .map(read_table)
        .collect::<crate::error::Result<Vec<_>>>()?;
    let cfg = IpfConfig {
        max_iterations: a.max_iter,
        tolerance: a.tol,
        record_trajectory: false,
    };
    let methods = match a.method {
        MethodArg::Ipf => vec![Method::Ipf(cfg)],
        MethodArg::Nm => vec![Method::Nm],
        MethodArg::Both => vec![Method::Ipf(cfg), Method::Nm],
    };
    let outcome: Outcome = a.outcome.into();

    let mut blocks = Vec::new();
    for method in &methods {
        let pairs = tables
            .windows(2)
            .map(|w| decompose(&w[0], &w[1], &outcome, method))
            .collect::<crate::error::Result<Vec<_>>>()?;
        let path = (tables.len() >= 3)
            .then(|| cumulative_preference_path(&tables, a.reference, &outcome, method))
            .transpose()?;
        blocks.push((method.name(), pairs, path));
    }

    match a.output.format {
        Format::Json => {
            let v: Vec<Value> = blocks
                .iter()
                .map(|(name, pairs, path)| {
                    json!({ "method": name, "decompositions": pairs, "cumulative_preference_path": path })
                })
                .collect();
            write_json(out, &v)
        }
        Format::Csv => {
            writeln!(out, "method,period_from,period_to,total_change,availability_effect,preference_effect,interaction_effect")?;
            for (name, pairs, _) in &blocks {
                for (k, d) in pairs.iter().enumerate() {
                    writeln!(
                        out,
                        "{name},{},{},{},{},{},{}",
                        k,
                        k + 1,
                        format_value(d.total_change, a.output.precision),
                        format_value(d.availability_effect, a.output.precision),
                        format_value(d.preference_effect, a.output.precision),
                        format_value(d.interaction_effect, a.output.precision),
                    )?;
                }
            }
            for (name, _, path) in &blocks {
                if let Some(path) = path {
                    writeln!(out)?;
                    writeln!(out, "method,period,cumulative_preference_path")?;
                    for (k, v) in path.iter().enumerate() {
                        writeln!(out, "{name},{k},{}", format_value(*v, a.output.precision))?;
                    }
                }
            }
            Ok(())
        }
    }
}

fn read_counts(path: &PathBuf) -> CliResult<Vec<(String, u64, u64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Parse { line: 0, column: 0, message: e.to_string() })?;
    let mut groups = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse { line: k as u64 + 1, column: 0, message: e.to_string() })?;
        let line = rec.position().map_or(k as u64 + 1, |p| p.line());
        if rec.len() != 3 {
            return Err(Error::Parse { line, column: rec.len(), message: "expected label,x,n".into() }.into());
        }
        let parse = |col: usize| rec[col].parse::<u64>();
        match (parse(1), parse(2)) {
            (Ok(x), Ok(n)) => groups.push((rec[0].to_string(), x, n)),
            // a header row
            _ if k == 0 => continue,
            (Err(_), _) => return Err(Error::Parse { line, column: 2, message: format!("`{}` is not a count", &rec[1]) }.into()),
            (_, Err(_)) => return Err(Error::Parse { line, column: 3, message: format!("`{}` is not a count", &rec[2]) }.into()),
        }
    }
    Ok(groups)
}

fn cmd_survey(a: SurveyArgs, out: &mut dyn Write) -> CliResult<()> {
    let basis = if a.raw_variance { VarianceBasis::Raw } else { VarianceBasis::Adjusted };
    let groups: Vec<(String, u64, u64)> = match (a.x, a.n, &a.counts) {
        (Some(x), Some(n), None) => {
            // single triple: fail fast on bad counts
            agresti_coull_with(x, n, a.alpha, basis)?;
            vec![("all".to_string(), x, n)]
        }
        (None, None, Some(path)) => read_counts(path)?,
        _ => return Err(CliError::Usage("give --x and --n, or --counts FILE".into())),
    };
    let estimates = estimate_groups(
        groups.iter().map(|(l, x, n)| (l.as_str(), *x, *n)),
        a.alpha,
        basis,
    );
    match a.format {
        Format::Json => write_json(out, &estimates)?,
        Format::Csv => {
            writeln!(out, "label,x,n,estimate,half_width,lower,upper,disjoint_from_previous,error")?;
            for (g, (_, x, n)) in estimates.iter().zip(&groups) {
                let disjoint = g.disjoint_from_previous.map_or_else(String::new, |d| d.to_string());
                match &g.result {
                    Ok(e) => writeln!(
                        out,
                        "{},{x},{n},{},{},{},{},{disjoint},",
                        g.label,
                        format_value(e.estimate, 12),
                        format_value(e.half_width, 12),
                        format_value(e.lower, 12),
                        format_value(e.upper, 12),
                    )?,
                    Err(msg) => writeln!(out, "{},{x},{n},,,,,,{msg}", g.label)?,
                }
            }
        }
    }
    let failed = estimates.iter().filter(|g| g.result.is_err()).count();
    if failed > 0 {
        return Err(CliError::Usage(format!("{failed} group(s) had invalid counts")));
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    match a.mode {
        SimulateMode::Sample { population, size, seed, output } => {
            let pop = read_table(&population)?;
            let draw = draw_sample(&pop, size, seed)?;
            match output.format {
                Format::Json => write_json(out, &json!({ "seed": seed, "size": size, "sample": draw.sample })),
                Format::Csv => Ok(write_table(&draw.sample, &mut *out, output.csv())?),
            }
        }
        SimulateMode::Mle { population, size, draws, seed, format } => {
            let pop = read_table(&population)?;
            let rows = mle_experiment(&pop, size, seed, draws)?;
            match format {
                Format::Json => write_json(out, &rows),
                Format::Csv => Ok(write_experiment_csv(&rows, &mut *out)?),
            }
        }
        SimulateMode::Enumerate { rows, cols, positive, format } => {
            let targets = MarginTargets::new(rows, cols)?;
            let tables = enumerate_tables(&targets, positive)?;
            match format {
                Format::Json => write_json(out, &tables),
                Format::Csv => {
                    writeln!(out, "rank,c11,c12,c21,c22")?;
                    for (k, t) in tables.iter().enumerate() {
                        let c = t.cells();
                        writeln!(out, "{k},{},{},{},{}", c[0], c[1], c[2], c[3])?;
                    }
                    Ok(())
                }
            }
        }
    }
}
