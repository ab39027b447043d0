// IPF on a sample versus the likelihood maximizer, over seeded draws.
// $ cargo run --example mle_simulation

use contab::sim::{draw_sample, mle_check, mle_experiment};
use contab::ContingencyTable;

fn main() -> contab::Result<()> {
    let population = ContingencyTable::from_rows(&[[500.0, 700.0], [100.0, 700.0]])?;

    let one = draw_sample(&population, 100, 42)?;
    println!("seed 42 sample: {:?}", one.sample.to_rows());
    println!("{:?}\n", mle_check(&population, &one));

    let rows = mle_experiment(&population, 500, 42, 200)?;
    let worst = rows.iter().filter_map(|r| r.report.discrepancy).fold(0.0, f64::max);
    let issues = rows.iter().filter(|r| r.report.issue.is_some()).count();
    println!("{} draws, worst |ipf - mle| {worst:.2e}, {issues} skipped", rows.len());
    Ok(())
}
