// Half-steps of iterative proportional fitting.
// $ cargo run --example ipf_trajectory

use contab::ipf::{ipf_fit, IpfConfig};
use contab::tables::margins;
use contab::ContingencyTable;

fn main() -> contab::Result<()> {
    let seed = ContingencyTable::from_rows(&[[500.0, 500.0], [100.0, 900.0]])?;
    let targets = margins(&ContingencyTable::from_rows(&[[500.0, 700.0], [100.0, 700.0]])?);
    let cfg = IpfConfig { record_trajectory: true, ..IpfConfig::default() };
    let fit = ipf_fit(&seed, &targets, &cfg)?;

    for (k, step) in fit.trajectory.iter().enumerate() {
        let r = step.after_rows.cells();
        let c = step.after_cols.cells();
        println!(
            "{:>2}  rows [{:8.3} {:8.3} {:8.3} {:8.3}]  cols [{:8.3} {:8.3} {:8.3} {:8.3}]  residual {:.2e}",
            k + 1, r[0], r[1], r[2], r[3], c[0], c[1], c[2], c[3], step.residual
        );
    }
    println!("rounded: {:?}", fit.table.rounded());
    Ok(())
}
