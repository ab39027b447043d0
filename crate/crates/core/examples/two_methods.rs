// Same seed, same targets, two methods.
// $ cargo run --example two_methods

use contab::indicators::{liu_lu, odds_ratio};
use contab::ipf::{ipf_fit, IpfConfig};
use contab::nm::nm_fit;
use contab::tables::margins;
use contab::ContingencyTable;

fn main() -> contab::Result<()> {
    let seed = ContingencyTable::from_rows(&[[500.0, 500.0], [100.0, 900.0]])?;
    let targets = margins(&ContingencyTable::from_rows(&[[500.0, 700.0], [100.0, 700.0]])?);

    let nm = nm_fit(&seed, &targets)?;
    let ipf = ipf_fit(&seed, &targets, &IpfConfig::default())?;

    println!("seed\n{seed}  OR {:.4}  LL {:.4}\n", odds_ratio(&seed)?, liu_lu(&seed)?.value);
    println!("nm\n{}  OR {:.4}  LL {:.4}\n", nm.table, odds_ratio(&nm.table)?, liu_lu(&nm.table)?.value);
    println!(
        "ipf ({} iterations, residual {:.1e})\n{}  OR {:.4}  LL {:.4}",
        ipf.iterations,
        ipf.margin_residual,
        ipf.table,
        odds_ratio(&ipf.table)?,
        liu_lu(&ipf.table)?.value
    );
    // nm keeps LL = 0.6667 and moves OR to 6.8824; ipf keeps OR = 9 and moves LL to 0.7269
    Ok(())
}
