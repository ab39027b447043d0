// Availability / preference / interaction, and the preference-only path.
// $ cargo run --example decomposition

use contab::decompose::{cumulative_preference_path, decompose, Method, Outcome};
use contab::tables::read_table;
use contab::ContingencyTable;

fn main() -> contab::Result<()> {
    let t0 = ContingencyTable::from_rows(&[[500.0, 500.0], [100.0, 900.0]])?;
    let t1 = ContingencyTable::from_rows(&[[500.0, 700.0], [100.0, 700.0]])?;
    for method in [Method::Nm, Method::ipf()] {
        let d = decompose(&t0, &t1, &Outcome::Heterogamy, &method)?;
        println!(
            "{:<3}  total {:+.5}  availability {:+.5}  preference {:+.5}  interaction {:+.5}",
            method.name(), d.total_change, d.availability_effect, d.preference_effect, d.interaction_effect
        );
    }

    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/");
    let tables = ["three_way.csv", "three_way_later.csv", "three_way_latest.csv"]
        .iter()
        .map(|f| read_table(format!("{dir}{f}")))
        .collect::<contab::Result<Vec<_>>>()?;
    for method in [Method::Nm, Method::ipf()] {
        let path = cumulative_preference_path(&tables, 0, &Outcome::Heterogamy, &method)?;
        println!("{} path {:?}", method.name(), path);
    }

    let d = decompose(&tables[0], &tables[1], &Outcome::Homogamy, &Method::Nm)?;
    println!("\n{}", d.to_json());
    Ok(())
}
