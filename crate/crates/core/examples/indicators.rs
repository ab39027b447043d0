// $ cargo run --example indicators

use contab::decompose::share_statistics;
use contab::indicators::{kl_divergence, liu_lu, liu_lu_generalized, local_odds_ratios, odds_ratio};
use contab::tables::{margin_ratio, read_table, Orientation};
use contab::ContingencyTable;

fn main() -> contab::Result<()> {
    let z = ContingencyTable::from_rows(&[[500.0, 500.0], [100.0, 900.0]])?;
    let ll = liu_lu(&z)?;
    println!("odds-ratio {}", odds_ratio(&z)?);
    println!("LL {} = {}/{}  (int(R) = {})", ll.value, ll.numerator, ll.denominator, ll.expected_hh);
    println!("{:?}", share_statistics(&z)?);

    let indep = ContingencyTable::from_rows(&[[10.0, 20.0], [30.0, 60.0]])?;
    println!("independence: OR {}  LL {}", odds_ratio(&indep)?, liu_lu(&indep)?.value);

    let t = read_table(concat!(env!("CARGO_MANIFEST_DIR"), "/data/three_way.csv"))?;
    let m = liu_lu_generalized(&t)?;
    println!("\nLL matrix {}x{}: {:?}", m.rows, m.cols, m.values());
    println!("local odds-ratios {:?}", local_odds_ratios(&t));
    println!("tertiary rows/cols {:.4}", margin_ratio(&t, &[2], &[2], Orientation::RowsOverCols)?);

    let later = read_table(concat!(env!("CARGO_MANIFEST_DIR"), "/data/three_way_later.csv"))?;
    println!("KL(later || earlier) {:.6}", kl_divergence(&later, &t, true)?);

    // a cut with negative association has no LL value
    let anti = ContingencyTable::from_rows(&[[1.0, 1.0, 5.0], [1.0, 5.0, 1.0], [5.0, 1.0, 1.0]])?;
    if let Err(e) = liu_lu_generalized(&anti) {
        println!("{e}");
    }
    Ok(())
}
