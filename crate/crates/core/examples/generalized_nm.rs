// NM on a 3x3 table: one 2x2 problem per aggregation cut.
// $ cargo run --example generalized_nm

use contab::indicators::liu_lu_generalized;
use contab::nm::{nm_fit, nm_subproblems};
use contab::tables::{margins, read_table};
use contab::{ContingencyTable, MarginTargets};

fn main() -> contab::Result<()> {
    let source = read_table(concat!(env!("CARGO_MANIFEST_DIR"), "/data/three_way.csv"))?;
    let later = read_table(concat!(env!("CARGO_MANIFEST_DIR"), "/data/three_way_later.csv"))?;
    let targets = margins(&later);

    for s in nm_subproblems(&source, &targets)? {
        println!(
            "cut ({},{})  LL {:.4}  int(R) {}  min {}  tail {:.3}",
            s.cut.i, s.cut.j, s.source_ll.value, s.target_expected_hh, s.target_min_margin, s.tail_sum
        );
    }
    let out = nm_fit(&source, &targets)?;
    println!("\n{}", out.table);
    println!("LL before {:?}", liu_lu_generalized(&source)?.values());
    println!("LL after  {:?}", liu_lu_generalized(&out.table)?.values());

    // margins that cannot carry this much sorting
    let sorted = ContingencyTable::from_rows(&[[90.0, 5.0, 5.0], [5.0, 90.0, 5.0], [5.0, 5.0, 90.0]])?;
    let skewed = MarginTargets::new(vec![100.0, 1.0, 199.0], vec![199.0, 1.0, 100.0])?;
    match nm_fit(&sorted, &skewed) {
        Ok(t) => println!("\nunexpected {}", t.table),
        Err(e) => println!("\nerror: {e}"),
    }
    Ok(())
}
