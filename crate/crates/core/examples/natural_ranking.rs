// Tables sharing 2x2 margins, ranked by the H,H cell; LL is the percentile.
// $ cargo run --example natural_ranking

use contab::indicators::liu_lu;
use contab::nm::nm_fit;
use contab::sim::{enumerate_tables, natural_rank};
use contab::{ContingencyTable, MarginTargets};

fn main() -> contab::Result<()> {
    let targets = MarginTargets::new(vec![11.0, 9.0], vec![8.0, 12.0])?;
    let k_plus = enumerate_tables(&targets, true)?;
    for (k, t) in k_plus.iter().enumerate() {
        println!("{k}: {:?}  LL {:.3}", t.to_rows(), liu_lu(t)?.value);
    }

    let source = ContingencyTable::from_rows(&[[3.0, 1.0], [1.0, 3.0]])?;
    let ll = liu_lu(&source)?.value;
    let out = nm_fit(&source, &targets)?.table;
    println!("\nsource LL {ll:.3} -> {:?}", out.to_rows());
    if out.cells().iter().all(|v| v.fract() == 0.0) {
        let implied = ll * (k_plus.len() - 1) as f64;
        println!("rank {} of {} (LL implies {implied})", natural_rank(&out, true)?, k_plus.len());
    }
    Ok(())
}
