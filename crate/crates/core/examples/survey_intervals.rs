// $ cargo run --example survey_intervals

use contab::survey::{agresti_coull, agresti_coull_with, estimate_groups, VarianceBasis};

fn main() -> contab::Result<()> {
    let e = agresti_coull(10, 100, 0.05)?;
    println!("10/100: {:.6} +/- {:.6}  [{:.4}, {:.4}]", e.estimate, e.half_width, e.lower, e.upper);
    let raw = agresti_coull_with(10, 100, 0.05, VarianceBasis::Raw)?;
    println!("raw-variance half-width {:.6}", raw.half_width);

    let groups = [("1980s", 42, 600), ("1990s", 61, 640), ("2000s", 118, 700), ("2010s", 131, 690), ("typo", 9, 8)];
    for g in estimate_groups(groups, 0.05, VarianceBasis::Adjusted) {
        match g.result {
            Ok(e) => println!(
                "{:<6} {:.4} [{:.4}, {:.4}]  disjoint from previous: {:?}",
                g.label, e.estimate, e.lower, e.upper, g.disjoint_from_previous
            ),
            Err(msg) => println!("{:<6} {msg}", g.label),
        }
    }
    Ok(())
}
