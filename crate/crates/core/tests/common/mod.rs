#![allow(dead_code)]

use contab::indicators::liu_lu_generalized;
use contab::{ContingencyTable, MarginTargets};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn t(rows: &[&[f64]]) -> ContingencyTable {
    ContingencyTable::from_rows(rows).unwrap()
}

pub fn worked_source() -> ContingencyTable {
    t(&[&[500.0, 500.0], &[100.0, 900.0]])
}

pub fn worked_target() -> ContingencyTable {
    t(&[&[500.0, 700.0], &[100.0, 700.0]])
}

/// Integer table with every cell in `1..=hi`.
pub fn positive_table(rng: &mut ChaCha8Rng, rows: usize, cols: usize, hi: u32) -> ContingencyTable {
    let cells = (0..rows * cols).map(|_| rng.random_range(1..=hi) as f64).collect();
    ContingencyTable::new(rows, cols, cells).unwrap()
}

/// Integer table with a weighted diagonal band, so every aggregation cut
/// tends to show positive association; redrawn until the LL matrix exists.
pub fn sorted_table(rng: &mut ChaCha8Rng, n: usize) -> ContingencyTable {
    loop {
        let mut cells = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let base = rng.random_range(0..=30) as f64;
                let bonus = if r == c { rng.random_range(20..=120) as f64 } else { 0.0 };
                cells.push(base + bonus);
            }
        }
        let Ok(table) = ContingencyTable::new(n, n, cells) else { continue };
        if liu_lu_generalized(&table).is_ok() {
            return table;
        }
    }
}

/// Exact cell-wise relative comparison scale.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn targets_of(rows: &[f64], cols: &[f64]) -> MarginTargets {
    MarginTargets::new(rows.to_vec(), cols.to_vec()).unwrap()
}
