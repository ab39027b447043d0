// $ cargo run --example csv_roundtrip

use contab::tables::{parse_table, read_table, write_table, CsvOptions};

fn main() -> contab::Result<()> {
    let t = read_table(concat!(env!("CARGO_MANIFEST_DIR"), "/data/worked_source.csv"))?;
    println!("rows {:?}  cols {:?}", t.row_labels(), t.col_labels());

    let mut buf = Vec::new();
    write_table(&t, &mut buf, CsvOptions::default())?;
    print!("{}", String::from_utf8_lossy(&buf));
    assert_eq!(parse_table(buf.as_slice())?, t);

    match parse_table("1,2\n3,-4\n".as_bytes()) {
        Ok(_) => unreachable!(),
        Err(e) => println!("{e}"),
    }
    Ok(())
}
