use std::error::Error;

use welschinger::fixtures;
use welschinger::store::{load_table, merge, save_table};

pub fn run_example() -> Result<usize, Box<dyn Error>> {
    let both = merge(&fixtures::EXAMPLE1.table(), &fixtures::EXAMPLE2.table())?;
    let path = std::env::temp_dir().join(format!("welschinger-example-{}.wtab", std::process::id()));
    save_table(&both, &path)?;
    let back = load_table(&path)?;
    let text = std::fs::read_to_string(&path)?;
    std::fs::remove_file(&path)?;
    if back.to_canonical_string() != text {
        return Err("save/load is not the identity".into());
    }
    Ok(back.len())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    println!("{} records round-tripped", run_example()?);
    Ok(())
}
