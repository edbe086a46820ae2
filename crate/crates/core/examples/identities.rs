use std::error::Error;

use welschinger::combin::{check_identities, u, v, RecurrenceTable};

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let report = check_identities(60)?;
    if !report.passed() {
        return Err(report.to_string().into());
    }
    let table = RecurrenceTable::up_to(60);
    assert!((1..=60).all(|i| &u(i) == table.u(i) && &v(i) == table.v(i)));
    Ok(report.to_string())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
