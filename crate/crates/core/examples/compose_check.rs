// Unscrewing after the inverted correspondence has coefficients (-1)^(i-1) i^2.

use std::error::Error;

use welschinger::engine::compose_check;

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let report = compose_check(40)?;
    if let Some(i) = report.first_bad {
        return Err(format!("mismatch at {i}").into());
    }
    Ok(report.series.truncated(8).to_string())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    println!("{}", run_example()?);
    Ok(())
}
