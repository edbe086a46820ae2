// Degree-two surface with real part RP2#RP2 + S2.

use std::error::Error;

use welschinger::fixtures;

pub fn run_example() -> Result<Vec<String>, Box<dyn Error>> {
    let rep = fixtures::EXAMPLE2.reproduce(&fixtures::models())?;
    let mut lines = Vec::new();
    for (r0, res) in &rep.rows {
        lines.push(format!("r0={r0}: W = {} (k <= {:?})", res.require_value()?, res.bound));
    }
    if !rep.matches() {
        return Err("values differ from 12, 8".into());
    }
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
