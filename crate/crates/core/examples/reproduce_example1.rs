// Genus-one invariants of the cubic with real part RP2 + S2, from genus-zero invariants of
// the plane blown up at three conjugate pairs.

use std::error::Error;

use welschinger::fixtures;

pub fn run_example() -> Result<Vec<String>, Box<dyn Error>> {
    let rep = fixtures::EXAMPLE1.reproduce(&fixtures::models())?;
    let mut lines = Vec::new();
    for (r0, res) in &rep.rows {
        let value = res.require_value()?;
        let terms: Vec<String> = res.terms.iter().map(|t| format!("{} * W({})", t.coefficient, t.key.d)).collect();
        lines.push(format!("r0={r0}: {} = {value}", terms.join(" + ")));
    }
    for w in &rep.warnings {
        lines.push(format!("warning: {w}"));
    }
    if !rep.matches() {
        return Err("values differ from 36, 12, -4".into());
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
