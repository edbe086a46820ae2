// The base table of the second example, recovered from the first by wall-crossing.

use std::error::Error;

use num_bigint::BigInt;
use welschinger::engine::{pullback_class, solve_correction, wall_cross};
use welschinger::fixtures;
use welschinger::store::InvariantKey;

pub fn run_example() -> Result<Vec<String>, Box<dyn Error>> {
    let models = fixtures::models();
    let x1 = fixtures::EXAMPLE1.table();
    let x2 = fixtures::EXAMPLE2.table();
    let lattice = models.get("X1")?.lattice();
    let mut lines = Vec::new();
    for class in fixtures::EXAMPLE1.x_classes {
        let d = welschinger::HClass::parse(class, lattice)?;
        let key = |r: u32| InvariantKey::absolute("X1", d.clone(), vec!["RP2".into()], vec![r], "0");
        let pulled = pullback_class(&d)?;
        // consecutive rows of the first table differ by 2 W' on the blown-up surface
        for (upper, lower, target_r) in [(5, 3, 3), (3, 1, 1)] {
            let hi = x1.get(&key(upper)).ok_or("missing X1 row")?;
            let lo = x1.get(&key(lower)).ok_or("missing X1 row")?;
            let correction = solve_correction(hi, lo)?;
            assert_eq!(&wall_cross(lo, &correction), hi);
            let k2 = InvariantKey::absolute("X2", pulled.clone(), vec!["K".into()], vec![target_r], "0");
            let shipped = x2.get(&k2).cloned().unwrap_or_else(|| BigInt::from(0));
            if shipped != correction {
                return Err(format!("{k2}: derived {correction}, shipped {shipped}").into());
            }
            lines.push(format!("{pulled} r0={target_r}: ({hi} - {lo}) / 2 = {correction}"));
        }
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
