// Every configuration of degree at most 4 against E = l1 + l2 on the quadric.

use std::error::Error;

use welschinger::engine::{classify_quadric, Classification, TangencyVector};
use welschinger::picard::{HClass, LatticeKind};

pub fn run_example() -> Result<Vec<String>, Box<dyn Error>> {
    let mut found = Vec::new();
    for p in 0..=2i64 {
        for q in 0..=2i64 {
            let d = HClass::from_i64s(LatticeKind::Quadric, &[p, q])?;
            if d.is_zero() || (p >= 2 && q == 0) || (q >= 2 && p == 0) {
                continue;
            }
            let n = (p + q) as u32;
            for split in 0..=n {
                for alpha in TangencyVector::all_of_weight(split) {
                    for beta in TangencyVector::all_of_weight(n - split) {
                        for off_e in 0..=1 {
                            let c = classify_quadric(&d, &alpha, &beta, off_e)?;
                            if c != Classification::Empty {
                                found.push(format!("d={d} alpha={alpha} beta={beta} off={off_e}: {c}"));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(found)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
