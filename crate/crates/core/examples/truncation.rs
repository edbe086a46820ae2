use std::error::Error;

use welschinger::engine::truncation_bound;
use welschinger::fixtures;

pub fn run_example() -> Result<Vec<(String, Option<u64>)>, Box<dyn Error>> {
    let models = fixtures::models();
    let mut out = Vec::new();
    for ex in [fixtures::EXAMPLE1, fixtures::EXAMPLE2] {
        let (x, s) = models.surgery_target(ex.y)?;
        let d = x.surface.parse_class(ex.d)?;
        out.push((x.id().to_string(), truncation_bound(&x.surface, &d, s, 1, 0)?));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    for (id, k) in run_example()? {
        println!("{id}: k <= {k:?}");
    }
    Ok(())
}
