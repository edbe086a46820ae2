// Invert the correspondence to get relative values along the vanishing class, then unscrew.
// The result agrees with the genus-decreasing relation.

use std::error::Error;

use welschinger::engine::{derive_relative_table, genus_decreasing, unscrew_relation, Degeneration, Incidence, Mode};
use welschinger::fixtures;

pub fn run_example() -> Result<Vec<String>, Box<dyn Error>> {
    let models = fixtures::models();
    let mut lines = Vec::new();
    for ex in [fixtures::EXAMPLE1, fixtures::EXAMPLE2] {
        let table = ex.table();
        let y = models.get(ex.y)?;
        let (x, s) = models.surgery_target(ex.y)?;
        let d = y.surface.parse_class(ex.d)?;
        let degen = Degeneration::new(&x.surface, &x.surface, s.clone());
        for &(r0, _) in ex.expected {
            let reduced = Incidence::new(vec![ex.components[0].into()], vec![r0], "0");
            let relative = derive_relative_table(&table, &degen, &d, &reduced, Mode::Strict)?;
            let unscrewed = unscrew_relation(&relative, &x.surface, &d, s, &reduced, Mode::Strict)?;
            let direct = genus_decreasing(&table, y, x, &d, s, &ex.incidence(r0), Mode::Strict)?;
            if unscrewed.value != direct.value {
                return Err(format!("example {} r0={r0}: {:?} != {:?}", ex.number, unscrewed.value, direct.value).into());
            }
            lines.push(format!("example {} r0={r0}: {}", ex.number, direct.require_value()?));
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
