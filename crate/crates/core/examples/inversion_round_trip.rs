// Relative values -> absolute values -> relative values, on a random sequence.

use std::error::Error;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use welschinger::engine::{correspond_sequence, invert_sequence};

pub fn run_example() -> Result<usize, Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for h in 0..=5 {
        let rel: Vec<BigInt> = (0..20).map(|_| BigInt::from(rng.gen_range(-1000i64..=1000))).collect();
        let abs = correspond_sequence(h, &rel);
        if invert_sequence(h, &abs) != rel {
            return Err(format!("round trip failed for h={h}").into());
        }
        checked += rel.len();
    }
    Ok(checked)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    println!("{} values round-tripped", run_example()?);
    Ok(())
}
