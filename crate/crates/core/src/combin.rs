//! Exact binomials and the `u_i`, `v_i` sequences behind the `(-1)^(i-1) i^2` coefficients.
//!
//! ```text
//! u_i = sum_{k + 2l = i, k >= 1} (-1)^l k 2^(k-1) C(k+l, k)
//! v_i = sum_{k + 2l = i, k >= 0} (-1)^l 2^k C(k+l, k)
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombinError {
    #[error("binomial with negative lower index {0}")]
    NegativeK(i64),
    #[error("identity window must be at least 3, got {0}")]
    WindowTooSmall(u64),
}

/// `C(n, k)` with `C(n, k) = 0` whenever `n < 0` or `n < k`.
pub fn binom_conv(n: i64, k: i64) -> Result<BigInt, CombinError> {
    if k < 0 {
        return Err(CombinError::NegativeK(k));
    }
    if n < 0 || n < k {
        return Ok(BigInt::zero());
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 1..=k {
        acc *= n - k + j;
        acc /= j;
    }
    Ok(acc)
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

fn sign(l: u64) -> BigInt {
    if l % 2 == 0 {
        BigInt::one()
    } else {
        BigInt::from(-1)
    }
}

fn binom_u(n: u64, k: u64) -> BigInt {
    binom_conv(n as i64, k as i64).expect("k is non-negative")
}

/// Direct summation of `u_i`, `i >= 1`.
pub fn u(i: u64) -> BigInt {
    assert!(i >= 1, "u_i is defined for i >= 1");
    let mut acc = BigInt::zero();
    for l in 0..=(i - 1) / 2 {
        let k = i - 2 * l;
        acc += sign(l) * k * pow2(k - 1) * binom_u(k + l, k);
    }
    acc
}

/// Direct summation of `v_i`, `i >= 1`.
pub fn v(i: u64) -> BigInt {
    assert!(i >= 1, "v_i is defined for i >= 1");
    let mut acc = BigInt::zero();
    for l in 0..=i / 2 {
        let k = i - 2 * l;
        acc += sign(l) * pow2(k) * binom_u(k + l, k);
    }
    acc
}

/// `(-1)^(i-1) i^2`.
pub fn gdf_coefficient(i: u64) -> BigInt {
    let sq = BigInt::from(i) * i;
    if i % 2 == 1 {
        sq
    } else {
        -sq
    }
}

/// `u` and `v` tabulated by Pascal's rule instead of direct summation:
/// `v_{i} = 2 v_{i-1} - v_{i-2}` and `u_{i+2} = 2 u_{i+1} - u_i + v_{i+1}`,
/// seeded with `u_1 = 1, u_2 = 4, v_1 = 2, v_2 = 3`.
#[derive(Clone, Debug)]
pub struct RecurrenceTable {
    u: Vec<BigInt>,
    v: Vec<BigInt>,
}

impl RecurrenceTable {
    pub fn up_to(max: u64) -> Self {
        let max = max.max(2) as usize;
        // index 0 unused
        let mut v = vec![BigInt::zero(), BigInt::from(2), BigInt::from(3)];
        let mut u = vec![BigInt::zero(), BigInt::from(1), BigInt::from(4)];
        for i in 3..=max {
            let next_v = 2 * &v[i - 1] - &v[i - 2];
            v.push(next_v);
            let next_u = 2 * &u[i - 1] - &u[i - 2] + &v[i - 1];
            u.push(next_u);
        }
        RecurrenceTable { u, v }
    }

    pub fn max(&self) -> u64 {
        (self.u.len() - 1) as u64
    }

    pub fn u(&self, i: u64) -> &BigInt {
        &self.u[i as usize]
    }

    pub fn v(&self, i: u64) -> &BigInt {
        &self.v[i as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityOutcome {
    pub name: &'static str,
    pub instances: u64,
    /// Smallest index at which the identity fails, indexed by the largest `u`/`v`
    /// subscript the instance touches.
    pub first_failure: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub max: u64,
    pub seeds: bool,
    pub identities: Vec<IdentityOutcome>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.seeds && self.identities.iter().all(|o| o.first_failure.is_none())
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} seeds u1=1 u2=4", if self.seeds { "PASS" } else { "FAIL" })?;
        for o in &self.identities {
            match o.first_failure {
                None => writeln!(f, "PASS {} ({} instances up to {})", o.name, o.instances, self.max)?,
                Some(i) => writeln!(f, "FAIL {} first failure at {}", o.name, i)?,
            }
        }
        Ok(())
    }
}

/// Verifies the identities up to `max` on the directly summed sequences.
pub fn check_identities(max: u64) -> Result<IdentityReport, CombinError> {
    if max < 3 {
        return Err(CombinError::WindowTooSmall(max));
    }
    let us: Vec<BigInt> = (1..=max).map(u).collect();
    let vs: Vec<BigInt> = (1..=max).map(v).collect();
    check_identities_with(
        max,
        |i| us[(i - 1) as usize].clone(),
        |i| vs[(i - 1) as usize].clone(),
    )
}

/// Same checks with caller-supplied sequences, so a detector can be fed a perturbed `u`.
pub fn check_identities_with(
    max: u64,
    u: impl Fn(u64) -> BigInt,
    v: impl Fn(u64) -> BigInt,
) -> Result<IdentityReport, CombinError> {
    if max < 3 {
        return Err(CombinError::WindowTooSmall(max));
    }
    let seeds = u(1) == BigInt::from(1) && u(2) == BigInt::from(4);
    let mut identities = Vec::new();

    let mut run = |name: &'static str, range: std::ops::RangeInclusive<u64>, holds: &dyn Fn(u64) -> bool| {
        let instances = range.clone().count() as u64;
        let first_failure = range.into_iter().find(|&n| !holds(n));
        identities.push(IdentityOutcome {
            name,
            instances,
            first_failure,
        });
    };

    run("v(n) = n + 1", 2..=max - 1, &|n| v(n) == BigInt::from(n + 1));
    run("u(n) - u(n-2) = n^2", 3..=max, &|n| u(n) - u(n - 2) == BigInt::from(n) * n);
    run("u(n) - u(n-1) = u(n-1) - u(n-2) + v(n-1)", 3..=max, &|n| {
        u(n) - u(n - 1) == u(n - 1) - u(n - 2) + v(n - 1)
    });
    run("coefficient(n) = (-1)^(n-1) (u(n) - u(n-2))", 3..=max, &|n| {
        let diff = u(n) - u(n - 2);
        let signed = if n % 2 == 1 { diff } else { -diff };
        gdf_coefficient(n) == signed
    });

    Ok(IdentityReport { max, seeds, identities })
}
