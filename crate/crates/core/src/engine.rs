//! Evaluation of the genus-decreasing, unscrewing and correspondence relations over an
//! invariant table, their symbolic composition, genus truncation, and the quadric classifier.
//!
//! Every relation is a finite sum `sum_k c_k W(d - k * step)`. The upper end of `k` is the
//! largest shift whose class still satisfies `(d^2 - c1.d)/2 + 1 >= g`; no table key past
//! that shift is ever looked up.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::combin::{binom_conv, gdf_coefficient};
use crate::picard::{HClass, LatticeKind, PicardError, SurfaceModel};
use crate::realmodel::{surgery_check, validate_config, ComponentTopology, ConfigSpec, RealModelError, RealSurfaceModel};
use crate::store::{InvariantKey, InvariantLookup, InvariantTable, StoreError};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("missing table entry {0}")]
    MissingEntry(String),
    #[error("d.[E] = {0} is odd")]
    OddPairing(BigInt),
    #[error("{0} is a multiple l*l_i with l >= 2")]
    ExcludedClass(HClass),
    #[error("tangency mismatch: I(alpha) + I(beta) = {found}, d.[E] = {expected}")]
    TangencyMismatch { found: BigInt, expected: BigInt },
    #[error("the arithmetic genus never drops along {0}; the sum does not terminate")]
    Unbounded(HClass),
    #[error(transparent)]
    Picard(#[from] PicardError),
    #[error(transparent)]
    RealModel(#[from] RealModelError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

fn precondition(msg: impl Into<String>) -> EngineError {
    EngineError::PreconditionFailed(msg.into())
}

/// How missing table entries are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    /// Missing entries count as 0 and produce a warning.
    #[default]
    Lenient,
    /// Any missing entry with a non-zero coefficient makes the value undefined.
    Strict,
}

/// The `(L, r, F)` part of an invariant key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub components: Vec<String>,
    pub r: Vec<u32>,
    pub f: String,
}

impl Incidence {
    pub fn new(components: Vec<String>, r: Vec<u32>, f: impl Into<String>) -> Self {
        Incidence {
            components,
            r,
            f: f.into(),
        }
    }

    pub fn genus(&self) -> usize {
        self.components.len().saturating_sub(1)
    }

    /// Drops the last component and its point count.
    pub fn without_last(&self) -> Incidence {
        let n = self.components.len().saturating_sub(1);
        Incidence {
            components: self.components[..n].to_vec(),
            r: self.r[..n.min(self.r.len())].to_vec(),
            f: self.f.clone(),
        }
    }

    pub fn absolute_key(&self, surface: &str, d: HClass) -> InvariantKey {
        InvariantKey::absolute(surface, d, self.components.clone(), self.r.clone(), self.f.clone())
    }

    pub fn relative_key(&self, surface: &str, e: &HClass, d: HClass) -> InvariantKey {
        InvariantKey::relative(surface, e.clone(), d, self.components.clone(), self.r.clone(), self.f.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub k: u64,
    pub coefficient: BigInt,
    pub key: InvariantKey,
    /// `None` when the key is absent from the table.
    pub resolved: Option<BigInt>,
    pub source: Option<String>,
}

/// An evaluated relation with its full term breakdown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationResult {
    pub target: InvariantKey,
    /// `None` is "undefined" (strict mode with a missing entry).
    pub value: Option<BigInt>,
    pub terms: Vec<Term>,
    /// Largest shift index admitted by the genus bound.
    pub bound: Option<u64>,
    pub warnings: Vec<String>,
}

impl RelationResult {
    /// `sum coefficient * resolved`, missing terms counted as 0.
    pub fn recompute(&self) -> BigInt {
        self.terms
            .iter()
            .filter_map(|t| t.resolved.as_ref().map(|v| &t.coefficient * v))
            .sum()
    }

    pub fn require_value(&self) -> Result<&BigInt, EngineError> {
        self.value.as_ref().ok_or_else(|| {
            let missing = self
                .terms
                .iter()
                .find(|t| t.resolved.is_none() && !t.coefficient.is_zero())
                .map(|t| t.key.to_string())
                .unwrap_or_else(|| self.target.to_string());
            EngineError::MissingEntry(missing)
        })
    }

    pub fn has_missing(&self) -> bool {
        self.terms.iter().any(|t| t.resolved.is_none())
    }
}

fn evaluate(
    table: &dyn InvariantLookup,
    target: InvariantKey,
    bound: Option<u64>,
    terms: Vec<(u64, BigInt, InvariantKey)>,
    mode: Mode,
    mut warnings: Vec<String>,
) -> RelationResult {
    let mut out = Vec::with_capacity(terms.len());
    let mut undefined = false;
    for (k, coefficient, key) in terms {
        let entry = table.lookup(&key);
        if entry.is_none() {
            match mode {
                Mode::Lenient => warnings.push(format!("missing entry {key} treated as 0")),
                Mode::Strict => {
                    if !coefficient.is_zero() {
                        undefined = true;
                    }
                }
            }
        }
        out.push(Term {
            k,
            coefficient,
            key,
            resolved: entry.map(|e| e.value.clone()),
            source: entry.map(|e| e.provenance.clone()),
        });
    }
    let mut result = RelationResult {
        target,
        value: None,
        terms: out,
        bound,
        warnings,
    };
    if !undefined {
        result.value = Some(result.recompute());
    }
    result
}

/// Largest `k >= 0` with `genus(d - k * step_mult * step) >= g_target`.
///
/// `Ok(None)` means not even `k = 0` qualifies. Errors with `Unbounded` when the genus never
/// decreases along the step.
pub fn truncation_bound(
    surface: &SurfaceModel,
    d: &HClass,
    step: &HClass,
    step_mult: u64,
    g_target: i64,
) -> Result<Option<u64>, EngineError> {
    let unit = step.scale(&BigInt::from(step_mult));
    // 2 genus(k) = u^2 k^2 + (c1.u - 2 d.u) k + const
    let quad = unit.pair(&unit)?;
    let lin: BigInt = surface.c1_dot(&unit)? - 2 * d.pair(&unit)?;
    if quad.is_positive() || (quad.is_zero() && !lin.is_negative()) {
        return Err(EngineError::Unbounded(step.clone()));
    }
    let target = BigInt::from(g_target);
    let genus_at = |k: u64| -> Result<BigInt, EngineError> {
        Ok(surface.arithmetic_genus(&d.minus_multiple(k, &unit)?)?)
    };
    let mut best = None;
    let mut k = 0u64;
    let mut current = genus_at(0)?;
    loop {
        if current >= target {
            best = Some(k);
        }
        let next = genus_at(k + 1)?;
        if next < current && current < target {
            break;
        }
        current = next;
        k += 1;
    }
    Ok(best)
}

/// `(-1)^(k-1) k 2^(k-1)`: multiplicity-weighted sign of a `k`-fold contact in the unscrewing.
pub fn unscrew_coefficient(k: u64) -> BigInt {
    assert!(k >= 1);
    let c = BigInt::from(k) << (k - 1);
    if k % 2 == 1 {
        c
    } else {
        -c
    }
}

/// `C(h + 2k, k)` for `h = d.[E]/2`.
pub fn correspondence_coefficient(h: u64, k: u64) -> BigInt {
    binom_conv((h + 2 * k) as i64, k as i64).expect("non-negative k")
}

/// `(-1)^k (C(h + k, h) + C(h + k - 1, h))`, with `C(-1, 0) = 0`.
pub fn inversion_coefficient(h: u64, k: u64) -> BigInt {
    let h_i = h as i64;
    let k_i = k as i64;
    let c = binom_conv(h_i + k_i, h_i).expect("non-negative") + binom_conv(h_i + k_i - 1, h_i).expect("non-negative");
    if k % 2 == 0 {
        c
    } else {
        -c
    }
}

/// Applies the correspondence to a sequence `rel[j] = W^E(d - 2jE)`, giving `W(d - 2jE)`.
pub fn correspond_sequence(h: u64, rel: &[BigInt]) -> Vec<BigInt> {
    (0..rel.len())
        .map(|j| {
            (0..rel.len() - j)
                .map(|m| correspondence_coefficient(h + 2 * j as u64, m as u64) * &rel[j + m])
                .sum()
        })
        .collect()
}

/// Inverse of [`correspond_sequence`].
pub fn invert_sequence(h: u64, abs: &[BigInt]) -> Vec<BigInt> {
    (0..abs.len())
        .map(|j| {
            (0..abs.len() - j)
                .map(|m| inversion_coefficient(h + 2 * j as u64, m as u64) * &abs[j + m])
                .sum()
        })
        .collect()
}

/// Linear identification of classes of the relative surface with classes of the absolute one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassMap {
    /// Same coefficients, same lattice.
    Identity,
    /// `target[i] = sum_j rows[i][j] * source[j]`.
    Linear { target: LatticeKind, rows: Vec<Vec<BigInt>> },
}

impl ClassMap {
    pub fn apply(&self, c: &HClass) -> Result<HClass, PicardError> {
        match self {
            ClassMap::Identity => Ok(c.clone()),
            ClassMap::Linear { target, rows } => {
                if rows.iter().any(|r| r.len() != c.coeffs().len()) {
                    return Err(PicardError::WrongArity {
                        lattice: c.lattice(),
                        found: rows.first().map_or(0, Vec::len),
                    });
                }
                let coeffs = rows
                    .iter()
                    .map(|row| row.iter().zip(c.coeffs()).map(|(a, b)| a * b).sum())
                    .collect();
                HClass::new(*target, coeffs)
            }
        }
    }
}

/// The two sides of a degeneration: the absolute surface `X`, the relative pair `(Z, E)`.
#[derive(Clone, Debug)]
pub struct Degeneration<'a> {
    pub absolute: &'a SurfaceModel,
    pub relative: &'a SurfaceModel,
    pub e: HClass,
    pub to_absolute: ClassMap,
}

impl<'a> Degeneration<'a> {
    pub fn new(absolute: &'a SurfaceModel, relative: &'a SurfaceModel, e: HClass) -> Self {
        Degeneration {
            absolute,
            relative,
            e,
            to_absolute: ClassMap::Identity,
        }
    }

    fn half_pairing(&self, d: &HClass) -> Result<u64, EngineError> {
        let de = d.pair(&self.e)?;
        if de.is_odd() {
            return Err(EngineError::OddPairing(de));
        }
        if de.is_negative() {
            return Err(precondition(format!("d.[E] = {de} is negative")));
        }
        u64::try_from(de / 2).map_err(|_| precondition("d.[E] too large"))
    }
}

/// `W_Y(d, (r', 1)) = sum_{k>=1} (-1)^(k-1) k^2 W_X(d - k[S], r')`.
///
/// `incidence` is the `Y`-side data: chosen components ending with the surgery sphere, point
/// counts ending with 1.
pub fn genus_decreasing(
    table: &dyn InvariantLookup,
    y: &RealSurfaceModel,
    x: &RealSurfaceModel,
    d: &HClass,
    s: &HClass,
    incidence: &Incidence,
    mode: Mode,
) -> Result<RelationResult, EngineError> {
    let surgery = surgery_check(x, y, s)?;
    if !surgery.passed() {
        let failed: Vec<String> = surgery.failures().map(|c| format!("{} ({})", c.name, c.detail)).collect();
        return Err(precondition(format!("surgery check: {}", failed.join("; "))));
    }
    let g = incidence.genus();
    if incidence.components.len() < 2 || incidence.r.len() != incidence.components.len() {
        return Err(precondition("need g >= 1: at least two chosen components with matching r"));
    }
    let sphere_name = incidence.components.last().expect("non-empty");
    let sphere_is_new = y
        .component(sphere_name)
        .is_some_and(|c| c.topology == ComponentTopology::Sphere)
        && x.component(sphere_name).is_none();
    if !sphere_is_new {
        return Err(precondition(format!(
            "last chosen component `{sphere_name}` must be the sphere created by the surgery"
        )));
    }
    if incidence.r.last() != Some(&1) {
        return Err(precondition("the sphere must carry exactly one real point"));
    }
    let ds = d.pair(s)?;
    if !ds.is_zero() {
        return Err(precondition(format!("d.[S] = {ds}, must be 0")));
    }
    let cfg = ConfigSpec::with_inferred_m(y, d.clone(), incidence.components.clone(), incidence.r.clone(), incidence.f.clone())
        .ok_or_else(|| precondition("c1.d + g - 1 - sum r is not a non-negative even number"))?;
    let report = validate_config(y, &cfg, Some(s));
    if !report.passed() {
        let failed: Vec<String> = report.failures().map(|c| format!("{} ({})", c.name, c.detail)).collect();
        return Err(precondition(format!("Y configuration: {}", failed.join("; "))));
    }
    let c1d = y.surface.c1_dot(d)?;
    if c1d.clone() + g as i64 - 2 <= BigInt::zero() {
        return Err(precondition(format!("c1.d + g - 2 = {} must be positive", c1d + g as i64 - 2)));
    }

    let reduced = incidence.without_last();
    let bound = truncation_bound(&x.surface, d, s, 1, g as i64 - 1)?;
    let mut warnings = Vec::new();
    let mut terms = Vec::new();
    for k in 1..=bound.unwrap_or(0) {
        let dk = d.minus_multiple(k, s)?;
        if let Some(w) = degree_bound_warning(x, &dk, &reduced) {
            warnings.push(w);
        }
        terms.push((k, gdf_coefficient(k), reduced.absolute_key(x.id(), dk)));
    }
    let target = incidence.absolute_key(y.id(), d.clone());
    Ok(evaluate(table, target, bound, terms, mode, warnings))
}

fn degree_bound_warning(model: &RealSurfaceModel, d: &HClass, inc: &Incidence) -> Option<String> {
    let lsq: u32 = inc
        .components
        .iter()
        .map(|n| model.lsq(n, d).map(u32::from).unwrap_or(0))
        .sum();
    let c1d = model.surface.c1_dot(d).ok()?;
    let rhs = BigInt::from(inc.genus() as u64 + 1) - lsq;
    (c1d < rhs).then(|| format!("{d}: c1.d = {c1d} < g + 1 - sum l^2 = {rhs}"))
}

/// `W_Y(d, r) = sum_{k>=1} (-1)^(k-1) k 2^(k-1) W^E_Z(d - k[E], r')`.
pub fn unscrew_relation(
    table: &dyn InvariantLookup,
    z: &SurfaceModel,
    d: &HClass,
    e: &HClass,
    incidence: &Incidence,
    mode: Mode,
) -> Result<RelationResult, EngineError> {
    let e2 = e.self_intersection();
    if e2 != BigInt::from(-2) {
        return Err(precondition(format!("[E]^2 = {e2}, must be -2")));
    }
    let de = d.pair(e)?;
    if !de.is_zero() {
        return Err(precondition(format!("d.[E] = {de}, must be 0")));
    }
    let bound = truncation_bound(z, d, e, 1, incidence.genus() as i64)?;
    let mut terms = Vec::new();
    for k in 1..=bound.unwrap_or(0) {
        let dk = d.minus_multiple(k, e)?;
        terms.push((k, unscrew_coefficient(k), incidence.relative_key(&z.id, e, dk)));
    }
    // the left-hand side lives on the smoothing, keyed here by the relative surface id
    let target = incidence.absolute_key(&z.id, d.clone());
    Ok(evaluate(table, target, bound, terms, mode, Vec::new()))
}

/// `W_X(d) = sum_{k>=0} C(d.[E]/2 + 2k, k) W^E_Z(d - 2k[E])`.
pub fn correspondence(
    table: &dyn InvariantLookup,
    degen: &Degeneration<'_>,
    d: &HClass,
    incidence: &Incidence,
    mode: Mode,
) -> Result<RelationResult, EngineError> {
    let h = degen.half_pairing(d)?;
    let z = degen.relative;
    let bound = truncation_bound(z, d, &degen.e, 2, incidence.genus() as i64)?;
    let mut terms = Vec::new();
    for k in 0..=bound.unwrap_or(0) {
        if bound.is_none() {
            break;
        }
        let dk = d.minus_multiple(2 * k, &degen.e)?;
        terms.push((k, correspondence_coefficient(h, k), incidence.relative_key(&z.id, &degen.e, dk)));
    }
    let target = incidence.absolute_key(&degen.absolute.id, degen.to_absolute.apply(d)?);
    Ok(evaluate(table, target, bound, terms, mode, Vec::new()))
}

/// `W^E_Z(d) = sum_{k>=0} (-1)^k (C(h + k, h) + C(h + k - 1, h)) W_X(d - 2k[E])`, `h = d.[E]/2`.
pub fn invert_relative(
    table: &dyn InvariantLookup,
    degen: &Degeneration<'_>,
    d: &HClass,
    incidence: &Incidence,
    mode: Mode,
) -> Result<RelationResult, EngineError> {
    let h = degen.half_pairing(d)?;
    let x = degen.absolute;
    let dx = degen.to_absolute.apply(d)?;
    let ex = degen.to_absolute.apply(&degen.e)?;
    let bound = truncation_bound(x, &dx, &ex, 2, incidence.genus() as i64)?;
    let mut warnings = Vec::new();
    if h == 0 && bound.is_some() {
        warnings.push("k = 0 coefficient uses C(-1, 0) = 0".to_string());
    }
    let mut terms = Vec::new();
    if let Some(b) = bound {
        for k in 0..=b {
            let dk = dx.minus_multiple(2 * k, &ex)?;
            terms.push((k, inversion_coefficient(h, k), incidence.absolute_key(&x.id, dk)));
        }
    }
    let target = incidence.relative_key(&degen.relative.id, &degen.e, d.clone());
    Ok(evaluate(table, target, bound, terms, mode, warnings))
}

/// Builds the relative values `W^E_Z(d - k[E], r)` for `k = 1..=bound` from absolute ones by
/// inverting the correspondence. This is the input [`unscrew_relation`] needs.
pub fn derive_relative_table(
    table: &dyn InvariantLookup,
    degen: &Degeneration<'_>,
    d: &HClass,
    incidence: &Incidence,
    mode: Mode,
) -> Result<InvariantTable, EngineError> {
    let bound = truncation_bound(degen.relative, d, &degen.e, 1, incidence.genus() as i64)?;
    let mut out = InvariantTable::new();
    for k in 1..=bound.unwrap_or(0) {
        let dk = d.minus_multiple(k, &degen.e)?;
        let rel = invert_relative(table, degen, &dk, incidence, mode)?;
        let value = rel.require_value()?.clone();
        out.insert(rel.target, value, format!("inverted correspondence at k={k}"))?;
    }
    Ok(out)
}

/// Finite map from shift index to exact coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoeffSeries {
    coeffs: BTreeMap<u64, BigInt>,
}

impl CoeffSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_fn(range: impl IntoIterator<Item = u64>, f: impl Fn(u64) -> BigInt) -> Self {
        let mut s = CoeffSeries::new();
        for i in range {
            s.add_at(i, f(i));
        }
        s
    }

    pub fn get(&self, i: u64) -> BigInt {
        self.coeffs.get(&i).cloned().unwrap_or_default()
    }

    pub fn add_at(&mut self, i: u64, c: BigInt) {
        let slot = self.coeffs.entry(i).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &BigInt)> {
        self.coeffs.iter().map(|(i, c)| (*i, c))
    }

    /// Drops shifts beyond `max`.
    pub fn truncated(&self, max: u64) -> Self {
        CoeffSeries {
            coeffs: self.coeffs.range(..=max).map(|(i, c)| (*i, c.clone())).collect(),
        }
    }

    /// Replaces the term at shift `k` by `inner(k)` shifted by `k`, and sums.
    pub fn substitute(&self, inner: impl Fn(u64) -> CoeffSeries) -> CoeffSeries {
        let mut out = CoeffSeries::new();
        for (k, a) in self.iter() {
            for (j, b) in inner(k).iter() {
                out.add_at(k + j, a * b);
            }
        }
        out
    }
}

impl fmt::Display for CoeffSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(i, c)| format!("{i}:{c}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposeReport {
    pub depth: u64,
    pub series: CoeffSeries,
    pub first_bad: Option<u64>,
}

impl ComposeReport {
    pub fn passed(&self) -> bool {
        self.first_bad.is_none()
    }
}

/// Composes the unscrewing coefficients with the inverted correspondence under `d.[E] = 0`,
/// `[E]^2 = -2` (so the class `d - k[E]` has half-pairing `k`) and compares every shift
/// `1..=depth` against `(-1)^(i-1) i^2`.
pub fn compose_check(depth: u64) -> Result<ComposeReport, EngineError> {
    if depth < 2 {
        return Err(precondition("compose depth must be at least 2"));
    }
    let outer = CoeffSeries::from_fn(1..=depth, unscrew_coefficient);
    let series = outer
        .substitute(|k| {
            let mut inner = CoeffSeries::new();
            for l in 0..=(depth - k) / 2 {
                inner.add_at(2 * l, inversion_coefficient(k, l));
            }
            inner
        })
        .truncated(depth);
    let first_bad = (1..=depth).find(|&i| series.get(i) != gdf_coefficient(i));
    Ok(ComposeReport {
        depth,
        series,
        first_bad,
    })
}

/// `W(d, r + 2) = W(d, r) + 2 W'(p^! d - 2[E], r)`.
pub fn wall_cross(value_at_r: &BigInt, correction: &BigInt) -> BigInt {
    value_at_r + 2 * correction
}

/// The correction `W'` recovered from two consecutive values; errors when the difference is odd.
pub fn solve_correction(value_at_r_plus_2: &BigInt, value_at_r: &BigInt) -> Result<BigInt, EngineError> {
    let diff = value_at_r_plus_2 - value_at_r;
    if diff.is_odd() {
        return Err(precondition(format!("W(r+2) - W(r) = {diff} is odd")));
    }
    Ok(diff / 2)
}

/// `p^! d - 2[E]`: one more blown-up real point, new exceptional coefficient `-2`.
pub fn pullback_class(d: &HClass) -> Result<HClass, EngineError> {
    Ok(d.extended(&[BigInt::from(-2)])?)
}

/// Sparse contact-order vector: order `s >= 1` to multiplicity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TangencyVector {
    entries: BTreeMap<u32, u32>,
}

impl TangencyVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `delta_i`.
    pub fn delta(i: u32) -> Self {
        Self::zero().plus(i, 1)
    }

    pub fn plus(mut self, order: u32, mult: u32) -> Self {
        assert!(order >= 1, "contact orders start at 1");
        if mult > 0 {
            *self.entries.entry(order).or_default() += mult;
        }
        self
    }

    /// `|alpha| = sum alpha_s`.
    pub fn size(&self) -> u64 {
        self.entries.values().map(|&m| u64::from(m)).sum()
    }

    /// `I alpha = sum s alpha_s`.
    pub fn weight(&self) -> u64 {
        self.entries.iter().map(|(&s, &m)| u64::from(s) * u64::from(m)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// All vectors of weight `n` (partitions of `n`).
    pub fn all_of_weight(n: u32) -> Vec<TangencyVector> {
        fn rec(n: u32, max_part: u32, acc: TangencyVector, out: &mut Vec<TangencyVector>) {
            if n == 0 {
                out.push(acc);
                return;
            }
            for part in (1..=max_part.min(n)).rev() {
                rec(n - part, part, acc.clone().plus(part, 1), out);
            }
        }
        let mut out = Vec::new();
        rec(n, n, TangencyVector::zero(), &mut out);
        out
    }
}

impl fmt::Display for TangencyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(s, m)| if *m == 1 { format!("d{s}") } else { format!("{m}d{s}") })
            .collect();
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for TangencyVector {
    type Err = String;

    /// `0`, `d1`, `2d1`, `d1+d2`, or dense `(a1,a2,...)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "0" {
            return Ok(Self::zero());
        }
        if let Some(inner) = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            let mut v = Self::zero();
            for (i, item) in inner.split(',').enumerate() {
                let m: u32 = item.parse().map_err(|_| format!("bad multiplicity `{item}`"))?;
                v = v.plus(i as u32 + 1, m);
            }
            return Ok(v);
        }
        let mut v = Self::zero();
        for term in s.split('+') {
            let (mult, order) = term.split_once('d').ok_or_else(|| format!("bad term `{term}`"))?;
            let mult: u32 = if mult.is_empty() {
                1
            } else {
                mult.parse().map_err(|_| format!("bad multiplicity in `{term}`"))?
            };
            let order: u32 = order.parse().map_err(|_| format!("bad order in `{term}`"))?;
            if order == 0 {
                return Err("contact orders start at 1".into());
            }
            v = v.plus(order, mult);
        }
        Ok(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ruling {
    L1,
    L2,
}

impl Ruling {
    pub fn swapped(self) -> Ruling {
        match self {
            Ruling::L1 => Ruling::L2,
            Ruling::L2 => Ruling::L1,
        }
    }
}

/// The four configurations on the quadric that carry a curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuadricCase {
    /// `d = l_i`, `alpha = delta_1`, no point off `E`.
    RulingThroughFixedPoint(Ruling),
    /// `d = l_i`, `beta = delta_1`, one point off `E`.
    RulingThroughFreePoint(Ruling),
    /// `d = l1 + l2`, `alpha = 2 delta_1`, one point off `E`.
    ConicTwoFixedPoints,
    /// `d = l1 + l2`, `alpha = delta_2`, one point off `E`.
    ConicTangentAtFixedPoint,
}

impl QuadricCase {
    pub fn number(self) -> u8 {
        match self {
            QuadricCase::RulingThroughFixedPoint(_) => 1,
            QuadricCase::RulingThroughFreePoint(_) => 2,
            QuadricCase::ConicTwoFixedPoints => 3,
            QuadricCase::ConicTangentAtFixedPoint => 4,
        }
    }

    pub fn swapped(self) -> QuadricCase {
        match self {
            QuadricCase::RulingThroughFixedPoint(r) => QuadricCase::RulingThroughFixedPoint(r.swapped()),
            QuadricCase::RulingThroughFreePoint(r) => QuadricCase::RulingThroughFreePoint(r.swapped()),
            other => other,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Empty,
    UniqueEmbedding(QuadricCase),
}

impl Classification {
    pub fn swapped(self) -> Classification {
        match self {
            Classification::UniqueEmbedding(c) => Classification::UniqueEmbedding(c.swapped()),
            Classification::Empty => Classification::Empty,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Empty => f.write_str("Empty"),
            Classification::UniqueEmbedding(c) => {
                write!(f, "UniqueEmbedding case {}", c.number())?;
                match c {
                    QuadricCase::RulingThroughFixedPoint(r) | QuadricCase::RulingThroughFreePoint(r) => {
                        write!(f, " ({})", if *r == Ruling::L1 { "l1" } else { "l2" })
                    }
                    _ => Ok(()),
                }
            }
        }
    }
}

/// Curves in the quadric with contacts `alpha` (at fixed points of `E = l1 + l2`) and `beta`
/// (at free points), through `off_e <= 1` points off `E`.
pub fn classify_quadric(
    d: &HClass,
    alpha: &TangencyVector,
    beta: &TangencyVector,
    off_e: u32,
) -> Result<Classification, EngineError> {
    if d.lattice() != LatticeKind::Quadric {
        return Err(PicardError::LatticeMismatch {
            expected: LatticeKind::Quadric,
            found: d.lattice(),
        }
        .into());
    }
    if d.is_zero() {
        return Err(precondition("d must be non-zero"));
    }
    if let Some((_, l)) = d.as_basis_multiple() {
        if l >= BigInt::from(2) {
            return Err(EngineError::ExcludedClass(d.clone()));
        }
    }
    if off_e > 1 {
        return Err(precondition(format!("at most one point off E, got {off_e}")));
    }
    let e = HClass::ruling(1).add(&HClass::ruling(2))?;
    let de = d.pair(&e)?;
    let contact = BigInt::from(alpha.weight() + beta.weight());
    if contact != de {
        return Err(EngineError::TangencyMismatch {
            found: contact,
            expected: de,
        });
    }

    let one = BigInt::one();
    let zero = BigInt::zero();
    let (p, q) = (&d.coeffs()[0], &d.coeffs()[1]);
    let ruling = if *p == one && *q == zero {
        Some(Ruling::L1)
    } else if *p == zero && *q == one {
        Some(Ruling::L2)
    } else {
        None
    };
    let diagonal = *p == one && *q == one;
    let d1 = TangencyVector::delta(1);

    let case = match ruling {
        Some(r) if *alpha == d1 && beta.is_zero() && off_e == 0 => Some(QuadricCase::RulingThroughFixedPoint(r)),
        Some(r) if alpha.is_zero() && *beta == d1 && off_e == 1 => Some(QuadricCase::RulingThroughFreePoint(r)),
        None if diagonal && beta.is_zero() && off_e == 1 => {
            if *alpha == TangencyVector::zero().plus(1, 2) {
                Some(QuadricCase::ConicTwoFixedPoints)
            } else if *alpha == TangencyVector::delta(2) {
                Some(QuadricCase::ConicTangentAtFixedPoint)
            } else {
                None
            }
        }
        _ => None,
    };
    Ok(case.map_or(Classification::Empty, Classification::UniqueEmbedding))
}
