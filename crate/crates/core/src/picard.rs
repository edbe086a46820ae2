//! Integer homology lattices of the plane blown up at points and of the quadric.
//!
//! A blow-up class is written `(a;b1,...,bn)` and stands for `a[D] + b1[E1] + ... + bn[En]`,
//! so the anticanonical class of the plane blown up at six points is `(3;-1,-1,-1,-1,-1,-1)`.
//! A quadric class `(p,q)` stands for `p*l1 + q*l2`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PicardError {
    #[error("lattice mismatch: expected {expected}, found {found}")]
    LatticeMismatch {
        expected: LatticeKind,
        found: LatticeKind,
    },
    #[error("lattice mismatch: {lattice} has rank {}, class has {found} coefficients", lattice.rank())]
    WrongArity { lattice: LatticeKind, found: usize },
    #[error("parse error at column {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("d^2 - c1.d = {0} is odd; the anticanonical class is not characteristic")]
    OddAdjunction(BigInt),
}

/// Shape of the second homology lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeKind {
    /// The plane blown up at `n` points; pairing `diag(+1, -1, ..., -1)`.
    BlowupPlane(usize),
    /// `CP1 x CP1` with hyperbolic pairing on the rulings `(l1, l2)`.
    Quadric,
}

impl LatticeKind {
    pub fn rank(self) -> usize {
        match self {
            LatticeKind::BlowupPlane(n) => n + 1,
            LatticeKind::Quadric => 2,
        }
    }

    /// Number of exceptional coordinates, zero for the quadric.
    pub fn exceptional_count(self) -> usize {
        match self {
            LatticeKind::BlowupPlane(n) => n,
            LatticeKind::Quadric => 0,
        }
    }

    fn pair_raw(self, a: &[BigInt], b: &[BigInt]) -> BigInt {
        match self {
            LatticeKind::BlowupPlane(_) => {
                let mut acc = &a[0] * &b[0];
                for (x, y) in a[1..].iter().zip(&b[1..]) {
                    acc -= x * y;
                }
                acc
            }
            LatticeKind::Quadric => &a[0] * &b[1] + &a[1] * &b[0],
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeKind::BlowupPlane(n) => write!(f, "blowup:{n}"),
            LatticeKind::Quadric => f.write_str("quadric"),
        }
    }
}

impl FromStr for LatticeKind {
    type Err = PicardError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "quadric" {
            return Ok(LatticeKind::Quadric);
        }
        if let Some(n) = s.strip_prefix("blowup:") {
            if let Ok(n) = n.parse::<usize>() {
                return Ok(LatticeKind::BlowupPlane(n));
            }
        }
        Err(PicardError::Parse {
            position: 0,
            message: format!("unknown lattice `{s}` (expected blowup:<n> or quadric)"),
        })
    }
}

/// An integer class in a [`LatticeKind`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HClass {
    lattice: LatticeKind,
    coeffs: Vec<BigInt>,
}

impl HClass {
    pub fn new(lattice: LatticeKind, coeffs: Vec<BigInt>) -> Result<Self, PicardError> {
        if coeffs.len() != lattice.rank() {
            return Err(PicardError::WrongArity {
                lattice,
                found: coeffs.len(),
            });
        }
        Ok(HClass { lattice, coeffs })
    }

    pub fn from_i64s(lattice: LatticeKind, coeffs: &[i64]) -> Result<Self, PicardError> {
        Self::new(lattice, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(lattice: LatticeKind) -> Self {
        HClass {
            lattice,
            coeffs: vec![BigInt::zero(); lattice.rank()],
        }
    }

    /// The pull-back `[D]` of a line. Panics on the quadric.
    pub fn line(n: usize) -> Self {
        Self::basis(LatticeKind::BlowupPlane(n), 0)
    }

    /// The exceptional class `[E_i]`, `1 <= i <= n`.
    pub fn exceptional(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= n, "exceptional index {i} out of range 1..={n}");
        Self::basis(LatticeKind::BlowupPlane(n), i)
    }

    /// The ruling `l_i`, `i` in `{1, 2}`.
    pub fn ruling(i: usize) -> Self {
        assert!(i == 1 || i == 2, "ruling index must be 1 or 2");
        Self::basis(LatticeKind::Quadric, i - 1)
    }

    fn basis(lattice: LatticeKind, at: usize) -> Self {
        let mut c = Self::zero(lattice);
        c.coeffs[at] = BigInt::one();
        c
    }

    pub fn lattice(&self) -> LatticeKind {
        self.lattice
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn same_lattice(&self, other: &HClass) -> Result<(), PicardError> {
        if self.lattice != other.lattice {
            return Err(PicardError::LatticeMismatch {
                expected: self.lattice,
                found: other.lattice,
            });
        }
        Ok(())
    }

    /// Intersection number.
    pub fn pair(&self, other: &HClass) -> Result<BigInt, PicardError> {
        self.same_lattice(other)?;
        Ok(self.lattice.pair_raw(&self.coeffs, &other.coeffs))
    }

    pub fn self_intersection(&self) -> BigInt {
        self.lattice.pair_raw(&self.coeffs, &self.coeffs)
    }

    pub fn add(&self, other: &HClass) -> Result<HClass, PicardError> {
        self.same_lattice(other)?;
        Ok(HClass {
            lattice: self.lattice,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &HClass) -> Result<HClass, PicardError> {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, k: &BigInt) -> HClass {
        HClass {
            lattice: self.lattice,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// `self - k * step`.
    pub fn minus_multiple(&self, k: u64, step: &HClass) -> Result<HClass, PicardError> {
        self.sub(&step.scale(&BigInt::from(k)))
    }

    /// Is this class `l * basis_i` for some integer `l` and some non-zero basis coordinate `i`?
    /// Returns the coordinate index and the multiple.
    pub fn as_basis_multiple(&self) -> Option<(usize, BigInt)> {
        let mut found = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if found.is_some() {
                return None;
            }
            found = Some((i, c.clone()));
        }
        found
    }

    /// Coefficient vector reduced mod 2.
    pub fn mod2(&self) -> Vec<bool> {
        self.coeffs.iter().map(|c| c.is_odd()).collect()
    }

    /// Append exceptional coordinates; only meaningful for blow-up classes.
    pub fn extended(&self, extra: &[BigInt]) -> Result<HClass, PicardError> {
        match self.lattice {
            LatticeKind::BlowupPlane(n) => {
                let mut coeffs = self.coeffs.clone();
                coeffs.extend_from_slice(extra);
                HClass::new(LatticeKind::BlowupPlane(n + extra.len()), coeffs)
            }
            LatticeKind::Quadric => Err(PicardError::LatticeMismatch {
                expected: LatticeKind::BlowupPlane(0),
                found: LatticeKind::Quadric,
            }),
        }
    }

    /// Parse the textual form for a known lattice.
    pub fn parse(text: &str, lattice: LatticeKind) -> Result<HClass, PicardError> {
        let (values, seps) = tokenize(text)?;
        match lattice {
            LatticeKind::BlowupPlane(_) => {
                if let Some(&(sep, pos)) = seps.first() {
                    if sep != ';' {
                        return Err(parse_err(pos, "expected `;` after the line coefficient"));
                    }
                }
                if let Some(&(_, pos)) = seps.iter().skip(1).find(|(s, _)| *s != ',') {
                    return Err(parse_err(pos, "expected `,` between exceptional coefficients"));
                }
            }
            LatticeKind::Quadric => {
                if let Some(&(_, pos)) = seps.iter().find(|(s, _)| *s != ',') {
                    return Err(parse_err(pos, "quadric classes are written (p,q)"));
                }
            }
        }
        HClass::new(lattice, values)
    }

    /// Parse without a declared lattice: `(a;...)` or `(a)` is a blow-up class, `(p,q)` a quadric class.
    pub fn parse_inferred(text: &str) -> Result<HClass, PicardError> {
        let (values, seps) = tokenize(text)?;
        let lattice = match seps.first() {
            None => LatticeKind::BlowupPlane(0),
            Some((';', _)) => LatticeKind::BlowupPlane(values.len() - 1),
            Some((',', _)) if values.len() == 2 => LatticeKind::Quadric,
            Some((_, pos)) => return Err(parse_err(*pos, "cannot infer lattice")),
        };
        HClass::parse(text, lattice)
    }
}

fn parse_err(position: usize, message: &str) -> PicardError {
    PicardError::Parse {
        position,
        message: message.to_string(),
    }
}

/// Splits `( int sep int sep ... )` into integers and separators with their columns.
fn tokenize(text: &str) -> Result<(Vec<BigInt>, Vec<(char, usize)>), PicardError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    let skip_ws = |i: &mut usize| {
        while *i < chars.len() && chars[*i].1.is_whitespace() {
            *i += 1;
        }
    };
    let col = |i: usize| chars.get(i).map_or(text.len(), |c| c.0);

    skip_ws(&mut i);
    if chars.get(i).map(|c| c.1) != Some('(') {
        return Err(parse_err(col(i), "expected `(`"));
    }
    i += 1;
    let mut values = Vec::new();
    let mut seps = Vec::new();
    loop {
        skip_ws(&mut i);
        let start = i;
        if i < chars.len() && (chars[i].1 == '-' || chars[i].1 == '+') {
            i += 1;
        }
        let digits_start = i;
        while i < chars.len() && chars[i].1.is_ascii_digit() {
            i += 1;
        }
        if i == digits_start {
            return Err(parse_err(col(start), "expected an integer"));
        }
        let lexeme: String = chars[start..i].iter().map(|c| c.1).collect();
        let value = lexeme
            .trim_start_matches('+')
            .parse::<BigInt>()
            .map_err(|_| parse_err(col(start), "invalid integer"))?;
        values.push(value);
        skip_ws(&mut i);
        match chars.get(i).map(|c| c.1) {
            Some(')') => {
                i += 1;
                break;
            }
            Some(sep @ (',' | ';')) => {
                seps.push((sep, col(i)));
                i += 1;
            }
            _ => return Err(parse_err(col(i), "expected `,`, `;` or `)`")),
        }
    }
    skip_ws(&mut i);
    if i != chars.len() {
        return Err(parse_err(col(i), "trailing characters after `)`"));
    }
    Ok((values, seps))
}

impl fmt::Display for HClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        match self.lattice {
            LatticeKind::BlowupPlane(_) => {
                write!(f, "{}", self.coeffs[0])?;
                for (i, c) in self.coeffs[1..].iter().enumerate() {
                    f.write_str(if i == 0 { ";" } else { "," })?;
                    write!(f, "{c}")?;
                }
            }
            LatticeKind::Quadric => write!(f, "{},{}", self.coeffs[0], self.coeffs[1])?,
        }
        f.write_str(")")
    }
}

/// Intersection number of two classes.
pub fn pair(a: &HClass, b: &HClass) -> Result<BigInt, PicardError> {
    a.pair(b)
}

/// A complex surface model: lattice plus anticanonical class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceModel {
    pub id: String,
    lattice: LatticeKind,
    c1: HClass,
}

impl SurfaceModel {
    /// Standard anticanonical class: `(3;-1,...,-1)` or `2l1 + 2l2`.
    pub fn standard(id: impl Into<String>, lattice: LatticeKind) -> Self {
        let c1 = match lattice {
            LatticeKind::BlowupPlane(n) => {
                let mut coeffs = vec![BigInt::from(-1); n + 1];
                coeffs[0] = BigInt::from(3);
                HClass { lattice, coeffs }
            }
            LatticeKind::Quadric => HClass {
                lattice,
                coeffs: vec![BigInt::from(2), BigInt::from(2)],
            },
        };
        SurfaceModel {
            id: id.into(),
            lattice,
            c1,
        }
    }

    pub fn with_c1(id: impl Into<String>, c1: HClass) -> Self {
        SurfaceModel {
            id: id.into(),
            lattice: c1.lattice(),
            c1,
        }
    }

    pub fn lattice(&self) -> LatticeKind {
        self.lattice
    }

    pub fn c1(&self) -> &HClass {
        &self.c1
    }

    /// `c1 . c1`.
    pub fn degree(&self) -> BigInt {
        self.c1.self_intersection()
    }

    pub fn c1_dot(&self, d: &HClass) -> Result<BigInt, PicardError> {
        self.c1.pair(d)
    }

    /// Adjunction: `(d.d - c1.d)/2 + 1`.
    pub fn arithmetic_genus(&self, d: &HClass) -> Result<BigInt, PicardError> {
        let twice = d.pair(d)? - self.c1.pair(d)?;
        if twice.is_odd() {
            return Err(PicardError::OddAdjunction(twice));
        }
        Ok(twice / 2 + 1)
    }

    pub fn parse_class(&self, text: &str) -> Result<HClass, PicardError> {
        HClass::parse(text, self.lattice)
    }

    /// True when `d` is a non-zero multiple of a single exceptional class `[E_i]`.
    pub fn is_exceptional_multiple(&self, d: &HClass) -> bool {
        match (self.lattice, d.as_basis_multiple()) {
            (LatticeKind::BlowupPlane(_), Some((i, _))) => i >= 1,
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b6(c: &[i64]) -> HClass {
        HClass::from_i64s(LatticeKind::BlowupPlane(6), c).unwrap()
    }

    #[test]
    fn sphere_class_is_minus_two() {
        let s = b6(&[2, -1, -1, -1, -1, -1, -1]);
        assert_eq!(pair(&s, &s).unwrap(), BigInt::from(-2));
        assert_eq!(pair(&HClass::line(6), &HClass::line(6)).unwrap(), BigInt::from(1));
    }

    #[test]
    fn twice_c1_is_orthogonal_to_sphere() {
        let x = SurfaceModel::standard("X", LatticeKind::BlowupPlane(6));
        let d = x.c1().scale(&BigInt::from(2));
        let s = b6(&[2, -1, -1, -1, -1, -1, -1]);
        assert_eq!(d.pair(&s).unwrap(), BigInt::zero());
        assert_eq!(x.arithmetic_genus(&d).unwrap(), BigInt::from(4));
    }

    #[test]
    fn genus_of_rational_curves() {
        let p2 = SurfaceModel::standard("P", LatticeKind::BlowupPlane(3));
        let conic = HClass::line(3).scale(&BigInt::from(2));
        assert_eq!(p2.arithmetic_genus(&conic).unwrap(), BigInt::zero());
        let q = SurfaceModel::standard("Q", LatticeKind::Quadric);
        assert_eq!(q.arithmetic_genus(&HClass::ruling(1)).unwrap(), BigInt::zero());
    }

    #[test]
    fn degrees() {
        assert_eq!(SurfaceModel::standard("a", LatticeKind::BlowupPlane(6)).degree(), BigInt::from(3));
        assert_eq!(SurfaceModel::standard("b", LatticeKind::BlowupPlane(7)).degree(), BigInt::from(2));
        assert_eq!(SurfaceModel::standard("c", LatticeKind::Quadric).degree(), BigInt::from(8));
        for n in 0..=8 {
            let m = SurfaceModel::standard("x", LatticeKind::BlowupPlane(n));
            assert_eq!(m.degree(), BigInt::from(9 - n as i64));
        }
    }

    #[test]
    fn parse_and_format() {
        let lat = LatticeKind::BlowupPlane(6);
        let c = HClass::parse("(6;-2,-2,-2,-2,-2,-2)", lat).unwrap();
        assert_eq!(c, b6(&[6, -2, -2, -2, -2, -2, -2]));
        let c = HClass::parse(" ( 2 ; -1, -1,-1 , -1,-1,+-1)", lat);
        assert!(matches!(c, Err(PicardError::Parse { .. })));
        let c = HClass::parse(" ( 2 ; -1, -1,-1 , -1,-1,-1 ) ", lat).unwrap();
        assert_eq!(c.to_string(), "(2;-1,-1,-1,-1,-1,-1)");
        let q = HClass::parse("(1,1)", LatticeKind::Quadric).unwrap();
        assert_eq!(q, HClass::ruling(1).add(&HClass::ruling(2)).unwrap());
        assert_eq!(HClass::parse("(4)", LatticeKind::BlowupPlane(0)).unwrap().to_string(), "(4)");
    }

    #[test]
    fn parse_errors_carry_position() {
        let lat = LatticeKind::BlowupPlane(2);
        match HClass::parse("(1;2,x)", lat) {
            Err(PicardError::Parse { position, .. }) => assert_eq!(position, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            HClass::parse("(1;2)", lat),
            Err(PicardError::WrongArity { found: 2, .. })
        ));
        assert!(matches!(HClass::parse("(1,2,3)", lat), Err(PicardError::Parse { .. })));
        assert!(matches!(HClass::parse("(1;2;3)", LatticeKind::BlowupPlane(2)), Err(PicardError::Parse { .. })));
        assert!(matches!(HClass::parse("(1;2)", LatticeKind::Quadric), Err(PicardError::Parse { .. })));
        assert!(matches!(HClass::parse("(1,2) x", LatticeKind::Quadric), Err(PicardError::Parse { .. })));
    }

    #[test]
    fn mixing_lattices_is_an_error() {
        let a = HClass::line(2);
        let q = HClass::ruling(2);
        assert!(matches!(a.pair(&q), Err(PicardError::LatticeMismatch { .. })));
        assert!(matches!(a.add(&HClass::line(3)), Err(PicardError::LatticeMismatch { .. })));
    }

    #[test]
    fn inferred_lattice() {
        assert_eq!(HClass::parse_inferred("(1,1)").unwrap().lattice(), LatticeKind::Quadric);
        assert_eq!(
            HClass::parse_inferred("(2;0,0,-2)").unwrap().lattice(),
            LatticeKind::BlowupPlane(3)
        );
    }

    #[test]
    fn exceptional_multiples() {
        let x = SurfaceModel::standard("X", LatticeKind::BlowupPlane(7));
        assert!(x.is_exceptional_multiple(&HClass::exceptional(7, 1).scale(&BigInt::from(3))));
        assert!(!x.is_exceptional_multiple(&HClass::line(7)));
        assert!(!x.is_exceptional_multiple(&HClass::zero(LatticeKind::BlowupPlane(7))));
    }
}
