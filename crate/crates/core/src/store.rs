//! Invariant tables: provenance-tagged exact values, one record per line.
//!
//! ```text
//! surface X1 lattice=blowup:6
//! W X1 d=(4;-1,-1,-1,-1,-1,-1) L=(RP2) F=0 r=(5) g=0 = 40 # source
//! WE Z1 E=(2;-1,-1,-1,-1,-1,-1) d=(4;-1,-1,-1,-1,-1,-1) L=(RP2) F=0 r=(5) g=0 = 12 # source
//! ```

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use thiserror::Error;

use crate::picard::{HClass, LatticeKind, PicardError};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("line {line}: duplicate key {key}")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: {source}")]
    LatticeMismatch { line: usize, source: PicardError },
    #[error("conflicting values for {key}: {left} vs {right}")]
    ConflictingValue { key: String, left: BigInt, right: BigInt },
    #[error("surface `{id}` declared as {left} and {right}")]
    ConflictingSurface { id: String, left: LatticeKind, right: LatticeKind },
    #[error("invalid key {key}: {message}")]
    InvalidKey { key: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Key of an absolute (`relative_to = None`) or relative invariant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantKey {
    pub surface_id: String,
    pub relative_to: Option<HClass>,
    pub d: HClass,
    pub components: Vec<String>,
    pub r: Vec<u32>,
    pub f: String,
}

impl InvariantKey {
    pub fn absolute(
        surface_id: impl Into<String>,
        d: HClass,
        components: Vec<String>,
        r: Vec<u32>,
        f: impl Into<String>,
    ) -> Self {
        InvariantKey {
            surface_id: surface_id.into(),
            relative_to: None,
            d,
            components,
            r,
            f: f.into(),
        }
    }

    pub fn relative(
        surface_id: impl Into<String>,
        e: HClass,
        d: HClass,
        components: Vec<String>,
        r: Vec<u32>,
        f: impl Into<String>,
    ) -> Self {
        InvariantKey {
            relative_to: Some(e),
            ..Self::absolute(surface_id, d, components, r, f)
        }
    }

    pub fn genus(&self) -> usize {
        self.components.len().saturating_sub(1)
    }

    /// Same key with another class.
    pub fn with_class(&self, d: HClass) -> Self {
        InvariantKey { d, ..self.clone() }
    }

    fn validate(&self) -> Result<(), String> {
        if self.components.is_empty() {
            return Err("at least one component is required".into());
        }
        if self.r.len() != self.components.len() {
            return Err(format!(
                "r has {} entries for {} components",
                self.r.len(),
                self.components.len()
            ));
        }
        if let Some(e) = &self.relative_to {
            if e.lattice() != self.d.lattice() {
                return Err(format!("E lives in {}, d in {}", e.lattice(), self.d.lattice()));
            }
        }
        let bad_token = |s: &str| s.is_empty() || s.contains(|c: char| c.is_whitespace() || "(),#=".contains(c));
        if bad_token(&self.surface_id) || bad_token(&self.f) || self.components.iter().any(|c| bad_token(c)) {
            return Err("identifiers must be non-empty and free of whitespace and ( ) , # =".into());
        }
        Ok(())
    }
}

impl fmt::Display for InvariantKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.relative_to {
            None => write!(f, "W {}", self.surface_id)?,
            Some(e) => write!(f, "WE {} E={}", self.surface_id, e)?,
        }
        let r: Vec<String> = self.r.iter().map(u32::to_string).collect();
        write!(
            f,
            " d={} L=({}) F={} r=({}) g={}",
            self.d,
            self.components.join(","),
            self.f,
            r.join(","),
            self.genus()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub value: BigInt,
    pub provenance: String,
}

/// Read access to invariant values.
pub trait InvariantLookup {
    fn lookup(&self, key: &InvariantKey) -> Option<&Entry>;
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvariantTable {
    surfaces: BTreeMap<String, LatticeKind>,
    entries: BTreeMap<InvariantKey, Entry>,
}

impl InvariantLookup for InvariantTable {
    fn lookup(&self, key: &InvariantKey) -> Option<&Entry> {
        self.entries.get(key)
    }
}

impl InvariantTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&InvariantKey, &Entry)> {
        self.entries.iter()
    }

    pub fn get(&self, key: &InvariantKey) -> Option<&BigInt> {
        self.entries.get(key).map(|e| &e.value)
    }

    pub fn surfaces(&self) -> impl Iterator<Item = (&String, &LatticeKind)> {
        self.surfaces.iter()
    }

    pub fn declare_surface(&mut self, id: impl Into<String>, lattice: LatticeKind) -> Result<(), StoreError> {
        let id = id.into();
        match self.surfaces.get(&id) {
            Some(&existing) if existing != lattice => Err(StoreError::ConflictingSurface {
                id,
                left: existing,
                right: lattice,
            }),
            _ => {
                self.surfaces.insert(id, lattice);
                Ok(())
            }
        }
    }

    /// Inserts a value. Re-inserting an identical value is a no-op; a different value is an error.
    /// Undeclared surfaces are declared from the key's lattice.
    pub fn insert(
        &mut self,
        key: InvariantKey,
        value: BigInt,
        provenance: impl Into<String>,
    ) -> Result<(), StoreError> {
        key.validate().map_err(|message| StoreError::InvalidKey {
            key: key.to_string(),
            message,
        })?;
        let lattice = key.d.lattice();
        if let Some(&declared) = self.surfaces.get(&key.surface_id) {
            if declared != lattice {
                return Err(StoreError::LatticeMismatch {
                    line: 0,
                    source: PicardError::LatticeMismatch {
                        expected: declared,
                        found: lattice,
                    },
                });
            }
        } else {
            self.surfaces.insert(key.surface_id.clone(), lattice);
        }
        if let Some(existing) = self.entries.get(&key) {
            if existing.value != value {
                return Err(StoreError::ConflictingValue {
                    key: key.to_string(),
                    left: existing.value.clone(),
                    right: value,
                });
            }
            return Ok(());
        }
        self.entries.insert(
            key,
            Entry {
                value,
                provenance: provenance.into(),
            },
        );
        Ok(())
    }

    /// Union of two tables. Overlapping keys must carry identical values; differing provenance
    /// strings are joined in sorted order so the result does not depend on argument order.
    pub fn merge(&self, other: &InvariantTable) -> Result<InvariantTable, StoreError> {
        let mut out = self.clone();
        for (id, &lattice) in &other.surfaces {
            out.declare_surface(id.clone(), lattice)?;
        }
        for (key, entry) in &other.entries {
            match out.entries.get_mut(key) {
                Some(existing) if existing.value != entry.value => {
                    return Err(StoreError::ConflictingValue {
                        key: key.to_string(),
                        left: existing.value.clone(),
                        right: entry.value.clone(),
                    })
                }
                Some(existing) => {
                    if existing.provenance != entry.provenance {
                        let mut parts = [existing.provenance.clone(), entry.provenance.clone()];
                        parts.sort();
                        existing.provenance = parts.join(" | ");
                    }
                }
                None => {
                    out.entries.insert(key.clone(), entry.clone());
                }
            }
        }
        Ok(out)
    }

    /// Canonical serialization: surfaces by id, then records sorted by key text.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        for (id, lattice) in &self.surfaces {
            out.push_str(&format!("surface {id} lattice={lattice}\n"));
        }
        let mut records: Vec<(String, &Entry)> =
            self.entries.iter().map(|(k, e)| (k.to_string(), e)).collect();
        records.sort_by(|a, b| a.0.cmp(&b.0));
        for (key, entry) in records {
            out.push_str(&format!("{key} = {}", entry.value));
            if !entry.provenance.is_empty() {
                out.push_str(&format!(" # {}", entry.provenance));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<InvariantTable, StoreError> {
        let mut table = InvariantTable::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut cur = Cursor::new(raw, line);
            let head = cur.word()?;
            match head.as_str() {
                "surface" => {
                    let id = cur.word()?;
                    cur.expect_field("lattice")?;
                    let at = cur.column();
                    let lattice = cur.word()?.parse::<LatticeKind>().map_err(|e| StoreError::Parse {
                        line,
                        column: at,
                        message: e.to_string(),
                    })?;
                    cur.end()?;
                    table.declare_surface(id, lattice).map_err(|e| StoreError::Parse {
                        line,
                        column: 1,
                        message: e.to_string(),
                    })?;
                }
                "W" | "WE" => {
                    let (key, value, provenance) = parse_record(&mut cur, head == "WE", &table.surfaces)?;
                    if table.entries.contains_key(&key) {
                        return Err(StoreError::DuplicateKey {
                            line,
                            key: key.to_string(),
                        });
                    }
                    table.entries.insert(key, Entry { value, provenance });
                }
                other => {
                    return Err(StoreError::Parse {
                        line,
                        column: 1,
                        message: format!("unknown record type `{other}`"),
                    })
                }
            }
        }
        Ok(table)
    }
}

/// Wraps a lookup and records every key consulted, in order.
pub struct AccessLog<'a, T: InvariantLookup> {
    inner: &'a T,
    log: RefCell<Vec<InvariantKey>>,
}

impl<'a, T: InvariantLookup> AccessLog<'a, T> {
    pub fn new(inner: &'a T) -> Self {
        AccessLog {
            inner,
            log: RefCell::new(Vec::new()),
        }
    }

    pub fn consulted(&self) -> Vec<InvariantKey> {
        self.log.borrow().clone()
    }
}

impl<T: InvariantLookup> InvariantLookup for AccessLog<'_, T> {
    fn lookup(&self, key: &InvariantKey) -> Option<&Entry> {
        self.log.borrow_mut().push(key.clone());
        self.inner.lookup(key)
    }
}

pub fn load_table(path: impl AsRef<Path>) -> Result<InvariantTable, StoreError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| StoreError::Io {
        path: path.display().to_string(),
        source,
    })?;
    InvariantTable::parse(&text)
}

pub fn save_table(table: &InvariantTable, path: impl AsRef<Path>) -> Result<(), StoreError> {
    let path = path.as_ref();
    fs::write(path, table.to_canonical_string()).map_err(|source| StoreError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn merge(a: &InvariantTable, b: &InvariantTable) -> Result<InvariantTable, StoreError> {
    a.merge(b)
}

fn parse_record(
    cur: &mut Cursor<'_>,
    relative: bool,
    surfaces: &BTreeMap<String, LatticeKind>,
) -> Result<(InvariantKey, BigInt, String), StoreError> {
    let line = cur.line;
    let sid_col = cur.column();
    let surface_id = cur.word()?;
    let lattice = *surfaces.get(&surface_id).ok_or_else(|| StoreError::Parse {
        line,
        column: sid_col,
        message: format!("surface `{surface_id}` is not declared"),
    })?;
    let class = |cur: &mut Cursor<'_>, name: &str| -> Result<HClass, StoreError> {
        cur.expect_field(name)?;
        let at = cur.column();
        let text = cur.group()?;
        HClass::parse(&text, lattice).map_err(|e| match e {
            PicardError::Parse { position, message } => StoreError::Parse {
                line,
                column: at + position,
                message,
            },
            other => StoreError::LatticeMismatch { line, source: other },
        })
    };
    let e = if relative { Some(class(cur, "E")?) } else { None };
    let d = class(cur, "d")?;

    cur.expect_field("L")?;
    let at = cur.column();
    let components: Vec<String> = split_group(&cur.group()?)
        .map_err(|m| StoreError::Parse { line, column: at, message: m })?;

    cur.expect_field("F")?;
    let f = cur.word()?;

    cur.expect_field("r")?;
    let at = cur.column();
    let r = split_group(&cur.group()?)
        .and_then(|items| {
            items
                .iter()
                .map(|s| s.parse::<u32>().map_err(|_| format!("bad point count `{s}`")))
                .collect::<Result<Vec<u32>, String>>()
        })
        .map_err(|m| StoreError::Parse { line, column: at, message: m })?;

    cur.expect_field("g")?;
    let at = cur.column();
    let g: usize = cur.word()?.parse().map_err(|_| StoreError::Parse {
        line,
        column: at,
        message: "bad genus".into(),
    })?;

    if r.len() != components.len() {
        return Err(StoreError::Parse {
            line,
            column: at,
            message: format!("r has {} entries for {} components", r.len(), components.len()),
        });
    }
    if components.is_empty() || g + 1 != components.len() {
        return Err(StoreError::Parse {
            line,
            column: at,
            message: format!("g = {g} but {} components listed", components.len()),
        });
    }

    cur.skip_ws();
    let at = cur.column();
    if !cur.eat('=') {
        return Err(StoreError::Parse { line, column: at, message: "expected `= <value>`".into() });
    }
    let at = cur.column();
    let value: BigInt = cur.word()?.parse().map_err(|_| StoreError::Parse {
        line,
        column: at,
        message: "bad integer value".into(),
    })?;
    cur.skip_ws();
    let provenance = if cur.eat('#') {
        cur.rest().trim().to_string()
    } else {
        cur.end()?;
        String::new()
    };

    let key = InvariantKey {
        surface_id,
        relative_to: e,
        d,
        components,
        r,
        f,
    };
    key.validate().map_err(|message| StoreError::Parse { line, column: sid_col, message })?;
    Ok((key, value, provenance))
}

fn split_group(group: &str) -> Result<Vec<String>, String> {
    let inner = group
        .strip_prefix('(')
        .and_then(|g| g.strip_suffix(')'))
        .ok_or_else(|| format!("expected a parenthesized list, got `{group}`"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|s| {
            let s = s.trim();
            if s.is_empty() {
                Err("empty list item".to_string())
            } else {
                Ok(s.to_string())
            }
        })
        .collect()
}

/// Character cursor over one record line.
struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cursor { text, pos: 0, line }
    }

    fn column(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, want: char) -> bool {
        if self.peek() == Some(want) {
            self.pos += want.len_utf8();
            true
        } else {
            false
        }
    }

    fn err(&self, message: impl Into<String>) -> StoreError {
        StoreError::Parse {
            line: self.line,
            column: self.column(),
            message: message.into(),
        }
    }

    /// A whitespace-delimited token, stopping before `=` and `#`.
    fn word(&mut self) -> Result<String, StoreError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || c == '=' || c == '#' {
                break;
            }
            self.pos += c.len_utf8();
        }
        if self.pos == start {
            return Err(self.err("expected a token"));
        }
        Ok(self.text[start..self.pos].to_string())
    }

    /// `name` followed by optional whitespace and `=`.
    fn expect_field(&mut self, name: &str) -> Result<(), StoreError> {
        self.skip_ws();
        if !self.text[self.pos..].starts_with(name) {
            return Err(self.err(format!("expected `{name}=`")));
        }
        self.pos += name.len();
        self.skip_ws();
        if !self.eat('=') {
            return Err(self.err(format!("expected `=` after `{name}`")));
        }
        self.skip_ws();
        Ok(())
    }

    /// A parenthesized group, inner whitespace allowed.
    fn group(&mut self) -> Result<String, StoreError> {
        self.skip_ws();
        if self.peek() != Some('(') {
            return Err(self.err("expected `(`"));
        }
        let start = self.pos;
        match self.text[self.pos..].find(')') {
            Some(off) => {
                self.pos += off + 1;
                Ok(self.text[start..self.pos].to_string())
            }
            None => Err(self.err("unterminated `(`")),
        }
    }

    fn rest(&mut self) -> &'a str {
        let r = &self.text[self.pos..];
        self.pos = self.text.len();
        r
    }

    fn end(&mut self) -> Result<(), StoreError> {
        self.skip_ws();
        if self.pos != self.text.len() {
            return Err(self.err("trailing characters"));
        }
        Ok(())
    }
}
