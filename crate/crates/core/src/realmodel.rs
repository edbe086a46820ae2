//! Real structures on surface models: real components, mod-2 trace data and the
//! numeric admissibility conditions for a genus-g point configuration.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::picard::{HClass, LatticeKind, PicardError, SurfaceModel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealModelError {
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("unknown surface `{0}`")]
    UnknownSurface(String),
    #[error("invalid parity rule for `{component}`: {message}")]
    InvalidParityRule { component: String, message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Picard(#[from] PicardError),
}

/// Topological type of a connected component of the real part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComponentTopology {
    Sphere,
    RP2,
    /// Connected sum of `k >= 2` real projective planes.
    KleinLike(u32),
    Torus,
}

impl ComponentTopology {
    pub fn euler_characteristic(self) -> i64 {
        match self {
            ComponentTopology::Sphere => 2,
            ComponentTopology::RP2 => 1,
            ComponentTopology::KleinLike(k) => 2 - i64::from(k),
            ComponentTopology::Torus => 0,
        }
    }
}

impl fmt::Display for ComponentTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentTopology::Sphere => f.write_str("S2"),
            ComponentTopology::RP2 => f.write_str("RP2"),
            ComponentTopology::KleinLike(2) => f.write_str("RP2xRP2"),
            ComponentTopology::KleinLike(k) => write!(f, "{k}RP2"),
            ComponentTopology::Torus => f.write_str("T2"),
        }
    }
}

impl FromStr for ComponentTopology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "S2" => Ok(ComponentTopology::Sphere),
            "RP2" => Ok(ComponentTopology::RP2),
            "T2" => Ok(ComponentTopology::Torus),
            "RP2xRP2" | "RP2#RP2" => Ok(ComponentTopology::KleinLike(2)),
            other => other
                .strip_suffix("RP2")
                .and_then(|k| k.parse::<u32>().ok())
                .filter(|&k| k >= 2)
                .map(ComponentTopology::KleinLike)
                .ok_or_else(|| format!("unknown topology `{other}`")),
        }
    }
}

/// Mod-2 data computing the trace class `l_{L,d} = M (d mod 2)` in `H_1(L; Z/2) = (Z/2)^s`
/// and its self-intersection `l^T A l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityRule {
    trace: Vec<Vec<bool>>,
    form: Vec<Vec<bool>>,
}

impl ParityRule {
    pub fn new(trace: Vec<Vec<bool>>, form: Vec<Vec<bool>>, rank: usize) -> Result<Self, String> {
        let s = trace.len();
        if let Some(row) = trace.iter().find(|row| row.len() != rank) {
            return Err(format!("trace row has {} entries, lattice rank is {rank}", row.len()));
        }
        if form.len() != s || form.iter().any(|row| row.len() != s) {
            return Err(format!("intersection form must be {s}x{s}"));
        }
        for i in 0..s {
            for j in 0..i {
                if form[i][j] != form[j][i] {
                    return Err("intersection form must be symmetric".into());
                }
            }
        }
        Ok(ParityRule { trace, form })
    }

    /// The zero map, used for spheres.
    pub fn zero(rank: usize) -> Self {
        ParityRule {
            trace: vec![vec![false; rank]],
            form: vec![vec![false]],
        }
    }

    pub fn is_zero_map(&self) -> bool {
        self.trace.iter().flatten().all(|b| !b)
    }

    /// `M (d mod 2)`.
    pub fn trace_class(&self, d: &HClass) -> Vec<bool> {
        let bits = d.mod2();
        self.trace
            .iter()
            .map(|row| row.iter().zip(&bits).fold(false, |acc, (m, b)| acc ^ (*m & *b)))
            .collect()
    }

    /// `l^T A l` over `Z/2`.
    pub fn lsq(&self, d: &HClass) -> u8 {
        let l = self.trace_class(d);
        let mut acc = false;
        for (i, li) in l.iter().enumerate() {
            for (j, lj) in l.iter().enumerate() {
                acc ^= *li & *lj & self.form[i][j];
            }
        }
        u8::from(acc)
    }

    fn rows_to_string(rows: &[Vec<bool>]) -> String {
        if rows.is_empty() {
            return "-".into();
        }
        rows.iter()
            .map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for ParityRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "M={} A={}",
            Self::rows_to_string(&self.trace),
            Self::rows_to_string(&self.form)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealComponent {
    pub name: String,
    pub topology: ComponentTopology,
    pub rule: ParityRule,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurgeryDirection {
    /// This surface is `Y`; surgery along the sphere produces the partner `X`.
    ToPartner,
    /// This surface is `X`; the partner `Y` surgers onto it.
    FromPartner,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryLink {
    pub partner: String,
    pub sphere: HClass,
    pub direction: SurgeryDirection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealSurfaceModel {
    pub surface: SurfaceModel,
    pub components: Vec<RealComponent>,
    pub surgery_links: Vec<SurgeryLink>,
}

impl RealSurfaceModel {
    pub fn new(surface: SurfaceModel) -> Self {
        RealSurfaceModel {
            surface,
            components: Vec::new(),
            surgery_links: Vec::new(),
        }
    }

    pub fn id(&self) -> &str {
        &self.surface.id
    }

    pub fn lattice(&self) -> LatticeKind {
        self.surface.lattice()
    }

    pub fn add_component(
        &mut self,
        name: impl Into<String>,
        topology: ComponentTopology,
        rule: ParityRule,
    ) -> Result<(), RealModelError> {
        let name = name.into();
        if self.component(&name).is_some() {
            return Err(RealModelError::InvalidParityRule {
                component: name,
                message: "duplicate component name".into(),
            });
        }
        if topology == ComponentTopology::Sphere && !rule.is_zero_map() {
            return Err(RealModelError::InvalidParityRule {
                component: name,
                message: "a sphere has trivial H_1, its trace map must be zero".into(),
            });
        }
        self.components.push(RealComponent { name, topology, rule });
        Ok(())
    }

    pub fn component(&self, name: &str) -> Option<&RealComponent> {
        self.components.iter().find(|c| c.name == name)
    }

    /// Euler characteristic of the real part.
    pub fn euler_characteristic(&self) -> i64 {
        self.components.iter().map(|c| c.topology.euler_characteristic()).sum()
    }

    /// Mod-2 self-intersection `l^2_{L,d}` of the trace of `d` on component `name`.
    pub fn lsq(&self, name: &str, d: &HClass) -> Result<u8, RealModelError> {
        let comp = self
            .component(name)
            .ok_or_else(|| RealModelError::UnknownComponent(name.to_string()))?;
        if d.lattice() != self.lattice() {
            return Err(PicardError::LatticeMismatch {
                expected: self.lattice(),
                found: d.lattice(),
            }
            .into());
        }
        Ok(comp.rule.lsq(d))
    }

    /// Sphere class of the outgoing surgery link to `partner`, if declared.
    pub fn sphere_to(&self, partner: &str) -> Option<&HClass> {
        self.surgery_links
            .iter()
            .find(|l| l.direction == SurgeryDirection::ToPartner && l.partner == partner)
            .map(|l| &l.sphere)
    }
}

/// A genus-g point-constraint configuration on a real surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigSpec {
    pub d: HClass,
    /// Chosen real components `L_0, ..., L_g`; the genus is `chosen.len() - 1`.
    pub chosen: Vec<String>,
    /// Real points per chosen component.
    pub r: Vec<u32>,
    /// Pairs of complex conjugated points.
    pub m: u32,
    pub f: String,
    /// User assertion that `d` is big, nef and L-compatible; recorded but not checked.
    pub nef_asserted: bool,
}

impl ConfigSpec {
    pub fn new(d: HClass, chosen: Vec<String>, r: Vec<u32>, m: u32, f: impl Into<String>) -> Self {
        ConfigSpec {
            d,
            chosen,
            r,
            m,
            f: f.into(),
            nef_asserted: false,
        }
    }

    /// Builds a config whose `m` is solved from `c1.d + g - 1 = sum(r) + 2m`.
    /// Returns `None` when no non-negative integer `m` exists.
    pub fn with_inferred_m(
        model: &RealSurfaceModel,
        d: HClass,
        chosen: Vec<String>,
        r: Vec<u32>,
        f: impl Into<String>,
    ) -> Option<Self> {
        let g = chosen.len() as i64 - 1;
        let c1d = model.surface.c1_dot(&d).ok()?;
        let rest: BigInt = c1d + g - 1 - r.iter().map(|&x| i64::from(x)).sum::<i64>();
        if rest < BigInt::zero() || rest.is_odd() {
            return None;
        }
        let m = u32::try_from(rest / 2).ok()?;
        Some(ConfigSpec::new(d, chosen, r, m, f))
    }

    pub fn genus(&self) -> usize {
        self.chosen.len().saturating_sub(1)
    }
}

/// One checked condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub nef_asserted: bool,
}

impl ValidationReport {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        if self.nef_asserted {
            writeln!(f, "NOTE nef: asserted by the configuration, not checked")?;
        }
        Ok(())
    }
}

/// Checks the numeric admissibility conditions of `cfg` on `model`.
///
/// Failures are report entries; this never errors. When `sphere` is given, `d.[S] = 0` is
/// also checked.
pub fn validate_config(
    model: &RealSurfaceModel,
    cfg: &ConfigSpec,
    sphere: Option<&HClass>,
) -> ValidationReport {
    let mut report = ValidationReport {
        nef_asserted: cfg.nef_asserted,
        ..Default::default()
    };
    let surface = &model.surface;

    let mut problems = Vec::new();
    if cfg.d.lattice() != surface.lattice() {
        problems.push(format!("d lives in {}, surface is {}", cfg.d.lattice(), surface.lattice()));
    }
    if cfg.chosen.is_empty() {
        problems.push("no chosen component".into());
    }
    let distinct: BTreeSet<&String> = cfg.chosen.iter().collect();
    if distinct.len() != cfg.chosen.len() {
        problems.push("chosen components are not distinct".into());
    }
    for name in &cfg.chosen {
        if model.component(name).is_none() {
            problems.push(format!("unknown component `{name}`"));
        }
    }
    if cfg.r.len() != cfg.chosen.len() {
        problems.push(format!("r has {} entries for {} components", cfg.r.len(), cfg.chosen.len()));
    }
    if !problems.is_empty() {
        report.push("well_formed", false, problems.join("; "));
        return report;
    }
    report.push("well_formed", true, format!("g = {}", cfg.genus()));

    let g = BigInt::from(cfg.genus());
    let lsqs: Vec<u8> = cfg
        .chosen
        .iter()
        .map(|n| model.component(n).map(|c| c.rule.lsq(&cfg.d)).unwrap_or(0))
        .collect();
    let lsq_sum: u32 = lsqs.iter().map(|&x| u32::from(x)).sum();

    let ga = match surface.arithmetic_genus(&cfg.d) {
        Ok(ga) => ga,
        Err(e) => {
            report.push("genus_bound", false, e.to_string());
            return report;
        }
    };
    report.push(
        "genus_bound",
        ga >= g,
        format!("(d^2 - c1.d)/2 + 1 = {ga} >= g = {g}"),
    );

    let c1d = surface.c1_dot(&cfg.d).expect("lattice checked above");
    let degree_rhs = &g + 1 - lsq_sum;
    report.push(
        "degree_bound",
        c1d >= degree_rhs,
        format!("c1.d = {c1d} >= g + 1 - sum l^2 = {degree_rhs}"),
    );

    let lhs = &c1d + &g - 1;
    let rhs = BigInt::from(cfg.r.iter().map(|&x| u64::from(x)).sum::<u64>()) + 2 * cfg.m;
    report.push(
        "point_count",
        lhs == rhs,
        format!("c1.d + g - 1 = {lhs}, sum r + 2m = {rhs}"),
    );

    for ((name, &ri), &l2) in cfg.chosen.iter().zip(&cfg.r).zip(&lsqs) {
        let want = (l2 + 1) % 2;
        report.push(
            format!("parity[{name}]"),
            ri % 2 == u32::from(want),
            format!("r = {ri}, l^2 + 1 = {} (mod 2)", want),
        );
    }

    let chosen: BTreeSet<&str> = cfg.chosen.iter().map(String::as_str).collect();
    let bad: Vec<&str> = model
        .components
        .iter()
        .filter(|c| !chosen.contains(c.name.as_str()))
        .filter(|c| c.rule.trace_class(&cfg.d).iter().any(|&b| b))
        .map(|c| c.name.as_str())
        .collect();
    report.push(
        "l_compatible",
        bad.is_empty(),
        if bad.is_empty() {
            "trace vanishes on every unchosen component".to_string()
        } else {
            format!("non-zero trace on unchosen {}", bad.join(","))
        },
    );

    let excluded = surface.is_exceptional_multiple(&cfg.d);
    report.push(
        "not_exceptional_multiple",
        !excluded,
        if excluded {
            format!("d = {} is a multiple of an exceptional class", cfg.d)
        } else {
            "d != l[E_i]".to_string()
        },
    );

    if let Some(s) = sphere {
        match cfg.d.pair(s) {
            Ok(ds) => report.push("sphere_orthogonal", ds.is_zero(), format!("d.[S] = {ds}")),
            Err(e) => report.push("sphere_orthogonal", false, e.to_string()),
        }
    }
    report
}

/// Checks that `y` surgers along `s` onto `x`.
pub fn surgery_check(
    x: &RealSurfaceModel,
    y: &RealSurfaceModel,
    s: &HClass,
) -> Result<ValidationReport, RealModelError> {
    if x.lattice() != y.lattice() {
        return Err(PicardError::LatticeMismatch {
            expected: x.lattice(),
            found: y.lattice(),
        }
        .into());
    }
    if s.lattice() != x.lattice() {
        return Err(PicardError::LatticeMismatch {
            expected: x.lattice(),
            found: s.lattice(),
        }
        .into());
    }
    let mut report = ValidationReport::default();
    let s2 = s.self_intersection();
    report.push("sphere_self_intersection", s2 == BigInt::from(-2), format!("[S]^2 = {s2}"));

    let c1s = y.surface.c1_dot(s)?;
    report.push("sphere_c1_orthogonal", c1s.is_zero(), format!("c1.[S] = {c1s}"));

    let (chi_x, chi_y) = (x.euler_characteristic(), y.euler_characteristic());
    report.push(
        "euler_characteristic",
        chi_y == chi_x + 2,
        format!("chi(RY) = {chi_y}, chi(RX) + 2 = {}", chi_x + 2),
    );

    let signature = |m: &RealSurfaceModel| -> Vec<(String, String)> {
        m.components.iter().map(|c| (c.name.clone(), c.topology.to_string())).collect()
    };
    let xs = signature(x);
    let ys = signature(y);
    let extra_sphere = ys
        .iter()
        .enumerate()
        .filter(|(_, c)| c.1 == ComponentTopology::Sphere.to_string())
        .any(|(i, _)| {
            let mut rest = ys.clone();
            rest.remove(i);
            rest == xs
        });
    report.push(
        "components",
        extra_sphere,
        format!(
            "RY = [{}], RX = [{}]",
            ys.iter().map(|c| format!("{}:{}", c.0, c.1)).collect::<Vec<_>>().join(" "),
            xs.iter().map(|c| format!("{}:{}", c.0, c.1)).collect::<Vec<_>>().join(" ")
        ),
    );
    Ok(report)
}

/// A set of real surface models read from a model file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelSet {
    models: BTreeMap<String, RealSurfaceModel>,
}

impl ModelSet {
    pub fn get(&self, id: &str) -> Result<&RealSurfaceModel, RealModelError> {
        self.models
            .get(id)
            .ok_or_else(|| RealModelError::UnknownSurface(id.to_string()))
    }

    pub fn insert(&mut self, model: RealSurfaceModel) {
        self.models.insert(model.id().to_string(), model);
    }

    pub fn iter(&self) -> impl Iterator<Item = &RealSurfaceModel> {
        self.models.values()
    }

    /// All declared `(Y, X, S)` surgery triples.
    pub fn surgeries(&self) -> Vec<(&RealSurfaceModel, &RealSurfaceModel, &HClass)> {
        let mut out = Vec::new();
        for y in self.models.values() {
            for link in &y.surgery_links {
                if link.direction == SurgeryDirection::ToPartner {
                    if let Some(x) = self.models.get(&link.partner) {
                        out.push((y, x, &link.sphere));
                    }
                }
            }
        }
        out
    }

    /// The partner `X` and sphere class for surface `y_id`.
    pub fn surgery_target(&self, y_id: &str) -> Result<(&RealSurfaceModel, &HClass), RealModelError> {
        let y = self.get(y_id)?;
        let link = y
            .surgery_links
            .iter()
            .find(|l| l.direction == SurgeryDirection::ToPartner)
            .ok_or_else(|| RealModelError::UnknownSurface(format!("surgery target of {y_id}")))?;
        Ok((self.get(&link.partner)?, &link.sphere))
    }

    pub fn parse(text: &str) -> Result<ModelSet, RealModelError> {
        let mut set = ModelSet::default();
        let mut order: Vec<String> = Vec::new();
        let mut current: Option<String> = None;
        let mut surgeries = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |message: String| RealModelError::Parse { line: line_no, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (directive, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match directive {
                "surface" => {
                    let mut parts = rest.split_whitespace();
                    let id = parts.next().ok_or_else(|| err("surface needs an id".into()))?;
                    let lattice = parts
                        .next()
                        .and_then(|p| p.strip_prefix("lattice="))
                        .ok_or_else(|| err("expected lattice=<kind>".into()))?
                        .parse::<LatticeKind>()
                        .map_err(|e| err(e.to_string()))?;
                    if parts.next().is_some() {
                        return Err(err("trailing tokens after lattice".into()));
                    }
                    if set.models.contains_key(id) {
                        return Err(err(format!("surface `{id}` declared twice")));
                    }
                    set.insert(RealSurfaceModel::new(SurfaceModel::standard(id, lattice)));
                    order.push(id.to_string());
                    current = Some(id.to_string());
                }
                "c1" => {
                    let id = current.clone().ok_or_else(|| err("c1 before any surface".into()))?;
                    let model = set.models.get_mut(&id).expect("current surface exists");
                    let c1 = HClass::parse(rest, model.lattice()).map_err(|e| err(e.to_string()))?;
                    model.surface = SurfaceModel::with_c1(id, c1);
                }
                "component" => {
                    let id = current.clone().ok_or_else(|| err("component before any surface".into()))?;
                    let model = set.models.get_mut(&id).expect("current surface exists");
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() != 4 {
                        return Err(err("expected: component <name> <topology> M=<rows> A=<rows>".into()));
                    }
                    let topology = parts[1].parse::<ComponentTopology>().map_err(err)?;
                    let trace = parts[2]
                        .strip_prefix("M=")
                        .ok_or_else(|| err("expected M=<rows>".into()))
                        .and_then(|s| parse_bit_rows(s).map_err(err))?;
                    let form = parts[3]
                        .strip_prefix("A=")
                        .ok_or_else(|| err("expected A=<rows>".into()))
                        .and_then(|s| parse_bit_rows(s).map_err(err))?;
                    let rule = ParityRule::new(trace, form, model.lattice().rank()).map_err(err)?;
                    model
                        .add_component(parts[0], topology, rule)
                        .map_err(|e| err(e.to_string()))?;
                }
                "surgery" => {
                    let (ids, class) = rest
                        .split_once("S=")
                        .ok_or_else(|| err("expected: surgery <Y> -> <X> S=<class>".into()))?;
                    let ids: Vec<&str> = ids.split_whitespace().collect();
                    if ids.len() != 3 || ids[1] != "->" {
                        return Err(err("expected: surgery <Y> -> <X> S=<class>".into()));
                    }
                    surgeries.push((line_no, ids[0].to_string(), ids[2].to_string(), class.trim().to_string()));
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }

        for (line, y, x, class) in surgeries {
            let err = |message: String| RealModelError::Parse { line, message };
            let lattice = set.get(&y).map_err(|e| err(e.to_string()))?.lattice();
            set.get(&x).map_err(|e| err(e.to_string()))?;
            let sphere = HClass::parse(&class, lattice).map_err(|e| err(e.to_string()))?;
            set.models.get_mut(&y).unwrap().surgery_links.push(SurgeryLink {
                partner: x.clone(),
                sphere: sphere.clone(),
                direction: SurgeryDirection::ToPartner,
            });
            set.models.get_mut(&x).unwrap().surgery_links.push(SurgeryLink {
                partner: y,
                sphere,
                direction: SurgeryDirection::FromPartner,
            });
        }
        Ok(set)
    }
}

fn parse_bit_rows(s: &str) -> Result<Vec<Vec<bool>>, String> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|row| {
            row.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(format!("bad bit `{other}` in `{row}`")),
                })
                .collect()
        })
        .collect()
}
