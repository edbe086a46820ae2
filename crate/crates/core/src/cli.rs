//! Command-line front end. [`run`] is pure: it returns the exit code and both output streams.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use crate::combin::{check_identities, CombinError};
use crate::engine::{
    classify_quadric, compose_check, correspondence, genus_decreasing, invert_relative, truncation_bound,
    unscrew_relation, wall_cross, Degeneration, EngineError, Incidence, Mode, RelationResult, TangencyVector,
};
use crate::fixtures;
use crate::picard::{HClass, LatticeKind, PicardError};
use crate::realmodel::{surgery_check, validate_config, ConfigSpec, ModelSet, RealModelError, ValidationReport};
use crate::store::{load_table, InvariantTable, StoreError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_MISSING: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Parser)]
#[command(name = "welschinger", version, about = "Exact relations among real enumerative invariants")]
struct Cli {
    /// Tab-separated rows only.
    #[arg(long, global = true)]
    tsv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct TableArgs {
    /// Model file; the shipped models when omitted.
    #[arg(long)]
    models: Option<PathBuf>,
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    d: String,
    /// Point counts, e.g. `(5,1)`.
    #[arg(long)]
    r: String,
    /// Chosen components, e.g. `(RP2,S)`.
    #[arg(long = "L")]
    l: Option<String>,
    #[arg(long = "F", default_value = "0")]
    f: String,
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the u/v identities up to N.
    Identities {
        #[arg(long, default_value_t = 60)]
        max: u64,
    },
    /// Genus-decreasing relation across a surgery Y -> X.
    Gdf {
        #[command(flatten)]
        t: TableArgs,
        #[arg(long = "Y")]
        y: String,
        /// Vanishing class; the one recorded in the model file when omitted.
        #[arg(long = "S")]
        s: Option<String>,
    },
    /// Absolute value from relative ones.
    Correspond {
        #[command(flatten)]
        t: TableArgs,
        #[arg(long = "X")]
        x: String,
        #[arg(long = "Z")]
        z: String,
        #[arg(long = "E")]
        e: String,
    },
    /// Relative value from absolute ones.
    Invert {
        #[command(flatten)]
        t: TableArgs,
        #[arg(long = "X")]
        x: String,
        #[arg(long = "Z")]
        z: String,
        #[arg(long = "E")]
        e: String,
    },
    /// Unscrewing along a (-2)-class E.
    Unscrew {
        #[command(flatten)]
        t: TableArgs,
        #[arg(long = "Z")]
        z: String,
        #[arg(long = "E")]
        e: String,
    },
    /// Largest k with genus(d - k*mult*step) >= g.
    Bound {
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(long)]
        surface: String,
        #[arg(long)]
        d: String,
        #[arg(long)]
        step: String,
        #[arg(long, default_value_t = 1)]
        mult: u64,
        #[arg(long, allow_hyphen_values = true)]
        g: i64,
    },
    /// W(d, r+2) = W(d, r) + 2 W'.
    Wallcross {
        #[arg(long, allow_hyphen_values = true)]
        value: BigInt,
        #[arg(long, allow_hyphen_values = true)]
        correction: BigInt,
    },
    /// Classify curves in the quadric with given contacts to E = l1 + l2.
    ClassifyQuadric {
        #[arg(long)]
        d: String,
        #[arg(long, default_value = "0")]
        alpha: String,
        #[arg(long, default_value = "0")]
        beta: String,
        #[arg(long = "off-e", default_value_t = 0)]
        off_e: u32,
    },
    /// Validate configurations, or every surgery in the model file.
    Validate {
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Compose unscrewing with the inverted correspondence symbolically.
    ComposeCheck {
        #[arg(long, default_value_t = 40)]
        depth: u64,
    },
    /// Reproduce a shipped worked example.
    Reproduce {
        #[arg(long)]
        example: u8,
    },
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Missing(String),
    Parse(String),
    Precondition(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Missing(_) => EXIT_MISSING,
            Failure::Parse(_) => EXIT_PARSE,
            Failure::Precondition(_) => EXIT_PRECONDITION,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Missing(m) | Failure::Parse(m) | Failure::Precondition(m) => m,
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let msg = e.to_string();
        match e {
            EngineError::MissingEntry(_) => Failure::Missing(msg),
            EngineError::Picard(_) | EngineError::Store(_) => Failure::Parse(msg),
            EngineError::RealModel(inner) => Failure::from(inner),
            EngineError::PreconditionFailed(_)
            | EngineError::OddPairing(_)
            | EngineError::ExcludedClass(_)
            | EngineError::TangencyMismatch { .. }
            | EngineError::Unbounded(_) => Failure::Precondition(msg),
        }
    }
}

impl From<RealModelError> for Failure {
    fn from(e: RealModelError) -> Self {
        match e {
            RealModelError::UnknownComponent(_) | RealModelError::UnknownSurface(_) => Failure::Precondition(e.to_string()),
            _ => Failure::Parse(e.to_string()),
        }
    }
}

impl From<PicardError> for Failure {
    fn from(e: PicardError) -> Self {
        Failure::Parse(e.to_string())
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        Failure::Parse(e.to_string())
    }
}

impl From<CombinError> for Failure {
    fn from(e: CombinError) -> Self {
        Failure::Precondition(e.to_string())
    }
}

struct Out {
    tsv: bool,
    stdout: String,
    stderr: String,
}

impl Out {
    fn line(&mut self, s: impl AsRef<str>) {
        self.stdout.push_str(s.as_ref());
        self.stdout.push('\n');
    }

    fn warn(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.stderr, "warning: {}", s.as_ref());
    }

    /// Human: `label value`. TSV: `label\tvalue`.
    fn field(&mut self, label: &str, value: impl std::fmt::Display) {
        let sep = if self.tsv { '\t' } else { ' ' };
        self.line(format!("{label}{sep}{value}"));
    }

    fn relation(&mut self, res: &RelationResult) {
        for w in &res.warnings {
            self.warn(w);
        }
        let bound = res.bound.map_or("none".to_string(), |b| b.to_string());
        if self.tsv {
            self.line(format!("TARGET\t{}\tbound={}", res.target, bound));
        } else {
            self.line(format!("{}  (k <= {})", res.target, bound));
        }
        for t in &res.terms {
            let value = t.resolved.as_ref().map_or("missing".to_string(), |v| v.to_string());
            let source = t.source.clone().unwrap_or_default();
            if self.tsv {
                self.line(format!("{}\t{}\t{}\t{}\t{}", t.k, t.coefficient, t.key, value, source));
            } else {
                self.line(format!("  k={} coeff={} {} = {}  [{}]", t.k, t.coefficient, t.key, value, source));
            }
        }
        match &res.value {
            Some(v) => self.field("RESULT", v),
            None => self.field("RESULT", "undefined"),
        }
    }

    fn report(&mut self, title: &str, r: &ValidationReport) {
        self.line(format!("# {title}"));
        for c in &r.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            if self.tsv {
                self.line(format!("{status}\t{}\t{}", c.name, c.detail));
            } else {
                self.line(format!("{status} {} ({})", c.name, c.detail));
            }
        }
        for w in &r.warnings {
            self.warn(format!("{title}: {w}"));
        }
    }
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_PARSE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut out = Out {
        tsv: cli.tsv,
        stdout: String::new(),
        stderr: String::new(),
    };
    let code = match dispatch(cli.command, &mut out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(out.stderr, "error: {}", f.message());
            f.code()
        }
    };
    Outcome {
        code,
        stdout: out.stdout,
        stderr: out.stderr,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn load_models(path: Option<&Path>) -> Result<ModelSet, Failure> {
    match path {
        None => Ok(fixtures::models()),
        Some(p) => Ok(ModelSet::parse(&read(p)?)?),
    }
}

fn parse_list(text: &str) -> Vec<String> {
    text.trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_r(text: &str) -> Result<Vec<u32>, Failure> {
    parse_list(text)
        .iter()
        .map(|s| s.parse().map_err(|_| Failure::Parse(format!("bad point count `{s}` in {text}"))))
        .collect()
}

fn incidence(t: &TableArgs, default_components: impl FnOnce() -> Vec<String>) -> Result<Incidence, Failure> {
    let components = t.l.as_deref().map_or_else(default_components, parse_list);
    Ok(Incidence::new(components, parse_r(&t.r)?, t.f.clone()))
}

fn mode(strict: bool) -> Mode {
    if strict {
        Mode::Strict
    } else {
        Mode::Lenient
    }
}

fn finish_relation(out: &mut Out, res: &RelationResult) -> Result<(), Failure> {
    out.relation(res);
    res.require_value()?;
    Ok(())
}

fn table_from(path: &Path) -> Result<InvariantTable, Failure> {
    Ok(load_table(path)?)
}

fn dispatch(command: Command, out: &mut Out) -> Result<(), Failure> {
    match command {
        Command::Identities { max } => {
            let report = check_identities(max)?;
            for line in report.to_string().lines() {
                out.line(if out.tsv { line.replacen(' ', "\t", 1) } else { line.to_string() });
            }
            if !report.passed() {
                return Err(Failure::Validation("identity check failed".into()));
            }
        }
        Command::Gdf { t, y, s } => {
            let models = load_models(t.models.as_deref())?;
            let table = table_from(&t.table)?;
            let ym = models.get(&y)?;
            let (xm, recorded) = models.surgery_target(&y)?;
            let s = match s {
                Some(text) => ym.surface.parse_class(&text)?,
                None => recorded.clone(),
            };
            let d = ym.surface.parse_class(&t.d)?;
            let inc = incidence(&t, || {
                let mut names: Vec<String> = ym
                    .components
                    .iter()
                    .filter(|c| xm.component(&c.name).is_some())
                    .map(|c| c.name.clone())
                    .collect();
                names.extend(ym.components.iter().filter(|c| xm.component(&c.name).is_none()).map(|c| c.name.clone()));
                names
            })?;
            let res = genus_decreasing(&table, ym, xm, &d, &s, &inc, mode(t.strict))?;
            finish_relation(out, &res)?;
        }
        Command::Correspond { t, x, z, e } => relative_pair(out, &t, &x, &z, &e, false)?,
        Command::Invert { t, x, z, e } => relative_pair(out, &t, &x, &z, &e, true)?,
        Command::Unscrew { t, z, e } => {
            let models = load_models(t.models.as_deref())?;
            let table = table_from(&t.table)?;
            let zm = models.get(&z)?;
            let e = zm.surface.parse_class(&e)?;
            let d = zm.surface.parse_class(&t.d)?;
            let inc = incidence(&t, || zm.components.iter().map(|c| c.name.clone()).collect())?;
            let res = unscrew_relation(&table, &zm.surface, &d, &e, &inc, mode(t.strict))?;
            finish_relation(out, &res)?;
        }
        Command::Bound {
            models,
            surface,
            d,
            step,
            mult,
            g,
        } => {
            let models = load_models(models.as_deref())?;
            let sm = &models.get(&surface)?.surface;
            let d = sm.parse_class(&d)?;
            let step = sm.parse_class(&step)?;
            match truncation_bound(sm, &d, &step, mult, g)? {
                Some(k) => out.field("RESULT", k),
                None => out.field("RESULT", "none"),
            }
        }
        Command::Wallcross { value, correction } => {
            out.field("RESULT", wall_cross(&value, &correction));
        }
        Command::ClassifyQuadric { d, alpha, beta, off_e } => {
            let d = HClass::parse(&d, LatticeKind::Quadric)?;
            let alpha: TangencyVector = alpha.parse().map_err(Failure::Parse)?;
            let beta: TangencyVector = beta.parse().map_err(Failure::Parse)?;
            let c = classify_quadric(&d, &alpha, &beta, off_e)?;
            out.field("RESULT", c);
        }
        Command::Validate { models, config } => {
            let models = load_models(models.as_deref())?;
            let mut all_passed = true;
            match config {
                Some(path) => {
                    for (line_no, line) in read(&path)?.lines().enumerate() {
                        let line = line.split('#').next().unwrap_or("").trim();
                        if line.is_empty() {
                            continue;
                        }
                        let (surface, cfg, sphere) = parse_config_line(&models, line)
                            .map_err(|m| Failure::Parse(format!("{}:{}: {m}", path.display(), line_no + 1)))?;
                        let report = validate_config(models.get(&surface)?, &cfg, sphere.as_ref());
                        all_passed &= report.passed();
                        out.report(&format!("{surface} {line}"), &report);
                    }
                }
                None => {
                    for (y, x, s) in models.surgeries() {
                        let report = surgery_check(x, y, s)?;
                        all_passed &= report.passed();
                        out.report(&format!("surgery {} -> {}", y.id(), x.id()), &report);
                    }
                }
            }
            if !all_passed {
                return Err(Failure::Validation("validation failed".into()));
            }
        }
        Command::ComposeCheck { depth } => {
            let report = compose_check(depth)?;
            for i in 1..=depth {
                let c = report.series.get(i);
                if out.tsv {
                    out.line(format!("{i}\t{c}"));
                }
            }
            match report.first_bad {
                None => out.field("PASS", format!("coefficients equal (-1)^(i-1) i^2 for 1 <= i <= {depth}")),
                Some(i) => {
                    out.field("FAIL", format!("first mismatch at i = {i}"));
                    return Err(Failure::Validation(format!("composition differs at {i}")));
                }
            }
        }
        Command::Reproduce { example } => {
            let ex = fixtures::example(example)
                .ok_or_else(|| Failure::Precondition(format!("no shipped example {example}; use 1 or 2")))?;
            let rep = ex.reproduce(&fixtures::models())?;
            for w in &rep.warnings {
                out.warn(w);
            }
            for (_, res) in &rep.rows {
                for t in &res.terms {
                    let value = t.resolved.as_ref().map_or("missing".to_string(), |v| v.to_string());
                    if out.tsv {
                        out.line(format!("{}\t{}\t{}\t{}\t{}", t.k, t.coefficient, t.key, value, t.source.clone().unwrap_or_default()));
                    } else {
                        out.line(format!("  k={} coeff={} {} = {}", t.k, t.coefficient, t.key, value));
                    }
                }
                if !out.tsv {
                    out.line(format!("{}", res.target));
                }
                out.field("RESULT", res.require_value()?);
            }
            if !rep.matches() {
                return Err(Failure::Validation("reproduced values differ from the published table".into()));
            }
        }
    }
    Ok(())
}

fn relative_pair(out: &mut Out, t: &TableArgs, x: &str, z: &str, e: &str, invert: bool) -> Result<(), Failure> {
    let models = load_models(t.models.as_deref())?;
    let table = table_from(&t.table)?;
    let xm = models.get(x)?;
    let zm = models.get(z)?;
    let e = zm.surface.parse_class(e)?;
    let d = zm.surface.parse_class(&t.d)?;
    let inc = incidence(t, || zm.components.iter().map(|c| c.name.clone()).collect())?;
    let degen = Degeneration::new(&xm.surface, &zm.surface, e);
    let res = if invert {
        invert_relative(&table, &degen, &d, &inc, mode(t.strict))?
    } else {
        correspondence(&table, &degen, &d, &inc, mode(t.strict))?
    };
    finish_relation(out, &res)
}

/// `config <surface> d=<class> L=(..) r=(..) m=<int> F=<tag> [S=<class>] [nef=true]`
fn parse_config_line(models: &ModelSet, line: &str) -> Result<(String, ConfigSpec, Option<HClass>), String> {
    let mut words = line.split_whitespace();
    if words.next() != Some("config") {
        return Err("expected `config`".into());
    }
    let surface = words.next().ok_or("missing surface id")?.to_string();
    let model = models.get(&surface).map_err(|e| e.to_string())?;
    let (mut d, mut l, mut r, mut m, mut f, mut s, mut nef) = (None, None, None, None, "0".to_string(), None, false);
    for w in words {
        let (key, value) = w.split_once('=').ok_or_else(|| format!("expected key=value, got `{w}`"))?;
        match key {
            "d" => d = Some(model.surface.parse_class(value).map_err(|e| e.to_string())?),
            "S" => s = Some(model.surface.parse_class(value).map_err(|e| e.to_string())?),
            "L" => l = Some(parse_list(value)),
            "r" => r = Some(parse_r(value).map_err(|f| f.message().to_string())?),
            "m" => m = Some(value.parse::<u32>().map_err(|_| format!("bad m `{value}`"))?),
            "F" => f = value.to_string(),
            "nef" => nef = value == "true",
            other => return Err(format!("unknown field `{other}`")),
        }
    }
    let d = d.ok_or("missing d=")?;
    let l = l.ok_or("missing L=")?;
    let r = r.ok_or("missing r=")?;
    let mut cfg = match m {
        Some(m) => ConfigSpec::new(d, l, r, m, f),
        None => ConfigSpec::with_inferred_m(model, d.clone(), l.clone(), r.clone(), f.clone())
            .unwrap_or_else(|| ConfigSpec::new(d, l, r, 0, f)),
    };
    cfg.nef_asserted = nef;
    Ok((surface, cfg, s))
}
