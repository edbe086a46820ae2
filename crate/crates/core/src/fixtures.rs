//! Shipped model file, base tables and the two worked degree-2 examples.

use num_bigint::BigInt;

use crate::engine::{genus_decreasing, EngineError, Incidence, Mode, RelationResult};
use crate::picard::HClass;
use crate::realmodel::{validate_config, ConfigSpec, ModelSet};
use crate::store::InvariantTable;

pub const MODELS: &str = include_str!("../fixtures/models.wmod");
pub const EXAMPLE1_TABLE: &str = include_str!("../fixtures/example1.wtab");
pub const EXAMPLE2_TABLE: &str = include_str!("../fixtures/example2.wtab");

pub fn models() -> ModelSet {
    ModelSet::parse(MODELS).expect("shipped model file parses")
}

/// One worked example: a surgery `Y -> X` and the `Y`-side values it predicts.
#[derive(Clone, Copy, Debug)]
pub struct Example {
    pub number: u8,
    pub y: &'static str,
    pub table: &'static str,
    pub d: &'static str,
    /// Chosen components on `Y`, the surgery sphere last.
    pub components: [&'static str; 2],
    /// `(r0, expected W_Y(d, (r0, 1)))`.
    pub expected: &'static [(u32, i64)],
    /// `r0` under which the base `X`-table was published.
    pub published_x_r0: &'static [u32],
    /// Classes of the base `X`-table.
    pub x_classes: &'static [&'static str],
}

pub const EXAMPLE1: Example = Example {
    number: 1,
    y: "Y1",
    table: EXAMPLE1_TABLE,
    d: "(6;-2,-2,-2,-2,-2,-2)",
    components: ["RP2", "S"],
    expected: &[(5, 36), (3, 12), (1, -4)],
    published_x_r0: &[6, 4, 2],
    x_classes: &["(4;-1,-1,-1,-1,-1,-1)", "(2;0,0,0,0,0,0)"],
};

pub const EXAMPLE2: Example = Example {
    number: 2,
    y: "Y2",
    table: EXAMPLE2_TABLE,
    d: "(6;-2,-2,-2,-2,-2,-2,-2)",
    components: ["K", "S"],
    expected: &[(3, 12), (1, 8)],
    published_x_r0: &[3, 1],
    x_classes: &["(4;-1,-1,-1,-1,-1,-1,-2)", "(2;0,0,0,0,0,0,-2)"],
};

pub fn example(number: u8) -> Option<Example> {
    match number {
        1 => Some(EXAMPLE1),
        2 => Some(EXAMPLE2),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct Reproduction {
    pub example: Example,
    pub rows: Vec<(u32, RelationResult)>,
    pub warnings: Vec<String>,
}

impl Reproduction {
    /// Every computed value equals the published one.
    pub fn matches(&self) -> bool {
        self.rows.len() == self.example.expected.len()
            && self
                .rows
                .iter()
                .zip(self.example.expected)
                .all(|((_, res), (_, want))| res.value == Some(BigInt::from(*want)))
    }
}

impl Example {
    pub fn table(&self) -> InvariantTable {
        InvariantTable::parse(self.table).expect("shipped table parses")
    }

    pub fn incidence(&self, r0: u32) -> Incidence {
        Incidence::new(self.components.iter().map(|s| s.to_string()).collect(), vec![r0, 1], "0")
    }

    /// Checks the base table's configurations as published; failures become warnings.
    pub fn published_x_warnings(&self, models: &ModelSet) -> Vec<String> {
        let Ok((x, _)) = models.surgery_target(self.y) else {
            return vec![format!("no surgery target for {}", self.y)];
        };
        let mut out = Vec::new();
        for class in self.x_classes {
            let d = match x.surface.parse_class(class) {
                Ok(d) => d,
                Err(e) => {
                    out.push(format!("{class}: {e}"));
                    continue;
                }
            };
            for &r0 in self.published_x_r0 {
                let chosen = vec![self.components[0].to_string()];
                let cfg = ConfigSpec::with_inferred_m(x, d.clone(), chosen.clone(), vec![r0], "0")
                    .unwrap_or_else(|| ConfigSpec::new(d.clone(), chosen, vec![r0], 0, "0"));
                let report = validate_config(x, &cfg, None);
                for c in report.failures() {
                    out.push(format!(
                        "published {} row d={} r0={}: {} ({})",
                        x.id(),
                        d,
                        r0,
                        c.name,
                        c.detail
                    ));
                }
            }
        }
        out
    }

    pub fn reproduce(&self, models: &ModelSet) -> Result<Reproduction, EngineError> {
        let table = self.table();
        let y = models.get(self.y)?;
        let (x, s) = models.surgery_target(self.y)?;
        let d: HClass = y.surface.parse_class(self.d)?;
        let mut rows = Vec::new();
        let mut warnings = self.published_x_warnings(models);
        for &(r0, _) in self.expected {
            let res = genus_decreasing(&table, y, x, &d, s, &self.incidence(r0), Mode::Strict)?;
            warnings.extend(res.warnings.iter().cloned());
            rows.push((r0, res));
        }
        Ok(Reproduction {
            example: *self,
            rows,
            warnings,
        })
    }
}
