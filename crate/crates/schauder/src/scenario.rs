//! Scenario files: schema, parsing and reference resolution.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! schema_version = 1
//! name = "diag-half"
//! basis = "canonical"            # preset name or inline table
//! metric = "l2"                  # or "sup_partial_sum"
//! operator = "diag-half"         # preset name or inline table
//!
//! [elements]
//! x = "geo-half"
//! y = { coeffs = [1.0, -2.0] }
//!
//! [[suite]]
//! check = "prop21"
//! x = "x"
//! n = 5
//! m = 8
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use schauder_core::delay_ode::{DelayScenario, ScalarRule};
use schauder_core::{BasisSpec, Element, MetricKind, OperatorSpec};
use serde::Deserialize;

use crate::presets;

/// Schema version this build reads.
pub const SCHEMA_VERSION: u32 = 1;

/// Configuration problems; all map to exit status 2.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("unsupported schema_version {found} (this build reads {SCHEMA_VERSION})")]
    SchemaVersion { found: u32 },
    #[error("unknown {category} `{name}`")]
    Unresolved {
        category: &'static str,
        name: String,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Preset name or inline value.
#[derive(Clone, Debug)]
pub enum Ref<T> {
    Named(String),
    Inline(T),
}

// Hand-rolled rather than `untagged` so validation errors of the inline
// form reach the user instead of "did not match any variant".
impl<'de, T: serde::de::DeserializeOwned> Deserialize<'de> for Ref<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match toml::Value::deserialize(d)? {
            toml::Value::String(s) => Ok(Ref::Named(s)),
            v => T::deserialize(v)
                .map(Ref::Inline)
                .map_err(serde::de::Error::custom),
        }
    }
}

/// Inclusive integer range or explicit list.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum IndexRange {
    List(Vec<usize>),
    Span {
        from: usize,
        to: usize,
        #[serde(default = "one")]
        step: usize,
    },
}

fn one() -> usize {
    1
}

impl IndexRange {
    pub fn values(&self) -> Vec<usize> {
        match self {
            IndexRange::List(v) => v.clone(),
            IndexRange::Span { from, to, step } => (*from..=*to).step_by((*step).max(1)).collect(),
        }
    }
}

/// Seeded random sample set.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "yes")]
    pub tails: bool,
}

fn default_radius() -> f64 {
    1.0
}

fn default_dim() -> usize {
    6
}

fn yes() -> bool {
    true
}

fn default_epsilon() -> f64 {
    1e-2
}

fn default_threshold() -> f64 {
    1e-6
}

fn default_k() -> usize {
    1
}

/// One suite entry.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum SuiteEntry {
    /// Distance table over an `(n, m)` grid; writes CSV/JSON, emits no check.
    Grid {
        x: String,
        y: String,
        n: IndexRange,
        m: IndexRange,
    },
    Constants {
        x: String,
        #[serde(default)]
        y: Option<String>,
        m: IndexRange,
    },
    Prop21 {
        x: String,
        n: usize,
        m: usize,
    },
    Thm22I {
        x: String,
        #[serde(default = "default_k")]
        k: usize,
        n: usize,
        m_max: usize,
    },
    Thm22Ii {
        x: String,
        #[serde(default = "default_k")]
        k: usize,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        n_max: usize,
        m_max: usize,
    },
    Thm22Iii {
        x: String,
        #[serde(default = "default_k")]
        k: usize,
        n_max: usize,
        m_max: usize,
    },
    SolveFixedPoint {
        x: String,
        epsilon: f64,
        domain: SampleSpec,
    },
    Thm31Ii {
        epsilon: f64,
        domain: SampleSpec,
        n_max: usize,
        m_max: usize,
    },
    Thm31Iii {
        epsilon: f64,
        domain: SampleSpec,
        #[serde(default = "default_window")]
        window: usize,
    },
    Thm32Bound {
        x: String,
        y: String,
        n_max: usize,
        m: IndexRange,
    },
    Thm32Ratios {
        x: String,
        y: String,
        horizon: usize,
    },
    Thm32Subset {
        elements: Vec<String>,
        #[serde(default)]
        tag: Option<String>,
        m: usize,
        horizon: usize,
    },
    Prop23 {
        m: usize,
    },
    Contraction {
        samples: usize,
        seed: u64,
    },
    DelayStrips {
        #[serde(default = "default_threshold")]
        threshold: f64,
    },
    DelayTruncation {
        #[serde(default = "default_threshold")]
        threshold: f64,
    },
}

fn default_window() -> usize {
    8
}

impl SuiteEntry {
    /// Entries that read the operator.
    fn needs_operator(&self) -> bool {
        !matches!(
            self,
            SuiteEntry::Constants { .. }
                | SuiteEntry::DelayStrips { .. }
                | SuiteEntry::DelayTruncation { .. }
        )
    }

    fn needs_delay(&self) -> bool {
        matches!(
            self,
            SuiteEntry::DelayStrips { .. } | SuiteEntry::DelayTruncation { .. }
        )
    }

    fn element_names(&self) -> Vec<&str> {
        match self {
            SuiteEntry::Grid { x, y, .. }
            | SuiteEntry::Thm32Bound { x, y, .. }
            | SuiteEntry::Thm32Ratios { x, y, .. } => vec![x, y],
            SuiteEntry::Constants { x, y, .. } => {
                let mut v = vec![x.as_str()];
                v.extend(y.as_deref());
                v
            }
            SuiteEntry::Prop21 { x, .. }
            | SuiteEntry::Thm22I { x, .. }
            | SuiteEntry::Thm22Ii { x, .. }
            | SuiteEntry::Thm22Iii { x, .. }
            | SuiteEntry::SolveFixedPoint { x, .. } => vec![x],
            SuiteEntry::Thm32Subset { elements, .. } => {
                elements.iter().map(String::as_str).collect()
            }
            _ => vec![],
        }
    }
}

/// Delay ODE section: a preset, optionally with overrides, or inline fields.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelaySection {
    pub preset: Option<String>,
    pub a: Option<f64>,
    pub a0: Option<Ref<ScalarRule>>,
    pub lambda_fn: Option<Ref<ScalarRule>>,
    pub h: Option<f64>,
    #[serde(alias = "t_s")]
    pub sample_period: Option<f64>,
    pub phi: Option<Ref<ScalarRule>>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
}

/// Output location and format switches.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default = "yes")]
    pub json: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: None,
            csv: true,
            json: true,
        }
    }
}

/// File contents before resolution.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub basis: Option<Ref<BasisSpec>>,
    #[serde(default)]
    pub metric: MetricKind,
    #[serde(default)]
    pub operator: Option<Ref<OperatorSpec>>,
    #[serde(default)]
    pub elements: BTreeMap<String, Ref<Element>>,
    #[serde(default)]
    pub suite: Vec<SuiteEntry>,
    #[serde(default)]
    pub delay: Option<DelaySection>,
    #[serde(default)]
    pub output: OutputSection,
}

/// Scenario with every reference resolved.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub basis: BasisSpec,
    pub metric: MetricKind,
    pub operator: Option<OperatorSpec>,
    pub elements: BTreeMap<String, Element>,
    pub suite: Vec<SuiteEntry>,
    pub delay: Option<DelayScenario>,
    pub output: OutputSection,
}

impl Scenario {
    pub fn element(&self, name: &str) -> &Element {
        &self.elements[name]
    }
}

fn resolve<T>(
    r: Ref<T>,
    category: &'static str,
    lookup: impl Fn(&str) -> Option<T>,
) -> Result<T, ConfigError> {
    match r {
        Ref::Inline(v) => Ok(v),
        Ref::Named(name) => lookup(&name).ok_or(ConfigError::Unresolved { category, name }),
    }
}

fn resolve_delay(d: DelaySection) -> Result<DelayScenario, ConfigError> {
    let base = match &d.preset {
        Some(name) => Some(presets::delay(name).ok_or_else(|| ConfigError::Unresolved {
            category: "delay preset",
            name: name.clone(),
        })?),
        None => None,
    };
    let rule =
        |r: Option<Ref<ScalarRule>>, field: &'static str, fallback: Option<&ScalarRule>| match r {
            Some(r) => resolve(r, "function", presets::function),
            None => fallback
                .cloned()
                .ok_or_else(|| ConfigError::Invalid(format!("delay: missing `{field}`"))),
        };
    let num = |v: Option<f64>, field: &'static str, fallback: Option<f64>| {
        v.or(fallback)
            .ok_or_else(|| ConfigError::Invalid(format!("delay: missing `{field}`")))
    };
    let b = base.as_ref();
    let s = DelayScenario {
        a: num(d.a, "a", b.map(|s| s.a))?,
        a0: rule(d.a0, "a0", b.map(|s| &s.a0))?,
        lambda_fn: rule(d.lambda_fn, "lambda_fn", b.map(|s| &s.lambda_fn))?,
        h: num(d.h, "h", b.map(|s| s.h))?,
        sample_period: num(d.sample_period, "sample_period", b.map(|s| s.sample_period))?,
        phi: rule(d.phi, "phi", b.map(|s| &s.phi))?,
        dt: num(d.dt, "dt", b.map(|s| s.dt))?,
        horizon: num(d.horizon, "horizon", b.map(|s| s.horizon))?,
    };
    s.validate()
        .map_err(|e| ConfigError::Invalid(format!("delay: {e}")))?;
    Ok(s)
}

/// Parses and resolves scenario text; `path` only labels diagnostics.
pub fn parse(text: &str, path: &Path) -> Result<Scenario, ConfigError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(ConfigError::SchemaVersion {
            found: file.schema_version,
        });
    }
    if file.suite.is_empty() {
        return Err(ConfigError::Invalid(
            "suite is empty; nothing to run".into(),
        ));
    }
    let basis = match file.basis {
        Some(b) => resolve(b, "basis", presets::basis)?,
        None => BasisSpec::Canonical,
    };
    let operator = file
        .operator
        .map(|o| resolve(o, "operator", presets::operator))
        .transpose()?;
    let mut elements = BTreeMap::new();
    for (name, r) in file.elements {
        elements.insert(name, resolve(r, "element", presets::element)?);
    }
    let delay = file.delay.map(resolve_delay).transpose()?;

    for (i, entry) in file.suite.iter().enumerate() {
        let at = |msg: String| ConfigError::Invalid(format!("suite[{i}]: {msg}"));
        if entry.needs_operator() && operator.is_none() {
            return Err(at("needs an `operator`".into()));
        }
        if entry.needs_delay() && delay.is_none() {
            return Err(at("needs a `[delay]` section".into()));
        }
        for name in entry.element_names() {
            if !elements.contains_key(name) {
                // bare preset names are accepted as element references
                match presets::element(name) {
                    Some(e) => {
                        elements.insert(name.to_string(), e);
                    }
                    None => {
                        return Err(ConfigError::Unresolved {
                            category: "element",
                            name: name.to_string(),
                        })
                    }
                }
            }
        }
        match entry {
            SuiteEntry::Grid { n, m, .. } => {
                if n.values().is_empty() || m.values().is_empty() {
                    return Err(at("empty n or m range".into()));
                }
            }
            SuiteEntry::Thm32Bound { n_max: 0, .. } => {
                return Err(at("n_max must be positive".into()))
            }
            SuiteEntry::Constants { m, .. } | SuiteEntry::Thm32Bound { m, .. } => {
                if m.values().is_empty() {
                    return Err(at("empty m range".into()));
                }
            }
            SuiteEntry::Thm32Subset { elements, .. } if elements.len() < 2 => {
                return Err(at("subset needs at least two elements".into()));
            }
            SuiteEntry::Thm22I { m_max: 0, .. }
            | SuiteEntry::Thm22Ii { m_max: 0, .. }
            | SuiteEntry::Thm22Iii { m_max: 0, .. }
            | SuiteEntry::Thm31Ii { m_max: 0, .. } => {
                return Err(at("m_max must be positive".into()))
            }
            SuiteEntry::Thm22Ii { n_max: 0, .. }
            | SuiteEntry::Thm22Iii { n_max: 0, .. }
            | SuiteEntry::Thm31Ii { n_max: 0, .. } => {
                return Err(at("n_max must be positive".into()))
            }
            SuiteEntry::SolveFixedPoint { domain, .. }
            | SuiteEntry::Thm31Ii { domain, .. }
            | SuiteEntry::Thm31Iii { domain, .. }
                if domain.count == 0 =>
            {
                return Err(at("domain needs at least one sample".into()));
            }
            _ => {}
        }
    }

    Ok(Scenario {
        name: file.name,
        basis,
        metric: file.metric,
        operator,
        elements,
        suite: file.suite,
        delay,
        output: file.output,
    })
}

/// Reads and parses a scenario file.
pub fn load(path: &Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text, path)
}
