//! TOML run configuration.
//!
//! ```toml
//! dimension = 2
//! instance = "euclid_const_b"        # or a [metric] table
//! checks = ["eq12_star_metric"]      # omit for the default suite
//! jet_order = 4
//!
//! [metric]
//! base = "sqrt(y1^2 + y2^2)"
//! form = ["0.1", "0"]
//!
//! [sample]
//! count = 100
//! seed = 42
//! x_box = [[-0.5, 0.5], [-0.5, 0.5]]
//! y_scale = [0.5, 2.0]
//!
//! [tolerances]
//! eq14_N = 1e-8
//!
//! [geodesic]
//! x0 = [0.3, -0.1]
//! y0 = [0.8, 0.6]
//! t_end = 1.0
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use finsler_core::catalog::lookup;
use finsler_core::expr::parse_expression;
use finsler_core::geometry::MetricField;
use finsler_core::randers::{OneFormField, RandersBundle};
use finsler_core::verify::{default_suite, CheckSpec, Expectation, SamplePlan};
use serde::Deserialize;
use thiserror::Error;

pub const MIN_DIMENSION: usize = 2;
pub const MAX_DIMENSION: usize = 6;
pub const DEFAULT_JET_ORDER: usize = 4;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Syntax(String),
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error("seed required")]
    SeedRequired,
    #[error("invalid dimension {0}: expected {MIN_DIMENSION}..={MAX_DIMENSION}")]
    Dimension(usize),
    #[error("in `{field}`: {message}")]
    Expression { field: String, message: String },
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("instance `{id}` has dimension {actual}, config says {declared}")]
    DimensionMismatch {
        id: String,
        declared: usize,
        actual: usize,
    },
    #[error("set either `instance` or a [metric] table, not both")]
    AmbiguousMetric,
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: String, message: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dimension: Option<usize>,
    instance: Option<String>,
    checks: Option<Vec<String>>,
    jet_order: Option<usize>,
    metric: Option<RawMetric>,
    sample: Option<RawSample>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    geodesic: Option<GeodesicJob>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    base: String,
    form: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    count: Option<usize>,
    seed: Option<u64>,
    x_box: Option<Vec<(f64, f64)>>,
    y_scale: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicJob {
    pub x0: Vec<f64>,
    pub y0: Vec<f64>,
    pub t_end: f64,
    pub rtol: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dimension: usize,
    /// Catalog id, or `custom` for a [metric] table.
    pub instance: String,
    pub bundle: RandersBundle,
    pub plan: SamplePlan,
    pub checks: Vec<CheckSpec>,
    pub jet_order: usize,
    pub geodesic: Option<GeodesicJob>,
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let n = raw.dimension.ok_or(ConfigError::Missing("dimension"))?;
    if !(MIN_DIMENSION..=MAX_DIMENSION).contains(&n) {
        return Err(ConfigError::Dimension(n));
    }

    let (instance, bundle) = match (raw.instance, raw.metric) {
        (Some(_), Some(_)) => return Err(ConfigError::AmbiguousMetric),
        (None, None) => return Err(ConfigError::Missing("instance")),
        (Some(id), None) => {
            let entry = lookup(&id).ok_or_else(|| ConfigError::UnknownInstance(id.clone()))?;
            if entry.dimension != n {
                return Err(ConfigError::DimensionMismatch {
                    id,
                    declared: n,
                    actual: entry.dimension,
                });
            }
            let bundle = entry.bundle().map_err(|e| ConfigError::Expression {
                field: "instance".into(),
                message: e.to_string(),
            })?;
            (id, bundle)
        }
        (None, Some(m)) => ("custom".to_string(), custom_bundle(&m, n)?),
    };

    let sample = raw.sample.ok_or(ConfigError::SeedRequired)?;
    let seed = sample.seed.ok_or(ConfigError::SeedRequired)?;
    let count = sample.count.ok_or(ConfigError::Missing("sample.count"))?;
    let mut plan = SamplePlan::new(&instance, count, seed, n);
    if let Some(bx) = sample.x_box {
        if bx.len() != n || bx.iter().any(|(lo, hi)| !(lo <= hi)) {
            return Err(ConfigError::Invalid {
                field: "sample.x_box".into(),
                message: format!("expected {n} intervals [lo, hi] with lo <= hi"),
            });
        }
        plan.x_box = bx;
    }
    if let Some((lo, hi)) = sample.y_scale {
        if !(0.0 < lo && lo <= hi) {
            return Err(ConfigError::Invalid {
                field: "sample.y_scale".into(),
                message: "expected 0 < lo <= hi".into(),
            });
        }
        plan.y_scale = (lo, hi);
    }

    let ids: Vec<String> = match raw.checks {
        Some(ids) => ids,
        None => default_suite().iter().map(|id| id.to_string()).collect(),
    };
    let mut checks = ids
        .iter()
        .map(|id| CheckSpec::new(id).map_err(|_| ConfigError::UnknownCheck(id.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    for (id, tol) in &raw.tolerances {
        let spec = checks
            .iter_mut()
            .find(|c| &c.id == id)
            .ok_or_else(|| ConfigError::UnknownCheck(id.clone()))?;
        if !(*tol >= 0.0) {
            return Err(ConfigError::Invalid {
                field: format!("tolerances.{id}"),
                message: "tolerance must be non-negative".into(),
            });
        }
        spec.expectation = match spec.expectation {
            Expectation::AtMost(_) => Expectation::AtMost(*tol),
            Expectation::AtLeast(_) => Expectation::AtLeast(*tol),
        };
    }

    let jet_order = raw.jet_order.unwrap_or(DEFAULT_JET_ORDER);
    if !(3..=8).contains(&jet_order) {
        return Err(ConfigError::Invalid {
            field: "jet_order".into(),
            message: "expected 3..=8".into(),
        });
    }

    if let Some(g) = &raw.geodesic {
        if g.x0.len() != n || g.y0.len() != n {
            return Err(ConfigError::Invalid {
                field: "geodesic".into(),
                message: format!("x0 and y0 need {n} components"),
            });
        }
        if !(g.t_end > 0.0) {
            return Err(ConfigError::Invalid {
                field: "geodesic.t_end".into(),
                message: "must be positive".into(),
            });
        }
    }

    Ok(RunConfig {
        dimension: n,
        instance,
        bundle,
        plan,
        checks,
        jet_order,
        geodesic: raw.geodesic,
    })
}

fn custom_bundle(m: &RawMetric, n: usize) -> Result<RandersBundle, ConfigError> {
    let base = MetricField::parse(&m.base, n).map_err(|e| ConfigError::Expression {
        field: "metric.base".into(),
        message: e.to_string(),
    })?;
    if m.form.len() != n {
        return Err(ConfigError::Expression {
            field: "metric.form".into(),
            message: format!("expected {n} components, got {}", m.form.len()),
        });
    }
    let components = m
        .form
        .iter()
        .enumerate()
        .map(|(i, src)| {
            parse_expression(src, n).map_err(|e| ConfigError::Expression {
                field: format!("metric.form[{i}]"),
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let form = OneFormField::new(n, components).map_err(|e| ConfigError::Expression {
        field: "metric.form".into(),
        message: e.to_string(),
    })?;
    RandersBundle::new(base, form).map_err(|e| ConfigError::Expression {
        field: "metric".into(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
dimension = 2
instance = "euclid_const_b"

[sample]
count = 100
seed = 42
"#;

    #[test]
    fn minimal_config() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.instance, "euclid_const_b");
        assert_eq!((c.plan.count, c.plan.seed), (100, 42));
        assert_eq!(c.checks.len(), default_suite().len());
    }

    #[test]
    fn out_of_range_coordinate_names_the_field() {
        let text = r#"
dimension = 2
[metric]
base = "sqrt(y1^2 + y2^2)"
form = ["0.1", "x7"]
[sample]
count = 10
seed = 1
"#;
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("metric.form[1]"), "{err}");
    }

    #[test]
    fn seed_is_required() {
        let text = "dimension = 2\ninstance = \"euclid_flat\"\n[sample]\ncount = 10\n";
        assert_eq!(parse_config(text).unwrap_err().to_string(), "seed required");
    }

    #[test]
    fn dimension_bounds() {
        let text = "dimension = 7\ninstance = \"euclid_flat\"\n[sample]\ncount = 1\nseed = 1\n";
        assert!(matches!(parse_config(text), Err(ConfigError::Dimension(7))));
    }

    #[test]
    fn empty_check_list_and_overrides() {
        let text = format!("checks = []\n{MINIMAL}");
        assert!(parse_config(&text).unwrap().checks.is_empty());
        let text = format!("{MINIMAL}\n[tolerances]\neq14_N = 1e-3\n");
        let c = parse_config(&text).unwrap();
        let spec = c.checks.iter().find(|s| s.id == "eq14_N").unwrap();
        assert_eq!(spec.expectation, Expectation::AtMost(1e-3));
    }

    #[test]
    fn syntax_errors_carry_a_location() {
        let err = parse_config("dimension = = 2").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }
}
