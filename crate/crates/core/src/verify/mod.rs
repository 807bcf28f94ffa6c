//! Named residual checks evaluated over seeded sample plans.
//!
//! Residuals comparing two expressions are relative:
//! `max |lhs - rhs| / (1 + max(|lhs|, |rhs|))`. Checks asserting that a
//! tensor vanishes report its largest absolute component.

mod context;
mod plan;
mod prop3;
mod registry;
mod suite;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::SlitPoint;
use crate::randers::{RandersBundle, ADMISSIBILITY_BOUND};

pub use context::PointContext;
pub use plan::SamplePlan;
pub use prop3::{check_prop3, Prop3Part};
pub use registry::{check_def, default_suite, CheckDef, REGISTRY};
pub use suite::{tag_check, theorem_suite, TheoremId, WITNESS_THRESHOLD};

/// Largest fraction of skipped sample points a passing check may have.
pub const MAX_SKIP_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("instance `{0}` is inadmissible at every sample point")]
    NoAdmissiblePoints(String),
    #[error("instance `{instance}` lacks tag(s) required by {theorem}: {missing}")]
    MissingTags {
        instance: String,
        theorem: String,
        missing: String,
    },
    #[error(transparent)]
    Randers(#[from] crate::randers::RandersError),
}

/// Pass criterion of a check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Expectation {
    /// The largest residual must not exceed the bound.
    AtMost(f64),
    /// The largest value must reach the bound (witness of a violated hypothesis).
    AtLeast(f64),
}

impl Expectation {
    pub fn holds(self, max: f64) -> bool {
        match self {
            Expectation::AtMost(t) => max <= t,
            Expectation::AtLeast(t) => max >= t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSpec {
    pub id: String,
    pub expectation: Expectation,
}

impl CheckSpec {
    /// The registered check with its default expectation.
    pub fn new(id: &str) -> Result<CheckSpec, VerifyError> {
        let def = check_def(id).ok_or_else(|| VerifyError::UnknownCheck(id.to_string()))?;
        Ok(CheckSpec {
            id: def.id.to_string(),
            expectation: def.expectation,
        })
    }

    pub fn with_expectation(mut self, expectation: Expectation) -> CheckSpec {
        self.expectation = expectation;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub id: String,
    pub instance: String,
    pub evaluated: usize,
    pub skipped: usize,
    pub max: f64,
    pub mean: f64,
    pub pass: bool,
    pub witness: Option<SlitPoint>,
    pub expectation: Expectation,
    /// Reasons for skipped points with their counts.
    pub skip_reasons: BTreeMap<String, usize>,
}

/// Evaluates one check over the plan.
pub fn run_check(bundle: &RandersBundle, spec: &CheckSpec, plan: &SamplePlan) -> Result<ResidualReport, VerifyError> {
    let mut reports = run_checks(bundle, std::slice::from_ref(spec), plan)?;
    Ok(reports.remove(0))
}

/// Evaluates several checks over the plan, sharing per-point computations.
/// Reports come back in the order of `specs`.
pub fn run_checks(
    bundle: &RandersBundle,
    specs: &[CheckSpec],
    plan: &SamplePlan,
) -> Result<Vec<ResidualReport>, VerifyError> {
    let defs = specs
        .iter()
        .map(|s| check_def(&s.id).ok_or_else(|| VerifyError::UnknownCheck(s.id.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    if specs.is_empty() {
        return Ok(Vec::new());
    }
    let points = plan.points(bundle.dim());

    // outcome[point][check]: Ok(value) or Err(skip reason)
    let outcomes: Vec<Vec<Result<f64, String>>> = points
        .par_iter()
        .map(|p| match PointContext::new(bundle, p, ADMISSIBILITY_BOUND) {
            Ok(ctx) => defs.iter().map(|d| (d.eval)(&ctx).map_err(|e| e.to_string())).collect(),
            Err(e) => vec![Err(e.to_string()); defs.len()],
        })
        .collect();

    if outcomes.iter().all(|o| o.iter().all(Result::is_err)) {
        return Err(VerifyError::NoAdmissiblePoints(plan.instance.clone()));
    }

    Ok(specs
        .iter()
        .enumerate()
        .map(|(c, spec)| {
            let mut evaluated = 0;
            let mut sum = 0.0;
            let mut max = f64::NEG_INFINITY;
            let mut witness = None;
            let mut skip_reasons = BTreeMap::new();
            for (p, row) in points.iter().zip(&outcomes) {
                match &row[c] {
                    Ok(v) => {
                        evaluated += 1;
                        sum += v;
                        if *v > max || v.is_nan() {
                            max = *v;
                            witness = Some(p.clone());
                        }
                    }
                    Err(reason) => *skip_reasons.entry(reason.clone()).or_insert(0) += 1,
                }
            }
            let skipped = points.len() - evaluated;
            let (max, mean) = if evaluated == 0 {
                (f64::NAN, f64::NAN)
            } else {
                (max, sum / evaluated as f64)
            };
            let skip_ok = (skipped as f64) <= MAX_SKIP_FRACTION * points.len() as f64;
            let pass = evaluated > 0 && skip_ok && !max.is_nan() && spec.expectation.holds(max);
            ResidualReport {
                id: spec.id.clone(),
                instance: plan.instance.clone(),
                evaluated,
                skipped,
                max,
                mean,
                pass,
                witness,
                expectation: spec.expectation,
                skip_reasons,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;
    use crate::geometry::MetricField;
    use crate::randers::OneFormField;

    fn euclid(form: &[&str]) -> RandersBundle {
        RandersBundle::new(
            MetricField::parse("sqrt(y1^2 + y2^2)", 2).unwrap(),
            OneFormField::parse(form, 2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn reports_are_deterministic() {
        let bundle = lookup("conformal_const_b").unwrap().bundle().unwrap();
        let specs: Vec<CheckSpec> = default_suite().iter().map(|id| CheckSpec::new(id).unwrap()).collect();
        let plan = SamplePlan::new("conformal_const_b", 25, 9, 2);
        assert_eq!(run_checks(&bundle, &specs, &plan).unwrap(), run_checks(&bundle, &specs, &plan).unwrap());
    }

    #[test]
    fn zero_form_makes_prop4_exact() {
        let plan = SamplePlan::new("zero", 20, 1, 2);
        let r = run_check(&euclid(&["0", "0"]), &CheckSpec::new("prop4_A").unwrap(), &plan).unwrap();
        assert!(r.pass && r.max < 1e-12 && r.skipped == 0);
    }

    #[test]
    fn inadmissible_everywhere_is_an_error() {
        let plan = SamplePlan::new("big", 10, 1, 2);
        let spec = CheckSpec::new("eq12_star_metric").unwrap();
        assert!(matches!(
            run_check(&euclid(&["1.5", "0"]), &spec, &plan),
            Err(VerifyError::NoAdmissiblePoints(_))
        ));
    }

    #[test]
    fn too_many_skips_fail_the_check() {
        // b² = 16 x1² exceeds the bound on about half of the box
        let plan = SamplePlan::new("partial", 40, 2, 2);
        let r = run_check(&euclid(&["4*x1", "0"]), &CheckSpec::new("eq12_star_metric").unwrap(), &plan).unwrap();
        assert!(r.skipped > 4 && !r.pass);
        assert_eq!(r.skip_reasons.values().sum::<usize>(), r.skipped);
    }

    #[test]
    fn witness_expectation_on_curl_form() {
        let plan = SamplePlan::new("curl", 20, 4, 2);
        let spec = CheckSpec::new("theorem2_closedness")
            .unwrap()
            .with_expectation(Expectation::AtLeast(WITNESS_THRESHOLD));
        let r = run_check(&euclid(&["-0.1*x2", "0.1*x1"]), &spec, &plan).unwrap();
        assert!(r.pass && r.witness.is_some());
    }

    #[test]
    fn unknown_check_is_rejected() {
        assert_eq!(CheckSpec::new("nope"), Err(VerifyError::UnknownCheck("nope".into())));
    }
}
