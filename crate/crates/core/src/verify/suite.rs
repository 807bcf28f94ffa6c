use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::catalog::{CatalogEntry, Tag};

use super::{run_checks, CheckSpec, Expectation, ResidualReport, SamplePlan, VerifyError};

/// Lower bound a quantity must reach at the witness point on an instance that
/// violates the corresponding hypothesis.
pub const WITNESS_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    Theorem1,
    Theorem2,
    Prop5,
    Theorem3,
    Theorem4,
    Theorem5,
    Theorem6,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::Theorem1,
        TheoremId::Theorem2,
        TheoremId::Prop5,
        TheoremId::Theorem3,
        TheoremId::Theorem4,
        TheoremId::Theorem5,
        TheoremId::Theorem6,
    ];

    fn name(self) -> &'static str {
        match self {
            TheoremId::Theorem1 => "theorem1",
            TheoremId::Theorem2 => "theorem2",
            TheoremId::Prop5 => "prop5",
            TheoremId::Theorem3 => "theorem3",
            TheoremId::Theorem4 => "theorem4",
            TheoremId::Theorem5 => "theorem5",
            TheoremId::Theorem6 => "theorem6",
        }
    }

    fn required_tags(self) -> &'static [Tag] {
        match self {
            TheoremId::Theorem1 | TheoremId::Theorem2 => &[],
            TheoremId::Prop5 | TheoremId::Theorem4 => &[Tag::ParallelB],
            TheoremId::Theorem3 => &[Tag::ParallelB, Tag::BerwaldBase],
            TheoremId::Theorem5 | TheoremId::Theorem6 => &[Tag::Closed],
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = String;

    fn from_str(s: &str) -> Result<TheoremId, String> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown theorem `{s}`"))
    }
}

/// The check that certifies a catalog tag.
pub fn tag_check(tag: Tag) -> &'static str {
    match tag {
        Tag::Flat => "prop5_r",
        Tag::ParallelB => "theorem1_nabla_omega",
        Tag::Closed => "theorem2_closedness",
        Tag::BerwaldBase => "theorem3_berwald_base",
        Tag::LandsbergBase => "theorem4_landsberg_base",
    }
}

/// Hypothesis and conclusion checks of one theorem on a catalog instance.
///
/// When the instance satisfies a biconditional's hypothesis both sides carry
/// their default bounds; otherwise both must exceed [`WITNESS_THRESHOLD`] at
/// the witness point.
pub fn theorem_suite(
    entry: &CatalogEntry,
    theorem: TheoremId,
    plan: &SamplePlan,
) -> Result<Vec<ResidualReport>, VerifyError> {
    let missing: Vec<&str> = theorem
        .required_tags()
        .iter()
        .filter(|t| !entry.has(**t))
        .map(|t| t.name())
        .collect();
    if !missing.is_empty() {
        return Err(VerifyError::MissingTags {
            instance: entry.id.to_string(),
            theorem: theorem.to_string(),
            missing: missing.join(", "),
        });
    }
    let holds_or_witness = |ids: &[&str], holds: bool| -> Result<Vec<CheckSpec>, VerifyError> {
        ids.iter()
            .map(|id| {
                let spec = CheckSpec::new(id)?;
                Ok(if holds {
                    spec
                } else {
                    spec.with_expectation(Expectation::AtLeast(WITNESS_THRESHOLD))
                })
            })
            .collect()
    };
    let specs = match theorem {
        TheoremId::Theorem1 => holds_or_witness(&["theorem1_nabla_omega", "theorem1_B"], entry.has(Tag::ParallelB))?,
        TheoremId::Theorem2 => holds_or_witness(
            &["theorem2_closedness", "theorem2_N_zero", "cor2b_N0_zero"],
            entry.has(Tag::Closed),
        )?,
        TheoremId::Prop5 => holds_or_witness(&["prop5_r", "prop5_rstar"], entry.has(Tag::Flat))?,
        TheoremId::Theorem3 => holds_or_witness(
            &["theorem3_berwald_base", "theorem3_nabla_A", "theorem3_berwald_star"],
            true,
        )?,
        TheoremId::Theorem4 => holds_or_witness(
            &["theorem4_landsberg_base", "theorem4_landsberg_star"],
            entry.has(Tag::LandsbergBase),
        )?,
        TheoremId::Theorem5 => holds_or_witness(
            &["theorem5_integrability_base", "theorem5_integrability_star"],
            entry.has(Tag::Flat),
        )?,
        TheoremId::Theorem6 => {
            let mut specs = vec![CheckSpec::new("theorem6_prop6_closed")?];
            if entry.has(Tag::LandsbergBase) {
                specs.push(CheckSpec::new("theorem6_general_landsberg_base")?);
            }
            specs
        }
    };
    let bundle = entry.bundle()?;
    run_checks(&bundle, &specs, plan)
}
