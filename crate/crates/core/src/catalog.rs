//! Built-in instances. Each entry carries the hypotheses it satisfies as tags.

use serde::Serialize;

use crate::geometry::MetricField;
use crate::randers::{OneFormField, RandersBundle, RandersError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    /// `R = 0` for the base metric.
    Flat,
    /// `∇_β ω = 0`.
    ParallelB,
    /// `d_J α` closed, i.e. `∂_i b_j = ∂_j b_i`.
    Closed,
    BerwaldBase,
    LandsbergBase,
}

impl Tag {
    pub const ALL: [Tag; 5] = [Tag::Flat, Tag::ParallelB, Tag::Closed, Tag::BerwaldBase, Tag::LandsbergBase];

    pub fn name(self) -> &'static str {
        match self {
            Tag::Flat => "flat",
            Tag::ParallelB => "parallel-b",
            Tag::Closed => "closed",
            Tag::BerwaldBase => "berwald-base",
            Tag::LandsbergBase => "landsberg-base",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub dimension: usize,
    pub base: &'static str,
    pub form: &'static [&'static str],
    pub tags: &'static [Tag],
}

impl CatalogEntry {
    pub fn bundle(&self) -> Result<RandersBundle, RandersError> {
        let base = MetricField::parse(self.base, self.dimension)?;
        let form = OneFormField::parse(self.form, self.dimension)?;
        RandersBundle::new(base, form)
    }

    pub fn has(&self, tag: Tag) -> bool {
        self.tags.contains(&tag)
    }
}

const EUCLID: &str = "sqrt(y1^2 + y2^2)";
const ALL_FLAT: &[Tag] = &[Tag::Flat, Tag::ParallelB, Tag::Closed, Tag::BerwaldBase, Tag::LandsbergBase];

pub static CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        id: "euclid_flat",
        description: "Euclidean plane with b = 0",
        dimension: 2,
        base: EUCLID,
        form: &["0", "0"],
        tags: ALL_FLAT,
    },
    CatalogEntry {
        id: "euclid_const_b",
        description: "Euclidean plane with constant b = (0.1, 0)",
        dimension: 2,
        base: EUCLID,
        form: &["0.1", "0"],
        tags: ALL_FLAT,
    },
    CatalogEntry {
        id: "euclid_closed_b",
        description: "Euclidean plane with exact b = 0.5 cos(x1) dx1",
        dimension: 2,
        base: EUCLID,
        form: &["0.5*cos(x1)", "0"],
        tags: &[Tag::Flat, Tag::Closed, Tag::BerwaldBase, Tag::LandsbergBase],
    },
    CatalogEntry {
        id: "euclid_curl_b",
        description: "Euclidean plane with rotational b = 0.1(-x2 dx1 + x1 dx2)",
        dimension: 2,
        base: EUCLID,
        form: &["-0.1*x2", "0.1*x1"],
        tags: &[Tag::Flat, Tag::BerwaldBase, Tag::LandsbergBase],
    },
    CatalogEntry {
        id: "conformal_const_b",
        description: "conformally Euclidean base exp(x1)|y| with constant b = (0.1, 0)",
        dimension: 2,
        base: "exp(x1)*sqrt(y1^2 + y2^2)",
        form: &["0.1", "0"],
        tags: &[Tag::Flat, Tag::Closed, Tag::BerwaldBase, Tag::LandsbergBase],
    },
    CatalogEntry {
        id: "sphere_const_b",
        description: "round unit sphere in stereographic coordinates with constant b = (0.1, 0)",
        dimension: 2,
        base: "sqrt(y1^2 + y2^2)/(1 + 0.25*(x1^2 + x2^2))",
        form: &["0.1", "0"],
        tags: &[Tag::Closed, Tag::BerwaldBase, Tag::LandsbergBase],
    },
    CatalogEntry {
        id: "finsler_curl_b",
        description: "non-Riemannian base |y| + 0.2 sqrt(y1^2 + (1 + 0.5 x1^2) y2^2) with a non-closed b",
        dimension: 2,
        base: "sqrt(y1^2 + y2^2) + 0.2*sqrt(y1^2 + (1 + 0.5*x1^2)*y2^2)",
        form: &["-0.1*x2", "0.1*x1 + 0.05*x2"],
        tags: &[],
    },
];

/// The five instances every acceptance criterion is stated over.
pub const CORE_INSTANCES: [&str; 5] = [
    "euclid_flat",
    "euclid_const_b",
    "euclid_closed_b",
    "euclid_curl_b",
    "conformal_const_b",
];

pub fn lookup(id: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.id == id)
}
