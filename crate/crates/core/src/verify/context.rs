use std::cell::OnceCell;

use crate::geometry::{Curvatures, Frame, GeometryError, SlitPoint, DEFAULT_JET_ORDER};
use crate::randers::{RandersBundle, RandersError, RandersPoint};

/// Everything the checks need at one sample point. Curvatures are computed
/// on first use.
pub struct PointContext<'a> {
    pub bundle: &'a RandersBundle,
    pub rp: RandersPoint,
    base_curvatures: OnceCell<Result<Curvatures, GeometryError>>,
    star_curvatures: OnceCell<Result<Curvatures, GeometryError>>,
}

impl<'a> PointContext<'a> {
    /// Fails when the point is inadmissible (`b² > bound`) or either frame is degenerate.
    pub fn new(bundle: &'a RandersBundle, p: &SlitPoint, bound: f64) -> Result<PointContext<'a>, RandersError> {
        let rp = RandersPoint::compute(bundle, p, DEFAULT_JET_ORDER)?;
        let b2 = rp.star.b2.value();
        if b2 > bound {
            return Err(RandersError::Inadmissible { b2, bound });
        }
        Ok(PointContext {
            bundle,
            rp,
            base_curvatures: OnceCell::new(),
            star_curvatures: OnceCell::new(),
        })
    }

    pub fn point(&self) -> &SlitPoint {
        &self.rp.point
    }

    pub fn base(&self) -> &Frame {
        &self.rp.base
    }

    pub fn star_frame(&self) -> &Frame {
        &self.rp.star_frame
    }

    pub fn base_curvatures(&self) -> Result<&Curvatures, RandersError> {
        self.base_curvatures
            .get_or_init(|| self.rp.base.curvatures())
            .as_ref()
            .map_err(|e| e.clone().into())
    }

    pub fn star_curvatures(&self) -> Result<&Curvatures, RandersError> {
        self.star_curvatures
            .get_or_init(|| self.rp.star_frame.curvatures())
            .as_ref()
            .map_err(|e| e.clone().into())
    }
}
