//! Finsler frame of a positively 1-homogeneous metric function `L(x, y)`.
//!
//! All quantities are computed in the canonical chart `(x^i, y^i)` of the slit
//! tangent bundle. Index conventions:
//!
//! * `g[[i, j]] = g_ij`, `g_inv[[i, j]] = g^ij`
//! * `cartan[[h, i, j]] = C^h_ij` (the mixed torsion `T(∂̄_i, ∂̄_j)`),
//!   `cartan_low[[i, j, k]] = C_ijk`
//! * `nonlinear[[h, i]] = N^h_i`, `spray[[h]] = G^h`
//! * `gamma_bar[[h, i, j]]`: `∇_{e_i} ∂̄_j = Γ̄^h_ij ∂̄_h` along `e_i = ∂_i - N^r_i ∂̇_r`
//! * `gamma[[h, i, j]]`: `∇_{∂_i} ∂̄_j = Γ^h_ij ∂̄_h`
//! * curvature `r[[h, i, j, k]]` is the `∂̄_h` component of `R(∂̄_i, ∂̄_j) ∂̄_k`;
//!   `p` and `q` follow the same slot order.

mod covariant;
mod curvature;
mod frame;

pub use curvature::{CurvatureConvention, Curvatures};
pub use frame::{spray_values, Frame};

use serde::Serialize;
use thiserror::Error;

use crate::expr::{self, parse_expression, EvalContext, EvalError, Expr, ParseError, Vars};
use crate::jet::Jet;
use crate::tensor::Tensor;

/// Default truncation order: curvature needs four derivatives of `L`.
pub const DEFAULT_JET_ORDER: usize = 4;
/// Largest supported dimension.
pub const MAX_DIMENSION: usize = 6;
/// `det g` below this marks a degenerate sample point.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("metric function is not positive at the point (L = {0})")]
    NonPositive(f64),
    #[error("degenerate fundamental tensor (det = {det:e})")]
    Degenerate { det: f64 },
    #[error("jet order {got} is insufficient, this computation needs order >= {needed}")]
    InsufficientOrder { needed: usize, got: usize },
    #[error("dimension {0} unsupported (expected 1..={MAX_DIMENSION})")]
    Dimension(usize),
}

/// A point `(x, y)` of the slit tangent bundle (`y != 0`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlitPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SlitPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<SlitPoint, GeometryError> {
        if x.len() != y.len() {
            return Err(GeometryError::InvalidPoint(format!(
                "x has {} components, y has {}",
                x.len(),
                y.len()
            )));
        }
        if y.iter().all(|v| *v == 0.0) {
            return Err(GeometryError::InvalidPoint("y must be nonzero".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidPoint("non-finite coordinate".into()));
        }
        Ok(SlitPoint { x, y })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// The point `(x, λ y)`.
    pub fn scaled(&self, lambda: f64) -> SlitPoint {
        SlitPoint {
            x: self.x.clone(),
            y: self.y.iter().map(|v| v * lambda).collect(),
        }
    }
}

/// A Finsler metric function given analytically.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    n: usize,
    expr: Expr,
}

impl MetricField {
    pub fn new(n: usize, expr: Expr) -> Result<MetricField, GeometryError> {
        if n == 0 || n > MAX_DIMENSION {
            return Err(GeometryError::Dimension(n));
        }
        if expr.max_index() > n {
            return Err(GeometryError::InvalidPoint(format!(
                "expression references index {} in dimension {n}",
                expr.max_index()
            )));
        }
        Ok(MetricField { n, expr })
    }

    pub fn parse(source: &str, n: usize) -> Result<MetricField, GeometryError> {
        if n == 0 || n > MAX_DIMENSION {
            return Err(GeometryError::Dimension(n));
        }
        Ok(MetricField {
            n,
            expr: parse_expression(source, n)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn value(&self, x: &[f64], y: &[f64]) -> Result<f64, GeometryError> {
        Ok(expr::eval(
            &self.expr,
            &Vars {
                x: x.to_vec(),
                y: y.to_vec(),
            },
        )?)
    }

    pub fn jet(&self, p: &SlitPoint, ctx: &EvalContext) -> Result<Jet, GeometryError> {
        self.check_point(p)?;
        Ok(expr::eval_jet(&self.expr, &p.x, &p.y, ctx)?)
    }

    fn check_point(&self, p: &SlitPoint) -> Result<(), GeometryError> {
        if p.dim() != self.n {
            return Err(GeometryError::InvalidPoint(format!(
                "point has dimension {}, metric has {}",
                p.dim(),
                self.n
            )));
        }
        Ok(())
    }
}

/// Numerical components of a π-tensor at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorValue {
    pub site: SlitPoint,
    pub variance: String,
    pub components: Tensor<f64>,
}

impl TensorValue {
    pub fn new(site: &SlitPoint, components: Tensor<f64>) -> TensorValue {
        TensorValue {
            site: site.clone(),
            variance: components.variance().to_string(),
            components,
        }
    }
}

fn frame_at(metric: &MetricField, p: &SlitPoint) -> Result<Frame, GeometryError> {
    Frame::compute(metric, p, DEFAULT_JET_ORDER)
}

/// `g_ij`, half the `y`-Hessian of `L²`.
pub fn fundamental_tensor(metric: &MetricField, p: &SlitPoint) -> Result<TensorValue, GeometryError> {
    let f = frame_at(metric, p)?;
    Ok(TensorValue::new(p, f.g.value()))
}

/// `(ℓ_i, h_ij)`.
pub fn ell_and_angular(metric: &MetricField, p: &SlitPoint) -> Result<(TensorValue, TensorValue), GeometryError> {
    let f = frame_at(metric, p)?;
    Ok((TensorValue::new(p, f.ell_low.value()), TensorValue::new(p, f.h.value())))
}

/// `(C_ijk, C^h_ij, C_i)`.
pub fn cartan_torsion(
    metric: &MetricField,
    p: &SlitPoint,
) -> Result<(TensorValue, TensorValue, TensorValue), GeometryError> {
    let f = frame_at(metric, p)?;
    Ok((
        TensorValue::new(p, f.cartan_low.value()),
        TensorValue::new(p, f.cartan.value()),
        TensorValue::new(p, f.cartan_trace.value()),
    ))
}

/// `(G^i, N^i_j)`.
pub fn spray_and_nonlinear_connection(
    metric: &MetricField,
    p: &SlitPoint,
) -> Result<(TensorValue, TensorValue), GeometryError> {
    let f = frame_at(metric, p)?;
    Ok((TensorValue::new(p, f.spray.value()), TensorValue::new(p, f.nonlinear.value())))
}

/// `(Γ^h_ij, Γ̄^h_ij)`.
pub fn cartan_coefficients(
    metric: &MetricField,
    p: &SlitPoint,
) -> Result<(TensorValue, TensorValue), GeometryError> {
    let f = frame_at(metric, p)?;
    Ok((TensorValue::new(p, f.gamma.value()), TensorValue::new(p, f.gamma_bar.value())))
}

/// `(R, P, Q)` under the standard commutator convention.
pub fn curvatures(
    metric: &MetricField,
    p: &SlitPoint,
) -> Result<(TensorValue, TensorValue, TensorValue), GeometryError> {
    let f = frame_at(metric, p)?;
    let c = f.curvatures()?;
    Ok((
        TensorValue::new(p, c.r.value()),
        TensorValue::new(p, c.p.value()),
        TensorValue::new(p, c.q.value()),
    ))
}

/// Vertical covariant derivative of `field` along `∂̇_direction`.
pub fn v_covariant_derivative(frame: &Frame, field: &Tensor<Jet>, direction: usize) -> TensorValue {
    TensorValue::new(&frame.point, frame.v_cov(field, direction).value())
}

/// Horizontal covariant derivative of `field` along `e_direction`.
pub fn h_covariant_derivative(frame: &Frame, field: &Tensor<Jet>, direction: usize) -> TensorValue {
    TensorValue::new(&frame.point, frame.h_cov(field, direction).value())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EUCLID: &str = "sqrt(y1^2+y2^2)";
    const CONFORMAL: &str = "exp(x1)*sqrt(y1^2+y2^2)";

    fn point(x: [f64; 2], y: [f64; 2]) -> SlitPoint {
        SlitPoint::new(x.to_vec(), y.to_vec()).unwrap()
    }

    fn frame(src: &str, x: [f64; 2], y: [f64; 2]) -> Frame {
        Frame::compute(&MetricField::parse(src, 2).unwrap(), &point(x, y), DEFAULT_JET_ORDER).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn slit_point_rejects_zero_vector() {
        assert!(SlitPoint::new(vec![0.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(SlitPoint::new(vec![0.0], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn euclidean_frame_is_flat() {
        let f = frame(EUCLID, [0.3, -0.2], [0.7, 1.1]);
        let g = f.g.value();
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(g[[i, j]], if i == j { 1.0 } else { 0.0 }, 1e-14));
            }
        }
        assert!(f.spray.value().max_abs() < 1e-14);
        assert!(f.nonlinear.value().max_abs() < 1e-14);
        assert!(f.gamma_bar.value().max_abs() < 1e-14);
        assert!(f.cartan.value().max_abs() < 1e-13);
        let c = f.curvatures().unwrap();
        assert!(c.r.value().max_abs() < 1e-12);
        assert!(c.p.value().max_abs() < 1e-12);
        assert!(c.q.value().max_abs() < 1e-12);
    }

    #[test]
    fn euclidean_ell_and_angular() {
        let f = frame(EUCLID, [0.0, 0.0], [0.0, 1.0]);
        let (l, h) = (f.ell_low.value(), f.h.value());
        assert!(close(l[[0]], 0.0, 1e-15) && close(l[[1]], 1.0, 1e-15));
        assert!(close(h[[0, 0]], 1.0, 1e-15) && close(h[[1, 1]], 0.0, 1e-15));
        let f = frame(EUCLID, [0.0, 0.0], [1.0, 0.0]);
        let h = f.h.value();
        assert!(close(h[[0, 0]], 0.0, 1e-15) && close(h[[1, 1]], 1.0, 1e-15));
    }

    #[test]
    fn randers_fundamental_tensor_worked_example() {
        // (|y| + 0.1 y1)^2 / 2 at y = (0, 1): Hessian [[1.01, 0.1], [0.1, 1]]
        let f = frame("sqrt(y1^2+y2^2)+0.1*y1", [0.0, 0.0], [0.0, 1.0]);
        let g = f.g.value();
        assert!(close(g[[0, 0]], 1.01, 1e-14));
        assert!(close(g[[0, 1]], 0.1, 1e-14));
        assert!(close(g[[1, 0]], 0.1, 1e-14));
        assert!(close(g[[1, 1]], 1.0, 1e-14));
        let l = f.ell_low.value();
        assert!(close(l[[0]], 0.1, 1e-14) && close(l[[1]], 1.0, 1e-14));
        let trace = f.cartan_trace.value();
        assert!(close(trace[[0]], 0.15, 1e-13), "C* = {:?}", trace);
        assert!(close(trace[[1]], 0.0, 1e-13));
    }

    #[test]
    fn cartan_torsion_scales_with_degree_minus_one() {
        let src = "sqrt(y1^2+y2^2)+0.1*y1";
        let a = frame(src, [0.2, 0.1], [0.4, 0.9]).cartan_low.value();
        let b = frame(src, [0.2, 0.1], [0.8, 1.8]).cartan_low.value();
        for (x, y) in a.data().iter().zip(b.data()) {
            assert!(close(*y, 0.5 * x, 1e-13));
        }
    }

    #[test]
    fn conformal_spray_matches_levi_civita() {
        // e^{2 x1} δ: Γ¹₁₁ = 1, Γ¹₂₂ = -1, Γ²₁₂ = Γ²₂₁ = 1, the rest vanish
        let y = [0.6, -0.8];
        let f = frame(CONFORMAL, [0.0, 0.3], y);
        let mut christoffel = [[[0.0; 2]; 2]; 2];
        christoffel[0][0][0] = 1.0;
        christoffel[0][1][1] = -1.0;
        christoffel[1][0][1] = 1.0;
        christoffel[1][1][0] = 1.0;
        let g = f.g.value();
        assert!(close(g[[0, 0]], 1.0, 1e-14) && close(g[[1, 1]], 1.0, 1e-14));
        let spray = f.spray.value();
        let gb = f.gamma_bar.value();
        for h in 0..2 {
            let expected: f64 = (0..2)
                .flat_map(|j| (0..2).map(move |k| (j, k)))
                .map(|(j, k)| 0.5 * christoffel[h][j][k] * y[j] * y[k])
                .sum();
            assert!(close(spray[[h]], expected, 1e-13));
            for i in 0..2 {
                for j in 0..2 {
                    assert!(close(gb[[h, i, j]], christoffel[h][i][j], 1e-12));
                }
            }
        }
    }

    #[test]
    fn flat_randers_with_constant_form_has_no_spray() {
        let f = frame("sqrt(y1^2+y2^2)+0.1*y1+0.05*y2", [0.4, -0.3], [0.3, 0.7]);
        assert!(f.spray.value().max_abs() < 1e-12);
        assert!(f.curvatures().unwrap().r.value().max_abs() < 1e-10);
    }

    #[test]
    fn round_sphere_has_unit_gaussian_curvature() {
        // δ / (1 + |x|²/4)² is the unit sphere in stereographic coordinates;
        // R^1_{212} = K g_22 under the standard convention
        let f = frame("sqrt(y1^2+y2^2)/(1+0.25*(x1^2+x2^2))", [0.3, -0.5], [0.2, 1.0]);
        let c = f.curvatures().unwrap();
        let g = f.g.value();
        let r = c.r.value();
        // R(∂̄_1, ∂̄_2) ∂̄_2 = K (g_22 ∂̄_1 - g_12 ∂̄_2)
        assert!(close(r[[0, 0, 1, 1]], g[[1, 1]] / g[[0, 0]] * g[[0, 0]], 1e-9), "{}", r[[0, 0, 1, 1]]);
        assert!(c.q.value().max_abs() < 1e-10);
        assert!(c.p.value().max_abs() < 1e-10);
    }

    #[test]
    fn curvature_needs_order_four() {
        let m = MetricField::parse(EUCLID, 2).unwrap();
        let f = Frame::compute(&m, &point([0.0, 0.0], [1.0, 0.0]), 3).unwrap();
        assert!(matches!(
            f.curvatures(),
            Err(GeometryError::InsufficientOrder { needed: 4, .. })
        ));
        assert!(matches!(
            Frame::compute(&m, &point([0.0, 0.0], [1.0, 0.0]), 2),
            Err(GeometryError::InsufficientOrder { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn degenerate_metric_is_reported() {
        // the quartic norm has g_22 = 0 along the y1 axis
        let m = MetricField::parse("sqrt(sqrt(y1^4+y2^4))", 2).unwrap();
        let err = Frame::compute(&m, &point([0.0, 0.0], [1.0, 0.0]), 4).unwrap_err();
        assert!(matches!(err, GeometryError::Degenerate { .. }), "{err:?}");
        let m = MetricField::parse("sqrt(y1^2+y2^2)+1.5*y1", 2).unwrap();
        let err = Frame::compute(&m, &point([0.0, 0.0], [-1.0, 0.0]), 4).unwrap_err();
        assert!(matches!(err, GeometryError::NonPositive(_)), "{err:?}");
    }

    #[test]
    fn covariant_derivatives_of_scalars() {
        let f = frame(EUCLID, [0.1, 0.2], [0.5, 0.5]);
        let ctx = EvalContext::full(2, DEFAULT_JET_ORDER);
        let field = crate::expr::eval_jet(
            &parse_expression("x1^2*x2 + 3", 2).unwrap(),
            &f.point.x,
            &f.point.y,
            &ctx,
        )
        .unwrap();
        let t = Tensor::from_fn(2, "", |_| field.clone());
        let d0 = h_covariant_derivative(&f, &t, 0).components[[]];
        let d1 = h_covariant_derivative(&f, &t, 1).components[[]];
        assert!(close(d0, 2.0 * 0.1 * 0.2, 1e-14));
        assert!(close(d1, 0.01, 1e-14));
        let constant = Tensor::from_fn(2, "", |_| f.constant(2.5));
        assert_eq!(v_covariant_derivative(&f, &constant, 1).components[[]], 0.0);
    }
}
