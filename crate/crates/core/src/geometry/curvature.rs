use crate::jet::{jet_sum, Jet};
use crate::tensor::Tensor;

use super::{Frame, GeometryError};

/// Sign convention for the curvature transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CurvatureConvention {
    /// `R(X, Y) = ∇_X ∇_Y - ∇_Y ∇_X - ∇_[X,Y]`
    Standard,
    /// `R(X, Y) = ∇_[X,Y] - ∇_X ∇_Y + ∇_Y ∇_X`
    Reversed,
}

impl CurvatureConvention {
    pub fn sign(self) -> f64 {
        match self {
            CurvatureConvention::Standard => 1.0,
            CurvatureConvention::Reversed => -1.0,
        }
    }
}

/// Horizontal, mixed and vertical curvature (`R`, `P`, `Q`) in the standard convention.
#[derive(Debug, Clone)]
pub struct Curvatures {
    pub r: Tensor<Jet>,
    pub p: Tensor<Jet>,
    pub q: Tensor<Jet>,
}

impl Curvatures {
    /// Numerical values in the requested convention.
    pub fn values(&self, convention: CurvatureConvention) -> (Tensor<f64>, Tensor<f64>, Tensor<f64>) {
        let s = convention.sign();
        (
            self.r.value().map(|v| s * v),
            self.p.value().map(|v| s * v),
            self.q.value().map(|v| s * v),
        )
    }
}

impl Frame {
    /// Components of the three curvature tensors, derived from the commutator
    /// over the frame `(e_i, ∂̇_i)`:
    ///
    /// * `[e_i, e_j] = W^r_ij ∂̇_r` with `W^r_ij = e_j N^r_i - e_i N^r_j`
    /// * `[∂̇_i, e_j] = -(∂̇_i N^r_j) ∂̇_r`
    pub fn curvatures(&self) -> Result<Curvatures, GeometryError> {
        let budget = self.gamma_bar.order().min(self.nonlinear.order()).min(self.cartan.order());
        if budget < 1 {
            return Err(GeometryError::InsufficientOrder {
                needed: 4,
                got: self.l.order(),
            });
        }
        let n = self.n;
        let gb = &self.gamma_bar;
        let c = &self.cartan;
        let nl = &self.nonlinear;

        let d_gb: Vec<Tensor<Jet>> = (0..n).map(|i| gb.map(|f| self.delta(f, i))).collect();
        let v_gb: Vec<Tensor<Jet>> = (0..n).map(|i| gb.map(|f| self.dy(f, i))).collect();
        let d_c: Vec<Tensor<Jet>> = (0..n).map(|i| c.map(|f| self.delta(f, i))).collect();
        let v_c: Vec<Tensor<Jet>> = (0..n).map(|i| c.map(|f| self.dy(f, i))).collect();
        let d_n: Vec<Tensor<Jet>> = (0..n).map(|i| nl.map(|f| self.delta(f, i))).collect();
        let v_n: Vec<Tensor<Jet>> = (0..n).map(|i| nl.map(|f| self.dy(f, i))).collect();

        let bracket = Tensor::from_fn(n, "u,ll", |ix| {
            let (r, i, j) = (ix[0], ix[1], ix[2]);
            &d_n[j][[r, i]] - &d_n[i][[r, j]]
        });

        let r = Tensor::from_fn(n, "u,lll", |ix| {
            let (h, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
            let quad = jet_sum((0..n).map(|m| {
                &gb[[m, j, k]] * &gb[[h, i, m]] - &gb[[m, i, k]] * &gb[[h, j, m]]
            }));
            let vert = jet_sum((0..n).map(|s| &bracket[[s, i, j]] * &c[[h, s, k]]));
            &d_gb[i][[h, j, k]] - &d_gb[j][[h, i, k]] + quad - vert
        });

        let p = Tensor::from_fn(n, "u,lll", |ix| {
            let (h, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
            let quad = jet_sum((0..n).map(|m| {
                &gb[[m, j, k]] * &c[[h, i, m]] - &c[[m, i, k]] * &gb[[h, j, m]]
            }));
            let vert = jet_sum((0..n).map(|s| &v_n[i][[s, j]] * &c[[h, s, k]]));
            &v_gb[i][[h, j, k]] - &d_c[j][[h, i, k]] + quad + vert
        });

        let q = Tensor::from_fn(n, "u,lll", |ix| {
            let (h, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
            let quad = jet_sum((0..n).map(|m| {
                &c[[m, j, k]] * &c[[h, i, m]] - &c[[m, i, k]] * &c[[h, j, m]]
            }));
            &v_c[i][[h, j, k]] - &v_c[j][[h, i, k]] + quad
        });

        Ok(Curvatures { r, p, q })
    }
}
