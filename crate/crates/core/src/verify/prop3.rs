//! Curvature relations between the two Cartan connections and the
//! horizontal derivative of the trace form `C*`.
//!
//! `A`, `B`, `N` and `N₀` are the engine differences; derivatives of `A` and
//! `B` are taken as π-tensor fields with the base connection. Components use
//! `X̄ = ∂̄_i`, `Ȳ = ∂̄_j`, `Z̄ = ∂̄_k` and the output slot `h`.

use serde::Serialize;

use crate::geometry::{CurvatureConvention, SlitPoint};
use crate::randers::{RandersBundle, RandersError};
use crate::jet::Jet;
use crate::tensor::Tensor;

use super::context::PointContext;
use super::registry::rel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Prop3Part {
    /// `R*` relation (both arguments horizontal).
    A,
    /// `P*` relation (mixed).
    B,
    /// `Q*` relation (both arguments vertical).
    C,
}

/// Relative residual of one part of the curvature relation at `p`.
pub fn check_prop3(
    bundle: &RandersBundle,
    p: &SlitPoint,
    part: Prop3Part,
    convention: CurvatureConvention,
) -> Result<f64, RandersError> {
    let ctx = PointContext::new(bundle, p, 1.0)?;
    prop3_residual(&ctx, part, convention)
}

pub(super) fn prop3_residual(
    c: &PointContext,
    part: Prop3Part,
    convention: CurvatureConvention,
) -> Result<f64, RandersError> {
    let f = c.base();
    let n = f.n;
    let y = &f.point.y;
    let (r, p, q) = c.base_curvatures()?.values(convention);
    let (rs, ps, qs) = c.star_curvatures()?.values(convention);
    let d = &c.rp.direct;
    let (a, b, nn) = (d.a.value(), d.b.value(), d.n_conn.value());
    let cc = f.cartan.value();
    let sum = |g: &dyn Fn(usize) -> f64| (0..n).map(g).sum::<f64>();

    let (lhs, rhs) = match part {
        Prop3Part::A => {
            let hb: Vec<Tensor<f64>> = (0..n).map(|j| f.h_cov(&d.b, j).value()).collect();
            let lhs = Tensor::from_fn(n, "u,lll", |ix| {
                let (h, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
                rs[[h, i, j, k]]
                    + sum(&|s| nn[[s, i]] * ps[[h, s, j, k]] - nn[[s, j]] * ps[[h, s, i, k]])
                    + sum(&|s| sum(&|t| nn[[s, i]] * nn[[t, j]] * qs[[h, s, t, k]]))
            });
            let rhs = Tensor::from_fn(n, "u,lll", |ix| {
                let (h, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
                r[[h, i, j, k]] + hb[j][[h, i, k]] - hb[i][[h, j, k]]
                    + sum(&|m| sum(&|l| r[[m, i, j, l]] * y[l]) * a[[h, m, k]])
                    + sum(&|m| b[[h, j, m]] * b[[m, i, k]] - b[[h, i, m]] * b[[m, j, k]])
            });
            (lhs, rhs)
        }
        Prop3Part::B => {
            let vb: Vec<Tensor<f64>> = (0..n).map(|i| f.v_cov(&d.b, i).value()).collect();
            let ha: Vec<Tensor<f64>> = (0..n).map(|j| f.h_cov(&d.a, j).value()).collect();
            let lhs = Tensor::from_fn(n, "u,lll", |ix| {
                let (h, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
                ps[[h, i, j, k]] + sum(&|s| nn[[s, j]] * qs[[h, i, s, k]])
            });
            let rhs = Tensor::from_fn(n, "u,lll", |ix| {
                let (h, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
                p[[h, i, j, k]] - vb[i][[h, j, k]] + ha[j][[h, i, k]]
                    + sum(&|m| sum(&|l| p[[m, i, j, l]] * y[l]) * a[[h, m, k]])
                    - sum(&|m| cc[[m, i, j]] * b[[h, m, k]])
                    + sum(&|m| b[[h, j, m]] * a[[m, i, k]] - a[[h, i, m]] * b[[m, j, k]])
            });
            (lhs, rhs)
        }
        Prop3Part::C => {
            let va: Vec<Tensor<f64>> = (0..n).map(|i| f.v_cov(&d.a, i).value()).collect();
            let rhs = Tensor::from_fn(n, "u,lll", |ix| {
                let (h, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
                q[[h, i, j, k]] + va[j][[h, i, k]] - va[i][[h, j, k]]
                    + sum(&|m| a[[h, j, m]] * a[[m, i, k]] - a[[h, i, m]] * a[[m, j, k]])
            });
            (qs, rhs)
        }
    };
    Ok(rel(&lhs, &rhs))
}

/// `(∇*_{β*η̄} C*)(∂̄_k)` from the engine on `L*`.
fn star_lhs(c: &PointContext) -> Tensor<f64> {
    let sf = c.star_frame();
    sf.h_cov_along_y(&sf.cartan_trace).value()
}

pub(super) fn prop6_general_residual(c: &PointContext) -> Result<f64, RandersError> {
    let f = c.base();
    let n = f.n;
    let y = &f.point.y;
    let d = &c.rp.direct;
    let s = &c.rp.star;
    let (a, b, n0) = (d.a.value(), d.b.value(), d.n0.value());
    let k_factor = (n as f64 + 1.0) / (2.0 * s.l_star.value());

    // ∇_{βη̄}w - ∇_{γN₀}w + w(A(N₀, ·)) - w(B(η̄, ·)) for a π-form w
    let expand = |w: &Tensor<Jet>| {
        let along_y = f.h_cov_along_y(w).value();
        let vert: Vec<Tensor<f64>> = (0..n).map(|i| f.v_cov(w, i).value()).collect();
        let wv = w.value();
        Tensor::from_fn(n, "l", |ix| {
            let k = ix[0];
            let mut acc = along_y[[k]];
            for i in 0..n {
                acc -= n0[[i]] * vert[i][[k]];
                for m in 0..n {
                    acc += wv[[m]] * a[[m, i, k]] * n0[[i]];
                    acc -= wv[[m]] * b[[m, i, k]] * y[i];
                }
            }
            acc
        })
    };
    let c_part = expand(&f.cartan_trace);
    let nu_part = expand(&s.nu);
    let rhs = Tensor::from_fn(n, "l", |ix| c_part[[ix[0]]] + k_factor * nu_part[[ix[0]]]);
    Ok(rel(&star_lhs(c), &rhs))
}

pub(super) fn prop6_special_residual(c: &PointContext) -> Result<f64, RandersError> {
    let f = c.base();
    let n = f.n;
    let k_factor = (n as f64 + 1.0) / (2.0 * c.rp.star.l_star.value());
    let c_part = f.h_cov_along_y(&f.cartan_trace).value();
    let nu_part = f.h_cov_along_y(&c.rp.star.nu).value();
    let rhs = Tensor::from_fn(n, "l", |ix| c_part[[ix[0]]] + k_factor * nu_part[[ix[0]]]);
    Ok(rel(&star_lhs(c), &rhs))
}
