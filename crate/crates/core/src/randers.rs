//! Generalized Randers structure `L* = L + α`, `α = b_i(x) y^i`.
//!
//! [`StarQuantities`] holds every closed-form relation between the two
//! structures, built only from the base frame and the form. The independent
//! route is [`DirectDifferences`], obtained by running the geometry engine on
//! `L*` and subtracting connection data.
//!
//! Indices are raised and lowered with the base metric `g`, except for
//! starred objects, which use `g*`.

use serde::Serialize;
use thiserror::Error;

use crate::expr::{parse_expression, BinOp, EvalContext, Expr, Var, Vars};
use crate::geometry::{Frame, GeometryError, MetricField, SlitPoint, TensorValue, DEFAULT_JET_ORDER};
use crate::jet::{jet_sum, Jet};
use crate::tensor::Tensor;

/// Sample points must satisfy `b² <= ADMISSIBILITY_BOUND`.
pub const ADMISSIBILITY_BOUND: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RandersError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("one-form component {index} depends on y")]
    FormDependsOnY { index: usize },
    #[error("one-form has {got} components, expected {expected}")]
    FormArity { expected: usize, got: usize },
    #[error("inadmissible point: b² = {b2} exceeds {bound}")]
    Inadmissible { b2: f64, bound: f64 },
}

/// Components `b_i(x)` of a 1-form on the base manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct OneFormField {
    n: usize,
    components: Vec<Expr>,
}

impl OneFormField {
    pub fn new(n: usize, components: Vec<Expr>) -> Result<OneFormField, RandersError> {
        if components.len() != n {
            return Err(RandersError::FormArity {
                expected: n,
                got: components.len(),
            });
        }
        if let Some(index) = components.iter().position(|c| !c.is_y_free()) {
            return Err(RandersError::FormDependsOnY { index });
        }
        Ok(OneFormField { n, components })
    }

    pub fn parse<S: AsRef<str>>(sources: &[S], n: usize) -> Result<OneFormField, RandersError> {
        let components = sources
            .iter()
            .map(|s| parse_expression(s.as_ref(), n).map_err(GeometryError::from))
            .collect::<Result<Vec<_>, _>>()?;
        OneFormField::new(n, components)
    }

    pub fn zero(n: usize) -> OneFormField {
        OneFormField {
            n,
            components: vec![Expr::Const(0.0); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn values(&self, x: &[f64]) -> Result<Vec<f64>, RandersError> {
        let vars = Vars {
            x: x.to_vec(),
            y: vec![0.0; self.n],
        };
        self.components
            .iter()
            .map(|c| crate::expr::eval(c, &vars).map_err(|e| GeometryError::from(e).into()))
            .collect()
    }

    pub fn jets(&self, p: &SlitPoint, ctx: &EvalContext) -> Result<Vec<Jet>, RandersError> {
        self.components
            .iter()
            .map(|c| {
                crate::expr::eval_jet(c, &p.x, &p.y, ctx).map_err(|e| GeometryError::from(e).into())
            })
            .collect()
    }

    /// Antisymmetric part `∂_i b_j - ∂_j b_i` at `x` (the obstruction to `d_J α` being closed).
    pub fn curl(&self, x: &[f64]) -> Result<Tensor<f64>, RandersError> {
        let ctx = EvalContext::full(self.n, 1);
        let p = SlitPoint {
            x: x.to_vec(),
            y: vec![1.0; self.n],
        };
        let b = self.jets(&p, &ctx)?;
        Ok(Tensor::from_fn(self.n, "ll", |ix| {
            b[ix[1]].d(ix[0]).value() - b[ix[0]].d(ix[1]).value()
        }))
    }
}

/// A base metric together with a 1-form, and the synthesized `L*`.
#[derive(Debug, Clone)]
pub struct RandersBundle {
    base: MetricField,
    form: OneFormField,
    star: MetricField,
}

impl RandersBundle {
    pub fn new(base: MetricField, form: OneFormField) -> Result<RandersBundle, RandersError> {
        let n = base.dim();
        if form.dim() != n {
            return Err(RandersError::FormArity {
                expected: n,
                got: form.dim(),
            });
        }
        let alpha = form
            .components()
            .iter()
            .enumerate()
            .map(|(i, b)| Expr::binary(BinOp::Mul, b.clone(), Expr::var(Var::Y(i))))
            .reduce(|acc, t| Expr::binary(BinOp::Add, acc, t))
            .expect("dimension >= 1");
        let star = MetricField::new(n, Expr::binary(BinOp::Add, base.expr().clone(), alpha))?;
        Ok(RandersBundle { base, form, star })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &MetricField {
        &self.base
    }

    pub fn form(&self) -> &OneFormField {
        &self.form
    }

    pub fn star(&self) -> &MetricField {
        &self.star
    }

    /// `b² = g^ij b_i b_j` at `p`, computed from the base metric.
    pub fn b_squared(&self, p: &SlitPoint) -> Result<f64, RandersError> {
        let frame = Frame::compute(&self.base, p, 3)?;
        let b = self.form.values(&p.x)?;
        let g_inv = frame.g_inv.value();
        let n = self.dim();
        Ok((0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| g_inv[[i, j]] * b[i] * b[j])
            .sum())
    }

    /// Fails unless `b² <= bound` at `p`.
    pub fn check_admissible(&self, p: &SlitPoint, bound: f64) -> Result<f64, RandersError> {
        let b2 = self.b_squared(p)?;
        if b2 > bound {
            return Err(RandersError::Inadmissible { b2, bound });
        }
        Ok(b2)
    }
}

/// `L*` as an evaluable field; fails when `b² >= 1` at the requested point.
pub fn build_star_metric(bundle: &RandersBundle, p: &SlitPoint) -> Result<MetricField, RandersError> {
    let b2 = bundle.b_squared(p)?;
    if b2 >= 1.0 {
        return Err(RandersError::Inadmissible { b2, bound: 1.0 });
    }
    Ok(bundle.star().clone())
}

/// Every closed-form starred and difference quantity at one point.
#[derive(Debug, Clone)]
pub struct StarQuantities {
    pub n: usize,
    pub b_low: Tensor<Jet>,
    pub b_up: Tensor<Jet>,
    pub alpha: Jet,
    pub l_star: Jet,
    pub tau: Jet,
    pub b2: Jet,
    pub mu: Jet,
    pub ell_star_low: Tensor<Jet>,
    pub ell_star_up: Tensor<Jet>,
    pub h_star: Tensor<Jet>,
    pub g_star: Tensor<Jet>,
    pub g_star_inv: Tensor<Jet>,
    pub m: Tensor<Jet>,
    pub nu: Tensor<Jet>,
    pub nu_m: Jet,
    pub phi: Tensor<Jet>,
    pub phi_star: Tensor<Jet>,
    /// `ω(T(∂̄_i, ∂̄_j)) = b_h C^h_ij`
    pub omega_t: Tensor<Jet>,
    /// `A^h_ij`
    pub a: Tensor<Jet>,
    /// `A*_ijk = g*(A(∂̄_i, ∂̄_j), ∂̄_k)`
    pub a_star_low: Tensor<Jet>,
    /// `A*_ijk` from its symmetric-`h ν` expression
    pub a_star_low_direct_formula: Tensor<Jet>,
    /// `C*^h_ij = C^h_ij + A^h_ij`
    pub cartan_star: Tensor<Jet>,
    /// `T*_ijk = g*_kh C*^h_ij`
    pub cartan_star_low: Tensor<Jet>,
    /// `C*_i = C_i + (n+1)/(2L*) ν_i`
    pub cartan_star_trace: Tensor<Jet>,
    /// `τ T_ijk + (h_ij ν_k + h_jk ν_i + h_ik ν_j)/(2L)`
    pub t_star_low: Tensor<Jet>,
    /// `b_ij = ∇_{e_i} b_j`
    pub b_cov: Tensor<Jet>,
    pub b_sym: Tensor<Jet>,
    pub b_anti: Tensor<Jet>,
    pub b_i0: Tensor<Jet>,
    pub b_sym_i0: Tensor<Jet>,
    pub b_anti_i0: Tensor<Jet>,
    pub b_00: Jet,
    /// `h*^h_i = g*^hj h*_ij`
    pub h_star_mixed: Tensor<Jet>,
    pub n0: Tensor<Jet>,
    /// `N^h_i`
    pub n_conn: Tensor<Jet>,
    /// `B^h_ij`
    pub b_conn: Tensor<Jet>,
}

impl StarQuantities {
    pub fn compute(bundle: &RandersBundle, f: &Frame) -> Result<StarQuantities, RandersError> {
        let n = f.n;
        let ctx = EvalContext::full(n, f.l.order());
        let b_jets = bundle.form().jets(&f.point, &ctx)?;
        let y = &f.y;
        let l = &f.l;
        let one = f.constant(1.0);
        let kron = |i: usize, j: usize| if i == j { one.clone() } else { f.zero() };
        let sum = |it: &mut dyn Iterator<Item = Jet>| jet_sum(it);

        let b_low = Tensor::from_fn(n, "l", |ix| b_jets[ix[0]].clone());
        let b_up = Tensor::from_fn(n, "u", |ix| sum(&mut (0..n).map(|j| &f.g_inv[[ix[0], j]] * &b_low[[j]])));
        let alpha = sum(&mut (0..n).map(|i| &b_low[[i]] * &y[i]));
        let l_star = l + &alpha;
        let tau = &l_star / l;
        let b2 = sum(&mut (0..n).map(|i| &b_low[[i]] * &b_up[[i]]));
        let tau2 = &tau * &tau;
        let mu = (l * &b2 + &alpha) / (&l_star * &tau2);

        let ell = &f.ell_low;
        let ell_up = &f.ell_up;
        let ell_star_low = Tensor::from_fn(n, "l", |ix| &ell[[ix[0]]] + &b_low[[ix[0]]]);
        let inv_l_star = l_star.recip();
        let ell_star_up = Tensor::from_fn(n, "u", |ix| &y[ix[0]] * &inv_l_star);
        let h_star = f.h.map(|h| h * &tau);
        let g_star = Tensor::from_fn(n, "ll", |ix| {
            let (i, j) = (ix[0], ix[1]);
            &tau * (&f.g[[i, j]] - &ell[[i]] * &ell[[j]]) + &ell_star_low[[i]] * &ell_star_low[[j]]
        });
        let inv_tau = tau.recip();
        let inv_tau2 = tau2.recip();
        let g_star_inv = Tensor::from_fn(n, "uu", |ix| {
            let (i, j) = (ix[0], ix[1]);
            &f.g_inv[[i, j]] * &inv_tau + &mu * &ell_up[[i]] * &ell_up[[j]]
                - &inv_tau2 * (&ell_up[[i]] * &b_up[[j]] + &ell_up[[j]] * &b_up[[i]])
        });

        let inv_l = l.recip();
        let alpha_over_l2 = &alpha * &inv_l * &inv_l;
        let m = Tensor::from_fn(n, "u", |ix| &b_up[[ix[0]]] - &alpha_over_l2 * &y[ix[0]]);
        let nu = Tensor::from_fn(n, "l", |ix| sum(&mut (0..n).map(|j| &f.g[[ix[0], j]] * &m[[j]])));
        let nu_m = sum(&mut (0..n).map(|i| &nu[[i]] * &m[[i]]));
        let phi = Tensor::from_fn(n, "u,l", |ix| {
            let (h, i) = (ix[0], ix[1]);
            kron(h, i) - &y[h] * &ell[[i]] * &inv_l
        });
        let phi_star = Tensor::from_fn(n, "u,l", |ix| {
            let (h, i) = (ix[0], ix[1]);
            &phi[[h, i]] - &y[h] * &nu[[i]] * &inv_l_star
        });

        let omega_t = Tensor::from_fn(n, "ll", |ix| {
            sum(&mut (0..n).map(|h| &b_low[[h]] * &f.cartan[[h, ix[0], ix[1]]]))
        });
        let half_inv_ls = &inv_l_star * 0.5;
        let half_inv_ls2 = &inv_l_star * &inv_l_star * 0.5;
        let a = Tensor::from_fn(n, "u,ll", |ix| {
            let (h, i, j) = (ix[0], ix[1], ix[2]);
            let first = &f.h[[i, j]] * &m[[h]] + &nu[[i]] * &phi[[h, j]] + &phi[[h, i]] * &nu[[j]];
            let second = (&l_star * &omega_t[[i, j]] * 2.0 + &nu[[i]] * &nu[[j]] * 2.0 + &nu_m * &f.h[[i, j]]) * &y[h];
            &half_inv_ls * first - &half_inv_ls2 * second
        });
        let lower_star = |t: &Tensor<Jet>| {
            Tensor::from_fn(n, "lll", |ix| {
                sum(&mut (0..n).map(|h| &g_star[[ix[2], h]] * &t[[h, ix[0], ix[1]]]))
            })
        };
        let a_star_low = lower_star(&a);
        let half_inv_l = &inv_l * 0.5;
        let h_nu_sym = Tensor::from_fn(n, "lll", |ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            (&f.h[[i, j]] * &nu[[k]] + &f.h[[j, k]] * &nu[[i]] + &f.h[[i, k]] * &nu[[j]]) * &half_inv_l
        });
        let a_star_low_direct_formula = Tensor::from_fn(n, "lll", |ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            &h_nu_sym[[i, j, k]] - &omega_t[[i, j]] * &ell_star_low[[k]]
        });
        let cartan_star = Tensor::from_fn(n, "u,ll", |ix| {
            let (h, i, j) = (ix[0], ix[1], ix[2]);
            &f.cartan[[h, i, j]] + &a[[h, i, j]]
        });
        let cartan_star_low = lower_star(&cartan_star);
        let trace_factor = &half_inv_ls * (n as f64 + 1.0);
        let cartan_star_trace = Tensor::from_fn(n, "l", |ix| &f.cartan_trace[[ix[0]]] + &trace_factor * &nu[[ix[0]]]);
        let t_star_low = Tensor::from_fn(n, "lll", |ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            &tau * &f.cartan_low[[i, j, k]] + &h_nu_sym[[i, j, k]]
        });

        let b_cov = {
            let parts: Vec<Tensor<Jet>> = (0..n).map(|i| f.h_cov(&b_low, i)).collect();
            Tensor::from_fn(n, "ll", |ix| parts[ix[0]][[ix[1]]].clone())
        };
        let b_sym = Tensor::from_fn(n, "ll", |ix| (&b_cov[[ix[0], ix[1]]] + &b_cov[[ix[1], ix[0]]]) * 0.5);
        let b_anti = Tensor::from_fn(n, "ll", |ix| (&b_cov[[ix[0], ix[1]]] - &b_cov[[ix[1], ix[0]]]) * 0.5);
        let contract = |t: &Tensor<Jet>| Tensor::from_fn(n, "l", |ix| sum(&mut (0..n).map(|k| &t[[ix[0], k]] * &y[k])));
        let b_i0 = contract(&b_cov);
        let b_sym_i0 = contract(&b_sym);
        let b_anti_i0 = contract(&b_anti);
        let b_00 = sum(&mut (0..n).map(|i| &b_i0[[i]] * &y[i]));

        let h_star_mixed = Tensor::from_fn(n, "u,l", |ix| {
            sum(&mut (0..n).map(|j| &g_star_inv[[ix[0], j]] * &h_star[[ix[1], j]]))
        });
        let n0 = Tensor::from_fn(n, "u", |ix| {
            let h = ix[0];
            &ell_star_up[[h]] * &b_00
                - &l_star * sum(&mut (0..n).map(|r| &g_star_inv[[h, r]] * &b_anti_i0[[r]])) * 2.0
        });
        let inv_2ls = &half_inv_ls;
        let n_conn = Tensor::from_fn(n, "u,l", |ix| {
            let (h, i) = (ix[0], ix[1]);
            let t1 = sum(&mut (0..n).map(|k| {
                &g_star_inv[[h, k]] * (&l_star * &b_anti[[i, k]] - &ell_star_low[[i]] * &b_anti_i0[[k]])
            }));
            let t2 = &ell_star_up[[h]] * &b_sym_i0[[i]];
            let t3 = &h_star_mixed[[h, i]] * &b_00 * inv_2ls;
            let t4 = sum(&mut (0..n).flat_map(|r| (0..n).map(move |k| (r, k))).map(|(r, k)| {
                &g_star_inv[[r, k]] * &cartan_star[[h, i, r]] * &b_anti_i0[[k]]
            })) * &l_star
                * 2.0;
            t1 + t2 + t3 + t4
        });
        let b_conn = Tensor::from_fn(n, "u,ll", |ix| {
            let (h, i, j) = (ix[0], ix[1], ix[2]);
            let t1 = sum(&mut (0..n).map(|r| {
                &g_star_inv[[h, r]] * (&ell_star_low[[i]] * &b_anti[[j, r]] + &ell_star_low[[j]] * &b_anti[[i, r]])
            }));
            let t2 = &ell_star_up[[h]] * &b_sym[[i, j]];
            let t3 = (&b_i0[[i]] * &h_star_mixed[[h, j]] + &b_i0[[j]] * &h_star_mixed[[h, i]]
                - sum(&mut (0..n).map(|k| &g_star_inv[[h, k]] * &b_i0[[k]])) * &h_star[[i, j]])
                * inv_2ls;
            let t4 = sum(&mut (0..n).flat_map(|p| (0..n).map(move |r| (p, r))).map(|(p, r)| {
                &g_star_inv[[h, p]]
                    * (&cartan_star_low[[i, j, r]] * &n_conn[[r, p]] - &cartan_star_low[[i, r, p]] * &n_conn[[r, j]])
            }));
            t1 + t2 + t3 + t4
        });

        Ok(StarQuantities {
            n,
            b_low,
            b_up,
            alpha,
            l_star,
            tau,
            b2,
            mu,
            ell_star_low,
            ell_star_up,
            h_star,
            g_star,
            g_star_inv,
            m,
            nu,
            nu_m,
            phi,
            phi_star,
            omega_t,
            a,
            a_star_low,
            a_star_low_direct_formula,
            cartan_star,
            cartan_star_low,
            cartan_star_trace,
            t_star_low,
            b_cov,
            b_sym,
            b_anti,
            b_i0,
            b_sym_i0,
            b_anti_i0,
            b_00,
            h_star_mixed,
            n0,
            n_conn,
            b_conn,
        })
    }
}

/// Connection differences read off two independent engine runs.
#[derive(Debug, Clone)]
pub struct DirectDifferences {
    /// `C*^h_ij - C^h_ij`
    pub a: Tensor<Jet>,
    /// `Γ̄*^h_ij + (N*^r_i - N^r_i) C*^h_rj - Γ̄^h_ij`: `∇*_{e_i} ∂̄_j - ∇_{e_i} ∂̄_j` along the base `e_i`
    pub b: Tensor<Jet>,
    /// `N*^h_i - N^h_i`
    pub n_conn: Tensor<Jet>,
    /// `2 (G*^h - G^h)`
    pub n0: Tensor<Jet>,
}

impl DirectDifferences {
    pub fn compute(base: &Frame, star: &Frame) -> DirectDifferences {
        let n = base.n;
        let a = Tensor::from_fn(n, "u,ll", |ix| star.cartan.get(ix) - base.cartan.get(ix));
        let n_conn = Tensor::from_fn(n, "u,l", |ix| star.nonlinear.get(ix) - base.nonlinear.get(ix));
        let n0 = Tensor::from_fn(n, "u", |ix| (star.spray.get(ix) - base.spray.get(ix)) * 2.0);
        let b = Tensor::from_fn(n, "u,ll", |ix| {
            let (h, i, j) = (ix[0], ix[1], ix[2]);
            &star.gamma_bar[[h, i, j]] - &base.gamma_bar[[h, i, j]]
                + jet_sum((0..n).map(|r| &n_conn[[r, i]] * &star.cartan[[h, r, j]]))
        });
        DirectDifferences { a, b, n_conn, n0 }
    }
}

/// Base frame, star frame and both routes for the difference tensors at one point.
#[derive(Debug, Clone)]
pub struct RandersPoint {
    pub point: SlitPoint,
    pub base: Frame,
    pub star_frame: Frame,
    pub star: StarQuantities,
    pub direct: DirectDifferences,
}

impl RandersPoint {
    pub fn compute(bundle: &RandersBundle, p: &SlitPoint, order: usize) -> Result<RandersPoint, RandersError> {
        let base = Frame::compute(bundle.base(), p, order)?;
        let star_frame = Frame::compute(bundle.star(), p, order)?;
        let star = StarQuantities::compute(bundle, &base)?;
        let direct = DirectDifferences::compute(&base, &star_frame);
        Ok(RandersPoint {
            point: p.clone(),
            base,
            star_frame,
            star,
            direct,
        })
    }

    /// Residual tensor of the local form of `(∇_{βX̄} ω)(Ȳ)`:
    /// `b_ij - B^k_ij ℓ*_k - A^k_rj N^r_i ℓ*_k - L⁻¹ N^r_i h_rj + b_k N^r_i T^k_rj`.
    pub fn eq15_residual_tensor(&self) -> Tensor<f64> {
        let s = &self.star;
        let f = &self.base;
        let n = f.n;
        let inv_l = 1.0 / f.l.value();
        let v = |t: &Tensor<Jet>| t.value();
        let (bcov, bconn, a, nconn, ls, h, c, b) = (
            v(&s.b_cov),
            v(&s.b_conn),
            v(&s.a),
            v(&s.n_conn),
            v(&s.ell_star_low),
            v(&f.h),
            v(&f.cartan),
            v(&s.b_low),
        );
        Tensor::from_fn(n, "ll", |ix| {
            let (i, j) = (ix[0], ix[1]);
            let mut rhs = 0.0;
            for k in 0..n {
                rhs += bconn[[k, i, j]] * ls[[k]];
                for r in 0..n {
                    rhs += a[[k, r, j]] * nconn[[r, i]] * ls[[k]];
                    rhs -= b[[k]] * nconn[[r, i]] * c[[k, r, j]];
                }
            }
            for r in 0..n {
                rhs += inv_l * nconn[[r, i]] * h[[r, j]];
            }
            bcov[[i, j]] - rhs
        })
    }
}

impl RandersPoint {
    /// `b_ij - B^k_ij ℓ*_k - L⁻¹ N^r_i h_rj`, the form `(∇_{βX̄} ω)(Ȳ) = ℓ*(B(X̄,Ȳ)) + L⁻¹ h(N(X̄),Ȳ)`
    /// obtained from `∇*_{β*X̄} ℓ* = 0` and `U(β*X̄, Ȳ) = B(X̄,Ȳ) - A(N(X̄),Ȳ)`.
    pub fn lemma3b_corrected_residual_tensor(&self) -> Tensor<f64> {
        let s = &self.star;
        let f = &self.base;
        let n = f.n;
        let inv_l = 1.0 / f.l.value();
        let (bcov, bconn, nconn, ls, h) = (
            s.b_cov.value(),
            s.b_conn.value(),
            s.n_conn.value(),
            s.ell_star_low.value(),
            f.h.value(),
        );
        Tensor::from_fn(n, "ll", |ix| {
            let (i, j) = (ix[0], ix[1]);
            let rhs: f64 = (0..n)
                .map(|k| bconn[[k, i, j]] * ls[[k]] + inv_l * nconn[[k, i]] * h[[k, j]])
                .sum();
            bcov[[i, j]] - rhs
        })
    }
}

fn randers_point(bundle: &RandersBundle, p: &SlitPoint) -> Result<RandersPoint, RandersError> {
    RandersPoint::compute(bundle, p, DEFAULT_JET_ORDER)
}

fn base_and_star(bundle: &RandersBundle, p: &SlitPoint) -> Result<(Frame, StarQuantities), RandersError> {
    let f = Frame::compute(bundle.base(), p, DEFAULT_JET_ORDER)?;
    let s = StarQuantities::compute(bundle, &f)?;
    Ok((f, s))
}

/// Closed-form `(ℓ*, h*, g*, g*⁻¹)` and `μ`.
#[derive(Debug, Clone, Serialize)]
pub struct StarTensors {
    pub ell_star: TensorValue,
    pub h_star: TensorValue,
    pub g_star: TensorValue,
    pub g_star_inv: TensorValue,
    pub mu: f64,
    pub tau: f64,
}

pub fn star_tensors_closed_form(bundle: &RandersBundle, p: &SlitPoint) -> Result<StarTensors, RandersError> {
    let (_, s) = base_and_star(bundle, p)?;
    Ok(StarTensors {
        ell_star: TensorValue::new(p, s.ell_star_low.value()),
        h_star: TensorValue::new(p, s.h_star.value()),
        g_star: TensorValue::new(p, s.g_star.value()),
        g_star_inv: TensorValue::new(p, s.g_star_inv.value()),
        mu: s.mu.value(),
        tau: s.tau.value(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MNuPhi {
    pub m: TensorValue,
    pub nu: TensorValue,
    pub phi: TensorValue,
    pub phi_star: TensorValue,
    pub b2: f64,
}

pub fn m_nu_phi(bundle: &RandersBundle, p: &SlitPoint) -> Result<MNuPhi, RandersError> {
    let (_, s) = base_and_star(bundle, p)?;
    Ok(MNuPhi {
        m: TensorValue::new(p, s.m.value()),
        nu: TensorValue::new(p, s.nu.value()),
        phi: TensorValue::new(p, s.phi.value()),
        phi_star: TensorValue::new(p, s.phi_star.value()),
        b2: s.b2.value(),
    })
}

/// `(ω_i, (∇_{γ∂̄_i} ω)_j, (∇_{β∂̄_i} ω)_j)`.
pub fn omega_and_derivatives(
    bundle: &RandersBundle,
    p: &SlitPoint,
) -> Result<(TensorValue, TensorValue, TensorValue), RandersError> {
    let (f, s) = base_and_star(bundle, p)?;
    let n = f.n;
    let vertical: Vec<Tensor<f64>> = (0..n).map(|i| f.v_cov(&s.b_low, i).value()).collect();
    let v = Tensor::from_fn(n, "ll", |ix| vertical[ix[0]][[ix[1]]]);
    Ok((
        TensorValue::new(p, s.b_low.value()),
        TensorValue::new(p, v),
        TensorValue::new(p, s.b_cov.value()),
    ))
}

/// `(A^h_ij, A*_ijk)` from the closed form.
pub fn a_closed_form(bundle: &RandersBundle, p: &SlitPoint) -> Result<(TensorValue, TensorValue), RandersError> {
    let (_, s) = base_and_star(bundle, p)?;
    Ok((TensorValue::new(p, s.a.value()), TensorValue::new(p, s.a_star_low.value())))
}

#[derive(Debug, Clone, Serialize)]
pub struct BDerivatives {
    pub b_ij: TensorValue,
    pub b_sym: TensorValue,
    pub b_anti: TensorValue,
    pub b_i0: TensorValue,
    pub b_00: f64,
}

pub fn b_derivative_matrix(bundle: &RandersBundle, p: &SlitPoint) -> Result<BDerivatives, RandersError> {
    let (_, s) = base_and_star(bundle, p)?;
    Ok(BDerivatives {
        b_ij: TensorValue::new(p, s.b_cov.value()),
        b_sym: TensorValue::new(p, s.b_sym.value()),
        b_anti: TensorValue::new(p, s.b_anti.value()),
        b_i0: TensorValue::new(p, s.b_i0.value()),
        b_00: s.b_00.value(),
    })
}

/// `(N₀^h, N^h_i, B^h_ij)` from the closed forms.
pub fn n0_n_b_closed_form(
    bundle: &RandersBundle,
    p: &SlitPoint,
) -> Result<(TensorValue, TensorValue, TensorValue), RandersError> {
    let (_, s) = base_and_star(bundle, p)?;
    Ok((
        TensorValue::new(p, s.n0.value()),
        TensorValue::new(p, s.n_conn.value()),
        TensorValue::new(p, s.b_conn.value()),
    ))
}

/// `(A, B, N, N₀)` from two independent engine runs.
pub fn difference_tensors_direct(
    bundle: &RandersBundle,
    p: &SlitPoint,
) -> Result<(TensorValue, TensorValue, TensorValue, TensorValue), RandersError> {
    let rp = randers_point(bundle, p)?;
    let d = &rp.direct;
    Ok((
        TensorValue::new(p, d.a.value()),
        TensorValue::new(p, d.b.value()),
        TensorValue::new(p, d.n_conn.value()),
        TensorValue::new(p, d.n0.value()),
    ))
}

/// Largest absolute component of the local form of `(∇_{βX̄} ω)(Ȳ)` moved to one side.
pub fn eq15_residual(bundle: &RandersBundle, p: &SlitPoint) -> Result<f64, RandersError> {
    Ok(randers_point(bundle, p)?.eq15_residual_tensor().max_abs())
}

/// `C*_i = C_i + (n+1)/(2L*) ν_i`.
pub fn cstar_closed_form(bundle: &RandersBundle, p: &SlitPoint) -> Result<TensorValue, RandersError> {
    let (_, s) = base_and_star(bundle, p)?;
    Ok(TensorValue::new(p, s.cartan_star_trace.value()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundle(base: &str, b: &[&str]) -> RandersBundle {
        let base = MetricField::parse(base, 2).unwrap();
        RandersBundle::new(base, OneFormField::parse(b, 2).unwrap()).unwrap()
    }

    fn euclid(b: &[&str]) -> RandersBundle {
        bundle("sqrt(y1^2 + y2^2)", b)
    }

    fn pt(x: [f64; 2], y: [f64; 2]) -> SlitPoint {
        SlitPoint::new(x.to_vec(), y.to_vec()).unwrap()
    }

    fn max_diff(a: &Tensor<Jet>, b: &Tensor<Jet>) -> f64 {
        a.value()
            .data()
            .iter()
            .zip(b.value().data())
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn star_metric_values() {
        let b = euclid(&["0.1", "0"]);
        let star = build_star_metric(&b, &pt([0.0, 0.0], [0.0, 1.0])).unwrap();
        assert!((star.value(&[0.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((star.value(&[0.0, 0.0], &[1.0, 0.0]).unwrap() - 1.1).abs() < 1e-15);
        let strong = euclid(&["1.5", "0"]);
        assert!(matches!(
            build_star_metric(&strong, &pt([0.0, 0.0], [1.0, 0.0])),
            Err(RandersError::Inadmissible { .. })
        ));
    }

    #[test]
    fn form_must_be_y_free() {
        assert!(matches!(
            OneFormField::parse(&["y1", "0"], 2),
            Err(RandersError::FormDependsOnY { index: 0 })
        ));
    }

    #[test]
    fn closed_form_star_tensors() {
        let b = euclid(&["0.1", "0"]);
        let t = star_tensors_closed_form(&b, &pt([0.0, 0.0], [0.0, 1.0])).unwrap();
        let g = &t.g_star.components;
        for (ix, want) in [([0, 0], 1.01), ([0, 1], 0.1), ([1, 0], 0.1), ([1, 1], 1.0)] {
            assert!((g[ix] - want).abs() < 1e-12);
        }
        let t = star_tensors_closed_form(&b, &pt([0.0, 0.0], [1.0, 0.0])).unwrap();
        let g = &t.g_star.components;
        assert!((g[[0, 0]] - 1.21).abs() < 1e-12 && (g[[1, 1]] - 1.1).abs() < 1e-12 && g[[0, 1]].abs() < 1e-12);
        let h = &t.h_star.components;
        assert!(h[[0, 0]].abs() < 1e-12 && (h[[1, 1]] - 1.1).abs() < 1e-12);
        assert!((t.ell_star.components[[0]] - 1.1).abs() < 1e-12);
        assert!((t.tau - 1.1).abs() < 1e-12);

        let zero = euclid(&["0", "0"]);
        let t = star_tensors_closed_form(&zero, &pt([0.3, 0.1], [0.4, -1.0])).unwrap();
        assert!((t.tau - 1.0).abs() < 1e-15 && t.mu.abs() < 1e-15);
    }

    #[test]
    fn m_nu_orthogonal_and_parallel() {
        let b = euclid(&["0.1", "0"]);
        let r = m_nu_phi(&b, &pt([0.0, 0.0], [1.0, 0.0])).unwrap();
        assert!(r.m.components.max_abs() < 1e-15 && r.nu.components.max_abs() < 1e-15);
        let r = m_nu_phi(&b, &pt([0.0, 0.0], [0.0, 1.0])).unwrap();
        assert!((r.m.components[[0]] - 0.1).abs() < 1e-15 && r.m.components[[1]].abs() < 1e-15);
        let nu_m: f64 = (0..2).map(|i| r.m.components[[i]] * r.nu.components[[i]]).sum();
        assert!((nu_m - 0.01).abs() < 1e-15);
    }

    #[test]
    fn cstar_trace_on_flat_example() {
        let b = euclid(&["0.1", "0"]);
        let c = cstar_closed_form(&b, &pt([0.0, 0.0], [0.0, 1.0])).unwrap();
        assert!((c.components[[0]] - 0.15).abs() < 1e-12 && c.components[[1]].abs() < 1e-12);
    }

    #[test]
    fn b_derivatives_of_rotation_form() {
        let b = euclid(&["-0.1*x2", "0.1*x1"]);
        let d = b_derivative_matrix(&b, &pt([0.3, -0.2], [0.6, 0.8])).unwrap();
        assert!((d.b_anti.components[[0, 1]] - 0.1).abs() < 1e-12);
        assert!((d.b_anti.components[[1, 0]] + 0.1).abs() < 1e-12);
        assert!(d.b_sym.components.max_abs() < 1e-12);
    }

    #[test]
    fn zero_form_gives_zero_differences() {
        let b = euclid(&["0", "0"]);
        let p = pt([0.2, 0.4], [1.0, 0.5]);
        let (a, bb, n, n0) = difference_tensors_direct(&b, &p).unwrap();
        for t in [a, bb, n, n0] {
            assert!(t.components.max_abs() < 1e-14);
        }
        assert_eq!(eq15_residual(&b, &p).unwrap(), 0.0);
    }

    fn instances() -> Vec<RandersBundle> {
        vec![
            euclid(&["0.1", "0"]),
            euclid(&["0.5*cos(x1)", "0"]),
            euclid(&["-0.1*x2", "0.1*x1"]),
            bundle("exp(x1)*sqrt(y1^2 + y2^2)", &["0.1", "0"]),
            bundle(
                "sqrt(y1^2 + y2^2) + 0.2*sqrt(y1^2 + (1 + 0.5*x1^2)*y2^2)",
                &["-0.1*x2", "0.1*x1 + 0.05*x2"],
            ),
        ]
    }

    #[test]
    fn closed_forms_match_engine_on_star_metric() {
        let points = [pt([0.1, -0.2], [0.7, 0.4]), pt([-0.3, 0.25], [-0.2, 1.1]), pt([0.4, 0.1], [1.3, -0.9])];
        for b in instances() {
            for p in &points {
                let rp = RandersPoint::compute(&b, p, DEFAULT_JET_ORDER).unwrap();
                let s = &rp.star;
                let sf = &rp.star_frame;
                let label = b.star().expr().to_string();
                assert!(max_diff(&s.g_star, &sf.g) < 1e-12, "g* {label}");
                assert!(max_diff(&s.g_star_inv, &sf.g_inv) < 1e-12, "g*^-1 {label}");
                assert!(max_diff(&s.cartan_star, &sf.cartan) < 1e-10, "C* {label}");
                assert!(max_diff(&s.a_star_low, &s.a_star_low_direct_formula) < 1e-10, "A* {label}");
                assert!(max_diff(&s.t_star_low, &sf.cartan_low) < 1e-10, "T* {label}");
                assert!(max_diff(&s.cartan_star_trace, &sf.cartan_trace) < 1e-10, "C*_i {label}");
                assert!(max_diff(&s.n0, &rp.direct.n0) < 1e-9, "N0 {label}");
                assert!(max_diff(&s.n_conn, &rp.direct.n_conn) < 1e-9, "N {label}");
                assert!(max_diff(&s.b_conn, &rp.direct.b) < 1e-9, "B {label}");
                assert!(rp.lemma3b_corrected_residual_tensor().max_abs() < 1e-9, "lemma 3(b) {label}");
            }
        }
    }

    #[test]
    fn eq15_holds_on_riemannian_bases() {
        let p = pt([0.4, 0.1], [1.3, -0.9]);
        for b in instances().into_iter().take(4) {
            let rp = RandersPoint::compute(&b, &p, DEFAULT_JET_ORDER).unwrap();
            assert!(rp.eq15_residual_tensor().max_abs() < 1e-9);
        }
    }

    #[test]
    fn eq15_misses_twice_the_torsion_term_on_finsler_base() {
        let b = instances().pop().unwrap();
        let rp = RandersPoint::compute(&b, &pt([0.4, 0.1], [1.3, -0.9]), DEFAULT_JET_ORDER).unwrap();
        let r = rp.eq15_residual_tensor();
        let c = rp.base.cartan.value();
        let n = rp.star.n_conn.value();
        let bl = rp.star.b_low.value();
        let mut largest = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                let mut t = 0.0;
                for k in 0..2 {
                    for s in 0..2 {
                        t += 2.0 * bl[[k]] * n[[s, i]] * c[[k, s, j]];
                    }
                }
                largest = largest.max(t.abs());
                assert!((r[[i, j]] - t).abs() < 1e-12);
            }
        }
        assert!(largest > 1e-7);
    }
}
