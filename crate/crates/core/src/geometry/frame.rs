use crate::expr::EvalContext;
use crate::jet::{jet_sum, Jet};
use crate::tensor::Tensor;

use super::{GeometryError, MetricField, SlitPoint, DEGENERACY_THRESHOLD};

/// Every base-metric quantity at one point, each carried as a jet so that
/// it can be differentiated further.
#[derive(Debug, Clone)]
pub struct Frame {
    pub n: usize,
    pub point: SlitPoint,
    pub l: Jet,
    /// Coordinate jets `y^i`.
    pub y: Vec<Jet>,
    pub g: Tensor<Jet>,
    pub g_inv: Tensor<Jet>,
    pub ell_up: Tensor<Jet>,
    pub ell_low: Tensor<Jet>,
    pub h: Tensor<Jet>,
    pub cartan_low: Tensor<Jet>,
    pub cartan: Tensor<Jet>,
    pub cartan_trace: Tensor<Jet>,
    pub spray: Tensor<Jet>,
    pub nonlinear: Tensor<Jet>,
    pub gamma_bar: Tensor<Jet>,
    pub gamma: Tensor<Jet>,
}

impl Frame {
    /// Builds the frame from jets of `L` truncated at `order` (at least 3).
    pub fn compute(metric: &MetricField, p: &SlitPoint, order: usize) -> Result<Frame, GeometryError> {
        if order < 3 {
            return Err(GeometryError::InsufficientOrder { needed: 3, got: order });
        }
        let n = metric.dim();
        let ctx = EvalContext::full(n, order);
        let l = metric.jet(p, &ctx)?;
        if l.value() <= 0.0 || !l.value().is_finite() {
            return Err(GeometryError::NonPositive(l.value()));
        }
        let vars = ctx.bind(&p.x, &p.y)?;
        Frame::from_metric_jet(l, vars.y, p.clone())
    }

    fn from_metric_jet(l: Jet, y: Vec<Jet>, point: SlitPoint) -> Result<Frame, GeometryError> {
        let n = point.dim();
        let dy = |f: &Jet, i: usize| f.d(n + i);
        let dx = |f: &Jet, i: usize| f.d(i);

        let energy = &l * &l;
        let grad_y: Vec<Jet> = (0..n).map(|i| dy(&energy, i)).collect();
        let g = Tensor::from_fn(n, "ll", |ix| dy(&grad_y[ix[0]], ix[1]) * 0.5);
        check_positive_definite(&g.value())?;
        let g_inv = invert(&g);

        let inv_l = l.recip();
        let ell_up = Tensor::from_fn(n, "u", |ix| &y[ix[0]] * &inv_l);
        let ell_low = Tensor::from_fn(n, "l", |ix| jet_sum((0..n).map(|j| &g[[ix[0], j]] * &ell_up[[j]])));
        let h = Tensor::from_fn(n, "ll", |ix| &g[[ix[0], ix[1]]] - &ell_low[[ix[0]]] * &ell_low[[ix[1]]]);

        let cartan_low = Tensor::from_fn(n, "lll", |ix| dy(&g[[ix[0], ix[1]]], ix[2]) * 0.5);
        let cartan = Tensor::from_fn(n, "u,ll", |ix| {
            jet_sum((0..n).map(|m| &g_inv[[ix[0], m]] * &cartan_low[[m, ix[1], ix[2]]]))
        });
        let cartan_trace = Tensor::from_fn(n, "l", |ix| jet_sum((0..n).map(|j| cartan[[j, ix[0], j]].clone())));

        // G^i = 1/4 g^il (y^k ∂_k ∂̇_l L² - ∂_l L²)
        let spray_rhs: Vec<Jet> = (0..n)
            .map(|l_| {
                let transport = jet_sum((0..n).map(|k| &y[k] * dx(&grad_y[l_], k)));
                transport - dx(&energy, l_)
            })
            .collect();
        let spray = Tensor::from_fn(n, "u", |ix| {
            jet_sum((0..n).map(|l_| &g_inv[[ix[0], l_]] * &spray_rhs[l_])) * 0.25
        });
        let nonlinear = Tensor::from_fn(n, "u,l", |ix| dy(&spray[[ix[0]]], ix[1]));

        // Γ̄^h_ij = 1/2 g^hk (δ_i g_jk + δ_j g_ik - δ_k g_ij)
        let delta = |f: &Jet, i: usize| dx(f, i) - jet_sum((0..n).map(|r| &nonlinear[[r, i]] * dy(f, r)));
        let dg = Tensor::from_fn(n, "lll", |ix| delta(&g[[ix[1], ix[2]]], ix[0]));
        let christoffel_low = Tensor::from_fn(n, "lll", |ix| {
            (&dg[[ix[1], ix[2], ix[0]]] + &dg[[ix[2], ix[1], ix[0]]] - &dg[[ix[0], ix[1], ix[2]]]) * 0.5
        });
        let gamma_bar = Tensor::from_fn(n, "u,ll", |ix| {
            jet_sum((0..n).map(|k| &g_inv[[ix[0], k]] * &christoffel_low[[k, ix[1], ix[2]]]))
        });
        let gamma = Tensor::from_fn(n, "u,ll", |ix| {
            let (h, i, j) = (ix[0], ix[1], ix[2]);
            &gamma_bar[[h, i, j]] + jet_sum((0..n).map(|r| &nonlinear[[r, i]] * &cartan[[h, r, j]]))
        });

        Ok(Frame {
            n,
            point,
            l,
            y,
            g,
            g_inv,
            ell_up,
            ell_low,
            h,
            cartan_low,
            cartan,
            cartan_trace,
            spray,
            nonlinear,
            gamma_bar,
            gamma,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `∂_i f`
    pub fn dx(&self, f: &Jet, i: usize) -> Jet {
        f.d(i)
    }

    /// `∂̇_i f`
    pub fn dy(&self, f: &Jet, i: usize) -> Jet {
        f.d(self.n + i)
    }

    /// `e_i f = ∂_i f - N^r_i ∂̇_r f`
    pub fn delta(&self, f: &Jet, i: usize) -> Jet {
        self.dx(f, i) - jet_sum((0..self.n).map(|r| &self.nonlinear[[r, i]] * self.dy(f, r)))
    }

    pub fn zero(&self) -> Jet {
        self.l.zero_like()
    }

    pub fn constant(&self, v: f64) -> Jet {
        self.l.constant_like(v)
    }

    /// Contraction of the first lower slot of a vector-valued `(1,1)` field with `y`:
    /// `T^h_{i} y^i`.
    pub fn contract_y_first(&self, t: &Tensor<Jet>) -> Tensor<Jet> {
        Tensor::from_fn(self.n, "u", |ix| jet_sum((0..self.n).map(|i| &t[[ix[0], i]] * &self.y[i])))
    }

    /// Horizontal torsion `S^h_ij = Γ̄^h_ij - Γ̄^h_ji`.
    pub fn h_torsion(&self) -> Tensor<f64> {
        Tensor::from_fn(self.n, "u,ll", |ix| {
            self.gamma_bar[[ix[0], ix[1], ix[2]]].value() - self.gamma_bar[[ix[0], ix[2], ix[1]]].value()
        })
    }

    /// Deflection `K(e_i)^h = Γ̄^h_ij y^j - N^h_i`.
    pub fn deflection(&self) -> Tensor<f64> {
        Tensor::from_fn(self.n, "u,l", |ix| {
            let (h, i) = (ix[0], ix[1]);
            (0..self.n).map(|j| self.gamma_bar[[h, i, j]].value() * self.point.y[j]).sum::<f64>()
                - self.nonlinear[[h, i]].value()
        })
    }
}

fn check_positive_definite(g: &Tensor<f64>) -> Result<(), GeometryError> {
    let n = g.dim();
    // Cholesky; the product of squared pivots is the determinant
    let mut lower = vec![vec![0.0; n]; n];
    let mut det = 1.0;
    for i in 0..n {
        for j in 0..=i {
            let mut s = g[[i, j]];
            for k in 0..j {
                s -= lower[i][k] * lower[j][k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return Err(GeometryError::Degenerate { det: s.min(0.0) });
                }
                det *= s;
                lower[i][i] = s.sqrt();
            } else {
                lower[i][j] = s / lower[j][j];
            }
        }
    }
    if det < DEGENERACY_THRESHOLD {
        return Err(GeometryError::Degenerate { det });
    }
    Ok(())
}

/// Gauss-Jordan inverse of a symmetric positive definite jet matrix.
fn invert(m: &Tensor<Jet>) -> Tensor<Jet> {
    let n = m.dim();
    let mut a: Vec<Vec<Jet>> = (0..n).map(|i| (0..n).map(|j| m[[i, j]].clone()).collect()).collect();
    let zero = m[[0, 0]].zero_like();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { zero.constant_like(1.0) } else { zero.clone() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].value().abs().total_cmp(&a[s][col].value().abs()))
            .expect("non-empty pivot range");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].recip();
        for j in 0..n {
            a[col][j] = &a[col][j] * &p;
            inv[col][j] = &inv[col][j] * &p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                a[r][j] = &a[r][j] - &factor * &a[col][j];
                inv[r][j] = &inv[r][j] - &factor * &inv[col][j];
            }
        }
    }
    Tensor::from_fn(n, "uu", |ix| inv[ix[0]][ix[1]].clone())
}

/// Spray coefficients `G^i(x, y)` from a second-order jet; used by the geodesic integrator.
pub fn spray_values(metric: &MetricField, x: &[f64], y: &[f64]) -> Result<Vec<f64>, GeometryError> {
    let n = metric.dim();
    let p = SlitPoint::new(x.to_vec(), y.to_vec())?;
    let ctx = EvalContext::full(n, 2);
    let l = metric.jet(&p, &ctx)?;
    if l.value() <= 0.0 {
        return Err(GeometryError::NonPositive(l.value()));
    }
    let energy = &l * &l;
    let grad_y: Vec<Jet> = (0..n).map(|i| energy.d(n + i)).collect();
    let mut g = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for l_ in 0..n {
        for j in 0..n {
            g[l_][j] = 0.5 * grad_y[l_].d(n + j).value();
        }
        let transport: f64 = (0..n).map(|k| y[k] * grad_y[l_].d(k).value()).sum();
        rhs[l_] = 0.25 * (transport - energy.d(l_).value());
    }
    check_positive_definite(&Tensor::from_fn(n, "ll", |ix| g[ix[0]][ix[1]]))?;
    Ok(solve(g, rhs))
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .expect("non-empty pivot range");
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for j in col..n {
                a[r][j] -= f * a[col][j];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}
