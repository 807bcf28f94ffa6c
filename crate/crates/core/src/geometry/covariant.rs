use crate::jet::{jet_sum, Jet};
use crate::tensor::{Slot, Tensor};

use super::Frame;

impl Frame {
    /// `(∇_{e_i} T)`: horizontal covariant derivative of a π-tensor field.
    pub fn h_cov(&self, t: &Tensor<Jet>, i: usize) -> Tensor<Jet> {
        self.covariant(t, i, |f| self.delta(f, i), &self.gamma_bar)
    }

    /// `(∇_{∂̇_i} T)`: vertical covariant derivative of a π-tensor field.
    pub fn v_cov(&self, t: &Tensor<Jet>, i: usize) -> Tensor<Jet> {
        self.covariant(t, i, |f| self.dy(f, i), &self.cartan)
    }

    /// Horizontal derivative along `β η̄ = y^i e_i`.
    pub fn h_cov_along_y(&self, t: &Tensor<Jet>) -> Tensor<Jet> {
        let parts: Vec<Tensor<Jet>> = (0..self.n).map(|i| self.h_cov(t, i)).collect();
        let sig = t.variance().to_string();
        Tensor::from_fn(self.n, &sig, |ix| jet_sum((0..self.n).map(|i| parts[i].get(ix) * &self.y[i])))
    }

    /// `coeffs[[h, dir, j]]` are the connection coefficients of `∇_{dir} ∂̄_j = coeffs^h ∂̄_h`.
    fn covariant(
        &self,
        t: &Tensor<Jet>,
        dir: usize,
        derive: impl Fn(&Jet) -> Jet,
        coeffs: &Tensor<Jet>,
    ) -> Tensor<Jet> {
        let n = self.n;
        let slots = t.variance().slots().to_vec();
        let sig = t.variance().to_string();
        Tensor::from_fn(n, &sig, |ix| {
            let mut acc = derive(t.get(ix));
            let mut idx = ix.to_vec();
            for (s, slot) in slots.iter().enumerate() {
                let original = ix[s];
                for m in 0..n {
                    idx[s] = m;
                    match slot {
                        Slot::Upper => acc = acc + &coeffs[[original, dir, m]] * t.get(&idx),
                        Slot::Lower => acc = acc - &coeffs[[m, dir, original]] * t.get(&idx),
                    }
                }
                idx[s] = original;
            }
            acc
        })
    }
}
