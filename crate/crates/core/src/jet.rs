//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] stores the Taylor coefficients `c_a = (∂^a f)/a!` of a scalar
//! function around a base point, for every multi-index `a` with `|a| <= order`.
//! Differentiating a jet lowers its order by one, so a jet evaluated once at
//! order `k` carries every mixed partial up to `k` and derived quantities keep
//! whatever derivative depth is left.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

/// Monomial layout and product tables for a fixed number of seed variables
/// and maximal order. Shared between all jets of one evaluation.
pub struct JetSpace {
    nvars: usize,
    order: usize,
    exponents: Vec<Vec<u8>>,
    /// `degree_start[d]` is the index of the first monomial of total degree `d`.
    degree_start: Vec<usize>,
    /// CSR layout: pairs contributing to monomial `k` live in
    /// `pairs[pair_start[k]..pair_start[k + 1]]`.
    pair_start: Vec<usize>,
    pairs: Vec<(u32, u32)>,
    /// `derivative[v][t] = (source, factor)` for target monomials of degree < order.
    derivative: Vec<Vec<(u32, f64)>>,
}

impl JetSpace {
    /// Returns the shared space for `nvars` seeds truncated at `order`.
    pub fn shared(nvars: usize, order: usize) -> Arc<JetSpace> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetSpace>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("jet space cache poisoned");
        guard
            .entry((nvars, order))
            .or_insert_with(|| Arc::new(JetSpace::build(nvars, order)))
            .clone()
    }

    fn build(nvars: usize, order: usize) -> JetSpace {
        let mut exponents: Vec<Vec<u8>> = Vec::new();
        let mut degree_start = Vec::with_capacity(order + 2);
        for d in 0..=order {
            degree_start.push(exponents.len());
            let mut current = vec![0u8; nvars];
            push_compositions(&mut exponents, &mut current, 0, d);
        }
        degree_start.push(exponents.len());

        let index: HashMap<Vec<u8>, usize> =
            exponents.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let degree = |e: &[u8]| e.iter().map(|&v| v as usize).sum::<usize>();

        let len = exponents.len();
        let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); len];
        let mut sum = vec![0u8; nvars];
        for i in 0..len {
            let di = degree(&exponents[i]);
            for j in 0..degree_start[order + 1 - di] {
                for v in 0..nvars {
                    sum[v] = exponents[i][v] + exponents[j][v];
                }
                let k = index[&sum];
                buckets[k].push((i as u32, j as u32));
            }
        }
        let mut pair_start = Vec::with_capacity(len + 1);
        let mut pairs = Vec::new();
        for bucket in buckets {
            pair_start.push(pairs.len());
            pairs.extend(bucket);
        }
        pair_start.push(pairs.len());

        let mut derivative = Vec::with_capacity(nvars);
        let lower = if order == 0 { 0 } else { degree_start[order] };
        for v in 0..nvars {
            let mut table = Vec::with_capacity(lower);
            for t in 0..lower {
                let mut e = exponents[t].clone();
                e[v] += 1;
                let src = index[&e];
                table.push((src as u32, e[v] as f64));
            }
            derivative.push(table);
        }

        JetSpace {
            nvars,
            order,
            exponents,
            degree_start,
            pair_start,
            pairs,
            derivative,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of coefficients of a jet of the given order.
    pub fn len_for(&self, order: usize) -> usize {
        self.degree_start[order + 1]
    }

    pub fn exponents(&self, index: usize) -> &[u8] {
        &self.exponents[index]
    }

    /// Index of the monomial with the given exponents, if it is within the space.
    pub fn index_of(&self, exponents: &[u8]) -> Option<usize> {
        if exponents.len() != self.nvars {
            return None;
        }
        let d: usize = exponents.iter().map(|&v| v as usize).sum();
        if d > self.order {
            return None;
        }
        (self.degree_start[d]..self.degree_start[d + 1]).find(|&i| self.exponents[i] == exponents)
    }
}

fn push_compositions(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, pos: usize, remaining: usize) {
    if pos + 1 == current.len() {
        current[pos] = remaining as u8;
        out.push(current.clone());
        current[pos] = 0;
        return;
    }
    if current.is_empty() {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for take in (0..=remaining).rev() {
        current[pos] = take as u8;
        push_compositions(out, current, pos + 1, remaining - take);
    }
    current[pos] = 0;
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetSpace")
            .field("nvars", &self.nvars)
            .field("order", &self.order)
            .field("monomials", &self.exponents.len())
            .finish()
    }
}

/// A truncated Taylor expansion in the seed variables of a [`JetSpace`].
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    order: usize,
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, order: usize, value: f64) -> Jet {
        assert!(order <= space.order, "jet order exceeds its space");
        let mut coeffs = vec![0.0; space.len_for(order)];
        coeffs[0] = value;
        Jet {
            space: space.clone(),
            order,
            coeffs,
        }
    }

    /// The seed variable `var` expanded around `value`.
    pub fn variable(space: &Arc<JetSpace>, order: usize, value: f64, var: usize) -> Jet {
        assert!(var < space.nvars, "seed index out of range");
        let mut jet = Jet::constant(space, order, value);
        if order >= 1 {
            // degree-1 monomials are ordered by decreasing exponent of the first variable,
            // which places e_v at offset v
            jet.coeffs[1 + var] = 1.0;
        }
        jet
    }

    pub fn from_coeffs(space: &Arc<JetSpace>, order: usize, coeffs: Vec<f64>) -> Jet {
        assert_eq!(coeffs.len(), space.len_for(order));
        Jet {
            space: space.clone(),
            order,
            coeffs,
        }
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Taylor coefficient of the monomial with the given exponents (zero when truncated away).
    pub fn coeff(&self, exponents: &[u8]) -> f64 {
        match self.space.index_of(exponents) {
            Some(i) if i < self.coeffs.len() => self.coeffs[i],
            _ => 0.0,
        }
    }

    /// Mixed partial derivative with the given multi-index, i.e. `a! * c_a`.
    pub fn partial(&self, exponents: &[u8]) -> f64 {
        let fact: f64 = exponents
            .iter()
            .map(|&e| (1..=e as u64).product::<u64>() as f64)
            .product();
        fact * self.coeff(exponents)
    }

    pub fn zero_like(&self) -> Jet {
        Jet::constant(&self.space, self.order, 0.0)
    }

    pub fn constant_like(&self, value: f64) -> Jet {
        Jet::constant(&self.space, self.order, value)
    }

    /// Drops coefficients above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet {
            space: self.space.clone(),
            order,
            coeffs: self.coeffs[..self.space.len_for(order)].to_vec(),
        }
    }

    /// Partial derivative with respect to seed `var`.
    ///
    /// Panics when the jet has order 0; callers validate the derivative budget up front.
    pub fn d(&self, var: usize) -> Jet {
        assert!(self.order >= 1, "jet order exhausted by differentiation");
        let order = self.order - 1;
        let table = &self.space.derivative[var];
        let len = self.space.len_for(order);
        let coeffs = table[..len]
            .iter()
            .map(|&(src, factor)| factor * self.coeffs[src as usize])
            .collect();
        Jet {
            space: self.space.clone(),
            order,
            coeffs,
        }
    }

    fn check_space(&self, other: &Jet) {
        debug_assert!(
            Arc::ptr_eq(&self.space, &other.space),
            "mixing jets from different spaces"
        );
    }

    fn add_jet(&self, other: &Jet) -> Jet {
        self.check_space(other);
        let order = self.order.min(other.order);
        let len = self.space.len_for(order);
        let coeffs = (0..len).map(|i| self.coeffs[i] + other.coeffs[i]).collect();
        Jet {
            space: self.space.clone(),
            order,
            coeffs,
        }
    }

    fn sub_jet(&self, other: &Jet) -> Jet {
        self.check_space(other);
        let order = self.order.min(other.order);
        let len = self.space.len_for(order);
        let coeffs = (0..len).map(|i| self.coeffs[i] - other.coeffs[i]).collect();
        Jet {
            space: self.space.clone(),
            order,
            coeffs,
        }
    }

    fn mul_jet(&self, other: &Jet) -> Jet {
        self.check_space(other);
        let order = self.order.min(other.order);
        let space = &self.space;
        let len = space.len_for(order);
        let a = &self.coeffs;
        let b = &other.coeffs;
        let mut coeffs = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = 0.0;
            for &(i, j) in &space.pairs[space.pair_start[k]..space.pair_start[k + 1]] {
                acc += a[i as usize] * b[j as usize];
            }
            coeffs.push(acc);
        }
        Jet {
            space: space.clone(),
            order,
            coeffs,
        }
    }

    fn scale(&self, s: f64) -> Jet {
        Jet {
            space: self.space.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    fn shift(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// Evaluates `f(self)` from the Taylor coefficients `f^(m)(v)/m!` of a
    /// univariate function around `v = self.value()`.
    fn compose(&self, series: &[f64]) -> Jet {
        let mut nilpotent = self.clone();
        nilpotent.coeffs[0] = 0.0;
        let mut result = self.constant_like(series[self.order]);
        for m in (0..self.order).rev() {
            result = result.mul_jet(&nilpotent).shift(series[m]);
        }
        result
    }

    pub fn recip(&self) -> Jet {
        let v = self.value();
        let mut series = Vec::with_capacity(self.order + 1);
        let mut term = 1.0 / v;
        for _ in 0..=self.order {
            series.push(term);
            term *= -1.0 / v;
        }
        self.compose(&series)
    }

    pub fn sqrt(&self) -> Jet {
        self.powf_series(0.5)
    }

    /// Real power through the binomial series; the base must be positive.
    pub fn powf_series(&self, exponent: f64) -> Jet {
        let v = self.value();
        let mut series = Vec::with_capacity(self.order + 1);
        let mut binom = 1.0;
        let base = v.powf(exponent);
        for m in 0..=self.order {
            series.push(base * binom / v.powi(m as i32));
            binom *= (exponent - m as f64) / (m as f64 + 1.0);
        }
        self.compose(&series)
    }

    pub fn powi(&self, exponent: i32) -> Jet {
        if exponent < 0 {
            return self.powi(-exponent).recip();
        }
        let mut result = self.constant_like(1.0);
        let mut base = self.clone();
        let mut e = exponent as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_jet(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_jet(&base);
            }
        }
        result
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let mut series = Vec::with_capacity(self.order + 1);
        let mut fact = 1.0;
        for m in 0..=self.order {
            if m > 0 {
                fact *= m as f64;
            }
            series.push(e / fact);
        }
        self.compose(&series)
    }

    pub fn ln(&self) -> Jet {
        let v = self.value();
        let mut series = Vec::with_capacity(self.order + 1);
        series.push(v.ln());
        for m in 1..=self.order {
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            series.push(sign / (m as f64 * v.powi(m as i32)));
        }
        self.compose(&series)
    }

    pub fn sin(&self) -> Jet {
        self.trig(0)
    }

    pub fn cos(&self) -> Jet {
        self.trig(1)
    }

    fn trig(&self, phase: usize) -> Jet {
        let v = self.value();
        let cycle = [v.sin(), v.cos(), -v.sin(), -v.cos()];
        let mut series = Vec::with_capacity(self.order + 1);
        let mut fact = 1.0;
        for m in 0..=self.order {
            if m > 0 {
                fact *= m as f64;
            }
            series.push(cycle[(m + phase) % 4] / fact);
        }
        self.compose(&series)
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                self.$inner(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$inner(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$inner(rhs)
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$inner(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, add_jet);
jet_binop!(Sub, sub, sub_jet);
jet_binop!(Mul, mul, mul_jet);

impl Div<&Jet> for &Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        self.mul_jet(&rhs.recip())
    }
}
impl Div<Jet> for &Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        self / &rhs
    }
}
impl Div<&Jet> for Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        &self / rhs
    }
}
impl Div<Jet> for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        &self / &rhs
    }
}

macro_rules! jet_scalar_ops {
    ($($lhs:ty),*) => {$(
        impl Add<f64> for $lhs {
            type Output = Jet;
            fn add(self, rhs: f64) -> Jet { self.shift(rhs) }
        }
        impl Sub<f64> for $lhs {
            type Output = Jet;
            fn sub(self, rhs: f64) -> Jet { self.shift(-rhs) }
        }
        impl Mul<f64> for $lhs {
            type Output = Jet;
            fn mul(self, rhs: f64) -> Jet { self.scale(rhs) }
        }
        impl Div<f64> for $lhs {
            type Output = Jet;
            fn div(self, rhs: f64) -> Jet { self.scale(1.0 / rhs) }
        }
        impl Mul<$lhs> for f64 {
            type Output = Jet;
            fn mul(self, rhs: $lhs) -> Jet { rhs.scale(self) }
        }
        impl Add<$lhs> for f64 {
            type Output = Jet;
            fn add(self, rhs: $lhs) -> Jet { rhs.shift(self) }
        }
        impl Sub<$lhs> for f64 {
            type Output = Jet;
            fn sub(self, rhs: $lhs) -> Jet { rhs.scale(-1.0).shift(self) }
        }
        impl Neg for $lhs {
            type Output = Jet;
            fn neg(self) -> Jet { self.scale(-1.0) }
        }
    )*};
}

jet_scalar_ops!(Jet, &Jet);

/// Sums a non-empty sequence of jets.
pub fn jet_sum<I: IntoIterator<Item = Jet>>(terms: I) -> Jet {
    let mut iter = terms.into_iter();
    let first = iter.next().expect("jet_sum of an empty sequence");
    iter.fold(first, |acc, t| acc + t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(nvars: usize, order: usize) -> Arc<JetSpace> {
        JetSpace::shared(nvars, order)
    }

    #[test]
    fn monomial_counts() {
        let s = space(4, 4);
        assert_eq!(s.len_for(4), 70);
        assert_eq!(s.len_for(0), 1);
        assert_eq!(s.len_for(1), 5);
        let s = space(12, 4);
        assert_eq!(s.len_for(4), 1820);
    }

    #[test]
    fn variable_seed_sits_on_unit_monomial() {
        let s = space(3, 2);
        for v in 0..3 {
            let x = Jet::variable(&s, 2, 1.5, v);
            let mut e = vec![0u8; 3];
            e[v] = 1;
            assert_eq!(x.coeff(&e), 1.0);
            assert_eq!(x.value(), 1.5);
        }
    }

    #[test]
    fn product_of_polynomials_is_exact() {
        // (1 + a + b)^3 expanded: coefficient of a*b is 6, of a^2*b is 3
        let s = space(2, 4);
        let a = Jet::variable(&s, 4, 0.0, 0);
        let b = Jet::variable(&s, 4, 0.0, 1);
        let p = (a + b + 1.0).powi(3);
        assert_eq!(p.coeff(&[1, 1]), 6.0);
        assert_eq!(p.coeff(&[2, 1]), 3.0);
        assert_eq!(p.coeff(&[3, 0]), 1.0);
        assert_eq!(p.coeff(&[2, 2]), 0.0);
    }

    #[test]
    fn reciprocal_series() {
        let s = space(1, 4);
        let x = Jet::variable(&s, 4, 2.0, 0);
        let r = x.recip();
        // d^m/dx^m 1/x = (-1)^m m! / x^(m+1)
        for m in 0..=4u8 {
            let expected = (-1f64).powi(m as i32) * (1..=m as u64).product::<u64>() as f64
                / 2f64.powi(m as i32 + 1);
            assert!((r.partial(&[m]) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_lowers_order() {
        let s = space(2, 3);
        let x = Jet::variable(&s, 3, 1.0, 0);
        let y = Jet::variable(&s, 3, 2.0, 1);
        let f = &x * &x * &y;
        let fx = f.d(0);
        assert_eq!(fx.order(), 2);
        assert!((fx.value() - 4.0).abs() < 1e-15);
        let fxy = fx.d(1);
        assert!((fxy.value() - 2.0).abs() < 1e-15);
        let fxxy = fxy.d(0);
        assert_eq!(fxxy.order(), 0);
        assert!((fxxy.value() - 2.0).abs() < 1e-15);
    }

    #[test]
    #[should_panic(expected = "order exhausted")]
    fn differentiating_order_zero_panics() {
        let s = space(1, 1);
        let x = Jet::variable(&s, 1, 1.0, 0);
        let _ = x.d(0).d(0);
    }

    #[test]
    fn mixed_orders_truncate_to_minimum() {
        let s = space(2, 4);
        let x = Jet::variable(&s, 4, 1.0, 0);
        let y = Jet::variable(&s, 2, 1.0, 1);
        assert_eq!((&x * &y).order(), 2);
        assert_eq!((&x + &y).order(), 2);
    }
}
