//! Dense π-tensor components with an explicit variance signature.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::Serialize;

use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Slot {
    Upper,
    Lower,
}

/// Variance signature, written like `"u,ll"` for a (1,2)-tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variance(Vec<Slot>);

impl Variance {
    pub fn scalar() -> Variance {
        Variance(Vec::new())
    }

    pub fn parse(sig: &str) -> Option<Variance> {
        let mut slots = Vec::new();
        for c in sig.chars() {
            match c {
                'u' => slots.push(Slot::Upper),
                'l' => slots.push(Slot::Lower),
                ',' | ' ' => {}
                _ => return None,
            }
        }
        Some(Variance(slots))
    }

    pub fn slots(&self) -> &[Slot] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Variance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let upper: String = self.0.iter().filter(|s| **s == Slot::Upper).map(|_| 'u').collect();
        let lower: String = self.0.iter().filter(|s| **s == Slot::Lower).map(|_| 'l').collect();
        // slots are always stored upper-first in this crate
        match (upper.is_empty(), lower.is_empty()) {
            (true, _) => write!(f, "{lower}"),
            (false, true) => write!(f, "{upper}"),
            _ => write!(f, "{upper},{lower}"),
        }
    }
}

impl Serialize for Variance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Row-major dense components; every axis has extent `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T> {
    n: usize,
    variance: Variance,
    data: Vec<T>,
}

impl<T> Tensor<T> {
    pub fn from_fn(n: usize, variance: &str, mut f: impl FnMut(&[usize]) -> T) -> Tensor<T> {
        let variance = Variance::parse(variance).expect("valid variance signature");
        let rank = variance.rank();
        let len = n.pow(rank as u32);
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; rank];
        for _ in 0..len {
            data.push(f(&idx));
            for axis in (0..rank).rev() {
                idx[axis] += 1;
                if idx[axis] < n {
                    break;
                }
                idx[axis] = 0;
            }
        }
        Tensor { n, variance, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.variance.rank()
    }

    pub fn variance(&self) -> &Variance {
        &self.variance
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank(), "index rank mismatch");
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.n);
            acc * self.n + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> &T {
        &self.data[self.offset(idx)]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Tensor<U> {
        Tensor {
            n: self.n,
            variance: self.variance.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Multi-indices in storage order.
    pub fn indices(&self) -> Vec<Vec<usize>> {
        let rank = self.rank();
        (0..self.data.len())
            .map(|mut flat| {
                let mut idx = vec![0; rank];
                for axis in (0..rank).rev() {
                    idx[axis] = flat % self.n;
                    flat /= self.n;
                }
                idx
            })
            .collect()
    }
}

impl<T, const R: usize> Index<[usize; R]> for Tensor<T> {
    type Output = T;
    fn index(&self, idx: [usize; R]) -> &T {
        &self.data[self.offset(&idx)]
    }
}

impl<T, const R: usize> IndexMut<[usize; R]> for Tensor<T> {
    fn index_mut(&mut self, idx: [usize; R]) -> &mut T {
        let o = self.offset(&idx);
        &mut self.data[o]
    }
}

impl Tensor<Jet> {
    /// Order-0 parts of every component.
    pub fn value(&self) -> Tensor<f64> {
        self.map(|j| j.value())
    }

    /// Smallest remaining derivative budget among the components.
    pub fn order(&self) -> usize {
        self.data.iter().map(|j| j.order()).min().unwrap_or(usize::MAX)
    }
}

impl Tensor<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn nested(&self) -> Nested {
        nest(&self.data, self.n, self.rank())
    }
}

impl Serialize for Tensor<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.nested().serialize(s)
    }
}

/// Nested-array view of tensor components.
#[derive(Debug, Clone, PartialEq)]
pub enum Nested {
    Number(f64),
    Array(Vec<Nested>),
}

impl Serialize for Nested {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Nested::Number(v) => s.serialize_f64(*v),
            Nested::Array(items) => items.serialize(s),
        }
    }
}

fn nest(data: &[f64], n: usize, rank: usize) -> Nested {
    if rank == 0 {
        return Nested::Number(data[0]);
    }
    let chunk = data.len() / n;
    Nested::Array((0..n).map(|i| nest(&data[i * chunk..(i + 1) * chunk], n, rank - 1)).collect())
}
