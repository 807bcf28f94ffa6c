use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::geometry::SlitPoint;

/// Seeded sample of slit-bundle points: `x` uniform in a box, `y` uniform
/// on the unit sphere and then scaled by a uniform factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePlan {
    pub instance: String,
    pub count: usize,
    pub seed: u64,
    pub x_box: Vec<(f64, f64)>,
    pub y_scale: (f64, f64),
}

impl SamplePlan {
    pub fn new(instance: &str, count: usize, seed: u64, n: usize) -> SamplePlan {
        SamplePlan {
            instance: instance.to_string(),
            count: count.max(1),
            seed,
            x_box: vec![(-0.5, 0.5); n],
            y_scale: (0.5, 2.0),
        }
    }

    pub fn points(&self, n: usize) -> Vec<SlitPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count)
            .map(|_| {
                let x: Vec<f64> = (0..n)
                    .map(|i| {
                        let (lo, hi) = self.x_box.get(i).copied().unwrap_or((-0.5, 0.5));
                        if hi > lo {
                            rng.gen_range(lo..hi)
                        } else {
                            lo
                        }
                    })
                    .collect();
                let y = loop {
                    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                    if norm > 1e-8 {
                        let (lo, hi) = self.y_scale;
                        let s = if hi > lo { rng.gen_range(lo..hi) } else { lo };
                        break v.into_iter().map(|c| s * c / norm).collect();
                    }
                };
                SlitPoint { x, y }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_in_range() {
        let plan = SamplePlan::new("euclid_flat", 50, 7, 3);
        let a = plan.points(3);
        assert_eq!(a, plan.points(3));
        for p in &a {
            assert!(p.x.iter().all(|c| (-0.5..0.5).contains(c)));
            let r = p.y.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((0.5..=2.0).contains(&r));
        }
        let other = SamplePlan { seed: 8, ..plan };
        assert_ne!(a, other.points(3));
    }
}
