//! Geodesics `ẍ^i + 2G^i(x, ẋ) = 0` with an adaptive Dormand–Prince 5(4) pair,
//! and comparison of `L`- and `L*`-geodesics as unparametrized paths.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{spray_values, GeometryError, MetricField};
use crate::randers::{OneFormField, RandersBundle, RandersError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeodesicError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("trace left the domain at t = {t}, x = {x:?}")]
    LeftDomain { t: f64, x: Vec<f64> },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("invalid request: {0}")]
    Invalid(String),
}

impl From<RandersError> for GeodesicError {
    fn from(e: RandersError) -> Self {
        match e {
            RandersError::Geometry(g) => GeodesicError::Geometry(g),
            other => GeodesicError::Invalid(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
    /// Integration fails once `x` leaves this box.
    pub x_box: Option<Vec<(f64, f64)>>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-9,
            atol: 1e-12,
            max_step: 0.02,
            initial_step: 1e-3,
            min_step: 1e-13,
            max_steps: 200_000,
            x_box: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSample {
    pub t: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Length of the trace up to `t` measured with the reference metric.
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicTrace {
    pub samples: Vec<TraceSample>,
    pub steps: usize,
    pub rejected: usize,
    pub max_error_estimate: f64,
}

impl GeodesicTrace {
    pub fn end(&self) -> &TraceSample {
        self.samples.last().expect("a trace has at least its initial sample")
    }

    /// Writes columns `t, x1..xn, y1..yn`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let n = self.samples[0].x.len();
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=n).map(|i| format!("y{i}")));
        w.write_record(&header)?;
        for s in &self.samples {
            let mut row = vec![format!("{:.17e}", s.t)];
            row.extend(s.x.iter().chain(&s.y).map(|v| format!("{v:.17e}")));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

// Dormand–Prince 5(4) tableau
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand–Prince integration of `u' = f(u)` on `[0, t_end]`,
/// recording every accepted step.
fn dopri5<F>(
    f: F,
    u0: Vec<f64>,
    t_end: f64,
    cfg: &IntegratorConfig,
    mut accept: impl FnMut(f64, &[f64]) -> Result<(), GeodesicError>,
) -> Result<(usize, usize, f64), GeodesicError>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, GeodesicError>,
{
    let dim = u0.len();
    let mut t = 0.0;
    let mut u = u0;
    let mut h = cfg.initial_step.min(cfg.max_step).min(t_end);
    let (mut steps, mut rejected, mut max_err) = (0usize, 0usize, 0.0_f64);
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    accept(t, &u)?;
    while t < t_end {
        if steps + rejected >= cfg.max_steps {
            return Err(GeodesicError::TooManySteps(cfg.max_steps));
        }
        if h < cfg.min_step {
            return Err(GeodesicError::StepUnderflow { t });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        k[0] = f(&u)?;
        for s in 1..7 {
            let stage: Vec<f64> = (0..dim)
                .map(|d| u[d] + h * (0..s).map(|j| A[s][j] * k[j][d]).sum::<f64>())
                .collect();
            k[s] = f(&stage)?;
        }
        let next: Vec<f64> = (0..dim).map(|d| u[d] + h * (0..7).map(|j| B5[j] * k[j][d]).sum::<f64>()).collect();
        let err = (0..dim)
            .map(|d| {
                let e = h * (0..7).map(|j| (B5[j] - B4[j]) * k[j][d]).sum::<f64>();
                e.abs() / (cfg.atol + cfg.rtol * u[d].abs().max(next[d].abs()))
            })
            .fold(0.0, f64::max);
        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            u = next;
            steps += 1;
            max_err = max_err.max(err);
            accept(t, &u)?;
        } else {
            rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * factor).min(cfg.max_step);
    }
    Ok((steps, rejected, max_err))
}

/// Integrates the geodesic of `metric` from `(x0, y0)`; `s` in the samples is
/// the length measured by `length_metric`.
pub fn integrate_with_length(
    metric: &MetricField,
    length_metric: &MetricField,
    x0: &[f64],
    y0: &[f64],
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<GeodesicTrace, GeodesicError> {
    let n = metric.dim();
    if x0.len() != n || y0.len() != n {
        return Err(GeodesicError::Invalid(format!("x0 and y0 must have {n} components")));
    }
    if !(t_end > 0.0) {
        return Err(GeodesicError::Invalid("t_end must be positive".into()));
    }
    let rhs = |u: &[f64]| -> Result<Vec<f64>, GeodesicError> {
        let (x, v) = (&u[..n], &u[n..2 * n]);
        let g = spray_values(metric, x, v)?;
        let mut out = Vec::with_capacity(2 * n + 1);
        out.extend_from_slice(v);
        out.extend(g.iter().map(|gi| -2.0 * gi));
        out.push(length_metric.value(x, v)?);
        Ok(out)
    };
    let mut u0 = x0.to_vec();
    u0.extend_from_slice(y0);
    u0.push(0.0);
    let mut samples = Vec::new();
    let (steps, rejected, max_error_estimate) = dopri5(rhs, u0, t_end, cfg, |t, u| {
        let x = u[..n].to_vec();
        if let Some(bx) = &cfg.x_box {
            if x.iter().zip(bx).any(|(c, (lo, hi))| c < lo || c > hi) {
                return Err(GeodesicError::LeftDomain { t, x });
            }
        }
        samples.push(TraceSample {
            t,
            x,
            y: u[n..2 * n].to_vec(),
            s: u[2 * n],
        });
        Ok(())
    })?;
    Ok(GeodesicTrace {
        samples,
        steps,
        rejected,
        max_error_estimate,
    })
}

pub fn integrate_geodesic(
    metric: &MetricField,
    x0: &[f64],
    y0: &[f64],
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<GeodesicTrace, GeodesicError> {
    integrate_with_length(metric, metric, x0, y0, t_end, cfg)
}

/// Maximum of `|∂_i b_j - ∂_j b_i|` over seeded sample points of the box.
pub fn dj_alpha_closedness(
    form: &OneFormField,
    x_box: &[(f64, f64)],
    samples: usize,
    seed: u64,
) -> Result<f64, GeodesicError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples.max(1) {
        let x: Vec<f64> = x_box
            .iter()
            .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..hi) } else { lo })
            .collect();
        worst = worst.max(form.curl(&x)?.max_abs());
    }
    Ok(worst)
}

/// Two traces compared as paths, both parametrized by base-metric length.
#[derive(Debug, Clone, Serialize)]
pub struct PathComparison {
    pub max_deviation: f64,
    /// Common length up to which the paths are compared.
    pub length: f64,
    pub grid_points: usize,
    #[serde(skip)]
    pub base: GeodesicTrace,
    #[serde(skip)]
    pub star: GeodesicTrace,
}

/// Number of grid points used when comparing paths.
pub const COMPARISON_GRID: usize = 400;

/// Position at length `s` by cubic Hermite interpolation with `dx/ds = y / L(x, y)`.
fn position_at(trace: &GeodesicTrace, speeds: &[f64], s: f64) -> Vec<f64> {
    let smp = &trace.samples;
    let k = smp.partition_point(|p| p.s <= s).clamp(1, smp.len() - 1);
    let (a, b) = (&smp[k - 1], &smp[k]);
    let h = b.s - a.s;
    if h <= 0.0 {
        return a.x.clone();
    }
    let u = (s - a.s) / h;
    let (h00, h10, h01, h11) = (
        2.0 * u.powi(3) - 3.0 * u * u + 1.0,
        u.powi(3) - 2.0 * u * u + u,
        -2.0 * u.powi(3) + 3.0 * u * u,
        u.powi(3) - u * u,
    );
    (0..a.x.len())
        .map(|i| {
            let (da, db) = (a.y[i] / speeds[k - 1], b.y[i] / speeds[k]);
            h00 * a.x[i] + h10 * h * da + h01 * b.x[i] + h11 * h * db
        })
        .collect()
}

/// Maximum spatial distance of two traces on a common length grid. `length_metric`
/// must be the metric their `s` values were measured with.
pub fn compare_traces(
    a: &GeodesicTrace,
    b: &GeodesicTrace,
    length_metric: &MetricField,
) -> Result<(f64, f64), GeodesicError> {
    let speeds = |t: &GeodesicTrace| -> Result<Vec<f64>, GeodesicError> {
        t.samples.iter().map(|p| Ok(length_metric.value(&p.x, &p.y)?)).collect()
    };
    let (sa, sb) = (speeds(a)?, speeds(b)?);
    let length = a.end().s.min(b.end().s);
    let mut worst = 0.0_f64;
    for g in 0..=COMPARISON_GRID {
        let s = length * g as f64 / COMPARISON_GRID as f64;
        let (pa, pb) = (position_at(a, &sa, s), position_at(b, &sb, s));
        let d = pa.iter().zip(&pb).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(d);
    }
    Ok((worst, length))
}

/// Integrates the `L`- and `L*`-geodesics from the same initial data and compares
/// them as paths parametrized by base length.
pub fn compare_geodesics(
    bundle: &RandersBundle,
    x0: &[f64],
    y0: &[f64],
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<PathComparison, GeodesicError> {
    let base = integrate_with_length(bundle.base(), bundle.base(), x0, y0, t_end, cfg)?;
    let star = integrate_with_length(bundle.star(), bundle.base(), x0, y0, t_end, cfg)?;
    let (max_deviation, length) = compare_traces(&base, &star, bundle.base())?;
    Ok(PathComparison {
        max_deviation,
        length,
        grid_points: COMPARISON_GRID + 1,
        base,
        star,
    })
}
