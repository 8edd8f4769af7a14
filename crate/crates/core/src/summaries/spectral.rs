use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{axial_distance, reduce_axial, Point, PointPattern};

use super::{canonical_order, AngleGrid, FrequencyGrid, SummaryCurve};

/// `|W|^{-1/2} sum_j exp(-i omega . x_j)`.
pub fn dft(pat: &PointPattern, omega: Point) -> Complex64 {
    let points = canonical_order(pat.points());
    let sum: Complex64 = points
        .iter()
        .map(|p| Complex64::from_polar(1.0, -omega.dot(*p)))
        .sum();
    sum / pat.window().area().sqrt()
}

/// Bartlett periodogram on the integer frequency grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Periodogram {
    p_max: i32,
    values: Vec<f64>,
}

impl Periodogram {
    pub fn grid(&self) -> FrequencyGrid {
        FrequencyGrid { p_max: self.p_max }
    }

    /// Value at frequency index `(p1, p2)`.
    pub fn get(&self, p1: i32, p2: i32) -> Option<f64> {
        let m = self.p_max;
        if p1.abs() > m || p2.abs() > m {
            return None;
        }
        let side = (2 * m + 1) as usize;
        Some(self.values[(p1 + m) as usize * side + (p2 + m) as usize])
    }

    /// `((p1, p2), value)` pairs in row-major order, origin included.
    pub fn iter(&self) -> impl Iterator<Item = ((i32, i32), f64)> + '_ {
        self.grid().indices().zip(self.values.iter().copied())
    }

    /// Mean over all grid frequencies except the origin.
    pub fn mean_off_origin(&self) -> f64 {
        let (sum, count) = self
            .iter()
            .filter(|((p1, p2), _)| (*p1, *p2) != (0, 0))
            .fold((0.0, 0usize), |(s, c), (_, v)| (s + v, c + 1));
        sum / count as f64
    }
}

/// `|DFT(omega)|^2` at every `omega = (2 pi p1 / l1, 2 pi p2 / l2)`.
pub fn periodogram(pat: &PointPattern, fg: &FrequencyGrid) -> Periodogram {
    let m = fg.p_max;
    let side = fg.side();
    let window = pat.window();
    let (l1, l2) = (window.width(), window.height());
    let points = canonical_order(pat.points());

    let mut acc = vec![Complex64::new(0.0, 0.0); side * side];
    let mut e1 = vec![Complex64::new(0.0, 0.0); side];
    let mut e2 = vec![Complex64::new(0.0, 0.0); side];
    for p in &points {
        for (k, q) in (-m..=m).enumerate() {
            e1[k] = Complex64::from_polar(1.0, -2.0 * PI * q as f64 * p.x / l1);
            e2[k] = Complex64::from_polar(1.0, -2.0 * PI * q as f64 * p.y / l2);
        }
        for (a, row) in e1.iter().zip(acc.chunks_exact_mut(side)) {
            for (b, cell) in e2.iter().zip(row.iter_mut()) {
                *cell += a * b;
            }
        }
    }
    let area = window.area();
    Periodogram {
        p_max: m,
        values: acc.iter().map(|z| z.norm_sqr() / area).collect(),
    }
}

/// Axial angle of frequency index `(p1, p2)`; `pi/2` on the `p1 = 0` axis.
fn frequency_angle(p1: i32, p2: i32) -> f64 {
    reduce_axial((p2 as f64).atan2(p1 as f64))
}

/// Direction spectrum: periodogram averaged over frequencies whose axial
/// angle lies strictly within `h` of each grid angle. The angular distance
/// wraps modulo pi and the origin is excluded.
pub fn theta_spectrum(pat: &PointPattern, fg: &FrequencyGrid, h: f64, ag: &AngleGrid) -> Result<SummaryCurve> {
    pat.require(1)?;
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("bandwidth {h} must be positive")));
    }
    let pg = periodogram(pat, fg);
    let freqs: Vec<(f64, f64)> = pg
        .iter()
        .filter(|((p1, p2), _)| (*p1, *p2) != (0, 0))
        .map(|((p1, p2), v)| (frequency_angle(p1, p2), v))
        .collect();

    let nodes = ag.nodes();
    let mut values = Vec::with_capacity(nodes.len());
    for &alpha in &nodes {
        let (sum, count) = freqs
            .iter()
            .filter(|(a, _)| axial_distance(*a, alpha) < h)
            .fold((0.0, 0usize), |(s, c), (_, v)| (s + v, c + 1));
        if count == 0 {
            return Err(Error::BandwidthTooSmall {
                angle: alpha,
                bandwidth: h,
            });
        }
        values.push(sum / count as f64);
    }
    SummaryCurve::new(nodes, values)
}
