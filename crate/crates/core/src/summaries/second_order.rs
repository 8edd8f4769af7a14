use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Point, PointPattern};

use super::pairs::for_each_close_pair;
use super::{canonical_order, first_node_at_least, RangeGrid, SummaryCurve};

/// Translation-corrected reduced second moment of a growing family of sets:
/// every ordered pair with threshold `tau(delta) <= r` contributes
/// `1 / |W ∩ W_delta|`. `reach` bounds the pair distance that can matter.
fn translation_k<F>(pat: &PointPattern, grid: &RangeGrid, reach: f64, threshold: F) -> Result<SummaryCurve>
where
    F: Fn(Point) -> f64,
{
    pat.require(2)?;
    let window = *pat.window();
    let points = canonical_order(pat.points());
    let nodes = grid.nodes();
    let mut bins = vec![0.0; nodes.len() + 1];
    let mut overlap_failure = false;

    for_each_close_pair(&points, &window, reach, |_, _, delta| {
        let tau = threshold(delta);
        let k = first_node_at_least(&nodes, tau);
        if k == nodes.len() {
            return;
        }
        let overlap = window.translation_overlap_area(delta);
        if overlap <= 0.0 {
            overlap_failure = true;
            return;
        }
        // (i, j) and (j, i) carry the same weight
        bins[k] += 2.0 / overlap;
    });
    if overlap_failure {
        return Err(Error::ZeroOverlap);
    }

    let n = points.len() as f64;
    let scale = window.area() * window.area() / (n * n);
    let mut acc = 0.0;
    let values = bins[..nodes.len()]
        .iter()
        .map(|b| {
            acc += b;
            scale * acc
        })
        .collect();
    SummaryCurve::new(nodes, values)
}

/// Cylindrical K-function with fixed aspect ratio: the reduced second
/// moment of `Cyl(alpha, zeta r, r)`, translation edge correction.
pub fn k_cyl_hat(pat: &PointPattern, alpha: f64, zeta: f64, grid: &RangeGrid) -> Result<SummaryCurve> {
    if !(zeta > 0.0 && zeta.is_finite()) {
        return Err(Error::InvalidArgument(format!("aspect ratio {zeta} must be positive")));
    }
    let (s, c) = alpha.sin_cos();
    let reach = grid.r_max * (1.0 + zeta * zeta).sqrt();
    translation_k(pat, grid, reach, |d| {
        let axial = (d.x * c + d.y * s).abs();
        let perp = (-d.x * s + d.y * c).abs();
        axial.max(perp / zeta)
    })
}

/// Ripley's K-function with translation edge correction.
pub fn ripley_k_hat(pat: &PointPattern, grid: &RangeGrid) -> Result<SummaryCurve> {
    translation_k(pat, grid, grid.r_max, |d| d.norm())
}

/// Stoyan's rule of thumb for the Epanechnikov half-width,
/// `0.15 / sqrt(lambda)`.
pub fn stoyan_bandwidth(pat: &PointPattern) -> f64 {
    0.15 / pat.intensity().sqrt()
}

/// Kernel-smoothed, translation-corrected pair-correlation function with
/// Epanechnikov kernel and Stoyan bandwidth.
pub fn pcf_hat(pat: &PointPattern, grid: &RangeGrid) -> Result<SummaryCurve> {
    pat.require(2)?;
    pcf_hat_with_bandwidth(pat, grid, stoyan_bandwidth(pat))
}

/// Pair-correlation estimate with an explicit kernel half-width.
pub fn pcf_hat_with_bandwidth(pat: &PointPattern, grid: &RangeGrid, half_width: f64) -> Result<SummaryCurve> {
    pat.require(2)?;
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::InvalidArgument(format!("kernel half-width {half_width}")));
    }
    let window = *pat.window();
    let points = canonical_order(pat.points());
    let nodes = grid.nodes();
    let mut sums = vec![0.0; nodes.len()];
    let norm = 0.75 / half_width;

    for_each_close_pair(&points, &window, grid.r_max + half_width, |_, _, delta| {
        let d = delta.norm();
        let overlap = window.translation_overlap_area(delta);
        if overlap <= 0.0 {
            return;
        }
        let lo = first_node_at_least(&nodes, d - half_width);
        for k in lo..nodes.len() {
            let u = (nodes[k] - d) / half_width;
            if u >= 1.0 {
                break;
            }
            if u > -1.0 {
                sums[k] += 2.0 * norm * (1.0 - u * u) / overlap;
            }
        }
    });

    let n = points.len() as f64;
    let scale = window.area() * window.area() / (n * n);
    let empty = sums.iter().filter(|s| **s == 0.0).count();
    if empty > 0 {
        log::warn!("pair-correlation estimate: {empty} range(s) received no smoothing mass");
    }
    let values = sums
        .iter()
        .zip(&nodes)
        .map(|(s, r)| scale * s / (2.0 * PI * r))
        .collect();
    SummaryCurve::new(nodes, values)
}
