use crate::error::{Error, Result};
use crate::geometry::{DoubleCone, Point, PointPattern, Window};

use super::{canonical_order, first_node_above, RangeGrid, SummaryCurve};

/// Distance from point `i` to its nearest neighbour inside the double cone
/// centred at that point; `+inf` when the cone holds no other point.
pub fn nearest_in_cone(pat: &PointPattern, i: usize, cone: &DoubleCone) -> Result<f64> {
    pat.require(2)?;
    if i >= pat.len() {
        return Err(Error::InvalidArgument(format!(
            "point index {i} out of range for {} points",
            pat.len()
        )));
    }
    cone_distance(pat.points(), i, cone)
}

fn cone_distance(points: &[Point], i: usize, cone: &DoubleCone) -> Result<f64> {
    let xi = points[i];
    let mut best_sq = f64::INFINITY;
    for (j, &xj) in points.iter().enumerate() {
        if j == i {
            continue;
        }
        let delta = xj - xi;
        let d2 = delta.norm_sq();
        if d2 < best_sq && cone.contains(delta)? {
            best_sq = d2;
        }
    }
    Ok(best_sq.sqrt())
}

/// Hanisch-weighted contributions `(d_i, 1 / |W ⊖ DS(alpha, eps, d_i)|)` of
/// the points whose cone-neighbour distance is finite and who lie in their
/// eroded window.
fn hanisch_terms(points: &[Point], window: &Window, cone: &DoubleCone) -> Result<Vec<(f64, f64)>> {
    let mut terms = Vec::with_capacity(points.len());
    for (i, &xi) in points.iter().enumerate() {
        let d = cone_distance(points, i, cone)?;
        if !d.is_finite() {
            continue;
        }
        if !window.eroded_rect_contains(cone, d, xi)? {
            continue;
        }
        let area = window.erosion_area_cone(cone, d)?;
        if area > 0.0 {
            terms.push((d, 1.0 / area));
        }
    }
    Ok(terms)
}

/// Local directional nearest-neighbour distance distribution with Hanisch
/// edge correction, normalised by its value at infinity.
pub fn g_loc_hat(pat: &PointPattern, alpha: f64, eps: f64, grid: &RangeGrid) -> Result<SummaryCurve> {
    pat.require(2)?;
    let cone = DoubleCone::new(alpha, eps)?;
    let points = canonical_order(pat.points());
    let terms = hanisch_terms(&points, pat.window(), &cone)?;

    let nodes = grid.nodes();
    let mut bins = vec![0.0; nodes.len() + 1];
    let mut total = 0.0;
    for &(d, w) in &terms {
        // contributes to every r with d < r
        bins[first_node_above(&nodes, d)] += w;
        total += w;
    }
    if !(total > 0.0) {
        return Err(Error::NoUsablePoints);
    }
    let mut acc = 0.0;
    let values = bins[..nodes.len()]
        .iter()
        .map(|b| {
            acc += b;
            (acc / total).min(1.0)
        })
        .collect();
    SummaryCurve::new(nodes, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn two_points() -> PointPattern {
        PointPattern::new(
            vec![Point::new(0.5, 0.5), Point::new(0.6, 0.5)],
            Window::unit_square(),
        )
        .unwrap()
    }

    #[test]
    fn nearest_examples() {
        let cone = DoubleCone::new(0.0, PI / 8.0).unwrap();
        let d = nearest_in_cone(&two_points(), 0, &cone).unwrap();
        assert!((d - 0.1).abs() < 1e-12);

        let vertical = PointPattern::new(
            vec![Point::new(0.5, 0.5), Point::new(0.5, 0.6)],
            Window::unit_square(),
        )
        .unwrap();
        assert_eq!(nearest_in_cone(&vertical, 0, &cone).unwrap(), f64::INFINITY);

        let single = PointPattern::new(vec![Point::new(0.5, 0.5)], Window::unit_square()).unwrap();
        assert!(matches!(
            nearest_in_cone(&single, 0, &cone),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn g_loc_examples() {
        // nodes 0.05, 0.1, 0.15, 0.2
        let grid = RangeGrid::new(0.2, 4).unwrap();
        let g = g_loc_hat(&two_points(), 0.0, PI / 8.0, &grid).unwrap();
        assert_eq!(g.values[0], 0.0);
        assert!((g.values[3] - 1.0).abs() < 1e-15);

        // strict inequality at r = d_i (0.6 - 0.5 is not exactly 0.1 in binary)
        let d = 0.6 - 0.5;
        let at_d = g_loc_hat(&two_points(), 0.0, PI / 8.0, &RangeGrid::new(d, 1).unwrap()).unwrap();
        assert_eq!(at_d.values[0], 0.0);
    }

    #[test]
    fn no_usable_points() {
        let grid = RangeGrid::new(0.2, 4).unwrap();
        let vertical = PointPattern::new(
            vec![Point::new(0.5, 0.5), Point::new(0.5, 0.6)],
            Window::unit_square(),
        )
        .unwrap();
        assert!(matches!(
            g_loc_hat(&vertical, 0.0, PI / 8.0, &grid),
            Err(Error::NoUsablePoints)
        ));
    }
}
