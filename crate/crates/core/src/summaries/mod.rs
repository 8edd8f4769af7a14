//! Edge-corrected summary statistics of point patterns.
//!
//! Directional: the local cone nearest-neighbour distribution (Hanisch
//! correction), the cylindrical K-function with fixed aspect ratio
//! (translation correction) and the Bartlett periodogram with its angular
//! aggregate. Non-directional: Ripley's K, the pair-correlation function and
//! the spherical contact distribution.
//!
//! Each estimator first sorts the points into a canonical order, so results
//! do not depend on how the input points are labelled.

mod contact;
mod nearest;
mod pairs;
mod second_order;
mod spectral;

pub use contact::{spherical_contact_hat, ContactEstimate, ContactState, DEFAULT_PROBES_PER_SIDE};
pub use nearest::{g_loc_hat, nearest_in_cone};
pub use second_order::{k_cyl_hat, pcf_hat, pcf_hat_with_bandwidth, ripley_k_hat, stoyan_bandwidth};
pub use spectral::{dft, periodogram, theta_spectrum, Periodogram};

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Regular ranges `r_i = i * r_max / kappa`, `i = 1..=kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeGrid {
    pub r_max: f64,
    pub kappa: usize,
}

impl RangeGrid {
    pub fn new(r_max: f64, kappa: usize) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) || kappa == 0 {
            return Err(Error::InvalidArgument(format!(
                "range grid needs r_max > 0 and kappa >= 1 (got {r_max}, {kappa})"
            )));
        }
        Ok(Self { r_max, kappa })
    }

    pub fn nodes(&self) -> Vec<f64> {
        (1..=self.kappa)
            .map(|i| i as f64 * self.r_max / self.kappa as f64)
            .collect()
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.kappa as f64
    }
}

/// Regular angles `alpha_i = i * pi / kappa`, `i = 1..=kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleGrid {
    pub kappa: usize,
}

impl AngleGrid {
    pub fn new(kappa: usize) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::InvalidArgument("angle grid needs kappa >= 1".into()));
        }
        Ok(Self { kappa })
    }

    pub fn nodes(&self) -> Vec<f64> {
        (1..=self.kappa)
            .map(|i| i as f64 * PI / self.kappa as f64)
            .collect()
    }
}

/// Integer frequency indices `p1, p2` in `-p_max..=p_max`, mapped to
/// `omega = (2 pi p1 / l1, 2 pi p2 / l2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub p_max: i32,
}

impl FrequencyGrid {
    pub fn new(p_max: i32) -> Result<Self> {
        if p_max < 1 {
            return Err(Error::InvalidArgument("frequency grid needs p_max >= 1".into()));
        }
        Ok(Self { p_max })
    }

    pub fn side(&self) -> usize {
        (2 * self.p_max + 1) as usize
    }

    /// All index pairs, row-major in `p1` then `p2`, origin included.
    pub fn indices(self) -> impl Iterator<Item = (i32, i32)> {
        let m = self.p_max;
        (-m..=m).flat_map(move |p1| (-m..=m).map(move |p2| (p1, p2)))
    }
}

/// A summary statistic evaluated on a grid of ranges or angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryCurve {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl SummaryCurve {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                got: values.len(),
            });
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("curve nodes must be strictly increasing".into()));
        }
        Ok(Self { nodes, values })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Points sorted by `(x, y)`.
pub(crate) fn canonical_order(points: &[Point]) -> Vec<Point> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| match a.x.total_cmp(&b.x) {
        Ordering::Equal => a.y.total_cmp(&b.y),
        o => o,
    });
    sorted
}

/// Index of the first node `>= threshold`; `nodes.len()` if none.
pub(crate) fn first_node_at_least(nodes: &[f64], threshold: f64) -> usize {
    nodes.partition_point(|&r| r < threshold)
}

/// Index of the first node strictly greater than `threshold`.
pub(crate) fn first_node_above(nodes: &[f64], threshold: f64) -> usize {
    nodes.partition_point(|&r| r <= threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = RangeGrid::new(0.25, 5).unwrap();
        let n = g.nodes();
        assert_eq!(n.len(), 5);
        assert!((n[0] - 0.05).abs() < 1e-15 && (n[4] - 0.25).abs() < 1e-15);
        assert!(RangeGrid::new(0.0, 3).is_err());
        assert!(RangeGrid::new(1.0, 0).is_err());

        let a = AngleGrid::new(36).unwrap().nodes();
        assert!((a[35] - PI).abs() < 1e-15);
        assert!(a[0] > 0.0);

        let f = FrequencyGrid::new(2).unwrap();
        assert_eq!(f.indices().count(), 25);
    }

    #[test]
    fn node_search() {
        let nodes = [0.1, 0.2, 0.3];
        assert_eq!(first_node_at_least(&nodes, 0.2), 1);
        assert_eq!(first_node_above(&nodes, 0.2), 2);
        assert_eq!(first_node_at_least(&nodes, 0.5), 3);
    }

    #[test]
    fn curve_validation() {
        assert!(SummaryCurve::new(vec![0.1, 0.2], vec![1.0]).is_err());
        assert!(SummaryCurve::new(vec![0.2, 0.1], vec![1.0, 2.0]).is_err());
    }
}
