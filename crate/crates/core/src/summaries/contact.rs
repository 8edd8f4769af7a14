use crate::error::{Error, Result};
use crate::geometry::{Point, PointPattern, Window};

use super::{first_node_above, first_node_at_least, RangeGrid, SummaryCurve};

pub const DEFAULT_PROBES_PER_SIDE: usize = 128;

/// Spherical contact estimate; `truncated` is set when the eroded window
/// ran out of probes before the last grid range.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactEstimate {
    pub curve: SummaryCurve,
    pub truncated: bool,
}

/// Reduced-sample estimator of the spherical contact distribution on a
/// regular probe lattice:
/// `H(r) = #{u in W ⊖ b(o,r) : dist(u, x) <= r} / #{u in W ⊖ b(o,r)}`.
pub fn spherical_contact_hat(pat: &PointPattern, probes_per_side: usize, grid: &RangeGrid) -> Result<ContactEstimate> {
    pat.require(1)?;
    let state = ContactState::new(pat.points().to_vec(), *pat.window(), probes_per_side, grid)?;
    let values = state.values();
    let truncated = values.len() < grid.kappa;
    let nodes = grid.nodes()[..values.len()].to_vec();
    Ok(ContactEstimate {
        curve: SummaryCurve::new(nodes, values)?,
        truncated,
    })
}

/// Probe-to-nearest-point bookkeeping supporting cheap single-point moves.
#[derive(Clone, Debug)]
pub struct ContactState {
    window: Window,
    nx: usize,
    ny: usize,
    probes: Vec<Point>,
    border: Vec<f64>,
    nodes: Vec<f64>,
    /// Probes surviving erosion at each valid node.
    denom: Vec<u32>,
    points: Vec<Point>,
    nearest_dist: Vec<f64>,
    nearest_idx: Vec<usize>,
    counts: Vec<i64>,
    /// Upper bound on every finite probe-to-nearest distance.
    reach: f64,
}

/// A proposed relocation of one point, with its effect on the probe data.
#[derive(Clone, Debug)]
pub struct PendingMove {
    index: usize,
    to: Point,
    changes: Vec<(usize, f64, usize)>,
    counts: Vec<i64>,
}

impl ContactState {
    pub fn new(points: Vec<Point>, window: Window, probes_per_side: usize, grid: &RangeGrid) -> Result<Self> {
        if probes_per_side * probes_per_side < 100 {
            return Err(Error::InvalidArgument(format!(
                "probe lattice {probes_per_side}x{probes_per_side} has fewer than 100 probes"
            )));
        }
        let (nx, ny) = (probes_per_side, probes_per_side);
        let (dx, dy) = (window.width() / nx as f64, window.height() / ny as f64);
        let mut probes = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                probes.push(Point::new(
                    window.xmin + (ix as f64 + 0.5) * dx,
                    window.ymin + (iy as f64 + 0.5) * dy,
                ));
            }
        }
        let border: Vec<f64> = probes.iter().map(|p| window.border_distance(*p)).collect();
        let nodes = grid.nodes();
        let denom: Vec<u32> = nodes
            .iter()
            .map(|&r| border.iter().filter(|&&b| b >= r).count() as u32)
            .take_while(|&c| c > 0)
            .collect();

        let mut state = Self {
            window,
            nx,
            ny,
            nearest_dist: vec![f64::INFINITY; probes.len()],
            nearest_idx: vec![usize::MAX; probes.len()],
            probes,
            border,
            nodes,
            denom,
            points,
            counts: Vec::new(),
            reach: f64::INFINITY,
        };
        state.refresh();
        Ok(state)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn valid_nodes(&self) -> &[f64] {
        &self.nodes[..self.denom.len()]
    }

    /// Recompute every probe distance from scratch.
    pub fn refresh(&mut self) {
        for (u, probe) in self.probes.iter().enumerate() {
            let (mut best, mut idx) = (f64::INFINITY, usize::MAX);
            for (j, p) in self.points.iter().enumerate() {
                let d = probe.dist_sq(*p);
                if d < best {
                    best = d;
                    idx = j;
                }
            }
            self.nearest_dist[u] = best.sqrt();
            self.nearest_idx[u] = idx;
        }
        self.reach = self
            .nearest_dist
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max);
        let mut counts = vec![0i64; self.denom.len()];
        for u in 0..self.probes.len() {
            self.add_contribution(&mut counts, self.nearest_dist[u], self.border[u], 1);
        }
        self.counts = counts;
    }

    fn add_contribution(&self, counts: &mut [i64], dist: f64, border: f64, sign: i64) {
        let lo = first_node_at_least(&self.nodes, dist);
        let hi = first_node_above(&self.nodes, border).min(counts.len());
        for c in counts.iter_mut().take(hi).skip(lo) {
            *c += sign;
        }
    }

    fn values_from(&self, counts: &[i64]) -> Vec<f64> {
        counts
            .iter()
            .zip(&self.denom)
            .map(|(&c, &d)| c as f64 / d as f64)
            .collect()
    }

    /// Contact curve on the valid (non-empty erosion) prefix of the grid.
    pub fn values(&self) -> Vec<f64> {
        self.values_from(&self.counts)
    }

    /// Probe indices whose location lies within `radius` of `centre` in
    /// the sup norm.
    fn probe_box(&self, centre: Point, radius: f64) -> impl Iterator<Item = usize> + '_ {
        let dx = self.window.width() / self.nx as f64;
        let dy = self.window.height() / self.ny as f64;
        let span = |c: f64, lo: f64, step: f64, n: usize| {
            let a = ((c - radius - lo) / step - 0.5).floor().max(0.0) as usize;
            let b = (((c + radius - lo) / step - 0.5).ceil().max(0.0) as usize).min(n - 1);
            (a, b)
        };
        let (x0, x1) = if radius.is_finite() {
            span(centre.x, self.window.xmin, dx, self.nx)
        } else {
            (0, self.nx - 1)
        };
        let (y0, y1) = if radius.is_finite() {
            span(centre.y, self.window.ymin, dy, self.ny)
        } else {
            (0, self.ny - 1)
        };
        let nx = self.nx;
        (y0..=y1).flat_map(move |iy| (x0..=x1).map(move |ix| iy * nx + ix))
    }

    /// Effect of moving point `index` to `to`, without applying it.
    pub fn propose(&self, index: usize, to: Point) -> PendingMove {
        let from = self.points[index];
        let mut changes = Vec::new();
        let mut touched = std::collections::BTreeSet::new();

        // probes that lose their nearest point
        for u in self.probe_box(from, self.reach) {
            if self.nearest_idx[u] == index {
                touched.insert(u);
            }
        }
        // probes that may gain the moved point as nearest
        for u in self.probe_box(to, self.reach) {
            if self.probes[u].dist_sq(to).sqrt() < self.nearest_dist[u] {
                touched.insert(u);
            }
        }

        for u in touched {
            let probe = self.probes[u];
            let (dist, idx) = if self.nearest_idx[u] == index {
                let mut best = probe.dist_sq(to);
                let mut idx = index;
                for (j, p) in self.points.iter().enumerate() {
                    if j == index {
                        continue;
                    }
                    let d = probe.dist_sq(*p);
                    if d < best {
                        best = d;
                        idx = j;
                    }
                }
                (best.sqrt(), idx)
            } else {
                (probe.dist_sq(to).sqrt(), index)
            };
            if dist != self.nearest_dist[u] || idx != self.nearest_idx[u] {
                changes.push((u, dist, idx));
            }
        }

        let mut counts = self.counts.clone();
        for &(u, dist, _) in &changes {
            self.add_contribution(&mut counts, self.nearest_dist[u], self.border[u], -1);
            self.add_contribution(&mut counts, dist, self.border[u], 1);
        }
        PendingMove {
            index,
            to,
            changes,
            counts,
        }
    }

    /// Contact curve the state would have after the move.
    pub fn proposed_values(&self, mv: &PendingMove) -> Vec<f64> {
        self.values_from(&mv.counts)
    }

    pub fn commit(&mut self, mv: PendingMove) {
        self.points[mv.index] = mv.to;
        for (u, dist, idx) in mv.changes {
            self.nearest_dist[u] = dist;
            self.nearest_idx[u] = idx;
            if dist.is_finite() && dist > self.reach {
                self.reach = dist;
            }
        }
        self.counts = mv.counts;
    }
}
