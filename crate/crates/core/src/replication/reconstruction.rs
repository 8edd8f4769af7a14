use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, PointPattern, Window};
use crate::processes::sim_binomial;
use crate::rng::RngStream;
use crate::summaries::{ContactState, RangeGrid, DEFAULT_PROBES_PER_SIDE};

/// Iterations between full recomputations of the contact bookkeeping.
pub const REFRESH_EVERY: usize = 500;

/// Contact-curve grid nodes per reconstruction.
pub const SR_GRID_NODES: usize = 50;

/// Acceptance rule for uphill moves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Schedule {
    /// Only strict improvements are accepted.
    ImprovementOnly,
    /// Temperatures from `t1` down to `tm`, geometrically interpolated.
    Geometric { t1: f64, tm: f64 },
    /// Geometric with `t1 = t1_rel * E(z0)` and `tm = tm_rel * E(z0)`.
    RelativeGeometric { t1_rel: f64, tm_rel: f64 },
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::RelativeGeometric {
            t1_rel: 1e-2,
            tm_rel: 1e-6,
        }
    }
}

/// Stochastic reconstruction settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SrConfig {
    pub iters: usize,
    #[serde(default = "yes")]
    pub match_count: bool,
    #[serde(default = "yes")]
    pub match_spherical_contact: bool,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default = "default_probes")]
    pub probes_per_side: usize,
}

fn yes() -> bool {
    true
}

fn default_probes() -> usize {
    DEFAULT_PROBES_PER_SIDE
}

impl SrConfig {
    pub fn new(iters: usize) -> Self {
        Self {
            iters,
            match_count: true,
            match_spherical_contact: true,
            schedule: Schedule::default(),
            probes_per_side: DEFAULT_PROBES_PER_SIDE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iters == 0 {
            return Err(Error::InvalidArgument("reconstruction needs at least one iteration".into()));
        }
        if !self.match_count && !self.match_spherical_contact {
            return Err(Error::InvalidArgument("reconstruction must match at least one summary".into()));
        }
        match self.schedule {
            Schedule::Geometric { t1, tm } if !(tm > 0.0 && t1 >= tm) => Err(Error::InvalidArgument(format!(
                "geometric schedule needs t1 >= tm > 0, got {t1}, {tm}"
            ))),
            Schedule::RelativeGeometric { t1_rel, tm_rel } if !(tm_rel > 0.0 && t1_rel >= tm_rel) => {
                Err(Error::InvalidArgument(format!(
                    "relative schedule needs t1 >= tm > 0, got {t1_rel}, {tm_rel}"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Range grid used for contact-curve matching on `window`.
pub fn sr_grid(window: &Window) -> Result<RangeGrid> {
    RangeGrid::new(window.min_side() / 4.0, SR_GRID_NODES)
}

/// Summaries of the observed pattern that candidates are matched against.
#[derive(Clone, Debug)]
pub struct SrTarget {
    pub n: usize,
    /// Valid grid nodes up to and including `r_j`.
    pub nodes: Vec<f64>,
    /// Observed contact curve on `nodes`.
    pub contact: Vec<f64>,
}

impl SrTarget {
    /// Observed summaries; the curve is cut at the first node where it
    /// reaches 1, or at the last valid node.
    pub fn new(pat: &PointPattern, cfg: &SrConfig) -> Result<Self> {
        let grid = sr_grid(pat.window())?;
        let state = ContactState::new(pat.points().to_vec(), *pat.window(), cfg.probes_per_side, &grid)?;
        let values = state.values();
        let valid = state.valid_nodes();
        let cut = values.iter().position(|&v| v >= 1.0).map_or(values.len(), |i| i + 1);
        Ok(Self {
            n: pat.len(),
            nodes: valid[..cut].to_vec(),
            contact: values[..cut].to_vec(),
        })
    }
}

/// Trapezoid integral of `(a - b)^2` over `nodes`.
pub fn integrated_squared_difference(nodes: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let sq: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
    nodes
        .windows(2)
        .zip(sq.windows(2))
        .map(|(r, s)| 0.5 * (r[1] - r[0]) * (s[0] + s[1]))
        .sum()
}

/// Total deviation `(n_x - n_z)^2 + integral_0^{r_j} (H_x - H_z)^2 dr` for a
/// candidate contact curve on the target nodes (extra values are ignored,
/// missing ones count as 0). Both curves are 0 at `r = 0`.
pub fn deviation_from_curve(target: &SrTarget, cfg: &SrConfig, n: usize, curve: &[f64]) -> f64 {
    let mut e = 0.0;
    if cfg.match_count {
        let d = n as f64 - target.n as f64;
        e += d * d;
    }
    if cfg.match_spherical_contact {
        let m = target.nodes.len();
        let mut nodes = Vec::with_capacity(m + 1);
        nodes.push(0.0);
        nodes.extend_from_slice(&target.nodes);
        let mut obs = Vec::with_capacity(m + 1);
        obs.push(0.0);
        obs.extend_from_slice(&target.contact);
        let mut cand = Vec::with_capacity(m + 1);
        cand.push(0.0);
        cand.extend((0..m).map(|i| curve.get(i).copied().unwrap_or(0.0)));
        e += integrated_squared_difference(&nodes, &obs, &cand);
    }
    e
}

/// Deviation of a candidate pattern from the target summaries.
pub fn sr_total_deviation(candidate: &PointPattern, target: &SrTarget, cfg: &SrConfig) -> Result<f64> {
    let curve = if cfg.match_spherical_contact && !candidate.is_empty() {
        let grid = sr_grid(candidate.window())?;
        ContactState::new(candidate.points().to_vec(), *candidate.window(), cfg.probes_per_side, &grid)?.values()
    } else {
        Vec::new()
    };
    Ok(deviation_from_curve(target, cfg, candidate.len(), &curve))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub deviation: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct SrOutput {
    pub pattern: PointPattern,
    pub initial_deviation: f64,
    pub final_deviation: f64,
    /// Accepted-state deviation after each iteration.
    pub trace: Vec<TraceRow>,
}

/// Write a trace as CSV with header `iteration,deviation,accepted`.
pub fn write_trace_csv<W: Write>(trace: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "deviation", "accepted"])?;
    for row in trace {
        w.write_record([
            row.iteration.to_string(),
            format!("{:e}", row.deviation),
            row.accepted.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One stochastic reconstruction replicate started from a uniform binomial
/// pattern with the observed count.
pub fn sr_replicate(pat: &PointPattern, cfg: &SrConfig, rng: &mut RngStream) -> Result<SrOutput> {
    let target = SrTarget::new(pat, cfg)?;
    sr_replicate_with_target(pat.window(), &target, cfg, rng)
}

/// As [`sr_replicate`] with precomputed target summaries.
pub fn sr_replicate_with_target(
    window: &Window,
    target: &SrTarget,
    cfg: &SrConfig,
    rng: &mut RngStream,
) -> Result<SrOutput> {
    let start = sim_binomial(target.n, window, rng);
    anneal(start.into_points(), window, target, cfg, rng)
}

/// Reconstruction from a caller-chosen initial state.
pub fn sr_replicate_from(
    initial: &PointPattern,
    target: &SrTarget,
    cfg: &SrConfig,
    rng: &mut RngStream,
) -> Result<SrOutput> {
    anneal(initial.points().to_vec(), initial.window(), target, cfg, rng)
}

fn anneal(points: Vec<Point>, window: &Window, target: &SrTarget, cfg: &SrConfig, rng: &mut RngStream) -> Result<SrOutput> {
    cfg.validate()?;
    if target.n == 0 {
        return Err(Error::TooFewPoints { need: 1, got: 0 });
    }
    let grid = sr_grid(window)?;
    let n = points.len();
    let mut state = ContactState::new(points, *window, cfg.probes_per_side, &grid)?;
    let deviation = |curve: &[f64]| deviation_from_curve(target, cfg, n, curve);
    let mut energy = deviation(&state.values());
    let initial = energy;

    let (t1, tm) = match cfg.schedule {
        Schedule::ImprovementOnly => (0.0, 0.0),
        Schedule::Geometric { t1, tm } => (t1, tm),
        Schedule::RelativeGeometric { t1_rel, tm_rel } => (t1_rel * initial, tm_rel * initial),
    };
    let temperature = |m: usize| {
        if cfg.iters == 1 {
            t1
        } else {
            t1 * (tm / t1).powf((m - 1) as f64 / (cfg.iters - 1) as f64)
        }
    };

    let mut trace = Vec::with_capacity(cfg.iters);
    for m in 1..=cfg.iters {
        let k = rng.random_range(0..n);
        let to = Point::new(
            rng.random_range(window.xmin..window.xmax),
            rng.random_range(window.ymin..window.ymax),
        );
        let mv = state.propose(k, to);
        let proposed = deviation(&state.proposed_values(&mv));
        let delta = proposed - energy;
        let accept = if delta < 0.0 {
            true
        } else if delta == 0.0 {
            false
        } else {
            let t = temperature(m);
            t > 0.0 && rng.random::<f64>() < (-delta / t).exp()
        };
        if accept {
            state.commit(mv);
            energy = proposed;
        }
        if m % REFRESH_EVERY == 0 {
            state.refresh();
            energy = deviation(&state.values());
        }
        trace.push(TraceRow {
            iteration: m,
            deviation: energy,
            accepted: accept,
        });
    }
    Ok(SrOutput {
        pattern: PointPattern::clipped(state.points().to_vec(), *window),
        initial_deviation: initial,
        final_deviation: energy,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Window {
        Window::centered_square(1.0).unwrap()
    }

    #[test]
    fn constant_gap_integrates_to_c2_rj() {
        let nodes: Vec<f64> = (0..=50).map(|i| i as f64 * 0.005).collect();
        let a = vec![0.5; 51];
        let b = vec![0.3; 51];
        let e = integrated_squared_difference(&nodes, &a, &b);
        assert!((e - 0.04 * 0.25).abs() < 1e-6, "{e}");
    }

    #[test]
    fn curve_term_prepends_origin() {
        let target = SrTarget {
            n: 10,
            nodes: vec![0.1, 0.2],
            contact: vec![0.5, 1.0],
        };
        let mut cfg = SrConfig::new(1);
        cfg.match_count = false;
        let e = deviation_from_curve(&target, &cfg, 10, &[0.3, 1.0]);
        // (0 + 0.04) / 2 * 0.1 + (0.04 + 0) / 2 * 0.1
        assert!((e - 0.004).abs() < 1e-15);
    }

    #[test]
    fn count_term_only() {
        let pat = PointPattern::new(vec![Point::new(0.1, 0.1), Point::new(-0.2, 0.3)], unit()).unwrap();
        let mut cfg = SrConfig::new(1);
        cfg.match_spherical_contact = false;
        let target = SrTarget::new(&pat, &cfg).unwrap();
        let bigger = PointPattern::new(
            vec![
                Point::new(0.1, 0.1),
                Point::new(-0.2, 0.3),
                Point::new(0.3, 0.3),
                Point::new(-0.3, -0.3),
            ],
            unit(),
        )
        .unwrap();
        assert_eq!(sr_total_deviation(&bigger, &target, &cfg).unwrap(), 4.0);
    }

    #[test]
    fn config_validation() {
        let mut cfg = SrConfig::new(10);
        cfg.match_count = false;
        cfg.match_spherical_contact = false;
        assert!(cfg.validate().is_err());
        let mut cfg = SrConfig::new(10);
        cfg.schedule = Schedule::Geometric { t1: 1e-6, tm: 1e-2 };
        assert!(cfg.validate().is_err());
        assert!(SrConfig::new(0).validate().is_err());
    }

    #[test]
    fn trace_csv_header() {
        let mut buf = Vec::new();
        write_trace_csv(
            &[TraceRow {
                iteration: 1,
                deviation: 0.5,
                accepted: true,
            }],
            &mut buf,
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "iteration,deviation,accepted\n1,5e-1,true\n");
    }
}
