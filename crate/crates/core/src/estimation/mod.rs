//! Model fitting for parametric replication: minimum-contrast Thomas and
//! LGCP fits, the Strauss interaction-range estimator and a Strauss
//! pseudolikelihood fit, each with a fallback to homogeneous Poisson.

mod simplex;

pub use simplex::{nelder_mead, Minimum};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, PointPattern};
use crate::processes::ModelSpec;
use crate::summaries::{pcf_hat, ripley_k_hat, RangeGrid, SummaryCurve};

const MAX_ITERATIONS: usize = 500;
const REL_TOL: f64 = 1e-8;
const MIN_POINTS: usize = 10;
const QUADRATURE_SIDE: usize = 64;

/// A fitted model; when `fallback_to_poisson` is set the model is Poisson
/// with intensity `n / |W|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FitResult {
    pub model: ModelSpec,
    pub objective: f64,
    pub converged: bool,
    pub fallback_to_poisson: bool,
}

impl FitResult {
    fn poisson(pat: &PointPattern, objective: f64, converged: bool) -> Self {
        FitResult {
            model: ModelSpec::Poisson {
                lambda: pat.intensity(),
            },
            objective,
            converged,
            fallback_to_poisson: true,
        }
    }
}

/// Grid nodes and values restricted to `[l/100, l/4]`.
fn contrast_range(curve: &SummaryCurve, side: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (lo, hi) = (side / 100.0, side / 4.0);
    let (r, v): (Vec<f64>, Vec<f64>) = curve
        .nodes
        .iter()
        .zip(&curve.values)
        .filter(|(r, _)| **r >= lo && **r <= hi)
        .map(|(r, v)| (*r, *v))
        .unzip();
    if r.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "range grid has fewer than two nodes in [{lo}, {hi}]"
        )));
    }
    Ok((r, v))
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Thomas K-function `pi r^2 + (1 - exp(-r^2 / (4 sigma^2))) / kappa`.
pub fn thomas_k(r: f64, kappa: f64, sigma: f64) -> f64 {
    std::f64::consts::PI * r * r + (1.0 - (-r * r / (4.0 * sigma * sigma)).exp()) / kappa
}

/// Pair-correlation function `exp(sigma2 exp(-r / h))` of an LGCP with
/// exponential covariance.
pub fn lgcp_pcf(r: f64, sigma2: f64, h: f64) -> f64 {
    (sigma2 * (-r / h).exp()).exp()
}

/// Thomas fit by minimum contrast on `K^(1/4)`, optimised over
/// `(ln kappa, ln sigma)`.
pub fn fit_thomas_mincontrast(pat: &PointPattern, grid: &RangeGrid) -> Result<FitResult> {
    pat.require(MIN_POINTS)?;
    let w = pat.window();
    let (side, area, n) = (w.min_side(), w.area(), pat.len() as f64);
    let k = ripley_k_hat(pat, grid)?;
    let (r, kv) = contrast_range(&k, side)?;
    let target: Vec<f64> = kv.iter().map(|v| v.max(0.0).powf(0.25)).collect();

    let objective = |x: &[f64]| {
        let (kappa, sigma) = (x[0].exp(), x[1].exp());
        let sq: Vec<f64> = r
            .iter()
            .zip(&target)
            .map(|(&r, &t)| (t - thomas_k(r, kappa, sigma).powf(0.25)).powi(2))
            .collect();
        trapezoid(&r, &sq)
    };
    let start = [(n / (4.0 * area)).ln(), (side / 20.0).ln()];
    let m = nelder_mead(objective, &start, &[0.5, 0.5], MAX_ITERATIONS, REL_TOL);
    let (kappa, sigma) = (m.x[0].exp(), m.x[1].exp());

    if !(sigma <= side / 2.0 && kappa * area <= n) {
        return Ok(FitResult::poisson(pat, m.value, m.converged));
    }
    Ok(FitResult {
        model: ModelSpec::Thomas {
            kappa_parent: kappa,
            mu_off: n / (area * kappa),
            sigma_off: sigma,
        },
        objective: m.value,
        converged: m.converged,
        fallback_to_poisson: false,
    })
}

/// Isotropic LGCP fit by minimum contrast on the pair-correlation function,
/// optimised over `(sigma2, ln h)` with `sigma2` projected onto `[0, inf)`.
pub fn fit_lgcp_mincontrast(pat: &PointPattern, grid: &RangeGrid) -> Result<FitResult> {
    pat.require(MIN_POINTS)?;
    let w = pat.window();
    let side = w.min_side();
    let g = pcf_hat(pat, grid)?;
    let (r, gv) = contrast_range(&g, side)?;

    let objective = |x: &[f64]| {
        let (s2, h) = (x[0].max(0.0), x[1].exp());
        let sq: Vec<f64> = r
            .iter()
            .zip(&gv)
            .map(|(&r, &t)| (t - lgcp_pcf(r, s2, h)).powi(2))
            .collect();
        trapezoid(&r, &sq)
    };
    let g_max = gv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s0 = if g_max > 1.0 { g_max.ln() } else { 0.0 };
    let start = [s0, (side / 50.0).ln()];
    let m = nelder_mead(objective, &start, &[s0.max(0.1) * 0.5, 0.5], MAX_ITERATIONS, REL_TOL);
    let (sigma2, h) = (m.x[0].max(0.0), m.x[1].exp());
    Ok(FitResult {
        model: ModelSpec::Lgcp {
            mu: pat.intensity().ln() - sigma2 / 2.0,
            sigma2,
            scale: h,
            a: 1.0,
            theta: 0.0,
        },
        objective: m.value,
        converged: m.converged,
        fallback_to_poisson: false,
    })
}

/// Outcome of the Strauss interaction-range search: `rd` is `None` when the
/// maximand `sqrt(pi r^2) - sqrt(K(r))` is nowhere positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RangeEstimate {
    pub rd: Option<f64>,
    pub maximum: f64,
    pub argmax: f64,
}

/// Maximiser over `r = k l / 400 < l / 4` of `sqrt(pi r^2) - sqrt(K(r))`.
pub fn estimate_strauss_range(pat: &PointPattern) -> Result<RangeEstimate> {
    pat.require(MIN_POINTS)?;
    let side = pat.window().min_side();
    let grid = RangeGrid::new(99.0 * side / 400.0, 99)?;
    let k = ripley_k_hat(pat, &grid)?;
    let mut best = (f64::NEG_INFINITY, k.nodes[0]);
    for (&r, &kv) in k.nodes.iter().zip(&k.values) {
        let v = std::f64::consts::PI.sqrt() * r - kv.max(0.0).sqrt();
        if v > best.0 {
            best = (v, r);
        }
    }
    Ok(RangeEstimate {
        rd: (best.0 > 0.0).then_some(best.1),
        maximum: best.0,
        argmax: best.1,
    })
}

/// Sufficient statistics of the Strauss pseudolikelihood: interaction counts
/// at data points and at a midpoint quadrature lattice.
struct StraussStats {
    n: f64,
    /// Sum over data points of neighbours within `rd`.
    s: f64,
    /// (count, total weight) per distinct quadrature count.
    quad: Vec<(f64, f64)>,
}

fn neighbours_within(points: &[Point], u: Point, rd: f64, skip: Option<usize>) -> usize {
    points
        .iter()
        .enumerate()
        .filter(|(j, p)| Some(*j) != skip && p.dist(u) <= rd)
        .count()
}

impl StraussStats {
    fn new(pat: &PointPattern, rd: f64) -> Self {
        let pts = pat.points();
        let s = (0..pts.len())
            .map(|i| neighbours_within(pts, pts[i], rd, Some(i)) as f64)
            .sum();
        let w = pat.window();
        let m = QUADRATURE_SIDE;
        let (dx, dy) = (w.width() / m as f64, w.height() / m as f64);
        let weight = dx * dy;
        let mut by_count = std::collections::BTreeMap::<usize, f64>::new();
        for iy in 0..m {
            for ix in 0..m {
                let u = Point::new(w.xmin + (ix as f64 + 0.5) * dx, w.ymin + (iy as f64 + 0.5) * dy);
                *by_count.entry(neighbours_within(pts, u, rd, None)).or_insert(0.0) += weight;
            }
        }
        StraussStats {
            n: pts.len() as f64,
            s,
            quad: by_count.into_iter().map(|(t, w)| (t as f64, w)).collect(),
        }
    }

    /// `sum w gamma^t` with `gamma = exp(theta)`; `theta = -inf` keeps t = 0.
    fn partition(&self, theta: f64) -> f64 {
        self.quad
            .iter()
            .map(|&(t, w)| if t == 0.0 { w } else { w * (theta * t).exp() })
            .sum()
    }

    /// Weighted mean of t under `gamma = exp(theta)`.
    fn mean_count(&self, theta: f64) -> f64 {
        let z = self.partition(theta);
        let m: f64 = self
            .quad
            .iter()
            .map(|&(t, w)| if t == 0.0 { 0.0 } else { t * w * (theta * t).exp() })
            .sum();
        m / z
    }

    fn beta(&self, theta: f64) -> f64 {
        self.n / self.partition(theta)
    }

    fn log_pl(&self, theta: f64) -> f64 {
        let b = self.beta(theta);
        let interaction = if self.s == 0.0 { 0.0 } else { theta * self.s };
        self.n * b.ln() + interaction - self.n
    }
}

/// Profile estimate of `beta` for a fixed `gamma`: `n / integral gamma^t(u) du`.
pub fn strauss_profile_beta(pat: &PointPattern, rd: f64, gamma: f64) -> Result<f64> {
    if !(rd > 0.0) || !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!("rd {rd}, gamma {gamma}")));
    }
    Ok(StraussStats::new(pat, rd).beta(gamma.ln()))
}

/// Strauss fit by maximum pseudolikelihood on a 64x64 midpoint quadrature.
/// The profile score in `ln gamma` is monotone, so the optimum is found by
/// bisection; an unconstrained optimum at `gamma >= 1` falls back to Poisson.
pub fn fit_strauss_mpl(pat: &PointPattern, rd: f64) -> Result<FitResult> {
    if !(rd > 0.0) {
        return Err(Error::InvalidArgument(format!("interaction range {rd}")));
    }
    pat.require(MIN_POINTS)?;
    let st = StraussStats::new(pat, rd);
    let score = |theta: f64| st.s - st.n * st.mean_count(theta);

    if score(0.0) >= 0.0 {
        return Ok(FitResult::poisson(pat, -st.log_pl(0.0), true));
    }
    if st.s == 0.0 {
        let free = st.partition(f64::NEG_INFINITY);
        if free <= 0.0 {
            return Ok(FitResult::poisson(pat, f64::NAN, false));
        }
        return Ok(FitResult {
            model: ModelSpec::Strauss {
                beta: st.n / free,
                gamma: 0.0,
                rd,
            },
            objective: -st.log_pl(f64::NEG_INFINITY),
            converged: true,
            fallback_to_poisson: false,
        });
    }
    let mut lo = -1.0;
    while score(lo) < 0.0 {
        lo *= 2.0;
        if lo < -1e6 {
            return Ok(FitResult::poisson(pat, f64::NAN, false));
        }
    }
    let mut hi = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if score(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let theta = 0.5 * (lo + hi);
    Ok(FitResult {
        model: ModelSpec::Strauss {
            beta: st.beta(theta),
            gamma: theta.exp(),
            rd,
        },
        objective: -st.log_pl(theta),
        converged: true,
        fallback_to_poisson: false,
    })
}

/// Strauss fit with the range estimated from the data; falls back to Poisson
/// when no repulsion is detected.
pub fn fit_strauss(pat: &PointPattern) -> Result<FitResult> {
    let range = estimate_strauss_range(pat)?;
    match range.rd {
        Some(rd) => fit_strauss_mpl(pat, rd),
        None => Ok(FitResult::poisson(pat, range.maximum, true)),
    }
}
