//! Python bindings: windows, patterns, models, summaries, replication and
//! the Monte Carlo isotropy test.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};
use std::path::PathBuf;

use anisotest_core::geometry::{Point, PointPattern, Window};
use anisotest_core::io::{read_pattern_csv, write_pattern_file};
use anisotest_core::processes::ModelSpec;
use anisotest_core::replication::{FitFamily, ReplicationConfig, Replicator, SrConfig, TilingConfig};
use anisotest_core::rng::RngStream;
use anisotest_core::summaries::{g_loc_hat, k_cyl_hat, theta_spectrum, AngleGrid, FrequencyGrid, RangeGrid};
use anisotest_core::testing::{
    replicate_seed, run_isotropy_test, Dss, FunctionalSpec, PValueOrientation, Recentering, StatKind, TestConfig,
    TestResult,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Axis-aligned rectangular observation window.
#[pyclass(name = "Window", frozen, from_py_object)]
#[derive(Clone)]
struct PyWindow {
    inner: Window,
}

#[pymethods]
impl PyWindow {
    #[new]
    fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> PyResult<Self> {
        Ok(Self {
            inner: Window::new(xmin, xmax, ymin, ymax).map_err(err)?,
        })
    }

    /// Square of the given side centred at the origin.
    #[staticmethod]
    fn centered_square(side: f64) -> PyResult<Self> {
        Ok(Self {
            inner: Window::centered_square(side).map_err(err)?,
        })
    }

    #[getter]
    fn bounds(&self) -> (f64, f64, f64, f64) {
        let w = &self.inner;
        (w.xmin, w.xmax, w.ymin, w.ymax)
    }

    fn area(&self) -> f64 {
        self.inner.area()
    }

    fn __repr__(&self) -> String {
        let w = &self.inner;
        format!("Window({}, {}, {}, {})", w.xmin, w.xmax, w.ymin, w.ymax)
    }
}

/// Finite set of distinct points in a window.
#[pyclass(name = "PointPattern", frozen, from_py_object)]
#[derive(Clone)]
struct PyPointPattern {
    inner: PointPattern,
}

#[pymethods]
impl PyPointPattern {
    #[new]
    fn new(points: Vec<(f64, f64)>, window: PyWindow) -> PyResult<Self> {
        let pts = points.into_iter().map(|(x, y)| Point::new(x, y)).collect();
        Ok(Self {
            inner: PointPattern::new(pts, window.inner).map_err(err)?,
        })
    }

    /// Read an `x,y` CSV file.
    #[staticmethod]
    fn from_csv(path: PathBuf, window: PyWindow) -> PyResult<Self> {
        Ok(Self {
            inner: read_pattern_csv(&path, window.inner).map_err(err)?,
        })
    }

    fn to_csv(&self, path: PathBuf) -> PyResult<()> {
        write_pattern_file(&self.inner, &path).map_err(err)
    }

    fn points(&self) -> Vec<(f64, f64)> {
        self.inner.points().iter().map(|p| (p.x, p.y)).collect()
    }

    #[getter]
    fn window(&self) -> PyWindow {
        PyWindow {
            inner: *self.inner.window(),
        }
    }

    fn intensity(&self) -> f64 {
        self.inner.intensity()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Point process model; see `ModelSpec` JSON for the parameter names.
#[pyclass(name = "Model", frozen, from_py_object)]
#[derive(Clone)]
struct PyModel {
    inner: ModelSpec,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn poisson(lam: f64) -> Self {
        Self {
            inner: ModelSpec::Poisson { lambda: lam },
        }
    }

    /// Log-Gaussian Cox process with the study's default parameters.
    #[staticmethod]
    #[pyo3(signature = (a=1.0))]
    fn lgcp(a: f64) -> Self {
        Self {
            inner: ModelSpec::paper_lgcp(a),
        }
    }

    /// Lennard-Jones Gibbs process with the study's default parameters.
    #[staticmethod]
    #[pyo3(signature = (a=1.0))]
    fn gibbs(a: f64) -> Self {
        Self {
            inner: ModelSpec::paper_gibbs(a),
        }
    }

    /// Poisson line cluster process with the study's default parameters.
    #[staticmethod]
    #[pyo3(signature = (a=1.0))]
    fn plcp(a: f64) -> Self {
        Self {
            inner: ModelSpec::paper_plcp(a),
        }
    }

    #[staticmethod]
    fn thomas(kappa_parent: f64, mu_off: f64, sigma_off: f64) -> Self {
        Self {
            inner: ModelSpec::Thomas {
                kappa_parent,
                mu_off,
                sigma_off,
            },
        }
    }

    #[staticmethod]
    fn strauss(beta: f64, gamma: f64, rd: f64) -> Self {
        Self {
            inner: ModelSpec::Strauss { beta, gamma, rd },
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: ModelSpec = serde_json::from_str(text).map_err(err)?;
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(err)
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn simulate(&self, py: Python<'_>, window: PyWindow, seed: u64) -> PyResult<PyPointPattern> {
        let model = self.inner;
        let pat = py
            .detach(|| model.simulate(&window.inner, &mut RngStream::from_seed(seed)))
            .map_err(err)?;
        Ok(PyPointPattern { inner: pat })
    }
}

/// Outcome of an isotropy test.
#[pyclass(name = "TestResult", frozen, get_all)]
struct PyTestResult {
    dss: String,
    statistic: String,
    replication: String,
    n_replicates: usize,
    t0: f64,
    p_value: f64,
    reject: bool,
    alpha_level: f64,
    dropped_coordinates: Vec<usize>,
    seed: u64,
    v0: Vec<f64>,
    t_rep: Vec<f64>,
    json: String,
}

impl PyTestResult {
    fn from_result(r: TestResult) -> PyResult<Self> {
        Ok(Self {
            json: serde_json::to_string(&r).map_err(err)?,
            dss: r.dss,
            statistic: r.statistic,
            replication: r.replication,
            n_replicates: r.n_replicates,
            t0: r.t0,
            p_value: r.p_value,
            reject: r.reject,
            alpha_level: r.alpha_level,
            dropped_coordinates: r.dropped_coordinates,
            seed: r.seed,
            v0: r.v0,
            t_rep: r.t_rep,
        })
    }
}

#[pymethods]
impl PyTestResult {
    fn __repr__(&self) -> String {
        format!(
            "TestResult({} {} {}: T0={:.6e}, p={}, reject={})",
            self.dss, self.statistic, self.replication, self.t0, self.p_value, self.reject
        )
    }
}

fn range_grid(pattern: &PointPattern, r_max: Option<f64>, kappa: usize) -> PyResult<RangeGrid> {
    RangeGrid::new(r_max.unwrap_or(pattern.window().min_side() / 4.0), kappa).map_err(err)
}

/// Cylindrical K-function in direction `alpha`; returns (ranges, values).
#[pyfunction]
#[pyo3(signature = (pattern, alpha, zeta=0.15, r_max=None, kappa=36))]
fn k_cyl(
    pattern: PyPointPattern,
    alpha: f64,
    zeta: f64,
    r_max: Option<f64>,
    kappa: usize,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let grid = range_grid(&pattern.inner, r_max, kappa)?;
    let c = k_cyl_hat(&pattern.inner, alpha, zeta, &grid).map_err(err)?;
    Ok((c.nodes, c.values))
}

/// Cone nearest-neighbour distribution in direction `alpha`.
#[pyfunction]
#[pyo3(signature = (pattern, alpha, eps=std::f64::consts::FRAC_PI_8, r_max=None, kappa=36))]
fn g_loc(
    pattern: PyPointPattern,
    alpha: f64,
    eps: f64,
    r_max: Option<f64>,
    kappa: usize,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let grid = range_grid(&pattern.inner, r_max, kappa)?;
    let c = g_loc_hat(&pattern.inner, alpha, eps, &grid).map_err(err)?;
    Ok((c.nodes, c.values))
}

/// Direction spectrum; returns (angles, values).
#[pyfunction]
#[pyo3(signature = (pattern, bandwidth_deg=7.5, p_max=15, kappa=36))]
fn direction_spectrum(
    pattern: PyPointPattern,
    bandwidth_deg: f64,
    p_max: i32,
    kappa: usize,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let fg = FrequencyGrid::new(p_max).map_err(err)?;
    let ag = AngleGrid::new(kappa).map_err(err)?;
    let c = theta_spectrum(&pattern.inner, &fg, bandwidth_deg.to_radians(), &ag).map_err(err)?;
    Ok((c.nodes, c.values))
}

fn replication(
    method: &str,
    n_tiles: usize,
    sr_iters: usize,
    fit: &str,
    null_model: Option<PyModel>,
) -> PyResult<ReplicationConfig> {
    Ok(match method {
        "tiling" => ReplicationConfig::Tiling(TilingConfig { k: n_tiles }),
        "sr" => ReplicationConfig::StochasticReconstruction(SrConfig::new(sr_iters)),
        "mc" => match null_model {
            Some(m) => ReplicationConfig::ParametricMc { model: m.inner },
            None => ReplicationConfig::FittedMc {
                family: match fit {
                    "thomas" => FitFamily::Thomas,
                    "lgcp" => FitFamily::Lgcp,
                    "strauss" => FitFamily::Strauss,
                    other => return Err(err(format!("unknown fit family '{other}'"))),
                },
            },
        },
        other => return Err(err(format!("unknown method '{other}' (tiling, sr or mc)"))),
    })
}

/// Monte Carlo isotropy test of `pattern`.
#[pyfunction]
#[pyo3(signature = (
    pattern, dss="kcyl", stat=None, method="tiling", n_tiles=3, n_rep=199, seed=1,
    alpha1=FRAC_PI_6, alpha2=None, r_max=None, kappa=36, alpha_level=0.05,
    sr_iters=5000, fit="thomas", null_model=None, recentering="plugin", pvalue_orientation="standard"
))]
#[allow(clippy::too_many_arguments)]
fn isotropy_test(
    py: Python<'_>,
    pattern: PyPointPattern,
    dss: &str,
    stat: Option<&str>,
    method: &str,
    n_tiles: usize,
    n_rep: usize,
    seed: u64,
    alpha1: f64,
    alpha2: Option<f64>,
    r_max: Option<f64>,
    kappa: usize,
    alpha_level: f64,
    sr_iters: usize,
    fit: &str,
    null_model: Option<PyModel>,
    recentering: &str,
    pvalue_orientation: &str,
) -> PyResult<PyTestResult> {
    let dss = Dss::from_name(dss).map_err(err)?;
    let statistic = match stat {
        Some(s) => s.parse::<StatKind>().map_err(err)?,
        None => dss.default_stat(),
    };
    let cfg = TestConfig {
        functional: FunctionalSpec {
            dss,
            alpha1,
            alpha2: alpha2.unwrap_or(alpha1 + FRAC_PI_2),
            r_max,
            kappa,
        },
        statistic,
        replication: replication(method, n_tiles, sr_iters, fit, null_model)?,
        n_replicates: n_rep,
        alpha_level,
        recentering: match recentering {
            "plugin" => Recentering::Plugin,
            "loo" => Recentering::Loo,
            other => return Err(err(format!("unknown recentering '{other}'"))),
        },
        pvalue_orientation: match pvalue_orientation {
            "standard" => PValueOrientation::Standard,
            "as-printed" => PValueOrientation::AsPrinted,
            other => return Err(err(format!("unknown p-value orientation '{other}'"))),
        },
    };
    let pat = pattern.inner;
    let result = py.detach(|| run_isotropy_test(&pat, &cfg, seed)).map_err(err)?;
    PyTestResult::from_result(result)
}

/// Isotropic replicates of `pattern`.
#[pyfunction]
#[pyo3(signature = (pattern, method="tiling", n_tiles=3, n_rep=19, seed=1, sr_iters=5000, fit="thomas", null_model=None))]
#[allow(clippy::too_many_arguments)]
fn replicate(
    pattern: PyPointPattern,
    method: &str,
    n_tiles: usize,
    n_rep: usize,
    seed: u64,
    sr_iters: usize,
    fit: &str,
    null_model: Option<PyModel>,
) -> PyResult<Vec<PyPointPattern>> {
    let cfg = replication(method, n_tiles, sr_iters, fit, null_model)?;
    let replicator = Replicator::prepare(&cfg, &pattern.inner).map_err(err)?;
    (0..n_rep)
        .map(|i| {
            let mut rng = RngStream::from_seed(replicate_seed(seed, i));
            replicator
                .replicate(&mut rng)
                .map(|inner| PyPointPattern { inner })
                .map_err(err)
        })
        .collect()
}

#[pymodule]
mod anisotest {
    #[pymodule_export]
    use super::{
        direction_spectrum, g_loc, isotropy_test, k_cyl, replicate, PyModel, PyPointPattern, PyTestResult,
        PyWindow,
    };
}
