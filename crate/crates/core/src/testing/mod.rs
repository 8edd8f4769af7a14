//! Monte Carlo isotropy tests: functional summaries of directional
//! differences, scalar deviation statistics and the rank p-value.

mod statistics;

pub use statistics::{
    compute_statistic, mc_p_value, mc_p_value_oriented, stat_ms, stat_ms_std, PValueOrientation, Recentering,
    StatKind, StatOutcome, MIN_VARIANCE,
};

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, FRAC_PI_8};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointPattern;
use crate::processes::ModelSpec;
use crate::replication::{ReplicationConfig, Replicator};
use crate::rng::{derive_seed, RngStream};
use crate::summaries::{g_loc_hat, k_cyl_hat, theta_spectrum, AngleGrid, FrequencyGrid, RangeGrid};

/// Grid size shared by every functional.
pub const DEFAULT_KAPPA: usize = 36;
/// Preferred direction of the anisotropic models.
pub const DEFAULT_THETA: f64 = FRAC_PI_6;

/// Directional summary statistic and its tuning parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum Dss {
    /// Cone nearest-neighbour distribution with cone half-angle `eps`.
    #[serde(rename = "Gloc")]
    Gloc { eps: f64 },
    /// Cylindrical K-function with aspect ratio `zeta`.
    #[serde(rename = "Kcyl")]
    Kcyl { zeta: f64 },
    /// Direction spectrum with angular bandwidth `h` over frequencies
    /// `-p_max..=p_max` per axis.
    #[serde(rename = "Theta")]
    Theta { h: f64, p_max: i32 },
}

impl Dss {
    pub fn gloc() -> Self {
        Dss::Gloc { eps: FRAC_PI_8 }
    }

    pub fn kcyl() -> Self {
        Dss::Kcyl { zeta: 0.15 }
    }

    pub fn theta() -> Self {
        Dss::Theta {
            h: 7.5f64.to_radians(),
            p_max: 15,
        }
    }

    /// Default-parameter statistic by name (`Gloc`, `Kcyl`, `Theta`; case
    /// insensitive).
    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "gloc" => Ok(Self::gloc()),
            "kcyl" => Ok(Self::kcyl()),
            "theta" | "theta-spectrum" => Ok(Self::theta()),
            _ => Err(Error::InvalidArgument(format!("unknown summary statistic '{name}'"))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Dss::Gloc { .. } => "Gloc",
            Dss::Kcyl { .. } => "Kcyl",
            Dss::Theta { .. } => "Theta",
        }
    }

    /// Statistic paired with this summary in the default study design.
    pub fn default_stat(&self) -> StatKind {
        match self {
            Dss::Gloc { .. } => StatKind::Ms,
            Dss::Kcyl { .. } => StatKind::MsRangeStd,
            Dss::Theta { .. } => StatKind::MsDirStd,
        }
    }
}

/// What a functional vector discretises.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FunctionalKind {
    RangeContrast { alpha1: f64, alpha2: f64, dss: Dss, r_max: f64 },
    DirectionSpectrum { h: f64, p_max: i32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalVector {
    pub values: Vec<f64>,
    pub kind: FunctionalKind,
}

/// `S_alpha1(r_i) - S_alpha2(r_i)` on the range grid.
pub fn functional_range(
    pat: &PointPattern,
    dss: Dss,
    alpha1: f64,
    alpha2: f64,
    grid: &RangeGrid,
) -> Result<FunctionalVector> {
    pat.require(2)?;
    let curve = |alpha: f64| match dss {
        Dss::Gloc { eps } => g_loc_hat(pat, alpha, eps, grid),
        Dss::Kcyl { zeta } => k_cyl_hat(pat, alpha, zeta, grid),
        Dss::Theta { .. } => Err(Error::InvalidArgument(
            "the direction spectrum is not a range functional".into(),
        )),
    };
    let (a, b) = (curve(alpha1)?, curve(alpha2)?);
    Ok(FunctionalVector {
        values: a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect(),
        kind: FunctionalKind::RangeContrast {
            alpha1,
            alpha2,
            dss,
            r_max: grid.r_max,
        },
    })
}

/// Direction spectrum on the angle grid.
pub fn functional_direction(pat: &PointPattern, h: f64, fg: &FrequencyGrid, ag: &AngleGrid) -> Result<FunctionalVector> {
    let curve = theta_spectrum(pat, fg, h, ag)?;
    Ok(FunctionalVector {
        values: curve.values,
        kind: FunctionalKind::DirectionSpectrum { h, p_max: fg.p_max },
    })
}

/// Full description of the functional computed from each pattern.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FunctionalSpec {
    pub dss: Dss,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Largest range; a quarter of the window's shorter side when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    pub kappa: usize,
}

impl FunctionalSpec {
    /// Contrast between `theta` and `theta + pi/2` on 36 grid points.
    pub fn standard(dss: Dss, theta: f64) -> Self {
        Self {
            dss,
            alpha1: theta,
            alpha2: theta + FRAC_PI_2,
            r_max: None,
            kappa: DEFAULT_KAPPA,
        }
    }

    pub fn evaluate(&self, pat: &PointPattern) -> Result<FunctionalVector> {
        match self.dss {
            Dss::Theta { h, p_max } => {
                functional_direction(pat, h, &FrequencyGrid::new(p_max)?, &AngleGrid::new(self.kappa)?)
            }
            dss => {
                let r_max = self.r_max.unwrap_or(pat.window().min_side() / 4.0);
                functional_range(pat, dss, self.alpha1, self.alpha2, &RangeGrid::new(r_max, self.kappa)?)
            }
        }
    }
}

/// Settings of one isotropy test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TestConfig {
    pub functional: FunctionalSpec,
    pub statistic: StatKind,
    pub replication: ReplicationConfig,
    pub n_replicates: usize,
    pub alpha_level: f64,
    #[serde(default)]
    pub recentering: Recentering,
    #[serde(default)]
    pub pvalue_orientation: PValueOrientation,
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_replicates == 0 {
            return Err(Error::InvalidArgument("at least one replicate is required".into()));
        }
        if !(self.alpha_level > 0.0 && self.alpha_level < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "significance level {} outside (0, 1)",
                self.alpha_level
            )));
        }
        Ok(())
    }
}

/// Outcome of one test, serialised as the result document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub dss: String,
    pub statistic: String,
    pub replication: String,
    pub n_replicates: usize,
    #[serde(rename = "T0")]
    pub t0: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha_level: f64,
    pub dropped_coordinates: Vec<usize>,
    pub seed: u64,
    pub recentering: Recentering,
    pub pvalue_orientation: PValueOrientation,
    pub v0: Vec<f64>,
    pub t_rep: Vec<f64>,
    pub m_hat: Vec<f64>,
    pub var_hat: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted_model: Option<ModelSpec>,
}

/// Seed of replicate `index` for a test seeded with `seed`.
pub fn replicate_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, 0, 0, index as u64)
}

/// Functionals of `n` replicates, one vector per spec per replicate, in
/// replicate order. Replicates are generated in parallel from independent
/// derived streams; the first failing index is reported.
pub fn replicate_functionals(
    replicator: &Replicator,
    specs: &[FunctionalSpec],
    n: usize,
    seed: u64,
) -> Result<Vec<Vec<FunctionalVector>>> {
    let results: Vec<Result<Vec<FunctionalVector>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::from_seed(replicate_seed(seed, i));
            replicator
                .replicate(&mut rng)
                .and_then(|pat| specs.iter().map(|s| s.evaluate(&pat)).collect())
                .map_err(|e| Error::Replicate {
                    index: i,
                    source: Box::new(e),
                })
        })
        .collect();
    results.into_iter().collect()
}

/// Statistic, p-value and decision from an observed functional and its
/// replicates.
pub fn decide(
    v0: &[f64],
    reps: &[Vec<f64>],
    kind: StatKind,
    alpha_level: f64,
    recentering: Recentering,
    orientation: PValueOrientation,
) -> Result<(StatOutcome, f64, bool)> {
    let out = compute_statistic(kind, v0, reps, recentering)?;
    let p = mc_p_value_oriented(out.t0, &out.t_rep, orientation);
    Ok((out, p, p <= alpha_level))
}

/// Full Monte Carlo isotropy test of `pat`; a pure function of its inputs.
pub fn run_isotropy_test(pat: &PointPattern, cfg: &TestConfig, seed: u64) -> Result<TestResult> {
    cfg.validate()?;
    let v0 = cfg.functional.evaluate(pat)?;
    let replicator = Replicator::prepare(&cfg.replication, pat)?;
    let reps = replicate_functionals(&replicator, &[cfg.functional], cfg.n_replicates, seed)?;
    let rep_values: Vec<Vec<f64>> = reps.into_iter().map(|mut v| v.remove(0).values).collect();
    let (out, p, reject) = decide(
        &v0.values,
        &rep_values,
        cfg.statistic,
        cfg.alpha_level,
        cfg.recentering,
        cfg.pvalue_orientation,
    )?;
    Ok(TestResult {
        dss: cfg.functional.dss.label().into(),
        statistic: cfg.statistic.label().into(),
        replication: cfg.replication.label(),
        n_replicates: cfg.n_replicates,
        t0: out.t0,
        p_value: p,
        reject,
        alpha_level: cfg.alpha_level,
        dropped_coordinates: out.dropped,
        seed,
        recentering: cfg.recentering,
        pvalue_orientation: cfg.pvalue_orientation,
        v0: v0.values,
        t_rep: out.t_rep,
        m_hat: out.m_hat,
        var_hat: out.var_hat,
        fitted_model: replicator.fit().map(|f| f.model),
    })
}
