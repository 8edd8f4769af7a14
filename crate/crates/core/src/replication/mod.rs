//! Replicates of an observed pattern that satisfy the isotropy hypothesis:
//! tiling with random tile rotation, stochastic reconstruction, and
//! parametric Monte Carlo from a known or fitted isotropic model.

mod reconstruction;
mod tiling;

pub use reconstruction::{
    deviation_from_curve, integrated_squared_difference, sr_grid, sr_replicate, sr_replicate_from,
    sr_replicate_with_target, sr_total_deviation, write_trace_csv, Schedule, SrConfig, SrOutput, SrTarget, TraceRow,
    REFRESH_EVERY, SR_GRID_NODES,
};
pub use tiling::{tile_replicate, TileDraw, TileLayout, TilingConfig, TilingOutput};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{fit_lgcp_mincontrast, fit_strauss, fit_thomas_mincontrast, FitResult};
use crate::geometry::{PointPattern, Window};
use crate::processes::{ModelSpec, PreparedModel};
use crate::rng::RngStream;
use crate::summaries::RangeGrid;

/// Model family fitted to the observed pattern before parametric replication.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitFamily {
    Thomas,
    Lgcp,
    Strauss,
}

impl FitFamily {
    pub fn name(self) -> &'static str {
        match self {
            FitFamily::Thomas => "thomas",
            FitFamily::Lgcp => "lgcp",
            FitFamily::Strauss => "strauss",
        }
    }

    /// Minimum-contrast grid: `l / 400` spacing up to `l / 4`.
    pub fn contrast_grid(window: &Window) -> Result<RangeGrid> {
        RangeGrid::new(window.min_side() / 4.0, 100)
    }

    pub fn fit(self, pat: &PointPattern) -> Result<FitResult> {
        match self {
            FitFamily::Thomas => fit_thomas_mincontrast(pat, &Self::contrast_grid(pat.window())?),
            FitFamily::Lgcp => fit_lgcp_mincontrast(pat, &Self::contrast_grid(pat.window())?),
            FitFamily::Strauss => fit_strauss(pat),
        }
    }
}

/// How replicates are produced.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum ReplicationConfig {
    Tiling(TilingConfig),
    StochasticReconstruction(SrConfig),
    /// Simulation from a known isotropic model.
    ParametricMc { model: ModelSpec },
    /// Simulation from a model fitted to the observed pattern.
    FittedMc { family: FitFamily },
}

impl ReplicationConfig {
    pub fn label(&self) -> String {
        match self {
            ReplicationConfig::Tiling(t) => format!("tiling-k{}", t.k),
            ReplicationConfig::StochasticReconstruction(_) => "stochastic-reconstruction".into(),
            ReplicationConfig::ParametricMc { model } => format!("mc-{}", model.name()),
            ReplicationConfig::FittedMc { family } => format!("mc-fitted-{}", family.name()),
        }
    }
}

/// Simulate from an isotropic null model.
pub fn parametric_replicate(model: &ModelSpec, window: &Window, rng: &mut RngStream) -> Result<PointPattern> {
    if !model.is_isotropic() {
        return Err(Error::AnisotropicNullModel { a: model.anisotropy() });
    }
    model.simulate(window, rng)
}

/// A replication method bound to one observed pattern, with any per-pattern
/// work (tile layout, target summaries, model fit, field factorisation) done
/// once and shared by every replicate.
#[derive(Debug)]
pub enum Replicator {
    Tiling {
        layout: TileLayout,
        observed: PointPattern,
    },
    Reconstruction {
        window: Window,
        target: SrTarget,
        cfg: SrConfig,
    },
    Parametric {
        model: Box<PreparedModel>,
        fit: Option<FitResult>,
    },
}

impl Replicator {
    pub fn prepare(cfg: &ReplicationConfig, observed: &PointPattern) -> Result<Self> {
        let window = *observed.window();
        Ok(match *cfg {
            ReplicationConfig::Tiling(t) => Replicator::Tiling {
                layout: TileLayout::new(&window, t)?,
                observed: observed.clone(),
            },
            ReplicationConfig::StochasticReconstruction(sr) => {
                sr.validate()?;
                observed.require(1)?;
                Replicator::Reconstruction {
                    window,
                    target: SrTarget::new(observed, &sr)?,
                    cfg: sr,
                }
            }
            ReplicationConfig::ParametricMc { model } => Self::parametric(&model, &window, None)?,
            ReplicationConfig::FittedMc { family } => {
                let fit = family.fit(observed)?;
                Self::parametric(&fit.model, &window, Some(fit))?
            }
        })
    }

    /// Replicator that simulates from `model` on `window`.
    pub fn parametric(model: &ModelSpec, window: &Window, fit: Option<FitResult>) -> Result<Self> {
        if !model.is_isotropic() {
            return Err(Error::AnisotropicNullModel { a: model.anisotropy() });
        }
        Ok(Replicator::Parametric {
            model: Box::new(PreparedModel::new(model, window)?),
            fit,
        })
    }

    /// The fitted model, for fitted parametric replication.
    pub fn fit(&self) -> Option<&FitResult> {
        match self {
            Replicator::Parametric { fit, .. } => fit.as_ref(),
            _ => None,
        }
    }

    pub fn replicate(&self, rng: &mut RngStream) -> Result<PointPattern> {
        match self {
            Replicator::Tiling { layout, observed } => Ok(layout.replicate(observed, rng).pattern),
            Replicator::Reconstruction { window, target, cfg } => {
                Ok(sr_replicate_with_target(window, target, cfg, rng)?.pattern)
            }
            Replicator::Parametric { model, .. } => model.simulate(rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anisotropic_null_is_rejected() {
        let w = Window::unit_square();
        let err = parametric_replicate(&ModelSpec::paper_lgcp(0.6), &w, &mut RngStream::from_seed(1)).unwrap_err();
        assert!(matches!(err, Error::AnisotropicNullModel { a } if a == 0.6));
    }

    #[test]
    fn poisson_delegates() {
        let w = Window::unit_square();
        let m = ModelSpec::Poisson { lambda: 400.0 };
        let a = parametric_replicate(&m, &w, &mut RngStream::from_seed(5)).unwrap();
        let b = crate::processes::sim_poisson(400.0, &w, &mut RngStream::from_seed(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_json() {
        let c = ReplicationConfig::Tiling(TilingConfig { k: 4 });
        assert_eq!(serde_json::to_string(&c).unwrap(), r#"{"method":"tiling","k":4}"#);
        let f: ReplicationConfig = serde_json::from_str(r#"{"method":"fitted-mc","family":"thomas"}"#).unwrap();
        assert_eq!(f.label(), "mc-fitted-thomas");
        let sr: ReplicationConfig =
            serde_json::from_str(r#"{"method":"stochastic-reconstruction","iters":5000}"#).unwrap();
        assert_eq!(sr, ReplicationConfig::StochasticReconstruction(SrConfig::new(5000)));
    }
}
