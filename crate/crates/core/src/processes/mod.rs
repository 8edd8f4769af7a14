//! Point-process simulators: homogeneous Poisson, log-Gaussian Cox with
//! geometric anisotropy, Gibbs with an anisotropic Lennard-Jones potential,
//! the Poisson line cluster process, Thomas and Strauss.

mod gibbs;
mod lgcp;
mod plcp;
mod poisson;
mod thomas;
mod von_mises;

pub use gibbs::{
    lj_pair_potential, sim_gibbs_lj, sim_strauss, BirthDeathMove, LennardJones, PairInteraction, StraussInteraction,
    DEFAULT_CHAIN_ITERATIONS,
};
pub use lgcp::{sim_lgcp, LgcpSimulator};
pub use plcp::{plcp_concentration, sim_plcp, sim_plcp_with_lines, LatentLine, PlcpRealisation};
pub use poisson::{sim_binomial, sim_poisson};
pub use thomas::sim_thomas;
pub use von_mises::sample_von_mises;

use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PointPattern, Window};
use crate::rng::RngStream;

/// Point-process models with their parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelSpec {
    Poisson {
        lambda: f64,
    },
    /// Exponential covariance `sigma2 * exp(-d / scale)`, anisotropy via
    /// `R(theta) C(a)` with `C(a) = diag(1/a, a)`.
    Lgcp {
        mu: f64,
        sigma2: f64,
        scale: f64,
        a: f64,
        theta: f64,
    },
    GibbsLj {
        alpha_chem: f64,
        rho: f64,
        sigma: f64,
        eps_cone: f64,
        a: f64,
        theta: f64,
    },
    Plcp {
        rho_lines: f64,
        nu: f64,
        sigma_perp: f64,
        a: f64,
        theta: f64,
    },
    Thomas {
        kappa_parent: f64,
        mu_off: f64,
        sigma_off: f64,
    },
    Strauss {
        beta: f64,
        gamma: f64,
        rd: f64,
    },
}

impl ModelSpec {
    /// LGCP with variance 3, scale 0.02 and mean intensity 400.
    pub fn paper_lgcp(a: f64) -> Self {
        let sigma2 = 3.0;
        ModelSpec::Lgcp {
            mu: 400f64.ln() - sigma2 / 2.0,
            sigma2,
            scale: 0.02,
            a,
            theta: FRAC_PI_6,
        }
    }

    pub fn paper_gibbs(a: f64) -> Self {
        ModelSpec::GibbsLj {
            alpha_chem: -(0.5f64.ln()),
            rho: 10.0,
            sigma: 0.02,
            eps_cone: FRAC_PI_4,
            a,
            theta: FRAC_PI_6,
        }
    }

    pub fn paper_plcp(a: f64) -> Self {
        ModelSpec::Plcp {
            rho_lines: 16.0,
            nu: 25.0,
            sigma_perp: 0.015,
            a,
            theta: FRAC_PI_6,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Poisson { .. } => "poisson",
            ModelSpec::Lgcp { .. } => "lgcp",
            ModelSpec::GibbsLj { .. } => "gibbs-lj",
            ModelSpec::Plcp { .. } => "plcp",
            ModelSpec::Thomas { .. } => "thomas",
            ModelSpec::Strauss { .. } => "strauss",
        }
    }

    /// Anisotropy parameter; 1 for models without one.
    pub fn anisotropy(&self) -> f64 {
        match *self {
            ModelSpec::Lgcp { a, .. } | ModelSpec::GibbsLj { a, .. } | ModelSpec::Plcp { a, .. } => a,
            _ => 1.0,
        }
    }

    pub fn is_isotropic(&self) -> bool {
        self.anisotropy() == 1.0
    }

    /// Same model with anisotropy parameter replaced (no-op for models
    /// without one).
    pub fn with_anisotropy(mut self, value: f64) -> Self {
        match &mut self {
            ModelSpec::Lgcp { a, .. } | ModelSpec::GibbsLj { a, .. } | ModelSpec::Plcp { a, .. } => *a = value,
            _ => {}
        }
        self
    }

    /// Same model with preferred direction replaced (no-op for models
    /// without one).
    pub fn with_direction(mut self, value: f64) -> Self {
        match &mut self {
            ModelSpec::Lgcp { theta, .. } | ModelSpec::GibbsLj { theta, .. } | ModelSpec::Plcp { theta, .. } => {
                *theta = value
            }
            _ => {}
        }
        self
    }

    /// Whether the model has an anisotropy parameter.
    pub fn has_anisotropy(&self) -> bool {
        matches!(self, ModelSpec::Lgcp { .. } | ModelSpec::GibbsLj { .. } | ModelSpec::Plcp { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(format!("{}: {msg}", self.name())));
        let check_a = |a: f64| a > 0.0 && a <= 1.0;
        match *self {
            ModelSpec::Poisson { lambda } if !(lambda >= 0.0 && lambda.is_finite()) => bad(format!("lambda {lambda}")),
            ModelSpec::Lgcp {
                mu, sigma2, scale, a, theta,
            } => {
                if !(mu.is_finite() && sigma2 >= 0.0 && scale > 0.0 && check_a(a) && theta.is_finite()) {
                    return bad(format!("mu {mu}, sigma2 {sigma2}, scale {scale}, a {a}"));
                }
                Ok(())
            }
            ModelSpec::GibbsLj {
                alpha_chem, rho, sigma, eps_cone, a, theta,
            } => {
                let eps_ok = eps_cone > 0.0 && eps_cone <= std::f64::consts::FRAC_PI_2;
                if !(alpha_chem.is_finite() && rho >= 0.0 && sigma > 0.0 && eps_ok && check_a(a) && theta.is_finite()) {
                    return bad(format!("rho {rho}, sigma {sigma}, eps {eps_cone}, a {a}"));
                }
                Ok(())
            }
            ModelSpec::Plcp {
                rho_lines, nu, sigma_perp, a, theta,
            } => {
                if !(rho_lines >= 0.0 && nu >= 0.0 && sigma_perp >= 0.0 && check_a(a) && theta.is_finite()) {
                    return bad(format!("rho_lines {rho_lines}, nu {nu}, sigma {sigma_perp}, a {a}"));
                }
                Ok(())
            }
            ModelSpec::Thomas {
                kappa_parent, mu_off, sigma_off,
            } => {
                if !(kappa_parent >= 0.0 && mu_off >= 0.0 && sigma_off > 0.0) {
                    return bad(format!("kappa {kappa_parent}, mu {mu_off}, sigma {sigma_off}"));
                }
                Ok(())
            }
            ModelSpec::Strauss { beta, gamma, rd } => {
                if !(beta >= 0.0 && (0.0..=1.0).contains(&gamma) && rd > 0.0) {
                    return bad(format!("beta {beta}, gamma {gamma}, rd {rd}"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Draw one pattern on `window`. Chain-based models run
    /// [`DEFAULT_CHAIN_ITERATIONS`] birth-death-move steps.
    pub fn simulate(&self, window: &Window, rng: &mut RngStream) -> Result<PointPattern> {
        self.validate()?;
        match *self {
            ModelSpec::Poisson { lambda } => sim_poisson(lambda, window, rng),
            ModelSpec::Lgcp { .. } => sim_lgcp(self, window, rng),
            ModelSpec::GibbsLj { .. } => sim_gibbs_lj(self, window, DEFAULT_CHAIN_ITERATIONS, rng),
            ModelSpec::Plcp { .. } => sim_plcp(self, window, rng),
            ModelSpec::Thomas { .. } => sim_thomas(self, window, rng),
            ModelSpec::Strauss { .. } => sim_strauss(self, window, DEFAULT_CHAIN_ITERATIONS, rng),
        }
    }
}

/// Simulator with any per-(model, window) setup done once, for drawing many
/// patterns from the same law.
#[derive(Debug)]
pub enum PreparedModel {
    Lgcp(Box<LgcpSimulator>),
    Direct(ModelSpec, Window),
}

impl PreparedModel {
    pub fn new(model: &ModelSpec, window: &Window) -> Result<Self> {
        model.validate()?;
        Ok(match model {
            ModelSpec::Lgcp { .. } => PreparedModel::Lgcp(Box::new(LgcpSimulator::new(model, window)?)),
            _ => PreparedModel::Direct(*model, *window),
        })
    }

    pub fn simulate(&self, rng: &mut RngStream) -> Result<PointPattern> {
        match self {
            PreparedModel::Lgcp(sim) => Ok(sim.simulate(rng)),
            PreparedModel::Direct(model, window) => model.simulate(window, rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_lgcp_mean_intensity_is_400() {
        if let ModelSpec::Lgcp { mu, sigma2, .. } = ModelSpec::paper_lgcp(1.0) {
            assert!(((mu + sigma2 / 2.0).exp() - 400.0).abs() < 1e-9);
        } else {
            unreachable!();
        }
    }

    #[test]
    fn json_shape() {
        let m = ModelSpec::Strauss {
            beta: 600.0,
            gamma: 0.3,
            rd: 0.03,
        };
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"model":"strauss","beta":600.0,"gamma":0.3,"rd":0.03}"#);
        let back: ModelSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn validation() {
        assert!(ModelSpec::paper_lgcp(0.0).validate().is_err());
        assert!(ModelSpec::paper_plcp(1.2).validate().is_err());
        assert!(ModelSpec::Strauss {
            beta: 1.0,
            gamma: 1.5,
            rd: 0.1
        }
        .validate()
        .is_err());
        assert!(ModelSpec::paper_gibbs(0.6).validate().is_ok());
    }

    #[test]
    fn anisotropy_accessors() {
        let m = ModelSpec::paper_plcp(0.4);
        assert!(!m.is_isotropic());
        assert!(m.with_anisotropy(1.0).is_isotropic());
        assert!(ModelSpec::Poisson { lambda: 1.0 }.is_isotropic());
    }
}
