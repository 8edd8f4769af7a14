use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{DoubleCone, Point, PointPattern, Window};
use crate::rng::RngStream;

use super::poisson::{poisson_count, uniform_in};
use super::ModelSpec;

pub const DEFAULT_CHAIN_ITERATIONS: usize = 50_000;

/// Intensity of the Poisson initial state.
const INITIAL_INTENSITY: f64 = 400.0;

/// Attempts per initial point before the initial state stops growing.
const INITIAL_ATTEMPTS: usize = 1000;

/// A stationary pairwise-interaction energy `n * alpha + sum phi(x_j - x_i)`.
pub trait PairInteraction {
    /// Energy per point.
    fn alpha(&self) -> f64;
    /// Pair potential; `+inf` forbids the pair.
    fn pair(&self, delta: Point) -> f64;
    /// Distance below which some direction makes `pair` infinite.
    fn hard_core(&self) -> f64;
}

/// Anisotropic Lennard-Jones interaction with a cone-dependent length scale.
#[derive(Clone, Copy, Debug)]
pub struct LennardJones {
    alpha: f64,
    rho: f64,
    sigma_in: f64,
    sigma_out: f64,
    cone: DoubleCone,
}

impl LennardJones {
    pub fn from_spec(model: &ModelSpec) -> Result<Self> {
        let ModelSpec::GibbsLj {
            alpha_chem,
            rho,
            sigma,
            eps_cone,
            a,
            theta,
        } = *model
        else {
            return Err(Error::InvalidArgument(format!("{} is not a Gibbs-LJ model", model.name())));
        };
        model.validate()?;
        Ok(Self {
            alpha: alpha_chem,
            rho,
            sigma_in: sigma * (2.0 - a.cbrt()).sqrt(),
            sigma_out: sigma * a.powf(1.0 / 6.0),
            cone: DoubleCone::new(theta, eps_cone)?,
        })
    }

    /// Length scales inside and outside the cone.
    pub fn sigmas(&self) -> (f64, f64) {
        (self.sigma_in, self.sigma_out)
    }

    fn potential(&self, delta: Point) -> f64 {
        let r = delta.norm();
        let inside = self.cone.contains(delta).unwrap_or(false);
        let s = if inside { self.sigma_in } else { self.sigma_out };
        if r < s / 10.0 {
            return f64::INFINITY;
        }
        let q6 = (s / r).powi(6);
        4.0 * self.rho * (q6 * q6 - q6)
    }
}

impl PairInteraction for LennardJones {
    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn pair(&self, delta: Point) -> f64 {
        self.potential(delta)
    }

    fn hard_core(&self) -> f64 {
        self.sigma_in.max(self.sigma_out) / 10.0
    }
}

/// Anisotropic Lennard-Jones pair potential of a Gibbs-LJ model.
pub fn lj_pair_potential(delta: Point, model: &ModelSpec) -> Result<f64> {
    if delta.x == 0.0 && delta.y == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(LennardJones::from_spec(model)?.potential(delta))
}

/// Strauss interaction: density `beta^n gamma^s(x)` with `s` the number of
/// pairs at distance at most `rd`.
#[derive(Clone, Copy, Debug)]
pub struct StraussInteraction {
    alpha: f64,
    penalty: f64,
    rd: f64,
}

impl StraussInteraction {
    pub fn from_spec(model: &ModelSpec) -> Result<Self> {
        let ModelSpec::Strauss { beta, gamma, rd } = *model else {
            return Err(Error::InvalidArgument(format!("{} is not a Strauss model", model.name())));
        };
        model.validate()?;
        Ok(Self {
            alpha: -beta.ln(),
            penalty: -gamma.ln(),
            rd,
        })
    }
}

impl PairInteraction for StraussInteraction {
    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn pair(&self, delta: Point) -> f64 {
        if delta.norm() <= self.rd {
            self.penalty
        } else {
            0.0
        }
    }

    fn hard_core(&self) -> f64 {
        if self.penalty.is_infinite() {
            self.rd
        } else {
            0.0
        }
    }
}

/// Metropolis-Hastings birth-death-move chain with incrementally tracked
/// energy. Moves displace one point uniformly within a square of half-side
/// one tenth of the window's shorter side; proposals leaving the window are
/// rejected.
#[derive(Clone, Debug)]
pub struct BirthDeathMove<I> {
    interaction: I,
    window: Window,
    points: Vec<Point>,
    energy: f64,
    step: f64,
}

impl<I: PairInteraction> BirthDeathMove<I> {
    /// Chain started from `points`; errors when their energy is infinite.
    pub fn new(interaction: I, window: Window, points: Vec<Point>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !window.contains(**p)) {
            return Err(Error::PointOutsideWindow { x: p.x, y: p.y });
        }
        let mut chain = Self {
            interaction,
            window,
            points,
            energy: 0.0,
            step: window.min_side() / 10.0,
        };
        chain.energy = chain.full_energy();
        if !chain.energy.is_finite() {
            return Err(Error::InvalidArgument("initial state has infinite energy".into()));
        }
        Ok(chain)
    }

    /// Chain started from a Poisson-sized sequential-adsorption pattern that
    /// keeps every pair beyond the interaction's hard core.
    pub fn from_poisson(interaction: I, window: Window, rng: &mut RngStream) -> Result<Self> {
        let target = poisson_count(INITIAL_INTENSITY * window.area(), rng)?;
        let core = interaction.hard_core();
        let mut points: Vec<Point> = Vec::with_capacity(target);
        'outer: for _ in 0..target {
            for _ in 0..INITIAL_ATTEMPTS {
                let p = uniform_in(&window, rng);
                if points.iter().all(|q| q.dist(p) > core) && points.iter().all(|q| interaction.pair(p - *q).is_finite()) {
                    points.push(p);
                    continue 'outer;
                }
            }
            break;
        }
        if !interaction.alpha().is_finite() {
            points.clear();
        }
        Self::new(interaction, window, points)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Incrementally tracked energy.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Energy recomputed from scratch.
    pub fn full_energy(&self) -> f64 {
        let n = self.points.len();
        if n == 0 {
            return 0.0;
        }
        let mut e = n as f64 * self.interaction.alpha();
        for j in 1..n {
            for i in 0..j {
                e += self.interaction.pair(self.points[j] - self.points[i]);
            }
        }
        e
    }

    fn local(&self, p: Point, skip: Option<usize>) -> f64 {
        self.points
            .iter()
            .enumerate()
            .filter(|(k, _)| Some(*k) != skip)
            .map(|(_, q)| self.interaction.pair(p - *q))
            .sum()
    }

    /// One proposal; returns whether it was accepted.
    pub fn step(&mut self, rng: &mut RngStream) -> bool {
        let area = self.window.area();
        let n = self.points.len();
        let kind = rng.random_range(0..3u8);
        match kind {
            0 => {
                let p = uniform_in(&self.window, rng);
                let delta = self.interaction.alpha() + self.local(p, None);
                let ratio = (-delta).exp() * area / (n + 1) as f64;
                if accept(ratio, rng) {
                    self.points.push(p);
                    self.energy += delta;
                    return true;
                }
            }
            1 => {
                if n == 0 {
                    return false;
                }
                let i = rng.random_range(0..n);
                let delta = -self.interaction.alpha() - self.local(self.points[i], Some(i));
                let ratio = (-delta).exp() * n as f64 / area;
                if accept(ratio, rng) {
                    self.points.swap_remove(i);
                    self.energy += delta;
                    return true;
                }
            }
            _ => {
                if n == 0 {
                    return false;
                }
                let i = rng.random_range(0..n);
                let from = self.points[i];
                let to = Point::new(
                    from.x + rng.random_range(-self.step..self.step),
                    from.y + rng.random_range(-self.step..self.step),
                );
                if !self.window.contains(to) {
                    return false;
                }
                let delta = self.local(to, Some(i)) - self.local(from, Some(i));
                if accept((-delta).exp(), rng) {
                    self.points[i] = to;
                    self.energy += delta;
                    return true;
                }
            }
        }
        false
    }

    pub fn run(&mut self, iterations: usize, rng: &mut RngStream) {
        for _ in 0..iterations {
            self.step(rng);
        }
    }

    pub fn into_pattern(self) -> PointPattern {
        PointPattern::clipped(self.points, self.window)
    }
}

fn accept(ratio: f64, rng: &mut RngStream) -> bool {
    if ratio.is_nan() || ratio <= 0.0 {
        // still consume a uniform so the stream position is proposal-independent
        let _: f64 = rng.random();
        return false;
    }
    rng.random::<f64>() < ratio
}

/// Gibbs process with anisotropic Lennard-Jones pair potential.
pub fn sim_gibbs_lj(model: &ModelSpec, window: &Window, iterations: usize, rng: &mut RngStream) -> Result<PointPattern> {
    let lj = LennardJones::from_spec(model)?;
    let mut chain = BirthDeathMove::from_poisson(lj, *window, rng)?;
    chain.run(iterations, rng);
    Ok(chain.into_pattern())
}

/// Strauss process.
pub fn sim_strauss(model: &ModelSpec, window: &Window, iterations: usize, rng: &mut RngStream) -> Result<PointPattern> {
    let s = StraussInteraction::from_spec(model)?;
    let mut chain = BirthDeathMove::from_poisson(s, *window, rng)?;
    chain.run(iterations, rng);
    Ok(chain.into_pattern())
}
