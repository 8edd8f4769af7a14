use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::{Point, PointPattern, Window};
use crate::rng::RngStream;

use super::poisson::poisson_count;
use super::von_mises::sample_von_mises;
use super::ModelSpec;

/// von Mises concentration of line directions: `5 (1 - exp(1 - 1/a))`.
pub fn plcp_concentration(a: f64) -> f64 {
    5.0 * (1.0 - (1.0 - 1.0 / a).exp())
}

/// A latent line `{centre + offset * n + t * u}` with `u = (cos phi, sin phi)`
/// and `n = (-sin phi, cos phi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatentLine {
    pub direction: f64,
    pub offset: f64,
    pub centre: Point,
}

impl LatentLine {
    pub fn unit(&self) -> Point {
        Point::unit(self.direction)
    }

    pub fn normal(&self) -> Point {
        Point::unit(self.direction).rotate(std::f64::consts::FRAC_PI_2)
    }

    /// Perpendicular distance from `p` to the line.
    pub fn distance(&self, p: Point) -> f64 {
        ((p - self.centre).dot(self.normal()) - self.offset).abs()
    }
}

/// PLCP draw with its latent lines; `line_of_point[i]` indexes the line that
/// generated point `i` of `pattern`.
#[derive(Clone, Debug)]
pub struct PlcpRealisation {
    pub pattern: PointPattern,
    pub lines: Vec<LatentLine>,
    pub line_of_point: Vec<usize>,
}

pub fn sim_plcp_with_lines(model: &ModelSpec, window: &Window, rng: &mut RngStream) -> Result<PlcpRealisation> {
    let ModelSpec::Plcp {
        rho_lines,
        nu,
        sigma_perp,
        a,
        theta,
    } = *model
    else {
        return Err(Error::InvalidArgument(format!("{} is not a PLCP", model.name())));
    };
    model.validate()?;

    let centre = window.center();
    let radius = window.circumradius() + 4.0 * sigma_perp;
    let kappa = plcp_concentration(a);
    let normal = Normal::new(0.0, sigma_perp).map_err(|e| Error::InvalidArgument(e.to_string()))?;

    let n_lines = poisson_count(2.0 * radius * rho_lines, rng)?;
    let mut lines = Vec::with_capacity(n_lines);
    let mut points = Vec::new();
    let mut line_of_point = Vec::new();
    for l in 0..n_lines {
        let line = LatentLine {
            direction: sample_von_mises(theta, kappa, rng),
            offset: rng.random_range(-radius..radius),
            centre,
        };
        let half = (radius * radius - line.offset * line.offset).max(0.0).sqrt() + 4.0 * sigma_perp;
        let (u, nrm) = (line.unit(), line.normal());
        let foot = centre + nrm * line.offset;
        let count = poisson_count(2.0 * half * nu, rng)?;
        for _ in 0..count {
            let t = rng.random_range(-half..half);
            let z = normal.sample(rng);
            let p = foot + u * t + nrm * z;
            if window.contains(p) {
                points.push(p);
                line_of_point.push(l);
            }
        }
        lines.push(line);
    }
    Ok(PlcpRealisation {
        pattern: PointPattern::new(points, *window)?,
        lines,
        line_of_point,
    })
}

/// Poisson line cluster process with von Mises line directions.
pub fn sim_plcp(model: &ModelSpec, window: &Window, rng: &mut RngStream) -> Result<PointPattern> {
    Ok(sim_plcp_with_lines(model, window, rng)?.pattern)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concentration_values() {
        assert_eq!(plcp_concentration(1.0), 0.0);
        assert!((plcp_concentration(0.6) - 2.43291).abs() < 1e-5);
    }

    #[test]
    fn points_stay_near_their_lines() {
        let m = ModelSpec::paper_plcp(0.6);
        let w = Window::centered_square(1.0).unwrap();
        let mut rng = RngStream::from_seed(2);
        for _ in 0..20 {
            let r = sim_plcp_with_lines(&m, &w, &mut rng).unwrap();
            assert_eq!(r.pattern.len(), r.line_of_point.len());
            for (p, &l) in r.pattern.points().iter().zip(&r.line_of_point) {
                assert!(r.lines[l].distance(*p) <= 6.0 * 0.015);
            }
        }
    }

    #[test]
    fn zero_displacement_puts_points_on_lines() {
        let m = ModelSpec::Plcp {
            rho_lines: 5.0,
            nu: 20.0,
            sigma_perp: 0.0,
            a: 1.0,
            theta: 0.0,
        };
        let r = sim_plcp_with_lines(&m, &Window::unit_square(), &mut RngStream::from_seed(3)).unwrap();
        for (p, &l) in r.pattern.points().iter().zip(&r.line_of_point) {
            assert!(r.lines[l].distance(*p) < 1e-12);
        }
    }
}
