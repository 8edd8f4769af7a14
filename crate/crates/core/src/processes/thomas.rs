use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::{Point, PointPattern, Window};
use crate::rng::RngStream;

use super::poisson::poisson_count;
use super::ModelSpec;

/// Thomas cluster process; parents live on the window dilated by four
/// offspring standard deviations.
pub fn sim_thomas(model: &ModelSpec, window: &Window, rng: &mut RngStream) -> Result<PointPattern> {
    let ModelSpec::Thomas {
        kappa_parent,
        mu_off,
        sigma_off,
    } = *model
    else {
        return Err(Error::InvalidArgument(format!("{} is not a Thomas model", model.name())));
    };
    model.validate()?;
    let pad = 4.0 * sigma_off;
    let outer = Window::new(window.xmin - pad, window.xmax + pad, window.ymin - pad, window.ymax + pad)?;
    let normal = Normal::new(0.0, sigma_off).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let parents = poisson_count(kappa_parent * outer.area(), rng)?;
    let mut points = Vec::new();
    for _ in 0..parents {
        let c = Point::new(
            rng.random_range(outer.xmin..outer.xmax),
            rng.random_range(outer.ymin..outer.ymax),
        );
        let kids = poisson_count(mu_off, rng)?;
        for _ in 0..kids {
            points.push(Point::new(c.x + normal.sample(rng), c.y + normal.sample(rng)));
        }
    }
    Ok(PointPattern::clipped(points, *window))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_offspring_gives_empty() {
        let m = ModelSpec::Thomas {
            kappa_parent: 50.0,
            mu_off: 0.0,
            sigma_off: 0.02,
        };
        assert!(sim_thomas(&m, &Window::unit_square(), &mut RngStream::from_seed(1))
            .unwrap()
            .is_empty());
    }
}
