use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::geometry::{Point, PointPattern, Window};
use crate::rng::RngStream;

/// Poisson-distributed count with mean `mean` (0 when `mean == 0`).
pub(crate) fn poisson_count(mean: f64, rng: &mut RngStream) -> Result<usize> {
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::InvalidArgument(format!("poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as usize)
}

pub(crate) fn uniform_in(window: &Window, rng: &mut RngStream) -> Point {
    Point::new(
        rng.random_range(window.xmin..window.xmax),
        rng.random_range(window.ymin..window.ymax),
    )
}

/// Homogeneous Poisson process with intensity `lambda` on `window`.
pub fn sim_poisson(lambda: f64, window: &Window, rng: &mut RngStream) -> Result<PointPattern> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("intensity {lambda}")));
    }
    let n = poisson_count(lambda * window.area(), rng)?;
    Ok(sim_binomial(n, window, rng))
}

/// `n` i.i.d. uniform points on `window`.
pub fn sim_binomial(n: usize, window: &Window, rng: &mut RngStream) -> PointPattern {
    let points: Vec<Point> = (0..n).map(|_| uniform_in(window, rng)).collect();
    PointPattern::clipped(points, *window)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_intensity_is_empty() {
        let mut rng = RngStream::from_seed(1);
        assert!(sim_poisson(0.0, &Window::unit_square(), &mut rng).unwrap().is_empty());
        assert!(sim_poisson(-1.0, &Window::unit_square(), &mut rng).is_err());
    }

    #[test]
    fn fixed_seed_repeats() {
        let w = Window::unit_square();
        let a = sim_poisson(400.0, &w, &mut RngStream::from_seed(9)).unwrap();
        let b = sim_poisson(400.0, &w, &mut RngStream::from_seed(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mean_count_within_clt_band() {
        let w = Window::unit_square();
        let mut rng = RngStream::from_seed(77);
        let total: usize = (0..1000).map(|_| sim_poisson(400.0, &w, &mut rng).unwrap().len()).sum();
        let mean = total as f64 / 1000.0;
        assert!((398.1..=401.9).contains(&mean), "mean {mean}");
    }
}
