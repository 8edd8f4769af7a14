use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::geometry::{Point, PointPattern, Window};
use crate::rng::RngStream;

use super::poisson::poisson_count;
use super::ModelSpec;

/// Grids with at most this many cells fall back to a dense Cholesky factor
/// when circulant embedding fails.
const DENSE_FALLBACK_CELLS: usize = 2500;

/// Relative size of a negative embedding eigenvalue that is clipped to zero.
const NEGATIVE_EIGEN_TOL: f64 = 1e-8;

fn smooth_size_at_least(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

enum FieldSampler {
    Constant,
    Circulant {
        mx: usize,
        my: usize,
        /// `sqrt(lambda / M)` per embedding frequency, row-major.
        scale: Vec<f64>,
        row: Arc<dyn Fft<f64>>,
        col: Arc<dyn Fft<f64>>,
    },
    Dense {
        /// Lower-triangular Cholesky factor, row-major packed as full matrix.
        chol: Vec<f64>,
    },
}

/// LGCP simulator with the grid and covariance factorisation prepared once
/// for a (model, window) pair.
pub struct LgcpSimulator {
    mu: f64,
    theta: f64,
    a: f64,
    window: Window,
    origin: Point,
    nx: usize,
    ny: usize,
    spacing: f64,
    sampler: FieldSampler,
}

impl fmt::Debug for LgcpSimulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.sampler {
            FieldSampler::Constant => "constant",
            FieldSampler::Circulant { .. } => "circulant",
            FieldSampler::Dense { .. } => "dense",
        };
        f.debug_struct("LgcpSimulator")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("spacing", &self.spacing)
            .field("sampler", &kind)
            .finish()
    }
}

impl LgcpSimulator {
    pub fn new(model: &ModelSpec, window: &Window) -> Result<Self> {
        let ModelSpec::Lgcp {
            mu,
            sigma2,
            scale,
            a,
            theta,
        } = *model
        else {
            return Err(Error::InvalidArgument(format!("{} is not an LGCP", model.name())));
        };
        model.validate()?;

        let centre = window.center();
        let corners = [
            Point::new(window.xmin, window.ymin),
            Point::new(window.xmax, window.ymin),
            Point::new(window.xmin, window.ymax),
            Point::new(window.xmax, window.ymax),
        ];
        let pre: Vec<Point> = corners
            .iter()
            .map(|&p| to_pre_image(p - centre, theta, a))
            .collect();
        let (xmin, xmax) = pre.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.x), hi.max(p.x))
        });
        let (ymin, ymax) = pre.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.y), hi.max(p.y))
        });

        let spacing = (scale / 2.0).min(window.min_side() / 256.0);
        let nx = (((xmax - xmin) / spacing).ceil() as usize).max(1);
        let ny = (((ymax - ymin) / spacing).ceil() as usize).max(1);

        let sampler = if sigma2 == 0.0 {
            FieldSampler::Constant
        } else {
            build_sampler(nx, ny, spacing, sigma2, scale)?
        };
        Ok(Self {
            mu,
            theta,
            a,
            window: *window,
            origin: Point::new(xmin, ymin),
            nx,
            ny,
            spacing,
            sampler,
        })
    }

    /// Grid cells per axis and cell side.
    pub fn grid_shape(&self) -> (usize, usize, f64) {
        (self.nx, self.ny, self.spacing)
    }

    /// One Gaussian field draw on the grid (zero mean), row-major `ny x nx`.
    pub fn sample_field(&self, rng: &mut RngStream) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.ny);
        match &self.sampler {
            FieldSampler::Constant => vec![0.0; nx * ny],
            FieldSampler::Circulant {
                mx,
                my,
                scale,
                row,
                col,
            } => {
                let mut buf: Vec<Complex64> = scale
                    .iter()
                    .map(|&s| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(s * re, s * im)
                    })
                    .collect();
                fft2(&mut buf, *mx, *my, row, col);
                let mut out = Vec::with_capacity(nx * ny);
                for iy in 0..ny {
                    out.extend(buf[iy * mx..iy * mx + nx].iter().map(|c| c.re));
                }
                out
            }
            FieldSampler::Dense { chol } => {
                let m = nx * ny;
                let z: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
                (0..m)
                    .map(|i| chol[i * m..i * m + i + 1].iter().zip(&z).map(|(l, z)| l * z).sum())
                    .collect()
            }
        }
    }

    pub fn simulate(&self, rng: &mut RngStream) -> PointPattern {
        let field = self.sample_field(rng);
        let cell_area = self.spacing * self.spacing;
        let mut cumulative = Vec::with_capacity(field.len());
        let mut total = 0.0;
        for z in &field {
            total += (self.mu + z).exp() * cell_area;
            cumulative.push(total);
        }
        let n = if total.is_finite() {
            poisson_count(total, rng).unwrap_or(0)
        } else {
            0
        };
        let centre = self.window.center();
        let mut points = Vec::with_capacity(n);
        for _ in 0..n {
            let u = rng.random::<f64>() * total;
            let cell = cumulative.partition_point(|&c| c <= u).min(field.len() - 1);
            let (ix, iy) = (cell % self.nx, cell / self.nx);
            let q = Point::new(
                self.origin.x + (ix as f64 + rng.random::<f64>()) * self.spacing,
                self.origin.y + (iy as f64 + rng.random::<f64>()) * self.spacing,
            );
            points.push(centre + from_pre_image(q, self.theta, self.a));
        }
        PointPattern::clipped(points, self.window)
    }
}

/// `C(a)^-1 R(-theta) p`; identity when `a == 1`.
fn to_pre_image(p: Point, theta: f64, a: f64) -> Point {
    if a == 1.0 {
        return p;
    }
    let r = p.rotate(-theta);
    Point::new(r.x * a, r.y / a)
}

/// `R(theta) C(a) q`; identity when `a == 1`.
fn from_pre_image(q: Point, theta: f64, a: f64) -> Point {
    if a == 1.0 {
        return q;
    }
    Point::new(q.x / a, q.y * a).rotate(theta)
}

fn fft2(buf: &mut [Complex64], mx: usize, my: usize, row: &Arc<dyn Fft<f64>>, col: &Arc<dyn Fft<f64>>) {
    row.process(buf);
    let mut t = vec![Complex64::new(0.0, 0.0); mx * my];
    transpose(buf, &mut t, mx, my);
    col.process(&mut t);
    transpose(&t, buf, my, mx);
}

/// `src` is `rows x cols` row-major; `dst` becomes `cols x rows`.
fn transpose(src: &[Complex64], dst: &mut [Complex64], cols: usize, rows: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

fn build_sampler(nx: usize, ny: usize, spacing: f64, sigma2: f64, scale: f64) -> Result<FieldSampler> {
    let cov = |dx: f64, dy: f64| sigma2 * (-(dx.hypot(dy)) / scale).exp();
    let mut planner = FftPlanner::new();
    let mut worst = 0.0;
    let mut last = (0, 0);
    for factor in [2, 3, 4] {
        let mx = smooth_size_at_least(factor * nx);
        let my = smooth_size_at_least(factor * ny);
        last = (mx, my);
        let mut buf = vec![Complex64::new(0.0, 0.0); mx * my];
        for iy in 0..my {
            let dy = iy.min(my - iy) as f64 * spacing;
            for ix in 0..mx {
                let dx = ix.min(mx - ix) as f64 * spacing;
                buf[iy * mx + ix] = Complex64::new(cov(dx, dy), 0.0);
            }
        }
        let row = planner.plan_fft_forward(mx);
        let col = planner.plan_fft_forward(my);
        fft2(&mut buf, mx, my, &row, &col);
        let max = buf.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
        let min = buf.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if min >= -NEGATIVE_EIGEN_TOL * max {
            let m = (mx * my) as f64;
            let scale = buf.iter().map(|c| (c.re.max(0.0) / m).sqrt()).collect();
            return Ok(FieldSampler::Circulant {
                mx,
                my,
                scale,
                row,
                col,
            });
        }
        worst = min;
    }
    if nx * ny <= DENSE_FALLBACK_CELLS {
        let m = nx * ny;
        let mut c = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                let dx = (i % nx).abs_diff(j % nx) as f64 * spacing;
                let dy = (i / nx).abs_diff(j / nx) as f64 * spacing;
                c[i * m + j] = cov(dx, dy);
            }
        }
        if let Some(chol) = cholesky(c, m) {
            return Ok(FieldSampler::Dense { chol });
        }
    }
    Err(Error::EmbeddingFailure {
        nx: last.0,
        ny: last.1,
        spacing,
        min_eigenvalue: worst,
    })
}

fn cholesky(mut a: Vec<f64>, m: usize) -> Option<Vec<f64>> {
    for j in 0..m {
        let mut d = a[j * m + j];
        for k in 0..j {
            d -= a[j * m + k] * a[j * m + k];
        }
        if d <= 0.0 {
            return None;
        }
        let d = d.sqrt();
        a[j * m + j] = d;
        for i in j + 1..m {
            let mut s = a[i * m + j];
            for k in 0..j {
                s -= a[i * m + k] * a[j * m + k];
            }
            a[i * m + j] = s / d;
        }
        for k in j + 1..m {
            a[j * m + k] = 0.0;
        }
    }
    Some(a)
}

/// One LGCP draw; prefer [`LgcpSimulator`] when drawing repeatedly.
pub fn sim_lgcp(model: &ModelSpec, window: &Window, rng: &mut RngStream) -> Result<PointPattern> {
    Ok(LgcpSimulator::new(model, window)?.simulate(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pre_image_round_trip() {
        let p = Point::new(0.3, -0.2);
        let q = to_pre_image(p, 0.5, 0.6);
        let back = from_pre_image(q, 0.5, 0.6);
        assert!(back.dist(p) < 1e-14);
    }

    #[test]
    fn smooth_sizes() {
        assert_eq!(smooth_size_at_least(7), 8);
        assert_eq!(smooth_size_at_least(512), 512);
        assert_eq!(smooth_size_at_least(514), 540);
    }

    #[test]
    fn cholesky_reproduces_matrix() {
        let a = vec![4.0, 2.0, 2.0, 3.0];
        let l = cholesky(a.clone(), 2).unwrap();
        let rebuilt = [
            l[0] * l[0],
            l[0] * l[2],
            l[2] * l[0],
            l[2] * l[2] + l[3] * l[3],
        ];
        for (x, y) in rebuilt.iter().zip(&a) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn field_marginal_variance() {
        let model = ModelSpec::Lgcp {
            mu: 0.0,
            sigma2: 3.0,
            scale: 0.02,
            a: 1.0,
            theta: 0.0,
        };
        let sim = LgcpSimulator::new(&model, &Window::centered_square(0.25).unwrap()).unwrap();
        let mut rng = RngStream::from_seed(3);
        let mut acc = 0.0;
        let mut count = 0;
        for _ in 0..40 {
            let f = sim.sample_field(&mut rng);
            // thin to roughly independent cells
            for z in f.iter().step_by(97) {
                acc += z * z;
                count += 1;
            }
        }
        let var = acc / count as f64;
        assert!((var - 3.0).abs() < 0.3, "variance {var}");
    }

    #[test]
    fn long_correlation_reports_embedding_diagnostics() {
        let model = ModelSpec::Lgcp {
            mu: 0.0,
            sigma2: 1.0,
            scale: 0.5,
            a: 1.0,
            theta: 0.0,
        };
        match LgcpSimulator::new(&model, &Window::unit_square()) {
            Err(Error::EmbeddingFailure {
                nx, spacing, min_eigenvalue, ..
            }) => {
                assert!(nx >= 512);
                assert_eq!(spacing, 1.0 / 256.0);
                assert!(min_eigenvalue < 0.0);
            }
            other => panic!("expected embedding failure, got {other:?}"),
        }
    }

    #[test]
    fn coarse_grid_field_has_grid_shape() {
        let model = ModelSpec::Lgcp {
            mu: 0.0,
            sigma2: 1.0,
            scale: 0.05,
            a: 0.5,
            theta: 0.3,
        };
        let sim = LgcpSimulator::new(&model, &Window::unit_square()).unwrap();
        let f = sim.sample_field(&mut RngStream::from_seed(1));
        assert_eq!(f.len(), sim.grid_shape().0 * sim.grid_shape().1);
    }

    #[test]
    fn rejects_other_models() {
        assert!(LgcpSimulator::new(&ModelSpec::Poisson { lambda: 1.0 }, &Window::unit_square()).is_err());
    }
}
