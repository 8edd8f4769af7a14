//! Planar primitives and the rectangular-window algebra used by the
//! estimators and replication methods.
//!
//! All windows are axis-aligned rectangles. Erosion of such a rectangle by a
//! centrally symmetric compact set is again a rectangle, shrunk on each axis
//! by the set's coordinate extent, which keeps every edge-correction area in
//! closed form.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector `(cos alpha, sin alpha)`.
    pub fn unit(alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        Self { x: c, y: s }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dist_sq(self, other: Point) -> f64 {
        (self - other).norm_sq()
    }

    /// Counter-clockwise rotation about the origin.
    pub fn rotate(self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            x: c * self.x - s * self.y,
            y: s * self.x + c * self.y,
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Direction of the vector reduced modulo pi, in `[0, pi)`.
    pub fn axial_angle(self) -> Result<f64> {
        if self.x == 0.0 && self.y == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(reduce_axial(self.y.atan2(self.x)))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

/// Reduce an angle into `[0, pi)`.
pub fn reduce_axial(angle: f64) -> f64 {
    let r = angle.rem_euclid(PI);
    // rem_euclid can round up to exactly pi for tiny negative inputs
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Shortest distance between two axial directions (angles modulo pi).
pub fn axial_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Rotate every point by `theta` about the origin.
pub fn rotate_points(points: &[Point], theta: f64) -> Vec<Point> {
    let (s, c) = theta.sin_cos();
    points
        .iter()
        .map(|p| Point::new(c * p.x - s * p.y, s * p.x + c * p.y))
        .collect()
}

/// Axis-aligned rectangular observation window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Window {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        let finite = [xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite());
        if !finite || !(xmin < xmax) || !(ymin < ymax) {
            return Err(Error::InvalidWindow(format!(
                "[{xmin}, {xmax}] x [{ymin}, {ymax}]"
            )));
        }
        Ok(Self {
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }

    /// Square `[-side/2, side/2]^2`.
    pub fn centered_square(side: f64) -> Result<Self> {
        Self::new(-side / 2.0, side / 2.0, -side / 2.0, side / 2.0)
    }

    pub fn unit_square() -> Self {
        Self {
            xmin: 0.0,
            xmax: 1.0,
            ymin: 0.0,
            ymax: 1.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn min_side(&self) -> f64 {
        self.width().min(self.height())
    }

    pub fn center(&self) -> Point {
        Point::new(
            0.5 * (self.xmin + self.xmax),
            0.5 * (self.ymin + self.ymax),
        )
    }

    pub fn is_square(&self) -> bool {
        let (w, h) = (self.width(), self.height());
        (w - h).abs() <= 1e-12 * w.max(h)
    }

    pub fn circumradius(&self) -> f64 {
        0.5 * self.width().hypot(self.height())
    }

    /// Closed containment.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    /// Clamp onto the closed window; used after transforms whose exact
    /// result lies on the boundary but may round one ulp outside.
    pub fn clamp(&self, p: Point) -> Point {
        Point::new(
            p.x.clamp(self.xmin, self.xmax),
            p.y.clamp(self.ymin, self.ymax),
        )
    }

    /// Distance from an interior point to the window boundary.
    pub fn border_distance(&self, p: Point) -> f64 {
        (p.x - self.xmin)
            .min(self.xmax - p.x)
            .min(p.y - self.ymin)
            .min(self.ymax - p.y)
    }

    /// Area of `W ∩ (W + delta)`.
    pub fn translation_overlap_area(&self, delta: Point) -> f64 {
        (self.width() - delta.x.abs()).max(0.0) * (self.height() - delta.y.abs()).max(0.0)
    }

    /// Area of `W ⊖ DS(alpha, eps, d)`.
    pub fn erosion_area_cone(&self, cone: &DoubleCone, d: f64) -> Result<f64> {
        let (ex, ey) = cone.extents(d)?;
        Ok((self.width() - 2.0 * ex).max(0.0) * (self.height() - 2.0 * ey).max(0.0))
    }

    /// Membership of `p` in `W ⊖ DS(alpha, eps, d)`.
    pub fn eroded_rect_contains(&self, cone: &DoubleCone, d: f64, p: Point) -> Result<bool> {
        let (ex, ey) = cone.extents(d)?;
        Ok(p.x >= self.xmin + ex
            && p.x <= self.xmax - ex
            && p.y >= self.ymin + ey
            && p.y <= self.ymax - ey)
    }
}

/// Infinite double cone with axis direction `alpha` (modulo pi) and
/// half-angle `eps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleCone {
    alpha: f64,
    eps: f64,
}

impl DoubleCone {
    pub fn new(alpha: f64, eps: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("cone axis {alpha}")));
        }
        if !(eps > 0.0 && eps <= FRAC_PI_2) {
            return Err(Error::InvalidArgument(format!(
                "cone half-angle {eps} outside (0, pi/2]"
            )));
        }
        Ok(Self {
            alpha: reduce_axial(alpha),
            eps,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Closed angular containment of a difference vector.
    pub fn contains(&self, delta: Point) -> Result<bool> {
        let phi = delta.axial_angle()?;
        Ok(axial_distance(phi, self.alpha) <= self.eps)
    }

    /// Half-extents `(e_x, e_y)` of `DS(alpha, eps, d)` along the axes.
    pub fn extents(&self, d: f64) -> Result<(f64, f64)> {
        if !(d >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "erosion radius {d} must be non-negative"
            )));
        }
        if d == 0.0 {
            return Ok((0.0, 0.0));
        }
        if d.is_infinite() {
            return Ok((f64::INFINITY, f64::INFINITY));
        }
        let lo = self.alpha - self.eps;
        let hi = self.alpha + self.eps;
        let cx = if spans_multiple(lo, hi, 0.0) {
            1.0
        } else {
            lo.cos().abs().max(hi.cos().abs())
        };
        let sy = if spans_multiple(lo, hi, FRAC_PI_2) {
            1.0
        } else {
            lo.sin().abs().max(hi.sin().abs())
        };
        Ok((d * cx, d * sy))
    }
}

/// Whether `[lo, hi]` contains `offset + k*pi` for some integer `k`.
fn spans_multiple(lo: f64, hi: f64, offset: f64) -> bool {
    ((hi - offset) / PI).floor() >= ((lo - offset) / PI).ceil()
}

/// Rectangle `{t u + s u_perp : |t| <= half_length, |s| <= half_width}` with
/// `u = (cos alpha, sin alpha)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientedRect {
    pub alpha: f64,
    pub half_width: f64,
    pub half_length: f64,
}

impl OrientedRect {
    pub fn new(alpha: f64, half_width: f64, half_length: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_length > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rectangle half-sizes must be positive (w = {half_width}, r = {half_length})"
            )));
        }
        Ok(Self {
            alpha,
            half_width,
            half_length,
        })
    }

    pub fn contains(&self, delta: Point) -> bool {
        let u = Point::unit(self.alpha);
        let axial = delta.dot(u);
        let perp = delta.x * -u.y + delta.y * u.x;
        axial.abs() <= self.half_length && perp.abs() <= self.half_width
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_width * self.half_length
    }
}

/// A finite planar point pattern observed in a rectangular window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointPattern {
    points: Vec<Point>,
    window: Window,
}

impl PointPattern {
    /// Build a pattern, checking that every point is finite and inside the
    /// closed window.
    pub fn new(points: Vec<Point>, window: Window) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !p.is_finite() || !window.contains(**p)) {
            return Err(Error::PointOutsideWindow { x: p.x, y: p.y });
        }
        Ok(Self { points, window })
    }

    /// Keep only the points falling inside `window`.
    pub fn clipped(points: impl IntoIterator<Item = Point>, window: Window) -> Self {
        let points = points.into_iter().filter(|p| window.contains(*p)).collect();
        Self { points, window }
    }

    pub fn empty(window: Window) -> Self {
        Self {
            points: Vec::new(),
            window,
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn intensity(&self) -> f64 {
        self.len() as f64 / self.window.area()
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub(crate) fn require(&self, need: usize) -> Result<()> {
        if self.len() < need {
            return Err(Error::TooFewPoints {
                need,
                got: self.len(),
            });
        }
        Ok(())
    }

    /// Index of the first point that duplicates an earlier one.
    pub fn first_duplicate(&self) -> Option<usize> {
        let mut keyed: Vec<(u64, u64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (canonical_bits(p.x), canonical_bits(p.y), i))
            .collect();
        keyed.sort_unstable();
        keyed
            .windows(2)
            .filter(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1)
            .map(|w| w[0].2.max(w[1].2))
            .min()
    }
}

fn canonical_bits(v: f64) -> u64 {
    // -0.0 and 0.0 are the same location
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}
